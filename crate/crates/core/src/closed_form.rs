//! The rank-one dual value `T₁(K; λ)`.
//!
//! Restricting the dual multipliers to `μ_ij = u_i u_j`, `t_ij = −μ_ij` turns
//! the dual into maximizing the quadratic form
//!
//! ```text
//! Δ(x) = Σ_{i>j} x_i x_j/(K−1) − Σ_{i≥j} x_i x_j/(K+1) = ((Σx)² − K‖x‖²)/(K² − 1)
//! ```
//!
//! over the box `|x_i| ≤ √λ_i`. The maximum sits on a face where the `c`
//! smallest coordinates touch their caps and the rest share the stationary
//! value `Σ_{i≤c} √λ_i/(K + c − d)`; `c*` is the first `c` for which that
//! value fits under every remaining cap.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ppt_sdp::{lower_bound_value, TriTable};
use crate::spectra::SchmidtVector;

/// Largest rank accepted by [`face_search`], which enumerates `2^d − 1` faces.
pub const FACE_SEARCH_GUARD_DIM: usize = 5;

fn check(lambda: &SchmidtVector, k: usize) -> Result<()> {
    if lambda.is_empty() {
        return Err(Error::InvalidVector("vector is empty".into()));
    }
    if k < 2 {
        return Err(Error::Domain(format!("K must be at least 2, got {k}")));
    }
    if lambda.has_zeros() {
        return Err(Error::Domain(
            "target has zero Schmidt coefficients; strip them first".into(),
        ));
    }
    Ok(())
}

/// First candidate face size. When `d ≤ K` the nominal start `1 + d − K` is
/// clamped to 1.
pub fn c_range_start(d: usize, k: usize) -> usize {
    (1 + d).saturating_sub(k).max(1)
}

/// Smallest `c` in `c_range_start(d, K)..d` with
/// `Σ_{i≤c} √λ_i / (K + c − d) ≤ √λ_{c+1}`, or `d` if none qualifies.
pub fn c_star(lambda: &SchmidtVector, k: usize) -> Result<usize> {
    check(lambda, k)?;
    let roots: Vec<f64> = lambda.coeffs().iter().map(|c| c.sqrt()).collect();
    let d = roots.len();
    let start = c_range_start(d, k);
    let mut prefix: f64 = roots[..start.min(d)].iter().sum();
    for (c, &next) in roots.iter().enumerate().skip(start) {
        let m = (k + c - d) as f64;
        if prefix / m <= next {
            return Ok(c);
        }
        prefix += next;
    }
    Ok(d)
}

/// Maximizer of `Δ` on the face selected by `c`: caps on the first `c`
/// coordinates, the stationary value elsewhere.
fn face_point(roots: &[f64], k: usize, c: usize) -> Vec<f64> {
    let d = roots.len();
    if c >= d {
        return roots.to_vec();
    }
    let y = roots[..c].iter().sum::<f64>() / (k + c - d) as f64;
    roots[..c]
        .iter()
        .copied()
        .chain(std::iter::repeat_n(y, d - c))
        .collect()
}

/// `Δ(x)` without the box check.
fn delta_raw(x: &[f64], k: usize) -> f64 {
    let k = k as f64;
    let sum: f64 = x.iter().sum();
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    (sum * sum - k * norm2) / (k * k - 1.0)
}

/// `Δ(x)`. `x` must lie in the box `|x_i| ≤ √λ_i` up to `1e-12`.
pub fn delta(x: &[f64], lambda: &SchmidtVector, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("K must be at least 2, got {k}")));
    }
    if x.len() != lambda.len() {
        return Err(Error::Domain(format!(
            "x has {} entries, λ has {}",
            x.len(),
            lambda.len()
        )));
    }
    for (i, (xi, li)) in x.iter().zip(lambda.coeffs()).enumerate() {
        if xi.abs() > li.sqrt() + 1e-12 {
            return Err(Error::Domain(format!(
                "x_{} = {xi} lies outside the box |x| ≤ {}",
                i + 1,
                li.sqrt()
            )));
        }
    }
    Ok(delta_raw(x, k))
}

/// The maximizing face and the resulting value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FaceSearchResult {
    pub c_star: usize,
    pub t1_value: f64,
    pub x_point: Vec<f64>,
    pub delta_value: f64,
}

pub fn t1_face(lambda: &SchmidtVector, k: usize) -> Result<FaceSearchResult> {
    let c = c_star(lambda, k)?;
    let roots: Vec<f64> = lambda.coeffs().iter().map(|v| v.sqrt()).collect();
    let d = roots.len();
    let x = face_point(&roots, k, c);
    let delta_value = delta_raw(&x, k);
    let t1_value = if c == d {
        let kf = k as f64;
        (lambda.s_half_pow() - 1.0) / (kf - 1.0)
    } else {
        lower_bound_value(lambda, k) + delta_value
    };
    Ok(FaceSearchResult {
        c_star: c,
        t1_value,
        x_point: x,
        delta_value,
    })
}

/// `T₁(K; λ)`, a lower bound on `T(K; λ)`. When `c* = d` this is
/// `(2^{S½} − 1)/(K − 1)`.
pub fn t1_value(lambda: &SchmidtVector, k: usize) -> Result<f64> {
    t1_face(lambda, k).map(|r| r.t1_value)
}

/// Rank-one dual point `μ_ij = u_i u_j`, `t_ij = −μ_ij` with
/// `u_i = x_i/√λ_i` at the maximizing face.
#[derive(Clone, Debug, Serialize)]
pub struct Rank1DualPoint {
    pub u: Vec<f64>,
    pub mu: TriTable,
    pub t: TriTable,
    pub objective: f64,
}

pub fn rank1_dual_point(lambda: &SchmidtVector, k: usize) -> Result<Rank1DualPoint> {
    let face = t1_face(lambda, k)?;
    let u: Vec<f64> = face
        .x_point
        .iter()
        .zip(lambda.coeffs())
        .map(|(x, l)| (x / l.sqrt()).min(1.0))
        .collect();
    let d = u.len();
    let mu = TriTable::from_fn(d, false, |i, j| u[i] * u[j]);
    let t = TriTable::from_fn(d, true, |i, j| -u[i] * u[j]);

    let kf = k as f64;
    let c = lambda.coeffs();
    let mut objective = lower_bound_value(lambda, k);
    for ((i, j), m) in mu.iter() {
        objective -= m * (c[i] * c[j]).sqrt() / (kf + 1.0);
    }
    for ((i, j), tv) in t.iter() {
        objective -= tv * (c[i] * c[j]).sqrt() / (kf - 1.0);
    }
    Ok(Rank1DualPoint {
        u,
        mu,
        t,
        objective,
    })
}

/// Stationary point of `Δ` on the face where the coordinates in `caps` sit on
/// their caps and the others move together. `None` when the face admits no
/// maximizing stationary point inside the box.
pub fn face_stationary(
    lambda: &SchmidtVector,
    k: usize,
    caps: &[usize],
) -> Option<(Vec<f64>, f64)> {
    let roots: Vec<f64> = lambda.coeffs().iter().map(|v| v.sqrt()).collect();
    let d = roots.len();
    let c = caps.len();
    if k + c <= d {
        return None;
    }
    let a: f64 = caps.iter().map(|&i| roots[i]).sum();
    let y = a / (k + c - d) as f64;
    let mut x = vec![y; d];
    for &i in caps {
        x[i] = roots[i];
    }
    let fits = (0..d).filter(|i| !caps.contains(i)).all(|i| y <= roots[i]);
    fits.then(|| {
        let v = delta_raw(&x, k);
        (x, v)
    })
}

/// Brute-force maximum of `Δ` over every non-empty cap set (the full set is
/// the corner `x = √λ`). Returns the best value and its point.
pub fn face_search(lambda: &SchmidtVector, k: usize) -> Result<(f64, Vec<f64>)> {
    check(lambda, k)?;
    let d = lambda.len();
    if d > FACE_SEARCH_GUARD_DIM {
        return Err(Error::DimensionGuard {
            what: "face search",
            dim: d,
            limit: FACE_SEARCH_GUARD_DIM,
        });
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << d) {
        let caps: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        if let Some((x, v)) = face_stationary(lambda, k, &caps) {
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, x));
            }
        }
    }
    Ok(best.expect("the full cap set is always admissible"))
}

/// Exchange step behind the face search: if `C₀ ∪ {n₁}` has a stationary
/// point and `λ_{n₁} > λ_{n₂}`, then `C₀ ∪ {n₂}` has one too and its `Δ` is
/// no smaller. Indices are 0-based into the ascending vector.
pub fn swap_improves(
    lambda: &SchmidtVector,
    k: usize,
    c0: &[usize],
    n1: usize,
    n2: usize,
) -> Result<bool> {
    check(lambda, k)?;
    let d = lambda.len();
    let c = lambda.coeffs();
    if n1 >= d || n2 >= d || c0.iter().any(|&i| i >= d) {
        return Err(Error::Precondition("index out of range".into()));
    }
    if c0.contains(&n1) || c0.contains(&n2) || n1 == n2 {
        return Err(Error::Precondition(
            "n₁ and n₂ must be distinct and outside C₀".into(),
        ));
    }
    if c[n1] <= c[n2] {
        return Err(Error::Precondition(format!(
            "need λ_n₁ > λ_n₂, got {} and {}",
            c[n1], c[n2]
        )));
    }
    let mut c1 = c0.to_vec();
    c1.push(n1);
    let Some((_, d1)) = face_stationary(lambda, k, &c1) else {
        return Err(Error::Precondition(
            "C₀ ∪ {n₁} has no stationary point".into(),
        ));
    };
    let mut c2 = c0.to_vec();
    c2.push(n2);
    Ok(match face_stationary(lambda, k, &c2) {
        Some((_, d2)) => d2 >= d1 - 1e-12 * d1.abs().max(1.0),
        None => false,
    })
}
