//! The semidefinite program whose value `T(K; λ)` decides `Φ_K → ρ_λ` under
//! PPT operations, in its block-reduced form, together with the unreduced
//! program used as an independent oracle.
//!
//! In the Schmidt basis the constraint operator `Σ s_ij σ_ijᴳ + Σ a_ij α_ijᴳ`
//! splits into `2 × 2`-degenerate scalars `(s_ij + a_ij)/2` on the span of
//! `|ij⟩, |ji⟩` and a `d × d` block `M` on the span of the `|ii⟩`, with
//! `M_ii = s_ii` and `M_ij = (s_ij − a_ij)/2`. The reduced program keeps
//! exactly this structure: an orthant block plus one `d × d` PSD block.
//!
//! Coefficient tables are stored row-major over the lower triangle:
//! `(1,1), (2,1), (2,2), (3,1), …` for `s` and `μ`, and the strict lower
//! triangle `(2,1), (3,1), (3,2), …` for `a` and `t` (1-based labels).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conic::{
    eigenvalues, min_eigenvalue, ConicProblem, LinearRow, PsdBlock, SolveStatus, SolverOptions,
    SparseSym,
};
use crate::error::{Error, Result};
use crate::spectra::SchmidtVector;

/// Default largest Schmidt rank handed to the reduced solver. The Newton
/// system has `d²` unknowns.
pub const REDUCED_GUARD_DIM: usize = 30;
/// Default guard for the unreduced oracle, overridable through
/// `PPT_FORGE_GUARD_DIM`.
pub const ORACLE_GUARD_DIM: usize = 6;
/// Tolerance used by the feasibility checkers.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Lower-triangular coefficient table, optionally without the diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>")]
pub struct TriTable {
    #[serde(skip)]
    d: usize,
    #[serde(skip)]
    strict: bool,
    data: Vec<f64>,
}

impl From<TriTable> for Vec<f64> {
    fn from(t: TriTable) -> Self {
        t.data
    }
}

impl TriTable {
    pub fn zeros(d: usize, strict: bool) -> Self {
        let len = if strict {
            d * d.saturating_sub(1) / 2
        } else {
            d * (d + 1) / 2
        };
        TriTable {
            d,
            strict,
            data: vec![0.0; len],
        }
    }

    pub fn from_fn(d: usize, strict: bool, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut t = TriTable::zeros(d, strict);
        for i in 0..d {
            let end = if strict { i } else { i + 1 };
            for j in 0..end {
                let k = t.index(i, j);
                t.data[k] = f(i, j);
            }
        }
        t
    }

    pub fn from_vec(d: usize, strict: bool, data: Vec<f64>) -> Result<Self> {
        let t = TriTable::zeros(d, strict);
        if t.data.len() != data.len() {
            return Err(Error::Domain(format!(
                "table for d = {d} needs {} entries, got {}",
                t.data.len(),
                data.len()
            )));
        }
        Ok(TriTable { data, ..t })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Position of `(i, j)`, `i ≥ j` (`i > j` for strict tables), 0-based.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(if self.strict { i > j } else { i >= j });
        if self.strict {
            i * (i - 1) / 2 + j
        } else {
            i * (i + 1) / 2 + j
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.data[k] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// `((i, j), value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        let strict = self.strict;
        (0..self.d)
            .flat_map(move |i| (0..if strict { i } else { i + 1 }).map(move |j| (i, j)))
            .zip(self.data.iter().copied())
    }
}

/// Block-reduced program for `T(K; λ)`.
#[derive(Clone, Debug)]
pub struct ReducedSdp {
    k: usize,
    lambda: SchmidtVector,
    weights: TriTable,
}

impl ReducedSdp {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> &SchmidtVector {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// `w_ij = √(λ_i λ_j)`, `i ≥ j`.
    pub fn weights(&self) -> &TriTable {
        &self.weights
    }

    pub fn s_lower(&self, i: usize, j: usize) -> f64 {
        self.weights.get(i, j) / (self.k as f64 + 1.0)
    }

    pub fn a_lower(&self, i: usize, j: usize) -> f64 {
        self.weights.get(i, j) / (self.k as f64 - 1.0)
    }

    pub fn num_s(&self) -> usize {
        self.dim() * (self.dim() + 1) / 2
    }

    pub fn num_a(&self) -> usize {
        self.dim() * self.dim().saturating_sub(1) / 2
    }

    /// Constant part of the dual objective, `(K·2^{S½} − 1)/(K² − 1)`.
    pub fn dual_constant(&self) -> f64 {
        lower_bound_value(&self.lambda, self.k)
    }

    pub fn primal_objective(&self, s: &TriTable, a: &TriTable) -> f64 {
        s.sum() + a.sum()
    }

    pub fn dual_objective(&self, mu: &TriTable, t: &TriTable) -> f64 {
        let k = self.k as f64;
        let mut acc = self.dual_constant();
        for ((i, j), m) in mu.iter() {
            acc -= m * self.weights.get(i, j) / (k + 1.0);
        }
        for ((i, j), tv) in t.iter() {
            acc -= tv * self.weights.get(i, j) / (k - 1.0);
        }
        acc
    }

    /// The program as a generic LMI problem. Variables are all `s` entries
    /// followed by all `a` entries; rows are the `s` bounds, the `a` bounds and
    /// the pair conditions `s_ij + a_ij ≥ 0`.
    pub fn to_conic(&self) -> ConicProblem {
        let d = self.dim();
        let ns = self.num_s();
        let na = self.num_a();
        let mut rows = Vec::with_capacity(ns + 2 * na);
        let mut terms = Vec::with_capacity(ns + na);
        for i in 0..d {
            for j in 0..=i {
                let k = self.weights.index(i, j);
                rows.push(LinearRow {
                    coeffs: vec![(k, 1.0)],
                    rhs: self.s_lower(i, j),
                });
                let mut f = SparseSym::new();
                if i == j {
                    f.add_sym(i, i, 1.0);
                } else {
                    f.add_sym(i, j, 0.5);
                }
                terms.push((k, f));
            }
        }
        let strict = TriTable::zeros(d, true);
        for i in 1..d {
            for j in 0..i {
                let k = ns + strict.index(i, j);
                rows.push(LinearRow {
                    coeffs: vec![(k, 1.0)],
                    rhs: self.a_lower(i, j),
                });
                let mut f = SparseSym::new();
                f.add_sym(i, j, -0.5);
                terms.push((k, f));
            }
        }
        for i in 1..d {
            for j in 0..i {
                rows.push(LinearRow {
                    coeffs: vec![
                        (self.weights.index(i, j), 1.0),
                        (ns + strict.index(i, j), 1.0),
                    ],
                    rhs: 0.0,
                });
            }
        }
        ConicProblem {
            objective: vec![1.0; ns + na],
            rows,
            blocks: vec![PsdBlock {
                n: d,
                constant: DMatrix::zeros(d, d),
                terms,
            }],
        }
    }
}

/// Builds the reduced program. `λ` must have no zero components.
pub fn build_reduced(lambda: &SchmidtVector, k: usize) -> Result<ReducedSdp> {
    if k < 2 {
        return Err(Error::Domain(format!("K must be at least 2, got {k}")));
    }
    if lambda.has_zeros() {
        return Err(Error::Domain(
            "target has zero Schmidt coefficients; strip them before building the program".into(),
        ));
    }
    let c = lambda.coeffs();
    let weights = TriTable::from_fn(c.len(), false, |i, j| (c[i] * c[j]).sqrt());
    Ok(ReducedSdp {
        k,
        lambda: lambda.clone(),
        weights,
    })
}

/// Primal and dual points of the reduced program with their objectives.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SdpCertificate {
    #[serde(rename = "K")]
    pub k: usize,
    pub lambda: Vec<f64>,
    #[serde(rename = "T")]
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub s: TriTable,
    pub a: TriTable,
    pub mu: TriTable,
    pub t: TriTable,
}

impl SdpCertificate {
    pub fn value(&self) -> f64 {
        self.primal_value
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub solver: SolverOptions,
    pub max_dim: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            solver: SolverOptions::default(),
            max_dim: REDUCED_GUARD_DIM,
        }
    }
}

pub fn solve(reduced: &ReducedSdp) -> Result<SdpCertificate> {
    solve_with(reduced, &SdpOptions::default())
}

/// Runs the interior-point method from the strictly feasible primal point
/// `s_ij = a_ij = 2`. A certificate is returned for every status; only
/// `Optimal` carries the gap guarantee.
pub fn solve_with(reduced: &ReducedSdp, opts: &SdpOptions) -> Result<SdpCertificate> {
    let d = reduced.dim();
    if d > opts.max_dim {
        return Err(Error::DimensionGuard {
            what: "reduced SDP",
            dim: d,
            limit: opts.max_dim,
        });
    }
    let problem = reduced.to_conic();
    let start = vec![2.0; problem.num_vars()];
    let sol = problem.solve(&start, &opts.solver);

    let ns = reduced.num_s();
    let na = reduced.num_a();
    let s = TriTable::from_vec(d, false, sol.y[..ns].to_vec())?;
    let a = TriTable::from_vec(d, true, sol.y[ns..].to_vec())?;
    let mu = TriTable::from_vec(d, false, sol.x[..ns].iter().map(|x| 1.0 - x).collect())?;
    let t = TriTable::from_vec(
        d,
        true,
        sol.x[ns..ns + na].iter().map(|x| 1.0 - x).collect(),
    )?;

    let primal_value = reduced.primal_objective(&s, &a);
    let dual_value = reduced.dual_objective(&mu, &t);
    Ok(SdpCertificate {
        k: reduced.k,
        lambda: reduced.lambda.coeffs().to_vec(),
        primal_value,
        dual_value,
        gap: primal_value - dual_value,
        status: sol.status,
        iterations: sol.iterations,
        s,
        a,
        mu,
        t,
    })
}

/// The `d × d` block `M` with `M_ii = s_ii`, `M_ij = (s_ij − a_ij)/2`.
/// The same map sends a dual point `(μ, t)` to its block `N`.
pub fn diagonal_block(s: &TriTable, a: &TriTable) -> DMatrix<f64> {
    let d = s.dim();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = s.get(i, i);
        for j in 0..i {
            let v = 0.5 * (s.get(i, j) - a.get(i, j));
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Spectrum of the full operator predicted by the block structure: each
/// `(s_ij + a_ij)/2` twice, plus the eigenvalues of `M`. Sorted.
pub fn reduced_spectrum(s: &TriTable, a: &TriTable) -> Vec<f64> {
    let mut ev = eigenvalues(&diagonal_block(s, a));
    for ((i, j), av) in a.iter() {
        let v = 0.5 * (s.get(i, j) + av);
        ev.push(v);
        ev.push(v);
    }
    ev.sort_by(f64::total_cmp);
    ev
}

/// Partial transpose on the second factor: `|ij⟩⟨kl| ↦ |il⟩⟨kj|`, applied
/// as an index permutation.
pub fn partial_transpose(m: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    let n = d * d;
    assert_eq!(m.nrows(), n);
    let mut out = DMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    out[(i * d + l, k * d + j)] = m[(i * d + j, k * d + l)];
                }
            }
        }
    }
    out
}

/// The explicit `d² × d²` operator `Σ s_ij σ_ijᴳ + Σ a_ij α_ijᴳ`.
pub fn full_operator(s: &TriTable, a: &TriTable) -> DMatrix<f64> {
    let d = s.dim();
    let n = d * d;
    let idx = |i: usize, j: usize| i * d + j;
    let mut op = DMatrix::zeros(n, n);
    for ((i, j), sv) in s.iter() {
        let mut sigma = DMatrix::zeros(n, n);
        if i == j {
            sigma[(idx(i, i), idx(i, i))] = 1.0;
        } else {
            // (|ij⟩ + |ji⟩)(⟨ij| + ⟨ji|)/2
            for p in [idx(i, j), idx(j, i)] {
                for q in [idx(i, j), idx(j, i)] {
                    sigma[(p, q)] = 0.5;
                }
            }
        }
        op += partial_transpose(&sigma, d) * sv;
    }
    for ((i, j), av) in a.iter() {
        let mut alpha = DMatrix::zeros(n, n);
        let (p, q) = (idx(i, j), idx(j, i));
        alpha[(p, p)] = 0.5;
        alpha[(q, q)] = 0.5;
        alpha[(p, q)] = -0.5;
        alpha[(q, p)] = -0.5;
        op += partial_transpose(&alpha, d) * av;
    }
    op
}

/// Constraint diagnostics for a primal point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrimalCheck {
    pub min_bound_slack: f64,
    pub min_pair: f64,
    pub min_block_eigenvalue: f64,
}

impl PrimalCheck {
    pub fn feasible(&self, tol: f64) -> bool {
        self.min_bound_slack >= -tol && self.min_pair >= -tol && self.min_block_eigenvalue >= -tol
    }
}

pub fn check_primal(reduced: &ReducedSdp, s: &TriTable, a: &TriTable) -> PrimalCheck {
    let mut min_bound_slack = f64::INFINITY;
    for ((i, j), v) in s.iter() {
        min_bound_slack = min_bound_slack.min(v - reduced.s_lower(i, j));
    }
    let mut min_pair = f64::INFINITY;
    for ((i, j), v) in a.iter() {
        min_bound_slack = min_bound_slack.min(v - reduced.a_lower(i, j));
        min_pair = min_pair.min(0.5 * (s.get(i, j) + v));
    }
    PrimalCheck {
        min_bound_slack,
        min_pair,
        min_block_eigenvalue: min_eigenvalue(&diagonal_block(s, a)),
    }
}

/// Constraint diagnostics for a dual point: `μ ≤ 1`, `t ≤ 1` and
/// positivity of `Σ μ_ij σ_ijᴳ + Σ t_ij α_ijᴳ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualCheck {
    pub max_mu: f64,
    pub max_t: f64,
    pub min_pair: f64,
    pub min_block_eigenvalue: f64,
}

impl DualCheck {
    pub fn feasible(&self, tol: f64) -> bool {
        self.max_mu <= 1.0 + tol
            && self.max_t <= 1.0 + tol
            && self.min_pair >= -tol
            && self.min_block_eigenvalue >= -tol
    }
}

pub fn check_dual(mu: &TriTable, t: &TriTable) -> DualCheck {
    let max_mu = mu
        .values()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let max_t = t.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_pair = t
        .iter()
        .map(|((i, j), tv)| 0.5 * (mu.get(i, j) + tv))
        .fold(f64::INFINITY, f64::min);
    DualCheck {
        max_mu,
        max_t,
        min_pair,
        min_block_eigenvalue: min_eigenvalue(&diagonal_block(mu, t)),
    }
}

/// `(K·2^{S½} − 1)/(K² − 1)`: the dual objective at `μ = t = 0`.
pub fn lower_bound_value(lambda: &SchmidtVector, k: usize) -> f64 {
    let k = k as f64;
    (k * lambda.s_half_pow() - 1.0) / (k * k - 1.0)
}

/// Explicit primal-feasible point with off-diagonal `s_ij`, `a_ij` on their
/// lower bounds and the diagonal chosen to make `M ⪰ 0` as cheaply as
/// possible.
///
/// With `e_i = (K² − 1) s_ii + λ_i` the block is `(Diag(e) − √λ√λᵀ)/(K² − 1)`,
/// which is PSD iff `Σ λ_i/e_i ≤ 1`; the bounds on `s_ii` read `e_i ≥ Kλ_i`.
/// Minimizing `Σ e_i` under these constraints is a water-filling problem:
/// the largest coefficients sit on `e_i = Kλ_i` and the rest share
/// `e_i = τ√λ_i`. When `K√λ_max ≤ Σ√λ_i` nothing is clamped and the
/// objective is `(2^{S½} − 1)/(K − 1)`.
#[derive(Clone, Debug)]
pub struct UpperPoint {
    pub s: TriTable,
    pub a: TriTable,
    pub value: f64,
    /// How many of the largest coefficients sit on their clamp.
    pub clamped: usize,
}

pub fn upper_point(lambda: &SchmidtVector, k: usize) -> Result<UpperPoint> {
    let reduced = build_reduced(lambda, k)?;
    let c = lambda.coeffs();
    let d = c.len();
    let kf = k as f64;
    let roots: Vec<f64> = c.iter().map(|x| x.sqrt()).collect();

    // (objective Σ λ_i v_i with v_i = e_i/λ_i, clamped count)
    let mut best: Option<(f64, usize, f64)> = None;
    for m in 0..=d {
        let free = d - m;
        let tau = if free == 0 {
            if d > k {
                continue;
            }
            0.0
        } else {
            if m >= k {
                continue;
            }
            let share = 1.0 - m as f64 / kf;
            let tau = roots[..free].iter().sum::<f64>() / share;
            if tau < kf * roots[free - 1] * (1.0 - 1e-14) {
                continue;
            }
            tau
        };
        let objective: f64 =
            roots[..free].iter().map(|r| r * tau).sum::<f64>() + kf * c[free..].iter().sum::<f64>();
        if best.is_none_or(|(o, _, _)| objective < o) {
            best = Some((objective, m, tau));
        }
    }
    let (_, clamped, tau) = best.expect("the water-filling point always exists");
    let free = d - clamped;
    let e: Vec<f64> = (0..d)
        .map(|i| if i < free { roots[i] * tau } else { kf * c[i] })
        .collect();

    let denom = kf * kf - 1.0;
    let s = TriTable::from_fn(d, false, |i, j| {
        if i == j {
            ((e[i] - c[i]) / denom).max(reduced.s_lower(i, i))
        } else {
            reduced.s_lower(i, j)
        }
    });
    let a = TriTable::from_fn(d, true, |i, j| reduced.a_lower(i, j));
    let value = reduced.primal_objective(&s, &a);
    Ok(UpperPoint {
        s,
        a,
        value,
        clamped,
    })
}

/// Closed-form sandwich for `T(K; λ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// `lower` is the dual objective at `μ = t = 0`; `upper` is the objective at
/// [`upper_point`], equal to `(2^{S½} − 1)/(K − 1)` whenever
/// `K√λ_max ≤ Σ√λ_i`.
pub fn bounds(lambda: &SchmidtVector, k: usize) -> Result<Bounds> {
    let point = upper_point(lambda, k)?;
    Ok(Bounds {
        lower: lower_bound_value(lambda, k),
        upper: point.value,
    })
}

/// Guard for [`solve_full_oracle`], read from `PPT_FORGE_GUARD_DIM`.
pub fn oracle_guard_dim() -> usize {
    std::env::var("PPT_FORGE_GUARD_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(ORACLE_GUARD_DIM)
}

/// Solves the unreduced program
/// `min Tr P  s.t.  P ⪰ 0,  −(K−1)Pᴳ ⪯ ρ_λᴳ ⪯ (K+1)Pᴳ`
/// over real symmetric `P` on `ℂ^d ⊗ ℂ^d`. Independent of the block
/// reduction; used to check it.
pub fn solve_full_oracle(lambda: &SchmidtVector, k: usize) -> Result<f64> {
    solve_full_oracle_with(lambda, k, oracle_guard_dim())
}

pub fn solve_full_oracle_with(lambda: &SchmidtVector, k: usize, guard: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("K must be at least 2, got {k}")));
    }
    let d = lambda.len();
    if d > guard {
        return Err(Error::DimensionGuard {
            what: "unreduced oracle",
            dim: d,
            limit: guard,
        });
    }
    let n = d * d;
    let c = lambda.coeffs();
    let mut rho = DMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            rho[(i * d + i, j * d + j)] = (c[i] * c[j]).sqrt();
        }
    }
    let rho_pt = partial_transpose(&rho, d);
    let pt_index = |r: usize, col: usize| {
        let (i, j) = (r / d, r % d);
        let (kk, l) = (col / d, col % d);
        (i * d + l, kk * d + j)
    };

    let kf = k as f64;
    let mut objective = Vec::new();
    let mut t_plain = Vec::new();
    let mut t_plus = Vec::new();
    let mut t_minus = Vec::new();
    let mut start = Vec::new();
    for p in 0..n {
        for q in p..n {
            let var = objective.len();
            objective.push(if p == q { 1.0 } else { 0.0 });
            start.push(if p == q { 1.0 } else { 0.0 });
            let mut plain = SparseSym::new();
            plain.add_sym(p, q, 1.0);
            // Γ commutes with transposition, so Γ(E_pq + E_qp) = Γ(E_pq) + Γ(E_pq)ᵀ.
            let mut pt = SparseSym::new();
            let (a, b) = pt_index(p, q);
            let weight = if p != q && a == b { 2.0 } else { 1.0 };
            pt.add_sym(a, b, weight);
            t_plain.push((var, plain));
            t_plus.push((var, pt.scaled(kf + 1.0)));
            t_minus.push((var, pt.scaled(kf - 1.0)));
        }
    }
    let problem = ConicProblem {
        objective,
        rows: vec![],
        blocks: vec![
            PsdBlock {
                n,
                constant: DMatrix::zeros(n, n),
                terms: t_plain,
            },
            PsdBlock {
                n,
                constant: rho_pt.clone(),
                terms: t_plus,
            },
            PsdBlock {
                n,
                constant: -rho_pt,
                terms: t_minus,
            },
        ],
    };
    let sol = problem.solve(&start, &SolverOptions::default());
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Solver(format!(
            "unreduced oracle stopped with status {:?} (gap {:e})",
            sol.status,
            sol.relative_gap()
        )));
    }
    Ok(sol.primal_value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> SchmidtVector {
        s.parse().unwrap()
    }

    #[test]
    fn tri_table_layout() {
        let t = TriTable::from_fn(3, false, |i, j| (10 * (i + 1) + j + 1) as f64);
        assert_eq!(t.values(), &[11.0, 21.0, 22.0, 31.0, 32.0, 33.0]);
        let t = TriTable::from_fn(3, true, |i, j| (10 * (i + 1) + j + 1) as f64);
        assert_eq!(t.values(), &[21.0, 31.0, 32.0]);
        assert!(TriTable::from_vec(3, true, vec![1.0]).is_err());
    }

    #[test]
    fn build_reduced_uniform_two() {
        let r = build_reduced(&SchmidtVector::uniform(2).unwrap(), 2).unwrap();
        for (_, w) in r.weights().iter() {
            assert!((w - 0.5).abs() < 1e-15);
        }
        assert!((r.s_lower(1, 0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((r.s_lower(0, 0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((r.a_lower(1, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn build_reduced_counts() {
        let r = build_reduced(&v("1/20,1/20,1/20,4/20,4/20,9/20"), 6).unwrap();
        assert_eq!(r.num_s(), 21);
        assert_eq!(r.num_a(), 15);
        assert_eq!(r.dim(), 6);
    }

    #[test]
    fn build_reduced_errors() {
        let u = SchmidtVector::uniform(2).unwrap();
        assert!(matches!(build_reduced(&u, 1), Err(Error::Domain(_))));
        assert!(matches!(
            build_reduced(&v("0,0.5,0.5"), 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rank_one_target_is_single_variable() {
        // brute force: minimize s11 subject to s11 ≥ 1/(K+1)
        for k in 2..6 {
            let r = build_reduced(&v("1"), k).unwrap();
            let cert = solve(&r).unwrap();
            assert!(cert.is_optimal());
            assert!((cert.value() - 1.0 / (k as f64 + 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn uniform_target_value_one() {
        for k in 2..=6 {
            let u = SchmidtVector::uniform(k).unwrap();
            let cert = solve(&build_reduced(&u, k).unwrap()).unwrap();
            assert!(cert.is_optimal(), "{:?}", cert.status);
            assert!((cert.value() - 1.0).abs() < 1e-7);
            let b = bounds(&u, k).unwrap();
            assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_three_values() {
        let l = v("0.05,0.05,0.9");
        let cert = solve(&build_reduced(&l, 2).unwrap()).unwrap();
        let closed = (1.0 + 4.0 * (0.045f64.sqrt() * 2.0) + 8.0 * 0.05) / 3.0;
        assert!((closed - 1.032_352_09).abs() < 1e-7);
        assert!((cert.value() - closed).abs() < 1e-7);
        assert!(cert.gap.abs() < 1e-7);

        let l = v("0.2,0.3,0.5");
        let cert = solve(&build_reduced(&l, 2).unwrap()).unwrap();
        let closed = 2.0 * (0.06f64.sqrt() + 0.10f64.sqrt() + 0.15f64.sqrt());
        assert!((closed - 1.89695).abs() < 1e-5);
        assert!((cert.value() - closed).abs() < 1e-7);
    }

    #[test]
    fn certificates_are_feasible() {
        let l = v("0.1,0.15,0.2,0.25,0.3");
        let r = build_reduced(&l, 3).unwrap();
        let cert = solve(&r).unwrap();
        assert!(check_primal(&r, &cert.s, &cert.a).feasible(FEASIBILITY_TOL));
        assert!(check_dual(&cert.mu, &cert.t).feasible(FEASIBILITY_TOL));
        assert!(cert.dual_value <= cert.primal_value + 1e-9);
    }

    #[test]
    fn bounds_example_one() {
        let b = bounds(&v("1/20,1/20,1/20,4/20,4/20,9/20"), 6).unwrap();
        assert!((b.lower - 29.0 / 35.0).abs() < 1e-12);
        assert!(b.lower <= b.upper + 1e-12);
    }

    #[test]
    fn upper_formula_matches_when_unclamped() {
        // K√λ_max ≤ Σ√λ: the water-filling point has no clamped coefficients
        let l = v("0.2,0.3,0.5");
        let p = upper_point(&l, 2).unwrap();
        assert_eq!(p.clamped, 0);
        assert!((p.value - (l.s_half_pow() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn upper_point_for_peaked_target() {
        // (2^{S½} − 1)/(K − 1) = 0.94853 lies below T here; the feasible point
        // clamps the largest coefficient and lands on the rank-three value.
        let l = v("0.05,0.05,0.9");
        let p = upper_point(&l, 2).unwrap();
        assert_eq!(p.clamped, 1);
        let r = build_reduced(&l, 2).unwrap();
        assert!(check_primal(&r, &p.s, &p.a).feasible(1e-12));
        assert!((p.value - 1.032_352_09).abs() < 1e-7);
        let b = bounds(&l, 2).unwrap();
        assert!((b.lower - 0.965_685).abs() < 1e-6);
        assert!(b.lower <= b.upper + 1e-12);
        assert!(l.s_half_pow() - 1.0 < b.lower);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let d = 3;
        let m = DMatrix::from_fn(9, 9, |r, c| (r * 9 + c) as f64);
        assert_eq!(partial_transpose(&partial_transpose(&m, d), d), m);
        // |01⟩⟨10|ᴳ = |00⟩⟨11|
        let mut e = DMatrix::zeros(9, 9);
        e[(1, 3)] = 1.0;
        let g = partial_transpose(&e, d);
        assert_eq!(g[(0, 4)], 1.0);
        assert_eq!(g.sum(), 1.0);
    }

    #[test]
    fn oracle_small_cases() {
        let u = SchmidtVector::uniform(2).unwrap();
        let full = solve_full_oracle(&u, 2).unwrap();
        assert!((full - 1.0).abs() < 1e-6);
        let one = solve_full_oracle(&v("1"), 3).unwrap();
        assert!((one - 0.25).abs() < 1e-6);
    }

    #[test]
    fn oracle_guard() {
        let l = SchmidtVector::uniform(7).unwrap();
        assert!(matches!(
            solve_full_oracle_with(&l, 2, 6),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn reduced_guard() {
        let l = SchmidtVector::uniform(5).unwrap();
        let opts = SdpOptions {
            max_dim: 4,
            ..Default::default()
        };
        assert!(matches!(
            solve_with(&build_reduced(&l, 2).unwrap(), &opts),
            Err(Error::DimensionGuard { .. })
        ));
    }
}
