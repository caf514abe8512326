//! Schmidt coefficient vectors and the scalar functionals built on them:
//! Rényi entropies, the `f_t` family used by the LOCC catalysis conditions,
//! majorization and tensor products.
//!
//! All logarithms are base two.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs are accepted when their sum is within this distance of one.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Components at or below this value are exact zeros.
pub const ZERO_THRESHOLD: f64 = 1e-15;
/// Slack on prefix-sum comparisons, resolved in favour of `≤`.
pub const MAJORIZATION_TOL: f64 = 1e-12;
/// Per-component slack when testing whether a vector is `U_K`.
pub const UNIFORM_TOL: f64 = 1e-12;

/// A normalized Schmidt coefficient vector, stored in non-decreasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SchmidtVector {
    coeffs: Vec<f64>,
}

impl SchmidtVector {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidVector("vector is empty".into()));
        }
        for (i, &c) in coeffs.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidVector(format!(
                    "component {} is not finite",
                    i + 1
                )));
            }
            if c < 0.0 {
                return Err(Error::InvalidVector(format!(
                    "component {} is negative ({c})",
                    i + 1
                )));
            }
        }
        let sum: f64 = coeffs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidVector(format!(
                "components sum to {sum}, expected 1 within {NORMALIZATION_TOL:e}"
            )));
        }
        for c in coeffs.iter_mut() {
            if *c <= ZERO_THRESHOLD {
                *c = 0.0;
            }
        }
        let sum: f64 = coeffs.iter().sum();
        for c in coeffs.iter_mut() {
            *c /= sum;
        }
        coeffs.sort_by(f64::total_cmp);
        Ok(SchmidtVector { coeffs })
    }

    /// The uniform vector `U_k`, Schmidt coefficients of a rank-`k` maximally
    /// entangled state.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("uniform vector needs rank at least 1".into()));
        }
        Ok(SchmidtVector {
            coeffs: vec![1.0 / k as f64; k],
        })
    }

    /// Coefficients in non-decreasing order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficients in non-increasing order.
    pub fn descending(&self) -> Vec<f64> {
        self.coeffs.iter().rev().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Schmidt rank: the number of non-zero components.
    pub fn rank(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c > 0.0).count()
    }

    pub fn has_zeros(&self) -> bool {
        self.rank() < self.len()
    }

    pub fn max(&self) -> f64 {
        *self.coeffs.last().expect("non-empty")
    }

    /// The same vector with zero components removed.
    pub fn strip_zeros(&self) -> SchmidtVector {
        SchmidtVector {
            coeffs: self.coeffs.iter().copied().filter(|&c| c > 0.0).collect(),
        }
    }

    /// True when the non-zero part equals `U_k` component-wise within
    /// [`UNIFORM_TOL`].
    pub fn is_uniform(&self, k: usize) -> bool {
        let target = 1.0 / k as f64;
        self.rank() == k
            && self
                .coeffs
                .iter()
                .filter(|&&c| c > 0.0)
                .all(|&c| (c - target).abs() <= UNIFORM_TOL)
    }

    /// Same multiset of coefficients after zero padding.
    pub fn same_spectrum(&self, other: &SchmidtVector) -> bool {
        let a = self.strip_zeros();
        let b = other.strip_zeros();
        a.len() == b.len()
            && a.coeffs
                .iter()
                .zip(&b.coeffs)
                .all(|(x, y)| (x - y).abs() <= UNIFORM_TOL)
    }

    pub fn sqrt_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.sqrt()).sum()
    }

    /// `2^{S_{1/2}} = (Σ √λ_i)²`.
    pub fn s_half_pow(&self) -> f64 {
        let s = self.sqrt_sum();
        s * s
    }
}

impl TryFrom<Vec<f64>> for SchmidtVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        SchmidtVector::new(v)
    }
}

impl From<SchmidtVector> for Vec<f64> {
    fn from(v: SchmidtVector) -> Self {
        v.coeffs
    }
}

impl FromStr for SchmidtVector {
    type Err = Error;

    /// Parses comma separated decimals or fractions `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|tok| parse_number(tok.trim()))
            .collect::<Result<Vec<_>>>()?;
        SchmidtVector::new(coeffs)
    }
}

impl fmt::Display for SchmidtVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses a decimal or an exact fraction `p/q` with integer `p` and `q`.
pub fn parse_number(tok: &str) -> Result<f64> {
    if tok.is_empty() {
        return Err(Error::InvalidVector("empty component".into()));
    }
    if let Some((num, den)) = tok.split_once('/') {
        let p: i64 = num
            .trim()
            .parse()
            .map_err(|_| Error::InvalidVector(format!("bad numerator in `{tok}`")))?;
        let q: i64 = den
            .trim()
            .parse()
            .map_err(|_| Error::InvalidVector(format!("bad denominator in `{tok}`")))?;
        if q == 0 {
            return Err(Error::InvalidVector(format!("zero denominator in `{tok}`")));
        }
        return Ok(p as f64 / q as f64);
    }
    tok.parse::<f64>()
        .map_err(|_| Error::InvalidVector(format!("cannot parse `{tok}` as a number")))
}

/// Order parameter of a Rényi entropy, including the symbolic endpoint `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Finite(f64),
    Infinity,
}

impl Order {
    pub const HALF: Order = Order::Finite(0.5);

    pub fn value(self) -> f64 {
        match self {
            Order::Finite(t) => t,
            Order::Infinity => f64::INFINITY,
        }
    }
}

impl From<f64> for Order {
    fn from(t: f64) -> Self {
        if t == f64::INFINITY {
            Order::Infinity
        } else {
            Order::Finite(t)
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "+inf" => Ok(Order::Infinity),
            other => parse_number(other)
                .map(Order::from)
                .map_err(|_| Error::Domain(format!("cannot parse order `{s}`"))),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(t) => write!(f, "{t}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Finite(t) => s.serialize_f64(*t),
            Order::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Rényi entropy `S_t(λ)` in bits. `t = 0`, `t = 1` and `t = ∞` select their
/// own branches rather than limits of the power-sum formula.
pub fn renyi_entropy(lambda: &SchmidtVector, t: impl Into<Order>) -> Result<f64> {
    match t.into() {
        Order::Infinity => Ok(-lambda.max().log2()),
        Order::Finite(t) if t.is_nan() || t < 0.0 => Err(Error::Domain(format!(
            "Rényi order must lie in [0, ∞], got {t}"
        ))),
        Order::Finite(0.0) => Ok((lambda.rank() as f64).log2()),
        Order::Finite(1.0) => Ok(shannon(lambda)),
        Order::Finite(t) => {
            let power_sum: f64 = lambda
                .coeffs()
                .iter()
                .filter(|&&c| c > 0.0)
                .map(|c| c.powf(t))
                .sum();
            Ok(power_sum.log2() / (1.0 - t))
        }
    }
}

fn shannon(lambda: &SchmidtVector) -> f64 {
    -lambda
        .coeffs()
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| c * c.log2())
        .sum::<f64>()
}

/// `S_{1/2}(λ) = 2 log Σ √λ_i`.
pub fn s_half(lambda: &SchmidtVector) -> f64 {
    2.0 * lambda.sqrt_sum().log2()
}

/// The `f_t` functional of the LOCC catalysis conditions. Any zero component
/// sends it to `-∞`; `t = 0` is the log-product branch and `t = 1` takes the
/// continuous limit `-H(λ)`.
pub fn f_value(lambda: &SchmidtVector, t: f64) -> f64 {
    if lambda.has_zeros() || t.is_nan() {
        return f64::NEG_INFINITY;
    }
    if t == 0.0 {
        return lambda.coeffs().iter().map(|c| c.log2()).sum();
    }
    if t == 1.0 {
        return -shannon(lambda);
    }
    let power_sum: f64 = lambda.coeffs().iter().map(|c| c.powf(t)).sum();
    power_sum.log2() / (t - 1.0)
}

/// `λ ≺ μ`: every prefix sum of `λ↓` is at most the matching prefix sum of
/// `μ↓`, after padding with zeros. Equivalent to `ρ_λ → ρ_μ` under LOCC.
pub fn majorizes(lambda: &SchmidtVector, mu: &SchmidtVector) -> bool {
    let n = lambda.len().max(mu.len());
    let mut a = lambda.descending();
    let mut b = mu.descending();
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    let mut pa = 0.0;
    let mut pb = 0.0;
    for (x, y) in a.iter().zip(&b) {
        pa += x;
        pb += y;
        if pa > pb + MAJORIZATION_TOL {
            return false;
        }
    }
    true
}

/// Closed-form PPT entanglement measures of a pure state, in bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptMonotones {
    pub e_c: f64,
    pub e_d: f64,
    pub e_xd: f64,
    pub e_xc: f64,
}

pub fn ppt_monotone_report(lambda: &SchmidtVector) -> PptMonotones {
    let s1 = shannon(lambda);
    PptMonotones {
        e_c: s1,
        e_d: s1,
        e_xd: -lambda.max().log2(),
        e_xc: s_half(lambda),
    }
}

/// Tensor product: all pairwise products, re-sorted.
pub fn tensor(lambda: &SchmidtVector, xi: &SchmidtVector) -> SchmidtVector {
    let mut coeffs = Vec::with_capacity(lambda.len() * xi.len());
    for &a in lambda.coeffs() {
        for &b in xi.coeffs() {
            coeffs.push(a * b);
        }
    }
    coeffs.sort_by(f64::total_cmp);
    SchmidtVector { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> SchmidtVector {
        s.parse().unwrap()
    }

    fn example_one() -> SchmidtVector {
        v("1/20,1/20,1/20,4/20,4/20,9/20")
    }

    #[test]
    fn construction_sorts_and_normalizes() {
        let l = SchmidtVector::new(vec![0.5, 0.2, 0.3 + 5e-10]).unwrap();
        assert_eq!(l.coeffs().len(), 3);
        assert!(l.coeffs().windows(2).all(|w| w[0] <= w[1]));
        assert!((l.coeffs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(SchmidtVector::new(vec![]).is_err());
        assert!(SchmidtVector::new(vec![0.5, 0.6]).is_err());
        assert!(SchmidtVector::new(vec![1.2, -0.2]).is_err());
        assert!(SchmidtVector::new(vec![f64::NAN, 1.0]).is_err());
        assert!("0.5,abc".parse::<SchmidtVector>().is_err());
        assert!("1/0,1".parse::<SchmidtVector>().is_err());
    }

    #[test]
    fn zero_threshold_sets_rank() {
        let l = SchmidtVector::new(vec![1e-16, 0.5, 0.5 - 1e-16]).unwrap();
        assert_eq!(l.rank(), 2);
        assert_eq!(l.coeffs()[0], 0.0);
        let l = SchmidtVector::new(vec![1e-14, 0.5, 0.5 - 1e-14]).unwrap();
        assert_eq!(l.rank(), 3);
    }

    #[test]
    fn renyi_examples() {
        let l = example_one();
        let half = renyi_entropy(&l, 0.5).unwrap();
        assert!((half - 5f64.log2()).abs() < 1e-12);
        assert!((half - 2.321_928_1).abs() < 1e-7);
        assert_eq!(renyi_entropy(&l, 0.0).unwrap(), 6f64.log2());

        let p = v("0.9,0.1");
        let inf = renyi_entropy(&p, Order::Infinity).unwrap();
        assert!((inf - 0.152_003).abs() < 1e-6);

        let u = SchmidtVector::uniform(7).unwrap();
        for t in [0.0, 0.3, 0.5, 1.0, 2.0, 7.5] {
            assert!((renyi_entropy(&u, t).unwrap() - 7f64.log2()).abs() < 1e-12);
        }
        assert!((renyi_entropy(&u, Order::Infinity).unwrap() - 7f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn renyi_rejects_negative_order() {
        let l = example_one();
        assert!(matches!(renyi_entropy(&l, -0.5), Err(Error::Domain(_))));
        assert!(renyi_entropy(&l, f64::NAN).is_err());
    }

    #[test]
    fn renyi_ignores_zero_components() {
        let l = v("0,0.25,0.75");
        let m = v("0.25,0.75");
        for t in [0.0, 0.5, 1.0, 3.0] {
            assert!((renyi_entropy(&l, t).unwrap() - renyi_entropy(&m, t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn f_value_branches() {
        let with_zero = v("0,0.5,0.5");
        assert_eq!(f_value(&with_zero, 0.0), f64::NEG_INFINITY);
        assert_eq!(f_value(&with_zero, -2.0), f64::NEG_INFINITY);
        let u2 = SchmidtVector::uniform(2).unwrap();
        assert!((f_value(&u2, 0.0) + 2.0).abs() < 1e-15);
        assert!((f_value(&u2, -1.0) + 1.0).abs() < 1e-15);
        // continuity through t = 1
        let l = v("0.2,0.3,0.5");
        let near = f_value(&l, 1.0 + 1e-7);
        assert!((near - f_value(&l, 1.0)).abs() < 1e-5);
    }

    #[test]
    fn majorization_examples() {
        let a = v("1/2,1/2");
        let b = v("3/4,1/4");
        assert!(majorizes(&a, &b));
        assert!(majorizes(&a, &a));
        assert!(!majorizes(&a, &v("0.9,0.05,0.05")));
        assert!(!majorizes(&b, &a));
    }

    #[test]
    fn monotone_report_examples() {
        let r = ppt_monotone_report(&example_one());
        assert!((r.e_xc - 5f64.log2()).abs() < 1e-12);
        let r = ppt_monotone_report(&v("0.9,0.1"));
        assert!((r.e_xd - 0.152_003).abs() < 1e-6);
        assert!((r.e_c - 0.468_996).abs() < 1e-6);
        assert_eq!(r.e_c, r.e_d);
        let r = ppt_monotone_report(&SchmidtVector::uniform(4).unwrap());
        for x in [r.e_c, r.e_d, r.e_xd, r.e_xc] {
            assert!((x - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_examples() {
        let l = v("0.05,0.05,0.9");
        let u1 = SchmidtVector::uniform(1).unwrap();
        assert_eq!(tensor(&l, &u1), l);
        let t = tensor(&l, &SchmidtVector::uniform(2).unwrap());
        let expected = [0.025, 0.025, 0.025, 0.025, 0.45, 0.45];
        for (a, b) in t.coeffs().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let uu = tensor(
            &SchmidtVector::uniform(3).unwrap(),
            &SchmidtVector::uniform(4).unwrap(),
        );
        assert!(uu.is_uniform(12));
    }

    #[test]
    fn order_parsing() {
        assert_eq!("inf".parse::<Order>().unwrap(), Order::Infinity);
        assert_eq!("1/2".parse::<Order>().unwrap(), Order::HALF);
        assert_eq!("2".parse::<Order>().unwrap(), Order::Finite(2.0));
        assert!("x".parse::<Order>().is_err());
    }
}
