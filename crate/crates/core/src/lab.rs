//! Experiment harness: `T` against `T₁` on random targets, and the rank-3
//! reachability map from one EPR pair.

use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::t1_value;
use crate::conic::SolveStatus;
use crate::error::{Error, Result};
use crate::ppt_sdp::{build_reduced, solve};
use crate::spectra::SchmidtVector;

/// Gaps above this are reported as findings.
pub const FINDING_GAP: f64 = 1e-5;
/// `T₁` may exceed `T` by at most this before it counts as a violation.
pub const LOWER_BOUND_SLACK: f64 = 1e-7;

/// Uniform sample from the probability simplex via normalized exponential
/// spacings.
pub fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, d: usize) -> SchmidtVector {
    let e: Vec<f64> = (0..d)
        .map(|_| rng.sample::<f64, _>(Exp1).max(1e-300))
        .collect();
    let total: f64 = e.iter().sum();
    SchmidtVector::new(e.into_iter().map(|x| x / total).collect())
        .expect("normalized exponentials form a valid vector")
}

/// Generator for instance `index` of a run seeded with `seed`; independent of
/// scheduling.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub n: usize,
    pub d_range: RangeInclusive<usize>,
    pub k_range: RangeInclusive<usize>,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n: 500,
            d_range: 3..=6,
            k_range: 2..=6,
            seed: 0,
            jobs: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub index: usize,
    pub seed: u64,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub lambda: Vec<f64>,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub gap: f64,
    pub status: SolveStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    /// `T − T₁` above [`FINDING_GAP`] with `d > K`.
    GapCandidate,
    /// `T − T₁` above [`FINDING_GAP`] with `d ≤ K`, where the face range for
    /// `c*` is clamped and `T₁` is not the rank-one optimum.
    ClampedRange,
    /// `T₁` above `T` by more than [`LOWER_BOUND_SLACK`].
    LowerBoundViolation,
    /// The solver did not report `Optimal`.
    SolverStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub index: usize,
    pub kind: FindingKind,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub gap: f64,
    pub lambda: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSummary {
    pub n: usize,
    pub seed: u64,
    pub max_gap: f64,
    /// Largest gap over instances with `d > K`.
    pub max_gap_unclamped: f64,
    pub min_gap: f64,
    pub flagged: Vec<Finding>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub summary: SweepSummary,
    pub records: Vec<SweepRecord>,
}

fn run_instance(cfg: &SweepConfig, index: usize) -> Result<SweepRecord> {
    let mut rng = instance_rng(cfg.seed, index);
    let d = rng.random_range(cfg.d_range.clone());
    let k = rng.random_range(cfg.k_range.clone());
    let lambda = sample_simplex(&mut rng, d);
    let t1 = t1_value(&lambda, k)?;
    let cert = solve(&build_reduced(&lambda, k)?)?;
    Ok(SweepRecord {
        index,
        seed: cfg.seed,
        d,
        k,
        lambda: lambda.coeffs().to_vec(),
        t1,
        t: cert.primal_value,
        gap: cert.primal_value - t1,
        status: cert.status,
    })
}

fn classify(r: &SweepRecord) -> Option<FindingKind> {
    if r.status != SolveStatus::Optimal {
        Some(FindingKind::SolverStatus)
    } else if r.gap < -LOWER_BOUND_SLACK {
        Some(FindingKind::LowerBoundViolation)
    } else if r.gap > FINDING_GAP {
        Some(if r.d > r.k {
            FindingKind::GapCandidate
        } else {
            FindingKind::ClampedRange
        })
    } else {
        None
    }
}

/// Samples `n` targets, solves each SDP and compares with `T₁`. Records are
/// ordered by instance index whatever the thread count.
pub fn conjecture_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    if cfg.d_range.is_empty() || cfg.k_range.is_empty() || *cfg.k_range.start() < 2 {
        return Err(Error::Domain("empty range or K below 2".into()));
    }
    let work = || {
        (0..cfg.n)
            .into_par_iter()
            .map(|i| run_instance(cfg, i))
            .collect::<Result<Vec<_>>>()
    };
    let records = if cfg.jobs == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::Domain(format!("cannot start {} workers: {e}", cfg.jobs)))?
            .install(work)?
    };
    let flagged = records
        .iter()
        .filter_map(|r| {
            classify(r).map(|kind| Finding {
                index: r.index,
                kind,
                d: r.d,
                k: r.k,
                gap: r.gap,
                lambda: r.lambda.clone(),
            })
        })
        .collect();
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::NEG_INFINITY, f64::max);
    let summary = SweepSummary {
        n: records.len(),
        seed: cfg.seed,
        max_gap: max(&mut records.iter().map(|r| r.gap)),
        max_gap_unclamped: max(&mut records.iter().filter(|r| r.d > r.k).map(|r| r.gap)),
        min_gap: records.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min),
        flagged,
    };
    Ok(SweepReport { summary, records })
}

pub const SWEEP_CSV_HEADER: &str = "index,seed,d,K,T1,T,gap,status,lambda";

/// One line per record; `lambda` is `;`-separated. Floats use the shortest
/// round-trip representation, so equal runs give identical bytes.
pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        let lam: Vec<String> = r.lambda.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:?},{}",
            r.index,
            r.seed,
            r.d,
            r.k,
            r.t1,
            r.t,
            r.gap,
            r.status,
            lam.join(";")
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionClass {
    DirectPpt,
    CatalyticOnly,
    Unreachable,
}

impl RegionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionClass::DirectPpt => "direct_ppt",
            RegionClass::CatalyticOnly => "catalytic_only",
            RegionClass::Unreachable => "unreachable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionMode {
    /// Only the direct criterion; points are `direct_ppt` or `unreachable`.
    Direct,
    /// Both criteria.
    Catalytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionSample {
    /// Ascending coordinates `λ₁ ≤ λ₂ ≤ λ₃`.
    pub lambda: [f64; 3],
    pub class: RegionClass,
    pub thm5_lhs: f64,
    /// `2(√λ₃λ₂ + √λ₃λ₁ + √λ₁λ₂)`, mathematically `2^{S½} − 1`.
    pub catalytic_lhs: f64,
    /// `2^{S½} = (Σ √λ_i)²`.
    pub s_half_pow: f64,
}

impl RegionSample {
    pub fn direct(&self) -> bool {
        self.thm5_lhs <= 1.0
    }

    pub fn catalytic(&self) -> bool {
        self.catalytic_lhs <= 1.0
    }
}

/// `(catalytic, direct)` left-hand sides for an ascending rank-3 vector. The
/// direct one is the catalytic one plus `2√λ₁λ₂`, so the nesting survives
/// rounding.
fn criteria(l: [f64; 3]) -> (f64, f64) {
    let (a, b, c) = (
        (l[2] * l[1]).sqrt(),
        (l[2] * l[0]).sqrt(),
        (l[0] * l[1]).sqrt(),
    );
    let catalytic = 2.0 * (a + b + c);
    (catalytic, catalytic + 2.0 * c)
}

/// Vertices of the ordered cell `λ₁ ≤ λ₂ ≤ λ₃` of the rank-3 simplex.
pub const CELL: [[f64; 3]; 3] = [
    [0.0, 0.0, 1.0],
    [0.0, 0.5, 0.5],
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
];

/// Triangular grid with `resolution` points per side over [`CELL`],
/// `resolution·(resolution+1)/2` points in all.
pub fn region_sample(resolution: usize, mode: RegionMode) -> Result<Vec<RegionSample>> {
    if resolution < 2 {
        return Err(Error::Domain(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let steps = (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * (resolution + 1) / 2);
    for i in 0..resolution {
        for j in 0..resolution - i {
            let (b, c) = (i as f64 / steps, j as f64 / steps);
            let a = 1.0 - b - c;
            let mut l = [0.0; 3];
            for (k, lk) in l.iter_mut().enumerate() {
                *lk = (a * CELL[0][k] + b * CELL[1][k] + c * CELL[2][k]).max(0.0);
            }
            let s: f64 = l.iter().map(|x| x.sqrt()).sum();
            let (catalytic_lhs, thm5_lhs) = criteria(l);
            let mut sample = RegionSample {
                lambda: l,
                class: RegionClass::Unreachable,
                thm5_lhs,
                catalytic_lhs,
                s_half_pow: s * s,
            };
            sample.class = if sample.direct() {
                RegionClass::DirectPpt
            } else if mode == RegionMode::Catalytic && sample.catalytic() {
                RegionClass::CatalyticOnly
            } else {
                RegionClass::Unreachable
            };
            out.push(sample);
        }
    }
    Ok(out)
}

/// Classification of a single rank-3 vector against both criteria.
pub fn classify_rank3(lambda: &SchmidtVector) -> Result<RegionClass> {
    let l = lambda.strip_zeros();
    if l.len() != 3 {
        return Err(Error::Domain(format!(
            "expected Schmidt rank 3, got {}",
            l.len()
        )));
    }
    let (catalytic, direct) = criteria([l.coeffs()[0], l.coeffs()[1], l.coeffs()[2]]);
    Ok(if direct <= 1.0 {
        RegionClass::DirectPpt
    } else if catalytic <= 1.0 {
        RegionClass::CatalyticOnly
    } else {
        RegionClass::Unreachable
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub direct_ppt: usize,
    pub catalytic_only: usize,
    pub unreachable: usize,
    /// Points inside the direct region but outside the catalytic one.
    pub nesting_violations: usize,
}

pub fn region_counts(samples: &[RegionSample]) -> RegionCounts {
    let mut c = RegionCounts::default();
    for s in samples {
        match s.class {
            RegionClass::DirectPpt => c.direct_ppt += 1,
            RegionClass::CatalyticOnly => c.catalytic_only += 1,
            RegionClass::Unreachable => c.unreachable += 1,
        }
        if s.direct() && !s.catalytic() {
            c.nesting_violations += 1;
        }
    }
    c
}

pub const REGION_CSV_HEADER: &str = "l1,l2,l3,class,thm5_lhs,s_half_pow";

pub fn region_csv(samples: &[RegionSample]) -> String {
    let mut out = String::from(REGION_CSV_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.lambda[0],
            s.lambda[1],
            s.lambda[2],
            s.class.as_str(),
            s.thm5_lhs,
            s.s_half_pow
        );
    }
    out
}

/// Plane coordinates: `λ₃ = 1` at the bottom left, `U₂` at the bottom right,
/// `U₃` at the apex.
fn project(l: [f64; 3], size: f64, margin: f64) -> (f64, f64) {
    let x = l[1] - l[0];
    let y = 3.0 * l[0];
    let w = size - 2.0 * margin;
    (margin + 2.0 * x * w, size - margin - y * w * 0.5)
}

/// Self-contained SVG of the cell with one marker per sample.
pub fn region_svg(samples: &[RegionSample]) -> String {
    let size = 640.0;
    let margin = 40.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    );
    let corners: Vec<String> = CELL
        .iter()
        .map(|&v| {
            let (x, y) = project(v, size, margin);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polygon points="{}" fill="none" stroke="#333333" stroke-width="1.5"/>"##,
        corners.join(" ")
    );
    let n = samples.len() as f64;
    let side = ((2.0 * n).sqrt()).max(2.0);
    let r = ((size - 2.0 * margin) / side * 0.45).clamp(0.6, 6.0);
    for s in samples {
        let (x, y) = project(s.lambda, size, margin);
        let fill = match s.class {
            RegionClass::DirectPpt => "#1f77b4",
            RegionClass::CatalyticOnly => "#ff7f0e",
            RegionClass::Unreachable => "#d9d9d9",
        };
        let _ = writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}"/>"#
        );
    }
    let labels = [
        ("(0,0,1)", CELL[0], "middle", 0.0, 18.0),
        ("(0,1/2,1/2)", CELL[1], "start", 6.0, 16.0),
        ("(1/3,1/3,1/3)", CELL[2], "middle", 0.0, -10.0),
    ];
    for (text, v, anchor, dx, dy) in labels {
        let (x, y) = project(v, size, margin);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="{anchor}">{text}</text>"#,
            x + dx,
            y + dy
        );
    }
    let legend = [
        ("#1f77b4", "direct from one EPR pair"),
        ("#ff7f0e", "with a maximally entangled catalyst only"),
        ("#d9d9d9", "unreachable"),
    ];
    for (i, (color, text)) in legend.iter().enumerate() {
        let y = 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#,
            size - 300.0,
            y - 9.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="12">{text}</text>"#,
            size - 284.0
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
