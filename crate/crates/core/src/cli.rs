//! Command-line front end. Every subcommand prints one JSON document on
//! stdout, or a plain-text report with `--pretty`.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error. With
//! `--exit-verdict`, `ppt` and `locc` exit 0/3/4 for
//! Feasible/Infeasible/Boundary.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalysis::{
    catalysis_limit, locc_catalysis_screen, minimal_catalyst_rank, ppt_catalysis_conjecture_screen,
    ppt_maxent_catalysis_possible, ScreenOutcome, TGrid,
};
use crate::closed_form::{rank1_dual_point, t1_face};
use crate::error::{Error, Result};
use crate::feasibility::{decide, explain, Decision, OpClass, Source, TransformQuery};
use crate::lab::{
    conjecture_sweep, region_counts, region_csv, region_sample, region_svg, sweep_csv, write_file,
    RegionMode, SweepConfig,
};
use crate::ppt_sdp::{build_reduced, check_dual, solve, solve_full_oracle, FEASIBILITY_TOL};
use crate::spectra::{ppt_monotone_report, renyi_entropy, s_half, Order, SchmidtVector};

fn parse_k(s: &str) -> std::result::Result<usize, String> {
    let k: usize = s
        .parse()
        .map_err(|_| format!("`{s}` is not a positive integer"))?;
    if k < 2 {
        return Err(format!("K must be at least 2, got {k}"));
    }
    Ok(k)
}

#[derive(Debug, Parser)]
#[command(
    name = "ppt-forge",
    version,
    about = "Pure-state convertibility under LOCC and PPT operations"
)]
pub struct Cli {
    /// Human-readable text instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Map verdicts to exit codes: Feasible 0, Infeasible 3, Boundary 4.
    #[arg(long, global = true)]
    pub exit_verdict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScreenKind {
    Locc,
    Ppt,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Direct,
    Catalytic,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rényi entropy S_t in bits.
    Entropy {
        #[arg(long)]
        lambda: SchmidtVector,
        /// Order: a number, a fraction, or `inf`.
        #[arg(long, default_value = "1/2", allow_negative_numbers = true)]
        t: Order,
    },
    /// Closed-form PPT entanglement measures of a pure state.
    Monotones {
        #[arg(long)]
        lambda: SchmidtVector,
    },
    /// LOCC convertibility by majorization.
    Locc {
        /// Source Schmidt coefficients.
        #[arg(long, conflicts_with = "k", required_unless_present = "k")]
        source: Option<SchmidtVector>,
        /// Maximally entangled source of rank K.
        #[arg(long = "K", value_parser = parse_k)]
        k: Option<usize>,
        #[arg(long)]
        target: SchmidtVector,
    },
    /// PPT convertibility from a maximally entangled state of rank K.
    Ppt {
        #[arg(long = "K", value_parser = parse_k)]
        k: usize,
        #[arg(long)]
        target: SchmidtVector,
    },
    /// Solve the SDP for T(K; λ) and print its certificate.
    TValue {
        #[arg(long = "K", value_parser = parse_k)]
        k: usize,
        #[arg(long)]
        lambda: SchmidtVector,
        /// Also solve the unreduced program (small ranks only).
        #[arg(long)]
        oracle: bool,
    },
    /// Rank-one dual value T₁(K; λ).
    T1 {
        #[arg(long = "K", value_parser = parse_k)]
        k: usize,
        #[arg(long)]
        lambda: SchmidtVector,
    },
    /// Explicit rank-one dual point attaining T₁.
    DualPoint {
        #[arg(long = "K", value_parser = parse_k)]
        k: usize,
        #[arg(long)]
        lambda: SchmidtVector,
    },
    /// Catalysis with a maximally entangled catalyst, or a grid screen.
    Catalysis {
        #[arg(long = "K", value_parser = parse_k, required_unless_present = "screen")]
        k: Option<usize>,
        #[arg(long)]
        lambda: SchmidtVector,
        /// Screen the catalysis conditions for λ → μ instead.
        #[arg(long, value_enum, requires = "mu")]
        screen: Option<ScreenKind>,
        #[arg(long)]
        mu: Option<SchmidtVector>,
    },
    /// Smallest maximally entangled catalyst rank C.
    MinCatalyst {
        #[arg(long = "K", value_parser = parse_k)]
        k: usize,
        #[arg(long)]
        lambda: SchmidtVector,
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
    /// Compare T and T₁ on random targets.
    Sweep {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d_min: usize,
        #[arg(long, default_value_t = 6)]
        d_max: usize,
        #[arg(long = "K-min", value_parser = parse_k, default_value = "2")]
        k_min: usize,
        #[arg(long = "K-max", value_parser = parse_k, default_value = "6")]
        k_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (0: one per core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write per-instance records as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a grid over the ordered rank-3 simplex cell.
    Region {
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Catalytic)]
        mode: ModeArg,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// SVG output path.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

/// Result of one command.
struct Output {
    json: Value,
    text: String,
    decision: Option<Decision>,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Output {
            json,
            text,
            decision: None,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn order_json(t: Order) -> Value {
    match t {
        Order::Finite(x) => json!(x),
        Order::Infinity => json!("inf"),
    }
}

fn verdict_output(query: &TransformQuery) -> Result<Output> {
    let verdict = decide(query)?;
    Ok(Output {
        json: to_value(&verdict)?,
        text: explain(&verdict),
        decision: Some(verdict.decision),
    })
}

fn screen_text(outcome: &ScreenOutcome) -> String {
    match outcome {
        ScreenOutcome::Pass { points } => {
            format!("pass at all {points} sampled orders (grid screen, not a proof)\n")
        }
        ScreenOutcome::Fail { condition, t } => format!("fail: {condition} violated at t = {t}\n"),
        ScreenOutcome::Inconclusive { condition, t } => {
            format!("inconclusive: {condition} too close to equality at t = {t}\n")
        }
    }
}

fn execute(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Entropy { lambda, t } => {
            let s = renyi_entropy(&lambda, t)?;
            Ok(Output::new(
                json!({ "lambda": lambda.coeffs(), "t": order_json(t), "S": s }),
                format!("S_{t}(λ) = {s:.10} bits\n"),
            ))
        }
        Command::Monotones { lambda } => {
            let m = ppt_monotone_report(&lambda);
            let mut j = to_value(&m)?;
            j["lambda"] = json!(lambda.coeffs());
            Ok(Output::new(
                j,
                format!(
                    "PPT entanglement cost   E_C  = {:.10}\n\
                     PPT distillable         E_D  = {:.10}\n\
                     exact distillation      E_xD = {:.10}\n\
                     exact cost              E_xC = {:.10}\n",
                    m.e_c, m.e_d, m.e_xd, m.e_xc
                ),
            ))
        }
        Command::Locc { source, k, target } => {
            let source = match (source, k) {
                (Some(v), _) => Source::Pure(v),
                (None, Some(k)) => Source::MaxEnt(k),
                (None, None) => unreachable!("clap requires one of --source and --K"),
            };
            verdict_output(&TransformQuery {
                source,
                target,
                op_class: OpClass::Locc,
            })
        }
        Command::Ppt { k, target } => verdict_output(&TransformQuery::ppt(k, target)),
        Command::TValue { k, lambda, oracle } => {
            let lam = lambda.strip_zeros();
            let cert = solve(&build_reduced(&lam, k)?)?;
            let mut j = to_value(&cert)?;
            let mut text = format!(
                "T({k}; λ) = {:.12}\ndual      = {:.12}\ngap       = {:.3e}\nstatus    = {:?} after {} iterations\n",
                cert.primal_value, cert.dual_value, cert.gap, cert.status, cert.iterations
            );
            if oracle {
                let o = solve_full_oracle(&lam, k)?;
                j["oracle_T"] = json!(o);
                let _ = writeln!(text, "unreduced = {o:.12}");
            }
            Ok(Output::new(j, text))
        }
        Command::T1 { k, lambda } => {
            let lam = lambda.strip_zeros();
            let face = t1_face(&lam, k)?;
            let lower = crate::ppt_sdp::lower_bound_value(&lam, k);
            Ok(Output::new(
                json!({
                    "K": k,
                    "lambda": lam.coeffs(),
                    "c_star": face.c_star,
                    "T1": face.t1_value,
                    "lower_bound": lower,
                    "delta": face.delta_value,
                    "x": face.x_point,
                }),
                format!(
                    "c* = {} (d = {})\nT₁ = {:.10}\nlower bound = {:.10}\n",
                    face.c_star,
                    lam.len(),
                    face.t1_value,
                    lower
                ),
            ))
        }
        Command::DualPoint { k, lambda } => {
            let lam = lambda.strip_zeros();
            let p = rank1_dual_point(&lam, k)?;
            let check = check_dual(&p.mu, &p.t);
            let feasible = check.feasible(FEASIBILITY_TOL);
            let mut j = to_value(&p)?;
            j["K"] = json!(k);
            j["lambda"] = json!(lam.coeffs());
            j["dual_feasible"] = json!(feasible);
            let u: Vec<String> = p.u.iter().map(|x| format!("{x:.8}")).collect();
            Ok(Output::new(
                j,
                format!(
                    "u = ({})\nobjective = {:.12}\ndual feasible: {feasible}\n",
                    u.join(", "),
                    p.objective
                ),
            ))
        }
        Command::Catalysis {
            lambda,
            screen: Some(kind),
            mu,
            ..
        } => {
            let mu = mu.expect("clap enforces --mu with --screen");
            let grid = TGrid::default();
            let (name, outcome) = match kind {
                ScreenKind::Locc => ("locc", locc_catalysis_screen(&lambda, &mu, &grid)?),
                ScreenKind::Ppt => ("ppt", ppt_catalysis_conjecture_screen(&lambda, &mu, &grid)?),
            };
            let mut j = to_value(&outcome)?;
            j["screen"] = json!(name);
            j["lambda"] = json!(lambda.coeffs());
            j["mu"] = json!(mu.coeffs());
            let mut text = screen_text(&outcome);
            if let ScreenKind::Ppt = kind {
                text.push_str("(conjectural condition)\n");
            }
            Ok(Output::new(j, text))
        }
        Command::Catalysis {
            k,
            lambda,
            screen: None,
            ..
        } => {
            let k = k.expect("clap enforces --K without --screen");
            let possible = ppt_maxent_catalysis_possible(k, &lambda);
            let limit = catalysis_limit(k, &lambda);
            let sh = s_half(&lambda);
            Ok(Output::new(
                json!({
                    "K": k,
                    "lambda": lambda.coeffs(),
                    "possible": possible,
                    "s_half": sh,
                    "log_K": (k as f64).log2(),
                    "limit_value": limit,
                }),
                format!(
                    "S½ = {sh:.10}, log K = {:.10}\ncatalysis with a maximally entangled catalyst: {}\nlimit of T(KC; λ⊗U_C) = {limit:.10}\n",
                    (k as f64).log2(),
                    if possible { "possible" } else { "impossible" }
                ),
            ))
        }
        Command::MinCatalyst { k, lambda, budget } => {
            let scan = minimal_catalyst_rank(k, &lambda, budget)?;
            let mut text = match scan.minimal_c {
                Some(c) => format!("minimal catalyst rank C = {c}\n"),
                None if !scan.possible => "no maximally entangled catalyst helps\n".to_string(),
                None => format!("no catalyst rank up to {budget} works\n"),
            };
            for e in &scan.scan {
                let _ = writeln!(
                    text,
                    "  C = {:<3} T₁ = {:<14} T = {:<14} {}",
                    e.c,
                    e.t1.map_or("-".into(), |v| format!("{v:.10}")),
                    e.t.map_or("-".into(), |v| format!("{v:.10}")),
                    e.verdict
                );
            }
            Ok(Output::new(to_value(&scan)?, text))
        }
        Command::Sweep {
            n,
            d_min,
            d_max,
            k_min,
            k_max,
            seed,
            jobs,
            out,
        } => {
            if d_min < 1 || d_min > d_max || k_min > k_max {
                return Err(Error::Domain("empty d or K range".into()));
            }
            let report = conjecture_sweep(&SweepConfig {
                n,
                d_range: d_min..=d_max,
                k_range: k_min..=k_max,
                seed,
                jobs,
            })?;
            if let Some(path) = &out {
                write_file(path, &sweep_csv(&report.records))?;
            }
            let s = &report.summary;
            let mut text = format!(
                "{} instances, seed {}\nmax gap T − T₁ = {:.3e} (d > K: {:.3e})\nflagged: {}\n",
                s.n,
                s.seed,
                s.max_gap,
                s.max_gap_unclamped,
                s.flagged.len()
            );
            for f in &s.flagged {
                let _ = writeln!(
                    text,
                    "  #{} {:?} d={} K={} gap={:.3e}",
                    f.index, f.kind, f.d, f.k, f.gap
                );
            }
            Ok(Output::new(to_value(s)?, text))
        }
        Command::Region {
            resolution,
            mode,
            out,
            svg,
        } => {
            let mode = match mode {
                ModeArg::Direct => RegionMode::Direct,
                ModeArg::Catalytic => RegionMode::Catalytic,
            };
            let samples = region_sample(resolution, mode)?;
            if let Some(path) = &out {
                write_file(path, &region_csv(&samples))?;
            }
            if let Some(path) = &svg {
                write_file(path, &region_svg(&samples))?;
            }
            let counts = region_counts(&samples);
            let nested = counts.nesting_violations == 0 && counts.catalytic_only > 0;
            Ok(Output::new(
                json!({
                    "resolution": resolution,
                    "mode": mode,
                    "points": samples.len(),
                    "counts": counts,
                    "strictly_nested": nested,
                }),
                format!(
                    "{} points: {} direct, {} catalytic only, {} unreachable\nnesting violations: {}\n",
                    samples.len(),
                    counts.direct_ppt,
                    counts.catalytic_only,
                    counts.unreachable,
                    counts.nesting_violations
                ),
            ))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let (pretty, exit_verdict) = (cli.pretty, cli.exit_verdict);
    match execute(cli.command) {
        Ok(o) => {
            if pretty {
                let _ = write!(out, "{}", o.text);
            } else {
                let _ = writeln!(out, "{}", o.json);
            }
            match (exit_verdict, o.decision) {
                (true, Some(Decision::Infeasible)) => 3,
                (true, Some(Decision::Boundary)) => 4,
                _ => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
