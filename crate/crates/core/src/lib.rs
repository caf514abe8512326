//! Deterministic conversion of bipartite pure states under LOCC and PPT
//! operations.
//!
//! The central quantity is `T(K; λ)`, the value of a small semidefinite
//! program: `Φ_K → ρ_λ` is possible under PPT operations iff `T(K; λ) ≤ 1`.
//! [`ppt_sdp`] solves it with certificates, [`closed_form`] gives the
//! rank-one dual value `T₁`, and [`feasibility`] combines exact shortcuts with
//! the SDP into verdicts.

pub mod catalysis;
pub mod cli;
pub mod closed_form;
pub mod conic;
pub mod error;
pub mod feasibility;
pub mod lab;
pub mod ppt_sdp;
pub mod spectra;

pub use error::{Error, Result};
pub use feasibility::{decide, Decision, OpClass, Rule, Source, TransformQuery, Verdict};
pub use ppt_sdp::SdpCertificate;
pub use spectra::{Order, SchmidtVector};
