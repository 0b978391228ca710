//! Scaled-utility certainty equivalents and the utility-based acceptability
//! index (UAI).
//!
//! For a concave, strictly increasing utility `U` bounded from above, the
//! scaled family `U_γ(x) = U(γx)` induces the risk measures
//!
//! ```text
//! μ_γ(X) = −(1/γ) · U⁻¹(E[U(γX)])
//! ```
//!
//! and the acceptability index `α(X) = sup{γ > 0 : μ_γ(X) ≤ 0}` (with
//! `sup ∅ = 0`). The crate evaluates both over finite laws, certifies the
//! scale-aversion regularity that makes `γ ↦ μ_γ` monotone, and measures
//! benchmarked portfolio performance over simulated or ingested return
//! series, both at a fixed horizon and along growing horizons.
//!
//! Module map:
//!
//! * [`utility`]: utility families, Arrow–Pratt functions, inversion, convex
//!   conjugate and the regularity certifier.
//! * [`sample`]: finite laws, return series, CSV ingestion, SSD ordering.
//! * [`certainty`]: `μ_γ`, entropic and Gaussian closed forms, OCE,
//!   cash-additive hull, mean-variance approximation.
//! * [`index`]: the acceptability index solver and a grid-scan oracle.
//! * [`paths`]: seeded simulators (i.i.d. Gaussian, ARMA, fGn, OU).
//! * [`perf`]: finite-horizon and long-run benchmarked performance.
//! * [`cli`]: the `uai` command-line front end.

pub mod certainty;
pub mod cli;
pub mod error;
pub mod index;
pub mod numeric;
pub mod paths;
pub mod perf;
pub mod sample;
pub mod utility;

pub use certainty::CeValue;
pub use error::{Error, Result};
pub use index::{IndexKind, IndexOptions, IndexValue};
pub use paths::PathModelSpec;
pub use sample::{EmpiricalDistribution, ReturnSeries};
pub use utility::{RiskAversion, UtilityFamily};
