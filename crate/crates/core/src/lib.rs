//! Numerical laboratory for Bregman-type divergences, their convexity
//! witnesses, Lévy semigroups and the Hardy–Stein family of identities.

pub mod bregman;
pub mod campaign;
pub mod error;
pub mod forms;
pub mod quad;
pub mod report;
pub mod semigroup;
pub mod verify;

pub use bregman::{BregmanPoint, CoDivArgs, Exponent, YVariant};
pub use campaign::{run_campaign, CampaignKind, CampaignSpec, ClaimReport, RunConfig, RunStatus, RunSummary};
pub use error::{LabError, Result};
pub use forms::{FormEvaluation, GridFunction, GridLayout, PolarizedPath, QuadratureConfig};
pub use report::{IdentityReport, ReportRecord, TimeBand, Verdict, VerificationReport, CLAIMS, CSV_HEADER};
pub use semigroup::{ModelKind, ModelSpec, SemigroupModel, TestFunctionSpec};
pub use verify::{ComparabilityPair, SampleMode, SampleStrategy};
