//! Character algebra, the closed-form classification and its
//! cross-validation against the pipeline.

pub mod chars;
pub mod cross;
pub mod result;

pub use chars::{canonicalize_rho, complete_pair, dualize, CharJson, CharSymbol, RhoSymbol};
pub use cross::{cross_validate, cross_validate_with, retryable, run_pipeline, CrossReport, PipelineRun};
pub use result::{
    ap_over_p_residue, check_scope, classify, closed_form_rho, Parameters, Precisions, Provenance, ReductionJson,
    ReductionResult, RhoJson, Variant,
};
