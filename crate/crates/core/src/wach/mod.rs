//! Construction and verification of the Wach module for val(a_p) = 1.

pub mod build;
pub mod params;
pub mod verify;

pub use build::{initial_gamma_diag, SolveOutcome, WachContext};
pub use params::{default_gamma_gens, default_mx, WachParams};
pub use verify::{
    build_wach, initial_report, inject_g_fault, uniqueness_check, verify_wach, wach_report, CheckOutcome, WachData, WachReport};
