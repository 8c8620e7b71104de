//! Residue-field computations: reduction of the Wach data, the line δ for
//! k ≥ p+3, the trivialization for k = p+2 and the extension class for
//! k = p+3, λ = ±1.

pub mod dwork;
pub mod extension;
pub mod line;
pub mod reduce;

pub use dwork::{build_q_kp2, diagonalize_const, dwork_trivialize, gamma_scalar_check, ConstEigen, ScalarCheck};
pub use extension::{
    extension_data, in_psi_image, pole_functional, psi_cokernel_witness, CokernelVerdict, ExtensionData,
    LineModel, Ramification,
};
pub use line::{delta_line, solve_z, z_residual, CharWitness};
pub use reduce::{factor_alpha_bar, inject_alpha_fault, reduce_wach, ResVec, ResWach};
