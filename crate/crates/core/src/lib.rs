//! Wach modules of 2-dimensional crystalline representations and their
//! reduction modulo p.
//!
//! The series layer is generic over a [`Coeff`] ring; the two instances used
//! throughout are [`OlSeries`] (coefficients in O_L) and [`ResSeries`]
//! (coefficients in F_p or F_{p²}).

pub mod classify;
pub mod error;
pub mod padic;
pub mod suite;
pub mod modp;
pub mod wach;

pub use error::{Error, Result};
pub use padic::coeff::Coeff;
pub use padic::fq::{Fq, FqField};
pub use padic::matrix::Mat2;
pub use padic::ol::{EisensteinRing, OlElem, OlRing, Valuation};
pub use padic::ops::GammaExp;
pub use padic::series::{Series, EXACT};

pub type OlSeries = Series<OlElem>;
pub type ResSeries = Series<Fq>;
pub type OlMat = Mat2<OlElem>;
pub type ResMat = Mat2<Fq>;
