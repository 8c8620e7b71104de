pub mod binom;
pub mod coeff;
pub mod fq;
pub mod json;
pub mod lambda;
pub mod matrix;
pub mod ol;
pub mod ops;
pub mod series;
