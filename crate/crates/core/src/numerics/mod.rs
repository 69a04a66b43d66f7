//! Shared numerical substrate: scalars, transforms, linear algebra, Newton,
//! extrapolation.

pub mod fourier;
pub mod linalg;
pub mod newton;
pub mod richardson;
pub mod scalar;

pub use fourier::{dft_forward, dft_inverse, FourierCoeffs, GridSamples, Transform};
pub use linalg::Matrix;
pub use newton::{newton, newton_solve, NewtonOptions, NewtonSolution, NonlinearSystem};
pub use richardson::{richardson_extrapolate, Extrapolated};
pub use scalar::{parse_real, DoubleDouble, Precision, Real};
