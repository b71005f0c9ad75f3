//! Correlation dynamics of a pair of qubits coupled to local reservoirs.
//!
//! The crate covers three layers:
//!
//! - small dense state algebra for one and two qubits ([`state`]) and the
//!   correlation measures built on it ([`measures`]): mutual information,
//!   measurement-optimized classical correlations and quantum discord;
//! - single-qubit dynamical maps for combined ohmic dephasing and Lorentzian
//!   dissipation/heating ([`channel`]), lifted to two qubits in [`pair`], and
//!   the dephasing model with initially squeezed, correlated environments
//!   ([`correlated`]);
//! - transition-time solvers and parameter-region classification ([`scan`]).
//!
//! Numerical kernels (Gauss–Kronrod quadrature, bisection, Nelder–Mead,
//! embedded Runge–Kutta, the gamma function) live in [`numeric`].

pub mod channel;
pub mod correlated;
mod error;
pub mod measures;
pub mod numeric;
pub mod pair;
pub mod random;
pub mod scan;
pub mod state;
pub mod validation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
