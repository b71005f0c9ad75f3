//! Numerical kernels shared by the physics modules.

mod cpow;
mod gamma;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod simplex;

pub use cpow::{ln_one_plus_ix, rpow_m1_over_nu, rpow_m1_over_nu_minus_one};
pub use gamma::gamma;

/// Binary entropy-like sum `-Σ p log₂ p` over the given weights, with `0·log 0 = 0`.
///
/// Tiny negative weights produced by roundoff are clamped to zero.
pub fn shannon_bits<I: IntoIterator<Item = f64>>(weights: I) -> f64 {
    weights
        .into_iter()
        .map(|p| if p > 0.0 { -p * p.log2() } else { 0.0 })
        .sum()
}

/// `(1+x)/2·log₂(1+x) + (1-x)/2·log₂(1-x)` for `x ∈ [-1, 1]`.
///
/// This is the recurring sum `Σ_j (1+(-1)^j x)/2 · log₂(1+(-1)^j x)`.
pub fn paired_log_sum(x: f64) -> f64 {
    let term = |y: f64| if y > 0.0 { 0.5 * y * y.log2() } else { 0.0 };
    term(1.0 + x) + term(1.0 - x)
}
