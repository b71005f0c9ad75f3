//! Stable evaluation of `Re[(1 + ix)^ν] - 1` divided by the vanishing factor
//! near the removable singularities ν → 0 and ν → 1.
//!
//! The ohmic closed forms all reduce to `Γ(·)·(Re[(1+ix)^ν] - 1)` where the
//! gamma prefactor has a pole exactly where the bracket vanishes; dividing
//! the bracket analytically keeps the product finite and accurate.

use num_complex::Complex64;

/// Principal `ln(1 + ix)` = `½ ln(1+x²) + i·atan(x)`.
pub fn ln_one_plus_ix(x: f64) -> Complex64 {
    Complex64::new(0.5 * (x * x).ln_1p(), x.atan())
}

fn expm1_c(w: Complex64) -> Complex64 {
    let half_sin = (0.5 * w.im).sin();
    Complex64::new(
        w.re.exp_m1() * w.im.cos() - 2.0 * half_sin * half_sin,
        w.re.exp() * w.im.sin(),
    )
}

/// `(Re[(1+ix)^ν] - 1) / ν`, equal to `½ ln(1+x²)` at ν = 0.
pub fn rpow_m1_over_nu(x: f64, nu: f64) -> f64 {
    let log = ln_one_plus_ix(x);
    if nu == 0.0 {
        return log.re;
    }
    expm1_c(log * nu).re / nu
}

/// `(Re[(1+ix)^ν] - 1) / (ν - 1)`, equal to `½ ln(1+x²) - x·atan(x)` at ν = 1.
pub fn rpow_m1_over_nu_minus_one(x: f64, nu: f64) -> f64 {
    let log = ln_one_plus_ix(x);
    let base = Complex64::new(1.0, x);
    let eps = nu - 1.0;
    if eps == 0.0 {
        return (base * log).re;
    }
    (base * expm1_c(log * eps)).re / eps
}
