//! Bracketing and bisection for transition-time searches.

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs
/// (or one of them is zero). Stops once the bracket is narrower than `xtol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Result of scanning a function along an ordered grid for its first
/// downward zero crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingScan {
    /// Refined crossing and the grid bracket it was found in.
    pub root: Option<(f64, (f64, f64))>,
    /// Smallest sampled value before the crossing (or over the whole grid).
    pub min_value: f64,
    pub argmin: f64,
}

/// Finds the first point where `f` goes from positive to non-positive along
/// `grid`, then refines it by bisection to `xtol`.
pub fn first_crossing<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], xtol: f64) -> CrossingScan {
    let mut min_value = f64::INFINITY;
    let mut argmin = f64::NAN;
    let mut prev: Option<(f64, f64)> = None;
    for &t in grid {
        let v = f(t);
        if v < min_value {
            min_value = v;
            argmin = t;
        }
        if let Some((tp, vp)) = prev {
            if vp > 0.0 && v <= 0.0 {
                let root = bisect(&mut f, tp, t, xtol).unwrap_or(t);
                return CrossingScan { root: Some((root, (tp, t))), min_value, argmin };
            }
        }
        prev = Some((t, v));
    }
    CrossingScan { root: None, min_value, argmin }
}

/// `n + 1` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|k| if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 }).collect()
}
