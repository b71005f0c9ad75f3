//! Dormand–Prince 5(4) embedded Runge–Kutta with adaptive step control.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-10, initial_step: 1e-3, max_steps: 200_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t1` and returns `y(t1)`.
///
/// `rhs` writes the derivative into its third argument and may fail; its
/// error aborts the integration.
pub fn integrate<F>(mut rhs: F, y0: &[f64], t0: f64, t1: f64, opts: &OdeOptions) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0.to_vec();
    if t1 <= t0 {
        return Ok(y);
    }
    let mut t = t0;
    let mut h = opts.initial_step.min(t1 - t0);
    let mut k = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    rhs(t, &y, &mut k[0])?;

    let mut steps = 0;
    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::IntegrationFailure { t, reason: "step budget exhausted".into() });
        }
        steps += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            rhs(t + C[s] * h, &stage, &mut k[s])?;
        }
        // Stage 7 was evaluated at the 5th-order solution (FSAL).
        let mut err = 0.0f64;
        for i in 0..n {
            let hi5: f64 = (0..7).map(|s| B5[s] * k[s][i]).sum();
            let hi4: f64 = (0..7).map(|s| B4[s] * k[s][i]).sum();
            let y_new = y[i] + h * hi5;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new.abs());
            err = err.max((h * (hi5 - hi4)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::IntegrationFailure { t, reason: "non-finite derivative".into() });
        }
        if err <= 1.0 {
            y[..n].copy_from_slice(&stage[..n]);
            t = if last { t1 } else { t + h };
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::IntegrationFailure { t, reason: "step size underflow".into() });
        }
    }
    Ok(y)
}
