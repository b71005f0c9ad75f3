use std::f64::consts::PI;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler gamma function for real arguments, continued to negative
/// non-integers by reflection. Returns NaN at the poles.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        let sqrt_pi = PI.sqrt();
        assert!(rel(gamma(0.5), sqrt_pi) < 1e-14);
        assert!(rel(gamma(1.5), 0.5 * sqrt_pi) < 1e-14);
        assert!(rel(gamma(2.5), 0.75 * sqrt_pi) < 1e-14);
        assert!(rel(gamma(-0.5), -2.0 * sqrt_pi) < 1e-14);
        assert!(rel(gamma(-1.5), 4.0 / 3.0 * sqrt_pi) < 1e-14);
        assert_eq!(gamma(5.0), 24.0);
        assert!(gamma(0.0).is_nan());
        assert!(gamma(-2.0).is_nan());
    }

    #[test]
    fn recurrence_holds() {
        for k in 0..200 {
            let x = -3.7 + k as f64 * 0.0437;
            if (x - x.round()).abs() < 1e-3 || (x + 1.0 - (x + 1.0).round()).abs() < 1e-3 {
                continue;
            }
            assert!(rel(gamma(x + 1.0), x * gamma(x)) < 1e-12, "x = {x}");
        }
    }
}
