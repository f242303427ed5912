//! Hermite polynomials, Hermite functions and the small pieces of
//! combinatorics (log-factorials, associated Laguerre polynomials) that the
//! oscillator formulas need.

use crate::error::{Error, Result};

/// Largest degree accepted by [`hermite_eval`].
pub const MAX_HERMITE_DEGREE: usize = 200;

/// Degrees up to this use the plain recurrence; above it the recurrence
/// carries a separate log-magnitude.
const DIRECT_LIMIT: usize = 30;

const RESCALE_ABOVE: f64 = 1e150;

/// π^(-1/4)
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Physicists' Hermite polynomial Hₙ(x).
pub fn hermite_eval(n: usize, x: f64) -> Result<f64> {
    if n > MAX_HERMITE_DEGREE {
        return Err(Error::range(
            "Hermite degree",
            format!("n = {n} exceeds {MAX_HERMITE_DEGREE}"),
        ));
    }
    if !x.is_finite() {
        return Err(Error::range("Hermite argument", format!("x = {x}")));
    }
    if n <= DIRECT_LIMIT {
        let value = hermite_direct(n, x);
        return if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::range("Hermite value", format!("H_{n}({x}) overflows")))
        };
    }
    let (ln_abs, sign) = hermite_ln_abs(n, x)?;
    if ln_abs >= f64::MAX.ln() {
        return Err(Error::range("Hermite value", format!("H_{n}({x}) overflows")));
    }
    Ok(sign * ln_abs.exp())
}

fn hermite_direct(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Returns `(ln |Hₙ(x)|, sign Hₙ(x))`, with sign 0 at a root.
///
/// The recurrence is run on rescaled values so no intermediate overflows,
/// which keeps degrees well past the double-precision limit of Hₙ usable.
pub fn hermite_ln_abs(n: usize, x: f64) -> Result<(f64, f64)> {
    if n > MAX_HERMITE_DEGREE {
        return Err(Error::range(
            "Hermite degree",
            format!("n = {n} exceeds {MAX_HERMITE_DEGREE}"),
        ));
    }
    if !x.is_finite() {
        return Err(Error::range("Hermite argument", format!("x = {x}")));
    }
    let mut log_scale = 0.0;
    let mut prev = 1.0_f64;
    let mut cur = if n == 0 { 1.0 } else { 2.0 * x };
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs();
        if mag > RESCALE_ABOVE {
            prev /= mag;
            cur /= mag;
            log_scale += mag.ln();
        }
    }
    if cur == 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    Ok((cur.abs().ln() + log_scale, cur.signum()))
}

/// Fills `out[k]` with the oscillator eigenfunction ψₖ(x) for k < out.len().
///
/// Uses the normalized recurrence
/// ψₖ₊₁ = √(2/(k+1)) x ψₖ − √(k/(k+1)) ψₖ₋₁, which never forms Hₙ or 2ⁿn!.
pub fn hermite_functions(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = PI_POW_NEG_QUARTER * (-0.5 * x * x).exp();
    if out.len() == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * x * out[0];
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Single oscillator eigenfunction ψₙ(x).
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    hermite_functions(x, &mut buf);
    buf[n]
}

/// ln(n!)
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Generalized Laguerre polynomial L_n^(alpha)(x) by forward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degree_values() {
        assert_eq!(hermite_eval(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite_eval(1, 0.5).unwrap(), 1.0);
        // H₂ = 4x² − 2
        assert_eq!(hermite_eval(2, 1.0).unwrap(), 2.0);
        // H₃ = 8x³ − 12x
        assert_relative_eq!(hermite_eval(3, 1.5).unwrap(), 8.0 * 3.375 - 18.0);
    }

    #[test]
    fn scaled_recurrence_matches_direct_branch() {
        for &x in &[-4.2, -0.3, 0.7, 2.5, 5.0] {
            for n in 0..=DIRECT_LIMIT {
                let direct = hermite_direct(n, x);
                let (ln_abs, sign) = hermite_ln_abs(n, x).unwrap();
                assert_relative_eq!(sign * ln_abs.exp(), direct, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn large_degree_is_finite_or_range_error() {
        // 2ⁿ grows fast but H_150(1) is still representable.
        assert!(hermite_eval(150, 1.0).unwrap().is_finite());
        assert!(matches!(hermite_eval(201, 0.0), Err(Error::Range { .. })));
        assert!(matches!(hermite_eval(200, 1e3), Err(Error::Range { .. })));
        assert!(matches!(hermite_eval(3, f64::NAN), Err(Error::Range { .. })));
    }

    #[test]
    fn hermite_functions_match_polynomial_form() {
        for &x in &[-3.0, -0.5, 0.0, 1.25, 4.0] {
            let mut psi = [0.0; 21];
            hermite_functions(x, &mut psi);
            for (n, &value) in psi.iter().enumerate() {
                let norm = (2f64.powi(n as i32) * ln_factorial(n).exp()).sqrt();
                let expected =
                    PI_POW_NEG_QUARTER * (-0.5 * x * x).exp() * hermite_eval(n, x).unwrap() / norm;
                assert!((value - expected).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn laguerre_closed_forms() {
        let x = 0.8;
        assert_eq!(laguerre(0, 2.0, x), 1.0);
        assert_relative_eq!(laguerre(1, 2.0, x), 3.0 - x);
        // L₂^(a)(x) = ((x² − 2(a+2)x + (a+1)(a+2)) / 2
        let a = 1.5;
        assert_relative_eq!(
            laguerre(2, a, x),
            (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0)) / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn ln_factorial_small() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert_relative_eq!(ln_factorial(5), 120f64.ln(), max_relative = 1e-14);
    }
}
