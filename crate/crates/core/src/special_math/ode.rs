//! Fixed-step classical Runge–Kutta for complex vector fields.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sampled solution of y' = f(t, y).
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
    pub step: f64,
}

impl OdeSolution {
    pub fn last(&self) -> (f64, &[Complex64]) {
        let i = self.times.len() - 1;
        (self.times[i], &self.values[i])
    }
}

/// Integrates y' = rhs(t, y) from `t_span.0` to `t_span.1`, recording every step.
///
/// `rhs(t, y, dy)` writes the derivative into `dy`. The last step is shortened
/// so the grid ends exactly at `t_span.1`.
pub fn ode_solve<F>(rhs: F, y0: &[Complex64], t_span: (f64, f64), step: f64) -> Result<OdeSolution>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    ode_solve_sampled(rhs, y0, t_span, step, 1)
}

/// As [`ode_solve`] but keeps only every `record_every`-th step (plus the end point).
pub fn ode_solve_sampled<F>(
    mut rhs: F,
    y0: &[Complex64],
    t_span: (f64, f64),
    step: f64,
    record_every: usize,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let (t0, t1) = t_span;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("ODE step must be positive, got {step}")));
    }
    if !(t1 >= t0) {
        return Err(Error::InvalidInput(format!("ODE span ({t0}, {t1}) is reversed")));
    }
    let record_every = record_every.max(1);
    let n = y0.len();
    let mut stepper = Rk4::new(n);
    let mut y = y0.to_vec();
    let mut times = vec![t0];
    let mut values = vec![y.clone()];

    let span = t1 - t0;
    let full_steps = (span / step).floor() as usize;
    // Avoid a sliver step from rounding of span/step.
    let (full_steps, tail) = {
        let rem = span - full_steps as f64 * step;
        if rem < 1e-12 * step {
            (full_steps, 0.0)
        } else {
            (full_steps, rem)
        }
    };
    let total = full_steps + usize::from(tail > 0.0);

    let mut t = t0;
    for k in 0..total {
        let h = if k < full_steps { step } else { tail };
        stepper.step(&mut rhs, t, &mut y, h);
        t = if k + 1 == total { t1 } else { t0 + (k + 1) as f64 * step };
        if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Divergence {
                last_finite_time: *times.last().expect("nonempty"),
            });
        }
        if (k + 1) % record_every == 0 || k + 1 == total {
            times.push(t);
            values.push(y.clone());
        }
    }
    Ok(OdeSolution { times, values, step })
}

/// Scratch buffers for one RK4 step.
pub(crate) struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub(crate) fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    pub(crate) fn step<F>(&mut self, rhs: &mut F, t: f64, y: &mut [Complex64], h: f64)
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let half = 0.5 * h;
        rhs(t, y, &mut self.k1);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + self.k1[i] * half;
        }
        rhs(t + half, &self.tmp, &mut self.k2);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + self.k2[i] * half;
        }
        rhs(t + half, &self.tmp, &mut self.k3);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + self.k3[i] * h;
        }
        rhs(t + h, &self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for i in 0..y.len() {
            y[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * sixth;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn rotation_error(step: f64) -> f64 {
        let sol = ode_solve(|_, y, dy| dy[0] = I * y[0], &[Complex64::new(1.0, 0.0)], (0.0, PI), step).unwrap();
        (sol.last().1[0] + 1.0).norm()
    }

    #[test]
    fn unit_rotation_reaches_minus_one() {
        assert!(rotation_error(1e-3) < 1e-8);
    }

    #[test]
    fn constant_field_is_exact() {
        let c = Complex64::new(0.3, -1.7);
        let sol = ode_solve(|_, _, dy| dy[0] = Complex64::new(0.0, 0.0), &[c], (0.0, 2.0), 0.1).unwrap();
        assert!(sol.values.iter().all(|v| v[0] == c));
        assert_eq!(sol.times[0], 0.0);
        assert_eq!(*sol.times.last().unwrap(), 2.0);
        assert_eq!(sol.times.len(), sol.values.len());
    }

    #[test]
    fn second_order_oscillator() {
        // ε̈ + ε = 0, ε(0)=1, ε̇(0)=i → ε = e^{it}
        let sol = ode_solve(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[Complex64::new(1.0, 0.0), I],
            (0.0, PI / 2.0),
            1e-3,
        )
        .unwrap();
        assert!((sol.last().1[0] - I).norm() < 1e-8);
    }

    #[test]
    fn fourth_order_convergence() {
        let coarse = rotation_error(0.1);
        let fine = rotation_error(0.05);
        assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn divergence_is_reported() {
        let err = ode_solve(|_, y, dy| dy[0] = y[0] * y[0], &[Complex64::new(1.0, 0.0)], (0.0, 2.0), 1e-2).unwrap_err();
        match err {
            Error::Divergence { last_finite_time } => assert!(last_finite_time > 0.9 && last_finite_time < 1.1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sampled_keeps_endpoint() {
        let sol = ode_solve_sampled(|_, y, dy| dy[0] = I * y[0], &[Complex64::new(1.0, 0.0)], (0.0, 1.0), 0.03, 10).unwrap();
        assert_eq!(*sol.times.last().unwrap(), 1.0);
        assert_eq!(sol.times.len(), sol.values.len());
    }
}
