//! Wave functions of oscillator states in the position representation
//! (ħ = m = ω = 1): Fock, coherent, generic Gaussian and the vacuum of an
//! oscillator with time-dependent frequency.
//!
//! These are the conventional-representation references that the
//! probability-representation code is checked against.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::special_math::{
    hermite_functions, integrate_line, integrate_line_vec, ln_factorial, ode_solve, AdaptiveConfig,
    LineMethod,
};

pub const MAX_FOCK_INDEX: usize = 100;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Anything that can be evaluated as ψ(x).
pub trait Wavefunction: Send + Sync {
    fn amplitude(&self, x: f64) -> Complex64;

    /// Closed Gaussian form e^{−Ax²+Bx+C}, when the state has one.
    fn gaussian_form(&self) -> Option<GaussianState> {
        None
    }
}

impl<F> Wavefunction for F
where
    F: Fn(f64) -> Complex64 + Send + Sync,
{
    fn amplitude(&self, x: f64) -> Complex64 {
        self(x)
    }
}

/// ψₙ(x) = e^{−x²/2} Hₙ(x) / (π^{1/4} √(2ⁿ n!))
pub fn fock_psi(n: usize, x: f64) -> Result<f64> {
    if n > MAX_FOCK_INDEX {
        return Err(Error::range("Fock index", format!("n = {n} exceeds {MAX_FOCK_INDEX}")));
    }
    let mut buf = vec![0.0; n + 1];
    hermite_functions(x, &mut buf);
    Ok(buf[n])
}

/// ψ_α(x) = π^{−1/4} exp(−x²/2 − |α|²/2 + √2 α x − α²/2)
pub fn coherent_psi(alpha: Complex64, x: f64) -> Complex64 {
    GaussianState::coherent(alpha).amplitude(x)
}

/// ⟨n|α⟩ = e^{−|α|²/2} αⁿ / √n!
pub fn coherent_amplitude(alpha: Complex64, n: usize) -> Complex64 {
    let r = alpha.norm();
    if r == 0.0 {
        return if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    let ln_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * ln_factorial(n);
    Complex64::from_polar(ln_mag.exp(), n as f64 * alpha.arg())
}

/// ψ(x) = exp(−A x² + B x + C) with Re A > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    #[serde(with = "complex_pair")]
    pub a: Complex64,
    #[serde(with = "complex_pair")]
    pub b: Complex64,
    #[serde(with = "complex_pair")]
    pub c: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianStats {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// Symmetrized covariance ½⟨{x − x̄, p − p̄}⟩.
    pub cov_xp: f64,
    /// Correlation coefficient σ_xp / (δx δp).
    pub r: f64,
}

impl GaussianState {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        if !(a.re > 0.0) {
            return Err(Error::NonNormalizable { re_a: a.re });
        }
        Ok(Self { a, b, c })
    }

    /// Normalized state with the given A and B (C fixed by normalization, zero phase).
    pub fn normalized_from(a: Complex64, b: Complex64) -> Result<Self> {
        Self::new(a, b, Complex64::new(0.0, 0.0))?.normalize()
    }

    pub fn vacuum() -> Self {
        Self {
            a: Complex64::new(0.5, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(-0.25 * PI.ln(), 0.0),
        }
    }

    /// The coherent state |α⟩: A = ½, B = √2α, C = −|α|²/2 − α²/2 − ¼ ln π.
    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            a: Complex64::new(0.5, 0.0),
            b: alpha * std::f64::consts::SQRT_2,
            c: -0.5 * alpha.norm_sqr() - 0.5 * alpha * alpha - 0.25 * PI.ln(),
        }
    }

    /// Sets Re C so that ∫|ψ|² = 1; Im C (global phase) is left alone.
    pub fn normalize(&self) -> Result<Self> {
        let ra = self.a.re;
        if !(ra > 0.0) {
            return Err(Error::NonNormalizable { re_a: ra });
        }
        let rb = self.b.re;
        let re_c = -0.25 * (PI / (2.0 * ra)).ln() - rb * rb / (4.0 * ra);
        Ok(Self {
            c: Complex64::new(re_c, self.c.im),
            ..*self
        })
    }

    /// ∫|ψ|² dx in closed form.
    pub fn norm_sqr(&self) -> f64 {
        let ra = self.a.re;
        (PI / (2.0 * ra)).sqrt() * (self.b.re * self.b.re / (2.0 * ra) + 2.0 * self.c.re).exp()
    }

    /// Closed-form first and second moments (assumes a normalized state).
    pub fn stats(&self) -> GaussianStats {
        let (a, b) = (self.a, self.b);
        let mean_x = b.re / (2.0 * a.re);
        let mean_p = b.im - 2.0 * a.im * mean_x;
        let var_x = 1.0 / (4.0 * a.re);
        let var_p = a.norm_sqr() / a.re;
        let cov_xp = -a.im / (2.0 * a.re);
        GaussianStats {
            mean_x,
            mean_p,
            var_x,
            var_p,
            cov_xp,
            r: cov_xp / (var_x * var_p).sqrt(),
        }
    }

    /// ∫ ψ₁*(x) ψ₂(x) dx for two Gaussians, by completing the square.
    pub fn overlap(&self, other: &GaussianState) -> Complex64 {
        let a = self.a.conj() + other.a;
        let b = self.b.conj() + other.b;
        let c = self.c.conj() + other.c;
        (PI / a).sqrt() * (b * b / (4.0 * a) + c).exp()
    }
}

impl Wavefunction for GaussianState {
    fn amplitude(&self, x: f64) -> Complex64 {
        (-self.a * x * x + self.b * x + self.c).exp()
    }

    fn gaussian_form(&self) -> Option<GaussianState> {
        Some(*self)
    }
}

pub fn gaussian_psi(g: &GaussianState, x: f64) -> Complex64 {
    g.amplitude(x)
}

pub fn gaussian_stats(g: &GaussianState) -> GaussianStats {
    g.stats()
}

/// Frequency ω(t) of a parametric oscillator; ω(0) must equal 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrequencyProfile {
    Constant {
        omega: f64,
    },
    /// ω = omegas[k] on [times[k−1], times[k]), with times[−1] = 0.
    Steps {
        times: Vec<f64>,
        omegas: Vec<f64>,
    },
    /// ω(t) = 1 + depth·sin(rate·t)
    Modulated {
        depth: f64,
        rate: f64,
    },
}

impl FrequencyProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            FrequencyProfile::Constant { omega } => {
                if *omega != 1.0 {
                    return Err(Error::InvalidInput(format!("omega(0) must be 1, got {omega}")));
                }
            }
            FrequencyProfile::Steps { times, omegas } => {
                if omegas.len() != times.len() + 1 {
                    return Err(Error::InvalidInput(format!(
                        "step profile needs one more frequency than break times ({} vs {})",
                        omegas.len(),
                        times.len()
                    )));
                }
                if omegas[0] != 1.0 {
                    return Err(Error::InvalidInput(format!("omega(0) must be 1, got {}", omegas[0])));
                }
                if times.first().is_some_and(|&t| t <= 0.0) || times.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidInput("break times must be positive and increasing".into()));
                }
                if omegas.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidInput("frequencies must be finite".into()));
                }
            }
            FrequencyProfile::Modulated { depth, rate } => {
                if !depth.is_finite() || !rate.is_finite() {
                    return Err(Error::InvalidInput("modulation parameters must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn omega(&self, t: f64) -> f64 {
        match self {
            FrequencyProfile::Constant { omega } => *omega,
            FrequencyProfile::Steps { times, omegas } => {
                let k = times.partition_point(|&b| b <= t);
                omegas[k]
            }
            FrequencyProfile::Modulated { depth, rate } => 1.0 + depth * (rate * t).sin(),
        }
    }

    /// Discontinuities of ω strictly inside (0, t_end).
    fn breaks_before(&self, t_end: f64) -> Vec<f64> {
        match self {
            FrequencyProfile::Steps { times, .. } => times.iter().copied().filter(|&b| b < t_end).collect(),
            _ => Vec::new(),
        }
    }
}

/// ε(t) solving ε̈ + ω²(t) ε = 0 with ε(0) = 1, ε̇(0) = i, on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricSolution {
    pub profile: FrequencyProfile,
    pub times: Vec<f64>,
    pub eps: Vec<Complex64>,
    pub eps_dot: Vec<Complex64>,
    /// arg ε(t), unwrapped continuously from 0.
    pub phase: Vec<f64>,
}

impl ParametricSolution {
    /// ε̇ε* − εε̇* at grid index k; equals 2i for an exact solution.
    pub fn wronskian(&self, k: usize) -> Complex64 {
        self.eps_dot[k] * self.eps[k].conj() - self.eps[k] * self.eps_dot[k].conj()
    }

    pub fn max_wronskian_drift(&self) -> f64 {
        (0..self.times.len())
            .map(|k| (self.wronskian(k) - 2.0 * I).norm())
            .fold(0.0, f64::max)
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("nonempty grid")
    }

    /// (ε, ε̇, unwrapped arg ε) at time t.
    ///
    /// Off the grid, ε and ε̇ come from cubic Hermite interpolation using
    /// ε̈ = −ω²ε; the interpolation error is O(h⁴) in the grid step h.
    pub fn at(&self, t: f64) -> Result<(Complex64, Complex64, f64)> {
        let t_end = self.t_end();
        let slack = 1e-12 * t_end.max(1.0);
        if t < -slack || t > t_end + slack {
            return Err(Error::range("time", format!("t = {t} outside [0, {t_end}]")));
        }
        let k = self.times.partition_point(|&s| s < t - slack);
        let k = k.min(self.times.len() - 1);
        if (self.times[k] - t).abs() <= slack {
            return Ok((self.eps[k], self.eps_dot[k], self.phase[k]));
        }
        // t lies in (times[k−1], times[k]).
        let (i0, i1) = (k - 1, k);
        let (t0, t1) = (self.times[i0], self.times[i1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let nudge = 1e-9 * h;
        let acc0 = -self.profile.omega(t0 + nudge).powi(2) * self.eps[i0];
        let acc1 = -self.profile.omega(t1 - nudge).powi(2) * self.eps[i1];
        let eps = hermite_cubic(self.eps[i0], self.eps_dot[i0], self.eps[i1], self.eps_dot[i1], h, s);
        let eps_dot = hermite_cubic(self.eps_dot[i0], acc0, self.eps_dot[i1], acc1, h, s);
        let phase = unwrap_near(eps.arg(), self.phase[i0]);
        Ok((eps, eps_dot, phase))
    }

    /// The vacuum ψ₀(x, t) written as e^{−Ax²+C}: A = −iε̇/(2ε), C = −¼ ln π − ½ ln ε.
    pub fn gaussian_at(&self, t: f64) -> Result<GaussianState> {
        let (eps, eps_dot, phase) = self.at(t)?;
        if eps.norm() < 1e-300 {
            return Err(Error::Domain(format!("epsilon vanishes at t = {t}")));
        }
        let a = -I * eps_dot / (2.0 * eps);
        let c = Complex64::new(-0.25 * PI.ln() - 0.5 * eps.norm().ln(), -0.5 * phase);
        GaussianState::new(a, Complex64::new(0.0, 0.0), c)
    }
}

fn hermite_cubic(y0: Complex64, d0: Complex64, y1: Complex64, d1: Complex64, h: f64, s: f64) -> Complex64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    y0 * h00 + d0 * (h10 * h) + y1 * h01 + d1 * (h11 * h)
}

fn unwrap_near(angle: f64, reference: f64) -> f64 {
    let two_pi = 2.0 * PI;
    angle + two_pi * ((reference - angle) / two_pi).round()
}

/// Integrates the classical oscillator equation for ε(t) on [0, t_end].
///
/// Frequency steps are placed on the grid so each RK4 segment sees a smooth ω.
pub fn epsilon_solve(profile: &FrequencyProfile, t_end: f64, step: f64) -> Result<ParametricSolution> {
    profile.validate()?;
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!("t_end must be nonnegative, got {t_end}")));
    }
    let mut bounds = vec![0.0];
    bounds.extend(profile.breaks_before(t_end));
    bounds.push(t_end);

    let mut times = vec![0.0];
    let mut eps = vec![Complex64::new(1.0, 0.0)];
    let mut eps_dot = vec![I];
    for seg in bounds.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let y0 = [*eps.last().expect("nonempty"), *eps_dot.last().expect("nonempty")];
        // ω is evaluated strictly inside the segment so a step at `a` is seen from the right.
        let inside = |t: f64| t.clamp(a + 1e-12 * (b - a), b - 1e-12 * (b - a));
        let sol = ode_solve(
            |t, y, dy| {
                let w = profile.omega(inside(t));
                dy[0] = y[1];
                dy[1] = -w * w * y[0];
            },
            &y0,
            (a, b),
            step,
        )?;
        for (t, v) in sol.times.iter().zip(&sol.values).skip(1) {
            times.push(*t);
            eps.push(v[0]);
            eps_dot.push(v[1]);
        }
    }
    let mut phase = Vec::with_capacity(eps.len());
    let mut prev = 0.0;
    for e in &eps {
        prev = unwrap_near(e.arg(), prev);
        phase.push(prev);
    }
    Ok(ParametricSolution {
        profile: profile.clone(),
        times,
        eps,
        eps_dot,
        phase,
    })
}

/// ψ₀(x, t) = π^{−1/4} ε^{−1/2} exp(i ε̇ x² / (2ε)), with the branch of ε^{−1/2}
/// following the unwrapped phase of ε.
pub fn parametric_vacuum_psi(sol: &ParametricSolution, t: f64, x: f64) -> Result<Complex64> {
    let (eps, eps_dot, phase) = sol.at(t)?;
    let mag = eps.norm();
    if mag < 1e-300 {
        return Err(Error::Domain(format!("epsilon vanishes at t = {t}")));
    }
    let inv_sqrt = Complex64::from_polar(mag.powf(-0.5), -0.5 * phase);
    Ok(crate::special_math::hermite::PI_POW_NEG_QUARTER * inv_sqrt * (I * eps_dot * x * x / (2.0 * eps)).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParametricDensity {
    pub rho: DensityMatrix,
    /// 1 − Σ ρₙₙ
    pub truncation_residual: f64,
    /// Set when the residual exceeds 1e-6.
    pub truncated: bool,
}

pub const MAX_PARAMETRIC_TRUNCATION: usize = 64;

/// Fock-basis density matrix of the parametric vacuum at time t.
///
/// ρₙₙ′ = cₙ cₙ′* with cₙ = ∫ ψₙ(x) ψ₀(x, t) dx.
pub fn parametric_density_matrix(sol: &ParametricSolution, t: f64, dim: usize) -> Result<ParametricDensity> {
    if dim == 0 || dim > MAX_PARAMETRIC_TRUNCATION {
        return Err(Error::range("truncation", format!("N = {dim}, supported 1..={MAX_PARAMETRIC_TRUNCATION}")));
    }
    let g = sol.gaussian_at(t)?;
    let amps = fock_overlaps(&g, dim)?;
    let rho = DensityMatrix::projector(&amps);
    let trace: f64 = (0..dim).map(|n| rho.get(n, n).re).sum();
    let residual = 1.0 - trace;
    Ok(ParametricDensity {
        rho,
        truncation_residual: residual,
        truncated: residual > 1e-6,
    })
}

/// cₙ = ∫ ψₙ(x) ψ(x) dx for n < dim, by adaptive quadrature.
pub fn fock_overlaps<W: Wavefunction + ?Sized>(psi: &W, dim: usize) -> Result<Vec<Complex64>> {
    let cfg = AdaptiveConfig::default().with_abs_tol(1e-12);
    let out = integrate_line_vec(
        dim,
        |x, buf| {
            let mut h = vec![0.0; buf.len()];
            hermite_functions(x, &mut h);
            let p = psi.amplitude(x);
            for (o, hn) in buf.iter_mut().zip(h) {
                *o = p * hn;
            }
        },
        &cfg,
    )?;
    Ok(out.values)
}

/// ∫ |ψ|² dx by adaptive quadrature.
pub fn norm_by_quadrature<W: Wavefunction + ?Sized>(psi: &W) -> Result<f64> {
    Ok(integrate_line(|x| Complex64::new(psi.amplitude(x).norm_sqr(), 0.0), &LineMethod::default())?
        .value
        .re)
}

/// A pure state described in a JSON-friendly way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Fock {
        n: usize,
    },
    Coherent {
        #[serde(with = "complex_pair")]
        alpha: Complex64,
    },
    Gaussian {
        #[serde(rename = "A", with = "complex_pair")]
        a: Complex64,
        #[serde(rename = "B", with = "complex_pair")]
        b: Complex64,
    },
    ParametricVacuum {
        profile: FrequencyProfile,
        t: f64,
        #[serde(default = "default_parametric_step")]
        step: f64,
    },
}

fn default_parametric_step() -> f64 {
    1e-3
}

impl StateSpec {
    pub fn resolve(&self) -> Result<PureState> {
        match self {
            StateSpec::Fock { n } => {
                if *n > MAX_FOCK_INDEX {
                    return Err(Error::range("Fock index", format!("n = {n} exceeds {MAX_FOCK_INDEX}")));
                }
                Ok(PureState::Fock(*n))
            }
            StateSpec::Coherent { alpha } => Ok(PureState::Gaussian(GaussianState::coherent(*alpha))),
            StateSpec::Gaussian { a, b } => Ok(PureState::Gaussian(GaussianState::normalized_from(*a, *b)?)),
            StateSpec::ParametricVacuum { profile, t, step } => {
                let sol = Arc::new(epsilon_solve(profile, *t, *step)?);
                Ok(PureState::Gaussian(sol.gaussian_at(*t)?))
            }
        }
    }
}

/// A resolved pure state.
#[derive(Debug, Clone, PartialEq)]
pub enum PureState {
    Fock(usize),
    Gaussian(GaussianState),
}

impl PureState {
    /// Amplitudes ⟨n|ψ⟩ for n < dim.
    pub fn fock_amplitudes(&self, dim: usize) -> Result<Vec<Complex64>> {
        match self {
            PureState::Fock(n) => {
                if *n >= dim {
                    return Err(Error::range("Fock index", format!("n = {n} with truncation {dim}")));
                }
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[*n] = Complex64::new(1.0, 0.0);
                Ok(v)
            }
            PureState::Gaussian(g) => fock_overlaps(g, dim),
        }
    }

    pub fn density_matrix(&self, dim: usize) -> Result<DensityMatrix> {
        Ok(DensityMatrix::projector(&self.fock_amplitudes(dim)?))
    }
}

impl Wavefunction for PureState {
    fn amplitude(&self, x: f64) -> Complex64 {
        match self {
            PureState::Fock(n) => {
                let mut buf = vec![0.0; n + 1];
                hermite_functions(x, &mut buf);
                Complex64::new(buf[*n], 0.0)
            }
            PureState::Gaussian(g) => g.amplitude(x),
        }
    }

    fn gaussian_form(&self) -> Option<GaussianState> {
        match self {
            PureState::Gaussian(g) => Some(*g),
            PureState::Fock(0) => Some(GaussianState::vacuum()),
            PureState::Fock(_) => None,
        }
    }
}

/// Serializes a complex number as `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}
