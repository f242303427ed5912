//! Transition probabilities |⟨ψ₁|ψ₂⟩|² by three routes: the Born overlap,
//! the double-tomogram integral, and the Gaussian closed reduction of the latter.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_math::{gauss_hermite_rule, integrate_line, AdaptiveConfig, LegendreRule, LineMethod};
use crate::states::{GaussianState, PureState, StateSpec, Wavefunction};
use crate::tomography::{
    characteristic_on_ray, gaussian_tomogram_params, ReferenceFrame, SymplecticTomogram, XGrid,
};

/// Probabilities this far outside [0, 1] are clipped; further is an error.
pub const CLIP_TOL: f64 = 1e-8;
/// Largest tolerated imaginary part of the tomographic integral.
pub const IMAG_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionMethod {
    Born,
    Tomographic,
    GaussianClosed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub probability: f64,
    pub method: TransitionMethod,
    /// Estimated numerical error.
    pub error: f64,
    /// Value before clipping to [0, 1].
    pub raw: f64,
    /// Imaginary part of the integral (zero for the Born route).
    pub imag_residual: f64,
}

fn finish(method: TransitionMethod, value: Complex64, error: f64) -> Result<TransitionResult> {
    let raw = value.re;
    if !(-CLIP_TOL..=1.0 + CLIP_TOL).contains(&raw) || !raw.is_finite() {
        return Err(Error::Accuracy { estimate: value, error });
    }
    Ok(TransitionResult {
        probability: raw.clamp(0.0, 1.0),
        method,
        error,
        raw,
        imag_residual: value.im,
    })
}

/// p = |∫ψ₁*ψ₂ dx|² for two state descriptions.
pub fn born_probability(spec1: &StateSpec, spec2: &StateSpec) -> Result<TransitionResult> {
    born_probability_states(&spec1.resolve()?, &spec2.resolve()?)
}

/// Born rule on resolved states; Gaussian and Fock pairs are done in closed form.
pub fn born_probability_states(a: &PureState, b: &PureState) -> Result<TransitionResult> {
    let (amp, error) = match (a, b) {
        (PureState::Fock(n), PureState::Fock(m)) => (Complex64::new(if n == m { 1.0 } else { 0.0 }, 0.0), 0.0),
        (PureState::Gaussian(g1), PureState::Gaussian(g2)) => {
            (g1.overlap(g2) / (g1.norm_sqr() * g2.norm_sqr()).sqrt(), 0.0)
        }
        _ => {
            let cfg = AdaptiveConfig::default().with_abs_tol(1e-13);
            let out = integrate_line(
                |x| a.amplitude(x).conj() * b.amplitude(x),
                &LineMethod::Adaptive(cfg),
            )?;
            (out.value, out.error)
        }
    };
    let p = amp.norm_sqr();
    finish(TransitionMethod::Born, Complex64::new(p, 0.0), 2.0 * amp.norm() * error + error * error)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographicConfig {
    /// Uniform angles on [0, 2π); must be even so θ + π is on the grid.
    pub theta_points: usize,
    /// The radial integral always reaches at least this s.
    pub s_max: f64,
    pub panel_width: f64,
    pub panel_order: usize,
    pub tail_tol: f64,
    pub s_cap: f64,
    /// X grid for tomograms without a closed-form characteristic function.
    pub x_order: usize,
    pub x_extent: f64,
}

impl Default for TomographicConfig {
    fn default() -> Self {
        Self {
            theta_points: 256,
            s_max: 10.0,
            panel_width: 2.0,
            panel_order: 24,
            tail_tol: 1e-12,
            s_cap: 40.0,
            x_order: 128,
            x_extent: 14.0,
        }
    }
}

pub fn tomographic_transition(w1: &SymplecticTomogram, w2: &SymplecticTomogram) -> Result<TransitionResult> {
    tomographic_transition_with(w1, w2, &TomographicConfig::default())
}

/// p = (1/2π) ∫ w₁(X|μ,ν) w₂(Y|−μ,−ν) e^{i(X+Y)} dX dY dμ dν.
///
/// The X and Y integrals are characteristic functions F₁(μ,ν), F₂(−μ,−ν);
/// the remaining (μ,ν) integral is done in polar form, radial panels being
/// added past `s_max` until their contribution drops below `tail_tol`.
pub fn tomographic_transition_with(
    w1: &SymplecticTomogram,
    w2: &SymplecticTomogram,
    cfg: &TomographicConfig,
) -> Result<TransitionResult> {
    let nt = cfg.theta_points;
    if nt < 4 || nt % 2 != 0 {
        return Err(Error::InvalidInput(format!("theta grid must be even and >= 4, got {nt}")));
    }
    let grid = XGrid::new(cfg.x_order, cfg.x_extent)?;
    let legendre = LegendreRule::new(cfg.panel_order)?;
    let thetas: Vec<f64> = (0..nt).map(|j| 2.0 * PI * j as f64 / nt as f64).collect();
    let d_theta = 2.0 * PI / nt as f64;

    let mut total = Complex64::new(0.0, 0.0);
    // Same sum over every other angle, for an error estimate.
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    let mut tail;
    loop {
        let b = a + cfg.panel_width;
        let nodes: Vec<(f64, f64)> = legendre.on_interval(a, b).collect();
        let radii: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let f1: Vec<Vec<Complex64>> = thetas
            .par_iter()
            .map(|&th| characteristic_on_ray(w1, th, &radii, &grid))
            .collect::<Result<_>>()?;
        let f2: Vec<Vec<Complex64>> = thetas
            .par_iter()
            .map(|&th| characteristic_on_ray(w2, th, &radii, &grid))
            .collect::<Result<_>>()?;
        let mut panel = Complex64::new(0.0, 0.0);
        let mut panel_coarse = Complex64::new(0.0, 0.0);
        for j in 0..nt {
            // (−μ, −ν) is the ray θ + π.
            let opp = (j + nt / 2) % nt;
            let ray: Complex64 = nodes
                .iter()
                .enumerate()
                .map(|(k, &(s, ws))| f1[j][k] * f2[opp][k] * (s * ws))
                .sum();
            panel += ray;
            if j % 2 == 0 {
                panel_coarse += ray;
            }
        }
        panel *= d_theta / (2.0 * PI);
        panel_coarse *= 2.0 * d_theta / (2.0 * PI);
        total += panel;
        coarse += panel_coarse;
        tail = panel.norm();
        a = b;
        if a >= cfg.s_max && tail < cfg.tail_tol {
            break;
        }
        if a >= cfg.s_cap {
            return Err(Error::Accuracy {
                estimate: total,
                error: tail,
            });
        }
    }
    let error = tail + (total - coarse).norm();
    if total.im.abs() > IMAG_TOL {
        return Err(Error::Accuracy { estimate: total, error });
    }
    finish(TransitionMethod::Tomographic, total, error)
}

/// Mean vector and covariance of a Gaussian state's tomographic quadratures,
/// read off the tomogram parameters in three frames.
fn tomographic_moments(g: &GaussianState) -> Result<(Vector2<f64>, Matrix2<f64>)> {
    let px = gaussian_tomogram_params(g, &ReferenceFrame::new(1.0, 0.0))?;
    let pp = gaussian_tomogram_params(g, &ReferenceFrame::new(0.0, 1.0))?;
    let pd = gaussian_tomogram_params(g, &ReferenceFrame::new(1.0, 1.0))?;
    let cov = 0.5 * (pd.sigma - px.sigma - pp.sigma);
    Ok((
        Vector2::new(px.mean, pp.mean),
        Matrix2::new(px.sigma, cov, cov, pp.sigma),
    ))
}

/// Gaussian pairs: the X and Y integrals of the double-tomogram formula reduce
/// to exp(i vᵀ(m₁ − m₂) − ½ vᵀ(Σ₁ + Σ₂) v) with v = (μ, ν), integrated by a
/// tensor Gauss–Hermite rule after whitening by Σ₁ + Σ₂.
pub fn gaussian_transition(g1: &GaussianState, g2: &GaussianState) -> Result<TransitionResult> {
    for g in [g1, g2] {
        if !(g.a.re > 0.0) {
            return Err(Error::InvalidState(format!("Gaussian with Re A = {} is not normalizable", g.a.re)));
        }
    }
    let (m1, s1) = tomographic_moments(g1)?;
    let (m2, s2) = tomographic_moments(g2)?;
    let q = s1 + s2;
    let d = m1 - m2;
    let chol = q
        .cholesky()
        .ok_or_else(|| Error::InvalidState("quadrature covariance is not positive definite".into()))?;
    let l = chol.l();
    let det_l = l[(0, 0)] * l[(1, 1)];
    // v = √2 L⁻ᵀ u turns ½ vᵀQv into |u|².
    let lt_inv = l
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::InvalidState("singular quadrature covariance".into()))?;
    let map = lt_inv * 2f64.sqrt();
    let c = map.transpose() * d;
    let integrate = |order: usize| -> Result<Complex64> {
        let rule = gauss_hermite_rule(order)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&u1, &w1) in rule.nodes().iter().zip(rule.weights()) {
            for (&u2, &w2) in rule.nodes().iter().zip(rule.weights()) {
                acc += Complex64::from_polar(w1 * w2, c[0] * u1 + c[1] * u2);
            }
        }
        // d²v = (2 / det L) d²u, and the overall 1/(2π).
        Ok(acc * (2.0 / det_l) / (2.0 * PI))
    };
    let fine = integrate(64)?;
    let rough = integrate(48)?;
    finish(TransitionMethod::GaussianClosed, fine, (fine - rough).norm())
}

/// Smallest c with |F₁(v) F₂(−v)| ≤ e^{−c|v|²}, measured on rays at s = 4, 6, 8.
pub fn gaussian_integrand_decay(g1: &GaussianState, g2: &GaussianState) -> Result<f64> {
    let w1 = SymplecticTomogram::Gaussian(*g1);
    let w2 = SymplecticTomogram::Gaussian(*g2);
    let grid = XGrid::new(16, 8.0)?;
    let radii = [4.0, 6.0, 8.0];
    let mut c = f64::INFINITY;
    for j in 0..64 {
        let th = 2.0 * PI * j as f64 / 64.0;
        let a = characteristic_on_ray(&w1, th, &radii, &grid)?;
        let b = characteristic_on_ray(&w2, th + PI, &radii, &grid)?;
        for (k, &s) in radii.iter().enumerate() {
            c = c.min(-(a[k] * b[k]).norm().ln() / (s * s));
        }
    }
    Ok(c)
}
