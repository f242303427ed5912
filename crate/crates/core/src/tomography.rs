//! Symplectic tomograms w(X|μ,ν): the probability density of X = μq + νp.
//!
//! Forward maps from wave functions and density matrices, closed forms for
//! Fock and Gaussian states, matrix elements of e^{i(X−μq−νp)} in the Fock
//! basis, and reconstruction of a density matrix from tomogram values.

use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2};
use std::io::Read;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::special_math::{
    gauss_hermite_rule, hermite_functions, integrate_interval_vec, integrate_line, laguerre, ln_factorial,
    AdaptiveConfig, LegendreRule, LineMethod,
};
use crate::states::{GaussianState, PureState, Wavefunction};

/// Below this |ν| the Fresnel kernel is replaced by its delta-function limit.
pub const NU_MIN: f64 = 1e-8;
/// Negative tomogram values down to this size are treated as quadrature noise.
pub const CLIP_TOL: f64 = 1e-12;
pub const MAX_WEYL_INDEX: usize = 64;
pub const MAX_RECONSTRUCTION_DIM: usize = 48;

static CLIPPED: AtomicU64 = AtomicU64::new(0);

/// Number of tomogram values clipped from small negatives to zero so far.
pub fn clipped_count() -> u64 {
    CLIPPED.load(Ordering::Relaxed)
}

fn clip(value: f64, error: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -CLIP_TOL.max(error) {
        CLIPPED.fetch_add(1, Ordering::Relaxed);
        Ok(0.0)
    } else {
        Err(Error::Accuracy {
            estimate: Complex64::new(value, 0.0),
            error,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFrame {
    pub mu: f64,
    pub nu: f64,
}

impl ReferenceFrame {
    pub fn new(mu: f64, nu: f64) -> Self {
        Self { mu, nu }
    }

    /// (cos θ, sin θ)
    pub fn unit(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    /// k frames (cos 2πj/k, sin 2πj/k).
    pub fn circle(k: usize) -> Vec<Self> {
        (0..k).map(|j| Self::unit(2.0 * PI * j as f64 / k as f64)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.nu.is_finite() || (self.mu == 0.0 && self.nu == 0.0) {
            return Err(Error::InvalidFrame {
                mu: self.mu,
                nu: self.nu,
            });
        }
        Ok(())
    }

    /// √(μ² + ν²)
    pub fn scale(&self) -> f64 {
        self.mu.hypot(self.nu)
    }

    /// Displacement amplitude β with e^{−i(μq+νp)} = D(β): β = (ν − iμ)/√2.
    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.nu, -self.mu) / SQRT_2
    }
}

/// Mean and variance of the normal law a Gaussian state's tomogram follows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTomogramParams {
    pub mean: f64,
    /// Variance, not standard deviation.
    pub sigma: f64,
}

impl GaussianTomogramParams {
    /// (2πσ)^{−1/2} exp(−(X − X̄)²/(2σ))
    pub fn density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        (-d * d / (2.0 * self.sigma)).exp() / (2.0 * PI * self.sigma).sqrt()
    }

    /// ∫ w(X) e^{iX} dX = e^{iX̄ − σ/2}
    pub fn characteristic(&self) -> Complex64 {
        Complex64::from_polar((-0.5 * self.sigma).exp(), self.mean)
    }
}

/// X̄ = [μ(B+B*) + iν(2AB* − 2A*B)] / (2(A+A*)), σ = |2Aν − iμ|² / (2(A+A*)).
pub fn gaussian_tomogram_params(g: &GaussianState, frame: &ReferenceFrame) -> Result<GaussianTomogramParams> {
    frame.validate()?;
    let (a, b) = (g.a, g.b);
    if !(a.re > 0.0) {
        return Err(Error::NonNormalizable { re_a: a.re });
    }
    let (mu, nu) = (frame.mu, frame.nu);
    let denom = 2.0 * (a + a.conj()).re;
    let i = Complex64::new(0.0, 1.0);
    let sigma = (2.0 * a * nu - i * mu).norm_sqr() / denom;
    let mean = (mu * (b + b.conj()) + i * nu * (2.0 * a * b.conj() - 2.0 * a.conj() * b)).re / denom;
    Ok(GaussianTomogramParams { mean, sigma })
}

/// w = ψₙ(X/s)²/s with s = √(μ² + ν²).
pub fn fock_tomogram(n: usize, x: f64, frame: &ReferenceFrame) -> Result<f64> {
    frame.validate()?;
    if n > crate::states::MAX_FOCK_INDEX {
        return Err(Error::range("Fock index", format!("n = {n}")));
    }
    let s = frame.scale();
    let mut buf = vec![0.0; n + 1];
    hermite_functions(x / s, &mut buf);
    Ok(buf[n] * buf[n] / s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TomogramMethod {
    /// Closed form when the state is Gaussian, quadrature otherwise.
    #[default]
    Auto,
    Quadrature,
}

/// w(X|μ,ν) = (1/2π|ν|) |∫ψ(y) exp(iμy²/(2ν) − iXy/ν) dy|²
pub fn tomogram_from_psi<W: Wavefunction + ?Sized>(psi: &W, x: f64, frame: &ReferenceFrame) -> Result<f64> {
    tomogram_from_psi_with(psi, x, frame, TomogramMethod::Auto)
}

pub fn tomogram_from_psi_with<W: Wavefunction + ?Sized>(
    psi: &W,
    x: f64,
    frame: &ReferenceFrame,
    method: TomogramMethod,
) -> Result<f64> {
    frame.validate()?;
    if method == TomogramMethod::Auto {
        if let Some(g) = psi.gaussian_form() {
            return Ok(gaussian_tomogram_params(&g, frame)?.density(x));
        }
    }
    let (mu, nu) = (frame.mu, frame.nu);
    if nu.abs() < NU_MIN {
        return Ok(psi.amplitude(x / mu).norm_sqr() / mu.abs());
    }
    let cfg = AdaptiveConfig {
        abs_tol: 1e-12,
        max_intervals: 20_000,
        initial_pieces: 16,
        ..AdaptiveConfig::default()
    }
    .centered(0.0, 2.0);
    let chirp = mu / (2.0 * nu);
    let shift = x / nu;
    let out = integrate_line(
        |y| psi.amplitude(y) * Complex64::from_polar(1.0, chirp * y * y - shift * y),
        &LineMethod::Adaptive(cfg),
    )?;
    let norm = 2.0 * PI * nu.abs();
    let amp = out.value.norm();
    let value = amp * amp / norm;
    clip(value, (2.0 * amp * out.error + out.error * out.error) / norm)
}

/// ⟨m|D(β)|n⟩ for D(β) = exp(βa† − β*a), via associated Laguerre polynomials.
pub fn displacement_element(m: usize, n: usize, beta: Complex64) -> Complex64 {
    let x = beta.norm_sqr();
    let (lo, hi, base) = if m >= n { (n, m, beta) } else { (m, n, -beta.conj()) };
    let k = hi - lo;
    let ln_pref = 0.5 * (ln_factorial(lo) - ln_factorial(hi)) - 0.5 * x;
    base.powi(k as i32) * ln_pref.exp() * laguerre(lo, k as f64, x)
}

/// ⟨n|e^{i(X−μq−νp)}|n′⟩ = e^{iX} ⟨n|D(β)|n′⟩ with β = (ν − iμ)/√2.
pub fn weyl_element(n: usize, np: usize, x: f64, frame: &ReferenceFrame) -> Result<Complex64> {
    check_weyl_indices(n, np)?;
    Ok(Complex64::from_polar(1.0, x) * displacement_element(n, np, frame.beta()))
}

/// The same element by direct quadrature:
/// e^{iX} e^{iμν/2} ∫ ψₙ(x) ψₙ′(x − ν) e^{−iμx} dx.
pub fn weyl_element_quadrature(n: usize, np: usize, x: f64, frame: &ReferenceFrame) -> Result<Complex64> {
    check_weyl_indices(n, np)?;
    let (mu, nu) = (frame.mu, frame.nu);
    let len = n.max(np) + 1;
    let cfg = AdaptiveConfig {
        abs_tol: 1e-13,
        max_intervals: 20_000,
        initial_pieces: 16,
        ..AdaptiveConfig::default()
    }
    .centered(0.5 * nu, 2.0);
    let out = integrate_line(
        |y| {
            let mut a = vec![0.0; len];
            let mut b = vec![0.0; len];
            hermite_functions(y, &mut a);
            hermite_functions(y - nu, &mut b);
            Complex64::from_polar(a[n] * b[np], -mu * y)
        },
        &LineMethod::Adaptive(cfg),
    )?;
    Ok(Complex64::from_polar(1.0, x + 0.5 * mu * nu) * out.value)
}

fn check_weyl_indices(n: usize, np: usize) -> Result<()> {
    if n > MAX_WEYL_INDEX || np > MAX_WEYL_INDEX {
        return Err(Error::range("Weyl element index", format!("({n}, {np}) exceeds {MAX_WEYL_INDEX}")));
    }
    Ok(())
}

/// The leading dim×dim block of D(β).
///
/// Each diagonal m − n = k is the sequence e^{−|β|²/2} √(n!/(n+k)!) β^k L_n^{(k)}(|β|²),
/// generated by the Laguerre recurrence with the prefactor folded in so the
/// iterates stay bounded.
pub fn displacement_matrix(dim: usize, beta: Complex64) -> DMatrix<Complex64> {
    let mut d = DMatrix::zeros(dim, dim);
    let x = beta.norm_sqr();
    let r = beta.norm();
    let phase = if r > 0.0 { beta / r } else { Complex64::new(1.0, 0.0) };
    let neg_conj_phase = -phase.conj();
    for k in 0..dim {
        let kf = k as f64;
        // u₀ = e^{−x/2} |β|^k / √k!
        let u0 = if k == 0 {
            (-0.5 * x).exp()
        } else if r == 0.0 {
            0.0
        } else {
            (kf * r.ln() - 0.5 * x - 0.5 * ln_factorial(k)).exp()
        };
        let ratio = |n: usize| ((n + 1) as f64 / (n + 1 + k) as f64).sqrt();
        let mut prev = 0.0;
        let mut cur = u0;
        let lower = phase.powi(k as i32);
        let upper = neg_conj_phase.powi(k as i32);
        for n in 0..dim - k {
            d[(n + k, n)] = lower * cur;
            if k > 0 {
                d[(n, n + k)] = upper * cur;
            }
            let nf = n as f64;
            let rn = ratio(n);
            let next = if n == 0 {
                (1.0 + kf - x) * cur * rn
            } else {
                ((2.0 * nf + 1.0 + kf - x) * cur * rn - (nf + kf) * prev * rn * ratio(n - 1)) / (nf + 1.0)
            };
            prev = cur;
            cur = next;
        }
    }
    d
}

/// Matrix of ⟨n|e^{−i(μq+νp)}|n′⟩ for n, n′ < dim (the e^{iX} factor omitted).
pub fn weyl_matrix(dim: usize, frame: &ReferenceFrame) -> Result<DMatrix<Complex64>> {
    if dim > MAX_WEYL_INDEX + 1 {
        return Err(Error::range("Weyl matrix dimension", format!("{dim}")));
    }
    Ok(displacement_matrix(dim, frame.beta()))
}

/// Tr[ρ D(β)]
fn trace_with_displacement(rho: &DMatrix<Complex64>, beta: Complex64) -> Complex64 {
    let d = displacement_matrix(rho.nrows(), beta);
    rho.iter().zip(d.transpose().iter()).map(|(r, dd)| r * dd).sum()
}

/// w(X|μ,ν) = Tr[ρ δ(X − μq − νp)] at one point.
pub fn tomogram_from_density(rho: &DensityMatrix, x: f64, frame: &ReferenceFrame) -> Result<f64> {
    Ok(tomogram_from_density_grid(rho, &[x], frame)?[0])
}

/// Tomogram of ρ at several X in one frame.
///
/// w(X) = (1/π) ∫₀^∞ Re[e^{ikX} χ(k)] dk with χ(k) = Tr[ρ D(kβ)]; χ is shared
/// across all X.
pub fn tomogram_from_density_grid(rho: &DensityMatrix, xs: &[f64], frame: &ReferenceFrame) -> Result<Vec<f64>> {
    frame.validate()?;
    rho.check_physical(1e-8)?;
    let dim = rho.dim();
    if dim > MAX_WEYL_INDEX + 1 {
        return Err(Error::range("truncation", format!("N = {dim}")));
    }
    let beta = frame.beta();
    // Past |kβ|² ≈ 2N the characteristic function decays like a Gaussian.
    let r_max = (2.0 * dim as f64).sqrt() + 8.0;
    let k_max = r_max / beta.norm();
    let cfg = AdaptiveConfig {
        abs_tol: 1e-12,
        max_intervals: 20_000,
        initial_pieces: 16,
        ..AdaptiveConfig::default()
    };
    let m = rho.matrix();
    let out = integrate_interval_vec(
        xs.len(),
        |k, buf| {
            let chi = trace_with_displacement(m, beta * k);
            for (o, &x) in buf.iter_mut().zip(xs) {
                *o = Complex64::from_polar(1.0, k * x) * chi;
            }
        },
        0.0,
        k_max,
        &cfg,
    )?;
    out.values
        .iter()
        .map(|v| clip(v.re / PI, out.error / PI))
        .collect()
}

/// Tomogram data sampled on a grid of frames, as read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalTomogram {
    frames: Vec<EmpiricalFrame>,
}

#[derive(Debug, Clone, PartialEq)]
struct EmpiricalFrame {
    frame: ReferenceFrame,
    xs: Vec<f64>,
    ws: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    #[serde(rename = "X")]
    x: f64,
    mu: f64,
    nu: f64,
    w: f64,
}

impl EmpiricalTomogram {
    /// Groups (X, μ, ν, w) samples by frame.
    pub fn from_samples(samples: impl IntoIterator<Item = (f64, f64, f64, f64)>) -> Result<Self> {
        let mut groups: BTreeMap<(u64, u64), Vec<(f64, f64)>> = BTreeMap::new();
        for (x, mu, nu, w) in samples {
            if ![x, mu, nu, w].iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput("non-finite tomogram sample".into()));
            }
            ReferenceFrame::new(mu, nu).validate()?;
            groups.entry((mu.to_bits(), nu.to_bits())).or_default().push((x, w));
        }
        if groups.is_empty() {
            return Err(Error::InvalidInput("tomogram grid is empty".into()));
        }
        let frames = groups
            .into_iter()
            .map(|((mu, nu), mut pts)| {
                pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                EmpiricalFrame {
                    frame: ReferenceFrame::new(f64::from_bits(mu), f64::from_bits(nu)),
                    xs: pts.iter().map(|p| p.0).collect(),
                    ws: pts.iter().map(|p| p.1).collect(),
                }
            })
            .collect();
        Ok(Self { frames })
    }

    /// Reads a CSV with header `X,mu,nu,w`; lines starting with `#` are comments.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<CsvRow>() {
            let r = rec.map_err(|e| Error::InvalidInput(format!("tomogram CSV: {e}")))?;
            rows.push((r.x, r.mu, r.nu, r.w));
        }
        Self::from_samples(rows)
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// Nearest stored frame by direction, rescaled by homogeneity, with linear
    /// interpolation in X; zero outside the sampled X range.
    pub fn evaluate(&self, x: f64, frame: &ReferenceFrame) -> Result<f64> {
        frame.validate()?;
        let angle = frame.nu.atan2(frame.mu);
        let mut best = (f64::INFINITY, 0usize, 1.0);
        for (i, f) in self.frames.iter().enumerate() {
            let a = f.frame.nu.atan2(f.frame.mu);
            for (sign, shift) in [(1.0, 0.0), (-1.0, PI)] {
                let d = angle_distance(angle, a + shift);
                if d < best.0 {
                    best = (d, i, sign);
                }
            }
        }
        let (_, i, sign) = best;
        let f = &self.frames[i];
        // frame ≈ λ·stored with λ = sign·s/s_stored, and w(X|λg) = w(X/λ|g)/|λ|.
        let lambda = sign * frame.scale() / f.frame.scale();
        Ok(interpolate(&f.xs, &f.ws, x / lambda) / lambda.abs())
    }
}

fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn interpolate(xs: &[f64], ws: &[f64], x: f64) -> f64 {
    if xs.len() == 1 {
        return if x == xs[0] { ws[0] } else { 0.0 };
    }
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    ws[k - 1] + t * (ws[k] - ws[k - 1])
}

/// A tomogram that can be evaluated at any (X, μ, ν).
#[derive(Clone)]
pub enum SymplecticTomogram {
    Gaussian(GaussianState),
    Fock(usize),
    Wavefunction(Arc<dyn Wavefunction>),
    Density(DensityMatrix),
    Empirical(EmpiricalTomogram),
}

impl std::fmt::Debug for SymplecticTomogram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Gaussian(g) => f.debug_tuple("Gaussian").field(g).finish(),
            Self::Fock(n) => f.debug_tuple("Fock").field(n).finish(),
            Self::Wavefunction(_) => f.write_str("Wavefunction(..)"),
            Self::Density(r) => f.debug_tuple("Density").field(&r.dim()).finish(),
            Self::Empirical(e) => f.debug_tuple("Empirical").field(&e.frame_count()).finish(),
        }
    }
}

impl SymplecticTomogram {
    pub fn evaluate(&self, x: f64, frame: &ReferenceFrame) -> Result<f64> {
        match self {
            Self::Gaussian(g) => Ok(gaussian_tomogram_params(g, frame)?.density(x)),
            Self::Fock(n) => fock_tomogram(*n, x, frame),
            Self::Wavefunction(psi) => tomogram_from_psi(psi.as_ref(), x, frame),
            Self::Density(rho) => tomogram_from_density(rho, x, frame),
            Self::Empirical(e) => e.evaluate(x, frame),
        }
    }

    pub fn evaluate_grid(&self, xs: &[f64], frame: &ReferenceFrame) -> Result<Vec<f64>> {
        match self {
            Self::Density(rho) => tomogram_from_density_grid(rho, xs, frame),
            Self::Wavefunction(_) => xs.par_iter().map(|&x| self.evaluate(x, frame)).collect(),
            _ => xs.iter().map(|&x| self.evaluate(x, frame)).collect(),
        }
    }
}

impl From<&PureState> for SymplecticTomogram {
    fn from(state: &PureState) -> Self {
        match state {
            PureState::Fock(n) => Self::Fock(*n),
            PureState::Gaussian(g) => Self::Gaussian(*g),
        }
    }
}

/// Gauss–Hermite grid on the X axis: nodes scaled to reach ±extent, weights
/// including the e^{x²} factor so that Σ wᵢ f(Xᵢ) ≈ ∫ f dX.
#[derive(Debug, Clone, PartialEq)]
pub struct XGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl XGrid {
    pub fn new(order: usize, extent: f64) -> Result<Self> {
        let rule = gauss_hermite_rule(order)?;
        let top = rule.nodes().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let scale = extent / top;
        Ok(Self {
            nodes: rule.nodes().iter().map(|&x| x * scale).collect(),
            weights: rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&x, &w)| w * (x * x).exp() * scale)
                .collect(),
        })
    }
}

/// F(s) = ∫ w(X | s cos θ, s sin θ) e^{iX} dX along one ray, for each s.
///
/// Closed forms are used for Gaussian, Fock and density-matrix tomograms; other
/// tomograms are sampled once on the unit frame and integrated on `grid`.
pub fn characteristic_on_ray(
    w: &SymplecticTomogram,
    theta: f64,
    radii: &[f64],
    grid: &XGrid,
) -> Result<Vec<Complex64>> {
    let unit = ReferenceFrame::unit(theta);
    match w {
        SymplecticTomogram::Gaussian(g) => {
            // X̄ is linear and σ quadratic in the frame.
            let p = gaussian_tomogram_params(g, &unit)?;
            Ok(radii
                .iter()
                .map(|&s| Complex64::from_polar((-0.5 * s * s * p.sigma).exp(), s * p.mean))
                .collect())
        }
        SymplecticTomogram::Fock(n) => Ok(radii
            .iter()
            .map(|&s| Complex64::new((-0.25 * s * s).exp() * laguerre(*n, 0.0, 0.5 * s * s), 0.0))
            .collect()),
        SymplecticTomogram::Density(rho) => {
            // ∫ w e^{iX} dX = Tr[ρ e^{i(μq+νp)}] = Tr[ρ D(−β)]
            let beta = unit.beta();
            Ok(radii
                .iter()
                .map(|&s| trace_with_displacement(rho.matrix(), -beta * s))
                .collect())
        }
        _ => {
            let vals = w.evaluate_grid(&grid.nodes, &unit)?;
            Ok(radii
                .iter()
                .map(|&s| {
                    grid.nodes
                        .iter()
                        .zip(&grid.weights)
                        .zip(&vals)
                        .map(|((&y, &wt), &v)| Complex64::from_polar(wt * v, s * y))
                        .sum()
                })
                .collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    /// Uniform angles on [0, 2π).
    pub theta_points: usize,
    /// Gauss–Hermite order of the X grid.
    pub x_order: usize,
    /// Half-width covered by the X grid; `None` picks √(2N+1) + 6.
    pub x_extent: Option<f64>,
    /// Radial integration always reaches at least this s.
    pub s_max: f64,
    /// Width and Gauss–Legendre order of each radial panel.
    pub panel_width: f64,
    pub panel_order: usize,
    /// Panels are appended past `s_max` until one contributes less than this.
    pub tail_tol: f64,
    pub s_cap: f64,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            theta_points: 64,
            x_order: 128,
            x_extent: None,
            s_max: 8.0,
            panel_width: 2.0,
            panel_order: 24,
            tail_tol: 1e-10,
            s_cap: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub rho: DensityMatrix,
    /// |Tr ρ − 1|
    pub trace_residual: f64,
    pub hermiticity_residual: f64,
    /// Radius the radial integral was carried to.
    pub s_reached: f64,
    /// Largest element contributed by the last radial panel.
    pub tail: f64,
}

pub fn density_from_tomogram(w: &SymplecticTomogram, dim: usize) -> Result<Reconstruction> {
    density_from_tomogram_with(w, dim, &ReconstructionConfig::default())
}

/// ⟨n|ρ|n′⟩ = (1/2π) ∫ w(X|μ,ν) ⟨n|e^{i(X−μq−νp)}|n′⟩ dX dμ dν.
///
/// In polar form (μ,ν) = s(cos θ, sin θ) homogeneity turns the X integral into
/// F(s,θ) = ∫ w(Y|θ) e^{isY} dY, so the tomogram is sampled only on unit frames.
pub fn density_from_tomogram_with(
    w: &SymplecticTomogram,
    dim: usize,
    cfg: &ReconstructionConfig,
) -> Result<Reconstruction> {
    if dim < 1 || dim > MAX_RECONSTRUCTION_DIM {
        return Err(Error::range("truncation", format!("N = {dim}, supported 1..={MAX_RECONSTRUCTION_DIM}")));
    }
    if cfg.theta_points == 0 || cfg.panel_order == 0 || !(cfg.panel_width > 0.0) {
        return Err(Error::InvalidInput("reconstruction grid is empty".into()));
    }
    let extent = cfg.x_extent.unwrap_or((2.0 * dim as f64 + 1.0).sqrt() + 6.0);
    let XGrid { nodes: ys, weights: yw } = XGrid::new(cfg.x_order, extent)?;

    let thetas: Vec<f64> = (0..cfg.theta_points)
        .map(|j| 2.0 * PI * j as f64 / cfg.theta_points as f64)
        .collect();
    let samples: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&th| w.evaluate_grid(&ys, &ReferenceFrame::unit(th)))
        .collect::<Result<_>>()?;

    let legendre = LegendreRule::new(cfg.panel_order)?;
    let d_theta = 2.0 * PI / cfg.theta_points as f64;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut a = 0.0;
    let mut tail;
    loop {
        let b = a + cfg.panel_width;
        let radial: Vec<(f64, f64)> = legendre.on_interval(a, b).collect();
        let parts: Vec<DMatrix<Complex64>> = thetas
            .par_iter()
            .zip(&samples)
            .map(|(&th, wy)| {
                let unit = ReferenceFrame::unit(th).beta();
                let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
                for &(s, ws) in &radial {
                    let f: Complex64 = ys
                        .iter()
                        .zip(&yw)
                        .zip(wy)
                        .map(|((&y, &wt), &val)| Complex64::from_polar(wt * val, s * y))
                        .sum();
                    let d = displacement_matrix(dim, unit * s);
                    acc += d * (f * (s * ws));
                }
                acc
            })
            .collect();
        let mut panel = DMatrix::<Complex64>::zeros(dim, dim);
        for p in &parts {
            panel += p;
        }
        panel *= Complex64::new(d_theta / (2.0 * PI), 0.0);
        tail = panel.iter().map(|z| z.norm()).fold(0.0, f64::max);
        rho += panel;
        a = b;
        if a >= cfg.s_max && tail < cfg.tail_tol {
            break;
        }
        if a >= cfg.s_cap {
            let partial = DensityMatrix::new(rho)?;
            return Err(Error::PartialResult {
                what: "radial reconstruction integral",
                residual: tail,
                partial: Box::new(partial),
            });
        }
    }
    let rho = DensityMatrix::new(rho)?;
    Ok(Reconstruction {
        trace_residual: (rho.trace() - 1.0).norm(),
        hermiticity_residual: rho.hermiticity_residual(),
        rho,
        s_reached: a,
        tail,
    })
}
