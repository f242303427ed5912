//! Quadrature over the real line and over finite intervals.
//!
//! Two routes are provided: fixed Gauss–Hermite rules (weight e^{-x²}) for
//! integrands that are a Gaussian envelope times something smooth, and an
//! adaptive Gauss–Kronrod (7/15) scheme that handles oscillatory phases by
//! bisecting wherever the local error estimate is largest. The line version
//! maps ℝ onto (−1, 1) with x = c + L·t/(1−t²).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// √π
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

pub const MAX_RULE_ORDER: usize = 256;

/// Gauss–Hermite rule for ∫ g(x) e^{-x²} dx ≈ Σ wᵢ g(xᵢ).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Σ wᵢ g(xᵢ), i.e. ∫ g(x) e^{-x²} dx.
    pub fn integrate_weighted<F>(&self, mut g: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| g(x) * w)
            .sum()
    }

    /// ∫ f(x) dx, treating f as e^{-x²}·(f e^{x²}).
    pub fn integrate<F>(&self, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        self.integrate_weighted(|x| f(x) * (x * x).exp())
    }
}

/// Gauss–Hermite nodes and weights, exact for polynomial degree ≤ 2·order−1.
///
/// Roots are found by Newton iteration on the normalized Hermite recurrence,
/// seeded with the usual asymptotic guesses for the largest roots.
pub fn gauss_hermite_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_RULE_ORDER {
        return Err(Error::range(
            "Gauss-Hermite order",
            format!("order = {order}, supported 1..={MAX_RULE_ORDER}"),
        ));
    }
    let n = order;
    let nf = n as f64;
    // Seeds: eigenvalues of the Jacobi matrix (Golub–Welsch).
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let off = (k as f64 / 2.0).sqrt();
        jacobi[(k, k - 1)] = off;
        jacobi[(k - 1, k)] = off;
    }
    let mut seeds: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    seeds.sort_by(f64::total_cmp);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (i, &seed) in seeds.iter().enumerate() {
        // Polish the nonnegative half and mirror it, so the rule is exactly symmetric.
        let mirror = n - 1 - i;
        if mirror < i {
            let z: f64 = nodes[mirror];
            nodes.push(-z);
            weights.push(weights[mirror]);
            continue;
        }
        let mut z = if mirror == i { 0.0 } else { seed };
        if mirror != i {
            for _ in 0..100 {
                let (p_n, p_nm1) = normalized_hermite_pair(n, z);
                let dz = p_n / ((2.0 * nf).sqrt() * p_nm1);
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
        }
        let (_, p_nm1) = normalized_hermite_pair(n, z);
        let deriv = (2.0 * nf).sqrt() * p_nm1;
        nodes.push(z);
        weights.push(2.0 / (deriv * deriv));
    }
    Ok(QuadratureRule { nodes, weights })
}

/// (p̃ₙ(z), p̃ₙ₋₁(z)) for Hermite polynomials normalized against e^{-x²}.
fn normalized_hermite_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = super::hermite::PI_POW_NEG_QUARTER;
    let mut p2 = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}

/// Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LegendreRule {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > MAX_RULE_ORDER {
            return Err(Error::range(
                "Gauss-Legendre order",
                format!("order = {order}, supported 1..={MAX_RULE_ORDER}"),
            ));
        }
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            for _ in 0..100 {
                let (p1, p2) = legendre_pair(n, z);
                let dz = p1 / (nf * (z * p1 - p2) / (z * z - 1.0));
                z -= dz;
                if dz.abs() <= 1e-16 {
                    break;
                }
            }
            let (p1, p2) = legendre_pair(n, z);
            let pp = nf * (z * p1 - p2) / (z * z - 1.0);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }
}

fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

/// Settings for the adaptive Gauss–Kronrod integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
    /// Centre of the line map x = center + scale·t/(1−t²).
    pub center: f64,
    pub scale: f64,
    /// Number of equal pieces (−1, 1) is cut into before adapting.
    pub initial_pieces: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
            center: 0.0,
            scale: 1.0,
            initial_pieces: 8,
        }
    }
}

impl AdaptiveConfig {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn centered(mut self, center: f64, scale: f64) -> Self {
        self.center = center;
        self.scale = scale;
        self
    }
}

/// How `integrate_line` should evaluate ∫ f over ℝ.
#[derive(Debug, Clone)]
pub enum LineMethod {
    Rule(QuadratureRule),
    Adaptive(AdaptiveConfig),
}

impl Default for LineMethod {
    fn default() -> Self {
        LineMethod::Adaptive(AdaptiveConfig::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineIntegral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorIntegral {
    pub values: Vec<Complex64>,
    pub error: f64,
    pub evaluations: usize,
}

/// ∫ f(x) dx over the whole real line.
///
/// With a fixed rule the error estimate is the difference against a rule of
/// roughly half the order.
pub fn integrate_line<F>(f: F, method: &LineMethod) -> Result<LineIntegral>
where
    F: Fn(f64) -> Complex64,
{
    match method {
        LineMethod::Rule(rule) => {
            let value = rule.integrate(&f);
            let coarse = gauss_hermite_rule(rule.order() / 2 + 1)?;
            let error = (value - coarse.integrate(&f)).norm();
            Ok(LineIntegral {
                value,
                error,
                evaluations: rule.order() + coarse.order(),
            })
        }
        LineMethod::Adaptive(cfg) => {
            let out = integrate_line_vec(1, |x, out| out[0] = f(x), cfg)?;
            Ok(LineIntegral {
                value: out.values[0],
                error: out.error,
                evaluations: out.evaluations,
            })
        }
    }
}

/// Vector-valued ∫ f(x) dx over ℝ. `f` writes `dim` components into its buffer.
pub fn integrate_line_vec<F>(dim: usize, f: F, cfg: &AdaptiveConfig) -> Result<VectorIntegral>
where
    F: Fn(f64, &mut [Complex64]),
{
    let (center, scale) = (cfg.center, cfg.scale);
    let mapped = |t: f64, out: &mut [Complex64]| {
        let d = 1.0 - t * t;
        let x = center + scale * t / d;
        let jac = scale * (1.0 + t * t) / (d * d);
        f(x, out);
        for v in out.iter_mut() {
            *v *= jac;
        }
    };
    adaptive(dim, mapped, -1.0, 1.0, cfg)
}

/// ∫ₐᵇ f(x) dx with the adaptive scheme.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, cfg: &AdaptiveConfig) -> Result<LineIntegral>
where
    F: Fn(f64) -> Complex64,
{
    let out = adaptive(1, |x, out: &mut [Complex64]| out[0] = f(x), a, b, cfg)?;
    Ok(LineIntegral {
        value: out.values[0],
        error: out.error,
        evaluations: out.evaluations,
    })
}

/// Vector-valued ∫ₐᵇ f(x) dx.
pub fn integrate_interval_vec<F>(
    dim: usize,
    f: F,
    a: f64,
    b: f64,
    cfg: &AdaptiveConfig,
) -> Result<VectorIntegral>
where
    F: Fn(f64, &mut [Complex64]),
{
    adaptive(dim, f, a, b, cfg)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    a: f64,
    b: f64,
    values: Vec<Complex64>,
    error: f64,
}

fn kronrod<F>(dim: usize, f: &F, a: f64, b: f64, buf: &mut [Complex64]) -> Piece
where
    F: Fn(f64, &mut [Complex64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    let mut gauss = vec![Complex64::new(0.0, 0.0); dim];
    // Keep samples for the resasc estimate.
    let mut samples: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(15);

    f(center, buf);
    for k in 0..dim {
        kron[k] += buf[k] * WGK[7];
        gauss[k] += buf[k] * WG[3];
    }
    samples.push((WGK[7], buf.to_vec()));
    for j in 0..7 {
        let dx = half * XGK[j];
        for x in [center - dx, center + dx] {
            f(x, buf);
            for k in 0..dim {
                kron[k] += buf[k] * WGK[j];
                if j % 2 == 1 {
                    gauss[k] += buf[k] * WG[j / 2];
                }
            }
            samples.push((WGK[j], buf.to_vec()));
        }
    }
    let mut error: f64 = 0.0;
    for k in 0..dim {
        let mean = kron[k] * 0.5;
        let resasc: f64 = samples.iter().map(|(w, s)| w * (s[k] - mean).norm()).sum::<f64>() * half.abs();
        let raw = ((kron[k] - gauss[k]) * half).norm();
        let est = if resasc > 0.0 && raw > 0.0 {
            resasc * (200.0 * raw / resasc).powf(1.5).min(1.0)
        } else {
            raw
        };
        error = error.max(est);
    }
    for v in kron.iter_mut() {
        *v *= half;
    }
    Piece {
        a,
        b,
        values: kron,
        error,
    }
}

fn adaptive<F>(dim: usize, f: F, a: f64, b: f64, cfg: &AdaptiveConfig) -> Result<VectorIntegral>
where
    F: Fn(f64, &mut [Complex64]),
{
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let pieces0 = cfg.initial_pieces.max(1);
    let width = (b - a) / pieces0 as f64;
    let mut pieces: Vec<Piece> = (0..pieces0)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == pieces0 { b } else { lo + width };
            kronrod(dim, &f, lo, hi, &mut buf)
        })
        .collect();
    let mut evaluations = 15 * pieces0;

    loop {
        let mut total = vec![Complex64::new(0.0, 0.0); dim];
        let mut err = 0.0;
        for p in &pieces {
            for k in 0..dim {
                total[k] += p.values[k];
            }
            err += p.error;
        }
        let scale = total.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let target = cfg.abs_tol.max(cfg.rel_tol * scale);
        if !err.is_finite() || total.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Accuracy {
                estimate: total[0],
                error: f64::INFINITY,
            });
        }
        if err <= target {
            return Ok(VectorIntegral {
                values: total,
                error: err,
                evaluations,
            });
        }
        if pieces.len() >= cfg.max_intervals {
            return Err(Error::Accuracy {
                estimate: total[0],
                error: err,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one piece");
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Accuracy {
                estimate: total[0],
                error: err,
            });
        }
        pieces.push(kronrod(dim, &f, p.a, mid, &mut buf));
        pieces.push(kronrod(dim, &f, mid, p.b, &mut buf));
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn one_and_two_point_rules() {
        let r1 = gauss_hermite_rule(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert_abs_diff_eq!(r1.weights()[0], SQRT_PI, epsilon = 1e-14);

        let r2 = gauss_hermite_rule(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(r2.nodes()[0], -s, epsilon = 1e-14);
        assert_abs_diff_eq!(r2.nodes()[1], s, epsilon = 1e-14);
        for &w in r2.weights() {
            assert_abs_diff_eq!(w, SQRT_PI / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rule_order_range() {
        assert!(gauss_hermite_rule(0).is_err());
        assert!(gauss_hermite_rule(257).is_err());
    }

    #[test]
    fn rules_are_sorted_positive_and_normalized() {
        for order in [1, 2, 3, 7, 16, 33, 64, 100, 128, 200, 256] {
            let rule = gauss_hermite_rule(order).unwrap();
            assert!(rule.nodes().windows(2).all(|p| p[0] < p[1]), "order {order}");
            assert!(rule.weights().iter().all(|&w| w > 0.0), "order {order}");
            let total: f64 = rule.weights().iter().sum();
            assert!((total - SQRT_PI).abs() < 1e-12, "order {order}: {total}");
        }
    }

    #[test]
    fn rule_is_exact_on_even_moments() {
        // ∫ x^{2k} e^{-x²} dx = Γ(k+½) = (2k−1)!!/2^k √π
        let rule = gauss_hermite_rule(10).unwrap();
        let mut expected = SQRT_PI;
        for k in 0..10 {
            let got = rule.integrate_weighted(|x| c(x.powi(2 * k as i32))).re;
            assert!((got - expected).abs() < 1e-10 * expected.max(1.0), "k={k}");
            expected *= (2 * k + 1) as f64 / 2.0;
        }
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let rule = LegendreRule::new(8).unwrap();
        let sum: f64 = rule.weights().iter().sum();
        assert_abs_diff_eq!(sum, 2.0, epsilon = 1e-14);
        let int: f64 = rule.on_interval(0.0, 2.0).map(|(x, w)| w * x.powi(15)).sum();
        assert_abs_diff_eq!(int, 2f64.powi(16) / 16.0, epsilon = 1e-9);
    }

    #[test]
    fn adaptive_line_examples() {
        let m = LineMethod::default();
        let g = integrate_line(|x| c((-x * x).exp()), &m).unwrap();
        assert_abs_diff_eq!(g.value.re, SQRT_PI, epsilon = 1e-10);

        let ph = integrate_line(|x| Complex64::new(-x * x, x).exp(), &m).unwrap();
        assert_abs_diff_eq!(ph.value.re, SQRT_PI * (-0.25f64).exp(), epsilon = 1e-8);
        assert_abs_diff_eq!(ph.value.im, 0.0, epsilon = 1e-8);

        let odd = integrate_line(|x| c(x * (-x * x).exp()), &m).unwrap();
        assert_abs_diff_eq!(odd.value.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fixed_rule_line_integral() {
        let m = LineMethod::Rule(gauss_hermite_rule(40).unwrap());
        let ph = integrate_line(|x| Complex64::new(-x * x, x).exp(), &m).unwrap();
        assert_abs_diff_eq!(ph.value.re, SQRT_PI * (-0.25f64).exp(), epsilon = 1e-12);
        assert!(ph.error < 1e-8);
    }

    #[test]
    fn fast_phase_needs_subdivision() {
        // ∫ e^{-x²} e^{i 30 x} dx = √π e^{-225}
        let out = integrate_line(|x| Complex64::new(-x * x, 30.0 * x).exp(), &LineMethod::default()).unwrap();
        assert!(out.value.norm() < 1e-10);
    }

    #[test]
    fn non_convergence_reports_best_estimate() {
        let cfg = AdaptiveConfig {
            max_intervals: 10,
            ..AdaptiveConfig::default()
        };
        let err = integrate_interval(|x| c((1.0 / x.max(1e-300)).sin()), 0.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }
}
