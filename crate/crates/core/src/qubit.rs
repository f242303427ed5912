//! Single-qubit states as three spin-projection probabilities.
//!
//! A qubit density matrix is fixed by the probabilities p₁, p₂, p₃ of
//! finding spin projection +½ along three orthogonal axes:
//!
//! ```text
//! ρ = | p₃                       (p₁−½) − i(p₂−½) |
//!     | (p₁−½) + i(p₂−½)         1 − p₃           |
//! ```
//!
//! Physical states fill the ball (p₁−½)² + (p₂−½)² + (p₃−½)² ≤ ¼, whose
//! surface holds the pure states.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for ball membership and purity.
pub const BALL_TOL: f64 = 1e-9;

const HALF: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitProbabilities {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl QubitProbabilities {
    /// Checks that each entry is a probability; the ball condition is not checked here.
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2), ("p3", p3)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidState(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        Ok(Self { p1, p2, p3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.p1, self.p2, self.p3]
    }

    /// (p₁−½)² + (p₂−½)² + (p₃−½)²
    pub fn ball_radius_sq(&self) -> f64 {
        (self.p1 - HALF).powi(2) + (self.p2 - HALF).powi(2) + (self.p3 - HALF).powi(2)
    }

    pub fn in_ball(&self, tol: f64) -> bool {
        self.ball_radius_sq() <= 0.25 + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn in_ball(&self, tol: f64) -> bool {
        self.x * self.x + self.y * self.y + self.z * self.z <= 1.0 + tol
    }
}

/// 2×2 qubit density matrix, index 0 ↔ spin up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensityMatrix(pub Matrix2<Complex64>);

impl QubitDensityMatrix {
    /// Validates Hermiticity, unit trace and ρ₁₁ρ₂₂ − |ρ₁₂|² ≥ 0 to within `tol`.
    pub fn new(m: Matrix2<Complex64>, tol: f64) -> Result<Self> {
        let herm = (m[(0, 1)] - m[(1, 0)].conj()).norm().max(m[(0, 0)].im.abs()).max(m[(1, 1)].im.abs());
        if herm > tol {
            return Err(Error::InvalidState(format!("matrix is not Hermitian (residual {herm:e})")));
        }
        let tr = m[(0, 0)].re + m[(1, 1)].re;
        if (tr - 1.0).abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from one")));
        }
        let det = m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr();
        if det < -tol {
            return Err(Error::InvalidState(format!(
                "determinant {det:e} is negative (rho11 rho22 - |rho12|^2 >= 0 violated)"
            )));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitAngles {
    /// Azimuth in [0, 2π).
    pub phi: f64,
    /// Polar angle in [0, π].
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateClass {
    Interior,
    PureSurface,
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: StateClass,
    /// Tr ρ² = ½ + 2s, s the squared distance from the ball centre.
    pub purity: f64,
    pub radius_sq: f64,
}

/// Builds ρ from (p₁, p₂, p₃); fails if the point lies outside the ball.
pub fn density_from_probs(p: &QubitProbabilities) -> Result<QubitDensityMatrix> {
    density_from_probs_tol(p, BALL_TOL)
}

pub fn density_from_probs_tol(p: &QubitProbabilities, tol: f64) -> Result<QubitDensityMatrix> {
    let s = p.ball_radius_sq();
    if s > 0.25 + tol {
        return Err(Error::InvalidState(format!(
            "(p1-1/2)^2+(p2-1/2)^2+(p3-1/2)^2 = {s} exceeds 1/4"
        )));
    }
    Ok(QubitDensityMatrix(raw_density(p)))
}

/// The matrix of the map without any validity check.
pub fn raw_density(p: &QubitProbabilities) -> Matrix2<Complex64> {
    let lower = Complex64::new(p.p1 - HALF, p.p2 - HALF);
    Matrix2::new(
        Complex64::new(p.p3, 0.0),
        lower.conj(),
        lower,
        Complex64::new(1.0 - p.p3, 0.0),
    )
}

pub fn probs_from_density(rho: &QubitDensityMatrix) -> Result<QubitProbabilities> {
    let m = rho.0;
    let lower = m[(1, 0)];
    QubitProbabilities::new(lower.re + HALF, lower.im + HALF, m[(0, 0)].re)
}

pub fn bloch_from_probs(p: &QubitProbabilities) -> BlochVector {
    BlochVector {
        x: 2.0 * p.p1 - 1.0,
        y: 2.0 * p.p2 - 1.0,
        z: 2.0 * p.p3 - 1.0,
    }
}

pub fn probs_from_bloch(b: &BlochVector) -> Result<QubitProbabilities> {
    QubitProbabilities::new((b.x + 1.0) / 2.0, (b.y + 1.0) / 2.0, (b.z + 1.0) / 2.0)
}

pub fn classify_state(p: &QubitProbabilities) -> Classification {
    classify_state_tol(p, BALL_TOL)
}

pub fn classify_state_tol(p: &QubitProbabilities, tol: f64) -> Classification {
    let s = p.ball_radius_sq();
    let class = if s > 0.25 + tol {
        StateClass::Invalid
    } else if (s - 0.25).abs() <= tol {
        StateClass::PureSurface
    } else {
        StateClass::Interior
    };
    Classification {
        class,
        purity: 0.5 + 2.0 * s,
        radius_sq: s,
    }
}

/// Azimuth from (cos φ, sin φ) ∝ (p₁−½, p₂−½) and cos θ = (p₃−½)/√s.
pub fn angles_from_probs(p: &QubitProbabilities) -> Result<QubitAngles> {
    let tol = BALL_TOL;
    let (dx, dy, dz) = (p.p1 - HALF, p.p2 - HALF, p.p3 - HALF);
    let radius = (dx * dx + dy * dy + dz * dz).sqrt();
    if radius < tol {
        return Err(Error::UndefinedAngle("state at the ball centre has no direction"));
    }
    let rho = (dx * dx + dy * dy).sqrt();
    if rho < tol {
        return Err(Error::UndefinedAngle("azimuth undefined on the polar axis"));
    }
    let mut phi = dy.atan2(dx);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    if phi >= 2.0 * PI {
        phi = 0.0;
    }
    let theta = (dz / radius).clamp(-1.0, 1.0).acos();
    Ok(QubitAngles { phi, theta })
}

/// Unit direction (sin θ cos φ, sin θ sin φ, cos θ).
pub fn direction_from_angles(a: &QubitAngles) -> [f64; 3] {
    [
        a.theta.sin() * a.phi.cos(),
        a.theta.sin() * a.phi.sin(),
        a.theta.cos(),
    ]
}

/// State vector of a pure qubit with nonnegative real first component.
pub fn pure_state_vector(p: &QubitProbabilities) -> Result<[Complex64; 2]> {
    let class = classify_state(p);
    if class.class != StateClass::PureSurface {
        return Err(Error::Domain(format!(
            "state is not pure (squared radius {} vs 1/4)",
            class.radius_sq
        )));
    }
    if p.p3 <= BALL_TOL {
        return Err(Error::Domain("p3 vanishes; first amplitude cannot carry the gauge".into()));
    }
    // Moduli from the diagonal, relative phase from the coherence; dividing the
    // coherence by √p3 would amplify rounding when p3 is small.
    let lower = Complex64::new(p.p1 - HALF, p.p2 - HALF);
    let lower_mod = (1.0 - p.p3).max(0.0).sqrt();
    let lower = if lower.norm() > 0.0 {
        lower * (lower_mod / lower.norm())
    } else {
        Complex64::new(lower_mod, 0.0)
    };
    Ok([Complex64::new(p.p3.sqrt(), 0.0), lower])
}

/// |ψ(t₁)⟩⟨ψ(t₂)| for two pure states given by their probabilities.
pub fn two_time_matrix(p_t1: &QubitProbabilities, p_t2: &QubitProbabilities) -> Result<Matrix2<Complex64>> {
    let a = pure_state_vector(p_t1)?;
    let b = pure_state_vector(p_t2)?;
    Ok(Matrix2::new(
        a[0] * b[0].conj(),
        a[0] * b[1].conj(),
        a[1] * b[0].conj(),
        a[1] * b[1].conj(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(p1: f64, p2: f64, p3: f64) -> QubitProbabilities {
        QubitProbabilities::new(p1, p2, p3).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_examples() {
        let mixed = density_from_probs(&p(0.5, 0.5, 0.5)).unwrap();
        assert_eq!(mixed.0, Matrix2::new(c(0.5, 0.), c(0., 0.), c(0., 0.), c(0.5, 0.)));
        let up = density_from_probs(&p(0.5, 0.5, 1.0)).unwrap();
        assert_eq!(up.0, Matrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)));
        let plus = density_from_probs(&p(1.0, 0.5, 0.5)).unwrap();
        assert_eq!(plus.0, Matrix2::new(c(0.5, 0.), c(0.5, 0.), c(0.5, 0.), c(0.5, 0.)));
    }

    #[test]
    fn ball_violation_is_named() {
        let err = density_from_probs(&p(1.0, 1.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("exceeds 1/4"));
    }

    #[test]
    fn probs_examples() {
        let half = QubitDensityMatrix::new(Matrix2::new(c(0.5, 0.), c(0., 0.), c(0., 0.), c(0.5, 0.)), 1e-12).unwrap();
        assert_eq!(probs_from_density(&half).unwrap(), p(0.5, 0.5, 0.5));
        let down = QubitDensityMatrix::new(Matrix2::new(c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)), 1e-12).unwrap();
        assert_eq!(probs_from_density(&down).unwrap(), p(0.5, 0.5, 0.0));
        let y = QubitDensityMatrix::new(Matrix2::new(c(0.5, 0.), c(0., -0.5), c(0., 0.5), c(0.5, 0.)), 1e-12).unwrap();
        assert_eq!(probs_from_density(&y).unwrap(), p(0.5, 1.0, 0.5));
    }

    #[test]
    fn invalid_density_inputs() {
        let non_herm = Matrix2::new(c(0.5, 0.), c(0.1, 0.), c(0.2, 0.), c(0.5, 0.));
        assert!(QubitDensityMatrix::new(non_herm, 1e-12).is_err());
        let bad_trace = Matrix2::new(c(0.7, 0.), c(0., 0.), c(0., 0.), c(0.5, 0.));
        assert!(QubitDensityMatrix::new(bad_trace, 1e-12).is_err());
    }

    #[test]
    fn bloch_examples() {
        assert_eq!(bloch_from_probs(&p(0.5, 0.5, 0.5)), BlochVector { x: 0., y: 0., z: 0. });
        let b = bloch_from_probs(&p(0.8, 0.5, 0.5));
        assert!((b.x - 0.6).abs() < 1e-15 && b.y == 0.0 && b.z == 0.0);
        let outside = bloch_from_probs(&p(1.0, 1.0, 1.0));
        assert_eq!(outside, BlochVector { x: 1., y: 1., z: 1. });
        assert!(!outside.in_ball(BALL_TOL));
        assert!(!p(1.0, 1.0, 1.0).in_ball(BALL_TOL));
    }

    #[test]
    fn classification_examples() {
        let up = classify_state(&p(0.5, 0.5, 1.0));
        assert_eq!(up.class, StateClass::PureSurface);
        assert!((up.purity - 1.0).abs() < 1e-15);
        let centre = classify_state(&p(0.5, 0.5, 0.5));
        assert_eq!(centre.class, StateClass::Interior);
        assert_eq!(centre.purity, 0.5);
        let tilted = classify_state(&p(0.9, 0.5, 0.5));
        assert_eq!(tilted.class, StateClass::Interior);
        assert!((tilted.purity - 0.82).abs() < 1e-12);
        assert_eq!(classify_state(&p(1.0, 1.0, 0.5)).class, StateClass::Invalid);
    }

    #[test]
    fn angle_examples() {
        let a = angles_from_probs(&p(1.0, 0.5, 0.5)).unwrap();
        assert!(a.phi.abs() < 1e-15 && (a.theta - PI / 2.0).abs() < 1e-15);
        let b = angles_from_probs(&p(0.5, 1.0, 0.5)).unwrap();
        assert!((b.phi - PI / 2.0).abs() < 1e-15 && (b.theta - PI / 2.0).abs() < 1e-15);
        assert!(matches!(angles_from_probs(&p(0.5, 0.5, 1.0)), Err(Error::UndefinedAngle(_))));
        let c3 = angles_from_probs(&p(0.5, 0.2, 0.5)).unwrap();
        assert!((c3.phi - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn two_time_examples() {
        let up = p(0.5, 0.5, 1.0);
        let m = two_time_matrix(&up, &up).unwrap();
        assert_eq!(m, Matrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)));

        let x = p(1.0, 0.5, 0.5);
        let m = two_time_matrix(&x, &x).unwrap();
        assert!((m - raw_density(&x)).norm() < 1e-15);

        let y = p(0.5, 1.0, 0.5);
        let xy = two_time_matrix(&x, &y).unwrap();
        let yx = two_time_matrix(&y, &x).unwrap();
        assert!((xy[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((xy - yx.adjoint()).norm() < 1e-15);
        // Oracle: ψx = (1, 1)/√2, ψy = (1, i)/√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi_x = [c(s, 0.), c(s, 0.)];
        let psi_y = [c(s, 0.), c(0., s)];
        for i in 0..2 {
            for j in 0..2 {
                assert!((xy[(i, j)] - psi_x[i] * psi_y[j].conj()).norm() < 1e-15);
            }
        }
        // Trace is ⟨ψ(t₂)|ψ(t₁)⟩.
        let overlap: Complex64 = (0..2).map(|k| psi_y[k].conj() * psi_x[k]).sum();
        assert!((xy.trace() - overlap).norm() < 1e-15);
    }

    #[test]
    fn two_time_rejects_mixed_and_down() {
        assert!(matches!(two_time_matrix(&p(0.5, 0.5, 0.5), &p(0.5, 0.5, 1.0)), Err(Error::Domain(_))));
        assert!(matches!(two_time_matrix(&p(0.5, 0.5, 0.0), &p(0.5, 0.5, 1.0)), Err(Error::Domain(_))));
    }

    fn pure_point() -> impl Strategy<Value = QubitProbabilities> {
        (0.0..PI, 0.0..2.0 * PI).prop_map(|(theta, phi)| {
            let d = direction_from_angles(&QubitAngles { phi, theta });
            QubitProbabilities {
                p1: 0.5 + 0.5 * d[0],
                p2: 0.5 + 0.5 * d[1],
                p3: 0.5 + 0.5 * d[2],
            }
        })
    }

    proptest! {
        #[test]
        fn roundtrip_through_density(r in 0.0..0.5f64, theta in 0.0..PI, phi in 0.0..2.0 * PI) {
            let d = direction_from_angles(&QubitAngles { phi, theta });
            let q = QubitProbabilities::new(0.5 + r * d[0], 0.5 + r * d[1], 0.5 + r * d[2]).unwrap();
            let back = probs_from_density(&density_from_probs(&q).unwrap()).unwrap();
            // p − ½ + ½ is exact to one rounding.
            prop_assert!((back.p1 - q.p1).abs() <= f64::EPSILON);
            prop_assert!((back.p2 - q.p2).abs() <= f64::EPSILON);
            prop_assert_eq!(back.p3, q.p3);
        }

        #[test]
        fn roundtrip_exact_on_dyadic_grid(a in 0u32..=1024, b in 0u32..=1024, c3 in 0u32..=1024) {
            let q = QubitProbabilities::new(a as f64 / 1024.0, b as f64 / 1024.0, c3 as f64 / 1024.0).unwrap();
            prop_assume!(q.in_ball(0.0));
            let back = probs_from_density(&density_from_probs(&q).unwrap()).unwrap();
            prop_assert_eq!(back, q);
        }

        #[test]
        fn pure_bloch_vectors_are_unit(q in pure_point()) {
            prop_assert!((bloch_from_probs(&q).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn angles_rebuild_direction(q in pure_point()) {
            prop_assume!(((q.p1 - 0.5).powi(2) + (q.p2 - 0.5).powi(2)).sqrt() > 1e-6);
            let a = angles_from_probs(&q).unwrap();
            let d = direction_from_angles(&a);
            let r = q.ball_radius_sq().sqrt();
            prop_assert!((d[0] - (q.p1 - 0.5) / r).abs() < 1e-10);
            prop_assert!((d[1] - (q.p2 - 0.5) / r).abs() < 1e-10);
            prop_assert!((d[2] - (q.p3 - 0.5) / r).abs() < 1e-10);
        }

        #[test]
        fn equal_time_matrix_is_density(q in pure_point()) {
            prop_assume!(q.p3 > 1e-6);
            let m = two_time_matrix(&q, &q).unwrap();
            prop_assert!((m - raw_density(&q)).norm() < 1e-12);
        }
    }
}
