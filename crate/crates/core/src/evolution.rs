//! Time evolution in the coin-probability representation.
//!
//! The von Neumann equation i dρ/dt = [H, ρ] is integrated directly, and its
//! image under the coin chart is an affine flow dΠ/dt = MΠ + γ on the vector
//! Π = (p₃⁽⁰⁰⁾ … p₃⁽ᴺ⁻²ᴺ⁻²⁾, p₁⁽⁰¹⁾, p₂⁽⁰¹⁾, p₁⁽⁰²⁾, p₂⁽⁰²⁾, …).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin_rep::{coherent_coin_closed_form, CoinValue};
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::special_math::{ode_solve_sampled, OdeSolution};

const HERMITIAN_TOL: f64 = 1e-12;
const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

type HamiltonianFn = dyn Fn(f64) -> DMatrix<Complex64> + Send + Sync;

/// H(t) as a Hermitian matrix in a fixed basis.
#[derive(Clone)]
pub enum HamiltonianMatrix {
    Constant(DMatrix<Complex64>),
    TimeDependent { dim: usize, h: Arc<HamiltonianFn> },
}

impl std::fmt::Debug for HamiltonianMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(m) => f.debug_tuple("Constant").field(m).finish(),
            Self::TimeDependent { dim, .. } => f.debug_struct("TimeDependent").field("dim", dim).finish(),
        }
    }
}

fn hermiticity_residual(m: &DMatrix<Complex64>) -> f64 {
    m.iter()
        .zip(m.adjoint().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

impl HamiltonianMatrix {
    pub fn constant(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidInput("Hamiltonian must be square and nonempty".into()));
        }
        let r = hermiticity_residual(&m);
        if r > HERMITIAN_TOL {
            return Err(Error::InvalidInput(format!("Hamiltonian is not Hermitian (residual {r:e})")));
        }
        Ok(Self::Constant(m))
    }

    pub fn time_dependent<F>(dim: usize, h: F) -> Self
    where
        F: Fn(f64) -> DMatrix<Complex64> + Send + Sync + 'static,
    {
        Self::TimeDependent { dim, h: Arc::new(h) }
    }

    /// H_jk = (½ + j) δ_jk, j < N.
    pub fn oscillator(dim: usize) -> Self {
        Self::Constant(DMatrix::from_fn(dim, dim, |j, k| {
            if j == k {
                Complex64::new(0.5 + j as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn diagonal(energies: &[f64]) -> Result<Self> {
        let n = energies.len();
        Self::constant(DMatrix::from_fn(n, n, |j, k| {
            Complex64::new(if j == k { energies[j] } else { 0.0 }, 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Constant(m) => m.nrows(),
            Self::TimeDependent { dim, .. } => *dim,
        }
    }

    pub fn at(&self, t: f64) -> DMatrix<Complex64> {
        match self {
            Self::Constant(m) => m.clone(),
            Self::TimeDependent { h, .. } => h(t),
        }
    }

    fn checked_at(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let m = self.at(t);
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::InvalidInput(format!("H({t}) has the wrong shape")));
        }
        let r = hermiticity_residual(&m);
        if r > HERMITIAN_TOL {
            return Err(Error::InvalidInput(format!("H({t}) is not Hermitian (residual {r:e})")));
        }
        Ok(m)
    }
}

/// Density matrices sampled along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("nonempty trajectory")
    }

    /// max_t |Tr ρ(t) − Tr ρ(0)|
    pub fn trace_drift(&self) -> f64 {
        let t0 = self.states[0].trace();
        self.states.iter().map(|r| (r.trace() - t0).norm()).fold(0.0, f64::max)
    }

    /// Coin-chart vector at every sample.
    pub fn chart(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(chart_from_density).collect()
    }
}

/// Integrates i dρ/dt = Hρ − ρH, recording every step.
pub fn kinetic_evolve(
    rho0: &DensityMatrix,
    h: &HamiltonianMatrix,
    t_span: (f64, f64),
    step: f64,
) -> Result<Trajectory> {
    kinetic_evolve_sampled(rho0, h, t_span, step, 1)
}

/// As [`kinetic_evolve`], keeping every `record_every`-th step and the end point.
pub fn kinetic_evolve_sampled(
    rho0: &DensityMatrix,
    h: &HamiltonianMatrix,
    t_span: (f64, f64),
    step: f64,
    record_every: usize,
) -> Result<Trajectory> {
    rho0.check_physical(1e-8)?;
    let dim = rho0.dim();
    if h.dim() != dim {
        return Err(Error::InvalidInput(format!(
            "Hamiltonian dimension {} does not match state dimension {dim}",
            h.dim()
        )));
    }
    h.checked_at(t_span.0)?;
    h.checked_at(t_span.1)?;
    let constant = match h {
        HamiltonianMatrix::Constant(m) => Some(m.clone()),
        HamiltonianMatrix::TimeDependent { .. } => None,
    };
    let sol = ode_solve_sampled(
        |t, y, dy| {
            let hm = constant.clone().unwrap_or_else(|| h.at(t));
            let rho = DMatrix::from_column_slice(dim, dim, y);
            let d = (&hm * &rho - &rho * &hm) * MINUS_I;
            dy.copy_from_slice(d.as_slice());
        },
        rho0.matrix().as_slice(),
        t_span,
        step,
        record_every,
    )?;
    let states = sol
        .values
        .iter()
        .map(|v| DensityMatrix::new(DMatrix::from_column_slice(dim, dim, v)))
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        times: sol.times,
        states,
    })
}

/// Coins of |α e^{−it}⟩, the oscillator evolution of |α⟩, for n ≤ n′.
///
/// ρₙₙ′(t) = e^{−|α|²} |α|^{n+n′} e^{i(φ_α − t)(n − n′)} / √(n! n′!); the
/// diagonal coin does not depend on t.
pub fn coherent_coin_trajectory(alpha: Complex64, n: usize, np: usize, t: f64) -> Result<CoinValue> {
    coherent_coin_closed_form(alpha * Complex64::from_polar(1.0, -t), n, np)
}

/// Length of the chart vector for an N-level system, N² − 1.
pub fn chart_len(dim: usize) -> usize {
    dim * dim - 1
}

/// Coin-chart vector Π of a (not necessarily physical) Hermitian matrix.
pub fn chart_from_density(rho: &DensityMatrix) -> Vec<f64> {
    let dim = rho.dim();
    let mut v = Vec::with_capacity(chart_len(dim));
    for n in 0..dim - 1 {
        v.push(rho.get(n, n).re);
    }
    for n in 0..dim {
        for np in n + 1..dim {
            let e = rho.get(n, np);
            v.push(0.5 + e.re);
            v.push(0.5 - e.im);
        }
    }
    v
}

/// Inverse chart; the last diagonal entry is fixed by unit trace.
pub fn density_from_chart(pi: &[f64], dim: usize) -> Result<DensityMatrix> {
    if dim == 0 || pi.len() != chart_len(dim) {
        return Err(Error::InvalidInput(format!(
            "chart vector for N = {dim} needs {} entries, got {}",
            chart_len(dim.max(1)),
            pi.len()
        )));
    }
    let mut m = DMatrix::zeros(dim, dim);
    let mut last = 1.0;
    for n in 0..dim - 1 {
        m[(n, n)] = Complex64::new(pi[n], 0.0);
        last -= pi[n];
    }
    m[(dim - 1, dim - 1)] = Complex64::new(last, 0.0);
    let mut k = dim - 1;
    for n in 0..dim {
        for np in n + 1..dim {
            let e = Complex64::new(pi[k] - 0.5, -(pi[k + 1] - 0.5));
            m[(n, np)] = e;
            m[(np, n)] = e.conj();
            k += 2;
        }
    }
    DensityMatrix::new(m)
}

/// Linear part of the chart applied to a traceless Hermitian increment.
fn chart_linear(x: &DMatrix<Complex64>) -> DVector<f64> {
    let dim = x.nrows();
    let mut v = Vec::with_capacity(chart_len(dim));
    for n in 0..dim - 1 {
        v.push(x[(n, n)].re);
    }
    for n in 0..dim {
        for np in n + 1..dim {
            v.push(x[(n, np)].re);
            v.push(-x[(n, np)].im);
        }
    }
    DVector::from_vec(v)
}

/// dΠ/dt = MΠ + γ
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVectorSystem {
    pub dim: usize,
    pub m: DMatrix<f64>,
    pub gamma: DVector<f64>,
}

impl ProbabilityVectorSystem {
    pub fn rate(&self, pi: &[f64]) -> DVector<f64> {
        &self.m * DVector::from_column_slice(pi) + &self.gamma
    }

    /// Integrates the affine flow with the same RK4 stepper used for ρ.
    pub fn evolve(&self, pi0: &[f64], t_span: (f64, f64), step: f64, record_every: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        if pi0.len() != self.gamma.len() {
            return Err(Error::InvalidInput("chart vector has the wrong length".into()));
        }
        let y0: Vec<Complex64> = pi0.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        let n = pi0.len();
        let sol: OdeSolution = ode_solve_sampled(
            |_, y, dy| {
                for (i, d) in dy.iter_mut().enumerate() {
                    let mut acc = self.gamma[i];
                    for j in 0..n {
                        acc += self.m[(i, j)] * y[j].re;
                    }
                    *d = Complex64::new(acc, 0.0);
                }
            },
            &y0,
            t_span,
            step,
            record_every,
        )?;
        Ok(sol
            .times
            .into_iter()
            .zip(sol.values)
            .map(|(t, v)| (t, v.iter().map(|z| z.re).collect()))
            .collect())
    }
}

/// Builds (M, γ) by pushing the chart's basis perturbations through −i[H, ·].
pub fn affine_system(h: &HamiltonianMatrix) -> Result<ProbabilityVectorSystem> {
    let hm = match h {
        HamiltonianMatrix::Constant(m) => m.clone(),
        HamiltonianMatrix::TimeDependent { .. } => {
            return Err(Error::InvalidInput("affine system needs a time-independent Hamiltonian".into()))
        }
    };
    let r = hermiticity_residual(&hm);
    if r > HERMITIAN_TOL {
        return Err(Error::InvalidInput(format!("Hamiltonian is not Hermitian (residual {r:e})")));
    }
    let dim = hm.nrows();
    let len = chart_len(dim);
    let flow = |rho: &DMatrix<Complex64>| (&hm * rho - rho * &hm) * MINUS_I;
    let origin = density_from_chart(&vec![0.0; len], dim)?.into_matrix();
    let gamma = chart_linear(&flow(&origin));
    let mut m = DMatrix::zeros(len, len);
    for k in 0..len {
        let mut e = vec![0.0; len];
        e[k] = 1.0;
        let probe = density_from_chart(&e, dim)?.into_matrix() - &origin;
        m.set_column(k, &chart_linear(&flow(&probe)));
    }
    Ok(ProbabilityVectorSystem { dim, m, gamma })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryState {
    pub energy: f64,
    pub pi: Vec<f64>,
}

/// Energies of H with the chart vectors of the corresponding eigenprojectors,
/// sorted by energy.
pub fn stationary_spectrum(h: &HamiltonianMatrix) -> Result<Vec<StationaryState>> {
    let hm = match h {
        HamiltonianMatrix::Constant(m) => m.clone(),
        HamiltonianMatrix::TimeDependent { .. } => {
            return Err(Error::InvalidInput("spectrum needs a time-independent Hamiltonian".into()))
        }
    };
    let eig = hm.clone().symmetric_eigen();
    let mut out: Vec<StationaryState> = (0..hm.nrows())
        .map(|k| {
            let v: Vec<Complex64> = eig.eigenvectors.column(k).iter().copied().collect();
            let proj = DensityMatrix::projector(&v);
            StationaryState {
                energy: eig.eigenvalues[k],
                pi: chart_from_density(&proj),
            }
        })
        .collect();
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// D(p‖q) = p ln(p/q) + (1−p) ln((1−p)/(1−q)), with 0·ln 0 = 0.
pub fn relative_entropy(p: f64, q: f64) -> Result<f64> {
    for v in [p, q] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{v} is not a probability")));
        }
    }
    let term = |a: f64, b: f64| -> Result<f64> {
        if a == 0.0 {
            Ok(0.0)
        } else if b == 0.0 {
            Err(Error::InfiniteDivergence { p, q })
        } else {
            Ok(a * (a / b).ln())
        }
    };
    Ok(term(p, q)? + term(1.0 - p, 1.0 - q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin_rep::coins_from_density;
    use crate::qubit::{density_from_probs, QubitProbabilities};
    use crate::states::coherent_amplitude;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn coherent_rho(alpha: Complex64, dim: usize) -> DensityMatrix {
        let v: Vec<Complex64> = (0..dim).map(|n| coherent_amplitude(alpha, n)).collect();
        DensityMatrix::projector(&v)
    }

    fn qubit_rho(p1: f64, p2: f64, p3: f64) -> DensityMatrix {
        let q = density_from_probs(&QubitProbabilities::new(p1, p2, p3).unwrap()).unwrap();
        DensityMatrix::new(DMatrix::from_iterator(2, 2, q.matrix().iter().copied())).unwrap()
    }

    #[test]
    fn stationary_state_does_not_move() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let tr = kinetic_evolve(&rho, &HamiltonianMatrix::oscillator(3), (0.0, 3.0), 1e-2).unwrap();
        assert!(tr.states.iter().all(|r| r.max_abs_diff(&rho) == 0.0));
    }

    #[test]
    fn qubit_phase_rotation() {
        let rho = qubit_rho(1.0, 0.5, 0.5);
        let h = HamiltonianMatrix::diagonal(&[0.5, -0.5]).unwrap();
        let tr = kinetic_evolve(&rho, &h, (0.0, PI / 2.0), 1e-3).unwrap();
        let coins = coins_from_density(tr.last()).unwrap();
        let (p1, p2) = coins.pair(0, 1);
        assert!((p1 - 0.5).abs() < 1e-10 && (p2 - 1.0).abs() < 1e-10 && (coins.p3(0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oscillator_period() {
        let rho = coherent_rho(c(1.0, 0.0), 24);
        let tr = kinetic_evolve_sampled(&rho, &HamiltonianMatrix::oscillator(24), (0.0, 2.0 * PI), 1e-3, 1000).unwrap();
        assert!(tr.last().max_abs_diff(&rho) < 1e-6);
    }

    #[test]
    fn unitary_invariants_over_long_run() {
        let rho = DensityMatrix::new(
            DMatrix::from_row_slice(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.3, 0.05, 0.0, 0.05, 0.2])
                .map(|v| c(v, 0.0)),
        )
        .unwrap();
        let h = HamiltonianMatrix::constant(DMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(i as f64, 0.0)
            } else if i < j {
                c(0.3, 0.2)
            } else {
                c(0.3, -0.2)
            }
        }))
        .unwrap();
        let tr = kinetic_evolve_sampled(&rho, &h, (0.0, 10.0), 1e-3, 500).unwrap();
        let ev0 = rho.eigenvalues();
        for r in &tr.states {
            assert!((r.trace() - 1.0).norm() < 1e-8);
            assert!(r.hermiticity_residual() < 1e-8);
            assert!((r.purity() - rho.purity()).abs() < 1e-7);
            for (a, b) in r.eigenvalues().iter().zip(&ev0) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn time_dependent_hamiltonian() {
        // H(t) = f(t)·σ_z/2 rotates the coherence by ∫f.
        let h = HamiltonianMatrix::time_dependent(2, |t| {
            DMatrix::from_row_slice(2, 2, &[c(0.5 * t, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5 * t, 0.0)])
        });
        let rho = qubit_rho(1.0, 0.5, 0.5);
        let tr = kinetic_evolve(&rho, &h, (0.0, 2.0), 1e-3).unwrap();
        let e = tr.last().get(0, 1);
        assert!((e - 0.5 * Complex64::from_polar(1.0, -2.0)).norm() < 1e-10);
        let bad = HamiltonianMatrix::time_dependent(2, |_| DMatrix::from_element(2, 2, c(0.0, 1.0)));
        assert!(kinetic_evolve(&rho, &bad, (0.0, 1.0), 1e-2).is_err());
    }

    #[test]
    fn coherent_trajectory_examples() {
        let alpha = c(1.0, 0.0);
        let e1 = (-1.0f64).exp();
        match coherent_coin_trajectory(alpha, 0, 1, 0.0).unwrap() {
            CoinValue::OffDiagonal { p1, p2 } => assert!((p1 - 0.5 - e1).abs() < 1e-15 && (p2 - 0.5).abs() < 1e-15),
            _ => unreachable!(),
        }
        // ρ₀₁(t) = e^{−1} e^{it}: at t = π/2 the element is +i e^{−1}.
        match coherent_coin_trajectory(alpha, 0, 1, PI / 2.0).unwrap() {
            CoinValue::OffDiagonal { p1, p2 } => {
                assert!((p1 - 0.5).abs() < 1e-15 && (p2 - (0.5 - e1)).abs() < 1e-15)
            }
            _ => unreachable!(),
        }
        for t in [0.0, 1.0, 4.0] {
            match coherent_coin_trajectory(c(0.8, 0.6), 2, 2, t).unwrap() {
                CoinValue::Diagonal { p3 } => assert!((p3 - (-1.0f64).exp() / 2.0).abs() < 1e-15),
                _ => unreachable!(),
            }
        }
        assert!(coherent_coin_trajectory(alpha, 2, 1, 0.0).is_err());
    }

    #[test]
    fn coherent_trajectory_matches_kinetic_equation() {
        let dim = 24;
        for alpha in [c(1.0, 0.0), c(-0.9, 1.2), c(0.0, 1.5)] {
            let rho = coherent_rho(alpha, dim);
            let tr = kinetic_evolve_sampled(&rho, &HamiltonianMatrix::oscillator(dim), (0.0, 2.0 * PI), 1e-3, 400).unwrap();
            for (t, r) in tr.times.iter().zip(&tr.states) {
                for n in 0..=6 {
                    for np in n..=6 {
                        let e = r.get(n, np);
                        match coherent_coin_trajectory(alpha, n, np, *t).unwrap() {
                            CoinValue::Diagonal { p3 } => assert!((p3 - e.re).abs() < 1e-6),
                            CoinValue::OffDiagonal { p1, p2 } => {
                                assert!((p1 - 0.5 - e.re).abs() < 1e-6 && (p2 - 0.5 + e.im).abs() < 1e-6)
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn chart_roundtrip_and_coin_agreement() {
        let rho = coherent_rho(c(0.3, -0.4), 4);
        let pi = chart_from_density(&rho);
        assert_eq!(pi.len(), 15);
        let coins = coins_from_density(&rho).unwrap();
        assert_eq!(pi[1], coins.p3(1));
        assert_eq!((pi[3], pi[4]), coins.pair(0, 1));
        assert_eq!((pi[13], pi[14]), coins.pair(2, 3));
        let back = density_from_chart(&pi, 4).unwrap();
        // The last diagonal is recomputed from the trace of the truncated projector.
        let shift = 1.0 - rho.trace().re;
        assert!((back.get(3, 3).re - rho.get(3, 3).re - shift).abs() < 1e-15);
        assert!(density_from_chart(&pi[1..], 4).is_err());
    }

    #[test]
    fn affine_examples() {
        let zero = affine_system(&HamiltonianMatrix::diagonal(&[0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!(zero.m.iter().all(|&v| v == 0.0) && zero.gamma.iter().all(|&v| v == 0.0));

        let q = affine_system(&HamiltonianMatrix::diagonal(&[0.5, -0.5]).unwrap()).unwrap();
        // Π = (p3, p1, p2): p3 fixed, (p1 − ½, p2 − ½) rotating counterclockwise at unit rate.
        let rate = q.rate(&[0.3, 0.5 + 0.2, 0.5 + 0.1]);
        assert!(rate[0].abs() < 1e-15);
        assert!((rate[1] + 0.1).abs() < 1e-15 && (rate[2] - 0.2).abs() < 1e-15);

        let bad = HamiltonianMatrix::TimeDependent { dim: 2, h: Arc::new(|_| DMatrix::zeros(2, 2)) };
        assert!(affine_system(&bad).is_err());
    }

    #[test]
    fn affine_flow_matches_kinetic_flow() {
        let h = HamiltonianMatrix::oscillator(4);
        let sys = affine_system(&h).unwrap();
        let rho = coherent_rho(c(0.7, 0.2), 4);
        let rho = DensityMatrix::new(rho.matrix() / rho.trace()).unwrap();
        let kin = kinetic_evolve_sampled(&rho, &h, (0.0, 5.0), 1e-3, 100).unwrap();
        let aff = sys.evolve(&chart_from_density(&rho), (0.0, 5.0), 1e-3, 100).unwrap();
        assert_eq!(kin.times.len(), aff.len());
        for (r, (_, pi)) in kin.states.iter().zip(&aff) {
            let expect = chart_from_density(r);
            for (a, b) in pi.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn spectra() {
        let s = stationary_spectrum(&HamiltonianMatrix::diagonal(&[0.5, -0.5]).unwrap()).unwrap();
        assert_eq!(s.iter().map(|x| x.energy).collect::<Vec<_>>(), vec![-0.5, 0.5]);
        for n in 2..=8 {
            let h = HamiltonianMatrix::oscillator(n);
            let s = stationary_spectrum(&h).unwrap();
            let sys = affine_system(&h).unwrap();
            for (k, st) in s.iter().enumerate() {
                assert_eq!(st.energy, 0.5 + k as f64);
                assert!(sys.rate(&st.pi).norm() <= 1e-10);
            }
        }
        // A non-diagonal H: eigenprojectors are still fixed points and stay put.
        let h = HamiltonianMatrix::constant(DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.3, -0.4), c(0.3, 0.4), c(-0.2, 0.0)],
        ))
        .unwrap();
        let sys = affine_system(&h).unwrap();
        for st in stationary_spectrum(&h).unwrap() {
            assert!(sys.rate(&st.pi).norm() <= 1e-10);
            let rho = density_from_chart(&st.pi, 2).unwrap();
            let tr = kinetic_evolve_sampled(&rho, &h, (0.0, 3.0), 1e-3, 1000).unwrap();
            for (a, b) in chart_from_density(tr.last()).iter().zip(&st.pi) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn relative_entropy_examples() {
        assert_eq!(relative_entropy(0.3, 0.3).unwrap(), 0.0);
        // 0.9 ln 1.8 + 0.1 ln 0.2
        assert!((relative_entropy(0.9, 0.5).unwrap() - 0.368_064_207_168_497_1).abs() < 1e-12);
        assert!((relative_entropy(0.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(matches!(relative_entropy(0.5, 0.0), Err(Error::InfiniteDivergence { .. })));
        assert!(matches!(relative_entropy(0.5, 1.0), Err(Error::InfiniteDivergence { .. })));
        assert_eq!(relative_entropy(1.0, 1.0).unwrap(), 0.0);
        assert!(relative_entropy(1.2, 0.5).is_err());
    }

    #[test]
    fn entropy_along_coherent_trajectory() {
        for k in 0..100 {
            let t = 2.0 * PI * k as f64 / 99.0;
            if let CoinValue::OffDiagonal { p1, p2 } = coherent_coin_trajectory(c(1.0, 0.0), 0, 1, t).unwrap() {
                assert!(relative_entropy(p1, p2).unwrap() >= -1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn relative_entropy_nonnegative(p in 0.0..=1.0f64, q in 1e-9..1.0f64) {
            let d = relative_entropy(p, q).unwrap();
            prop_assert!(d >= -1e-15);
        }
    }
}
