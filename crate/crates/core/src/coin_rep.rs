//! Coin (dichotomic) probability representation of Fock-basis density matrices.
//!
//! Every density-matrix element is carried by coin probabilities:
//! ρₙₙ = p₃⁽ⁿⁿ⁾ on the diagonal and, for n < n′,
//! ⟨n|ρ|n′⟩ = (p₁⁽ⁿⁿ′⁾ − ½) − i(p₂⁽ⁿⁿ′⁾ − ½). The lower triangle follows from
//! Hermiticity. With N = 2 this is exactly the qubit map in [`crate::qubit`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::qubit::QubitProbabilities;
use crate::special_math::ln_factorial;

/// Slack allowed on probabilities produced from numerically computed matrices.
pub const COIN_TOL: f64 = 1e-9;

/// Default truncation for coherent and Gaussian states.
pub const DEFAULT_TRUNCATION: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffDiagonalCoin {
    pub n: usize,
    pub np: usize,
    pub p1: f64,
    pub p2: f64,
}

/// Coin probabilities of an N-level (or truncated) state.
///
/// `off` is stored in lexicographic (n, n′) order with n < n′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinProbabilities {
    #[serde(rename = "N")]
    dim: usize,
    diag: Vec<f64>,
    off: Vec<OffDiagonalCoin>,
}

/// Index of (n, n′), n < n′, in lexicographic upper-triangle order.
pub fn pair_index(n: usize, np: usize, dim: usize) -> usize {
    debug_assert!(n < np && np < dim);
    n * dim - n * (n + 1) / 2 + (np - n - 1)
}

impl CoinProbabilities {
    /// Validates shape and that every entry is a probability.
    pub fn new(dim: usize, diag: Vec<f64>, off: Vec<OffDiagonalCoin>) -> Result<Self> {
        if dim == 0 || diag.len() != dim || off.len() != dim * (dim - 1) / 2 {
            return Err(Error::InvalidInput(format!(
                "coin table for N = {dim} needs {dim} diagonal and {} off-diagonal entries, got {} and {}",
                dim * dim.saturating_sub(1) / 2,
                diag.len(),
                off.len()
            )));
        }
        let mut k = 0;
        for n in 0..dim {
            for np in n + 1..dim {
                let c = off[k];
                if c.n != n || c.np != np {
                    return Err(Error::InvalidInput(format!(
                        "off-diagonal entry {k} is ({}, {}), expected ({n}, {np})",
                        c.n, c.np
                    )));
                }
                for v in [c.p1, c.p2] {
                    check_probability(n, np, v)?;
                }
                k += 1;
            }
        }
        for (n, &v) in diag.iter().enumerate() {
            check_probability(n, n, v)?;
        }
        let total: f64 = diag.iter().sum();
        if total > 1.0 + COIN_TOL {
            return Err(Error::InvalidState(format!("diagonal coins sum to {total} > 1")));
        }
        Ok(Self { dim, diag, off })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[OffDiagonalCoin] {
        &self.off
    }

    pub fn p3(&self, n: usize) -> f64 {
        self.diag[n]
    }

    /// (p₁, p₂) for n < n′.
    pub fn pair(&self, n: usize, np: usize) -> (f64, f64) {
        let c = self.off[pair_index(n, np, self.dim)];
        (c.p1, c.p2)
    }

    /// Last diagonal entry as fixed by normalization, 1 − Σ_{n<N−1} p₃⁽ⁿⁿ⁾.
    pub fn implied_last_diagonal(&self) -> f64 {
        1.0 - self.diag[..self.dim - 1].iter().sum::<f64>()
    }

    /// 1 − Σ p₃⁽ⁿⁿ⁾: probability weight lying beyond the truncation.
    pub fn truncation_residual(&self) -> f64 {
        1.0 - self.diag.iter().sum::<f64>()
    }
}

fn check_probability(n: usize, np: usize, value: f64) -> Result<()> {
    if value < -COIN_TOL || value > 1.0 + COIN_TOL || !value.is_finite() {
        return Err(Error::RepresentationOverflow { n, np, value });
    }
    Ok(())
}

/// Coin representation of ρ. Fails if a produced probability leaves [0, 1].
pub fn coins_from_density(rho: &DensityMatrix) -> Result<CoinProbabilities> {
    let dim = rho.dim();
    let h = rho.hermiticity_residual();
    if h > COIN_TOL {
        return Err(Error::InvalidState(format!("density matrix is not Hermitian (residual {h:e})")));
    }
    let diag: Vec<f64> = (0..dim).map(|n| rho.get(n, n).re).collect();
    let mut off = Vec::with_capacity(dim * (dim - 1) / 2);
    for n in 0..dim {
        for np in n + 1..dim {
            let e = rho.get(n, np);
            off.push(OffDiagonalCoin {
                n,
                np,
                p1: 0.5 + e.re,
                p2: 0.5 - e.im,
            });
        }
    }
    CoinProbabilities::new(dim, diag, off)
}

/// Inverse of [`coins_from_density`]. Positivity is not checked; see [`sylvester_check`].
pub fn density_from_coins(c: &CoinProbabilities) -> DensityMatrix {
    let dim = c.dim;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        m[(n, n)] = Complex64::new(c.diag[n], 0.0);
    }
    for o in &c.off {
        let e = Complex64::new(o.p1 - 0.5, -(o.p2 - 0.5));
        m[(o.n, o.np)] = e;
        m[(o.np, o.n)] = e.conj();
    }
    DensityMatrix::new(m).expect("square by construction")
}

#[derive(Debug, Clone, PartialEq)]
pub enum SylvesterVerdict {
    Positive { minors: Vec<f64> },
    /// `minor` is the 1-based order of the first leading minor that fails.
    NotPositive { minor: usize, minors: Vec<f64> },
}

impl SylvesterVerdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, SylvesterVerdict::Positive { .. })
    }
}

/// Positive-semidefiniteness test through leading principal minors.
///
/// The minors are accumulated as products of elimination pivots. A pivot
/// within `tol` of zero is accepted only if the rest of its row is also
/// negligible, which is what separates semidefinite matrices from those
/// whose leading minors merely vanish.
pub fn sylvester_check(rho: &DensityMatrix, tol: f64) -> SylvesterVerdict {
    let dim = rho.dim();
    let mut s = rho.matrix().clone();
    let mut minors = Vec::with_capacity(dim);
    let mut minor = 1.0;
    for k in 0..dim {
        let pivot = s[(k, k)].re;
        if pivot > tol {
            minor *= pivot;
            minors.push(minor);
            for i in k + 1..dim {
                let factor = s[(i, k)] / pivot;
                for j in k + 1..dim {
                    let skj = s[(k, j)];
                    s[(i, j)] -= factor * skj;
                }
            }
        } else if pivot >= -tol {
            minor = 0.0;
            minors.push(0.0);
            let row_max = (k + 1..dim).map(|j| s[(k, j)].norm()).fold(0.0, f64::max);
            if row_max > tol.sqrt() {
                return SylvesterVerdict::NotPositive { minor: k + 2, minors };
            }
        } else {
            minor *= pivot;
            minors.push(minor);
            return SylvesterVerdict::NotPositive { minor: k + 1, minors };
        }
    }
    SylvesterVerdict::Positive { minors }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CoinValue {
    Diagonal { p3: f64 },
    OffDiagonal { p1: f64, p2: f64 },
}

/// ⟨n|α⟩⟨α|n′⟩ = e^{−|α|²} αⁿ ᾱ^{n′} / √(n! n′!), evaluated in logs.
pub fn coherent_element(alpha: Complex64, n: usize, np: usize) -> Complex64 {
    let r = alpha.norm();
    if r == 0.0 {
        return if n == 0 && np == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let ln_mag = -r * r + (n + np) as f64 * r.ln() - 0.5 * (ln_factorial(n) + ln_factorial(np));
    let phase = alpha.arg() * (n as f64 - np as f64);
    Complex64::from_polar(ln_mag.exp(), phase)
}

/// Coins of the coherent state |α⟩ for the pair n ≤ n′.
pub fn coherent_coin_closed_form(alpha: Complex64, n: usize, np: usize) -> Result<CoinValue> {
    if n > np {
        return Err(Error::InvalidInput(format!("expected n <= n', got ({n}, {np})")));
    }
    let e = coherent_element(alpha, n, np);
    Ok(if n == np {
        CoinValue::Diagonal { p3: e.re }
    } else {
        CoinValue::OffDiagonal {
            p1: 0.5 + e.re,
            p2: 0.5 - e.im,
        }
    })
}

/// Full coin table of |α⟩ truncated to N levels (not renormalized).
pub fn coherent_coins(alpha: Complex64, dim: usize) -> Result<CoinProbabilities> {
    let diag = (0..dim).map(|n| coherent_element(alpha, n, n).re).collect();
    let mut off = Vec::with_capacity(dim * dim.saturating_sub(1) / 2);
    for n in 0..dim {
        for np in n + 1..dim {
            let e = coherent_element(alpha, n, np);
            off.push(OffDiagonalCoin {
                n,
                np,
                p1: 0.5 + e.re,
                p2: 0.5 - e.im,
            });
        }
    }
    CoinProbabilities::new(dim, diag, off)
}

/// Poisson tail bound e^{−|α|²}|α|^{2N}/N! on the weight beyond N levels.
pub fn coherent_tail_bound(alpha: Complex64, dim: usize) -> f64 {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        return 0.0;
    }
    (-r2 + dim as f64 * r2.ln() - ln_factorial(dim)).exp()
}

/// Joint distribution W(j, k), j ∈ {1, 2}, k ∈ {1, 2, 3}, of a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointCoinDistribution {
    /// `w[j][k]` with zero-based indices.
    pub w: [[f64; 3]; 2],
}

impl JointCoinDistribution {
    /// P(k) = Σⱼ W(j, k)
    pub fn marginal(&self, k: usize) -> f64 {
        self.w[0][k] + self.w[1][k]
    }

    /// W(j | k) = W(j, k) / P(k)
    pub fn conditional(&self, k: usize) -> (f64, f64) {
        let pk = self.marginal(k);
        (self.w[0][k] / pk, self.w[1][k] / pk)
    }

    pub fn total(&self) -> f64 {
        self.w.iter().flatten().sum()
    }

    /// Π = (Π₁, …, Π₆) with Π₂ₖ₋₁ = W(1, k), Π₂ₖ = W(2, k).
    pub fn as_vector(&self) -> [f64; 6] {
        [
            self.w[0][0],
            self.w[1][0],
            self.w[0][1],
            self.w[1][1],
            self.w[0][2],
            self.w[1][2],
        ]
    }
}

pub fn qubit_to_joint(p: &QubitProbabilities) -> JointCoinDistribution {
    let third = 1.0 / 3.0;
    let ps = p.as_array();
    let mut w = [[0.0; 3]; 2];
    for k in 0..3 {
        w[0][k] = ps[k] * third;
        w[1][k] = (1.0 - ps[k]) * third;
    }
    JointCoinDistribution { w }
}

/// Recovers (p₁, p₂, p₃) from the conditionals W(1 | k).
pub fn joint_to_qubit(j: &JointCoinDistribution) -> Result<QubitProbabilities> {
    QubitProbabilities::new(j.conditional(0).0, j.conditional(1).0, j.conditional(2).0)
}
