//! Density matrices on a truncated Fock (or qubit) basis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex square matrix interpreted as a density operator.
///
/// Construction only checks shape; physicality (Hermitian, unit trace,
/// positive) is checked where an operation requires it.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DMatrix<Complex64>);

impl DensityMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "density matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self(matrix))
    }

    /// |ψ⟩⟨ψ| for the given amplitudes (not renormalized).
    pub fn projector(amplitudes: &[Complex64]) -> Self {
        let v = DVector::from_column_slice(amplitudes);
        Self(&v * v.adjoint())
    }

    /// Projector on the Fock state |n⟩ in an N-dimensional truncation.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::range("Fock index", format!("n = {n} with truncation {dim}")));
        }
        let mut m = DMatrix::zeros(dim, dim);
        m[(n, n)] = Complex64::new(1.0, 0.0);
        Ok(Self(m))
    }

    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let m = DMatrix::from_diagonal(&DVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, n: usize, np: usize) -> Complex64 {
        self.0[(n, np)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// max |ρ − ρ†| over elements.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Tr ρ²
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Largest elementwise modulus of ρ − σ.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Checks Hermiticity, trace ≤ 1 + tol and that no eigenvalue is below −tol.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        let h = self.hermiticity_residual();
        if h > tol {
            return Err(Error::InvalidState(format!("not Hermitian (residual {h:e})")));
        }
        let tr = self.trace();
        if tr.re > 1.0 + tol || tr.im.abs() > tol {
            return Err(Error::InvalidState(format!("trace {tr} exceeds one")));
        }
        let min = self.eigenvalues()[0];
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Truncates (or zero-pads) to a `dim`-dimensional basis.
    pub fn resized(&self, dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        let k = dim.min(self.dim());
        m.view_mut((0, 0), (k, k)).copy_from(&self.0.view((0, 0), (k, k)));
        Self(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_projector_is_physical() {
        let rho = DensityMatrix::fock(2, 5).unwrap();
        assert_eq!(rho.trace(), Complex64::new(1.0, 0.0));
        rho.check_physical(1e-12).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_square() {
        assert!(DensityMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn negative_eigenvalue_flagged() {
        let rho = DensityMatrix::diagonal(&[1.1, -0.1]).unwrap();
        assert!(matches!(rho.check_physical(1e-9), Err(Error::InvalidState(_))));
    }

    #[test]
    fn resize_keeps_leading_block() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let small = rho.resized(2);
        assert_eq!(small.get(1, 1), Complex64::new(0.3, 0.0));
        assert_eq!(rho.resized(4).get(3, 3), Complex64::new(0.0, 0.0));
    }
}
