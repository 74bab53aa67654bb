//! Hilbert-space layout and density matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ops::{SparseOp, TensorLayout};
use crate::error::{Error, Result};

/// Largest total dimension accepted.
pub const MAX_DIM: usize = 4096;

/// Nodes of (qubit ⊗ cavity), ordered node 1 qubit, node 1 cavity, node 2 ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpec {
    pub node_count: usize,
    /// 2, or 3 to include the leakage level |2⟩.
    pub qubit_dim: usize,
    pub fock_cutoff: usize,
}

impl HilbertSpec {
    pub fn single(qubit_dim: usize, fock_cutoff: usize) -> Self {
        Self {
            node_count: 1,
            qubit_dim,
            fock_cutoff,
        }
    }

    pub fn cascaded(fock_cutoff: usize) -> Self {
        Self {
            node_count: 2,
            qubit_dim: 2,
            fock_cutoff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidArgument(format!("hilbert space: {reason}")));
        if !(1..=2).contains(&self.node_count) {
            return bad(format!("node_count must be 1 or 2, got {}", self.node_count));
        }
        if !(2..=3).contains(&self.qubit_dim) {
            return bad(format!("qubit_dim must be 2 or 3, got {}", self.qubit_dim));
        }
        if self.fock_cutoff < 1 {
            return bad("fock_cutoff must be at least 1".into());
        }
        let node = self.qubit_dim.checked_mul(self.fock_cutoff + 1);
        let total = node.and_then(|d| d.checked_pow(self.node_count as u32));
        match total {
            Some(d) if d <= MAX_DIM => Ok(()),
            _ => bad(format!("total dimension exceeds {MAX_DIM}")),
        }
    }

    pub fn layout(&self) -> TensorLayout {
        let mut dims = Vec::with_capacity(2 * self.node_count);
        for _ in 0..self.node_count {
            dims.push(self.qubit_dim);
            dims.push(self.fock_cutoff + 1);
        }
        TensorLayout::new(dims)
    }

    pub fn dim(&self) -> usize {
        self.layout().total()
    }

    pub fn qubit_factor(node: usize) -> usize {
        2 * node
    }

    pub fn cavity_factor(node: usize) -> usize {
        2 * node + 1
    }

    /// Product state from per-node qubit amplitudes and Fock levels.
    pub fn product_state(&self, qubits: &[Vec<Complex64>], fock: &[usize]) -> Result<DVector<Complex64>> {
        if qubits.len() != self.node_count || fock.len() != self.node_count {
            return Err(Error::InvalidArgument(
                "one qubit state and Fock level per node required".into(),
            ));
        }
        let layout = self.layout();
        let mut psi = DVector::zeros(layout.total());
        for idx in 0..layout.total() {
            let lv = layout.levels(idx);
            let mut amp = Complex64::new(1.0, 0.0);
            for node in 0..self.node_count {
                if lv[2 * node + 1] != fock[node] {
                    amp = Complex64::new(0.0, 0.0);
                    break;
                }
                let q = &qubits[node];
                if q.len() > self.qubit_dim {
                    return Err(Error::InvalidArgument("qubit state longer than qubit_dim".into()));
                }
                amp *= q.get(lv[2 * node]).copied().unwrap_or_default();
            }
            psi[idx] = amp;
        }
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument("initial state has zero norm".into()));
        }
        Ok(psi / Complex64::new(norm, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &DVector<Complex64>) -> Self {
        Self {
            mat: psi * psi.adjoint(),
        }
    }

    pub fn from_column_slice(dim: usize, data: &[Complex64]) -> Self {
        Self {
            mat: DMatrix::from_column_slice(dim, dim, data),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.mat - self.mat.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Re Tr[A ρ].
    pub fn expect(&self, op: &SparseOp) -> f64 {
        op.entries.iter().map(|&(i, j, v)| (v * self.mat[(j, i)]).re).sum()
    }

    pub fn overlap(&self, psi: &DVector<Complex64>) -> f64 {
        (psi.adjoint() * &self.mat * psi)[(0, 0)].re
    }

    /// Reduced density matrix of one tensor factor.
    pub fn reduce(&self, layout: &TensorLayout, factor: usize) -> DMatrix<Complex64> {
        let d = layout.dims[factor];
        let mut out = DMatrix::zeros(d, d);
        let n = self.dim();
        let lv: Vec<Vec<usize>> = (0..n).map(|i| layout.levels(i)).collect();
        for j in 0..n {
            for i in 0..n {
                let same_rest = lv[i]
                    .iter()
                    .zip(&lv[j])
                    .enumerate()
                    .all(|(f, (a, b))| f == factor || a == b);
                if same_rest {
                    out[(lv[i][factor], lv[j][factor])] += self.mat[(i, j)];
                }
            }
        }
        out
    }
}

/// Worst-case invariant violations seen along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantReport {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub checkpoints: usize,
}

impl Default for InvariantReport {
    fn default() -> Self {
        Self {
            max_trace_error: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            checkpoints: 0,
        }
    }
}

impl InvariantReport {
    pub const TRACE_TOL: f64 = 1e-8;
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const EIGEN_TOL: f64 = -1e-7;

    pub fn record(&mut self, rho: &DensityMatrix, eigen_check: bool) {
        self.max_trace_error = self.max_trace_error.max((rho.trace() - 1.0).abs());
        self.max_hermiticity_error = self.max_hermiticity_error.max(rho.hermiticity_error());
        if eigen_check {
            self.min_eigenvalue = self.min_eigenvalue.min(rho.min_eigenvalue());
            self.checkpoints += 1;
        }
    }

    pub fn holds(&self) -> bool {
        self.max_trace_error <= Self::TRACE_TOL
            && self.max_hermiticity_error <= Self::HERMITICITY_TOL
            && self.min_eigenvalue >= Self::EIGEN_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_guard() {
        assert!(HilbertSpec::cascaded(2).validate().is_ok());
        assert_eq!(HilbertSpec::cascaded(2).dim(), 36);
        assert!(HilbertSpec {
            node_count: 2,
            qubit_dim: 3,
            fock_cutoff: 25
        }
        .validate()
        .is_err());
        assert!(HilbertSpec {
            node_count: 3,
            qubit_dim: 2,
            fock_cutoff: 1
        }
        .validate()
        .is_err());
        assert!(HilbertSpec::single(4, 1).validate().is_err());
        assert!(HilbertSpec::single(2, 0).validate().is_err());
    }

    #[test]
    fn product_state_and_reduction() {
        let sp = HilbertSpec::cascaded(1);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let psi = sp
            .product_state(&[vec![h, -h], vec![Complex64::new(1.0, 0.0)]], &[0, 0])
            .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!(rho.hermiticity_error() < 1e-15);
        assert!(rho.min_eigenvalue() > -1e-14);
        let q1 = rho.reduce(&sp.layout(), 0);
        assert!((q1[(0, 1)].re + 0.5).abs() < 1e-15);
        let q2 = rho.reduce(&sp.layout(), 2);
        assert!((q2[(0, 0)].re - 1.0).abs() < 1e-15);
    }
}
