//! Sparse operators on tensor-product spaces.

use nalgebra::DMatrix;
use num_complex::Complex64;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Triplet-form operator; duplicates are merged on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != C0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    fn compact(mut self) -> Self {
        self.entries.sort_by_key(|&(i, j, _)| (j, i));
        let mut out: Vec<(usize, usize, Complex64)> = Vec::with_capacity(self.entries.len());
        for (i, j, v) in self.entries {
            match out.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => out.push((i, j, v)),
            }
        }
        out.retain(|e| e.2 != C0);
        Self {
            dim: self.dim,
            entries: out,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect(),
        }
        .compact()
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self { dim: self.dim, entries }.compact()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_re(-1.0))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect(),
        }
        .compact()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimension mismatch");
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); other.dim];
        for &(k, j, v) in &other.entries {
            by_row[k].push((j, v));
        }
        let mut entries = Vec::new();
        for &(i, k, a) in &self.entries {
            for &(j, b) in &by_row[k] {
                entries.push((i, j, a * b));
            }
        }
        Self { dim: self.dim, entries }.compact()
    }

    /// Largest |A - A†| entry.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.sub(&self.adjoint());
        d.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max)
    }

    /// `out[:, col] += s * A * x[:, col]` for every column of the column-major
    /// square matrix `x`.
    #[inline]
    pub fn left_mul_acc(&self, x: &[Complex64], s: Complex64, out: &mut [Complex64]) {
        let n = self.dim;
        for col in 0..n {
            let xc = &x[col * n..(col + 1) * n];
            let oc = &mut out[col * n..(col + 1) * n];
            for &(i, k, v) in &self.entries {
                oc[i] += s * v * xc[k];
            }
        }
    }

    /// `out += x * A†` for column-major square `x`.
    #[inline]
    pub fn right_adj_mul_acc(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for &(j, k, v) in &self.entries {
            let c = v.conj();
            let (src, dst) = (k * n, j * n);
            for i in 0..n {
                out[dst + i] += c * x[src + i];
            }
        }
    }
}

/// Local factor dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorLayout {
    pub dims: Vec<usize>,
}

impl TensorLayout {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims }
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Embeds local operators (factor index, dense local matrix) as a product
    /// acting on the full space; identity elsewhere.
    pub fn embed(&self, locals: &[(usize, &DMatrix<Complex64>)]) -> SparseOp {
        let mut entries: Vec<(usize, usize, Complex64)> = vec![(0, 0, Complex64::new(1.0, 0.0))];
        for (f, &d) in self.dims.iter().enumerate() {
            let local = locals.iter().find(|(idx, _)| *idx == f).map(|(_, m)| *m);
            let mut next = Vec::with_capacity(entries.len() * d);
            for &(i, j, v) in &entries {
                match local {
                    Some(m) => {
                        assert_eq!(m.nrows(), d, "local operator dimension mismatch");
                        for b in 0..d {
                            for a in 0..d {
                                let w = m[(a, b)];
                                if w != C0 {
                                    next.push((i * d + a, j * d + b, v * w));
                                }
                            }
                        }
                    }
                    None => {
                        for a in 0..d {
                            next.push((i * d + a, j * d + a, v));
                        }
                    }
                }
            }
            entries = next;
        }
        SparseOp {
            dim: self.total(),
            entries,
        }
        .compact()
    }

    /// Product basis index of per-factor levels.
    pub fn index(&self, levels: &[usize]) -> usize {
        levels.iter().zip(&self.dims).fold(0, |acc, (&l, &d)| acc * d + l)
    }

    pub fn levels(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (f, &d) in self.dims.iter().enumerate().rev() {
            out[f] = index % d;
            index /= d;
        }
        out
    }
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Truncated annihilation operator on Fock levels 0..=cutoff.
pub fn annihilation(cutoff: usize) -> DMatrix<Complex64> {
    let d = cutoff + 1;
    DMatrix::from_fn(d, d, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { C0 })
}

pub fn number(cutoff: usize) -> DMatrix<Complex64> {
    let d = cutoff + 1;
    DMatrix::from_fn(d, d, |i, j| if i == j { c(i as f64) } else { C0 })
}

/// |i⟩⟨j| on a d-level system.
pub fn ket_bra(d: usize, i: usize, j: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    m[(i, j)] = c(1.0);
    m
}

/// Qubit lowering |0⟩⟨1| embedded in a d-level system.
pub fn lowering(d: usize) -> DMatrix<Complex64> {
    ket_bra(d, 0, 1)
}

/// S^z = (|1⟩⟨1| - |0⟩⟨0|)/2 on the qubit levels of a d-level system.
pub fn s_z(d: usize) -> DMatrix<Complex64> {
    (ket_bra(d, 1, 1) - ket_bra(d, 0, 0)) * c(0.5)
}
