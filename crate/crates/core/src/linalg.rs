//! Dense complex linear algebra for dimensions 2 and 4.
//!
//! Everything here is sized for single- and two-qubit objects: kets, density
//! matrices, projectors, and the verification operator Ω. The Hermitian
//! eigensolver is a cyclic Jacobi sweep, which is exact enough and fast
//! enough at dimension ≤ 4 that nothing heavier is warranted.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex;
// Required for f64 math under no_std; the import looks unused in test
// builds, where std in the crate graph provides the inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operand dimensions do not match, or a dimension other than 2/4 was given.
    DimensionMismatch { expected: usize, got: usize },
    /// A value with a NaN or infinite component was passed to a constructor.
    NotFinite,
    /// Input failed the Hermiticity check; the residual is `max |M − M†|`.
    NotHermitian { residual: f64 },
    /// Jacobi sweeps hit the iteration cap; the residual is the remaining
    /// off-diagonal norm.
    NoConvergence { residual: f64 },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinalgError::NotFinite => write!(f, "non-finite component"),
            LinalgError::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (residual {residual:e})")
            }
            LinalgError::NoConvergence { residual } => {
                write!(f, "eigensolver did not converge (residual {residual:e})")
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<(), LinalgError> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch { expected: 2, got: dim })
    }
}

/// A pure state of one or two qubits. Basis order is |0⟩,|1⟩ for dimension 2
/// and |00⟩,|01⟩,|10⟩,|11⟩ for dimension 4, with the first tensor factor
/// belonging to Alice.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    pub fn new(amps: Vec<C64>) -> Result<Self, LinalgError> {
        check_dim(amps.len())?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(LinalgError::NotFinite);
        }
        Ok(Ket { amps })
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self, LinalgError> {
        check_dim(dim)?;
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Ket { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, i: usize) -> C64 {
        self.amps[i]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Returns the ket scaled to unit norm.
    pub fn normalized(&self) -> Ket {
        let n = self.norm();
        Ket {
            amps: self.amps.iter().map(|a| a / n).collect(),
        }
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Ket) -> Result<C64, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Rank-1 projector |self⟩⟨self|.
    pub fn outer(&self) -> Matrix {
        let d = self.dim();
        Matrix::from_fn(d, |i, j| self.amps[i] * self.amps[j].conj())
    }

    /// Tensor product of two single-qubit kets, first factor = Alice.
    pub fn kron(&self, other: &Ket) -> Result<Ket, LinalgError> {
        if self.dim() != 2 || other.dim() != 2 {
            return Err(LinalgError::DimensionMismatch { expected: 2, got: self.dim().max(other.dim()) });
        }
        let mut amps = Vec::with_capacity(4);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Ket { amps })
    }

    /// For a dimension-2 ket, the state orthogonal to it (up to phase).
    pub fn orthogonal(&self) -> Result<Ket, LinalgError> {
        if self.dim() != 2 {
            return Err(LinalgError::DimensionMismatch { expected: 2, got: self.dim() });
        }
        Ket::new(vec![-self.amps[1].conj(), self.amps[0].conj()])
    }
}

/// Row-major dense complex matrix of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Matrix {
        Matrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Matrix {
        Matrix::from_fn(dim, |i, j| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Matrix {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    /// Builds a matrix from row-major entries, validating finiteness and a
    /// square dimension of 2 or 4.
    pub fn from_entries(data: Vec<C64>) -> Result<Matrix, LinalgError> {
        let dim = match data.len() {
            4 => 2,
            16 => 4,
            n => return Err(LinalgError::DimensionMismatch { expected: 16, got: n }),
        };
        if data.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(LinalgError::NotFinite);
        }
        Ok(Matrix { dim, data })
    }

    pub fn diag(entries: &[f64]) -> Matrix {
        Matrix::from_fn(entries.len(), |i, j| {
            if i == j {
                C64::new(entries[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same(other)?;
        Ok(Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same(other)?;
        Ok(Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same(other)?;
        let d = self.dim;
        Ok(Matrix::from_fn(d, |i, j| {
            (0..d).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    /// Matrix-vector product `M|v⟩`.
    pub fn apply(&self, v: &Ket) -> Result<Ket, LinalgError> {
        if self.dim != v.dim() {
            return Err(LinalgError::DimensionMismatch { expected: self.dim, got: v.dim() });
        }
        let amps = (0..self.dim)
            .map(|i| (0..self.dim).map(|k| self.get(i, k) * v.amp(k)).sum())
            .collect();
        Ok(Ket { amps })
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product of two single-qubit operators, first factor = Alice.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.dim != 2 || other.dim != 2 {
            return Err(LinalgError::DimensionMismatch { expected: 2, got: self.dim.max(other.dim) });
        }
        Ok(Matrix::from_fn(4, |i, j| {
            self.get(i / 2, j / 2) * other.get(i % 2, j % 2)
        }))
    }

    /// tr(a·b) without forming the product.
    pub fn trace_product(&self, other: &Matrix) -> Result<C64, LinalgError> {
        self.check_same(other)?;
        let d = self.dim;
        let mut t = C64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                t += self.get(i, k) * other.get(k, i);
            }
        }
        Ok(t)
    }

    /// max entrywise |M − M†|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                r = r.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        r
    }

    /// max entrywise |M² − M|, meaningful together with Hermiticity for
    /// projector checks.
    pub fn idempotency_residual(&self) -> f64 {
        let sq = self.mul(self).expect("same dims");
        let mut r = 0.0f64;
        for (a, b) in sq.data.iter().zip(&self.data) {
            r = r.max((a - b).norm());
        }
        r
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |r, (a, b)| r.max((a - b).norm()))
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self.get(i, j).norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    fn check_same(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.dim != other.dim {
            Err(LinalgError::DimensionMismatch { expected: self.dim, got: other.dim })
        } else {
            Ok(())
        }
    }

    /// Full eigensystem of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Returns `(eigenvalue, eigenvector)` pairs sorted descending by
    /// eigenvalue. Eigenvectors are orthonormal; within a degenerate cluster
    /// the basis is arbitrary, so callers should test subspace membership
    /// rather than vector equality.
    pub fn hermitian_eigensystem(&self) -> Result<Vec<(f64, Ket)>, LinalgError> {
        let herm = self.hermiticity_residual();
        if herm > 1e-12 {
            return Err(LinalgError::NotHermitian { residual: herm });
        }
        let n = self.dim;
        let mut a = self.clone();
        let mut v = Matrix::identity(n);

        const OFF_TOL: f64 = 1e-14;
        const MAX_SWEEPS: usize = 100;

        for _ in 0..MAX_SWEEPS {
            if a.off_diagonal_norm() <= OFF_TOL {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let b = a.get(p, q);
                    let babs = b.norm();
                    if babs == 0.0 {
                        continue;
                    }
                    // Unitary 2x2 rotation zeroing a[p][q]: with diagonal
                    // entries app, aqq (real) and phase φ = arg(b), choose θ
                    // with tan 2θ = 2|b| / (app − aqq).
                    let phase = b / babs;
                    let tau = (a.get(p, p).re - a.get(q, q).re) / (2.0 * babs);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    let mut r = Matrix::identity(n);
                    r.set(p, p, C64::new(c, 0.0));
                    r.set(p, q, -phase * s);
                    r.set(q, p, phase.conj() * s);
                    r.set(q, q, C64::new(c, 0.0));

                    a = r.adjoint().mul(&a)?.mul(&r)?;
                    v = v.mul(&r)?;
                }
            }
        }

        let residual = a.off_diagonal_norm();
        if residual > 1e-10 {
            return Err(LinalgError::NoConvergence { residual });
        }

        let mut pairs: Vec<(f64, Ket)> = (0..n)
            .map(|i| {
                let col = (0..n).map(|k| v.get(k, i)).collect();
                (a.get(i, i).re, Ket { amps: col })
            })
            .collect();
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite eigenvalues"));
        Ok(pairs)
    }

    /// Eigenvalues only, sorted descending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        Ok(self
            .hermitian_eigensystem()?
            .into_iter()
            .map(|(l, _)| l)
            .collect())
    }
}

/// Pauli X.
pub fn pauli_x() -> Matrix {
    Matrix::from_fn(2, |i, j| {
        if i != j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Pauli Y.
pub fn pauli_y() -> Matrix {
    let mut m = Matrix::zeros(2);
    m.set(0, 1, C64::new(0.0, -1.0));
    m.set(1, 0, C64::new(0.0, 1.0));
    m
}

/// Pauli Z.
pub fn pauli_z() -> Matrix {
    Matrix::diag(&[1.0, -1.0])
}
