//! Dense complex linear algebra with validated structure.
//!
//! Everything downstream (states, POV measures, Kraus instruments) is built
//! from two immutable types: [`Operator`], a dense complex square matrix, and
//! [`Vector`], a dense complex column vector. Structural predicates
//! (Hermitian, positive semidefinite, projection) are tolerance-based; the
//! default tolerance is [`DEFAULT_TOL`] and every check takes an explicit
//! override.
//!
//! Inner products follow the physics convention: `⟨u, v⟩ = Σ conj(u_i) v_i`,
//! antilinear in the first argument.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default structural tolerance. Dimensions in this crate stay small
/// (the CLI caps them at 64), so double-precision eigendecompositions are
/// far tighter than this.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Dense complex square matrix, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: DMatrix<Complex64>,
}

/// Dense complex column vector, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    vec: DVector<Complex64>,
}

/// Eigendecomposition of a Hermitian operator: real eigenvalues in ascending
/// order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vector>,
}

impl Operator {
    /// Build from row-major entries. Fails unless the rows form a non-empty
    /// square matrix of finite entries.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        for row in &rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
        }
        let mat = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
        let op = Self { mat };
        op.check_finite()?;
        Ok(op)
    }

    /// Build from a function of (row, column). Panics on non-finite entries.
    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        let op = Self {
            mat: DMatrix::from_fn(dim, dim, f),
        };
        op.check_finite().expect("operator entries must be finite");
        op
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    /// Diagonal matrix with real entries.
    pub fn diag_real(entries: &[f64]) -> Self {
        Self::from_fn(entries.len(), |i, j| {
            if i == j {
                Complex64::new(entries[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.mat[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    /// Row-major copy of the entries.
    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.mat[(i, j)]).collect())
            .collect()
    }

    /// Conjugate transpose: `result[i][j] = conj(self[j][i])`.
    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.scale_complex(Complex64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            mat: &self.mat * factor,
        }
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim(), v.dim(), "operator/vector dimension mismatch");
        Vector {
            vec: &self.mat * &v.vec,
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude of the commutator `[self, other]`.
    pub fn commutator_max_abs(&self, other: &Self) -> f64 {
        (self * other).max_abs_diff(&(other * self))
    }

    /// Max entrywise deviation from `A = A†`.
    pub fn hermiticity_gap(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_gap() <= tol
    }

    /// Max entrywise deviation from `A² = A`.
    pub fn projection_gap(&self) -> f64 {
        (self * self).max_abs_diff(self)
    }

    /// Hermitian and idempotent within `tol`.
    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.projection_gap() <= tol
    }

    /// Smallest eigenvalue of a Hermitian operator.
    pub fn min_eigenvalue(&self, tol: f64) -> Result<f64> {
        let eig = self.hermitian_eigen(tol)?;
        Ok(eig.eigenvalues[0])
    }

    /// Hermitian with all eigenvalues ≥ `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        match self.min_eigenvalue(tol) {
            Ok(min) => min >= -tol,
            Err(_) => false,
        }
    }

    /// Eigendecomposition of a Hermitian operator. Eigenvalues come out
    /// ascending; eigenvectors are orthonormal and satisfy
    /// `A = Σ λ_k |v_k⟩⟨v_k|` up to round-off.
    pub fn hermitian_eigen(&self, tol: f64) -> Result<HermitianEigen> {
        let gap = self.hermiticity_gap();
        if gap > tol {
            return Err(Error::NotHermitian { gap });
        }
        // Symmetrize before factoring so the decomposition is well defined
        // for inputs that are Hermitian only within tol.
        let sym = (&self.mat + self.mat.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = sym.symmetric_eigen();
        let dim = self.dim();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = order
            .iter()
            .map(|&k| Vector {
                vec: eig.eigenvectors.column(k).into_owned(),
            })
            .collect();
        Ok(HermitianEigen {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Positive semidefinite square root.
    ///
    /// Eigenvalues in `[-tol, 0]` are clamped to zero before rooting, so
    /// numerically rank-deficient inputs still have a square root. Fails
    /// with [`Error::NotPsd`] when an eigenvalue lies below `-tol`.
    pub fn psd_sqrt(&self, tol: f64) -> Result<Self> {
        let eig = self.hermitian_eigen(tol)?;
        let min = eig.eigenvalues[0];
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        let dim = self.dim();
        let mut root = DMatrix::<Complex64>::zeros(dim, dim);
        for (lambda, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            let clamped = lambda.max(0.0);
            let s = Complex64::new(clamped.sqrt(), 0.0);
            root += (&v.vec * v.vec.adjoint()) * s;
        }
        Ok(Self { mat: root })
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Vector {
    /// Build from entries. Fails on empty input or non-finite entries.
    pub fn from_entries(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: 0 });
            }
        }
        Ok(Self {
            vec: DVector::from_vec(entries),
        })
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        Self {
            vec: DVector::from_fn(dim, |i, _| {
                if i == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.vec.nrows()
    }

    pub fn entry(&self, i: usize) -> Complex64 {
        self.vec[i]
    }

    pub fn entries(&self) -> Vec<Complex64> {
        self.vec.iter().copied().collect()
    }

    /// `⟨self, other⟩ = Σ conj(self_i) other_i` (antilinear in `self`).
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.vec.dotc(&other.vec)
    }

    pub fn norm(&self) -> f64 {
        self.vec.norm()
    }

    /// `|‖v‖ - 1|`.
    pub fn unit_gap(&self) -> f64 {
        (self.norm() - 1.0).abs()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        self.unit_gap() <= tol
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            vec: &self.vec * factor,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Self {
            vec: &self.vec + &other.vec,
        }
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> Operator {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Operator {
            mat: &self.vec * other.vec.adjoint(),
        }
    }
}

// Wire format: a complex number is a two-element array [re, im]; an operator
// is its row-major nested array of those; a vector is a flat array of them.

fn complex_to_pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| complex_to_pair(&self.mat[(i, j)]))
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        Operator::from_rows(rows).map_err(D::Error::custom)
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<[f64; 2]> = self.vec.iter().map(complex_to_pair).collect();
        entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        let entries = entries
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        Vector::from_entries(entries).map_err(D::Error::custom)
    }
}
