//! Dense complex Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense `n x n` complex matrix stored row-major.
///
/// Constructors that fill both triangles at once keep `H = H^dagger` exactly;
/// [`HermitianMatrix::from_rows`] checks the property instead.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Builds a matrix from row-major entries, rejecting anything that is not
    /// Hermitian within [`HERMITIAN_TOL`].
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        let m = Self { dim, data };
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { defect });
        }
        Ok(m)
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real_rows(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// Sets `H[i][j] = value` and `H[j][i] = conj(value)`. Diagonal entries
    /// keep only the real part.
    pub fn set_pair(&mut self, i: usize, j: usize, value: Complex64) {
        if i == j {
            self.data[i * self.dim + i] = Complex64::new(value.re, 0.0);
        } else {
            self.data[i * self.dim + j] = value;
            self.data[j * self.dim + i] = value.conj();
        }
    }

    /// Adds `value` to `H[i][j]` and its conjugate to `H[j][i]`.
    pub fn add_pair(&mut self, i: usize, j: usize, value: Complex64) {
        let cur = self.get(i, j);
        self.set_pair(i, j, cur + value);
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim.max(1))
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length must match matrix dimension"
        );
        self.rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Number of nonzero off-diagonal entries.
    pub fn off_diagonal_nonzeros(&self) -> usize {
        let n = self.dim;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.get(i, j) != Complex64::new(0.0, 0.0))
            .count()
    }

    /// Principal submatrix on the given index set, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> HermitianMatrix {
        let k = idx.len();
        let mut out = HermitianMatrix::zeros(k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out.data[a * k + b] = self.get(i, j);
            }
        }
        out
    }
}

/// `<a|b>` with the first argument conjugated.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
