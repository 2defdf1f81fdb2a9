//! Dense complex matrix kernel.
//!
//! [`ComplexMatrix`] is a thin newtype over `nalgebra::DMatrix<Complex64>` that
//! refuses non-finite entries at construction. Linear solves use our own
//! partial-pivoted elimination so that "singular" has one fixed meaning across
//! the crate: a pivot below `1e-14 * |A|_inf`. Every resolvent-set membership
//! decision downstream is made by that criterion.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative pivot threshold below which [`solve`] reports a singular matrix.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// Hermitian-ness tolerance for [`hermitian_eigen`], relative to `|H|_inf`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn finite(z: &Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn scalar(value: Complex64) -> Self {
        Self(DMatrix::from_element(1, 1, value))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = *d;
        }
        Self(m)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if !entries.iter().all(finite) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Complex64) {
        self.0[(r, c)] = value;
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.0[(r, c)]).collect())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(finite)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `(A + A*) / 2`.
    pub fn real_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// `(A - A*) / (2i)`.
    pub fn imag_part(&self) -> Self {
        Self((&self.0 - self.0.adjoint()) * Complex64::new(0.0, -0.5))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(&self.0 * factor)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `|self - other|_inf`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).norm_inf()
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.view((r0, c0), (rows, cols)).into_owned())
    }

    /// `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Result<Self> {
        if a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols() {
            return Err(Error::DimensionMismatch("incompatible blocks".into()));
        }
        let (n1, n2) = (a.rows(), c.rows());
        let (m1, m2) = (a.cols(), b.cols());
        let mut out = DMatrix::zeros(n1 + n2, m1 + m2);
        out.view_mut((0, 0), (n1, m1)).copy_from(&a.0);
        out.view_mut((0, m1), (n1, m2)).copy_from(&b.0);
        out.view_mut((n1, 0), (n2, m1)).copy_from(&c.0);
        out.view_mut((n1, m1), (n2, m2)).copy_from(&d.0);
        Ok(Self(out))
    }

    pub fn block_diag(a: &Self, d: &Self) -> Self {
        let b = Self::zeros(a.rows(), d.cols());
        let c = Self::zeros(d.rows(), a.cols());
        Self::from_blocks(a, &b, &c, d).expect("block_diag shapes are consistent")
    }

    pub fn vstack(top: &Self, bottom: &Self) -> Result<Self> {
        if top.cols() != bottom.cols() {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut out = DMatrix::zeros(top.rows() + bottom.rows(), top.cols());
        out.view_mut((0, 0), top.shape()).copy_from(&top.0);
        out.view_mut((top.rows(), 0), bottom.shape()).copy_from(&bottom.0);
        Ok(Self(out))
    }

    /// Numerical rank: singular values above `rel_tol * sigma_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let sv = self.0.clone().svd(false, false).singular_values;
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        if smax == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > rel_tol * smax).count()
    }

    /// Hermitian residual `|H - H*|_inf`.
    pub fn hermitian_residual(&self) -> f64 {
        self.distance(&self.adjoint())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{:?}", self.to_rows())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a> $tr<&'a ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op &rhs.0)
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
///
/// Fails with [`Error::SingularMatrix`] as soon as the largest available pivot
/// in a column drops below `1e-14 * |A|_inf`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: A is {}x{}, B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    let n = a.rows();
    let threshold = PIVOT_THRESHOLD * a.norm_inf();
    let mut lu = a.0.clone();
    let mut x = b.0.clone();

    for col in 0..n {
        let (piv_row, piv_abs) = (col..n)
            .map(|r| (r, lu[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv_abs > threshold) || piv_abs == 0.0 {
            return Err(Error::SingularMatrix { pivot: piv_abs.max(0.0), threshold });
        }
        if piv_row != col {
            lu.swap_rows(piv_row, col);
            x.swap_rows(piv_row, col);
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            lu[(r, col)] = Complex64::new(0.0, 0.0);
            for k in col + 1..n {
                let v = lu[(col, k)];
                lu[(r, k)] -= factor * v;
            }
            for k in 0..x.ncols() {
                let v = x[(col, k)];
                x[(r, k)] -= factor * v;
            }
        }
    }

    for k in 0..x.ncols() {
        for r in (0..n).rev() {
            let mut acc = x[(r, k)];
            for j in r + 1..n {
                acc -= lu[(r, j)] * x[(j, k)];
            }
            x[(r, k)] = acc / lu[(r, r)];
        }
    }
    Ok(ComplexMatrix(x))
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// Conjugate transpose as a free function.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Unitary; column `k` pairs with `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("hermitian_eigen needs a square matrix".into()));
    }
    let residual = h.hermitian_residual();
    if residual > HERMITIAN_TOLERANCE * h.norm_inf() {
        return Err(Error::NotHermitian { residual });
    }
    let sym = h.real_part();
    let eig = sym.0.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let n = h.rows();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: ComplexMatrix(vectors),
    })
}
