//! Exact dense linear algebra over a [`Scalar`] field.
//!
//! Matrices are small (tens of rows) in every computation this crate
//! performs, so plain Gauss-Jordan elimination with first-nonzero pivoting
//! is used throughout. Entry growth under big rationals is accepted.

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// Dense row-major matrix. `0 x n` and `n x 0` shapes are legal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Builds a matrix from row-major data; panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_ints(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&v| F::from_int(v)).collect())
    }

    /// Builds a matrix from a list of rows of equal length.
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: n, cols, data }
    }

    /// A `1 x 1` matrix.
    pub fn scalar(v: F) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    /// A single column holding `v`.
    pub fn column(v: Vec<F>) -> Self {
        let n = v.len();
        Self::from_vec(n, 1, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<F> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "shape mismatch in product: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sum");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in difference");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Adds `c * rhs` in place.
    pub fn add_scaled(&mut self, c: &F, rhs: &Self) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in axpy");
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a = a.clone() + c.clone() * b.clone();
            }
        }
    }

    /// Block diagonal `[[self, 0], [0, other]]`.
    pub fn block_diag(&self, other: &Self) -> Self {
        let zero_tr = Self::zeros(self.rows, other.cols);
        let zero_bl = Self::zeros(other.rows, self.cols);
        Self::block2x2(self, &zero_tr, &zero_bl, other)
    }

    /// Assembles `[[a, b], [c, d]]`; block shapes must be compatible.
    pub fn block2x2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows, "block rows mismatch");
        assert_eq!(c.rows, d.rows, "block rows mismatch");
        assert_eq!(a.cols, c.cols, "block cols mismatch");
        assert_eq!(b.cols, d.cols, "block cols mismatch");
        let top = Self::hstack(&[a, b]);
        let bottom = Self::hstack(&[c, d]);
        Self::vstack(&[&top, &bottom])
    }

    /// Horizontal concatenation. All blocks must share a row count;
    /// an empty list yields `0 x 0`.
    pub fn hstack(blocks: &[&Self]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack rows mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, offset + j)] = b[(i, j)].clone();
                }
            }
            offset += b.cols;
        }
        out
    }

    /// Vertical concatenation. All blocks must share a column count.
    pub fn vstack(blocks: &[&Self]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack cols mismatch");
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    /// Vertical concatenation with an explicit column count, so that an
    /// empty list still has a definite shape.
    pub fn vstack_with_cols(cols: usize, blocks: &[Self]) -> Self {
        let refs: Vec<&Self> = blocks.iter().collect();
        if refs.is_empty() {
            return Self::zeros(0, cols);
        }
        let out = Self::vstack(&refs);
        assert_eq!(out.cols, cols, "vstack cols mismatch");
        out
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            let inv = F::one() / a[(r, c)].clone();
            for j in c..a.cols {
                a[(r, j)] = a[(r, j)].clone() * inv.clone();
            }
            for i in 0..a.rows {
                if i == r || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in c..a.cols {
                    if !a[(r, j)].is_zero() {
                        a[(i, j)] = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        // Eliminate along the shorter side.
        if self.rows > self.cols {
            self.transpose().rref().1.len()
        } else {
            self.rref().1.len()
        }
    }

    /// Basis of the right nullspace `{x : self * x = 0}`.
    ///
    /// One vector per free column of the reduced echelon form, with a `1`
    /// in that free coordinate.
    pub fn kernel_basis(&self) -> SubspaceBasis<F> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut vectors = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, free)].clone();
            }
            vectors.push(v);
        }
        SubspaceBasis {
            ambient: self.cols,
            vectors,
        }
    }

    /// Basis of the column space, given by the pivot columns.
    pub fn column_space_basis(&self) -> SubspaceBasis<F> {
        let (_, pivots) = self.rref();
        let vectors = pivots
            .iter()
            .map(|&c| (0..self.rows).map(|i| self[(i, c)].clone()).collect())
            .collect();
        SubspaceBasis {
            ambient: self.rows,
            vectors,
        }
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::hstack(&[self, &Self::identity(n)]);
        let (r, pivots) = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;

    fn index(&self, (i, j): (usize, usize)) -> &F {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<F: fmt::Display> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]({}x{})", self.rows, self.cols)
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &self.data)
            .finish()
    }
}

/// Linearly independent vectors spanning a subspace of `F^ambient`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis<F> {
    pub ambient: usize,
    pub vectors: Vec<Vec<F>>,
}

impl<F: Scalar> SubspaceBasis<F> {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// The basis vectors as the columns of an `ambient x dim` matrix.
    pub fn as_columns(&self) -> Matrix<F> {
        let mut m = Matrix::zeros(self.ambient, self.vectors.len());
        for (j, v) in self.vectors.iter().enumerate() {
            for (i, x) in v.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    /// Exact membership test.
    pub fn contains(&self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut cols = self.as_columns();
        let base = cols.rank();
        cols = Matrix::hstack(&[&cols, &Matrix::column(v.to_vec())]);
        cols.rank() == base
    }

    /// The combination `sum_i coeffs[i] * vectors[i]`.
    pub fn combine(&self, coeffs: &[F]) -> Vec<F> {
        assert_eq!(coeffs.len(), self.vectors.len(), "coefficient count mismatch");
        let mut out = vec![F::zero(); self.ambient];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o = o.clone() + c.clone() * x.clone();
            }
        }
        out
    }
}

/// The matrix of a linear map `F^n_in -> F^n_out`, obtained by evaluating
/// the map on the standard basis.
pub fn matrix_of_linear_map<F, M>(n_in: usize, n_out: usize, map: M) -> Matrix<F>
where
    F: Scalar,
    M: Fn(&[F]) -> Vec<F>,
{
    let mut m = Matrix::zeros(n_out, n_in);
    let mut e = vec![F::zero(); n_in];
    for j in 0..n_in {
        e[j] = F::one();
        let image = map(&e);
        assert_eq!(image.len(), n_out, "linear map returned wrong length");
        for (i, v) in image.into_iter().enumerate() {
            m[(i, j)] = v;
        }
        e[j] = F::zero();
    }
    m
}

/// The generator behind every seeded draw in this crate: ChaCha8 keyed by
/// `seed_from_u64`, which is portable and stable across platforms.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic matrix with integer entries uniform in `[-bound, bound]`.
pub fn random_matrix<F: Scalar>(rows: usize, cols: usize, seed: u64, bound: i64) -> Matrix<F> {
    random_matrix_with(&mut seeded_rng(seed), rows, cols, bound)
}

/// As [`random_matrix`], drawing from a caller-owned generator.
pub fn random_matrix_with<F: Scalar, R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    bound: i64,
) -> Matrix<F> {
    assert!(bound >= 1, "entry bound must be at least 1");
    let data = (0..rows * cols)
        .map(|_| F::from_int(rng.gen_range(-bound..=bound)))
        .collect();
    Matrix::from_vec(rows, cols, data)
}

/// Draws random matrices until an invertible one appears.
pub fn random_invertible_with<F: Scalar, R: Rng>(rng: &mut R, n: usize, bound: i64) -> Matrix<F> {
    loop {
        let m = random_matrix_with(rng, n, n, bound);
        if m.is_invertible() {
            return m;
        }
    }
}
