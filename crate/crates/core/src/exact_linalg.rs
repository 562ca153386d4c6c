//! Exact dense linear algebra over the rationals.
//!
//! Vectors are `Vec<Scalar>`; matrices act on column vectors. Row reduction
//! always picks the leftmost nonzero column and, inside it, the first
//! nonzero row, so canonical forms are reproducible.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("subspace is not contained in the ambient subspace")]
    NotContained,
}

static BIT_CAP: AtomicU64 = AtomicU64::new(0);

/// Caps the bit size of numerators and denominators produced during row
/// reduction. Zero disables the cap.
pub fn set_bit_cap(bits: u64) {
    BIT_CAP.store(bits, Ordering::Relaxed);
}

pub fn bit_cap() -> u64 {
    BIT_CAP.load(Ordering::Relaxed)
}

fn check_bits(row: &[Scalar]) {
    let cap = bit_cap();
    if cap == 0 {
        return;
    }
    for x in row {
        if x.numer().bits() > cap || x.denom().bits() > cap {
            panic!("arithmetic bit-size cap exceeded ({cap} bits)");
        }
    }
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_scalar(s: &str) -> Option<Scalar> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Scalar::new(p, q))
        }
        None => Some(Scalar::from_integer(s.parse().ok()?)),
    }
}

pub fn zero_vec(n: usize) -> Vec<Scalar> {
    vec![Scalar::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Scalar> {
    let mut v = zero_vec(n);
    v[i] = Scalar::one();
    v
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn add_scaled(acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += c * x;
        }
    }
}

pub fn scale_vec(c: &Scalar, v: &[Scalar]) -> Vec<Scalar> {
    v.iter().map(|x| c * x).collect()
}

pub fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Kronecker product of two vectors, index `i * b.len() + j`.
pub fn kron_vec(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut out = zero_vec(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i * b.len() + j] = x * y;
            }
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_scalar).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Vec<Scalar>>) -> Self {
        assert_eq!(entries.len(), rows, "row count");
        let mut data = Vec::with_capacity(rows * cols);
        for r in entries {
            assert_eq!(r.len(), cols, "row length");
            data.extend(r);
        }
        Matrix { rows, cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix { rows, cols, data: entries.iter().map(|&x| int(x)).collect() }
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.data[i * m.cols + j] = x.clone();
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &Scalar) {
        if !x.is_zero() {
            self.data[i * self.cols + j] += x;
        }
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Scalar]) {
        assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self.data[i * self.cols + j] = x.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let base = i * other.cols;
                for (j, b) in orow.iter().enumerate() {
                    if !b.is_zero() {
                        out.data[base + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        let nz: Vec<usize> = (0..v.len()).filter(|&k| !v[k].is_zero()).collect();
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for &k in &nz {
                    let a = &self.data[i * self.cols + k];
                    if !a.is_zero() {
                        acc += a * &v[k];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn add_assign_scaled(&mut self, c: &Scalar, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += c * b;
            }
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = &self.data[i * self.cols + j];
                if !x.is_zero() {
                    out.data[j * self.rows + i] = x.clone();
                }
            }
        }
        out
    }

    /// Kronecker product; row index `i * b.rows + k`, column `j * b.cols + l`.
    pub fn kron(&self, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * b.rows, self.cols * b.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..b.rows {
                    for l in 0..b.cols {
                        let y = b.get(k, l);
                        if !y.is_zero() {
                            out.set(i * b.rows + k, j * b.cols + l, a * y);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(parts: &[&Matrix]) -> Matrix {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows);
            for i in 0..rows {
                for j in 0..m.cols {
                    out.data[i * cols + off + j] = m.get(i, j).clone();
                }
            }
            off += m.cols;
        }
        out
    }

    pub fn vstack(parts: &[&Matrix]) -> Matrix {
        let cols = parts.first().map_or(0, |m| m.cols);
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in parts {
            assert_eq!(m.cols, cols);
            data.extend(m.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                out.data[i * idx.len() + jj] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let (rows, pivots) = rref_rows(self.to_rows(), self.cols);
        let r = rows.len();
        (Matrix::from_rows(r, self.cols, rows), pivots)
    }

    pub fn rank(&self) -> usize {
        rref_rows(self.to_rows(), self.cols).1.len()
    }

    /// Null space as a canonical subspace of the column space dimension.
    pub fn kernel(&self) -> Subspace {
        kernel_basis(self)
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        Subspace::span(self.rows, self.columns())
    }

    /// Some solution of `self * x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let aug: Vec<Vec<Scalar>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let (red, pivots) = rref_rows(aug, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vec(self.cols);
        for (r, &p) in red.iter().zip(&pivots) {
            x[p] = r[self.cols].clone();
        }
        Some(x)
    }

    /// Solves `self * X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(b.rows, self.rows);
        let aug = Matrix::hstack(&[self, b]);
        let (red, pivots) = rref_rows(aug.to_rows(), aug.cols);
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (r, &p) in red.iter().zip(&pivots) {
            for j in 0..b.cols {
                x.set(p, j, r[self.cols + j].clone());
            }
        }
        Some(x)
    }

    /// Two-sided inverse, if square and invertible.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve_matrix(&Matrix::identity(self.rows))?;
        if self.rank() == self.rows {
            Some(x)
        } else {
            None
        }
    }

    pub fn max_bits(&self) -> u64 {
        self.data.iter().map(|x| x.numer().bits().max(x.denom().bits())).max().unwrap_or(0)
    }
}

/// Row reduction of a list of rows; returns nonzero reduced rows and pivots.
pub fn rref_rows(mut rows: Vec<Vec<Scalar>>, ncols: usize) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        check_bits(&rows[r]);
        let nz: Vec<usize> = (c..ncols).filter(|&k| !rows[r][k].is_zero()).collect();
        let (head, tail) = rows.split_at_mut(r);
        let (prow, rest) = tail.split_first_mut().expect("pivot row");
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if other[c].is_zero() {
                continue;
            }
            let f = other[c].clone();
            for &k in &nz {
                let t = &f * &prow[k];
                other[k] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// A subspace of `Q^ambient` stored by its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Subspace dim {} in {}", self.dim(), self.ambient)?;
        for v in &self.basis {
            let row: Vec<String> = v.iter().map(format_scalar).collect();
            writeln!(f, "  ({})", row.join(", "))?;
        }
        Ok(())
    }
}

impl Subspace {
    pub fn span<I: IntoIterator<Item = Vec<Scalar>>>(ambient: usize, vectors: I) -> Self {
        let rows: Vec<Vec<Scalar>> = vectors
            .into_iter()
            .inspect(|v| assert_eq!(v.len(), ambient, "vector length"))
            .filter(|v| !is_zero_vec(v))
            .collect();
        let (basis, pivots) = rref_rows(rows, ambient);
        Subspace { ambient, basis, pivots }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient).map(|i| unit_vec(ambient, i)).collect(),
            pivots: (0..ambient).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis vectors as the columns of an `ambient x dim` matrix.
    pub fn basis_columns(&self) -> Matrix {
        Matrix::from_columns(self.ambient, &self.basis)
    }

    /// Residual of `v` after subtracting its component along the pivots.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ambient);
        let mut out = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if out[p].is_zero() {
                continue;
            }
            let c = out[p].clone();
            for (k, x) in b.iter().enumerate().skip(p) {
                if !x.is_zero() {
                    out[k] -= &c * x;
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn combination(&self, coords: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coords.len(), self.dim());
        let mut out = zero_vec(self.ambient);
        for (c, b) in coords.iter().zip(&self.basis) {
            add_scaled(&mut out, c, b);
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::DimensionMismatch(self.ambient, other.ambient));
        }
        Ok(Subspace::span(self.ambient, self.basis.iter().chain(&other.basis).cloned()))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        subspace_intersect(self, other)
    }

    /// Image of the subspace under a linear map `ambient -> m.rows()`.
    pub fn image_under(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        Subspace::span(m.rows(), self.basis.iter().map(|b| m.mul_vec(b)))
    }

    /// Non-pivot coordinates, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }
}

pub fn kernel_basis(m: &Matrix) -> Subspace {
    let (red, pivots) = rref_rows(m.to_rows(), m.cols());
    let mut is_pivot = vec![false; m.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors: Vec<Vec<Scalar>> = (0..m.cols())
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = unit_vec(m.cols(), f);
            for (row, &p) in red.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[p] = -row[f].clone();
                }
            }
            v
        })
        .collect();
    Subspace::span(m.cols(), vectors)
}

pub fn subspace_intersect(u: &Subspace, w: &Subspace) -> Result<Subspace, LinalgError> {
    if u.ambient != w.ambient {
        return Err(LinalgError::DimensionMismatch(u.ambient, w.ambient));
    }
    if u.dim() == 0 || w.dim() == 0 {
        return Ok(Subspace::zero(u.ambient));
    }
    // Zassenhaus: row reduce [[u, u], [w, 0]]; rows with zero left half span U ∩ W.
    let n = u.ambient;
    let rows: Vec<Vec<Scalar>> = u
        .basis
        .iter()
        .map(|b| b.iter().chain(b.iter()).cloned().collect())
        .chain(w.basis.iter().map(|b| b.iter().cloned().chain(zero_vec(n)).collect()))
        .collect();
    let (red, pivots) = rref_rows(rows, 2 * n);
    let vectors = red
        .into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= n)
        .map(|(r, _)| r[n..].to_vec());
    Ok(Subspace::span(n, vectors))
}

/// Quotient `V / W` with a projection from the ambient space and a section.
#[derive(Clone, Debug)]
pub struct Quotient {
    ambient: usize,
    kernel: Subspace,
    complement: Subspace,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.complement.dim()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// The subspace killed by the projection.
    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    /// Quotient coordinates of `v`, meaningful for `v` in `V`.
    pub fn project(&self, v: &[Scalar]) -> Vec<Scalar> {
        let r = self.kernel.reduce(v);
        self.complement.pivots.iter().map(|&p| r[p].clone()).collect()
    }

    /// Canonical lift of quotient coordinates.
    pub fn lift(&self, coords: &[Scalar]) -> Vec<Scalar> {
        self.complement.combination(coords)
    }

    pub fn lift_basis(&self, i: usize) -> &[Scalar] {
        &self.complement.basis[i]
    }

    pub fn projection(&self) -> Matrix {
        let cols: Vec<Vec<Scalar>> = (0..self.ambient).map(|j| self.project(&unit_vec(self.ambient, j))).collect();
        Matrix::from_columns(self.dim(), &cols)
    }

    pub fn section(&self) -> Matrix {
        self.complement.basis_columns()
    }

    /// Applies the projection to every column of `m`.
    pub fn project_columns(&self, m: &Matrix) -> Matrix {
        assert_eq!(m.rows(), self.ambient);
        let cols: Vec<Vec<Scalar>> = m.columns().iter().map(|c| self.project(c)).collect();
        Matrix::from_columns(self.dim(), &cols)
    }
}

pub fn quotient_space(v: &Subspace, w: &Subspace) -> Result<Quotient, LinalgError> {
    if v.ambient != w.ambient {
        return Err(LinalgError::DimensionMismatch(v.ambient, w.ambient));
    }
    if !w.is_subspace_of(v) {
        return Err(LinalgError::NotContained);
    }
    let complement = Subspace::span(v.ambient, v.basis.iter().map(|b| w.reduce(b)));
    Ok(Quotient { ambient: v.ambient, kernel: w.clone(), complement })
}

/// Quotient of the whole ambient space by `w`.
pub fn quotient_full(w: &Subspace) -> Quotient {
    let n = w.ambient;
    let free = w.free_columns();
    let complement = Subspace {
        ambient: n,
        basis: free.iter().map(|&f| unit_vec(n, f)).collect(),
        pivots: free,
    };
    Quotient { ambient: n, kernel: w.clone(), complement }
}

pub fn abs_max_bits(v: &[Scalar]) -> u64 {
    v.iter().map(|x| x.abs().numer().bits().max(x.denom().bits())).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        assert_eq!(kernel_basis(&Matrix::identity(3)).dim(), 0);
    }

    #[test]
    fn kernel_of_zero_map_is_everything() {
        assert_eq!(kernel_basis(&Matrix::zeros(2, 3)), Subspace::full(3));
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = Matrix::from_i64(2, 2, &[1, 1, 2, 2]);
        assert_eq!(kernel_basis(&m), Subspace::span(2, vec![v(&[1, -1])]));
    }

    #[test]
    fn intersection_examples() {
        let u = Subspace::span(2, vec![v(&[1, 0])]);
        let w = Subspace::span(2, vec![v(&[1, 1])]);
        assert_eq!(subspace_intersect(&u, &u).unwrap(), u);
        assert_eq!(subspace_intersect(&u, &w).unwrap().dim(), 0);
        let a = Subspace::span(3, vec![v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let b = Subspace::span(3, vec![v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert_eq!(subspace_intersect(&a, &b).unwrap(), Subspace::span(3, vec![v(&[0, 1, 0])]));
        assert!(subspace_intersect(&a, &Subspace::zero(2)).is_err());
    }

    #[test]
    fn quotient_examples() {
        let full = Subspace::full(3);
        let q0 = quotient_space(&full, &Subspace::zero(3)).unwrap();
        assert_eq!(q0.projection(), Matrix::identity(3));
        assert_eq!(quotient_space(&full, &full).unwrap().dim(), 0);
        let w = Subspace::span(3, vec![v(&[1, 1, 1])]);
        let q = quotient_space(&full, &w).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(is_zero_vec(&q.project(&v(&[1, 1, 1]))));
        assert_eq!(q.projection().mul(&q.section()), Matrix::identity(2));
        assert_eq!(q.projection().kernel(), w);
        let line = Subspace::span(3, vec![v(&[1, 0, 0])]);
        assert_eq!(quotient_space(&line, &w).unwrap_err(), LinalgError::NotContained);
    }

    #[test]
    fn quotient_full_matches_general() {
        let w = Subspace::span(4, vec![v(&[1, 2, 0, 1]), v(&[0, 1, 1, 0])]);
        let a = quotient_full(&w);
        let b = quotient_space(&Subspace::full(4), &w).unwrap();
        assert_eq!(a.projection(), b.projection());
        assert_eq!(a.section(), b.section());
    }

    #[test]
    fn solve_and_inverse() {
        let m = Matrix::from_i64(2, 2, &[2, 1, 1, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.solve(&v(&[3, 2])).unwrap(), v(&[1, 1]));
        let sing = Matrix::from_i64(2, 2, &[1, 1, 1, 1]);
        assert!(sing.solve(&v(&[1, 0])).is_none());
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn scalar_format_roundtrip() {
        for s in ["0", "-3", "7/2", "-1/3"] {
            assert_eq!(format_scalar(&parse_scalar(s).unwrap()), s);
        }
        assert_eq!(format_scalar(&parse_scalar("4/6").unwrap()), "2/3");
        assert!(parse_scalar("1/0").is_none());
    }
}
