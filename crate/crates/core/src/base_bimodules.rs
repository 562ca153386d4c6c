//! Semisimple base rings, finite-dimensional bimodules over them, tensor
//! products over the base, duals and (co)evaluation maps.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact_linalg::{
    add_scaled, int, is_zero_vec, kron_vec, quotient_full, unit_vec, zero_vec, Matrix, Quotient, Scalar,
    Subspace,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BimoduleError {
    #[error("structure constants have wrong shape: {0}")]
    Shape(String),
    #[error("structure constants not associative at ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit vector is not a two-sided unit at basis element {0}")]
    NotUnital(usize),
    #[error("base ring is not semisimple (trace form degenerate)")]
    NotSemisimple,
    #[error("{side} action is not associative for basis pair ({a},{b})")]
    ActionNotAssociative { side: &'static str, a: usize, b: usize },
    #[error("{0} action of the unit is not the identity")]
    ActionNotUnital(&'static str),
    #[error("left action of {0} does not commute with right action of {1}")]
    ActionsDoNotCommute(usize, usize),
    #[error("base ring mismatch")]
    BaseMismatch,
    #[error("subspace is not a sub-bimodule")]
    NotSubBimodule,
    #[error("map does not intertwine the actions")]
    NotBimoduleMap,
    #[error("coevaluation system is singular")]
    SingularCoevaluation,
}

/// Finite-dimensional algebra `k` with basis `b_0..b_{n-1}`.
#[derive(Debug, PartialEq, Eq)]
pub struct BaseRing {
    dim: usize,
    mult: Vec<Vec<Vec<Scalar>>>,
    unit: Vec<Scalar>,
    left_mult: Vec<Matrix>,
    right_mult: Vec<Matrix>,
    labels: Vec<String>,
}

impl BaseRing {
    /// `mult[i][j]` holds the coordinates of `b_i * b_j`.
    pub fn new(mult: Vec<Vec<Vec<Scalar>>>, unit: Vec<Scalar>, labels: Vec<String>) -> Result<Arc<Self>, BimoduleError> {
        let dim = unit.len();
        if mult.len() != dim || mult.iter().any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim)) {
            return Err(BimoduleError::Shape(format!("expected {dim}x{dim} products of length {dim}")));
        }
        if labels.len() != dim {
            return Err(BimoduleError::Shape("label count".into()));
        }
        let left_mult: Vec<Matrix> = (0..dim)
            .map(|i| Matrix::from_columns(dim, &(0..dim).map(|j| mult[i][j].clone()).collect::<Vec<_>>()))
            .collect();
        let right_mult: Vec<Matrix> = (0..dim)
            .map(|i| Matrix::from_columns(dim, &(0..dim).map(|j| mult[j][i].clone()).collect::<Vec<_>>()))
            .collect();
        let ring = BaseRing { dim, mult, unit, left_mult, right_mult, labels };
        for i in 0..dim {
            for j in 0..dim {
                for l in 0..dim {
                    let lhs = ring.mul(&ring.mult[i][j], &unit_vec(dim, l));
                    let rhs = ring.mul(&unit_vec(dim, i), &ring.mult[j][l]);
                    if lhs != rhs {
                        return Err(BimoduleError::NotAssociative(i, j, l));
                    }
                }
            }
        }
        for i in 0..dim {
            let e = unit_vec(dim, i);
            if ring.mul(&ring.unit, &e) != e || ring.mul(&e, &ring.unit) != e {
                return Err(BimoduleError::NotUnital(i));
            }
        }
        if ring.trace_form().rank() != dim {
            return Err(BimoduleError::NotSemisimple);
        }
        Ok(Arc::new(ring))
    }

    pub fn field() -> Arc<Self> {
        Self::product_of_fields(1)
    }

    /// `Q^n` with orthogonal idempotents `e_0..e_{n-1}`.
    pub fn product_of_fields(n: usize) -> Arc<Self> {
        let mult = (0..n)
            .map(|i| (0..n).map(|j| if i == j { unit_vec(n, i) } else { zero_vec(n) }).collect())
            .collect();
        let labels = if n == 1 { vec!["1".to_string()] } else { (0..n).map(|i| format!("e{i}")).collect() };
        Self::new(mult, vec![int(1); n], labels).expect("product of fields is semisimple")
    }

    /// Group algebra from a multiplication table on `0..n`, identity `id`.
    pub fn group_algebra(table: &[Vec<usize>], id: usize, labels: Vec<String>) -> Result<Arc<Self>, BimoduleError> {
        let n = table.len();
        let mult = (0..n).map(|i| (0..n).map(|j| unit_vec(n, table[i][j])).collect()).collect();
        Self::new(mult, unit_vec(n, id), labels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<Scalar>>] {
        &self.mult
    }

    pub fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        let mut out = zero_vec(self.dim);
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                add_scaled(&mut out, &(x * y), &self.mult[i][j]);
            }
        }
        out
    }

    /// Matrix of `x -> b_i x`.
    pub fn left_mult(&self, i: usize) -> &Matrix {
        &self.left_mult[i]
    }

    /// Matrix of `x -> x b_i`.
    pub fn right_mult(&self, i: usize) -> &Matrix {
        &self.right_mult[i]
    }

    pub fn left_mult_by(&self, a: &[Scalar]) -> Matrix {
        combine(&self.left_mult, a, self.dim)
    }

    pub fn right_mult_by(&self, a: &[Scalar]) -> Matrix {
        combine(&self.right_mult, a, self.dim)
    }

    /// Gram matrix of `(a, b) -> trace(L_a L_b)`.
    pub fn trace_form(&self) -> Matrix {
        let mut g = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let p = self.left_mult[i].mul(&self.left_mult[j]);
                let mut t = Scalar::zero();
                for l in 0..self.dim {
                    t += p.get(l, l);
                }
                g.set(i, j, t);
            }
        }
        g
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.mult[i][j] == self.mult[j][i]))
    }
}

/// `sum_i coeffs[i] * mats[i]`.
pub fn combine(mats: &[Matrix], coeffs: &[Scalar], n: usize) -> Matrix {
    let mut out = Matrix::zeros(n, n);
    for (m, c) in mats.iter().zip(coeffs) {
        out.add_assign_scaled(c, m);
    }
    out
}

/// A finite-dimensional `k`-bimodule. `left[a]` has columns `b_a . e_j`,
/// `right[a]` has columns `e_j . b_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    base: Arc<BaseRing>,
    dim: usize,
    left: Vec<Matrix>,
    right: Vec<Matrix>,
}

impl Bimodule {
    pub fn new(base: Arc<BaseRing>, dim: usize, left: Vec<Matrix>, right: Vec<Matrix>) -> Result<Self, BimoduleError> {
        let m = Self::new_unchecked(base, dim, left, right)?;
        m.validate()?;
        Ok(m)
    }

    /// Builds without checking the module axioms (shapes are still checked).
    pub fn new_unchecked(base: Arc<BaseRing>, dim: usize, left: Vec<Matrix>, right: Vec<Matrix>) -> Result<Self, BimoduleError> {
        let n = base.dim();
        if left.len() != n || right.len() != n {
            return Err(BimoduleError::Shape(format!("expected {n} action matrices per side")));
        }
        if left.iter().chain(&right).any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(BimoduleError::Shape(format!("action matrices must be {dim}x{dim}")));
        }
        Ok(Bimodule { base, dim, left, right })
    }

    /// First violated axiom, if any.
    pub fn validate(&self) -> Result<(), BimoduleError> {
        let n = self.base.dim();
        let id = Matrix::identity(self.dim);
        if self.left_op(self.base.unit()) != id {
            return Err(BimoduleError::ActionNotUnital("left"));
        }
        if self.right_op(self.base.unit()) != id {
            return Err(BimoduleError::ActionNotUnital("right"));
        }
        for a in 0..n {
            for b in 0..n {
                let ab = &self.base.mult[a][b];
                if self.left[a].mul(&self.left[b]) != self.left_op(ab) {
                    return Err(BimoduleError::ActionNotAssociative { side: "left", a, b });
                }
                if self.right[b].mul(&self.right[a]) != self.right_op(ab) {
                    return Err(BimoduleError::ActionNotAssociative { side: "right", a, b });
                }
                if self.left[a].mul(&self.right[b]) != self.right[b].mul(&self.left[a]) {
                    return Err(BimoduleError::ActionsDoNotCommute(a, b));
                }
            }
        }
        Ok(())
    }

    pub fn regular(base: &Arc<BaseRing>) -> Self {
        let n = base.dim();
        Bimodule {
            base: base.clone(),
            dim: n,
            left: (0..n).map(|i| base.left_mult(i).clone()).collect(),
            right: (0..n).map(|i| base.right_mult(i).clone()).collect(),
        }
    }

    pub fn zero(base: &Arc<BaseRing>) -> Self {
        let n = base.dim();
        Bimodule { base: base.clone(), dim: 0, left: vec![Matrix::zeros(0, 0); n], right: vec![Matrix::zeros(0, 0); n] }
    }

    /// `Q^n` over the field base ring.
    pub fn free_over_field(base: &Arc<BaseRing>, n: usize) -> Self {
        assert_eq!(base.dim(), 1);
        Bimodule { base: base.clone(), dim: n, left: vec![Matrix::identity(n)], right: vec![Matrix::identity(n)] }
    }

    pub fn base(&self) -> &Arc<BaseRing> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left(&self, a: usize) -> &Matrix {
        &self.left[a]
    }

    pub fn right(&self, a: usize) -> &Matrix {
        &self.right[a]
    }

    pub fn left_mats(&self) -> &[Matrix] {
        &self.left
    }

    pub fn right_mats(&self) -> &[Matrix] {
        &self.right
    }

    pub fn left_op(&self, a: &[Scalar]) -> Matrix {
        combine(&self.left, a, self.dim)
    }

    pub fn right_op(&self, a: &[Scalar]) -> Matrix {
        combine(&self.right, a, self.dim)
    }

    pub fn same_base(&self, other: &Bimodule) -> bool {
        Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base
    }

    pub fn is_sub_bimodule(&self, s: &Subspace) -> bool {
        s.ambient() == self.dim
            && s.basis().iter().all(|v| {
                self.left.iter().chain(&self.right).all(|m| s.contains(&m.mul_vec(v)))
            })
    }

    /// Sub-bimodule generated by the given vectors.
    pub fn generate(&self, vectors: &[Vec<Scalar>]) -> Subspace {
        let n = self.base.dim();
        let mut out = Vec::new();
        for v in vectors {
            for a in 0..n {
                let lv = self.left[a].mul_vec(v);
                for b in 0..n {
                    out.push(self.right[b].mul_vec(&lv));
                }
            }
        }
        Subspace::span(self.dim, out)
    }

    /// Restriction to a stable subspace, in the coordinates of its basis.
    pub fn sub(&self, s: &Subspace) -> Result<Bimodule, BimoduleError> {
        if !self.is_sub_bimodule(s) {
            return Err(BimoduleError::NotSubBimodule);
        }
        let restrict = |m: &Matrix| {
            let cols: Vec<Vec<Scalar>> =
                s.basis().iter().map(|v| s.coordinates(&m.mul_vec(v)).expect("stable")).collect();
            Matrix::from_columns(s.dim(), &cols)
        };
        Ok(Bimodule {
            base: self.base.clone(),
            dim: s.dim(),
            left: self.left.iter().map(restrict).collect(),
            right: self.right.iter().map(restrict).collect(),
        })
    }

    /// Quotient by a sub-bimodule of the whole space.
    pub fn quotient(&self, s: &Subspace) -> Result<(Bimodule, Quotient), BimoduleError> {
        if !self.is_sub_bimodule(s) {
            return Err(BimoduleError::NotSubBimodule);
        }
        let q = quotient_full(s);
        let induce = |m: &Matrix| {
            let cols: Vec<Vec<Scalar>> = (0..q.dim()).map(|i| q.project(&m.mul_vec(q.lift_basis(i)))).collect();
            Matrix::from_columns(q.dim(), &cols)
        };
        let module = Bimodule {
            base: self.base.clone(),
            dim: q.dim(),
            left: self.left.iter().map(induce).collect(),
            right: self.right.iter().map(induce).collect(),
        };
        Ok((module, q))
    }

    pub fn direct_sum(parts: &[&Bimodule]) -> Result<Bimodule, BimoduleError> {
        let base = parts.first().map(|p| p.base.clone()).ok_or(BimoduleError::Shape("empty sum".into()))?;
        if parts.iter().any(|p| !p.same_base(parts[0])) {
            return Err(BimoduleError::BaseMismatch);
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        let n = base.dim();
        let block = |side: &dyn Fn(&Bimodule) -> &[Matrix], a: usize| {
            let mut m = Matrix::zeros(dim, dim);
            let mut off = 0;
            for p in parts {
                let x = &side(p)[a];
                for i in 0..p.dim {
                    for j in 0..p.dim {
                        m.set(off + i, off + j, x.get(i, j).clone());
                    }
                }
                off += p.dim;
            }
            m
        };
        let left = (0..n).map(|a| block(&|p: &Bimodule| p.left.as_slice(), a)).collect();
        let right = (0..n).map(|a| block(&|p: &Bimodule| p.right.as_slice(), a)).collect();
        Ok(Bimodule { base, dim, left, right })
    }

    /// Space of bimodule endomorphisms / maps into `target`, as matrices.
    pub fn hom_space(&self, target: &Bimodule) -> Subspace {
        let mut pairs = Vec::new();
        for a in 0..self.base.dim() {
            pairs.push((self.left[a].clone(), target.left[a].clone()));
            pairs.push((self.right[a].clone(), target.right[a].clone()));
        }
        intertwiner_space(self.dim, target.dim, &pairs)
    }
}

/// All `t x s` matrices `F` with `F A = B F` for every pair `(A, B)`;
/// flattened row-major.
pub fn intertwiner_space(s: usize, t: usize, pairs: &[(Matrix, Matrix)]) -> Subspace {
    let nvar = s * t;
    let mut rows = Vec::new();
    for (a, b) in pairs {
        for i in 0..t {
            for j in 0..s {
                let mut row = zero_vec(nvar);
                for k in 0..s {
                    let x = a.get(k, j);
                    if !x.is_zero() {
                        row[i * s + k] += x;
                    }
                }
                for k in 0..t {
                    let x = b.get(i, k);
                    if !x.is_zero() {
                        row[k * s + j] -= x;
                    }
                }
                if !is_zero_vec(&row) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return Subspace::full(nvar);
    }
    Matrix::from_rows(rows.len(), nvar, rows).kernel()
}

pub fn unflatten(v: &[Scalar], rows: usize, cols: usize) -> Matrix {
    Matrix::from_rows(rows, cols, v.chunks(cols).map(|c| c.to_vec()).collect())
}

pub fn flatten(m: &Matrix) -> Vec<Scalar> {
    m.entries().to_vec()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BimoduleMap {
    pub source: Bimodule,
    pub target: Bimodule,
    pub matrix: Matrix,
}

impl BimoduleMap {
    pub fn new(source: Bimodule, target: Bimodule, matrix: Matrix) -> Result<Self, BimoduleError> {
        if !source.same_base(&target) {
            return Err(BimoduleError::BaseMismatch);
        }
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(BimoduleError::Shape("map shape".into()));
        }
        for a in 0..source.base().dim() {
            if matrix.mul(source.left(a)) != target.left(a).mul(&matrix)
                || matrix.mul(source.right(a)) != target.right(a).mul(&matrix)
            {
                return Err(BimoduleError::NotBimoduleMap);
            }
        }
        Ok(BimoduleMap { source, target, matrix })
    }
}

/// `E (x)_k F` with its surjection from the plain tensor product
/// (raw index `i * dim F + j`).
#[derive(Clone, Debug)]
pub struct TensorProduct {
    pub module: Bimodule,
    pub quotient: Quotient,
    pub left_dim: usize,
    pub right_dim: usize,
}

impl TensorProduct {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn project(&self, raw: &[Scalar]) -> Vec<Scalar> {
        self.quotient.project(raw)
    }

    pub fn project_pair(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        self.quotient.project(&kron_vec(x, y))
    }

    /// Raw lift of basis element `i` (a single pure tensor of basis vectors).
    pub fn lift_pair(&self, i: usize) -> (usize, usize) {
        let raw = self.quotient.lift_basis(i);
        let idx = raw.iter().position(|x| !x.is_zero()).expect("nonzero lift");
        (idx / self.right_dim, idx % self.right_dim)
    }

    pub fn lift(&self, coords: &[Scalar]) -> Vec<Scalar> {
        self.quotient.lift(coords)
    }

    /// Matrix of `x (x) y -> f(x) (x) g(y)` into another tensor product.
    pub fn map_tensor(&self, f: &Matrix, g: &Matrix, target: &TensorProduct) -> Matrix {
        let cols: Vec<Vec<Scalar>> = (0..self.dim())
            .map(|i| {
                let (a, b) = self.lift_pair(i);
                target.project_pair(&f.column(a), &g.column(b))
            })
            .collect();
        Matrix::from_columns(target.dim(), &cols)
    }
}

/// Middle-linearity relations `(e a) (x) f - e (x) (a f)`.
pub fn balanced_relations(right_of_e: &[Matrix], left_of_f: &[Matrix], de: usize, df: usize) -> Subspace {
    let mut rels = Vec::new();
    for (ra, la) in right_of_e.iter().zip(left_of_f) {
        for i in 0..de {
            let ea = ra.column(i);
            for j in 0..df {
                let af = la.column(j);
                let mut v = kron_vec(&ea, &unit_vec(df, j));
                let w = kron_vec(&unit_vec(de, i), &af);
                for (x, y) in v.iter_mut().zip(&w) {
                    if !y.is_zero() {
                        *x -= y;
                    }
                }
                if !is_zero_vec(&v) {
                    rels.push(v);
                }
            }
        }
    }
    Subspace::span(de * df, rels)
}

pub fn tensor_over_k(e: &Bimodule, f: &Bimodule) -> Result<TensorProduct, BimoduleError> {
    if !e.same_base(f) {
        return Err(BimoduleError::BaseMismatch);
    }
    let (de, df) = (e.dim(), f.dim());
    let rel = balanced_relations(&e.right, &f.left, de, df);
    let q = quotient_full(&rel);
    let n = e.base().dim();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let id_e = Matrix::identity(de);
    let id_f = Matrix::identity(df);
    let tp = TensorProduct {
        module: Bimodule::zero(e.base()),
        quotient: q,
        left_dim: de,
        right_dim: df,
    };
    for a in 0..n {
        left.push(tp.map_tensor(e.left(a), &id_f, &tp));
        right.push(tp.map_tensor(&id_e, f.right(a), &tp));
    }
    let module = Bimodule { base: e.base().clone(), dim: tp.quotient.dim(), left, right };
    Ok(TensorProduct { module, ..tp })
}

/// Which one-sided linearity a dual uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualSide {
    /// `E^*`: right `k`-linear maps.
    Right,
    /// `^*E`: left `k`-linear maps.
    Left,
}

/// A dual bimodule realized inside `Hom_Q(E, k)`. A functional is stored as
/// a `dim k x dim E` matrix flattened row-major: entry `(i, j)` is the
/// `b_i`-coordinate of `f(e_j)`.
#[derive(Clone, Debug)]
pub struct Dual {
    pub side: DualSide,
    pub module: Bimodule,
    pub space: Subspace,
    pub source_dim: usize,
    /// `functionals[s]` is basis functional `s` as a `dim k x dim E` matrix.
    pub functionals: Vec<Matrix>,
}

impl Dual {
    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// `f_s(v)` as an element of `k`.
    pub fn apply(&self, s: usize, v: &[Scalar]) -> Vec<Scalar> {
        self.functionals[s].mul_vec(v)
    }

    /// Value of the functional with coordinates `coords` on `v`.
    pub fn apply_combination(&self, coords: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let k = self.functionals.first().map_or(0, |m| m.rows());
        let mut out = zero_vec(k);
        for (c, f) in coords.iter().zip(&self.functionals) {
            if !c.is_zero() {
                add_scaled(&mut out, c, &f.mul_vec(v));
            }
        }
        out
    }

    /// Coordinates of a functional given as a `dim k x dim E` matrix.
    pub fn coordinates_of(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        self.space.coordinates(m.entries())
    }

    /// Pairing matrix: `dim k` rows, column `s * dim E + j` holds `f_s(e_j)`
    /// (for the right dual this is `ev: E^* (x) E -> k`; for the left dual
    /// column `j * dim(*E) + s` holds `f_s(e_j)`, i.e. `E (x) *E -> k`).
    pub fn pairing(&self) -> Matrix {
        let k = self.module.base().dim();
        let (n, d) = (self.source_dim, self.dim());
        let mut m = Matrix::zeros(k, n * d);
        for s in 0..d {
            for j in 0..n {
                let col = match self.side {
                    DualSide::Right => s * n + j,
                    DualSide::Left => j * d + s,
                };
                for i in 0..k {
                    m.set(i, col, self.functionals[s].get(i, j).clone());
                }
            }
        }
        m
    }
}

fn dual_of(e: &Bimodule, side: DualSide) -> Dual {
    let base = e.base().clone();
    let (k, n) = (base.dim(), e.dim());
    // Linearity: F * R^E_a = R^k_a * F (right) or F * L^E_a = L^k_a * F (left).
    let pairs: Vec<(Matrix, Matrix)> = (0..k)
        .map(|a| match side {
            DualSide::Right => (e.right(a).clone(), base.right_mult(a).clone()),
            DualSide::Left => (e.left(a).clone(), base.left_mult(a).clone()),
        })
        .collect();
    let space = intertwiner_space(n, k, &pairs);
    let functionals: Vec<Matrix> = space.basis().iter().map(|v| unflatten(v, k, n)).collect();
    let coords = |m: Matrix| space.coordinates(m.entries()).expect("dual action stays in dual");
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for a in 0..k {
        let (lcols, rcols): (Vec<Vec<Scalar>>, Vec<Vec<Scalar>>) = functionals
            .iter()
            .map(|f| match side {
                // (a.f)(x) = a f(x), (f.a)(x) = f(a x)
                DualSide::Right => (coords(base.left_mult(a).mul(f)), coords(f.mul(e.left(a)))),
                // (a.f)(x) = f(x a), (f.a)(x) = f(x) a
                DualSide::Left => (coords(f.mul(e.right(a))), coords(base.right_mult(a).mul(f))),
            })
            .unzip();
        left.push(Matrix::from_columns(space.dim(), &lcols));
        right.push(Matrix::from_columns(space.dim(), &rcols));
    }
    let module = Bimodule { base, dim: space.dim(), left, right };
    Dual { side, module, space, source_dim: n, functionals }
}

pub fn right_dual(e: &Bimodule) -> Dual {
    dual_of(e, DualSide::Right)
}

pub fn left_dual(e: &Bimodule) -> Dual {
    dual_of(e, DualSide::Left)
}

/// `sum_alpha x_alpha (x) xhat_alpha` in `E (x)_k E^*` (right) or
/// `sum_alpha xcheck_alpha (x) x_alpha` in `*E (x)_k E` (left).
#[derive(Clone, Debug)]
pub struct Coevaluation {
    /// Terms `(i, s, c)`: `c * e_i (x) f_s` (right) or `c * f_s (x) e_i` (left).
    pub terms: Vec<(usize, usize, Scalar)>,
    pub element: Vec<Scalar>,
}

pub fn coevaluation(e: &Bimodule, dual: &Dual) -> Result<Coevaluation, BimoduleError> {
    let n = e.dim();
    let d = dual.dim();
    let base = e.base();
    // Column (i, s) is the endomorphism induced by the pure tensor.
    let mut cols = Vec::with_capacity(n * d);
    for i in 0..n {
        for s in 0..d {
            let mut endo = Matrix::zeros(n, n);
            for j in 0..n {
                let val = dual.apply(s, &unit_vec(n, j));
                let img = match dual.side {
                    DualSide::Right => e.right_op(&val).column(i),
                    DualSide::Left => e.left_op(&val).column(i),
                };
                endo.set_column(j, &img);
            }
            cols.push(endo.entries().to_vec());
        }
    }
    let sys = Matrix::from_columns(n * n, &cols);
    let target = Matrix::identity(n).entries().to_vec();
    let sol = sys.solve(&target).ok_or(BimoduleError::SingularCoevaluation)?;
    let mut terms = Vec::new();
    for i in 0..n {
        for s in 0..d {
            let c = &sol[i * d + s];
            if !c.is_zero() {
                terms.push((i, s, c.clone()));
            }
        }
    }
    let element = match dual.side {
        DualSide::Right => tensor_over_k(e, &dual.module)?.project(&sol),
        DualSide::Left => {
            let mut raw = zero_vec(d * n);
            for (i, s, c) in &terms {
                raw[s * n + i] = c.clone();
            }
            tensor_over_k(&dual.module, e)?.project(&raw)
        }
    };
    let _ = base;
    Ok(Coevaluation { terms, element })
}

/// Values of the pairing `(f (x) g)(e2 (x) e1) = f(g(e2) . e1)` where
/// `f` is a functional on `E1` and `g` on `E2`.
pub fn pair_dual_tensor(
    e1: &Bimodule,
    f: &Matrix,
    g: &Matrix,
    e2_vec: &[Scalar],
    e1_vec: &[Scalar],
) -> Vec<Scalar> {
    let ge2 = g.mul_vec(e2_vec);
    let moved = e1.left_op(&ge2).mul_vec(e1_vec);
    f.mul_vec(&moved)
}

/// Canonical map `E1^* (x)_k E2^* -> (E2 (x)_k E1)^*` as a matrix between
/// the quotient coordinates of the source and the dual coordinates.
pub fn dual_tensor_map(
    e1: &Bimodule,
    d1: &Dual,
    e2: &Bimodule,
    d2: &Dual,
) -> Result<(Matrix, TensorProduct, TensorProduct, Dual), BimoduleError> {
    let src = tensor_over_k(&d1.module, &d2.module)?;
    let tgt = tensor_over_k(e2, e1)?;
    let tdual = right_dual(&tgt.module);
    let k = e1.base().dim();
    let mut cols = Vec::with_capacity(src.dim());
    for b in 0..src.dim() {
        let (s, t) = src.lift_pair(b);
        let mut fm = Matrix::zeros(k, tgt.dim());
        for w in 0..tgt.dim() {
            let (i2, i1) = tgt.lift_pair(w);
            let val = pair_dual_tensor(
                e1,
                &d1.functionals[s],
                &d2.functionals[t],
                &unit_vec(e2.dim(), i2),
                &unit_vec(e1.dim(), i1),
            );
            fm.set_column(w, &val);
        }
        cols.push(tdual.coordinates_of(&fm).ok_or(BimoduleError::NotBimoduleMap)?);
    }
    let m = Matrix::from_columns(tdual.dim(), &cols);
    Ok((m, src, tgt, tdual))
}

/// `phi: E -> *(E^*)`, `phi(e)(f) = f(e)`.
pub fn phi_double_dual(e: &Bimodule) -> (Matrix, Dual, Dual) {
    let d = right_dual(e);
    let dd = left_dual(&d.module);
    let k = e.base().dim();
    let cols: Vec<Vec<Scalar>> = (0..e.dim())
        .map(|j| {
            let mut g = Matrix::zeros(k, d.dim());
            for s in 0..d.dim() {
                g.set_column(s, &d.apply(s, &unit_vec(e.dim(), j)));
            }
            dd.coordinates_of(&g).expect("phi(e) is left linear")
        })
        .collect();
    (Matrix::from_columns(dd.dim(), &cols), d, dd)
}

/// `phi~: E -> (*E)^*`, `phi~(e)(f) = f(e)`.
pub fn phi_tilde_double_dual(e: &Bimodule) -> (Matrix, Dual, Dual) {
    let d = left_dual(e);
    let dd = right_dual(&d.module);
    let k = e.base().dim();
    let cols: Vec<Vec<Scalar>> = (0..e.dim())
        .map(|j| {
            let mut g = Matrix::zeros(k, d.dim());
            for s in 0..d.dim() {
                g.set_column(s, &d.apply(s, &unit_vec(e.dim(), j)));
            }
            dd.coordinates_of(&g).expect("phi~(e) is right linear")
        })
        .collect();
    (Matrix::from_columns(dd.dim(), &cols), d, dd)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub witness: Option<Vec<Scalar>>,
}

impl CheckOutcome {
    pub fn new(name: &str, witness: Option<Vec<Scalar>>) -> Self {
        CheckOutcome { name: name.to_string(), pass: witness.is_none(), witness }
    }
}

#[derive(Clone, Debug)]
pub struct ZigzagReport {
    pub checks: Vec<CheckOutcome>,
}

impl ZigzagReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.pass)
    }
}

/// Random bimodule endomorphism of `e`, drawn from a seeded generator.
pub fn random_endomorphism(e: &Bimodule, rng: &mut impl Rng) -> Matrix {
    let space = e.hom_space(e);
    let mut v = zero_vec(e.dim() * e.dim());
    for b in space.basis() {
        add_scaled(&mut v, &int(rng.gen_range(-3..=3)), b);
    }
    unflatten(&v, e.dim(), e.dim())
}

pub fn verify_zigzag(e: &Bimodule, seed: u64) -> ZigzagReport {
    let mut checks = Vec::new();
    if let Err(err) = e.validate() {
        checks.push(CheckOutcome {
            name: format!("bimodule axioms ({err})"),
            pass: false,
            witness: Some(axiom_witness(e)),
        });
        return ZigzagReport { checks };
    }
    let n = e.dim();
    let dual = right_dual(e);
    let coev = match coevaluation(e, &dual) {
        Ok(c) => c,
        Err(_) => {
            checks.push(CheckOutcome::new("coevaluation solvable", Some(zero_vec(n))));
            return ZigzagReport { checks };
        }
    };
    // e -> sum x_a . xhat_a(e)
    let mut w = None;
    for j in 0..n {
        let ej = unit_vec(n, j);
        let mut acc = zero_vec(n);
        for (i, s, c) in &coev.terms {
            let val = dual.apply(*s, &ej);
            add_scaled(&mut acc, c, &e.right_op(&val).column(*i));
        }
        if acc != ej {
            w = Some(ej);
            break;
        }
    }
    checks.push(CheckOutcome::new("right zig-zag on E", w));
    // f -> sum f(x_a) . xhat_a
    let mut w = None;
    for s0 in 0..dual.dim() {
        let mut acc = Matrix::zeros(e.base().dim(), n);
        for (i, s, c) in &coev.terms {
            let val = dual.apply(s0, &unit_vec(n, *i));
            let scaled = e.base().left_mult_by(&val).mul(&dual.functionals[*s]);
            acc.add_assign_scaled(c, &scaled);
        }
        if acc != dual.functionals[s0] {
            w = Some(unit_vec(dual.dim(), s0));
            break;
        }
    }
    checks.push(CheckOutcome::new("right zig-zag on E^*", w));
    // left coevaluation
    let ldual = left_dual(e);
    let w = match coevaluation(e, &ldual) {
        Ok(lc) => {
            let mut w = None;
            for j in 0..n {
                let ej = unit_vec(n, j);
                let mut acc = zero_vec(n);
                for (i, s, c) in &lc.terms {
                    let val = ldual.apply(*s, &ej);
                    add_scaled(&mut acc, c, &e.left_op(&val).column(*i));
                }
                if acc != ej {
                    w = Some(ej);
                    break;
                }
            }
            w
        }
        Err(_) => Some(zero_vec(n)),
    };
    checks.push(CheckOutcome::new("left zig-zag on E", w));
    checks.push(CheckOutcome::new("coevaluation of E(x)E through the dual pairing", coev_square_witness(e, &dual, &coev)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = None;
    for _ in 0..3 {
        let f = random_endomorphism(e, &mut rng);
        if let Some(x) = naturality_witness(e, &dual, &coev, &f) {
            w = Some(x);
            break;
        }
    }
    checks.push(CheckOutcome::new("naturality of evaluation", w));
    ZigzagReport { checks }
}

fn axiom_witness(e: &Bimodule) -> Vec<Scalar> {
    // First basis vector on which an axiom identity fails.
    let n = e.base().dim();
    for j in 0..e.dim() {
        let v = unit_vec(e.dim(), j);
        for a in 0..n {
            for b in 0..n {
                let ab = &e.base().mult[a][b];
                let l1 = e.left(a).mul_vec(&e.left(b).mul_vec(&v));
                let r1 = e.right(b).mul_vec(&e.right(a).mul_vec(&v));
                let c1 = e.left(a).mul_vec(&e.right(b).mul_vec(&v));
                let c2 = e.right(b).mul_vec(&e.left(a).mul_vec(&v));
                if l1 != e.left_op(ab).mul_vec(&v) || r1 != e.right_op(ab).mul_vec(&v) || c1 != c2 {
                    return v;
                }
            }
        }
        if e.left_op(e.base().unit()).mul_vec(&v) != v || e.right_op(e.base().unit()).mul_vec(&v) != v {
            return v;
        }
    }
    zero_vec(e.dim())
}

fn coev_square_witness(e: &Bimodule, dual: &Dual, coev: &Coevaluation) -> Option<Vec<Scalar>> {
    let ee = tensor_over_k(e, e).ok()?;
    let n = e.dim();
    for w in 0..ee.dim() {
        let (i2, i1) = ee.lift_pair(w);
        let (e2, e1) = (unit_vec(n, i2), unit_vec(n, i1));
        let mut acc = zero_vec(ee.dim());
        for (ia, sa, ca) in &coev.terms {
            for (ib, sb, cb) in &coev.terms {
                // <xhat_b (x) xhat_a, e2 (x) e1> = xhat_b(xhat_a(e2) e1)
                let val = pair_dual_tensor(e, &dual.functionals[*sb], &dual.functionals[*sa], &e2, &e1);
                if is_zero_vec(&val) {
                    continue;
                }
                let xb = e.right_op(&val).column(*ib);
                let t = ee.project_pair(&unit_vec(n, *ia), &xb);
                add_scaled(&mut acc, &(ca * cb), &t);
            }
        }
        let target = unit_vec(ee.dim(), w);
        if acc != target {
            return Some(target);
        }
    }
    None
}

fn naturality_witness(e: &Bimodule, dual: &Dual, coev: &Coevaluation, f: &Matrix) -> Option<Vec<Scalar>> {
    let n = e.dim();
    let k = e.base().dim();
    for s0 in 0..dual.dim() {
        // f^*(g) = sum g(f(x_a)) . xhat_a, built from (co)evaluation.
        let g = &dual.functionals[s0];
        let mut fstar = Matrix::zeros(k, n);
        for (i, s, c) in &coev.terms {
            let val = g.mul_vec(&f.column(*i));
            fstar.add_assign_scaled(c, &e.base().left_mult_by(&val).mul(&dual.functionals[*s]));
        }
        for j in 0..n {
            let ej = unit_vec(n, j);
            if fstar.mul_vec(&ej) != g.mul_vec(&f.mul_vec(&ej)) {
                let mut wv = unit_vec(dual.dim(), s0);
                wv.extend(ej);
                return Some(wv);
            }
        }
    }
    None
}

/// The pairing matrix `E^* (x) E -> k` evaluated with the unit of `k`
/// removed; helper for tests comparing with hand computations.
pub fn evaluation_on(dual: &Dual, s: usize, v: &[Scalar]) -> Vec<Scalar> {
    dual.apply(s, v)
}

pub fn is_identity(m: &Matrix) -> bool {
    m.rows() == m.cols() && *m == Matrix::identity(m.rows())
}

pub fn one() -> Scalar {
    Scalar::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Arc<BaseRing> {
        BaseRing::group_algebra(&[vec![0, 1], vec![1, 0]], 0, vec!["1".into(), "g".into()]).unwrap()
    }

    fn qxq_one_dim(left_idem: usize, right_idem: usize) -> Bimodule {
        let k = BaseRing::product_of_fields(2);
        let act = |i: usize, t: usize| Matrix::from_i64(1, 1, &[if i == t { 1 } else { 0 }]);
        Bimodule::new(
            k.clone(),
            1,
            (0..2).map(|i| act(i, left_idem)).collect(),
            (0..2).map(|i| act(i, right_idem)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_associative_base() {
        // b0 b0 = b1, b1 anything: break associativity deliberately.
        let mult = vec![
            vec![vec![int(0), int(1)], vec![int(1), int(0)]],
            vec![vec![int(1), int(0)], vec![int(1), int(1)]],
        ];
        let err = BaseRing::new(mult, vec![int(1), int(0)], vec!["a".into(), "b".into()]).unwrap_err();
        assert!(err.to_string().starts_with("structure constants not associative at"), "{err}");
    }

    #[test]
    fn rejects_non_semisimple_base() {
        // Q[x]/(x^2)
        let mult = vec![
            vec![vec![int(1), int(0)], vec![int(0), int(1)]],
            vec![vec![int(0), int(1)], vec![int(0), int(0)]],
        ];
        let err = BaseRing::new(mult, vec![int(1), int(0)], vec!["1".into(), "x".into()]).unwrap_err();
        assert_eq!(err, BimoduleError::NotSemisimple);
    }

    #[test]
    fn tensor_over_field_has_product_dim() {
        let k = BaseRing::field();
        let e = Bimodule::free_over_field(&k, 2);
        let f = Bimodule::free_over_field(&k, 3);
        assert_eq!(tensor_over_k(&e, &f).unwrap().dim(), 6);
    }

    #[test]
    fn idempotent_mismatch_kills_tensor() {
        let e = qxq_one_dim(0, 1);
        let f = qxq_one_dim(0, 0);
        assert_eq!(tensor_over_k(&e, &f).unwrap().dim(), 0);
    }

    #[test]
    fn regular_group_algebra_tensor() {
        let k = z2();
        let r = Bimodule::regular(&k);
        assert_eq!(tensor_over_k(&r, &r).unwrap().dim(), 2);
    }

    #[test]
    fn right_dual_of_corner_bimodule() {
        let e = qxq_one_dim(0, 1);
        let d = right_dual(&e);
        assert_eq!(d.dim(), 1);
        // e1 . f = f and f . e0 = f (0-indexed idempotents)
        assert_eq!(d.module.left(1), &Matrix::identity(1));
        assert_eq!(d.module.right(0), &Matrix::identity(1));
        assert!(d.module.left(0).is_zero());
        let l = left_dual(&qxq_one_dim(1, 0));
        assert_eq!(l.dim(), 1);
    }

    #[test]
    fn duals_over_field() {
        let k = BaseRing::field();
        let e = Bimodule::free_over_field(&k, 4);
        assert_eq!(right_dual(&e).dim(), 4);
        assert_eq!(left_dual(&e).dim(), 4);
    }

    #[test]
    fn coevaluation_over_field_is_dual_basis() {
        let k = BaseRing::field();
        let e = Bimodule::free_over_field(&k, 2);
        let d = right_dual(&e);
        let c = coevaluation(&e, &d).unwrap();
        let mut terms = c.terms.clone();
        terms.sort();
        assert_eq!(terms, vec![(0, 0, int(1)), (1, 1, int(1))]);
        let one = Bimodule::free_over_field(&k, 1);
        let c1 = coevaluation(&one, &right_dual(&one)).unwrap();
        assert_eq!(c1.terms, vec![(0, 0, int(1))]);
    }

    #[test]
    fn double_duals_for_group_algebra() {
        let r = Bimodule::regular(&z2());
        let (phi, _, dd) = phi_double_dual(&r);
        assert!(BimoduleMap::new(r.clone(), dd.module.clone(), phi.clone()).is_ok());
        assert!(phi.inverse().is_some());
        let (pt, _, dd2) = phi_tilde_double_dual(&r);
        assert!(BimoduleMap::new(r.clone(), dd2.module.clone(), pt.clone()).is_ok());
        assert!(pt.inverse().is_some());
    }

    #[test]
    fn zigzag_passes_and_detects_corruption() {
        let k = BaseRing::field();
        assert!(verify_zigzag(&Bimodule::free_over_field(&k, 3), 1).pass());
        assert!(verify_zigzag(&Bimodule::regular(&z2()), 2).pass());
        let r = Bimodule::regular(&z2());
        let mut left = r.left_mats().to_vec();
        left[1] = Matrix::from_i64(2, 2, &[2, 0, 0, 1]);
        let bad = Bimodule::new_unchecked(r.base().clone(), 2, left, r.right_mats().to_vec()).unwrap();
        let rep = verify_zigzag(&bad, 3);
        assert!(!rep.pass());
        assert!(rep.first_failure().unwrap().witness.is_some());
    }

    #[test]
    fn anti_monoidal_map_is_iso() {
        let k = z2();
        let r = Bimodule::regular(&k);
        let d = right_dual(&r);
        let (m, src, _, tdual) = dual_tensor_map(&r, &d, &r, &d).unwrap();
        assert_eq!(src.dim(), tdual.dim());
        assert!(m.inverse().is_some());
        assert!(BimoduleMap::new(src.module.clone(), tdual.module.clone(), m).is_ok());
    }
}
