//! Cochain complexes, U-modules, curved modules over the dual algebra and
//! the functors F, G, S between them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::base_bimodules::{
    balanced_relations, coevaluation, flatten, intertwiner_space, unflatten, BimoduleError,
};
use crate::exact_linalg::{int, is_zero_vec, quotient_full, unit_vec, zero_vec, Matrix, Quotient, Scalar, Subspace};
use crate::nonhomogeneous::{
    build_curved_dual, truncate_filtered, verify_cdga, CurvedDGAlgebra, FilteredAlgebra, NonhomogeneousError, NonhomogeneousPresentation,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("differential shape mismatch at degree {0}")]
    Shape(i64),
    #[error("d^2 != 0 at degree {0}")]
    NotSquareZero(i64),
}

/// Finite cochain complex `C^start -> C^{start+1} -> ...` of vector spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub start: i64,
    pub dims: Vec<usize>,
    /// `maps[i]`: `C^{start+i} -> C^{start+i+1}`.
    pub maps: Vec<Matrix>,
}

impl Complex {
    pub fn new(start: i64, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self, ComplexError> {
        let c = Complex { start, dims, maps };
        c.check_shapes()?;
        Ok(c)
    }

    /// Same as `new` but also checks `d^2 = 0`.
    pub fn checked(start: i64, dims: Vec<usize>, maps: Vec<Matrix>) -> Result<Self, ComplexError> {
        let c = Self::new(start, dims, maps)?;
        c.check_square_zero()?;
        Ok(c)
    }

    pub fn zero() -> Self {
        Complex { start: 0, dims: Vec::new(), maps: Vec::new() }
    }

    fn check_shapes(&self) -> Result<(), ComplexError> {
        if self.maps.len() + 1 != self.dims.len().max(1) {
            return Err(ComplexError::Shape(self.start));
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.cols() != self.dims[i] || m.rows() != self.dims[i + 1] {
                return Err(ComplexError::Shape(self.start + i as i64));
            }
        }
        Ok(())
    }

    pub fn check_square_zero(&self) -> Result<(), ComplexError> {
        for i in 1..self.maps.len() {
            if !self.maps[i].mul(&self.maps[i - 1]).is_zero() {
                return Err(ComplexError::NotSquareZero(self.start + i as i64 - 1));
            }
        }
        Ok(())
    }

    pub fn degrees(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.dims.len() as i64
    }

    pub fn dim_at(&self, p: i64) -> usize {
        self.index(p).map_or(0, |i| self.dims[i])
    }

    fn index(&self, p: i64) -> Option<usize> {
        let i = p - self.start;
        (i >= 0 && (i as usize) < self.dims.len()).then_some(i as usize)
    }

    /// `d^p: C^p -> C^{p+1}`, or a zero map at the ends.
    pub fn map_at(&self, p: i64) -> Matrix {
        match self.index(p) {
            Some(i) if i < self.maps.len() => self.maps[i].clone(),
            _ => Matrix::zeros(self.dim_at(p + 1), self.dim_at(p)),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().zip(&self.dims).map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) }).sum()
    }

    pub fn cohomology(&self) -> Result<CohomologyTable, ComplexError> {
        self.check_square_zero()?;
        let ranks: Vec<usize> = self.maps.iter().map(|m| m.rank()).collect();
        let mut dims = BTreeMap::new();
        for (i, p) in self.degrees().enumerate() {
            let out = if i < ranks.len() { ranks[i] } else { 0 };
            let inc = if i > 0 { ranks[i - 1] } else { 0 };
            dims.insert(p, self.dims[i] - out - inc);
        }
        Ok(CohomologyTable { dims })
    }

    /// A cocycle in degree `p` that is not a coboundary, if any.
    pub fn witness(&self, p: i64) -> Option<Vec<Scalar>> {
        let cycles = self.map_at(p).kernel();
        let bounds = self.map_at(p - 1).image();
        cycles.basis().iter().find(|v| !bounds.contains(v)).cloned()
    }

    /// Cocycles of degree `p` as a subspace.
    pub fn cocycles(&self, p: i64) -> Subspace {
        self.map_at(p).kernel()
    }

    pub fn coboundaries(&self, p: i64) -> Subspace {
        self.map_at(p - 1).image()
    }

    pub fn is_acyclic(&self) -> Result<bool, ComplexError> {
        Ok(self.cohomology()?.is_zero())
    }
}

pub fn cohomology(c: &Complex) -> Result<CohomologyTable, ComplexError> {
    c.cohomology()
}

/// Cohomology dimensions by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CohomologyTable {
    pub dims: BTreeMap<i64, usize>,
}

impl CohomologyTable {
    pub fn get(&self, p: i64) -> usize {
        self.dims.get(&p).copied().unwrap_or(0)
    }

    /// Only the degrees with nonzero cohomology.
    pub fn nonzero(&self) -> BTreeMap<i64, usize> {
        self.dims.iter().filter(|(_, &d)| d > 0).map(|(&p, &d)| (p, d)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.values().all(|&d| d == 0)
    }

    /// Degreewise equality ignoring zero entries.
    pub fn same_as(&self, other: &CohomologyTable) -> bool {
        self.nonzero() == other.nonzero()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurvedError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Nonhomogeneous(#[from] NonhomogeneousError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error("module action has the wrong shape: {0}")]
    Shape(String),
    #[error("module axiom fails: {0}")]
    Axiom(String),
    #[error("the dual algebra is not bounded up to degree {0}")]
    Unbounded(usize),
    #[error("the dual algebra does not satisfy the cdga axioms: {0}")]
    Cdga(String),
}

/// `U` together with its bounded curved dual and the coevaluation of `E`.
#[derive(Clone, Debug)]
pub struct KoszulPair {
    pub presentation: NonhomogeneousPresentation,
    pub lambda: CurvedDGAlgebra,
    /// Top nonzero degree of the dual.
    pub top: usize,
    /// `c_E(1) = sum c e_i (x) f_s` as `(i, s, c)`.
    pub coev: Vec<(usize, usize, Scalar)>,
}

pub const MAX_DUAL_DEGREE: usize = 8;

impl KoszulPair {
    /// Builds the dual up to one degree past its top degree; fails when
    /// the dual is not bounded by `MAX_DUAL_DEGREE`.
    pub fn new(p: &NonhomogeneousPresentation) -> Result<Arc<Self>, CurvedError> {
        let mut n = 3;
        loop {
            let lambda = build_curved_dual(p, n)?;
            if lambda.algebra.dim(n) == 0 {
                let report = verify_cdga(&lambda);
                if !report.pass() {
                    return Err(CurvedError::Cdga(report.summary()));
                }
                let top = lambda.top_degree().unwrap_or(0);
                let coev = coevaluation(p.generators(), &lambda.dual.dual)?.terms;
                return Ok(Arc::new(KoszulPair { presentation: p.clone(), lambda, top, coev }));
            }
            if n >= MAX_DUAL_DEGREE {
                return Err(CurvedError::Unbounded(n));
            }
            n += 1;
        }
    }

    pub fn k_dim(&self) -> usize {
        self.presentation.base().dim()
    }

    pub fn e_dim(&self) -> usize {
        self.presentation.generators().dim()
    }

    pub fn lambda_dim(&self, i: usize) -> usize {
        self.lambda.algebra.dim(i)
    }

    /// `b -> f_s b` on `Lambda^i`.
    pub fn left_gen(&self, s: usize, i: usize) -> Matrix {
        let a = &self.lambda.algebra;
        let f = unit_vec(a.dim(1), s);
        let cols: Vec<Vec<Scalar>> = (0..a.dim(i)).map(|b| a.mul(1, &f, i, &unit_vec(a.dim(i), b))).collect();
        Matrix::from_columns(a.dim(i + 1), &cols)
    }

    /// `b -> b x` for `x` in `Lambda^j`.
    pub fn right_mul(&self, x: &[Scalar], j: usize, i: usize) -> Matrix {
        let a = &self.lambda.algebra;
        let cols: Vec<Vec<Scalar>> = (0..a.dim(i)).map(|b| a.mul(i, &unit_vec(a.dim(i), b), j, x)).collect();
        Matrix::from_columns(a.dim(i + j), &cols)
    }

    pub fn d_lambda(&self, i: usize) -> Matrix {
        if i < self.lambda.d.len() {
            self.lambda.d[i].clone()
        } else {
            Matrix::zeros(self.lambda_dim(i + 1), self.lambda_dim(i))
        }
    }
}

/// Finite-dimensional left `U`-module given by the action of a basis of
/// `k` and of a basis of `E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UModule {
    pub dim: usize,
    pub base: Vec<Matrix>,
    pub gens: Vec<Matrix>,
}

impl UModule {
    /// Checks that the actions define a module over `U = T_k(E)/(R)`.
    pub fn new(p: &NonhomogeneousPresentation, dim: usize, base: Vec<Matrix>, gens: Vec<Matrix>) -> Result<Self, CurvedError> {
        let m = UModule { dim, base, gens };
        m.validate(p)?;
        Ok(m)
    }

    pub fn zero(p: &NonhomogeneousPresentation) -> Self {
        UModule {
            dim: 0,
            base: vec![Matrix::zeros(0, 0); p.base().dim()],
            gens: vec![Matrix::zeros(0, 0); p.generators().dim()],
        }
    }

    pub fn validate(&self, p: &NonhomogeneousPresentation) -> Result<(), CurvedError> {
        let k = p.base();
        let e = p.generators();
        let n = self.dim;
        if self.base.len() != k.dim() || self.gens.len() != e.dim() {
            return Err(CurvedError::Shape("one matrix per basis element of k and of E".into()));
        }
        if self.base.iter().chain(&self.gens).any(|m| m.rows() != n || m.cols() != n) {
            return Err(CurvedError::Shape(format!("actions must be {n}x{n}")));
        }
        if self.base_op(k.unit()) != Matrix::identity(n) {
            return Err(CurvedError::Axiom("unit of k does not act as the identity".into()));
        }
        for a in 0..k.dim() {
            for b in 0..k.dim() {
                let prod = k.mul(&unit_vec(k.dim(), a), &unit_vec(k.dim(), b));
                if self.base[a].mul(&self.base[b]) != self.base_op(&prod) {
                    return Err(CurvedError::Axiom(format!("k action not associative at ({a},{b})")));
                }
            }
        }
        for a in 0..k.dim() {
            for j in 0..e.dim() {
                if self.gen_op(&e.left(a).column(j)) != self.base[a].mul(&self.gens[j]) {
                    return Err(CurvedError::Axiom(format!("generator {j} not left k-linear for basis {a}")));
                }
                if self.gen_op(&e.right(a).column(j)) != self.gens[j].mul(&self.base[a]) {
                    return Err(CurvedError::Axiom(format!("generator {j} not right k-linear for basis {a}")));
                }
            }
        }
        let (dk, de) = (k.dim(), e.dim());
        let sq = p.quadratic();
        for (r, rel) in p.relations().basis().iter().enumerate() {
            let mut op = self.base_op(&rel[..dk]);
            op.add_assign_scaled(&Scalar::one(), &self.gen_op(&rel[dk..dk + de]));
            for (i, j, c) in sq.relation_terms(&rel[dk + de..]) {
                op.add_assign_scaled(&c, &self.gens[i].mul(&self.gens[j]));
            }
            if !op.is_zero() {
                return Err(CurvedError::Axiom(format!("relation {r} does not act as zero")));
            }
        }
        Ok(())
    }

    pub fn base_op(&self, a: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (x, b) in a.iter().zip(&self.base) {
            if !x.is_zero() {
                m.add_assign_scaled(x, b);
            }
        }
        m
    }

    pub fn gen_op(&self, v: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for (x, g) in v.iter().zip(&self.gens) {
            if !x.is_zero() {
                m.add_assign_scaled(x, g);
            }
        }
        m
    }

    /// Action of the word `e_{w_1} ... e_{w_n}`.
    pub fn word_op(&self, w: &[usize]) -> Matrix {
        w.iter().fold(Matrix::identity(self.dim), |acc, &i| acc.mul(&self.gens[i]))
    }

    pub fn direct_sum(parts: &[&UModule]) -> UModule {
        let dim = parts.iter().map(|m| m.dim).sum();
        let nb = parts.first().map_or(0, |m| m.base.len());
        let ng = parts.first().map_or(0, |m| m.gens.len());
        let block = |pick: &dyn Fn(&UModule) -> &Matrix| {
            let mut out = Matrix::zeros(dim, dim);
            let mut off = 0;
            for m in parts {
                let x = pick(m);
                for i in 0..m.dim {
                    for j in 0..m.dim {
                        out.set(off + i, off + j, x.get(i, j).clone());
                    }
                }
                off += m.dim;
            }
            out
        };
        UModule {
            dim,
            base: (0..nb).map(|a| block(&|m: &UModule| &m.base[a])).collect(),
            gens: (0..ng).map(|j| block(&|m: &UModule| &m.gens[j])).collect(),
        }
    }

    /// `Hom_U(self, other)`, flattened row-major (`other.dim x self.dim`).
    pub fn hom_space(&self, other: &UModule) -> Subspace {
        let pairs: Vec<(Matrix, Matrix)> = self
            .base
            .iter()
            .zip(&other.base)
            .chain(self.gens.iter().zip(&other.gens))
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        intertwiner_space(self.dim, other.dim, &pairs)
    }

    /// `Hom_k(self, other)` (left `k`-linear maps), flattened row-major.
    pub fn k_hom_space(&self, other: &UModule) -> Subspace {
        let pairs: Vec<(Matrix, Matrix)> = self.base.iter().zip(&other.base).map(|(a, b)| (a.clone(), b.clone())).collect();
        intertwiner_space(self.dim, other.dim, &pairs)
    }

    pub fn is_hom(&self, other: &UModule, f: &Matrix) -> bool {
        self.base.iter().zip(&other.base).chain(self.gens.iter().zip(&other.gens)).all(|(a, b)| f.mul(a) == b.mul(f))
    }
}

/// Bounded complex of finite-dimensional `U`-modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UComplex {
    pub start: i64,
    pub modules: Vec<UModule>,
    /// `d[i]: modules[i] -> modules[i+1]`.
    pub d: Vec<Matrix>,
}

impl UComplex {
    pub fn new(start: i64, modules: Vec<UModule>, d: Vec<Matrix>) -> Result<Self, CurvedError> {
        if modules.is_empty() || d.len() + 1 != modules.len() {
            return Err(CurvedError::Shape("need n modules and n-1 differentials".into()));
        }
        for (i, f) in d.iter().enumerate() {
            if f.cols() != modules[i].dim || f.rows() != modules[i + 1].dim {
                return Err(CurvedError::Shape(format!("differential {i}")));
            }
            if !modules[i].is_hom(&modules[i + 1], f) {
                return Err(CurvedError::Axiom(format!("differential {i} is not U-linear")));
            }
            if i > 0 && !f.mul(&d[i - 1]).is_zero() {
                return Err(CurvedError::Axiom(format!("d^2 != 0 at position {i}")));
            }
        }
        Ok(UComplex { start, modules, d })
    }

    pub fn single(m: UModule, degree: i64) -> Self {
        UComplex { start: degree, modules: vec![m], d: Vec::new() }
    }

    pub fn degrees(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.modules.len() as i64
    }

    pub fn module_at(&self, p: i64) -> Option<&UModule> {
        let i = p - self.start;
        (i >= 0 && (i as usize) < self.modules.len()).then(|| &self.modules[i as usize])
    }

    pub fn dim_at(&self, p: i64) -> usize {
        self.module_at(p).map_or(0, |m| m.dim)
    }

    pub fn d_at(&self, p: i64) -> Matrix {
        let i = p - self.start;
        if i >= 0 && (i as usize) < self.d.len() {
            self.d[i as usize].clone()
        } else {
            Matrix::zeros(self.dim_at(p + 1), self.dim_at(p))
        }
    }

    pub fn underlying(&self) -> Complex {
        Complex { start: self.start, dims: self.modules.iter().map(|m| m.dim).collect(), maps: self.d.clone() }
    }

    pub fn cohomology(&self) -> Result<CohomologyTable, ComplexError> {
        self.underlying().cohomology()
    }

    /// Mapping cone of the identity of `m` (contractible).
    pub fn cone_of_identity(m: &UModule, degree: i64) -> Self {
        UComplex { start: degree - 1, modules: vec![m.clone(), m.clone()], d: vec![Matrix::identity(m.dim)] }
    }
}

/// Graded left module over the dual cdga with a degree one map `d_N`.
#[derive(Clone, Debug)]
pub struct CurvedModule {
    pub pair: Arc<KoszulPair>,
    pub start: i64,
    pub dims: Vec<usize>,
    /// `base[i][a]`: action of `k` basis element `a` on `N^{start+i}`.
    pub base: Vec<Vec<Matrix>>,
    /// `gens[i][s]`: action of `f_s` from `N^{start+i}` to `N^{start+i+1}`.
    pub gens: Vec<Vec<Matrix>>,
    /// `d[i]`: `N^{start+i} -> N^{start+i+1}`.
    pub d: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvedModuleReport {
    pub relations: bool,
    pub leibniz: bool,
    pub curvature: bool,
    pub failure: Option<String>,
}

impl CurvedModuleReport {
    pub fn pass(&self) -> bool {
        self.relations && self.leibniz && self.curvature
    }
}

impl CurvedModule {
    /// Checks the module axioms, the Leibniz rule on generators and
    /// `d_N^2 = c`.
    pub fn new(
        pair: Arc<KoszulPair>,
        start: i64,
        dims: Vec<usize>,
        base: Vec<Vec<Matrix>>,
        gens: Vec<Vec<Matrix>>,
        d: Vec<Matrix>,
    ) -> Result<Self, CurvedError> {
        let m = Self::new_unchecked(pair, start, dims, base, gens, d)?;
        let r = m.verify();
        match r.failure {
            None => Ok(m),
            Some(f) => Err(CurvedError::Axiom(f)),
        }
    }

    /// Shape checks only.
    pub fn new_unchecked(
        pair: Arc<KoszulPair>,
        start: i64,
        dims: Vec<usize>,
        base: Vec<Vec<Matrix>>,
        gens: Vec<Vec<Matrix>>,
        d: Vec<Matrix>,
    ) -> Result<Self, CurvedError> {
        let n = dims.len();
        if base.len() != n || gens.len() != n || d.len() != n {
            return Err(CurvedError::Shape("one entry per degree".into()));
        }
        for i in 0..n {
            let next = if i + 1 < n { dims[i + 1] } else { 0 };
            if base[i].len() != pair.k_dim() || gens[i].len() != pair.lambda_dim(1) {
                return Err(CurvedError::Shape(format!("action count at position {i}")));
            }
            if base[i].iter().any(|m| m.rows() != dims[i] || m.cols() != dims[i]) {
                return Err(CurvedError::Shape(format!("k action at position {i}")));
            }
            if gens[i].iter().chain(std::iter::once(&d[i])).any(|m| m.rows() != next || m.cols() != dims[i]) {
                return Err(CurvedError::Shape(format!("degree one map at position {i}")));
            }
        }
        Ok(CurvedModule { pair, start, dims, base, gens, d })
    }

    /// `k` concentrated in degree 0 with `Lambda^+` acting by zero.
    pub fn trivial(pair: Arc<KoszulPair>) -> Result<Self, CurvedError> {
        let k = pair.presentation.base().clone();
        let base = (0..k.dim()).map(|a| k.left_mult(a).clone()).collect();
        let gens = vec![Matrix::zeros(0, k.dim()); pair.lambda_dim(1)];
        let n = k.dim();
        Self::new(pair, 0, vec![n], vec![base], vec![gens], vec![Matrix::zeros(0, n)])
    }

    pub fn degrees(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.dims.len() as i64
    }

    fn index(&self, p: i64) -> Option<usize> {
        let i = p - self.start;
        (i >= 0 && (i as usize) < self.dims.len()).then_some(i as usize)
    }

    pub fn dim_at(&self, p: i64) -> usize {
        self.index(p).map_or(0, |i| self.dims[i])
    }

    pub fn gen_at(&self, p: i64, s: usize) -> Matrix {
        match self.index(p) {
            Some(i) => self.gens[i][s].clone(),
            None => Matrix::zeros(self.dim_at(p + 1), self.dim_at(p)),
        }
    }

    pub fn base_at(&self, p: i64, a: usize) -> Matrix {
        match self.index(p) {
            Some(i) => self.base[i][a].clone(),
            None => Matrix::zeros(0, 0),
        }
    }

    pub fn base_op_at(&self, p: i64, x: &[Scalar]) -> Matrix {
        let n = self.dim_at(p);
        let mut m = Matrix::zeros(n, n);
        for (a, c) in x.iter().enumerate() {
            if !c.is_zero() {
                m.add_assign_scaled(c, &self.base_at(p, a));
            }
        }
        m
    }

    pub fn d_at(&self, p: i64) -> Matrix {
        match self.index(p) {
            Some(i) => self.d[i].clone(),
            None => Matrix::zeros(self.dim_at(p + 1), self.dim_at(p)),
        }
    }

    /// Action of `x` in `Lambda^i` as a map `N^p -> N^{p+i}`.
    pub fn act(&self, i: usize, x: &[Scalar], p: i64) -> Matrix {
        let alg = &self.pair.lambda.algebra;
        if i == 0 {
            return self.base_op_at(p, x);
        }
        let mut out = Matrix::zeros(self.dim_at(p + i as i64), self.dim_at(p));
        for (b, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = alg.word(i, b);
            let mut op = Matrix::identity(self.dim_at(p));
            let mut q = p;
            for &s in w.iter().rev() {
                op = self.gen_at(q, s).mul(&op);
                q += 1;
            }
            out.add_assign_scaled(c, &op);
        }
        out
    }

    pub fn verify(&self) -> CurvedModuleReport {
        let pair = &self.pair;
        let alg = &pair.lambda.algebra;
        let k = pair.presentation.base();
        let dual_mod = alg.component(1);
        let mut failure: Option<String> = None;
        let mut fail = |msg: String, flag: &mut bool| {
            *flag = false;
            if failure.is_none() {
                failure = Some(msg);
            }
        };
        let (mut relations, mut leibniz, mut curvature) = (true, true, true);
        let nk = k.dim();
        let nf = pair.lambda_dim(1);
        let rels = pair.lambda.dual.presentation.relations().basis().to_vec();
        let sq = pair.lambda.dual.presentation.clone();
        for p in self.degrees() {
            if self.base_op_at(p, k.unit()) != Matrix::identity(self.dim_at(p)) {
                fail(format!("unit does not act as identity in degree {p}"), &mut relations);
            }
            for a in 0..nk {
                for b in 0..nk {
                    let prod = k.mul(&unit_vec(nk, a), &unit_vec(nk, b));
                    if self.base_at(p, a).mul(&self.base_at(p, b)) != self.base_op_at(p, &prod) {
                        fail(format!("k action not associative in degree {p}"), &mut relations);
                    }
                }
                for s in 0..nf {
                    let af = dual_mod.left(a).column(s);
                    let fa = dual_mod.right(a).column(s);
                    let lhs = self.act(1, &af, p);
                    if lhs != self.base_at(p + 1, a).mul(&self.gen_at(p, s)) {
                        fail(format!("generator {s} not left k-linear in degree {p}"), &mut relations);
                    }
                    if self.act(1, &fa, p) != self.gen_at(p, s).mul(&self.base_at(p, a)) {
                        fail(format!("generator {s} not right k-linear in degree {p}"), &mut relations);
                    }
                }
                // d is k-linear since d vanishes on Lambda^0
                if self.d_at(p).mul(&self.base_at(p, a)) != self.base_at(p + 1, a).mul(&self.d_at(p)) {
                    fail(format!("d_N is not k-linear in degree {p}"), &mut leibniz);
                }
            }
            for (r, q) in rels.iter().enumerate() {
                let mut op = Matrix::zeros(self.dim_at(p + 2), self.dim_at(p));
                for (i, j, c) in sq.relation_terms(q) {
                    op.add_assign_scaled(&c, &self.gen_at(p + 1, i).mul(&self.gen_at(p, j)));
                }
                if !op.is_zero() {
                    fail(format!("dual relation {r} does not annihilate degree {p}"), &mut relations);
                }
            }
            for s in 0..nf {
                let lhs = self.d_at(p + 1).mul(&self.gen_at(p, s));
                let mut rhs = self.act(2, &pair.lambda.d[1].column(s), p);
                rhs.add_assign_scaled(&-Scalar::one(), &self.gen_at(p + 1, s).mul(&self.d_at(p)));
                if lhs != rhs {
                    fail(format!("Leibniz rule fails for generator {s} in degree {p}"), &mut leibniz);
                }
            }
            let d2 = self.d_at(p + 1).mul(&self.d_at(p));
            if d2 != self.act(2, &pair.lambda.curvature, p) {
                fail(format!("d_N^2 differs from the curvature action in degree {p}"), &mut curvature);
            }
        }
        CurvedModuleReport { relations, leibniz, curvature, failure }
    }

    /// Vectors killed by every generator of positive degree, per degree.
    pub fn socle(&self) -> Vec<Subspace> {
        self.degrees()
            .map(|p| {
                let n = self.dim_at(p);
                let mats: Vec<Matrix> = (0..self.pair.lambda_dim(1)).map(|s| self.gen_at(p, s)).collect();
                let refs: Vec<&Matrix> = mats.iter().collect();
                if refs.is_empty() || n == 0 {
                    return Subspace::full(n);
                }
                Matrix::vstack(&refs).kernel()
            })
            .collect()
    }
}

/// A block of `G(M)^n`: left `k`-linear maps `Lambda^i -> M^{n+i}`.
#[derive(Clone, Debug)]
struct HomBlock {
    i: usize,
    rows: usize,
    cols: usize,
    space: Subspace,
    offset: usize,
}

#[derive(Clone, Debug)]
struct GComponent {
    blocks: Vec<HomBlock>,
    dim: usize,
}

impl GComponent {
    fn block(&self, i: usize) -> Option<&HomBlock> {
        self.blocks.iter().find(|b| b.i == i)
    }

    /// Matrix of block `i` for the element `v`.
    fn matrix(&self, v: &[Scalar], i: usize) -> Option<Matrix> {
        let b = self.block(i)?;
        let coords = &v[b.offset..b.offset + b.space.dim()];
        Some(unflatten(&b.space.combination(coords), b.rows, b.cols))
    }

    fn coords(&self, mats: &BTreeMap<usize, Matrix>) -> Vec<Scalar> {
        let mut out = zero_vec(self.dim);
        for b in &self.blocks {
            if let Some(m) = mats.get(&b.i) {
                let c = b.space.coordinates(&flatten(m)).expect("map is left k-linear");
                for (t, x) in c.into_iter().enumerate() {
                    out[b.offset + t] = x;
                }
            }
        }
        out
    }
}

/// `G(M) = HOM_k(Lambda, M)` with `(a f)(b) = (-1)^{|a|(|f|+|b|)} f(b a)` and
/// `d f = d_M f - (-1)^{|f|} f d_T`.
pub fn g_functor(pair: &Arc<KoszulPair>, m: &UComplex) -> Result<CurvedModule, CurvedError> {
    Ok(g_functor_with_evaluation(pair, m)?.0)
}

/// `G(M)` together with `f -> f(1)`, `G(M)^n -> M^n`, for each degree of `G(M)`.
pub fn g_functor_with_evaluation(pair: &Arc<KoszulPair>, m: &UComplex) -> Result<(CurvedModule, Vec<Matrix>), CurvedError> {
    let top = pair.top as i64;
    let nk = pair.k_dim();
    let lo = m.start - top;
    let hi = m.start + m.modules.len() as i64 - 1;
    let lam = &pair.lambda.algebra;
    let comps: Vec<GComponent> = (lo..=hi)
        .map(|n| {
            let mut blocks = Vec::new();
            let mut off = 0;
            for i in 0..=pair.top {
                let Some(target) = m.module_at(n + i as i64) else { continue };
                if lam.dim(i) == 0 || target.dim == 0 {
                    continue;
                }
                let pairs: Vec<(Matrix, Matrix)> =
                    (0..nk).map(|a| (lam.component(i).left(a).clone(), target.base[a].clone())).collect();
                let space = intertwiner_space(lam.dim(i), target.dim, &pairs);
                let d = space.dim();
                blocks.push(HomBlock { i, rows: target.dim, cols: lam.dim(i), space, offset: off });
                off += d;
            }
            GComponent { blocks, dim: off }
        })
        .collect();
    let comp = |n: i64| -> Option<&GComponent> {
        let i = n - lo;
        (i >= 0 && i <= hi - lo).then(|| &comps[i as usize])
    };
    let nf = pair.lambda_dim(1);
    let map_between = |n: i64, f: &dyn Fn(&GComponent, &[Scalar]) -> BTreeMap<usize, Matrix>, shift: i64| -> Matrix {
        let src = comp(n).unwrap();
        let rows = comp(n + shift).map_or(0, |c| c.dim);
        let cols: Vec<Vec<Scalar>> = (0..src.dim)
            .map(|t| {
                let v = unit_vec(src.dim, t);
                let mats = f(src, &v);
                comp(n + shift).map_or_else(Vec::new, |c| c.coords(&mats))
            })
            .collect();
        Matrix::from_columns(rows, &cols)
    };
    let mut base = Vec::new();
    let mut gens = Vec::new();
    let mut d = Vec::new();
    for n in lo..=hi {
        let mut bn = Vec::new();
        for a in 0..nk {
            bn.push(map_between(n, &|src, v| {
                let mut out = BTreeMap::new();
                for b in &src.blocks {
                    let phi = src.matrix(v, b.i).unwrap();
                    out.insert(b.i, phi.mul(lam.component(b.i).right(a)));
                }
                out
            }, 0));
        }
        base.push(bn);
        let mut gn = Vec::new();
        for s in 0..nf {
            let fs = unit_vec(nf, s);
            gn.push(map_between(n, &|src, v| {
                let mut out = BTreeMap::new();
                for i in 0..pair.top {
                    if let Some(phi) = src.matrix(v, i + 1) {
                        let sg = if (n + i as i64).rem_euclid(2) == 0 { Scalar::one() } else { -Scalar::one() };
                        out.insert(i, phi.mul(&pair.right_mul(&fs, 1, i)).scaled(&sg));
                    }
                }
                out
            }, 1));
        }
        gens.push(gn);
        let sign = if n.rem_euclid(2) == 0 { Scalar::one() } else { -Scalar::one() };
        d.push(map_between(n, &|src, v| {
            let mut out: BTreeMap<usize, Matrix> = BTreeMap::new();
            for i in 0..=pair.top {
                let target = n + 1 + i as i64;
                let Some(tm) = m.module_at(target) else { continue };
                let mut acc = Matrix::zeros(tm.dim, lam.dim(i));
                if let Some(phi) = src.matrix(v, i) {
                    acc.add_assign_scaled(&Scalar::one(), &m.d_at(n + i as i64).mul(&phi));
                }
                if let Some(phi1) = src.matrix(v, i + 1) {
                    let mut inner = phi1.mul(&pair.d_lambda(i));
                    for (g, s, c) in &pair.coev {
                        inner.add_assign_scaled(c, &tm.gens[*g].mul(&phi1).mul(&pair.left_gen(*s, i)));
                    }
                    acc.add_assign_scaled(&-sign.clone(), &inner);
                }
                out.insert(i, acc);
            }
            out
        }, 1));
    }
    let dims: Vec<usize> = comps.iter().map(|c| c.dim).collect();
    // drop the maps into degree hi + 1
    let nlast = dims.len() - 1;
    gens[nlast] = vec![Matrix::zeros(0, dims[nlast]); nf];
    d[nlast] = Matrix::zeros(0, dims[nlast]);
    let unit = pair.presentation.base().unit().to_vec();
    let eval: Vec<Matrix> = (lo..=hi)
        .map(|n| {
            let c = comp(n).unwrap();
            let cols: Vec<Vec<Scalar>> = (0..c.dim)
                .map(|t| match c.matrix(&unit_vec(c.dim, t), 0) {
                    Some(phi) => phi.mul_vec(&unit),
                    None => zero_vec(m.dim_at(n)),
                })
                .collect();
            Matrix::from_columns(m.dim_at(n), &cols)
        })
        .collect();
    Ok((CurvedModule::new(pair.clone(), lo, dims, base, gens, d)?, eval))
}

/// `F_j(N)`: degree `p` is `F_{j+p} U (x)_k N^p` with
/// `d(u (x) n) = sum u x_alpha (x) xhat_alpha n + u (x) d_N n`.
pub fn f_truncated(n: &CurvedModule, j: usize) -> Result<Complex, CurvedError> {
    Ok(f_truncation(n, j)?.complex)
}

/// `F_j(N)` with the coordinates used to build it.
#[derive(Clone, Debug)]
pub struct FTruncation {
    pub complex: Complex,
    /// `F_{n_f} U` with `n_f = j + ` top degree of `N`.
    pub algebra: FilteredAlgebra,
    /// `F_{n_f} U (x)_k N^p` as a quotient of `F_{n_f} U (x) N^p`, per degree.
    pub quotients: Vec<Quotient>,
    /// `F_{j+p} U (x)_k N^p` inside the quotient coordinates.
    pub subspaces: Vec<Subspace>,
}

pub fn f_truncation(n: &CurvedModule, j: usize) -> Result<FTruncation, CurvedError> {
    let pair = &n.pair;
    let hi = n.degrees().end - 1;
    let nf_deg = (j as i64 + hi).max(1) as usize;
    let fa = truncate_filtered(&pair.presentation, nf_deg)?;
    let du = fa.dim();
    let nk = pair.k_dim();
    let right_k: Vec<Matrix> = (0..nk).map(|a| fa.module().right(a).clone()).collect();
    let right_gen: Vec<Matrix> = (0..pair.e_dim()).map(|i| fa.right_gen(i)).collect();
    let mut quots = Vec::new();
    let mut subs = Vec::new();
    for p in n.degrees() {
        let dn = n.dim_at(p);
        let left_n: Vec<Matrix> = (0..nk).map(|a| n.base_at(p, a)).collect();
        let q = quotient_full(&balanced_relations(&right_k, &left_n, du, dn));
        let m = j as i64 + p;
        let span: Vec<Vec<Scalar>> = if m < 0 {
            Vec::new()
        } else {
            let mut v = Vec::new();
            for b in fa.filtration_basis(m as usize) {
                for t in 0..dn {
                    let mut raw = zero_vec(du * dn);
                    raw[b * dn + t] = int(1);
                    v.push(q.project(&raw));
                }
            }
            v
        };
        subs.push(Subspace::span(q.dim(), span));
        quots.push(q);
    }
    let mut maps = Vec::new();
    let degs: Vec<i64> = n.degrees().collect();
    for (idx, &p) in degs.iter().enumerate().take(degs.len().saturating_sub(1)) {
        let mut raw = Matrix::identity(du).kron(&n.d_at(p));
        for (g, s, c) in &pair.coev {
            raw.add_assign_scaled(c, &right_gen[*g].kron(&n.gen_at(p, *s)));
        }
        let (q0, q1) = (&quots[idx], &quots[idx + 1]);
        for v in q0.kernel().basis() {
            if !is_zero_vec(&q1.project(&raw.mul_vec(v))) {
                return Err(CurvedError::Axiom(format!("F differential is not balanced in degree {p}")));
            }
        }
        let (s0, s1) = (&subs[idx], &subs[idx + 1]);
        let cols: Vec<Vec<Scalar>> = s0
            .basis()
            .iter()
            .map(|v| {
                let img = q1.project(&raw.mul_vec(&q0.lift(v)));
                s1.coordinates(&img).expect("F_j is a subcomplex")
            })
            .collect();
        maps.push(Matrix::from_columns(s1.dim(), &cols));
    }
    let complex = Complex::checked(n.start, subs.iter().map(|s| s.dim()).collect(), maps)?;
    Ok(FTruncation { complex, algebra: fa, quotients: quots, subspaces: subs })
}

/// `S(N) = {n | a n = 0 for |a| > 0}` with the restricted differential.
pub fn s_functor(n: &CurvedModule) -> Result<Complex, CurvedError> {
    let soc = n.socle();
    let degs: Vec<i64> = n.degrees().collect();
    let mut maps = Vec::new();
    for idx in 0..degs.len().saturating_sub(1) {
        let d = n.d_at(degs[idx]);
        let cols: Vec<Vec<Scalar>> = soc[idx]
            .basis()
            .iter()
            .map(|v| {
                soc[idx + 1]
                    .coordinates(&d.mul_vec(v))
                    .ok_or_else(|| CurvedError::Axiom("d_N does not preserve the socle".into()))
            })
            .collect::<Result<_, _>>()?;
        maps.push(Matrix::from_columns(soc[idx + 1].dim(), &cols));
    }
    Ok(Complex::checked(n.start, soc.iter().map(|s| s.dim()).collect(), maps)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounitReport {
    pub j: usize,
    pub module: CohomologyTable,
    pub at_j: CohomologyTable,
    pub at_j_plus_one: CohomologyTable,
}

impl CounitReport {
    pub fn matches(&self) -> bool {
        self.at_j.same_as(&self.module)
    }

    pub fn stable(&self) -> bool {
        self.at_j.same_as(&self.at_j_plus_one)
    }

    pub fn pass(&self) -> bool {
        self.matches() && self.stable()
    }
}

/// Compares `H(F_j G(M))` and `H(F_{j+1} G(M))` with `H(M)`.
pub fn verify_counit(pair: &Arc<KoszulPair>, m: &UComplex, j: usize) -> Result<CounitReport, CurvedError> {
    let g = g_functor(pair, m)?;
    Ok(CounitReport {
        j,
        module: m.cohomology()?,
        at_j: f_truncated(&g, j)?.cohomology()?,
        at_j_plus_one: f_truncated(&g, j + 1)?.cohomology()?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvsFReport {
    pub j: usize,
    pub s: CohomologyTable,
    pub at_j: CohomologyTable,
    pub at_j_plus_one: CohomologyTable,
    /// `S(I)` is acyclic: the pointwise test for membership in the kernel
    /// of the equivalence.
    pub s_acyclic: bool,
}

impl SvsFReport {
    pub fn matches(&self) -> bool {
        self.at_j.same_as(&self.s)
    }

    pub fn stable(&self) -> bool {
        self.at_j.same_as(&self.at_j_plus_one)
    }

    pub fn pass(&self) -> bool {
        self.matches() && self.stable()
    }
}

pub fn verify_s_vs_f(i: &CurvedModule, j: usize) -> Result<SvsFReport, CurvedError> {
    let s = s_functor(i)?.cohomology()?;
    Ok(SvsFReport {
        j,
        s_acyclic: s.is_zero(),
        s,
        at_j: f_truncated(i, j)?.cohomology()?,
        at_j_plus_one: f_truncated(i, j + 1)?.cohomology()?,
    })
}

/// Degree `t` part of a Hom complex: one map per source degree `p`.
#[derive(Clone, Debug)]
struct HomDegree {
    /// `(p, rows, cols, offset)` into the flattened ambient.
    parts: Vec<(i64, usize, usize, usize)>,
    ambient: usize,
    space: Subspace,
}

impl HomDegree {
    fn layout(sources: impl Iterator<Item = (i64, usize, usize)>) -> Self {
        let mut parts = Vec::new();
        let mut off = 0;
        for (p, r, c) in sources {
            if r > 0 && c > 0 {
                parts.push((p, r, c, off));
                off += r * c;
            }
        }
        HomDegree { parts, ambient: off, space: Subspace::zero(off) }
    }

    fn part(&self, v: &[Scalar], p: i64) -> Option<Matrix> {
        let &(_, r, c, off) = self.parts.iter().find(|x| x.0 == p)?;
        Some(unflatten(&v[off..off + r * c], r, c))
    }

    fn flatten_parts(&self, mats: &BTreeMap<i64, Matrix>) -> Vec<Scalar> {
        let mut out = zero_vec(self.ambient);
        for &(p, r, c, off) in &self.parts {
            if let Some(m) = mats.get(&p) {
                debug_assert_eq!((m.rows(), m.cols()), (r, c));
                out[off..off + r * c].clone_from_slice(m.entries());
            }
        }
        out
    }

    /// Restricts to the kernel of the linear map `defect`.
    fn cut(mut self, defect: &dyn Fn(&HomDegree, &[Scalar]) -> Vec<Scalar>) -> Self {
        let cols: Vec<Vec<Scalar>> = (0..self.ambient).map(|i| defect(&self, &unit_vec(self.ambient, i))).collect();
        let nrows = cols.first().map_or(0, |c| c.len());
        self.space = if self.ambient == 0 {
            Subspace::zero(0)
        } else if nrows == 0 {
            Subspace::full(self.ambient)
        } else {
            Matrix::from_columns(nrows, &cols).kernel()
        };
        self
    }
}

fn sign_of(t: i64) -> Scalar {
    if t.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

fn assemble(
    start: i64,
    spaces: &[HomDegree],
    d: &dyn Fn(usize, &[Scalar]) -> Vec<Scalar>,
) -> Result<Complex, CurvedError> {
    let mut maps = Vec::new();
    for idx in 0..spaces.len().saturating_sub(1) {
        let target = &spaces[idx + 1].space;
        let cols: Vec<Vec<Scalar>> = spaces[idx]
            .space
            .basis()
            .iter()
            .map(|v| {
                target.coordinates(&d(idx, v)).ok_or_else(|| CurvedError::Axiom(format!("Hom differential leaves degree {}", start + idx as i64 + 1)))
            })
            .collect::<Result<_, _>>()?;
        maps.push(Matrix::from_columns(target.dim(), &cols));
    }
    Ok(Complex::checked(start, spaces.iter().map(|s| s.space.dim()).collect(), maps)?)
}

/// `HOM_U(F(N), M)`, realized as `prod_p Hom_k(N^p, M^{p+t})` with
/// `D h = d_M h - (-1)^t (sum x_alpha h(xhat_alpha n) + h(d_N n))`.
pub fn hom_f_complex(pair: &Arc<KoszulPair>, n: &CurvedModule, m: &UComplex) -> Result<Complex, CurvedError> {
    let nk = pair.k_dim();
    let (nlo, nhi) = (n.start, n.degrees().end - 1);
    let (mlo, mhi) = (m.start, m.degrees().end - 1);
    let (tmin, tmax) = (mlo - nhi - 1, mhi - nlo + 1);
    let spaces: Vec<HomDegree> = (tmin..=tmax)
        .map(|t| {
            HomDegree::layout(n.degrees().map(|p| (p, m.dim_at(p + t), n.dim_at(p)))).cut(&|hd, v| {
                let mut out = Vec::new();
                for &(p, _, _, _) in &hd.parts {
                    let h = hd.part(v, p).unwrap();
                    let tm = m.module_at(p + t).unwrap();
                    for a in 0..nk {
                        out.extend(h.mul(&n.base_at(p, a)).sub(&tm.base[a].mul(&h)).entries().iter().cloned());
                    }
                }
                out
            })
        })
        .collect();
    let d = |idx: usize, v: &[Scalar]| -> Vec<Scalar> {
        let t = tmin + idx as i64;
        let sign = sign_of(t);
        let (src, dst) = (&spaces[idx], &spaces[idx + 1]);
        let mut out = BTreeMap::new();
        for &(p, r, c, _) in &dst.parts {
            let mut acc = Matrix::zeros(r, c);
            if let Some(h) = src.part(v, p) {
                acc.add_assign_scaled(&Scalar::one(), &m.d_at(p + t).mul(&h));
            }
            if let Some(h1) = src.part(v, p + 1) {
                let tm = m.module_at(p + t + 1).unwrap();
                let mut inner = h1.mul(&n.d_at(p));
                for (gi, s, cc) in &pair.coev {
                    inner.add_assign_scaled(cc, &tm.gens[*gi].mul(&h1).mul(&n.gen_at(p, *s)));
                }
                acc.add_assign_scaled(&-sign.clone(), &inner);
            }
            out.insert(p, acc);
        }
        dst.flatten_parts(&out)
    };
    assemble(tmin, &spaces, &d)
}

/// `HOM_Lambda(N, N')` for curved modules: graded maps with
/// `h(a x) = (-1)^{t|a|} a h(x)` and `D h = d' h - (-1)^t h d`.
pub fn hom_lambda_complex(n: &CurvedModule, g: &CurvedModule) -> Result<Complex, CurvedError> {
    let nk = n.pair.k_dim();
    let nf = n.pair.lambda_dim(1);
    let (nlo, nhi) = (n.start, n.degrees().end - 1);
    let (glo, ghi) = (g.start, g.degrees().end - 1);
    let (tmin, tmax) = (glo - nhi - 1, ghi - nlo + 1);
    let spaces: Vec<HomDegree> = (tmin..=tmax)
        .map(|t| {
            let sign = sign_of(t);
            HomDegree::layout(n.degrees().map(|p| (p, g.dim_at(p + t), n.dim_at(p)))).cut(&|hd, v| {
                let hz = |q: i64| hd.part(v, q).unwrap_or_else(|| Matrix::zeros(g.dim_at(q + t), n.dim_at(q)));
                let mut out = Vec::new();
                for p in n.degrees() {
                    let h = hz(p);
                    for a in 0..nk {
                        out.extend(h.mul(&n.base_at(p, a)).sub(&g.base_at(p + t, a).mul(&h)).entries().iter().cloned());
                    }
                    for s in 0..nf {
                        let mut x = hz(p + 1).mul(&n.gen_at(p, s));
                        x.add_assign_scaled(&-sign.clone(), &g.gen_at(p + t, s).mul(&h));
                        out.extend(x.entries().iter().cloned());
                    }
                }
                out
            })
        })
        .collect();
    let d = |idx: usize, v: &[Scalar]| -> Vec<Scalar> {
        let t = tmin + idx as i64;
        let sign = sign_of(t);
        let (src, dst) = (&spaces[idx], &spaces[idx + 1]);
        let mut out = BTreeMap::new();
        for &(p, r, c, _) in &dst.parts {
            let mut acc = Matrix::zeros(r, c);
            if let Some(h) = src.part(v, p) {
                acc.add_assign_scaled(&Scalar::one(), &g.d_at(p + t).mul(&h));
            }
            if let Some(h1) = src.part(v, p + 1) {
                acc.add_assign_scaled(&-sign.clone(), &h1.mul(&n.d_at(p)));
            }
            out.insert(p, acc);
        }
        dst.flatten_parts(&out)
    };
    assemble(tmin, &spaces, &d)
}

/// `dim H^0 HOM_U(F(N), M)` and `dim H^0 HOM_Lambda(N, G(M))`.
pub fn adjunction_h0(pair: &Arc<KoszulPair>, n: &CurvedModule, m: &UComplex) -> Result<(usize, usize), CurvedError> {
    let g = g_functor(pair, m)?;
    let left = hom_f_complex(pair, n, m)?.cohomology()?.get(0);
    let right = hom_lambda_complex(n, &g)?.cohomology()?.get(0);
    Ok((left, right))
}

/// Small modules over `Sym(Q^2) x| Z/2` presented as the homogeneous
/// symplectic reflection algebra (`E = V (x) kG`, `k = Q{1, s}`).
pub fn sym2_z2_palette(p: &NonhomogeneousPresentation) -> Result<Vec<UModule>, CurvedError> {
    // each entry: dim, s-action (diagonal signs), x-action, y-action
    let specs: Vec<(usize, Vec<i64>, Vec<i64>, Vec<i64>)> = vec![
        (1, vec![1], vec![0], vec![0]),
        (1, vec![-1], vec![0], vec![0]),
        (2, vec![1, 0, 0, -1], vec![0, 0, 1, 0], vec![0, 0, 0, 0]),
        (2, vec![-1, 0, 0, 1], vec![0, 0, 0, 0], vec![0, 0, 1, 0]),
        (2, vec![1, 0, 0, -1], vec![0, 0, 1, 0], vec![0, 0, 2, 0]),
        (3, vec![1, 0, 0, 0, -1, 0, 0, 0, -1], vec![0, 0, 0, 1, 0, 0, 0, 0, 0], vec![0, 0, 0, 0, 0, 0, 1, 0, 0]),
    ];
    specs
        .into_iter()
        .map(|(n, s, x, y)| {
            let s = Matrix::from_i64(n, n, &s);
            let xs = [Matrix::from_i64(n, n, &x), Matrix::from_i64(n, n, &y)];
            let base = vec![Matrix::identity(n), s.clone()];
            // v_i (x) h acts as v_i . h
            let mut gens = Vec::new();
            for xi in &xs {
                gens.push(xi.clone());
                gens.push(xi.mul(&s));
            }
            UModule::new(p, n, base, gens)
        })
        .collect()
}

/// Random bounded complex built from palette summands with
/// `U`-linear differentials squaring to zero.
pub fn random_ucomplex(
    palette: &[UModule],
    rng: &mut impl Rng,
    max_dim: usize,
    max_len: usize,
) -> UComplex {
    let len = rng.gen_range(1..=max_len);
    let mut modules = Vec::new();
    for _ in 0..len {
        let mut parts: Vec<&UModule> = Vec::new();
        let mut dim = 0;
        let target = rng.gen_range(1..=max_dim);
        for _ in 0..8 {
            let m = &palette[rng.gen_range(0..palette.len())];
            if dim + m.dim <= target {
                dim += m.dim;
                parts.push(m);
            }
        }
        if parts.is_empty() {
            parts.push(palette.iter().min_by_key(|m| m.dim).unwrap());
        }
        modules.push(UModule::direct_sum(&parts));
    }
    let mut d: Vec<Matrix> = Vec::new();
    for i in 0..len.saturating_sub(1) {
        let (a, b) = (&modules[i], &modules[i + 1]);
        let hom = a.hom_space(b);
        // restrict to maps killing the image of the previous differential
        let basis: Vec<Matrix> = hom.basis().iter().map(|v| unflatten(v, b.dim, a.dim)).collect();
        let allowed: Vec<Vec<Scalar>> = if i == 0 {
            (0..basis.len()).map(|t| unit_vec(basis.len(), t)).collect()
        } else {
            let prev = &d[i - 1];
            let cols: Vec<Vec<Scalar>> = basis.iter().map(|f| f.mul(prev).entries().to_vec()).collect();
            if cols.is_empty() {
                Vec::new()
            } else {
                Matrix::from_columns(b.dim * modules[i - 1].dim, &cols).kernel().basis().to_vec()
            }
        };
        let mut f = Matrix::zeros(b.dim, a.dim);
        for coeffs in &allowed {
            let r = int(rng.gen_range(-2..=2));
            if r.is_zero() {
                continue;
            }
            for (t, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    f.add_assign_scaled(&(&r * c), &basis[t]);
                }
            }
        }
        d.push(f);
    }
    let start = -rng.gen_range(0..len as i64);
    UComplex::new(start, modules, d).expect("random complex is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::Matrix;

    #[test]
    fn zero_complex_has_empty_table() {
        let t = Complex::zero().cohomology().unwrap();
        assert!(t.dims.is_empty());
    }

    #[test]
    fn identity_is_acyclic() {
        let c = Complex::checked(0, vec![1, 1], vec![Matrix::identity(1)]).unwrap();
        let t = c.cohomology().unwrap();
        assert_eq!(t.get(0), 0);
        assert_eq!(t.get(1), 0);
        assert!(c.witness(0).is_none());
    }

    #[test]
    fn rejects_nonzero_square() {
        let m = Matrix::identity(1);
        assert_eq!(
            Complex::checked(0, vec![1, 1, 1], vec![m.clone(), m]).unwrap_err(),
            ComplexError::NotSquareZero(0)
        );
    }
    use crate::gallery::{build_enveloping, build_sra, symmetric_algebra, GroupData, LieData, SraData, standard_symplectic};
    use rand::SeedableRng;

    fn sym2() -> Arc<KoszulPair> {
        let q = symmetric_algebra(2).unwrap();
        KoszulPair::new(&NonhomogeneousPresentation::from_quadratic(&q).unwrap()).unwrap()
    }

    fn trivial_umodule(p: &NonhomogeneousPresentation) -> UModule {
        let ne = p.generators().dim();
        UModule::new(p, 1, vec![Matrix::identity(1)], vec![Matrix::zeros(1, 1); ne]).unwrap()
    }

    fn sym_z2() -> Arc<KoszulPair> {
        let data = SraData::new(GroupData::z2(2), standard_symplectic(1), int(0), int(0));
        KoszulPair::new(&build_sra(&data).unwrap()).unwrap()
    }

    fn sl2_pair() -> Arc<KoszulPair> {
        KoszulPair::new(&build_enveloping(&LieData::sl2(), None).unwrap()).unwrap()
    }

    fn sl2_standard(p: &NonhomogeneousPresentation) -> UModule {
        let e = Matrix::from_i64(2, 2, &[0, 1, 0, 0]);
        let f = Matrix::from_i64(2, 2, &[0, 0, 1, 0]);
        let h = Matrix::from_i64(2, 2, &[1, 0, 0, -1]);
        UModule::new(p, 2, vec![Matrix::identity(2)], vec![e, f, h]).unwrap()
    }

    #[test]
    fn g_of_trivial_module_is_exterior() {
        let pair = sym2();
        assert_eq!(pair.top, 2);
        let k = trivial_umodule(&pair.presentation);
        let g = g_functor(&pair, &UComplex::single(k, 0)).unwrap();
        assert_eq!(g.dims, vec![1, 2, 1]);
        assert_eq!(g.start, -2);
        assert!(g.verify().pass());
    }

    #[test]
    fn f0_of_g_recovers_module() {
        let pair = sym2();
        let k = trivial_umodule(&pair.presentation);
        let m = UComplex::single(k, 0);
        let r = verify_counit(&pair, &m, 0).unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn sl2_counit_matches() {
        let pair = sl2_pair();
        assert_eq!(pair.top, 3);
        let v = sl2_standard(&pair.presentation);
        let m = UComplex::single(v, 0);
        let r = verify_counit(&pair, &m, 3).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.module.get(0), 2);
    }

    #[test]
    fn palette_modules_validate() {
        let pair = sym_z2();
        let pal = sym2_z2_palette(&pair.presentation).unwrap();
        assert_eq!(pal.len(), 6);
        assert!(!pal[0].is_hom(&pal[1], &Matrix::identity(1)));
    }

    #[test]
    fn random_complex_counit() {
        let pair = sym_z2();
        let pal = sym2_z2_palette(&pair.presentation).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let m = random_ucomplex(&pal, &mut rng, 3, 2);
            let r = verify_counit(&pair, &m, 3).unwrap();
            assert!(r.pass(), "{r:?}");
        }
    }

    #[test]
    fn s_of_trivial_curved_module() {
        let pair = sym2();
        let n = CurvedModule::trivial(pair).unwrap();
        let r = verify_s_vs_f(&n, 3).unwrap();
        assert_eq!(r.s.get(0), 1);
        assert_eq!(r.at_j.get(0), 10);
    }

    #[test]
    fn s_vs_f_on_g_of_trivial() {
        let pair = sym_z2();
        let pal = sym2_z2_palette(&pair.presentation).unwrap();
        let g = g_functor(&pair, &UComplex::single(pal[0].clone(), 0)).unwrap();
        let r = verify_s_vs_f(&g, 3).unwrap();
        assert_eq!(r.s.nonzero(), BTreeMap::from([(0, 1)]));
        assert!(!r.s_acyclic);
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn adjunction_on_trivial_modules() {
        let pair = sl2_pair();
        let n = CurvedModule::trivial(pair.clone()).unwrap();
        let m = UComplex::single(sl2_standard(&pair.presentation), 0);
        let (l, r) = adjunction_h0(&pair, &n, &m).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn curved_g_at_t_zero() {
        let data = SraData::new(GroupData::z2(2), standard_symplectic(1), int(0), int(1));
        let pair = KoszulPair::new(&build_sra(&data).unwrap()).unwrap();
        assert!(!pair.lambda.curvature.iter().all(|x| x.is_zero()));
        let m = [1i64, -1, 2, -2]
            .into_iter()
            .find_map(|kappa| {
                let s = Matrix::from_i64(2, 2, &[1, 0, 0, -1]);
                let x = Matrix::from_i64(2, 2, &[0, 1, 0, 0]);
                let y = Matrix::from_i64(2, 2, &[0, 0, kappa, 0]);
                let gens = vec![x.clone(), x.mul(&s), y.clone(), y.mul(&s)];
                UModule::new(&pair.presentation, 2, vec![Matrix::identity(2), s], gens).ok()
            })
            .expect("a two-dimensional module exists");
        let mc = UComplex::single(m, 0);
        let g = g_functor(&pair, &mc).unwrap();
        assert!(g.verify().pass());
        let r = verify_counit(&pair, &mc, 3).unwrap();
        assert!(r.pass(), "{r:?}");
        let s = verify_s_vs_f(&g, 3).unwrap();
        assert!(s.pass(), "{s:?}");
    }
}
