//! Non-homogeneous quadratic presentations `R ⊂ k ⊕ E ⊕ E (x)_k E`: the
//! maps alpha and beta, the PBW conditions, the curved dual and filtered
//! truncations of `U = T_k(E)/(R)`.

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::base_bimodules::{BaseRing, Bimodule, BimoduleError, TensorProduct};
use crate::quadratic::{
    koszulness_check, pair_words, quadratic_dual, truncate_algebra, KoszulData, QuadraticDual, QuadraticError,
    QuadraticPresentation, TruncatedGradedAlgebra,
};
use crate::exact_linalg::{
    add_scaled, is_zero_vec, quotient_full, unit_vec, zero_vec, Matrix, Quotient, Scalar, Subspace,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NonhomogeneousError {
    #[error(transparent)]
    Quadratic(#[from] QuadraticError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error("relation vector {0} has length {1}, expected {2}")]
    Shape(usize, usize, usize),
    #[error("relations meet k (+) E in dimension {0}")]
    MeetsLowerFiltration(usize),
    #[error("PBW conditions fail: {0}")]
    PbwFailure(String),
    #[error("cdga axiom fails: {0}")]
    CdgaFailure(String),
    #[error("truncation degree {0} is too small (need at least {1})")]
    Degree(usize, usize),
}

/// Relations given in the coordinates of `k ⊕ E ⊕ E (x)_k E`.
#[derive(Clone, Debug)]
pub struct NonhomogeneousPresentation {
    gens: Bimodule,
    ambient: Bimodule,
    relations: Subspace,
    quadratic: QuadraticPresentation,
    alpha: Matrix,
    beta: Matrix,
}

impl NonhomogeneousPresentation {
    /// `R` is the sub-bimodule generated by `vectors`.
    pub fn new(gens: Bimodule, vectors: &[Vec<Scalar>]) -> Result<Self, NonhomogeneousError> {
        let square = crate::base_bimodules::tensor_over_k(&gens, &gens)?;
        let regular = Bimodule::regular(gens.base());
        let ambient = Bimodule::direct_sum(&[&regular, &gens, &square.module])?;
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != ambient.dim() {
                return Err(NonhomogeneousError::Shape(i, v.len(), ambient.dim()));
            }
        }
        let relations = ambient.generate(vectors);
        Self::from_subspace(gens, ambient, square, relations)
    }

    /// The homogeneous presentation `R = Q`.
    pub fn from_quadratic(p: &QuadraticPresentation) -> Result<Self, NonhomogeneousError> {
        let (dk, de) = (p.base().dim(), p.generators().dim());
        let vecs: Vec<Vec<Scalar>> = p
            .relations()
            .basis()
            .iter()
            .map(|q| {
                let mut v = zero_vec(dk + de);
                v.extend(q.iter().cloned());
                v
            })
            .collect();
        Self::new(p.generators().clone(), &vecs)
    }

    fn from_subspace(
        gens: Bimodule,
        ambient: Bimodule,
        square: TensorProduct,
        relations: Subspace,
    ) -> Result<Self, NonhomogeneousError> {
        let (dk, de, dq) = (gens.base().dim(), gens.dim(), square.dim());
        let low = dk + de;
        let tops: Vec<Vec<Scalar>> = relations.basis().iter().map(|r| r[low..].to_vec()).collect();
        let top_space = Subspace::span(dq, tops.clone());
        if top_space.dim() != relations.dim() {
            return Err(NonhomogeneousError::MeetsLowerFiltration(relations.dim() - top_space.dim()));
        }
        let proj = Matrix::from_columns(dq, &tops);
        let mut alpha_cols = Vec::new();
        let mut beta_cols = Vec::new();
        for q in top_space.basis() {
            let coef = proj.solve(q).expect("q lies in p2(R)");
            let mut a = zero_vec(de);
            let mut b = zero_vec(dk);
            for (c, r) in coef.iter().zip(relations.basis()) {
                if !c.is_zero() {
                    add_scaled(&mut b, c, &r[..dk]);
                    add_scaled(&mut a, c, &r[dk..low]);
                }
            }
            alpha_cols.push(a);
            beta_cols.push(b);
        }
        let alpha = Matrix::from_columns(de, &alpha_cols);
        let beta = Matrix::from_columns(dk, &beta_cols);
        let quadratic = QuadraticPresentation::new(gens.clone(), top_space)?;
        Ok(NonhomogeneousPresentation { gens, ambient, relations, quadratic, alpha, beta })
    }

    pub fn base(&self) -> &Arc<BaseRing> {
        self.gens.base()
    }

    pub fn generators(&self) -> &Bimodule {
        &self.gens
    }

    /// `k ⊕ E ⊕ E (x)_k E`.
    pub fn ambient(&self) -> &Bimodule {
        &self.ambient
    }

    pub fn relations(&self) -> &Subspace {
        &self.relations
    }

    /// `(k, E, Q)` with `Q = p_2(R)`.
    pub fn quadratic(&self) -> &QuadraticPresentation {
        &self.quadratic
    }

    /// `alpha` on the stored basis of `Q` (columns).
    pub fn alpha(&self) -> &Matrix {
        &self.alpha
    }

    pub fn beta(&self) -> &Matrix {
        &self.beta
    }

    pub fn alpha_of(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.alpha.mul_vec(&self.quadratic.relations().coordinates(x).expect("x in Q"))
    }

    pub fn beta_of(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.beta.mul_vec(&self.quadratic.relations().coordinates(x).expect("x in Q"))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    /// Same `Q` and `alpha`, `beta` multiplied by `s`.
    pub fn with_scaled_beta(&self, s: &Scalar) -> Result<Self, NonhomogeneousError> {
        let vecs = self.relation_vectors(&self.alpha, &self.beta.scaled(s));
        Self::new(self.gens.clone(), &vecs)
    }

    /// `x + alpha(x) + beta(x)` for the basis of `Q`.
    pub fn relation_vectors(&self, alpha: &Matrix, beta: &Matrix) -> Vec<Vec<Scalar>> {
        self.quadratic
            .relations()
            .basis()
            .iter()
            .enumerate()
            .map(|(s, q)| {
                let mut v = beta.column(s);
                v.extend(alpha.column(s));
                v.extend(q.iter().cloned());
                v
            })
            .collect()
    }
}

/// `(Q, alpha, beta)` in the coordinates of the basis of `Q`.
#[derive(Clone, Debug)]
pub struct AlphaBeta {
    pub q: Subspace,
    pub alpha: Matrix,
    pub beta: Matrix,
}

pub fn extract_alpha_beta(p: &NonhomogeneousPresentation) -> AlphaBeta {
    AlphaBeta { q: p.quadratic().relations().clone(), alpha: p.alpha.clone(), beta: p.beta.clone() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwWitness {
    pub condition: u8,
    /// Element of `(Q (x) E) ∩ (E (x) Q)` in the coordinates of `T_3`.
    pub element: Vec<Scalar>,
    pub residual: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwReport {
    pub q_dim: usize,
    pub intersection_dim: usize,
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub witness: Option<PbwWitness>,
    /// Verdict of the Koszulness check of the quadratic part.
    pub koszul_verdict: String,
    pub koszul_cutoff: usize,
    pub quadratic_koszul: bool,
}

impl PbwReport {
    pub fn pass(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3
    }

    /// PBW property, concluded when the conditions hold and the quadratic
    /// part is Koszul up to the cutoff.
    pub fn pbw(&self) -> bool {
        self.pass() && self.quadratic_koszul
    }

    pub fn summary(&self) -> String {
        let c = |b: bool| if b { "pass" } else { "fail" };
        let tail = if !self.pass() {
            "PBW fails".to_string()
        } else if self.quadratic_koszul {
            format!("PBW ({})", self.koszul_verdict)
        } else {
            format!("conditions are necessary only ({})", self.koszul_verdict)
        };
        format!("cond1 {}, cond2 {}, cond3 {}; {}", c(self.cond1), c(self.cond2), c(self.cond3), tail)
    }
}

pub const DEFAULT_PBW_KOSZUL_CUTOFF: usize = 4;

pub fn pbw_check(p: &NonhomogeneousPresentation) -> Result<PbwReport, NonhomogeneousError> {
    pbw_check_with(p, DEFAULT_PBW_KOSZUL_CUTOFF)
}

pub fn pbw_check_with(p: &NonhomogeneousPresentation, koszul_cutoff: usize) -> Result<PbwReport, NonhomogeneousError> {
    let quad = p.quadratic();
    let data = KoszulData::new(quad, 3)?;
    let e = p.generators();
    let de = e.dim();
    let sq = quad.square();
    let qspace = quad.relations();
    let w = &data.q_minus[3];
    let mut cond = [true; 3];
    let mut witness = None;
    for (s, x) in w.basis().iter().enumerate() {
        // (alpha (x) id - id (x) alpha)(x) and (beta (x) id - id (x) beta)(x)
        let mut phi = zero_vec(sq.dim());
        let mut bb = zero_vec(de);
        for (r, j, c) in &data.right_split[3][s] {
            let ej = unit_vec(de, *j);
            add_scaled(&mut phi, c, &sq.project_pair(&p.alpha.column(*r), &ej));
            add_scaled(&mut bb, c, &e.left_op(&p.beta.column(*r)).mul_vec(&ej));
        }
        for (j, r, c) in &data.left_split[3][s] {
            let ej = unit_vec(de, *j);
            add_scaled(&mut phi, &-c.clone(), &sq.project_pair(&ej, &p.alpha.column(*r)));
            add_scaled(&mut bb, &-c.clone(), &e.right_op(&p.beta.column(*r)).mul_vec(&ej));
        }
        let fail = |n: u8, res: Vec<Scalar>, cond: &mut [bool; 3], witness: &mut Option<PbwWitness>| {
            cond[(n - 1) as usize] = false;
            if witness.is_none() {
                *witness = Some(PbwWitness { condition: n, element: x.clone(), residual: res });
            }
        };
        match qspace.coordinates(&phi) {
            None => {
                let res = qspace.reduce(&phi);
                fail(1, res, &mut cond, &mut witness);
                // conditions 2 and 3 cannot be evaluated on this element
                cond[1] = false;
                cond[2] = false;
            }
            Some(coords) => {
                let a = p.alpha.mul_vec(&coords);
                let res2: Vec<Scalar> = a.iter().zip(&bb).map(|(x, y)| x - y).collect();
                if !is_zero_vec(&res2) {
                    fail(2, res2, &mut cond, &mut witness);
                }
                let res3 = p.beta.mul_vec(&coords);
                if !is_zero_vec(&res3) {
                    fail(3, res3, &mut cond, &mut witness);
                }
            }
        }
    }
    let kr = koszulness_check(quad, koszul_cutoff)?;
    Ok(PbwReport {
        q_dim: qspace.dim(),
        intersection_dim: w.dim(),
        cond1: cond[0],
        cond2: cond[1],
        cond3: cond[2],
        witness,
        koszul_verdict: kr.verdict(),
        koszul_cutoff,
        quadratic_koszul: kr.pass(),
    })
}

/// `(A^!, d, c)` truncated to degree `N`.
#[derive(Clone, Debug)]
pub struct CurvedDGAlgebra {
    pub dual: QuadraticDual,
    pub algebra: TruncatedGradedAlgebra,
    /// `d[n]: A^!_n -> A^!_{n+1}` for `n + 1 <= N`.
    pub d: Vec<Matrix>,
    pub curvature: Vec<Scalar>,
}

impl CurvedDGAlgebra {
    pub fn max_degree(&self) -> usize {
        self.algebra.max_degree()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.algebra.hilbert()
    }

    pub fn apply_d(&self, n: usize, x: &[Scalar]) -> Vec<Scalar> {
        self.d[n].mul_vec(x)
    }

    pub fn differential_is_zero(&self) -> bool {
        self.d.iter().all(|m| m.is_zero())
    }

    /// Top nonzero degree, if the truncation shows the algebra is bounded.
    pub fn top_degree(&self) -> Option<usize> {
        let dims = self.dims();
        if *dims.last()? != 0 {
            return None;
        }
        dims.iter().rposition(|&d| d != 0)
    }

    /// Multiplication by `c` on the left, `A^!_n -> A^!_{n+2}`.
    pub fn curvature_left(&self, n: usize) -> Matrix {
        let dn = self.algebra.dim(n);
        let cols: Vec<Vec<Scalar>> =
            (0..dn).map(|b| self.algebra.mul(2, &self.curvature, n, &unit_vec(dn, b))).collect();
        Matrix::from_columns(self.algebra.dim(n + 2), &cols)
    }

    pub fn curvature_right(&self, n: usize) -> Matrix {
        let dn = self.algebra.dim(n);
        let cols: Vec<Vec<Scalar>> =
            (0..dn).map(|b| self.algebra.mul(n, &unit_vec(dn, b), 2, &self.curvature)).collect();
        Matrix::from_columns(self.algebra.dim(n + 2), &cols)
    }
}

/// Pairing matrix of the basis of `A^!_2` with the basis of `Q`: rows
/// `(relation, k-coordinate)`.
fn q_pairing(p: &QuadraticPresentation, dual: &QuadraticDual, alg: &TruncatedGradedAlgebra) -> Matrix {
    let k = p.base().dim();
    let rels: Vec<Vec<(usize, usize, Scalar)>> = p.relations().basis().iter().map(|q| p.relation_terms(q)).collect();
    let mut m = Matrix::zeros(rels.len() * k, alg.dim(2));
    for b in 0..alg.dim(2) {
        let w = alg.word(2, b);
        for (r, terms) in rels.iter().enumerate() {
            let mut val = zero_vec(k);
            for (i, j, c) in terms {
                add_scaled(&mut val, c, &pair_words(p.generators(), &dual.dual, w, &[*i, *j]));
            }
            for (a, x) in val.into_iter().enumerate() {
                m.set(r * k + a, b, x);
            }
        }
    }
    m
}

/// The curved dual; requires the PBW conditions.
pub fn curved_dual(p: &NonhomogeneousPresentation, n: usize) -> Result<CurvedDGAlgebra, NonhomogeneousError> {
    let r = pbw_check(p)?;
    if !r.pass() {
        return Err(NonhomogeneousError::PbwFailure(r.summary()));
    }
    curved_dual_unchecked(p, n)
}

/// The curved dual without the PBW precondition. The cdga axioms are still
/// verified.
pub fn curved_dual_unchecked(p: &NonhomogeneousPresentation, n: usize) -> Result<CurvedDGAlgebra, NonhomogeneousError> {
    let cdga = build_curved_dual(p, n)?;
    let report = verify_cdga(&cdga);
    if !report.pass() {
        return Err(NonhomogeneousError::CdgaFailure(report.summary()));
    }
    Ok(cdga)
}

/// Builds `(A^!, alpha^*, beta)` without running any check.
pub fn build_curved_dual(p: &NonhomogeneousPresentation, n: usize) -> Result<CurvedDGAlgebra, NonhomogeneousError> {
    if n < 2 {
        return Err(NonhomogeneousError::Degree(n, 2));
    }
    let quad = p.quadratic();
    let dual = quadratic_dual(quad)?;
    let alg = truncate_algebra(&dual.presentation, n)?;
    let k = p.base().dim();
    let pm = q_pairing(quad, &dual, &alg);
    let nq = quad.relations().dim();
    // c pairs with q_r to beta(q_r)
    let mut target = zero_vec(nq * k);
    for r in 0..nq {
        for a in 0..k {
            target[r * k + a] = p.beta.get(a, r).clone();
        }
    }
    let curvature = pm.solve(&target).expect("beta lies in Q^*");
    // d(f_s) pairs with q_r to f_s(alpha(q_r))
    let d1_cols: Vec<Vec<Scalar>> = (0..alg.dim(1))
        .map(|s| {
            let mut t = zero_vec(nq * k);
            for r in 0..nq {
                let v = dual.dual.apply(s, &p.alpha.column(r));
                for a in 0..k {
                    t[r * k + a] = v[a].clone();
                }
            }
            pm.solve(&t).expect("f o alpha lies in Q^*")
        })
        .collect();
    let mut d = vec![Matrix::zeros(alg.dim(1), alg.dim(0))];
    d.push(Matrix::from_columns(alg.dim(2), &d1_cols));
    for deg in 2..n {
        // d(a_p f_s) = d(a_p) f_s + (-1)^{deg-1} a_p d(f_s)
        let dprev = alg.dim(deg - 1);
        let cols: Vec<Vec<Scalar>> = (0..alg.dim(deg))
            .map(|b| {
                let (pi, s) = alg.split(deg, b);
                let dap = d[deg - 1].column(pi);
                let mut v = alg.mul(deg, &dap, 1, &unit_vec(alg.dim(1), s));
                let second = alg.mul(deg - 1, &unit_vec(dprev, pi), 2, &d[1].column(s));
                let sign = if (deg - 1) % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                add_scaled(&mut v, &sign, &second);
                v
            })
            .collect();
        d.push(Matrix::from_columns(alg.dim(deg + 1), &cols));
    }
    Ok(CurvedDGAlgebra { dual, algebra: alg, d, curvature })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaWitness {
    pub axiom: String,
    pub degrees: (usize, usize),
    pub basis: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaReport {
    pub leibniz: bool,
    pub d_squared_is_commutator: bool,
    pub dc_zero: bool,
    pub c_central: bool,
    pub d_squared_zero: bool,
    pub witness: Option<CdgaWitness>,
}

impl CdgaReport {
    pub fn pass(&self) -> bool {
        self.leibniz && self.d_squared_is_commutator && self.dc_zero
    }

    /// `c` graded central exactly when `d^2 = 0`.
    pub fn central_iff_square_zero(&self) -> bool {
        self.c_central == self.d_squared_zero
    }

    pub fn summary(&self) -> String {
        match &self.witness {
            None => "all axioms hold".into(),
            Some(w) => format!("{} fails at degrees {:?}, basis {:?}", w.axiom, w.degrees, w.basis),
        }
    }
}

pub fn verify_cdga(l: &CurvedDGAlgebra) -> CdgaReport {
    let a = &l.algebra;
    let n = a.max_degree();
    let mut witness: Option<CdgaWitness> = None;
    let mut note = |axiom: &str, degrees, basis| {
        if witness.is_none() {
            witness = Some(CdgaWitness { axiom: axiom.into(), degrees, basis });
        }
    };
    let mut leibniz = true;
    for m in 0..=n {
        for k in 0..=n - m {
            if m + k + 1 > n {
                continue;
            }
            for x in 0..a.dim(m) {
                let ux = unit_vec(a.dim(m), x);
                for y in 0..a.dim(k) {
                    let uy = unit_vec(a.dim(k), y);
                    let lhs = l.apply_d(m + k, &a.mul(m, &ux, k, &uy));
                    let mut rhs = a.mul(m + 1, &l.apply_d(m, &ux), k, &uy);
                    let sign = if m % 2 == 0 { Scalar::one() } else { -Scalar::one() };
                    add_scaled(&mut rhs, &sign, &a.mul(m, &ux, k + 1, &l.apply_d(k, &uy)));
                    if lhs != rhs {
                        leibniz = false;
                        note("Leibniz rule", (m, k), (x, y));
                    }
                }
            }
        }
    }
    let mut comm = true;
    let mut central = true;
    let mut sq_zero = true;
    for m in 0..=n.saturating_sub(2) {
        if m + 2 > n {
            break;
        }
        let d2 = l.d[m + 1].mul(&l.d[m]);
        let bracket = l.curvature_left(m).sub(&l.curvature_right(m));
        if !bracket.is_zero() {
            central = false;
        }
        if !d2.is_zero() {
            sq_zero = false;
        }
        if d2 != bracket {
            comm = false;
            let col = (0..d2.cols()).find(|&c| d2.column(c) != bracket.column(c)).unwrap_or(0);
            note("d^2 = [c, -]", (m, m + 2), (col, col));
        }
    }
    let dc_zero = if n >= 3 { is_zero_vec(&l.apply_d(2, &l.curvature)) } else { true };
    if !dc_zero {
        note("d(c) = 0", (2, 3), (0, 0));
    }
    CdgaReport { leibniz, d_squared_is_commutator: comm, dc_zero, c_central: central, d_squared_zero: sq_zero, witness }
}

/// `F_N U = F_N T_k(E) / sum_{i+j+2 <= N} T_i R T_j`. Coordinates of
/// `F_N T` list `T_N` first and `T_0` last, so reduced bases have their
/// pivots in top degree and `F_n U` is spanned by the surviving words of
/// degree at most `n`.
#[derive(Clone, Debug)]
pub struct FilteredAlgebra {
    max_degree: usize,
    tensor: TruncatedGradedAlgebra,
    gens: Bimodule,
    offsets: Vec<usize>,
    total: usize,
    quotient: Quotient,
    /// Degree of each basis element of `F_N U`.
    degrees: Vec<usize>,
    module: Bimodule,
}

pub fn truncate_filtered(p: &NonhomogeneousPresentation, n: usize) -> Result<FilteredAlgebra, NonhomogeneousError> {
    FilteredAlgebra::build(p, n)
}

impl FilteredAlgebra {
    fn build(p: &NonhomogeneousPresentation, n: usize) -> Result<Self, NonhomogeneousError> {
        let tp = QuadraticPresentation::tensor_algebra(p.generators().clone())?;
        let tensor = truncate_algebra(&tp, n)?;
        let mut offsets = vec![0; n + 1];
        let mut off = 0;
        for d in (0..=n).rev() {
            offsets[d] = off;
            off += tensor.dim(d);
        }
        let total = off;
        let quad = p.quadratic();
        let mut gens_vecs = Vec::new();
        if n >= 2 {
            for (r, q) in quad.relations().basis().iter().enumerate() {
                let alpha = p.alpha.column(r);
                let beta = p.beta.column(r);
                for i in 0..=n - 2 {
                    for j in 0..=n - 2 - i {
                        for u in 0..tensor.dim(i) {
                            let uu = unit_vec(tensor.dim(i), u);
                            let left2 = tensor.mul(i, &uu, 2, q);
                            let left1 = tensor.mul(i, &uu, 1, &alpha);
                            let left0 = tensor.mul(i, &uu, 0, &beta);
                            for v in 0..tensor.dim(j) {
                                let uv = unit_vec(tensor.dim(j), v);
                                let mut x = zero_vec(total);
                                place(&mut x, offsets[i + j + 2], &tensor.mul(i + 2, &left2, j, &uv));
                                place(&mut x, offsets[i + j + 1], &tensor.mul(i + 1, &left1, j, &uv));
                                place(&mut x, offsets[i + j], &tensor.mul(i, &left0, j, &uv));
                                if !is_zero_vec(&x) {
                                    gens_vecs.push(x);
                                }
                            }
                        }
                    }
                }
            }
        }
        let ideal = Subspace::span(total, gens_vecs);
        let quotient = quotient_full(&ideal);
        let degree_of = |col: usize| (0..=n).find(|&d| col >= offsets[d] && col < offsets[d] + tensor.dim(d)).unwrap();
        let degrees: Vec<usize> = (0..quotient.dim())
            .map(|b| degree_of(quotient.lift_basis(b).iter().position(|x| !x.is_zero()).unwrap()))
            .collect();
        let mut fa = FilteredAlgebra {
            max_degree: n,
            tensor,
            gens: p.generators().clone(),
            offsets,
            total,
            quotient,
            degrees,
            module: Bimodule::zero(p.base()),
        };
        let base = p.base().clone();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for a in 0..base.dim() {
            let ua = unit_vec(base.dim(), a);
            let (mut lc, mut rc) = (Vec::new(), Vec::new());
            for b in 0..fa.dim() {
                let ub = unit_vec(fa.dim(), b);
                lc.push(fa.mul_base_left(&ua, &ub));
                rc.push(fa.mul_base_right(&ub, &ua));
            }
            left.push(Matrix::from_columns(fa.dim(), &lc));
            right.push(Matrix::from_columns(fa.dim(), &rc));
        }
        fa.module = Bimodule::new(base, fa.dim(), left, right)?;
        Ok(fa)
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    /// `dim F_n U` for `n = 0..=N`.
    pub fn dims(&self) -> Vec<usize> {
        (0..=self.max_degree).map(|n| self.filtration_dim(n)).collect()
    }

    pub fn filtration_dim(&self, n: usize) -> usize {
        self.degrees.iter().filter(|&&d| d <= n).count()
    }

    /// Degree of basis element `b` (the length of its normal word).
    pub fn basis_degree(&self, b: usize) -> usize {
        self.degrees[b]
    }

    /// Basis indices spanning `F_n U`.
    pub fn filtration_basis(&self, n: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&b| self.degrees[b] <= n).collect()
    }

    /// The bimodule `F_N U` over `k`.
    pub fn module(&self) -> &Bimodule {
        &self.module
    }

    pub fn tensor(&self) -> &TruncatedGradedAlgebra {
        &self.tensor
    }

    /// Filtration degree of an element (0 for the zero element).
    pub fn filtration_degree(&self, x: &[Scalar]) -> usize {
        x.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(b, _)| self.degrees[b]).max().unwrap_or(0)
    }

    /// Degree components of the canonical lift of `x` to `F_N T`.
    pub fn lift(&self, x: &[Scalar]) -> Vec<Vec<Scalar>> {
        let raw = self.quotient.lift(x);
        (0..=self.max_degree)
            .map(|d| raw[self.offsets[d]..self.offsets[d] + self.tensor.dim(d)].to_vec())
            .collect()
    }

    /// Class of an element of `T_d`.
    pub fn project_component(&self, d: usize, v: &[Scalar]) -> Vec<Scalar> {
        let mut raw = zero_vec(self.total);
        place(&mut raw, self.offsets[d], v);
        self.quotient.project(&raw)
    }

    pub fn project_parts(&self, parts: &[Vec<Scalar>]) -> Vec<Scalar> {
        let mut raw = zero_vec(self.total);
        for (d, v) in parts.iter().enumerate() {
            place(&mut raw, self.offsets[d], v);
        }
        self.quotient.project(&raw)
    }

    /// Class of a word in the generators.
    pub fn word(&self, w: &[usize]) -> Vec<Scalar> {
        self.project_component(w.len(), &self.tensor.word_coords(w))
    }

    pub fn unit(&self) -> Vec<Scalar> {
        self.project_component(0, self.tensor.base().unit())
    }

    /// Product, defined when the filtration degrees add up to at most `N`.
    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Option<Vec<Scalar>> {
        let (dx, dy) = (self.filtration_degree(x), self.filtration_degree(y));
        if dx + dy > self.max_degree {
            return None;
        }
        let lx = self.lift(x);
        let ly = self.lift(y);
        let mut parts: Vec<Vec<Scalar>> = (0..=self.max_degree).map(|d| zero_vec(self.tensor.dim(d))).collect();
        for i in 0..=dx {
            if is_zero_vec(&lx[i]) {
                continue;
            }
            for j in 0..=dy {
                if is_zero_vec(&ly[j]) {
                    continue;
                }
                let prod = self.tensor.mul(i, &lx[i], j, &ly[j]);
                add_scaled(&mut parts[i + j], &Scalar::one(), &prod);
            }
        }
        Some(self.project_parts(&parts))
    }

    fn mul_base_left(&self, a: &[Scalar], x: &[Scalar]) -> Vec<Scalar> {
        let lx = self.lift(x);
        let parts: Vec<Vec<Scalar>> =
            lx.iter().enumerate().map(|(d, v)| self.tensor.mul(0, a, d, v)).collect();
        self.project_parts(&parts)
    }

    fn mul_base_right(&self, x: &[Scalar], a: &[Scalar]) -> Vec<Scalar> {
        let lx = self.lift(x);
        let parts: Vec<Vec<Scalar>> =
            lx.iter().enumerate().map(|(d, v)| self.tensor.mul(d, v, 0, a)).collect();
        self.project_parts(&parts)
    }

    /// Left multiplication by generator `i`, `F_{N-1} U -> F_N U`, as a
    /// matrix on all of `F_N U` (columns of degree `N` are left zero).
    pub fn left_gen(&self, i: usize) -> Matrix {
        self.gen_matrix(i, true)
    }

    pub fn right_gen(&self, i: usize) -> Matrix {
        self.gen_matrix(i, false)
    }

    fn gen_matrix(&self, i: usize, left: bool) -> Matrix {
        let de = self.gens.dim();
        let g = self.project_component(1, &unit_vec(de, i));
        let cols: Vec<Vec<Scalar>> = (0..self.dim())
            .map(|b| {
                if self.degrees[b] >= self.max_degree {
                    return zero_vec(self.dim());
                }
                let ub = unit_vec(self.dim(), b);
                if left { self.mul(&g, &ub) } else { self.mul(&ub, &g) }.expect("degree within truncation")
            })
            .collect();
        Matrix::from_columns(self.dim(), &cols)
    }

    /// Generators of the quotient as vectors in `F_N T`, for inspection.
    pub fn relation_space(&self) -> &Subspace {
        self.quotient.kernel()
    }
}

fn place(target: &mut [Scalar], offset: usize, v: &[Scalar]) {
    for (i, x) in v.iter().enumerate() {
        if !x.is_zero() {
            target[offset + i] += x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::int;

    fn weyl2() -> NonhomogeneousPresentation {
        let base = BaseRing::field();
        let e = Bimodule::free_over_field(&base, 2);
        // x(x)y - y(x)x - 1
        let mut v = zero_vec(1 + 2 + 4);
        v[0] = int(-1);
        v[3 + 1] = int(1);
        v[3 + 2] = int(-1);
        NonhomogeneousPresentation::new(e, &[v]).unwrap()
    }

    fn lie(n: usize, bracket: &[(usize, usize, Vec<i64>)], beta: &[(usize, usize, i64)]) -> NonhomogeneousPresentation {
        let base = BaseRing::field();
        let e = Bimodule::free_over_field(&base, n);
        let mut vecs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut v = zero_vec(1 + n + n * n);
                v[1 + n + i * n + j] = int(1);
                v[1 + n + j * n + i] = int(-1);
                if let Some((_, _, b)) = bracket.iter().find(|(a, b, _)| *a == i && *b == j) {
                    for (t, c) in b.iter().enumerate() {
                        v[1 + t] = int(-c);
                    }
                }
                if let Some((_, _, b)) = beta.iter().find(|(a, b, _)| *a == i && *b == j) {
                    v[0] = int(-b);
                }
                vecs.push(v);
            }
        }
        NonhomogeneousPresentation::new(e, &vecs).unwrap()
    }

    #[test]
    fn weyl_alpha_beta() {
        let p = weyl2();
        assert!(p.alpha().is_zero());
        assert_eq!(p.quadratic().relations().dim(), 1);
        let q = p.quadratic().relations().basis()[0].clone();
        // Q basis is x(x)y - y(x)x, beta = -omega(x, y) = -1
        assert_eq!(q, vec![int(0), int(1), int(-1), int(0)]);
        assert_eq!(p.beta_of(&q), vec![int(-1)]);
    }

    #[test]
    fn meets_lower_filtration_rejected() {
        let base = BaseRing::field();
        let e = Bimodule::free_over_field(&base, 1);
        let v = vec![int(1), int(1), int(0)];
        assert!(matches!(NonhomogeneousPresentation::new(e, &[v]), Err(NonhomogeneousError::MeetsLowerFiltration(1))));
    }

    #[test]
    fn weyl_pbw_and_dual() {
        let p = weyl2();
        let r = pbw_check(&p).unwrap();
        assert!(r.pass() && r.pbw(), "{}", r.summary());
        let c = curved_dual(&p, 3).unwrap();
        assert_eq!(c.dims(), vec![1, 2, 1, 0]);
        assert!(c.differential_is_zero());
        assert_eq!(c.curvature, vec![int(-1)]);
        let v = verify_cdga(&c);
        assert!(v.pass() && v.c_central && v.d_squared_zero);
    }

    #[test]
    fn weyl_filtered_dims() {
        let f = truncate_filtered(&weyl2(), 3).unwrap();
        assert_eq!(f.dims(), vec![1, 3, 6, 10]);
        // y x = x y - 1
        let x = f.word(&[0]);
        let y = f.word(&[1]);
        let xy = f.mul(&x, &y).unwrap();
        let yx = f.mul(&y, &x).unwrap();
        let diff: Vec<Scalar> = xy.iter().zip(&yx).map(|(a, b)| a - b).collect();
        assert_eq!(diff, f.unit());
    }

    #[test]
    fn sl2_pbw_and_ce_differential() {
        // [e,f]=h, [h,e]=2e, [h,f]=-2f ; basis (e, f, h)
        let p = lie(3, &[(0, 1, vec![0, 0, 1]), (0, 2, vec![-2, 0, 0]), (1, 2, vec![0, 2, 0])], &[]);
        let r = pbw_check(&p).unwrap();
        assert!(r.pass(), "{}", r.summary());
        let c = curved_dual(&p, 4).unwrap();
        assert_eq!(c.dims(), vec![1, 3, 3, 1, 0]);
        assert!(!c.differential_is_zero());
        assert!(is_zero_vec(&c.curvature));
        assert!(verify_cdga(&c).d_squared_zero);
    }

    #[test]
    fn jacobi_failure_detected() {
        // [x,y]=z, [y,z]=x, [z,x]=x
        let p = lie(3, &[(0, 1, vec![0, 0, 1]), (1, 2, vec![1, 0, 0]), (0, 2, vec![-1, 0, 0])], &[]);
        let r = pbw_check(&p).unwrap();
        assert!(r.cond1);
        assert!(!r.cond2);
        assert_eq!(r.witness.as_ref().unwrap().condition, 2);
        assert!(curved_dual(&p, 3).is_err());
    }

    #[test]
    fn sridharan_curvature() {
        // [x,y] = y, beta(x,y) = 1
        let p = lie(2, &[(0, 1, vec![0, 1])], &[(0, 1, 1)]);
        let r = pbw_check(&p).unwrap();
        assert!(r.pass());
        let c = curved_dual(&p, 3).unwrap();
        assert!(!c.differential_is_zero());
        assert!(!is_zero_vec(&c.curvature));
        assert!(verify_cdga(&c).pass());
    }

    #[test]
    fn homogeneous_round_trip() {
        let base = BaseRing::field();
        let e = Bimodule::free_over_field(&base, 2);
        let q = QuadraticPresentation::generated_by(e, &[vec![int(0), int(1), int(-1), int(0)]]).unwrap();
        let p = NonhomogeneousPresentation::from_quadratic(&q).unwrap();
        assert!(p.is_homogeneous());
        let c = curved_dual(&p, 3).unwrap();
        assert!(c.differential_is_zero() && is_zero_vec(&c.curvature));
        let f = truncate_filtered(&p, 4).unwrap();
        assert_eq!(f.dims(), vec![1, 3, 6, 10, 15]);
    }

    #[test]
    fn rescaling_beta_rescales_curvature() {
        let p = weyl2();
        let p3 = p.with_scaled_beta(&int(3)).unwrap();
        let c = curved_dual(&p, 2).unwrap();
        let c3 = curved_dual(&p3, 2).unwrap();
        assert_eq!(c3.curvature, c.curvature.iter().map(|x| x * int(3)).collect::<Vec<_>>());
        assert_eq!(c3.d, c.d);
    }

    #[test]
    fn non_central_curvature_rejected() {
        use crate::gallery::{build_sra, standard_symplectic, GroupData, SraData};
        let p = build_sra(&SraData::new(GroupData::plane_swap(), standard_symplectic(2), int(1), int(0))).unwrap();
        let c = build_curved_dual(&p, 3).unwrap();
        assert!(verify_cdga(&c).pass());
        let rejected = (0..c.algebra.dim(2)).any(|b| {
            let mut bad = c.clone();
            bad.curvature = unit_vec(c.algebra.dim(2), b);
            !verify_cdga(&bad).pass()
        });
        assert!(rejected);
    }
}
