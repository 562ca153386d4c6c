//! Free resolutions from the counit, Ext between finite-dimensional
//! modules, Ext algebras of rigid modules and windowed Hochschild
//! cohomology.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::base_bimodules::{balanced_relations, intertwiner_space, unflatten};
use crate::curved_modules::{
    f_truncation, g_functor_with_evaluation, hom_f_complex, CohomologyTable, Complex, ComplexError, CurvedError, KoszulPair,
    UComplex, UModule,
};
use crate::exact_linalg::{quotient_full, unit_vec, zero_vec, Matrix, Quotient, Scalar, Subspace};
use crate::nonhomogeneous::{pbw_check, truncate_filtered, FilteredAlgebra, NonhomogeneousError, NonhomogeneousPresentation};
use crate::quadratic::{left_quadratic_dual, truncate_algebra, QuadraticError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error(transparent)]
    Curved(#[from] CurvedError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Nonhomogeneous(#[from] NonhomogeneousError),
    #[error(transparent)]
    Quadratic(#[from] QuadraticError),
    #[error("PBW check failed: {0}")]
    Pbw(String),
    #[error("module is not rigid: generator {0} acts nontrivially")]
    NotRigid(usize),
}

fn pair_for(p: &NonhomogeneousPresentation) -> Result<Arc<KoszulPair>, ResolutionError> {
    let r = pbw_check(p)?;
    if !r.pass() {
        return Err(ResolutionError::Pbw(r.summary()));
    }
    Ok(KoszulPair::new(p)?)
}

/// Action on `m` of each basis element of `F_N U`.
pub fn filtered_action(fa: &FilteredAlgebra, m: &UModule) -> Vec<Matrix> {
    let t = fa.tensor();
    (0..fa.dim())
        .map(|b| {
            let mut op = Matrix::zeros(m.dim, m.dim);
            for (d, part) in fa.lift(&unit_vec(fa.dim(), b)).iter().enumerate() {
                for (w, c) in part.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let x = if d == 0 { m.base[w].clone() } else { m.word_op(t.word(d, w)) };
                    op.add_assign_scaled(c, &x);
                }
            }
            op
        })
        .collect()
}

/// `F_j G(M) -> M`: terms `U (x)_k G(M)^{-i}` filtered at the cutoff.
#[derive(Clone, Debug)]
pub struct ResolutionData {
    pub cutoff: usize,
    /// `dim_Q G(M)^{-i}`: generators of the `i`-th free term.
    pub ranks: Vec<usize>,
    /// `dim Lambda^i`: ranks of the bimodule resolution of `U`.
    pub bimodule_ranks: Vec<usize>,
    /// Cohomological degrees `-top..=0`.
    pub complex: Complex,
    /// Degree 0 term to `M`.
    pub augmentation: Matrix,
    pub augmentation_kills_image: bool,
    pub augmentation_surjective: bool,
    pub cohomology: CohomologyTable,
}

impl ResolutionData {
    /// Exact at every degree of the window and `H^0 = M`.
    pub fn exact(&self, module_dim: usize) -> bool {
        let mut expect = BTreeMap::new();
        if module_dim > 0 {
            expect.insert(0, module_dim);
        }
        self.cohomology.nonzero() == expect && self.augmentation_kills_image && self.augmentation_surjective
    }

    pub fn pass(&self) -> bool {
        self.exact(self.augmentation.rows())
    }
}

pub fn free_resolution(p: &NonhomogeneousPresentation, m: &UModule, cutoff: usize) -> Result<ResolutionData, ResolutionError> {
    let pair = pair_for(p)?;
    resolution_with(&pair, m, cutoff)
}

pub fn resolution_with(pair: &Arc<KoszulPair>, m: &UModule, cutoff: usize) -> Result<ResolutionData, ResolutionError> {
    m.validate(&pair.presentation)?;
    let mc = UComplex::single(m.clone(), 0);
    let (g, eval) = g_functor_with_evaluation(pair, &mc)?;
    let ft = f_truncation(&g, cutoff)?;
    let idx0 = (-g.start) as usize;
    let dg0 = g.dim_at(0);
    let act = filtered_action(&ft.algebra, m);
    let (q0, s0) = (&ft.quotients[idx0], &ft.subspaces[idx0]);
    let cols: Vec<Vec<Scalar>> = s0
        .basis()
        .iter()
        .map(|x| {
            let raw = q0.lift(x);
            let mut out = zero_vec(m.dim);
            for (b, op) in act.iter().enumerate() {
                for t in 0..dg0 {
                    let c = &raw[b * dg0 + t];
                    if !c.is_zero() {
                        let v = op.mul_vec(&eval[idx0].column(t));
                        for (o, y) in out.iter_mut().zip(v) {
                            *o += c * y;
                        }
                    }
                }
            }
            out
        })
        .collect();
    let augmentation = Matrix::from_columns(m.dim, &cols);
    let into0 = ft.complex.map_at(-1);
    let augmentation_kills_image = augmentation.mul(&into0).is_zero();
    let augmentation_surjective = augmentation.rank() == m.dim;
    let ranks = (0..=pair.top).map(|i| g.dim_at(-(i as i64))).collect();
    let bimodule_ranks = (0..=pair.top).map(|i| pair.lambda_dim(i)).collect();
    Ok(ResolutionData {
        cutoff,
        ranks,
        bimodule_ranks,
        cohomology: ft.complex.cohomology()?,
        complex: ft.complex,
        augmentation,
        augmentation_kills_image,
        augmentation_surjective,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtTable {
    /// `dim Ext^i` for `i = 0..=top`.
    pub dims: Vec<usize>,
    /// Same numbers from the materialized resolution.
    pub resolution_side: Vec<usize>,
    /// `dim Hom_U(M, N)` by intertwiner linear algebra.
    pub hom_dim: usize,
}

impl ExtTable {
    pub fn paths_agree(&self) -> bool {
        self.dims == self.resolution_side
    }

    pub fn ext0_matches(&self) -> bool {
        self.dims.first().copied().unwrap_or(0) == self.hom_dim
    }

    pub fn pass(&self) -> bool {
        self.paths_agree() && self.ext0_matches()
    }
}

pub fn ext_modules(p: &NonhomogeneousPresentation, m: &UModule, n: &UModule) -> Result<ExtTable, ResolutionError> {
    let pair = pair_for(p)?;
    ext_with(&pair, m, n)
}

pub fn ext_with(pair: &Arc<KoszulPair>, m: &UModule, n: &UModule) -> Result<ExtTable, ResolutionError> {
    m.validate(&pair.presentation)?;
    n.validate(&pair.presentation)?;
    let (g, _) = g_functor_with_evaluation(pair, &UComplex::single(m.clone(), 0))?;
    let hom = hom_f_complex(pair, &g, &UComplex::single(n.clone(), 0))?.cohomology()?;
    let dims = (0..=pair.top).map(|i| hom.get(i as i64)).collect();
    let resolution_side = ext_resolution_side(pair, &g, n)?;
    Ok(ExtTable { dims, resolution_side, hom_dim: m.hom_space(n).dim() })
}

/// `Hom_U(U (x)_k G^{-t}, N) = Hom_k(G^{-t}, N)` with the differential
/// read off from `d_F(1 (x) g)` in `F_1 U (x) G` and the action on `N`.
fn ext_resolution_side(
    pair: &Arc<KoszulPair>,
    g: &crate::curved_modules::CurvedModule,
    n: &UModule,
) -> Result<Vec<usize>, ResolutionError> {
    let fa = truncate_filtered(&pair.presentation, 1)?;
    let du = fa.dim();
    let act = filtered_action(&fa, n);
    let unit = fa.unit();
    let nk = pair.k_dim();
    let top = pair.top as i64;
    let spaces: Vec<Subspace> = (0..=top + 1)
        .map(|t| {
            let dg = g.dim_at(-t);
            let pairs: Vec<(Matrix, Matrix)> = (0..nk).map(|a| (g.base_at(-t, a), n.base[a].clone())).collect();
            if dg == 0 {
                Subspace::zero(0)
            } else {
                intertwiner_space(dg, n.dim, &pairs)
            }
        })
        .collect();
    let mut maps = Vec::new();
    for t in 0..=top {
        let p = -t - 1;
        let (dsrc, dtgt) = (g.dim_at(-t), g.dim_at(p));
        let mut raw = Matrix::identity(du).kron(&g.d_at(p));
        for (gi, s, c) in &pair.coev {
            raw.add_assign_scaled(c, &fa.right_gen(*gi).kron(&g.gen_at(p, *s)));
        }
        let sign = if t % 2 == 0 { -Scalar::one() } else { Scalar::one() };
        let target = &spaces[(t + 1) as usize];
        let cols: Vec<Vec<Scalar>> = spaces[t as usize]
            .basis()
            .iter()
            .map(|hv| {
                let h = unflatten(hv, n.dim, dsrc);
                let mut dh = Matrix::zeros(n.dim, dtgt);
                for x in 0..dtgt {
                    let mut e = zero_vec(dtgt);
                    e[x] = Scalar::one();
                    let img = raw.mul_vec(&crate::exact_linalg::kron_vec(&unit, &e));
                    let mut col = zero_vec(n.dim);
                    for (b, op) in act.iter().enumerate() {
                        for y in 0..dsrc {
                            let c = &img[b * dsrc + y];
                            if !c.is_zero() {
                                let v = op.mul_vec(&h.column(y));
                                for (o, z) in col.iter_mut().zip(v) {
                                    *o += c * z;
                                }
                            }
                        }
                    }
                    dh.set_column(x, &col.iter().map(|z| &sign * z).collect::<Vec<_>>());
                }
                target
                    .coordinates(&crate::base_bimodules::flatten(&dh))
                    .ok_or_else(|| CurvedError::Axiom("transported differential is not k-linear".into()))
            })
            .collect::<Result<_, _>>()?;
        maps.push(Matrix::from_columns(target.dim(), &cols));
    }
    let c = Complex::checked(0, spaces.iter().map(|s| s.dim()).collect(), maps)?;
    let h = c.cohomology()?;
    Ok((0..=pair.top).map(|i| h.get(i as i64)).collect())
}

/// Products `phi_1 phi_2` of basis elements, as coordinates in degree `i + j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBlock {
    pub i: usize,
    pub j: usize,
    /// `table[a][b]` is the product of basis `a` of degree `i` and `b` of degree `j`.
    pub table: Vec<Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidExt {
    /// `dim Hom_k(lambda, ^!A_i (x)_k lambda)`.
    pub hom_dims: Vec<usize>,
    /// The transported differential on the Hom complex is zero.
    pub differential_vanishes: bool,
    /// Ext dimensions; from the Hom spaces when the differential vanishes,
    /// otherwise from `ext_modules`.
    pub dims: Vec<usize>,
    /// Set when the differential does not vanish and the fallback is used.
    pub discrepancy: bool,
    pub product: Vec<ProductBlock>,
}

impl RigidExt {
    pub fn pass(&self) -> bool {
        !self.discrepancy
    }
}

pub fn rigid_ext(p: &NonhomogeneousPresentation, lambda: &UModule) -> Result<RigidExt, ResolutionError> {
    let pair = pair_for(p)?;
    rigid_ext_with(&pair, lambda)
}

pub fn rigid_ext_with(pair: &Arc<KoszulPair>, lambda: &UModule) -> Result<RigidExt, ResolutionError> {
    lambda.validate(&pair.presentation)?;
    if let Some(i) = lambda.gens.iter().position(|m| !m.is_zero()) {
        return Err(ResolutionError::NotRigid(i));
    }
    let top = pair.top;
    let (g, _) = g_functor_with_evaluation(pair, &UComplex::single(lambda.clone(), 0))?;
    let hom = hom_f_complex(pair, &g, &UComplex::single(lambda.clone(), 0))?;
    let differential_vanishes = hom.maps.iter().all(|m| m.is_zero());
    let qd = left_quadratic_dual(pair.presentation.quadratic())?;
    let b = truncate_algebra(&qd.presentation, 2 * top)?;
    let nk = pair.k_dim();
    let ld = lambda.dim;
    let tensors: Vec<Quotient> = (0..=2 * top)
        .map(|i| {
            let right: Vec<Matrix> = (0..nk).map(|a| b.component(i).right(a).clone()).collect();
            quotient_full(&balanced_relations(&right, &lambda.base, b.dim(i), ld))
        })
        .collect();
    let homs: Vec<Subspace> = (0..=2 * top)
        .map(|i| {
            let q = &tensors[i];
            let pairs: Vec<(Matrix, Matrix)> = (0..nk)
                .map(|a| {
                    let left = q.project_columns(&b.component(i).left(a).kron(&Matrix::identity(ld)).mul(&q.section()));
                    (lambda.base[a].clone(), left)
                })
                .collect();
            if ld == 0 || q.dim() == 0 {
                Subspace::zero(0)
            } else {
                intertwiner_space(ld, q.dim(), &pairs)
            }
        })
        .collect();
    let hom_dims: Vec<usize> = homs.iter().take(top + 1).map(|h| h.dim()).collect();
    let mut product = Vec::new();
    for i in 0..=top {
        for j in 0..=top {
            if i + j > top || homs[i].dim() == 0 || homs[j].dim() == 0 {
                continue;
            }
            let table = (0..homs[i].dim())
                .map(|x| {
                    let phi1 = unflatten(&homs[i].basis()[x], tensors[i].dim(), ld);
                    (0..homs[j].dim())
                        .map(|y| {
                            let phi2 = unflatten(&homs[j].basis()[y], tensors[j].dim(), ld);
                            let out = rigid_product(&b, &tensors, i, j, &phi1, &phi2, ld);
                            homs[i + j].coordinates(&crate::base_bimodules::flatten(&out)).expect("product is k-linear")
                        })
                        .collect()
                })
                .collect();
            product.push(ProductBlock { i, j, table });
        }
    }
    let (dims, discrepancy) = if differential_vanishes {
        (hom_dims.clone(), false)
    } else {
        (ext_with(pair, lambda, lambda)?.dims, true)
    };
    Ok(RigidExt { hom_dims, differential_vanishes, dims, discrepancy, product })
}

/// `(m (x) id) (id (x) phi_1) phi_2`.
fn rigid_product(
    b: &crate::quadratic::TruncatedGradedAlgebra,
    tensors: &[Quotient],
    i: usize,
    j: usize,
    phi1: &Matrix,
    phi2: &Matrix,
    ld: usize,
) -> Matrix {
    let (di, dj) = (b.dim(i), b.dim(j));
    let target = &tensors[i + j];
    let cols: Vec<Vec<Scalar>> = (0..ld)
        .map(|m| {
            let raw2 = tensors[j].lift(&phi2.column(m));
            let mut acc = zero_vec(b.dim(i + j) * ld);
            for x in 0..dj {
                for m1 in 0..ld {
                    let c = &raw2[x * ld + m1];
                    if c.is_zero() {
                        continue;
                    }
                    let raw1 = tensors[i].lift(&phi1.column(m1));
                    for y in 0..di {
                        for m2 in 0..ld {
                            let c1 = &raw1[y * ld + m2];
                            if c1.is_zero() {
                                continue;
                            }
                            let prod = b.mul(j, &unit_vec(dj, x), i, &unit_vec(di, y));
                            for (z, pz) in prod.iter().enumerate() {
                                if !pz.is_zero() {
                                    acc[z * ld + m2] += c * c1 * pz;
                                }
                            }
                        }
                    }
                }
            }
            target.project(&acc)
        })
        .collect();
    Matrix::from_columns(target.dim(), &cols)
}

/// Cohomology of `(Lambda (x)_k F U)^k` in two windows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildReport {
    pub cutoff: usize,
    pub at_cutoff: CohomologyTable,
    pub at_next: CohomologyTable,
    /// `stable[i]`: degree `i` agrees between the two windows.
    pub stable: Vec<bool>,
}

impl HochschildReport {
    pub fn dim(&self, i: usize) -> usize {
        self.at_cutoff.get(i as i64)
    }
}

pub fn hochschild_truncated(p: &NonhomogeneousPresentation, cutoff: usize) -> Result<HochschildReport, ResolutionError> {
    let pair = pair_for(p)?;
    hochschild_pair(&pair, cutoff, cutoff + 1)
}

pub fn hochschild_pair(pair: &Arc<KoszulPair>, cutoff: usize, next: usize) -> Result<HochschildReport, ResolutionError> {
    let at_cutoff = hochschild_window(pair, cutoff)?.cohomology()?;
    let at_next = hochschild_window(pair, next)?.cohomology()?;
    let stable = (0..=pair.top).map(|i| at_cutoff.get(i as i64) == at_next.get(i as i64)).collect();
    Ok(HochschildReport { cutoff, at_cutoff, at_next, stable })
}

/// Largest subcomplex of `k`-invariants of `Lambda^i (x)_k F_{N-i} U` for
/// `D = d_Lambda (x) 1 + [xi, -]`, `xi = sum f_s (x) e_i`.
pub fn hochschild_window(pair: &Arc<KoszulPair>, n: usize) -> Result<Complex, ResolutionError> {
    let top = pair.top;
    let fa = truncate_filtered(&pair.presentation, n + 1)?;
    let du = fa.dim();
    let nk = pair.k_dim();
    let lam = &pair.lambda.algebra;
    let lgen: Vec<Matrix> = (0..pair.e_dim()).map(|i| fa.left_gen(i)).collect();
    let rgen: Vec<Matrix> = (0..pair.e_dim()).map(|i| fa.right_gen(i)).collect();
    let mut quots = Vec::new();
    let mut spaces = Vec::new();
    for i in 0..=top {
        let dl = lam.dim(i);
        let right: Vec<Matrix> = (0..nk).map(|a| lam.component(i).right(a).clone()).collect();
        let left_u: Vec<Matrix> = (0..nk).map(|a| fa.module().left(a).clone()).collect();
        let q = quotient_full(&balanced_relations(&right, &left_u, dl, du));
        let window: Vec<Vec<Scalar>> = if n >= i {
            let mut v = Vec::new();
            for b in 0..dl {
                for u in fa.filtration_basis(n - i) {
                    let mut raw = zero_vec(dl * du);
                    raw[b * du + u] = Scalar::one();
                    v.push(q.project(&raw));
                }
            }
            v
        } else {
            Vec::new()
        };
        let window = Subspace::span(q.dim(), window);
        let defects: Vec<Matrix> = (0..nk)
            .map(|a| {
                let l = lam.component(i).left(a).kron(&Matrix::identity(du));
                let r = Matrix::identity(dl).kron(fa.module().right(a));
                q.project_columns(&l.sub(&r).mul(&q.section()))
            })
            .collect();
        let refs: Vec<&Matrix> = defects.iter().collect();
        let inv = if refs.is_empty() || q.dim() == 0 { Subspace::full(q.dim()) } else { Matrix::vstack(&refs).kernel() };
        spaces.push(window.intersect(&inv).map_err(|e| CurvedError::Axiom(e.to_string()))?);
        quots.push(q);
    }
    let mut raws = Vec::new();
    for i in 0..top {
        let mut raw = pair.d_lambda(i).kron(&Matrix::identity(du)).scaled(&-Scalar::one());
        let sign = if i % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        for (g, s, c) in &pair.coev {
            let fs = unit_vec(pair.lambda_dim(1), *s);
            raw.add_assign_scaled(c, &pair.left_gen(*s, i).kron(&lgen[*g]));
            raw.add_assign_scaled(&-(c * &sign), &pair.right_mul(&fs, 1, i).kron(&rgen[*g]));
        }
        for v in quots[i].kernel().basis() {
            if !crate::exact_linalg::is_zero_vec(&quots[i + 1].project(&raw.mul_vec(v))) {
                return Err(CurvedError::Axiom(format!("Hochschild differential is not balanced in degree {i}")).into());
            }
        }
        raws.push(quots[i + 1].project_columns(&raw.mul(&quots[i].section())));
    }
    for i in (0..top).rev() {
        let d = &raws[i];
        let basis = spaces[i].basis_columns();
        if basis.cols() == 0 {
            continue;
        }
        let next = &spaces[i + 1];
        // coordinates x with D(basis x) in the next space
        let img = d.mul(&basis);
        let cut: Vec<Vec<Scalar>> = img.columns().iter().map(|c| next.reduce(c)).collect();
        let keep = Matrix::from_columns(quots[i + 1].dim(), &cut).kernel();
        let vecs: Vec<Vec<Scalar>> = keep.basis().iter().map(|x| basis.mul_vec(x)).collect();
        spaces[i] = Subspace::span(quots[i].dim(), vecs);
    }
    let mut maps = Vec::new();
    for i in 0..top {
        let cols: Vec<Vec<Scalar>> = spaces[i]
            .basis()
            .iter()
            .map(|v| spaces[i + 1].coordinates(&raws[i].mul_vec(v)).expect("largest subcomplex"))
            .collect();
        maps.push(Matrix::from_columns(spaces[i + 1].dim(), &cols));
    }
    Ok(Complex::checked(0, spaces.iter().map(|s| s.dim()).collect(), maps)?)
}
