//! Seeded generators and test-side oracles shared by the integration tests.
#![allow(dead_code)]

use nhk_core::base_bimodules::{BaseRing, Bimodule};
use nhk_core::exact_linalg::{frac, int, zero_vec, Matrix, Scalar};
use nhk_core::gallery::{
    build_enveloping, build_graded_hecke, build_preprojective, build_sra, build_weyl, standard_symplectic, GroupData,
    LieData, QuiverData, SraData,
};
use nhk_core::nonhomogeneous::{CurvedDGAlgebra, NonhomogeneousPresentation};
use nhk_core::quadratic::{pair_words, QuadraticPresentation};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational with small numerator and denominator.
pub fn nonzero(r: &mut impl Rng) -> Scalar {
    let n = r.gen_range(1..=7) * if r.gen_bool(0.5) { 1 } else { -1 };
    frac(n, r.gen_range(1..=5))
}

pub fn rational(r: &mut impl Rng) -> Scalar {
    if r.gen_bool(0.2) {
        Scalar::zero()
    } else {
        nonzero(r)
    }
}

pub fn invertible(n: usize, r: &mut impl Rng) -> Matrix {
    loop {
        let entries: Vec<i64> = (0..n * n).map(|_| r.gen_range(-2..=2)).collect();
        let m = Matrix::from_i64(n, n, &entries);
        if m.rank() == n {
            return m;
        }
    }
}

/// `P^{-1} X P` on every action matrix.
pub fn conjugate(e: &Bimodule, p: &Matrix) -> Bimodule {
    let pinv = p.inverse().expect("invertible");
    let f = |m: &Matrix| pinv.mul(m).mul(p);
    Bimodule::new(e.base().clone(), e.dim(), e.left_mats().iter().map(f).collect(), e.right_mats().iter().map(f).collect())
        .expect("conjugate of a bimodule")
}

/// Random bimodule over one of `Q`, `Q x Q`, `Q[Z/2]`, `Q[Z/3]`, in a
/// random basis.
pub fn random_bimodule(seed: u64) -> Bimodule {
    let mut r = rng(seed);
    let e = match r.gen_range(0..4) {
        0 => Bimodule::free_over_field(&BaseRing::field(), r.gen_range(1..=3)),
        1 => {
            let base = BaseRing::product_of_fields(2);
            let pieces: Vec<(usize, usize)> = (0..r.gen_range(1..=3)).map(|_| (r.gen_range(0..2), r.gen_range(0..2))).collect();
            let n = pieces.len();
            let act = |side: usize, a: usize| {
                let mut m = Matrix::zeros(n, n);
                for (b, &(i, j)) in pieces.iter().enumerate() {
                    if [i, j][side] == a {
                        m.set(b, b, int(1));
                    }
                }
                m
            };
            Bimodule::new(base, n, (0..2).map(|a| act(0, a)).collect(), (0..2).map(|a| act(1, a)).collect()).unwrap()
        }
        2 => {
            let g = GroupData::z2(r.gen_range(1..=2));
            g.generators(&g.base_ring())
        }
        _ => {
            let g = GroupData::cyclic(3).unwrap();
            g.generators(&g.base_ring())
        }
    };
    let p = invertible(e.dim(), &mut r);
    conjugate(&e, &p)
}

/// Lie algebra in the basis `y_i = sum_k P_ki x_k`.
pub fn change_lie_basis(lie: &LieData, p: &Matrix) -> LieData {
    let n = lie.dim;
    let pinv = p.inverse().unwrap();
    let mut bracket = vec![vec![zero_vec(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut v = zero_vec(n);
            for k in 0..n {
                for l in 0..n {
                    let c = p.get(k, i) * p.get(l, j);
                    if c.is_zero() {
                        continue;
                    }
                    for (m, x) in lie.bracket[k][l].iter().enumerate() {
                        v[m] += &c * x;
                    }
                }
            }
            bracket[i][j] = pinv.mul_vec(&v);
        }
    }
    LieData::new(n, bracket).unwrap()
}

/// A seeded member of one of the PBW families with random rational
/// parameters, with a short label.
pub fn random_pbw_presentation(seed: u64) -> (String, NonhomogeneousPresentation) {
    let mut r = rng(seed);
    match r.gen_range(0..6) {
        0 => {
            let a = nonzero(&mut r);
            let om = standard_symplectic(1).scaled(&a);
            ("weyl".into(), build_weyl(&om).unwrap())
        }
        1 => {
            let d = SraData::new(GroupData::z2(2), standard_symplectic(1), rational(&mut r), rational(&mut r));
            ("sra-z2".into(), build_sra(&d).unwrap())
        }
        2 => {
            let d = SraData::new(GroupData::cyclic(3).unwrap(), standard_symplectic(1), rational(&mut r), rational(&mut r));
            ("sra-z3".into(), build_sra(&d).unwrap())
        }
        3 => {
            let l = rational(&mut r);
            let q = QuiverData::kronecker().with_lambda(vec![l.clone(), -l]).unwrap();
            ("preprojective-kronecker".into(), build_preprojective(&q).unwrap())
        }
        4 => {
            let b = rational(&mut r);
            let beta = Matrix::from_rows(2, 2, vec![vec![Scalar::zero(), b.clone()], vec![-b, Scalar::zero()]]);
            let lie = change_lie_basis(&LieData::nonabelian2(), &invertible(2, &mut r));
            ("sridharan".into(), build_enveloping(&lie, Some(&beta)).unwrap())
        }
        _ => {
            let lie = if r.gen_bool(0.5) { LieData::heisenberg() } else { LieData::sl2() };
            let lie = change_lie_basis(&lie, &invertible(3, &mut r));
            ("enveloping".into(), build_enveloping(&lie, None).unwrap())
        }
    }
}

/// Graded Hecke data with arbitrary forms: PBW holds only for some draws.
pub fn random_hecke(seed: u64) -> NonhomogeneousPresentation {
    let mut r = rng(seed);
    let g = GroupData::z2(2);
    let forms: Vec<Matrix> = (0..2)
        .map(|_| {
            let a = rational(&mut r);
            Matrix::from_rows(2, 2, vec![vec![rational(&mut r), a.clone()], vec![-a, rational(&mut r)]])
        })
        .collect();
    match build_graded_hecke(&g, &forms) {
        Ok(p) => p,
        Err(_) => build_graded_hecke(&g, &[Matrix::zeros(2, 2), Matrix::zeros(2, 2)]).unwrap(),
    }
}

/// Random quadratic algebra on `2..=3` generators over `Q` with `1..=3`
/// random relations.
pub fn random_quadratic(seed: u64) -> QuadraticPresentation {
    let mut r = rng(seed);
    let n = r.gen_range(2..=3);
    let e = Bimodule::free_over_field(&BaseRing::field(), n);
    let rels: Vec<Vec<Scalar>> = (0..r.gen_range(1..=3))
        .map(|_| (0..n * n).map(|_| if r.gen_bool(0.5) { Scalar::zero() } else { int(r.gen_range(-2..=2)) }).collect())
        .collect();
    QuadraticPresentation::generated_by(e, &rels).unwrap()
}

/// `<c, x_i (x) x_j - x_j (x) x_i>` for an element `c` of degree 2 of the
/// dual, expanded over its basis words.
pub fn pair_with_commutator(c: &CurvedDGAlgebra, v: &[Scalar], e: &Bimodule, i: usize, j: usize) -> Vec<Scalar> {
    let k = e.base().dim();
    let mut out = zero_vec(k);
    for (b, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let w = c.algebra.word(2, b);
        let a = pair_words(e, &c.dual.dual, w, &[i, j]);
        let bb = pair_words(e, &c.dual.dual, w, &[j, i]);
        for t in 0..k {
            out[t] += x * (&a[t] - &bb[t]);
        }
    }
    out
}

fn det(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return int(1);
    }
    let mut total = Scalar::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Scalar>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, x)| x.clone()).collect()).collect();
        let term = &m[0][c] * det(&minor);
        if c % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    if p == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for s in subsets(n, p - 1) {
        let from = s.last().map_or(0, |&l| l + 1);
        for x in from..n {
            let mut t = s.clone();
            t.push(x);
            out.push(t);
        }
    }
    out
}

/// Chevalley-Eilenberg differential `Lambda^p g^* -> Lambda^{p+1} g^*` with
/// trivial coefficients, `(d phi)(x_0..x_p) = sum_{a<b} (-1)^{a+b}
/// phi([x_a, x_b], x_0, .., x_p)`, in the bases of sorted index subsets.
pub fn ce_differential(lie: &LieData, p: usize) -> Matrix {
    let n = lie.dim;
    let src = subsets(n, p);
    let tgt = subsets(n, p + 1);
    let mut d = Matrix::zeros(tgt.len(), src.len());
    for (ci, s) in src.iter().enumerate() {
        // phi_s(v_1..v_p) = det of the rows of v restricted to s
        let phi = |vs: &[Vec<Scalar>]| -> Scalar {
            let m: Vec<Vec<Scalar>> = vs.iter().map(|v| s.iter().map(|&k| v[k].clone()).collect()).collect();
            det(&m)
        };
        for (ri, t) in tgt.iter().enumerate() {
            let xs: Vec<Vec<Scalar>> = t.iter().map(|&k| nhk_core::exact_linalg::unit_vec(n, k)).collect();
            let mut total = Scalar::zero();
            for a in 0..=p {
                for b in a + 1..=p {
                    let mut args = vec![lie.bracket[t[a]][t[b]].clone()];
                    args.extend(xs.iter().enumerate().filter(|&(k, _)| k != a && k != b).map(|(_, v)| v.clone()));
                    let val = phi(&args);
                    if (a + b) % 2 == 0 {
                        total += val;
                    } else {
                        total -= val;
                    }
                }
            }
            d.set(ri, ci, total);
        }
    }
    d
}

/// Brute-force `dim H^p(g, Q)` for `p = 0..=dim g`.
pub fn ce_cohomology(lie: &LieData) -> Vec<usize> {
    let n = lie.dim;
    let binom = |p: usize| subsets(n, p).len();
    let ranks: Vec<usize> = (0..=n).map(|p| if p < n { ce_differential(lie, p).rank() } else { 0 }).collect();
    (0..=n).map(|p| binom(p) - ranks[p] - if p > 0 { ranks[p - 1] } else { 0 }).collect()
}
