//! Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion fails. Tolerances are pinned below.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nhk_core::base_bimodules::{phi_double_dual, phi_tilde_double_dual, verify_zigzag, Bimodule};
use nhk_core::curved_modules::{g_functor, random_ucomplex, sym2_z2_palette, verify_counit, verify_s_vs_f, KoszulPair, UModule};
use nhk_core::exact_linalg::{frac, int, is_zero_vec, Matrix, Scalar, Subspace};
use nhk_core::gallery::{
    build_enveloping, build_preprojective_data, build_sra, build_weyl, preprojective_dual_relations, psi_tensor_in_square,
    quadratic_gallery, standard_symplectic, symmetric_algebra, GroupData, LieData, QuiverData, SraData,
};
use nhk_core::nonhomogeneous::{
    build_curved_dual, curved_dual, pbw_check, truncate_filtered, verify_cdga, NonhomogeneousPresentation,
};
use nhk_core::quadratic::{ext_algebra_check, koszulness_check, quadratic_dual, truncate_algebra};
use nhk_core::resolutions::{ext_modules, hochschild_pair};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::Rng;

use common::*;

const LIMIT_C1: Duration = Duration::from_secs(5);
const LIMIT_C2: Duration = Duration::from_secs(5);
const LIMIT_C4: Duration = Duration::from_secs(60);
const LIMIT_C6: Duration = Duration::from_secs(120);
const LIMIT_C7: Duration = Duration::from_secs(120);
const RANDOM_COMPLEXES: u64 = 20;
const COUNIT_J: usize = 3;
const MAX_COMPONENT_DIM: usize = 4;
const MAX_LENGTH: usize = 3;
const PROPERTY_CASES: u32 = 200;
const KOSZUL_N: usize = 6;
const A2_FAIL_BY: usize = 4;
const EXT_N: usize = 5;
const PBW_DIM_N: usize = 5;

type Outcome = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, start: Instant) -> Outcome {
    let t = start.elapsed();
    check(t < limit, || format!("runtime {t:?} exceeds {limit:?}"))
}

fn c1_preprojective_dual() -> Outcome {
    let start = Instant::now();
    let d = build_preprojective_data(&QuiverData::kronecker()).map_err(|e| e.to_string())?;
    let dual = quadratic_dual(d.presentation.quadratic()).map_err(|e| e.to_string())?;
    let dims = truncate_algebra(&dual.presentation, 4).map_err(|e| e.to_string())?.hilbert();
    check(dims == vec![2, 4, 2, 0, 0], || format!("dual dims {dims:?}"))?;
    let sq = dual.presentation.square();
    let rels: Vec<Vec<Scalar>> = preprojective_dual_relations(&d.quiver)
        .iter()
        .map(|(_, t)| psi_tensor_in_square(&d.quiver, &dual.dual, sq, t))
        .collect();
    let span = Subspace::span(sq.dim(), rels);
    let perp = dual.presentation.relations();
    check(span.dim() == perp.dim(), || format!("rank of the listed dual relations is {}, Q^perp has dim {}", span.dim(), perp.dim()))?;
    check(&span == perp, || "the listed dual relations do not span Q^perp".into())?;
    timed(LIMIT_C1, start)
}

/// The curvature must pair with `x (x) y - y (x) x` to `-kappa(x, y)`, and
/// that pairing must be injective on degree 2 so the class is pinned.
fn curvature_is_minus_kappa(p: &NonhomogeneousPresentation, x: usize, y: usize, kappa: &[Scalar]) -> Outcome {
    let c = curved_dual(p, 3).map_err(|e| e.to_string())?;
    check(c.differential_is_zero(), || "d is not zero".into())?;
    let e = p.generators();
    let got = pair_with_commutator(&c, &c.curvature, e, x, y);
    let want: Vec<Scalar> = kappa.iter().map(|v| -v.clone()).collect();
    check(got == want, || format!("curvature pairs to {got:?}, expected {want:?}"))?;
    let cols: Vec<Vec<Scalar>> = (0..c.algebra.dim(2))
        .map(|b| pair_with_commutator(&c, &nhk_core::exact_linalg::unit_vec(c.algebra.dim(2), b), e, x, y))
        .collect();
    let rank = Matrix::from_columns(e.base().dim(), &cols).rank();
    check(rank == c.algebra.dim(2), || format!("pairing has rank {rank} on a degree-2 part of dim {}", c.algebra.dim(2)))?;
    let r = verify_cdga(&c);
    check(r.pass(), || r.summary())
}

fn c2_sra() -> Outcome {
    let start = Instant::now();
    for (t, c) in [(frac(2, 3), frac(-5, 7)), (frac(-7, 4), frac(3, 11)), (int(1), int(1))] {
        let data = SraData::new(GroupData::z2(2), standard_symplectic(1), t.clone(), c.clone());
        let p = build_sra(&data).map_err(|e| e.to_string())?;
        let r = pbw_check(&p).map_err(|e| e.to_string())?;
        check(r.cond1 && r.cond2 && r.cond3 && r.pbw(), || format!("(t,c)=({t},{c}): {}", r.summary()))?;
        // x = v_0 (x) 1, y = v_1 (x) 1 with |G| = 2
        let kappa = data.kappa(&[int(1), int(0)], &[int(0), int(1)]);
        curvature_is_minus_kappa(&p, 0, 2, &kappa).map_err(|e| format!("(t,c)=({t},{c}): {e}"))?;
    }
    timed(LIMIT_C2, start)
}

fn c3_weyl_enveloping() -> Outcome {
    let w = build_weyl(&standard_symplectic(1)).map_err(|e| e.to_string())?;
    let c = curved_dual(&w, 3).map_err(|e| e.to_string())?;
    check(c.dims() == vec![1, 2, 1, 0], || format!("Weyl dual dims {:?}", c.dims()))?;
    curvature_is_minus_kappa(&w, 0, 1, &[int(1)])?;

    let lie = LieData::sl2();
    let u = build_enveloping(&lie, None).map_err(|e| e.to_string())?;
    let c = curved_dual(&u, 4).map_err(|e| e.to_string())?;
    check(is_zero_vec(&c.curvature), || "sl2 curvature is not zero".into())?;
    check(c.dims() == vec![1, 3, 3, 1, 0], || format!("sl2 dual dims {:?}", c.dims()))?;
    // d on degree 1 read through the pairing with x_i (x) x_j - x_j (x) x_i
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut got = Matrix::zeros(3, 3);
    for a in 0..3 {
        let da = c.d[1].column(a);
        for (row, &(i, j)) in pairs.iter().enumerate() {
            got.set(row, a, pair_with_commutator(&c, &da, u.generators(), i, j)[0].clone());
        }
    }
    let oracle = ce_differential(&lie, 1);
    check(got == oracle, || format!("d_1 {got:?} differs from the CE matrix {oracle:?}"))?;
    check(c.d[2].is_zero() && ce_differential(&lie, 2).is_zero(), || "d_2 differs from the CE matrix (zero)".into())?;
    Ok(())
}

fn c4_koszulness() -> Outcome {
    let start = Instant::now();
    let sym3 = symmetric_algebra(3).map_err(|e| e.to_string())?;
    let r = koszulness_check(&sym3, KOSZUL_N).map_err(|e| e.to_string())?;
    check(r.pass(), || format!("Sym(Q^3): {}", r.verdict()))?;
    let kr = build_preprojective_data(&QuiverData::kronecker()).map_err(|e| e.to_string())?;
    let r = koszulness_check(kr.presentation.quadratic(), KOSZUL_N).map_err(|e| e.to_string())?;
    check(r.pass(), || format!("Kronecker: {}", r.verdict()))?;
    let a2 = build_preprojective_data(&QuiverData::a_n(2)).map_err(|e| e.to_string())?;
    let r = koszulness_check(a2.presentation.quadratic(), A2_FAIL_BY).map_err(|e| e.to_string())?;
    check(!r.pass() && r.failure.is_some(), || format!("A2 preprojective: expected a failure by N = {A2_FAIL_BY}, got \"{}\"", r.verdict()))?;
    timed(LIMIT_C4, start)
}

fn c5_ext_dual() -> Outcome {
    for (name, q) in quadratic_gallery().map_err(|e| e.to_string())? {
        let r = ext_algebra_check(&q, EXT_N).map_err(|e| format!("{name}: {e}"))?;
        check(r.agree(), || format!("{name}: Ext dims {:?}, dual dims {:?}", r.ext_dims, r.dual_dims))?;
    }
    Ok(())
}

fn sym2_z2() -> Result<(NonhomogeneousPresentation, Vec<UModule>), String> {
    let p = build_sra(&SraData::new(GroupData::z2(2), standard_symplectic(1), int(0), int(0))).map_err(|e| e.to_string())?;
    let palette = sym2_z2_palette(&p).map_err(|e| e.to_string())?;
    Ok((p, palette))
}

fn c6_counit() -> Outcome {
    let start = Instant::now();
    let (p, palette) = sym2_z2()?;
    let pair = KoszulPair::new(&p).map_err(|e| e.to_string())?;
    for seed in 0..RANDOM_COMPLEXES {
        let m = random_ucomplex(&palette, &mut rng(seed), MAX_COMPONENT_DIM, MAX_LENGTH);
        let r = verify_counit(&pair, &m, COUNIT_J).map_err(|e| format!("seed {seed}: {e}"))?;
        check(r.matches() && r.stable(), || format!("seed {seed}: {r:?}"))?;
    }
    timed(LIMIT_C6, start)
}

fn c7_s_vs_f() -> Outcome {
    let start = Instant::now();
    let (p, palette) = sym2_z2()?;
    let pair = KoszulPair::new(&p).map_err(|e| e.to_string())?;
    for seed in 0..RANDOM_COMPLEXES {
        let m = random_ucomplex(&palette, &mut rng(seed), MAX_COMPONENT_DIM, MAX_LENGTH);
        let i = g_functor(&pair, &m).map_err(|e| format!("seed {seed}: {e}"))?;
        let r = verify_s_vs_f(&i, COUNIT_J).map_err(|e| format!("seed {seed}: {e}"))?;
        check(r.matches() && r.stable(), || format!("seed {seed}: {r:?}"))?;
    }
    timed(LIMIT_C7, start)
}

fn c8_lie_cohomology() -> Outcome {
    let lie = LieData::sl2();
    let p = build_enveloping(&lie, None).map_err(|e| e.to_string())?;
    let ne = p.generators().dim();
    let triv = UModule::new(&p, 1, vec![Matrix::identity(1)], vec![Matrix::zeros(1, 1); ne]).map_err(|e| e.to_string())?;
    let e = ext_modules(&p, &triv, &triv).map_err(|e| e.to_string())?;
    let oracle = ce_cohomology(&lie);
    check(oracle == vec![1, 0, 0, 1], || format!("CE oracle gave {oracle:?}"))?;
    check(e.dims == oracle, || format!("Ext {:?} vs CE {oracle:?}", e.dims))?;
    check(e.pass(), || format!("{e:?}"))
}

/// `HH^0`, `HH^1` of the Weyl algebra in the window `F_n`: the center, and
/// derivations `(D x, D y)` in `F_{n-1}` with `[D x, y] + [x, D y] = 0`
/// modulo `ad(F_n)`. `HH^2` follows from the Euler characteristic.
fn weyl_window_oracle(p: &NonhomogeneousPresentation, n: usize) -> Result<[usize; 3], String> {
    let fa = truncate_filtered(p, n + 1).map_err(|e| e.to_string())?;
    let ad = |g: usize| fa.left_gen(g).sub(&fa.right_gen(g));
    let (adx, ady) = (ad(0), ad(1));
    let restrict = |m: &Matrix, d: usize| {
        let cols: Vec<Vec<Scalar>> = fa.filtration_basis(d).iter().map(|&b| m.column(b)).collect();
        Matrix::from_columns(fa.dim(), &cols)
    };
    let center = Matrix::vstack(&[&restrict(&adx, n), &restrict(&ady, n)]).kernel().dim();
    // [a, y] + [x, b] = -ad_y(a) + ad_x(b)
    let der = Matrix::hstack(&[&restrict(&ady, n - 1).scaled(&int(-1)), &restrict(&adx, n - 1)]).kernel().dim();
    let inner = fa.filtration_dim(n) - center;
    let hh1 = der - inner;
    let dims = fa.dims();
    let euler = dims[n] as i64 - 2 * dims[n - 1] as i64 + dims[n - 2] as i64;
    let hh2 = euler - center as i64 + hh1 as i64;
    Ok([center, hh1, usize::try_from(hh2).map_err(|_| "negative HH^2".to_string())?])
}

fn c9_hochschild() -> Outcome {
    let p = build_weyl(&standard_symplectic(1)).map_err(|e| e.to_string())?;
    let pair = KoszulPair::new(&p).map_err(|e| e.to_string())?;
    let r = hochschild_pair(&pair, 4, 6).map_err(|e| e.to_string())?;
    let at4 = [r.at_cutoff.get(0), r.at_cutoff.get(1), r.at_cutoff.get(2)];
    let at6 = [r.at_next.get(0), r.at_next.get(1), r.at_next.get(2)];
    check(at4 == [1, 0, 0] && at6 == [1, 0, 0], || format!("window 4: {at4:?}, window 6: {at6:?}"))?;
    check(r.stable.iter().all(|&s| s), || format!("unstable: {:?}", r.stable))?;
    for n in [4, 6] {
        let o = weyl_window_oracle(&p, n)?;
        let got = if n == 4 { at4 } else { at6 };
        check(o == got, || format!("window {n}: oracle {o:?}, computed {got:?}"))?;
    }
    Ok(())
}

fn run_property(name: &str, test: impl Fn(u64) -> Result<(), TestCaseError>) -> Outcome {
    let mut runner = TestRunner::new(Config { cases: PROPERTY_CASES, failure_persistence: None, ..Config::default() });
    runner.run(&proptest::num::u64::ANY, test).map_err(|e| format!("{name}: {e}"))
}

fn prop(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn double_dual_is_iso(e: &Bimodule, phi: &Matrix, dd: &Bimodule) -> bool {
    phi.rank() == e.dim()
        && phi.rows() == dd.dim()
        && (0..e.base().dim()).all(|a| {
            phi.mul(e.left(a)) == dd.left(a).mul(phi) && phi.mul(e.right(a)) == dd.right(a).mul(phi)
        })
}

fn c10_properties() -> Outcome {
    run_property("zig-zag identities", |seed| {
        let e = random_bimodule(seed);
        let r = verify_zigzag(&e, seed);
        prop(r.pass(), || format!("{:?}", r.first_failure()))
    })?;
    run_property("double duality", |seed| {
        let e = random_bimodule(seed);
        let (phi, _, dd) = phi_double_dual(&e);
        let (psi, _, dd2) = phi_tilde_double_dual(&e);
        prop(double_dual_is_iso(&e, &phi, &dd.module), || "phi is not a bimodule isomorphism".into())?;
        prop(double_dual_is_iso(&e, &psi, &dd2.module), || "phi-tilde is not a bimodule isomorphism".into())
    })?;
    run_property("cdga axioms", |seed| {
        let (name, p) = random_pbw_presentation(seed);
        let c = build_curved_dual(&p, 4).map_err(|e| TestCaseError::fail(format!("{name}: {e}")))?;
        let r = verify_cdga(&c);
        prop(r.pass(), || format!("{name}: {}", r.summary()))
    })?;
    run_property("PBW dimension match", |seed| {
        let mut r = rng(seed);
        let p = if r.gen_bool(0.25) { random_hecke(seed) } else { random_pbw_presentation(seed).1 };
        let rep = pbw_check(&p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        if !rep.pbw() {
            return Ok(());
        }
        let n = PBW_DIM_N;
        let filtered = truncate_filtered(&p, n).map_err(|e| TestCaseError::fail(e.to_string()))?.dims();
        let graded = truncate_algebra(p.quadratic(), n).map_err(|e| TestCaseError::fail(e.to_string()))?.hilbert();
        let cumulative: Vec<usize> = graded.iter().scan(0, |s, d| {
            *s += d;
            Some(*s)
        }).collect();
        prop(filtered == cumulative, || format!("F_N dims {filtered:?}, partial sums {cumulative:?}"))
    })?;
    run_property("Euler characteristic on exact strands", |seed| {
        let q = random_quadratic(seed);
        let r = koszulness_check(&q, 4).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for s in &r.strands {
            if s.exact && s.internal_degree > 0 {
                prop(s.euler_characteristic == 0, || format!("strand {} exact with chi = {}", s.internal_degree, s.euler_characteristic))?;
            }
        }
        Ok(())
    })
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 preprojective dual (Kronecker)", c1_preprojective_dual),
        ("2 SRA PBW and curvature", c2_sra),
        ("3 Weyl and enveloping duals", c3_weyl_enveloping),
        ("4 Koszulness certification", c4_koszulness),
        ("5 Ext-dual agreement", c5_ext_dual),
        ("6 counit quasi-isomorphism", c6_counit),
        ("7 S-vs-F comparison", c7_s_vs_f),
        ("8 Lie cohomology oracle", c8_lie_cohomology),
        ("9 Hochschild window", c9_hochschild),
        ("10 structural property suites", c10_properties),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(()) => println!("criterion {name}: PASS ({:.2?})", start.elapsed()),
            Err(why) => {
                println!("criterion {name}: FAIL ({:.2?}) {why}", start.elapsed());
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
