mod common;

use std::sync::{Arc, OnceLock};

use nhk_core::curved_modules::{
    adjunction_h0, f_truncated, g_functor, random_ucomplex, s_functor, sym2_z2_palette, KoszulPair, UModule,
};
use nhk_core::exact_linalg::int;
use nhk_core::gallery::{build_sra, standard_symplectic, GroupData, SraData};
use nhk_core::nonhomogeneous::{pbw_check, truncate_filtered};
use proptest::prelude::*;

use common::*;

fn sym2_z2() -> &'static (Arc<KoszulPair>, Vec<UModule>) {
    static CELL: OnceLock<(Arc<KoszulPair>, Vec<UModule>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = build_sra(&SraData::new(GroupData::z2(2), standard_symplectic(1), int(0), int(0))).unwrap();
        let palette = sym2_z2_palette(&p).unwrap();
        (KoszulPair::new(&p).unwrap(), palette)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn s_of_g_recovers_cohomology(seed in any::<u64>()) {
        let (pair, palette) = sym2_z2();
        let m = random_ucomplex(palette, &mut rng(seed), 4, 3);
        let g = g_functor(pair, &m).unwrap();
        let s = s_functor(&g).unwrap().cohomology().unwrap();
        let h = m.cohomology().unwrap();
        prop_assert!(s.same_as(&h), "S(G(M)) {:?} vs H(M) {:?}", s, h);
    }

    #[test]
    fn adjunction_h0_agrees(a in any::<u64>(), b in any::<u64>()) {
        let (pair, palette) = sym2_z2();
        let m1 = random_ucomplex(palette, &mut rng(a), 3, 2);
        let m2 = random_ucomplex(palette, &mut rng(b), 3, 2);
        let n = g_functor(pair, &m1).unwrap();
        let (left, right) = adjunction_h0(pair, &n, &m2).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn f_truncations_grow_and_stabilise(seed in any::<u64>()) {
        let (pair, palette) = sym2_z2();
        let m = random_ucomplex(palette, &mut rng(seed), 3, 2);
        let g = g_functor(pair, &m).unwrap();
        let f3 = f_truncated(&g, 3).unwrap();
        let f4 = f_truncated(&g, 4).unwrap();
        for p in g.degrees() {
            prop_assert!(f3.dim_at(p) <= f4.dim_at(p));
        }
        let (h3, h4) = (f3.cohomology().unwrap(), f4.cohomology().unwrap());
        prop_assert!(h3.same_as(&h4));
        prop_assert!(h3.same_as(&m.cohomology().unwrap()));
    }

    #[test]
    fn filtered_dims_are_monotone(seed in any::<u64>()) {
        let p = random_hecke(seed);
        let dims = truncate_filtered(&p, 3).unwrap().dims();
        prop_assert!(dims.windows(2).all(|w| w[0] <= w[1]), "{:?}", dims);
        if pbw_check(&p).unwrap().pbw() {
            // Sym(Q^2) x| Z/2 has 2(n+1) elements in degree n
            prop_assert_eq!(dims, vec![2, 6, 12, 20]);
        }
    }
}
