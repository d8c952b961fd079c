use kfull::arith::{canonical_repr, KFullRepr};
use kfull::empirical::{empirical_table, empirical_table_chunked, members_b};
use kfull::lambda::first_lambdas;
use kfull::{Dd, DensityMethod, Engine, EngineConfig, Real, SubsetSpec};
use proptest::prelude::*;
use std::sync::OnceLock;

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(2, EngineConfig::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_are_conserved_and_chunking_is_invisible(n in 1u64..3_000, k in 2u32..=4, chunks in 1usize..16) {
        let one = empirical_table(k, n).unwrap();
        prop_assert_eq!(one.total(), n);
        prop_assert_eq!(empirical_table_chunked(k, n, chunks).unwrap(), one);
    }

    #[test]
    fn member_lists_are_prefix_stable(n in 1u64..2_000, extra in 0u64..2_000) {
        let empty = SubsetSpec::empty(2);
        let short = members_b(2, &empty, &empty, n).unwrap();
        let long = members_b(2, &empty, &empty, n + extra).unwrap();
        prop_assert_eq!(&long[..short.len()], &short[..]);
        prop_assert!(long[short.len()..].iter().all(|&x| x > n));
    }

    #[test]
    fn canonical_repr_round_trips(a in 1u64..40, b1 in 1u64..30, k in 2u32..=3, b2 in 1u64..6) {
        let b = if k == 2 { vec![b1] } else { vec![b1, b2] };
        prop_assume!(KFullRepr::new(k, 1, b.clone()).is_ok());
        let r = KFullRepr::new(k, a, b).unwrap();
        let v = r.value().unwrap();
        prop_assume!(v < 1 << 62);
        prop_assert_eq!(canonical_repr(v as u64, k).unwrap(), r);
    }

    #[test]
    fn subset_density_depends_only_on_the_union(mask in 0u32..(1 << 8), split in 0u32..(1 << 8)) {
        let els = first_lambdas(2, 8).unwrap();
        let (mut i, mut j) = (Vec::new(), Vec::new());
        for (t, e) in els.iter().enumerate() {
            if mask >> t & 1 == 1 {
                if split >> t & 1 == 1 { i.push(e.clone()) } else { j.push(e.clone()) }
            }
        }
        let all: Vec<_> = i.iter().chain(&j).cloned().collect();
        let (i, j, all) = (SubsetSpec::new(2, i).unwrap(), SubsetSpec::new(2, j).unwrap(), SubsetSpec::new(2, all).unwrap());
        let e = engine();
        let d = e.density_b(&i, &j).unwrap();
        prop_assert_eq!(d, e.density_b(&j, &i).unwrap());
        prop_assert!(d.overlaps(&e.density_b(&all, &SubsetSpec::empty(2)).unwrap()));
        prop_assert!(d.lower() > Dd::lit(0.0) && d.upper() <= e.c_k().upper() * Dd::lit(7.0));
    }

    #[test]
    fn cells_are_probabilities(l in 0usize..=5, m in 0usize..=5) {
        let d = engine().density_a(l, m, DensityMethod::Inversion).unwrap();
        prop_assert!(d.lower().to_f64_lossy() > 0.0 && d.upper().to_f64_lossy() < 1.0);
        prop_assert_eq!(d, engine().density_a(m, l, DensityMethod::Inversion).unwrap());
    }
}
