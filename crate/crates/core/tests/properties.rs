//! Property tests for the structural invariants.

use once_cell::sync::Lazy;
use proptest::prelude::*;
use shiftsieve_core::hecke::EigenvalueTable;
use shiftsieve_core::primes::{self, FactorTable};
use shiftsieve_core::shiftsums::{smooth_split, EtaFunction};
use shiftsieve_core::sieveweights::{linear_sieve_weights, make_context};

static DELTA: Lazy<EigenvalueTable> = Lazy::new(|| EigenvalueTable::delta(20_000).unwrap());
static FACTORS: Lazy<FactorTable> = Lazy::new(|| FactorTable::new(20_000));

proptest! {
    #[test]
    fn smooth_split_is_a_bijection(n in 1u64..100_000, z in 2.0f64..200.0) {
        let s = smooth_split(n, z);
        prop_assert_eq!(s.smooth * s.rough, n);
        for p in primes::primes_up_to(z as u64) {
            prop_assert!(s.rough % p != 0);
        }
        // smooth part has no factor above z
        let biggest = primes::factorize(s.smooth)
            .last()
            .map_or(1, |&(p, _)| p);
        prop_assert!(biggest as f64 <= z.max(1.0));
    }

    #[test]
    fn eta_dominates_squarefree_square(b in 1u64..20_000) {
        static ETA: Lazy<EtaFunction<'static>> = Lazy::new(|| EtaFunction::new(&DELTA));
        let squarefree = FACTORS.factorize(b).iter().all(|&(_, e)| e == 1);
        let l = DELTA.lambda(b);
        let floor = if squarefree { l * l } else { 0.0 };
        prop_assert!(ETA.value(b) >= floor - 1e-12);
    }

    #[test]
    fn sieve_residual_nonnegative(
        n in 1u64..1_000_000,
        zi in 0usize..4,
        di in 0usize..4,
    ) {
        let z = [5.0, 7.0, 11.0, 13.0][zi];
        let d = [z, z * z, z * z * z, 1e6][di];
        let ctx = make_context(z, 1);
        let w = linear_sieve_weights(&ctx, d).unwrap();
        prop_assert!(w.upper_bound_residual(n) >= 0);
    }

    #[test]
    fn hecke_residual_small_on_random_pairs(m in 1u64..140, n in 1u64..140) {
        let r = DELTA.hecke_relation_residual(m, n).unwrap();
        prop_assert!(r.abs() <= 1e-9, "({}, {}): {}", m, n, r);
    }

    #[test]
    fn shifted_sum_nonnegative_and_monotone_in_x(
        shift in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3]),
        x in 10.0f64..10_000.0,
    ) {
        let s1 = shiftsieve_core::shiftsums::shifted_sum(&DELTA, shift, x).unwrap();
        let s2 = shiftsieve_core::shiftsums::shifted_sum(&DELTA, shift, x + 10.0).unwrap();
        prop_assert!(s1 >= 0.0);
        prop_assert!(s2 >= s1 - 1e-12);
    }
}
