use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use permdiv::action::{burnside_average, enumerate_orbits, orbit_of_tuple, pattern, TupleSpace};
use permdiv::catalog::{alternating, cyclic, dihedral, mathieu11, mathieu12, mathieu24, symmetric};
use permdiv::combinat::{falling_factorial, stirling2};
use permdiv::divisions::{division_sequence, rhs_division_sum, verify_identity, Budgets};
use permdiv::group::{build_chain, close_group, iterate_elements, pointwise_stabilizer};
use permdiv::{GeneratedGroup, Permutation};

fn catalog() -> Vec<GeneratedGroup> {
    let mut groups = Vec::new();
    for n in 3..=8 {
        groups.push(symmetric(n).unwrap());
        groups.push(alternating(n).unwrap());
        groups.push(cyclic(n).unwrap());
        groups.push(dihedral(n).unwrap());
    }
    groups.push(mathieu11());
    groups.push(mathieu12());
    groups
}

#[test]
fn closure_chain_and_stream_agree() {
    for g in catalog() {
        let chain = build_chain(&g, &[]).unwrap();
        let closure: HashSet<Permutation> = close_group(&g, 1_000_000).unwrap().into_iter().collect();
        let streamed: Vec<Permutation> = iterate_elements(&chain).collect();
        assert_eq!(BigUint::from(closure.len()), *chain.order(), "{}", g.label());
        assert_eq!(streamed.len(), closure.len(), "{}", g.label());
        assert_eq!(streamed.into_iter().collect::<HashSet<_>>(), closure, "{}", g.label());
        assert!((falling_factorial(g.degree(), g.degree()) % chain.order()).is_zero());
    }
}

#[test]
fn orbit_stabilizer_consistency() {
    for g in [mathieu12(), alternating(7).unwrap(), dihedral(8).unwrap(), mathieu24()] {
        let chain = build_chain(&g, &[]).unwrap();
        for points in [vec![0], vec![2, 0], vec![1, 5, 3], vec![0, 1, 2, 3, 4, 6]] {
            let stab = pointwise_stabilizer(&chain, &points).unwrap();
            for s in stab.generators() {
                assert!(points.iter().all(|&x| s.apply(x) == x));
            }
            let stab_order = build_chain(&stab, &[]).unwrap().order().clone();
            let orbit = orbit_of_tuple(&g, &points, 100_000).unwrap();
            assert_eq!(&stab_order * &orbit.length, *chain.order(), "{} {points:?}", g.label());
        }
    }
}

#[test]
fn m24_point_stabilizers() {
    let chain = build_chain(&mathieu24(), &[]).unwrap();
    let stab = pointwise_stabilizer(&chain, &[0, 1, 2, 3, 4]).unwrap();
    assert_eq!(build_chain(&stab, &[]).unwrap().order(), &BigUint::from(48u32));
}

#[test]
fn division_tables_are_consistent() {
    let mut groups = catalog();
    groups.push(mathieu24());
    for g in groups {
        let n = g.degree();
        let table = division_sequence(&g, n).unwrap();
        assert!(!table.truncated);
        for e in &table.entries {
            assert_eq!(e.total_length(), falling_factorial(n, e.j), "{} j={}", g.label(), e.j);
            for l in e.lengths.keys() {
                assert!((&table.order % l).is_zero());
            }
            assert!(e.d >= BigUint::one());
        }
        if table.is_transitive() {
            let t = table.transitivity_degree();
            for e in &table.entries {
                assert_eq!(e.d.is_one(), e.j <= t, "{} j={}", g.label(), e.j);
            }
        }
    }
}

#[test]
fn cross_engine_agreement_on_catalog() {
    for g in catalog() {
        let order = build_chain(&g, &[]).unwrap().order().to_u64().unwrap();
        if order > 100_000 {
            continue;
        }
        for k in 1..=8 {
            if TupleSpace::new(g.degree(), k).size_u64().unwrap() > 1_000_000 {
                break;
            }
            let r = verify_identity(&g, k, Budgets::default()).unwrap();
            assert!(r.lhs_burnside.is_some() && r.mid_orbits.is_some());
            assert!(r.matched, "{} k={k}: {r:?}", g.label());
        }
    }
}

#[test]
fn division_sum_is_independent_of_k_recomputation() {
    // one table serves every k
    let g = dihedral(7).unwrap();
    let table = division_sequence(&g, 7).unwrap();
    for k in 1..=7 {
        let orbits = enumerate_orbits(&g, k, 1_000_000).unwrap();
        assert_eq!(rhs_division_sum(&table, k).unwrap(), orbits.total_orbits);
        for (&j, p) in &orbits.per_pattern {
            assert_eq!(
                BigUint::from(p.count),
                table.d(j).unwrap() * stirling2(k, j).unwrap()
            );
        }
    }
}

fn arb_group() -> impl Strategy<Value = GeneratedGroup> {
    (2usize..=6).prop_flat_map(|n| {
        let perm = move || Just((0..n).collect::<Vec<usize>>()).prop_shuffle();
        prop::collection::vec(perm(), 1..=3).prop_map(move |gens| {
            let gens = gens.into_iter().map(|v| Permutation::from_images(v).unwrap()).collect();
            GeneratedGroup::new("random", n, gens).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orbit_partition_invariants(g in arb_group(), k in 1usize..=4) {
        let order = build_chain(&g, &[]).unwrap().order().to_u64().unwrap();
        let summary = enumerate_orbits(&g, k, 1_000_000).unwrap();
        prop_assert_eq!(summary.covered(), TupleSpace::new(g.degree(), k).size());
        for p in summary.per_pattern.values() {
            prop_assert_eq!(p.count as usize, p.lengths.len());
            for &l in &p.lengths {
                prop_assert_eq!(order % l, 0);
            }
        }
        prop_assert_eq!(&summary.total_orbits, &burnside_average(&g, k).unwrap());
        let table = division_sequence(&g, g.degree()).unwrap();
        prop_assert_eq!(&summary.total_orbits, &rhs_division_sum(&table, k).unwrap());
    }

    #[test]
    fn pattern_is_constant_on_orbits(g in arb_group(), r in 0u64..1296) {
        let space = TupleSpace::new(g.degree(), 4);
        let x = space.unrank(r % space.size_u64().unwrap());
        for s in g.generators() {
            prop_assert_eq!(pattern(&s.apply_tuple(&x).unwrap()), pattern(&x));
        }
        let orbit = orbit_of_tuple(&g, &x, u64::MAX).unwrap();
        prop_assert!(orbit.closure_checked);
        prop_assert!(orbit.representative <= x);
    }
}
