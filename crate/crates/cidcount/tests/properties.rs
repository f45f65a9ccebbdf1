//! Randomized invariants tying the counting routines to each other and to
//! independent enumeration, so a bug in any one of them breaks agreement.

use cidcount::hypergraph::{factorial, generate_random};
use cidcount::{Hypergraph, PartedTuple, VertexSet};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Instance {
    d: usize,
    n: u32,
    h: Hypergraph,
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=4, 6u32..=20, any::<u64>()).prop_flat_map(|(d, n, seed)| {
        let max = cidcount::hypergraph::binomial(n as u128, d as u32).min(60) as u64;
        (0..=max).prop_map(move |m| Instance {
            d,
            n,
            h: generate_random(n, d, m, seed).expect("m bounded by the universe"),
        })
    })
}

/// Each vertex gets an owner among the d sets or none, yielding disjoint sets.
fn disjoint_sets(d: usize, n: u32) -> impl Strategy<Value = Vec<VertexSet>> {
    proptest::collection::vec(0..=(d as u32), n as usize).prop_map(move |owners| {
        (0..d as u32)
            .map(|i| {
                let members: Vec<u32> = owners
                    .iter()
                    .enumerate()
                    .filter(|(_, &o)| o == i)
                    .map(|(v, _)| v as u32)
                    .collect();
                VertexSet::from_members(n, &members).expect("members in range")
            })
            .collect()
    })
}

fn arbitrary_sets(d: usize, n: u32) -> impl Strategy<Value = Vec<VertexSet>> {
    proptest::collection::vec(
        proptest::collection::vec(proptest::bool::ANY, n as usize),
        d,
    )
    .prop_map(move |rows| {
        rows.into_iter()
            .map(|row| {
                let members: Vec<u32> = row
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(v, _)| v as u32)
                    .collect();
                VertexSet::from_members(n, &members).expect("members in range")
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_universe_ordered_count_is_factorial_m(inst in instance()) {
        let u = vec![VertexSet::full(inst.n); inst.d];
        prop_assert_eq!(
            inst.h.count_ordered(&u).unwrap(),
            factorial(inst.d as u64) * inst.h.m()
        );
    }

    #[test]
    fn disjoint_ordered_equals_colorful(inst in instance()) {
        let sets = disjoint_sets(inst.d, inst.n);
        proptest!(|(sets in sets)| {
            let colorful = inst.h.count_colorful(&sets).unwrap();
            // disjointness forces a unique slot assignment per colorful edge
            prop_assert_eq!(inst.h.count_ordered(&sets).unwrap(), colorful);
            prop_assert!(colorful <= inst.h.count_meeting(&sets).unwrap());
        });
    }

    #[test]
    fn ordered_existence_matches_count(inst in instance()) {
        let sets = arbitrary_sets(inst.d, inst.n);
        proptest!(|(sets in sets)| {
            prop_assert_eq!(
                inst.h.exists_ordered(&sets).unwrap(),
                inst.h.count_ordered(&sets).unwrap() > 0
            );
            prop_assert_eq!(
                inst.h.exists_meeting(&sets).unwrap(),
                inst.h.count_meeting(&sets).unwrap() > 0
            );
        });
    }

    #[test]
    fn parted_count_times_orderings_is_ordered_count(inst in instance()) {
        let sets = disjoint_sets(inst.d, inst.n);
        proptest!(|(sets in sets, merge in proptest::bool::ANY)| {
            // either one set per slot, or the first set carrying multiplicity 2
            let tuple = if merge && inst.d >= 2 {
                let mut parts: Vec<(VertexSet, u32)> =
                    sets.iter().skip(2).cloned().map(|s| (s, 1)).collect();
                parts.insert(0, (sets[0].clone(), 2));
                PartedTuple::new(parts).unwrap()
            } else {
                PartedTuple::from_disjoint_slots(sets.clone()).unwrap()
            };
            let slots: Vec<VertexSet> = tuple.slots().into_iter().cloned().collect();
            prop_assert_eq!(
                inst.h.count_ordered(&slots).unwrap(),
                inst.h.count_parted(&tuple).unwrap() * tuple.ordering_factor()
            );
            prop_assert_eq!(
                inst.h.exists_parted(&tuple).unwrap(),
                inst.h.count_parted(&tuple).unwrap() > 0
            );
        });
    }

    #[test]
    fn text_format_round_trips(inst in instance()) {
        let mut buf = Vec::new();
        inst.h.to_writer(&mut buf).unwrap();
        let back = Hypergraph::from_reader(&buf[..]).unwrap();
        prop_assert_eq!(inst.h, back);
    }

    #[test]
    fn bucket_sizes_bound_the_ordered_count(inst in instance()) {
        let profile = inst.h.bucket_profile(&[]).unwrap();
        let low: u64 = profile.levels[0].iter().map(|(q, s)| s << q).sum();
        let high: u64 = profile.levels[0].iter().map(|(q, s)| s << (q + 1)).sum();
        let m_o = inst.h.m_ordered();
        prop_assert!(low <= m_o);
        prop_assert!(m_o < high || m_o == 0);
    }
}
