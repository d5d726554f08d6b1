use palfix::rounds::{
    closed_form_log, invert_log, invert_log_naive, partitions, simulate_abstract, Constraints,
    ExactSimulator, Horizon, HorizonSimulator, RingConstraint,
};
use proptest::prelude::*;

/// `{2, 2, 3, …, m, m+3, m+3}`: one group per ring, then a silent stretch.
fn chain(m: u16) -> Vec<u16> {
    let mut sig = vec![2, 2];
    sig.extend(3..=m);
    sig.extend([m + 3, m + 3]);
    sig
}

#[test]
fn horizon_matches_exact_on_chains() {
    let mut exact = ExactSimulator::new();
    let mut fast = HorizonSimulator::new();
    for m in 6..=9 {
        let sig = chain(m);
        assert_eq!(
            fast.simulate(&sig).unwrap(),
            exact.simulate(&sig).unwrap(),
            "{sig:?}"
        );
    }
}

#[test]
fn wider_horizon_changes_nothing() {
    let mut narrow = HorizonSimulator::new();
    let mut wide = HorizonSimulator::with_horizon(Horizon { margin: 5, gap: 3 });
    for total in 2..=24 {
        for sig in partitions(total, 2) {
            assert_eq!(
                narrow.simulate(&sig).unwrap(),
                wide.simulate(&sig).unwrap(),
                "{sig:?}"
            );
        }
    }
}

#[test]
fn inversion_finds_every_signature_with_the_log() {
    for total in 4..=16 {
        for sig in partitions(total, 2) {
            let log = simulate_abstract(&sig).unwrap();
            let rings = log
                .rings
                .iter()
                .map(|r| RingConstraint {
                    ring: r.ring,
                    gnomes: Some(r.groups.iter().map(|&g| g as usize).sum()),
                    group_count: Some(r.groups.len()),
                    ..Default::default()
                })
                .collect();
            let c = Constraints {
                total,
                silent_rings: None,
                answer_range: None,
                rings,
            };
            let fast = invert_log(&c).unwrap();
            assert!(fast.iter().any(|s| s.signature == sig), "{sig:?} missing");
            assert_eq!(fast, invert_log_naive(&c).unwrap(), "{sig:?}");
        }
    }
}

fn signature() -> impl Strategy<Value = Vec<u16>> {
    prop::collection::vec(2u16..12, 1..7).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horizon_matches_exact(sig in signature()) {
        let exact = ExactSimulator::new().simulate(&sig).unwrap();
        prop_assert_eq!(HorizonSimulator::new().simulate(&sig).unwrap(), exact.clone());
        prop_assert_eq!(closed_form_log(&sig).unwrap(), exact);
    }

    #[test]
    fn every_group_leaves_once(sig in signature()) {
        let log = simulate_abstract(&sig).unwrap();
        let mut left: Vec<u16> = log.rings.iter().flat_map(|r| r.groups.clone()).collect();
        left.sort_unstable();
        prop_assert_eq!(left, sig);
        prop_assert!(!log.rings.last().unwrap().groups.is_empty());
    }
}
