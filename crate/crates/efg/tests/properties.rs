//! Property tests over randomly generated games and profiles.

use efg::format::{games_equal, parse_game, serialize_game};
use efg::game::{experience_sequence, subgame_decomposition, validate_perfect_recall};
use efg::generate::{Family, GenSpec, generate};
use efg::profile::BehaviorProfile;
use efg::reach::{infoset_reach, reach, reach_without_player};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = GenSpec> {
    let family = prop_oneof![Just(Family::A), Just(Family::B), Just(Family::C)];
    (family, 2usize..4, 2usize..4, any::<u64>()).prop_map(|(family, n, b, seed)| {
        let layers = if family == Family::C { 2 } else { 1 };
        GenSpec::new(family, n, vec![b; n], layers, seed)
    })
}

fn profile_strategy(actions: usize, infosets: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(
        proptest::collection::vec(0.01f64..1.0, actions),
        infosets,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_preserves_generated_games(spec in spec_strategy()) {
        let game = generate(&spec).unwrap();
        let text = serialize_game(&game);
        let back = parse_game(&text).unwrap();
        prop_assert!(games_equal(&game, &back));
    }

    #[test]
    fn generated_games_satisfy_recall_and_reach_laws(
        spec in spec_strategy(),
        raw in profile_strategy(3, 200),
    ) {
        let game = generate(&spec).unwrap();
        prop_assert!(validate_perfect_recall(&game).is_empty());

        // Members of every infoset share the owner's experience.
        for j in game.infoset_ids() {
            let is = game.infoset(j);
            let base = experience_sequence(&game, is.player, is.members[0]);
            for &m in &is.members[1..] {
                prop_assert_eq!(
                    &experience_sequence(&game, is.player, m).steps,
                    &base.steps
                );
            }
        }

        // Nearest-subgame-root lookup is idempotent.
        let sub = subgame_decomposition(&game);
        for v in game.node_ids() {
            let r = sub.node_to_root(v);
            prop_assert_eq!(sub.node_to_root(r), r);
        }

        // A random interior profile: terminal reach sums to one, kernels
        // dominate full reach, and infoset mass is positive.
        let mut profile = BehaviorProfile::uniform(&game);
        for (j, row) in game.infoset_ids().zip(raw.iter().cycle()) {
            let k = game.infoset(j).actions.len();
            let mut r: Vec<f64> = row.iter().copied().cycle().take(k).collect();
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|x| *x /= s);
            profile.set_row(j, r);
        }
        prop_assert!(profile.is_valid());
        let total: f64 = game.terminals().iter().map(|&z| reach(&game, &profile, z)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        for j in game.infoset_ids() {
            prop_assert!(infoset_reach(&game, &profile, j) > 0.0);
            let player = game.infoset(j).player;
            for &m in &game.infoset(j).members {
                let w = reach(&game, &profile, m);
                let s = reach_without_player(&game, &profile, player, m);
                prop_assert!(w <= s + 1e-12);
                prop_assert!(s <= 1.0 + 1e-12);
            }
        }
    }
}
