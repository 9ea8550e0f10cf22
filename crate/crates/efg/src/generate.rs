//! Seeded random game families for benchmarking.
//!
//! All three families share one information rule: whoever moves observes the
//! entire history except the immediately preceding action (family B instead
//! observes only that action). Family A plays one round of players 1..n;
//! family C repeats that round over several layers; family B is the chain
//! where each player sees only their predecessor's move. Payoffs are sparse
//! integers: a per-game zero probability is drawn once, then each terminal
//! coordinate is zeroed with that probability or drawn uniformly from the
//! payoff range.
//!
//! Randomness comes from ChaCha12 keyed by the seed: stream 0 drives
//! game-level draws (the payoff sparsity), stream 1 the payoff values, so
//! fixtures reproduce across platforms.

use std::collections::HashMap;

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::format::{ActionDoc, GameDoc, InfosetDoc, NodeDoc, game_from_doc};
use crate::game::Game;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    /// Actions per player; each player uses the same count at all infosets.
    pub branching: Vec<usize>,
    /// Rounds of play; meaningful for family C, 1 otherwise.
    #[serde(default = "default_layers")]
    pub layers: usize,
    pub seed: u64,
    #[serde(default = "default_payoff_range")]
    pub payoff_range: (i64, i64),
    #[serde(default = "default_zero_prob_max")]
    pub zero_prob_max: f64,
}

fn default_layers() -> usize {
    1
}
fn default_payoff_range() -> (i64, i64) {
    (-10, 10)
}
fn default_zero_prob_max() -> f64 {
    0.5
}

impl GenSpec {
    pub fn new(family: Family, n: usize, branching: Vec<usize>, layers: usize, seed: u64) -> Self {
        GenSpec {
            family,
            n,
            branching,
            layers,
            seed,
            payoff_range: default_payoff_range(),
            zero_prob_max: default_zero_prob_max(),
        }
    }

    fn validate(&self) -> Result<(), GameError> {
        if self.n < 2 {
            return Err(GameError::Syntax("generator requires at least 2 players".into()));
        }
        if self.branching.len() != self.n {
            return Err(GameError::Syntax(format!(
                "branching needs {} entries, got {}",
                self.n,
                self.branching.len()
            )));
        }
        if self.branching.iter().any(|&b| b < 2) {
            return Err(GameError::Syntax("branching must be at least 2 per player".into()));
        }
        if self.layers < 1 {
            return Err(GameError::Syntax("layers must be at least 1".into()));
        }
        if self.family != Family::C && self.layers != 1 {
            return Err(GameError::Syntax("layers apply to family C only".into()));
        }
        Ok(())
    }

    /// Closed-form infoset counts per player implied by the family wiring.
    pub fn infoset_counts(&self) -> Vec<usize> {
        match self.family {
            Family::B => {
                let mut m = vec![1usize];
                for i in 2..=self.n {
                    m.push(self.branching[i - 2]);
                }
                m
            }
            Family::A | Family::C => {
                // Move order is (player 1, layer 1), ..., (player n, layer 1),
                // (player 1, layer 2), ...; the mover sees every earlier
                // action except the immediately preceding one.
                let mut m = vec![0usize; self.n];
                for layer in 1..=self.layers {
                    for p in 1..=self.n {
                        let prior: Vec<usize> = (0..(layer - 1) * self.n + (p - 1))
                            .map(|idx| self.branching[idx % self.n])
                            .collect();
                        let visible: u128 = prior
                            .iter()
                            .take(prior.len().saturating_sub(1))
                            .map(|&b| b as u128)
                            .product();
                        m[p - 1] += visible as usize;
                    }
                }
                m
            }
        }
    }
}

/// Generates the game for a spec; deterministic under the seed.
pub fn generate(spec: &GenSpec) -> Result<Game, GameError> {
    spec.validate()?;
    let mut rng_game = ChaCha12Rng::seed_from_u64(spec.seed);
    rng_game.set_stream(0);
    let mut rng_payoff = ChaCha12Rng::seed_from_u64(spec.seed);
    rng_payoff.set_stream(1);
    let zero_prob = rng_game.gen_range(0.0..=spec.zero_prob_max);

    let total_moves = match spec.family {
        Family::A | Family::B => spec.n,
        Family::C => spec.n * spec.layers,
    };
    let mover = |depth: usize| depth % spec.n + 1;

    let mut doc = GameDoc {
        num_players: spec.n,
        root: "n0".into(),
        nodes: Default::default(),
        infosets: Default::default(),
    };
    // Infoset key -> id, per player: (player, observed action string).
    let mut infoset_of: HashMap<(usize, String), String> = HashMap::new();
    let mut infoset_members: HashMap<String, Vec<String>> = HashMap::new();
    let mut counter = 0usize;

    // Breadth-first construction; histories tracked as action index lists.
    let mut frontier: Vec<(String, Vec<usize>)> = vec![("n0".into(), Vec::new())];
    while let Some((id, hist)) = frontier.pop() {
        let depth = hist.len();
        if depth == total_moves {
            let payoffs = (0..spec.n)
                .map(|_| {
                    if rng_payoff.gen_bool(zero_prob) {
                        0.0
                    } else {
                        rng_payoff.gen_range(spec.payoff_range.0..=spec.payoff_range.1) as f64
                    }
                })
                .collect();
            doc.nodes.insert(
                id,
                NodeDoc {
                    kind: "terminal".into(),
                    owner: None,
                    infoset: None,
                    actions: None,
                    payoffs: Some(payoffs),
                },
            );
            continue;
        }
        let player = mover(depth);
        let observed = match spec.family {
            // Everything but the immediately preceding action.
            Family::A | Family::C => hist
                .iter()
                .take(hist.len().saturating_sub(1))
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join("."),
            // Only the immediately preceding action.
            Family::B => hist.last().map(|k| k.to_string()).unwrap_or_default(),
        };
        let key = (player, observed);
        let iid = infoset_of
            .entry(key)
            .or_insert_with(|| {
                let name = format!("p{player}.{counter:05}");
                counter += 1;
                name
            })
            .clone();
        infoset_members.entry(iid.clone()).or_default().push(id.clone());

        let b = spec.branching[player - 1];
        let mut actions = Vec::with_capacity(b);
        // Children pushed in reverse so the stack pops them in order; node
        // ids follow the path for readable fixtures.
        let mut children = Vec::with_capacity(b);
        for k in 0..b {
            let child_id = format!("{id}.{k}");
            actions.push(ActionDoc { label: format!("a{k}"), child: child_id.clone(), prob: None });
            let mut h = hist.clone();
            h.push(k);
            children.push((child_id, h));
        }
        for c in children.into_iter().rev() {
            frontier.push(c);
        }
        doc.nodes.insert(
            id,
            NodeDoc {
                kind: "decision".into(),
                owner: Some(player),
                infoset: Some(iid),
                actions: Some(actions),
                payoffs: None,
            },
        );
    }

    for (iid, members) in infoset_members {
        let player: usize = iid[1..].split('.').next().unwrap().parse().unwrap();
        let b = spec.branching[player - 1];
        doc.infosets.insert(
            iid,
            InfosetDoc {
                player,
                members,
                actions: (0..b).map(|k| format!("a{k}")).collect(),
            },
        );
    }

    let game = game_from_doc(&doc)?;
    let expected = spec.infoset_counts();
    let got: Vec<usize> = (1..=spec.n).map(|p| game.player_infosets(p).len()).collect();
    if got != expected {
        return Err(GameError::Syntax(format!(
            "family structure cannot realize the infoset counts: expected {expected:?}, built {got:?}"
        )));
    }
    Ok(game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{games_equal, parse_game, serialize_game};
    use crate::game::validate_perfect_recall;

    #[test]
    fn family_a_counts() {
        let spec = GenSpec::new(Family::A, 3, vec![2, 3, 3], 1, 1);
        assert_eq!(spec.infoset_counts(), vec![1, 1, 2]);
        let g = generate(&spec).unwrap();
        // Player 3 has two infosets of three members each; 18 terminals.
        assert_eq!(g.player_infosets(3).len(), 2);
        for &j in g.player_infosets(3) {
            assert_eq!(g.infoset(j).members.len(), 3);
        }
        assert_eq!(g.terminals().len(), 18);

        let spec2 = GenSpec::new(Family::A, 3, vec![2, 10, 10], 1, 2);
        assert_eq!(spec2.infoset_counts(), vec![1, 1, 2]);
        assert_eq!(generate(&spec2).unwrap().terminals().len(), 200);
    }

    #[test]
    fn family_b_counts() {
        let spec = GenSpec::new(Family::B, 4, vec![2, 2, 5, 3], 1, 3);
        assert_eq!(spec.infoset_counts(), vec![1, 2, 2, 5]);
        let g = generate(&spec).unwrap();
        for (p, &m) in spec.infoset_counts().iter().enumerate() {
            assert_eq!(g.player_infosets(p + 1).len(), m);
        }
    }

    #[test]
    fn family_c_counts() {
        for (n, b, layers, expect) in [
            (2, vec![2, 2], 3, vec![11, 21]),
            (2, vec![2, 2], 4, vec![43, 85]),
            (2, vec![3, 3], 2, vec![4, 10]),
            (3, vec![2, 2, 2], 2, vec![5, 9, 18]),
        ] {
            let spec = GenSpec::new(Family::C, n, b, layers, 5);
            assert_eq!(spec.infoset_counts(), expect);
            if spec.infoset_counts().iter().sum::<usize>() < 200 {
                let g = generate(&spec).unwrap();
                for (p, &m) in expect.iter().enumerate() {
                    assert_eq!(g.player_infosets(p + 1).len(), m);
                }
            }
        }
    }

    #[test]
    fn generated_games_have_perfect_recall() {
        for seed in 0..50 {
            let spec = match seed % 3 {
                0 => GenSpec::new(Family::A, 2 + (seed as usize % 3), vec![2; 2 + (seed as usize % 3)], 1, seed),
                1 => GenSpec::new(Family::B, 3, vec![2, 3, 2], 1, seed),
                _ => GenSpec::new(Family::C, 2, vec![2, 2], 2, seed),
            };
            let g = generate(&spec).unwrap();
            assert!(validate_perfect_recall(&g).is_empty());
            let m = spec.infoset_counts();
            for p in 1..=spec.n {
                assert_eq!(g.player_infosets(p).len(), m[p - 1], "{spec:?}");
            }
        }
    }

    #[test]
    fn serialization_round_trips_and_is_deterministic() {
        let spec = GenSpec::new(Family::A, 3, vec![2, 3, 3], 1, 42);
        let g = generate(&spec).unwrap();
        let text = serialize_game(&g);
        let h = parse_game(&text).unwrap();
        assert!(games_equal(&g, &h));

        let g2 = generate(&spec).unwrap();
        assert_eq!(text, serialize_game(&g2));
        let other = generate(&GenSpec::new(Family::A, 3, vec![2, 3, 3], 1, 43)).unwrap();
        assert_ne!(text, serialize_game(&other));
    }

    #[test]
    fn payoff_sparsity_tracks_the_drawn_probability() {
        // Reconstruct the game-level draw and compare with the empirical
        // zero fraction on a game with many payoff coordinates.
        let spec = GenSpec::new(Family::A, 3, vec![2, 9, 9], 1, 7);
        let mut rng_game = ChaCha12Rng::seed_from_u64(spec.seed);
        rng_game.set_stream(0);
        let zero_prob: f64 = rng_game.gen_range(0.0..=spec.zero_prob_max);

        let g = generate(&spec).unwrap();
        let mut zeros = 0usize;
        let mut total = 0usize;
        for &z in g.terminals() {
            for p in 1..=3 {
                total += 1;
                if g.payoff(z, p) == 0.0 {
                    zeros += 1;
                }
            }
        }
        assert!(total >= 400);
        // Uniform draws land on zero too, so the empirical rate sits at or
        // slightly above the drawn probability.
        let empirical = zeros as f64 / total as f64;
        assert!(
            (empirical - zero_prob).abs() <= 0.05 + 1.0 / 21.0,
            "drawn {zero_prob}, empirical {empirical}"
        );
    }

    #[test]
    fn bad_specs_are_rejected() {
        assert!(generate(&GenSpec::new(Family::A, 1, vec![2], 1, 0)).is_err());
        assert!(generate(&GenSpec::new(Family::A, 2, vec![2], 1, 0)).is_err());
        assert!(generate(&GenSpec::new(Family::A, 2, vec![2, 1], 1, 0)).is_err());
        assert!(generate(&GenSpec::new(Family::B, 2, vec![2, 2], 2, 0)).is_err());
    }
}
