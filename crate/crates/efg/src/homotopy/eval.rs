//! Batch payoff and kernel evaluation for the residual systems.
//!
//! One preparation pass fills per-node tables for a given perturbed profile
//! and companion profile; every infoset's payoff blocks and belief kernels
//! then read off in one sweep. Tail products swap in the companion for the
//! acting player's own later moves, which is exactly what the splice operator
//! does below an infoset.

use crate::Refinement;
use crate::game::{Game, InfosetId, NodeKind, SubgameIndex};

pub(crate) struct Evaluator {
    /// Per node, per action: factor under the perturbed profile.
    fac: Vec<Vec<f64>>,
    /// Per player (0-based), per node: expected payoff of the subtree with
    /// the player's own factors taken from the companion profile.
    tail: Vec<Vec<f64>>,
    /// Per node: product of perturbed factors from the root.
    prefix: Vec<f64>,
    /// Per node: product of perturbed factors from the nearest subgame root.
    relprefix: Vec<f64>,
    /// Per player, per node: root product excluding the player's factors.
    kexcl: Vec<Vec<f64>>,
    /// Per player, per node: subgame product excluding the player's factors.
    relk: Vec<Vec<f64>>,
}

impl Evaluator {
    pub fn new(game: &Game) -> Self {
        let v = game.num_nodes();
        let n = game.num_players();
        Evaluator {
            fac: game
                .node_ids()
                .map(|id| vec![0.0; game.node(id).actions.len()])
                .collect(),
            tail: vec![vec![0.0; v]; n],
            prefix: vec![0.0; v],
            relprefix: vec![0.0; v],
            kexcl: vec![vec![0.0; v]; n],
            relk: vec![vec![0.0; v]; n],
        }
    }

    /// Fills all tables for a perturbed profile and a companion profile.
    pub fn prepare(
        &mut self,
        game: &Game,
        sub: &SubgameIndex,
        pert: &[Vec<f64>],
        tilde: &[Vec<f64>],
        refinement: Refinement,
    ) {
        for v in game.node_ids() {
            match &game.node(v).kind {
                NodeKind::Terminal { .. } => {}
                NodeKind::Chance { probs } => self.fac[v.0].copy_from_slice(probs),
                NodeKind::Decision { infoset, .. } => {
                    self.fac[v.0].copy_from_slice(&pert[infoset.0]);
                }
            }
        }

        // Bottom-up tails, one per player.
        for player in 1..=game.num_players() {
            let tail = &mut self.tail[player - 1];
            for &v in game.preorder().iter().rev() {
                let node = game.node(v);
                tail[v.0] = match &node.kind {
                    NodeKind::Terminal { payoffs } => payoffs[player - 1],
                    NodeKind::Chance { probs } => node
                        .actions
                        .iter()
                        .zip(probs)
                        .map(|(a, &p)| p * tail[a.child.0])
                        .sum(),
                    NodeKind::Decision { player: owner, infoset } => {
                        let rows: &[f64] = if *owner == player {
                            &tilde[infoset.0]
                        } else {
                            &pert[infoset.0]
                        };
                        node.actions
                            .iter()
                            .enumerate()
                            .map(|(k, a)| rows[k] * tail[a.child.0])
                            .sum()
                    }
                };
            }
        }

        // Top-down prefixes.
        let sgpe = refinement == Refinement::Sgpe;
        for &v in game.preorder() {
            match game.node(v).parent {
                None => {
                    self.prefix[v.0] = 1.0;
                    self.relprefix[v.0] = 1.0;
                    for p in 0..game.num_players() {
                        self.kexcl[p][v.0] = 1.0;
                        self.relk[p][v.0] = 1.0;
                    }
                }
                Some((parent, k)) => {
                    let f = self.fac[parent.0][k];
                    self.prefix[v.0] = self.prefix[parent.0] * f;
                    if sgpe {
                        self.relprefix[v.0] = if sub.is_subgame_root(v) {
                            1.0
                        } else {
                            self.relprefix[parent.0] * f
                        };
                    }
                    let owner = game.node(parent).player();
                    for p in 0..game.num_players() {
                        let g = if owner == Some(p + 1) { 1.0 } else { f };
                        self.kexcl[p][v.0] = self.kexcl[p][parent.0] * g;
                        if sgpe {
                            self.relk[p][v.0] = if sub.is_subgame_root(v) {
                                1.0
                            } else {
                                self.relk[p][parent.0] * g
                            };
                        }
                    }
                }
            }
        }
    }

    /// First-block payoff of playing `action` at the infoset, with the
    /// member weights from the root (Nash) or from the subgame root (SGPE).
    pub fn block_payoff(
        &self,
        game: &Game,
        j: InfosetId,
        action: usize,
        refinement: Refinement,
    ) -> f64 {
        let is = game.infoset(j);
        let player = is.player - 1;
        is.members
            .iter()
            .map(|&m| {
                let w = match refinement {
                    Refinement::Nash => self.prefix[m.0],
                    Refinement::Sgpe => self.relprefix[m.0],
                };
                w * self.tail[player][game.child(m, action).0]
            })
            .sum()
    }

    /// Belief-conditional payoff of playing `action` at the infoset.
    pub fn conditional_payoff(
        &self,
        game: &Game,
        j: InfosetId,
        action: usize,
        mu_row: &[f64],
    ) -> f64 {
        let is = game.infoset(j);
        let player = is.player - 1;
        is.members
            .iter()
            .zip(mu_row)
            .map(|(&m, &w)| w * self.tail[player][game.child(m, action).0])
            .sum()
    }

    /// Own-excluded kernel value of one member of the infoset.
    pub fn kernel(
        &self,
        game: &Game,
        _sub: &SubgameIndex,
        j: InfosetId,
        member_index: usize,
        refinement: Refinement,
    ) -> f64 {
        let is = game.infoset(j);
        let player = is.player - 1;
        let m = is.members[member_index];
        match refinement {
            Refinement::Nash => self.kexcl[player][m.0],
            Refinement::Sgpe => match game.node(m).parent {
                None => 1.0,
                Some((parent, k)) => {
                    let f = if game.node(parent).player() == Some(player + 1) {
                        1.0
                    } else {
                        self.fac[parent.0][k]
                    };
                    self.relk[player][parent.0] * f
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::subgame_decomposition;
    use crate::payoff::{conditional_payoff, payoff_through, splice, subgame_conditional_payoff};
    use crate::profile::{BehaviorProfile, BeliefSystem};
    use crate::reach::{reach_without_player, subgame_reach_without_player};
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_rows(game: &Game, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        game.infoset_ids()
            .map(|j| {
                let k = game.infoset(j).actions.len();
                let mut row: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|x| *x /= s);
                row
            })
            .collect()
    }

    #[test]
    fn batch_tables_match_the_walk_based_operations() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for g in [fixtures::notation_game(), fixtures::firstgame(), fixtures::secondgame()] {
            let sub = subgame_decomposition(&g);
            let mut eval = Evaluator::new(&g);
            for _ in 0..10 {
                let beta_rows = random_rows(&g, &mut rng);
                let tilde_rows = random_rows(&g, &mut rng);
                let beta = BehaviorProfile::from_rows(beta_rows.clone());
                let tilde = BehaviorProfile::from_rows(tilde_rows.clone());
                for refinement in [Refinement::Nash, Refinement::Sgpe] {
                    eval.prepare(&g, &sub, &beta_rows, &tilde_rows, refinement);
                    for j in g.infoset_ids() {
                        let player = g.infoset(j).player;
                        let spliced = splice(&g, &beta, &tilde, j);
                        let mu_row: Vec<f64> = {
                            let k = g.infoset(j).members.len();
                            let mut row: Vec<f64> =
                                (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
                            let s: f64 = row.iter().sum();
                            row.iter_mut().for_each(|x| *x /= s);
                            row
                        };
                        let mu = {
                            let mut mu = BeliefSystem::uniform(&g);
                            mu.set_row(j, mu_row.clone());
                            mu
                        };
                        for a in 0..g.infoset(j).actions.len() {
                            let direct = match refinement {
                                Refinement::Nash => {
                                    payoff_through(&g, &spliced, player, j, Some(a))
                                }
                                Refinement::Sgpe => subgame_conditional_payoff(
                                    &g, &sub, &spliced, player, j, Some(a),
                                ),
                            };
                            assert_relative_eq!(
                                eval.block_payoff(&g, j, a, refinement),
                                direct,
                                epsilon = 1e-12
                            );
                            assert_relative_eq!(
                                eval.conditional_payoff(&g, j, a, &mu_row),
                                conditional_payoff(&g, &spliced, &mu, player, j, Some(a)),
                                epsilon = 1e-12
                            );
                        }
                        for (idx, &m) in g.infoset(j).members.iter().enumerate() {
                            let direct = match refinement {
                                Refinement::Nash => reach_without_player(&g, &beta, player, m),
                                Refinement::Sgpe => {
                                    subgame_reach_without_player(&g, &sub, &beta, player, m)
                                }
                            };
                            assert_relative_eq!(
                                eval.kernel(&g, &sub, j, idx, refinement),
                                direct,
                                epsilon = 1e-12
                            );
                        }
                    }
                }
            }
        }
    }
}
