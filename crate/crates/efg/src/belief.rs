//! Belief systems induced by reach kernels: the self-independent system for
//! Nash checks and the subgame-relative system for subgame-perfect checks.
//!
//! At an infoset with positive kernel mass the belief is the normalized
//! kernel; at zero mass any simplex point solves the defining system, and the
//! uniform vector is used unless the caller supplies a fill.

use crate::Refinement;
use crate::game::{Game, InfosetId, SubgameIndex};
use crate::profile::{BehaviorProfile, BeliefSystem};
use crate::reach::{reach_without_player, subgame_reach_without_player};

/// Belief values at infosets the kernel cannot discriminate.
#[derive(Debug, Clone)]
pub enum Fill {
    Uniform,
    Given(BeliefSystem),
}

fn kernel_row(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    mode: Refinement,
    infoset: InfosetId,
) -> Vec<f64> {
    let player = game.infoset(infoset).player;
    game.infoset(infoset)
        .members
        .iter()
        .map(|&m| match mode {
            Refinement::Nash => reach_without_player(game, profile, player, m),
            Refinement::Sgpe => subgame_reach_without_player(game, sub, profile, player, m),
        })
        .collect()
}

/// Solves the belief system for the given kernel mode.
pub fn solve_beliefs(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    mode: Refinement,
    fill: &Fill,
) -> BeliefSystem {
    let mut rows = Vec::with_capacity(game.num_infosets());
    for j in game.infoset_ids() {
        let kernel = kernel_row(game, sub, profile, mode, j);
        let mass: f64 = kernel.iter().sum();
        if mass > 0.0 {
            rows.push(kernel.iter().map(|k| k / mass).collect());
        } else {
            rows.push(match fill {
                Fill::Uniform => {
                    let n = kernel.len();
                    vec![1.0 / n as f64; n]
                }
                Fill::Given(mu) => mu.row(j).to_vec(),
            });
        }
    }
    BeliefSystem::from_rows(rows)
}

/// Residual of the defining system per infoset: the largest violation of
/// `mass * mu(h) = kernel(h)` over members, plus the simplex defect.
pub fn belief_residual(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    mu: &BeliefSystem,
    mode: Refinement,
) -> Vec<f64> {
    game.infoset_ids()
        .map(|j| {
            let kernel = kernel_row(game, sub, profile, mode, j);
            let mass: f64 = kernel.iter().sum();
            let row = mu.row(j);
            let mut worst = (row.iter().sum::<f64>() - 1.0).abs();
            for (weight, &k) in row.iter().zip(&kernel) {
                worst = worst.max((mass * weight - k).abs()).max(-weight);
            }
            worst
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::subgame_decomposition;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn normalized_kernel_at_reached_infosets() {
        let g = fixtures::secondgame();
        let sub = subgame_decomposition(&g);
        let mut b = BehaviorProfile::uniform(&g);
        let p11 = g.infoset_by_name("p1.1").unwrap();
        let p21 = g.infoset_by_name("p2.1").unwrap();
        let p31 = g.infoset_by_name("p3.1").unwrap();
        b.set_row(p11, vec![0.4, 0.6]);
        b.set_row(p21, vec![0.55, 0.45]);
        b.set_row(p31, vec![0.35, 0.65]);
        let mu = solve_beliefs(&g, &sub, &b, Refinement::Nash, &Fill::Uniform);
        // The own-excluded kernel strips the owner's factors: the late own
        // infoset is weighted by the third player's move alone.
        let p12 = g.infoset_by_name("p1.2").unwrap();
        assert_relative_eq!(mu.row(p12)[0], 0.35, epsilon = 1e-14);
        assert_relative_eq!(mu.row(p12)[1], 0.65, epsilon = 1e-14);
        // Singleton infosets carry the point belief.
        assert_eq!(mu.row(p21), &[1.0]);

        let residuals = belief_residual(&g, &sub, &b, &mu, Refinement::Nash);
        assert!(residuals.iter().all(|&r| r <= 1e-12));
    }

    #[test]
    fn unreached_infosets_take_the_fill() {
        let g = fixtures::secondgame();
        let sub = subgame_decomposition(&g);
        let mut b = BehaviorProfile::uniform(&g);
        // Kill the I move so the late own infoset gets zero kernel mass.
        let p21 = g.infoset_by_name("p2.1").unwrap();
        b.set_row(p21, vec![0.0, 1.0]);
        let p12 = g.infoset_by_name("p1.2").unwrap();

        let mu = solve_beliefs(&g, &sub, &b, Refinement::Nash, &Fill::Uniform);
        assert_eq!(mu.row(p12), &[0.5, 0.5]);

        let mut given = BeliefSystem::uniform(&g);
        given.set_row(p12, vec![0.2, 0.8]);
        let mu2 = solve_beliefs(&g, &sub, &b, Refinement::Nash, &Fill::Given(given));
        assert_eq!(mu2.row(p12), &[0.2, 0.8]);
        // Any simplex fill satisfies the system at zero mass.
        let residuals = belief_residual(&g, &sub, &b, &mu2, Refinement::Nash);
        assert!(residuals.iter().all(|&r| r <= 1e-12));

        // The subgame-relative kernel still discriminates: inside the <Y,I>
        // subgame the third player's move weights the members.
        let mu3 = solve_beliefs(&g, &sub, &b, Refinement::Sgpe, &Fill::Uniform);
        assert_relative_eq!(mu3.row(p12)[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn residual_detects_inconsistent_beliefs() {
        let g = fixtures::secondgame();
        let sub = subgame_decomposition(&g);
        let b = BehaviorProfile::uniform(&g);
        let mut mu = solve_beliefs(&g, &sub, &b, Refinement::Nash, &Fill::Uniform);
        let p12 = g.infoset_by_name("p1.2").unwrap();
        let mut row = mu.row(p12).to_vec();
        row[0] += 0.1;
        row[1] -= 0.1;
        mu.set_row(p12, row);
        let residuals = belief_residual(&g, &sub, &b, &mu, Refinement::Nash);
        // Mass at that infoset is beta2(I) = 1/2, so the defect is 0.05.
        assert_relative_eq!(residuals[p12.0], 0.05, epsilon = 1e-12);
    }

    #[test]
    fn beliefs_ignore_own_moves() {
        // Randomizing the owner's earlier probabilities leaves the belief
        // unchanged: the defining feature of the self-independent system.
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for g in [fixtures::notation_game(), fixtures::secondgame()] {
            let sub = subgame_decomposition(&g);
            for _ in 0..50 {
                let mut b = BehaviorProfile::uniform(&g);
                for j in g.infoset_ids() {
                    let row = b.row_mut(j);
                    let mut sum = 0.0;
                    for x in row.iter_mut() {
                        *x = rng.gen_range(0.05..1.0);
                        sum += *x;
                    }
                    row.iter_mut().for_each(|x| *x /= sum);
                }
                let mu = solve_beliefs(&g, &sub, &b, Refinement::Nash, &Fill::Uniform);
                for j in g.infoset_ids() {
                    let owner = g.infoset(j).player;
                    let mut altered = b.clone();
                    for &q in g.player_infosets(owner) {
                        let row = altered.row_mut(q);
                        let mut sum = 0.0;
                        for x in row.iter_mut() {
                            *x = rng.gen_range(0.05..1.0);
                            sum += *x;
                        }
                        row.iter_mut().for_each(|x| *x /= sum);
                    }
                    let mu2 = solve_beliefs(&g, &sub, &altered, Refinement::Nash, &Fill::Uniform);
                    for (x, y) in mu.row(j).iter().zip(mu2.row(j)) {
                        assert!((x - y).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn beliefs_match_bayes_where_reached() {
        use crate::reach::{infoset_reach, reach};
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        for g in [fixtures::notation_game(), fixtures::firstgame(), fixtures::secondgame()] {
            let sub = subgame_decomposition(&g);
            for _ in 0..50 {
                let mut b = BehaviorProfile::uniform(&g);
                for j in g.infoset_ids() {
                    let row = b.row_mut(j);
                    let mut sum = 0.0;
                    for x in row.iter_mut() {
                        *x = rng.gen_range(0.05..1.0);
                        sum += *x;
                    }
                    row.iter_mut().for_each(|x| *x /= sum);
                }
                let mu = solve_beliefs(&g, &sub, &b, Refinement::Nash, &Fill::Uniform);
                for j in g.infoset_ids() {
                    let w = infoset_reach(&g, &b, j);
                    if w <= 0.0 {
                        continue;
                    }
                    for (idx, &m) in g.infoset(j).members.iter().enumerate() {
                        assert_relative_eq!(
                            mu.row(j)[idx],
                            reach(&g, &b, m) / w,
                            epsilon = 1e-10
                        );
                    }
                }
            }
        }
    }
}
