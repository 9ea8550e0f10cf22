//! Equilibrium certification through the polynomial characterizations, the
//! companion construction for bare profiles, and a brute-force oracle.

use serde::Serialize;

use crate::Refinement;
use crate::belief::{Fill, belief_residual, solve_beliefs};
use crate::error::SolveError;
use crate::game::{Game, InfosetId, Player, SubgameIndex};
use crate::payoff::{
    conditional_payoff, expected_payoff, payoff_through, splice, subgame_conditional_payoff,
};
use crate::profile::{Assessment, BehaviorProfile, BeliefSystem};
use crate::reach::infoset_reach;

/// Residuals and recovered multipliers for one infoset.
#[derive(Debug, Clone, Serialize)]
pub struct InfosetCheck {
    pub infoset: String,
    /// Per-action slack of the first payoff block; zero on supported actions.
    pub lambda: Vec<f64>,
    pub zeta: f64,
    /// Per-action slack of the companion block.
    pub lambda_tilde: Vec<f64>,
    pub zeta_tilde: f64,
    /// max over actions of beta(a) * lambda(a).
    pub comp_defect: f64,
    /// max over actions of beta_tilde(a) * lambda_tilde(a).
    pub comp_defect_tilde: f64,
    pub belief_residual: f64,
}

/// Outcome of an equilibrium check at a tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub refinement: String,
    pub tol: f64,
    pub per_infoset: Vec<InfosetCheck>,
    pub max_residual: f64,
    pub pass: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Default check tolerance: 1e-6 scaled by the payoff magnitude, which is the
/// noise level of path endpoints.
pub fn default_tol(game: &Game) -> f64 {
    1e-6 * (1.0 + game.payoff_scale())
}

/// Builds the companion profile and belief system certifying a bare profile.
///
/// Beliefs come from the kernel system with uniform fill. The companion
/// equals the profile wherever the infoset is reached; elsewhere it is set by
/// backward induction (deepest own infosets first) to a vertex on the
/// lowest-index action maximizing the conditional payoff.
pub fn construct_companion(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    mode: Refinement,
) -> (BehaviorProfile, BeliefSystem) {
    let mu = solve_beliefs(game, sub, profile, mode, &Fill::Uniform);
    let mut tilde = profile.clone();
    let mut order: Vec<InfosetId> = game
        .infoset_ids()
        .filter(|&j| infoset_reach(game, profile, j) <= 0.0)
        .collect();
    // Deepest first, measured at the deepest member.
    order.sort_by_key(|&j| {
        let d = game.infoset(j).members.iter().map(|&m| game.node(m).depth).max().unwrap();
        std::cmp::Reverse(d)
    });
    for j in order {
        let player = game.infoset(j).player;
        let spliced = splice(game, profile, &tilde, j);
        let values: Vec<f64> = (0..game.infoset(j).actions.len())
            .map(|a| conditional_payoff(game, &spliced, &mu, player, j, Some(a)))
            .collect();
        let best = values
            .iter()
            .enumerate()
            .max_by(|(ia, x), (ib, y)| x.partial_cmp(y).unwrap().then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap();
        let mut row = vec![0.0; values.len()];
        row[best] = 1.0;
        tilde.set_row(j, row);
    }
    (tilde, mu)
}

fn block_check(
    game: &Game,
    j: InfosetId,
    weights: &[f64],
    values: &[f64],
) -> (f64, Vec<f64>, f64) {
    let zeta = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda: Vec<f64> = values.iter().map(|&u| zeta - u).collect();
    let comp = game
        .infoset(j)
        .actions
        .iter()
        .enumerate()
        .map(|(a, _)| weights[a] * lambda[a])
        .fold(0.0f64, f64::max);
    (zeta, lambda, comp)
}

fn check_inner(
    game: &Game,
    sub: &SubgameIndex,
    assessment: &Assessment,
    tol: f64,
    mode: Refinement,
) -> Result<VerifyReport, SolveError> {
    for j in game.infoset_ids() {
        let k = game.infoset(j).actions.len();
        if assessment.beta.row(j).len() != k || assessment.beta_tilde.row(j).len() != k {
            return Err(SolveError::DimensionMismatch(format!(
                "infoset `{}` expects {} action probabilities",
                game.infoset_name(j),
                k
            )));
        }
        if assessment.mu.row(j).len() != game.infoset(j).members.len() {
            return Err(SolveError::DimensionMismatch(format!(
                "infoset `{}` expects {} belief entries",
                game.infoset_name(j),
                game.infoset(j).members.len()
            )));
        }
    }
    let beliefs = belief_residual(game, sub, &assessment.beta, &assessment.mu, mode);
    let mut per_infoset = Vec::with_capacity(game.num_infosets());
    let mut max_residual: f64 = assessment.beta.simplex_defect().max(
        assessment.beta_tilde.simplex_defect(),
    );
    for j in game.infoset_ids() {
        let player = game.infoset(j).player;
        let spliced = splice(game, &assessment.beta, &assessment.beta_tilde, j);
        let k = game.infoset(j).actions.len();
        let u1: Vec<f64> = (0..k)
            .map(|a| match mode {
                Refinement::Nash => payoff_through(game, &spliced, player, j, Some(a)),
                Refinement::Sgpe => {
                    subgame_conditional_payoff(game, sub, &spliced, player, j, Some(a))
                }
            })
            .collect();
        let u2: Vec<f64> = (0..k)
            .map(|a| conditional_payoff(game, &spliced, &assessment.mu, player, j, Some(a)))
            .collect();
        let (zeta, lambda, comp) = block_check(game, j, assessment.beta.row(j), &u1);
        let (zeta_tilde, lambda_tilde, comp_tilde) =
            block_check(game, j, assessment.beta_tilde.row(j), &u2);
        max_residual = max_residual.max(comp).max(comp_tilde).max(beliefs[j.0]);
        per_infoset.push(InfosetCheck {
            infoset: game.infoset_name(j).to_string(),
            lambda,
            zeta,
            lambda_tilde,
            zeta_tilde,
            comp_defect: comp,
            comp_defect_tilde: comp_tilde,
            belief_residual: beliefs[j.0],
        });
    }
    Ok(VerifyReport {
        refinement: mode.to_string(),
        tol,
        per_infoset,
        max_residual,
        pass: max_residual <= tol,
    })
}

/// Certifies or refutes a Nash equilibrium candidate: both payoff blocks are
/// evaluated under the splice, multipliers recovered, and the verdict holds
/// iff every complementarity product and belief residual is within `tol`.
pub fn check_nash(
    game: &Game,
    sub: &SubgameIndex,
    assessment: &Assessment,
    tol: f64,
) -> Result<VerifyReport, SolveError> {
    check_inner(game, sub, assessment, tol, Refinement::Nash)
}

/// As `check_nash` with subgame-restricted payoffs in the first block and
/// subgame-relative beliefs.
pub fn check_sgpe(
    game: &Game,
    sub: &SubgameIndex,
    assessment: &Assessment,
    tol: f64,
) -> Result<VerifyReport, SolveError> {
    check_inner(game, sub, assessment, tol, Refinement::Sgpe)
}

/// Certifies a semi-sequential equilibrium: the profile itself must be
/// locally rational against beliefs solving the kernel system of `mode`.
pub fn check_semi_sequential(
    game: &Game,
    sub: &SubgameIndex,
    beta: &BehaviorProfile,
    mu: &BeliefSystem,
    tol: f64,
    mode: Refinement,
) -> Result<VerifyReport, SolveError> {
    let beliefs = belief_residual(game, sub, beta, mu, mode);
    let mut per_infoset = Vec::with_capacity(game.num_infosets());
    let mut max_residual: f64 = beta.simplex_defect();
    for j in game.infoset_ids() {
        let player = game.infoset(j).player;
        let k = game.infoset(j).actions.len();
        if beta.row(j).len() != k {
            return Err(SolveError::DimensionMismatch(format!(
                "infoset `{}` expects {} action probabilities",
                game.infoset_name(j),
                k
            )));
        }
        let values: Vec<f64> = (0..k)
            .map(|a| conditional_payoff(game, beta, mu, player, j, Some(a)))
            .collect();
        let zeta = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lambda: Vec<f64> = values.iter().map(|&u| zeta - u).collect();
        // Mass is forbidden on actions strictly beaten at tolerance.
        let comp = (0..k)
            .map(|a| if lambda[a] > tol { beta.prob(j, a) } else { 0.0 })
            .fold(0.0f64, f64::max);
        max_residual = max_residual.max(comp).max(beliefs[j.0]);
        per_infoset.push(InfosetCheck {
            infoset: game.infoset_name(j).to_string(),
            lambda,
            zeta,
            lambda_tilde: Vec::new(),
            zeta_tilde: 0.0,
            comp_defect: comp,
            comp_defect_tilde: 0.0,
            belief_residual: beliefs[j.0],
        });
    }
    let refinement = match mode {
        Refinement::Nash => "semiseq",
        Refinement::Sgpe => "sgpe-semiseq",
    };
    Ok(VerifyReport {
        refinement: refinement.into(),
        tol,
        per_infoset,
        max_residual,
        pass: max_residual <= tol,
    })
}

/// Result of the pure-deviation enumeration oracle.
#[derive(Debug, Clone, Serialize)]
pub struct BruteForceOutcome {
    pub is_nash: bool,
    /// Largest payoff improvement any pure deviation achieves.
    pub worst_gain: f64,
    pub worst_player: Player,
    /// Action index per infoset of the worst deviating player.
    pub worst_strategy: Vec<usize>,
}

/// Checks global rationality by enumerating pure behavioral strategies per
/// player. Valid because each player's payoff is multilinear in their own
/// per-infoset vectors under perfect recall, so a best response is attained
/// at a vertex.
pub fn brute_force_nash_check(
    game: &Game,
    profile: &BehaviorProfile,
    tol: f64,
    cap: u128,
) -> Result<BruteForceOutcome, SolveError> {
    let mut worst_gain = f64::NEG_INFINITY;
    let mut worst_player = 1;
    let mut worst_strategy = Vec::new();
    for player in 1..=game.num_players() {
        let own: Vec<InfosetId> = game.player_infosets(player).to_vec();
        let count: u128 = own
            .iter()
            .map(|&j| game.infoset(j).actions.len() as u128)
            .product();
        if count > cap {
            return Err(SolveError::EnumerationCap { player, count, cap });
        }
        let base = expected_payoff(game, profile, player);
        let mut choice = vec![0usize; own.len()];
        loop {
            let mut candidate = profile.clone();
            for (slot, &j) in own.iter().enumerate() {
                let mut row = vec![0.0; game.infoset(j).actions.len()];
                row[choice[slot]] = 1.0;
                candidate.set_row(j, row);
            }
            let gain = expected_payoff(game, &candidate, player) - base;
            if gain > worst_gain {
                worst_gain = gain;
                worst_player = player;
                worst_strategy = choice.clone();
            }
            // Mixed-radix increment over the own infosets.
            let mut slot = 0;
            loop {
                if slot == own.len() {
                    break;
                }
                choice[slot] += 1;
                if choice[slot] < game.infoset(own[slot]).actions.len() {
                    break;
                }
                choice[slot] = 0;
                slot += 1;
            }
            if slot == own.len() {
                break;
            }
        }
    }
    Ok(BruteForceOutcome {
        is_nash: worst_gain <= tol,
        worst_gain,
        worst_player,
        worst_strategy,
    })
}
