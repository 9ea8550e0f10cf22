//! Expected payoffs, infoset-restricted payoffs, belief-conditional payoffs,
//! and the strategy splice that swaps a player's later moves for a companion
//! profile.

use crate::game::{Game, InfosetId, NodeId, NodeKind, Player, SubgameIndex, experience_sequence};
use crate::profile::{BehaviorProfile, BeliefSystem};
use crate::reach::{reach, reach_without_infoset};

/// Replaces the owner's strategy at every infoset lying strictly after
/// `infoset` by the companion `beta_tilde`; all other infosets, including
/// `infoset` itself and other players', keep `beta`.
pub fn splice(
    game: &Game,
    beta: &BehaviorProfile,
    beta_tilde: &BehaviorProfile,
    infoset: InfosetId,
) -> BehaviorProfile {
    let mut out = beta.clone();
    for &q in game.infosets_after(infoset) {
        out.set_row(q, beta_tilde.row(q).to_vec());
    }
    out
}

/// Expected payoff of the subtree below `node`, own factors included.
pub(crate) fn expected_below(
    game: &Game,
    profile: &BehaviorProfile,
    player: Player,
    node: NodeId,
) -> f64 {
    match &game.node(node).kind {
        NodeKind::Terminal { payoffs } => payoffs[player - 1],
        NodeKind::Chance { probs } => game
            .node(node)
            .actions
            .iter()
            .zip(probs)
            .map(|(a, &p)| p * expected_below(game, profile, player, a.child))
            .sum(),
        NodeKind::Decision { infoset, .. } => game
            .node(node)
            .actions
            .iter()
            .enumerate()
            .map(|(k, a)| profile.prob(*infoset, k) * expected_below(game, profile, player, a.child))
            .sum(),
    }
}

/// Expected payoff of the player under the profile.
pub fn expected_payoff(game: &Game, profile: &BehaviorProfile, player: Player) -> f64 {
    expected_below(game, profile, player, game.root())
}

/// Expected payoff over the terminal histories passing through `infoset`.
/// With an action given, the action is substituted there: its factor is
/// treated as one and only histories taking it are counted.
pub fn payoff_through(
    game: &Game,
    profile: &BehaviorProfile,
    player: Player,
    infoset: InfosetId,
    action: Option<usize>,
) -> f64 {
    let members = &game.infoset(infoset).members;
    match action {
        Some(a) => members
            .iter()
            .map(|&m| {
                reach_without_infoset(game, profile, infoset, m)
                    * expected_below(game, profile, player, game.child(m, a))
            })
            .sum(),
        None => members
            .iter()
            .map(|&m| reach(game, profile, m) * expected_below(game, profile, player, m))
            .sum(),
    }
}

/// Probability weight of a terminal history conditional on the infoset having
/// been reached with beliefs `mu`: zero when no member history is a prefix,
/// otherwise the member's belief times the actor factors after it (skipping
/// the infoset's own factor when an action is substituted).
pub fn conditional_weight(
    game: &Game,
    profile: &BehaviorProfile,
    mu: &BeliefSystem,
    infoset: InfosetId,
    terminal: NodeId,
    action: Option<usize>,
) -> f64 {
    let members = &game.infoset(infoset).members;
    let Some((idx, &member)) = members
        .iter()
        .enumerate()
        .find(|(_, &m)| game.is_ancestor_or_self(m, terminal))
    else {
        return 0.0;
    };
    if terminal == member {
        return 0.0;
    }
    let mut p = mu.row(infoset)[idx];
    let mut cur = terminal;
    while cur != member {
        let (parent, k) = game.node(cur).parent.expect("member is an ancestor");
        if parent == member {
            match action {
                Some(a) if a != k => return 0.0,
                Some(_) => {}
                None => {
                    p *= match &game.node(parent).kind {
                        NodeKind::Decision { infoset: j, .. } => profile.prob(*j, k),
                        _ => unreachable!("members are decision nodes"),
                    };
                }
            }
        } else {
            p *= match &game.node(parent).kind {
                NodeKind::Chance { probs } => probs[k],
                NodeKind::Decision { infoset: j, .. } => profile.prob(*j, k),
                NodeKind::Terminal { .. } => unreachable!(),
            };
        }
        cur = parent;
    }
    p
}

/// Expected payoff conditional on the infoset having been reached, under
/// beliefs `mu`. With an action given it is substituted at the infoset.
pub fn conditional_payoff(
    game: &Game,
    profile: &BehaviorProfile,
    mu: &BeliefSystem,
    player: Player,
    infoset: InfosetId,
    action: Option<usize>,
) -> f64 {
    let members = &game.infoset(infoset).members;
    members
        .iter()
        .enumerate()
        .map(|(idx, &m)| {
            let w = mu.row(infoset)[idx];
            if w == 0.0 {
                return 0.0;
            }
            w * match action {
                Some(a) => expected_below(game, profile, player, game.child(m, a)),
                None => expected_below(game, profile, player, m),
            }
        })
        .sum()
}

/// As `payoff_through` but with kernel products starting at the root of the
/// smallest subgame containing the infoset's actions.
pub fn subgame_conditional_payoff(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    player: Player,
    infoset: InfosetId,
    action: Option<usize>,
) -> f64 {
    let members = &game.infoset(infoset).members;
    let start = sub.infoset_root(infoset);
    members
        .iter()
        .map(|&m| {
            let mut prefix = 1.0;
            let mut cur = m;
            while cur != start {
                let (parent, k) = game.node(cur).parent.expect("subgame root is an ancestor");
                prefix *= match &game.node(parent).kind {
                    NodeKind::Chance { probs } => probs[k],
                    NodeKind::Decision { infoset: j, .. } => profile.prob(*j, k),
                    NodeKind::Terminal { .. } => unreachable!(),
                };
                cur = parent;
            }
            prefix
                * match action {
                    Some(a) => expected_below(game, profile, player, game.child(m, a)),
                    None => expected_below(game, profile, player, m),
                }
        })
        .sum()
}

/// The player's infosets whose members carry no earlier own move.
pub fn first_infosets(game: &Game, player: Player) -> Vec<InfosetId> {
    game.player_infosets(player)
        .iter()
        .copied()
        .filter(|&j| {
            let m = game.infoset(j).members[0];
            experience_sequence(game, player, m).steps.is_empty()
        })
        .collect()
}

/// Terminal histories meeting none of the player's infosets.
pub fn terminals_avoiding_player(game: &Game, player: Player) -> Vec<NodeId> {
    game.terminals()
        .iter()
        .copied()
        .filter(|&z| experience_sequence(game, player, z).steps.is_empty())
        .collect()
}
