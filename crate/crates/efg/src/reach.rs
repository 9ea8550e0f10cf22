//! Probability kernels over histories and infosets.
//!
//! `reach` multiplies every actor's factor along a history; the excluding
//! variants skip a given infoset's factor or a given player's factors; the
//! subgame variants restart the product at the subgame containing the
//! relevant actions. All are pure functions of immutable inputs.

use crate::game::{Game, InfosetId, NodeId, NodeKind, Player, SubgameIndex};
use crate::profile::BehaviorProfile;

/// Factor contributed at `node` for taking action index `k`.
fn factor(game: &Game, profile: &BehaviorProfile, node: NodeId, k: usize) -> f64 {
    match &game.node(node).kind {
        NodeKind::Chance { probs } => probs[k],
        NodeKind::Decision { infoset, .. } => profile.prob(*infoset, k),
        NodeKind::Terminal { .. } => unreachable!("terminal nodes contribute no factor"),
    }
}

/// Probability that play reaches `node`; 1 at the root.
pub fn reach(game: &Game, profile: &BehaviorProfile, node: NodeId) -> f64 {
    let mut p = 1.0;
    let mut cur = node;
    while let Some((parent, k)) = game.node(cur).parent {
        p *= factor(game, profile, parent, k);
        cur = parent;
    }
    p
}

/// Reach probability with the factors contributed at `infoset` skipped
/// (an action substituted there is treated as taken with probability one).
/// Call sites restrict summation to histories actually containing the
/// substituted action.
pub fn reach_without_infoset(
    game: &Game,
    profile: &BehaviorProfile,
    infoset: InfosetId,
    node: NodeId,
) -> f64 {
    let mut p = 1.0;
    let mut cur = node;
    while let Some((parent, k)) = game.node(cur).parent {
        if game.node(parent).infoset() != Some(infoset) {
            p *= factor(game, profile, parent, k);
        }
        cur = parent;
    }
    p
}

/// Probability mass reaching the infoset: sum of `reach` over members.
pub fn infoset_reach(game: &Game, profile: &BehaviorProfile, infoset: InfosetId) -> f64 {
    game.infoset(infoset).members.iter().map(|&m| reach(game, profile, m)).sum()
}

/// Reach probability contributed by everyone except `player` (chance
/// included): the self-independent kernel.
pub fn reach_without_player(
    game: &Game,
    profile: &BehaviorProfile,
    player: Player,
    node: NodeId,
) -> f64 {
    let mut p = 1.0;
    let mut cur = node;
    while let Some((parent, k)) = game.node(cur).parent {
        if game.node(parent).player() != Some(player) {
            p *= factor(game, profile, parent, k);
        }
        cur = parent;
    }
    p
}

/// Sum of the owner's self-independent kernel over the infoset's members.
pub fn infoset_reach_without_player(
    game: &Game,
    profile: &BehaviorProfile,
    infoset: InfosetId,
) -> f64 {
    let player = game.infoset(infoset).player;
    game.infoset(infoset)
        .members
        .iter()
        .map(|&m| reach_without_player(game, profile, player, m))
        .sum()
}

/// The owner's first infosets reached through `action` at `infoset`: every
/// member passes through that action with no own move in between.
pub fn successor_infosets(game: &Game, infoset: InfosetId, action: usize) -> Vec<InfosetId> {
    let player = game.infoset(infoset).player;
    game.player_infosets(player)
        .iter()
        .copied()
        .filter(|&q| q != infoset && game.infoset(q).members.iter().all(|&v| comes_right_after(game, infoset, action, v)))
        .collect()
}

/// Union of `successor_infosets` over the infoset's actions.
pub fn all_successor_infosets(game: &Game, infoset: InfosetId) -> Vec<InfosetId> {
    let mut out: Vec<InfosetId> = (0..game.infoset(infoset).actions.len())
        .flat_map(|a| successor_infosets(game, infoset, a))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// True if the path to `v` takes `action` at a member of `infoset` and meets
/// no other decision node of the owner afterwards.
fn comes_right_after(game: &Game, infoset: InfosetId, action: usize, v: NodeId) -> bool {
    let player = game.infoset(infoset).player;
    let mut cur = v;
    while let Some((parent, k)) = game.node(cur).parent {
        if game.node(parent).infoset() == Some(infoset) {
            return k == action;
        }
        if game.node(parent).player() == Some(player) {
            return false;
        }
        cur = parent;
    }
    false
}

/// Full-factor kernel of `infoset`: product of actor probabilities along the
/// path to `node`, starting at the root of the smallest subgame containing
/// the infoset's actions. Empty products are 1.
pub fn subgame_reach(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    infoset: InfosetId,
    node: NodeId,
) -> f64 {
    let start = sub.infoset_root(infoset);
    product_up_to(game, profile, node, start, None, None)
}

/// As `subgame_reach` with the factors contributed at `infoset` skipped.
pub fn subgame_reach_without_infoset(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    infoset: InfosetId,
    node: NodeId,
) -> f64 {
    let start = sub.infoset_root(infoset);
    product_up_to(game, profile, node, start, Some(infoset), None)
}

/// Own-excluded subgame kernel of a member history: product of the other
/// actors' probabilities starting at the smallest subgame containing the
/// history's last action.
pub fn subgame_reach_without_player(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    player: Player,
    node: NodeId,
) -> f64 {
    let Some(parent) = game.parent(node) else { return 1.0 };
    let start = sub.node_to_root(parent);
    product_up_to(game, profile, node, start, None, Some(player))
}

/// Sum of `subgame_reach` over members.
pub fn infoset_subgame_reach(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    infoset: InfosetId,
) -> f64 {
    game.infoset(infoset)
        .members
        .iter()
        .map(|&m| subgame_reach(game, sub, profile, infoset, m))
        .sum()
}

/// Sum of `subgame_reach_without_player` over members, for the owner.
pub fn infoset_subgame_reach_without_player(
    game: &Game,
    sub: &SubgameIndex,
    profile: &BehaviorProfile,
    infoset: InfosetId,
) -> f64 {
    let player = game.infoset(infoset).player;
    game.infoset(infoset)
        .members
        .iter()
        .map(|&m| subgame_reach_without_player(game, sub, profile, player, m))
        .sum()
}

/// Product of factors along the path from `start` (inclusive) down to `node`
/// (exclusive), optionally skipping one infoset's factors or one player's.
fn product_up_to(
    game: &Game,
    profile: &BehaviorProfile,
    node: NodeId,
    start: NodeId,
    skip_infoset: Option<InfosetId>,
    skip_player: Option<Player>,
) -> f64 {
    let mut p = 1.0;
    let mut cur = node;
    while cur != start {
        let Some((parent, k)) = game.node(cur).parent else { break };
        let skipped = skip_infoset.is_some_and(|j| game.node(parent).infoset() == Some(j))
            || skip_player.is_some_and(|i| game.node(parent).player() == Some(i));
        if !skipped {
            p *= factor(game, profile, parent, k);
        }
        cur = parent;
    }
    p
}
