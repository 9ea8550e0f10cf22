//! Game trees: nodes, information sets, perfect recall, subgame structure.
//!
//! Histories are identified with tree nodes; an action label is unique within
//! its node, so "the actions after a history" is the node's label list.
//! Players are numbered from 1; the chance player is not a member of the
//! player set and its move probabilities are fixed data.

use crate::error::GameError;

/// 1-based player number.
pub type Player = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfosetId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    pub label: String,
    pub child: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    Decision { player: Player, infoset: InfosetId },
    /// Outgoing probabilities parallel the action list; strictly positive.
    Chance { probs: Vec<f64> },
    Terminal { payoffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    /// Empty exactly for terminal nodes.
    pub actions: Vec<Action>,
    /// Parent node and the index of the action leading here; `None` at the root.
    pub parent: Option<(NodeId, usize)>,
    pub depth: usize,
}

impl Node {
    pub fn is_terminal(&self) -> bool {
        matches!(self.kind, NodeKind::Terminal { .. })
    }
    pub fn is_chance(&self) -> bool {
        matches!(self.kind, NodeKind::Chance { .. })
    }
    pub fn player(&self) -> Option<Player> {
        match self.kind {
            NodeKind::Decision { player, .. } => Some(player),
            _ => None,
        }
    }
    pub fn infoset(&self) -> Option<InfosetId> {
        match self.kind {
            NodeKind::Decision { infoset, .. } => Some(infoset),
            _ => None,
        }
    }
}

/// An information set: member histories of one player sharing one action list.
#[derive(Debug, Clone, PartialEq)]
pub struct Infoset {
    pub player: Player,
    /// Member order fixes the coordinate order of belief vectors.
    pub members: Vec<NodeId>,
    pub actions: Vec<String>,
}

/// A validated extensive-form game tree.
#[derive(Debug, Clone)]
pub struct Game {
    pub(crate) num_players: usize,
    pub(crate) root: NodeId,
    pub(crate) nodes: Vec<Node>,
    pub(crate) node_ids: Vec<String>,
    pub(crate) infosets: Vec<Infoset>,
    pub(crate) infoset_ids: Vec<String>,
    /// Preorder over the tree (parents before children).
    pub(crate) topo: Vec<NodeId>,
    pub(crate) terminals: Vec<NodeId>,
    pub(crate) player_infosets: Vec<Vec<InfosetId>>,
    /// Per infoset: the owner's infosets lying strictly after it (some member
    /// is a strict descendant of one of its members).
    pub(crate) after: Vec<Vec<InfosetId>>,
    pub(crate) tin: Vec<usize>,
    pub(crate) tout: Vec<usize>,
    pub(crate) payoff_scale: f64,
}

impl Game {
    pub fn num_players(&self) -> usize {
        self.num_players
    }
    pub fn root(&self) -> NodeId {
        self.root
    }
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }
    pub fn node_name(&self, id: NodeId) -> &str {
        &self.node_ids[id.0]
    }
    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id.0]
    }
    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }
    pub fn infoset_name(&self, id: InfosetId) -> &str {
        &self.infoset_ids[id.0]
    }
    pub fn infoset_by_name(&self, name: &str) -> Option<InfosetId> {
        self.infoset_ids.iter().position(|s| s == name).map(InfosetId)
    }
    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.node_ids.iter().position(|s| s == name).map(NodeId)
    }
    pub fn infoset_ids(&self) -> impl Iterator<Item = InfosetId> {
        (0..self.infosets.len()).map(InfosetId)
    }
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }
    pub fn terminals(&self) -> &[NodeId] {
        &self.terminals
    }
    pub fn preorder(&self) -> &[NodeId] {
        &self.topo
    }
    pub fn player_infosets(&self, player: Player) -> &[InfosetId] {
        &self.player_infosets[player - 1]
    }
    /// The owner's infosets lying strictly after the given one; the splice
    /// operator replaces exactly these.
    pub fn infosets_after(&self, infoset: InfosetId) -> &[InfosetId] {
        &self.after[infoset.0]
    }
    pub fn child(&self, node: NodeId, action: usize) -> NodeId {
        self.nodes[node.0].actions[action].child
    }
    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.nodes[node.0].parent.map(|(p, _)| p)
    }
    pub fn payoff(&self, node: NodeId, player: Player) -> f64 {
        match &self.nodes[node.0].kind {
            NodeKind::Terminal { payoffs } => payoffs[player - 1],
            _ => panic!("payoff queried on a non-terminal node"),
        }
    }
    /// Largest payoff magnitude in the game; tolerances scale with it.
    pub fn payoff_scale(&self) -> f64 {
        self.payoff_scale
    }
    /// True if `anc` is an ancestor of `node` or the node itself.
    pub fn is_ancestor_or_self(&self, anc: NodeId, node: NodeId) -> bool {
        self.tin[anc.0] <= self.tin[node.0] && self.tin[node.0] < self.tout[anc.0]
    }
    /// Action labels from the root to the node.
    pub fn history_labels(&self, node: NodeId) -> Vec<&str> {
        let mut labels = Vec::with_capacity(self.nodes[node.0].depth);
        let mut cur = node;
        while let Some((p, k)) = self.nodes[cur.0].parent {
            labels.push(self.nodes[p.0].actions[k].label.as_str());
            cur = p;
        }
        labels.reverse();
        labels
    }
    /// Renders a history as `<a,b,c>`; the root is `<>`.
    pub fn history_string(&self, node: NodeId) -> String {
        format!("<{}>", self.history_labels(node).join(","))
    }

    /// Index of an action at a node's infoset by label.
    pub fn action_index(&self, infoset: InfosetId, label: &str) -> Option<usize> {
        self.infosets[infoset.0].actions.iter().position(|a| a == label)
    }

    /// Constructs a game from parts, enforcing the structural invariants.
    ///
    /// Perfect recall is not checked here; `validate_perfect_recall` reports
    /// violations and `crate::format::parse_game` rejects them.
    pub fn from_parts(
        num_players: usize,
        root: NodeId,
        nodes: Vec<Node>,
        node_ids: Vec<String>,
        infosets: Vec<Infoset>,
        infoset_ids: Vec<String>,
    ) -> Result<Self, GameError> {
        if num_players == 0 {
            return Err(GameError::Syntax("num_players must be positive".into()));
        }
        if root.0 >= nodes.len() {
            return Err(GameError::NotATree("root id out of range".into()));
        }

        // Tree shape: every non-root node has exactly one parent, no cycles,
        // everything reachable from the root.
        let mut seen_child = vec![false; nodes.len()];
        for (i, n) in nodes.iter().enumerate() {
            if n.is_terminal() && !n.actions.is_empty() {
                return Err(GameError::BadNode {
                    node: node_ids[i].clone(),
                    reason: "terminal node with actions".into(),
                });
            }
            if !n.is_terminal() && n.actions.is_empty() {
                return Err(GameError::BadNode {
                    node: node_ids[i].clone(),
                    reason: "non-terminal node without actions".into(),
                });
            }
            let mut labels: Vec<&str> = n.actions.iter().map(|a| a.label.as_str()).collect();
            labels.sort_unstable();
            labels.dedup();
            if labels.len() != n.actions.len() {
                return Err(GameError::BadNode {
                    node: node_ids[i].clone(),
                    reason: "duplicate action label".into(),
                });
            }
            for a in &n.actions {
                if a.child.0 >= nodes.len() {
                    return Err(GameError::UnknownNode(format!("child of `{}`", node_ids[i])));
                }
                if a.child == root || seen_child[a.child.0] {
                    return Err(GameError::NotATree(format!(
                        "node `{}` has more than one parent or is the root",
                        node_ids[a.child.0]
                    )));
                }
                seen_child[a.child.0] = true;
            }
            match &n.kind {
                NodeKind::Chance { probs } => {
                    if probs.len() != n.actions.len() {
                        return Err(GameError::BadNode {
                            node: node_ids[i].clone(),
                            reason: "chance probabilities do not match actions".into(),
                        });
                    }
                    let sum: f64 = probs.iter().sum();
                    if probs.iter().any(|&p| p <= 0.0) {
                        return Err(GameError::BadNode {
                            node: node_ids[i].clone(),
                            reason: "chance probability not strictly positive".into(),
                        });
                    }
                    if (sum - 1.0).abs() > 1e-12 {
                        return Err(GameError::ChanceSum { node: node_ids[i].clone(), sum });
                    }
                }
                NodeKind::Terminal { payoffs } => {
                    if payoffs.len() != num_players {
                        return Err(GameError::BadNode {
                            node: node_ids[i].clone(),
                            reason: format!(
                                "payoff vector has length {}, expected {}",
                                payoffs.len(),
                                num_players
                            ),
                        });
                    }
                }
                NodeKind::Decision { player, infoset } => {
                    if *player == 0 || *player > num_players {
                        return Err(GameError::BadNode {
                            node: node_ids[i].clone(),
                            reason: format!("owner {player} out of range"),
                        });
                    }
                    if infoset.0 >= infosets.len() {
                        return Err(GameError::UnknownInfoset(format!(
                            "referenced by node `{}`",
                            node_ids[i]
                        )));
                    }
                }
            }
        }
        // Infoset consistency: one owner, one shared ordered action list, the
        // node's own labels in the same order, membership back-references.
        for (j, is) in infosets.iter().enumerate() {
            if is.members.is_empty() {
                return Err(GameError::BadInfoset {
                    infoset: infoset_ids[j].clone(),
                    reason: "no members".into(),
                });
            }
            for &m in &is.members {
                if m.0 >= nodes.len() {
                    return Err(GameError::UnknownNode(format!(
                        "member of infoset `{}`",
                        infoset_ids[j]
                    )));
                }
                let n = &nodes[m.0];
                match &n.kind {
                    NodeKind::Decision { player, infoset } => {
                        if *player != is.player {
                            return Err(GameError::BadInfoset {
                                infoset: infoset_ids[j].clone(),
                                reason: format!("member `{}` owned by another player", node_ids[m.0]),
                            });
                        }
                        if infoset.0 != j {
                            return Err(GameError::BadInfoset {
                                infoset: infoset_ids[j].clone(),
                                reason: format!(
                                    "member `{}` references a different infoset",
                                    node_ids[m.0]
                                ),
                            });
                        }
                    }
                    _ => {
                        return Err(GameError::BadInfoset {
                            infoset: infoset_ids[j].clone(),
                            reason: format!("member `{}` is not a decision node", node_ids[m.0]),
                        });
                    }
                }
                let labels: Vec<&str> = n.actions.iter().map(|a| a.label.as_str()).collect();
                if labels.len() != is.actions.len()
                    || labels.iter().zip(&is.actions).any(|(a, b)| a != b)
                {
                    return Err(GameError::BadInfoset {
                        infoset: infoset_ids[j].clone(),
                        reason: format!("member `{}` has a different action list", node_ids[m.0]),
                    });
                }
            }
            let mut sorted = is.members.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != is.members.len() {
                return Err(GameError::BadInfoset {
                    infoset: infoset_ids[j].clone(),
                    reason: "duplicate member".into(),
                });
            }
        }
        // Every decision node must be listed in its infoset.
        for (i, n) in nodes.iter().enumerate() {
            if let NodeKind::Decision { infoset, .. } = n.kind {
                if !infosets[infoset.0].members.contains(&NodeId(i)) {
                    return Err(GameError::BadInfoset {
                        infoset: infoset_ids[infoset.0].clone(),
                        reason: format!("node `{}` not listed among members", node_ids[i]),
                    });
                }
            }
        }

        let mut game = Game {
            num_players,
            root,
            nodes,
            node_ids,
            infosets,
            infoset_ids,
            topo: Vec::new(),
            terminals: Vec::new(),
            player_infosets: vec![Vec::new(); num_players],
            after: Vec::new(),
            tin: Vec::new(),
            tout: Vec::new(),
            payoff_scale: 0.0,
        };
        game.finish()?;
        Ok(game)
    }

    /// Fills derived structure: preorder, depths, parent links, Euler
    /// intervals, terminal list, per-player infoset lists, the after-relation
    /// and the payoff scale.
    fn finish(&mut self) -> Result<(), GameError> {
        let n = self.nodes.len();
        self.tin = vec![0; n];
        self.tout = vec![0; n];
        self.topo.clear();
        self.terminals.clear();

        for node in &mut self.nodes {
            node.parent = None;
            node.depth = 0;
        }
        // Iterative DFS from the root; also sets parents and depths.
        let mut clock = 0usize;
        let mut stack = vec![(self.root, false)];
        let mut visited = vec![false; n];
        while let Some((v, done)) = stack.pop() {
            if done {
                self.tout[v.0] = clock;
                continue;
            }
            if visited[v.0] {
                return Err(GameError::NotATree(format!(
                    "cycle through `{}`",
                    self.node_ids[v.0]
                )));
            }
            visited[v.0] = true;
            self.tin[v.0] = clock;
            clock += 1;
            self.topo.push(v);
            stack.push((v, true));
            let children: Vec<(NodeId, usize)> = self.nodes[v.0]
                .actions
                .iter()
                .enumerate()
                .map(|(k, a)| (a.child, k))
                .collect();
            for (c, k) in children.iter().rev() {
                self.nodes[c.0].parent = Some((v, *k));
                self.nodes[c.0].depth = self.nodes[v.0].depth + 1;
                stack.push((*c, false));
            }
        }
        if visited.iter().any(|&b| !b) {
            return Err(GameError::NotATree("unreachable nodes present".into()));
        }

        for &v in &self.topo {
            if self.nodes[v.0].is_terminal() {
                self.terminals.push(v);
            }
        }

        for p in &mut self.player_infosets {
            p.clear();
        }
        for (j, is) in self.infosets.iter().enumerate() {
            self.player_infosets[is.player - 1].push(InfosetId(j));
        }

        // Members may not be nested (implied by perfect recall, enforced
        // structurally so kernels stay well-defined).
        for (j, is) in self.infosets.iter().enumerate() {
            for &a in &is.members {
                for &b in &is.members {
                    if a != b && self.is_ancestor_or_self(a, b) {
                        return Err(GameError::BadInfoset {
                            infoset: self.infoset_ids[j].clone(),
                            reason: format!(
                                "member {} is a prefix of member {}",
                                self.history_string(a),
                                self.history_string(b)
                            ),
                        });
                    }
                }
            }
        }

        self.after = (0..self.infosets.len())
            .map(|j| {
                let i = self.infosets[j].player;
                self.player_infosets[i - 1]
                    .iter()
                    .copied()
                    .filter(|&q| {
                        q != InfosetId(j)
                            && self.infosets[q.0].members.iter().any(|&mq| {
                                self.infosets[j].members.iter().any(|&mj| {
                                    mj != mq && self.is_ancestor_or_self(mj, mq)
                                })
                            })
                    })
                    .collect()
            })
            .collect();

        self.payoff_scale = self
            .terminals
            .iter()
            .flat_map(|&t| match &self.nodes[t.0].kind {
                NodeKind::Terminal { payoffs } => payoffs.iter(),
                _ => unreachable!(),
            })
            .fold(0.0f64, |m, &u| m.max(u.abs()));
        Ok(())
    }
}

/// One step of a player's experience: the infoset seen and the action taken.
pub type ExperienceStep = (InfosetId, usize);

/// The record of a player's experience along the history of a node: the
/// (infoset, action) pairs encountered strictly before it, plus the final
/// infoset when the node is the player's own decision node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Experience {
    pub steps: Vec<ExperienceStep>,
    pub at: Option<InfosetId>,
}

pub fn experience_sequence(game: &Game, player: Player, node: NodeId) -> Experience {
    let mut steps = Vec::new();
    let mut cur = node;
    while let Some((p, k)) = game.node(cur).parent {
        if game.node(p).player() == Some(player) {
            steps.push((game.node(p).infoset().unwrap(), k));
        }
        cur = p;
    }
    steps.reverse();
    let at = if game.node(node).player() == Some(player) {
        game.node(node).infoset()
    } else {
        None
    };
    Experience { steps, at }
}

/// A perfect-recall violation: two members of one infoset with different
/// owner experience.
#[derive(Debug, Clone)]
pub struct RecallViolation {
    pub infoset: InfosetId,
    pub member_a: NodeId,
    pub member_b: NodeId,
}

/// Empty iff every infoset's members share one owner experience sequence.
pub fn validate_perfect_recall(game: &Game) -> Vec<RecallViolation> {
    let mut out = Vec::new();
    for j in game.infoset_ids() {
        let is = game.infoset(j);
        let reference = experience_sequence(game, is.player, is.members[0]);
        for &m in &is.members[1..] {
            let e = experience_sequence(game, is.player, m);
            if e.steps != reference.steps {
                out.push(RecallViolation { infoset: j, member_a: is.members[0], member_b: m });
            }
        }
    }
    out
}

/// Subgame structure: which nodes head subgames and where kernel products
/// restart.
#[derive(Debug, Clone)]
pub struct SubgameIndex {
    /// Sorted by preorder position.
    pub subgame_roots: Vec<NodeId>,
    is_root: Vec<bool>,
    node_to_root: Vec<NodeId>,
    /// Per infoset: root of the smallest subgame containing its action set.
    infoset_root: Vec<NodeId>,
    /// Per infoset, per member: node at which the member's own-excluded
    /// kernel product starts (smallest subgame containing the last action).
    member_kernel_root: Vec<Vec<NodeId>>,
}

impl SubgameIndex {
    pub fn is_subgame_root(&self, node: NodeId) -> bool {
        self.is_root[node.0]
    }
    /// Nearest ancestor-or-self subgame root.
    pub fn node_to_root(&self, node: NodeId) -> NodeId {
        self.node_to_root[node.0]
    }
    /// Root of the smallest subgame containing the infoset's actions; the
    /// full-factor kernel of that infoset starts here.
    pub fn infoset_root(&self, infoset: InfosetId) -> NodeId {
        self.infoset_root[infoset.0]
    }
    /// Start node of the own-excluded kernel for one member history.
    pub fn member_kernel_root(&self, infoset: InfosetId, member_index: usize) -> NodeId {
        self.member_kernel_root[infoset.0][member_index]
    }
}

/// Finds all subgame roots and kernel restart points.
///
/// A node heads a subgame iff it is the root, a chance node, or a decision
/// node in a singleton infoset, and every infoset intersecting its subtree
/// lies entirely within the subtree.
pub fn subgame_decomposition(game: &Game) -> SubgameIndex {
    let n = game.num_nodes();
    let mut is_root = vec![false; n];
    for &v in game.preorder() {
        let node = game.node(v);
        let candidate = v == game.root()
            || node.is_chance()
            || node
                .infoset()
                .is_some_and(|j| game.infoset(j).members.len() == 1);
        if !candidate {
            continue;
        }
        let closed = game.infoset_ids().all(|j| {
            let members = &game.infoset(j).members;
            let inside = members.iter().filter(|&&m| game.is_ancestor_or_self(v, m)).count();
            inside == 0 || inside == members.len()
        });
        if closed {
            is_root[v.0] = true;
        }
    }
    debug_assert!(is_root[game.root().0]);

    let mut node_to_root = vec![game.root(); n];
    for &v in game.preorder() {
        if is_root[v.0] {
            node_to_root[v.0] = v;
        } else if let Some((p, _)) = game.node(v).parent {
            node_to_root[v.0] = node_to_root[p.0];
        }
    }

    let mut infoset_root = Vec::with_capacity(game.num_infosets());
    let mut member_kernel_root = Vec::with_capacity(game.num_infosets());
    for j in game.infoset_ids() {
        let members = &game.infoset(j).members;
        let r = node_to_root[members[0].0];
        // Subgame closure puts all members of an infoset under one root.
        debug_assert!(members.iter().all(|&m| node_to_root[m.0] == r));
        infoset_root.push(r);
        member_kernel_root.push(
            members
                .iter()
                .map(|&m| match game.node(m).parent {
                    Some((p, _)) => node_to_root[p.0],
                    None => m,
                })
                .collect(),
        );
    }

    let subgame_roots = game
        .preorder()
        .iter()
        .copied()
        .filter(|v| is_root[v.0])
        .collect();
    SubgameIndex { subgame_roots, is_root, node_to_root, infoset_root, member_kernel_root }
}
