//! The game file format: a UTF-8 JSON document.
//!
//! ```json
//! {
//!   "num_players": 3,
//!   "root": "r",
//!   "nodes": {
//!     "r":  {"kind": "chance", "actions": [{"label": "a", "child": "x", "prob": "1/7"}, ...]},
//!     "x":  {"kind": "decision", "owner": 1, "infoset": "p1.1",
//!            "actions": [{"label": "n", "child": "t"}, ...]},
//!     "t":  {"kind": "terminal", "payoffs": [1, 3, 0]}
//!   },
//!   "infosets": {
//!     "p1.1": {"player": 1, "members": ["x", ...], "actions": ["n", "y"]}
//!   }
//! }
//! ```
//!
//! Probabilities may be JSON numbers, decimal strings, or `"p/q"` fractions.
//! Member order in `infosets` fixes the coordinate order of belief vectors;
//! node ids are kept through a round trip. Nodes and infosets are indexed
//! internally in sorted id order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::game::{Action, Game, Infoset, InfosetId, Node, NodeId, NodeKind, validate_perfect_recall};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameDoc {
    pub num_players: usize,
    pub root: String,
    pub nodes: BTreeMap<String, NodeDoc>,
    pub infosets: BTreeMap<String, InfosetDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeDoc {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub owner: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infoset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<ActionDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionDoc {
    pub label: String,
    pub child: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prob: Option<ProbValue>,
}

/// A probability written as a number, a decimal string, or `"p/q"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbValue {
    Number(f64),
    Text(String),
}

impl ProbValue {
    pub fn value(&self) -> Result<f64, GameError> {
        match self {
            ProbValue::Number(x) => Ok(*x),
            ProbValue::Text(s) => {
                if let Some((num, den)) = s.split_once('/') {
                    let n: f64 = num
                        .trim()
                        .parse()
                        .map_err(|_| GameError::BadProbability(s.clone()))?;
                    let d: f64 = den
                        .trim()
                        .parse()
                        .map_err(|_| GameError::BadProbability(s.clone()))?;
                    if d == 0.0 {
                        return Err(GameError::BadProbability(s.clone()));
                    }
                    Ok(n / d)
                } else {
                    s.trim().parse().map_err(|_| GameError::BadProbability(s.clone()))
                }
            }
        }
    }
}

/// Parses and validates a game, rejecting perfect-recall violations.
pub fn parse_game(document: &str) -> Result<Game, GameError> {
    let game = parse_game_structural(document)?;
    let report = validate_perfect_recall(&game);
    if let Some(v) = report.first() {
        return Err(GameError::PerfectRecall(game.infoset_name(v.infoset).to_string()));
    }
    Ok(game)
}

/// Parses a game enforcing the structural invariants only; perfect recall is
/// left to `validate_perfect_recall`. The `validate` command uses this to
/// report violations instead of failing outright.
pub fn parse_game_structural(document: &str) -> Result<Game, GameError> {
    let doc: GameDoc =
        serde_json::from_str(document).map_err(|e| GameError::Syntax(e.to_string()))?;
    game_from_doc(&doc)
}

pub fn game_from_doc(doc: &GameDoc) -> Result<Game, GameError> {
    let node_ids: Vec<String> = doc.nodes.keys().cloned().collect();
    let infoset_ids: Vec<String> = doc.infosets.keys().cloned().collect();
    let node_index = |id: &str| -> Result<NodeId, GameError> {
        node_ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .map(NodeId)
            .map_err(|_| GameError::UnknownNode(id.to_string()))
    };
    let infoset_index = |id: &str| -> Result<InfosetId, GameError> {
        infoset_ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .map(InfosetId)
            .map_err(|_| GameError::UnknownInfoset(id.to_string()))
    };

    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for (id, nd) in &doc.nodes {
        let actions = nd
            .actions
            .as_ref()
            .map(|list| {
                list.iter()
                    .map(|a| {
                        Ok(Action { label: a.label.clone(), child: node_index(&a.child)? })
                    })
                    .collect::<Result<Vec<_>, GameError>>()
            })
            .transpose()?
            .unwrap_or_default();
        let kind = match nd.kind.as_str() {
            "terminal" => NodeKind::Terminal {
                payoffs: nd.payoffs.clone().ok_or_else(|| GameError::BadNode {
                    node: id.clone(),
                    reason: "terminal node without payoffs".into(),
                })?,
            },
            "chance" => {
                let list = nd.actions.as_ref().ok_or_else(|| GameError::BadNode {
                    node: id.clone(),
                    reason: "chance node without actions".into(),
                })?;
                let probs = list
                    .iter()
                    .map(|a| {
                        a.prob
                            .as_ref()
                            .ok_or_else(|| GameError::BadNode {
                                node: id.clone(),
                                reason: format!("missing prob on action `{}`", a.label),
                            })?
                            .value()
                    })
                    .collect::<Result<Vec<_>, GameError>>()?;
                NodeKind::Chance { probs }
            }
            "decision" => NodeKind::Decision {
                player: nd.owner.ok_or_else(|| GameError::BadNode {
                    node: id.clone(),
                    reason: "decision node without owner".into(),
                })?,
                infoset: infoset_index(nd.infoset.as_deref().ok_or_else(|| {
                    GameError::BadNode { node: id.clone(), reason: "decision node without infoset".into() }
                })?)?,
            },
            other => {
                return Err(GameError::BadNode {
                    node: id.clone(),
                    reason: format!("unknown kind `{other}`"),
                });
            }
        };
        nodes.push(Node { kind, actions, parent: None, depth: 0 });
    }

    let mut infosets = Vec::with_capacity(doc.infosets.len());
    for (id, isd) in &doc.infosets {
        let members = isd
            .members
            .iter()
            .map(|m| node_index(m))
            .collect::<Result<Vec<_>, GameError>>()
            .map_err(|e| match e {
                GameError::UnknownNode(n) => GameError::BadInfoset {
                    infoset: id.clone(),
                    reason: format!("unknown member `{n}`"),
                },
                e => e,
            })?;
        infosets.push(Infoset { player: isd.player, members, actions: isd.actions.clone() });
    }

    let root = node_index(&doc.root)?;
    Game::from_parts(doc.num_players, root, nodes, node_ids, infosets, infoset_ids)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfosetDoc {
    pub player: usize,
    pub members: Vec<String>,
    pub actions: Vec<String>,
}

pub fn game_to_doc(game: &Game) -> GameDoc {
    let mut nodes = BTreeMap::new();
    for v in game.node_ids() {
        let n = game.node(v);
        let actions = if n.actions.is_empty() {
            None
        } else {
            Some(
                n.actions
                    .iter()
                    .enumerate()
                    .map(|(k, a)| ActionDoc {
                        label: a.label.clone(),
                        child: game.node_name(a.child).to_string(),
                        prob: match &n.kind {
                            NodeKind::Chance { probs } => Some(ProbValue::Number(probs[k])),
                            _ => None,
                        },
                    })
                    .collect(),
            )
        };
        let doc = match &n.kind {
            NodeKind::Terminal { payoffs } => NodeDoc {
                kind: "terminal".into(),
                owner: None,
                infoset: None,
                actions: None,
                payoffs: Some(payoffs.clone()),
            },
            NodeKind::Chance { .. } => NodeDoc {
                kind: "chance".into(),
                owner: None,
                infoset: None,
                actions,
                payoffs: None,
            },
            NodeKind::Decision { player, infoset } => NodeDoc {
                kind: "decision".into(),
                owner: Some(*player),
                infoset: Some(game.infoset_name(*infoset).to_string()),
                actions,
                payoffs: None,
            },
        };
        nodes.insert(game.node_name(v).to_string(), doc);
    }
    let mut infosets = BTreeMap::new();
    for j in game.infoset_ids() {
        let is = game.infoset(j);
        infosets.insert(
            game.infoset_name(j).to_string(),
            InfosetDoc {
                player: is.player,
                members: is.members.iter().map(|&m| game.node_name(m).to_string()).collect(),
                actions: is.actions.clone(),
            },
        );
    }
    GameDoc {
        num_players: game.num_players(),
        root: game.node_name(game.root()).to_string(),
        nodes,
        infosets,
    }
}

/// Serializes a game; `parse_game(serialize_game(g))` reproduces `g`.
pub fn serialize_game(game: &Game) -> String {
    serde_json::to_string_pretty(&game_to_doc(game)).expect("game serialization cannot fail")
}

/// Structural equality of two games, id-for-id.
pub fn games_equal(a: &Game, b: &Game) -> bool {
    if a.num_players() != b.num_players() || a.num_nodes() != b.num_nodes() {
        return false;
    }
    if a.node_name(a.root()) != b.node_name(b.root()) {
        return false;
    }
    for v in a.node_ids() {
        let Some(w) = b.node_by_name(a.node_name(v)) else { return false };
        let (na, nb) = (a.node(v), b.node(w));
        let same_kind = match (&na.kind, &nb.kind) {
            (NodeKind::Terminal { payoffs: x }, NodeKind::Terminal { payoffs: y }) => x == y,
            (NodeKind::Chance { probs: x }, NodeKind::Chance { probs: y }) => x == y,
            (
                NodeKind::Decision { player: p, infoset: i },
                NodeKind::Decision { player: q, infoset: j },
            ) => p == q && a.infoset_name(*i) == b.infoset_name(*j),
            _ => false,
        };
        if !same_kind || na.actions.len() != nb.actions.len() {
            return false;
        }
        for (x, y) in na.actions.iter().zip(&nb.actions) {
            if x.label != y.label || a.node_name(x.child) != b.node_name(y.child) {
                return false;
            }
        }
    }
    if a.num_infosets() != b.num_infosets() {
        return false;
    }
    for i in a.infoset_ids() {
        let Some(j) = b.infoset_by_name(a.infoset_name(i)) else { return false };
        let (ia, ib) = (a.infoset(i), b.infoset(j));
        if ia.player != ib.player || ia.actions != ib.actions {
            return false;
        }
        if ia.members.len() != ib.members.len() {
            return false;
        }
        for (x, y) in ia.members.iter().zip(&ib.members) {
            if a.node_name(*x) != b.node_name(*y) {
                return false;
            }
        }
    }
    true
}
