//! Behavioral strategy profiles and belief systems: one probability vector
//! per infoset (over actions, respectively over member histories).

use std::collections::BTreeMap;

use crate::error::SolveError;
use crate::game::{Game, InfosetId};

pub const SIMPLEX_TOL: f64 = 1e-10;

/// One probability vector over each infoset's actions.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorProfile {
    rows: Vec<Vec<f64>>,
}

/// One probability vector over each infoset's member histories.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSystem {
    rows: Vec<Vec<f64>>,
}

macro_rules! simplex_rows {
    ($ty:ident) => {
        impl $ty {
            pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
                Self { rows }
            }
            pub fn rows(&self) -> &[Vec<f64>] {
                &self.rows
            }
            pub fn row(&self, infoset: InfosetId) -> &[f64] {
                &self.rows[infoset.0]
            }
            pub fn row_mut(&mut self, infoset: InfosetId) -> &mut Vec<f64> {
                &mut self.rows[infoset.0]
            }
            pub fn set_row(&mut self, infoset: InfosetId, row: Vec<f64>) {
                self.rows[infoset.0] = row;
            }
            /// Largest simplex defect over rows: negativity or |sum - 1|.
            pub fn simplex_defect(&self) -> f64 {
                self.rows.iter().fold(0.0f64, |acc, row| {
                    let neg = row.iter().fold(0.0f64, |m, &x| m.max(-x));
                    let sum: f64 = row.iter().sum();
                    acc.max(neg).max((sum - 1.0).abs())
                })
            }
            pub fn is_valid(&self) -> bool {
                self.simplex_defect() <= SIMPLEX_TOL
            }
            pub fn is_interior(&self) -> bool {
                self.rows.iter().all(|row| row.iter().all(|&x| x > 0.0))
                    && self.simplex_defect() <= SIMPLEX_TOL
            }
        }
    };
}

simplex_rows!(BehaviorProfile);
simplex_rows!(BeliefSystem);

impl BehaviorProfile {
    pub fn uniform(game: &Game) -> Self {
        Self {
            rows: game
                .infoset_ids()
                .map(|j| {
                    let k = game.infoset(j).actions.len();
                    vec![1.0 / k as f64; k]
                })
                .collect(),
        }
    }

    /// Probability of the action at the infoset.
    pub fn prob(&self, infoset: InfosetId, action: usize) -> f64 {
        self.rows[infoset.0][action]
    }

    /// Builds a profile from per-infoset rows keyed by infoset name.
    /// Every infoset must be covered and every row must match its action count.
    pub fn from_named_rows(
        game: &Game,
        named: &BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, SolveError> {
        let mut rows = vec![Vec::new(); game.num_infosets()];
        for (name, row) in named {
            let id = game
                .infoset_by_name(name)
                .ok_or_else(|| SolveError::DimensionMismatch(format!("unknown infoset `{name}`")))?;
            if row.len() != game.infoset(id).actions.len() {
                return Err(SolveError::DimensionMismatch(format!(
                    "infoset `{name}` expects {} probabilities, got {}",
                    game.infoset(id).actions.len(),
                    row.len()
                )));
            }
            rows[id.0] = row.clone();
        }
        for j in game.infoset_ids() {
            if rows[j.0].is_empty() && !game.infoset(j).actions.is_empty() {
                return Err(SolveError::DimensionMismatch(format!(
                    "infoset `{}` missing from profile",
                    game.infoset_name(j)
                )));
            }
        }
        Ok(Self { rows })
    }

}

impl BeliefSystem {
    pub fn uniform(game: &Game) -> Self {
        Self {
            rows: game
                .infoset_ids()
                .map(|j| {
                    let k = game.infoset(j).members.len();
                    vec![1.0 / k as f64; k]
                })
                .collect(),
        }
    }

    pub fn from_named_rows(
        game: &Game,
        named: &BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, SolveError> {
        let mut beliefs = Self::uniform(game);
        for (name, row) in named {
            let id = game
                .infoset_by_name(name)
                .ok_or_else(|| SolveError::DimensionMismatch(format!("unknown infoset `{name}`")))?;
            if row.len() != game.infoset(id).members.len() {
                return Err(SolveError::DimensionMismatch(format!(
                    "infoset `{name}` expects {} belief entries, got {}",
                    game.infoset(id).members.len(),
                    row.len()
                )));
            }
            beliefs.rows[id.0] = row.clone();
        }
        Ok(beliefs)
    }
}

/// A strategy profile, its companion profile, and a belief system.
#[derive(Debug, Clone)]
pub struct Assessment {
    pub beta: BehaviorProfile,
    pub beta_tilde: BehaviorProfile,
    pub mu: BeliefSystem,
}

impl Assessment {
    pub fn is_valid(&self) -> bool {
        self.beta.is_valid() && self.beta_tilde.is_valid() && self.mu.is_valid()
    }
}
