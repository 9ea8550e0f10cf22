//! Differentiable path-following solvers.
//!
//! Two smooth homotopies connect a trivially solvable game at t = 1 to the
//! target game at t = 0: a logarithmic-barrier system traced in the strategy
//! coordinates themselves, and a convex-quadratic-penalty system traced in
//! unconstrained square-root coordinates whose positive/negative parts encode
//! complementarity. A pseudo-arclength predictor-corrector follows either
//! path until t drops below the termination level.

mod eval;
mod jacobian;
mod system;
mod tracer;

pub use jacobian::fd_jacobian;
pub use tracer::{
    PathOutcome, TraceRecord, TraceSink, VecSink, endpoint_tol, polish_endpoint, trace_path,
};

use nalgebra::DVector;

use crate::Refinement;
use crate::error::SolveError;
use crate::game::{Game, SubgameIndex};
use crate::profile::{BehaviorProfile, BeliefSystem};
use crate::reach::{infoset_reach_without_player, reach_without_player};

/// Which homotopy system is traced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Logarithmic-barrier system in simplex coordinates.
    Logm,
    /// Convex-quadratic-penalty system in square-root coordinates.
    Cqpm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Logm => write!(f, "logm"),
            Method::Cqpm => write!(f, "cqpm"),
        }
    }
}

/// Squared positive part; pairs with `phi_neg` to encode complementarity
/// smoothly: `phi_pos(v) * phi_neg(v) = 0` for every v.
pub fn phi_pos(v: f64) -> f64 {
    let p = v.max(0.0);
    p * p
}

/// Squared negative part.
pub fn phi_neg(v: f64) -> f64 {
    let m = v.min(0.0);
    m * m
}

/// Solver parameters. The step and accuracy schedules follow
/// `step_c * 10^(p * ln t)` with the exponents below; the trace terminates
/// once t falls under `t_min`.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub beta0: BehaviorProfile,
    pub beta_tilde0: BehaviorProfile,
    /// Per-infoset positive vectors with per-infoset sums below one; they
    /// shape the interior perturbation.
    pub eta0: Vec<Vec<f64>>,
    /// Generic perturbation subtracted as t(1-t) * alpha; zero by default.
    pub alpha: Option<Vec<f64>>,
    pub step_c: f64,
    pub step_p: f64,
    pub corr_p: f64,
    pub t_min: f64,
    pub max_iters: usize,
    pub newton_max: usize,
    /// Refine the endpoint by a projected Newton step on the exact system.
    pub polish: bool,
    pub time_limit: Option<std::time::Duration>,
}

impl SolverConfig {
    /// Uniform interior start profiles and eta vectors summing to 1/2.
    pub fn uniform(game: &Game) -> Self {
        let eta0 = game
            .infoset_ids()
            .map(|j| {
                let k = game.infoset(j).actions.len();
                vec![1.0 / (2.0 * k as f64); k]
            })
            .collect();
        SolverConfig {
            beta0: BehaviorProfile::uniform(game),
            beta_tilde0: BehaviorProfile::uniform(game),
            eta0,
            alpha: None,
            step_c: 0.1,
            step_p: 0.2,
            corr_p: 0.5,
            t_min: 1e-5,
            max_iters: 100_000,
            newton_max: 20,
            polish: false,
            time_limit: None,
        }
    }

    pub fn validate(&self, game: &Game) -> Result<(), SolveError> {
        if !self.beta0.is_interior() || !self.beta_tilde0.is_interior() {
            return Err(SolveError::DimensionMismatch(
                "start profiles must be strictly interior".into(),
            ));
        }
        for j in game.infoset_ids() {
            let row = &self.eta0[j.0];
            if row.len() != game.infoset(j).actions.len() {
                return Err(SolveError::DimensionMismatch(format!(
                    "eta0 at `{}` has the wrong length",
                    game.infoset_name(j)
                )));
            }
            let tau: f64 = row.iter().sum();
            if row.iter().any(|&x| x <= 0.0) || tau >= 1.0 {
                return Err(SolveError::DimensionMismatch(format!(
                    "eta0 at `{}` must be positive with sum below one",
                    game.infoset_name(j)
                )));
            }
        }
        if !(self.t_min > 0.0 && self.t_min < 1.0) {
            return Err(SolveError::DimensionMismatch("t_min must lie in (0, 1)".into()));
        }
        if let Some(alpha) = &self.alpha {
            if alpha.len() != Layout::new(game).dim {
                return Err(SolveError::DimensionMismatch(
                    "alpha length must equal the system dimension".into(),
                ));
            }
        }
        Ok(())
    }

    /// Predictor step-size schedule at parameter t.
    pub fn step_schedule(&self, t: f64) -> f64 {
        self.step_c * 10f64.powf(self.step_p * t.ln())
    }

    /// Corrector accuracy schedule at parameter t.
    pub fn corrector_tol(&self, t: f64) -> f64 {
        self.step_c * 10f64.powf(self.corr_p * t.max(self.t_min * 1e-3).ln())
    }
}

/// Coordinate layout of the unknown vector: all strategy rows, all companion
/// rows, all belief rows, all auxiliary mass rows, each ordered by infoset
/// (sorted by id) then by action or member index.
#[derive(Debug, Clone)]
pub struct Layout {
    pub beta_off: Vec<usize>,
    pub btil_off: Vec<usize>,
    pub mu_off: Vec<usize>,
    pub xi_off: Vec<usize>,
    /// Number of action coordinates.
    pub m0: usize,
    /// Number of member coordinates.
    pub p0: usize,
    pub dim: usize,
}

impl Layout {
    pub fn new(game: &Game) -> Self {
        let mut beta_off = Vec::with_capacity(game.num_infosets());
        let mut mu_rel = Vec::with_capacity(game.num_infosets());
        let mut m0 = 0usize;
        let mut p0 = 0usize;
        for j in game.infoset_ids() {
            beta_off.push(m0);
            mu_rel.push(p0);
            m0 += game.infoset(j).actions.len();
            p0 += game.infoset(j).members.len();
        }
        let btil_off = beta_off.iter().map(|o| o + m0).collect();
        let mu_off: Vec<usize> = mu_rel.iter().map(|o| o + 2 * m0).collect();
        let xi_off = mu_rel.iter().map(|o| o + 2 * m0 + p0).collect();
        Layout { beta_off, btil_off, mu_off, xi_off, m0, p0, dim: 2 * m0 + 2 * p0 }
    }
}

/// A point on a homotopy path: the full unknown vector plus the parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyState {
    pub method: Method,
    pub refinement: Refinement,
    pub t: f64,
    pub x: DVector<f64>,
}

impl HomotopyState {
    fn rows(&self, game: &Game, offs: &[usize], lens: impl Fn(usize) -> usize, sqrt: bool) -> Vec<Vec<f64>> {
        (0..game.num_infosets())
            .map(|j| {
                (0..lens(j))
                    .map(|k| {
                        let v = self.x[offs[j] + k];
                        if sqrt { phi_pos(v) } else { v }
                    })
                    .collect()
            })
            .collect()
    }

    /// Strategy profile carried by the state (squared positive parts of the
    /// raw coordinates for the penalty method).
    pub fn beta(&self, game: &Game, layout: &Layout) -> BehaviorProfile {
        let sqrt = self.method == Method::Cqpm;
        BehaviorProfile::from_rows(self.rows(
            game,
            &layout.beta_off,
            |j| game.infoset(crate::game::InfosetId(j)).actions.len(),
            sqrt,
        ))
    }

    pub fn beta_tilde(&self, game: &Game, layout: &Layout) -> BehaviorProfile {
        let sqrt = self.method == Method::Cqpm;
        BehaviorProfile::from_rows(self.rows(
            game,
            &layout.btil_off,
            |j| game.infoset(crate::game::InfosetId(j)).actions.len(),
            sqrt,
        ))
    }

    pub fn mu(&self, game: &Game, layout: &Layout) -> BeliefSystem {
        BeliefSystem::from_rows(self.rows(
            game,
            &layout.mu_off,
            |j| game.infoset(crate::game::InfosetId(j)).members.len(),
            false,
        ))
    }

    /// Auxiliary per-member masses; they sum to t per infoset along the path.
    pub fn xi(&self, game: &Game, layout: &Layout) -> Vec<Vec<f64>> {
        let sqrt = self.method == Method::Cqpm;
        self.rows(game, &layout.xi_off, |j| game.infoset(crate::game::InfosetId(j)).members.len(), sqrt)
    }
}

/// The interior perturbation: a t-shaped mix of the profile with eta that
/// keeps rows on the simplex, is the identity at t = 0 and t = 1, and is
/// strictly interior in between.
pub fn perturb(game: &Game, profile: &BehaviorProfile, t: f64, eta0: &[Vec<f64>]) -> BehaviorProfile {
    let s = t * t * (1.0 - t * t);
    BehaviorProfile::from_rows(
        game.infoset_ids()
            .map(|j| {
                let tau: f64 = eta0[j.0].iter().sum();
                profile
                    .row(j)
                    .iter()
                    .zip(&eta0[j.0])
                    .map(|(&b, &e)| (1.0 - s * tau) * b + s * e)
                    .collect()
            })
            .collect(),
    )
}

pub(crate) fn perturb_rows(rows: &mut [Vec<f64>], t: f64, eta0: &[Vec<f64>]) {
    let s = t * t * (1.0 - t * t);
    if s == 0.0 {
        return;
    }
    for (row, eta) in rows.iter_mut().zip(eta0) {
        let tau: f64 = eta.iter().sum();
        for (b, &e) in row.iter_mut().zip(eta) {
            *b = (1.0 - s * tau) * *b + s * e;
        }
    }
}

/// The unique solution of either system at t = 1: the start profiles, the
/// kernel-proportional masses, and beliefs equal to those masses (square
/// roots of everything for the penalty method).
pub fn start_point(
    game: &Game,
    _sub: &SubgameIndex,
    config: &SolverConfig,
    method: Method,
    refinement: Refinement,
) -> HomotopyState {
    let layout = Layout::new(game);
    let mut x = DVector::zeros(layout.dim);
    let xi0 = xi_start(game, &config.beta0);
    for j in game.infoset_ids() {
        for (k, &b) in config.beta0.row(j).iter().enumerate() {
            x[layout.beta_off[j.0] + k] = if method == Method::Cqpm { b.sqrt() } else { b };
        }
        for (k, &b) in config.beta_tilde0.row(j).iter().enumerate() {
            x[layout.btil_off[j.0] + k] = if method == Method::Cqpm { b.sqrt() } else { b };
        }
        for (h, &v) in xi0[j.0].iter().enumerate() {
            x[layout.mu_off[j.0] + h] = v;
            x[layout.xi_off[j.0] + h] = if method == Method::Cqpm { v.sqrt() } else { v };
        }
    }
    HomotopyState { method, refinement, t: 1.0, x }
}

/// Normalized own-excluded kernel of the start profile; the barrier and
/// penalty anchors for the auxiliary masses.
pub(crate) fn xi_start(game: &Game, beta0: &BehaviorProfile) -> Vec<Vec<f64>> {
    game.infoset_ids()
        .map(|j| {
            let player = game.infoset(j).player;
            let mass = infoset_reach_without_player(game, beta0, j);
            game.infoset(j)
                .members
                .iter()
                .map(|&m| reach_without_player(game, beta0, player, m) / mass)
                .collect()
        })
        .collect()
}

/// Residual of the homotopy system at a state; zero exactly on the path.
pub fn residual(
    game: &Game,
    sub: &SubgameIndex,
    config: &SolverConfig,
    state: &HomotopyState,
) -> DVector<f64> {
    let layout = Layout::new(game);
    let mut sys = system::System::new(game, sub, config, state.method, state.refinement);
    let mut out = DVector::zeros(layout.dim);
    sys.eval(game, sub, state.x.as_slice(), state.t, out.as_mut_slice());
    out
}

pub(crate) use system::System;
