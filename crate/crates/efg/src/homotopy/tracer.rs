//! Pseudo-arclength predictor-corrector tracing of the homotopy paths.
//!
//! The augmented system treats t as one more unknown; the tangent is the
//! null direction of the augmented Jacobian oriented by continuity (toward
//! decreasing t at the start), the predictor is an Euler step along it, and
//! the corrector is Newton on the residual plus the arclength hyperplane
//! constraint. Step sizes follow the t-dependent schedule, halve on
//! corrector failures, and double after three consecutive one-shot
//! corrections. The trace stops once t falls below the termination level.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::Refinement;
use crate::belief::{Fill, solve_beliefs};
use crate::error::SolveError;
use crate::game::{Game, InfosetId, SubgameIndex};
use crate::homotopy::jacobian::fd_jacobian;
use crate::homotopy::{HomotopyState, Layout, Method, SolverConfig, System, start_point, xi_start};
use crate::payoff::{conditional_payoff, payoff_through, splice, subgame_conditional_payoff};
use crate::profile::{Assessment, BehaviorProfile, BeliefSystem};
use crate::verify::{check_nash, check_sgpe};

/// One accepted point on a traced path.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub iter: usize,
    pub t: f64,
    pub step: f64,
    pub corrector_iters: usize,
    pub residual_norm: f64,
    pub state: HomotopyState,
}

/// Receives every accepted point in order.
pub trait TraceSink {
    fn accepted(&mut self, record: &TraceRecord);
}

/// Collects the whole path in memory.
#[derive(Debug, Default)]
pub struct VecSink {
    pub records: Vec<TraceRecord>,
}

impl TraceSink for VecSink {
    fn accepted(&mut self, record: &TraceRecord) {
        self.records.push(record.clone());
    }
}

/// A finished trace: the equilibrium candidate and its companions, with the
/// raw final state for diagnosis.
#[derive(Debug, Clone)]
pub struct PathOutcome {
    pub beta: BehaviorProfile,
    pub beta_tilde: BehaviorProfile,
    pub mu: BeliefSystem,
    pub iterations: usize,
    pub final_t: f64,
    pub final_state: HomotopyState,
    pub polished: bool,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Solves for the unit tangent of the augmented system, oriented along the
/// previous tangent.
fn tangent(
    jac: &DMatrix<f64>,
    prev: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>, SolveError> {
    let n = jac.nrows();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n + 1)).copy_from(jac);
    a.row_mut(n).copy_from(&prev.transpose());
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let solved = a
        .clone()
        .lu()
        .solve(&rhs)
        .or_else(|| a.col_piv_qr().solve(&rhs))
        .ok_or(SolveError::SingularTangent { t })?;
    let norm = solved.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(SolveError::SingularTangent { t });
    }
    Ok(solved / norm)
}

/// Strict positivity of the barrier coordinates, at working precision.
///
/// On the barrier path every strategy coordinate satisfies
/// `beta(a) = t beta0(a) / (t + (1-t)(ubar - u(a)))`, so it stays above
/// `t beta0(a) / (t + 2(1-t) scale)`; masses stay at `t xi0(h)`. The check
/// uses a small fraction of those bounds, which rejects states that have
/// drifted onto a spurious boundary branch while never rejecting points
/// near the true path.
fn logm_positive(layout: &Layout, x: &[f64], t: f64, floor_coeff: f64) -> bool {
    let floor = floor_coeff * t.max(0.0);
    let strategies = &x[0..2 * layout.m0];
    let masses = &x[2 * layout.m0 + layout.p0..layout.dim];
    strategies.iter().all(|&v| v > floor) && masses.iter().all(|&v| v > floor)
}

/// Conservative coefficient for the on-path positivity floor.
fn positivity_floor_coeff(game: &Game, config: &SolverConfig) -> f64 {
    let mut anchor_min = f64::INFINITY;
    for j in game.infoset_ids() {
        for &v in config.beta0.row(j).iter().chain(config.beta_tilde0.row(j)) {
            anchor_min = anchor_min.min(v);
        }
    }
    for row in xi_start(game, &config.beta0) {
        for v in row {
            anchor_min = anchor_min.min(v);
        }
    }
    1e-3 * anchor_min / (1.0 + 2.0 * (1.0 + game.payoff_scale()))
}

struct Corrected {
    y: DVector<f64>,
    iters: usize,
    residual_norm: f64,
}

#[allow(clippy::too_many_arguments)]
fn correct(
    sys: &mut System,
    game: &Game,
    sub: &SubgameIndex,
    config: &SolverConfig,
    method: Method,
    layout: &Layout,
    floor_coeff: f64,
    y_pred: &DVector<f64>,
    tau: &DVector<f64>,
) -> Option<Corrected> {
    let n = layout.dim;
    let mut y = y_pred.clone();
    let mut f = vec![0.0; n];
    sys.eval(game, sub, &y.as_slice()[..n], y[n], &mut f);
    if !all_finite(&f) {
        return None;
    }
    let mut fnorm = inf_norm(&f);
    for it in 0..=config.newton_max {
        // At least one corrective iteration per step unless the point is
        // already deep inside the tolerance: accepting raw predictor points
        // lets the trace drift through the tolerance tube and off the path.
        let tol = config.corrector_tol(y[n].max(config.t_min * 1e-3));
        if fnorm <= 0.01 * tol || (it >= 1 && fnorm <= tol) {
            let ok = y[n] > 0.0
                && all_finite(y.as_slice())
                && (method != Method::Logm
                    || logm_positive(layout, &y.as_slice()[..n], y[n], floor_coeff));
            return if ok { Some(Corrected { y, iters: it, residual_norm: fnorm }) } else { None };
        }
        if it == config.newton_max {
            return None;
        }
        let mut eval = |v: &[f64], out: &mut [f64]| {
            sys.eval(game, sub, &v[..n], v[n], out);
        };
        let jac = fd_jacobian(&mut eval, y.as_slice(), n);
        let mut a = DMatrix::zeros(n + 1, n + 1);
        a.view_mut((0, 0), (n, n + 1)).copy_from(&jac);
        a.row_mut(n).copy_from(&tau.transpose());
        let mut rhs = DVector::zeros(n + 1);
        for (r, &fv) in f.iter().enumerate() {
            rhs[r] = -fv;
        }
        rhs[n] = -(&y - y_pred).dot(tau);
        let delta = a.lu().solve(&rhs)?;
        // Fraction-to-boundary: keep the barrier coordinates strictly
        // positive by shortening steps that would cross zero.
        let mut scale = 1.0;
        if method == Method::Logm {
            let positive = |k: usize| k < 2 * layout.m0 || k >= 2 * layout.m0 + layout.p0;
            for k in (0..n).filter(|&k| positive(k)) {
                if delta[k] < 0.0 {
                    let limit = -0.95 * y[k] / delta[k];
                    if limit < scale {
                        scale = limit;
                    }
                }
            }
            if !(scale.is_finite() && scale > 1e-8) {
                return None;
            }
        }
        // Damped update: halve the step while the residual grows.
        let mut improved = false;
        for _ in 0..=8 {
            let candidate = &y + scale * &delta;
            let mut f_new = vec![0.0; n];
            sys.eval(game, sub, &candidate.as_slice()[..n], candidate[n], &mut f_new);
            let new_norm = inf_norm(&f_new);
            if all_finite(&f_new) && new_norm < fnorm {
                y = candidate;
                f = f_new;
                fnorm = new_norm;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            return None;
        }
    }
    None
}

/// Traces the chosen homotopy from its t = 1 start point until t < t_min.
/// Every accepted point goes to the sink; the returned profile is the
/// strategy part of the final state, optionally polished on the exact
/// system.
pub fn trace_path(
    game: &Game,
    sub: &SubgameIndex,
    config: &SolverConfig,
    method: Method,
    refinement: Refinement,
    mut sink: Option<&mut dyn TraceSink>,
) -> Result<PathOutcome, SolveError> {
    config.validate(game)?;
    let layout = Layout::new(game);
    let n = layout.dim;
    let mut sys = System::new(game, sub, config, method, refinement);
    let start = start_point(game, sub, config, method, refinement);
    let floor_coeff = positivity_floor_coeff(game, config);

    let mut y = DVector::zeros(n + 1);
    y.rows_mut(0, n).copy_from(&start.x);
    y[n] = 1.0;

    let mut prev_tau = DVector::zeros(n + 1);
    prev_tau[n] = -1.0;
    let mut h = config.step_schedule(1.0);
    let mut iterations = 0usize;
    let mut oneshot_streak = 0usize;
    let clock = Instant::now();

    loop {
        let t = y[n];
        if t < config.t_min {
            break;
        }
        if iterations >= config.max_iters {
            return Err(SolveError::MaxIterations { max_iters: config.max_iters, t });
        }
        if let Some(limit) = config.time_limit {
            if clock.elapsed() > limit {
                return Err(SolveError::Timeout { t, iterations });
            }
        }

        let mut eval = |v: &[f64], out: &mut [f64]| {
            sys.eval(game, sub, &v[..n], v[n], out);
        };
        let jac = fd_jacobian(&mut eval, y.as_slice(), n);
        let tau = tangent(&jac, &prev_tau, t)?;

        h = h.min(config.step_schedule(t));
        let mut halvings = 0usize;
        let corrected = loop {
            if h < 1e-14 {
                return Err(SolveError::StepUnderflow { step: h, t });
            }
            let y_pred = &y + h * &tau;
            match correct(&mut sys, game, sub, config, method, &layout, floor_coeff, &y_pred, &tau)
            {
                Some(c) => break c,
                None => {
                    halvings += 1;
                    if halvings > 12 {
                        return Err(SolveError::StepUnderflow { step: h, t });
                    }
                    h *= 0.5;
                }
            }
        };

        iterations += 1;
        y = corrected.y;
        prev_tau = tau;
        if let Some(s) = sink.as_deref_mut() {
            let state = HomotopyState { method, refinement, t: y[n], x: y.rows(0, n).into() };
            s.accepted(&TraceRecord {
                iter: iterations,
                t: y[n],
                step: h,
                corrector_iters: corrected.iters,
                residual_norm: corrected.residual_norm,
                state,
            });
        }
        if corrected.iters <= 1 {
            oneshot_streak += 1;
        } else {
            oneshot_streak = 0;
        }
        if oneshot_streak >= 3 {
            h *= 2.0;
            oneshot_streak = 0;
        }
        h = h.min(config.step_schedule(y[n].max(config.t_min * 1e-3)));
    }

    let final_state = HomotopyState { method, refinement, t: y[n], x: y.rows(0, n).into() };
    let mut beta = final_state.beta(game, &layout);
    let mut beta_tilde = final_state.beta_tilde(game, &layout);
    let mut mu = final_state.mu(game, &layout);
    sanitize(&mut beta);
    sanitize(&mut beta_tilde);
    sanitize_beliefs(&mut mu);

    let mut polished = false;
    if config.polish {
        if let Some((pb, pt, pm)) = polish_endpoint(game, sub, refinement, &beta, &beta_tilde) {
            let tol = endpoint_tol(game, config);
            let raw = assess_residual(game, sub, refinement, &beta, &beta_tilde, &mu, tol);
            let pol = assess_residual(game, sub, refinement, &pb, &pt, &pm, tol);
            if pol <= raw {
                beta = pb;
                beta_tilde = pt;
                mu = pm;
                polished = true;
            }
        }
    }

    Ok(PathOutcome {
        beta,
        beta_tilde,
        mu,
        iterations,
        final_t: final_state.t,
        final_state,
        polished,
    })
}

/// Endpoint verification tolerance: path endpoints carry noise on the order
/// of the termination level times the payoff scale.
pub fn endpoint_tol(game: &Game, config: &SolverConfig) -> f64 {
    (10.0 * config.t_min * (1.0 + game.payoff_scale())).max(1e-5)
}

fn assess_residual(
    game: &Game,
    sub: &SubgameIndex,
    refinement: Refinement,
    beta: &BehaviorProfile,
    beta_tilde: &BehaviorProfile,
    mu: &BeliefSystem,
    tol: f64,
) -> f64 {
    let a = Assessment { beta: beta.clone(), beta_tilde: beta_tilde.clone(), mu: mu.clone() };
    let report = match refinement {
        Refinement::Nash => check_nash(game, sub, &a, tol),
        Refinement::Sgpe => check_sgpe(game, sub, &a, tol),
    };
    report.map(|r| r.max_residual).unwrap_or(f64::INFINITY)
}

fn sanitize(profile: &mut BehaviorProfile) {
    for j in 0..profile.rows().len() {
        clamp_row(profile.row_mut(InfosetId(j)));
    }
}

fn sanitize_beliefs(mu: &mut BeliefSystem) {
    for j in 0..mu.rows().len() {
        clamp_row(mu.row_mut(InfosetId(j)));
    }
}

fn clamp_row(row: &mut [f64]) {
    for v in row.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = row.iter().sum();
    if s > 0.0 {
        row.iter_mut().for_each(|v| *v /= s);
    }
}

/// One projected Newton refinement of a path endpoint on the exact
/// stationarity system, with the support pattern frozen from the endpoint.
/// Returns None when the refinement fails to improve or leaves the simplex.
pub fn polish_endpoint(
    game: &Game,
    sub: &SubgameIndex,
    refinement: Refinement,
    beta: &BehaviorProfile,
    beta_tilde: &BehaviorProfile,
) -> Option<(BehaviorProfile, BehaviorProfile, BeliefSystem)> {
    const ACTIVE_TOL: f64 = 1e-3;
    let support_of = |p: &BehaviorProfile, j: InfosetId| -> Vec<usize> {
        let row = p.row(j);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut s: Vec<usize> =
            (0..row.len()).filter(|&k| row[k] >= ACTIVE_TOL.min(max)).collect();
        if s.is_empty() {
            let arg = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(k, _)| k)
                .unwrap();
            s = vec![arg];
        }
        s
    };
    let supp_b: Vec<Vec<usize>> = game.infoset_ids().map(|j| support_of(beta, j)).collect();
    let supp_t: Vec<Vec<usize>> =
        game.infoset_ids().map(|j| support_of(beta_tilde, j)).collect();

    // Pack supported coordinates.
    let mut x = Vec::new();
    for j in game.infoset_ids() {
        for &k in &supp_b[j.0] {
            x.push(beta.prob(j, k));
        }
    }
    for j in game.infoset_ids() {
        for &k in &supp_t[j.0] {
            x.push(beta_tilde.prob(j, k));
        }
    }
    let dim = x.len();

    let unpack = |v: &[f64]| -> (BehaviorProfile, BehaviorProfile) {
        let mut b = BehaviorProfile::from_rows(
            game.infoset_ids()
                .map(|j| vec![0.0; game.infoset(j).actions.len()])
                .collect(),
        );
        let mut tl = b.clone();
        let mut idx = 0;
        for j in game.infoset_ids() {
            for &k in &supp_b[j.0] {
                b.row_mut(j)[k] = v[idx];
                idx += 1;
            }
        }
        for j in game.infoset_ids() {
            for &k in &supp_t[j.0] {
                tl.row_mut(j)[k] = v[idx];
                idx += 1;
            }
        }
        (b, tl)
    };

    let mut residual = |v: &[f64], out: &mut [f64]| {
        let (b, tl) = unpack(v);
        let mu = solve_beliefs(game, sub, &b, refinement, &Fill::Uniform);
        let mut row = 0;
        for j in game.infoset_ids() {
            let player = game.infoset(j).player;
            let spliced = splice(game, &b, &tl, j);
            let first = supp_b[j.0][0];
            let value = |a: usize| match refinement {
                Refinement::Nash => payoff_through(game, &spliced, player, j, Some(a)),
                Refinement::Sgpe => {
                    subgame_conditional_payoff(game, sub, &spliced, player, j, Some(a))
                }
            };
            let base = value(first);
            for &a in supp_b[j.0].iter().skip(1) {
                out[row] = value(a) - base;
                row += 1;
            }
            out[row] = supp_b[j.0].iter().map(|&a| b.prob(j, a)).sum::<f64>() - 1.0;
            row += 1;
        }
        for j in game.infoset_ids() {
            let player = game.infoset(j).player;
            let spliced = splice(game, &b, &tl, j);
            let first = supp_t[j.0][0];
            let base = conditional_payoff(game, &spliced, &mu, player, j, Some(first));
            for &a in supp_t[j.0].iter().skip(1) {
                out[row] = conditional_payoff(game, &spliced, &mu, player, j, Some(a)) - base;
                row += 1;
            }
            out[row] = supp_t[j.0].iter().map(|&a| tl.prob(j, a)).sum::<f64>() - 1.0;
            row += 1;
        }
        debug_assert_eq!(row, v.len());
    };

    // Least-squares Newton: equilibrium components need not be isolated, so
    // the frozen-support system can be singular; the minimum-norm step still
    // converges onto the component.
    let mut f = vec![0.0; dim];
    for _ in 0..4 {
        residual(&x, &mut f);
        if inf_norm(&f) <= 1e-13 {
            break;
        }
        let jac = fd_jacobian(&mut residual, &x, dim);
        let rhs = DVector::from_iterator(dim, f.iter().map(|&v| -v));
        let delta = jac.svd(true, true).solve(&rhs, 1e-10).ok()?;
        for (xi, d) in x.iter_mut().zip(delta.iter()) {
            *xi += d;
        }
        if !all_finite(&x) {
            return None;
        }
    }
    residual(&x, &mut f);
    if inf_norm(&f) > 1e-8 {
        return None;
    }
    if x.iter().any(|&v| v < -1e-9 || v > 1.0 + 1e-9) {
        return None;
    }
    let x: Vec<f64> = x.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let (mut b, mut tl) = unpack(&x);
    sanitize(&mut b);
    sanitize(&mut tl);
    let mu = solve_beliefs(game, sub, &b, refinement, &Fill::Uniform);
    Some((b, tl, mu))
}
