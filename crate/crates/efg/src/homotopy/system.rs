//! The residual systems of the two homotopies.
//!
//! Rows are grouped per infoset, in infoset order:
//!
//! 1. strategy stationarity, one row per non-reference action;
//! 2. companion stationarity, one row per non-reference action;
//! 3. mass proportionality (barrier) or complementarity differences
//!    (penalty), one row per non-reference member;
//! 4. belief coupling, one row per member;
//! 5. three normalization rows (strategy, companion, beliefs).
//!
//! The reference action and reference member are the lowest-indexed ones.
//! The optional generic perturbation `alpha` is subtracted as t(1-t) alpha
//! across all rows. Row count equals the unknown count, so the system is
//! square in the unknowns with t as the path parameter.

use crate::Refinement;
use crate::game::{Game, InfosetId, SubgameIndex};
use crate::homotopy::eval::Evaluator;
use crate::homotopy::{Method, Layout, phi_neg, phi_pos, perturb_rows, xi_start};

pub(crate) struct System {
    method: Method,
    refinement: Refinement,
    layout: Layout,
    eval: Evaluator,
    beta0: Vec<Vec<f64>>,
    btil0: Vec<Vec<f64>>,
    xi0: Vec<Vec<f64>>,
    eta0: Vec<Vec<f64>>,
    alpha: Option<Vec<f64>>,
    // Scratch rows reused across evaluations.
    beta: Vec<Vec<f64>>,
    btil: Vec<Vec<f64>>,
    pert: Vec<Vec<f64>>,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl System {
    pub fn new(
        game: &Game,
        _sub: &SubgameIndex,
        config: &crate::homotopy::SolverConfig,
        method: Method,
        refinement: Refinement,
    ) -> Self {
        let layout = Layout::new(game);
        let blank: Vec<Vec<f64>> = game
            .infoset_ids()
            .map(|j| vec![0.0; game.infoset(j).actions.len()])
            .collect();
        System {
            method,
            refinement,
            eval: Evaluator::new(game),
            beta0: config.beta0.rows().to_vec(),
            btil0: config.beta_tilde0.rows().to_vec(),
            xi0: xi_start(game, &config.beta0),
            eta0: config.eta0.clone(),
            alpha: config.alpha.clone(),
            beta: blank.clone(),
            btil: blank,
            pert: Vec::new(),
            u1: Vec::new(),
            u2: Vec::new(),
            layout,
        }
    }



    /// Evaluates the residual at raw coordinates `x` and parameter `t` into
    /// `out` (length `dim`).
    pub fn eval(&mut self, game: &Game, sub: &SubgameIndex, x: &[f64], t: f64, out: &mut [f64]) {
        let lay = &self.layout;
        let sqrt = self.method == Method::Cqpm;
        for j in game.infoset_ids() {
            let ka = game.infoset(j).actions.len();
            for k in 0..ka {
                let (b, bt) = (x[lay.beta_off[j.0] + k], x[lay.btil_off[j.0] + k]);
                self.beta[j.0][k] = if sqrt { phi_pos(b) } else { b };
                self.btil[j.0][k] = if sqrt { phi_pos(bt) } else { bt };
            }
        }
        self.pert.clone_from(&self.beta);
        perturb_rows(&mut self.pert, t, &self.eta0);
        self.eval.prepare(game, sub, &self.pert, &self.btil, self.refinement);

        let mut row = 0usize;
        for j in game.infoset_ids() {
            let ka = game.infoset(j).actions.len();
            let kh = game.infoset(j).members.len();
            self.u1.clear();
            self.u2.clear();
            for a in 0..ka {
                self.u1.push(self.eval.block_payoff(game, j, a, self.refinement));
                self.u2.push(self.eval.conditional_payoff(
                    game,
                    j,
                    a,
                    &x[lay.mu_off[j.0]..lay.mu_off[j.0] + kh],
                ));
            }
            match self.method {
                Method::Logm => self.logm_rows(game, sub, x, t, j, out, &mut row),
                Method::Cqpm => self.cqpm_rows(game, sub, x, t, j, out, &mut row),
            }
        }
        debug_assert_eq!(row, lay.dim);
        if let Some(alpha) = &self.alpha {
            let s = t * (1.0 - t);
            for (o, a) in out.iter_mut().zip(alpha) {
                *o -= s * a;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn logm_rows(
        &self,
        game: &Game,
        sub: &SubgameIndex,
        x: &[f64],
        t: f64,
        j: InfosetId,
        out: &mut [f64],
        row: &mut usize,
    ) {
        let lay = &self.layout;
        let ka = game.infoset(j).actions.len();
        let kh = game.infoset(j).members.len();
        let beta = &x[lay.beta_off[j.0]..lay.beta_off[j.0] + ka];
        let btil = &x[lay.btil_off[j.0]..lay.btil_off[j.0] + ka];
        let mu = &x[lay.mu_off[j.0]..lay.mu_off[j.0] + kh];
        let xi = &x[lay.xi_off[j.0]..lay.xi_off[j.0] + kh];
        let sum_beta: f64 = beta.iter().sum();
        let sum_btil: f64 = btil.iter().sum();
        let sum_xi: f64 = xi.iter().sum();
        let sum_xi0: f64 = self.xi0[j.0].iter().sum();
        let dot_beta_u1: f64 = beta.iter().zip(&self.u1).map(|(b, u)| b * u).sum();
        let dot_btil_u2: f64 = btil.iter().zip(&self.u2).map(|(b, u)| b * u).sum();

        // Strategy stationarity against the barrier anchor.
        for a in 1..ka {
            out[*row] = (1.0 - t) * beta[a] * (self.u1[a] * sum_beta - dot_beta_u1)
                + t * (self.beta0[j.0][a] * sum_beta - beta[a]);
            *row += 1;
        }
        // Companion stationarity under the conditional payoffs.
        for a in 1..ka {
            out[*row] = (1.0 - t) * btil[a] * (self.u2[a] * sum_btil - dot_btil_u2)
                + t * (self.btil0[j.0][a] * sum_btil - btil[a]);
            *row += 1;
        }
        // Masses stay proportional to their anchors.
        for h in 1..kh {
            out[*row] = self.xi0[j.0][h] * sum_xi - xi[h] * sum_xi0;
            *row += 1;
        }
        // Belief coupling: masses absorb the kernel as t shrinks.
        for h in 0..kh {
            let k_h = self.eval.kernel(game, sub, j, h, self.refinement);
            let k_i: f64 = (0..kh)
                .map(|m| self.eval.kernel(game, sub, j, m, self.refinement))
                .sum();
            out[*row] = ((1.0 - t) * k_i + t) * mu[h] - xi[h] - (1.0 - t) * k_h;
            *row += 1;
        }
        out[*row] = sum_beta - 1.0;
        *row += 1;
        out[*row] = sum_btil - 1.0;
        *row += 1;
        out[*row] = mu.iter().sum::<f64>() - 1.0;
        *row += 1;
    }

    #[allow(clippy::too_many_arguments)]
    fn cqpm_rows(
        &self,
        game: &Game,
        sub: &SubgameIndex,
        x: &[f64],
        t: f64,
        j: InfosetId,
        out: &mut [f64],
        row: &mut usize,
    ) {
        let lay = &self.layout;
        let ka = game.infoset(j).actions.len();
        let kh = game.infoset(j).members.len();
        let z = &x[lay.beta_off[j.0]..lay.beta_off[j.0] + ka];
        let zt = &x[lay.btil_off[j.0]..lay.btil_off[j.0] + ka];
        let mu = &x[lay.mu_off[j.0]..lay.mu_off[j.0] + kh];
        let w = &x[lay.xi_off[j.0]..lay.xi_off[j.0] + kh];

        // Difference form against the reference action: payoff gaps offset by
        // complementarity slacks and the penalty pull toward the anchors.
        for a in 1..ka {
            out[*row] = (1.0 - t) * (self.u1[a] - self.u1[0])
                + (phi_neg(z[a]) - phi_neg(z[0]))
                - t * (phi_pos(z[a]) - phi_pos(z[0]) - (self.beta0[j.0][a] - self.beta0[j.0][0]));
            *row += 1;
        }
        for a in 1..ka {
            out[*row] = (1.0 - t) * (self.u2[a] - self.u2[0])
                + (phi_neg(zt[a]) - phi_neg(zt[0]))
                - t * (phi_pos(zt[a]) - phi_pos(zt[0]) - (self.btil0[j.0][a] - self.btil0[j.0][0]));
            *row += 1;
        }
        for h in 1..kh {
            out[*row] = (phi_neg(w[h]) - phi_neg(w[0]))
                - t * (phi_pos(w[h]) - phi_pos(w[0]) - (self.xi0[j.0][h] - self.xi0[j.0][0]));
            *row += 1;
        }
        for h in 0..kh {
            let k_h = self.eval.kernel(game, sub, j, h, self.refinement);
            let k_i: f64 = (0..kh)
                .map(|m| self.eval.kernel(game, sub, j, m, self.refinement))
                .sum();
            out[*row] = ((1.0 - t) * k_i + t) * mu[h] - phi_pos(w[h]) - (1.0 - t) * k_h;
            *row += 1;
        }
        out[*row] = z.iter().map(|&v| phi_pos(v)).sum::<f64>() - 1.0;
        *row += 1;
        out[*row] = zt.iter().map(|&v| phi_pos(v)).sum::<f64>() - 1.0;
        *row += 1;
        out[*row] = mu.iter().sum::<f64>() - 1.0;
        *row += 1;
    }
}
