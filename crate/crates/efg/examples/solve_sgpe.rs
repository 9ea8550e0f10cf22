//! Nash versus subgame-perfect solving on a game with proper subgames.

use efg::Refinement;
use efg::fixtures;
use efg::game::subgame_decomposition;
use efg::homotopy::{Method, SolverConfig, endpoint_tol, trace_path};
use efg::profile::Assessment;
use efg::verify::{check_nash, check_sgpe};

fn main() {
    let game = fixtures::secondgame();
    let sub = subgame_decomposition(&game);
    let config = SolverConfig::uniform(&game);
    let tol = endpoint_tol(&game, &config);

    for refinement in [Refinement::Nash, Refinement::Sgpe] {
        let out = trace_path(&game, &sub, &config, Method::Logm, refinement, None)
            .expect("trace reaches t_min");
        println!("logm {refinement}: {} iterations", out.iterations);
        for j in game.infoset_ids() {
            let probs: Vec<String> = game
                .infoset(j)
                .actions
                .iter()
                .enumerate()
                .map(|(k, a)| format!("{a}:{:.4}", out.beta.prob(j, k)))
                .collect();
            println!("  {} -> {}", game.infoset_name(j), probs.join(" "));
        }
        let a = Assessment {
            beta: out.beta.clone(),
            beta_tilde: out.beta_tilde.clone(),
            mu: out.mu.clone(),
        };
        let nash = check_nash(&game, &sub, &a, tol).unwrap().pass;
        let sgpe = check_sgpe(&game, &sub, &a, tol).unwrap().pass;
        println!("  passes nash check: {nash}, passes sgpe check: {sgpe}\n");
    }
}
