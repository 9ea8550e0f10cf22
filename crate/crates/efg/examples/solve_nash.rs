//! Trace both homotopies to a Nash equilibrium of the three-player game
//! with one fully mixed equilibrium component.

use efg::Refinement;
use efg::fixtures;
use efg::game::subgame_decomposition;
use efg::homotopy::{Method, SolverConfig, endpoint_tol, trace_path};
use efg::profile::Assessment;
use efg::verify::check_nash;

fn main() {
    let game = fixtures::firstgame();
    let sub = subgame_decomposition(&game);
    for method in [Method::Logm, Method::Cqpm] {
        let mut config = SolverConfig::uniform(&game);
        config.polish = true;
        let out = trace_path(&game, &sub, &config, method, Refinement::Nash, None)
            .expect("trace reaches t_min");
        println!(
            "{method}: {} iterations, final t {:.2e}, polished {}",
            out.iterations, out.final_t, out.polished
        );
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
        let assessment = Assessment {
            beta: out.beta.clone(),
            beta_tilde: out.beta_tilde.clone(),
            mu: out.mu.clone(),
        };
        let tol = endpoint_tol(&game, &config);
        let report = check_nash(&game, &sub, &assessment, tol).unwrap();
        println!("  verified: {} (max residual {:.2e})\n", report.pass, report.max_residual);
    }
}
