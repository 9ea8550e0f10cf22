//! Semi-sequential equilibrium: the profile itself must be locally rational
//! against kernel-consistent beliefs, with no separate companion.

use efg::Refinement;
use efg::belief::{Fill, belief_residual, solve_beliefs};
use efg::fixtures;
use efg::game::subgame_decomposition;
use efg::profile::BehaviorProfile;
use efg::verify::check_semi_sequential;

fn main() {
    let game = fixtures::secondgame();
    let sub = subgame_decomposition(&game);

    let points: [(&str, [[f64; 2]; 4]); 3] = [
        ("coordination on (Y, C, I, B)", [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        ("out-opting Nash point", [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]),
        ("uniform profile", [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]),
    ];
    for (name, rows) in points {
        let mut beta = BehaviorProfile::uniform(&game);
        for (infoset, row) in ["p1.1", "p1.2", "p2.1", "p3.1"].iter().zip(rows) {
            beta.set_row(game.infoset_by_name(infoset).unwrap(), row.to_vec());
        }
        println!("{name}:");
        for mode in [Refinement::Nash, Refinement::Sgpe] {
            // Beliefs solve the kernel system of the chosen mode; at
            // unreached infosets the subgame-relative kernel still pins them.
            let mu = solve_beliefs(&game, &sub, &beta, mode, &Fill::Uniform);
            let residuals = belief_residual(&game, &sub, &beta, &mu, mode);
            let report =
                check_semi_sequential(&game, &sub, &beta, &mu, 1e-9, mode).unwrap();
            println!(
                "  {} beliefs (worst system residual {:.1e}): {}",
                match mode {
                    Refinement::Nash => "self-independent",
                    Refinement::Sgpe => "subgame-relative",
                },
                residuals.iter().cloned().fold(0.0f64, f64::max),
                if report.pass { "semi-sequential" } else { "refuted" }
            );
        }
    }
}
