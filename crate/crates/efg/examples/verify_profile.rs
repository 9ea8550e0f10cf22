//! Certify and refute equilibrium candidates: companion construction, the
//! two-block characterization, and the brute-force oracle.

use efg::Refinement;
use efg::fixtures;
use efg::game::subgame_decomposition;
use efg::profile::{Assessment, BehaviorProfile};
use efg::verify::{brute_force_nash_check, check_nash, check_sgpe, construct_companion};

fn main() {
    let game = fixtures::secondgame();
    let sub = subgame_decomposition(&game);

    let candidates: [(&str, [[f64; 2]; 4]); 3] = [
        ("pure coordination point", [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        ("out-opting point", [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]),
        ("uniform profile", [[0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]),
    ];
    for (name, rows) in candidates {
        let mut beta = BehaviorProfile::uniform(&game);
        for (infoset, row) in ["p1.1", "p1.2", "p2.1", "p3.1"].iter().zip(rows) {
            beta.set_row(game.infoset_by_name(infoset).unwrap(), row.to_vec());
        }
        // The companion supplies the extra profile and beliefs certifying a
        // bare strategy profile.
        let (beta_tilde, mu) = construct_companion(&game, &sub, &beta, Refinement::Nash);
        let a = Assessment { beta: beta.clone(), beta_tilde, mu };
        let nash = check_nash(&game, &sub, &a, 1e-9).unwrap();

        let (tilde_sg, mu_sg) = construct_companion(&game, &sub, &beta, Refinement::Sgpe);
        let a_sg = Assessment { beta: beta.clone(), beta_tilde: tilde_sg, mu: mu_sg };
        let sgpe = check_sgpe(&game, &sub, &a_sg, 1e-9).unwrap();

        let oracle = brute_force_nash_check(&game, &beta, 1e-9, 1 << 20).unwrap();
        println!(
            "{name}: nash {} (residual {:.2e}), sgpe {}, oracle {} (worst gain {:.2e})",
            nash.pass, nash.max_residual, sgpe.pass, oracle.is_nash, oracle.worst_gain
        );
    }
}
