//! Parse a game file, inspect its structure, and check perfect recall.

use efg::fixtures;
use efg::format::parse_game;
use efg::game::{experience_sequence, subgame_decomposition, validate_perfect_recall};

fn main() {
    let game = parse_game(fixtures::NOTATION_GAME).expect("fixture parses");
    println!(
        "{} players, {} nodes, {} infosets, {} terminals",
        game.num_players(),
        game.num_nodes(),
        game.num_infosets(),
        game.terminals().len()
    );

    for j in game.infoset_ids() {
        let is = game.infoset(j);
        let members: Vec<String> =
            is.members.iter().map(|&m| game.history_string(m)).collect();
        println!(
            "infoset {} (player {}): actions {:?}, members {}",
            game.infoset_name(j),
            is.player,
            is.actions,
            members.join(" ")
        );
    }

    // A player's experience along a history: infosets seen and actions taken.
    let node = game.node_by_name("byeF").unwrap();
    let exp = experience_sequence(&game, 2, node);
    println!("\nplayer 2 experience along {}:", game.history_string(node));
    for (j, a) in &exp.steps {
        println!("  saw {} and played {}", game.infoset_name(*j), game.infoset(*j).actions[*a]);
    }
    if let Some(j) = exp.at {
        println!("  now at {}", game.infoset_name(j));
    }

    let report = validate_perfect_recall(&game);
    println!("\nperfect recall violations: {}", report.len());

    let sub = subgame_decomposition(&game);
    let roots: Vec<String> =
        sub.subgame_roots.iter().map(|&r| game.history_string(r)).collect();
    println!("subgame roots: {}", roots.join(" "));
}
