//! Reach probabilities and the kernels behind belief systems.

use efg::fixtures;
use efg::game::subgame_decomposition;
use efg::profile::BehaviorProfile;
use efg::reach::{
    all_successor_infosets, infoset_reach, reach, reach_without_infoset, reach_without_player,
    subgame_reach_without_player,
};

fn main() {
    let game = fixtures::notation_game();
    let mut beta = BehaviorProfile::uniform(&game);
    let p11 = game.infoset_by_name("p1.1").unwrap();
    let p21 = game.infoset_by_name("p2.1").unwrap();
    let p31 = game.infoset_by_name("p3.1").unwrap();
    beta.set_row(p11, vec![0.0, 1.0]); // always y
    beta.set_row(p21, vec![0.4, 0.6]);
    beta.set_row(p31, vec![0.7, 0.3]);

    let node = game.node_by_name("byeF").unwrap();
    println!("history {}", game.history_string(node));
    println!("  full reach            {:.6}", reach(&game, &beta, node));
    println!(
        "  skipping the top set  {:.6}",
        reach_without_infoset(&game, &beta, p11, node)
    );
    println!(
        "  excluding player 2    {:.6}",
        reach_without_player(&game, &beta, 2, node)
    );
    println!("  infoset mass at p2.1  {:.6}", infoset_reach(&game, &beta, p21));

    // First own infosets reachable through each action.
    for a in 0..game.infoset(p21).actions.len() {
        let succ: Vec<&str> = efg::reach::successor_infosets(&game, p21, a)
            .into_iter()
            .map(|q| game.infoset_name(q))
            .collect();
        println!(
            "  successors of p2.1 via {}: {:?}",
            game.infoset(p21).actions[a],
            succ
        );
    }
    println!(
        "  all successors of p2.1: {:?}",
        all_successor_infosets(&game, p21)
            .into_iter()
            .map(|q| game.infoset_name(q))
            .collect::<Vec<_>>()
    );

    // Subgame-restricted kernels restart below subgame roots.
    let game2 = fixtures::secondgame();
    let sub = subgame_decomposition(&game2);
    let beta2 = BehaviorProfile::uniform(&game2);
    let yia = game2.node_by_name("YIA").unwrap();
    println!("\nsecond game, history {}", game2.history_string(yia));
    println!(
        "  own-excluded kernel from the root    {:.6}",
        reach_without_player(&game2, &beta2, 1, yia)
    );
    println!(
        "  own-excluded kernel inside its subgame {:.6}",
        subgame_reach_without_player(&game2, &sub, &beta2, 1, yia)
    );
}
