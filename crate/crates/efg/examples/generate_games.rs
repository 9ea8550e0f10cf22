//! Seeded random games from the three benchmark families.

use efg::format::serialize_game;
use efg::game::validate_perfect_recall;
use efg::generate::{Family, GenSpec, generate};

fn main() {
    for spec in [
        GenSpec::new(Family::A, 3, vec![2, 3, 3], 1, 11),
        GenSpec::new(Family::B, 4, vec![2, 2, 5, 3], 1, 12),
        GenSpec::new(Family::C, 2, vec![2, 2], 3, 13),
    ] {
        let game = generate(&spec).unwrap();
        println!(
            "family {:?}, n = {}, branching {:?}, layers {}: {} nodes, {} terminals",
            spec.family,
            spec.n,
            spec.branching,
            spec.layers,
            game.num_nodes(),
            game.terminals().len()
        );
        println!("  infosets per player: {:?}", spec.infoset_counts());
        println!("  perfect recall violations: {}", validate_perfect_recall(&game).len());
        println!("  serialized size: {} bytes", serialize_game(&game).len());
    }
}
