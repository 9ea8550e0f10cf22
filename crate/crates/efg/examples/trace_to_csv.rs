//! Export a full homotopy path as CSV for external plotting.

use efg::Refinement;
use efg::cli::CsvTraceSink;
use efg::fixtures;
use efg::game::subgame_decomposition;
use efg::homotopy::{Method, SolverConfig, TraceSink, trace_path};

fn main() {
    let game = fixtures::firstgame();
    let sub = subgame_decomposition(&game);
    let config = SolverConfig::uniform(&game);

    let path = std::env::temp_dir().join("firstgame_logm_nash.csv");
    let file = std::fs::File::create(&path).expect("temp file");
    let mut sink =
        CsvTraceSink::new(std::io::BufWriter::new(file), &game, Method::Logm).expect("header");
    let out = trace_path(
        &game,
        &sub,
        &config,
        Method::Logm,
        Refinement::Nash,
        Some(&mut sink as &mut dyn TraceSink),
    )
    .expect("trace reaches t_min");
    drop(sink);

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    println!("wrote {} ({} accepted points)", path.display(), out.iterations);
    println!("header: {}", lines.next().unwrap());
    if let Some(first) = lines.next() {
        println!("first row: {first}");
    }
    if let Some(last) = text.lines().last() {
        println!("last row:  {last}");
    }
}
