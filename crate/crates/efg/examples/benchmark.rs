//! Desk-scale benchmark run comparing the two methods on one family row.

use efg::bench::{BenchRow, BenchSpec, results_to_csv, run_bench};
use efg::generate::Family;

fn main() {
    let spec = BenchSpec {
        rows: vec![BenchRow {
            family: Family::A,
            n: 3,
            branching: vec![2, 3, 3],
            layers: 1,
            instances: 5,
            methods: vec!["logm".into(), "cqpm".into()],
            refinement: "nash".into(),
            seed: 100,
            timeout_s: Some(60.0),
            max_iters: None,
            t_min: None,
            polish: None,
        }],
    };
    let results = run_bench(&spec, 1).expect("bench runs");
    for rr in &results {
        for mr in &rr.per_method {
            let iters: Vec<usize> = mr
                .instances
                .iter()
                .filter(|i| i.success)
                .map(|i| i.iterations)
                .collect();
            println!(
                "{:?} {}: {}/{} solved, iterations {:?}",
                rr.row.family,
                mr.method,
                mr.successes(),
                mr.instances.len(),
                iters
            );
        }
    }
    println!("\n{}", results_to_csv(&results));
}
