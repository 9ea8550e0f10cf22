//! Benchmark harness: seeded instance batches per game family, solved with
//! the selected methods, aggregated to avg/min/max rows.

use std::time::{Duration, Instant};

use serde::Deserialize;

use crate::Refinement;
use crate::error::GameError;
use crate::game::subgame_decomposition;
use crate::generate::{Family, GenSpec, generate};
use crate::homotopy::{Method, SolverConfig, trace_path};

#[derive(Debug, Clone, Deserialize)]
pub struct BenchSpec {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BenchRow {
    pub family: Family,
    pub n: usize,
    pub branching: Vec<usize>,
    #[serde(default = "one")]
    pub layers: usize,
    pub instances: usize,
    pub methods: Vec<String>,
    #[serde(default = "nash")]
    pub refinement: String,
    pub seed: u64,
    #[serde(default)]
    pub timeout_s: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub t_min: Option<f64>,
    #[serde(default)]
    pub polish: Option<bool>,
}

fn one() -> usize {
    1
}
fn nash() -> String {
    "nash".into()
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub seed: u64,
    pub success: bool,
    pub time_s: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct MethodResults {
    pub method: Method,
    pub refinement: Refinement,
    pub instances: Vec<InstanceResult>,
}

impl MethodResults {
    pub fn successes(&self) -> usize {
        self.instances.iter().filter(|i| i.success).count()
    }
}

#[derive(Debug, Clone)]
pub struct RowResults {
    pub row: BenchRow,
    pub infoset_counts: Vec<usize>,
    pub per_method: Vec<MethodResults>,
}

pub fn parse_method(s: &str) -> Result<Method, GameError> {
    match s {
        "logm" | "LOGM" => Ok(Method::Logm),
        "cqpm" | "CQPM" => Ok(Method::Cqpm),
        other => Err(GameError::Syntax(format!("unknown method `{other}`"))),
    }
}

pub fn parse_refinement(s: &str) -> Result<Refinement, GameError> {
    match s {
        "nash" => Ok(Refinement::Nash),
        "sgpe" => Ok(Refinement::Sgpe),
        other => Err(GameError::Syntax(format!("unknown refinement `{other}`"))),
    }
}

/// Runs every row of the spec. Instances are generated from consecutive
/// seeds starting at the row seed; wall time covers the trace only. With
/// `jobs > 1` instances run in parallel and results keep spec order.
pub fn run_bench(spec: &BenchSpec, jobs: usize) -> Result<Vec<RowResults>, GameError> {
    let mut tasks = Vec::new();
    for (row_idx, row) in spec.rows.iter().enumerate() {
        let refinement = parse_refinement(&row.refinement)?;
        for method_name in &row.methods {
            let method = parse_method(method_name)?;
            for inst in 0..row.instances {
                tasks.push((row_idx, method, refinement, row.seed + inst as u64));
            }
        }
    }

    let run_one = |&(row_idx, method, refinement, seed): &(usize, Method, Refinement, u64)| {
        let row = &spec.rows[row_idx];
        let spec = GenSpec::new(row.family, row.n, row.branching.clone(), row.layers, seed);
        let game = generate(&spec)?;
        let sub = subgame_decomposition(&game);
        let mut config = SolverConfig::uniform(&game);
        if let Some(m) = row.max_iters {
            config.max_iters = m;
        }
        if let Some(t) = row.t_min {
            config.t_min = t;
        }
        if let Some(p) = row.polish {
            config.polish = p;
        }
        config.time_limit = row.timeout_s.map(Duration::from_secs_f64);
        let clock = Instant::now();
        let outcome = trace_path(&game, &sub, &config, method, refinement, None);
        let time_s = clock.elapsed().as_secs_f64();
        let (success, iterations) = match outcome {
            Ok(o) => (true, o.iterations),
            Err(e) => {
                log::debug!("bench instance seed {seed} failed: {e}");
                (false, 0)
            }
        };
        Ok::<_, GameError>((row_idx, method, InstanceResult { seed, success, time_s, iterations }))
    };

    let flat: Vec<(usize, Method, InstanceResult)> = if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| GameError::Syntax(e.to_string()))?;
        pool.install(|| {
            use rayon::prelude::*;
            tasks.par_iter().map(run_one).collect::<Result<Vec<_>, _>>()
        })?
    } else {
        tasks.iter().map(run_one).collect::<Result<Vec<_>, _>>()?
    };

    let mut out: Vec<RowResults> = spec
        .rows
        .iter()
        .map(|row| {
            let refinement = parse_refinement(&row.refinement).expect("validated above");
            let gen_spec =
                GenSpec::new(row.family, row.n, row.branching.clone(), row.layers, row.seed);
            RowResults {
                row: row.clone(),
                infoset_counts: gen_spec.infoset_counts(),
                per_method: row
                    .methods
                    .iter()
                    .map(|m| MethodResults {
                        method: parse_method(m).expect("validated above"),
                        refinement,
                        instances: Vec::new(),
                    })
                    .collect(),
            }
        })
        .collect();
    for (row_idx, method, instance) in flat {
        let slot = out[row_idx]
            .per_method
            .iter_mut()
            .find(|m| m.method == method)
            .expect("method slot exists");
        slot.instances.push(instance);
    }
    Ok(out)
}

fn join(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}

/// Renders results in the benchmark CSV schema:
/// `family,n,m,branching,L,method,refinement,stat,time_s,iters`.
/// Rows with no successful instance carry `-` entries.
pub fn results_to_csv(results: &[RowResults]) -> String {
    let mut out = String::from("family,n,m,branching,L,method,refinement,stat,time_s,iters\n");
    for rr in results {
        let family = format!("{:?}", rr.row.family);
        let m = join(&rr.infoset_counts);
        let branching = join(&rr.row.branching);
        for mr in &rr.per_method {
            let ok: Vec<&InstanceResult> =
                mr.instances.iter().filter(|i| i.success).collect();
            for stat in ["avg", "min", "max"] {
                let (time_s, iters) = if ok.is_empty() {
                    ("-".to_string(), "-".to_string())
                } else {
                    let times: Vec<f64> = ok.iter().map(|i| i.time_s).collect();
                    let iters: Vec<f64> = ok.iter().map(|i| i.iterations as f64).collect();
                    let pick = |v: &[f64]| match stat {
                        "avg" => v.iter().sum::<f64>() / v.len() as f64,
                        "min" => v.iter().cloned().fold(f64::INFINITY, f64::min),
                        _ => v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    };
                    (format!("{:.6}", pick(&times)), format!("{:.1}", pick(&iters)))
                };
                out.push_str(&format!(
                    "{family},{n},{m},{branching},{layers},{method},{refinement},{stat},{time_s},{iters}\n",
                    n = rr.row.n,
                    layers = rr.row.layers,
                    method = mr.method,
                    refinement = mr.refinement,
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk_spec(max_iters: Option<usize>) -> BenchSpec {
        BenchSpec {
            rows: vec![BenchRow {
                family: Family::A,
                n: 3,
                branching: vec![2, 2, 2],
                layers: 1,
                instances: 2,
                methods: vec!["logm".into()],
                refinement: "nash".into(),
                seed: 900,
                timeout_s: Some(60.0),
                max_iters,
                t_min: None,
                polish: None,
            }],
        }
    }

    #[test]
    fn desk_scale_row_succeeds() {
        let results = run_bench(&desk_spec(None), 1).unwrap();
        assert_eq!(results.len(), 1);
        assert_eq!(results[0].per_method[0].successes(), 2);
        let csv = results_to_csv(&results);
        assert!(csv.starts_with("family,n,m,branching,L,method,refinement,stat,time_s,iters\n"));
        assert_eq!(csv.lines().count(), 1 + 3);
        assert!(csv.contains("A,3,1-1-2,2-2-2,1,logm,nash,avg"));
    }

    #[test]
    fn parallel_run_keeps_spec_order() {
        let sequential = run_bench(&desk_spec(None), 1).unwrap();
        let parallel = run_bench(&desk_spec(None), 2).unwrap();
        let iters = |r: &[RowResults]| -> Vec<(u64, usize)> {
            r[0].per_method[0].instances.iter().map(|i| (i.seed, i.iterations)).collect()
        };
        assert_eq!(iters(&sequential), iters(&parallel));
    }

    #[test]
    fn iteration_cap_writes_dashes() {
        let results = run_bench(&desk_spec(Some(1)), 1).unwrap();
        assert_eq!(results[0].per_method[0].successes(), 0);
        let csv = results_to_csv(&results);
        for stat in ["avg", "min", "max"] {
            assert!(csv.contains(&format!("{stat},-,-")));
        }
    }

    #[test]
    fn empty_spec_yields_header_only() {
        let results = run_bench(&BenchSpec { rows: vec![] }, 1).unwrap();
        let csv = results_to_csv(&results);
        assert_eq!(csv, "family,n,m,branching,L,method,refinement,stat,time_s,iters\n");
    }
}
