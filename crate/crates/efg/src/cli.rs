//! Command-line front end: validate, solve, verify, generate, bench.
//!
//! Exit codes are the machine contract: 0 success, 1 I/O or parse error,
//! 2 invalid game, 3 trace failure, 4 failed verification. Stdout is
//! human-oriented; machine output (traces, games, benchmark tables, reports)
//! goes to files. Set `EFG_LOG` for logging verbosity.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::Deserialize;

use crate::Refinement;
use crate::belief::{Fill, solve_beliefs};
use crate::bench::{BenchSpec, parse_method, parse_refinement, results_to_csv, run_bench};
use crate::format::{parse_game_structural, serialize_game};
use crate::game::{Game, subgame_decomposition, validate_perfect_recall};
use crate::generate::{Family, GenSpec, generate};
use crate::homotopy::{
    Layout, Method, SolverConfig, TraceRecord, TraceSink, endpoint_tol, trace_path,
};
use crate::profile::{Assessment, BehaviorProfile, BeliefSystem};
use crate::verify::{check_nash, check_semi_sequential, check_sgpe, construct_companion};

#[derive(Parser)]
#[command(name = "efg", version, about = "Extensive-form game equilibria in behavioral strategies")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a game file and check structure and perfect recall.
    Validate { path: PathBuf },
    /// Trace a homotopy path to an equilibrium.
    Solve {
        path: PathBuf,
        #[arg(long, default_value = "logm")]
        method: String,
        #[arg(long, default_value = "nash")]
        refinement: String,
        /// Seed for the generic perturbation draw.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write every accepted path point to a CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Norm of a random perturbation vector (0 disables it).
        #[arg(long, default_value_t = 0.0)]
        alpha_norm: f64,
        #[arg(long, default_value_t = 1e-5)]
        t_min: f64,
        /// Refine the endpoint on the exact system.
        #[arg(long)]
        polish: bool,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Check a profile file against an equilibrium characterization.
    Verify {
        path: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// nash, sgpe, semiseq, or sgpe-semiseq.
        #[arg(long, default_value = "nash")]
        refinement: String,
        #[arg(long)]
        tol: Option<f64>,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Generate a random game from one of the benchmark families.
    Generate {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        branching: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run a benchmark spec and write the aggregate CSV.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

pub fn run() -> u8 {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("EFG_LOG")).try_init();
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Solve {
            path,
            method,
            refinement,
            seed,
            trace,
            alpha_norm,
            t_min,
            polish,
            max_iters,
        } => cmd_solve(
            &path, &method, &refinement, seed, trace.as_deref(), alpha_norm, t_min, polish,
            max_iters,
        ),
        Command::Verify { path, profile, refinement, tol, report } => {
            cmd_verify(&path, &profile, &refinement, tol, report.as_deref())
        }
        Command::Generate { family, n, branching, layers, seed, out } => {
            cmd_generate(&family, n, &branching, layers, seed, &out)
        }
        Command::Bench { spec, out, jobs } => cmd_bench(&spec, &out, jobs),
    }
}

fn read_file(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        1
    })
}

fn load_game(path: &Path) -> Result<Game, u8> {
    let text = read_file(path)?;
    match crate::format::parse_game(&text) {
        Ok(g) => Ok(g),
        Err(e) => {
            eprintln!("error: {e}");
            Err(match e {
                crate::error::GameError::Syntax(_) => 1,
                _ => 2,
            })
        }
    }
}

pub fn cmd_validate(path: &Path) -> u8 {
    let text = match read_file(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let game = match parse_game_structural(&text) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("invalid: {e}");
            return match e {
                crate::error::GameError::Syntax(_) => 1,
                _ => 2,
            };
        }
    };
    let report = validate_perfect_recall(&game);
    if report.is_empty() {
        println!(
            "valid: {} players, {} nodes, {} infosets, {} terminals",
            game.num_players(),
            game.num_nodes(),
            game.num_infosets(),
            game.terminals().len()
        );
        0
    } else {
        for v in &report {
            println!(
                "perfect recall violated at infoset `{}`: members {} and {} differ",
                game.infoset_name(v.infoset),
                game.history_string(v.member_a),
                game.history_string(v.member_b),
            );
        }
        2
    }
}

/// CSV sink: one row per accepted point with the flattened coordinates in
/// layout order (infosets sorted by id, actions and members by index). The
/// penalty method also emits the derived strategy rows next to the raw ones.
pub struct CsvTraceSink<W: Write> {
    out: W,
    /// Length of the two leading strategy blocks (raw coordinates).
    strategy_len: usize,
}

impl<W: Write> CsvTraceSink<W> {
    pub fn new(mut out: W, game: &Game, method: Method) -> std::io::Result<Self> {
        let mut cols = vec![
            "iter".to_string(),
            "t".to_string(),
            "step".to_string(),
            "corrector_iters".to_string(),
            "residual_norm".to_string(),
        ];
        let (s, st, m) = match method {
            Method::Logm => ("beta", "beta_tilde", "xi"),
            Method::Cqpm => ("z", "z_tilde", "w"),
        };
        for prefix in [s, st] {
            for j in game.infoset_ids() {
                for a in &game.infoset(j).actions {
                    cols.push(format!("{prefix}[{}:{a}]", game.infoset_name(j)));
                }
            }
        }
        for j in game.infoset_ids() {
            for &mem in &game.infoset(j).members {
                cols.push(format!("mu[{}:{}]", game.infoset_name(j), game.node_name(mem)));
            }
        }
        for j in game.infoset_ids() {
            for &mem in &game.infoset(j).members {
                cols.push(format!("{m}[{}:{}]", game.infoset_name(j), game.node_name(mem)));
            }
        }
        if method == Method::Cqpm {
            for prefix in ["beta", "beta_tilde"] {
                for j in game.infoset_ids() {
                    for a in &game.infoset(j).actions {
                        cols.push(format!("{prefix}[{}:{a}]", game.infoset_name(j)));
                    }
                }
            }
        }
        writeln!(out, "{}", cols.join(","))?;
        let layout = Layout::new(game);
        Ok(CsvTraceSink { out, strategy_len: 2 * layout.m0 })
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> TraceSink for CsvTraceSink<W> {
    fn accepted(&mut self, record: &TraceRecord) {
        let mut fields = vec![
            record.iter.to_string(),
            format!("{:e}", record.t),
            format!("{:e}", record.step),
            record.corrector_iters.to_string(),
            format!("{:e}", record.residual_norm),
        ];
        for v in record.state.x.iter() {
            fields.push(format!("{v:e}"));
        }
        if record.state.method == Method::Cqpm {
            // Derived strategy rows: squared positive parts of the two
            // leading raw blocks.
            for v in record.state.x.iter().take(self.strategy_len) {
                fields.push(format!("{:e}", crate::homotopy::phi_pos(*v)));
            }
        }
        let _ = writeln!(self.out, "{}", fields.join(","));
    }
}

fn profile_string(game: &Game, profile: &BehaviorProfile) -> String {
    game.infoset_ids()
        .map(|j| {
            let pairs = game
                .infoset(j)
                .actions
                .iter()
                .enumerate()
                .map(|(k, a)| format!("{a}:{:.6}", profile.prob(j, k)))
                .collect::<Vec<_>>()
                .join(" ");
            format!("  {} -> {pairs}", game.infoset_name(j))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn beliefs_string(game: &Game, mu: &BeliefSystem) -> String {
    game.infoset_ids()
        .map(|j| {
            let pairs = game
                .infoset(j)
                .members
                .iter()
                .enumerate()
                .map(|(k, &m)| format!("{}:{:.6}", game.node_name(m), mu.row(j)[k]))
                .collect::<Vec<_>>()
                .join(" ");
            format!("  {} -> {pairs}", game.infoset_name(j))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_solve(
    path: &Path,
    method: &str,
    refinement: &str,
    seed: u64,
    trace: Option<&Path>,
    alpha_norm: f64,
    t_min: f64,
    polish: bool,
    max_iters: Option<usize>,
) -> u8 {
    let game = match load_game(path) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let (method, refinement) = match (parse_method(method), parse_refinement(refinement)) {
        (Ok(m), Ok(r)) => (m, r),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let sub = subgame_decomposition(&game);
    let mut config = SolverConfig::uniform(&game);
    config.t_min = t_min;
    config.polish = polish;
    if let Some(m) = max_iters {
        config.max_iters = m;
    }
    if alpha_norm > 0.0 {
        let dim = Layout::new(&game).dim;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(2);
        let mut alpha: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = alpha.iter().map(|v| v * v).sum::<f64>().sqrt();
        alpha.iter_mut().for_each(|v| *v *= alpha_norm / norm);
        config.alpha = Some(alpha);
    }

    let mut csv_sink = match trace {
        Some(p) => match fs::File::create(p) {
            Ok(f) => match CsvTraceSink::new(std::io::BufWriter::new(f), &game, method) {
                Ok(s) => Some(s),
                Err(e) => {
                    eprintln!("error: cannot write trace: {e}");
                    return 1;
                }
            },
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", p.display());
                return 1;
            }
        },
        None => None,
    };

    let clock = Instant::now();
    let outcome = trace_path(
        &game,
        &sub,
        &config,
        method,
        refinement,
        csv_sink.as_mut().map(|s| s as &mut dyn TraceSink),
    );
    let elapsed = clock.elapsed().as_secs_f64();
    if let Some(sink) = csv_sink {
        let _ = sink.into_inner().flush();
    }
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("trace failed: {e}");
            return 3;
        }
    };

    println!("method {method}, refinement {refinement}");
    println!("equilibrium candidate (t = {:.3e}, {} iterations, {:.3}s):", outcome.final_t, outcome.iterations, elapsed);
    println!("{}", profile_string(&game, &outcome.beta));
    println!("companion profile:");
    println!("{}", profile_string(&game, &outcome.beta_tilde));
    println!("beliefs:");
    println!("{}", beliefs_string(&game, &outcome.mu));
    if outcome.polished {
        println!("endpoint polished on the exact system");
    }

    let tol = endpoint_tol(&game, &config);
    let assessment = Assessment {
        beta: outcome.beta.clone(),
        beta_tilde: outcome.beta_tilde.clone(),
        mu: outcome.mu.clone(),
    };
    let report = match refinement {
        Refinement::Nash => check_nash(&game, &sub, &assessment, tol),
        Refinement::Sgpe => check_sgpe(&game, &sub, &assessment, tol),
    };
    match report {
        Ok(r) if r.pass => {
            println!("verified: max residual {:.3e} at tol {:.3e}", r.max_residual, tol);
            0
        }
        Ok(r) => {
            println!("endpoint FAILED verification: max residual {:.3e} at tol {:.3e}", r.max_residual, tol);
            4
        }
        Err(e) => {
            eprintln!("error: {e}");
            4
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProfileFile {
    Bare(BTreeMap<String, Vec<f64>>),
    Full {
        beta: BTreeMap<String, Vec<f64>>,
        #[serde(default)]
        beta_tilde: Option<BTreeMap<String, Vec<f64>>>,
        #[serde(default)]
        mu: Option<BTreeMap<String, Vec<f64>>>,
    },
}

pub fn cmd_verify(
    path: &Path,
    profile_path: &Path,
    refinement: &str,
    tol: Option<f64>,
    report_path: Option<&Path>,
) -> u8 {
    let game = match load_game(path) {
        Ok(g) => g,
        Err(code) => return code,
    };
    let sub = subgame_decomposition(&game);
    let text = match read_file(profile_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let parsed: ProfileFile = match serde_json::from_str(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: malformed profile file: {e}");
            return 1;
        }
    };
    let (beta_map, tilde_map, mu_map) = match parsed {
        ProfileFile::Bare(m) => (m, None, None),
        ProfileFile::Full { beta, beta_tilde, mu } => (beta, beta_tilde, mu),
    };
    let beta = match BehaviorProfile::from_named_rows(&game, &beta_map) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let tol = tol.unwrap_or_else(|| crate::verify::default_tol(&game));

    let named_beliefs = |m: &BTreeMap<String, Vec<f64>>| BeliefSystem::from_named_rows(&game, m);
    let report = match refinement {
        "nash" | "sgpe" => {
            let mode = parse_refinement(refinement).expect("matched above");
            let (companion_tilde, companion_mu) = construct_companion(&game, &sub, &beta, mode);
            let beta_tilde = match &tilde_map {
                Some(m) => match BehaviorProfile::from_named_rows(&game, m) {
                    Ok(b) => b,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 1;
                    }
                },
                None => companion_tilde,
            };
            let mu = match &mu_map {
                Some(m) => match named_beliefs(m) {
                    Ok(b) => b,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 1;
                    }
                },
                None => companion_mu,
            };
            let assessment = Assessment { beta, beta_tilde, mu };
            match mode {
                Refinement::Nash => check_nash(&game, &sub, &assessment, tol),
                Refinement::Sgpe => check_sgpe(&game, &sub, &assessment, tol),
            }
        }
        "semiseq" | "sgpe-semiseq" => {
            let mode = if refinement == "semiseq" { Refinement::Nash } else { Refinement::Sgpe };
            let mu = match &mu_map {
                Some(m) => match named_beliefs(m) {
                    Ok(b) => b,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 1;
                    }
                },
                None => solve_beliefs(&game, &sub, &beta, mode, &Fill::Uniform),
            };
            check_semi_sequential(&game, &sub, &beta, &mu, tol, mode)
        }
        other => {
            eprintln!("error: unknown refinement `{other}`");
            return 1;
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    for entry in &report.per_infoset {
        println!(
            "{}: comp {:.3e} / {:.3e}, beliefs {:.3e}",
            entry.infoset, entry.comp_defect, entry.comp_defect_tilde, entry.belief_residual
        );
    }
    println!(
        "{}: max residual {:.3e} at tol {:.3e}",
        if report.pass { "PASS" } else { "FAIL" },
        report.max_residual,
        report.tol
    );
    if let Some(p) = report_path {
        if let Err(e) = fs::write(p, report.to_json()) {
            eprintln!("error: cannot write report: {e}");
            return 1;
        }
    }
    if report.pass { 0 } else { 4 }
}

pub fn cmd_generate(
    family: &str,
    n: usize,
    branching: &[usize],
    layers: usize,
    seed: u64,
    out: &Path,
) -> u8 {
    let family: Family = match family.parse() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let spec = GenSpec::new(family, n, branching.to_vec(), layers, seed);
    let game = match generate(&spec) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Err(e) = fs::write(out, serialize_game(&game)) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return 1;
    }
    println!(
        "wrote {} ({} nodes, infosets per player {:?})",
        out.display(),
        game.num_nodes(),
        spec.infoset_counts()
    );
    0
}

pub fn cmd_bench(spec_path: &Path, out: &Path, jobs: usize) -> u8 {
    let text = match read_file(spec_path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let spec: BenchSpec = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: malformed bench spec: {e}");
            return 1;
        }
    };
    let results = match run_bench(&spec, jobs.max(1)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let csv = results_to_csv(&results);
    if let Err(e) = fs::write(out, &csv) {
        eprintln!("error: cannot write {}: {e}", out.display());
        return 1;
    }
    for rr in &results {
        for mr in &rr.per_method {
            println!(
                "{:?} n={} {} {}: {}/{} instances solved",
                rr.row.family,
                rr.row.n,
                mr.method,
                mr.refinement,
                mr.successes(),
                mr.instances.len()
            );
        }
    }
    0
}
