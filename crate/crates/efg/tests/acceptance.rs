//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test -p efg --test acceptance -- --nocapture`.

use std::collections::BTreeMap;

use efg::Refinement;
use efg::bench::{BenchRow, BenchSpec, results_to_csv, run_bench};
use efg::fixtures;
use efg::game::{Game, SubgameIndex, subgame_decomposition};
use efg::generate::{Family, GenSpec, generate};
use efg::homotopy::{
    Layout, Method, SolverConfig, VecSink, fd_jacobian, residual, start_point, trace_path,
};
use efg::profile::{Assessment, BehaviorProfile};
use efg::verify::{brute_force_nash_check, check_nash, check_sgpe, construct_companion};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

fn firstgame_rows(game: &Game, rows: [[f64; 2]; 4]) -> BehaviorProfile {
    let mut b = BehaviorProfile::uniform(game);
    for (name, row) in ["p1.1", "p1.2", "p2.1", "p3.1"].iter().zip(rows) {
        b.set_row(game.infoset_by_name(name).unwrap(), row.to_vec());
    }
    b
}

fn assess(game: &Game, sub: &SubgameIndex, beta: &BehaviorProfile, mode: Refinement) -> Assessment {
    let (beta_tilde, mu) = construct_companion(game, sub, beta, mode);
    Assessment { beta: beta.clone(), beta_tilde, mu }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Classifies a profile of the three-component game against its equilibrium
/// families at the given tolerance.
fn firstgame_type(game: &Game, beta: &BehaviorProfile, tol: f64) -> Option<&'static str> {
    let row = |name: &str| beta.row(game.infoset_by_name(name).unwrap());
    let (top, late, mid, bottom) = (row("p1.1"), row("p1.2"), row("p2.1"), row("p3.1"));
    if linf(top, &[0.0, 1.0]) <= tol && linf(bottom, &[0.0, 1.0]) <= tol && mid[1] <= 2.0 / 3.0 + tol
    {
        return Some("type1");
    }
    if linf(top, &[1.0, 0.0]) <= tol && linf(mid, &[1.0, 0.0]) <= tol && bottom[1] <= 1.0 / 3.0 + tol
    {
        return Some("type2");
    }
    let exact: [&[f64]; 4] =
        [&[24.0 / 49.0, 25.0 / 49.0], &[0.0, 1.0], &[3.0 / 8.0, 5.0 / 8.0], &[0.25, 0.75]];
    if linf(top, exact[0]) <= tol
        && linf(late, exact[1]) <= tol
        && linf(mid, exact[2]) <= tol
        && linf(bottom, exact[3]) <= tol
    {
        return Some("type3");
    }
    None
}

#[test]
fn criterion_1_fixture_equilibria() {
    let game = fixtures::firstgame();
    let sub = subgame_decomposition(&game);
    for method in [Method::Logm, Method::Cqpm] {
        let config = SolverConfig::uniform(&game);
        let out = trace_path(&game, &sub, &config, method, Refinement::Nash, None)
            .unwrap_or_else(|e| panic!("{method} trace failed: {e}"));
        assert!(out.final_t < 1e-5, "{method}: t = {}", out.final_t);
        assert!(out.iterations <= 100_000);
        let class = firstgame_type(&game, &out.beta, 1e-4)
            .unwrap_or_else(|| panic!("{method}: endpoint outside the three families"));
        println!(
            "criterion 1 [{} nash]: endpoint in {class} after {} iterations (t = {:.2e})",
            method, out.iterations, out.final_t
        );
    }
    println!("criterion 1 (fixture equilibria, both methods): PASS");
}

#[test]
fn criterion_2_fixture_sgpe_and_path_divergence() {
    let game = fixtures::secondgame();
    let sub = subgame_decomposition(&game);
    let config = SolverConfig::uniform(&game);
    let out = trace_path(&game, &sub, &config, Method::Logm, Refinement::Sgpe, None).unwrap();
    assert!(out.final_t < 1e-5);
    let sgpe_points: [[[f64; 2]; 4]; 3] = [
        [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], // (Y, C, I, B)
        [[0.0, 1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 0.0]], // (Y, D, I, A)
        [[0.0, 1.0], [0.5, 0.5], [0.0, 1.0], [0.5, 0.5]], // (Y, 1/2, O, 1/2)
    ];
    let names = ["p1.1", "p1.2", "p2.1", "p3.1"];
    let matched = sgpe_points.iter().position(|point| {
        names.iter().zip(point).all(|(name, target)| {
            linf(out.beta.row(game.infoset_by_name(name).unwrap()), target) <= 1e-4
        })
    });
    let matched = matched.expect("sgpe endpoint must match one of the three equilibria");
    println!("criterion 2 [logm sgpe]: endpoint matches listed equilibrium #{}", matched + 1);

    // The Nash path on the same game must end at a verified Nash point.
    let out_nash = trace_path(&game, &sub, &config, Method::Logm, Refinement::Nash, None).unwrap();
    let a = Assessment {
        beta: out_nash.beta.clone(),
        beta_tilde: out_nash.beta_tilde.clone(),
        mu: out_nash.mu.clone(),
    };
    let tol = efg::homotopy::endpoint_tol(&game, &config);
    let report = check_nash(&game, &sub, &a, tol).unwrap();
    assert!(report.pass, "nash endpoint failed verification: {}", report.max_residual);
    println!("criterion 2 [logm nash]: endpoint verified at tol {tol:.2e}");
    println!("criterion 2 (fixture SGPE + nash/sgpe divergence): PASS");
}

fn random_interior_profile(game: &Game, rng: &mut impl Rng) -> BehaviorProfile {
    let mut b = BehaviorProfile::uniform(game);
    for j in game.infoset_ids() {
        let row = b.row_mut(j);
        let mut sum = 0.0;
        for x in row.iter_mut() {
            *x = rng.gen_range(0.02..1.0);
            sum += *x;
        }
        row.iter_mut().for_each(|x| *x /= sum);
    }
    b
}

#[test]
fn criterion_3_oracle_equivalence() {
    let mut rng = ChaCha12Rng::seed_from_u64(2024);
    let mut perturbed_checked = 0usize;
    for seed in 0..100u64 {
        let spec = GenSpec::new(Family::A, 3, vec![2, 2, 2], 1, 3000 + seed);
        let game = generate(&spec).unwrap();
        let sub = subgame_decomposition(&game);
        for method in [Method::Logm, Method::Cqpm] {
            let mut config = SolverConfig::uniform(&game);
            config.polish = true;
            let out = trace_path(&game, &sub, &config, method, Refinement::Nash, None)
                .unwrap_or_else(|e| panic!("seed {seed} {method}: {e}"));
            let bf = brute_force_nash_check(&game, &out.beta, 1e-5, 1 << 20).unwrap();
            assert!(bf.is_nash, "seed {seed} {method}: endpoint gain {:.3e}", bf.worst_gain);
        }
        // Five perturbed profiles per game: the characterization and the
        // enumeration oracle must agree in both directions.
        for _ in 0..5 {
            let profile = random_interior_profile(&game, &mut rng);
            let a = assess(&game, &sub, &profile, Refinement::Nash);
            let check = check_nash(&game, &sub, &a, 1e-6).unwrap();
            let bf = brute_force_nash_check(&game, &profile, 1e-6, 1 << 20).unwrap();
            assert_eq!(
                check.pass, bf.is_nash,
                "seed {seed}: checker {} vs oracle {} (residual {:.3e}, gain {:.3e})",
                check.pass, bf.is_nash, check.max_residual, bf.worst_gain
            );
            perturbed_checked += 1;
        }
    }
    assert_eq!(perturbed_checked, 500);
    println!("criterion 3 (oracle equivalence on 200 endpoints + 500 profiles): PASS");
}

#[test]
fn criterion_4_characterization_round_trip() {
    let g1 = fixtures::firstgame();
    let s1 = subgame_decomposition(&g1);
    let mut passes = 0usize;

    // Component 1: top player out, bottom player in, middle mixing below 2/3.
    for (q, r) in [(0.0, 0.0), (0.25, 1.0 / 6.0), (0.5, 1.0 / 3.0), (0.75, 0.5), (1.0, 2.0 / 3.0)]
    {
        let beta = firstgame_rows(&g1, [[0.0, 1.0], [q, 1.0 - q], [1.0 - r, r], [0.0, 1.0]]);
        let a = assess(&g1, &s1, &beta, Refinement::Nash);
        let report = check_nash(&g1, &s1, &a, 1e-9).unwrap();
        assert!(report.pass, "component 1 (q={q}, r={r}): {:.3e}", report.max_residual);
        passes += 1;
    }
    // Component 2: top player in, middle out, bottom mixing below 1/3.
    for (q, y) in [(0.0, 0.0), (0.25, 1.0 / 12.0), (0.5, 1.0 / 6.0), (0.75, 0.25), (1.0, 1.0 / 3.0)]
    {
        let beta = firstgame_rows(&g1, [[1.0, 0.0], [q, 1.0 - q], [1.0, 0.0], [1.0 - y, y]]);
        let a = assess(&g1, &s1, &beta, Refinement::Nash);
        let report = check_nash(&g1, &s1, &a, 1e-9).unwrap();
        assert!(report.pass, "component 2 (q={q}, y={y}): {:.3e}", report.max_residual);
        passes += 1;
    }
    // The isolated fully mixed point.
    let beta = firstgame_rows(
        &g1,
        [[24.0 / 49.0, 25.0 / 49.0], [0.0, 1.0], [3.0 / 8.0, 5.0 / 8.0], [0.25, 0.75]],
    );
    let a = assess(&g1, &s1, &beta, Refinement::Nash);
    assert!(check_nash(&g1, &s1, &a, 1e-9).unwrap().pass);
    passes += 1;

    // Refutation points from the case analysis must fail.
    for rows in [
        [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 0.0]], // (A, b, R, N)
        [[0.0, 1.0], [1.0, 0.0], [0.1, 0.9], [0.0, 1.0]], // component-1 bound broken
        [[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.5, 0.5]], // component-2 bound broken
    ] {
        let beta = firstgame_rows(&g1, rows);
        let a = assess(&g1, &s1, &beta, Refinement::Nash);
        let report = check_nash(&g1, &s1, &a, 1e-9).unwrap();
        assert!(!report.pass, "refutation {rows:?} unexpectedly passed");
    }

    let g2 = fixtures::secondgame();
    let s2 = subgame_decomposition(&g2);
    let rows2 = |game: &Game, rows: [[f64; 2]; 4]| firstgame_rows(game, rows);

    // The two pure components and four family classes of the subgame game.
    let mut nash_points: Vec<[[f64; 2]; 4]> = vec![
        [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], // (Y, C, I, B)
        [[0.0, 1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 0.0]], // (Y, D, I, A)
    ];
    // Out at the top, third player leaning A; entry must be likely enough.
    for (c, i) in [(0.0, 0.8), (0.25, 0.85), (0.5, 0.9), (0.75, 0.95), (1.0, 1.0)] {
        nash_points.push([[1.0, 0.0], [c, 1.0 - c], [i, 1.0 - i], [0.75, 0.25]]);
        nash_points.push([[1.0, 0.0], [c, 1.0 - c], [i, 1.0 - i], [0.25, 0.75]]);
    }
    // Out at the top with an even third player.
    for (c, i) in [(0.0, 0.5), (0.25, 0.625), (0.5, 0.75), (0.75, 0.875), (1.0, 1.0)] {
        nash_points.push([[1.0, 0.0], [c, 1.0 - c], [i, 1.0 - i], [0.5, 0.5]]);
    }
    // In at the top but opting out below; mismatch kept small.
    for (c, a) in [(0.5, 0.5), (1.0, 1.0), (0.0, 0.0), (0.8, 0.7), (0.3, 0.3)] {
        nash_points.push([[0.0, 1.0], [c, 1.0 - c], [0.0, 1.0], [a, 1.0 - a]]);
    }
    for rows in &nash_points {
        let beta = rows2(&g2, *rows);
        let a = assess(&g2, &s2, &beta, Refinement::Nash);
        let report = check_nash(&g2, &s2, &a, 1e-9).unwrap();
        assert!(report.pass, "nash point {rows:?}: {:.3e}", report.max_residual);
        passes += 1;
    }
    // Refutations for the same game.
    for rows in [
        [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], // (N, C, O, A): entry too unlikely
        [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]], // (Y, C, I, A): third player wrong
        [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]], // (Y, C, O, B): entry payoff 9 beats 5
    ] {
        let beta = rows2(&g2, rows);
        let a = assess(&g2, &s2, &beta, Refinement::Nash);
        assert!(!check_nash(&g2, &s2, &a, 1e-9).unwrap().pass, "{rows:?}");
    }

    // Subgame perfection: the three listed points pass, the out-opting Nash
    // points fail inside the subgame.
    for rows in [
        [[0.0, 1.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        [[0.0, 1.0], [0.0, 1.0], [1.0, 0.0], [1.0, 0.0]],
        [[0.0, 1.0], [0.5, 0.5], [0.0, 1.0], [0.5, 0.5]],
    ] {
        let beta = rows2(&g2, rows);
        let a = assess(&g2, &s2, &beta, Refinement::Sgpe);
        let report = check_sgpe(&g2, &s2, &a, 1e-9).unwrap();
        assert!(report.pass, "sgpe point {rows:?}: {:.3e}", report.max_residual);
        passes += 1;
    }
    for rows in [
        [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]], // (Y, C, O, A): Nash but not SGPE
        [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]], // (Y, C, O, B)
    ] {
        let beta = rows2(&g2, rows);
        let a = assess(&g2, &s2, &beta, Refinement::Sgpe);
        assert!(!check_sgpe(&g2, &s2, &a, 1e-9).unwrap().pass, "{rows:?}");
    }
    // ... and (Y, C, O, A) is indeed Nash.
    let beta = rows2(&g2, [[0.0, 1.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
    let a = assess(&g2, &s2, &beta, Refinement::Nash);
    assert!(check_nash(&g2, &s2, &a, 1e-9).unwrap().pass);

    println!("criterion 4 (characterization round-trip, {passes} equilibria + 8 refutations): PASS");
}

#[test]
fn criterion_5_path_invariants() {
    let mut checked_points = 0usize;
    let mut games: Vec<Game> = vec![fixtures::firstgame(), fixtures::secondgame()];
    for seed in 0..3u64 {
        games.push(generate(&GenSpec::new(Family::A, 3, vec![2, 2, 2], 1, 5000 + seed)).unwrap());
    }
    for game in &games {
        let sub = subgame_decomposition(game);
        let config = SolverConfig::uniform(game);
        let layout = Layout::new(game);
        for method in [Method::Logm, Method::Cqpm] {
            for refinement in [Refinement::Nash, Refinement::Sgpe] {
                // Start-point residuals are exact.
                let start = start_point(game, &sub, &config, method, refinement);
                let r0 = residual(game, &sub, &config, &start);
                assert!(r0.amax() <= 1e-12, "start residual {}", r0.amax());

                let mut sink = VecSink::default();
                trace_path(game, &sub, &config, method, refinement, Some(&mut sink)).unwrap();
                for rec in &sink.records {
                    let slack = 10.0 * config.corrector_tol(rec.t.max(config.t_min * 1e-3));
                    let beta = rec.state.beta(game, &layout);
                    let tilde = rec.state.beta_tilde(game, &layout);
                    let mu = rec.state.mu(game, &layout);
                    for j in game.infoset_ids() {
                        let sums = [
                            beta.row(j).iter().sum::<f64>(),
                            tilde.row(j).iter().sum::<f64>(),
                            mu.row(j).iter().sum::<f64>(),
                        ];
                        for s in sums {
                            assert!((s - 1.0).abs() <= slack, "simplex sum {s} at t={}", rec.t);
                        }
                        let xi = rec.state.xi(game, &layout);
                        let mass: f64 = xi[j.0].iter().sum();
                        assert!(
                            (mass - rec.t).abs() <= slack,
                            "mass sum {mass} vs t {} (slack {slack})",
                            rec.t
                        );
                        if method == Method::Logm {
                            assert!(beta.row(j).iter().all(|&v| v > 0.0));
                            assert!(tilde.row(j).iter().all(|&v| v > 0.0));
                            assert!(xi[j.0].iter().all(|&v| v > 0.0));
                        }
                    }
                    checked_points += 1;
                }
            }
        }
    }
    println!("criterion 5 (path invariants on {checked_points} accepted points): PASS");
}

#[test]
fn criterion_6_benchmark_shape() {
    let rows = vec![
        BenchRow {
            family: Family::A,
            n: 3,
            branching: vec![2, 3, 3],
            layers: 1,
            instances: 10,
            methods: vec!["logm".into(), "cqpm".into()],
            refinement: "nash".into(),
            seed: 6000,
            timeout_s: Some(120.0),
            max_iters: None,
            t_min: None,
            polish: None,
        },
        BenchRow {
            family: Family::B,
            n: 4,
            branching: vec![2, 2, 2, 2],
            layers: 1,
            instances: 10,
            methods: vec!["logm".into(), "cqpm".into()],
            refinement: "nash".into(),
            seed: 6100,
            timeout_s: Some(120.0),
            max_iters: None,
            t_min: None,
            polish: None,
        },
        BenchRow {
            family: Family::C,
            n: 2,
            branching: vec![2, 2],
            layers: 2,
            instances: 10,
            methods: vec!["logm".into(), "cqpm".into()],
            refinement: "nash".into(),
            seed: 6200,
            timeout_s: Some(120.0),
            max_iters: None,
            t_min: None,
            polish: None,
        },
    ];
    let spec = BenchSpec { rows };
    let results = run_bench(&spec, 1).unwrap();

    let csv = results_to_csv(&results);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "family,n,m,branching,L,method,refinement,stat,time_s,iters");
    // 3 rows x 2 methods x 3 stats.
    assert_eq!(lines.len(), 1 + 18);
    assert!(csv.contains("A,3,1-1-2,2-3-3,1,logm,nash,avg"));
    assert!(csv.contains("B,4,1-2-2-2,2-2-2-2,1,cqpm,nash,max"));
    assert!(csv.contains("C,2,3-5,2-2,2,logm,nash,min"));

    for rr in &results {
        let mut iters: BTreeMap<Method, BTreeMap<u64, usize>> = BTreeMap::new();
        for mr in &rr.per_method {
            assert!(
                mr.successes() >= 9,
                "{:?} {}: only {}/10 instances solved",
                rr.row.family,
                mr.method,
                mr.successes()
            );
            for inst in &mr.instances {
                if inst.success {
                    iters.entry(mr.method).or_default().insert(inst.seed, inst.iterations);
                }
            }
        }
        // Qualitative ordering: the barrier method needs no more iterations
        // than the penalty method on most shared instances.
        let logm = &iters[&Method::Logm];
        let cqpm = &iters[&Method::Cqpm];
        let shared: Vec<u64> = logm.keys().filter(|k| cqpm.contains_key(k)).copied().collect();
        let ordered = shared.iter().filter(|k| logm[k] <= cqpm[k]).count();
        assert!(
            ordered * 10 >= shared.len() * 7,
            "{:?}: barrier method ahead on only {ordered}/{} shared instances",
            rr.row.family,
            shared.len()
        );
        println!(
            "criterion 6 [{:?}]: {}/{} shared instances ordered logm <= cqpm",
            rr.row.family,
            ordered,
            shared.len()
        );
    }
    println!("criterion 6 (benchmark shape over three desk-scale rows): PASS");
}

#[test]
fn criterion_7_numerical_hygiene() {
    // Forward-difference Jacobian columns of the barrier residual agree with
    // two-sided differences on random states.
    let game = fixtures::firstgame();
    let sub = subgame_decomposition(&game);
    let config = SolverConfig::uniform(&game);
    let layout = Layout::new(&game);
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    for _ in 0..20 {
        let mut state = start_point(&game, &sub, &config, Method::Logm, Refinement::Nash);
        state.t = rng.gen_range(0.1..0.9);
        for v in state.x.iter_mut() {
            *v = rng.gen_range(0.05..0.95);
        }
        let mut f = |x: &[f64], out: &mut [f64]| {
            let mut s = state.clone();
            s.x.copy_from_slice(x);
            let r = residual(&game, &sub, &config, &s);
            out.copy_from_slice(r.as_slice());
        };
        let forward = fd_jacobian(&mut f, state.x.as_slice(), layout.dim);
        // Central differences at a larger step as the independent reference.
        let mut central = nalgebra::DMatrix::zeros(layout.dim, layout.dim);
        let h0 = f64::EPSILON.powf(1.0 / 3.0);
        let mut plus = vec![0.0; layout.dim];
        let mut minus = vec![0.0; layout.dim];
        for k in 0..layout.dim {
            let mut xs = state.x.as_slice().to_vec();
            let h = h0 * (1.0 + xs[k].abs());
            xs[k] += h;
            f(&xs, &mut plus);
            xs[k] -= 2.0 * h;
            f(&xs, &mut minus);
            for r in 0..layout.dim {
                central[(r, k)] = (plus[r] - minus[r]) / (2.0 * h);
            }
        }
        for k in 0..layout.dim {
            for r in 0..layout.dim {
                let diff = (forward[(r, k)] - central[(r, k)]).abs();
                assert!(
                    diff <= 1e-6 * (1.0 + central[(r, k)].abs()),
                    "col {k} row {r}: {} vs {}",
                    forward[(r, k)],
                    central[(r, k)]
                );
            }
        }
    }

    // Byte-identical trace CSVs across two identical solve invocations.
    let dir = tempfile::tempdir().unwrap();
    let game_path = dir.path().join("firstgame.game.json");
    std::fs::write(&game_path, fixtures::FIRSTGAME).unwrap();
    let trace_a = dir.path().join("a.csv");
    let trace_b = dir.path().join("b.csv");
    for trace in [&trace_a, &trace_b] {
        let code = efg::cli::cmd_solve(
            &game_path,
            "logm",
            "nash",
            7,
            Some(trace),
            1e-4,
            1e-5,
            false,
            None,
        );
        assert_eq!(code, 0);
    }
    let a = std::fs::read(&trace_a).unwrap();
    let b = std::fs::read(&trace_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "trace CSVs differ between identical runs");
    println!("criterion 7 (jacobian agreement + byte-identical traces): PASS");
}
