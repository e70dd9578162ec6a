//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line; the test
//! fails at the end if any criterion failed.
//!
//! Run with `cargo test -p cyclelap-cli --test acceptance -- --nocapture`.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use cyclelap::analysis::{
    direct_solve_oracle, incidence_matrix, matrix_rank, optimal_flow_oracle, random_pure_basis,
    simple_cycles, verify_gap_bound,
};
use cyclelap::operators::{curl, cycle_function, divergence, gradient, laplacian_apply};
use cyclelap::solver::{
    cycle_update, gap, gap_definition, gap_off_tree, sample_cycle, solve, SolverConfig, Termination,
};
use cyclelap::tree::{feasible_flow, spanning_tree, tree_basis};
use cyclelap::{
    inner_product, EdgeFunction, Graph, SpanningTree, TreeBasis, TreeStrategy, VertexFunction,
};
use cyclelap_cli::generate;
use cyclelap_cli::verify::{expected_progress, random_rhs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / 1f64.max(x.abs()).max(y.abs())
}

fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Connected random graph with `n` in `2..=max_n` and between `n - 1` and
/// `cap` edges.
fn random_graph(rng: &mut ChaCha8Rng, max_n: usize, cap: usize) -> Graph {
    let n = rng.random_range(2..=max_n);
    let hi = (n * (n - 1) / 2).min(cap.max(n - 1));
    let m = rng.random_range(n - 1..=hi);
    generate::random(n, m, rng.random()).unwrap()
}

fn feasible_with_cycles(
    g: &Graph,
    t: &SpanningTree,
    basis: &TreeBasis,
    f: &[f64],
    rng: &mut ChaCha8Rng,
) -> EdgeFunction {
    let mut a = feasible_flow(g, t, f).unwrap();
    for c in basis.cycles() {
        c.add_scaled_to(&mut a, rng.random_range(-2.0..2.0));
    }
    a
}

fn mean_zero(v: &[f64]) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - mean).collect()
}

fn triangle_exactness() -> Outcome {
    let start = Instant::now();
    let g = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
    let f = [-3.0, 0.0, 3.0];
    let t = spanning_tree(&g, TreeStrategy::Dfs, 0).unwrap();
    let basis = tree_basis(&g, &t).unwrap();
    let mut a = feasible_flow(&g, &t, &f).unwrap();
    let energy0 = a.norm_squared();
    let gap0 = gap(&g, &t, &basis, &a, &f).unwrap();
    let step = cycle_update(&mut a, &basis.cycles()[0]).unwrap();
    let energy1 = a.norm_squared();
    let gap1 = gap(&g, &t, &basis, &a, &f).unwrap();
    let elapsed = start.elapsed();

    let tree_ok = t.tree_edges() == [0, 1];
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    let values_ok = close(energy0, 18.0)
        && close(gap0, 36.0)
        && close(step.alpha.abs(), 2.0)
        && a.iter().zip([1.0, 1.0, 2.0]).all(|(x, y)| close(*x, y))
        && close(energy1, 6.0)
        && close(gap1, 0.0)
        && close(step.delta_energy, -12.0);
    outcome(
        tree_ok && values_ok && elapsed < Duration::from_millis(1),
        format!(
            "xi 18 -> {energy1}, gap {gap0} -> {gap1}, alpha={}, A={:?}, {:.3} ms",
            step.alpha,
            a.as_slice(),
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut unconverged = 0;
    for i in 0..200 {
        let g = random_graph(&mut rng, 30, 90);
        let f = random_rhs(&mut rng, g.vertex_count());
        let cfg = SolverConfig {
            tol: 1e-10,
            seed: i,
            ..Default::default()
        };
        let r = solve(&g, &f, &cfg).unwrap();
        if r.termination != Termination::Converged {
            unconverged += 1;
        }
        let u = mean_zero(&r.potentials);
        let oracle = mean_zero(&direct_solve_oracle(&g, &f).unwrap());
        let scale = oracle.iter().fold(1f64, |m, x| m.max(x.abs()));
        let err = u
            .iter()
            .zip(&oracle)
            .fold(0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale;
        worst = worst.max(err);
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-6 && unconverged == 0 && elapsed < Duration::from_secs(10),
        format!(
            "worst rel err {worst:e}, {unconverged} unconverged, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn gap_identity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut forms, mut negative, mut bound) = (0f64, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..1000 {
        let g = random_graph(&mut rng, 25, 60);
        let strategy = [
            TreeStrategy::Bfs,
            TreeStrategy::Dfs,
            TreeStrategy::LowStretchHeuristic,
        ][i % 3];
        let t = spanning_tree(&g, strategy, rng.random_range(0..g.vertex_count())).unwrap();
        let basis = tree_basis(&g, &t).unwrap();
        let f = random_rhs(&mut rng, g.vertex_count());
        let a = feasible_with_cycles(&g, &t, &basis, &f, &mut rng);
        let cycle_form = gap(&g, &t, &basis, &a, &f).unwrap();
        let definition = gap_definition(&g, &t, &a, &f).unwrap();
        let off_tree = gap_off_tree(&g, &t, &a).unwrap();
        forms = forms
            .max(rel_err(cycle_form, definition))
            .max(rel_err(cycle_form, off_tree));
        negative = negative.min(cycle_form).min(definition).min(off_tree);
        let best = optimal_flow_oracle(&g, &f).unwrap().norm_squared();
        bound = bound.max(a.norm_squared() - best - cycle_form);
    }
    outcome(
        forms <= 1e-9 && negative >= -1e-9 && bound <= 1e-9,
        format!("forms rel err {forms:e}, min gap {negative:e}, max (D - gap) {bound:e}"),
    )
}

fn monotone_and_exact_decrement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut increases = 0;
    for seed in 0..20 {
        let g = random_graph(&mut rng, 30, 80);
        let f = random_rhs(&mut rng, g.vertex_count());
        let cfg = SolverConfig {
            tol: 1e-10,
            seed,
            gap_check_every: Some(1),
            ..Default::default()
        };
        let r = solve(&g, &f, &cfg).unwrap();
        increases += r
            .trace
            .windows(2)
            .filter(|w| w[1].energy > w[0].energy)
            .count();
    }

    let mut worst = 0f64;
    let mut pairs = 0;
    while pairs < 10_000 {
        let g = random_graph(&mut rng, 20, 50);
        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        let basis = tree_basis(&g, &t).unwrap();
        if basis.is_empty() {
            continue;
        }
        for _ in 0..50 {
            let mut a = random_vec(&mut rng, g.edge_count());
            let c = &basis.cycles()[sample_cycle(&basis, &mut rng).unwrap()];
            let expected = -c.dot(&a).powi(2) / c.norm_squared() as f64;
            let before: f64 = a.iter().map(|x| x * x).sum();
            let step = cycle_update(&mut a, c).unwrap();
            let after: f64 = a.iter().map(|x| x * x).sum();
            worst = worst
                .max((step.delta_energy - expected).abs() / expected.abs().max(f64::MIN_POSITIVE))
                .max(((after - before) - expected).abs() / before.max(1.0));
            pairs += 1;
        }
    }
    outcome(
        increases == 0 && worst <= 1e-9,
        format!("{increases} energy increases over 20 traces, worst decrement err {worst:e} over {pairs} pairs"),
    )
}

fn expected_progress_torus() -> Outcome {
    let start = Instant::now();
    let g = generate::torus(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
    let basis = tree_basis(&g, &t).unwrap();
    let f = random_rhs(&mut rng, g.vertex_count());
    let a = feasible_with_cycles(&g, &t, &basis, &f, &mut rng);
    let check = expected_progress(&g, &t, &basis, &a, &f, 10_000, &mut rng);
    let elapsed = start.elapsed();
    outcome(
        check.passed && elapsed < Duration::from_secs(5),
        format!(
            "|z|={:.3}, {}, {:.2} s",
            check.worst,
            check.note,
            elapsed.as_secs_f64()
        ),
    )
}

fn convergence_rate() -> Outcome {
    let start = Instant::now();
    let g = generate::torus(6).unwrap();
    let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
    let basis = tree_basis(&g, &t).unwrap();
    let tau = basis.tau();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = random_rhs(&mut rng, g.vertex_count());
    let best = optimal_flow_oracle(&g, &f).unwrap().norm_squared();
    let start_flow = feasible_flow(&g, &t, &f).unwrap();
    let d0 = start_flow.norm_squared() - best;
    let steps = (5.0 * tau).floor() as usize;
    let seeds = 200;
    let mut mean = vec![0f64; steps + 1];
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = start_flow.clone();
        mean[0] += d0;
        for d in mean.iter_mut().skip(1) {
            let c = &basis.cycles()[sample_cycle(&basis, &mut rng).unwrap()];
            cycle_update(&mut a, c).unwrap();
            *d += a.norm_squared() - best;
        }
    }
    let mut worst_ratio = 0f64;
    let mut worst_k = 0;
    for (k, d) in mean.iter().enumerate() {
        let bound = d0 * (1.0 - 1.0 / tau).powi(k as i32);
        let ratio = d / seeds as f64 / bound;
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_k = k;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst_ratio <= 1.15 && elapsed < Duration::from_secs(60),
        format!(
            "tau={tau}, k<={steps}, max mean(D_k)/(D_0 (1-1/tau)^k) = {worst_ratio:.4} at k={worst_k}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn dimension_and_basis() -> Outcome {
    let mut graphs = vec![
        ("path 6".to_string(), generate::path(6).unwrap()),
        ("cycle 7".to_string(), generate::cycle(7).unwrap()),
        ("grid 3x4".to_string(), generate::grid(3, 4).unwrap()),
        ("grid 2x3".to_string(), generate::grid(2, 3).unwrap()),
    ];
    for k in 3..=8 {
        graphs.push((format!("torus {k}"), generate::torus(k).unwrap()));
    }
    for seed in 0..20 {
        let n = 4 + seed as usize % 9;
        let m = (n - 1 + seed as usize).min(n * (n - 1) / 2).min(20);
        graphs.push((
            format!("random {n} {m}"),
            generate::random(n, m, seed).unwrap(),
        ));
    }
    let mut failures = Vec::new();
    let mut ranked = 0;
    for (name, g) in &graphs {
        let p = g.edge_count() + 1 - g.vertex_count();
        if name.starts_with("torus") {
            let k = (g.vertex_count() as f64).sqrt() as usize;
            if p != k * k + 1 {
                failures.push(format!("{name}: p={p}"));
            }
        }
        for strategy in [
            TreeStrategy::Bfs,
            TreeStrategy::Dfs,
            TreeStrategy::LowStretchHeuristic,
        ] {
            let t = spanning_tree(g, strategy, 0).unwrap();
            let basis = tree_basis(g, &t).unwrap();
            if basis.len() != p {
                failures.push(format!(
                    "{name} {strategy}: {} cycles, expected {p}",
                    basis.len()
                ));
            }
            if g.edge_count() <= 20 {
                let m = incidence_matrix(basis.cycles(), g.edge_count()).unwrap();
                let rank = matrix_rank(&m.dense_rows());
                ranked += 1;
                if rank != p {
                    failures.push(format!("{name} {strategy}: rank {rank}, expected {p}"));
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} graphs x 3 trees, {ranked} rank checks; {}",
            graphs.len(),
            failures.join("; ")
        ),
    )
}

fn conditional_gap_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut bases, mut literal, mut restricted, mut violations, mut exceed) = (0, 0, 0, 0, 0);
    let mut graphs = vec![
        generate::cycle(5).unwrap(),
        generate::grid(2, 3).unwrap(),
        generate::grid(3, 3).unwrap(),
        generate::torus(3).unwrap(),
    ];
    for _ in 0..12 {
        let n = rng.random_range(4..=10);
        let m = rng.random_range(n..=(n * (n - 1) / 2).min(30).min(n + 8));
        graphs.push(generate::random(n, m, rng.random()).unwrap());
    }
    for g in &graphs {
        assert!(g.edge_count() <= 30);
        let t = spanning_tree(g, TreeStrategy::Bfs, 0).unwrap();
        let tree = tree_basis(g, &t).unwrap();
        let mut candidates = vec![tree.cycles().to_vec()];
        if let Some(all) = simple_cycles(g, 5_000) {
            for _ in 0..4 {
                if let Some(b) = random_pure_basis(g, &all, &mut rng) {
                    candidates.push(b);
                }
            }
        }
        for basis in candidates {
            let report = verify_gap_bound(g, &t, &basis, 100, &mut rng).unwrap();
            bases += 1;
            literal += usize::from(report.full_gram.is_some_and(|c| c.psd));
            restricted += usize::from(report.restricted_gram.is_some_and(|c| c.psd));
            violations += report.violations.len();
            exceed += report.exceedances;
        }
    }
    outcome(
        violations == 0,
        format!(
            "{bases} pure bases x 100 flows: literal hypothesis held on {literal}, \
             restricted on {restricted}; {violations} violations, {exceed} unconditional exceedances"
        ),
    )
}

fn operator_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut adjoint, mut curl_grad, mut cycle_div, mut dense) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..500 {
        let g = random_graph(&mut rng, if i % 2 == 0 { 8 } else { 20 }, 40);
        let (n, m) = (g.vertex_count(), g.edge_count());
        let u = random_vec(&mut rng, n);
        let a = random_vec(&mut rng, m);
        let lhs = inner_product(&gradient(&g, &u).unwrap(), &a).unwrap();
        let rhs = inner_product(&u, &divergence(&g, &a).unwrap()).unwrap();
        adjoint = adjoint.max(rel_err(lhs, rhs));

        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        let basis = tree_basis(&g, &t).unwrap();
        let grad = gradient(&g, &u).unwrap();
        for v in curl(&grad, basis.cycles()).unwrap() {
            curl_grad = curl_grad.max(v.abs());
        }
        for c in basis.cycles() {
            cycle_div = cycle_div.max(divergence(&g, &c.to_dense(m)).unwrap().norm_inf());
        }

        if n <= 8 {
            let mut mat = vec![vec![0f64; n]; n];
            for &(x, y) in g.edges() {
                mat[x][x] += 1.0;
                mat[y][y] += 1.0;
                mat[x][y] -= 1.0;
                mat[y][x] -= 1.0;
            }
            let lu = laplacian_apply(&g, &u).unwrap();
            for (row, got) in mat.iter().zip(lu.iter()) {
                let want: f64 = row.iter().zip(&u).map(|(l, x)| l * x).sum();
                dense = dense.max(rel_err(want, *got));
            }
        }
    }
    // a closed walk around a square, as a cycle function
    let sq = Graph::new(4, vec![(0, 1), (1, 2), (3, 2), (0, 3)]).unwrap();
    let walk = cycle_function(&sq, &[0, 1, 2, 3, 0]).unwrap();
    cycle_div = cycle_div.max(divergence(&sq, &walk.to_dense(4)).unwrap().norm_inf());
    let worst = adjoint.max(curl_grad).max(cycle_div).max(dense);
    outcome(
        worst <= 1e-10,
        format!(
            "adjoint {adjoint:e}, curl.grad {curl_grad:e}, div C {cycle_div:e}, dense L {dense:e}"
        ),
    )
}

fn reproducibility() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let graph = dir.path().join("g.txt");
    let g = generate::random(30, 70, 10).unwrap();
    fs::write(&graph, cyclelap_cli::formats::format_graph(&g)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f: VertexFunction = random_rhs(&mut rng, 30);
    let rhs = dir.path().join("f.txt");
    fs::write(&rhs, cyclelap_cli::formats::format_vector(&f)).unwrap();
    let run = |tag: &str| {
        let trace = dir.path().join(format!("trace-{tag}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_cyclelap"))
            .arg("solve")
            .arg(&graph)
            .arg(&rhs)
            .args(["--seed", "42", "--u-out"])
            .arg(dir.path().join(format!("u-{tag}.txt")))
            .arg("--trace-out")
            .arg(&trace)
            .output()
            .unwrap();
        // wall-clock time is the one field that cannot repeat
        let summary: Vec<u8> = String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("wall_time_ms="))
            .flat_map(|l| format!("{l}\n").into_bytes())
            .collect();
        (out.status.code(), fs::read(trace).unwrap(), summary)
    };
    let (first, second) = (run("a"), run("b"));
    outcome(
        first.0 == Some(0) && first == second,
        format!(
            "trace {} bytes, summary {} bytes, identical={}",
            first.1.len(),
            first.2.len(),
            first == second
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("triangle exactness", triangle_exactness),
        ("oracle equivalence", oracle_equivalence),
        ("gap identity suite", gap_identity_suite),
        (
            "energy monotonicity and exact decrement",
            monotone_and_exact_decrement,
        ),
        ("expected progress", expected_progress_torus),
        ("convergence rate", convergence_rate),
        ("dimension and basis", dimension_and_basis),
        ("conditional gap bound", conditional_gap_bound),
        ("operator identities", operator_identities),
        ("reproducibility", reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {}", i + 1, result.detail);
        if !result.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
