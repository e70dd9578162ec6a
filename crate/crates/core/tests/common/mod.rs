#![allow(dead_code)]

use cyclelap::{Graph, VertexFunction};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected graph: random recursive tree plus `extra` random chords,
/// each edge randomly oriented.
pub fn random_graph(seed: u64, n: usize, extra: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (a, b) = (labels[i], labels[j]);
        present.insert((a.min(b), a.max(b)));
        edges.push(if rng.random_bool(0.5) { (a, b) } else { (b, a) });
    }
    let max_edges = n * (n - 1) / 2;
    let mut added = 0;
    while added < extra && edges.len() < max_edges {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b || !present.insert((a.min(b), a.max(b))) {
            continue;
        }
        edges.push((a, b));
        added += 1;
    }
    Graph::new(n, edges).expect("generated graph is valid")
}

pub fn torus(k: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..k {
            edges.push((i * k + j, i * k + (j + 1) % k));
            edges.push((i * k + j, ((i + 1) % k) * k + j));
        }
    }
    Graph::new(k * k, edges).unwrap()
}

pub fn random_rhs(rng: &mut impl Rng, n: usize) -> VertexFunction {
    let mut f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = f.iter().sum::<f64>() / n as f64;
    f.iter_mut().for_each(|x| *x -= mean);
    f.into()
}

pub fn random_vec(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * 1f64.max(x.abs()).max(y.abs())
}
