//! Deterministic graph generators.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use cyclelap::Graph;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("invalid generator parameters: {0}")]
pub struct InvalidParams(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Path,
    Cycle,
    Grid,
    Torus,
    Random,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Path => "path",
            GraphKind::Cycle => "cycle",
            GraphKind::Grid => "grid",
            GraphKind::Torus => "torus",
            GraphKind::Random => "random",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GraphKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "path" => Ok(GraphKind::Path),
            "cycle" => Ok(GraphKind::Cycle),
            "grid" => Ok(GraphKind::Grid),
            "torus" => Ok(GraphKind::Torus),
            "random" => Ok(GraphKind::Random),
            other => Err(format!(
                "unknown graph kind '{other}' (expected path, cycle, grid, torus or random)"
            )),
        }
    }
}

fn build(n: usize, edges: Vec<(usize, usize)>) -> Graph {
    Graph::new(n, edges).expect("generators produce valid graphs")
}

/// `0 -> 1 -> ... -> n-1`.
pub fn path(n: usize) -> Result<Graph, InvalidParams> {
    if n == 0 {
        return Err(InvalidParams("path needs n >= 1".into()));
    }
    Ok(build(n, (1..n).map(|i| (i - 1, i)).collect()))
}

/// Directed ring `0 -> 1 -> ... -> n-1 -> 0`.
pub fn cycle(n: usize) -> Result<Graph, InvalidParams> {
    if n < 3 {
        return Err(InvalidParams("cycle needs n >= 3".into()));
    }
    Ok(build(n, (0..n).map(|i| (i, (i + 1) % n)).collect()))
}

/// `rows x cols` grid, vertex `(i, j)` is `i * cols + j`; right edges first
/// within each vertex, then down edges.
pub fn grid(rows: usize, cols: usize) -> Result<Graph, InvalidParams> {
    if rows == 0 || cols == 0 {
        return Err(InvalidParams("grid needs rows, cols >= 1".into()));
    }
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                edges.push((v, v + 1));
            }
            if i + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Ok(build(rows * cols, edges))
}

/// `k x k` torus with a right and a down edge at every vertex (wrapping).
pub fn torus(k: usize) -> Result<Graph, InvalidParams> {
    if k < 3 {
        return Err(InvalidParams(
            "torus needs k >= 3 (smaller tori have 2-cycles)".into(),
        ));
    }
    let mut edges = Vec::with_capacity(2 * k * k);
    for i in 0..k {
        for j in 0..k {
            edges.push((i * k + j, i * k + (j + 1) % k));
            edges.push((i * k + j, ((i + 1) % k) * k + j));
        }
    }
    Ok(build(k * k, edges))
}

/// Uniform labelled spanning tree (random Prufer sequence) plus random extra
/// vertex pairs, every edge randomly oriented.
pub fn random(n: usize, m: usize, seed: u64) -> Result<Graph, InvalidParams> {
    if n == 0 {
        return Err(InvalidParams("random graph needs n >= 1".into()));
    }
    let max_edges = n * (n - 1) / 2;
    if m + 1 < n || m > max_edges {
        return Err(InvalidParams(format!(
            "random graph on {n} vertices needs {} <= m <= {max_edges}, got {m}",
            n - 1
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = prufer_tree(n, &mut rng);
    let mut present: HashSet<(usize, usize)> = pairs.iter().copied().collect();
    let extra = m - pairs.len();
    if extra * 2 <= max_edges {
        while pairs.len() < m {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            let key = (a.min(b), a.max(b));
            if a != b && present.insert(key) {
                pairs.push(key);
            }
        }
    } else {
        let mut absent: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|k| !present.contains(k))
            .collect();
        absent.shuffle(&mut rng);
        pairs.extend(absent.into_iter().take(extra));
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| if rng.random_bool(0.5) { (a, b) } else { (b, a) })
        .collect();
    Ok(build(n, edges))
}

/// Decode a uniformly random Prufer sequence into `(min, max)` vertex pairs.
fn prufer_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    match n {
        1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let vertices: Vec<usize> = (0..n).collect();
    let code: Vec<usize> = (0..n - 2)
        .map(|_| *vertices.choose(rng).expect("non-empty"))
        .collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut pairs = Vec::with_capacity(n - 1);
    for &v in &code {
        let leaf = leaves.pop_first().expect("a Prufer step always has a leaf");
        pairs.push((leaf.min(v), leaf.max(v)));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let a = leaves.pop_first().expect("two leaves remain");
    let b = leaves.pop_first().expect("two leaves remain");
    pairs.push((a, b));
    pairs
}

/// Dispatch on kind with positional integer parameters.
pub fn generate(kind: GraphKind, params: &[usize], seed: u64) -> Result<Graph, InvalidParams> {
    let want = |count: usize, usage: &str| {
        if params.len() == count {
            Ok(())
        } else {
            Err(InvalidParams(format!(
                "{kind} expects {usage}, got {} values",
                params.len()
            )))
        }
    };
    match kind {
        GraphKind::Path => want(1, "N").and_then(|_| path(params[0])),
        GraphKind::Cycle => want(1, "N").and_then(|_| cycle(params[0])),
        GraphKind::Grid => want(2, "ROWS COLS").and_then(|_| grid(params[0], params[1])),
        GraphKind::Torus => want(1, "K").and_then(|_| torus(params[0])),
        GraphKind::Random => want(2, "N M").and_then(|_| random(params[0], params[1], seed)),
    }
}
