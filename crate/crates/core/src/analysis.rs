//! Dense reference computations used to certify the sparse solver.
//!
//! Nothing here is on the solver's path. The direct oracle solves the
//! bordered Laplacian system by Gaussian elimination, and the cycle-basis
//! tools check dimension, rank and the Gram condition `M^T M - I >= 0` under
//! which the sum of squared curls over a pure-cycle basis bounds the gap.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeFunction, Graph, VertexFunction};
use crate::operators::{check_compatibility, divergence, gradient, Cycle};
use crate::solver::gap_off_tree;
use crate::tree::{feasible_flow, tree_basis, SpanningTree};
use crate::DEFAULT_TOL;

/// Largest vertex count accepted by the dense direct oracle.
pub const ORACLE_MAX_VERTICES: usize = 2000;
/// Largest edge count accepted by the dense Gram eigensolve.
pub const GRAM_MAX_EDGES: usize = 200;
/// Minimum eigenvalue accepted as positive semi-definite.
pub const PSD_TOL: f64 = -1e-9;

const PIVOT_EPS: f64 = 1e-10;

/// Solve a dense square system with partial pivoting. `a` is row-major.
fn gaussian_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Some(x)
}

/// Mean-zero `u` with `L u = f`, from the bordered system
/// `[[L, 1], [1^T, 0]] [u; lambda] = [f; 0]`.
pub fn direct_solve_oracle(g: &Graph, f: &[f64]) -> Result<VertexFunction> {
    let n = g.vertex_count();
    if n > ORACLE_MAX_VERTICES {
        return Err(Error::TooLarge {
            size: n,
            limit: ORACLE_MAX_VERTICES,
        });
    }
    g.check_vertex_fn(f.len())?;
    if !check_compatibility(f, DEFAULT_TOL) {
        return Err(Error::IncompatibleRhs {
            sum: f.iter().sum(),
        });
    }
    let size = n + 1;
    let mut mat = vec![0.0; size * size];
    for &(a, b) in g.edges() {
        mat[a * size + a] += 1.0;
        mat[b * size + b] += 1.0;
        mat[a * size + b] -= 1.0;
        mat[b * size + a] -= 1.0;
    }
    for v in 0..n {
        mat[v * size + n] = 1.0;
        mat[n * size + v] = 1.0;
    }
    let mut rhs = f.to_vec();
    rhs.push(0.0);
    let mut x =
        gaussian_solve(mat, rhs).expect("bordered Laplacian of a connected graph is nonsingular");
    x.truncate(n);
    Ok(x.into())
}

/// The energy minimizer `grad u*` among flows with divergence `f`.
pub fn optimal_flow_oracle(g: &Graph, f: &[f64]) -> Result<EdgeFunction> {
    let u = direct_solve_oracle(g, f)?;
    gradient(g, &u)
}

/// Dense `n x n` matrix of `D - W` (row-major).
pub fn dense_laplacian(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut mat = vec![vec![0.0; n]; n];
    for &(a, b) in g.edges() {
        mat[a][a] += 1.0;
        mat[b][b] += 1.0;
        mat[a][b] -= 1.0;
        mat[b][a] -= 1.0;
    }
    mat
}

pub fn cycle_space_dimension(g: &Graph) -> usize {
    g.edge_count() + 1 - g.vertex_count()
}

/// Incrementally maintained row-echelon basis, for rank and independence.
#[derive(Debug, Clone, Default)]
pub struct RowEchelon {
    rows: Vec<(usize, Vec<f64>)>,
}

impl RowEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the stored rows; keep it if anything is left.
    /// Returns whether `v` was independent.
    pub fn insert(&mut self, mut v: Vec<f64>) -> bool {
        for (pivot, row) in &self.rows {
            let factor = v[*pivot];
            if factor != 0.0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= factor * r;
                }
            }
        }
        let Some(pivot) = (0..v.len()).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())) else {
            return false;
        };
        let lead = v[pivot];
        if lead.abs() <= PIVOT_EPS {
            return false;
        }
        v.iter_mut().for_each(|x| *x /= lead);
        for (_, row) in &mut self.rows {
            let factor = row[pivot];
            if factor != 0.0 {
                for (r, x) in row.iter_mut().zip(&v) {
                    *r -= factor * x;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Rank of a dense matrix given as rows.
pub fn matrix_rank(rows: &[Vec<f64>]) -> usize {
    let mut echelon = RowEchelon::new();
    for row in rows {
        echelon.insert(row.clone());
    }
    echelon.rank()
}

/// Cycles-by-edges matrix with entries in `{-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&x| f64::from(x)).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        matrix_rank(&self.dense_rows())
    }

    /// Keep only the listed columns, in the given order.
    pub fn restrict_columns(&self, columns: &[usize]) -> IncidenceMatrix {
        let mut entries = Vec::with_capacity(self.rows * columns.len());
        for r in 0..self.rows {
            entries.extend(columns.iter().map(|&c| self.get(r, c)));
        }
        IncidenceMatrix {
            rows: self.rows,
            cols: columns.len(),
            entries,
        }
    }

    /// `M^T M - I`.
    pub fn gram_minus_identity(&self) -> DMatrix<f64> {
        let m = DMatrix::from_fn(self.rows, self.cols, |r, c| f64::from(self.get(r, c)));
        m.transpose() * &m - DMatrix::identity(self.cols, self.cols)
    }
}

pub fn incidence_matrix(basis: &[Cycle], m: usize) -> Result<IncidenceMatrix> {
    let mut entries = vec![0i8; basis.len() * m];
    for (r, cycle) in basis.iter().enumerate() {
        for &(e, s) in cycle.entries() {
            if e >= m {
                return Err(Error::EdgeOutOfRange { edge: e, m });
            }
            entries[r * m + e] = if s > 0.0 { 1 } else { -1 };
        }
    }
    Ok(IncidenceMatrix {
        rows: basis.len(),
        cols: m,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// Smallest eigenvalue of `M^T M - I` and whether it clears [`PSD_TOL`].
pub fn check_gram_psd(m: &IncidenceMatrix) -> Result<GramCheck> {
    if m.rows() == 0 {
        return Err(Error::EmptyBasis);
    }
    if m.cols() > GRAM_MAX_EDGES {
        return Err(Error::TooLarge {
            size: m.cols(),
            limit: GRAM_MAX_EDGES,
        });
    }
    let min_eigenvalue = m
        .gram_minus_identity()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(GramCheck {
        psd: min_eigenvalue >= PSD_TOL,
        min_eigenvalue,
    })
}

/// Whether `c` is a single simple cycle of `g` with consistent signs
/// (divergence free).
pub fn is_pure_cycle(g: &Graph, c: &Cycle) -> bool {
    if c.entries().iter().any(|&(e, _)| e >= g.edge_count()) {
        return false;
    }
    let mut touched = vec![0usize; g.vertex_count()];
    for &(e, _) in c.entries() {
        let (a, b) = g.edge(e);
        touched[a] += 1;
        touched[b] += 1;
    }
    if touched.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    let Ok(div) = divergence(g, &c.to_dense(g.edge_count())) else {
        return false;
    };
    if div.iter().any(|&x| x != 0.0) {
        return false;
    }
    // connected: walk the cycle from its first edge
    let mut in_cycle = vec![false; g.edge_count()];
    c.entries().iter().for_each(|&(e, _)| in_cycle[e] = true);
    let start = g.tail(c.entries()[0].0);
    let mut visited_edges = 0;
    let (mut prev_edge, mut v) = (usize::MAX, start);
    loop {
        let Some(&next) = g
            .incident(v)
            .iter()
            .find(|&&e| in_cycle[e] && e != prev_edge)
        else {
            return false;
        };
        visited_edges += 1;
        v = g.opposite(next, v);
        prev_edge = next;
        if v == start {
            break;
        }
    }
    visited_edges == c.len()
}

/// All simple cycles of the undirected support, oriented from their lowest
/// vertex. Returns `None` once more than `limit` cycles are found.
pub fn simple_cycles(g: &Graph, limit: usize) -> Option<Vec<Cycle>> {
    let n = g.vertex_count();
    let mut found = Vec::new();
    for start in 0..n {
        let mut on_path = vec![false; n];
        on_path[start] = true;
        // stack of (vertex, incident cursor); edges of the current path
        let mut stack = vec![(start, 0usize)];
        let mut path_edges: Vec<(usize, f64)> = Vec::new();
        let mut path_vertices = vec![start];
        while let Some(top) = stack.last_mut() {
            let (v, cursor) = *top;
            let Some(&e) = g.incident(v).get(cursor) else {
                stack.pop();
                on_path[v] = false;
                path_vertices.pop();
                path_edges.pop();
                continue;
            };
            top.1 += 1;
            let w = g.opposite(e, v);
            let sign = if g.tail(e) == v { 1.0 } else { -1.0 };
            if w == start && path_edges.len() >= 2 {
                // each cycle is met in both directions; keep one
                if path_vertices[1] < v {
                    let mut entries = path_edges.clone();
                    entries.push((e, sign));
                    found.push(Cycle::from_entries(entries).expect("simple cycle"));
                    if found.len() > limit {
                        return None;
                    }
                }
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                path_vertices.push(w);
                path_edges.push((e, sign));
                stack.push((w, 0));
            }
        }
    }
    Some(found)
}

/// Random basis drawn greedily from `candidates` (shuffled, random
/// orientation). `None` if the candidates do not span the cycle space.
pub fn random_pure_basis<R: Rng + ?Sized>(
    g: &Graph,
    candidates: &[Cycle],
    rng: &mut R,
) -> Option<Vec<Cycle>> {
    let p = cycle_space_dimension(g);
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.shuffle(rng);
    let mut echelon = RowEchelon::new();
    let mut basis = Vec::with_capacity(p);
    for i in order {
        if basis.len() == p {
            break;
        }
        let c = &candidates[i];
        if echelon.insert(c.to_dense(g.edge_count()).into_vec()) {
            basis.push(if rng.random_bool(0.5) {
                c.negated()
            } else {
                c.clone()
            });
        }
    }
    (basis.len() == p).then_some(basis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapViolation {
    pub trial: usize,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapBoundReport {
    /// `M^T M - I` over all edges; `None` when the basis is empty or too wide.
    pub full_gram: Option<GramCheck>,
    /// `M^T M - I` over the non-tree columns only, where `A - grad u` lives.
    pub restricted_gram: Option<GramCheck>,
    pub trials: usize,
    /// Trials with `gap > sum (A, D_i)^2 + 1e-9 * scale` while a PSD
    /// hypothesis held. Must be empty.
    pub violations: Vec<GapViolation>,
    /// Trials exceeding the bound regardless of the hypothesis.
    pub exceedances: usize,
    /// Worst relative mismatch between `sum (A, C_e)^2` over the tree basis
    /// and the off-tree residual form of the gap.
    pub max_tree_gap_error: f64,
}

impl GapBoundReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.full_gram.is_some_and(|c| c.psd) || self.restricted_gram.is_some_and(|c| c.psd)
    }
}

/// Check `gap(A) <= sum_i (A, D_i)^2` on random feasible flows, conditional
/// on the Gram hypothesis, and the tree-basis equality on every trial.
pub fn verify_gap_bound<R: Rng + ?Sized>(
    g: &Graph,
    t: &SpanningTree,
    basis: &[Cycle],
    trials: usize,
    rng: &mut R,
) -> Result<GapBoundReport> {
    let m = g.edge_count();
    let p = cycle_space_dimension(g);
    if basis.len() != p {
        return Err(Error::NotABasis(format!(
            "{} cycles given, cycle space has dimension {p}",
            basis.len()
        )));
    }
    if let Some(i) = basis.iter().position(|c| !is_pure_cycle(g, c)) {
        return Err(Error::NotABasis(format!("cycle {i} is not a pure cycle")));
    }
    let incidence = incidence_matrix(basis, m)?;
    let rank = incidence.rank();
    if rank != p {
        return Err(Error::NotABasis(format!("rank {rank}, expected {p}")));
    }
    let (full_gram, restricted_gram) = if p == 0 {
        (None, None)
    } else {
        let full = if m <= GRAM_MAX_EDGES {
            Some(check_gram_psd(&incidence)?)
        } else {
            None
        };
        let restricted = incidence.restrict_columns(t.non_tree_edges());
        let restricted = if restricted.cols() <= GRAM_MAX_EDGES {
            Some(check_gram_psd(&restricted)?)
        } else {
            None
        };
        (full, restricted)
    };
    let mut report = GapBoundReport {
        full_gram,
        restricted_gram,
        trials,
        violations: Vec::new(),
        exceedances: 0,
        max_tree_gap_error: 0.0,
    };
    let hypothesis = report.hypothesis_holds();
    let tree_cycles = tree_basis(g, t)?;
    for trial in 0..trials {
        let mut f: Vec<f64> = (0..g.vertex_count())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let mean = f.iter().sum::<f64>() / f.len() as f64;
        f.iter_mut().for_each(|x| *x -= mean);
        let mut a = feasible_flow(g, t, &f)?;
        for c in basis {
            c.add_scaled_to(&mut a, rng.random_range(-2.0..2.0));
        }
        let gap = gap_off_tree(g, t, &a)?;
        let tree_form: f64 = tree_cycles.cycles().iter().map(|c| c.dot(&a).powi(2)).sum();
        let bound: f64 = basis.iter().map(|c| c.dot(&a).powi(2)).sum();
        let scale = a.norm_squared().max(1.0);
        report.max_tree_gap_error = report
            .max_tree_gap_error
            .max((gap - tree_form).abs() / scale);
        if gap > bound + 1e-9 * scale {
            report.exceedances += 1;
            if hypothesis {
                report.violations.push(GapViolation { trial, gap, bound });
            }
        }
    }
    Ok(report)
}
