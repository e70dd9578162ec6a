//! Gradient, divergence, Laplacian, cycle functions and curl.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{EdgeFunction, Graph, VertexFunction};

/// A signed cycle function: `+1`/`-1` on a set of edges, zero elsewhere.
///
/// Only the support is stored. Entries are kept in traversal order.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    entries: Vec<(usize, f64)>,
}

impl Cycle {
    /// Build from `(edge, sign)` pairs. Signs must be exactly `±1` and edge ids
    /// must not repeat. Divergence-freeness is not checked here.
    pub fn from_entries(entries: Vec<(usize, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyCycle);
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for &(edge, sign) in &entries {
            if sign != 1.0 && sign != -1.0 {
                return Err(Error::InvalidSign { edge, sign });
            }
            if !seen.insert(edge) {
                return Err(Error::RepeatedEdge { edge });
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `||C||^2`, the number of entries.
    pub fn norm_squared(&self) -> usize {
        self.entries.len()
    }

    pub fn sign_of(&self, edge: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|&&(e, _)| e == edge)
            .map(|&(_, s)| s)
    }

    /// Sparse inner product `(A, C)`. Edge ids must be in range for `a`.
    pub fn dot(&self, a: &[f64]) -> f64 {
        self.entries.iter().map(|&(e, s)| s * a[e]).sum()
    }

    /// `a += alpha * C`.
    pub fn add_scaled_to(&self, a: &mut [f64], alpha: f64) {
        for &(e, s) in &self.entries {
            a[e] += alpha * s;
        }
    }

    pub fn max_edge(&self) -> usize {
        self.entries.iter().map(|&(e, _)| e).max().unwrap_or(0)
    }

    pub fn to_dense(&self, m: usize) -> EdgeFunction {
        let mut dense = EdgeFunction::zeros(m);
        for &(e, s) in &self.entries {
            dense[e] = s;
        }
        dense
    }

    pub fn negated(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|&(e, s)| (e, -s)).collect(),
        }
    }
}

/// `grad u (a, b) = u(b) - u(a)`.
pub fn gradient(g: &Graph, u: &[f64]) -> Result<EdgeFunction> {
    g.check_vertex_fn(u.len())?;
    Ok(g.edges()
        .iter()
        .map(|&(tail, head)| u[head] - u[tail])
        .collect::<Vec<_>>()
        .into())
}

/// `div A (a)` = inflow minus outflow at `a`.
pub fn divergence(g: &Graph, a: &[f64]) -> Result<VertexFunction> {
    g.check_edge_fn(a.len())?;
    let mut out = VertexFunction::zeros(g.vertex_count());
    for (id, &(tail, head)) in g.edges().iter().enumerate() {
        out[head] += a[id];
        out[tail] -= a[id];
    }
    Ok(out)
}

/// `div(grad u)(a) = sum over neighbours b of (u(a) - u(b))`.
pub fn laplacian_apply(g: &Graph, u: &[f64]) -> Result<VertexFunction> {
    g.check_vertex_fn(u.len())?;
    let mut out = VertexFunction::zeros(g.vertex_count());
    for &(tail, head) in g.edges() {
        let diff = u[tail] - u[head];
        out[tail] += diff;
        out[head] -= diff;
    }
    Ok(out)
}

/// Cycle function of a closed walk `(a_1, ..., a_k, a_1)`: `+1` on edges
/// traversed along their direction, `-1` against.
pub fn cycle_function(g: &Graph, walk: &[usize]) -> Result<Cycle> {
    if walk.len() < 2 || walk.first() != walk.last() {
        return Err(Error::OpenWalk);
    }
    let mut entries = Vec::with_capacity(walk.len() - 1);
    for step in walk.windows(2) {
        let (from, to) = (step[0], step[1]);
        if from >= g.vertex_count() || to >= g.vertex_count() {
            return Err(Error::NotAnEdge { from, to });
        }
        let (edge, forward) = g.find_edge(from, to).ok_or(Error::NotAnEdge { from, to })?;
        entries.push((edge, if forward { 1.0 } else { -1.0 }));
    }
    Cycle::from_entries(entries)
}

/// `curl A` evaluated on each cycle of `basis`: `(A, C_i)`.
pub fn curl(a: &[f64], basis: &[Cycle]) -> Result<Vec<f64>> {
    basis
        .iter()
        .map(|c| {
            let needed = c.max_edge() + 1;
            if needed > a.len() {
                Err(Error::DomainMismatch {
                    expected: needed,
                    found: a.len(),
                })
            } else {
                Ok(c.dot(a))
            }
        })
        .collect()
}

/// Whether `(1, f) = 0` up to `tol * max(1, sum |f|)`.
pub fn check_compatibility(f: &[f64], tol: f64) -> bool {
    let sum: f64 = f.iter().sum();
    let scale: f64 = f.iter().map(|x| x.abs()).sum();
    sum.abs() <= tol * scale.max(1.0)
}
