//! Validated directed graphs and dense vertex/edge functions.

use std::collections::{HashMap, VecDeque};
use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// A connected directed graph without loops, 2-cycles or parallel edges.
///
/// Vertices are `0..n`, edges are indexed by their position in the input list.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    // incident edge ids per vertex in ascending id order
    incident: Vec<Vec<usize>>,
    lookup: HashMap<(usize, usize), usize>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut outgoing = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        let mut incident = vec![Vec::new(); n];
        let mut lookup = HashMap::with_capacity(edges.len());
        for (id, &(tail, head)) in edges.iter().enumerate() {
            for vertex in [tail, head] {
                if vertex >= n {
                    return Err(Error::VertexOutOfRange {
                        edge: id,
                        vertex,
                        n,
                    });
                }
            }
            if tail == head {
                return Err(Error::LoopEdge {
                    edge: id,
                    vertex: tail,
                });
            }
            let key = (tail.min(head), tail.max(head));
            if let Some(&first) = lookup.get(&key) {
                return Err(Error::TwoCycleOrParallelEdge {
                    edge: id,
                    tail,
                    head,
                    first,
                });
            }
            lookup.insert(key, id);
            outgoing[tail].push(id);
            incoming[head].push(id);
            incident[tail].push(id);
            incident[head].push(id);
        }
        let graph = Self {
            n,
            edges,
            outgoing,
            incoming,
            incident,
            lookup,
        };
        let dist = graph.bfs_distances(0);
        if let Some(vertex) = dist.iter().position(Option::is_none) {
            return Err(Error::Disconnected { vertex });
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn tail(&self, id: usize) -> usize {
        self.edges[id].0
    }

    pub fn head(&self, id: usize) -> usize {
        self.edges[id].1
    }

    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    pub fn incoming(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    /// Incident edge ids of `v`, in edge-input order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.incident.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The endpoint of `edge` that is not `v`.
    pub fn opposite(&self, edge: usize, v: usize) -> usize {
        let (tail, head) = self.edges[edge];
        if tail == v {
            head
        } else {
            tail
        }
    }

    /// Locate the edge joining `a` and `b` in either direction. The flag is
    /// `true` when the edge is directed `a -> b`.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<(usize, bool)> {
        let id = *self.lookup.get(&(a.min(b), a.max(b)))?;
        Some((id, self.edges[id].0 == a))
    }

    /// Hop distances over the undirected support.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &e in &self.incident[v] {
                let w = self.opposite(e, v);
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub(crate) fn check_vertex_fn(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected: self.n,
                found: len,
            })
        }
    }

    pub(crate) fn check_edge_fn(&self, len: usize) -> Result<()> {
        if len == self.edges.len() {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                expected: self.edges.len(),
                found: len,
            })
        }
    }
}

macro_rules! dense_function {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Debug, Clone, PartialEq, Default)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(values: Vec<f64>) -> Self {
                Self(values)
            }

            pub fn zeros(len: usize) -> Self {
                Self(vec![0.0; len])
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.0
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            /// `(self, self)`.
            pub fn norm_squared(&self) -> f64 {
                self.0.iter().map(|x| x * x).sum()
            }

            pub fn norm_inf(&self) -> f64 {
                self.0.iter().fold(0.0, |acc, x| acc.max(x.abs()))
            }

            pub fn sum(&self) -> f64 {
                self.0.iter().sum()
            }
        }

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut [f64] {
                &mut self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(values: Vec<f64>) -> Self {
                Self(values)
            }
        }
    };
}

dense_function!(
    VertexFunction,
    "A real function on the vertices, indexed by vertex id."
);
dense_function!(
    EdgeFunction,
    "A real function on the edges, indexed by edge id."
);

/// `sum_i f_i * g_i` over a shared finite domain.
pub fn inner_product(f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::DomainMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    Ok(f.iter().zip(g).map(|(a, b)| a * b).sum())
}
