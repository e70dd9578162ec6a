//! Spanning trees, tree-induced potentials, tree-supported feasible flows and
//! the fundamental cycle basis.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{EdgeFunction, Graph, VertexFunction};
use crate::operators::{check_compatibility, Cycle};
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TreeStrategy {
    #[default]
    Bfs,
    Dfs,
    /// BFS tree grown from an approximate graph center (double-sweep
    /// eccentricity estimate). Heuristic only: no stretch guarantee.
    LowStretchHeuristic,
}

impl TreeStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            TreeStrategy::Bfs => "bfs",
            TreeStrategy::Dfs => "dfs",
            TreeStrategy::LowStretchHeuristic => "low-stretch",
        }
    }
}

impl fmt::Display for TreeStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TreeStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bfs" => Ok(TreeStrategy::Bfs),
            "dfs" => Ok(TreeStrategy::Dfs),
            "low-stretch" | "low_stretch" | "low_stretch_heuristic" => {
                Ok(TreeStrategy::LowStretchHeuristic)
            }
            other => Err(format!(
                "unknown tree strategy '{other}' (expected bfs, dfs or low-stretch)"
            )),
        }
    }
}

/// A rooted spanning tree of the undirected support of a [`Graph`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    root: usize,
    /// `(parent vertex, connecting edge)`; `None` only at the root.
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    tree_edges: Vec<usize>,
    non_tree_edges: Vec<usize>,
    in_tree: Vec<bool>,
    /// Vertices with every parent listed before its children.
    order: Vec<usize>,
}

impl SpanningTree {
    /// Root the tree formed by the edges flagged in `in_tree` at `root`.
    fn from_edge_set(g: &Graph, in_tree: Vec<bool>, root: usize) -> Self {
        let n = g.vertex_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in g.incident(v) {
                if !in_tree[e] {
                    continue;
                }
                let w = g.opposite(e, v);
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some((v, e));
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "edge set does not span the graph");
        let (tree_edges, non_tree_edges): (Vec<usize>, Vec<usize>) =
            (0..g.edge_count()).partition(|&e| in_tree[e]);
        debug_assert_eq!(tree_edges.len(), n - 1);
        Self {
            root,
            parent,
            depth,
            tree_edges,
            non_tree_edges,
            in_tree,
            order,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<(usize, usize)> {
        self.parent[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    /// Edges outside the tree, in edge-input order.
    pub fn non_tree_edges(&self) -> &[usize] {
        &self.non_tree_edges
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.in_tree[e]
    }

    /// Vertices ordered so that each parent precedes its children.
    pub fn top_down_order(&self) -> &[usize] {
        &self.order
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }
}

fn bfs_edge_set(g: &Graph, start: usize) -> Vec<bool> {
    let mut in_tree = vec![false; g.edge_count()];
    let mut visited = vec![false; g.vertex_count()];
    visited[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &e in g.incident(v) {
            let w = g.opposite(e, v);
            if !visited[w] {
                visited[w] = true;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    in_tree
}

fn dfs_edge_set(g: &Graph, start: usize) -> Vec<bool> {
    let mut in_tree = vec![false; g.edge_count()];
    let mut visited = vec![false; g.vertex_count()];
    visited[start] = true;
    // (vertex, position in its incident list)
    let mut stack = vec![(start, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        if let Some(&e) = g.incident(v).get(next) {
            top.1 += 1;
            let w = g.opposite(e, v);
            if !visited[w] {
                visited[w] = true;
                in_tree[e] = true;
                stack.push((w, 0));
            }
        } else {
            stack.pop();
        }
    }
    in_tree
}

fn farthest(dist: &[Option<usize>]) -> usize {
    let mut best = 0;
    for (v, d) in dist.iter().enumerate() {
        if d.unwrap_or(0) > dist[best].unwrap_or(0) {
            best = v;
        }
    }
    best
}

/// Vertex minimizing `max(d(a, v), d(b, v))` where `a, b` come from a
/// double-sweep BFS. Ties go to the lowest index.
fn approximate_center(g: &Graph) -> usize {
    let a = farthest(&g.bfs_distances(0));
    let from_a = g.bfs_distances(a);
    let b = farthest(&from_a);
    let from_b = g.bfs_distances(b);
    (0..g.vertex_count())
        .min_by_key(|&v| (from_a[v].unwrap_or(0).max(from_b[v].unwrap_or(0)), v))
        .unwrap_or(0)
}

pub fn spanning_tree(g: &Graph, strategy: TreeStrategy, root: usize) -> Result<SpanningTree> {
    if root >= g.vertex_count() {
        return Err(Error::RootOutOfRange {
            vertex: root,
            n: g.vertex_count(),
        });
    }
    let in_tree = match strategy {
        TreeStrategy::Bfs => bfs_edge_set(g, root),
        TreeStrategy::Dfs => dfs_edge_set(g, root),
        TreeStrategy::LowStretchHeuristic => bfs_edge_set(g, approximate_center(g)),
    };
    Ok(SpanningTree::from_edge_set(g, in_tree, root))
}

fn check_tree(g: &Graph, t: &SpanningTree) -> Result<()> {
    if t.vertex_count() != g.vertex_count() {
        return Err(Error::DomainMismatch {
            expected: g.vertex_count(),
            found: t.vertex_count(),
        });
    }
    Ok(())
}

/// Potential induced from `a` by the tree: zero at the root, and along each
/// tree edge `u(child) = u(parent) ± a(e)` with `+` when `e` points toward
/// the child.
pub fn induced_potential(g: &Graph, t: &SpanningTree, a: &[f64]) -> Result<VertexFunction> {
    check_tree(g, t)?;
    g.check_edge_fn(a.len())?;
    let mut u = VertexFunction::zeros(g.vertex_count());
    for &v in &t.order[1..] {
        let (p, e) = t.parent[v].expect("non-root vertex has a parent");
        u[v] = if g.head(e) == v {
            u[p] + a[e]
        } else {
            u[p] - a[e]
        };
    }
    Ok(u)
}

/// A flow supported on the tree with divergence `f`, built by stripping
/// leaves deepest-first and pushing their residual demand to the parent.
pub fn feasible_flow(g: &Graph, t: &SpanningTree, f: &[f64]) -> Result<EdgeFunction> {
    check_tree(g, t)?;
    g.check_vertex_fn(f.len())?;
    if !check_compatibility(f, DEFAULT_TOL) {
        return Err(Error::IncompatibleRhs {
            sum: f.iter().sum(),
        });
    }
    let mut by_depth: Vec<usize> = (0..g.vertex_count()).collect();
    by_depth.sort_by_key(|&v| std::cmp::Reverse(t.depth[v]));
    let mut residual = f.to_vec();
    let mut flow = EdgeFunction::zeros(g.edge_count());
    for v in by_depth {
        let Some((p, e)) = t.parent[v] else { continue };
        let r = residual[v];
        flow[e] = if g.tail(e) == v { -r } else { r };
        residual[p] += r;
    }
    Ok(flow)
}

/// Fundamental cycle of non-tree edge `e`: `+1` on `e`, then the tree path
/// from `head(e)` back to `tail(e)`, signed by traversal direction.
pub fn tree_cycle(g: &Graph, t: &SpanningTree, e: usize) -> Result<Cycle> {
    check_tree(g, t)?;
    if e >= g.edge_count() {
        return Err(Error::EdgeOutOfRange {
            edge: e,
            m: g.edge_count(),
        });
    }
    if t.in_tree[e] {
        return Err(Error::EdgeInTree { edge: e });
    }
    let (tail, head) = g.edge(e);
    let mut entries = vec![(e, 1.0)];
    // climbing from head: travel child -> parent
    let mut up_from_head = Vec::new();
    // climbing from tail: later traversed parent -> child
    let mut up_from_tail = Vec::new();
    let (mut x, mut y) = (head, tail);
    while t.depth[x] > t.depth[y] {
        let (p, pe) = t.parent[x].expect("deeper vertex has a parent");
        up_from_head.push((pe, if g.tail(pe) == x { 1.0 } else { -1.0 }));
        x = p;
    }
    while t.depth[y] > t.depth[x] {
        let (p, pe) = t.parent[y].expect("deeper vertex has a parent");
        up_from_tail.push((pe, if g.head(pe) == y { 1.0 } else { -1.0 }));
        y = p;
    }
    while x != y {
        let (px, ex) = t.parent[x].expect("non-root vertex has a parent");
        up_from_head.push((ex, if g.tail(ex) == x { 1.0 } else { -1.0 }));
        x = px;
        let (py, ey) = t.parent[y].expect("non-root vertex has a parent");
        up_from_tail.push((ey, if g.head(ey) == y { 1.0 } else { -1.0 }));
        y = py;
    }
    entries.extend(up_from_head);
    entries.extend(up_from_tail.into_iter().rev());
    Cycle::from_entries(entries)
}

/// The tree cycles of a spanning tree, with sampling weights `||C_e||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeBasis {
    cycles: Vec<Cycle>,
    edges: Vec<usize>,
    cumulative_weights: Vec<u64>,
}

impl TreeBasis {
    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    /// Defining non-tree edge of each cycle.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Running sums of `||C_i||^2`; the last entry is `tau`.
    pub fn cumulative_weights(&self) -> &[u64] {
        &self.cumulative_weights
    }

    /// `tau = sum_e ||C_e||^2`.
    pub fn tau(&self) -> f64 {
        self.total_weight() as f64
    }

    pub fn total_weight(&self) -> u64 {
        self.cumulative_weights.last().copied().unwrap_or(0)
    }
}

pub fn tree_basis(g: &Graph, t: &SpanningTree) -> Result<TreeBasis> {
    let cycles = t
        .non_tree_edges
        .iter()
        .map(|&e| tree_cycle(g, t, e))
        .collect::<Result<Vec<_>>>()?;
    let cumulative_weights = cycles
        .iter()
        .scan(0u64, |acc, c| {
            *acc += c.norm_squared() as u64;
            Some(*acc)
        })
        .collect();
    Ok(TreeBasis {
        cycles,
        edges: t.non_tree_edges.clone(),
        cumulative_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::divergence;

    fn triangle() -> Graph {
        Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::new(3, vec![(0, 1), (1, 2)]).unwrap()
    }

    fn torus(k: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..k {
            for j in 0..k {
                edges.push((i * k + j, i * k + (j + 1) % k));
                edges.push((i * k + j, ((i + 1) % k) * k + j));
            }
        }
        Graph::new(k * k, edges).unwrap()
    }

    /// Tree on the triangle made of the path (0,1),(1,2).
    fn triangle_path_tree(g: &Graph) -> SpanningTree {
        SpanningTree::from_edge_set(g, vec![true, true, false], 0)
    }

    #[test]
    fn bfs_triangle() {
        let g = triangle();
        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        assert_eq!(t.tree_edges(), &[0, 2]);
        assert_eq!(t.non_tree_edges(), &[1]);
        assert_eq!(t.parent(2), Some((0, 2)));
        assert_eq!(t.depth(1), 1);
    }

    #[test]
    fn path_tree_has_no_cycles() {
        let g = path3();
        for strategy in [
            TreeStrategy::Bfs,
            TreeStrategy::Dfs,
            TreeStrategy::LowStretchHeuristic,
        ] {
            let t = spanning_tree(&g, strategy, 0).unwrap();
            assert_eq!(t.tree_edges(), &[0, 1]);
            assert!(t.non_tree_edges().is_empty());
            assert_eq!(t.root(), 0);
        }
    }

    #[test]
    fn torus_non_tree_count() {
        let g = torus(3);
        for strategy in [
            TreeStrategy::Bfs,
            TreeStrategy::Dfs,
            TreeStrategy::LowStretchHeuristic,
        ] {
            let t = spanning_tree(&g, strategy, 4).unwrap();
            assert_eq!(t.non_tree_edges().len(), 10);
            assert_eq!(tree_basis(&g, &t).unwrap().len(), 10);
        }
    }

    #[test]
    fn dfs_goes_deep() {
        // square 0-1-2-3-0: DFS from 0 follows 0->1->2->3
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let t = spanning_tree(&g, TreeStrategy::Dfs, 0).unwrap();
        assert_eq!(t.tree_edges(), &[0, 1, 2]);
        assert_eq!(t.depth(3), 3);
        let bfs = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        assert_eq!(bfs.tree_edges(), &[0, 1, 3]);
    }

    #[test]
    fn root_out_of_range() {
        assert_eq!(
            spanning_tree(&triangle(), TreeStrategy::Bfs, 3).unwrap_err(),
            Error::RootOutOfRange { vertex: 3, n: 3 }
        );
    }

    #[test]
    fn induced_potential_examples() {
        let g = triangle();
        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        assert_eq!(
            induced_potential(&g, &t, &[3.0, 3.0, 0.0])
                .unwrap()
                .as_slice(),
            &[0.0, 3.0, 0.0]
        );
        assert_eq!(
            induced_potential(&g, &t, &[0.0; 3]).unwrap().as_slice(),
            &[0.0; 3]
        );
        let p = path3();
        let tp = spanning_tree(&p, TreeStrategy::Bfs, 0).unwrap();
        assert_eq!(
            induced_potential(&p, &tp, &[3.0, 3.0]).unwrap().as_slice(),
            &[0.0, 3.0, 6.0]
        );
        // against the direction: edge (0,1) seen from root 1
        let tp1 = spanning_tree(&p, TreeStrategy::Bfs, 1).unwrap();
        assert_eq!(
            induced_potential(&p, &tp1, &[3.0, 3.0]).unwrap().as_slice(),
            &[-3.0, 0.0, 3.0]
        );
    }

    #[test]
    fn feasible_flow_examples() {
        let g = triangle();
        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        let f = [-3.0, 0.0, 3.0];
        let a = feasible_flow(&g, &t, &f).unwrap();
        assert_eq!(a.as_slice(), &[0.0, 0.0, 3.0]);
        assert_eq!(divergence(&g, &a).unwrap().as_slice(), &f);

        let p = path3();
        let tp = spanning_tree(&p, TreeStrategy::Bfs, 0).unwrap();
        assert_eq!(feasible_flow(&p, &tp, &f).unwrap().as_slice(), &[3.0, 3.0]);

        let tt = triangle_path_tree(&g);
        assert_eq!(
            feasible_flow(&g, &tt, &f).unwrap().as_slice(),
            &[3.0, 3.0, 0.0]
        );
        assert_eq!(
            feasible_flow(&g, &t, &[0.0; 3]).unwrap().as_slice(),
            &[0.0; 3]
        );
    }

    #[test]
    fn feasible_flow_rejects_incompatible() {
        let g = triangle();
        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        assert_eq!(
            feasible_flow(&g, &t, &[1.0, 0.0, 0.0]).unwrap_err(),
            Error::IncompatibleRhs { sum: 1.0 }
        );
    }

    #[test]
    fn tree_cycle_examples() {
        let g = triangle();
        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        let c = tree_cycle(&g, &t, 1).unwrap();
        assert_eq!(c.entries(), &[(1, 1.0), (2, -1.0), (0, 1.0)]);
        assert_eq!(
            divergence(&g, &c.to_dense(3)).unwrap().as_slice(),
            &[0.0; 3]
        );
        assert_eq!(
            tree_cycle(&g, &t, 0).unwrap_err(),
            Error::EdgeInTree { edge: 0 }
        );

        let sq = Graph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let ts = spanning_tree(&sq, TreeStrategy::Dfs, 0).unwrap();
        let c = tree_cycle(&sq, &ts, 3).unwrap();
        assert_eq!(c.norm_squared(), 4);
        assert_eq!(c.sign_of(3), Some(1.0));
        assert_eq!(
            divergence(&sq, &c.to_dense(4)).unwrap().as_slice(),
            &[0.0; 4]
        );
    }

    #[test]
    fn tree_basis_examples() {
        let g = triangle();
        let t = spanning_tree(&g, TreeStrategy::Bfs, 0).unwrap();
        let b = tree_basis(&g, &t).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.tau(), 3.0);
        assert_eq!(b.cumulative_weights(), &[3]);

        let p = path3();
        let b = tree_basis(&p, &spanning_tree(&p, TreeStrategy::Bfs, 0).unwrap()).unwrap();
        assert!(b.is_empty());
        assert_eq!(b.tau(), 0.0);
    }

    #[test]
    fn strategy_parsing() {
        for s in [
            TreeStrategy::Bfs,
            TreeStrategy::Dfs,
            TreeStrategy::LowStretchHeuristic,
        ] {
            assert_eq!(s.as_str().parse::<TreeStrategy>().unwrap(), s);
        }
        assert!("prim".parse::<TreeStrategy>().is_err());
    }

    #[test]
    fn low_stretch_picks_center_of_path() {
        let g = Graph::new(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(approximate_center(&g), 2);
    }
}
