//! Directed weighted graphs and their Laplacians.
//!
//! Arcs are stored as `(source, target, weight)`. The adjacency convention is
//! `A[target][source] = weight`: a link from `v_j` to `v_i` shows up as the
//! entry `A_ij`, so row `i` of the Laplacian `L = A − D` collects the
//! influence flowing *into* node `i`, and `D_ii` is its indegree.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("line {line}: duplicate arc {source_node} -> {target_node}")]
    DuplicateArc {
        line: usize,
        source_node: usize,
        target_node: usize,
    },
    #[error("line {line}: weight must be positive and finite, got {weight}")]
    BadWeight { line: usize, weight: f64 },
    #[error("line {line}: node {node} out of range for n = {n}")]
    NodeOutOfRange { line: usize, node: usize, n: usize },
    #[error("graph has no nodes")]
    Empty,
    #[error("operation requires an unweighted graph (all weights 1)")]
    Weighted,
    #[error("invalid Laplacian: {0}")]
    InvalidLaplacian(String),
    #[error("invalid graph JSON: {0}")]
    Json(String),
}

/// A directed link `source -> target` with positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

impl Arc {
    pub fn new(source: usize, target: usize, weight: f64) -> Self {
        Arc {
            source,
            target,
            weight,
        }
    }

    pub fn unit(source: usize, target: usize) -> Self {
        Arc::new(source, target, 1.0)
    }
}

/// Simple weighted digraph: no self-loops, at most one arc per ordered pair.
///
/// Arcs are kept sorted by `(source, target)` so that equal graphs compare
/// equal regardless of construction order.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    n: usize,
    arcs: Vec<Arc>,
}

/// JSON shape of a graph: `{"n": 3, "arcs": [[0, 1, 1.0], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub n: usize,
    pub arcs: Vec<(usize, usize, f64)>,
}

impl DirectedGraph {
    /// Validates and builds a graph. Errors carry the 1-based position of the
    /// offending arc in the input as the line number.
    pub fn new(n: usize, arcs: impl IntoIterator<Item = Arc>) -> Result<Self, GraphError> {
        let arcs: Vec<(usize, Arc)> = arcs
            .into_iter()
            .enumerate()
            .map(|(k, a)| (k + 1, a))
            .collect();
        Self::from_numbered(n, arcs)
    }

    fn from_numbered(n: usize, arcs: Vec<(usize, Arc)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = HashSet::with_capacity(arcs.len());
        let mut out = Vec::with_capacity(arcs.len());
        for (line, a) in arcs {
            for node in [a.source, a.target] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { line, node, n });
                }
            }
            if a.source == a.target {
                return Err(GraphError::SelfLoop {
                    line,
                    node: a.source,
                });
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(GraphError::BadWeight {
                    line,
                    weight: a.weight,
                });
            }
            if !seen.insert((a.source, a.target)) {
                return Err(GraphError::DuplicateArc {
                    line,
                    source_node: a.source,
                    target_node: a.target,
                });
            }
            out.push(a);
        }
        out.sort_by_key(|a| (a.source, a.target));
        Ok(DirectedGraph { n, arcs: out })
    }

    pub fn unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::new(n, pairs.iter().map(|&(s, t)| Arc::unit(s, t)))
    }

    pub fn null(n: usize) -> Self {
        assert!(n > 0);
        DirectedGraph { n, arcs: vec![] }
    }

    pub fn complete(n: usize) -> Self {
        assert!(n > 0);
        let arcs = (0..n)
            .flat_map(|s| {
                (0..n)
                    .filter(move |&t| t != s)
                    .map(move |t| Arc::unit(s, t))
            })
            .collect();
        DirectedGraph { n, arcs }
    }

    pub fn directed_cycle(n: usize, weight: f64) -> Self {
        assert!(n >= 2 && weight > 0.0);
        let arcs = (0..n).map(|i| Arc::new(i, (i + 1) % n, weight));
        Self::new(n, arcs).expect("cycle is simple")
    }

    pub fn directed_path(n: usize) -> Self {
        assert!(n > 0);
        let arcs = (0..n.saturating_sub(1)).map(|i| Arc::unit(i, i + 1));
        Self::new(n, arcs).expect("path is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn weight(&self, source: usize, target: usize) -> Option<f64> {
        self.arcs
            .binary_search_by_key(&(source, target), |a| (a.source, a.target))
            .ok()
            .map(|k| self.arcs[k].weight)
    }

    pub fn has_arc(&self, source: usize, target: usize) -> bool {
        self.weight(source, target).is_some()
    }

    pub fn is_unweighted(&self) -> bool {
        self.arcs.iter().all(|a| a.weight == 1.0)
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.arcs.iter().map(|a| a.weight).reduce(f64::min)
    }

    /// Out-neighbours of every node, in increasing index order.
    pub fn out_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for a in &self.arcs {
            adj[a.source].push(a.target);
        }
        adj
    }

    pub fn in_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for a in &self.arcs {
            adj[a.target].push(a.source);
        }
        for v in &mut adj {
            v.sort_unstable();
        }
        adj
    }

    /// Adjacency matrix with `A[target][source] = weight`.
    pub fn adjacency(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for arc in &self.arcs {
            a[(arc.target, arc.source)] = arc.weight;
        }
        a
    }

    pub fn laplacian(&self) -> Laplacian {
        Laplacian::from_graph(self)
    }

    pub fn degrees(&self) -> DegreeProfile {
        let mut indeg = vec![0.0; self.n];
        let mut outdeg = vec![0.0; self.n];
        for a in &self.arcs {
            indeg[a.target] += a.weight;
            outdeg[a.source] += a.weight;
        }
        let imbalance = indeg.iter().zip(&outdeg).map(|(i, o)| i - o).collect();
        DegreeProfile {
            indeg,
            outdeg,
            imbalance,
        }
    }

    /// Integer `indegree − outdegree` per node, counting arcs.
    pub fn count_imbalance(&self) -> Vec<i64> {
        let mut e = vec![0i64; self.n];
        for a in &self.arcs {
            e[a.target] += 1;
            e[a.source] -= 1;
        }
        e
    }

    /// 1e-9 absolute for unweighted graphs, 1e-9·max|L| otherwise.
    pub fn default_balance_tol(&self) -> f64 {
        if self.is_unweighted() {
            1e-9
        } else {
            1e-9 * self.laplacian().max_abs()
        }
    }

    pub fn is_balanced(&self, tol: f64) -> bool {
        self.degrees().imbalance.iter().all(|d| d.abs() <= tol)
    }

    /// Arcs are every ordered pair `(i, j)`, `i ≠ j`, absent from `self`.
    pub fn complement(&self) -> Result<DirectedGraph, GraphError> {
        if !self.is_unweighted() {
            return Err(GraphError::Weighted);
        }
        let arcs = (0..self.n)
            .flat_map(|s| (0..self.n).map(move |t| (s, t)))
            .filter(|&(s, t)| s != t && !self.has_arc(s, t))
            .map(|(s, t)| Arc::unit(s, t))
            .collect();
        Ok(DirectedGraph { n: self.n, arcs })
    }

    /// Component id per node (Tarjan, iterative). Ids are assigned in the
    /// order components complete, which is a reverse topological order of
    /// the condensation.
    pub fn strongly_connected_components(&self) -> Vec<usize> {
        let n = self.n;
        let adj = self.out_neighbors();
        const UNVISITED: usize = usize::MAX;
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNVISITED; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut next_comp = 0;
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut edge)) = call.last_mut() {
                if *edge < adj[v].len() {
                    let w = adj[v][*edge];
                    *edge += 1;
                    if index[w] == UNVISITED {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        while let Some(w) = stack.pop() {
                            on_stack[w] = false;
                            comp[w] = next_comp;
                            if w == v {
                                break;
                            }
                        }
                        next_comp += 1;
                    }
                }
            }
        }
        comp
    }

    pub fn is_strongly_connected(&self) -> bool {
        let comp = self.strongly_connected_components();
        comp.iter().all(|&c| c == comp[0])
    }

    /// True iff the condensation has exactly one source component, i.e. some
    /// node reaches every other node along arc direction.
    pub fn has_directed_spanning_tree(&self) -> bool {
        let comp = self.strongly_connected_components();
        let ncomp = comp.iter().max().map_or(0, |m| m + 1);
        let mut has_incoming = vec![false; ncomp];
        for a in &self.arcs {
            if comp[a.source] != comp[a.target] {
                has_incoming[comp[a.target]] = true;
            }
        }
        has_incoming.iter().filter(|&&h| !h).count() == 1
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            arcs: self
                .arcs
                .iter()
                .map(|a| (a.source, a.target, a.weight))
                .collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, GraphError> {
        Self::new(json.n, json.arcs.iter().map(|&(s, t, w)| Arc::new(s, t, w)))
    }

    /// Edge-list text with an explicit `n=` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for a in &self.arcs {
            let _ = writeln!(out, "{} {} {}", a.source, a.target, a.weight);
        }
        out
    }
}

/// Parses `src dst [weight]` lines. `#` starts a comment; an optional
/// `n=<count>` line fixes the node count, otherwise it is `1 + max index`.
pub fn parse_edge_list(text: &str) -> Result<DirectedGraph, GraphError> {
    let mut header_n = None;
    let mut arcs = Vec::new();
    let mut max_index = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content
            .strip_prefix("n=")
            .or_else(|| content.strip_prefix("n ="))
        {
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| GraphError::Parse {
                    line,
                    msg: format!("bad node-count header {content:?}"),
                })?;
            if header_n.is_some() {
                return Err(GraphError::Parse {
                    line,
                    msg: "repeated n= header".into(),
                });
            }
            header_n = Some(n);
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if !(2..=3).contains(&tokens.len()) {
            return Err(GraphError::Parse {
                line,
                msg: format!("expected `src dst [weight]`, got {content:?}"),
            });
        }
        let node = |tok: &str| {
            tok.parse::<usize>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad node index {tok:?}"),
            })
        };
        let source = node(tokens[0])?;
        let target = node(tokens[1])?;
        let weight = match tokens.get(2) {
            Some(tok) => tok.parse::<f64>().map_err(|_| GraphError::Parse {
                line,
                msg: format!("bad weight {tok:?}"),
            })?,
            None => 1.0,
        };
        max_index = Some(max_index.unwrap_or(0).max(source).max(target));
        arcs.push((line, Arc::new(source, target, weight)));
    }
    let n = match (header_n, max_index) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(GraphError::Empty),
    };
    DirectedGraph::from_numbered(n, arcs)
}

/// Per-node weighted degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    pub indeg: Vec<f64>,
    pub outdeg: Vec<f64>,
    /// `indeg − outdeg`
    pub imbalance: Vec<f64>,
}

impl DegreeProfile {
    pub fn max_abs_imbalance(&self) -> f64 {
        self.imbalance.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Dense Laplacian `L = A − D` with zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    m: Matrix,
}

impl Laplacian {
    pub fn from_graph(g: &DirectedGraph) -> Self {
        let n = g.n();
        let mut m = g.adjacency();
        for i in 0..n {
            let indeg: f64 = (0..n).map(|j| m[(i, j)]).sum();
            m[(i, i)] = -indeg;
        }
        Laplacian { m }
    }

    /// Wraps a matrix after checking the Laplacian sign pattern and zero row
    /// sums (tolerance `1e-9·max(1, max|L|)`).
    pub fn from_matrix(m: Matrix) -> Result<Self, GraphError> {
        if !m.is_square() {
            return Err(GraphError::InvalidLaplacian(format!(
                "not square ({}x{})",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() == 0 {
            return Err(GraphError::Empty);
        }
        if !m.is_finite() {
            return Err(GraphError::InvalidLaplacian("non-finite entry".into()));
        }
        let tol = 1e-9 * m.max_abs().max(1.0);
        let n = m.rows();
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                if i != j && v < 0.0 {
                    return Err(GraphError::InvalidLaplacian(format!(
                        "negative off-diagonal entry L[{i}][{j}] = {v}"
                    )));
                }
                if i == j && v > 0.0 {
                    return Err(GraphError::InvalidLaplacian(format!(
                        "positive diagonal entry L[{i}][{i}] = {v}"
                    )));
                }
            }
        }
        for (i, s) in m.row_sums().iter().enumerate() {
            if s.abs() > tol {
                return Err(GraphError::InvalidLaplacian(format!(
                    "row {i} sums to {s:e}"
                )));
            }
        }
        Ok(Laplacian { m })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, GraphError> {
        Self::from_matrix(Matrix::from_rows(rows))
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn max_abs(&self) -> f64 {
        self.m.max_abs()
    }

    pub fn max_abs_diagonal(&self) -> f64 {
        (0..self.n()).fold(0.0, |acc, i| acc.max(self.m[(i, i)].abs()))
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.m.column_sums()
    }

    /// `max_j |Σ_i L_ij|`
    pub fn column_sum_residual(&self) -> f64 {
        self.column_sums().iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Recovers the graph: every positive off-diagonal `L_ij` is an arc
    /// `j -> i`.
    pub fn to_graph(&self) -> DirectedGraph {
        let n = self.n();
        let mut arcs = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if i != j && self.m[(i, j)] > 0.0 {
                    arcs.push(Arc::new(j, i, self.m[(i, j)]));
                }
            }
        }
        DirectedGraph::new(n, arcs).expect("laplacian support is a simple graph")
    }
}

/// Directed G(n, p): every ordered pair `(s, t)`, `s ≠ t`, is an arc with
/// probability `p`, independently, weight 1. Pairs are drawn in
/// `(source, target)` order from a ChaCha8 stream seeded with `seed`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> DirectedGraph {
    assert!(n > 0, "n must be positive");
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            if rng.random::<f64>() < p {
                arcs.push(Arc::unit(s, t));
            }
        }
    }
    DirectedGraph { n, arcs }
}

/// Random weighted digraph: G(n, p) topology with weights uniform in
/// `[w_lo, w_hi]`.
pub fn random_weighted(n: usize, p: f64, w_lo: f64, w_hi: f64, seed: u64) -> DirectedGraph {
    assert!(0.0 < w_lo && w_lo <= w_hi);
    let topo = erdos_renyi(n, p, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let arcs = topo
        .arcs
        .iter()
        .map(|a| {
            Arc::new(
                a.source,
                a.target,
                w_lo + (w_hi - w_lo) * rng.random::<f64>(),
            )
        })
        .collect();
    DirectedGraph { n, arcs }
}

/// Random balanced weighted digraph built as a superposition of `cycles`
/// random simple cycles with weights in `[w_lo, w_hi]`.
pub fn random_balanced(n: usize, cycles: usize, w_lo: f64, w_hi: f64, seed: u64) -> DirectedGraph {
    assert!(n >= 2 && 0.0 < w_lo && w_lo <= w_hi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Matrix::zeros(n, n);
    for _ in 0..cycles {
        let len = rng.random_range(2..=n);
        let mut nodes: Vec<usize> = (0..n).collect();
        for i in 0..len {
            let k = rng.random_range(i..n);
            nodes.swap(i, k);
        }
        let weight = w_lo + (w_hi - w_lo) * rng.random::<f64>();
        for i in 0..len {
            let (s, t) = (nodes[i], nodes[(i + 1) % len]);
            w[(s, t)] += weight;
        }
    }
    let mut arcs = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if w[(s, t)] > 0.0 {
                arcs.push(Arc::new(s, t, w[(s, t)]));
            }
        }
    }
    DirectedGraph { n, arcs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_node() -> DirectedGraph {
        crate::reference::five_node_graph()
    }

    fn reachable_from(g: &DirectedGraph, root: usize) -> Vec<bool> {
        let adj = g.out_neighbors();
        let mut seen = vec![false; g.n()];
        let mut queue = std::collections::VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    #[test]
    fn parse_single_arc() {
        let g = parse_edge_list("0 1").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.arcs(), &[Arc::unit(0, 1)]);
    }

    #[test]
    fn parse_symmetric_pair_with_weights() {
        let g = parse_edge_list("0 1 5.0\n1 0 5.0").unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.weight(0, 1), Some(5.0));
        assert_eq!(g.weight(1, 0), Some(5.0));
    }

    #[test]
    fn parse_header_comments_and_errors() {
        let g = parse_edge_list("# test\nn=4\n0 1 # trailing\n\n2 3 0.5\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.arc_count(), 2);

        assert_eq!(
            parse_edge_list("0 0 1.0").unwrap_err(),
            GraphError::SelfLoop { line: 1, node: 0 }
        );
        assert!(matches!(
            parse_edge_list("0 1\n0 1 2").unwrap_err(),
            GraphError::DuplicateArc { line: 2, .. }
        ));
        assert!(matches!(
            parse_edge_list("0 1 -2").unwrap_err(),
            GraphError::BadWeight { line: 1, .. }
        ));
        assert!(matches!(
            parse_edge_list("0 1\nfoo bar").unwrap_err(),
            GraphError::Parse { line: 2, .. }
        ));
        assert!(matches!(
            parse_edge_list("n=2\n0 5").unwrap_err(),
            GraphError::NodeOutOfRange { line: 2, .. }
        ));
        assert_eq!(parse_edge_list("# nothing").unwrap_err(), GraphError::Empty);
    }

    #[test]
    fn laplacian_single_arc() {
        // arc 0 -> 1: A_10 = 1
        let g = parse_edge_list("0 1").unwrap();
        let l = g.laplacian();
        assert_eq!(l.matrix().to_rows(), vec![vec![0.0, 0.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn laplacian_dyad() {
        let g = parse_edge_list("0 1\n1 0").unwrap();
        assert_eq!(
            g.laplacian().matrix().to_rows(),
            vec![vec![-1.0, 1.0], vec![1.0, -1.0]]
        );
    }

    #[test]
    fn laplacian_five_node_matches_printed_matrix() {
        let l = five_node().laplacian();
        let want = [
            [-10.0, 0.0, 5.0, 0.0, 5.0],
            [0.0, -2.0, 0.0, 2.0, 0.0],
            [0.0, 0.0, -5.0, 0.0, 5.0],
            [1.0, 3.0, 0.0, -4.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, -1.0],
        ];
        assert_eq!(l.matrix(), &Matrix::from_rows(&want));
        assert_eq!(l.to_graph(), five_node());
    }

    #[test]
    fn laplacian_from_matrix_validates() {
        assert!(Laplacian::from_rows(&[[0.0, 0.0], [1.0, -1.0]]).is_ok());
        assert!(Laplacian::from_rows(&[[1.0, -1.0], [0.0, 0.0]]).is_err());
        assert!(Laplacian::from_rows(&[[-1.0, 2.0], [0.0, 0.0]]).is_err());
        assert!(Laplacian::from_matrix(Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn degrees_and_balance() {
        let cycle = DirectedGraph::directed_cycle(3, 1.0);
        assert_eq!(cycle.degrees().imbalance, vec![0.0; 3]);
        assert!(cycle.is_balanced(1e-9));

        let arc = parse_edge_list("0 1").unwrap();
        assert_eq!(arc.degrees().imbalance, vec![-1.0, 1.0]);
        assert!(!arc.is_balanced(1e-9));

        // the four-node minimally reactive example
        let l = Laplacian::from_rows(&[
            [-9.0, 0.0, 3.0, 6.0],
            [5.0, -5.0, 0.0, 0.0],
            [0.0, 5.0, -5.0, 0.0],
            [4.0, 0.0, 2.0, -6.0],
        ])
        .unwrap();
        let g = l.to_graph();
        assert_eq!(g.degrees().imbalance, vec![0.0; 4]);
        assert!(g.is_balanced(g.default_balance_tol()));
    }

    #[test]
    fn complement_edge_cases() {
        assert_eq!(
            DirectedGraph::complete(3).complement().unwrap(),
            DirectedGraph::null(3)
        );
        let c = DirectedGraph::null(3).complement().unwrap();
        assert_eq!(c.arc_count(), 6);
        assert_eq!(five_node().complement().unwrap_err(), GraphError::Weighted);
    }

    #[test]
    fn complement_is_involution_exhaustive_small() {
        for n in 1..=4usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|s| (0..n).map(move |t| (s, t)))
                .filter(|(s, t)| s != t)
                .collect();
            // every graph on n <= 3; a stride through n = 4
            let total = 1u64 << pairs.len();
            let step = if n == 4 { 37 } else { 1 };
            let mut mask = 0;
            while mask < total {
                let chosen: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                let g = DirectedGraph::unweighted(n, &chosen).unwrap();
                assert_eq!(g.complement().unwrap().complement().unwrap(), g);
                mask += step;
            }
        }
    }

    #[test]
    fn spanning_tree_and_strong_connectivity() {
        let path = DirectedGraph::directed_path(3);
        assert!(path.has_directed_spanning_tree());
        assert!(!path.is_strongly_connected());

        let isolated = DirectedGraph::null(2);
        assert!(!isolated.has_directed_spanning_tree());
        assert!(!isolated.is_strongly_connected());

        let cycle = DirectedGraph::directed_cycle(3, 1.0);
        assert!(cycle.is_strongly_connected());

        let g = five_node();
        assert!(g.has_directed_spanning_tree());
        assert!(g.is_strongly_connected());
        for root in 0..5 {
            assert!(reachable_from(&g, root).iter().all(|&r| r));
        }
    }

    #[test]
    fn connectivity_matches_bfs_oracle() {
        for seed in 0..300u64 {
            let n = 1 + (seed % 8) as usize;
            let p = [0.1, 0.2, 0.3, 0.5][(seed % 4) as usize];
            let g = erdos_renyi(n, p, seed);
            let reach: Vec<Vec<bool>> = (0..n).map(|r| reachable_from(&g, r)).collect();
            let any_root = reach.iter().any(|r| r.iter().all(|&x| x));
            let all_roots = reach.iter().all(|r| r.iter().all(|&x| x));
            assert_eq!(g.has_directed_spanning_tree(), any_root, "seed {seed}");
            assert_eq!(g.is_strongly_connected(), all_roots, "seed {seed}");
            if all_roots {
                assert!(any_root);
            }
        }
    }

    #[test]
    fn erdos_renyi_endpoints_and_determinism() {
        assert_eq!(erdos_renyi(6, 0.0, 1).arc_count(), 0);
        assert_eq!(erdos_renyi(6, 1.0, 1).arc_count(), 30);
        assert_eq!(erdos_renyi(10, 0.4, 99), erdos_renyi(10, 0.4, 99));
        assert_ne!(erdos_renyi(10, 0.4, 99), erdos_renyi(10, 0.4, 100));
    }

    #[test]
    fn random_balanced_is_balanced() {
        for seed in 0..50 {
            let g = random_balanced(7, 4, 0.5, 2.0, seed);
            assert!(g.is_balanced(1e-12), "seed {seed}");
        }
    }

    #[test]
    fn balance_iff_zero_column_sums() {
        for seed in 0..100u64 {
            let g = if seed % 2 == 0 {
                random_balanced(6, 3, 0.5, 2.0, seed)
            } else {
                random_weighted(6, 0.4, 0.5, 2.0, seed)
            };
            let l = g.laplacian();
            let tol = 1e-9;
            assert_eq!(g.is_balanced(tol), l.column_sum_residual() <= tol);
            for s in l.matrix().row_sums() {
                assert!(s.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn json_and_edge_list_roundtrip() {
        let g = five_node();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back: GraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(DirectedGraph::from_json(&back).unwrap(), g);
        assert_eq!(parse_edge_list(&g.to_edge_list()).unwrap(), g);
        // header keeps isolated trailing nodes
        let h = DirectedGraph::unweighted(4, &[(0, 1)]).unwrap();
        assert_eq!(parse_edge_list(&h.to_edge_list()).unwrap().n(), 4);
    }
}
