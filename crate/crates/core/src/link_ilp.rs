//! Minimal link additions and removals that balance an unweighted digraph.
//!
//! Each ordered pair `(s, t)` contributes at most one binary variable: adding
//! `s -> t` when the arc is absent, removing it when present. Adding `s -> t`
//! raises the out-degree of `s` and the in-degree of `t`, removing does the
//! opposite, so the balance constraint at node `v` reads
//!
//! ```text
//! Σ_{add s->t} ([v=t] − [v=s]) x  +  Σ_{remove s->t} ([v=s] − [v=t]) x  =  out_v − in_v
//! ```
//!
//! Every column has one `+1` and one `−1`, so the system is a network matrix
//! and the programs are min-cost flows: an addition `s -> t` becomes a unit
//! flow edge `s -> t`, a removal `s -> t` a unit flow edge `t -> s`, and nodes
//! with surplus in-degree supply `in_v − out_v` units.
//!
//! Among all optimal 0/1 vectors the lexicographically smallest is returned,
//! with additions ordered before removals and each group sorted by
//! `(source, target)`.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Arc, DirectedGraph, GraphError};
use crate::linalg::Matrix;
use crate::lp::{self, BinarySolution, LpError};
use crate::mcf::{FlowError, FlowNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("link perturbation needs an unweighted graph")]
    Weighted,
    #[error("bias {bias} outside the open interval (0, {bound})")]
    BiasOutOfRange { bias: f64, bound: f64 },
    #[error("exhaustive search supports at most {max} nodes, got {n}")]
    OracleTooLarge { n: usize, max: usize },
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IlpMode {
    Add,
    Remove,
    AddRemove,
    AddRemoveBiased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Change {
    Add,
    Remove,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlpVar {
    pub source: usize,
    pub target: usize,
    pub change: Change,
}

impl IlpVar {
    /// Endpoints of the unit flow edge this variable stands for.
    fn flow_edge(&self) -> (usize, usize) {
        match self.change {
            Change::Add => (self.source, self.target),
            Change::Remove => (self.target, self.source),
        }
    }
}

/// 0/1 program `min wᵀx s.t. B x = r`.
#[derive(Debug, Clone)]
pub struct IlpProblem {
    pub n: usize,
    pub mode: IlpMode,
    pub vars: Vec<IlpVar>,
    /// `n × vars` node-balance matrix.
    pub balance_rows: Matrix,
    /// `out_v − in_v`
    pub rhs: Vec<f64>,
    pub objective_weights: Vec<f64>,
    /// `ε̂` of the biased objective, zero otherwise.
    pub bias: f64,
}

impl IlpProblem {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Checks `B x = r` for a 0/1 vector.
    pub fn is_feasible(&self, x: &[u8]) -> bool {
        let xf: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
        let bx = self.balance_rows.mul_vec(&xf);
        bx.iter().zip(&self.rhs).all(|(a, b)| a == b)
    }

    pub fn objective(&self, x: &[u8]) -> f64 {
        x.iter()
            .zip(&self.objective_weights)
            .map(|(&v, w)| f64::from(v) * w)
            .sum()
    }
}

fn require_unweighted(g: &DirectedGraph) -> Result<(), LinkError> {
    if g.is_unweighted() {
        Ok(())
    } else {
        Err(LinkError::Weighted)
    }
}

/// `1/n²`, the exclusive upper limit for the tie-break bias.
pub fn bias_bound(n: usize) -> f64 {
    1.0 / (n.max(1) * n.max(1)) as f64
}

/// `0.5/n²`
pub fn default_bias(n: usize) -> f64 {
    0.5 * bias_bound(n)
}

fn check_bias(n: usize, bias: f64) -> Result<(), LinkError> {
    let bound = bias_bound(n);
    if bias.is_finite() && bias > 0.0 && bias < bound {
        Ok(())
    } else {
        Err(LinkError::BiasOutOfRange { bias, bound })
    }
}

pub fn build_ilp(g: &DirectedGraph, mode: IlpMode, bias: f64) -> Result<IlpProblem, LinkError> {
    require_unweighted(g)?;
    let n = g.n();
    if mode == IlpMode::AddRemoveBiased {
        check_bias(n, bias)?;
    }
    let mut vars = Vec::new();
    if mode != IlpMode::Remove {
        for s in 0..n {
            for t in 0..n {
                if s != t && !g.has_arc(s, t) {
                    vars.push(IlpVar {
                        source: s,
                        target: t,
                        change: Change::Add,
                    });
                }
            }
        }
    }
    if mode != IlpMode::Add {
        for a in g.arcs() {
            vars.push(IlpVar {
                source: a.source,
                target: a.target,
                change: Change::Remove,
            });
        }
    }
    let mut balance_rows = Matrix::zeros(n, vars.len());
    let mut objective_weights = Vec::with_capacity(vars.len());
    let bias = if mode == IlpMode::AddRemoveBiased {
        bias
    } else {
        0.0
    };
    for (k, v) in vars.iter().enumerate() {
        let (from, to) = v.flow_edge();
        balance_rows[(from, k)] = -1.0;
        balance_rows[(to, k)] = 1.0;
        objective_weights.push(match v.change {
            Change::Add => 1.0 - bias,
            Change::Remove => 1.0 + bias,
        });
    }
    let rhs = g.count_imbalance().iter().map(|&e| -(e as f64)).collect();
    Ok(IlpProblem {
        n,
        mode,
        vars,
        balance_rows,
        rhs,
        objective_weights,
        bias,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkPerturbation {
    pub added: Vec<(usize, usize)>,
    pub removed: Vec<(usize, usize)>,
    /// `|added| + |removed|`
    pub j_star: usize,
    /// Resulting graph `A + P − Q`.
    pub a_star: DirectedGraph,
}

impl LinkPerturbation {
    fn apply(g: &DirectedGraph, added: Vec<(usize, usize)>, removed: Vec<(usize, usize)>) -> Self {
        let arcs = g
            .arcs()
            .iter()
            .filter(|a| !removed.contains(&(a.source, a.target)))
            .copied()
            .chain(added.iter().map(|&(s, t)| Arc::unit(s, t)));
        let a_star = DirectedGraph::new(g.n(), arcs).expect("perturbation keeps the graph simple");
        LinkPerturbation {
            j_star: added.len() + removed.len(),
            added,
            removed,
            a_star,
        }
    }

    fn from_assignment(g: &DirectedGraph, problem: &IlpProblem, x: &[u8]) -> Self {
        let mut added = Vec::new();
        let mut removed = Vec::new();
        for (v, &xv) in problem.vars.iter().zip(x) {
            if xv == 1 {
                match v.change {
                    Change::Add => added.push((v.source, v.target)),
                    Change::Remove => removed.push((v.source, v.target)),
                }
            }
        }
        Self::apply(g, added, removed)
    }

    pub fn psi(&self) -> f64 {
        psi_from(self.j_star, self.a_star.n())
    }
}

fn psi_from(j_star: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        j_star as f64 / n as f64
    }
}

/// Integer costs with the same argmin as the (possibly biased) objective.
///
/// For `0 < ε̂ < 1/n²` the biased optimum is the unbiased optimum with the
/// most additions (the difference `#removed − #added` never reaches `n²` in
/// magnitude), which costs `n² ∓ 1` reproduce exactly.
fn integer_costs(problem: &IlpProblem) -> Vec<i64> {
    let scale = (problem.n * problem.n).max(1) as i64;
    problem
        .vars
        .iter()
        .map(|v| match (problem.mode, v.change) {
            (IlpMode::AddRemoveBiased, Change::Add) => scale - 1,
            (IlpMode::AddRemoveBiased, Change::Remove) => scale + 1,
            _ => 1,
        })
        .collect()
}

/// Solves the program as a min-cost flow and returns the lexicographically
/// smallest optimal 0/1 vector.
pub fn solve_ilp(problem: &IlpProblem) -> Result<Vec<u8>, LinkError> {
    let n = problem.n;
    let (src, snk) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    let costs = integer_costs(problem);
    let ids: Vec<usize> = problem
        .vars
        .iter()
        .zip(&costs)
        .map(|(v, &c)| {
            let (a, b) = v.flow_edge();
            net.add_edge(a, b, 1, c)
        })
        .collect();
    let mut required = 0;
    for (v, &r) in problem.rhs.iter().enumerate() {
        // supply at v is in_v − out_v = −r
        let supply = -r as i64;
        if supply > 0 {
            net.add_edge(src, v, supply, 0);
            required += supply;
        } else if supply < 0 {
            net.add_edge(v, snk, -supply, 0);
        }
    }
    net.min_cost_flow(src, snk, required)?;
    lex_min(&mut net, &ids)?;
    Ok(ids.iter().map(|&id| net.edge(id).flow as u8).collect())
}

/// Rewrites an optimal flow into the lexicographically smallest optimal one.
///
/// All optimal flows agree outside the edges of zero reduced cost, and two
/// of them differ by cycles of such edges in the residual graph. Walking the
/// variables in order, a variable at 1 is switched off whenever a tight
/// residual cycle through its reverse edge avoids every variable already
/// decided.
fn lex_min(net: &mut FlowNetwork, ids: &[usize]) -> Result<(), FlowError> {
    let pi = net.potentials()?;
    let nodes = net.node_count();
    let tight: Vec<bool> = ids
        .iter()
        .map(|&id| net.reduced_cost(id, &pi) == 0)
        .collect();
    let mut fixed = vec![false; ids.len()];
    for k in 0..ids.len() {
        let id = ids[k];
        if net.edge(id).flow == 0 || !tight[k] {
            fixed[k] = true;
            continue;
        }
        let (a, b) = (net.edge(id).from, net.edge(id).to);
        // residual tight edges among undecided variables
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
        for (j, &jd) in ids.iter().enumerate() {
            if fixed[j] || j == k || !tight[j] {
                continue;
            }
            let e = net.edge(jd);
            if e.flow == 0 {
                adj[e.from].push((e.to, j));
            } else {
                adj[e.to].push((e.from, j));
            }
        }
        if let Some(path) = bfs_path(&adj, a, b) {
            net.push(id, -1);
            for j in path {
                let jd = ids[j];
                let delta = if net.edge(jd).flow == 0 { 1 } else { -1 };
                net.push(jd, delta);
            }
        }
        fixed[k] = true;
    }
    Ok(())
}

/// Variables along a BFS path `from ⇝ to`.
fn bfs_path(adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            let mut vars = Vec::new();
            let mut cur = to;
            while let Some((prev, var)) = pred[cur] {
                vars.push(var);
                cur = prev;
            }
            return Some(vars);
        }
        for &(w, var) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                pred[w] = Some((u, var));
                queue.push_back(w);
            }
        }
    }
    None
}

fn solve_mode(g: &DirectedGraph, mode: IlpMode, bias: f64) -> Result<LinkPerturbation, LinkError> {
    let problem = build_ilp(g, mode, bias)?;
    let x = solve_ilp(&problem)?;
    Ok(LinkPerturbation::from_assignment(g, &problem, &x))
}

/// Fewest arcs to add so the graph becomes balanced.
pub fn solve_link_addition(g: &DirectedGraph) -> Result<LinkPerturbation, LinkError> {
    solve_mode(g, IlpMode::Add, 0.0)
}

/// Fewest arcs to remove so the graph becomes balanced.
pub fn solve_link_removal(g: &DirectedGraph) -> Result<LinkPerturbation, LinkError> {
    solve_mode(g, IlpMode::Remove, 0.0)
}

/// Fewest additions plus removals. With `Some(ε̂)`, `0 < ε̂ < 1/n²`, ties are
/// broken towards additions.
pub fn solve_link_addrem(
    g: &DirectedGraph,
    bias: Option<f64>,
) -> Result<LinkPerturbation, LinkError> {
    match bias {
        Some(b) => solve_mode(g, IlpMode::AddRemoveBiased, b),
        None => solve_mode(g, IlpMode::AddRemove, 0.0),
    }
}

/// LP relaxation of the program, kept for cross-checking the flow solver.
#[derive(Debug, Clone)]
pub struct RelaxationReport {
    /// Root LP optimum.
    pub relaxed: Vec<f64>,
    /// Largest distance of a relaxed entry from an integer.
    pub max_fractionality: f64,
    pub solution: BinarySolution,
}

/// Solves the LP relaxation with the simplex method and falls back to
/// branch and bound if the vertex found is fractional.
pub fn solve_ilp_by_lp(problem: &IlpProblem) -> Result<RelaxationReport, LinkError> {
    let solution = lp::solve_binary(
        &problem.objective_weights,
        &problem.balance_rows,
        &problem.rhs,
        1e-6,
    )?;
    let relaxed = solution.relaxation.x.clone();
    let max_fractionality = relaxed
        .iter()
        .map(|&v| lp::fractionality(v))
        .fold(0.0, f64::max);
    Ok(RelaxationReport {
        relaxed,
        max_fractionality,
        solution,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrivialMode {
    Add,
    Remove,
}

/// Balances by symmetrizing: add the reverse of every unidirectional arc,
/// or remove every unidirectional arc.
pub fn trivial_symmetrize(
    g: &DirectedGraph,
    mode: TrivialMode,
) -> Result<LinkPerturbation, LinkError> {
    require_unweighted(g)?;
    let one_way = g.arcs().iter().filter(|a| !g.has_arc(a.target, a.source));
    let (added, removed) = match mode {
        TrivialMode::Add => (
            one_way.map(|a| (a.target, a.source)).collect::<Vec<_>>(),
            Vec::new(),
        ),
        TrivialMode::Remove => (Vec::new(), one_way.map(|a| (a.source, a.target)).collect()),
    };
    let mut added = added;
    added.sort_unstable();
    Ok(LinkPerturbation::apply(g, added, removed))
}

/// Number of arcs whose reverse is absent.
pub fn unidirectional_count(g: &DirectedGraph) -> usize {
    g.arcs()
        .iter()
        .filter(|a| !g.has_arc(a.target, a.source))
        .count()
}

/// `ψ = J*/n` with `J*` the unbiased add-or-remove optimum.
pub fn structural_reactivity(g: &DirectedGraph) -> Result<f64, LinkError> {
    let p = solve_link_addrem(g, None)?;
    Ok(psi_from(p.j_star, g.n()))
}

/// Largest graph accepted by [`brute_force_link_oracle`].
pub const ORACLE_MAX_NODES: usize = 5;

/// Exact optima from exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleResult {
    pub add: usize,
    pub remove: usize,
    pub both: usize,
    /// Most additions among minimum-count add-or-remove solutions.
    pub both_max_added: usize,
}

/// Visits every subset of the `n(n−1)` ordered pairs in Gray-code order,
/// flipping one pair per step and tracking the degree imbalance.
pub fn brute_force_link_oracle(g: &DirectedGraph) -> Result<OracleResult, LinkError> {
    require_unweighted(g)?;
    let n = g.n();
    if n > ORACLE_MAX_NODES {
        return Err(LinkError::OracleTooLarge {
            n,
            max: ORACLE_MAX_NODES,
        });
    }
    let pairs: Vec<(usize, usize, bool)> = (0..n)
        .flat_map(|s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
        .map(|(s, t)| (s, t, g.has_arc(s, t)))
        .collect();
    let mut excess = g.count_imbalance();
    let mut nonzero = excess.iter().filter(|&&e| e != 0).count();
    let mut flipped = vec![false; pairs.len()];
    let (mut adds, mut removes) = (0usize, 0usize);
    let mut best = OracleResult {
        add: usize::MAX,
        remove: usize::MAX,
        both: usize::MAX,
        both_max_added: 0,
    };
    let total: u64 = 1 << pairs.len();
    for step in 0..total {
        if step > 0 {
            let k = step.trailing_zeros() as usize;
            let (s, t, present) = pairs[k];
            flipped[k] = !flipped[k];
            // +1 when the arc s -> t exists after the flip
            let delta: i64 = if flipped[k] != present { 1 } else { -1 };
            for (v, d) in [(t, delta), (s, -delta)] {
                let before = excess[v] != 0;
                excess[v] += d;
                let after = excess[v] != 0;
                match (before, after) {
                    (true, false) => nonzero -= 1,
                    (false, true) => nonzero += 1,
                    _ => {}
                }
            }
            let counter = if present { &mut removes } else { &mut adds };
            if flipped[k] {
                *counter += 1;
            } else {
                *counter -= 1;
            }
        }
        if nonzero == 0 {
            let count = adds + removes;
            if removes == 0 {
                best.add = best.add.min(count);
            }
            if adds == 0 {
                best.remove = best.remove.min(count);
            }
            if count < best.both {
                best.both = count;
                best.both_max_added = adds;
            } else if count == best.both {
                best.both_max_added = best.both_max_added.max(adds);
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::erdos_renyi;
    use crate::reference;

    fn single_arc() -> DirectedGraph {
        DirectedGraph::unweighted(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn single_arc_cases() {
        let g = single_arc();
        let a = solve_link_addition(&g).unwrap();
        assert_eq!((a.added.clone(), a.j_star), (vec![(1, 0)], 1));
        let r = solve_link_removal(&g).unwrap();
        assert_eq!((r.removed.clone(), r.j_star), (vec![(0, 1)], 1));
        let b = solve_link_addrem(&g, Some(default_bias(2))).unwrap();
        assert_eq!(b.added, vec![(1, 0)]);
        assert!(b.removed.is_empty());
        // lexicographic rule puts additions first, so the unbiased optimum
        // with x = [0, 1] (remove) wins over [1, 0]
        let u = solve_link_addrem(&g, None).unwrap();
        assert_eq!(u.removed, vec![(0, 1)]);
        assert_eq!(structural_reactivity(&g).unwrap(), 0.5);
        assert_eq!(brute_force_link_oracle(&g).unwrap().both, 1);
        for mode in [TrivialMode::Add, TrivialMode::Remove] {
            assert_eq!(trivial_symmetrize(&g, mode).unwrap().j_star, 1);
        }
    }

    #[test]
    fn balanced_graphs_need_nothing() {
        let cycle = DirectedGraph::directed_cycle(3, 1.0);
        assert_eq!(solve_link_addition(&cycle).unwrap().j_star, 0);
        assert_eq!(solve_link_addrem(&cycle, Some(0.05)).unwrap().j_star, 0);
        assert_eq!(brute_force_link_oracle(&cycle).unwrap().both, 0);
        let dyad = DirectedGraph::unweighted(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(solve_link_removal(&dyad).unwrap().j_star, 0);
        assert_eq!(
            trivial_symmetrize(&dyad, TrivialMode::Add).unwrap().j_star,
            0
        );
        assert_eq!(structural_reactivity(&DirectedGraph::null(7)).unwrap(), 0.0);
        assert_eq!(
            structural_reactivity(&DirectedGraph::complete(7)).unwrap(),
            0.0
        );
    }

    #[test]
    fn mixed_optimum_beats_single_mode() {
        let g = reference::mixed_perturbation_graph();
        let o = brute_force_link_oracle(&g).unwrap();
        assert_eq!((o.add, o.remove, o.both), (3, 3, 2));
        let b = solve_link_addrem(&g, None).unwrap();
        assert_eq!(b.j_star, 2);
        assert_eq!((b.added.len(), b.removed.len()), (1, 1));
        assert_eq!(solve_link_addition(&g).unwrap().j_star, 3);
        assert_eq!(solve_link_removal(&g).unwrap().j_star, 3);
    }

    #[test]
    fn bias_range_is_enforced() {
        let g = single_arc();
        for bad in [0.0, 0.25, 1.0, -0.1, f64::NAN] {
            assert!(matches!(
                solve_link_addrem(&g, Some(bad)),
                Err(LinkError::BiasOutOfRange { .. })
            ));
        }
        assert!(solve_link_addrem(&g, Some(0.249)).is_ok());
    }

    #[test]
    fn weighted_input_is_rejected() {
        let g = DirectedGraph::new(2, [Arc::new(0, 1, 2.0)]).unwrap();
        assert_eq!(solve_link_addition(&g).unwrap_err(), LinkError::Weighted);
    }

    #[test]
    fn oracle_size_limit() {
        let g = DirectedGraph::null(6);
        assert_eq!(
            brute_force_link_oracle(&g).unwrap_err(),
            LinkError::OracleTooLarge { n: 6, max: 5 }
        );
    }

    #[test]
    fn constraint_system_shape() {
        let g = reference::mixed_perturbation_graph();
        let p = build_ilp(&g, IlpMode::AddRemoveBiased, 0.01).unwrap();
        assert_eq!(p.num_vars(), 12);
        assert_eq!(p.rhs.iter().sum::<f64>(), 0.0);
        for k in 0..p.num_vars() {
            let col = p.balance_rows.column(k);
            assert_eq!(col.iter().filter(|&&v| v == 1.0).count(), 1);
            assert_eq!(col.iter().filter(|&&v| v == -1.0).count(), 1);
        }
        assert!((p.objective_weights[0] - 0.99).abs() < 1e-15);
        assert!((p.objective_weights[11] - 1.01).abs() < 1e-15);
        assert_eq!(build_ilp(&g, IlpMode::Add, 0.0).unwrap().num_vars(), 3);
        assert_eq!(build_ilp(&g, IlpMode::Remove, 0.0).unwrap().num_vars(), 9);
    }

    #[test]
    fn flow_solution_is_lex_smallest_optimum() {
        // exhaustive check of the lexicographic rule on small graphs
        for seed in 0..30u64 {
            let g = erdos_renyi(4, 0.4, seed);
            for mode in [
                IlpMode::Add,
                IlpMode::Remove,
                IlpMode::AddRemove,
                IlpMode::AddRemoveBiased,
            ] {
                let p = build_ilp(&g, mode, 0.03).unwrap();
                let x = solve_ilp(&p).unwrap();
                assert!(p.is_feasible(&x));
                let m = p.num_vars();
                let mut best: Option<(f64, Vec<u8>)> = None;
                for mask in 0u32..(1 << m) {
                    let y: Vec<u8> = (0..m).map(|k| ((mask >> (m - 1 - k)) & 1) as u8).collect();
                    if !p.is_feasible(&y) {
                        continue;
                    }
                    let obj = p.objective(&y);
                    // masks ascend in lexicographic order, so keep the first optimum
                    if best.as_ref().is_none_or(|(b, _)| obj < b - 1e-12) {
                        best = Some((obj, y));
                    }
                }
                assert_eq!(x, best.unwrap().1, "seed {seed} mode {mode:?}");
            }
        }
    }

    #[test]
    fn relaxation_agrees_with_flow() {
        for seed in 0..20u64 {
            let g = erdos_renyi(5, 0.35, 100 + seed);
            for mode in [IlpMode::Add, IlpMode::Remove, IlpMode::AddRemove] {
                let p = build_ilp(&g, mode, 0.0).unwrap();
                let x = solve_ilp(&p).unwrap();
                let lp = solve_ilp_by_lp(&p).unwrap();
                assert!(lp.max_fractionality <= 1e-6);
                assert!((lp.solution.objective - p.objective(&x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn complement_symmetry_small() {
        for seed in 0..20u64 {
            let g = erdos_renyi(5, 0.3, seed);
            let c = g.complement().unwrap();
            let jg = solve_link_addrem(&g, None).unwrap().j_star;
            let jc = solve_link_addrem(&c, None).unwrap().j_star;
            assert_eq!(jg, jc);
        }
    }
}
