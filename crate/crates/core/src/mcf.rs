//! Integer min-cost flow by successive shortest paths.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("only {routed} of {required} units can be routed")]
    Infeasible { routed: i64, required: i64 },
    #[error("residual graph has a negative cycle")]
    NegativeCycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowEdge {
    pub from: usize,
    pub to: usize,
    pub cap: i64,
    pub cost: i64,
    pub flow: i64,
}

impl FlowEdge {
    pub fn residual(&self) -> i64 {
        self.cap - self.flow
    }
}

/// Directed network; every edge `e` has a paired reverse edge `e ^ 1`.
#[derive(Debug, Clone, Default)]
pub struct FlowNetwork {
    nodes: usize,
    edges: Vec<FlowEdge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            nodes,
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Adds `from -> to` and returns its index. Indices are even; the odd
    /// successor is the reverse residual edge.
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(FlowEdge {
            from,
            to,
            cap,
            cost,
            flow: 0,
        });
        self.edges.push(FlowEdge {
            from: to,
            to: from,
            cap: 0,
            cost: -cost,
            flow: 0,
        });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        id
    }

    pub fn edge(&self, id: usize) -> &FlowEdge {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[FlowEdge] {
        &self.edges
    }

    /// Pushes `amount` along edge `id` (negative values cancel flow).
    pub fn push(&mut self, id: usize, amount: i64) {
        self.edges[id].flow += amount;
        self.edges[id ^ 1].flow -= amount;
    }

    pub fn total_cost(&self) -> i64 {
        self.edges.iter().step_by(2).map(|e| e.cost * e.flow).sum()
    }

    /// Bellman–Ford from `source` over edges with residual capacity.
    fn shortest_paths(&self, source: usize) -> Result<(Vec<Option<i64>>, Vec<usize>), FlowError> {
        let mut dist = vec![None; self.nodes];
        let mut pred = vec![usize::MAX; self.nodes];
        dist[source] = Some(0);
        for round in 0..self.nodes {
            let mut changed = false;
            for (id, e) in self.edges.iter().enumerate() {
                if e.residual() <= 0 {
                    continue;
                }
                let Some(du) = dist[e.from] else { continue };
                let cand = du + e.cost;
                if dist[e.to].is_none_or(|dv| cand < dv) {
                    dist[e.to] = Some(cand);
                    pred[e.to] = id;
                    changed = true;
                }
            }
            if !changed {
                return Ok((dist, pred));
            }
            if round + 1 == self.nodes {
                return Err(FlowError::NegativeCycle);
            }
        }
        Ok((dist, pred))
    }

    /// Routes `required` units from `source` to `sink` at minimum cost.
    /// Returns the total cost of the resulting flow.
    pub fn min_cost_flow(
        &mut self,
        source: usize,
        sink: usize,
        required: i64,
    ) -> Result<i64, FlowError> {
        let mut routed = 0;
        while routed < required {
            let (dist, pred) = self.shortest_paths(source)?;
            if dist[sink].is_none() {
                return Err(FlowError::Infeasible { routed, required });
            }
            let mut bottleneck = required - routed;
            let mut v = sink;
            while v != source {
                let e = &self.edges[pred[v]];
                bottleneck = bottleneck.min(e.residual());
                v = e.from;
            }
            let mut v = sink;
            while v != source {
                let id = pred[v];
                self.push(id, bottleneck);
                v = self.edges[id].from;
            }
            routed += bottleneck;
        }
        Ok(self.total_cost())
    }

    /// Node potentials `π` with `cost(e) + π(from) − π(to) ≥ 0` on every
    /// residual edge. They exist iff the current flow is cost-optimal.
    pub fn potentials(&self) -> Result<Vec<i64>, FlowError> {
        let mut pi = vec![0i64; self.nodes];
        for round in 0..=self.nodes {
            let mut changed = false;
            for e in &self.edges {
                if e.residual() > 0 && pi[e.from] + e.cost < pi[e.to] {
                    pi[e.to] = pi[e.from] + e.cost;
                    changed = true;
                }
            }
            if !changed {
                return Ok(pi);
            }
            if round == self.nodes {
                break;
            }
        }
        Err(FlowError::NegativeCycle)
    }

    /// `cost(e) + π(from) − π(to)`
    pub fn reduced_cost(&self, id: usize, pi: &[i64]) -> i64 {
        let e = &self.edges[id];
        e.cost + pi[e.from] - pi[e.to]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_cheaper_route() {
        let mut net = FlowNetwork::new(4);
        let a = net.add_edge(0, 1, 1, 1);
        let b = net.add_edge(1, 3, 1, 1);
        let c = net.add_edge(0, 2, 2, 2);
        let d = net.add_edge(2, 3, 2, 2);
        assert_eq!(net.min_cost_flow(0, 3, 2).unwrap(), 2 + 4);
        assert_eq!(net.edge(a).flow, 1);
        assert_eq!(net.edge(b).flow, 1);
        assert_eq!(net.edge(c).flow, 1);
        assert_eq!(net.edge(d).flow, 1);
        let pi = net.potentials().unwrap();
        for id in 0..net.edges().len() {
            if net.edge(id).residual() > 0 {
                assert!(net.reduced_cost(id, &pi) >= 0);
            }
        }
    }

    #[test]
    fn reroutes_through_reverse_edges() {
        // the greedy first path 0-1-2-3 must be partly undone
        let mut net = FlowNetwork::new(4);
        net.add_edge(0, 1, 1, 1);
        net.add_edge(0, 2, 1, 3);
        net.add_edge(1, 2, 1, 1);
        net.add_edge(1, 3, 1, 3);
        net.add_edge(2, 3, 1, 1);
        assert_eq!(net.min_cost_flow(0, 3, 2).unwrap(), 8);
    }

    #[test]
    fn reports_infeasibility() {
        let mut net = FlowNetwork::new(3);
        net.add_edge(0, 1, 1, 0);
        net.add_edge(1, 2, 1, 0);
        assert_eq!(
            net.min_cost_flow(0, 2, 2).unwrap_err(),
            FlowError::Infeasible {
                routed: 1,
                required: 2
            }
        );
    }
}
