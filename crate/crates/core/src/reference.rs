//! Small reference networks with known reactivity data, used in tests.

use crate::graph::{Arc, DirectedGraph, Laplacian};

/// Five-node weighted network with positive reactivity.
pub fn five_node_graph() -> DirectedGraph {
    // (source, target, weight): L[target][source] = weight
    let arcs = [
        (2, 0, 5.0),
        (4, 0, 5.0),
        (3, 1, 2.0),
        (4, 2, 5.0),
        (0, 3, 1.0),
        (1, 3, 3.0),
        (3, 4, 1.0),
    ];
    DirectedGraph::new(5, arcs.iter().map(|&(s, t, w)| Arc::new(s, t, w))).expect("valid graph")
}

pub fn five_node_laplacian() -> Laplacian {
    five_node_graph().laplacian()
}

/// Optimized five-node Laplacian, rounded to two decimals.
/// Rounding leaves column sums of order 1e-2, so this is not an exact
/// Laplacian of a balanced graph.
pub const FIVE_NODE_OPTIMIZED_ROUNDED: [[f64; 5]; 5] = [
    [-3.95, 0.0, 3.49, 0.0, 0.46],
    [0.0, -1.76, 0.0, 1.76, 0.0],
    [0.0, 0.0, -3.49, 0.0, 3.49],
    [3.95, 1.76, 0.0, -5.71, 0.0],
    [0.0, 0.0, 0.0, 3.95, -3.95],
];

/// Initial state (one standard normal draw) used with the five-node network.
pub const FIVE_NODE_X0: [f64; 5] = [0.0505, 0.7641, -0.7397, 0.4984, -1.9546];

/// Consensus values of `FIVE_NODE_X0` under the original and optimized networks.
pub const FIVE_NODE_CONSENSUS: f64 = -0.1024;
pub const FIVE_NODE_OPTIMIZED_CONSENSUS: f64 = -0.2763;

/// Four-node balanced network (zero row and column sums).
pub fn four_node_balanced_laplacian() -> Laplacian {
    Laplacian::from_rows(&[
        [-9.0, 0.0, 3.0, 6.0],
        [5.0, -5.0, 0.0, 0.0],
        [0.0, 5.0, -5.0, 0.0],
        [4.0, 0.0, 2.0, -6.0],
    ])
    .expect("valid laplacian")
}

/// Unweighted four-node digraph on which combined addition/removal (2
/// changes) beats addition only (3) and removal only (3).
pub fn mixed_perturbation_graph() -> DirectedGraph {
    DirectedGraph::unweighted(
        4,
        &[
            (0, 1),
            (0, 3),
            (1, 3),
            (2, 0),
            (2, 1),
            (2, 3),
            (3, 0),
            (3, 1),
            (3, 2),
        ],
    )
    .expect("valid graph")
}
