//! Reactivity analysis of directed consensus networks and minimal
//! perturbations that make them minimally reactive.

pub mod cli;
pub mod experiments;
pub mod graph;
pub mod linalg;
pub mod link_ilp;
pub mod lp;
pub mod mcf;
pub mod reference;
pub mod sim;
pub mod spectral;
pub mod weight_qp;

pub use graph::{erdos_renyi, parse_edge_list, Arc, DegreeProfile, DirectedGraph, Laplacian};
