//! Reactivity and consensus prediction from the Laplacian spectrum.
//!
//! The reactivity of `Ẋ = L X` is the largest eigenvalue of the symmetric
//! part `S = (L + Lᵀ)/2`. Because `L 1 = 0`, the all-ones direction gives a
//! Rayleigh quotient of exactly zero, so the reactivity is never negative, and
//! it is zero precisely when the columns of `L` also sum to zero.

use nalgebra::{DMatrix, Schur};
use serde::Serialize;
use thiserror::Error;

use crate::graph::Laplacian;
use crate::linalg::{self, col_piv_qr, LinalgError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state vector has length {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("consensus value undefined: left null vector sums to zero")]
    ConsensusUndefined,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReactivityReport {
    /// `λ₁((L + Lᵀ)/2)`
    pub reactivity: f64,
    /// Unit eigenvector attaining the Rayleigh quotient maximum.
    #[serde(skip)]
    pub maximizer: Vec<f64>,
    pub minimally_reactive: bool,
    /// `max_j |Σ_i L_ij|`
    pub column_sum_residual: f64,
    /// `‖S v − λ₁ v‖₂` for the returned pair.
    #[serde(skip)]
    pub eigen_residual: f64,
}

/// Default certification tolerance: `1e-9·max(1, max|L|)`.
pub fn default_tol(l: &Laplacian) -> f64 {
    1e-9 * l.max_abs().max(1.0)
}

pub fn reactivity(l: &Laplacian) -> Result<ReactivityReport, SpectralError> {
    reactivity_with_tol(l, default_tol(l))
}

pub fn reactivity_with_tol(l: &Laplacian, tol: f64) -> Result<ReactivityReport, SpectralError> {
    let s = l.matrix().symmetric_part();
    let eig = linalg::symmetric_eigen(&s)?;
    let value = eig.values[0];
    let mut v = eig.vector(0);
    // fix the sign so the report is deterministic
    let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let sv = s.mul_vec(&v);
    let eigen_residual = linalg::norm2(
        &sv.iter()
            .zip(&v)
            .map(|(a, b)| a - value * b)
            .collect::<Vec<_>>(),
    );
    let column_sum_residual = l.column_sum_residual();
    Ok(ReactivityReport {
        reactivity: value,
        maximizer: v,
        minimally_reactive: column_sum_residual <= tol,
        column_sum_residual,
        eigen_residual,
    })
}

/// Column-sum test for minimal reactivity.
pub fn is_minimally_reactive(l: &Laplacian, tol: f64) -> bool {
    l.column_sum_residual() <= tol
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsensusPrediction {
    /// Left null vector of `L`, scaled to sum to one.
    pub left_vector: Vec<f64>,
    pub consensus_value: f64,
    /// Sum of the entries of the unit-norm left null vector; near zero means
    /// the consensus value is ill-defined.
    pub weight_sum: f64,
    /// Dimension of the left nullspace (1 whenever a spanning tree exists).
    pub nullity: usize,
    pub has_spanning_tree: bool,
    pub warning: Option<String>,
}

const NULLSPACE_TOL: f64 = 1e-10;

/// Predicts the asymptotic consensus state `Σ w_j x0_j / Σ w_j`.
///
/// The left null vector is the projection of the all-ones vector onto the
/// left nullspace of `L`. With a directed spanning tree that nullspace is one
/// dimensional; otherwise the projection is a best-effort answer and a
/// warning is attached.
pub fn consensus_value(l: &Laplacian, x0: &[f64]) -> Result<ConsensusPrediction, SpectralError> {
    let n = l.n();
    if x0.len() != n {
        return Err(SpectralError::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    let qr = col_piv_qr(l.matrix(), NULLSPACE_TOL);
    let basis = qr.left_null_basis();
    let nullity = basis.cols();
    let ones = vec![1.0; n];
    let coeffs = basis.tr_mul_vec(&ones);
    let mut w = basis.mul_vec(&coeffs);
    let wnorm = linalg::norm2(&w);
    let weight_sum = if wnorm > 0.0 {
        w.iter().sum::<f64>() / wnorm
    } else {
        0.0
    };
    if wnorm == 0.0 || weight_sum <= 1e-12 {
        return Err(SpectralError::ConsensusUndefined);
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);

    let has_spanning_tree = l.to_graph().has_directed_spanning_tree();
    let warning = if !has_spanning_tree || nullity != 1 {
        Some(format!(
            "no directed spanning tree (left nullspace dimension {nullity}); \
             states need not reach a common value"
        ))
    } else {
        None
    };
    let consensus = linalg::dot(&w, x0);
    Ok(ConsensusPrediction {
        left_vector: w,
        consensus_value: consensus,
        weight_sum,
        nullity,
        has_spanning_tree,
        warning,
    })
}

/// Eigenvalues of `L` (possibly complex) as `(re, im)`, sorted by real part,
/// largest first. Returns `None` if the Schur iteration fails.
pub fn laplacian_eigenvalues(l: &Laplacian) -> Option<Vec<(f64, f64)>> {
    let n = l.n();
    let m = DMatrix::from_row_slice(n, n, l.matrix().as_slice());
    let schur = Schur::try_new(m, 1e-14, 10_000)?;
    let mut ev: Vec<(f64, f64)> = schur
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect();
    ev.sort_by(|a, b| b.0.total_cmp(&a.0));
    Some(ev)
}

/// `|Re λ₂(L)|`, the asymptotic decay rate towards consensus.
pub fn convergence_rate(l: &Laplacian) -> Option<f64> {
    let ev = laplacian_eigenvalues(l)?;
    ev.get(1).map(|e| e.0.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_balanced, random_weighted, DirectedGraph};
    use crate::reference;

    #[test]
    fn single_arc_reactivity_closed_form() {
        // S = [[0, 1/2], [1/2, -1]]; λ₁ = (-1 + √2)/2
        let l = Laplacian::from_rows(&[[0.0, 0.0], [1.0, -1.0]]).unwrap();
        let r = reactivity(&l).unwrap();
        let want = (-1.0 + 2f64.sqrt()) / 2.0;
        assert!((r.reactivity - want).abs() < 1e-14);
        assert!((want - 0.207107).abs() < 1e-6);
        assert!(!r.minimally_reactive);
    }

    #[test]
    fn symmetric_laplacian_has_zero_reactivity() {
        let l = Laplacian::from_rows(&[[-1.0, 1.0], [1.0, -1.0]]).unwrap();
        let r = reactivity(&l).unwrap();
        assert!(r.reactivity.abs() < 1e-15);
        assert!(r.minimally_reactive);
        assert!(is_minimally_reactive(&l, 1e-12));
    }

    #[test]
    fn four_node_example_is_minimally_reactive() {
        let l = reference::four_node_balanced_laplacian();
        let r = reactivity(&l).unwrap();
        assert!(r.reactivity.abs() < 1e-9);
        assert!(r.minimally_reactive);
        // maximizer is the uniform direction
        for v in &r.maximizer {
            assert!((v - 0.5).abs() < 1e-8);
        }
    }

    #[test]
    fn five_node_example_is_reactive() {
        let l = reference::five_node_laplacian();
        let r = reactivity(&l).unwrap();
        // regression constant, cross-checked against an independent LAPACK eigvalsh
        assert!(
            (r.reactivity - 1.305_162_034_810_78).abs() < 1e-10,
            "{}",
            r.reactivity
        );
        assert!(!is_minimally_reactive(&l, 1e-9));
        let cs = l.column_sums();
        assert_eq!(cs[3], -1.0);
        assert!(r.eigen_residual <= 1e-8 * l.matrix().symmetric_part().frobenius_norm());
    }

    #[test]
    fn rayleigh_certificate() {
        for seed in 0..50 {
            let l = random_weighted(8, 0.4, 0.5, 2.0, seed).laplacian();
            let r = reactivity(&l).unwrap();
            let s = l.matrix().symmetric_part();
            let q = linalg::dot(&r.maximizer, &s.mul_vec(&r.maximizer));
            assert!((q - r.reactivity).abs() < 1e-8);
            assert!(r.reactivity >= -1e-9);
        }
    }

    #[test]
    fn consensus_values_for_reference_networks() {
        let l = reference::five_node_laplacian();
        let c = consensus_value(&l, &reference::FIVE_NODE_X0).unwrap();
        assert!((c.consensus_value - reference::FIVE_NODE_CONSENSUS).abs() < 1e-3);
        assert_eq!(c.nullity, 1);
        assert!(c.warning.is_none());
        // w₁ᵀ L = 0
        let wl = l.matrix().tr_mul_vec(&c.left_vector);
        assert!(linalg::norm_inf(&wl) < 1e-12);
    }

    #[test]
    fn balanced_graph_consensus_is_average() {
        for seed in 0..20 {
            let g = random_balanced(6, 4, 0.5, 2.0, seed);
            if !g.has_directed_spanning_tree() {
                continue;
            }
            let l = g.laplacian();
            let x0: Vec<f64> = (0..6).map(|i| (i as f64 * 0.7).sin()).collect();
            let c = consensus_value(&l, &x0).unwrap();
            for w in &c.left_vector {
                assert!((w - 1.0 / 6.0).abs() < 1e-8);
            }
            let mean = x0.iter().sum::<f64>() / 6.0;
            assert!((c.consensus_value - mean).abs() < 1e-12);
            let fixed = consensus_value(&l, &[2.5; 6]).unwrap();
            assert!((fixed.consensus_value - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn consensus_without_spanning_tree_warns() {
        let g = DirectedGraph::null(3);
        let c = consensus_value(&g.laplacian(), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.nullity, 3);
        assert!(c.warning.is_some());
        assert!(!c.has_spanning_tree);
        assert!((c.consensus_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn consensus_rejects_wrong_dimension() {
        let l = reference::five_node_laplacian();
        assert_eq!(
            consensus_value(&l, &[1.0]).unwrap_err(),
            SpectralError::Dimension {
                expected: 5,
                got: 1
            }
        );
    }

    #[test]
    fn second_eigenvalue_of_reference_network() {
        let l = reference::five_node_laplacian();
        let ev = laplacian_eigenvalues(&l).unwrap();
        assert!(ev[0].0.abs() < 1e-10);
        let rate = convergence_rate(&l).unwrap();
        assert!((rate - 1.252_653_459_692_788).abs() < 1e-8, "{rate}");
    }
}
