//! Dense two-phase simplex for small bounded LPs, and a depth-first
//! branch-and-bound for 0/1 programs on top of it.
//!
//! Problems have the form `min cᵀx s.t. A x = b, 0 ≤ x ≤ u`. Bland's rule
//! is used throughout, so the method terminates on degenerate vertices.

use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub c: Vec<f64>,
    pub a_eq: Matrix,
    pub b_eq: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

const PIVOT_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;

struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost·x` over columns with `allowed[j]`, starting from the
    /// current basis.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<(), LpError> {
        let rhs = self.cols;
        for _ in 0..MAX_PIVOTS {
            // reduced costs d_j = c_j − c_Bᵀ B⁻¹ a_j
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    d -= cost[b] * self.t[i][j];
                }
                d < -PIVOT_TOL
            });
            let Some(j) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][j];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, j);
        }
        Err(LpError::IterationLimit(MAX_PIVOTS))
    }
}

pub fn solve_lp(lp: &LpProblem) -> Result<LpSolution, LpError> {
    let nv = lp.c.len();
    let m = lp.a_eq.rows();
    if lp.a_eq.cols() != nv || lp.b_eq.len() != m || lp.upper.len() != nv {
        return Err(LpError::Dimension(format!(
            "{} variables, A is {}x{}, {} right-hand sides, {} bounds",
            nv,
            m,
            lp.a_eq.cols(),
            lp.b_eq.len(),
            lp.upper.len()
        )));
    }
    // columns: x (nv) | bound slacks (nv) | artificials (m) | rhs
    let cols = 2 * nv + m;
    let mut t = Vec::with_capacity(m + nv);
    let mut basis = Vec::with_capacity(m + nv);
    for i in 0..m {
        let sign = if lp.b_eq[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for (j, v) in row.iter_mut().take(nv).enumerate() {
            *v = sign * lp.a_eq[(i, j)];
        }
        row[2 * nv + i] = 1.0;
        row[cols] = sign * lp.b_eq[i];
        t.push(row);
        basis.push(2 * nv + i);
    }
    for j in 0..nv {
        let mut row = vec![0.0; cols + 1];
        row[j] = 1.0;
        row[nv + j] = 1.0;
        row[cols] = lp.upper[j];
        t.push(row);
        basis.push(nv + j);
    }
    let mut tab = Tableau { t, basis, cols };

    let mut phase1 = vec![0.0; cols];
    phase1[2 * nv..].iter_mut().for_each(|c| *c = 1.0);
    tab.optimize(&phase1, &vec![true; cols])?;
    let infeas: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= 2 * nv)
        .map(|(i, _)| tab.t[i][cols])
        .sum();
    if infeas > 1e-7 {
        return Err(LpError::Infeasible);
    }
    // drive artificials out; rows where that is impossible are redundant
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= 2 * nv {
            if let Some(j) = (0..2 * nv).find(|&j| tab.t[i][j].abs() > PIVOT_TOL) {
                tab.pivot(i, j);
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    let mut cost = vec![0.0; cols];
    cost[..nv].copy_from_slice(&lp.c);
    let allowed: Vec<bool> = (0..cols).map(|j| j < 2 * nv).collect();
    tab.optimize(&cost, &allowed)?;

    let mut x = vec![0.0; nv];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nv {
            x[b] = tab.t[i][cols];
        }
    }
    let objective = x.iter().zip(&lp.c).map(|(a, b)| a * b).sum();
    Ok(LpSolution { x, objective })
}

/// Outcome of [`solve_binary`].
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySolution {
    pub x: Vec<u8>,
    pub objective: f64,
    /// Root relaxation.
    pub relaxation: LpSolution,
    /// Number of LP relaxations solved.
    pub nodes: usize,
}

/// Distance of `v` from the nearest integer.
pub fn fractionality(v: f64) -> f64 {
    (v - v.round()).abs()
}

/// Solves `min cᵀx s.t. A x = b, x ∈ {0,1}ⁿ` by LP-based branch and bound,
/// branching on the first fractional variable with the 0-branch first.
pub fn solve_binary(
    c: &[f64],
    a_eq: &Matrix,
    b_eq: &[f64],
    int_tol: f64,
) -> Result<BinarySolution, LpError> {
    let nv = c.len();
    let root = LpProblem {
        c: c.to_vec(),
        a_eq: a_eq.clone(),
        b_eq: b_eq.to_vec(),
        upper: vec![1.0; nv],
    };
    let relaxation = solve_lp(&root)?;
    let mut best: Option<(Vec<u8>, f64)> = None;
    let mut nodes = 0;
    // each node fixes some variables: (index, value)
    let mut stack: Vec<Vec<(usize, u8)>> = vec![Vec::new()];
    while let Some(fixed) = stack.pop() {
        nodes += 1;
        let mut lp = root.clone();
        let mut extra_rows = Vec::new();
        for &(k, v) in &fixed {
            if v == 0 {
                lp.upper[k] = 0.0;
            } else {
                let mut row = vec![0.0; nv];
                row[k] = 1.0;
                extra_rows.push(row);
            }
        }
        if !extra_rows.is_empty() {
            lp.b_eq.extend(std::iter::repeat_n(1.0, extra_rows.len()));
            lp.a_eq = lp.a_eq.vstack(&Matrix::from_rows(&extra_rows));
        }
        let sol = match solve_lp(&lp) {
            Ok(s) => s,
            Err(LpError::Infeasible) => continue,
            Err(e) => return Err(e),
        };
        if let Some((_, incumbent)) = &best {
            if sol.objective >= incumbent - 1e-9 {
                continue;
            }
        }
        match sol.x.iter().position(|&v| fractionality(v) > int_tol) {
            None => {
                let x: Vec<u8> = sol.x.iter().map(|v| v.round() as u8).collect();
                best = Some((x, sol.objective));
            }
            Some(k) => {
                let mut one = fixed.clone();
                one.push((k, 1));
                let mut zero = fixed;
                zero.push((k, 0));
                stack.push(one);
                stack.push(zero);
            }
        }
    }
    let (x, objective) = best.ok_or(LpError::Infeasible)?;
    Ok(BinarySolution {
        x,
        objective,
        relaxation,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min -x - 2y s.t. x + y = 1.5, 0 <= x, y <= 1
        let lp = LpProblem {
            c: vec![-1.0, -2.0],
            a_eq: Matrix::from_rows(&[[1.0, 1.0]]),
            b_eq: vec![1.5],
            upper: vec![1.0, 1.0],
        };
        let s = solve_lp(&lp).unwrap();
        assert!((s.x[0] - 0.5).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        assert!((s.objective + 2.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_lp() {
        let lp = LpProblem {
            c: vec![1.0, 1.0],
            a_eq: Matrix::from_rows(&[[1.0, 1.0]]),
            b_eq: vec![3.0],
            upper: vec![1.0, 1.0],
        };
        assert_eq!(solve_lp(&lp).unwrap_err(), LpError::Infeasible);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let lp = LpProblem {
            c: vec![1.0, 0.0, 1.0],
            a_eq: Matrix::from_rows(&[[1.0, -1.0, 0.0], [0.0, 1.0, -1.0], [-1.0, 0.0, 1.0]]),
            b_eq: vec![0.0, 0.0, 0.0],
            upper: vec![1.0; 3],
        };
        let s = solve_lp(&lp).unwrap();
        assert!(s.objective.abs() < 1e-12);
    }

    #[test]
    fn branch_and_bound_on_fractional_relaxation() {
        // min -(x0 + x1 + x2) s.t. 2x0 + 2x1 + 2x2 = 3 has no 0/1 point
        let a = Matrix::from_rows(&[[2.0, 2.0, 2.0]]);
        assert_eq!(
            solve_binary(&[-1.0; 3], &a, &[3.0], 1e-6).unwrap_err(),
            LpError::Infeasible
        );
        // x0 + x1 = 1 with 2x0 + 2x1 + 2x2 = 4: forces x2 = 1
        let a = Matrix::from_rows(&[[1.0, 1.0, 0.0], [2.0, 2.0, 2.0]]);
        let s = solve_binary(&[1.0, 2.0, 0.0], &a, &[1.0, 4.0], 1e-6).unwrap();
        assert_eq!(s.x, vec![1, 0, 1]);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn knapsack_needs_branching() {
        // min -5a - 4b - 3c s.t. 2a + 3b + c + s = 4 with slack s in [0, 1]
        let a = Matrix::from_rows(&[[2.0, 3.0, 1.0, 1.0]]);
        let s = solve_binary(&[-5.0, -4.0, -3.0, 0.0], &a, &[4.0], 1e-6).unwrap();
        assert_eq!(s.x[..3], [1, 0, 1]);
        assert!(s.nodes > 1);
        assert!(s.relaxation.x.iter().any(|&v| fractionality(v) > 1e-6));
    }
}
