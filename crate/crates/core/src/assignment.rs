//! Forward auction for the square linear sum assignment problem.
//!
//! Costs are minimized by running the classic maximization auction on
//! benefits `-cost`. Every unassigned person bids for its best object,
//! raising that object's price by the gap to its second-best value plus
//! `epsilon`. With a fixed `epsilon` the result satisfies
//! epsilon-complementary slackness, so its cost is within `n * epsilon` of
//! optimal.

use std::collections::VecDeque;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AssignmentError {
    #[error("cost matrix must be square and non-empty (got {rows} rows of {cols:?})")]
    NotSquare { rows: usize, cols: Vec<usize> },
    #[error("costs must be finite and non-negative (entry ({row}, {col}) = {value})")]
    BadCost { row: usize, col: usize, value: f64 },
    #[error("epsilon must be positive, got {0}")]
    BadEpsilon(f64),
}

/// Square cost matrix, `cost(i, j)` = cost of giving object `j` to person `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProblem {
    n: usize,
    costs: Vec<f64>,
}

impl AssignmentProblem {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, AssignmentError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(AssignmentError::NotSquare {
                rows: n,
                cols: rows.iter().map(Vec::len).collect(),
            });
        }
        Self::from_flat(n, rows.concat())
    }

    /// Row-major `n * n` costs.
    pub fn from_flat(n: usize, costs: Vec<f64>) -> Result<Self, AssignmentError> {
        if n == 0 || costs.len() != n * n {
            return Err(AssignmentError::NotSquare {
                rows: n,
                cols: vec![costs.len()],
            });
        }
        if let Some(idx) = costs.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(AssignmentError::BadCost {
                row: idx / n,
                col: idx % n,
                value: costs[idx],
            });
        }
        Ok(Self { n, costs })
    }

    /// Distances from each current position to each target slot.
    pub fn from_distances(from: &[crate::Vec3], to: &[crate::Vec3]) -> Result<Self, AssignmentError> {
        let rows: Vec<Vec<f64>> = from
            .iter()
            .map(|p| to.iter().map(|q| (p - q).norm()).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.costs[i * self.n + j]
    }

    pub fn total_cost(&self, perm: &[usize]) -> f64 {
        perm.iter().enumerate().map(|(i, &j)| self.cost(i, j)).sum()
    }
}

/// `perm[i]` is the object (target slot) assigned to person (UAV) `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub total_cost: f64,
}

impl Assignment {
    pub fn identity(problem: &AssignmentProblem) -> Self {
        let perm: Vec<usize> = (0..problem.size()).collect();
        let total_cost = problem.total_cost(&perm);
        Self { perm, total_cost }
    }
}

pub fn auction_assign(problem: &AssignmentProblem, epsilon: f64) -> Result<Assignment, AssignmentError> {
    auction_assign_observed(problem, epsilon, |_, _, _| {})
}

/// Same as [`auction_assign`], reporting every price change as
/// `(object, old_price, new_price)`.
pub fn auction_assign_observed(
    problem: &AssignmentProblem,
    epsilon: f64,
    mut on_price: impl FnMut(usize, f64, f64),
) -> Result<Assignment, AssignmentError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(AssignmentError::BadEpsilon(epsilon));
    }
    let n = problem.size();
    let mut prices = vec![0.0f64; n];
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut queue: VecDeque<usize> = (0..n).collect();

    while let Some(person) = queue.pop_front() {
        // Best and second-best net value; lowest object index wins ties.
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        let mut second = f64::NEG_INFINITY;
        for obj in 0..n {
            let value = -problem.cost(person, obj) - prices[obj];
            if value > best.1 {
                second = best.1;
                best = (obj, value);
            } else if value > second {
                second = value;
            }
        }
        let (obj, value) = best;
        let increment = if second.is_finite() { value - second + epsilon } else { epsilon };
        let old = prices[obj];
        prices[obj] = old + increment;
        on_price(obj, old, prices[obj]);

        if let Some(prev) = owner[obj].replace(person) {
            assigned[prev] = None;
            queue.push_back(prev);
        }
        assigned[person] = Some(obj);
    }

    let perm: Vec<usize> = assigned.into_iter().map(|a| a.expect("auction leaves nobody unassigned")).collect();
    let total_cost = problem.total_cost(&perm);
    Ok(Assignment { perm, total_cost })
}

/// Necessary optimality check: no pairwise swap lowers the total by more than
/// `2 * epsilon`.
pub fn swap_improvement_check(problem: &AssignmentProblem, assignment: &Assignment, epsilon: f64) -> bool {
    let p = &assignment.perm;
    let n = problem.size();
    for i in 0..n {
        for j in i + 1..n {
            let now = problem.cost(i, p[i]) + problem.cost(j, p[j]);
            let swapped = problem.cost(i, p[j]) + problem.cost(j, p[i]);
            if now - swapped > 2.0 * epsilon {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix_gives_identity() {
        let p = AssignmentProblem::from_rows(&[vec![0.0, 9.0, 9.0], vec![9.0, 0.0, 9.0], vec![9.0, 9.0, 0.0]]).unwrap();
        let a = auction_assign(&p, 1e-6).unwrap();
        assert_eq!(a.perm, vec![0, 1, 2]);
        assert_eq!(a.total_cost, 0.0);
    }

    #[test]
    fn singleton() {
        let p = AssignmentProblem::from_rows(&[vec![4.2]]).unwrap();
        let a = auction_assign(&p, 1e-6).unwrap();
        assert_eq!(a.perm, vec![0]);
        assert_eq!(a.total_cost, 4.2);
    }

    #[test]
    fn crossing_paths_are_uncrossed() {
        // Two UAVs whose identity assignment would cross.
        let from = [crate::Vec3::new(0.0, 0.0, 0.0), crate::Vec3::new(0.0, 1.0, 0.0)];
        let to = [crate::Vec3::new(1.0, 1.0, 0.0), crate::Vec3::new(1.0, 0.0, 0.0)];
        let p = AssignmentProblem::from_distances(&from, &to).unwrap();
        assert_eq!(auction_assign(&p, 1e-6).unwrap().perm, vec![1, 0]);
    }

    #[test]
    fn ties_resolve_deterministically() {
        let p = AssignmentProblem::from_rows(&[vec![1.0; 4], vec![1.0; 4], vec![1.0; 4], vec![1.0; 4]]).unwrap();
        let a = auction_assign(&p, 1e-3).unwrap();
        let b = auction_assign(&p, 1e-3).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
    }

    #[test]
    fn prices_never_decrease() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 5) as f64 + 0.1 * j as f64).collect())
            .collect();
        let p = AssignmentProblem::from_rows(&rows).unwrap();
        let mut ok = true;
        auction_assign_observed(&p, 1e-4, |_, old, new| ok &= new >= old).unwrap();
        assert!(ok);
    }

    #[test]
    fn swap_check_detects_constructed_violation() {
        let p = AssignmentProblem::from_rows(&[vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
        let good = auction_assign(&p, 1e-6).unwrap();
        assert!(swap_improvement_check(&p, &good, 1e-6));
        let bad = Assignment {
            perm: vec![1, 0],
            total_cost: 10.0,
        };
        assert!(!swap_improvement_check(&p, &bad, 1e-6));
    }

    #[test]
    fn input_validation() {
        assert!(AssignmentProblem::from_rows(&[]).is_err());
        assert!(AssignmentProblem::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(AssignmentProblem::from_rows(&[vec![-1.0]]).is_err());
        assert!(AssignmentProblem::from_rows(&[vec![f64::NAN]]).is_err());
        let p = AssignmentProblem::from_rows(&[vec![1.0]]).unwrap();
        assert!(auction_assign(&p, 0.0).is_err());
    }
}
