use crate::error::{Error, Result};

/// Feasibility of `A x = b`, `x ≥ 0`, with dense row-major `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LpProblem {
    pub fn new(cols: usize) -> Self {
        Self { rows: 0, cols, a: Vec::new(), b: Vec::new() }
    }

    pub fn from_rows(rows: &[Vec<f64>], b: &[f64]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.len() != b.len() {
            return Err(Error::Dimension(format!("{} rows but {} right-hand sides", rows.len(), b.len())));
        }
        let mut p = Self::new(cols);
        for (row, &rhs) in rows.iter().zip(b) {
            p.push_row(row, rhs)?;
        }
        Ok(p)
    }

    /// Appends `row · x = rhs`.
    pub fn push_row(&mut self, row: &[f64], rhs: f64) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension(format!("row of length {} for {} variables", row.len(), self.cols)));
        }
        if !rhs.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("non-finite constraint entry".into()));
        }
        self.a.extend_from_slice(row);
        self.b.push(rhs);
        self.rows += 1;
        Ok(())
    }

    /// Appends `Σ coeff · x_j = rhs` for sparse `(j, coeff)` terms.
    pub fn push_sparse(&mut self, terms: &[(usize, f64)], rhs: f64) -> Result<()> {
        let mut row = vec![0.0; self.cols];
        for &(j, v) in terms {
            if j >= self.cols {
                return Err(Error::Dimension(format!("variable {j} out of range")));
            }
            row[j] += v;
        }
        self.push_row(&row, rhs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `max_i |(A x − b)_i|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        (0..self.rows)
            .map(|i| {
                let lhs: f64 = self.a[i * self.cols..(i + 1) * self.cols].iter().zip(x).map(|(a, v)| a * v).sum();
                (lhs - self.b[i]).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    Undecided,
}

impl FeasibilityStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Feasible => "feasible",
            Self::Infeasible => "infeasible",
            Self::Undecided => "undecided",
        }
    }
}

/// Outcome of a feasibility engine. For the LP, `residual` is the constraint
/// violation of the solution when feasible and the phase-one optimum otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCert<T> {
    pub status: FeasibilityStatus,
    pub solution: Option<T>,
    pub residual: f64,
    pub iterations: usize,
}

impl<T> FeasibilityCert<T> {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> FeasibilityCert<U> {
        FeasibilityCert {
            status: self.status,
            solution: self.solution.map(f),
            residual: self.residual,
            iterations: self.iterations,
        }
    }
}

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 1_000_000;

/// Phase-one simplex with Bland's rule: minimizes the sum of artificial
/// variables. Feasible iff the optimum is at most `tol`. Verdicts are subject
/// to floating-point rounding near the threshold.
pub fn lp_feasible(p: &LpProblem, tol: f64) -> Result<FeasibilityCert<Vec<f64>>> {
    let (m, n) = (p.rows, p.cols);
    if m == 0 {
        return Ok(FeasibilityCert {
            status: FeasibilityStatus::Feasible,
            solution: Some(vec![0.0; n]),
            residual: 0.0,
            iterations: 0,
        });
    }
    // Tableau columns: n originals, m artificials, rhs.
    let width = n + m + 1;
    let mut t = vec![0.0; m * width];
    for i in 0..m {
        let sign = if p.b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = sign * p.a[i * n + j];
        }
        t[i * width + n + i] = 1.0;
        t[i * width + n + m] = sign * p.b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-one objective; the last entry is −objective.
    let mut cost = vec![0.0; width];
    for i in 0..m {
        for j in 0..width {
            if !(n..n + m).contains(&j) {
                cost[j] -= t[i * width + j];
            }
        }
    }
    let mut iterations = 0;
    while let Some(enter) = (0..n + m).find(|&j| cost[j] < -PIVOT_EPS) {
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let coef = t[i * width + enter];
            if coef > PIVOT_EPS {
                let ratio = t[i * width + n + m] / coef;
                let take = match leave {
                    None => true,
                    Some(l) => ratio < best - PIVOT_EPS || (ratio <= best + PIVOT_EPS && basis[i] < basis[l]),
                };
                if take {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            return Err(Error::Internal("phase-one LP reported unbounded".into()));
        };
        pivot(&mut t, &mut cost, width, m, row, enter);
        basis[row] = enter;
        iterations += 1;
        if iterations > MAX_PIVOTS {
            return Err(Error::Internal("simplex pivot budget exhausted".into()));
        }
    }
    let optimum = -cost[n + m];
    if optimum > tol {
        return Ok(FeasibilityCert {
            status: FeasibilityStatus::Infeasible,
            solution: None,
            residual: optimum,
            iterations,
        });
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i * width + n + m].max(0.0);
        }
    }
    let residual = p.residual(&x);
    Ok(FeasibilityCert { status: FeasibilityStatus::Feasible, solution: Some(x), residual, iterations })
}

fn pivot(t: &mut [f64], cost: &mut [f64], width: usize, m: usize, row: usize, col: usize) {
    let inv = 1.0 / t[row * width + col];
    for j in 0..width {
        t[row * width + j] *= inv;
    }
    let pivot_row: Vec<f64> = t[row * width..(row + 1) * width].to_vec();
    for i in (0..m).filter(|&i| i != row) {
        let f = t[i * width + col];
        if f != 0.0 {
            for j in 0..width {
                t[i * width + j] -= f * pivot_row[j];
            }
        }
    }
    let f = cost[col];
    if f != 0.0 {
        for j in 0..width {
            cost[j] -= f * pivot_row[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_systems() {
        let p = LpProblem::from_rows(&[vec![1.0, 1.0]], &[1.0]).unwrap();
        let c = lp_feasible(&p, 1e-9).unwrap();
        assert!(c.is_feasible() && c.residual < 1e-12);
        let p = LpProblem::from_rows(&[vec![1.0]], &[-1.0]).unwrap();
        assert_eq!(lp_feasible(&p, 1e-9).unwrap().status, FeasibilityStatus::Infeasible);
    }

    #[test]
    fn redundant_and_degenerate_rows() {
        let p =
            LpProblem::from_rows(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 0.0, 1.0]], &[1.0, 2.0, 0.0])
                .unwrap();
        let c = lp_feasible(&p, 1e-9).unwrap();
        assert!(c.is_feasible());
        let p = LpProblem::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0]).unwrap();
        assert!(!lp_feasible(&p, 1e-9).unwrap().is_feasible());
    }

    #[test]
    fn shape_errors() {
        let mut p = LpProblem::new(2);
        assert!(p.push_row(&[1.0], 0.0).is_err());
        assert!(p.push_row(&[1.0, f64::NAN], 0.0).is_err());
    }
}
