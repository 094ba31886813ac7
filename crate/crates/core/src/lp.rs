//! Small mixture linear programs solved by enumerating basic solutions.
//!
//! The program is
//!
//! ```text
//! maximize   Σ_j w_j · obj_j
//! subject to w ≥ 0,  Σ_j w_j = 1,  Σ_j w_j · a_ij ≤ h_i  for every row i
//! ```
//!
//! An optimal vertex has at most `rows + 1` nonzero weights, so it is found
//! by solving every square system built from a support set and an equally
//! sized set of active rows. This is exact and cheap for the handful of
//! columns and rows that appear in the time-sharing searches.

const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct MixtureLp {
    pub objective: Vec<f64>,
    /// (coefficients per column, bound)
    pub rows: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MixtureSolution {
    pub value: f64,
    pub weights: Vec<f64>,
}

impl MixtureLp {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
        }
    }

    /// Adds `Σ w_j a_j ≤ bound`; infinite bounds are skipped.
    pub fn at_most(mut self, coeffs: Vec<f64>, bound: f64) -> Self {
        if bound.is_finite() {
            self.rows.push((coeffs, bound));
        }
        self
    }

    /// Adds `Σ w_j a_j ≥ bound`.
    pub fn at_least(self, coeffs: Vec<f64>, bound: f64) -> Self {
        let neg = coeffs.into_iter().map(|a| -a).collect();
        self.at_most(neg, -bound)
    }

    fn feasible(&self, w: &[f64]) -> bool {
        self.rows.iter().all(|(a, h)| {
            let lhs: f64 = a.iter().zip(w).map(|(x, y)| x * y).sum();
            lhs <= h + FEAS_TOL * (1.0 + h.abs())
        })
    }

    /// Best vertex, or `None` when no mixture satisfies the rows. Among
    /// vertices with equal value the first one enumerated wins.
    pub fn solve(&self) -> Option<MixtureSolution> {
        let n = self.objective.len();
        let m = self.rows.len();
        let mut best: Option<MixtureSolution> = None;
        let mut support = Vec::new();
        let mut active = Vec::new();
        for size in 1..=n.min(m + 1) {
            for_each_subset(n, size, &mut support, &mut |support| {
                for_each_subset(m, size - 1, &mut active, &mut |active| {
                    let Some(ws) = self.solve_basis(support, active) else {
                        return;
                    };
                    let mut w = vec![0.0; n];
                    for (&j, &v) in support.iter().zip(&ws) {
                        w[j] = v;
                    }
                    if !self.feasible(&w) {
                        return;
                    }
                    let value: f64 = w.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
                    if best.as_ref().is_none_or(|b| value > b.value + 1e-13) {
                        best = Some(MixtureSolution { value, weights: w });
                    }
                });
            });
        }
        best
    }

    fn solve_basis(&self, support: &[usize], active: &[usize]) -> Option<Vec<f64>> {
        let s = support.len();
        let mut a = vec![vec![0.0; s + 1]; s];
        for (c, &j) in support.iter().enumerate() {
            a[0][c] = 1.0;
            for (r, &i) in active.iter().enumerate() {
                a[r + 1][c] = self.rows[i].0[j];
            }
        }
        a[0][s] = 1.0;
        for (r, &i) in active.iter().enumerate() {
            a[r + 1][s] = self.rows[i].1;
        }
        let w = gauss_solve(a)?;
        if w.iter().any(|&x| x < -FEAS_TOL) {
            return None;
        }
        let w: Vec<f64> = w.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = w.iter().sum();
        (total > 0.0).then(|| w.into_iter().map(|x| x / total).collect())
    }
}

/// Solves the augmented square system in place with partial pivoting.
fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        let scale = a.iter().map(|r| r[col].abs()).fold(0.0, f64::max).max(1.0);
        if a[pivot][col].abs() < PIVOT_TOL * scale {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

fn for_each_subset(n: usize, size: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn rec(
        start: usize,
        n: usize,
        size: usize,
        buf: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if buf.len() == size {
            f(buf);
            return;
        }
        for i in start..n {
            if n - i < size - buf.len() {
                break;
            }
            buf.push(i);
            rec(i + 1, n, size, buf, f);
            buf.pop();
        }
    }
    buf.clear();
    rec(0, n, size, buf, f);
}
