//! Cost-constrained channel capacity by Blahut-Arimoto with a Lagrange
//! multiplier on `E[c(X)]`.

use crate::channel::{CostFn, DmChannel, Pmf};
use crate::error::{Error, Result};
use crate::info::mutual_information_raw;

/// Successive objective iterates closer than this end a run.
pub const BA_TOLERANCE: f64 = 1e-7;
const MAX_ITERATIONS: usize = 100_000;
const BISECTION_STEPS: usize = 32;
const MAX_DOUBLINGS: usize = 64;
const BUDGET_SLACK: f64 = 1e-12;

/// Objective iterates `I(p_k) − s·E[c]` of one run at multiplier `s`.
/// For `s = 0` these are the capacity iterates themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct BaRun {
    pub multiplier: f64,
    pub objective: Vec<f64>,
}

impl BaRun {
    /// Largest drop between consecutive iterates (0 for a monotone run).
    pub fn worst_decrease(&self) -> f64 {
        self.objective
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostCapacity {
    pub capacity: f64,
    pub input: Pmf,
    /// `E[c(X)]` under `input`.
    pub cost: f64,
    /// Every Blahut-Arimoto run performed, in order.
    pub runs: Vec<BaRun>,
}

struct RunResult {
    p: Vec<f64>,
    info: f64,
    cost: f64,
}

/// Plain Blahut-Arimoto iteration for the Lagrangian `I − s·E[c]`.
/// Symbols with zero starting mass stay at zero.
fn blahut_arimoto(
    ch: &DmChannel,
    c: &[f64],
    s: f64,
    mut p: Vec<f64>,
    runs: &mut Vec<BaRun>,
) -> RunResult {
    let ny = ch.output().len();
    let mut trace = Vec::new();
    let mut div = vec![0.0; p.len()];
    let mut q = vec![0.0; ny];
    loop {
        q.iter_mut().for_each(|v| *v = 0.0);
        for (x, &px) in p.iter().enumerate() {
            for (qy, w) in q.iter_mut().zip(ch.row(x)) {
                *qy += px * w;
            }
        }
        for (x, d) in div.iter_mut().enumerate() {
            if p[x] == 0.0 {
                *d = 0.0;
                continue;
            }
            *d = ch
                .row(x)
                .iter()
                .zip(&q)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &qy)| w * (w / qy).log2())
                .sum();
        }
        let info: f64 = p.iter().zip(&div).map(|(a, b)| a * b).sum();
        let cost: f64 = p.iter().zip(c).map(|(a, b)| a * b).sum();
        let objective = info - s * cost;
        let done = trace
            .last()
            .is_some_and(|&prev: &f64| (objective - prev).abs() < BA_TOLERANCE)
            || trace.len() >= MAX_ITERATIONS;
        trace.push(objective);
        if done {
            runs.push(BaRun {
                multiplier: s,
                objective: trace,
            });
            return RunResult {
                info: info.max(0.0),
                cost,
                p,
            };
        }
        // p(x) ← p(x)·2^{D(x) − s·c(x)}, shifted for range safety
        let shift = p
            .iter()
            .zip(div.iter().zip(c))
            .filter(|(&px, _)| px > 0.0)
            .map(|(_, (d, cx))| d - s * cx)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (px, (d, cx)) in p.iter_mut().zip(div.iter().zip(c)) {
            if *px > 0.0 {
                *px *= (d - s * cx - shift).exp2();
                total += *px;
            }
        }
        p.iter_mut().for_each(|v| *v /= total);
    }
}

/// Capacity of a point-to-point channel under `E[c(X)] ≤ budget`.
///
/// The multiplier is bisected so that the cost constraint is active,
/// unless the unconstrained optimum already fits the budget. The returned
/// pmf always satisfies the budget. A budget equal to the cheapest symbol
/// cost restricts the input to the cheapest symbols.
pub fn dm_capacity_with_cost(ch: &DmChannel, c: &CostFn, budget: f64) -> Result<CostCapacity> {
    ch.require_point_to_point()?;
    let k = ch.input(0).len();
    if c.len() != k {
        return Err(Error::AlphabetMismatch {
            expected: k,
            found: c.len(),
        });
    }
    if budget.is_nan() || budget < 0.0 {
        return Err(Error::NegativeValue {
            what: "cost budget",
            value: budget,
        });
    }
    let cv = c.values();
    let slack = BUDGET_SLACK * (1.0 + budget.abs().min(1e12));
    let min_cost = c.min();
    if budget < min_cost - slack {
        return Err(Error::Infeasible(format!(
            "budget {budget} is below the cheapest symbol cost {min_cost}"
        )));
    }
    let mut runs = Vec::new();
    let finish = |r: RunResult, runs: Vec<BaRun>| -> Result<CostCapacity> {
        Ok(CostCapacity {
            capacity: r.info,
            input: Pmf::new(r.p)?,
            cost: r.cost,
            runs,
        })
    };

    let uniform = vec![1.0 / k as f64; k];
    let free = blahut_arimoto(ch, cv, 0.0, uniform.clone(), &mut runs);
    if free.cost <= budget + slack {
        return finish(free, runs);
    }
    if budget <= min_cost + slack {
        let cheapest: Vec<f64> = cv
            .iter()
            .map(|&x| if x <= min_cost { 1.0 } else { 0.0 })
            .collect();
        let n: f64 = cheapest.iter().sum();
        let start = cheapest.into_iter().map(|v| v / n).collect();
        let r = blahut_arimoto(ch, cv, 0.0, start, &mut runs);
        return finish(r, runs);
    }

    // cost at multiplier s is non-increasing in s
    let mut lo = (0.0, free);
    let mut s_hi = 1.0;
    let mut hi = blahut_arimoto(ch, cv, s_hi, uniform.clone(), &mut runs);
    let mut doublings = 0;
    while hi.cost > budget + slack {
        lo = (s_hi, hi);
        s_hi *= 2.0;
        hi = blahut_arimoto(ch, cv, s_hi, uniform.clone(), &mut runs);
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::Infeasible(format!(
                "multiplier search did not reach budget {budget}"
            )));
        }
    }
    let mut hi = (s_hi, hi);
    for _ in 0..BISECTION_STEPS {
        let s = 0.5 * (lo.0 + hi.0);
        let r = blahut_arimoto(ch, cv, s, uniform.clone(), &mut runs);
        if r.cost > budget + slack {
            lo = (s, r);
        } else {
            hi = (s, r);
        }
    }
    // Mixing the two sides so the budget is met with equality can only
    // help, since I is concave in p.
    let (lo, hi) = (lo.1, hi.1);
    let theta = ((budget - hi.cost) / (lo.cost - hi.cost)).clamp(0.0, 1.0);
    let mixed: Vec<f64> =
        lo.p.iter()
            .zip(&hi.p)
            .map(|(a, b)| theta * a + (1.0 - theta) * b)
            .collect();
    let mixed_cost: f64 = mixed.iter().zip(cv).map(|(a, b)| a * b).sum();
    let mixed_info = mutual_information_raw(&mixed, ch);
    if mixed_cost <= budget + slack && mixed_info > hi.info {
        return finish(
            RunResult {
                p: mixed,
                info: mixed_info,
                cost: mixed_cost,
            },
            runs,
        );
    }
    finish(hi, runs)
}

/// ½ log₂(1 + power/N0).
pub fn awgn_capacity(power: f64, n0: f64) -> Result<f64> {
    if !(n0 > 0.0) {
        return Err(Error::InvalidChannel(format!(
            "noise variance {n0} must be positive"
        )));
    }
    if power.is_nan() || power < 0.0 {
        return Err(Error::NegativeValue {
            what: "power",
            value: power,
        });
    }
    Ok(0.5 * (1.0 + power / n0).log2())
}
