//! Gaussian MAC `Y = X1 + X2 + Z`, `Z ~ N(0, 1)`, with `c(x) = x²` and
//! `b(y) = y²`.
//!
//! The two-phase strategy uses Gaussian codebooks of power `P'` with
//! probability `λ` and the coherent constants `X1 = X2 = √P''` otherwise:
//!
//! ```text
//! maximize (λ/2) log₂(1 + 2P')
//! s.t.     λP' + (1 − λ)P'' ≤ P,   B ≤ 2λP' + 4(1 − λ)P'' + 1
//! ```

use crate::error::{Error, Result};
use rayon::prelude::*;

/// Ties closer than this are broken toward the smaller `(λ, P')`.
const TIE: f64 = 1e-6;
const DIVISIONS: usize = 64;
const REFINE: usize = 8;
const REFINEMENTS: usize = 2;

/// ½ log₂(1 + 2P): both users Gaussian with full power, no time sharing.
pub fn gaussian_unconstrained_sum_rate(p: f64) -> Result<f64> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::NegativeValue {
            what: "P",
            value: p,
        });
    }
    Ok(0.5 * (1.0 + 2.0 * p).log2())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMacSolution {
    pub sum_rate: f64,
    /// Fraction of time spent in the information phase.
    pub lambda: f64,
    /// Per-user power of the Gaussian codebooks.
    pub p_info: f64,
    /// Per-user power of the constant energy-phase signal.
    pub p_energy: f64,
}

impl GaussianMacSolution {
    pub fn average_power(&self) -> f64 {
        self.lambda * self.p_info + (1.0 - self.lambda) * self.p_energy
    }

    /// E[Y²] under the strategy.
    pub fn received_energy(&self) -> f64 {
        2.0 * self.lambda * self.p_info + 4.0 * (1.0 - self.lambda) * self.p_energy + 1.0
    }
}

/// Candidate point of the `(λ, φ)` search, where `φ` is the share of the
/// power budget spent in the information phase (`λP' = φP`).
#[derive(Debug, Clone, Copy)]
struct Trial {
    rate: f64,
    lambda: f64,
    phi: f64,
}

fn rate(lambda: f64, phi: f64, p: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        0.5 * lambda * (1.0 + 2.0 * phi * p / lambda).log2()
    }
}

/// Best two-phase strategy for budget `P` and energy target `B`.
///
/// Below `B = 2P + 1` the plain Gaussian codebooks already deliver enough
/// energy and `λ = 1`. Above it the energy phase exhausts the remaining
/// budget, `P'' = (P − λP')/(1 − λ)`, and `(λ, P')` is found on a
/// coarse-to-fine grid. Targets above `4P + 1` are infeasible.
pub fn gaussian_mac_timeshare(p: f64, b: f64) -> Result<GaussianMacSolution> {
    let full = gaussian_unconstrained_sum_rate(p)?;
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::NegativeValue {
            what: "B",
            value: b,
        });
    }
    if b <= 2.0 * p + 1.0 {
        return Ok(GaussianMacSolution {
            sum_rate: full,
            lambda: 1.0,
            p_info: p,
            p_energy: 0.0,
        });
    }
    if b > 4.0 * p + 1.0 {
        return Err(Error::Infeasible(format!(
            "energy target {b} exceeds 4P + 1 = {}",
            4.0 * p + 1.0
        )));
    }
    // With the budget exhausted, E[Y²] = 4P + 1 − 2φP.
    let phi_max = ((4.0 * p + 1.0 - b) / (2.0 * p)).min(1.0);

    let mut pitch = 1.0 / DIVISIONS as f64;
    let mut lambdas: Vec<f64> = (0..DIVISIONS).map(|i| i as f64 * pitch).collect();
    let mut phis: Vec<f64> = (0..=DIVISIONS).map(|i| i as f64 * pitch).collect();
    let mut best = best_trial(&lambdas, &phis, phi_max, p);
    for _ in 0..REFINEMENTS {
        let fine = pitch / REFINE as f64;
        let reach = REFINE as i64;
        let around = |center: f64, hi_open: bool| -> Vec<f64> {
            (-reach..=reach)
                .map(|k| center + k as f64 * fine)
                .filter(|&v| v >= 0.0 && if hi_open { v < 1.0 } else { v <= 1.0 })
                .collect()
        };
        lambdas = around(best.lambda, true);
        phis = around(best.phi, false);
        best = best_trial(&lambdas, &phis, phi_max, p);
        pitch = fine;
    }
    let p_info = if best.lambda > 0.0 {
        best.phi * p / best.lambda
    } else {
        0.0
    };
    Ok(GaussianMacSolution {
        sum_rate: best.rate,
        lambda: best.lambda,
        p_info,
        p_energy: (1.0 - best.phi) * p / (1.0 - best.lambda),
    })
}

/// Scans the grid, adding for every `λ` the point where the energy
/// constraint is tight, and applies the tie rule.
fn best_trial(lambdas: &[f64], phis: &[f64], phi_max: f64, p: f64) -> Trial {
    let mut trials = Vec::new();
    for &lambda in lambdas {
        for &phi in phis.iter().chain(std::iter::once(&phi_max)) {
            if phi <= phi_max {
                trials.push(Trial {
                    rate: rate(lambda, phi, p),
                    lambda,
                    phi,
                });
            }
        }
    }
    let top = trials
        .iter()
        .map(|t| t.rate)
        .fold(f64::NEG_INFINITY, f64::max);
    trials
        .into_iter()
        .filter(|t| t.rate >= top - TIE)
        .min_by(|a, b| {
            a.lambda.total_cmp(&b.lambda).then(
                (a.phi / a.lambda.max(f64::MIN_POSITIVE))
                    .total_cmp(&(b.phi / b.lambda.max(f64::MIN_POSITIVE))),
            )
        })
        .expect("φ = 0 is always feasible")
}

/// One `(P, B)` point of the sum-rate versus energy-target curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSweepRow {
    pub p: f64,
    pub b: f64,
    /// `None` when `B > 4P + 1`.
    pub timeshare: Option<GaussianMacSolution>,
    /// ½ log₂(1 + 2P) when feasible without time sharing, else 0.
    pub r_no_timeshare: f64,
    /// Whether `B ≤ 2P + 1`, i.e. the strategy without time sharing meets
    /// the energy target.
    pub no_timeshare_feasible: bool,
}

/// Rows for every `P` in `p_list` and `B` in `b_grid`, P-major.
pub fn gaussian_mac_sweep(p_list: &[f64], b_grid: &[f64]) -> Result<Vec<GaussianSweepRow>> {
    let jobs: Vec<(f64, f64)> = p_list
        .iter()
        .flat_map(|&p| b_grid.iter().map(move |&b| (p, b)))
        .collect();
    jobs.into_par_iter()
        .map(|(p, b)| {
            let timeshare = match gaussian_mac_timeshare(p, b) {
                Ok(s) => Some(s),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            let feasible = b <= 2.0 * p + 1.0;
            Ok(GaussianSweepRow {
                p,
                b,
                timeshare,
                r_no_timeshare: if feasible {
                    gaussian_unconstrained_sum_rate(p)?
                } else {
                    0.0
                },
                no_timeshare_feasible: feasible,
            })
        })
        .collect()
}
