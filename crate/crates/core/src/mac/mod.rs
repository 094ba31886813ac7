//! Capacity-energy region of the two-user discrete memoryless MAC.
//!
//! A rate-energy triple `(R1, R2, B)` is in the region when, for some
//! time-sharing policy with independent inputs given `Q`,
//!
//! ```text
//! R1 ≤ I(X1;Y|X2,Q)   R2 ≤ I(X2;Y|X1,Q)   R1 + R2 ≤ I(X1,X2;Y|Q)   B ≤ E[b(Y)]
//! ```
//!
//! with `E[c_k(X_k)] ≤ P_k`. Boundary points are traced by maximizing
//! `w1·R1 + w2·R2`; the weights pick a corner of the rate pentagon, which
//! makes the objective linear in `p(q)` once the per-q codebooks are fixed.

mod gaussian;
mod oracle;
mod search;

pub use gaussian::{
    gaussian_mac_sweep, gaussian_mac_timeshare, gaussian_unconstrained_sum_rate,
    GaussianMacSolution, GaussianSweepRow,
};
pub use oracle::brute_force_mac_oracle;

use crate::channel::{CostFn, DmChannel, EnergyFn};
use crate::error::{Error, Result};
use crate::info::{mac_mutual_informations, MacInformation, TimeSharingPolicy};
use rayon::prelude::*;

/// Largest time-sharing alphabet accepted by the solvers. The region never
/// needs more than four; five is allowed so that sufficiency can be checked.
pub const MAX_Q_SIZE: usize = 5;

/// Slack on constraint checks of returned points.
pub(crate) const CONSTRAINT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEnergyTriple {
    pub r1: f64,
    pub r2: f64,
    pub energy: f64,
}

impl RateEnergyTriple {
    pub fn sum_rate(&self) -> f64 {
        self.r1 + self.r2
    }

    /// Checks the region inequalities against the informations of a policy.
    pub fn is_supported_by(&self, info: &MacInformation) -> bool {
        let tol = 1e-9;
        self.r1 <= info.i1 + tol
            && self.r2 <= info.i2 + tol
            && self.r1 + self.r2 <= info.isum + tol
            && self.energy <= info.energy + tol
    }
}

/// Nonnegative objective weights `(w1, w2)`, not both zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    w1: f64,
    w2: f64,
}

impl Weights {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        if !(w1 >= 0.0 && w2 >= 0.0 && w1.is_finite() && w2.is_finite()) || w1 + w2 == 0.0 {
            return Err(Error::InvalidArgument(format!("weights ({w1}, {w2})")));
        }
        Ok(Self { w1, w2 })
    }

    pub fn sum_rate() -> Self {
        Self { w1: 1.0, w2: 1.0 }
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }

    /// Pentagon corner maximizing the weighted rate: the heavier user is
    /// decoded last and gets its conditional information.
    pub fn corner(&self, info: &MacInformation) -> (f64, f64) {
        if self.w1 >= self.w2 {
            let r1 = info.i1;
            (r1, (info.isum - r1).clamp(0.0, info.i2))
        } else {
            let r2 = info.i2;
            ((info.isum - r2).clamp(0.0, info.i1), r2)
        }
    }

    pub fn value(&self, info: &MacInformation) -> f64 {
        let (r1, r2) = self.corner(info);
        self.w1 * r1 + self.w2 * r2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacProblem {
    channel: DmChannel,
    c1: CostFn,
    c2: CostFn,
    b: EnergyFn,
    p1: f64,
    p2: f64,
    energy_target: Option<f64>,
}

impl MacProblem {
    /// Budgets may be `f64::INFINITY` for an unconstrained input. An
    /// `energy_target` of `None` disables the received energy constraint.
    pub fn new(
        channel: DmChannel,
        c1: CostFn,
        c2: CostFn,
        b: EnergyFn,
        p1: f64,
        p2: f64,
        energy_target: Option<f64>,
    ) -> Result<Self> {
        channel.require_mac()?;
        let aligned = |expected: usize, found: usize| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::AlphabetMismatch { expected, found })
            }
        };
        aligned(channel.input(0).len(), c1.len())?;
        aligned(channel.input(1).len(), c2.len())?;
        aligned(channel.output().len(), b.len())?;
        for (what, v) in [("P1", p1), ("P2", p2)] {
            if v.is_nan() || v < 0.0 {
                return Err(Error::NegativeValue { what, value: v });
            }
        }
        let prob = Self {
            channel,
            c1,
            c2,
            b,
            p1,
            p2,
            energy_target: None,
        };
        prob.with_energy_target(energy_target)
    }

    pub fn with_energy_target(mut self, target: Option<f64>) -> Result<Self> {
        if let Some(b) = target {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::NegativeValue {
                    what: "B",
                    value: b,
                });
            }
        }
        self.energy_target = target;
        Ok(self)
    }

    pub fn channel(&self) -> &DmChannel {
        &self.channel
    }

    pub fn costs(&self) -> (&CostFn, &CostFn) {
        (&self.c1, &self.c2)
    }

    pub fn energy_fn(&self) -> &EnergyFn {
        &self.b
    }

    pub fn budgets(&self) -> (f64, f64) {
        (self.p1, self.p2)
    }

    pub fn energy_target(&self) -> Option<f64> {
        self.energy_target
    }

    /// Largest E[b(Y)] reachable by any time-sharing policy within the cost
    /// budgets, or `None` when the budgets themselves cannot be met.
    ///
    /// The reachable (energy, cost, cost) set is the convex hull of the
    /// deterministic input pairs, so this is a small mixture program.
    pub fn max_energy(&self) -> Option<f64> {
        search::max_energy_support(self).map(|(e, _)| e)
    }
}

/// Grid resolution and restart schedule for the region solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    /// Coarse lattice pitch is `1 / divisions`.
    pub divisions: usize,
    /// Each refinement divides the pitch by this factor.
    pub refine_factor: usize,
    pub refinements: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            divisions: 64,
            refine_factor: 8,
            refinements: 2,
            restarts: 8,
            seed: 0x5eed,
        }
    }
}

/// Optimal policy for one weight vector together with its rate corner.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub triple: RateEnergyTriple,
    pub policy: TimeSharingPolicy,
    pub info: MacInformation,
    /// `w1·R1 + w2·R2`.
    pub objective: f64,
}

impl BoundaryPoint {
    pub(crate) fn from_policy(
        prob: &MacProblem,
        weights: Weights,
        policy: TimeSharingPolicy,
    ) -> Result<Self> {
        let info = mac_mutual_informations(&policy, &prob.channel, &prob.b)?;
        let (r1, r2) = weights.corner(&info);
        Ok(Self {
            triple: RateEnergyTriple {
                r1,
                r2,
                energy: info.energy,
            },
            objective: weights.value(&info),
            policy,
            info,
        })
    }
}

fn check_q_size(q_size: usize) -> Result<()> {
    if (1..=MAX_Q_SIZE).contains(&q_size) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time-sharing alphabet size {q_size} outside 1..={MAX_Q_SIZE}"
        )))
    }
}

/// Maximizes `w1·R1 + w2·R2` over time-sharing policies with `|Q| = q_size`
/// subject to the cost budgets and the energy target.
///
/// The search alternates over the per-q input pmfs on a simplex lattice,
/// re-solving the time-sharing weights exactly after every move, and
/// refines the lattice around the incumbent. Restarts run in parallel and
/// are merged by index. An unreachable energy target yields
/// [`Error::Infeasible`].
pub fn mac_boundary_point(
    prob: &MacProblem,
    weights: Weights,
    q_size: usize,
    grid: &SearchGrid,
) -> Result<BoundaryPoint> {
    check_q_size(q_size)?;
    if grid.divisions == 0 || grid.refine_factor == 0 {
        return Err(Error::InvalidArgument(
            "grid resolution must be positive".into(),
        ));
    }
    let policy = search::solve(prob, weights, q_size, grid)?;
    BoundaryPoint::from_policy(prob, weights, policy)
}

/// One row of a region sweep; `point` is `None` when the energy target is
/// unreachable.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub energy_target: f64,
    pub weights: Weights,
    pub point: Option<BoundaryPoint>,
}

/// Boundary points for every `(B, weights)` combination, B-major.
pub fn mac_region_sweep(
    prob: &MacProblem,
    b_grid: &[f64],
    weights: &[Weights],
    q_size: usize,
    grid: &SearchGrid,
) -> Result<Vec<RegionRow>> {
    check_q_size(q_size)?;
    if b_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "energy grid must be ascending".into(),
        ));
    }
    let jobs: Vec<(f64, Weights)> = b_grid
        .iter()
        .flat_map(|&b| weights.iter().map(move |&w| (b, w)))
        .collect();
    jobs.into_par_iter()
        .map(|(b, w)| {
            let instance = prob.clone().with_energy_target(Some(b))?;
            let point = match mac_boundary_point(&instance, w, q_size, grid) {
                Ok(p) => Some(p),
                Err(Error::Infeasible(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(RegionRow {
                energy_target: b,
                weights: w,
                point,
            })
        })
        .collect()
}
