//! Two-hop channel whose relay spends at most the energy it harvests from
//! the first hop plus its own supply `P2`:
//!
//! ```text
//! C(P1, P2) = max_{p(x1): E[c1(X1)] ≤ P1} min{ I(X1;Y1), C2(E[b(Y1)] + P2) }
//! ```
//!
//! where `C2(β)` is the capacity of the second hop under `E[c2(X2)] ≤ β`.

mod ba;
mod example;
mod oracle;

pub use ba::{awgn_capacity, dm_capacity_with_cost, BaRun, CostCapacity, BA_TOLERANCE};
pub use example::{
    mhc_example_capacity, mhc_example_sweep, snr_to_noise, ExampleSweepRow, SnrScale,
};
pub use oracle::cutset_joint_oracle;

use crate::channel::{AwgnSpec, CostFn, DmChannel, EnergyFn, Pmf};
use crate::error::{Error, Result};
use crate::info::mutual_information_raw;
use crate::simplex::{lattice, lattice_size, neighborhood};
use rayon::prelude::*;

const BUDGET_SLACK: f64 = 1e-9;
/// Largest coarse lattice the outer search will enumerate.
const MAX_COARSE: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SecondHop {
    Discrete {
        channel: DmChannel,
        cost: CostFn,
    },
    /// `Y2 = X2 + Z`, cost `x²`.
    Awgn(AwgnSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MhcProblem {
    hop1: DmChannel,
    c1: CostFn,
    b: EnergyFn,
    p1: f64,
    hop2: SecondHop,
    p2: f64,
}

impl MhcProblem {
    pub fn new(
        hop1: DmChannel,
        c1: CostFn,
        b: EnergyFn,
        p1: f64,
        hop2: SecondHop,
        p2: f64,
    ) -> Result<Self> {
        hop1.require_point_to_point()?;
        if c1.len() != hop1.input(0).len() {
            return Err(Error::AlphabetMismatch {
                expected: hop1.input(0).len(),
                found: c1.len(),
            });
        }
        if b.len() != hop1.output().len() {
            return Err(Error::AlphabetMismatch {
                expected: hop1.output().len(),
                found: b.len(),
            });
        }
        if let SecondHop::Discrete { channel, cost } = &hop2 {
            channel.require_point_to_point()?;
            if cost.len() != channel.input(0).len() {
                return Err(Error::AlphabetMismatch {
                    expected: channel.input(0).len(),
                    found: cost.len(),
                });
            }
        }
        for (what, v) in [("P1", p1), ("P2", p2)] {
            if v.is_nan() || v < 0.0 {
                return Err(Error::NegativeValue { what, value: v });
            }
        }
        Ok(Self {
            hop1,
            c1,
            b,
            p1,
            hop2,
            p2,
        })
    }

    pub fn hop1(&self) -> &DmChannel {
        &self.hop1
    }

    pub fn hop2(&self) -> &SecondHop {
        &self.hop2
    }

    pub fn cost1(&self) -> &CostFn {
        &self.c1
    }

    pub fn energy_fn(&self) -> &EnergyFn {
        &self.b
    }

    pub fn budgets(&self) -> (f64, f64) {
        (self.p1, self.p2)
    }

    /// Relay budget `E[b(Y1)] + P2` for a first-hop input pmf.
    pub fn relay_budget(&self, p1: &[f64]) -> f64 {
        let mut e = 0.0;
        for (x, &px) in p1.iter().enumerate() {
            e += px
                * self
                    .hop1
                    .row(x)
                    .iter()
                    .zip(self.b.values())
                    .map(|(w, b)| w * b)
                    .sum::<f64>();
        }
        e + self.p2
    }

    fn first_hop_cost(&self, p1: &[f64]) -> f64 {
        p1.iter().zip(self.c1.values()).map(|(a, b)| a * b).sum()
    }

    /// `C2(β)` and the input achieving it.
    pub fn second_hop_capacity(&self, budget: f64) -> Result<(f64, SecondHopInput)> {
        match &self.hop2 {
            SecondHop::Awgn(spec) => Ok((
                awgn_capacity(budget, spec.noise_var())?,
                SecondHopInput::GaussianPower(budget),
            )),
            SecondHop::Discrete { channel, cost } => {
                let cap = dm_capacity_with_cost(channel, cost, budget)?;
                Ok((cap.capacity, SecondHopInput::Pmf(cap.input)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SecondHopInput {
    Pmf(Pmf),
    GaussianPower(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MhcSolution {
    pub capacity: f64,
    pub input: Pmf,
    /// I(X1;Y1) under `input`.
    pub first_hop_rate: f64,
    /// `E[b(Y1)] + P2`.
    pub relay_budget: f64,
    pub second_hop_rate: f64,
    pub second_hop_input: SecondHopInput,
}

/// Outer lattice for the first-hop input search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhcGrid {
    pub divisions: usize,
    pub refine_factor: usize,
    pub refinements: usize,
}

impl Default for MhcGrid {
    fn default() -> Self {
        Self {
            divisions: 64,
            refine_factor: 8,
            refinements: 3,
        }
    }
}

/// Memo of `C2(β)` values, sorted by β. Since `C2` is non-decreasing its
/// neighbors bound any uncached value.
struct Hop2Cache {
    known: Vec<(f64, f64)>,
    ceiling: f64,
}

impl Hop2Cache {
    fn new(prob: &MhcProblem) -> Result<Self> {
        let ceiling = match &prob.hop2 {
            SecondHop::Awgn(_) => f64::INFINITY,
            SecondHop::Discrete { channel, cost } => {
                dm_capacity_with_cost(channel, cost, cost.max())?.capacity
            }
        };
        Ok(Self {
            known: Vec::new(),
            ceiling,
        })
    }

    fn bounds(&self, beta: f64) -> (f64, f64) {
        let at = self.known.partition_point(|&(b, _)| b < beta);
        let lower = if at < self.known.len() && self.known[at].0 == beta {
            return (self.known[at].1, self.known[at].1);
        } else if at > 0 {
            self.known[at - 1].1
        } else {
            0.0
        };
        let upper = self.known.get(at).map_or(self.ceiling, |&(_, c)| c);
        (lower, upper)
    }

    fn insert(&mut self, beta: f64, c: f64) {
        let at = self.known.partition_point(|&(b, _)| b < beta);
        self.known.insert(at, (beta, c));
    }
}

#[derive(Debug, Clone)]
struct Incumbent {
    value: f64,
    p1: Vec<f64>,
}

struct Scored {
    p1: Vec<f64>,
    info: f64,
    beta: f64,
}

/// Evaluates `min{I1, C2(β)}` over `cands`, visiting them by decreasing
/// `I1` and skipping any candidate whose bounds cannot beat the incumbent.
fn scan(
    prob: &MhcProblem,
    cands: Vec<Vec<f64>>,
    cache: &mut Hop2Cache,
    best: &mut Option<Incumbent>,
) -> Result<()> {
    let mut scored: Vec<Scored> = cands
        .into_par_iter()
        .filter(|p| prob.first_hop_cost(p) <= prob.p1 + BUDGET_SLACK)
        .map(|p1| Scored {
            info: mutual_information_raw(&p1, &prob.hop1),
            beta: prob.relay_budget(&p1),
            p1,
        })
        .collect();
    // stable: equal informations keep lattice order
    scored.sort_by(|a, b| b.info.total_cmp(&a.info));
    for s in scored {
        let floor = best.as_ref().map_or(f64::NEG_INFINITY, |b| b.value);
        if s.info <= floor {
            break;
        }
        let (lower, upper) = cache.bounds(s.beta);
        if upper.min(s.info) <= floor {
            continue;
        }
        let value = if lower >= s.info {
            s.info
        } else {
            let c2 = prob.second_hop_capacity(s.beta)?.0;
            cache.insert(s.beta, c2);
            s.info.min(c2)
        };
        if value > floor {
            *best = Some(Incumbent { value, p1: s.p1 });
        }
    }
    Ok(())
}

/// Nested solver: outer lattice search over `p(x1)` with local
/// refinement, inner cost-constrained capacity of the second hop.
///
/// The objective is concave in `p(x1)`, so refining around the coarse
/// incumbent does not miss a distant optimum.
pub fn mhc_capacity(prob: &MhcProblem, grid: &MhcGrid) -> Result<MhcSolution> {
    if grid.divisions == 0 || grid.refine_factor == 0 {
        return Err(Error::InvalidArgument(
            "grid resolution must be positive".into(),
        ));
    }
    let min_cost = prob.c1.min();
    if min_cost > prob.p1 + BUDGET_SLACK {
        return Err(Error::Infeasible(format!(
            "P1 = {} is below the cheapest first-hop symbol cost {min_cost}",
            prob.p1
        )));
    }
    let k = prob.hop1.input(0).len();
    let mut divisions = grid.divisions;
    while divisions > 1 && lattice_size(k, divisions) > MAX_COARSE {
        divisions /= 2;
    }
    let mut cache = Hop2Cache::new(prob)?;
    let mut best = None;
    scan(prob, lattice(k, divisions), &mut cache, &mut best)?;
    let mut pitch = 1.0 / divisions as f64;
    for _ in 0..grid.refinements {
        pitch /= grid.refine_factor as f64;
        let Some(center) = best.as_ref().map(|b: &Incumbent| b.p1.clone()) else {
            break;
        };
        scan(
            prob,
            neighborhood(&center, pitch, grid.refine_factor as i64),
            &mut cache,
            &mut best,
        )?;
    }
    // the cheapest point mass is always on the lattice and feasible
    let best = best.ok_or_else(|| Error::Infeasible("no first-hop input meets P1".into()))?;
    let first_hop_rate = mutual_information_raw(&best.p1, &prob.hop1);
    let relay_budget = prob.relay_budget(&best.p1);
    let (second_hop_rate, second_hop_input) = prob.second_hop_capacity(relay_budget)?;
    Ok(MhcSolution {
        capacity: first_hop_rate.min(second_hop_rate),
        input: Pmf::new(best.p1)?,
        first_hop_rate,
        relay_budget,
        second_hop_rate,
        second_hop_input,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::channel::Alphabet;
    use approx::assert_abs_diff_eq;

    pub(crate) fn levels() -> Alphabet {
        Alphabet::new(vec![-2.0, -1.0, 1.0, 2.0]).unwrap()
    }

    /// Noiseless 4-ary first hop with `c(x) = x²`.
    pub(crate) fn example_problem(b: EnergyFn, p1: f64, n0: f64, p2: f64) -> MhcProblem {
        let ch = DmChannel::deterministic(vec![levels()], levels(), |x| x[0]).unwrap();
        MhcProblem::new(
            ch,
            CostFn::squared(&levels()),
            b,
            p1,
            SecondHop::Awgn(AwgnSpec::new(n0).unwrap()),
            p2,
        )
        .unwrap()
    }

    fn constant_output_hop() -> SecondHop {
        let ch = DmChannel::new(
            vec![Alphabet::range(2).unwrap()],
            Alphabet::range(2).unwrap(),
            vec![vec![1.0, 0.0]; 2],
        )
        .unwrap();
        SecondHop::Discrete {
            channel: ch,
            cost: CostFn::zero(2),
        }
    }

    #[test]
    fn no_harvest_baseline() {
        let prob = example_problem(EnergyFn::zero(4), 4.0, 1.0, 8.0);
        let sol = mhc_capacity(&prob, &MhcGrid::default()).unwrap();
        assert_abs_diff_eq!(sol.capacity, 0.5 * 9f64.log2(), epsilon = 1e-6);
    }

    #[test]
    fn first_hop_bottleneck() {
        let big = Alphabet::range(64).unwrap();
        let hop2 = SecondHop::Discrete {
            channel: DmChannel::deterministic(vec![big.clone()], big, |x| x[0]).unwrap(),
            cost: CostFn::zero(64),
        };
        let ch = DmChannel::binary_symmetric(0.11).unwrap();
        let prob = MhcProblem::new(
            ch.clone(),
            CostFn::zero(2),
            EnergyFn::zero(2),
            1.0,
            hop2,
            0.0,
        )
        .unwrap();
        let sol = mhc_capacity(&prob, &MhcGrid::default()).unwrap();
        let hop1 = dm_capacity_with_cost(&ch, &CostFn::zero(2), 1.0)
            .unwrap()
            .capacity;
        assert_abs_diff_eq!(sol.capacity, hop1, epsilon = 1e-6);
    }

    #[test]
    fn dead_second_hop() {
        let ch = DmChannel::deterministic(vec![levels()], levels(), |x| x[0]).unwrap();
        let prob = MhcProblem::new(
            ch,
            CostFn::squared(&levels()),
            EnergyFn::squared(&levels()),
            4.0,
            constant_output_hop(),
            1.0,
        )
        .unwrap();
        assert_abs_diff_eq!(
            mhc_capacity(&prob, &MhcGrid::default()).unwrap().capacity,
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn returned_input_meets_budget() {
        let prob = example_problem(EnergyFn::squared(&levels()), 2.0, 1.0, 0.0);
        let sol = mhc_capacity(&prob, &MhcGrid::default()).unwrap();
        let cost: f64 = sol
            .input
            .expect(CostFn::squared(&levels()).values())
            .unwrap();
        assert!(cost <= 2.0 + 1e-9);
        assert!(sol.capacity >= 0.0);
        assert!(matches!(
            mhc_capacity(
                &example_problem(EnergyFn::zero(4), 0.5, 1.0, 0.0),
                &MhcGrid::default()
            ),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn more_resources_never_hurt() {
        let grid = MhcGrid::default();
        let cap = |b: EnergyFn, p1: f64, p2: f64| {
            mhc_capacity(&example_problem(b, p1, 2.0, p2), &grid)
                .unwrap()
                .capacity
        };
        let sq = || EnergyFn::squared(&levels());
        let mut last = 0.0;
        for p1 in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let c = cap(sq(), p1, 0.0);
            assert!(c >= last - 1e-9);
            last = c;
        }
        let mut last = 0.0;
        for p2 in [0.0, 0.5, 1.0, 4.0] {
            let c = cap(sq(), 2.0, p2);
            assert!(c >= last - 1e-9);
            last = c;
        }
        let half = EnergyFn::new(sq().values().iter().map(|v| v / 2.0).collect()).unwrap();
        assert!(cap(sq(), 2.0, 0.0) >= cap(half, 2.0, 0.0) - 1e-9);
    }

    #[test]
    fn sandwich_bounds() {
        let prob = example_problem(EnergyFn::squared(&levels()), 2.5, 1.0, 0.5);
        let sol = mhc_capacity(&prob, &MhcGrid::default()).unwrap();
        let hop1 = dm_capacity_with_cost(prob.hop1(), prob.cost1(), 2.5)
            .unwrap()
            .capacity;
        let hop2 = awgn_capacity(0.5 + 4.0, 1.0).unwrap();
        assert!(sol.capacity <= hop1 + 1e-9);
        assert!(sol.capacity <= hop2 + 1e-9);
    }
}
