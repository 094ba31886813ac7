//! Multi-start coordinate ascent over time-sharing policies.

use super::{MacProblem, SearchGrid, Weights, CONSTRAINT_SLACK};
use crate::channel::Pmf;
use crate::error::{Error, Result};
use crate::info::{slot_information, MacInformation, TimeSharingPolicy};
use crate::lp::{MixtureLp, MixtureSolution};
use crate::simplex::{lattice, neighborhood};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const IMPROVEMENT: f64 = 1e-12;
const MAX_SWEEPS: usize = 200;

/// One codebook pair and its linear contributions to the mixture program.
#[derive(Debug, Clone)]
struct Slot {
    p1: Vec<f64>,
    p2: Vec<f64>,
    value: f64,
    energy: f64,
    cost1: f64,
    cost2: f64,
}

/// What the ascent maximizes.
#[derive(Debug, Clone, Copy)]
enum Goal {
    Rate(Weights),
    /// Phase one: largest received energy within the cost budgets.
    Energy,
}

struct Searcher<'a> {
    prob: &'a MacProblem,
    goal: Goal,
}

impl<'a> Searcher<'a> {
    fn slot(&self, p1: Vec<f64>, p2: Vec<f64>) -> Slot {
        let (c1, c2) = self.prob.costs();
        let info: MacInformation = slot_information(
            &p1,
            &p2,
            self.prob.channel(),
            self.prob.energy_fn().values(),
        );
        let value = match self.goal {
            Goal::Rate(w) => w.value(&info),
            Goal::Energy => info.energy,
        };
        let dot = |p: &[f64], c: &[f64]| p.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
        Slot {
            cost1: dot(&p1, c1.values()),
            cost2: dot(&p2, c2.values()),
            p1,
            p2,
            value,
            energy: info.energy,
        }
    }

    fn mix(&self, slots: &[Slot]) -> Option<MixtureSolution> {
        let (p1, p2) = self.prob.budgets();
        let col = |f: fn(&Slot) -> f64| slots.iter().map(f).collect::<Vec<_>>();
        let mut lp = MixtureLp::new(col(|s| s.value))
            .at_most(col(|s| s.cost1), p1)
            .at_most(col(|s| s.cost2), p2);
        if let (Goal::Rate(_), Some(b)) = (self.goal, self.prob.energy_target()) {
            lp = lp.at_least(col(|s| s.energy), b);
        }
        lp.solve()
    }

    /// Coordinate ascent at the coarse lattice, then `refinements` local
    /// passes with the pitch divided by `refine_factor` each time.
    fn ascend(
        &self,
        mut slots: Vec<Slot>,
        grid: &SearchGrid,
    ) -> Option<(Vec<Slot>, MixtureSolution)> {
        let mut best = self.mix(&slots)?;
        let sizes = [
            self.prob.channel().input(0).len(),
            self.prob.channel().input(1).len(),
        ];
        let coarse = [
            lattice(sizes[0], grid.divisions),
            lattice(sizes[1], grid.divisions),
        ];
        let mut pitch = 1.0 / grid.divisions as f64;
        for stage in 0..=grid.refinements {
            if stage > 0 {
                pitch /= grid.refine_factor as f64;
            }
            for _ in 0..MAX_SWEEPS {
                let mut improved = false;
                for q in 0..slots.len() {
                    for user in 0..2 {
                        let current = if user == 0 {
                            slots[q].p1.clone()
                        } else {
                            slots[q].p2.clone()
                        };
                        let local;
                        let candidates = if stage == 0 {
                            &coarse[user]
                        } else {
                            local = neighborhood(&current, pitch, grid.refine_factor as i64);
                            &local
                        };
                        let mut trial = slots.clone();
                        for cand in candidates {
                            let (p1, p2) = if user == 0 {
                                (cand.clone(), slots[q].p2.clone())
                            } else {
                                (slots[q].p1.clone(), cand.clone())
                            };
                            trial[q] = self.slot(p1, p2);
                            if let Some(sol) = self.mix(&trial) {
                                if sol.value > best.value + IMPROVEMENT {
                                    best = sol;
                                    slots[q] = trial[q].clone();
                                    improved = true;
                                }
                            }
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
        }
        Some((slots, best))
    }
}

/// Largest reachable energy and the deterministic input pairs (with
/// weights) that reach it, or `None` if no policy meets the cost budgets.
pub(super) fn max_energy_support(prob: &MacProblem) -> Option<(f64, Vec<((usize, usize), f64)>)> {
    let ch = prob.channel();
    let (c1, c2) = prob.costs();
    let (p1, p2) = prob.budgets();
    let b = prob.energy_fn().values();
    let pairs: Vec<(usize, usize)> = (0..ch.input(0).len())
        .flat_map(|a| (0..ch.input(1).len()).map(move |c| (a, c)))
        .collect();
    let energy = pairs
        .iter()
        .map(|&(a, c)| ch.mac_row(a, c).iter().zip(b).map(|(p, e)| p * e).sum())
        .collect();
    let sol = MixtureLp::new(energy)
        .at_most(pairs.iter().map(|&(a, _)| c1.values()[a]).collect(), p1)
        .at_most(pairs.iter().map(|&(_, c)| c2.values()[c]).collect(), p2)
        .solve()?;
    let support = pairs
        .into_iter()
        .zip(sol.weights)
        .filter(|(_, w)| *w > 0.0)
        .collect();
    Some((sol.value, support))
}

fn point_mass(k: usize, at: usize) -> Vec<f64> {
    let mut p = vec![0.0; k];
    p[at] = 1.0;
    p
}

fn random_pmf(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // uniform on the simplex via normalized exponentials
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub(super) fn solve(
    prob: &MacProblem,
    weights: Weights,
    q_size: usize,
    grid: &SearchGrid,
) -> Result<TimeSharingPolicy> {
    let ch = prob.channel();
    let (n1, n2) = (ch.input(0).len(), ch.input(1).len());
    let (max_energy, support) = max_energy_support(prob).ok_or_else(|| {
        Error::Infeasible("cost budgets are below the cheapest input symbols".into())
    })?;
    if let Some(b) = prob.energy_target() {
        if b > max_energy + CONSTRAINT_SLACK {
            return Err(Error::Infeasible(format!(
                "energy target {b} exceeds the largest reachable E[b(Y)] = {max_energy}"
            )));
        }
    }

    let rate = Searcher {
        prob,
        goal: Goal::Rate(weights),
    };
    let start: Vec<Slot> = if support.len() <= q_size {
        let mut s: Vec<Slot> = support
            .iter()
            .map(|&((a, c), _)| rate.slot(point_mass(n1, a), point_mass(n2, c)))
            .collect();
        while s.len() < q_size {
            s.push(s[0].clone());
        }
        s
    } else {
        // The energy optimum needs more codebooks than allowed: climb on
        // energy alone from the cheapest inputs first.
        let (c1, c2) = prob.costs();
        let cheapest = |v: &[f64]| {
            (0..v.len())
                .min_by(|&i, &j| v[i].total_cmp(&v[j]))
                .expect("nonempty alphabet")
        };
        let energy = Searcher {
            prob,
            goal: Goal::Energy,
        };
        let seed = energy.slot(
            point_mass(n1, cheapest(c1.values())),
            point_mass(n2, cheapest(c2.values())),
        );
        let (slots, _) = energy
            .ascend(vec![seed; q_size], grid)
            .ok_or_else(|| Error::Infeasible("cost budgets cannot be met".into()))?;
        let slots: Vec<Slot> = slots.into_iter().map(|s| rate.slot(s.p1, s.p2)).collect();
        if rate.mix(&slots).is_none() {
            return Err(Error::Infeasible(format!(
                "energy target not reached with {q_size} time-sharing symbols"
            )));
        }
        slots
    };

    let results: Vec<Option<(Vec<Slot>, MixtureSolution)>> = (0..grid.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let slots = if r == 0 {
                start.clone()
            } else {
                perturbed_start(&rate, &start, grid.seed.wrapping_add(r as u64))
            };
            rate.ascend(slots, grid)
        })
        .collect();

    let mut best: Option<(Vec<Slot>, MixtureSolution)> = None;
    for res in results.into_iter().flatten() {
        if best
            .as_ref()
            .is_none_or(|b| res.1.value > b.1.value + IMPROVEMENT)
        {
            best = Some(res);
        }
    }
    let (slots, mix) = best.ok_or_else(|| Error::Infeasible("no feasible policy found".into()))?;
    let q_pmf = Pmf::new(mix.weights)?;
    let conditionals = slots
        .into_iter()
        .map(|s| Ok((Pmf::new(s.p1)?, Pmf::new(s.p2)?)))
        .collect::<Result<Vec<_>>>()?;
    TimeSharingPolicy::new(q_pmf, conditionals)
}

/// Blends random pmfs into a feasible start, backing off toward the start
/// until the mixture program is feasible again.
fn perturbed_start(s: &Searcher, start: &[Slot], seed: u64) -> Vec<Slot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<(Vec<f64>, Vec<f64>)> = start
        .iter()
        .map(|sl| {
            (
                random_pmf(sl.p1.len(), &mut rng),
                random_pmf(sl.p2.len(), &mut rng),
            )
        })
        .collect();
    let mut t = 1.0;
    for _ in 0..12 {
        let blend = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter()
                .zip(b)
                .map(|(x, y)| (1.0 - t) * x + t * y)
                .collect()
        };
        let slots: Vec<Slot> = start
            .iter()
            .zip(&noise)
            .map(|(sl, (r1, r2))| s.slot(blend(&sl.p1, r1), blend(&sl.p2, r2)))
            .collect();
        if s.mix(&slots).is_some() {
            return slots;
        }
        t *= 0.5;
    }
    start.to_vec()
}
