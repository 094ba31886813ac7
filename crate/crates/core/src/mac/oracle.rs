//! Exhaustive reference solver for small MAC instances.
//!
//! Every per-q codebook pair is drawn from the full simplex lattice with
//! `steps` points per dimension. When `|Q|` exceeds the number of active
//! linear constraints, any mixture of lattice pairs is reachable with `|Q|`
//! symbols, so the time-sharing weights are found by a general LP over all
//! pairs. Otherwise every `|Q|`-subset of pairs is enumerated with weights
//! on the same lattice.

use super::{BoundaryPoint, MacProblem, Weights, MAX_Q_SIZE};
use crate::channel::Pmf;
use crate::error::{Error, Result};
use crate::info::{slot_information, TimeSharingPolicy};
use crate::simplex::{lattice, lattice_size};
use microlp::{ComparisonOp, OptimizationDirection, Problem};

const MAX_ALPHABET: usize = 3;
const MAX_STEPS: usize = 21;
const MAX_ENUMERATION: u128 = 50_000_000;

struct Candidate {
    p1: Vec<f64>,
    p2: Vec<f64>,
    value: f64,
    energy: f64,
    cost1: f64,
    cost2: f64,
}

/// Best weighted-rate point over lattice policies with `|Q| = q_size`.
pub fn brute_force_mac_oracle(
    prob: &MacProblem,
    weights: Weights,
    q_size: usize,
    steps: usize,
) -> Result<BoundaryPoint> {
    let ch = prob.channel();
    if ch.input(0).len() > MAX_ALPHABET || ch.input(1).len() > MAX_ALPHABET {
        return Err(Error::SizeGuard(format!(
            "oracle accepts input alphabets of at most {MAX_ALPHABET} symbols"
        )));
    }
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(Error::SizeGuard(format!(
            "steps must be in 2..={MAX_STEPS}"
        )));
    }
    if !(1..=MAX_Q_SIZE).contains(&q_size) {
        return Err(Error::InvalidArgument(format!("q_size {q_size}")));
    }

    let (c1, c2) = prob.costs();
    let (budget1, budget2) = prob.budgets();
    let b = prob.energy_fn().values();
    let dot = |p: &[f64], c: &[f64]| p.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
    let grid1 = lattice(ch.input(0).len(), steps - 1);
    let grid2 = lattice(ch.input(1).len(), steps - 1);
    let mut cands = Vec::with_capacity(grid1.len() * grid2.len());
    for p1 in &grid1 {
        for p2 in &grid2 {
            let info = slot_information(p1, p2, ch, b);
            cands.push(Candidate {
                p1: p1.clone(),
                p2: p2.clone(),
                value: weights.value(&info),
                energy: info.energy,
                cost1: dot(p1, c1.values()),
                cost2: dot(p2, c2.values()),
            });
        }
    }

    let target = prob.energy_target();
    let active = [target.is_some(), budget1.is_finite(), budget2.is_finite()]
        .iter()
        .filter(|&&a| a)
        .count();
    let chosen = if q_size > active {
        mix_by_lp(&cands, target, budget1, budget2)?
    } else {
        mix_by_enumeration(&cands, q_size, steps, target, budget1, budget2)?
    };
    let chosen = chosen
        .ok_or_else(|| Error::Infeasible("no lattice policy meets the constraints".into()))?;

    let mut probs: Vec<f64> = chosen.iter().map(|(_, w)| *w).collect();
    let mut conditionals: Vec<(Pmf, Pmf)> = chosen
        .iter()
        .map(|(j, _)| {
            Ok((
                Pmf::new(cands[*j].p1.clone())?,
                Pmf::new(cands[*j].p2.clone())?,
            ))
        })
        .collect::<Result<_>>()?;
    // pad unused symbols of Q with zero mass
    while probs.len() < q_size {
        probs.push(0.0);
        conditionals.push(conditionals[0].clone());
    }
    let policy = TimeSharingPolicy::new(Pmf::new(probs)?, conditionals)?;
    BoundaryPoint::from_policy(prob, weights, policy)
}

fn satisfies(c: &Candidate, target: Option<f64>, p1: f64, p2: f64) -> bool {
    let tol = 1e-9;
    target.is_none_or(|b| c.energy >= b - tol) && c.cost1 <= p1 + tol && c.cost2 <= p2 + tol
}

type Mixture = Option<Vec<(usize, f64)>>;

fn mix_by_lp(cands: &[Candidate], target: Option<f64>, p1: f64, p2: f64) -> Result<Mixture> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = cands
        .iter()
        .map(|c| lp.add_var(c.value, (0.0, 1.0)))
        .collect();
    let row = |f: &dyn Fn(&Candidate) -> f64| -> Vec<_> {
        vars.iter().zip(cands).map(|(&v, c)| (v, f(c))).collect()
    };
    lp.add_constraint(row(&|_| 1.0).as_slice(), ComparisonOp::Eq, 1.0);
    if let Some(b) = target {
        lp.add_constraint(row(&|c| c.energy).as_slice(), ComparisonOp::Ge, b);
    }
    if p1.is_finite() {
        lp.add_constraint(row(&|c| c.cost1).as_slice(), ComparisonOp::Le, p1);
    }
    if p2.is_finite() {
        lp.add_constraint(row(&|c| c.cost2).as_slice(), ComparisonOp::Le, p2);
    }
    let sol = match lp.solve() {
        Ok(s) => s,
        Err(microlp::Error::Infeasible) => return Ok(None),
        Err(e) => return Err(Error::Infeasible(format!("oracle LP: {e}"))),
    };
    let mut picked: Vec<(usize, f64)> = vars
        .iter()
        .enumerate()
        .map(|(j, &v)| (j, sol[v]))
        .filter(|(_, w)| *w > 1e-12)
        .collect();
    let total: f64 = picked.iter().map(|(_, w)| w).sum();
    picked.iter_mut().for_each(|(_, w)| *w /= total);
    Ok(Some(picked))
}

fn mix_by_enumeration(
    cands: &[Candidate],
    q_size: usize,
    steps: usize,
    target: Option<f64>,
    p1: f64,
    p2: f64,
) -> Result<Mixture> {
    let n = cands.len() as u128;
    let mut subsets: u128 = 1;
    for i in 0..q_size as u128 {
        subsets = subsets * (n - i) / (i + 1);
    }
    let weights = lattice(q_size, steps - 1);
    if subsets.saturating_mul(lattice_size(q_size, steps - 1)) > MAX_ENUMERATION {
        return Err(Error::SizeGuard(format!(
            "{subsets} codebook subsets × {} weight vectors is too many to enumerate",
            weights.len()
        )));
    }
    let mut best: Option<(f64, Vec<(usize, f64)>)> = None;
    let mut idx: Vec<usize> = (0..q_size).collect();
    loop {
        for w in &weights {
            let mixed = Candidate {
                p1: Vec::new(),
                p2: Vec::new(),
                value: idx.iter().zip(w).map(|(&j, a)| a * cands[j].value).sum(),
                energy: idx.iter().zip(w).map(|(&j, a)| a * cands[j].energy).sum(),
                cost1: idx.iter().zip(w).map(|(&j, a)| a * cands[j].cost1).sum(),
                cost2: idx.iter().zip(w).map(|(&j, a)| a * cands[j].cost2).sum(),
            };
            if satisfies(&mixed, target, p1, p2)
                && best.as_ref().is_none_or(|(v, _)| mixed.value > *v + 1e-13)
            {
                best = Some((
                    mixed.value,
                    idx.iter().copied().zip(w.iter().copied()).collect(),
                ));
            }
        }
        // next combination in lexicographic order
        let mut i = q_size;
        loop {
            if i == 0 {
                return Ok(best.map(|(_, m)| m.into_iter().filter(|(_, w)| *w > 0.0).collect()));
            }
            i -= 1;
            if idx[i] < cands.len() - q_size + i {
                idx[i] += 1;
                for k in i + 1..q_size {
                    idx[k] = idx[k - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Alphabet, CostFn, DmChannel, EnergyFn};
    use crate::mac::tests::adder_problem;
    use crate::mac::{mac_boundary_point, SearchGrid};
    use approx::assert_abs_diff_eq;

    #[test]
    fn agrees_with_solver_on_adder() {
        let prob = adder_problem(Some(0.0));
        let w = Weights::sum_rate();
        let oracle = brute_force_mac_oracle(&prob, w, 4, 21).unwrap();
        let solver = mac_boundary_point(&prob, w, 1, &SearchGrid::default()).unwrap();
        assert_abs_diff_eq!(oracle.objective, 1.5, epsilon = 1e-9);
        assert!((oracle.objective - solver.objective).abs() < 0.02);
    }

    #[test]
    fn degenerate_channel_carries_no_rate() {
        let bits = Alphabet::range(2).unwrap();
        let ch = DmChannel::new(
            vec![bits.clone(), bits],
            Alphabet::range(3).unwrap(),
            vec![vec![0.2, 0.3, 0.5]; 4],
        )
        .unwrap();
        let b = EnergyFn::new(vec![0.0, 1.0, 2.0]).unwrap();
        let prob =
            MacProblem::new(ch, CostFn::zero(2), CostFn::zero(2), b, 1.0, 1.0, Some(0.5)).unwrap();
        let pt = brute_force_mac_oracle(&prob, Weights::sum_rate(), 2, 11).unwrap();
        assert_abs_diff_eq!(pt.triple.r1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.triple.r2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.triple.energy, 1.3, epsilon = 1e-12);
    }

    #[test]
    fn one_codebook_suffices_when_energy_is_slack() {
        let prob = adder_problem(Some(0.5));
        for w in [Weights::sum_rate(), Weights::new(1.0, 0.0).unwrap()] {
            let one = brute_force_mac_oracle(&prob, w, 1, 21).unwrap();
            let four = brute_force_mac_oracle(&prob, w, 4, 21).unwrap();
            assert_abs_diff_eq!(one.objective, four.objective, epsilon = 1e-9);
        }
    }

    #[test]
    fn enumeration_path_matches_lp_path() {
        // One active constraint: |Q| = 1 enumerates, |Q| = 2 uses the LP.
        let prob = adder_problem(Some(1.8));
        let w = Weights::sum_rate();
        let two = brute_force_mac_oracle(&prob, w, 2, 11).unwrap();
        let one = brute_force_mac_oracle(&prob, w, 1, 11).unwrap();
        assert!(two.objective >= one.objective - 1e-12);
        assert!(two.info.energy >= 1.8 - 1e-9);
        assert_eq!(two.policy.q_size(), 2);
    }

    #[test]
    fn size_guards() {
        let prob = adder_problem(None);
        let w = Weights::sum_rate();
        assert!(matches!(
            brute_force_mac_oracle(&prob, w, 2, 22),
            Err(Error::SizeGuard(_))
        ));
        assert!(matches!(
            brute_force_mac_oracle(&prob, w, 2, 1),
            Err(Error::SizeGuard(_))
        ));
        let four = Alphabet::range(4).unwrap();
        let ch =
            DmChannel::deterministic(vec![four.clone(), four], Alphabet::range(7).unwrap(), |x| {
                x[0] + x[1]
            })
            .unwrap();
        let big = MacProblem::new(
            ch,
            CostFn::zero(4),
            CostFn::zero(4),
            EnergyFn::zero(7),
            1.0,
            1.0,
            None,
        )
        .unwrap();
        assert!(matches!(
            brute_force_mac_oracle(&big, w, 1, 5),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn infeasible_target_reported() {
        let r = brute_force_mac_oracle(&adder_problem(Some(2.5)), Weights::sum_rate(), 4, 5);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }
}
