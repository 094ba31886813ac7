//! Joint search over both hop inputs, independent of the nested solver.
//!
//! Every lattice pair `(p(x1), p(x2))` with `E[c1] ≤ P1` and
//! `E[c2] ≤ E[b(Y1)] + P2` is scored by `min{I1, I2}`. The lattice is then
//! zoomed around the best pair, halving the pitch per level and
//! re-centering until the pair stops moving, so the result is not limited
//! by the coarse pitch. The optimum usually lies on the ridge `I1 = I2`,
//! where few lattice directions improve; halving slowly keeps the search
//! walking along the ridge instead of stalling. For each first-hop point the best affordable second-hop
//! point comes from a running maximum of `I2` over second-hop points
//! sorted by cost.

use super::{MhcProblem, SecondHop};
use crate::error::{Error, Result};
use crate::info::mutual_information_raw;
use crate::simplex::{lattice, neighborhood};
use rayon::prelude::*;

const MAX_ALPHABET: usize = 4;
const MAX_STEPS: usize = 21;
const ZOOM: f64 = 2.0;
const ZOOM_REACH: i64 = 6;
const ZOOM_LEVELS: usize = 20;
const MAX_MOVES: usize = 200;
const SLACK: f64 = 1e-9;

/// Second-hop points sorted by cost, with the running best information.
struct Affordable {
    points: Vec<(f64, f64, usize)>,
    best_upto: Vec<(f64, usize)>,
}

impl Affordable {
    fn new(p2s: &[Vec<f64>], prob: &MhcProblem) -> Self {
        let SecondHop::Discrete { channel, cost } = prob.hop2() else {
            unreachable!("only built for discrete second hops")
        };
        let mut points: Vec<(f64, f64, usize)> = p2s
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                let c: f64 = p.iter().zip(cost.values()).map(|(a, b)| a * b).sum();
                (c, mutual_information_raw(p, channel), i)
            })
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        let mut best_upto = Vec::with_capacity(points.len());
        let mut run = (f64::NEG_INFINITY, usize::MAX);
        for &(_, info, i) in &points {
            if info > run.0 {
                run = (info, i);
            }
            best_upto.push(run);
        }
        Self { points, best_upto }
    }

    fn best_within(&self, budget: f64) -> Option<(f64, usize)> {
        let n = self
            .points
            .partition_point(|&(c, _, _)| c <= budget + SLACK);
        n.checked_sub(1).map(|i| self.best_upto[i])
    }
}

fn dot(p: &[f64], c: &[f64]) -> f64 {
    p.iter().zip(c).map(|(a, b)| a * b).sum()
}

/// Moves `q` toward the affordable `center` until its cost meets `budget`
/// with equality. Lattice points almost never lie exactly on an active cost
/// face, and without these the zoom stalls against it. `None` when `q` is
/// already affordable or `center` is not.
fn pull_back(center: &[f64], q: &[f64], cost: &[f64], budget: f64) -> Option<Vec<f64>> {
    let (cc, cq) = (dot(center, cost), dot(q, cost));
    if cq <= budget + SLACK || cc > budget + SLACK {
        return None;
    }
    let t = ((budget - cc) / (cq - cc)).clamp(0.0, 1.0);
    Some(center.iter().zip(q).map(|(a, b)| a + t * (b - a)).collect())
}

/// Best `(value, p1, p2)` over the given first- and second-hop points.
/// With a second-hop `center`, unaffordable second-hop points are also
/// pulled back onto each first-hop point's relay budget.
fn best_pair(
    prob: &MhcProblem,
    p1s: Vec<Vec<f64>>,
    p2s: Vec<Vec<f64>>,
    center2: Option<&[f64]>,
) -> Option<(f64, Vec<f64>, Vec<f64>)> {
    let (budget1, _) = prob.budgets();
    let affordable = match prob.hop2() {
        SecondHop::Discrete { .. } => Some(Affordable::new(&p2s, prob)),
        SecondHop::Awgn(_) => None,
    };
    let scored: Vec<Option<(f64, usize, Vec<f64>)>> = p1s
        .par_iter()
        .enumerate()
        .map(|(i, p1)| {
            if dot(p1, prob.cost1().values()) > budget1 + SLACK {
                return None;
            }
            let i1 = mutual_information_raw(p1, prob.hop1());
            let beta = prob.relay_budget(p1);
            match (&affordable, prob.hop2()) {
                (Some(a), SecondHop::Discrete { channel, cost }) => {
                    let mut best = a.best_within(beta).map(|(i2, j)| (i2, p2s[j].clone()));
                    if let Some(c) = center2 {
                        for q in &p2s {
                            if let Some(m) = pull_back(c, q, cost.values(), beta) {
                                let i2 = mutual_information_raw(&m, channel);
                                if best.as_ref().is_none_or(|b| i2 > b.0) {
                                    best = Some((i2, m));
                                }
                            }
                        }
                    }
                    best.map(|(i2, p2)| (i1.min(i2), i, p2))
                }
                (None, SecondHop::Awgn(spec)) => Some((
                    i1.min(0.5 * (1.0 + beta / spec.noise_var()).log2()),
                    i,
                    Vec::new(),
                )),
                _ => unreachable!("second-hop table matches the hop"),
            }
        })
        .collect();
    let (value, i, p2) = scored.into_iter().flatten().fold(
        None,
        |acc: Option<(f64, usize, Vec<f64>)>, s| match acc {
            Some(a) if a.0 >= s.0 => Some(a),
            _ => Some(s),
        },
    )?;
    Some((value, p1s[i].clone(), p2))
}

/// Cut-set value `max min{I(X1;Y1), I(X2;Y2)}` with the second-hop cost
/// coupled to the first-hop input. `steps` lattice points per simplex
/// dimension are used at the coarsest level. An AWGN second hop uses its
/// closed form.
pub fn cutset_joint_oracle(prob: &MhcProblem, steps: usize) -> Result<f64> {
    let k1 = prob.hop1().input(0).len();
    let k2 = match prob.hop2() {
        SecondHop::Discrete { channel, .. } => channel.input(0).len(),
        SecondHop::Awgn(_) => 1,
    };
    if k1 > MAX_ALPHABET || k2 > MAX_ALPHABET {
        return Err(Error::SizeGuard(format!(
            "oracle accepts at most {MAX_ALPHABET} input symbols per hop"
        )));
    }
    if !(2..=MAX_STEPS).contains(&steps) {
        return Err(Error::SizeGuard(format!(
            "steps must be in 2..={MAX_STEPS}"
        )));
    }
    let divisions = steps - 1;
    let discrete = matches!(prob.hop2(), SecondHop::Discrete { .. });
    let p2_coarse = if discrete {
        lattice(k2, divisions)
    } else {
        Vec::new()
    };
    let (mut value, mut p1, mut p2) = best_pair(prob, lattice(k1, divisions), p2_coarse, None)
        .ok_or_else(|| Error::Infeasible("no lattice input pair meets the budgets".into()))?;
    let mut pitch = 1.0 / divisions as f64;
    for _ in 0..ZOOM_LEVELS {
        pitch /= ZOOM;
        // re-center at this pitch until the best pair stops moving
        for _ in 0..MAX_MOVES {
            let p2s = if discrete {
                neighborhood(&p2, pitch, ZOOM_REACH)
            } else {
                Vec::new()
            };
            let budget1 = prob.budgets().0;
            let mut p1s = neighborhood(&p1, pitch, ZOOM_REACH);
            let pulled: Vec<Vec<f64>> = p1s
                .iter()
                .filter_map(|q| pull_back(&p1, q, prob.cost1().values(), budget1))
                .collect();
            p1s.extend(pulled);
            let center2 = discrete.then_some(p2.as_slice());
            match best_pair(prob, p1s, p2s, center2) {
                Some((v, a, b)) if v > value + 1e-12 => (value, p1, p2) = (v, a, b),
                _ => break,
            }
        }
    }
    Ok(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{Alphabet, AwgnSpec, CostFn, DmChannel, EnergyFn};
    use crate::mhc::tests::{example_problem, levels};
    use crate::mhc::{dm_capacity_with_cost, mhc_capacity, MhcGrid};
    use approx::assert_abs_diff_eq;

    #[test]
    fn example_instance_agrees_with_nested_solver() {
        let prob = example_problem(EnergyFn::squared(&levels()), 4.0, 1.0, 0.0);
        let nested = mhc_capacity(&prob, &MhcGrid::default()).unwrap().capacity;
        let oracle = cutset_joint_oracle(&prob, 21).unwrap();
        assert!((nested - oracle).abs() < 1e-3, "{nested} vs {oracle}");
    }

    #[test]
    fn decoupled_instance_is_min_of_separate_maxima() {
        let hop2 = DmChannel::binary_symmetric(0.2).unwrap();
        let prob = MhcProblem::new(
            DmChannel::binary_symmetric(0.05).unwrap(),
            CostFn::zero(2),
            EnergyFn::zero(2),
            1.0,
            SecondHop::Discrete {
                channel: hop2.clone(),
                cost: CostFn::new(vec![0.0, 1.0]).unwrap(),
            },
            0.2,
        )
        .unwrap();
        let c1 = dm_capacity_with_cost(prob.hop1(), &CostFn::zero(2), 1.0)
            .unwrap()
            .capacity;
        let c2 = dm_capacity_with_cost(&hop2, &CostFn::new(vec![0.0, 1.0]).unwrap(), 0.2)
            .unwrap()
            .capacity;
        let oracle = cutset_joint_oracle(&prob, 21).unwrap();
        assert!(
            (oracle - c1.min(c2)).abs() < 1e-4,
            "{oracle} vs {}",
            c1.min(c2)
        );
    }

    #[test]
    fn dead_second_hop() {
        let dead = DmChannel::new(
            vec![Alphabet::range(2).unwrap()],
            Alphabet::range(2).unwrap(),
            vec![vec![0.4, 0.6]; 2],
        )
        .unwrap();
        let prob = MhcProblem::new(
            DmChannel::binary_symmetric(0.1).unwrap(),
            CostFn::zero(2),
            EnergyFn::zero(2),
            1.0,
            SecondHop::Discrete {
                channel: dead,
                cost: CostFn::zero(2),
            },
            1.0,
        )
        .unwrap();
        assert_abs_diff_eq!(
            cutset_joint_oracle(&prob, 11).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn size_guards() {
        let prob = example_problem(EnergyFn::zero(4), 4.0, 1.0, 0.0);
        assert!(matches!(
            cutset_joint_oracle(&prob, 22),
            Err(Error::SizeGuard(_))
        ));
        let five = Alphabet::range(5).unwrap();
        let big = MhcProblem::new(
            DmChannel::deterministic(vec![five.clone()], five, |x| x[0]).unwrap(),
            CostFn::zero(5),
            EnergyFn::zero(5),
            1.0,
            SecondHop::Awgn(AwgnSpec::new(1.0).unwrap()),
            1.0,
        )
        .unwrap();
        assert!(matches!(
            cutset_joint_oracle(&big, 5),
            Err(Error::SizeGuard(_))
        ));
    }
}
