//! Noiseless 4-ary first hop on `{−2, −1, 1, 2}` with `c1(x) = x²`,
//! `b(y) = y²`, and an AWGN second hop of noise variance `N0`.
//!
//! By symmetry the first-hop input is `(p, ½ − p, ½ − p, p)`, which costs
//! and harvests `6p + 1`, so the capacity reduces to a search over one
//! scalar:
//!
//! ```text
//! max_{0 ≤ p ≤ ½, 6p+1 ≤ P1} min{ H(p, ½−p, ½−p, p), ½ log₂(1 + (P2 + 6p + 1)/N0) }
//! ```

use crate::error::{Error, Result};
use crate::info::entropy_bits;
use rayon::prelude::*;

const TIE: f64 = 1e-6;
const REFINE: usize = 8;
const BISECTIONS: usize = 60;

fn first_term(p: f64) -> f64 {
    entropy_bits(&[p, 0.5 - p, 0.5 - p, p])
}

fn second_term(p: f64, p2: f64, n0: f64) -> f64 {
    0.5 * (1.0 + (p2 + 6.0 * p + 1.0) / n0).log2()
}

/// Capacity and the maximizing `p`, the smallest among values within
/// 1e-6 bits of the best. `p_steps` intervals cover `[0, ½]`.
pub fn mhc_example_capacity(p1: f64, p2: f64, n0: f64, p_steps: usize) -> Result<(f64, f64)> {
    if !(p1 >= 1.0) {
        return Err(Error::Infeasible(format!(
            "P1 = {p1} is below the cheapest input cost 1"
        )));
    }
    if p2.is_nan() || p2 < 0.0 {
        return Err(Error::NegativeValue {
            what: "P2",
            value: p2,
        });
    }
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(Error::InvalidChannel(format!(
            "noise variance {n0} must be positive"
        )));
    }
    if p_steps == 0 {
        return Err(Error::InvalidArgument("p_steps must be positive".into()));
    }
    let p_max = ((p1 - 1.0) / 6.0).min(0.5);
    let value = |p: f64| first_term(p).min(second_term(p, p2, n0));
    let pitch = 0.5 / p_steps as f64;

    let mut cands: Vec<f64> = (0..=p_steps)
        .map(|i| i as f64 * pitch)
        .filter(|&p| p <= p_max)
        .collect();
    cands.push(p_max);
    let coarse = pick(&cands, value);

    let fine = pitch / REFINE as f64;
    let mut cands: Vec<f64> = (-(REFINE as i64)..=REFINE as i64)
        .map(|k| coarse + k as f64 * fine)
        .filter(|&p| (0.0..=p_max).contains(&p))
        .collect();
    cands.push(p_max);
    // The optimum often sits where the two terms cross; locate it exactly.
    let gap = |p: f64| first_term(p) - second_term(p, p2, n0);
    let mut sorted = cands.clone();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        if gap(lo) > 0.0 && gap(hi) < 0.0 || gap(lo) < 0.0 && gap(hi) > 0.0 {
            let lo_sign = gap(lo) > 0.0;
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (lo + hi);
                if (gap(mid) > 0.0) == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cands.push(lo);
        }
    }
    let p_star = pick(&cands, value);
    Ok((value(p_star), p_star))
}

fn pick(cands: &[f64], value: impl Fn(f64) -> f64) -> f64 {
    let top = cands
        .iter()
        .map(|&p| value(p))
        .fold(f64::NEG_INFINITY, f64::max);
    cands
        .iter()
        .copied()
        .filter(|&p| value(p) >= top - TIE)
        .fold(f64::INFINITY, f64::min)
}

/// How an SNR value maps to the noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnrScale {
    /// `SNR = 10 log₂(1/N0)`, so `N0 = 2^(−SNR/10)`.
    #[default]
    Log2,
    /// Conventional decibels, `N0 = 10^(−SNR/10)`.
    Decibel,
}

pub fn snr_to_noise(snr: f64, scale: SnrScale) -> f64 {
    match scale {
        SnrScale::Log2 => (-snr / 10.0).exp2(),
        SnrScale::Decibel => 10f64.powf(-snr / 10.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleSweepRow {
    pub snr: f64,
    pub n0: f64,
    pub capacity: f64,
    pub p_star: f64,
}

/// Capacity and optimal `p` across an ascending SNR grid.
pub fn mhc_example_sweep(
    p1: f64,
    p2: f64,
    snr_grid: &[f64],
    scale: SnrScale,
    p_steps: usize,
) -> Result<Vec<ExampleSweepRow>> {
    if snr_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("SNR grid must be ascending".into()));
    }
    snr_grid
        .par_iter()
        .map(|&snr| {
            let n0 = snr_to_noise(snr, scale);
            let (capacity, p_star) = mhc_example_capacity(p1, p2, n0, p_steps)?;
            Ok(ExampleSweepRow {
                snr,
                n0,
                capacity,
                p_star,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::EnergyFn;
    use crate::mhc::tests::{example_problem, levels};
    use crate::mhc::{mhc_capacity, MhcGrid};
    use approx::assert_abs_diff_eq;

    #[test]
    fn high_snr_maximizes_information() {
        let (c, p) = mhc_example_capacity(4.0, 0.0, 0.001, 128).unwrap();
        assert_abs_diff_eq!(c, 2.0, epsilon = 1e-9);
        assert_eq!(p, 0.25);
    }

    #[test]
    fn low_snr_maximizes_energy() {
        let (c, p) = mhc_example_capacity(4.0, 0.0, 100.0, 128).unwrap();
        assert_eq!(p, 0.5);
        assert_abs_diff_eq!(c, 0.5 * 1.04f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(c, 0.02829, epsilon = 1e-5);
    }

    #[test]
    fn power_budget_caps_p() {
        // 6p + 1 ≤ 2 ⇒ p ≤ 1/6; low SNR pushes p to the cap
        let (_, p) = mhc_example_capacity(2.0, 0.0, 100.0, 128).unwrap();
        assert_abs_diff_eq!(p, 1.0 / 6.0, epsilon = 1e-12);
        assert!(mhc_example_capacity(0.5, 0.0, 1.0, 128).is_err());
    }

    #[test]
    fn matches_generic_solver() {
        for n0 in [0.05, 0.3, 1.0, 4.0] {
            let (c, _) = mhc_example_capacity(4.0, 0.0, n0, 128).unwrap();
            let prob = example_problem(EnergyFn::squared(&levels()), 4.0, n0, 0.0);
            let generic = mhc_capacity(&prob, &MhcGrid::default()).unwrap().capacity;
            assert!((c - generic).abs() < 1e-3, "N0={n0}: {c} vs {generic}");
        }
    }

    #[test]
    fn harvesting_beats_no_harvest_baseline() {
        for p2 in [0.0, 1.0, 4.0, 8.0] {
            for n0 in [0.01, 0.1, 1.0, 10.0, 100.0] {
                let (c, _) = mhc_example_capacity(4.0, p2, n0, 128).unwrap();
                let baseline = 2f64.min(0.5 * (1.0 + p2 / n0).log2());
                assert!(c >= baseline - 1e-12, "P2={p2} N0={n0}");
            }
        }
    }

    #[test]
    fn sweep_shape() {
        let grid: Vec<f64> = (0..=80).map(|i| -20.0 + i as f64).collect();
        let rows = mhc_example_sweep(4.0, 0.0, &grid, SnrScale::Log2, 128).unwrap();
        assert_eq!(rows[0].p_star, 0.5);
        assert_eq!(rows.last().unwrap().p_star, 0.25);
        assert_abs_diff_eq!(rows.last().unwrap().capacity, 2.0, epsilon = 1e-3);
        assert!(rows.windows(2).all(|w| w[1].p_star <= w[0].p_star));
        assert!(mhc_example_sweep(4.0, 0.0, &[1.0, 0.0], SnrScale::Log2, 128).is_err());
    }

    #[test]
    fn snr_scales() {
        assert_eq!(snr_to_noise(10.0, SnrScale::Log2), 0.5);
        assert_abs_diff_eq!(snr_to_noise(10.0, SnrScale::Decibel), 0.1, epsilon = 1e-15);
    }
}
