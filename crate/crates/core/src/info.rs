//! Entropy and mutual information in bits, including the time-sharing
//! averaged conditional informations that bound a two-user MAC.

use crate::channel::{DmChannel, EnergyFn, Pmf};
use crate::error::{Error, Result};

/// `-Σ p log₂ p` with `0 log 0 = 0`.
pub(crate) fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_bits(p.probs()).max(0.0)
}

/// I(X;Y) = H(Y) − H(Y|X) for a point-to-point channel.
pub fn mutual_information(p_in: &Pmf, ch: &DmChannel) -> Result<f64> {
    ch.require_point_to_point()?;
    if p_in.len() != ch.input(0).len() {
        return Err(Error::AlphabetMismatch {
            expected: ch.input(0).len(),
            found: p_in.len(),
        });
    }
    Ok(mutual_information_raw(p_in.probs(), ch))
}

/// Unchecked version used in inner loops.
pub(crate) fn mutual_information_raw(p: &[f64], ch: &DmChannel) -> f64 {
    let mut out = vec![0.0; ch.output().len()];
    let mut noise = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let row = ch.row(x);
        noise += px * entropy_bits(row);
        for (o, w) in out.iter_mut().zip(row) {
            *o += px * w;
        }
    }
    (entropy_bits(&out) - noise).max(0.0)
}

/// Time-sharing variable Q with per-q independent input pmfs.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSharingPolicy {
    q_pmf: Pmf,
    conditionals: Vec<(Pmf, Pmf)>,
}

impl TimeSharingPolicy {
    pub fn new(q_pmf: Pmf, conditionals: Vec<(Pmf, Pmf)>) -> Result<Self> {
        if conditionals.len() != q_pmf.len() {
            return Err(Error::AlphabetMismatch {
                expected: q_pmf.len(),
                found: conditionals.len(),
            });
        }
        let (a, b) = (conditionals[0].0.len(), conditionals[0].1.len());
        for (p1, p2) in &conditionals {
            if p1.len() != a || p2.len() != b {
                return Err(Error::InvalidPmf(
                    "per-q conditionals disagree on alphabet sizes".into(),
                ));
            }
        }
        Ok(Self {
            q_pmf,
            conditionals,
        })
    }

    /// |Q| = 1.
    pub fn single(p1: Pmf, p2: Pmf) -> Self {
        Self {
            q_pmf: Pmf::degenerate(1, 0).expect("one-point pmf"),
            conditionals: vec![(p1, p2)],
        }
    }

    pub fn q_pmf(&self) -> &Pmf {
        &self.q_pmf
    }

    pub fn conditionals(&self) -> &[(Pmf, Pmf)] {
        &self.conditionals
    }

    pub fn q_size(&self) -> usize {
        self.q_pmf.len()
    }

    /// Policy that uses `a` with probability `weight` and `b` otherwise,
    /// keeping every codebook pair of both.
    pub fn time_share(a: &Self, b: &Self, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(format!(
                "time-share weight {weight}"
            )));
        }
        let probs = a
            .q_pmf
            .probs()
            .iter()
            .map(|p| weight * p)
            .chain(b.q_pmf.probs().iter().map(|p| (1.0 - weight) * p))
            .collect();
        let conditionals = a
            .conditionals
            .iter()
            .chain(&b.conditionals)
            .cloned()
            .collect();
        Self::new(Pmf::new(probs)?, conditionals)
    }

    /// Marginal input pmfs p(x1), p(x2) after averaging over Q.
    pub fn marginals(&self) -> (Pmf, Pmf) {
        let mix = |pick: fn(&(Pmf, Pmf)) -> &Pmf| {
            let k = pick(&self.conditionals[0]).len();
            let mut m = vec![0.0; k];
            for (&w, c) in self.q_pmf.probs().iter().zip(&self.conditionals) {
                for (acc, p) in m.iter_mut().zip(pick(c).probs()) {
                    *acc += w * p;
                }
            }
            Pmf::new(m).expect("mixture of pmfs")
        };
        (mix(|c| &c.0), mix(|c| &c.1))
    }
}

/// Right-hand sides of the MAC rate-energy inequalities for one policy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MacInformation {
    /// I(X1; Y | X2, Q)
    pub i1: f64,
    /// I(X2; Y | X1, Q)
    pub i2: f64,
    /// I(X1, X2; Y | Q)
    pub isum: f64,
    /// E[b(Y)]
    pub energy: f64,
}

impl MacInformation {
    pub(crate) fn scaled(self, w: f64) -> Self {
        Self {
            i1: w * self.i1,
            i2: w * self.i2,
            isum: w * self.isum,
            energy: w * self.energy,
        }
    }

    pub(crate) fn add(self, o: Self) -> Self {
        Self {
            i1: self.i1 + o.i1,
            i2: self.i2 + o.i2,
            isum: self.isum + o.isum,
            energy: self.energy + o.energy,
        }
    }
}

/// Information quantities of a single codebook pair (fixed q).
pub(crate) fn slot_information(
    p1: &[f64],
    p2: &[f64],
    ch: &DmChannel,
    b: &[f64],
) -> MacInformation {
    let ny = ch.output().len();
    let mut out = vec![0.0; ny];
    let mut h_y_x1x2 = 0.0;
    // H(Y | X2): output mixture for each x2 over x1
    let mut h_y_x2 = 0.0;
    // H(Y | X1): output mixture for each x1 over x2
    let mut h_y_x1 = 0.0;
    let mut given_x1 = vec![0.0; ny];
    let mut given_x2 = vec![0.0; ny];

    for (x1, &a) in p1.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        given_x1.iter_mut().for_each(|v| *v = 0.0);
        for (x2, &c) in p2.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = ch.mac_row(x1, x2);
            h_y_x1x2 += a * c * entropy_bits(row);
            for (g, w) in given_x1.iter_mut().zip(row) {
                *g += c * w;
            }
        }
        h_y_x1 += a * entropy_bits(&given_x1);
        for (o, g) in out.iter_mut().zip(&given_x1) {
            *o += a * g;
        }
    }
    for (x2, &c) in p2.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        given_x2.iter_mut().for_each(|v| *v = 0.0);
        for (x1, &a) in p1.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (g, w) in given_x2.iter_mut().zip(ch.mac_row(x1, x2)) {
                *g += a * w;
            }
        }
        h_y_x2 += c * entropy_bits(&given_x2);
    }
    let energy = out.iter().zip(b).map(|(p, e)| p * e).sum();
    MacInformation {
        i1: (h_y_x2 - h_y_x1x2).max(0.0),
        i2: (h_y_x1 - h_y_x1x2).max(0.0),
        isum: (entropy_bits(&out) - h_y_x1x2).max(0.0),
        energy,
    }
}

/// The four right-hand sides (I1, I2, Isum, E[b(Y)]) averaged over Q.
pub fn mac_mutual_informations(
    pol: &TimeSharingPolicy,
    ch: &DmChannel,
    b: &EnergyFn,
) -> Result<MacInformation> {
    ch.require_mac()?;
    let check = |expected: usize, found: usize| {
        if expected == found {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch { expected, found })
        }
    };
    check(ch.output().len(), b.len())?;
    let (p1, p2) = &pol.conditionals[0];
    check(ch.input(0).len(), p1.len())?;
    check(ch.input(1).len(), p2.len())?;
    Ok(pol
        .q_pmf
        .probs()
        .iter()
        .zip(&pol.conditionals)
        .filter(|(w, _)| **w > 0.0)
        .map(|(&w, (p1, p2))| slot_information(p1.probs(), p2.probs(), ch, b.values()).scaled(w))
        .fold(MacInformation::default(), MacInformation::add))
}
