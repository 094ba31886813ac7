//! Monte Carlo checks of the operational definitions: cost-screened random
//! codebooks, empirical received energy per block, the high-probability
//! energy condition, the relay harvesting budget, and ML decoding.
//!
//! Every trial draws from its own ChaCha stream `(seed, trial)`, so serial
//! and parallel runs give bit-identical reports.

use crate::channel::{Alphabet, CostFn, DmChannel, EnergyFn, Pmf};
use crate::error::{Error, Result};
use crate::info::TimeSharingPolicy;
use crate::mac::GaussianMacSolution;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Attempts per codeword before giving up on the cost constraint.
pub const MAX_REJECTIONS: usize = 1000;
const COST_SLACK: f64 = 1e-9;
/// Largest `n·R` accepted by [`generate_codebook`].
pub const MAX_RATE_BITS: f64 = 20.0;
/// Largest number of message pairs searched by [`simulate_decode`].
pub const MAX_DECODE_PAIRS: usize = 1 << 20;

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Distribution of one input symbol for a fixed value of Q.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSource {
    Discrete {
        symbols: Vec<f64>,
        probs: Vec<f64>,
    },
    /// Zero-mean Gaussian of the given variance.
    Gaussian {
        power: f64,
    },
    Constant(f64),
}

impl SymbolSource {
    pub fn from_pmf(alphabet: &Alphabet, pmf: &Pmf) -> Result<Self> {
        if alphabet.len() != pmf.len() {
            return Err(Error::AlphabetMismatch {
                expected: alphabet.len(),
                found: pmf.len(),
            });
        }
        Ok(Self::Discrete {
            symbols: alphabet.symbols().to_vec(),
            probs: pmf.probs().to_vec(),
        })
    }

    fn sampler(&self) -> Result<Sampler> {
        Ok(match self {
            Self::Discrete { symbols, probs } => Sampler::Discrete {
                symbols: symbols.clone(),
                index: WeightedIndex::new(probs).map_err(|e| Error::InvalidPmf(e.to_string()))?,
            },
            Self::Gaussian { power } => {
                if !(*power >= 0.0) {
                    return Err(Error::NegativeValue {
                        what: "Gaussian power",
                        value: *power,
                    });
                }
                Sampler::Gaussian { std: power.sqrt() }
            }
            Self::Constant(v) => Sampler::Constant(*v),
        })
    }
}

enum Sampler {
    Discrete {
        symbols: Vec<f64>,
        index: WeightedIndex<f64>,
    },
    Gaussian {
        std: f64,
    },
    Constant(f64),
}

impl Sampler {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Self::Discrete { symbols, index } => symbols[index.sample(rng)],
            Self::Gaussian { std } => std * rng.sample::<f64, _>(StandardNormal),
            Self::Constant(v) => *v,
        }
    }
}

/// Per-user generating policy: a pmf on Q and one symbol source per q.
#[derive(Debug, Clone, PartialEq)]
pub struct InputPolicy {
    q_probs: Vec<f64>,
    sources: Vec<SymbolSource>,
}

impl InputPolicy {
    pub fn new(q_probs: Vec<f64>, sources: Vec<SymbolSource>) -> Result<Self> {
        let q = Pmf::new(q_probs)?;
        if q.len() != sources.len() {
            return Err(Error::AlphabetMismatch {
                expected: q.len(),
                found: sources.len(),
            });
        }
        Ok(Self {
            q_probs: q.probs().to_vec(),
            sources,
        })
    }

    pub fn single(source: SymbolSource) -> Self {
        Self {
            q_probs: vec![1.0],
            sources: vec![source],
        }
    }

    /// The two per-user policies of a MAC time-sharing policy; they share
    /// the pmf on Q.
    pub fn from_time_sharing(pol: &TimeSharingPolicy, ch: &DmChannel) -> Result<(Self, Self)> {
        ch.require_mac()?;
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        for (a, b) in pol.conditionals() {
            s1.push(SymbolSource::from_pmf(ch.input(0), a)?);
            s2.push(SymbolSource::from_pmf(ch.input(1), b)?);
        }
        let q = pol.q_pmf().probs().to_vec();
        Ok((Self::new(q.clone(), s1)?, Self::new(q, s2)?))
    }

    /// Constant `√P''` while Q = 0 (probability 1 − λ), Gaussian codebook
    /// of power `P'` while Q = 1.
    pub fn gaussian_two_phase(sol: &GaussianMacSolution) -> Result<Self> {
        Self::new(
            vec![1.0 - sol.lambda, sol.lambda],
            vec![
                SymbolSource::Constant(sol.p_energy.sqrt()),
                SymbolSource::Gaussian { power: sol.p_info },
            ],
        )
    }

    pub fn q_probs(&self) -> &[f64] {
        &self.q_probs
    }

    pub fn sources(&self) -> &[SymbolSource] {
        &self.sources
    }
}

/// Time-sharing sequence `Q^n` shared by the encoders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSequence(Vec<usize>);

impl QSequence {
    pub fn draw(q_probs: &[f64], n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "blocklength must be at least 1".into(),
            ));
        }
        let index = WeightedIndex::new(q_probs).map_err(|e| Error::InvalidPmf(e.to_string()))?;
        let mut rng = trial_rng(seed, u64::MAX);
        Ok(Self((0..n).map(|_| index.sample(&mut rng)).collect()))
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-symbol transmit cost.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolCost {
    Table {
        alphabet: Alphabet,
        cost: CostFn,
    },
    /// `c(x) = x²`.
    Squared,
}

impl SymbolCost {
    fn of(&self, x: f64) -> Result<f64> {
        match self {
            Self::Squared => Ok(x * x),
            Self::Table { alphabet, cost } => alphabet
                .index_of(x)
                .map(|i| cost.values()[i])
                .ok_or_else(|| Error::InvalidAlphabet(format!("symbol {x} has no cost entry"))),
        }
    }

    fn block(&self, xs: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for &x in xs {
            total += self.of(x)?;
        }
        Ok(total / xs.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub n: usize,
    pub codewords: Vec<Vec<f64>>,
    pub q: QSequence,
    pub policy: InputPolicy,
    /// Codewords drawn and discarded for violating the cost budget.
    pub rejections: usize,
}

impl Codebook {
    pub fn messages(&self) -> usize {
        self.codewords.len()
    }
}

/// `⌊2^{nR}⌋` codewords (at least one) with symbols drawn independently
/// per `q_i`; any codeword with `(1/n) Σ c(x_i) > budget` is redrawn.
pub fn generate_codebook(
    policy: &InputPolicy,
    q: &QSequence,
    rate: f64,
    cost: &SymbolCost,
    budget: f64,
    seed: u64,
) -> Result<Codebook> {
    let n = q.len();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "blocklength must be at least 1".into(),
        ));
    }
    if !(rate >= 0.0) {
        return Err(Error::NegativeValue {
            what: "rate",
            value: rate,
        });
    }
    let bits = n as f64 * rate;
    if bits > MAX_RATE_BITS {
        return Err(Error::SizeGuard(format!(
            "n·R = {bits} exceeds {MAX_RATE_BITS}"
        )));
    }
    if let Some(&bad) = q.symbols().iter().find(|&&s| s >= policy.sources.len()) {
        return Err(Error::InvalidArgument(format!(
            "Q symbol {bad} outside the policy"
        )));
    }
    let messages = (bits.exp2().floor() as usize).max(1);
    let samplers = policy
        .sources
        .iter()
        .map(SymbolSource::sampler)
        .collect::<Result<Vec<_>>>()?;
    let drawn: Vec<(Vec<f64>, usize)> = (0..messages)
        .into_par_iter()
        .map(|m| {
            let mut rng = trial_rng(seed, m as u64);
            for attempt in 0..MAX_REJECTIONS {
                let word: Vec<f64> = q
                    .symbols()
                    .iter()
                    .map(|&s| samplers[s].sample(&mut rng))
                    .collect();
                if cost.block(&word)? <= budget + COST_SLACK {
                    return Ok((word, attempt));
                }
            }
            Err(Error::Rejection(format!(
                "no codeword within cost budget {budget} after {MAX_REJECTIONS} attempts"
            )))
        })
        .collect::<Result<_>>()?;
    let rejections = drawn.iter().map(|(_, r)| r).sum();
    Ok(Codebook {
        n,
        codewords: drawn.into_iter().map(|(w, _)| w).collect(),
        q: q.clone(),
        policy: policy.clone(),
        rejections,
    })
}

/// Channel sampler together with its received-energy function.
#[derive(Debug, Clone, PartialEq)]
pub enum Link {
    Discrete {
        channel: DmChannel,
        energy: EnergyFn,
    },
    /// `Y = Σ X_k + Z`, `Z ~ N(0, noise_var)`, energy `b(y) = y²`.
    Gaussian { noise_var: f64 },
}

impl Link {
    pub fn discrete(channel: DmChannel, energy: EnergyFn) -> Result<Self> {
        if energy.len() != channel.output().len() {
            return Err(Error::AlphabetMismatch {
                expected: channel.output().len(),
                found: energy.len(),
            });
        }
        Ok(Self::Discrete { channel, energy })
    }

    pub fn gaussian(noise_var: f64) -> Result<Self> {
        if !(noise_var > 0.0) {
            return Err(Error::InvalidChannel(format!(
                "noise variance {noise_var} must be positive"
            )));
        }
        Ok(Self::Gaussian { noise_var })
    }

    fn prepare(&self, books: &[&Codebook]) -> Result<Prepared> {
        match self {
            Self::Gaussian { noise_var } => Ok(Prepared::Gaussian {
                std: noise_var.sqrt(),
                books: books.iter().map(|b| b.codewords.clone()).collect(),
            }),
            Self::Discrete { channel, energy } => {
                if channel.num_inputs() != books.len() {
                    return Err(Error::InvalidChannel(format!(
                        "channel has {} inputs, {} codebooks given",
                        channel.num_inputs(),
                        books.len()
                    )));
                }
                let mut indexed = Vec::new();
                for (k, book) in books.iter().enumerate() {
                    let alphabet = channel.input(k);
                    let words = book
                        .codewords
                        .iter()
                        .map(|w| {
                            w.iter()
                                .map(|&x| {
                                    alphabet.index_of(x).ok_or_else(|| {
                                        Error::InvalidAlphabet(format!(
                                            "symbol {x} not in input alphabet {k}"
                                        ))
                                    })
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    indexed.push(words);
                }
                let cumulative = channel
                    .rows()
                    .iter()
                    .map(|r| {
                        r.probs()
                            .iter()
                            .scan(0.0, |acc, p| {
                                *acc += p;
                                Some(*acc)
                            })
                            .collect()
                    })
                    .collect();
                Ok(Prepared::Discrete {
                    cumulative,
                    energy: energy.values().to_vec(),
                    strides: row_strides(channel),
                    books: indexed,
                })
            }
        }
    }
}

fn row_strides(ch: &DmChannel) -> Vec<usize> {
    let mut strides = vec![1; ch.num_inputs()];
    for k in (0..ch.num_inputs().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * ch.input(k + 1).len();
    }
    strides
}

/// Codebooks converted to the form the inner loops need.
enum Prepared {
    Discrete {
        cumulative: Vec<Vec<f64>>,
        energy: Vec<f64>,
        strides: Vec<usize>,
        books: Vec<Vec<Vec<usize>>>,
    },
    Gaussian {
        std: f64,
        books: Vec<Vec<Vec<f64>>>,
    },
}

/// One channel output of a block.
#[derive(Clone, Copy)]
enum Output {
    Index(usize),
    Value(f64),
}

impl Prepared {
    fn messages(&self) -> Vec<usize> {
        match self {
            Self::Discrete { books, .. } => books.iter().map(Vec::len).collect(),
            Self::Gaussian { books, .. } => books.iter().map(Vec::len).collect(),
        }
    }

    /// Sends `msgs` through the channel; returns the outputs and `b^n`.
    fn transmit(&self, msgs: &[usize], n: usize, rng: &mut ChaCha8Rng) -> (Vec<Output>, f64) {
        let mut out = Vec::with_capacity(n);
        let mut energy = 0.0;
        for i in 0..n {
            match self {
                Self::Discrete {
                    cumulative,
                    energy: b,
                    strides,
                    books,
                } => {
                    let row: usize = msgs
                        .iter()
                        .enumerate()
                        .map(|(k, &m)| books[k][m][i] * strides[k])
                        .sum();
                    let u: f64 = rng.random();
                    let cum = &cumulative[row];
                    let y = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
                    energy += b[y];
                    out.push(Output::Index(y));
                }
                Self::Gaussian { std, books } => {
                    let signal: f64 = msgs.iter().enumerate().map(|(k, &m)| books[k][m][i]).sum();
                    let y = signal + std * rng.sample::<f64, _>(StandardNormal);
                    energy += y * y;
                    out.push(Output::Value(y));
                }
            }
        }
        (out, energy / n as f64)
    }
}

fn check_blocklengths(books: &[&Codebook]) -> Result<usize> {
    let n = books[0].n;
    if books.iter().any(|b| b.n != n) {
        return Err(Error::InvalidArgument(
            "codebooks have different blocklengths".into(),
        ));
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Mean over trials of `b^n(Y^n)`.
    pub mean_energy: f64,
    /// Sample standard deviation of `b^n(Y^n)` across trials.
    pub energy_std: f64,
    /// Fraction of trials with `b^n(Y^n) < B − ε`.
    pub energy_violation_freq: Option<f64>,
    pub error_rate: Option<f64>,
    /// Fraction of trials where the relay spent more than it harvested
    /// plus `P2`.
    pub relay_violation_freq: Option<f64>,
}

fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn require_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    Ok(())
}

/// Uniform message pairs through the MAC; tallies the received energy per
/// block against the target `B − ε`.
pub fn simulate_mac_energy(
    cb1: &Codebook,
    cb2: &Codebook,
    link: &Link,
    target: f64,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<SimReport> {
    require_trials(trials)?;
    let books = [cb1, cb2];
    let n = check_blocklengths(&books)?;
    let prepared = link.prepare(&books)?;
    let sizes = prepared.messages();
    let energies: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let msgs: Vec<usize> = sizes.iter().map(|&m| rng.random_range(0..m)).collect();
            prepared.transmit(&msgs, n, &mut rng).1
        })
        .collect();
    let (mean_energy, energy_std) = mean_and_std(&energies);
    let violations = energies.iter().filter(|&&e| e < target - eps).count();
    Ok(SimReport {
        n,
        trials,
        seed,
        mean_energy,
        energy_std,
        energy_violation_freq: Some(violations as f64 / trials as f64),
        error_rate: None,
        relay_violation_freq: None,
    })
}

/// Checks `E[b^n] ≥ (B − ε)·Pr[b^n ≥ B − ε]` with both sides replaced by
/// their empirical values. Energies are nonnegative, so this holds on every
/// sample path; a failure means the report is inconsistent.
pub fn check_energy_inequality(report: &SimReport, target: f64, eps: f64) -> bool {
    let Some(viol) = report.energy_violation_freq else {
        return false;
    };
    // rounding in the accumulated mean only
    let tol = 1e-12 * report.mean_energy.abs().max(1.0);
    report.mean_energy >= (target - eps) * (1.0 - viol) - tol
}

/// How the relay turns a received block into a transmit block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelayPolicy {
    /// Gaussian block rescaled to spend exactly the realized harvest plus
    /// `P2`.
    Scaling,
    /// I.i.d. Gaussian symbols of a fixed power, blind to the harvest.
    Fixed { power: f64 },
}

/// Sends first-hop codewords, lets the relay harvest `b^n(y1^n)` over the
/// block and then transmit a whole block (the relay sees its full harvest
/// before spending it). Relay symbols cost `x²`. Reports the harvested
/// mean and how often `(1/n) Σ x2_i² > b^n(y1^n) + P2`.
pub fn simulate_mhc_harvest(
    cb1: &Codebook,
    hop1: &Link,
    relay: RelayPolicy,
    p2: f64,
    trials: usize,
    seed: u64,
) -> Result<SimReport> {
    require_trials(trials)?;
    if p2.is_nan() || p2 < 0.0 {
        return Err(Error::NegativeValue {
            what: "P2",
            value: p2,
        });
    }
    if let RelayPolicy::Fixed { power } = relay {
        if !(power >= 0.0) {
            return Err(Error::NegativeValue {
                what: "relay power",
                value: power,
            });
        }
    }
    let n = cb1.n;
    let prepared = hop1.prepare(&[cb1])?;
    let m = cb1.messages();
    let results: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let msg = rng.random_range(0..m);
            let harvested = prepared.transmit(&[msg], n, &mut rng).1;
            let budget = harvested + p2;
            let block: Vec<f64> = match relay {
                RelayPolicy::Scaling => {
                    let z: Vec<f64> = (0..n)
                        .map(|_| rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    let power = z.iter().map(|v| v * v).sum::<f64>() / n as f64;
                    let scale = if power > 0.0 {
                        (budget / power).sqrt()
                    } else {
                        0.0
                    };
                    z.into_iter().map(|v| v * scale).collect()
                }
                RelayPolicy::Fixed { power } => {
                    let std = power.sqrt();
                    (0..n)
                        .map(|_| std * rng.sample::<f64, _>(StandardNormal))
                        .collect()
                }
            };
            let spent = block.iter().map(|v| v * v).sum::<f64>() / n as f64;
            (harvested, spent > budget * (1.0 + 1e-12) + COST_SLACK)
        })
        .collect();
    let harvested: Vec<f64> = results.iter().map(|r| r.0).collect();
    let (mean_energy, energy_std) = mean_and_std(&harvested);
    let violations = results.iter().filter(|r| r.1).count();
    Ok(SimReport {
        n,
        trials,
        seed,
        mean_energy,
        energy_std,
        energy_violation_freq: None,
        error_rate: None,
        relay_violation_freq: Some(violations as f64 / trials as f64),
    })
}

/// Joint-message error rate under exhaustive maximum-likelihood decoding.
/// Likelihood ties go to the lowest message pair.
pub fn simulate_decode(
    cb1: &Codebook,
    cb2: &Codebook,
    link: &Link,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    require_trials(trials)?;
    let books = [cb1, cb2];
    let n = check_blocklengths(&books)?;
    let pairs = cb1.messages().saturating_mul(cb2.messages());
    if pairs > MAX_DECODE_PAIRS {
        return Err(Error::SizeGuard(format!(
            "{pairs} message pairs exceed the decoding limit {MAX_DECODE_PAIRS}"
        )));
    }
    let prepared = link.prepare(&books)?;
    let sizes = prepared.messages();
    let log_rows: Option<Vec<Vec<f64>>> = match link {
        Link::Discrete { channel, .. } => Some(
            channel
                .rows()
                .iter()
                .map(|r| r.probs().iter().map(|p| p.ln()).collect())
                .collect(),
        ),
        Link::Gaussian { .. } => None,
    };
    let errors: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let msgs: Vec<usize> = sizes.iter().map(|&m| rng.random_range(0..m)).collect();
            let (y, _) = prepared.transmit(&msgs, n, &mut rng);
            let mut best = (f64::NEG_INFINITY, (usize::MAX, usize::MAX));
            for a in 0..sizes[0] {
                for b in 0..sizes[1] {
                    let score = match (&prepared, &log_rows) {
                        (Prepared::Discrete { strides, books, .. }, Some(logs)) => (0..n)
                            .map(|i| {
                                let row = books[0][a][i] * strides[0] + books[1][b][i] * strides[1];
                                match y[i] {
                                    Output::Index(j) => logs[row][j],
                                    Output::Value(_) => unreachable!(),
                                }
                            })
                            .sum::<f64>(),
                        (Prepared::Gaussian { books, .. }, None) => -(0..n)
                            .map(|i| match y[i] {
                                Output::Value(v) => (v - books[0][a][i] - books[1][b][i]).powi(2),
                                Output::Index(_) => unreachable!(),
                            })
                            .sum::<f64>(),
                        _ => unreachable!(),
                    };
                    if score > best.0 || best.1 .0 == usize::MAX {
                        best = (score, (a, b));
                    }
                }
            }
            usize::from(best.1 != (msgs[0], msgs[1]))
        })
        .sum();
    Ok(errors as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::gaussian_mac_timeshare;
    use approx::assert_abs_diff_eq;

    fn constant_mac_report(n: usize, trials: usize, seed: u64, target: f64, eps: f64) -> SimReport {
        let q = QSequence::draw(&[1.0], n, seed).unwrap();
        let pol = InputPolicy::single(SymbolSource::Constant(1.0));
        let cb = generate_codebook(&pol, &q, 0.0, &SymbolCost::Squared, 1.0, seed).unwrap();
        simulate_mac_energy(
            &cb,
            &cb,
            &Link::gaussian(1.0).unwrap(),
            target,
            eps,
            trials,
            seed,
        )
        .unwrap()
    }

    fn adder() -> DmChannel {
        let bits = Alphabet::range(2).unwrap();
        DmChannel::deterministic(vec![bits.clone(), bits], Alphabet::range(3).unwrap(), |x| {
            x[0] + x[1]
        })
        .unwrap()
    }

    #[test]
    fn degenerate_pmf_gives_constant_codewords() {
        let a = Alphabet::new(vec![-1.0, 3.0]).unwrap();
        let pol = InputPolicy::single(
            SymbolSource::from_pmf(&a, &Pmf::degenerate(2, 1).unwrap()).unwrap(),
        );
        let q = QSequence::draw(&[1.0], 20, 1).unwrap();
        let cb = generate_codebook(&pol, &q, 0.2, &SymbolCost::Squared, 9.0, 1).unwrap();
        assert_eq!(cb.messages(), 16);
        assert!(cb.codewords.iter().flatten().all(|&x| x == 3.0));
    }

    #[test]
    fn zero_cost_never_rejects() {
        let a = Alphabet::range(2).unwrap();
        let pol =
            InputPolicy::single(SymbolSource::from_pmf(&a, &Pmf::uniform(2).unwrap()).unwrap());
        let q = QSequence::draw(&[1.0], 50, 3).unwrap();
        let cost = SymbolCost::Table {
            alphabet: a,
            cost: CostFn::zero(2),
        };
        let cb = generate_codebook(&pol, &q, 0.1, &cost, 0.0, 3).unwrap();
        assert_eq!(cb.rejections, 0);
    }

    #[test]
    fn codewords_respect_budget() {
        let a = Alphabet::new(vec![-2.0, -1.0, 1.0, 2.0]).unwrap();
        let pol =
            InputPolicy::single(SymbolSource::from_pmf(&a, &Pmf::uniform(4).unwrap()).unwrap());
        let q = QSequence::draw(&[1.0], 40, 9).unwrap();
        let cb = generate_codebook(&pol, &q, 0.2, &SymbolCost::Squared, 2.5, 9).unwrap();
        assert!(cb.rejections > 0);
        for w in &cb.codewords {
            assert!(w.iter().map(|x| x * x).sum::<f64>() / 40.0 <= 2.5 + 1e-9);
        }
        let impossible = generate_codebook(&pol, &q, 0.0, &SymbolCost::Squared, 0.5, 9);
        assert!(matches!(impossible, Err(Error::Rejection(_))));
        assert!(matches!(
            generate_codebook(&pol, &q, 0.6, &SymbolCost::Squared, 2.5, 9),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn two_phase_codewords_follow_shared_q() {
        let sol = gaussian_mac_timeshare(1.0, 4.0).unwrap();
        let mut sol = sol;
        sol.lambda = 0.5;
        let pol = InputPolicy::gaussian_two_phase(&sol).unwrap();
        let q = QSequence::draw(pol.q_probs(), 100, 5).unwrap();
        let cb1 =
            generate_codebook(&pol, &q, 0.05, &SymbolCost::Squared, f64::INFINITY, 5).unwrap();
        let cb2 =
            generate_codebook(&pol, &q, 0.05, &SymbolCost::Squared, f64::INFINITY, 6).unwrap();
        let constant = sol.p_energy.sqrt();
        for cb in [&cb1, &cb2] {
            for w in &cb.codewords {
                for (x, &s) in w.iter().zip(q.symbols()) {
                    assert_eq!(s == 0, *x == constant);
                }
            }
        }
    }

    #[test]
    fn coherent_energy_is_five() {
        let r = constant_mac_report(10_000, 200, 11, 4.5, 0.1);
        assert!((r.mean_energy - 5.0).abs() < 0.1, "{}", r.mean_energy);
        assert!(check_energy_inequality(&r, 4.5, 0.1));
    }

    #[test]
    fn violations_vanish_or_saturate() {
        let short = constant_mac_report(100, 400, 2, 4.5, 0.1)
            .energy_violation_freq
            .unwrap();
        let long = constant_mac_report(10_000, 400, 2, 4.5, 0.1)
            .energy_violation_freq
            .unwrap();
        assert!(long <= short);
        assert_eq!(long, 0.0);
        let above = constant_mac_report(10_000, 100, 2, 6.0, 0.3)
            .energy_violation_freq
            .unwrap();
        assert_eq!(above, 1.0);
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(
            constant_mac_report(500, 50, 42, 4.5, 0.1),
            constant_mac_report(500, 50, 42, 4.5, 0.1)
        );
        assert_ne!(
            constant_mac_report(500, 50, 42, 4.5, 0.1),
            constant_mac_report(500, 50, 43, 4.5, 0.1)
        );
    }

    #[test]
    fn energy_inequality_edge_cases() {
        let r = constant_mac_report(100, 20, 1, 0.05, 0.05);
        assert!(check_energy_inequality(&r, 0.05, 0.05));
        let fake = SimReport {
            n: 10,
            trials: 1000,
            seed: 0,
            mean_energy: 1.0,
            energy_std: 0.1,
            energy_violation_freq: Some(0.0),
            error_rate: None,
            relay_violation_freq: None,
        };
        assert!(!check_energy_inequality(&fake, 4.0, 0.1));
    }

    #[test]
    fn discrete_mac_energy() {
        let a = Alphabet::range(2).unwrap();
        let pol =
            InputPolicy::single(SymbolSource::from_pmf(&a, &Pmf::uniform(2).unwrap()).unwrap());
        let q = QSequence::draw(&[1.0], 2000, 8).unwrap();
        let cb1 = generate_codebook(&pol, &q, 0.0, &SymbolCost::Squared, f64::INFINITY, 1).unwrap();
        let cb2 = generate_codebook(&pol, &q, 0.0, &SymbolCost::Squared, f64::INFINITY, 2).unwrap();
        let link = Link::discrete(adder(), EnergyFn::new(vec![0.0, 1.0, 2.0]).unwrap()).unwrap();
        let r = simulate_mac_energy(&cb1, &cb2, &link, 1.0, 0.05, 10, 4).unwrap();
        assert!((r.mean_energy - 1.0).abs() < 0.05);
    }

    fn hop1_codebook(p: f64, n: usize, seed: u64) -> Codebook {
        let a = Alphabet::new(vec![-2.0, -1.0, 1.0, 2.0]).unwrap();
        let pmf = Pmf::new(vec![p, 0.5 - p, 0.5 - p, p]).unwrap();
        let pol = InputPolicy::single(SymbolSource::from_pmf(&a, &pmf).unwrap());
        let q = QSequence::draw(&[1.0], n, seed).unwrap();
        generate_codebook(&pol, &q, 0.02, &SymbolCost::Squared, 4.0, seed).unwrap()
    }

    fn noiseless_hop() -> Link {
        let a = Alphabet::new(vec![-2.0, -1.0, 1.0, 2.0]).unwrap();
        Link::discrete(
            DmChannel::deterministic(vec![a.clone()], a.clone(), |x| x[0]).unwrap(),
            EnergyFn::squared(&a),
        )
        .unwrap()
    }

    #[test]
    fn scaling_relay_never_overspends() {
        let cb = hop1_codebook(0.25, 500, 1);
        let r = simulate_mhc_harvest(&cb, &noiseless_hop(), RelayPolicy::Scaling, 0.0, 2000, 1)
            .unwrap();
        assert_eq!(r.relay_violation_freq, Some(0.0));
        assert!((r.mean_energy - 2.5).abs() < 0.05);
    }

    #[test]
    fn fixed_relay_overspends_about_half_the_time() {
        let cb = hop1_codebook(0.25, 500, 2);
        let r = simulate_mhc_harvest(
            &cb,
            &noiseless_hop(),
            RelayPolicy::Fixed { power: 2.5 },
            0.0,
            2000,
            2,
        )
        .unwrap();
        let v = r.relay_violation_freq.unwrap();
        assert!((0.3..0.7).contains(&v), "{v}");
    }

    #[test]
    fn noiseless_decoding_is_perfect() {
        let a = Alphabet::range(2).unwrap();
        let pol =
            InputPolicy::single(SymbolSource::from_pmf(&a, &Pmf::uniform(2).unwrap()).unwrap());
        let q = QSequence::draw(&[1.0], 30, 1).unwrap();
        let cb1 =
            generate_codebook(&pol, &q, 0.1, &SymbolCost::Squared, f64::INFINITY, 10).unwrap();
        let mut cb2 = cb1.clone();
        cb2.codewords = vec![vec![0.0; 30]];
        let link = Link::discrete(adder(), EnergyFn::zero(3)).unwrap();
        let words = &cb1.codewords;
        assert!((0..words.len()).all(|i| (0..i).all(|j| words[i] != words[j])));
        assert_eq!(simulate_decode(&cb1, &cb2, &link, 50, 3).unwrap(), 0.0);
    }

    #[test]
    fn identical_codewords_cause_errors() {
        let a = Alphabet::range(2).unwrap();
        let pol =
            InputPolicy::single(SymbolSource::from_pmf(&a, &Pmf::uniform(2).unwrap()).unwrap());
        let q = QSequence::draw(&[1.0], 30, 1).unwrap();
        let mut cb1 =
            generate_codebook(&pol, &q, 0.1, &SymbolCost::Squared, f64::INFINITY, 10).unwrap();
        cb1.codewords[1] = cb1.codewords[0].clone();
        let mut cb2 = cb1.clone();
        cb2.codewords = vec![vec![0.0; 30]];
        let link = Link::discrete(adder(), EnergyFn::zero(3)).unwrap();
        let rate = simulate_decode(&cb1, &cb2, &link, 2000, 3).unwrap();
        assert!(rate >= 1.0 / (2.0 * cb1.messages() as f64), "{rate}");
    }

    #[test]
    fn low_rate_random_code_decodes() {
        let a = Alphabet::range(2).unwrap();
        let pol =
            InputPolicy::single(SymbolSource::from_pmf(&a, &Pmf::uniform(2).unwrap()).unwrap());
        let q = QSequence::draw(&[1.0], 200, 4).unwrap();
        let cb1 =
            generate_codebook(&pol, &q, 0.03, &SymbolCost::Squared, f64::INFINITY, 20).unwrap();
        let cb2 =
            generate_codebook(&pol, &q, 0.03, &SymbolCost::Squared, f64::INFINITY, 21).unwrap();
        // noisy adder: each output flips to a neighbor with probability 0.1
        let bits = Alphabet::range(2).unwrap();
        let ch = DmChannel::new(
            vec![bits.clone(), bits],
            Alphabet::range(3).unwrap(),
            vec![
                vec![0.9, 0.1, 0.0],
                vec![0.05, 0.9, 0.05],
                vec![0.05, 0.9, 0.05],
                vec![0.0, 0.1, 0.9],
            ],
        )
        .unwrap();
        let link = Link::discrete(ch, EnergyFn::zero(3)).unwrap();
        assert!(simulate_decode(&cb1, &cb2, &link, 100, 5).unwrap() < 0.1);
        let big =
            generate_codebook(&pol, &q, 0.06, &SymbolCost::Squared, f64::INFINITY, 20).unwrap();
        assert!(matches!(
            simulate_decode(&big, &big, &link, 1, 5),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn gaussian_link_decodes_separated_constants() {
        let q = QSequence::draw(&[1.0], 20, 1).unwrap();
        let mut cb = generate_codebook(
            &InputPolicy::single(SymbolSource::Constant(0.0)),
            &q,
            0.0,
            &SymbolCost::Squared,
            f64::INFINITY,
            1,
        )
        .unwrap();
        cb.codewords = vec![vec![-3.0; 20], vec![3.0; 20]];
        let zero = Codebook {
            codewords: vec![vec![0.0; 20]],
            ..cb.clone()
        };
        assert_abs_diff_eq!(
            simulate_decode(&cb, &zero, &Link::gaussian(1.0).unwrap(), 100, 2).unwrap(),
            0.0
        );
    }
}
