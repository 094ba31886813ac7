//! Finite-alphabet probability and channel primitives.
//!
//! Every solver in the crate works on the types defined here: an ordered
//! [`Alphabet`] of real signal levels, a [`Pmf`] aligned with it, a
//! discrete memoryless channel [`DmChannel`] with one input (point to point)
//! or two inputs (multiple access), and per-symbol cost and energy tables.
//! All of them validate on construction and are immutable afterwards.

mod file;

pub use file::{load_channel, parse_channel, pmf_to_toml, ChannelSpec};

use crate::error::{Error, Result};

/// Absolute tolerance on the total mass of a pmf.
pub const PMF_TOLERANCE: f64 = 1e-9;

/// Entries this close below zero are treated as rounding noise.
const NEGATIVE_NOISE: f64 = 1e-12;

/// Ordered list of distinct real symbols. Indexing is by position.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    symbols: Vec<f64>,
}

impl Alphabet {
    pub fn new(symbols: Vec<f64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if let Some(s) = symbols.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidAlphabet(format!("symbol {s} is not finite")));
        }
        for (i, a) in symbols.iter().enumerate() {
            if symbols[i + 1..].contains(a) {
                return Err(Error::InvalidAlphabet(format!("symbol {a} is repeated")));
            }
        }
        Ok(Self { symbols })
    }

    /// `{0, 1, ..., k-1}`.
    pub fn range(k: usize) -> Result<Self> {
        Self::new((0..k).map(|i| i as f64).collect())
    }

    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: f64) -> Option<usize> {
        self.symbols.iter().position(|&s| s == symbol)
    }
}

/// Probability mass function over the positions of an alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates and renormalizes `probs`. Mass off by more than
    /// [`PMF_TOLERANCE`] is rejected rather than rescaled.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("pmf is empty".into()));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -NEGATIVE_NOISE {
                return Err(Error::InvalidPmf(format!("entry {p} is not a probability")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidPmf(format!("entries sum to {total}, not 1")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidPmf("pmf is empty".into()));
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
        })
    }

    /// Point mass at position `at` of a `k`-symbol alphabet.
    pub fn degenerate(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(Error::InvalidPmf(format!("index {at} outside {k} symbols")));
        }
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    /// `weight * a + (1 - weight) * b`.
    pub fn mix(a: &Pmf, b: &Pmf, weight: f64) -> Result<Self> {
        check_len(a.len(), b.len())?;
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(format!("mixing weight {weight}")));
        }
        Self::new(
            a.probs
                .iter()
                .zip(&b.probs)
                .map(|(x, y)| weight * x + (1.0 - weight) * y)
                .collect(),
        )
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Σ p(x)·v(x) for a table aligned with this pmf.
    pub fn expect(&self, values: &[f64]) -> Result<f64> {
        check_len(self.len(), values.len())?;
        Ok(self.probs.iter().zip(values).map(|(p, v)| p * v).sum())
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch { expected, found })
    }
}

fn nonnegative_table(what: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        Some(&value) => Err(Error::NegativeValue { what, value }),
        None => Ok(()),
    }
}

/// Per-input-symbol transmit cost, energy units per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFn {
    values: Vec<f64>,
}

impl CostFn {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        nonnegative_table("cost", &values)?;
        Ok(Self { values })
    }

    pub fn zero(k: usize) -> Self {
        Self {
            values: vec![0.0; k],
        }
    }

    pub fn from_fn(alphabet: &Alphabet, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(alphabet.symbols().iter().map(|&x| f(x)).collect())
    }

    /// `c(x) = x²`.
    pub fn squared(alphabet: &Alphabet) -> Self {
        Self {
            values: alphabet.symbols().iter().map(|x| x * x).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Per-output-symbol received (harvested) energy.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFn {
    values: Vec<f64>,
}

impl EnergyFn {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        nonnegative_table("energy", &values)?;
        Ok(Self { values })
    }

    pub fn zero(k: usize) -> Self {
        Self {
            values: vec![0.0; k],
        }
    }

    pub fn from_fn(alphabet: &Alphabet, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(alphabet.symbols().iter().map(|&y| f(y)).collect())
    }

    /// `b(y) = y²`.
    pub fn squared(alphabet: &Alphabet) -> Self {
        Self {
            values: alphabet.symbols().iter().map(|y| y * y).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// The same table viewed as a cost on the output alphabet.
    pub fn as_cost(&self) -> CostFn {
        CostFn {
            values: self.values.clone(),
        }
    }
}

/// Additive white Gaussian noise with variance `N0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnSpec {
    noise_var: f64,
}

impl AwgnSpec {
    pub fn new(noise_var: f64) -> Result<Self> {
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be positive (got {noise_var})"
            )));
        }
        Ok(Self { noise_var })
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }
}

/// Discrete memoryless channel `p(y | x)` or `p(y | x1, x2)`.
///
/// Rows are indexed by the input tuple in lexicographic order of the input
/// alphabets (the last input varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct DmChannel {
    inputs: Vec<Alphabet>,
    output: Alphabet,
    rows: Vec<Pmf>,
}

impl DmChannel {
    pub fn new(inputs: Vec<Alphabet>, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() > 2 {
            return Err(Error::InvalidChannel(format!(
                "expected one or two input alphabets, got {}",
                inputs.len()
            )));
        }
        let tuples: usize = inputs.iter().map(Alphabet::len).product();
        if rows.len() != tuples {
            return Err(Error::InvalidChannel(format!(
                "transition matrix has {} rows, expected {tuples}",
                rows.len()
            )));
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                if row.len() != output.len() {
                    return Err(Error::InvalidChannel(format!(
                        "row {i} has {} entries, expected {}",
                        row.len(),
                        output.len()
                    )));
                }
                Pmf::new(row).map_err(|e| Error::InvalidChannel(format!("row {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            inputs,
            output,
            rows,
        })
    }

    /// Noiseless channel `y = f(x...)`; every image must be in `output`.
    pub fn deterministic(
        inputs: Vec<Alphabet>,
        output: Alphabet,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let mut rows = Vec::new();
        for tuple in input_tuples(&inputs) {
            let y = f(&tuple);
            let at = output.index_of(y).ok_or_else(|| {
                Error::InvalidChannel(format!("output {y} of input {tuple:?} not in alphabet"))
            })?;
            let mut row = vec![0.0; output.len()];
            row[at] = 1.0;
            rows.push(row);
        }
        Self::new(inputs, output, rows)
    }

    /// Binary symmetric channel on `{0, 1}` with the given crossover.
    pub fn binary_symmetric(crossover: f64) -> Result<Self> {
        let bits = Alphabet::range(2)?;
        Self::new(
            vec![bits.clone()],
            bits,
            vec![
                vec![1.0 - crossover, crossover],
                vec![crossover, 1.0 - crossover],
            ],
        )
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_mac(&self) -> bool {
        self.inputs.len() == 2
    }

    pub fn input(&self, k: usize) -> &Alphabet {
        &self.inputs[k]
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }

    /// Transition row of a point-to-point channel.
    pub fn row(&self, x: usize) -> &[f64] {
        self.rows[x].probs()
    }

    /// Transition row of a MAC for the input pair `(x1, x2)`.
    pub fn mac_row(&self, x1: usize, x2: usize) -> &[f64] {
        self.rows[x1 * self.inputs[1].len() + x2].probs()
    }

    pub(crate) fn require_point_to_point(&self) -> Result<()> {
        if self.is_mac() {
            Err(Error::InvalidChannel(
                "expected a point-to-point channel".into(),
            ))
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_mac(&self) -> Result<()> {
        if self.is_mac() {
            Ok(())
        } else {
            Err(Error::InvalidChannel("expected a two-input channel".into()))
        }
    }
}

/// All input tuples in row order.
fn input_tuples(inputs: &[Alphabet]) -> Vec<Vec<f64>> {
    let mut tuples = vec![Vec::new()];
    for alphabet in inputs {
        tuples = tuples
            .into_iter()
            .flat_map(|prefix| {
                alphabet.symbols().iter().map(move |&s| {
                    let mut t = prefix.clone();
                    t.push(s);
                    t
                })
            })
            .collect();
    }
    tuples
}

/// E[c(X)] under `p`.
pub fn expected_cost(p: &Pmf, c: &CostFn) -> Result<f64> {
    p.expect(c.values())
}

/// Output pmf of a point-to-point channel driven by `p`.
pub fn output_pmf(p: &Pmf, ch: &DmChannel) -> Result<Pmf> {
    ch.require_point_to_point()?;
    check_len(ch.input(0).len(), p.len())?;
    let mut out = vec![0.0; ch.output().len()];
    for (x, &px) in p.probs().iter().enumerate() {
        for (o, w) in out.iter_mut().zip(ch.row(x)) {
            *o += px * w;
        }
    }
    Pmf::new(out)
}

/// p(y) = Σ p1(x1) p2(x2) p(y | x1, x2) for independent inputs.
pub fn mac_output_pmf(p1: &Pmf, p2: &Pmf, ch: &DmChannel) -> Result<Pmf> {
    ch.require_mac()?;
    check_len(ch.input(0).len(), p1.len())?;
    check_len(ch.input(1).len(), p2.len())?;
    let mut out = vec![0.0; ch.output().len()];
    for (x1, &a) in p1.probs().iter().enumerate() {
        for (x2, &b) in p2.probs().iter().enumerate() {
            let w = a * b;
            if w == 0.0 {
                continue;
            }
            for (o, t) in out.iter_mut().zip(ch.mac_row(x1, x2)) {
                *o += w * t;
            }
        }
    }
    Pmf::new(out)
}

/// E[b(Y)] under the output pmf induced by independent inputs.
pub fn expected_received_energy(p1: &Pmf, p2: &Pmf, ch: &DmChannel, b: &EnergyFn) -> Result<f64> {
    check_len(ch.output().len(), b.len())?;
    mac_output_pmf(p1, p2, ch)?.expect(b.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn adder() -> DmChannel {
        let bits = Alphabet::range(2).unwrap();
        DmChannel::deterministic(vec![bits.clone(), bits], Alphabet::range(3).unwrap(), |x| {
            x[0] + x[1]
        })
        .unwrap()
    }

    fn four_ary() -> Alphabet {
        Alphabet::new(vec![-2.0, -1.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn alphabet_rejects_empty_and_repeats() {
        assert!(Alphabet::new(vec![]).is_err());
        assert!(Alphabet::new(vec![1.0, 2.0, 1.0]).is_err());
        assert!(Alphabet::new(vec![f64::NAN]).is_err());
        assert_eq!(four_ary().index_of(1.0), Some(2));
    }

    #[test]
    fn pmf_normalizes_within_tolerance_and_rejects_beyond() {
        let p = Pmf::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert_abs_diff_eq!(p.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert!(Pmf::new(vec![0.5, 0.5 + 1e-8]).is_err());
        assert!(Pmf::new(vec![1.5, -0.5]).is_err());
        assert!(Pmf::new(vec![]).is_err());
        assert_eq!(Pmf::new(vec![1.0, -1e-13]).unwrap().probs(), &[1.0, 0.0]);
    }

    #[test]
    fn cost_and_energy_reject_negative_entries() {
        assert!(CostFn::new(vec![1.0, -0.1]).is_err());
        assert!(EnergyFn::new(vec![f64::INFINITY]).is_err());
        assert!(AwgnSpec::new(0.0).is_err());
    }

    #[test]
    fn channel_rows_must_be_pmfs() {
        let bits = Alphabet::range(2).unwrap();
        let bad = DmChannel::new(
            vec![bits.clone()],
            bits.clone(),
            vec![vec![0.9, 0.0], vec![0.0, 1.0]],
        );
        assert!(matches!(bad, Err(Error::InvalidChannel(_))));
        let ragged = DmChannel::new(vec![bits.clone()], bits, vec![vec![1.0], vec![0.0, 1.0]]);
        assert!(ragged.is_err());
    }

    #[test]
    fn expected_cost_examples() {
        let c = CostFn::squared(&four_ary());
        assert_abs_diff_eq!(
            expected_cost(&Pmf::uniform(4).unwrap(), &c).unwrap(),
            2.5,
            epsilon = 1e-12
        );
        let zero = Alphabet::new(vec![0.0, 1.0]).unwrap();
        let point = Pmf::degenerate(2, 0).unwrap();
        assert_eq!(expected_cost(&point, &CostFn::squared(&zero)).unwrap(), 0.0);
        // E[X²] = 6p + 1 for (p, ½ − p, ½ − p, p)
        let p = 0.25;
        let sym = Pmf::new(vec![p, 0.5 - p, 0.5 - p, p]).unwrap();
        assert_abs_diff_eq!(
            expected_cost(&sym, &c).unwrap(),
            6.0 * p + 1.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            expected_cost(&Pmf::uniform(3).unwrap(), &c),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn adder_output_pmf_examples() {
        let ch = adder();
        let u = Pmf::uniform(2).unwrap();
        let zero = Pmf::degenerate(2, 0).unwrap();
        let one = Pmf::degenerate(2, 1).unwrap();
        let out = mac_output_pmf(&u, &u, &ch).unwrap();
        for (a, b) in out.probs().iter().zip([0.25, 0.5, 0.25]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert_eq!(
            mac_output_pmf(&zero, &zero, &ch).unwrap().probs(),
            &[1.0, 0.0, 0.0]
        );
        let out = mac_output_pmf(&u, &one, &ch).unwrap();
        for (a, b) in out.probs().iter().zip([0.0, 0.5, 0.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        assert!(mac_output_pmf(&Pmf::uniform(3).unwrap(), &u, &ch).is_err());
    }

    #[test]
    fn adder_received_energy_examples() {
        let ch = adder();
        let b = EnergyFn::from_fn(ch.output(), |y| y).unwrap();
        let u = Pmf::uniform(2).unwrap();
        let zero = Pmf::degenerate(2, 0).unwrap();
        let one = Pmf::degenerate(2, 1).unwrap();
        assert_abs_diff_eq!(
            expected_received_energy(&u, &u, &ch, &b).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_eq!(
            expected_received_energy(&zero, &zero, &ch, &b).unwrap(),
            0.0
        );
        assert_eq!(expected_received_energy(&one, &one, &ch, &b).unwrap(), 2.0);
    }

    fn random_pmf(k: usize) -> impl Strategy<Value = Pmf> {
        prop::collection::vec(0.0f64..1.0, k).prop_filter_map("zero mass", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| Pmf::new(w.iter().map(|x| x / s).collect()).unwrap())
        })
    }

    fn random_mac() -> impl Strategy<Value = DmChannel> {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, 3), 6).prop_map(|rows| {
            let rows = rows
                .into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|x| x / s).collect()
                })
                .collect();
            DmChannel::new(
                vec![Alphabet::range(2).unwrap(), Alphabet::range(3).unwrap()],
                Alphabet::range(3).unwrap(),
                rows,
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn output_pmf_is_normalized(p1 in random_pmf(2), p2 in random_pmf(3), ch in random_mac()) {
            let out = mac_output_pmf(&p1, &p2, &ch).unwrap();
            prop_assert!((out.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(out.probs().iter().all(|&p| p >= 0.0));
        }

        #[test]
        fn received_energy_is_cost_of_output(
            p1 in random_pmf(2),
            p2 in random_pmf(3),
            ch in random_mac(),
            b in prop::collection::vec(0.0f64..5.0, 3),
        ) {
            let b = EnergyFn::new(b).unwrap();
            let direct = expected_received_energy(&p1, &p2, &ch, &b).unwrap();
            let out = mac_output_pmf(&p1, &p2, &ch).unwrap();
            let via_cost = expected_cost(&out, &b.as_cost()).unwrap();
            prop_assert!((direct - via_cost).abs() < 1e-12);
            prop_assert!(direct >= 0.0);
        }
    }
}
