//! TOML channel files.
//!
//! ```toml
//! input_alphabets = [[-2, -1, 1, 2]]       # one list per input
//! output_alphabet = [-2, -1, 1, 2]
//! transition = [                          # one row per input tuple,
//!   [1, 0, 0, 0],                         # last input varying fastest
//!   [0, 1, 0, 0],
//!   [0, 0, 1, 0],
//!   [0, 0, 0, 1],
//! ]
//! cost = [[4, 1, 1, 4]]                    # one list per input
//! energy = [4, 1, 1, 4]                    # one value per output
//! ```
//!
//! Every key is required and unknown keys are rejected. Diagnostics carry
//! the line of the offending row or key.

use super::{Alphabet, CostFn, DmChannel, EnergyFn, Pmf, PMF_TOLERANCE};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use toml::Spanned;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    input_alphabets: Spanned<Vec<Spanned<Vec<f64>>>>,
    output_alphabet: Spanned<Vec<f64>>,
    transition: Spanned<Vec<Spanned<Vec<f64>>>>,
    cost: Spanned<Vec<Spanned<Vec<f64>>>>,
    energy: Spanned<Vec<f64>>,
}

/// A validated channel with its cost tables (one per input) and energy
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub channel: DmChannel,
    pub costs: Vec<CostFn>,
    pub energy: EnergyFn,
}

fn line_of(text: &str, offset: usize) -> usize {
    1 + text[..offset.min(text.len())]
        .bytes()
        .filter(|&b| b == b'\n')
        .count()
}

pub fn parse_channel(text: &str) -> Result<ChannelSpec> {
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::ChannelFile {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    let at = |span: std::ops::Range<usize>, message: String| Error::ChannelFile {
        line: line_of(text, span.start),
        message,
    };

    let mut inputs = Vec::new();
    for a in raw.input_alphabets.get_ref() {
        inputs.push(Alphabet::new(a.get_ref().clone()).map_err(|e| at(a.span(), e.to_string()))?);
    }
    if !(1..=2).contains(&inputs.len()) {
        return Err(at(
            raw.input_alphabets.span(),
            format!("expected 1 or 2 input alphabets, found {}", inputs.len()),
        ));
    }
    let output = Alphabet::new(raw.output_alphabet.get_ref().clone())
        .map_err(|e| at(raw.output_alphabet.span(), e.to_string()))?;

    let expected_rows: usize = inputs.iter().map(Alphabet::len).product();
    let rows = raw.transition.get_ref();
    if rows.len() != expected_rows {
        return Err(at(
            raw.transition.span(),
            format!(
                "transition has {} rows, expected {expected_rows}",
                rows.len()
            ),
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        let r = row.get_ref();
        if r.len() != output.len() {
            return Err(at(
                row.span(),
                format!("row {i} has {} entries, expected {}", r.len(), output.len()),
            ));
        }
        if let Some(v) = r.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(at(
                row.span(),
                format!("row {i} has a negative or non-finite entry {v}"),
            ));
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > PMF_TOLERANCE {
            return Err(at(row.span(), format!("row {i} sums to {sum}, not 1")));
        }
    }
    let channel = DmChannel::new(
        inputs,
        output,
        rows.iter().map(|r| r.get_ref().clone()).collect(),
    )
    .map_err(|e| at(raw.transition.span(), e.to_string()))?;

    let cost_lists = raw.cost.get_ref();
    if cost_lists.len() != channel.num_inputs() {
        return Err(at(
            raw.cost.span(),
            format!(
                "expected {} cost lists, found {}",
                channel.num_inputs(),
                cost_lists.len()
            ),
        ));
    }
    let mut costs = Vec::new();
    for (k, list) in cost_lists.iter().enumerate() {
        if list.get_ref().len() != channel.input(k).len() {
            return Err(at(
                list.span(),
                format!(
                    "cost list {k} has {} entries, input alphabet has {}",
                    list.get_ref().len(),
                    channel.input(k).len()
                ),
            ));
        }
        costs
            .push(CostFn::new(list.get_ref().clone()).map_err(|e| at(list.span(), e.to_string()))?);
    }
    if raw.energy.get_ref().len() != channel.output().len() {
        return Err(at(
            raw.energy.span(),
            format!(
                "energy has {} entries, output alphabet has {}",
                raw.energy.get_ref().len(),
                channel.output().len()
            ),
        ));
    }
    let energy = EnergyFn::new(raw.energy.get_ref().clone())
        .map_err(|e| at(raw.energy.span(), e.to_string()))?;
    Ok(ChannelSpec {
        channel,
        costs,
        energy,
    })
}

pub fn load_channel(path: impl AsRef<Path>) -> Result<ChannelSpec> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_channel(&text)
}

#[derive(Serialize)]
struct PmfFile<'a> {
    alphabet: &'a [f64],
    pmf: &'a [f64],
}

/// A pmf in the same TOML conventions as channel files.
pub fn pmf_to_toml(alphabet: &Alphabet, pmf: &Pmf) -> Result<String> {
    if alphabet.len() != pmf.len() {
        return Err(Error::AlphabetMismatch {
            expected: alphabet.len(),
            found: pmf.len(),
        });
    }
    toml::to_string(&PmfFile {
        alphabet: alphabet.symbols(),
        pmf: pmf.probs(),
    })
    .map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOP1: &str = "\
input_alphabets = [[-2, -1, 1, 2]]
output_alphabet = [-2, -1, 1, 2]
transition = [
  [1, 0, 0, 0],
  [0, 1, 0, 0],
  [0, 0, 1, 0],
  [0, 0, 0, 1],
]
cost = [[4, 1, 1, 4]]
energy = [4, 1, 1, 4]
";

    fn line(err: Error) -> usize {
        match err {
            Error::ChannelFile { line, .. } => line,
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn loads_noiseless_hop() {
        let spec = parse_channel(HOP1).unwrap();
        for x in 0..4 {
            let row = spec.channel.row(x);
            assert!(row
                .iter()
                .enumerate()
                .all(|(y, &w)| w == if x == y { 1.0 } else { 0.0 }));
        }
        assert_eq!(spec.costs[0].values(), &[4.0, 1.0, 1.0, 4.0]);
        assert_eq!(spec.energy.values(), &[4.0, 1.0, 1.0, 4.0]);
    }

    #[test]
    fn bad_row_sum_points_at_row() {
        let text = HOP1.replace("[0, 0, 1, 0]", "[0, 0, 0.9, 0]");
        assert_eq!(line(parse_channel(&text).unwrap_err()), 6);
    }

    #[test]
    fn ragged_matrix_rejected() {
        let text = HOP1.replace("[0, 1, 0, 0]", "[0, 1, 0]");
        assert_eq!(line(parse_channel(&text).unwrap_err()), 5);
    }

    #[test]
    fn negative_entry_rejected() {
        let text = HOP1.replace("[1, 0, 0, 0]", "[1.5, -0.5, 0, 0]");
        assert_eq!(line(parse_channel(&text).unwrap_err()), 4);
    }

    #[test]
    fn missing_and_unknown_keys() {
        assert!(matches!(parse_channel(""), Err(Error::ChannelFile { .. })));
        let missing = HOP1.replace("energy = [4, 1, 1, 4]\n", "");
        assert!(matches!(
            parse_channel(&missing),
            Err(Error::ChannelFile { .. })
        ));
        let extra = format!("{HOP1}gain = 2\n");
        assert_eq!(line(parse_channel(&extra).unwrap_err()), 11);
    }

    #[test]
    fn mac_file() {
        let text = "\
input_alphabets = [[0, 1], [0, 1]]
output_alphabet = [0, 1, 2]
transition = [[1, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 1]]
cost = [[0, 0], [0, 0]]
energy = [0, 1, 2]
";
        let spec = parse_channel(text).unwrap();
        assert!(spec.channel.is_mac());
        assert_eq!(spec.channel.mac_row(1, 1), &[0.0, 0.0, 1.0]);
        let wrong_rows = text.replace("[0, 0, 1]]", "]");
        assert_eq!(line(parse_channel(&wrong_rows).unwrap_err()), 3);
    }

    #[test]
    fn pmf_round_trip_format() {
        let a = Alphabet::new(vec![-1.0, 1.0]).unwrap();
        let s = pmf_to_toml(&a, &Pmf::uniform(2).unwrap()).unwrap();
        assert!(s.contains("alphabet = [-1.0, 1.0]"));
        assert!(s.contains("pmf = [0.5, 0.5]"));
    }
}
