//! Command line front end. Each subcommand writes one CSV table to `--out`
//! (or standard output); nothing is written when a run fails.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 infeasible problem,
//! 4 unreadable or malformed channel file.

use crate::channel::{
    load_channel, pmf_to_toml, Alphabet, AwgnSpec, ChannelSpec, CostFn, DmChannel, EnergyFn, Pmf,
};
use crate::error::{Error, Result};
use crate::mac::{
    gaussian_mac_sweep, gaussian_mac_timeshare, mac_boundary_point, mac_region_sweep, MacProblem,
    SearchGrid, Weights,
};
use crate::mhc::{
    mhc_capacity, mhc_example_capacity, mhc_example_sweep, snr_to_noise, MhcGrid, MhcProblem,
    SecondHop, SecondHopInput, SnrScale,
};
use crate::sim::{
    generate_codebook, simulate_decode, simulate_mac_energy, simulate_mhc_harvest, InputPolicy,
    Link, QSequence, RelayPolicy, SimReport, SymbolCost, SymbolSource,
};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CHANNEL_FILE: i32 = 4;

/// Default ε as a fraction of the energy target.
const DEFAULT_EPS_FRACTION: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "capenergy",
    version,
    about = "Capacity-energy regions and link simulations"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boundary of the DM-MAC capacity-energy region over a grid of energy targets.
    MacRegion(MacRegionArgs),
    /// Gaussian MAC sum rate versus energy target, with and without time sharing.
    GaussianMac(GaussianMacArgs),
    /// Capacity-energy function of a two-hop channel with a harvesting relay.
    Mhc(MhcArgs),
    /// Noiseless 4-ary first hop and AWGN second hop, swept over SNR.
    MhcExample(MhcExampleArgs),
    /// Monte Carlo energy (and decoding) check on a MAC.
    SimulateMac(SimulateMacArgs),
    /// Monte Carlo check of the relay harvesting budget.
    SimulateMhc(SimulateMhcArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output CSV path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MacRegionArgs {
    /// Two-input channel file.
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long = "P1", default_value_t = f64::INFINITY)]
    pub p1: f64,
    #[arg(long = "P2", default_value_t = f64::INFINITY)]
    pub p2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_min: f64,
    /// Default: the largest reachable E[b(Y)].
    #[arg(long, allow_negative_numbers = true)]
    pub b_max: Option<f64>,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    #[arg(long, default_value_t = 4)]
    pub q_size: usize,
    /// Seed for the random restarts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GaussianMacArgs {
    /// Per-user power; repeat for several curves (default 0.5, 1, 2).
    #[arg(long = "P")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_min: f64,
    /// Default: 4P + 1 for the largest P.
    #[arg(long, allow_negative_numbers = true)]
    pub b_max: Option<f64>,
    #[arg(long, default_value_t = 51)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MhcArgs {
    /// First-hop channel file, optionally followed by a second-hop file.
    /// With one file the second hop is AWGN with noise set by --snr-min.
    #[arg(long, num_args = 1)]
    pub channel: Vec<PathBuf>,
    #[arg(long = "P1", default_value_t = f64::INFINITY)]
    pub p1: f64,
    #[arg(long = "P2", default_value_t = 0.0)]
    pub p2: f64,
    /// SNR of an AWGN second hop (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub snr_min: Option<f64>,
    /// Read SNR in decibels rather than 10·log₂(1/N0).
    #[arg(long)]
    pub snr_log10: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MhcExampleArgs {
    #[arg(long = "P1", default_value_t = 4.0)]
    pub p1: f64,
    #[arg(long = "P2", default_value_t = 0.0)]
    pub p2: f64,
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
    pub snr_min: f64,
    #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
    pub snr_max: f64,
    #[arg(long, default_value_t = 81)]
    pub steps: usize,
    #[arg(long)]
    pub snr_log10: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateMacArgs {
    /// Two-input channel file; without it the Gaussian MAC is simulated.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Gaussian per-user power.
    #[arg(long = "P", default_value_t = 1.0)]
    pub p: f64,
    #[arg(long = "P1", default_value_t = f64::INFINITY)]
    pub p1: f64,
    #[arg(long = "P2", default_value_t = f64::INFINITY)]
    pub p2: f64,
    /// Energy target B (Gaussian default 4P + 1, discrete default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub b_min: Option<f64>,
    #[arg(long, default_value_t = 4)]
    pub q_size: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Slack in the energy condition (default 0.05·B).
    #[arg(long)]
    pub eps: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateMhcArgs {
    /// First-hop channel file (default: noiseless 4-ary hop with x² cost
    /// and y² energy).
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long = "P1", default_value_t = 4.0)]
    pub p1: f64,
    #[arg(long = "P2", default_value_t = 0.0)]
    pub p2: f64,
    /// SNR of the AWGN second hop used to choose the first-hop input.
    #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
    pub snr_min: f64,
    #[arg(long)]
    pub snr_log10: bool,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

/// Formats like C's `%g`: six significant digits, trailing zeros dropped.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

fn linspace(min: f64, max: f64, steps: usize, what: &str) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{what} range must be finite"
        )));
    }
    if min > max {
        return Err(Error::InvalidArgument(format!(
            "{what} range has min {min} > max {max}"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument("--steps must be at least 2".into()));
    }
    let last = steps - 1;
    Ok((0..steps)
        .map(|i| {
            if i == last {
                max
            } else {
                min + (max - min) * i as f64 / last as f64
            }
        })
        .collect())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Infeasible(_) | Error::Rejection(_) => EXIT_INFEASIBLE,
        // reading a channel file is the only i/o before output is written
        Error::ChannelFile { .. } | Error::Io(_) => EXIT_CHANNEL_FILE,
        _ => EXIT_USAGE,
    }
}

fn noise_from_snr(snr: f64, log10: bool) -> f64 {
    snr_to_noise(
        snr,
        if log10 {
            SnrScale::Decibel
        } else {
            SnrScale::Log2
        },
    )
}

/// What a successful run writes.
struct Artifacts {
    csv: String,
    /// Extra file written next to `--out`, as (suffix, contents).
    sidecar: Option<(&'static str, String)>,
}

impl Artifacts {
    fn csv(csv: String) -> Self {
        Self { csv, sidecar: None }
    }
}

fn mac_region(a: &MacRegionArgs) -> Result<Artifacts> {
    let spec = load_channel(&a.channel)?;
    if !spec.channel.is_mac() {
        return Err(Error::ChannelFile {
            line: 1,
            message: "mac-region needs a channel with two inputs".into(),
        });
    }
    let prob = MacProblem::new(
        spec.channel,
        spec.costs[0].clone(),
        spec.costs[1].clone(),
        spec.energy,
        a.p1,
        a.p2,
        None,
    )?;
    let b_max = match a.b_max {
        Some(b) => b,
        None => prob.max_energy().ok_or_else(|| {
            Error::Infeasible("cost budgets are below the cheapest input symbols".into())
        })?,
    };
    let grid = linspace(a.b_min, b_max, a.steps, "B")?;
    let weights = [
        Weights::sum_rate(),
        Weights::new(1.0, 0.0)?,
        Weights::new(0.0, 1.0)?,
    ];
    let search = SearchGrid {
        seed: a.seed,
        ..SearchGrid::default()
    };
    let rows = mac_region_sweep(&prob, &grid, &weights, a.q_size, &search)?;
    if rows.iter().all(|r| r.point.is_none()) {
        return Err(Error::Infeasible(
            "no energy target in the grid is reachable".into(),
        ));
    }
    let mut csv = String::from("B,w1,w2,R1,R2,energy,feasible\n");
    for r in rows {
        let (r1, r2, e, ok) = match &r.point {
            Some(p) => (p.triple.r1, p.triple.r2, p.triple.energy, 1),
            None => (f64::NAN, f64::NAN, f64::NAN, 0),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{ok}",
            fmt_g(r.energy_target),
            fmt_g(r.weights.w1()),
            fmt_g(r.weights.w2()),
            fmt_g(r1),
            fmt_g(r2),
            fmt_g(e)
        );
    }
    Ok(Artifacts::csv(csv))
}

fn gaussian_mac(a: &GaussianMacArgs) -> Result<Artifacts> {
    let powers = if a.p.is_empty() {
        vec![0.5, 1.0, 2.0]
    } else {
        a.p.clone()
    };
    if let Some(&p) = powers.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "power {p} must be nonnegative"
        )));
    }
    let top = powers.iter().copied().fold(0.0, f64::max);
    let grid = linspace(a.b_min, a.b_max.unwrap_or(4.0 * top + 1.0), a.steps, "B")?;
    if a.b_min < 0.0 {
        return Err(Error::InvalidArgument(
            "energy targets must be nonnegative".into(),
        ));
    }
    let rows = gaussian_mac_sweep(&powers, &grid)?;
    if rows.iter().all(|r| r.timeshare.is_none()) {
        return Err(Error::Infeasible(
            "every energy target exceeds 4P + 1".into(),
        ));
    }
    let mut csv = String::from("P,B,R_timeshare,lambda,P_prime,P_dprime,R_no_ts,feasible\n");
    for r in rows {
        let ts = r.timeshare;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt_g(r.p),
            fmt_g(r.b),
            fmt_g(ts.map_or(f64::NAN, |s| s.sum_rate)),
            fmt_g(ts.map_or(f64::NAN, |s| s.lambda)),
            fmt_g(ts.map_or(f64::NAN, |s| s.p_info)),
            fmt_g(ts.map_or(f64::NAN, |s| s.p_energy)),
            fmt_g(r.r_no_timeshare),
            u8::from(r.no_timeshare_feasible)
        );
    }
    Ok(Artifacts::csv(csv))
}

fn point_to_point(spec: ChannelSpec, path: &Path) -> Result<(DmChannel, CostFn, EnergyFn)> {
    if spec.channel.is_mac() {
        return Err(Error::ChannelFile {
            line: 1,
            message: format!("{}: expected a single-input channel", path.display()),
        });
    }
    let mut costs = spec.costs;
    Ok((spec.channel, costs.remove(0), spec.energy))
}

fn pmf_table(name: &str, alphabet: &Alphabet, pmf: &Pmf) -> Result<String> {
    Ok(format!("[{name}]\n{}", pmf_to_toml(alphabet, pmf)?))
}

fn mhc(a: &MhcArgs) -> Result<Artifacts> {
    let (first, second) = match a.channel.as_slice() {
        [one] => (one, None),
        [one, two] => (one, Some(two)),
        _ => {
            return Err(Error::InvalidArgument(
                "mhc takes one or two --channel files".into(),
            ))
        }
    };
    let (hop1, c1, b) = point_to_point(load_channel(first)?, first)?;
    let hop2 = match second {
        Some(path) => {
            let (channel, cost, _) = point_to_point(load_channel(path)?, path)?;
            SecondHop::Discrete { channel, cost }
        }
        None => SecondHop::Awgn(AwgnSpec::new(noise_from_snr(
            a.snr_min.unwrap_or(0.0),
            a.snr_log10,
        ))?),
    };
    let alphabet1 = hop1.input(0).clone();
    let prob = MhcProblem::new(hop1, c1, b, a.p1, hop2, a.p2)?;
    let sol = mhc_capacity(&prob, &MhcGrid::default())?;
    let mut toml = pmf_table("first_hop", &alphabet1, &sol.input)?;
    match (&sol.second_hop_input, prob.hop2()) {
        (SecondHopInput::Pmf(p), SecondHop::Discrete { channel, .. }) => {
            toml.push('\n');
            toml.push_str(&pmf_table("second_hop", channel.input(0), p)?);
        }
        (SecondHopInput::GaussianPower(power), _) => {
            let _ = write!(toml, "\n[second_hop]\npower = {power:?}\n");
        }
        _ => unreachable!("second-hop input matches the second hop"),
    }
    Ok(Artifacts {
        csv: format!("capacity_bits\n{}\n", fmt_g(sol.capacity)),
        sidecar: Some(("pmf.toml", toml)),
    })
}

fn mhc_example(a: &MhcExampleArgs) -> Result<Artifacts> {
    let grid = linspace(a.snr_min, a.snr_max, a.steps, "SNR")?;
    let scale = if a.snr_log10 {
        SnrScale::Decibel
    } else {
        SnrScale::Log2
    };
    let rows = mhc_example_sweep(a.p1, a.p2, &grid, scale, 128)?;
    let mut csv = String::from("snr,N0,capacity_bits,p_star\n");
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_g(r.snr),
            fmt_g(r.n0),
            fmt_g(r.capacity),
            fmt_g(r.p_star)
        );
    }
    Ok(Artifacts::csv(csv))
}

fn report_csv(r: &SimReport) -> String {
    format!(
        "n,trials,seed,mean_bn,viol_freq,err_rate,relay_viol_freq\n{},{},{},{},{},{},{}\n",
        r.n,
        r.trials,
        r.seed,
        fmt_g(r.mean_energy),
        fmt_opt(r.energy_violation_freq),
        fmt_opt(r.error_rate),
        fmt_opt(r.relay_violation_freq)
    )
}

fn simulate_mac(a: &SimulateMacArgs) -> Result<Artifacts> {
    let mut report = match &a.channel {
        None => {
            let p = a.p;
            let target = a.b_min.unwrap_or(4.0 * p + 1.0);
            let eps = a.eps.unwrap_or(DEFAULT_EPS_FRACTION * target);
            let sol = gaussian_mac_timeshare(p, target)?;
            let pol = InputPolicy::gaussian_two_phase(&sol)?;
            let q = QSequence::draw(pol.q_probs(), a.n, a.seed)?;
            let cb1 = generate_codebook(&pol, &q, 0.0, &SymbolCost::Squared, p, a.seed)?;
            let cb2 = generate_codebook(
                &pol,
                &q,
                0.0,
                &SymbolCost::Squared,
                p,
                a.seed.wrapping_add(1),
            )?;
            simulate_mac_energy(
                &cb1,
                &cb2,
                &Link::gaussian(1.0)?,
                target,
                eps,
                a.trials,
                a.seed,
            )?
        }
        Some(path) => {
            let spec = load_channel(path)?;
            if !spec.channel.is_mac() {
                return Err(Error::ChannelFile {
                    line: 1,
                    message: format!(
                        "{}: simulate-mac needs a channel with two inputs",
                        path.display()
                    ),
                });
            }
            let target = a.b_min.unwrap_or(0.0);
            let eps = a.eps.unwrap_or(DEFAULT_EPS_FRACTION * target);
            let prob = MacProblem::new(
                spec.channel.clone(),
                spec.costs[0].clone(),
                spec.costs[1].clone(),
                spec.energy.clone(),
                a.p1,
                a.p2,
                Some(target),
            )?;
            let grid = SearchGrid {
                seed: a.seed,
                ..SearchGrid::default()
            };
            let point = mac_boundary_point(&prob, Weights::sum_rate(), a.q_size, &grid)?;
            let (pol1, pol2) = InputPolicy::from_time_sharing(&point.policy, &spec.channel)?;
            let q = QSequence::draw(pol1.q_probs(), a.n, a.seed)?;
            // Half the boundary rates, capped at 5 bits per block so that
            // exhaustive decoding stays cheap.
            let cap = 5.0 / a.n as f64;
            let rate1 = (0.5 * point.triple.r1).min(cap);
            let rate2 = (0.5 * point.triple.r2).min(cap);
            let cost = |k: usize| SymbolCost::Table {
                alphabet: spec.channel.input(k).clone(),
                cost: spec.costs[k].clone(),
            };
            let cb1 = generate_codebook(&pol1, &q, rate1, &cost(0), a.p1, a.seed)?;
            let cb2 = generate_codebook(&pol2, &q, rate2, &cost(1), a.p2, a.seed.wrapping_add(1))?;
            let link = Link::discrete(spec.channel, spec.energy)?;
            let mut report = simulate_mac_energy(&cb1, &cb2, &link, target, eps, a.trials, a.seed)?;
            report.error_rate = Some(simulate_decode(&cb1, &cb2, &link, a.trials, a.seed)?);
            report
        }
    };
    report.seed = a.seed;
    Ok(Artifacts::csv(report_csv(&report)))
}

fn simulate_mhc(a: &SimulateMhcArgs) -> Result<Artifacts> {
    let n0 = noise_from_snr(a.snr_min, a.snr_log10);
    let (hop1, c1, b, input) = match &a.channel {
        None => {
            let levels = Alphabet::new(vec![-2.0, -1.0, 1.0, 2.0])?;
            let hop1 = DmChannel::deterministic(vec![levels.clone()], levels.clone(), |x| x[0])?;
            let (_, p) = mhc_example_capacity(a.p1, a.p2, n0, 128)?;
            let input = Pmf::new(vec![p, 0.5 - p, 0.5 - p, p])?;
            (
                hop1,
                CostFn::squared(&levels),
                EnergyFn::squared(&levels),
                input,
            )
        }
        Some(path) => {
            let (hop1, c1, b) = point_to_point(load_channel(path)?, path)?;
            let prob = MhcProblem::new(
                hop1.clone(),
                c1.clone(),
                b.clone(),
                a.p1,
                SecondHop::Awgn(AwgnSpec::new(n0)?),
                a.p2,
            )?;
            let sol = mhc_capacity(&prob, &MhcGrid::default())?;
            (hop1, c1, b, sol.input)
        }
    };
    let alphabet = hop1.input(0).clone();
    let pol = InputPolicy::single(SymbolSource::from_pmf(&alphabet, &input)?);
    let q = QSequence::draw(pol.q_probs(), a.n, a.seed)?;
    let cost = SymbolCost::Table { alphabet, cost: c1 };
    let cb = generate_codebook(&pol, &q, 0.0, &cost, a.p1, a.seed)?;
    let report = simulate_mhc_harvest(
        &cb,
        &Link::discrete(hop1, b)?,
        RelayPolicy::Scaling,
        a.p2,
        a.trials,
        a.seed,
    )?;
    Ok(Artifacts::csv(report_csv(&report)))
}

fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_stem().map(OsString::from).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    out.with_file_name(name)
}

fn cannot_write(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
}

fn execute(cfg: &RunConfig) -> Result<()> {
    let (artifacts, out) = match &cfg.command {
        Command::MacRegion(a) => (mac_region(a)?, &a.output),
        Command::GaussianMac(a) => (gaussian_mac(a)?, &a.output),
        Command::Mhc(a) => (mhc(a)?, &a.output),
        Command::MhcExample(a) => (mhc_example(a)?, &a.output),
        Command::SimulateMac(a) => (simulate_mac(a)?, &a.output),
        Command::SimulateMhc(a) => (simulate_mhc(a)?, &a.output),
    };
    match &out.out {
        Some(path) => {
            std::fs::write(path, &artifacts.csv).map_err(|e| cannot_write(path, e))?;
            if let Some((suffix, contents)) = artifacts.sidecar {
                let side = sidecar_path(path, suffix);
                std::fs::write(&side, contents).map_err(|e| cannot_write(&side, e))?;
            }
        }
        None => print!("{}", artifacts.csv),
    }
    Ok(())
}

/// Parses `argv` (program name first), runs one subcommand and returns
/// the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cfg.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))
            .and_then(|pool| pool.install(|| execute(&cfg))),
        None => execute(&cfg),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("capenergy: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format() {
        assert_eq!(fmt_g(0.7924812503605781), "0.792481");
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(5.0), "5");
        assert_eq!(fmt_g(-20.0), "-20");
        assert_eq!(fmt_g(1.5e-5), "1.5e-05");
        assert_eq!(fmt_g(1234567.0), "1.23457e+06");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(999999.5), "1e+06");
        assert_eq!(fmt_g(0.25), "0.25");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.0, 5.0, 51, "B").unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[50], 5.0);
        assert!(linspace(1.0, 0.0, 3, "B").is_err());
        assert!(linspace(0.0, 1.0, 1, "B").is_err());
    }

    #[test]
    fn sidecar_next_to_csv() {
        assert_eq!(
            sidecar_path(Path::new("/tmp/x/run.csv"), "pmf.toml"),
            Path::new("/tmp/x/run.pmf.toml")
        );
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(
            run(["capenergy", "gaussian-mac", "--bogus", "1"]),
            EXIT_USAGE
        );
        assert_eq!(run(["capenergy"]), EXIT_USAGE);
        assert_eq!(
            run(["capenergy", "mhc-example", "--steps", "1"]),
            EXIT_USAGE
        );
    }
}
