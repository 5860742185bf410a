use std::fs;
use std::path::Path;

use h1cb_core::construction::{
    self, construct, exact_placement_pieces, sweep, verify, ConstructionState, Placement, ScheduleConfig,
    SweepOutcome, WitnessStrategy,
};
use h1cb_core::decomposition::{
    fejer_kernel, matrix_probe, random_analytic_poly, stein, unconditionality_probe, MultiplierDecomposition,
    ProbeConfig, ProbeMode, ProbeResult,
};
use h1cb_core::schatten::{
    diag_modulate, map_norm_ascent, map_norm_lower, map_norm_random_search, witness_library, AscentOptions,
    MaskedTruncation, SchattenMatrix,
};
use h1cb_core::{seed, stats, Error};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{self, num, opt_num, Csv, Sink};
use crate::range::parse_sizes;
use crate::{Cli, Command, Mode, ProbeModeArg, TriMethod, Witness};

pub const EXIT_INVALID_RANGE: u8 = 2;
pub const EXIT_SEARCH_CAP: u8 = 3;
pub const EXIT_TRANSFER: u8 = 4;
pub const EXIT_VERIFICATION: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SearchCapExceeded { .. } => EXIT_SEARCH_CAP,
            Error::TransferViolated { .. } => EXIT_TRANSFER,
            _ => 1,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(1, e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new(1, e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn sizes(input: &str) -> Result<Vec<usize>> {
    parse_sizes(input).map_err(|m| CliError::new(EXIT_INVALID_RANGE, m))
}

pub fn run(cli: &Cli) -> Result<()> {
    let sink = Sink::new(cli.out.clone());
    match &cli.command {
        Command::TriNorm {
            d,
            method,
            restarts,
            samples,
        } => tri_norm(cli, &sink, &sizes(d)?, *method, *restarts, *samples),
        Command::Construct {
            decomposition,
            steps,
            eta,
            mode,
            pieces,
        } => cmd_construct(cli, &sink, decomposition, *steps, *eta, *mode, *pieces),
        Command::Certify {
            state,
            d,
            witness,
            restarts,
        } => cmd_certify(cli, &sink, state, &sizes(d)?, strategy(*witness, *restarts)),
        Command::Probe {
            decomposition,
            mode,
            n,
            d,
            trials,
        } => {
            let ds = d.as_deref().map(sizes).transpose()?;
            cmd_probe(cli, &sink, decomposition, *mode, *n, ds, *trials)
        }
        Command::Sweep { d, witness, restarts } => cmd_sweep(cli, &sink, &sizes(d)?, strategy(*witness, *restarts)),
    }
}

fn strategy(w: Witness, restarts: usize) -> WitnessStrategy {
    match w {
        Witness::Elementary => WitnessStrategy::Elementary,
        Witness::Cauchy => WitnessStrategy::Cauchy,
        Witness::Ascent => WitnessStrategy::Ascent { restarts },
    }
}

fn tri_norm(cli: &Cli, sink: &Sink, ds: &[usize], method: TriMethod, restarts: usize, samples: usize) -> Result<()> {
    let rows: Vec<(f64, String)> = ds
        .par_iter()
        .map(|&d| {
            let task_seed = seed::derive(cli.seed, d as u64);
            let t = MaskedTruncation::strict_upper(d);
            let est = match method {
                TriMethod::Ascent => map_norm_ascent(&t, &AscentOptions::new(restarts, task_seed)),
                TriMethod::Library => {
                    let lib: Vec<SchattenMatrix> = witness_library(d, task_seed).into_iter().map(|(_, w)| w).collect();
                    map_norm_lower(&t, &lib).expect("library witnesses are nonzero")
                }
                TriMethod::Brute => map_norm_random_search(&t, samples, task_seed),
            };
            (est.lower_bound, est.witness_tag)
        })
        .collect();
    let mut csv = Csv::new(&["d", "estimate", "witness", "ln_d", "running_slope"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&d, (estimate, tag)) in ds.iter().zip(rows) {
        if d >= 2 {
            xs.push(d);
            ys.push(estimate);
        }
        csv.row(&[
            d.to_string(),
            num(estimate),
            tag,
            num((d as f64).ln()),
            opt_num(stats::slope_vs_ln(&xs, &ys)),
        ]);
    }
    sink.write("tri_norm.csv", &csv.finish())?;
    Ok(())
}

fn load_decomposition(input: &str, stein_pieces: usize) -> Result<MultiplierDecomposition> {
    if input == "stein" {
        Ok(stein(stein_pieces.max(2) - 1)?)
    } else {
        let text = fs::read_to_string(input).map_err(|e| CliError::new(1, format!("{input}: {e}")))?;
        Ok(MultiplierDecomposition::from_json_str(&text)?)
    }
}

fn cmd_construct(
    cli: &Cli,
    sink: &Sink,
    source: &str,
    steps: usize,
    eta: f64,
    mode: Mode,
    pieces: Option<usize>,
) -> Result<()> {
    let placement = match mode {
        Mode::Exact => Placement::Exact,
        Mode::Scan => Placement::Scan,
    };
    let default_pieces = match placement {
        Placement::Exact => exact_placement_pieces(steps),
        Placement::Scan => 6 * steps + 12,
    };
    let dec = load_decomposition(source, pieces.unwrap_or(default_pieces))?;
    let cfg = ScheduleConfig::new(eta, steps)?.with_cap(cli.cap);
    let state = construct(&dec, &cfg, placement)?;
    let report = verify(&dec, &state);
    let doc = json!({
        "source": source,
        "decomposition": dec.to_json(),
        "state": state,
        "verification": report,
    });
    sink.write("construct.json", &output::json(&doc))?;
    if !report.passed {
        return Err(CliError::new(EXIT_VERIFICATION, "independent verification failed"));
    }
    Ok(())
}

fn read_state(path: &Path) -> Result<(MultiplierDecomposition, ConstructionState)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::new(1, format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)?;
    let dec = MultiplierDecomposition::from_json(&doc["decomposition"])?;
    let state: ConstructionState = serde_json::from_value(doc["state"].clone())?;
    Ok((dec, state))
}

fn certificates_doc(outcome: &SweepOutcome) -> Value {
    json!({
        "certificates": outcome.certificates,
        "failures": outcome.failures,
        "slope": outcome.slope,
        "slope_large": outcome.slope_large,
    })
}

fn check_outcome(outcome: &SweepOutcome) -> Result<()> {
    if let Some(slope) = outcome.slope {
        eprintln!("slope of C_lb against ln d: {slope:.6}");
    }
    for c in outcome.certificates.iter().filter(|c| c.degenerate) {
        eprintln!("d = {}: degenerate certificate", c.d);
    }
    if let Some(f) = outcome.failures.iter().find(|f| f.transfer_violated) {
        return Err(CliError::new(EXIT_TRANSFER, format!("d = {}: {}", f.d, f.message)));
    }
    if let Some(f) = outcome.failures.first() {
        return Err(CliError::new(1, format!("d = {}: {}", f.d, f.message)));
    }
    Ok(())
}

fn cmd_certify(cli: &Cli, sink: &Sink, state_path: &Path, ds: &[usize], strategy: WitnessStrategy) -> Result<()> {
    let (dec, state) = read_state(state_path)?;
    let outcome = sweep(&dec, &state, ds, strategy, cli.seed, cli.tolerance);
    sink.write("certificates.json", &output::json(&certificates_doc(&outcome)))?;
    let mut csv = Csv::new(&["d", "C_lb", "ln_d"]);
    for c in &outcome.certificates {
        csv.row(&[c.d.to_string(), num(c.c_lb), num((c.d as f64).ln())]);
    }
    sink.write("certify.csv", &csv.finish())?;
    check_outcome(&outcome)
}

fn cmd_sweep(cli: &Cli, sink: &Sink, ds: &[usize], strategy: WitnessStrategy) -> Result<()> {
    let levels = ds.iter().copied().max().unwrap_or(1).max(2);
    let dec = stein(exact_placement_pieces(levels) - 1)?;
    let cfg = ScheduleConfig::new(1e-3, levels)?.with_cap(cli.cap);
    let state = construct(&dec, &cfg, Placement::Exact)?;
    let report = verify(&dec, &state);
    sink.write(
        "construct.json",
        &output::json(&json!({
            "source": "stein",
            "decomposition": dec.to_json(),
            "state": state,
            "verification": report,
        })),
    )?;
    if !report.passed {
        return Err(CliError::new(EXIT_VERIFICATION, "independent verification failed"));
    }
    let outcome = sweep(&dec, &state, ds, strategy, cli.seed, cli.tolerance);
    sink.write("certificates.json", &output::json(&certificates_doc(&outcome)))?;
    let mut csv = Csv::new(&["d", "C_lb", "ln_d", "ratio", "A", "B", "slack", "witness"]);
    for c in &outcome.certificates {
        csv.row(&[
            c.d.to_string(),
            num(c.c_lb),
            num((c.d as f64).ln()),
            num(c.ratio),
            num(c.a),
            num(c.b),
            num(c.slack),
            c.witness_tag.clone(),
        ]);
    }
    sink.write("sweep.csv", &csv.finish())?;
    check_outcome(&outcome)
}

fn probe_mode(m: ProbeModeArg) -> ProbeMode {
    match m {
        ProbeModeArg::Signs => ProbeMode::Signs,
        ProbeModeArg::Mask => ProbeMode::Mask,
        ProbeModeArg::Box => ProbeMode::Box,
    }
}

/// Analytic test functions with frequencies in `[0, 2^n]`.
fn scalar_tests(n: usize, seed: u64) -> Vec<h1cb_core::torus::ScalarTrigPoly> {
    let mut tests: Vec<_> = (n.saturating_sub(4).max(1)..=n).map(|j| fejer_kernel(1 << (j - 1))).collect();
    let mut rng = seed::rng(seed);
    tests.extend((0..2).map(|_| random_analytic_poly(&mut rng, 1 << n)));
    tests
}

fn scalar_probe(
    source: &str,
    mode: ProbeMode,
    n: usize,
    trials: usize,
    task_seed: u64,
) -> Result<(ProbeResult, usize)> {
    let dec = load_decomposition(source, n + 1)?;
    let coefficients = if source == "stein" { dec.len() } else { n.min(dec.len()) };
    let cfg = ProbeConfig {
        exhaustive_limit: 1 << 10,
        ..ProbeConfig::new(mode, coefficients, trials, task_seed)
    };
    Ok((unconditionality_probe(&dec, &cfg, &scalar_tests(n, task_seed))?, coefficients))
}

fn cmd_probe(
    cli: &Cli,
    sink: &Sink,
    source: &str,
    mode: ProbeModeArg,
    n: usize,
    ds: Option<Vec<usize>>,
    trials: usize,
) -> Result<()> {
    let mode = probe_mode(mode);
    let mut csv = Csv::new(&["mode", "d", "N", "ratio", "ratio_prev", "stabilization", "test_index", "coefficients"]);
    let mode_name = serde_json::to_value(mode)?.as_str().unwrap_or_default().to_string();
    let coeffs = |a: &[f64]| a.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ");
    match ds {
        None => {
            if n < 1 {
                return Err(CliError::new(EXIT_INVALID_RANGE, "N must be at least 1"));
            }
            let (best, len) = scalar_probe(source, mode, n, trials, seed::derive(cli.seed, n as u64))?;
            let prev = if n >= 3 {
                Some(scalar_probe(source, mode, n - 2, trials, seed::derive(cli.seed, (n - 2) as u64))?.0)
            } else {
                None
            };
            let prev_ratio = prev.as_ref().map(|p| p.ratio);
            csv.row(&[
                mode_name,
                "1".into(),
                len.to_string(),
                num(best.ratio),
                opt_num(prev_ratio),
                opt_num(prev_ratio.map(|p| best.ratio / p)),
                best.test_index.to_string(),
                coeffs(&best.coefficients),
            ]);
        }
        Some(ds) => {
            if source != "stein" {
                return Err(CliError::new(1, "amplified probes use the stein construction"));
            }
            for d in ds {
                let levels = d.max(2);
                let dec = stein(exact_placement_pieces(levels) - 1)?;
                let state = construct(&dec, &ScheduleConfig::new(1e-3, levels)?, Placement::Exact)?;
                let task_seed = seed::derive(cli.seed, d as u64);
                let (w, _) = construction::witness_for(d, WitnessStrategy::Ascent { restarts: 2 }, task_seed);
                let z = diag_modulate(&w, &state.alpha[..d], &state.beta[..d])?;
                let mask = state.mask();
                let cfg = ProbeConfig {
                    extra: vec![mask.clone()],
                    ..ProbeConfig::new(mode, mask.len(), trials, task_seed)
                };
                let best = matrix_probe(&dec, &cfg, &[z])?;
                csv.row(&[
                    mode_name.clone(),
                    d.to_string(),
                    mask.len().to_string(),
                    num(best.ratio),
                    String::new(),
                    String::new(),
                    best.test_index.to_string(),
                    coeffs(&best.coefficients),
                ]);
            }
        }
    }
    sink.write("probe.csv", &csv.finish())?;
    Ok(())
}
