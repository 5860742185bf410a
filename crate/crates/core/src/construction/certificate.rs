//! Transfer certificates: lower bounds for `sup ‖Σ a_k P_k ⊗ Id_{S¹_d}‖`
//! from the triangular truncation of a witness matrix.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::ConstructionState;
use crate::decomposition::{amplified_apply, CoefficientVector, MultiplierDecomposition};
use crate::freq::{self, Freq};
use crate::schatten::{
    diag_modulate, map_norm_ascent, triangular_truncation, witness_library, AscentOptions, MaskedTruncation,
    SchattenMatrix,
};
use crate::stats;
use crate::torus::h1_matrix_norm_auto;
use crate::{Error, Result};

/// How the witness matrix `X` is chosen for each `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessStrategy {
    /// `E_{12}` (the `1 × 1` identity when `d = 1`).
    Elementary,
    /// The Cauchy matrix `1/(j − i)` off the diagonal.
    Cauchy,
    /// Best dual-ascent witness for `‖T‖_{S¹→S¹}`.
    Ascent { restarts: usize },
}

/// A witness and its tag for the given strategy.
pub fn witness_for(d: usize, strategy: WitnessStrategy, seed: u64) -> (SchattenMatrix, String) {
    match strategy {
        WitnessStrategy::Elementary if d >= 2 => (SchattenMatrix::elementary(d, 0, 1), "e12".into()),
        WitnessStrategy::Cauchy if d >= 2 => {
            let lib = witness_library(d, seed);
            let (tag, w) = lib.into_iter().find(|(t, _)| t == "cauchy").unwrap();
            (w, tag)
        }
        WitnessStrategy::Ascent { restarts } if d >= 2 => {
            let est = map_norm_ascent(&MaskedTruncation::strict_upper(d), &AscentOptions::new(restarts, seed));
            (est.witness, est.witness_tag)
        }
        _ => (SchattenMatrix::identity(d), "identity".into()),
    }
}

/// One transfer certificate. Field order is the serialised order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub d: usize,
    pub epsilon: f64,
    /// `‖(φ ⊗ Id)(Z)‖_{H¹(S¹_d)}`.
    #[serde(rename = "A")]
    pub a: f64,
    /// `‖T(X)‖_{S¹}`.
    #[serde(rename = "B")]
    pub b: f64,
    /// `ε d² ‖X‖_{S¹}`.
    pub slack: f64,
    /// `(B − slack) / ‖X‖_{S¹}`.
    #[serde(rename = "C_lb")]
    pub c_lb: f64,
    #[serde(with = "freq::serde_vec")]
    pub alpha: Vec<Freq>,
    #[serde(with = "freq::serde_vec")]
    pub beta: Vec<Freq>,
    pub mask_intervals: Vec<(usize, usize)>,
    /// Rows of `[re, im]` pairs.
    pub witness: Vec<Vec<[f64; 2]>>,
    pub witness_tag: String,
    pub witness_norm: f64,
    /// `‖T(X)‖₁ / ‖X‖₁`.
    pub ratio: f64,
    /// `A / ‖X‖₁`, the ratio the mask realises.
    pub realized: f64,
    pub gap: f64,
    pub tolerance: f64,
    /// `d = 1` or `T(X) = 0`: the certificate carries no information.
    pub degenerate: bool,
}

/// Builds `Z = diag(e_α) X diag(e_β)` from the first `d` frequencies, applies
/// the mask, and checks `|A − B| ≤ ε d² ‖X‖₁ + tolerance·‖X‖₁`.
pub fn certify(
    dec: &MultiplierDecomposition,
    state: &ConstructionState,
    witness: &SchattenMatrix,
    witness_tag: &str,
    tolerance: f64,
) -> Result<Certificate> {
    let d = witness.size();
    if state.level() < d {
        return Err(Error::NotEnoughLevels {
            levels: state.level(),
            d,
        });
    }
    let norm_x = witness.trace_norm();
    if norm_x == 0.0 {
        return Err(Error::ZeroWitness(0));
    }
    let alpha = state.alpha[..d].to_vec();
    let beta = state.beta[..d].to_vec();
    let z = diag_modulate(witness, &alpha, &beta)?;
    let mask = CoefficientVector::new(state.mask())?;
    let a = h1_matrix_norm_auto(&amplified_apply(dec, &mask, &z)?)?;
    let b = triangular_truncation(witness).trace_norm();
    let epsilon = state.final_epsilon();
    let slack = epsilon * (d * d) as f64 * norm_x;
    let gap = (a - b).abs();
    if gap > slack + tolerance * norm_x {
        return Err(Error::TransferViolated {
            d,
            gap,
            slack,
            tolerance,
        });
    }
    let x = witness.matrix();
    Ok(Certificate {
        d,
        epsilon,
        a,
        b,
        slack,
        c_lb: (b - slack) / norm_x,
        alpha,
        beta,
        mask_intervals: state.mask_intervals.clone(),
        witness: (0..d).map(|i| (0..d).map(|j| pair(x[(i, j)])).collect()).collect(),
        witness_tag: witness_tag.to_string(),
        witness_norm: norm_x,
        ratio: b / norm_x,
        realized: a / norm_x,
        gap,
        tolerance,
        degenerate: d == 1 || b == 0.0,
    })
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepFailure {
    pub d: usize,
    pub message: String,
    pub transfer_violated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepOutcome {
    pub certificates: Vec<Certificate>,
    pub failures: Vec<SweepFailure>,
    /// Least-squares slope of `C_lb` against `ln d` over non-degenerate `d`.
    pub slope: Option<f64>,
    /// The same slope restricted to `d ≥ 16`.
    pub slope_large: Option<f64>,
}

/// Certificates for every `d` in `ds` (run in parallel, reported in input
/// order, witness seed derived from `d`); failures are collected and the
/// sweep continues.
pub fn sweep(
    dec: &MultiplierDecomposition,
    state: &ConstructionState,
    ds: &[usize],
    strategy: WitnessStrategy,
    seed: u64,
    tolerance: f64,
) -> SweepOutcome {
    let results: Vec<(usize, Result<Certificate>)> = ds
        .par_iter()
        .map(|&d| {
            if d == 0 {
                return (d, Err(Error::InvalidArgument("matrix size must be positive".into())));
            }
            let (w, tag) = witness_for(d, strategy, crate::seed::derive(seed, d as u64));
            (d, certify(dec, state, &w, &tag, tolerance))
        })
        .collect();
    let mut certificates = Vec::new();
    let mut failures = Vec::new();
    for (d, r) in results {
        match r {
            Ok(c) => certificates.push(c),
            Err(e) => failures.push(SweepFailure {
                d,
                message: e.to_string(),
                transfer_violated: matches!(e, Error::TransferViolated { .. }),
            }),
        }
    }
    let slope_over = |min_d: usize| {
        let pts: Vec<&Certificate> = certificates.iter().filter(|c| !c.degenerate && c.d >= min_d).collect();
        let ds: Vec<usize> = pts.iter().map(|c| c.d).collect();
        let ys: Vec<f64> = pts.iter().map(|c| c.c_lb).collect();
        stats::slope_vs_ln(&ds, &ys)
    };
    let slope = slope_over(2);
    let slope_large = slope_over(16);
    SweepOutcome {
        certificates,
        failures,
        slope,
        slope_large,
    }
}
