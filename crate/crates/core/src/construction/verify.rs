//! Independent re-verification of a construction.
//!
//! Reads the raw piece data and recomputes every residual from scratch with
//! its own symbol evaluation; nothing here calls into the stepper or the
//! decomposition's evaluation helpers.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{ConstructionState, VERIFY_TOLERANCE};
use crate::decomposition::{DiagonalSymbol, MultiplierDecomposition, MultiplierPiece};
use crate::freq::{self, Freq};

type Coeffs = BTreeMap<Freq, (BigRational, BigRational)>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub epsilon: f64,
    /// Largest `‖φ_n(e_{α_i+β_j})‖` over `j ≤ i ≤ n`.
    pub lower: f64,
    /// Largest `‖φ_n(e_{α_i+β_j}) − e_{α_i+β_j}‖` over `i < j ≤ n`.
    pub upper: f64,
    /// Every residual is exactly zero.
    pub exact_zero: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub levels: Vec<LevelReport>,
    pub increasing: bool,
    pub mask_disjoint: bool,
    pub schedule_ok: bool,
    pub max_epsilon: f64,
    pub eta: f64,
    pub passed: bool,
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64()
        .filter(|x| x.is_finite())
        .unwrap_or_else(|| freq::ratio_to_f64(r.numer(), r.denom()))
}

/// `clamp(min((m − a)/(b − a), (d − m)/(d − c)), 0, 1)`.
fn trapezoid(knots: [&Freq; 4], m: &Freq) -> BigRational {
    let [a, b, c, d] = knots;
    if m <= a || m >= d {
        return BigRational::zero();
    }
    let up = BigRational::new(m - a, b - a);
    let down = BigRational::new(d - m, d - c);
    up.min(down).min(BigRational::one())
}

fn add_action(piece: &MultiplierPiece, m: &Freq, acc: &mut Coeffs) {
    let mut push = |out: &Freq, re: &BigRational, im: &BigRational| {
        let e = acc.entry(out.clone()).or_insert_with(|| (BigRational::zero(), BigRational::zero()));
        e.0 += re;
        e.1 += im;
    };
    match piece {
        MultiplierPiece::Diagonal(DiagonalSymbol::Ramp(r)) => {
            let v = trapezoid(r.knots(), m);
            if !v.is_zero() {
                push(m, &v, &BigRational::zero());
            }
        }
        MultiplierPiece::Diagonal(DiagonalSymbol::Sparse(map)) => {
            if let Some(v) = map.get(m) {
                push(m, &v.re, &v.im);
            }
        }
        MultiplierPiece::Kernel(k) => {
            if let Some(col) = k.column(m) {
                for (out, v) in col {
                    push(out, &v.re, &v.im);
                }
            }
        }
    }
}

/// `(ℓ¹ norm, exactly zero)` of `acc`, minus `e_m` when `subtract_identity`.
fn residual(acc: &Coeffs, m: &Freq, subtract_identity: bool) -> (f64, bool) {
    let mut total = 0.0;
    let mut zero = true;
    let mut seen_m = false;
    for (k, (re, im)) in acc {
        let re = if subtract_identity && k == m {
            seen_m = true;
            re - BigRational::one()
        } else {
            re.clone()
        };
        if re.is_zero() && im.is_zero() {
            continue;
        }
        zero = false;
        total += if im.is_zero() {
            to_f64(&re.abs())
        } else {
            to_f64(&re).hypot(to_f64(im))
        };
    }
    if subtract_identity && !seen_m {
        zero = false;
        total += 1.0;
    }
    (total, zero)
}

/// Recomputes (i)/(ii) at every level `n` with `φ_n` built from the first
/// `n − 1` mask intervals, and checks the recorded `ε` schedule.
pub fn verify(d: &MultiplierDecomposition, state: &ConstructionState) -> VerificationReport {
    let levels = state.alpha.len();
    let pieces = d.pieces();
    let increasing = state.beta.len() == levels
        && state.epsilon.len() == levels
        && state.mask_intervals.len() + 1 == levels
        && state.alpha.windows(2).all(|w| w[0] < w[1])
        && state.beta.windows(2).all(|w| w[0] < w[1])
        && state.alpha.first().is_some_and(|a| !a.is_negative())
        && state.beta.first().is_some_and(|b| !b.is_negative());
    let mask_disjoint = state.mask_intervals.iter().all(|&(k, n)| k <= n && n < pieces.len())
        && state.mask_intervals.windows(2).all(|w| w[0].1 < w[1].0);
    if !increasing || !mask_disjoint {
        return VerificationReport {
            levels: Vec::new(),
            increasing,
            mask_disjoint,
            schedule_ok: false,
            max_epsilon: f64::NAN,
            eta: state.eta,
            passed: false,
        };
    }

    let freq_of = |i: usize, j: usize| &state.alpha[i] + &state.beta[j];
    let mut acc: Vec<Vec<Coeffs>> = vec![vec![Coeffs::new(); levels]; levels];
    let mut reports = Vec::with_capacity(levels);
    for n in 1..=levels {
        let used = &state.mask_intervals[..n - 1];
        let newest = n - 1;
        for i in 0..n {
            for j in 0..n {
                let m = freq_of(i, j);
                if i == newest || j == newest {
                    for &(lo, hi) in used {
                        for p in &pieces[lo..=hi] {
                            add_action(p, &m, &mut acc[i][j]);
                        }
                    }
                } else if let Some(&(lo, hi)) = used.last() {
                    for p in &pieces[lo..=hi] {
                        add_action(p, &m, &mut acc[i][j]);
                    }
                }
            }
        }
        let epsilon = state.epsilon[n - 1];
        let (mut lower, mut upper, mut exact_zero) = (0.0f64, 0.0f64, true);
        for i in 0..n {
            for j in 0..n {
                let m = freq_of(i, j);
                let (r, z) = residual(&acc[i][j], &m, i < j);
                if i < j {
                    upper = upper.max(r);
                } else {
                    lower = lower.max(r);
                }
                exact_zero &= z;
            }
        }
        let ok = lower <= epsilon + VERIFY_TOLERANCE && upper <= epsilon + VERIFY_TOLERANCE;
        reports.push(LevelReport {
            level: n,
            epsilon,
            lower,
            upper,
            exact_zero,
            ok,
        });
    }

    let schedule_ok = state
        .epsilon
        .windows(2)
        .enumerate()
        .all(|(idx, w)| w[1] <= (1.0 + 0.5f64.powi(idx as i32 + 2)) * w[0]);
    let max_epsilon = state.epsilon.iter().cloned().fold(0.0, f64::max);
    let passed = schedule_ok && max_epsilon < state.eta && reports.iter().all(|r| r.ok);
    VerificationReport {
        levels: reports,
        increasing,
        mask_disjoint,
        schedule_ok,
        max_epsilon,
        eta: state.eta,
        passed,
    }
}
