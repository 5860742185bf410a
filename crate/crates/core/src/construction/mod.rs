//! Inductive choice of frequencies `α`, `β` and a `{0,1}` mask `φ` over the
//! pieces of a decomposition, such that at every level `n`
//!
//! * (i)  `‖φ_n(e_{α_i+β_j})‖ ≤ ε_n` for `j ≤ i ≤ n`,
//! * (ii) `‖φ_n(e_{α_i+β_j}) − e_{α_i+β_j}‖ ≤ ε_n` for `i < j ≤ n`.
//!
//! Modulating a matrix `X` by `α`, `β` then turns `φ ⊗ Id` into the strict
//! upper triangular truncation of `X` up to `ε_n d² ‖X‖₁`.

mod certificate;
mod exact;
mod verify;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::decomposition::{self, last_exceeding, tail_magnitude, MultiplierDecomposition, Quantity};
use crate::freq::{self, Freq};
use crate::{Error, Result};

pub use certificate::{certify, sweep, witness_for, Certificate, SweepFailure, SweepOutcome, WitnessStrategy};
pub use exact::{exact_placement_pieces, is_stein};
pub use verify::{verify, LevelReport, VerificationReport};

/// Default hard cap on search work per operation.
pub const DEFAULT_CAP: u64 = 1 << 31;

/// Slack allowed when comparing measured residuals to recorded bounds.
pub const VERIFY_TOLERANCE: f64 = 1e-12;

/// Tolerance schedule and search limits.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub eta: f64,
    pub epsilon1: f64,
    /// Number of levels `n_max`; `1` is the initial state.
    pub steps: usize,
    pub cap: u64,
}

impl ScheduleConfig {
    /// `ε₁ = η / 2.4`, which keeps `ε₁ Π_{k≥2}(1 + 2^{−k})` below `η`.
    pub fn new(eta: f64, steps: usize) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidArgument(format!("eta must be positive, got {eta}")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("at least one step is required".into()));
        }
        Ok(Self {
            eta,
            epsilon1: eta / 2.4,
            steps,
            cap: DEFAULT_CAP,
        })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// `δ_{n+1} = ε_n 2^{−(n+1)} / 3`.
    pub fn delta(n: usize, epsilon_n: f64) -> f64 {
        epsilon_n * 0.5f64.powi(n as i32 + 1) / 3.0
    }

    /// `ε_{n+1} = max(3δ, ε_n + δ)`.
    pub fn next_epsilon(epsilon_n: f64, delta: f64) -> f64 {
        (3.0 * delta).max(epsilon_n + delta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Closed-form dyadic placement for the trapezoid decomposition, with
    /// every residual exactly zero.
    Exact,
    /// Generic searches driven by the `δ` schedule.
    Scan,
}

/// Snapshot after `n` levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionState {
    pub placement: Placement,
    pub eta: f64,
    #[serde(with = "freq::serde_vec")]
    pub alpha: Vec<Freq>,
    #[serde(with = "freq::serde_vec")]
    pub beta: Vec<Freq>,
    /// Inclusive piece-index intervals `[K, N]`, one per completed step.
    pub mask_intervals: Vec<(usize, usize)>,
    /// Recorded bound `ε_n` for each level.
    pub epsilon: Vec<f64>,
    /// Largest residual in (i)/(ii) measured by the stepper at each level.
    pub measured: Vec<f64>,
}

impl ConstructionState {
    pub fn initial(cfg: &ScheduleConfig, placement: Placement) -> Self {
        let epsilon1 = match placement {
            Placement::Exact => 0.0,
            Placement::Scan => cfg.epsilon1,
        };
        Self {
            placement,
            eta: cfg.eta,
            alpha: vec![Freq::zero()],
            beta: vec![Freq::zero()],
            mask_intervals: Vec::new(),
            epsilon: vec![epsilon1],
            measured: vec![0.0],
        }
    }

    pub fn level(&self) -> usize {
        self.alpha.len()
    }

    pub fn final_epsilon(&self) -> f64 {
        *self.epsilon.last().unwrap()
    }

    /// Last piece index used by the mask, if any.
    pub fn top(&self) -> Option<usize> {
        self.mask_intervals.last().map(|&(_, n)| n)
    }

    pub fn in_mask(&self, k: usize) -> bool {
        self.mask_intervals.iter().any(|&(lo, hi)| lo <= k && k <= hi)
    }

    /// `{0,1}` mask as a coefficient list covering every used piece.
    pub fn mask(&self) -> Vec<f64> {
        let len = self.top().map_or(0, |t| t + 1);
        (0..len).map(|k| if self.in_mask(k) { 1.0 } else { 0.0 }).collect()
    }

    /// The frequencies `α_i + β_j`, `i, j ≤ n`.
    pub fn tracked(&self) -> Vec<Freq> {
        let mut out = Vec::with_capacity(self.alpha.len() * self.beta.len());
        for a in &self.alpha {
            for b in &self.beta {
                out.push(a + b);
            }
        }
        out
    }
}

/// Work counter enforcing [`ScheduleConfig::cap`].
#[derive(Debug)]
pub struct Budget {
    cap: u64,
    used: u64,
}

impl Budget {
    pub fn new(cap: u64) -> Self {
        Self { cap, used: 0 }
    }

    pub fn charge(&mut self, work: u64, context: &str) -> Result<()> {
        self.used = self.used.saturating_add(work);
        if self.used > self.cap {
            return Err(Error::SearchCapExceeded {
                cap: self.cap,
                context: context.to_string(),
            });
        }
        Ok(())
    }
}

fn delta_rational(delta: f64) -> Result<Option<BigRational>> {
    if delta == f64::INFINITY {
        return Ok(None);
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    Ok(Some(decomposition::rational(delta)?))
}

/// Smallest `K` above the mask's top index with
/// `tail_bound(D, {α_i + β_j}, K) ≤ δ`.
pub fn find_tail_index(
    d: &MultiplierDecomposition,
    state: &ConstructionState,
    delta: f64,
    budget: &mut Budget,
) -> Result<usize> {
    let start = state.top().map_or(0, |t| t + 1);
    let Some(delta) = delta_rational(delta)? else {
        return Ok(start);
    };
    let tracked = state.tracked();
    for k in start..=d.len() {
        budget.charge(1, "tail index")?;
        if !tail_magnitude(d, &tracked, k).exceeds(&delta, false) {
            return Ok(k);
        }
    }
    unreachable!("the empty tail is zero")
}

/// Smallest `β > β_n` such that `Σ_{k≤K} ‖P_k(e_{β'})‖ < δ` for every
/// `β' ≥ β`; the sum dominates every `{0,1}` combination of those pieces.
pub fn choose_beta(
    d: &MultiplierDecomposition,
    state: &ConstructionState,
    k: usize,
    delta: f64,
    budget: &mut Budget,
) -> Result<Freq> {
    let floor = state.beta.last().unwrap() + 1;
    let Some(delta) = delta_rational(delta)? else {
        return Ok(floor);
    };
    let (knots, points) = d.breakpoints(|t| t <= k);
    budget.charge((knots.len() + points.len()) as u64, "beta")?;
    Ok(match last_exceeding(d, |t| t <= k, Quantity::AbsSum, &delta, true) {
        Some(last) => floor.max(last + 1),
        None => floor,
    })
}

/// Smallest `N > K` such that `‖Σ_{k≤N} P_k(e_m) − e_m‖ < δ` at every
/// `m = α_i + β_new`.
pub fn choose_n(
    d: &MultiplierDecomposition,
    state: &ConstructionState,
    k: usize,
    beta_new: &Freq,
    delta: f64,
    budget: &mut Budget,
) -> Result<usize> {
    let delta = delta_rational(delta)?;
    let targets: Vec<Freq> = state.alpha.iter().map(|a| a + beta_new).collect();
    for n in k + 1..d.len() {
        budget.charge(1, "horizon")?;
        let ok = targets.iter().all(|m| {
            let r = d.completeness_residual(m, n);
            delta.as_ref().map_or(true, |t| !r.exceeds(t, true))
        });
        if ok {
            return Ok(n);
        }
    }
    Err(Error::HorizonExhausted(format!(
        "no partial sum beyond piece {k} of {} pieces reproduces the frequencies {}",
        d.len(),
        targets.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    )))
}

/// Smallest `α > α_n` such that `‖φ(e_{α'})‖ ≤ δ` for all `α' ≥ α`, where
/// `φ` is the mask including the new interval.
pub fn choose_alpha(
    d: &MultiplierDecomposition,
    state: &ConstructionState,
    intervals: &[(usize, usize)],
    delta: f64,
    budget: &mut Budget,
) -> Result<Freq> {
    let floor = state.alpha.last().unwrap() + 1;
    let Some(delta) = delta_rational(delta)? else {
        return Ok(floor);
    };
    let select = |k: usize| intervals.iter().any(|&(lo, hi)| lo <= k && k <= hi);
    let (knots, points) = d.breakpoints(select);
    budget.charge((knots.len() + points.len()) as u64, "alpha")?;
    Ok(match last_exceeding(d, select, Quantity::SumNorm, &delta, false) {
        Some(last) => floor.max(last + 1),
        None => floor,
    })
}

/// Largest (i)/(ii) residual of `state` at its current level, using the
/// stepper's own evaluation.
fn measure(d: &MultiplierDecomposition, state: &ConstructionState) -> f64 {
    let n = state.level();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let m = &state.alpha[i] + &state.beta[j];
            let mut action = d.exact_action(&m, |k| state.in_mask(k));
            if i < j {
                *action.entry(m).or_default() += &(-decomposition::QComplex::one());
                action.retain(|_, v| !v.is_zero());
            }
            worst = worst.max(decomposition::coeff_magnitude(&action).value());
        }
    }
    worst
}

/// One level of the induction.
pub fn step(d: &MultiplierDecomposition, state: &ConstructionState, cfg: &ScheduleConfig) -> Result<ConstructionState> {
    let mut next = match state.placement {
        Placement::Exact => exact::step(d, state)?,
        Placement::Scan => scan_step(d, state, cfg)?,
    };
    let level = next.level();
    let measured = measure(d, &next);
    let bound = next.final_epsilon();
    if measured > bound + VERIFY_TOLERANCE {
        return Err(Error::InvariantViolated {
            level,
            detail: format!("measured residual {measured:e} exceeds epsilon {bound:e}"),
        });
    }
    next.measured.push(measured);
    Ok(next)
}

fn scan_step(d: &MultiplierDecomposition, state: &ConstructionState, cfg: &ScheduleConfig) -> Result<ConstructionState> {
    let n = state.level();
    let epsilon = state.final_epsilon();
    let delta = ScheduleConfig::delta(n, epsilon);
    let mut budget = Budget::new(cfg.cap);
    let k = find_tail_index(d, state, delta, &mut budget)?;
    if k >= d.len() {
        return Err(Error::HorizonExhausted(format!("all {} pieces used after level {n}", d.len())));
    }
    let beta = choose_beta(d, state, k, delta, &mut budget)?;
    let big_n = choose_n(d, state, k, &beta, delta, &mut budget)?;
    let mut intervals = state.mask_intervals.clone();
    intervals.push((k, big_n));
    let alpha = choose_alpha(d, state, &intervals, delta, &mut budget)?;

    let mut next = state.clone();
    next.alpha.push(alpha);
    next.beta.push(beta);
    next.mask_intervals = intervals;
    next.epsilon.push(ScheduleConfig::next_epsilon(epsilon, delta));
    Ok(next)
}

/// Runs the induction up to `cfg.steps` levels.
pub fn construct(d: &MultiplierDecomposition, cfg: &ScheduleConfig, placement: Placement) -> Result<ConstructionState> {
    if placement == Placement::Exact && !is_stein(d) {
        return Err(Error::InvalidArgument(
            "exact placement needs the dyadic trapezoid decomposition".into(),
        ));
    }
    let mut state = ConstructionState::initial(cfg, placement);
    while state.level() < cfg.steps {
        state = step(d, &state, cfg)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{stein, MultiplierPiece, QComplex};

    fn at_level_one(placement: Placement) -> ConstructionState {
        ConstructionState::initial(&ScheduleConfig::new(1e-3, 1).unwrap(), placement)
    }

    #[test]
    fn tail_index_examples() {
        let s = stein(10).unwrap();
        let st = at_level_one(Placement::Scan);
        let mut b = Budget::new(DEFAULT_CAP);
        // Frequency 0 is only touched by W_0.
        assert_eq!(find_tail_index(&s, &st, 1e-6, &mut b).unwrap(), 1);
        assert_eq!(find_tail_index(&s, &st, f64::INFINITY, &mut b).unwrap(), 0);
        let mut st2 = st.clone();
        st2.mask_intervals.push((1, 3));
        assert_eq!(find_tail_index(&s, &st2, 1e-6, &mut b).unwrap(), 4);
    }

    #[test]
    fn beta_examples() {
        let s = stein(10).unwrap();
        let st = at_level_one(Placement::Scan);
        let mut b = Budget::new(DEFAULT_CAP);
        assert_eq!(choose_beta(&s, &st, 3, 1e-6, &mut b).unwrap(), Freq::from(16));
        assert_eq!(choose_beta(&s, &st, 3, 5.0, &mut b).unwrap(), Freq::from(1));

        let low = MultiplierDecomposition::new(vec![MultiplierPiece::sparse(
            (0..100).map(|m| (Freq::from(m), QComplex::one())),
        )]);
        assert_eq!(choose_beta(&low, &st, 0, 0.5, &mut b).unwrap(), Freq::from(100));
    }

    #[test]
    fn horizon_examples() {
        let s = stein(10).unwrap();
        let st = at_level_one(Placement::Scan);
        let mut b = Budget::new(DEFAULT_CAP);
        // α₁ + β = 40 is fully covered once W_6 is included.
        assert_eq!(choose_n(&s, &st, 1, &Freq::from(40), 1e-9, &mut b).unwrap(), 6);
        assert_eq!(choose_n(&s, &st, 0, &Freq::from(0), 1e-9, &mut b).unwrap(), 1);
        assert_eq!(choose_n(&s, &st, 3, &Freq::from(40), 2.0, &mut b).unwrap(), 4);
        assert!(matches!(
            choose_n(&s, &st, 1, &Freq::from(5000), 1e-9, &mut b),
            Err(Error::HorizonExhausted(_))
        ));
    }

    #[test]
    fn cap_is_enforced() {
        let s = stein(40).unwrap();
        let cfg = ScheduleConfig::new(1e-3, 4).unwrap().with_cap(3);
        assert!(matches!(
            construct(&s, &cfg, Placement::Scan),
            Err(Error::SearchCapExceeded { cap: 3, .. })
        ));
    }

    #[test]
    fn initial_state() {
        let s = stein(4).unwrap();
        let st = construct(&s, &ScheduleConfig::new(0.1, 1).unwrap(), Placement::Scan).unwrap();
        assert_eq!(st.alpha, vec![Freq::zero()]);
        assert_eq!(st.beta, vec![Freq::zero()]);
        assert!(st.mask_intervals.is_empty());
        assert!(st.mask().is_empty());
    }

    #[test]
    fn scan_stein_respects_schedule() {
        let s = stein(60).unwrap();
        let cfg = ScheduleConfig::new(1e-3, 8).unwrap();
        let st = construct(&s, &cfg, Placement::Scan).unwrap();
        assert_eq!(st.level(), 8);
        for w in st.alpha.windows(2).chain(st.beta.windows(2)) {
            assert!(w[0] < w[1]);
        }
        for (n, w) in st.epsilon.windows(2).enumerate() {
            assert!(w[1] <= (1.0 + 0.5f64.powi(n as i32 + 2)) * w[0]);
        }
        assert!(st.epsilon.iter().all(|&e| e < 1e-3));
        for (m, e) in st.measured.iter().zip(&st.epsilon) {
            assert!(m <= e);
        }
    }

    #[test]
    fn exact_needs_stein() {
        let d = MultiplierDecomposition::new(vec![MultiplierPiece::sparse([(Freq::zero(), QComplex::one())])]);
        assert!(construct(&d, &ScheduleConfig::new(0.1, 2).unwrap(), Placement::Exact).is_err());
    }
}
