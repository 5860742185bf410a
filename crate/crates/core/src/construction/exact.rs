//! Closed-form placement for the dyadic trapezoids.
//!
//! `W_k` is nonzero exactly on `(2^{k−1}, 2^{k+1})` (and `W_0` on `[0, 2)`),
//! so placing every new frequency at a power of two beyond all supports in
//! play makes each multiplier value seen by the induction exactly `0` or `1`.

use num_traits::Zero;

use super::{ConstructionState, Placement};
use crate::decomposition::{stein, MultiplierDecomposition};
use crate::freq::{self, Freq};
use crate::{Error, Result};

/// Index of the last trapezoid that is nonzero at `m ≥ 0`; it is also the
/// first `N` with `m ≤ 2^N`, i.e. the first partial sum equal to `1` at `m`.
fn last_piece(m: &Freq) -> usize {
    if *m <= Freq::from(1) {
        0
    } else if freq::is_pow2(m) {
        (freq::bit_length(m) - 1) as usize
    } else {
        freq::bit_length(m) as usize
    }
}

pub fn is_stein(d: &MultiplierDecomposition) -> bool {
    d.len() >= 2 && stein(d.len() - 1).is_ok_and(|s| s == *d)
}

pub(super) fn step(d: &MultiplierDecomposition, state: &ConstructionState) -> Result<ConstructionState> {
    debug_assert_eq!(state.placement, Placement::Exact);
    let (k, beta, n, alpha) = next_placement(state);
    if n >= d.len() {
        return Err(Error::HorizonExhausted(format!(
            "exact placement at level {} needs piece {n} but only {} exist",
            state.level() + 1,
            d.len()
        )));
    }
    let mut next = state.clone();
    next.alpha.push(alpha);
    next.beta.push(beta);
    next.mask_intervals.push((k, n));
    next.epsilon.push(0.0);
    Ok(next)
}

/// `(K, β, N, α)` for the next level.
fn next_placement(state: &ConstructionState) -> (usize, Freq, usize, Freq) {
    // Every piece from K on vanishes at the tracked frequencies.
    let mut k = state.top().map_or(0, |t| t + 1);
    for a in &state.alpha {
        for b in &state.beta {
            k = k.max(last_piece(&(a + b)) + 1);
        }
    }
    // Pieces below K vanish from 2^K on.
    let beta = freq::pow2(k as u64).max(state.beta.last().unwrap() + 1);
    // Pieces up to N sum to one at α_i + β.
    let mut n = k + 1;
    for a in &state.alpha {
        n = n.max(last_piece(&(a + &beta)));
    }
    // Pieces up to N vanish from 2^{N+1} on.
    let alpha = freq::pow2(n as u64 + 1).max(state.alpha.last().unwrap() + 1);
    (k, beta, n, alpha)
}

/// Number of trapezoids exact placement needs to reach `levels` levels
/// (at least two, the smallest decomposition).
pub fn exact_placement_pieces(levels: usize) -> usize {
    let mut state = ConstructionState {
        placement: Placement::Exact,
        eta: 1.0,
        alpha: vec![Freq::zero()],
        beta: vec![Freq::zero()],
        mask_intervals: Vec::new(),
        epsilon: vec![0.0],
        measured: vec![0.0],
    };
    let mut needed = 2;
    while state.level() < levels {
        let (k, beta, n, alpha) = next_placement(&state);
        needed = needed.max(n + 1);
        state.alpha.push(alpha);
        state.beta.push(beta);
        state.mask_intervals.push((k, n));
    }
    needed
}

#[cfg(test)]
mod tests {
    use super::super::{construct, ScheduleConfig};
    use super::*;

    #[test]
    fn support_indices() {
        let cases = [(0, 0), (1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)];
        for (m, want) in cases {
            assert_eq!(last_piece(&Freq::from(m)), want, "m={m}");
        }
        let s = stein(8).unwrap();
        for m in 0..200i64 {
            let m = Freq::from(m);
            let last = (0..s.len()).rev().find(|&k| !s.piece(k).multiplier(&m).unwrap().is_zero());
            if let Some(last) = last {
                assert_eq!(last_piece(&m), last);
            }
        }
    }

    #[test]
    fn exact_placement_is_exact() {
        let levels = 12;
        let pieces = exact_placement_pieces(levels);
        let s = stein(pieces - 1).unwrap();
        let st = construct(&s, &ScheduleConfig::new(1e-3, levels).unwrap(), Placement::Exact).unwrap();
        assert_eq!(st.level(), levels);
        assert!(st.epsilon.iter().all(|&e| e == 0.0));
        assert!(st.measured.iter().all(|&e| e == 0.0));
        let short = stein(pieces - 2).unwrap();
        assert!(matches!(
            construct(&short, &ScheduleConfig::new(1e-3, levels).unwrap(), Placement::Exact),
            Err(Error::HorizonExhausted(_))
        ));
    }

    #[test]
    fn piece_count_grows_linearly() {
        assert_eq!(exact_placement_pieces(1), 2);
        let p64 = exact_placement_pieces(64);
        let p128 = exact_placement_pieces(128);
        assert!(p128 - p64 <= 4 * 64 + 4, "{p64} {p128}");
    }
}
