//! Largest frequency at which a sum of pieces is still large.
//!
//! Ramp pieces are affine between consecutive knots, so their sum is handled
//! interval by interval in exact arithmetic; sparse and kernel pieces only
//! contribute at their listed input frequencies, which are checked one by one.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{coeff_magnitude, floor, DiagonalSymbol, Magnitude, MultiplierDecomposition, MultiplierPiece};
use crate::freq::Freq;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Quantity {
    /// `Σ_k ‖P_k(e_m)‖`, which dominates every combination with `|a_k| ≤ 1`.
    AbsSum,
    /// `‖Σ_k P_k(e_m)‖`.
    SumNorm,
}

fn ramp_sum<F: Fn(usize) -> bool>(d: &MultiplierDecomposition, m: &Freq, select: &F) -> BigRational {
    let mut total = BigRational::zero();
    for k in d.pieces_at(m) {
        if let (true, MultiplierPiece::Diagonal(DiagonalSymbol::Ramp(r))) = (select(k), d.piece(k)) {
            total += r.value(m);
        }
    }
    total
}

fn quantity_at<F: Fn(usize) -> bool>(d: &MultiplierDecomposition, m: &Freq, select: &F, q: Quantity) -> Magnitude {
    match q {
        Quantity::AbsSum => d.magnitude_sum(m, select),
        Quantity::SumNorm => coeff_magnitude(&d.exact_action(m, select)),
    }
}

fn exceeds(v: &BigRational, threshold: &BigRational, inclusive: bool) -> bool {
    if inclusive {
        v >= threshold
    } else {
        v > threshold
    }
}

/// Largest `m` with `quantity(m) > threshold` (`≥` when `inclusive`), or
/// `None` when there is none. The answer is exact for ramp-only selections
/// and never too small otherwise.
pub(crate) fn last_exceeding<F: Fn(usize) -> bool>(
    d: &MultiplierDecomposition,
    select: F,
    quantity: Quantity,
    threshold: &BigRational,
    inclusive: bool,
) -> Option<Freq> {
    assert!(threshold.is_positive(), "threshold must be positive");
    let (knots, points) = d.breakpoints(&select);

    let from_points = points
        .iter()
        .rev()
        .find(|p| quantity_at(d, p, &select, quantity).exceeds(threshold, inclusive))
        .cloned();

    let mut from_ramps = None;
    for pair in knots.windows(2).rev() {
        let (a, b) = (&pair[0], &pair[1]);
        let rb = ramp_sum(d, b, &select);
        if exceeds(&rb, threshold, inclusive) {
            from_ramps = Some(b.clone());
            break;
        }
        let ra = ramp_sum(d, a, &select);
        if exceeds(&ra, threshold, inclusive) {
            // Decreasing on [a, b]: r(m) = ra − (ra − rb)(m − a)/(b − a).
            let width = BigRational::from_integer(b - a);
            let x = BigRational::from_integer(a.clone()) + (&ra - threshold) * width / (&ra - &rb);
            let m = if inclusive || !x.is_integer() {
                floor(&x)
            } else {
                x.to_integer() - Freq::one()
            };
            from_ramps = Some(m);
            break;
        }
    }

    match (from_points, from_ramps) {
        (Some(p), Some(r)) => Some(p.max(r)),
        (p, r) => p.or(r),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{stein, QComplex};
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn brute<F: Fn(usize) -> bool>(
        d: &MultiplierDecomposition,
        select: F,
        quantity: Quantity,
        t: &BigRational,
        inclusive: bool,
        upto: i64,
    ) -> Option<Freq> {
        (0..=upto)
            .rev()
            .map(Freq::from)
            .find(|m| {
                let v = quantity_at(d, m, &select, quantity);
                v.exceeds(t, inclusive)
            })
    }

    #[test]
    fn matches_brute_force_on_stein() {
        let s = stein(6).unwrap();
        for k_max in 0..6 {
            for t in [q(1, 1000), q(1, 3), q(1, 2), q(1, 1), q(3, 4)] {
                for inclusive in [false, true] {
                    for quantity in [Quantity::AbsSum, Quantity::SumNorm] {
                        let sel = |k: usize| k <= k_max;
                        let got = last_exceeding(&s, sel, quantity, &t, inclusive);
                        let want = brute(&s, sel, quantity, &t, inclusive, 200);
                        assert_eq!(got, want, "k_max={k_max} t={t} inclusive={inclusive}");
                    }
                }
            }
        }
    }

    #[test]
    fn masks_with_gaps() {
        let s = stein(7).unwrap();
        let sel = |k: usize| k == 2 || (4..=5).contains(&k);
        let t = q(1, 10);
        assert_eq!(
            last_exceeding(&s, sel, Quantity::SumNorm, &t, false),
            brute(&s, sel, Quantity::SumNorm, &t, false, 300)
        );
    }

    #[test]
    fn sparse_points_are_seen() {
        let s = stein(3).unwrap();
        let mut pieces = s.pieces().to_vec();
        pieces.push(MultiplierPiece::sparse([(Freq::from(100), QComplex::real(q(1, 2)))]));
        let d = MultiplierDecomposition::new(pieces);
        assert_eq!(
            last_exceeding(&d, |_| true, Quantity::AbsSum, &q(1, 4), false),
            Some(Freq::from(100))
        );
        assert_eq!(
            last_exceeding(&d, |k| k < 4, Quantity::AbsSum, &q(1, 4), false),
            brute(&d, |k| k < 4, Quantity::AbsSum, &q(1, 4), false, 200)
        );
    }
}
