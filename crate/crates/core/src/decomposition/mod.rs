//! Finite-rank Fourier-multiplier decompositions of the identity on `H¹`.
//!
//! A decomposition is an ordered list of pieces `P_k`. Diagonal pieces act by
//! `P_k(e_m) = λ_k(m) e_m`; kernel pieces map `e_m` to a finite combination of
//! exponentials. Multiplier values are exact rationals so that partition-of-
//! unity checks and exact placement can be decided without rounding.

mod envelope;
mod json;
mod probe;

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::freq::{self, Freq};
use crate::torus::{MatrixTrigPoly, ScalarTrigPoly};
use crate::{Error, Result};

pub(crate) use envelope::{last_exceeding, Quantity};
pub use probe::{
    fejer_kernel, matrix_probe, random_analytic_poly, unconditionality_probe, vertex_max, ProbeConfig, ProbeMode,
    ProbeResult,
};

/// Exact complex rational.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl QComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    /// The exact binary value of a finite double pair.
    pub fn from_c64(c: Complex64) -> Option<Self> {
        Some(Self::new(BigRational::from_float(c.re)?, BigRational::from_float(c.im)?))
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `|z|` when it is rational, i.e. when `z` lies on an axis.
    pub fn abs_exact(&self) -> Option<BigRational> {
        if self.im.is_zero() {
            Some(self.re.abs())
        } else if self.re.is_zero() {
            Some(self.im.abs())
        } else {
            None
        }
    }

    pub fn norm(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }
}

impl Add for &QComplex {
    type Output = QComplex;
    fn add(self, rhs: &QComplex) -> QComplex {
        QComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &QComplex {
    type Output = QComplex;
    fn sub(self, rhs: &QComplex) -> QComplex {
        QComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl AddAssign<&QComplex> for QComplex {
    fn add_assign(&mut self, rhs: &QComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Neg for QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex::new(-self.re, -self.im)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    freq::ratio_to_f64(r.numer(), r.denom())
}

/// A nonnegative magnitude, exact when every contribution was rational.
#[derive(Clone, Debug)]
pub struct Magnitude {
    exact: Option<BigRational>,
    approx: f64,
}

impl Magnitude {
    pub fn zero() -> Self {
        Self {
            exact: Some(BigRational::zero()),
            approx: 0.0,
        }
    }

    pub fn of(z: &QComplex) -> Self {
        Self {
            exact: z.abs_exact(),
            approx: z.norm(),
        }
    }

    pub fn add(&mut self, other: &Magnitude) {
        self.exact = match (self.exact.take(), &other.exact) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        self.approx += other.approx;
    }

    pub fn value(&self) -> f64 {
        self.exact.as_ref().map_or(self.approx, rational_to_f64)
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    /// `self > threshold` (or `>=` when `inclusive`).
    pub fn exceeds(&self, threshold: &BigRational, inclusive: bool) -> bool {
        match &self.exact {
            Some(v) => {
                if inclusive {
                    v >= threshold
                } else {
                    v > threshold
                }
            }
            None => {
                let t = rational_to_f64(threshold);
                if inclusive {
                    self.approx >= t
                } else {
                    self.approx > t
                }
            }
        }
    }
}

/// ℓ¹ norm of the coefficients of an exact exponential sum. It bounds the
/// `L¹(𝕋)` norm from above and equals it for a single exponential.
pub fn coeff_magnitude(v: &BTreeMap<Freq, QComplex>) -> Magnitude {
    let mut total = Magnitude::zero();
    for c in v.values() {
        total.add(&Magnitude::of(c));
    }
    total
}

/// Trapezoidal symbol: `0` up to `rise_start`, linear up to `1` at
/// `rise_end`, flat until `fall_start`, linear down to `0` at `fall_end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ramp {
    pub rise_start: Freq,
    pub rise_end: Freq,
    pub fall_start: Freq,
    pub fall_end: Freq,
}

impl Ramp {
    pub fn new(rise_start: Freq, rise_end: Freq, fall_start: Freq, fall_end: Freq) -> Result<Self> {
        if !(rise_start < rise_end && rise_end <= fall_start && fall_start < fall_end) {
            return Err(Error::InvalidArgument(format!(
                "ramp knots must satisfy a < b <= c < d, got [{rise_start}, {rise_end}, {fall_start}, {fall_end}]"
            )));
        }
        Ok(Self {
            rise_start,
            rise_end,
            fall_start,
            fall_end,
        })
    }

    pub fn value(&self, m: &Freq) -> BigRational {
        if *m <= self.rise_start || *m >= self.fall_end {
            BigRational::zero()
        } else if *m < self.rise_end {
            BigRational::new(m - &self.rise_start, &self.rise_end - &self.rise_start)
        } else if *m <= self.fall_start {
            BigRational::one()
        } else {
            BigRational::new(&self.fall_end - m, &self.fall_end - &self.fall_start)
        }
    }

    pub fn knots(&self) -> [&Freq; 4] {
        [&self.rise_start, &self.rise_end, &self.fall_start, &self.fall_end]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiagonalSymbol {
    Sparse(BTreeMap<Freq, QComplex>),
    Ramp(Ramp),
}

/// A finite kernel, stored by input frequency.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Kernel {
    columns: BTreeMap<Freq, BTreeMap<Freq, QComplex>>,
}

impl Kernel {
    /// Entries `(output, input, value)`; zeros are dropped and repeated
    /// positions accumulate.
    pub fn new<I: IntoIterator<Item = (Freq, Freq, QComplex)>>(entries: I) -> Self {
        let mut columns: BTreeMap<Freq, BTreeMap<Freq, QComplex>> = BTreeMap::new();
        for (out, input, v) in entries {
            *columns.entry(input).or_default().entry(out).or_default() += &v;
        }
        for col in columns.values_mut() {
            col.retain(|_, v| !v.is_zero());
        }
        columns.retain(|_, col| !col.is_empty());
        Self { columns }
    }

    pub fn column(&self, input: &Freq) -> Option<&BTreeMap<Freq, QComplex>> {
        self.columns.get(input)
    }

    pub fn columns(&self) -> impl Iterator<Item = (&Freq, &BTreeMap<Freq, QComplex>)> {
        self.columns.iter()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierPiece {
    Diagonal(DiagonalSymbol),
    Kernel(Kernel),
}

impl MultiplierPiece {
    pub fn sparse<I: IntoIterator<Item = (Freq, QComplex)>>(values: I) -> Self {
        let map = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self::Diagonal(DiagonalSymbol::Sparse(map))
    }

    pub fn ramp(ramp: Ramp) -> Self {
        Self::Diagonal(DiagonalSymbol::Ramp(ramp))
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Self::Diagonal(_))
    }

    /// `λ(m)` for diagonal pieces.
    pub fn multiplier(&self, m: &Freq) -> Option<QComplex> {
        match self {
            Self::Diagonal(DiagonalSymbol::Sparse(map)) => Some(map.get(m).cloned().unwrap_or_default()),
            Self::Diagonal(DiagonalSymbol::Ramp(r)) => Some(QComplex::real(r.value(m))),
            Self::Kernel(_) => None,
        }
    }

    /// `P(e_m)` as exact coefficients.
    pub fn apply_monomial(&self, m: &Freq) -> BTreeMap<Freq, QComplex> {
        match self {
            Self::Diagonal(_) => {
                let v = self.multiplier(m).unwrap();
                if v.is_zero() {
                    BTreeMap::new()
                } else {
                    BTreeMap::from([(m.clone(), v)])
                }
            }
            Self::Kernel(k) => k.column(m).cloned().unwrap_or_default(),
        }
    }

    /// `‖P(e_m)‖` measured by coefficient ℓ¹ norm.
    pub fn magnitude_at(&self, m: &Freq) -> Magnitude {
        match self {
            Self::Diagonal(_) => Magnitude::of(&self.multiplier(m).unwrap()),
            Self::Kernel(k) => k.column(m).map_or_else(Magnitude::zero, coeff_magnitude),
        }
    }

    /// Inclusive range of input frequencies outside of which `P` vanishes.
    fn input_span(&self) -> Option<(Freq, Freq)> {
        match self {
            Self::Diagonal(DiagonalSymbol::Ramp(r)) => Some((&r.rise_start + 1, &r.fall_end - 1)),
            Self::Diagonal(DiagonalSymbol::Sparse(map)) => {
                Some((map.keys().next()?.clone(), map.keys().next_back()?.clone()))
            }
            Self::Kernel(k) => Some((k.columns.keys().next()?.clone(), k.columns.keys().next_back()?.clone())),
        }
    }

    /// Input frequencies where a non-ramp piece can be nonzero.
    fn point_support(&self) -> Vec<&Freq> {
        match self {
            Self::Diagonal(DiagonalSymbol::Ramp(_)) => Vec::new(),
            Self::Diagonal(DiagonalSymbol::Sparse(map)) => map.keys().collect(),
            Self::Kernel(k) => k.columns.keys().collect(),
        }
    }
}

/// An ordered list of pieces with a stabbing index on their input spans.
#[derive(Clone, Debug)]
pub struct MultiplierDecomposition {
    pieces: Vec<MultiplierPiece>,
    /// `(lo, hi, piece)` sorted by `lo`.
    spans: Vec<(Freq, Freq, usize)>,
    /// `prefix_max_hi[i] = max(spans[..=i].hi)`.
    prefix_max_hi: Vec<Freq>,
}

impl PartialEq for MultiplierDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces
    }
}

impl MultiplierDecomposition {
    pub fn new(pieces: Vec<MultiplierPiece>) -> Self {
        let mut spans: Vec<(Freq, Freq, usize)> = pieces
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.input_span().map(|(lo, hi)| (lo, hi, k)))
            .collect();
        spans.sort();
        let mut prefix_max_hi: Vec<Freq> = Vec::with_capacity(spans.len());
        for (_, hi, _) in &spans {
            let next = match prefix_max_hi.last() {
                Some(prev) if prev > hi => prev.clone(),
                _ => hi.clone(),
            };
            prefix_max_hi.push(next);
        }
        Self {
            pieces,
            spans,
            prefix_max_hi,
        }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn pieces(&self) -> &[MultiplierPiece] {
        &self.pieces
    }

    pub fn piece(&self, k: usize) -> &MultiplierPiece {
        &self.pieces[k]
    }

    pub fn is_diagonal(&self) -> bool {
        self.pieces.iter().all(MultiplierPiece::is_diagonal)
    }

    /// Indices (ascending) of the pieces whose span contains `m`.
    pub fn pieces_at(&self, m: &Freq) -> Vec<usize> {
        let end = self.spans.partition_point(|(lo, _, _)| lo <= m);
        let mut out = Vec::new();
        for i in (0..end).rev() {
            if self.prefix_max_hi[i] < *m {
                break;
            }
            if self.spans[i].1 >= *m {
                out.push(self.spans[i].2);
            }
        }
        out.sort_unstable();
        out
    }

    /// `Σ_{k selected} P_k(e_m)` exactly.
    pub fn exact_action<F: Fn(usize) -> bool>(&self, m: &Freq, select: F) -> BTreeMap<Freq, QComplex> {
        let mut acc: BTreeMap<Freq, QComplex> = BTreeMap::new();
        for k in self.pieces_at(m) {
            if select(k) {
                for (out, v) in self.pieces[k].apply_monomial(m) {
                    *acc.entry(out).or_default() += &v;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        acc
    }

    /// `Σ_{k selected} ‖P_k(e_m)‖`.
    pub fn magnitude_sum<F: Fn(usize) -> bool>(&self, m: &Freq, select: F) -> Magnitude {
        let mut total = Magnitude::zero();
        for k in self.pieces_at(m) {
            if select(k) {
                total.add(&self.pieces[k].magnitude_at(m));
            }
        }
        total
    }

    /// `‖Σ_{k ≤ n} P_k(e_m) − e_m‖` in coefficient ℓ¹ norm (exactly `|Σ λ_k(m) − 1|`
    /// for diagonal decompositions).
    pub fn completeness_residual(&self, m: &Freq, n: usize) -> Magnitude {
        let mut action = self.exact_action(m, |k| k <= n);
        *action.entry(m.clone()).or_default() += &(-QComplex::one());
        action.retain(|_, v| !v.is_zero());
        coeff_magnitude(&action)
    }

    /// Smallest `N` such that the completeness residual at `m` is at most
    /// `tol` for every partial sum from `N` up to the last piece.
    pub fn horizon(&self, m: &Freq, tol: f64) -> Option<usize> {
        let mut best = None;
        for n in (0..self.len()).rev() {
            if self.completeness_residual(m, n).value() <= tol {
                best = Some(n);
            } else {
                break;
            }
        }
        best
    }

    /// `Σ_{k < len(a)} a_k P_k(e_m)` in floating point.
    fn apply_monomial(&self, a: &[f64], m: &Freq, c: Complex64, out: &mut ScalarTrigPoly) {
        let mut acc: BTreeMap<Freq, Complex64> = BTreeMap::new();
        for k in self.pieces_at(m) {
            if k >= a.len() || a[k] == 0.0 {
                continue;
            }
            for (o, v) in self.pieces[k].apply_monomial(m) {
                *acc.entry(o).or_default() += v.to_c64() * a[k];
            }
        }
        for (o, v) in acc {
            out.add_term(o, v * c);
        }
    }

    /// Input frequencies of sparse and kernel pieces together with the knots
    /// of ramp pieces; between consecutive points every piece is affine.
    pub(crate) fn breakpoints<F: Fn(usize) -> bool>(&self, select: F) -> (Vec<Freq>, Vec<Freq>) {
        let mut knots = Vec::new();
        let mut points = Vec::new();
        for (k, p) in self.pieces.iter().enumerate() {
            if !select(k) {
                continue;
            }
            match p {
                MultiplierPiece::Diagonal(DiagonalSymbol::Ramp(r)) => knots.extend(r.knots().into_iter().cloned()),
                _ => points.extend(p.point_support().into_iter().cloned()),
            }
        }
        knots.sort();
        knots.dedup();
        points.sort();
        points.dedup();
        (knots, points)
    }
}

/// The dyadic trapezoids `W_0, …, W_n`: `W_0` equals `1` at `0` and `1` and
/// vanishes from `2` on; for `k ≥ 1`, `W_k` is the triangle on
/// `[2^{k−1}, 2^{k+1}]` peaking at `2^k`. They sum to `1` on `[0, 2^n]`.
pub fn stein(n: usize) -> Result<MultiplierDecomposition> {
    if n < 1 {
        return Err(Error::InvalidArgument("the Stein decomposition needs n >= 1".into()));
    }
    let mut pieces = vec![MultiplierPiece::ramp(Ramp::new(
        Freq::from(-1),
        Freq::zero(),
        Freq::one(),
        Freq::from(2),
    )?)];
    for k in 1..=n as u64 {
        pieces.push(MultiplierPiece::ramp(Ramp::new(
            freq::pow2(k - 1),
            freq::pow2(k),
            freq::pow2(k),
            freq::pow2(k + 1),
        )?));
    }
    Ok(MultiplierDecomposition::new(pieces))
}

/// Real coefficients `a_k` with `|a_k| ≤ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value.abs() > 1.0 {
                return Err(Error::CoefficientOutOfRange { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// `{0,1}` mask that is `1` on the inclusive index intervals.
    pub fn from_intervals(len: usize, intervals: &[(usize, usize)]) -> Self {
        let mut v = vec![0.0; len];
        for &(lo, hi) in intervals {
            for x in v.iter_mut().take(hi + 1).skip(lo) {
                *x = 1.0;
            }
        }
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_len(d: &MultiplierDecomposition, a: &CoefficientVector) -> Result<()> {
    if a.len() > d.len() {
        return Err(Error::TooManyCoefficients {
            len: a.len(),
            pieces: d.len(),
        });
    }
    Ok(())
}

/// `Σ_k a_k P_k(f)`.
pub fn apply_sum(d: &MultiplierDecomposition, a: &CoefficientVector, f: &ScalarTrigPoly) -> Result<ScalarTrigPoly> {
    check_len(d, a)?;
    let mut out = ScalarTrigPoly::zero();
    for (m, c) in f.terms() {
        d.apply_monomial(a.values(), m, *c, &mut out);
    }
    Ok(out)
}

/// `Σ_k a_k (P_k ⊗ Id)(F)`, applied entry by entry.
pub fn amplified_apply(
    d: &MultiplierDecomposition,
    a: &CoefficientVector,
    f: &MatrixTrigPoly,
) -> Result<MatrixTrigPoly> {
    check_len(d, a)?;
    Ok(f.map_entries(|e| {
        let mut out = ScalarTrigPoly::zero();
        for (m, c) in e.terms() {
            d.apply_monomial(a.values(), m, *c, &mut out);
        }
        out
    }))
}

/// `max_{m ∈ freqs} Σ_{t ≥ k} ‖P_t(e_m)‖`, which bounds
/// `‖Σ_{t=k'}^{l} a_t P_t(e_m)‖` for every `l ≥ k' ≥ k` and `|a_t| ≤ 1`.
pub fn tail_bound<'a, I: IntoIterator<Item = &'a Freq>>(d: &MultiplierDecomposition, freqs: I, k: usize) -> f64 {
    tail_magnitude(d, freqs, k).value()
}

pub(crate) fn tail_magnitude<'a, I: IntoIterator<Item = &'a Freq>>(
    d: &MultiplierDecomposition,
    freqs: I,
    k: usize,
) -> Magnitude {
    let mut worst = Magnitude::zero();
    for m in freqs {
        let t = d.magnitude_sum(m, |t| t >= k);
        let larger = match (t.exact(), worst.exact()) {
            (Some(a), Some(b)) => a > b,
            _ => t.value() > worst.value(),
        };
        if larger {
            worst = t;
        }
    }
    worst
}

/// Converts a finite double to an exact rational.
pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite")))
}

/// `⌊r⌋`.
pub(crate) fn floor(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}


#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn value(d: &MultiplierDecomposition, k: usize, m: i64) -> BigRational {
        d.piece(k).multiplier(&Freq::from(m)).unwrap().re
    }

    #[test]
    fn stein_examples() {
        let s = stein(4).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(value(&s, 1, 2), q(1, 1));
        assert_eq!(value(&s, 1, 3), q(1, 2));
        assert_eq!(value(&s, 2, 3), q(1, 2));
        assert_eq!(value(&s, 0, 0), q(1, 1));
        assert_eq!(value(&s, 0, 1), q(1, 1));
        assert_eq!(value(&s, 0, 2), q(0, 1));
        assert_eq!(value(&s, 2, 4), q(1, 1));
        assert!(stein(0).is_err());
    }

    #[test]
    fn stein_partition_of_unity() {
        let n = 6;
        let s = stein(n).unwrap();
        for m in 0..=(1i64 << n) {
            let total: BigRational = (0..s.len()).map(|k| value(&s, k, m)).sum();
            assert_eq!(total, q(1, 1), "m={m}");
        }
        assert_eq!(value(&s, 0, -3), q(0, 1));
    }

    #[test]
    fn stabbing_index_matches_scan() {
        let s = stein(7).unwrap();
        for m in -2..300i64 {
            let m = Freq::from(m);
            let direct: Vec<usize> = (0..s.len())
                .filter(|&k| !s.piece(k).multiplier(&m).unwrap().is_zero())
                .collect();
            let indexed: Vec<usize> = s
                .pieces_at(&m)
                .into_iter()
                .filter(|&k| !s.piece(k).multiplier(&m).unwrap().is_zero())
                .collect();
            assert_eq!(direct, indexed);
        }
    }

    #[test]
    fn apply_sum_examples() {
        let s = stein(5).unwrap();
        let f = ScalarTrigPoly::exp(13);
        assert_eq!(apply_sum(&s, &CoefficientVector::ones(6), &f).unwrap(), f);
        assert!(apply_sum(&s, &CoefficientVector::zeros(6), &f).unwrap().is_zero());
        let mut a = vec![0.0; 6];
        a[0] = 1.0;
        let out = apply_sum(&s, &CoefficientVector::new(a).unwrap(), &ScalarTrigPoly::exp(1)).unwrap();
        assert_eq!(out, ScalarTrigPoly::exp(1));
        assert!(matches!(
            apply_sum(&s, &CoefficientVector::ones(7), &f),
            Err(Error::TooManyCoefficients { len: 7, pieces: 6 })
        ));
        assert!(CoefficientVector::new(vec![0.5, -1.5]).is_err());
    }

    #[test]
    fn amplified_constant_only_sees_frequency_zero() {
        let s = stein(3).unwrap();
        let x = crate::torus::CMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 1.0));
        let f = MatrixTrigPoly::constant(&x);
        let mut a = vec![0.0; 4];
        a[0] = -0.5;
        a[2] = 1.0;
        let out = amplified_apply(&s, &CoefficientVector::new(a).unwrap(), &f).unwrap();
        assert_eq!(out, MatrixTrigPoly::constant(&(x * Complex64::new(-0.5, 0.0))));
    }

    #[test]
    fn tail_bound_examples() {
        let s = stein(6).unwrap();
        assert_eq!(tail_bound(&s, &[Freq::from(1)], 2), 0.0);
        assert_eq!(tail_bound(&s, &[Freq::from(4)], 0), 1.0);
        assert_eq!(tail_bound(&s, &[] as &[Freq], 0), 0.0);
        assert_eq!(tail_bound(&s, &[Freq::from(6)], 0), 1.0);
    }

    #[test]
    fn horizon_and_residuals() {
        let s = stein(5).unwrap();
        assert_eq!(s.horizon(&Freq::from(0), 0.0), Some(0));
        assert_eq!(s.horizon(&Freq::from(5), 0.0), Some(3));
        // Beyond 2^5 the last triangle is only partially covered.
        assert_eq!(s.horizon(&Freq::from(40), 0.0), None);
        assert_eq!(s.completeness_residual(&Freq::from(40), 5).exact().unwrap(), &q(1, 4));
    }

    #[test]
    fn kernel_pieces() {
        let k = Kernel::new([
            (Freq::from(3), Freq::from(1), QComplex::one()),
            (Freq::from(5), Freq::from(1), QComplex::real(q(-1, 2))),
            (Freq::from(7), Freq::from(2), QComplex::zero()),
        ]);
        let p = MultiplierPiece::Kernel(k);
        assert_eq!(p.magnitude_at(&Freq::from(1)).exact().unwrap(), &q(3, 2));
        assert!(p.apply_monomial(&Freq::from(2)).is_empty());
        let d = MultiplierDecomposition::new(vec![p]);
        let out = apply_sum(&d, &CoefficientVector::ones(1), &ScalarTrigPoly::exp(1)).unwrap();
        assert_eq!(out.coeff(&Freq::from(5)), Complex64::new(-0.5, 0.0));
    }

    #[test]
    fn ramp_validation() {
        assert!(Ramp::new(Freq::from(2), Freq::from(2), Freq::from(3), Freq::from(4)).is_err());
        assert!(Ramp::new(Freq::from(0), Freq::from(2), Freq::from(1), Freq::from(4)).is_err());
    }
}
