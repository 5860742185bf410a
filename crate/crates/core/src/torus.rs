//! Trigonometric polynomials on the torus `T = [0, 1)`.
//!
//! `e_m(t) = exp(2πimt)`. Polynomials are stored as sparse frequency maps; the
//! `L¹` and `H¹(S¹_d)` norms are computed by the equispaced rule
//! `(1/M) Σ_j |p(j/M)|`, which requires `M ≥ 8 (max|m| + 1)`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::freq::{self, Freq};
use crate::schatten;
use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Minimum ratio between quadrature nodes and `max|frequency| + 1`.
pub const OVERSAMPLING: usize = 8;

/// Largest grid the crate will allocate.
pub const MAX_NODES: usize = 1 << 26;

/// Sparse scalar trigonometric polynomial `Σ c_m e_m`. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarTrigPoly {
    coeffs: BTreeMap<Freq, Complex64>,
}

impl ScalarTrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: Freq, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    /// `e_m`.
    pub fn exp(m: impl Into<Freq>) -> Self {
        Self::monomial(m.into(), Complex64::new(1.0, 0.0))
    }

    /// Builds a polynomial from terms, summing repeated frequencies.
    pub fn from_terms<I: IntoIterator<Item = (Freq, Complex64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Freq, c: Complex64) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &ScalarTrigPoly, c: Complex64) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.coeffs {
            self.add_term(m.clone(), *v * c);
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_scaled(self, c);
        p
    }

    pub fn coeff(&self, m: &Freq) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Freq, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Membership predicate for `H¹`: no negative frequencies.
    pub fn is_analytic(&self) -> bool {
        self.coeffs.keys().next().map_or(true, |m| !m.is_negative())
    }

    /// `max |m|` over the support, zero for the zero polynomial.
    pub fn degree(&self) -> Freq {
        let lo = self.coeffs.keys().next().map(|m| m.abs());
        let hi = self.coeffs.keys().next_back().map(|m| m.abs());
        match (lo, hi) {
            (Some(a), Some(b)) => a.max(b),
            _ => Freq::zero(),
        }
    }

    /// Multiplication by `e_k`.
    pub fn shift(&self, k: &Freq) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(m, c)| (m + k, *c)).collect(),
        }
    }

    /// Sum of coefficient moduli, an upper bound for the `L¹` norm.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// Largest coefficient modulus difference against `other`.
    pub fn max_coeff_diff(&self, other: &ScalarTrigPoly) -> f64 {
        let keys: BTreeSet<&Freq> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.into_iter()
            .map(|m| (self.coeff(m) - other.coeff(m)).norm())
            .fold(0.0, f64::max)
    }
}

/// Point evaluation `Σ c_m e_m(t)`; phases are reduced exactly so huge
/// frequencies stay accurate.
pub fn evaluate(p: &ScalarTrigPoly, t: f64) -> Complex64 {
    p.terms()
        .map(|(m, c)| c * Complex64::from_polar(1.0, TAU * freq::phase_turns(m, t)))
        .sum()
}

/// Equispaced nodes `t_j = j / M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureGrid {
    nodes: usize,
}

impl QuadratureGrid {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes == 0 || nodes > MAX_NODES {
            return Err(Error::InvalidArgument(format!(
                "grid size {nodes} outside 1..={MAX_NODES}"
            )));
        }
        Ok(Self { nodes })
    }

    /// Smallest power-of-two grid satisfying the oversampling invariant for
    /// polynomials of degree at most `degree`.
    pub fn for_degree(degree: &Freq) -> Result<Self> {
        let required = Self::required_nodes(degree);
        match required.to_usize() {
            Some(r) if r <= MAX_NODES => Self::new(r.next_power_of_two().min(MAX_NODES)),
            _ => Err(Error::GridTooCoarse {
                nodes: MAX_NODES,
                degree: degree.to_string(),
                required: required.to_string(),
            }),
        }
    }

    pub fn required_nodes(degree: &Freq) -> Freq {
        (degree + 1u32) * OVERSAMPLING
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.nodes as f64
    }

    pub fn doubled(&self) -> Result<Self> {
        Self::new(self.nodes * 2)
    }

    /// Enforces `M ≥ 8 (degree + 1)`.
    pub fn check(&self, degree: &Freq) -> Result<()> {
        let required = Self::required_nodes(degree);
        if Freq::from(self.nodes) < required {
            return Err(Error::GridTooCoarse {
                nodes: self.nodes,
                degree: degree.to_string(),
                required: required.to_string(),
            });
        }
        Ok(())
    }

    fn twiddles(&self) -> Vec<Complex64> {
        let m = self.nodes as f64;
        (0..self.nodes)
            .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / m))
            .collect()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Values `p(j/M)` for `j = 0..M`. No oversampling check: on a coarse grid this
/// samples the aliased polynomial.
pub fn node_values(p: &ScalarTrigPoly, grid: &QuadratureGrid) -> Vec<Complex64> {
    let m = grid.nodes();
    let folded: Vec<(usize, Complex64)> =
        p.terms().map(|(k, c)| (freq::residue(k, m), *c)).collect();
    if folded.len() <= 16 {
        let tw = grid.twiddles();
        return (0..m)
            .map(|j| folded.iter().map(|&(r, c)| c * tw[(r * j) % m]).sum())
            .collect();
    }
    let mut buf = vec![Complex64::zero(); m];
    for (r, c) in folded {
        buf[r] += c;
    }
    let fft = PLANNER.with(|pl| pl.borrow_mut().plan_fft_inverse(m));
    fft.process(&mut buf);
    buf
}

/// `L¹(T)` norm by the equispaced rule on `grid`.
pub fn l1_norm(p: &ScalarTrigPoly, grid: &QuadratureGrid) -> Result<f64> {
    grid.check(&p.degree())?;
    Ok(mean_abs(&node_values(p, grid)))
}

pub(crate) fn mean_abs(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).sum::<f64>() / values.len() as f64
}

/// Result of an adaptive quadrature.
#[derive(Clone, Copy, Debug)]
pub struct Converged {
    pub value: f64,
    pub nodes: usize,
}

/// `L¹` norm with automatic grid doubling: starts from the oversampled grid
/// and doubles until two successive rules agree to `rel_tol`.
pub fn l1_norm_converged(p: &ScalarTrigPoly, rel_tol: f64, max_nodes: usize) -> Result<Converged> {
    let mut grid = QuadratureGrid::for_degree(&p.degree())?;
    let mut prev = l1_norm(p, &grid)?;
    if prev == 0.0 {
        return Ok(Converged { value: 0.0, nodes: grid.nodes() });
    }
    while grid.nodes() * 2 <= max_nodes.min(MAX_NODES) {
        grid = grid.doubled()?;
        let next = l1_norm(p, &grid)?;
        if (next - prev).abs() <= rel_tol * next.abs() {
            return Ok(Converged { value: next, nodes: grid.nodes() });
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged {
        tolerance: rel_tol,
        max_nodes,
    })
}

/// Matrix-valued trigonometric polynomial, stored entrywise (row-major) so
/// that very sparse spectra such as `α_i + β_j` stay cheap.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTrigPoly {
    d: usize,
    entries: Vec<ScalarTrigPoly>,
}

impl MatrixTrigPoly {
    pub fn zeros(d: usize) -> Self {
        assert!(d > 0, "matrix size must be positive");
        Self {
            d,
            entries: vec![ScalarTrigPoly::zero(); d * d],
        }
    }

    /// The constant polynomial `X`.
    pub fn constant(x: &CMatrix) -> Self {
        assert_eq!(x.nrows(), x.ncols(), "square matrix expected");
        let mut p = Self::zeros(x.nrows());
        for i in 0..p.d {
            for j in 0..p.d {
                p.entries[i * p.d + j] = ScalarTrigPoly::monomial(Freq::zero(), x[(i, j)]);
            }
        }
        p
    }

    /// Builds `Σ_m C_m e_m` from matrix coefficients.
    pub fn from_coeffs<I: IntoIterator<Item = (Freq, CMatrix)>>(d: usize, coeffs: I) -> Result<Self> {
        let mut p = Self::zeros(d);
        for (m, c) in coeffs {
            if c.nrows() != d || c.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: c.nrows().max(c.ncols()),
                });
            }
            for i in 0..d {
                for j in 0..d {
                    p.entries[i * d + j].add_term(m.clone(), c[(i, j)]);
                }
            }
        }
        Ok(p)
    }

    pub fn from_entries(d: usize, entries: Vec<ScalarTrigPoly>) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: entries.len(),
            });
        }
        Ok(Self { d, entries })
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarTrigPoly {
        &self.entries[i * self.d + j]
    }

    pub fn entries(&self) -> &[ScalarTrigPoly] {
        &self.entries
    }

    /// Applies a scalar map to every entry.
    pub fn map_entries<F: Fn(&ScalarTrigPoly) -> ScalarTrigPoly>(&self, f: F) -> Self {
        Self {
            d: self.d,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn frequencies(&self) -> BTreeSet<Freq> {
        self.entries
            .iter()
            .flat_map(|e| e.terms().map(|(m, _)| m.clone()))
            .collect()
    }

    pub fn coefficient(&self, m: &Freq) -> CMatrix {
        CMatrix::from_fn(self.d, self.d, |i, j| self.entry(i, j).coeff(m))
    }

    pub fn degree(&self) -> Freq {
        self.entries
            .iter()
            .map(|e| e.degree())
            .max()
            .unwrap_or_default()
    }

    pub fn is_analytic(&self) -> bool {
        self.entries.iter().all(|e| e.is_analytic())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn evaluate(&self, t: f64) -> CMatrix {
        CMatrix::from_fn(self.d, self.d, |i, j| evaluate(self.entry(i, j), t))
    }

    /// Largest coefficient difference over all entries.
    pub fn max_coeff_diff(&self, other: &MatrixTrigPoly) -> f64 {
        assert_eq!(self.d, other.d);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_coeff_diff(b))
            .fold(0.0, f64::max)
    }

    /// Detects the modulated shape `diag(e_α) Y diag(e_β)`: every entry is a
    /// single monomial and the frequencies satisfy `m_ij = α_i + β_j`.
    pub fn modulation(&self) -> Option<Modulation> {
        let d = self.d;
        let mut freqs: Vec<Option<Freq>> = Vec::with_capacity(d * d);
        let mut y = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let e = self.entry(i, j);
                match e.len() {
                    0 => freqs.push(None),
                    1 => {
                        let (m, c) = e.terms().next().unwrap();
                        y[(i, j)] = *c;
                        freqs.push(Some(m.clone()));
                    }
                    _ => return None,
                }
            }
        }
        // Potentials on the bipartite row/column graph.
        let mut alpha: Vec<Option<Freq>> = vec![None; d];
        let mut beta: Vec<Option<Freq>> = vec![None; d];
        for root in 0..d {
            if alpha[root].is_some() {
                continue;
            }
            alpha[root] = Some(Freq::zero());
            let mut queue = VecDeque::from([(true, root)]);
            while let Some((is_row, k)) = queue.pop_front() {
                for other in 0..d {
                    let (i, j) = if is_row { (k, other) } else { (other, k) };
                    let Some(m) = &freqs[i * d + j] else { continue };
                    if is_row {
                        let want = m - alpha[i].as_ref().unwrap();
                        match &beta[j] {
                            Some(b) if *b != want => return None,
                            Some(_) => {}
                            None => {
                                beta[j] = Some(want);
                                queue.push_back((false, j));
                            }
                        }
                    } else {
                        let want = m - beta[j].as_ref().unwrap();
                        match &alpha[i] {
                            Some(a) if *a != want => return None,
                            Some(_) => {}
                            None => {
                                alpha[i] = Some(want);
                                queue.push_back((true, i));
                            }
                        }
                    }
                }
            }
        }
        Some(Modulation {
            alpha: alpha.into_iter().map(Option::unwrap_or_default).collect(),
            beta: beta.into_iter().map(Option::unwrap_or_default).collect(),
            matrix: y,
        })
    }
}

/// `F(t) = diag(e_α(t)) · matrix · diag(e_β(t))`.
#[derive(Clone, Debug)]
pub struct Modulation {
    pub alpha: Vec<Freq>,
    pub beta: Vec<Freq>,
    pub matrix: CMatrix,
}

impl Modulation {
    /// The same matrix with all modulations removed. Pointwise the two
    /// polynomials differ by diagonal unitaries on both sides, so every
    /// `H¹(S¹_d)` norm is preserved while the degree drops to `0`.
    pub fn compact(&self) -> MatrixTrigPoly {
        let d = self.matrix.nrows();
        let zeros = vec![Freq::zero(); d];
        schatten::modulate(&self.matrix, &zeros, &zeros)
    }
}

/// `H¹(S¹_d)` norm `(1/M) Σ_j ‖F(t_j)‖_{S¹}` on `grid`.
pub fn h1_matrix_norm(f: &MatrixTrigPoly, grid: &QuadratureGrid) -> Result<f64> {
    grid.check(&f.degree())?;
    Ok(h1_on_nodes(f, grid))
}

fn h1_on_nodes(f: &MatrixTrigPoly, grid: &QuadratureGrid) -> f64 {
    let d = f.size();
    let m = grid.nodes();
    let terms: Vec<(usize, usize, Complex64)> = f
        .entries()
        .iter()
        .enumerate()
        .flat_map(|(idx, e)| e.terms().map(move |(k, c)| (idx, freq::residue(k, m), *c)))
        .collect();
    if terms.is_empty() {
        return 0.0;
    }
    let tw = grid.twiddles();
    let norms: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut x = CMatrix::zeros(d, d);
            for &(idx, r, c) in &terms {
                x[(idx / d, idx % d)] += c * tw[(r * j) % m];
            }
            schatten::trace_norm_of(&x)
        })
        .collect();
    norms.iter().sum::<f64>() / m as f64
}

/// `H¹(S¹_d)` norm on the default oversampled grid. Modulated inputs are
/// first relabelled with [`Modulation::compact`], which keeps the integrand
/// pointwise identical up to unitaries; other inputs need a degree small
/// enough for a direct grid.
pub fn h1_matrix_norm_auto(f: &MatrixTrigPoly) -> Result<f64> {
    match f.modulation() {
        Some(m) => {
            let compact = m.compact();
            h1_matrix_norm(&compact, &QuadratureGrid::for_degree(&compact.degree())?)
        }
        None => h1_matrix_norm(f, &QuadratureGrid::for_degree(&f.degree())?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn evaluation_examples() {
        assert!((evaluate(&ScalarTrigPoly::exp(0), 0.37) - c(1.0)).norm() < 1e-15);
        assert!((evaluate(&ScalarTrigPoly::exp(1), 0.5) - c(-1.0)).norm() < 1e-15);
        let p = ScalarTrigPoly::from_terms([(Freq::from(1), c(1.0)), (Freq::from(2), c(1.0))]);
        assert!((evaluate(&p, 0.0) - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let mut p = ScalarTrigPoly::exp(3);
        p.add_term(Freq::from(3), c(-1.0));
        assert!(p.is_zero());
        assert!(ScalarTrigPoly::monomial(Freq::from(2), c(0.0)).is_zero());
    }

    #[test]
    fn analytic_predicate() {
        assert!(ScalarTrigPoly::exp(4).is_analytic());
        assert!(!ScalarTrigPoly::exp(-1).is_analytic());
        assert!(ScalarTrigPoly::zero().is_analytic());
    }

    #[test]
    fn l1_examples() {
        let p = ScalarTrigPoly::exp(5);
        let g = QuadratureGrid::for_degree(&p.degree()).unwrap();
        assert!((l1_norm(&p, &g).unwrap() - 1.0).abs() < 1e-14);
        let z = ScalarTrigPoly::zero();
        assert_eq!(l1_norm(&z, &QuadratureGrid::new(8).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn one_plus_e1_converges_to_four_over_pi() {
        // Oracle: 2|cos(πt)| integrates to 4/π; the midpoint-free rule on M
        // nodes equals (2/M) cot(π/(2M)).
        let p = ScalarTrigPoly::from_terms([(Freq::from(0), c(1.0)), (Freq::from(1), c(1.0))]);
        for &m in &[16usize, 64, 1024] {
            let g = QuadratureGrid::new(m).unwrap();
            let closed = 2.0 / m as f64 / (PI / (2.0 * m as f64)).tan();
            assert!((l1_norm(&p, &g).unwrap() - closed).abs() < 1e-12);
        }
        let conv = l1_norm_converged(&p, 1e-8, 1 << 20).unwrap();
        assert!((conv.value - 4.0 / PI).abs() < 1e-7, "{}", conv.value);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let p = ScalarTrigPoly::exp(10);
        let err = l1_norm(&p, &QuadratureGrid::new(64).unwrap()).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { .. }));
        assert!(l1_norm(&p, &QuadratureGrid::new(88).unwrap()).is_ok());
    }

    #[test]
    fn fft_and_direct_paths_agree() {
        let p = ScalarTrigPoly::from_terms(
            (0..40).map(|k| (Freq::from(k), Complex64::new((k as f64).sin(), 1.0 / (k as f64 + 1.0)))),
        );
        let g = QuadratureGrid::for_degree(&p.degree()).unwrap();
        let fast = node_values(&p, &g);
        for (j, v) in fast.iter().enumerate() {
            assert!((v - evaluate(&p, g.node(j))).norm() < 1e-11);
        }
    }

    #[test]
    fn constant_matrix_norm_is_trace_norm() {
        let x = CMatrix::from_fn(3, 3, |i, j| c((i as f64 - j as f64) + if i == j { 2.0 } else { 0.0 }));
        let f = MatrixTrigPoly::constant(&x);
        let g = QuadratureGrid::for_degree(&f.degree()).unwrap();
        let expect = schatten::trace_norm_of(&x);
        assert!((h1_matrix_norm(&f, &g).unwrap() - expect).abs() < 1e-12 * expect);
        assert_eq!(h1_matrix_norm(&MatrixTrigPoly::zeros(3), &g).unwrap(), 0.0);
    }

    #[test]
    fn modulation_detection() {
        let x = CMatrix::from_fn(3, 3, |i, j| c(1.0 + i as f64 * 3.0 + j as f64));
        let alpha: Vec<Freq> = [0, 7, 100].map(Freq::from).to_vec();
        let beta: Vec<Freq> = [2, 5, 11].map(Freq::from).to_vec();
        let z = schatten::modulate(&x, &alpha, &beta);
        let m = z.modulation().expect("modulated");
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(&m.alpha[i] + &m.beta[j], &alpha[i] + &beta[j]);
            }
        }
        assert_eq!(m.matrix, x);
        // A second frequency in one entry breaks the shape.
        let mut entries = z.entries().to_vec();
        entries[0].add_term(Freq::from(1), c(1.0));
        assert!(MatrixTrigPoly::from_entries(3, entries).unwrap().modulation().is_none());
        // Inconsistent frequencies break it too.
        let mut entries = z.entries().to_vec();
        entries[4] = ScalarTrigPoly::exp(1000);
        assert!(MatrixTrigPoly::from_entries(3, entries).unwrap().modulation().is_none());
    }
}
