//! Trace-class machinery on `d × d` matrices.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::freq::Freq;
use crate::seed;
use crate::torus::{CMatrix, MatrixTrigPoly, ScalarTrigPoly};
use crate::{Error, Result};

pub type RMatrix = DMatrix<f64>;

/// Singular values below this multiple of `σ_max` count as zero.
pub const SVD_RELATIVE_CUTOFF: f64 = 1e-12;

/// Dual ascent stops when the ratio improves by less than this, relatively.
pub const ASCENT_REL_TOL: f64 = 1e-9;
pub const ASCENT_MAX_ITER: usize = 500;

/// A `d × d` complex matrix regarded as an element of `S¹_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchattenMatrix(CMatrix);

impl SchattenMatrix {
    pub fn new(x: CMatrix) -> Result<Self> {
        if x.nrows() != x.ncols() || x.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "expected a nonempty square matrix, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(Self(x))
    }

    pub fn from_real(x: &RMatrix) -> Result<Self> {
        Self::new(x.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn zeros(d: usize) -> Self {
        Self(CMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self(CMatrix::identity(d, d))
    }

    /// `E_{ij}` (zero-based indices).
    pub fn elementary(d: usize, i: usize, j: usize) -> Self {
        let mut x = CMatrix::zeros(d, d);
        x[(i, j)] = Complex64::new(1.0, 0.0);
        Self(x)
    }

    pub fn size(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm_of(&self.0)
    }

    pub fn op_norm(&self) -> f64 {
        op_norm_of(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }
}

/// Singular values with the relative cutoff applied.
pub fn singular_values<N: ComplexField<RealField = f64>>(x: &DMatrix<N>) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let sv = x.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter()
        .map(|&s| if s <= SVD_RELATIVE_CUTOFF * max { 0.0 } else { s })
        .collect()
}

/// Sum of singular values.
pub fn trace_norm_of<N: ComplexField<RealField = f64>>(x: &DMatrix<N>) -> f64 {
    singular_values(x).iter().sum()
}

pub fn op_norm_of<N: ComplexField<RealField = f64>>(x: &DMatrix<N>) -> f64 {
    singular_values(x).into_iter().fold(0.0, f64::max)
}

pub fn trace_norm(x: &SchattenMatrix) -> f64 {
    x.trace_norm()
}

/// Unitary polar factor `U V*` of `X = U Σ V*`.
pub fn polar_factor<N: ComplexField<RealField = f64>>(x: &DMatrix<N>) -> DMatrix<N> {
    let svd = x.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Top singular triple `(σ₁, u₁, v₁)`.
fn top_singular_triple<N: ComplexField<RealField = f64>>(x: &DMatrix<N>) -> (f64, DVector<N>, DVector<N>) {
    let svd = x.clone().svd(true, true);
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
    let u = svd.u.unwrap().column(idx).into_owned();
    let v = svd.v_t.unwrap().row(idx).adjoint();
    (sigma, u, v)
}

/// Entrywise mask applied to a matrix; the canonical instance keeps the
/// strict upper triangle `j > i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedTruncation {
    symbol: RMatrix,
}

impl MaskedTruncation {
    pub fn from_predicate<F: Fn(usize, usize) -> bool>(d: usize, keep: F) -> Self {
        Self {
            symbol: RMatrix::from_fn(d, d, |i, j| if keep(i, j) { 1.0 } else { 0.0 }),
        }
    }

    /// `T(X) = (x_ij 1_{j > i})`.
    pub fn strict_upper(d: usize) -> Self {
        Self::from_predicate(d, |i, j| j > i)
    }

    pub fn keeps(&self, i: usize, j: usize) -> bool {
        self.symbol[(i, j)] != 0.0
    }

    pub fn truncate(&self, x: &SchattenMatrix) -> SchattenMatrix {
        SchattenMatrix(self.apply(x.matrix()))
    }
}

pub fn triangular_truncation(x: &SchattenMatrix) -> SchattenMatrix {
    MaskedTruncation::strict_upper(x.size()).truncate(x)
}

/// A linear map on `d × d` matrices.
pub trait MatrixMap: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &CMatrix) -> CMatrix;

    /// Adjoint for the real pairing `Re tr(A* B)`.
    fn adjoint(&self, y: &CMatrix) -> CMatrix;

    /// The symbol when the map is a Schur multiplier with a real symbol. Such
    /// maps attain both their `S¹` and `S^∞` norms on real matrices (the
    /// extremal rank-one `u v*` can have its phases absorbed into diagonal
    /// unitaries), which enables a real-arithmetic fast path.
    fn real_schur_symbol(&self) -> Option<&RMatrix> {
        None
    }
}

/// Entrywise multiplication by a fixed real symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurMultiplier {
    symbol: RMatrix,
}

impl SchurMultiplier {
    pub fn new(symbol: RMatrix) -> Self {
        assert_eq!(symbol.nrows(), symbol.ncols());
        Self { symbol }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(RMatrix::from_element(d, d, 1.0))
    }
}

fn schur_apply(symbol: &RMatrix, x: &CMatrix) -> CMatrix {
    CMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * symbol[(i, j)])
}

impl MatrixMap for SchurMultiplier {
    fn dim(&self) -> usize {
        self.symbol.nrows()
    }
    fn apply(&self, x: &CMatrix) -> CMatrix {
        schur_apply(&self.symbol, x)
    }
    fn adjoint(&self, y: &CMatrix) -> CMatrix {
        schur_apply(&self.symbol, y)
    }
    fn real_schur_symbol(&self) -> Option<&RMatrix> {
        Some(&self.symbol)
    }
}

impl MatrixMap for MaskedTruncation {
    fn dim(&self) -> usize {
        self.symbol.nrows()
    }
    fn apply(&self, x: &CMatrix) -> CMatrix {
        schur_apply(&self.symbol, x)
    }
    fn adjoint(&self, y: &CMatrix) -> CMatrix {
        schur_apply(&self.symbol, y)
    }
    fn real_schur_symbol(&self) -> Option<&RMatrix> {
        Some(&self.symbol)
    }
}

/// A map given by closures for the map and its adjoint.
pub struct FnMap<F, G> {
    pub d: usize,
    pub map: F,
    pub adjoint: G,
}

impl<F, G> MatrixMap for FnMap<F, G>
where
    F: Fn(&CMatrix) -> CMatrix + Sync,
    G: Fn(&CMatrix) -> CMatrix + Sync,
{
    fn dim(&self) -> usize {
        self.d
    }
    fn apply(&self, x: &CMatrix) -> CMatrix {
        (self.map)(x)
    }
    fn adjoint(&self, y: &CMatrix) -> CMatrix {
        (self.adjoint)(y)
    }
}

/// `Z = diag(e_α) X diag(e_β)`, whose `(i, j)` entry is `x_ij e_{α_i + β_j}`.
pub fn diag_modulate(x: &SchattenMatrix, alpha: &[Freq], beta: &[Freq]) -> Result<MatrixTrigPoly> {
    let d = x.size();
    for list in [alpha, beta] {
        if list.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: list.len(),
            });
        }
        if list.iter().any(|m| m.is_negative()) {
            return Err(Error::InvalidArgument("modulation frequencies must be nonnegative".into()));
        }
    }
    Ok(modulate(x.matrix(), alpha, beta))
}

pub(crate) fn modulate(x: &CMatrix, alpha: &[Freq], beta: &[Freq]) -> MatrixTrigPoly {
    let d = x.nrows();
    let entries = (0..d * d)
        .map(|idx| {
            let (i, j) = (idx / d, idx % d);
            ScalarTrigPoly::monomial(&alpha[i] + &beta[j], x[(i, j)])
        })
        .collect();
    MatrixTrigPoly::from_entries(d, entries).expect("d*d entries")
}

/// Which norm the map is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormPair {
    /// `S¹_d → S¹_d`.
    TraceToTrace,
    /// `S^∞_d → S^∞_d`.
    OpToOp,
}

impl NormPair {
    fn norm<N: ComplexField<RealField = f64>>(self, x: &DMatrix<N>) -> f64 {
        match self {
            NormPair::TraceToTrace => trace_norm_of(x),
            NormPair::OpToOp => op_norm_of(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    WitnessLibrary,
    DualAscent,
    BruteForce,
}

/// A certified lower bound `‖Φ(W)‖ / ‖W‖` together with its witness `W`.
#[derive(Clone, Debug)]
pub struct MapNormEstimate {
    pub d: usize,
    pub lower_bound: f64,
    pub witness: SchattenMatrix,
    pub witness_tag: String,
    pub method: EstimateMethod,
    pub norms: NormPair,
}

impl MapNormEstimate {
    fn from_witness(
        phi: &dyn MatrixMap,
        witness: SchattenMatrix,
        tag: String,
        method: EstimateMethod,
        norms: NormPair,
    ) -> Self {
        let lower_bound = ratio(phi, witness.matrix(), norms);
        Self {
            d: witness.size(),
            lower_bound,
            witness,
            witness_tag: tag,
            method,
            norms,
        }
    }
}

/// `‖Φ(X)‖ / ‖X‖` in the chosen norms.
pub fn ratio(phi: &dyn MatrixMap, x: &CMatrix, norms: NormPair) -> f64 {
    norms.norm(&phi.apply(x)) / norms.norm(x)
}

/// Candidate extremal matrices for the triangular truncation: the Cauchy
/// matrix `1/(j - i)`, its strict upper part, Gaussian matrices and rank-one
/// probes.
pub fn witness_library(d: usize, seed: u64) -> Vec<(String, SchattenMatrix)> {
    let real = |m: RMatrix| SchattenMatrix::from_real(&m).expect("square");
    let mut out = Vec::new();
    if d >= 2 {
        out.push(("e12".to_string(), SchattenMatrix::elementary(d, 0, 1)));
        out.push((
            "cauchy".to_string(),
            real(RMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    0.0
                } else {
                    1.0 / (j as f64 - i as f64)
                }
            })),
        ));
        out.push((
            "cauchy-upper".to_string(),
            real(RMatrix::from_fn(d, d, |i, j| if j > i { 1.0 / (j - i) as f64 } else { 0.0 })),
        ));
    }
    out.push(("ones".to_string(), real(RMatrix::from_element(d, d, 1.0))));
    out.push((
        "harmonic".to_string(),
        real(RMatrix::from_fn(d, d, |i, j| {
            1.0 / ((i + 1) as f64 * (d - j) as f64).sqrt()
        })),
    ));
    for k in 0..2 {
        let mut rng = seed::task_rng(seed, 1_000_000 + k);
        out.push((
            format!("gaussian-{k}"),
            real(RMatrix::from_fn(d, d, |_, _| rng.sample(StandardNormal))),
        ));
    }
    out
}

/// Best ratio over an explicit witness list (first maximiser wins ties).
pub fn map_norm_lower(phi: &dyn MatrixMap, witnesses: &[SchattenMatrix]) -> Result<MapNormEstimate> {
    map_norm_lower_in(phi, witnesses, NormPair::TraceToTrace)
}

pub fn map_norm_lower_in(
    phi: &dyn MatrixMap,
    witnesses: &[SchattenMatrix],
    norms: NormPair,
) -> Result<MapNormEstimate> {
    if witnesses.is_empty() {
        return Err(Error::EmptyWitnessList);
    }
    let mut best: Option<MapNormEstimate> = None;
    for (k, w) in witnesses.iter().enumerate() {
        if w.size() != phi.dim() {
            return Err(Error::DimensionMismatch {
                expected: phi.dim(),
                actual: w.size(),
            });
        }
        if w.is_zero() {
            return Err(Error::ZeroWitness(k));
        }
        let est = MapNormEstimate::from_witness(phi, w.clone(), format!("witness-{k}"), EstimateMethod::WitnessLibrary, norms);
        if best.as_ref().map_or(true, |b| est.lower_bound > b.lower_bound) {
            best = Some(est);
        }
    }
    Ok(best.unwrap())
}

/// Options for [`map_norm_ascent`].
#[derive(Clone, Debug)]
pub struct AscentOptions {
    pub restarts: usize,
    pub seed: u64,
    pub norms: NormPair,
    pub max_iter: usize,
    pub rel_tol: f64,
    /// Also start from every matrix of [`witness_library`].
    pub use_library: bool,
}

impl AscentOptions {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            norms: NormPair::TraceToTrace,
            max_iter: ASCENT_MAX_ITER,
            rel_tol: ASCENT_REL_TOL,
            use_library: true,
        }
    }

    pub fn norms(mut self, norms: NormPair) -> Self {
        self.norms = norms;
        self
    }
}

/// Alternating maximisation of `Re tr(U* Φ(X))`.
///
/// For `S¹ → S¹` the `U`-step is the polar factor of `Φ(X)` and the `X`-step
/// the top singular pair of `Φ*(U)`; for `S^∞ → S^∞` the roles swap. Each
/// half-step cannot decrease the objective, so the returned ratio is at least
/// the ratio of every start, in particular of every library witness.
pub fn map_norm_ascent(phi: &dyn MatrixMap, opts: &AscentOptions) -> MapNormEstimate {
    let d = phi.dim();
    let mut starts: Vec<(String, SchattenMatrix)> = Vec::new();
    if opts.use_library {
        starts.extend(witness_library(d, opts.seed));
    }
    for r in 0..opts.restarts {
        let mut rng = seed::task_rng(opts.seed, r as u64);
        let re = RMatrix::from_fn(d, d, |_, _| rng.sample(StandardNormal));
        let im = RMatrix::from_fn(d, d, |_, _| rng.sample(StandardNormal));
        let x = CMatrix::from_fn(d, d, |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
        starts.push((format!("random-{r}"), SchattenMatrix(x)));
    }
    let symbol = phi.real_schur_symbol();
    let results: Vec<(f64, CMatrix)> = starts
        .par_iter()
        .map(|(_, x0)| match symbol {
            // Real symbols: run on the real part and on the moduli of the
            // start, both of which stay real throughout.
            Some(s) => {
                let f = |x: &RMatrix| x.component_mul(s);
                let a = ascend(&f, &f, x0.matrix().map(|v| v.re), opts);
                let b = ascend(&f, &f, x0.matrix().map(|v| v.norm()), opts);
                let (v, x) = if b.0 > a.0 { b } else { a };
                (v, x.map(|v| Complex64::new(v, 0.0)))
            }
            None => ascend(&|x: &CMatrix| phi.apply(x), &|y: &CMatrix| phi.adjoint(y), x0.matrix().clone(), opts),
        })
        .collect();
    let mut best: Option<MapNormEstimate> = None;
    for ((tag, start), (_, x)) in starts.into_iter().zip(results) {
        // The start itself is a candidate, which keeps the library guarantee
        // exact even when the real fast path drops an imaginary part.
        for (cand, label) in [(start, format!("{tag}")), (SchattenMatrix(x), format!("ascent:{tag}"))] {
            if cand.is_zero() {
                continue;
            }
            let est = MapNormEstimate::from_witness(phi, cand, label, EstimateMethod::DualAscent, opts.norms);
            if best.as_ref().map_or(true, |b| est.lower_bound > b.lower_bound) {
                best = Some(est);
            }
        }
    }
    best.unwrap_or_else(|| MapNormEstimate {
        d,
        lower_bound: 0.0,
        witness: SchattenMatrix::identity(d),
        witness_tag: "none".into(),
        method: EstimateMethod::DualAscent,
        norms: opts.norms,
    })
}

fn ascend<N, F, G>(apply: &F, adjoint: &G, start: DMatrix<N>, opts: &AscentOptions) -> (f64, DMatrix<N>)
where
    N: ComplexField<RealField = f64> + Copy,
    F: Fn(&DMatrix<N>) -> DMatrix<N>,
    G: Fn(&DMatrix<N>) -> DMatrix<N>,
{
    let norms = opts.norms;
    let scale = norms.norm(&start);
    if scale == 0.0 {
        return (0.0, start);
    }
    let mut x = start.unscale(scale);
    let mut best = norms.norm(&apply(&x));
    for _ in 0..opts.max_iter {
        let g = apply(&x);
        let next = match norms {
            NormPair::TraceToTrace => {
                let h = adjoint(&polar_factor(&g));
                let (_, u, v) = top_singular_triple(&h);
                &u * v.adjoint()
            }
            NormPair::OpToOp => {
                let (_, u, v) = top_singular_triple(&g);
                polar_factor(&adjoint(&(&u * v.adjoint())))
            }
        };
        let den = norms.norm(&next);
        if den == 0.0 {
            break;
        }
        let value = norms.norm(&apply(&next)) / den;
        if value > best {
            let improved = value > best * (1.0 + opts.rel_tol);
            best = value;
            x = next;
            if !improved {
                break;
            }
        } else {
            break;
        }
    }
    (best, x)
}

/// Random search over rank-one complex matrices `u v*`.
pub fn map_norm_random_search(phi: &dyn MatrixMap, samples: usize, seed: u64) -> MapNormEstimate {
    let d = phi.dim();
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let best: Vec<(f64, CMatrix)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seed::task_rng(seed, c as u64);
            let mut best = (f64::NEG_INFINITY, CMatrix::zeros(d, d));
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let u = DVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
                let v = DVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
                let x = &u * v.adjoint();
                let r = ratio(phi, &x, NormPair::TraceToTrace);
                if r > best.0 {
                    best = (r, x);
                }
            }
            best
        })
        .collect();
    let (_, x) = best
        .into_iter()
        .fold((f64::NEG_INFINITY, CMatrix::zeros(d, d)), |a, b| if b.0 > a.0 { b } else { a });
    MapNormEstimate::from_witness(phi, SchattenMatrix(x), "random-rank-one".into(), EstimateMethod::BruteForce, NormPair::TraceToTrace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn trace_norm_examples() {
        let diag = SchattenMatrix::new(CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-2.0), c(3.0)]))).unwrap();
        assert!((diag.trace_norm() - 6.0).abs() < 1e-12);
        assert!((SchattenMatrix::elementary(2, 0, 1).trace_norm() - 1.0).abs() < 1e-12);
        let ones = SchattenMatrix::from_real(&RMatrix::from_element(2, 2, 1.0)).unwrap();
        assert!((ones.trace_norm() - 2.0).abs() < 1e-12);
        assert_eq!(SchattenMatrix::zeros(3).trace_norm(), 0.0);
    }

    #[test]
    fn truncation_examples() {
        let one = SchattenMatrix::new(CMatrix::from_element(1, 1, Complex64::new(2.0, 1.0))).unwrap();
        assert!(triangular_truncation(&one).is_zero());
        assert!(triangular_truncation(&SchattenMatrix::identity(5)).is_zero());
        let x = SchattenMatrix::from_real(&RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])).unwrap();
        let expect = SchattenMatrix::from_real(&RMatrix::from_row_slice(2, 2, &[0.0, 2.0, 0.0, 0.0])).unwrap();
        assert_eq!(triangular_truncation(&x), expect);
    }

    #[test]
    fn truncation_is_idempotent() {
        let lib = witness_library(6, 3);
        let t = MaskedTruncation::strict_upper(6);
        for (_, x) in lib {
            let once = t.truncate(&x);
            assert_eq!(t.truncate(&once), once);
        }
    }

    #[test]
    fn modulation_examples() {
        let x = SchattenMatrix::from_real(&RMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])).unwrap();
        let zeros = vec![Freq::zero(); 2];
        let z = diag_modulate(&x, &zeros, &zeros).unwrap();
        assert_eq!(z, MatrixTrigPoly::constant(x.matrix()));

        let cval = Complex64::new(0.5, -1.5);
        let one = SchattenMatrix::new(CMatrix::from_element(1, 1, cval)).unwrap();
        let z = diag_modulate(&one, &[Freq::from(2)], &[Freq::from(3)]).unwrap();
        assert_eq!(z.entry(0, 0), &ScalarTrigPoly::monomial(Freq::from(5), cval));
        assert!(z.is_analytic());

        assert!(matches!(
            diag_modulate(&x, &[Freq::zero()], &zeros),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(diag_modulate(&x, &[Freq::from(-1), Freq::zero()], &zeros).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let id = SchurMultiplier::identity(3);
        let lib: Vec<SchattenMatrix> = witness_library(3, 1).into_iter().map(|(_, w)| w).collect();
        assert!((map_norm_lower(&id, &lib).unwrap().lower_bound - 1.0).abs() < 1e-12);

        let t = MaskedTruncation::strict_upper(2);
        let e12 = SchattenMatrix::elementary(2, 0, 1);
        let est = map_norm_lower(&t, &[e12.clone()]).unwrap();
        assert!((est.lower_bound - 1.0).abs() < 1e-12);
        assert_eq!(est.witness, e12);

        assert!(matches!(map_norm_lower(&t, &[]), Err(Error::EmptyWitnessList)));
        assert!(matches!(map_norm_lower(&t, &[SchattenMatrix::zeros(2)]), Err(Error::ZeroWitness(0))));
    }

    #[test]
    fn cauchy_witness_grows_from_four_to_eight() {
        let cauchy = |d: usize| {
            SchattenMatrix::from_real(&RMatrix::from_fn(d, d, |i, j| if i == j { 0.0 } else { 1.0 / (j as f64 - i as f64) })).unwrap()
        };
        let e4 = map_norm_lower(&MaskedTruncation::strict_upper(4), &[cauchy(4)]).unwrap();
        let e8 = map_norm_lower(&MaskedTruncation::strict_upper(8), &[cauchy(8)]).unwrap();
        assert!(e8.lower_bound > e4.lower_bound, "{} vs {}", e8.lower_bound, e4.lower_bound);
    }

    #[test]
    fn ascent_identity_is_one() {
        for d in [1, 3, 7] {
            let est = map_norm_ascent(&SchurMultiplier::identity(d), &AscentOptions::new(2, 5));
            assert!((est.lower_bound - 1.0).abs() < 1e-9, "d={d}: {}", est.lower_bound);
        }
    }

    #[test]
    fn ascent_triangular_small_sizes() {
        let est = map_norm_ascent(&MaskedTruncation::strict_upper(2), &AscentOptions::new(3, 9));
        assert!((est.lower_bound - 1.0).abs() < 1e-6);
        // d = 3: the optimum is 2/sqrt(3).
        let est = map_norm_ascent(&MaskedTruncation::strict_upper(3), &AscentOptions::new(3, 9));
        assert!((est.lower_bound - 2.0 / 3f64.sqrt()).abs() < 1e-6, "{}", est.lower_bound);
        let recomputed = ratio(&MaskedTruncation::strict_upper(3), est.witness.matrix(), NormPair::TraceToTrace);
        assert_eq!(recomputed, est.lower_bound);
    }

    #[test]
    fn ascent_dominates_library() {
        for d in [2, 5, 9] {
            let t = MaskedTruncation::strict_upper(d);
            let lib: Vec<SchattenMatrix> = witness_library(d, 11).into_iter().map(|(_, w)| w).collect();
            let lower = map_norm_lower(&t, &lib).unwrap().lower_bound;
            let asc = map_norm_ascent(&t, &AscentOptions::new(1, 11)).lower_bound;
            assert!(asc >= lower - 1e-9);
        }
    }

    #[test]
    fn complex_path_matches_real_path() {
        // Wrap T in an opaque closure map so the complex ascent runs.
        let d = 5;
        let t = MaskedTruncation::strict_upper(d);
        let opaque = FnMap {
            d,
            map: |x: &CMatrix| t.apply(x),
            adjoint: |y: &CMatrix| t.adjoint(y),
        };
        let real = map_norm_ascent(&t, &AscentOptions::new(2, 4)).lower_bound;
        let cplx = map_norm_ascent(&opaque, &AscentOptions::new(2, 4)).lower_bound;
        assert!((real - cplx).abs() < 1e-6 * real, "{real} vs {cplx}");
    }

    #[test]
    fn op_norm_ascent_agrees_with_trace_ascent() {
        for d in [4, 8] {
            let t = MaskedTruncation::strict_upper(d);
            let s1 = map_norm_ascent(&t, &AscentOptions::new(2, 1)).lower_bound;
            let op = map_norm_ascent(&t, &AscentOptions::new(2, 1).norms(NormPair::OpToOp)).lower_bound;
            assert!((s1 - op).abs() <= 0.05 * s1, "d={d}: {s1} vs {op}");
        }
    }
}
