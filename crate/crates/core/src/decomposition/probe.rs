//! Lower bounds for unconditionality constants by sampling coefficient
//! vectors.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{amplified_apply, apply_sum, CoefficientVector, MultiplierDecomposition};
use crate::freq::Freq;
use crate::seed;
use crate::torus::{self, h1_matrix_norm_auto, MatrixTrigPoly, QuadratureGrid, ScalarTrigPoly};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    /// `a_k ∈ {−1, 1}`.
    Signs,
    /// `a_k ∈ {0, 1}`.
    Mask,
    /// `a_k ∈ [−1, 1]`.
    Box,
}

#[derive(Clone, Debug)]
pub struct ProbeConfig {
    pub mode: ProbeMode,
    /// Length `N` of the coefficient vectors.
    pub coefficients: usize,
    pub trials: usize,
    pub seed: u64,
    /// Vertex modes enumerate every vertex when there are at most this many.
    pub exhaustive_limit: usize,
    /// Additional candidate vectors, tried as given.
    pub extra: Vec<Vec<f64>>,
}

impl ProbeConfig {
    pub fn new(mode: ProbeMode, coefficients: usize, trials: usize, seed: u64) -> Self {
        Self {
            mode,
            coefficients,
            trials,
            seed,
            exhaustive_limit: 1 << 14,
            extra: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeResult {
    pub ratio: f64,
    pub coefficients: Vec<f64>,
    pub test_index: usize,
}

/// Analytic Fejér kernel `e_n F_n = Σ_{j=0}^{2n} (1 − |j − n|/(n + 1)) e_j`.
pub fn fejer_kernel(n: usize) -> ScalarTrigPoly {
    ScalarTrigPoly::from_terms((0..=2 * n).map(|j| {
        let w = 1.0 - (j as f64 - n as f64).abs() / (n + 1) as f64;
        (Freq::from(j), Complex64::new(w, 0.0))
    }))
}

/// Gaussian complex coefficients on frequencies `0..=degree`.
pub fn random_analytic_poly<R: Rng>(rng: &mut R, degree: usize) -> ScalarTrigPoly {
    ScalarTrigPoly::from_terms(
        (0..=degree).map(|j| (Freq::from(j), Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))),
    )
}

fn validate(d: &MultiplierDecomposition, cfg: &ProbeConfig) -> Result<()> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument("probe needs at least one trial".into()));
    }
    if cfg.coefficients > d.len() {
        return Err(Error::TooManyCoefficients {
            len: cfg.coefficients,
            pieces: d.len(),
        });
    }
    for v in &cfg.extra {
        if v.len() > cfg.coefficients {
            return Err(Error::TooManyCoefficients {
                len: v.len(),
                pieces: cfg.coefficients,
            });
        }
        CoefficientVector::new(v.clone())?;
    }
    Ok(())
}

fn padded(v: &[f64], n: usize) -> Vec<f64> {
    let mut out = v.to_vec();
    out.resize(n, 0.0);
    out
}

fn sample<R: Rng>(rng: &mut R, mode: ProbeMode, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| match mode {
            ProbeMode::Signs => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            ProbeMode::Mask => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    0.0
                }
            }
            ProbeMode::Box => rng.gen_range(-1.0..=1.0),
        })
        .collect()
}

fn vertex_count(mode: ProbeMode, n: usize) -> Option<usize> {
    match mode {
        ProbeMode::Box => None,
        _ if n >= usize::BITS as usize - 1 => None,
        _ => Some(1usize << n),
    }
}

/// Node values of `P_k(f)` for `k < n` on a grid fine enough for all of them.
struct NodeTable {
    pieces: Vec<Vec<Complex64>>,
    norm: f64,
}

impl NodeTable {
    fn new(d: &MultiplierDecomposition, f: &ScalarTrigPoly, n: usize) -> Result<Self> {
        let outputs: Vec<ScalarTrigPoly> = (0..n)
            .map(|k| {
                let mut a = vec![0.0; n];
                a[k] = 1.0;
                apply_sum(d, &CoefficientVector(a), f)
            })
            .collect::<Result<_>>()?;
        let degree = outputs.iter().map(ScalarTrigPoly::degree).chain([f.degree()]).max().unwrap();
        let grid = QuadratureGrid::for_degree(&degree)?;
        Ok(Self {
            pieces: outputs.iter().map(|p| torus::node_values(p, &grid)).collect(),
            norm: torus::mean_abs(&torus::node_values(f, &grid)),
        })
    }

    fn combine(&self, a: &[f64]) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.pieces.first().map_or(1, Vec::len)];
        for (g, &w) in self.pieces.iter().zip(a) {
            if w != 0.0 {
                for (s, v) in acc.iter_mut().zip(g) {
                    *s += v * w;
                }
            }
        }
        acc
    }

    /// Best vertex by Gray-code enumeration.
    fn vertices(&self, mode: ProbeMode) -> (f64, Vec<f64>) {
        let n = self.pieces.len();
        let low = if mode == ProbeMode::Signs { -1.0 } else { 0.0 };
        let mut a = vec![low; n];
        let mut acc = self.combine(&a);
        let mut best = (torus::mean_abs(&acc), a.clone());
        for i in 1usize..(1 << n) {
            let b = i.trailing_zeros() as usize;
            let step = if a[b] == 1.0 { low - 1.0 } else { 1.0 - low };
            a[b] += step;
            for (s, v) in acc.iter_mut().zip(&self.pieces[b]) {
                *s += v * step;
            }
            let value = torus::mean_abs(&acc);
            if value > best.0 {
                best = (value, a.clone());
            }
        }
        best
    }
}

/// `max_{a ∈ {−1,1}^n} ‖Σ_{k<n} a_k P_k(f)‖₁` by exhaustive enumeration.
pub fn vertex_max(d: &MultiplierDecomposition, f: &ScalarTrigPoly, n: usize) -> Result<(f64, Vec<f64>)> {
    if n > d.len() {
        return Err(Error::TooManyCoefficients { len: n, pieces: d.len() });
    }
    if n > 24 {
        return Err(Error::InvalidArgument(format!("2^{n} vertices is too many to enumerate")));
    }
    Ok(NodeTable::new(d, f, n)?.vertices(ProbeMode::Signs))
}

fn better(a: &ProbeResult, b: &ProbeResult) -> bool {
    a.ratio > b.ratio
}

/// Best `‖Σ a_k P_k(f)‖₁ / ‖f‖₁` over the candidate vectors and tests. The
/// all-ones vector and `cfg.extra` are always candidates; vertex modes are
/// enumerated exhaustively when small enough and sampled otherwise.
pub fn unconditionality_probe(
    d: &MultiplierDecomposition,
    cfg: &ProbeConfig,
    tests: &[ScalarTrigPoly],
) -> Result<ProbeResult> {
    validate(d, cfg)?;
    let n = cfg.coefficients;
    let per_test: Vec<Result<Option<ProbeResult>>> = tests
        .par_iter()
        .enumerate()
        .map(|(ti, f)| {
            if f.is_zero() {
                return Ok(None);
            }
            let table = NodeTable::new(d, f, n)?;
            let score = |a: &[f64]| torus::mean_abs(&table.combine(a)) / table.norm;
            let mut best = ProbeResult {
                ratio: score(&vec![1.0; n]),
                coefficients: vec![1.0; n],
                test_index: ti,
            };
            let mut offer = |ratio: f64, a: Vec<f64>| {
                if ratio > best.ratio {
                    best = ProbeResult {
                        ratio,
                        coefficients: a,
                        test_index: ti,
                    };
                }
            };
            for v in &cfg.extra {
                let a = padded(v, n);
                offer(score(&a), a);
            }
            match vertex_count(cfg.mode, n) {
                Some(count) if count <= cfg.exhaustive_limit => {
                    let (value, a) = table.vertices(cfg.mode);
                    offer(value / table.norm, a);
                }
                _ => {
                    let mut rng = seed::task_rng(cfg.seed, ti as u64);
                    for _ in 0..cfg.trials {
                        let a = sample(&mut rng, cfg.mode, n);
                        offer(score(&a), a);
                    }
                }
            }
            Ok(Some(best))
        })
        .collect();
    pick(per_test)
}

fn pick(per_test: Vec<Result<Option<ProbeResult>>>) -> Result<ProbeResult> {
    let mut best: Option<ProbeResult> = None;
    for r in per_test {
        if let Some(r) = r? {
            if best.as_ref().map_or(true, |b| better(&r, b)) {
                best = Some(r);
            }
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("probe needs a nonzero test function".into()))
}

/// Amplified version of [`unconditionality_probe`]: the ratio
/// `‖Σ a_k (P_k ⊗ Id)(F)‖_{H¹(S¹_d)} / ‖F‖_{H¹(S¹_d)}`.
pub fn matrix_probe(d: &MultiplierDecomposition, cfg: &ProbeConfig, tests: &[MatrixTrigPoly]) -> Result<ProbeResult> {
    validate(d, cfg)?;
    let n = cfg.coefficients;
    let mut candidates: Vec<Vec<f64>> = vec![vec![1.0; n]];
    candidates.extend(cfg.extra.iter().map(|v| padded(v, n)));
    match vertex_count(cfg.mode, n) {
        Some(count) if count <= cfg.exhaustive_limit.min(cfg.trials) => {
            let low = if cfg.mode == ProbeMode::Signs { -1.0 } else { 0.0 };
            candidates.extend((0..count).map(|bits| (0..n).map(|k| if bits >> k & 1 == 1 { 1.0 } else { low }).collect()));
        }
        _ => {
            let mut rng = seed::rng(cfg.seed);
            candidates.extend((0..cfg.trials).map(|_| sample(&mut rng, cfg.mode, n)));
        }
    }
    let per_test: Vec<Result<Option<ProbeResult>>> = tests
        .iter()
        .enumerate()
        .map(|(ti, f)| {
            let norm = h1_matrix_norm_auto(f)?;
            if norm == 0.0 {
                return Ok(None);
            }
            let ratios: Vec<Result<f64>> = candidates
                .par_iter()
                .map(|a| Ok(h1_matrix_norm_auto(&amplified_apply(d, &CoefficientVector(a.clone()), f)?)? / norm))
                .collect();
            let mut best: Option<ProbeResult> = None;
            for (a, r) in candidates.iter().zip(ratios) {
                let r = r?;
                if best.as_ref().map_or(true, |b| r > b.ratio) {
                    best = Some(ProbeResult {
                        ratio: r,
                        coefficients: a.clone(),
                        test_index: ti,
                    });
                }
            }
            Ok(best)
        })
        .collect();
    pick(per_test)
}

#[cfg(test)]
mod tests {
    use super::super::{stein, MultiplierPiece, QComplex};
    use super::*;

    fn identity_piece(horizon: i64) -> MultiplierDecomposition {
        MultiplierDecomposition::new(vec![MultiplierPiece::sparse(
            (0..=horizon).map(|m| (Freq::from(m), QComplex::one())),
        )])
    }

    #[test]
    fn identity_decomposition_probes_to_one() {
        let d = identity_piece(40);
        let tests = vec![fejer_kernel(5), random_analytic_poly(&mut seed::rng(1), 12)];
        for mode in [ProbeMode::Signs, ProbeMode::Box] {
            let r = unconditionality_probe(&d, &ProbeConfig::new(mode, 1, 50, 3), &tests).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-12, "{mode:?}: {}", r.ratio);
        }
    }

    #[test]
    fn signs_probe_dominates_identity_pattern() {
        let s = stein(8).unwrap();
        let tests = vec![fejer_kernel(30), fejer_kernel(100)];
        let r = unconditionality_probe(&s, &ProbeConfig::new(ProbeMode::Signs, 9, 1, 0), &tests).unwrap();
        assert!(r.ratio >= 1.0 - 1e-12);
        assert_eq!(r.coefficients.len(), 9);
    }

    #[test]
    fn gray_code_matches_direct_enumeration() {
        let s = stein(4).unwrap();
        let f = random_analytic_poly(&mut seed::rng(7), 20);
        let (best, a) = vertex_max(&s, &f, 5).unwrap();
        let table = NodeTable::new(&s, &f, 5).unwrap();
        let mut direct: f64 = 0.0;
        for bits in 0..32 {
            let a: Vec<f64> = (0..5).map(|k| if bits >> k & 1 == 1 { 1.0 } else { -1.0 }).collect();
            direct = direct.max(torus::mean_abs(&table.combine(&a)));
        }
        assert!((best - direct).abs() < 1e-12);
        assert!((torus::mean_abs(&table.combine(&a)) - best).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        let s = stein(3).unwrap();
        let f = vec![fejer_kernel(2)];
        assert!(unconditionality_probe(&s, &ProbeConfig::new(ProbeMode::Box, 4, 0, 0), &f).is_err());
        assert!(unconditionality_probe(&s, &ProbeConfig::new(ProbeMode::Box, 5, 1, 0), &f).is_err());
    }
}
