use h1cb_core::construction::{
    certify, construct, exact_placement_pieces, witness_for, Placement, ScheduleConfig, WitnessStrategy,
};
use h1cb_core::decomposition::{
    fejer_kernel, matrix_probe, random_analytic_poly, stein, unconditionality_probe, MultiplierDecomposition,
    MultiplierPiece, ProbeConfig, ProbeMode, QComplex,
};
use h1cb_core::schatten::{diag_modulate, map_norm_ascent, AscentOptions, MaskedTruncation};
use h1cb_core::{seed, Freq};

fn stein_tests(n: usize) -> Vec<h1cb_core::torus::ScalarTrigPoly> {
    let mut tests: Vec<_> = (1..=n).map(|j| fejer_kernel(1 << (j - 1))).collect();
    let mut rng = seed::rng(11);
    tests.extend((0..2).map(|_| random_analytic_poly(&mut rng, 1 << n)));
    tests
}

fn scalar_probe(n: usize) -> f64 {
    let s = stein(n).unwrap();
    let cfg = ProbeConfig::new(ProbeMode::Signs, s.len(), 200, 5);
    unconditionality_probe(&s, &cfg, &stein_tests(n)).unwrap().ratio
}

#[test]
fn scalar_stein_probe_stabilises() {
    let (r8, r12) = (scalar_probe(8), scalar_probe(12));
    assert!(r8 > 1.0, "{r8}");
    assert!(r12 / r8 <= 1.2, "N=8: {r8}, N=12: {r12}");
}

#[test]
fn identity_decomposition_probe_is_one() {
    let s = MultiplierDecomposition::new(vec![MultiplierPiece::sparse(
        (0..=40).map(|m| (Freq::from(m), QComplex::one())),
    )]);
    let mut rng = seed::rng(2);
    let tests = vec![fejer_kernel(8), random_analytic_poly(&mut rng, 40)];
    for mode in [ProbeMode::Signs, ProbeMode::Box] {
        let r = unconditionality_probe(&s, &ProbeConfig::new(mode, 1, 50, 0), &tests).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12, "{mode:?}: {}", r.ratio);
    }
}

#[test]
fn amplified_stein_probe_grows_with_d() {
    let levels = 8;
    let s = stein(exact_placement_pieces(levels) - 1).unwrap();
    let state = construct(&s, &ScheduleConfig::new(1e-3, levels).unwrap(), Placement::Exact).unwrap();
    let mask = state.mask();
    let ratios: Vec<f64> = [2, 4, 8]
        .iter()
        .map(|&d| {
            let (w, _) = witness_for(d, WitnessStrategy::Ascent { restarts: 2 }, seed::derive(0, d as u64));
            let z = diag_modulate(&w, &state.alpha[..d], &state.beta[..d]).unwrap();
            let cfg = ProbeConfig {
                extra: vec![mask.clone()],
                ..ProbeConfig::new(ProbeMode::Mask, mask.len(), 20, d as u64)
            };
            matrix_probe(&s, &cfg, &[z]).unwrap().ratio
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[0] < w[1]), "{ratios:?}");
}

#[test]
fn certificates_match_truncation_ratio_under_exact_placement() {
    let levels = 32;
    let s = stein(exact_placement_pieces(levels) - 1).unwrap();
    let state = construct(&s, &ScheduleConfig::new(1e-3, levels).unwrap(), Placement::Exact).unwrap();
    assert!(state.epsilon.iter().all(|&e| e == 0.0));
    let mut previous = 0.0;
    for d in [2, 4, 8, 16, 32] {
        let (w, tag) = witness_for(d, WitnessStrategy::Ascent { restarts: 2 }, seed::derive(1, d as u64));
        let c = certify(&s, &state, &w, &tag, 1e-8).unwrap();
        let direct = map_norm_ascent(&MaskedTruncation::strict_upper(d), &AscentOptions::new(2, seed::derive(1, d as u64)));
        assert!((c.c_lb - direct.lower_bound).abs() < 1e-6, "d={d}");
        assert!(c.c_lb >= previous);
        previous = c.c_lb;
    }
}
