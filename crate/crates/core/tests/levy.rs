use bangbang::levy::{
    characteristic_function, classify, simulate_paths, truncation_schedule, BandSampler, CoupledSimulator, DensityPiece,
    LevyMeasureSpec, LevyTriplet, SimScheme,
};
use proptest::prelude::*;

fn finite_measure() -> impl Strategy<Value = LevyMeasureSpec> {
    let atom = (prop_oneof![-3.0..-0.1f64, 0.1..3.0f64], 0.1..2.0f64);
    (prop::collection::vec(atom, 0..4), prop::option::of((0.2..1.0f64, 0.1..1.5f64))).prop_map(|(atoms, piece)| {
        let pieces = piece.map(|(hi, c)| vec![DensityPiece::constant(0.0, hi, c)]).unwrap_or_default();
        LevyMeasureSpec { atoms, pieces }
    })
}

fn empirical_cf(xs: &[f64], u: f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let re = xs.iter().map(|x| (u * x).cos()).sum::<f64>() / n;
    let im = xs.iter().map(|x| (u * x).sin()).sum::<f64>() / n;
    (re, im)
}

fn assert_cf_calibrated(t: &LevyTriplet, scheme: &SimScheme, paths: usize) {
    let xs: Vec<f64> = simulate_paths(t, 1.0, scheme, 11, paths).unwrap().iter().map(|p| p.terminal()).collect();
    let tol = 4.0 / (paths as f64).sqrt();
    for u in [0.5, 1.0, 2.0] {
        let phi = characteristic_function(t, u, 1.0).unwrap();
        let (re, im) = empirical_cf(&xs, u);
        let gap = ((re - phi.re).powi(2) + (im - phi.im).powi(2)).sqrt();
        assert!(gap <= tol, "u = {u}: |ecf - cf| = {gap} > {tol} for {}", scheme.label());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_swaps_every_class(nu in finite_measure(), gamma in -2.0..2.0f64) {
        let t = LevyTriplet::new(gamma, 0.0, nu).unwrap();
        let c = classify(&t).unwrap();
        let d = classify(&t.dual()).unwrap();
        prop_assert_eq!(c.rss, d.lss);
        prop_assert_eq!(c.lss, d.rss);
        prop_assert_eq!(c.tails_right, d.tails_left);
        prop_assert_eq!(c.srss, d.slss);
        prop_assert_eq!(c.weak_rss, d.weak_lss);
        prop_assert_eq!(c.symmetric, d.symmetric);
        let back = classify(&t.dual().dual()).unwrap();
        prop_assert_eq!(c.rss, back.rss);
        prop_assert_eq!(c.lss, back.lss);
    }

    #[test]
    fn tail_witness_refutes(nu in finite_measure()) {
        let t = LevyTriplet::new(0.0, 0.0, nu.clone()).unwrap();
        let c = classify(&t).unwrap();
        if let Some(a) = c.tails_right_witness {
            prop_assert!(!c.tails_right);
            // the witness refutes either the open or the closed tail comparison
            let open = nu.tail_pos(a) < nu.tail_neg(a) - 1e-12;
            let b = a * (1.0 - 1e-9);
            let closed = nu.tail_pos(b) < nu.tail_neg(b) - 1e-12;
            prop_assert!(open || closed, "a = {a}");
        } else {
            prop_assert!(c.tails_right);
        }
    }

    #[test]
    fn band_quantiles_are_monotone(nu in finite_measure(), u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let s = BandSampler::new(&nu, 0.0, f64::INFINITY).unwrap();
        prop_assume!(!s.is_empty());
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        prop_assert!(s.quantile(lo) <= s.quantile(hi));
        prop_assert!(s.quantile(u) <= s.upper_quantile(u));
    }

    #[test]
    fn truncation_meets_its_bound(alpha in 0.1..1.95f64, c1 in 0.1..3.0f64, c2 in 0.0..3.0f64) {
        let t = LevyTriplet::stable(alpha, c1, c2, 0.0).unwrap();
        let s = truncation_schedule(&t, 8, 1.0).unwrap();
        for w in s.windows(2) {
            prop_assert!(w[1].eps <= w[0].eps / 2.0);
            // analytic: int_{|y|<e} y^2 nu(dy) = (c1 + c2) e^(2 - alpha) / (2 - alpha)
            let exact = (c1 + c2) * w[1].eps.powf(2.0 - alpha) / (2.0 - alpha);
            prop_assert!(exact <= w[1].bound * (1.0 + 1e-9), "{:?}", w[1]);
        }
    }
}

#[test]
fn compound_poisson_with_brownian_part_is_calibrated() {
    let nu = LevyMeasureSpec { atoms: vec![(1.0, 0.8), (-0.5, 0.6)], pieces: vec![DensityPiece::constant(0.2, 1.5, 0.4)] };
    let t = LevyTriplet::new(0.3, 0.5, nu).unwrap();
    assert_cf_calibrated(&t, &SimScheme::interlacing(16), 20_000);
}

#[test]
fn stable_samplers_are_calibrated() {
    for (alpha, c1, c2, gamma) in [(0.5, 2.0, 1.0, 3.0), (1.0, 1.0, 1.0, 0.0), (1.5, 1.0, 0.5, -0.2)] {
        let t = LevyTriplet::stable(alpha, c1, c2, gamma).unwrap();
        assert_cf_calibrated(&t, &SimScheme::stable_exact(4), 20_000);
    }
}

#[test]
fn truncated_stable_is_calibrated() {
    // the discarded small jumps move the CF by at most u^2 8^-n / 2
    for (alpha, level) in [(0.5, 4), (1.0, 3)] {
        let t = LevyTriplet::stable(alpha, 1.0, 1.0, 0.0).unwrap();
        assert_cf_calibrated(&t, &SimScheme::truncated(level, 1.0, 8), 20_000);
    }
}

#[test]
fn coupled_truncated_paths_dominate() {
    for alpha in [0.5, 1.0, 1.5] {
        let t = LevyTriplet::stable(alpha, 1.0, 1.0, 0.0).unwrap();
        let schedule = truncation_schedule(&t, 4, 1.0).unwrap();
        for level in [1, 4] {
            // keep about 2000 jumps per path at deep levels
            let horizon = (2e3 / schedule[level].intensity).min(1.0);
            let sim = CoupledSimulator::new(&t, horizon, &SimScheme::truncated(level, 1.0, 20).with_bridge()).unwrap();
            for i in 0..200 {
                let pair = sim.simulate(5, i).unwrap();
                // heavy tails put |X| far from 1 and rounding accumulates over many jumps
                let scale = pair.x.iter().chain(&pair.x_dual).fold(1.0f64, |a, v| a.max(v.abs()));
                pair.check_invariants(1e-9 * scale).unwrap();
            }
        }
    }
}

#[test]
fn coupling_needs_the_strong_class() {
    // heavier negative small jumps: not SRSS
    let t = LevyTriplet::stable(0.5, 1.0, 2.0, 5.0).unwrap();
    let err = CoupledSimulator::new(&t, 1.0, &SimScheme::truncated(2, 1.0, 10)).unwrap_err();
    assert!(matches!(err, bangbang::Error::Precondition(_)), "{err}");
}
