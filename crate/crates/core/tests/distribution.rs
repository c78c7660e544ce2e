use gridiron_core::distribution::{
    fit_best, percentiles, registry, similar_players, simulate, Family, FitResult, ScoreHistory, MIN_SAMPLE,
};
use gridiron_core::roster::Position;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

fn gamma_fixture(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Gamma::new(4.0, 2.5).unwrap();
    (0..n).map(|_| g.sample(&mut rng)).collect()
}

fn normal_draws(mu: f64, sd: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Normal::new(mu, sd).unwrap();
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

/// Composite Simpson over `[a, b]`.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

fn integration_bounds(fit: &FitResult, sample: &[f64]) -> (f64, f64) {
    let p = &fit.params;
    let hi_data = sample.iter().cloned().fold(f64::MIN, f64::max);
    match fit.family {
        Family::Uniform => (p[0], p[1]),
        Family::VonMises => (p[0] - std::f64::consts::PI * p[2], p[0] + std::f64::consts::PI * p[2]),
        Family::ScaledBeta => (p[2], p[2] + p[3]),
        Family::Normal | Family::Logistic => (p[0] - 60.0 * p[1], p[0] + 60.0 * p[1]),
        _ => (0.0, 20.0 * hi_data),
    }
}

#[test]
fn registry_ships_twelve_named_families() {
    let names: Vec<&str> = registry().iter().map(|f| f.name()).collect();
    assert!(names.len() >= 12);
    for f in registry() {
        assert_eq!(f.name().parse::<Family>().unwrap(), f);
        assert_eq!(f.parameter_names().len(), f.parameter_count());
    }
}

#[test]
fn infeasible_families_are_skipped() {
    let sample = [-1.0, 0.5, 2.0, 3.0, 4.5];
    let sel = fit_best(&sample, &registry(), MIN_SAMPLE).unwrap();
    let fitted: Vec<Family> = sel.candidates.iter().map(|c| c.family).collect();
    assert!(!fitted.contains(&Family::Lognormal));
    assert!(!fitted.contains(&Family::Exponential));
    assert!(fitted.contains(&Family::Normal));
}

#[test]
fn every_family_density_integrates_to_one() {
    let sample = gamma_fixture(400, 3);
    for fam in registry() {
        let fit = fam.fit(&sample).unwrap();
        assert!(fit.converged, "{fam} did not converge");
        let (a, b) = integration_bounds(&fit, &sample);
        // Start just inside open endpoints so boundary singularities stay finite.
        let eps = (b - a) * 1e-9;
        let mass = simpson(|x| fit.family.pdf(&fit.params, x), a + eps, b - eps, 400_000);
        assert!((mass - 1.0).abs() < 1e-3, "{fam}: integrates to {mass}");
    }
}

#[test]
fn fitted_draws_stay_in_support() {
    let sample = gamma_fixture(300, 5);
    for fam in registry() {
        let fit = fam.fit(&sample).unwrap();
        let draws = simulate(&fit, 10_000, 17).unwrap();
        assert!(fam.feasible(&draws), "{fam} produced out-of-support draws");
        assert!(draws.iter().all(|x| fit.log_pdf(*x).is_finite()), "{fam} draw with zero density");
    }
}

#[test]
fn closed_form_quantiles_match_simulation() {
    let sample = gamma_fixture(300, 9);
    let probs = [0.1, 0.5, 0.9];
    let n = 10_000;
    for fam in registry() {
        let fit = fam.fit(&sample).unwrap();
        if fam.quantile(&fit.params, 0.5).is_none() {
            continue;
        }
        let draws = simulate(&fit, n, 23).unwrap();
        let emp = percentiles(&draws, &probs).unwrap();
        for (p, e) in probs.iter().zip(&emp) {
            let q = fam.quantile(&fit.params, *p).unwrap();
            let se = (p * (1.0 - p) / n as f64).sqrt() / fam.pdf(&fit.params, q);
            assert!((e - q).abs() <= 3.0 * se, "{fam} p={p}: empirical {e} vs analytic {q} (se {se})");
        }
    }
}

#[test]
fn simulate_contract() {
    let fit = Family::Normal.fit(&[-1.0, 1.0]).unwrap();
    assert_eq!(fit.params, vec![0.0, 1.0]);
    let draws = simulate(&fit, 1000, 4).unwrap();
    let mean = draws.iter().sum::<f64>() / 1000.0;
    assert!(mean.abs() <= 4.0 / 1000f64.sqrt());
    assert!(simulate(&fit, 0, 4).unwrap().is_empty());
    assert_eq!(draws, simulate(&fit, 1000, 4).unwrap());

    let mut stale = fit.clone();
    stale.converged = false;
    assert!(simulate(&stale, 10, 4).is_err());
}

#[test]
fn standard_normal_85th_percentile() {
    let fit = Family::Normal.fit(&[-1.0, 1.0]).unwrap();
    let draws = simulate(&fit, 10_000, 31).unwrap();
    let p = percentiles(&draws, &[0.15, 0.5, 0.85]).unwrap();
    // Φ⁻¹(0.85) from the erf_inv identity, computed independently of the crate.
    let oracle = std::f64::consts::SQRT_2 * statrs::function::erf::erf_inv(0.7);
    assert!((oracle - 1.0364).abs() < 1e-4);
    assert!((p[2] - oracle).abs() <= 0.05, "p85 {}", p[2]);
    assert!(p[0] <= p[1] && p[1] <= p[2]);
}

#[test]
fn normal_selection_recovers_parameters() {
    for seed in 0..10 {
        let sample = normal_draws(10.0, 2.0, 1000, seed);
        let sel = fit_best(&sample, &registry(), MIN_SAMPLE).unwrap();
        let normal = sel.candidates.iter().find(|c| c.family == Family::Normal).unwrap();
        assert!(sel.best.family == Family::Normal || normal.loss - sel.best.loss <= 0.01 * sel.best.loss.abs());
        assert!((normal.params[0] - 10.0).abs() <= 0.2);
        assert!((normal.params[1] - 2.0).abs() <= 0.15);
    }
}

#[test]
fn normal_mle_matches_closed_form() {
    let sample = normal_draws(3.0, 1.5, 250, 8);
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let sd = (sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    let fit = Family::Normal.fit(&sample).unwrap();
    assert!((fit.params[0] - mean).abs() < 1e-12);
    assert!((fit.params[1] - sd).abs() < 1e-12);
    let nll = n * (sd.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln() + 0.5);
    assert!((fit.loss - nll).abs() < 1e-8 * nll.abs());
}

#[test]
fn location_scale_fits_are_equivariant() {
    let sample = normal_draws(5.0, 2.0, 200, 12);
    for c in [0.5, 2.0, 3.7, 120.0] {
        let scaled: Vec<f64> = sample.iter().map(|x| c * x).collect();
        for (fam, idx) in [(Family::Normal, 1), (Family::Logistic, 1), (Family::Uniform, 1)] {
            let base = fam.fit(&sample).unwrap();
            let other = fam.fit(&scaled).unwrap();
            let (s0, s1) = if fam == Family::Uniform {
                (base.params[1] - base.params[0], other.params[1] - other.params[0])
            } else {
                (base.params[idx], other.params[idx])
            };
            assert!((s1 / (c * s0) - 1.0).abs() < 1e-6, "{fam} c={c}: {s1} vs {}", c * s0);
        }
    }
}

fn pool() -> Vec<ScoreHistory> {
    let rows = [
        ("a", Position::WR, 12.0),
        ("b", Position::WR, 14.5),
        ("c", Position::WR, 9.0),
        ("d", Position::RB, 12.1),
        ("e", Position::WR, 15.0),
        ("f", Position::WR, 9.0),
        ("g", Position::WR, 12.0),
    ];
    rows.iter()
        .map(|(id, pos, m)| ScoreHistory {
            player_id: id.to_string(),
            position: *pos,
            mean_projection: *m,
            scores: vec![*m, m + 1.0],
        })
        .collect()
}

#[test]
fn donor_order_matches_brute_force() {
    let pool = pool();
    let target = ScoreHistory {
        player_id: "t".into(),
        position: Position::WR,
        mean_projection: 11.0,
        scores: vec![8.0],
    };
    let got = similar_players(&target, &pool, 5).unwrap();
    let mut oracle: Vec<(f64, &str)> = pool
        .iter()
        .filter(|p| p.position == Position::WR)
        .map(|p| ((p.mean_projection - 11.0).abs(), p.player_id.as_str()))
        .collect();
    oracle.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let expected: Vec<String> = oracle.iter().take(5).map(|(_, id)| id.to_string()).collect();
    assert_eq!(got.donors, expected);
    assert!(!got.cross_position);
    assert_eq!(got.values.len(), 10);

    let exact = ScoreHistory { mean_projection: 14.5, ..target.clone() };
    assert_eq!(similar_players(&exact, &pool, 3).unwrap().donors[0], "b");

    let kicker = ScoreHistory { position: Position::K, ..target };
    let cross = similar_players(&kicker, &pool, 1).unwrap();
    assert!(cross.cross_position);
    assert_eq!(cross.donors, vec!["a".to_string()]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn selected_fit_has_minimum_loss(values in prop::collection::vec(0.5f64..40.0, 6..40)) {
        prop_assume!(values.iter().any(|v| *v != values[0]));
        let sel = fit_best(&values, &registry(), MIN_SAMPLE).unwrap();
        for c in sel.candidates.iter().filter(|c| c.converged) {
            prop_assert!(sel.best.loss <= c.loss);
        }
    }

    #[test]
    fn percentiles_are_monotone(values in prop::collection::vec(-50f64..50.0, 1..200)) {
        let p = percentiles(&values, &[0.15, 0.5, 0.85]).unwrap();
        prop_assert!(p[0] <= p[1] && p[1] <= p[2]);
    }
}
