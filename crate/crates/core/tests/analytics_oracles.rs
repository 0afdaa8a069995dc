use qrlsim_core::analytics::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[test]
fn flip_prob_limits_and_shape() {
    assert!(flip_prob(1e-3, SQRT_PI).unwrap() < 1e-15);
    assert!((flip_prob(50.0, SQRT_PI).unwrap() - 0.5).abs() < 1e-3);
    assert!(flip_prob(0.0, SQRT_PI).is_err());
    assert!(flip_prob(-1.0, SQRT_PI).is_err());
    let mut prev = 0.0;
    for k in 1..=400 {
        let s = k as f64 * 0.005;
        let f = flip_prob(s, SQRT_PI).unwrap();
        assert!(f <= 0.5);
        if s > 0.1 {
            assert!(f > prev, "not increasing at {s}");
        }
        prev = f;
    }
}

#[test]
fn flip_prob_matches_monte_carlo() {
    let sigma = 0.3;
    let n = 10_000_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = Normal::new(0.0, sigma).unwrap();
    let odd = (0..n).filter(|_| (d.sample(&mut rng) / SQRT_PI).round().rem_euclid(2.0) == 1.0).count();
    let freq = odd as f64 / n as f64;
    let want = flip_prob(sigma, SQRT_PI).unwrap();
    let se = (want * (1.0 - want) / n as f64).sqrt();
    assert!((freq - want).abs() <= 3.0 * se, "{freq} vs {want}");
}

#[test]
fn analytic_curves() {
    let at = analytic_error_rates(10.5).unwrap();
    assert!(at.r_mean >= 0.01 / 1.5 && at.r_mean <= 0.01 * 1.5, "{at:?}");
    assert!(!at.out_of_range);
    assert!(analytic_error_rates(3.0).unwrap().out_of_range);
    let mut prev = f64::INFINITY;
    for k in 0..=1000 {
        let s = 5.0 + 0.01 * k as f64;
        let r = analytic_error_rates(s).unwrap();
        assert!(r.r_high >= r.r_low);
        assert!(r.r_mean < prev, "not decreasing at {s}");
        prev = r.r_mean;
    }
}

#[test]
fn error_rate_examples() {
    assert_eq!(error_rate_from_p(1.0, 2), 0.0);
    assert!((error_rate_from_p(0.99, 2) - 0.0075).abs() < 1e-15);
    assert!((error_rate_from_p(0.9, 1) - 0.05).abs() < 1e-15);
}

#[test]
fn grover_model_examples() {
    assert!((grover_success_estimate(0.0, 3, 18, 2, 0.9).unwrap() - 0.9).abs() < 1e-15);
    let p: f64 = 1.0 - 4.0 * 0.01 / 3.0;
    let s = p.powi(54);
    assert!((s - 0.4844).abs() < 5e-4);
    let v = grover_success_estimate(0.01, 3, 18, 2, 1.0).unwrap();
    assert!((v - (s + (1.0 - s) * 0.25)).abs() < 1e-15);
    assert!((v - 0.613).abs() < 1e-3);
    assert!((grover_success_estimate(0.75, 3, 18, 2, 1.0).unwrap() - 0.25).abs() < 1e-15);
    let mut prev = 1.0;
    for k in 1..=50 {
        let v = grover_success_estimate(k as f64 * 0.005, 3, 18, 2, 1.0).unwrap();
        assert!(v < prev);
        prev = v;
    }
    assert!(grover_success_estimate(0.01, 3, 17, 2, 1.0).unwrap() > grover_success_estimate(0.01, 3, 18, 2, 1.0).unwrap());
    assert!(grover_success_estimate(0.8, 3, 18, 2, 1.0).is_err());
}

fn synthetic(a: f64, p: f64, depths: impl Iterator<Item = usize>, noise: f64, rng: &mut ChaCha8Rng) -> Vec<RbPoint> {
    let d = Normal::new(0.0, noise.max(1e-300)).unwrap();
    depths
        .map(|m| {
            let e = if noise > 0.0 { d.sample(rng) } else { 0.0 };
            RbPoint { depth: m, mean_fidelity: a * p.powi(m as i32) + 0.25 + e, std_error: noise, n_samples: 50 }
        })
        .collect()
}

#[test]
fn noiseless_fit_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let pts = synthetic(0.7, 0.97, 7..=20, 0.0, &mut rng);
    let fit = fit_rb(&pts, 2).unwrap();
    assert!((fit.p - 0.97).abs() < 1e-6, "{fit:?}");
    assert!((fit.a - 0.7).abs() < 1e-6);
    assert!((fit.r - 0.0225).abs() < 1e-6);
    assert_eq!(fit.b, 0.25);
    assert!(fit.flag.is_none());
}

#[test]
fn scaling_amplitude_leaves_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let base = fit_rb(&synthetic(0.6, 0.95, 7..=20, 0.0, &mut rng), 2).unwrap();
    let scaled = fit_rb(&synthetic(0.6 * 0.5, 0.95, 7..=20, 0.0, &mut rng), 2).unwrap();
    assert!((scaled.a - 0.5 * base.a).abs() < 1e-8);
    assert!((scaled.p - base.p).abs() < 1e-8);
}

#[test]
fn asymptote_only_data_is_flagged() {
    let pts: Vec<RbPoint> = (7..=20).map(|m| RbPoint { depth: m, mean_fidelity: 0.25, std_error: 0.0, n_samples: 10 }).collect();
    let fit = fit_rb(&pts, 2).unwrap();
    assert!(fit.flag.is_some(), "{fit:?}");
}

#[test]
fn shallow_or_sparse_data_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(fit_rb(&synthetic(0.7, 0.97, 1..=6, 0.0, &mut rng), 2).is_err());
    assert!(fit_rb(&synthetic(0.7, 0.97, [7, 9].into_iter(), 0.0, &mut rng), 2).is_err());
    assert!(fit_rb_with(&synthetic(0.7, 0.97, 2..=5, 0.0, &mut rng), 2, 1, false).is_ok());
}

#[test]
fn noisy_fits_cover_the_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut hits = 0;
    for _ in 0..100 {
        let pts = synthetic(0.7, 0.97, 7..=26, 0.01, &mut rng);
        let fit = fit_rb(&pts, 2).unwrap();
        if (fit.p - 0.97).abs() <= 2.0 * fit.sigma_p() {
            hits += 1;
        }
    }
    assert!(hits >= 90, "{hits}/100");
}

#[test]
fn freed_asymptote_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let pts = synthetic(0.7, 0.9, 7..=40, 0.0, &mut rng);
    let fit = fit_rb_free_b(&pts, 2).unwrap();
    assert!(fit.b_free && (fit.b - 0.25).abs() < 1e-6 && (fit.p - 0.9).abs() < 1e-6, "{fit:?}");
}

#[test]
fn unweighted_fallback() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut pts = synthetic(0.7, 0.97, 7..=20, 0.0, &mut rng);
    for p in &mut pts {
        p.std_error = 0.0;
        p.mean_fidelity += 1e-4 * (rng.random::<f64>() - 0.5);
    }
    let fit = fit_rb(&pts, 2).unwrap();
    assert!((fit.p - 0.97).abs() < 1e-3 && fit.sigma_p() > 0.0);
}

#[test]
fn rb_point_statistics() {
    let p = RbPoint::from_samples(7, &[0.9, 1.0, 0.8]);
    assert!((p.mean_fidelity - 0.9).abs() < 1e-15);
    assert!((p.std_error - (0.01f64 / 3.0).sqrt()).abs() < 1e-12);
}
