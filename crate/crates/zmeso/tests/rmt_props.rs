//! Invariant suite for the random-matrix engine.

use num_complex::Complex64;

use zmeso::rmt::{
    counting_stats_from, mixed_trace_moment, oscillatory_pair_prediction,
    oscillatory_rmt_statistic, pairing_moment_check, sample_haar, smoothed_values, trace_power,
};
use zmeso::testfn::TestFunction;

#[test]
fn one_point_density_uniform_by_decile() {
    // Weyl: the empirical one-point density over >= 1e3 batches is uniform
    // on [-1/2, 1/2) within 3 sigma per decile (binomial bound, conservative
    // given the rigidity of the ensemble)
    let n = 16;
    let batches = 1500;
    let s = sample_haar(n, batches, 0xDEC1);
    let mut deciles = [0usize; 10];
    for b in s.batches() {
        for &th in b {
            let idx = (((th + 0.5) * 10.0) as usize).min(9);
            deciles[idx] += 1;
        }
    }
    let total = (n * batches) as f64;
    let expect = total / 10.0;
    let sigma = (total * 0.1 * 0.9).sqrt();
    for (i, &c) in deciles.iter().enumerate() {
        assert!(
            (c as f64 - expect).abs() < 3.0 * sigma,
            "decile {i}: {c} vs {expect} +- {sigma}"
        );
    }
}

#[test]
fn abs_trace_fourth_moment() {
    // E |Tr g|^4 = 2 for n >= 2 (a = b = (2))
    let s = sample_haar(4, 6000, 0xDEC2);
    let (m, se) = mixed_trace_moment(&s, &[(1, 2)], &[(1, 2)]);
    assert!(m.im.abs() < 3.0 * se);
    assert!(
        (m.re - 2.0).abs() < 3.0 * se.max(0.02),
        "E|Tr g|^4 = {} +- {se}",
        m.re
    );
}

#[test]
fn unequal_degree_moments_vanish() {
    let s = sample_haar(6, 6000, 0xDEC3);
    for (a, b) in [
        (vec![(1i64, 1u32)], vec![]),
        (vec![(2, 1)], vec![(1, 2), (2, 1)]),
        (vec![(1, 1), (3, 1)], vec![(2, 1), (1, 1)]),
    ] {
        let (m, se) = mixed_trace_moment(&s, &a, &b);
        assert!(
            m.norm() < 3.5 * se.max(5e-3),
            "moment {m} stderr {se} for {a:?} vs {b:?}"
        );
    }
}

#[test]
fn trace_second_moment_equals_degree() {
    let s = sample_haar(8, 8000, 0xDEC4);
    for j in [1i64, 2, 4, 8] {
        let tm = trace_power(&s, j);
        assert!(
            (tm.mean_abs2 - j as f64).abs() < 3.0 * tm.mean_abs2_stderr,
            "j={j}: {} +- {}",
            tm.mean_abs2,
            tm.mean_abs2_stderr
        );
    }
}

#[test]
fn counting_equals_indicator_statistic_per_batch() {
    // two code paths, one answer: the [0, L) count and the shifted
    // half-open indicator statistic agree batch by batch
    let n = 32;
    let l = 6.0;
    let s = sample_haar(n, 200, 0xDEC5);
    let eta = TestFunction::indicator(0.5);
    for batch in s.batches() {
        let count = batch
            .iter()
            .filter(|&&th| th >= 0.0 && (n as f64) * th < l)
            .count() as f64;
        let stat: f64 = batch
            .iter()
            .map(|&th| eta.eval(((n as f64) * th - 0.5 * l) / l))
            .sum();
        assert_eq!(count, stat);
    }
    // and the library counting helper agrees with both
    let stats = counting_stats_from(&s, l);
    let mean: f64 = s
        .batches()
        .iter()
        .map(|b| b.iter().filter(|&&th| th >= 0.0 && (n as f64) * th < l).count() as f64)
        .sum::<f64>()
        / s.batches().len() as f64;
    assert!((stats.mean - mean).abs() < 1e-12);
}

#[test]
fn pairing_check_second_moment_hat() {
    // k = 2 with both eta = Hat(1): the CUE centered second moment matches
    // the pairing sum within 3 stderr (n = 256, 1e4 batches)
    let eta = TestFunction::hat(1.0);
    let chk = pairing_moment_check(&[eta.clone(), eta], 256, 10_000, 0xDEC6).unwrap();
    println!(
        "pairing k2: empirical {:.5} +- {:.5}, prediction {:.5}",
        chk.empirical, chk.stderr, chk.prediction
    );
    assert!(
        (chk.empirical - chk.prediction).abs() < 3.0 * chk.stderr,
        "empirical {} prediction {} stderr {}",
        chk.empirical,
        chk.prediction,
        chk.stderr
    );
}

#[test]
fn pairing_check_odd_vanishes() {
    let eta = TestFunction::bandlimited_bump(0.6);
    let chk =
        pairing_moment_check(&[eta.clone(), eta.clone(), eta], 64, 4_000, 0xDEC7).unwrap();
    assert_eq!(chk.prediction, 0.0);
    assert!(
        chk.empirical.abs() < 3.0 * chk.stderr,
        "empirical {} stderr {}",
        chk.empirical,
        chk.stderr
    );
}

#[test]
fn pairing_check_fourth_moment() {
    // k = 4 equal etas at the budget boundary: 3 (pair integral)^2 within
    // max(3 stderr, 10%)
    let eta = TestFunction::bandlimited_bump(0.5);
    let etas = vec![eta.clone(), eta.clone(), eta.clone(), eta];
    let chk = pairing_moment_check(&etas, 64, 6_000, 0xDEC8).unwrap();
    let tol = (3.0 * chk.stderr).max(0.1 * chk.prediction.abs());
    println!(
        "pairing k4: empirical {:.6} +- {:.6}, prediction {:.6}",
        chk.empirical, chk.stderr, chk.prediction
    );
    assert!(
        (chk.empirical - chk.prediction).abs() < tol,
        "empirical {} prediction {} tol {}",
        chk.empirical,
        chk.prediction,
        tol
    );
}

#[test]
fn smoothed_statistic_variance_matches_functional() {
    // SmoothBump at L = 32, n = 512: variance within 15% of the full-line
    // variance functional
    let eta = TestFunction::smooth_bump(1.0);
    let sample = sample_haar(512, 400, 0xDEC9);
    let values = smoothed_values(&sample, &eta, 32.0).unwrap();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    let v_inf = zmeso::variance_functional(&eta, 512.0);
    let rel = (var / v_inf - 1.0).abs();
    println!("CUE var {var:.5} vs functional {v_inf:.5} (rel {rel:.3})");
    assert!(rel < 0.15, "rel {rel}");
}

#[test]
fn oscillatory_pair_moment_tracks_sine_kernel() {
    // (alpha, -alpha) second moment vs the modulated pairing value, 25%
    let r = TestFunction::bandlimited_bump(0.9);
    let n_meso = 8.0;
    let alpha = 0.5;
    let osc = oscillatory_rmt_statistic(&r, &[alpha, -alpha], n_meso, 128, 3_000, 0xDECA).unwrap();
    let (cov, se) = osc.cov[0][1];
    let predicted = oscillatory_pair_prediction(&r, alpha, n_meso).unwrap();
    println!("osc cov {:.4} +- {se:.4} vs prediction {predicted:.4}", cov.re);
    assert!(cov.im.abs() < 4.0 * se);
    assert!(
        (cov.re - predicted).abs() < 0.25 * predicted,
        "cov {} vs prediction {predicted}",
        cov.re
    );
}

#[test]
fn oscillatory_odd_moment_vanishes() {
    // k = 3 generic alphas: centered product within 3 stderr of 0
    let r = TestFunction::bandlimited_bump(0.5);
    let n_meso = 6.0;
    let alphas = [0.4, -0.25, 0.3];
    let n = 96usize;
    let batches = 3_000;
    let s = sample_haar(n, batches, 0xDECB);
    let mut vals = Vec::with_capacity(batches);
    for batch in s.batches() {
        let mut ds = [Complex64::new(0.0, 0.0); 3];
        for &th in batch {
            let xi = n as f64 * th;
            let w = r.eval(xi / n_meso);
            if w != 0.0 {
                for (i, &a) in alphas.iter().enumerate() {
                    ds[i] += Complex64::from_polar(w, std::f64::consts::TAU * a * xi);
                }
            }
        }
        vals.push(ds);
    }
    let b = batches as f64;
    let means: Vec<Complex64> = (0..3)
        .map(|i| vals.iter().map(|v| v[i]).sum::<Complex64>() / b)
        .collect();
    let prods: Vec<Complex64> = vals
        .iter()
        .map(|v| (v[0] - means[0]) * (v[1] - means[1]) * (v[2] - means[2]))
        .collect();
    let mean: Complex64 = prods.iter().sum::<Complex64>() / b;
    let var: f64 = prods.iter().map(|p| (p - mean).norm_sqr()).sum::<f64>() / b;
    let se = (var / b).sqrt();
    assert!(mean.norm() < 3.0 * se, "k3 moment {mean} stderr {se}");
}

#[test]
fn oscillatory_mesoscopic_stability() {
    // the (alpha, -alpha) covariance per unit n_meso agrees between
    // n_meso = 8 and 16 within combined stderr at n = 512
    let r = TestFunction::bandlimited_bump(0.9);
    let alpha = 0.35;
    let mut got = Vec::new();
    for (n_meso, seed) in [(8.0, 0xDECD), (16.0, 0xDECE)] {
        let osc =
            oscillatory_rmt_statistic(&r, &[alpha, -alpha], n_meso, 512, 500, seed).unwrap();
        let (cov, se) = osc.cov[0][1];
        got.push((cov.re / n_meso, se / n_meso));
        println!("n_meso={n_meso}: cov/n = {:.4} +- {:.4}", cov.re / n_meso, se / n_meso);
    }
    let diff = (got[0].0 - got[1].0).abs();
    let combined = (got[0].1 * got[0].1 + got[1].1 * got[1].1).sqrt();
    assert!(diff < 3.0 * combined, "diff {diff} vs combined stderr {combined}");
}
