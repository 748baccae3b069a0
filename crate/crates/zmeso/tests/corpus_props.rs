//! Invariant suite for the zero-corpus engine, run against the real table.

use proptest::prelude::*;

use zmeso::corpus::{main_term, omega};
use zmeso::ZeroCorpus;

mod common;
use common::corpus_100k;

#[test]
fn count_nondecreasing_and_window_consistent() {
    let corpus = corpus_100k();
    let top = corpus.max_height();
    let mut prev = 0;
    for i in  0..=200 {
        let t = top * i as f64 / 200.0;
        let c = corpus.count_upto(t).unwrap();
        assert!(c >= prev);
        prev = c;
    }
    // count difference equals window length under the shared boundary rule:
    // count_upto counts gamma <= T, windows are [a, b), so
    // count(b) - count(a) = |[a, b)| + [b is a zero] - [a is a zero]
    let mut state = 0xabcdef12u64;
    let mut rnd = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..500 {
        let a = rnd() * top;
        let b = a + rnd() * (top - a);
        let window = corpus.zeros_in_window(a, b).unwrap().len();
        let ca = corpus.count_upto(a).unwrap();
        let cb = corpus.count_upto(b).unwrap();
        let exact = |x: f64| corpus.ordinates().binary_search_by(|g| g.partial_cmp(&x).unwrap()).is_ok();
        let adjust = exact(b) as i64 - exact(a) as i64;
        assert_eq!((cb - ca) as i64, window as i64 + adjust, "a={a} b={b}");
    }
}

#[test]
fn s_plus_main_term_is_integer_valued() {
    let corpus = corpus_100k();
    for i in 1..=300 {
        let t = corpus.max_height() * i as f64 / 301.0;
        let n = corpus.s_of(t).unwrap() + main_term(t);
        assert!(
            (n - n.round()).abs() < 1e-9,
            "S(t) + main_term(t) = {n} not integral at t = {t}"
        );
    }
}

#[test]
fn s_mean_near_zero_on_band() {
    // mean of S over 1e4 uniform t in [1000, 2000] within 3 MC stderr of 0
    let corpus = corpus_100k();
    let mut state = 0x12345678u64;
    let mut rnd = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let n = 10_000;
    let vals: Vec<f64> = (0..n)
        .map(|_| corpus.s_of(1000.0 + 1000.0 * rnd()).unwrap())
        .collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let stderr = (var / n as f64).sqrt();
    assert!(
        mean.abs() < 3.0 * stderr,
        "mean S = {mean} stderr {stderr}"
    );
}

#[test]
fn omega_tracks_log_density_with_small_constant() {
    // |Omega(xi) - log((|xi|+2)/2pi)| <= C/(|xi|+2) with a single C < 10
    let corpus = corpus_100k();
    let top = corpus.max_height();
    let tau = std::f64::consts::TAU;
    let mut worst_c = 0.0f64;
    for i in 0..1000 {
        let xi = top * (i as f64 + 0.5) / 1000.0;
        let dev = (omega(xi) - ((xi + 2.0) / tau).ln()).abs();
        worst_c = worst_c.max(dev * (xi + 2.0));
    }
    // include the origin where the deviation constant peaks
    for xi in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let dev = (omega(xi) - ((xi + 2.0) / tau).ln()).abs();
        worst_c = worst_c.max(dev * (xi + 2.0));
    }
    assert!(worst_c < 10.0, "fitted C = {worst_c}");
}

#[test]
fn parse_serialize_parse_round_trip_real_table() {
    let corpus = corpus_100k();
    let mut cache = Vec::new();
    corpus.write_cache(&mut cache).unwrap();
    let back = ZeroCorpus::read_cache(std::io::Cursor::new(&cache)).unwrap();
    assert_eq!(back.count(), corpus.count());
    assert_eq!(back.ordinates(), corpus.ordinates());
    assert_eq!(back.max_height(), corpus.max_height());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_round_trip_synthetic(raw in proptest::collection::vec(1.0e-3..1.0e6f64, 1..200)) {
        // build a strictly ascending positive table from arbitrary increments
        let mut acc = 0.0;
        let ordinates: Vec<f64> = raw.iter().map(|d| { acc += d + 1e-6; acc }).collect();
        let text: String = ordinates.iter().map(|g| format!("{g:.9}\n")).collect();
        let corpus = ZeroCorpus::parse(std::io::Cursor::new(text)).unwrap();
        prop_assert_eq!(corpus.count(), ordinates.len());
        let mut cache = Vec::new();
        corpus.write_cache(&mut cache).unwrap();
        let back = ZeroCorpus::read_cache(std::io::Cursor::new(&cache)).unwrap();
        prop_assert_eq!(back.ordinates(), corpus.ordinates());
    }

    #[test]
    fn count_matches_linear_scan(t in 0.0..75_000.0f64) {
        let corpus = corpus_100k();
        let scan = corpus.ordinates().iter().filter(|&&g| g <= t).count();
        prop_assert_eq!(corpus.count_upto(t).unwrap(), scan);
    }
}
