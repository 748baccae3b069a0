//! Batch experiment driver binding the zero-corpus, test-function,
//! arithmetic, and random-matrix engines into reproducible experiments.

mod config;
mod output;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{parse_eta, ExperimentConfig};
use output::{moment_rows, write_json, write_manifest, write_moment_csv, MomentCsvRow};
use zmeso::arith::{build_sieve, predicted_moment};
use zmeso::meso::{
    oscillatory_covariance, sample_ds_values, sample_linear_values, selberg_residual,
    verify_explicit_formula, WindowConfig,
};
use zmeso::rmt::{
    counting_stats_from, oscillatory_pair_prediction, oscillatory_rmt_statistic,
    pairing_moment_check, sample_haar, smoothed_statistic_clt, trace_power,
};
use zmeso::testfn::TestFunction;
use zmeso::{variance_functional, ZeroCorpus};

#[derive(Parser)]
#[command(
    name = "zmeso",
    about = "Linear statistics of zeta zeros vs Gaussian, prime-sum, and random-matrix predictions"
)]
struct Cli {
    /// Flat key-value config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Overrides {
    /// Zero-ordinate table (text, one ordinate per line).
    #[arg(long, global = true)]
    zeros: Option<PathBuf>,
    /// Von Mangoldt sieve limit.
    #[arg(long, global = true)]
    sieve_limit: Option<u64>,
    /// Base height T.
    #[arg(long, global = true)]
    t: Option<f64>,
    /// Window parameters n(T), comma-separated.
    #[arg(long, global = true)]
    n: Option<String>,
    /// Test function: indicator:W | hat:W | bump:W | bandlimited:D | pwl:FILE.
    #[arg(long, global = true)]
    eta: Option<String>,
    /// Largest moment order.
    #[arg(long, global = true)]
    kmax: Option<usize>,
    /// Monte Carlo samples (window centers or matrix batches).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CUE matrix size for comparison columns.
    #[arg(long, global = true)]
    rmt_n: Option<usize>,
    /// CUE batch count for comparison columns.
    #[arg(long, global = true)]
    rmt_batches: Option<usize>,
    /// Oscillatory frequencies, comma-separated.
    #[arg(long, global = true)]
    alphas: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the zero table and write binary caches (zeros + sieve).
    Ingest,
    /// Window-count variance against the variance functional.
    Fujii,
    /// Moment table with Gaussian, arithmetic, and random-matrix columns.
    MesoClt,
    /// Explicit-formula residual table over doubling zero cutoffs.
    ExplicitFormula,
    /// Prime-number-asymptotic error decay table.
    PntCheck,
    /// Trace moments, counting CLT, smoothed CLT, and pairing checks.
    RmtCompare,
    /// Oscillatory covariance tables, zeta vs CUE.
    Oscillatory,
    /// Selberg-approximation residual diagnostic.
    Selberg,
    /// Render SVG histogram and Q-Q plot from a meso-clt run.
    Report,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    apply_overrides(&mut cfg, &cli.overrides)?;
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;

    match cli.command {
        Command::Ingest => ingest(&cfg),
        Command::Fujii => fujii(&cfg),
        Command::MesoClt => meso_clt(&cfg),
        Command::ExplicitFormula => explicit_formula(&cfg),
        Command::PntCheck => pnt_check(&cfg),
        Command::RmtCompare => rmt_compare(&cfg),
        Command::Oscillatory => oscillatory(&cfg),
        Command::Selberg => selberg(&cfg),
        Command::Report => report(&cfg),
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, ov: &Overrides) -> Result<()> {
    if let Some(v) = &ov.zeros {
        cfg.zeros_path = v.clone();
    }
    if let Some(v) = ov.sieve_limit {
        cfg.sieve_limit = v;
    }
    if let Some(v) = ov.t {
        cfg.t_height = v;
    }
    if let Some(v) = &ov.n {
        cfg.set("n", v)?;
    }
    if let Some(v) = &ov.eta {
        cfg.eta_spec = v.clone();
    }
    if let Some(v) = ov.kmax {
        cfg.k_max = v;
    }
    if let Some(v) = ov.samples {
        cfg.samples = v;
    }
    if let Some(v) = ov.seed {
        cfg.seed = v;
    }
    if let Some(v) = &ov.out {
        cfg.output_dir = v.clone();
    }
    if let Some(v) = ov.rmt_n {
        cfg.rmt_matrix_size = v;
    }
    if let Some(v) = ov.rmt_batches {
        cfg.rmt_batches = v;
    }
    if let Some(v) = &ov.alphas {
        cfg.set("alphas", v)?;
    }
    Ok(())
}

fn load_corpus(cfg: &ExperimentConfig) -> Result<ZeroCorpus> {
    ZeroCorpus::load_text(&cfg.zeros_path).map_err(|e| {
        anyhow::anyhow!("{e}; check --zeros (expected a text table, one ordinate per line)")
    })
}

fn manifest_inputs(cfg: &ExperimentConfig) -> Vec<PathBuf> {
    let mut v = vec![cfg.zeros_path.clone()];
    if let Some(rest) = cfg.eta_spec.strip_prefix("pwl:") {
        v.push(PathBuf::from(rest));
    }
    v
}

fn finish(cfg: &ExperimentConfig, command: &str) -> Result<()> {
    write_manifest(
        &cfg.output_dir,
        command,
        cfg.echo(),
        cfg.seed,
        &manifest_inputs(cfg),
    )?;
    println!("wrote {}", cfg.output_dir.display());
    Ok(())
}

fn ingest(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let cache = cfg.cache_dir();
    std::fs::create_dir_all(&cache)?;
    let zpath = cache.join("zeros.zmc");
    corpus.write_cache(std::fs::File::create(&zpath)?)?;
    let back = ZeroCorpus::read_cache(std::fs::File::open(&zpath)?)?;
    if back.ordinates() != corpus.ordinates() {
        bail!("zero cache round-trip mismatch");
    }
    println!(
        "zeros: {} ordinates up to {:.3} -> {}",
        corpus.count(),
        corpus.max_height(),
        zpath.display()
    );
    let sieve = build_sieve(cfg.sieve_limit)
        .map_err(|e| anyhow::anyhow!("{e}; lower --sieve-limit"))?;
    let spath = cache.join("sieve.zsv");
    sieve.write_cache(std::fs::File::create(&spath)?)?;
    println!("sieve: Lambda to {} -> {}", sieve.limit(), spath.display());
    finish(cfg, "ingest")
}

fn fujii(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let eta = TestFunction::indicator(0.5);
    let mut csv = String::from("n,mean,variance,predicted_variance,ratio\n");
    let mut json_rows = Vec::new();
    for &n in &cfg.n_values {
        let wc = WindowConfig::new(cfg.t_height, n, cfg.samples, cfg.seed);
        let counts = sample_linear_values(&corpus, &eta, &wc)
            .map_err(|e| anyhow::anyhow!("{e}; lower --t or extend the zero table"))?;
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        let var =
            counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / counts.len() as f64;
        let predicted = variance_functional(&eta, n);
        csv.push_str(&format!(
            "{n},{mean:.12e},{var:.12e},{predicted:.12e},{:.12e}\n",
            var / predicted
        ));
        json_rows.push(serde_json::json!({
            "n": n, "mean": mean, "variance": var,
            "predicted_variance": predicted, "ratio": var / predicted,
        }));
    }
    std::fs::write(cfg.output_dir.join("fujii.csv"), csv)?;
    write_json(&cfg.output_dir.join("fujii.json"), &json_rows)?;
    finish(cfg, "fujii")
}

fn meso_clt(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let eta = parse_eta(&cfg.eta_spec)?;
    let sieve = build_sieve(cfg.sieve_limit.max(cfg.t_height as u64 + 1))
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    for &n in &cfg.n_values {
        let wc = WindowConfig::new(cfg.t_height, n, cfg.samples, cfg.seed);
        let values = sample_ds_values(&corpus, &eta, &wc)
            .map_err(|e| anyhow::anyhow!("{e}; shrink --n or --t to stay inside the table"))?;
        let mut report = zmeso::meso::MomentReport {
            rows: zmeso::meso::moments_with_jackknife(&values, cfg.k_max, 100),
            samples: cfg.samples,
            seed: cfg.seed,
        };
        // arithmetic column: prime-sum prediction per order (pairing scale)
        for row in report.rows.iter_mut() {
            if row.k <= 4 {
                let etas: Vec<TestFunction> = std::iter::repeat(eta.clone()).take(row.k).collect();
                if let Ok(pm) = predicted_moment(&etas, cfg.t_height, n, &sieve) {
                    row.arithmetic_prediction = Some(pm.value);
                }
            }
        }
        // random-matrix column: CUE moments of the same test function
        if eta.support_radius().is_finite() {
            let l = n.min(cfg.rmt_matrix_size as f64 / (2.0 * eta.support_radius()));
            if let Ok(rep_rmt) = smoothed_statistic_clt(
                cfg.rmt_matrix_size,
                &eta,
                l,
                cfg.rmt_batches,
                cfg.seed ^ 0x9e37_79b9,
                cfg.k_max,
            ) {
                for (row, rrow) in report.rows.iter_mut().zip(rep_rmt.rows.iter()) {
                    row.rmt_prediction = Some(rrow.empirical_raw);
                }
            }
        }
        let v = variance_functional(&eta, n);
        let gaussian_raw = move |k: usize| {
            if k == 1 {
                0.0
            } else {
                zmeso::meso::gaussian_moment(k) * v.powf(k as f64 / 2.0)
            }
        };
        let rows: Vec<MomentCsvRow> = moment_rows(&report, &gaussian_raw);
        let tag = format!("n{n}");
        write_moment_csv(&cfg.output_dir.join(format!("moments_{tag}.csv")), &rows)?;
        write_json(&cfg.output_dir.join(format!("moments_{tag}.json")), &rows)?;
        let samples_txt: String = values.iter().map(|v| format!("{v:.12e}\n")).collect();
        std::fs::write(cfg.output_dir.join(format!("samples_{tag}.csv")), samples_txt)?;
    }
    finish(cfg, "meso-clt")
}

fn explicit_formula(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let sieve = build_sieve(cfg.sieve_limit).map_err(|e| anyhow::anyhow!("{e}"))?;
    let top = corpus.max_height();
    let mut csv = String::from("zero_cutoff,lhs,rhs,residual\n");
    let mut rows = Vec::new();
    for cutoff in [top / 4.0, top / 2.0, top] {
        let chk = verify_explicit_formula(&corpus, &sieve, 1.0, cutoff, sieve.limit())
            .map_err(|e| anyhow::anyhow!("{e}; raise --sieve-limit"))?;
        csv.push_str(&format!(
            "{cutoff:.6},{:.12e},{:.12e},{:.12e}\n",
            chk.lhs, chk.rhs, chk.residual
        ));
        rows.push(serde_json::json!({
            "zero_cutoff": cutoff, "lhs": chk.lhs, "rhs": chk.rhs, "residual": chk.residual,
        }));
    }
    std::fs::write(cfg.output_dir.join("explicit_formula.csv"), csv)?;
    write_json(&cfg.output_dir.join("explicit_formula.json"), &rows)?;
    finish(cfg, "explicit-formula")
}

fn pnt_check(cfg: &ExperimentConfig) -> Result<()> {
    let sieve = build_sieve(cfg.sieve_limit).map_err(|e| anyhow::anyhow!("{e}"))?;
    let f = TestFunction::smooth_bump(1.0);
    let mut csv = String::from("h,lhs,rhs,abs_err\n");
    let mut rows = Vec::new();
    for h in [8.0, 12.0, 16.0] {
        if (h * 1.0f64).exp() > sieve.limit() as f64 {
            continue;
        }
        let (lhs, rhs) = zmeso::arith::pnt_weighted_sum(&f, h, &sieve)
            .map_err(|e| anyhow::anyhow!("{e}; raise --sieve-limit"))?;
        csv.push_str(&format!("{h},{lhs:.12e},{rhs:.12e},{:.12e}\n", (lhs - rhs).abs()));
        rows.push(serde_json::json!({
            "h": h, "lhs": lhs, "rhs": rhs, "abs_err": (lhs - rhs).abs(),
        }));
    }
    std::fs::write(cfg.output_dir.join("pnt_check.csv"), csv)?;
    write_json(&cfg.output_dir.join("pnt_check.json"), &rows)?;
    finish(cfg, "pnt-check")
}

fn rmt_compare(cfg: &ExperimentConfig) -> Result<()> {
    // Diaconis-Shahshahani identities at n = 8
    let ds_sample = sample_haar(8, cfg.rmt_batches.max(2_000), cfg.seed);
    let mut csv = String::from("j,mean_abs2,stderr,predicted\n");
    for j in 1..=8i64 {
        let tm = trace_power(&ds_sample, j);
        csv.push_str(&format!(
            "{j},{:.12e},{:.12e},{j}\n",
            tm.mean_abs2, tm.mean_abs2_stderr
        ));
    }
    std::fs::write(cfg.output_dir.join("trace_moments.csv"), csv)?;

    // counting CLT at the configured matrix size
    let sample = sample_haar(cfg.rmt_matrix_size, cfg.rmt_batches, cfg.seed ^ 1);
    let mut csv = String::from("L,mean,variance,mean_stderr,variance_stderr\n");
    for &l in &cfg.n_values {
        if l > cfg.rmt_matrix_size as f64 / 2.0 {
            continue;
        }
        let st = counting_stats_from(&sample, l);
        csv.push_str(&format!(
            "{l},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            st.mean, st.variance, st.mean_stderr, st.variance_stderr
        ));
    }
    std::fs::write(cfg.output_dir.join("counting_clt.csv"), csv)?;

    // smoothed CLT moment table for the configured eta
    let eta = parse_eta(&cfg.eta_spec)?;
    if eta.support_radius().is_finite() {
        let l = cfg.n_values[0].min(cfg.rmt_matrix_size as f64 / (2.0 * eta.support_radius()));
        let rep = smoothed_statistic_clt(
            cfg.rmt_matrix_size,
            &eta,
            l,
            cfg.rmt_batches,
            cfg.seed ^ 2,
            cfg.k_max,
        )
        .map_err(|e| anyhow::anyhow!("{e}; shrink --n"))?;
        let v = variance_functional(&eta, cfg.rmt_matrix_size as f64);
        let gaussian_raw = move |k: usize| {
            if k == 1 {
                0.0
            } else {
                zmeso::meso::gaussian_moment(k) * v.powf(k as f64 / 2.0)
            }
        };
        let rows = moment_rows(&rep, &gaussian_raw);
        write_moment_csv(&cfg.output_dir.join("smoothed_clt.csv"), &rows)?;
        write_json(&cfg.output_dir.join("smoothed_clt.json"), &rows)?;
    }

    // pairing check for Hat(1) x Hat(1)
    let hat = TestFunction::hat(1.0);
    let chk = pairing_moment_check(
        &[hat.clone(), hat],
        cfg.rmt_matrix_size,
        cfg.rmt_batches,
        cfg.seed ^ 3,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    write_json(
        &cfg.output_dir.join("pairing_check.json"),
        &serde_json::json!({
            "empirical": chk.empirical, "stderr": chk.stderr, "prediction": chk.prediction,
        }),
    )?;
    finish(cfg, "rmt-compare")
}

fn oscillatory(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let r = parse_eta(&cfg.eta_spec)?;
    if r.fourier_support().is_none() {
        bail!("field eta: oscillatory statistics need a band-limited test function (bandlimited:D)");
    }
    let n_meso = cfg.n_values[0];
    let wc = WindowConfig::new(cfg.t_height, n_meso, cfg.samples, cfg.seed);
    let zeta = oscillatory_covariance(&corpus, &r, &cfg.alphas, &wc)
        .map_err(|e| anyhow::anyhow!("{e}; reduce --alphas magnitudes"))?;
    let cue = oscillatory_rmt_statistic(
        &r,
        &cfg.alphas,
        n_meso,
        cfg.rmt_matrix_size,
        cfg.rmt_batches,
        cfg.seed ^ 4,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut csv = String::from(
        "alpha_i,alpha_j,zeta_re,zeta_im,zeta_stderr,cue_re,cue_im,cue_stderr,pair_prediction\n",
    );
    for (i, &ai) in cfg.alphas.iter().enumerate() {
        for (j, &aj) in cfg.alphas.iter().enumerate() {
            let (zc, zs) = zeta.cov[i][j];
            let (cc, cs) = cue.cov[i][j];
            let pred = if (ai + aj).abs() < 1e-12 {
                oscillatory_pair_prediction(&r, ai, n_meso)
                    .map(|p| format!("{p:.12e}"))
                    .unwrap_or_default()
            } else {
                String::new()
            };
            csv.push_str(&format!(
                "{ai},{aj},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{pred}\n",
                zc.re, zc.im, zs, cc.re, cc.im, cs
            ));
        }
    }
    std::fs::write(cfg.output_dir.join("oscillatory.csv"), csv)?;
    finish(cfg, "oscillatory")
}

fn selberg(cfg: &ExperimentConfig) -> Result<()> {
    let corpus = load_corpus(cfg)?;
    let sieve = build_sieve(cfg.sieve_limit).map_err(|e| anyhow::anyhow!("{e}"))?;
    let k = 2usize;
    let wc = WindowConfig::new(cfg.t_height, 1.0, cfg.samples, cfg.seed);
    let mut res_sq = 0.0;
    let mut s_sq = 0.0;
    for t in zmeso::meso::draw_centers(&wc) {
        let r = selberg_residual(&corpus, t, k, cfg.t_height, &sieve)
            .map_err(|e| anyhow::anyhow!("{e}; raise --sieve-limit"))?;
        res_sq += r * r;
        s_sq += corpus.s_of(t).map_err(|e| anyhow::anyhow!("{e}"))? .powi(2);
    }
    let rows = serde_json::json!({
        "k": k,
        "mean_residual_sq": res_sq / cfg.samples as f64,
        "mean_s_sq": s_sq / cfg.samples as f64,
    });
    std::fs::write(
        cfg.output_dir.join("selberg.csv"),
        format!(
            "k,mean_residual_sq,mean_s_sq\n{k},{:.12e},{:.12e}\n",
            res_sq / cfg.samples as f64,
            s_sq / cfg.samples as f64
        ),
    )?;
    write_json(&cfg.output_dir.join("selberg.json"), &rows)?;
    finish(cfg, "selberg")
}

fn report(cfg: &ExperimentConfig) -> Result<()> {
    let n = cfg.n_values[0];
    let tag = format!("n{n}");
    let samples_path = cfg.output_dir.join(format!("samples_{tag}.csv"));
    let text = std::fs::read_to_string(&samples_path).with_context(|| {
        format!(
            "reading {}; run `zmeso meso-clt` with the same --out first",
            samples_path.display()
        )
    })?;
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.trim().parse::<f64>().context("sample value"))
        .collect::<Result<_>>()?;
    if values.len() < 100 {
        bail!("too few samples ({}) for a histogram", values.len());
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / values.len() as f64)
        .sqrt();
    let normalized: Vec<f64> = values.iter().map(|v| (v - mean) / sd).collect();
    let hist = output::histogram_svg(
        &normalized,
        40,
        &format!("normalized windowed statistic, n = {n} (vs standard normal)"),
    );
    std::fs::write(cfg.output_dir.join(format!("hist_{tag}.svg")), hist)?;
    let qq = output::qq_svg(&normalized, &format!("Q-Q vs standard normal, n = {n}"));
    std::fs::write(cfg.output_dir.join(format!("qq_{tag}.svg")), qq)?;
    finish(cfg, "report")
}
