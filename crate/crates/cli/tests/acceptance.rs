//! End-to-end acceptance checks. Each test prints one `criterion N: PASS` or
//! `criterion N: FAIL` line straight to stdout, so the verdicts appear in the
//! test log even when output capture is on.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bsratio::bounds::{check_dusart, lemma1_bound, normalized_holds, refined_bound};
use bsratio::fft::{dft_fast, ComplexSeq};
use bsratio::ntheory::{build_field, is_prime, sieve_primes};
use bsratio::pipeline::{attr, manifest_path, read_rows, scatter_mean_from_svg, summarize_rows, BatchManifest};
use bsratio::primesum::{sigma2, TruncatedL, DEFAULT_A};
use bsratio::ratio::{log_ratio_digamma, log_ratio_fft, log_ratio_naive};
use bsratio::specfun::{digamma, hurwitz_zeta, log_gamma, minimize_c1};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    let line = format!(
        "criterion {id:>2}: {} | {name} | {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
    assert!(ok, "{}", line.trim_end());
}

struct Run {
    ok: bool,
    stdout: String,
    stderr: String,
    elapsed: Duration,
}

fn bsratio(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_bsratio")).args(args).output().unwrap();
    Run {
        ok: out.status.success(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        elapsed: start.elapsed(),
    }
}

/// The number after `key: ` on its own output line.
fn value(stdout: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key:?} in {stdout:?}"))
        .parse()
        .unwrap()
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn criterion_01_ratio_at_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("three.csv");
    let run = bsratio(&["compute", "--from", "3", "--to", "3", "--out", out.to_str().unwrap()]);
    let rows = read_rows(&out).unwrap();
    let r = rows[0].r;
    let closed = PI / (3.0 * 3f64.sqrt());
    let ok = run.ok
        && rows.len() == 1
        && (r - 0.604600).abs() < 1e-5
        && (r - closed).abs() < 1e-10
        && run.elapsed < Duration::from_secs(1);
    report(
        1,
        "R(3) = 0.604599...",
        ok,
        format!(
            "R = {r}, |R - pi/(3 sqrt 3)| = {:e}, {:.3} s",
            (r - closed).abs(),
            secs(run.elapsed)
        ),
    );
}

#[test]
fn criterion_02_class_number_closure() {
    let run = bsratio(&["hreg", "--q", "3"]);
    let sum = value(&run.stdout, "log_R") + value(&run.stdout, "log_H");
    let printed = value(&run.stdout, "log_hReg");
    let ok = run.ok && sum.abs() <= 1e-12 && printed.abs() <= 1e-12 && run.elapsed < Duration::from_secs(1);
    report(
        2,
        "log R(3) + log H(3) = 0",
        ok,
        format!("sum = {sum:e}, {:.3} s", secs(run.elapsed)),
    );
}

#[test]
fn criterion_03_constant_a() {
    let run = bsratio(&["constants"]);
    let a = value(&run.stdout, "A");
    let ok = run.ok && (a - 1.6000883438).abs() <= 1e-9 && run.elapsed < Duration::from_secs(5);
    report(3, "constant A", ok, format!("A = {a}, {:.3} s", secs(run.elapsed)));
}

#[test]
fn criterion_04_refined_bound_maximum() {
    let start = Instant::now();
    let mut best = (0, f64::NEG_INFINITY);
    for q in sieve_primes(10_000).into_iter().skip(1) {
        let v = refined_bound(q);
        if v > best.1 {
            best = (q, v);
        }
    }
    let elapsed = start.elapsed();
    let ok = best.0 == 229 && best.1 < 1.600177 && elapsed < Duration::from_secs(10);
    report(
        4,
        "refined bound maximum at q = 229 below 1.600177",
        ok,
        format!(
            "argmax q = {}, max = {:.13}, value at 229 = {:.13}, {:.3} s",
            best.0,
            best.1,
            refined_bound(229),
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_05_k55_optimization() {
    let start = Instant::now();
    let (k, c1) = minimize_c1();
    let elapsed = start.elapsed();
    let ok = k == 55 && c1 < -0.4152617906 && elapsed < Duration::from_secs(1);
    report(
        5,
        "k = 55 minimizes C1",
        ok,
        format!("k = {k}, C1 = {c1:.13}, {:.3} s", secs(elapsed)),
    );
}

#[test]
fn criterion_06_cross_method_agreement() {
    let start = Instant::now();
    let mut worst = (0, 0.0f64);
    for q in sieve_primes(2000).into_iter().skip(1) {
        let field = build_field(q).unwrap();
        let a = log_ratio_fft(&field).unwrap().log_r;
        let b = log_ratio_digamma(&field).unwrap().log_r;
        let c = log_ratio_naive(&field).unwrap().log_r;
        let d = (a - b).abs().max((a - c).abs()).max((b - c).abs());
        if d > worst.1 {
            worst = (q, d);
        }
    }
    let elapsed = start.elapsed();
    let ok = worst.1 <= 1e-9 && elapsed < Duration::from_secs(300);
    report(
        6,
        "FFT, digamma and naive agree for q <= 2000",
        ok,
        format!(
            "largest pairwise gap {:e} at q = {}, {:.1} s",
            worst.1,
            worst.0,
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_07_certified_verifier() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool: Vec<u64> = sieve_primes(2000).into_iter().filter(|&p| p >= 5).collect();
    let sample: Vec<u64> = pool.choose_multiple(&mut rng, 20).copied().collect();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for &q in &sample {
        let run = bsratio(&["verify", "--q", &q.to_string(), "--delta", "8"]);
        let diff = value(&run.stdout, "difference");
        let fft = log_ratio_fft(&build_field(q).unwrap()).unwrap();
        worst = worst.max(diff);
        if !run.ok || !(diff <= 1e-8 + fft.err_est) || !run.stdout.contains("PASS") {
            failures.push(q);
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(600);
    report(
        7,
        "verify --delta 8 on 20 sampled primes",
        ok,
        format!(
            "primes {sample:?}, largest difference {worst:e}, failures {failures:?}, {:.1} s",
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_08_sigma2_bound() {
    let mut failures = Vec::new();
    let mut largest = (0, 0.0f64);
    let primes: Vec<u64> = sieve_primes(2000).into_iter().skip(1).collect();
    for &q in &primes {
        match sigma2(q, DEFAULT_A, 6) {
            Ok(s) => {
                if s.abs() > largest.1 {
                    largest = (q, s.abs());
                }
                if !(s.abs() <= lemma1_bound(q)) || (q >= 7 && !(s.abs() <= 1.608)) {
                    failures.push(q);
                }
            }
            Err(_) => failures.push(q),
        }
    }
    report(
        8,
        "|Sigma_2| bound for q <= 2000",
        failures.is_empty(),
        format!(
            "{} primes, largest |Sigma_2| = {:.6} at q = {}, failures {failures:?}",
            primes.len(),
            largest.1,
            largest.0
        ),
    );
}

#[test]
fn criterion_09_dusart() {
    let start = Instant::now();
    let xs = [2_278_383.0, 3e6, 1e7];
    let results: Vec<bool> = xs.iter().map(|&x| check_dusart(x).unwrap()).collect();
    let elapsed = start.elapsed();
    let ok = results.iter().all(|&b| b) && elapsed < Duration::from_secs(30);
    report(
        9,
        "Dusart inequality",
        ok,
        format!("x = {xs:?} -> {results:?}, {:.2} s", secs(elapsed)),
    );
}

fn svg_mean(path: &Path) -> f64 {
    let svg = fs::read_to_string(path).unwrap();
    let line = svg.lines().find(|l| l.contains(r#"class="mean""#)).unwrap();
    attr(line, "data-mean").unwrap().parse().unwrap()
}

#[test]
fn criterion_10_desk_scale_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let figs = dir.path().join("figs");
    let run = bsratio(&[
        "compute",
        "--from",
        "3",
        "--to",
        "100000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.ok, "{}", run.stderr);
    let stats = bsratio(&[
        "stats",
        "--in",
        out.to_str().unwrap(),
        "--out-dir",
        figs.to_str().unwrap(),
    ]);
    assert!(stats.ok, "{}", stats.stderr);

    let rows = read_rows(&out).unwrap();
    let summary = summarize_rows(&rows).unwrap();
    let large: Vec<_> = rows.iter().filter(|r| r.q >= 5).collect();
    let inside = large.iter().filter(|r| normalized_holds(r.q, r.r)).count();
    let fraction = inside as f64 / large.len() as f64;

    let mut means_ok = true;
    for (name, normalized) in [
        ("ratio_scatter.svg", false),
        ("normalized_scatter.svg", true),
        ("ratio_histogram.svg", false),
        ("normalized_histogram.svg", true),
    ] {
        let want = if normalized {
            summary.mean_r_norm
        } else {
            summary.mean_r
        };
        let path = figs.join(name);
        means_ok &= svg_mean(&path) == want;
        if name.ends_with("scatter.svg") {
            let svg = fs::read_to_string(&path).unwrap();
            let back = scatter_mean_from_svg(&svg, &rows, normalized).unwrap();
            let (lo, hi) = if normalized {
                (summary.min_r_norm.value, summary.max_r_norm.value)
            } else {
                (summary.min_r.value, summary.max_r.value)
            };
            // pixel coordinates carry two decimals on a 490-pixel axis
            means_ok &= (back - want).abs() <= 0.01 * (hi - lo) / 490.0 * 1.1;
        }
    }
    let printed_mean = value(&stats.stdout, "mean_R");
    let ok = rows.len() == 9591
        && fraction >= 0.999
        && summary.max_r.q == 3
        && means_ok
        && printed_mean == summary.mean_r
        && run.elapsed <= Duration::from_secs(30 * 60);
    report(
        10,
        "desk-scale sweep to 1e5",
        ok,
        format!(
            "{} rows, R_norm in (0.19, 0.68) for {:.4}% of q >= 5, max R at q = {}, SVG means match: {means_ok}, fitted exponent {:.3}, single-threaded {:.1} s",
            rows.len(),
            100.0 * fraction,
            summary.max_r.q,
            summary.loglog_slope.unwrap(),
            secs(run.elapsed)
        ),
    );
}

#[test]
fn criterion_11_determinism_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let compute = |out: &Path, threads: &str, resume: bool| {
        let mut args = vec![
            "compute",
            "--from",
            "3",
            "--to",
            "10000",
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend(["--threads", threads]);
        if resume {
            args.push("--resume");
        }
        let run = bsratio(&args);
        assert!(run.ok, "{}", run.stderr);
        run
    };
    compute(&path("one.csv"), "1", false);
    compute(&path("eight.csv"), "8", false);
    let one = fs::read(path("one.csv")).unwrap();
    let eight = fs::read(path("eight.csv")).unwrap();
    let threads_ok = one == eight;

    // a run killed mid-line, with its manifest lagging behind the CSV
    let killed = path("killed.csv");
    fs::write(&killed, &one[..one.len() * 2 / 5 + 7]).unwrap();
    let mut manifest = BatchManifest::load(&manifest_path(&path("one.csv"))).unwrap();
    manifest.completed_through = Some(1009);
    manifest.output_path = killed.display().to_string();
    fs::write(manifest_path(&killed), serde_json::to_string(&manifest).unwrap()).unwrap();
    compute(&killed, "3", true);
    let resumed_ok = fs::read(&killed).unwrap() == one;

    let again = compute(&path("one.csv"), "2", true);
    let idle_ok = again.stdout.contains("computed 0 rows") && fs::read(path("one.csv")).unwrap() == one;

    report(
        11,
        "determinism and resume",
        threads_ok && resumed_ok && idle_ok,
        format!("threads 1 vs 8 identical: {threads_ok}, killed run resumed identical: {resumed_ok}, finished run resumed untouched: {idle_ok}"),
    );
}

fn dft_oracle(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| {
                    let t = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    v * Complex64::new(t.cos(), t.sin())
                })
                .sum()
        })
        .collect()
}

#[test]
fn criterion_12_property_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);

    let mut fft_err = 0.0f64;
    let mut parseval_err = 0.0f64;
    for n in 1..=512usize {
        let x: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let fast = dft_fast(&ComplexSeq::new(x.clone()).unwrap()).into_vec();
        let slow = dft_oracle(&x);
        let scale: f64 = x.iter().map(|v| v.norm()).sum();
        for (a, b) in fast.iter().zip(&slow) {
            fft_err = fft_err.max((a - b).norm() / scale);
        }
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let spectral: f64 = fast.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
        parseval_err = parseval_err.max((energy - spectral).abs() / energy);
    }
    let fft_ok = fft_err < 1e-12 && parseval_err < 1e-12;

    let mut special_err = 0.0f64;
    for _ in 0..2000 {
        let x: f64 = rng.gen_range(0.01..0.99);
        let lg = log_gamma(x).unwrap();
        let reflection = lg + log_gamma(1.0 - x).unwrap() - (PI / (PI * x).sin()).ln();
        let recurrence = log_gamma(x + 1.0).unwrap() - lg - x.ln();
        let psi = digamma(x).unwrap();
        let psi_reflection = (digamma(1.0 - x).unwrap() - psi - PI / (PI * x).tan()) / (1.0 + psi.abs());
        let psi_recurrence = (digamma(x + 1.0).unwrap() - psi - 1.0 / x) / (1.0 / x);
        let y: f64 = rng.gen_range(0.01..1.0);
        let n = rng.gen_range(2..8u32);
        let whole = 2f64.powi(n as i32) * hurwitz_zeta(n, y).unwrap();
        let halves = hurwitz_zeta(n, y / 2.0).unwrap() + hurwitz_zeta(n, (y + 1.0) / 2.0).unwrap();
        let hz = (halves - whole) / whole;
        for e in [reflection, recurrence, psi_reflection, psi_recurrence, hz] {
            special_err = special_err.max(e.abs());
        }
    }
    let special_ok = special_err < 1e-12;

    let mut tail_ok = true;
    let mut evaluations = 0;
    for q in [5u64, 13, 101, 499] {
        let field = build_field(q).unwrap();
        for p_cut in [q, 3 * q, 20 * q] {
            let mut tl = TruncatedL::new(&field, p_cut).unwrap();
            for n in 2..=8u32 {
                let bound = (p_cut as f64).powf(1.0 - n as f64) / (n as f64 - 1.0);
                for j in 1..(q - 1) as usize {
                    evaluations += 1;
                    match tl.log_l_p(n, j) {
                        Ok(v) => tail_ok &= v.norm() <= bound + 64.0 * f64::EPSILON,
                        Err(_) => tail_ok = false,
                    }
                }
            }
        }
    }
    assert!(is_prime(499));

    report(
        12,
        "property suites",
        fft_ok && special_ok && tail_ok,
        format!(
            "FFT vs DFT oracle n <= 512: max rel err {fft_err:e}; Parseval {parseval_err:e}; special-function identities {special_err:e}; {evaluations} truncated-L evaluations within the tail bound: {tail_ok}"
        ),
    );
}
