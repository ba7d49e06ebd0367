use std::path::PathBuf;
use std::process::ExitCode;

use bsratio::bounds::{lemma1_bound, normalized_holds, NORMALIZED_RANGE};
use bsratio::ntheory::build_field;
use bsratio::pipeline::{
    bound_table, compute_range, fmt_float, plot_histogram, plot_scatter, read_rows, summarize_rows, write_bound_table,
    BoundOptions, ComputeOptions, Summary, SUBGROUP_MIN_Q,
};
use bsratio::primesum::{sigma1, verify_against_fft, DEFAULT_A, DEFAULT_DELTA};
use bsratio::ratio::{log_h, log_hreg, log_ratio_fft};
use bsratio::specfun::constants;
use bsratio::{Error, Result};
use clap::{Parser, Subcommand};

/// Brauer-Siegel ratios of prime cyclotomic fields.
#[derive(Parser)]
#[command(name = "bsratio", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute R(q) for every prime in a range into a CSV file.
    Compute {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Continue a previous run of the same range.
        #[arg(long)]
        resume: bool,
        /// Cross-check every row against the digamma method.
        #[arg(long)]
        paranoid: bool,
    },
    /// Compare the FFT value of log R(q) with the Euler-product verifier.
    Verify {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: u32,
        #[arg(long = "A", default_value_t = DEFAULT_A)]
        a: u64,
    },
    /// Split log R(q) into its prime and prime-power parts.
    Sigma {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: u32,
        #[arg(long = "A", default_value_t = DEFAULT_A)]
        a: u64,
    },
    /// Print the numerical constants.
    Constants,
    /// Print log H(q), log R(q) and log(h Reg).
    Hreg {
        #[arg(long)]
        q: u64,
    },
    /// Summarize a batch CSV and draw its figures.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Evaluate the bounds for every row of a batch CSV.
    Bounds {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also check Dusart's inequality at this x.
        #[arg(long)]
        dusart_x: Option<f64>,
        /// Compute Sigma_2 to this many decimals for small q.
        #[arg(long)]
        sigma2_delta: Option<u32>,
        #[arg(long, default_value_t = 2000)]
        sigma2_max_q: u64,
    },
}

fn print_summary(s: &Summary, normalized_ok: usize, normalized_total: usize) {
    println!("count: {}", s.count);
    println!("mean_R: {}", s.mean_r);
    println!("mean_R_norm: {}", s.mean_r_norm);
    println!("min_R: {} at q = {}", s.min_r.value, s.min_r.q);
    println!("max_R: {} at q = {}", s.max_r.value, s.max_r.q);
    println!("min_R_norm: {} at q = {}", s.min_r_norm.value, s.min_r_norm.q);
    println!("max_R_norm: {} at q = {}", s.max_r_norm.value, s.max_r_norm.q);
    for (name, g) in [("2q+1 prime", &s.sophie_germain), ("2q-1 prime", &s.twin_2qm1)] {
        let show = |v: Option<f64>| v.map_or("-".to_string(), |v| v.to_string());
        println!(
            "{name} (q >= {SUBGROUP_MIN_Q}): count {}, mean_R {}, mean_R_norm {}",
            g.count,
            show(g.mean_r),
            show(g.mean_r_norm)
        );
    }
    if let Some(slope) = s.loglog_slope {
        println!("fitted exponent of log q: {slope}");
    }
    if normalized_total > 0 {
        println!(
            "R_norm in ({}, {}) for q >= {SUBGROUP_MIN_Q}: {normalized_ok} of {normalized_total} ({:.4}%)",
            NORMALIZED_RANGE.0,
            NORMALIZED_RANGE.1,
            100.0 * normalized_ok as f64 / normalized_total as f64
        );
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Compute {
            from,
            to,
            out,
            threads,
            resume,
            paranoid,
        } => {
            let opts = ComputeOptions {
                threads,
                resume,
                paranoid,
            };
            let rep = compute_range(from, to, &opts, &out)?;
            let through = rep
                .manifest
                .completed_through
                .map_or("none".to_string(), |q| q.to_string());
            println!(
                "computed {} rows into {} (complete through {through})",
                rep.computed,
                out.display()
            );
            for m in &rep.mismatches {
                eprintln!(
                    "paranoid: q = {}: FFT and digamma differ by {:e} > {:e}",
                    m.q, m.diff, m.limit
                );
            }
            Ok(rep.mismatches.is_empty())
        }
        Command::Verify { q, delta, a } => {
            let v = verify_against_fft(q, a, delta)?;
            let p = &v.split.plan;
            println!("q: {q}");
            println!(
                "plan: A = {}, P = {}, M = {}, K = {}, delta = {}",
                p.a, p.p, p.m, p.k, p.delta
            );
            println!("fft log_R: {}", v.fft.log_r);
            println!("prime-sum log_R: {}", v.split.log_r_check);
            println!("difference: {:e}", v.diff);
            println!("certified truncation bound: {:e}", p.total_bound());
            println!("tolerance: {:e}", v.tolerance);
            println!("{}", if v.passed() { "PASS" } else { "FAIL" });
            Ok(v.passed())
        }
        Command::Sigma { q, delta, a } => {
            let rec = log_ratio_fft(&build_field(q)?)?;
            let split = sigma1(&rec, a, delta)?;
            println!("q: {q}");
            println!("sigma1: {}", split.sigma1);
            println!("sigma2: {}", split.sigma2);
            println!("sum: {}", split.log_r_check);
            println!("fft log_R: {}", rec.log_r);
            println!("sigma2 bound: {}", lemma1_bound(q));
            Ok(true)
        }
        Command::Constants => {
            let c = constants();
            println!("gamma: {}", c.gamma_euler);
            println!("meissel_mertens: {}", c.meissel_mertens);
            println!("A: {}", c.a_const);
            println!("C1: {}", c.c1_const);
            println!("k_opt: {}", c.k_opt);
            Ok(true)
        }
        Command::Hreg { q } => {
            let rec = log_ratio_fft(&build_field(q)?)?;
            println!("q: {q}");
            println!("log_H: {}", log_h(q));
            println!("log_R: {}", rec.log_r);
            println!("log_hReg: {}", fmt_float(log_hreg(&rec)));
            Ok(true)
        }
        Command::Stats { input, out_dir } => {
            let rows = read_rows(&input)?;
            let s = summarize_rows(&rows).ok_or_else(|| Error::Input(format!("{}: no data rows", input.display())))?;
            let large: Vec<_> = rows.iter().filter(|r| r.q >= SUBGROUP_MIN_Q).collect();
            let inside = large.iter().filter(|r| normalized_holds(r.q, r.r)).count();
            print_summary(&s, inside, large.len());
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::Io {
                path: out_dir.clone(),
                source: e,
            })?;
            let figures = [
                ("ratio_scatter.svg", false),
                ("normalized_scatter.svg", true),
                ("ratio_histogram.svg", false),
                ("normalized_histogram.svg", true),
            ];
            for (i, (name, normalized)) in figures.into_iter().enumerate() {
                let path = out_dir.join(name);
                if i < 2 {
                    plot_scatter(&input, normalized, &path)?;
                } else if rows.len() >= 2 {
                    plot_histogram(&input, normalized, &path)?;
                } else {
                    eprintln!("skipping {name}: a histogram needs at least two rows");
                    continue;
                }
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Bounds {
            input,
            dusart_x,
            sigma2_delta,
            sigma2_max_q,
        } => {
            let rows = read_rows(&input)?;
            let opts = BoundOptions {
                sigma2_delta,
                sigma2_max_q,
                dusart_x,
            };
            let table = bound_table(&rows, &opts)?;
            write_bound_table(std::io::stdout().lock(), &table).map_err(|e| Error::Input(e.to_string()))?;
            let count = |f: &dyn Fn(&bsratio::BoundReport) -> Option<bool>| {
                let vals: Vec<bool> = table.iter().filter_map(f).collect();
                (vals.iter().filter(|&&b| b).count(), vals.len())
            };
            let sigma2 = count(&|r| r.sigma2_ok);
            let envelope = count(&|r| r.envelope_applies().then_some(r.envelope_ok));
            let normalized = count(&|r| (r.q >= SUBGROUP_MIN_Q).then_some(r.normalized_ok));
            eprintln!("sigma2 bound: {} of {} pass", sigma2.0, sigma2.1);
            eprintln!("envelope (q >= 1000): {} of {} pass", envelope.0, envelope.1);
            eprintln!(
                "normalized range (q >= {SUBGROUP_MIN_Q}): {} of {} pass",
                normalized.0, normalized.1
            );
            if let Some(ok) = table.first().and_then(|r| r.dusart_ok) {
                eprintln!("dusart: {}", if ok { "pass" } else { "FAIL" });
            }
            Ok(sigma2.0 == sigma2.1 && table.iter().all(|r| r.dusart_ok != Some(false)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::MalformedRows { errors, .. } = &e {
                for (line, msg) in errors.iter().skip(1) {
                    eprintln!("  line {line}: {msg}");
                }
            }
            ExitCode::FAILURE
        }
    }
}
