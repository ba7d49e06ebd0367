//! `log R(q)` against the defining series `L(1, chi) = sum chi(n)/n`,
//! summed over whole periods so that the tail is `O(1/N)`.

use bsratio::ntheory::{build_field, find_primitive_root};
use bsratio::ratio::{log_ratio_digamma, log_ratio_fft, log_ratio_naive};
use num_complex::Complex64;

fn series_log_ratio(q: u64, periods: u64) -> f64 {
    let g = find_primitive_root(q).unwrap();
    let n = (q - 1) as usize;
    let mut index = vec![0usize; q as usize];
    let mut x = 1u64;
    for k in 0..n {
        index[x as usize] = k;
        x = x * g % q;
    }
    // partial sums of 1/m in each residue class a, paired over blocks
    let mut class = vec![0.0f64; q as usize];
    for block in 0..periods {
        for a in 1..q {
            class[a as usize] += 1.0 / (block * q + a) as f64;
        }
    }
    let mut total = 0.0;
    for j in 1..n {
        let mut l = Complex64::new(0.0, 0.0);
        for a in 1..q {
            let t = 2.0 * std::f64::consts::PI * ((j * index[a as usize]) % n) as f64 / n as f64;
            l += Complex64::new(t.cos(), t.sin()) * class[a as usize];
        }
        total += l.norm().ln();
    }
    total
}

#[test]
fn matches_the_defining_series() {
    for q in [3u64, 5, 7, 11, 13] {
        let want = series_log_ratio(q, 400_000);
        let field = build_field(q).unwrap();
        for rec in [
            log_ratio_fft(&field).unwrap(),
            log_ratio_digamma(&field).unwrap(),
            log_ratio_naive(&field).unwrap(),
        ] {
            assert!(
                (rec.log_r - want).abs() < 1e-4,
                "q={q} {}: {} vs {want}",
                rec.method,
                rec.log_r
            );
        }
    }
}
