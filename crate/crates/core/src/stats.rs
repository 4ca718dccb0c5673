//! Statistical tests and interval estimates used to compare runs: two-sided
//! Mann-Whitney U, Bonferroni correction, Spearman rank correlation, and a
//! percentile bootstrap for the mean.
//!
//! The U test switches between an exact permutation enumeration (small
//! samples, `n_a + n_b <= 12`) and a normal approximation with tie and
//! continuity corrections. The exact path doubles as an oracle for the
//! approximation in the tests.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::rng::Rng;

/// A test statistic together with its two-sided p-value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Pool size at or below which [`mann_whitney_u`] enumerates the exact
/// permutation distribution (at most C(12,6) = 924 arrangements).
pub const EXACT_MWU_MAX_POOL: usize = 12;

fn assert_sample(name: &str, s: &[f64]) {
    assert!(!s.is_empty(), "{name} must be non-empty");
    assert!(
        s.iter().all(|v| v.is_finite()),
        "{name} must contain only finite values"
    );
}

/// Mid-ranks (1-based, ties averaged) of `values`, in input order.
fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average of ranks i+1..=j+1
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// U statistic of the first sample, from pooled mid-ranks.
fn u_statistic(pooled_ranks: &[f64], n_a: usize) -> f64 {
    let r_a: f64 = pooled_ranks[..n_a].iter().sum();
    r_a - (n_a * (n_a + 1)) as f64 / 2.0
}

/// Two-sided Mann-Whitney U test. Returns the first sample's U and the
/// two-sided p-value: exact by enumeration when the pooled size is at most
/// [`EXACT_MWU_MAX_POOL`], otherwise a normal approximation with tie and
/// continuity corrections.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> TestResult {
    assert_sample("first sample", a);
    assert_sample("second sample", b);
    let (n_a, n_b) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let ranks = midranks(&pooled);
    let u = u_statistic(&ranks, n_a);

    if n_a + n_b <= EXACT_MWU_MAX_POOL {
        TestResult {
            statistic: u,
            p_value: exact_mwu_p(&ranks, n_a, u),
        }
    } else {
        TestResult {
            statistic: u,
            p_value: approx_mwu_p(&pooled, &ranks, n_a, n_b, u),
        }
    }
}

/// Exact two-sided p: enumerate every assignment of `n_a` pooled positions
/// to the first sample and compare the resulting U values against `u`.
fn exact_mwu_p(pooled_ranks: &[f64], n_a: usize, u: f64) -> f64 {
    let n = pooled_ranks.len();
    let offset = (n_a * (n_a + 1)) as f64 / 2.0;
    let mut total = 0u64;
    let mut le = 0u64;
    let mut ge = 0u64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n_a {
            continue;
        }
        let mut r = 0.0;
        for (i, rank) in pooled_ranks.iter().enumerate() {
            if mask & (1 << i) != 0 {
                r += rank;
            }
        }
        let u_perm = r - offset;
        total += 1;
        if u_perm <= u + 1e-9 {
            le += 1;
        }
        if u_perm >= u - 1e-9 {
            ge += 1;
        }
    }
    let p = 2.0 * (le.min(ge) as f64) / total as f64;
    p.min(1.0)
}

/// Normal approximation with tie-corrected variance and a 0.5 continuity
/// correction shrinking U toward its null mean.
fn approx_mwu_p(pooled: &[f64], pooled_ranks: &[f64], n_a: usize, n_b: usize, u: f64) -> f64 {
    let n = (n_a + n_b) as f64;
    let mean = (n_a * n_b) as f64 / 2.0;

    // tie sizes, via the multiplicity of each distinct rank value
    let mut sorted: Vec<f64> = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    debug_assert_eq!(pooled_ranks.len(), pooled.len());

    let var = (n_a * n_b) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        // every pooled value identical: no evidence either way
        return 1.0;
    }
    let d = u - mean;
    let z = d.signum() * (d.abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * (1.0 - normal.cdf(z.abs()))).min(1.0)
}

/// Bonferroni correction: each p-value is multiplied by the family size `m`
/// and clamped to 1. `m` may exceed the number of p-values supplied (some
/// family members may have been tested elsewhere) but not be smaller.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<f64> {
    assert!(
        m >= p_values.len(),
        "family size {m} smaller than the {} p-values supplied",
        p_values.len()
    );
    p_values.iter().map(|p| (p * m as f64).min(1.0)).collect()
}

/// Spearman rank correlation with mid-ranks for ties; the p-value uses the
/// t approximation with n - 2 degrees of freedom (exactly 0 at ρ = ±1).
pub fn spearman(x: &[f64], y: &[f64]) -> TestResult {
    assert_eq!(x.len(), y.len(), "samples must have equal length");
    assert!(x.len() >= 3, "need at least 3 pairs");
    assert_sample("x", x);
    assert_sample("y", y);

    let rx = midranks(x);
    let ry = midranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        let dx = rx[i] - mx;
        let dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    assert!(
        sxx > 0.0 && syy > 0.0,
        "constant sample has no rank correlation"
    );
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);

    let p = if rho.abs() >= 1.0 - 1e-12 {
        0.0
    } else {
        let df = n - 2.0;
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).unwrap();
        (2.0 * (1.0 - dist.cdf(t.abs()))).min(1.0)
    };
    TestResult {
        statistic: rho,
        p_value: p,
    }
}

/// Percentile-bootstrap confidence interval for the mean: draw
/// `n_resamples` resamples with replacement, take the mean of each, and
/// return the ((1-level)/2, (1+level)/2) percentiles of those means.
pub fn bootstrap_mean_ci(s: &[f64], level: f64, n_resamples: usize, rng: &mut Rng) -> (f64, f64) {
    assert_sample("sample", s);
    assert!(
        level > 0.0 && level < 1.0,
        "confidence level must lie strictly between 0 and 1"
    );
    assert!(n_resamples >= 100, "need at least 100 resamples");

    let n = s.len();
    let mut means = Vec::with_capacity(n_resamples);
    for _ in 0..n_resamples {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += s[rand::Rng::gen_range(rng, 0..n)];
        }
        means.push(sum / n as f64);
    }
    means.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let pos = p * (n_resamples - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i + 1 < n_resamples {
            // the clamp keeps the interpolant monotone in p despite
            // rounding (two adjacent equal means must interpolate exactly)
            let (a, b) = (means[i], means[i + 1]);
            (a + frac * (b - a)).clamp(a, b)
        } else {
            means[i]
        }
    };
    (q((1.0 - level) / 2.0), q((1.0 + level) / 2.0))
}

/// Default resample count for [`bootstrap_mean_ci`].
pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 5000;
