//! Seeding, compensated accumulation, and deterministic parallel reduction.
//!
//! Estimates must be bit-reproducible from (arguments, master seed) alone.
//! Two rules make that hold:
//!   * path `i` of stream `salt` uses an RNG derived from
//!     `mix(master, salt, i)` — never a shared sequential generator;
//!   * parallel runs fold fixed index chunks and merge the per-chunk
//!     accumulators in chunk order, so the float operation order does not
//!     depend on the number of workers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapse (master seed, stream salt, item index) into one 64-bit seed.
pub fn derive_seed(master: u64, salt: u64, index: u64) -> u64 {
    let a = splitmix(master ^ 0x243f_6a88_85a3_08d3u64.wrapping_mul(salt.wrapping_add(1)));
    splitmix(a ^ splitmix(salt).rotate_left(17) ^ index)
}

pub fn rng_for(master: u64, salt: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, salt, index))
}

/// Kahan–Babuška compensated sum: running error stays O(eps), independent of
/// the number of terms, which is what the 1e-12 additivity contract needs.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Online mean/variance (Welford) with an exact pairwise merge, so chunked
/// parallel accumulation gives the same answer as a single pass in chunk order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n1 = self.n as f64;
        let n2 = other.n as f64;
        let d = other.mean - self.mean;
        let n = n1 + n2;
        self.mean += d * n2 / n;
        self.m2 += other.m2 + d * d * n1 * n2 / n;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.m2 / (self.n as f64 - 1.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Point estimate with normal-theory confidence interval.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n_paths: u64,
    /// Fraction of paths cut off by the time horizon before their outcome
    /// was determined (0 when the horizon never binds).
    pub truncation_fraction: f64,
}

pub const Z95: f64 = 1.959_963_984_540_054;

impl McEstimate {
    pub fn from_moments(m: &Moments, truncated: u64) -> Self {
        let se = m.stderr();
        McEstimate {
            estimate: m.mean(),
            stderr: se,
            ci_lo: m.mean() - Z95 * se,
            ci_hi: m.mean() + Z95 * se,
            n_paths: m.count(),
            truncation_fraction: truncated as f64 / m.count().max(1) as f64,
        }
    }

    /// Estimate of a Bernoulli probability from a hit count.
    pub fn from_bernoulli(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        McEstimate {
            estimate: p,
            stderr: se,
            ci_lo: p - Z95 * se,
            ci_hi: p + Z95 * se,
            n_paths: n,
            truncation_fraction: 0.0,
        }
    }
}

/// Deterministic parallel fold over `n` items: fixed chunks are mapped in
/// parallel and their accumulators merged in chunk order.  The result is a
/// pure function of the arguments — worker count and scheduling never matter.
pub fn par_fold<A, I, S, M>(n: u64, chunk: u64, init: I, step: S, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, u64) + Sync,
    M: Fn(&mut A, A),
{
    assert!(chunk > 0);
    let n_chunks = n.div_ceil(chunk);
    let mut parts: Vec<A> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let lo = c * chunk;
            let hi = ((c + 1) * chunk).min(n);
            for i in lo..hi {
                step(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut out = init();
    for part in parts.drain(..) {
        merge(&mut out, part);
    }
    out
}

/// Per-path scalar estimate (the common case of `par_fold`).
pub fn par_estimate<F>(n_paths: u64, f: F) -> (Moments, u64)
where
    F: Fn(u64) -> (f64, bool) + Sync,
{
    par_fold(
        n_paths,
        4096,
        || (Moments::new(), 0u64),
        |acc, i| {
            let (x, truncated) = f(i);
            acc.0.push(x);
            if truncated {
                acc.1 += 1;
            }
        },
        |a, b| {
            a.0.merge(&b.0);
            a.1 += b.1;
        },
    )
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// P(standard BM started at a > 0 has no zero on [0, t]) = 2Φ(a/√t) − 1.
pub fn no_zero_prob(a: f64, t: f64) -> f64 {
    2.0 * normal_cdf(a / t.sqrt()) - 1.0
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Weighted least squares with known per-point standard deviations; the slope
/// standard error comes from the weight matrix, not residuals.
pub fn fit_line_known_sigma(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    assert_eq!(xs.len(), sigmas.len());
    let w: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xbar = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ybar = ys.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&w).map(|(x, w)| w * (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .zip(&w)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    LineFit {
        slope,
        intercept: ybar - slope * xbar,
        slope_se: (1.0 / sxx).sqrt(),
    }
}

/// Ordinary least squares; slope standard error from residual variance.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (xs.len().saturating_sub(2)).max(1) as f64;
    LineFit {
        slope,
        intercept,
        slope_se: (ss_res / dof / sxx).sqrt(),
    }
}

/// Two-sided Kolmogorov–Smirnov statistic against a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let f = cdf(*x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Asymptotic Kolmogorov distribution tail: P(D_n > d) for large n.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let lambda = (n as f64).sqrt() * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
    }
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kahan_compensates_many_small_terms() {
        let mut s = KahanSum::new();
        s.add(1.0);
        for _ in 0..10_000_000 {
            s.add(1e-10);
        }
        assert_relative_eq!(s.value(), 1.0 + 1e-3, max_relative = 1e-13);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.37 - 7.0).collect();
        let mut single = Moments::new();
        for &x in &xs {
            single.push(x);
        }
        let mut left = Moments::new();
        let mut right = Moments::new();
        for &x in &xs[..317] {
            left.push(x);
        }
        for &x in &xs[317..] {
            right.push(x);
        }
        left.merge(&right);
        assert_relative_eq!(left.mean(), single.mean(), max_relative = 1e-13);
        assert_relative_eq!(left.variance(), single.variance(), max_relative = 1e-12);
        assert_eq!(left.count(), single.count());
    }

    #[test]
    fn par_fold_is_worker_count_independent() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                par_fold(
                    100_000,
                    1024,
                    Moments::new,
                    |m, i| {
                        let mut rng = rng_for(42, 7, i);
                        use rand::Rng;
                        m.push(rng.gen::<f64>());
                    },
                    |a, b| a.merge(&b),
                )
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.mean().to_bits(), b.mean().to_bits());
        assert_eq!(a.variance().to_bits(), b.variance().to_bits());
    }

    #[test]
    fn derived_seeds_do_not_collide_locally() {
        let mut seen = std::collections::HashSet::new();
        for salt in 0..8u64 {
            for i in 0..10_000u64 {
                assert!(seen.insert(derive_seed(42, salt, i)));
            }
        }
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert_relative_eq!(normal_cdf(0.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(normal_cdf(1.959_963_984_540_054), 0.975, max_relative = 1e-12);
        assert_relative_eq!(normal_cdf(0.1), 0.539_827_837_277_029, max_relative = 1e-12);
        assert_relative_eq!(normal_cdf(0.05), 0.519_938_805_838_373, max_relative = 1e-12);
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let f = fit_line(&xs, &ys);
        assert_relative_eq!(f.slope, 2.5, max_relative = 1e-12);
        assert_relative_eq!(f.intercept, -1.0, max_relative = 1e-12);
        let g = fit_line_known_sigma(&xs, &ys, &[0.1; 4]);
        assert_relative_eq!(g.slope, 2.5, max_relative = 1e-12);
        assert!(g.slope_se > 0.0);
    }

    #[test]
    fn ks_accepts_uniform_sample() {
        use rand::Rng;
        let mut rng = rng_for(42, 99, 0);
        let mut xs: Vec<f64> = (0..5000).map(|_| rng.gen::<f64>()).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(ks_pvalue(d, 5000) > 0.01, "d = {d}");
    }
}
