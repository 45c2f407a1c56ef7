//! Standard Brownian motion (generator ½Δ) on a uniform grid.
//!
//! Exits from balls use the half-space bridge correction: when two successive
//! positions are both inside, the radial gap to the sphere behaves locally
//! like a 1-d Brownian bridge, so an unseen crossing happened with
//! probability exp(−2 s_i s_{i+1}/dt).  Declared exits are placed at the
//! step midpoint.  Mean exit time from B(0,r) is r²/d, the sanity anchor
//! used throughout the tests.

use crate::error::{check_finite, check_positive, Error, Result};
use crate::mc::{self, McEstimate};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct PathSample {
    pub dim: u32,
    pub dt: f64,
    pub seed: u64,
    /// (n_steps + 1) × dim, row-major.
    pub positions: Vec<f64>,
    /// n_steps × dim Gaussian steps, retained so a coupled path can reuse
    /// and reflect them.
    pub increments: Vec<f64>,
}

impl PathSample {
    pub fn n_steps(&self) -> usize {
        self.increments.len() / self.dim as usize
    }

    #[inline]
    pub fn pos(&self, i: usize) -> &[f64] {
        let d = self.dim as usize;
        &self.positions[i * d..(i + 1) * d]
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    /// Build a sample from explicit grid positions (increments recomputed
    /// by differencing); used for derived paths such as mirror images.
    pub fn from_positions(dim: u32, dt: f64, seed: u64, positions: Vec<f64>) -> Self {
        let d = dim as usize;
        let n = positions.len() / d - 1;
        let mut increments = Vec::with_capacity(n * d);
        for i in 0..n {
            for j in 0..d {
                increments.push(positions[(i + 1) * d + j] - positions[i * d + j]);
            }
        }
        PathSample {
            dim,
            dt,
            seed,
            positions,
            increments,
        }
    }

    pub fn dist_to(&self, i: usize, center: &[f64]) -> f64 {
        self.pos(i)
            .iter()
            .zip(center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Simulate B on the grid {0, dt, ..., ⌈t_max/dt⌉ dt}; a pure function of
/// its arguments.
pub fn sample_path(dim: u32, x0: &[f64], dt: f64, t_max: f64, seed: u64) -> Result<PathSample> {
    check_positive("dt", dt)?;
    check_positive("t_max", t_max)?;
    check_finite("start point", x0)?;
    if x0.len() != dim as usize {
        return Err(Error::DimMismatch {
            expected: dim as usize,
            got: x0.len(),
        });
    }
    let n = (t_max / dt).ceil() as usize;
    let d = dim as usize;
    let mut rng = mc::rng_for(seed, 0x0b_70, 0);
    let sdt = dt.sqrt();
    let mut positions = Vec::with_capacity((n + 1) * d);
    let mut increments = Vec::with_capacity(n * d);
    positions.extend_from_slice(x0);
    for i in 0..n {
        for j in 0..d {
            let g: f64 = rng.sample(StandardNormal);
            let inc = g * sdt;
            increments.push(inc);
            let prev = positions[i * d + j];
            positions.push(prev + inc);
        }
    }
    Ok(PathSample {
        dim,
        dt,
        seed,
        positions,
        increments,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitRecord {
    pub exited: bool,
    /// Grid index at which the exit was booked (0 when the path starts
    /// outside the closed ball).
    pub exit_step: usize,
    /// Midpoint placement: t_i + dt/2 for an exit booked on step i → i+1.
    pub exit_time: f64,
    /// First grid position outside for hard exits; the radial projection
    /// onto the sphere for bridge-declared exits.
    pub exit_position: Vec<f64>,
    /// Bridge crossing probability that fired (1.0 for hard exits).
    pub crossing_prob_used: f64,
}

/// First exit of a sampled path from the closed ball B(center, r).
pub fn exit_time_ball(
    path: &PathSample,
    center: &[f64],
    r: f64,
    seed: u64,
) -> Result<ExitRecord> {
    check_positive("ball radius", r)?;
    check_finite("ball center", center)?;
    if center.len() != path.dim as usize {
        return Err(Error::DimMismatch {
            expected: path.dim as usize,
            got: center.len(),
        });
    }
    let mut rng = mc::rng_for(seed, 0x0b_71, 0);
    let mut dist_prev = path.dist_to(0, center);
    if dist_prev > r {
        return Ok(ExitRecord {
            exited: true,
            exit_step: 0,
            exit_time: 0.0,
            exit_position: path.pos(0).to_vec(),
            crossing_prob_used: 1.0,
        });
    }
    for i in 0..path.n_steps() {
        let dist = path.dist_to(i + 1, center);
        if dist > r {
            return Ok(ExitRecord {
                exited: true,
                exit_step: i + 1,
                exit_time: path.time(i) + 0.5 * path.dt,
                exit_position: path.pos(i + 1).to_vec(),
                crossing_prob_used: 1.0,
            });
        }
        let p = (-2.0 * (r - dist_prev) * (r - dist) / path.dt).exp();
        if rng.gen::<f64>() < p {
            // project the inside endpoint radially onto the sphere
            let mut y = path.pos(i + 1).to_vec();
            let scale = if dist > 0.0 { r / dist } else { 1.0 };
            for (yj, cj) in y.iter_mut().zip(center) {
                *yj = cj + (*yj - cj) * scale;
            }
            return Ok(ExitRecord {
                exited: true,
                exit_step: i + 1,
                exit_time: path.time(i) + 0.5 * path.dt,
                exit_position: y,
                crossing_prob_used: p,
            });
        }
        dist_prev = dist;
    }
    Ok(ExitRecord {
        exited: false,
        exit_step: path.n_steps(),
        exit_time: path.n_steps() as f64 * path.dt,
        exit_position: path.pos(path.n_steps()).to_vec(),
        crossing_prob_used: 0.0,
    })
}

/// Streaming single-path exit simulation from the ball center; returns
/// (exit time, exited?).  Identical stepping and bridge logic to
/// `exit_time_ball` without materializing the path.
fn walk_exit(dim: usize, r: f64, dt: f64, t_max: f64, rng: &mut ChaCha8Rng) -> (f64, bool) {
    let sdt = dt.sqrt();
    let n = (t_max / dt).ceil() as usize;
    let mut x = [0.0f64; 8];
    let mut dist_prev = 0.0f64;
    for i in 0..n {
        let mut d2 = 0.0;
        for xj in x.iter_mut().take(dim) {
            let g: f64 = rng.sample(StandardNormal);
            *xj += g * sdt;
            d2 += *xj * *xj;
        }
        let dist = d2.sqrt();
        if dist > r {
            return (i as f64 * dt + 0.5 * dt, true);
        }
        let p = (-2.0 * (r - dist_prev) * (r - dist) / dt).exp();
        if rng.gen::<f64>() < p {
            return (i as f64 * dt + 0.5 * dt, true);
        }
        dist_prev = dist;
    }
    (n as f64 * dt, false)
}

/// Mean exit time of B(0, r) started at the center (truth: r²/d).
/// Paths alive at t_max contribute t_max and are counted as truncated.
pub fn mean_exit_time(
    dim: u32,
    r: f64,
    dt: f64,
    t_max: f64,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_positive("ball radius", r)?;
    check_positive("dt", dt)?;
    if dim == 0 || dim as usize > 8 {
        return Err(Error::Domain {
            what: "dimension",
            detail: format!("{dim} not in 1..=8"),
        });
    }
    let d = dim as usize;
    let (m, trunc) = mc::par_estimate(n_paths, |i| {
        let mut rng = mc::rng_for(seed, 0x0b_72, i);
        let (t, exited) = walk_exit(d, r, dt, t_max, &mut rng);
        (t, !exited)
    });
    Ok(McEstimate::from_moments(&m, trunc))
}

/// P(τ_{B(0,r)} ≤ t) started at the center.
pub fn exit_prob(
    dim: u32,
    r: f64,
    t: f64,
    dt: f64,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_positive("ball radius", r)?;
    check_positive("dt", dt)?;
    check_positive("t", t)?;
    if dim == 0 || dim as usize > 8 {
        return Err(Error::Domain {
            what: "dimension",
            detail: format!("{dim} not in 1..=8"),
        });
    }
    let d = dim as usize;
    let (m, _) = mc::par_estimate(n_paths, |i| {
        let mut rng = mc::rng_for(seed, 0x0b_73, i);
        let (_, exited) = walk_exit(d, r, dt, t, &mut rng);
        (if exited { 1.0 } else { 0.0 }, false)
    });
    Ok(McEstimate::from_moments(&m, 0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitTailRow {
    pub r: f64,
    pub t: f64,
    /// Gaussian scale variable r²/t.
    pub z: f64,
    pub prob: McEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitTailReport {
    pub rows: Vec<ExitTailRow>,
    /// Least-squares fit of log p against z = r²/t.
    pub fit: mc::LineFit,
    /// Negative slope at 3σ: the tail decays at least exponentially in r²/t.
    pub pass_negative_slope: bool,
    /// Minimal C with p ≤ C·exp(−r²/(C t)) across the grid (bisection).
    pub fitted_c: f64,
}

/// Empirical check that P(τ_{B(0,r)} ≤ t) obeys a Gaussian-type bound
/// C·exp(−r²/(C t)).
pub fn exit_tail_check(
    dim: u32,
    grid: &[(f64, f64)],
    dt: f64,
    n_paths: u64,
    seed: u64,
) -> Result<ExitTailReport> {
    let mut rows = Vec::with_capacity(grid.len());
    for (k, &(r, t)) in grid.iter().enumerate() {
        let prob = exit_prob(dim, r, t, dt, n_paths, seed.wrapping_add(k as u64))?;
        rows.push(ExitTailRow {
            r,
            t,
            z: r * r / t,
            prob,
        });
    }
    let pts: Vec<&ExitTailRow> = rows
        .iter()
        .filter(|row| row.prob.estimate > 0.0 && row.prob.estimate < 1.0)
        .collect();
    if pts.len() < 2 {
        return Err(Error::Domain {
            what: "exit tail grid",
            detail: "need at least two grid cells with nondegenerate probabilities".into(),
        });
    }
    let xs: Vec<f64> = pts.iter().map(|row| row.z).collect();
    let ys: Vec<f64> = pts.iter().map(|row| row.prob.estimate.ln()).collect();
    let sigmas: Vec<f64> = pts
        .iter()
        .map(|row| (row.prob.stderr / row.prob.estimate).max(1e-6))
        .collect();
    let fit = mc::fit_line_known_sigma(&xs, &ys, &sigmas);
    let pass_negative_slope = fit.slope + 3.0 * fit.slope_se < 0.0;

    let ok = |c: f64| {
        rows.iter()
            .all(|row| row.prob.estimate <= c * (-row.z / c).exp() + 1e-15)
    };
    let mut lo = 1e-6;
    let mut hi = 1e6;
    if !ok(hi) {
        hi = f64::INFINITY;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(ExitTailReport {
        rows,
        fit,
        pass_negative_slope,
        fitted_c: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn path_shape_and_determinism() {
        let p = sample_path(2, &[1.0, -2.0], 0.01, 1.0, 42).unwrap();
        assert_eq!(p.n_steps(), 100);
        assert_eq!(p.pos(0), &[1.0, -2.0]);
        // increments are exactly the position differences
        for i in 0..p.n_steps() {
            for j in 0..2 {
                let inc = p.increments[i * 2 + j];
                assert_relative_eq!(p.pos(i + 1)[j] - p.pos(i)[j], inc, max_relative = 1e-12);
            }
        }
        let q = sample_path(2, &[1.0, -2.0], 0.01, 1.0, 42).unwrap();
        assert_eq!(p.positions, q.positions);
        let r = sample_path(2, &[1.0, -2.0], 0.01, 1.0, 43).unwrap();
        assert_ne!(p.positions, r.positions);
    }

    #[test]
    fn pooled_moments_match_gaussian_law() {
        // positions at t=1 are N(x0, I): mean within 4σ, variance within 2%
        let n = 30_000u64;
        let (m, _) = mc::par_estimate(n, |i| {
            let p = sample_path(1, &[0.7], 0.02, 1.0, mc::derive_seed(42, 1, i)).unwrap();
            (p.pos(p.n_steps())[0], false)
        });
        assert!((m.mean() - 0.7).abs() < 4.0 * m.stderr());
        assert!((m.variance() - 1.0).abs() < 0.02, "var = {}", m.variance());
    }

    #[test]
    fn starts_outside_exits_immediately() {
        let p = sample_path(2, &[2.0, 0.0], 0.01, 0.1, 1).unwrap();
        let e = exit_time_ball(&p, &[0.0, 0.0], 1.0, 9).unwrap();
        assert!(e.exited);
        assert_eq!(e.exit_step, 0);
        assert_eq!(e.exit_time, 0.0);
    }

    #[test]
    fn exit_times_match_interval_law() {
        // E τ = r²/d for the unit ball; d=1 from the center
        let est = mean_exit_time(1, 1.0, 5e-4, 30.0, 4000, 42).unwrap();
        assert!(
            (est.estimate - 1.0).abs() < 0.05,
            "mean exit {} ± {}",
            est.estimate,
            est.stderr
        );
        assert!(est.truncation_fraction < 1e-3);
    }

    #[test]
    fn exit_time_scales_quadratically_in_radius() {
        let a = mean_exit_time(2, 0.5, 2e-4, 10.0, 4000, 7).unwrap();
        let b = mean_exit_time(2, 1.0, 2e-4, 10.0, 4000, 8).unwrap();
        let ratio = b.estimate / a.estimate;
        let se = ratio * (a.stderr / a.estimate + b.stderr / b.estimate);
        assert!((ratio - 4.0).abs() < 3.0 * se + 0.1, "ratio {ratio} ± {se}");
    }

    #[test]
    fn bridge_correction_removes_most_grid_bias() {
        // without the bridge the walk overestimates τ by O(√dt); with it the
        // estimate at a coarse step is already within ~1%
        let est = mean_exit_time(3, 1.0, 2e-3, 10.0, 20_000, 42).unwrap();
        assert!(
            (est.estimate - 1.0 / 3.0).abs() < 0.01 / 3.0 + 3.0 * est.stderr,
            "mean {} ± {}",
            est.estimate,
            est.stderr
        );
    }

    #[test]
    fn exit_prob_extremes() {
        let tiny = exit_prob(1, 1.0, 0.01, 1e-3, 4000, 42).unwrap();
        assert!(tiny.estimate < 1e-3);
        let sure = exit_prob(1, 1.0, 100.0, 1e-2, 2000, 42).unwrap();
        assert!(sure.estimate > 0.999);
    }

    #[test]
    fn exit_tail_fit_has_negative_slope_and_finite_c() {
        let grid = [(0.5, 0.02), (0.5, 0.05), (0.5, 0.1), (1.0, 0.1), (1.0, 0.2)];
        let rep = exit_tail_check(3, &grid, 1e-3, 4000, 42).unwrap();
        assert!(rep.pass_negative_slope, "fit = {:?}", rep.fit);
        assert!(rep.fitted_c.is_finite() && rep.fitted_c > 0.0);
        // the bound actually holds at the fitted constant
        for row in &rep.rows {
            assert!(row.prob.estimate <= rep.fitted_c * (-row.z / rep.fitted_c).exp() + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(sample_path(1, &[0.0], -0.1, 1.0, 1).is_err());
        assert!(sample_path(2, &[0.0], 0.1, 1.0, 1).is_err());
        assert!(sample_path(1, &[f64::INFINITY], 0.1, 1.0, 1).is_err());
        let p = sample_path(1, &[0.0], 0.1, 1.0, 1).unwrap();
        assert!(exit_time_ball(&p, &[0.0, 0.0], 1.0, 2).is_err());
        assert!(exit_time_ball(&p, &[0.0], 0.0, 2).is_err());
        assert!(mean_exit_time(9, 1.0, 0.1, 1.0, 10, 1).is_err());
    }
}
