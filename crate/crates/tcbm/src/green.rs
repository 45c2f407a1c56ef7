//! Green kernels for intervals and balls, the scale function ζ_d, and the
//! mean-exit-mass bound E_x[A at exit of B(x,r)] ≤ C ζ_d(r,κ).
//!
//! Two ball kernels ship.  The *dominating* kernel (−(1/π)log s for d=2,
//! Γ(d/2−1)/(2π^{d/2}) s^{2−d} for d≥3) ignores the boundary term and is
//! what the bound machinery uses; the *exact-center* kernel keeps the
//! boundary term and serves as the quadrature oracle.  `green_mass` mirrors
//! the dyadic-shell decomposition B(x, r2^{-(k-1)}) \ B(x, r2^{-k}) that
//! proves the bound, evaluating each shell with the true measure and the
//! kernel's supremum on the shell, plus an analytic tail.

use crate::error::{check_finite, check_finite_scalar, check_positive, Error, Result};
use crate::mc::{self, McEstimate};
use crate::measures::{unit_sphere_area, Family, MeasureSpec};
use crate::quad;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Γ(d/2−1)/(2π^{d/2}), the Newtonian kernel coefficient for d ≥ 3.
fn newton_coeff(d: u32) -> f64 {
    let half = d as f64 / 2.0;
    libm::tgamma(half - 1.0) / (2.0 * std::f64::consts::PI.powf(half))
}

/// Green function of the interval (a,b): 2(x∧y−a)(b−x∨y)/(b−a).
pub fn green_interval(a: f64, b: f64, x: f64, y: f64) -> Result<f64> {
    for (what, v) in [("a", a), ("b", b), ("x", x), ("y", y)] {
        check_finite_scalar(what, v)?;
        let _ = what;
    }
    if a >= b {
        return Err(Error::Domain {
            what: "interval",
            detail: format!("a = {a} must be < b = {b}"),
        });
    }
    if x <= a || x >= b || y <= a || y >= b {
        return Err(Error::Domain {
            what: "interval kernel argument",
            detail: format!("x = {x}, y = {y} must lie in ({a}, {b})"),
        });
    }
    Ok(2.0 * (x.min(y) - a) * (b - x.max(y)) / (b - a))
}

/// Dominating ball kernel at the pole: −(1/π)log|x−y| (d=2, |x−y| ≤ 1) or
/// Γ(d/2−1)/(2π^{d/2}) |x−y|^{2−d} (d ≥ 3).
pub fn green_ball_dominating(d: u32, x_center: &[f64], y: &[f64]) -> Result<f64> {
    check_finite("kernel pole", x_center)?;
    check_finite("kernel argument", y)?;
    if x_center.len() != y.len() {
        return Err(Error::DimMismatch {
            expected: x_center.len(),
            got: y.len(),
        });
    }
    let s = x_center
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    green_ball_dominating_radial(d, s)
}

/// Radial form of the dominating kernel, in the separation s = |x−y|.
pub fn green_ball_dominating_radial(d: u32, s: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain {
            what: "dominating kernel dimension",
            detail: format!("d = {d} must be ≥ 2"),
        });
    }
    if s <= 0.0 {
        return Err(Error::Domain {
            what: "kernel separation",
            detail: "singular at coincident points".into(),
        });
    }
    if d == 2 {
        if s > 1.0 {
            return Err(Error::Domain {
                what: "kernel separation",
                detail: format!("the planar kernel is nonnegative only for s ≤ 1; got {s}"),
            });
        }
        Ok(-(s.ln()) / std::f64::consts::PI)
    } else {
        Ok(newton_coeff(d) * s.powi(2 - d as i32))
    }
}

/// Green function of the ball B(·, r) evaluated at the center against a
/// point at distance ρ, with the boundary term kept: r−ρ (d=1),
/// (1/π)log(r/ρ) (d=2), coeff·(ρ^{2−d} − r^{2−d}) (d ≥ 3).
pub fn green_ball_exact_center(d: u32, r: f64, rho: f64) -> Result<f64> {
    check_positive("ball radius", r)?;
    if !(rho > 0.0 && rho < r) {
        return Err(Error::Domain {
            what: "exact-center kernel",
            detail: format!("need 0 < ρ < r; got ρ = {rho}, r = {r}"),
        });
    }
    match d {
        0 => Err(Error::Domain {
            what: "dimension",
            detail: "d = 0".into(),
        }),
        1 => Ok(r - rho),
        2 => Ok((r / rho).ln() / std::f64::consts::PI),
        _ => {
            let e = 2 - d as i32;
            Ok(newton_coeff(d) * (rho.powi(e) - r.powi(e)))
        }
    }
}

/// Scale function ζ_d(s,t): s^{2−d+t} for d = 1 or d ≥ 3, −s^t log s for
/// d = 2.  Defined for s ∈ (0,1], t ≥ 0.
pub fn zeta(d: u32, s: f64, t: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain {
            what: "zeta scale",
            detail: format!("s = {s} outside (0, 1]"),
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            what: "zeta exponent",
            detail: format!("t = {t}"),
        });
    }
    if d == 2 {
        Ok(-s.powf(t) * s.ln())
    } else {
        Ok(s.powf(2.0 - d as f64 + t))
    }
}

/// The explicit constant C with ∫ g_{B(x,r)}(x,·) dμ ≤ C ζ_d(r,κ) for
/// r ≤ 1/2, read off the dyadic-shell series:
/// d=1: 4K; d=2: (K2^κ/π)(S₁+S₂) with S₁ = 1/(2^κ−1), S₂ = 2^κ/(2^κ−1)²;
/// d≥3: K·coeff·2^κ/(2^γ−1) with γ = 2−d+κ.
pub fn exit_mass_bound_constant(d: u32, kappa: f64, k_const: f64) -> Result<f64> {
    check_positive("regularity constant", k_const)?;
    let gamma = 2.0 - d as f64 + kappa;
    let gamma_positive = gamma > 0.0;
    if !gamma_positive {
        return Err(Error::KappaTooSmall {
            kappa,
            floor: d as f64 - 2.0,
            dim: d,
        });
    }
    match d {
        0 => Err(Error::Domain {
            what: "dimension",
            detail: "d = 0".into(),
        }),
        1 => Ok(4.0 * k_const),
        2 => {
            let w = 2f64.powf(kappa);
            let s1 = 1.0 / (w - 1.0);
            let s2 = w / ((w - 1.0) * (w - 1.0));
            Ok(k_const * w / std::f64::consts::PI * (s1 + s2))
        }
        _ => {
            let w = 2f64.powf(kappa);
            Ok(k_const * newton_coeff(d) * w / (2f64.powf(gamma) - 1.0))
        }
    }
}

fn validate_probe_domain(spec: &MeasureSpec, x: &[f64], r: f64) -> Result<()> {
    check_positive("ball radius", r)?;
    check_finite("ball center", x)?;
    if x.len() != spec.dim as usize {
        return Err(Error::DimMismatch {
            expected: spec.dim as usize,
            got: x.len(),
        });
    }
    if r > spec.r_max / 2.0 {
        return Err(Error::Domain {
            what: "ball radius",
            detail: format!("r = {r} exceeds R/2 = {}", spec.r_max / 2.0),
        });
    }
    let off = x
        .iter()
        .zip(&spec.p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if off > r * (1.0 + 1e-12) {
        return Err(Error::Domain {
            what: "ball center",
            detail: format!("|x − p| = {off} exceeds r = {r}"),
        });
    }
    Ok(())
}

/// Kernel supremum outside B(x, r·2^{−k}) inside B(x,r).
fn shell_sup(d: u32, r: f64, k: u32) -> f64 {
    let rk = r * 2f64.powi(-(k as i32));
    match d {
        1 => r - rk,
        2 => -(rk.ln()) / std::f64::consts::PI,
        _ => newton_coeff(d) * rk.powi(2 - d as i32),
    }
}

fn green_mass_with_shells(spec: &MeasureSpec, x: &[f64], r: f64, kmax: u32) -> Result<f64> {
    validate_probe_domain(spec, x, r)?;
    let d = spec.dim;
    let mut outer = spec.ball_mass(x, r)?;
    if outer == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for k in 1..=kmax {
        let inner = spec.ball_mass(x, r * 2f64.powi(-(k as i32)))?;
        total += shell_sup(d, r, k) * (outer - inner);
        outer = inner;
    }
    // tail beyond the last shell
    if d == 1 {
        // the kernel is bounded by r on the inner ball; use its true mass
        total += outer * r;
    } else {
        // continue the proof's series with the certified mass bound
        // Σ_{k>kmax} K (r 2^{−(k−1)})^κ · sup-kernel(r 2^{−k})
        let mut k = kmax + 1;
        loop {
            let outer_bound = spec.k_const * (r * 2f64.powi(-(k as i32 - 1))).powf(spec.kappa);
            let term = outer_bound * shell_sup(d, r, k);
            total += term;
            if term < 1e-17 * total.max(1e-300) || k > kmax + 8000 {
                break;
            }
            k += 1;
        }
    }
    Ok(total)
}

/// Dyadic-shell upper quadrature of ∫_{B(x,r)} g_{B(x,r)}(x,y) dμ(y).
/// Requires r ≤ R/2 and |x−p| ≤ r so the certified mass bound covers every
/// shell.  The result always dominates the true integral and is itself
/// bounded by `exit_mass_bound_constant` · ζ_d(r,κ).
pub fn green_mass(spec: &MeasureSpec, x: &[f64], r: f64) -> Result<f64> {
    green_mass_with_shells(spec, x, r, 20)
}

/// Exact quadrature of the Green integral when a closed kernel is available:
/// any measure in d=1 (interval kernel), and radially-symmetric-about-x
/// situations in d ≥ 2 (exact-center kernel).  Returns None otherwise.
pub fn green_integral_exact(spec: &MeasureSpec, x: &[f64], r: f64) -> Result<Option<f64>> {
    validate_probe_domain(spec, x, r)?;
    let d = spec.dim;
    if d == 1 {
        let (a, b) = (x[0] - r, x[0] + r);
        let mut cuts: Vec<f64> = spec
            .radial_breakpoints()
            .iter()
            .flat_map(|&c| [spec.p[0] - c, spec.p[0] + c])
            .collect();
        cuts.push(x[0]);
        let f = |y: f64| (r - (y - x[0]).abs()) * spec.density_at(&[y]);
        let scale = spec.ball_mass(x, r)? * r;
        let (v, _) = quad::integrate_with_breakpoints(&f, a, b, &cuts, 1e-10 * scale.max(1e-12));
        return Ok(Some(v));
    }
    let centered = x
        .iter()
        .zip(&spec.p)
        .all(|(a, b)| (a - b).abs() < 1e-14);
    let radial_about_x = centered || matches!(spec.family, Family::Constant { .. });
    if !radial_about_x {
        return Ok(None);
    }
    let dens: Box<dyn Fn(f64) -> f64> = match &spec.family {
        Family::Constant { c } => {
            let c = *c;
            Box::new(move |_| c)
        }
        _ => Box::new(|rho| spec.density_radial(rho)),
    };
    let area = unit_sphere_area(d);
    let f = |rho: f64| {
        if rho <= 0.0 || rho >= r {
            return 0.0;
        }
        green_ball_exact_center(d, r, rho).unwrap() * area * rho.powi(d as i32 - 1) * dens(rho)
    };
    let cuts = spec.radial_breakpoints();
    let scale = spec.ball_mass(x, r)?.max(1e-12);
    let (v, _) = quad::integrate_with_breakpoints(&f, 0.0, r, &cuts, 1e-10 * scale);
    Ok(Some(v))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitMassReport {
    /// Monte Carlo E_x[A at first exit of B(x,r)].
    pub mc: McEstimate,
    /// C ζ_d(r,κ) with the explicit series constant.
    pub bound: f64,
    pub c_explicit: f64,
    /// Dyadic-shell upper quadrature of the Green integral.
    pub shell_estimate: f64,
    /// Exact kernel quadrature where a closed kernel applies.
    pub green_integral: Option<f64>,
    /// mc ≤ bound within one-sided 3σ.
    pub within_bound: bool,
    /// mc matches the exact quadrature within 3σ (when available).
    pub agrees_with_green: Option<bool>,
}

/// Verify E_x[A at exit of B(x,r)] ≤ C ζ_d(r,κ) by simulation, and — where
/// a closed kernel exists — that the simulated mean matches the Green
/// integral.
pub fn exit_mass_check(
    spec: &MeasureSpec,
    x: &[f64],
    r: f64,
    dt: f64,
    t_max: f64,
    n_paths: u64,
    seed: u64,
) -> Result<ExitMassReport> {
    validate_probe_domain(spec, x, r)?;
    check_positive("dt", dt)?;
    check_positive("t_max", t_max)?;
    let d = spec.dim as usize;
    if d > 8 {
        return Err(Error::Domain {
            what: "dimension",
            detail: format!("{d} > 8"),
        });
    }
    let n_steps = (t_max / dt).ceil() as usize;
    let sdt = dt.sqrt();
    let (m, trunc) = mc::par_estimate(n_paths, |i| {
        let mut rng = mc::rng_for(seed, 0x93_ee, i);
        let mut y = [0.0f64; 8];
        y[..d].copy_from_slice(x);
        let mut f_prev = spec.density_at(&y[..d]);
        let mut dist_prev = 0.0f64;
        let mut a = 0.0f64;
        for _ in 0..n_steps {
            let mut d2 = 0.0;
            for (j, yj) in y.iter_mut().enumerate().take(d) {
                let g: f64 = rng.sample(StandardNormal);
                *yj += g * sdt;
                let c = *yj - x[j];
                d2 += c * c;
            }
            let dist = d2.sqrt();
            let f_next = spec.density_at(&y[..d]);
            let half = 0.25 * (f_prev + f_next) * dt;
            if dist > r {
                return (a + half, false);
            }
            let p = (-2.0 * (r - dist_prev) * (r - dist) / dt).exp();
            if rng.gen::<f64>() < p {
                return (a + half, false);
            }
            a += 2.0 * half;
            f_prev = f_next;
            dist_prev = dist;
        }
        (a, true)
    });
    let mc_est = McEstimate::from_moments(&m, trunc);
    let c_explicit = exit_mass_bound_constant(spec.dim, spec.kappa, spec.k_const)?;
    let bound = c_explicit * zeta(spec.dim, r, spec.kappa)?;
    let shell_estimate = green_mass(spec, x, r)?;
    let green_integral = green_integral_exact(spec, x, r)?;
    let within_bound = mc_est.estimate <= bound + 3.0 * mc_est.stderr;
    let agrees_with_green =
        green_integral.map(|g| (mc_est.estimate - g).abs() <= 3.0 * mc_est.stderr.max(1e-12));
    Ok(ExitMassReport {
        mc: mc_est,
        bound,
        c_explicit,
        shell_estimate,
        green_integral,
        within_bound,
        agrees_with_green,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LogPowerReport {
    /// max over the grid of (−s^a log s) / ((1/b) s^{a−b}); ≤ 1 iff the
    /// log-power inequality holds on the grid.
    pub max_log_ratio: f64,
    pub log_holds: bool,
    /// minimal c with exp(−c_scale · r^{−δ}) ≤ c·r on the r grid.
    pub minimal_c_delta: f64,
}

/// Pointwise verification of −s^a log s ≤ (1/b) s^{a−b} (0 < b ≤ a,
/// s ∈ (0,1]) and calibration of the minimal constant turning
/// exp(−c_scale r^{−δ}) into a linear bound c_δ · r.
pub fn log_power_inequality_check(
    s_grid: &[f64],
    ab_pairs: &[(f64, f64)],
    delta: f64,
    c_scale: f64,
) -> Result<LogPowerReport> {
    check_positive("delta", delta)?;
    check_positive("c_scale", c_scale)?;
    if delta > 1.0 {
        return Err(Error::Domain {
            what: "delta",
            detail: format!("{delta} > 1"),
        });
    }
    let mut max_ratio: f64 = 0.0;
    for &s in s_grid {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain {
                what: "log-power grid point",
                detail: format!("s = {s} outside (0, 1]"),
            });
        }
        for &(a, b) in ab_pairs {
            if !(b > 0.0 && b <= a) {
                return Err(Error::Domain {
                    what: "log-power exponents",
                    detail: format!("need 0 < b ≤ a; got a = {a}, b = {b}"),
                });
            }
            let lhs = -s.powf(a) * s.ln();
            let rhs = s.powf(a - b) / b;
            if lhs > 0.0 {
                max_ratio = max_ratio.max(lhs / rhs);
            }
        }
    }
    let mut minimal_c: f64 = 0.0;
    for &s in s_grid {
        minimal_c = minimal_c.max((-c_scale * s.powf(-delta)).exp() / s);
    }
    Ok(LogPowerReport {
        max_log_ratio: max_ratio,
        log_holds: max_ratio <= 1.0 + 1e-12,
        minimal_c_delta: minimal_c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_kernel_frozen_values() {
        assert_relative_eq!(
            green_interval(0.0, 1.0, 0.5, 0.5).unwrap(),
            0.5,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            green_interval(0.0, 1.0, 0.25, 0.75).unwrap(),
            0.125,
            max_relative = 1e-15
        );
        // boundary vanishing
        assert!(green_interval(0.0, 1.0, 1e-12, 0.5).unwrap() < 1e-11);
        assert!(green_interval(0.0, 1.0, 0.5, 0.5).is_ok());
        assert!(green_interval(1.0, 0.0, 0.5, 0.5).is_err());
        assert!(green_interval(0.0, 1.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn dominating_kernel_frozen_values() {
        let v3 = green_ball_dominating(3, &[0.0; 3], &[0.5, 0.0, 0.0]).unwrap();
        assert_relative_eq!(v3, 1.0 / PI, max_relative = 1e-12);
        let v2 = green_ball_dominating(2, &[0.0; 2], &[0.5, 0.0]).unwrap();
        assert_relative_eq!(v2, 2f64.ln() / PI, max_relative = 1e-12);
        let edge = green_ball_dominating(2, &[0.0; 2], &[1.0, 0.0]).unwrap();
        assert_relative_eq!(edge, 0.0, epsilon = 1e-15);
        assert!(green_ball_dominating(2, &[0.0; 2], &[0.0, 0.0]).is_err());
        assert!(green_ball_dominating(2, &[0.0; 2], &[1.5, 0.0]).is_err());
        assert!(green_ball_dominating(1, &[0.0], &[0.5]).is_err());
    }

    #[test]
    fn exact_center_kernel_frozen_values() {
        let v3 = green_ball_exact_center(3, 1.0, 0.5).unwrap();
        assert_relative_eq!(v3, 1.0 / (2.0 * PI), max_relative = 1e-12);
        let v2 = green_ball_exact_center(2, 1.0, 0.5).unwrap();
        assert_relative_eq!(v2, 2f64.ln() / PI, max_relative = 1e-12);
        // at r = 1 the planar kernels coincide
        assert_relative_eq!(
            v2,
            green_ball_dominating(2, &[0.0; 2], &[0.5, 0.0]).unwrap(),
            max_relative = 1e-12
        );
        let v1 = green_ball_exact_center(1, 0.5, 0.2).unwrap();
        assert_relative_eq!(v1, 0.3, max_relative = 1e-12);
        assert!(green_ball_exact_center(3, 1.0, 1.0 - 1e-13).unwrap() < 1e-10);
        assert!(green_ball_exact_center(3, 1.0, 1.5).is_err());
    }

    #[test]
    fn zeta_frozen_values() {
        assert_eq!(zeta(2, 1.0, 3.0).unwrap(), 0.0);
        assert_relative_eq!(zeta(1, 0.5, 0.0).unwrap(), 0.5, max_relative = 1e-15);
        assert_relative_eq!(zeta(3, 0.25, 2.0).unwrap(), 0.25, max_relative = 1e-15);
        assert!(zeta(2, 0.0, 1.0).is_err());
        assert!(zeta(2, 1.5, 1.0).is_err());
    }

    #[test]
    fn exact_center_is_dominated_for_small_balls() {
        for d in [2u32, 3, 4] {
            for r in [0.25f64, 0.5, 1.0] {
                for frac in [0.1, 0.4, 0.9] {
                    let rho = frac * r;
                    let exact = green_ball_exact_center(d, r, rho).unwrap();
                    let dom = green_ball_dominating_radial(d, rho).unwrap();
                    assert!(
                        exact <= dom + 1e-14,
                        "d={d} r={r} rho={rho}: {exact} > {dom}"
                    );
                }
            }
        }
    }

    #[test]
    fn bound_constant_d1_is_four_k() {
        assert_relative_eq!(exit_mass_bound_constant(1, 1.0, 2.0).unwrap(), 8.0);
        assert!(exit_mass_bound_constant(3, 1.0, 1.0).is_err()); // κ ≤ d−2
    }

    #[test]
    fn shell_quadrature_brackets_the_exact_integral() {
        // d=1 Lebesgue, x=0, r=0.5: exact ∫ (r−|y|) dy = r² = 0.25
        let spec = MeasureSpec::lebesgue(1).unwrap();
        let exact = green_integral_exact(&spec, &[0.0], 0.5).unwrap().unwrap();
        assert_relative_eq!(exact, 0.25, max_relative = 1e-8);
        let shells = green_mass(&spec, &[0.0], 0.5).unwrap();
        let bound =
            exit_mass_bound_constant(1, spec.kappa, spec.k_const).unwrap() * zeta(1, 0.5, spec.kappa).unwrap();
        assert!(exact <= shells + 1e-12, "exact {exact} > shells {shells}");
        assert!(shells <= bound + 1e-12, "shells {shells} > bound {bound}");
    }

    #[test]
    fn shell_quadrature_brackets_in_three_dimensions() {
        // d=3 Lebesgue: exact ∫ g dμ = r²/3
        let spec = MeasureSpec::lebesgue(3).unwrap();
        let r = 0.4;
        let exact = green_integral_exact(&spec, &[0.0; 3], r).unwrap().unwrap();
        assert_relative_eq!(exact, r * r / 3.0, max_relative = 1e-7);
        let shells = green_mass(&spec, &[0.0; 3], r).unwrap();
        let bound = exit_mass_bound_constant(3, spec.kappa, spec.k_const).unwrap()
            * zeta(3, r, spec.kappa).unwrap();
        assert!(exact <= shells + 1e-12);
        assert!(shells <= bound + 1e-12);
    }

    #[test]
    fn zero_measure_gives_zero_everything() {
        let spec = MeasureSpec::zero(2).unwrap();
        assert_eq!(green_mass(&spec, &[0.0; 2], 0.3).unwrap(), 0.0);
        let rep = exit_mass_check(&spec, &[0.0; 2], 0.3, 1e-3, 5.0, 200, 7).unwrap();
        assert_eq!(rep.mc.estimate, 0.0);
        assert!(rep.within_bound);
    }

    #[test]
    fn doubling_shell_count_changes_little() {
        for spec in [
            MeasureSpec::lebesgue(2).unwrap(),
            MeasureSpec::lebesgue(3).unwrap(),
            MeasureSpec::radial_power(3, 1.0, 1.5, 1e-3).unwrap(),
        ] {
            let d = spec.dim as usize;
            let x = vec![0.0; d];
            let a = green_mass_with_shells(&spec, &x, 0.25, 20).unwrap();
            let b = green_mass_with_shells(&spec, &x, 0.25, 40).unwrap();
            assert!(
                (a - b).abs() <= 5e-3 * a.abs().max(1e-300),
                "{}: {a} vs {b}",
                spec.descriptor()
            );
        }
    }

    #[test]
    fn domain_validation_rejects_bad_probes() {
        let spec = MeasureSpec::lebesgue(2).unwrap();
        // r beyond R/2
        assert!(green_mass(&spec, &[0.0; 2], 0.6).is_err());
        // center too far from the regularity center
        assert!(green_mass(&spec, &[0.5, 0.0], 0.2).is_err());
        assert!(green_mass(&spec, &[0.1, 0.0], 0.2).is_ok());
    }

    #[test]
    fn exit_mass_matches_green_integral_interval() {
        let spec = MeasureSpec::lebesgue(1).unwrap();
        let rep = exit_mass_check(&spec, &[0.25], 0.25, 5e-5, 10.0, 4000, 42).unwrap();
        let g = rep.green_integral.unwrap();
        assert_relative_eq!(g, 0.0625, max_relative = 1e-7); // r² with r = 1/4
        assert!(rep.within_bound);
        assert_eq!(rep.agrees_with_green, Some(true));
        assert!(rep.mc.truncation_fraction < 1e-3);
    }

    #[test]
    fn exit_mass_matches_green_integral_ball() {
        let spec = MeasureSpec::lebesgue(3).unwrap();
        let rep = exit_mass_check(&spec, &[0.0; 3], 0.5, 1e-4, 10.0, 4000, 42).unwrap();
        let g = rep.green_integral.unwrap();
        assert_relative_eq!(g, 0.25 / 3.0, max_relative = 1e-7);
        assert!(rep.within_bound);
        assert_eq!(rep.agrees_with_green, Some(true));
    }

    #[test]
    fn log_power_inequality_on_grid() {
        let s: Vec<f64> = (1..=400).map(|i| i as f64 / 400.0).collect();
        let pairs = [(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (0.5, 0.25), (3.0, 0.5)];
        let rep = log_power_inequality_check(&s, &pairs, 1.0, 1.0).unwrap();
        assert!(rep.log_holds, "max ratio = {}", rep.max_log_ratio);
        // sup of exp(−1/r)/r on (0,1] is e^{−1} at r = 1
        assert!(rep.minimal_c_delta < 0.6);
        assert_relative_eq!(rep.minimal_c_delta, (-1.0f64).exp(), max_relative = 1e-9);
        // a = b = 1, s = e^{−1}: lhs e^{−1} ≤ rhs 1
        let one = log_power_inequality_check(&[(-1.0f64).exp()], &[(1.0, 1.0)], 1.0, 1.0).unwrap();
        assert!(one.max_log_ratio <= 1.0);
        assert_relative_eq!(one.max_log_ratio, (-1.0f64).exp(), max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn interval_kernel_is_symmetric_and_nonnegative(
            x in 0.01f64..0.99, y in 0.01f64..0.99
        ) {
            let g = green_interval(0.0, 1.0, x, y).unwrap();
            let h = green_interval(0.0, 1.0, y, x).unwrap();
            prop_assert!(g >= 0.0);
            prop_assert!((g - h).abs() < 1e-14);
        }

        #[test]
        fn shell_estimate_dominates_exact_for_lebesgue(
            r in 0.05f64..0.5, off in 0.0f64..1.0
        ) {
            let spec = MeasureSpec::lebesgue(1).unwrap();
            let x = [off * r];
            let shells = green_mass(&spec, &x, r).unwrap();
            let exact = green_integral_exact(&spec, &x, r).unwrap().unwrap();
            prop_assert!(exact <= shells * (1.0 + 1e-9));
        }
    }
}
