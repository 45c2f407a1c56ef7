//! Mirror coupling of two Brownian motions and the estimates built on it.
//!
//! The second motion Z̃ is the exact mirror image of the first across the
//! hyperplane H bisecting the two starting points, until the first time Z
//! hits H (the meeting time ξ); afterwards the motions coincide.  The
//! signed distance s_t of Z to H is a standard 1-d Brownian motion started
//! at half the separation, so meeting detection can use the exact 1-d
//! bridge crossing probability exp(−2 s_i s_{i+1}/dt), and the meeting-time
//! law is the first-zero law of that 1-d motion: for initial signed
//! distance a, P(ξ > t) = ∫_{−a}^{a} (2πt)^{−1/2} e^{−u²/2t} du.
//!
//! On top of the coupling: the θ-moment contraction of the stopped
//! distance, the exit-before-meeting probability with its |x−y|^{1−χ−ε}
//! decay, and the clipped clock quantities I = E[A_ξ ∧ 1] feeding the
//! resolvent difference bound.

use crate::brownian::PathSample;
use crate::error::{check_finite, check_positive, Error, Result};
use crate::mc::{self, McEstimate, Moments};
use crate::measures::MeasureSpec;
use crate::pcaf::{self, PcafTrace};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// Mirror image of z across the hyperplane {w : (w − (x+y)/2, x−y) = 0}.
pub fn reflect(x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    check_finite("reflection anchor x", x)?;
    check_finite("reflection anchor y", y)?;
    check_finite("reflection argument", z)?;
    let d = x.len();
    if y.len() != d || z.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: y.len().min(z.len()),
        });
    }
    let h2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if h2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let h = h2.sqrt();
    let mut s = 0.0;
    for j in 0..d {
        let u = (x[j] - y[j]) / h;
        let m = 0.5 * (x[j] + y[j]);
        s += (z[j] - m) * u;
    }
    Ok((0..d)
        .map(|j| {
            let u = (x[j] - y[j]) / h;
            z[j] - 2.0 * s * u
        })
        .collect())
}

/// Exact tail of the meeting time for initial signed distance a (half the
/// starting separation): P(ξ > t) = 2Φ(a/√t) − 1.
pub fn meeting_tail_exact(a: f64, t: f64) -> Result<f64> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Domain {
            what: "initial signed distance",
            detail: format!("{a}"),
        });
    }
    check_positive("time", t)?;
    Ok(mc::no_zero_prob(a, t))
}

#[derive(Debug, Clone)]
pub struct CoupledTrajectory {
    /// The driving motion Z started at x.
    pub base: PathSample,
    /// Mirror positions Z̃ (flat, same layout as base.positions); equal to the
    /// base positions from `xi_step` on.
    pub mirrored: Vec<f64>,
    /// Signed distance of Z to the mirror hyperplane at each grid time.
    pub signed_dist: Vec<f64>,
    /// Meeting time, placed at the step midpoint; None if beyond horizon.
    pub xi: Option<f64>,
    /// First grid index at which the two positions coincide.
    pub xi_step: usize,
    pub a_trace: PcafTrace,
    pub a_tilde_trace: PcafTrace,
    /// Clock values at ξ (linear interpolation); totals when ξ is beyond
    /// the horizon.
    pub a_at_xi: f64,
    pub a_tilde_at_xi: f64,
}

impl CoupledTrajectory {
    pub fn mirrored_pos(&self, i: usize) -> &[f64] {
        let d = self.base.dim as usize;
        &self.mirrored[i * d..(i + 1) * d]
    }
}

/// Materialized mirror couple: Z from a sampled path, Z̃ by reflection
/// until the bridge-detected meeting, both clocks accumulated.
pub fn sample_coupled(
    x: &[f64],
    y: &[f64],
    spec: &MeasureSpec,
    dt: f64,
    t_max: f64,
    seed: u64,
) -> Result<CoupledTrajectory> {
    let d = spec.dim as usize;
    if x.len() != d || y.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: x.len().min(y.len()),
        });
    }
    let h2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if h2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let base = crate::brownian::sample_path(spec.dim, x, dt, t_max, seed)?;
    let n = base.n_steps();
    let mut rng = mc::rng_for(seed, 0xc0_01, 0);

    let h = h2.sqrt();
    let u: Vec<f64> = (0..d).map(|j| (x[j] - y[j]) / h).collect();
    let m: Vec<f64> = (0..d).map(|j| 0.5 * (x[j] + y[j])).collect();
    let sd = |pos: &[f64]| -> f64 { (0..d).map(|j| (pos[j] - m[j]) * u[j]).sum() };

    let mut signed_dist = Vec::with_capacity(n + 1);
    signed_dist.push(sd(base.pos(0)));
    let mut mirrored = Vec::with_capacity((n + 1) * d);
    let z0 = base.pos(0);
    let s0 = signed_dist[0];
    for j in 0..d {
        mirrored.push(z0[j] - 2.0 * s0 * u[j]);
    }
    let mut xi = None;
    let mut xi_step = n + 1;
    for i in 0..n {
        let s_prev = signed_dist[i];
        let s_next = sd(base.pos(i + 1));
        signed_dist.push(s_next);
        let merged = xi.is_some();
        if !merged {
            let crossed = s_prev.signum() != s_next.signum()
                || s_next == 0.0
                || rng.gen::<f64>() < (-2.0 * s_prev.abs() * s_next.abs() / dt).exp();
            if crossed {
                xi = Some(base.time(i) + 0.5 * dt);
                xi_step = i + 1;
            }
        }
        let z = base.pos(i + 1);
        if xi.is_some() {
            mirrored.extend_from_slice(z);
        } else {
            for j in 0..d {
                mirrored.push(z[j] - 2.0 * s_next * u[j]);
            }
        }
    }
    let mirror_path = PathSample::from_positions(spec.dim, dt, seed, mirrored);
    let a_trace = pcaf::accumulate(&base, spec)?;
    let a_tilde_trace = pcaf::accumulate(&mirror_path, spec)?;
    let (a_at_xi, a_tilde_at_xi) = match xi {
        Some(t) => (a_trace.value_at(t), a_tilde_trace.value_at(t)),
        None => (a_trace.total(), a_tilde_trace.total()),
    };
    Ok(CoupledTrajectory {
        base,
        mirrored: mirror_path.positions,
        signed_dist,
        xi,
        xi_step,
        a_trace,
        a_tilde_trace,
        a_at_xi,
        a_tilde_at_xi,
    })
}

/// Outcome of one streaming couple scan up to the meeting.
struct MeetingScan {
    met: bool,
    /// Clock of Z at ξ (total accumulation when not met).
    a_xi: f64,
    /// Clock of Z̃ at ξ.
    at_xi: f64,
    /// Stopped early because both clocks reached 1.
    saturated: bool,
}

/// Stream one mirror couple from x = (a, 0, …), y = (−a, 0, …) — callers
/// translate coordinates so the mirror hyperplane is {z₁ = 0} — tracking
/// the signed distance exactly and both clocks.  `clip_at_one` permits an
/// early stop once both clocks exceed 1 (for the clipped I-quantities).
#[allow(clippy::too_many_arguments)]
fn scan_meeting(
    x: &[f64],
    y: &[f64],
    spec: &MeasureSpec,
    dt: f64,
    t_max: f64,
    clip_at_one: bool,
    rng: &mut ChaCha8Rng,
) -> MeetingScan {
    let d = spec.dim as usize;
    let h2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    let h = h2.sqrt();
    let u: [f64; 8] = {
        let mut t = [0.0; 8];
        for j in 0..d {
            t[j] = (x[j] - y[j]) / h;
        }
        t
    };
    let m: [f64; 8] = {
        let mut t = [0.0; 8];
        for j in 0..d {
            t[j] = 0.5 * (x[j] + y[j]);
        }
        t
    };
    let mut z = [0.0f64; 8];
    z[..d].copy_from_slice(x);
    let mut zt = [0.0f64; 8];
    let sdt = dt.sqrt();
    let n = (t_max / dt).ceil() as usize;
    let mut s_prev = 0.5 * h;
    let mut a = 0.0f64;
    let mut at = 0.0f64;
    let mut f_prev = spec.density_at(&z[..d]);
    for j in 0..d {
        zt[j] = z[j] - 2.0 * s_prev * u[j];
    }
    let mut ft_prev = spec.density_at(&zt[..d]);
    for _ in 0..n {
        let mut s_next = 0.0;
        for (j, zj) in z.iter_mut().enumerate().take(d) {
            let g: f64 = rng.sample(StandardNormal);
            *zj += g * sdt;
            s_next += (*zj - m[j]) * u[j];
        }
        let crossed = s_next <= 0.0
            || rng.gen::<f64>() < (-2.0 * s_prev * s_next / dt).exp();
        let f_next = spec.density_at(&z[..d]);
        for j in 0..d {
            zt[j] = z[j] - 2.0 * s_next * u[j];
        }
        let ft_next = spec.density_at(&zt[..d]);
        if crossed {
            return MeetingScan {
                met: true,
                a_xi: a + 0.25 * (f_prev + f_next) * dt,
                at_xi: at + 0.25 * (ft_prev + ft_next) * dt,
                saturated: false,
            };
        }
        a += 0.5 * (f_prev + f_next) * dt;
        at += 0.5 * (ft_prev + ft_next) * dt;
        f_prev = f_next;
        ft_prev = ft_next;
        s_prev = s_next;
        if clip_at_one && a >= 1.0 && at >= 1.0 {
            return MeetingScan {
                met: false,
                a_xi: a,
                at_xi: at,
                saturated: true,
            };
        }
    }
    MeetingScan {
        met: false,
        a_xi: a,
        at_xi: at,
        saturated: false,
    }
}

/// Clipped clock means at the meeting time: (E[A_ξ ∧ 1], E[Ã_ξ ∧ 1]).
/// Couples still uncoupled and unclipped at the horizon contribute their
/// truncated values; the truncation fraction bounds the downward bias.
pub fn i_quantities(
    x: &[f64],
    y: &[f64],
    spec: &MeasureSpec,
    dt: f64,
    t_max: f64,
    n_paths: u64,
    seed: u64,
) -> Result<(McEstimate, McEstimate)> {
    check_positive("dt", dt)?;
    check_positive("t_max", t_max)?;
    let d = spec.dim as usize;
    if x.len() != d || y.len() != d || d > 8 {
        return Err(Error::DimMismatch {
            expected: d.min(8),
            got: x.len().min(y.len()),
        });
    }
    let h2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if h2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let (ma, mat, trunc) = mc::par_fold(
        n_paths,
        4096,
        || (Moments::new(), Moments::new(), 0u64),
        |acc, i| {
            let mut rng = mc::rng_for(seed, 0xc0_11, i);
            let scan = scan_meeting(x, y, spec, dt, t_max, true, &mut rng);
            acc.0.push(scan.a_xi.min(1.0));
            acc.1.push(scan.at_xi.min(1.0));
            if !scan.met && !scan.saturated {
                acc.2 += 1;
            }
        },
        |a, b| {
            a.0.merge(&b.0);
            a.1.merge(&b.1);
            a.2 += b.2;
        },
    );
    Ok((
        McEstimate::from_moments(&ma, trunc),
        McEstimate::from_moments(&mat, trunc),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct MeetingTailCell {
    /// Initial signed distance (half the separation of the couple).
    pub a: f64,
    pub t: f64,
    pub empirical: McEstimate,
    pub exact: f64,
    /// a/√(2πt): the linearized tail in terms of the signed distance.
    pub half_width_bound: f64,
    /// 2a/√(2πt): the bound the reflection integral actually supports,
    /// i.e. separation/√(2πt).
    pub full_width_bound: f64,
    pub empirical_matches_exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeetingTailReport {
    pub cells: Vec<MeetingTailCell>,
    pub all_match_exact: bool,
    /// The half-width form fails where the exact tail exceeds it.
    pub half_width_violated: bool,
    /// The full-width (separation-based) form holds on every cell.
    pub full_width_holds: bool,
}

/// Empirical meeting-time tails over a grid of (signed distance, time)
/// cells, compared with the exact first-zero law and both candidate
/// linear-in-distance bounds.
pub fn meeting_tail_check(
    dim: u32,
    cells: &[(f64, f64)],
    dt: f64,
    n_paths: u64,
    seed: u64,
) -> Result<MeetingTailReport> {
    check_positive("dt", dt)?;
    if dim == 0 || dim as usize > 8 {
        return Err(Error::Domain {
            what: "dimension",
            detail: format!("{dim} not in 1..=8"),
        });
    }
    let spec = MeasureSpec::zero(dim)?;
    let d = dim as usize;
    let mut out = Vec::with_capacity(cells.len());
    for (k, &(a, t)) in cells.iter().enumerate() {
        check_positive("cell time", t)?;
        check_positive("cell distance", a)?;
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        x[0] = a;
        y[0] = -a;
        let (hits, n) = mc::par_fold(
            n_paths,
            4096,
            || (0u64, 0u64),
            |acc, i| {
                let mut rng = mc::rng_for(seed, 0xc0_21 + k as u64, i);
                let scan = scan_meeting(&x, &y, &spec, dt, t, false, &mut rng);
                acc.0 += u64::from(!scan.met);
                acc.1 += 1;
            },
            |p, q| {
                p.0 += q.0;
                p.1 += q.1;
            },
        );
        let empirical = McEstimate::from_bernoulli(hits, n);
        let exact = meeting_tail_exact(a, t)?;
        let root = (2.0 * std::f64::consts::PI * t).sqrt();
        let cell = MeetingTailCell {
            a,
            t,
            empirical,
            exact,
            half_width_bound: a / root,
            full_width_bound: 2.0 * a / root,
            empirical_matches_exact: (empirical.estimate - exact).abs()
                <= 3.0 * empirical.stderr.max(1e-9),
        };
        out.push(cell);
    }
    let all_match_exact = out.iter().all(|c| c.empirical_matches_exact);
    let half_width_violated = out.iter().any(|c| c.exact > c.half_width_bound + 1e-12);
    let full_width_holds = out.iter().all(|c| c.exact <= c.full_width_bound + 1e-12);
    Ok(MeetingTailReport {
        cells: out,
        all_match_exact,
        half_width_violated,
        full_width_holds,
    })
}

/// When to stop a couple besides the meeting itself: a fixed time, the exit
/// of Z from the ball B(x, radius) around its start, or whichever of the
/// two comes first.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum StopRule {
    FixedTime(f64),
    BallExit { radius: f64 },
    Earlier { t: f64, radius: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct StoppedDistanceReport {
    /// E[|Z − Z̃|^θ at ξ ∧ τ].
    pub mc: McEstimate,
    /// |x−y|^θ.
    pub bound: f64,
    pub theta: f64,
    /// mean − 3σ ≤ bound.
    pub one_sided_ok: bool,
    /// |mean − bound| in units of stderr (≈ 0 for θ = 1 by optional
    /// stopping).
    pub equality_gap_sigmas: f64,
}

/// θ-moment contraction of the coupled distance at ξ ∧ τ: the stopped
/// distance is a nonnegative martingale absorbed at zero, so its θ-moment
/// never exceeds |x−y|^θ, with equality at θ = 1.
#[allow(clippy::too_many_arguments)]
pub fn stopped_distance_check(
    dim: u32,
    separation: f64,
    theta: f64,
    stop: StopRule,
    dt: f64,
    t_max: f64,
    n_paths: u64,
    seed: u64,
) -> Result<StoppedDistanceReport> {
    check_positive("separation", separation)?;
    check_positive("dt", dt)?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain {
            what: "theta",
            detail: format!("{theta} outside (0, 1]"),
        });
    }
    if dim == 0 || dim as usize > 8 {
        return Err(Error::Domain {
            what: "dimension",
            detail: format!("{dim} not in 1..=8"),
        });
    }
    let d = dim as usize;
    let (t_stop, radius) = match stop {
        StopRule::FixedTime(t) => (t, f64::INFINITY),
        StopRule::BallExit { radius } => (t_max, radius),
        StopRule::Earlier { t, radius } => (t, radius),
    };
    check_positive("stop horizon", t_stop)?;
    let radius_positive = radius > 0.0;
    if !radius_positive {
        return Err(Error::Domain {
            what: "stop radius",
            detail: format!("{radius}"),
        });
    }
    let n_steps = (t_stop / dt).ceil() as usize;
    let sdt = dt.sqrt();
    let a0 = 0.5 * separation;

    let (m, trunc) = mc::par_estimate(n_paths, |i| {
        let mut rng = mc::rng_for(seed, 0xc0_31, i);
        // coordinates: Z starts at (a0, 0, …), hyperplane {z₁ = 0},
        // ball around the start of Z
        let mut z = [0.0f64; 8];
        z[0] = a0;
        let start = z;
        let mut s_prev = a0;
        let mut dist_prev = 0.0f64;
        for step in 0..n_steps {
            let mut d2 = 0.0;
            for (j, zj) in z.iter_mut().enumerate().take(d) {
                let g: f64 = rng.sample(StandardNormal);
                *zj += g * sdt;
                let c = *zj - start[j];
                d2 += c * c;
            }
            let s_next = z[0];
            let dist = d2.sqrt();
            let met = s_next <= 0.0
                || rng.gen::<f64>() < (-2.0 * s_prev * s_next / dt).exp();
            let exited = radius.is_finite()
                && (dist > radius
                    || rng.gen::<f64>()
                        < (-2.0 * (radius - dist_prev) * (radius - dist.min(radius)) / dt).exp());
            if met && exited {
                // both bridge events in one step: order by a fair coin
                if rng.gen::<f64>() < 0.5 {
                    return (0.0, false);
                }
                let s_mid = 0.5 * (s_prev + s_next.max(0.0));
                return ((2.0 * s_mid.abs()).powf(theta), false);
            }
            if met {
                return (0.0, false);
            }
            if exited {
                let s_mid = if dist > radius {
                    s_next
                } else {
                    0.5 * (s_prev + s_next)
                };
                return ((2.0 * s_mid.abs()).powf(theta), false);
            }
            let _ = step;
            s_prev = s_next;
            dist_prev = dist;
        }
        // fixed-time rules stop here by design; ball rules are truncated
        let truncated = radius.is_finite() && matches!(stop, StopRule::BallExit { .. });
        ((2.0 * s_prev).powf(theta), truncated)
    });
    let est = McEstimate::from_moments(&m, trunc);
    let bound = separation.powf(theta);
    let one_sided_ok = est.estimate - 3.0 * est.stderr <= bound;
    let equality_gap_sigmas = (est.estimate - bound).abs() / est.stderr.max(1e-300);
    Ok(StoppedDistanceReport {
        mc: est,
        bound,
        theta,
        one_sided_ok,
        equality_gap_sigmas,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitBeforeMeetingCell {
    pub separation: f64,
    pub radius: f64,
    pub prob: McEstimate,
    pub truncation_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExitBeforeMeetingReport {
    pub cells: Vec<ExitBeforeMeetingCell>,
    /// Least-squares slope of log P vs log separation.
    pub slope: mc::LineFit,
    /// 1 − χ − ε.
    pub bound_exponent: f64,
    /// slope ≥ bound_exponent − slack at 3σ.
    pub pass_slope: bool,
    /// C calibrated on the coarsest separation.
    pub fitted_c: f64,
    /// P ≤ C·separation^{1−χ−ε} + 3σ on all finer separations.
    pub bound_holds_fitted: bool,
    /// Enlarging the ball lowers the probability (3σ, middle separation).
    pub monotone_in_radius: Option<bool>,
}

/// Decay of P(exit of Z from B(x, 2^{−n_scale} R h^χ) before the meeting)
/// across separations h: the probability scales like h^{1−χ}, so its
/// log-log slope must clear 1 − χ − ε − slack, and the constant calibrated
/// at the coarsest h bounds every finer cell.
#[allow(clippy::too_many_arguments)]
pub fn exit_before_meeting_check(
    dim: u32,
    chi: f64,
    eps: f64,
    n_scale: f64,
    r_big: f64,
    separations: &[f64],
    slope_slack: f64,
    n_paths: u64,
    seed: u64,
) -> Result<ExitBeforeMeetingReport> {
    if !(chi > 0.0 && chi <= 1.0 && eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain {
            what: "exit-before-meeting exponents",
            detail: format!("need χ, ε ∈ (0,1]; got χ = {chi}, ε = {eps}"),
        });
    }
    if n_scale < 1.0 {
        return Err(Error::Domain {
            what: "dyadic scale",
            detail: format!("n = {n_scale} must be ≥ 1"),
        });
    }
    check_positive("radius scale", r_big)?;
    if dim == 0 || dim as usize > 8 {
        return Err(Error::Domain {
            what: "dimension",
            detail: format!("{dim} not in 1..=8"),
        });
    }
    if separations.len() < 2 {
        return Err(Error::Domain {
            what: "separation grid",
            detail: "need at least two separations".into(),
        });
    }
    let mut cells = Vec::with_capacity(separations.len());
    for (k, &h) in separations.iter().enumerate() {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::Domain {
                what: "separation",
                detail: format!("{h} outside (0, 1]"),
            });
        }
        let radius = 2f64.powf(-n_scale) * r_big * h.powf(chi);
        let (p, trunc) = exit_before_meeting_prob(dim, h, radius, n_paths, seed + k as u64)?;
        cells.push(ExitBeforeMeetingCell {
            separation: h,
            radius,
            prob: p,
            truncation_fraction: trunc,
        });
    }
    let usable: Vec<&ExitBeforeMeetingCell> = cells
        .iter()
        .filter(|c| c.prob.estimate > 0.0 && c.prob.estimate < 1.0)
        .collect();
    if usable.len() < 2 {
        return Err(Error::Domain {
            what: "exit-before-meeting grid",
            detail: "need two separations with nondegenerate probabilities".into(),
        });
    }
    let xs: Vec<f64> = usable.iter().map(|c| c.separation.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|c| c.prob.estimate.ln()).collect();
    let sg: Vec<f64> = usable
        .iter()
        .map(|c| (c.prob.stderr / c.prob.estimate).max(1e-6))
        .collect();
    let slope = mc::fit_line_known_sigma(&xs, &ys, &sg);
    let bound_exponent = 1.0 - chi - eps;
    let pass_slope = slope.slope + 3.0 * slope.slope_se >= bound_exponent - slope_slack;

    let coarsest = cells
        .iter()
        .max_by(|a, b| a.separation.partial_cmp(&b.separation).unwrap())
        .unwrap();
    let fitted_c = (coarsest.prob.estimate + 3.0 * coarsest.prob.stderr)
        / coarsest.separation.powf(bound_exponent);
    let bound_holds_fitted = cells.iter().all(|c| {
        c.prob.estimate <= fitted_c * c.separation.powf(bound_exponent) + 3.0 * c.prob.stderr
    });

    // qualitative monotonicity: a larger ball is harder to leave first
    let monotone_in_radius = if cells.len() >= 2 {
        let mid = &cells[cells.len() / 2];
        let (bigger, _) = exit_before_meeting_prob(
            dim,
            mid.separation,
            2.0 * mid.radius,
            n_paths,
            seed + 7777,
        )?;
        Some(
            bigger.estimate
                <= mid.prob.estimate + 3.0 * (bigger.stderr + mid.prob.stderr).max(1e-9),
        )
    } else {
        None
    };
    Ok(ExitBeforeMeetingReport {
        cells,
        slope,
        bound_exponent,
        pass_slope,
        fitted_c,
        bound_holds_fitted,
        monotone_in_radius,
    })
}

/// P(exit of Z from the start-centered ball of `radius` happens no later
/// than the meeting), with stepping fine enough to resolve both scales and
/// a horizon generous against the ball-exit time.
fn exit_before_meeting_prob(
    dim: u32,
    separation: f64,
    radius: f64,
    n_paths: u64,
    seed: u64,
) -> Result<(McEstimate, f64)> {
    let d = dim as usize;
    let a0 = 0.5 * separation;
    let dt = (separation * separation).min(radius * radius) / 32.0;
    let t_max = 20.0 * radius * radius;
    let n_steps = (t_max / dt).ceil() as usize;
    let sdt = dt.sqrt();
    let (hits, trunc, n) = mc::par_fold(
        n_paths,
        2048,
        || (0u64, 0u64, 0u64),
        |acc, i| {
            let mut rng = mc::rng_for(seed, 0xc0_41, i);
            let mut z = [0.0f64; 8];
            z[0] = a0;
            let start = z;
            let mut s_prev = a0;
            let mut dist_prev = 0.0f64;
            let mut outcome = None;
            for _ in 0..n_steps {
                let mut d2 = 0.0;
                for (j, zj) in z.iter_mut().enumerate().take(d) {
                    let g: f64 = rng.sample(StandardNormal);
                    *zj += g * sdt;
                    let c = *zj - start[j];
                    d2 += c * c;
                }
                let s_next = z[0];
                let dist = d2.sqrt();
                let exited = dist > radius
                    || rng.gen::<f64>()
                        < (-2.0 * (radius - dist_prev) * (radius - dist.min(radius)) / dt).exp();
                if exited {
                    // ties count for the event τ ≤ ξ
                    outcome = Some(true);
                    break;
                }
                let met = s_next <= 0.0
                    || rng.gen::<f64>() < (-2.0 * s_prev * s_next / dt).exp();
                if met {
                    outcome = Some(false);
                    break;
                }
                s_prev = s_next;
                dist_prev = dist;
            }
            match outcome {
                Some(true) => acc.0 += 1,
                Some(false) => {}
                None => acc.1 += 1,
            }
            acc.2 += 1;
        },
        |a, b| {
            a.0 += b.0;
            a.1 += b.1;
            a.2 += b.2;
        },
    );
    Ok((
        McEstimate::from_bernoulli(hits, n),
        trunc as f64 / n as f64,
    ))
}
