//! Additive-functional clocks A_t = ∫₀ᵗ f(B_s) ds and their inversion.
//!
//! A `PcafTrace` holds the accumulated clock on the path's grid (trapezoid
//! rule, compensated summation).  `inverse_clock` is the right-continuous
//! inverse τ_s = inf{t : A_t > s} under linear interpolation, and
//! `time_changed_position` samples the time-changed process B∘τ.  The
//! `revuz_check` operation verifies the duality that pins the measure to
//! its clock: the α-weighted occupation integral of f against dA, averaged
//! over a Lebesgue-uniform start, equals the α-weighted occupation integral
//! of g against dt averaged over a μ-weighted start.

use crate::brownian::PathSample;
use crate::error::{check_finite_scalar, check_positive, Error, Result};
use crate::mc::{self, KahanSum, McEstimate};
use crate::measures::MeasureSpec;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct PcafTrace {
    pub dt: f64,
    /// A at grid times 0, dt, 2dt, …; nondecreasing with values[0] = 0.
    pub values: Vec<f64>,
}

impl PcafTrace {
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn horizon(&self) -> f64 {
        (self.values.len().saturating_sub(1)) as f64 * self.dt
    }

    /// Linear interpolation of A at time t (clamped to the grid range).
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let u = t / self.dt;
        let i = u.floor() as usize;
        if i + 1 >= self.values.len() {
            return self.total();
        }
        let frac = u - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

/// Outcome of a clock query: either a time on the grid or a horizon-exceeded
/// marker carrying the total mass accumulated before the path ran out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Clocked {
    At {
        time: f64,
        /// Grid index bounding the crossing from above.
        step: usize,
    },
    HorizonExceeded {
        total: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeChangedPoint {
    At { time: f64, position: Vec<f64> },
    HorizonExceeded { total: f64 },
}

/// Accumulate the clock of `spec` along a sampled path: trapezoid rule over
/// each step, compensated summation over steps.
pub fn accumulate(path: &PathSample, spec: &MeasureSpec) -> Result<PcafTrace> {
    if spec.dim != path.dim {
        return Err(Error::DimMismatch {
            expected: spec.dim as usize,
            got: path.dim as usize,
        });
    }
    let n = path.n_steps();
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    let mut acc = KahanSum::default();
    let mut f_prev = spec.density_at(path.pos(0));
    for i in 0..n {
        let f_next = spec.density_at(path.pos(i + 1));
        acc.add(0.5 * (f_prev + f_next) * path.dt);
        let v = acc.value();
        if !v.is_finite() {
            return Err(Error::NonFiniteSum { step: i + 1 });
        }
        values.push(v);
        f_prev = f_next;
    }
    Ok(PcafTrace {
        dt: path.dt,
        values,
    })
}

/// Right-continuous inverse τ_s = inf{t : A_t > s} of the linearly
/// interpolated trace.  Flat stretches at level s resolve to the *end* of
/// the stretch; queries at or beyond the final value report the horizon.
pub fn inverse_clock(trace: &PcafTrace, s: f64) -> Result<Clocked> {
    check_finite_scalar("clock query", s)?;
    if s < 0.0 {
        return Err(Error::Domain {
            what: "clock query",
            detail: format!("s = {s} must be nonnegative"),
        });
    }
    if s >= trace.total() {
        return Ok(Clocked::HorizonExceeded {
            total: trace.total(),
        });
    }
    // first index with A > s; values are nondecreasing
    let idx = trace.values.partition_point(|&v| v <= s);
    debug_assert!(idx > 0 && idx < trace.values.len());
    let v0 = trace.values[idx - 1];
    let v1 = trace.values[idx];
    let frac = (s - v0) / (v1 - v0);
    Ok(Clocked::At {
        time: ((idx - 1) as f64 + frac) * trace.dt,
        step: idx,
    })
}

/// Position of the time-changed process at clock value s, with the path
/// linearly interpolated between grid points.
pub fn time_changed_position(
    path: &PathSample,
    trace: &PcafTrace,
    s: f64,
) -> Result<TimeChangedPoint> {
    match inverse_clock(trace, s)? {
        Clocked::HorizonExceeded { total } => Ok(TimeChangedPoint::HorizonExceeded { total }),
        Clocked::At { time, step } => {
            let d = path.dim as usize;
            let i = step - 1;
            let frac = time / path.dt - i as f64;
            let a = path.pos(i);
            let b = path.pos(i.min(path.n_steps() - 1) + 1);
            let position = (0..d).map(|j| a[j] + frac * (b[j] - a[j])).collect();
            Ok(TimeChangedPoint::At { time, position })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RevuzReport {
    /// ∫ E_x[∫ e^{−αt} f(B_t) dA_t] g(x) dx over the box.
    pub lhs: McEstimate,
    /// ∫ E_x[∫ e^{−αt} g(B_t) dt] f(x) dμ(x) over the box.
    pub rhs: McEstimate,
    /// |lhs − rhs| ≤ 3 combined stderr.
    pub agree: bool,
    pub alpha: f64,
    pub t_max: f64,
}

/// Monte Carlo check of the duality pairing the clock with its measure.
/// Both sides sample the starting point uniformly from the box (weighted by
/// box volume, and on the right additionally by the measure's density) and
/// integrate along an independent driving path to horizon `t_max`; the
/// truncation bias is bounded by e^{−α t_max}·‖f‖‖g‖-scaled mass and should
/// be kept below the Monte Carlo resolution by choosing α·t_max ≳ 10.
#[allow(clippy::too_many_arguments)]
pub fn revuz_check<F, G>(
    spec: &MeasureSpec,
    f: F,
    g: G,
    alpha: f64,
    box_lo: &[f64],
    box_hi: &[f64],
    n_outer: u64,
    n_paths: u64,
    dt: f64,
    t_max: f64,
    seed: u64,
) -> Result<RevuzReport>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    check_positive("alpha", alpha)?;
    check_positive("dt", dt)?;
    check_positive("t_max", t_max)?;
    let d = spec.dim as usize;
    if box_lo.len() != d || box_hi.len() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: box_lo.len().min(box_hi.len()),
        });
    }
    let mut volume = 1.0;
    for j in 0..d {
        let proper = box_hi[j] > box_lo[j];
        if !proper {
            return Err(Error::Domain {
                what: "sampling box",
                detail: format!("empty extent in coordinate {j}"),
            });
        }
        volume *= box_hi[j] - box_lo[j];
    }
    let n_steps = (t_max / dt).ceil() as usize;
    let sdt = dt.sqrt();

    // shared path walk: returns (∫ e^{−αt} f dA, ∫ e^{−αt} g dt) from x
    let walk = |x0: &[f64], rng: &mut rand_chacha::ChaCha8Rng| -> (f64, f64) {
        let mut x = x0.to_vec();
        let mut left = KahanSum::default();
        let mut right = KahanSum::default();
        let mut fd_prev = f(&x) * spec.density_at(&x);
        let mut g_prev = g(&x);
        let mut w_prev = 1.0f64;
        for i in 0..n_steps {
            for xj in x.iter_mut() {
                let gauss: f64 = rng.sample(StandardNormal);
                *xj += gauss * sdt;
            }
            let w_next = (-alpha * (i + 1) as f64 * dt).exp();
            let fd_next = f(&x) * spec.density_at(&x);
            let g_next = g(&x);
            left.add(0.5 * (w_prev * fd_prev + w_next * fd_next) * dt);
            right.add(0.5 * (w_prev * g_prev + w_next * g_next) * dt);
            fd_prev = fd_next;
            g_prev = g_next;
            w_prev = w_next;
        }
        (left.value(), right.value())
    };

    let sample_x = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..d)
            .map(|j| box_lo[j] + (box_hi[j] - box_lo[j]) * rng.gen::<f64>())
            .collect()
    };

    let (lm, _) = mc::par_estimate(n_outer, |i| {
        let mut rng = mc::rng_for(seed, 0xaf_01, i);
        let x = sample_x(&mut rng);
        let mut acc = 0.0;
        for _ in 0..n_paths {
            acc += walk(&x, &mut rng).0;
        }
        (volume * g(&x) * acc / n_paths as f64, false)
    });
    let (rm, _) = mc::par_estimate(n_outer, |i| {
        let mut rng = mc::rng_for(seed, 0xaf_02, i);
        let x = sample_x(&mut rng);
        let weight = volume * f(&x) * spec.density_at(&x);
        let mut acc = 0.0;
        for _ in 0..n_paths {
            acc += walk(&x, &mut rng).1;
        }
        (weight * acc / n_paths as f64, false)
    });

    let lhs = McEstimate::from_moments(&lm, 0);
    let rhs = McEstimate::from_moments(&rm, 0);
    let combined = (lhs.stderr * lhs.stderr + rhs.stderr * rhs.stderr).sqrt();
    let agree = (lhs.estimate - rhs.estimate).abs() <= 3.0 * combined;
    Ok(RevuzReport {
        lhs,
        rhs,
        agree,
        alpha,
        t_max,
    })
}
