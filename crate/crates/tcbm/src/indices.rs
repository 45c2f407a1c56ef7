//! The recursive exponent machinery behind the Hölder estimate.
//!
//! With γ = 2 − d + κ (κ > d − 2 so γ > 0), the sequence
//!     r_0 = 0,  r_n = γ (r_{n-1} + 1) = Σ_{l=1..n} γ^l
//! feeds the per-level exponents
//!     q_n(ε) = (r_n − ε r_{n-1}) / (r_n + 1) − ε,
//! the Hölder-conjugate pair a_n = (r_n+1)/r_n, b_n = r_n + 1, and the chain
//! step η_n = ((r_n+1) q_n + 1 + ε r_n) / (γ (r_n+1) + 1), which satisfies
//! γ η_n − ε = q_{n+1} exactly.  As n → ∞, q_n(ε) → (γ ∧ 1) − ε, the final
//! regularity exponent.  All identities here are exact arithmetic (up to
//! float rounding), verified against independent closed forms.

use crate::error::{Error, Result};
use serde::Serialize;

/// γ = 2 − d + κ; positive iff κ > d − 2.
pub fn gamma(dim: u32, kappa: f64) -> f64 {
    2.0 - dim as f64 + kappa
}

fn check_kappa(dim: u32, kappa: f64) -> Result<f64> {
    let g = gamma(dim, kappa);
    if !kappa.is_finite() || g <= 0.0 {
        return Err(Error::KappaTooSmall {
            kappa,
            floor: dim as f64 - 2.0,
            dim,
        });
    }
    Ok(g)
}

/// r_0..r_n by the recursion r_n = γ(r_{n-1} + 1).
pub fn r_seq(dim: u32, kappa: f64, n: u32) -> Result<Vec<f64>> {
    let g = check_kappa(dim, kappa)?;
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(0.0);
    for i in 1..=n {
        let prev = out[i as usize - 1];
        out.push(g * (prev + 1.0));
    }
    Ok(out)
}

/// Closed form r_n = Σ_{l=1..n} γ^l = γ(γ^n − 1)/(γ − 1), with the γ = 1
/// limit r_n = n.  Independent of the recursion; used to cross-check it.
pub fn r_closed(dim: u32, kappa: f64, n: u32) -> Result<f64> {
    let g = check_kappa(dim, kappa)?;
    if (g - 1.0).abs() < 1e-12 {
        return Ok(n as f64);
    }
    Ok(g * (g.powi(n as i32) - 1.0) / (g - 1.0))
}

/// Admissible ε window: ε must lie in (0, γ/(1+γ)) = (0, (2−d+κ)/(3−d+κ)).
pub fn eps_bound(dim: u32, kappa: f64) -> Result<f64> {
    let g = check_kappa(dim, kappa)?;
    Ok(g / (1.0 + g))
}

fn check_eps(dim: u32, kappa: f64, eps: f64) -> Result<()> {
    let bound = eps_bound(dim, kappa)?;
    if !(eps > 0.0 && eps < bound) {
        return Err(Error::EpsOutOfRange { eps, bound });
    }
    Ok(())
}

/// q_n(ε) = (r_n − ε r_{n-1})/(r_n + 1) − ε for n ≥ 1.
pub fn q_index(dim: u32, kappa: f64, eps: f64, n: u32) -> Result<f64> {
    check_eps(dim, kappa, eps)?;
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            detail: "q is defined for n >= 1".into(),
        });
    }
    let r = r_seq(dim, kappa, n)?;
    let rn = r[n as usize];
    let rp = r[n as usize - 1];
    Ok((rn - eps * rp) / (rn + 1.0) - eps)
}

/// Chain step η_n = ((r_n+1) q_n + 1 + ε r_n)/(γ(r_n+1) + 1); satisfies
/// γ η_n − ε = q_{n+1} and 0 < η_n ≤ r_{n+1}/r_{n+2} ≤ 1.
pub fn eta_next(dim: u32, kappa: f64, eps: f64, n: u32) -> Result<f64> {
    let g = check_kappa(dim, kappa)?;
    let q = q_index(dim, kappa, eps, n)?;
    let r = r_seq(dim, kappa, n)?;
    let rn = r[n as usize];
    let eta = ((rn + 1.0) * q + 1.0 + eps * rn) / (g * (rn + 1.0) + 1.0);
    debug_assert!(eta > 0.0 && eta <= 1.0 + 1e-12);
    Ok(eta)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LimitInfo {
    /// (γ ∧ 1) − ε: the exponent in the final Hölder statement.
    pub exponent: f64,
    /// lim r_n = γ/(1−γ) when γ < 1; `None` encodes divergence (γ ≥ 1).
    pub r_limit: Option<f64>,
}

/// Limiting exponent data.  ε may be 0 here (pure formula); the simulation
/// entry points validate ε against `eps_bound` themselves.
pub fn limit_exponent(dim: u32, kappa: f64, eps: f64) -> Result<LimitInfo> {
    let g = check_kappa(dim, kappa)?;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::EpsOutOfRange {
            eps,
            bound: eps_bound(dim, kappa)?,
        });
    }
    Ok(LimitInfo {
        exponent: g.min(1.0) - eps,
        r_limit: if g < 1.0 { Some(g / (1.0 - g)) } else { None },
    })
}

const MIN_DEPTH_SCAN_LIMIT: u32 = 10_000;

/// Smallest chain depth whose half-ε exponent essentially reaches the limit:
/// min { n ≥ 1 : q_n(ε/2) ≥ (γ∧1) − ε − ε/4 }.  The ε/4 slack keeps the
/// target attainable at γ = 1 exactly, where q_n(ε/2) increases to the limit
/// strictly from below; away from γ = 1 the inequality holds with margin
/// anyway.  Probe pairs for the Hölder experiments sit inside the ball of
/// radius 2^{-min_depth} R around the regularity center.
pub fn min_depth(dim: u32, kappa: f64, eps: f64) -> Result<u32> {
    check_eps(dim, kappa, eps)?;
    let target = limit_exponent(dim, kappa, eps)?.exponent - eps / 4.0;
    let g = gamma(dim, kappa);
    let mut r_prev = 0.0f64;
    let mut r_n;
    let half = eps / 2.0;
    for n in 1..=MIN_DEPTH_SCAN_LIMIT {
        r_n = g * (r_prev + 1.0);
        let q = (r_n - half * r_prev) / (r_n + 1.0) - half;
        if q >= target {
            return Ok(n);
        }
        r_prev = r_n;
    }
    Err(Error::ScanExhausted {
        limit: MIN_DEPTH_SCAN_LIMIT,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentRow {
    pub n: u32,
    pub r: f64,
    pub q: f64,
    /// Hölder conjugate a_n = (r_n + 1)/r_n.
    pub a: f64,
    /// b_n = r_n + 1; 1/a_n + 1/b_n = 1.
    pub b: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentTable {
    pub dim: u32,
    pub kappa: f64,
    pub eps: f64,
    pub limit: LimitInfo,
    pub min_depth: u32,
    pub rows: Vec<ExponentRow>,
}

pub fn exponent_table(dim: u32, kappa: f64, eps: f64, n_max: u32) -> Result<ExponentTable> {
    check_eps(dim, kappa, eps)?;
    let r = r_seq(dim, kappa, n_max + 1)?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let rn = r[n as usize];
        rows.push(ExponentRow {
            n,
            r: rn,
            q: q_index(dim, kappa, eps, n)?,
            a: (rn + 1.0) / rn,
            b: rn + 1.0,
            eta: eta_next(dim, kappa, eps, n)?,
        });
    }
    Ok(ExponentTable {
        dim,
        kappa,
        eps,
        limit: limit_exponent(dim, kappa, eps)?,
        min_depth: min_depth(dim, kappa, eps)?,
        rows,
    })
}
