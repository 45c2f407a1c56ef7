//! Run configuration: CLI flags, optional TOML file, and validation.
//!
//! Precedence is CLI over file over built-in experiment defaults.  The seed
//! is always explicit — there is no wall-clock fallback, so every run is
//! reproducible by construction.  Validation collects *all* violations
//! before reporting, so a bad config is fixed in one round trip.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use tcbm::measures::MeasureSpec;

use crate::registry;

/// How hard each experiment works.  `smoke` targets seconds per experiment,
/// `full` runs the acceptance-grade sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Smoke,
    Full,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Smoke => "smoke",
            Profile::Full => "full",
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smoke" => Ok(Profile::Smoke),
            "full" => Ok(Profile::Full),
            other => Err(format!("unknown profile `{other}` (expected smoke|full)")),
        }
    }
}

/// Optional parameter overrides.  Each experiment documents which of these
/// it honours; the rest are ignored by design so one override set can drive
/// `verify-all`.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Base Monte Carlo path count (scales every sampling experiment).
    pub paths: Option<u64>,
    /// Base step width for the driving walks.
    pub dt: Option<f64>,
    /// Horizon for the driving walks.
    pub t_max: Option<f64>,
    /// Ambient dimension for single-experiment runs that accept it.
    pub d: Option<u32>,
    /// Resolvent parameter α.
    pub alpha: Option<f64>,
    /// Hölder slack ε.
    pub eps: Option<f64>,
    /// Ball-mass exponent κ.
    pub kappa: Option<f64>,
    /// Table depth for the `indices` experiment.
    pub n: Option<u32>,
    /// Measure family selector, e.g. `lebesgue`, `constant:c=2`,
    /// `radial-power:beta=1.5,c=1`, `shell:rho=0.5,eps=0.02`,
    /// `point-mass:eps=0.01`.
    pub measure: Option<String>,
}

impl Overrides {
    /// File values fill any hole the CLI left open.
    pub fn or(self, file: Overrides) -> Overrides {
        Overrides {
            paths: self.paths.or(file.paths),
            dt: self.dt.or(file.dt),
            t_max: self.t_max.or(file.t_max),
            d: self.d.or(file.d),
            alpha: self.alpha.or(file.alpha),
            eps: self.eps.or(file.eps),
            kappa: self.kappa.or(file.kappa),
            n: self.n.or(file.n),
            measure: self.measure.or(file.measure),
        }
    }
}

/// On-disk TOML schema: top-level run fields plus an `[overrides]` table.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<String>,
    pub seed: Option<u64>,
    pub profile: Option<Profile>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub overrides: Overrides,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text)
            .map_err(|e| anyhow::anyhow!("cannot parse config {}: {e}", path.display()))
    }
}

/// A fully resolved run: what to execute, with which seed, profile, output
/// directory, and overrides.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub experiment: String,
    pub seed: u64,
    pub profile: Profile,
    /// Delivery location only — never serialized, so the report stays
    /// byte-identical no matter where it is written.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub overrides: Overrides,
}

/// Merge CLI-provided values with an optional file config and validate.
/// Returns every violation, not just the first.
pub fn resolve(
    experiment: Option<String>,
    seed: Option<u64>,
    profile: Option<Profile>,
    out: Option<PathBuf>,
    cli_overrides: Overrides,
    file: Option<FileConfig>,
) -> Result<RunConfig, Vec<String>> {
    let file = file.unwrap_or_default();
    let resolved = RunConfig {
        experiment: experiment
            .or(file.experiment)
            .unwrap_or_else(|| "unset".into()),
        seed: seed.or(file.seed).unwrap_or(u64::MAX),
        profile: profile.or(file.profile).unwrap_or(Profile::Smoke),
        out: out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        overrides: cli_overrides.or(file.overrides),
    };

    let mut violations = Vec::new();
    if resolved.experiment == "unset" {
        violations.push(
            "experiment: required (positional argument or `experiment` in the config file)"
                .to_string(),
        );
    } else if resolved.experiment != "verify-all" && registry::find(&resolved.experiment).is_none()
    {
        let mut msg = format!(
            "experiment: unknown `{}`; valid names are verify-all",
            resolved.experiment
        );
        for name in registry::experiment_names() {
            let _ = write!(msg, ", {name}");
        }
        violations.push(msg);
    }
    if seed.is_none() && file.seed.is_none() {
        violations.push(
            "seed: required (--seed or `seed` in the config file); runs never seed from the clock"
                .to_string(),
        );
    }
    violations.extend(validate_overrides(&resolved.overrides));
    if violations.is_empty() {
        Ok(resolved)
    } else {
        Err(violations)
    }
}

fn validate_overrides(ov: &Overrides) -> Vec<String> {
    let mut v = Vec::new();
    if let Some(p) = ov.paths {
        if p == 0 {
            v.push("paths: must be ≥ 1".to_string());
        }
    }
    if let Some(dt) = ov.dt {
        if !(dt > 0.0 && dt.is_finite()) {
            v.push(format!("dt: must be a positive finite real, got {dt}"));
        }
    }
    if let Some(t) = ov.t_max {
        if !(t > 0.0 && t.is_finite()) {
            v.push(format!("t_max: must be a positive finite real, got {t}"));
        }
    }
    if let Some(d) = ov.d {
        if !(1..=8).contains(&d) {
            v.push(format!("d: must lie in 1..=8, got {d}"));
        }
    }
    if let Some(a) = ov.alpha {
        if !(a > 0.0 && a.is_finite()) {
            v.push(format!("alpha: must be a positive finite real, got {a}"));
        }
    }
    if let Some(e) = ov.eps {
        if !(e > 0.0 && e < 1.0) {
            v.push(format!("eps: must lie in (0, 1), got {e}"));
        }
    }
    if let (Some(d), Some(k)) = (ov.d, ov.kappa) {
        if (1..=8).contains(&d) {
            let admissible = k > d as f64 - 2.0;
            if !admissible {
                v.push(format!("kappa: must exceed d − 2 = {}, got {k}", d as f64 - 2.0));
            }
        }
    }
    if let Some(k) = ov.kappa {
        if !k.is_finite() {
            v.push(format!("kappa: must be finite, got {k}"));
        }
    }
    if let Some(n) = ov.n {
        if n == 0 {
            v.push("n: must be ≥ 1".to_string());
        }
    }
    if let Some(m) = &ov.measure {
        // Without an explicit dimension the selector is valid if it parses
        // in any dimension an experiment would use it at.
        let dims: Vec<u32> = match ov.d {
            Some(d) if (1..=8).contains(&d) => vec![d],
            _ => vec![1, 2, 3],
        };
        let mut last_err = None;
        let ok = dims.iter().any(|&d| match parse_measure(m, d, 1e-3) {
            Ok(_) => true,
            Err(e) => {
                last_err = Some(e);
                false
            }
        });
        if !ok {
            if let Some(e) = last_err {
                v.push(format!("measure: {e}"));
            }
        }
    }
    v
}

/// Parse a measure selector of the form `family` or `family:key=val,key=val`.
///
/// Families: `lebesgue`, `constant:c=…`, `radial-power:beta=…,c=…`,
/// `shell:rho=…,eps=…`, `point-mass:eps=…` (d = 1 only).
pub fn parse_measure(s: &str, dim: u32, dt_ref: f64) -> anyhow::Result<MeasureSpec> {
    let (family, args) = match s.split_once(':') {
        Some((f, a)) => (f.trim(), a.trim()),
        None => (s.trim(), ""),
    };
    let mut kv = std::collections::BTreeMap::new();
    if !args.is_empty() {
        for piece in args.split(',') {
            let (k, val) = piece
                .split_once('=')
                .ok_or_else(|| anyhow::anyhow!("expected key=value, got `{piece}`"))?;
            let parsed: f64 = val
                .trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("`{}` is not a number in `{piece}`", val.trim()))?;
            kv.insert(k.trim().to_string(), parsed);
        }
    }
    let take = |kv: &mut std::collections::BTreeMap<String, f64>, key: &str, default: f64| {
        kv.remove(key).unwrap_or(default)
    };
    let spec = match family {
        "lebesgue" => MeasureSpec::lebesgue(dim)?,
        "constant" => {
            let c = take(&mut kv, "c", 1.0);
            MeasureSpec::constant(dim, c)?
        }
        "radial-power" => {
            let beta = take(&mut kv, "beta", 1.5);
            let c = take(&mut kv, "c", 1.0);
            MeasureSpec::radial_power(dim, c, beta, dt_ref)?
        }
        "shell" => {
            let rho = take(&mut kv, "rho", 0.5);
            let eps = take(&mut kv, "eps", 0.02);
            MeasureSpec::shell(dim, rho, eps)?
        }
        "point-mass" => {
            if dim != 1 {
                anyhow::bail!("point-mass is one-dimensional; got d = {dim}");
            }
            let eps = take(&mut kv, "eps", 0.01);
            MeasureSpec::point_mass_1d(eps)?
        }
        other => anyhow::bail!(
            "unknown family `{other}` (expected lebesgue|constant|radial-power|shell|point-mass)"
        ),
    };
    if let Some(stray) = kv.keys().next() {
        anyhow::bail!("unknown parameter `{stray}` for family `{family}`");
    }
    Ok(spec)
}
