//! Experiment configuration: one JSON file, overridable by flags.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use smoothlab_core::fluxcalc::{catalog_flux, parse_flux, FluxExpr};
use smoothlab_core::nonlinearity::NonlinIndex;
use smoothlab_core::profile::InitialProfile;
use smoothlab_core::sobolev::Regularity;
use smoothlab_core::wave::ErrorNorm;

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    AnalyzeFlux,
    FitAlpha,
    Profile,
    WkbSweep,
    Cancellation,
    SobolevScaling,
    SmoothingBound,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::AnalyzeFlux,
        Kind::FitAlpha,
        Kind::Profile,
        Kind::WkbSweep,
        Kind::Cancellation,
        Kind::SobolevScaling,
        Kind::SmoothingBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::AnalyzeFlux => "analyze-flux",
            Kind::FitAlpha => "fit-alpha",
            Kind::Profile => "profile",
            Kind::WkbSweep => "wkb-sweep",
            Kind::Cancellation => "cancellation",
            Kind::SobolevScaling => "sobolev-scaling",
            Kind::SmoothingBound => "smoothing-bound",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (expected json, csv or svg)")),
        }
    }
}

/// Limit profile flux `b U^{q+1}` used instead of `ψ_ε` by the profile experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitFlux {
    pub b: f64,
    pub q: u32,
}

/// Every field except `kind` has a default, so a config file may be as short as `{"kind": "catalog"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Catalog key (`trig2d`, `power-chain-3`, …) or a component list `[u^2/2, u^3/3]`.
    #[serde(default = "default_flux")]
    pub flux: String,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default)]
    pub ubar: f64,
    /// Wave direction; `None` means the first coordinate axis.
    #[serde(default)]
    pub v: Option<Vec<f64>>,
    #[serde(default = "two")]
    pub gamma: f64,
    /// Semi-norm orders; the smoothing-bound experiment derives its own from `α_sup`.
    #[serde(default = "default_s")]
    pub s: Vec<f64>,
    #[serde(default = "one")]
    pub p: f64,
    /// Strictly decreasing ε-list in `(0, 1]`.
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    /// Evaluation time as a fraction of the uniform pre-shock time `T₀`.
    #[serde(default)]
    pub t_fraction: Option<f64>,
    /// Absolute evaluation time; wins over `t_fraction`.
    #[serde(default)]
    pub t_eval: Option<f64>,
    #[serde(default = "one")]
    pub half_width: f64,
    /// Profile grid size.
    #[serde(default = "default_cells")]
    pub cells: usize,
    /// `δ` grid of the α fit; `None` uses the geometric default on `[1e-4, 1e-1]`.
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
    #[serde(default = "default_norm")]
    pub norm: ErrorNorm,
    #[serde(default = "InitialProfile::sine")]
    pub initial: InitialProfile,
    #[serde(default)]
    pub regularity: Regularity,
    #[serde(default)]
    pub profile_flux: Option<LimitFlux>,
    /// Length of the negative-time extension; `None` means `0.1 T*`.
    #[serde(default)]
    pub negative_time: Option<f64>,
    /// Output times of the profile experiment as fractions of `T*`.
    #[serde(default = "default_profile_times")]
    pub profile_times: Vec<f64>,
    /// Sobolev scaling over a space-time box centred at `t = 0` instead of a line.
    #[serde(default)]
    pub spacetime: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_flux() -> String {
    "power-chain-2".into()
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn default_s() -> Vec<f64> {
    vec![0.5]
}
fn default_eps() -> Vec<f64> {
    (3..=9).map(|k| 2f64.powi(-k)).collect()
}
fn default_cells() -> usize {
    4096
}
fn default_norm() -> ErrorNorm {
    ErrorNorm::C1
}
fn default_profile_times() -> Vec<f64> {
    vec![0.5, 0.9, 1.5, 3.0]
}
fn default_seed() -> u64 {
    0x5EED_2024
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl ExperimentConfig {
    /// Defaults for `kind`, tuned so every kind runs its reference experiment.
    pub fn defaults(kind: Kind) -> Self {
        let mut c: Self = serde_json::from_value(serde_json::json!({ "kind": kind })).expect("defaults deserialize");
        match kind {
            Kind::AnalyzeFlux => c.flux = "trig2d".into(),
            Kind::Profile => c.profile_flux = Some(LimitFlux { b: 0.5, q: 1 }),
            Kind::WkbSweep => c.v = Some(vec![0.0, 1.0]),
            Kind::Cancellation => c.eps = (3..=8).map(|k| 2f64.powi(-k)).collect(),
            _ => {}
        }
        c
    }

    /// Merge a JSON document over the defaults of its kind.
    pub fn from_json(text: &str, kind: Option<Kind>) -> Result<Self, LabError> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| LabError::Config { field: "<file>".into(), msg: e.to_string() })?;
        let Value::Object(obj) = doc else {
            return Err(LabError::Config { field: "<file>".into(), msg: "expected a JSON object".into() });
        };
        let file_kind = match obj.get("kind") {
            Some(k) => Some(
                serde_json::from_value::<Kind>(k.clone())
                    .map_err(|e| LabError::Config { field: "kind".into(), msg: e.to_string() })?,
            ),
            None => None,
        };
        let kind = match (kind, file_kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(LabError::Config {
                    field: "kind".into(),
                    msg: format!("file says `{b}`, command says `{a}`"),
                })
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => return Err(LabError::Config { field: "kind".into(), msg: "missing".into() }),
        };
        let mut base = match serde_json::to_value(Self::defaults(kind)).expect("config serializes") {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        for (k, v) in obj {
            base.insert(k, v);
        }
        Self::from_map(base)
    }

    fn from_map(map: Map<String, Value>) -> Result<Self, LabError> {
        serde_json::from_value(Value::Object(map)).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
                .unwrap_or("<file>")
                .to_string();
            LabError::Config { field, msg }
        })
    }

    /// Apply `key=value` overrides; values parse as JSON, falling back to a plain string.
    pub fn with_params(self, params: &[String]) -> Result<Self, LabError> {
        if params.is_empty() {
            return Ok(self);
        }
        let mut map = match serde_json::to_value(&self).expect("config serializes") {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        for p in params {
            let (k, v) = p.split_once('=').ok_or_else(|| LabError::Usage(format!("--param `{p}` is not key=value")))?;
            let k = k.trim().replace('-', "_");
            if !map.contains_key(&k) {
                return Err(LabError::Config { field: k, msg: "unknown field".into() });
            }
            let value = serde_json::from_str(v.trim()).unwrap_or_else(|_| Value::String(v.trim().to_string()));
            map.insert(k, value);
        }
        Self::from_map(map)
    }

    /// Field-level range checks; the target operations repeat their own.
    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |field: &str, msg: String| Err(LabError::Config { field: field.into(), msg });
        if !(self.m > 0.0 && self.m.is_finite()) {
            return bad("m", format!("must be positive, got {}", self.m));
        }
        if !(self.ubar.abs() <= self.m) {
            return bad("ubar", format!("|ū| = {} exceeds M = {}", self.ubar.abs(), self.m));
        }
        if let Some(v) = &self.v {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) || v.iter().all(|&x| x == 0.0) {
                return bad("v", "must be finite and nonzero".into());
            }
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return bad("gamma", format!("must exceed 1, got {}", self.gamma));
        }
        if self.s.is_empty() || self.s.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
            return bad("s", "every s must lie in (0, 1)".into());
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return bad("p", format!("must be at least 1, got {}", self.p));
        }
        if self.eps.is_empty() || self.eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return bad("eps", "every ε must lie in (0, 1]".into());
        }
        if self.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("eps", "must be strictly decreasing".into());
        }
        if let Some(f) = self.t_fraction {
            if !(f > 0.0 && f < 1.0) {
                return bad("t_fraction", format!("must lie in (0, 1), got {f}"));
            }
        }
        if let Some(t) = self.t_eval {
            if !(t > 0.0 && t.is_finite()) {
                return bad("t_eval", format!("must be positive, got {t}"));
            }
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return bad("half_width", format!("must be positive, got {}", self.half_width));
        }
        if self.cells < 16 {
            return bad("cells", format!("need at least 16, got {}", self.cells));
        }
        if let Some(d) = &self.deltas {
            if d.len() < 5 || d.iter().any(|&x| !(x > 0.0)) {
                return bad("deltas", "need at least 5 positive values".into());
            }
        }
        if let Err(e) = self.initial.validate() {
            return bad("initial", e.to_string());
        }
        if let Some(l) = self.profile_flux {
            if !(l.b.is_finite() && l.b != 0.0) || l.q == 0 {
                return bad("profile_flux", "needs b ≠ 0 and q ≥ 1".into());
            }
        }
        if let Some(d) = self.negative_time {
            if !(d >= 0.0 && d.is_finite()) {
                return bad("negative_time", format!("must be non-negative, got {d}"));
            }
        }
        if self.profile_times.is_empty() || self.profile_times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return bad("profile_times", "need positive fractions of T*".into());
        }
        if self.threads == Some(0) {
            return bad("threads", "must be positive".into());
        }
        if self.formats.is_empty() {
            return bad("formats", "need at least one of json, csv, svg".into());
        }
        self.resolve_flux()?;
        Ok(())
    }

    /// The flux and, for catalog keys, its expected index.
    pub fn resolve_flux(&self) -> Result<(FluxExpr, Option<NonlinIndex>), LabError> {
        let spec = self.flux.trim();
        if spec.starts_with('[') {
            let f = parse_flux(spec).map_err(|e| LabError::Config { field: "flux".into(), msg: e.to_string() })?;
            return Ok((f, None));
        }
        let e = catalog_flux(spec).map_err(|e| LabError::Config { field: "flux".into(), msg: e.to_string() })?;
        Ok((e.flux, Some(e.expected_index)))
    }

    /// `v`, defaulting to the first axis of the flux dimension.
    pub fn direction(&self, d: usize) -> Vec<f64> {
        self.v.clone().unwrap_or_else(|| {
            let mut v = vec![0.0; d];
            v[0] = 1.0;
            v
        })
    }

    /// Canonical JSON: struct field order and fixed float formatting, without output-only fields.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        c.formats.clear();
        c.threads = None;
        serde_json::to_string(&c).expect("config serializes")
    }
}
