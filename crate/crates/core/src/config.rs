//! JSON run configuration. Frequencies are quoted as `f/2π` with the unit in
//! the key name (`..._over_2pi_MHz`, `..._over_2pi_GHz`), times and lifetimes
//! in µs (`..._us`); everything is converted to rad/µs on load.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dynamics::{BoundaryChecks, IntegratorConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{ghz, mhz, rate_from_lifetime, CavityParams, CrosstalkParams, DeviceParams, QutritRates};
use crate::hilbert::NetworkLayout;
use crate::protocol::{appendix_layout, AppendixParams, DispersiveModel, InitialCondition};

pub const PRESETS: [&str; 3] = ["coupled-cavities", "paper-sec4", "reduced-n2m2"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub layout: LayoutConfig,
    #[serde(default)]
    pub params: ParamsConfig,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Default for `--noise`.
    #[serde(default)]
    pub noise: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutConfig {
    pub n_cavities: usize,
    pub qutrits_per_cavity: Vec<usize>,
    pub fock_dim: usize,
    /// 1-based cavity pairs subject to crosstalk; nearest neighbours if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency: Option<Vec<(usize, usize)>>,
    /// Coupler qutrits between neighbouring cavities (appendix mode).
    #[serde(default)]
    pub couplers: bool,
}

/// Explicit values for one cavity, replacing those derived from the preset.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    pub g_over_2pi_MHz: f64,
    pub g_tilde_over_2pi_MHz: f64,
    pub g_r_over_2pi_MHz: f64,
    pub g_r_tilde_over_2pi_MHz: f64,
    pub omega_over_2pi_MHz: f64,
    pub omega_tilde_over_2pi_MHz: f64,
    pub delta_over_2pi_MHz: f64,
    pub delta_tilde_over_2pi_MHz: f64,
    pub delta_r_over_2pi_MHz: f64,
    pub kappa_inv_us: Option<f64>,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    /// Only `"transmon"` is defined.
    pub preset: String,
    pub g1_over_2pi_MHz: f64,
    /// Cavity photon lifetime; `null` for no decay.
    pub kappa_inv_us: Option<f64>,
    /// Per-cavity dispersive detunings; alternating 100, 80 MHz if absent.
    pub delta_over_2pi_MHz: Option<Vec<f64>>,
    pub omega_over_2pi_MHz: f64,
    /// Detuning of the unwanted transitions (Δ_r, Δ_p, and Δ̃ − Δ with opposite sign).
    pub unwanted_detuning_over_2pi_GHz: f64,
    /// Crosstalk coupling as a fraction of the largest g.
    pub crosstalk_fraction: f64,
    /// Keep g̃, g̃_r, Ω̃ and the crosstalk.
    pub unwanted_couplings: bool,
    pub gamma_eg_inv_us: Option<f64>,
    pub gamma_fe_inv_us: Option<f64>,
    pub gamma_fg_inv_us: Option<f64>,
    pub gamma_phi_e_inv_us: Option<f64>,
    pub gamma_phi_f_inv_us: Option<f64>,
    pub tau_d_us: f64,
    pub pulse_phase_rad: f64,
    pub omega_c_over_2pi_GHz: Option<Vec<f64>>,
    pub cavities: Option<Vec<CavityConfig>>,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            preset: "transmon".into(),
            g1_over_2pi_MHz: 14.15,
            kappa_inv_us: Some(10.0),
            delta_over_2pi_MHz: None,
            omega_over_2pi_MHz: 45.0,
            unwanted_detuning_over_2pi_GHz: 0.7,
            crosstalk_fraction: 0.01,
            unwanted_couplings: true,
            gamma_eg_inv_us: Some(60.0),
            gamma_fe_inv_us: Some(30.0),
            gamma_fg_inv_us: Some(150.0),
            gamma_phi_e_inv_us: Some(20.0),
            gamma_phi_f_inv_us: Some(20.0),
            tau_d_us: 0.0,
            pulse_phase_rad: PI / 2.0,
            omega_c_over_2pi_GHz: None,
            cavities: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `α|0…0⟩ + β|1…1⟩`.
    #[default]
    Main,
    /// Mixed cavity pattern, `α|0…01…1⟩ + β|1…10…0⟩`.
    Symmetric,
    /// Four-cavity preparation through coupler qutrits.
    Appendix,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Timing {
    /// Common dispersive window; unequal λ is an error.
    #[default]
    Common,
    /// Per-cavity windows ending together.
    Staggered,
    /// Staggered only when λ differs between cavities.
    Auto,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixConfig {
    pub mu_over_2pi_MHz: [f64; 6],
    pub pump_rabi_over_2pi_MHz: f64,
}

impl Default for AppendixConfig {
    fn default() -> Self {
        Self { mu_over_2pi_MHz: [10.0; 6], pump_rabi_over_2pi_MHz: 50.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default)]
    pub mode: Mode,
    /// `[re, im]`.
    #[serde(default = "half_amplitude")]
    pub alpha: [f64; 2],
    #[serde(default = "half_amplitude")]
    pub beta: [f64; 2],
    /// Photon pattern of the α branch, one digit per cavity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cavity_pattern: Option<String>,
    #[serde(default)]
    pub dispersive_model: DispersiveModel,
    #[serde(default)]
    pub timing: Timing,
    #[serde(default)]
    pub appendix: AppendixConfig,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Main,
            alpha: half_amplitude(),
            beta: half_amplitude(),
            cavity_pattern: None,
            dispersive_model: DispersiveModel::default(),
            timing: Timing::default(),
            appendix: AppendixConfig::default(),
        }
    }
}

fn half_amplitude() -> [f64; 2] {
    [std::f64::consts::FRAC_1_SQRT_2, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub dt_us: Option<f64>,
    pub frequency_step_factor: f64,
    pub norm_step_factor: f64,
    pub rate_step_factor: f64,
    pub vector_cap: usize,
    pub density_cap: usize,
    pub checks: BoundaryChecks,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            dt_us: d.dt,
            frequency_step_factor: d.max_step_frequency_factor,
            norm_step_factor: d.norm_step_factor,
            rate_step_factor: d.rate_step_factor,
            vector_cap: d.vector_cap,
            density_cap: d.density_cap,
            checks: d.checks,
        }
    }
}

impl SolverConfig {
    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            dt: self.dt_us,
            max_step_frequency_factor: self.frequency_step_factor,
            norm_step_factor: self.norm_step_factor,
            rate_step_factor: self.rate_step_factor,
            vector_cap: self.vector_cap,
            density_cap: self.density_cap,
            checks: self.checks,
            keep_snapshots: false,
            ..IntegratorConfig::default()
        }
    }
}

/// A sweep value: a number, or `"inf"` (stored as `null`, i.e. no decay, for
/// lifetime parameters).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Number(f64),
    Text(String),
}

impl SweepValue {
    pub fn as_f64(&self) -> Result<f64> {
        match self {
            Self::Number(x) => Ok(*x),
            Self::Text(s) if s == "inf" => Ok(f64::INFINITY),
            Self::Text(s) => Err(Error::Config(format!("sweep value '{s}' is not a number or \"inf\""))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Dotted path of a numeric key, e.g. `params.kappa_inv_us`.
    pub parameter: String,
    pub values: Vec<SweepValue>,
}

fn preset_value(name: &str) -> Result<Value> {
    let text = match name {
        "coupled-cavities" => include_str!("../presets/coupled-cavities.json"),
        "paper-sec4" => include_str!("../presets/paper-sec4.json"),
        "reduced-n2m2" => include_str!("../presets/reduced-n2m2.json"),
        other => {
            return Err(Error::Config(format!("unknown preset '{other}' (available: {})", PRESETS.join(", "))));
        }
    };
    serde_json::from_str(text).map_err(|e| Error::Config(format!("preset {name}: {e}")))
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

impl RunConfig {
    /// Parses JSON text. A top-level `"preset"` key names a built-in
    /// configuration that the remaining keys override.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        if let Some(name) = value.as_object_mut().and_then(|o| o.remove("preset")) {
            let name = name.as_str().ok_or_else(|| Error::Config("preset must be a string".into()))?.to_string();
            let mut base = preset_value(&name)?;
            merge(&mut base, value);
            value = base;
        }
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::from_value(preset_value(name)?)
    }

    /// Reads a file, or a built-in preset given as `preset:<name>`.
    pub fn load(path: &str) -> Result<Self> {
        if let Some(name) = path.strip_prefix("preset:") {
            return Self::preset(name);
        }
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: Path::new(path).to_path_buf(), source })?;
        Self::from_json(&text)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical JSON form, first 16 hex digits.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("configuration serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Copy with the key at `path` set to `value` (non-finite values become `null`).
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let mut root = self.to_value();
        let mut slot = &mut root;
        for key in path.split('.') {
            slot = slot
                .as_object_mut()
                .and_then(|o| o.get_mut(key))
                .ok_or_else(|| Error::Config(format!("sweep parameter '{path}' does not name a configuration key")))?;
        }
        if !(slot.is_number() || slot.is_null()) {
            return Err(Error::Config(format!("sweep parameter '{path}' is not numeric")));
        }
        *slot = serde_json::Number::from_f64(value).map_or(Value::Null, Value::Number);
        let mut out = Self::from_value(root)?;
        out.sweep = None;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.layout;
        if l.n_cavities == 0 {
            return Err(Error::Config("layout.n_cavities must be positive".into()));
        }
        if l.qutrits_per_cavity.len() != l.n_cavities {
            return Err(Error::Config(format!(
                "layout.qutrits_per_cavity has {} entries for {} cavities",
                l.qutrits_per_cavity.len(),
                l.n_cavities
            )));
        }
        if l.fock_dim < 2 {
            return Err(Error::Config("layout.fock_dim must be at least 2".into()));
        }
        if let Some(adj) = &l.adjacency {
            if adj.iter().any(|&(a, b)| a == 0 || b == 0 || a > l.n_cavities || b > l.n_cavities || a == b) {
                return Err(Error::Config("layout.adjacency pairs must be distinct 1-based cavity indices".into()));
            }
        }
        let p = &self.params;
        if p.preset != "transmon" {
            return Err(Error::Config(format!("params.preset '{}' is not defined (use \"transmon\")", p.preset)));
        }
        let lists = [("delta_over_2pi_MHz", p.delta_over_2pi_MHz.as_ref().map(Vec::len)), ("omega_c_over_2pi_GHz", p.omega_c_over_2pi_GHz.as_ref().map(Vec::len)), ("cavities", p.cavities.as_ref().map(Vec::len))];
        for (name, len) in lists {
            if len.is_some_and(|n| n != l.n_cavities) {
                return Err(Error::Config(format!("params.{name} must have one entry per cavity")));
            }
        }
        let lifetimes = [p.kappa_inv_us, p.gamma_eg_inv_us, p.gamma_fe_inv_us, p.gamma_fg_inv_us, p.gamma_phi_e_inv_us, p.gamma_phi_f_inv_us];
        if lifetimes.iter().flatten().any(|&t| !(t > 0.0)) {
            return Err(Error::Config("lifetimes must be positive (use null for none)".into()));
        }
        if !(p.tau_d_us >= 0.0) {
            return Err(Error::Config("params.tau_d_us must be non-negative".into()));
        }
        let pr = &self.protocol;
        match pr.mode {
            Mode::Appendix => {
                if !l.couplers || l.n_cavities != 4 || l.qutrits_per_cavity.iter().any(|&m| m != 0) {
                    return Err(Error::Config("appendix mode needs 4 cavities, no qutrit groups and couplers = true".into()));
                }
            }
            Mode::Main | Mode::Symmetric => {
                if l.couplers {
                    return Err(Error::Config("couplers are only used in appendix mode".into()));
                }
                if l.qutrits_per_cavity.contains(&0) {
                    return Err(Error::Config("every cavity needs at least one qutrit".into()));
                }
                self.initial_condition()?;
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::Config("sweep.values is empty".into()));
            }
            for v in &s.values {
                v.as_f64()?;
            }
        }
        Ok(())
    }

    pub fn initial_condition(&self) -> Result<InitialCondition> {
        let pr = &self.protocol;
        let alpha = Complex64::new(pr.alpha[0], pr.alpha[1]);
        let beta = Complex64::new(pr.beta[0], pr.beta[1]);
        let n = self.layout.n_cavities;
        let ic = match (pr.mode, &pr.cavity_pattern) {
            (Mode::Main, None) => InitialCondition::uniform(alpha, beta, n)?,
            (Mode::Main, Some(p)) if p.chars().all(|c| c == '0') => InitialCondition::with_pattern_str(alpha, beta, p)?,
            (Mode::Main, Some(_)) => return Err(Error::Config("main mode uses the all-zero cavity pattern".into())),
            (Mode::Symmetric, Some(p)) => InitialCondition::with_pattern_str(alpha, beta, p)?,
            (Mode::Symmetric, None) => return Err(Error::Config("symmetric mode needs protocol.cavity_pattern".into())),
            (Mode::Appendix, _) => return Err(Error::Config("appendix mode has no initial-condition amplitudes".into())),
        };
        if ic.pattern().len() != n {
            return Err(Error::Config(format!("cavity_pattern has {} digits for {n} cavities", ic.pattern().len())));
        }
        Ok(ic)
    }

    pub fn network_layout(&self) -> Result<NetworkLayout> {
        let l = &self.layout;
        if self.protocol.mode == Mode::Appendix {
            return appendix_layout(l.fock_dim);
        }
        let adjacency = match &l.adjacency {
            Some(pairs) => pairs.iter().map(|&(a, b)| (a - 1, b - 1)).collect(),
            None => (1..l.n_cavities).map(|k| (k - 1, k)).collect(),
        };
        NetworkLayout::new(&l.qutrits_per_cavity, l.fock_dim, 0, adjacency)
    }

    /// Total Hilbert-space dimension, computed without building the layout.
    pub fn total_dim(&self) -> Option<usize> {
        let l = &self.layout;
        let qutrits: usize = l.qutrits_per_cavity.iter().sum::<usize>() + if l.couplers { l.n_cavities.saturating_sub(1) } else { 0 };
        let mut d = l.fock_dim.checked_pow(u32::try_from(l.n_cavities).ok()?)?;
        d = d.checked_mul(3usize.checked_pow(u32::try_from(qutrits).ok()?)?)?;
        Some(d)
    }

    pub fn device_params(&self) -> Result<DeviceParams> {
        let p = &self.params;
        let n = self.layout.n_cavities;
        let kappa = rate_from_lifetime(p.kappa_inv_us);
        let mut dp = DeviceParams::transmon(n, mhz(p.g1_over_2pi_MHz), kappa);
        let off = ghz(p.unwanted_detuning_over_2pi_GHz);
        dp.delta_p = -off;
        for c in &mut dp.cavities {
            c.omega = mhz(p.omega_over_2pi_MHz);
            c.omega_tilde = std::f64::consts::SQRT_2 * c.omega;
            c.delta_r = -off;
        }
        if let Some(deltas) = &p.delta_over_2pi_MHz {
            let d1 = mhz(deltas[0]);
            for (c, &d) in dp.cavities.iter_mut().zip(deltas) {
                c.delta = mhz(d);
                c.g = mhz(p.g1_over_2pi_MHz) * (c.delta / d1).sqrt();
                c.g_tilde = c.g / std::f64::consts::SQRT_2;
                c.g_r = c.g_tilde;
                c.g_r_tilde = std::f64::consts::SQRT_2 * c.g_r;
            }
        }
        for c in &mut dp.cavities {
            c.delta_tilde = c.delta + off;
        }
        if let Some(list) = &p.cavities {
            dp.cavities = list
                .iter()
                .map(|c| CavityParams {
                    g: mhz(c.g_over_2pi_MHz),
                    g_tilde: mhz(c.g_tilde_over_2pi_MHz),
                    g_r: mhz(c.g_r_over_2pi_MHz),
                    g_r_tilde: mhz(c.g_r_tilde_over_2pi_MHz),
                    omega: mhz(c.omega_over_2pi_MHz),
                    omega_tilde: mhz(c.omega_tilde_over_2pi_MHz),
                    delta: mhz(c.delta_over_2pi_MHz),
                    delta_tilde: mhz(c.delta_tilde_over_2pi_MHz),
                    delta_r: mhz(c.delta_r_over_2pi_MHz),
                    kappa: rate_from_lifetime(c.kappa_inv_us),
                })
                .collect();
        }
        let g_max = dp.cavities.iter().map(|c| c.g).fold(0.0, f64::max);
        let layout_adjacency: Vec<(usize, usize)> = match &self.layout.adjacency {
            Some(pairs) => pairs.iter().map(|&(a, b)| (a.min(b) - 1, a.max(b) - 1)).collect(),
            None => (1..n).map(|k| (k - 1, k)).collect(),
        };
        dp.crosstalk = layout_adjacency
            .into_iter()
            .map(|(j, k)| CrosstalkParams {
                pair: (j, k),
                g: p.crosstalk_fraction * g_max,
                delta: dp.cavities[k].delta - dp.cavities[j].delta,
            })
            .collect();
        dp.rates = QutritRates {
            gamma_eg: rate_from_lifetime(p.gamma_eg_inv_us),
            gamma_fe: rate_from_lifetime(p.gamma_fe_inv_us),
            gamma_fg: rate_from_lifetime(p.gamma_fg_inv_us),
            gamma_phi_e: rate_from_lifetime(p.gamma_phi_e_inv_us),
            gamma_phi_f: rate_from_lifetime(p.gamma_phi_f_inv_us),
        };
        dp.tau_d = p.tau_d_us;
        dp.pulse_phase = p.pulse_phase_rad;
        dp.omega_c = p.omega_c_over_2pi_GHz.as_ref().map(|v| v.iter().map(|&x| ghz(x)).collect());
        if !p.unwanted_couplings {
            dp = dp.without_unwanted_couplings();
        }
        dp.validate()?;
        Ok(dp)
    }

    pub fn appendix_params(&self) -> AppendixParams {
        let a = &self.protocol.appendix;
        AppendixParams { mu: a.mu_over_2pi_MHz.map(mhz), pump_rabi: mhz(a.pump_rabi_over_2pi_MHz) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> &'static str {
        r#"{
            "layout": {"n_cavities": 2, "qutrits_per_cavity": [2, 2], "fock_dim": 2},
            "protocol": {"mode": "main"}
        }"#
    }

    #[test]
    fn minimal_config_uses_transmon_defaults() {
        let cfg = RunConfig::from_json(small()).unwrap();
        let p = cfg.device_params().unwrap();
        let reference = DeviceParams::transmon(2, mhz(14.15), 0.1);
        for (a, b) in p.cavities.iter().zip(&reference.cavities) {
            assert!((a.g - b.g).abs() < 1e-12 && (a.delta_tilde - b.delta_tilde).abs() < 1e-9 && (a.kappa - b.kappa).abs() < 1e-15);
        }
        assert_eq!(p.crosstalk.len(), 1);
        assert!((p.crosstalk[0].delta - reference.crosstalk[0].delta).abs() < 1e-9);
        assert_eq!(cfg.total_dim(), Some(324));
        assert_eq!(cfg.network_layout().unwrap().total_dim(), 324);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = small().replace("\"fock_dim\": 2", "\"fock_dim\": 2, \"fockdim\": 3");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config(_))));
        let text = small().replace("\"mode\": \"main\"", "\"mode\": \"main\", \"g1\": 3");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn zero_beta_is_a_config_error() {
        let text = small().replace("\"mode\": \"main\"", "\"mode\": \"main\", \"alpha\": [1, 0], \"beta\": [0, 0]");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, Error::Normalization(_)), "{err}");
    }

    #[test]
    fn presets_load_and_merge() {
        for name in PRESETS {
            RunConfig::preset(name).unwrap();
        }
        let cfg = RunConfig::from_json(r#"{"preset": "reduced-n2m2", "params": {"kappa_inv_us": 5.0}}"#).unwrap();
        assert_eq!(cfg.params.kappa_inv_us, Some(5.0));
        assert_eq!(cfg.layout.n_cavities, 2);
        let big = RunConfig::preset("paper-sec4").unwrap();
        assert_eq!(big.total_dim(), Some(16 * 3usize.pow(12)));
    }

    #[test]
    fn parameter_paths() {
        let cfg = RunConfig::from_json(small()).unwrap();
        let a = cfg.with_parameter("params.kappa_inv_us", 4.0).unwrap();
        assert_eq!(a.params.kappa_inv_us, Some(4.0));
        let b = cfg.with_parameter("params.kappa_inv_us", f64::INFINITY).unwrap();
        assert_eq!(b.params.kappa_inv_us, None);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash(), cfg.with_parameter("params.kappa_inv_us", 4.0).unwrap().hash());
        assert!(cfg.with_parameter("params.nope", 1.0).is_err());
        assert!(cfg.with_parameter("protocol.mode", 1.0).is_err());
    }
}
