//! Physical parameters of the two-mode trap and every composite quantity
//! derived from them.
//!
//! All frequencies and rates are stored in rad/s (or s^-1) after loading.
//! The frequency convention flag only affects how oscillation frequencies
//! (`omega_x`, `omega_y`, `omega_r`, `Delta_detuning`) are read from a
//! config document; damping, gain, diffusion and backaction rates are
//! always taken as given, in s^-1.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};

/// How oscillation frequencies in a config document are interpreted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    /// Numbers are already angular frequencies (rad/s).
    Angular,
    /// Numbers are ordinary frequencies (Hz) and get multiplied by 2π.
    #[default]
    Ordinary,
}

/// Which quantity sets the nonlinear part of Γ_j inside the phonon
/// rate equations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhononDamping {
    /// Γ_j = 2(γ_g + 24 γ_c N_j) with the mean occupation N_j.
    #[default]
    Occupation,
    /// Γ_j = 2(γ_g + 24 γ_c |a_j|²) with the mean-field amplitude, exactly as
    /// in the amplitude equations.
    Amplitude,
}

/// User-facing physical parameters. Field names in the config document are
/// given by the serde renames.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub omega_x: f64,
    pub omega_y: f64,
    pub gamma_gx: f64,
    pub gamma_gy: f64,
    pub gamma_ay: f64,
    pub gamma_cx: f64,
    pub gamma_cy: f64,
    #[serde(rename = "Gamma_cx")]
    pub backaction_cx: f64,
    #[serde(rename = "Gamma_cy")]
    pub backaction_cy: f64,
    #[serde(rename = "D_tx")]
    pub diffusion_tx: f64,
    #[serde(rename = "D_ty")]
    pub diffusion_ty: f64,
    pub delta: f64,
    pub omega_r: f64,
    #[serde(rename = "Delta_detuning", default, skip_serializing_if = "Option::is_none")]
    pub detuning: Option<f64>,
    pub temperature: f64,
    pub diameter: f64,
    pub density: f64,
    pub eta: f64,
    pub phi: f64,
    #[serde(rename = "Q0")]
    pub q0: f64,
    #[serde(rename = "N0")]
    pub n0: f64,
    #[serde(default)]
    pub frequency_unit_convention: FrequencyConvention,

    /// Initial rotating-frame amplitudes; defaults to an x-seeded state.
    #[serde(default = "one")]
    pub ax0_re: f64,
    #[serde(default)]
    pub ax0_im: f64,
    #[serde(default)]
    pub ay0_re: f64,
    #[serde(default)]
    pub ay0_im: f64,

    #[serde(default)]
    pub phonon_damping: PhononDamping,

    /// Mean occupations used by the sensing stack. When absent, the sensing
    /// entry points fall back to the uncoupled phonon steady state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_phonons_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_phonons_y: Option<f64>,

    /// Treat both modes as identical for the force budget: the y mode uses
    /// the x-mode T, γ_g, γ_c, Γ_c and D_t (its own ω_y is kept).
    #[serde(default)]
    pub modes_symmetric: bool,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Interpretive choices made when transcribing a preset, keyed by field.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub assumed: BTreeMap<String, String>,
}

fn one() -> f64 {
    1.0
}

/// Keys that every config document must carry.
pub const REQUIRED_KEYS: [&str; 20] = [
    "omega_x", "omega_y", "gamma_gx", "gamma_gy", "gamma_ay", "gamma_cx", "gamma_cy",
    "Gamma_cx", "Gamma_cy", "D_tx", "D_ty", "delta", "omega_r", "temperature", "diameter",
    "density", "eta", "phi", "Q0", "N0",
];

impl SystemConfig {
    /// Parses and validates a JSON config document, applying the frequency
    /// convention.
    pub fn from_json_str(source: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Parse("config document must be a JSON object".into()))?;
        if let Some(missing) = REQUIRED_KEYS.iter().find(|k| !map.contains_key(**k)) {
            return Err(Error::MissingKey(missing.to_string()));
        }
        let mut cfg: SystemConfig =
            serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        if cfg.frequency_unit_convention == FrequencyConvention::Ordinary {
            cfg.omega_x *= TAU;
            cfg.omega_y *= TAU;
            cfg.omega_r *= TAU;
            cfg.detuning = cfg.detuning.map(|d| d * TAU);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every range invariant, naming the first offending field.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_x", self.omega_x),
            ("omega_y", self.omega_y),
            ("gamma_gx", self.gamma_gx),
            ("gamma_gy", self.gamma_gy),
            ("gamma_ay", self.gamma_ay),
            ("gamma_cx", self.gamma_cx),
            ("gamma_cy", self.gamma_cy),
            ("Gamma_cx", self.backaction_cx),
            ("Gamma_cy", self.backaction_cy),
            ("D_tx", self.diffusion_tx),
            ("D_ty", self.diffusion_ty),
            ("delta", self.delta),
            ("omega_r", self.omega_r),
            ("Delta_detuning", self.detuning.unwrap_or(0.0)),
            ("temperature", self.temperature),
            ("diameter", self.diameter),
            ("density", self.density),
            ("eta", self.eta),
            ("phi", self.phi),
            ("Q0", self.q0),
            ("N0", self.n0),
            ("ax0_re", self.ax0_re),
            ("ax0_im", self.ax0_im),
            ("ay0_re", self.ay0_re),
            ("ay0_im", self.ay0_im),
            ("mean_phonons_x", self.mean_phonons_x.unwrap_or(0.0)),
            ("mean_phonons_y", self.mean_phonons_y.unwrap_or(0.0)),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::out_of_range(name, "must be finite"));
            }
        }
        for (name, v) in [
            ("omega_x", self.omega_x),
            ("omega_y", self.omega_y),
            ("diameter", self.diameter),
            ("density", self.density),
            ("eta", self.eta),
            ("phi", self.phi),
        ] {
            if v <= 0.0 {
                return Err(Error::out_of_range(name, format!("must be > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("gamma_gx", self.gamma_gx),
            ("gamma_gy", self.gamma_gy),
            ("gamma_ay", self.gamma_ay),
            ("gamma_cx", self.gamma_cx),
            ("gamma_cy", self.gamma_cy),
            ("Gamma_cx", self.backaction_cx),
            ("Gamma_cy", self.backaction_cy),
            ("D_tx", self.diffusion_tx),
            ("D_ty", self.diffusion_ty),
            ("omega_r", self.omega_r),
            ("temperature", self.temperature),
            ("N0", self.n0),
            ("mean_phonons_x", self.mean_phonons_x.unwrap_or(0.0)),
            ("mean_phonons_y", self.mean_phonons_y.unwrap_or(0.0)),
        ] {
            if v < 0.0 {
                return Err(Error::out_of_range(name, format!("must be >= 0, got {v}")));
            }
        }
        if !(0.0..=0.1).contains(&self.delta) {
            return Err(Error::out_of_range(
                "delta",
                format!("must lie in [0, 0.1], got {}", self.delta),
            ));
        }
        Ok(())
    }

    /// Document form of this config with frequencies written in rad/s, so
    /// that reloading it reproduces `self` bit for bit.
    pub fn to_document(&self) -> serde_json::Value {
        let mut snapshot = self.clone();
        snapshot.frequency_unit_convention = FrequencyConvention::Angular;
        serde_json::to_value(snapshot).expect("config serializes")
    }

    pub fn initial_amplitudes(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.ax0_re, self.ax0_im),
            Complex64::new(self.ay0_re, self.ay0_im),
        )
    }

    /// Copy with the coupling angle replaced.
    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..self.clone() }
    }
}

/// Reads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<SystemConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SystemConfig::from_json_str(&text)
}

/// Mass of a homogeneous sphere, ρ·π·D³/6.
pub fn mass_from_geometry(diameter: f64, density: f64) -> Result<f64> {
    if !(diameter > 0.0) {
        return Err(Error::out_of_range("diameter", format!("must be > 0, got {diameter}")));
    }
    if !(density > 0.0) {
        return Err(Error::out_of_range("density", format!("must be > 0, got {density}")));
    }
    Ok(density * PI * diameter.powi(3) / 6.0)
}

/// Composite quantities shared by every solver. Computed once per config.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Particle mass, kg.
    pub mass: f64,
    /// Carrier frequency √(ω_x² + ω_y²)/2, rad/s.
    pub omega_0: f64,
    /// (ω_y² − ω_x²)/(2ω_0), rad/s.
    pub omega_1: f64,
    /// δ·ω_1, rad/s.
    pub omega_3: f64,
    pub beta_x: f64,
    pub beta_y: f64,
    /// √(β_x β_y).
    pub beta: f64,
    /// Trap stiffness asymmetry m(ω_y² − ω_x²)/2, N/m.
    pub kappa: f64,
    /// Detuning ω_1 − ω_r unless overridden, rad/s.
    pub detuning: f64,
    /// Balanced-gain indicator Γ = γ_gx + γ_gy − γ_ay, s^-1.
    pub gamma_bal: f64,
    /// Oscillator lengths √(ħ/2mω_j), m.
    pub l_x: f64,
    pub l_y: f64,
    /// Shot-noise force scale m² l_j² ω_j⁴/(η²φ), N²/Hz.
    pub s_s0_x: f64,
    pub s_s0_y: f64,
}

impl DerivedParams {
    /// Linear-regime effective damping pair (Γ_x, Γ_y) = (2γ_gx, 2(γ_gy − γ_ay)).
    pub fn linear_damping(config: &SystemConfig) -> (f64, f64) {
        (
            2.0 * config.gamma_gx,
            2.0 * (config.gamma_gy - config.gamma_ay),
        )
    }

    /// Coefficient κδ/(m√(ω_x ω_y)) of the carrier-frame coupling force.
    pub fn langevin_coupling(&self, config: &SystemConfig) -> f64 {
        self.kappa * config.delta / (self.mass * (config.omega_x * config.omega_y).sqrt())
    }
}

/// Evaluates every derived symbol for `config`.
pub fn derive_parameters(config: &SystemConfig) -> Result<DerivedParams> {
    let (wx, wy) = (config.omega_x, config.omega_y);
    if wx == wy && config.delta != 0.0 {
        return Err(Error::DegenerateTrap);
    }
    let mass = mass_from_geometry(config.diameter, config.density)?;
    let split = wy * wy - wx * wx;
    let omega_0 = (wx * wx + wy * wy).sqrt() / 2.0;
    let omega_1 = split / (2.0 * omega_0);
    let omega_3 = config.delta * split / (2.0 * omega_0);
    let beta_x = omega_3 * (wx / wy).sqrt();
    let beta_y = omega_3 * (wy / wx).sqrt();
    let l_x = (HBAR / (2.0 * mass * wx)).sqrt();
    let l_y = (HBAR / (2.0 * mass * wy)).sqrt();
    let shot = |l: f64, w: f64| mass * mass * l * l * w.powi(4) / (config.eta * config.eta * config.phi);
    Ok(DerivedParams {
        mass,
        omega_0,
        omega_1,
        omega_3,
        beta_x,
        beta_y,
        beta: (beta_x * beta_y).sqrt(),
        kappa: mass * split / 2.0,
        detuning: config.detuning.unwrap_or(omega_1 - config.omega_r),
        gamma_bal: config.gamma_gx + config.gamma_gy - config.gamma_ay,
        l_x,
        l_y,
        s_s0_x: shot(l_x, wx),
        s_s0_y: shot(l_y, wy),
    })
}

/// Selects one of the two transverse modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    X,
    Y,
}

impl Mode {
    pub fn other(self) -> Mode {
        match self {
            Mode::X => Mode::Y,
            Mode::Y => Mode::X,
        }
    }

    pub fn label(self) -> char {
        match self {
            Mode::X => 'x',
            Mode::Y => 'y',
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "x" | "X" => Ok(Mode::X),
            "y" | "Y" => Ok(Mode::Y),
            other => Err(format!("mode must be x or y, got `{other}`")),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Fig. 2/3 style document with every required key.
    pub(crate) fn base_document() -> serde_json::Value {
        serde_json::json!({
            "omega_x": 130e3, "omega_y": 160e3,
            "gamma_gx": 0.06, "gamma_gy": 0.06, "gamma_ay": 0.12,
            "gamma_cx": 0.0, "gamma_cy": 0.0, "Gamma_cx": 0.0, "Gamma_cy": 0.0,
            "D_tx": 0.0, "D_ty": 0.0,
            "delta": 1e-4, "omega_r": 30e3, "Delta_detuning": 0.0,
            "temperature": 1.0, "diameter": 100e-9, "density": 2200.0,
            "eta": 2e-9, "phi": 5e16, "Q0": 300.0, "N0": 1e5,
            "frequency_unit_convention": "ordinary"
        })
    }

    pub(crate) fn base_config() -> SystemConfig {
        SystemConfig::from_value(base_document()).unwrap()
    }

    #[test]
    fn ordinary_convention_multiplies_frequencies() {
        let cfg = base_config();
        assert_eq!(cfg.omega_x, TAU * 130e3);
        assert_eq!(cfg.omega_y, TAU * 160e3);
        assert_eq!(cfg.omega_r, TAU * 30e3);
        // rates are untouched
        assert_eq!(cfg.gamma_gx, 0.06);
        assert_eq!(cfg.delta, 1e-4);
    }

    #[test]
    fn zero_frequency_is_out_of_range() {
        let mut doc = base_document();
        doc["omega_x"] = 0.0.into();
        match SystemConfig::from_value(doc) {
            Err(Error::OutOfRange { field, .. }) => assert_eq!(field, "omega_x"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_key_is_named() {
        let mut doc = base_document();
        doc.as_object_mut().unwrap().remove("eta");
        assert!(matches!(SystemConfig::from_value(doc), Err(Error::MissingKey(k)) if k == "eta"));
    }

    #[test]
    fn bad_documents_are_parse_errors() {
        assert!(matches!(SystemConfig::from_json_str("{not json"), Err(Error::Parse(_))));
        assert!(matches!(SystemConfig::from_json_str("[1, 2]"), Err(Error::Parse(_))));
        let mut doc = base_document();
        doc["omega_x"] = "fast".into();
        assert!(matches!(SystemConfig::from_value(doc), Err(Error::Parse(_))));
        let mut doc = base_document();
        doc["omgea_x"] = 1.0.into();
        assert!(matches!(SystemConfig::from_value(doc), Err(Error::Parse(_))));
    }

    #[test]
    fn range_checks() {
        for (key, value) in [
            ("delta", 0.2),
            ("delta", -1e-6),
            ("gamma_gx", -0.1),
            ("temperature", -1.0),
            ("phi", 0.0),
            ("eta", -2e-9),
            ("diameter", 0.0),
        ] {
            let mut doc = base_document();
            doc[key] = value.into();
            match SystemConfig::from_value(doc) {
                Err(Error::OutOfRange { field, .. }) => assert_eq!(field, key),
                other => panic!("{key}={value}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn mass_of_100nm_silica_sphere() {
        let m = mass_from_geometry(100e-9, 2200.0).unwrap();
        // π/6 · (1e-7)³ · 2200 evaluated by hand
        assert!((m - 1.151_917_3e-18).abs() < 1e-24);
        let m2 = mass_from_geometry(200e-9, 2200.0).unwrap();
        assert!((m2 / m - 8.0).abs() < 1e-12);
        assert!(mass_from_geometry(0.0, 2200.0).is_err());
        assert!(mass_from_geometry(1e-7, -1.0).is_err());
    }

    #[test]
    fn derived_values_for_angular_trap() {
        let mut doc = base_document();
        doc["frequency_unit_convention"] = "angular".into();
        let cfg = SystemConfig::from_value(doc).unwrap();
        let p = derive_parameters(&cfg).unwrap();
        // Independent arithmetic: sqrt(130e3² + 160e3²)/2 = 103_077.64...
        let w0 = (130e3f64.powi(2) + 160e3f64.powi(2)).sqrt() / 2.0;
        assert!((p.omega_0 - 1.030_776_4e5).abs() < 0.1);
        assert!((p.omega_0 - w0).abs() == 0.0);
        // ω3 = 1e-4 · (160e3² − 130e3²) / (2 ω0) ≈ 4.2201
        assert!((p.omega_3 - 4.220_1).abs() < 1e-3, "{}", p.omega_3);
        assert!((p.beta - p.omega_3).abs() < 1e-12 * p.omega_3);
    }

    #[test]
    fn symmetric_trap_decouples() {
        let mut cfg = base_config();
        cfg.omega_y = cfg.omega_x;
        cfg.delta = 0.0;
        let p = derive_parameters(&cfg).unwrap();
        assert_eq!(p.omega_3, 0.0);
        assert_eq!(p.beta, 0.0);
        assert_eq!(p.kappa, 0.0);
        cfg.delta = 1e-4;
        assert!(matches!(derive_parameters(&cfg), Err(Error::DegenerateTrap)));
    }

    #[test]
    fn resonant_modulation_has_zero_detuning() {
        let mut cfg = base_config();
        cfg.detuning = None;
        let p0 = derive_parameters(&cfg).unwrap();
        cfg.omega_r = p0.omega_1;
        let p = derive_parameters(&cfg).unwrap();
        assert_eq!(p.detuning, 0.0);
    }

    #[test]
    fn snapshot_reloads_bit_identically() {
        let cfg = base_config();
        let again = SystemConfig::from_value(cfg.to_document()).unwrap();
        assert_eq!(cfg.omega_x.to_bits(), again.omega_x.to_bits());
        assert_eq!(derive_parameters(&cfg).unwrap(), derive_parameters(&again).unwrap());
    }
}
