//! Scenario descriptions: TOML configuration files and the built-in presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhononMode, PhononParams, SystemParams, DEFAULT_CARRIER_UEV};
use crate::transport::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Master equation on the truncated Fock space.
    Full,
    /// Three-state master equation.
    Wea3,
    /// Two-oscillator closed form.
    Analytic,
    /// Rotating-wave closed form.
    AnalyticRwa,
    /// Full model with g = 0, used for conditional phases.
    NoDotReference,
    /// Full model with the bath switched off and γ′ optionally rescaled.
    NoPhonon,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Full,
        Variant::Wea3,
        Variant::Analytic,
        Variant::AnalyticRwa,
        Variant::NoDotReference,
        Variant::NoPhonon,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Wea3 => "wea3",
            Variant::Analytic => "analytic",
            Variant::AnalyticRwa => "analytic_rwa",
            Variant::NoDotReference => "no_dot_reference",
            Variant::NoPhonon => "no_phonon",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Variant::ALL.iter().map(|v| v.as_str()).collect();
                Error::Config(format!("unknown variant `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NMax {
    Auto,
    Fixed(usize),
}

impl FromStr for NMax {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(NMax::Auto),
            n => n
                .parse()
                .map(NMax::Fixed)
                .map_err(|_| Error::Config(format!("n_max must be \"auto\" or an integer, got `{s}`"))),
        }
    }
}

impl Serialize for NMax {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NMax::Auto => s.serialize_str("auto"),
            NMax::Fixed(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for NMax {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(NMax::Fixed(n as usize)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

// On-disk layout. Field names are the documented configuration keys.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "default_name")]
    pub name: String,
    pub system: SystemSection,
    #[serde(default)]
    pub phonon: PhononSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    pub sweep: SweepSection,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub variant_options: VariantOptions,
}

fn default_name() -> String {
    "scenario".into()
}

fn default_variants() -> Vec<Variant> {
    vec![Variant::Full]
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub g_ueV: f64,
    pub kappa_c_ueV: f64,
    pub kappa_0_ueV: f64,
    pub gamma_ueV: f64,
    pub gamma_prime_ueV: f64,
    #[serde(default)]
    pub omega_x_rel_ueV: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_c_over_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_c_ueV: Option<f64>,
    #[serde(default = "default_carrier")]
    pub omega_c_ueV: f64,
}

fn default_carrier() -> f64 {
    DEFAULT_CARRIER_UEV
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub mode: PhononMode,
    #[serde(default = "default_alpha")]
    pub alpha_p_ps2: f64,
    #[serde(default = "default_omega_b")]
    pub omega_b_meV: f64,
    #[serde(default = "default_temperature")]
    pub temperature_K: f64,
    #[serde(default = "yes")]
    pub coherent_renormalization: bool,
}

fn default_alpha() -> f64 {
    0.06
}
fn default_omega_b() -> f64 {
    1.0
}
fn default_temperature() -> f64 {
    4.0
}
fn yes() -> bool {
    true
}

impl Default for PhononSection {
    fn default() -> Self {
        PhononSection {
            enabled: false,
            mode: PhononMode::EffectiveLindblad,
            alpha_p_ps2: default_alpha(),
            omega_b_meV: default_omega_b(),
            temperature_K: default_temperature(),
            coherent_renormalization: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default = "default_n_max")]
    pub n_max: NMax,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
}

fn default_n_max() -> NMax {
    NMax::Auto
}
fn default_tol() -> f64 {
    1e-6
}
fn default_m_max() -> usize {
    5
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            n_max: default_n_max(),
            tol: default_tol(),
            m_max: default_m_max(),
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub start_ueV: f64,
    pub stop_ueV: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantOptions {
    /// γ′ multiplier applied in the no_phonon run.
    #[serde(default = "one")]
    pub no_phonon_gamma_prime_scale: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for VariantOptions {
    fn default() -> Self {
        VariantOptions {
            no_phonon_gamma_prime_scale: 1.0,
        }
    }
}

/// A validated, runnable scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub system: SystemParams,
    pub phonon: PhononParams,
    pub n_max: NMax,
    pub tol: f64,
    pub m_max: usize,
    pub grid: Grid,
    pub variants: Vec<Variant>,
    pub no_phonon_gamma_prime_scale: f64,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_config(file)
    }

    pub fn from_config(c: ConfigFile) -> Result<Self> {
        let s = &c.system;
        let system = SystemParams {
            g: s.g_ueV,
            omega_x_rel: s.omega_x_rel_ueV,
            omega_c: s.omega_c_ueV,
            kappa_0: s.kappa_0_ueV,
            kappa_c: s.kappa_c_ueV,
            gamma: s.gamma_ueV,
            gamma_prime: s.gamma_prime_ueV,
            eta_c: s.eta_c_ueV,
            eta_c_over_g: s.eta_c_over_g,
        };
        let p = &c.phonon;
        let phonon = PhononParams {
            enabled: p.enabled,
            mode: if p.enabled { p.mode } else { PhononMode::None },
            alpha_p: p.alpha_p_ps2,
            omega_b_mev: p.omega_b_meV,
            temperature_k: p.temperature_K,
            coherent_renormalization: p.coherent_renormalization,
        };
        let scenario = Scenario {
            name: c.name,
            system,
            phonon,
            n_max: c.numerics.n_max,
            tol: c.numerics.tol,
            m_max: c.numerics.m_max,
            grid: Grid {
                start: c.sweep.start_ueV,
                stop: c.sweep.stop_ueV,
                points: c.sweep.points,
            },
            variants: c.variants,
            no_phonon_gamma_prime_scale: c.variant_options.no_phonon_gamma_prime_scale,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(Error::Config(format!(
                "name `{}` must be non-empty and use only [A-Za-z0-9_-]",
                self.name
            )));
        }
        self.system.validate()?;
        self.phonon.validate()?;
        self.grid.values()?;
        if let NMax::Fixed(n) = self.n_max {
            if n < 1 {
                return Err(Error::invalid("n_max", "must be at least 1"));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::invalid("tol", format!("must lie in (0, 1), got {}", self.tol)));
        }
        if self.variants.is_empty() {
            return Err(Error::Config("at least one variant is required".into()));
        }
        if !(self.no_phonon_gamma_prime_scale >= 0.0 && self.no_phonon_gamma_prime_scale.is_finite()) {
            return Err(Error::invalid(
                "no_phonon_gamma_prime_scale",
                "must be a finite non-negative number",
            ));
        }
        Ok(())
    }

    pub fn to_config(&self) -> ConfigFile {
        let s = &self.system;
        let p = &self.phonon;
        ConfigFile {
            name: self.name.clone(),
            system: SystemSection {
                g_ueV: s.g,
                kappa_c_ueV: s.kappa_c,
                kappa_0_ueV: s.kappa_0,
                gamma_ueV: s.gamma,
                gamma_prime_ueV: s.gamma_prime,
                omega_x_rel_ueV: s.omega_x_rel,
                eta_c_over_g: s.eta_c_over_g,
                eta_c_ueV: s.eta_c,
                omega_c_ueV: s.omega_c,
            },
            phonon: PhononSection {
                enabled: p.enabled,
                mode: p.mode,
                alpha_p_ps2: p.alpha_p,
                omega_b_meV: p.omega_b_mev,
                temperature_K: p.temperature_k,
                coherent_renormalization: p.coherent_renormalization,
            },
            numerics: NumericsSection {
                n_max: self.n_max,
                tol: self.tol,
                m_max: self.m_max,
            },
            sweep: SweepSection {
                start_ueV: self.grid.start,
                stop_ueV: self.grid.stop,
                points: self.grid.points,
            },
            variants: self.variants.clone(),
            variant_options: VariantOptions {
                no_phonon_gamma_prime_scale: self.no_phonon_gamma_prime_scale,
            },
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_config()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let waveguide = |name: &str, g: f64, eta: f64, m_max: usize| Scenario {
            name: name.into(),
            system: SystemParams::waveguide_cavity(g, eta),
            phonon: PhononParams::disabled(),
            n_max: NMax::Auto,
            tol: 1e-6,
            m_max,
            grid: Grid {
                start: -200.0,
                stop: 200.0,
                points: 201,
            },
            variants: vec![Variant::Full, Variant::Wea3, Variant::Analytic],
            no_phonon_gamma_prime_scale: 1.0,
        };
        let fig6 = |name: &str, renormalize: bool, variants: Vec<Variant>| {
            let mut phonon = PhononParams::inas(20.0);
            phonon.coherent_renormalization = renormalize;
            Scenario {
                name: name.into(),
                system: SystemParams::waveguide_cavity(120.0, 0.15),
                phonon,
                n_max: NMax::Auto,
                tol: 1e-6,
                m_max: 5,
                grid: Grid {
                    start: -300.0,
                    stop: 300.0,
                    points: 601,
                },
                variants,
                no_phonon_gamma_prime_scale: 1.0,
            }
        };
        let s = match name {
            "fig2" => waveguide("fig2", 20.0, 0.5, 5),
            "fig3" => waveguide("fig3", 20.0, 2.5, 5),
            "fig4" => waveguide("fig4", 60.0, 0.25, 5),
            "fig5" => waveguide("fig5", 60.0, 1.2, 15),
            "fig6a" => fig6("fig6a", false, vec![Variant::Full, Variant::NoPhonon]),
            "fig6b" => Scenario {
                no_phonon_gamma_prime_scale: 1.6,
                ..fig6("fig6b", false, vec![Variant::Full, Variant::NoPhonon])
            },
            "fig6c" => fig6("fig6c", true, vec![Variant::Full, Variant::NoPhonon]),
            "fig6d" => fig6(
                "fig6d",
                true,
                vec![Variant::Full, Variant::NoPhonon, Variant::NoDotReference],
            ),
            "fig6_polaron" => {
                let mut s = fig6("fig6_polaron", true, vec![Variant::Full]);
                s.phonon.mode = PhononMode::FullPolaronOracle;
                s.grid.points = 301;
                s
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown preset `{other}` (available: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        s.validate()?;
        Ok(s)
    }
}

pub const PRESETS: [&str; 9] = [
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6a",
    "fig6b",
    "fig6c",
    "fig6d",
    "fig6_polaron",
];
