//! Closed-form weak-excitation reflectivities.
//!
//! The waveguide-cavity form is the two-oscillator expression
//!
//! ```text
//! r(ω) = iωΓ_c / (ω_c² − ω² − iω(Γ_c + Γ_0) − 4ω²g² / (ω_x² − ω² − iωΓ_x^t))
//! ```
//!
//! whose near-resonance limit is the rotating-wave result
//! r = −κ_c / (κ_t + iΔ_cL + g²/((γ+γ′)/2 + iΔ_xL)).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::System;

/// Absolute-frequency parameters, all in μeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub omega_c: f64,
    pub omega_x: f64,
    pub gamma_c: f64,
    pub gamma_0: f64,
    /// γ + γ′
    pub gamma_x_t: f64,
    /// Sidewall scattering, used only by the micropillar variant.
    pub gamma_s: f64,
    pub g: f64,
    /// Micropillar in/out coupling efficiency.
    pub eta: f64,
}

impl AnalyticParams {
    pub fn from_system(s: &System) -> Self {
        AnalyticParams {
            omega_c: s.omega_c,
            omega_x: s.omega_x(),
            gamma_c: s.big_gamma_c,
            gamma_0: s.big_gamma_0,
            gamma_x_t: s.gamma + s.gamma_prime,
            gamma_s: 0.0,
            g: s.g,
            eta: 1.0,
        }
    }
}

/// Waveguide-cavity reflectivity at absolute frequency `omega` (μeV).
pub fn reflectivity_pc(omega: f64, p: &AnalyticParams) -> Complex64 {
    let i = Complex64::i();
    let w2 = omega * omega;
    let dot = Complex64::new(p.omega_x * p.omega_x - w2, -omega * p.gamma_x_t);
    let self_energy = Complex64::new(4.0 * w2 * p.g * p.g, 0.0) / dot;
    let denom = Complex64::new(p.omega_c * p.omega_c - w2, -omega * (p.gamma_c + p.gamma_0))
        - self_energy;
    i * omega * p.gamma_c / denom
}

/// Rotating-wave linear response at laser offset `omega_l_rel` = ω_L − ω_c.
pub fn rwa_reflectivity(omega_l_rel: f64, s: &System) -> Complex64 {
    let delta_cl = -omega_l_rel;
    let delta_xl = s.omega_x_rel - omega_l_rel;
    let dot = Complex64::new(0.5 * (s.gamma + s.gamma_prime), delta_xl);
    let denom = Complex64::new(s.kappa_t, delta_cl) + s.g * s.g / dot;
    -s.kappa_c / denom
}

/// r_μ = 1 − √η r_pc with Γ_c → Γ_0 and Γ_0 → Γ_s.
pub fn reflectivity_micropillar(omega: f64, p: &AnalyticParams) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&p.eta) {
        return Err(Error::invalid("eta", format!("must lie in [0, 1], got {}", p.eta)));
    }
    let swapped = AnalyticParams {
        gamma_c: p.gamma_0,
        gamma_0: p.gamma_s,
        ..*p
    };
    Ok(1.0 - p.eta.sqrt() * reflectivity_pc(omega, &swapped))
}
