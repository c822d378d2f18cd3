//! Polaron-frame acoustic phonon bath.
//!
//! Everything here is a scalar function of the bath parameters: the spectral
//! density J(ω) = α ω³ exp(−ω²/2ω_b²), the phase function
//!
//! ```text
//! φ(t) = ∫₀^∞ dω J(ω)/ω² [coth(βħω/2) cos ωt − i sin ωt]
//! ```
//!
//! the displacement expectation ⟨B⟩ = exp(−Re φ(0)/2), the polaron shift
//! Δ_P = ∫ J(ω)/ω dω, the polaron Green functions and the two effective
//! phonon-assisted exciton/cavity scattering rates
//!
//! ```text
//! Γ^{σ⁺a / a†σ⁻} = 2⟨B⟩² g² Re ∫₀^∞ dτ e^{±iΔ_cx τ} (e^{φ(τ)} − 1).
//! ```
//!
//! Frequencies are rad/ps and times ps internally; rates are returned in μeV.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{to_rad_ps, to_uev, PhononParams, UNITS};
use crate::quadrature::{integrate, integrate_real, QuadOptions};

/// Upper ω limit for all bath integrals, in units of ω_b.
const OMEGA_CUTOFF_FACTOR: f64 = 12.0;
/// Spacing of the φ(τ) table in ps.
const TABLE_STEP_PS: f64 = 0.01;
/// |φ(τ_max)| must fall below this for the τ range to be accepted.
const TABLE_TAIL: f64 = 1e-10;
/// Numerical noise floor below which negative rates are clipped, μeV.
const NEGATIVE_RATE_FLOOR: f64 = 1e-10;

fn omega_quad() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_intervals: 20_000,
        initial_panels: 16,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhononBath {
    /// ps²
    alpha: f64,
    /// rad/ps
    omega_b: f64,
    /// βħ in ps
    beta_hbar: f64,
}

impl PhononBath {
    pub fn new(p: &PhononParams) -> Result<Self> {
        let mut checked = p.clone();
        checked.enabled = true;
        checked.validate()?;
        Ok(PhononBath {
            alpha: p.alpha_p,
            omega_b: p.omega_b(),
            beta_hbar: UNITS.beta_hbar(p.temperature_k),
        })
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    fn omega_max(&self) -> f64 {
        OMEGA_CUTOFF_FACTOR * self.omega_b
    }

    fn gaussian(&self, omega: f64) -> f64 {
        (-omega * omega / (2.0 * self.omega_b * self.omega_b)).exp()
    }

    /// ω·coth(βħω/2), continuous through ω = 0 where it tends to 2/(βħ).
    fn omega_coth(&self, omega: f64) -> f64 {
        let x = 0.5 * self.beta_hbar * omega;
        if x.abs() < 1e-6 {
            2.0 / self.beta_hbar * (1.0 + x * x / 3.0)
        } else {
            omega / x.tanh()
        }
    }

    /// J(ω) in rad/ps.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        self.alpha * omega.powi(3) * self.gaussian(omega)
    }

    /// φ(t) by direct adaptive quadrature over ω.
    pub fn phi(&self, t: f64) -> Result<Complex64> {
        if self.alpha == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let wmax = self.omega_max();
        let opts = QuadOptions {
            initial_panels: 16 + (wmax * t / std::f64::consts::PI).ceil() as usize,
            ..omega_quad()
        };
        integrate(
            |w| {
                let (s, c) = (w * t).sin_cos();
                let env = self.alpha * self.gaussian(w);
                Complex64::new(env * self.omega_coth(w) * c, -env * w * s)
            },
            0.0,
            wmax,
            &opts,
        )
    }

    /// dφ/dt, used as slope data for the Hermite table.
    fn phi_derivative(&self, t: f64) -> Result<Complex64> {
        if self.alpha == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let wmax = self.omega_max();
        let opts = QuadOptions {
            initial_panels: 16 + (wmax * t / std::f64::consts::PI).ceil() as usize,
            ..omega_quad()
        };
        integrate(
            |w| {
                let (s, c) = (w * t).sin_cos();
                let env = self.alpha * self.gaussian(w) * w;
                Complex64::new(-env * self.omega_coth(w) * s, -env * w * c)
            },
            0.0,
            wmax,
            &opts,
        )
    }

    /// ⟨B⟩ = exp[−½ ∫ J(ω)/ω² coth(βħω/2) dω].
    pub fn mean_b(&self) -> Result<f64> {
        if self.alpha == 0.0 {
            return Ok(1.0);
        }
        let integral = integrate_real(
            |w| self.alpha * self.gaussian(w) * self.omega_coth(w),
            0.0,
            self.omega_max(),
            &omega_quad(),
        )?;
        Ok((-0.5 * integral).exp())
    }

    /// Δ_P = α ω_b³ √(π/2), rad/ps.
    pub fn polaron_shift(&self) -> f64 {
        self.alpha * self.omega_b.powi(3) * (std::f64::consts::PI / 2.0).sqrt()
    }

    /// Δ_P from quadrature of J(ω)/ω, for cross-checking the closed form.
    pub fn polaron_shift_quadrature(&self) -> Result<f64> {
        integrate_real(
            |w| self.spectral_density(w) / w.max(f64::MIN_POSITIVE),
            0.0,
            self.omega_max(),
            &omega_quad(),
        )
    }

    /// (G_g, G_u) = ⟨B⟩²(cosh φ − 1, sinh φ) at time t.
    pub fn green_functions(&self, t: f64) -> Result<(Complex64, Complex64)> {
        let b = self.mean_b()?;
        Ok(green_from_phi(b, self.phi(t)?))
    }

    /// Tabulates φ on [0, τ_max], extending τ_max until |φ(τ_max)| is
    /// negligible.
    pub fn phi_table(&self) -> Result<PhiTable> {
        let mut tau_max = (20.0 / self.omega_b).max(10.0);
        for _ in 0..8 {
            if self.phi(tau_max)?.norm() <= TABLE_TAIL * self.phi(0.0)?.norm().max(1e-300)
                || self.alpha == 0.0
            {
                return PhiTable::build(self, tau_max);
            }
            tau_max *= 2.0;
        }
        Err(Error::Quadrature {
            a: 0.0,
            b: tau_max,
            error: self.phi(tau_max)?.norm(),
            evaluations: 0,
        })
    }
}

fn green_from_phi(mean_b: f64, phi: Complex64) -> (Complex64, Complex64) {
    let b2 = mean_b * mean_b;
    (b2 * (phi.cosh() - 1.0), b2 * phi.sinh())
}

/// φ(τ) sampled on a uniform grid with exact slopes, interpolated by cubic
/// Hermite segments. Zero beyond `tau_max`.
#[derive(Debug, Clone)]
pub struct PhiTable {
    step: f64,
    tau_max: f64,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

impl PhiTable {
    fn build(bath: &PhononBath, tau_max: f64) -> Result<Self> {
        let n = (tau_max / TABLE_STEP_PS).ceil() as usize;
        let step = tau_max / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = step * k as f64;
            values.push(bath.phi(t)?);
            slopes.push(bath.phi_derivative(t)?);
        }
        Ok(PhiTable {
            step,
            tau_max,
            values,
            slopes,
        })
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if !(0.0..=self.tau_max).contains(&t) {
            return Complex64::new(0.0, 0.0);
        }
        let x = t / self.step;
        let k = (x.floor() as usize).min(self.values.len() - 2);
        let s = x - k as f64;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        self.values[k] * h00
            + self.slopes[k] * (h10 * self.step)
            + self.values[k + 1] * h01
            + self.slopes[k + 1] * (h11 * self.step)
    }
}

/// Derived bath quantities for one (bath, g, Δ_cx) configuration.
#[derive(Debug, Clone)]
pub struct PhononQuantities {
    pub mean_b: f64,
    /// rad/ps
    pub polaron_shift: f64,
    /// Γ_ph^{σ⁺a}, μeV.
    pub gamma_plus: f64,
    /// Γ_ph^{a†σ⁻}, μeV.
    pub gamma_minus: f64,
    pub phi_table: Option<Arc<PhiTable>>,
}

impl PhononQuantities {
    /// No bath: ⟨B⟩ = 1 and no scattering.
    pub fn none() -> Self {
        PhononQuantities {
            mean_b: 1.0,
            polaron_shift: 0.0,
            gamma_plus: 0.0,
            gamma_minus: 0.0,
            phi_table: None,
        }
    }

    /// `g` and `delta_cx` (= ω_c − ω_x) in μeV.
    pub fn compute(p: &PhononParams, g: f64, delta_cx: f64) -> Result<Self> {
        if !p.active() {
            return Ok(Self::none());
        }
        let bath = PhononBath::new(p)?;
        let mean_b = bath.mean_b()?;
        let table = Arc::new(bath.phi_table()?);
        let (gamma_plus, gamma_minus) = phonon_rates(&table, mean_b, g, delta_cx)?;
        Ok(PhononQuantities {
            mean_b,
            polaron_shift: bath.polaron_shift(),
            gamma_plus,
            gamma_minus,
            phi_table: Some(table),
        })
    }

    /// Ĝ_m(ω) = ∫₀^∞ G_m(τ) e^{−iωτ} dτ for m = g, u; ω in rad/ps.
    pub fn green_transforms(&self, omega: f64) -> Result<(Complex64, Complex64)> {
        let Some(table) = &self.phi_table else {
            return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        };
        let tau_max = table.tau_max();
        let opts = tau_quad(tau_max, omega);
        let phase = |tau: f64| Complex64::new(0.0, -omega * tau).exp();
        let gg = integrate(
            |tau| green_from_phi(self.mean_b, table.eval(tau)).0 * phase(tau),
            0.0,
            tau_max,
            &opts,
        )?;
        let gu = integrate(
            |tau| green_from_phi(self.mean_b, table.eval(tau)).1 * phase(tau),
            0.0,
            tau_max,
            &opts,
        )?;
        Ok((gg, gu))
    }
}

fn tau_quad(tau_max: f64, omega: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_intervals: 20_000,
        initial_panels: 32 + (omega.abs() * tau_max / std::f64::consts::PI).ceil() as usize,
    }
}

/// Effective phonon scattering rates (Γ^{σ⁺a}, Γ^{a†σ⁻}) in μeV for coupling
/// `g` and cavity-exciton detuning `delta_cx`, both in μeV.
pub fn phonon_rates(
    table: &PhiTable,
    mean_b: f64,
    g: f64,
    delta_cx: f64,
) -> Result<(f64, f64)> {
    let g = to_rad_ps(g);
    let delta = to_rad_ps(delta_cx);
    let tau_max = table.tau_max();
    let opts = tau_quad(tau_max, delta);
    let kernel = |sign: f64| -> Result<f64> {
        let integral = integrate(
            |tau| (table.eval(tau).exp() - 1.0) * Complex64::new(0.0, sign * delta * tau).exp(),
            0.0,
            tau_max,
            &opts,
        )?;
        let rate = to_uev(2.0 * mean_b * mean_b * g * g * integral.re);
        if rate < 0.0 {
            if rate < -NEGATIVE_RATE_FLOOR {
                return Err(Error::NegativeRate { value: rate });
            }
            return Ok(0.0);
        }
        Ok(rate)
    };
    Ok((kernel(1.0)?, kernel(-1.0)?))
}
