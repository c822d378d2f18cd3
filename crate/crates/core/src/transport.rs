//! Transmission and reflection amplitudes, photon statistics and laser sweeps.
//!
//! The reflected field is r = −iκ_c⟨a⟩/η_c. This constant is fixed so that an
//! empty cavity reflects −κ_c/(κ_t + iΔ_cL), and t = 1 + r.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytic::{reflectivity_pc, rwa_reflectivity, AnalyticParams};
use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, OperatorSet};
use crate::liouvillian::{build_generator_with, ModelSpec};
use crate::steady_state::{auto_truncate, moments, solve, Moments, SteadyState, TruncationOptions};

const DEFINED_FLOOR: f64 = 1e-12;
/// Adjacent unwrapped phases may differ by at most this much.
pub const MAX_PHASE_STEP: f64 = 0.9 * PI;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPoint {
    /// ω_L − ω_c, μeV.
    pub omega_l_rel: f64,
    /// None when the drive vanishes.
    pub t: Option<Complex64>,
    pub r: Option<Complex64>,
    pub phi_t: f64,
    pub phi_r: f64,
    pub n_cav: f64,
    pub n_exc: f64,
    pub ce: Option<f64>,
    pub fano: Option<f64>,
    /// ⟨(a†)^m a^m⟩ for m = 1..=m_max; NaN beyond the truncation.
    pub moments: Vec<f64>,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub mean_b: f64,
    pub n_max_used: usize,
}

impl TransportPoint {
    pub fn transmission(&self) -> f64 {
        self.t.map_or(f64::NAN, |t| t.norm_sqr())
    }

    pub fn reflection(&self) -> f64 {
        self.r.map_or(f64::NAN, |r| r.norm_sqr())
    }
}

/// r = −iκ_c⟨a⟩/η_c.
pub fn reflection_amplitude(a: Complex64, kappa_c: f64, eta_c: f64) -> Option<Complex64> {
    if eta_c == 0.0 {
        return None;
    }
    Some(Complex64::new(0.0, -kappa_c) * a / eta_c)
}

/// |⟨a†σ⁻⟩ − ⟨a†⟩⟨σ⁻⟩| / |⟨a†σ⁻⟩|.
pub fn correlation_error(state: &SteadyState) -> Option<f64> {
    let ops = OperatorSet::new(&state.space);
    ce_from(
        state.expectation(&(&ops.a_dag * &ops.sigma_minus)),
        state.expectation(&ops.a),
        state.expectation(&ops.sigma_minus),
    )
}

fn ce_from(a_dag_sm: Complex64, a: Complex64, sm: Complex64) -> Option<f64> {
    let norm = a_dag_sm.norm();
    (norm >= DEFINED_FLOOR).then(|| (a_dag_sm - a.conj() * sm).norm() / norm)
}

/// (⟨(a†a)²⟩ − ⟨a†a⟩²) / ⟨a†a⟩.
pub fn fano(state: &SteadyState) -> Option<f64> {
    moments(state, 0).ok().and_then(|m| fano_from(&m))
}

fn fano_from(m: &Moments) -> Option<f64> {
    (m.n_cav >= DEFINED_FLOOR).then(|| (m.n_cav_sq - m.n_cav * m.n_cav) / m.n_cav)
}

pub fn transport_point(state: &SteadyState, spec: &ModelSpec, m_max: usize) -> Result<TransportPoint> {
    let available = m_max.min(state.n_max_used());
    let m = moments(state, available)?;
    let r = reflection_amplitude(m.a, spec.system.kappa_c, spec.system.eta_c);
    let t = r.map(|r| 1.0 + r);
    let mut photon = m.photon.clone();
    photon.resize(m_max, f64::NAN);
    Ok(TransportPoint {
        omega_l_rel: spec.omega_l_rel,
        t,
        r,
        phi_t: t.map_or(f64::NAN, |t| t.arg()),
        phi_r: r.map_or(f64::NAN, |r| r.arg()),
        n_cav: m.n_cav,
        n_exc: m.n_exc,
        ce: ce_from(m.a_dag_sigma_minus, m.a, m.sigma_minus),
        fano: fano_from(&m),
        moments: photon,
        gamma_plus: spec.lindblad_phonon_rates().0,
        gamma_minus: spec.lindblad_phonon_rates().1,
        mean_b: spec.coupling_factor(),
        n_max_used: state.n_max_used(),
    })
}

fn linear_point(omega_l_rel: f64, r: Complex64, m_max: usize) -> TransportPoint {
    let t = 1.0 + r;
    TransportPoint {
        omega_l_rel,
        t: Some(t),
        r: Some(r),
        phi_t: t.arg(),
        phi_r: r.arg(),
        n_cav: f64::NAN,
        n_exc: f64::NAN,
        ce: None,
        fano: None,
        moments: vec![f64::NAN; m_max],
        gamma_plus: 0.0,
        gamma_minus: 0.0,
        mean_b: 1.0,
        n_max_used: 0,
    }
}

/// Nearest-branch continuation of `phases`, starting from the first value.
pub fn unwrap_phases(omegas: &[f64], phases: &mut [f64]) -> Result<()> {
    let mut prev: Option<f64> = None;
    for (w, p) in omegas.iter().zip(phases.iter_mut()) {
        if !p.is_finite() {
            continue;
        }
        if let Some(q) = prev {
            let step = *p - q;
            let k = (step / (2.0 * PI)).round();
            let step = step - 2.0 * PI * k;
            if step.abs() > MAX_PHASE_STEP {
                return Err(Error::PhaseStep { omega: *w, step });
            }
            *p = q + step;
        }
        prev = Some(*p);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Fixed(usize),
    Auto(TruncationOptions),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// Master equation on the truncated Fock space.
    Full(Truncation),
    /// Master equation on {|g,0⟩, |g,1⟩, |e,0⟩}.
    Wea3,
    /// Two-oscillator closed form.
    Analytic,
    /// Rotating-wave closed form.
    AnalyticRwa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 || !(self.stop > self.start) {
            return Err(Error::invalid(
                "sweep",
                "need at least 2 points and stop > start",
            ));
        }
        let h = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.stop
                } else {
                    self.start + h * k as f64
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub points: Vec<TransportPoint>,
    pub m_max: usize,
}

/// Runs one steady-state solve per grid point on the current rayon pool and
/// unwraps the phases in grid order.
pub fn sweep(base: &ModelSpec, model: Model, grid: &Grid, m_max: usize) -> Result<SweepTable> {
    let omegas = grid.values()?;
    let space = match model {
        Model::Full(Truncation::Fixed(n)) => Some(HilbertSpace::full(n)?),
        Model::Full(Truncation::Auto(_)) => Some(HilbertSpace::full(1)?),
        Model::Wea3 => Some(HilbertSpace::wea3()),
        Model::Analytic | Model::AnalyticRwa => None,
    };
    let ops = space.as_ref().map(OperatorSet::new);
    let analytic = AnalyticParams::from_system(&base.system);

    let mut points = omegas
        .par_iter()
        .map(|&w| {
            let point = match model {
                Model::Analytic => Ok(linear_point(
                    w,
                    reflectivity_pc(base.system.omega_c + w, &analytic),
                    m_max,
                )),
                Model::AnalyticRwa => Ok(linear_point(w, rwa_reflectivity(w, &base.system), m_max)),
                Model::Full(Truncation::Auto(opts)) => {
                    let spec = ModelSpec {
                        space: space.clone().expect("space set for master-equation models"),
                        ..base.at(w)
                    };
                    auto_truncate(&spec, &opts).and_then(|ss| transport_point(&ss, &spec, m_max))
                }
                Model::Full(Truncation::Fixed(_)) | Model::Wea3 => {
                    let spec = ModelSpec {
                        space: space.clone().expect("space set for master-equation models"),
                        ..base.at(w)
                    };
                    build_generator_with(&spec, ops.as_ref().expect("operators built"))
                        .and_then(|g| solve(&g))
                        .and_then(|ss| transport_point(&ss, &spec, m_max))
                }
            };
            point.map_err(|e| Error::SweepPoint {
                omega: w,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut phi_t: Vec<f64> = points.iter().map(|p| p.phi_t).collect();
    let mut phi_r: Vec<f64> = points.iter().map(|p| p.phi_r).collect();
    unwrap_phases(&omegas, &mut phi_t)?;
    unwrap_phases(&omegas, &mut phi_r)?;
    for (p, (a, b)) in points.iter_mut().zip(phi_t.into_iter().zip(phi_r)) {
        p.phi_t = a;
        p.phi_r = b;
    }
    Ok(SweepTable { points, m_max })
}

/// Pointwise (ω, φ_t^dot − φ_t^0, φ_r^dot − φ_r^0).
pub fn conditional_phase(with_dot: &SweepTable, no_dot: &SweepTable) -> Result<Vec<[f64; 3]>> {
    if with_dot.points.len() != no_dot.points.len() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} points",
            with_dot.points.len(),
            no_dot.points.len()
        )));
    }
    with_dot
        .points
        .iter()
        .zip(&no_dot.points)
        .map(|(d, z)| {
            if (d.omega_l_rel - z.omega_l_rel).abs() > 1e-9 * d.omega_l_rel.abs().max(1.0) {
                return Err(Error::GridMismatch(format!(
                    "{} vs {}",
                    d.omega_l_rel, z.omega_l_rel
                )));
            }
            Ok([d.omega_l_rel, d.phi_t - z.phi_t, d.phi_r - z.phi_r])
        })
        .collect()
}

pub fn csv_header(m_max: usize) -> String {
    let mut cols: Vec<String> = [
        "omega_L_minus_omega_c_ueV",
        "T",
        "R",
        "phi_t_rad",
        "phi_r_rad",
        "re_t",
        "im_t",
        "re_r",
        "im_r",
        "n_cav",
        "n_exc",
        "CE",
        "CE_defined",
        "fano",
        "fano_defined",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend((1..=m_max).map(|m| format!("moment_m{m}")));
    cols.extend(
        ["gamma_ph_plus_ueV", "gamma_ph_minus_ueV", "mean_B", "n_max_used"]
            .iter()
            .map(|s| s.to_string()),
    );
    cols.join(",")
}

impl SweepTable {
    pub fn omegas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.omega_l_rel).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = csv_header(self.m_max);
        out.push('\n');
        for p in &self.points {
            let t = p.t.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let r = p.r.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let mut fields = vec![
                p.omega_l_rel,
                p.transmission(),
                p.reflection(),
                p.phi_t,
                p.phi_r,
                t.re,
                t.im,
                r.re,
                r.im,
                p.n_cav,
                p.n_exc,
            ]
            .into_iter()
            .map(fmt_f64)
            .collect::<Vec<_>>();
            for v in [p.ce, p.fano] {
                fields.push(fmt_f64(v.unwrap_or(f64::NAN)));
                fields.push(u8::from(v.is_some()).to_string());
            }
            fields.extend(p.moments.iter().copied().map(fmt_f64));
            fields.extend([p.gamma_plus, p.gamma_minus, p.mean_b].map(fmt_f64));
            fields.push(p.n_max_used.to_string());
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub fn write_conditional_phase(rows: &[[f64; 3]], path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "omega_L_minus_omega_c_ueV,phi_t_c_rad,phi_r_c_rad")?;
    for row in rows {
        writeln!(f, "{},{},{}", fmt_f64(row[0]), fmt_f64(row[1]), fmt_f64(row[2]))?;
    }
    f.flush()?;
    Ok(())
}

/// Shortest round-trip representation; NaN for undefined entries.
fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v:e}")
    }
}
