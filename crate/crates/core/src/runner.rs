//! Runs a scenario: one sweep per variant, CSV tables and a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;
use crate::liouvillian::ModelSpec;
use crate::params::{to_uev, PhononMode, System};
use crate::phonon::PhononQuantities;
use crate::scenario::{ConfigFile, NMax, Scenario, Variant};
use crate::steady_state::TruncationOptions;
use crate::transport::{conditional_phase, sweep, write_conditional_phase, Model, SweepTable, Truncation};

/// One computed sweep and the label used in its file name.
#[derive(Debug, Clone)]
pub struct LabelledTable {
    pub label: String,
    pub model: &'static str,
    pub table: SweepTable,
    pub runtime_s: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub scenario: Scenario,
    pub phonon: PhononSummary,
    pub tables: Vec<LabelledTable>,
    /// (ω, φ_t^c, φ_r^c) when a no-dot reference was requested.
    pub conditional_phase: Option<Vec<[f64; 3]>>,
}

impl RunResult {
    pub fn table(&self, label: &str) -> Option<&SweepTable> {
        self.tables.iter().find(|t| t.label == label).map(|t| &t.table)
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Serialize)]
pub struct PhononSummary {
    pub enabled: bool,
    pub mean_B: f64,
    pub gamma_ph_plus_ueV: f64,
    pub gamma_ph_minus_ueV: f64,
    pub polaron_shift_ueV: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub label: String,
    pub model: String,
    pub file: String,
    pub points: usize,
    pub runtime_s: f64,
    pub n_max_min: usize,
    pub n_max_max: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub crate_version: String,
    pub scenario: ConfigFile,
    pub phonon: PhononSummary,
    pub threads: usize,
    pub runs: Vec<RunRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditional_phase_file: Option<String>,
    pub total_runtime_s: f64,
}

fn base_spec(s: &Scenario, system: System, phonon_override: Option<PhononMode>) -> Result<ModelSpec> {
    let mut phonon = s.phonon.clone();
    if let Some(mode) = phonon_override {
        phonon.mode = mode;
    }
    let quantities = PhononQuantities::compute(&phonon, system.g, system.delta_cx())?;
    Ok(ModelSpec::new(system, phonon, quantities, HilbertSpace::wea3(), 0.0))
}

fn truncation(s: &Scenario) -> Truncation {
    match s.n_max {
        NMax::Fixed(n) => Truncation::Fixed(n),
        NMax::Auto => Truncation::Auto(TruncationOptions {
            tol: s.tol,
            ..TruncationOptions::default()
        }),
    }
}

fn timed(label: String, model: &'static str, f: impl FnOnce() -> Result<SweepTable>) -> Result<LabelledTable> {
    let t0 = Instant::now();
    let table = f()?;
    Ok(LabelledTable {
        label,
        model,
        table,
        runtime_s: t0.elapsed().as_secs_f64(),
    })
}

/// Computes every requested variant on the current rayon pool.
pub fn run_scenario(s: &Scenario) -> Result<RunResult> {
    s.validate()?;
    let system = s.system.validate()?;
    let oracle = s.phonon.active() && s.phonon.mode == PhononMode::FullPolaronOracle;
    // The effective-Lindblad spec is the reference for the full model; the
    // oracle, when requested, adds a second table next to it.
    let effective = base_spec(s, system.clone(), oracle.then_some(PhononMode::EffectiveLindblad))?;
    let q = &effective.quantities;
    let phonon = PhononSummary {
        enabled: s.phonon.active(),
        mean_B: q.mean_b,
        gamma_ph_plus_ueV: q.gamma_plus,
        gamma_ph_minus_ueV: q.gamma_minus,
        polaron_shift_ueV: to_uev(q.polaron_shift),
    };
    let full = Model::Full(truncation(s));
    let m = s.m_max;
    let name = &s.name;

    let mut variants = s.variants.clone();
    variants.sort();
    variants.dedup();

    let mut tables = Vec::new();
    for v in variants {
        match v {
            Variant::Full => {
                tables.push(timed(format!("{name}_full"), "full", || {
                    sweep(&effective, full, &s.grid, m)
                })?);
                if oracle {
                    let spec = base_spec(s, system.clone(), None)?;
                    tables.push(timed(format!("{name}_full_polaron"), "full_polaron_oracle", || {
                        sweep(&spec, full, &s.grid, m)
                    })?);
                }
            }
            Variant::Wea3 => tables.push(timed(format!("{name}_wea3"), "wea3", || {
                sweep(&effective, Model::Wea3, &s.grid, m)
            })?),
            Variant::Analytic => tables.push(timed(format!("{name}_analytic"), "analytic", || {
                sweep(&effective, Model::Analytic, &s.grid, m)
            })?),
            Variant::AnalyticRwa => tables.push(timed(format!("{name}_analytic_rwa"), "analytic_rwa", || {
                sweep(&effective, Model::AnalyticRwa, &s.grid, m)
            })?),
            Variant::NoDotReference => {
                let spec = base_spec(s, system.with_g(0.0), oracle.then_some(PhononMode::EffectiveLindblad))?;
                tables.push(timed(format!("{name}_nodot_full"), "full", || {
                    sweep(&spec, full, &s.grid, m)
                })?);
            }
            Variant::NoPhonon => {
                let mut sys = system.clone();
                sys.gamma_prime *= s.no_phonon_gamma_prime_scale;
                let spec = ModelSpec::bare(sys, HilbertSpace::wea3(), 0.0);
                tables.push(timed(format!("{name}_no_phonon"), "full", || {
                    sweep(&spec, full, &s.grid, m)
                })?);
            }
        }
    }

    let conditional = match (
        tables.iter().find(|t| t.label == format!("{name}_full")),
        tables.iter().find(|t| t.label == format!("{name}_nodot_full")),
    ) {
        (Some(d), Some(z)) => Some(conditional_phase(&d.table, &z.table)?),
        _ => None,
    };

    Ok(RunResult {
        scenario: s.clone(),
        phonon,
        tables,
        conditional_phase: conditional,
    })
}

/// Writes `<label>.csv` for every table, the conditional phase if present and
/// `<name>_manifest.json`. Returns the manifest.
pub fn write_outputs(result: &RunResult, out_dir: &Path, threads: usize, total_runtime_s: f64) -> Result<Manifest> {
    fs::create_dir_all(out_dir)?;
    let mut runs = Vec::new();
    for t in &result.tables {
        let file = format!("{}.csv", t.label);
        t.table.write_csv(&out_dir.join(&file))?;
        let n = t.table.points.iter().map(|p| p.n_max_used);
        runs.push(RunRecord {
            label: t.label.clone(),
            model: t.model.into(),
            file,
            points: t.table.points.len(),
            runtime_s: t.runtime_s,
            n_max_min: n.clone().min().unwrap_or(0),
            n_max_max: n.max().unwrap_or(0),
        });
    }
    let conditional_phase_file = match &result.conditional_phase {
        Some(rows) => {
            let file = format!("{}_conditional_phase.csv", result.scenario.name);
            write_conditional_phase(rows, &out_dir.join(&file))?;
            Some(file)
        }
        None => None,
    };
    let manifest = Manifest {
        crate_version: env!("CARGO_PKG_VERSION").into(),
        scenario: result.scenario.to_config(),
        phonon: result.phonon.clone(),
        threads,
        runs,
        conditional_phase_file,
        total_runtime_s,
    };
    let path = manifest_path(out_dir, &result.scenario.name);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn manifest_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join(format!("{name}_manifest.json"))
}

/// Runs `s` on a dedicated pool of `threads` workers (rayon's default when
/// None) and writes all outputs into `out_dir`.
pub fn execute(s: &Scenario, out_dir: &Path, threads: Option<usize>) -> Result<Manifest> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::invalid("threads", "must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    let t0 = Instant::now();
    let result = pool.install(|| run_scenario(s))?;
    write_outputs(&result, out_dir, pool.current_num_threads(), t0.elapsed().as_secs_f64())
}
