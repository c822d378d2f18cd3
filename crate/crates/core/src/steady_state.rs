//! Steady state of a generator and the expectation values derived from it.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{unvectorize, HilbertSpace, Operator, OperatorSet, SpaceMode};
use crate::liouvillian::{build_generator_with, Generator, ModelSpec};

/// Systems with at most this many unknowns (d²) are solved densely.
const DENSE_LIMIT: usize = 256;
const RESIDUAL_FACTOR: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    DirectSparse,
    Dense,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::DirectSparse => "direct_sparse",
            SolverKind::Dense => "dense",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: Operator,
    pub space: HilbertSpace,
    /// ‖Lρ‖∞ in rad/ps.
    pub residual: f64,
    /// Largest |L| entry, the scale the residual is judged against.
    pub generator_scale: f64,
    pub solver: SolverKind,
    pub min_eigenvalue: f64,
}

impl SteadyState {
    pub fn n_max_used(&self) -> usize {
        self.space.n_max()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn expectation(&self, x: &Operator) -> Complex64 {
        x.expectation(&self.rho)
    }

    /// Photon-number distribution p(n), n = 0..=n_max.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.space.n_max() + 1];
        for (i, s) in self.space.labels().iter().enumerate() {
            p[s.photons] += self.rho.get(i, i).re;
        }
        p
    }
}

/// Solves Lρ = 0 with Tr ρ = 1.
///
/// The equation for ρ₀₀ is replaced by the trace row, scaled to the
/// largest generator entry so the constrained matrix stays balanced.
pub fn solve(generator: &Generator) -> Result<SteadyState> {
    let sup = generator.superoperator();
    let d = sup.dim();
    let n = d * d;
    let scale = sup.max_abs().max(f64::MIN_POSITIVE);
    let defect = sup.trace_defect();
    if defect > 1e-10 * scale.max(1.0) {
        return Err(Error::NotTracePreserving(defect));
    }

    let mut entries: Vec<Triplet<usize, usize, Complex64>> =
        sup.entries().into_iter().filter(|t| t.row != 0).collect();
    for i in 0..d {
        entries.push(Triplet::new(0, i * (d + 1), Complex64::new(scale, 0.0)));
    }
    let mut rhs = Mat::<Complex64>::zeros(n, 1);
    rhs[(0, 0)] = Complex64::new(scale, 0.0);

    let (x, solver) = if n <= DENSE_LIMIT {
        let mut a = Mat::<Complex64>::zeros(n, n);
        for t in &entries {
            a[(t.row, t.col)] += t.val;
        }
        (a.full_piv_lu().solve(&rhs), SolverKind::Dense)
    } else {
        let a = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &entries)
            .map_err(|e| Error::NonUniqueSteadyState(format!("{e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::NonUniqueSteadyState(format!("factorization failed: {e:?}")))?;
        (lu.solve(&rhs), SolverKind::DirectSparse)
    };

    let v: Vec<Complex64> = (0..n).map(|i| x[(i, 0)]).collect();
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonUniqueSteadyState(
            "constrained system is singular".into(),
        ));
    }
    let residual = sup
        .apply_vec(&v)
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    let bound = RESIDUAL_FACTOR * scale;
    if residual > bound {
        return Err(Error::ResidualTooLarge { residual, bound });
    }

    let rho = unvectorize(&v, d)?.hermitian_part();
    let trace = rho.trace();
    if (trace - 1.0).norm() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {trace}")));
    }
    let min_eigenvalue = rho
        .hermitian_eigenvalues()?
        .first()
        .copied()
        .unwrap_or(0.0);
    if min_eigenvalue < -POSITIVITY_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {min_eigenvalue:.3e}"
        )));
    }
    Ok(SteadyState {
        rho,
        space: generator.space().clone(),
        residual,
        generator_scale: scale,
        solver,
        min_eigenvalue,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationOptions {
    pub start: usize,
    pub step: usize,
    pub cap: usize,
    pub tol: f64,
}

impl Default for TruncationOptions {
    fn default() -> Self {
        TruncationOptions {
            start: 5,
            step: 5,
            cap: 120,
            tol: 1e-6,
        }
    }
}

/// Grows n_max along start, start+step, … until ⟨a†a⟩ changes by less than
/// `tol` (relative) and the top Fock level holds less than 10·tol.
pub fn auto_truncate(spec: &ModelSpec, opts: &TruncationOptions) -> Result<SteadyState> {
    if let SpaceMode::Wea3 = spec.space.mode() {
        return Err(Error::invalid("n_max", "automatic truncation needs the full space"));
    }
    if opts.step == 0 || !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "need step > 0 and tol > 0"));
    }
    let mut previous: Option<f64> = None;
    let mut n_max = opts.start.max(1);
    while n_max <= opts.cap {
        let state = solve_at(spec, n_max)?;
        let p = state.photon_distribution();
        let n_cav: f64 = p.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();
        let top = p[n_max].abs();
        if let Some(prev) = previous {
            if (n_cav - prev).abs() <= opts.tol * n_cav.abs() && top < 10.0 * opts.tol {
                return Ok(state);
            }
        }
        previous = Some(n_cav);
        n_max += opts.step;
    }
    Err(Error::TruncationNotConverged { cap: opts.cap })
}

pub fn solve_at(spec: &ModelSpec, n_max: usize) -> Result<SteadyState> {
    let spec = spec.with_space(HilbertSpace::full(n_max)?);
    let ops = OperatorSet::new(&spec.space);
    solve(&build_generator_with(&spec, &ops)?)
}

#[derive(Debug, Clone)]
pub struct Moments {
    pub n_cav: f64,
    pub n_exc: f64,
    pub a: Complex64,
    pub sigma_minus: Complex64,
    pub a_dag_sigma_minus: Complex64,
    /// ⟨(a†)^m a^m⟩ for m = 1..=m_max.
    pub photon: Vec<f64>,
    /// ⟨(a†a)²⟩
    pub n_cav_sq: f64,
}

pub fn moments(state: &SteadyState, m_max: usize) -> Result<Moments> {
    let n_max = state.n_max_used();
    if m_max > n_max {
        return Err(Error::MomentBeyondTruncation { m: m_max, n_max });
    }
    let ops = OperatorSet::new(&state.space);
    let p = state.photon_distribution();
    // ⟨(a†)^m a^m⟩ = Σ_n p(n) n!/(n−m)!
    let photon = (1..=m_max)
        .map(|m| {
            p.iter()
                .enumerate()
                .skip(m)
                .map(|(n, pn)| pn * ((n - m + 1)..=n).map(|k| k as f64).product::<f64>())
                .sum()
        })
        .collect();
    let n_cav = p.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();
    let n_cav_sq = p.iter().enumerate().map(|(n, pn)| (n * n) as f64 * pn).sum();
    Ok(Moments {
        n_cav,
        n_exc: state.expectation(&ops.sigma11).re,
        a: state.expectation(&ops.a),
        sigma_minus: state.expectation(&ops.sigma_minus),
        a_dag_sigma_minus: state.expectation(&(&ops.a_dag * &ops.sigma_minus)),
        photon,
        n_cav_sq,
    })
}
