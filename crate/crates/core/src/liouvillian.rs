//! Rotating-frame Hamiltonian and master-equation generator.
//!
//! In the frame of the laser ω_L the polaron-frame system Hamiltonian is
//!
//! ```text
//! H = Δ_xL σ⁺σ⁻ + Δ_cL a†a + ⟨B⟩ g (a†σ⁻ + σ⁺a) + η_c (a + a†)
//! ```
//!
//! with the polaron shift absorbed into ω_x. The generator adds, with
//! D[X]ρ = 2XρX† − X†Xρ − ρX†X,
//!
//! ```text
//! (γ⟨B⟩²/2) D[σ⁻] + κ_t D[a] + (γ′/2) D[σ₁₁] + (Γ⁺/2) D[σ⁺a] + (Γ⁻/2) D[a†σ⁻]
//! ```
//!
//! or, instead of the two phonon Lindblad terms, the full Born–Markov
//! polaron dissipator built from the spectral decomposition of H.

use faer::sparse::Triplet;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    commutator_super, dissipator, push_sandwich, HilbertSpace, Operator, OperatorSet,
    RateStructure, Superoperator,
};
use crate::params::{to_rad_ps, PhononMode, PhononParams, System};
use crate::phonon::PhononQuantities;

/// Everything needed to assemble one generator at one laser frequency.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub system: System,
    pub phonon: PhononParams,
    pub quantities: PhononQuantities,
    pub space: HilbertSpace,
    /// ω_L − ω_c in μeV.
    pub omega_l_rel: f64,
}

impl ModelSpec {
    pub fn new(
        system: System,
        phonon: PhononParams,
        quantities: PhononQuantities,
        space: HilbertSpace,
        omega_l_rel: f64,
    ) -> Self {
        ModelSpec {
            system,
            phonon,
            quantities,
            space,
            omega_l_rel,
        }
    }

    /// A phonon-free model.
    pub fn bare(system: System, space: HilbertSpace, omega_l_rel: f64) -> Self {
        Self::new(
            system,
            PhononParams::disabled(),
            PhononQuantities::none(),
            space,
            omega_l_rel,
        )
    }

    pub fn with_space(&self, space: HilbertSpace) -> Self {
        ModelSpec {
            space,
            ..self.clone()
        }
    }

    pub fn at(&self, omega_l_rel: f64) -> Self {
        ModelSpec {
            omega_l_rel,
            ..self.clone()
        }
    }

    /// Δ_xL = ω_x − ω_L, μeV.
    pub fn delta_xl(&self) -> f64 {
        self.system.omega_x_rel - self.omega_l_rel
    }

    /// Δ_cL = ω_c − ω_L, μeV.
    pub fn delta_cl(&self) -> f64 {
        -self.omega_l_rel
    }

    fn phonons_active(&self) -> bool {
        self.phonon.active()
    }

    /// Factor multiplying g in the Hamiltonian (⟨B⟩ or 1).
    pub fn coupling_factor(&self) -> f64 {
        if self.phonons_active() && self.phonon.coherent_renormalization {
            self.quantities.mean_b
        } else {
            1.0
        }
    }

    /// γ̃ = γ⟨B⟩² with the same ⟨B⟩ convention as the coupling, μeV.
    pub fn gamma_tilde(&self) -> f64 {
        let b = self.coupling_factor();
        self.system.gamma * b * b
    }

    /// (Γ⁺, Γ⁻) entering the Lindblad terms, μeV.
    pub fn lindblad_phonon_rates(&self) -> (f64, f64) {
        if self.phonons_active() && self.phonon.mode == PhononMode::EffectiveLindblad {
            (self.quantities.gamma_plus, self.quantities.gamma_minus)
        } else {
            (0.0, 0.0)
        }
    }
}

/// H in rad/ps.
pub fn build_hamiltonian(spec: &ModelSpec, ops: &OperatorSet) -> Result<Operator> {
    check_ops(spec, ops)?;
    let s = &spec.system;
    let g = to_rad_ps(s.g * spec.coupling_factor());
    let x_g = &(&ops.a_dag * &ops.sigma_minus) + &(&ops.sigma_plus * &ops.a);
    let terms = [
        ops.sigma11.scale(to_rad_ps(spec.delta_xl())),
        ops.number().scale(to_rad_ps(spec.delta_cl())),
        x_g.scale(g),
        (&ops.a + &ops.a_dag).scale(to_rad_ps(s.eta_c)),
    ];
    Ok(terms
        .iter()
        .fold(Operator::zeros(spec.space.dim()), |acc, t| &acc + t))
}

fn check_ops(spec: &ModelSpec, ops: &OperatorSet) -> Result<()> {
    if ops.a.dim() != spec.space.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.space.dim(),
            actual: ops.a.dim(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorPart {
    Hamiltonian,
    CavityDecay,
    Radiative,
    Dephasing,
    PhononPlus,
    PhononMinus,
    FullPolaron,
}

/// The assembled generator with its individual contributions.
#[derive(Debug, Clone)]
pub struct Generator {
    space: HilbertSpace,
    total: Superoperator,
    parts: Vec<(GeneratorPart, Superoperator)>,
}

impl Generator {
    /// Wraps an externally assembled map on `space`.
    pub fn from_superoperator(total: Superoperator, space: HilbertSpace) -> Result<Self> {
        if total.dim() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: total.dim(),
            });
        }
        Ok(Generator {
            space,
            total,
            parts: Vec::new(),
        })
    }

    pub fn superoperator(&self) -> &Superoperator {
        &self.total
    }

    pub fn parts(&self) -> &[(GeneratorPart, Superoperator)] {
        &self.parts
    }

    pub fn part(&self, which: GeneratorPart) -> Option<&Superoperator> {
        self.parts.iter().find(|(p, _)| *p == which).map(|(_, s)| s)
    }

    pub fn dim(&self) -> usize {
        self.total.dim()
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        self.total.apply(rho)
    }
}

pub fn build_generator(spec: &ModelSpec) -> Result<Generator> {
    let ops = OperatorSet::new(&spec.space);
    build_generator_with(spec, &ops)
}

pub fn build_generator_with(spec: &ModelSpec, ops: &OperatorSet) -> Result<Generator> {
    check_ops(spec, ops)?;
    let s = &spec.system;
    let (gamma_plus, gamma_minus) = spec.lindblad_phonon_rates();
    for (name, r) in [("gamma_ph_plus", gamma_plus), ("gamma_ph_minus", gamma_minus)] {
        if !(r >= 0.0) {
            return Err(Error::invalid(name, format!("rate must be >= 0, got {r}")));
        }
    }

    let h = build_hamiltonian(spec, ops)?;
    let mut parts = vec![(GeneratorPart::Hamiltonian, commutator_super(&h)?)];
    let mut lindblad = |part, rate_uev: f64, x: Operator| -> Result<()> {
        if rate_uev != 0.0 {
            let sup = dissipator(&x, RateStructure::Whole)?.scaled(to_rad_ps(rate_uev));
            parts.push((part, sup));
        }
        Ok(())
    };
    lindblad(GeneratorPart::CavityDecay, s.kappa_t, ops.a.clone())?;
    lindblad(GeneratorPart::Radiative, 0.5 * spec.gamma_tilde(), ops.sigma_minus.clone())?;
    lindblad(GeneratorPart::Dephasing, 0.5 * s.gamma_prime, ops.sigma11.clone())?;
    lindblad(GeneratorPart::PhononPlus, 0.5 * gamma_plus, &ops.sigma_plus * &ops.a)?;
    lindblad(GeneratorPart::PhononMinus, 0.5 * gamma_minus, &ops.a_dag * &ops.sigma_minus)?;

    if spec.phonons_active() && spec.phonon.mode == PhononMode::FullPolaronOracle {
        parts.push((
            GeneratorPart::FullPolaron,
            full_polaron_dissipator(spec, ops, &h)?,
        ));
    }

    let mut entries = Vec::new();
    for (_, sup) in &parts {
        entries.extend(sup.entries());
    }
    let total = Superoperator::from_triplets(spec.space.dim(), &entries);
    Ok(Generator {
        space: spec.space.clone(),
        total,
        parts,
    })
}

/// Born–Markov polaron dissipator
///
/// ```text
/// L_ph ρ = −Σ_{m=g,u} ( [X_m, Y_m ρ] + h.c. ),
/// Y_m = ∫₀^∞ dτ G_m(τ) e^{−iHτ} X_m e^{iHτ}
/// ```
///
/// with X_g = g(a†σ⁻ + σ⁺a), X_u = −ig(a†σ⁻ − σ⁺a). Y_m is evaluated in the
/// eigenbasis of H, where each matrix element picks up the one-sided
/// transform Ĝ_m(ε_j − ε_k).
pub fn build_full_polaron_dissipator(spec: &ModelSpec) -> Result<Superoperator> {
    let ops = OperatorSet::new(&spec.space);
    let h = build_hamiltonian(spec, &ops)?;
    full_polaron_dissipator(spec, &ops, &h)
}

fn full_polaron_dissipator(
    spec: &ModelSpec,
    ops: &OperatorSet,
    h: &Operator,
) -> Result<Superoperator> {
    let d = spec.space.dim();
    if spec.quantities.phi_table.is_none() || spec.system.g == 0.0 {
        return Ok(Superoperator::zero(d));
    }
    let g = to_rad_ps(spec.system.g);
    let down = &ops.a_dag * &ops.sigma_minus;
    let up = &ops.sigma_plus * &ops.a;
    let x_g = (&down + &up).scale(g);
    let x_u = (&down - &up).scale(Complex64::new(0.0, -g));

    let (eps, u) = h.hermitian_eigen()?;
    let u_dag = u.adjoint();
    let xg_eig = &(&u_dag * &x_g) * &u;
    let xu_eig = &(&u_dag * &x_u) * &u;
    let mut yg_eig = Operator::zeros(d);
    let mut yu_eig = Operator::zeros(d);
    for j in 0..d {
        for k in 0..d {
            let (gg, gu) = spec.quantities.green_transforms(eps[j] - eps[k])?;
            yg_eig.set(j, k, xg_eig.get(j, k) * gg);
            yu_eig.set(j, k, xu_eig.get(j, k) * gu);
        }
    }

    let id = Operator::identity(d).nonzeros();
    let mut entries: Vec<Triplet<usize, usize, Complex64>> = Vec::new();
    let minus = Complex64::new(-1.0, 0.0);
    let plus = Complex64::new(1.0, 0.0);
    for (x, y_eig) in [(&x_g, &yg_eig), (&x_u, &yu_eig)] {
        let y = &(&u * y_eig) * &u_dag;
        let y_dag = y.adjoint();
        let xn = x.nonzeros();
        // −(XYρ − YρX + ρY†X − XρY†)
        push_sandwich(&mut entries, d, &(x * &y).nonzeros(), &id, minus);
        push_sandwich(&mut entries, d, &y.nonzeros(), &xn, plus);
        push_sandwich(&mut entries, d, &id, &(&y_dag * x).nonzeros(), minus);
        push_sandwich(&mut entries, d, &xn, &y_dag.nonzeros(), plus);
    }
    Ok(Superoperator::from_triplets(d, &entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::test_util::*;
    use crate::params::{SystemParams, UNITS};
    use rand::SeedableRng;

    fn fig2(space: HilbertSpace, omega: f64) -> ModelSpec {
        ModelSpec::bare(
            SystemParams::waveguide_cavity(20.0, 0.5).validate().unwrap(),
            space,
            omega,
        )
    }

    fn fig6(mode: PhononMode, n_max: usize, omega: f64) -> ModelSpec {
        let system = SystemParams::waveguide_cavity(120.0, 0.15).validate().unwrap();
        let mut phonon = PhononParams::inas(20.0);
        phonon.mode = mode;
        let q = PhononQuantities::compute(&phonon, system.g, system.delta_cx()).unwrap();
        ModelSpec::new(system, phonon, q, HilbertSpace::full(n_max).unwrap(), omega)
    }

    fn rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(3)
    }

    #[test]
    fn first_doublet_energies() {
        let mut p = SystemParams::waveguide_cavity(20.0, 0.0);
        p.eta_c_over_g = None;
        let sys = p.validate().unwrap();
        let spec = ModelSpec::bare(sys, HilbertSpace::full(3).unwrap(), -7.0);
        let ops = OperatorSet::new(&spec.space);
        let h = build_hamiltonian(&spec, &ops).unwrap();
        let vals = h.hermitian_eigenvalues().unwrap();
        let delta = to_rad_ps(7.0);
        let g = to_rad_ps(20.0);
        for target in [delta - g, delta + g] {
            assert!(vals.iter().any(|v| (v - target).abs() < 1e-12), "{target} not in {vals:?}");
        }
    }

    #[test]
    fn uncoupled_hamiltonian_is_block_diagonal() {
        let sys = SystemParams::waveguide_cavity(20.0, 0.5).validate().unwrap().with_g(0.0);
        let spec = ModelSpec::bare(sys.with_eta(5.0), HilbertSpace::full(4).unwrap(), 3.0);
        let ops = OperatorSet::new(&spec.space);
        let h = build_hamiltonian(&spec, &ops).unwrap();
        for (i, si) in spec.space.labels().iter().enumerate() {
            for (j, sj) in spec.space.labels().iter().enumerate() {
                if si.excited != sj.excited {
                    assert_eq!(h.get(i, j), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn coupling_is_renormalized_by_mean_b() {
        let spec = fig6(PhononMode::EffectiveLindblad, 3, 0.0);
        assert!((spec.quantities.mean_b - 0.73).abs() <= 0.01);
        let ops = OperatorSet::new(&spec.space);
        let h = build_hamiltonian(&spec, &ops).unwrap();
        let e0 = spec.space.index_of(true, 0).unwrap();
        let g1 = spec.space.index_of(false, 1).unwrap();
        let expected = spec.quantities.mean_b * 120.0 / UNITS.hbar;
        assert!((h.get(e0, g1).re - expected).abs() < 1e-14);
        assert!((spec.gamma_tilde() - spec.quantities.mean_b.powi(2)).abs() < 1e-15);
    }

    #[test]
    fn rates_zero_leaves_only_commutator() {
        let p = SystemParams {
            kappa_0: 0.0,
            kappa_c: 0.0,
            gamma: 0.0,
            gamma_prime: 0.0,
            eta_c_over_g: None,
            ..SystemParams::waveguide_cavity(20.0, 0.0)
        };
        let spec = ModelSpec::bare(p.validate().unwrap(), HilbertSpace::full(3).unwrap(), 2.0);
        let gen = build_generator(&spec).unwrap();
        assert_eq!(gen.parts().len(), 1);
        let ops = OperatorSet::new(&spec.space);
        let h = build_hamiltonian(&spec, &ops).unwrap();
        let mut r = rng();
        for _ in 0..5 {
            let rho = random_operator(&mut r, spec.space.dim());
            let direct = h.commutator(&rho).scale(Complex64::new(0.0, -1.0));
            assert!((&gen.apply(&rho) - &direct).max_abs() < 1e-14);
        }
    }

    #[test]
    fn bare_cavity_generator() {
        let p = SystemParams {
            g: 0.0,
            gamma: 0.0,
            gamma_prime: 0.0,
            eta_c: Some(3.0),
            eta_c_over_g: None,
            ..SystemParams::waveguide_cavity(0.0, 0.0)
        };
        let spec = ModelSpec::bare(p.validate().unwrap(), HilbertSpace::full(3).unwrap(), 10.0);
        let gen = build_generator(&spec).unwrap();
        let dense = gen.superoperator().to_dense();
        let eig = dense.eigenvalues().unwrap();
        let smallest = eig.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        assert!(smallest < 1e-10, "smallest |λ| = {smallest}");

        let ops = OperatorSet::new(&spec.space);
        let mut r = rng();
        let rho = random_density(&mut r, spec.space.dim(), spec.space.dim() - 2);
        let a_avg = ops.a.expectation(&rho);
        let da = ops.a.expectation(&gen.apply(&rho));
        let kappa = to_rad_ps(62.5);
        let expected = -(Complex64::new(kappa, to_rad_ps(spec.delta_cl()))) * a_avg
            - Complex64::new(0.0, to_rad_ps(3.0));
        assert!((da - expected).norm() < 1e-12, "{da} vs {expected}");
    }

    #[test]
    fn fig2_generator_is_trace_annihilating_and_hermiticity_preserving() {
        let spec = fig2(HilbertSpace::full(6).unwrap(), 15.0);
        let gen = build_generator(&spec).unwrap();
        assert_eq!(gen.dim(), 14);
        assert!(gen.superoperator().trace_defect() < 1e-10);
        let mut r = rng();
        for _ in 0..10 {
            let rho = random_operator(&mut r, gen.dim());
            assert!(gen.apply(&rho).trace().norm() < 1e-10);
            let herm = random_density(&mut r, gen.dim(), gen.dim());
            assert!(gen.apply(&herm).hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn disabled_phonons_do_not_leak_into_generator() {
        let system = SystemParams::waveguide_cavity(60.0, 0.25).validate().unwrap();
        let space = HilbertSpace::full(4).unwrap();
        let mut a = PhononParams::inas(40.0);
        a.enabled = false;
        let mut b = PhononParams::disabled();
        b.alpha_p = 3.0;
        let qa = PhononQuantities::compute(&a, 60.0, 0.0).unwrap();
        let qb = PhononQuantities::compute(&b, 60.0, 0.0).unwrap();
        let ga = build_generator(&ModelSpec::new(system.clone(), a, qa, space.clone(), 4.0)).unwrap();
        let gb = build_generator(&ModelSpec::new(system, b, qb, space, 4.0)).unwrap();
        let diff = ga.superoperator().to_dense() - gb.superoperator().to_dense();
        assert_eq!(diff.norm_max(), 0.0);
    }

    #[test]
    fn phonon_lindblad_terms_present() {
        let spec = fig6(PhononMode::EffectiveLindblad, 3, 0.0);
        let gen = build_generator(&spec).unwrap();
        assert!(gen.part(GeneratorPart::PhononPlus).is_some());
        assert!(gen.part(GeneratorPart::PhononMinus).is_some());
        assert!(gen.part(GeneratorPart::FullPolaron).is_none());
        assert!(gen.superoperator().trace_defect() < 1e-10);
    }

    #[test]
    fn full_polaron_dissipator_structure() {
        let spec = fig6(PhononMode::FullPolaronOracle, 3, 40.0);
        let sup = build_full_polaron_dissipator(&spec).unwrap();
        let mut r = rng();
        for _ in 0..5 {
            let rho = random_operator(&mut r, spec.space.dim());
            assert!(sup.apply(&rho).trace().norm() < 1e-8);
            let herm = random_density(&mut r, spec.space.dim(), spec.space.dim());
            assert!(sup.apply(&herm).hermiticity_defect() < 1e-10);
        }
        let gen = build_generator(&spec).unwrap();
        assert!(gen.part(GeneratorPart::FullPolaron).is_some());
        assert!(gen.part(GeneratorPart::PhononPlus).is_none());

        let mut zero = spec.clone();
        zero.phonon.alpha_p = 0.0;
        zero.quantities = PhononQuantities::compute(&zero.phonon, 120.0, 0.0).unwrap();
        let sup = build_full_polaron_dissipator(&zero).unwrap();
        assert!(sup.max_abs() < 1e-15);
    }
}
