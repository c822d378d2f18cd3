//! Dot–cavity Hilbert spaces, operator matrices and superoperator algebra.
//!
//! Density matrices are vectorized by stacking columns:
//! `vec(ρ)[i + j·d] = ρ[i, j]`. Under this convention
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceMode {
    /// Fock states 0..=n_max for the cavity times the two dot levels.
    Full { n_max: usize },
    /// {|g,0⟩, |g,1⟩, |e,0⟩}: the single-quantum (weak excitation) model.
    Wea3,
}

/// One product state |dot, n⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisState {
    pub excited: bool,
    pub photons: usize,
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dot = if self.excited { 'e' } else { 'g' };
        write!(f, "|{dot},{}⟩", self.photons)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpace {
    mode: SpaceMode,
    labels: Vec<BasisState>,
}

impl HilbertSpace {
    /// Full mode orders the basis |g,0⟩, |e,0⟩, |g,1⟩, |e,1⟩, … so that every
    /// operator used here stays within a narrow band.
    pub fn new(mode: SpaceMode) -> Result<Self> {
        let labels = match mode {
            SpaceMode::Full { n_max } => {
                if n_max < 1 {
                    return Err(Error::invalid("n_max", "must be at least 1"));
                }
                (0..=n_max)
                    .flat_map(|n| {
                        [false, true].map(|excited| BasisState {
                            excited,
                            photons: n,
                        })
                    })
                    .collect()
            }
            SpaceMode::Wea3 => vec![
                BasisState { excited: false, photons: 0 },
                BasisState { excited: false, photons: 1 },
                BasisState { excited: true, photons: 0 },
            ],
        };
        Ok(HilbertSpace { mode, labels })
    }

    pub fn full(n_max: usize) -> Result<Self> {
        Self::new(SpaceMode::Full { n_max })
    }

    pub fn wea3() -> Self {
        Self::new(SpaceMode::Wea3).expect("static basis")
    }

    pub fn mode(&self) -> SpaceMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Highest photon number present in the basis.
    pub fn n_max(&self) -> usize {
        match self.mode {
            SpaceMode::Full { n_max } => n_max,
            SpaceMode::Wea3 => 1,
        }
    }

    pub fn labels(&self) -> &[BasisState] {
        &self.labels
    }

    pub fn index_of(&self, excited: bool, photons: usize) -> Option<usize> {
        self.labels
            .iter()
            .position(|s| s.excited == excited && s.photons == photons)
    }
}

/// Dense square complex matrix on a [`HilbertSpace`].
///
/// Dimensions here stay below a few hundred, so operators are kept dense;
/// only superoperators are stored sparse.
#[derive(Clone, PartialEq)]
pub struct Operator(Mat<C64>);

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({}x{})", self.dim(), self.dim())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator(Mat::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Operator(Mat::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Operator(Mat::from_fn(dim, dim, f))
    }

    /// Projector |ψ⟩⟨ψ| onto basis state `i`.
    pub fn projector(dim: usize, i: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.set(i, i, ONE);
        m
    }

    pub fn from_mat(m: Mat<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                actual: m.ncols(),
            });
        }
        Ok(Operator(m))
    }

    pub fn as_mat(&self) -> &Mat<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.0[(i, j)] = v;
    }

    pub fn adjoint(&self) -> Self {
        Operator(self.0.adjoint().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Operator(self.0.transpose().to_owned())
    }

    pub fn scale(&self, s: impl Into<C64>) -> Self {
        let s = s.into();
        Operator::from_fn(self.dim(), |i, j| self.get(i, j) * s)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// Tr(self · ρ).
    pub fn expectation(&self, rho: &Operator) -> C64 {
        let d = self.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self.get(i, j) * rho.get(j, i);
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                m = m.max(self.get(i, j).norm());
            }
        }
        m
    }

    /// max |A − A†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                m = m.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        m
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        Operator::from_fn(self.dim(), |i, j| 0.5 * (self.get(i, j) + self.get(j, i).conj()))
    }

    /// Nonzero entries as (row, col, value).
    pub fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let d = self.dim();
        let mut out = Vec::new();
        for j in 0..d {
            for i in 0..d {
                let v = self.get(i, j);
                if v != ZERO {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.0
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))
    }

    /// Eigen-decomposition of a Hermitian operator: (ε ascending, U) with
    /// A = U diag(ε) U†.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, Operator)> {
        let evd = self
            .0
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let values = (0..self.dim()).map(|i| s[i].re).collect();
        Ok((values, Operator(evd.U().to_owned())))
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

/// The standard operator set on a space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub a: Operator,
    pub a_dag: Operator,
    pub sigma_minus: Operator,
    pub sigma_plus: Operator,
    pub sigma11: Operator,
    pub identity: Operator,
}

impl OperatorSet {
    pub fn new(space: &HilbertSpace) -> Self {
        let d = space.dim();
        let mut a = Operator::zeros(d);
        let mut sigma_minus = Operator::zeros(d);
        for (col, s) in space.labels().iter().enumerate() {
            if s.photons > 0 {
                if let Some(row) = space.index_of(s.excited, s.photons - 1) {
                    a.set(row, col, C64::new((s.photons as f64).sqrt(), 0.0));
                }
            }
            if s.excited {
                if let Some(row) = space.index_of(false, s.photons) {
                    sigma_minus.set(row, col, ONE);
                }
            }
        }
        let a_dag = a.adjoint();
        let sigma_plus = sigma_minus.adjoint();
        let sigma11 = &sigma_plus * &sigma_minus;
        OperatorSet {
            a,
            a_dag,
            sigma_minus,
            sigma_plus,
            sigma11,
            identity: Operator::identity(d),
        }
    }

    pub fn number(&self) -> Operator {
        &self.a_dag * &self.a
    }
}

/// Column-stacking vectorization.
pub fn vectorize(rho: &Operator) -> Vec<C64> {
    let d = rho.dim();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(rho.get(i, j));
        }
    }
    v
}

pub fn unvectorize(v: &[C64], dim: usize) -> Result<Operator> {
    if v.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            actual: v.len(),
        });
    }
    Ok(Operator::from_fn(dim, |i, j| v[i + j * dim]))
}

/// Linear map on vectorized d×d matrices, stored as a sparse d²×d² matrix.
#[derive(Clone)]
pub struct Superoperator {
    dim: usize,
    matrix: SparseColMat<usize, C64>,
}

impl fmt::Debug for Superoperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Superoperator(dim={}, nnz={})", self.dim, self.nnz())
    }
}

impl Superoperator {
    /// Builds from (row, col, value) entries; duplicates are summed.
    pub fn from_triplets(dim: usize, entries: &[Triplet<usize, usize, C64>]) -> Self {
        let n = dim * dim;
        let matrix = SparseColMat::try_new_from_triplets(n, n, entries)
            .expect("triplet indices are generated in range");
        Superoperator { dim, matrix }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_triplets(dim, &[])
    }

    /// ρ ↦ s·AρB, i.e. s·(Bᵀ ⊗ A).
    pub fn sandwich(left: &Operator, right: &Operator, s: C64) -> Result<Self> {
        let d = left.dim();
        if right.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: right.dim(),
            });
        }
        let mut entries = Vec::new();
        push_sandwich(&mut entries, d, &left.nonzeros(), &right.nonzeros(), s);
        Ok(Self::from_triplets(d, &entries))
    }

    /// Hilbert-space dimension d (the matrix is d² × d²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.matrix.compute_nnz()
    }

    pub fn matrix(&self) -> &SparseColMat<usize, C64> {
        &self.matrix
    }

    pub fn entries(&self) -> Vec<Triplet<usize, usize, C64>> {
        self.matrix
            .as_ref()
            .triplet_iter()
            .map(|t| Triplet::new(t.row, t.col, *t.val))
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let entries: Vec<_> = self
            .entries()
            .into_iter()
            .map(|t| Triplet::new(t.row, t.col, t.val * s))
            .collect();
        Self::from_triplets(self.dim, &entries)
    }

    pub fn try_add(&self, other: &Superoperator) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let mut entries = self.entries();
        entries.extend(other.entries());
        Ok(Self::from_triplets(self.dim, &entries))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix
            .as_ref()
            .triplet_iter()
            .fold(0.0f64, |m, t| m.max(t.val.norm()))
    }

    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let m = self.matrix.as_ref();
        let mut y = vec![ZERO; m.nrows()];
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (i, v) in m.row_idx_of_col(j).zip(m.val_of_col(j)) {
                y[i] += v * xj;
            }
        }
        y
    }

    pub fn apply(&self, rho: &Operator) -> Operator {
        unvectorize(&self.apply_vec(&vectorize(rho)), self.dim).expect("matching dimensions")
    }

    /// max_c |Σ_i L[(i,i), c]|: zero when Tr(L ρ) = 0 for every ρ.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let m = self.matrix.as_ref();
        let mut worst = 0.0f64;
        for c in 0..d * d {
            let mut s = ZERO;
            for (r, v) in m.row_idx_of_col(c).zip(m.val_of_col(c)) {
                if r % (d + 1) == 0 {
                    s += v;
                }
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    pub fn to_dense(&self) -> Mat<C64> {
        self.matrix.to_dense()
    }
}

pub(crate) fn push_sandwich(
    entries: &mut Vec<Triplet<usize, usize, C64>>,
    d: usize,
    left: &[(usize, usize, C64)],
    right: &[(usize, usize, C64)],
    s: C64,
) {
    // (AρB)_{ij} = Σ_{kl} A_{ik} ρ_{kl} B_{lj}
    for &(i, k, av) in left {
        for &(l, j, bv) in right {
            entries.push(Triplet::new(i + j * d, k + l * d, s * av * bv));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateStructure {
    /// ½(2XρX† − X†Xρ − ρX†X)
    Half,
    /// 2XρX† − X†Xρ − ρX†X
    Whole,
}

/// ρ ↦ s(2XρX† − X†Xρ − ρX†X); the physical rate is applied by the caller.
pub fn dissipator(x: &Operator, structure: RateStructure) -> Result<Superoperator> {
    let d = x.dim();
    let s = match structure {
        RateStructure::Half => 0.5,
        RateStructure::Whole => 1.0,
    };
    let xd = x.adjoint();
    let xdx = &xd * x;
    let id = Operator::identity(d).nonzeros();
    let xdx_nz = xdx.nonzeros();
    let mut entries = Vec::new();
    push_sandwich(&mut entries, d, &x.nonzeros(), &xd.nonzeros(), C64::new(2.0 * s, 0.0));
    push_sandwich(&mut entries, d, &xdx_nz, &id, C64::new(-s, 0.0));
    push_sandwich(&mut entries, d, &id, &xdx_nz, C64::new(-s, 0.0));
    Ok(Superoperator::from_triplets(d, &entries))
}

/// ρ ↦ −i[H, ρ], H in rad/ps.
pub fn commutator_super(h: &Operator) -> Result<Superoperator> {
    let deviation = h.hermiticity_defect();
    if deviation > 1e-10 * h.max_abs().max(1.0) {
        return Err(Error::NonHermitian { deviation });
    }
    let d = h.dim();
    let id = Operator::identity(d).nonzeros();
    let hn = h.nonzeros();
    let mut entries = Vec::new();
    push_sandwich(&mut entries, d, &hn, &id, C64::new(0.0, -1.0));
    push_sandwich(&mut entries, d, &id, &hn, C64::new(0.0, 1.0));
    Ok(Superoperator::from_triplets(d, &entries))
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use rand::Rng;

    pub fn random_operator(rng: &mut impl Rng, d: usize) -> Operator {
        Operator::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    /// Random density matrix supported on the first `support` basis states.
    pub fn random_density(rng: &mut impl Rng, d: usize, support: usize) -> Operator {
        let m = Operator::from_fn(d, |i, j| {
            if i < support && j < support {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                ZERO
            }
        });
        let rho = &m * &m.adjoint();
        let tr = rho.trace();
        rho.scale(tr.inv())
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::*;
    use super::*;
    use rand::SeedableRng;

    fn rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(11)
    }

    #[test]
    fn dimensions() {
        assert_eq!(HilbertSpace::full(1).unwrap().dim(), 4);
        assert_eq!(HilbertSpace::full(30).unwrap().dim(), 62);
        assert_eq!(HilbertSpace::wea3().dim(), 3);
        assert!(HilbertSpace::full(0).is_err());
        let w = HilbertSpace::wea3();
        let l = w.labels();
        assert_eq!(
            l,
            &[
                BasisState { excited: false, photons: 0 },
                BasisState { excited: false, photons: 1 },
                BasisState { excited: true, photons: 0 }
            ]
        );
    }

    #[test]
    fn matrix_elements() {
        let s = HilbertSpace::full(6).unwrap();
        let ops = OperatorSet::new(&s);
        let g0 = s.index_of(false, 0).unwrap();
        let g1 = s.index_of(false, 1).unwrap();
        let g4 = s.index_of(false, 4).unwrap();
        let g5 = s.index_of(false, 5).unwrap();
        assert_eq!(ops.a.get(g0, g1), ONE);
        assert!((ops.a.get(g4, g5).re - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(ops.a_dag, ops.a.adjoint());
        assert_eq!(ops.sigma11, &ops.sigma_plus * &ops.sigma_minus);
        // [a, a†] = 1 below the top Fock level
        let comm = ops.a.commutator(&ops.a_dag);
        for (i, st) in s.labels().iter().enumerate() {
            if st.photons < 6 {
                assert!((comm.get(i, i) - ONE).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn wea3_operators() {
        let s = HilbertSpace::wea3();
        let ops = OperatorSet::new(&s);
        let n = ops.number();
        let diag: Vec<f64> = (0..3).map(|i| n.get(i, i).re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 0.0]);
        assert_eq!(ops.a.nonzeros(), vec![(0, 1, ONE)]);
        assert_eq!(ops.sigma_minus.nonzeros(), vec![(0, 2, ONE)]);
    }

    #[test]
    fn identity_dissipator_is_zero() {
        let d = dissipator(&Operator::identity(5), RateStructure::Whole).unwrap();
        assert_eq!(d.max_abs(), 0.0);
    }

    #[test]
    fn dissipator_is_traceless() {
        let s = HilbertSpace::full(4).unwrap();
        let ops = OperatorSet::new(&s);
        let mut r = rng();
        for x in [&ops.a, &ops.sigma_minus, &(&ops.sigma_plus * &ops.a)] {
            let sup = dissipator(x, RateStructure::Half).unwrap();
            for _ in 0..10 {
                let rho = random_operator(&mut r, s.dim());
                assert!(sup.apply(&rho).trace().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cavity_dissipator_hand_evaluation() {
        let s = HilbertSpace::full(2).unwrap();
        let ops = OperatorSet::new(&s);
        let g1 = s.index_of(false, 1).unwrap();
        let g2 = s.index_of(false, 2).unwrap();
        let rho = Operator::projector(s.dim(), g2);
        let out = dissipator(&ops.a, RateStructure::Whole).unwrap().apply(&rho);
        let mut expected = Operator::zeros(s.dim());
        expected.set(g1, g1, C64::new(4.0, 0.0));
        expected.set(g2, g2, C64::new(-4.0, 0.0));
        assert!((&out - &expected).max_abs() < 1e-14);
    }

    #[test]
    fn commutator_properties() {
        let d = 6;
        let h = Operator::from_fn(d, |i, j| if i == j { C64::new(i as f64, 0.0) } else { ZERO });
        let rho = Operator::from_fn(d, |i, j| if i == j { C64::new(0.1 * i as f64, 0.0) } else { ZERO });
        let sup = commutator_super(&h).unwrap();
        assert_eq!(sup.apply(&rho).max_abs(), 0.0);
        let mut r = rng();
        let hr = random_operator(&mut r, d).hermitian_part();
        let sup = commutator_super(&hr).unwrap();
        let rho = random_density(&mut r, d, d);
        assert!(sup.apply(&rho).trace().norm() < 1e-13);
        let bad = random_operator(&mut r, d);
        assert!(matches!(commutator_super(&bad), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn heisenberg_identity_for_driven_cavity() {
        let (delta, eta) = (0.7, 0.3);
        let s = HilbertSpace::full(6).unwrap();
        let ops = OperatorSet::new(&s);
        let h = &ops.number().scale(delta) + &(&ops.a + &ops.a_dag).scale(eta);
        let sup = commutator_super(&h).unwrap();
        let mut r = rng();
        // keep support below the top Fock level where [a, a†] = 1 holds
        let rho = random_density(&mut r, s.dim(), s.dim() - 2);
        let lhs = ops.a.expectation(&sup.apply(&rho));
        let a_avg = ops.a.expectation(&rho);
        let rhs = C64::new(0.0, -delta) * a_avg + C64::new(0.0, -eta);
        assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn vectorization_convention() {
        let mut r = rng();
        let d = 4;
        let (a, b, rho) = (
            random_operator(&mut r, d),
            random_operator(&mut r, d),
            random_operator(&mut r, d),
        );
        assert_eq!(unvectorize(&vectorize(&rho), d).unwrap(), rho);
        let direct = &(&a * &rho) * &b;
        let via = Superoperator::sandwich(&a, &b, ONE).unwrap().apply(&rho);
        assert!((&direct - &via).max_abs() < 1e-12);
        // explicitly (Bᵀ ⊗ A)
        let sup = Superoperator::sandwich(&a, &b, ONE).unwrap().to_dense();
        for (i, j, k, l) in [(0, 1, 2, 3), (3, 3, 1, 0), (2, 0, 0, 2)] {
            let expected = b.get(l, j) * a.get(i, k);
            assert!((sup[(i + j * d, k + l * d)] - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn eigen_roundtrip() {
        let mut r = rng();
        let h = random_operator(&mut r, 5).hermitian_part();
        let (vals, u) = h.hermitian_eigen().unwrap();
        let diag = Operator::from_fn(5, |i, j| if i == j { C64::new(vals[i], 0.0) } else { ZERO });
        let back = &(&u * &diag) * &u.adjoint();
        assert!((&back - &h).max_abs() < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}
