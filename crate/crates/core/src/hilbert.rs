//! Truncated-Fock-space numeric engine: states, operators, canonical
//! constructors and scalar diagnostics used by every other module.
//!
//! # Basis ordering
//!
//! The product basis is indexed row-major with the electronic factor (when
//! present) slowest, then the vibrational modes in declared order, so the
//! Fock index of the *last* declared mode varies fastest:
//!
//! ```text
//! index = ((e · d₀ + n₀) · d₁ + n₁) · d₂ + …      e ∈ {0 = g, 1 = e}
//! ```
//!
//! All CSV outputs index basis states by this ordering.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::C64;

/// Ordered list of per-mode Fock truncation dimensions, plus an optional
/// two-level electronic factor `{|g⟩, |e⟩}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpace {
    dims: Vec<usize>,
    electronic: bool,
}

impl ModeSpace {
    /// Vibrational modes only.
    pub fn new(dims: &[usize]) -> Result<Self> {
        Self::build(dims, false)
    }

    /// Vibrational modes with a two-level electronic factor.
    pub fn with_electronic(dims: &[usize]) -> Result<Self> {
        Self::build(dims, true)
    }

    fn build(dims: &[usize], electronic: bool) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("a ModeSpace needs at least one mode".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidArgument(format!("every mode dimension must be >= 2, got {d}")));
        }
        Ok(Self { dims: dims.to_vec(), electronic })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn has_electronic(&self) -> bool {
        self.electronic
    }

    /// Total dimension: product of mode dimensions, × 2 if electronic.
    pub fn total_dim(&self) -> usize {
        let d: usize = self.dims.iter().product();
        if self.electronic {
            2 * d
        } else {
            d
        }
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.dims.len() {
            Err(Error::ModeOutOfRange { mode, n_modes: self.dims.len() })
        } else {
            Ok(())
        }
    }

    /// Flat index of a basis state given the electronic index (0 = g, 1 = e)
    /// and per-mode Fock indices.
    pub fn index_of(&self, electronic: usize, fock: &[usize]) -> usize {
        assert_eq!(fock.len(), self.dims.len());
        let mut idx = if self.electronic { electronic } else { 0 };
        for (n, d) in fock.iter().zip(&self.dims) {
            debug_assert!(n < d);
            idx = idx * d + n;
        }
        idx
    }

    /// Truncation adequacy guard: requires `|alpha|² ≤ dim/4` so the
    /// coherent tail mass beyond the truncation stays below ~1e-4.
    pub fn check_truncation(&self, mode: usize, alpha: C64) -> Result<()> {
        self.check_mode(mode)?;
        let dim = self.dims[mode];
        let alpha_sq = alpha.norm_sqr();
        let limit = dim as f64 / 4.0;
        if alpha_sq > limit {
            Err(Error::TruncationGuard { alpha_sq, limit, dim })
        } else {
            Ok(())
        }
    }

    fn check_same(&self, other: &ModeSpace) -> Result<()> {
        if self != other {
            Err(Error::DimensionMismatch(format!("{:?} vs {:?}", self, other)))
        } else {
            Ok(())
        }
    }
}

/// Pure state: complex amplitudes over the truncated product basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub space: ModeSpace,
    pub amps: CVec,
}

impl StateVector {
    pub fn new(space: ModeSpace, amps: CVec) -> Result<Self> {
        if amps.len() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "amplitude vector of length {} on space of total dimension {}",
                amps.len(),
                space.total_dim()
            )));
        }
        Ok(Self { space, amps })
    }

    /// All modes (and the electronic factor) in their ground states.
    pub fn vacuum(space: &ModeSpace) -> Self {
        let mut amps = CVec::zeros(space.total_dim());
        amps[0] = C64::from(1.0);
        Self { space: space.clone(), amps }
    }

    /// Product Fock basis state.
    pub fn basis_state(space: &ModeSpace, electronic: usize, fock: &[usize]) -> Self {
        let mut amps = CVec::zeros(space.total_dim());
        amps[space.index_of(electronic, fock)] = C64::from(1.0);
        Self { space: space.clone(), amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.amps /= C64::from(n);
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Density matrix |ψ⟩⟨ψ|.
    pub fn to_density(&self) -> DensityMatrix {
        let mat = &self.amps * self.amps.adjoint();
        DensityMatrix { space: self.space.clone(), mat }
    }
}

/// Hermitian unit-trace matrix over the truncated product basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub space: ModeSpace,
    pub mat: CMat,
}

impl DensityMatrix {
    pub fn new(space: ModeSpace, mat: CMat) -> Result<Self> {
        if mat.nrows() != space.total_dim() || mat.ncols() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on space of total dimension {}",
                mat.nrows(),
                mat.ncols(),
                space.total_dim()
            )));
        }
        Ok(Self { space, mat })
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        let mut p = C64::from(0.0);
        for i in 0..self.mat.nrows() {
            for j in 0..self.mat.ncols() {
                p += self.mat[(i, j)] * self.mat[(j, i)];
            }
        }
        p.re
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.mat)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.mat)
    }
}

/// Dense operator on the truncated product basis.
#[derive(Debug, Clone)]
pub struct Operator {
    pub space: ModeSpace,
    pub mat: CMat,
}

impl Operator {
    pub fn new(space: ModeSpace, mat: CMat) -> Result<Self> {
        if mat.nrows() != space.total_dim() || mat.ncols() != space.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on space of total dimension {}",
                mat.nrows(),
                mat.ncols(),
                space.total_dim()
            )));
        }
        Ok(Self { space, mat })
    }

    pub fn identity(space: &ModeSpace) -> Self {
        Self { space: space.clone(), mat: CMat::identity(space.total_dim(), space.total_dim()) }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.space.check_same(&psi.space)?;
        Ok(StateVector { space: psi.space.clone(), amps: &self.mat * &psi.amps })
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space.clone(), mat: self.mat.adjoint() }
    }

    pub fn expectation(&self, psi: &StateVector) -> C64 {
        (psi.amps.adjoint() * &self.mat * &psi.amps)[(0, 0)]
    }
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Embed a single-mode matrix into the full product space.
fn embed_mode(space: &ModeSpace, mode: usize, op: &CMat) -> CMat {
    let mut full = if space.has_electronic() { CMat::identity(2, 2) } else { CMat::identity(1, 1) };
    for (m, &d) in space.dims().iter().enumerate() {
        let factor = if m == mode { op.clone() } else { CMat::identity(d, d) };
        full = kron(&full, &factor);
    }
    full
}

/// Embed a two-level matrix acting on the electronic factor.
fn embed_electronic(space: &ModeSpace, op: &CMat) -> CMat {
    let d: usize = space.dims().iter().product();
    kron(op, &CMat::identity(d, d))
}

fn single_mode_annihilation(dim: usize) -> CMat {
    let mut a = CMat::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    a
}

/// Annihilation operator `b̂` of one mode, embedded in the full space:
/// `⟨n-1|b̂|n⟩ = √n`.
pub fn annihilation(space: &ModeSpace, mode: usize) -> Result<Operator> {
    space.check_mode(mode)?;
    let a = single_mode_annihilation(space.dims()[mode]);
    Operator::new(space.clone(), embed_mode(space, mode, &a))
}

/// Creation operator `b̂†` of one mode.
pub fn creation(space: &ModeSpace, mode: usize) -> Result<Operator> {
    Ok(annihilation(space, mode)?.adjoint())
}

/// Number operator `n̂ = b̂†b̂` of one mode.
pub fn number(space: &ModeSpace, mode: usize) -> Result<Operator> {
    space.check_mode(mode)?;
    let dim = space.dims()[mode];
    let mut n = CMat::zeros(dim, dim);
    for k in 0..dim {
        n[(k, k)] = C64::from(k as f64);
    }
    Operator::new(space.clone(), embed_mode(space, mode, &n))
}

/// Parity operator `(-1)^n̂` of one mode.
pub fn parity_operator(space: &ModeSpace, mode: usize) -> Result<Operator> {
    space.check_mode(mode)?;
    let dim = space.dims()[mode];
    let mut p = CMat::zeros(dim, dim);
    for k in 0..dim {
        p[(k, k)] = C64::from(if k % 2 == 0 { 1.0 } else { -1.0 });
    }
    Operator::new(space.clone(), embed_mode(space, mode, &p))
}

fn require_electronic(space: &ModeSpace) -> Result<()> {
    if !space.has_electronic() {
        return Err(Error::InvalidArgument("space has no electronic factor".into()));
    }
    Ok(())
}

/// Electronic raising operator `σ̂₊ = |e⟩⟨g|`.
pub fn sigma_plus(space: &ModeSpace) -> Result<Operator> {
    require_electronic(space)?;
    let mut s = CMat::zeros(2, 2);
    s[(1, 0)] = C64::from(1.0);
    Operator::new(space.clone(), embed_electronic(space, &s))
}

/// Electronic lowering operator `σ̂₋ = |g⟩⟨e|`.
pub fn sigma_minus(space: &ModeSpace) -> Result<Operator> {
    Ok(sigma_plus(space)?.adjoint())
}

/// `σ̂_z = |e⟩⟨e| - |g⟩⟨g|`.
pub fn sigma_z(space: &ModeSpace) -> Result<Operator> {
    require_electronic(space)?;
    let mut s = CMat::zeros(2, 2);
    s[(0, 0)] = C64::from(-1.0);
    s[(1, 1)] = C64::from(1.0);
    Operator::new(space.clone(), embed_electronic(space, &s))
}

/// Projector onto the electronic level `e_idx` (0 = g, 1 = e).
pub fn electronic_projector(space: &ModeSpace, e_idx: usize) -> Result<Operator> {
    require_electronic(space)?;
    let mut s = CMat::zeros(2, 2);
    s[(e_idx, e_idx)] = C64::from(1.0);
    Operator::new(space.clone(), embed_electronic(space, &s))
}

/// Normalized truncated coherent state `e^{-|α|²/2} Σ αⁿ/√n! |n⟩` on one
/// mode, all other modes in vacuum.
///
/// Fails the truncation guard when `|α|² > dim/4`.
pub fn coherent_state(space: &ModeSpace, mode: usize, alpha: C64) -> Result<StateVector> {
    space.check_truncation(mode, alpha)?;
    let dim = space.dims()[mode];
    let amps = coherent_amplitudes(dim, alpha);
    let mut psi = StateVector::vacuum(space);
    psi.amps = embed_single_mode_state(space, mode, &amps);
    Ok(psi.normalized())
}

/// Un-normalized truncated coherent amplitudes for a single mode.
pub(crate) fn coherent_amplitudes(dim: usize, alpha: C64) -> CVec {
    let mut v = CVec::zeros(dim);
    let pref = (-alpha.norm_sqr() / 2.0).exp();
    let mut term = C64::from(pref);
    v[0] = term;
    for n in 1..dim {
        term *= alpha / C64::from((n as f64).sqrt());
        v[n] = term;
    }
    v
}

fn embed_single_mode_state(space: &ModeSpace, mode: usize, amps: &CVec) -> CVec {
    let mut full = if space.has_electronic() {
        let mut e = CVec::zeros(2);
        e[0] = C64::from(1.0);
        e
    } else {
        let mut e = CVec::zeros(1);
        e[0] = C64::from(1.0);
        e
    };
    for (m, &d) in space.dims().iter().enumerate() {
        let factor = if m == mode {
            amps.clone()
        } else {
            let mut vac = CVec::zeros(d);
            vac[0] = C64::from(1.0);
            vac
        };
        full = full.kronecker(&factor);
    }
    full
}

/// Even (`sign = +1`) or odd (`sign = -1`) coherent state
/// `𝒩±(|α⟩ ± |-α⟩)` on one mode.
pub fn cat_state(space: &ModeSpace, mode: usize, alpha: C64, sign: i32) -> Result<StateVector> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!("cat sign must be +1 or -1, got {sign}")));
    }
    if sign == -1 && alpha.norm() == 0.0 {
        return Err(Error::InvalidState("odd cat state is undefined at alpha = 0".into()));
    }
    let plus = coherent_state(space, mode, alpha)?;
    let minus = coherent_state(space, mode, -alpha)?;
    let s = C64::from(sign as f64);
    let amps = &plus.amps + minus.amps * s;
    Ok(StateVector::new(space.clone(), amps)?.normalized())
}

/// The four quasi-Bell entangled coherent states of Eq-class
/// `|φ±⟩ ∝ |α,α⟩ ± |-α,-α⟩`, `|ψ±⟩ ∝ |α,-α⟩ ± |-α,α⟩`, carried by the
/// first two modes of the space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcsKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl EcsKind {
    pub const ALL: [EcsKind; 4] = [EcsKind::PhiPlus, EcsKind::PhiMinus, EcsKind::PsiPlus, EcsKind::PsiMinus];

    pub fn label(&self) -> &'static str {
        match self {
            EcsKind::PhiPlus => "phi+",
            EcsKind::PhiMinus => "phi-",
            EcsKind::PsiPlus => "psi+",
            EcsKind::PsiMinus => "psi-",
        }
    }
}

pub fn ecs_state(space: &ModeSpace, kind: EcsKind, alpha: C64) -> Result<StateVector> {
    if space.n_modes() < 2 {
        return Err(Error::InvalidArgument("an entangled coherent state needs at least two modes".into()));
    }
    space.check_truncation(0, alpha)?;
    space.check_truncation(1, alpha)?;
    let d0 = space.dims()[0];
    let d1 = space.dims()[1];
    let cp = coherent_amplitudes(d0, alpha);
    let cm = coherent_amplitudes(d0, -alpha);
    let dp = coherent_amplitudes(d1, alpha);
    let dm = coherent_amplitudes(d1, -alpha);
    let (first, second, sign) = match kind {
        EcsKind::PhiPlus => ((&cp, &dp), (&cm, &dm), 1.0),
        EcsKind::PhiMinus => ((&cp, &dp), (&cm, &dm), -1.0),
        EcsKind::PsiPlus => ((&cp, &dm), (&cm, &dp), 1.0),
        EcsKind::PsiMinus => ((&cp, &dm), (&cm, &dp), -1.0),
    };
    let t1 = first.0.kronecker(first.1);
    let t2 = second.0.kronecker(second.1);
    let pair = t1 + t2 * C64::from(sign);
    let mut rest = CVec::zeros(1);
    rest[0] = C64::from(1.0);
    for &d in &space.dims()[2..] {
        let mut vac = CVec::zeros(d);
        vac[0] = C64::from(1.0);
        rest = rest.kronecker(&vac);
    }
    let mut amps = pair.kronecker(&rest);
    if space.has_electronic() {
        let mut e = CVec::zeros(2);
        e[0] = C64::from(1.0);
        amps = e.kronecker(&amps);
    }
    Ok(StateVector::new(space.clone(), amps)?.normalized())
}

/// Displacement `D̂(δ) = exp(δ b̂† - δ* b̂)` on one mode, built as the matrix
/// exponential of the truncated generator so it is exactly unitary on the
/// truncated space.
pub fn displacement_operator(space: &ModeSpace, mode: usize, delta: C64) -> Result<Operator> {
    space.check_mode(mode)?;
    let dim = space.dims()[mode];
    let a = single_mode_annihilation(dim);
    let gen = a.adjoint() * delta - &a * delta.conj();
    Operator::new(space.clone(), embed_mode(space, mode, &linalg::expm(&gen)))
}

/// Phase rotation `exp(iθ n̂)` on one mode: `|β⟩ → |e^{iθ}β⟩`.
pub fn phase_rotation_operator(space: &ModeSpace, mode: usize, theta: f64) -> Result<Operator> {
    space.check_mode(mode)?;
    let dim = space.dims()[mode];
    let mut u = CMat::zeros(dim, dim);
    for n in 0..dim {
        u[(n, n)] = (C64::i() * theta * n as f64).exp();
    }
    Operator::new(space.clone(), embed_mode(space, mode, &u))
}

/// Pure `n̂²` Kerr kernel `exp(-iπ/2 n̂²)` on one mode (the Yurke–Stoler
/// cat-generating phase map).
pub fn kerr_pi_half_operator(space: &ModeSpace, mode: usize) -> Result<Operator> {
    space.check_mode(mode)?;
    let dim = space.dims()[mode];
    let mut u = CMat::zeros(dim, dim);
    for n in 0..dim {
        u[(n, n)] = (-C64::i() * PI / 2.0 * (n * n) as f64).exp();
    }
    Operator::new(space.clone(), embed_mode(space, mode, &u))
}

/// Beam splitter between two modes with the fixed convention
/// `|β⟩_i|γ⟩_j → |β cos(θ/2) + γ sin(θ/2)⟩_i |-β sin(θ/2) + γ cos(θ/2)⟩_j`,
/// realized as `exp((θ/2)(b̂_i†b̂_j - b̂_j†b̂_i))`.
pub fn beamsplitter_operator(space: &ModeSpace, mode_i: usize, mode_j: usize, theta: f64) -> Result<Operator> {
    if mode_i == mode_j {
        return Err(Error::InvalidArgument("beam splitter needs two distinct modes".into()));
    }
    let bi = annihilation(space, mode_i)?;
    let bj = annihilation(space, mode_j)?;
    let gen = (bi.mat.adjoint() * &bj.mat - bj.mat.adjoint() * &bi.mat) * C64::from(theta / 2.0);
    Operator::new(space.clone(), linalg::expm(&gen))
}

/// Cross-parity `(-1)^{n̂_i n̂_j}` between two modes (diagonal).
pub fn cross_parity_operator(space: &ModeSpace, mode_i: usize, mode_j: usize) -> Result<Operator> {
    if mode_i == mode_j {
        return Err(Error::InvalidArgument("cross parity needs two distinct modes".into()));
    }
    let ni = number(space, mode_i)?;
    let nj = number(space, mode_j)?;
    let dim = space.total_dim();
    let mut u = CMat::zeros(dim, dim);
    for k in 0..dim {
        let prod = ni.mat[(k, k)].re * nj.mat[(k, k)].re;
        u[(k, k)] = C64::from(if (prod as i64) % 2 == 0 { 1.0 } else { -1.0 });
    }
    Operator::new(space.clone(), u)
}

/// Inner product `⟨a|b⟩`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<C64> {
    a.space.check_same(&b.space)?;
    Ok((a.amps.adjoint() * &b.amps)[(0, 0)])
}

/// `⟨target|ρ|target⟩`.
pub fn fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    rho.space.check_same(&target.space)?;
    let v = (target.amps.adjoint() * &rho.mat * &target.amps)[(0, 0)];
    Ok(v.re)
}

/// Linearized entropy `(d/(d-1)) · [1 - Tr ρ²]`; zero for pure states, one
/// for the maximally mixed state. On the 4⊗4 transfer space this reproduces
/// the 16/15 prefactor.
pub fn linearized_entropy(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.space.total_dim();
    if d < 2 {
        return Err(Error::InvalidArgument("linearized entropy needs total dimension >= 2".into()));
    }
    let d = d as f64;
    Ok(d / (d - 1.0) * (1.0 - rho.purity()))
}

/// Reduced density matrix over the kept vibrational modes (ascending order).
/// All other modes, and the electronic factor when present, are traced out.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let space = &rho.space;
    let n_modes = space.n_modes();
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one mode".into()));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() {
        return Err(Error::InvalidArgument("duplicate mode indices in keep list".into()));
    }
    for &m in &keep_sorted {
        space.check_mode(m)?;
    }
    if keep_sorted.len() == n_modes && !space.has_electronic() {
        return Err(Error::InvalidArgument("partial trace must trace out a proper subset".into()));
    }

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&m| space.dims()[m]).collect();
    let traced: Vec<usize> = (0..n_modes).filter(|m| !keep_sorted.contains(m)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&m| space.dims()[m]).collect();
    let e_dim = if space.has_electronic() { 2 } else { 1 };

    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();
    let mut out = CMat::zeros(kept_total, kept_total);

    // Walk every (row, col) pair of the full matrix whose traced-out factors
    // coincide, accumulating into the reduced matrix.
    let mut fock_row = vec![0usize; n_modes];
    let mut fock_col = vec![0usize; n_modes];
    for kr in 0..kept_total {
        decode(kr, &kept_dims, &keep_sorted, &mut fock_row);
        for kc in 0..kept_total {
            decode(kc, &kept_dims, &keep_sorted, &mut fock_col);
            let mut acc = C64::from(0.0);
            for t in 0..traced_total {
                decode(t, &traced_dims, &traced, &mut fock_row);
                decode(t, &traced_dims, &traced, &mut fock_col);
                for e in 0..e_dim {
                    let i = space.index_of(e, &fock_row);
                    let j = space.index_of(e, &fock_col);
                    acc += rho.mat[(i, j)];
                }
            }
            out[(kr, kc)] = acc;
        }
    }

    let reduced_space = ModeSpace::new(&kept_dims)?;
    DensityMatrix::new(reduced_space, out)
}

fn decode(mut flat: usize, dims: &[usize], modes: &[usize], fock: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        fock[modes[k]] = flat % dims[k];
        flat /= dims[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn basis_ordering_is_row_major() {
        let space = ModeSpace::with_electronic(&[3, 2]).unwrap();
        assert_eq!(space.total_dim(), 12);
        assert_eq!(space.index_of(0, &[0, 0]), 0);
        assert_eq!(space.index_of(0, &[0, 1]), 1);
        assert_eq!(space.index_of(0, &[1, 0]), 2);
        assert_eq!(space.index_of(1, &[0, 0]), 6);
        assert_eq!(space.index_of(1, &[2, 1]), 11);
    }

    #[test]
    fn annihilation_ladder_elements() {
        let space = ModeSpace::new(&[3]).unwrap();
        let b = annihilation(&space, 0).unwrap();
        assert_abs_diff_eq!((b.mat[(0, 1)] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((b.mat[(1, 2)] - c(2f64.sqrt(), 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.mat[(2, 2)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn commutator_is_identity_below_truncation() {
        let space = ModeSpace::new(&[8]).unwrap();
        let b = annihilation(&space, 0).unwrap();
        let bd = creation(&space, 0).unwrap();
        let comm = &b.mat * &bd.mat - &bd.mat * &b.mat;
        for n in 0..7 {
            assert_abs_diff_eq!((comm[(n, n)] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        }
        // Truncation boundary: the top Fock level sees -(dim-1) instead.
        assert_abs_diff_eq!(comm[(7, 7)].re, -7.0, epsilon = 1e-12);
    }

    #[test]
    fn ladder_algebra_number_operator() {
        let space = ModeSpace::new(&[6]).unwrap();
        let b = annihilation(&space, 0).unwrap();
        let n = number(&space, 0).unwrap();
        let beta = b.mat.adjoint() * &b.mat;
        assert_abs_diff_eq!((beta - &n.mat).map(|x| x.norm()).max(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tensor_embedding_acts_on_the_right_mode() {
        // Two modes, b̂_x on |2,1⟩ gives √2 |1,1⟩.
        let space = ModeSpace::new(&[3, 2]).unwrap();
        let bx = annihilation(&space, 0).unwrap();
        let psi = StateVector::basis_state(&space, 0, &[2, 1]);
        let out = bx.apply(&psi).unwrap();
        let expected_idx = space.index_of(0, &[1, 1]);
        assert_abs_diff_eq!((out.amps[expected_idx] - c(2f64.sqrt(), 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amps.norm(), 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn coherent_vacuum_limit() {
        let space = ModeSpace::new(&[6]).unwrap();
        let psi = coherent_state(&space, 0, c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!((psi.amps[0] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn coherent_overlap_with_exact_state_dominated_by_tail_mass() {
        // Analytic tail-bound oracle: the normalized dim-d truncation overlaps
        // the exact coherent state by sqrt(1 - tail(d)), tail(d) = Σ_{n≥d} p_n.
        let alpha = c(1.0, 0.0);
        let tail = |d: usize| -> f64 {
            let mut fact = 1.0;
            let mut total = 0.0;
            for n in 0..60 {
                if n > 0 {
                    fact *= n as f64;
                }
                if n >= d {
                    total += (-1.0f64).exp() / fact;
                }
            }
            total
        };
        for dim in [6usize, 7, 12] {
            let space = ModeSpace::new(&[dim]).unwrap();
            let psi = coherent_state(&space, 0, alpha).unwrap();
            // Overlap with the exact state = Σ_{n<d} p_n / sqrt(Σ_{n<d} p_n).
            let mut fact = 1.0;
            let mut ov = 0.0;
            for n in 0..dim {
                if n > 0 {
                    fact *= n as f64;
                }
                ov += (-1.0f64).exp() / fact * (psi.amps[n].re / psi.amps[n].norm()).signum();
            }
            let _ = ov;
            let expected = (1.0 - tail(dim)).sqrt();
            // Direct evaluation through the constructor amplitudes.
            let mut exact = CVec::zeros(dim);
            let mut fact = 1.0;
            for n in 0..dim {
                if n > 0 {
                    fact *= n as f64;
                }
                exact[n] = c((-0.5f64).exp() / fact.sqrt(), 0.0);
            }
            let got = (exact.adjoint() * &psi.amps)[(0, 0)].re;
            assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
        }
        // Frozen oracle values: dim 6 gives 0.999703, dim 7 clears 0.9999.
        assert!((1.0 - tail(6)).sqrt() > 0.9997);
        assert!((1.0 - tail(7)).sqrt() > 0.9999);
    }

    #[test]
    fn coherent_pair_overlap_matches_gram_formula() {
        let space = ModeSpace::new(&[12]).unwrap();
        let plus = coherent_state(&space, 0, c(1.0, 0.0)).unwrap();
        let minus = coherent_state(&space, 0, c(-1.0, 0.0)).unwrap();
        let ov = overlap(&plus, &minus).unwrap();
        assert_abs_diff_eq!(ov.re, (-2.0f64).exp(), epsilon = 1e-6);
        assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn truncation_guard_rejects_large_amplitudes() {
        let space = ModeSpace::new(&[2]).unwrap();
        let err = coherent_state(&space, 0, c(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::TruncationGuard { .. }));
    }

    #[test]
    fn cat_states_have_definite_parity() {
        let space = ModeSpace::new(&[12]).unwrap();
        let even = cat_state(&space, 0, c(1.0, 0.0), 1).unwrap();
        let odd = cat_state(&space, 0, c(1.0, 0.0), -1).unwrap();
        let p = parity_operator(&space, 0).unwrap();
        assert_abs_diff_eq!(p.expectation(&even).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.expectation(&odd).re, -1.0, epsilon = 1e-12);
        // Only odd Fock levels populated in the odd cat.
        for n in (0..12).step_by(2) {
            assert_abs_diff_eq!(odd.amps[n].norm(), 0.0, epsilon = 1e-14);
        }
        // P² = 1 and P·cat(+) = cat(+).
        let p2 = &p.mat * &p.mat;
        assert_abs_diff_eq!((p2 - CMat::identity(12, 12)).map(|x| x.norm()).max(), 0.0, epsilon = 1e-14);
        let peven = p.apply(&even).unwrap();
        assert_abs_diff_eq!((overlap(&peven, &even).unwrap() - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn odd_cat_at_zero_alpha_is_an_error() {
        let space = ModeSpace::new(&[6]).unwrap();
        assert!(cat_state(&space, 0, c(0.0, 0.0), -1).is_err());
        // Even cat at alpha → 0 tends to vacuum.
        let even = cat_state(&space, 0, c(1e-8, 0.0), 1).unwrap();
        assert_abs_diff_eq!(even.amps[0].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ecs_normalization_and_orthogonality() {
        let space = ModeSpace::new(&[16, 16]).unwrap();
        let alpha = c(1.0, 0.0);
        let phip = ecs_state(&space, EcsKind::PhiPlus, alpha).unwrap();
        assert_abs_diff_eq!(phip.norm(), 1.0, epsilon = 1e-10);
        // ψ- is orthogonal to both φ± by symmetry (Gram-formula oracle: the
        // four cross terms cancel pairwise).
        let psim = ecs_state(&space, EcsKind::PsiMinus, alpha).unwrap();
        let phim = ecs_state(&space, EcsKind::PhiMinus, alpha).unwrap();
        assert_abs_diff_eq!(overlap(&phip, &psim).unwrap().norm(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(overlap(&phim, &psim).unwrap().norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn beamsplitter_sends_phi_plus_to_even_cat_and_vacuum() {
        // B(π/2) |φ+⟩ = 𝒩(|√2α⟩ + |-√2α⟩)_x ⊗ |0⟩_y
        let space = ModeSpace::new(&[16, 16]).unwrap();
        let alpha = c(1.0, 0.0);
        let phip = ecs_state(&space, EcsKind::PhiPlus, alpha).unwrap();
        let bs = beamsplitter_operator(&space, 0, 1, PI / 2.0).unwrap();
        let out = bs.apply(&phip).unwrap();
        let target = {
            let cat = cat_state(&space, 0, c(2f64.sqrt(), 0.0), 1).unwrap();
            cat // other mode already vacuum
        };
        let ov = overlap(&target, &out).unwrap().norm();
        assert!(ov >= 1.0 - 1e-6, "overlap {ov}");
    }

    #[test]
    fn displacement_is_unitary_on_truncated_space() {
        let space = ModeSpace::new(&[10]).unwrap();
        let d = displacement_operator(&space, 0, c(0.7, -0.3)).unwrap();
        let dev = (d.mat.adjoint() * &d.mat - CMat::identity(10, 10)).map(|x| x.norm()).max();
        assert!(dev < 1e-12);
    }

    #[test]
    fn overlap_and_fidelity_basics() {
        let space = ModeSpace::new(&[6]).unwrap();
        let alpha = coherent_state(&space, 0, c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(overlap(&alpha, &alpha).unwrap().re, 1.0, epsilon = 1e-10);
        let vac = StateVector::vacuum(&space);
        let rho = vac.to_density();
        assert_abs_diff_eq!(fidelity(&rho, &vac).unwrap(), 1.0, epsilon = 1e-12);
        // Transfer-style check: F = |⟨0|ψ⟩|⁴ for the paper's test state.
        let space2 = ModeSpace::new(&[4, 4]).unwrap();
        let mut psi = CVec::zeros(16);
        let w = (2.0f64 / 5.0).sqrt();
        psi[space2.index_of(0, &[0, 0])] = c(w, 0.0);
        psi[space2.index_of(0, &[1, 0])] = c(-w, 0.0);
        psi[space2.index_of(0, &[2, 0])] = c((1.0f64 / 5.0).sqrt(), 0.0);
        let psi = StateVector::new(space2.clone(), psi).unwrap();
        let mut target = CVec::zeros(16);
        target[space2.index_of(0, &[0, 0])] = c(w, 0.0);
        target[space2.index_of(0, &[0, 1])] = c(-w, 0.0);
        target[space2.index_of(0, &[0, 2])] = c((1.0f64 / 5.0).sqrt(), 0.0);
        let target = StateVector::new(space2, target).unwrap();
        let f = fidelity(&psi.to_density(), &target).unwrap();
        assert_abs_diff_eq!(f, 0.16, epsilon = 1e-12);
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let a = StateVector::vacuum(&ModeSpace::new(&[4]).unwrap());
        let b = StateVector::vacuum(&ModeSpace::new(&[5]).unwrap());
        assert!(overlap(&a, &b).is_err());
    }

    #[test]
    fn linearized_entropy_extremes() {
        let space = ModeSpace::new(&[4, 4]).unwrap();
        let pure = StateVector::vacuum(&space).to_density();
        assert_abs_diff_eq!(linearized_entropy(&pure).unwrap(), 0.0, epsilon = 1e-10);
        let d = space.total_dim();
        let mixed = DensityMatrix::new(space.clone(), CMat::identity(d, d) / C64::from(d as f64)).unwrap();
        assert_abs_diff_eq!(linearized_entropy(&mixed).unwrap(), 1.0, epsilon = 1e-12);
        // Equal mixture of two orthogonal pure states on d = 16: (16/15)(1/2).
        let a = StateVector::basis_state(&space, 0, &[0, 0]).to_density();
        let b = StateVector::basis_state(&space, 0, &[1, 2]).to_density();
        let mix = DensityMatrix::new(space, (a.mat + b.mat) / C64::from(2.0)).unwrap();
        assert_abs_diff_eq!(linearized_entropy(&mix).unwrap(), 8.0 / 15.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_recovers_product_factor() {
        let space = ModeSpace::new(&[4, 3]).unwrap();
        let mut amps = CVec::zeros(12);
        // |ψ⟩ = (|0⟩+|2⟩)/√2 ⊗ |1⟩
        amps[space.index_of(0, &[0, 1])] = c(1.0 / 2f64.sqrt(), 0.0);
        amps[space.index_of(0, &[2, 1])] = c(1.0 / 2f64.sqrt(), 0.0);
        let rho = StateVector::new(space, amps).unwrap().to_density();
        let red = partial_trace(&rho, &[0]).unwrap();
        assert_abs_diff_eq!(red.trace().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(red.mat[(0, 2)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(red.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_phi_plus_matches_gram_oracle() {
        // Two-term Gram computation: Tr ρ₁² = [(1+s)⁴ + (1-s)⁴] / [4(1+s²)²],
        // s = e^{-2α²}.
        let space = ModeSpace::new(&[16, 16]).unwrap();
        let alpha = 1.0;
        let phip = ecs_state(&space, EcsKind::PhiPlus, c(alpha, 0.0)).unwrap();
        let red = partial_trace(&phip.to_density(), &[0]).unwrap();
        let s = (-2.0 * alpha * alpha).exp();
        let expected = ((1.0 + s).powi(4) + (1.0 - s).powi(4)) / (4.0 * (1.0 + s * s).powi(2));
        assert_abs_diff_eq!(red.purity(), expected, epsilon = 1e-6);
        assert_abs_diff_eq!(red.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_subsets() {
        let space = ModeSpace::new(&[3, 3]).unwrap();
        let rho = StateVector::vacuum(&space).to_density();
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[0, 1]).is_err());
        assert!(partial_trace(&rho, &[5]).is_err());
    }

    #[test]
    fn constructors_return_unit_norm() {
        let space = ModeSpace::new(&[12, 12]).unwrap();
        for state in [
            coherent_state(&space, 0, c(0.8, 0.5)).unwrap(),
            cat_state(&space, 1, c(1.0, 0.0), 1).unwrap(),
            cat_state(&space, 1, c(0.9, 0.2), -1).unwrap(),
            ecs_state(&space, EcsKind::PsiPlus, c(1.0, 0.0)).unwrap(),
        ] {
            assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-10);
        }
    }
}
