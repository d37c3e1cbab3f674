//! Expansion of the bichromatic effective Hamiltonian into
//! interaction-picture terms, sideband classification, and assembly of the
//! time-dependent operator `H_true = H_stationary + H_nst`.
//!
//! Each term carries a coefficient
//!
//! ```text
//! c(n,m,p,q) = (g₁g₂/Δ₁) · (iη'_x)^{n+m} (iη'_y)^{p+q} e^{-iφ} / (n! m! p! q!)
//! ```
//!
//! multiplying `b̂†ⁿ_x b̂ᵐ_x b̂†ᵖ_y b̂ᵠ_y e^{i·freq·t}`, plus the Hermitian
//! conjugate of everything, where `freq = s_x ω_x + s_y ω_y - δ₁₂` with
//! `s_x = n - m`, `s_y = p - q`.
//!
//! The overall sign is chosen so that exciting the first red sideband of the
//! x motion (`δ₁₂ = ω_x`, lasers along x) selects the stationary term
//! `H_cs = (i g₁g₂η'_x/Δ₁) b̂†_x + h.c.`, whose evolution is the displacement
//! `D̂(α(t))` with drift `α̇ = g₁g₂η'_x/Δ₁ > 0`.

use crate::error::{Error, Result};
use crate::hilbert::{self, ModeSpace, Operator};
use crate::linalg::CMat;
use crate::C64;

/// Stationary terms are those with `|freq|` below this.
pub const STATIONARY_TOL: f64 = 1e-9;

/// Laser geometry and trap parameters, in units of the Rabi frequency `g`.
#[derive(Debug, Clone)]
pub struct LaserConfig {
    /// Rabi frequencies g₁, g₂ (units of g).
    pub g1: f64,
    pub g2: f64,
    /// Detuning Δ₁ from the electronic transition (units of g).
    pub delta1: f64,
    /// Laser beat δ₁₂ = ω₂ - ω₁ (units of g).
    pub delta12: f64,
    /// Effective Lamb–Dicke parameters η'_x, η'_y (dimensionless).
    pub eta_x: f64,
    pub eta_y: f64,
    /// Laser phase difference φ (radians).
    pub phi: f64,
    /// Trap frequencies (units of g), with ω_x > ω_y.
    pub omega_x: f64,
    pub omega_y: f64,
}

impl LaserConfig {
    pub fn validate(&self) -> Result<()> {
        if self.omega_x <= self.omega_y {
            return Err(Error::InvalidArgument(format!(
                "trap anisotropy requires omega_x > omega_y (got {} <= {})",
                self.omega_x, self.omega_y
            )));
        }
        Ok(())
    }

    /// Dispersive-regime check Δ₁ ≥ 5·max(g₁, g₂); violations are flagged,
    /// not fatal.
    pub fn dispersive_regime_ok(&self) -> bool {
        self.delta1 >= 5.0 * self.g1.max(self.g2)
    }
}

/// One expansion term: coefficient, ladder exponents `(n, m, p, q)` for
/// `b̂†ⁿ_x b̂ᵐ_x b̂†ᵖ_y b̂ᵠ_y`, and interaction-picture frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianTerm {
    pub coeff: C64,
    pub exps: (u32, u32, u32, u32),
    pub freq: f64,
}

impl HamiltonianTerm {
    pub fn s_x(&self) -> i64 {
        self.exps.0 as i64 - self.exps.1 as i64
    }

    pub fn s_y(&self) -> i64 {
        self.exps.2 as i64 - self.exps.3 as i64
    }

    pub fn is_stationary(&self) -> bool {
        self.freq.abs() < STATIONARY_TOL
    }
}

/// Expanded term list with its stationary / non-stationary partition.
#[derive(Debug, Clone)]
pub struct TermList {
    pub terms: Vec<HamiltonianTerm>,
    pub max_order: u32,
    pub freq_cutoff: f64,
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// All terms with `1 ≤ n+m+p+q ≤ max_order`; the constant `(0,0,0,0)` term
/// (an overall energy shift) is excluded, as are terms suppressed to zero by
/// a vanishing Lamb-Dicke parameter.
pub fn expand(config: &LaserConfig, max_order: u32) -> Result<TermList> {
    if max_order < 1 {
        return Err(Error::InvalidArgument("expansion order must be >= 1".into()));
    }
    config.validate()?;
    let pref = C64::from(config.g1 * config.g2 / config.delta1) * C64::from_polar(1.0, -config.phi);
    let ix = C64::i() * config.eta_x;
    let iy = C64::i() * config.eta_y;
    let mut terms = Vec::new();
    for total in 1..=max_order {
        for n in 0..=total {
            for m in 0..=(total - n) {
                for p in 0..=(total - n - m) {
                    let q = total - n - m - p;
                    let coeff = pref * ix.powu(n + m) * iy.powu(p + q)
                        / C64::from(factorial(n) * factorial(m) * factorial(p) * factorial(q));
                    if coeff.norm() == 0.0 {
                        continue;
                    }
                    let s_x = n as f64 - m as f64;
                    let s_y = p as f64 - q as f64;
                    let freq = s_x * config.omega_x + s_y * config.omega_y - config.delta12;
                    terms.push(HamiltonianTerm { coeff, exps: (n, m, p, q), freq });
                }
            }
        }
    }
    Ok(TermList { terms, max_order, freq_cutoff: config.omega_x + config.omega_y })
}

/// Recompute frequencies for a laser beat `delta12` and keep the stationary
/// set plus oscillating terms with `0 < |freq| ≤ freq_cutoff`.
pub fn classify(list: &TermList, config: &LaserConfig, delta12: f64, freq_cutoff: f64) -> Result<TermList> {
    if freq_cutoff < 0.0 {
        return Err(Error::InvalidArgument("frequency cutoff must be >= 0".into()));
    }
    let mut terms = Vec::new();
    for t in &list.terms {
        let freq = t.s_x() as f64 * config.omega_x + t.s_y() as f64 * config.omega_y - delta12;
        if freq.abs() < STATIONARY_TOL || freq.abs() <= freq_cutoff {
            terms.push(HamiltonianTerm { freq, ..*t });
        }
    }
    Ok(TermList { terms, max_order: list.max_order, freq_cutoff })
}

impl TermList {
    pub fn stationary(&self) -> Vec<HamiltonianTerm> {
        self.terms.iter().copied().filter(|t| t.is_stationary()).collect()
    }

    pub fn nonstationary(&self) -> Vec<HamiltonianTerm> {
        self.terms.iter().copied().filter(|t| !t.is_stationary()).collect()
    }

    /// Keep only the stationary terms.
    pub fn stationary_only(&self) -> TermList {
        TermList { terms: self.stationary(), max_order: self.max_order, freq_cutoff: self.freq_cutoff }
    }

    /// Keep stationary terms selected by a predicate on the exponents, plus
    /// every oscillating term.
    fn retain_stationary<F: Fn(&HamiltonianTerm) -> bool>(&self, keep: F) -> TermList {
        let terms = self
            .terms
            .iter()
            .copied()
            .filter(|t| !t.is_stationary() || keep(t))
            .collect();
        TermList { terms, max_order: self.max_order, freq_cutoff: self.freq_cutoff }
    }

    /// Effective rate of the `(n,m,p,q)` interaction: the magnitude of the
    /// Hermitian-doubled stationary coefficient `2·Re`-sum for diagonal
    /// terms, `2|c|` in general.
    pub fn effective_rate(&self, exps: (u32, u32, u32, u32)) -> Option<f64> {
        self.terms.iter().find(|t| t.exps == exps).map(|t| 2.0 * t.coeff.norm())
    }

    /// Plain-text table, one term per line:
    /// `coeff_re coeff_im n m p q freq`.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# coeff_re coeff_im n m p q freq\n");
        for t in &self.terms {
            out.push_str(&format!(
                "{:+.12e} {:+.12e} {} {} {} {} {:+.12e}\n",
                t.coeff.re, t.coeff.im, t.exps.0, t.exps.1, t.exps.2, t.exps.3, t.freq
            ));
        }
        out
    }
}

/// Dense Hermitian operator `Σ_k c_k e^{i·freq_k·t} B_k + h.c.` at time `t`.
///
/// The `x` mode is the first mode of `space`, `y` the second (when the term
/// list touches it).
pub fn operator_at(list: &TermList, t: f64, space: &ModeSpace) -> Result<Operator> {
    let parts = term_matrices(list, space)?;
    Ok(operator_at_cached(&parts, t, space))
}

/// Precomputed matrices `B_k` for repeated time evaluation.
pub struct TermMatrices {
    entries: Vec<(C64, f64, CMat)>,
    dim: usize,
}

pub fn term_matrices(list: &TermList, space: &ModeSpace) -> Result<TermMatrices> {
    let needs_y = list.terms.iter().any(|t| t.exps.2 > 0 || t.exps.3 > 0);
    if needs_y && space.n_modes() < 2 {
        return Err(Error::InvalidArgument("term list touches the y mode but space has only one mode".into()));
    }
    let bx = hilbert::annihilation(space, 0)?.mat;
    let bxd = bx.adjoint();
    let (by, byd) = if space.n_modes() >= 2 {
        let b = hilbert::annihilation(space, 1)?.mat;
        let bd = b.adjoint();
        (b, bd)
    } else {
        (CMat::identity(space.total_dim(), space.total_dim()), CMat::identity(space.total_dim(), space.total_dim()))
    };
    let pow = |m: &CMat, k: u32| -> CMat {
        let mut acc = CMat::identity(space.total_dim(), space.total_dim());
        for _ in 0..k {
            acc = acc * m;
        }
        acc
    };
    let entries = list
        .terms
        .iter()
        .map(|t| {
            let (n, m, p, q) = t.exps;
            let b = pow(&bxd, n) * pow(&bx, m) * pow(&byd, p) * pow(&by, q);
            (t.coeff, t.freq, b)
        })
        .collect();
    Ok(TermMatrices { entries, dim: space.total_dim() })
}

pub fn operator_at_cached(parts: &TermMatrices, t: f64, space: &ModeSpace) -> Operator {
    let mut h = CMat::zeros(parts.dim, parts.dim);
    for (coeff, freq, b) in &parts.entries {
        let c = coeff * C64::from_polar(1.0, freq * t);
        h += b * c;
    }
    let h = &h + h.adjoint();
    Operator::new(space.clone(), h).expect("term matrices built on this space")
}

/// The three engineered interactions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetKind {
    /// First red sideband of the x motion: coherent-state generation.
    Displacement,
    /// Lasers along x, δ₁₂ = 0: self-Kerr `b̂†²b̂²` interaction.
    Kerr,
    /// Lasers at 45°/225°, δ₁₂ = 0: cross-phase `n̂_x n̂_y` interaction.
    CrossPhase,
}

/// Adjustable knobs of a preset; defaults reproduce the reference runs
/// (η_x = 0.4 so η'_x = 2η_x = 0.8, Δ₁ = 5g, ω_x = γg with γ = 20,
/// ω_x = 4ω_y).
#[derive(Debug, Clone)]
pub struct PresetParams {
    /// Bare Lamb–Dicke parameter η_x; the effective one is 2η_x.
    pub eta_x: f64,
    /// γ = ω_x/g.
    pub gamma: f64,
    /// Δ₁ in units of g.
    pub delta1: f64,
}

impl Default for PresetParams {
    fn default() -> Self {
        Self { eta_x: 0.4, gamma: 20.0, delta1: 5.0 }
    }
}

/// Build the laser configuration and term list for one of the engineered
/// interactions.
///
/// The returned list contains the selected stationary interaction plus the
/// oscillating terms within the frequency cutoff ω_x + ω_y. Stationary
/// *light-shift* terms (`n̂_x`, `n̂_y`) and, for the cross-phase preset, the
/// single-mode self-Kerr terms are dropped: they renormalize the trap
/// frequencies and are absorbed into the rotating frame, which is what makes
/// the engineered evolution match its ideal counterpart.
pub fn preset(kind: PresetKind, params: &PresetParams) -> Result<(LaserConfig, TermList)> {
    let eta_eff = 2.0 * params.eta_x;
    let omega_x = params.gamma;
    let omega_y = params.gamma / 4.0;
    let (delta12, eta_y, max_order) = match kind {
        PresetKind::Displacement => (omega_x, 0.0, 2),
        PresetKind::Kerr => (0.0, 0.0, 4),
        PresetKind::CrossPhase => (0.0, eta_eff, 4),
    };
    let config = LaserConfig {
        g1: 1.0,
        g2: 1.0,
        delta1: params.delta1,
        delta12,
        eta_x: eta_eff,
        eta_y,
        phi: 0.0,
        omega_x,
        omega_y,
    };
    let full = expand(&config, max_order)?;
    let classified = classify(&full, &config, delta12, config.omega_x + config.omega_y)?;
    let list = match kind {
        PresetKind::Displacement => classified.retain_stationary(|t| t.exps == (1, 0, 0, 0)),
        PresetKind::Kerr => classified.retain_stationary(|t| t.exps == (2, 2, 0, 0)),
        PresetKind::CrossPhase => classified.retain_stationary(|t| t.exps == (1, 1, 1, 1)),
    };
    Ok((config, list))
}
