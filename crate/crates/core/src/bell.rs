//! Quasi-Bell discrimination of entangled coherent states via
//! parity-nondemolition readout of the ion's electronic state.
//!
//! One detection block writes the parity of a vibrational mode onto the
//! electronic state and reads it out projectively:
//!
//! ```text
//! carrier(π/4) → U_qnd(χt = π/2) → carrier(-π/4) → measure
//! ```
//!
//! The second carrier pulse is the inverse rotation of the first; this
//! phase choice is what sends even-parity states to the `g` outcome with
//! probability one. The QND step rotates the mode amplitudes by ±π/2
//! (`β → e^{±iχt}β` on the g/e branches) without touching their parity.
//!
//! The discrimination pipeline is a 50:50 beam splitter followed by the
//! detection block on each output mode; the ambiguous `(g, g)` record is
//! split by a small displacement `D(-ε)` with `2√2αε = π/2` that flips the
//! parity of the populated branch, followed by one more detection block.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::hilbert::EcsKind;
use crate::symbolic::{ecs_superposition, CoherentSuperposition, Spin};
use crate::C64;

/// Electronic + vibrational symbolic state: a [`CoherentSuperposition`]
/// whose terms all carry an electronic factor.
pub type IonVibState = CoherentSuperposition;

fn require_spin(state: &IonVibState) -> Result<()> {
    if !state.has_spin() {
        return Err(Error::InvalidState("operation needs an electronic factor".into()));
    }
    Ok(())
}

/// Carrier-frequency rotation `e^{-i·angle·(σ̂₊+σ̂₋)}` of the electronic
/// factor; the vibrational kets are untouched. A π/2-pulse is
/// `angle = π/4`; a π-pulse is `angle = π/2`.
pub fn carrier_pulse(state: &IonVibState, angle: f64) -> Result<IonVibState> {
    require_spin(state)?;
    let c = C64::from(angle.cos());
    let s = -C64::i() * angle.sin();
    let mut terms = Vec::with_capacity(2 * state.n_terms());
    for t in state.terms() {
        let (wg, we) = match t.spin.expect("spin checked") {
            Spin::G => (t.weight * c, t.weight * s),
            Spin::E => (t.weight * s, t.weight * c),
        };
        let mut tg = t.clone();
        tg.weight = wg;
        tg.spin = Some(Spin::G);
        let mut te = t.clone();
        te.weight = we;
        te.spin = Some(Spin::E);
        terms.push(tg);
        terms.push(te);
    }
    let mut out = CoherentSuperposition::from_terms(state.n_modes(), terms)?;
    out.prune(crate::symbolic::PRUNE_TOL);
    Ok(out)
}

/// Conditional phase rotation `e^{iχt n̂}|g⟩⟨g| + e^{-iχt n̂}|e⟩⟨e|` of one
/// mode: `β → e^{+iχt}β` on the g branch, `β → e^{-iχt}β` on the e branch.
pub fn qnd_evolution(state: &IonVibState, mode: usize, chi_t: f64) -> Result<IonVibState> {
    require_spin(state)?;
    let rot_g = C64::from_polar(1.0, chi_t);
    let rot_e = C64::from_polar(1.0, -chi_t);
    let mut out = state.clone();
    let terms = out.terms_mut();
    for t in terms {
        let rot = match t.spin.expect("spin checked") {
            Spin::G => rot_g,
            Spin::E => rot_e,
        };
        t.amps[mode] *= rot;
    }
    Ok(out)
}

/// Measurement policy: enumerate every branch exactly, or draw one branch
/// with a seeded generator.
#[derive(Debug, Clone, Copy)]
pub enum MeasurePolicy {
    Enumerate,
    Sample(u64),
}

/// Idealized detector with optional classical misread rates (probability of
/// recording `e` for a true `g` and vice versa); both default to zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct DetectorModel {
    pub p_dark: f64,
    pub p_bright: f64,
}

/// One projective electronic readout branch.
#[derive(Debug, Clone)]
pub struct MeasureBranch {
    pub outcome: Spin,
    pub probability: f64,
    pub state: IonVibState,
}

/// Projective electronic readout. Enumerate returns every branch with its
/// exact probability and normalized collapsed state; detector misreads
/// split each physical branch into correctly- and incorrectly-recorded
/// ones.
pub fn electronic_measure(
    state: &IonVibState,
    detector: &DetectorModel,
) -> Result<Vec<MeasureBranch>> {
    require_spin(state)?;
    let norm_sq = state.inner(state)?.re;
    let mut branches = Vec::new();
    for spin in [Spin::G, Spin::E] {
        let terms: Vec<_> =
            state.terms().iter().filter(|t| t.spin == Some(spin)).cloned().collect();
        if terms.is_empty() {
            continue;
        }
        let collapsed = CoherentSuperposition::from_terms(state.n_modes(), terms)?;
        let p = collapsed.inner(&collapsed)?.re / norm_sq;
        if p < 1e-14 {
            continue;
        }
        let collapsed = collapsed.normalized()?;
        let (p_correct, p_flip, other) = match spin {
            Spin::G => (1.0 - detector.p_dark, detector.p_dark, Spin::E),
            Spin::E => (1.0 - detector.p_bright, detector.p_bright, Spin::G),
        };
        if p * p_correct > 1e-14 {
            branches.push(MeasureBranch { outcome: spin, probability: p * p_correct, state: collapsed.clone() });
        }
        if p * p_flip > 1e-14 {
            branches.push(MeasureBranch { outcome: other, probability: p * p_flip, state: collapsed });
        }
    }
    Ok(branches)
}

/// Outcome label decided by the discrimination pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcsLabel {
    Kind(EcsKind),
    Undetermined,
}

impl EcsLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            EcsLabel::Kind(k) => k.label(),
            EcsLabel::Undetermined => "undetermined",
        }
    }
}

/// One completed branch of the discrimination pipeline.
#[derive(Debug, Clone)]
pub struct RecordBranch {
    pub outcomes: Vec<Spin>,
    pub probability: f64,
    pub state: CoherentSuperposition,
    pub label: EcsLabel,
}

/// Full enumeration (or a single sample) of the pipeline outcomes.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub branches: Vec<RecordBranch>,
}

impl MeasurementRecord {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Probability mass labelled as `kind`.
    pub fn label_probability(&self, kind: EcsKind) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.label == EcsLabel::Kind(kind))
            .map(|b| b.probability)
            .sum()
    }

    /// The branch with the given outcome sequence, if present.
    pub fn branch(&self, outcomes: &[Spin]) -> Option<&RecordBranch> {
        self.branches.iter().find(|b| b.outcomes == outcomes)
    }
}

/// Options for the discrimination pipeline.
#[derive(Debug, Clone)]
pub struct DiscriminationOptions {
    pub policy: MeasurePolicy,
    pub detector: DetectorModel,
}

impl Default for DiscriminationOptions {
    fn default() -> Self {
        Self { policy: MeasurePolicy::Enumerate, detector: DetectorModel::default() }
    }
}

struct PipelineCtx<'a> {
    detector: &'a DetectorModel,
    rng: Option<StdRng>,
}

impl PipelineCtx<'_> {
    /// One detection block on `mode`: π/2 carrier, QND at χt = π/2, inverse
    /// π/2 carrier, projective readout; an `e` outcome is reset to `g` with
    /// a π carrier pulse.
    fn detect_block(&mut self, state: &IonVibState, mode: usize) -> Result<Vec<MeasureBranch>> {
        let st = carrier_pulse(state, FRAC_PI_4)?;
        let st = qnd_evolution(&st, mode, FRAC_PI_2)?;
        let st = carrier_pulse(&st, -FRAC_PI_4)?;
        let mut branches = electronic_measure(&st, self.detector)?;
        for b in &mut branches {
            if b.outcome == Spin::E {
                b.state = carrier_pulse(&b.state, FRAC_PI_2)?;
            }
        }
        if let Some(rng) = &mut self.rng {
            // Draw one branch proportionally to its probability, then carry
            // it with unit weight (the record keeps the drawn probability).
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            let mut u: f64 = rng.gen::<f64>() * total;
            let mut pick = branches.len() - 1;
            for (k, b) in branches.iter().enumerate() {
                if u < b.probability {
                    pick = k;
                    break;
                }
                u -= b.probability;
            }
            branches = vec![branches.swap_remove(pick)];
        }
        Ok(branches)
    }
}

/// Quasi-Bell measurement of the mode pair `(mode_i, mode_j)` of an
/// arbitrary multimode symbolic state (no electronic factor), using a fresh
/// ancilla ion prepared in `|g⟩`. `alpha` is the code amplitude the
/// pipeline is calibrated for (it fixes the disambiguation displacement
/// `ε = π/(4√2α)`).
///
/// Returns every outcome branch with the collapsed state of the *whole*
/// mode register (electronic factor stripped after the final readout).
pub fn quasi_bell_measure(
    state: &CoherentSuperposition,
    mode_i: usize,
    mode_j: usize,
    alpha: f64,
    opts: &DiscriminationOptions,
) -> Result<MeasurementRecord> {
    if state.has_spin() {
        return Err(Error::InvalidState(
            "quasi_bell_measure attaches its own ancilla; the input must not carry a spin".into(),
        ));
    }
    if alpha <= 0.0 {
        return Err(Error::InvalidArgument("code amplitude must be positive".into()));
    }
    let mut ctx = PipelineCtx {
        detector: &opts.detector,
        rng: match opts.policy {
            MeasurePolicy::Enumerate => None,
            MeasurePolicy::Sample(seed) => Some(StdRng::seed_from_u64(seed)),
        },
    };
    let eps = PI / (4.0 * 2f64.sqrt() * alpha);

    let start = state.clone().with_spin(Spin::G)?.apply_beamsplitter(mode_i, mode_j, FRAC_PI_2)?;

    let mut finished: Vec<RecordBranch> = Vec::new();
    // First two detections: x-like mode, then y-like mode.
    for b1 in ctx.detect_block(&start, mode_i)? {
        for b2 in ctx.detect_block(&b1.state, mode_j)? {
            let p12 = b1.probability * b2.probability;
            let outcomes = vec![b1.outcome, b2.outcome];
            match (b1.outcome, b2.outcome) {
                (Spin::E, Spin::G) => finished.push(RecordBranch {
                    outcomes,
                    probability: p12,
                    state: b2.state.clone(),
                    label: EcsLabel::Kind(EcsKind::PhiMinus),
                }),
                (Spin::G, Spin::E) => finished.push(RecordBranch {
                    outcomes,
                    probability: p12,
                    state: b2.state.clone(),
                    label: EcsLabel::Kind(EcsKind::PsiMinus),
                }),
                (Spin::E, Spin::E) => finished.push(RecordBranch {
                    outcomes,
                    probability: p12,
                    state: b2.state.clone(),
                    label: EcsLabel::Undetermined,
                }),
                (Spin::G, Spin::G) => {
                    // Ambiguous record: displace mode_i and re-run its
                    // detection; a flipped parity identifies φ+.
                    let displaced = b2.state.apply_displacement(mode_i, C64::from(-eps))?;
                    for b3 in ctx.detect_block(&displaced, mode_i)? {
                        let mut outcomes = outcomes.clone();
                        outcomes.push(b3.outcome);
                        let label = match b3.outcome {
                            Spin::E => EcsLabel::Kind(EcsKind::PhiPlus),
                            Spin::G => EcsLabel::Kind(EcsKind::PsiPlus),
                        };
                        finished.push(RecordBranch {
                            outcomes,
                            probability: p12 * b3.probability,
                            state: b3.state.clone(),
                            label,
                        });
                    }
                }
            }
        }
    }
    // Strip the ancilla spin from the collapsed states.
    for b in &mut finished {
        b.state = strip_spin(&b.state)?;
    }
    Ok(MeasurementRecord { branches: finished })
}

fn strip_spin(state: &IonVibState) -> Result<CoherentSuperposition> {
    let spin = state.terms().first().and_then(|t| t.spin);
    if spin.is_none() || state.terms().iter().any(|t| t.spin != spin) {
        return Err(Error::InvalidState("cannot strip an entangled electronic factor".into()));
    }
    let terms = state
        .terms()
        .iter()
        .map(|t| crate::symbolic::Term { weight: t.weight, amps: t.amps.clone(), spin: None })
        .collect();
    CoherentSuperposition::from_terms(state.n_modes(), terms)
}

/// Run the full §-style pipeline on one of the four canonical two-mode
/// entangled coherent states.
pub fn discriminate_ecs(kind: EcsKind, alpha: f64, opts: &DiscriminationOptions) -> Result<MeasurementRecord> {
    let input = ecs_superposition(kind, C64::from(alpha));
    quasi_bell_measure(&input, 0, 1, alpha, opts)
}

/// Worst-case correct-label probability over the four equiprobable inputs
/// under the enumerate policy with ideal detectors.
pub fn efficiency_estimate(alpha: f64) -> Result<f64> {
    let opts = DiscriminationOptions::default();
    let mut worst: f64 = 1.0;
    for kind in EcsKind::ALL {
        let record = discriminate_ecs(kind, alpha, &opts)?;
        worst = worst.min(record.label_probability(kind));
    }
    Ok(worst)
}
