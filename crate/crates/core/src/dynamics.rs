//! Time integrators for the truncated-space engines: the time-dependent
//! Schrödinger equation `iψ̇ = H(t)ψ` and the Lindblad master equation
//!
//! ```text
//! ρ̇ = -i[H, ρ] + Σ_k ( 2 J_k ρ J_k† - {J_k†J_k, ρ} )
//! ```
//!
//! (note the rate convention carries no ½: a single damping channel
//! `J = √Γ b̂` decays the one-phonon population as `e^{-2Γt}`).
//!
//! Both use an embedded Dormand–Prince 5(4) stepper with adaptive step
//! control, integrating segment by segment so the trajectory lands exactly
//! on the requested grid points.

use crate::error::{Error, Result};
use crate::hilbert::{self, DensityMatrix, ModeSpace, Operator, StateVector};
use crate::linalg::CMat;
use crate::C64;

/// Evenly spaced grid including both endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone)]
pub enum TrajectoryStates {
    Pure(Vec<StateVector>),
    Mixed(Vec<DensityMatrix>),
}

/// Integration output: states at the grid times plus named scalar series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: TrajectoryStates,
    pub observables: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn attach(&mut self, name: &str, series: Vec<f64>) {
        assert_eq!(series.len(), self.times.len());
        self.observables.push((name.to_string(), series));
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// `|⟨target|ψ(t)⟩|` for pure trajectories, `√⟨target|ρ|target⟩` for
    /// mixed ones.
    pub fn overlap_series(&self, target: &StateVector) -> Result<Vec<f64>> {
        match &self.states {
            TrajectoryStates::Pure(states) => {
                states.iter().map(|s| Ok(hilbert::overlap(target, s)?.norm())).collect()
            }
            TrajectoryStates::Mixed(states) => {
                states.iter().map(|r| Ok(hilbert::fidelity(r, target)?.max(0.0).sqrt())).collect()
            }
        }
    }

    /// `⟨target|ρ(t)|target⟩` (or `|⟨target|ψ⟩|²`).
    pub fn fidelity_series(&self, target: &StateVector) -> Result<Vec<f64>> {
        match &self.states {
            TrajectoryStates::Pure(states) => {
                states.iter().map(|s| Ok(hilbert::overlap(target, s)?.norm_sqr())).collect()
            }
            TrajectoryStates::Mixed(states) => states.iter().map(|r| hilbert::fidelity(r, target)).collect(),
        }
    }

    /// Real part of `⟨A⟩` along the trajectory.
    pub fn expectation_series(&self, op: &Operator) -> Result<Vec<f64>> {
        match &self.states {
            TrajectoryStates::Pure(states) => states.iter().map(|s| Ok(op.expectation(s).re)).collect(),
            TrajectoryStates::Mixed(states) => states
                .iter()
                .map(|r| {
                    r.space.check_compatible_with_op(&op.space)?;
                    Ok((&op.mat * &r.mat).trace().re)
                })
                .collect(),
        }
    }

    pub fn trace_series(&self) -> Vec<f64> {
        match &self.states {
            TrajectoryStates::Pure(states) => states.iter().map(|s| s.norm().powi(2)).collect(),
            TrajectoryStates::Mixed(states) => states.iter().map(|r| r.trace().re).collect(),
        }
    }

    pub fn linearized_entropy_series(&self) -> Result<Vec<f64>> {
        match &self.states {
            TrajectoryStates::Pure(_) => Err(Error::InvalidArgument(
                "linearized entropy series needs a density-matrix trajectory".into(),
            )),
            TrajectoryStates::Mixed(states) => states.iter().map(hilbert::linearized_entropy).collect(),
        }
    }

    pub fn final_pure(&self) -> Option<&StateVector> {
        match &self.states {
            TrajectoryStates::Pure(s) => s.last(),
            _ => None,
        }
    }

    pub fn final_mixed(&self) -> Option<&DensityMatrix> {
        match &self.states {
            TrajectoryStates::Mixed(s) => s.last(),
            _ => None,
        }
    }
}

impl ModeSpace {
    fn check_compatible_with_op(&self, other: &ModeSpace) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch("operator space differs from state space".into()));
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `y' = f(t, y)` from `t0` to `t1`, mutating `y` in place.
fn dp_segment<F>(f: &mut F, y: &mut CMat, t0: f64, t1: f64, tol: f64, h_init: &mut f64) -> Result<()>
where
    F: FnMut(f64, &CMat) -> CMat,
{
    let span = t1 - t0;
    if span <= 0.0 {
        return Err(Error::Integration("time grid must be strictly increasing".into()));
    }
    let mut t = t0;
    let mut h = h_init.min(span).max(1e-14);
    let mut k: Vec<CMat> = Vec::with_capacity(7);
    let mut rejected = 0usize;
    loop {
        if t >= t1 {
            break;
        }
        h = h.min(t1 - t);
        k.clear();
        k.push(f(t, y));
        for stage in 0..6 {
            let mut ys = y.clone();
            for (j, &a) in DP_A[stage].iter().enumerate() {
                if a != 0.0 {
                    ys += &k[j] * C64::from(a * h);
                }
            }
            k.push(f(t + DP_C[stage] * h, &ys));
        }
        let mut y5 = y.clone();
        let mut err = CMat::zeros(y.nrows(), y.ncols());
        for j in 0..7 {
            if DP_B5[j] != 0.0 {
                y5 += &k[j] * C64::from(DP_B5[j] * h);
            }
            let d = DP_B5[j] - DP_B4[j];
            if d != 0.0 {
                err += &k[j] * C64::from(d * h);
            }
        }
        let scale = tol * (1.0 + y.map(|x| x.norm()).max());
        let err_ratio = err.map(|x| x.norm()).max() / scale;
        if err_ratio <= 1.0 {
            *y = y5;
            t += h;
            rejected = 0;
        } else {
            rejected += 1;
            if rejected > 60 {
                return Err(Error::Integration(format!("step size underflow near t = {t}")));
            }
        }
        let factor = if err_ratio > 0.0 { 0.9 * err_ratio.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        if h < 1e-12 * span || t + h == t {
            return Err(Error::Integration(format!("step size underflow near t = {t}")));
        }
    }
    *h_init = h;
    Ok(())
}

/// Integrate the Schrödinger equation for a (possibly time-dependent)
/// Hamiltonian, recording the state at every grid time.
///
/// `tol` controls the local error per step. The Hamiltonian is checked for
/// Hermiticity at every grid point.
pub fn evolve_schrodinger<H>(mut h: H, psi0: &StateVector, t_grid: &[f64], tol: f64) -> Result<Trajectory>
where
    H: FnMut(f64) -> Operator,
{
    if t_grid.len() < 2 {
        return Err(Error::Integration("time grid needs at least two points".into()));
    }
    let space = psi0.space.clone();
    let mut states = Vec::with_capacity(t_grid.len());
    states.push(psi0.clone());
    let mut y = CMat::from_columns(&[psi0.amps.clone()]);
    let mut h_step = (t_grid[1] - t_grid[0]) / 16.0;
    for w in t_grid.windows(2) {
        let op = h(w[0]);
        if op.space != space {
            return Err(Error::DimensionMismatch("Hamiltonian space differs from state space".into()));
        }
        let dev = crate::linalg::hermiticity_deviation(&op.mat);
        let scale = 1.0 + crate::linalg::one_norm(&op.mat);
        if dev > 1e-9 * scale {
            return Err(Error::NonHermitian { t: w[0], dev });
        }
        let mut rhs = |t: f64, y: &CMat| -> CMat {
            let op = h(t);
            (&op.mat * y) * (-C64::i())
        };
        dp_segment(&mut rhs, &mut y, w[0], w[1], tol, &mut h_step)?;
        states.push(StateVector::new(space.clone(), y.column(0).into_owned())?);
    }
    Ok(Trajectory { times: t_grid.to_vec(), states: TrajectoryStates::Pure(states), observables: Vec::new() })
}

/// Integrate the Lindblad master equation with time-dependent jump
/// operators (rates included in the operators).
pub fn evolve_lindblad<H, J>(
    mut h: H,
    mut jumps: J,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    tol: f64,
) -> Result<Trajectory>
where
    H: FnMut(f64) -> Operator,
    J: FnMut(f64) -> Vec<Operator>,
{
    if t_grid.len() < 2 {
        return Err(Error::Integration("time grid needs at least two points".into()));
    }
    let space = rho0.space.clone();
    let dim = space.total_dim();
    for j in jumps(t_grid[0]) {
        if j.space != space {
            return Err(Error::DimensionMismatch("jump operator space differs from state space".into()));
        }
    }
    let mut states = Vec::with_capacity(t_grid.len());
    states.push(rho0.clone());
    let mut y = rho0.mat.clone();
    let mut h_step = (t_grid[1] - t_grid[0]) / 16.0;
    for w in t_grid.windows(2) {
        let op = h(w[0]);
        if op.space != space {
            return Err(Error::DimensionMismatch("Hamiltonian space differs from state space".into()));
        }
        let mut rhs = |t: f64, rho: &CMat| -> CMat {
            let hm = h(t).mat;
            let mut out = (&hm * rho - rho * &hm) * (-C64::i());
            for j in jumps(t) {
                let jm = &j.mat;
                let jd = jm.adjoint();
                let jdj = &jd * jm;
                out += (jm * rho * &jd) * C64::from(2.0) - &jdj * rho - rho * &jdj;
            }
            out
        };
        dp_segment(&mut rhs, &mut y, w[0], w[1], tol, &mut h_step)?;
        let _ = dim;
        states.push(DensityMatrix::new(space.clone(), y.clone())?);
    }
    Ok(Trajectory { times: t_grid.to_vec(), states: TrajectoryStates::Mixed(states), observables: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{operator_at, preset, PresetKind, PresetParams};
    use crate::hilbert::{coherent_state, ModeSpace};
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_hamiltonian_is_the_identity_evolution() {
        let space = ModeSpace::new(&[4]).unwrap();
        let psi0 = coherent_state(&space, 0, C64::from(0.5)).unwrap();
        let zero = Operator::new(space.clone(), CMat::zeros(4, 4)).unwrap();
        let grid = linspace(0.0, 3.0, 7);
        let traj = evolve_schrodinger(|_| zero.clone(), &psi0, &grid, 1e-10).unwrap();
        let ov = traj.overlap_series(&psi0).unwrap();
        for v in ov {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ideal_displacement_reaches_unit_overlap_at_the_drift_time() {
        // Stationary generator of the red-sideband preset, on a roomy space.
        let (_, list) = preset(PresetKind::Displacement, &PresetParams::default()).unwrap();
        let space = ModeSpace::new(&[24]).unwrap();
        let h = operator_at(&list.stationary_only(), 0.0, &space).unwrap();
        let psi0 = StateVector::vacuum(&space);
        let grid = linspace(0.0, 6.25, 26);
        let traj = evolve_schrodinger(|_| h.clone(), &psi0, &grid, 1e-10).unwrap();
        let target = coherent_state(&space, 0, C64::from(1.0)).unwrap();
        let ov = traj.overlap_series(&target).unwrap();
        assert!(ov.last().unwrap() >= &(1.0 - 1e-6), "final overlap {}", ov.last().unwrap());
        // Norm drift over the run stays tiny.
        for tr in traj.trace_series() {
            assert_abs_diff_eq!(tr, 1.0, epsilon = 1e-8);
        }
        // Starts at the coherent-vacuum overlap e^{-1/2}.
        assert_abs_diff_eq!(ov[0], (-0.5f64).exp(), epsilon = 1e-9);
    }

    #[test]
    fn energy_is_conserved_for_constant_hamiltonians() {
        let space = ModeSpace::new(&[6]).unwrap();
        let (_, list) = preset(PresetKind::Displacement, &PresetParams::default()).unwrap();
        let h = operator_at(&list, 0.4, &space).unwrap();
        let psi0 = coherent_state(&space, 0, C64::from(0.6)).unwrap();
        let grid = linspace(0.0, 10.0, 11);
        let traj = evolve_schrodinger(|_| h.clone(), &psi0, &grid, 1e-10).unwrap();
        let series = traj.expectation_series(&h).unwrap();
        let e0 = series[0];
        for e in series {
            assert!((e - e0).abs() <= 1e-7 * e0.abs().max(1.0), "energy drift {}", (e - e0).abs());
        }
    }

    #[test]
    fn non_hermitian_hamiltonian_is_rejected() {
        let space = ModeSpace::new(&[3]).unwrap();
        let mut m = CMat::zeros(3, 3);
        m[(0, 1)] = C64::from(1.0);
        let bad = Operator::new(space.clone(), m).unwrap();
        let psi0 = StateVector::vacuum(&space);
        let res = evolve_schrodinger(|_| bad.clone(), &psi0, &linspace(0.0, 1.0, 3), 1e-8);
        assert!(matches!(res, Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn lindblad_without_jumps_matches_schrodinger() {
        let space = ModeSpace::new(&[5]).unwrap();
        let (_, list) = preset(PresetKind::Displacement, &PresetParams::default()).unwrap();
        let parts = crate::hamiltonian::term_matrices(&list, &space).unwrap();
        let hfn = |t: f64| crate::hamiltonian::operator_at_cached(&parts, t, &space);
        let psi0 = coherent_state(&space, 0, C64::from(0.4)).unwrap();
        let grid = linspace(0.0, 2.0, 5);
        let pure = evolve_schrodinger(hfn, &psi0, &grid, 1e-10).unwrap();
        let mixed = evolve_lindblad(
            |t| crate::hamiltonian::operator_at_cached(&parts, t, &space),
            |_| Vec::new(),
            &psi0.to_density(),
            &grid,
            1e-10,
        )
        .unwrap();
        let target = pure.final_pure().unwrap();
        let f = hilbert::fidelity(mixed.final_mixed().unwrap(), target).unwrap();
        assert!((f - 1.0).abs() < 1e-6, "fidelity {f}");
    }

    #[test]
    fn single_mode_damping_decays_at_twice_the_rate() {
        // D[√Γ b̂] on |1⟩⟨1|: population e^{-2Γt} (no ½ in the convention).
        let space = ModeSpace::new(&[3]).unwrap();
        let gamma: f64 = 0.35;
        let jump = {
            let b = hilbert::annihilation(&space, 0).unwrap();
            Operator::new(space.clone(), b.mat * C64::from(gamma.sqrt())).unwrap()
        };
        let rho0 = StateVector::basis_state(&space, 0, &[1]).to_density();
        let zero = Operator::new(space.clone(), CMat::zeros(3, 3)).unwrap();
        let grid = linspace(0.0, 2.0, 9);
        let traj =
            evolve_lindblad(|_| zero.clone(), |_| vec![jump.clone()], &rho0, &grid, 1e-10).unwrap();
        if let TrajectoryStates::Mixed(states) = &traj.states {
            for (t, rho) in grid.iter().zip(states) {
                assert_abs_diff_eq!(rho.mat[(1, 1)].re, (-2.0 * gamma * t).exp(), epsilon = 1e-7);
            }
        }
        // Trace is preserved and the state stays positive.
        for tr in traj.trace_series() {
            assert_abs_diff_eq!(tr, 1.0, epsilon = 1e-8);
        }
        assert!(traj.final_mixed().unwrap().min_eigenvalue() >= -1e-9);
    }

    #[test]
    fn vacuum_is_a_fixed_point_of_damping() {
        let space = ModeSpace::new(&[4]).unwrap();
        let jump = {
            let b = hilbert::annihilation(&space, 0).unwrap();
            Operator::new(space.clone(), b.mat * C64::from(0.8)).unwrap()
        };
        let rho0 = StateVector::vacuum(&space).to_density();
        let zero = Operator::new(space.clone(), CMat::zeros(4, 4)).unwrap();
        let traj =
            evolve_lindblad(|_| zero.clone(), |_| vec![jump.clone()], &rho0, &linspace(0.0, 5.0, 6), 1e-10)
                .unwrap();
        let f = hilbert::fidelity(traj.final_mixed().unwrap(), &StateVector::vacuum(&space)).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn tightening_tolerance_converges_observables() {
        // Full time-dependent generator of the red-sideband preset.
        let (_, list) = preset(PresetKind::Displacement, &PresetParams::default()).unwrap();
        let space = ModeSpace::new(&[6, 2]).unwrap();
        let parts = crate::hamiltonian::term_matrices(&list, &space).unwrap();
        let psi0 = StateVector::vacuum(&space);
        let grid = linspace(0.0, 6.25, 21);
        let target = coherent_state(&space, 0, C64::from(1.0)).unwrap();
        let run = |tol: f64| {
            let traj = evolve_schrodinger(
                |t| crate::hamiltonian::operator_at_cached(&parts, t, &space),
                &psi0,
                &grid,
                tol,
            )
            .unwrap();
            traj.overlap_series(&target).unwrap()
        };
        let coarse = run(1e-8);
        let fine = run(1e-11);
        let max_diff = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_diff < 1e-5, "observable shift under refinement: {max_diff}");
    }
}
