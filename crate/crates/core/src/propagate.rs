//! Unitary and open-system time evolution.
//!
//! Pure states step with the midpoint exponential
//! `ψ ← exp(−i H(t + dt/2) dt) ψ`, which is unitary by construction and
//! second-order accurate. The exponential's action is summed as a Taylor
//! series on the vector (with sub-stepping when `‖H‖ dt` is large), so each
//! step costs a handful of sparse matvecs instead of an eigendecomposition.
//!
//! Density matrices step with classic RK4 on the Lindblad equation.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianFactory;
use crate::space::{
    max_abs, CMatrix, CVector, DensityMatrix, ModeLayout, Operator, StateVector, I, ONE, ZERO,
};
use crate::sparse::{Csr, Generator};

/// Uniform grid on `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t0: f64,
    t1: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t1: f64, steps: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::invalid(format!("time grid needs t1 > t0, got [{t0}, {t1}]")));
        }
        if steps == 0 {
            return Err(Error::invalid("time grid needs at least one step"));
        }
        Ok(TimeGrid { t0, t1, steps })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt()
    }
}

/// Step-size guidance: number of steps per radian of the fastest phase
/// (or of the generator norm, whichever is larger). The default of 20 keeps
/// `dt · ω_max ≤ 0.05`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridPolicy {
    pub steps_per_radian: u32,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            steps_per_radian: 20,
        }
    }
}

impl GridPolicy {
    pub fn new(steps_per_radian: u32) -> Result<Self> {
        if steps_per_radian == 0 {
            return Err(Error::invalid("grid policy needs at least one step per radian"));
        }
        Ok(GridPolicy { steps_per_radian })
    }

    pub fn recommended_steps(&self, duration: f64, rate: f64) -> usize {
        let n = (duration * rate * self.steps_per_radian as f64).ceil();
        if n.is_finite() && n >= 1.0 {
            n as usize
        } else {
            1
        }
    }

    /// Grid over `[t0, t0 + duration]` for a unitary run under `h`.
    pub fn grid_for(&self, h: &dyn HamiltonianFactory, t0: f64, duration: f64) -> Result<TimeGrid> {
        let steps = self.recommended_steps(duration, h.rate_scale(t0));
        TimeGrid::new(t0, t0 + duration, steps)
    }

    /// Grid for a master-equation run. The dissipator rates also set the
    /// scale, and the step density is quadrupled: RK4 has a local error of
    /// order `(rate·dt)^5` where the unitary stepper is exact per step.
    pub fn master_grid_for(
        &self,
        h: &dyn HamiltonianFactory,
        collapses: &[Operator],
        t0: f64,
        duration: f64,
    ) -> Result<TimeGrid> {
        let rate = h.rate_scale(t0) + dissipator_rate(collapses);
        TimeGrid::new(t0, t0 + duration, 4 * self.recommended_steps(duration, rate))
    }
}

/// Bound on `‖Σ C†C‖`, the decay-rate scale of a Lindblad dissipator.
pub fn dissipator_rate(collapses: &[Operator]) -> f64 {
    collapses
        .iter()
        .map(|c| Csr::from_dense(&(c.entries().adjoint() * c.entries())).row_bound())
        .sum()
}

/// `exp(−i H t)` via eigendecomposition of the Hermitian `H`.
pub fn expm_unitary(h: &Operator, t: f64) -> Result<Operator> {
    let scale = h.max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * scale {
        return Err(Error::invalid(format!(
            "expm_unitary needs a Hermitian generator (defect {defect:e})"
        )));
    }
    let herm = (h.entries() + h.entries().adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let phases = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, -l * t));
    let v = &eig.eigenvectors;
    let u = v * CMatrix::from_diagonal(&phases) * v.adjoint();
    Ok(Operator::from_parts(h.layout(), u, false))
}

/// `ψ ← exp(−i H dt) ψ` summed as a Taylor series.
fn expm_apply(gen: &Generator<'_>, dt: f64, psi: &mut CVector, scratch: &mut [CVector; 2]) {
    let norm = gen.norm_bound() * dt.abs();
    let substeps = (norm / 0.5).ceil().max(1.0) as usize;
    let h = dt / substeps as f64;
    let [term, next] = scratch;
    for _ in 0..substeps {
        term.copy_from(psi);
        for k in 1..=40 {
            let c = -I * (h / k as f64);
            gen.apply_scaled(c, term.as_slice(), next.as_mut_slice());
            std::mem::swap(term, next);
            *psi += &*term;
            if term.norm_squared() <= 1e-36 * psi.norm_squared() {
                break;
            }
        }
    }
}

/// Column values sampled along a trajectory.
#[derive(Debug, Clone)]
pub enum Probe {
    Population { label: String, index: usize },
    Amplitude { label: String, index: usize },
    Expectation { label: String, op: Operator },
}

impl Probe {
    fn columns(&self) -> Vec<String> {
        match self {
            Probe::Population { label, .. } | Probe::Expectation { label, .. } => {
                vec![label.clone()]
            }
            Probe::Amplitude { label, .. } => vec![format!("{label}_re"), format!("{label}_im")],
        }
    }

    fn sample(&self, psi: &CVector, out: &mut Vec<f64>) {
        match self {
            Probe::Population { index, .. } => out.push(psi[*index].norm_sqr()),
            Probe::Amplitude { index, .. } => {
                out.push(psi[*index].re);
                out.push(psi[*index].im);
            }
            Probe::Expectation { op, .. } => out.push(psi.dotc(&(op.entries() * psi)).re),
        }
    }
}

/// Recorded `(t, probes...)` rows from a unitary run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    probes: Vec<Probe>,
    every: usize,
    rows: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Record every `every`-th step (and always the final one).
    pub fn new(probes: Vec<Probe>, every: usize) -> Self {
        Trajectory {
            probes,
            every: every.max(1),
            rows: Vec::new(),
        }
    }

    pub fn header(&self) -> Vec<String> {
        std::iter::once("t".to_string())
            .chain(self.probes.iter().flat_map(Probe::columns))
            .collect()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn record(&mut self, t: f64, psi: &CVector) {
        let mut row = vec![t];
        for p in &self.probes {
            p.sample(psi, &mut row);
        }
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(self.header())?;
        for row in &self.rows {
            wr.write_record(row.iter().map(|x| format!("{x:.12e}")))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Midpoint-exponential propagation of a pure state.
pub fn propagate_td(
    h: &dyn HamiltonianFactory,
    grid: &TimeGrid,
    psi: &StateVector,
    mut trajectory: Option<&mut Trajectory>,
) -> Result<StateVector> {
    if psi.layout() != h.layout() {
        return Err(Error::invalid("state and Hamiltonian layouts differ"));
    }
    let dt = grid.dt();
    let phase_per_step = dt * h.fastest_frequency();
    if phase_per_step > 0.1 {
        log::warn!(
            "time step resolves the fastest phase poorly: dt·ω_max = {phase_per_step:.3} rad (> 0.1)"
        );
    }
    let dim = psi.layout().total_dim();
    let mut state = psi.amplitudes().clone();
    let mut scratch = [CVector::zeros(dim), CVector::zeros(dim)];
    if let Some(tr) = trajectory.as_deref_mut() {
        tr.record(grid.t0(), &state);
    }
    for k in 0..grid.steps() {
        let t_mid = grid.t0() + (k as f64 + 0.5) * dt;
        let gen = h.generator(t_mid);
        expm_apply(&gen, dt, &mut state, &mut scratch);
        if let Some(tr) = trajectory.as_deref_mut() {
            if (k + 1) % tr.every == 0 || k + 1 == grid.steps() {
                tr.record(grid.time(k + 1), &state);
            }
        }
    }
    if !state.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::numerical("non-finite amplitudes after propagation"));
    }
    Ok(StateVector::from_parts(psi.layout(), state))
}

struct Dissipator {
    collapses: Vec<Csr>,
    /// `Σ C†C`
    decay: Csr,
}

impl Dissipator {
    fn new(collapses: &[Operator], dim: usize) -> Self {
        let mut decay = CMatrix::zeros(dim, dim);
        for c in collapses {
            decay += c.entries().adjoint() * c.entries();
        }
        Dissipator {
            collapses: collapses.iter().map(|c| Csr::from_dense(c.entries())).collect(),
            decay: Csr::from_dense(&decay),
        }
    }

    /// Lindblad right-hand side for a Hermitian `rho`:
    /// `Y + Y† + Σ C ρ C†` with `Y = −i H ρ − ½ (Σ C†C) ρ`.
    fn rhs(&self, gen: &Generator<'_>, rho: &CMatrix, out: &mut CMatrix, tmp: &mut CMatrix) {
        out.fill(ZERO);
        gen.apply_matrix(-I, rho, out);
        self.decay.axpy_matrix(Complex64::new(-0.5, 0.0), rho, out);
        let y_dag = out.adjoint();
        *out += y_dag;
        for c in &self.collapses {
            tmp.fill(ZERO);
            c.axpy_matrix(ONE, rho, tmp);
            let rho_cdag = tmp.adjoint();
            c.axpy_matrix(ONE, &rho_cdag, out);
        }
    }
}

/// RK4 integration of the Lindblad master equation.
pub fn propagate_master(
    h: &dyn HamiltonianFactory,
    collapses: &[Operator],
    grid: &TimeGrid,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let layout: ModeLayout = rho.layout();
    if layout != h.layout() || collapses.iter().any(|c| c.layout() != layout) {
        return Err(Error::invalid("layouts of state, Hamiltonian and collapses differ"));
    }
    let dim = layout.total_dim();
    let diss = Dissipator::new(collapses, dim);
    let dt = grid.dt();
    let half = Complex64::new(0.5, 0.0);

    let mut r = rho.entries().clone();
    let mut k1 = CMatrix::zeros(dim, dim);
    let mut k2 = CMatrix::zeros(dim, dim);
    let mut k3 = CMatrix::zeros(dim, dim);
    let mut k4 = CMatrix::zeros(dim, dim);
    let mut tmp = CMatrix::zeros(dim, dim);
    let dtc = Complex64::new(dt, 0.0);

    for k in 0..grid.steps() {
        let t = grid.time(k);
        let g0 = h.generator(t);
        let gm = h.generator(t + 0.5 * dt);
        let g1 = h.generator(t + dt);

        diss.rhs(&g0, &r, &mut k1, &mut tmp);
        let stage = &r + &k1 * (dtc * half);
        diss.rhs(&gm, &stage, &mut k2, &mut tmp);
        let stage = &r + &k2 * (dtc * half);
        diss.rhs(&gm, &stage, &mut k3, &mut tmp);
        let stage = &r + &k3 * dtc;
        diss.rhs(&g1, &stage, &mut k4, &mut tmp);

        let incr = (&k1 + &k2 * Complex64::new(2.0, 0.0) + &k3 * Complex64::new(2.0, 0.0) + &k4)
            * (dtc / 6.0);
        r += incr;
        let sym = (&r + r.adjoint()) * half;
        r = sym;
    }
    if !r.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::numerical("non-finite density matrix after propagation"));
    }
    Ok(DensityMatrix::from_parts(layout, r))
}

/// Largest entry of `U†U − I`.
pub fn unitarity_defect(u: &Operator) -> f64 {
    let d = u.dim();
    max_abs(&(u.entries().adjoint() * u.entries() - CMatrix::identity(d, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{
        h_hadamard, h_phase, FnHamiltonian, HarmonicHamiltonian, HarmonicTerm, PhysParams,
    };
    use crate::space::{basis_state, embed, ion_operators, ladder_pair, Ion, Slot};
    use proptest::prelude::*;

    fn small() -> ModeLayout {
        ModeLayout::new(2, 2).unwrap()
    }

    fn sigma_x(layout: ModeLayout, scale: f64) -> Operator {
        let (sp, sm, _) = ion_operators();
        embed(&((&sp + &sm) * Complex64::new(scale, 0.0)), Slot::Ion, layout).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(1.0, 1.0, 10).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 0).is_err());
        let g = TimeGrid::new(0.0, 2.0, 8).unwrap();
        assert_eq!(g.dt(), 0.25);
        assert_eq!(GridPolicy::default().recommended_steps(1.0, 0.0), 1);
        assert_eq!(GridPolicy::default().recommended_steps(2.0, 3.0), 120);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let l = small();
        let u = expm_unitary(&Operator::zeros(l), 3.0).unwrap();
        assert!(u.sub(&Operator::identity(l)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn expm_sigma_x_half_turn() {
        let l = ModeLayout::new(3, 2).unwrap();
        let omega = 2.7;
        let u = expm_unitary(&sigma_x(l, omega), std::f64::consts::PI / (2.0 * omega)).unwrap();
        let want = sigma_x(l, 1.0).scale(-I);
        assert!(u.sub(&want).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let l = small();
        let (a, _) = ladder_pair(2).unwrap();
        let op = embed(&a, Slot::Vib, l).unwrap();
        assert!(matches!(expm_unitary(&op, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn phase_hamiltonian_two_pi_pulse() {
        let l = ModeLayout::new(5, 5).unwrap();
        let p = PhysParams::desk_default();
        let h = h_phase(&p, l).unwrap();
        let tau = std::f64::consts::PI / (p.eta_c * p.g);
        let u = expm_unitary(&h, tau).unwrap();
        let psi = basis_state(Ion::E, 1, 0, l).unwrap();
        let out = u.apply(&psi).unwrap();
        let amp = out.amplitude(Ion::E, 1, 0).unwrap();
        assert!((amp + ONE).norm() < 1e-12, "{amp}");
    }

    #[test]
    fn constant_factory_matches_single_exponential() {
        let l = ModeLayout::new(3, 3).unwrap();
        let p = PhysParams::desk_default();
        let hop = h_phase(&p, l).unwrap().add(&h_hadamard(&p, l).unwrap()).unwrap();
        let h = HarmonicHamiltonian::constant(hop.clone()).unwrap();
        let t = 3.0e-6;
        let psi = basis_state(Ion::G, 1, 0, l).unwrap();
        let grid = TimeGrid::new(0.0, t, 37).unwrap();
        let a = propagate_td(&h, &grid, &psi, None).unwrap();
        let b = expm_unitary(&hop, t).unwrap().apply(&psi).unwrap();
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-9);
    }

    #[test]
    fn rabi_oracle() {
        let l = small();
        let omega = 1.0;
        let h = HarmonicHamiltonian::constant(sigma_x(l, omega)).unwrap();
        let t = 1.3 / omega;
        let steps = (t / (1e-3 / omega)).round() as usize;
        let grid = TimeGrid::new(0.0, t, steps).unwrap();
        let psi = basis_state(Ion::G, 0, 0, l).unwrap();
        let out = propagate_td(&h, &grid, &psi, None).unwrap();
        let g = out.amplitude(Ion::G, 0, 0).unwrap();
        let e = out.amplitude(Ion::E, 0, 0).unwrap();
        assert!((g - Complex64::new((omega * t).cos(), 0.0)).norm() < 1e-8);
        assert!((e - Complex64::new(0.0, -(omega * t).sin())).norm() < 1e-8);
    }

    #[test]
    fn closure_factory_runs_through_dense_path() {
        let l = small();
        let sx = sigma_x(l, 0.8);
        let h = FnHamiltonian::new(l, 0.0, move |_| sx.clone());
        let grid = TimeGrid::new(0.0, 2.0, 50).unwrap();
        let psi = basis_state(Ion::G, 0, 0, l).unwrap();
        let out = propagate_td(&h, &grid, &psi, None).unwrap();
        let g = out.amplitude(Ion::G, 0, 0).unwrap();
        assert!((g.re - (1.6f64).cos()).abs() < 1e-12);
    }

    #[test]
    fn norm_drift_over_ten_thousand_steps() {
        let l = ModeLayout::new(3, 3).unwrap();
        let p = PhysParams::desk_default();
        let h = crate::hamiltonian::h_interaction(
            &p,
            l,
            crate::hamiltonian::TermMask::all(),
        )
        .unwrap();
        let mut amps = CVector::from_fn(l.total_dim(), |i, _| {
            Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())
        });
        amps /= Complex64::new(amps.norm(), 0.0);
        let psi = StateVector::new(l, amps).unwrap();
        let grid = TimeGrid::new(0.0, 1e4 * 0.05 / h.rate_scale(0.0), 10_000).unwrap();
        let out = propagate_td(&h, &grid, &psi, None).unwrap();
        assert!((out.norm_squared() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn composition_of_intervals() {
        let l = ModeLayout::new(3, 2).unwrap();
        let (sp, _, _) = ion_operators();
        let drive = embed(&sp, Slot::Ion, l).unwrap().scale(Complex64::new(0.9, 0.0));
        let h = HarmonicHamiltonian::new(
            sigma_x(l, 0.2),
            vec![HarmonicTerm::new("drive", drive, 1.7)],
        )
        .unwrap();
        let psi = basis_state(Ion::G, 1, 0, l).unwrap();
        let whole = propagate_td(&h, &TimeGrid::new(0.0, 3.0, 300).unwrap(), &psi, None).unwrap();
        let first = propagate_td(&h, &TimeGrid::new(0.0, 1.2, 120).unwrap(), &psi, None).unwrap();
        let second =
            propagate_td(&h, &TimeGrid::new(1.2, 3.0, 180).unwrap(), &first, None).unwrap();
        assert!((whole.amplitudes() - second.amplitudes()).norm() < 1e-10);
    }

    #[test]
    fn trajectory_csv_has_header_and_rows() {
        let l = small();
        let h = HarmonicHamiltonian::constant(sigma_x(l, 1.0)).unwrap();
        let grid = TimeGrid::new(0.0, 1.0, 10).unwrap();
        let mut tr = Trajectory::new(
            vec![
                Probe::Population {
                    label: "p_e00".into(),
                    index: l.index(Ion::E, 0, 0).unwrap(),
                },
                Probe::Amplitude {
                    label: "a_g00".into(),
                    index: 0,
                },
            ],
            5,
        );
        let psi = basis_state(Ion::G, 0, 0, l).unwrap();
        propagate_td(&h, &grid, &psi, Some(&mut tr)).unwrap();
        assert_eq!(tr.rows().len(), 3);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,p_e00,a_g00_re,a_g00_im\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn master_closed_system_limit() {
        let l = ModeLayout::new(3, 3).unwrap();
        let p = PhysParams::desk_default();
        let hop = h_phase(&p, l).unwrap().add(&h_hadamard(&p, l).unwrap()).unwrap();
        let h = HarmonicHamiltonian::constant(hop).unwrap();
        let psi = basis_state(Ion::E, 1, 0, l).unwrap();
        let t = 2.0e-5;
        let grid = GridPolicy::default().master_grid_for(&h, &[], 0.0, t).unwrap();
        let rho = propagate_master(&h, &[], &grid, &psi.to_density()).unwrap();
        let pure = propagate_td(&h, &grid, &psi, None).unwrap().to_density();
        let dev = max_abs(&(rho.entries() - pure.entries()));
        assert!(dev < 1e-7, "{dev:e} over {} steps", grid.steps());
        assert!((rho.trace() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn master_cavity_decay() {
        let l = ModeLayout::new(2, 3).unwrap();
        let kappa: f64 = 1.0e6;
        let (b, bd) = ladder_pair(3).unwrap();
        let c = embed(&(&b * Complex64::new(kappa.sqrt(), 0.0)), Slot::Cav, l).unwrap();
        let n_c = embed(&(&bd * &b), Slot::Cav, l).unwrap();
        let h = HarmonicHamiltonian::constant(Operator::zeros(l)).unwrap();
        let rho0 = basis_state(Ion::G, 0, 1, l).unwrap().to_density();
        let t = 1.0 / kappa;
        let grid = GridPolicy::default()
            .master_grid_for(&h, std::slice::from_ref(&c), 0.0, t)
            .unwrap();
        let rho = propagate_master(&h, &[c], &grid, &rho0).unwrap();
        let n = rho.expectation(&n_c).unwrap().re;
        assert!((n - (-1.0f64).exp()).abs() < 1e-6, "{n}");
        assert!((rho.trace() - 1.0).abs() < 1e-8);
        assert!(rho.min_eigenvalue() > -1e-7);
    }

    #[test]
    fn master_spontaneous_emission() {
        let l = small();
        let gamma: f64 = 2.0e5;
        let (_, sm, sz) = ion_operators();
        let c = embed(&(&sm * Complex64::new(gamma.sqrt(), 0.0)), Slot::Ion, l).unwrap();
        let pe = embed(&((sz + CMatrix::identity(2, 2)) * Complex64::new(0.5, 0.0)), Slot::Ion, l)
            .unwrap();
        let h = HarmonicHamiltonian::constant(Operator::zeros(l)).unwrap();
        let rho0 = basis_state(Ion::E, 0, 0, l).unwrap().to_density();
        let t = 2.0 / gamma;
        let grid = GridPolicy::default()
            .master_grid_for(&h, std::slice::from_ref(&c), 0.0, t)
            .unwrap();
        let rho = propagate_master(&h, &[c], &grid, &rho0).unwrap();
        let p = rho.expectation(&pe).unwrap().re;
        assert!((p - (-2.0f64).exp()).abs() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn expm_is_unitary(seed in 0u64..10_000, t in -50.0f64..50.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let l = ModeLayout::new(3, 2).unwrap();
            let d = l.total_dim();
            let a = CMatrix::from_fn(d, d, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let h = Operator::new(l, (&a + a.adjoint()) * Complex64::new(0.5, 0.0), true).unwrap();
            let u = expm_unitary(&h, t).unwrap();
            prop_assert!(unitarity_defect(&u) < 1e-11);
        }
    }
}
