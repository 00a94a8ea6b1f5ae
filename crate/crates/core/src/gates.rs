//! Pulse-level CNOT protocol and its analysis.
//!
//! Qubit encoding: control = vibration `{|0⟩_v, |1⟩_v}`, target = ion
//! `{g → 0, e → 1}`, cavity held in vacuum. Logical index of
//! `|n_v, s⟩` is `2·n_v + s`, giving the basis order `00, 01, 10, 11`.
//!
//! The carrier pulse of duration `π/(4Ω)` realizes `exp(−iπσx/4)`, an
//! x-rotation rather than a textbook Hadamard. The three-pulse composite is
//! therefore a CNOT only up to single-qubit rotations, and the report
//! carries three fidelity tiers: raw, after fitting local Z phases, and
//! after optimizing over arbitrary local unitaries. Makhlin invariants
//! certify the local-equivalence class independently of any optimizer.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    h_free, h_hadamard, h_interaction, h_lab, h_phase, HarmonicHamiltonian, PhysParams,
    ResonanceMode, TermMask,
};
use crate::propagate::{expm_unitary, propagate_td, GridPolicy};
use crate::space::{basis_state, CVector, Ion, ModeLayout, StateVector, I, ONE, ZERO};

pub type Matrix4c = Matrix4<Complex64>;
type Matrix2c = Matrix2<Complex64>;

/// Which Hamiltonian drives a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Resonant effective Hamiltonians, exact exponentials.
    #[default]
    Effective,
    /// Seven-term interaction-picture Hamiltonian.
    Full,
    /// Lab-frame Hamiltonian with exact Lamb-Dicke functions.
    Lab,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Effective => "effective",
            Model::Full => "full",
            Model::Lab => "lab",
        })
    }
}

/// One switch setting of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseStep {
    pub resonance: ResonanceMode,
    pub duration: f64,
    pub model: Model,
}

impl PulseStep {
    pub fn new(resonance: ResonanceMode, duration: f64, model: Model) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::invalid(format!(
                "pulse duration must be positive, got {duration}"
            )));
        }
        Ok(PulseStep {
            resonance,
            duration,
            model,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    steps: Vec<PulseStep>,
    layout: ModeLayout,
    params: PhysParams,
}

impl PulseSequence {
    pub fn new(steps: Vec<PulseStep>, layout: ModeLayout, params: PhysParams) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::invalid("pulse sequence must contain at least one step"));
        }
        Ok(PulseSequence {
            steps,
            layout,
            params,
        })
    }

    pub fn steps(&self) -> &[PulseStep] {
        &self.steps
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn total_duration(&self) -> f64 {
        self.steps.iter().map(|s| s.duration).sum()
    }

    /// Same schedule with every step switched to `model`.
    pub fn with_model(&self, model: Model) -> PulseSequence {
        let steps = self
            .steps
            .iter()
            .map(|s| PulseStep { model, ..*s })
            .collect();
        PulseSequence {
            steps,
            layout: self.layout,
            params: self.params,
        }
    }
}

/// Carrier π/2 pulse, duration `π/(4Ω)`.
pub fn hadamard_pulse(params: &PhysParams, model: Model) -> Result<PulseStep> {
    if !(params.rabi.is_finite() && params.rabi > 0.0) {
        return Err(Error::invalid("hadamard pulse needs Omega > 0"));
    }
    PulseStep::new(ResonanceMode::Carrier, PI / (4.0 * params.rabi), model)
}

/// Anti-Jaynes-Cummings 2π pulse, duration `π/(η_c g)`.
pub fn phase_pulse(params: &PhysParams, model: Model) -> Result<PulseStep> {
    let coupling = params.eta_c * params.g;
    if !(coupling.is_finite() && coupling > 0.0) {
        return Err(Error::invalid("phase pulse needs eta_c * g > 0"));
    }
    PulseStep::new(ResonanceMode::PhaseGate, PI / coupling, model)
}

/// Carrier pulse, phase pulse, carrier pulse.
pub fn cnot_sequence(params: &PhysParams, layout: ModeLayout, model: Model) -> Result<PulseSequence> {
    let had = hadamard_pulse(params, model)?;
    let pha = phase_pulse(params, model)?;
    PulseSequence::new(vec![had, pha, had], layout, *params)
}

/// Hamiltonian and frame of one step.
pub(crate) struct StepDynamics {
    pub hamiltonian: HarmonicHamiltonian,
    /// Diagonal of the free Hamiltonian for lab-frame steps; states between
    /// steps are kept in the interaction picture.
    pub frame: Option<Vec<f64>>,
}

impl StepDynamics {
    pub fn new(step: &PulseStep, params: &PhysParams, layout: ModeLayout, mask: TermMask) -> Result<Self> {
        let tuned = step.resonance.apply(params);
        let (hamiltonian, frame) = match step.model {
            Model::Effective => (HarmonicHamiltonian::constant(effective_operator(step, &tuned, layout)?)?, None),
            Model::Full => (h_interaction(&tuned, layout, mask)?, None),
            Model::Lab => {
                let free = h_free(&tuned, layout)?;
                let diag = (0..layout.total_dim()).map(|i| free.entries()[(i, i)].re).collect();
                (h_lab(&tuned, layout)?, Some(diag))
            }
        };
        Ok(StepDynamics { hamiltonian, frame })
    }

    /// `exp(sign · i H₀ t)` as a diagonal of phases.
    pub fn frame_phases(&self, t: f64, sign: f64) -> Option<CVector> {
        self.frame.as_ref().map(|d| {
            CVector::from_iterator(d.len(), d.iter().map(|e| Complex64::from_polar(1.0, sign * e * t)))
        })
    }
}

fn effective_operator(
    step: &PulseStep,
    tuned: &PhysParams,
    layout: ModeLayout,
) -> Result<crate::space::Operator> {
    match step.resonance {
        ResonanceMode::Carrier => h_hadamard(tuned, layout),
        ResonanceMode::PhaseGate => h_phase(tuned, layout),
        ResonanceMode::Custom { .. } => Ok(h_interaction(tuned, layout, TermMask::all())?.resonant_part()),
    }
}

/// Propagate one step starting at sequence time `t_start`, optionally with a
/// reduced term set for Full-model steps.
pub fn run_step_masked(
    step: &PulseStep,
    params: &PhysParams,
    input: &StateVector,
    t_start: f64,
    policy: GridPolicy,
    mask: TermMask,
) -> Result<StateVector> {
    let layout = input.layout();
    let dynamics = StepDynamics::new(step, params, layout, mask)?;
    match step.model {
        Model::Effective => {
            let u = expm_unitary(dynamics.hamiltonian.static_part(), step.duration)?;
            u.apply(input)
        }
        Model::Full => {
            let grid = policy.grid_for(&dynamics.hamiltonian, t_start, step.duration)?;
            propagate_td(&dynamics.hamiltonian, &grid, input, None)
        }
        Model::Lab => {
            let t_end = t_start + step.duration;
            let into_lab = dynamics.frame_phases(t_start, -1.0).expect("lab step has a frame");
            let lab_in = StateVector::from_parts(layout, input.amplitudes().component_mul(&into_lab));
            let grid = policy.grid_for(&dynamics.hamiltonian, t_start, step.duration)?;
            let lab_out = propagate_td(&dynamics.hamiltonian, &grid, &lab_in, None)?;
            let back = dynamics.frame_phases(t_end, 1.0).expect("lab step has a frame");
            Ok(StateVector::from_parts(layout, lab_out.amplitudes().component_mul(&back)))
        }
    }
}

/// Apply every step in order; parameters switch instantaneously between
/// steps and the interaction-picture clock runs continuously.
pub fn run_sequence(seq: &PulseSequence, input: &StateVector, policy: GridPolicy) -> Result<StateVector> {
    if input.layout() != seq.layout {
        return Err(Error::invalid("input state layout differs from the sequence layout"));
    }
    let norm = input.norm_squared();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("input state not normalized (norm² = {norm})")));
    }
    let mut psi = input.clone();
    let mut t = 0.0;
    for step in &seq.steps {
        psi = run_step_masked(step, &seq.params, &psi, t, policy, TermMask::all())?;
        t += step.duration;
    }
    Ok(psi)
}

/// Logical basis state `|n_v, s⟩ ⊗ |0⟩_c` for `k = 2·n_v + s`.
pub fn logical_state(k: usize, layout: ModeLayout) -> Result<StateVector> {
    if k >= 4 {
        return Err(Error::invalid(format!("logical index {k} out of range")));
    }
    basis_state(Ion::from_index(k % 2).expect("k % 2 < 2"), k / 2, 0, layout)
}

pub(crate) fn logical_indices(layout: ModeLayout) -> [usize; 4] {
    [0, 1, 2, 3].map(|k| layout.index_unchecked(k % 2, k / 2, 0))
}

/// Ideal CNOT, control = first qubit.
pub fn cnot() -> Matrix4c {
    let mut m = Matrix4c::zeros();
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// Makhlin local invariants `(G1, G2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Makhlin {
    pub g1: Complex64,
    pub g2: f64,
}

/// Measured action of a pulse sequence on the logical subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    /// Column `k` is the projected output for logical input `k`.
    pub logical_matrix: Matrix4c,
    pub leakage_per_input: [f64; 4],
    pub raw_fidelity: f64,
    pub phase_fitted_fidelity: f64,
    pub local_equiv_fidelity: f64,
    pub makhlin: Makhlin,
}

pub const LOGICAL_BASIS: [&str; 4] = ["00", "01", "10", "11"];

/// Round to 12 significant digits so serialized reports are byte-stable.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub(crate) fn complex_json(z: Complex64) -> serde_json::Value {
    serde_json::json!([sig12(z.re), sig12(z.im)])
}

impl GateReport {
    pub fn to_json(&self) -> serde_json::Value {
        let matrix: Vec<Vec<serde_json::Value>> = (0..4)
            .map(|r| (0..4).map(|c| complex_json(self.logical_matrix[(r, c)])).collect())
            .collect();
        serde_json::json!({
            "basis": LOGICAL_BASIS,
            "logical_matrix": matrix,
            "leakage_per_input": self.leakage_per_input.map(sig12),
            "raw_fidelity": sig12(self.raw_fidelity),
            "phase_fitted_fidelity": sig12(self.phase_fitted_fidelity),
            "local_equiv_fidelity": sig12(self.local_equiv_fidelity),
            "makhlin": [complex_json(self.makhlin.g1), sig12(self.makhlin.g2)],
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Propagate the four logical inputs and analyze the resulting 4×4 action.
pub fn truth_table(seq: &PulseSequence, policy: GridPolicy) -> Result<GateReport> {
    let layout = seq.layout;
    let outputs: Vec<StateVector> = (0..4)
        .into_par_iter()
        .map(|k| run_sequence(seq, &logical_state(k, layout)?, policy))
        .collect::<Result<_>>()?;
    Ok(analyze_outputs(&outputs, layout))
}

pub(crate) fn analyze_outputs(outputs: &[StateVector], layout: ModeLayout) -> GateReport {
    let idx = logical_indices(layout);
    let mut m = Matrix4c::zeros();
    let mut leakage = [0.0; 4];
    for (k, out) in outputs.iter().enumerate() {
        let amps = out.amplitudes();
        for (j, &i) in idx.iter().enumerate() {
            m[(j, k)] = amps[i];
        }
        leakage[k] = amps
            .iter()
            .enumerate()
            .filter(|(i, _)| !idx.contains(i))
            .map(|(_, a)| a.norm_sqr())
            .sum();
    }
    analyze_matrix(m, leakage)
}

pub(crate) fn analyze_matrix(m: Matrix4c, leakage: [f64; 4]) -> GateReport {
    let ideal = cnot();
    let raw = (m.adjoint() * ideal).trace().norm() / 4.0;
    let phase = local_phase_fit(&m, &ideal).fidelity;
    let unitary = nearest_unitary(&m);
    let local = local_equiv_fidelity(&m, &ideal);
    let makhlin = makhlin_unchecked(&unitary);
    GateReport {
        logical_matrix: m,
        leakage_per_input: leakage,
        raw_fidelity: raw,
        phase_fitted_fidelity: phase,
        local_equiv_fidelity: local,
        makhlin,
    }
}

/// Closest unitary in Frobenius norm (polar factor).
pub fn nearest_unitary(m: &Matrix4c) -> Matrix4c {
    let svd = m.svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

/// Phases found by [`local_phase_fit`]: global `φ0`, output `φ1, φ2`,
/// input `φ3, φ4`, each in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit {
    pub fidelity: f64,
    pub phases: [f64; 5],
}

fn z_phase(bit: usize, phi: f64) -> Complex64 {
    if bit == 1 {
        Complex64::from_polar(1.0, phi)
    } else {
        ONE
    }
}

/// `e^{iφ0} (Z(φ1) ⊗ Z(φ2)) U (Z(φ3) ⊗ Z(φ4))` with `Z(φ) = diag(1, e^{iφ})`.
pub fn apply_phases(u: &Matrix4c, phases: &[f64; 5]) -> Matrix4c {
    let [p0, p1, p2, p3, p4] = *phases;
    Matrix4c::from_fn(|i, j| {
        Complex64::from_polar(1.0, p0)
            * z_phase(i >> 1, p1)
            * z_phase(i & 1, p2)
            * u[(i, j)]
            * z_phase(j >> 1, p3)
            * z_phase(j & 1, p4)
    })
}

/// Maximize `Re tr(Ũ† U_ideal)/4` over one global and four local Z phases.
///
/// Coarse 16-point grid per local phase, then exact coordinate ascent: the
/// trace is affine in each `e^{-iφ_k}`, so every coordinate update is a
/// closed-form argument match. The global phase is always `arg S`.
pub fn local_phase_fit(actual: &Matrix4c, ideal: &Matrix4c) -> PhaseFit {
    // q_ij = conj(u_ij) ideal_ij; S(φ) = Σ q_ij e^{-i(local phases)}
    let q = Matrix4c::from_fn(|i, j| actual[(i, j)].conj() * ideal[(i, j)]);
    let bits = |i: usize, j: usize| [i >> 1, i & 1, j >> 1, j & 1];
    let s_of = |phi: &[f64; 4]| -> Complex64 {
        let mut s = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                let b = bits(i, j);
                let angle: f64 = (0..4).map(|k| b[k] as f64 * phi[k]).sum();
                s += q[(i, j)] * Complex64::from_polar(1.0, -angle);
            }
        }
        s
    };

    let n = 16;
    let step = 2.0 * PI / n as f64;
    let mut best = ([0.0; 4], s_of(&[0.0; 4]).norm());
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let phi = [a as f64 * step, b as f64 * step, c as f64 * step, d as f64 * step];
                    let v = s_of(&phi).norm();
                    if v > best.1 + 1e-15 {
                        best = (phi, v);
                    }
                }
            }
        }
    }

    let mut phi = best.0;
    for _ in 0..10_000 {
        let mut moved = 0.0_f64;
        for k in 0..4 {
            // split S = A + B e^{-iφ_k}
            let mut a = ZERO;
            let mut bsum = ZERO;
            for i in 0..4 {
                for j in 0..4 {
                    let bb = bits(i, j);
                    let angle: f64 = (0..4).filter(|&m| m != k).map(|m| bb[m] as f64 * phi[m]).sum();
                    let term = q[(i, j)] * Complex64::from_polar(1.0, -angle);
                    if bb[k] == 1 {
                        bsum += term;
                    } else {
                        a += term;
                    }
                }
            }
            if a.norm() == 0.0 || bsum.norm() == 0.0 {
                continue;
            }
            let new = (bsum.arg() - a.arg()).rem_euclid(2.0 * PI);
            let delta = (new - phi[k] + PI).rem_euclid(2.0 * PI) - PI;
            moved = moved.max(delta.abs());
            phi[k] = new;
        }
        if moved < 1e-6 {
            break;
        }
    }
    let s = s_of(&phi);
    let phases = [s.arg(), phi[0], phi[1], phi[2], phi[3]].map(|p| p.rem_euclid(2.0 * PI));
    PhaseFit {
        fidelity: s.norm() / 4.0,
        phases,
    }
}

fn magic_basis() -> Matrix4c {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = I * h;
    Matrix4c::new(
        h, ZERO, ZERO, i, //
        ZERO, i, h, ZERO, //
        ZERO, i, -h, ZERO, //
        h, ZERO, ZERO, -i,
    )
}

/// Makhlin invariants of a two-qubit unitary.
pub fn makhlin_invariants(u: &Matrix4c) -> Result<Makhlin> {
    let defect = (u.adjoint() * u - Matrix4c::identity())
        .iter()
        .fold(0.0_f64, |a, z| a.max(z.norm()));
    if defect > 1e-9 {
        return Err(Error::invalid(format!(
            "makhlin invariants need a unitary (defect {defect:e})"
        )));
    }
    Ok(makhlin_unchecked(u))
}

fn makhlin_unchecked(u: &Matrix4c) -> Makhlin {
    let q = magic_basis();
    let ub = q.adjoint() * u * q;
    let m = ub.transpose() * ub;
    let det = u.determinant();
    let tr = m.trace();
    let tr2 = (m * m).trace();
    Makhlin {
        g1: tr * tr / (det * 16.0),
        g2: ((tr * tr - tr2) / (det * 4.0)).re,
    }
}

fn kron2(a: &Matrix2c, b: &Matrix2c) -> Matrix4c {
    Matrix4c::from_fn(|r, c| a[(r >> 1, c >> 1)] * b[(r & 1, c & 1)])
}

/// `argmax_X |tr(X R)|` over 2×2 unitaries: `X = V W†` for `R = W Σ V†`.
fn best_unitary(r: &Matrix2c) -> Matrix2c {
    let svd = r.svd(true, true);
    let w = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    v_t.adjoint() * w.adjoint()
}

/// Reduce `tr((A⊗B) M)` to `tr(A R)` (first factor) or `tr(B R)` (second).
fn reduce(m: &Matrix4c, other: &Matrix2c, first: bool) -> Matrix2c {
    let mut r = Matrix2c::zeros();
    for x in 0..2 {
        for y in 0..2 {
            let mut acc = ZERO;
            for k in 0..2 {
                for l in 0..2 {
                    // first: R[j][i] = Σ_kl B_kl M[2j+l][2i+k]
                    // second: S[l][k] = Σ_ij A_ij M[2j+l][2i+k]
                    acc += if first {
                        other[(k, l)] * m[(2 * x + l, 2 * y + k)]
                    } else {
                        other[(k, l)] * m[(2 * l + x, 2 * k + y)]
                    };
                }
            }
            r[(x, y)] = acc;
        }
    }
    r
}

pub(crate) fn random_su2<R: Rng>(rng: &mut R) -> Matrix2c {
    let theta: f64 = rng.random::<f64>() * PI / 2.0;
    let psi: f64 = rng.random::<f64>() * 2.0 * PI;
    let chi: f64 = rng.random::<f64>() * 2.0 * PI;
    let (s, c) = theta.sin_cos();
    Matrix2c::new(
        Complex64::from_polar(c, psi),
        Complex64::from_polar(s, chi),
        -Complex64::from_polar(s, -chi),
        Complex64::from_polar(c, -psi),
    )
}

/// `max |tr((A⊗B) U (C⊗D) V†)|/4` over single-qubit unitaries `A..D`.
///
/// Alternating exact maximization (each factor in turn gets its optimal
/// polar factor) from a fixed set of deterministic starts.
pub fn local_equiv_fidelity(actual: &Matrix4c, ideal: &Matrix4c) -> f64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best = 0.0_f64;
    for start in 0..8 {
        let (mut b, mut c, mut d) = if start == 0 {
            (Matrix2c::identity(), Matrix2c::identity(), Matrix2c::identity())
        } else {
            (random_su2(&mut rng), random_su2(&mut rng), random_su2(&mut rng))
        };
        let mut value = 0.0;
        for _ in 0..500 {
            // left factors against M = U (C⊗D) V†
            let m = actual * kron2(&c, &d) * ideal.adjoint();
            let a = best_unitary(&reduce(&m, &b, true));
            b = best_unitary(&reduce(&m, &a, false));
            // right factors against M' = V† (A⊗B) U
            let mp = ideal.adjoint() * kron2(&a, &b) * actual;
            c = best_unitary(&reduce(&mp, &d, true));
            d = best_unitary(&reduce(&mp, &c, false));
            let new = (kron2(&a, &b) * actual * kron2(&c, &d) * ideal.adjoint())
                .trace()
                .norm()
                / 4.0;
            let gain = new - value;
            value = new;
            if gain < 1e-15 {
                break;
            }
        }
        best = best.max(value);
        if best > 1.0 - 1e-14 {
            break;
        }
    }
    best.min(1.0)
}
