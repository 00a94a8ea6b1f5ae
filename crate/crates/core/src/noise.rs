//! Open-system evaluation of the pulse schedule: cavity loss, spontaneous
//! emission and motional heating as Lindblad channels.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{
    hadamard_pulse, logical_state, phase_pulse, run_sequence, sig12, Model, PulseSequence,
    StepDynamics,
};
use crate::hamiltonian::TermMask;
use crate::propagate::{propagate_master, GridPolicy};
use crate::space::{embed, ion_operators, ladder_pair, DensityMatrix, ModeLayout, Operator, Slot, StateVector};

/// Decoherence rates in 1/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    /// Cavity energy decay rate, `1/τ_c`.
    pub kappa: f64,
    #[serde(default)]
    pub gamma: f64,
    /// Motional quanta gained (and lost) per second.
    #[serde(default)]
    pub heating_rate: f64,
}

impl NoiseParams {
    pub fn new(kappa: f64, gamma: f64, heating_rate: f64) -> Result<Self> {
        let n = NoiseParams {
            kappa,
            gamma,
            heating_rate,
        };
        n.validate()?;
        Ok(n)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("heating_rate", self.heating_rate),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation(format!(
                    "{name} must be a non-negative finite number"
                )));
            }
        }
        Ok(())
    }

    /// Optical cavity, `τ_c = 1 μs`.
    pub fn optical() -> Self {
        NoiseParams {
            kappa: 1e6,
            ..Default::default()
        }
    }

    /// Microwave cavity, `τ_c = 0.2 s`.
    pub fn microwave() -> Self {
        NoiseParams {
            kappa: 5.0,
            ..Default::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kappa == 0.0 && self.gamma == 0.0 && self.heating_rate == 0.0
    }

    /// Photon lifetime, `None` for a lossless cavity.
    pub fn tau_c(&self) -> Option<f64> {
        (self.kappa > 0.0).then(|| 1.0 / self.kappa)
    }
}

/// `√κ b`, `√γ σ−`, `√h a†`, `√h a`, skipping zero rates.
pub fn collapse_ops(noise: &NoiseParams, layout: ModeLayout) -> Result<Vec<Operator>> {
    noise.validate()?;
    let mut out = Vec::new();
    let c = |x: f64| num_complex::Complex64::new(x.sqrt(), 0.0);
    if noise.kappa > 0.0 {
        let (b, _) = ladder_pair(layout.cav_cutoff())?;
        out.push(embed(&(b * c(noise.kappa)), Slot::Cav, layout)?);
    }
    if noise.gamma > 0.0 {
        let (_, sm, _) = ion_operators();
        out.push(embed(&(sm * c(noise.gamma)), Slot::Ion, layout)?);
    }
    if noise.heating_rate > 0.0 {
        let (a, ad) = ladder_pair(layout.vib_cutoff())?;
        out.push(embed(&(ad * c(noise.heating_rate)), Slot::Vib, layout)?);
        out.push(embed(&(a * c(noise.heating_rate)), Slot::Vib, layout)?);
    }
    Ok(out)
}

/// Master-equation counterpart of [`run_sequence`].
pub fn run_sequence_master(
    seq: &PulseSequence,
    rho: &DensityMatrix,
    noise: &NoiseParams,
    policy: GridPolicy,
) -> Result<DensityMatrix> {
    let layout = seq.layout();
    if rho.layout() != layout {
        return Err(Error::invalid("density matrix layout differs from the sequence layout"));
    }
    let collapses = collapse_ops(noise, layout)?;
    let mut rho = rho.clone();
    let mut t = 0.0;
    for step in seq.steps() {
        let dyn_ = StepDynamics::new(step, seq.params(), layout, TermMask::all())?;
        // Effective steps carry no clock; frame phases only matter for Lab.
        let t0 = if step.model == Model::Effective { 0.0 } else { t };
        if let Some(d) = dyn_.frame_phases(t0, -1.0) {
            rho = conjugate_diag(&rho, &d);
        }
        let grid = policy.master_grid_for(&dyn_.hamiltonian, &collapses, t0, step.duration)?;
        rho = propagate_master(&dyn_.hamiltonian, &collapses, &grid, &rho)?;
        if let Some(d) = dyn_.frame_phases(t0 + step.duration, 1.0) {
            rho = conjugate_diag(&rho, &d);
        }
        t += step.duration;
    }
    Ok(rho)
}

fn conjugate_diag(rho: &DensityMatrix, d: &crate::space::CVector) -> DensityMatrix {
    let e = rho.entries();
    let m = crate::space::CMatrix::from_fn(e.nrows(), e.ncols(), |r, c| d[r] * e[(r, c)] * d[c].conj());
    DensityMatrix::from_parts(rho.layout(), m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyFidelity {
    pub per_input: [f64; 4],
    pub average: f64,
}

/// Overlap of each noisy output with the closed-system Effective output.
pub fn noisy_gate_fidelity(seq: &PulseSequence, noise: &NoiseParams, policy: GridPolicy) -> Result<NoisyFidelity> {
    let ideal_seq = seq.with_model(Model::Effective);
    let layout = seq.layout();
    let per: Vec<f64> = (0..4)
        .into_par_iter()
        .map(|k| {
            let input = logical_state(k, layout)?;
            let ideal: StateVector = run_sequence(&ideal_seq, &input, policy)?;
            let out = run_sequence_master(seq, &input.to_density(), noise, policy)?;
            out.overlap(&ideal)
        })
        .collect::<Result<_>>()?;
    let per_input = [per[0], per[1], per[2], per[3]];
    Ok(NoisyFidelity {
        per_input,
        average: per.iter().sum::<f64>() / 4.0,
    })
}

/// A named set of noise rates.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub noise: NoiseParams,
}

impl Scenario {
    pub fn new(name: impl Into<String>, noise: NoiseParams) -> Self {
        Scenario {
            name: name.into(),
            noise,
        }
    }
}

/// `optical`, `microwave`, `zero`, or `kappa=…,gamma=…,heating=…` with
/// omitted rates set to zero.
impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let noise = match s {
            "optical" => NoiseParams::optical(),
            "microwave" => NoiseParams::microwave(),
            "zero" => NoiseParams::default(),
            _ => {
                let mut n = NoiseParams::default();
                for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| Error::invalid(format!("scenario entry '{part}' is not key=value")))?;
                    let v: f64 = value
                        .trim()
                        .parse()
                        .map_err(|_| Error::invalid(format!("scenario value '{value}' is not a number")))?;
                    match key.trim() {
                        "kappa" => n.kappa = v,
                        "gamma" => n.gamma = v,
                        "heating" | "heating_rate" => n.heating_rate = v,
                        other => return Err(Error::invalid(format!("unknown scenario key '{other}'"))),
                    }
                }
                n.validate()?;
                n
            }
        };
        Ok(Scenario::new(s, noise))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub tau_c: Option<f64>,
    pub kappa_t: f64,
    pub gamma_t: f64,
    pub heating_t: f64,
    pub fidelity: NoisyFidelity,
    /// Schedule longer than the photon lifetime.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub tau_had: f64,
    pub tau_pha: f64,
    pub t_total: f64,
    pub scenarios: Vec<ScenarioResult>,
}

/// Pulse times from the coupling formulas and, per scenario, the noise
/// budget over the whole schedule plus the simulated fidelities.
pub fn feasibility_report(seq: &PulseSequence, scenarios: &[Scenario], policy: GridPolicy) -> Result<FeasibilityReport> {
    let params = seq.params();
    let tau_had = hadamard_pulse(params, Model::Effective)?.duration;
    let tau_pha = phase_pulse(params, Model::Effective)?.duration;
    let t_total = seq.total_duration();
    let fids: Vec<NoisyFidelity> = scenarios
        .par_iter()
        .map(|s| noisy_gate_fidelity(seq, &s.noise, policy))
        .collect::<Result<_>>()?;
    let scenarios = scenarios
        .iter()
        .zip(fids)
        .map(|(s, fidelity)| {
            let tau_c = s.noise.tau_c();
            ScenarioResult {
                scenario: s.clone(),
                tau_c,
                kappa_t: s.noise.kappa * t_total,
                gamma_t: s.noise.gamma * t_total,
                heating_t: s.noise.heating_rate * t_total,
                fidelity,
                flagged: tau_c.is_some_and(|tc| t_total > tc),
            }
        })
        .collect();
    Ok(FeasibilityReport {
        tau_had,
        tau_pha,
        t_total,
        scenarios,
    })
}

pub const CSV_HEADER: [&str; 13] = [
    "scenario",
    "input",
    "kappa",
    "gamma",
    "heating_rate",
    "t_total",
    "tau_c",
    "kappa_t",
    "gamma_t",
    "heating_t",
    "fidelity",
    "average_fidelity",
    "flagged",
];

impl FeasibilityReport {
    pub fn to_json(&self) -> serde_json::Value {
        let scenarios: Vec<serde_json::Value> = self
            .scenarios
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.scenario.name,
                    "kappa": sig12(r.scenario.noise.kappa),
                    "gamma": sig12(r.scenario.noise.gamma),
                    "heating_rate": sig12(r.scenario.noise.heating_rate),
                    "tau_c": r.tau_c.map(sig12),
                    "kappa_t": sig12(r.kappa_t),
                    "gamma_t": sig12(r.gamma_t),
                    "heating_t": sig12(r.heating_t),
                    "fidelity_per_input": r.fidelity.per_input.map(sig12),
                    "average_fidelity": sig12(r.fidelity.average),
                    "flagged": r.flagged,
                })
            })
            .collect();
        serde_json::json!({
            "tau_had": sig12(self.tau_had),
            "tau_pha": sig12(self.tau_pha),
            "t_total": sig12(self.t_total),
            "scenarios": scenarios,
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per scenario × logical input.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        let num = |x: f64| sig12(x).to_string();
        for r in &self.scenarios {
            for (k, f) in r.fidelity.per_input.iter().enumerate() {
                out.write_record([
                    r.scenario.name.clone(),
                    crate::gates::LOGICAL_BASIS[k].to_string(),
                    num(r.scenario.noise.kappa),
                    num(r.scenario.noise.gamma),
                    num(r.scenario.noise.heating_rate),
                    num(self.t_total),
                    r.tau_c.map(num).unwrap_or_default(),
                    num(r.kappa_t),
                    num(r.gamma_t),
                    num(r.heating_t),
                    num(*f),
                    num(r.fidelity.average),
                    r.flagged.to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}
