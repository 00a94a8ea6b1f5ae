//! Hamiltonians of the ion–trap–cavity system, in units where ħ = 1.
//!
//! * [`h_lab`]: lab-frame Hamiltonian with the exact `exp[iη_L X]` and
//!   `sin[η_c X]` of the position-like operator `X = a + a†`.
//! * [`h_interaction`]: the seven-term interaction-picture Hamiltonian that
//!   follows from linearizing both functions of `X`.
//! * [`h_hadamard`], [`h_phase`]: the two resonant effective Hamiltonians
//!   that drive the Hadamard-type and phase-gate pulses.
//!
//! Time-dependent Hamiltonians are represented as a static part plus a sum
//! of harmonic terms `A e^{iωt} + A† e^{-iωt}`, which is enough for every
//! model here and lets the integrators reuse sparse copies of `A`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{
    embed, ion_operators, ladder_pair, product, CMatrix, ModeLayout, Operator, Slot, I,
    ONE, ZERO,
};
use crate::sparse::{Csr, Generator};

/// Physical frequencies and couplings. Frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysParams {
    /// Trap (vibrational) frequency ν.
    pub nu: f64,
    /// Ionic transition frequency ω₀.
    pub omega0: f64,
    /// Cavity frequency ω_c.
    pub omega_c: f64,
    /// Laser frequency ω_L.
    #[serde(rename = "omega_L")]
    pub omega_l: f64,
    /// Laser Rabi coupling Ω.
    #[serde(rename = "Omega")]
    pub rabi: f64,
    /// Ion–cavity coupling g.
    pub g: f64,
    /// Laser Lamb-Dicke parameter η_L.
    #[serde(rename = "eta_L")]
    pub eta_l: f64,
    /// Cavity Lamb-Dicke parameter η_c.
    pub eta_c: f64,
}

impl PhysParams {
    /// Desk-scale defaults: ν = 2π·10 MHz, Ω = g = 2π·100 kHz,
    /// η_L = η_c = 0.05. The cavity sits at 2π·20 MHz and the laser at
    /// ω_c + 2ν so that neither resonance condition drives a spurious
    /// sideband of the other.
    pub fn desk_default() -> Self {
        let nu = 2.0 * PI * 10.0e6;
        let omega_c = 2.0 * PI * 20.0e6;
        let omega_l = omega_c + 2.0 * nu;
        PhysParams {
            nu,
            omega0: omega_l,
            omega_c,
            omega_l,
            rabi: 2.0 * PI * 1.0e5,
            g: 2.0 * PI * 1.0e5,
            eta_l: 0.05,
            eta_c: 0.05,
        }
    }

    /// δ_aL = ω₀ − ω_L
    pub fn delta_al(&self) -> f64 {
        self.omega0 - self.omega_l
    }

    /// δ_ac = ω₀ − ω_c
    pub fn delta_ac(&self) -> f64 {
        self.omega0 - self.omega_c
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nu", self.nu),
            ("omega0", self.omega0),
            ("omega_c", self.omega_c),
            ("omega_L", self.omega_l),
            ("Omega", self.rabi),
            ("g", self.g),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Validation(format!(
                    "{name} must be a positive finite number, got {v}"
                )));
            }
        }
        for (name, v) in [("eta_L", self.eta_l), ("eta_c", self.eta_c)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Validation(format!("{name} must lie in (0,1)")));
            }
        }
        if self.omega_c <= self.nu {
            return Err(Error::Validation(
                "omega_c must exceed nu so the phase-gate resonance omega0 = omega_c - nu is positive"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Frequency scale used to decide when a detuning counts as resonant.
    fn frequency_scale(&self) -> f64 {
        [self.nu, self.omega0, self.omega_c, self.omega_l]
            .iter()
            .fold(0.0_f64, |a, b| a.max(b.abs()))
    }

    fn snap(&self, w: f64) -> f64 {
        if w.abs() <= 1e-9 * self.frequency_scale() {
            0.0
        } else {
            w
        }
    }
}

/// How the ionic transition is tuned during a pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonanceMode {
    /// ω₀ := ω_L (δ_aL = 0), laser on.
    Carrier,
    /// ω₀ := ω_c − ν (δ_ac = −ν), laser off.
    PhaseGate,
    Custom { omega0: f64, laser_on: bool },
}

impl ResonanceMode {
    /// Copy of `params` with ω₀ retuned and Ω zeroed when the laser is off.
    pub fn apply(&self, params: &PhysParams) -> PhysParams {
        let mut p = *params;
        match *self {
            ResonanceMode::Carrier => {
                p.omega0 = p.omega_l;
            }
            ResonanceMode::PhaseGate => {
                p.omega0 = p.omega_c - p.nu;
                p.rabi = 0.0;
            }
            ResonanceMode::Custom { omega0, laser_on } => {
                p.omega0 = omega0;
                if !laser_on {
                    p.rabi = 0.0;
                }
            }
        }
        p
    }
}

/// The seven terms of the linearized interaction-picture Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// red laser sideband `iη_LΩ σ+ a`
    I,
    /// anti-Jaynes-Cummings cavity exchange `η_c g σ+ a† b`
    II,
    /// blue laser sideband `iη_LΩ σ+ a†`
    III,
    /// `η_c g σ+ a† b†`
    IV,
    /// `η_c g σ+ a b†`
    V,
    /// `η_c g σ+ a b`
    VI,
    /// laser carrier `Ω σ+`
    VII,
}

impl Term {
    pub const ALL: [Term; 7] = [
        Term::I,
        Term::II,
        Term::III,
        Term::IV,
        Term::V,
        Term::VI,
        Term::VII,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Term::I => "i",
            Term::II => "ii",
            Term::III => "iii",
            Term::IV => "iv",
            Term::V => "v",
            Term::VI => "vi",
            Term::VII => "vii",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Term::ALL
            .iter()
            .copied()
            .find(|t| t.label() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::invalid(format!("unknown term '{s}', expected i..vii")))
    }
}

/// Subset of [`Term`]s to keep in [`h_interaction`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermMask(u8);

impl TermMask {
    pub fn all() -> Self {
        TermMask(0x7f)
    }

    pub fn none() -> Self {
        TermMask(0)
    }

    pub fn only(terms: &[Term]) -> Self {
        TermMask(terms.iter().fold(0, |m, t| m | t.bit()))
    }

    pub fn contains(&self, t: Term) -> bool {
        self.0 & t.bit() != 0
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        Term::ALL.into_iter().filter(|t| self.contains(*t))
    }
}

impl fmt::Display for TermMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == TermMask::all() {
            return f.write_str("all");
        }
        if *self == TermMask::none() {
            return f.write_str("none");
        }
        let labels: Vec<&str> = self.terms().map(Term::label).collect();
        f.write_str(&labels.join("+"))
    }
}

impl FromStr for TermMask {
    type Err = Error;

    /// `all`, `none`, or a list such as `i,ii,vii` (`+` also separates).
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(TermMask::all()),
            "none" | "" => Ok(TermMask::none()),
            list => {
                let terms = list
                    .split([',', '+'])
                    .map(str::parse)
                    .collect::<Result<Vec<Term>>>()?;
                Ok(TermMask::only(&terms))
            }
        }
    }
}

/// One `A e^{iωt} + A† e^{-iωt}` contribution.
#[derive(Debug, Clone)]
pub struct HarmonicTerm {
    pub label: String,
    pub op: Operator,
    pub frequency: f64,
    csr: Csr,
    csr_dag: Csr,
}

impl HarmonicTerm {
    pub fn new(label: impl Into<String>, op: Operator, frequency: f64) -> Self {
        let csr = Csr::from_dense(op.entries());
        let csr_dag = Csr::from_dense(&op.entries().adjoint());
        HarmonicTerm {
            label: label.into(),
            op,
            frequency,
            csr,
            csr_dag,
        }
    }
}

/// Time-dependent Hamiltonian `t ↦ H(t)` (divided by ħ).
pub trait HamiltonianFactory: Sync {
    fn layout(&self) -> ModeLayout;

    /// Dense `H(t)`.
    fn at(&self, t: f64) -> Operator;

    /// Largest |ω| of any explicit time dependence.
    fn fastest_frequency(&self) -> f64;

    /// `H(t)` in the sparse form consumed by the integrators.
    fn generator(&self, t: f64) -> Generator<'_> {
        Generator::from_dense(self.at(t).entries())
    }

    /// Characteristic rate for step-size guidance: the larger of the fastest
    /// explicit frequency and the operator norm bound.
    fn rate_scale(&self, t: f64) -> f64 {
        self.fastest_frequency().max(self.generator(t).norm_bound())
    }
}

/// `H(t) = H_static + Σ_k (A_k e^{iω_k t} + A_k† e^{-iω_k t})`.
#[derive(Debug, Clone)]
pub struct HarmonicHamiltonian {
    layout: ModeLayout,
    static_part: Operator,
    static_csr: Csr,
    terms: Vec<HarmonicTerm>,
}

impl HarmonicHamiltonian {
    pub fn new(static_part: Operator, terms: Vec<HarmonicTerm>) -> Result<Self> {
        let layout = static_part.layout();
        if static_part.hermiticity_defect() >= 1e-12 * static_part.max_abs().max(1.0) {
            return Err(Error::invalid("static part of a Hamiltonian must be Hermitian"));
        }
        if let Some(t) = terms.iter().find(|t| t.op.layout() != layout) {
            return Err(Error::invalid(format!(
                "term {} built on a different layout",
                t.label
            )));
        }
        let static_csr = Csr::from_dense(static_part.entries());
        Ok(HarmonicHamiltonian {
            layout,
            static_part,
            static_csr,
            terms,
        })
    }

    pub fn constant(op: Operator) -> Result<Self> {
        HarmonicHamiltonian::new(op, Vec::new())
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn terms(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    pub fn is_time_independent(&self) -> bool {
        self.terms.iter().all(|t| t.frequency == 0.0)
    }

    /// Static part plus every term with zero frequency.
    pub fn resonant_part(&self) -> Operator {
        let mut m = self.static_part.entries().clone();
        for t in self.terms.iter().filter(|t| t.frequency == 0.0) {
            m += t.op.entries();
            m += t.op.entries().adjoint();
        }
        Operator::from_parts(self.layout, m, true)
    }
}

impl HamiltonianFactory for HarmonicHamiltonian {
    fn layout(&self) -> ModeLayout {
        self.layout
    }

    fn at(&self, t: f64) -> Operator {
        let mut m = self.static_part.entries().clone();
        for term in &self.terms {
            let c = Complex64::from_polar(1.0, term.frequency * t);
            m += term.op.entries() * c;
            m += term.op.entries().adjoint() * c.conj();
        }
        Operator::from_parts(self.layout, m, true)
    }

    fn fastest_frequency(&self) -> f64 {
        self.terms
            .iter()
            .fold(0.0_f64, |acc, t| acc.max(t.frequency.abs()))
    }

    fn generator(&self, t: f64) -> Generator<'_> {
        let mut g = Generator::new(self.layout.total_dim());
        g.push(&self.static_csr, ONE);
        for term in &self.terms {
            let c = Complex64::from_polar(1.0, term.frequency * t);
            g.push(&term.csr, c);
            g.push(&term.csr_dag, c.conj());
        }
        g
    }
}

/// Adapter for arbitrary closures `t ↦ H(t)`.
pub struct FnHamiltonian<F> {
    layout: ModeLayout,
    fastest_frequency: f64,
    f: F,
}

impl<F> FnHamiltonian<F>
where
    F: Fn(f64) -> Operator + Sync,
{
    pub fn new(layout: ModeLayout, fastest_frequency: f64, f: F) -> Self {
        FnHamiltonian {
            layout,
            fastest_frequency,
            f,
        }
    }
}

impl<F> HamiltonianFactory for FnHamiltonian<F>
where
    F: Fn(f64) -> Operator + Sync,
{
    fn layout(&self) -> ModeLayout {
        self.layout
    }

    fn at(&self, t: f64) -> Operator {
        (self.f)(t)
    }

    fn fastest_frequency(&self) -> f64 {
        self.fastest_frequency
    }
}

/// `X = a + a†` for one mode.
pub fn position_operator(cutoff: usize) -> Result<DMatrix<f64>> {
    let (a, ad) = ladder_pair(cutoff)?;
    Ok((a + ad).map(|z| z.re))
}

/// `f(X)` evaluated spectrally, `X = a + a†` at the given cutoff.
pub fn position_function<F>(cutoff: usize, f: F) -> Result<CMatrix>
where
    F: Fn(f64) -> Complex64,
{
    let x = position_operator(cutoff)?;
    let eig = x.symmetric_eigen();
    let v = eig.eigenvectors.map(|r| Complex64::new(r, 0.0));
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(&f));
    Ok(&v * d * v.adjoint())
}

/// `ν a†a + ω_c b†b + (ω₀/2) σ_z`
pub fn h_free(params: &PhysParams, layout: ModeLayout) -> Result<Operator> {
    let (a, ad) = ladder_pair(layout.vib_cutoff())?;
    let (b, bd) = ladder_pair(layout.cav_cutoff())?;
    let (_, _, sz) = ion_operators();
    let n_v = embed(&(&ad * &a), Slot::Vib, layout)?;
    let n_c = embed(&(&bd * &b), Slot::Cav, layout)?;
    let szf = embed(&sz, Slot::Ion, layout)?;
    let m = n_v.entries() * Complex64::new(params.nu, 0.0)
        + n_c.entries() * Complex64::new(params.omega_c, 0.0)
        + szf.entries() * Complex64::new(params.omega0 / 2.0, 0.0);
    Ok(Operator::from_parts(layout, m, true))
}

/// Lab-frame Hamiltonian with exact exponential and sine of the ion
/// position. The laser drive is the only explicitly time-dependent piece.
pub fn h_lab(params: &PhysParams, layout: ModeLayout) -> Result<HarmonicHamiltonian> {
    let nv = layout.vib_cutoff();
    let nc = layout.cav_cutoff();
    let (sp, sm, _) = ion_operators();
    let (b, bd) = ladder_pair(nc)?;
    let eye_c = CMatrix::identity(nc, nc);

    let free = h_free(params, layout)?;

    let sin_x = position_function(nv, |l| Complex64::new((params.eta_c * l).sin(), 0.0))?;
    let sx = &sp + &sm;
    let coupling = product(&sx, &sin_x, &(&b + &bd), layout)?;
    let static_m = free.entries() + coupling.entries() * Complex64::new(params.g, 0.0);
    let static_m = (&static_m + static_m.adjoint()) * Complex64::new(0.5, 0.0);
    let static_part = Operator::from_parts(layout, static_m, true);

    let mut terms = Vec::new();
    if params.rabi != 0.0 {
        let disp = position_function(nv, |l| Complex64::from_polar(1.0, params.eta_l * l))?;
        let drive = product(&sp, &disp, &eye_c, layout)?.scale(Complex64::new(params.rabi, 0.0));
        terms.push(HarmonicTerm::new("laser", drive, -params.omega_l));
    }
    HarmonicHamiltonian::new(static_part, terms)
}

/// Linearized interaction-picture Hamiltonian restricted to `mask`.
pub fn h_interaction(
    params: &PhysParams,
    layout: ModeLayout,
    mask: TermMask,
) -> Result<HarmonicHamiltonian> {
    let nv = layout.vib_cutoff();
    let nc = layout.cav_cutoff();
    let (sp, _, _) = ion_operators();
    let (a, ad) = ladder_pair(nv)?;
    let (b, bd) = ladder_pair(nc)?;
    let eye_v = CMatrix::identity(nv, nv);
    let eye_c = CMatrix::identity(nc, nc);

    let dal = params.delta_al();
    let dac = params.delta_ac();
    let nu = params.nu;
    let wc = params.omega_c;
    let laser = I * (params.eta_l * params.rabi);
    let cavity = Complex64::new(params.eta_c * params.g, 0.0);
    let carrier = Complex64::new(params.rabi, 0.0);

    let mut terms = Vec::new();
    for term in mask.terms() {
        let (vib, cav, coef, freq) = match term {
            Term::I => (&a, &eye_c, laser, dal - nu),
            Term::II => (&ad, &b, cavity, dac + nu),
            Term::III => (&ad, &eye_c, laser, dal + nu),
            Term::IV => (&ad, &bd, cavity, dac + nu + 2.0 * wc),
            Term::V => (&a, &bd, cavity, dac - nu + 2.0 * wc),
            Term::VI => (&a, &b, cavity, dac - nu),
            Term::VII => (&eye_v, &eye_c, carrier, dal),
        };
        if coef == ZERO {
            continue;
        }
        let op = product(&sp, vib, cav, layout)?.scale(coef);
        terms.push(HarmonicTerm::new(term.label(), op, params.snap(freq)));
    }
    HarmonicHamiltonian::new(Operator::zeros(layout), terms)
}

/// `Ω (σ+ + σ−)` on the ion slot.
pub fn h_hadamard(params: &PhysParams, layout: ModeLayout) -> Result<Operator> {
    let (sp, sm, _) = ion_operators();
    let sx = (&sp + &sm) * Complex64::new(params.rabi, 0.0);
    embed(&sx, Slot::Ion, layout)
}

/// `η_c g (σ+ a† b + σ− a b†)`.
pub fn h_phase(params: &PhysParams, layout: ModeLayout) -> Result<Operator> {
    let (sp, sm, _) = ion_operators();
    let (a, ad) = ladder_pair(layout.vib_cutoff())?;
    let (b, bd) = ladder_pair(layout.cav_cutoff())?;
    let up = product(&sp, &ad, &b, layout)?;
    let down = product(&sm, &a, &bd, layout)?;
    let m = (up.entries() + down.entries()) * Complex64::new(params.eta_c * params.g, 0.0);
    Ok(Operator::from_parts(layout, m, true))
}

/// Result of comparing `sin(ηX)` with its linearization `ηX`.
#[derive(Debug, Clone)]
pub struct LambDickeCheck {
    pub eta: f64,
    pub cutoff: usize,
    pub exact_sin: CMatrix,
    pub linearized: CMatrix,
    /// Largest singular value of `exact_sin − linearized`.
    pub error_norm: f64,
    /// `max_λ |ηλ|³ / 6` over the eigenvalues of `X`.
    pub bound: f64,
}

/// `sin z − z`, accurate for small `|z|` where direct subtraction cancels.
pub fn sin_remainder(z: f64) -> f64 {
    if z.abs() < 0.25 {
        // −z³/3! + z⁵/5! − … ; twelve terms reach machine precision here.
        let z2 = z * z;
        let mut term = -z * z2 / 6.0;
        let mut sum = term;
        let mut k = 2.0;
        for _ in 0..12 {
            term *= -z2 / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        z.sin() - z
    }
}

pub fn lamb_dicke_ops(eta: f64, cutoff: usize) -> Result<LambDickeCheck> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta must lie in (0,1), got {eta}")));
    }
    let x = position_operator(cutoff)?;
    let eig = x.clone().symmetric_eigen();
    let v = eig.eigenvectors.map(|r| Complex64::new(r, 0.0));
    let lambdas = eig.eigenvalues;

    let sin_d = CMatrix::from_diagonal(&lambdas.map(|l| Complex64::new((eta * l).sin(), 0.0)));
    let exact_sin = &v * sin_d * v.adjoint();
    let linearized = x.map(|r| Complex64::new(eta * r, 0.0));

    // exact_sin − ηX shares the eigenbasis of X; building it from the
    // remainder directly avoids cancellation at tiny η.
    let rem_d = CMatrix::from_diagonal(&lambdas.map(|l| Complex64::new(sin_remainder(eta * l), 0.0)));
    let diff = &v * rem_d * v.adjoint();
    let error_norm = diff.singular_values().max();

    let bound = lambdas
        .iter()
        .map(|l| (eta * l).abs().powi(3) / 6.0)
        .fold(0.0_f64, f64::max);

    Ok(LambDickeCheck {
        eta,
        cutoff,
        exact_sin,
        linearized,
        error_norm,
        bound,
    })
}

#[cfg(test)]
pub(crate) fn commutator_defect(a: &Operator, b: &Operator) -> f64 {
    let ab = a.entries() * b.entries();
    let ba = b.entries() * a.entries();
    crate::space::max_abs(&(ab - ba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{basis_state, Ion};

    fn layout() -> ModeLayout {
        ModeLayout::new(5, 5).unwrap()
    }

    fn elem(op: &Operator, bra: (Ion, usize, usize), ket: (Ion, usize, usize)) -> Complex64 {
        let l = op.layout();
        let b = basis_state(bra.0, bra.1, bra.2, l).unwrap();
        let k = basis_state(ket.0, ket.1, ket.2, l).unwrap();
        op.matrix_element(&b, &k).unwrap()
    }

    #[test]
    fn desk_defaults_validate() {
        let p = PhysParams::desk_default();
        p.validate().unwrap();
        assert!(p.eta_c * p.g < p.rabi && p.rabi < p.nu);
    }

    #[test]
    fn validation_messages_name_fields() {
        let mut p = PhysParams::desk_default();
        p.eta_c = 1.5;
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("eta_c must lie in (0,1)"), "{msg}");
        let mut p = PhysParams::desk_default();
        p.g = -1.0;
        assert!(p.validate().unwrap_err().to_string().contains("g must be"));
    }

    #[test]
    fn resonance_modes_hit_their_conditions() {
        let p = PhysParams::desk_default();
        let c = ResonanceMode::Carrier.apply(&p);
        assert_eq!(c.delta_al(), 0.0);
        assert_eq!(c.rabi, p.rabi);
        let ph = ResonanceMode::PhaseGate.apply(&p);
        assert!((ph.delta_ac() + ph.nu).abs() <= 1e-9 * ph.omega_c);
        assert_eq!(ph.rabi, 0.0);
        let h = h_interaction(&ph, layout(), TermMask::only(&[Term::II])).unwrap();
        assert_eq!(h.terms()[0].frequency, 0.0);
    }

    #[test]
    fn mask_parsing() {
        assert_eq!("all".parse::<TermMask>().unwrap(), TermMask::all());
        assert_eq!("none".parse::<TermMask>().unwrap(), TermMask::none());
        let m: TermMask = "ii,vii".parse().unwrap();
        assert!(m.contains(Term::II) && m.contains(Term::VII) && !m.contains(Term::I));
        assert_eq!(m.to_string(), "ii+vii");
        assert!("viii".parse::<TermMask>().is_err());
    }

    #[test]
    fn lab_drive_free_limit() {
        let mut p = PhysParams::desk_default();
        p.rabi = 0.0;
        p.g = 0.0;
        let l = ModeLayout::new(3, 3).unwrap();
        let h = h_lab(&p, l).unwrap();
        assert_eq!(h.fastest_frequency(), 0.0);
        let free = h_free(&p, l).unwrap();
        for t in [0.0, 1.3e-7, 4.0e-6] {
            assert!(h.at(t).sub(&free).unwrap().max_abs() < 1e-6);
        }
        // diagonal: ν n_v + ω_c n_c ± ω₀/2
        let d = elem(&free, (Ion::E, 2, 1), (Ion::E, 2, 1)).re;
        let want = 2.0 * p.nu + p.omega_c + p.omega0 / 2.0;
        assert!((d - want).abs() < 1e-6 * want);
    }

    #[test]
    fn lab_carrier_element_matches_displacement_overlap() {
        let p = PhysParams::desk_default();
        let l = layout();
        let h = h_lab(&p, l).unwrap().at(0.0);
        let got = elem(&h, (Ion::E, 0, 0), (Ion::G, 0, 0));
        let want = p.rabi * (-p.eta_l * p.eta_l / 2.0).exp();
        assert!((got.re - want).abs() < 1e-9 * p.rabi, "{got} vs {want}");
        assert!(got.im.abs() < 1e-9 * p.rabi);
    }

    #[test]
    fn lab_cavity_element_is_linear_in_eta() {
        let p = PhysParams::desk_default();
        let l = layout();
        let h = h_lab(&p, l).unwrap().at(0.0);
        let got = elem(&h, (Ion::E, 1, 1), (Ion::G, 0, 0)).re;
        let want = p.g * p.eta_c;
        assert!(((got - want) / want).abs() < p.eta_c * p.eta_c);
    }

    #[test]
    fn interaction_single_term_reductions() {
        let l = layout();
        let p = PhysParams::desk_default();

        let carrier = ResonanceMode::Carrier.apply(&p);
        let h7 = h_interaction(&carrier, l, TermMask::only(&[Term::VII])).unwrap();
        assert!(h7.is_time_independent());
        let had = h_hadamard(&carrier, l).unwrap();
        assert!(h7.at(0.37e-6).sub(&had).unwrap().max_abs() < 1e-14 * p.rabi);

        let phase = ResonanceMode::PhaseGate.apply(&p);
        let h2 = h_interaction(&phase, l, TermMask::only(&[Term::II])).unwrap();
        assert!(h2.is_time_independent());
        let hp = h_phase(&phase, l).unwrap();
        assert!(h2.at(3.1e-5).sub(&hp).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn interaction_full_mask_element_at_zero() {
        let l = layout();
        let p = PhysParams::desk_default();
        let h = h_interaction(&p, l, TermMask::all()).unwrap().at(0.0);
        let got = elem(&h, (Ion::E, 1, 1), (Ion::G, 0, 0));
        assert!((got - Complex64::new(p.eta_c * p.g, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn interaction_without_lamb_dicke_is_carrier_only() {
        let l = ModeLayout::new(3, 3).unwrap();
        let mut p = PhysParams::desk_default();
        p.eta_l = 0.0;
        p.eta_c = 0.0;
        p.omega0 = p.omega_l + 2.0 * PI * 1e3;
        let full = h_interaction(&p, l, TermMask::all()).unwrap();
        let only = h_interaction(&p, l, TermMask::only(&[Term::VII])).unwrap();
        assert_eq!(full.terms().len(), 1);
        for t in [0.0, 1e-6, 7.7e-5] {
            assert!(full.at(t).sub(&only.at(t)).unwrap().max_abs() == 0.0);
        }
    }

    #[test]
    fn factories_are_hermitian_at_random_times() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let l = ModeLayout::new(4, 3).unwrap();
        let p = PhysParams::desk_default();
        let lab = h_lab(&p, l).unwrap();
        let int = h_interaction(&p, l, TermMask::all()).unwrap();
        for _ in 0..100 {
            let t = rng.random::<f64>() * 10.0 / p.nu;
            assert!(int.at(t).hermiticity_defect() < 1e-12);
            let hl = lab.at(t);
            // lab entries are O(ω); compare relative to that scale
            assert!(hl.hermiticity_defect() < 1e-12 * p.omega_l);
        }
    }

    #[test]
    fn hadamard_properties() {
        let l = ModeLayout::new(3, 4).unwrap();
        let p = PhysParams::desk_default();
        let h = h_hadamard(&p, l).unwrap();
        let (a, ad) = ladder_pair(3).unwrap();
        let (b, bd) = ladder_pair(4).unwrap();
        let nv = embed(&(&ad * &a), Slot::Vib, l).unwrap();
        let nc = embed(&(&bd * &b), Slot::Cav, l).unwrap();
        assert!(commutator_defect(&h, &nv) < 1e-13);
        assert!(commutator_defect(&h, &nc) < 1e-13);
        let sq = h.mul(&h).unwrap();
        let id = Operator::identity(l).scale(Complex64::new(p.rabi * p.rabi, 0.0));
        assert!(sq.sub(&id).unwrap().max_abs() < 1e-12 * p.rabi * p.rabi);

        // eigendecomposition oracle: ±Ω, each N_v·N_c times
        let mut ev: Vec<f64> = h.entries().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let half = l.total_dim() / 2;
        assert!(ev[..half].iter().all(|e| (e + p.rabi).abs() < 1e-9 * p.rabi));
        assert!(ev[half..].iter().all(|e| (e - p.rabi).abs() < 1e-9 * p.rabi));
    }

    #[test]
    fn phase_hamiltonian_properties() {
        let l = layout();
        let p = PhysParams::desk_default();
        let h = h_phase(&p, l).unwrap();
        let e00 = basis_state(Ion::E, 0, 0, l).unwrap();
        assert_eq!(h.apply(&e00).unwrap().norm_squared(), 0.0);
        for n in 0..5 {
            let gn0 = basis_state(Ion::G, n, 0, l).unwrap();
            assert_eq!(h.apply(&gn0).unwrap().norm_squared(), 0.0);
        }
        let got = elem(&h, (Ion::G, 0, 1), (Ion::E, 1, 0));
        assert!((got - Complex64::new(p.eta_c * p.g, 0.0)).norm() < 1e-12);

        // each exchange moves one quantum between cavity and vibration and
        // flips the ion with the vibration: a†a + b†b and σz/2 − a†a are
        // conserved, σz/2 − a†a + b†b is not
        let (a, ad) = ladder_pair(5).unwrap();
        let (b, bd) = ladder_pair(5).unwrap();
        let (_, _, sz) = ion_operators();
        let nv = embed(&(&ad * &a), Slot::Vib, l).unwrap();
        let nc = embed(&(&bd * &b), Slot::Cav, l).unwrap();
        let half_sz = embed(&sz, Slot::Ion, l).unwrap().scale(Complex64::new(0.5, 0.0));
        let total = nv.add(&nc).unwrap();
        let ion_vib = half_sz.sub(&nv).unwrap();
        // √n·√n is not exactly n in floating point, so compare against
        // the coupling scale
        let scale = p.eta_c * p.g;
        assert!(commutator_defect(&h, &total) / scale < 1e-13);
        assert!(commutator_defect(&h, &ion_vib) / scale < 1e-13);
        let not_conserved = ion_vib.add(&nc).unwrap();
        assert!(commutator_defect(&h, &not_conserved) / scale > 0.5);
    }

    #[test]
    fn sin_remainder_matches_direct_evaluation() {
        for z in [0.2, 0.249, 0.26, 1.0, -0.7] {
            assert!((sin_remainder(z) - (z.sin() - z)).abs() < 1e-16);
        }
        let z = 1e-3_f64;
        let want = -z * z * z / 6.0 + z.powi(5) / 120.0 - z.powi(7) / 5040.0;
        assert!(((sin_remainder(z) - want) / want).abs() < 1e-15);
    }

    #[test]
    fn lamb_dicke_tiny_eta() {
        let c = lamb_dicke_ops(1e-6, 6).unwrap();
        assert!(c.error_norm < 1e-16);
        assert!(c.error_norm <= c.bound);
    }

    #[test]
    fn lamb_dicke_bound_against_eigen_oracle() {
        let c = lamb_dicke_ops(0.05, 6).unwrap();
        let x = position_operator(6).unwrap();
        let lmax = x
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0_f64, |a, l| a.max(l.abs()));
        let oracle = (0.05 * lmax).powi(3) / 6.0;
        assert!((c.bound - oracle).abs() < 1e-18);
        assert!(c.error_norm <= oracle);
        // eigenvalue-wise Taylor remainder
        for l in x.symmetric_eigenvalues().iter() {
            let z = 0.05 * l;
            assert!((z.sin() - z).abs() <= z.abs().powi(3) / 6.0);
        }
        // the matrix difference agrees with the remainder route
        let direct = (&c.exact_sin - &c.linearized).singular_values().max();
        assert!((direct - c.error_norm).abs() < 1e-15);
    }

    #[test]
    fn lamb_dicke_rejects_bad_eta() {
        assert!(lamb_dicke_ops(0.0, 6).is_err());
        assert!(lamb_dicke_ops(1.0, 6).is_err());
        assert!(lamb_dicke_ops(0.1, 1).is_err());
    }
}
