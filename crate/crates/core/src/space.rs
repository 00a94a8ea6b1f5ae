//! Hilbert space of one two-level ion, one vibrational mode and one cavity
//! mode, truncated to finite Fock cutoffs.
//!
//! Basis ordering is ion-slowest, cavity-fastest: the state
//! `(s, n_v, n_c)` lives at index `s * N_v * N_c + n_v * N_c + n_c`, with
//! `g = 0` and `e = 1`. All matrices in the crate follow this ordering.
//!
//! Operators and states are dense. At the cutoffs this simulator targets
//! (total dimension ≤ 128) dense storage is simpler and fast enough.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Internal ion level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ion {
    G,
    E,
}

impl Ion {
    pub fn index(self) -> usize {
        match self {
            Ion::G => 0,
            Ion::E => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Ion> {
        match i {
            0 => Some(Ion::G),
            1 => Some(Ion::E),
            _ => None,
        }
    }
}

/// Tensor factor an operator block acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Ion,
    Vib,
    Cav,
}

/// Truncation cutoffs for the ion ⊗ vibration ⊗ cavity space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawLayout")]
pub struct ModeLayout {
    vib_cutoff: usize,
    cav_cutoff: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayout {
    vib_cutoff: usize,
    cav_cutoff: usize,
}

impl TryFrom<RawLayout> for ModeLayout {
    type Error = Error;

    fn try_from(raw: RawLayout) -> Result<Self> {
        ModeLayout::new(raw.vib_cutoff, raw.cav_cutoff)
    }
}

impl ModeLayout {
    pub fn new(vib_cutoff: usize, cav_cutoff: usize) -> Result<Self> {
        if vib_cutoff < 2 {
            return Err(Error::invalid(format!(
                "vib_cutoff must be at least 2, got {vib_cutoff}"
            )));
        }
        if cav_cutoff < 2 {
            return Err(Error::invalid(format!(
                "cav_cutoff must be at least 2, got {cav_cutoff}"
            )));
        }
        Ok(ModeLayout {
            vib_cutoff,
            cav_cutoff,
        })
    }

    pub fn vib_cutoff(&self) -> usize {
        self.vib_cutoff
    }

    pub fn cav_cutoff(&self) -> usize {
        self.cav_cutoff
    }

    pub fn total_dim(&self) -> usize {
        2 * self.vib_cutoff * self.cav_cutoff
    }

    pub fn slot_dim(&self, slot: Slot) -> usize {
        match slot {
            Slot::Ion => 2,
            Slot::Vib => self.vib_cutoff,
            Slot::Cav => self.cav_cutoff,
        }
    }

    /// Flat index of `(ion, n_v, n_c)`.
    pub fn index(&self, ion: Ion, n_v: usize, n_c: usize) -> Result<usize> {
        if n_v >= self.vib_cutoff {
            return Err(Error::invalid(format!(
                "n_v = {n_v} outside vibrational cutoff {}",
                self.vib_cutoff
            )));
        }
        if n_c >= self.cav_cutoff {
            return Err(Error::invalid(format!(
                "n_c = {n_c} outside cavity cutoff {}",
                self.cav_cutoff
            )));
        }
        Ok(self.index_unchecked(ion.index(), n_v, n_c))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, s: usize, n_v: usize, n_c: usize) -> usize {
        s * self.vib_cutoff * self.cav_cutoff + n_v * self.cav_cutoff + n_c
    }

    /// Inverse of [`ModeLayout::index`].
    pub fn decode(&self, index: usize) -> Result<(Ion, usize, usize)> {
        if index >= self.total_dim() {
            return Err(Error::invalid(format!(
                "index {index} outside dimension {}",
                self.total_dim()
            )));
        }
        let block = self.vib_cutoff * self.cav_cutoff;
        let s = index / block;
        let rem = index % block;
        Ok((
            Ion::from_index(s).expect("s < 2"),
            rem / self.cav_cutoff,
            rem % self.cav_cutoff,
        ))
    }

    fn check_same(&self, other: &ModeLayout) -> Result<()> {
        if self != other {
            return Err(Error::invalid(format!(
                "layout mismatch: {self:?} vs {other:?}"
            )));
        }
        Ok(())
    }
}

/// Dense operator on the full composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    layout: ModeLayout,
    entries: CMatrix,
    hermitian_hint: bool,
}

impl Operator {
    pub fn new(layout: ModeLayout, entries: CMatrix, hermitian_hint: bool) -> Result<Self> {
        let d = layout.total_dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::invalid(format!(
                "operator is {}x{}, layout needs {d}x{d}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let op = Operator {
            layout,
            entries,
            hermitian_hint,
        };
        if hermitian_hint {
            let dev = op.hermiticity_defect();
            if dev >= 1e-12 {
                return Err(Error::invalid(format!(
                    "operator flagged Hermitian but max |A - A^dag| = {dev:e}"
                )));
            }
        }
        Ok(op)
    }

    pub(crate) fn from_parts(layout: ModeLayout, entries: CMatrix, hermitian_hint: bool) -> Self {
        debug_assert_eq!(entries.nrows(), layout.total_dim());
        Operator {
            layout,
            entries,
            hermitian_hint,
        }
    }

    pub fn zeros(layout: ModeLayout) -> Self {
        let d = layout.total_dim();
        Operator::from_parts(layout, CMatrix::zeros(d, d), true)
    }

    pub fn identity(layout: ModeLayout) -> Self {
        let d = layout.total_dim();
        Operator::from_parts(layout, CMatrix::identity(d, d), true)
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dagger(&self) -> Operator {
        Operator::from_parts(self.layout, self.entries.adjoint(), self.hermitian_hint)
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        let herm = self.hermitian_hint && c.im == 0.0;
        Operator::from_parts(self.layout, &self.entries * c, herm)
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.layout.check_same(&other.layout)?;
        Ok(Operator::from_parts(
            self.layout,
            &self.entries + &other.entries,
            self.hermitian_hint && other.hermitian_hint,
        ))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.layout.check_same(&other.layout)?;
        Ok(Operator::from_parts(
            self.layout,
            &self.entries - &other.entries,
            self.hermitian_hint && other.hermitian_hint,
        ))
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.layout.check_same(&other.layout)?;
        Ok(Operator::from_parts(
            self.layout,
            &self.entries * &other.entries,
            false,
        ))
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        self.layout.check_same(&other.layout)?;
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        Ok(Operator::from_parts(self.layout, ab - ba, false))
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        self.layout.check_same(&psi.layout)?;
        Ok(StateVector {
            layout: self.layout,
            amplitudes: &self.entries * &psi.amplitudes,
        })
    }

    /// `⟨bra| A |ket⟩`.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> Result<Complex64> {
        let applied = self.apply(ket)?;
        inner(bra, &applied)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Pure state on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: ModeLayout,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(layout: ModeLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::invalid(format!(
                "state has {} amplitudes, layout needs {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        Ok(StateVector { layout, amplitudes })
    }

    pub(crate) fn from_parts(layout: ModeLayout, amplitudes: CVector) -> Self {
        StateVector { layout, amplitudes }
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn amplitude(&self, ion: Ion, n_v: usize, n_c: usize) -> Result<Complex64> {
        Ok(self.amplitudes[self.layout.index(ion, n_v, n_c)?])
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn scaled(&self, c: Complex64) -> StateVector {
        StateVector::from_parts(self.layout, &self.amplitudes * c)
    }

    /// Population with the cavity in vacuum.
    pub fn cavity_vacuum_population(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i % self.layout.cav_cutoff == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            layout: self.layout,
            entries: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// Mixed state on the composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: ModeLayout,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(layout: ModeLayout, entries: CMatrix) -> Result<Self> {
        let d = layout.total_dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::invalid("density matrix shape does not match layout"));
        }
        let rho = DensityMatrix { layout, entries };
        let herm = max_abs(&(&rho.entries - rho.entries.adjoint()));
        if herm >= 1e-10 {
            return Err(Error::invalid(format!(
                "density matrix not Hermitian (defect {herm:e})"
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() >= 1e-9 {
            return Err(Error::invalid(format!("density matrix trace {tr} != 1")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < -1e-9 {
            return Err(Error::invalid(format!(
                "density matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(layout: ModeLayout, entries: CMatrix) -> Self {
        DensityMatrix { layout, entries }
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &x| acc.min(x))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.entries - self.entries.adjoint()))
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        self.layout.check_same(&op.layout)?;
        Ok((&self.entries * &op.entries).trace())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn overlap(&self, psi: &StateVector) -> Result<f64> {
        self.layout.check_same(&psi.layout)?;
        let v = &self.entries * &psi.amplitudes;
        Ok(psi.amplitudes.dotc(&v).re)
    }
}

/// Truncated annihilation and creation operators of a single bosonic mode.
///
/// `lower[n-1, n] = √n`; `raise` is the exact adjoint.
pub fn ladder_pair(cutoff: usize) -> Result<(CMatrix, CMatrix)> {
    if cutoff < 2 {
        return Err(Error::invalid(format!(
            "ladder cutoff must be at least 2, got {cutoff}"
        )));
    }
    let mut lower = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        lower[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let raise = lower.adjoint();
    Ok((lower, raise))
}

/// Ion blocks `(σ+, σ−, σz)` in the `{g, e}` basis.
pub fn ion_operators() -> (CMatrix, CMatrix, CMatrix) {
    let mut sp = CMatrix::zeros(2, 2);
    sp[(1, 0)] = ONE;
    let sm = sp.adjoint();
    let mut sz = CMatrix::zeros(2, 2);
    sz[(0, 0)] = -ONE;
    sz[(1, 1)] = ONE;
    (sp, sm, sz)
}

/// `I ⊗ block ⊗ I` with `block` placed on `slot`.
pub fn embed(block: &CMatrix, slot: Slot, layout: ModeLayout) -> Result<Operator> {
    let want = layout.slot_dim(slot);
    if block.nrows() != want || block.ncols() != want {
        return Err(Error::invalid(format!(
            "block is {}x{}, slot {slot:?} needs {want}x{want}",
            block.nrows(),
            block.ncols()
        )));
    }
    let id_ion = CMatrix::identity(2, 2);
    let id_vib = CMatrix::identity(layout.vib_cutoff, layout.vib_cutoff);
    let id_cav = CMatrix::identity(layout.cav_cutoff, layout.cav_cutoff);
    let full = match slot {
        Slot::Ion => block.kronecker(&id_vib).kronecker(&id_cav),
        Slot::Vib => id_ion.kronecker(block).kronecker(&id_cav),
        Slot::Cav => id_ion.kronecker(&id_vib).kronecker(block),
    };
    let herm = max_abs(&(block - block.adjoint())) < 1e-12;
    Ok(Operator::from_parts(layout, full, herm))
}

/// `ion_block ⊗ vib_block ⊗ cav_block`.
pub fn product(
    ion_block: &CMatrix,
    vib_block: &CMatrix,
    cav_block: &CMatrix,
    layout: ModeLayout,
) -> Result<Operator> {
    for (slot, b) in [
        (Slot::Ion, ion_block),
        (Slot::Vib, vib_block),
        (Slot::Cav, cav_block),
    ] {
        let want = layout.slot_dim(slot);
        if b.nrows() != want || b.ncols() != want {
            return Err(Error::invalid(format!(
                "block for {slot:?} is {}x{}, expected {want}x{want}",
                b.nrows(),
                b.ncols()
            )));
        }
    }
    let full = ion_block.kronecker(vib_block).kronecker(cav_block);
    Ok(Operator::from_parts(layout, full, false))
}

pub fn basis_state(ion: Ion, n_v: usize, n_c: usize, layout: ModeLayout) -> Result<StateVector> {
    let idx = layout.index(ion, n_v, n_c)?;
    let mut amps = CVector::zeros(layout.total_dim());
    amps[idx] = ONE;
    Ok(StateVector::from_parts(layout, amps))
}

/// `⟨ψ|φ⟩`.
pub fn inner(psi: &StateVector, phi: &StateVector) -> Result<Complex64> {
    psi.layout.check_same(&phi.layout)?;
    Ok(psi.amplitudes.dotc(&phi.amplitudes))
}

/// `|⟨ψ|φ⟩|²`.
pub fn fidelity(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(inner(psi, phi)?.norm_sqr())
}
