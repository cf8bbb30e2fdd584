//! Photon statistics of the quantum-injected optical parametric amplifier.
//!
//! A single photon injected in an equatorial polarization state is amplified
//! into a macro-qubit expanded over joint Fock occupations: the dominant
//! polarization mode carries odd photon numbers `2i+1`, the orthogonal mode
//! even numbers `2j`, with real signed amplitudes `gamma_ij`. Amplitudes are
//! assembled in log-magnitude + sign form so that factorials never overflow,
//! and every truncated table carries an explicit norm certificate.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Hard cap on the auto-grown truncation index (per index).
pub const MAX_CUTOFF: usize = 4096;

#[derive(Debug, Error)]
pub enum OpaError {
    #[error("invalid parameter {field}: {message}")]
    InvalidParams { field: &'static str, message: String },
    #[error("truncation failed: reached cutoffs ({cutoff_i}, {cutoff_j}) with mass {achieved} < 1 - {tail_tolerance}")]
    TruncationFailure {
        cutoff_i: usize,
        cutoff_j: usize,
        achieved: f64,
        tail_tolerance: f64,
    },
    #[error("basis mismatch: {0:?} vs {1:?} (no implicit basis change)")]
    BasisMismatch(Basis, Basis),
    #[error("phase {phase} rad is not supported for basis {basis:?}: {message}")]
    UnsupportedPhase {
        basis: Basis,
        phase: f64,
        message: &'static str,
    },
    #[error("Alice outcome {outcome:?} does not belong to basis {basis:?}")]
    OutcomeBasisMismatch {
        outcome: AliceOutcome,
        basis: AliceBasis,
    },
    #[error("empty phase grid")]
    EmptyPhaseGrid,
}

/// Amplifier parameters: nonlinear gain and truncation policy.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpaParams {
    /// Dimensionless nonlinear gain g >= 0.
    pub gain: f64,
    /// Starting truncation index for the odd (dominant) mode.
    pub cutoff_i: usize,
    /// Starting truncation index for the even (orthogonal) mode.
    pub cutoff_j: usize,
    /// Probability mass allowed outside the truncated table, in (0, 1).
    pub tail_tolerance: f64,
}

impl OpaParams {
    pub fn new(gain: f64) -> Self {
        OpaParams {
            gain,
            cutoff_i: 64,
            cutoff_j: 64,
            tail_tolerance: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<(), OpaError> {
        if !self.gain.is_finite() || self.gain < 0.0 {
            return Err(OpaError::InvalidParams {
                field: "gain",
                message: format!("must be finite and >= 0, got {}", self.gain),
            });
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(OpaError::InvalidParams {
                field: "tail_tolerance",
                message: format!("must lie in (0, 1), got {}", self.tail_tolerance),
            });
        }
        Ok(())
    }

    /// C = cosh g.
    pub fn cosh_gain(&self) -> f64 {
        self.gain.cosh()
    }

    /// Nonlinear transfer ratio tanh g, in [0, 1).
    pub fn tanh_gain(&self) -> f64 {
        self.gain.tanh()
    }

    /// Mean squeezed-vacuum photon number per mode, sinh^2 g.
    pub fn mean_squeezed_photons(&self) -> f64 {
        let s = self.gain.sinh();
        s * s
    }
}

/// Polarization basis labels for the two output modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    PlusMinus,
    Lr,
    Hv,
}

/// Identity of a heralded macro-qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MacrostateLabel {
    /// Injected phase 0; dominant mode is the basis "plus" mode.
    PhiPlus,
    /// Injected phase pi; dominant mode is the basis "minus" mode.
    PhiMinus,
    /// Equatorial macro-qubit with injected phase +pi/2 (heralded by L).
    EquatorialPlus,
    /// Equatorial macro-qubit with injected phase -pi/2 (heralded by R).
    EquatorialMinus,
}

impl MacrostateLabel {
    /// Injected phase in radians.
    pub fn phase(self) -> f64 {
        match self {
            MacrostateLabel::PhiPlus => 0.0,
            MacrostateLabel::PhiMinus => PI,
            MacrostateLabel::EquatorialPlus => PI / 2.0,
            MacrostateLabel::EquatorialMinus => -PI / 2.0,
        }
    }

    /// Exact cosine of the injected phase; the equatorial pair sits at
    /// exactly zero, where `phase().cos()` would leave float residue.
    pub fn cos_phase(self) -> f64 {
        match self {
            MacrostateLabel::PhiPlus => 1.0,
            MacrostateLabel::PhiMinus => -1.0,
            MacrostateLabel::EquatorialPlus | MacrostateLabel::EquatorialMinus => 0.0,
        }
    }

    /// Basis in which the expansion takes the standard form.
    pub fn natural_basis(self) -> Basis {
        match self {
            MacrostateLabel::PhiPlus | MacrostateLabel::PhiMinus => Basis::PlusMinus,
            MacrostateLabel::EquatorialPlus | MacrostateLabel::EquatorialMinus => Basis::Lr,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MacrostateLabel::PhiPlus => "phi_plus",
            MacrostateLabel::PhiMinus => "phi_minus",
            MacrostateLabel::EquatorialPlus => "phi_equatorial_plus",
            MacrostateLabel::EquatorialMinus => "phi_equatorial_minus",
        }
    }

    /// The orthogonal partner within the same heralding basis.
    pub fn conjugate(self) -> Self {
        match self {
            MacrostateLabel::PhiPlus => MacrostateLabel::PhiMinus,
            MacrostateLabel::PhiMinus => MacrostateLabel::PhiPlus,
            MacrostateLabel::EquatorialPlus => MacrostateLabel::EquatorialMinus,
            MacrostateLabel::EquatorialMinus => MacrostateLabel::EquatorialPlus,
        }
    }
}

/// Truncated grid of macro-qubit amplitudes `gamma_ij` with a norm
/// certificate. The grid is stored row-major over (i, j); entry (i, j)
/// weights the occupation with `2i+1` photons in the dominant mode and
/// `2j` in the orthogonal mode.
#[derive(Debug, Clone)]
pub struct FockAmplitudeTable {
    basis: Basis,
    phase: f64,
    dominant_first: bool,
    cutoff_i: usize,
    cutoff_j: usize,
    tail_tolerance: f64,
    amplitudes: Vec<f64>,
    norm: f64,
}

impl FockAmplitudeTable {
    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// True when the dominant (odd-occupation) mode is the first mode of the
    /// basis pair.
    pub fn dominant_first(&self) -> bool {
        self.dominant_first
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        (self.cutoff_i, self.cutoff_j)
    }

    /// Achieved probability mass inside the truncation.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Probability mass certified to lie outside the table.
    pub fn tail_mass(&self) -> f64 {
        (1.0 - self.norm).max(0.0)
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn amplitude(&self, i: usize, j: usize) -> f64 {
        assert!(i <= self.cutoff_i && j <= self.cutoff_j, "index outside table");
        self.amplitudes[i * (self.cutoff_j + 1) + j]
    }

    /// Joint photon occupation (first mode, second mode) of entry (i, j).
    pub fn occupation(&self, i: usize, j: usize) -> (usize, usize) {
        if self.dominant_first {
            (2 * i + 1, 2 * j)
        } else {
            (2 * j, 2 * i + 1)
        }
    }
}

/// Cumulative table of ln(n!), built once and shared across a grid fill.
struct LnFactorial {
    cum: Vec<f64>,
}

impl LnFactorial {
    fn up_to(n_max: usize) -> Self {
        let mut cum = Vec::with_capacity(n_max + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for n in 1..=n_max {
            acc += (n as f64).ln();
            cum.push(acc);
        }
        LnFactorial { cum }
    }

    fn get(&self, n: usize) -> f64 {
        self.cum[n]
    }
}

/// Neumaier-compensated sum; keeps certificate sums accurate for
/// multi-million-term grids.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Log-magnitudes of the i-dependent and j-dependent amplitude factors:
/// gamma_ij = sign(j) * exp(la[i] + lb[j]).
fn gamma_log_factors(
    params: &OpaParams,
    cutoff_i: usize,
    cutoff_j: usize,
    lf: &LnFactorial,
) -> (Vec<f64>, Vec<f64>) {
    let ln_c = params.cosh_gain().ln();
    let half_gamma = params.tanh_gain() / 2.0;
    let ln_hg = half_gamma.ln(); // -inf at zero gain; handled below
    let la: Vec<f64> = (0..=cutoff_i)
        .map(|i| {
            let pow = if i == 0 { 0.0 } else { i as f64 * ln_hg };
            0.5 * lf.get(2 * i + 1) - lf.get(i) - 1.5 * ln_c + pow
        })
        .collect();
    let lb: Vec<f64> = (0..=cutoff_j)
        .map(|j| {
            let pow = if j == 0 { 0.0 } else { j as f64 * ln_hg };
            0.5 * lf.get(2 * j) - lf.get(j) - 0.5 * ln_c + pow
        })
        .collect();
    (la, lb)
}

/// Signed amplitude `gamma_ij` of the macro-qubit expansion,
/// sqrt((1+2i)!(2j)!) / (i! j!) * cosh(g)^-2 * (-tanh(g)/2)^j * (tanh(g)/2)^i,
/// evaluated in log space. Finite for any index pair; no intermediate
/// overflow is possible by construction.
pub fn gamma_coefficient(i: usize, j: usize, params: &OpaParams) -> Result<f64, OpaError> {
    params.validate()?;
    if params.gain == 0.0 {
        // No amplification: the table collapses to the bare injected photon.
        return Ok(if i == 0 && j == 0 { 1.0 } else { 0.0 });
    }
    let lf = LnFactorial::up_to(2 * i.max(j) + 1);
    let (la, lb) = gamma_log_factors(params, i, j, &lf);
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * (la[i] + lb[j]).exp())
}

fn canonical_orientation(basis: Basis, phase: f64) -> Result<bool, OpaError> {
    match basis {
        Basis::PlusMinus | Basis::Hv => {
            if phase == 0.0 {
                Ok(true)
            } else if phase == PI {
                Ok(false)
            } else {
                Err(OpaError::UnsupportedPhase {
                    basis,
                    phase,
                    message: "pole bases accept phases 0 and pi only; general phases are handled analytically",
                })
            }
        }
        Basis::Lr => {
            if phase == PI / 2.0 {
                Ok(true)
            } else if phase == -PI / 2.0 {
                Ok(false)
            } else {
                Err(OpaError::UnsupportedPhase {
                    basis,
                    phase,
                    message: "the L/R basis hosts the equatorial pair at phases +pi/2 and -pi/2",
                })
            }
        }
    }
}

/// Grow a marginal cumulative mass until it reaches `target`, starting from
/// `start` entries and capped at `MAX_CUTOFF`. Returns (cutoff, mass).
fn grow_marginal(log_terms: impl Fn(usize) -> f64, start: usize, target: f64) -> (usize, f64) {
    let mut mass = 0.0;
    let mut comp = 0.0;
    let mut cutoff = 0;
    for n in 0..=MAX_CUTOFF {
        let v = log_terms(n).exp();
        let t = mass + v;
        if mass.abs() >= v.abs() {
            comp += (mass - t) + v;
        } else {
            comp += (v - t) + mass;
        }
        mass = t;
        cutoff = n;
        if n >= start && mass + comp >= target {
            break;
        }
    }
    (cutoff, mass + comp)
}

/// Build the truncated amplitude table for the macro-qubit `|Phi^phase>`
/// expressed in its natural basis. Cutoffs grow automatically from the
/// values in `params` until the norm certificate
/// `sum |gamma_ij|^2 >= 1 - tail_tolerance` holds, up to [`MAX_CUTOFF`]
/// per index.
pub fn build_macrostate(
    params: &OpaParams,
    basis: Basis,
    phase: f64,
) -> Result<FockAmplitudeTable, OpaError> {
    params.validate()?;
    let dominant_first = canonical_orientation(basis, phase)?;

    if params.gain == 0.0 {
        return Ok(FockAmplitudeTable {
            basis,
            phase,
            dominant_first,
            cutoff_i: 0,
            cutoff_j: 0,
            tail_tolerance: params.tail_tolerance,
            amplitudes: vec![1.0],
            norm: 1.0,
        });
    }

    let lf = LnFactorial::up_to(2 * MAX_CUTOFF + 1);
    let ln_c = params.cosh_gain().ln();
    let x = 2.0 * (params.tanh_gain() / 2.0).ln(); // ln((tanh g / 2)^2)

    // Marginal masses factorize: |gamma_ij|^2 = s_i * t_j with
    // s_i = C^-3 (2i+1)!/(i!)^2 (G/2)^(2i), t_j = C^-1 (2j)!/(j!)^2 (G/2)^(2j),
    // and each marginal sums to 1 analytically. Growing each to
    // 1 - tol/2 certifies the product >= 1 - tol.
    let target = 1.0 - params.tail_tolerance / 2.0;
    let (ci, mass_i) = grow_marginal(
        |i| lf.get(2 * i + 1) - 2.0 * lf.get(i) - 3.0 * ln_c + i as f64 * x,
        params.cutoff_i,
        target,
    );
    let (cj, mass_j) = grow_marginal(
        |j| lf.get(2 * j) - 2.0 * lf.get(j) - ln_c + j as f64 * x,
        params.cutoff_j,
        target,
    );
    if mass_i * mass_j < 1.0 - params.tail_tolerance {
        return Err(OpaError::TruncationFailure {
            cutoff_i: ci,
            cutoff_j: cj,
            achieved: mass_i * mass_j,
            tail_tolerance: params.tail_tolerance,
        });
    }

    let (la, lb) = gamma_log_factors(params, ci, cj, &lf);
    let mut amplitudes = Vec::with_capacity((ci + 1) * (cj + 1));
    for i in 0..=ci {
        for (j, lbj) in lb.iter().enumerate() {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            amplitudes.push(sign * (la[i] + lbj).exp());
        }
    }

    // The certificate is recomputed from the materialized grid; row sums
    // keep the accumulated rounding well below the tolerance.
    let row_masses: Vec<f64> = (0..=ci)
        .map(|i| {
            compensated_sum(
                amplitudes[i * (cj + 1)..(i + 1) * (cj + 1)]
                    .iter()
                    .map(|g| g * g),
            )
        })
        .collect();
    let norm = compensated_sum(row_masses.into_iter());
    if norm < 1.0 - params.tail_tolerance {
        return Err(OpaError::TruncationFailure {
            cutoff_i: ci,
            cutoff_j: cj,
            achieved: norm,
            tail_tolerance: params.tail_tolerance,
        });
    }

    Ok(FockAmplitudeTable {
        basis,
        phase,
        dominant_first,
        cutoff_i: ci,
        cutoff_j: cj,
        tail_tolerance: params.tail_tolerance,
        amplitudes,
        norm,
    })
}

/// Inner product of two macro-qubit tables in the joint Fock occupation
/// representation of their shared basis. Opposite orientations populate
/// disjoint parity classes (odd/even vs even/odd occupations), so their
/// overlap vanishes identically, independent of truncation.
pub fn state_overlap(a: &FockAmplitudeTable, b: &FockAmplitudeTable) -> Result<f64, OpaError> {
    if a.basis != b.basis {
        return Err(OpaError::BasisMismatch(a.basis, b.basis));
    }
    if a.dominant_first != b.dominant_first {
        return Ok(0.0);
    }
    let ci = a.cutoff_i.min(b.cutoff_i);
    let cj = a.cutoff_j.min(b.cutoff_j);
    let mut terms = Vec::with_capacity(ci + 1);
    for i in 0..=ci {
        terms.push(compensated_sum(
            (0..=cj).map(|j| a.amplitude(i, j) * b.amplitude(i, j)),
        ));
    }
    Ok(compensated_sum(terms.into_iter()))
}

/// Closed-form mean photon numbers over the two polarization modes for an
/// injected phase phi: N_pm = mbar + (mbar + 1/2)(1 +- cos phi).
pub fn mean_photon_numbers(params: &OpaParams, phase: f64) -> Result<(f64, f64), OpaError> {
    params.validate()?;
    if !phase.is_finite() {
        return Err(OpaError::InvalidParams {
            field: "phase",
            message: "must be finite".into(),
        });
    }
    let m = params.mean_squeezed_photons();
    let c = phase.cos();
    Ok((m + (m + 0.5) * (1.0 + c), m + (m + 0.5) * (1.0 - c)))
}

/// Fringe difference N(phi) = N_plus - N_minus = (2 mbar + 1) cos phi.
pub fn fringe_difference(params: &OpaParams, phase: f64) -> Result<f64, OpaError> {
    params.validate()?;
    Ok((2.0 * params.mean_squeezed_photons() + 1.0) * phase.cos())
}

/// Series-based mean photon numbers (N_plus, N_minus) read directly off the
/// table: N_dom = sum |gamma|^2 (2i+1), N_orth = sum |gamma|^2 (2j). Defined
/// only on the table's own measurement basis (phase 0 or pi); the two
/// components swap for phase pi.
pub fn mean_photons_numeric(table: &FockAmplitudeTable) -> Result<(f64, f64), OpaError> {
    if table.phase != 0.0 && table.phase != PI {
        return Err(OpaError::UnsupportedPhase {
            basis: table.basis,
            phase: table.phase,
            message: "numeric oracle is defined on the table's own basis (phase 0 or pi)",
        });
    }
    let cj = table.cutoff_j;
    let mut dom_terms = Vec::with_capacity(table.cutoff_i + 1);
    let mut orth_terms = Vec::with_capacity(table.cutoff_i + 1);
    for i in 0..=table.cutoff_i {
        let row = &table.amplitudes[i * (cj + 1)..(i + 1) * (cj + 1)];
        dom_terms.push(
            (2 * i + 1) as f64 * compensated_sum(row.iter().map(|g| g * g)),
        );
        orth_terms.push(compensated_sum(
            row.iter().enumerate().map(|(j, g)| (2 * j) as f64 * g * g),
        ));
    }
    let n_dom = compensated_sum(dom_terms.into_iter());
    let n_orth = compensated_sum(orth_terms.into_iter());
    if table.phase == 0.0 {
        Ok((n_dom, n_orth))
    } else {
        Ok((n_orth, n_dom))
    }
}

/// Interference fringe of the mean photon numbers over a phase grid.
#[derive(Debug, Clone, Serialize)]
pub struct FringeCurve {
    pub phases: Vec<f64>,
    pub n_plus: Vec<f64>,
    pub n_minus: Vec<f64>,
    pub difference: Vec<f64>,
}

impl FringeCurve {
    /// Peak-to-peak excursion of the fringe difference.
    pub fn peak_to_peak(&self) -> f64 {
        let max = self.difference.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = self.difference.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Evaluate the analytic fringe pattern over a phase grid.
pub fn fringe_pattern(params: &OpaParams, phases: &[f64]) -> Result<FringeCurve, OpaError> {
    if phases.is_empty() {
        return Err(OpaError::EmptyPhaseGrid);
    }
    let mut n_plus = Vec::with_capacity(phases.len());
    let mut n_minus = Vec::with_capacity(phases.len());
    let mut difference = Vec::with_capacity(phases.len());
    for &phi in phases {
        let (p, m) = mean_photon_numbers(params, phi)?;
        n_plus.push(p);
        n_minus.push(m);
        difference.push(p - m);
    }
    Ok(FringeCurve {
        phases: phases.to_vec(),
        n_plus,
        n_minus,
        difference,
    })
}

/// Measurement bases available to Alice's trigger-photon analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceBasis {
    PlusMinus,
    Lr,
}

/// Single-photon detection outcomes at Alice's station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceOutcome {
    Plus,
    Minus,
    L,
    R,
}

impl AliceOutcome {
    pub fn basis(self) -> AliceBasis {
        match self {
            AliceOutcome::Plus | AliceOutcome::Minus => AliceBasis::PlusMinus,
            AliceOutcome::L | AliceOutcome::R => AliceBasis::Lr,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AliceOutcome::Plus => "plus",
            AliceOutcome::Minus => "minus",
            AliceOutcome::L => "l",
            AliceOutcome::R => "r",
        }
    }
}

impl AliceBasis {
    pub fn outcomes(self) -> [AliceOutcome; 2] {
        match self {
            AliceBasis::PlusMinus => [AliceOutcome::Plus, AliceOutcome::Minus],
            AliceBasis::Lr => [AliceOutcome::L, AliceOutcome::R],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AliceBasis::PlusMinus => "plus_minus",
            AliceBasis::Lr => "lr",
        }
    }
}

/// Association between Alice's outcomes and heralded macro-qubits, induced
/// by the singlet structure of the micro-macro entangled state.
#[derive(Debug, Clone, Copy)]
pub struct SingletHeraldMap {
    pub alice_basis: AliceBasis,
}

/// Resolve which macro-qubit a given Alice outcome heralds. Outcome |+>
/// heralds Phi+ and |-> heralds Phi-; the {L, R} basis heralds the
/// equatorial pair at phases +-pi/2.
pub fn herald(outcome: AliceOutcome, map: &SingletHeraldMap) -> Result<MacrostateLabel, OpaError> {
    if outcome.basis() != map.alice_basis {
        return Err(OpaError::OutcomeBasisMismatch {
            outcome,
            basis: map.alice_basis,
        });
    }
    Ok(match outcome {
        AliceOutcome::Plus => MacrostateLabel::PhiPlus,
        AliceOutcome::Minus => MacrostateLabel::PhiMinus,
        AliceOutcome::L => MacrostateLabel::EquatorialPlus,
        AliceOutcome::R => MacrostateLabel::EquatorialMinus,
    })
}
