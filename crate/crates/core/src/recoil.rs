//! Bookkeeping of the measurement geometry: polarization splitting of the
//! macro-qubit, reflection off the condensate mirror, the recoil direction
//! correlated with Alice's heralding, and the momentum-peak population
//! transfer.
//!
//! Convention fixed here: the pi_plus component travels on mode U, and a net
//! kick toward U populates the +2 hbar k momentum peak.

use crate::bragg::{active_photon_count, BraggError};
use crate::opa::{
    herald, AliceBasis, AliceOutcome, MacrostateLabel, OpaError, OpaParams, SingletHeraldMap,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RecoilError {
    #[error("invalid parameter {field}: {message}")]
    InvalidParams { field: &'static str, message: String },
    #[error("source momentum peak holds {available} of the population but {required} must transfer")]
    SourcePeakDepleted { required: f64, available: f64 },
    #[error(transparent)]
    Opa(#[from] OpaError),
    #[error(transparent)]
    Bragg(#[from] BraggError),
}

/// A heralded macro-qubit together with its photon bookkeeping: mean photon
/// numbers per polarization mode and the band-filtered active counts that
/// can exchange momentum with the mirror.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolarizationMacrostate {
    pub label: MacrostateLabel,
    pub phase: f64,
    /// Mean photon number in the pi_plus mode.
    pub n_plus: f64,
    /// Mean photon number in the pi_minus mode.
    pub n_minus: f64,
    /// Active (band-filtered) photons in the pi_plus mode.
    pub n_active_plus: f64,
    /// Active photons in the pi_minus mode.
    pub n_active_minus: f64,
}

impl PolarizationMacrostate {
    /// Assemble the state from the amplifier gain and the mirror band:
    /// N_pm from the closed forms at the heralded phase, then
    /// N'_pm = (band / source width) N_pm.
    pub fn from_herald(
        gain: f64,
        label: MacrostateLabel,
        band_hz: f64,
        source_width_hz: f64,
    ) -> Result<Self, RecoilError> {
        let params = OpaParams::new(gain);
        params.validate()?;
        let phase = label.phase();
        // closed forms with the label's exact cosine, so the equatorial pair
        // balances its modes identically
        let mbar = params.mean_squeezed_photons();
        let c = label.cos_phase();
        let n_plus = mbar + (mbar + 0.5) * (1.0 + c);
        let n_minus = mbar + (mbar + 0.5) * (1.0 - c);
        let n_active_plus = active_photon_count(n_plus, band_hz, source_width_hz)?;
        let n_active_minus = active_photon_count(n_minus, band_hz, source_width_hz)?;
        Ok(PolarizationMacrostate {
            label,
            phase,
            n_plus,
            n_minus,
            n_active_plus,
            n_active_minus,
        })
    }

    pub fn total_active(&self) -> f64 {
        self.n_active_plus + self.n_active_minus
    }
}

/// Spatial modes of the Sagnac-like geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialMode {
    U,
    D,
}

/// Which wavefunction factor a component carries: the dominant (phi) or the
/// orthogonal (xi) contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    DominantPhi,
    MinorXi,
}

/// One polarization component routed onto a spatial mode.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModeComponent {
    pub mode: SpatialMode,
    pub kind: ComponentKind,
    pub photons: f64,
    pub active_photons: f64,
}

/// The two components of a split macro-qubit, tagged with their origin.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitComponents {
    pub source: MacrostateLabel,
    pub up: ModeComponent,
    pub down: ModeComponent,
}

/// Route the pi_plus component to mode U and the pi_minus component to mode
/// D (half-wave plate + polarizing beam splitter). Photon counts are
/// preserved exactly.
pub fn split_macrostate(state: &PolarizationMacrostate) -> SplitComponents {
    let plus_dominant = state.n_plus >= state.n_minus;
    SplitComponents {
        source: state.label,
        up: ModeComponent {
            mode: SpatialMode::U,
            kind: if plus_dominant {
                ComponentKind::DominantPhi
            } else {
                ComponentKind::MinorXi
            },
            photons: state.n_plus,
            active_photons: state.n_active_plus,
        },
        down: ModeComponent {
            mode: SpatialMode::D,
            kind: if plus_dominant {
                ComponentKind::MinorXi
            } else {
                ComponentKind::DominantPhi
            },
            photons: state.n_minus,
            active_photons: state.n_active_minus,
        },
    }
}

/// Recoil direction of the condensate after the reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoilDirection {
    U,
    D,
    /// Equal branch weights; kept symbolic with amplitude 2^{-1/2} per
    /// branch. Degenerates to no kick at zero reflected flux.
    Superposed,
}

impl RecoilDirection {
    pub fn name(self) -> &'static str {
        match self {
            RecoilDirection::U => "u",
            RecoilDirection::D => "d",
            RecoilDirection::Superposed => "superposed",
        }
    }
}

/// Result of the mirror interaction: per-direction momentum kicks (units of
/// 2 hbar k times photon count), the transmitted remainders, the recombined
/// output state, and the condensate drift velocity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScenarioOutcome {
    pub recoil: RecoilDirection,
    /// Reflected photons incident from mode U: kick toward U.
    pub kick_up: f64,
    /// Reflected photons incident from mode D: kick toward D.
    pub kick_down: f64,
    /// Non-reflected photons per incident mode; they exert no kick but are
    /// tracked so the bookkeeping audits to the incident totals.
    pub transmitted_up: f64,
    pub transmitted_down: f64,
    /// Macrostate recombined on the output mode by the Faraday-rotator path.
    pub output_state: MacrostateLabel,
    /// Net drift speed |N'_U - N'_D| R / N_at * v_r.
    pub drift_velocity: f64,
}

/// Reflect the two counterpropagating components off the mirror. Reflected
/// counts are R times the incident counts; the back-scattered light swaps
/// modes (U => D, D => U) while the condensate recoils opposite to the
/// larger reflected flux's new direction, i.e. toward the side the dominant
/// beam came from.
pub fn interact(
    components: &SplitComponents,
    mirror_r: f64,
    atom_count: f64,
    recoil_velocity: f64,
) -> Result<ScenarioOutcome, RecoilError> {
    if !(0.0..=1.0).contains(&mirror_r) || !mirror_r.is_finite() {
        return Err(RecoilError::InvalidParams {
            field: "mirror_r",
            message: format!("reflectivity must lie in [0, 1], got {mirror_r}"),
        });
    }
    if !(atom_count.is_finite() && atom_count > 0.0) {
        return Err(RecoilError::InvalidParams {
            field: "atom_count",
            message: format!("must be positive, got {atom_count}"),
        });
    }
    let kick_up = mirror_r * components.up.active_photons;
    let kick_down = mirror_r * components.down.active_photons;
    let recoil = if kick_up > kick_down {
        RecoilDirection::U
    } else if kick_down > kick_up {
        RecoilDirection::D
    } else {
        RecoilDirection::Superposed
    };
    let drift = (kick_up - kick_down).abs() / atom_count * recoil_velocity;
    Ok(ScenarioOutcome {
        recoil,
        kick_up,
        kick_down,
        transmitted_up: (1.0 - mirror_r) * components.up.active_photons,
        transmitted_down: (1.0 - mirror_r) * components.down.active_photons,
        output_state: components.source,
        drift_velocity: drift,
    })
}

/// Momentum-space population model: peaks at n * 2 hbar k with Gaussian
/// velocity-space profiles.
#[derive(Debug, Clone, Serialize)]
pub struct MomentumPeakModel {
    /// Peak orders, symmetric around zero.
    pub orders: Vec<i32>,
    /// Population fraction per peak; sums to 1.
    pub fractions: Vec<f64>,
    /// Velocity-space standard deviation per peak [m/s].
    pub width_velocity: f64,
    /// Velocity separation of adjacent peaks, 2 hbar k / m = 2 v_r [m/s].
    pub peak_spacing_velocity: f64,
}

impl MomentumPeakModel {
    /// Distribution before the interaction: first-order peaks populated at
    /// `first_order_fraction` each (about 1% of the atoms), remainder at
    /// rest.
    pub fn initial(
        first_order_fraction: f64,
        width_velocity: f64,
        peak_spacing_velocity: f64,
    ) -> Result<Self, RecoilError> {
        if !(0.0..0.5).contains(&first_order_fraction) {
            return Err(RecoilError::InvalidParams {
                field: "first_order_fraction",
                message: format!("must lie in [0, 0.5), got {first_order_fraction}"),
            });
        }
        if !(width_velocity.is_finite() && width_velocity > 0.0) {
            return Err(RecoilError::InvalidParams {
                field: "width_velocity",
                message: format!("must be positive, got {width_velocity}"),
            });
        }
        if !(peak_spacing_velocity.is_finite() && peak_spacing_velocity > 0.0) {
            return Err(RecoilError::InvalidParams {
                field: "peak_spacing_velocity",
                message: format!("must be positive, got {peak_spacing_velocity}"),
            });
        }
        Ok(MomentumPeakModel {
            orders: vec![-1, 0, 1],
            fractions: vec![
                first_order_fraction,
                1.0 - 2.0 * first_order_fraction,
                first_order_fraction,
            ],
            width_velocity,
            peak_spacing_velocity,
        })
    }

    pub fn fraction(&self, order: i32) -> f64 {
        self.orders
            .iter()
            .position(|&o| o == order)
            .map(|k| self.fractions[k])
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.fractions.iter().sum()
    }

    /// Velocity-space population density: sum of per-peak Gaussians.
    pub fn profile(&self, velocities: &[f64]) -> Vec<f64> {
        let sigma = self.width_velocity;
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        velocities
            .iter()
            .map(|&v| {
                self.orders
                    .iter()
                    .zip(&self.fractions)
                    .map(|(&n, &f)| {
                        let center = n as f64 * self.peak_spacing_velocity;
                        let z = (v - center) / sigma;
                        f * norm * (-0.5 * z * z).exp()
                    })
                    .sum()
            })
            .collect()
    }
}

/// Move the reflected active-photon fractions out of the zero-momentum peak:
/// R N'_plus / N_at of the population to the +1 peak (pi_plus rides mode U)
/// and R N'_minus / N_at to the -1 peak. Peak widths are unchanged. Returns
/// the (before, after) pair.
pub fn momentum_transfer_profile(
    state: &PolarizationMacrostate,
    model: &MomentumPeakModel,
    mirror_r: f64,
    atom_count: f64,
) -> Result<(MomentumPeakModel, MomentumPeakModel), RecoilError> {
    if !(0.0..=1.0).contains(&mirror_r) || !mirror_r.is_finite() {
        return Err(RecoilError::InvalidParams {
            field: "mirror_r",
            message: format!("reflectivity must lie in [0, 1], got {mirror_r}"),
        });
    }
    if !(atom_count.is_finite() && atom_count > 0.0) {
        return Err(RecoilError::InvalidParams {
            field: "atom_count",
            message: format!("must be positive, got {atom_count}"),
        });
    }
    let up_fraction = mirror_r * state.n_active_plus / atom_count;
    let down_fraction = mirror_r * state.n_active_minus / atom_count;
    let required = up_fraction + down_fraction;
    let available = model.fraction(0);
    if required > available {
        return Err(RecoilError::SourcePeakDepleted { required, available });
    }
    let before = model.clone();
    let mut after = model.clone();
    for (k, &order) in after.orders.iter().enumerate() {
        match order {
            0 => after.fractions[k] -= required,
            1 => after.fractions[k] += up_fraction,
            -1 => after.fractions[k] += down_fraction,
            _ => {}
        }
    }
    Ok((before, after))
}

/// One row of the outcome-correlation table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorrelationRow {
    pub basis: AliceBasis,
    pub outcome: AliceOutcome,
    pub heralded: MacrostateLabel,
    pub phase: f64,
    pub n_active_plus: f64,
    pub n_active_minus: f64,
    pub recoil: RecoilDirection,
    pub kick_up: f64,
    pub kick_down: f64,
    pub drift_velocity: f64,
}

/// Inputs for assembling the correlation table.
#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub gain: f64,
    pub bases: Vec<AliceBasis>,
    pub mirror_reflectivity: f64,
    pub atom_count: f64,
    pub band_hz: f64,
    pub source_width_hz: f64,
    pub recoil_velocity: f64,
}

/// Compose herald -> split -> interact for every outcome of every requested
/// basis: which macro-qubit Alice's click selects, which way the condensate
/// recoils, and how fast it drifts.
pub fn correlation_table(params: &ScenarioParams) -> Result<Vec<CorrelationRow>, RecoilError> {
    let mut rows = Vec::new();
    for &basis in &params.bases {
        let map = SingletHeraldMap { alice_basis: basis };
        for outcome in basis.outcomes() {
            let label = herald(outcome, &map)?;
            let state = PolarizationMacrostate::from_herald(
                params.gain,
                label,
                params.band_hz,
                params.source_width_hz,
            )?;
            let split = split_macrostate(&state);
            let result = interact(
                &split,
                params.mirror_reflectivity,
                params.atom_count,
                params.recoil_velocity,
            )?;
            rows.push(CorrelationRow {
                basis,
                outcome,
                heralded: label,
                phase: label.phase(),
                n_active_plus: state.n_active_plus,
                n_active_minus: state.n_active_minus,
                recoil: result.recoil,
                kick_up: result.kick_up,
                kick_down: result.kick_down,
                drift_velocity: result.drift_velocity,
            });
        }
    }
    Ok(rows)
}

/// Usable measurement time against grating decoherence: the 1/e window of
/// an exponential decay at the given rate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecoherenceWindow {
    pub rate: f64,
    pub window: f64,
}

impl DecoherenceWindow {
    /// Coherence fraction remaining at time `t`.
    pub fn fraction_at(&self, t: f64) -> f64 {
        (-self.rate * t).exp()
    }
}

pub fn decoherence_window(rate: f64) -> Result<DecoherenceWindow, RecoilError> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(RecoilError::InvalidParams {
            field: "rate",
            message: format!("must be positive, got {rate}"),
        });
    }
    Ok(DecoherenceWindow {
        rate,
        window: 1.0 / rate,
    })
}
