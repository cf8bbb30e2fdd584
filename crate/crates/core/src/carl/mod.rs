//! Coupled light-matter dynamics of the condensate grating.
//!
//! The one-dimensional condensate wavefunction evolves under its kinetic
//! term plus the potential sourced by the self-consistent reflected-field
//! amplitude; the field in turn is driven by the density grating's bunching
//! factor and damped at a rate kappa. Internally the solver works in
//! dimensionless units (theta = 2 k x, time in units of the two-photon
//! recoil frequency omega_r = 2 hbar k^2 / m); all inputs and outputs are SI.

mod evolve;
mod grating;

pub use evolve::evolve;
pub use grating::{bunching_factor, init_grating, momentum_spectrum, MomentumSpectrum};

use crate::bragg::AtomSpecies;
use crate::constants;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CarlError {
    #[error("invalid parameter {field}: {message}")]
    InvalidParams { field: &'static str, message: String },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("field does not match parameters: {0}")]
    FieldMismatch(String),
    #[error("invalid condensate field: {0}")]
    InvalidField(String),
    #[error("norm drift at step {step}: |norm - 1| = {drift} exceeds {allowed}")]
    NormDrift { step: usize, drift: f64, allowed: f64 },
    #[error("non-finite state at step {step}")]
    NonFinite { step: usize },
    #[error("momentum populations at step {step} sum to {total}, outside 1 +- 1e-6")]
    MomentumLeak { step: usize, total: f64 },
    #[error("momentum order {n_max} aliases on a grid with {points_per_period} points per period")]
    Aliasing { n_max: usize, points_per_period: usize },
    #[error("atom count must be positive, got {0}")]
    NonPositiveAtomCount(f64),
}

/// Spatial discretization: `points_per_period` samples per lambda/2 period,
/// `periods` periods in the periodic domain.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points_per_period: usize,
    pub periods: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), CarlError> {
        if self.points_per_period < 16 {
            return Err(CarlError::InvalidParams {
                field: "points_per_period",
                message: format!("must be >= 16, got {}", self.points_per_period),
            });
        }
        if self.points_per_period % 2 != 0 {
            return Err(CarlError::InvalidParams {
                field: "points_per_period",
                message: "must be even so the slab edges land on the grid".into(),
            });
        }
        if self.periods < 1 {
            return Err(CarlError::InvalidParams {
                field: "periods",
                message: "must be >= 1".into(),
            });
        }
        Ok(())
    }

    pub fn total_points(&self) -> usize {
        self.points_per_period * self.periods
    }
}

/// How the reflected field is advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionMode {
    /// Field integrated alongside the wavefunction (explicit 4th-order step).
    Coupled,
    /// Field eliminated as a = (g N / kappa) B(t); valid when the damping
    /// dominates every other rate.
    Adiabatic,
}

/// Physical and numerical parameters of a coupled evolution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarlParams {
    /// Light-matter coupling rate g_c [1/s].
    pub coupling_rate: f64,
    /// Field damping rate kappa [1/s].
    pub field_damping: f64,
    /// Pump-scattered detuning delta = omega - omega_s [rad/s].
    pub detuning: f64,
    /// Total atom number N.
    pub atom_count: f64,
    /// Optical wavenumber k [1/m].
    pub wavenumber: f64,
    /// Atomic mass [kg].
    pub atom_mass: f64,
    pub grid: GridSpec,
    /// Time step [s].
    pub dt: f64,
    /// Total evolution time [s].
    pub total_time: f64,
    /// Record every `sample_stride` steps.
    pub sample_stride: usize,
    pub mode: EvolutionMode,
}

impl CarlParams {
    pub fn validate(&self) -> Result<(), CarlError> {
        self.grid.validate()?;
        let positive = [
            ("wavenumber", self.wavenumber),
            ("atom_mass", self.atom_mass),
            ("atom_count", self.atom_count),
            ("dt", self.dt),
            ("total_time", self.total_time),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(CarlError::InvalidParams {
                    field,
                    message: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        for (field, v) in [
            ("coupling_rate", self.coupling_rate),
            ("field_damping", self.field_damping),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CarlError::InvalidParams {
                    field,
                    message: format!("must be finite and >= 0, got {v}"),
                });
            }
        }
        if !self.detuning.is_finite() {
            return Err(CarlError::InvalidParams {
                field: "detuning",
                message: "must be finite".into(),
            });
        }
        if self.mode == EvolutionMode::Adiabatic && self.field_damping <= 0.0 {
            return Err(CarlError::InvalidParams {
                field: "field_damping",
                message: "adiabatic elimination needs kappa > 0".into(),
            });
        }
        if self.sample_stride == 0 {
            return Err(CarlError::InvalidParams {
                field: "sample_stride",
                message: "must be >= 1".into(),
            });
        }
        Ok(())
    }

    /// Two-photon recoil angular frequency omega_r = 2 hbar k^2 / m [rad/s].
    pub fn recoil_frequency(&self) -> f64 {
        2.0 * constants::HBAR * self.wavenumber * self.wavenumber / self.atom_mass
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavenumber
    }

    pub fn steps(&self) -> usize {
        (self.total_time / self.dt).round().max(1.0) as usize
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

/// Complex matter-wave amplitude on a periodic grid, unit-normalized:
/// integral |Psi|^2 dx = 1.
#[derive(Debug, Clone)]
pub struct CondensateField {
    pub psi: Vec<Complex64>,
    /// Grid spacing [m].
    pub dx: f64,
    pub points_per_period: usize,
}

impl CondensateField {
    /// Wrap raw samples, renormalizing to unit norm. Rejects empty,
    /// non-finite, or identically zero fields.
    pub fn new(
        psi: Vec<Complex64>,
        dx: f64,
        points_per_period: usize,
    ) -> Result<Self, CarlError> {
        if psi.is_empty() {
            return Err(CarlError::InvalidField("empty grid".into()));
        }
        if psi.len() % points_per_period != 0 {
            return Err(CarlError::InvalidField(format!(
                "grid length {} is not a whole number of {}-point periods",
                psi.len(),
                points_per_period
            )));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(CarlError::InvalidField(format!("dx must be > 0, got {dx}")));
        }
        let norm2: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
        if !norm2.is_finite() || norm2 <= 0.0 {
            return Err(CarlError::InvalidField(format!(
                "field norm^2 = {norm2}; must be finite and positive"
            )));
        }
        let scale = norm2.sqrt().recip();
        let psi = psi.into_iter().map(|c| c * scale).collect();
        Ok(CondensateField {
            psi,
            dx,
            points_per_period,
        })
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn periods(&self) -> usize {
        self.psi.len() / self.points_per_period
    }

    /// integral |Psi|^2 dx on the grid.
    pub fn norm(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.dx
    }

    /// Spatially uniform field (plane wave at rest).
    pub fn uniform(grid: &GridSpec, wavelength: f64) -> Result<Self, CarlError> {
        grid.validate()?;
        let dx = wavelength / 2.0 / grid.points_per_period as f64;
        CondensateField::new(
            vec![Complex64::new(1.0, 0.0); grid.total_points()],
            dx,
            grid.points_per_period,
        )
    }
}

/// Time series of field intensity, bunching, and momentum-order populations.
/// Momentum populations cover orders n in [-2, 2] (units of 2 hbar k); the
/// remainder of the spectrum is reported as `unbinned`.
#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub intensity: Vec<f64>,
    pub normalized_intensity: Vec<f64>,
    pub bunching_abs: Vec<f64>,
    pub momentum_populations: Vec<[f64; 5]>,
    pub unbinned: Vec<f64>,
    /// Intensity used as I(0) for normalization (first local maximum in
    /// coupled mode, the t = 0 value in adiabatic mode).
    pub reference_intensity: f64,
    pub final_field: CondensateField,
    pub final_a: Complex64,
}

impl EvolutionTrace {
    /// First time at which the normalized intensity falls below `level`,
    /// linearly interpolated between samples.
    pub fn crossing_time(&self, level: f64) -> Option<f64> {
        let n = &self.normalized_intensity;
        for k in 1..n.len() {
            if n[k - 1] >= level && n[k] < level {
                let frac = (n[k - 1] - level) / (n[k - 1] - n[k]);
                return Some(self.times[k - 1] + frac * (self.times[k] - self.times[k - 1]));
            }
        }
        None
    }
}

/// Single-photon recoil velocity v_r = (h / lambda) / m.
pub fn recoil_velocity(species: &AtomSpecies) -> f64 {
    constants::PLANCK / species.resonance_wavelength_m / species.mass_kg
}

/// Velocity change per scattering event, 2 hbar k / m = 2 v_r.
pub fn two_photon_recoil_velocity(species: &AtomSpecies) -> f64 {
    2.0 * recoil_velocity(species)
}

/// Recoil energy E_R = h^2 / (2 m lambda^2).
pub fn recoil_energy(species: &AtomSpecies) -> f64 {
    let h = constants::PLANCK;
    h * h / (2.0 * species.mass_kg * species.resonance_wavelength_m.powi(2))
}

/// Net drift velocity acquired by the condensate: (N' / N_at) v_r.
pub fn drift_velocity(n_active: f64, atom_count: f64, v_r: f64) -> Result<f64, CarlError> {
    if !(atom_count.is_finite() && atom_count > 0.0) {
        return Err(CarlError::NonPositiveAtomCount(atom_count));
    }
    Ok(n_active / atom_count * v_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bragg::AtomSpecies;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn recoil_velocity_rubidium() {
        let v = recoil_velocity(&AtomSpecies::rubidium_87());
        assert!(close(v, 5.886358035016959e-3, 1e-9), "{v}");
        // paper quotes "around 5 mm/s"
        assert!((v - 5.9e-3).abs() / 5.9e-3 < 0.01);
    }

    #[test]
    fn recoil_velocity_scalings() {
        let sp = AtomSpecies::rubidium_87();
        let mut half_mass = sp;
        half_mass.mass_kg /= 2.0;
        assert!(close(recoil_velocity(&half_mass), 2.0 * recoil_velocity(&sp), 1e-14));
        let mut double_lambda = sp;
        double_lambda.resonance_wavelength_m *= 2.0;
        assert!(close(recoil_velocity(&double_lambda), recoil_velocity(&sp) / 2.0, 1e-14));
        assert!(close(two_photon_recoil_velocity(&sp), 2.0 * recoil_velocity(&sp), 1e-15));
    }

    #[test]
    fn recoil_energy_rubidium() {
        let e = recoil_energy(&AtomSpecies::rubidium_87());
        assert!(close(e, 2.5002193120537517e-30, 1e-9), "{e}");
        // about h * 3.8 kHz
        assert!((e / crate::constants::PLANCK - 3.8e3).abs() < 100.0);
    }

    #[test]
    fn drift_velocity_arithmetic() {
        let v_r = 5.886358035016959e-3;
        assert_eq!(drift_velocity(0.0, 1e6, v_r).unwrap(), 0.0);
        let d = drift_velocity(2742.857142857143, 1e6, v_r).unwrap();
        assert!(close(d, 1.61454391818e-5, 1e-6), "{d}");
        assert!(close(drift_velocity(1e6, 1e6, v_r).unwrap(), v_r, 1e-15));
        assert!(drift_velocity(1.0, 0.0, v_r).is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = test_params();
        assert!(p.validate().is_ok());
        p.grid.points_per_period = 8;
        assert!(p.validate().is_err());
        p.grid.points_per_period = 128;
        p.mode = EvolutionMode::Adiabatic;
        p.field_damping = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn recoil_frequency_value() {
        let p = test_params();
        assert!(close(p.recoil_frequency(), 94833.53414978733, 1e-9));
    }

    pub(crate) fn test_params() -> CarlParams {
        CarlParams {
            coupling_rate: 0.0,
            field_damping: 1e4,
            detuning: 0.0,
            atom_count: 1e6,
            wavenumber: 2.0 * std::f64::consts::PI / 780e-9,
            atom_mass: crate::constants::RB87_MASS_KG,
            grid: GridSpec {
                points_per_period: 128,
                periods: 8,
            },
            dt: 2e-8,
            total_time: 2e-6,
            sample_stride: 10,
            mode: EvolutionMode::Coupled,
        }
    }

    #[test]
    fn field_constructor_normalizes_and_validates() {
        let grid = GridSpec { points_per_period: 16, periods: 1 };
        let f = CondensateField::uniform(&grid, 780e-9).unwrap();
        assert!((f.norm() - 1.0).abs() < 1e-12);
        assert!(CondensateField::new(vec![], 1e-9, 16).is_err());
        assert!(
            CondensateField::new(vec![Complex64::new(0.0, 0.0); 16], 1e-9, 16).is_err()
        );
    }
}
