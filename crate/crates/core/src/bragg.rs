//! Classical quarter-wave-stack model of the patterned condensate mirror.
//!
//! The condensate is shaped into `2 N_D` alternating slabs of matter and
//! vacuum, each a quarter wavelength thick. A two-level-atom susceptibility
//! supplies the index contrast `epsilon(detuning)`, and the stack
//! reflectivity follows the closed form `R = tanh^2(N_D ln n_B)` evaluated in
//! log space so that large exponents never overflow.

use crate::constants;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BraggError {
    #[error("invalid species field {field}: {message}")]
    InvalidSpecies { field: &'static str, message: String },
    #[error("epsilon diverges at zero detuning under the as-written variant")]
    ZeroDetuningSingularity,
    #[error("refraction index {n_b} below vacuum; the stack model assumes contrast above 1")]
    IndexBelowVacuum { n_b: f64 },
    #[error("layer-pair count must be >= 1")]
    NoLayers,
    #[error("spectrum point {index} (detuning {detuning_hz} Hz): {source}")]
    SpectrumPoint {
        index: usize,
        detuning_hz: f64,
        source: Box<BraggError>,
    },
    #[error("spectrum point {index}: contrast {epsilon} drives the index to {n_b} <= 0")]
    NonPositiveIndex { index: usize, epsilon: f64, n_b: f64 },
    #[error("empty detuning grid")]
    EmptyGrid,
    #[error("no spectrum point reaches threshold {threshold} (max R = {max_r})")]
    EmptyBand { threshold: f64, max_r: f64 },
    #[error("reflective plateau is not bracketed by the grid (R >= threshold at the {side} edge)")]
    PlateauNotBracketed { side: &'static str },
    #[error("bandwidth threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error("active-photon inputs must be positive (n_total {n_total}, band {band_hz}, source {source_hz})")]
    NonPositivePhotonInput { n_total: f64, band_hz: f64, source_hz: f64 },
    #[error("reflective band {band_hz} Hz wider than the source linewidth {source_hz} Hz")]
    BandWiderThanSource { band_hz: f64, source_hz: f64 },
}

/// Mirror-atom properties. The linewidth is the conventional frequency-unit
/// figure (about 6 MHz for rubidium); detunings are supplied in the same
/// unit so only ratios enter the contrast formula.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpecies {
    /// Resonance wavelength [m].
    pub resonance_wavelength_m: f64,
    /// Natural linewidth [Hz].
    pub linewidth_hz: f64,
    /// Atomic mass [kg].
    pub mass_kg: f64,
    /// Number density N/V [m^-3].
    pub number_density_m3: f64,
}

impl AtomSpecies {
    /// Rubidium-87 with the paper-anchored defaults: 780 nm, 6 MHz,
    /// 1e14 cm^-3.
    pub fn rubidium_87() -> Self {
        AtomSpecies {
            resonance_wavelength_m: constants::RB87_WAVELENGTH_M,
            linewidth_hz: constants::RB87_LINEWIDTH_HZ,
            mass_kg: constants::RB87_MASS_KG,
            number_density_m3: constants::RB87_NUMBER_DENSITY_M3,
        }
    }

    pub fn validate(&self) -> Result<(), BraggError> {
        let fields = [
            ("resonance_wavelength_m", self.resonance_wavelength_m),
            ("linewidth_hz", self.linewidth_hz),
            ("mass_kg", self.mass_kg),
            ("number_density_m3", self.number_density_m3),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(BraggError::InvalidSpecies {
                    field: name,
                    message: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Reduced wavelength lambda / 2 pi [m].
    pub fn reduced_wavelength(&self) -> f64 {
        self.resonance_wavelength_m / (2.0 * PI)
    }

    /// Dimensionless rescaled density M = (lambda/2pi)^3 N/V.
    pub fn rescaled_density(&self) -> f64 {
        self.reduced_wavelength().powi(3) * self.number_density_m3
    }
}

/// Which reading of the printed contrast formula to evaluate. The formula as
/// written carries Gamma/Delta and diverges at resonance; the dispersive
/// reading swaps the ratio to Delta/Gamma, which stays finite and reproduces
/// the near-unity plateau. Every output record labels its variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonVariant {
    AsWritten,
    Dispersive,
}

impl EpsilonVariant {
    pub fn name(self) -> &'static str {
        match self {
            EpsilonVariant::AsWritten => "as_written",
            EpsilonVariant::Dispersive => "dispersive",
        }
    }
}

/// Quarter-wave Bragg stack built from a condensate: `layer_pairs` pairs of
/// lambda/4 slabs spaced lambda/2.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BraggStack {
    pub layer_pairs: usize,
    pub variant: EpsilonVariant,
    pub species: AtomSpecies,
}

impl BraggStack {
    pub fn validate(&self) -> Result<(), BraggError> {
        if self.layer_pairs < 1 {
            return Err(BraggError::NoLayers);
        }
        self.species.validate()
    }
}

/// Two-level-atom index contrast epsilon at a detuning from resonance.
/// The prefactor (3 pi / 2) M 4 is kept verbatim from the model.
pub fn epsilon_contrast(
    species: &AtomSpecies,
    detuning_hz: f64,
    variant: EpsilonVariant,
) -> Result<f64, BraggError> {
    species.validate()?;
    let gamma = species.linewidth_hz;
    let prefactor = (3.0 * PI / 2.0) * species.rescaled_density() * 4.0;
    let lorentz = 1.0 / (1.0 + (2.0 * detuning_hz / gamma).powi(2));
    match variant {
        EpsilonVariant::AsWritten => {
            if detuning_hz == 0.0 {
                return Err(BraggError::ZeroDetuningSingularity);
            }
            Ok(prefactor * (gamma / detuning_hz) * lorentz)
        }
        EpsilonVariant::Dispersive => Ok(prefactor * (detuning_hz / gamma) * lorentz),
    }
}

fn reflectivity_from_index(n_b: f64, layer_pairs: usize) -> f64 {
    // (n^2N - 1)^2 / (n^2N + 1)^2 = tanh^2(N ln n); tanh saturates instead of
    // overflowing, and the form is even in ln n.
    (layer_pairs as f64 * n_b.ln()).tanh().powi(2)
}

/// Exact reflectivity of a stack of `2 layer_pairs` alternating layers with
/// index contrast `n_b` against vacuum. Requires `n_b >= 1`.
pub fn stack_reflectivity(n_b: f64, layer_pairs: usize) -> Result<f64, BraggError> {
    if layer_pairs < 1 {
        return Err(BraggError::NoLayers);
    }
    if !n_b.is_finite() || n_b < 1.0 {
        return Err(BraggError::IndexBelowVacuum { n_b });
    }
    Ok(reflectivity_from_index(n_b, layer_pairs))
}

/// Reflectivity spectrum over a detuning grid, with the variant recorded.
#[derive(Debug, Clone, Serialize)]
pub struct ReflectivitySpectrum {
    pub detunings_hz: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub reflectivities: Vec<f64>,
    pub layer_pairs: usize,
    pub variant: EpsilonVariant,
    pub bandwidth_threshold: Option<f64>,
    pub bandwidth_hz: Option<f64>,
}

/// Compose epsilon -> n_B = 1 + epsilon -> R per grid point. Red-detuned
/// points with negative epsilon give a sub-vacuum index; the closed form is
/// even in ln(n_B) and is evaluated there directly (a slab below vacuum
/// index reflects like its reciprocal contrast). Indices n_B <= 0 are
/// reported as errors with the offending grid point.
pub fn reflectivity_spectrum(
    stack: &BraggStack,
    detunings_hz: &[f64],
) -> Result<ReflectivitySpectrum, BraggError> {
    stack.validate()?;
    if detunings_hz.is_empty() {
        return Err(BraggError::EmptyGrid);
    }
    let mut epsilons = Vec::with_capacity(detunings_hz.len());
    let mut reflectivities = Vec::with_capacity(detunings_hz.len());
    for (index, &d) in detunings_hz.iter().enumerate() {
        let eps = epsilon_contrast(&stack.species, d, stack.variant).map_err(|source| {
            BraggError::SpectrumPoint {
                index,
                detuning_hz: d,
                source: Box::new(source),
            }
        })?;
        let n_b = 1.0 + eps;
        if n_b <= 0.0 {
            return Err(BraggError::NonPositiveIndex { index, epsilon: eps, n_b });
        }
        epsilons.push(eps);
        reflectivities.push(reflectivity_from_index(n_b, stack.layer_pairs));
    }
    Ok(ReflectivitySpectrum {
        detunings_hz: detunings_hz.to_vec(),
        epsilons,
        reflectivities,
        layer_pairs: stack.layer_pairs,
        variant: stack.variant,
        bandwidth_threshold: None,
        bandwidth_hz: None,
    })
}

/// Width of the contiguous detuning interval around the reflectivity maximum
/// where R >= threshold, with linear interpolation at the two crossings.
pub fn reflective_bandwidth(
    spectrum: &ReflectivitySpectrum,
    threshold: f64,
) -> Result<f64, BraggError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(BraggError::InvalidThreshold(threshold));
    }
    let r = &spectrum.reflectivities;
    let d = &spectrum.detunings_hz;
    let (peak, max_r) = r
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
            if v > bv { (i, v) } else { (bi, bv) }
        });
    if max_r < threshold {
        return Err(BraggError::EmptyBand { threshold, max_r });
    }

    let mut lo = peak;
    while lo > 0 && r[lo - 1] >= threshold {
        lo -= 1;
    }
    if lo == 0 {
        return Err(BraggError::PlateauNotBracketed { side: "low" });
    }
    let mut hi = peak;
    while hi + 1 < r.len() && r[hi + 1] >= threshold {
        hi += 1;
    }
    if hi + 1 == r.len() {
        return Err(BraggError::PlateauNotBracketed { side: "high" });
    }

    let cross = |inside: usize, outside: usize| -> f64 {
        let (r0, r1) = (r[inside], r[outside]);
        let (d0, d1) = (d[inside], d[outside]);
        d0 + (threshold - r0) * (d1 - d0) / (r1 - r0)
    };
    let left = cross(lo, lo - 1);
    let right = cross(hi, hi + 1);
    Ok(right - left)
}

/// Photons of a broadband state that fall inside the mirror's reflective
/// band: N' = (band / source width) * N.
pub fn active_photon_count(
    n_total: f64,
    band_hz: f64,
    source_width_hz: f64,
) -> Result<f64, BraggError> {
    if !(n_total > 0.0 && band_hz > 0.0 && source_width_hz > 0.0)
        || !n_total.is_finite()
        || !band_hz.is_finite()
        || !source_width_hz.is_finite()
    {
        return Err(BraggError::NonPositivePhotonInput {
            n_total,
            band_hz,
            source_hz: source_width_hz,
        });
    }
    if band_hz > source_width_hz {
        return Err(BraggError::BandWiderThanSource {
            band_hz,
            source_hz: source_width_hz,
        });
    }
    Ok(band_hz / source_width_hz * n_total)
}

/// Fixed absorption-to-reflection linewidth ratio quoted for the process
/// (about one absorbed photon per pulse); applied to the active photon
/// count as a flat estimate.
pub const ABSORPTION_RATIO: f64 = 1e-3;

/// Estimated photons absorbed per pulse out of `n_active` reflected ones.
pub fn absorbed_photon_estimate(n_active: f64) -> f64 {
    ABSORPTION_RATIO * n_active
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn rescaled_density_rubidium() {
        let m = AtomSpecies::rubidium_87().rescaled_density();
        assert!(close(m, 0.19131287710429605, 1e-12), "{m}");
    }

    #[test]
    fn epsilon_vanishes_far_from_resonance() {
        let sp = AtomSpecies::rubidium_87();
        for variant in [EpsilonVariant::AsWritten, EpsilonVariant::Dispersive] {
            let e = epsilon_contrast(&sp, 1e17, variant).unwrap();
            assert!(e.abs() < 1e-10, "{variant:?}: {e}");
            // monotone 1/Delta falloff across decades
            let mut prev = f64::INFINITY;
            for exp in 10..17 {
                let e = epsilon_contrast(&sp, 10f64.powi(exp), variant).unwrap().abs();
                assert!(e < prev, "{variant:?} at 1e{exp}: {e} !< {prev}");
                prev = e;
            }
        }
    }

    #[test]
    fn epsilon_as_written_singular_at_resonance() {
        let sp = AtomSpecies::rubidium_87();
        assert!(matches!(
            epsilon_contrast(&sp, 0.0, EpsilonVariant::AsWritten),
            Err(BraggError::ZeroDetuningSingularity)
        ));
        assert_eq!(epsilon_contrast(&sp, 0.0, EpsilonVariant::Dispersive).unwrap(), 0.0);
    }

    #[test]
    fn epsilon_dispersive_peaks_at_half_linewidth() {
        let sp = AtomSpecies::rubidium_87();
        let at_peak = epsilon_contrast(&sp, sp.linewidth_hz / 2.0, EpsilonVariant::Dispersive).unwrap();
        assert!(close(at_peak, 0.90154069387197514, 1e-12), "{at_peak}");
        // calculus: the maximum over positive detuning sits at Gamma/2
        for frac in [0.2, 0.4, 0.8, 1.5, 3.0] {
            let e = epsilon_contrast(&sp, frac * sp.linewidth_hz / 2.0, EpsilonVariant::Dispersive)
                .unwrap();
            if frac != 1.0 {
                assert!(e < at_peak, "frac {frac}: {e} vs {at_peak}");
            }
        }
    }

    #[test]
    fn epsilon_magnitude_even_in_detuning() {
        let sp = AtomSpecies::rubidium_87();
        for variant in [EpsilonVariant::AsWritten, EpsilonVariant::Dispersive] {
            for d in [1e3, 1e6, 3e6, 1e9] {
                let plus = epsilon_contrast(&sp, d, variant).unwrap();
                let minus = epsilon_contrast(&sp, -d, variant).unwrap();
                assert!((plus.abs() - minus.abs()).abs() <= 1e-15 * plus.abs());
                assert!((plus + minus).abs() <= 1e-15 * plus.abs()); // odd in detuning
            }
        }
    }

    #[test]
    fn reflectivity_no_contrast_no_reflection() {
        for nd in [1, 10, 200, 4000] {
            assert_eq!(stack_reflectivity(1.0, nd).unwrap(), 0.0);
        }
    }

    #[test]
    fn reflectivity_frozen_value() {
        let r = stack_reflectivity(1.001, 200).unwrap();
        assert!(close(r, 0.038919113549536229, 1e-12), "{r}");
    }

    #[test]
    fn reflectivity_small_contrast_limit() {
        let r = stack_reflectivity(1.0 + 1e-5, 200).unwrap();
        let approx = (200.0f64 * 1e-5).powi(2);
        assert!((r - approx).abs() / r < 0.01, "{r} vs {approx}");
    }

    #[test]
    fn reflectivity_monotone_in_both_arguments() {
        let mut prev = 0.0;
        for nb in [1.0, 1.0001, 1.001, 1.01, 1.1, 1.5, 3.0] {
            let r = stack_reflectivity(nb, 50).unwrap();
            assert!(r >= prev);
            prev = r;
        }
        let mut prev = 0.0;
        for nd in [1, 2, 5, 20, 100, 400] {
            let r = stack_reflectivity(1.002, nd).unwrap();
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn reflectivity_rejects_below_vacuum() {
        assert!(matches!(
            stack_reflectivity(0.99, 10),
            Err(BraggError::IndexBelowVacuum { .. })
        ));
        assert!(matches!(stack_reflectivity(1.1, 0), Err(BraggError::NoLayers)));
    }

    #[test]
    fn reflectivity_saturates_without_overflow() {
        let r = stack_reflectivity(1.9, 4096).unwrap();
        assert!(r <= 1.0 && r > 1.0 - 1e-12);
    }

    fn default_stack() -> BraggStack {
        BraggStack {
            layer_pairs: 200,
            variant: EpsilonVariant::Dispersive,
            species: AtomSpecies::rubidium_87(),
        }
    }

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn spectrum_plateau_and_far_tail() {
        let stack = default_stack();
        let grid = linspace(-3e10, 3e10, 4001);
        let spec = reflectivity_spectrum(&stack, &grid).unwrap();
        let max_r = spec.reflectivities.iter().cloned().fold(0.0, f64::max);
        assert!(max_r > 0.9, "plateau {max_r}");
        for r in &spec.reflectivities {
            assert!(*r >= 0.0 && *r <= 1.0);
        }
        // far detuning: a million linewidths out
        let far = reflectivity_spectrum(&stack, &[1e6 * 6e6]).unwrap();
        assert!(far.reflectivities[0] < 1e-6);
    }

    #[test]
    fn spectrum_magnitude_symmetric() {
        let stack = default_stack();
        let grid = [-2e9, -1e9, -2e8, 2e8, 1e9, 2e9];
        let spec = reflectivity_spectrum(&stack, &grid).unwrap();
        for k in 0..3 {
            let a = spec.epsilons[k].abs();
            let b = spec.epsilons[5 - k].abs();
            assert!((a - b).abs() <= 1e-14 * a.max(b));
        }
    }

    #[test]
    fn spectrum_propagates_singularity_with_index() {
        let mut stack = default_stack();
        stack.variant = EpsilonVariant::AsWritten;
        match reflectivity_spectrum(&stack, &[1e9, 0.0, -1e9]) {
            Err(BraggError::SpectrumPoint { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected spectrum point error, got {other:?}"),
        }
    }

    #[test]
    fn bandwidth_matches_frozen_value() {
        // Even sample count: no grid point lands on the sub-kilohertz
        // dispersive zero at exact resonance, so the band spans both lobes
        // the way a finite-linewidth probe sees it.
        let stack = default_stack();
        let grid = linspace(-3e10, 3e10, 20000);
        let spec = reflectivity_spectrum(&stack, &grid).unwrap();
        let bw = reflective_bandwidth(&spec, 0.5).unwrap();
        // root-solved edge of the closed form: 2 * 1.2247e9 Hz
        assert!(close(bw, 2.449495515e9, 1e-3), "{bw}");
    }

    #[test]
    fn bandwidth_grows_with_layer_count() {
        let grid = linspace(-3e10, 3e10, 8001);
        let mut prev = 0.0;
        for nd in [50, 100, 200, 400] {
            let mut stack = default_stack();
            stack.layer_pairs = nd;
            let spec = reflectivity_spectrum(&stack, &grid).unwrap();
            let bw = reflective_bandwidth(&spec, 0.5).unwrap();
            assert!(bw >= prev, "N_D={nd}: {bw} < {prev}");
            prev = bw;
        }
    }

    #[test]
    fn bandwidth_empty_band_error() {
        let stack = default_stack();
        let grid = linspace(-3e10, 3e10, 101);
        let spec = reflectivity_spectrum(&stack, &grid).unwrap();
        assert!(matches!(
            reflective_bandwidth(&spec, 0.999999999),
            Err(BraggError::EmptyBand { .. })
        ));
        assert!(matches!(
            reflective_bandwidth(&spec, 1.5),
            Err(BraggError::InvalidThreshold(_))
        ));
    }

    #[test]
    fn bandwidth_requires_bracketing() {
        let stack = default_stack();
        // grid entirely inside the plateau
        let grid = linspace(-1e8, 1e8, 101);
        let spec = reflectivity_spectrum(&stack, &grid).unwrap();
        assert!(matches!(
            reflective_bandwidth(&spec, 0.5),
            Err(BraggError::PlateauNotBracketed { .. })
        ));
    }

    #[test]
    fn active_photons_paper_anchored() {
        let n = active_photon_count(1.2e5, 8e9, 3.5e11).unwrap();
        assert!(close(n, 2742.8571428571429, 1e-12), "{n}");
        assert!(n > 1e3 && n < 1e4);
        // full band passes everything through
        assert_eq!(active_photon_count(42.0, 5e9, 5e9).unwrap(), 42.0);
        // band fraction ~ 3% of the incoming beam
        let frac: f64 = 8e9 / 3.5e11;
        assert!((frac - 0.03).abs() < 0.01);
    }

    #[test]
    fn active_photons_linear_in_each_argument() {
        let base = active_photon_count(1000.0, 4e9, 4e11).unwrap();
        assert!(close(active_photon_count(2000.0, 4e9, 4e11).unwrap(), 2.0 * base, 1e-14));
        assert!(close(active_photon_count(1000.0, 8e9, 4e11).unwrap(), 2.0 * base, 1e-14));
        assert!(close(active_photon_count(1000.0, 4e9, 2e11).unwrap(), 2.0 * base, 1e-14));
    }

    #[test]
    fn active_photons_rejects_band_wider_than_source() {
        assert!(matches!(
            active_photon_count(10.0, 2e11, 1e11),
            Err(BraggError::BandWiderThanSource { .. })
        ));
        assert!(active_photon_count(-1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn absorption_estimate_ratio() {
        assert!(close(absorbed_photon_estimate(2742.857), 2.742857, 1e-12));
    }
}
