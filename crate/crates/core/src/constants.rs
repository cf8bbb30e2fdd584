//! Physical constants (SI units) and rubidium-87 reference values.

/// Planck constant [J s] (exact, 2019 SI).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant [J s].
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

/// Speed of light in vacuum [m/s] (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Atomic mass unit [kg] (CODATA 2018).
pub const ATOMIC_MASS_KG: f64 = 1.660_539_066_60e-27;

/// Rubidium-87 atomic mass [kg].
pub const RB87_MASS_KG: f64 = 86.909_180_527 * ATOMIC_MASS_KG;

/// Rubidium D2 resonance wavelength [m].
pub const RB87_WAVELENGTH_M: f64 = 780e-9;

/// Rubidium natural linewidth [Hz], as conventionally quoted (~6 MHz).
pub const RB87_LINEWIDTH_HZ: f64 = 6e6;

/// Typical condensate number density [m^-3] (1e14 cm^-3).
pub const RB87_NUMBER_DENSITY_M3: f64 = 1e20;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rb87_mass_matches_reference() {
        // 86.909 u in kg, independent arithmetic
        let expected = 86.909_180_527 * 1.660_539_066_60e-27;
        assert!((RB87_MASS_KG - expected).abs() < 1e-40);
        assert!((RB87_MASS_KG - 1.443_160_9e-25).abs() / RB87_MASS_KG < 1e-6);
    }
}
