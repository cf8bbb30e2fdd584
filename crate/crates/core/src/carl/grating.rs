//! Grating construction, bunching factor, and momentum-space observables.

use super::{CarlError, CondensateField, GridSpec};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Build the released-condensate grating: density uniform over lambda/4 per
/// lambda/2 period (duty cycle 1/2), edges smoothed over `smoothing_width`
/// (a fraction of lambda, at most 1/8) with a raised-cosine ramp, then
/// renormalized. The phase starts uniform.
pub fn init_grating(
    grid: &GridSpec,
    wavelength: f64,
    smoothing_width: f64,
) -> Result<CondensateField, CarlError> {
    grid.validate()?;
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(CarlError::InvalidParams {
            field: "wavelength",
            message: format!("must be finite and > 0, got {wavelength}"),
        });
    }
    if !(0.0..=0.125).contains(&smoothing_width) {
        return Err(CarlError::InvalidParams {
            field: "smoothing_width",
            message: format!("must lie in [0, 1/8], got {smoothing_width}"),
        });
    }
    let ppp = grid.points_per_period;
    // the ramp must be resolved by at least 4 grid points
    if smoothing_width > 0.0 && 2.0 * smoothing_width * (ppp as f64) < 4.0 {
        return Err(CarlError::GridTooCoarse(format!(
            "smoothing width {smoothing_width} spans fewer than 4 of {ppp} points per period"
        )));
    }

    let dx = wavelength / 2.0 / ppp as f64;
    let dtheta = 2.0 * PI / ppp as f64;
    // ramp width in theta units: a fraction `smoothing_width` of lambda is
    // 4 pi * smoothing_width of the 2 pi period.
    let w = 4.0 * PI * smoothing_width;
    let density = |theta: f64| -> f64 {
        if w == 0.0 {
            return if theta < PI { 1.0 } else { 0.0 };
        }
        let half = w / 2.0;
        if theta < half {
            // second half of the rising ramp through theta = 0
            let u = (theta + half) / w;
            0.5 * (1.0 - (PI * u).cos())
        } else if theta <= PI - half {
            1.0
        } else if theta < PI + half {
            let u = (theta - (PI - half)) / w;
            0.5 * (1.0 + (PI * u).cos())
        } else if theta <= 2.0 * PI - half {
            0.0
        } else {
            let u = (theta - (2.0 * PI - half)) / w;
            0.5 * (1.0 - (PI * u).cos())
        }
    };

    let psi: Vec<Complex64> = (0..grid.total_points())
        .map(|m| {
            let theta = dtheta * (m % ppp) as f64;
            Complex64::new(density(theta).sqrt(), 0.0)
        })
        .collect();
    CondensateField::new(psi, dx, ppp)
}

/// Discrete quadrature of the density-grating Fourier integral
/// B = integral dx |Psi|^2 exp(i (2 k x - delta t)) on the periodic grid.
pub fn bunching_factor(field: &CondensateField, k: f64, t: f64, delta: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, c) in field.psi.iter().enumerate() {
        let phase = 2.0 * k * (m as f64 * field.dx);
        sum += c.norm_sqr() * Complex64::from_polar(1.0, phase);
    }
    sum * field.dx * Complex64::from_polar(1.0, -delta * t)
}

/// Populations of the momentum orders n (units of 2 hbar k), aggregated over
/// the grid's natural binning, plus the mass left outside the requested
/// orders.
#[derive(Debug, Clone)]
pub struct MomentumSpectrum {
    /// Orders -n_max..=n_max.
    pub orders: Vec<i32>,
    pub populations: Vec<f64>,
    pub unbinned: f64,
}

impl MomentumSpectrum {
    pub fn population(&self, order: i32) -> f64 {
        let n_max = (self.orders.len() as i32 - 1) / 2;
        self.populations[(order + n_max) as usize]
    }

    pub fn total(&self) -> f64 {
        self.populations.iter().sum::<f64>() + self.unbinned
    }
}

/// Squared-magnitude Fourier weight of the field at wavenumber 2 k n,
/// aggregated over the sub-harmonic bin nearest each order. Errors when the
/// requested orders reach past the grid's Nyquist limit.
pub fn momentum_spectrum(
    field: &CondensateField,
    n_max: usize,
) -> Result<MomentumSpectrum, CarlError> {
    let ppp = field.points_per_period;
    if 2 * n_max + 1 > ppp {
        return Err(CarlError::Aliasing {
            n_max,
            points_per_period: ppp,
        });
    }
    let n = field.len();
    let periods = field.periods() as isize;

    let mut buf = field.psi.clone();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(&mut buf, &mut scratch);

    // fraction carried by DFT bin q: |psi_hat_q|^2 dx / N (Parseval against
    // the unit spatial norm)
    let weight = field.dx / n as f64;
    let mut populations = vec![0.0; 2 * n_max + 1];
    let mut unbinned = 0.0;
    let half = n as isize / 2;
    for (q, c) in buf.iter().enumerate() {
        let mut f = q as isize;
        if f >= half {
            f -= n as isize;
        }
        // order bin: [n*periods - periods/2, n*periods + periods/2)
        let order = (f + periods / 2).div_euclid(periods);
        let p = c.norm_sqr() * weight;
        if order.unsigned_abs() <= n_max {
            populations[(order + n_max as isize) as usize] += p;
        } else {
            unbinned += p;
        }
    }
    Ok(MomentumSpectrum {
        orders: (-(n_max as i32)..=n_max as i32).collect(),
        populations,
        unbinned,
    })
}
