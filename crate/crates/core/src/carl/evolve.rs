//! Split-step spectral integrator for the coupled wavefunction-field system.
//!
//! Per step (Strang ordering): a kinetic half-step in Fourier space, the
//! field advanced over the full step against the midpoint density (explicit
//! 4th-order stages), a full potential step using the midpoint field, and a
//! closing kinetic half-step. The potential is real, so the map preserves
//! the wavefunction norm up to FFT roundoff.

use super::{
    momentum_spectrum, CarlError, CarlParams, CondensateField, EvolutionMode, EvolutionTrace,
};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

struct SplitStep {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    kinetic_half: Vec<Complex64>,
    eitheta: Vec<Complex64>,
    inv_n: f64,
}

impl SplitStep {
    fn new(n: usize, points_per_period: usize, periods: usize, dtau: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        let half = n as isize / 2;
        let kinetic_half = (0..n)
            .map(|q| {
                let mut f = q as isize;
                if f >= half {
                    f -= n as isize;
                }
                let nu = f as f64 / periods as f64;
                Complex64::from_polar(1.0, -nu * nu * dtau / 2.0)
            })
            .collect();
        let eitheta = (0..n)
            .map(|m| {
                Complex64::from_polar(1.0, 2.0 * PI * (m % points_per_period) as f64
                    / points_per_period as f64)
            })
            .collect();
        SplitStep {
            fft,
            ifft,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            kinetic_half,
            eitheta,
            inv_n: 1.0 / n as f64,
        }
    }

    fn kinetic_half_step(&mut self, psi: &mut [Complex64]) {
        self.fft.process_with_scratch(psi, &mut self.scratch);
        for (c, k) in psi.iter_mut().zip(&self.kinetic_half) {
            *c *= k;
        }
        self.ifft.process_with_scratch(psi, &mut self.scratch);
        for c in psi.iter_mut() {
            *c *= self.inv_n;
        }
    }

    /// Spatial bunching sum, sum |psi|^2 e^{i theta} dx (no drive phase).
    fn spatial_bunching(&self, psi: &[Complex64], dx: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (c, e) in psi.iter().zip(&self.eitheta) {
            sum += c.norm_sqr() * e;
        }
        sum * dx
    }

    fn potential_full_step(&self, psi: &mut [Complex64], w: Complex64, two_gt_dtau: f64) {
        for (c, e) in psi.iter_mut().zip(&self.eitheta) {
            let v = -(w * e).im; // times 2 g_t folded into two_gt_dtau
            *c *= Complex64::from_polar(1.0, v * two_gt_dtau);
        }
    }
}

/// One explicit 4th-order step of da/dtau = src e^{-i dl s} - kt a over
/// [tau, tau + h], with the spatial source frozen.
fn field_step_rk4(a: Complex64, src: Complex64, dl: f64, kt: f64, tau: f64, h: f64) -> Complex64 {
    let f = |s: f64, av: Complex64| src * Complex64::from_polar(1.0, -dl * s) - kt * av;
    let k1 = f(tau, a);
    let k2 = f(tau + h / 2.0, a + k1 * (h / 2.0));
    let k3 = f(tau + h / 2.0, a + k2 * (h / 2.0));
    let k4 = f(tau + h, a + k3 * h);
    a + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
}

/// Advance the coupled (or adiabatically eliminated) system from `psi0` and
/// seed field `a0`, sampling the trace every `sample_stride` steps and at
/// the final step. Aborts with diagnostics on norm drift beyond 1e-6 per
/// 1e4 steps, non-finite values, or momentum-population leakage.
pub fn evolve(
    params: &CarlParams,
    psi0: &CondensateField,
    a0: Complex64,
) -> Result<EvolutionTrace, CarlError> {
    params.validate()?;
    let n = params.grid.total_points();
    if psi0.len() != n || psi0.points_per_period != params.grid.points_per_period {
        return Err(CarlError::FieldMismatch(format!(
            "field has {} points ({} per period), parameters expect {} ({} per period)",
            psi0.len(),
            psi0.points_per_period,
            n,
            params.grid.points_per_period
        )));
    }
    let expected_dx = params.wavelength() / 2.0 / params.grid.points_per_period as f64;
    if (psi0.dx - expected_dx).abs() > 1e-9 * expected_dx {
        return Err(CarlError::FieldMismatch(format!(
            "field dx = {} does not match lambda/2/points_per_period = {}",
            psi0.dx, expected_dx
        )));
    }
    if (psi0.norm() - 1.0).abs() > 1e-8 {
        return Err(CarlError::InvalidField(format!(
            "initial norm {} deviates from 1 by more than 1e-8",
            psi0.norm()
        )));
    }
    if !(a0.re.is_finite() && a0.im.is_finite()) {
        return Err(CarlError::InvalidField("seed field amplitude is not finite".into()));
    }

    let wr = params.recoil_frequency();
    let dtau = params.dt * wr;
    let gt = params.coupling_rate / wr;
    let kt = params.field_damping / wr;
    let dl = params.detuning / wr;
    let gtn = gt * params.atom_count;
    let dx = psi0.dx;

    let mut stepper = SplitStep::new(
        n,
        params.grid.points_per_period,
        params.grid.periods,
        dtau,
    );
    let mut psi = psi0.psi.clone();
    let mut a = a0;
    let nsteps = params.steps();

    let mut times = Vec::new();
    let mut intensity = Vec::new();
    let mut bunching_abs = Vec::new();
    let mut momentum_populations = Vec::new();
    let mut unbinned = Vec::new();

    let mut step = 0usize;
    loop {
        if step % params.sample_stride == 0 || step == nsteps {
            let tau = step as f64 * dtau;
            let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
            if !norm.is_finite() || !a.re.is_finite() || !a.im.is_finite() {
                return Err(CarlError::NonFinite { step });
            }
            let allowed = 1e-6 * step as f64 / 1e4 + 1e-12;
            let drift = (norm - 1.0).abs();
            if drift > allowed {
                return Err(CarlError::NormDrift { step, drift, allowed });
            }
            let b = stepper.spatial_bunching(&psi, dx) * Complex64::from_polar(1.0, -dl * tau);
            let a_sample = match params.mode {
                EvolutionMode::Coupled => a,
                EvolutionMode::Adiabatic => b * (gtn / kt),
            };
            let snapshot = CondensateField {
                psi: psi.clone(),
                dx,
                points_per_period: params.grid.points_per_period,
            };
            let spec = momentum_spectrum(&snapshot, 2)?;
            let total = spec.total();
            if (total - 1.0).abs() > 1e-6 {
                return Err(CarlError::MomentumLeak { step, total });
            }
            let mut pops = [0.0; 5];
            pops.copy_from_slice(&spec.populations);

            times.push(step as f64 * params.dt);
            intensity.push(a_sample.norm_sqr());
            bunching_abs.push(b.norm());
            momentum_populations.push(pops);
            unbinned.push(spec.unbinned);
        }
        if step == nsteps {
            break;
        }

        let tau = step as f64 * dtau;
        let tau_mid = tau + dtau / 2.0;
        stepper.kinetic_half_step(&mut psi);
        let s_mid = stepper.spatial_bunching(&psi, dx);
        let (a_new, a_mid) = match params.mode {
            EvolutionMode::Coupled => {
                let next = field_step_rk4(a, s_mid * gtn, dl, kt, tau, dtau);
                (next, (a + next) * 0.5)
            }
            EvolutionMode::Adiabatic => {
                let locked = s_mid * Complex64::from_polar(1.0, -dl * tau_mid) * (gtn / kt);
                (locked, locked)
            }
        };
        let w = a_mid.conj() * Complex64::from_polar(1.0, -dl * tau_mid);
        // potential V = -2 g_t Im(w e^{i theta}); the phase advance is
        // exp(-i V dtau) = exp(+i 2 g_t dtau Im(w e^{i theta}))
        stepper.potential_full_step(&mut psi, w, 2.0 * gt * dtau);
        stepper.kinetic_half_step(&mut psi);
        a = a_new;
        step += 1;
    }

    let reference_intensity = match params.mode {
        EvolutionMode::Adiabatic => intensity[0],
        EvolutionMode::Coupled => {
            // first local maximum; for a monotone rise, the last sample
            let mut reference = *intensity.last().unwrap();
            for k in 0..intensity.len() {
                if k + 1 == intensity.len() || intensity[k + 1] <= intensity[k] {
                    reference = intensity[k];
                    break;
                }
            }
            reference
        }
    };
    let normalized_intensity = intensity
        .iter()
        .map(|&i| if reference_intensity > 0.0 { i / reference_intensity } else { 0.0 })
        .collect();

    Ok(EvolutionTrace {
        times,
        intensity,
        normalized_intensity,
        bunching_abs,
        momentum_populations,
        unbinned,
        reference_intensity,
        final_field: CondensateField {
            psi,
            dx,
            points_per_period: params.grid.points_per_period,
        },
        final_a: a,
    })
}
