//! Forward/inverse discrete Fourier transforms between sampled fields and
//! frequency-lattice coefficients.
//!
//! Normalization: a constant field c maps to the single coefficient c at
//! xi = 0, and coefficients are taken with respect to the physical waves
//! e^{i xi . x} on the box (the -L grid offset is folded into the phase).
//! Every call allocates its own scratch, so concurrent transforms on shared
//! inputs are safe.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField};
use crate::grid::Grid;

type PlanMap = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

static PLAN_CACHE: OnceLock<Mutex<PlanMap>> = OnceLock::new();

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let cache = PLAN_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let dir = if forward { FftDirection::Forward } else { FftDirection::Inverse };
            planner.plan_fft(n, dir)
        })
        .clone()
}

/// Run an FFT along both axes of a row-major square buffer.
fn fft_nd(grid: &Grid, data: &mut [Complex64], forward: bool) {
    let n = grid.points_per_dim;
    let fft = plan(n, forward);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    match grid.dims {
        1 => fft.process_with_scratch(data, &mut scratch),
        _ => {
            // rows (axis 1 contiguous)
            for row in data.chunks_exact_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            // columns via transpose
            let mut t = vec![Complex64::default(); data.len()];
            for i in 0..n {
                for j in 0..n {
                    t[j * n + i] = data[i * n + j];
                }
            }
            for row in t.chunks_exact_mut(n) {
                fft.process_with_scratch(row, &mut scratch);
            }
            for i in 0..n {
                for j in 0..n {
                    data[i * n + j] = t[j * n + i];
                }
            }
        }
    }
}

/// Parity sign (-1)^(k0+k1) translating between the FFT origin at index 0
/// and the physical origin at x = -L. N is even, so k and its index agree
/// modulo 2.
fn phase_sign(grid: &Grid, flat: usize) -> f64 {
    let [i0, i1] = grid.axis_indices(flat);
    if (i0 + i1) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform of a sampled field to lattice coefficients.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let grid = f.grid;
    let mut data: Vec<Complex64> =
        f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&grid, &mut data, true);
    let scale = 1.0 / grid.total_points() as f64;
    for (i, c) in data.iter_mut().enumerate() {
        *c *= scale * phase_sign(&grid, i);
    }
    SpectralField { grid, coeffs: data }
}

/// Inverse transform back to samples, requiring a conjugate-symmetric
/// spectrum. A spectrum whose inverse has an imaginary residue above
/// 1e-10 (relative) is rejected instead of silently truncated.
pub fn inverse_transform(field: &SpectralField) -> Result<RealField> {
    let data = inverse_transform_complex(field);
    let mut max_im = 0.0f64;
    let mut max_re = 0.0f64;
    for c in &data {
        max_im = max_im.max(c.im.abs());
        max_re = max_re.max(c.re.abs());
    }
    let residue = max_im / max_re.max(1.0);
    if residue > 1e-10 {
        return Err(Error::SpectrumNotReal { residue });
    }
    let samples: Vec<f64> = data.iter().map(|c| c.re).collect();
    RealField::new(field.grid, samples)
}

/// Inverse transform keeping the complex samples.
pub fn inverse_transform_complex(field: &SpectralField) -> Vec<Complex64> {
    let grid = field.grid;
    let mut data: Vec<Complex64> = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * phase_sign(&grid, i))
        .collect();
    fft_nd(&grid, &mut data, false);
    data
}

/// Zero every mode with an axis wavenumber above 2/3 of Nyquist. Pointwise
/// products are evaluated in real space and filtered here before re-entering
/// spectral operations.
pub fn dealias(field: &mut SpectralField) {
    let n = field.grid.points_per_dim;
    let cut = (n / 3) as i64;
    let grid = field.grid;
    for (i, c) in field.coeffs.iter_mut().enumerate() {
        let [i0, i1] = grid.axis_indices(i);
        let k0 = grid.wavenumber(i0).abs();
        let k1 = if grid.dims == 2 { grid.wavenumber(i1).abs() } else { 0 };
        if k0 > cut || k1 > cut {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_maps_to_zero_mode() {
        let g = make_grid(1, 64, 8.0).unwrap();
        let f = RealField::from_fn(g, |_| 1.0).unwrap();
        let spec = forward_transform(&f);
        for (i, c) in spec.coeffs.iter().enumerate() {
            if i == 0 {
                assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            } else {
                assert!(c.norm() < 1e-14, "leak at {i}: {c}");
            }
        }
    }

    #[test]
    fn single_sine_has_two_coefficients() {
        let g = make_grid(1, 128, 64.0).unwrap();
        let f =
            RealField::from_fn(g, |x| (std::f64::consts::PI * x[0] / 64.0).sin()).unwrap();
        let spec = forward_transform(&f);
        // sin(xi_1 x) = (e^{i xi_1 x} - e^{-i xi_1 x}) / (2i): c_{+1} = -i/2
        let c_plus = spec.coeffs[1];
        let c_minus = spec.coeffs[127];
        assert!((c_plus - Complex64::new(0.0, -0.5)).norm() < 1e-13);
        assert!((c_minus - Complex64::new(0.0, 0.5)).norm() < 1e-13);
        for (i, c) in spec.coeffs.iter().enumerate() {
            if i != 1 && i != 127 {
                assert!(c.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_mode_coeff_gives_constant_field() {
        let g = make_grid(2, 16, 2.0).unwrap();
        let mut spec = SpectralField::zeros(g);
        spec.coeffs[0] = Complex64::new(1.0, 0.0);
        let f = inverse_transform(&spec).unwrap();
        for v in &f.samples {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn round_trip_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(dims, n) in &[(1usize, 8usize), (1, 64), (1, 512), (2, 8), (2, 32)] {
            let g = make_grid(dims, n, 5.0).unwrap();
            let samples: Vec<f64> =
                (0..g.total_points()).map(|_| rng.gen::<f64>() - 0.5).collect();
            let f = RealField::new(g, samples).unwrap();
            let back = inverse_transform(&forward_transform(&f)).unwrap();
            let scale = f.max_abs();
            let err = f
                .samples
                .iter()
                .zip(&back.samples)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(err / scale < 1e-12, "round trip error {} on {dims}d n={n}", err / scale);
        }
    }

    #[test]
    fn parseval_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let dims = if trial % 3 == 0 { 2 } else { 1 };
            let n = *[8usize, 16, 64].choose(&mut rng).unwrap();
            let g = make_grid(dims, n, 3.0).unwrap();
            let samples: Vec<f64> =
                (0..g.total_points()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let f = RealField::new(g, samples).unwrap();
            let spec = forward_transform(&f);
            let direct = f.lp_norm(2.0).unwrap();
            let plancherel = spec.l2_norm();
            assert!(
                (direct - plancherel).abs() / direct < 1e-10,
                "parseval violated: {direct} vs {plancherel}"
            );
        }
    }

    #[test]
    fn non_symmetric_spectrum_is_rejected() {
        let g = make_grid(1, 16, 1.0).unwrap();
        let mut spec = SpectralField::zeros(g);
        spec.coeffs[3] = Complex64::new(1.0, 0.5);
        // conjugate partner left empty: inverse is genuinely complex
        assert!(matches!(
            inverse_transform(&spec),
            Err(Error::SpectrumNotReal { .. })
        ));
    }

    #[test]
    fn conjugate_symmetric_spectrum_inverts_to_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = make_grid(1, 32, 4.0).unwrap();
        let mut spec = SpectralField::zeros(g);
        for i in 1..16 {
            let c = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            spec.coeffs[i] = c;
            spec.coeffs[32 - i] = c.conj();
        }
        spec.coeffs[0] = Complex64::new(rng.gen::<f64>(), 0.0);
        assert!(spec.conjugate_symmetry_residue() < 1e-15);
        let f = inverse_transform(&spec).unwrap();
        assert!(f.is_finite());
    }

    #[test]
    fn dealias_zeroes_top_third() {
        let g = make_grid(1, 32, 1.0).unwrap();
        let mut spec = SpectralField::zeros(g);
        for c in spec.coeffs.iter_mut() {
            *c = Complex64::new(1.0, 0.0);
        }
        dealias(&mut spec);
        // |k| <= 10 kept on n=32
        for i in 0..32 {
            let k = g.wavenumber(i).abs();
            if k > 10 {
                assert_eq!(spec.coeffs[i].norm(), 0.0);
            } else {
                assert_eq!(spec.coeffs[i].norm(), 1.0);
            }
        }
    }
}
