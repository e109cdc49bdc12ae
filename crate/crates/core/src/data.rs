//! Deterministic field constructors used by experiments and tests.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::RealField;
use crate::grid::Grid;

/// Centered Gaussian e^{-|x|^2 / (2 sigma^2)}.
pub fn gaussian(grid: Grid, sigma: f64) -> Result<RealField> {
    let s2 = 2.0 * sigma * sigma;
    RealField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (-r2 / s2).exp()
    })
}

/// Random band-limited trigonometric polynomial: a sum of `modes` waves with
/// frequencies on the lattice of `base_step` restricted to the band
/// [band.0, band.1]. Two grids whose frequency lattices both contain that
/// base lattice sample the identical continuum function, which makes
/// norm-equivalence constants comparable across resolutions.
pub fn random_trig_field(
    grid: Grid,
    base_step: f64,
    band: (f64, f64),
    modes: usize,
    seed: u64,
) -> Result<RealField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_lo = (band.0 / base_step).ceil().max(1.0) as i64;
    let k_hi = (band.1 / base_step).floor() as i64;
    assert!(k_hi >= k_lo, "empty frequency band");
    let mut waves = Vec::with_capacity(modes);
    for _ in 0..modes {
        let amp: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        let phase: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        match grid.dims {
            1 => {
                let k = rng.gen_range(k_lo..=k_hi);
                waves.push((amp, k as f64 * base_step, 0.0, phase));
            }
            _ => {
                // random direction on the base lattice inside the band
                let (kx, ky) = loop {
                    let kx = rng.gen_range(-k_hi..=k_hi);
                    let ky = rng.gen_range(-k_hi..=k_hi);
                    let r = ((kx * kx + ky * ky) as f64).sqrt();
                    if r >= k_lo as f64 && r <= k_hi as f64 {
                        break (kx, ky);
                    }
                };
                waves.push((amp, kx as f64 * base_step, ky as f64 * base_step, phase));
            }
        }
    }
    RealField::from_fn(grid, |x| {
        let y = if x.len() > 1 { x[1] } else { 0.0 };
        waves
            .iter()
            .map(|&(a, wx, wy, ph)| a * (wx * x[0] + wy * y + ph).cos())
            .sum()
    })
}

/// Seeded rough random field (independent uniform samples), for transform
/// and quadrature smoke tests.
pub fn random_rough_field(grid: Grid, seed: u64) -> Result<RealField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..grid.total_points()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    RealField::new(grid, samples)
}
