//! Periodic box discretization of R^n (n = 1 or 2).
//!
//! The domain is the box [-L, L) per axis sampled at N equispaced points,
//! with the frequency lattice {k*pi/L : k in [-N/2, N/2)} per axis.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Number of space dimensions, 1 or 2.
    pub dims: usize,
    /// Points per axis; a power of two, at least 8.
    pub points_per_dim: usize,
    /// Half box length L; the box is [-L, L) per axis.
    pub half_length: f64,
    /// Mesh spacing 2L/N.
    pub spacing: f64,
    /// Frequency lattice step pi/L.
    pub freq_step: f64,
}

/// Build a periodic grid, validating the discretization preconditions.
pub fn make_grid(dims: usize, points_per_dim: usize, half_length: f64) -> Result<Grid> {
    if dims != 1 && dims != 2 {
        return Err(Error::Grid(format!("dims must be 1 or 2, got {dims}")));
    }
    if points_per_dim < 8 || !points_per_dim.is_power_of_two() {
        return Err(Error::Grid(format!(
            "points_per_dim must be a power of two >= 8, got {points_per_dim}"
        )));
    }
    if !(half_length > 0.0) || !half_length.is_finite() {
        return Err(Error::Grid(format!(
            "half_length must be positive and finite, got {half_length}"
        )));
    }
    Ok(Grid {
        dims,
        points_per_dim,
        half_length,
        spacing: 2.0 * half_length / points_per_dim as f64,
        freq_step: std::f64::consts::PI / half_length,
    })
}

impl Grid {
    pub fn total_points(&self) -> usize {
        self.points_per_dim.pow(self.dims as u32)
    }

    /// Cell volume h^dims used by Riemann-sum quadrature.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dims as i32)
    }

    /// Box volume (2L)^dims.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dims as i32)
    }

    /// Signed integer wavenumber for an axis index, in [-N/2, N/2).
    pub fn wavenumber(&self, index: usize) -> i64 {
        let n = self.points_per_dim;
        debug_assert!(index < n);
        if index < n / 2 {
            index as i64
        } else {
            index as i64 - n as i64
        }
    }

    /// Physical frequency k*pi/L for an axis index.
    pub fn frequency_of(&self, index: usize) -> f64 {
        self.wavenumber(index) as f64 * self.freq_step
    }

    /// Physical coordinate of an axis index: -L + i*h.
    pub fn coordinate_of(&self, index: usize) -> f64 {
        -self.half_length + index as f64 * self.spacing
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        match self.dims {
            1 => [flat, 0],
            _ => [flat / self.points_per_dim, flat % self.points_per_dim],
        }
    }

    /// Euclidean norm |xi| of the lattice frequency at a flat index.
    pub fn xi_norm(&self, flat: usize) -> f64 {
        let [i0, i1] = self.axis_indices(flat);
        match self.dims {
            1 => self.frequency_of(i0).abs(),
            _ => {
                let a = self.frequency_of(i0);
                let b = self.frequency_of(i1);
                a.hypot(b)
            }
        }
    }

    /// Spatial coordinates of the grid point at a flat index.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let [i0, i1] = self.axis_indices(flat);
        match self.dims {
            1 => [self.coordinate_of(i0), 0.0],
            _ => [self.coordinate_of(i0), self.coordinate_of(i1)],
        }
    }

    /// Largest frequency magnitude present on the lattice (box corner in 2D).
    pub fn max_xi_norm(&self) -> f64 {
        let axis_max = self.freq_step * (self.points_per_dim / 2) as f64;
        match self.dims {
            1 => axis_max,
            _ => axis_max * std::f64::consts::SQRT_2,
        }
    }
}
