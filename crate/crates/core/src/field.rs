//! Sampled real fields, their discrete Fourier coefficients, and Lp norms.

use std::io::{Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// A real-valued function sampled on a grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: Grid,
    pub samples: Vec<f64>,
}

/// Discrete Fourier coefficients indexed by the frequency lattice, row-major
/// in FFT index order per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: Grid,
    pub coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.total_points() {
            return Err(Error::Grid(format!(
                "sample count {} does not match grid ({} points)",
                samples.len(),
                grid.total_points()
            )));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample value {bad}")));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, samples: vec![0.0; grid.total_points()] }
    }

    /// Sample a function of the spatial coordinates onto the grid.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let samples: Vec<f64> = (0..grid.total_points())
            .map(|i| {
                let p = grid.point(i);
                f(&p[..grid.dims])
            })
            .collect();
        Self::new(grid, samples)
    }

    /// Riemann-sum Lp norm on the box; `p` may be `f64::INFINITY`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|v| lambda * v).collect() }
    }

    /// Flat binary layout: dims, N as little-endian u64, L as little-endian
    /// f64, then the row-major samples as little-endian f64.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.grid.dims as u64).to_le_bytes())?;
        w.write_all(&(self.grid.points_per_dim as u64).to_le_bytes())?;
        w.write_all(&self.grid.half_length.to_le_bytes())?;
        for v in &self.samples {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut u = [0u8; 8];
        r.read_exact(&mut u)?;
        let dims = u64::from_le_bytes(u) as usize;
        r.read_exact(&mut u)?;
        let n = u64::from_le_bytes(u) as usize;
        r.read_exact(&mut u)?;
        let half_length = f64::from_le_bytes(u);
        let grid = crate::grid::make_grid(dims, n, half_length)
            .map_err(|e| Error::Format(format!("bad header: {e}")))?;
        let mut samples = vec![0.0; grid.total_points()];
        for v in samples.iter_mut() {
            r.read_exact(&mut u)?;
            *v = f64::from_le_bytes(u);
        }
        Self::new(grid, samples)
    }

    pub fn save_binary<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(&mut f)
    }

    pub fn load_binary<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_binary(&mut f)
    }

    /// Debug CSV: index columns then the sample value.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        if self.grid.dims == 1 {
            writeln!(w, "i,value")?;
            for (i, v) in self.samples.iter().enumerate() {
                writeln!(w, "{i},{v:.17e}")?;
            }
        } else {
            writeln!(w, "i,j,value")?;
            for (flat, v) in self.samples.iter().enumerate() {
                let [i, j] = self.grid.axis_indices(flat);
                writeln!(w, "{i},{j},{v:.17e}")?;
            }
        }
        Ok(())
    }
}

/// Riemann-sum approximation of the continuum Lp norm on the box.
pub fn lp_norm(f: &RealField, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Param(format!("lp_norm requires p >= 1 or p = inf, got {p}")));
    }
    let cell = f.grid.cell_volume();
    if p == 2.0 {
        let s: f64 = f.samples.iter().map(|v| v * v).sum();
        return Ok((s * cell).sqrt());
    }
    let s: f64 = f.samples.iter().map(|v| v.abs().powf(p)).sum();
    Ok((s * cell).powf(1.0 / p))
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.total_points() {
            return Err(Error::Grid(format!(
                "coefficient count {} does not match grid ({} points)",
                coeffs.len(),
                grid.total_points()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.total_points()] }
    }

    /// Flat index of the frequency -xi when this index holds xi.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let n = self.grid.points_per_dim;
        let [i0, i1] = self.grid.axis_indices(flat);
        let j0 = (n - i0) % n;
        match self.grid.dims {
            1 => j0,
            _ => j0 * n + (n - i1) % n,
        }
    }

    /// Largest |c(-xi) - conj(c(xi))| over the lattice, normalized by the
    /// largest coefficient magnitude.
    pub fn conjugate_symmetry_residue(&self) -> f64 {
        let scale = self
            .coeffs
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()))
            .max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..self.coeffs.len() {
            let j = self.conjugate_index(i);
            let d = (self.coeffs[j] - self.coeffs[i].conj()).norm();
            worst = worst.max(d);
        }
        worst / scale
    }

    /// Apply a real radial multiplier m(|xi|) coefficient-wise.
    pub fn apply_radial_multiplier<F: Fn(f64) -> f64>(&self, m: F) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(self.grid.xi_norm(i)))
            .collect();
        SpectralField { grid: self.grid, coeffs }
    }

    /// Plancherel L2 norm: sqrt((2L)^dims * sum |c|^2).
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.box_volume()).sqrt()
    }

    /// Homogeneous Sobolev lattice norm sqrt((2L)^dims * sum |xi|^{2s}|c|^2).
    /// The xi = 0 mode contributes only for s = 0.
    pub fn hdot_norm(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let xi = self.grid.xi_norm(i);
            let w = if xi == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                xi.powf(2.0 * s)
            };
            acc += w * c.norm_sqr();
        }
        (acc * self.grid.box_volume()).sqrt()
    }
}
