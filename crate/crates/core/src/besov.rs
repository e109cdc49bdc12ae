//! Littlewood-Paley decomposition and homogeneous Besov norms on the
//! frequency lattice, the heat-kernel characterization of negative
//! regularity, and initial data with prescribed low-frequency heaviness.

use crate::error::{Error, Result};
use crate::field::{lp_norm, RealField, SpectralField};
use crate::grid::Grid;
use crate::multipliers::heat_symbol;
use crate::transform::{forward_transform, inverse_transform};

/// C-infinity step: 0 for u <= 0, 1 for u >= 1, built from e^{-1/u}.
#[derive(Debug, Clone, Copy)]
pub struct SmoothStep;

fn bump(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

impl SmoothStep {
    pub fn value(u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let g = bump(u);
        let h = bump(1.0 - u);
        g / (g + h)
    }

    /// First derivative, analytic: S' = g h (u^-2 + (1-u)^-2) / (g+h)^2.
    pub fn d1(u: f64) -> f64 {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let g = bump(u);
        let h = bump(1.0 - u);
        if g == 0.0 || h == 0.0 {
            return 0.0;
        }
        let a = u.powi(-2) + (1.0 - u).powi(-2);
        g * h * a / (g + h).powi(2)
    }

    /// Second derivative, analytic.
    pub fn d2(u: f64) -> f64 {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let g = bump(u);
        let h = bump(1.0 - u);
        if g == 0.0 || h == 0.0 {
            return 0.0;
        }
        let v = 1.0 - u;
        let a = u.powi(-2) + v.powi(-2);
        let da = -2.0 * u.powi(-3) + 2.0 * v.powi(-3);
        let b = u.powi(-2) - v.powi(-2); // (gh)' = gh * b
        let sum = g + h;
        let dsum = g * u.powi(-2) - h * v.powi(-2);
        g * h * (b * a + da) / sum.powi(2) - 2.0 * g * h * a * dsum / sum.powi(3)
    }
}

// The radial cutoff underlying the dyadic partition: 1 below 3/4, 0 above
// 4/3, smoothly decreasing between. The window is the telescoping
// difference phi(r) = cutoff(r/2) - cutoff(r), supported in [3/4, 8/3].
const CUT_LO: f64 = 0.75;
const CUT_HI: f64 = 4.0 / 3.0;

fn cutoff(r: f64) -> f64 {
    1.0 - SmoothStep::value((r - CUT_LO) / (CUT_HI - CUT_LO))
}

/// The Littlewood-Paley window phi(|xi|) at scale 2^0.
pub fn lp_window(r: f64) -> f64 {
    cutoff(0.5 * r) - cutoff(r)
}

/// Littlewood-Paley family on a grid: dyadic blocks j in [j_min, j_max],
/// block j projecting onto |xi| ~ 2^j through phi(|xi| / 2^j).
#[derive(Debug, Clone)]
pub struct LPFamily {
    pub grid: Grid,
    pub j_min: i32,
    pub j_max: i32,
    /// Band [4/3 * 2^j_min, 3/2 * 2^j_max] on which the window sum
    /// telescopes to exactly 1; every nonzero lattice frequency lies inside.
    pub resolvable_band: (f64, f64),
}

/// Build the maximal dyadic family the lattice resolves and validate the
/// partition-of-unity and overlap invariants.
pub fn lp_partition(grid: Grid) -> Result<LPFamily> {
    let xi_min = grid.freq_step;
    let xi_max = grid.max_xi_norm();
    // cutoff(xi / 2^j_min) must vanish at the smallest nonzero frequency,
    // cutoff(xi / 2^(j_max+1)) must be 1 at the largest one
    let j_min = (xi_min / CUT_HI).log2().floor() as i32;
    let j_max = (xi_max / (2.0 * CUT_LO)).log2().ceil() as i32;
    let blocks = j_max - j_min + 1;
    if blocks < 3 {
        return Err(Error::Grid(format!(
            "grid resolves only {blocks} dyadic blocks; at least 3 needed"
        )));
    }
    let fam = LPFamily {
        grid,
        j_min,
        j_max,
        resolvable_band: (CUT_HI * 2f64.powi(j_min), 2.0 * CUT_LO * 2f64.powi(j_max)),
    };

    // partition of unity on every nonzero lattice point
    let mut worst = 0.0f64;
    for flat in 0..grid.total_points() {
        let xi = grid.xi_norm(flat);
        if xi == 0.0 {
            continue;
        }
        let sum: f64 = (j_min..=j_max).map(|j| fam.window(j, xi)).sum();
        worst = worst.max((sum - 1.0).abs());
        let overlap = (j_min..=j_max).filter(|&j| fam.window(j, xi) != 0.0).count();
        if overlap > 2 {
            return Err(Error::Grid(format!("window overlap {overlap} > 2 at |xi| = {xi}")));
        }
    }
    if worst > 1e-10 {
        return Err(Error::Grid(format!("partition residue {worst:.3e} above 1e-10")));
    }
    Ok(fam)
}

impl LPFamily {
    /// Window of block j evaluated at |xi|.
    pub fn window(&self, j: i32, xi_norm: f64) -> f64 {
        lp_window(xi_norm * 2f64.powi(-j))
    }

    /// Largest deviation of the window sum from 1 over nonzero lattice
    /// frequencies, reported rather than hidden.
    pub fn partition_residue(&self) -> f64 {
        let mut worst = 0.0f64;
        for flat in 0..self.grid.total_points() {
            let xi = self.grid.xi_norm(flat);
            if xi == 0.0 {
                continue;
            }
            let sum: f64 = (self.j_min..=self.j_max).map(|j| self.window(j, xi)).sum();
            worst = worst.max((sum - 1.0).abs());
        }
        worst
    }

    /// Spectral projection onto block j.
    pub fn project(&self, spectrum: &SpectralField, j: i32) -> SpectralField {
        spectrum.apply_radial_multiplier(|xi| self.window(j, xi))
    }
}

/// Parameters of a homogeneous Besov norm.
#[derive(Debug, Clone, Copy)]
pub struct BesovSpec {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        let ok = |v: f64| v >= 1.0 || (v.is_infinite() && v > 0.0);
        if !ok(p) || !ok(q) {
            return Err(Error::Param(format!(
                "Besov indices need p, q in [1, inf], got p={p}, q={q}"
            )));
        }
        if !s.is_finite() {
            return Err(Error::Param("Besov regularity s must be finite".into()));
        }
        Ok(Self { s, p, q })
    }
}

/// Dyadic block energies (j, 2^{js} ||Delta_j f||_p), the summands of the
/// Besov norm; streamed to CSV for spectral-distribution plots.
pub fn block_energies(
    f: &RealField,
    spec: &BesovSpec,
    fam: &LPFamily,
) -> Result<Vec<(i32, f64)>> {
    if f.grid != fam.grid {
        return Err(Error::GridMismatch);
    }
    // the distribution-space definition needs s < n/p
    let n_over_p = fam.grid.dims as f64 / spec.p;
    if spec.p.is_finite() && spec.s >= n_over_p {
        return Err(Error::Param(format!(
            "regularity s = {} must stay below n/p = {}",
            spec.s, n_over_p
        )));
    }
    let spectrum = forward_transform(f);
    let mut rows = Vec::with_capacity((fam.j_max - fam.j_min + 1) as usize);
    for j in fam.j_min..=fam.j_max {
        let block = fam.project(&spectrum, j);
        let energy = if spec.p == 2.0 {
            block.l2_norm()
        } else {
            lp_norm(&inverse_transform(&block)?, spec.p)?
        };
        rows.push((j, 2f64.powi(j).powf(spec.s) * energy));
    }
    Ok(rows)
}

/// Homogeneous Besov norm: ell^q over j of 2^{js} ||Delta_j f||_p, truncated
/// to the blocks the lattice resolves.
pub fn besov_norm(f: &RealField, spec: &BesovSpec, fam: &LPFamily) -> Result<f64> {
    let rows = block_energies(f, spec, fam)?;
    if spec.q.is_infinite() {
        Ok(rows.iter().fold(0.0, |m, &(_, e)| m.max(e)))
    } else {
        let q = spec.q;
        Ok(rows.iter().map(|&(_, e)| e.powf(q)).sum::<f64>().powf(1.0 / q))
    }
}

/// Heat-kernel characterization of negative regularity -delta: the sup over
/// a time grid of t^{delta/2} ||e^{t Laplacian} f||_{L^2}, evaluated
/// spectrally. The grid must span at least three decades so the sup is a
/// meaningful surrogate for the sup over t > 0.
pub fn heat_characterization_norm(f: &RealField, delta: f64, t_grid: &[f64]) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(Error::Param("heat characterization needs a nonempty t grid".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Param(format!(
            "heat characterization needs delta > 0, got {delta}"
        )));
    }
    let (mut lo, mut hi) = (f64::MAX, 0.0f64);
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::Param("heat characterization needs t > 0".into()));
        }
        lo = lo.min(t);
        hi = hi.max(t);
    }
    if hi / lo < 1e3 {
        return Err(Error::Param(format!(
            "t grid must span at least 3 decades, got {:.2}",
            (hi / lo).log10()
        )));
    }
    let spectrum = forward_transform(f);
    let mut sup = 0.0f64;
    for &t in t_grid {
        let evolved = spectrum.apply_radial_multiplier(|xi| heat_symbol(t, xi, 1.0).unwrap());
        sup = sup.max(t.powf(0.5 * delta) * evolved.l2_norm());
    }
    Ok(sup)
}

/// Initial data with prescribed Besov behavior: the radial profile
/// `amplitude * <x>^{-(n/2 + beta)} / log(e + |x|)` with the Japanese
/// bracket `<x> = (1 + |x|^2)^{1/2}`, whose Fourier side is heavy enough at
/// low frequency to sit in B^{-beta}_{2,inf} and no better.
pub fn make_besov_data(grid: Grid, beta: f64, amplitude: f64) -> Result<RealField> {
    let n = grid.dims as f64;
    if !(0.0..n / 2.0).contains(&beta) {
        return Err(Error::Param(format!(
            "profile regularity needs 0 <= beta < n/2 = {}, got {beta}",
            n / 2.0
        )));
    }
    let expo = -(n / 2.0 + beta);
    let f = RealField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        amplitude * (1.0 + r2).powf(0.5 * expo) / (std::f64::consts::E + r).ln()
    })?;
    if beta > 0.0 && amplitude != 0.0 {
        let t_grid: Vec<f64> = (0..13).map(|i| 0.1 * 10f64.powf(i as f64 / 4.0)).collect();
        let h = heat_characterization_norm(&f, beta, &t_grid)?;
        if !h.is_finite() {
            return Err(Error::NonFinite("heat characterization of profile".into()));
        }
    }
    Ok(f)
}
