//! Scalar Fourier multipliers of the damped wave propagator and the
//! fractional heat semigroup.
//!
//! Per frequency, the damped wave equation reduces to the oscillator
//! `K'' + K' + |xi|^2 K = 0`. With the discriminant D = 1 - 4|xi|^2 the two
//! fundamental kernels are
//!
//!   K0 = e^{-t/2} cosh(sqrt(D) t/2),      K0(0) = 1, K0'(0) = -1/2,
//!   K1 = e^{-t/2} 2 sinh(sqrt(D) t/2)/sqrt(D),  K1(0) = 0, K1'(0) = 1,
//!
//! where for D < 0 the hyperbolic pair turns into cos/sin of sqrt(-D) t/2.
//! Both branches are the same entire function of w = D t^2 / 4, which is how
//! they are evaluated here: the formulas are removable-singular at
//! |xi| = 1/2 and a truncated series in w takes over near the boundary.

use crate::error::{Error, Result};

/// Branch classification of a frequency against the critical radius 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// |xi| < 1/2: overdamped, real characteristic roots.
    Low,
    /// |xi| = 1/2: double root -1/2.
    Boundary,
    /// |xi| > 1/2: oscillatory, complex roots -1/2 +- i sqrt(|xi|^2 - 1/4).
    High,
}

#[derive(Debug, Clone, Copy)]
pub struct KernelBranch {
    pub regime: Regime,
    /// 1 - 4|xi|^2 in the low regime, 4|xi|^2 - 1 in the high regime,
    /// 0 on the boundary. Nonnegative by construction.
    pub discriminant: f64,
}

impl KernelBranch {
    pub fn classify(xi_norm: f64) -> Self {
        let d = 1.0 - 4.0 * xi_norm * xi_norm;
        if xi_norm < 0.5 {
            Self { regime: Regime::Low, discriminant: d }
        } else if xi_norm == 0.5 {
            Self { regime: Regime::Boundary, discriminant: 0.0 }
        } else {
            Self { regime: Regime::High, discriminant: -d }
        }
    }
}

/// cosh(sqrt(w)) and sinh(sqrt(w))/sqrt(w) continued through w <= 0.
/// For |w| below the series threshold the truncated Taylor series keeps the
/// evaluation regular through the branch point.
fn cosh_sinhc(w: f64) -> (f64, f64) {
    if w.abs() < 1e-2 {
        let c = 1.0 + w * (0.5 + w * (1.0 / 24.0 + w * (1.0 / 720.0 + w / 40320.0)));
        let s = 1.0 + w * (1.0 / 6.0 + w * (1.0 / 120.0 + w * (1.0 / 5040.0 + w / 362880.0)));
        (c, s)
    } else if w > 0.0 {
        let r = w.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-w).sqrt();
        (r.cos(), r.sin() / r)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Param(format!("time must be nonnegative and finite, got {t}")));
    }
    Ok(())
}

/// Kernel K0-hat: propagates the initial position (together with K1/2).
pub fn k0_hat(t: f64, xi_norm: f64) -> Result<f64> {
    check_t(t)?;
    Ok(kernel_quad(t, xi_norm).0)
}

/// Kernel K1-hat: propagates the initial velocity.
pub fn k1_hat(t: f64, xi_norm: f64) -> Result<f64> {
    check_t(t)?;
    Ok(kernel_quad(t, xi_norm).1)
}

/// Analytic time derivatives of both kernels, branch-consistent with
/// `k0_hat` / `k1_hat`. At t = 0 these are (-1/2, 1).
pub fn kernel_time_derivatives(t: f64, xi_norm: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    let (_, _, dk0, dk1) = kernel_quad(t, xi_norm);
    Ok((dk0, dk1))
}

/// All four kernel values (K0, K1, K0', K1') at once; the per-mode propagator
/// wants them together.
///
/// In the overdamped zone the e^{-t/2} cosh / sinh products are assembled
/// from the two characteristic exponentials e^{(s-1)t/2} and e^{-(s+1)t/2},
/// both nonincreasing, so large times cannot overflow. The exponent
/// (s-1)/2 is formed as -2|xi|^2/(1+s) to dodge the cancellation at small
/// |xi|.
pub fn kernel_quad(t: f64, xi_norm: f64) -> (f64, f64, f64, f64) {
    let y = xi_norm * xi_norm;
    let d = 1.0 - 4.0 * y;
    let w = d * t * t / 4.0;
    if w.abs() < 1e-2 {
        let (c, s) = cosh_sinhc(w);
        let e = (-0.5 * t).exp();
        let k0 = e * c;
        let k1 = e * t * s;
        let dk0 = e * (-0.5 * c + 0.25 * d * t * s);
        let dk1 = e * (c - 0.5 * t * s);
        (k0, k1, dk0, dk1)
    } else if d > 0.0 {
        let s = d.sqrt();
        let sm1 = -4.0 * y / (1.0 + s); // = s - 1, exact at small |xi|
        let ep = (0.5 * t * sm1).exp();
        let em = (-0.5 * t * (1.0 + s)).exp();
        let e_cosh = 0.5 * (ep + em); // e^{-t/2} cosh(s t/2)
        let e_sinh = 0.5 * (ep - em); // e^{-t/2} sinh(s t/2)
        let k0 = e_cosh;
        let k1 = 2.0 * e_sinh / s;
        let dk0 = -0.5 * e_cosh + 0.5 * s * e_sinh;
        let dk1 = e_cosh - e_sinh / s;
        (k0, k1, dk0, dk1)
    } else {
        let om = (-d).sqrt();
        let e = (-0.5 * t).exp();
        let (sv, cv) = (0.5 * om * t).sin_cos();
        let k0 = e * cv;
        let k1 = 2.0 * e * sv / om;
        let dk0 = e * (-0.5 * cv - 0.5 * om * sv);
        let dk1 = e * (cv - sv / om);
        (k0, k1, dk0, dk1)
    }
}

/// Integral of K1-hat over [0, t]. The oscillator equation integrates to
/// this closed form for |xi| > 0; the xi -> 0 limit is t - 1 + e^{-t}.
pub fn k1_hat_integral(t: f64, xi_norm: f64) -> Result<f64> {
    check_t(t)?;
    let y = xi_norm * xi_norm;
    if y > 1e-6 {
        let k1 = k1_hat(t, xi_norm)?;
        let (_, dk1) = kernel_time_derivatives(t, xi_norm)?;
        Ok((1.0 - k1 - dk1) / y)
    } else {
        Ok(t - 1.0 + (-t).exp())
    }
}

/// Symbol of the fractional heat semigroup e^{-t (-Laplacian)^alpha}.
pub fn heat_symbol(t: f64, xi_norm: f64, alpha: f64) -> Result<f64> {
    check_t(t)?;
    if !(alpha >= 1.0) {
        return Err(Error::Param(format!("heat symbol requires alpha >= 1, got {alpha}")));
    }
    Ok((-t * xi_norm.powf(2.0 * alpha)).exp())
}

/// Frequency zone of a multiplier-bound scan, following the low / mid / high
/// split of the kernel estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Zone {
    /// |xi| < eps.
    Low { eps: f64 },
    /// eps <= |xi| <= 1/2.
    Mid { eps: f64 },
    /// |xi| > 1/2.
    High,
}

/// Default low/mid split. The low-zone estimates need 1 - 4|xi|^2 > 1/2,
/// i.e. |xi| < sqrt(1/8) ~ 0.3536; 0.25 sits safely inside.
pub const DEFAULT_EPS: f64 = 0.25;

impl Zone {
    pub fn low() -> Self {
        Zone::Low { eps: DEFAULT_EPS }
    }
    pub fn mid() -> Self {
        Zone::Mid { eps: DEFAULT_EPS }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Zone::Low { .. } => "low",
            Zone::Mid { .. } => "mid",
            Zone::High => "high",
        }
    }

    pub fn contains(&self, xi: f64) -> bool {
        match *self {
            Zone::Low { eps } => xi >= 0.0 && xi < eps,
            Zone::Mid { eps } => xi >= eps && xi <= 0.5,
            Zone::High => xi > 0.5,
        }
    }
}

/// Outcome of scanning one claimed bound shape over a (t, xi) lattice.
#[derive(Debug, Clone)]
pub struct BoundScanReport {
    pub zone: &'static str,
    pub bound_id: String,
    pub claimed_form: String,
    pub scanned_points: usize,
    /// max over the scan of |left side| / (right-side shape)
    pub worst_ratio: f64,
    pub argmax_t: f64,
    pub argmax_xi: f64,
}

struct Bound {
    id: &'static str,
    form: &'static str,
    lhs: fn(f64, f64) -> f64,
    rhs: fn(f64, f64) -> f64,
}

fn dt_sum(t: f64, xi: f64) -> f64 {
    let (dk0, dk1) = kernel_time_derivatives(t, xi).unwrap();
    (dk0 + 0.5 * dk1).abs()
}

fn sum01(t: f64, xi: f64) -> f64 {
    (k0_hat(t, xi).unwrap() + 0.5 * k1_hat(t, xi).unwrap()).abs()
}

// Mid-zone comparison rate: the estimates give e^{-|xi|^2 t} (1 + t) there,
// which any rate below eps^2 absorbs.
fn mid_rate(t: f64) -> f64 {
    (-0.5 * DEFAULT_EPS * DEFAULT_EPS * t).exp()
}

fn bounds_for(zone: Zone) -> Vec<Bound> {
    match zone {
        Zone::Low { .. } => vec![
            Bound {
                id: "k0_low",
                form: "|K0| <= C e^{-|xi|^2 t}",
                lhs: |t, xi| k0_hat(t, xi).unwrap().abs(),
                rhs: |t, xi| (-xi * xi * t).exp(),
            },
            Bound {
                id: "k1_low",
                form: "|K1| <= C e^{-|xi|^2 t}",
                lhs: |t, xi| k1_hat(t, xi).unwrap().abs(),
                rhs: |t, xi| (-xi * xi * t).exp(),
            },
            Bound {
                id: "dt_k0_half_k1_low",
                form: "|d/dt (K0 + K1/2)| <= C |xi|^2 e^{-|xi|^2 t}",
                lhs: dt_sum,
                rhs: |t, xi| xi * xi * (-xi * xi * t).exp(),
            },
            Bound {
                id: "dt_k1_low",
                form: "|d/dt K1| <= C (|xi|^2 e^{-|xi|^2 t} + e^{-t/2})",
                lhs: |t, xi| kernel_time_derivatives(t, xi).unwrap().1.abs(),
                rhs: |t, xi| xi * xi * (-xi * xi * t).exp() + (-0.5 * t).exp(),
            },
            Bound {
                id: "shape_sigma_delta",
                form: "|xi|^2 e^{-t |xi|^2} <= C (1+t)^{-1}",
                lhs: |t, xi| xi * xi * (-t * xi * xi).exp() * (1.0 + t),
                rhs: |_, _| 1.0,
            },
        ],
        Zone::Mid { .. } => vec![
            Bound {
                id: "k0_half_k1_mid",
                form: "|K0 + K1/2| <= C e^{-c t}",
                lhs: sum01,
                rhs: |t, _| mid_rate(t),
            },
            Bound {
                id: "k1_mid",
                form: "|K1| <= C e^{-c t}",
                lhs: |t, xi| k1_hat(t, xi).unwrap().abs(),
                rhs: |t, _| mid_rate(t),
            },
            Bound {
                id: "dt_k0_half_k1_mid",
                form: "|d/dt (K0 + K1/2)| <= C e^{-c t}",
                lhs: dt_sum,
                rhs: |t, _| mid_rate(t),
            },
            Bound {
                id: "dt_k1_mid",
                form: "|d/dt K1| <= C e^{-c t}",
                lhs: |t, xi| kernel_time_derivatives(t, xi).unwrap().1.abs(),
                rhs: |t, _| mid_rate(t),
            },
        ],
        Zone::High => vec![
            Bound {
                id: "k0_high",
                form: "|K0| <= e^{-t/2}",
                lhs: |t, xi| k0_hat(t, xi).unwrap().abs(),
                rhs: |t, _| (-0.5 * t).exp(),
            },
            Bound {
                id: "k0_half_k1_high",
                form: "|K0 + K1/2| <= C e^{-t/4}",
                lhs: sum01,
                rhs: |t, _| (-0.25 * t).exp(),
            },
            Bound {
                id: "k1_alpha_high",
                form: "|xi| |K1| <= C e^{-t/4}",
                lhs: |t, xi| xi * k1_hat(t, xi).unwrap().abs(),
                rhs: |t, _| (-0.25 * t).exp(),
            },
            Bound {
                id: "dt_k0_half_k1_high",
                form: "|d/dt (K0 + K1/2)| <= C |xi| e^{-t/4}",
                lhs: dt_sum,
                rhs: |t, xi| xi * (-0.25 * t).exp(),
            },
            Bound {
                id: "dt_k1_high",
                form: "|d/dt K1| <= C e^{-t/4}",
                lhs: |t, xi| kernel_time_derivatives(t, xi).unwrap().1.abs(),
                rhs: |t, _| (-0.25 * t).exp(),
            },
        ],
    }
}

/// Scan every bound shape registered for a zone over the (t, xi) product
/// lattice and report the worst empirical ratio per shape. Ratios are
/// recorded, not asserted: the testable claim is that they stay finite.
pub fn verify_multiplier_bounds(
    zone: Zone,
    t_grid: &[f64],
    xi_grid: &[f64],
) -> Result<Vec<BoundScanReport>> {
    if t_grid.is_empty() || xi_grid.is_empty() {
        return Err(Error::Param("bound scan requires nonempty grids".into()));
    }
    for &t in t_grid {
        check_t(t)?;
    }
    for &xi in xi_grid {
        if !zone.contains(xi) {
            return Err(Error::Param(format!(
                "xi = {xi} lies outside the {} zone",
                zone.label()
            )));
        }
    }
    let reports = bounds_for(zone)
        .into_iter()
        .map(|b| {
            let mut worst = 0.0f64;
            let mut arg = (0.0, 0.0);
            for &xi in xi_grid {
                for &t in t_grid {
                    let lhs = (b.lhs)(t, xi);
                    let rhs = (b.rhs)(t, xi);
                    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
                    if ratio > worst {
                        worst = ratio;
                        arg = (t, xi);
                    }
                }
            }
            BoundScanReport {
                zone: zone.label(),
                bound_id: b.id.to_string(),
                claimed_form: b.form.to_string(),
                scanned_points: t_grid.len() * xi_grid.len(),
                worst_ratio: worst,
                argmax_t: arg.0,
                argmax_xi: arg.1,
            }
        })
        .collect();
    Ok(reports)
}

/// Evenly spaced scan grid including both endpoints.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + i as f64 * step).collect()
}

/// Logarithmically spaced scan grid including both endpoints.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let l0 = lo.ln();
    let step = (hi.ln() - l0) / (count - 1) as f64;
    (0..count).map(|i| (l0 + i as f64 * step).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_initial_conditions() {
        for &xi in &[0.0, 0.1, 0.5, 0.7, 3.0] {
            assert_eq!(k0_hat(0.0, xi).unwrap(), 1.0);
            assert_eq!(k1_hat(0.0, xi).unwrap(), 0.0);
            let (dk0, dk1) = kernel_time_derivatives(0.0, xi).unwrap();
            assert_eq!(dk0, -0.5);
            assert_eq!(dk1, 1.0);
        }
    }

    #[test]
    fn kernel_closed_forms_at_zero_frequency() {
        // K0(1, 0) = e^{-1/2} cosh(1/2) = (1 + e^{-1})/2
        let k0 = k0_hat(1.0, 0.0).unwrap();
        assert!((k0 - 0.5 * (1.0 + (-1.0f64).exp())).abs() < 1e-15);
        // K1(1, 0) = 1 - e^{-1}
        let k1 = k1_hat(1.0, 0.0).unwrap();
        assert!((k1 - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn boundary_value_from_both_branches() {
        for &t in &[0.5f64, 1.0, 2.0, 10.0] {
            let exact = (-0.5 * t).exp();
            assert!((k0_hat(t, 0.5).unwrap() - exact).abs() < 1e-14);
            assert!((k1_hat(t, 0.5).unwrap() - t * exact).abs() < 1e-13);
        }
        // both branches near the boundary agree with the limit t e^{-t/2}
        let lim = 2.0 * (-1.0f64).exp();
        for &xi in &[0.5 - 1e-6, 0.5 + 1e-6] {
            let v = k1_hat(2.0, xi).unwrap();
            assert!((v - lim).abs() < 1e-4, "xi={xi}: {v} vs {lim}");
        }
    }

    #[test]
    fn branch_continuity_across_half() {
        for &t in &[0.1, 1.0, 5.0, 20.0, 80.0] {
            let below0 = k0_hat(t, 0.5 - 1e-7).unwrap();
            let above0 = k0_hat(t, 0.5 + 1e-7).unwrap();
            assert!((below0 - above0).abs() < 1e-5, "K0 jump at t={t}");
            let below1 = k1_hat(t, 0.5 - 1e-7).unwrap();
            let above1 = k1_hat(t, 0.5 + 1e-7).unwrap();
            assert!((below1 - above1).abs() < 1e-5, "K1 jump at t={t}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for &xi in &[0.0, 0.2, 0.49, 0.5, 0.51, 1.0, 3.0] {
            for &t in &[0.1, 0.7, 2.3, 6.0, 10.0] {
                let (dk0, dk1) = kernel_time_derivatives(t, xi).unwrap();
                let fd0 = (k0_hat(t + h, xi).unwrap() - k0_hat(t - h, xi).unwrap()) / (2.0 * h);
                let fd1 = (k1_hat(t + h, xi).unwrap() - k1_hat(t - h, xi).unwrap()) / (2.0 * h);
                assert!((dk0 - fd0).abs() < 1e-6, "dK0 at t={t} xi={xi}: {dk0} vs {fd0}");
                assert!((dk1 - fd1).abs() < 1e-6, "dK1 at t={t} xi={xi}: {dk1} vs {fd1}");
            }
        }
    }

    #[test]
    fn kernels_satisfy_mode_ode() {
        // second-order centered residual of K'' + K' + |xi|^2 K
        let h = 1e-4;
        for &xi in &[0.0, 0.3, 0.5, 0.8, 2.0, 3.0] {
            for &t in &[0.5, 1.5, 4.0, 9.5] {
                for kernel in [k0_hat, k1_hat] {
                    let km = kernel(t - h, xi).unwrap();
                    let k = kernel(t, xi).unwrap();
                    let kp = kernel(t + h, xi).unwrap();
                    let d2 = (kp - 2.0 * k + km) / (h * h);
                    let d1 = (kp - km) / (2.0 * h);
                    let res = d2 + d1 + xi * xi * k;
                    assert!(res.abs() < 1e-6, "ODE residual {res} at t={t}, xi={xi}");
                }
            }
        }
    }

    #[test]
    fn k1_integral_matches_quadrature() {
        for &xi in &[0.0, 1e-4, 0.03, 0.3, 0.5, 1.7] {
            for &tau in &[0.25, 1.0, 3.0] {
                // composite Simpson oracle
                let m = 2000;
                let h = tau / m as f64;
                let mut acc = 0.0;
                for i in 0..m {
                    let a = i as f64 * h;
                    acc += h / 6.0
                        * (k1_hat(a, xi).unwrap()
                            + 4.0 * k1_hat(a + 0.5 * h, xi).unwrap()
                            + k1_hat(a + h, xi).unwrap());
                }
                let got = k1_hat_integral(tau, xi).unwrap();
                // below the branch threshold the xi = 0 form is used, with an
                // O(|xi|^2) approximation error
                let tol = if xi * xi > 1e-6 { 1e-9 } else { 1e-7 };
                assert!((got - acc).abs() < tol, "xi={xi} tau={tau}: {got} vs {acc}");
            }
        }
    }

    #[test]
    fn k1_decays_for_positive_frequencies() {
        // decay timescale is 1/|xi|^2 in the low zone, O(1) above
        for &xi in &[0.05f64, 0.2, 0.5, 1.0, 4.0] {
            let t = (20.0 / (xi * xi)).max(80.0);
            assert!(k1_hat(t, xi).unwrap().abs() < 1e-6, "no decay at xi={xi}");
        }
        // monotone tail in the low zone
        for &xi in &[0.05, 0.2] {
            let mut prev = k1_hat(50.0, xi).unwrap();
            for i in 1..=20 {
                let v = k1_hat(50.0 + 2.5 * i as f64, xi).unwrap();
                assert!(v <= prev, "tail not monotone at xi={xi}");
                prev = v;
            }
        }
    }

    #[test]
    fn heat_symbol_basics() {
        assert_eq!(heat_symbol(0.0, 2.7, 1.5).unwrap(), 1.0);
        let half = heat_symbol(2.0f64.ln(), 1.0, 1.0).unwrap();
        assert!((half - 0.5).abs() < 1e-15);
        assert!(heat_symbol(1.0, 1.0, 0.5).is_err());
        assert!(heat_symbol(-1.0, 1.0, 1.0).is_err());
        // nonincreasing in t
        let mut prev = f64::MAX;
        for i in 0..50 {
            let v = heat_symbol(0.2 * i as f64, 0.8, 2.0).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn branch_classification() {
        assert_eq!(KernelBranch::classify(0.2).regime, Regime::Low);
        assert_eq!(KernelBranch::classify(0.5).regime, Regime::Boundary);
        assert_eq!(KernelBranch::classify(0.7).regime, Regime::High);
        assert!(KernelBranch::classify(0.2).discriminant > 0.0);
        assert!(KernelBranch::classify(0.7).discriminant > 0.0);
    }

    #[test]
    fn low_zone_k1_ratio_stays_small() {
        // |K1| against e^{-2 |xi|^2 (t/2)}; the constant comes out near
        // 2 / sqrt(1 - 4 eps^2) and the scan records it.
        let t_grid = linspace(0.0, 50.0, 201);
        let xi_grid = linspace(0.0, 0.2, 81);
        let reports = verify_multiplier_bounds(Zone::low(), &t_grid, &xi_grid).unwrap();
        let k1 = reports.iter().find(|r| r.bound_id == "k1_low").unwrap();
        assert!(k1.worst_ratio.is_finite());
        assert!(k1.worst_ratio <= 2.1, "k1 low-zone ratio {}", k1.worst_ratio);
    }

    #[test]
    fn shape_scan_is_finite() {
        let t_grid = linspace(0.0, 100.0, 301);
        let xi_grid = linspace(0.0, 0.2499, 101);
        let reports = verify_multiplier_bounds(Zone::low(), &t_grid, &xi_grid).unwrap();
        let shape = reports.iter().find(|r| r.bound_id == "shape_sigma_delta").unwrap();
        assert!(shape.worst_ratio.is_finite());
        assert!(shape.worst_ratio > 0.0);
    }

    #[test]
    fn high_zone_k0_is_bounded_by_exponential() {
        let t_grid = linspace(0.0, 40.0, 161);
        let xi_grid = linspace(0.5001, 12.0, 241);
        let reports = verify_multiplier_bounds(Zone::High, &t_grid, &xi_grid).unwrap();
        for r in &reports {
            assert!(r.worst_ratio.is_finite(), "{} blew up", r.bound_id);
        }
        let k0 = reports.iter().find(|r| r.bound_id == "k0_high").unwrap();
        assert!(k0.worst_ratio <= 1.0 + 1e-12, "|cos| <= 1 violated: {}", k0.worst_ratio);
    }

    #[test]
    fn mid_zone_ratios_finite() {
        let t_grid = linspace(0.0, 80.0, 201);
        let xi_grid = linspace(0.25, 0.5, 51);
        let reports = verify_multiplier_bounds(Zone::mid(), &t_grid, &xi_grid).unwrap();
        for r in &reports {
            assert!(r.worst_ratio.is_finite(), "{} blew up", r.bound_id);
            assert!(r.scanned_points == 201 * 51);
        }
    }

    #[test]
    fn scan_rejects_out_of_zone_points() {
        let bad = verify_multiplier_bounds(Zone::low(), &[1.0], &[0.3]);
        assert!(bad.is_err());
        let empty = verify_multiplier_bounds(Zone::High, &[], &[1.0]);
        assert!(empty.is_err());
    }
}
