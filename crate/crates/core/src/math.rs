//! Numerical primitives: `libm` wrappers, adaptive Gauss–Kronrod quadrature
//! and bracketed root finding.
//!
//! All elementary functions go through `libm` so results are identical with
//! and without `std`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `e^{i theta}`.
#[inline]
pub fn cis(theta: f64) -> Complex {
    Complex::new(cos(theta), sin(theta))
}

/// Standard normal distribution function.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / core::f64::consts::SQRT_2)
}

/// `∫_a^b u e^{βu} du`, stable for `β → 0`.
pub fn int_u_exp(beta: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if (beta * (b - a)).abs() < 1e-6 && (beta * b).abs() < 1e-3 {
        // second-order series around β = 0
        let m2 = (b * b - a * a) / 2.0;
        let m3 = (b * b * b - a * a * a) / 3.0;
        return m2 + beta * m3;
    }
    let prim = |u: f64| exp(beta * u) * (u / beta - 1.0 / (beta * beta));
    prim(b) - prim(a)
}

// Gauss–Kronrod 7/15 nodes on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
///
/// Bisects the panel with the largest error estimate until the summed
/// estimate drops below `abs_tol` or `max_panels` is reached, in which case
/// [`Error::Quadrature`] is returned.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    integrate_panels(f, a, b, 1, abs_tol, max_panels)
}

/// As [`integrate`], starting from `initial` equal panels (useful for
/// oscillatory integrands whose single-panel error estimate is unreliable).
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    initial: usize,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    if b <= a {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let n0 = initial.max(1);
    let w = (b - a) / n0 as f64;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..n0)
        .map(|k| {
            let lo = a + k as f64 * w;
            let hi = if k + 1 == n0 { b } else { lo + w };
            let (v, e) = gk15(&mut f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    let mut total_err: f64 = panels.iter().map(|p| p.3).sum();
    while total_err > abs_tol {
        if panels.len() >= max_panels {
            return Err(Error::Quadrature {
                tolerance: abs_tol,
                estimate: total_err,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.3 > acc.1 {
                    (i, p.3)
                } else {
                    acc
                }
            });
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
        total_err = panels.iter().map(|p| p.3).sum();
        if mid <= lo || mid >= hi {
            break;
        }
    }
    Ok(Quadrature {
        value: panels.iter().map(|p| p.2).sum(),
        error: total_err,
        panels: panels.len(),
    })
}

/// Brent's method on a bracket `[lo, hi]` with `f(lo)·f(hi) ≤ 0`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFindFailure("root is not bracketed"));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
    }
    Err(Error::RootFindFailure("Brent iteration did not converge"))
}

/// Finds the root of an increasing function `f` on `[lo, ∞)` by doubling the
/// upper end until the sign changes, then refining with [`brent`].
pub fn root_increasing<F: FnMut(f64) -> f64>(mut f: F, lo: f64, xtol: f64) -> Result<f64> {
    let flo = f(lo);
    if flo > 0.0 {
        return Err(Error::RootFindFailure("function positive at lower end"));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    let mut hi = if lo > 0.0 { 2.0 * lo } else { lo + 1.0 };
    for _ in 0..200 {
        let fh = f(hi);
        if !fh.is_finite() {
            return Err(Error::RootFindFailure("non-finite value while bracketing"));
        }
        if fh >= 0.0 {
            return brent(f, lo, hi, xtol);
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(Error::RootFindFailure("could not bracket root"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_polynomial_and_gaussian() {
        let q = integrate(|x| x * x, 0.0, 3.0, 1e-12, 100).unwrap();
        assert!((q.value - 9.0).abs() < 1e-12);
        let q = integrate(|x| exp(-x * x), -8.0, 8.0, 1e-12, 200).unwrap();
        assert!((q.value - core::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn quadrature_reports_failure() {
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-14, 4);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-13);
        assert!(brent(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_err());
    }

    #[test]
    fn root_increasing_brackets() {
        let r = root_increasing(|x| x * x * x - 1000.0, 0.0, 1e-12).unwrap();
        assert!((r - 10.0).abs() < 1e-10);
    }

    #[test]
    fn int_u_exp_matches_quadrature() {
        for &beta in &[-3.0, -1e-9, 0.0, 1e-9, 0.7] {
            let exact = int_u_exp(beta, 0.2, 1.5);
            let q = integrate(|u| u * exp(beta * u), 0.2, 1.5, 1e-13, 50).unwrap();
            assert!((exact - q.value).abs() < 1e-9, "beta={beta}");
        }
    }
}
