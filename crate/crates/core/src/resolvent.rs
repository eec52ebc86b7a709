//! Resolvent densities `u^q` by Fourier inversion, hitting-time transforms
//! and the Wiener–Hopf residual for models with explicit ladder exponents.
//!
//! For a compound-Poisson model write `ψ = ψ_0 + c − c·φ` with
//! `ψ_0(λ) = −idλ + σ²λ²/2`, jump rate `c` and jump characteristic function
//! `φ`. With `B = q + c + ψ_0`,
//!
//! ```text
//! 1/(q+ψ) = 1/B + cφ/B² + c²φ²/(B²(q+ψ)).
//! ```
//!
//! The inverse transforms of `1/B` and `cφ/B²` are explicit, and only the
//! remainder is integrated numerically. With `σ² > 0` the first term alone
//! leaves an `O(λ⁻⁴)` remainder, so the second is not subtracted. In the
//! bounded-variation case `1/B` carries the whole discontinuity at `0`, which
//! keeps the numerical part smooth there.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, Complex};
use crate::model::{JumpLaw, JumpSpec, LevyModel};

/// Default absolute tolerance with a Gaussian part.
pub const TOL_GAUSSIAN: f64 = 1e-8;
/// Default absolute tolerance for bounded-variation models.
pub const TOL_BV: f64 = 1e-6;

const MAX_PANELS: usize = 200_000;

/// `u^q` on a set of points together with both one-sided limits at `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventGrid {
    pub q: f64,
    pub xs: Vec<f64>,
    pub u: Vec<f64>,
    pub u0_plus: f64,
    pub u0_minus: f64,
    pub lambda_max: f64,
    pub tolerance: f64,
}

/// Jump law with an orientation flag, so models with negative drift can be
/// handled by mirroring `x ↦ −x`.
#[derive(Clone, Copy)]
struct Oriented<'a> {
    law: &'a JumpLaw,
    flip: bool,
}

impl Oriented<'_> {
    /// `E g2(x − J)` for `g2(z) = (z/d²) e^{−kz} 1{z>0}`, `k = q'/d`.
    fn conv_g2(&self, x: f64, d: f64, k: f64) -> f64 {
        let s = if self.flip { -1.0 } else { 1.0 };
        let tail = |z0: f64, kk: f64| {
            // ∫_{z0}^∞ z e^{−kk z} dz
            math::exp(-kk * z0) * (z0 / kk + 1.0 / (kk * kk))
        };
        let v = match self.law {
            JumpLaw::Atoms { atoms } => atoms
                .iter()
                .map(|&(y, p)| {
                    let z = x - s * y;
                    if z > 0.0 {
                        p * z * math::exp(-k * z)
                    } else {
                        0.0
                    }
                })
                .sum::<f64>(),
            JumpLaw::TwoSidedExponential {
                p_up,
                rate_up,
                rate_down,
            } => {
                let (pu, tu, td) = if self.flip {
                    (1.0 - p_up, *rate_down, *rate_up)
                } else {
                    (*p_up, *rate_up, *rate_down)
                };
                pu * exp_up(x, k, tu) + (1.0 - pu) * exp_down(x, k, td, &tail)
            }
            JumpLaw::ExponentialNegative { rate } => {
                if self.flip {
                    exp_up(x, k, *rate)
                } else {
                    exp_down(x, k, *rate, &tail)
                }
            }
        };
        v / (d * d)
    }
}

/// `E[(x−E) e^{−k(x−E)}; E < x]` for `E ~ Exp(θ)`.
fn exp_up(x: f64, k: f64, theta: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    theta * math::exp(-theta * x) * math::int_u_exp(theta - k, 0.0, x)
}

/// `E[(x+E) e^{−k(x+E)}; x+E > 0]` for `E ~ Exp(θ)`.
fn exp_down(x: f64, k: f64, theta: f64, tail: &dyn Fn(f64, f64) -> f64) -> f64 {
    let z0 = x.max(0.0);
    theta * math::exp(theta * x) * tail(z0, k + theta)
}

/// Compound-Poisson decomposition of a model.
struct Parts<'a> {
    d: f64,
    sigma2: f64,
    c: f64,
    law: Option<&'a JumpLaw>,
}

fn parts(model: &LevyModel) -> Result<Parts<'_>> {
    match &model.jumps {
        JumpSpec::None => Ok(Parts {
            d: model.a,
            sigma2: model.sigma2,
            c: 0.0,
            law: None,
        }),
        JumpSpec::CompoundPoisson { rate, law } => Ok(Parts {
            d: model.simulated_drift(),
            sigma2: model.sigma2,
            c: *rate,
            law: Some(law),
        }),
        JumpSpec::TruncatedInfiniteActivity { .. } => {
            if model.simulated_sigma2() > 0.0 {
                Ok(Parts {
                    d: model.simulated_drift(),
                    sigma2: model.simulated_sigma2(),
                    c: model.jumps.rate(),
                    law: None,
                })
            } else {
                // no Gaussian decay and no explicit second term
                Err(Error::Quadrature {
                    tolerance: TOL_BV,
                    estimate: f64::INFINITY,
                })
            }
        }
    }
}

/// Inverse transform of `1/(q' + ψ_0)`; at `x = 0` in the bounded-variation
/// case the right limit is returned when `right` is set.
fn base_term(d: f64, sigma2: f64, qp: f64, x: f64, right: bool) -> f64 {
    if sigma2 > 0.0 {
        let r = math::sqrt(d * d + 2.0 * sigma2 * qp);
        return math::exp((d * x - x.abs() * r) / sigma2) / r;
    }
    let (xx, on) = if d > 0.0 {
        (x, x > 0.0 || (x == 0.0 && right))
    } else {
        (-x, x < 0.0 || (x == 0.0 && !right))
    };
    if on {
        math::exp(-qp * xx / d.abs()) / d.abs()
    } else {
        0.0
    }
}

fn resolvent_inner(model: &LevyModel, q: f64, x: f64, right: bool, tol: f64) -> Result<(f64, f64)> {
    if !(q > 0.0) {
        return Err(Error::Precondition("q must be positive"));
    }
    let p = parts(model)?;
    if p.sigma2 == 0.0 && p.d == 0.0 {
        return Err(Error::Quadrature {
            tolerance: tol,
            estimate: f64::INFINITY,
        });
    }
    let qp = q + p.c;
    let mut value = base_term(p.d, p.sigma2, qp, x, right);
    if p.c == 0.0 {
        return Ok((value, 0.0));
    }
    let bv = p.sigma2 == 0.0;
    if bv {
        let law = p.law.ok_or(Error::Quadrature {
            tolerance: tol,
            estimate: f64::INFINITY,
        })?;
        let o = Oriented {
            law,
            flip: p.d < 0.0,
        };
        let xx = if p.d < 0.0 { -x } else { x };
        let ad = p.d.abs();
        value += p.c * o.conv_g2(xx, ad, qp / ad);
    }
    let c = p.c;
    let d = p.d;
    let s2 = p.sigma2;
    let lambda_max = if bv {
        (2.0 * c / d.abs()).max(math::sqrt(2.0 * c * c / (core::f64::consts::PI * (d.abs() * d.abs() * d.abs()) * tol)))
    } else {
        math::powf(8.0 * c / (3.0 * core::f64::consts::PI * s2 * s2 * tol), 1.0 / 3.0)
    };
    let remainder = |lam: f64| -> f64 {
        let psi = model.char_exponent(lam);
        let qpsi = Complex::new(q, 0.0) + psi;
        let b = Complex::new(qp + 0.5 * s2 * lam * lam, -d * lam);
        // cφ = B − (q + ψ)
        let cphi = b - qpsi;
        let r = if bv {
            cphi * cphi / (b * b * qpsi)
        } else {
            cphi / (b * qpsi)
        };
        (math::cis(-lam * x) * r).re
    };
    // panels of about a quarter period of the fastest oscillation
    let freq = x.abs() + jump_extent(model) + 1.0;
    let initial = ((lambda_max * freq / 1.5) as usize).clamp(8, MAX_PANELS / 4);
    let quad = math::integrate_panels(remainder, 0.0, lambda_max, initial, tol / 2.0, MAX_PANELS)?;
    value += quad.value / core::f64::consts::PI;
    Ok((value, lambda_max))
}

fn jump_extent(model: &LevyModel) -> f64 {
    match &model.jumps {
        JumpSpec::CompoundPoisson {
            law: JumpLaw::Atoms { atoms },
            ..
        } => atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max),
        _ => 0.0,
    }
}

fn default_tol(model: &LevyModel) -> f64 {
    if model.simulated_sigma2() > 0.0 {
        TOL_GAUSSIAN
    } else {
        TOL_BV
    }
}

/// `u^q(x)`; for bounded-variation models the value at `0` is `u^q(0+)`.
pub fn resolvent_density(model: &LevyModel, q: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return u0_plus(model, q);
    }
    Ok(resolvent_inner(model, q, x, true, default_tol(model))?.0)
}

/// `u^q(0+)`. With a Gaussian part `u^q` is continuous; otherwise the right
/// limit is extrapolated (Richardson) from `x = 2^{−j}`.
pub fn u0_plus(model: &LevyModel, q: f64) -> Result<f64> {
    one_sided_zero(model, q, 1.0)
}

/// `u^q(0−)`, which differs from `u^q(0+)` for bounded-variation models.
pub fn u0_minus(model: &LevyModel, q: f64) -> Result<f64> {
    one_sided_zero(model, q, -1.0)
}

fn one_sided_zero(model: &LevyModel, q: f64, side: f64) -> Result<f64> {
    let tol = default_tol(model);
    if model.simulated_sigma2() > 0.0 {
        return Ok(resolvent_inner(model, q, 0.0, true, tol)?.0);
    }
    // u is smooth on each side of 0 near 0; extrapolate linearly twice
    let h0 = math::powf(2.0, -12.0) / (jump_extent(model) + 1.0);
    let f = |h: f64| resolvent_inner(model, q, side * h, side > 0.0, tol).map(|r| r.0);
    let (a, b, c) = (f(h0)?, f(h0 / 2.0)?, f(h0 / 4.0)?);
    let r1 = 2.0 * b - a;
    let r2 = 2.0 * c - b;
    Ok((4.0 * r2 - r1) / 3.0)
}

/// `u^q` on a grid of points.
pub fn resolvent_grid(model: &LevyModel, q: f64, xs: &[f64]) -> Result<ResolventGrid> {
    let tol = default_tol(model);
    let mut u = Vec::with_capacity(xs.len());
    let mut lambda_max: f64 = 0.0;
    for &x in xs {
        if x == 0.0 {
            u.push(u0_plus(model, q)?);
        } else {
            let (v, l) = resolvent_inner(model, q, x, true, tol)?;
            lambda_max = lambda_max.max(l);
            u.push(v);
        }
    }
    Ok(ResolventGrid {
        q,
        xs: xs.to_vec(),
        u,
        u0_plus: u0_plus(model, q)?,
        u0_minus: u0_minus(model, q)?,
        lambda_max,
        tolerance: tol,
    })
}

/// `E(e^{−qT_{x}}; T_{x} < ∞) = u^q(x)/u^q(0+)`, clamped to `[0, 1]`.
pub fn hitting_transform(model: &LevyModel, q: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let u0 = u0_plus(model, q)?;
    let ux = resolvent_inner(model, q, x, true, default_tol(model))?.0;
    Ok((ux / u0).clamp(0.0, 1.0))
}

/// Hitting transforms at several points sharing one `u^q(0+)`.
pub fn hitting_transforms(model: &LevyModel, q: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let u0 = u0_plus(model, q)?;
    let tol = default_tol(model);
    xs.iter()
        .map(|&x| {
            if x == 0.0 {
                Ok(1.0)
            } else {
                Ok((resolvent_inner(model, q, x, true, tol)?.0 / u0).clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// `P(T_{x} < ∞)`.
///
/// Explicit for Brownian motion with drift and for recurrent models;
/// otherwise the limit `q → 0+` of the hitting transform is extrapolated
/// along `q = 2^{−j}`, using that it is monotone in `q`.
pub fn hit_probability(model: &LevyModel, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    if matches!(model.jumps, JumpSpec::None) && model.sigma2 > 0.0 {
        let mu = model.a;
        // hitting x is certain unless the drift points away from x
        return Ok(if mu * x >= 0.0 {
            1.0
        } else {
            math::exp(-2.0 * mu.abs() * x.abs() / model.sigma2)
        });
    }
    if matches!(model.long_run(), crate::model::LongRun::Oscillates) {
        return Ok(1.0);
    }
    let qs = [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0];
    let h: Vec<f64> = qs
        .iter()
        .map(|&q| hitting_transform(model, q, x))
        .collect::<Result<_>>()?;
    let r1 = 2.0 * h[1] - h[0];
    let r2 = 2.0 * h[2] - h[1];
    let est = (4.0 * r2 - r1) / 3.0;
    Ok(est.clamp(h[2], 1.0))
}

/// Closed-form ladder exponents `k(q, −iλ)`, `k̂(q, iλ)` and their values at
/// `λ = 0`, when available.
fn ladder_pair(model: &LevyModel, q: f64, lam: f64) -> Result<(Complex, Complex, f64)> {
    let i = Complex::new(0.0, 1.0);
    if matches!(model.jumps, JumpSpec::None) && model.sigma2 > 0.0 {
        let (mu, s2) = (model.a, model.sigma2);
        let r = math::sqrt(mu * mu + 2.0 * s2 * q);
        let up = (r - mu) / s2;
        let down = (r + mu) / s2;
        let k = Complex::new(up, 0.0) - i * lam;
        let kh = Complex::new(down, 0.0) + i * lam;
        return Ok((k, kh, up * down));
    }
    if model.is_spectrally_negative() && !model.is_experimental() {
        let phi = model
            .closed_form_rho(q)?
            .ok_or(Error::NoClosedForm)?;
        let k = Complex::new(phi, 0.0) - i * lam;
        let kh = (Complex::new(q, 0.0) + model.char_exponent(lam)) / (Complex::new(phi, 0.0) - i * lam);
        return Ok((k, kh, q));
    }
    Err(Error::NoClosedForm)
}

/// `|k(q,0)k̂(q,0) / (k(q,−iλ)k̂(q,iλ)) − q/(q+ψ(λ))|`.
pub fn wiener_hopf_residual(model: &LevyModel, q: f64, lam: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::Precondition("q must be positive"));
    }
    let (k, kh, k0) = ladder_pair(model, q, lam)?;
    let lhs = Complex::new(k0, 0.0) / (k * kh);
    let rhs = Complex::new(q, 0.0) / (Complex::new(q, 0.0) + model.char_exponent(lam));
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn jd() -> LevyModel {
        LevyModel::jump_diffusion(
            0.0,
            1.0,
            1.0,
            JumpLaw::TwoSidedExponential {
                p_up: 0.5,
                rate_up: 2.0,
                rate_down: 2.0,
            },
        )
        .unwrap()
    }

    /// Direct inversion without subtraction, for moderate accuracy.
    fn brute(model: &LevyModel, q: f64, x: f64, lmax: f64) -> f64 {
        let f = |lam: f64| {
            let r = Complex::new(1.0, 0.0) / (Complex::new(q, 0.0) + model.char_exponent(lam));
            (math::cis(-lam * x) * r).re
        };
        let v = math::integrate_panels(f, 0.0, lmax, 4000, 1e-9, 400_000).unwrap().value;
        // tail of 2/(σ²λ²) with σ² = 1 at the origin
        let tail = if x == 0.0 && model.sigma2 > 0.0 { 2.0 / lmax } else { 0.0 };
        (v + tail) / core::f64::consts::PI
    }

    #[test]
    fn brownian_closed_form() {
        let bm = LevyModel::brownian(0.0, 1.0).unwrap();
        assert!((resolvent_density(&bm, 0.5, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let v = resolvent_density(&bm, 1.0, 0.7).unwrap();
        let exact = math::exp(-0.7 * math::sqrt(2.0)) / math::sqrt(2.0);
        assert!((v - exact).abs() < 1e-12);
        let h = hitting_transform(&bm, 1.0, 1.0).unwrap();
        assert!((h - math::exp(-math::sqrt(2.0))).abs() < 1e-12);
    }

    #[test]
    fn jump_diffusion_matches_brute_force_and_is_symmetric() {
        let m = jd();
        for &x in &[-1.3, -0.2, 0.0, 0.4, 2.0] {
            let a = resolvent_density(&m, 1.0, x).unwrap();
            let b = brute(&m, 1.0, x, 3000.0);
            assert!((a - b).abs() < 1e-5, "x={x}: {a} vs {b}");
            let c = resolvent_density(&m, 1.0, -x).unwrap();
            assert!((a - c).abs() < 1e-7);
        }
    }

    #[test]
    fn bv_limits_differ_by_inverse_drift() {
        // jump at 0: u(0+) − u(0−) = 1/b
        let m = LevyModel::bounded_variation(2.0, 1.0, JumpLaw::ExponentialNegative { rate: 1.0 })
            .unwrap();
        let up = u0_plus(&m, 1.0).unwrap();
        let dn = u0_minus(&m, 1.0).unwrap();
        assert!((up - dn - 0.5).abs() < 1e-5, "{up} {dn}");
        // total mass of U^q is 1/q
        let h = 0.05;
        let xs: Vec<f64> = (-300..800).map(|k| (k as f64 + 0.5) * h).collect();
        let grid = resolvent_grid(&m, 1.0, &xs).unwrap();
        let mass: f64 = grid.u.iter().sum::<f64>() * h;
        assert!((mass - 1.0).abs() < 0.01, "{mass}");
    }

    #[test]
    fn bv_atoms_against_brute_force() {
        let m = LevyModel::bounded_variation(1.0, 1.0, JumpLaw::atoms(vec![(0.5, 0.5), (-1.0, 0.5)]))
            .unwrap();
        for &x in &[-0.7, 0.3, 1.1] {
            let a = resolvent_density(&m, 1.0, x).unwrap();
            let b = brute(&m, 1.0, x, 20_000.0);
            assert!((a - b).abs() < 2e-3, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn hitting_probability_brownian_drift() {
        let m = LevyModel::brownian(1.0, 1.0).unwrap();
        assert!((hit_probability(&m, -0.5).unwrap() - math::exp(-1.0)).abs() < 1e-15);
        assert_eq!(hit_probability(&m, 0.5).unwrap(), 1.0);
        // the q → 0 extrapolation agrees with the closed form
        let qs = [2f64.powi(-6), 2f64.powi(-7), 2f64.powi(-8)];
        let h: Vec<f64> = qs.iter().map(|&q| hitting_transform(&m, q, -0.5).unwrap()).collect();
        let r = (4.0 * (2.0 * h[2] - h[1]) - (2.0 * h[1] - h[0])) / 3.0;
        assert!((r - math::exp(-1.0)).abs() < 1e-3, "{r}");
    }

    #[test]
    fn wiener_hopf_residuals() {
        for m in [
            LevyModel::brownian(0.0, 1.0).unwrap(),
            LevyModel::brownian(0.7, 2.0).unwrap(),
            LevyModel::brownian(-1.0, 1.0).unwrap(),
        ] {
            for &q in &[0.5, 1.0, 2.0] {
                for &l in &[0.0, 1.0, 2.0, 5.0] {
                    assert!(wiener_hopf_residual(&m, q, l).unwrap() < 1e-10);
                }
            }
        }
        assert_eq!(
            wiener_hopf_residual(&LevyModel::brownian(0.0, 1.0).unwrap(), 1.0, 0.0).unwrap(),
            0.0
        );
        assert_eq!(wiener_hopf_residual(&jd(), 1.0, 1.0), Err(Error::NoClosedForm));
    }
}
