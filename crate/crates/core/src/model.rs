//! Catalog of Lévy models in Lévy–Khintchine form.
//!
//! A model is the triplet `(a, σ², Π)` with
//!
//! ```text
//! ψ(λ) = −iaλ + σ²λ²/2 + ∫ (1 − e^{iλy} + iλy·1{|y|≤1}) Π(dy),   E e^{iλX_t} = e^{−tψ(λ)}.
//! ```
//!
//! `Π` is either empty, compound Poisson with a parametric jump law, or an
//! ε-truncated tempered-stable measure. The last family is experimental: it
//! exists to exercise the zero-Gaussian unbounded-variation regime, for which
//! no existence criterion is implemented.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, cis, Complex};
use crate::rng::{self, PathRng};

/// Law of a single compound-Poisson jump.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "law", rename_all = "snake_case"))]
pub enum JumpLaw {
    /// Finitely many sizes `(size, probability)`.
    Atoms { atoms: Vec<(f64, f64)> },
    /// Size `+Exp(rate_up)` with probability `p_up`, else `−Exp(rate_down)`.
    TwoSidedExponential {
        p_up: f64,
        rate_up: f64,
        rate_down: f64,
    },
    /// Size `−Exp(rate)`.
    ExponentialNegative { rate: f64 },
}

impl JumpLaw {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Self {
        JumpLaw::Atoms { atoms }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            JumpLaw::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(Error::Model("empty atom list".into()));
                }
                let mut total = 0.0;
                for &(size, p) in atoms {
                    if size == 0.0 || !size.is_finite() {
                        return Err(Error::Model("atom sizes must be finite and non-zero".into()));
                    }
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::Model("atom probabilities must lie in [0, 1]".into()));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::Model("atom probabilities must sum to 1".into()));
                }
            }
            JumpLaw::TwoSidedExponential {
                p_up,
                rate_up,
                rate_down,
            } => {
                if !(0.0..=1.0).contains(p_up) {
                    return Err(Error::Model("p_up must lie in [0, 1]".into()));
                }
                if !(*rate_up > 0.0 && *rate_down > 0.0) {
                    return Err(Error::Model("exponential rates must be positive".into()));
                }
            }
            JumpLaw::ExponentialNegative { rate } => {
                if !(*rate > 0.0) {
                    return Err(Error::Model("exponential rate must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// `E e^{iλJ}`.
    pub fn char_fn(&self, lam: f64) -> Complex {
        match self {
            JumpLaw::Atoms { atoms } => atoms
                .iter()
                .map(|&(y, p)| cis(lam * y) * p)
                .fold(Complex::new(0.0, 0.0), |a, b| a + b),
            JumpLaw::TwoSidedExponential {
                p_up,
                rate_up,
                rate_down,
            } => {
                let up = Complex::new(*rate_up, 0.0) / Complex::new(*rate_up, -lam);
                let down = Complex::new(*rate_down, 0.0) / Complex::new(*rate_down, lam);
                up * *p_up + down * (1.0 - p_up)
            }
            JumpLaw::ExponentialNegative { rate } => {
                Complex::new(*rate, 0.0) / Complex::new(*rate, lam)
            }
        }
    }

    /// `E[J; |J| ≤ 1]`, the compensator of the Lévy–Khintchine truncation.
    pub fn truncated_mean(&self) -> f64 {
        let exp_part = |theta: f64| (1.0 - math::exp(-theta) * (1.0 + theta)) / theta;
        match self {
            JumpLaw::Atoms { atoms } => atoms
                .iter()
                .filter(|(y, _)| y.abs() <= 1.0)
                .map(|&(y, p)| y * p)
                .sum(),
            JumpLaw::TwoSidedExponential {
                p_up,
                rate_up,
                rate_down,
            } => p_up * exp_part(*rate_up) - (1.0 - p_up) * exp_part(*rate_down),
            JumpLaw::ExponentialNegative { rate } => -exp_part(*rate),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            JumpLaw::Atoms { atoms } => atoms.iter().map(|&(y, p)| y * p).sum(),
            JumpLaw::TwoSidedExponential {
                p_up,
                rate_up,
                rate_down,
            } => p_up / rate_up - (1.0 - p_up) / rate_down,
            JumpLaw::ExponentialNegative { rate } => -1.0 / rate,
        }
    }

    /// Probability that a jump is strictly positive.
    pub fn prob_up(&self) -> f64 {
        match self {
            JumpLaw::Atoms { atoms } => atoms.iter().filter(|a| a.0 > 0.0).map(|a| a.1).sum(),
            JumpLaw::TwoSidedExponential { p_up, .. } => *p_up,
            JumpLaw::ExponentialNegative { .. } => 0.0,
        }
    }

    /// `E e^{βJ}` for real `β` where finite, `+∞` otherwise.
    pub fn mgf(&self, beta: f64) -> f64 {
        match self {
            JumpLaw::Atoms { atoms } => atoms.iter().map(|&(y, p)| p * math::exp(beta * y)).sum(),
            JumpLaw::TwoSidedExponential {
                p_up,
                rate_up,
                rate_down,
            } => {
                let up = if *p_up == 0.0 {
                    0.0
                } else if beta < *rate_up {
                    p_up * rate_up / (rate_up - beta)
                } else {
                    f64::INFINITY
                };
                let down = if *p_up == 1.0 {
                    0.0
                } else if beta > -rate_down {
                    (1.0 - p_up) * rate_down / (rate_down + beta)
                } else {
                    f64::INFINITY
                };
                up + down
            }
            JumpLaw::ExponentialNegative { rate } => {
                if beta > -rate {
                    rate / (rate + beta)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn sample(&self, rng: &mut PathRng) -> f64 {
        match self {
            JumpLaw::Atoms { atoms } => {
                let u = rng::uniform(rng);
                let mut acc = 0.0;
                for &(y, p) in atoms {
                    acc += p;
                    if u < acc {
                        return y;
                    }
                }
                atoms[atoms.len() - 1].0
            }
            JumpLaw::TwoSidedExponential {
                p_up,
                rate_up,
                rate_down,
            } => {
                let up = rng::uniform(rng) < *p_up;
                let e = rng::exp1(rng);
                if up {
                    e / rate_up
                } else {
                    -e / rate_down
                }
            }
            JumpLaw::ExponentialNegative { rate } => -rng::exp1(rng) / rate,
        }
    }
}

/// Tempered-stable Lévy density `c± e^{−g±|y|} |y|^{−1−α}` on each half line.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemperedStable {
    pub alpha: f64,
    pub c_up: f64,
    pub c_down: f64,
    pub g_up: f64,
    pub g_down: f64,
}

/// Precomputed integrals of an ε-truncated tempered-stable measure.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Truncation {
    pub rate_up: f64,
    pub rate_down: f64,
    /// `∫_{|y|<ε} y² Π(dy)`.
    pub small_variance: f64,
    /// `∫_{ε<|y|≤1} y Π(dy)`.
    pub truncated_mean: f64,
    /// `∫_{0<|y|≤ε} y Π(dy)`, infinite when `α ≥ 1`.
    pub small_mean: f64,
    /// `∫_{|y|>ε} y Π(dy)`.
    pub large_mean: f64,
}

const TS_TAIL: f64 = 60.0;

impl TemperedStable {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::Model("tempered-stable alpha must lie in (0, 2)".into()));
        }
        if self.c_up < 0.0 || self.c_down < 0.0 || self.c_up + self.c_down == 0.0 {
            return Err(Error::Model("tempered-stable scales must be non-negative and not both 0".into()));
        }
        if !(self.g_up > 0.0 && self.g_down > 0.0) {
            return Err(Error::Model("tempering rates must be positive".into()));
        }
        Ok(())
    }

    /// `∫_lo^hi y^k e^{−g y} y^{−1−α} dy` by quadrature in `log y`.
    fn moment(&self, g: f64, k: f64, lo: f64, hi: f64) -> Result<f64> {
        if hi <= lo {
            return Ok(0.0);
        }
        let a = self.alpha;
        let q = math::integrate(
            |u| {
                let y = math::exp(u);
                math::exp((k - a) * u - g * y)
            },
            math::ln(lo),
            math::ln(hi),
            1e-13,
            4000,
        )?;
        Ok(q.value)
    }

    fn truncation(&self, eps: f64) -> Result<Truncation> {
        let tiny = eps * 1e-18;
        let far = |g: f64| eps.max(1.0) + TS_TAIL / g;
        let side = |c: f64, g: f64| -> Result<(f64, f64, f64, f64, f64)> {
            if c == 0.0 {
                return Ok((0.0, 0.0, 0.0, 0.0, 0.0));
            }
            let rate = c * self.moment(g, 0.0, eps, far(g))?;
            let var = c * self.moment(g, 2.0, tiny, eps)?;
            let tmean = if eps < 1.0 {
                c * self.moment(g, 1.0, eps, 1.0)?
            } else {
                0.0
            };
            let small = if self.alpha < 1.0 {
                c * self.moment(g, 1.0, tiny, eps)?
            } else {
                f64::INFINITY
            };
            let large = c * self.moment(g, 1.0, eps, far(g))?;
            Ok((rate, var, tmean, small, large))
        };
        let up = side(self.c_up, self.g_up)?;
        let down = side(self.c_down, self.g_down)?;
        Ok(Truncation {
            rate_up: up.0,
            rate_down: down.0,
            small_variance: up.1 + down.1,
            truncated_mean: up.2 - down.2,
            small_mean: up.3 - down.3,
            large_mean: up.4 - down.4,
        })
    }

    /// `∫_{|y|>ε} e^{iλy} Π(dy)`.
    pub(crate) fn large_jump_transform(&self, eps: f64, lam: f64) -> Result<Complex> {
        let a = self.alpha;
        let mut total = Complex::new(0.0, 0.0);
        for (c, g, sign) in [(self.c_up, self.g_up, 1.0), (self.c_down, self.g_down, -1.0)] {
            if c == 0.0 {
                continue;
            }
            let hi = eps.max(1.0) + TS_TAIL / g;
            let panels = 20_000;
            let re = math::integrate(
                |y| math::cos(sign * lam * y) * math::exp(-g * y) * math::powf(y, -1.0 - a),
                eps,
                hi,
                1e-11,
                panels,
            )?;
            let im = math::integrate(
                |y| math::sin(sign * lam * y) * math::exp(-g * y) * math::powf(y, -1.0 - a),
                eps,
                hi,
                1e-11,
                panels,
            )?;
            total += Complex::new(re.value, im.value) * c;
        }
        Ok(total)
    }

    fn sample_size(&self, eps: f64, up: bool, rng: &mut PathRng) -> f64 {
        let g = if up { self.g_up } else { self.g_down };
        loop {
            let u = rng::uniform(rng);
            let y = eps * math::powf(u, -1.0 / self.alpha);
            if rng::uniform(rng) < math::exp(-g * (y - eps)) {
                return if up { y } else { -y };
            }
        }
    }
}

/// Jump part `Π` of a model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum JumpSpec {
    None,
    CompoundPoisson { rate: f64, law: JumpLaw },
    /// Experimental. Jumps with `|y| ≤ ε` are removed; with `compensate` their
    /// variance is added to the Gaussian coefficient of the simulated process.
    TruncatedInfiniteActivity {
        density: TemperedStable,
        epsilon: f64,
        compensate: bool,
        truncation: Truncation,
    },
}

impl JumpSpec {
    pub fn compound_poisson(rate: f64, law: JumpLaw) -> Self {
        JumpSpec::CompoundPoisson { rate, law }
    }

    pub fn truncated(density: TemperedStable, epsilon: f64, compensate: bool) -> Result<Self> {
        density.validate()?;
        if !(epsilon > 0.0) {
            return Err(Error::Model("truncation level must be positive".into()));
        }
        let truncation = density.truncation(epsilon)?;
        Ok(JumpSpec::TruncatedInfiniteActivity {
            density,
            epsilon,
            compensate,
            truncation,
        })
    }

    /// Total rate of simulated jumps.
    pub fn rate(&self) -> f64 {
        match self {
            JumpSpec::None => 0.0,
            JumpSpec::CompoundPoisson { rate, .. } => *rate,
            JumpSpec::TruncatedInfiniteActivity { truncation, .. } => {
                truncation.rate_up + truncation.rate_down
            }
        }
    }

    /// Rate of strictly positive jumps, `Π((0, ∞))` of the simulated measure.
    pub fn rate_up(&self) -> f64 {
        match self {
            JumpSpec::None => 0.0,
            JumpSpec::CompoundPoisson { rate, law } => rate * law.prob_up(),
            JumpSpec::TruncatedInfiniteActivity { truncation, .. } => truncation.rate_up,
        }
    }

    pub fn rate_down(&self) -> f64 {
        self.rate() - self.rate_up()
    }

    /// Samples one jump size.
    pub fn sample_size(&self, rng: &mut PathRng) -> f64 {
        match self {
            JumpSpec::None => 0.0,
            JumpSpec::CompoundPoisson { law, .. } => law.sample(rng),
            JumpSpec::TruncatedInfiniteActivity {
                density,
                epsilon,
                truncation,
                ..
            } => {
                let total = truncation.rate_up + truncation.rate_down;
                let up = rng::uniform(rng) * total < truncation.rate_up;
                density.sample_size(*epsilon, up, rng)
            }
        }
    }
}

/// Answer of [`LevyModel::existence_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Existence {
    Exists,
    ExistsPartialOnly,
    NotExists,
    Unknown,
}

/// Long-run behaviour, decided from the sign of `E X_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LongRun {
    DriftsUp,
    DriftsDown,
    Oscillates,
}

/// Lévy–Khintchine triplet `(a, σ², Π)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevyModel {
    pub a: f64,
    pub sigma2: f64,
    pub jumps: JumpSpec,
}

impl LevyModel {
    pub fn new(a: f64, sigma2: f64, jumps: JumpSpec) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::Model("linear coefficient must be finite".into()));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::Model("Gaussian coefficient must be finite and ≥ 0".into()));
        }
        match &jumps {
            JumpSpec::None => {}
            JumpSpec::CompoundPoisson { rate, law } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::Model("compound Poisson rate must be positive".into()));
                }
                law.validate()?;
            }
            JumpSpec::TruncatedInfiniteActivity { density, epsilon, .. } => {
                density.validate()?;
                if !(*epsilon > 0.0) {
                    return Err(Error::Model("truncation level must be positive".into()));
                }
            }
        }
        Ok(LevyModel { a, sigma2, jumps })
    }

    /// Brownian motion with drift `mu` and variance `sigma2` per unit time.
    pub fn brownian(mu: f64, sigma2: f64) -> Result<Self> {
        Self::new(mu, sigma2, JumpSpec::None)
    }

    pub fn pure_drift(b: f64) -> Result<Self> {
        Self::new(b, 0.0, JumpSpec::None)
    }

    /// Bounded-variation model `X_t = b t + (compound Poisson)`.
    pub fn bounded_variation(b: f64, rate: f64, law: JumpLaw) -> Result<Self> {
        let a = b + rate * law.truncated_mean();
        Self::new(a, 0.0, JumpSpec::compound_poisson(rate, law))
    }

    /// Gaussian part plus compound Poisson jumps, with `mu = E X_1`.
    pub fn jump_diffusion(mu: f64, sigma2: f64, rate: f64, law: JumpLaw) -> Result<Self> {
        let a = mu - rate * (law.mean() - law.truncated_mean());
        Self::new(a, sigma2, JumpSpec::compound_poisson(rate, law))
    }

    pub fn is_experimental(&self) -> bool {
        matches!(self.jumps, JumpSpec::TruncatedInfiniteActivity { .. })
    }

    /// Gaussian coefficient of the simulated process (includes the
    /// small-jump compensation of the experimental family).
    pub fn simulated_sigma2(&self) -> f64 {
        match &self.jumps {
            JumpSpec::TruncatedInfiniteActivity {
                compensate: true,
                truncation,
                ..
            } => self.sigma2 + truncation.small_variance,
            _ => self.sigma2,
        }
    }

    /// Drift of the simulated process between jumps:
    /// `a − ∫_{|y|≤1} y Π_sim(dy)`.
    pub fn simulated_drift(&self) -> f64 {
        match &self.jumps {
            JumpSpec::None => self.a,
            JumpSpec::CompoundPoisson { rate, law } => self.a - rate * law.truncated_mean(),
            JumpSpec::TruncatedInfiniteActivity { truncation, .. } => {
                self.a - truncation.truncated_mean
            }
        }
    }

    /// `σ² = 0` and `∫(1 ∧ |y|) Π(dy) < ∞`.
    pub fn is_bounded_variation(&self) -> bool {
        if self.sigma2 > 0.0 {
            return false;
        }
        match &self.jumps {
            JumpSpec::None | JumpSpec::CompoundPoisson { .. } => true,
            JumpSpec::TruncatedInfiniteActivity { density, .. } => density.alpha < 1.0,
        }
    }

    pub fn has_positive_jumps(&self) -> bool {
        self.jumps.rate_up() > 0.0
    }

    pub fn has_negative_jumps(&self) -> bool {
        self.jumps.rate_down() > 0.0
    }

    pub fn is_spectrally_negative(&self) -> bool {
        !self.has_positive_jumps()
    }

    /// `E X_1 = a + ∫_{|y|>1} y Π(dy)`.
    pub fn mean(&self) -> f64 {
        match &self.jumps {
            JumpSpec::None => self.a,
            JumpSpec::CompoundPoisson { rate, law } => {
                self.a + rate * (law.mean() - law.truncated_mean())
            }
            JumpSpec::TruncatedInfiniteActivity { truncation, .. } => {
                self.a + truncation.large_mean - truncation.truncated_mean
            }
        }
    }

    pub fn long_run(&self) -> LongRun {
        let m = self.mean();
        let scale = self.a.abs().max(1.0);
        if m.abs() <= 1e-12 * scale {
            LongRun::Oscillates
        } else if m > 0.0 {
            LongRun::DriftsUp
        } else {
            LongRun::DriftsDown
        }
    }

    /// Characteristic exponent `ψ(λ)`.
    pub fn char_exponent(&self, lam: f64) -> Complex {
        let i = Complex::new(0.0, 1.0);
        let gauss = Complex::new(0.5 * self.simulated_sigma2() * lam * lam, -self.a * lam);
        match &self.jumps {
            JumpSpec::None => gauss,
            JumpSpec::CompoundPoisson { rate, law } => {
                let jump = (Complex::new(1.0, 0.0) - law.char_fn(lam)) * *rate
                    + i * (lam * rate * law.truncated_mean());
                gauss + jump
            }
            JumpSpec::TruncatedInfiniteActivity {
                density,
                epsilon,
                truncation,
                ..
            } => {
                // quadrature failures only occur for absurd λ; fall back to the
                // bound-respecting rate term
                let big = density
                    .large_jump_transform(*epsilon, lam)
                    .unwrap_or(Complex::new(0.0, 0.0));
                let total = truncation.rate_up + truncation.rate_down;
                gauss + Complex::new(total, 0.0) - big + i * (lam * truncation.truncated_mean)
            }
        }
    }

    /// Drift `b = a − ∫_{|y|≤1} y Π(dy)` of a bounded-variation model.
    pub fn bv_drift(&self) -> Result<f64> {
        if !self.is_bounded_variation() {
            return Err(Error::NotBoundedVariation);
        }
        Ok(match &self.jumps {
            JumpSpec::None => self.a,
            JumpSpec::CompoundPoisson { rate, law } => self.a - rate * law.truncated_mean(),
            JumpSpec::TruncatedInfiniteActivity { truncation, .. } => {
                self.a - truncation.truncated_mean - truncation.small_mean
            }
        })
    }

    /// Whether a (partial) right inverse exists.
    ///
    /// Positive Gaussian part, or bounded variation with `b > 0`, give a
    /// partial right inverse. It is full when the process is recurrent, or
    /// drifts to `+∞` without positive jumps. The zero-Gaussian unbounded
    /// variation case is not decided.
    pub fn existence_check(&self) -> Existence {
        let local = if self.sigma2 > 0.0 {
            true
        } else if self.is_bounded_variation() {
            match self.bv_drift() {
                Ok(b) => b > 0.0,
                Err(_) => false,
            }
        } else {
            return Existence::Unknown;
        };
        if !local {
            return Existence::NotExists;
        }
        match self.long_run() {
            LongRun::Oscillates => Existence::Exists,
            LongRun::DriftsUp if !self.has_positive_jumps() => Existence::Exists,
            _ => Existence::ExistsPartialOnly,
        }
    }

    /// Laplace exponent `log E e^{βX_1}` for real `β` (finite when the jump
    /// law has the exponential moment).
    pub fn laplace_exponent(&self, beta: f64) -> f64 {
        let base = self.a * beta + 0.5 * self.sigma2 * beta * beta;
        match &self.jumps {
            JumpSpec::None => base,
            JumpSpec::CompoundPoisson { rate, law } => {
                base + rate * (law.mgf(beta) - 1.0 - beta * law.truncated_mean())
            }
            JumpSpec::TruncatedInfiniteActivity { .. } => f64::NAN,
        }
    }

    /// Closed-form Laplace exponent `ρ(q)` of the minimal right inverse,
    /// when one is available.
    ///
    /// Brownian motion with drift and pure drift use explicit formulas;
    /// other spectrally negative compound-Poisson models solve
    /// `log E e^{ΦX_1} = q` for its largest root `Φ(q)` by bracketing.
    pub fn closed_form_rho(&self, q: f64) -> Result<Option<f64>> {
        if !(q > 0.0) {
            return Err(Error::Precondition("q must be positive"));
        }
        if self.is_experimental() {
            return Ok(None);
        }
        if matches!(self.jumps, JumpSpec::None) {
            if self.sigma2 > 0.0 {
                let mu = self.a;
                let s2 = self.sigma2;
                return Ok(Some((math::sqrt(mu * mu + 2.0 * s2 * q) - mu) / s2));
            }
            if self.a > 0.0 {
                return Ok(Some(q / self.a));
            }
            return Err(Error::RootFindFailure("pure drift must be positive"));
        }
        if !self.is_spectrally_negative() {
            return Ok(None);
        }
        if self.is_bounded_variation() && self.bv_drift()? <= 0.0 {
            return Err(Error::RootFindFailure("bounded-variation drift must be positive"));
        }
        math::root_increasing(|b| self.laplace_exponent(b) - q, 0.0, 1e-14).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn psi_of_brownian_and_at_zero() {
        let bm = LevyModel::brownian(0.0, 1.0).unwrap();
        assert!(close(bm.char_exponent(2.0), Complex::new(2.0, 0.0), 1e-15));
        let jd = LevyModel::jump_diffusion(
            0.3,
            1.0,
            2.0,
            JumpLaw::TwoSidedExponential {
                p_up: 0.4,
                rate_up: 2.0,
                rate_down: 3.0,
            },
        )
        .unwrap();
        assert!(jd.char_exponent(0.0).norm() < 1e-15);
    }

    #[test]
    fn psi_bounded_variation_atom() {
        // b = 1 with a unit negative atom at rate 1: ψ(π) = (1 − e^{−iπ}) − iπ
        let m = LevyModel::bounded_variation(1.0, 1.0, JumpLaw::atoms(vec![(-1.0, 1.0)])).unwrap();
        let psi = m.char_exponent(PI);
        assert!(close(psi, Complex::new(2.0, -PI), 1e-12), "{psi}");
    }

    #[test]
    fn bv_drift_examples() {
        let m = LevyModel::new(
            2.0,
            0.0,
            JumpSpec::compound_poisson(1.0, JumpLaw::atoms(vec![(-1.0, 1.0)])),
        )
        .unwrap();
        assert_eq!(m.bv_drift().unwrap(), 3.0);
        assert_eq!(LevyModel::pure_drift(1.0).unwrap().bv_drift().unwrap(), 1.0);
        let m = LevyModel::new(
            0.0,
            0.0,
            JumpSpec::compound_poisson(2.0, JumpLaw::atoms(vec![(0.5, 1.0)])),
        )
        .unwrap();
        assert_eq!(m.bv_drift().unwrap(), -1.0);
        assert_eq!(
            LevyModel::brownian(0.0, 1.0).unwrap().bv_drift(),
            Err(Error::NotBoundedVariation)
        );
    }

    #[test]
    fn existence_examples() {
        assert_eq!(
            LevyModel::brownian(0.0, 1.0).unwrap().existence_check(),
            Existence::Exists
        );
        assert_eq!(
            LevyModel::pure_drift(1.0).unwrap().existence_check(),
            Existence::Exists
        );
        let m = LevyModel::new(
            -5.0,
            1.0,
            JumpSpec::compound_poisson(1.0, JumpLaw::atoms(vec![(1.0, 1.0)])),
        )
        .unwrap();
        assert_eq!(m.long_run(), LongRun::DriftsDown);
        assert_eq!(m.existence_check(), Existence::ExistsPartialOnly);
        assert_eq!(
            LevyModel::pure_drift(-1.0).unwrap().existence_check(),
            Existence::NotExists
        );
        assert_eq!(
            LevyModel::brownian(1.0, 1.0).unwrap().existence_check(),
            Existence::Exists
        );
        assert_eq!(
            LevyModel::brownian(-1.0, 1.0).unwrap().existence_check(),
            Existence::ExistsPartialOnly
        );
    }

    #[test]
    fn experimental_unbounded_variation_is_unknown() {
        let d = TemperedStable {
            alpha: 1.5,
            c_up: 1.0,
            c_down: 1.0,
            g_up: 2.0,
            g_down: 2.0,
        };
        let m = LevyModel::new(0.0, 0.0, JumpSpec::truncated(d, 0.01, true).unwrap()).unwrap();
        assert_eq!(m.existence_check(), Existence::Unknown);
        assert!(m.simulated_sigma2() > 0.0);
        // compensation variance ≈ 2 c ε^{2−α}/(2−α) for small ε
        let approx = 2.0 * math::powf(0.01, 0.5) / 0.5;
        assert!((m.simulated_sigma2() - approx).abs() / approx < 0.05);
        let d_bv = TemperedStable { alpha: 0.5, ..d };
        let m = LevyModel::new(1.0, 0.0, JumpSpec::truncated(d_bv, 0.01, false).unwrap()).unwrap();
        assert!(m.is_bounded_variation());
        assert_ne!(m.existence_check(), Existence::Unknown);
    }

    #[test]
    fn closed_form_rho_examples() {
        let bm = LevyModel::brownian(0.0, 1.0).unwrap();
        assert!((bm.closed_form_rho(2.0).unwrap().unwrap() - 2.0).abs() < 1e-14);
        let drift = LevyModel::pure_drift(1.0).unwrap();
        assert_eq!(drift.closed_form_rho(3.0).unwrap(), Some(3.0));
        // b = 2, rate 1, Exp(1) down-jumps: 2Φ − Φ/(1+Φ) = 1 ⇒ Φ = 1/√2
        let sn = LevyModel::bounded_variation(2.0, 1.0, JumpLaw::ExponentialNegative { rate: 1.0 })
            .unwrap();
        let phi = sn.closed_form_rho(1.0).unwrap().unwrap();
        assert!((2.0 * phi - phi / (1.0 + phi) - 1.0).abs() < 1e-12);
        assert!((phi - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let two_sided = LevyModel::jump_diffusion(
            0.0,
            1.0,
            1.0,
            JumpLaw::TwoSidedExponential {
                p_up: 0.5,
                rate_up: 2.0,
                rate_down: 2.0,
            },
        )
        .unwrap();
        assert_eq!(two_sided.closed_form_rho(1.0).unwrap(), None);
        let bad = LevyModel::bounded_variation(-1.0, 1.0, JumpLaw::ExponentialNegative { rate: 1.0 })
            .unwrap();
        assert!(matches!(bad.closed_form_rho(1.0), Err(Error::RootFindFailure(_))));
    }
}
