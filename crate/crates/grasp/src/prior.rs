//! Shrinkage prior analysis: densities of the local scale on the natural and
//! log axes, the marginal coefficient density induced by inverse-gamma scale
//! mixing, and within-group prior correlation of log shrinkage factors.
//!
//! The log-scale view `xi = ln lambda` makes tail behavior legible: writing
//! `sigma` for the logistic function, the beta prime scale prior has
//!
//! ```text
//! p(xi | a, b) = 2 sigma(2 xi)^a sigma(-2 xi)^b / B(a, b)
//! ```
//!
//! so `-log p(xi) / xi` tends to `2b` on the right tail and `-2a` on the
//! left: both tail weights are free parameters.  The lasso's scale prior has
//! a fixed left slope of -2 and a right tail collapsing super-exponentially;
//! the Student-t scale prior fixes the left tail instead; the horseshoe is
//! the beta prime at `a = b = 1/2`.
//!
//! For grouped designs the effective scale of a coefficient is the product
//! `delta_g * lambda_gj`, and the within-group prior correlation of two log
//! shrinkage scales is `V[ln delta] / (V[ln delta] + V[ln lambda])`, a ratio
//! of trigamma sums under beta prime laws.  [`corr_distribution`] pushes
//! hyperpriors on the shape parameters through that formula to show which
//! correlation regimes a hyperprior favors.

use rand::Rng;

use crate::error::{Error, Result};
use crate::randdist::{draw_gamma, draw_half_cauchy};
use crate::specfun::{log_beta, log_gamma, log_logistic, trigamma};

/// Families of local-scale shrinkage priors, parameterized on the scale
/// `lambda` (not its square).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShrinkagePriorKind {
    /// Exponential prior on `lambda^2`: `p(lambda) = 2 lambda exp(-lambda^2)`.
    Lasso,
    /// Inverse-gamma prior on `lambda^2` with both parameters `dof / 2`.
    StudentT { dof: f64 },
    /// Half-Cauchy prior on `lambda`.
    Horseshoe,
    /// Beta prime prior on `lambda^2`:
    /// `p(lambda) = 2 lambda^(2a-1) (1 + lambda^2)^-(a+b) / B(a, b)`.
    BetaPrime { a: f64, b: f64 },
}

fn check_pos(func: &'static str, what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            func,
            what,
            requirement: "positive and finite",
            value: v,
        })
    }
}

fn check_finite(func: &'static str, what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            func,
            what,
            requirement: "finite",
            value: v,
        })
    }
}

/// `ln(1 + exp(x))`, stable for arguments of either sign.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl ShrinkagePriorKind {
    fn validate(&self) -> Result<()> {
        match *self {
            ShrinkagePriorKind::Lasso | ShrinkagePriorKind::Horseshoe => Ok(()),
            ShrinkagePriorKind::StudentT { dof } => {
                check_pos("ShrinkagePriorKind", "dof", dof)
            }
            ShrinkagePriorKind::BetaPrime { a, b } => {
                check_pos("ShrinkagePriorKind", "a", a)?;
                check_pos("ShrinkagePriorKind", "b", b)
            }
        }
    }
}

/// Log density of the local scale `lambda > 0` under the given prior,
/// including normalizing constants.
///
/// # Errors
///
/// [`Error::Domain`] on a non-positive `lambda` or invalid prior parameters.
pub fn log_density_scale(kind: ShrinkagePriorKind, lambda: f64) -> Result<f64> {
    kind.validate()?;
    check_pos("log_density_scale", "lambda", lambda)?;
    let l2 = lambda * lambda;
    let ln2 = std::f64::consts::LN_2;
    match kind {
        ShrinkagePriorKind::Lasso => Ok(ln2 + lambda.ln() - l2),
        ShrinkagePriorKind::StudentT { dof } => {
            let a = 0.5 * dof;
            let b = 0.5 * dof;
            Ok(ln2 + a * b.ln() - log_gamma(a)? - (2.0 * a + 1.0) * lambda.ln() - b / l2)
        }
        ShrinkagePriorKind::Horseshoe => {
            Ok(ln2 - std::f64::consts::PI.ln() - l2.ln_1p())
        }
        ShrinkagePriorKind::BetaPrime { a, b } => Ok(ln2
            + (2.0 * a - 1.0) * lambda.ln()
            - (a + b) * l2.ln_1p()
            - log_beta(a, b)?),
    }
}

/// Log density of the log scale `xi = ln lambda` under the given prior,
/// including normalizing constants; finite for any real `xi`.
///
/// # Errors
///
/// [`Error::Domain`] on a non-finite `xi` or invalid prior parameters.
pub fn log_density_log_scale(kind: ShrinkagePriorKind, xi: f64) -> Result<f64> {
    kind.validate()?;
    check_finite("log_density_log_scale", "xi", xi)?;
    let ln2 = std::f64::consts::LN_2;
    match kind {
        ShrinkagePriorKind::Lasso => Ok(ln2 + 2.0 * xi - (2.0 * xi).exp()),
        ShrinkagePriorKind::StudentT { dof } => {
            let a = 0.5 * dof;
            let b = 0.5 * dof;
            Ok(ln2 + a * b.ln() - log_gamma(a)? - 2.0 * a * xi - b * (-2.0 * xi).exp())
        }
        ShrinkagePriorKind::Horseshoe => {
            Ok(ln2 + xi - std::f64::consts::PI.ln() - softplus(2.0 * xi))
        }
        ShrinkagePriorKind::BetaPrime { a, b } => Ok(ln2
            + a * log_logistic(2.0 * xi)
            + b * log_logistic(-2.0 * xi)
            - log_beta(a, b)?),
    }
}

/// Marginal density of a coefficient whose squared scale has an
/// inverse-gamma prior `IG(b, 1/nu)` inside a normal:
///
/// ```text
/// p(beta) = sqrt(nu) Gamma(b + 1/2) / (sqrt(2 pi sigma2 tau2) Gamma(b))
///           * (1 + beta^2 nu / (2 sigma2 tau2))^-(b + 1/2)
/// ```
///
/// a Student-t law with `2b` degrees of freedom; its polynomial tail is why
/// a single fixed-scale normal cannot mimic these priors.
///
/// # Errors
///
/// [`Error::Domain`] on non-positive `tau2`, `sigma2`, `nu`, or `b`, or a
/// non-finite `beta`.
pub fn student_t_marginal(beta: f64, tau2: f64, sigma2: f64, nu: f64, b: f64) -> Result<f64> {
    check_finite("student_t_marginal", "beta", beta)?;
    check_pos("student_t_marginal", "tau2", tau2)?;
    check_pos("student_t_marginal", "sigma2", sigma2)?;
    check_pos("student_t_marginal", "nu", nu)?;
    check_pos("student_t_marginal", "b", b)?;
    let v = sigma2 * tau2;
    let log_p = 0.5 * nu.ln() + log_gamma(b + 0.5)? - log_gamma(b)?
        - 0.5 * (2.0 * std::f64::consts::PI * v).ln()
        - (b + 0.5) * (beta * beta * nu / (2.0 * v)).ln_1p();
    Ok(log_p.exp())
}

/// Within-group prior correlation of two log shrinkage scales when both the
/// group scale and the local scales follow beta prime laws:
/// `(psi'(a) + psi'(b)) / (psi'(a) + psi'(b) + psi'(a_g) + psi'(b_g))`.
///
/// # Errors
///
/// [`Error::Domain`] on non-positive shapes.
pub fn corr_grasp(a: f64, b: f64, a_g: f64, b_g: f64) -> Result<f64> {
    let v_group = trigamma(a)? + trigamma(b)?;
    let v_local = trigamma(a_g)? + trigamma(b_g)?;
    Ok(v_group / (v_group + v_local))
}

/// Within-group prior correlation for the gamma/inverse-gamma group-local
/// construction (`delta_g^2 ~ Gamma(a_g, 1)`, `lambda_gj^2 ~ IG(b_g, 1)`):
/// `psi'(a_g) / (psi'(a_g) + psi'(b_g))`.
///
/// # Errors
///
/// [`Error::Domain`] on non-positive shapes.
pub fn corr_gigg(a_g: f64, b_g: f64) -> Result<f64> {
    let v_group = trigamma(a_g)?;
    let v_local = trigamma(b_g)?;
    Ok(v_group / (v_group + v_local))
}

/// Which group-local construction a Monte Carlo or histogram study targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorFamily {
    /// Beta prime group scale and beta prime local scales.
    Grasp,
    /// Gamma group scale and inverse-gamma local scales.
    Gigg,
}

/// Monte Carlo estimate of the within-group correlation for the beta prime
/// construction: draws `(ln delta^2 + ln lambda_1^2, ln delta^2 + ln
/// lambda_2^2)` pairs and returns their sample correlation.
///
/// Each beta prime log draw is the difference of two log gamma draws, which
/// is stable far into the tails.
///
/// # Errors
///
/// [`Error::Domain`] on non-positive shapes or a zero draw count.
pub fn corr_mc_grasp<R: Rng + ?Sized>(
    rng: &mut R,
    a: f64,
    b: f64,
    a_g: f64,
    b_g: f64,
    draws: usize,
) -> Result<f64> {
    if draws == 0 {
        return Err(Error::data("corr_mc_grasp needs at least one draw"));
    }
    let mut acc = CorrAccumulator::default();
    for _ in 0..draws {
        let ld = draw_gamma(rng, a, 1.0)?.ln() - draw_gamma(rng, b, 1.0)?.ln();
        let l1 = draw_gamma(rng, a_g, 1.0)?.ln() - draw_gamma(rng, b_g, 1.0)?.ln();
        let l2 = draw_gamma(rng, a_g, 1.0)?.ln() - draw_gamma(rng, b_g, 1.0)?.ln();
        acc.push(ld + l1, ld + l2);
    }
    Ok(acc.corr())
}

/// Monte Carlo estimate of the within-group correlation for the
/// gamma/inverse-gamma construction.
///
/// # Errors
///
/// [`Error::Domain`] on non-positive shapes or a zero draw count.
pub fn corr_mc_gigg<R: Rng + ?Sized>(
    rng: &mut R,
    a_g: f64,
    b_g: f64,
    draws: usize,
) -> Result<f64> {
    if draws == 0 {
        return Err(Error::data("corr_mc_gigg needs at least one draw"));
    }
    let mut acc = CorrAccumulator::default();
    for _ in 0..draws {
        let ld = draw_gamma(rng, a_g, 1.0)?.ln();
        let l1 = -draw_gamma(rng, b_g, 1.0)?.ln();
        let l2 = -draw_gamma(rng, b_g, 1.0)?.ln();
        acc.push(ld + l1, ld + l2);
    }
    Ok(acc.corr())
}

/// Streaming accumulator for a sample Pearson correlation.
#[derive(Debug, Default)]
struct CorrAccumulator {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl CorrAccumulator {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    fn corr(&self) -> f64 {
        let cov = self.sxy / self.n - (self.sx / self.n) * (self.sy / self.n);
        let vx = self.sxx / self.n - (self.sx / self.n).powi(2);
        let vy = self.syy / self.n - (self.sy / self.n).powi(2);
        cov / (vx * vy).sqrt()
    }
}

/// How one shape hyperparameter is drawn in a correlation-distribution
/// study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HyperpriorKind {
    /// Half-Cauchy with the given scale.
    HalfCauchy { scale: f64 },
    /// `q`-th root of a half-Cauchy draw; large `q` pins the parameter near
    /// one.
    RootHalfCauchy { scale: f64, q: f64 },
}

impl HyperpriorKind {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match *self {
            HyperpriorKind::HalfCauchy { scale } => draw_half_cauchy(rng, scale),
            HyperpriorKind::RootHalfCauchy { scale, q } => {
                check_pos("HyperpriorKind", "q", q)?;
                Ok(draw_half_cauchy(rng, scale)?.powf(1.0 / q))
            }
        }
    }
}

/// A named hyperprior regime for the shape parameters: the `a`-side sampler
/// applies to `(a, a_g)` and the `b`-side sampler to `(b, b_g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperpriorScenario {
    pub label: &'static str,
    pub a_side: HyperpriorKind,
    pub b_side: HyperpriorKind,
}

impl HyperpriorScenario {
    /// All shapes half-Cauchy(1): the fully adaptive regime.
    pub fn adaptive() -> Self {
        HyperpriorScenario {
            label: "adaptive",
            a_side: HyperpriorKind::HalfCauchy { scale: 1.0 },
            b_side: HyperpriorKind::HalfCauchy { scale: 1.0 },
        }
    }

    /// All shapes pinned near one through a `1e4`-th root: the
    /// non-adaptive regime whose correlation collapses to 1/2.
    pub fn non_adaptive() -> Self {
        HyperpriorScenario {
            label: "non_adaptive",
            a_side: HyperpriorKind::RootHalfCauchy {
                scale: 1.0,
                q: 1e4,
            },
            b_side: HyperpriorKind::RootHalfCauchy {
                scale: 1.0,
                q: 1e4,
            },
        }
    }

    /// All shapes half-Cauchy(25): spreads the correlation nearly uniformly
    /// over the unit interval.
    pub fn uniformish() -> Self {
        HyperpriorScenario {
            label: "uniformish",
            a_side: HyperpriorKind::HalfCauchy { scale: 25.0 },
            b_side: HyperpriorKind::HalfCauchy { scale: 25.0 },
        }
    }

    /// `a`-side shapes pinned near one, `b`-side shapes half-Cauchy(1):
    /// concentrates correlation mass near 0, 1/2, and 1.
    pub fn mixed() -> Self {
        HyperpriorScenario {
            label: "mixed",
            a_side: HyperpriorKind::RootHalfCauchy {
                scale: 1.0,
                q: 1e4,
            },
            b_side: HyperpriorKind::HalfCauchy { scale: 1.0 },
        }
    }

    /// Scenario by label; `None` for an unknown label.
    pub fn by_label(label: &str) -> Option<Self> {
        match label {
            "adaptive" => Some(Self::adaptive()),
            "non_adaptive" => Some(Self::non_adaptive()),
            "uniformish" => Some(Self::uniformish()),
            "mixed" => Some(Self::mixed()),
            _ => None,
        }
    }
}

/// Fixed-width histogram over `[0, 1]` used for correlation distributions.
#[derive(Debug, Clone)]
pub struct Histogram {
    /// `bins + 1` edges, evenly spaced from 0 to 1.
    pub edges: Vec<f64>,
    /// Draw counts per bin.
    pub counts: Vec<u64>,
    total: u64,
}

/// Number of histogram bins used by [`corr_distribution`].
pub const CORR_HISTOGRAM_BINS: usize = 50;

impl Histogram {
    fn new(bins: usize) -> Self {
        Histogram {
            edges: (0..=bins).map(|i| i as f64 / bins as f64).collect(),
            counts: vec![0; bins],
            total: 0,
        }
    }

    fn record(&mut self, x: f64) {
        let bins = self.counts.len();
        let idx = ((x * bins as f64) as usize).min(bins - 1);
        self.counts[idx] += 1;
        self.total += 1;
    }

    /// Fraction of all draws in bin `i`.
    pub fn mass(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.total.max(1) as f64
    }

    /// Fraction of all draws in bins whose closed interval contains `x`.
    ///
    /// For `x` strictly inside a bin this is that bin's mass; for `x` on a
    /// shared edge it is the mass of the two adjoining bins, which is the
    /// right notion of "mass at `x`" when a point target sits exactly on an
    /// edge.
    pub fn mass_at(&self, x: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.counts.len() {
            if self.edges[i] <= x && x <= self.edges[i + 1] {
                total += self.mass(i);
            }
        }
        total
    }

    /// Total draws recorded.
    pub fn len(&self) -> u64 {
        self.total
    }

    /// True when nothing has been recorded.
    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// Distribution of the within-group prior correlation induced by a
/// hyperprior scenario, as a 50-bin histogram over `[0, 1]`: each draw
/// samples the shape parameters from the scenario and evaluates the
/// closed-form correlation.
///
/// # Errors
///
/// [`Error::Data`] on a zero draw count; [`Error::Domain`] if a scenario
/// parameter is invalid.
pub fn corr_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    family: PriorFamily,
    scenario: &HyperpriorScenario,
    draws: usize,
) -> Result<Histogram> {
    if draws == 0 {
        return Err(Error::data("corr_distribution needs at least one draw"));
    }
    let mut hist = Histogram::new(CORR_HISTOGRAM_BINS);
    for _ in 0..draws {
        let corr = match family {
            PriorFamily::Grasp => {
                let a = scenario.a_side.draw(rng)?;
                let b = scenario.b_side.draw(rng)?;
                let a_g = scenario.a_side.draw(rng)?;
                let b_g = scenario.b_side.draw(rng)?;
                corr_grasp(a, b, a_g, b_g)?
            }
            PriorFamily::Gigg => {
                let a_g = scenario.a_side.draw(rng)?;
                let b_g = scenario.b_side.draw(rng)?;
                corr_gigg(a_g, b_g)?
            }
        };
        hist.record(corr.clamp(0.0, 1.0));
    }
    Ok(hist)
}
