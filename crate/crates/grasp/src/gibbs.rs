//! Blocked Gibbs sampler for grouped Bayesian regression under beta prime
//! scale mixtures.
//!
//! The hierarchy places a per-coefficient prior variance
//! `tau2 * lambda2_gj * delta2_g * sigma2` on each coefficient: a global
//! scale, a local scale per coefficient, and a shared scale per group.
//! Every scale follows a beta prime law expressed through its
//! inverse-gamma mixture, so every conditional in the sweep is either a
//! multivariate normal or an inverse gamma; the shape parameters of the
//! local and group beta prime laws can additionally be learned through the
//! adaptive Metropolis-Hastings machinery in [`crate::shape`].
//!
//! The sweep order is fixed: coefficients, noise variance, local scales
//! and their mixing variables, group scales and their mixing variables,
//! the global scale pair, then shape parameters.  The ungrouped sampler is
//! the same loop with the group level pinned at one and skipped.
//!
//! All conditional update functions are public so the full transition
//! kernel can be exercised piecewise, which is how the joint-distribution
//! self-consistency checks in the test suite drive it.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::data::{DesignData, GroupLayout};
use crate::error::{Error, Result};
use crate::randdist::{draw_inverse_gamma, draw_mvn_precision, RngStream};
use crate::shape::{ShapeSamplerState, Side, StepOutcome};

/// Floor applied to denominators and rates so conditionals stay finite.
const RATE_FLOOR: f64 = 1e-300;
/// Ceiling applied to rates and precisions so factorizations stay finite.
const RATE_CEILING: f64 = 1e300;

/// How the local-scale shape pair `(a_g, b_g)` of each group is handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalShapeMode {
    /// Shapes held at the given values for every group.
    Fixed { a: f64, b: f64 },
    /// Each group learns its own pair by Metropolis-Hastings.
    Learned,
}

/// How the group-scale shape pair `(a, b)` is handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaShapeMode {
    /// Shapes held at the given values.
    Fixed { a: f64, b: f64 },
    /// Left-tail shape pinned (typically at `1/n`); right-tail shape
    /// learned.
    FixedALearnB { a: f64 },
    /// Both shapes learned.
    Learned,
}

/// Sampler schedule and model configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperConfig {
    /// Use the group level; when false the group scales stay pinned at one
    /// and the provided group structure is ignored.
    pub grouped: bool,
    pub local_shapes: LocalShapeMode,
    pub delta_shapes: DeltaShapeMode,
    pub burnin: usize,
    pub samples: usize,
    pub thin: usize,
    pub seed: u64,
    pub chains: usize,
    /// Inverse-gamma prior `(shape, rate)` on the noise variance;
    /// `(0, 0)` is the scale-invariant improper prior.
    pub sigma2_prior: (f64, f64),
}

impl Default for HyperConfig {
    fn default() -> Self {
        HyperConfig {
            grouped: true,
            local_shapes: LocalShapeMode::Learned,
            delta_shapes: DeltaShapeMode::Learned,
            burnin: 2000,
            samples: 2000,
            thin: 1,
            seed: 0,
            chains: 1,
            sigma2_prior: (0.0, 0.0),
        }
    }
}

impl HyperConfig {
    /// Ungrouped sampler with learned local shapes.
    pub fn rasp() -> Self {
        HyperConfig {
            grouped: false,
            ..HyperConfig::default()
        }
    }

    /// Grouped sampler learning every shape.
    pub fn grasp_learn_ab() -> Self {
        HyperConfig::default()
    }

    /// Grouped sampler with the group-level left-tail shape pinned at
    /// `1/n` and its right-tail shape learned.
    pub fn grasp_fixed_a_learn_b(n: usize) -> Self {
        HyperConfig {
            delta_shapes: DeltaShapeMode::FixedALearnB {
                a: 1.0 / n.max(1) as f64,
            },
            ..HyperConfig::default()
        }
    }

    /// Grouped sampler with every shape fixed at one half: the grouped
    /// half-Cauchy configuration.
    pub fn grouped_half_cauchy() -> Self {
        HyperConfig {
            local_shapes: LocalShapeMode::Fixed { a: 0.5, b: 0.5 },
            delta_shapes: DeltaShapeMode::Fixed { a: 0.5, b: 0.5 },
            ..HyperConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        fn check_shape(value: f64) -> Result<()> {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(Error::Domain {
                    func: "HyperConfig",
                    what: "fixed shape",
                    requirement: "positive and finite",
                    value,
                })
            }
        }
        if self.samples == 0 {
            return Err(Error::data("samples must be at least 1"));
        }
        if self.thin == 0 {
            return Err(Error::data("thin must be at least 1"));
        }
        if self.chains == 0 {
            return Err(Error::data("chains must be at least 1"));
        }
        match self.local_shapes {
            LocalShapeMode::Fixed { a, b } => {
                check_shape(a)?;
                check_shape(b)?;
            }
            LocalShapeMode::Learned => {}
        }
        match self.delta_shapes {
            DeltaShapeMode::Fixed { a, b } => {
                check_shape(a)?;
                check_shape(b)?;
            }
            DeltaShapeMode::FixedALearnB { a } => check_shape(a)?,
            DeltaShapeMode::Learned => {}
        }
        let (a0, b0) = self.sigma2_prior;
        if !(a0.is_finite() && a0 >= 0.0 && b0.is_finite() && b0 >= 0.0) {
            return Err(Error::data(
                "noise variance prior shape and rate must be non-negative and finite",
            ));
        }
        Ok(())
    }
}

/// Full parameter state of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub beta: DVector<f64>,
    pub sigma2: f64,
    /// Per-coefficient squared local scales.
    pub lambda2: Vec<f64>,
    /// Per-coefficient inverse-gamma mixing variables for the local scales.
    pub nu: Vec<f64>,
    /// Per-group squared scales.
    pub delta2: Vec<f64>,
    /// Per-group inverse-gamma mixing variables for the group scales.
    pub zeta: Vec<f64>,
    pub tau2: f64,
    pub omega: f64,
    /// Per-group local shape pairs `(a_g, b_g)`.
    pub shapes_local: Vec<(f64, f64)>,
    /// Group-level shape pair `(a, b)`.
    pub shapes_group: (f64, f64),
}

impl ChainState {
    /// Neutral starting point: zero coefficients, noise variance at the
    /// sample variance of the response, all scales at one, all shapes at
    /// one half (the half-Cauchy configuration).
    pub fn init(layout: &GroupLayout, var_y: f64) -> Self {
        let p = layout.coefficients();
        let groups = layout.groups();
        ChainState {
            beta: DVector::zeros(p),
            sigma2: if var_y.is_finite() && var_y > 0.0 {
                var_y
            } else {
                1.0
            },
            lambda2: vec![1.0; p],
            nu: vec![1.0; p],
            delta2: vec![1.0; groups],
            zeta: vec![1.0; groups],
            tau2: 1.0,
            omega: 1.0,
            shapes_local: vec![(0.5, 0.5); groups],
            shapes_group: (0.5, 0.5),
        }
    }

    /// Effective squared prior scale of coefficient `j` (without the noise
    /// variance factor), floored away from zero.
    fn effective_scale(&self, layout: &GroupLayout, j: usize) -> f64 {
        (self.tau2 * self.lambda2[j] * self.delta2[layout.group_of(j)]).max(RATE_FLOOR)
    }
}

/// Shared per-sweep inputs: the design, response, group layout, and the
/// cached cross-products the coefficient update needs.
#[derive(Debug)]
pub struct GibbsContext<'a> {
    pub x: &'a DMatrix<f64>,
    pub y: &'a DVector<f64>,
    pub layout: &'a GroupLayout,
    pub xtx: DMatrix<f64>,
    pub xty: DVector<f64>,
}

impl<'a> GibbsContext<'a> {
    /// Precompute the cross-products for a design.
    ///
    /// # Errors
    ///
    /// [`Error::Data`] when dimensions disagree or there are no
    /// observations.
    pub fn new(x: &'a DMatrix<f64>, y: &'a DVector<f64>, layout: &'a GroupLayout) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::data("the design needs at least one observation"));
        }
        if y.len() != x.nrows() {
            return Err(Error::Data(format!(
                "design has {} rows but response has {} values",
                x.nrows(),
                y.len()
            )));
        }
        if layout.coefficients() != x.ncols() {
            return Err(Error::Data(format!(
                "design has {} columns but group layout covers {}",
                x.ncols(),
                layout.coefficients()
            )));
        }
        Ok(GibbsContext {
            x,
            y,
            layout,
            xtx: x.transpose() * x,
            xty: x.transpose() * y,
        })
    }
}

/// Draw the coefficient block from its multivariate normal conditional:
/// precision `XᵀX + (tau2 Λ)⁻¹` with `Λ = diag(lambda2_gj delta2_g)`,
/// covariance scaled by the noise variance.
///
/// # Errors
///
/// [`Error::NotPositiveDefinite`] when the factorization fails; the state
/// is left unchanged in that case.
pub fn update_beta<R: rand::Rng + ?Sized>(
    rng: &mut R,
    state: &mut ChainState,
    ctx: &GibbsContext,
) -> Result<()> {
    let p = ctx.xtx.nrows();
    if p == 0 {
        return Ok(());
    }
    let mut precision = ctx.xtx.clone();
    for j in 0..p {
        let prior_precision = (1.0 / state.effective_scale(ctx.layout, j)).min(RATE_CEILING);
        precision[(j, j)] += prior_precision;
    }
    state.beta = draw_mvn_precision(rng, &precision, &ctx.xty, state.sigma2)?;
    Ok(())
}

/// Draw the noise variance from its inverse-gamma conditional.  With the
/// default improper prior the shape is `(n + p) / 2` and the rate is half
/// the residual sum of squares plus half the prior quadratic form; a
/// proper inverse-gamma prior adds its shape and rate.
///
/// Returns `true` when the rate had to be floored away from zero (a
/// degenerate all-zero configuration), which callers surface in
/// diagnostics.
pub fn update_sigma2<R: rand::Rng + ?Sized>(
    rng: &mut R,
    state: &mut ChainState,
    ctx: &GibbsContext,
    prior: (f64, f64),
) -> Result<bool> {
    let n = ctx.x.nrows();
    let p = ctx.x.ncols();
    let residual = ctx.y - ctx.x * &state.beta;
    let rss = residual.norm_squared();
    let mut quad = 0.0;
    for j in 0..p {
        quad += state.beta[j] * state.beta[j] / state.effective_scale(ctx.layout, j);
    }
    let shape = 0.5 * (n + p) as f64 + prior.0;
    let rate = 0.5 * (rss + quad) + prior.1;
    let guarded = !(rate > RATE_FLOOR);
    let rate = rate.clamp(RATE_FLOOR, RATE_CEILING);
    state.sigma2 = draw_inverse_gamma(rng, shape, rate)?;
    Ok(guarded)
}

/// Draw every squared local scale and its mixing variable:
/// `lambda2_gj ~ IG(1/2 + b_g, 1/nu_gj + beta_gj^2 / (2 tau2 sigma2
/// delta2_g))` followed by `nu_gj ~ IG(a_g + b_g, 1 + 1/lambda2_gj)`.
pub fn update_local_scales<R: rand::Rng + ?Sized>(
    rng: &mut R,
    state: &mut ChainState,
    ctx: &GibbsContext,
) -> Result<()> {
    for j in 0..ctx.layout.coefficients() {
        let g = ctx.layout.group_of(j);
        let (a_g, b_g) = state.shapes_local[g];
        let denom = (2.0 * state.tau2 * state.sigma2 * state.delta2[g]).max(RATE_FLOOR);
        let rate = (1.0 / state.nu[j] + state.beta[j] * state.beta[j] / denom)
            .clamp(RATE_FLOOR, RATE_CEILING);
        state.lambda2[j] = draw_inverse_gamma(rng, 0.5 + b_g, rate)?;
        let nu_rate = (1.0 + 1.0 / state.lambda2[j]).clamp(RATE_FLOOR, RATE_CEILING);
        state.nu[j] = draw_inverse_gamma(rng, a_g + b_g, nu_rate)?;
    }
    Ok(())
}

/// Draw every squared group scale and its mixing variable:
/// `delta2_g ~ IG(n_g/2 + b, 1/zeta_g + sum_j beta_gj^2 / (2 tau2 sigma2
/// lambda2_gj))` followed by `zeta_g ~ IG(a + b, 1 + 1/delta2_g)`.
pub fn update_group_scales<R: rand::Rng + ?Sized>(
    rng: &mut R,
    state: &mut ChainState,
    ctx: &GibbsContext,
) -> Result<()> {
    let (a, b) = state.shapes_group;
    for g in 0..ctx.layout.groups() {
        let members = ctx.layout.members(g);
        let denom_base = 2.0 * state.tau2 * state.sigma2;
        let mut sum = 0.0;
        for &j in members {
            sum += state.beta[j] * state.beta[j] / (denom_base * state.lambda2[j]).max(RATE_FLOOR);
        }
        let rate = (1.0 / state.zeta[g] + sum).clamp(RATE_FLOOR, RATE_CEILING);
        state.delta2[g] = draw_inverse_gamma(rng, 0.5 * members.len() as f64 + b, rate)?;
        let zeta_rate = (1.0 + 1.0 / state.delta2[g]).clamp(RATE_FLOOR, RATE_CEILING);
        state.zeta[g] = draw_inverse_gamma(rng, a + b, zeta_rate)?;
    }
    Ok(())
}

/// Draw the squared global scale and its mixing variable:
/// `tau2 ~ IG((p+1)/2, 1/omega + (1/(2 sigma2)) sum_j beta_j^2 /
/// (lambda2_j delta2_g))` followed by `omega ~ IG(1, 1 + 1/tau2)`.
pub fn update_tau<R: rand::Rng + ?Sized>(
    rng: &mut R,
    state: &mut ChainState,
    ctx: &GibbsContext,
) -> Result<()> {
    let p = ctx.layout.coefficients();
    let mut sum = 0.0;
    for j in 0..p {
        let g = ctx.layout.group_of(j);
        sum += state.beta[j] * state.beta[j]
            / (state.lambda2[j] * state.delta2[g]).max(RATE_FLOOR);
    }
    let rate = (1.0 / state.omega + sum / (2.0 * state.sigma2).max(RATE_FLOOR))
        .clamp(RATE_FLOOR, RATE_CEILING);
    state.tau2 = draw_inverse_gamma(rng, 0.5 * (p + 1) as f64, rate)?;
    let omega_rate = (1.0 + 1.0 / state.tau2).clamp(RATE_FLOOR, RATE_CEILING);
    state.omega = draw_inverse_gamma(rng, 1.0, omega_rate)?;
    Ok(())
}

/// Outcome tally for one kind of shape Metropolis-Hastings step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepTally {
    pub accepted: u64,
    pub rejected: u64,
    pub skipped: u64,
}

impl StepTally {
    fn note(&mut self, outcome: StepOutcome) {
        match outcome {
            StepOutcome::Accepted => self.accepted += 1,
            StepOutcome::Rejected => self.rejected += 1,
            StepOutcome::Skipped => self.skipped += 1,
        }
    }

    fn merge(&mut self, other: &StepTally) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.skipped += other.skipped;
    }

    /// Steps that actually proposed a value.
    pub fn attempted(&self) -> u64 {
        self.accepted + self.rejected
    }

    /// Acceptance rate over attempted steps; zero when nothing was
    /// attempted.
    pub fn acceptance(&self) -> f64 {
        if self.attempted() == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted() as f64
        }
    }
}

/// Per-sweep tallies of the four kinds of shape steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ShapeSweepStats {
    pub local_a: StepTally,
    pub local_b: StepTally,
    pub delta_a: StepTally,
    pub delta_b: StepTally,
}

impl ShapeSweepStats {
    fn merge(&mut self, other: &ShapeSweepStats) {
        self.local_a.merge(&other.local_a);
        self.local_b.merge(&other.local_b);
        self.delta_a.merge(&other.delta_a);
        self.delta_b.merge(&other.delta_b);
    }
}

/// Map a squared scale to the unit interval via `s / (1 + s)`, clamped
/// strictly inside `(0, 1)` so it is a valid beta observation.
fn to_unit_interval(scale2: f64) -> f64 {
    (scale2 / (1.0 + scale2)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// One adaptive Metropolis-Hastings pass over the learned shape
/// parameters.  Each learned group maps its squared local scales to beta
/// observations and takes one step per side; the group level does the same
/// with the squared group scales.  Degenerate proposals skip the step and
/// keep the current value.
pub fn update_shapes<R: rand::Rng + ?Sized>(
    rng: &mut R,
    state: &mut ChainState,
    ctx: &GibbsContext,
    config: &HyperConfig,
) -> Result<ShapeSweepStats> {
    let mut stats = ShapeSweepStats::default();
    if let LocalShapeMode::Learned = config.local_shapes {
        for g in 0..ctx.layout.groups() {
            let xs: Vec<f64> = ctx
                .layout
                .members(g)
                .iter()
                .map(|&j| to_unit_interval(state.lambda2[j]))
                .collect();
            let mut sampler = ShapeSamplerState::from_observations(&xs)?;
            sampler.a = state.shapes_local[g].0;
            sampler.b = state.shapes_local[g].1;
            stats.local_a.note(sampler.mh_step(rng, Side::A)?);
            stats.local_b.note(sampler.mh_step(rng, Side::B)?);
            state.shapes_local[g] = (sampler.a, sampler.b);
        }
    }
    if config.grouped {
        let delta_obs: Vec<f64> = state
            .delta2
            .iter()
            .map(|&d| to_unit_interval(d))
            .collect();
        match config.delta_shapes {
            DeltaShapeMode::Fixed { .. } => {}
            DeltaShapeMode::FixedALearnB { a } => {
                let mut sampler = ShapeSamplerState::from_observations(&delta_obs)?;
                sampler.a = a;
                sampler.b = state.shapes_group.1;
                stats.delta_b.note(sampler.mh_step(rng, Side::B)?);
                state.shapes_group = (a, sampler.b);
            }
            DeltaShapeMode::Learned => {
                let mut sampler = ShapeSamplerState::from_observations(&delta_obs)?;
                sampler.a = state.shapes_group.0;
                sampler.b = state.shapes_group.1;
                stats.delta_a.note(sampler.mh_step(rng, Side::A)?);
                stats.delta_b.note(sampler.mh_step(rng, Side::B)?);
                state.shapes_group = (sampler.a, sampler.b);
            }
        }
    }
    Ok(stats)
}

/// Posterior mean, spread, and central 95% interval for one coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSummary {
    pub mean: f64,
    pub sd: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Counters describing how a run went.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitDiagnostics {
    /// Total sweeps across chains, burnin included.
    pub sweeps: usize,
    /// Kept draws across chains.
    pub kept: usize,
    pub chains: usize,
    /// Coefficient-block factorization failures (the sweep kept the
    /// previous coefficients).
    pub factorization_failures: usize,
    /// Sweeps where the noise-variance rate had to be floored.
    pub sigma2_rate_guards: usize,
    pub shape_steps: ShapeSweepStats,
}

/// Thinned posterior draws and their summaries, on the standardized scale
/// of the inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    /// Kept coefficient draws, one row per draw.
    pub beta: DMatrix<f64>,
    pub sigma2: Vec<f64>,
    pub tau2: Vec<f64>,
    /// Kept group-scale draws, one row per draw (all ones when ungrouped).
    pub delta2: DMatrix<f64>,
    /// Kept local shape pairs per draw and group.
    pub shapes_local: Vec<Vec<(f64, f64)>>,
    /// Kept group-level shape pairs per draw.
    pub shapes_group: Vec<(f64, f64)>,
    pub summary: Vec<CoefficientSummary>,
    pub diagnostics: FitDiagnostics,
}

/// Linear-interpolation empirical quantile of a sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let w = h - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

fn summarize_column(values: &[f64]) -> CoefficientSummary {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = if n > 1 {
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    CoefficientSummary {
        mean,
        sd,
        lower: quantile_sorted(&sorted, 0.025),
        upper: quantile_sorted(&sorted, 0.975),
    }
}

struct ChainOutput {
    beta: Vec<Vec<f64>>,
    sigma2: Vec<f64>,
    tau2: Vec<f64>,
    delta2: Vec<Vec<f64>>,
    shapes_local: Vec<Vec<(f64, f64)>>,
    shapes_group: Vec<(f64, f64)>,
    factorization_failures: usize,
    sigma2_rate_guards: usize,
    shape_steps: ShapeSweepStats,
}

fn run_single_chain(
    ctx: &GibbsContext,
    config: &HyperConfig,
    chain_index: u64,
    var_y: f64,
) -> Result<ChainOutput> {
    let mut rng = RngStream::new(config.seed).substream(chain_index);
    let mut state = ChainState::init(ctx.layout, var_y);
    match config.local_shapes {
        LocalShapeMode::Fixed { a, b } => {
            state.shapes_local = vec![(a, b); ctx.layout.groups()];
        }
        LocalShapeMode::Learned => {}
    }
    match config.delta_shapes {
        DeltaShapeMode::Fixed { a, b } => state.shapes_group = (a, b),
        DeltaShapeMode::FixedALearnB { a } => state.shapes_group = (a, state.shapes_group.1),
        DeltaShapeMode::Learned => {}
    }

    let total = config.burnin + config.samples;
    let allowed_failures = (0.01 * total as f64).floor() as usize;
    let mut out = ChainOutput {
        beta: Vec::new(),
        sigma2: Vec::new(),
        tau2: Vec::new(),
        delta2: Vec::new(),
        shapes_local: Vec::new(),
        shapes_group: Vec::new(),
        factorization_failures: 0,
        sigma2_rate_guards: 0,
        shape_steps: ShapeSweepStats::default(),
    };

    for sweep in 0..total {
        match update_beta(&mut rng, &mut state, ctx) {
            Ok(()) => {}
            Err(Error::NotPositiveDefinite { .. }) => {
                out.factorization_failures += 1;
                if out.factorization_failures > allowed_failures {
                    return Err(Error::ChainAborted {
                        failures: out.factorization_failures,
                        sweeps: sweep + 1,
                        limit_percent: 1.0,
                    });
                }
            }
            Err(other) => return Err(other),
        }
        if update_sigma2(&mut rng, &mut state, ctx, config.sigma2_prior)? {
            out.sigma2_rate_guards += 1;
        }
        update_local_scales(&mut rng, &mut state, ctx)?;
        if config.grouped {
            update_group_scales(&mut rng, &mut state, ctx)?;
        }
        update_tau(&mut rng, &mut state, ctx)?;
        let stats = update_shapes(&mut rng, &mut state, ctx, config)?;
        out.shape_steps.merge(&stats);

        if sweep >= config.burnin {
            let kept_index = sweep - config.burnin + 1;
            if kept_index % config.thin == 0 {
                out.beta.push(state.beta.iter().copied().collect());
                out.sigma2.push(state.sigma2);
                out.tau2.push(state.tau2);
                out.delta2.push(state.delta2.clone());
                out.shapes_local.push(state.shapes_local.clone());
                out.shapes_group.push(state.shapes_group);
            }
        }
    }
    Ok(out)
}

/// Run the configured number of chains and merge their thinned draws.
///
/// Chains use independent random substreams derived from the seed and are
/// merged in chain order, so results are reproducible regardless of
/// scheduling.
///
/// # Errors
///
/// [`Error::ChainAborted`] when more than 1% of a chain's sweeps hit a
/// factorization failure; configuration and dimension errors as described
/// on the update functions.
pub fn run_chain(data: &DesignData, config: &HyperConfig) -> Result<PosteriorDraws> {
    config.validate()?;
    let p = data.p();
    let single;
    let layout = if config.grouped {
        &data.groups
    } else {
        single = GroupLayout::single_group(p)?;
        &single
    };
    let ctx = GibbsContext::new(&data.x, &data.y, layout)?;
    let n = data.n();
    let mean_y = data.y.iter().sum::<f64>() / n as f64;
    let var_y = if n > 1 {
        data.y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum::<f64>() / (n - 1) as f64
    } else {
        1.0
    };

    let outputs: Vec<Result<ChainOutput>> = (0..config.chains as u64)
        .into_par_iter()
        .map(|chain| run_single_chain(&ctx, config, chain, var_y))
        .collect();

    let mut merged: Vec<ChainOutput> = Vec::with_capacity(config.chains);
    for output in outputs {
        merged.push(output?);
    }

    let kept_per_chain = config.samples / config.thin;
    let kept = kept_per_chain * config.chains;
    let groups = layout.groups();
    let mut beta = DMatrix::zeros(kept, p);
    let mut delta2 = DMatrix::zeros(kept, groups);
    let mut sigma2 = Vec::with_capacity(kept);
    let mut tau2 = Vec::with_capacity(kept);
    let mut shapes_local = Vec::with_capacity(kept);
    let mut shapes_group = Vec::with_capacity(kept);
    let mut diagnostics = FitDiagnostics {
        sweeps: (config.burnin + config.samples) * config.chains,
        kept,
        chains: config.chains,
        ..FitDiagnostics::default()
    };
    let mut row = 0;
    for chain in merged {
        debug_assert_eq!(chain.beta.len(), kept_per_chain);
        for i in 0..chain.beta.len() {
            for j in 0..p {
                beta[(row, j)] = chain.beta[i][j];
            }
            for g in 0..groups {
                delta2[(row, g)] = chain.delta2[i][g];
            }
            row += 1;
        }
        sigma2.extend(chain.sigma2);
        tau2.extend(chain.tau2);
        shapes_local.extend(chain.shapes_local);
        shapes_group.extend(chain.shapes_group);
        diagnostics.factorization_failures += chain.factorization_failures;
        diagnostics.sigma2_rate_guards += chain.sigma2_rate_guards;
        diagnostics.shape_steps.merge(&chain.shape_steps);
    }

    let summary = (0..p)
        .map(|j| {
            let column: Vec<f64> = (0..kept).map(|i| beta[(i, j)]).collect();
            summarize_column(&column)
        })
        .collect();

    Ok(PosteriorDraws {
        beta,
        sigma2,
        tau2,
        delta2,
        shapes_local,
        shapes_group,
        summary,
        diagnostics,
    })
}
