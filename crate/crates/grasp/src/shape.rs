//! Adaptive independence Metropolis-Hastings sampling of Beta shape
//! parameters.
//!
//! Given observations `x_1..x_n` in `(0, 1)` treated as draws from
//! `Beta(a, b)`, with independent half-Cauchy priors on `a` and `b`, the
//! full conditional of one shape given the other is (up to a constant)
//!
//! ```text
//! log p(a | x, b) = (a - 1) * slog_x - n * ln B(a, b) - ln(1 + a^2)
//! ```
//!
//! where `slog_x = sum_i ln(x_i + eps)`; the conditional for `b` is the same
//! expression with `slog_cx = sum_i ln(1 - x_i + eps)` in place of `slog_x`
//! and the roles of the shapes swapped (because `1 - x ~ Beta(b, a)`).
//!
//! Each update rebuilds its proposal from scratch: a damped Newton search
//! locates the conditional mode and curvature, the log target is evaluated
//! at three design points bracketing the mode, a two-parameter least-squares
//! fit in the gamma family's sufficient statistics `(ln a, a)` turns those
//! values into a gamma proposal, and a standard independence MH accept/reject
//! step keeps the exact conditional as the stationary law.  If the target
//! really is a gamma density the fit is exact and every proposal is accepted.
//!
//! Failures of the mode search or the proposal fit are recoverable: the step
//! reports [`StepOutcome::Skipped`] and the current value is retained, so a
//! pathological sweep cannot abort an outer Gibbs chain.

use rand::Rng;

use crate::error::{Error, Result};
use crate::randdist::draw_gamma;
use crate::specfun::{digamma, log_beta, log_gamma, trigamma};

/// Newton iteration cap for the mode search.
const MODE_MAX_ITER: usize = 200;
/// Relative-change stopping tolerance for the mode search.
const MODE_REL_TOL: f64 = 1e-3;
/// Learning-rate decay applied when a Newton step proposes a non-positive
/// shape.
const STEP_DECAY: f64 = 0.9;
/// Lower clamp for the closed-form initial guess.
const INIT_FLOOR: f64 = 1e-4;
/// Guard added inside the observation logs.
const LOG_EPS: f64 = f64::EPSILON;

/// Which shape parameter an operation applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The first shape, tied to `sum ln(x_i + eps)`.
    A,
    /// The second shape, tied to `sum ln(1 - x_i + eps)`.
    B,
}

/// Result of one MH update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// Proposal accepted; the state now holds the new value.
    Accepted,
    /// Proposal rejected; the previous value stands.
    Rejected,
    /// Mode search or proposal fit failed; the previous value stands and no
    /// accept/reject decision was made.
    Skipped,
}

/// Conditional mode and local curvature of a one-sided shape target.
#[derive(Debug, Clone, Copy)]
pub struct ModeResult {
    /// Location of the conditional mode.
    pub mode: f64,
    /// Second derivative of the negative log target at the mode.
    pub curvature: f64,
    /// Evaluation points `(max(mode - w, mode/2), mode, mode + w)` with
    /// `w = sqrt(2 / curvature)`, used to fit the proposal.
    pub design: [f64; 3],
}

/// Gamma proposal in (shape, scale) form fitted to the log target.
#[derive(Debug, Clone, Copy)]
pub struct GammaProposal {
    pub shape: f64,
    pub scale: f64,
}

impl GammaProposal {
    /// Log density at `v`, including normalization.
    pub fn log_density(&self, v: f64) -> Result<f64> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain {
                func: "GammaProposal::log_density",
                what: "argument",
                requirement: "positive and finite",
                value: v,
            });
        }
        Ok((self.shape - 1.0) * v.ln() - v / self.scale
            - self.shape * self.scale.ln()
            - log_gamma(self.shape)?)
    }
}

/// Sufficient statistics of the observations plus the current shape pair.
#[derive(Debug, Clone)]
pub struct ShapeSamplerState {
    /// Current first shape.
    pub a: f64,
    /// Current second shape.
    pub b: f64,
    slog_x: f64,
    slog_cx: f64,
    n: usize,
}

impl ShapeSamplerState {
    /// Builds the state from observations in `(0, 1)`, with both shapes
    /// initialized to one.
    ///
    /// # Errors
    ///
    /// [`Error::Data`] if any observation falls outside `(0, 1)` or is not
    /// finite.
    pub fn from_observations(xs: &[f64]) -> Result<Self> {
        let mut state = ShapeSamplerState {
            a: 1.0,
            b: 1.0,
            slog_x: 0.0,
            slog_cx: 0.0,
            n: 0,
        };
        state.set_observations(xs)?;
        Ok(state)
    }

    /// Builds the state directly from log-sum accumulators (both shapes
    /// start at one).  Useful when the observations exist only implicitly.
    pub fn from_log_sums(slog_x: f64, slog_cx: f64, n: usize) -> Self {
        ShapeSamplerState {
            a: 1.0,
            b: 1.0,
            slog_x,
            slog_cx,
            n,
        }
    }

    /// Replaces the observations, keeping the current shape values.
    ///
    /// # Errors
    ///
    /// [`Error::Data`] if any observation falls outside `(0, 1)` or is not
    /// finite.
    pub fn set_observations(&mut self, xs: &[f64]) -> Result<()> {
        let mut slog_x = 0.0;
        let mut slog_cx = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            if !x.is_finite() || x <= 0.0 || x >= 1.0 {
                return Err(Error::data(format!(
                    "shape sampler observation {i} must lie strictly in (0, 1), got {x}"
                )));
            }
            slog_x += (x + LOG_EPS).ln();
            slog_cx += (1.0 - x + LOG_EPS).ln();
        }
        self.slog_x = slog_x;
        self.slog_cx = slog_cx;
        self.n = xs.len();
        Ok(())
    }

    /// Number of observations behind the accumulators.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when the state carries no observations (prior-only target).
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Current value of the given side.
    pub fn value(&self, side: Side) -> f64 {
        match side {
            Side::A => self.a,
            Side::B => self.b,
        }
    }

    fn set_value(&mut self, side: Side, v: f64) {
        match side {
            Side::A => self.a = v,
            Side::B => self.b = v,
        }
    }

    /// `(primary accumulator, secondary accumulator, fixed other shape)`
    /// for the given side.
    fn side_stats(&self, side: Side) -> (f64, f64, f64) {
        match side {
            Side::A => (self.slog_x, self.slog_cx, self.b),
            Side::B => (self.slog_cx, self.slog_x, self.a),
        }
    }

    /// Log conditional density (up to a constant) of one shape at `value`,
    /// holding the other side fixed at its current state.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] if `value` is non-positive or non-finite.
    pub fn log_conditional(&self, side: Side, value: f64) -> Result<f64> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Domain {
                func: "log_conditional",
                what: "shape value",
                requirement: "positive and finite",
                value,
            });
        }
        let (slog, _, other) = self.side_stats(side);
        let n = self.n as f64;
        Ok((value - 1.0) * slog - n * log_beta(value, other)? - (value * value).ln_1p())
    }

    /// Damped Newton search for the conditional mode of one shape.
    ///
    /// The closed-form initial guess
    /// `max(1/2 + m / (2 (1 - m - c)), 1e-4)` (with `m`, `c` the per-side
    /// mean log accumulators) is refined with Newton steps on the negative
    /// log target; any step that would go non-positive decays the learning
    /// rate by 0.9 and is retried rather than accepted.  Iteration stops
    /// when the relative change drops below `1e-3`.
    ///
    /// # Errors
    ///
    /// * [`Error::ModeSearchDiverged`] after 200 iterations without
    ///   convergence (the caller should skip this update and retain the
    ///   current value).
    /// * [`Error::DegenerateProposal`] if the curvature at the accepted
    ///   point is not positive, so no proposal width exists.
    pub fn find_mode(&self, side: Side) -> Result<ModeResult> {
        if self.n == 0 {
            return Err(Error::DegenerateProposal {
                reason: "mode search needs at least one observation",
            });
        }
        let (slog, slog_other, other) = self.side_stats(side);
        let n = self.n as f64;
        let m = slog / n;
        let c = slog_other / n;
        let mut v = (0.5 + m / (2.0 * (1.0 - m - c))).max(INIT_FLOOR);
        let mut kappa = 1.0;

        let gradient = |v: f64| -> Result<f64> {
            Ok(n * (digamma(v)? - digamma(v + other)?) - slog + 2.0 * v / (1.0 + v * v))
        };
        let curvature = |v: f64| -> Result<f64> {
            let q = 1.0 + v * v;
            Ok(n * (trigamma(v)? - trigamma(v + other)?) + 2.0 / q - 4.0 * v * v / (q * q))
        };

        for _ in 0..MODE_MAX_ITER {
            let g = gradient(v)?;
            let h = curvature(v)?;
            let step = kappa * g / h;
            if !step.is_finite() {
                return Err(Error::ModeSearchDiverged {
                    max_iter: MODE_MAX_ITER,
                });
            }
            let candidate = v - step;
            if candidate <= 0.0 {
                kappa *= STEP_DECAY;
                continue;
            }
            let rel = ((candidate - v) / v).abs();
            v = candidate;
            if rel < MODE_REL_TOL {
                let h_mode = curvature(v)?;
                if !(h_mode > 0.0) || !h_mode.is_finite() {
                    return Err(Error::DegenerateProposal {
                        reason: "non-positive curvature at the located mode",
                    });
                }
                let w = (2.0 / h_mode).sqrt();
                return Ok(ModeResult {
                    mode: v,
                    curvature: h_mode,
                    design: [(v - w).max(0.5 * v), v, v + w],
                });
            }
        }
        Err(Error::ModeSearchDiverged {
            max_iter: MODE_MAX_ITER,
        })
    }

    /// Fits the gamma proposal for one side by evaluating the log
    /// conditional at the design points of `mode`.
    ///
    /// # Errors
    ///
    /// [`Error::DegenerateProposal`] if the design is collinear or the
    /// fitted shape/scale is not positive.
    pub fn fit_gamma_proposal(&self, side: Side, mode: &ModeResult) -> Result<GammaProposal> {
        let mut y = [0.0; 3];
        for (yi, &d) in y.iter_mut().zip(mode.design.iter()) {
            *yi = self.log_conditional(side, d)?;
        }
        fit_gamma_from_values(&mode.design, &y)
    }

    /// One adaptive independence MH update of the chosen side.
    ///
    /// Mode-search or proposal-fit failures skip the update (the current
    /// value is retained); only domain-level failures propagate as errors.
    pub fn mh_step<R: Rng + ?Sized>(&mut self, rng: &mut R, side: Side) -> Result<StepOutcome> {
        let mode = match self.find_mode(side) {
            Ok(m) => m,
            Err(Error::ModeSearchDiverged { .. }) | Err(Error::DegenerateProposal { .. }) => {
                return Ok(StepOutcome::Skipped)
            }
            Err(e) => return Err(e),
        };
        let current = self.value(side);
        let target = |v: f64| self.log_conditional(side, v);
        let (next, outcome) = adaptive_mh_update(rng, current, target, &mode)?;
        self.set_value(side, next);
        Ok(outcome)
    }
}

/// Two-parameter least-squares fit of gamma sufficient statistics
/// `(ln v, v)` to three log-target values; `shape = slope_ln + 1`,
/// `scale = -1 / slope_linear`.
///
/// # Errors
///
/// [`Error::DegenerateProposal`] if the centered design is collinear or the
/// implied shape/scale is not positive and finite.
pub fn fit_gamma_from_values(design: &[f64; 3], y: &[f64; 3]) -> Result<GammaProposal> {
    let lx: Vec<f64> = design.iter().map(|v| v.ln()).collect();
    let mean_l = lx.iter().sum::<f64>() / 3.0;
    let mean_d = design.iter().sum::<f64>() / 3.0;
    let mean_y = y.iter().sum::<f64>() / 3.0;
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..3 {
        let u = lx[i] - mean_l;
        let v = design[i] - mean_d;
        let w = y[i] - mean_y;
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        t1 += u * w;
        t2 += v * w;
    }
    let det = s11 * s22 - s12 * s12;
    if !det.is_finite() || det.abs() <= f64::EPSILON * s11.abs().max(s22.abs()).max(1.0) {
        return Err(Error::DegenerateProposal {
            reason: "collinear design points",
        });
    }
    let eta1 = (s22 * t1 - s12 * t2) / det;
    let eta2 = (s11 * t2 - s12 * t1) / det;
    let shape = eta1 + 1.0;
    let scale = -1.0 / eta2;
    if !(shape > 0.0) || !(scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
        return Err(Error::DegenerateProposal {
            reason: "fitted proposal has non-positive shape or scale",
        });
    }
    Ok(GammaProposal { shape, scale })
}

/// Independence MH update against an arbitrary positive-support log target:
/// fits the gamma proposal at `mode`'s design points, draws a candidate, and
/// accepts with probability `exp(min(0, delta))` where `delta` is the log
/// posterior-ratio plus proposal correction.
///
/// Returns the (possibly unchanged) value and the outcome.  Proposal-fit
/// failures yield [`StepOutcome::Skipped`].
pub fn adaptive_mh_update<R, F>(
    rng: &mut R,
    current: f64,
    log_target: F,
    mode: &ModeResult,
) -> Result<(f64, StepOutcome)>
where
    R: Rng + ?Sized,
    F: Fn(f64) -> Result<f64>,
{
    let mut y = [0.0; 3];
    for (yi, &d) in y.iter_mut().zip(mode.design.iter()) {
        *yi = log_target(d)?;
    }
    let proposal = match fit_gamma_from_values(&mode.design, &y) {
        Ok(p) => p,
        Err(Error::DegenerateProposal { .. }) => return Ok((current, StepOutcome::Skipped)),
        Err(e) => return Err(e),
    };
    let candidate = draw_gamma(rng, proposal.shape, proposal.scale)?;
    let delta = log_target(candidate)? - log_target(current)? + proposal.log_density(current)?
        - proposal.log_density(candidate)?;
    let log_accept = delta.min(0.0);
    if rng.gen::<f64>().ln() < log_accept {
        Ok((candidate, StepOutcome::Accepted))
    } else {
        Ok((current, StepOutcome::Rejected))
    }
}

/// Options for [`gibbs_pair`].
#[derive(Debug, Clone, Copy)]
pub struct ShapePairConfig {
    /// Number of MH sweeps (each sweep updates both shapes once).
    pub sweeps: usize,
    /// Coordinate-wise mode searches used to warm-start `(a, b)` before
    /// sampling begins.
    pub warm_start_iters: usize,
}

impl Default for ShapePairConfig {
    fn default() -> Self {
        ShapePairConfig {
            sweeps: 2000,
            warm_start_iters: 5,
        }
    }
}

/// Joint draws and acceptance tallies from [`gibbs_pair`].
#[derive(Debug, Clone)]
pub struct ShapeChain {
    /// One `(a, b)` entry per sweep, recorded after both updates.
    pub draws: Vec<(f64, f64)>,
    pub accepted_a: usize,
    pub accepted_b: usize,
    pub skipped_a: usize,
    pub skipped_b: usize,
}

impl ShapeChain {
    /// Fraction of non-skipped first-shape updates that were accepted.
    pub fn acceptance_a(&self) -> f64 {
        let attempts = self.draws.len() - self.skipped_a;
        self.accepted_a as f64 / attempts.max(1) as f64
    }

    /// Fraction of non-skipped second-shape updates that were accepted.
    pub fn acceptance_b(&self) -> f64 {
        let attempts = self.draws.len() - self.skipped_b;
        self.accepted_b as f64 / attempts.max(1) as f64
    }

    /// Mean of the retained `(a, b)` draws.
    pub fn means(&self) -> (f64, f64) {
        let n = self.draws.len().max(1) as f64;
        let (sa, sb) = self
            .draws
            .iter()
            .fold((0.0, 0.0), |(sa, sb), &(a, b)| (sa + a, sb + b));
        (sa / n, sb / n)
    }
}

/// Two-block Gibbs sampler for a Beta shape pair: warm-starts `(a, b)` with
/// alternating mode searches, then alternates adaptive MH updates of each
/// side given the other.
///
/// # Errors
///
/// [`Error::Data`] if any observation lies outside `(0, 1)`.
pub fn gibbs_pair<R: Rng + ?Sized>(
    rng: &mut R,
    xs: &[f64],
    config: &ShapePairConfig,
) -> Result<ShapeChain> {
    let mut state = ShapeSamplerState::from_observations(xs)?;
    for _ in 0..config.warm_start_iters {
        if let Ok(m) = state.find_mode(Side::A) {
            state.a = m.mode;
        }
        if let Ok(m) = state.find_mode(Side::B) {
            state.b = m.mode;
        }
    }
    let mut chain = ShapeChain {
        draws: Vec::with_capacity(config.sweeps),
        accepted_a: 0,
        accepted_b: 0,
        skipped_a: 0,
        skipped_b: 0,
    };
    for _ in 0..config.sweeps {
        match state.mh_step(rng, Side::A)? {
            StepOutcome::Accepted => chain.accepted_a += 1,
            StepOutcome::Skipped => chain.skipped_a += 1,
            StepOutcome::Rejected => {}
        }
        match state.mh_step(rng, Side::B)? {
            StepOutcome::Accepted => chain.accepted_b += 1,
            StepOutcome::Skipped => chain.skipped_b += 1,
            StepOutcome::Rejected => {}
        }
        chain.draws.push((state.a, state.b));
    }
    Ok(chain)
}
