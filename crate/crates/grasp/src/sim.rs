//! Synthetic-data study harness: block-correlated designs with grouped
//! sparse coefficient patterns, noise calibrated by signal-to-noise ratio,
//! and stratified mean-squared-error scoring of competing estimators.
//!
//! Four named scenarios cover the sparsity spectrum: `concentrated` (one
//! active coefficient per group), `distributed` (one fully active group),
//! `dense` (most coefficients active), and `half` (mixed activity with
//! some fully null groups).  Rows of the design are drawn from a zero-mean
//! normal whose correlation is 0.8 within groups and 0.2 across groups,
//! and the noise variance is `betaᵀ Σ beta / SNR`.
//!
//! Scores are stratified: `z0` sums squared errors over truly null
//! coefficients, `nz0` over truly nonzero ones, and `oa = z0 + nz0`; each
//! stratum is summed within a replicate and averaged across replicates.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::data::{DesignData, GroupLayout};
use crate::error::{Error, Result};
use crate::gibbs::{run_chain, HyperConfig};
use crate::randdist::{draw_std_normal, splitmix64, RngStream};

/// How one group's active coefficients get their true values.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefRule {
    /// Every active coefficient in the group takes this value.
    Constant(f64),
    /// Each active coefficient independently takes a value sampled with
    /// replacement from this list, fresh per replicate.
    UniformFrom(Vec<f64>),
}

/// One group's size, number of active coefficients, and value rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub size: usize,
    pub active: usize,
    /// `None` if and only if the group has no active coefficients.
    pub rule: Option<CoefRule>,
}

impl GroupSpec {
    fn constant(size: usize, active: usize, value: f64) -> Self {
        GroupSpec {
            size,
            active,
            rule: Some(CoefRule::Constant(value)),
        }
    }

    fn uniform(size: usize, active: usize, values: &[f64]) -> Self {
        GroupSpec {
            size,
            active,
            rule: Some(CoefRule::UniformFrom(values.to_vec())),
        }
    }

    fn inactive(size: usize) -> Self {
        GroupSpec {
            size,
            active: 0,
            rule: None,
        }
    }
}

/// A named synthetic-study configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub name: &'static str,
    pub n: usize,
    pub groups: Vec<GroupSpec>,
    pub within_corr: f64,
    pub across_corr: f64,
    pub snr: f64,
    pub replicates: usize,
}

impl SimScenario {
    fn with_groups(
        name: &'static str,
        n: usize,
        groups: Vec<GroupSpec>,
        snr: f64,
        replicates: usize,
    ) -> Self {
        SimScenario {
            name,
            n,
            groups,
            within_corr: 0.8,
            across_corr: 0.2,
            snr,
            replicates,
        }
    }

    /// Five groups of ten, one active coefficient per group with values
    /// 0.5, 1, 1.5, 2, 2; 500 observations.
    pub fn concentrated(snr: f64, replicates: usize) -> Self {
        let groups = [0.5, 1.0, 1.5, 2.0, 2.0]
            .iter()
            .map(|&v| GroupSpec::constant(10, 1, v))
            .collect();
        Self::with_groups("concentrated", 500, groups, snr, replicates)
    }

    /// Five groups of ten, the first fully active at 0.5, the rest null;
    /// 500 observations.
    pub fn distributed(snr: f64, replicates: usize) -> Self {
        let mut groups = vec![GroupSpec::constant(10, 10, 0.5)];
        groups.extend((0..4).map(|_| GroupSpec::inactive(10)));
        Self::with_groups("distributed", 500, groups, snr, replicates)
    }

    /// Six groups totalling 100 coefficients, nearly all active, mixing
    /// constant and sampled values; 300 observations.
    pub fn dense(snr: f64, replicates: usize) -> Self {
        let groups = vec![
            GroupSpec::uniform(30, 27, &[3.0, 5.0, 8.0]),
            GroupSpec::uniform(10, 8, &[2.0, 3.0, 4.0, 5.0]),
            GroupSpec::constant(20, 18, 7.5),
            GroupSpec::uniform(5, 4, &[9.5, 8.0, 7.0]),
            GroupSpec::constant(15, 14, 1.5),
            GroupSpec::constant(20, 18, 0.5),
        ];
        Self::with_groups("dense", 300, groups, snr, replicates)
    }

    /// Seven groups totalling 80 coefficients, roughly half active with
    /// two fully null groups; 200 observations.
    pub fn half(snr: f64, replicates: usize) -> Self {
        let groups = vec![
            GroupSpec::constant(25, 22, 0.8),
            GroupSpec::inactive(10),
            GroupSpec::constant(10, 3, 2.5),
            GroupSpec::constant(10, 8, 1.5),
            GroupSpec::inactive(5),
            GroupSpec::uniform(15, 4, &[1.0, 2.0, 3.0, 5.0]),
            GroupSpec::constant(5, 1, 2.0),
        ];
        Self::with_groups("half", 200, groups, snr, replicates)
    }

    /// Scenario by name; `None` for an unknown name.
    pub fn by_name(name: &str, snr: f64, replicates: usize) -> Option<Self> {
        match name {
            "concentrated" => Some(Self::concentrated(snr, replicates)),
            "distributed" => Some(Self::distributed(snr, replicates)),
            "dense" => Some(Self::dense(snr, replicates)),
            "half" => Some(Self::half(snr, replicates)),
            _ => None,
        }
    }

    /// Total number of coefficients.
    pub fn p(&self) -> usize {
        self.groups.iter().map(|g| g.size).sum()
    }

    /// Group layout matching the scenario's block structure.
    pub fn layout(&self) -> Result<GroupLayout> {
        let mut ids = Vec::with_capacity(self.p());
        for (g, spec) in self.groups.iter().enumerate() {
            ids.extend(std::iter::repeat(g).take(spec.size));
        }
        GroupLayout::new(ids)
    }

    fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::data("a scenario needs at least one group"));
        }
        if self.n < 2 {
            return Err(Error::data("a scenario needs at least two observations"));
        }
        for (g, spec) in self.groups.iter().enumerate() {
            if spec.size == 0 {
                return Err(Error::Data(format!("group {g} has size zero")));
            }
            if spec.active > spec.size {
                return Err(Error::Data(format!(
                    "group {g} has {} active coefficients but size {}",
                    spec.active, spec.size
                )));
            }
            match (&spec.rule, spec.active) {
                (None, 0) => {}
                (None, _) => {
                    return Err(Error::Data(format!(
                        "group {g} has active coefficients but no value rule"
                    )));
                }
                (Some(_), 0) => {
                    return Err(Error::Data(format!(
                        "group {g} has a value rule but no active coefficients"
                    )));
                }
                (Some(CoefRule::UniformFrom(values)), _) if values.is_empty() => {
                    return Err(Error::Data(format!(
                        "group {g} samples coefficients from an empty list"
                    )));
                }
                (Some(_), _) => {}
            }
        }
        if !(self.within_corr.is_finite()
            && self.across_corr.is_finite()
            && self.within_corr.abs() < 1.0
            && self.across_corr.abs() < 1.0)
        {
            return Err(Error::data("correlations must lie strictly inside (-1, 1)"));
        }
        if !(self.snr.is_finite() && self.snr > 0.0) {
            return Err(Error::data("the signal-to-noise ratio must be positive"));
        }
        if self.replicates == 0 {
            return Err(Error::data("a scenario needs at least one replicate"));
        }
        Ok(())
    }
}

/// Block-structured design correlation matrix: unit diagonal, the within
/// correlation inside each group, the across correlation elsewhere;
/// verified positive definite.
///
/// # Errors
///
/// [`Error::Data`] for invalid scenarios; [`Error::NotPositiveDefinite`]
/// when the factorization fails.
pub fn build_covariance(scenario: &SimScenario) -> Result<DMatrix<f64>> {
    scenario.validate()?;
    let layout = scenario.layout()?;
    let p = scenario.p();
    let mut cov = DMatrix::from_element(p, p, scenario.across_corr);
    for j in 0..p {
        for k in 0..p {
            if layout.group_of(j) == layout.group_of(k) {
                cov[(j, k)] = scenario.within_corr;
            }
        }
        cov[(j, j)] = 1.0;
    }
    if cov.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite {
            context: "design correlation matrix",
        });
    }
    Ok(cov)
}

/// Noise variance giving the requested signal-to-noise ratio:
/// `betaᵀ Σ beta / SNR`.
///
/// # Errors
///
/// [`Error::Data`] when the signal power is not strictly positive.
pub fn calibrate_noise(scenario: &SimScenario, beta: &DVector<f64>, cov: &DMatrix<f64>) -> Result<f64> {
    let signal = (beta.transpose() * cov * beta)[(0, 0)];
    if !(signal.is_finite() && signal > 0.0) {
        return Err(Error::data(
            "signal power is not positive; the true coefficients cannot all be zero",
        ));
    }
    Ok(signal / scenario.snr)
}

/// One generated dataset with its ground truth.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub beta_true: DVector<f64>,
    pub sigma2: f64,
}

/// Draw one dataset: true coefficients per the group rules (active ones
/// occupy the first indices of each group), design rows from the block
/// correlation model, and noise calibrated to the scenario's
/// signal-to-noise ratio.
///
/// # Errors
///
/// Scenario validation errors; factorization failure of the correlation
/// matrix.
pub fn generate_replicate<R: Rng + ?Sized>(rng: &mut R, scenario: &SimScenario) -> Result<Replicate> {
    scenario.validate()?;
    let p = scenario.p();
    let n = scenario.n;
    let cov = build_covariance(scenario)?;

    let mut beta = DVector::zeros(p);
    let mut offset = 0;
    for spec in &scenario.groups {
        for j in 0..spec.active {
            beta[offset + j] = match spec.rule.as_ref().unwrap() {
                CoefRule::Constant(v) => *v,
                CoefRule::UniformFrom(values) => values[rng.gen_range(0..values.len())],
            };
        }
        offset += spec.size;
    }

    let sigma2 = calibrate_noise(scenario, &beta, &cov)?;
    let chol = cov.cholesky().ok_or(Error::NotPositiveDefinite {
        context: "design correlation matrix",
    })?;
    let z = DMatrix::from_fn(n, p, |_, _| draw_std_normal(rng));
    let x = z * chol.l().transpose();
    let sigma = sigma2.sqrt();
    let y = DVector::from_fn(n, |i, _| {
        let mut mean = 0.0;
        for j in 0..p {
            mean += x[(i, j)] * beta[j];
        }
        mean + sigma * draw_std_normal(rng)
    });
    Ok(Replicate {
        x,
        y,
        beta_true: beta,
        sigma2,
    })
}

/// Stratified squared-error score for one fitted coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseReport {
    /// Sum of squared estimates over truly null coefficients.
    pub z0: f64,
    /// Sum of squared errors over truly nonzero coefficients.
    pub nz0: f64,
    /// `z0 + nz0`, exactly.
    pub oa: f64,
    /// Wall time of the fit in seconds; zero when scored standalone.
    pub wall_time: f64,
}

/// Score an estimate against the truth: squared errors summed within the
/// null and nonzero strata.
///
/// # Errors
///
/// [`Error::Data`] on length mismatch.
pub fn evaluate(estimate: &DVector<f64>, truth: &DVector<f64>) -> Result<MseReport> {
    if estimate.len() != truth.len() {
        return Err(Error::Data(format!(
            "estimate has {} coefficients but truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    let mut z0 = 0.0;
    let mut nz0 = 0.0;
    for j in 0..truth.len() {
        let err = estimate[j] - truth[j];
        if truth[j] == 0.0 {
            z0 += err * err;
        } else {
            nz0 += err * err;
        }
    }
    Ok(MseReport {
        z0,
        nz0,
        oa: z0 + nz0,
        wall_time: 0.0,
    })
}

/// The estimators a study can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Ordinary least squares with an intercept.
    Ols,
    /// Ungrouped shrinkage sampler with learned local shapes.
    Rasp,
    /// Grouped sampler, group-level left shape pinned at `1/n`, right
    /// shape learned.
    GraspFixedALearnB,
    /// Grouped sampler learning all shapes.
    GraspLearnAb,
}

impl Estimator {
    /// Stable machine name used in reports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Ols => "ols",
            Estimator::Rasp => "rasp",
            Estimator::GraspFixedALearnB => "grasp_fixed_a_learn_b",
            Estimator::GraspLearnAb => "grasp_learn_ab",
        }
    }

    /// Estimator by machine name; `None` for an unknown name.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "ols" => Some(Estimator::Ols),
            "rasp" => Some(Estimator::Rasp),
            "grasp_fixed_a_learn_b" => Some(Estimator::GraspFixedALearnB),
            "grasp_learn_ab" => Some(Estimator::GraspLearnAb),
            _ => None,
        }
    }

    /// Stable ordinal used for random-stream derivation, independent of
    /// the order estimators are listed in a study.
    fn ordinal(&self) -> u64 {
        match self {
            Estimator::Ols => 0,
            Estimator::Rasp => 1,
            Estimator::GraspFixedALearnB => 2,
            Estimator::GraspLearnAb => 3,
        }
    }
}

/// Study-wide sampler schedule and seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub scenarios: Vec<SimScenario>,
    pub estimators: Vec<Estimator>,
    pub master_seed: u64,
    pub burnin: usize,
    pub samples: usize,
    pub thin: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            scenarios: Vec::new(),
            estimators: Vec::new(),
            master_seed: 0,
            burnin: 2000,
            samples: 2000,
            thin: 1,
        }
    }
}

/// One aggregated report row: mean stratified errors and mean fit time
/// for an estimator on a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub scenario: &'static str,
    pub snr: f64,
    pub estimator: &'static str,
    pub z0: f64,
    pub nz0: f64,
    pub oa: f64,
    pub time_s: f64,
    /// Replicates that produced a fit (failures are excluded from means).
    pub replicates_used: usize,
}

fn scenario_stream(master_seed: u64, name: &str, replicate: u64) -> RngStream {
    let mut key = 0xc0ff_ee11_d00d_f00du64 ^ master_seed;
    for byte in name.bytes() {
        key = splitmix64(key ^ byte as u64);
    }
    RngStream::new(splitmix64(key)).substream(replicate)
}

/// Fit one estimator to one replicate and report its original-scale
/// coefficient estimate.
fn fit_estimator(
    estimator: Estimator,
    replicate: &Replicate,
    layout: &GroupLayout,
    schedule: &StudyConfig,
    fit_seed: u64,
) -> Result<DVector<f64>> {
    match estimator {
        Estimator::Ols => {
            let n = replicate.x.nrows();
            let p = replicate.x.ncols();
            let mut augmented = DMatrix::zeros(n, p + 1);
            augmented.column_mut(0).fill(1.0);
            augmented.view_mut((0, 1), (n, p)).copy_from(&replicate.x);
            let normal = augmented.transpose() * &augmented;
            let rhs = augmented.transpose() * &replicate.y;
            let solution = normal
                .cholesky()
                .ok_or(Error::NotPositiveDefinite {
                    context: "least-squares normal equations",
                })?
                .solve(&rhs);
            Ok(DVector::from_fn(p, |j, _| solution[j + 1]))
        }
        Estimator::Rasp | Estimator::GraspFixedALearnB | Estimator::GraspLearnAb => {
            let base = match estimator {
                Estimator::Rasp => HyperConfig::rasp(),
                Estimator::GraspFixedALearnB => {
                    HyperConfig::grasp_fixed_a_learn_b(replicate.x.nrows())
                }
                Estimator::GraspLearnAb => HyperConfig::grasp_learn_ab(),
                Estimator::Ols => unreachable!(),
            };
            let config = HyperConfig {
                burnin: schedule.burnin,
                samples: schedule.samples,
                thin: schedule.thin,
                seed: fit_seed,
                ..base
            };
            let data = DesignData::standardize(&replicate.x, &replicate.y, layout.clone())?;
            let draws = run_chain(&data, &config)?;
            Ok(DVector::from_fn(data.p(), |j, _| {
                data.standardization
                    .coef_to_original(j, draws.summary[j].mean)
            }))
        }
    }
}

/// Run every estimator on every replicate of every scenario and aggregate
/// stratified errors.
///
/// Replicates are independent parallel jobs; every replicate derives its
/// own random stream from the master seed, the scenario name, and the
/// replicate index, and all estimators score the same replicate data.
/// Metrics are deterministic for a given configuration; only `time_s`
/// varies between runs.
///
/// # Errors
///
/// Scenario validation errors; [`Error::Data`] if more than 5% of fits
/// fail.
pub fn run_study(config: &StudyConfig) -> Result<Vec<StudyRow>> {
    if config.scenarios.is_empty() || config.estimators.is_empty() {
        return Err(Error::data("a study needs at least one scenario and estimator"));
    }
    let mut rows = Vec::new();
    let mut total_fits = 0usize;
    let mut failed_fits = 0usize;
    for scenario in &config.scenarios {
        scenario.validate()?;
        let layout = scenario.layout()?;
        let per_replicate: Vec<Vec<Option<MseReport>>> = (0..scenario.replicates as u64)
            .into_par_iter()
            .map(|replicate| {
                let stream = scenario_stream(config.master_seed, scenario.name, replicate);
                let mut data_rng = stream.substream(0);
                let generated = generate_replicate(&mut data_rng, scenario)?;
                let mut reports = Vec::with_capacity(config.estimators.len());
                for estimator in &config.estimators {
                    let fit_seed = stream.substream(1 + estimator.ordinal()).key();
                    let start = Instant::now();
                    let fit = fit_estimator(*estimator, &generated, &layout, config, fit_seed);
                    let elapsed = start.elapsed().as_secs_f64();
                    match fit {
                        Ok(estimate) => {
                            let mut report = evaluate(&estimate, &generated.beta_true)?;
                            report.wall_time = elapsed;
                            reports.push(Some(report));
                        }
                        Err(_) => reports.push(None),
                    }
                }
                Ok(reports)
            })
            .collect::<Result<Vec<_>>>()?;

        for (e, estimator) in config.estimators.iter().enumerate() {
            let mut z0 = 0.0;
            let mut nz0 = 0.0;
            let mut time_s = 0.0;
            let mut used = 0usize;
            for reports in &per_replicate {
                total_fits += 1;
                match &reports[e] {
                    Some(report) => {
                        z0 += report.z0;
                        nz0 += report.nz0;
                        time_s += report.wall_time;
                        used += 1;
                    }
                    None => failed_fits += 1,
                }
            }
            let denom = used.max(1) as f64;
            let z0_mean = z0 / denom;
            let nz0_mean = nz0 / denom;
            rows.push(StudyRow {
                scenario: scenario.name,
                snr: scenario.snr,
                estimator: estimator.name(),
                z0: z0_mean,
                nz0: nz0_mean,
                oa: z0_mean + nz0_mean,
                time_s: time_s / denom,
                replicates_used: used,
            });
        }
    }
    if failed_fits * 20 > total_fits {
        return Err(Error::Data(format!(
            "{failed_fits} of {total_fits} fits failed, above the 5% study limit"
        )));
    }
    Ok(rows)
}
