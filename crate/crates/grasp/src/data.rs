//! Design-matrix preparation: group layout validation, column
//! standardization, and mapping fitted coefficients back to the original
//! scale.
//!
//! The samplers in [`crate::gibbs`] assume centered, unit-variance columns
//! and a centered, unit-variance response, so the intercept drops out of
//! the linear predictor and a single global scale is meaningful across
//! coefficients.  [`Standardization`] records the transform so reported
//! coefficients and intercepts refer to the data as provided.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Partition of coefficient indices into contiguous, non-empty groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupLayout {
    ids: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl GroupLayout {
    /// Build a layout from per-coefficient group ids.
    ///
    /// Ids must be zero-based and every id below the maximum must occur at
    /// least once, so that group `g` is always addressable as index `g`.
    ///
    /// # Errors
    ///
    /// [`Error::Data`] when `ids` is empty or the ids leave a gap.
    pub fn new(ids: Vec<usize>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::data("group layout needs at least one coefficient"));
        }
        let groups = ids.iter().max().unwrap() + 1;
        let mut members = vec![Vec::new(); groups];
        for (j, &g) in ids.iter().enumerate() {
            members[g].push(j);
        }
        if let Some(empty) = members.iter().position(|m| m.is_empty()) {
            return Err(Error::Data(format!(
                "group ids must be contiguous from 0: group {empty} has no members"
            )));
        }
        Ok(GroupLayout { ids, members })
    }

    /// Layout with every coefficient in one group, for samplers that do not
    /// use group-level scales.
    pub fn single_group(p: usize) -> Result<Self> {
        Self::new(vec![0; p])
    }

    /// Number of coefficients.
    pub fn coefficients(&self) -> usize {
        self.ids.len()
    }

    /// Number of groups.
    pub fn groups(&self) -> usize {
        self.members.len()
    }

    /// Group id of coefficient `j`.
    pub fn group_of(&self, j: usize) -> usize {
        self.ids[j]
    }

    /// Coefficient indices in group `g`.
    pub fn members(&self, g: usize) -> &[usize] {
        &self.members[g]
    }

    /// Per-group member counts.
    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Per-coefficient ids, zero-based.
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }
}

/// Column and response transforms applied before sampling, kept so results
/// can be reported on the original scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub x_means: Vec<f64>,
    pub x_sds: Vec<f64>,
    pub y_mean: f64,
    pub y_sd: f64,
}

impl Standardization {
    /// Map a coefficient fitted on standardized data back to the original
    /// scale of column `j`.
    pub fn coef_to_original(&self, j: usize, coef_std: f64) -> f64 {
        coef_std * self.y_sd / self.x_sds[j]
    }

    /// Intercept on the original scale implied by original-scale
    /// coefficients.
    pub fn intercept(&self, coefs_original: &[f64]) -> f64 {
        let shift: f64 = coefs_original
            .iter()
            .zip(&self.x_means)
            .map(|(c, m)| c * m)
            .sum();
        self.y_mean - shift
    }
}

/// A standardized regression problem: unit-variance centered columns and
/// response, the group layout, and the transform that produced them.
#[derive(Debug, Clone)]
pub struct DesignData {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub groups: GroupLayout,
    pub standardization: Standardization,
}

fn mean_and_sd(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

impl DesignData {
    /// Standardize a raw design and response.
    ///
    /// Columns are centered and scaled to unit sample standard deviation
    /// (`n - 1` denominator), as is the response.
    ///
    /// # Errors
    ///
    /// [`Error::Data`] when dimensions disagree, fewer than two rows are
    /// provided, any value is non-finite, or a column or the response is
    /// (numerically) constant.
    pub fn standardize(
        x_raw: &DMatrix<f64>,
        y_raw: &DVector<f64>,
        groups: GroupLayout,
    ) -> Result<Self> {
        let n = x_raw.nrows();
        let p = x_raw.ncols();
        if y_raw.len() != n {
            return Err(Error::Data(format!(
                "design has {n} rows but response has {} values",
                y_raw.len()
            )));
        }
        if groups.coefficients() != p {
            return Err(Error::Data(format!(
                "design has {p} columns but group layout covers {}",
                groups.coefficients()
            )));
        }
        if n < 2 {
            return Err(Error::data(
                "standardization needs at least two observations",
            ));
        }
        if x_raw.iter().any(|v| !v.is_finite()) || y_raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("design and response must be finite"));
        }

        let mut x = x_raw.clone();
        let mut x_means = Vec::with_capacity(p);
        let mut x_sds = Vec::with_capacity(p);
        for j in 0..p {
            let (mean, sd) = mean_and_sd(x_raw.column(j).iter().copied(), n);
            if !(sd > 1e-12 * mean.abs().max(1.0)) {
                return Err(Error::Data(format!(
                    "column {j} has (numerically) zero variance and cannot be standardized"
                )));
            }
            for i in 0..n {
                x[(i, j)] = (x_raw[(i, j)] - mean) / sd;
            }
            x_means.push(mean);
            x_sds.push(sd);
        }

        let (y_mean, y_sd) = mean_and_sd(y_raw.iter().copied(), n);
        if !(y_sd > 1e-12 * y_mean.abs().max(1.0)) {
            return Err(Error::data(
                "response has (numerically) zero variance and cannot be standardized",
            ));
        }
        let y = DVector::from_iterator(n, y_raw.iter().map(|v| (v - y_mean) / y_sd));

        Ok(DesignData {
            x,
            y,
            groups,
            standardization: Standardization {
                x_means,
                x_sds,
                y_mean,
                y_sd,
            },
        })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of coefficients.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randdist::{draw_std_normal, RngStream};
    use approx::assert_abs_diff_eq;

    fn random_problem(seed: u64, n: usize, p: usize) -> (DMatrix<f64>, DVector<f64>) {
        let mut rng = RngStream::new(seed);
        let x = DMatrix::from_fn(n, p, |i, j| {
            3.0 * draw_std_normal(&mut rng) + (i + j) as f64 * 0.01 + j as f64
        });
        let y = DVector::from_fn(n, |i, _| {
            2.0 * x[(i, 0)] - 0.5 * x[(i, p - 1)] + draw_std_normal(&mut rng) + 7.0
        });
        (x, y)
    }

    #[test]
    fn group_layout_validates_and_indexes() {
        let layout = GroupLayout::new(vec![0, 0, 1, 2, 1]).unwrap();
        assert_eq!(layout.coefficients(), 5);
        assert_eq!(layout.groups(), 3);
        assert_eq!(layout.sizes(), vec![2, 2, 1]);
        assert_eq!(layout.members(1), &[2, 4]);
        assert_eq!(layout.group_of(3), 2);

        assert!(GroupLayout::new(Vec::new()).is_err());
        // Gap: id 2 present but id 1 missing.
        let err = GroupLayout::new(vec![0, 2]).unwrap_err();
        assert!(err.to_string().contains("group 1"));

        let single = GroupLayout::single_group(4).unwrap();
        assert_eq!(single.groups(), 1);
        assert_eq!(single.members(0), &[0, 1, 2, 3]);
    }

    #[test]
    fn standardized_columns_are_centered_with_unit_sd() {
        let (x, y) = random_problem(10, 40, 6);
        let layout = GroupLayout::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let data = DesignData::standardize(&x, &y, layout).unwrap();
        let n = data.n();
        for j in 0..data.p() {
            let (mean, sd) = mean_and_sd(data.x.column(j).iter().copied(), n);
            assert!(mean.abs() < 1e-10, "column {j} mean {mean}");
            assert!((sd - 1.0).abs() < 1e-8, "column {j} sd {sd}");
        }
        let (ym, ysd) = mean_and_sd(data.y.iter().copied(), n);
        assert!(ym.abs() < 1e-10);
        assert!((ysd - 1.0).abs() < 1e-8);
    }

    #[test]
    fn destandardized_least_squares_matches_raw_fit() {
        // Solve least squares on the standardized data, map back, and
        // compare against the intercept-augmented solve on the raw data.
        let (x, y) = random_problem(11, 60, 4);
        let n = x.nrows();
        let p = x.ncols();

        let mut augmented = DMatrix::zeros(n, p + 1);
        augmented.column_mut(0).fill(1.0);
        augmented.view_mut((0, 1), (n, p)).copy_from(&x);
        let normal = augmented.transpose() * &augmented;
        let rhs = augmented.transpose() * &y;
        let raw = normal.cholesky().unwrap().solve(&rhs);

        let layout = GroupLayout::single_group(p).unwrap();
        let data = DesignData::standardize(&x, &y, layout).unwrap();
        let normal_std = data.x.transpose() * &data.x;
        let rhs_std = data.x.transpose() * &data.y;
        let std_coefs = normal_std.cholesky().unwrap().solve(&rhs_std);

        let original: Vec<f64> = (0..p)
            .map(|j| data.standardization.coef_to_original(j, std_coefs[j]))
            .collect();
        for j in 0..p {
            assert_abs_diff_eq!(original[j], raw[j + 1], epsilon = 1e-8);
        }
        let intercept = data.standardization.intercept(&original);
        assert_abs_diff_eq!(intercept, raw[0], epsilon = 1e-8);
    }

    #[test]
    fn zero_variance_column_is_rejected() {
        let (mut x, y) = random_problem(12, 30, 3);
        for i in 0..x.nrows() {
            x[(i, 1)] = 42.0;
        }
        let layout = GroupLayout::single_group(3).unwrap();
        let err = DesignData::standardize(&x, &y, layout).unwrap_err();
        assert!(err.to_string().contains("column 1"));
    }

    #[test]
    fn constant_response_is_rejected() {
        let (x, _) = random_problem(13, 30, 3);
        let y = DVector::from_element(30, 5.0);
        let layout = GroupLayout::single_group(3).unwrap();
        let err = DesignData::standardize(&x, &y, layout).unwrap_err();
        assert!(err.to_string().contains("response"));
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let (x, y) = random_problem(14, 30, 3);
        let short_layout = GroupLayout::single_group(2).unwrap();
        assert!(DesignData::standardize(&x, &y, short_layout).is_err());

        let y_short = DVector::from_element(29, 0.0);
        let layout = GroupLayout::single_group(3).unwrap();
        assert!(DesignData::standardize(&x, &y_short, layout).is_err());

        let tiny = DMatrix::from_element(1, 3, 1.0);
        let y_tiny = DVector::from_element(1, 1.0);
        let layout = GroupLayout::single_group(3).unwrap();
        assert!(DesignData::standardize(&tiny, &y_tiny, layout).is_err());

        let (mut x_nan, y2) = random_problem(15, 30, 3);
        x_nan[(0, 0)] = f64::NAN;
        let layout = GroupLayout::single_group(3).unwrap();
        assert!(DesignData::standardize(&x_nan, &y2, layout).is_err());
    }
}
