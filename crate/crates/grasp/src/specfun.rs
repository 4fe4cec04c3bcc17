//! Scalar special functions: log-gamma, digamma, trigamma, log-beta, and the
//! logistic function.
//!
//! These are implemented in-repo (Stirling/Bernoulli asymptotic series with
//! upward recurrence out of the small-argument range) rather than delegated
//! to a system libm, so results are bit-stable across platforms.  All four
//! gamma-family functions share the same scheme: shift the argument above
//! `SHIFT_THRESHOLD` with the exact recurrence, then evaluate the asymptotic
//! series, whose truncation error at the threshold is far below f64 epsilon.
//!
//! Domain violations (non-positive or non-finite arguments) return
//! [`Error::Domain`] instead of NaN so samplers cannot silently propagate
//! garbage.

use crate::error::{Error, Result};

/// Euler-Mascheroni constant, `-digamma(1)`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments below this are shifted up by exact recurrences before the
/// asymptotic series is applied.  At `z = 12` the first omitted Bernoulli
/// term of each series is below `1e-17` in absolute value.
const SHIFT_THRESHOLD: f64 = 12.0;

/// `0.5 * ln(2 * pi)`.
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

fn check_positive(func: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            func,
            what: "argument",
            requirement: "positive and finite",
            value: x,
        })
    }
}

/// Natural log of the gamma function for `x > 0`.
///
/// Uses the recurrence `ln Gamma(x) = ln Gamma(x + 1) - ln x` to reach the
/// asymptotic range, then the Stirling series
/// `(z - 1/2) ln z - z + ln(2 pi)/2 + sum_k B_2k / (2k (2k-1) z^(2k-1))`
/// truncated after the `z^-13` term.
///
/// # Errors
///
/// [`Error::Domain`] if `x` is non-positive or non-finite.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    let mut shift = 0.0;
    let mut z = x;
    while z < SHIFT_THRESHOLD {
        shift -= z.ln();
        z += 1.0;
    }
    // Bernoulli coefficients B_2k / (2k (2k-1)) for k = 1..=7, evaluated by
    // Horner's rule in 1/z^2.
    let w = 1.0 / (z * z);
    let series = (1.0 / 12.0
        + w * (-1.0 / 360.0
            + w * (1.0 / 1260.0
                + w * (-1.0 / 1680.0
                    + w * (1.0 / 1188.0
                        + w * (-691.0 / 360_360.0 + w * (1.0 / 156.0)))))))
        / z;
    Ok(shift + (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series)
}

/// Digamma function `psi(x) = d/dx ln Gamma(x)` for `x > 0`.
///
/// Shifts with `psi(x) = psi(x + 1) - 1/x`, then evaluates
/// `ln z - 1/(2z) - sum_k B_2k / (2k z^2k)` truncated after the `z^-14`
/// term.
///
/// # Errors
///
/// [`Error::Domain`] if `x` is non-positive or non-finite.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut shift = 0.0;
    let mut z = x;
    while z < SHIFT_THRESHOLD {
        shift -= 1.0 / z;
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    let series = w
        * (1.0 / 12.0
            + w * (-1.0 / 120.0
                + w * (1.0 / 252.0
                    + w * (-1.0 / 240.0
                        + w * (1.0 / 132.0
                            + w * (-691.0 / 32_760.0 + w * (1.0 / 12.0)))))));
    Ok(shift + z.ln() - 0.5 / z - series)
}

/// Trigamma function `psi'(x) = d^2/dx^2 ln Gamma(x)` for `x > 0`.
///
/// Shifts with `psi'(x) = psi'(x + 1) + 1/x^2`, then evaluates
/// `1/z + 1/(2 z^2) + sum_k B_2k / z^(2k+1)` truncated after the `z^-15`
/// term.
///
/// # Errors
///
/// [`Error::Domain`] if `x` is non-positive or non-finite.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    let mut shift = 0.0;
    let mut z = x;
    while z < SHIFT_THRESHOLD {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    let series = w / z
        * (1.0 / 6.0
            + w * (-1.0 / 30.0
                + w * (1.0 / 42.0
                    + w * (-1.0 / 30.0
                        + w * (5.0 / 66.0
                            + w * (-691.0 / 2730.0 + w * (7.0 / 6.0)))))));
    Ok(shift + 1.0 / z + 0.5 * w + series)
}

/// Natural log of the beta function, `ln B(a, b)`.
///
/// # Errors
///
/// [`Error::Domain`] if either argument is non-positive or non-finite.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    check_positive("log_beta", a)?;
    check_positive("log_beta", b)?;
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// Logistic function `1 / (1 + exp(-x))`, guarded so the result is strictly
/// inside `(0, 1)` even where the exact value would round to 1.
///
/// Large positive arguments saturate at `1 - eps/2` (the largest double
/// below one) instead of 1 so that downstream logs of `1 - logistic(x)`
/// stay finite.
pub fn logistic(x: f64) -> f64 {
    let v = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// Stable `ln(logistic(x)) = -ln(1 + exp(-x))`, without the saturation
/// clamp of [`logistic`]: accurate for arguments of either sign and any
/// magnitude.
pub fn log_logistic(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const LN_PI: f64 = 1.144_729_885_849_400_2;

    #[test]
    fn log_gamma_known_values() {
        assert_abs_diff_eq!(log_gamma(1.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(log_gamma(2.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            log_gamma(0.5).unwrap(),
            0.5 * LN_PI,
            epsilon = 1e-12
        );
        // Gamma(10) = 9! = 362880.
        assert_abs_diff_eq!(
            log_gamma(10.0).unwrap(),
            362_880.0_f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn log_gamma_tiny_and_large_arguments_stay_accurate() {
        // Gamma(x) ~ 1/x - gamma + O(x) near zero, so
        // ln Gamma(1e-6) = ln(Gamma(1 + 1e-6)) - ln(1e-6).
        let tiny = log_gamma(1e-6).unwrap();
        let via_recurrence = log_gamma(1.0 + 1e-6).unwrap() - 1e-6_f64.ln();
        assert_abs_diff_eq!(tiny, via_recurrence, epsilon = 1e-12);
        // Large arguments: relative accuracy against the recurrence.
        let big = log_gamma(1e6).unwrap();
        let via = log_gamma(1e6 + 1.0).unwrap() - 1e6_f64.ln();
        assert!((big - via).abs() / big.abs() < 1e-14);
    }

    #[test]
    fn digamma_known_values() {
        assert_abs_diff_eq!(digamma(1.0).unwrap(), -EULER_GAMMA, epsilon = 1e-10);
        assert_abs_diff_eq!(
            digamma(2.0).unwrap(),
            1.0 - EULER_GAMMA,
            epsilon = 1e-10
        );
        // psi(1/2) = -gamma - 2 ln 2.
        assert_abs_diff_eq!(
            digamma(0.5).unwrap(),
            -EULER_GAMMA - 2.0 * 2.0_f64.ln(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn trigamma_known_values() {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_abs_diff_eq!(trigamma(1.0).unwrap(), pi2 / 6.0, epsilon = 1e-10);
        assert_abs_diff_eq!(trigamma(0.5).unwrap(), pi2 / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            trigamma(2.0).unwrap(),
            pi2 / 6.0 - 1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn log_beta_known_values() {
        // B(1/2, 1/2) = pi.
        assert_abs_diff_eq!(log_beta(0.5, 0.5).unwrap(), LN_PI, epsilon = 1e-12);
        // B(2, 3) = Gamma(2) Gamma(3) / Gamma(5) = 2/24 = 1/12.
        assert_abs_diff_eq!(
            log_beta(2.0, 3.0).unwrap(),
            -12.0_f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(log_beta(1.0, 1.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn recurrences_hold_on_log_spaced_grid() {
        // 61 log-spaced points covering 1e-3..1e3.
        for i in 0..=60 {
            let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 60.0);
            let lg = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
            assert!(lg.abs() < 1e-9, "log_gamma recurrence at x={x}: {lg:e}");
            let dg = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            assert!(dg.abs() < 1e-9, "digamma recurrence at x={x}: {dg:e}");
            let tg =
                trigamma(x + 1.0).unwrap() - trigamma(x).unwrap() + 1.0 / (x * x);
            assert!(tg.abs() < 1e-9, "trigamma recurrence at x={x}: {tg:e}");
        }
    }

    #[test]
    fn digamma_matches_log_gamma_slope() {
        // Central differences of log_gamma; loose tolerance dominated by the
        // O(h^2) truncation of the difference quotient.
        let h = 1e-5;
        for &x in &[0.3, 1.0, 2.5, 7.0, 40.0] {
            let fd =
                (log_gamma(x + h).unwrap() - log_gamma(x - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(digamma(x).unwrap(), fd, epsilon = 1e-6);
            let fd2 =
                (digamma(x + h).unwrap() - digamma(x - h).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(trigamma(x).unwrap(), fd2, epsilon = 1e-5);
        }
    }

    #[test]
    fn domain_violations_are_rejected() {
        for f in [log_gamma, digamma, trigamma] {
            assert!(f(0.0).is_err());
            assert!(f(-1.5).is_err());
            assert!(f(f64::NAN).is_err());
            assert!(f(f64::INFINITY).is_err());
        }
        assert!(log_beta(1.0, 0.0).is_err());
        assert!(log_beta(-1.0, 1.0).is_err());
    }

    #[test]
    fn logistic_is_strictly_inside_unit_interval() {
        assert_eq!(logistic(0.0), 0.5);
        assert_abs_diff_eq!(logistic(2.0), 0.880_797_077_977_882_3, epsilon = 1e-12);
        let hi = logistic(37.0);
        let lo = logistic(-37.0);
        assert!(hi < 1.0 && hi > 0.999_999);
        assert!(lo > 0.0 && lo < 1e-15);
        // Saturation guard holds even far past double precision.
        assert!(logistic(1e4) < 1.0);
        assert!(logistic(-1e4) > 0.0);
    }

    #[test]
    fn log_logistic_matches_direct_log() {
        for &x in &[-30.0, -2.0, 0.0, 2.0, 30.0] {
            assert_abs_diff_eq!(
                log_logistic(x),
                logistic(x).ln(),
                epsilon = 1e-12
            );
        }
        // Deep negative tail: log_logistic(x) ~ x, where logistic(x).ln()
        // would underflow to -inf past x ~ -745.
        assert_abs_diff_eq!(log_logistic(-800.0), -800.0, epsilon = 1e-12);
        assert_eq!(log_logistic(0.0), -(2.0_f64.ln()));
    }
}
