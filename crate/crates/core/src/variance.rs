//! Exact time-varying variance of the chart's EWMA statistic.
//!
//! The statistic `r_t` smooths standardized cumulative counts whose
//! correlation structure is `Corr(W_s, W_t) = sqrt(s/t)` for `s <= t`, which
//! gives
//!
//! ```text
//! Var(r_t) = lambda^2 * [ 2 * sum_{j=1}^{t-1} sum_{i=j+1}^{t} (1-lambda)^(2t-i-j) * sqrt(j)/sqrt(i)
//!                         + sum_{i=1}^{t} (1-lambda)^(2t-2i) ]
//! ```
//!
//! with the convention `0^0 = 1` so that `lambda = 1` is well defined
//! (`Var == 1` for every `t`).
//!
//! [`variance_exact_direct`] evaluates the double sum literally in `O(t^2)`
//! time and serves as the reference. [`VarianceRecurrence`] produces the same
//! values in `O(1)` per period by grouping the cross sum per `i`:
//!
//! ```text
//! B_1 = 0,  B_{i+1} = (1-lambda) * (B_i + sqrt(i))
//! V_t = (1-lambda)^2 * V_{t-1} + lambda^2 * (1 + 2 * B_t / sqrt(t))
//! ```
//!
//! The equivalence of the two routes is enforced by tests down to 1e-10
//! relative error; monitoring code must use the recurrence.

use crate::error::Error;
use crate::math;

fn check_lambda(lambda: f64) -> Result<(), Error> {
    if !(lambda.is_finite() && lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidLambda { lambda });
    }
    Ok(())
}

/// Literal evaluation of the double-sum variance formula.
///
/// `O(t^2)` time; this is the test oracle and the reference for
/// `validate-variance` sweeps, not the monitoring path. Decay powers are
/// accumulated multiplicatively, which keeps the evaluation allocation-free;
/// with `lambda = 1` every accumulated power past `(1-lambda)^0 = 1`
/// collapses to zero, preserving the `0^0 = 1` convention.
pub fn variance_exact_direct(lambda: f64, t: u64) -> Result<f64, Error> {
    check_lambda(lambda)?;
    if t == 0 {
        return Err(Error::ZeroPeriods);
    }
    let om = 1.0 - lambda;
    let om2 = om * om;

    // Diagonal sum over i = t down to 1; exponent 2(t-i) grows by 2 per step.
    let mut diag = 0.0;
    let mut p = 1.0;
    for _ in 0..t {
        diag += p;
        p *= om2;
    }

    // Cross sum over j = t-1 down to 1, i = t down to j+1; the exponent
    // 2t-i-j starts at t-j and grows by 1 as i descends.
    let mut cross = 0.0;
    let mut base = 1.0;
    for j in (1..t).rev() {
        base *= om;
        let sqrt_j = math::sqrt(j as f64);
        let mut p = base;
        let mut inner = 0.0;
        for i in ((j + 1)..=t).rev() {
            inner += p / math::sqrt(i as f64);
            p *= om;
        }
        cross += sqrt_j * inner;
    }

    Ok(lambda * lambda * (2.0 * cross + diag))
}

/// Constant-cost-per-period evaluation of the exact variance.
///
/// Decay powers are carried multiplicatively rather than recomputed by
/// exponentiation, so the state stays drift-free over long runs.
#[derive(Debug, Clone)]
pub struct VarianceRecurrence {
    lambda: f64,
    om: f64,
    t: u64,
    var: f64,
    cross_acc: f64,
    sqrt_t: f64,
}

impl VarianceRecurrence {
    pub fn new(lambda: f64) -> Result<Self, Error> {
        check_lambda(lambda)?;
        Ok(Self::from_validated(lambda))
    }

    pub(crate) fn from_validated(lambda: f64) -> Self {
        Self {
            lambda,
            om: 1.0 - lambda,
            t: 0,
            var: 0.0,
            cross_acc: 0.0,
            sqrt_t: 0.0,
        }
    }

    /// Advances one period and returns `Var(r_t)` for the new period.
    #[inline]
    pub fn step(&mut self) -> f64 {
        self.t += 1;
        if self.t > 1 {
            // B_t = (1-lambda) * (B_{t-1} + sqrt(t-1)); sqrt_t still holds sqrt(t-1).
            self.cross_acc = self.om * (self.cross_acc + self.sqrt_t);
        }
        self.sqrt_t = math::sqrt(self.t as f64);
        self.var = self.om * self.om * self.var
            + self.lambda * self.lambda * (1.0 + 2.0 * self.cross_acc / self.sqrt_t);
        self.var
    }

    /// Current period index (0 before the first step).
    pub fn t(&self) -> u64 {
        self.t
    }

    /// `Var(r_t)` for the current period; 0 before the first step.
    pub fn var(&self) -> f64 {
        self.var
    }

    /// The internal cross-covariance accumulator `B_t`.
    pub fn cross_acc(&self) -> f64 {
        self.cross_acc
    }

    #[inline]
    pub(crate) fn sqrt_t(&self) -> f64 {
        self.sqrt_t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hand evaluation of the double sum at lambda = 0.5, t = 2:
    /// 0.25 * (2 * 0.5 * (1/sqrt(2)) + 0.25 + 1).
    const VAR_HALF_T2: f64 = 0.4892766952966369;

    #[test]
    fn direct_t1_is_lambda_squared() {
        for &lambda in &[0.05, 0.2, 0.5, 1.0] {
            let v = variance_exact_direct(lambda, 1).unwrap();
            assert_eq!(v, lambda * lambda);
        }
    }

    #[test]
    fn direct_lambda_one_is_unit_variance() {
        for t in [1u64, 2, 3, 17, 100] {
            assert_eq!(variance_exact_direct(1.0, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn direct_hand_value_half_t2() {
        let v = variance_exact_direct(0.5, 2).unwrap();
        assert!((v - VAR_HALF_T2).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn recurrence_matches_direct() {
        for &lambda in &[0.1, 0.2, 0.5, 0.9, 1.0] {
            let mut rec = VarianceRecurrence::new(lambda).unwrap();
            for t in 1..=128u64 {
                let inc = rec.step();
                let dir = variance_exact_direct(lambda, t).unwrap();
                let rel = (inc - dir).abs() / dir;
                assert!(rel <= 1e-12, "lambda={lambda} t={t}: rel={rel:e}");
            }
        }
    }

    #[test]
    fn recurrence_first_step_is_lambda_squared() {
        let mut rec = VarianceRecurrence::new(0.2).unwrap();
        assert_eq!(rec.step(), 0.2 * 0.2);
        assert_eq!(rec.t(), 1);
        assert_eq!(rec.cross_acc(), 0.0);
    }

    #[test]
    fn recurrence_two_steps_half() {
        let mut rec = VarianceRecurrence::new(0.5).unwrap();
        rec.step();
        let v = rec.step();
        assert!((v - VAR_HALF_T2).abs() < 1e-15, "got {v}");
    }

    #[test]
    fn variance_bound_sweep() {
        // Var(r_t) <= (1 - (1-lambda)^t)^2 < 1, since every covariance
        // weight sqrt(j/i) <= 1.
        for &lambda in &[0.05, 0.1, 0.2, 0.5, 0.75, 0.9, 1.0] {
            let mut rec = VarianceRecurrence::new(lambda).unwrap();
            for t in 1..=512u64 {
                let v = rec.step();
                let bound = (1.0 - crate::math::powi_u64(1.0 - lambda, t)).powi(2);
                assert!(
                    v <= bound * (1.0 + 1e-12),
                    "lambda={lambda} t={t}: var={v} bound={bound}"
                );
                assert!(v > 0.0 && v < 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(variance_exact_direct(0.0, 5).is_err());
        assert!(variance_exact_direct(1.5, 5).is_err());
        assert!(variance_exact_direct(f64::NAN, 5).is_err());
        assert!(variance_exact_direct(0.2, 0).is_err());
        assert!(VarianceRecurrence::new(-0.1).is_err());
    }
}
