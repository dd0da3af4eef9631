//! Chart statistics and adaptive control limits.
//!
//! Per monitoring period `t`, each of `k` streams contributes a binary
//! exceedance indicator against the known in-control median. The chart tracks
//!
//! ```text
//! C_t = per-period exceedance count            (Bin(k, p0) in control)
//! Q_t = C_1 + ... + C_t                        (cumulative count)
//! W_t = (Q_t - k p0 t) / sqrt(k p0 (1-p0) t)   (standardized statistic)
//! r_t = lambda W_t + (1-lambda) r_{t-1}        (EWMA, r_0 configurable)
//! ```
//!
//! and compares `r_t` against limits centered on `(1-lambda)^t r_0` at
//! `+/- L sqrt(Var(r_t))`, where `Var(r_t)` is the exact time-varying
//! variance from [`crate::variance`]. Because `Var(r_t) -> 1`, the limits
//! approach the steady state `+/- L`.

use crate::error::Error;
use crate::math;
use crate::variance::VarianceRecurrence;

/// Static chart configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartParams {
    streams: u32,
    lambda: f64,
    limit: f64,
    p0: f64,
    median0: f64,
    r0: f64,
    mean_per_period: f64,
    sd_per_period: f64,
}

impl ChartParams {
    /// Chart over `streams` parallel streams with smoothing constant
    /// `lambda` in (0, 1] and limit multiplier `limit > 0`.
    ///
    /// Defaults: `p0 = 0.5`, `median0 = 0`, `r0 = 0`.
    pub fn new(streams: u32, lambda: f64, limit: f64) -> Result<Self, Error> {
        if streams == 0 {
            return Err(Error::InvalidStreams { streams });
        }
        if !(lambda.is_finite() && lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidLambda { lambda });
        }
        if !(limit.is_finite() && limit > 0.0) {
            return Err(Error::InvalidLimit { limit });
        }
        let mut params = Self {
            streams,
            lambda,
            limit,
            p0: 0.5,
            median0: 0.0,
            r0: 0.0,
            mean_per_period: 0.0,
            sd_per_period: 0.0,
        };
        params.refresh_moments();
        Ok(params)
    }

    /// Sets the in-control exceedance proportion (strictly between 0 and 1).
    pub fn with_p0(mut self, p0: f64) -> Result<Self, Error> {
        if !(p0.is_finite() && p0 > 0.0 && p0 < 1.0) {
            return Err(Error::InvalidProportion { p0 });
        }
        self.p0 = p0;
        self.refresh_moments();
        Ok(self)
    }

    /// Sets the known in-control median the raw observations are
    /// dichotomized against.
    pub fn with_median0(mut self, median0: f64) -> Result<Self, Error> {
        if !median0.is_finite() {
            return Err(Error::NonFinite { what: "median0" });
        }
        self.median0 = median0;
        Ok(self)
    }

    /// Sets the EWMA starting value `r_0`.
    pub fn with_r0(mut self, r0: f64) -> Result<Self, Error> {
        if !r0.is_finite() {
            return Err(Error::NonFinite { what: "r0" });
        }
        self.r0 = r0;
        Ok(self)
    }

    fn refresh_moments(&mut self) {
        let k = f64::from(self.streams);
        self.mean_per_period = k * self.p0;
        self.sd_per_period = math::sqrt(k * self.p0 * (1.0 - self.p0));
    }

    pub fn streams(&self) -> u32 {
        self.streams
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn limit_multiplier(&self) -> f64 {
        self.limit
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn median0(&self) -> f64 {
        self.median0
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }
}

/// Exceedance count for one period; always in `[0, streams]` once accepted
/// by [`ChartState::step`] or produced by [`period_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodCount(u32);

impl PeriodCount {
    pub fn new(count: u32) -> Self {
        Self(count)
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// Maps one observation to its exceedance indicator `I(y >= median0)`.
///
/// A tie counts as an exceedance.
pub fn dichotomize(y: f64, median0: f64) -> Result<u8, Error> {
    if !y.is_finite() {
        return Err(Error::NonFinite { what: "observation" });
    }
    if !median0.is_finite() {
        return Err(Error::NonFinite { what: "median0" });
    }
    Ok(u8::from(y >= median0))
}

/// Sums one period's indicators; the slice must hold exactly one indicator
/// per stream, each 0 or 1.
pub fn period_count(indicators: &[u8], streams: u32) -> Result<PeriodCount, Error> {
    if indicators.len() != streams as usize {
        return Err(Error::LengthMismatch {
            expected: streams as usize,
            got: indicators.len(),
        });
    }
    let mut sum = 0u32;
    for &x in indicators {
        if x > 1 {
            return Err(Error::InvalidIndicator { value: x });
        }
        sum += u32::from(x);
    }
    Ok(PeriodCount(sum))
}

/// Standardizes a cumulative count at period `t >= 1`:
/// `(Q - k p0 t) / sqrt(k p0 (1-p0) t)`.
pub fn standardize(q: u64, t: u64, params: &ChartParams) -> Result<f64, Error> {
    if t == 0 {
        return Err(Error::ZeroPeriods);
    }
    let max = u64::from(params.streams) * t;
    if q > max {
        return Err(Error::CountExceedsTotal { count: q, max });
    }
    let tf = t as f64;
    Ok((q as f64 - params.mean_per_period * tf) / (params.sd_per_period * math::sqrt(tf)))
}

/// One EWMA smoothing step `lambda w + (1 - lambda) r_prev`.
///
/// `lambda` is expected to already satisfy the parameter validation in
/// [`ChartParams::new`]; with `lambda = 1` the statistic is memoryless.
#[inline]
pub fn ewma_update(r_prev: f64, w: f64, lambda: f64) -> f64 {
    lambda * w + (1.0 - lambda) * r_prev
}

/// Control limits at period `t` for a given exact variance:
/// `(1-lambda)^t r0 -/+ L sqrt(var_r)`, returned as `(lcl, ucl)`.
pub fn control_limits(t: u64, var_r: f64, params: &ChartParams) -> (f64, f64) {
    let center = math::powi_u64(1.0 - params.lambda, t) * params.r0;
    let half = params.limit * math::sqrt(var_r);
    (center - half, center + half)
}

/// Evolving chart state; one instance per monitored process.
///
/// The state is a plain single-threaded machine: step it with one
/// [`PeriodCount`] per period and read the statistics back. Stepping past a
/// signal is allowed (the first signal period is retained), so a monitoring
/// report can show the full trajectory.
#[derive(Debug, Clone)]
pub struct ChartState {
    t: u64,
    q: u64,
    w: f64,
    r: f64,
    variance: VarianceRecurrence,
    decay: f64,
    lcl: f64,
    ucl: f64,
    signaled: bool,
    first_signal: Option<u64>,
}

impl ChartState {
    /// Fresh state at `t = 0` with `r = r0` and degenerate limits at the
    /// center (the variance is zero before the first period).
    pub fn new(params: &ChartParams) -> Self {
        Self {
            t: 0,
            q: 0,
            w: 0.0,
            r: params.r0,
            variance: VarianceRecurrence::from_validated(params.lambda),
            decay: 1.0,
            lcl: params.r0,
            ucl: params.r0,
            signaled: false,
            first_signal: None,
        }
    }

    /// Advances one period with the given exceedance count.
    ///
    /// Returns whether `r_t` fell outside `[lcl_t, ucl_t]` at this period.
    /// `params` must be the same configuration the state was created with.
    #[inline]
    pub fn step(&mut self, count: PeriodCount, params: &ChartParams) -> Result<bool, Error> {
        debug_assert_eq!(params.lambda, self.variance.lambda_value());
        let c = count.get();
        if c > params.streams {
            return Err(Error::CountExceedsTotal {
                count: u64::from(c),
                max: u64::from(params.streams),
            });
        }
        self.t += 1;
        self.q += u64::from(c);

        let var = self.variance.step();
        let tf = self.t as f64;
        self.w = (self.q as f64 - params.mean_per_period * tf)
            / (params.sd_per_period * self.variance.sqrt_t());
        self.r = ewma_update(self.r, self.w, params.lambda);

        self.decay *= 1.0 - params.lambda;
        let center = self.decay * params.r0;
        let half = params.limit * math::sqrt(var);
        self.lcl = center - half;
        self.ucl = center + half;

        let outside = self.r > self.ucl || self.r < self.lcl;
        if outside && self.first_signal.is_none() {
            self.first_signal = Some(self.t);
        }
        self.signaled |= outside;
        Ok(outside)
    }

    /// Current period index; 0 before the first step.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Cumulative exceedance count `Q_t`.
    pub fn cumulative_count(&self) -> u64 {
        self.q
    }

    /// Standardized statistic `W_t` for the current period.
    pub fn standardized(&self) -> f64 {
        self.w
    }

    /// EWMA statistic `r_t`.
    pub fn ewma(&self) -> f64 {
        self.r
    }

    /// Exact `Var(r_t)` for the current period.
    pub fn var_r(&self) -> f64 {
        self.variance.var()
    }

    /// Internal cross-covariance accumulator backing the variance recurrence.
    pub fn cross_acc(&self) -> f64 {
        self.variance.cross_acc()
    }

    pub fn lcl(&self) -> f64 {
        self.lcl
    }

    pub fn ucl(&self) -> f64 {
        self.ucl
    }

    /// `(lcl_t, ucl_t)` for the current period.
    pub fn limits(&self) -> (f64, f64) {
        (self.lcl, self.ucl)
    }

    /// Whether any period so far signaled.
    pub fn signaled(&self) -> bool {
        self.signaled
    }

    /// The first signaling period, if any.
    pub fn first_signal(&self) -> Option<u64> {
        self.first_signal
    }
}
