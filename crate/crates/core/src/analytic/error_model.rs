//! Expected squared error of interpolating between fixes at `0` and `T`.

use crate::error::{check, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorQuery {
    pub sigma: f64,
    pub lambda_rate: f64,
    /// Localization period `T`.
    pub period: f64,
    /// Evaluation time in `[0, T]`; `None` for the period average.
    pub t: Option<f64>,
}

impl ErrorQuery {
    pub fn at(sigma: f64, lambda_rate: f64, period: f64, t: f64) -> Self {
        ErrorQuery {
            sigma,
            lambda_rate,
            period,
            t: Some(t),
        }
    }

    pub fn averaged(sigma: f64, lambda_rate: f64, period: f64) -> Self {
        ErrorQuery {
            sigma,
            lambda_rate,
            period,
            t: None,
        }
    }

    /// `C = T / lambda`.
    pub fn ratio(&self) -> f64 {
        self.period / self.lambda_rate
    }

    fn validate(&self) -> Result<()> {
        check("sigma", self.sigma, self.sigma >= 0.0, ">= 0")?;
        check("lambda_rate", self.lambda_rate, self.lambda_rate > 0.0, "> 0")?;
        check("period", self.period, self.period > 0.0, "> 0")?;
        if let Some(t) = self.t {
            check("t", t, (0.0..=self.period).contains(&t), "in [0, T]")?;
        }
        Ok(())
    }
}

/// `e^{-y} - 1 + y` without cancellation for small `y`.
fn exp_neg_minus_linear(y: f64) -> f64 {
    if y.abs() < 0.1 {
        // Alternating series y^2/2 - y^3/6 + ...; 12 terms reach f64 precision.
        let mut term = y * y / 2.0;
        let mut sum = term;
        for m in 3..14 {
            term *= -y / m as f64;
            sum += term;
        }
        sum
    } else {
        (-y).exp_m1() + y
    }
}

/// `1 - e^{-y}`.
fn one_minus_exp_neg(y: f64) -> f64 {
    -(-y).exp_m1()
}

/// `E(X^2) = 2 sigma^2 (t/lambda - 1/lambda^2 + e^{-lambda t}/lambda^2)`, the
/// second moment of one coordinate of the position at `t`.
pub fn position_second_moment(t: f64, lambda_rate: f64, sigma: f64) -> Result<f64> {
    check("t", t, t >= 0.0, ">= 0")?;
    check("lambda_rate", lambda_rate, lambda_rate > 0.0, "> 0")?;
    check("sigma", sigma, sigma >= 0.0, ">= 0")?;
    let scale = 2.0 * sigma * sigma / (lambda_rate * lambda_rate);
    Ok(scale * exp_neg_minus_linear(lambda_rate * t))
}

/// `E(X X')` where `X` is the displacement over `[0, t]` and `X'` the
/// displacement over `[t, T]`:
/// `sigma^2/lambda^2 (1 - e^{-lambda t} - e^{-lambda (T-t)} + e^{-lambda T})`.
pub fn cross_moment_xxprime(t: f64, period: f64, lambda_rate: f64, sigma: f64) -> Result<f64> {
    ErrorQuery::at(sigma, lambda_rate, period, t).validate()?;
    let rest = period - t;
    // The bracket factors as (1 - e^{-lambda t})(1 - e^{-lambda (T-t)}).
    let product = one_minus_exp_neg(lambda_rate * t) * one_minus_exp_neg(lambda_rate * rest);
    Ok(sigma * sigma / (lambda_rate * lambda_rate) * product)
}

/// Expected squared 2-D error at time `t` within one period:
///
/// `4 sigma^2 / (lambda^2 T^2) [ t^2 phi(lambda (T-t)) + (T-t)^2 phi(lambda t)
///   - t (T-t) (1 - e^{-lambda t})(1 - e^{-lambda (T-t)}) ]`
///
/// with `phi(y) = y - 1 + e^{-y}`. Zero at both fixes and symmetric under
/// `t -> T - t`.
pub fn error_at(q: &ErrorQuery) -> Result<f64> {
    q.validate()?;
    let t =
        q.t.ok_or_else(|| Error::param("t", "error_at needs an evaluation time"))?;
    let (sigma, lambda, period) = (q.sigma, q.lambda_rate, q.period);
    let rest = period - t;
    let bracket = t * t * exp_neg_minus_linear(lambda * rest) + rest * rest * exp_neg_minus_linear(lambda * t)
        - t * rest * (one_minus_exp_neg(lambda * t) * one_minus_exp_neg(lambda * rest));
    Ok(4.0 * sigma * sigma / (lambda * lambda * period * period) * bracket)
}

/// `x - 5 + 12/x - 12/x^2 + (12/x^2 - 1) e^{-x}` for `x = lambda T`.
fn average_bracket(x: f64) -> f64 {
    if x < 1.0 {
        // The first three orders cancel; coefficient of x^m (m >= 3) is
        // (-1)^m (12 - (m+1)(m+2)) / (m+2)!.
        let mut sum = 0.0;
        let mut x_pow = x * x * x;
        let mut fact = 120.0; // (m+2)! at m = 3
        for m in 3..40u32 {
            let mf = m as f64;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let term = sign * (12.0 - (mf + 1.0) * (mf + 2.0)) / fact * x_pow;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
            x_pow *= x;
            fact *= mf + 3.0;
        }
        sum
    } else {
        let e = (-x).exp();
        let inv = 1.0 / x;
        x - 5.0 + 12.0 * inv - 12.0 * inv * inv + 12.0 * inv * inv * e - e
    }
}

/// Period average of [`error_at`]:
/// `2 sigma^2 / (3 lambda^2) [lambda T - 5 + 12/(lambda T) - 12/(lambda T)^2
///   + 12/(lambda T)^2 e^{-lambda T} - e^{-lambda T}]`.
pub fn error_avg(q: &ErrorQuery) -> Result<f64> {
    ErrorQuery { t: None, ..*q }.validate()?;
    let lambda = q.lambda_rate;
    Ok(2.0 * q.sigma * q.sigma / (3.0 * lambda * lambda) * average_bracket(lambda * q.period))
}

/// [`error_avg`] with `lambda = T / c`, the regime in which the period and
/// the waypoint rate grow together.
pub fn error_avg_constant_ratio(sigma: f64, c: f64, period: f64) -> Result<f64> {
    check("c", c, c > 0.0, "> 0")?;
    check("period", period, period > 0.0, "> 0")?;
    error_avg(&ErrorQuery::averaged(sigma, period / c, period))
}

/// Limit of [`error_avg_constant_ratio`] as `T -> inf`: `2 sigma^2 c / 3`.
pub fn error_asymptote(sigma: f64, c: f64) -> Result<f64> {
    check("sigma", sigma, sigma >= 0.0, ">= 0")?;
    check("c", c, c > 0.0, "> 0")?;
    Ok(2.0 * sigma * sigma * c / 3.0)
}
