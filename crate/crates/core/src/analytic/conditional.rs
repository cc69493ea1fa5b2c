//! Waypoint statistics conditioned on the number of waypoints in a window.
//!
//! Given `N(tau) = n`, the waypoint times are distributed as the order
//! statistics of `n` uniforms on `(0, tau)`. The densities below are exposed
//! so their normalization can be checked numerically; only their moments
//! enter the error formulas.

use crate::error::{check, Error, Result};

/// `Pr(N(t) = k)` for a Poisson count with the given mean.
pub fn poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
    (k as f64 * mean.ln() - mean - ln_fact).exp()
}

/// `n! / (a! b!)` computed in floating point.
fn multinomial(n: u32, a: u32, b: u32) -> f64 {
    let ln = |m: u32| -> f64 { (1..=m).map(|i| (i as f64).ln()).sum() };
    (ln(n) - ln(a) - ln(b)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMomentQuery {
    /// Window length.
    pub tau: f64,
    /// Waypoints in the window.
    pub n: u32,
    /// Waypoint index, `1 <= k <= n`.
    pub k: u32,
    /// 1 or 2.
    pub order: u32,
}

impl ConditionalMomentQuery {
    pub fn validate(&self) -> Result<()> {
        check("tau", self.tau, self.tau > 0.0, "> 0")?;
        check_index(self.n, self.k)
    }
}

fn check_index(n: u32, k: u32) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::param("k", format!("{k} must satisfy 1 <= k <= n = {n}")));
    }
    Ok(())
}

fn check_order(order: u32) -> Result<()> {
    match order {
        1 | 2 => Ok(()),
        o => Err(Error::UnsupportedMoment(o)),
    }
}

/// `E(T_k^m | N(tau) = n)`: `k tau / (n+1)` for `m = 1`,
/// `k (k+1) tau^2 / ((n+1)(n+2))` for `m = 2`.
pub fn cond_waypoint_time_moment(q: &ConditionalMomentQuery) -> Result<f64> {
    check_order(q.order)?;
    q.validate()?;
    let (n, k, tau) = (q.n as f64, q.k as f64, q.tau);
    Ok(match q.order {
        1 => k * tau / (n + 1.0),
        _ => k * (k + 1.0) * tau * tau / ((n + 1.0) * (n + 2.0)),
    })
}

/// `E(t_k^m | N(tau) = n)` for any `1 <= k <= n`; the spacings are
/// exchangeable so the result does not depend on `k`.
pub fn cond_interarrival_moment(tau: f64, n: u32, order: u32) -> Result<f64> {
    check_order(order)?;
    check("tau", tau, tau > 0.0, "> 0")?;
    if n < 1 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let n = n as f64;
    Ok(match order {
        1 => tau / (n + 1.0),
        _ => 2.0 * tau * tau / ((n + 1.0) * (n + 2.0)),
    })
}

/// `E(X_k^2 | N(tau) = n) = 2 k sigma^2 tau^2 / ((n+1)(n+2))` where `X_k` is
/// the x coordinate of the k-th waypoint. The conditional mean is zero.
pub fn cond_position_second_moment(tau: f64, n: u32, k: u32, sigma: f64) -> Result<f64> {
    check("tau", tau, tau > 0.0, "> 0")?;
    check("sigma", sigma, sigma >= 0.0, ">= 0")?;
    check_index(n, k)?;
    let (n, k) = (n as f64, k as f64);
    Ok(2.0 * k * sigma * sigma * tau * tau / ((n + 1.0) * (n + 2.0)))
}

/// `E(X^2 | N(t) = i) = 2 sigma^2 t^2 / (i + 2)` for the position at `t`.
pub fn position_second_moment_given_count(t: f64, i: u32, sigma: f64) -> Result<f64> {
    check("t", t, t > 0.0, "> 0")?;
    check("sigma", sigma, sigma >= 0.0, ">= 0")?;
    Ok(2.0 * sigma * sigma * t * t / (i as f64 + 2.0))
}

/// Joint density of `(T_{k-1}, t_k) | N(tau) = n` at `(x, y)`, `2 <= k <= n`.
pub fn joint_prev_time_spacing_density(x: f64, y: f64, tau: f64, n: u32, k: u32) -> Result<f64> {
    check("tau", tau, tau > 0.0, "> 0")?;
    check_index(n, k)?;
    if k < 2 {
        return Err(Error::param("k", "joint density needs k >= 2"));
    }
    if !(x > 0.0 && x < tau && x + y > 0.0 && x + y < tau && y > 0.0) {
        return Ok(0.0);
    }
    let c = multinomial(n, k - 2, n - k);
    Ok(c * x.powi(k as i32 - 2) / tau.powi(n as i32) * (tau - x - y).powi((n - k) as i32))
}

/// Density of `T_k | N(tau) = n` at `x`, `1 <= k <= n`.
pub fn waypoint_time_density(x: f64, tau: f64, n: u32, k: u32) -> Result<f64> {
    check("tau", tau, tau > 0.0, "> 0")?;
    check_index(n, k)?;
    if !(x > 0.0 && x < tau) {
        return Ok(0.0);
    }
    let c = multinomial(n, k - 1, n - k);
    Ok(c * x.powi(k as i32 - 1) / tau.powi(k as i32) * (1.0 - x / tau).powi((n - k) as i32))
}

/// Density of the spacing `t_k | N(tau) = n` at `y`.
pub fn interarrival_density(y: f64, tau: f64, n: u32) -> Result<f64> {
    check("tau", tau, tau > 0.0, "> 0")?;
    if n < 1 {
        return Err(Error::param("n", "must be >= 1"));
    }
    if !(0.0..tau).contains(&y) {
        return Ok(0.0);
    }
    Ok(n as f64 / tau * (1.0 - y / tau).powi(n as i32 - 1))
}
