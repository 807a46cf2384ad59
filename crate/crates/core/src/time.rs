//! Low-storage explicit Runge–Kutta integration and step-size control.

use serde::{Deserialize, Serialize};

use crate::operator::Solution;

/// Register operations needed by the two-register update.
pub trait StageVector {
    fn scale(&mut self, a: f64);
    fn add_scaled(&mut self, a: f64, other: &Self);
}

impl StageVector for Solution {
    fn scale(&mut self, a: f64) {
        Solution::scale(self, a)
    }
    fn add_scaled(&mut self, a: f64, other: &Self) {
        Solution::add_scaled(self, a, other)
    }
}

impl StageVector for Vec<f64> {
    fn scale(&mut self, a: f64) {
        self.iter_mut().for_each(|x| *x *= a);
    }
    fn add_scaled(&mut self, a: f64, other: &Self) {
        for (x, y) in self.iter_mut().zip(other) {
            *x += a * y;
        }
    }
}

/// Williamson-form coefficients `k ← A_i k + dt R(u)`, `u ← u + B_i k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkScheme {
    pub a: [f64; 5],
    pub b: [f64; 5],
    pub c: [f64; 5],
}

impl RkScheme {
    /// Carpenter–Kennedy five-stage, fourth-order scheme.
    pub const fn carpenter_kennedy() -> Self {
        Self {
            a: [
                0.0,
                -567301805773.0 / 1357537059087.0,
                -2404267990393.0 / 2016746695238.0,
                -3550918686646.0 / 2091501179385.0,
                -1275806237668.0 / 842570457699.0,
            ],
            b: [
                1432997174477.0 / 9575080441755.0,
                5161836677717.0 / 13612068292357.0,
                1720146321549.0 / 2090206949498.0,
                3134564353537.0 / 4481467310338.0,
                2277821191437.0 / 14882151754819.0,
            ],
            c: [
                0.0,
                1432997174477.0 / 9575080441755.0,
                2526269341429.0 / 6820363218183.0,
                2006345519317.0 / 3224310063776.0,
                2802321613138.0 / 2924317926251.0,
            ],
        }
    }
}

impl Default for RkScheme {
    fn default() -> Self {
        Self::carpenter_kennedy()
    }
}

/// Advances `u` from `t` to `t + dt`. `accumulate(u, t_stage, dt, k)` must
/// add `dt · R(u, t_stage)` to `k`; `k` is the second register.
pub fn advance_step<V, E, F>(
    u: &mut V,
    k: &mut V,
    scheme: &RkScheme,
    t: f64,
    dt: f64,
    mut accumulate: F,
) -> Result<(), E>
where
    V: StageVector,
    F: FnMut(&V, f64, f64, &mut V) -> Result<(), E>,
{
    for i in 0..5 {
        k.scale(scheme.a[i]);
        accumulate(u, t + scheme.c[i] * dt, dt, k)?;
        u.add_scaled(scheme.b[i], k);
    }
    Ok(())
}

/// CFL number, end time, and an optional fixed step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepController {
    pub cfl: f64,
    pub end_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_dt: Option<f64>,
}

impl StepController {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return Err(format!("cfl must be positive, got {}", self.cfl));
        }
        if !(self.end_time >= 0.0 && self.end_time.is_finite()) {
            return Err(format!("end_time must be non-negative, got {}", self.end_time));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(format!("fixed_dt must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    /// Step from `t` given the stable step, shortened so that it lands
    /// exactly on `target` (the next output time or the end time).
    pub fn next_dt(&self, t: f64, stable_dt: f64, target: f64) -> f64 {
        let dt = self.fixed_dt.unwrap_or(stable_dt);
        let remaining = target - t;
        // Avoid leaving a sliver step behind.
        if dt >= remaining * (1.0 - 1e-12) {
            remaining
        } else {
            dt
        }
    }
}
