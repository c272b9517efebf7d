//! Exponentially graded pseudo-time nodes `t_n = a (b^n - 1)`.
//!
//! With `R = Δt_T/Δt_0 - 1`, the parameters `a = T/R` and `b = 1 + R Δt_0/T`
//! make the first step exactly `Δt_0`, and `b^N ≈ 1 + R` makes the step near
//! `T` roughly `Δt_T`. `N` is rounded up so the march always reaches `T`.

use crate::error::{arg_err, OftError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeStepSchedule {
    a: f64,
    /// `b - 1`, kept separately so nodes can use `expm1`/`ln_1p`.
    bm1: f64,
    dt0: f64,
    dt_t: f64,
    t_final: f64,
    nodes: Vec<f64>,
}

impl TimeStepSchedule {
    /// Schedule reaching `t_final`: the smallest `N` with `t_N ≥ t_final`.
    pub fn build(dt0: f64, dt_t: f64, t_final: f64) -> Result<Self> {
        let (a, bm1) = parameters(dt0, dt_t, t_final)?;
        let ln_b = bm1.ln_1p();
        let node = |n: usize| a * (n as f64 * ln_b).exp_m1();
        let mut n = ((t_final / a).ln_1p() / ln_b).ceil().max(1.0) as usize;
        while node(n) < t_final {
            n += 1;
        }
        while n > 1 && node(n - 1) >= t_final {
            n -= 1;
        }
        Ok(Self::assemble(a, bm1, dt0, dt_t, t_final, n))
    }

    /// Same `a`, `b` as [`build`](Self::build) but a prescribed step count, so
    /// `t_N` may fall short of or overshoot `t_final`.
    pub fn with_steps(dt0: f64, dt_t: f64, t_final: f64, steps: usize) -> Result<Self> {
        if steps < 1 {
            return arg_err("schedule needs at least one step");
        }
        let (a, bm1) = parameters(dt0, dt_t, t_final)?;
        Ok(Self::assemble(a, bm1, dt0, dt_t, t_final, steps))
    }

    /// Step ratio form: `Δt_T = ratio · Δt_0`.
    pub fn from_ratio(dt0: f64, ratio: f64, t_final: f64) -> Result<Self> {
        Self::build(dt0, ratio * dt0, t_final)
    }

    /// Raw geometric nodes `a (b^n - 1)`, `n = 0..=steps`.
    pub fn from_geometric(a: f64, b: f64, steps: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 1.0 && b.is_finite()) {
            return arg_err("geometric schedule needs a > 0 and b > 1");
        }
        if steps < 1 {
            return arg_err("schedule needs at least one step");
        }
        let bm1 = b - 1.0;
        let dt0 = a * bm1;
        let mut s = Self::assemble(a, bm1, dt0, f64::NAN, f64::NAN, steps);
        s.t_final = s.t_last();
        s.dt_t = s.step(steps - 1);
        Ok(s)
    }

    fn assemble(a: f64, bm1: f64, dt0: f64, dt_t: f64, t_final: f64, steps: usize) -> Self {
        let ln_b = bm1.ln_1p();
        let nodes = (0..=steps).map(|n| a * (n as f64 * ln_b).exp_m1()).collect();
        TimeStepSchedule {
            a,
            bm1,
            dt0,
            dt_t,
            t_final,
            nodes,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        1.0 + self.bm1
    }

    /// `R = Δt_T/Δt_0 - 1`.
    pub fn r(&self) -> f64 {
        self.t_final / self.a
    }

    pub fn dt0(&self) -> f64 {
        self.dt0
    }

    pub fn dt_t(&self) -> f64 {
        self.dt_t
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    /// Number of steps `N` (there are `N + 1` nodes).
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn t_last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// `Δt_n = t_{n+1} - t_n`, evaluated as `a b^n (b - 1)` to avoid the
    /// cancellation of subtracting large neighbouring nodes.
    pub fn step(&self, n: usize) -> f64 {
        self.a * self.bm1 * (n as f64 * self.bm1.ln_1p()).exp()
    }

    pub fn step_sizes(&self) -> Vec<f64> {
        (0..self.steps()).map(|n| self.step(n)).collect()
    }
}

fn parameters(dt0: f64, dt_t: f64, t_final: f64) -> Result<(f64, f64)> {
    if !(dt0 > 0.0 && dt0.is_finite() && dt_t.is_finite() && t_final.is_finite()) {
        return arg_err("schedule parameters must be positive and finite");
    }
    if dt_t <= dt0 {
        return Err(OftError::DegenerateRatio { dt0, dt_t });
    }
    if t_final <= dt_t {
        return arg_err(format!("final time {t_final} must exceed dtT {dt_t}"));
    }
    let r = dt_t / dt0 - 1.0;
    Ok((t_final / r, r * dt0 / t_final))
}

/// Free-function form of [`TimeStepSchedule::build`].
pub fn build_schedule(dt0: f64, dt_t: f64, t_final: f64) -> Result<TimeStepSchedule> {
    TimeStepSchedule::build(dt0, dt_t, t_final)
}

/// Free-function form of [`TimeStepSchedule::step_sizes`].
pub fn step_sizes(sched: &TimeStepSchedule) -> Vec<f64> {
    sched.step_sizes()
}
