//! Small worked problems: two ODEs solved through a time integral of a
//! pseudo-time evolution, and plane-wave focusing by a Luneburg lens.

use num_complex::Complex64;

use crate::error::{arg_err, Result};
use crate::grid::{ComplexField, Grid, RefractionField};
use crate::helmholtz::{build_source, solve_helmholtz, IncidentField, SolveReport};
use crate::paraxial::StoppingRule;
use crate::quadrature::composite_weights;
use crate::schedule::TimeStepSchedule;

#[derive(Debug, Clone, PartialEq)]
pub struct OdeReport {
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    /// `max_j |v_j - v(x_j)|`.
    pub max_error: f64,
}

/// `v - i v'' = (1 + iπ²) sin πx` on `[0, 1]`, `v(0) = v(1) = 0`, exact
/// solution `sin πx`.
///
/// `u_t = i u_xx` is marched with one forward-Euler step and then leapfrog
/// (centred second differences, Dirichlet ends), and
/// `v = Δt/2 u⁰ + Δt Σ_{n=1}^{N-1} e^{-nΔt} uⁿ`.
/// `ratio = Δt/Δx²` must stay below `1/4` for leapfrog stability.
pub fn run_ode1(intervals: usize, ratio: f64, t_final: f64) -> Result<OdeReport> {
    if intervals < 2 || !(ratio > 0.0 && ratio < 0.25) || !(t_final > 0.0) {
        return arg_err("ode1 needs J >= 2, 0 < dt/dx^2 < 1/4 and t > 0");
    }
    let dx = 1.0 / intervals as f64;
    let dt = ratio * dx * dx;
    let steps = (t_final / dt).ceil() as usize;
    let pi = std::f64::consts::PI;
    let i = Complex64::i();
    let amp = Complex64::new(1.0, pi * pi);
    let nodes = intervals + 1;
    let mut prev: Vec<Complex64> = (0..nodes).map(|j| amp * (pi * j as f64 * dx).sin()).collect();
    prev[0] = Complex64::new(0.0, 0.0);
    prev[intervals] = Complex64::new(0.0, 0.0);
    let mut v: Vec<Complex64> = prev.iter().map(|u| 0.5 * dt * u).collect();
    let lap = |u: &[Complex64], j: usize| (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (dx * dx);
    let mut cur = prev.clone();
    for j in 1..intervals {
        cur[j] = prev[j] + dt * i * lap(&prev, j);
    }
    let mut next = vec![Complex64::new(0.0, 0.0); nodes];
    for n in 1..steps {
        let w = dt * (-(n as f64) * dt).exp();
        for (vj, uj) in v.iter_mut().zip(&cur) {
            *vj += w * uj;
        }
        for j in 1..intervals {
            next[j] = prev[j] + 2.0 * dt * i * lap(&cur, j);
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    let max_error = v
        .iter()
        .enumerate()
        .map(|(j, vj)| (vj - (pi * j as f64 * dx).sin()).norm())
        .fold(0.0, f64::max);
    Ok(OdeReport {
        dx,
        dt,
        steps,
        max_error,
    })
}

/// `v - v'' = (3 - 4x²) e^{-x²}` on the line, exact solution `e^{-x²}`.
///
/// `u_t = u_x` and `w_t = -w_x` are marched with upwind differences on
/// `[-X, X]` (`2J + 1` nodes, zero inflow), and
/// `v = Δt/4 (u⁰ + w⁰) + Δt/2 Σ_{n=1}^{N-1} e^{-nΔt} (uⁿ + wⁿ)`.
/// `cfl = Δt/Δx ≤ 1`; at `cfl = 1` both marches are exact shifts.
pub fn run_ode2(half_nodes: usize, half_width: f64, cfl: f64, t_final: f64) -> Result<OdeReport> {
    if half_nodes < 2 || !(half_width > 0.0) || !(cfl > 0.0 && cfl <= 1.0) || !(t_final > 0.0) {
        return arg_err("ode2 needs J >= 2, X > 0, 0 < cfl <= 1 and t > 0");
    }
    let dx = half_width / half_nodes as f64;
    let dt = cfl * dx;
    let steps = (t_final / dt).ceil() as usize;
    let m = 2 * half_nodes + 1;
    let x = |k: usize| (k as f64 - half_nodes as f64) * dx;
    let g = |x: f64| (3.0 - 4.0 * x * x) * (-x * x).exp();
    let mut u: Vec<f64> = (0..m).map(|k| g(x(k))).collect();
    let mut w = u.clone();
    let mut v: Vec<f64> = u.iter().zip(&w).map(|(a, b)| 0.25 * dt * (a + b)).collect();
    let mut un = vec![0.0; m];
    let mut wn = vec![0.0; m];
    for n in 1..steps {
        for k in 0..m - 1 {
            un[k] = u[k] + cfl * (u[k + 1] - u[k]);
        }
        un[m - 1] = 0.0;
        for k in 1..m {
            wn[k] = w[k] - cfl * (w[k] - w[k - 1]);
        }
        wn[0] = 0.0;
        std::mem::swap(&mut u, &mut un);
        std::mem::swap(&mut w, &mut wn);
        let c = 0.5 * dt * (-(n as f64) * dt).exp();
        for k in 0..m {
            v[k] += c * (u[k] + w[k]);
        }
    }
    let max_error = (0..m).map(|k| (v[k] - (-x(k) * x(k)).exp()).abs()).fold(0.0, f64::max);
    Ok(OdeReport {
        dx,
        dt,
        steps,
        max_error,
    })
}

/// Error of the same weighted sum applied to the exact shifts `g(x ± t_n)`,
/// i.e. the quadrature-only error of [`run_ode2`].
pub fn ode2_quadrature_error(half_nodes: usize, half_width: f64, cfl: f64, t_final: f64) -> Result<f64> {
    if half_nodes < 2 || !(half_width > 0.0) || !(cfl > 0.0 && cfl <= 1.0) || !(t_final > 0.0) {
        return arg_err("ode2 needs J >= 2, X > 0, 0 < cfl <= 1 and t > 0");
    }
    let dx = half_width / half_nodes as f64;
    let dt = cfl * dx;
    let steps = (t_final / dt).ceil() as usize;
    let g = |x: f64| (3.0 - 4.0 * x * x) * (-x * x).exp();
    let mut worst = 0.0f64;
    for k in 0..=2 * half_nodes {
        let xk = (k as f64 - half_nodes as f64) * dx;
        // Zero inflow: the marches see g only inside [-X, X].
        let clip = |y: f64| {
            if y.abs() <= half_width + 1e-12 * half_width {
                g(y)
            } else {
                0.0
            }
        };
        let mut v = 0.25 * dt * 2.0 * g(xk);
        for n in 1..steps {
            let t = n as f64 * dt;
            v += 0.5 * dt * (-t).exp() * (clip(xk + t) + clip(xk - t));
        }
        worst = worst.max((v - (-xk * xk).exp()).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LuneburgConfig {
    pub kappa: f64,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub n: [usize; 3],
    pub radius: f64,
    pub dt0: f64,
    pub dt_ratio: f64,
    pub t_final: f64,
}

impl Default for LuneburgConfig {
    /// Desk-scale lens: unit sphere, `κ = 10`, incidence along `+x₃`.
    fn default() -> Self {
        LuneburgConfig {
            kappa: 10.0,
            lower: [-2.0, -2.0, -2.0],
            upper: [2.0, 2.0, 3.0],
            n: [120, 120, 150],
            radius: 1.0,
            dt0: 5e-2,
            dt_ratio: 10.0,
            t_final: 50.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LuneburgReport {
    pub peak: f64,
    pub argmax: [f64; 3],
    /// Distance from the peak to the shadow-side pole `(0, 0, R)`.
    pub focus_distance: f64,
    pub wavelength: f64,
    pub solve: SolveReport,
    pub total: ComplexField,
}

/// `β(r) = 2 - (r/R)²` inside the sphere of radius `R` at the origin, 1 outside.
pub fn luneburg_refraction(grid: &Grid, radius: f64) -> Result<RefractionField> {
    RefractionField::from_fn(grid, |p| {
        let r2 = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (radius * radius);
        if r2 <= 1.0 {
            2.0 - r2
        } else {
            1.0
        }
    })
}

/// Plane wave along `+x₃` through the lens; reports where `|vⁱ + vˢ|` peaks.
pub fn run_luneburg(cfg: &LuneburgConfig) -> Result<LuneburgReport> {
    let grid = Grid::new(&cfg.lower, &cfg.upper, &cfg.n)?;
    let beta = luneburg_refraction(&grid, cfg.radius)?;
    let incident = IncidentField::plane_along(&[0.0, 0.0, 1.0], cfg.kappa)?;
    let g = build_source(&beta, &incident)?;
    let sched = TimeStepSchedule::build(cfg.dt0, cfg.dt_ratio * cfg.dt0, cfg.t_final)?;
    let weights = composite_weights(&sched)?;
    let (vs, solve) = solve_helmholtz(&g, &beta, cfg.kappa, &sched, &weights, StoppingRule::FixedSchedule)?;
    let mut total = incident.sample(&grid)?;
    total.axpy(Complex64::new(1.0, 0.0), &vs)?;
    let (idx, peak) =
        total.values().iter().enumerate().fold(
            (0, 0.0),
            |best, (j, v)| if v.norm() > best.1 { (j, v.norm()) } else { best },
        );
    let argmax = grid.point(idx);
    let focus_distance = (argmax[0].powi(2) + argmax[1].powi(2) + (argmax[2] - cfg.radius).powi(2)).sqrt();
    Ok(LuneburgReport {
        peak,
        argmax,
        focus_distance,
        wavelength: 2.0 * std::f64::consts::PI / cfg.kappa,
        solve,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ode1_converges_at_second_order() {
        let a = run_ode1(10, 0.2, 30.0).unwrap();
        let b = run_ode1(20, 0.2, 30.0).unwrap();
        let ratio = a.max_error / b.max_error;
        assert!((3.0..5.0).contains(&ratio), "{a:?} {b:?}");
    }

    #[test]
    fn ode2_unit_cfl_is_quadrature_only() {
        let r = run_ode2(100, 10.0, 1.0, 40.0).unwrap();
        let q = ode2_quadrature_error(100, 10.0, 1.0, 40.0).unwrap();
        assert!((r.max_error - q).abs() < 1e-12, "{} vs {q}", r.max_error);
    }

    #[test]
    fn luneburg_profile() {
        let grid = Grid::new(&[-2.0; 3], &[2.0; 3], &[5, 5, 5]).unwrap();
        let beta = luneburg_refraction(&grid, 1.0).unwrap();
        let centre = grid.linear_index(&[2, 2, 2]).unwrap();
        assert_eq!(beta.values()[centre], 2.0);
        assert_eq!(beta.values()[0], 1.0);
    }
}
