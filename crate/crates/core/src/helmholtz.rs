//! Two-pass Helmholtz solve, scattering sources and the accuracy metrics.
//!
//! `v = (β + Δ/κ²)^{-1} g` is evaluated as `Ψ(Ψ g)` with
//! `Ψ = (β + Δ/κ²)^{-1/2}`; both passes share one schedule and weight set.

use web_time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{arg_err, OftError, Result};
use crate::grid::{
    check_grid, discrete_helmholtz_apply, one_sided_derivative, ComplexField, Face, Grid, RefractionField,
};
use crate::paraxial::{
    evolve_and_accumulate, evolve_with_monitor, EvolveReport, MonitorAction, ParaxialProblem, StoppingRule,
};
use crate::quadrature::QuadratureWeights;
use crate::schedule::TimeStepSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncidentKind {
    /// `e^{i k·x}`.
    Plane,
    /// `e^{i(k₁x₁ + k₂x₂ + k₃x₃)} - e^{i(k₁x₁ - k₂x₂ + k₃x₃)}`, odd in `x₂`,
    /// so the field vanishes on the plane `x₂ = 0`.
    ImagePair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidentField {
    kind: IncidentKind,
    k: Vec<f64>,
}

impl IncidentField {
    /// Plane wave with wave vector `k`; `|k|` must equal `kappa`.
    pub fn plane(k: &[f64], kappa: f64) -> Result<Self> {
        check_wave_vector(k, kappa)?;
        Ok(IncidentField {
            kind: IncidentKind::Plane,
            k: k.to_vec(),
        })
    }

    /// Plane wave travelling along `direction` (normalized here).
    pub fn plane_along(direction: &[f64], kappa: f64) -> Result<Self> {
        Self::plane(&scaled_direction(direction, kappa)?, kappa)
    }

    /// Mirror pair about `x₂ = 0`; three dimensions only.
    pub fn image_pair(k: &[f64], kappa: f64) -> Result<Self> {
        if k.len() != 3 {
            return arg_err("image pair needs a 3D wave vector");
        }
        check_wave_vector(k, kappa)?;
        Ok(IncidentField {
            kind: IncidentKind::ImagePair,
            k: k.to_vec(),
        })
    }

    pub fn image_pair_along(direction: &[f64], kappa: f64) -> Result<Self> {
        Self::image_pair(&scaled_direction(direction, kappa)?, kappa)
    }

    pub fn kind(&self) -> IncidentKind {
        self.kind
    }

    pub fn k_vector(&self) -> &[f64] {
        &self.k
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let phase: f64 = self.k.iter().zip(x).map(|(k, x)| k * x).sum();
        match self.kind {
            IncidentKind::Plane => Complex64::cis(phase),
            IncidentKind::ImagePair => {
                let mirrored = phase - 2.0 * self.k[1] * x[1];
                Complex64::cis(phase) - Complex64::cis(mirrored)
            }
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<ComplexField> {
        if grid.dim() != self.dim() {
            return arg_err(format!("incident field is {}D, grid is {}D", self.dim(), grid.dim()));
        }
        let d = grid.dim();
        Ok(ComplexField::from_fn(grid, |p| self.evaluate(&p[..d])))
    }
}

fn check_wave_vector(k: &[f64], kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return arg_err("kappa must be positive");
    }
    if k.is_empty() || k.len() > 3 {
        return arg_err("wave vector must have 1 to 3 components");
    }
    let norm = k.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - kappa).abs() > 1e-12 * kappa {
        return arg_err(format!("|k| = {norm} differs from kappa = {kappa}"));
    }
    Ok(())
}

fn scaled_direction(direction: &[f64], kappa: f64) -> Result<Vec<f64>> {
    let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return arg_err("direction must be a finite nonzero vector");
    }
    Ok(direction.iter().map(|c| c * kappa / norm).collect())
}

/// Scattering source `g = -(β - 1) vⁱ`.
pub fn build_source(beta: &RefractionField, incident: &IncidentField) -> Result<ComplexField> {
    let vi = incident.sample(beta.grid())?;
    let values = vi
        .values()
        .par_iter()
        .zip(beta.values().par_iter())
        .map(|(v, b)| -(b - 1.0) * v)
        .collect();
    ComplexField::from_values(beta.grid(), values)
}

/// One pass: `v₁ ≈ (β + Δ/κ²)^{-1/2} g`.
pub fn apply_inverse_sqrt(
    g: &ComplexField,
    beta: &RefractionField,
    kappa: f64,
    sched: &TimeStepSchedule,
    weights: &QuadratureWeights,
    stop: StoppingRule,
) -> Result<(ComplexField, EvolveReport)> {
    let prob = ParaxialProblem::new(beta.clone(), kappa, g.clone())?;
    evolve_and_accumulate(&prob, sched, weights, stop)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Relative Helmholtz residual of the returned field.
    pub rel_residual: f64,
    /// `max|u| / (σ √t)` at the end of the first pass.
    pub ub_estimate: f64,
    pub steps_pass1: usize,
    pub steps_pass2: usize,
    /// Seconds for both passes.
    pub wall_time: f64,
    /// True when a stopping rule ended either pass early.
    pub truncated: bool,
    pub pass1: EvolveReport,
    pub pass2: EvolveReport,
}

/// `v₂ ≈ (β + Δ/κ²)^{-1} g` by two inverse-square-root passes.
///
/// `UbThreshold` ends the first pass and the second pass stops at the same
/// node, so both reach the same pseudo-time. `ResidualThreshold` runs the
/// first pass in full and checks the residual of the partial second-pass
/// result every `check_every` steps.
pub fn solve_helmholtz(
    g: &ComplexField,
    beta: &RefractionField,
    kappa: f64,
    sched: &TimeStepSchedule,
    weights: &QuadratureWeights,
    stop: StoppingRule,
) -> Result<(ComplexField, SolveReport)> {
    stop.validate()?;
    check_grid(g.grid(), beta.grid())?;
    let start = Instant::now();
    let g_norm = g.max_norm();
    let sigma = default_sigma(kappa, g.grid());
    let pass1_rule = match stop {
        StoppingRule::UbThreshold { .. } => stop,
        _ => StoppingRule::FixedSchedule,
    };
    let (v1, pass1) = apply_inverse_sqrt(g, beta, kappa, sched, weights, pass1_rule)?;
    let ub = ub_from_norm(pass1.final_max_norm, pass1.t_reached, sigma);

    let prob2 = ParaxialProblem::new(beta.clone(), kappa, v1)?;
    let last_node = pass1.steps;
    let (v2, pass2) = match stop {
        StoppingRule::FixedSchedule => evolve_with_monitor(&prob2, sched, weights, |_| Ok(MonitorAction::Continue))?,
        StoppingRule::UbThreshold { .. } => evolve_with_monitor(&prob2, sched, weights, |s| {
            Ok(if s.n >= last_node {
                MonitorAction::Stop
            } else {
                MonitorAction::Continue
            })
        })?,
        StoppingRule::ResidualThreshold { tol, check_every } => {
            if g_norm == 0.0 {
                evolve_with_monitor(&prob2, sched, weights, |_| Ok(MonitorAction::Stop))?
            } else {
                evolve_with_monitor(&prob2, sched, weights, |s| {
                    if s.n % check_every != 0 {
                        return Ok(MonitorAction::Continue);
                    }
                    let mut candidate = s.accumulator.partial().clone();
                    candidate.axpy(weights.terminal_weight(s.n), s.u)?;
                    let res = residual_against(&candidate, g, g_norm, beta, kappa)?;
                    Ok(if res <= tol {
                        MonitorAction::Stop
                    } else {
                        MonitorAction::Continue
                    })
                })?
            }
        }
    };
    let rel_residual = if g_norm > 0.0 {
        residual_against(&v2, g, g_norm, beta, kappa)?
    } else {
        0.0
    };
    let report = SolveReport {
        rel_residual,
        ub_estimate: ub,
        steps_pass1: pass1.steps,
        steps_pass2: pass2.steps,
        wall_time: start.elapsed().as_secs_f64(),
        truncated: pass1.truncated || pass2.truncated,
        pass1,
        pass2,
    };
    Ok((v2, report))
}

/// `σ = 1/(κ L)` with `L` the longest domain edge.
pub fn default_sigma(kappa: f64, grid: &Grid) -> f64 {
    1.0 / (kappa * grid.max_edge())
}

/// `max|exact - approx| / max|exact|`.
pub fn relative_error(approx: &ComplexField, exact: &ComplexField) -> Result<f64> {
    check_grid(approx.grid(), exact.grid())?;
    let denom = exact.max_norm();
    if !(denom > 0.0) {
        return arg_err("relative error against a zero exact field");
    }
    let num = approx
        .values()
        .par_iter()
        .zip(exact.values().par_iter())
        .map(|(a, e)| (e - a).norm())
        .reduce(|| 0.0, f64::max);
    Ok(num / denom)
}

/// `max|r| / max|g|` over the rows `r` of [`system_residual`].
pub fn relative_residual(v: &ComplexField, g: &ComplexField, beta: &RefractionField, kappa: f64) -> Result<f64> {
    check_grid(v.grid(), g.grid())?;
    let g_norm = g.max_norm();
    if !(g_norm > 0.0) {
        return arg_err("relative residual against a zero source");
    }
    residual_against(v, g, g_norm, beta, kappa)
}

/// Row residuals of the discrete system the solver inverts: `(β + Δ/κ²) v - g`
/// at interior nodes, and the Robin condition `v + (i/κ) ∂v/∂n` (one-sided
/// three-point derivative) at face nodes, taking the largest over the faces a
/// node lies on.
pub fn system_residual(v: &ComplexField, g: &ComplexField, beta: &RefractionField, kappa: f64) -> Result<ComplexField> {
    check_grid(v.grid(), g.grid())?;
    let hv = discrete_helmholtz_apply(v, beta, kappa)?;
    let grid = v.grid();
    let src = v.values();
    let gv = g.values();
    let ik = Complex64::i() / kappa;
    let values = hv
        .values()
        .par_iter()
        .enumerate()
        .map(|(idx, h)| {
            let mut face_res: Option<Complex64> = None;
            for axis in 0..grid.dim() {
                let (s, n) = (grid.stride(axis), grid.n(axis));
                let i = (idx / s) % n;
                let face = if i == 0 {
                    Face::Lower
                } else if i == n - 1 {
                    Face::Upper
                } else {
                    continue;
                };
                let inward = |k: usize| match face {
                    Face::Lower => src[idx + k * s],
                    Face::Upper => src[idx - k * s],
                };
                let dx = one_sided_derivative(face, inward(0), inward(1), inward(2), grid.spacing(axis));
                let dn = if face == Face::Lower { -dx } else { dx };
                let r = src[idx] + ik * dn;
                if face_res.is_none_or(|f| r.norm() > f.norm()) {
                    face_res = Some(r);
                }
            }
            face_res.unwrap_or(h - gv[idx])
        })
        .collect();
    ComplexField::from_values(grid, values)
}

fn residual_against(
    v: &ComplexField,
    g: &ComplexField,
    g_norm: f64,
    beta: &RefractionField,
    kappa: f64,
) -> Result<f64> {
    let num = system_residual(v, g, beta, kappa)?.max_norm();
    if !num.is_finite() {
        return Err(OftError::NonFinite("relative_residual"));
    }
    Ok(num / g_norm)
}

/// Truncation estimate `max|u| / (σ √t)`, `σ = 1/(κ L)`.
pub fn ub_estimate(u_current: &ComplexField, t_final: f64, kappa: f64, length: f64) -> Result<f64> {
    if !(t_final > 0.0 && kappa > 0.0 && length > 0.0) {
        return arg_err("ub estimate needs positive t, kappa and L");
    }
    Ok(ub_from_norm(u_current.max_norm(), t_final, 1.0 / (kappa * length)))
}

fn ub_from_norm(max_norm: f64, t: f64, sigma: f64) -> f64 {
    if max_norm == 0.0 {
        0.0
    } else {
        max_norm / (sigma * t.sqrt())
    }
}

/// Leading-order error bounds `(E₁, E₂, E₃)` for the OFT quadrature:
///
/// ```text
/// E₁ ≲ ‖A-I‖² Δt₀² / (12 √σ)
/// E₂ ≲ ‖A-I‖² Δt₀ / (8 σ^{3/2})
/// E₃ ≲ e^{-σT} / (σ √(πT))
/// ```
///
/// `ratio_r` (the `R` of the schedule) is validated but does not enter the
/// leading-order forms.
pub fn error_budget(sigma: f64, dt0: f64, ratio_r: f64, t_final: f64, op_norm: f64) -> Result<(f64, f64, f64)> {
    if [sigma, dt0, ratio_r, t_final, op_norm]
        .iter()
        .any(|v| !(*v > 0.0 && v.is_finite()))
    {
        return arg_err("error budget inputs must be positive and finite");
    }
    let a2 = op_norm * op_norm;
    let e1 = a2 * dt0 * dt0 / (12.0 * sigma.sqrt());
    let e2 = a2 * dt0 / (8.0 * sigma.powf(1.5));
    let e3 = (-sigma * t_final).exp() / (sigma * (std::f64::consts::PI * t_final).sqrt());
    Ok((e1, e2, e3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite_weights;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn homogeneous_medium_has_no_source() {
        let grid = Grid::cube(2, -1.0, 1.0, 9).unwrap();
        let beta = RefractionField::uniform(&grid, 1.0).unwrap();
        let inc = IncidentField::plane_along(&[1.0, 0.0], 15.7).unwrap();
        assert_eq!(build_source(&beta, &inc).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn disk_source() {
        let grid = Grid::cube(2, -2.0, 2.0, 21).unwrap();
        let beta =
            RefractionField::from_fn(&grid, |p| if p[0] * p[0] + p[1] * p[1] < 1.0 { 1.1 } else { 1.0 }).unwrap();
        let kappa = 15.7;
        let g = build_source(&beta, &IncidentField::plane_along(&[1.0, 0.0], kappa).unwrap()).unwrap();
        for (j, v) in g.values().iter().enumerate() {
            let p = grid.point(j);
            let want = if p[0] * p[0] + p[1] * p[1] < 1.0 {
                -0.1 * Complex64::cis(kappa * p[0])
            } else {
                c(0.0, 0.0)
            };
            assert!((v - want).norm() < 1e-14);
        }
    }

    #[test]
    fn image_pair_vanishes_on_mirror_plane() {
        let k = [1.0, -0.5, 0.3];
        let kappa = 12.0;
        let inc = IncidentField::image_pair_along(&k, kappa).unwrap();
        let kv = inc.k_vector();
        for &(x1, x3) in &[(0.3, -1.2), (2.0, 0.7), (-1.1, 0.0)] {
            assert!(inc.evaluate(&[x1, 0.0, x3]).norm() < 1e-14);
            let x2 = 0.37;
            let want = Complex64::cis(kv[0] * x1 + kv[1] * x2 + kv[2] * x3)
                - Complex64::cis(kv[0] * x1 - kv[1] * x2 + kv[2] * x3);
            assert!((inc.evaluate(&[x1, x2, x3]) - want).norm() < 1e-14);
        }
        assert!(IncidentField::image_pair(&[1.0, 0.0], 1.0).is_err());
        assert!(IncidentField::plane(&[1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn metric_edge_cases() {
        let grid = Grid::cube(1, -1.0, 1.0, 11).unwrap();
        let exact = ComplexField::from_fn(&grid, |p| c(p[0], 1.0));
        assert_eq!(relative_error(&exact, &exact).unwrap(), 0.0);
        let mut twice = exact.clone();
        twice.scale(c(2.0, 0.0));
        assert!((relative_error(&twice, &exact).unwrap() - 1.0).abs() < 1e-15);
        assert!(relative_error(&exact, &ComplexField::zeros(&grid)).is_err());

        // Face rows hold the homogeneous Robin condition, so a source peaking
        // inside gives the zero field a relative residual of exactly one.
        let beta = RefractionField::uniform(&grid, 1.0).unwrap();
        let zero = ComplexField::zeros(&grid);
        let bump = ComplexField::from_fn(&grid, |p| c(1.0 - p[0] * p[0], 0.0));
        assert!((relative_residual(&zero, &bump, &beta, 10.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(relative_residual(&exact, &zero, &beta, 10.0).is_err());
        assert_eq!(ub_estimate(&zero, 20.0, 10.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn budget_closed_form() {
        let (_, _, e3) = error_budget(0.05, 1e-2, 9.0, 20.0, 1.0).unwrap();
        let want = (-1.0f64).exp() / (0.05 * (20.0 * std::f64::consts::PI).sqrt());
        assert!((e3 - want).abs() < 1e-14 && (e3 - 0.928).abs() < 1e-3);
        let (a1, a2, _) = error_budget(0.05, 1e-2, 9.0, 20.0, 3.0).unwrap();
        let (b1, b2, _) = error_budget(0.05, 1e-4, 9.0, 20.0, 3.0).unwrap();
        assert!((a1 / 1e-4 - b1 / 1e-8).abs() < 1e-12 * a1 / 1e-4);
        assert!((a2 / 1e-2 - b2 / 1e-4).abs() < 1e-12 * a2 / 1e-2);
        assert!(error_budget(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_source_gives_zero_solution() {
        let grid = Grid::cube(1, -1.0, 1.0, 21).unwrap();
        let beta = RefractionField::uniform(&grid, 1.0).unwrap();
        let sched = TimeStepSchedule::build(5e-2, 0.5, 20.0).unwrap();
        let w = composite_weights(&sched).unwrap();
        let g = ComplexField::zeros(&grid);
        let (v, rep) = solve_helmholtz(&g, &beta, 10.0, &sched, &w, StoppingRule::FixedSchedule).unwrap();
        assert_eq!(v.max_norm(), 0.0);
        assert_eq!(rep.rel_residual, 0.0);
        assert!(rep.steps_pass1 >= 1 && rep.steps_pass2 >= 1);
    }

    #[test]
    fn residual_rule_stops_when_met() {
        let grid = Grid::cube(1, -1.0, 1.0, 71).unwrap();
        let beta = RefractionField::uniform(&grid, 1.0).unwrap();
        let g = ComplexField::from_fn(&grid, |p| Complex64::new(-10.0 * p[0] * p[0], 10.0 * p[0]).exp());
        let sched = TimeStepSchedule::build(5e-2, 0.5, 20.0).unwrap();
        let w = composite_weights(&sched).unwrap();
        let (_, full) = solve_helmholtz(&g, &beta, 10.0, &sched, &w, StoppingRule::FixedSchedule).unwrap();
        let tol = 2.0 * full.rel_residual;
        let rule = StoppingRule::ResidualThreshold { tol, check_every: 1 };
        let (_, early) = solve_helmholtz(&g, &beta, 10.0, &sched, &w, rule).unwrap();
        assert!(early.rel_residual <= tol, "{} > {tol}", early.rel_residual);
        assert!(early.truncated && early.steps_pass2 < full.steps_pass2);
    }
}
