//! Browser bindings for the OFT Helmholtz solver.
//!
//! Each export has a plain Rust twin (`*::compute`) so the numerics can be
//! tested off the browser.

use num_complex::Complex64;
use oft_core::helmholtz::{build_source, relative_error, solve_helmholtz, IncidentField};
use oft_core::oracle::{characteristic, exact_v1_v2, expand_1d, find_eigenvalues};
use oft_core::paraxial::StoppingRule;
use oft_core::quadrature::composite_weights;
use oft_core::schedule::TimeStepSchedule;
use oft_core::{ComplexField, Grid, RefractionField, Result};
use wasm_bindgen::prelude::*;

const ORACLE_MODES: usize = 60;

fn js(e: oft_core::OftError) -> JsError {
    JsError::new(&e.to_string())
}

fn schedule(dt0: f64, t_final: f64) -> Result<TimeStepSchedule> {
    TimeStepSchedule::build(dt0, 10.0 * dt0, t_final)
}

/// 1D solve of the packet `e^{-10x² + iκx}` on `[-1, 1]` in a uniform medium,
/// next to the exact modal solution.
#[wasm_bindgen]
pub struct Solve1d {
    x: Vec<f64>,
    approx: Vec<f64>,
    exact: Vec<f64>,
    rel_err: f64,
    residual: f64,
    steps: usize,
}

impl Solve1d {
    pub fn compute(kappa: f64, nx: usize, dt0: f64, t_final: f64) -> Result<Self> {
        let grid = Grid::cube(1, -1.0, 1.0, nx)?;
        let packet = |x: f64| Complex64::new(-10.0 * x * x, kappa * x).exp();
        let g = ComplexField::from_fn(&grid, |p| packet(p[0]));
        let beta = RefractionField::uniform(&grid, 1.0)?;
        let sched = schedule(dt0, t_final)?;
        let weights = composite_weights(&sched)?;
        let (v, report) = solve_helmholtz(&g, &beta, kappa, &sched, &weights, StoppingRule::FixedSchedule)?;
        let basis = find_eigenvalues(kappa, 2.0, ORACLE_MODES)?;
        let exp = expand_1d(&basis, packet)?;
        let (_, v2) = exact_v1_v2(&exp, kappa, &grid)?;
        Ok(Self {
            x: grid.axis_coords(0),
            approx: v.values().iter().map(|z| z.re).collect(),
            exact: v2.values().iter().map(|z| z.re).collect(),
            rel_err: relative_error(&v, &v2)?,
            residual: report.rel_residual,
            steps: report.steps_pass2,
        })
    }
}

#[wasm_bindgen]
impl Solve1d {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    /// Real part of the computed field.
    #[wasm_bindgen(getter)]
    pub fn approx(&self) -> Vec<f64> {
        self.approx.clone()
    }

    /// Real part of the exact field.
    #[wasm_bindgen(getter)]
    pub fn exact(&self) -> Vec<f64> {
        self.exact.clone()
    }

    #[wasm_bindgen(getter, js_name = relErr)]
    pub fn rel_err(&self) -> f64 {
        self.rel_err
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> usize {
        self.steps
    }
}

#[wasm_bindgen(js_name = solve1d)]
pub fn solve_1d(kappa: f64, nx: usize, dt0: f64, t_final: f64) -> std::result::Result<Solve1d, JsError> {
    Solve1d::compute(kappa, nx, dt0, t_final).map_err(js)
}

/// Field scattered by a Gaussian bump `β = 1 + A e^{-|x|²/w²}` on `[-1, 1]²`
/// under a plane wave along `x₁`. Values run fastest along `x₁`.
#[wasm_bindgen]
pub struct Scatter2d {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    residual: f64,
    wall_time: f64,
}

impl Scatter2d {
    pub fn compute(n: usize, kappa: f64, amplitude: f64, width: f64, dt0: f64) -> Result<Self> {
        let grid = Grid::cube(2, -1.0, 1.0, n)?;
        let beta = RefractionField::from_fn(&grid, |p| {
            1.0 + amplitude * (-(p[0] * p[0] + p[1] * p[1]) / (width * width)).exp()
        })?;
        let incident = IncidentField::plane_along(&[1.0, 0.0], kappa)?;
        let g = build_source(&beta, &incident)?;
        let sched = schedule(dt0, 2.0 * kappa)?;
        let weights = composite_weights(&sched)?;
        let (v, report) = solve_helmholtz(&g, &beta, kappa, &sched, &weights, StoppingRule::FixedSchedule)?;
        Ok(Self {
            n,
            re: v.values().iter().map(|z| z.re).collect(),
            im: v.values().iter().map(|z| z.im).collect(),
            residual: report.rel_residual,
            wall_time: report.wall_time,
        })
    }
}

#[wasm_bindgen]
impl Scatter2d {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }

    #[wasm_bindgen(getter)]
    pub fn re(&self) -> Vec<f64> {
        self.re.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn im(&self) -> Vec<f64> {
        self.im.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    #[wasm_bindgen(getter, js_name = wallTime)]
    pub fn wall_time(&self) -> f64 {
        self.wall_time
    }
}

#[wasm_bindgen(js_name = scatter2d)]
pub fn scatter_2d(
    n: usize,
    kappa: f64,
    amplitude: f64,
    width: f64,
    dt0: f64,
) -> std::result::Result<Scatter2d, JsError> {
    Scatter2d::compute(n, kappa, amplitude, width, dt0).map_err(js)
}

/// Roots of the Robin eigenvalue problem on an interval of length `length`,
/// interleaved as `[re₀, im₀, |f₀|, re₁, ...]`.
pub fn spectrum(alpha: f64, length: f64, count: usize) -> Result<Vec<f64>> {
    let basis = find_eigenvalues(alpha, length, count)?;
    Ok(basis
        .lambdas()
        .iter()
        .flat_map(|&l| [l.re, l.im, characteristic(l, alpha, length).norm()])
        .collect())
}

#[wasm_bindgen(js_name = eigenSpectrum)]
pub fn eigen_spectrum(alpha: f64, length: f64, count: usize) -> std::result::Result<Vec<f64>, JsError> {
    spectrum(alpha, length, count).map_err(js)
}
