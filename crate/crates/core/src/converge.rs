//! Convergence study on the unit test problem: `β ≡ 1`, `κ = 10`, box
//! `[-1, 1]^d`, source `g = e^{-10|x|² + iκx₁}`, compared against the modal
//! oracle.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{arg_err, Result};
use crate::grid::{ComplexField, Grid, RefractionField};
use crate::helmholtz::{apply_inverse_sqrt, relative_error, solve_helmholtz};
use crate::oracle::{exact_v1_v2, expand_separable, find_eigenvalues};
use crate::paraxial::StoppingRule;
use crate::quadrature::composite_weights;
use crate::schedule::TimeStepSchedule;

pub const KAPPA: f64 = 10.0;
pub const T_FINAL: f64 = 20.0;
/// Steps used for rows 1 to 5; `Δt₀ = 5·10^{-k}`.
pub const ROW_STEPS: [usize; 5] = [102, 1308, 17810, 233199, 2617277];
pub const ROW_NX: [usize; 5] = [70, 200, 600, 1800, 5400];
/// Default cap on the working set of one row.
pub const DEFAULT_MEMORY_LIMIT: u64 = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowSpec {
    pub row: usize,
    pub dt0: f64,
    pub steps: usize,
    pub nx: usize,
}

impl RowSpec {
    /// Row `k` in `1..=5`.
    pub fn new(row: usize) -> Result<Self> {
        if !(1..=5).contains(&row) {
            return arg_err(format!("convergence rows run from 1 to 5 (got {row})"));
        }
        Ok(RowSpec {
            row,
            dt0: 5.0 * 10f64.powi(-(row as i32) - 1),
            steps: ROW_STEPS[row - 1],
            nx: ROW_NX[row - 1],
        })
    }

    /// Bytes held at once: about a dozen complex fields of `Nx^d` points.
    pub fn memory_estimate(&self, dim: usize) -> u64 {
        12 * 16 * (self.nx as u64).pow(dim as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    pub spec: RowSpec,
    pub rel_err_v1: f64,
    pub ub: f64,
    pub rel_err_v2: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeTable {
    pub dim: usize,
    pub rows: Vec<ConvergeRow>,
    /// Rows left out because their memory estimate exceeded the limit.
    pub skipped: Vec<RowSpec>,
}

fn gx(x: f64) -> Complex64 {
    Complex64::new(-10.0 * x * x, KAPPA * x).exp()
}

fn gy(x: f64) -> Complex64 {
    Complex64::new(-10.0 * x * x, 0.0).exp()
}

/// Oracle modes per axis: 60 in 1D, 40 otherwise.
pub fn oracle_modes(dim: usize) -> usize {
    if dim == 1 {
        60
    } else {
        40
    }
}

/// Source of the study on `grid`.
pub fn test_source(grid: &Grid) -> ComplexField {
    let dim = grid.dim();
    ComplexField::from_fn(grid, |p| (1..dim).fold(gx(p[0]), |acc, d| acc * gy(p[d])))
}

/// One row of the table.
pub fn run_row(dim: usize, spec: RowSpec) -> Result<ConvergeRow> {
    if !(1..=3).contains(&dim) {
        return arg_err(format!("dimension must be 1, 2 or 3 (got {dim})"));
    }
    let basis = find_eigenvalues(KAPPA, 2.0, oracle_modes(dim))?;
    let bases = vec![basis; dim];
    let mut factors: Vec<&(dyn Fn(f64) -> Complex64 + Sync)> = vec![&gx];
    factors.resize(dim, &gy);
    let exp = expand_separable(&bases, &factors)?;
    let grid = Grid::cube(dim, -1.0, 1.0, spec.nx)?;
    let (v1_exact, v2_exact) = exact_v1_v2(&exp, KAPPA, &grid)?;
    let beta = RefractionField::uniform(&grid, 1.0)?;
    let g = test_source(&grid);
    let sched = TimeStepSchedule::with_steps(spec.dt0, 10.0 * spec.dt0, T_FINAL, spec.steps)?;
    let weights = composite_weights(&sched)?;
    let (v1, _) = apply_inverse_sqrt(&g, &beta, KAPPA, &sched, &weights, StoppingRule::FixedSchedule)?;
    let rel_err_v1 = relative_error(&v1, &v1_exact)?;
    drop(v1);
    let (v2, report) = solve_helmholtz(&g, &beta, KAPPA, &sched, &weights, StoppingRule::FixedSchedule)?;
    Ok(ConvergeRow {
        spec,
        rel_err_v1,
        ub: report.ub_estimate,
        rel_err_v2: relative_error(&v2, &v2_exact)?,
        residual: report.rel_residual,
    })
}

/// Rows `first..=last`, skipping those whose memory estimate exceeds `memory_limit`.
pub fn run_converge(dim: usize, first: usize, last: usize, memory_limit: u64) -> Result<ConvergeTable> {
    if first > last {
        return arg_err(format!("empty row range {first}..{last}"));
    }
    let mut table = ConvergeTable {
        dim,
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for row in first..=last {
        let spec = RowSpec::new(row)?;
        if spec.memory_estimate(dim) > memory_limit {
            table.skipped.push(spec);
            continue;
        }
        table.rows.push(run_row(dim, spec)?);
    }
    Ok(table)
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_order(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return arg_err("order fit needs at least two paired samples");
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return arg_err("order fit needs positive samples");
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return arg_err("order fit needs distinct abscissae");
    }
    Ok(sxy / sxx)
}

impl ConvergeTable {
    /// Fitted order of `relErr(v₁)` against `Δt₀`, when two or more rows ran.
    pub fn order_v1(&self) -> Option<f64> {
        let dt: Vec<f64> = self.rows.iter().map(|r| r.spec.dt0).collect();
        let e: Vec<f64> = self.rows.iter().map(|r| r.rel_err_v1).collect();
        fitted_order(&dt, &e).ok()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("dt0,Ntau,Nx,relErr_v1,ub,relErr_v2,res\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:e},{},{},{:.6e},{:.6e},{:.6e},{:.6e}",
                r.spec.dt0, r.spec.steps, r.spec.nx, r.rel_err_v1, r.ub, r.rel_err_v2, r.residual
            );
        }
        s
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}
