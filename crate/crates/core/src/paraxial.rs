//! Pseudo-time paraxial march
//!
//! ```text
//! u_t = i(β - 1) u + (i/κ²) Δu,    u + (i/κ) ∂u/∂n = 0 on the boundary
//! ```
//!
//! Each step is backward Euler split by direction: the axis-1 factor carries
//! the `(β - 1)` term, axes 2 and 3 only their second differences. Every
//! factor is a batch of independent tridiagonal line solves.
//!
//! Boundary rows come from the Robin condition with the one-sided
//! three-point derivative,
//! `κ u_0 + i (3u_0 - 4u_1 + u_2)/(2h) = 0` (mirrored on the upper face).
//! The `u_2` term is eliminated with the first interior row so lines stay
//! tridiagonal.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{arg_err, OftError, Result};
use crate::grid::{check_grid, ComplexField, Grid, RefractionField};
use crate::quadrature::{OftAccumulator, QuadratureWeights};
use crate::schedule::TimeStepSchedule;

/// Pivots smaller than this are treated as exact zeros.
pub const PIVOT_TOLERANCE: f64 = 1e-300;

/// Rows per parallel task when sweeping strided axes.
const COLUMN_BLOCK: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<Complex64>, diag: Vec<Complex64>, sup: Vec<Complex64>, rhs: Vec<Complex64>) -> Result<Self> {
        let m = diag.len();
        if m < 2 || sub.len() != m - 1 || sup.len() != m - 1 || rhs.len() != m {
            return arg_err("tridiagonal system needs lengths (m-1, m, m-1, m) with m >= 2");
        }
        Ok(TridiagonalSystem { sub, diag, sup, rhs })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`, for residual checks.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.len();
        (0..m)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }
}

/// Thomas elimination without pivoting.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<Complex64>> {
    let m = sys.len();
    let mut cp = vec![Complex64::new(0.0, 0.0); m];
    let mut x = sys.rhs.clone();
    let mut pivot = sys.diag[0];
    for i in 0..m {
        if i > 0 {
            pivot = sys.diag[i] - sys.sub[i - 1] * cp[i - 1];
        }
        if pivot.norm() < PIVOT_TOLERANCE {
            return Err(OftError::SingularLine {
                axis: 0,
                line: 0,
                row: i,
            });
        }
        let inv = pivot.inv();
        if i + 1 < m {
            cp[i] = sys.sup[i] * inv;
        }
        x[i] = if i > 0 {
            (x[i] - sys.sub[i - 1] * x[i - 1]) * inv
        } else {
            x[i] * inv
        };
    }
    for i in (0..m - 1).rev() {
        let next = x[i + 1];
        x[i] -= cp[i] * next;
    }
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct ParaxialProblem {
    grid: Grid,
    beta: RefractionField,
    kappa: f64,
    initial: ComplexField,
}

impl ParaxialProblem {
    pub fn new(beta: RefractionField, kappa: f64, initial: ComplexField) -> Result<Self> {
        check_grid(beta.grid(), initial.grid())?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return arg_err("kappa must be positive");
        }
        Ok(ParaxialProblem {
            grid: initial.grid().clone(),
            beta,
            kappa,
            initial,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn beta(&self) -> &RefractionField {
        &self.beta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn initial(&self) -> &ComplexField {
        &self.initial
    }
}

/// Row coefficients shared by every line along one axis for one step.
#[derive(Debug, Clone, Copy)]
struct AxisCoefficients {
    /// Off-diagonal `-iΔt/(κ²h²)`.
    off: Complex64,
    /// Diagonal without the `(β - 1)` contribution.
    diag: Complex64,
    /// Robin row on `(u_face, u_1, u_2)`.
    bc: [Complex64; 3],
}

impl AxisCoefficients {
    fn new(kappa: f64, h: f64, dt: f64) -> Self {
        let i = Complex64::i();
        let s = dt / (kappa * kappa * h * h);
        AxisCoefficients {
            off: -i * s,
            diag: Complex64::new(1.0, 2.0 * s),
            bc: [
                Complex64::new(kappa, 1.5 / h),
                Complex64::new(0.0, -2.0 / h),
                Complex64::new(0.0, 0.5 / h),
            ],
        }
    }

    /// Factorization of one line with diagonal entries `diag(j)`. Writes the
    /// reciprocal pivots and `c'_j = sup_j / pivot_j`.
    /// Returns the failing row on a zero pivot.
    fn factor(
        &self,
        n: usize,
        diag: impl Fn(usize) -> Complex64,
        inv_m: &mut [Complex64],
        cp: &mut [Complex64],
    ) -> std::result::Result<(), usize> {
        let [c0, c1, c2] = self.bc;
        let g = c2 / self.off;
        // Boundary rows after eliminating the second neighbour with row 1 (or n-2).
        let d0 = c0 - c2;
        let s0 = c1 - g * diag(1);
        let dl = c0 - c2;
        let sl = c1 - g * diag(n - 2);
        let mut prev_cp = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let (sub, d, sup) = if j == 0 {
                (Complex64::new(0.0, 0.0), d0, s0)
            } else if j == n - 1 {
                (sl, dl, Complex64::new(0.0, 0.0))
            } else {
                (self.off, diag(j), self.off)
            };
            let m = d - sub * prev_cp;
            if m.norm() < PIVOT_TOLERANCE {
                return Err(j);
            }
            let inv = m.inv();
            inv_m[j] = inv;
            prev_cp = sup * inv;
            cp[j] = prev_cp;
        }
        Ok(())
    }

    /// Multiplier applied to the first interior (or last interior) rhs to
    /// form the boundary-row rhs: `-c2/off`.
    fn boundary_rhs_factor(&self) -> Complex64 {
        -self.bc[2] / self.off
    }

    fn last_sub(&self, diag_n2: Complex64) -> Complex64 {
        self.bc[1] - self.bc[2] / self.off * diag_n2
    }
}

/// Solves one contiguous line in place given its factorization.
fn solve_contiguous(
    x: &mut [Complex64],
    inv_m: &[Complex64],
    cp: &[Complex64],
    off: Complex64,
    g: Complex64,
    last_sub: Complex64,
) {
    let n = x.len();
    let saved = x[n - 2];
    x[0] = g * x[1] * inv_m[0];
    for j in 1..n - 1 {
        x[j] = (x[j] - off * x[j - 1]) * inv_m[j];
    }
    x[n - 1] = (g * saved - last_sub * x[n - 2]) * inv_m[n - 1];
    for j in (0..n - 1).rev() {
        let next = x[j + 1];
        x[j] -= cp[j] * next;
    }
}

/// Solves the `inner` interleaved lines of one slab (rows of length `inner`)
/// in place, with the same factorization for every line.
fn solve_slab(
    slab: &mut [Complex64],
    inner: usize,
    inv_m: &[Complex64],
    cp: &[Complex64],
    off: Complex64,
    g: Complex64,
    last_sub: Complex64,
) {
    let n = slab.len() / inner;
    let saved: Vec<Complex64> = slab[(n - 2) * inner..(n - 1) * inner].to_vec();
    {
        let (r0, rest) = slab.split_at_mut(inner);
        let r1 = &rest[..inner];
        let s = g * inv_m[0];
        r0.par_chunks_mut(COLUMN_BLOCK)
            .zip(r1.par_chunks(COLUMN_BLOCK))
            .for_each(|(a, b)| a.iter_mut().zip(b).for_each(|(x, y)| *x = s * y));
    }
    for j in 1..n {
        let (before, rest) = slab.split_at_mut(j * inner);
        let prev = &before[(j - 1) * inner..];
        let cur = &mut rest[..inner];
        let m = inv_m[j];
        if j < n - 1 {
            cur.par_chunks_mut(COLUMN_BLOCK)
                .zip(prev.par_chunks(COLUMN_BLOCK))
                .for_each(|(a, b)| a.iter_mut().zip(b).for_each(|(x, y)| *x = (*x - off * y) * m));
        } else {
            cur.par_chunks_mut(COLUMN_BLOCK)
                .zip(prev.par_chunks(COLUMN_BLOCK))
                .zip(saved.par_chunks(COLUMN_BLOCK))
                .for_each(|((a, b), s)| {
                    for ((x, y), z) in a.iter_mut().zip(b).zip(s) {
                        *x = (g * z - last_sub * y) * m;
                    }
                });
        }
    }
    for j in (0..n - 1).rev() {
        let (head, tail) = slab.split_at_mut((j + 1) * inner);
        let cur = &mut head[j * inner..];
        let next = &tail[..inner];
        let c = cp[j];
        cur.par_chunks_mut(COLUMN_BLOCK)
            .zip(next.par_chunks(COLUMN_BLOCK))
            .for_each(|(a, b)| a.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y));
    }
}

/// One split backward-Euler step in place.
pub fn adi_step_in_place(u: &mut ComplexField, prob: &ParaxialProblem, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return arg_err("time step must be positive");
    }
    check_grid(u.grid(), &prob.grid)?;
    let grid = prob.grid.clone();
    let i = Complex64::i();
    for axis in 0..grid.dim() {
        let n = grid.n(axis);
        let coef = AxisCoefficients::new(prob.kappa, grid.spacing(axis), dt);
        let g = coef.boundary_rhs_factor();
        if axis == 0 {
            let beta = prob.beta.values();
            let homogeneous = prob.beta.is_homogeneous();
            // With β ≡ 1 every line shares one factorization.
            let shared = if homogeneous {
                let mut inv_m = vec![Complex64::new(0.0, 0.0); n];
                let mut cp = vec![Complex64::new(0.0, 0.0); n];
                coef.factor(n, |_| coef.diag, &mut inv_m, &mut cp)
                    .map_err(|row| OftError::SingularLine { axis, line: 0, row })?;
                Some((inv_m, cp))
            } else {
                None
            };
            u.values_mut().par_chunks_mut(n).enumerate().try_for_each_init(
                || (vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]),
                |(inv_m, cp), (line, x)| {
                    let base = line * n;
                    let diag = |j: usize| coef.diag - i * dt * (beta[base + j] - 1.0);
                    let (im, c) = match &shared {
                        Some((a, b)) => (a.as_slice(), b.as_slice()),
                        None => {
                            coef.factor(n, diag, inv_m, cp).map_err(|row| OftError::SingularLine {
                                axis,
                                line,
                                row,
                            })?;
                            (inv_m.as_slice(), cp.as_slice())
                        }
                    };
                    let last_sub = coef.last_sub(diag(n - 2));
                    solve_contiguous(x, im, c, coef.off, g, last_sub);
                    Ok::<(), OftError>(())
                },
            )?;
        } else {
            let mut inv_m = vec![Complex64::new(0.0, 0.0); n];
            let mut cp = vec![Complex64::new(0.0, 0.0); n];
            coef.factor(n, |_| coef.diag, &mut inv_m, &mut cp)
                .map_err(|row| OftError::SingularLine { axis, line: 0, row })?;
            let last_sub = coef.last_sub(coef.diag);
            let inner = grid.stride(axis);
            u.values_mut()
                .par_chunks_mut(inner * n)
                .for_each(|slab| solve_slab(slab, inner, &inv_m, &cp, coef.off, g, last_sub));
        }
    }
    if !u.is_finite() {
        return Err(OftError::NonFinite("adi_step"));
    }
    Ok(())
}

/// `(I + Δt𝒞)^{-1} (I + Δtℬ)^{-1} (I + Δt𝒜)^{-1} u_n`.
pub fn adi_step(u_n: &ComplexField, prob: &ParaxialProblem, dt: f64) -> Result<ComplexField> {
    let mut u = u_n.clone();
    adi_step_in_place(&mut u, prob, dt)?;
    Ok(u)
}

/// Dense matrix of the single-axis backward-Euler operator on a 1D grid,
/// including the boundary rows as assembled (before elimination).
pub fn line_operator_dense(prob: &ParaxialProblem, dt: f64) -> Result<Vec<Vec<Complex64>>> {
    let grid = &prob.grid;
    if grid.dim() != 1 {
        return arg_err("dense line operator is defined for 1D problems");
    }
    let n = grid.n(0);
    let coef = AxisCoefficients::new(prob.kappa, grid.spacing(0), dt);
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![vec![zero; n]; n];
    for (j, row) in a.iter_mut().enumerate() {
        if j == 0 {
            row[0] = coef.bc[0];
            row[1] = coef.bc[1];
            row[2] = coef.bc[2];
        } else if j == n - 1 {
            row[n - 1] = coef.bc[0];
            row[n - 2] = coef.bc[1];
            row[n - 3] = coef.bc[2];
        } else {
            row[j - 1] = coef.off;
            row[j + 1] = coef.off;
            row[j] = coef.diag - Complex64::i() * dt * (prob.beta.values()[j] - 1.0);
        }
    }
    Ok(a)
}

/// What a monitor sees after step `n` (including `n = 0`, the initial data).
pub struct StepState<'a> {
    pub n: usize,
    pub t: f64,
    pub u: &'a ComplexField,
    pub accumulator: &'a OftAccumulator<'a>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorAction {
    Continue,
    /// End the rule at the current node using the terminal weight.
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveReport {
    /// ADI steps taken.
    pub steps: usize,
    /// Pseudo-time of the last accumulated snapshot.
    pub t_reached: f64,
    /// `max|u|` of the last snapshot.
    pub final_max_norm: f64,
    pub initial_max_norm: f64,
    /// Largest `max|u^n| / max|u^0|` seen.
    pub max_growth: f64,
    /// True when a stopping rule ended the march before the last node.
    pub truncated: bool,
    pub stop_evaluations: usize,
}

/// Pass-level stopping rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StoppingRule {
    /// Run the whole schedule.
    FixedSchedule,
    /// Stop once `max|u| ≤ 10 · tol · σ √t`, `σ = 1/(κ L)`.
    UbThreshold { tol: f64 },
    /// Stop the second pass once the Helmholtz residual of the candidate
    /// solution drops below `tol`, checked every `check_every` steps.
    ResidualThreshold { tol: f64, check_every: usize },
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StoppingRule::FixedSchedule => Ok(()),
            StoppingRule::UbThreshold { tol } | StoppingRule::ResidualThreshold { tol, .. } if !(tol > 0.0) => {
                arg_err("stopping tolerance must be positive")
            }
            StoppingRule::ResidualThreshold { check_every: 0, .. } => arg_err("check_every must be at least 1"),
            _ => Ok(()),
        }
    }
}

/// Core march: accumulates `Σ ω_n u^n` while `monitor` may end it early.
pub fn evolve_with_monitor<M>(
    prob: &ParaxialProblem,
    sched: &TimeStepSchedule,
    weights: &QuadratureWeights,
    mut monitor: M,
) -> Result<(ComplexField, EvolveReport)>
where
    M: FnMut(&StepState<'_>) -> Result<MonitorAction>,
{
    if weights.nodes() != sched.nodes() {
        return arg_err("weights were not built from this schedule");
    }
    let mut u = prob.initial.clone();
    let mut acc = OftAccumulator::new(weights, &u);
    let initial_max = u.max_norm();
    let mut report = EvolveReport {
        steps: 0,
        t_reached: 0.0,
        final_max_norm: initial_max,
        initial_max_norm: initial_max,
        max_growth: 1.0,
        truncated: false,
        stop_evaluations: 0,
    };
    let big_n = sched.steps();
    for n in 0..=big_n {
        let t = sched.nodes()[n];
        let current = if n == 0 { initial_max } else { u.max_norm() };
        if initial_max > 0.0 {
            report.max_growth = report.max_growth.max(current / initial_max);
        }
        report.final_max_norm = current;
        report.t_reached = t;
        let action = if n == 0 {
            MonitorAction::Continue
        } else {
            report.stop_evaluations += 1;
            monitor(&StepState {
                n,
                t,
                u: &u,
                accumulator: &acc,
            })?
        };
        if action == MonitorAction::Stop && n < big_n {
            acc.accumulate_terminal(&u)?;
            report.truncated = true;
            break;
        }
        acc.accumulate(&u)?;
        if n < big_n {
            adi_step_in_place(&mut u, prob, sched.step(n))?;
            report.steps += 1;
        }
    }
    Ok((acc.finish(), report))
}

/// `f(A) · initial` with `f(x) = x^{-1/2}`, `A = β + Δ/κ²`.
///
/// The residual rule needs the two-pass context and is rejected here; use
/// `helmholtz::solve_helmholtz` for it.
pub fn evolve_and_accumulate(
    prob: &ParaxialProblem,
    sched: &TimeStepSchedule,
    weights: &QuadratureWeights,
    stop: StoppingRule,
) -> Result<(ComplexField, EvolveReport)> {
    stop.validate()?;
    let sigma = 1.0 / (prob.kappa * prob.grid.max_edge());
    match stop {
        StoppingRule::FixedSchedule => evolve_with_monitor(prob, sched, weights, |_| Ok(MonitorAction::Continue)),
        StoppingRule::UbThreshold { tol } => evolve_with_monitor(prob, sched, weights, move |s| {
            Ok(if s.u.max_norm() <= 10.0 * tol * sigma * s.t.sqrt() {
                MonitorAction::Stop
            } else {
                MonitorAction::Continue
            })
        }),
        StoppingRule::ResidualThreshold { .. } => {
            arg_err("residual stopping needs the full two-pass solve (solve_helmholtz)")
        }
    }
}

/// Plain uniform-step march of the paraxial equation (no quadrature), calling
/// `observe(n, t, u)` after every step including `n = 0`.
pub fn march_uniform<F>(prob: &ParaxialProblem, dt: f64, steps: usize, mut observe: F) -> Result<ComplexField>
where
    F: FnMut(usize, f64, &ComplexField),
{
    let mut u = prob.initial.clone();
    observe(0, 0.0, &u);
    for n in 1..=steps {
        adi_step_in_place(&mut u, prob, dt)?;
        observe(n, n as f64 * dt, &u);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use oft_testkit::{dense_solve, mat_vec, Rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn thomas_identity_and_poisson() {
        let r: Vec<_> = (0..5).map(|k| c(k as f64, -1.0)).collect();
        let sys = TridiagonalSystem::new(
            vec![c(0.0, 0.0); 4],
            vec![c(1.0, 0.0); 5],
            vec![c(0.0, 0.0); 4],
            r.clone(),
        )
        .unwrap();
        assert_eq!(thomas_solve(&sys).unwrap(), r);

        let m = 12;
        let x: Vec<_> = (1..=m).map(|k| c(k as f64, 0.0)).collect();
        let mut sys = TridiagonalSystem {
            sub: vec![c(-1.0, 0.0); m - 1],
            diag: vec![c(2.0, 0.0); m],
            sup: vec![c(-1.0, 0.0); m - 1],
            rhs: vec![],
        };
        sys.rhs = sys.apply(&x);
        let y = thomas_solve(&sys).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn thomas_matches_dense_lu() {
        let mut rng = Rng::new(7);
        let m = 50;
        let sys = TridiagonalSystem::new(
            (0..m - 1).map(|_| rng.complex()).collect(),
            (0..m).map(|_| rng.complex() + 4.0).collect(),
            (0..m - 1).map(|_| rng.complex()).collect(),
            (0..m).map(|_| rng.complex()).collect(),
        )
        .unwrap();
        let mut dense = vec![vec![c(0.0, 0.0); m]; m];
        for i in 0..m {
            dense[i][i] = sys.diag[i];
            if i > 0 {
                dense[i][i - 1] = sys.sub[i - 1];
            }
            if i + 1 < m {
                dense[i][i + 1] = sys.sup[i];
            }
        }
        let want = dense_solve(&dense, &sys.rhs).unwrap();
        let got = thomas_solve(&sys).unwrap();
        let diff = want.iter().zip(&got).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn thomas_zero_pivot() {
        let sys = TridiagonalSystem::new(
            vec![c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0)],
            vec![c(1.0, 0.0); 2],
        )
        .unwrap();
        assert!(matches!(thomas_solve(&sys), Err(OftError::SingularLine { row: 0, .. })));
    }

    fn problem_1d(n: usize, beta: impl Fn(f64) -> f64 + Sync) -> ParaxialProblem {
        let g = Grid::cube(1, -1.0, 1.0, n).unwrap();
        let b = RefractionField::from_fn(&g, |x| beta(x[0])).unwrap();
        let init = ComplexField::from_fn(&g, |x| Complex64::cis(10.0 * x[0]) * (-10.0 * x[0] * x[0]).exp());
        ParaxialProblem::new(b, 10.0, init).unwrap()
    }

    #[test]
    fn one_dimensional_step_is_backward_euler() {
        for beta in [|_: f64| 1.0, |x: f64| 1.0 + 0.3 * (-x * x).exp()] {
            let prob = problem_1d(41, beta);
            let dt = 0.07;
            let dense = line_operator_dense(&prob, dt).unwrap();
            let mut rhs = prob.initial().values().to_vec();
            rhs[0] = c(0.0, 0.0);
            rhs[40] = c(0.0, 0.0);
            let want = dense_solve(&dense, &rhs).unwrap();
            let got = adi_step(prob.initial(), &prob, dt).unwrap();
            let diff = want
                .iter()
                .zip(got.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "{diff}");
            // boundary rows hold exactly
            let back = mat_vec(&dense, got.values());
            assert!(back[0].norm() < 1e-10 && back[40].norm() < 1e-10);
        }
    }

    #[test]
    fn strided_axis_matches_contiguous() {
        // A 2D field constant along axis 1 sweeps identically along axis 2
        // after transposition.
        let g = Grid::new(&[-1.0, -1.0], &[1.0, 1.0], &[9, 13]).unwrap();
        let gt = Grid::new(&[-1.0, -1.0], &[1.0, 1.0], &[13, 9]).unwrap();
        let f = |a: f64, b: f64| Complex64::cis(3.0 * a) * (-(a * a + 2.0 * b * b)).exp();
        let u = ComplexField::from_fn(&g, |x| f(x[0], x[1]));
        let ut = ComplexField::from_fn(&gt, |x| f(x[1], x[0]));
        let p = ParaxialProblem::new(RefractionField::uniform(&g, 1.0).unwrap(), 5.0, u).unwrap();
        let pt = ParaxialProblem::new(RefractionField::uniform(&gt, 1.0).unwrap(), 5.0, ut).unwrap();
        let a = adi_step(p.initial(), &p, 0.03).unwrap();
        let b = adi_step(pt.initial(), &pt, 0.03).unwrap();
        // The split factors commute for β ≡ 1, so the results are transposes.
        for j in 0..13 {
            for i in 0..9 {
                let x = a.values()[i + 9 * j];
                let y = b.values()[j + 13 * i];
                assert!((x - y).norm() < 1e-13, "({i},{j}) {x} {y}");
            }
        }
    }

    #[test]
    fn stopping_rule_validation() {
        assert!(StoppingRule::UbThreshold { tol: 0.0 }.validate().is_err());
        assert!(StoppingRule::ResidualThreshold {
            tol: 1e-2,
            check_every: 0
        }
        .validate()
        .is_err());
        assert!(StoppingRule::FixedSchedule.validate().is_ok());
    }

    #[test]
    fn zero_initial_stays_zero() {
        let g = Grid::cube(2, -1.0, 1.0, 9).unwrap();
        let prob = ParaxialProblem::new(
            RefractionField::uniform(&g, 1.2).unwrap(),
            10.0,
            ComplexField::zeros(&g),
        )
        .unwrap();
        let sched = TimeStepSchedule::build(0.05, 0.5, 5.0).unwrap();
        let w = crate::quadrature::composite_weights(&sched).unwrap();
        let (v, rep) = evolve_and_accumulate(&prob, &sched, &w, StoppingRule::FixedSchedule).unwrap();
        assert_eq!(v.max_norm(), 0.0);
        assert_eq!(rep.steps, sched.steps());
        assert!(evolve_and_accumulate(
            &prob,
            &sched,
            &w,
            StoppingRule::ResidualThreshold {
                tol: 1e-2,
                check_every: 1
            }
        )
        .is_err());
    }
}
