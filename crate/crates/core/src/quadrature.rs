//! Piecewise-linear quadrature for the inverse square root transform
//!
//! ```text
//! f(A) g = √(-i/π) ∫_0^∞ e^{iτ} τ^{-1/2} u(τ) dτ,   u(τ) = e^{iτ(A-I)} g
//! ```
//!
//! `u` is interpolated linearly on each panel of the pseudo-time schedule and
//! the resulting integrals against `e^{iτ} τ^{-1/2}` are done in closed form
//! with Fresnel integrals. `√(-i) = e^{-iπ/4}` fixes the global phase.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{arg_err, OftError, Result};
use crate::grid::{check_grid, ComplexField};
use crate::schedule::TimeStepSchedule;
use crate::special::fresnel;

/// `√(-i/π) = (1 - i)/√(2π)`.
pub fn prefactor() -> Complex64 {
    Complex64::new(1.0, -1.0) / (2.0 * std::f64::consts::PI).sqrt()
}

/// Panels with `(tb - ta)/ta` below this use the Taylor expansion.
pub const TAYLOR_RELATIVE_WIDTH: f64 = 1e-4;
const TAYLOR_ABSOLUTE_WIDTH: f64 = 1e-2;
const TAYLOR_TERMS: usize = 9;

/// Weights `(w1, w2)` attached to the left and right endpoint values of the
/// linear interpolant on `[ta, tb]`:
///
/// ```text
/// w1 = √(-i/π) ∫ e^{iτ} τ^{-1/2} (tb - τ)/(tb - ta) dτ
/// w2 = √(-i/π) ∫ e^{iτ} τ^{-1/2} (τ - ta)/(tb - ta) dτ
/// ```
pub fn panel_weights(ta: f64, tb: f64) -> Result<(Complex64, Complex64)> {
    if !(ta >= 0.0 && ta.is_finite() && tb.is_finite()) {
        return arg_err(format!("panel [{ta}, {tb}] must be finite with ta >= 0"));
    }
    if tb <= ta {
        return arg_err(format!("panel end {tb} must exceed start {ta}"));
    }
    let h = tb - ta;
    if ta > 0.0 && h / ta < TAYLOR_RELATIVE_WIDTH && h < TAYLOR_ABSOLUTE_WIDTH {
        return Ok(taylor_panel(ta, tb));
    }
    closed_form_panel(ta, tb)
}

fn closed_form_panel(ta: f64, tb: f64) -> Result<(Complex64, Complex64)> {
    let h = tb - ta;
    let fa = fresnel(ta.sqrt())?.as_complex();
    let fb = fresnel(tb.sqrt())?.as_complex();
    let i = Complex64::i();
    // I0 = ∫ e^{iτ} τ^{-1/2},  I1 = ∫ e^{iτ} τ^{1/2}  (by parts: I1 = -i[√τ e^{iτ}] + (i/2) I0)
    let i0 = 2.0 * (fb - fa);
    let edge = tb.sqrt() * Complex64::cis(tb) - ta.sqrt() * Complex64::cis(ta);
    let i1 = -i * edge + 0.5 * i * i0;
    let k = prefactor() / h;
    Ok((k * (tb * i0 - i1), k * (i1 - ta * i0)))
}

/// Midpoint Taylor expansion of the two panel integrals. Exact through
/// `TAYLOR_TERMS` derivatives of `F(τ) = e^{iτ} τ^{-1/2}`.
fn taylor_panel(ta: f64, tb: f64) -> (Complex64, Complex64) {
    let h = tb - ta;
    let m = 0.5 * (ta + tb);
    let derivs = phase_power_derivatives(m, TAYLOR_TERMS);
    let half = 0.5 * h;
    let mut w1 = Complex64::new(0.0, 0.0);
    let mut w2 = Complex64::new(0.0, 0.0);
    let mut fact = 1.0;
    for (k, dk) in derivs.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        // ∫_{-h/2}^{h/2} s^k (h/2 ∓ s)/h ds
        let (even, odd) = if k % 2 == 0 {
            (half.powi(k as i32 + 1) / (k as f64 + 1.0), 0.0)
        } else {
            (0.0, 2.0 * half.powi(k as i32 + 2) / ((k as f64 + 2.0) * h))
        };
        let c = dk / fact;
        w1 += c * (even - odd);
        w2 += c * (even + odd);
    }
    let p = prefactor();
    (p * w1, p * w2)
}

/// `d^k/dτ^k [e^{iτ} τ^{-1/2}]` at `t`, for `k = 0..count`.
fn phase_power_derivatives(t: f64, count: usize) -> Vec<Complex64> {
    // Derivatives of τ^{-1/2}: p_j = (-1/2)(-3/2)...(-(2j-1)/2) t^{-1/2-j}.
    let mut p = Vec::with_capacity(count);
    let mut v = t.powf(-0.5);
    for j in 0..count {
        p.push(v);
        v *= -(2.0 * j as f64 + 1.0) / (2.0 * t);
    }
    let i = Complex64::i();
    let e = Complex64::cis(t);
    let mut out = Vec::with_capacity(count);
    let mut binom = vec![1.0f64; count];
    for k in 0..count {
        // row k of Pascal's triangle, updated in place
        if k > 0 {
            for j in (1..k).rev() {
                binom[j] += binom[j - 1];
            }
            binom[k] = 1.0;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=k {
            acc += binom[j] * i.powu((k - j) as u32) * p[j];
        }
        out.push(acc * e);
    }
    out
}

/// `√(-i/π) ∫_0^t e^{iτ} τ^{-1/2} dτ`, the scalar image of the composite rule.
pub fn transform_of_one(t: f64) -> Result<Complex64> {
    Ok(prefactor() * crate::special::half_power_phase_integral(t)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureWeights {
    nodes: Vec<f64>,
    panels: Vec<(Complex64, Complex64)>,
    omega: Vec<Complex64>,
}

impl QuadratureWeights {
    pub fn omega(&self) -> &[Complex64] {
        &self.omega
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `(w1, w2)` of panel `[t_n, t_{n+1}]`.
    pub fn panel(&self, n: usize) -> (Complex64, Complex64) {
        self.panels[n]
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn sum(&self) -> Complex64 {
        self.omega.iter().sum()
    }

    /// Weight of `u^n` when the rule is cut off at `t_n`: only the right half
    /// of the last panel, `w2(t_{n-1}, t_n)`.
    pub fn terminal_weight(&self, n: usize) -> Complex64 {
        if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.panels[n - 1].1
        }
    }

    /// Debug dump with columns `n,t_n,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,t_n,re,im")?;
        for (n, (t, o)) in self.nodes.iter().zip(&self.omega).enumerate() {
            writeln!(w, "{n},{t},{},{}", o.re, o.im)?;
        }
        Ok(())
    }
}

/// Composite weights over the whole schedule.
pub fn composite_weights(sched: &TimeStepSchedule) -> Result<QuadratureWeights> {
    composite_weights_on(sched.nodes())
}

/// Composite weights for an arbitrary increasing node list starting at 0.
pub fn composite_weights_on(nodes: &[f64]) -> Result<QuadratureWeights> {
    if nodes.len() < 2 {
        return arg_err("quadrature needs at least one panel");
    }
    let panels = nodes
        .par_windows(2)
        .map(|w| panel_weights(w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;
    let n = panels.len();
    let mut omega = Vec::with_capacity(n + 1);
    omega.push(panels[0].0);
    for k in 1..n {
        omega.push(panels[k - 1].1 + panels[k].0);
    }
    omega.push(panels[n - 1].1);
    if omega.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(OftError::NonFinite("composite_weights"));
    }
    Ok(QuadratureWeights {
        nodes: nodes.to_vec(),
        panels,
        omega,
    })
}

/// Streaming `Σ ω_n u^n`. Holds one running field; snapshots are not kept.
#[derive(Debug, Clone)]
pub struct OftAccumulator<'w> {
    weights: &'w QuadratureWeights,
    partial: ComplexField,
    n_done: usize,
    closed: bool,
}

impl<'w> OftAccumulator<'w> {
    pub fn new(weights: &'w QuadratureWeights, template: &ComplexField) -> Self {
        OftAccumulator {
            weights,
            partial: ComplexField::zeros(template.grid()),
            n_done: 0,
            closed: false,
        }
    }

    pub fn n_done(&self) -> usize {
        self.n_done
    }

    pub fn partial(&self) -> &ComplexField {
        &self.partial
    }

    /// `partial += ω_{n_done} u`.
    pub fn accumulate(&mut self, u: &ComplexField) -> Result<()> {
        let w = self.next_weight()?;
        self.add(w, u)
    }

    /// Adds `u^n` as the last sample of a rule truncated at `t_n`.
    pub fn accumulate_terminal(&mut self, u: &ComplexField) -> Result<()> {
        self.next_weight()?;
        let w = self.weights.terminal_weight(self.n_done);
        self.add(w, u)?;
        self.closed = true;
        Ok(())
    }

    fn next_weight(&self) -> Result<Complex64> {
        if self.closed {
            return Err(OftError::State("accumulator already closed".into()));
        }
        self.weights
            .omega
            .get(self.n_done)
            .copied()
            .ok_or_else(|| OftError::State(format!("accumulated past the last node ({})", self.n_done)))
    }

    fn add(&mut self, w: Complex64, u: &ComplexField) -> Result<()> {
        check_grid(self.partial.grid(), u.grid())?;
        self.partial
            .values_mut()
            .par_iter_mut()
            .zip(u.values().par_iter())
            .for_each(|(p, x)| *p += w * x);
        self.n_done += 1;
        Ok(())
    }

    pub fn finish(self) -> ComplexField {
        self.partial
    }
}

/// Free-function form of [`OftAccumulator::accumulate`].
pub fn accumulate(acc: &mut OftAccumulator<'_>, u: &ComplexField) -> Result<()> {
    acc.accumulate(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn taylor_branch_matches_brute_force() {
        use oft_testkit::integrate_c;
        let f = |t: f64| Complex64::cis(t) / t.sqrt();
        for &(a, width) in &[(1.0, 9e-5), (30.0, 2.9e-3), (0.5, 4e-5), (90.0, 9e-3)] {
            let b: f64 = a + width;
            let h = b - a;
            let (w1, w2) = taylor_panel(a, b);
            let o1 = prefactor() * integrate_c(|t| f(t) * (b - t) / h, a, b, 1e-18);
            let o2 = prefactor() * integrate_c(|t| f(t) * (t - a) / h, a, b, 1e-18);
            let scale = h / a.sqrt();
            assert!((w1 - o1).norm() < 1e-13 * scale, "{a} {h}: {w1} vs {o1}");
            assert!((w2 - o2).norm() < 1e-13 * scale);
            // the closed form degrades like eps/h here but must stay close
            let c = closed_form_panel(a, b).unwrap();
            assert!((c.0 - o1).norm() < 1e-10);
        }
    }

    #[test]
    fn weights_sum_telescopes() {
        let sched = TimeStepSchedule::build(5e-2, 0.5, 20.0).unwrap();
        let w = composite_weights(&sched).unwrap();
        let total = transform_of_one(sched.t_last()).unwrap();
        assert!((w.sum() - total).norm() < 1e-12, "{} vs {}", w.sum(), total);
        assert_eq!(w.omega().len(), sched.steps() + 1);
    }

    #[test]
    fn two_node_rule() {
        let w = composite_weights_on(&[0.0, 0.7]).unwrap();
        let (a, b) = panel_weights(0.0, 0.7).unwrap();
        assert_eq!(w.omega(), &[a, b]);
    }

    #[test]
    fn panel_argument_errors() {
        assert!(panel_weights(1.0, 1.0).is_err());
        assert!(panel_weights(-0.1, 1.0).is_err());
        assert!(composite_weights_on(&[0.0]).is_err());
    }

    #[test]
    fn accumulator_overrun_and_constant_field() {
        let g = Grid::cube(1, 0.0, 1.0, 4).unwrap();
        let one = ComplexField::from_fn(&g, |_| Complex64::new(1.0, 0.0));
        let w = composite_weights_on(&[0.0, 0.5, 1.2]).unwrap();
        let mut acc = OftAccumulator::new(&w, &one);
        for _ in 0..3 {
            acc.accumulate(&one).unwrap();
        }
        assert!(matches!(acc.accumulate(&one), Err(OftError::State(_))));
        let expect = w.sum();
        assert!(acc.partial().values().iter().all(|z| (*z - expect).norm() < 1e-15));
    }

    #[test]
    fn terminal_weight_truncates_rule() {
        let g = Grid::cube(1, 0.0, 1.0, 3).unwrap();
        let one = ComplexField::from_fn(&g, |_| Complex64::new(1.0, 0.0));
        let w = composite_weights_on(&[0.0, 0.5, 1.2, 2.0]).unwrap();
        let mut acc = OftAccumulator::new(&w, &one);
        acc.accumulate(&one).unwrap();
        acc.accumulate(&one).unwrap();
        acc.accumulate_terminal(&one).unwrap();
        let exact = transform_of_one(1.2).unwrap();
        assert!((acc.partial().values()[0] - exact).norm() < 1e-13);
        assert!(acc.accumulate(&one).is_err());
    }
}
