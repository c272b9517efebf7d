//! Reference implementations used only from tests.
//!
//! Everything here is deliberately naive: brute-force quadrature, dense
//! linear algebra, plain least squares. None of it shares code with the
//! solver crates, so agreement between the two is evidence rather than
//! tautology.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Compensated (Neumaier) sum of complex terms.
#[derive(Default, Clone, Copy)]
pub struct KahanC {
    sum: Complex64,
    comp: Complex64,
}

impl KahanC {
    pub fn add(&mut self, v: Complex64) {
        let two = |s: f64, c: &mut f64, v: f64| {
            let t = s + v;
            if s.abs() >= v.abs() {
                *c += (s - t) + v;
            } else {
                *c += (v - t) + s;
            }
            t
        };
        self.sum.re = two(self.sum.re, &mut self.comp.re, v.re);
        self.sum.im = two(self.sum.im, &mut self.comp.im, v.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn gl_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, x: &[f64], w: &[f64]) -> Complex64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = KahanC::default();
    for (xi, wi) in x.iter().zip(w) {
        acc.add(f(m + h * xi) * (wi * h));
    }
    acc.value()
}

/// Adaptive bisection with a 20-point Gauss-Legendre panel rule.
pub fn integrate_c<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    let (x, w) = gauss_legendre(20);
    let mut total = KahanC::default();
    let mut stack = vec![(a, b, gl_panel(&f, a, b, &x, &w), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl_panel(&f, lo, mid, &x, &w);
        let right = gl_panel(&f, mid, hi, &x, &w);
        let scale = (hi - lo) / (b - a);
        if (left + right - whole).norm() <= tol * scale.max(1e-3) || depth > 60 {
            total.add(left);
            total.add(right);
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    total.value()
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_c(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}

/// Dense LU solve; returns `None` when the matrix is singular.
pub fn dense_solve(a: &[Vec<Complex64>], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = rhs.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let b = DVector::from_column_slice(rhs);
    m.lu().solve(&b).map(|x| x.iter().copied().collect())
}

pub fn mat_vec(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Log-log slope, the usual empirical convergence order.
pub fn fit_order(h: &[f64], err: &[f64]) -> f64 {
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    fit_slope(&lx, &ly)
}

/// Small deterministic generator for test data (SplitMix64).
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }
}
