//! The 1D eigenproblem with Robin (non-reflecting) ends
//!
//! ```text
//! -φ'' = λ² φ on [x_l, x_l + L],   φ ∓ (i/α) φ' = 0 at the two ends
//! ```
//!
//! Nontrivial solutions exist where
//! `f(λ) = (α² + λ²) sin(Lλ) + 2iαλ cos(Lλ)` vanishes, with eigenfunctions
//! `φ(x) = C [cos λ(x - x_l) - i(α/λ) sin λ(x - x_l)]`,
//! `C = (1 + α²/|λ|²)^{-1/2}`.

use num_complex::Complex64;

use crate::error::{arg_err, OftError, Result};

pub fn characteristic(lambda: Complex64, alpha: f64, length: f64) -> Complex64 {
    let i = Complex64::i();
    let z = lambda * length;
    (alpha * alpha + lambda * lambda) * z.sin() + 2.0 * i * alpha * lambda * z.cos()
}

pub fn characteristic_derivative(lambda: Complex64, alpha: f64, length: f64) -> Complex64 {
    let i = Complex64::i();
    let z = lambda * length;
    let (s, c) = (z.sin(), z.cos());
    2.0 * lambda * s + length * (alpha * alpha + lambda * lambda) * c + 2.0 * i * alpha * c
        - 2.0 * i * alpha * lambda * length * s
}

/// `(sin z, cos z) · e^{-|Im z|}`, bounded for any `z`.
fn scaled_sin_cos(z: Complex64) -> (Complex64, Complex64) {
    let v = z.im.abs();
    let i = Complex64::i();
    let p = Complex64::cis(z.re) * (-z.im - v).exp();
    let m = Complex64::cis(-z.re) * (z.im - v).exp();
    ((p - m) / (2.0 * i), 0.5 * (p + m))
}

/// `f'/f`, evaluated without overflow far from the real axis.
fn log_derivative(lambda: Complex64, alpha: f64, length: f64) -> Complex64 {
    let i = Complex64::i();
    let (s, c) = scaled_sin_cos(lambda * length);
    let a2 = alpha * alpha + lambda * lambda;
    let f = a2 * s + 2.0 * i * alpha * lambda * c;
    let fp = 2.0 * lambda * s + length * a2 * c + 2.0 * i * alpha * c - 2.0 * i * alpha * lambda * length * s;
    fp / f
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    alpha: f64,
    length: f64,
    x_left: f64,
    lambdas: Vec<Complex64>,
    norm_consts: Vec<f64>,
}

impl EigenBasis {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn lambdas(&self) -> &[Complex64] {
        &self.lambdas
    }

    pub fn norm_consts(&self) -> &[f64] {
        &self.norm_consts
    }

    pub fn count(&self) -> usize {
        self.lambdas.len()
    }

    /// Moves the interval to `[x_left, x_left + L]`.
    pub fn on_interval(mut self, x_left: f64) -> Self {
        self.x_left = x_left;
        self
    }

    /// Keeps the first `k` modes.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.count());
        EigenBasis {
            lambdas: self.lambdas[..k].to_vec(),
            norm_consts: self.norm_consts[..k].to_vec(),
            ..self.clone()
        }
    }

    /// `φ_n(x)` with zero-based `n`.
    pub fn phi(&self, n: usize, x: f64) -> Complex64 {
        let lam = self.lambdas[n];
        let s = lam * (x - self.x_left);
        self.norm_consts[n] * (s.cos() - Complex64::i() * (self.alpha / lam) * s.sin())
    }

    /// Coefficients `(a, b)` of `φ_n = a cos λ(x - x_l) + b sin λ(x - x_l)`.
    pub fn trig_coefficients(&self, n: usize) -> (Complex64, Complex64) {
        let c = self.norm_consts[n];
        (
            Complex64::new(c, 0.0),
            -Complex64::i() * c * self.alpha / self.lambdas[n],
        )
    }
}

const NEWTON_MAX_ITERATIONS: usize = 100;

fn newton(seed: Complex64, alpha: f64, length: f64) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let fp = characteristic_derivative(z, alpha, length);
        if fp.norm() == 0.0 || !fp.is_finite() {
            return None;
        }
        let dz = characteristic(z, alpha, length) / fp;
        z -= dz;
        if !z.is_finite() {
            return None;
        }
        if dz.norm() <= 1e-15 * z.norm().max(1.0) {
            // one polishing step
            let fp = characteristic_derivative(z, alpha, length);
            z -= characteristic(z, alpha, length) / fp;
            return Some(z);
        }
    }
    None
}

/// Fixed-point refinement of `L λ = nπ + atan(-2iαλ/(α² + λ²))`, a cheap way
/// to land near the `n`-th root before Newton.
fn arctan_seed(n: usize, alpha: f64, length: f64) -> Complex64 {
    let i = Complex64::i();
    let base = n as f64 * std::f64::consts::PI;
    // low-frequency start: λ ≈ (nπ/L)(1 - 2i/(αL))
    let mut z = Complex64::new(base / length, 0.0) * Complex64::new(1.0, -2.0 / (alpha * length));
    for _ in 0..30 {
        let w = (-2.0 * i * alpha * z / (alpha * alpha + z * z)).atan();
        let next = (base + w) / length;
        if !next.is_finite() {
            break;
        }
        z = next;
    }
    z
}

/// First `k` eigenvalues with positive real part, sorted by real part.
///
/// Roots are collected by Newton from many seeds (asymptotic and a grid in
/// the lower half plane), deduplicated, and the result is certified complete
/// by comparing against the argument-principle count over a rectangle that
/// just contains them.
pub fn find_eigenvalues(alpha: f64, length: f64, k: usize) -> Result<EigenBasis> {
    if !(alpha > 0.0 && alpha.is_finite()) || !(length > 0.0 && length.is_finite()) {
        return arg_err("alpha and L must be positive");
    }
    if k < 1 {
        return arg_err("need at least one eigenvalue");
    }
    let step = std::f64::consts::PI / length;
    let extra = 4 + (alpha * length / std::f64::consts::PI).ceil() as usize;
    let reach = k + extra;
    let mut seeds: Vec<(Option<usize>, Complex64)> =
        (1..=reach).map(|n| (Some(n), arctan_seed(n, alpha, length))).collect();
    for j in 0..2 * reach {
        let re = (j as f64 + 0.5) * 0.5 * step;
        for im_l in [-0.1, -0.4, -1.0, -2.0, -3.0, -5.0] {
            seeds.push((None, Complex64::new(re, im_l / length)));
        }
    }
    let mut roots: Vec<Complex64> = Vec::new();
    let mut first_failure = None;
    for (tag, seed) in seeds {
        match newton(seed, alpha, length) {
            Some(z)
                if z.re > 1e-8 * step
                    && characteristic(z, alpha, length).norm() <= 1e-8 * (alpha * alpha + z.norm_sqr()).max(1.0) =>
            {
                let dup = roots.iter().any(|r| (r - z).norm() <= 1e-7 * z.norm().max(1.0));
                if !dup {
                    roots.push(z);
                }
            }
            Some(_) => {}
            None => {
                if let (Some(n), None) = (tag, first_failure) {
                    first_failure = Some(n);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re));
    if roots.len() < k + 1 {
        return Err(match first_failure {
            Some(n) => OftError::SeedFailure { n },
            None => OftError::Incomplete {
                found: roots.len(),
                expected: k as i64 + 1,
            },
        });
    }
    // Certify: the strip just past root k must contain exactly k roots.
    let x_right = 0.5 * (roots[k - 1].re + roots[k].re);
    let inside = roots.iter().filter(|r| r.re < x_right).count();
    let winding = count_in_box(alpha, length, 1e-3 * step, x_right, 0.5, alpha + 1.0)?;
    if winding != inside as i64 || inside != k {
        return Err(OftError::Incomplete {
            found: inside,
            expected: winding,
        });
    }
    roots.truncate(k);
    let norm_consts = roots
        .iter()
        .map(|l| (1.0 + alpha * alpha / l.norm_sqr()).powf(-0.5))
        .collect();
    Ok(EigenBasis {
        alpha,
        length,
        x_left: -0.5 * length,
        lambdas: roots,
        norm_consts,
    })
}

/// Roots of `f` in `x_lo < Re < x_hi`, `-Y < Im < y_hi`, with `Y` doubled
/// from `y_start` until the count repeats.
fn count_in_box(alpha: f64, length: f64, x_lo: f64, x_hi: f64, y_hi: f64, y_start: f64) -> Result<i64> {
    let mut y = y_start;
    let mut last = None;
    for _ in 0..8 {
        let w = winding_number(alpha, length, [x_lo, x_hi, -y, y_hi])?;
        if last == Some(w) {
            return Ok(w);
        }
        last = Some(w);
        y *= 2.0;
    }
    Err(OftError::ContourNearRoot(
        "winding count did not stabilize as Y grew".into(),
    ))
}

/// Argument-principle count of roots of `f` in the full rectangle
/// `|Re λ| < (n + 1/2)π/L`, `|Im λ| < Y` (`Y` doubled from `y_start` until
/// stable). Includes the root at the origin and both members of each ±λ pair.
pub fn count_roots_in_rectangle(alpha: f64, length: f64, n: usize, y_start: f64) -> Result<i64> {
    if !(alpha > 0.0 && length > 0.0 && y_start > 0.0) {
        return arg_err("alpha, L and Y must be positive");
    }
    let x = (n as f64 + 0.5) * std::f64::consts::PI / length;
    let mut y = y_start;
    let mut last = None;
    for _ in 0..8 {
        let w = winding_number(alpha, length, [-x, x, -y, y])?;
        if last == Some(w) {
            return Ok(w);
        }
        last = Some(w);
        y *= 2.0;
    }
    Err(OftError::ContourNearRoot(
        "winding count did not stabilize as Y grew".into(),
    ))
}

/// Winding number of `f` around `[x0, x1] × [y0, y1]`. Retries with the
/// contour nudged outward if the integral is not close to an integer.
pub fn winding_number(alpha: f64, length: f64, rect: [f64; 4]) -> Result<i64> {
    let width = (rect[1] - rect[0]).max(rect[3] - rect[2]);
    for attempt in 0..3 {
        let nudge = attempt as f64 * 1e-3 * width;
        let r = [rect[0] - nudge, rect[1] + nudge, rect[2] - nudge, rect[3] + nudge];
        let corners = [
            Complex64::new(r[0], r[2]),
            Complex64::new(r[1], r[2]),
            Complex64::new(r[1], r[3]),
            Complex64::new(r[0], r[3]),
        ];
        let g = |z: Complex64| log_derivative(z, alpha, length);
        let mut total = Complex64::new(0.0, 0.0);
        let mut ok = true;
        for e in 0..4 {
            match integrate_graded(
                &g,
                corners[e],
                corners[(e + 1) % 4],
                0.25 * std::f64::consts::PI / length,
            ) {
                Some(v) => total += v,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let w = total / (2.0 * std::f64::consts::PI * Complex64::i());
        if w.im.abs() <= 1e-6 && (w.re - w.re.round()).abs() <= 1e-6 {
            return Ok(w.re.round() as i64);
        }
    }
    Err(OftError::ContourNearRoot(format!("rectangle {rect:?}")))
}

/// 10-point Gauss-Legendre nodes/weights on [-1, 1].
const GL10: [(f64, f64); 5] = [
    (0.148_874_338_981_631_2, 0.295_524_224_714_752_9),
    (0.433_395_394_129_247_2, 0.269_266_719_309_996_4),
    (0.679_409_568_299_024_4, 0.219_086_362_515_982_0),
    (0.865_063_366_688_984_5, 0.149_451_349_150_580_6),
    (0.973_906_528_517_171_7, 0.066_671_344_308_688_1),
];

fn gl10<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64) -> Complex64 {
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    for (x, w) in GL10 {
        s += w * (f(m + h * x) + f(m - h * x));
    }
    s * h
}

/// Integrates along a segment cut into pieces no longer than `h0` plus half
/// their distance from the real axis, so long contour edges cannot step over
/// narrow features near the roots.
fn integrate_graded<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64, h0: f64) -> Option<Complex64> {
    let len = (b - a).norm();
    let dir = (b - a) / len;
    let mut s = 0.0;
    let mut total = Complex64::new(0.0, 0.0);
    while s < len {
        let p = a + dir * s;
        let next = (s + h0 + 0.5 * p.im.abs()).min(len);
        total += integrate_segment(f, p, a + dir * next, 1e-10)?;
        s = next;
    }
    Some(total)
}

/// Adaptive bisection of a straight segment. `None` when the integrand
/// blows up (a root sits on or next to the segment).
pub(crate) fn integrate_segment<F: Fn(Complex64) -> Complex64>(
    f: &F,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Option<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, gl10(f, a, b), 0u32)];
    let full = (b - a).norm();
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let l = gl10(f, lo, mid);
        let r = gl10(f, mid, hi);
        if !(l.is_finite() && r.is_finite()) {
            return None;
        }
        let frac = (hi - lo).norm() / full;
        if (l + r - whole).norm() <= tol * frac.max(1e-6) * (l + r).norm().max(1.0) {
            total += l + r;
        } else if depth > 48 || (hi - lo).norm() < 1e-8 * full.max(1.0) {
            return None;
        } else {
            stack.push((lo, mid, l, depth + 1));
            stack.push((mid, hi, r, depth + 1));
        }
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_root_matches_reference() {
        let b = find_eigenvalues(10.0, 2.0, 12).unwrap();
        let want = [
            (1.554739, -0.156705),
            (3.106103, -0.32083),
            (4.648546, -0.501593),
            (6.169294, -0.712025),
            (7.632836, -0.966257),
            (8.957827, -1.232733),
            (10.129043, -1.34991),
            (11.33868, -1.231885),
            (12.724169, -1.027868),
            (14.220278, -0.863705),
            (15.757852, -0.745144),
        ];
        for (l, (re, im)) in b.lambdas().iter().zip(want) {
            assert!((l.re - re).abs() < 2e-6 && (l.im - im).abs() < 2e-6, "{l}");
        }
    }

    #[test]
    fn eigenfunction_satisfies_boundary_conditions() {
        let b = find_eigenvalues(10.0, 2.0, 5).unwrap().on_interval(-1.0);
        let h = 1e-5;
        for n in 0..5 {
            let d_left = (b.phi(n, -1.0 + h) - b.phi(n, -1.0 - h)) / (2.0 * h);
            let d_right = (b.phi(n, 1.0 + h) - b.phi(n, 1.0 - h)) / (2.0 * h);
            // u + (i/α) ∂u/∂n with outward normals -x and +x
            let left = b.phi(n, -1.0) - Complex64::i() / 10.0 * d_left;
            let right = b.phi(n, 1.0) + Complex64::i() / 10.0 * d_right;
            assert!(left.norm() < 1e-8 && right.norm() < 1e-8, "{n}: {left} {right}");
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let z = Complex64::new(2.3, -0.4);
        let h = 1e-6;
        let fd = (characteristic(z + h, 3.0, 1.5) - characteristic(z - h, 3.0, 1.5)) / (2.0 * h);
        assert!((fd - characteristic_derivative(z, 3.0, 1.5)).norm() < 1e-6);
    }

    #[test]
    fn large_alpha_tends_to_dirichlet() {
        let b = find_eigenvalues(1e4, 2.0, 3).unwrap();
        for (n, l) in b.lambdas().iter().enumerate() {
            let d = (n + 1) as f64 * std::f64::consts::PI / 2.0;
            assert!((l.re - d).abs() < 1e-3 && l.im < 0.0 && l.im > -1e-3, "{l}");
        }
    }

    #[test]
    fn invalid_arguments() {
        assert!(find_eigenvalues(0.0, 2.0, 3).is_err());
        assert!(find_eigenvalues(1.0, 2.0, 0).is_err());
        assert!(count_roots_in_rectangle(1.0, -2.0, 3, 1.0).is_err());
    }
}
