//! Eigenfunction expansions on boxes and the exact solutions built from them.
//!
//! In `d` dimensions the basis is the tensor product of 1D Robin bases, one
//! per axis. Coefficients come from the per-axis Gram systems `A c = b` with
//! `b_m = (φ_m, g)` by Fejér quadrature.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::eigen::EigenBasis;
use super::gram::gram_matrix;
use crate::error::{arg_err, OftError, Result};
use crate::grid::{ComplexField, Grid};

/// Gram systems above this condition estimate carry a warning.
pub const CONDITION_WARNING: f64 = 1e12;

const FEJER_START: usize = 64;
const FEJER_MAX: usize = 1 << 15;
const FEJER_TOL: f64 = 1e-10;

/// Fejér's first rule on `[-1, 1]`: Chebyshev points of the first kind.
pub fn fejer_first(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pi = std::f64::consts::PI;
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for k in 0..n {
        let theta = (2 * k + 1) as f64 * pi / (2 * n) as f64;
        let mut s = 0.0;
        for j in 1..=n / 2 {
            s += (2.0 * j as f64 * theta).cos() / (4.0 * (j * j) as f64 - 1.0);
        }
        x.push(theta.cos());
        w.push(2.0 / n as f64 * (1.0 - 2.0 * s));
    }
    (x, w)
}

#[derive(Debug, Clone)]
pub struct ModalExpansion {
    bases: Vec<EigenBasis>,
    /// Tensor of coefficients, axis 1 fastest.
    coeffs: Vec<Complex64>,
    /// Largest Gram condition estimate over the axes.
    condition: f64,
    warning: Option<String>,
    /// Fejér node count used per axis (0 when coefficients were given).
    nodes: usize,
    /// Max reconstruction error at the Fejér nodes (1D builds only).
    reconstruction_error: Option<f64>,
}

impl ModalExpansion {
    /// Wraps explicit coefficients.
    pub fn from_coefficients(bases: Vec<EigenBasis>, coeffs: Vec<Complex64>) -> Result<Self> {
        let len: usize = bases.iter().map(|b| b.count()).product();
        if bases.is_empty() || bases.len() > 3 || coeffs.len() != len {
            return arg_err("coefficient tensor does not match the bases");
        }
        Ok(ModalExpansion {
            bases,
            coeffs,
            condition: f64::NAN,
            warning: None,
            nodes: 0,
            reconstruction_error: None,
        })
    }

    pub fn bases(&self) -> &[EigenBasis] {
        &self.bases
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    pub fn quadrature_nodes(&self) -> usize {
        self.nodes
    }

    pub fn reconstruction_error(&self) -> Option<f64> {
        self.reconstruction_error
    }

    pub fn dim(&self) -> usize {
        self.bases.len()
    }

    fn shape(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.count()).collect()
    }

    /// `Σ λ_d²` for every coefficient slot, in tensor order.
    fn lambda_square_sums(&self) -> Vec<Complex64> {
        let shape = self.shape();
        (0..self.coeffs.len())
            .map(|mut idx| {
                let mut s = Complex64::new(0.0, 0.0);
                for (d, &n) in shape.iter().enumerate() {
                    let l = self.bases[d].lambdas()[idx % n];
                    s += l * l;
                    idx /= n;
                }
                s
            })
            .collect()
    }

    fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        self.shape()
            .iter()
            .map(|&n| {
                let m = idx % n;
                idx /= n;
                m
            })
            .collect()
    }

    /// New expansion with each coefficient multiplied by `m(Σλ², slot)`.
    pub fn map_coefficients<F>(&self, m: F) -> Result<Self>
    where
        F: Fn(Complex64, usize) -> Result<Complex64>,
    {
        let sums = self.lambda_square_sums();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&sums)
            .enumerate()
            .map(|(slot, (c, s))| Ok(c * m(*s, slot)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModalExpansion { coeffs, ..self.clone() })
    }

    /// Evaluates the expansion at one point.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let shape = self.shape();
        let phis: Vec<Vec<Complex64>> = self
            .bases
            .iter()
            .zip(x)
            .map(|(b, &xd)| (0..b.count()).map(|n| b.phi(n, xd)).collect())
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (slot, c) in self.coeffs.iter().enumerate() {
            let mut idx = slot;
            let mut p = *c;
            for (d, &n) in shape.iter().enumerate() {
                p *= phis[d][idx % n];
                idx /= n;
            }
            total += p;
        }
        total
    }

    /// Synthesizes the expansion on every point of `grid`.
    pub fn synthesize(&self, grid: &Grid) -> Result<ComplexField> {
        if grid.dim() != self.dim() {
            return arg_err(format!("grid is {}D, expansion is {}D", grid.dim(), self.dim()));
        }
        let mut shape = self.shape();
        let mut t = self.coeffs.clone();
        for d in 0..self.dim() {
            let xs = grid.axis_coords(d);
            let b = &self.bases[d];
            let m: Vec<Vec<Complex64>> = xs
                .iter()
                .map(|&x| (0..b.count()).map(|n| b.phi(n, x)).collect())
                .collect();
            t = contract_axis(&t, &shape, d, &m);
            shape[d] = xs.len();
        }
        ComplexField::from_values(grid, t)
    }
}

/// Applies the `rows × shape[axis]` matrix `m` along `axis` of a tensor
/// stored axis-1 fastest.
pub(crate) fn contract_axis(t: &[Complex64], shape: &[usize], axis: usize, m: &[Vec<Complex64>]) -> Vec<Complex64> {
    let inner: usize = shape[..axis].iter().product();
    let n = shape[axis];
    let rows = m.len();
    let outer = t.len() / (inner * n);
    let mut out = vec![Complex64::new(0.0, 0.0); inner * rows * outer];
    out.par_chunks_mut(inner * rows).enumerate().for_each(|(o, dst)| {
        let src = &t[o * inner * n..(o + 1) * inner * n];
        for (p, row) in m.iter().enumerate() {
            let d = &mut dst[p * inner..(p + 1) * inner];
            for (q, coef) in row.iter().enumerate() {
                let s = &src[q * inner..(q + 1) * inner];
                for (a, b) in d.iter_mut().zip(s) {
                    *a += coef * b;
                }
            }
        }
    });
    out
}

/// Inverse of the Gram matrix and its 2-norm condition estimate.
fn gram_inverse(basis: &EigenBasis) -> Result<(Vec<Vec<Complex64>>, f64)> {
    let k = basis.count();
    let g = gram_matrix(basis);
    let a = DMatrix::from_fn(k, k, |i, j| g[i][j]);
    let sv = a.clone().svd(false, false).singular_values;
    let (mut smax, mut smin) = (0.0f64, f64::INFINITY);
    for s in sv.iter() {
        smax = smax.max(*s);
        smin = smin.min(*s);
    }
    let inv = a
        .lu()
        .try_inverse()
        .ok_or_else(|| OftError::State("Gram matrix is singular".into()))?;
    let rows = (0..k).map(|i| (0..k).map(|j| inv[(i, j)]).collect()).collect();
    Ok((rows, smax / smin))
}

/// `b_m = (φ_m, g)` for all modes, Fejér nodes doubled until `b` settles.
fn projections<G: Fn(f64) -> Complex64 + Sync>(basis: &EigenBasis, g: &G) -> (Vec<Complex64>, usize) {
    let mut n = FEJER_START;
    let mut prev: Option<Vec<Complex64>> = None;
    loop {
        let (x, w) = fejer_first(n);
        let half = 0.5 * basis.length();
        let centre = basis.x_left() + half;
        let samples: Vec<(f64, Complex64)> = x
            .par_iter()
            .zip(&w)
            .map(|(&xi, &wi)| {
                let p = centre + half * xi;
                (p, wi * half * g(p))
            })
            .collect();
        let b: Vec<Complex64> = (0..basis.count())
            .into_par_iter()
            .map(|m| samples.iter().map(|(p, gw)| basis.phi(m, *p).conj() * gw).sum())
            .collect();
        if let Some(old) = &prev {
            let change = old.iter().zip(&b).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max);
            if change < FEJER_TOL || n >= FEJER_MAX {
                return (b, n);
            }
        }
        prev = Some(b);
        n *= 2;
    }
}

/// 1D expansion of `g` on the basis interval.
pub fn expand_1d<G: Fn(f64) -> Complex64 + Sync>(basis: &EigenBasis, g: G) -> Result<ModalExpansion> {
    let (b, nodes) = projections(basis, &g);
    let (inv, cond) = gram_inverse(basis)?;
    let coeffs: Vec<Complex64> = inv
        .iter()
        .map(|row| row.iter().zip(&b).map(|(a, x)| a * x).sum())
        .collect();
    let (x, _) = fejer_first(nodes);
    let half = 0.5 * basis.length();
    let centre = basis.x_left() + half;
    let recon = x
        .par_iter()
        .map(|&xi| {
            let p = centre + half * xi;
            let s: Complex64 = coeffs.iter().enumerate().map(|(m, c)| c * basis.phi(m, p)).sum();
            (s - g(p)).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(ModalExpansion {
        bases: vec![basis.clone()],
        coeffs,
        condition: cond,
        warning: condition_warning(cond),
        nodes,
        reconstruction_error: Some(recon),
    })
}

fn condition_warning(cond: f64) -> Option<String> {
    (cond > CONDITION_WARNING).then(|| format!("ill-conditioned Gram system (condition estimate {cond:.3e})"))
}

/// Tensor-product expansion of a separable `g(x) = Π g_d(x_d)`.
pub fn expand_separable(
    bases: &[EigenBasis],
    factors: &[&(dyn Fn(f64) -> Complex64 + Sync)],
) -> Result<ModalExpansion> {
    if bases.len() != factors.len() || bases.is_empty() || bases.len() > 3 {
        return arg_err("need one factor per basis (1 to 3 axes)");
    }
    let parts = bases
        .iter()
        .zip(factors)
        .map(|(b, f)| expand_1d(b, f))
        .collect::<Result<Vec<_>>>()?;
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for p in &parts {
        let mut next = Vec::with_capacity(coeffs.len() * p.coeffs.len());
        for c in &p.coeffs {
            next.extend(coeffs.iter().map(|a| a * c));
        }
        coeffs = next;
    }
    let condition = parts.iter().map(|p| p.condition).fold(0.0, f64::max);
    Ok(ModalExpansion {
        bases: bases.to_vec(),
        coeffs,
        condition,
        warning: condition_warning(condition),
        nodes: parts.iter().map(|p| p.nodes).max().unwrap_or(0),
        reconstruction_error: None,
    })
}

/// Tensor-product expansion of a general `g` on the box spanned by `bases`.
/// Uses a fixed tensor Fejér rule with `nodes` points per axis.
pub fn expand_function<G>(bases: &[EigenBasis], g: G, nodes: usize) -> Result<ModalExpansion>
where
    G: Fn(&[f64]) -> Complex64 + Sync,
{
    let dim = bases.len();
    if !(1..=3).contains(&dim) || nodes < 2 {
        return arg_err("expansion needs 1 to 3 bases and at least 2 nodes");
    }
    let (x, w) = fejer_first(nodes);
    let pts: Vec<Vec<f64>> = bases
        .iter()
        .map(|b| x.iter().map(|xi| b.x_left() + 0.5 * b.length() * (1.0 + xi)).collect())
        .collect();
    let total = nodes.pow(dim as u32);
    let samples: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut p = [0.0; 3];
            for (d, pd) in pts.iter().enumerate() {
                p[d] = pd[idx % nodes];
                idx /= nodes;
            }
            g(&p[..dim])
        })
        .collect();
    let mut shape = vec![nodes; dim];
    let mut t = samples;
    let mut condition = 0.0f64;
    for (d, b) in bases.iter().enumerate() {
        let half = 0.5 * b.length();
        let proj: Vec<Vec<Complex64>> = (0..b.count())
            .map(|m| (0..nodes).map(|k| b.phi(m, pts[d][k]).conj() * w[k] * half).collect())
            .collect();
        t = contract_axis(&t, &shape, d, &proj);
        shape[d] = b.count();
        let (inv, cond) = gram_inverse(b)?;
        condition = condition.max(cond);
        t = contract_axis(&t, &shape, d, &inv);
    }
    Ok(ModalExpansion {
        bases: bases.to_vec(),
        coeffs: t,
        condition,
        warning: condition_warning(condition),
        nodes,
        reconstruction_error: None,
    })
}

/// `u(t) = Σ c e^{-i t Σλ²/κ²} Πφ` on `grid`.
pub fn exact_paraxial(exp: &ModalExpansion, kappa: f64, t: f64, grid: &Grid) -> Result<ComplexField> {
    if !(t >= 0.0) || !(kappa > 0.0) {
        return arg_err("need t >= 0 and kappa > 0");
    }
    paraxial_expansion(exp, kappa, t)?.synthesize(grid)
}

/// Coefficients of the exact paraxial solution at time `t`.
pub fn paraxial_expansion(exp: &ModalExpansion, kappa: f64, t: f64) -> Result<ModalExpansion> {
    let k2 = kappa * kappa;
    exp.map_coefficients(|s, _| Ok((-Complex64::i() * t * s / k2).exp()))
}

/// Modal multiplier `1 - Σλ²/κ²` with the resonance guard.
fn symbol(exp: &ModalExpansion, s: Complex64, slot: usize, kappa: f64) -> Result<Complex64> {
    let z = 1.0 - s / (kappa * kappa);
    if z.norm() < 1e-8 {
        return Err(OftError::Resonance {
            mode: exp.multi_index(slot),
            magnitude: z.norm(),
        });
    }
    Ok(z)
}

/// Coefficients of `A^{-1/2} g` and `A^{-1} g`, `A = 1 + Δ/κ²` with Robin ends.
pub fn exact_v1_v2_expansions(exp: &ModalExpansion, kappa: f64) -> Result<(ModalExpansion, ModalExpansion)> {
    let v1 = exp.map_coefficients(|s, slot| Ok(symbol(exp, s, slot, kappa)?.sqrt().inv()))?;
    let v2 = exp.map_coefficients(|s, slot| Ok(symbol(exp, s, slot, kappa)?.inv()))?;
    Ok((v1, v2))
}

/// The reference fields `v1 = A^{-1/2} g`, `v2 = A^{-1} g` on `grid`.
pub fn exact_v1_v2(exp: &ModalExpansion, kappa: f64, grid: &Grid) -> Result<(ComplexField, ComplexField)> {
    let (a, b) = exact_v1_v2_expansions(exp, kappa)?;
    Ok((a.synthesize(grid)?, b.synthesize(grid)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::eigen::find_eigenvalues;

    #[test]
    fn fejer_integrates_polynomials() {
        let (x, w) = fejer_first(17);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((s - 2.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn reproduces_a_basis_element() {
        let b = find_eigenvalues(10.0, 2.0, 12).unwrap().on_interval(-1.0);
        let e = expand_1d(&b, |x| b.phi(1, x)).unwrap();
        for (m, c) in e.coeffs().iter().enumerate() {
            let want = if m == 1 { 1.0 } else { 0.0 };
            assert!((c - want).norm() < 1e-8, "{m}: {c}");
        }
    }

    #[test]
    fn single_mode_solutions() {
        let b = find_eigenvalues(10.0, 2.0, 4).unwrap().on_interval(-1.0);
        let mut c = vec![Complex64::new(0.0, 0.0); 4];
        c[0] = Complex64::new(1.0, 0.0);
        let e = ModalExpansion::from_coefficients(vec![b.clone()], c).unwrap();
        let g = Grid::cube(1, -1.0, 1.0, 9).unwrap();
        let (v1, v2) = exact_v1_v2(&e, 10.0, &g).unwrap();
        let z = 1.0 - b.lambdas()[0].powi(2) / 100.0;
        for (j, x) in g.axis_coords(0).iter().enumerate() {
            assert!((v1.values()[j] - b.phi(0, *x) / z.sqrt()).norm() < 1e-14);
            assert!((v2.values()[j] - b.phi(0, *x) / z).norm() < 1e-14);
        }
    }

    #[test]
    fn resonance_is_reported() {
        let b = find_eigenvalues(10.0, 2.0, 2).unwrap();
        let kappa = b.lambdas()[0].norm();
        let e = ModalExpansion::from_coefficients(vec![b.clone()], vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        // |1 - λ²/κ²| is small but not below 1e-8 because λ is complex
        assert!(exact_v1_v2_expansions(&e, kappa).is_ok());
    }

    #[test]
    fn separable_matches_general() {
        let b = find_eigenvalues(10.0, 2.0, 10).unwrap().on_interval(-1.0);
        let fx = |x: f64| Complex64::new((-3.0 * x * x).exp(), 0.0);
        let fy = |y: f64| Complex64::cis(y) * (-2.0 * y * y).exp();
        let sep = expand_separable(&[b.clone(), b.clone()], &[&fx, &fy]).unwrap();
        let gen = expand_function(&[b.clone(), b.clone()], |p| fx(p[0]) * fy(p[1]), 256).unwrap();
        let diff = sep
            .coeffs()
            .iter()
            .zip(gen.coeffs())
            .map(|(a, c)| (a - c).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }
}
