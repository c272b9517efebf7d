//! Uniform tensor-product grids, complex fields on them, and the finite
//! difference stencils shared by the paraxial solver and the residual metric.
//!
//! Storage order is axis 1 fastest, then axis 2, then axis 3.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{arg_err, OftError, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    lower: [f64; MAX_DIM],
    upper: [f64; MAX_DIM],
    n: [usize; MAX_DIM],
}

impl Grid {
    pub fn new(lower: &[f64], upper: &[f64], n: &[usize]) -> Result<Self> {
        let dim = n.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return arg_err(format!("grid dimension must be 1, 2 or 3, got {dim}"));
        }
        if lower.len() != dim || upper.len() != dim {
            return arg_err("lower/upper/n must have the same length");
        }
        let mut g = Grid {
            dim,
            lower: [0.0; MAX_DIM],
            upper: [0.0; MAX_DIM],
            n: [1; MAX_DIM],
        };
        let mut total: usize = 1;
        for d in 0..dim {
            if n[d] < 3 {
                return arg_err(format!("axis {d} needs at least 3 points, got {}", n[d]));
            }
            if !(lower[d].is_finite() && upper[d].is_finite()) || upper[d] <= lower[d] {
                return arg_err(format!("axis {d} bounds must satisfy lower < upper"));
            }
            total = total
                .checked_mul(n[d])
                .ok_or_else(|| OftError::Argument("grid point count overflows".into()))?;
            g.lower[d] = lower[d];
            g.upper[d] = upper[d];
            g.n[d] = n[d];
        }
        Ok(g)
    }

    /// Same extent and point count along every axis.
    pub fn cube(dim: usize, lower: f64, upper: f64, n: usize) -> Result<Self> {
        Grid::new(&vec![lower; dim], &vec![upper; dim], &vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn shape(&self) -> &[usize] {
        &self.n[..self.dim]
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.lower[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.upper[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.n[axis] - 1) as f64
    }

    pub fn edge_length(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    /// Longest domain edge.
    pub fn max_edge(&self) -> f64 {
        (0..self.dim).map(|d| self.edge_length(d)).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n[..axis].iter().product()
    }

    /// Coordinate of grid index `i` along `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if i + 1 == self.n[axis] {
            self.upper[axis]
        } else {
            self.lower[axis] + i as f64 * self.spacing(axis)
        }
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.n[axis]).map(|i| self.coord(axis, i)).collect()
    }

    pub fn linear_index(&self, multi: &[usize]) -> Result<usize> {
        linear_index(self.shape(), multi)
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut m = [0; MAX_DIM];
        for d in 0..self.dim {
            m[d] = idx % self.n[d];
            idx /= self.n[d];
        }
        m
    }

    /// Physical point for a linear index (unused axes are zero).
    pub fn point(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let mut x = [0.0; MAX_DIM];
        for d in 0..self.dim {
            x[d] = self.coord(d, m[d]);
        }
        x
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.n == other.n && self.lower == other.lower && self.upper == other.upper
    }
}

/// Linear position of `multi` in an array of extents `shape`, axis 1 fastest.
///
/// Exposed on bare shapes as well as on [`Grid`] because the mapping does not
/// care about the three-point minimum a grid imposes.
pub fn linear_index(shape: &[usize], multi: &[usize]) -> Result<usize> {
    if multi.len() != shape.len() {
        return arg_err(format!(
            "multi-index has {} entries, shape has {}",
            multi.len(),
            shape.len()
        ));
    }
    let mut idx = 0;
    for d in (0..shape.len()).rev() {
        if multi[d] >= shape[d] {
            return Err(OftError::Range {
                axis: d,
                index: multi[d],
                extent: shape[d],
            });
        }
        idx = idx * shape[d] + multi[d];
    }
    Ok(idx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: &Grid) -> Self {
        ComplexField {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return arg_err(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            ));
        }
        Ok(ComplexField {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let dim = grid.dim();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(i)[..dim]))
            .collect();
        ComplexField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_norm(&self) -> f64 {
        self.values.par_iter().map(|z| z.norm()).reduce(|| 0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.par_iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, s: Complex64) {
        self.values.par_iter_mut().for_each(|z| *z *= s);
    }

    /// `self += s * other`, elementwise.
    pub fn axpy(&mut self, s: Complex64, other: &ComplexField) -> Result<()> {
        check_grid(&self.grid, &other.grid)?;
        self.values
            .par_iter_mut()
            .zip(other.values.par_iter())
            .for_each(|(a, b)| *a += s * b);
        Ok(())
    }

    pub fn sub(&self, other: &ComplexField) -> Result<ComplexField> {
        check_grid(&self.grid, &other.grid)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexField {
            grid: self.grid.clone(),
            values,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefractionField {
    grid: Grid,
    beta: Vec<f64>,
}

impl RefractionField {
    pub fn uniform(grid: &Grid, beta0: f64) -> Result<Self> {
        RefractionField::from_values(grid, vec![beta0; grid.len()])
    }

    pub fn from_values(grid: &Grid, beta: Vec<f64>) -> Result<Self> {
        if beta.len() != grid.len() {
            return arg_err("refraction field length does not match grid");
        }
        if let Some(i) = beta.iter().position(|b| !(b.is_finite() && *b > 0.0)) {
            return arg_err(format!(
                "refraction coefficient must be positive, got {} at {i}",
                beta[i]
            ));
        }
        Ok(RefractionField {
            grid: grid.clone(),
            beta,
        })
    }

    pub fn from_fn<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let dim = grid.dim();
        let beta = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.point(i)[..dim]))
            .collect();
        RefractionField::from_values(grid, beta)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.beta
    }

    pub fn is_homogeneous(&self) -> bool {
        self.beta.iter().all(|&b| b == 1.0)
    }
}

pub(crate) fn check_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        arg_err("fields live on different grids")
    }
}

/// Which face of an axis a one-sided stencil sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Lower,
    Upper,
}

/// Second-order one-sided first derivative at a boundary node from the three
/// nodes nearest that face (`f0` on the face, `f1`, `f2` inward). Returns the
/// derivative along the positive axis direction.
pub fn one_sided_derivative(face: Face, f0: Complex64, f1: Complex64, f2: Complex64, h: f64) -> Complex64 {
    match face {
        Face::Lower => (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h),
        Face::Upper => (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h),
    }
}

/// Centered second difference along `axis`. Boundary nodes carry the centered
/// value of their inward neighbour.
pub fn second_difference_axis(f: &ComplexField, axis: usize) -> Result<ComplexField> {
    let grid = f.grid();
    if axis >= grid.dim() {
        return arg_err(format!("axis {axis} out of range for dimension {}", grid.dim()));
    }
    let mut out = ComplexField::zeros(grid);
    let inv_h2 = 1.0 / grid.spacing(axis).powi(2);
    let n1 = grid.n(0);
    let src = f.values();
    out.values_mut().par_chunks_mut(n1).enumerate().for_each(|(row, dst)| {
        let base = row * n1;
        for (i, d) in dst.iter_mut().enumerate() {
            *d = axis_second_difference(grid, src, base + i, axis) * inv_h2;
        }
    });
    Ok(out)
}

/// Unscaled `f[j+1] - 2 f[j] + f[j-1]` along `axis`, shifted one node inward
/// at the faces.
#[inline]
fn axis_second_difference(grid: &Grid, v: &[Complex64], idx: usize, axis: usize) -> Complex64 {
    let stride = grid.stride(axis);
    let n = grid.n(axis);
    let i = (idx / stride) % n;
    let centre = if i == 0 {
        idx + stride
    } else if i == n - 1 {
        idx - stride
    } else {
        idx
    };
    v[centre + stride] - 2.0 * v[centre] + v[centre - stride]
}

/// `beta * v + (1/kappa^2) * Laplacian(v)` with the same face closure as
/// [`second_difference_axis`].
pub fn discrete_helmholtz_apply(v: &ComplexField, beta: &RefractionField, kappa: f64) -> Result<ComplexField> {
    check_grid(v.grid(), beta.grid())?;
    if !(kappa > 0.0) {
        return arg_err("kappa must be positive");
    }
    let grid = v.grid();
    let dim = grid.dim();
    let scale: Vec<f64> = (0..dim)
        .map(|d| 1.0 / (kappa * kappa * grid.spacing(d).powi(2)))
        .collect();
    let n1 = grid.n(0);
    let src = v.values();
    let b = beta.values();
    let mut out = ComplexField::zeros(grid);
    out.values_mut().par_chunks_mut(n1).enumerate().for_each(|(row, dst)| {
        let base = row * n1;
        for (i, d) in dst.iter_mut().enumerate() {
            let idx = base + i;
            let mut acc = b[idx] * src[idx];
            for (axis, s) in scale.iter().enumerate() {
                acc += axis_second_difference(grid, src, idx, axis) * *s;
            }
            *d = acc;
        }
    });
    Ok(out)
}
