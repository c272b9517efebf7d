//! Fresnel integrals in the unnormalized convention
//!
//! ```text
//! C(x) = ∫_0^x cos(t^2) dt,   S(x) = ∫_0^x sin(t^2) dt
//! ```
//!
//! Note: most tables (and `scipy.special.fresnel`) use `cos(π t^2 / 2)`.
//! Those values relate to these by `C(x) = √(π/2) · C_n(x √(2/π))`.

use num_complex::Complex64;

use crate::error::{arg_err, Result};

/// Switch from the power series to the continued fraction at this `x`.
pub const CROSSOVER: f64 = 2.0;

/// Limit of both integrals as `x → ∞`, `√(π/8)`.
pub const FRESNEL_LIMIT: f64 = 0.626_657_068_657_750_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

impl FresnelPair {
    /// `C + iS = ∫_0^x e^{it^2} dt`.
    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.c, self.s)
    }
}

pub fn fresnel(x: f64) -> Result<FresnelPair> {
    if x.is_nan() {
        return arg_err("fresnel: NaN argument");
    }
    if x.is_infinite() {
        let l = FRESNEL_LIMIT.copysign(x);
        return Ok(FresnelPair { c: l, s: l });
    }
    let ax = x.abs();
    let p = if ax < CROSSOVER {
        fresnel_series(ax)
    } else {
        fresnel_continued_fraction(ax)
    };
    Ok(if x < 0.0 { FresnelPair { c: -p.c, s: -p.s } } else { p })
}

/// Maclaurin branch. Accurate to roughly 1e-15 for `0 ≤ x ≤ 2.5`.
pub fn fresnel_series(x: f64) -> FresnelPair {
    let x2 = x * x;
    // term_k = (-1)^k x^{2j+1} / j!, with j = 2k for C and j = 2k+1 for S
    let mut c = 0.0;
    let mut s = 0.0;
    let mut term = x;
    let mut j = 0usize;
    loop {
        let tc = term / (2 * j + 1) as f64;
        c += tc;
        term *= x2 / (j + 1) as f64;
        let ts = term / (2 * j + 3) as f64;
        s += ts;
        term *= -x2 / (j + 2) as f64;
        j += 2;
        if tc.abs() < 1e-17 * c.abs().max(1e-300) && ts.abs() < 1e-17 * s.abs().max(1e-300) {
            break;
        }
        if j > 400 {
            break;
        }
    }
    FresnelPair { c, s }
}

/// Continued-fraction branch (modified Lentz) for the complementary
/// integral `∫_x^∞ e^{it^2} dt`. Converges quickly for `x ≳ 1.5`.
pub fn fresnel_continued_fraction(x: f64) -> FresnelPair {
    const TINY: f64 = 1e-300;
    let x2 = x * x;
    let mut b = Complex64::new(1.0, -2.0 * x2);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 0..200 {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    // Normalized-variable result: t = x√(2/π), (t - it) h.
    let t = x * (2.0 / std::f64::consts::PI).sqrt();
    h *= Complex64::new(t, -t);
    let phase = Complex64::new(x2.cos(), x2.sin());
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - phase * h);
    let scale = (0.5 * std::f64::consts::PI).sqrt();
    FresnelPair {
        c: cs.re * scale,
        s: cs.im * scale,
    }
}

/// `∫_0^X e^{iτ} τ^{-1/2} dτ = 2 (C(√X) + i S(√X))`, for `X ≥ 0`.
pub fn half_power_phase_integral(x: f64) -> Result<Complex64> {
    if !(x >= 0.0) {
        return arg_err("half_power_phase_integral: argument must be non-negative");
    }
    Ok(2.0 * fresnel(x.sqrt())?.as_complex())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_limit() {
        assert_eq!(fresnel(0.0).unwrap(), FresnelPair { c: 0.0, s: 0.0 });
        let far = fresnel(1e8).unwrap();
        assert!((far.c - FRESNEL_LIMIT).abs() < 1e-8);
        assert!((far.s - FRESNEL_LIMIT).abs() < 1e-8);
        assert!((FRESNEL_LIMIT - (std::f64::consts::PI / 8.0).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn value_at_one() {
        let p = fresnel(1.0).unwrap();
        assert!((p.c - 0.904_524_237_900_272_1).abs() < 1e-13, "{}", p.c);
        assert!((p.s - 0.310_268_301_723_381_1).abs() < 1e-13, "{}", p.s);
    }

    #[test]
    fn branches_agree_at_crossover() {
        for x in [CROSSOVER - 1e-9, CROSSOVER, CROSSOVER + 0.1, 1.8, 2.3] {
            let a = fresnel_series(x);
            let b = fresnel_continued_fraction(x);
            assert!((a.c - b.c).abs() <= 1e-12, "C at {x}: {} vs {}", a.c, b.c);
            assert!((a.s - b.s).abs() <= 1e-12, "S at {x}: {} vs {}", a.s, b.s);
        }
    }

    #[test]
    fn derivative_is_cos_square() {
        let h = 1e-4;
        for &x in &[0.3, 1.2, 1.99, 2.01, 3.7, 7.5] {
            let dc = (fresnel(x + h).unwrap().c - fresnel(x - h).unwrap().c) / (2.0 * h);
            let ds = (fresnel(x + h).unwrap().s - fresnel(x - h).unwrap().s) / (2.0 * h);
            assert!((dc - (x * x).cos()).abs() < 1e-6, "{x}");
            assert!((ds - (x * x).sin()).abs() < 1e-6, "{x}");
        }
    }

    #[test]
    fn nan_rejected() {
        assert!(fresnel(f64::NAN).is_err());
        assert!(half_power_phase_integral(-1.0).is_err());
    }
}
