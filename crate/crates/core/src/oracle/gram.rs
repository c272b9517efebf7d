//! Inner products `(φ_m, φ_n) = ∫ conj(φ_m) φ_n` of the (non-orthogonal)
//! Robin eigenfunctions, in closed form.

use num_complex::Complex64;

use super::eigen::EigenBasis;

/// `∫_0^L cos(kx) dx = sin(kL)/k`, with its series near `k = 0`.
fn int_cos(k: Complex64, length: f64) -> Complex64 {
    let z = k * length;
    if z.norm() < 1e-3 {
        let z2 = z * z;
        // 1 - z²/6 + z⁴/120 - z⁶/5040
        length * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0)))
    } else {
        z.sin() / k
    }
}

/// `∫_0^L sin(kx) dx = (1 - cos(kL))/k`, with its series near `k = 0`.
fn int_sin(k: Complex64, length: f64) -> Complex64 {
    let z = k * length;
    if z.norm() < 1e-3 {
        let z2 = z * z;
        // z/2 - z³/24 + z⁵/720 - z⁷/40320
        length * z * (0.5 - z2 / 24.0 * (1.0 - z2 / 30.0 * (1.0 - z2 / 56.0)))
    } else {
        (1.0 - z.cos()) / k
    }
}

/// Closed-form Gram entry (zero-based indices).
///
/// With `φ = a cos λs + b sin λs`, `μ = conj(λ_m)`, `ν = λ_n`, `d = μ - ν`,
/// `s = μ + ν` and `S(k) = ∫cos kx`, `T(k) = ∫sin kx` over `[0, L]`:
///
/// ```text
/// 2 (φ_m, φ_n) = ā_m a_n [S(d) + S(s)] + b̄_m b_n [S(d) - S(s)]
///              + ā_m b_n [T(s) - T(d)] + b̄_m a_n [T(s) + T(d)]
/// ```
///
/// The series branches of `S`, `T` cover `conj(λ_m)² → λ_n²`.
pub fn eigen_inner_product(basis: &EigenBasis, m: usize, n: usize) -> Complex64 {
    let (am, bm) = basis.trig_coefficients(m);
    let (an, bn) = basis.trig_coefficients(n);
    let mu = basis.lambdas()[m].conj();
    let nu = basis.lambdas()[n];
    let l = basis.length();
    let (d, s) = (mu - nu, mu + nu);
    let (sd, ss) = (int_cos(d, l), int_cos(s, l));
    let (td, ts) = (int_sin(d, l), int_sin(s, l));
    0.5 * (am.conj() * an * (sd + ss)
        + bm.conj() * bn * (sd - ss)
        + am.conj() * bn * (ts - td)
        + bm.conj() * an * (ts + td))
}

/// Full `K × K` Gram matrix, row-major, `A[m][n] = (φ_m, φ_n)`.
pub fn gram_matrix(basis: &EigenBasis) -> Vec<Vec<Complex64>> {
    let k = basis.count();
    (0..k)
        .map(|m| (0..k).map(|n| eigen_inner_product(basis, m, n)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::eigen::find_eigenvalues;

    #[test]
    fn reference_entries() {
        let b = find_eigenvalues(10.0, 2.0, 8).unwrap();
        let g00 = eigen_inner_product(&b, 0, 0);
        assert!(
            (g00.re - 0.978_334_239_250_646_3).abs() < 1e-10 && g00.im.abs() < 1e-10,
            "{g00}"
        );
        let g37 = eigen_inner_product(&b, 3, 7);
        assert!(
            (g37 - Complex64::new(0.062_266_062_040_733, -0.151_751_072_976_452)).norm() < 1e-10,
            "{g37}"
        );
    }

    #[test]
    fn hermitian_and_not_orthogonal() {
        let b = find_eigenvalues(10.0, 2.0, 10).unwrap();
        let a = gram_matrix(&b);
        let mut largest_off = 0.0f64;
        for m in 0..10 {
            assert!(a[m][m].re > 0.0);
            for n in 0..10 {
                assert!((a[m][n] - a[n][m].conj()).norm() < 1e-12);
                if m != n {
                    largest_off = largest_off.max(a[m][n].norm());
                }
            }
        }
        assert!(largest_off > 1e-3);
    }

    #[test]
    fn series_branch_is_continuous() {
        for k in [Complex64::new(2e-4, 1e-4), Complex64::new(0.0, 4.9e-4)] {
            for l in [1.0, 2.0] {
                let z = k * l;
                let direct_c = z.sin() / k;
                let direct_s = (1.0 - z.cos()) / k;
                assert!((int_cos(k, l) - direct_c).norm() < 1e-12);
                assert!((int_sin(k, l) - direct_s).norm() < 1e-10);
            }
        }
    }
}
