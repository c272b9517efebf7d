//! Exact solutions for verification.
//!
//! On a box with Robin ends and `β ≡ 1`, the paraxial semigroup and the
//! operators `A^{-1/2}`, `A^{-1}` are diagonal in the tensor-product
//! eigenbasis of the 1D problem. This module finds that basis, expands data
//! in it and synthesizes the exact fields that the solver tests compare to.

pub mod eigen;
pub mod expansion;
pub mod gram;

pub use eigen::{characteristic, count_roots_in_rectangle, find_eigenvalues, winding_number, EigenBasis};
pub use expansion::{
    exact_paraxial, exact_v1_v2, exact_v1_v2_expansions, expand_1d, expand_function, expand_separable, fejer_first,
    paraxial_expansion, ModalExpansion,
};
pub use gram::{eigen_inner_product, gram_matrix};

/// Late-time rates of `u ~ t^{-d} e^{-(a_d + i b_d) t} h(x, t)`:
///
/// ```text
/// a_d = (4π²/κ³) Σ 1/L_l³,   b_d = (π²/κ²) Σ 1/L_l²
/// ```
pub fn asymptotic_decay(kappa: f64, edge_lengths: &[f64]) -> (f64, f64) {
    let pi2 = std::f64::consts::PI.powi(2);
    let a = 4.0 * pi2 / kappa.powi(3) * edge_lengths.iter().map(|l| l.powi(-3)).sum::<f64>();
    let b = pi2 / kappa.powi(2) * edge_lengths.iter().map(|l| l.powi(-2)).sum::<f64>();
    (a, b)
}

/// Default number of modes per axis, `ceil(3κL/π)`.
pub fn default_mode_count(kappa: f64, length: f64) -> usize {
    (3.0 * kappa * length / std::f64::consts::PI).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_rates() {
        let (a, b) = asymptotic_decay(10.0, &[2.0]);
        assert!((a - 4.934_802_200_544_679e-3).abs() < 1e-15);
        assert!((b - 2.467_401_100_272_339_6e-2).abs() < 1e-15);
        let (a3, _) = asymptotic_decay(10.0, &[2.0; 3]);
        assert!((a3 - 3.0 * a).abs() < 1e-15);
    }
}
