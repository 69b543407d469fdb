use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shift applied to the spectral abscissa to get the certified decay rate.
pub const RATE_EPSILON: f64 = 1e-3;

/// Poles closer than this (relative to their magnitude) count as repeated.
const REPEAT_TOLERANCE: f64 = 1e-12;

/// Hurwitz error dynamics `ż = H z` with `H = companion(a) ⊗ I_m`, and the
/// constants of the bound `‖e^{Ht}‖ ≤ c e^{−αt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainProfile {
    /// Order `k` of the error dynamics.
    pub order: usize,
    /// Output dimension `m`.
    pub output_dim: usize,
    /// Last companion row `a_0 … a_{k−1}`.
    pub coefficients: Vec<f64>,
    pub poles: Vec<Complex64>,
    /// `max Re λ_i`.
    pub spectral_abscissa: f64,
    /// Shift `ε` between the spectral abscissa and the certified rate.
    pub epsilon: f64,
    /// Certified rate `α = −μ − ε`.
    pub alpha: f64,
    /// Transient constant `c ≥ 1`.
    pub bound_c: f64,
}

impl GainProfile {
    /// Proportional gain `k_p = −a_0`.
    pub fn kp(&self) -> f64 {
        -self.coefficients[0]
    }

    /// Derivative gain `k_d = −a_1` (order 2 and above).
    pub fn kd(&self) -> Option<f64> {
        self.coefficients.get(1).map(|a| -a)
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= REPEAT_TOLERANCE * a.norm().max(b.norm()).max(1.0)
}

fn check_poles(poles: &[Complex64]) -> Result<()> {
    if poles.is_empty() {
        return Err(Error::Gain("at least one pole is required".into()));
    }
    if let Some(p) = poles
        .iter()
        .find(|p| !(p.re.is_finite() && p.im.is_finite()))
    {
        return Err(Error::Gain(format!("non-finite pole {p}")));
    }
    if let Some(p) = poles.iter().find(|p| p.re >= 0.0) {
        return Err(Error::Gain(format!(
            "pole {p} is not in the open left half-plane"
        )));
    }
    let mut unmatched: Vec<Complex64> = poles.iter().copied().filter(|p| p.im != 0.0).collect();
    while let Some(p) = unmatched.pop() {
        match unmatched.iter().position(|q| close(*q, p.conj())) {
            Some(i) => {
                unmatched.swap_remove(i);
            }
            None => {
                return Err(Error::Gain(format!("pole {p} has no conjugate partner")));
            }
        }
    }
    Ok(())
}

/// Coefficients `c_0 … c_{k−1}` of the monic `Π (λ − λ_i)`.
fn monic_coefficients(poles: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &p in poles {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * p;
        }
        c = next;
    }
    c.pop();
    c
}

/// The `k × k` companion block with last row `a`.
pub fn companion_block(coefficients: &[f64]) -> DMatrix<f64> {
    let k = coefficients.len();
    DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == k {
            coefficients[j]
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// Columns of a (scaled) Jordan basis for the companion block: for each
/// distinct pole of multiplicity `r`, the chain
/// `v_j = ε^j (C(i, j) λ^{i−j})_i`, `j < r`, scaled by `1 / ‖v_0‖`.
fn jordan_basis(poles: &[Complex64], k: usize, epsilon: f64) -> DMatrix<Complex64> {
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for &p in poles {
        match groups.iter_mut().find(|(q, _)| close(*q, p)) {
            Some(g) => g.1 += 1,
            None => groups.push((p, 1)),
        }
    }
    let mut columns = Vec::with_capacity(k);
    for (lambda, r) in groups {
        let head: DVector<Complex64> = DVector::from_fn(k, |i, _| lambda.powu(i as u32));
        let norm = head.norm();
        for j in 0..r {
            let v = DVector::from_fn(k, |i, _| {
                if i < j {
                    Complex64::new(0.0, 0.0)
                } else {
                    lambda.powu((i - j) as u32) * crate::objective::engine::binomial(i, j)
                }
            });
            columns.push(v * Complex64::new(epsilon.powi(j as i32) / norm, 0.0));
        }
    }
    DMatrix::from_columns(&columns)
}

fn condition_number(t: DMatrix<Complex64>) -> f64 {
    let sv = t.singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

/// Builds the gain profile for the given poles and output dimension.
///
/// `a` comes from expanding `Π (λ − λ_i) = λ^k + c_{k−1} λ^{k−1} + … + c_0`
/// and setting `a_i = −c_i`. The transient constant is the 2-norm condition
/// number of a Jordan basis of the companion block; with distinct poles that
/// is the unit-column Vandermonde eigenvector matrix. The certified rate is
/// always shifted by [`RATE_EPSILON`].
pub fn design_gains(poles: &[Complex64], output_dim: usize) -> Result<GainProfile> {
    if output_dim == 0 {
        return Err(Error::Gain("output dimension must be positive".into()));
    }
    check_poles(poles)?;
    let c = monic_coefficients(poles);
    let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if let Some(z) = c.iter().find(|z| z.im.abs() > 1e-12 * scale) {
        return Err(Error::Gain(format!(
            "characteristic polynomial has complex coefficient {z}"
        )));
    }
    let coefficients: Vec<f64> = c.iter().map(|z| -z.re).collect();
    let k = poles.len();
    let spectral_abscissa = poles.iter().map(|p| p.re).fold(f64::NEG_INFINITY, f64::max);
    let alpha = -spectral_abscissa - RATE_EPSILON;
    if alpha <= 0.0 {
        return Err(Error::Gain(format!(
            "spectral abscissa {spectral_abscissa} leaves no room for the certified shift {RATE_EPSILON}"
        )));
    }
    let bound_c = condition_number(jordan_basis(poles, k, RATE_EPSILON)).max(1.0);
    if !bound_c.is_finite() {
        return Err(Error::Gain("companion block basis is singular".into()));
    }
    Ok(GainProfile {
        order: k,
        output_dim,
        coefficients,
        poles: poles.to_vec(),
        spectral_abscissa,
        epsilon: RATE_EPSILON,
        alpha,
        bound_c,
    })
}

/// `H = companion(a) ⊗ I_m`, of size `km × km`.
pub fn closed_loop_error_matrix(gains: &GainProfile) -> DMatrix<f64> {
    companion_block(&gains.coefficients)
        .kronecker(&DMatrix::identity(gains.output_dim, gains.output_dim))
}

/// Default poles: `{−1}` for order 1, `{−2, −3}` for order 2, and
/// `{−1, −2, …, −k}` beyond.
pub fn default_poles(order: usize) -> Vec<Complex64> {
    match order {
        1 => vec![Complex64::new(-1.0, 0.0)],
        2 => vec![Complex64::new(-2.0, 0.0), Complex64::new(-3.0, 0.0)],
        k => (1..=k).map(|i| Complex64::new(-(i as f64), 0.0)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&r| Complex64::new(r, 0.0)).collect()
    }

    #[test]
    fn pd_gains_from_two_poles() {
        let g = design_gains(&real(&[-2.0, -3.0]), 2).unwrap();
        assert_eq!(g.coefficients, vec![-6.0, -5.0]);
        assert_eq!((g.kp(), g.kd()), (6.0, Some(5.0)));
        assert_eq!(g.spectral_abscissa, -2.0);
        assert!((g.alpha - 1.999).abs() < 1e-15);
        let h = closed_loop_error_matrix(&g);
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
             0.0,  0.0,  1.0,  0.0,
             0.0,  0.0,  0.0,  1.0,
            -6.0,  0.0, -5.0,  0.0,
             0.0, -6.0,  0.0, -5.0,
        ]);
        assert_eq!(h, expected);
    }

    #[test]
    fn bound_constant_is_vandermonde_conditioning() {
        // Unit columns (1, −2)/√5 and (1, −3)/√10; κ₂ computed by hand from
        // the 2×2 singular values.
        let g = design_gains(&real(&[-2.0, -3.0]), 1).unwrap();
        let t = DMatrix::from_row_slice(
            2,
            2,
            &[
                1.0 / 5f64.sqrt(),
                1.0 / 10f64.sqrt(),
                -2.0 / 5f64.sqrt(),
                -3.0 / 10f64.sqrt(),
            ],
        );
        let sv = t.singular_values();
        assert!((g.bound_c - sv.max() / sv.min()).abs() < 1e-9);
        assert!(g.bound_c > 1.0);
    }

    #[test]
    fn first_order_is_gradient_flow() {
        let g = design_gains(&real(&[-1.0]), 3).unwrap();
        assert_eq!(g.coefficients, vec![-1.0]);
        assert_eq!(g.bound_c, 1.0);
        assert!((g.alpha - (1.0 - RATE_EPSILON)).abs() < 1e-15);
        assert_eq!(
            closed_loop_error_matrix(&g),
            -DMatrix::<f64>::identity(3, 3)
        );
    }

    #[test]
    fn third_order_scalar_is_plain_companion() {
        let g = design_gains(&real(&[-1.0, -2.0, -3.0]), 1).unwrap();
        // (λ+1)(λ+2)(λ+3) = λ³ + 6λ² + 11λ + 6
        assert_eq!(g.coefficients, vec![-6.0, -11.0, -6.0]);
        assert_eq!(
            closed_loop_error_matrix(&g),
            companion_block(&[-6.0, -11.0, -6.0])
        );
    }

    #[test]
    fn kronecker_spectrum_repeats_poles() {
        let g = design_gains(&real(&[-2.0, -3.0]), 2).unwrap();
        let mut eig: Vec<f64> = closed_loop_error_matrix(&g)
            .complex_eigenvalues()
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-12);
                z.re
            })
            .collect();
        eig.sort_by(f64::total_cmp);
        for (got, want) in eig.iter().zip([-3.0, -3.0, -2.0, -2.0]) {
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn complex_pair_gives_real_coefficients() {
        let poles = vec![Complex64::new(-1.0, 2.0), Complex64::new(-1.0, -2.0)];
        let g = design_gains(&poles, 1).unwrap();
        // λ² + 2λ + 5
        assert!((g.coefficients[0] + 5.0).abs() < 1e-15);
        assert!((g.coefficients[1] + 2.0).abs() < 1e-15);
        assert_eq!(g.spectral_abscissa, -1.0);
    }

    #[test]
    fn repeated_poles_use_shifted_jordan_bound() {
        let g = design_gains(&real(&[-2.0, -2.0]), 1).unwrap();
        assert_eq!(g.coefficients, vec![-4.0, -4.0]);
        // The ε-scaled chain makes the basis nearly singular.
        assert!(g.bound_c > 1e2 && g.bound_c.is_finite(), "{}", g.bound_c);
    }

    #[test]
    fn invalid_pole_sets() {
        assert!(matches!(
            design_gains(&real(&[0.0]), 1),
            Err(Error::Gain(_))
        ));
        assert!(matches!(
            design_gains(&real(&[1.0]), 1),
            Err(Error::Gain(_))
        ));
        assert!(matches!(
            design_gains(&[Complex64::new(-1.0, 1.0)], 1),
            Err(Error::Gain(_))
        ));
        assert!(matches!(design_gains(&[], 1), Err(Error::Gain(_))));
        assert!(matches!(
            design_gains(&real(&[-0.0005]), 1),
            Err(Error::Gain(_))
        ));
    }
}
