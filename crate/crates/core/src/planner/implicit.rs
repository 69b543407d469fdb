use nalgebra::DVector;

use super::GainProfile;
use crate::error::{Error, Result};
use crate::objective::engine::binomial;
use crate::objective::{DerivativeStack, ObjectivePartials, TotalDerivatives};

/// `y_imp^(k)` together with the gradient stack it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitDerivative {
    pub y_imp: Vec<f64>,
    /// `[∇_y f0, ∇̇_y f0, …, ∇_y^(k−1) f0]`.
    pub gradient_stack: Vec<Vec<f64>>,
}

/// Solves for the `k`-th output derivative that makes the gradient stack
/// obey `ż = H z`:
///
/// ```text
/// ∇_yy f0 · y^(k) = Σ_i a_i ∇_y^(i) f0 − Σ_{m=1}^{k−1} C(k−1, m) ∇_yy^(m) f0 · y^(k−m) − ∇_yt^(k−1) f0
/// ```
///
/// The Hessian is factored by Cholesky; a failed factorization means the
/// objective is not strongly convex at this point.
pub fn implicit_derivative(
    partials: &ObjectivePartials,
    stack: &DerivativeStack,
    gains: &GainProfile,
) -> Result<ImplicitDerivative> {
    let k = gains.order;
    if stack.order() != k {
        return Err(Error::Config(format!(
            "gains of order {k} applied to a derivative stack of order {}",
            stack.order()
        )));
    }
    if stack.dim() != gains.output_dim {
        return Err(Error::Config(format!(
            "gains for R^{} applied to outputs in R^{}",
            gains.output_dim,
            stack.dim()
        )));
    }
    let mut engine = TotalDerivatives::new(partials, stack)?;
    let m = stack.dim();

    let mut gradient_stack = Vec::with_capacity(k);
    let mut rhs = DVector::zeros(m);
    for (i, a) in gains.coefficients.iter().enumerate() {
        let g = engine.gradient(i)?;
        rhs.axpy(*a, &DVector::from_column_slice(&g), 1.0);
        gradient_stack.push(g);
    }
    for j in 1..k {
        let hj = engine.hessian(j)?;
        let y = DVector::from_column_slice(stack.get(k - j)?);
        rhs -= (hj * y) * binomial(k - 1, j);
    }
    rhs -= DVector::from_column_slice(&engine.mixed(k - 1)?);

    let hessian = partials.hessian()?.to_matrix();
    let chol = hessian.cholesky().ok_or_else(|| {
        Error::Solve(format!(
            "Hessian not positive definite at t = {}",
            partials.t()
        ))
    })?;
    let y_imp = chol.solve(&rhs);
    if y_imp.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solve(format!(
            "non-finite y_imp at t = {}",
            partials.t()
        )));
    }
    Ok(ImplicitDerivative {
        y_imp: y_imp.as_slice().to_vec(),
        gradient_stack,
    })
}

/// `y_imp^(k)` alone.
pub fn compute_y_imp(
    partials: &ObjectivePartials,
    stack: &DerivativeStack,
    gains: &GainProfile,
) -> Result<Vec<f64>> {
    implicit_derivative(partials, stack, gains).map(|r| r.y_imp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{Objective, QuadraticTracking, Scaled};
    use crate::path::{HarmonicPath, Path};
    use crate::planner::design_gains;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn poles(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&r| Complex64::new(r, 0.0)).collect()
    }

    #[test]
    fn second_order_quadratic_is_pd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let target = Arc::new(HarmonicPath::random(&mut rng, 2, 2, 1.0, 2.0));
        let f = QuadraticTracking::new(target.clone());
        let gains = design_gains(&poles(&[-2.0, -3.0]), 2).unwrap();
        let (y, yd, t) = ([0.3, -0.7], [1.1, 0.4], 0.8);
        let stack = DerivativeStack::new(vec![y.to_vec(), yd.to_vec()]).unwrap();
        let p = f.partials_up_to(&y, t, 3).unwrap();
        let got = compute_y_imp(&p, &stack, &gains).unwrap();
        let (r, rd, rdd) = (
            target.position(t),
            target.derivative(t, 1),
            target.derivative(t, 2),
        );
        for i in 0..2 {
            let want = rdd[i] - 6.0 * (y[i] - r[i]) - 5.0 * (yd[i] - rd[i]);
            assert!((got[i] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn first_order_is_prediction_plus_correction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let target = Arc::new(HarmonicPath::random(&mut rng, 3, 2, 1.0, 2.0));
        let f = QuadraticTracking::new(target.clone());
        let gains = design_gains(&poles(&[-2.5]), 3).unwrap();
        let y = [1.0, 2.0, -1.0];
        let stack = DerivativeStack::new(vec![y.to_vec()]).unwrap();
        let got = compute_y_imp(&f.partials_up_to(&y, 0.1, 2).unwrap(), &stack, &gains).unwrap();
        let (r, rd) = (target.position(0.1), target.derivative(0.1, 1));
        for i in 0..3 {
            assert!((got[i] - (rd[i] - 2.5 * (y[i] - r[i]))).abs() < 1e-12);
        }
    }

    #[test]
    fn on_the_optimum_only_feedforward_remains() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let target = Arc::new(HarmonicPath::random(&mut rng, 2, 3, 1.0, 2.0));
        let f = QuadraticTracking::new(target.clone());
        let gains = design_gains(&poles(&[-2.0, -3.0]), 2).unwrap();
        let t = 1.7;
        let stack = DerivativeStack::from_path(target.as_ref(), t, 2).unwrap();
        let p = f.partials_up_to(stack.y(), t, 3).unwrap();
        let r = implicit_derivative(&p, &stack, &gains).unwrap();
        assert_eq!(r.y_imp, target.derivative(t, 2));
        assert!(r.gradient_stack.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn scaling_the_objective_leaves_y_imp_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let target: Arc<dyn Path> = Arc::new(HarmonicPath::random(&mut rng, 2, 2, 1.0, 2.0));
        let gains = design_gains(&poles(&[-2.0, -3.0]), 2).unwrap();
        let stack = DerivativeStack::new(vec![vec![0.2, 0.1], vec![-1.0, 0.5]]).unwrap();
        let base = QuadraticTracking::new(target.clone());
        let scaled = Scaled::new(QuadraticTracking::new(target), 4.0).unwrap();
        let a = compute_y_imp(
            &base.partials_up_to(&[0.2, 0.1], 0.5, 3).unwrap(),
            &stack,
            &gains,
        )
        .unwrap();
        let b = compute_y_imp(
            &scaled.partials_up_to(&[0.2, 0.1], 0.5, 3).unwrap(),
            &stack,
            &gains,
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn order_mismatch_and_missing_partials() {
        let f = QuadraticTracking::new(Arc::new(crate::path::Constant(vec![0.0, 0.0])));
        let gains = design_gains(&poles(&[-2.0, -3.0]), 2).unwrap();
        let short = DerivativeStack::new(vec![vec![1.0, 0.0]]).unwrap();
        let p = f.partials_up_to(&[1.0, 0.0], 0.0, 3).unwrap();
        assert!(matches!(
            compute_y_imp(&p, &short, &gains),
            Err(Error::Config(_))
        ));
        let stack = DerivativeStack::new(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let low = f.partials_up_to(&[1.0, 0.0], 0.0, 2).unwrap();
        assert!(matches!(
            compute_y_imp(&low, &stack, &gains),
            Err(Error::Order(_))
        ));
    }
}
