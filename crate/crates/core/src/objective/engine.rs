//! Total time derivatives of objective partials along an output trajectory.
//!
//! Write `T_{a,b}(t) = ∂^a_y ∂^b_t f0(y(t), t)`, a symmetric tensor of order
//! `a`. One time derivative gives, by the chain rule,
//!
//! ```text
//! d/dt T_{a,b} = T_{a+1,b}[ẏ] + T_{a,b+1}
//! ```
//!
//! where `T[v]` contracts one index with `v`. Applying Leibniz's rule to the
//! contraction yields the binomial recursion
//!
//! ```text
//! D^k T_{a,b} = Σ_{m=0}^{k−1} C(k−1, m) (D^m T_{a+1,b})[y^(k−m)] + D^{k−1} T_{a,b+1}
//! ```
//!
//! For `(a, b) = (1, 0)` this is the gradient formula
//! `∇_y^(k) f0 = Σ C(k−1,m) ∇_yy^(m) f0 · y^(k−m) + ∇_yt^(k−1) f0`,
//! with the Hessian and mixed-partial derivatives expanded by the same rule.
//! `D^k T_{a,b}` needs partials up to total order `a + b + k` and output
//! derivatives up to `y^(k)`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{DerivativeStack, ObjectivePartials};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Binomial coefficient as a float; arguments stay tiny here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Memoizing evaluator of `D^k T_{a,b}` at one instant.
pub struct TotalDerivatives<'a> {
    partials: &'a ObjectivePartials,
    stack: &'a DerivativeStack,
    cache: HashMap<(usize, usize, usize), Tensor>,
}

impl<'a> TotalDerivatives<'a> {
    pub fn new(partials: &'a ObjectivePartials, stack: &'a DerivativeStack) -> Result<Self> {
        if partials.dim() != stack.dim() {
            return Err(Error::Config(format!(
                "partials over R^{} but derivative stack over R^{}",
                partials.dim(),
                stack.dim()
            )));
        }
        Ok(TotalDerivatives {
            partials,
            stack,
            cache: HashMap::new(),
        })
    }

    /// `D^k T_{a,b}`: the `k`-th total time derivative of `∂^a_y ∂^b_t f0`.
    pub fn tensor(&mut self, a: usize, b: usize, k: usize) -> Result<Tensor> {
        if a + b + k > self.partials.max_order() {
            return Err(Error::Order(format!(
                "D^{k} of ∂^{a}_y ∂^{b}_t f0 needs partials of order {}, only {} available",
                a + b + k,
                self.partials.max_order()
            )));
        }
        if k > 0 && self.stack.order() <= k {
            return Err(Error::Order(format!(
                "D^{k} needs y^({k}), stack holds up to y^({})",
                self.stack.order() - 1
            )));
        }
        self.tensor_unchecked(a, b, k)
    }

    fn tensor_unchecked(&mut self, a: usize, b: usize, k: usize) -> Result<Tensor> {
        if k == 0 {
            return self.partials.tensor(a, b).cloned();
        }
        if let Some(t) = self.cache.get(&(a, b, k)) {
            return Ok(t.clone());
        }
        let mut acc = self.tensor_unchecked(a, b + 1, k - 1)?;
        for m in 0..k {
            let inner = self.tensor_unchecked(a + 1, b, m)?;
            let contracted = inner.contract(self.stack.get(k - m)?);
            acc.add_scaled(&contracted, binomial(k - 1, m));
        }
        self.cache.insert((a, b, k), acc.clone());
        Ok(acc)
    }

    /// `∇_y^(j) f0`, the `j`-th total time derivative of the gradient.
    pub fn gradient(&mut self, j: usize) -> Result<Vec<f64>> {
        Ok(self.tensor(1, 0, j)?.into_vec())
    }

    /// `∇_yy^(j) f0` as a matrix.
    pub fn hessian(&mut self, j: usize) -> Result<DMatrix<f64>> {
        Ok(self.tensor(2, 0, j)?.to_matrix())
    }

    /// `∇_yt^(j) f0`.
    pub fn mixed(&mut self, j: usize) -> Result<Vec<f64>> {
        Ok(self.tensor(1, 1, j)?.into_vec())
    }
}

/// `∇_y^(j) f0(y(t), t)` from partials and the output derivative stack.
///
/// Needs partials up to total order `j + 1` and `y` derivatives up to
/// `y^(j)`; either missing yields [`Error::Order`].
pub fn total_gradient_derivative(
    partials: &ObjectivePartials,
    stack: &DerivativeStack,
    j: usize,
) -> Result<Vec<f64>> {
    TotalDerivatives::new(partials, stack)?.gradient(j)
}
