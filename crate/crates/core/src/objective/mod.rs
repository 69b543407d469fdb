//! Time-varying objectives `f0(y, t)` and total time derivatives of their
//! gradients along output trajectories.
//!
//! An [`Objective`] hands out closed-form partial-derivative tensors
//! `∂^a_y ∂^b_t f0` at a point. The [`engine`] turns those, together with the
//! output derivatives `y, ẏ, …`, into `d^j/dt^j ∇_y f0(y(t), t)`. The
//! [`oracle`] computes the same quantity by finite differences and exists to
//! check the engine.

mod builtin;
pub mod engine;
pub mod oracle;
mod poly;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub use builtin::{
    barrier_penalty, switch_weight, BarrierSum, ExpWeightedQuadratic, QuadraticTracking, Scaled,
    SwitchingBlend,
};
pub use engine::{total_gradient_derivative, TotalDerivatives};

/// Largest total partial order any built-in objective can be asked for.
/// Dense tensors of order 5 over `R^4` hold 1024 entries.
pub const MAX_SUPPORTED_PARTIAL_ORDER: usize = 5;

/// Partial order built-in objectives provide unless configured otherwise:
/// enough for gradient derivatives up to order 3.
pub const DEFAULT_PARTIAL_ORDER: usize = 4;

/// A smooth time-varying objective, uniformly strongly convex in `y`.
pub trait Objective: Send + Sync + std::fmt::Debug {
    /// Dimension `m` of the decision variable (the plant output).
    fn output_dim(&self) -> usize;

    /// Largest `a + b` for which `∂^a_y ∂^b_t f0` is available.
    fn max_partial_order(&self) -> usize;

    /// Declared strong convexity constant `m_f`.
    fn strong_convexity(&self) -> f64;

    fn value(&self, y: &[f64], t: f64) -> Result<f64>;

    /// All tensors with `a ≥ 1` and `a + b ≤ order`, plus the value.
    fn partials_up_to(&self, y: &[f64], t: f64, order: usize) -> Result<ObjectivePartials>;

    fn gradient(&self, y: &[f64], t: f64) -> Result<Vec<f64>> {
        Ok(self.partials_up_to(y, t, 1)?.gradient().to_vec())
    }
}

/// Evaluates every available partial tensor at `(y, t)`.
pub fn evaluate_partials(
    objective: &dyn Objective,
    y: &[f64],
    t: f64,
) -> Result<ObjectivePartials> {
    check_point(objective, y, t)?;
    objective.partials_up_to(y, t, objective.max_partial_order())
}

pub(crate) fn check_point(objective: &dyn Objective, y: &[f64], t: f64) -> Result<()> {
    if y.len() != objective.output_dim() {
        return Err(Error::Config(format!(
            "objective expects y in R^{}, got {} entries",
            objective.output_dim(),
            y.len()
        )));
    }
    if !t.is_finite() || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "objective queried at y = {y:?}, t = {t}"
        )));
    }
    Ok(())
}

pub(crate) fn check_order(objective: &dyn Objective, order: usize) -> Result<()> {
    if order > objective.max_partial_order() {
        return Err(Error::Order(format!(
            "partial order {order} requested, objective provides up to {}",
            objective.max_partial_order()
        )));
    }
    Ok(())
}

/// Partial derivatives of `f0` evaluated at a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectivePartials {
    y: Vec<f64>,
    t: f64,
    value: f64,
    max_order: usize,
    tensors: BTreeMap<(usize, usize), Tensor>,
}

impl ObjectivePartials {
    pub fn new(y: Vec<f64>, t: f64, value: f64, max_order: usize) -> Self {
        ObjectivePartials {
            y,
            t,
            value,
            max_order,
            tensors: BTreeMap::new(),
        }
    }

    /// Stores `∂^a_y ∂^b_t f0`. The tensor must have order `a`.
    pub fn insert(&mut self, a: usize, b: usize, tensor: Tensor) {
        assert!(
            a >= 1 && a + b <= self.max_order,
            "({a},{b}) outside order {}",
            self.max_order
        );
        assert_eq!(tensor.order(), a);
        self.tensors.insert((a, b), tensor);
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    /// `∂^a_y ∂^b_t f0`.
    pub fn tensor(&self, a: usize, b: usize) -> Result<&Tensor> {
        self.tensors.get(&(a, b)).ok_or_else(|| {
            Error::Order(format!(
                "partial ∂^{a}_y ∂^{b}_t f0 not available (max order {})",
                self.max_order
            ))
        })
    }

    pub fn tensors(&self) -> impl Iterator<Item = (&(usize, usize), &Tensor)> {
        self.tensors.iter()
    }

    pub fn gradient(&self) -> &[f64] {
        self.tensors[&(1, 0)].data()
    }

    pub fn hessian(&self) -> Result<&Tensor> {
        self.tensor(2, 0)
    }

    pub fn mixed(&self) -> Result<&Tensor> {
        self.tensor(1, 1)
    }

    /// Multiplies the value and every tensor by `kappa`.
    pub fn scaled(mut self, kappa: f64) -> Self {
        self.value *= kappa;
        for t in self.tensors.values_mut() {
            t.scale(kappa);
        }
        self
    }
}

/// The output and its time derivatives `[y, ẏ, …, y^(k−1)]` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeStack {
    derivs: Vec<Vec<f64>>,
}

impl DerivativeStack {
    pub fn new(derivs: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = derivs.first() else {
            return Err(Error::Order("derivative stack must hold at least y".into()));
        };
        let m = first.len();
        if derivs.iter().any(|d| d.len() != m) {
            return Err(Error::Config(
                "derivative stack entries differ in dimension".into(),
            ));
        }
        if derivs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("derivative stack".into()));
        }
        Ok(DerivativeStack { derivs })
    }

    /// Samples `path` and its first `order − 1` derivatives at `t`.
    pub fn from_path(path: &dyn crate::path::Path, t: f64, order: usize) -> Result<Self> {
        DerivativeStack::new((0..order).map(|j| path.derivative(t, j)).collect())
    }

    pub fn order(&self) -> usize {
        self.derivs.len()
    }

    pub fn dim(&self) -> usize {
        self.derivs[0].len()
    }

    pub fn y(&self) -> &[f64] {
        &self.derivs[0]
    }

    /// `y^(j)`.
    pub fn get(&self, j: usize) -> Result<&[f64]> {
        self.derivs.get(j).map(Vec::as_slice).ok_or_else(|| {
            Error::Order(format!(
                "y^({j}) requested, stack holds derivatives up to y^({})",
                self.derivs.len() - 1
            ))
        })
    }

    pub fn as_slices(&self) -> &[Vec<f64>] {
        &self.derivs
    }

    /// Appends `y^(k)`, e.g. to check a formula that needs one more
    /// derivative than the plant state provides.
    pub fn with_next(mut self, next: Vec<f64>) -> Result<Self> {
        self.derivs.push(next);
        DerivativeStack::new(self.derivs)
    }
}
