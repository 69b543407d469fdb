//! Objectives with closed-form partial tensors.

use std::sync::Arc;

use super::poly::{tan_squared_derivative_polys, tanh_derivative_polys};
use super::{check_order, check_point, Objective, ObjectivePartials, DEFAULT_PARTIAL_ORDER};
use super::{engine::binomial, MAX_SUPPORTED_PARTIAL_ORDER};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::tensor::Tensor;

fn check_cap(order: usize) -> Result<usize> {
    if !(2..=MAX_SUPPORTED_PARTIAL_ORDER).contains(&order) {
        return Err(Error::Config(format!(
            "partial order cap must lie in 2..={MAX_SUPPORTED_PARTIAL_ORDER}, got {order}"
        )));
    }
    Ok(order)
}

/// Tensors of `½ w(t) ‖y − c(t)‖²` given derivatives of the weight and
/// center up to `order − 1`.
///
/// `∂_t^b ∇_y = Σ_i C(b,i) w^(b−i) (y − c)^(i)` and `∂_t^b ∇_yy = w^(b) I`;
/// higher `y`-partials vanish.
fn isotropic_quadratic(
    partials: &mut ObjectivePartials,
    y: &[f64],
    weight: &[f64],
    center: &[Vec<f64>],
    order: usize,
) {
    let m = y.len();
    let error = |i: usize| -> Vec<f64> {
        if i == 0 {
            y.iter().zip(&center[0]).map(|(a, c)| a - c).collect()
        } else {
            center[i].iter().map(|c| -c).collect()
        }
    };
    for b in 0..order {
        let mut grad = vec![0.0; m];
        for i in 0..=b {
            let coeff = binomial(b, i) * weight[b - i];
            for (g, e) in grad.iter_mut().zip(error(i)) {
                *g += coeff * e;
            }
        }
        partials.insert(1, b, Tensor::vector(&grad));
    }
    for b in 0..order.saturating_sub(1) {
        partials.insert(2, b, Tensor::scaled_identity(m, weight[b]));
    }
    for a in 3..=order {
        for b in 0..=order - a {
            partials.insert(a, b, Tensor::zeros(a, m));
        }
    }
}

fn path_derivatives(path: &dyn Path, t: f64, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|j| path.derivative(t, j)).collect()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `f0(y, t) = ½ ‖y − y_d(t)‖²`; `m_f = 1`.
#[derive(Debug, Clone)]
pub struct QuadraticTracking {
    target: Arc<dyn Path>,
    max_order: usize,
}

impl QuadraticTracking {
    pub fn new(target: Arc<dyn Path>) -> Self {
        QuadraticTracking {
            target,
            max_order: DEFAULT_PARTIAL_ORDER,
        }
    }

    pub fn with_max_order(mut self, order: usize) -> Result<Self> {
        self.max_order = check_cap(order)?;
        Ok(self)
    }

    pub fn target(&self) -> &dyn Path {
        self.target.as_ref()
    }
}

impl Objective for QuadraticTracking {
    fn output_dim(&self) -> usize {
        self.target.dim()
    }

    fn max_partial_order(&self) -> usize {
        self.max_order
    }

    fn strong_convexity(&self) -> f64 {
        1.0
    }

    fn value(&self, y: &[f64], t: f64) -> Result<f64> {
        check_point(self, y, t)?;
        Ok(0.5 * squared_distance(y, &self.target.position(t)))
    }

    fn partials_up_to(&self, y: &[f64], t: f64, order: usize) -> Result<ObjectivePartials> {
        check_point(self, y, t)?;
        check_order(self, order)?;
        let center = path_derivatives(self.target.as_ref(), t, order);
        let mut weight = vec![0.0; order];
        weight[0] = 1.0;
        let value = 0.5 * squared_distance(y, &center[0]);
        let mut p = ObjectivePartials::new(y.to_vec(), t, value, order);
        isotropic_quadratic(&mut p, y, &weight, &center, order);
        Ok(p)
    }
}

/// `f0(y, t) = ½ e^{rate·t} ‖y − c(t)‖²`.
///
/// Strongly convex on any bounded time window; the declared constant is the
/// weight at `t = 0`, so it only certifies `t ≥ 0` when `rate ≥ 0`. Mostly
/// useful for exercising time-varying Hessians.
#[derive(Debug, Clone)]
pub struct ExpWeightedQuadratic {
    rate: f64,
    center: Arc<dyn Path>,
    max_order: usize,
}

impl ExpWeightedQuadratic {
    pub fn new(rate: f64, center: Arc<dyn Path>) -> Self {
        ExpWeightedQuadratic {
            rate,
            center,
            max_order: DEFAULT_PARTIAL_ORDER,
        }
    }

    pub fn with_max_order(mut self, order: usize) -> Result<Self> {
        self.max_order = check_cap(order)?;
        Ok(self)
    }
}

impl Objective for ExpWeightedQuadratic {
    fn output_dim(&self) -> usize {
        self.center.dim()
    }

    fn max_partial_order(&self) -> usize {
        self.max_order
    }

    fn strong_convexity(&self) -> f64 {
        1.0
    }

    fn value(&self, y: &[f64], t: f64) -> Result<f64> {
        check_point(self, y, t)?;
        Ok(0.5 * (self.rate * t).exp() * squared_distance(y, &self.center.position(t)))
    }

    fn partials_up_to(&self, y: &[f64], t: f64, order: usize) -> Result<ObjectivePartials> {
        check_point(self, y, t)?;
        check_order(self, order)?;
        let center = path_derivatives(self.center.as_ref(), t, order);
        let g = (self.rate * t).exp();
        let weight: Vec<f64> = (0..order).map(|j| self.rate.powi(j as i32) * g).collect();
        let value = 0.5 * g * squared_distance(y, &center[0]);
        let mut p = ObjectivePartials::new(y.to_vec(), t, value, order);
        isotropic_quadratic(&mut p, y, &weight, &center, order);
        Ok(p)
    }
}

/// `S(t) = 0.5 − 0.5 tanh((t − a)/b)` and its first `count − 1` derivatives.
pub fn switch_weight(t: f64, center: f64, width: f64, count: usize) -> Vec<f64> {
    let u = (t - center) / width;
    let th = u.tanh();
    let polys = tanh_derivative_polys(count.saturating_sub(1));
    (0..count)
        .map(|n| {
            if n == 0 {
                0.5 - 0.5 * th
            } else {
                -0.5 * polys[n].eval(th) / width.powi(n as i32)
            }
        })
        .collect()
}

/// `f0(y, t) = S(t)‖y − y_1^d(t)‖² + (1 − S(t))‖y − y_2^d(t)‖²`.
///
/// The Hessian is `2I` for every `t`, so `m_f = 2`. The gradient is
/// `2(y − ȳ(t))` with `ȳ = y_2^d + S (y_1^d − y_2^d)`, whose time
/// derivatives follow from Leibniz's rule.
#[derive(Debug, Clone)]
pub struct SwitchingBlend {
    first: Arc<dyn Path>,
    second: Arc<dyn Path>,
    center: f64,
    width: f64,
    max_order: usize,
}

impl SwitchingBlend {
    pub fn new(
        first: Arc<dyn Path>,
        second: Arc<dyn Path>,
        center: f64,
        width: f64,
    ) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::Config(
                "switching targets differ in dimension".into(),
            ));
        }
        if !(width > 0.0) {
            return Err(Error::Config(format!(
                "switch width must be positive, got {width}"
            )));
        }
        Ok(SwitchingBlend {
            first,
            second,
            center,
            width,
            max_order: DEFAULT_PARTIAL_ORDER,
        })
    }

    pub fn with_max_order(mut self, order: usize) -> Result<Self> {
        self.max_order = check_cap(order)?;
        Ok(self)
    }

    pub fn weight(&self, t: f64) -> f64 {
        switch_weight(t, self.center, self.width, 1)[0]
    }

    /// Minimizer `ȳ(t)`, available in closed form for this objective.
    pub fn blended_target(&self, t: f64) -> Vec<f64> {
        let s = self.weight(t);
        let a = self.first.position(t);
        let b = self.second.position(t);
        a.iter().zip(&b).map(|(a, b)| b + s * (a - b)).collect()
    }

    pub fn targets(&self) -> (&dyn Path, &dyn Path) {
        (self.first.as_ref(), self.second.as_ref())
    }
}

impl Objective for SwitchingBlend {
    fn output_dim(&self) -> usize {
        self.first.dim()
    }

    fn max_partial_order(&self) -> usize {
        self.max_order
    }

    fn strong_convexity(&self) -> f64 {
        2.0
    }

    fn value(&self, y: &[f64], t: f64) -> Result<f64> {
        check_point(self, y, t)?;
        let s = self.weight(t);
        Ok(s * squared_distance(y, &self.first.position(t))
            + (1.0 - s) * squared_distance(y, &self.second.position(t)))
    }

    fn partials_up_to(&self, y: &[f64], t: f64, order: usize) -> Result<ObjectivePartials> {
        check_point(self, y, t)?;
        check_order(self, order)?;
        let s = switch_weight(t, self.center, self.width, order);
        let first = path_derivatives(self.first.as_ref(), t, order);
        let second = path_derivatives(self.second.as_ref(), t, order);
        let m = y.len();
        let blended: Vec<Vec<f64>> = (0..order)
            .map(|b| {
                (0..m)
                    .map(|i| {
                        second[b][i]
                            + (0..=b)
                                .map(|j| {
                                    binomial(b, j) * s[j] * (first[b - j][i] - second[b - j][i])
                                })
                                .sum::<f64>()
                    })
                    .collect()
            })
            .collect();
        let value =
            s[0] * squared_distance(y, &first[0]) + (1.0 - s[0]) * squared_distance(y, &second[0]);
        let mut weight = vec![0.0; order];
        weight[0] = 2.0;
        let mut p = ObjectivePartials::new(y.to_vec(), t, value, order);
        isotropic_quadratic(&mut p, y, &weight, &blended, order);
        Ok(p)
    }
}

/// `H(x) = gain · tan(xπ/(2d))²` and its first `count − 1` derivatives.
///
/// Finite on `0 ≤ x < d`; `x ≥ d` is outside the domain.
pub fn barrier_penalty(x: f64, pole: f64, gain: f64, count: usize) -> Result<Vec<f64>> {
    if !(x < pole) || x < 0.0 {
        return Err(Error::Domain(format!(
            "barrier argument {x} outside [0, {pole})"
        )));
    }
    let c = std::f64::consts::PI / (2.0 * pole);
    let tan = (c * x).tan();
    let polys = tan_squared_derivative_polys(count.saturating_sub(1));
    Ok((0..count)
        .map(|n| gain * c.powi(n as i32) * polys[n].eval(tan))
        .collect())
}

/// Pairings of `0..n` into singletons and unordered pairs, as
/// `(singletons, pairs)`.
fn partial_matchings(n: usize) -> Vec<(Vec<usize>, Vec<(usize, usize)>)> {
    fn go(
        rest: &[usize],
        singles: &mut Vec<usize>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<(Vec<usize>, Vec<(usize, usize)>)>,
    ) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push((singles.clone(), pairs.clone()));
            return;
        };
        singles.push(first);
        go(tail, singles, pairs, out);
        singles.pop();
        for (k, &partner) in tail.iter().enumerate() {
            let remaining: Vec<usize> = tail
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &v)| v)
                .collect();
            pairs.push((first, partner));
            go(&remaining, singles, pairs, out);
            pairs.pop();
        }
    }
    let indices: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    go(&indices, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// Two-agent tracking with a distance barrier on the stacked output
/// `y = (y_1, y_2)`:
///
/// `f0 = ‖y_1 − y_1^d‖² + ‖y_2 − y_2^d‖² + H(‖y_1 − y_2‖²)`.
///
/// `H` is convex and nondecreasing on its domain, so the Hessian is at
/// least `2I` wherever the objective is defined. The barrier argument is a
/// quadratic form `x = yᵀQy`, which makes every `y`-partial of `H(x(y))` a
/// sum over pairings of the indices into singletons (`∇x = 2Qy`) and pairs
/// (`∇²x = 2Q`).
#[derive(Debug, Clone)]
pub struct BarrierSum {
    first: Arc<dyn Path>,
    second: Arc<dyn Path>,
    pole: f64,
    gain: f64,
    max_order: usize,
}

impl BarrierSum {
    pub fn new(first: Arc<dyn Path>, second: Arc<dyn Path>, pole: f64, gain: f64) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::Config("barrier targets differ in dimension".into()));
        }
        if !(pole > 0.0) || !(gain >= 0.0) {
            return Err(Error::Config(format!(
                "barrier needs d > 0 and gain ≥ 0, got d = {pole}, gain = {gain}"
            )));
        }
        Ok(BarrierSum {
            first,
            second,
            pole,
            gain,
            max_order: DEFAULT_PARTIAL_ORDER,
        })
    }

    pub fn with_max_order(mut self, order: usize) -> Result<Self> {
        self.max_order = check_cap(order)?;
        Ok(self)
    }

    pub fn agent_dim(&self) -> usize {
        self.first.dim()
    }

    pub fn pole(&self) -> f64 {
        self.pole
    }

    pub fn targets(&self) -> (&dyn Path, &dyn Path) {
        (self.first.as_ref(), self.second.as_ref())
    }

    /// `‖y_1 − y_2‖²` for a stacked output.
    pub fn separation(&self, y: &[f64]) -> f64 {
        let q = self.agent_dim();
        squared_distance(&y[..q], &y[q..])
    }

    /// `∇x` and `∇²x` for `x = ‖y_1 − y_2‖²`.
    fn separation_derivatives(&self, y: &[f64]) -> (Vec<f64>, Tensor) {
        let q = self.agent_dim();
        let m = 2 * q;
        let diff: Vec<f64> = (0..q).map(|i| y[i] - y[q + i]).collect();
        let grad = (0..m)
            .map(|i| {
                if i < q {
                    2.0 * diff[i]
                } else {
                    -2.0 * diff[i - q]
                }
            })
            .collect();
        let hess = Tensor::from_fn(2, m, |ix| {
            let (i, j) = (ix[0], ix[1]);
            if i % q != j % q {
                0.0
            } else if (i < q) == (j < q) {
                2.0
            } else {
                -2.0
            }
        });
        (grad, hess)
    }
}

impl Objective for BarrierSum {
    fn output_dim(&self) -> usize {
        2 * self.first.dim()
    }

    fn max_partial_order(&self) -> usize {
        self.max_order
    }

    fn strong_convexity(&self) -> f64 {
        2.0
    }

    fn value(&self, y: &[f64], t: f64) -> Result<f64> {
        check_point(self, y, t)?;
        let q = self.agent_dim();
        let h = barrier_penalty(self.separation(y), self.pole, self.gain, 1)?[0];
        Ok(squared_distance(&y[..q], &self.first.position(t))
            + squared_distance(&y[q..], &self.second.position(t))
            + h)
    }

    fn partials_up_to(&self, y: &[f64], t: f64, order: usize) -> Result<ObjectivePartials> {
        check_point(self, y, t)?;
        check_order(self, order)?;
        let q = self.agent_dim();
        let m = 2 * q;
        let x = self.separation(y);
        let h = barrier_penalty(x, self.pole, self.gain, order + 1)?;

        let first = path_derivatives(self.first.as_ref(), t, order);
        let second = path_derivatives(self.second.as_ref(), t, order);
        let center: Vec<Vec<f64>> = first
            .iter()
            .zip(&second)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        let value = squared_distance(y, &center[0]) + h[0];
        let mut weight = vec![0.0; order];
        weight[0] = 2.0;
        let mut p = ObjectivePartials::new(y.to_vec(), t, value, order);
        isotropic_quadratic(&mut p, y, &weight, &center, order);

        // The barrier has no explicit time dependence: only b = 0 changes.
        let (gx, hx) = self.separation_derivatives(y);
        for a in 1..=order {
            let matchings = partial_matchings(a);
            let barrier = Tensor::from_fn(a, m, |ix| {
                matchings
                    .iter()
                    .map(|(singles, pairs)| {
                        let blocks = singles.len() + pairs.len();
                        let mut term = h[blocks];
                        for &s in singles {
                            term *= gx[ix[s]];
                        }
                        for &(i, j) in pairs {
                            term *= hx.get(&[ix[i], ix[j]]);
                        }
                        term
                    })
                    .sum()
            });
            let mut total = p.tensor(a, 0)?.clone();
            total.add_scaled(&barrier, 1.0);
            p.insert(a, 0, total);
        }
        Ok(p)
    }
}

/// `κ · f0` for a positive constant `κ`.
#[derive(Debug, Clone)]
pub struct Scaled<O> {
    inner: O,
    kappa: f64,
}

impl<O: Objective> Scaled<O> {
    pub fn new(inner: O, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::Config(format!(
                "scale must be positive, got {kappa}"
            )));
        }
        Ok(Scaled { inner, kappa })
    }
}

impl<O: Objective> Objective for Scaled<O> {
    fn output_dim(&self) -> usize {
        self.inner.output_dim()
    }

    fn max_partial_order(&self) -> usize {
        self.inner.max_partial_order()
    }

    fn strong_convexity(&self) -> f64 {
        self.kappa * self.inner.strong_convexity()
    }

    fn value(&self, y: &[f64], t: f64) -> Result<f64> {
        Ok(self.kappa * self.inner.value(y, t)?)
    }

    fn partials_up_to(&self, y: &[f64], t: f64, order: usize) -> Result<ObjectivePartials> {
        Ok(self.inner.partials_up_to(y, t, order)?.scaled(self.kappa))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::evaluate_partials;
    use crate::path::{Constant, HarmonicPath};
    use nalgebra::SymmetricEigen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn constant(v: &[f64]) -> Arc<dyn Path> {
        Arc::new(Constant(v.to_vec()))
    }

    #[test]
    fn quadratic_tracking_gradient_and_hessian() {
        let f = QuadraticTracking::new(constant(&[0.0, 0.0]));
        let p = evaluate_partials(&f, &[1.0, 0.0], 0.0).unwrap();
        assert_eq!(p.gradient(), &[1.0, 0.0]);
        assert_eq!(p.hessian().unwrap().data(), &[1.0, 0.0, 0.0, 1.0]);
        let at_opt = evaluate_partials(&f, &[0.0, 0.0], 3.0).unwrap();
        assert_eq!(at_opt.gradient(), &[0.0, 0.0]);
    }

    #[test]
    fn scalar_exponential_partials() {
        // f0 = ½ e^t y² at y = 2, t = 0.
        let f = ExpWeightedQuadratic::new(1.0, constant(&[0.0]));
        let p = evaluate_partials(&f, &[2.0], 0.0).unwrap();
        assert_eq!(p.gradient(), &[2.0]);
        assert_eq!(p.hessian().unwrap().data(), &[1.0]);
        assert_eq!(p.mixed().unwrap().data(), &[2.0]);
        assert_eq!(p.value(), 2.0);

        // central differences of the closed form f0 = ½ e^t y²
        let h = 1e-6;
        let grad = |y: f64, t: f64| t.exp() * y;
        let fd_yy = (grad(2.0 + h, 0.0) - grad(2.0 - h, 0.0)) / (2.0 * h);
        let fd_yt = (grad(2.0, h) - grad(2.0, -h)) / (2.0 * h);
        assert!((fd_yy - 1.0).abs() < 1e-8);
        assert!((fd_yt - 2.0).abs() < 1e-8);
    }

    #[test]
    fn switch_weight_is_half_at_center() {
        assert_eq!(switch_weight(10.0, 10.0, 1.5, 1)[0], 0.5);
        let s5 = switch_weight(5.0, 10.0, 1.5, 1)[0];
        let s15 = switch_weight(15.0, 10.0, 1.5, 1)[0];
        // 0.5 + 0.5 tanh(10/3)
        assert!((s5 - 0.998_729).abs() < 1e-6, "{s5}");
        assert!((s15 - 0.001_271).abs() < 1e-6, "{s15}");
        assert!((s5 + s15 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn switch_weight_derivatives_match_differences() {
        let h = 1e-5;
        for &t in &[8.0, 10.3, 12.0] {
            let s = switch_weight(t, 10.0, 1.5, 5);
            let plus = switch_weight(t + h, 10.0, 1.5, 5);
            let minus = switch_weight(t - h, 10.0, 1.5, 5);
            for n in 0..4 {
                let fd = (plus[n] - minus[n]) / (2.0 * h);
                assert!((fd - s[n + 1]).abs() < 1e-7, "t={t} n={n}");
            }
        }
    }

    #[test]
    fn barrier_at_half_pole() {
        let h = barrier_penalty(1.0, 2.0, 1e-8, 1).unwrap();
        assert!((h[0] - 1e-8).abs() < 1e-22);
        assert!(matches!(
            barrier_penalty(2.0, 2.0, 1e-8, 1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            barrier_penalty(3.5, 2.0, 1e-8, 1),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn barrier_objective_raises_domain_error_past_pole() {
        let f = BarrierSum::new(constant(&[0.0, 0.0]), constant(&[1.0, 0.0]), 2.0, 1e-8).unwrap();
        let err = evaluate_partials(&f, &[0.0, 0.0, 1.5, 0.0], 0.0).unwrap_err();
        assert_eq!(err.kind(), "DomainError");
    }

    #[test]
    fn matchings_count_involutions() {
        let counts: Vec<usize> = (1..=5).map(|n| partial_matchings(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 10, 26]);
    }

    #[test]
    fn barrier_partials_match_differences_of_lower_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a: Arc<dyn Path> = Arc::new(HarmonicPath::random(&mut rng, 2, 2, 0.5, 1.5));
        let b: Arc<dyn Path> =
            Arc::new(HarmonicPath::random(&mut rng, 2, 2, 0.5, 1.5).translated(&[0.5, 0.0]));
        let f = BarrierSum::new(a, b, 2.0, 0.3)
            .unwrap()
            .with_max_order(5)
            .unwrap();
        let y = [0.1, -0.2, 0.9, 0.3];
        let t = 0.4;
        let p = evaluate_partials(&f, &y, t).unwrap();
        let h = 1e-6;
        for order in 1..5 {
            let base = p.tensor(order, 0).unwrap();
            let next = p.tensor(order + 1, 0).unwrap();
            for dir in 0..4 {
                let mut yp = y;
                let mut ym = y;
                yp[dir] += h;
                ym[dir] -= h;
                let tp = f.partials_up_to(&yp, t, 5).unwrap();
                let tm = f.partials_up_to(&ym, t, 5).unwrap();
                let dp = tp.tensor(order, 0).unwrap().data();
                let dm = tm.tensor(order, 0).unwrap().data();
                let m4 = 4usize.pow(order as u32);
                for flat in 0..m4 {
                    let fd = (dp[flat] - dm[flat]) / (2.0 * h);
                    let exact = next.data()[flat * 4 + dir];
                    assert!(
                        (fd - exact).abs() < 1e-5 * exact.abs().max(1.0),
                        "order {order} dir {dir}: {fd} vs {exact}"
                    );
                }
                let _ = base;
            }
        }
    }

    #[test]
    fn built_in_tensors_are_symmetric_and_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a: Arc<dyn Path> = Arc::new(HarmonicPath::random(&mut rng, 2, 2, 1.0, 1.0));
        let b: Arc<dyn Path> = Arc::new(HarmonicPath::random(&mut rng, 2, 2, 1.0, 1.0));
        let objectives: Vec<Box<dyn Objective>> = vec![
            Box::new(QuadraticTracking::new(a.clone()).with_max_order(5).unwrap()),
            Box::new(
                SwitchingBlend::new(a.clone(), b.clone(), 1.0, 0.7)
                    .unwrap()
                    .with_max_order(5)
                    .unwrap(),
            ),
            Box::new(
                BarrierSum::new(a, b, 2.0, 0.05)
                    .unwrap()
                    .with_max_order(5)
                    .unwrap(),
            ),
        ];
        for f in &objectives {
            let m = f.output_dim();
            let y: Vec<f64> = (0..m).map(|i| 0.2 * i as f64 - 0.1).collect();
            let p = evaluate_partials(f.as_ref(), &y, 0.3).unwrap();
            for (_, t) in p.tensors() {
                assert!(t.symmetry_defect() <= 1e-12 * t.max_abs().max(1.0));
            }
            let hess = p.hessian().unwrap().to_matrix();
            let min_eig = SymmetricEigen::new(hess).eigenvalues.min();
            assert!(min_eig >= f.strong_convexity() - 1e-9, "{min_eig}");
        }
    }

    #[test]
    fn scaled_objective_scales_everything() {
        let f = QuadraticTracking::new(constant(&[1.0]));
        let g = Scaled::new(f.clone(), 3.0).unwrap();
        let p = evaluate_partials(&g, &[2.0], 0.0).unwrap();
        assert_eq!(p.gradient(), &[3.0]);
        assert_eq!(g.strong_convexity(), 3.0);
        assert!(Scaled::new(f, 0.0).is_err());
    }
}
