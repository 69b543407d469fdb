//! Numerical check of hand-coded linearization data.
//!
//! For a composite state `z = (x, ζ)` and an input `w`, the closed-loop
//! vector field is `ż = (f(x) + G(x)(α + βw), γ + δw)`. Differentiating each
//! output-derivative map `Φ_{i,j}(z) = y_i^(j)` along `ż` must give
//! `Φ_{i,j+1}` for `j < r_i − 1` (no input appears early) and
//! `p_i + (R w)_i` for `j = r_i − 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Plant;
use crate::error::{Error, Result};

/// Power of two near `1e-6`, so `z ± h ż` is exact for dyadic data.
const STEP: f64 = 1.0 / 1_048_576.0;

/// Decoupling matrices worse conditioned than this are treated as singular.
const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Samples that were in the regular domain and got checked.
    pub checked: usize,
    /// Indices of samples skipped as singular or ill-conditioned.
    pub singular: Vec<usize>,
    /// Largest residual over all checked samples, channels and orders,
    /// relative to `max(1, |expected|)`.
    pub max_residual: f64,
}

fn directional_derivative(
    plant: &dyn Plant,
    x: &[f64],
    zeta: &[f64],
    dx: &[f64],
    dzeta: &[f64],
) -> Vec<Vec<f64>> {
    let shift = |sign: f64| {
        let xs: Vec<f64> = x.iter().zip(dx).map(|(a, d)| a + sign * STEP * d).collect();
        let zs: Vec<f64> = zeta
            .iter()
            .zip(dzeta)
            .map(|(a, d)| a + sign * STEP * d)
            .collect();
        plant.output_derivatives(&xs, &zs)
    };
    let plus = shift(1.0);
    let minus = shift(-1.0);
    plus.iter()
        .zip(&minus)
        .map(|(p, m)| {
            p.iter()
                .zip(m)
                .map(|(a, b)| (a - b) / (2.0 * STEP))
                .collect()
        })
        .collect()
}

fn sample_residual(plant: &dyn Plant, x: &[f64], zeta: &[f64], w: &[f64]) -> Result<f64> {
    let dec = plant.decoupling(x, zeta)?;
    let u = plant.feedback(x, zeta, w);
    let dx = plant.dynamics(x, &u);
    let dzeta = plant.compensator_rate(x, zeta, w);
    let phi = plant.output_derivatives(x, zeta);
    let dphi = directional_derivative(plant, x, zeta, &dx, &dzeta);
    let rw = &dec.matrix * nalgebra::DVector::from_column_slice(w);
    let degrees = plant.relative_degrees();
    let y = plant.output(x);

    let rel = |got: f64, expected: f64| (got - expected).abs() / expected.abs().max(1.0);
    let mut worst: f64 = 0.0;
    for (i, &r) in degrees.iter().enumerate() {
        worst = worst.max(rel(phi[i][0], y[i]));
        for j in 0..r {
            let expected = if j + 1 < r {
                phi[i][j + 1]
            } else {
                dec.drift[i] + rw[i]
            };
            worst = worst.max(rel(dphi[i][j], expected));
        }
    }
    Ok(worst)
}

/// Checks `y_i^(r_i) = p_i + (R w)_i` and input independence of the lower
/// derivatives at every sample, for a few random inputs `w`.
///
/// Samples where the decoupling fails or `R` is ill-conditioned are skipped
/// and listed in the report. Any checked sample whose residual exceeds
/// `tolerance` fails the whole validation.
pub fn validate_linearization(
    plant: &dyn Plant,
    samples: &[(Vec<f64>, Vec<f64>)],
    tolerance: f64,
    seed: u64,
) -> Result<ValidationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = plant.input_dim();
    let mut report = ValidationReport {
        checked: 0,
        singular: Vec::new(),
        max_residual: 0.0,
    };
    let mut failures = Vec::new();
    for (idx, (x, zeta)) in samples.iter().enumerate() {
        match plant.decoupling(x, zeta) {
            Ok(d) if d.condition_number() <= MAX_CONDITION => {}
            _ => {
                report.singular.push(idx);
                continue;
            }
        }
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            // Dyadic inputs keep `x ± h ẋ` exact for plants linear in `w`.
            let w: Vec<f64> = (0..m)
                .map(|_| f64::from(rng.random_range(-1024..=1024)) / 1024.0)
                .collect();
            worst = worst.max(sample_residual(plant, x, zeta, &w)?);
        }
        report.checked += 1;
        report.max_residual = report.max_residual.max(worst);
        if worst > tolerance {
            failures.push(format!("sample {idx}: residual {worst:e}"));
        }
    }
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(Error::Validation(format!(
            "plant '{}' fails at tolerance {tolerance:e}: {}",
            plant.name(),
            failures.join("; ")
        )))
    }
}
