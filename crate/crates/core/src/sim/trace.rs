use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integration and logging settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub t0: f64,
    pub t_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub sample_interval: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            t0: 0.0,
            t_end: 20.0,
            rtol: 1e-8,
            atol: 1e-10,
            max_step: 1e-2,
            sample_interval: 1e-2,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.t0,
            self.t_end,
            self.rtol,
            self.atol,
            self.max_step,
            self.sample_interval,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sim settings must be finite".into()));
        }
        if self.t_end <= self.t0 {
            return Err(Error::Config(format!(
                "t_end {} must exceed t0 {}",
                self.t_end, self.t0
            )));
        }
        if self.rtol <= 0.0 || self.atol <= 0.0 {
            return Err(Error::Config("rtol and atol must be positive".into()));
        }
        if self.max_step <= 0.0 || self.sample_interval <= 0.0 {
            return Err(Error::Config(
                "max_step and sample_interval must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `t0, t0 + Δ, …`, ending exactly at `t_end`.
    pub fn sample_times(&self) -> Vec<f64> {
        let span = self.t_end - self.t0;
        let n = (span / self.sample_interval - 1e-9).ceil().max(1.0) as usize;
        let mut times: Vec<f64> = (0..n)
            .map(|i| self.t0 + i as f64 * self.sample_interval)
            .collect();
        times.push(self.t_end);
        times
    }
}

/// One logged instant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub zeta: Vec<f64>,
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub y_star: Vec<f64>,
    /// `[∇_y f0, …, ∇_y^(k−1) f0]` at `(y, t)`.
    pub gradient_stack: Vec<Vec<f64>>,
    pub stack_norms: Vec<f64>,
    pub u: Vec<f64>,
    pub objective_value: f64,
    pub optimal_value: f64,
    /// `C e^{−α(t − t0)}`.
    pub envelope: f64,
}

impl Sample {
    pub fn tracking_error(&self) -> f64 {
        self.y
            .iter()
            .zip(&self.y_star)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        let scalars = [
            self.t,
            self.objective_value,
            self.optimal_value,
            self.envelope,
        ];
        scalars.iter().all(|v| v.is_finite())
            && [
                &self.x,
                &self.zeta,
                &self.xi,
                &self.y,
                &self.y_star,
                &self.stack_norms,
                &self.u,
            ]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
            && self.gradient_stack.iter().flatten().all(|v| v.is_finite())
    }
}

/// Time-ordered samples of one closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub output_dim: usize,
    pub order: usize,
    pub input_dim: usize,
    /// `C` of the convergence envelope.
    pub bound_constant: f64,
    /// Certified rate `α` of the envelope.
    pub alpha: f64,
    pub samples: Vec<Sample>,
}

impl SimTrace {
    pub fn csv_header(&self) -> Vec<String> {
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=self.output_dim).map(|i| format!("y_{i}")));
        cols.extend((1..=self.output_dim).map(|i| format!("ystar_{i}")));
        cols.extend((0..self.order).map(|j| format!("gradnorm_{j}")));
        cols.extend((1..=self.input_dim).map(|i| format!("u_{i}")));
        cols.push("envelope".into());
        cols
    }

    /// `t, y_1…y_m, ystar_1…ystar_m, gradnorm_0…gradnorm_{k−1}, u_1…u_m, envelope`.
    /// Values use Rust's shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.csv_header().join(","))?;
        for s in &self.samples {
            let mut row = vec![s.t];
            row.extend(&s.y);
            row.extend(&s.y_star);
            row.extend(&s.stack_norms);
            row.extend(&s.u);
            row.push(s.envelope);
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn last_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.t)
    }
}
