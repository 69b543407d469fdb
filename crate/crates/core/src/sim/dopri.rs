//! Dormand–Prince 5(4) with first-same-as-last stages and a scalar
//! RMS error norm.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
/// Smallest step before the integration is declared stiff.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
}

/// Adaptive integrator state for `ż = f(t, z)`.
pub struct Dopri5 {
    t: f64,
    z: Vec<f64>,
    f0: Vec<f64>,
    h: f64,
    opts: StepOptions,
}

impl Dopri5 {
    /// Evaluates `f(t0, z0)` once; its error is returned unchanged.
    pub fn new<F>(f: &mut F, t0: f64, z0: Vec<f64>, opts: StepOptions) -> Result<Self>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    {
        let f0 = f(t0, &z0)?;
        let h = initial_step(&z0, &f0, &opts);
        Ok(Dopri5 {
            t: t0,
            z: z0,
            f0,
            h,
            opts,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[f64] {
        &self.z
    }

    /// Takes one accepted step, landing exactly on `t_limit` if it would
    /// otherwise be overshot.
    ///
    /// A failing stage evaluation (the trial point left the domain) shrinks
    /// the step like a rejection. When the step falls below [`MIN_STEP`] the
    /// last stage error is returned, or [`Error::Stiffness`] if the failure
    /// was plain error control.
    pub fn step<F>(&mut self, f: &mut F, t_limit: f64) -> Result<()>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    {
        let mut last_error: Option<Error> = None;
        loop {
            let remaining = t_limit - self.t;
            let mut h = self.h.min(self.opts.max_step);
            let lands = h >= remaining * (1.0 - 1e-12);
            if lands {
                h = remaining;
            }
            if h < MIN_STEP && !lands {
                return Err(last_error.unwrap_or(Error::Stiffness { t: self.t, h }));
            }
            match self.attempt(f, h) {
                Ok((z_new, f_new, err)) => {
                    if err <= 1.0 {
                        self.t = if lands { t_limit } else { self.t + h };
                        self.z = z_new;
                        self.f0 = f_new;
                        let factor = if err == 0.0 {
                            MAX_FACTOR
                        } else {
                            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                        };
                        // A step shortened to hit `t_limit` says nothing about the
                        // natural step size, so keep the larger of the two.
                        self.h = (h * factor).max(if lands { self.h } else { 0.0 });
                        return Ok(());
                    }
                    self.h = h * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                }
                Err(e) => {
                    self.h = h * 0.25;
                    last_error = Some(e);
                }
            }
        }
    }

    fn attempt<F>(&self, f: &mut F, h: f64) -> Result<(Vec<f64>, Vec<f64>, f64)>
    where
        F: FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    {
        let n = self.z.len();
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        k.push(self.f0.clone());
        let mut stage = vec![0.0; n];
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    acc += A[s][j] * kj[i];
                }
                stage[i] = self.z[i] + h * acc;
            }
            if stage.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "stage state at t = {}",
                    self.t + C[s] * h
                )));
            }
            let ks = f(self.t + C[s] * h, &stage)?;
            if ks.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "vector field at t = {}",
                    self.t + C[s] * h
                )));
            }
            k.push(ks);
        }
        // Stage 7 was evaluated at the fifth-order solution (FSAL).
        let z_new = stage;
        let mut sum = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let scale = self.opts.atol + self.opts.rtol * self.z[i].abs().max(z_new[i].abs());
            sum += (h * e / scale).powi(2);
        }
        let err = (sum / n as f64).sqrt();
        let f_new = k.pop().expect("seven stages");
        Ok((z_new, f_new, err))
    }
}

/// Hairer's starting-step heuristic, capped by `max_step`.
fn initial_step(z: &[f64], f: &[f64], opts: &StepOptions) -> f64 {
    let n = z.len().max(1) as f64;
    let norm = |v: &[f64]| {
        (v.iter()
            .zip(z)
            .map(|(a, b)| (a / (opts.atol + opts.rtol * b.abs())).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
    };
    let d0 = norm(z);
    let d1 = norm(f);
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(opts.max_step)
}
