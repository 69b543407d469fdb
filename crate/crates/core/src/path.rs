//! Smooth time-parameterized curves with closed-form derivatives.
//!
//! Reference trajectories inside objectives and the test trajectories fed to
//! the finite-difference oracle both implement [`Path`].

use rand::Rng;

/// A smooth curve `t ↦ R^dim` whose derivatives of every order are available.
pub trait Path: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;

    /// The `order`-th time derivative at `t` (order 0 is the position).
    fn derivative(&self, t: f64, order: usize) -> Vec<f64>;

    fn position(&self, t: f64) -> Vec<f64> {
        self.derivative(t, 0)
    }
}

/// Constant point.
#[derive(Debug, Clone, PartialEq)]
pub struct Constant(pub Vec<f64>);

impl Path for Constant {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn derivative(&self, _t: f64, order: usize) -> Vec<f64> {
        if order == 0 {
            self.0.clone()
        } else {
            vec![0.0; self.0.len()]
        }
    }
}

/// One sinusoidal term `amplitude · sin(frequency · t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl Harmonic {
    fn derivative(&self, t: f64, order: usize) -> f64 {
        // d^n/dt^n sin(ωt + φ) = ω^n sin(ωt + φ + nπ/2)
        let shift = order as f64 * std::f64::consts::FRAC_PI_2;
        self.amplitude
            * self.frequency.powi(order as i32)
            * (self.frequency * t + self.phase + shift).sin()
    }
}

/// Per-component sum of an affine drift and sinusoids.
///
/// Used as a randomized smooth trajectory in derivative checks; every
/// derivative order is non-trivial, unlike low-degree polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPath {
    pub offset: Vec<f64>,
    pub drift: Vec<f64>,
    pub terms: Vec<Vec<Harmonic>>,
}

impl HarmonicPath {
    /// Random path with `harmonics` terms per component, amplitudes up to
    /// `amplitude` and angular frequencies in `[0.2, max_frequency]`.
    pub fn random<R: Rng>(
        rng: &mut R,
        dim: usize,
        harmonics: usize,
        amplitude: f64,
        max_frequency: f64,
    ) -> Self {
        let offset = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let drift = (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect();
        let terms = (0..dim)
            .map(|_| {
                (0..harmonics)
                    .map(|_| Harmonic {
                        amplitude: rng.random_range(-amplitude..amplitude),
                        frequency: rng.random_range(0.2..max_frequency),
                        phase: rng.random_range(0.0..std::f64::consts::TAU),
                    })
                    .collect()
            })
            .collect();
        HarmonicPath {
            offset,
            drift,
            terms,
        }
    }

    /// Shifts the whole path by a constant vector.
    pub fn translated(mut self, by: &[f64]) -> Self {
        for (o, b) in self.offset.iter_mut().zip(by) {
            *o += b;
        }
        self
    }
}

impl Path for HarmonicPath {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn derivative(&self, t: f64, order: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                let base = match order {
                    0 => self.offset[i] + self.drift[i] * t,
                    1 => self.drift[i],
                    _ => 0.0,
                };
                base + self.terms[i]
                    .iter()
                    .map(|h| h.derivative(t, order))
                    .sum::<f64>()
            })
            .collect()
    }
}

/// Several paths concatenated into one vector-valued path.
#[derive(Debug, Clone)]
pub struct Stacked<P>(pub Vec<P>);

impl<P: Path> Path for Stacked<P> {
    fn dim(&self) -> usize {
        self.0.iter().map(Path::dim).sum()
    }

    fn derivative(&self, t: f64, order: usize) -> Vec<f64> {
        self.0.iter().flat_map(|p| p.derivative(t, order)).collect()
    }
}
