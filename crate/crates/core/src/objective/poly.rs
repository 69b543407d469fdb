//! Univariate polynomials used to express derivatives of `tanh` and `tan²`.

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// `P_n` with `d^n/du^n tanh(u) = P_n(tanh u)`.
pub(crate) fn tanh_derivative_polys(max: usize) -> Vec<Poly> {
    let sech2 = Poly(vec![1.0, 0.0, -1.0]);
    let mut out = vec![Poly(vec![0.0, 1.0])];
    for n in 0..max {
        let next = sech2.mul(&out[n].derivative());
        out.push(next);
    }
    out
}

/// `Q_n` with `d^n/dv^n tan²(v) = Q_n(tan v)`.
pub(crate) fn tan_squared_derivative_polys(max: usize) -> Vec<Poly> {
    let sec2 = Poly(vec![1.0, 0.0, 1.0]);
    let mut out = vec![Poly(vec![0.0, 0.0, 1.0])];
    for n in 0..max {
        let next = sec2.mul(&out[n].derivative());
        out.push(next);
    }
    out
}
