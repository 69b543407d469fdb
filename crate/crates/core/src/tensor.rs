//! Dense tensors over `R^m` used to hold partial derivatives of objectives.

use nalgebra::DMatrix;

/// A dense tensor of shape `m × m × … × m` (`order` copies), row-major.
///
/// Order 0 is a scalar, order 1 a vector, order 2 a matrix. Partial
/// derivatives of smooth objectives are symmetric under permutation of their
/// indices, so contracting "the last index" is the same as contracting any.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(order: usize, dim: usize) -> Self {
        Tensor {
            order,
            dim,
            data: vec![0.0; dim.pow(order as u32)],
        }
    }

    pub fn from_vec(order: usize, dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim.pow(order as u32), "tensor data length");
        Tensor { order, dim, data }
    }

    pub fn vector(v: &[f64]) -> Self {
        Tensor::from_vec(1, v.len(), v.to_vec())
    }

    /// `scale · I_m`.
    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut t = Tensor::zeros(2, dim);
        for i in 0..dim {
            t.data[i * dim + i] = scale;
        }
        t
    }

    /// Builds a tensor entry by entry from its multi-index.
    pub fn from_fn(order: usize, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let len = dim.pow(order as u32);
        let mut data = Vec::with_capacity(len);
        let mut index = vec![0usize; order];
        for _ in 0..len {
            data.push(f(&index));
            for slot in index.iter_mut().rev() {
                *slot += 1;
                if *slot < dim {
                    break;
                }
                *slot = 0;
            }
        }
        Tensor { order, dim, data }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.order);
        let flat = index.iter().fold(0, |acc, &i| acc * self.dim + i);
        self.data[flat]
    }

    /// Contracts the last index with `v`, lowering the order by one.
    pub fn contract(&self, v: &[f64]) -> Tensor {
        assert!(self.order >= 1, "cannot contract a scalar");
        assert_eq!(v.len(), self.dim);
        let m = self.dim;
        let data = self
            .data
            .chunks_exact(m)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        Tensor {
            order: self.order - 1,
            dim: m,
            data,
        }
    }

    /// `self += scale · other`.
    pub fn add_scaled(&mut self, other: &Tensor, scale: f64) {
        assert_eq!(self.order, other.order);
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|a| *a *= s);
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.order, 2, "only order-2 tensors are matrices");
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
    }

    /// Largest deviation between an entry and any of its index permutations
    /// obtained by adjacent transpositions (which generate the full group).
    pub fn symmetry_defect(&self) -> f64 {
        if self.order < 2 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        let mut swapped = vec![0usize; self.order];
        let len = self.data.len();
        let mut index = vec![0usize; self.order];
        for flat in 0..len {
            for k in 0..self.order - 1 {
                swapped.copy_from_slice(&index);
                swapped.swap(k, k + 1);
                worst = worst.max((self.data[flat] - self.get(&swapped)).abs());
            }
            for slot in index.iter_mut().rev() {
                *slot += 1;
                if *slot < self.dim {
                    break;
                }
                *slot = 0;
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_of_matrix_is_matvec() {
        let t = Tensor::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(t.contract(&[1.0, -1.0]).into_vec(), vec![-1.0, -1.0]);
    }

    #[test]
    fn from_fn_is_row_major() {
        let t = Tensor::from_fn(3, 2, |i| (i[0] * 4 + i[1] * 2 + i[2]) as f64);
        assert_eq!(t.data(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        assert_eq!(t.get(&[1, 0, 1]), 5.0);
    }

    #[test]
    fn symmetry_defect_detects_asymmetry() {
        let sym = Tensor::from_fn(3, 3, |i| (i[0] + i[1] + i[2]) as f64);
        assert_eq!(sym.symmetry_defect(), 0.0);
        let asym = Tensor::from_fn(2, 2, |i| i[0] as f64);
        assert_eq!(asym.symmetry_defect(), 1.0);
    }
}
