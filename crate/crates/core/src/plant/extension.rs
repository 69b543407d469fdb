use std::sync::Arc;

use super::{stack_from_channels, Plant};
use crate::error::{Error, Result};
use crate::objective::DerivativeStack;

/// A plant whose channels are padded to a common relative degree `k` with
/// auxiliary integrator chains.
///
/// Channel `i` with `r_i < k` gains states `ξ^i_1 … ξ^i_{k−r_i}` with
/// `v_i = ξ^i_1`, `ξ̇^i_j = ξ^i_{j+1}` and `ξ̇^i_{k−r_i} = s_i`; channels with
/// `r_i = k` take `v_i = s_i` directly. Once the inner plant is linearized
/// (`y^(r) = v`), every channel satisfies `y_i^(k) = s_i`, and the
/// derivatives `y_i^(r_i) … y_i^(k−1)` are read off the chain.
#[derive(Debug, Clone)]
pub struct ExtendedPlant {
    inner: Arc<dyn Plant>,
    order: usize,
    chain_lengths: Vec<usize>,
    chain_offsets: Vec<usize>,
}

/// Pads every channel of `plant` to relative degree `k`.
pub fn attach_auxiliary_chains(plant: Arc<dyn Plant>, k: usize) -> Result<ExtendedPlant> {
    let degrees = plant.relative_degrees();
    let max = degrees.iter().copied().max().unwrap_or(0);
    if k < max {
        return Err(Error::Config(format!(
            "target order {k} below the largest relative degree {max}"
        )));
    }
    let chain_lengths: Vec<usize> = degrees.iter().map(|&r| k - r).collect();
    let chain_offsets = chain_lengths
        .iter()
        .scan(0, |acc, &l| {
            let start = *acc;
            *acc += l;
            Some(start)
        })
        .collect();
    Ok(ExtendedPlant {
        inner: plant,
        order: k,
        chain_lengths,
        chain_offsets,
    })
}

impl ExtendedPlant {
    pub fn inner(&self) -> &dyn Plant {
        self.inner.as_ref()
    }

    pub fn inner_arc(&self) -> Arc<dyn Plant> {
        self.inner.clone()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn chain_lengths(&self) -> &[usize] {
        &self.chain_lengths
    }

    /// Total number of auxiliary states.
    pub fn aux_dim(&self) -> usize {
        self.chain_lengths.iter().sum()
    }

    /// True when no channel needed padding.
    pub fn is_identity(&self) -> bool {
        self.aux_dim() == 0
    }

    pub fn relative_degrees(&self) -> Vec<usize> {
        vec![self.order; self.chain_lengths.len()]
    }

    /// `n + dim ζ + dim ξ`.
    pub fn composite_dim(&self) -> usize {
        self.inner.composite_dim() + self.aux_dim()
    }

    /// `[y, ẏ, …, y^(k−1)]` from the composite state.
    pub fn output_stack(&self, x: &[f64], zeta: &[f64], xi: &[f64]) -> Result<DerivativeStack> {
        let mut channels = self.inner.output_derivatives(x, zeta);
        for ((channel, &len), &off) in channels
            .iter_mut()
            .zip(&self.chain_lengths)
            .zip(&self.chain_offsets)
        {
            channel.extend_from_slice(&xi[off..off + len]);
        }
        stack_from_channels(&channels, self.order)
    }

    /// `v = α̃(ξ) + β̃(ξ) s`: chain heads for padded channels, `s_i` otherwise.
    pub fn virtual_input(&self, xi: &[f64], s: &[f64]) -> Vec<f64> {
        self.chain_lengths
            .iter()
            .zip(&self.chain_offsets)
            .zip(s)
            .map(|((&len, &off), &si)| if len == 0 { si } else { xi[off] })
            .collect()
    }

    /// `ξ̇ = γ̃(ξ) + δ̃(ξ) s`.
    pub fn aux_rate(&self, xi: &[f64], s: &[f64]) -> Vec<f64> {
        let mut rate = Vec::with_capacity(self.aux_dim());
        for ((&len, &off), &si) in self.chain_lengths.iter().zip(&self.chain_offsets).zip(s) {
            if len == 0 {
                continue;
            }
            rate.extend_from_slice(&xi[off + 1..off + len]);
            rate.push(si);
        }
        rate
    }
}
