use serde::{Deserialize, Serialize};

use crate::domain::RngStream;
use crate::error::{Error, Result};
use crate::scalar::{logistic, softplus, Scalar};

/// Default hidden width.
pub const DEFAULT_HIDDEN: usize = 128;

/// One hidden layer with softplus activation and a linear output layer.
/// Weight matrices are stored row-major as `out x in`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams<T> {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: Vec<T>,
}

pub(crate) struct MlpTrace<T> {
    pub z1: Vec<T>,
    pub a1: Vec<T>,
    pub out: Vec<T>,
}

impl<T: Scalar> MlpParams<T> {
    pub fn zeros(input: usize, hidden: usize, output: usize) -> Self {
        Self {
            input,
            hidden,
            output,
            w1: vec![T::zero(); hidden * input],
            b1: vec![T::zero(); hidden],
            w2: vec![T::zero(); output * hidden],
            b2: vec![T::zero(); output],
        }
    }

    /// Weights drawn from `N(0, 1/fan_in)`, biases zero.
    pub fn init(input: usize, hidden: usize, output: usize, rng: &mut RngStream) -> Self {
        let mut p = Self::zeros(input, hidden, output);
        let s1 = (1.0 / input as f64).sqrt();
        let s2 = (1.0 / hidden as f64).sqrt();
        p.w1.iter_mut().for_each(|w| *w = T::lit(s1 * rng.standard_normal()));
        p.w2.iter_mut().for_each(|w| *w = T::lit(s2 * rng.standard_normal()));
        p
    }

    pub fn validate(&self) -> Result<()> {
        let (i, h, o) = (self.input, self.hidden, self.output);
        for (name, len, want) in [
            ("w1", self.w1.len(), h * i),
            ("b1", self.b1.len(), h),
            ("w2", self.w2.len(), o * h),
            ("b2", self.b2.len(), o),
        ] {
            if len != want {
                return Err(Error::InvalidConfig(format!("{name} has {len} entries, expected {want}")));
            }
        }
        if self.blocks().iter().flat_map(|b| b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("network parameter".into()));
        }
        Ok(())
    }

    pub(crate) fn trace(&self, input: &[T]) -> MlpTrace<T> {
        let (h, o) = (self.hidden, self.output);
        let mut z1 = self.b1.clone();
        for r in 0..h {
            let row = &self.w1[r * self.input..(r + 1) * self.input];
            z1[r] = z1[r] + row.iter().zip(input).map(|(&w, &x)| w * x).sum::<T>();
        }
        let a1: Vec<T> = z1.iter().map(|&z| softplus(z)).collect();
        let mut out = self.b2.clone();
        for r in 0..o {
            let row = &self.w2[r * h..(r + 1) * h];
            out[r] = out[r] + row.iter().zip(&a1).map(|(&w, &a)| w * a).sum::<T>();
        }
        MlpTrace { z1, a1, out }
    }

    /// Accumulates the vector-Jacobian product of the output with `g_out` into
    /// the four gradient blocks `[w1, b1, w2, b2]`.
    pub(crate) fn backward(&self, input: &[T], trace: &MlpTrace<T>, g_out: &[T], grad: &mut [Vec<T>]) {
        let (h, o) = (self.hidden, self.output);
        let mut g_a1 = vec![T::zero(); h];
        for r in 0..o {
            let g = g_out[r];
            grad[3][r] = grad[3][r] + g;
            let row = &self.w2[r * h..(r + 1) * h];
            let grow = &mut grad[2][r * h..(r + 1) * h];
            for c in 0..h {
                grow[c] = grow[c] + g * trace.a1[c];
                g_a1[c] = g_a1[c] + g * row[c];
            }
        }
        for r in 0..h {
            let g_z = g_a1[r] * logistic(trace.z1[r]);
            grad[1][r] = grad[1][r] + g_z;
            let grow = &mut grad[0][r * self.input..(r + 1) * self.input];
            for c in 0..self.input {
                grow[c] = grow[c] + g_z * input[c];
            }
        }
    }

    pub fn blocks(&self) -> [&[T]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub fn blocks_mut(&mut self) -> [&mut [T]; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }
}
