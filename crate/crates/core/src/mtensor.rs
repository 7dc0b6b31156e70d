//! M-tensor construction and certificates, plus the seeded random
//! instance generator used by the benchmark harness.
//!
//! An M-tensor is A = s*I - B with B entrywise nonnegative; it is
//! nonsingular when s exceeds the spectral radius of B. The spectral
//! radius is never computed exactly here; the maximum row sum of B is
//! used as the upper bound everywhere one is needed.

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The pair (s, B) witnessing A = s*I - B with B >= 0.
#[derive(Debug, Clone)]
pub struct MTensorDecomposition {
    s: f64,
    b: DenseTensor,
}

impl MTensorDecomposition {
    pub fn new(s: f64, b: DenseTensor) -> Result<Self> {
        if let Some(bad) = b.entries().iter().find(|&&v| v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "decomposition requires B >= 0, found entry {bad}"
            )));
        }
        Ok(MTensorDecomposition { s, b })
    }

    pub fn shift(&self) -> f64 {
        self.s
    }

    pub fn nonnegative_part(&self) -> &DenseTensor {
        &self.b
    }

    /// Assemble A = s*I - B entrywise.
    pub fn compose(&self) -> DenseTensor {
        let n = self.b.dim();
        let m = self.b.order();
        let mut a = self.b.clone();
        for e in a.entries_mut() {
            *e = -*e;
        }
        for i in 0..n {
            let idx = vec![i; m];
            let v = a.get(&idx);
            a.set(&idx, v + self.s);
        }
        a
    }
}

/// Maximum row sum of a nonnegative tensor: max over i of the sum of
/// B_{i i2..im}. Upper-bounds the spectral radius of B.
pub fn max_row_sum(b: &DenseTensor) -> Result<f64> {
    if let Some(bad) = b.entries().iter().find(|&&v| v < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "max_row_sum requires a nonnegative tensor, found entry {bad}"
        )));
    }
    let n = b.dim();
    let block = b.entries().len() / n;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let row_sum: f64 = b.entries()[i * block..(i + 1) * block].iter().sum();
        best = best.max(row_sum);
    }
    Ok(best)
}

/// Check the nonsingular M-tensor certificate against a positive witness y:
/// every off-diagonal entry must be <= 0 (exactly, no tolerance) and
/// A y^{m-1} must be componentwise positive.
pub fn certify_nonsingular_m(a: &DenseTensor, y: &[f64]) -> Result<bool> {
    if y.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: y.len(),
        });
    }
    if let Some(bad) = y.iter().find(|&&v| v <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "certificate witness must be positive, found {bad}"
        )));
    }
    let n = a.dim();
    let m = a.order();
    // sign pattern: nonpositive off the main diagonal
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        diag.push(a.flat_index(&vec![i; m]));
    }
    for (flat, &v) in a.entries().iter().enumerate() {
        if v > 0.0 && !diag.contains(&flat) {
            return Ok(false);
        }
    }
    Ok(a.apply(y)?.iter().all(|&v| v > 0.0))
}

/// Parameter tau0 bounding how far past t = 1 the homotopy tensor
/// stays a nonsingular M-tensor: (s-rho)/(rho-s+2) when rho-s+2 > 0,
/// otherwise 1. Always positive for s > rho >= 0.
pub fn tau0(s: f64, rho_bound: f64) -> Result<f64> {
    if !(s > rho_bound) || rho_bound < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tau0 requires s > rho_bound >= 0, got s={s}, rho_bound={rho_bound}"
        )));
    }
    let d = rho_bound - s + 2.0;
    if d > 0.0 {
        Ok((s - rho_bound) / d)
    } else {
        Ok(1.0)
    }
}

/// Parameters for random instance generation.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub order: usize,
    pub dim: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        if self.order < 2 || self.dim < 1 {
            return Err(Error::InvalidArgument(format!(
                "generator requires order >= 2 and dim >= 1, got ({}, {})",
                self.order, self.dim
            )));
        }
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "generator requires epsilon > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// A generated test instance: the M-tensor A, a positive right side b,
/// and the (s, B) decomposition that produced A.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub a: DenseTensor,
    pub b: Vec<f64>,
    pub decomposition: MTensorDecomposition,
}

/// Draw B and b with entries uniform in (0,1), set
/// s = (1+epsilon) * max row sum of B, and return A = s*I - B.
///
/// The stream is ChaCha8 seeded with `seed`; entries of B are drawn
/// first in flat last-index-fastest order, then the entries of b.
/// Identical seeds reproduce identical instances bit for bit.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<GeneratedInstance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let len = cfg.dim.pow(cfg.order as u32);
    let entries: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
    let b_tensor = DenseTensor::from_entries(cfg.order, cfg.dim, entries)?;
    let rhs: Vec<f64> = (0..cfg.dim).map(|_| rng.gen_range(0.0..1.0)).collect();

    let s = (1.0 + cfg.epsilon) * max_row_sum(&b_tensor)?;
    let decomposition = MTensorDecomposition::new(s, b_tensor)?;
    let a = decomposition.compose();
    Ok(GeneratedInstance {
        a,
        b: rhs,
        decomposition,
    })
}
