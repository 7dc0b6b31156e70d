//! Dense order-m tensors and the contraction kernels everything else is
//! built on: the tensor-vector product `A x^{m-1}`, partial symmetrization
//! over the trailing indices, and the Jacobian matrix `(m-1) Ahat x^{m-2}`.
//!
//! Storage is a single flat array with the last index varying fastest.
//! All index arithmetic goes through [`DenseTensor::flat_index`].
//!
//! Memory is the practical size limit: an order-m, dimension-n tensor
//! holds n^m doubles and is never chunked to disk.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Mode selector for [`DenseTensor::jacobian`].
///
/// `OnTheFly` accumulates the Jacobian directly from the raw tensor by
/// summing over all m-1 positions of the differentiated index, never
/// storing the symmetrized tensor. `Materialized` builds the symmetrized
/// tensor first; it exists for cross-checking and for callers that reuse
/// the symmetrized form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMode {
    OnTheFly,
    Materialized,
}

/// Order-m, dimension-n real tensor with flat contiguous storage,
/// last index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        check_shape(order, dim)?;
        let len = dim.checked_pow(order as u32).ok_or_else(|| {
            Error::InvalidArgument(format!("tensor size {dim}^{order} overflows"))
        })?;
        Ok(DenseTensor {
            order,
            dim,
            entries: vec![0.0; len],
        })
    }

    pub fn from_entries(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        check_shape(order, dim)?;
        let expected = dim.pow(order as u32);
        if entries.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: entries.len(),
            });
        }
        Ok(DenseTensor {
            order,
            dim,
            entries,
        })
    }

    /// The order-m identity tensor: ones on the main diagonal
    /// (i, i, ..., i), zeros elsewhere. Satisfies I x^{m-1} = x^{[m-1]}.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        for i in 0..dim {
            let flat = t.flat_index(&vec![i; order]);
            t.entries[flat] = 1.0;
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, e| acc.max(e.abs()))
    }

    /// Flat offset of a full multi-index, last index fastest.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.entries[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let flat = self.flat_index(idx);
        self.entries[flat] = v;
    }

    /// The tensor-vector product A x^{m-1}: component i is the full
    /// contraction of x against the trailing m-1 indices of row block i.
    /// For m = 2 this is the matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vec(x)?;
        let block = self.entries.len() / self.dim;
        Ok((0..self.dim)
            .map(|i| contract_block(&self.entries[i * block..(i + 1) * block], x, self.order - 1))
            .collect())
    }

    /// Average over all permutations of the trailing m-1 indices.
    /// Leaves apply() unchanged and makes the Jacobian formula
    /// (m-1) Ahat x^{m-2} valid.
    ///
    /// Enumerates sorted multisets of trailing indices and distributes
    /// each average over the distinct arrangements, instead of summing
    /// (m-1)! terms per entry.
    pub fn partial_symmetrize(&self) -> DenseTensor {
        let n = self.dim;
        let k = self.order - 1;
        let mut out = self.clone();
        let block = self.entries.len() / n;

        // nondecreasing tuples enumerate each multiset once
        let mut tuple = vec![0usize; k];
        loop {
            // offsets of all distinct arrangements of this multiset
            let mut arr = tuple.clone();
            let mut offsets = Vec::new();
            loop {
                offsets.push(arr.iter().fold(0, |acc, &i| acc * n + i));
                if !next_permutation(&mut arr) {
                    break;
                }
            }
            if offsets.len() > 1 {
                for i in 0..n {
                    let base = i * block;
                    let sum: f64 = offsets.iter().map(|&o| self.entries[base + o]).sum();
                    let avg = sum / offsets.len() as f64;
                    for &o in &offsets {
                        out.entries[base + o] = avg;
                    }
                }
            }
            if !next_nondecreasing(&mut tuple, n) {
                break;
            }
        }
        out
    }

    /// Jacobian of x -> A x^{m-1}, i.e. the matrix (m-1) Ahat x^{m-2}.
    pub fn jacobian(&self, x: &[f64], mode: JacobianMode) -> Result<DenseMatrix> {
        self.check_vec(x)?;
        match mode {
            JacobianMode::OnTheFly => Ok(self.jacobian_on_the_fly(x)),
            JacobianMode::Materialized => Ok(self.partial_symmetrize().jacobian_materialized(x)),
        }
    }

    // Each entry A_{i t_1..t_k} contributes to J[i][t_p] the product of x
    // over the other trailing positions, for every position p. Summing
    // over positions reproduces (m-1) Ahat x^{m-2} without forming Ahat.
    fn jacobian_on_the_fly(&self, x: &[f64]) -> DenseMatrix {
        let n = self.dim;
        let k = self.order - 1;
        let block = self.entries.len() / n;
        let mut jac = DenseMatrix::zeros(n, n);
        let mut tuple = vec![0usize; k];
        let mut prefix = vec![1.0; k + 1];
        let mut suffix = vec![1.0; k + 1];
        for i in 0..n {
            tuple.iter_mut().for_each(|t| *t = 0);
            let base = i * block;
            for off in 0..block {
                let a = self.entries[base + off];
                if a != 0.0 {
                    for p in 0..k {
                        prefix[p + 1] = prefix[p] * x[tuple[p]];
                    }
                    suffix[k] = 1.0;
                    for p in (0..k).rev() {
                        suffix[p] = suffix[p + 1] * x[tuple[p]];
                    }
                    for p in 0..k {
                        jac[(i, tuple[p])] += a * prefix[p] * suffix[p + 1];
                    }
                }
                if off + 1 < block {
                    increment_odometer(&mut tuple, n);
                }
            }
        }
        jac
    }

    // Assumes self is already symmetric in the trailing indices:
    // J[i][j] = (m-1) * sum over remaining indices of A_{i j rest} * prod x.
    fn jacobian_materialized(&self, x: &[f64]) -> DenseMatrix {
        let n = self.dim;
        let m = self.order;
        let inner = self.entries.len() / (n * n); // n^(m-2)
        let mut jac = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let base = (i * n + j) * inner;
                let s = contract_block(&self.entries[base..base + inner], x, m - 2);
                jac[(i, j)] = (m - 1) as f64 * s;
            }
        }
        jac
    }

    fn check_vec(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!(
            "tensor order must be >= 2, got {order}"
        )));
    }
    if dim < 1 {
        return Err(Error::InvalidArgument("tensor dim must be >= 1".into()));
    }
    Ok(())
}

// Full contraction of x against all `levels` indices of a flat block.
fn contract_block(entries: &[f64], x: &[f64], levels: usize) -> f64 {
    if levels == 0 {
        return entries[0];
    }
    let n = x.len();
    let block = entries.len() / n;
    let mut acc = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        acc += xj * contract_block(&entries[j * block..(j + 1) * block], x, levels - 1);
    }
    acc
}

/// Componentwise power x^{[p]}. Integer exponents work for any x;
/// fractional exponents (p = 1/(m-1) is the main use) require x > 0.
pub fn power_vector(x: &[f64], p: f64) -> Result<Vec<f64>> {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        return Ok(power_vector_int(x, p as i32));
    }
    if let Some(bad) = x.iter().find(|&&v| v <= 0.0) {
        return Err(Error::Domain(format!(
            "fractional power {p} of non-positive component {bad}"
        )));
    }
    Ok(x.iter().map(|v| v.powf(p)).collect())
}

/// Componentwise integer power, no positivity requirement.
pub fn power_vector_int(x: &[f64], p: i32) -> Vec<f64> {
    x.iter().map(|v| v.powi(p)).collect()
}

// Lexicographic next permutation in place; false once exhausted.
fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

// Next nondecreasing tuple over {0..n-1}; false once exhausted.
fn next_nondecreasing(t: &mut [usize], n: usize) -> bool {
    for i in (0..t.len()).rev() {
        if t[i] + 1 < n {
            let v = t[i] + 1;
            for slot in &mut t[i..] {
                *slot = v;
            }
            return true;
        }
    }
    false
}

// Plain odometer over {0..n-1}^k, last digit fastest.
fn increment_odometer(t: &mut [usize], n: usize) {
    for i in (0..t.len()).rev() {
        t[i] += 1;
        if t[i] < n {
            return;
        }
        t[i] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_tensor(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseTensor {
        let entries = (0..n.pow(m as u32)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        DenseTensor::from_entries(m, n, entries).unwrap()
    }

    fn random_positive_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(0.1..2.0)).collect()
    }

    #[test]
    fn identity_order2_is_identity_matrix() {
        let t = DenseTensor::identity(2, 3).unwrap();
        assert_eq!(
            t.entries(),
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn identity_order3_dim2_entries() {
        let t = DenseTensor::identity(3, 2).unwrap();
        assert_eq!(t.get(&[0, 0, 0]), 1.0);
        assert_eq!(t.get(&[1, 1, 1]), 1.0);
        assert_eq!(t.entries().iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn identity_apply_is_power_vector() {
        let t = DenseTensor::identity(3, 2).unwrap();
        assert_eq!(t.apply(&[2.0, 3.0]).unwrap(), vec![4.0, 9.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in 2..=6 {
            let t = DenseTensor::identity(m, 4).unwrap();
            let x = random_positive_vec(&mut rng, 4);
            let lhs = t.apply(&x).unwrap();
            let rhs = power_vector(&x, (m - 1) as f64).unwrap();
            for (a, b) in lhs.iter().zip(&rhs) {
                assert!((a - b).abs() <= 1e-15 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn power_vector_cases() {
        assert_eq!(power_vector(&[1.0, 4.0], 0.5).unwrap(), vec![1.0, 2.0]);
        assert_eq!(power_vector(&[2.0, 3.0], 2.0).unwrap(), vec![4.0, 9.0]);
        assert_eq!(power_vector(&[5.0, -1.0], 1.0).unwrap(), vec![5.0, -1.0]);
        assert!(matches!(
            power_vector(&[1.0, -1.0], 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn apply_all_ones() {
        let t = DenseTensor::from_entries(3, 2, vec![1.0; 8]).unwrap();
        // each row sums (x1+x2)^2 = 9
        assert_eq!(t.apply(&[1.0, 2.0]).unwrap(), vec![9.0, 9.0]);
        let id = DenseTensor::identity(3, 2).unwrap();
        assert_eq!(id.apply(&[1.0, 2.0]).unwrap(), vec![1.0, 4.0]);
    }

    #[test]
    fn apply_order2_matches_matvec_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let n = 4;
            let t = random_tensor(&mut rng, 2, n);
            let x = random_positive_vec(&mut rng, n);
            let got = t.apply(&x).unwrap();
            // direct double-loop oracle
            for i in 0..n {
                let want: f64 = (0..n).map(|j| t.get(&[i, j]) * x[j]).sum();
                assert!((got[i] - want).abs() <= 1e-14 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn apply_dimension_mismatch() {
        let t = DenseTensor::identity(3, 2).unwrap();
        assert!(matches!(
            t.apply(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_symmetrize_two_permutation_average() {
        let mut t = DenseTensor::zeros(3, 2).unwrap();
        t.set(&[0, 0, 1], 2.0);
        let s = t.partial_symmetrize();
        assert_eq!(s.get(&[0, 0, 1]), 1.0);
        assert_eq!(s.get(&[0, 1, 0]), 1.0);
        assert_eq!(s.get(&[0, 0, 0]), 0.0);
        assert_eq!(s.get(&[0, 1, 1]), 0.0);
    }

    #[test]
    fn partial_symmetrize_fixed_point() {
        let id = DenseTensor::identity(4, 3).unwrap();
        assert_eq!(id.partial_symmetrize(), id);
    }

    #[test]
    fn partial_symmetrize_preserves_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_tensor(&mut rng, 3, 3);
        let s = t.partial_symmetrize();
        for _ in 0..100 {
            let x = random_positive_vec(&mut rng, 3);
            let a = t.apply(&x).unwrap();
            let b = s.apply(&x).unwrap();
            let scale = t.max_abs() * norm2(&x).powi(2);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-13 * scale);
            }
        }
    }

    #[test]
    fn jacobian_identity_tensor_is_diagonal() {
        let id = DenseTensor::identity(3, 2).unwrap();
        for mode in [JacobianMode::OnTheFly, JacobianMode::Materialized] {
            let j = id.jacobian(&[2.0, 3.0], mode).unwrap();
            assert_eq!(j[(0, 0)], 4.0);
            assert_eq!(j[(1, 1)], 6.0);
            assert_eq!(j[(0, 1)], 0.0);
            assert_eq!(j[(1, 0)], 0.0);
        }
    }

    #[test]
    fn jacobian_order2_is_the_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_tensor(&mut rng, 2, 3);
        let x = random_positive_vec(&mut rng, 3);
        let j = t.jacobian(&x, JacobianMode::OnTheFly).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(j[(i, k)], t.get(&[i, k]));
            }
        }
    }

    #[test]
    fn jacobian_modes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 2..=5 {
            let t = random_tensor(&mut rng, m, 3);
            let x = random_positive_vec(&mut rng, 3);
            let a = t.jacobian(&x, JacobianMode::OnTheFly).unwrap();
            let b = t.jacobian(&x, JacobianMode::Materialized).unwrap();
            let scale = a.max_abs().max(1.0);
            for (u, v) in a.entries().iter().zip(b.entries()) {
                assert!((u - v).abs() <= 1e-13 * scale);
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = 4;
        let n = 3;
        let t = random_tensor(&mut rng, m, n);
        let x = random_positive_vec(&mut rng, n);
        let j = t.jacobian(&x, JacobianMode::OnTheFly).unwrap();
        let fd = finite_difference_jacobian(|v| t.apply(v).unwrap(), &x);
        let scale = j.max_abs().max(1.0);
        for (u, v) in j.entries().iter().zip(fd.entries()) {
            assert!((u - v).abs() <= 1e-6 * scale, "{u} vs {v}");
        }
    }

    #[test]
    fn euler_homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for m in 2..=5 {
            let t = random_tensor(&mut rng, m, 4);
            let x = random_positive_vec(&mut rng, 4);
            let j = t.jacobian(&x, JacobianMode::OnTheFly).unwrap();
            let jx = j.matvec(&x).unwrap();
            let ax = t.apply(&x).unwrap();
            let scale = norm2(&ax).max(1.0);
            for (u, v) in jx.iter().zip(&ax) {
                assert!((u - (m - 1) as f64 * v).abs() <= 1e-12 * scale);
            }
        }
    }

    // Central-difference oracle shared with the acceptance suite via copy;
    // step h = 1e-6 * max(1, |x_i|) per coordinate.
    pub(crate) fn finite_difference_jacobian<F>(f: F, x: &[f64]) -> DenseMatrix
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let n = x.len();
        let fx = f(x);
        let rows = fx.len();
        let mut jac = DenseMatrix::zeros(rows, n);
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let fp = f(&xp);
            let fm = f(&xm);
            for i in 0..rows {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        jac
    }
}
