//! Property tests for the contraction and solver invariants.

use mtensor_solve::linalg::norm2;
use mtensor_solve::mtensor::{max_row_sum, tau0};
use mtensor_solve::tensor::{power_vector, DenseTensor, JacobianMode};
use proptest::prelude::*;

fn tensor_strategy(max_order: usize, max_dim: usize) -> impl Strategy<Value = DenseTensor> {
    (2..=max_order, 1..=max_dim).prop_flat_map(|(m, n)| {
        prop::collection::vec(-1.0f64..1.0, n.pow(m as u32))
            .prop_map(move |e| DenseTensor::from_entries(m, n, e).unwrap())
    })
}

fn positive_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..3.0, n)
}

proptest! {
    #[test]
    fn symmetrization_preserves_the_contraction(a in tensor_strategy(5, 4)) {
        let n = a.dim();
        let x: Vec<f64> = (0..n).map(|i| 0.3 + 0.4 * i as f64).collect();
        let u = a.apply(&x).unwrap();
        let v = a.partial_symmetrize().apply(&x).unwrap();
        let scale = a.max_abs() * norm2(&x).powi((a.order() - 1) as i32) + 1e-300;
        for (p, q) in u.iter().zip(&v) {
            prop_assert!((p - q).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn symmetrization_is_idempotent(a in tensor_strategy(4, 3)) {
        let s = a.partial_symmetrize();
        let ss = s.partial_symmetrize();
        for (p, q) in s.entries().iter().zip(ss.entries()) {
            prop_assert!((p - q).abs() <= 1e-15 * p.abs().max(1.0));
        }
    }

    #[test]
    fn jacobian_times_x_is_homogeneous(a in tensor_strategy(5, 4), seed in 0u64..1000) {
        let n = a.dim();
        let m = a.order();
        let x: Vec<f64> = (0..n).map(|i| 0.1 + ((seed + i as u64) % 17) as f64 * 0.1).collect();
        let jx = a.jacobian(&x, JacobianMode::OnTheFly).unwrap().matvec(&x).unwrap();
        let ax = a.apply(&x).unwrap();
        let scale = norm2(&ax).max(1.0);
        for (u, v) in jx.iter().zip(&ax) {
            prop_assert!((u - (m - 1) as f64 * v).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn fractional_power_inverts_integer_power(x in positive_vec(4), p in 2usize..6) {
        let up = power_vector(&x, p as f64).unwrap();
        let back = power_vector(&up, 1.0 / p as f64).unwrap();
        for (u, v) in back.iter().zip(&x) {
            prop_assert!((u - v).abs() <= 1e-12 * v);
        }
    }

    #[test]
    fn row_sum_bound_certifies_tau0(entries in prop::collection::vec(0.0f64..1.0, 27), margin in 0.001f64..2.0) {
        let b = DenseTensor::from_entries(3, 3, entries).unwrap();
        let rho = max_row_sum(&b).unwrap();
        prop_assert!(tau0(rho + margin, rho).unwrap() > 0.0);
    }
}
