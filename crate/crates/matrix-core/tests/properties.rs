//! Randomized property checks driven by proptest.

use matrix_core::{
    c64, kron, partial_trace, partial_transpose, trace_and_replace, ComplexMatrix, TensorDims,
};
use proptest::prelude::*;

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(
        move |entries| {
            ComplexMatrix::from_fn(rows, cols, |i, j| {
                let (re, im) = entries[i * cols + j];
                c64(re, im)
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_trace_is_multiplicative(a in matrix_strategy(3, 3), b in matrix_strategy(3, 3)) {
        let lhs = kron(&a, &b).trace();
        let rhs = a.trace() * b.trace();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn kron_is_associative(
        a in matrix_strategy(2, 2),
        b in matrix_strategy(2, 2),
        c in matrix_strategy(2, 2),
    ) {
        let lhs = kron(&kron(&a, &b), &c);
        let rhs = kron(&a, &kron(&b, &c));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn partial_trace_peels_off_product_factor(
        a in matrix_strategy(2, 2),
        b in matrix_strategy(3, 3),
    ) {
        let dims = TensorDims::new(&[2, 3]);
        let out = partial_trace(&kron(&a, &b), &dims, &[1]).unwrap();
        prop_assert!(out.max_abs_diff(&a.scaled(b.trace())) < 1e-13);
    }

    #[test]
    fn trace_and_replace_is_a_projector(m in matrix_strategy(8, 8)) {
        let dims = TensorDims::new(&[2, 2, 2]);
        let once = trace_and_replace(&m, &dims, &[1]).unwrap();
        let twice = trace_and_replace(&once, &dims, &[1]).unwrap();
        prop_assert!(twice.max_abs_diff(&once) < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(m in matrix_strategy(6, 6)) {
        let dims = TensorDims::new(&[2, 3]);
        let once = partial_transpose(&m, &dims, &[0]).unwrap();
        let twice = partial_transpose(&once, &dims, &[0]).unwrap();
        prop_assert!(twice.max_abs_diff(&m) == 0.0);
    }
}
