use num_bigint::BigInt;
use proptest::prelude::*;
use shaomega_core::snf::{abelian_invariants, smith_i64, SnfFlags};
use shaomega_core::AbelianStructure;

fn mat(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-9i64..=9, cols), rows)
}

/// Determinant by fraction-free elimination (Bareiss).
fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

#[test]
fn spec_matrix_example() {
    // Z² modulo the rows (2, 4) and (0, 4)
    let s = abelian_invariants(&[vec![2, 4], vec![0, 4]], 2).unwrap();
    assert_eq!(s, AbelianStructure::new(vec![2, 4], 0));
    assert_eq!(s.order(), Some(8));
    assert_eq!(abelian_invariants(&[vec![6, 0]], 2).unwrap(), AbelianStructure::new(vec![6], 1));
}

proptest! {
    #[test]
    fn cokernel_order_is_determinant(m in mat(3, 3)) {
        let d = det(&m).unsigned_abs();
        let s = abelian_invariants(&m, 3).unwrap();
        if d == 0 {
            prop_assert!(s.free_rank() > 0);
        } else {
            prop_assert_eq!(s.order(), Some(d));
        }
    }

    #[test]
    fn diagonal_divisibility_and_transforms(m in mat(3, 4)) {
        let s = smith_i64(&m, 3, 4, SnfFlags { left: true, right: true });
        for w in s.diag.windows(2) {
            prop_assert_eq!(&w[1] % &w[0], BigInt::from(0));
        }
        let p = s.p.unwrap();
        let q = s.q.unwrap();
        // P · A · Q is the diagonal matrix
        for i in 0..3 {
            for j in 0..4 {
                let mut acc = BigInt::from(0);
                for a in 0..3 {
                    for b in 0..4 {
                        acc += &p[i][a] * BigInt::from(m[a][b]) * &q[b][j];
                    }
                }
                let expected = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::from(0) };
                prop_assert_eq!(acc, expected);
            }
        }
    }

    #[test]
    fn row_operations_preserve_structure(m in mat(3, 3), c in -5i64..=5) {
        let mut m2 = m.clone();
        for j in 0..3 {
            m2[0][j] += c * m[1][j];
        }
        m2.swap(1, 2);
        prop_assert_eq!(abelian_invariants(&m, 3).unwrap(), abelian_invariants(&m2, 3).unwrap());
    }
}
