use super::{ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// Singular values, sorted descending, via one-sided Jacobi on the columns.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    // work on the orientation with fewer columns
    let work = if m.cols() > m.rows() { m.adjoint() } else { m.clone() };
    let (rows, cols) = (work.rows(), work.cols());
    let mut columns: Vec<Vec<C64>> = (0..cols).map(|c| work.column(c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (left, right) = columns.split_at_mut(q);
                rotated |= orthogonalize(&mut left[p], &mut right[0], rows);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn orthogonalize(a: &mut [C64], b: &mut [C64], rows: usize) -> bool {
    let alpha: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let beta: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let gamma: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let g = gamma.norm();
    if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
        return false;
    }
    let ph = gamma.conj() / g;
    let zeta = (beta - alpha) / (2.0 * g);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;
    for i in 0..rows {
        let x = a[i];
        let y = b[i] * ph;
        a[i] = x * c - y * s;
        b[i] = x * s + y * c;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, HermitianOperator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_matrix() {
        assert_eq!(singular_values(&ComplexMatrix::zeros(3, 3)), vec![0.0; 3]);
    }

    #[test]
    fn diagonal_values_are_absolute_and_sorted() {
        let sv = singular_values(&ComplexMatrix::from_real_diagonal(&[3.0, -4.0]));
        assert_eq!(sv, vec![4.0, 3.0]);
    }

    #[test]
    fn rank_one_outer_product_is_exact() {
        let u: Vec<C64> = (0..16).map(|i| C64::new((i as f64).sin(), (i as f64).cos())).collect();
        let v: Vec<C64> = (0..16).map(|i| C64::new(1.0 / (1.0 + i as f64), 0.3)).collect();
        let m = ComplexMatrix::outer(&u, &v);
        let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let sv = singular_values(&m);
        assert!((sv[0] - nu * nv).abs() < 1e-12);
        assert!(sv[1..].iter().all(|&s| s < 1e-13), "{sv:?}");
    }

    #[test]
    fn hermitian_input_matches_absolute_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 4, 7, 16] {
            let mut m = ComplexMatrix::zeros(n, n);
            for r in 0..n {
                m[(r, r)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
                for c in r + 1..n {
                    let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    m[(r, c)] = z;
                    m[(c, r)] = z.conj();
                }
            }
            let mut abs_eigs: Vec<f64> = eigh(&HermitianOperator::new(m.clone()).unwrap())
                .eigenvalues
                .iter()
                .map(|l| l.abs())
                .collect();
            abs_eigs.sort_by(|a, b| b.total_cmp(a));
            let sv = singular_values(&m);
            for (a, b) in sv.iter().zip(&abs_eigs) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rectangular_inputs() {
        let m = ComplexMatrix::from_row_major(
            2,
            3,
            vec![
                C64::new(1., 0.),
                C64::new(0., 0.),
                C64::new(0., 0.),
                C64::new(0., 0.),
                C64::new(0., 2.),
                C64::new(0., 0.),
            ],
        )
        .unwrap();
        assert_eq!(singular_values(&m), vec![2.0, 1.0]);
        assert_eq!(singular_values(&m.adjoint()), vec![2.0, 1.0]);
    }
}
