use super::{ComplexMatrix, HermitianOperator, LinalgError, C64};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(eigenvalues) V^dagger`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V f(Lambda) V^dagger` for a real function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| v[(r, k)] * v[(c, k)].conj() * fl[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }
}

/// Hermitian eigensolver (cyclic complex Jacobi).
///
/// Eigenvalues are returned in descending order; each eigenvector is fixed up
/// to have its first non-negligible component real and positive.
pub fn eigh(op: &HermitianOperator) -> Spectrum {
    let n = op.dim();
    let mut a = op.matrix().clone();
    let mut v = ComplexMatrix::identity(n);

    let scale = super::frobenius_norm(&a);
    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
                .map(|(r, c)| a[(r, c)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= f64::EPSILON * scale * 1e-2 {
                break;
            }
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotated |= rotate(&mut a, &mut v, p, q);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their Jacobi order
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.column(src);
        let phase = col
            .iter()
            .find(|z| z.norm() > 1e-8)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(C64::new(1.0, 0.0));
        for r in 0..n {
            eigenvectors[(r, dst)] = col[r] * phase;
        }
    }
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Checks Hermiticity of a raw matrix before solving.
pub fn eigh_matrix(m: &ComplexMatrix) -> Result<Spectrum, LinalgError> {
    Ok(eigh(&HermitianOperator::new(m.clone())?))
}

/// Annihilates `a[p][q]`; returns whether a rotation was applied.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) -> bool {
    let apq = a[(p, q)];
    let rho = apq.norm();
    if rho == 0.0 {
        return false;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip entries that are already negligible against the diagonal
    if rho < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return false;
    }
    let n = a.rows();
    // phase so that the (p, q) entry becomes real positive: column q *= e^{-i phi}
    let ph = apq.conj() / rho;
    let theta = (aqq - app) / (2.0 * rho);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // A <- A J where J = P R with P = diag(.., e^{-i phi} at q, ..)
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)] * ph;
        a[(r, p)] = arp * c - arq * s;
        a[(r, q)] = arp * s + arq * c;
    }
    // A <- J^dagger A
    let phc = ph.conj();
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)] * phc;
        a[(p, col)] = apc * c - aqc * s;
        a[(q, col)] = apc * s + aqc * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * rho, 0.0);
    a[(q, q)] = C64::new(aqq + t * rho, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)] * ph;
        v[(r, p)] = vrp * c - vrq * s;
        v[(r, q)] = vrp * s + vrq * c;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> HermitianOperator {
        let mut m = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            m[(r, r)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for c in r + 1..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(r, c)] = z;
                m[(c, r)] = z.conj();
            }
        }
        HermitianOperator::new(m).unwrap()
    }

    fn check_invariants(op: &HermitianOperator, spec: &Spectrum) {
        let n = op.dim();
        let a_norm = spectral_norm(op.matrix()).max(1.0);
        let err = spectral_norm(&spec.reconstruct().sub(op.matrix()).unwrap());
        assert!(err <= 1e-10 * a_norm, "reconstruction error {err}");
        let gram = spec.eigenvectors.adjoint().matmul(&spec.eigenvectors).unwrap();
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
        assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn identity_spectrum() {
        let s = eigh(&HermitianOperator::identity(2));
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
        assert_eq!(s.eigenvectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn pauli_z_spectrum() {
        let s = eigh(&HermitianOperator::from_real_diagonal(&[1.0, -1.0]));
        assert_eq!(s.eigenvalues, vec![1.0, -1.0]);
    }

    #[test]
    fn pauli_y_spectrum_and_phase_convention() {
        let y = ComplexMatrix::from_row_major(
            2,
            2,
            vec![C64::new(0., 0.), C64::new(0., -1.), C64::new(0., 1.), C64::new(0., 0.)],
        )
        .unwrap();
        let s = eigh_matrix(&y).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
        for k in 0..2 {
            let v0 = s.eigenvectors[(0, k)];
            assert!(v0.re > 0.0 && v0.im.abs() < 1e-15);
        }
        check_invariants(&HermitianOperator::new(y).unwrap(), &s);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![C64::new(0., 0.), C64::new(1., 0.), C64::new(0., 0.), C64::new(0., 0.)],
        )
        .unwrap();
        assert!(matches!(eigh_matrix(&m), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[1, 2, 3, 5, 8, 16, 33, 64] {
            for _ in 0..3 {
                let op = random_hermitian(n, &mut rng);
                check_invariants(&op, &eigh(&op));
            }
        }
    }

    #[test]
    fn round_trip_at_dim_256() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let op = random_hermitian(256, &mut rng);
        check_invariants(&op, &eigh(&op));
    }

    #[test]
    fn degenerate_rank_deficient() {
        // projector of rank 2 in dimension 4 with complex phases
        let u = [C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.5, 0.0), C64::new(0.0, -0.5)];
        let w = [C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0)];
        let mut m = ComplexMatrix::outer(&u, &u);
        m.add_scaled(&ComplexMatrix::outer(&w, &w), C64::new(1.0, 0.0)).unwrap();
        let op = HermitianOperator::new(m).unwrap();
        let s = eigh(&op);
        let expected = [1.0, 1.0, 0.0, 0.0];
        for (a, b) in s.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        check_invariants(&op, &s);
    }
}
