//! Seeded random states, observables and strategies for sampling checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eigh, kron, ComplexMatrix, HermitianOperator, C64};
use crate::optimize::optimal_measurement;
use crate::pauli::{SignVector, INPUTS};
use crate::protocol::{Measurement, PreparedStrategy, Strategy};

/// Uniformly random unit vector in `C^d`.
pub fn unit_vector(d: usize, rng: &mut impl Rng) -> Vec<C64> {
    let v: Vec<C64> = (0..d)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn pure_state(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    HermitianOperator::projector(&unit_vector(d, rng))
}

pub fn gue(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        m[(r, r)] = C64::new(rng.sample(StandardNormal), 0.0);
        for c in r + 1..d {
            let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    HermitianOperator::new(m).expect("Hermitian by construction")
}

/// `U diag(u) U^dagger` with eigenvectors of a GUE draw and `u ~ U[-1, 1]`.
pub fn observable(d: usize, rng: &mut impl Rng) -> HermitianOperator {
    let spec = eigh(&gue(d, rng));
    let u: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let v = &spec.eigenvectors;
    let m = ComplexMatrix::from_fn(d, d, |r, c| (0..d).map(|k| v[(r, k)] * v[(c, k)].conj() * u[k]).sum());
    let sym = m.add(&m.adjoint()).expect("square").scale_real(0.5);
    HermitianOperator::new(sym).expect("symmetrized")
}

/// Random pure product encodings with arbitrary joint decoders.
pub fn product_strategy(d: usize, rng: &mut impl Rng) -> Strategy {
    let states_a = (0..INPUTS).map(|_| pure_state(d, rng)).collect();
    let states_b = (0..INPUTS).map(|_| pure_state(d, rng)).collect();
    let decoders = Measurement::General((0..INPUTS).map(|_| observable(d * d, rng)).collect());
    Strategy::Prepared(PreparedStrategy {
        n_copies: 1,
        channel_dim: d,
        states_a,
        states_b,
        decoders,
    })
}

/// Random pure product encodings with the optimal decoders for `signs`.
pub fn product_strategy_optimal(d: usize, signs: &SignVector, rng: &mut impl Rng) -> Strategy {
    let states_a: Vec<HermitianOperator> = (0..INPUTS).map(|_| pure_state(d, rng)).collect();
    let states_b: Vec<HermitianOperator> = (0..INPUTS).map(|_| pure_state(d, rng)).collect();
    let decoders = optimal_measurement(&states_a, &states_b, signs).expect("consistent inputs");
    Strategy::Prepared(PreparedStrategy {
        n_copies: 1,
        channel_dim: d,
        states_a,
        states_b,
        decoders,
    })
}

/// Convex mixture of `terms` random pure product states on `C^d (x) C^d`.
pub fn separable_state(d: usize, terms: usize, rng: &mut impl Rng) -> HermitianOperator {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.0..1.0f64) + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for w in weights {
        let a = pure_state(d, rng);
        let b = pure_state(d, rng);
        let prod = kron(a.matrix(), b.matrix()).expect("small");
        acc.add_scaled(&prod, C64::new(w / total, 0.0)).expect("equal dimensions");
    }
    let sym = acc.add(&acc.adjoint()).expect("square").scale_real(0.5);
    HermitianOperator::new(sym).expect("symmetrized")
}
