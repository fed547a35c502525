#![allow(dead_code)]

use qms_core::families;
use qms_core::quantum::{DensityMatrix, ProjectiveMeasurement};
use qms_core::C64;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

fn normalize(v: &mut [C64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= n);
}

/// Haar-random pure state over the given party dimensions.
pub fn random_pure<R: Rng>(party_dims: &[usize], rng: &mut R) -> DensityMatrix {
    let dim = party_dims.iter().product();
    let mut v = gaussian_vector(dim, rng);
    normalize(&mut v);
    DensityMatrix::from_pure(&v, party_dims.to_vec()).unwrap()
}

/// Random mixture of a few pure states.
pub fn random_mixed<R: Rng>(party_dims: &[usize], rng: &mut R) -> DensityMatrix {
    let mut rho = random_pure(party_dims, rng);
    for _ in 0..3 {
        let w = rng.random::<f64>();
        rho = rho.mix(&random_pure(party_dims, rng), w).unwrap();
    }
    rho
}

/// Random orthonormal basis by Gram-Schmidt on Gaussian vectors.
pub fn random_measurement<R: Rng>(dim: usize, rng: &mut R) -> ProjectiveMeasurement {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = gaussian_vector(dim, rng);
        for b in &basis {
            let proj: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
        normalize(&mut v);
        basis.push(v);
    }
    ProjectiveMeasurement::from_basis_unlabelled(basis).unwrap()
}

pub fn random_product_state<R: Rng>(dims: [usize; 2], rng: &mut R) -> DensityMatrix {
    families::product(&[random_mixed(&[dims[0]], rng), random_mixed(&[dims[1]], rng)]).unwrap()
}
