//! Seeded random matrix draws used by the instance generators.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{hermitian_eigen, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_row_major(rows, cols, entries).expect("finite draws")
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    complex_matrix(rng, n, n).real_part()
}

/// Random unitary from the eigenvectors of a random Hermitian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    hermitian_eigen(&hermitian(rng, n)).expect("hermitian by construction").vectors
}

/// Orthogonal projection of the given rank onto a random subspace.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let u = unitary(rng, n);
    let diag: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(if k < rank { 1.0 } else { 0.0 }, 0.0))
        .collect();
    let p = &(&u * &ComplexMatrix::from_diagonal(&diag)) * &u.adjoint();
    // Exact self-adjointness; idempotence holds to rounding.
    p.real_part()
}

/// Diagonal matrix with random +-1 entries.
pub fn signature<R: Rng + ?Sized>(rng: &mut R, m: usize) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..m)
        .map(|_| Complex64::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0))
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Point in the upper half-plane, `|re| <= re_span`, `im in [im_lo, im_hi]`.
pub fn upper_half_plane_point<R: Rng + ?Sized>(rng: &mut R, re_span: f64, im_lo: f64, im_hi: f64) -> Complex64 {
    Complex64::new(rng.random_range(-re_span..=re_span), rng.random_range(im_lo..=im_hi))
}
