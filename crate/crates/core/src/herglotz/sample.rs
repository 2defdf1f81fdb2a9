//! Seeded generators for members of the Donoghue classes.

use num_complex::Complex64;
use rand::Rng;

use super::{ClassKind, ScalarHerglotz, SpectralMeasure};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, I};
use crate::random::{self, SeededRng};
use crate::systems::{make_lsystem, LSystemModel, DEFAULT_TOLERANCE};

/// Class constant `a = Im V(i)` for a kind and kappa.
pub fn class_constant(kind: ClassKind, kappa: f64) -> f64 {
    match kind {
        ClassKind::M | ClassKind::MQ => 1.0,
        ClassKind::MKappa | ClassKind::MQKappa => (1.0 - kappa) / (1.0 + kappa),
        ClassKind::MInvKappa | ClassKind::MInvQKappa => (1.0 + kappa) / (1.0 - kappa),
    }
}

fn distinct_poles(rng: &mut SeededRng, atoms: usize, span: f64) -> Vec<f64> {
    let mut poles: Vec<f64> = (0..atoms).map(|_| rng.random_range(-span..span)).collect();
    poles.sort_by(f64::total_cmp);
    poles.dedup();
    poles
}

/// Random spectral form with `V(i) = q + i a`: poles uniform in `[-5, 5)`,
/// weights rescaled so that `sum w / (1 + l^2) = a`.
pub fn sample_member(rng: &mut SeededRng, q: f64, a: f64, atoms: usize) -> Result<ScalarHerglotz> {
    if !(a > 0.0) || atoms == 0 {
        return Err(Error::InvalidParameter("need a > 0 and at least one atom".into()));
    }
    let poles = distinct_poles(rng, atoms, 5.0);
    let raw: Vec<f64> = poles.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    let norm: f64 = poles.iter().zip(&raw).map(|(l, w)| w / (1.0 + l * l)).sum();
    let weights = raw.iter().map(|w| w * a / norm).collect();
    Ok(ScalarHerglotz::Spectral(SpectralMeasure::new(q, poles, weights)?))
}

/// Random scalar L-system whose impedance satisfies `V(i) = q + i a`.
///
/// The impedance of a finite L-system is the bare resolvent sum
/// `sum w / (l - z)`, so both `sum w l/(1+l^2) = q` and `sum w/(1+l^2) = a`
/// must be met by the weights. Positive and negative poles are rescaled as
/// two groups; draws where that has no positive solution are retried.
pub fn lsystem_with_value(rng: &mut SeededRng, n: usize, q: f64, a: f64) -> Result<LSystemModel> {
    if n < 2 || !(a > 0.0) {
        return Err(Error::InvalidParameter("need n >= 2 and a > 0".into()));
    }
    for _ in 0..100 {
        let poles = distinct_poles(rng, n, 5.0);
        if poles.len() != n || !poles.iter().any(|&l| l > 0.0) || !poles.iter().any(|&l| l < 0.0) {
            continue;
        }
        let raw: Vec<f64> = poles.iter().map(|_| rng.random_range(0.1..1.0)).collect();
        let (mut ap, mut an, mut pp, mut pn) = (0.0, 0.0, 0.0, 0.0);
        for (&l, &w) in poles.iter().zip(&raw) {
            let d = 1.0 + l * l;
            if l > 0.0 {
                ap += w / d;
                pp += w * l / d;
            } else {
                an += w / d;
                pn += w * l.abs() / d;
            }
        }
        // cp * pp - cn * pn = q and cp * ap + cn * an = a.
        let det = pp * an + pn * ap;
        let cp = (q * an + a * pn) / det;
        let cn = (a * pp - q * ap) / det;
        if !(cp > 0.0 && cn > 0.0) {
            continue;
        }
        let weights: Vec<f64> = poles
            .iter()
            .zip(&raw)
            .map(|(&l, &w)| w * if l > 0.0 { cp } else { cn })
            .collect();
        let u = random::unitary(rng, n);
        let diag: Vec<Complex64> = poles.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        let re_a = &(&u * &ComplexMatrix::from_diagonal(&diag)) * &u.adjoint();
        let k0 = ComplexMatrix::from_row_major(n, 1, weights.iter().map(|w| Complex64::new(w.sqrt(), 0.0)).collect())?;
        let k = &u * &k0;
        let a_main = &re_a.real_part() + &(&k * &k.adjoint()).scale(I);
        return make_lsystem(a_main, k, ComplexMatrix::identity(1), DEFAULT_TOLERANCE);
    }
    Err(Error::GenerationFailed { attempts: 100 })
}
