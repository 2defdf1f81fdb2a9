//! FF- and LF-couplings.
//!
//! Both couplings put the two state spaces side by side and add the
//! interaction block `2i K1 J K2*` in the upper-right corner, so that the
//! coupled transfer function is the product of the factors' transfer
//! functions. The orientation is fixed: left factor first.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{c, solve, ComplexMatrix, I};
use crate::systems::{make_fsystem, FSystemModel, LSystemModel, TransferFunction, DEFAULT_TOLERANCE};

const DIRECTION_MATCH_TOLERANCE: f64 = 1e-12;

/// LF-coupling of an L-system (left) with an F-system (right).
#[derive(Debug, Clone, PartialEq)]
pub struct LFCoupling {
    big_m: ComplexMatrix,
    big_f: ComplexMatrix,
    k: ComplexMatrix,
    j: ComplexMatrix,
    left: LSystemModel,
    right: FSystemModel,
}

fn same_direction(j1: &ComplexMatrix, j2: &ComplexMatrix) -> Result<()> {
    if j1.shape() != j2.shape() || j1.distance(j2) > DIRECTION_MATCH_TOLERANCE {
        return Err(Error::DirectionMismatch);
    }
    Ok(())
}

/// `[[X1, 2i K1 J K2*], [0, X2]]`.
fn coupled_main(x1: &ComplexMatrix, x2: &ComplexMatrix, k1: &ComplexMatrix, k2: &ComplexMatrix, j: &ComplexMatrix) -> ComplexMatrix {
    let upper = (&(k1 * j) * &k2.adjoint()).scale(c(0.0, 2.0));
    let lower = ComplexMatrix::zeros(x2.rows(), x1.cols());
    ComplexMatrix::from_blocks(x1, &upper, &lower, x2).expect("coupling blocks are consistent")
}

/// FF-coupling `S1 . S2`.
pub fn couple_ff(s1: &FSystemModel, s2: &FSystemModel) -> Result<FSystemModel> {
    same_direction(s1.j(), s2.j())?;
    let j = s1.j();
    let m = coupled_main(s1.m(), s2.m(), s1.k(), s2.k(), j);
    let f = ComplexMatrix::block_diag(s1.f(), s2.f());
    let k = ComplexMatrix::vstack(s1.k(), s2.k())?;
    make_fsystem(m, f, k, j.clone(), DEFAULT_TOLERANCE)
}

/// FF-coupling that tolerates an empty `rho(Re M, F)`; see
/// [`crate::systems::make_fsystem_transfer_only`].
pub(crate) fn couple_ff_transfer_only(s1: &FSystemModel, s2: &FSystemModel) -> Result<FSystemModel> {
    same_direction(s1.j(), s2.j())?;
    let j = s1.j();
    let m = coupled_main(s1.m(), s2.m(), s1.k(), s2.k(), j);
    let f = ComplexMatrix::block_diag(s1.f(), s2.f());
    let k = ComplexMatrix::vstack(s1.k(), s2.k())?;
    crate::systems::make_fsystem_transfer_only(m, f, k, j.clone(), DEFAULT_TOLERANCE)
}

/// LF-coupling `L . R`; `Im M = K J K*` is re-verified on the result.
pub fn couple_lf(left: &LSystemModel, right: &FSystemModel) -> Result<LFCoupling> {
    same_direction(left.j(), right.j())?;
    let j = left.j().clone();
    let big_m = coupled_main(left.a(), right.m(), left.k(), right.k(), &j);
    let big_f = ComplexMatrix::block_diag(&ComplexMatrix::identity(left.state_dim()), right.f());
    let k = ComplexMatrix::vstack(left.k(), right.k())?;
    let coupling = LFCoupling { big_m, big_f, k, j, left: left.clone(), right: right.clone() };
    let residual = coupling.conservativity_residual();
    if residual > DEFAULT_TOLERANCE * (1.0 + coupling.big_m.norm_inf()) {
        return Err(Error::ConservativityViolated { residual });
    }
    Ok(coupling)
}

impl LFCoupling {
    pub fn big_m(&self) -> &ComplexMatrix {
        &self.big_m
    }

    pub fn big_f(&self) -> &ComplexMatrix {
        &self.big_f
    }

    pub fn k(&self) -> &ComplexMatrix {
        &self.k
    }

    pub fn j(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn left(&self) -> &LSystemModel {
        &self.left
    }

    pub fn right(&self) -> &FSystemModel {
        &self.right
    }

    pub fn io_dim(&self) -> usize {
        self.j.rows()
    }

    /// `|Im M - K J K*|_inf`.
    pub fn conservativity_residual(&self) -> f64 {
        let kjk = &(&self.k * &self.j) * &self.k.adjoint();
        self.big_m.imag_part().distance(&kjk)
    }

    pub fn transfer(&self, z: Complex64) -> Result<ComplexMatrix> {
        let x = solve(&(&self.big_m - &self.big_f.scale(z)), &self.k).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::SpectrumHit { z },
            other => other,
        })?;
        Ok(ComplexMatrix::identity(self.io_dim()) - (&(&self.k.adjoint() * &x) * &self.j).scale(c(0.0, 2.0)))
    }

    /// Impedance of the coupling. For `m > 1` the factor
    /// `I - V_F(z) J V_L(z) J` must also be invertible at `z`; in the scalar
    /// case it never vanishes on the upper half-plane, so the test is skipped.
    pub fn impedance(&self, z: Complex64) -> Result<ComplexMatrix> {
        let spectrum = |e| match e {
            Error::SingularMatrix { .. } => Error::SpectrumHit { z },
            other => other,
        };
        if self.io_dim() > 1 {
            let vl = self.left.impedance(z)?;
            let vf = self.right.impedance(z)?;
            let factor = ComplexMatrix::identity(self.io_dim()) - &(&(&vf * &self.j) * &vl) * &self.j;
            if solve(&factor, &ComplexMatrix::identity(self.io_dim())).is_err() {
                return Err(Error::FactorNotInvertible { z });
            }
        }
        let x = solve(&(&self.big_m.real_part() - &self.big_f.scale(z)), &self.k).map_err(spectrum)?;
        Ok(&self.k.adjoint() * &x)
    }
}

impl TransferFunction for LFCoupling {
    fn transfer_at(&self, z: Complex64) -> Result<ComplexMatrix> {
        self.transfer(z)
    }
}

pub fn lf_transfer(coupling: &LFCoupling, z: Complex64) -> Result<ComplexMatrix> {
    coupling.transfer(z)
}

pub fn lf_impedance(coupling: &LFCoupling, z: Complex64) -> Result<ComplexMatrix> {
    coupling.impedance(z)
}

/// Max over `zs` of `|W_LF(z) - W_L(z) W_F(z)|_inf`.
pub fn verify_multiplication(left: &LSystemModel, right: &FSystemModel, zs: &[Complex64]) -> Result<f64> {
    let coupling = couple_lf(left, right)?;
    zs.iter().try_fold(0.0f64, |acc, &z| {
        let product = &left.transfer(z)? * &right.transfer(z)?;
        Ok(acc.max(coupling.transfer(z)?.distance(&product)))
    })
}

/// FF analogue of [`verify_multiplication`].
pub fn verify_ff_multiplication(s1: &FSystemModel, s2: &FSystemModel, zs: &[Complex64]) -> Result<f64> {
    let coupled = couple_ff(s1, s2)?;
    zs.iter().try_fold(0.0f64, |acc, &z| {
        let product = &s1.transfer(z)? * &s2.transfer(z)?;
        Ok(acc.max(coupled.transfer(z)?.distance(&product)))
    })
}

/// Impedance of the coupling recovered from its transfer function,
/// `i (W + I)^-1 (W - I) J`; used to cross-check [`LFCoupling::impedance`].
pub fn impedance_via_transfer(coupling: &LFCoupling, z: Complex64) -> Result<ComplexMatrix> {
    let w = coupling.transfer(z)?;
    let id = ComplexMatrix::identity(w.rows());
    Ok((&solve(&(&w + &id), &(&w - &id))? * &coupling.j).scale(I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{make_lsystem, DEFAULT_TOLERANCE};

    fn s(z: Complex64) -> ComplexMatrix {
        ComplexMatrix::scalar(z)
    }

    fn atom(re: f64) -> FSystemModel {
        make_fsystem(s(c(re, 1.0)), s(c(0.0, 0.0)), s(c(1.0, 0.0)), s(c(1.0, 0.0)), DEFAULT_TOLERANCE).unwrap()
    }

    fn scalar_l() -> LSystemModel {
        make_lsystem(s(I), s(c(1.0, 0.0)), s(c(1.0, 0.0)), DEFAULT_TOLERANCE).unwrap()
    }

    #[test]
    fn ff_coupling_of_atoms() {
        let ff = couple_ff(&atom(1.0), &atom(-1.0)).unwrap();
        let expected = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(0.0, 0.0), c(-1.0, 1.0)]]).unwrap();
        assert_eq!(ff.m(), &expected);
        assert_eq!(ff.f(), &ComplexMatrix::zeros(2, 2));
        for z in [c(0.0, 0.0), c(1.5, 2.0), c(-3.0, -0.5)] {
            assert!((ff.transfer(z).unwrap().get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        }
        assert_eq!(couple_ff(&atom(-1.0), &atom(-1.0)).unwrap_err(), Error::EmptyResolventSet("Re M - zF"));
        let twice = couple_ff_transfer_only(&atom(-1.0), &atom(-1.0)).unwrap();
        assert!((twice.transfer(c(0.2, 0.1)).unwrap().get(0, 0) + 1.0).norm() < 1e-15);
        let zs = [c(0.0, 1.0), c(2.0, 0.5)];
        assert!(verify_ff_multiplication(&atom(1.0), &atom(-1.0), &zs).unwrap() < 1e-12);
    }

    #[test]
    fn mismatched_directions_are_rejected() {
        let neg = make_fsystem(s(c(1.0, -1.0)), s(c(0.0, 0.0)), s(c(1.0, 0.0)), s(c(-1.0, 0.0)), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(couple_ff(&atom(1.0), &neg).unwrap_err(), Error::DirectionMismatch);
        assert_eq!(couple_lf(&scalar_l(), &neg).unwrap_err(), Error::DirectionMismatch);
    }

    #[test]
    fn lf_coupling_blocks() {
        let lf = couple_lf(&scalar_l(), &atom(1.0)).unwrap();
        let m = ComplexMatrix::from_rows(&[vec![I, c(0.0, 2.0)], vec![c(0.0, 0.0), c(1.0, 1.0)]]).unwrap();
        assert_eq!(lf.big_m(), &m);
        assert_eq!(lf.big_f(), &ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]));
        assert_eq!(lf.k(), &ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap());
        let im = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(lf.big_m().imag_part().distance(&im) < 1e-15);
    }

    #[test]
    fn lf_transfer_and_impedance_example() {
        let lf = couple_lf(&scalar_l(), &atom(1.0)).unwrap();
        let z = c(0.0, 2.0);
        assert!((lf.transfer(z).unwrap().get(0, 0) - c(0.0, -3.0)).norm() < 1e-14);
        assert!((lf.impedance(z).unwrap().get(0, 0) - c(0.6, 0.8)).norm() < 1e-14);
        assert!(verify_multiplication(&scalar_l(), &atom(1.0), &[z]).unwrap() < 1e-14);
        assert_eq!(lf.transfer(I).unwrap_err(), Error::SpectrumHit { z: I });
        for z in [c(0.3, 0.2), c(-2.0, 1.0), c(4.0, 0.01)] {
            let expected = scalar_l().transfer(z).unwrap().get(0, 0) * -I;
            assert!((lf.transfer(z).unwrap().get(0, 0) - expected).norm() < 1e-12);
            assert!(lf.impedance(z).unwrap().get(0, 0).im >= 0.0);
            let via = impedance_via_transfer(&lf, z).unwrap();
            assert!(via.distance(&lf.impedance(z).unwrap()) < 1e-12);
        }
    }
}
