//! Controllers: F-systems with a constant unimodular transfer function.
//!
//! Coupling an L-system with the controller for angle `alpha` multiplies its
//! transfer function by `-e^{2i alpha}`, which acts on the impedance as the
//! Möbius map in [`crate::herglotz::mobius`].

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::coupling::{couple_ff, couple_ff_transfer_only, couple_lf, LFCoupling};
use crate::error::{Error, Result};
use crate::herglotz::{classify, classify_value, from_lsystem, mobius, Alpha, ClassKind, ClassLabel, DEFAULT_CLASS_EPSILON};
use crate::numerics::{c, solve, ComplexMatrix, I};
use crate::systems::{make_fsystem, FSystemModel, LSystemModel, TransferFunction, DEFAULT_TOLERANCE};

const CONTROLLER_TOLERANCE: f64 = 1e-12;
const DEGENERATE_ANGLE: f64 = 1e-13;

fn sample_points() -> [Complex64; 5] {
    [c(0.0, 0.0), c(1.0, 1.0), c(-2.0, 0.5), c(0.3, -1.7), c(4.0, 3.0)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    alpha: Alpha,
    realization: FSystemModel,
    expected_factor: Complex64,
}

impl Controller {
    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn realization(&self) -> &FSystemModel {
        &self.realization
    }

    /// `-e^{2i alpha}`.
    pub fn expected_factor(&self) -> Complex64 {
        self.expected_factor
    }
}

/// Scalar controller atom `M = [[t + i]], F = 0, K = J = 1`, transfer `(t - i)/(t + i)`.
fn atom(tan_alpha: f64) -> Result<FSystemModel> {
    let one = ComplexMatrix::scalar(c(1.0, 0.0));
    make_fsystem(ComplexMatrix::scalar(c(tan_alpha, 1.0)), ComplexMatrix::zeros(1, 1), one.clone(), one, DEFAULT_TOLERANCE)
}

/// Builds the controller for `alpha`.
///
/// `alpha = 0` and `alpha = pi/2` have no single-atom realization
/// (`B = -1` and `B = 1` respectively); they are FF-couplings:
/// `0 -> (-1+i) . (-1+i)` with transfer `i * i = -1`, and
/// `pi/2 -> (1+i) . (-1+i)` with transfer `(-i) * i = 1`.
/// A constant transfer of `-1` has no impedance, so the `alpha = 0` composite
/// has `Re M` singular and is kept without that certificate.
pub fn make_controller(alpha: Alpha) -> Result<Controller> {
    let a = alpha.value();
    let realization = if a < DEGENERATE_ANGLE || std::f64::consts::PI - a < DEGENERATE_ANGLE {
        let minus = atom(-1.0)?;
        couple_ff_transfer_only(&minus, &minus)?
    } else if (a - FRAC_PI_2).abs() < DEGENERATE_ANGLE {
        couple_ff(&atom(1.0)?, &atom(-1.0)?)?
    } else {
        atom(a.tan())?
    };
    let expected_factor = alpha.unimodular_factor();
    for z in sample_points() {
        let w = realization.transfer(z)?.get(0, 0);
        if (w - expected_factor).norm() > CONTROLLER_TOLERANCE {
            return Err(Error::InvariantViolated(format!(
                "controller transfer {w} differs from -e^(2i alpha) = {expected_factor} at z = {z}"
            )));
        }
    }
    Ok(Controller { alpha, realization, expected_factor })
}

/// F-system with `F = 0` whose transfer function is the constant J-unitary `b`:
/// `C = i (B - I)(B + I)^-1 J`, `M = K C^-1 (I + i C J) K*`.
pub fn realize_constant_junitary(b: &ComplexMatrix, j: &ComplexMatrix, k: Option<&ComplexMatrix>) -> Result<FSystemModel> {
    let m = b.rows();
    if !b.is_square() || j.shape() != b.shape() {
        return Err(Error::DimensionMismatch("B and J must be square of equal size".into()));
    }
    let id = ComplexMatrix::identity(m);
    let k = k.cloned().unwrap_or_else(|| id.clone());
    if k.shape() != b.shape() {
        return Err(Error::DimensionMismatch("K must be m x m".into()));
    }
    let residual = (&(&b.adjoint() * j) * b).distance(j);
    if residual > DEFAULT_TOLERANCE {
        return Err(Error::NotJUnitary { residual });
    }
    if solve(&(b - &id), &id).is_err() || solve(&(b + &id), &id).is_err() {
        return Err(Error::EigenvalueAtPlusMinusOne);
    }
    let core = solve(&(b + &id).adjoint(), &(b - &id).adjoint())?.adjoint(); // (B - I)(B + I)^-1
    let cmat = (&core * j).scale(I);
    let herm = cmat.hermitian_residual();
    if herm > DEFAULT_TOLERANCE {
        return Err(Error::InvariantViolated(format!("C is not self-adjoint (residual {herm:e})")));
    }
    let c_inv_term = solve(&cmat, &(&id + &(&cmat * j).scale(I))).map_err(|_| Error::EigenvalueAtPlusMinusOne)?;
    let main = &(&k * &c_inv_term) * &k.adjoint();
    let sys = make_fsystem(main, ComplexMatrix::zeros(m, m), k, j.clone(), DEFAULT_TOLERANCE)?;
    for z in sample_points() {
        let w = sys.transfer(z)?;
        if w.distance(b) > DEFAULT_TOLERANCE {
            return Err(Error::InvariantViolated(format!("realized transfer differs from B at z = {z}")));
        }
    }
    Ok(sys)
}

/// LF-coupling of `l` with the controller for `alpha`.
pub fn unimodular_transform(l: &LSystemModel, alpha: Alpha) -> Result<LFCoupling> {
    if l.io_dim() != 1 {
        return Err(Error::ChannelNotScalar { m: l.io_dim() });
    }
    let controller = make_controller(alpha)?;
    couple_lf(l, controller.realization())
}

/// Max over `zs` of `|W_a(z) - W_b(z)|_inf`.
pub fn check_equivalence(a: &dyn TransferFunction, b: &dyn TransferFunction, zs: &[Complex64]) -> Result<f64> {
    zs.iter().try_fold(0.0f64, |acc, &z| Ok(acc.max(a.transfer_at(z)?.distance(&b.transfer_at(z)?))))
}

/// Couples an L-system whose impedance lies in class `M` with the controller
/// for `alpha` and classifies the coupled impedance at `i`; the result must
/// again be class `M`. At each point of `zs` the coupled impedance is also
/// compared with the Möbius image of the original impedance.
pub fn absorption_check(l: &LSystemModel, alpha: Alpha, zs: &[Complex64]) -> Result<ClassLabel> {
    let v = from_lsystem(l)?;
    let before = classify(&v, DEFAULT_CLASS_EPSILON)?;
    if before.kind != ClassKind::M {
        return Err(Error::InputNotClassM { value: before.value_at_i });
    }
    let coupled = unimodular_transform(l, alpha)?;
    let after = classify_value(coupled.impedance(I)?.get(0, 0), DEFAULT_CLASS_EPSILON)?;
    if after.kind != ClassKind::M {
        return Err(Error::InvariantViolated(format!("coupled impedance left class M: V(i) = {}", after.value_at_i)));
    }
    let image = mobius(&v, alpha);
    for &z in zs {
        let lhs = coupled.impedance(z)?.get(0, 0);
        let rhs = image.eval(z)?;
        if (lhs - rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
            return Err(Error::InvariantViolated(format!("coupled impedance {lhs} != Möbius image {rhs} at z = {z}")));
        }
    }
    Ok(after)
}
