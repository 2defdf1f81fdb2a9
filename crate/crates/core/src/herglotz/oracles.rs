//! Closed-form impedance and transfer functions of the transmission-line
//! examples, used as exact references.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use super::transform::Alpha;
use super::{ratio, ClosedForm, ScalarHerglotz};
use crate::error::{Error, Result};
use crate::numerics::{c, I};

pub(crate) fn theta0_value(l: f64, z: Complex64) -> Result<Complex64> {
    let e = (I * z * l).exp();
    ratio(I * (1.0 - e), 1.0 + e, z).map_err(|_| Error::PoleHit { z })
}

pub(crate) fn v1_value(z: Complex64) -> Result<Complex64> {
    Ok(1.0 + theta0_value(LN_2, z)?)
}

pub(crate) fn v2_value(z: Complex64) -> Result<Complex64> {
    let e = (I * z * LN_2).exp();
    let num = c(19.0, 1.0) + c(19.0, -1.0) * e;
    let den = c(17.0, 18.0) + c(17.0, -18.0) * e;
    Ok(-ratio(num, den, z)?)
}

/// Impedance `i (1 - e^{izl}) / (1 + e^{izl})` of the unperturbed line of length `l`.
pub fn oracle_theta0(l: f64) -> Result<ScalarHerglotz> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!("line length l = {l} must be positive")));
    }
    Ok(ScalarHerglotz::Closed(ClosedForm::Theta0 { l }))
}

/// Transfer function `e^{i (xi - z) l}`.
pub fn oracle_theta0_w(l: f64, xi: f64, z: Complex64) -> Complex64 {
    (I * (xi - z) * l).exp()
}

/// Angle of the unimodular factor `e^{i xi l}`: `(xi l - pi) / 2 mod pi`.
pub fn oracle_theta0_alpha(l: f64, xi: f64) -> Result<Alpha> {
    Alpha::new((xi * l - std::f64::consts::PI) / 2.0)
}

pub fn oracle_v1() -> ScalarHerglotz {
    ScalarHerglotz::Closed(ClosedForm::V1)
}

pub fn oracle_v2() -> ScalarHerglotz {
    ScalarHerglotz::Closed(ClosedForm::V2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::{classify, ClassKind, DEFAULT_CLASS_EPSILON};

    #[test]
    fn theta0_at_ln2() {
        let v = oracle_theta0(LN_2).unwrap();
        let at_i = v.eval(I).unwrap();
        assert!((at_i - c(0.0, 1.0 / 3.0)).norm() < 1e-15);
        let label = classify(&v, DEFAULT_CLASS_EPSILON).unwrap();
        assert_eq!(label.kind, ClassKind::MKappa);
        assert!((label.kappa - 0.5).abs() < 1e-15);
        assert!(oracle_theta0(0.0).is_err());
    }

    #[test]
    fn theta0_kappa_is_exp_minus_l() {
        for l in [0.1, 0.5, 1.0, 2.5] {
            let label = classify(&oracle_theta0(l).unwrap(), DEFAULT_CLASS_EPSILON).unwrap();
            assert!((label.kappa - (-l).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn theta0_transfer_and_cayley() {
        assert_eq!(oracle_theta0_w(1.3, 0.0, c(0.0, 0.0)), c(1.0, 0.0));
        // V = i (W - 1)/(W + 1) with xi = 0.
        let l = 0.8;
        let z = c(0.4, 0.9);
        let w = oracle_theta0_w(l, 0.0, z);
        let v = oracle_theta0(l).unwrap().eval(z).unwrap();
        assert!((v - I * (w - 1.0) / (w + 1.0)).norm() < 1e-14);
    }

    #[test]
    fn theta0_alpha_reproduces_factor() {
        let (l, xi) = (0.7, 2.0);
        let alpha = oracle_theta0_alpha(l, xi).unwrap();
        assert!((alpha.unimodular_factor() - (I * xi * l).exp()).norm() < 1e-15);
    }

    #[test]
    fn v1_v2_at_i() {
        assert!((oracle_v1().eval(I).unwrap() - c(1.0, 1.0 / 3.0)).norm() < 1e-15);
        let v2 = oracle_v2().eval(I).unwrap();
        assert!((v2 + c(57.0, 1.0) / c(51.0, 18.0)).norm() < 1e-15);
        assert!((v2 - c(-1.0, 1.0 / 3.0)).norm() < 1e-15);
    }
}
