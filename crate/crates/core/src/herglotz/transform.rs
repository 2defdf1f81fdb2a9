//! Unimodular (Möbius) transformations of impedance functions and the angle
//! choices that negate the perturbation constant `Q`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ratio, ClosedForm, ScalarHerglotz};
use crate::error::{Error, Result};
use crate::numerics::I;

/// Transformation angle, normalized into `[0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite("alpha"));
        }
        let mut v = value.rem_euclid(PI);
        if v >= PI {
            v = 0.0;
        }
        Ok(Self(v))
    }

    /// Angle with `tan(alpha) = t`, shifted by `pi` when the arctangent is negative.
    pub fn from_tan(t: f64) -> Result<Self> {
        let a = t.atan();
        Self::new(if a < 0.0 { a + PI } else { a })
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `-e^{2i alpha}`, the constant the transfer function is multiplied by.
    pub fn unimodular_factor(self) -> Complex64 {
        -(I * (2.0 * self.0)).exp()
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

pub(crate) fn mobius_value(alpha: f64, v: Complex64, z: Complex64) -> Result<Complex64> {
    let (s, c) = alpha.sin_cos();
    ratio(c + s * v, s - c * v, z)
}

/// `z -> (cos a + sin a V(z)) / (sin a - cos a V(z))`. At `alpha = pi/2`
/// the input is returned unchanged.
pub fn mobius(v: &ScalarHerglotz, alpha: Alpha) -> ScalarHerglotz {
    if alpha.value() == FRAC_PI_2 {
        return v.clone();
    }
    ScalarHerglotz::Closed(ClosedForm::Mobius { alpha: alpha.value(), inner: Box::new(v.clone()) })
}

/// Selected angle plus the intermediate constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSelection {
    pub alpha: Alpha,
    pub tan_alpha: f64,
    /// Class constant `a = Im V(i)`.
    pub a: f64,
    /// `b = Q^2 + a^2 - 1`.
    pub b: f64,
}

fn nonzero_q(q: f64) -> Result<()> {
    if q == 0.0 {
        return Err(Error::QZero);
    }
    if !q.is_finite() {
        return Err(Error::NonFinite("Q"));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} outside [0, 1)")));
    }
    Ok(())
}

fn select(q: f64, a: f64) -> Result<AlphaSelection> {
    // (Q - 1)(Q + 1) is exact for Q = +-1, keeping b = a^2 to the last bit there.
    let b = (q - 1.0) * (q + 1.0) + a * a;
    let tan_alpha = b / (2.0 * q);
    Ok(AlphaSelection { alpha: Alpha::from_tan(tan_alpha)?, tan_alpha, a, b })
}

/// Angle mapping class `M^Q` onto `M^{-Q}`: `tan alpha = Q / 2`.
pub fn alpha_for_mq(q: f64) -> Result<AlphaSelection> {
    nonzero_q(q)?;
    let tan_alpha = q / 2.0;
    Ok(AlphaSelection { alpha: Alpha::from_tan(tan_alpha)?, tan_alpha, a: 1.0, b: q * q })
}

/// Angle mapping `M^Q_kappa` onto `M^{-Q}_kappa`, with `a = (1-k)/(1+k)`.
pub fn alpha_for_mq_kappa(q: f64, kappa: f64) -> Result<AlphaSelection> {
    nonzero_q(q)?;
    check_kappa(kappa)?;
    select(q, (1.0 - kappa) / (1.0 + kappa))
}

/// Angle mapping `M^{-1,Q}_kappa` onto `M^{-1,-Q}_kappa`, with `a = (1+k)/(1-k)`.
pub fn alpha_for_minv_q_kappa(q: f64, kappa: f64) -> Result<AlphaSelection> {
    nonzero_q(q)?;
    check_kappa(kappa)?;
    select(q, (1.0 + kappa) / (1.0 - kappa))
}

pub(crate) fn connection_m_value(q: f64, v10: Complex64, z: Complex64) -> Result<Complex64> {
    ratio(q * v10 - 2.0, q + 2.0 * v10, z)
}

pub(crate) fn connection_kappa_value(q: f64, b: f64, v10: Complex64, z: Complex64) -> Result<Complex64> {
    let num = q * q * q + q * q * v10 - b * q - q - 0.5 * b * v10;
    let den = q * q + q * v10 - 0.5 * b;
    ratio(num, den, z)
}

/// The class-`M` part of the transformed function, `V20 = (Q V10 - 2)/(Q + 2 V10)`.
pub fn connection_m(v10: &ScalarHerglotz, q: f64) -> Result<ScalarHerglotz> {
    nonzero_q(q)?;
    let at_i = v10.eval(I)?;
    if (at_i - I).norm() > 1e-9 {
        return Err(Error::InputNotClassM { value: at_i });
    }
    Ok(ScalarHerglotz::Closed(ClosedForm::ConnectionM { q, inner: Box::new(v10.clone()) }))
}

/// Connection formula for the kappa classes; `b` from the matching
/// [`AlphaSelection`].
pub fn connection_kappa(v10: &ScalarHerglotz, q: f64, b: f64) -> Result<ScalarHerglotz> {
    nonzero_q(q)?;
    if !b.is_finite() {
        return Err(Error::NonFinite("b"));
    }
    Ok(ScalarHerglotz::Closed(ClosedForm::ConnectionKappa { q, b, inner: Box::new(v10.clone()) }))
}
