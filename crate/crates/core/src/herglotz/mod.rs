//! Scalar Herglotz–Nevanlinna functions and Donoghue classes.
//!
//! A [`ScalarHerglotz`] is either a finite spectral form
//!
//! ```text
//! V(z) = Q + sum_k w_k (1/(l_k - z) - l_k/(1 + l_k^2))
//! ```
//!
//! or a named closed-form expression (oracles and transformed functions).
//! Classification looks only at the value `V(i) = Q + i a`.

mod oracles;
pub mod sample;
mod transform;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigen, I};
use crate::systems::LSystemModel;

pub use oracles::{oracle_theta0, oracle_theta0_alpha, oracle_theta0_w, oracle_v1, oracle_v2};
pub use transform::{
    alpha_for_minv_q_kappa, alpha_for_mq, alpha_for_mq_kappa, connection_kappa, connection_m, mobius, Alpha,
    AlphaSelection,
};

/// Default band deciding `Q = 0` and `a = 1`.
pub const DEFAULT_CLASS_EPSILON: f64 = 1e-9;

/// Weights below this are dropped by [`from_lsystem`].
pub const WEIGHT_CUTOFF: f64 = 1e-14;

const POLE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectral")]
pub struct SpectralMeasure {
    q: f64,
    poles: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSpectral {
    q: f64,
    poles: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawSpectral> for SpectralMeasure {
    type Error = Error;
    fn try_from(raw: RawSpectral) -> Result<Self> {
        SpectralMeasure::new(raw.q, raw.poles, raw.weights)
    }
}

impl SpectralMeasure {
    pub fn new(q: f64, poles: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if poles.is_empty() || poles.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "spectral form needs equally many poles and weights (>= 1), got {} and {}",
                poles.len(),
                weights.len()
            )));
        }
        if !q.is_finite() || !poles.iter().chain(&weights).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("spectral form"));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidParameter("weights must be strictly positive".into()));
        }
        if poles.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidParameter("poles must be strictly increasing".into()));
        }
        Ok(Self { q, poles, weights })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `sum_k w_k / (1 + l_k^2)`, the class constant `a`.
    pub fn normalization(&self) -> f64 {
        self.poles.iter().zip(&self.weights).map(|(l, w)| w / (1.0 + l * l)).sum()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(self.q, 0.0);
        for (&l, &w) in self.poles.iter().zip(&self.weights) {
            let d = Complex64::new(l, 0.0) - z;
            if d.norm() <= POLE_TOLERANCE * (1.0 + l.abs()) {
                return Err(Error::PoleHit { z });
            }
            acc += w * (1.0 / d - l / (1.0 + l * l));
        }
        Ok(acc)
    }
}

/// Named closed-form functions. Nested variants wrap another function so
/// transformed functions stay serializable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `i (1 - e^{izl}) / (1 + e^{izl})`.
    Theta0 { l: f64 },
    /// `1 + i (1 - 2^{iz}) / (1 + 2^{iz})`.
    V1,
    /// `-(19 + i + (19 - i) 2^{iz}) / (17 + 18i + (17 - 18i) 2^{iz})`.
    V2,
    /// `q + inner(z)`.
    Shifted { q: f64, inner: Box<ScalarHerglotz> },
    /// `(cos a + sin a V) / (sin a - cos a V)`.
    Mobius { alpha: f64, inner: Box<ScalarHerglotz> },
    /// `(Q V - 2) / (Q + 2 V)`.
    ConnectionM { q: f64, inner: Box<ScalarHerglotz> },
    /// `(Q^3 + Q^2 V - bQ - Q - (b/2) V) / (Q^2 + Q V - b/2)`.
    ConnectionKappa { q: f64, b: f64, inner: Box<ScalarHerglotz> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ScalarHerglotz {
    Spectral(SpectralMeasure),
    Closed(ClosedForm),
}

pub(crate) fn ratio(num: Complex64, den: Complex64, z: Complex64) -> Result<Complex64> {
    let out = num / den;
    if den == Complex64::new(0.0, 0.0) || !(out.re.is_finite() && out.im.is_finite()) {
        return Err(Error::DenominatorZero { z });
    }
    Ok(out)
}

impl ScalarHerglotz {
    pub fn spectral(q: f64, poles: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Ok(Self::Spectral(SpectralMeasure::new(q, poles, weights)?))
    }

    /// `q + self`.
    pub fn shifted(self, q: f64) -> Self {
        Self::Closed(ClosedForm::Shifted { q, inner: Box::new(self) })
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Self::Spectral(s) => s.eval(z),
            Self::Closed(form) => match form {
                ClosedForm::Theta0 { l } => oracles::theta0_value(*l, z),
                ClosedForm::V1 => oracles::v1_value(z),
                ClosedForm::V2 => oracles::v2_value(z),
                ClosedForm::Shifted { q, inner } => Ok(*q + inner.eval(z)?),
                ClosedForm::Mobius { alpha, inner } => transform::mobius_value(*alpha, inner.eval(z)?, z),
                ClosedForm::ConnectionM { q, inner } => transform::connection_m_value(*q, inner.eval(z)?, z),
                ClosedForm::ConnectionKappa { q, b, inner } => {
                    transform::connection_kappa_value(*q, *b, inner.eval(z)?, z)
                }
            },
        }
    }
}

pub fn eval(v: &ScalarHerglotz, z: Complex64) -> Result<Complex64> {
    v.eval(z)
}

/// Spectral form of the impedance of a scalar-channel L-system, from the
/// eigendecomposition of `Re A`. Degenerate eigenvalues are merged.
pub fn from_lsystem(s: &LSystemModel) -> Result<ScalarHerglotz> {
    if s.io_dim() != 1 {
        return Err(Error::ChannelNotScalar { m: s.io_dim() });
    }
    let eig = hermitian_eigen(&s.a().real_part())?;
    let overlaps = &eig.vectors.adjoint() * s.k();
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(eig.values.len());
    for (idx, &l) in eig.values.iter().enumerate() {
        let w = overlaps.get(idx, 0).norm_sqr();
        match atoms.last_mut() {
            Some((pl, pw)) if (l - *pl).abs() <= 1e-12 * (1.0 + l.abs()) => {
                let total = *pw + w;
                if total > 0.0 {
                    *pl = (*pl * *pw + l * w) / total;
                }
                *pw = total;
            }
            _ => atoms.push((l, w)),
        }
    }
    atoms.retain(|&(_, w)| w >= WEIGHT_CUTOFF);
    if atoms.is_empty() {
        return Err(Error::InvalidParameter("impedance vanishes identically (K = 0)".into()));
    }
    let q = atoms.iter().map(|(l, w)| w * l / (1.0 + l * l)).sum();
    let (poles, weights) = atoms.into_iter().unzip();
    ScalarHerglotz::spectral(q, poles, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassKind {
    #[serde(rename = "M")]
    M,
    #[serde(rename = "M_kappa")]
    MKappa,
    #[serde(rename = "M_inv_kappa")]
    MInvKappa,
    #[serde(rename = "M_Q")]
    MQ,
    #[serde(rename = "M_Q_kappa")]
    MQKappa,
    #[serde(rename = "M_inv_Q_kappa")]
    MInvQKappa,
}

impl ClassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::M => "M",
            ClassKind::MKappa => "M_kappa",
            ClassKind::MInvKappa => "M_inv_kappa",
            ClassKind::MQ => "M_Q",
            ClassKind::MQKappa => "M_Q_kappa",
            ClassKind::MInvQKappa => "M_inv_Q_kappa",
        }
    }

    pub fn has_q(self) -> bool {
        matches!(self, ClassKind::MQ | ClassKind::MQKappa | ClassKind::MInvQKappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassLabel {
    pub kind: ClassKind,
    pub q: f64,
    pub a: f64,
    pub kappa: f64,
    pub value_at_i: Complex64,
    pub epsilon: f64,
}

/// Classifies from the value `V(i) = Q + i a` alone.
pub fn classify_value(value_at_i: Complex64, eps: f64) -> Result<ClassLabel> {
    let (q, a) = (value_at_i.re, value_at_i.im);
    if !(a > 0.0) {
        return Err(Error::NotHerglotzAtI { im: a });
    }
    let q_zero = q.abs() <= eps;
    let (kappa, band) = if (a - 1.0).abs() <= eps {
        (0.0, 0)
    } else if a < 1.0 {
        ((1.0 - a) / (1.0 + a), -1)
    } else {
        ((a - 1.0) / (a + 1.0), 1)
    };
    let kind = match (q_zero, band) {
        (true, 0) => ClassKind::M,
        (true, -1) => ClassKind::MKappa,
        (true, _) => ClassKind::MInvKappa,
        (false, 0) => ClassKind::MQ,
        (false, -1) => ClassKind::MQKappa,
        (false, _) => ClassKind::MInvQKappa,
    };
    Ok(ClassLabel { kind, q, a, kappa, value_at_i, epsilon: eps })
}

pub fn classify(v: &ScalarHerglotz, eps: f64) -> Result<ClassLabel> {
    classify_value(v.eval(I)?, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{c, ComplexMatrix};
    use crate::systems::{make_lsystem, make_lsystem_random, DirectionChoice, DEFAULT_TOLERANCE};

    #[test]
    fn spectral_eval_examples() {
        let v = ScalarHerglotz::spectral(0.0, vec![0.0], vec![1.0]).unwrap();
        assert!((v.eval(I).unwrap() - I).norm() < 1e-15);
        let z = c(0.3, 1.7);
        assert!((v.eval(z).unwrap() + 1.0 / z).norm() < 1e-15);

        // Q = sum w l/(1+l^2) = 1/2 turns the form into the raw resolvent sum.
        let v = ScalarHerglotz::spectral(0.5, vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!((v.eval(I).unwrap() - c(0.5, 1.5)).norm() < 1e-15);
        let raw = 1.0 / (-z) + 1.0 / (1.0 - z);
        assert!((v.eval(z).unwrap() - raw).norm() < 1e-15);

        assert_eq!(v.eval(c(1.0, 0.0)).unwrap_err(), Error::PoleHit { z: c(1.0, 0.0) });
    }

    #[test]
    fn spectral_form_rejects_bad_measures() {
        assert!(ScalarHerglotz::spectral(0.0, vec![], vec![]).is_err());
        assert!(ScalarHerglotz::spectral(0.0, vec![0.0], vec![0.0]).is_err());
        assert!(ScalarHerglotz::spectral(0.0, vec![1.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(ScalarHerglotz::spectral(0.0, vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn from_lsystem_examples() {
        let one = ComplexMatrix::scalar(c(1.0, 0.0));
        let s = make_lsystem(ComplexMatrix::scalar(I), one.clone(), one.clone(), DEFAULT_TOLERANCE).unwrap();
        let ScalarHerglotz::Spectral(m) = from_lsystem(&s).unwrap() else { panic!() };
        assert_eq!(m.poles(), &[0.0]);
        assert!((m.weights()[0] - 1.0).abs() < 1e-15);
        assert_eq!(m.q(), 0.0);

        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(1.0, 1.0)]]).unwrap();
        let k = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
        let s = make_lsystem(a, k, one, DEFAULT_TOLERANCE).unwrap();
        let ScalarHerglotz::Spectral(m) = from_lsystem(&s).unwrap() else { panic!() };
        assert!((m.poles()[0]).abs() < 1e-15 && (m.poles()[1] - 1.0).abs() < 1e-15);
        assert!((m.weights()[0] - 1.0).abs() < 1e-14 && (m.weights()[1] - 1.0).abs() < 1e-14);
        assert!((m.q() - 0.5).abs() < 1e-14);

        let wide = make_lsystem_random(3, 2, DirectionChoice::Identity, 1).unwrap();
        assert_eq!(from_lsystem(&wide).unwrap_err(), Error::ChannelNotScalar { m: 2 });
    }

    #[test]
    fn degenerate_spectrum_is_merged() {
        // Re A = I_2: one pole at 1 carrying |K|^2.
        let k = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 2.0)]]).unwrap();
        let a = ComplexMatrix::identity(2) + (&k * &k.adjoint()).scale(I);
        let s = make_lsystem(a, k, ComplexMatrix::scalar(c(1.0, 0.0)), DEFAULT_TOLERANCE).unwrap();
        let ScalarHerglotz::Spectral(m) = from_lsystem(&s).unwrap() else { panic!() };
        assert_eq!(m.poles().len(), 1);
        assert!((m.weights()[0] - 5.0).abs() < 1e-13);
    }

    #[test]
    fn classify_examples() {
        let l = classify_value(I, DEFAULT_CLASS_EPSILON).unwrap();
        assert_eq!((l.kind, l.q, l.kappa), (ClassKind::M, 0.0, 0.0));

        let l = classify_value(c(1.0, 1.0 / 3.0), DEFAULT_CLASS_EPSILON).unwrap();
        assert_eq!(l.kind, ClassKind::MQKappa);
        assert_eq!(l.q, 1.0);
        assert!((l.kappa - 0.5).abs() < 1e-15);

        let l = classify_value(c(0.5, 1.5), DEFAULT_CLASS_EPSILON).unwrap();
        assert_eq!(l.kind, ClassKind::MInvQKappa);
        assert!((l.kappa - 0.2).abs() < 1e-15);

        assert_eq!(classify_value(c(0.0, 0.5), 1e-9).unwrap().kind, ClassKind::MKappa);
        assert_eq!(classify_value(c(0.0, 2.0), 1e-9).unwrap().kind, ClassKind::MInvKappa);
        assert_eq!(classify_value(c(-3.0, 1.0), 1e-9).unwrap().kind, ClassKind::MQ);
        assert!(matches!(classify_value(c(1.0, 0.0), 1e-9), Err(Error::NotHerglotzAtI { .. })));
    }

    #[test]
    fn serde_round_trip() {
        let v = mobius(&oracle_v1(), Alpha::new((1.0f64 / 18.0).atan()).unwrap());
        let text = serde_json::to_string(&v).unwrap();
        let back: ScalarHerglotz = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        let bad = r#"{"form":"spectral","q":0.0,"poles":[0.0],"weights":[-1.0]}"#;
        assert!(serde_json::from_str::<ScalarHerglotz>(bad).is_err());
    }
}
