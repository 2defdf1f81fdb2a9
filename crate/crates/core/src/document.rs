//! JSON system documents and class reports.
//!
//! Complex entries are two-element arrays `[re, im]`; matrices are row-major
//! nested arrays. Floats go through serde_json's shortest round-trip
//! formatting, so parse -> serialize -> parse is bit-identical.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{couple_lf, LFCoupling};
use crate::error::{Error, Result};
use crate::herglotz::ClassLabel;
use crate::numerics::ComplexMatrix;
use crate::systems::{
    make_fsystem_transfer_only, make_lsystem, validate_fsystem, validate_lsystem, Check, FSystemModel, LSystemModel,
    TransferFunction, DEFAULT_TOLERANCE,
};

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_doc(m: &ComplexMatrix) -> MatrixDoc {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_doc(doc: &MatrixDoc) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = doc
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LSystemDoc {
    #[serde(rename = "A")]
    pub a: MatrixDoc,
    #[serde(rename = "K")]
    pub k: MatrixDoc,
    #[serde(rename = "J")]
    pub j: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FSystemDoc {
    #[serde(rename = "M")]
    pub m: MatrixDoc,
    #[serde(rename = "F")]
    pub f: MatrixDoc,
    #[serde(rename = "K")]
    pub k: MatrixDoc,
    #[serde(rename = "J")]
    pub j: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

/// Coupling document: the block operators plus both factors, so the
/// coupling can be rebuilt and cross-checked on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LFCouplingDoc {
    #[serde(rename = "M")]
    pub m: MatrixDoc,
    #[serde(rename = "bigF")]
    pub big_f: MatrixDoc,
    #[serde(rename = "K")]
    pub k: MatrixDoc,
    #[serde(rename = "J")]
    pub j: MatrixDoc,
    pub left: LSystemDoc,
    pub right: FSystemDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SystemDocument {
    #[serde(rename = "lsystem")]
    LSystem(LSystemDoc),
    #[serde(rename = "fsystem")]
    FSystem(FSystemDoc),
    #[serde(rename = "lfcoupling")]
    LFCoupling(LFCouplingDoc),
}

/// A validated model loaded from a document.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemModel {
    L(LSystemModel),
    F(FSystemModel),
    LF(LFCoupling),
}

impl SystemModel {
    pub fn io_dim(&self) -> usize {
        match self {
            SystemModel::L(s) => s.io_dim(),
            SystemModel::F(s) => s.io_dim(),
            SystemModel::LF(s) => s.io_dim(),
        }
    }

    pub fn impedance_at(&self, z: Complex64) -> Result<ComplexMatrix> {
        match self {
            SystemModel::L(s) => s.impedance(z),
            SystemModel::F(s) => s.impedance(z),
            SystemModel::LF(s) => s.impedance(z),
        }
    }
}

impl TransferFunction for SystemModel {
    fn transfer_at(&self, z: Complex64) -> Result<ComplexMatrix> {
        match self {
            SystemModel::L(s) => s.transfer(z),
            SystemModel::F(s) => s.transfer(z),
            SystemModel::LF(s) => s.transfer(z),
        }
    }
}

impl LSystemDoc {
    pub fn from_model(s: &LSystemModel) -> Self {
        Self { a: matrix_to_doc(s.a()), k: matrix_to_doc(s.k()), j: matrix_to_doc(s.j()), tol: None }
    }

    fn matrices(&self) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
        Ok((matrix_from_doc(&self.a)?, matrix_from_doc(&self.k)?, matrix_from_doc(&self.j)?))
    }

    pub fn to_model(&self) -> Result<LSystemModel> {
        let (a, k, j) = self.matrices()?;
        make_lsystem(a, k, j, self.tol.unwrap_or(DEFAULT_TOLERANCE))
    }
}

impl FSystemDoc {
    pub fn from_model(s: &FSystemModel) -> Self {
        Self {
            m: matrix_to_doc(s.m()),
            f: matrix_to_doc(s.f()),
            k: matrix_to_doc(s.k()),
            j: matrix_to_doc(s.j()),
            tol: None,
        }
    }

    fn matrices(&self) -> Result<[ComplexMatrix; 4]> {
        Ok([
            matrix_from_doc(&self.m)?,
            matrix_from_doc(&self.f)?,
            matrix_from_doc(&self.k)?,
            matrix_from_doc(&self.j)?,
        ])
    }

    /// Loads the model. An empty `rho(Re M, F)` is tolerated here so that the
    /// `alpha = 0` controller stays usable for transfer evaluation; its
    /// impedance then reports a spectrum hit, and [`SystemDocument::validate`]
    /// still names the failed certificate.
    pub fn to_model(&self) -> Result<FSystemModel> {
        let [m, f, k, j] = self.matrices()?;
        make_fsystem_transfer_only(m, f, k, j, self.tol.unwrap_or(DEFAULT_TOLERANCE))
    }
}

impl LFCouplingDoc {
    pub fn from_model(c: &LFCoupling) -> Self {
        Self {
            m: matrix_to_doc(c.big_m()),
            big_f: matrix_to_doc(c.big_f()),
            k: matrix_to_doc(c.k()),
            j: matrix_to_doc(c.j()),
            left: LSystemDoc::from_model(c.left()),
            right: FSystemDoc::from_model(c.right()),
            tol: None,
        }
    }

    pub fn to_model(&self) -> Result<LFCoupling> {
        let coupling = couple_lf(&self.left.to_model()?, &self.right.to_model()?)?;
        let tol = self.tol.unwrap_or(DEFAULT_TOLERANCE);
        let stored = [
            (matrix_from_doc(&self.m)?, coupling.big_m(), "M"),
            (matrix_from_doc(&self.big_f)?, coupling.big_f(), "bigF"),
            (matrix_from_doc(&self.k)?, coupling.k(), "K"),
            (matrix_from_doc(&self.j)?, coupling.j(), "J"),
        ];
        for (given, rebuilt, name) in stored {
            if given.shape() != rebuilt.shape() || given.distance(rebuilt) > tol * (1.0 + rebuilt.norm_inf()) {
                return Err(Error::InvariantViolated(format!("coupling block {name} does not match its factors")));
            }
        }
        Ok(coupling)
    }
}

impl SystemDocument {
    pub fn parse(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn from_model(model: &SystemModel) -> Self {
        match model {
            SystemModel::L(s) => SystemDocument::LSystem(LSystemDoc::from_model(s)),
            SystemModel::F(s) => SystemDocument::FSystem(FSystemDoc::from_model(s)),
            SystemModel::LF(c) => SystemDocument::LFCoupling(LFCouplingDoc::from_model(c)),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SystemDocument::LSystem(_) => "lsystem",
            SystemDocument::FSystem(_) => "fsystem",
            SystemDocument::LFCoupling(_) => "lfcoupling",
        }
    }

    pub fn to_model(&self) -> Result<SystemModel> {
        Ok(match self {
            SystemDocument::LSystem(d) => SystemModel::L(d.to_model()?),
            SystemDocument::FSystem(d) => SystemModel::F(d.to_model()?),
            SystemDocument::LFCoupling(d) => SystemModel::LF(d.to_model()?),
        })
    }

    /// Per-invariant residuals, or the first violated invariant.
    pub fn validate(&self) -> Result<Vec<Check>> {
        match self {
            SystemDocument::LSystem(d) => {
                let (a, k, j) = d.matrices()?;
                validate_lsystem(&a, &k, &j, d.tol.unwrap_or(DEFAULT_TOLERANCE))
            }
            SystemDocument::FSystem(d) => {
                let [m, f, k, j] = d.matrices()?;
                validate_fsystem(&m, &f, &k, &j, d.tol.unwrap_or(DEFAULT_TOLERANCE))
            }
            SystemDocument::LFCoupling(d) => {
                let c = d.to_model()?;
                let residual = c.conservativity_residual();
                Ok(vec![Check {
                    name: "Im M = KJK*",
                    residual,
                    bound: d.tol.unwrap_or(DEFAULT_TOLERANCE) * (1.0 + c.big_m().norm_inf()),
                }])
            }
        }
    }
}

/// Serializable classification result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub kind: String,
    #[serde(rename = "Q")]
    pub q: f64,
    pub a: f64,
    pub kappa: f64,
    pub value_at_i: [f64; 2],
    pub epsilon: f64,
}

impl From<&ClassLabel> for ClassReport {
    fn from(l: &ClassLabel) -> Self {
        Self {
            kind: l.kind.as_str().to_string(),
            q: l.q,
            a: l.a,
            kappa: l.kappa,
            value_at_i: [l.value_at_i.re, l.value_at_i.im],
            epsilon: l.epsilon,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::unimodular_transform;
    use crate::herglotz::Alpha;
    use crate::numerics::{c, I};

    const SCALAR: &str = r#"{"kind":"lsystem","A":[[[0,1]]],"K":[[[1,0]]],"J":[[[1,0]]]}"#;

    #[test]
    fn parse_scalar_lsystem() {
        let doc = SystemDocument::parse(SCALAR).unwrap();
        assert_eq!(doc.kind(), "lsystem");
        let checks = doc.validate().unwrap();
        assert!(checks.iter().all(|c| c.residual <= c.bound));
        let SystemModel::L(s) = doc.to_model().unwrap() else { panic!() };
        assert_eq!(s.a().get(0, 0), I);
    }

    #[test]
    fn malformed_entry_is_a_parse_error() {
        let bad = r#"{"kind":"lsystem","A":[[[1]]],"K":[[[1,0]]],"J":[[[1,0]]]}"#;
        assert!(SystemDocument::parse(bad).is_err());
        let unknown = r#"{"kind":"qsystem"}"#;
        assert!(SystemDocument::parse(unknown).is_err());
    }

    #[test]
    fn conservativity_violation_is_a_domain_error() {
        let doc = SystemDocument::parse(&SCALAR.replace("[[[0,1]]]", "[[[0,0]]]")).unwrap();
        assert!(matches!(doc.validate(), Err(Error::ConservativityViolated { .. })));
    }

    #[test]
    fn coupling_round_trip() {
        let doc = SystemDocument::parse(SCALAR).unwrap();
        let SystemModel::L(s) = doc.to_model().unwrap() else { panic!() };
        let lf = unimodular_transform(&s, Alpha::new(0.9).unwrap()).unwrap();
        let out = SystemDocument::from_model(&SystemModel::LF(lf.clone()));
        let text = out.to_json();
        let back = SystemDocument::parse(&text).unwrap();
        assert_eq!(back, out);
        assert_eq!(back.to_json(), text);
        let SystemModel::LF(rebuilt) = back.to_model().unwrap() else { panic!() };
        assert_eq!(rebuilt, lf);
        let z = c(0.1, 2.0);
        assert_eq!(rebuilt.transfer(z).unwrap(), lf.transfer(z).unwrap());
    }

    #[test]
    fn tampered_coupling_is_rejected() {
        let doc = SystemDocument::parse(SCALAR).unwrap();
        let SystemModel::L(s) = doc.to_model().unwrap() else { panic!() };
        let lf = unimodular_transform(&s, Alpha::new(0.9).unwrap()).unwrap();
        let SystemDocument::LFCoupling(mut d) = SystemDocument::from_model(&SystemModel::LF(lf)) else { panic!() };
        d.m[0][1] = [5.0, 0.0];
        assert!(matches!(d.to_model(), Err(Error::InvariantViolated(_))));
    }
}
