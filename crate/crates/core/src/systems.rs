//! Finite-dimensional L-systems and F-systems.
//!
//! An L-system is the triple `(A, K, J)` with `Im A = K J K*` and `J` a
//! self-adjoint involution. An F-system `(M, F, K, J)` replaces the identity
//! in the resolvent pencil by an orthogonal projection `F`. Both expose a
//! transfer function (`W`) and an impedance function (`V`), related by the
//! Cayley maps [`cayley_w_to_v`] and [`cayley_v_to_w`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{c, solve, ComplexMatrix, I};
use crate::random::{self, SeededRng};

/// Default validation tolerance, relative to input magnitudes.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Relative singular-value cutoff used by the range condition.
pub const RANK_TOLERANCE: f64 = 1e-10;

const MAX_GENERATION_ATTEMPTS: usize = 100;

/// One validated invariant and its measured residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub bound: f64,
}

/// Anything that can produce a transfer-function value at `z`.
pub trait TransferFunction {
    fn transfer_at(&self, z: Complex64) -> Result<ComplexMatrix>;
}

/// Adapts a closure into a [`TransferFunction`].
pub struct FnTransfer<F>(pub F);

impl<F> TransferFunction for FnTransfer<F>
where
    F: Fn(Complex64) -> Result<ComplexMatrix>,
{
    fn transfer_at(&self, z: Complex64) -> Result<ComplexMatrix> {
        (self.0)(z)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LSystemModel {
    a: ComplexMatrix,
    k: ComplexMatrix,
    j: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FSystemModel {
    m: ComplexMatrix,
    f: ComplexMatrix,
    k: ComplexMatrix,
    j: ComplexMatrix,
}

/// How the random generators choose `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionChoice {
    Identity,
    RandomSignature,
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("evaluation point"))
    }
}

fn spectrum_hit(z: Complex64) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::SingularMatrix { .. } => Error::SpectrumHit { z },
        other => other,
    }
}

fn check_direction(j: &ComplexMatrix, tol: f64) -> Result<Check> {
    let m = j.rows();
    let residual = j
        .hermitian_residual()
        .max((j * j).distance(&ComplexMatrix::identity(m)));
    if residual > tol {
        return Err(Error::DirectionNotInvolution { residual });
    }
    Ok(Check { name: "J = J* = J^-1", residual, bound: tol })
}

fn check_conservative(main: &ComplexMatrix, k: &ComplexMatrix, j: &ComplexMatrix, tol: f64) -> Result<Check> {
    let kjk = &(k * j) * &k.adjoint();
    let residual = main.imag_part().distance(&kjk);
    let bound = tol * (1.0 + main.norm_inf());
    if residual > bound {
        return Err(Error::ConservativityViolated { residual });
    }
    Ok(Check { name: "Im A = KJK*", residual, bound })
}

fn check_shapes(main: &ComplexMatrix, k: &ComplexMatrix, j: &ComplexMatrix) -> Result<()> {
    if !main.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "state operator is {}x{}, expected square",
            main.rows(),
            main.cols()
        )));
    }
    if k.rows() != main.rows() {
        return Err(Error::DimensionMismatch(format!(
            "K has {} rows, state dimension is {}",
            k.rows(),
            main.rows()
        )));
    }
    if !j.is_square() || j.rows() != k.cols() {
        return Err(Error::DimensionMismatch(format!(
            "J is {}x{}, K has {} columns",
            j.rows(),
            j.cols(),
            k.cols()
        )));
    }
    Ok(())
}

/// Runs every L-system invariant, stopping at the first violation.
pub fn validate_lsystem(a: &ComplexMatrix, k: &ComplexMatrix, j: &ComplexMatrix, tol: f64) -> Result<Vec<Check>> {
    check_shapes(a, k, j)?;
    let mut checks = vec![check_direction(j, tol)?, check_conservative(a, k, j, tol)?];
    let rank_k = k.rank(RANK_TOLERANCE);
    let rank_im = a.imag_part().rank(RANK_TOLERANCE);
    if rank_k != rank_im {
        return Err(Error::RangeMismatch { rank_k, rank_im });
    }
    checks.push(Check { name: "rank K = rank Im A", residual: 0.0, bound: 0.0 });
    Ok(checks)
}

pub fn make_lsystem(a: ComplexMatrix, k: ComplexMatrix, j: ComplexMatrix, tol: f64) -> Result<LSystemModel> {
    validate_lsystem(&a, &k, &j, tol)?;
    Ok(LSystemModel { a, k, j })
}

/// Draws `A = R + i K J K*` with Hermitian `R`, so conservativity holds by
/// construction. With a random signature `J` the draw is repeated until the
/// range condition holds.
pub fn make_lsystem_random(n: usize, m: usize, direction: DirectionChoice, seed: u64) -> Result<LSystemModel> {
    let mut rng = random::seeded(seed);
    let j = match direction {
        DirectionChoice::Identity => ComplexMatrix::identity(m),
        DirectionChoice::RandomSignature => random::signature(&mut rng, m),
    };
    random_lsystem_with(&mut rng, n, &j)
}

/// Random L-system sharing a caller-provided `J`.
pub fn random_lsystem_with(rng: &mut SeededRng, n: usize, j: &ComplexMatrix) -> Result<LSystemModel> {
    if n == 0 || j.rows() == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let r = random::hermitian(rng, n);
        let k = random::complex_matrix(rng, n, j.rows());
        let a = &r + &(&(&k * j) * &k.adjoint()).scale(I);
        match make_lsystem(a, k, j.clone(), DEFAULT_TOLERANCE) {
            Ok(s) => return Ok(s),
            Err(Error::RangeMismatch { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_GENERATION_ATTEMPTS })
}

impl LSystemModel {
    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn k(&self) -> &ComplexMatrix {
        &self.k
    }

    pub fn j(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn io_dim(&self) -> usize {
        self.j.rows()
    }

    /// `W(z) = I - 2i K* (A - zI)^-1 K J`.
    pub fn transfer(&self, z: Complex64) -> Result<ComplexMatrix> {
        check_finite(z)?;
        let n = self.state_dim();
        let pencil = &self.a - &ComplexMatrix::identity(n).scale(z);
        let x = solve(&pencil, &self.k).map_err(spectrum_hit(z))?;
        let m = self.io_dim();
        Ok(ComplexMatrix::identity(m) - (&(&self.k.adjoint() * &x) * &self.j).scale(c(0.0, 2.0)))
    }

    /// `V(z) = K* (Re A - zI)^-1 K`.
    pub fn impedance(&self, z: Complex64) -> Result<ComplexMatrix> {
        check_finite(z)?;
        let n = self.state_dim();
        let pencil = &self.a.real_part() - &ComplexMatrix::identity(n).scale(z);
        let x = solve(&pencil, &self.k).map_err(spectrum_hit(z))?;
        Ok(&self.k.adjoint() * &x)
    }
}

impl TransferFunction for LSystemModel {
    fn transfer_at(&self, z: Complex64) -> Result<ComplexMatrix> {
        self.transfer(z)
    }
}

pub fn transfer(s: &LSystemModel, z: Complex64) -> Result<ComplexMatrix> {
    s.transfer(z)
}

pub fn impedance(s: &LSystemModel, z: Complex64) -> Result<ComplexMatrix> {
    s.impedance(z)
}

/// `V = i (W + I)^-1 (W - I) J`.
pub fn cayley_w_to_v(w: &ComplexMatrix, j: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(w.rows());
    let x = solve(&(w + &id), &(w - &id))?;
    Ok((&x * j).scale(I))
}

/// `W = (I + i V J)^-1 (I - i V J)`.
pub fn cayley_v_to_w(v: &ComplexMatrix, j: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(v.rows());
    let ivj = (v * j).scale(I);
    solve(&(&id + &ivj), &(&id - &ivj))
}

/// Candidate points for the resolvent-set certificate:
/// `0, 1, -1, i, -i, 2i, -2i, ..., (n+1)i, -(n+1)i`.
fn certificate_points(n: usize) -> Vec<Complex64> {
    let mut pts = vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
    for k in 1..=(n + 1) {
        pts.push(c(0.0, k as f64));
        pts.push(c(0.0, -(k as f64)));
    }
    pts
}

fn resolvent_certificate(op: &ComplexMatrix, f: &ComplexMatrix) -> Option<Complex64> {
    let id = ComplexMatrix::identity(op.rows());
    certificate_points(op.rows())
        .into_iter()
        .find(|&z| solve(&(op - &f.scale(z)), &id).is_ok())
}

/// Runs every F-system invariant, stopping at the first violation.
pub fn validate_fsystem(
    m: &ComplexMatrix,
    f: &ComplexMatrix,
    k: &ComplexMatrix,
    j: &ComplexMatrix,
    tol: f64,
) -> Result<Vec<Check>> {
    check_shapes(m, k, j)?;
    if f.shape() != m.shape() {
        return Err(Error::DimensionMismatch(format!(
            "F is {}x{}, M is {}x{}",
            f.rows(),
            f.cols(),
            m.rows(),
            m.cols()
        )));
    }
    let proj = f.hermitian_residual().max((f * f).distance(f));
    if proj > tol {
        return Err(Error::ProjectionInvalid { residual: proj });
    }
    let mut checks = vec![Check { name: "F = F* = F^2", residual: proj, bound: tol }];
    checks.push(check_direction(j, tol)?);
    checks.push(check_conservative(m, k, j, tol)?);
    if resolvent_certificate(m, f).is_none() {
        return Err(Error::EmptyResolventSet("M - zF"));
    }
    if resolvent_certificate(&m.real_part(), f).is_none() {
        return Err(Error::EmptyResolventSet("Re M - zF"));
    }
    checks.push(Check { name: "rho(M, F) and rho(Re M, F) nonempty", residual: 0.0, bound: 0.0 });
    Ok(checks)
}

/// Like [`make_fsystem`] but accepts an empty `rho(Re M, F)`. Only for
/// systems whose transfer function is `-I` somewhere on a whole pencil,
/// where the impedance cannot exist (the `alpha = 0` controller).
pub(crate) fn make_fsystem_transfer_only(
    m: ComplexMatrix,
    f: ComplexMatrix,
    k: ComplexMatrix,
    j: ComplexMatrix,
    tol: f64,
) -> Result<FSystemModel> {
    match validate_fsystem(&m, &f, &k, &j, tol) {
        Ok(_) | Err(Error::EmptyResolventSet("Re M - zF")) => Ok(FSystemModel { m, f, k, j }),
        Err(e) => Err(e),
    }
}

pub fn make_fsystem(
    m: ComplexMatrix,
    f: ComplexMatrix,
    k: ComplexMatrix,
    j: ComplexMatrix,
    tol: f64,
) -> Result<FSystemModel> {
    validate_fsystem(&m, &f, &k, &j, tol)?;
    Ok(FSystemModel { m, f, k, j })
}

/// Random F-system `M = R + i K J K*` with a projection of random rank.
pub fn random_fsystem_with(rng: &mut SeededRng, n: usize, j: &ComplexMatrix) -> Result<FSystemModel> {
    use rand::Rng;
    if n == 0 || j.rows() == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let r = random::hermitian(rng, n);
        let k = random::complex_matrix(rng, n, j.rows());
        let rank = rng.random_range(0..=n);
        let f = random::projection(rng, n, rank);
        let m = &r + &(&(&k * j) * &k.adjoint()).scale(I);
        match make_fsystem(m, f, k, j.clone(), DEFAULT_TOLERANCE) {
            Ok(s) => return Ok(s),
            Err(Error::EmptyResolventSet(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_GENERATION_ATTEMPTS })
}

impl FSystemModel {
    pub fn m(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn f(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn k(&self) -> &ComplexMatrix {
        &self.k
    }

    pub fn j(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn state_dim(&self) -> usize {
        self.m.rows()
    }

    pub fn io_dim(&self) -> usize {
        self.j.rows()
    }

    /// `W(z) = I - 2i K* (M - zF)^-1 K J`.
    pub fn transfer(&self, z: Complex64) -> Result<ComplexMatrix> {
        check_finite(z)?;
        let x = solve(&(&self.m - &self.f.scale(z)), &self.k).map_err(spectrum_hit(z))?;
        Ok(ComplexMatrix::identity(self.io_dim()) - (&(&self.k.adjoint() * &x) * &self.j).scale(c(0.0, 2.0)))
    }

    /// `V(z) = K* (Re M - zF)^-1 K`.
    pub fn impedance(&self, z: Complex64) -> Result<ComplexMatrix> {
        check_finite(z)?;
        let x = solve(&(&self.m.real_part() - &self.f.scale(z)), &self.k).map_err(spectrum_hit(z))?;
        Ok(&self.k.adjoint() * &x)
    }
}

impl TransferFunction for FSystemModel {
    fn transfer_at(&self, z: Complex64) -> Result<ComplexMatrix> {
        self.transfer(z)
    }
}

pub fn ftransfer(s: &FSystemModel, z: Complex64) -> Result<ComplexMatrix> {
    s.transfer(z)
}

pub fn fimpedance(s: &FSystemModel, z: Complex64) -> Result<ComplexMatrix> {
    s.impedance(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn s(z: Complex64) -> ComplexMatrix {
        ComplexMatrix::scalar(z)
    }

    fn one() -> ComplexMatrix {
        s(c(1.0, 0.0))
    }

    fn scalar_system() -> LSystemModel {
        make_lsystem(s(I), one(), one(), DEFAULT_TOLERANCE).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn scalar_lsystem_is_valid() {
        let checks = validate_lsystem(&s(I), &one(), &one(), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(checks.len(), 3);
    }

    #[test]
    fn hermitian_main_operator_violates_conservativity() {
        let err = make_lsystem(s(c(0.0, 0.0)), one(), one(), DEFAULT_TOLERANCE).unwrap_err();
        match err {
            Error::ConservativityViolated { residual } => assert!((residual - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn two_state_example_is_valid() {
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(1.0, 1.0)]]).unwrap();
        let k = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
        make_lsystem(a, k, one(), DEFAULT_TOLERANCE).unwrap();
    }

    #[test]
    fn direction_and_range_errors() {
        let err = make_lsystem(s(I), one(), s(c(2.0, 0.0)), DEFAULT_TOLERANCE).unwrap_err();
        assert!(matches!(err, Error::DirectionNotInvolution { .. }));

        let k = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
        let j = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        // K J K* = 1 - 1 = 0, so a Hermitian A is conservative but rank K = 1.
        let err = make_lsystem(s(c(3.0, 0.0)), k, j, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(err, Error::RangeMismatch { rank_k: 1, rank_im: 0 });

        let err = make_lsystem(ComplexMatrix::zeros(2, 3), one(), one(), DEFAULT_TOLERANCE).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn random_generation_is_deterministic_and_valid() {
        let a = make_lsystem_random(4, 2, DirectionChoice::Identity, 7).unwrap();
        let b = make_lsystem_random(4, 2, DirectionChoice::Identity, 7).unwrap();
        assert_eq!(a, b);
        make_lsystem_random(1, 1, DirectionChoice::Identity, 1).unwrap();
        for seed in 0..10 {
            let sys = make_lsystem_random(3, 2, DirectionChoice::RandomSignature, seed).unwrap();
            validate_lsystem(sys.a(), sys.k(), sys.j(), DEFAULT_TOLERANCE).unwrap();
        }
    }

    #[test]
    fn scalar_transfer_values() {
        let sys = scalar_system();
        assert!(close(sys.transfer(c(0.0, 2.0)).unwrap().get(0, 0), c(3.0, 0.0), 1e-15));
        let w1 = sys.transfer(c(1.0, 0.0)).unwrap().get(0, 0);
        assert!(close(w1, I, 1e-15));
        assert!((w1.norm() - 1.0).abs() < 1e-15);
        assert_eq!(sys.transfer(I).unwrap_err(), Error::SpectrumHit { z: I });
    }

    #[test]
    fn impedance_values() {
        let sys = scalar_system();
        assert!(close(sys.impedance(c(0.0, 2.0)).unwrap().get(0, 0), c(0.0, 0.5), 1e-15));
        assert!(close(sys.impedance(I).unwrap().get(0, 0), I, 1e-15));

        // Re A = diag(0, 1), K = (1; 1): V(i) = 1/(-i) + 1/(1-i) = 1/2 + 3i/2.
        let a = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(1.0, 1.0)]]).unwrap();
        let k = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
        let sys = make_lsystem(a, k, one(), DEFAULT_TOLERANCE).unwrap();
        assert!(close(sys.impedance(I).unwrap().get(0, 0), c(0.5, 1.5), 1e-15));
    }

    #[test]
    fn cayley_examples() {
        let v = cayley_w_to_v(&s(c(3.0, 0.0)), &one()).unwrap();
        assert!(close(v.get(0, 0), c(0.0, 0.5), 1e-15));
        assert_eq!(cayley_w_to_v(&one(), &one()).unwrap(), s(c(0.0, 0.0)));
        assert!(matches!(cayley_w_to_v(&s(c(-1.0, 0.0)), &one()), Err(Error::SingularMatrix { .. })));

        let w = cayley_v_to_w(&s(c(0.0, 0.5)), &one()).unwrap();
        assert!(close(w.get(0, 0), c(3.0, 0.0), 1e-15));
        assert_eq!(cayley_v_to_w(&s(c(0.0, 0.0)), &one()).unwrap(), one());
        let z = c(0.0, 2.0);
        let w = cayley_v_to_w(&s(-1.0 / z), &one()).unwrap();
        assert!(close(w.get(0, 0), (z + I) / (z - I), 1e-15));
    }

    #[test]
    fn fsystem_examples() {
        let t = (PI / 3.0).tan();
        let ctrl = make_fsystem(s(c(t, 1.0)), s(c(0.0, 0.0)), one(), one(), DEFAULT_TOLERANCE).unwrap();
        let w = ctrl.transfer(c(0.3, 0.7)).unwrap().get(0, 0);
        assert!(close(w, c(0.5, -(3f64.sqrt()) / 2.0), 1e-15));
        assert!(close(ctrl.impedance(c(1.0, 1.0)).unwrap().get(0, 0), c(1.0 / t, 0.0), 1e-15));

        let err = make_fsystem(s(I), s(c(0.0, 0.0)), one(), one(), DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(err, Error::EmptyResolventSet("Re M - zF"));

        let err = make_fsystem(s(I), s(c(0.5, 0.0)), one(), one(), DEFAULT_TOLERANCE).unwrap_err();
        assert!(matches!(err, Error::ProjectionInvalid { .. }));
    }

    #[test]
    fn controller_atoms_have_constant_transfer() {
        let plus = make_fsystem(s(c(1.0, 1.0)), s(c(0.0, 0.0)), one(), one(), DEFAULT_TOLERANCE).unwrap();
        let minus = make_fsystem(s(c(-1.0, 1.0)), s(c(0.0, 0.0)), one(), one(), DEFAULT_TOLERANCE).unwrap();
        let pi4 = make_fsystem(s(c(1.0, 1.0)), s(c(0.0, 0.0)), one(), one(), DEFAULT_TOLERANCE).unwrap();
        assert!(close(pi4.impedance(c(0.0, 3.0)).unwrap().get(0, 0), c(1.0, 0.0), 1e-15));
        for z in [c(0.0, 0.0), c(2.0, -1.0), c(-5.0, 3.0)] {
            assert!(close(plus.transfer(z).unwrap().get(0, 0), -I, 1e-15));
            assert!(close(minus.transfer(z).unwrap().get(0, 0), I, 1e-15));
        }
    }

    #[test]
    fn identity_projection_reduces_to_lsystem_pencil() {
        let sys = make_fsystem(s(I), one(), one(), one(), DEFAULT_TOLERANCE).unwrap();
        assert!(close(sys.impedance(c(0.0, 2.0)).unwrap().get(0, 0), c(0.0, 0.5), 1e-15));
    }

    #[test]
    fn random_fsystems_validate() {
        let mut rng = random::seeded(3);
        for n in 1..6 {
            let j = ComplexMatrix::identity(2);
            let sys = random_fsystem_with(&mut rng, n, &j).unwrap();
            validate_fsystem(sys.m(), sys.f(), sys.k(), sys.j(), DEFAULT_TOLERANCE).unwrap();
        }
    }
}
