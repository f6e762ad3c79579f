//! Observables, states, POVM effects and Kraus sets for the three
//! measurement-realization schemes.
//!
//! Alice measures the sharp pair A0 = sinδ·σz + cosδ·σx,
//! A1 = −sinδ·σz + cosδ·σx; Bob measures B0 = σx projectively and realizes
//! the effect pair E± of his second setting through one of three Kraus sets
//! that produce identical outcome statistics but different post-measurement
//! states.

use crate::error::{Error, Result};
use crate::qmath::{c64, ComplexMat, DEFAULT_TOL};

/// Hermiticity tolerance on constructed operators.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A sharp dichotomic qubit observable (Hermitian, square equal to I).
#[derive(Debug, Clone, Copy)]
pub struct Observable {
    mat: ComplexMat,
}

impl Observable {
    /// Wrap a 2×2 matrix, checking Hermiticity and the ±1 spectrum.
    pub fn sharp(mat: ComplexMat) -> Result<Self> {
        if mat.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: mat.dim(),
            });
        }
        if !mat.is_hermitian(HERMITICITY_TOL) {
            return Err(Error::NotHermitian(HERMITICITY_TOL));
        }
        let sq = mat.mm(&mat);
        if !sq.approx_eq(&ComplexMat::identity(2)?, DEFAULT_TOL) {
            return Err(Error::InvalidDensityMatrix(
                "observable is not dichotomic (square differs from I)".into(),
            ));
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &ComplexMat {
        &self.mat
    }
}

/// Alice's two sharp observables together with their tilt angle δ.
#[derive(Debug, Clone, Copy)]
pub struct ObservablePair {
    pub a0: Observable,
    pub a1: Observable,
    pub delta: f64,
}

impl ObservablePair {
    /// A0 + A1 = 2cosδ·σx.
    pub fn sum(&self) -> ComplexMat {
        self.a0.mat.add(&self.a1.mat).expect("same dim")
    }

    /// A0 − A1 = 2sinδ·σz.
    pub fn diff(&self) -> ComplexMat {
        self.a0.mat.sub(&self.a1.mat).expect("same dim")
    }
}

/// Alice's observable pair for tilt δ ∈ [0, π/2].
///
/// The pair satisfies {A0,A1} = 2cos2δ·I and \[A0,A1\] = 2i·sin2δ·σy; both
/// identities are enforced at construction.
pub fn alice_observables(delta: f64) -> Result<ObservablePair> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&delta) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "[0, pi/2]",
        });
    }
    let sx = ComplexMat::pauli_x();
    let sz = ComplexMat::pauli_z();
    let a0 = sz.scale(delta.sin()).add(&sx.scale(delta.cos()))?;
    let a1 = sz.scale(-delta.sin()).add(&sx.scale(delta.cos()))?;

    let anti = a0.mm(&a1).add(&a1.mm(&a0))?;
    let anti_expected = ComplexMat::identity(2)?.scale(2.0 * (2.0 * delta).cos());
    debug_assert!(anti.approx_eq(&anti_expected, DEFAULT_TOL));
    let comm = a0.mm(&a1).sub(&a1.mm(&a0))?;
    let comm_expected = ComplexMat::pauli_y().scale_c(c64(0.0, 2.0 * (2.0 * delta).sin()));
    debug_assert!(comm.approx_eq(&comm_expected, DEFAULT_TOL));

    Ok(ObservablePair {
        a0: Observable::sharp(a0)?,
        a1: Observable::sharp(a1)?,
        delta,
    })
}

/// Bob's sharp observables (B0, B1) = (σx, σz); their anticommutator is zero.
pub fn bob_observables() -> (Observable, Observable) {
    (
        Observable::sharp(ComplexMat::pauli_x()).expect("sigma_x"),
        Observable::sharp(ComplexMat::pauli_z()).expect("sigma_z"),
    )
}

/// Projectors (B+|1, B−|1) = ((I+σz)/2, (I−σz)/2) onto B1's ±1 outcomes.
pub fn b1_projectors() -> (ComplexMat, ComplexMat) {
    let i2 = ComplexMat::identity(2).expect("I2");
    let sz = ComplexMat::pauli_z();
    (
        i2.add(&sz).expect("same dim").scale(0.5),
        i2.sub(&sz).expect("same dim").scale(0.5),
    )
}

/// Projectors (B+|0, B−|0) = ((I+σx)/2, (I−σx)/2) onto B0's ±1 outcomes.
pub fn b0_projectors() -> (ComplexMat, ComplexMat) {
    let i2 = ComplexMat::identity(2).expect("I2");
    let sx = ComplexMat::pauli_x();
    (
        i2.add(&sx).expect("same dim").scale(0.5),
        i2.sub(&sx).expect("same dim").scale(0.5),
    )
}

/// A valid two-qubit state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy)]
pub struct DensityMatrix {
    mat: ComplexMat,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMat) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: mat.dim(),
            });
        }
        if !mat.is_hermitian(HERMITICITY_TOL) {
            return Err(Error::InvalidDensityMatrix("not Hermitian".into()));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > DEFAULT_TOL || tr.im.abs() > DEFAULT_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {} differs from 1",
                tr.re
            )));
        }
        if !mat.is_psd(DEFAULT_TOL) {
            return Err(Error::InvalidDensityMatrix(
                "negative eigenvalue beyond tolerance".into(),
            ));
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &ComplexMat {
        &self.mat
    }

    /// Alice's reduced state.
    pub fn alice_marginal(&self) -> ComplexMat {
        self.mat.partial_trace_bob().expect("4x4 state")
    }
}

/// Density matrix of |ψ⟩ = cosθ|00⟩ + sinθ|11⟩ for θ ∈ [0, π/4].
pub fn initial_state(theta: f64) -> Result<DensityMatrix> {
    if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi/4]",
        });
    }
    let (ct, st) = (theta.cos(), theta.sin());
    let mut m = ComplexMat::zeros(4)?;
    m.set(0, 0, c64(ct * ct, 0.0));
    m.set(0, 3, c64(ct * st, 0.0));
    m.set(3, 0, c64(ct * st, 0.0));
    m.set(3, 3, c64(st * st, 0.0));
    DensityMatrix::new(m)
}

/// Concurrence of the pure state cosθ|00⟩ + sinθ|11⟩, namely sin2θ.
pub fn pure_state_concurrence(theta: f64) -> f64 {
    (2.0 * theta).sin()
}

/// Which closed-form family a scheme belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeFamily {
    Ppm3,
    FourKraus,
    TwoKraus,
}

impl SchemeFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeFamily::Ppm3 => "ppm",
            SchemeFamily::FourKraus => "four-kraus",
            SchemeFamily::TwoKraus => "two-kraus",
        }
    }
}

/// One Bob's measurement realization of the effect pair
/// E+ = α·B+|1 + v(1−α)·I, E− = α·B−|1 + (1−v)(1−α)·I.
///
/// The three variants produce the same outcome statistics; they differ in the
/// Kraus operators, hence in the post-measurement state handed to the next
/// Bob. `Ppm3` fixes v = 1 implicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Ppm3 { alpha: f64 },
    FourKraus { alpha: f64, v: f64 },
    TwoKraus { alpha: f64, v: f64 },
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(Error::OutOfRange {
            name,
            value: x,
            range: "[0, 1]",
        });
    }
    Ok(())
}

impl Scheme {
    pub fn ppm3(alpha: f64) -> Result<Self> {
        check_unit("alpha", alpha)?;
        Ok(Scheme::Ppm3 { alpha })
    }

    pub fn four_kraus(alpha: f64, v: f64) -> Result<Self> {
        check_unit("alpha", alpha)?;
        check_unit("v", v)?;
        Ok(Scheme::FourKraus { alpha, v })
    }

    pub fn two_kraus(alpha: f64, v: f64) -> Result<Self> {
        check_unit("alpha", alpha)?;
        check_unit("v", v)?;
        Ok(Scheme::TwoKraus { alpha, v })
    }

    pub fn from_family(family: SchemeFamily, alpha: f64, v: f64) -> Result<Self> {
        match family {
            SchemeFamily::Ppm3 => Self::ppm3(alpha),
            SchemeFamily::FourKraus => Self::four_kraus(alpha, v),
            SchemeFamily::TwoKraus => Self::two_kraus(alpha, v),
        }
    }

    pub fn family(&self) -> SchemeFamily {
        match self {
            Scheme::Ppm3 { .. } => SchemeFamily::Ppm3,
            Scheme::FourKraus { .. } => SchemeFamily::FourKraus,
            Scheme::TwoKraus { .. } => SchemeFamily::TwoKraus,
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            Scheme::Ppm3 { alpha } => alpha,
            Scheme::FourKraus { alpha, .. } => alpha,
            Scheme::TwoKraus { alpha, .. } => alpha,
        }
    }

    /// Identity-branch bias; PPM3 is the v = 1 point.
    pub fn v(&self) -> f64 {
        match *self {
            Scheme::Ppm3 { .. } => 1.0,
            Scheme::FourKraus { v, .. } => v,
            Scheme::TwoKraus { v, .. } => v,
        }
    }

    /// The Kraus operators realizing the scheme's effect pair.
    ///
    /// Zero operators (e.g. the identity branch of PPM3 at α = 1) are kept
    /// as explicit zero matrices so channel code has uniform shape.
    pub fn kraus_set(&self) -> Vec<ComplexMat> {
        let (b_plus, b_minus) = b1_projectors();
        let i2 = ComplexMat::identity(2).expect("I2");
        match *self {
            Scheme::Ppm3 { alpha } => vec![
                b_plus.scale(alpha.sqrt()),
                b_minus.scale(alpha.sqrt()),
                i2.scale((1.0 - alpha).sqrt()),
            ],
            Scheme::FourKraus { alpha, v } => vec![
                b_plus.scale(alpha.sqrt()),
                b_minus.scale(alpha.sqrt()),
                i2.scale((v * (1.0 - alpha)).sqrt()),
                i2.scale(((1.0 - v) * (1.0 - alpha)).sqrt()),
            ],
            Scheme::TwoKraus { alpha, v } => {
                let m1 = (v * (1.0 - alpha) + alpha).sqrt();
                let m2 = (v * (1.0 - alpha)).sqrt();
                let n1 = ((1.0 - alpha) * (1.0 - v)).sqrt();
                let n2 = (1.0 - v * (1.0 - alpha)).sqrt();
                let b1 = ComplexMat::pauli_z();
                let k1 = i2
                    .scale(0.5 * (m1 + m2))
                    .add(&b1.scale(0.5 * (m1 - m2)))
                    .expect("same dim");
                let k2 = i2
                    .scale(0.5 * (n1 + n2))
                    .add(&b1.scale(0.5 * (n1 - n2)))
                    .expect("same dim");
                vec![k1, k2]
            }
        }
    }

    /// Effect pair E+ = α·B+|1 + v(1−α)·I, E− = α·B−|1 + (1−v)(1−α)·I.
    pub fn effective_povm(&self) -> PovmPair {
        let (b_plus, b_minus) = b1_projectors();
        let i2 = ComplexMat::identity(2).expect("I2");
        let alpha = self.alpha();
        let v = self.v();
        PovmPair {
            plus: b_plus
                .scale(alpha)
                .add(&i2.scale(v * (1.0 - alpha)))
                .expect("same dim"),
            minus: b_minus
                .scale(alpha)
                .add(&i2.scale((1.0 - v) * (1.0 - alpha)))
                .expect("same dim"),
        }
    }

    /// Effective observable E+ − E− = α·B1 + (2v−1)(1−α)·I.
    pub fn effective_observable(&self) -> ComplexMat {
        let povm = self.effective_povm();
        povm.plus.sub(&povm.minus).expect("same dim")
    }

    /// Sums of K†K grouped by outcome, per the scheme's realization:
    /// PPM3/FourKraus route the identity branches K3 (and K4) to (+, −);
    /// TwoKraus maps K1 → +, K2 → −.
    pub fn povm_from_kraus(&self) -> PovmPair {
        let ks = self.kraus_set();
        let kk = |k: &ComplexMat| k.adjoint().mm(k);
        match self {
            Scheme::Ppm3 { .. } => PovmPair {
                plus: kk(&ks[0]).add(&kk(&ks[2])).expect("same dim"),
                minus: kk(&ks[1]),
            },
            Scheme::FourKraus { .. } => PovmPair {
                plus: kk(&ks[0]).add(&kk(&ks[2])).expect("same dim"),
                minus: kk(&ks[1]).add(&kk(&ks[3])).expect("same dim"),
            },
            Scheme::TwoKraus { .. } => PovmPair {
                plus: kk(&ks[0]),
                minus: kk(&ks[1]),
            },
        }
    }
}

/// A two-outcome POVM: both effects PSD, summing to the identity.
#[derive(Debug, Clone, Copy)]
pub struct PovmPair {
    pub plus: ComplexMat,
    pub minus: ComplexMat,
}

impl PovmPair {
    /// Check completeness and positivity within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let sum = self.plus.add(&self.minus)?;
        if !sum.approx_eq(&ComplexMat::identity(2)?, tol) {
            return Err(Error::InvalidDensityMatrix(
                "POVM effects do not sum to identity".into(),
            ));
        }
        if !self.plus.is_psd(tol) || !self.minus.is_psd(tol) {
            return Err(Error::InvalidDensityMatrix("POVM effect not PSD".into()));
        }
        Ok(())
    }
}
