//! Sequential evolution of the shared state through each Bob's unselective
//! measurement channel, and the brute-force CHSH value between Alice and
//! Bob^k evaluated directly on the 4×4 density matrix.
//!
//! This module is the independent oracle for every closed-form expression in
//! [`crate::chsh`]: it never uses the specialized recursions, only the
//! generic Kraus-sum channel
//!
//!   ρ' = ½ [ Σ_b (I⊗B_b|0) ρ (I⊗B_b|0) + Σ_i (I⊗K_i) ρ (I⊗K_i†) ].

use crate::error::{Error, Result};
use crate::protocol::{
    alice_observables, b0_projectors, initial_state, DensityMatrix, ObservablePair, Scheme,
};
use crate::qmath::ComplexMat;

/// Weight of Bob's y = 0 input in the unselective average. Fixed; every
/// closed form assumes unbiased inputs.
pub const INPUT_PROB_Y0: f64 = 0.5;

/// Full experiment description: k Bobs, tilt δ, state angle θ, one
/// measurement scheme per Bob.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub delta: f64,
    pub theta: f64,
    pub schemes: Vec<Scheme>,
}

impl ProtocolConfig {
    pub fn new(delta: f64, theta: f64, schemes: Vec<Scheme>) -> Result<Self> {
        if schemes.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: 0,
            });
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&delta) {
            return Err(Error::OutOfRange {
                name: "delta",
                value: delta,
                range: "[0, pi/2]",
            });
        }
        if !(0.0..=std::f64::consts::FRAC_PI_4).contains(&theta) {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi/4]",
            });
        }
        Ok(Self {
            delta,
            theta,
            schemes,
        })
    }

    /// Same scheme family and parameters for every Bob.
    pub fn uniform(k: usize, delta: f64, theta: f64, scheme: Scheme) -> Result<Self> {
        Self::new(delta, theta, vec![scheme; k.max(1)])
    }

    pub fn k(&self) -> usize {
        self.schemes.len()
    }
}

/// States ρ_1 … ρ_k and CHSH values I^1 … I^k.
#[derive(Debug, Clone)]
pub struct SequentialTrace {
    pub states: Vec<DensityMatrix>,
    pub chsh_values: Vec<f64>,
}

fn conjugate_bob_side(op2: &ComplexMat, rho: &ComplexMat) -> ComplexMat {
    let i2 = ComplexMat::identity(2).expect("I2");
    let lifted = i2.tensor(op2).expect("2x2 factors");
    lifted.mm(rho).mm(&lifted.adjoint())
}

fn bob_channel_matrix(rho: &ComplexMat, scheme: &Scheme, fault: bool) -> ComplexMat {
    let (b0p, b0m) = b0_projectors();
    let mut out = conjugate_bob_side(&b0p, rho)
        .add(&conjugate_bob_side(&b0m, rho))
        .expect("same dim");
    for (i, k) in scheme.kraus_set().iter().enumerate() {
        let mut term = conjugate_bob_side(k, rho);
        if fault && i == 0 {
            // negative-control hook: overweight the first Kraus branch
            term = term.scale(1.02);
        }
        out = out.add(&term).expect("same dim");
    }
    out.scale(INPUT_PROB_Y0)
}

/// Unselective channel of one Bob: average over his two inputs with weight
/// ½, summing the Kraus branches of the second setting.
pub fn bob_channel(rho: &DensityMatrix, scheme: &Scheme) -> Result<DensityMatrix> {
    DensityMatrix::new(bob_channel_matrix(rho.matrix(), scheme, false))
}

/// Same channel with a deliberately wrong branch weight. Only for negative
/// controls in the verification suites; never part of the protocol.
#[doc(hidden)]
pub fn bob_channel_faulty(rho: &DensityMatrix, scheme: &Scheme) -> Result<DensityMatrix> {
    let m = bob_channel_matrix(rho.matrix(), scheme, true);
    // The faulty map is not trace preserving; renormalize so it still
    // yields a state and the error shows up in expectation values.
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr))
}

/// CHSH operator (A0+A1)⊗B0 + (A0−A1)⊗𝓑1 for a given effective second
/// observable 𝓑1.
pub fn chsh_operator(pair: &ObservablePair, effective_b1: &ComplexMat) -> ComplexMat {
    let b0 = ComplexMat::pauli_x();
    let t0 = pair.sum().tensor(&b0).expect("2x2 factors");
    let t1 = pair.diff().tensor(effective_b1).expect("2x2 factors");
    t0.add(&t1).expect("same dim")
}

/// η-weighted CHSH operator η0(A0+A1)⊗B0 + η1(A0−A1)⊗B1 with sharp B1.
pub fn unsharp_chsh_operator(pair: &ObservablePair, eta0: f64, eta1: f64) -> ComplexMat {
    let b0 = ComplexMat::pauli_x();
    let b1 = ComplexMat::pauli_z();
    let t0 = pair.sum().scale(eta0).tensor(&b0).expect("2x2 factors");
    let t1 = pair.diff().scale(eta1).tensor(&b1).expect("2x2 factors");
    t0.add(&t1).expect("same dim")
}

/// Real part of Tr[op·ρ].
pub fn expectation(op: &ComplexMat, rho: &DensityMatrix) -> f64 {
    op.mm(rho.matrix()).trace().re
}

fn run_protocol_impl(config: &ProtocolConfig, fault: bool) -> Result<SequentialTrace> {
    let pair = alice_observables(config.delta)?;
    let mut states = Vec::with_capacity(config.k());
    let mut chsh_values = Vec::with_capacity(config.k());

    let mut rho = initial_state(config.theta)?;
    for (j, scheme) in config.schemes.iter().enumerate() {
        if j > 0 {
            rho = if fault {
                bob_channel_faulty(&rho, &config.schemes[j - 1])?
            } else {
                bob_channel(&rho, &config.schemes[j - 1])?
            };
        }
        let op = chsh_operator(&pair, &scheme.effective_observable());
        chsh_values.push(expectation(&op, &rho));
        states.push(rho);
    }

    Ok(SequentialTrace {
        states,
        chsh_values,
    })
}

/// Evolve ρ through the chain and report each Bob's CHSH value.
///
/// ρ_1 is the initial state; ρ_{j+1} = channel(ρ_j, scheme_j). Alice's
/// measurement is never applied to the evolving state: I^j is an expectation
/// on ρ_j.
pub fn run_protocol(config: &ProtocolConfig) -> Result<SequentialTrace> {
    run_protocol_impl(config, false)
}

/// Oracle run with the faulty channel, for negative controls only.
#[doc(hidden)]
pub fn run_protocol_faulty(config: &ProtocolConfig) -> Result<SequentialTrace> {
    run_protocol_impl(config, true)
}
