//! Seeded invariant suites behind `chsh-share verify` and the acceptance
//! tests: POVM completeness, channel trace/positivity, closed-form versus
//! brute-force equivalence, SOS soundness, synthesis monotonicity, and
//! marginal invariance.

use crate::chsh::{closed_form_general, concurrence_threshold, sos_bound, two_kraus_v_admissible};
use crate::engine::{
    expectation, run_protocol, run_protocol_faulty, unsharp_chsh_operator, ProtocolConfig,
};
use crate::protocol::{alice_observables, DensityMatrix, Scheme, SchemeFamily};
use crate::qmath::{c64, ComplexMat};
use crate::synthesis::{bounding_sequence_t2, feasible_alpha1_t1, synthesize_t1, synthesize_t2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// Options shared by all suites.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    /// Runs the oracle-equivalence suite against a channel with one wrong
    /// branch weight; the suite must then fail. Negative control only.
    #[doc(hidden)]
    pub inject_channel_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 500,
            tolerance: 1e-9,
            inject_channel_fault: false,
        }
    }
}

/// Result of one suite.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Run every suite in a fixed order.
pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteOutcome> {
    vec![
        povm_completeness(opts),
        channel_trace(opts),
        oracle_equivalence(opts),
        sos_soundness(opts),
        t1_monotonicity(opts),
        t2_monotonicity(opts),
        marginal_invariance(opts),
    ]
}

fn rng_for(opts: &VerifyOptions, salt: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

fn random_scheme(rng: &mut ChaCha12Rng, family: SchemeFamily, v: f64) -> Scheme {
    let alpha = rng.gen_range(0.0..=1.0);
    Scheme::from_family(family, alpha, v).expect("valid parameters")
}

/// Σ K†K = I, POVM completeness and positivity, identical effects across
/// realizations, on a 21×21 (α, v) grid per scheme family.
pub fn povm_completeness(_opts: &VerifyOptions) -> SuiteOutcome {
    let i2 = ComplexMat::identity(2).expect("I2");
    let mut max_kraus = 0.0f64;
    let mut max_povm = 0.0f64;
    let mut max_cross = 0.0f64;
    let mut psd_ok = true;
    for ia in 0..21 {
        for iv in 0..21 {
            let alpha = ia as f64 / 20.0;
            let v = iv as f64 / 20.0;
            let schemes = [
                Scheme::ppm3(alpha).expect("alpha in range"),
                Scheme::four_kraus(alpha, v).expect("in range"),
                Scheme::two_kraus(alpha, v).expect("in range"),
            ];
            for s in &schemes {
                let mut sum = ComplexMat::zeros(2).expect("zeros");
                for k in s.kraus_set() {
                    sum = sum.add(&k.adjoint().mm(&k)).expect("same dim");
                }
                max_kraus = max_kraus.max(sum.max_abs_diff(&i2));

                let povm = s.effective_povm();
                let total = povm.plus.add(&povm.minus).expect("same dim");
                max_povm = max_povm.max(total.max_abs_diff(&i2));
                psd_ok &= povm.plus.is_psd(1e-10) && povm.minus.is_psd(1e-10);

                let grouped = s.povm_from_kraus();
                max_cross = max_cross.max(grouped.plus.max_abs_diff(&povm.plus));
                max_cross = max_cross.max(grouped.minus.max_abs_diff(&povm.minus));
            }
            let four = schemes[1].effective_povm();
            let two = schemes[2].effective_povm();
            max_cross = max_cross.max(four.plus.max_abs_diff(&two.plus));
        }
    }
    let passed = max_kraus < 1e-10 && max_povm < 1e-10 && max_cross < 1e-10 && psd_ok;
    SuiteOutcome {
        name: "povm-completeness",
        passed,
        detail: format!(
            "441-point grid x 3 schemes: max |sum K'K - I| = {max_kraus:.3e}, max |E+ + E- - I| = {max_povm:.3e}, max realization gap = {max_cross:.3e}, effects PSD: {psd_ok}"
        ),
    }
}

fn random_config(rng: &mut ChaCha12Rng, family: SchemeFamily) -> (ProtocolConfig, f64) {
    let k = rng.gen_range(1..=6usize);
    let delta = rng.gen_range(1e-3..FRAC_PI_2);
    let theta = if family == SchemeFamily::Ppm3 && rng.gen_bool(0.5) {
        (FRAC_PI_4 - delta / 2.0).max(0.0)
    } else {
        rng.gen_range(0.0..FRAC_PI_4)
    };
    let v = rng.gen_range(0.0..=1.0);
    let schemes: Vec<Scheme> = (0..k).map(|_| random_scheme(rng, family, v)).collect();
    (
        ProtocolConfig::new(delta, theta, schemes).expect("valid config"),
        v,
    )
}

/// Trace preservation and positivity of every evolved state.
pub fn channel_trace(opts: &VerifyOptions) -> SuiteOutcome {
    let mut rng = rng_for(opts, 2);
    let n = (opts.trials / 5).max(20);
    let mut max_trace = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for _ in 0..n {
        let family = match rng.gen_range(0..3) {
            0 => SchemeFamily::Ppm3,
            1 => SchemeFamily::FourKraus,
            _ => SchemeFamily::TwoKraus,
        };
        let (cfg, _) = random_config(&mut rng, family);
        let trace = run_protocol(&cfg).expect("protocol runs");
        for state in &trace.states {
            let tr = state.matrix().trace();
            max_trace = max_trace.max((tr.re - 1.0).abs()).max(tr.im.abs());
            let eigs = state
                .matrix()
                .hermitian_eigenvalues(1e-10)
                .expect("states are Hermitian");
            min_eig = min_eig.min(eigs[0]);
        }
    }
    let passed = max_trace < 1e-10 && min_eig >= -1e-10;
    SuiteOutcome {
        name: "channel-trace",
        passed,
        detail: format!(
            "{n} random chains: max |tr - 1| = {max_trace:.3e}, min eigenvalue = {min_eig:.3e}"
        ),
    }
}

/// Closed forms versus the brute-force engine on random configurations,
/// `trials` per scheme family, k up to 6.
pub fn oracle_equivalence(opts: &VerifyOptions) -> SuiteOutcome {
    let mut rng = rng_for(opts, 3);
    let mut max_gap = 0.0f64;
    let families = [
        SchemeFamily::Ppm3,
        SchemeFamily::FourKraus,
        SchemeFamily::TwoKraus,
    ];
    for &family in &families {
        for _ in 0..opts.trials {
            let (cfg, v) = random_config(&mut rng, family);
            let trace = if opts.inject_channel_fault {
                run_protocol_faulty(&cfg).expect("protocol runs")
            } else {
                run_protocol(&cfg).expect("protocol runs")
            };
            let alphas: Vec<f64> = cfg.schemes.iter().map(|s| s.alpha()).collect();
            for j in 1..=cfg.k() {
                let closed = closed_form_general(family, j, cfg.delta, cfg.theta, v, &alphas[..j])
                    .expect("closed form");
                max_gap = max_gap.max((closed - trace.chsh_values[j - 1]).abs());
            }
        }
    }
    let passed = max_gap < opts.tolerance;
    SuiteOutcome {
        name: "oracle-equivalence",
        passed,
        detail: format!(
            "{} configurations per family, k <= 6: max |closed - brute| = {max_gap:.3e} (tolerance {:.1e})",
            opts.trials, opts.tolerance
        ),
    }
}

fn random_pure_state(rng: &mut ChaCha12Rng) -> DensityMatrix {
    let mut amps = [c64(0.0, 0.0); 4];
    let mut norm2 = 0.0;
    for a in amps.iter_mut() {
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = (-2.0 * u1.ln()).sqrt();
        *a = c64(r * u2.cos(), r * u2.sin());
        norm2 += a.norm_sqr();
    }
    let inv = 1.0 / norm2;
    let mut m = ComplexMat::zeros(4).expect("zeros");
    for r in 0..4 {
        for c in 0..4 {
            m.set(r, c, amps[r] * amps[c].conj() * inv);
        }
    }
    DensityMatrix::new(m).expect("normalized pure state")
}

/// Brute-force CHSH value of the η-weighted functional never exceeds the
/// SOS bound η0√(2+x) + η1√(2−x).
pub fn sos_soundness(opts: &VerifyOptions) -> SuiteOutcome {
    let mut rng = rng_for(opts, 4);
    let n = opts.trials.max(100);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let rho = random_pure_state(&mut rng);
        let delta = rng.gen_range(0.0..=FRAC_PI_2);
        let eta0 = rng.gen_range(0.0..=1.0);
        let eta1 = rng.gen_range(0.0..=1.0);
        let pair = alice_observables(delta).expect("delta in range");
        let value = expectation(&unsharp_chsh_operator(&pair, eta0, eta1), &rho);
        let bound = sos_bound(eta0, eta1, 2.0 * (2.0 * delta).cos())
            .expect("arguments in range")
            .bound;
        worst = worst.max(value - bound);
    }
    let passed = worst <= opts.tolerance;
    SuiteOutcome {
        name: "sos-soundness",
        passed,
        detail: format!("{n} random pure states: max (value - bound) = {worst:.3e}"),
    }
}

/// Feasible three-Kraus syntheses grow as proven: s_2 ≥ 2(1+ε)(√3+2)s_1,
/// s_l > 2s_{l−1} for l ≥ 3, concurrence inside (threshold, 1), per-Bob
/// values confirmed by the engine.
pub fn t1_monotonicity(opts: &VerifyOptions) -> SuiteOutcome {
    let mut rng = rng_for(opts, 5);
    let n = (opts.trials / 10).max(20);
    let mut checked = 0;
    let mut max_engine_gap = 0.0f64;
    for _ in 0..n {
        let k = rng.gen_range(2..=6usize);
        let delta = crate::chsh::ppm_delta_hi(k) * rng.gen_range(0.2..0.8);
        let Some(base) = feasible_alpha1_t1(k, delta, 0.01) else {
            continue;
        };
        let alpha1 = base * rng.gen_range(0.3..1.0);
        let r = synthesize_t1(k, delta, 0.01, alpha1).expect("valid parameters");
        if !r.feasible {
            return SuiteOutcome {
                name: "t1-monotonicity",
                passed: false,
                detail: format!("shrunk alpha1 = {alpha1} unexpectedly infeasible at k = {k}"),
            };
        }
        let floor = 2.0 * 1.01 * (3f64.sqrt() + 2.0) * r.sequence[0];
        if r.sequence[1] < floor * (1.0 - 1e-12) {
            return SuiteOutcome {
                name: "t1-monotonicity",
                passed: false,
                detail: format!("s_2 = {} below floor {floor}", r.sequence[1]),
            };
        }
        for l in 2..k {
            if r.sequence[l] <= 2.0 * r.sequence[l - 1] {
                return SuiteOutcome {
                    name: "t1-monotonicity",
                    passed: false,
                    detail: format!("s_{} not above 2 s_{} at k = {k}", l + 1, l),
                };
            }
        }
        let threshold = concurrence_threshold(k).expect("k >= 2");
        if !(r.concurrence > threshold && r.concurrence < 1.0) {
            return SuiteOutcome {
                name: "t1-monotonicity",
                passed: false,
                detail: format!(
                    "concurrence {} outside ({threshold}, 1) at k = {k}",
                    r.concurrence
                ),
            };
        }
        let schemes: Vec<Scheme> = r
            .sequence
            .iter()
            .map(|&a| Scheme::ppm3(a).expect("alpha in range"))
            .collect();
        let trace = run_protocol(&ProtocolConfig::new(r.delta, r.theta, schemes).expect("config"))
            .expect("protocol runs");
        for (a, b) in r.per_bob_chsh.iter().zip(&trace.chsh_values) {
            max_engine_gap = max_engine_gap.max((a - b).abs());
        }
        checked += 1;
    }
    let passed = checked > 0 && max_engine_gap < opts.tolerance;
    SuiteOutcome {
        name: "t1-monotonicity",
        passed,
        detail: format!(
            "{checked} feasible syntheses (k <= 6): growth and concurrence band hold, max engine gap = {max_engine_gap:.3e}"
        ),
    }
}

/// Two-Kraus syntheses: s_l > 2s_{l−1}, sequence below the bounding
/// majorant, engine confirmation.
pub fn t2_monotonicity(opts: &VerifyOptions) -> SuiteOutcome {
    let mut rng = rng_for(opts, 6);
    let n = (opts.trials / 10).max(20);
    let mut checked = 0;
    let mut max_engine_gap = 0.0f64;
    for _ in 0..n {
        let k = rng.gen_range(2..=5usize);
        let mut v = rng.gen_range(0.06..0.49);
        if rng.gen_bool(0.5) {
            v = 1.0 - v;
        }
        if !two_kraus_v_admissible(v) {
            continue;
        }
        let mut delta = 0.1;
        let mut result = None;
        for _ in 0..60 {
            let r = synthesize_t2(k, delta, 0.01, v).expect("admissible");
            if r.feasible {
                result = Some(r);
                break;
            }
            delta /= 2.0;
        }
        let Some(r) = result else { continue };
        for l in 1..k {
            if r.sequence[l] <= 2.0 * r.sequence[l - 1] {
                return SuiteOutcome {
                    name: "t2-monotonicity",
                    passed: false,
                    detail: format!("s_{} not above 2 s_{} at k = {k}, v = {v}", l + 1, l),
                };
            }
        }
        let bound = bounding_sequence_t2(k, r.delta, 0.01, v).expect("admissible");
        for (l, (&s, &b)) in r.sequence.iter().zip(&bound.beta).enumerate() {
            if s >= b {
                return SuiteOutcome {
                    name: "t2-monotonicity",
                    passed: false,
                    detail: format!("s_{} = {s} not below beta = {b}", l + 1),
                };
            }
        }
        let schemes: Vec<Scheme> = r
            .sequence
            .iter()
            .map(|&a| Scheme::two_kraus(a, v).expect("alpha in range"))
            .collect();
        let trace = run_protocol(&ProtocolConfig::new(r.delta, r.theta, schemes).expect("config"))
            .expect("protocol runs");
        for (a, b) in r.per_bob_chsh.iter().zip(&trace.chsh_values) {
            max_engine_gap = max_engine_gap.max((a - b).abs());
        }
        checked += 1;
    }
    let passed = checked > 0 && max_engine_gap < opts.tolerance;
    SuiteOutcome {
        name: "t2-monotonicity",
        passed,
        detail: format!(
            "{checked} feasible syntheses (k <= 5): growth and beta bound hold, max engine gap = {max_engine_gap:.3e}"
        ),
    }
}

/// Alice's marginal never moves; the Bell-diagonal term vanishes at
/// θ = π/4; different realizations disturb differently while agreeing on
/// outcome statistics.
pub fn marginal_invariance(opts: &VerifyOptions) -> SuiteOutcome {
    let mut rng = rng_for(opts, 7);
    let n = (opts.trials / 5).max(20);
    let mut max_marginal = 0.0f64;
    let mut max_bell_term = 0.0f64;
    let mut min_state_gap = f64::INFINITY;
    let mut max_stat_gap = 0.0f64;

    for _ in 0..n {
        let family = match rng.gen_range(0..3) {
            0 => SchemeFamily::Ppm3,
            1 => SchemeFamily::FourKraus,
            _ => SchemeFamily::TwoKraus,
        };
        let (cfg, _) = random_config(&mut rng, family);
        let trace = run_protocol(&cfg).expect("protocol runs");
        let first = trace.states[0].alice_marginal();
        for state in &trace.states {
            max_marginal = max_marginal.max(state.alice_marginal().max_abs_diff(&first));
        }

        // Bell-diagonal vanishing at θ = π/4 on a matched chain
        let cfg_me =
            ProtocolConfig::new(cfg.delta, FRAC_PI_4, cfg.schemes.clone()).expect("valid config");
        let trace_me = run_protocol(&cfg_me).expect("protocol runs");
        let pair = alice_observables(cfg.delta).expect("delta in range");
        let diff_op = pair
            .diff()
            .tensor(&ComplexMat::identity(2).expect("I2"))
            .expect("2x2 factors");
        for state in &trace_me.states {
            max_bell_term = max_bell_term.max(expectation(&diff_op, state).abs());
        }

        // realization dependence at matched statistics
        let alpha = rng.gen_range(0.05..0.95);
        let rho = crate::protocol::initial_state(FRAC_PI_4).expect("theta in range");
        let ppm = Scheme::ppm3(alpha).expect("in range");
        let two = Scheme::two_kraus(alpha, 1.0).expect("in range");
        let out_ppm = crate::engine::bob_channel(&rho, &ppm).expect("channel");
        let out_two = crate::engine::bob_channel(&rho, &two).expect("channel");
        min_state_gap = min_state_gap.min(out_ppm.matrix().max_abs_diff(out_two.matrix()));
        let i2 = ComplexMat::identity(2).expect("I2");
        for (ea, eb) in [
            (ppm.effective_povm().plus, two.effective_povm().plus),
            (ppm.effective_povm().minus, two.effective_povm().minus),
        ] {
            let pa = expectation(&i2.tensor(&ea).expect("factors"), &rho);
            let pb = expectation(&i2.tensor(&eb).expect("factors"), &rho);
            max_stat_gap = max_stat_gap.max((pa - pb).abs());
        }
    }

    let passed = max_marginal < 1e-10
        && max_bell_term < 1e-10
        && min_state_gap > 1e-6
        && max_stat_gap < 1e-12;
    SuiteOutcome {
        name: "marginal-invariance",
        passed,
        detail: format!(
            "{n} chains: max marginal drift = {max_marginal:.3e}, max Bell-diagonal term = {max_bell_term:.3e}, min realization gap = {min_state_gap:.3e}, max statistics gap = {max_stat_gap:.3e}"
        ),
    }
}
