//! Constructive parameter-sequence generators for unbounded sharing.
//!
//! Both constructions pick each Bob's measurement weight just above the
//! closed-form violation threshold given all previous weights:
//!
//! - the three-Kraus route fixes θ = π/4 − δ/2 and needs
//!   0 < δ < arcsin(2^{1−k});
//! - the two-Kraus route fixes θ = π/4 and needs an admissible identity
//!   bias v and small δ.
//!
//! A sequence is feasible when every term stays inside its admissible
//! interval and every Bob's CHSH value exceeds 2. Violation margins are
//! evaluated through exact rearrangements of the closed forms, so they stay
//! meaningful when the excess over 2 is far below machine epsilon on the
//! raw CHSH value.

use crate::chsh::{
    one_minus_cos, ppm_delta_hi, ppm_threshold_from_deficit, two_kraus_alpha_cap,
    two_kraus_excluded_alpha, two_kraus_threshold_from_deficit, two_kraus_v_admissible,
    xi_one_minus_exact, ProductDeficit,
};
use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_4, PI};

/// Ratio of δ to sinδ on (0, π/4]: sinδ ≥ (2√2/π)·δ there, so multiplying
/// 1/δ by this constant majorizes 1/sinδ. Used by the bounding sequence.
pub const JORDAN_QUARTER_PI: f64 = PI / (2.0 * std::f64::consts::SQRT_2);

/// Which constructive route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    T1,
    T2,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::T1 => "1",
            Theorem::T2 => "2",
        }
    }
}

/// A candidate weight sequence with feasibility verdict and per-Bob CHSH
/// margins.
#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub theorem: Theorem,
    pub k: usize,
    pub delta: f64,
    pub theta: f64,
    /// Identity bias of the realization; 1 for the three-Kraus route.
    pub v: f64,
    pub epsilon: f64,
    /// s_1 … s_l, truncated at the first index whose predecessor escaped.
    pub sequence: Vec<f64>,
    pub feasible: bool,
    /// 2 + margin per Bob, one entry per computed sequence term.
    pub per_bob_chsh: Vec<f64>,
    /// Exact violation margins I^l − 2; positive means CHSH violation.
    pub per_bob_margin: Vec<f64>,
    pub concurrence: f64,
    /// First 1-based index whose term escaped its admissible interval.
    pub infeasible_at: Option<usize>,
    pub infeasible_reason: Option<String>,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::OutOfRange {
            name: "epsilon",
            value: epsilon,
            range: "(0, 1]",
        });
    }
    Ok(())
}

/// Three-Kraus sequence: s_1 = α_1, s_l = (1+ε)·threshold_l at
/// θ = π/4 − δ/2. Tilt outside (0, arcsin 2^{1−k}) is reported as
/// infeasible, not as an error.
pub fn synthesize_t1(k: usize, delta: f64, epsilon: f64, alpha1: f64) -> Result<SynthesisResult> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "[1, ..)",
        });
    }
    check_epsilon(epsilon)?;
    if !(alpha1 > 0.0 && alpha1 <= 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha1",
            value: alpha1,
            range: "(0, 1]",
        });
    }

    let hi = ppm_delta_hi(k);
    let theta = FRAC_PI_4 - delta / 2.0;
    let concurrence = delta.cos();
    let mut result = SynthesisResult {
        theorem: Theorem::T1,
        k,
        delta,
        theta,
        v: 1.0,
        epsilon,
        sequence: Vec::new(),
        feasible: false,
        per_bob_chsh: Vec::new(),
        per_bob_margin: Vec::new(),
        concurrence,
        infeasible_at: None,
        infeasible_reason: None,
    };
    if !(delta > 0.0 && delta < hi) {
        result.infeasible_reason = Some(format!(
            "delta = {delta} outside the window (0, {hi}) required for k = {k}"
        ));
        return Ok(result);
    }

    let sd = delta.sin();
    let mut deficit = ProductDeficit::new();
    let mut feasible = true;
    for l in 1..=k {
        let threshold = if l == 1 {
            0.0
        } else {
            ppm_threshold_from_deficit(l, delta, deficit.deficit())
        };
        let s = if l == 1 {
            alpha1
        } else {
            (1.0 + epsilon) * threshold
        };
        let pow = 2f64.powi(l as i32 - 1);
        // exact rearrangement of the closed form: I^l − 2
        let margin = 2.0 / pow * sd * (1.0 - pow * sd) * (s - threshold);
        result.sequence.push(s);
        result.per_bob_margin.push(margin);
        result.per_bob_chsh.push(2.0 + margin);

        if s > 1.0 {
            feasible = false;
            result.infeasible_at = Some(l);
            result.infeasible_reason =
                Some(format!("s_{l} = {s} exceeds 1 (threshold {threshold})"));
            break;
        }
        if margin <= 0.0 {
            feasible = false;
            result.infeasible_at = Some(l);
            result.infeasible_reason = Some(format!("I^{l} does not exceed 2"));
            break;
        }
        deficit.absorb(s / 2.0);
    }
    result.feasible = feasible && result.sequence.len() == k;
    Ok(result)
}

/// Two-Kraus sequence: s_1 = (1+ε)·tan(δ/2), s_l = (1+ε)·threshold_l at
/// θ = π/4, feasible while every term stays at or below the α cap of v.
pub fn synthesize_t2(k: usize, delta: f64, epsilon: f64, v: f64) -> Result<SynthesisResult> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: 0.0,
            range: "[1, ..)",
        });
    }
    check_epsilon(epsilon)?;
    if !(delta > 0.0 && delta <= FRAC_PI_4) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, pi/4]",
        });
    }
    if !two_kraus_v_admissible(v) {
        return Err(Error::InadmissibleV(v));
    }

    let cap = two_kraus_alpha_cap(v);
    let excluded = two_kraus_excluded_alpha(v);
    let c = 16.0 * v * (1.0 - v);
    let sd = delta.sin();

    let mut result = SynthesisResult {
        theorem: Theorem::T2,
        k,
        delta,
        theta: FRAC_PI_4,
        v,
        epsilon,
        sequence: Vec::new(),
        feasible: false,
        per_bob_chsh: Vec::new(),
        per_bob_margin: Vec::new(),
        concurrence: 1.0,
        infeasible_at: None,
        infeasible_reason: None,
    };

    // series-based deficit drives the recursion; exact-ξ deficit certifies
    // the violation margins
    let mut series_deficit = ProductDeficit::new();
    let mut exact_deficit = ProductDeficit::new();
    let mut feasible = true;
    for l in 1..=k {
        let s = if l == 1 {
            (1.0 + epsilon) * (delta / 2.0).tan()
        } else {
            (1.0 + epsilon) * two_kraus_threshold_from_deficit(l, delta, series_deficit.deficit())
        };
        result.sequence.push(s);

        if s > cap {
            feasible = false;
            result.infeasible_at = Some(l);
            result.infeasible_reason = Some(format!(
                "s_{l} = {s} exceeds the alpha cap {cap} for v = {v}"
            ));
            break;
        }
        if let Some(x) = excluded {
            if (s - x).abs() < 1e-12 {
                feasible = false;
                result.infeasible_at = Some(l);
                result.infeasible_reason =
                    Some(format!("s_{l} hits the excluded series point {x}"));
                break;
            }
        }

        // exact-ξ threshold and margin
        let pow = 2f64.powi(l as i32 - 1);
        let exact_lb = pow / sd * (one_minus_cos(delta) + delta.cos() * exact_deficit.deficit());
        let margin = 2.0 / pow * sd * (s - exact_lb);
        result.per_bob_margin.push(margin);
        result.per_bob_chsh.push(2.0 + margin);
        if margin <= 0.0 {
            feasible = false;
            result.infeasible_at = Some(l);
            result.infeasible_reason = Some(format!("I^{l} does not exceed 2"));
            break;
        }

        series_deficit.absorb(s * s / c);
        exact_deficit.absorb(xi_one_minus_exact(v, s)? / 2.0);
    }
    result.feasible = feasible && result.sequence.len() == k && result.per_bob_chsh.len() == k;
    Ok(result)
}

/// Uncapped three-Kraus recursion (no feasibility marker); used to study the
/// vanishing limit α_1 → 0 where terms may transiently exceed 1.
pub fn raw_sequence_t1(k: usize, delta: f64, epsilon: f64, alpha1: f64) -> Result<Vec<f64>> {
    let hi = ppm_delta_hi(k);
    if !(delta > 0.0 && delta < hi) {
        return Err(Error::OutsideDeltaWindow {
            delta,
            lo: 0.0,
            hi,
            k,
        });
    }
    check_epsilon(epsilon)?;
    let mut out = Vec::with_capacity(k);
    let mut deficit = ProductDeficit::new();
    for l in 1..=k {
        let s = if l == 1 {
            alpha1
        } else {
            (1.0 + epsilon) * ppm_threshold_from_deficit(l, delta, deficit.deficit())
        };
        out.push(s);
        deficit.absorb(s / 2.0);
    }
    Ok(out)
}

/// Uncapped two-Kraus recursion for the δ → 0 limit study.
pub fn raw_sequence_t2(k: usize, delta: f64, epsilon: f64, v: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta <= FRAC_PI_4) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, pi/4]",
        });
    }
    if !two_kraus_v_admissible(v) {
        return Err(Error::InadmissibleV(v));
    }
    check_epsilon(epsilon)?;
    let c = 16.0 * v * (1.0 - v);
    let mut out = Vec::with_capacity(k);
    let mut deficit = ProductDeficit::new();
    for l in 1..=k {
        let s = if l == 1 {
            (1.0 + epsilon) * (delta / 2.0).tan()
        } else {
            (1.0 + epsilon) * two_kraus_threshold_from_deficit(l, delta, deficit.deficit())
        };
        out.push(s);
        deficit.absorb(s * s / c);
    }
    Ok(out)
}

/// Majorant sequence for the two-Kraus route, β_1 = (1+ε)·C·δ/2 and
///
///   β_l = (2^{l−1}(1+ε)·C/δ)·[1 − (1 − δ²/2)·∏_{j<l}(1 − β_j²/(16v(1−v)))]
///
/// with C = π/(2√2). The constant compensates sinδ < δ (and tan(δ/2) > δ/2)
/// on (0, π/4], so s_l ≤ β_l holds elementwise; without it the plain 1/δ
/// prefactors undershoot the actual sequence.
pub fn bounding_sequence_t2(
    k: usize,
    delta: f64,
    epsilon: f64,
    v: f64,
) -> Result<BoundingSequence> {
    if !(delta > 0.0 && delta <= FRAC_PI_4) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "(0, pi/4]",
        });
    }
    if !two_kraus_v_admissible(v) {
        return Err(Error::InadmissibleV(v));
    }
    check_epsilon(epsilon)?;
    let c = 16.0 * v * (1.0 - v);
    let half_d2 = delta * delta / 2.0;
    let mut beta = Vec::with_capacity(k);
    let mut deficit = ProductDeficit::new();
    for l in 1..=k {
        let b = if l == 1 {
            (1.0 + epsilon) * JORDAN_QUARTER_PI * delta / 2.0
        } else {
            if beta[l - 2] >= 1.0 {
                break; // majorant argument stops being meaningful
            }
            let pow = 2f64.powi(l as i32 - 1);
            pow * (1.0 + epsilon) * JORDAN_QUARTER_PI / delta
                * (half_d2 + (1.0 - half_d2) * deficit.deficit())
        };
        beta.push(b);
        deficit.absorb(b * b / c);
    }
    Ok(BoundingSequence { beta })
}

/// The β majorant of [`bounding_sequence_t2`].
#[derive(Debug, Clone)]
pub struct BoundingSequence {
    pub beta: Vec<f64>,
}

/// Largest k ≤ k_cap admitting a feasible synthesis; 0 if none.
pub fn max_feasible_k(
    theorem: Theorem,
    delta: f64,
    epsilon: f64,
    v: Option<f64>,
    alpha1: Option<f64>,
    k_cap: usize,
) -> Result<usize> {
    let mut best = 0;
    for k in 1..=k_cap {
        let feasible = match theorem {
            Theorem::T1 => {
                let a1 = alpha1.ok_or(Error::OutOfRange {
                    name: "alpha1",
                    value: f64::NAN,
                    range: "(0, 1]",
                })?;
                synthesize_t1(k, delta, epsilon, a1)?.feasible
            }
            Theorem::T2 => {
                let vv = v.ok_or(Error::OutOfRange {
                    name: "v",
                    value: f64::NAN,
                    range: "(0, 1)",
                })?;
                synthesize_t2(k, delta, epsilon, vv)?.feasible
            }
        };
        if feasible {
            best = k;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Admissible tilt interval for a chain of k Bobs, and the induced θ window
/// for the three-Kraus route.
#[derive(Debug, Clone, Copy)]
pub struct DeltaWindow {
    pub lo: f64,
    pub hi: f64,
    /// Whether the upper edge itself is admissible (true only for T2's π/4).
    pub hi_inclusive: bool,
    pub theta_window: Option<(f64, f64)>,
}

pub fn delta_window(theorem: Theorem, k: usize, v: Option<f64>) -> Result<DeltaWindow> {
    match theorem {
        Theorem::T1 => {
            if k < 2 {
                return Err(Error::OutOfRange {
                    name: "k",
                    value: k as f64,
                    range: "[2, ..)",
                });
            }
            let hi = ppm_delta_hi(k);
            Ok(DeltaWindow {
                lo: 0.0,
                hi,
                hi_inclusive: false,
                theta_window: Some((FRAC_PI_4 - hi / 2.0, FRAC_PI_4)),
            })
        }
        Theorem::T2 => {
            let vv = v.ok_or(Error::OutOfRange {
                name: "v",
                value: f64::NAN,
                range: "(0, 1)",
            })?;
            if !two_kraus_v_admissible(vv) {
                return Err(Error::InadmissibleV(vv));
            }
            Ok(DeltaWindow {
                lo: 0.0,
                hi: FRAC_PI_4,
                hi_inclusive: true,
                theta_window: None,
            })
        }
    }
}

/// Admissibility record for the two-Kraus identity bias v.
#[derive(Debug, Clone, Copy)]
pub struct VAdmissibility {
    pub admissible: bool,
    pub alpha_cap: f64,
    /// Series point excluded from the sufficiency argument, when defined.
    pub excluded_alpha: Option<f64>,
}

pub fn v_admissibility(v: f64) -> Result<VAdmissibility> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            range: "(0, 1)",
        });
    }
    Ok(VAdmissibility {
        admissible: two_kraus_v_admissible(v),
        alpha_cap: two_kraus_alpha_cap(v),
        excluded_alpha: two_kraus_excluded_alpha(v),
    })
}

/// Largest power-of-ten α_1 ≤ 0.1 making the three-Kraus synthesis feasible
/// at (k, δ, ε); None when even 1e-300 fails.
pub fn feasible_alpha1_t1(k: usize, delta: f64, epsilon: f64) -> Option<f64> {
    let mut alpha1 = 0.1;
    for _ in 0..300 {
        if let Ok(r) = synthesize_t1(k, delta, epsilon, alpha1) {
            if r.feasible {
                return Some(alpha1);
            }
            if r.infeasible_reason.as_deref().map(|s| s.contains("window")) == Some(true) {
                return None;
            }
        }
        alpha1 /= 10.0;
    }
    None
}
