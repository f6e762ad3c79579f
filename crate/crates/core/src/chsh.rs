//! Closed-form CHSH expressions, sum-of-squares bounds, critical parameters
//! and the incompatibility trade-off curves.
//!
//! Everything here is analytic; the independent numeric check lives in
//! [`crate::engine`]. The two must agree to 1e-9 on random configurations —
//! that equivalence is the central correctness property of the crate.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_4;

/// 1 − cosδ evaluated without cancellation.
#[inline]
pub fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

/// Stable accumulator for the deficit 1 − ∏(1 − y_j).
///
/// The recurrence q ← q + (1 − q)·y keeps full relative precision even when
/// every y_j is far below machine epsilon, which the synthesis sequences
/// need for large k.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductDeficit {
    q: f64,
}

impl ProductDeficit {
    pub fn new() -> Self {
        Self { q: 0.0 }
    }

    /// Multiply the underlying product by (1 − y).
    pub fn absorb(&mut self, y: f64) {
        self.q += (1.0 - self.q) * y;
    }

    /// 1 − ∏(1 − y_j).
    pub fn deficit(&self) -> f64 {
        self.q
    }

    /// ∏(1 − y_j).
    pub fn product(&self) -> f64 {
        1.0 - self.q
    }
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

/// Sum-of-squares bound η0·√(2+x) + η1·√(2−x) on the CHSH value, where x is
/// the anticommutator expectation ⟨{A0,A1}⟩ on the shared state.
#[derive(Debug, Clone, Copy)]
pub struct SosBound {
    pub eta0: f64,
    pub eta1: f64,
    pub anticomm: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub bound: f64,
}

/// Evaluate the SOS bound for unsharpness parameters η0, η1 ∈ \[0,1\] and
/// anticommutator expectation x ∈ [−2, 2].
pub fn sos_bound(eta0: f64, eta1: f64, anticomm: f64) -> Result<SosBound> {
    check_unit("eta0", eta0)?;
    check_unit("eta1", eta1)?;
    if !(-2.0..=2.0).contains(&anticomm) || !anticomm.is_finite() {
        return Err(Error::OutOfRange {
            name: "anticomm",
            value: anticomm,
            range: "[-2, 2]",
        });
    }
    let omega1 = eta0 * (2.0 + anticomm).sqrt();
    let omega2 = eta1 * (2.0 - anticomm).sqrt();
    Ok(SosBound {
        eta0,
        eta1,
        anticomm,
        omega1,
        omega2,
        bound: omega1 + omega2,
    })
}

/// The two critical-unsharpness curves of the incompatibility trade-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TradeoffCurve {
    /// Both of Bob's observables unsharp with equal parameter (curve a).
    EqualUnsharpness,
    /// First observable sharp, second unsharp (curve b).
    OneSharp,
}

/// Critical unsharpness above which the CHSH value exceeds 2, as a function
/// of the anticommutator expectation x ∈ [0, 2].
///
/// Curve a: 2/(√(2+x) + √(2−x)), monotone increasing.
/// Curve b: (2 − √(2+x))/√(2−x), monotone decreasing with limit 0 at x = 2.
pub fn critical_eta(curve: TradeoffCurve, x: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&x) || !x.is_finite() {
        return Err(Error::OutOfRange {
            name: "anticomm",
            value: x,
            range: "[0, 2]",
        });
    }
    Ok(match curve {
        TradeoffCurve::EqualUnsharpness => 2.0 / ((2.0 + x).sqrt() + (2.0 - x).sqrt()),
        TradeoffCurve::OneSharp => {
            if x >= 2.0 {
                0.0
            } else {
                (2.0 - (2.0 + x).sqrt()) / (2.0 - x).sqrt()
            }
        }
    })
}

fn check_chsh_args(k: usize, delta: f64, theta: f64, alphas: &[f64]) -> Result<()> {
    if k == 0 || alphas.len() != k {
        return Err(Error::LengthMismatch {
            expected: k.max(1),
            got: alphas.len(),
        });
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&delta) {
        return Err(Error::OutOfRange {
            name: "delta",
            value: delta,
            range: "[0, pi/2]",
        });
    }
    if !(0.0..=FRAC_PI_4).contains(&theta) {
        return Err(Error::OutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi/4]",
        });
    }
    for &a in alphas {
        check_unit("alpha", a)?;
    }
    Ok(())
}

/// Closed-form CHSH value between Alice and Bob^k for the three-Kraus
/// probabilistic-projective scheme:
///
///   I^k = 2[ cosδ·sin2θ·∏_{j<k}(1 − α_j/2) + sinδ·cos2θ
///            + (α_k/2^{k−1})·sinδ·(1 − 2^{k−1}·cos2θ) ].
pub fn closed_form_ppm(k: usize, delta: f64, theta: f64, alphas: &[f64]) -> Result<f64> {
    check_chsh_args(k, delta, theta, alphas)?;
    let decay: f64 = alphas[..k - 1].iter().map(|a| 1.0 - a / 2.0).product();
    let pow = 2f64.powi(k as i32 - 1);
    let (s2t, c2t) = ((2.0 * theta).sin(), (2.0 * theta).cos());
    Ok(2.0
        * (delta.cos() * s2t * decay
            + delta.sin() * c2t
            + alphas[k - 1] / pow * delta.sin() * (1.0 - pow * c2t)))
}

/// Closed-form CHSH value for the two-parameter POVM families.
///
/// FourKraus realizes the effects through two projective and two identity
/// branches; the per-step decay is (1 − α_j/2) as for the three-Kraus
/// scheme. TwoKraus realizes the same effects with two Kraus operators;
/// the per-step decay is (1 + ξ_j)/2 with the exact ξ of [`xi`].
pub fn closed_form_general(
    family: crate::protocol::SchemeFamily,
    k: usize,
    delta: f64,
    theta: f64,
    v: f64,
    alphas: &[f64],
) -> Result<f64> {
    use crate::protocol::SchemeFamily;
    check_chsh_args(k, delta, theta, alphas)?;
    check_unit("v", v)?;
    let pow = 2f64.powi(k as i32 - 1);
    let (s2t, c2t) = ((2.0 * theta).sin(), (2.0 * theta).cos());
    let bias = 2.0 * v - 1.0;
    match family {
        SchemeFamily::Ppm3 => closed_form_ppm(k, delta, theta, alphas),
        SchemeFamily::FourKraus => {
            let decay: f64 = alphas[..k - 1].iter().map(|a| 1.0 - a / 2.0).product();
            Ok(2.0
                * (delta.cos() * s2t * decay
                    + bias * delta.sin() * c2t
                    + alphas[k - 1] / pow * delta.sin() * (1.0 - pow * bias * c2t)))
        }
        SchemeFamily::TwoKraus => {
            let mut prod = 1.0;
            for &a in &alphas[..k - 1] {
                prod *= 1.0 + xi(v, a)?.xi_exact;
            }
            Ok(2.0 / pow
                * (delta.cos() * s2t * prod
                    + pow * bias * delta.sin() * c2t
                    + alphas[k - 1] * delta.sin() * (1.0 - pow * bias * c2t)))
        }
    }
}

/// State-shrink factor of the two-Kraus channel and its series stand-in.
///
/// `q1`, `q2` and `xi_series` only make sense on the interior 0 < v < 1;
/// on the endpoints the exact branch is √(1−α) and the series fields mirror
/// the exact value.
#[derive(Debug, Clone, Copy)]
pub struct XiFactors {
    pub v: f64,
    pub alpha: f64,
    pub q1: f64,
    pub q2: f64,
    pub xi_exact: f64,
    pub xi_series: f64,
}

/// ξ for the two-Kraus realization:
///
///   ξ = √(1−α)                      for v ∈ {0, 1},
///   ξ = √(1−α²)                     for v = 1/2,
///   ξ = v√(1+q1) + (1−v)√(1−q2)     otherwise,
///
/// with q1 = α(1−2v)/v − α²(1−v)/v and q2 = α(1−2v)/(1−v) + α²v/(1−v).
/// The series field carries the fourth-order polynomial stand-in used by the
/// sufficient bound of the two-Kraus sharing theorem.
pub fn xi(v: f64, alpha: f64) -> Result<XiFactors> {
    check_unit("v", v)?;
    check_unit("alpha", alpha)?;
    if v == 0.0 || v == 1.0 {
        let exact = (1.0 - alpha).sqrt();
        return Ok(XiFactors {
            v,
            alpha,
            q1: 0.0,
            q2: 0.0,
            xi_exact: exact,
            xi_series: exact,
        });
    }
    let inv = 1.0 / (8.0 * v * (1.0 - v));
    let xi_series =
        1.0 - alpha.powi(2) * inv + alpha.powi(3) * (inv - 0.5) - alpha.powi(4) * (inv - 0.375);
    if v == 0.5 {
        let exact = (1.0 - alpha * alpha).sqrt();
        return Ok(XiFactors {
            v,
            alpha,
            q1: -alpha * alpha,
            q2: alpha * alpha,
            xi_exact: exact,
            xi_series,
        });
    }
    let q1 = alpha * (1.0 - 2.0 * v) / v - alpha * alpha * (1.0 - v) / v;
    let q2 = alpha * (1.0 - 2.0 * v) / (1.0 - v) + alpha * alpha * v / (1.0 - v);
    if 1.0 + q1 < -1e-12 || 1.0 - q2 < -1e-12 {
        return Err(Error::NegativeRadicand { v, alpha });
    }
    // radicands in factored form: 1+q1 = (1−α)(v(1−α)+α)/v and
    // 1−q2 = (1−α)(1−v(1−α))/(1−v), nonnegative without cancellation
    let r1 = ((1.0 - alpha) * (v * (1.0 - alpha) + alpha) / v)
        .max(0.0)
        .sqrt();
    let r2 = ((1.0 - alpha) * (1.0 - v * (1.0 - alpha)) / (1.0 - v))
        .max(0.0)
        .sqrt();
    Ok(XiFactors {
        v,
        alpha,
        q1,
        q2,
        xi_exact: v * r1 + (1.0 - v) * r2,
        xi_series,
    })
}

/// 1 − ξ evaluated without the cancellation of `1.0 - xi(..)`, so tiny α
/// keep meaningful relative precision.
pub fn xi_one_minus_exact(v: f64, alpha: f64) -> Result<f64> {
    check_unit("v", v)?;
    check_unit("alpha", alpha)?;
    if v == 0.0 || v == 1.0 {
        return Ok(alpha / (1.0 + (1.0 - alpha).sqrt()));
    }
    if v == 0.5 {
        let a2 = alpha * alpha;
        return Ok(a2 / (1.0 + (1.0 - a2).sqrt()));
    }
    let q1 = alpha * (1.0 - 2.0 * v) / v - alpha * alpha * (1.0 - v) / v;
    let q2 = alpha * (1.0 - 2.0 * v) / (1.0 - v) + alpha * alpha * v / (1.0 - v);
    if 1.0 + q1 < -1e-12 || 1.0 - q2 < -1e-12 {
        return Err(Error::NegativeRadicand { v, alpha });
    }
    let r1 = ((1.0 - alpha) * (v * (1.0 - alpha) + alpha) / v)
        .max(0.0)
        .sqrt();
    let r2 = ((1.0 - alpha) * (1.0 - v * (1.0 - alpha)) / (1.0 - v))
        .max(0.0)
        .sqrt();
    let m1 = -q1 / (1.0 + r1);
    let m2 = q2 / (1.0 + r2);
    Ok(v * m1 + (1.0 - v) * m2)
}

/// Lower bound on α_1 for a CHSH violation between Alice and the first Bob:
///
///   α_1 > (1 − sin(2θ−δ) − 2v·sinδ·cos2θ) / (sinδ·(1 − (2v−1)·cos2θ)).
///
/// A non-positive value means any α_1 > 0 violates. A degenerate denominator
/// (δ = 0, or θ and v conspiring) carries no finite threshold.
pub fn alpha1_lower_bound(delta: f64, theta: f64, v: f64) -> Result<f64> {
    check_unit("v", v)?;
    let den = delta.sin() * (1.0 - (2.0 * v - 1.0) * (2.0 * theta).cos());
    if den <= 0.0 {
        return Err(Error::NoFiniteThreshold(format!(
            "degenerate denominator {den:e} at delta = {delta}, theta = {theta}, v = {v}"
        )));
    }
    let num = 1.0 - (2.0 * theta - delta).sin() - 2.0 * v * delta.sin() * (2.0 * theta).cos();
    Ok(num / den)
}

/// Upper edge of the admissible tilt window for k sequential Bobs under the
/// three-Kraus scheme: arcsin(2^{1−k}).
pub fn ppm_delta_hi(k: usize) -> f64 {
    2f64.powi(1 - (k as i32)).asin()
}

pub(crate) fn ppm_threshold_from_deficit(k: usize, delta: f64, deficit: f64) -> f64 {
    let pow = 2f64.powi(k as i32 - 1);
    pow * delta.cos().powi(2) * deficit / (delta.sin() * (1.0 - pow * delta.sin()))
}

/// Lower bound on α_k for Bob^k to violate CHSH under the three-Kraus scheme
/// at θ = π/4 − δ/2:
///
///   α_k > 2^{k−1}·cos²δ·(1 − ∏_{j<k}(1 − α_j/2)) / (sinδ·(1 − 2^{k−1}·sinδ)).
///
/// Valid for 0 < δ < arcsin(2^{1−k}); outside that window the denominator
/// degenerates and no α_k ∈ (0, 1] can work.
pub fn alphak_lower_bound_ppm(k: usize, delta: f64, alphas_prefix: &[f64]) -> Result<f64> {
    if k < 2 {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "[2, ..)",
        });
    }
    if alphas_prefix.len() != k - 1 {
        return Err(Error::LengthMismatch {
            expected: k - 1,
            got: alphas_prefix.len(),
        });
    }
    let hi = ppm_delta_hi(k);
    if !(delta > 0.0 && delta < hi) {
        return Err(Error::OutsideDeltaWindow {
            delta,
            lo: 0.0,
            hi,
            k,
        });
    }
    if alphas_prefix.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: f64::NAN,
            range: "[0, ..)",
        });
    }
    let mut deficit = ProductDeficit::new();
    for &a in alphas_prefix {
        deficit.absorb(a / 2.0);
    }
    Ok(ppm_threshold_from_deficit(k, delta, deficit.deficit()))
}

/// α upper bound (1 − 4v + 4v²)/(1 − 3v + 3v²) of the two-Kraus sufficient
/// condition.
pub fn two_kraus_alpha_cap(v: f64) -> f64 {
    (1.0 - 4.0 * v + 4.0 * v * v) / (1.0 - 3.0 * v + 3.0 * v * v)
}

/// Admissibility of v for the two-Kraus unbounded-sharing construction:
/// cap(v)² < 16v(1−v) with a nonzero cap. Symmetric about v = 1/2, which
/// itself is excluded (the cap vanishes there).
pub fn two_kraus_v_admissible(v: f64) -> bool {
    if !(0.0..=1.0).contains(&v) {
        return false;
    }
    let cap = two_kraus_alpha_cap(v);
    cap > 0.0 && cap * cap < 16.0 * v * (1.0 - v)
}

/// The α value excluded from the binomial-series argument for
/// v < (2−√2)/4 (and mirror); vacuous when negative.
pub fn two_kraus_excluded_alpha(v: f64) -> Option<f64> {
    let w = v.min(1.0 - v);
    let disc = 1.0 - 8.0 * w * (1.0 - w);
    if disc <= 0.0 {
        return None;
    }
    Some(1.0 - (1.0 + 2.0 * disc.sqrt()) / (2.0 * (1.0 - w)))
}

pub(crate) fn two_kraus_threshold_from_deficit(k: usize, delta: f64, deficit: f64) -> f64 {
    let pow = 2f64.powi(k as i32 - 1);
    pow / delta.sin() * (one_minus_cos(delta) + delta.cos() * deficit)
}

/// Lower bound on α_k for Bob^k under the two-Kraus scheme at θ = π/4 (the
/// sufficient, series-based condition):
///
///   α_k > (2^{k−1}/sinδ)·[1 − cosδ·∏_{j<k}(1 − α_j²/(16v(1−v)))].
pub fn alphak_lower_bound_twokraus(
    k: usize,
    delta: f64,
    v: f64,
    alphas_prefix: &[f64],
) -> Result<f64> {
    if k < 2 {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "[2, ..)",
        });
    }
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
    if alphas_prefix.len() != k - 1 {
        return Err(Error::LengthMismatch {
            expected: k - 1,
            got: alphas_prefix.len(),
        });
    }
    let cap = two_kraus_alpha_cap(v);
    let excluded = two_kraus_excluded_alpha(v);
    for &a in alphas_prefix {
        if !(0.0..=cap + 1e-12).contains(&a) {
            return Err(Error::InadmissibleAlpha {
                alpha: a,
                detail: format!("outside [0, {cap}] for v = {v}"),
            });
        }
        if let Some(x) = excluded {
            if (a - x).abs() < 1e-12 {
                return Err(Error::InadmissibleAlpha {
                    alpha: a,
                    detail: format!("excluded series point {x} for v = {v}"),
                });
            }
        }
    }
    let c = 16.0 * v * (1.0 - v);
    let mut deficit = ProductDeficit::new();
    for &a in alphas_prefix {
        deficit.absorb(a * a / c);
    }
    Ok(two_kraus_threshold_from_deficit(
        k,
        delta,
        deficit.deficit(),
    ))
}

/// Lower edge of the concurrence band admitting k sequential violations
/// under the three-Kraus scheme: 2^{1−k}·√(4^{k−1} − 1).
///
/// The band induced by the tilt window 0 < δ < arcsin(2^{1−k}) and
/// θ = π/4 − δ/2 is (threshold, 1): sin2θ = cosδ, and cosδ exceeds the
/// threshold exactly when δ is inside the window.
pub fn concurrence_threshold(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "[2, ..)",
        });
    }
    let pow4 = 4f64.powi(k as i32 - 1);
    Ok(2f64.powi(1 - (k as i32)) * (pow4 - 1.0).sqrt())
}

/// The k = 2 threshold ratio cos²δ/(sinδ(1 − 2sinδ)).
pub fn ppm_k2_ratio(delta: f64) -> f64 {
    delta.cos().powi(2) / (delta.sin() * (1.0 - 2.0 * delta.sin()))
}

/// Minimize the k = 2 ratio over the window (0, π/6) by golden-section
/// search; returns (argmin, min). The minimum is 2(√3 + 2) at
/// δ = 2·tan⁻¹(2 + √3 − √(6 + 4√3)).
pub fn ppm_k2_min_ratio() -> (f64, f64) {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (1e-6, std::f64::consts::FRAC_PI_6 - 1e-9);
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let (mut fc, mut fd) = (ppm_k2_ratio(c), ppm_k2_ratio(d));
    while (b - a) > 1e-13 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = ppm_k2_ratio(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = ppm_k2_ratio(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, ppm_k2_ratio(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{expectation, run_protocol, unsharp_chsh_operator, ProtocolConfig};
    use crate::protocol::{alice_observables, DensityMatrix, Scheme, SchemeFamily};
    use crate::qmath::{c64, ComplexMat};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::SQRT_2;

    #[test]
    fn sos_bound_examples() {
        let b = sos_bound(1.0, 1.0, 0.0).unwrap();
        assert!((b.bound - 2.0 * SQRT_2).abs() < 1e-12);

        let b = sos_bound(1.0 / SQRT_2, 1.0 / SQRT_2, 0.0).unwrap();
        assert!((b.bound - 2.0).abs() < 1e-12);

        let b = sos_bound(1.0, 0.5, 1.0).unwrap();
        assert!((b.omega1 - 3f64.sqrt()).abs() < 1e-12);
        assert!((b.omega2 - 0.5).abs() < 1e-12);
        assert!((b.bound - (3f64.sqrt() + 0.5)).abs() < 1e-12);
        assert!((b.bound - (b.omega1 + b.omega2)).abs() < 1e-15);

        assert!(sos_bound(1.2, 0.5, 0.0).is_err());
        assert!(sos_bound(0.5, 0.5, 2.5).is_err());
    }

    #[test]
    fn tradeoff_curve_endpoints_and_monotonicity() {
        let a0 = critical_eta(TradeoffCurve::EqualUnsharpness, 0.0).unwrap();
        assert!((a0 - 1.0 / SQRT_2).abs() < 1e-12);
        let a1 = critical_eta(TradeoffCurve::EqualUnsharpness, 1.0).unwrap();
        assert!((a1 - 2.0 / (3f64.sqrt() + 1.0)).abs() < 1e-12);
        let a2 = critical_eta(TradeoffCurve::EqualUnsharpness, 2.0).unwrap();
        assert!((a2 - 1.0).abs() < 1e-12);

        let b0 = critical_eta(TradeoffCurve::OneSharp, 0.0).unwrap();
        assert!((b0 - (SQRT_2 - 1.0)).abs() < 1e-12);
        let b2 = critical_eta(TradeoffCurve::OneSharp, 2.0).unwrap();
        assert_eq!(b2, 0.0);

        let mut prev_a = f64::NEG_INFINITY;
        let mut prev_b = f64::INFINITY;
        for i in 0..=200 {
            let x = 2.0 * i as f64 / 200.0;
            let va = critical_eta(TradeoffCurve::EqualUnsharpness, x).unwrap();
            let vb = critical_eta(TradeoffCurve::OneSharp, x).unwrap();
            assert!(va > prev_a, "curve a must increase");
            assert!(vb < prev_b, "curve b must decrease");
            prev_a = va;
            prev_b = vb;
        }

        assert!(critical_eta(TradeoffCurve::OneSharp, 2.1).is_err());
    }

    #[test]
    fn closed_form_ppm_examples() {
        // maximal violation
        let v = closed_form_ppm(1, FRAC_PI_4, FRAC_PI_4, &[1.0]).unwrap();
        assert!((v - 2.0 * SQRT_2).abs() < 1e-12);

        // δ = 0 kills every δ-term: I = 2 sin2θ ∏(1−α_j/2) ≤ 2
        for theta in [0.1, 0.5, FRAC_PI_4] {
            let alphas = [0.3, 0.6];
            let v = closed_form_ppm(2, 0.0, theta, &alphas).unwrap();
            let expected = 2.0 * (2.0 * theta).sin() * (1.0 - 0.15);
            assert!((v - expected).abs() < 1e-12);
            assert!(v <= 2.0 + 1e-12);
        }

        assert!(closed_form_ppm(2, 0.1, 0.1, &[0.5]).is_err());
        assert!(closed_form_ppm(1, 0.1, 0.1, &[1.5]).is_err());
    }

    #[test]
    fn closed_form_matches_engine_k2() {
        let delta = 0.2713;
        let theta = FRAC_PI_4 - delta / 2.0;
        let alphas = [0.1, 0.9];
        let closed = closed_form_ppm(2, delta, theta, &alphas).unwrap();
        let schemes = alphas.iter().map(|&a| Scheme::ppm3(a).unwrap()).collect();
        let trace = run_protocol(&ProtocolConfig::new(delta, theta, schemes).unwrap()).unwrap();
        assert!((closed - trace.chsh_values[1]).abs() < 1e-9);
    }

    #[test]
    fn four_kraus_v1_reduces_to_ppm() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.gen_range(1..=6usize);
            let delta = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
            let theta = rng.gen_range(0.0..FRAC_PI_4);
            let alphas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
            let a = closed_form_general(SchemeFamily::FourKraus, k, delta, theta, 1.0, &alphas)
                .unwrap();
            let b = closed_form_ppm(k, delta, theta, &alphas).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn two_kraus_closed_form_examples() {
        // k = 1 at θ = π/4: J¹ = 2(cosδ + α sinδ)
        for (delta, alpha, v) in [(0.3, 0.4, 0.3), (0.05, 0.9, 0.7), (1.0, 0.2, 0.5)] {
            let j = closed_form_general(SchemeFamily::TwoKraus, 1, delta, FRAC_PI_4, v, &[alpha])
                .unwrap();
            assert!((j - 2.0 * (delta.cos() + alpha * delta.sin())).abs() < 1e-12);
        }

        // k = 2 against the brute-force engine
        let (delta, theta, v) = (0.05, FRAC_PI_4, 0.3);
        let alphas = [0.1, 0.3];
        let closed =
            closed_form_general(SchemeFamily::TwoKraus, 2, delta, theta, v, &alphas).unwrap();
        let schemes = alphas
            .iter()
            .map(|&a| Scheme::two_kraus(a, v).unwrap())
            .collect();
        let trace = run_protocol(&ProtocolConfig::new(delta, theta, schemes).unwrap()).unwrap();
        assert!((closed - trace.chsh_values[1]).abs() < 1e-9);
    }

    #[test]
    fn oracle_equivalence_sampled() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mut max_gap = 0.0f64;
        for family in [
            SchemeFamily::Ppm3,
            SchemeFamily::FourKraus,
            SchemeFamily::TwoKraus,
        ] {
            for trial in 0..60 {
                let k = rng.gen_range(1..=6usize);
                let delta = rng.gen_range(1e-3..std::f64::consts::FRAC_PI_2);
                // exercise both the θ-rule and general θ for the ppm family
                let theta = if family == SchemeFamily::Ppm3 && trial % 2 == 0 {
                    (FRAC_PI_4 - delta / 2.0).max(0.0)
                } else {
                    rng.gen_range(0.0..FRAC_PI_4)
                };
                let v = rng.gen_range(0.0..=1.0);
                let alphas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
                let schemes: Vec<Scheme> = alphas
                    .iter()
                    .map(|&a| Scheme::from_family(family, a, v).unwrap())
                    .collect();
                let trace =
                    run_protocol(&ProtocolConfig::new(delta, theta, schemes).unwrap()).unwrap();
                for j in 1..=k {
                    let closed =
                        closed_form_general(family, j, delta, theta, v, &alphas[..j]).unwrap();
                    max_gap = max_gap.max((closed - trace.chsh_values[j - 1]).abs());
                }
            }
        }
        assert!(max_gap < 1e-9, "max closed-vs-engine gap {max_gap:e}");
    }

    fn random_pure_state(rng: &mut ChaCha12Rng) -> DensityMatrix {
        // normalized vector of complex Gaussians, Box-Muller
        let mut amps = [c64(0.0, 0.0); 4];
        let mut norm2 = 0.0;
        for a in amps.iter_mut() {
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            *a = c64(r * u2.cos(), r * u2.sin());
            norm2 += a.norm_sqr();
        }
        let scale = 1.0 / norm2.sqrt();
        let mut m = ComplexMat::zeros(4).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                m.set(r, c, amps[r] * amps[c].conj() * scale * scale);
            }
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn sos_soundness_sampled() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..200 {
            let rho = random_pure_state(&mut rng);
            let delta = rng.gen_range(0.0..=std::f64::consts::FRAC_PI_2);
            let eta0 = rng.gen_range(0.0..=1.0);
            let eta1 = rng.gen_range(0.0..=1.0);
            let pair = alice_observables(delta).unwrap();
            let value = expectation(&unsharp_chsh_operator(&pair, eta0, eta1), &rho);
            let x = 2.0 * (2.0 * delta).cos();
            let bound = sos_bound(eta0, eta1, x).unwrap().bound;
            assert!(value <= bound + 1e-9, "value {value} above bound {bound}");
        }
    }

    #[test]
    fn xi_examples_and_identities() {
        assert!((xi(0.5, 0.6).unwrap().xi_exact - 0.8).abs() < 1e-12);
        assert!((xi(1.0, 0.19).unwrap().xi_exact - 0.9).abs() < 1e-12);
        assert!((xi(0.0, 0.19).unwrap().xi_exact - 0.9).abs() < 1e-12);
        let f = xi(0.37, 0.0).unwrap();
        assert_eq!(f.xi_exact, 1.0);
        assert_eq!(f.xi_series, 1.0);

        // v = 1/2 closed form over a grid
        for i in 0..=20 {
            let a = i as f64 / 20.0;
            assert!((xi(0.5, a).unwrap().xi_exact - (1.0 - a * a).sqrt()).abs() < 1e-12);
        }

        // symmetry about v = 1/2
        for (v, a) in [(0.1, 0.3), (0.3, 0.05), (0.45, 0.01)] {
            let lhs = xi(v, a).unwrap().xi_exact;
            let rhs = xi(1.0 - v, a).unwrap().xi_exact;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn xi_exact_matches_kraus_product_route() {
        // independent route: ξ = m1·m2 + n1·n2 from the Kraus coefficients
        for v in [0.05, 0.146, 0.3, 0.5, 0.77, 0.95] {
            for i in 0..=20 {
                let a = i as f64 / 20.0;
                let m1m2 = (v * (1.0 - a) * (v * (1.0 - a) + a)).sqrt();
                let n1n2 = ((1.0 - a) * (1.0 - v) * (1.0 - v * (1.0 - a))).sqrt();
                let direct = m1m2 + n1n2;
                assert!(
                    (xi(v, a).unwrap().xi_exact - direct).abs() < 1e-12,
                    "v = {v}, alpha = {a}"
                );
            }
        }
    }

    #[test]
    fn xi_one_minus_is_consistent_and_stable() {
        for v in [0.0, 0.1, 0.3, 0.5, 0.7, 1.0] {
            for a in [0.0, 1e-8, 1e-4, 0.2, 0.9] {
                let om = xi_one_minus_exact(v, a).unwrap();
                let direct = 1.0 - xi(v, a).unwrap().xi_exact;
                assert!((om - direct).abs() < 1e-12);
                assert!(om >= 0.0);
            }
        }
        // tiny α: relative agreement with the quadratic leading term at v=1/2
        let om = xi_one_minus_exact(0.5, 1e-8).unwrap();
        assert!((om - 0.5e-16).abs() < 1e-20);
    }

    #[test]
    fn xi_series_soundness_on_admissible_domain() {
        // The quadratic truncation 1 − α²/(8v(1−v)) must lower-bound the
        // exact ξ wherever the sufficient condition is used; the printed
        // fourth-order series deviates from the exact value at O(α³) with
        // coefficient (1−2v)²/(4v(1−v)) + (1−2v)⁴/(16v²(1−v)²).
        for i in 1..=40 {
            let v = 0.058 + (0.5 - 0.058) * i as f64 / 41.0;
            if !two_kraus_v_admissible(v) {
                continue;
            }
            let cap = two_kraus_alpha_cap(v);
            for j in 0..=30 {
                let a = cap * j as f64 / 30.0;
                let f = xi(v, a).unwrap();
                let quad = 1.0 - a * a / (8.0 * v * (1.0 - v));
                assert!(
                    f.xi_exact >= quad - 1e-14,
                    "quadratic truncation not a lower bound at v={v}, a={a}"
                );
                assert!(f.xi_series <= 1.0 + 1e-15);

                let w = 1.0 - 2.0 * v;
                let c3 = w * w / (4.0 * v * (1.0 - v))
                    + w.powi(4) / (16.0 * v * v * (1.0 - v) * (1.0 - v));
                let envelope = a.powi(3) * (2.0 * c3 + 1.0) + 1e-15;
                assert!(
                    (f.xi_series - f.xi_exact).abs() <= envelope,
                    "series gap at v={v}, a={a}: {} > {envelope}",
                    (f.xi_series - f.xi_exact).abs()
                );
            }
        }
    }

    #[test]
    fn alpha1_bound_examples() {
        // θ-rule with v = 1 gives a vanishing threshold on (0, π/2); the
        // endpoint δ = π/2 forces θ = 0 where the denominator degenerates
        for delta in [0.05, 0.4, 1.2, 1.57] {
            let theta = FRAC_PI_4 - delta / 2.0;
            let lb = alpha1_lower_bound(delta, theta, 1.0).unwrap();
            assert!(lb.abs() < 1e-12);
        }

        // v = 1, δ = θ = π/4: (1 − sin(3π/4)) / (2 sin(π/4) sin²(π/4)) = √2 − 1
        let lb = alpha1_lower_bound(FRAC_PI_4, FRAC_PI_4, 1.0).unwrap();
        assert!((lb - (SQRT_2 - 1.0)).abs() < 1e-12);

        // θ = π/4 for any v: tan(δ/2)
        for (delta, v) in [(0.3, 0.2), (0.7, 0.5), (0.05, 1.0)] {
            let lb = alpha1_lower_bound(delta, FRAC_PI_4, v).unwrap();
            assert!((lb - (delta / 2.0).tan()).abs() < 1e-12);
        }

        // degenerate denominator at δ = 0
        assert!(matches!(
            alpha1_lower_bound(0.0, 0.3, 1.0),
            Err(Error::NoFiniteThreshold(_))
        ));
    }

    #[test]
    fn alpha1_bound_equivalent_form_agrees() {
        // at v = 1 the bound collapses to (1 − sin(2θ+δ))/(2 sinδ sin²θ)
        // via sin(2θ−δ) + 2 sinδ cos2θ = sin(2θ+δ) and 1 − cos2θ = 2 sin²θ
        for i in 1..30 {
            let delta = 1.4 * i as f64 / 30.0;
            for j in 1..15 {
                let theta = FRAC_PI_4 * j as f64 / 15.0;
                let general = alpha1_lower_bound(delta, theta, 1.0).unwrap();
                let collapsed =
                    (1.0 - (2.0 * theta + delta).sin()) / (2.0 * delta.sin() * theta.sin().powi(2));
                assert!(
                    (general - collapsed).abs() < 1e-9 * (1.0 + collapsed.abs()),
                    "forms disagree at delta={delta}, theta={theta}"
                );
            }
        }
    }

    #[test]
    fn alpha1_bound_is_the_violation_threshold() {
        // sign(closed_form − 2) flips at the bound (k = 1): bisection check
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..50 {
            let delta = rng.gen_range(0.2..1.3);
            let theta = rng.gen_range(0.2..FRAC_PI_4);
            let lb = alpha1_lower_bound(delta, theta, 1.0).unwrap();
            if !(0.0..1.0).contains(&lb) {
                continue;
            }
            let f = |a: f64| closed_form_ppm(1, delta, theta, &[a]).unwrap() - 2.0;
            let (mut lo, mut hi) = (0.0, 1.0);
            if f(lo) > 0.0 || f(hi) < 0.0 {
                continue;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((0.5 * (lo + hi) - lb).abs() < 1e-9);
        }
    }

    #[test]
    fn ppm_k2_threshold_examples() {
        // explicit k = 2 formula
        let delta = 0.2;
        let alpha1 = 0.3;
        let lb = alphak_lower_bound_ppm(2, delta, &[alpha1]).unwrap();
        assert!((lb - alpha1 * ppm_k2_ratio(delta)).abs() < 1e-12);

        // minimized ratio 2(√3+2) at δ = 2·tan⁻¹(2+√3−√(6+4√3))
        let (argmin, min) = ppm_k2_min_ratio();
        assert!((min - 2.0 * (3f64.sqrt() + 2.0)).abs() < 1e-9);
        let exact = 2.0 * (2.0 + 3f64.sqrt() - (6.0 + 4.0 * 3f64.sqrt()).sqrt()).atan();
        assert!((argmin - exact).abs() < 1e-6);
        assert!((argmin - 0.2713).abs() < 1e-4);

        // boundary: α1 = (2−√3)/2 at the optimal δ puts the threshold at 1
        let cap = (2.0 - 3f64.sqrt()) / 2.0;
        let lb = alphak_lower_bound_ppm(2, argmin, &[cap]).unwrap();
        assert!((lb - 1.0).abs() < 1e-9);

        // zero prefix → zero threshold
        for k in 2..=6 {
            let prefix = vec![0.0; k - 1];
            let delta = 0.5 * ppm_delta_hi(k);
            assert_eq!(alphak_lower_bound_ppm(k, delta, &prefix).unwrap(), 0.0);
        }

        // outside the window → explicit signal
        assert!(matches!(
            alphak_lower_bound_ppm(2, 0.6, &[0.1]),
            Err(Error::OutsideDeltaWindow { .. })
        ));
        assert!(matches!(
            alphak_lower_bound_ppm(2, 0.0, &[0.1]),
            Err(Error::OutsideDeltaWindow { .. })
        ));
    }

    #[test]
    fn two_kraus_threshold_examples() {
        // zero prefix: (2^{k−1}/sinδ)(1 − cosδ)
        for k in 2..=5 {
            let delta = 0.2;
            let prefix = vec![0.0; k - 1];
            let lb = alphak_lower_bound_twokraus(k, delta, 0.3, &prefix).unwrap();
            let expected = 2f64.powi(k as i32 - 1) / delta.sin() * (1.0 - delta.cos());
            assert!((lb - expected).abs() < 1e-12);
        }

        // α cap at v = 0.3
        assert!((two_kraus_alpha_cap(0.3) - 0.16 / 0.37).abs() < 1e-12);

        // inadmissible v
        assert!(matches!(
            alphak_lower_bound_twokraus(2, 0.1, 0.05, &[0.0]),
            Err(Error::InadmissibleV(_))
        ));
        assert!(matches!(
            alphak_lower_bound_twokraus(2, 0.1, 0.5, &[0.0]),
            Err(Error::InadmissibleV(_))
        ));

        // prefix above the cap
        assert!(matches!(
            alphak_lower_bound_twokraus(2, 0.1, 0.3, &[0.9]),
            Err(Error::InadmissibleAlpha { .. })
        ));
    }

    #[test]
    fn two_kraus_threshold_vs_exact_bisection() {
        // series threshold must upper-bound the exact one (sufficiency) and
        // sit within the series-vs-exact ξ gap of it
        let (k, v, delta, alpha1) = (2usize, 0.3, 0.05, 0.05);
        let series_lb = alphak_lower_bound_twokraus(k, delta, v, &[alpha1]).unwrap();

        // bisection on the exact closed form J²(α₂) − 2
        let f = |a2: f64| {
            closed_form_general(
                SchemeFamily::TwoKraus,
                2,
                delta,
                FRAC_PI_4,
                v,
                &[alpha1, a2],
            )
            .unwrap()
                - 2.0
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let exact_root = 0.5 * (lo + hi);

        // dual route: α₂* = (2 − cosδ(1+ξ₁))/sinδ
        let xi1 = xi(v, alpha1).unwrap().xi_exact;
        let direct = (2.0 - delta.cos() * (1.0 + xi1)) / delta.sin();
        assert!((exact_root - direct).abs() < 1e-10);

        assert!(
            series_lb >= exact_root - 1e-12,
            "series bound must be conservative"
        );
        assert!((series_lb - exact_root).abs() < 1e-3);
    }

    #[test]
    fn concurrence_threshold_examples() {
        assert!((concurrence_threshold(2).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((concurrence_threshold(3).unwrap() - 15f64.sqrt() / 4.0).abs() < 1e-12);
        // strictly increasing toward 1 while representable below it
        let mut prev = 0.0;
        for k in 2..=20 {
            let t = concurrence_threshold(k).unwrap();
            assert!(t > prev && t < 1.0);
            prev = t;
        }
        assert!(1.0 - prev < 1e-10, "threshold tends to 1");
        assert!(concurrence_threshold(1).is_err());
    }

    #[test]
    fn product_deficit_keeps_relative_precision() {
        let mut d = ProductDeficit::new();
        for _ in 0..5 {
            d.absorb(1e-20);
        }
        assert!((d.deficit() - 5e-20).abs() < 1e-32);
        assert_eq!(d.product(), 1.0 - d.deficit());
    }
}
