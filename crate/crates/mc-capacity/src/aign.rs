//! Additive inverse Gaussian noise model: transit-time CDF of a molecule
//! drifting from transmitter to receiver, and the per-slot arrival
//! probabilities derived from it.
//!
//! The propagation time of a molecule over distance `l` with drift `v` and
//! Wiener variance `sigma2` is inverse Gaussian with mean `mu = l/v` and
//! shape `lambda = l²/sigma2`. The CDF's second term carries a factor
//! exp(2λ/μ) which overflows for small-diffusion links, so it is evaluated in
//! log domain throughout.

use crate::special::{erfc, ln_erfc};
use crate::{Error, Result};

const LN_HALF: f64 = -std::f64::consts::LN_2;

/// Physical link parameters with the derived inverse-Gaussian pair (μ, λ).
///
/// Fields are private so that μ and λ are always the recomputed values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AignParams {
    l: f64,
    v: f64,
    sigma2: f64,
    mu: f64,
    lambda: f64,
}

impl AignParams {
    /// Build from distance, (positive) drift velocity, and Wiener-process
    /// variance, in any consistent unit system.
    pub fn new(l: f64, v: f64, sigma2: f64) -> Result<Self> {
        for (name, value) in [("l", l), ("v", v), ("sigma2", sigma2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        let mu = l / v;
        let lambda = l * l / sigma2;
        if !(mu.is_finite() && mu > 0.0 && lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "derived mu={mu}, lambda={lambda} out of range"
            )));
        }
        Ok(Self { l, v, sigma2, mu, lambda })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Mean transit time l/v.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Inverse-Gaussian shape l²/σ².
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// The slot-arrival probabilities that parameterize every transition law:
/// `q1` (same slot), `q2` (next slot), and `q_u = q1 + q2` (within two slots).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalProbs {
    q1: f64,
    q2: f64,
    q_u: f64,
    slot_t: f64,
}

impl ArrivalProbs {
    /// Derive from link parameters and slot duration: q1 = F_W(T),
    /// q_u = F_W(2T).
    pub fn from_params(p: &AignParams, slot_t: f64) -> Result<Self> {
        if !(slot_t.is_finite() && slot_t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "slot duration must be positive, got {slot_t}"
            )));
        }
        let q1 = transit_time_cdf(p, slot_t);
        let q_u = transit_time_cdf(p, 2.0 * slot_t).max(q1);
        Ok(Self { q1, q2: q_u - q1, q_u, slot_t })
    }

    /// Build directly from (q1, q2), for synthetic channels in simulation and
    /// validation studies where no physical link is implied.
    pub fn synthetic(q1: f64, q2: f64) -> Result<Self> {
        if !(q1.is_finite() && (0.0..=1.0).contains(&q1)) {
            return Err(Error::InvalidParameter(format!("q1 must be in [0,1], got {q1}")));
        }
        if !(q2.is_finite() && q2 >= 0.0 && q1 + q2 <= 1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "q2 must satisfy 0 <= q2 and q1 + q2 <= 1, got q1={q1}, q2={q2}"
            )));
        }
        Ok(Self { q1, q2, q_u: (q1 + q2).min(1.0), slot_t: 1.0 })
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn q2(&self) -> f64 {
        self.q2
    }

    pub fn q_u(&self) -> f64 {
        self.q_u
    }

    pub fn slot_t(&self) -> f64 {
        self.slot_t
    }
}

/// CDF of a standard Gaussian. Total on the extended reals.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// ln Φ(z), usable arbitrarily far into the lower tail.
pub fn ln_std_normal_cdf(z: f64) -> f64 {
    LN_HALF + ln_erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Transit-time CDF F_W(w) for the inverse Gaussian with mean μ, shape λ.
///
/// Returns 0 for w ≤ 0. The exp(2λ/μ)·Φ(−√(λ/w)(w/μ+1)) term is computed as
/// exp(2λ/μ + ln Φ(·)); evaluating the factors separately overflows once
/// 2λ/μ exceeds ~709.
pub fn transit_time_cdf(p: &AignParams, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    if w == f64::INFINITY {
        return 1.0;
    }
    let s = (p.lambda / w).sqrt();
    let ratio = w / p.mu;
    let term1 = std_normal_cdf(s * (ratio - 1.0));
    let ln_term2 = 2.0 * p.lambda / p.mu + ln_std_normal_cdf(-s * (ratio + 1.0));
    (term1 + ln_term2.exp()).clamp(0.0, 1.0)
}

/// Probability that a molecule arrives exactly k slots after release,
/// q_k = F_W(kT) − F_W((k−1)T).
pub fn slot_prob(p: &AignParams, slot_t: f64, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidParameter("slot index k must be >= 1".into()));
    }
    if !(slot_t.is_finite() && slot_t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "slot duration must be positive, got {slot_t}"
        )));
    }
    let hi = transit_time_cdf(p, k as f64 * slot_t);
    let lo = transit_time_cdf(p, (k as f64 - 1.0) * slot_t);
    Ok((hi - lo).max(0.0))
}
