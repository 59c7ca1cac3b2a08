//! Information-theoretic functionals over the channel matrices: entropy,
//! mutual information, the two interference lower bounds, the
//! interference-free upper bound and no-interference reference capacity, and
//! the two-slot matched-filter rate. All logarithms are base 2.

use crate::aign::{AignParams, ArrivalProbs};
use crate::baa::{modified_baa_multistart, standard_baa, BaaOptions, BaaResult, BoundKind};
use crate::channel::{
    dmc_transition, isi_marginal_transition, lb2_joint_transition, mf_joint_transition,
    output_marginal, InputDistribution, TransitionMatrix,
};
use crate::{Error, Result};

pub(crate) fn entropy_unchecked(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v > 0.0 {
            h -= v * v.log2();
        }
    }
    h
}

/// Shannon entropy in bits, with 0·log 0 = 0.
pub fn entropy(p: &[f64]) -> Result<f64> {
    if p.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidDistribution(
            "entries must be finite and nonnegative".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {sum}, expected 1 within 1e-9"
        )));
    }
    Ok(entropy_unchecked(p))
}

pub(crate) fn mi_bits(a: &[f64], p: &TransitionMatrix) -> f64 {
    let mut marginal = vec![0.0; p.cols()];
    let mut h_cond = 0.0;
    for (x, &w) in a.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let row = p.row(x);
        h_cond += w * entropy_unchecked(row);
        for (y, &v) in row.iter().enumerate() {
            marginal[y] += w * v;
        }
    }
    entropy_unchecked(&marginal) - h_cond
}

/// I(X; Y) = H(Y) − H(Y|X) for an input distribution and a transition law.
pub fn mutual_information(a: &InputDistribution, p: &TransitionMatrix) -> Result<f64> {
    if p.rows() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, input distribution has {} entries",
            p.rows(),
            a.len()
        )));
    }
    Ok(mi_bits(a.probs(), p))
}

/// Same quantity via the Kullback–Leibler route,
/// Σ_x a_x D(P(·|x) ‖ p(·)); kept as an independent cross-check path.
pub fn mutual_information_kl(a: &InputDistribution, p: &TransitionMatrix) -> Result<f64> {
    let marginal = output_marginal(a, p)?;
    let mut total = 0.0;
    for x in 0..p.rows() {
        let w = a.get(x);
        if w == 0.0 {
            continue;
        }
        for (y, &v) in p.row(x).iter().enumerate() {
            if v > 0.0 {
                total += w * v * (v / marginal[y]).log2();
            }
        }
    }
    Ok(total)
}

/// Symbol-by-symbol rate with the previous slot's arrivals treated as noise:
/// I(X_m; Y_m) under the interference marginal law. The law itself depends
/// on `a`, so this is a functional of the input distribution, not the mutual
/// information of a fixed channel.
pub fn lower_bound_1(a: &InputDistribution, ap: &ArrivalProbs, x_max: usize) -> Result<f64> {
    let p = isi_marginal_transition(a, ap, x_max)?;
    mutual_information(a, &p)
}

/// Pairwise-decoding rate I(X_{m−1}; Y_{m−1}, Y_m) under the joint law.
pub fn lower_bound_2(a: &InputDistribution, ap: &ArrivalProbs, x_max: usize) -> Result<f64> {
    let p = lb2_joint_transition(a, ap, x_max)?;
    mutual_information(a, &p)
}

/// The four-entropy route to [`lower_bound_2`]:
/// H(Y_{m−1}) + H(Y_m|Y_{m−1}) − H(Y_{m−1}|X_{m−1}) − H(Y_m|X_{m−1},Y_{m−1}).
/// The generic mutual-information path is authoritative; this decomposition
/// is the cross-check.
#[derive(Debug, Clone, Copy)]
pub struct Lb2Decomposition {
    pub h_y_prev: f64,
    pub h_ym_given_yprev: f64,
    pub h_yprev_given_x: f64,
    pub h_ym_given_x_yprev: f64,
}

impl Lb2Decomposition {
    pub fn value(&self) -> f64 {
        self.h_y_prev + self.h_ym_given_yprev - self.h_yprev_given_x - self.h_ym_given_x_yprev
    }
}

pub fn lower_bound_2_decomposition(
    a: &InputDistribution,
    ap: &ArrivalProbs,
    x_max: usize,
) -> Result<Lb2Decomposition> {
    let joint = lb2_joint_transition(a, ap, x_max)?;
    let per_slot = 2 * x_max + 1;

    let pair_marginal = output_marginal(a, &joint)?;
    let h_pair = entropy_unchecked(&pair_marginal);
    let mut yprev_marginal = vec![0.0; per_slot];
    for y_prev in 0..per_slot {
        for y_m in 0..per_slot {
            yprev_marginal[y_prev] += pair_marginal[y_prev * per_slot + y_m];
        }
    }
    let h_y_prev = entropy_unchecked(&yprev_marginal);

    // per-input entropies of the pair law and of its y_prev marginal
    let mut h_pair_given_x = 0.0;
    let mut h_yprev_given_x = 0.0;
    for x in 0..=x_max {
        let w = a.get(x);
        if w == 0.0 {
            continue;
        }
        let row = joint.row(x);
        h_pair_given_x += w * entropy_unchecked(row);
        let mut row_yprev = vec![0.0; per_slot];
        for y_prev in 0..per_slot {
            for y_m in 0..per_slot {
                row_yprev[y_prev] += row[y_prev * per_slot + y_m];
            }
        }
        h_yprev_given_x += w * entropy_unchecked(&row_yprev);
    }

    Ok(Lb2Decomposition {
        h_y_prev,
        h_ym_given_yprev: h_pair - h_y_prev,
        h_yprev_given_x,
        h_ym_given_x_yprev: h_pair_given_x - h_yprev_given_x,
    })
}

/// Capacity of the interference-free channel with arrival probability
/// q_u = q1 + q2 (send, then stay silent long enough that every surviving
/// molecule has landed). Concave objective, maximized by the standard
/// alternating iteration.
pub fn upper_bound(ap: &ArrivalProbs, x_max: usize, opts: &BaaOptions) -> Result<BaaResult> {
    let p = dmc_transition(ap.q_u(), x_max)?;
    standard_baa(&p, opts)
}

/// Capacity of the no-interference reference channel (every molecule lands
/// in its own slot with probability q1 or never).
pub fn dmc_capacity(q1: f64, x_max: usize, opts: &BaaOptions) -> Result<BaaResult> {
    let p = dmc_transition(q1, x_max)?;
    standard_baa(&p, opts)
}

/// Matched-filter rate I(X_{m−1}; Y_{m−1}, Y_m) in bits per two-slot use,
/// conventionally evaluated at the reference-capacity optimizer `a_dmc`.
pub fn matched_filter_rate(
    ap: &ArrivalProbs,
    x_max: usize,
    a_dmc: &InputDistribution,
) -> Result<f64> {
    let p = mf_joint_transition(ap, x_max)?;
    mutual_information(a_dmc, &p)
}

/// Which input distributions a report evaluates the lower bounds at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputPolicy {
    Uniform,
    Optimized,
    Both,
}

/// Every rate quantity for one parameter point, plus the optimizing
/// distributions where optimization was requested.
#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub aign: AignParams,
    pub slot_t: f64,
    pub x_max: usize,
    pub arrival: ArrivalProbs,
    pub i_lb1_uniform: f64,
    pub i_lb2_uniform: f64,
    pub i_lb1_opt: Option<f64>,
    pub i_lb2_opt: Option<f64>,
    pub i_ub: f64,
    pub c_dmc: f64,
    /// Matched-filter rate per two-slot use.
    pub i_mf: f64,
    /// Matched-filter rate normalized per slot (i_mf / 2).
    pub i_mf_per_slot: f64,
    pub a_lb1: Option<InputDistribution>,
    pub a_lb2: Option<InputDistribution>,
    pub a_ub: InputDistribution,
    pub a_dmc: InputDistribution,
    /// Non-convergence markers ("lb1:maxiter", "lb2:cycle", ...); empty means
    /// every optimization converged.
    pub flags: Vec<String>,
}

impl BoundsReport {
    /// Headline lower bound 1: optimized when available, else uniform.
    pub fn i_lb1(&self) -> f64 {
        self.i_lb1_opt.unwrap_or(self.i_lb1_uniform)
    }

    /// Headline lower bound 2: optimized when available, else uniform.
    pub fn i_lb2(&self) -> f64 {
        self.i_lb2_opt.unwrap_or(self.i_lb2_uniform)
    }

    pub fn flags_string(&self) -> String {
        if self.flags.is_empty() {
            "ok".to_string()
        } else {
            self.flags.join("|")
        }
    }
}

/// Compute every bound for one parameter point.
///
/// `restarts` and `seed` control the multistart of the modified iteration
/// (the lower-bound surfaces are not concave); the interference-free bounds
/// are concave and need neither.
pub fn compute_report(
    aign: &AignParams,
    slot_t: f64,
    x_max: usize,
    policy: InputPolicy,
    opts: &BaaOptions,
    restarts: usize,
    seed: u64,
) -> Result<BoundsReport> {
    let arrival = ArrivalProbs::from_params(aign, slot_t)?;
    let uniform = InputDistribution::uniform(x_max);
    let mut flags = Vec::new();

    let i_lb1_uniform = lower_bound_1(&uniform, &arrival, x_max)?;
    let i_lb2_uniform = lower_bound_2(&uniform, &arrival, x_max)?;

    let (i_lb1_opt, i_lb2_opt, a_lb1, a_lb2) = if policy == InputPolicy::Uniform {
        (None, None, None, None)
    } else {
        let r1 = modified_baa_multistart(BoundKind::Lb1, &arrival, x_max, opts, restarts, seed)?;
        if !r1.converged {
            flags.push(if r1.cycled { "lb1:cycle" } else { "lb1:maxiter" }.to_string());
        }
        let r2 = modified_baa_multistart(BoundKind::Lb2, &arrival, x_max, opts, restarts, seed)?;
        if !r2.converged {
            flags.push(if r2.cycled { "lb2:cycle" } else { "lb2:maxiter" }.to_string());
        }
        (Some(r1.rate), Some(r2.rate), Some(r1.a_star), Some(r2.a_star))
    };

    let ub = upper_bound(&arrival, x_max, opts)?;
    if !ub.converged {
        flags.push("ub:maxiter".to_string());
    }
    let dmc = dmc_capacity(arrival.q1(), x_max, opts)?;
    if !dmc.converged {
        flags.push("dmc:maxiter".to_string());
    }
    let i_mf = matched_filter_rate(&arrival, x_max, &dmc.a_star)?;

    Ok(BoundsReport {
        aign: *aign,
        slot_t,
        x_max,
        arrival,
        i_lb1_uniform,
        i_lb2_uniform,
        i_lb1_opt,
        i_lb2_opt,
        i_ub: ub.rate,
        c_dmc: dmc.rate,
        i_mf,
        i_mf_per_slot: i_mf / 2.0,
        a_lb1,
        a_lb2,
        a_ub: ub.a_star,
        a_dmc: dmc.a_star,
        flags,
    })
}
