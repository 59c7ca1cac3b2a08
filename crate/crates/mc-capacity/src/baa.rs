//! Blahut–Arimoto iterations: the classical alternating maximization for a
//! fixed channel matrix (concave, monotone), and the modified variant for the
//! interference lower bounds, where the matrix is rebuilt from the current
//! input distribution every outer iteration.
//!
//! The modified surrogate is not concave and the iteration is only a
//! fixed-point scheme, so the result keeps the best iterate seen rather than
//! the last, detects two-cycles, and supports multistart over deterministic
//! edge mixtures plus seeded random interior points. Edge starts matter: the
//! multiplicative update can neither kill a symbol in finite time nor revive
//! one that is exactly zero, while the best input distributions here often
//! live on faces of the simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aign::ArrivalProbs;
use crate::bounds::mi_bits;
use crate::channel::{
    isi_marginal_transition, lb2_joint_transition, InputDistribution, TransitionMatrix,
};
use crate::{Error, Result};

/// Stopping and stabilization knobs shared by both iterations.
#[derive(Debug, Clone, Copy)]
pub struct BaaOptions {
    /// Convergence threshold on the sup-norm change of the input distribution.
    pub tol: f64,
    /// Outer-iteration cap.
    pub max_iter: usize,
    /// Mixing factor θ ∈ (0, 1]: a ← θ·a_new + (1−θ)·a_old. 1 = undamped.
    pub damping: f64,
    /// Minimum probability clamp; 0 lets symbols die.
    pub floor: f64,
}

impl Default for BaaOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 10_000, damping: 1.0, floor: 0.0 }
    }
}

impl BaaOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must be in (0,1], got {}",
                self.damping
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if !(self.floor >= 0.0 && self.floor < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "floor must be in [0,1), got {}",
                self.floor
            )));
        }
        Ok(())
    }
}

/// Outcome of one optimization run.
#[derive(Debug, Clone)]
pub struct BaaResult {
    /// Best iterate seen (by surrogate objective).
    pub a_star: InputDistribution,
    /// The bound functional evaluated at `a_star`.
    pub rate: f64,
    /// Outer iterations executed; equals `objective_trace.len()`.
    pub iterations: usize,
    /// Sup-norm change of the input distribution fell below `tol`.
    pub converged: bool,
    /// The iterate sequence entered a two-cycle (within `tol`).
    pub cycled: bool,
    /// Surrogate objective J per iteration; with the backward matrix at its
    /// per-iteration optimum this equals the mutual information of the
    /// current iterate.
    pub objective_trace: Vec<f64>,
    /// Final iterate (the fixed point when `converged`); differs from
    /// `a_star` when the objective was not monotone along the trajectory.
    pub a_last: InputDistribution,
}

/// Which input-dependent lower-bound matrix the modified iteration rebuilds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Lb1,
    Lb2,
}

fn build_bound_matrix(
    kind: BoundKind,
    a: &InputDistribution,
    ap: &ArrivalProbs,
    x_max: usize,
) -> Result<TransitionMatrix> {
    match kind {
        BoundKind::Lb1 => isi_marginal_transition(a, ap, x_max),
        BoundKind::Lb2 => lb2_joint_transition(a, ap, x_max),
    }
}

/// Backward (posterior) matrix Q with Q[i·n + j] = a_j P(j,i) / Σ_j a_j P(j,i)
/// for output i and input j. Outputs with zero marginal get a uniform
/// backward column; their choice never enters the objective.
pub fn q_update(a: &InputDistribution, p: &TransitionMatrix) -> Vec<f64> {
    let n = p.rows();
    let m = p.cols();
    let mut q = vec![0.0; m * n];
    for i in 0..m {
        let mut denom = 0.0;
        for j in 0..n {
            denom += a.get(j) * p.entry(j, i);
        }
        if denom > 0.0 {
            for j in 0..n {
                q[i * n + j] = a.get(j) * p.entry(j, i) / denom;
            }
        } else {
            for j in 0..n {
                q[i * n + j] = 1.0 / n as f64;
            }
        }
    }
    q
}

/// Input update a_j ∝ exp(Σ_i P(j,i) ln Q[i,j]), accumulated in log domain.
/// A −∞ exponent (some Q[i,j] = 0 where P(j,i) > 0) sends that symbol to 0.
pub fn a_update(p: &TransitionMatrix, q: &[f64]) -> InputDistribution {
    let n = p.rows();
    let m = p.cols();
    debug_assert_eq!(q.len(), m * n);
    let mut w = vec![f64::NEG_INFINITY; n];
    for (j, wj) in w.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..m {
            let pji = p.entry(j, i);
            if pji > 0.0 {
                acc += pji * q[i * n + j].ln();
            }
        }
        *wj = acc;
    }
    let mx = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = w
        .iter()
        .map(|&wj| if wj == f64::NEG_INFINITY { 0.0 } else { (wj - mx).exp() })
        .collect();
    InputDistribution::from_weights(weights)
}

fn apply_damping_and_floor(a_new: &mut [f64], a_old: &[f64], opts: &BaaOptions) {
    if opts.damping < 1.0 {
        for (n, &o) in a_new.iter_mut().zip(a_old) {
            *n = opts.damping * *n + (1.0 - opts.damping) * o;
        }
    }
    if opts.floor > 0.0 {
        let mut sum = 0.0;
        for n in a_new.iter_mut() {
            *n = n.max(opts.floor);
            sum += *n;
        }
        for n in a_new.iter_mut() {
            *n /= sum;
        }
    }
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Classical alternating maximization for a fixed row-stochastic channel.
/// The objective is concave, so the per-iteration rate is nondecreasing and
/// the last iterate is the best.
pub fn standard_baa(p: &TransitionMatrix, opts: &BaaOptions) -> Result<BaaResult> {
    opts.validate()?;
    let n = p.rows();
    if n < 2 {
        return Err(Error::InvalidParameter("channel needs at least two inputs".into()));
    }
    let mut a = InputDistribution::uniform(n - 1);
    let mut trace = Vec::new();
    let mut converged = false;
    while trace.len() < opts.max_iter {
        let j = mi_bits(a.probs(), p);
        if let Some(&prev) = trace.last() {
            debug_assert!(j >= prev - 1e-10, "concave objective decreased: {prev} -> {j}");
        }
        trace.push(j);
        let q = q_update(&a, p);
        let next = a_update(p, &q);
        let mut next_probs = next.probs().to_vec();
        apply_damping_and_floor(&mut next_probs, a.probs(), opts);
        let next = InputDistribution::from_weights(next_probs);
        let delta = sup_dist(next.probs(), a.probs());
        a = next;
        if delta < opts.tol {
            converged = true;
            break;
        }
    }
    let rate = mi_bits(a.probs(), p);
    Ok(BaaResult {
        a_star: a.clone(),
        rate,
        iterations: trace.len(),
        converged,
        cycled: false,
        objective_trace: trace,
        a_last: a,
    })
}

/// Modified iteration for the input-dependent lower bounds: rebuild the
/// matrix at the current iterate, take one backward/input update, repeat
/// until the input distribution stops moving. Keeps the best-objective
/// iterate; convergence is measured on the input distribution.
pub fn modified_baa(
    kind: BoundKind,
    ap: &ArrivalProbs,
    x_max: usize,
    a0: &InputDistribution,
    opts: &BaaOptions,
) -> Result<BaaResult> {
    opts.validate()?;
    if a0.x_max() != x_max {
        return Err(Error::DimensionMismatch(format!(
            "start distribution covers 0..={}, expected 0..={x_max}",
            a0.x_max()
        )));
    }
    let mut a = a0.clone();
    let mut prev: Option<InputDistribution> = None;
    let mut best_j = f64::NEG_INFINITY;
    let mut best_a = a.clone();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut cycled = false;

    while trace.len() < opts.max_iter {
        let p = build_bound_matrix(kind, &a, ap, x_max)?;
        let j = mi_bits(a.probs(), &p);
        trace.push(j);
        if j > best_j {
            best_j = j;
            best_a = a.clone();
        }
        let q = q_update(&a, &p);
        let next = a_update(&p, &q);
        let mut next_probs = next.probs().to_vec();
        apply_damping_and_floor(&mut next_probs, a.probs(), opts);
        let next = InputDistribution::from_weights(next_probs);

        let delta = sup_dist(next.probs(), a.probs());
        let two_cycle = prev
            .as_ref()
            .map(|pa| sup_dist(next.probs(), pa.probs()) < opts.tol)
            .unwrap_or(false);
        prev = Some(std::mem::replace(&mut a, next));
        if delta < opts.tol {
            converged = true;
            break;
        }
        if two_cycle {
            cycled = true;
            break;
        }
    }

    let p_star = build_bound_matrix(kind, &best_a, ap, x_max)?;
    let rate = mi_bits(best_a.probs(), &p_star);
    Ok(BaaResult {
        a_star: best_a,
        rate,
        iterations: trace.len(),
        converged,
        cycled,
        objective_trace: trace,
        a_last: a,
    })
}

/// Start list for multistart runs: the uniform distribution, then two-symbol
/// mixtures on simplex edges (the (0, x_max) edge first — optimizers here
/// concentrate on the extreme symbols), then seeded random interior points.
pub fn canonical_starts(x_max: usize, count: usize, seed: u64) -> Vec<InputDistribution> {
    let mut starts = vec![InputDistribution::uniform(x_max)];
    let mixes = [0.5, 0.6, 0.4, 0.7, 0.3, 0.8, 0.2, 0.9, 0.1];
    let mut pairs = vec![(0, x_max)];
    for i in 0..=x_max {
        for j in (i + 1)..=x_max {
            if (i, j) != (0, x_max) {
                pairs.push((i, j));
            }
        }
    }
    'outer: for (i, j) in pairs {
        for t in mixes {
            if starts.len() >= count {
                break 'outer;
            }
            let mut v = vec![0.0; x_max + 1];
            v[i] = t;
            v[j] = 1.0 - t;
            starts.push(InputDistribution::from_weights(v));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while starts.len() < count {
        // Dirichlet(1,...,1) via normalized exponentials
        let v: Vec<f64> = (0..=x_max)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        starts.push(InputDistribution::from_weights(v));
    }
    starts.truncate(count);
    starts
}

/// Run [`modified_baa`] from `restarts` starts and keep the best result by
/// achieved rate.
pub fn modified_baa_multistart(
    kind: BoundKind,
    ap: &ArrivalProbs,
    x_max: usize,
    opts: &BaaOptions,
    restarts: usize,
    seed: u64,
) -> Result<BaaResult> {
    let mut best: Option<BaaResult> = None;
    for a0 in canonical_starts(x_max, restarts.max(1), seed) {
        let r = modified_baa(kind, ap, x_max, &a0, opts)?;
        if best.as_ref().map(|b| r.rate > b.rate).unwrap_or(true) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}
