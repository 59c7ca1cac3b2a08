//! Transition laws of the slotted molecular channel, materialized as
//! row-stochastic matrices: the interference-free binomial channel, the
//! one-slot-interference marginal and pairwise-joint laws, the matched-filter
//! two-slot law, and the general look-back interference recursion.
//!
//! All alphabets here are tiny (counts up to a few dozen molecules), so the
//! matrices are dense `Vec<f64>` in row-major order.

use crate::aign::ArrivalProbs;
use crate::special::{binomial_pmf, binomial_pmf_vec};
use crate::{Error, Result};

/// Probability vector over the released-molecule counts 0..=x_max.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution(Vec<f64>);

impl InputDistribution {
    /// Validate and wrap: entries nonnegative, summing to 1 within 1e-12.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(
                "entries must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, expected 1 within 1e-12"
            )));
        }
        Ok(Self(probs))
    }

    pub fn uniform(x_max: usize) -> Self {
        Self(vec![1.0 / (x_max + 1) as f64; x_max + 1])
    }

    pub fn point_mass(x: usize, x_max: usize) -> Result<Self> {
        if x > x_max {
            return Err(Error::InvalidParameter(format!("point mass {x} outside 0..={x_max}")));
        }
        let mut v = vec![0.0; x_max + 1];
        v[x] = 1.0;
        Ok(Self(v))
    }

    // internal constructor for update steps: renormalizes a nonnegative,
    // not-all-zero weight vector
    pub(crate) fn from_weights(mut weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        debug_assert!(sum > 0.0 && sum.is_finite());
        for w in &mut weights {
            *w /= sum;
        }
        Self(weights)
    }

    pub fn x_max(&self) -> usize {
        self.0.len() - 1
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, x: usize) -> f64 {
        self.0[x]
    }
}

/// Which law a [`TransitionMatrix`] encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Interference-free binomial thinning channel.
    Dmc,
    /// One-slot-interference marginal law p(y_m | x_m); depends on the input
    /// distribution through the interfering previous symbol.
    IsiMarginal,
    /// Pairwise law p(y_{m-1}, y_m | x_{m-1}) on the joint output alphabet.
    IsiJoint,
    /// First matched-filter slot, the same binomial law as `Dmc` with q = q1.
    MfFirst,
    /// Matched-filter two-slot joint law (the second, listen-only slot
    /// distinguishes it from `MfFirst`).
    MfSecond,
}

/// Dense row-stochastic conditional law; `entry(x, y) = p(y | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    kind: MatrixKind,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TransitionMatrix {
    fn new(kind: MatrixKind, rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { kind, rows, cols, data }
    }

    /// Wrap an explicit conditional law (e.g. a custom channel to feed the
    /// alternating-maximization solver). Rows must be stochastic within 1e-9.
    pub fn from_rows(kind: MatrixKind, rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::InvalidParameter("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged or empty rows".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "row {i} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidDistribution(format!(
                    "row {i} sums to {sum}, expected 1 within 1e-9"
                )));
            }
        }
        Ok(Self::new(kind, nrows, cols, rows.into_iter().flatten().collect()))
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Largest |row sum − 1| over all rows.
    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.rows)
            .map(|r| (self.row(r).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Column index of the output pair (y_prev, y_m) in a joint matrix over the
/// per-slot alphabet 0..=2·x_max.
pub fn joint_index(x_max: usize, y_prev: usize, y_m: usize) -> usize {
    y_prev * (2 * x_max + 1) + y_m
}

/// Interference pmf over molecules arriving in one slot from the `k-1`
/// preceding slots.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferencePmf {
    k: usize,
    probs: Vec<f64>,
}

impl InterferencePmf {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

fn check_prob(name: &str, q: f64) -> Result<()> {
    if !(q.is_finite() && (0.0..=1.0).contains(&q)) {
        return Err(Error::InvalidParameter(format!("{name} must be in [0,1], got {q}")));
    }
    Ok(())
}

fn check_alphabet(a: &InputDistribution, x_max: usize) -> Result<()> {
    if a.x_max() != x_max {
        return Err(Error::DimensionMismatch(format!(
            "input distribution covers 0..={}, expected 0..={x_max}",
            a.x_max()
        )));
    }
    Ok(())
}

/// Binomial thinning channel: entry (x, y) = C(x,y) qʸ (1−q)^{x−y}.
pub fn dmc_transition(q: f64, x_max: usize) -> Result<TransitionMatrix> {
    check_prob("q", q)?;
    if x_max < 1 {
        return Err(Error::InvalidParameter("x_max must be >= 1".into()));
    }
    Ok(binomial_matrix(MatrixKind::Dmc, q, x_max))
}

/// Same law as [`dmc_transition`] with q = q1, tagged as the first
/// matched-filter slot.
pub fn mf_first_transition(q1: f64, x_max: usize) -> Result<TransitionMatrix> {
    check_prob("q1", q1)?;
    if x_max < 1 {
        return Err(Error::InvalidParameter("x_max must be >= 1".into()));
    }
    Ok(binomial_matrix(MatrixKind::MfFirst, q1, x_max))
}

fn binomial_matrix(kind: MatrixKind, q: f64, x_max: usize) -> TransitionMatrix {
    let n = x_max + 1;
    let mut data = vec![0.0; n * n];
    for x in 0..n {
        for (y, p) in binomial_pmf_vec(x, q).into_iter().enumerate() {
            data[x * n + y] = p;
        }
    }
    TransitionMatrix::new(kind, n, n, data)
}

/// Number of next-slot arrivals contributed by one symbol drawn from `a`:
/// p(y′) = Σ_x a_x C(x, y′) q2^{y′} (1−q2)^{x−y′}.
pub fn residual_pmf(a: &InputDistribution, q2: f64) -> Result<Vec<f64>> {
    check_prob("q2", q2)?;
    let x_max = a.x_max();
    let mut out = vec![0.0; x_max + 1];
    for x in 0..=x_max {
        let w = a.get(x);
        if w == 0.0 {
            continue;
        }
        for (y, p) in binomial_pmf_vec(x, q2).into_iter().enumerate() {
            out[y] += w * p;
        }
    }
    Ok(out)
}

/// Same-slot absorption count out of `x_prev` released molecules:
/// Binomial(x_prev, q1).
pub fn detained_pmf(x_prev: usize, q1: f64) -> Result<Vec<f64>> {
    check_prob("q1", q1)?;
    Ok(binomial_pmf_vec(x_prev, q1))
}

// convolution of two pmf vectors
fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Marginal one-slot-interference law p(y_m | x_m): same-slot arrivals from
/// the current symbol plus next-slot arrivals from the previous symbol, the
/// latter averaged over `a`. The inner summation limit is clamped at
/// max(0, y_m − i); written limits go negative and the combinatorial terms
/// vanish there.
pub fn isi_marginal_transition(
    a: &InputDistribution,
    ap: &ArrivalProbs,
    x_max: usize,
) -> Result<TransitionMatrix> {
    check_alphabet(a, x_max)?;
    let residual = residual_pmf(a, ap.q2())?;
    let cols = 2 * x_max + 1;
    let mut data = vec![0.0; (x_max + 1) * cols];
    for x in 0..=x_max {
        let own = binomial_pmf_vec(x, ap.q1());
        let row = convolve(&own, &residual);
        data[x * cols..x * cols + row.len()].copy_from_slice(&row);
    }
    Ok(TransitionMatrix::new(MatrixKind::IsiMarginal, x_max + 1, cols, data))
}

/// Output marginal p(y) = Σ_x a_x P(x, y).
pub fn output_marginal(a: &InputDistribution, p: &TransitionMatrix) -> Result<Vec<f64>> {
    if p.rows() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows, input distribution has {} entries",
            p.rows(),
            a.len()
        )));
    }
    let mut out = vec![0.0; p.cols()];
    for x in 0..p.rows() {
        let w = a.get(x);
        if w == 0.0 {
            continue;
        }
        for (y, &v) in p.row(x).iter().enumerate() {
            out[y] += w * v;
        }
    }
    Ok(out)
}

/// p(y_m | y_{m−1}, x_m, x_{m−1}, y′_{m−2}): same-slot arrivals from the
/// current symbol convolved with next-slot arrivals from the
/// x″ = x_prev − (y_prev − y_resid) molecules of the previous symbol that
/// were not absorbed in their own slot. Impossible conditioning events
/// return 0. The summation lower limit is clamped at max(0, y_m − x″).
pub fn next_given_history(
    y_m: usize,
    y_prev: usize,
    x_m: usize,
    x_prev: usize,
    y_resid: usize,
    ap: &ArrivalProbs,
) -> f64 {
    if y_resid > y_prev || y_prev - y_resid > x_prev {
        return 0.0;
    }
    let x_rem = x_prev - (y_prev - y_resid);
    if y_m > x_m + x_rem {
        return 0.0;
    }
    let lo = y_m.saturating_sub(x_rem);
    let hi = y_m.min(x_m);
    let mut total = 0.0;
    for i in lo..=hi {
        total += binomial_pmf(x_m, i, ap.q1()) * binomial_pmf(x_rem, y_m - i, ap.q2());
    }
    total
}

/// Pairwise law p(y_{m−1}, y_m | x_{m−1}) on the (2x_max+1)² output alphabet,
/// with the pair (y_prev, y_m) at column [`joint_index`].
///
/// Assembled as Σ_{y_resid} detained(x_prev)[y_prev − y_resid] ·
/// residual[y_resid] · Σ_{x_m} a_{x_m} · next_given_history(...); the
/// division by p(y_prev | x_prev) in the conditional-weight form cancels
/// against the leading factor, which also settles the p(y_prev | x_prev) = 0
/// case: every term is 0 and no division occurs.
pub fn lb2_joint_transition(
    a: &InputDistribution,
    ap: &ArrivalProbs,
    x_max: usize,
) -> Result<TransitionMatrix> {
    check_alphabet(a, x_max)?;
    let residual = residual_pmf(a, ap.q2())?;
    let per_slot = 2 * x_max + 1;
    let cols = per_slot * per_slot;

    // pair convolutions conv(Binom(x_m, q1), Binom(x_rem, q2)) reused across
    // every (x_prev, y_prev, y_resid) combination
    let own: Vec<Vec<f64>> = (0..=x_max).map(|x| binomial_pmf_vec(x, ap.q1())).collect();
    let next: Vec<Vec<f64>> = (0..=x_max).map(|x| binomial_pmf_vec(x, ap.q2())).collect();
    let pair: Vec<Vec<Vec<f64>>> = (0..=x_max)
        .map(|x_m| (0..=x_max).map(|x_rem| convolve(&own[x_m], &next[x_rem])).collect())
        .collect();

    let mut data = vec![0.0; (x_max + 1) * cols];
    for x_prev in 0..=x_max {
        let detained = &own[x_prev];
        let row = &mut data[x_prev * cols..(x_prev + 1) * cols];
        for y_prev in 0..per_slot {
            for y_resid in 0..=y_prev.min(x_max) {
                let absorbed = y_prev - y_resid;
                if absorbed > x_prev {
                    continue;
                }
                let w = detained[absorbed] * residual[y_resid];
                if w == 0.0 {
                    continue;
                }
                let x_rem = x_prev - absorbed;
                for x_m in 0..=x_max {
                    let wa = w * a.get(x_m);
                    if wa == 0.0 {
                        continue;
                    }
                    let conv = &pair[x_m][x_rem];
                    let base = y_prev * per_slot;
                    for (y_m, &c) in conv.iter().enumerate() {
                        row[base + y_m] += wa * c;
                    }
                }
            }
        }
    }
    Ok(TransitionMatrix::new(MatrixKind::IsiJoint, x_max + 1, cols, data))
}

/// Interference pmf at look-back depth `k`, built by induction: P_1 is a
/// point mass at zero, and P_k convolves P_{k−1} with the `a`-mixed binomial
/// arrival law at depth k. Molecules at depth d use their own arrival
/// probability q_d, supplied as `slot_probs[d-2]` for d in 2..=k.
pub fn interference_recursion(
    a: &InputDistribution,
    slot_probs: &[f64],
    k: usize,
) -> Result<InterferencePmf> {
    if k < 1 {
        return Err(Error::InvalidParameter("slot index k must be >= 1".into()));
    }
    if slot_probs.len() + 1 < k {
        return Err(Error::InvalidParameter(format!(
            "need q_d for depths 2..={k}, got {} values",
            slot_probs.len()
        )));
    }
    let mut probs = vec![1.0];
    for depth in 2..=k {
        let mix = residual_pmf(a, slot_probs[depth - 2])?;
        probs = convolve(&probs, &mix);
    }
    debug_assert_eq!(probs.len(), (k - 1) * a.x_max() + 1);
    Ok(InterferencePmf { k, probs })
}

/// Matched-filter second slot: with y_prev of x_prev molecules already
/// absorbed, the listen-only slot receives Binomial(x_prev − y_prev, q2)
/// molecules. Impossible conditioning (y_prev > x_prev) returns 0.
pub fn mf_second_slot(y_m: usize, y_prev: usize, x_prev: usize, q2: f64) -> f64 {
    if y_prev > x_prev {
        return 0.0;
    }
    binomial_pmf(x_prev - y_prev, y_m, q2)
}

/// Matched-filter two-slot joint law p(y_{m−1}, y_m | x_{m−1}): the first
/// slot absorbs Binomial(x, q1), the second Binomial(x − y_prev, q2). Columns
/// use the same pair encoding as [`lb2_joint_transition`].
pub fn mf_joint_transition(ap: &ArrivalProbs, x_max: usize) -> Result<TransitionMatrix> {
    if x_max < 1 {
        return Err(Error::InvalidParameter("x_max must be >= 1".into()));
    }
    let per_slot = 2 * x_max + 1;
    let cols = per_slot * per_slot;
    let mut data = vec![0.0; (x_max + 1) * cols];
    for x in 0..=x_max {
        let first = binomial_pmf_vec(x, ap.q1());
        let row = &mut data[x * cols..(x + 1) * cols];
        for (y_prev, &p1) in first.iter().enumerate() {
            if p1 == 0.0 {
                continue;
            }
            for y_m in 0..=(x - y_prev) {
                row[y_prev * per_slot + y_m] = p1 * mf_second_slot(y_m, y_prev, x, ap.q2());
            }
        }
    }
    Ok(TransitionMatrix::new(MatrixKind::MfSecond, x_max + 1, cols, data))
}
