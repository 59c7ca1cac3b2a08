//! Per-molecule Monte-Carlo oracle for the slotted channel. Runs either a
//! truncated two-slot mode (each molecule lands in its own slot, the next
//! slot, or vanishes — the fast path for validating the analytic laws) or a
//! full mode that samples actual transit times and keeps arbitrarily late
//! arrivals, used to quantify what the two-slot truncation discards.
//!
//! Everything is seeded and bit-reproducible: identical configuration and
//! seed give identical streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::aign::{AignParams, ArrivalProbs};
use crate::channel::{
    isi_marginal_transition, joint_index, next_given_history, residual_pmf, InputDistribution,
};
use crate::special::binomial_pmf_vec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    /// Categorical slot assignment: own slot w.p. q1, next slot w.p. q2,
    /// vanish otherwise.
    Truncated,
    /// Sample the inverse-Gaussian transit time; late arrivals land where
    /// they land.
    Full,
}

/// One simulation run: channel, input law, length, seed, and mode.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub arrival: ArrivalProbs,
    /// Physical parameters; required in full mode.
    pub aign: Option<AignParams>,
    pub a: InputDistribution,
    pub n_slots: usize,
    pub seed: u64,
    pub mode: SimMode,
    /// Leading slots discarded before any histogramming; the analytic laws
    /// assume steady state.
    pub burn_in: usize,
}

impl SimConfig {
    pub fn truncated(
        arrival: ArrivalProbs,
        a: InputDistribution,
        n_slots: usize,
        seed: u64,
    ) -> Result<Self> {
        let cfg = Self { arrival, aign: None, a, n_slots, seed, mode: SimMode::Truncated, burn_in: 10 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn full(
        aign: AignParams,
        slot_t: f64,
        a: InputDistribution,
        n_slots: usize,
        seed: u64,
    ) -> Result<Self> {
        let arrival = ArrivalProbs::from_params(&aign, slot_t)?;
        let cfg = Self {
            arrival,
            aign: Some(aign),
            a,
            n_slots,
            seed,
            mode: SimMode::Full,
            burn_in: 10,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_slots < 1 {
            return Err(Error::InvalidParameter("n_slots must be >= 1".into()));
        }
        if self.mode == SimMode::Full && self.aign.is_none() {
            return Err(Error::InvalidParameter("full mode needs physical parameters".into()));
        }
        Ok(())
    }

    pub fn x_max(&self) -> usize {
        self.a.x_max()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// One inverse-Gaussian transit time (mean μ, shape λ) via the
/// transform-with-rejection method: one standard normal, one uniform.
pub fn sample_transit<R: Rng + ?Sized>(p: &AignParams, rng: &mut R) -> f64 {
    let nu: f64 = rng.sample(StandardNormal);
    let y = p.mu() * nu * nu;
    let x = p.mu() + 0.5 * p.mu() / p.lambda() * (y - (4.0 * p.lambda() * y + y * y).sqrt());
    // the smaller root can round to zero when y/λ is enormous
    let x = x.max(f64::MIN_POSITIVE);
    let u: f64 = rng.random();
    if u <= p.mu() / (p.mu() + x) {
        x
    } else {
        p.mu() * p.mu() / x
    }
}

/// Transmit/receive sequences plus the per-slot decomposition of each
/// symbol's molecules: absorbed in the own slot, absorbed in the next slot,
/// or outside the two-slot window (vanished in truncated mode, late in full
/// mode). The received count satisfies y[m] = same_slot[m] + next_slot[m-1]
/// (+ late arrivals landing at m in full mode).
#[derive(Debug, Clone, PartialEq)]
pub struct SimStream {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub same_slot: Vec<u32>,
    pub next_slot: Vec<u32>,
    pub late: Vec<u32>,
}

fn draw_symbol<R: Rng + ?Sized>(cum: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

/// Simulate `cfg.n_slots` slots of the channel.
pub fn simulate_stream<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<SimStream> {
    cfg.validate()?;
    let n = cfg.n_slots;
    let mut cum = Vec::with_capacity(cfg.a.len());
    let mut acc = 0.0;
    for &p in cfg.a.probs() {
        acc += p;
        cum.push(acc);
    }

    let mut stream = SimStream {
        x: vec![0; n],
        y: vec![0; n],
        same_slot: vec![0; n],
        next_slot: vec![0; n],
        late: vec![0; n],
    };
    let q1 = cfg.arrival.q1();
    let q_u = cfg.arrival.q_u();
    let slot_t = cfg.arrival.slot_t();

    for m in 0..n {
        let x = draw_symbol(&cum, rng);
        stream.x[m] = x as u32;
        for _ in 0..x {
            let offset = match cfg.mode {
                SimMode::Truncated => {
                    let u: f64 = rng.random();
                    if u < q1 {
                        0
                    } else if u < q_u {
                        1
                    } else {
                        usize::MAX // vanished
                    }
                }
                SimMode::Full => {
                    let w = sample_transit(cfg.aign.as_ref().unwrap(), rng);
                    // arrival within ((k-1)T, kT] after release lands k-1
                    // slots after the transmission slot
                    (w / slot_t).ceil() as usize - 1
                }
            };
            match offset {
                0 => {
                    stream.same_slot[m] += 1;
                    stream.y[m] += 1;
                }
                1 => {
                    stream.next_slot[m] += 1;
                    if m + 1 < n {
                        stream.y[m + 1] += 1;
                    }
                }
                _ => {
                    stream.late[m] += 1;
                    if cfg.mode == SimMode::Full && offset != usize::MAX {
                        if let Some(slot) = m.checked_add(offset).filter(|&s| s < n) {
                            stream.y[slot] += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(stream)
}

/// Plug-in estimate of the pairwise-decoding rate from a truncated stream.
#[derive(Debug, Clone, Copy)]
pub struct Lb2Estimate {
    /// Raw plug-in mutual information (upward-biased).
    pub raw: f64,
    /// Block-jackknife bias-corrected value.
    pub jackknife: f64,
    pub n_pairs: usize,
}

fn plugin_mi(counts: &[u64], n_inputs: usize, n_outputs: usize) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let tf = total as f64;
    let mut row = vec![0u64; n_inputs];
    let mut col = vec![0u64; n_outputs];
    for i in 0..n_inputs {
        for j in 0..n_outputs {
            let c = counts[i * n_outputs + j];
            row[i] += c;
            col[j] += c;
        }
    }
    let mut mi = 0.0;
    for i in 0..n_inputs {
        for j in 0..n_outputs {
            let c = counts[i * n_outputs + j];
            if c > 0 {
                let p = c as f64 / tf;
                mi += p * (p * tf * tf / (row[i] as f64 * col[j] as f64)).log2();
            }
        }
    }
    mi
}

/// Empirical I(X_{m−1}; Y_{m−1}, Y_m) from the joint histogram of
/// (x_{m−1}, y_{m−1}, y_m) over a truncated stream, with a 20-block
/// jackknife bias correction alongside the raw plug-in value.
pub fn estimate_lb2<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<Lb2Estimate> {
    if cfg.mode != SimMode::Truncated {
        return Err(Error::InvalidParameter("estimate_lb2 needs truncated mode".into()));
    }
    let x_max = cfg.x_max();
    let first_pair = cfg.burn_in + 1;
    let n_pairs = cfg.n_slots.saturating_sub(first_pair);
    if n_pairs < 100 * (x_max + 1) {
        return Err(Error::InsufficientSamples(format!(
            "{n_pairs} pairs for {} input symbols; need at least {}",
            x_max + 1,
            100 * (x_max + 1)
        )));
    }
    let stream = simulate_stream(cfg, rng)?;

    let per_slot = 2 * x_max + 1;
    let n_outputs = per_slot * per_slot;
    let n_inputs = x_max + 1;
    const BLOCKS: usize = 20;
    let mut block_counts = vec![vec![0u64; n_inputs * n_outputs]; BLOCKS];
    for (k, m) in (first_pair..cfg.n_slots).enumerate() {
        let xi = stream.x[m - 1] as usize;
        let pair = joint_index(x_max, stream.y[m - 1] as usize, stream.y[m] as usize);
        block_counts[k * BLOCKS / n_pairs][xi * n_outputs + pair] += 1;
    }
    let mut total = vec![0u64; n_inputs * n_outputs];
    for b in &block_counts {
        for (t, &c) in total.iter_mut().zip(b) {
            *t += c;
        }
    }
    let raw = plugin_mi(&total, n_inputs, n_outputs);

    let jackknife = if n_pairs >= BLOCKS * 10 {
        let mut sum_loo = 0.0;
        let mut loo = vec![0u64; n_inputs * n_outputs];
        for b in &block_counts {
            for ((l, &t), &c) in loo.iter_mut().zip(&total).zip(b) {
                *l = t - c;
            }
            sum_loo += plugin_mi(&loo, n_inputs, n_outputs);
        }
        BLOCKS as f64 * raw - (BLOCKS as f64 - 1.0) * sum_loo / BLOCKS as f64
    } else {
        raw
    };

    Ok(Lb2Estimate { raw, jackknife, n_pairs })
}

/// What the two-slot truncation discards: the fraction of molecules arriving
/// after the next slot, and the total-variation distance between the
/// conditional output rows of a full and a truncated run.
#[derive(Debug, Clone, Copy)]
pub struct TruncationReport {
    pub late_fraction: f64,
    /// 1 − q_u, the analytic counterpart of `late_fraction`.
    pub analytic_late_fraction: f64,
    pub max_row_tv: f64,
    pub mean_row_tv: f64,
}

/// Run a full-mode stream plus a truncated twin and compare their
/// conditional output laws row by row.
pub fn truncation_error<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<TruncationReport> {
    if cfg.mode != SimMode::Full {
        return Err(Error::InvalidParameter("truncation_error needs full mode".into()));
    }
    let full = simulate_stream(cfg, rng)?;
    let mut trunc_cfg = cfg.clone();
    trunc_cfg.mode = SimMode::Truncated;
    let trunc = simulate_stream(&trunc_cfg, rng)?;

    let sent: u64 = full.x.iter().map(|&v| v as u64).sum();
    let late: u64 = full.late.iter().map(|&v| v as u64).sum();
    let late_fraction = if sent == 0 { 0.0 } else { late as f64 / sent as f64 };

    let x_max = cfg.x_max();
    let max_y = full
        .y
        .iter()
        .chain(trunc.y.iter())
        .skip(cfg.burn_in)
        .cloned()
        .max()
        .unwrap_or(0) as usize;
    let cols = max_y + 1;
    let mut h_full = vec![0u64; (x_max + 1) * cols];
    let mut h_trunc = vec![0u64; (x_max + 1) * cols];
    for m in cfg.burn_in..cfg.n_slots {
        h_full[full.x[m] as usize * cols + full.y[m] as usize] += 1;
        h_trunc[trunc.x[m] as usize * cols + trunc.y[m] as usize] += 1;
    }

    let mut max_tv = 0.0f64;
    let mut sum_tv = 0.0;
    let mut rows = 0;
    for x in 0..=x_max {
        let nf: u64 = h_full[x * cols..(x + 1) * cols].iter().sum();
        let nt: u64 = h_trunc[x * cols..(x + 1) * cols].iter().sum();
        if nf == 0 || nt == 0 {
            continue;
        }
        let tv: f64 = (0..cols)
            .map(|y| {
                (h_full[x * cols + y] as f64 / nf as f64
                    - h_trunc[x * cols + y] as f64 / nt as f64)
                    .abs()
            })
            .sum::<f64>()
            / 2.0;
        max_tv = max_tv.max(tv);
        sum_tv += tv;
        rows += 1;
    }

    Ok(TruncationReport {
        late_fraction,
        analytic_late_fraction: 1.0 - cfg.arrival.q_u(),
        max_row_tv: max_tv,
        mean_row_tv: if rows == 0 { 0.0 } else { sum_tv / rows as f64 },
    })
}

pub mod validation {
    //! Empirical-vs-analytic agreement checks for every transition law,
    //! each simulated under the law's own per-molecule semantics and
    //! compared cell by cell at a standard-error criterion.

    use super::*;

    /// Outcome of one law check: the largest per-cell deviation in
    /// standard-error units (SE = sqrt(p(1−p)/n) with p the analytic cell
    /// probability), and whether every cell stayed within `se_limit`.
    #[derive(Debug, Clone)]
    pub struct LawCheck {
        pub law: String,
        pub cells: usize,
        pub max_se_units: f64,
        pub max_abs_dev: f64,
        pub pass: bool,
    }

    fn compare_cells(
        law: &str,
        rows: impl Iterator<Item = (Vec<f64>, Vec<u64>)>,
        se_limit: f64,
    ) -> LawCheck {
        let mut cells = 0;
        let mut max_se_units = 0.0f64;
        let mut max_abs_dev = 0.0f64;
        let mut pass = true;
        for (analytic, counts) in rows {
            let n: u64 = counts.iter().sum();
            if n == 0 {
                continue;
            }
            let nf = n as f64;
            for (&p, &c) in analytic.iter().zip(&counts) {
                cells += 1;
                let emp = c as f64 / nf;
                let dev = (emp - p).abs();
                max_abs_dev = max_abs_dev.max(dev);
                let se = (p * (1.0 - p) / nf).sqrt();
                if se > 0.0 {
                    let units = dev / se;
                    max_se_units = max_se_units.max(units);
                    if units > se_limit {
                        pass = false;
                    }
                } else if dev > 0.0 {
                    // impossible (p = 0) or certain (p = 1) cells admit no
                    // deviation at all
                    max_se_units = f64::INFINITY;
                    pass = false;
                }
            }
        }
        LawCheck { law: law.to_string(), cells, max_se_units, max_abs_dev, pass }
    }

    /// Binomial thinning: each of x molecules arrives independently with
    /// probability q.
    pub fn check_binomial_thinning<R: Rng + ?Sized>(
        q_analytic: f64,
        q_sim: f64,
        x_max: usize,
        trials: usize,
        se_limit: f64,
        rng: &mut R,
    ) -> LawCheck {
        let mut rows = Vec::new();
        for x in 0..=x_max {
            let mut counts = vec![0u64; x + 1];
            for _ in 0..trials {
                let mut k = 0;
                for _ in 0..x {
                    if rng.random::<f64>() < q_sim {
                        k += 1;
                    }
                }
                counts[k] += 1;
            }
            rows.push((binomial_pmf_vec(x, q_analytic), counts));
        }
        compare_cells("binomial-thinning", rows.into_iter(), se_limit)
    }

    /// One-slot-interference marginal law measured on a truncated stream.
    pub fn check_marginal_stream(
        cfg: &SimConfig,
        analytic_ap: &ArrivalProbs,
        se_limit: f64,
        stream: &SimStream,
    ) -> Result<LawCheck> {
        let x_max = cfg.x_max();
        let p = isi_marginal_transition(&cfg.a, analytic_ap, x_max)?;
        let cols = 2 * x_max + 1;
        let mut counts = vec![vec![0u64; cols]; x_max + 1];
        for m in cfg.burn_in.max(1)..cfg.n_slots {
            counts[stream.x[m] as usize][stream.y[m] as usize] += 1;
        }
        let rows = (0..=x_max).map(|x| (p.row(x).to_vec(), counts[x].clone()));
        let rows: Vec<_> = rows.collect();
        Ok(compare_cells("one-slot marginal", rows.into_iter(), se_limit))
    }

    /// Next-slot arrival mixture (one symbol drawn from `a`) measured on a
    /// truncated stream.
    pub fn check_residual_stream(
        cfg: &SimConfig,
        analytic_ap: &ArrivalProbs,
        se_limit: f64,
        stream: &SimStream,
    ) -> Result<LawCheck> {
        let x_max = cfg.x_max();
        let analytic = residual_pmf(&cfg.a, analytic_ap.q2())?;
        let mut counts = vec![0u64; x_max + 1];
        for m in cfg.burn_in..cfg.n_slots {
            counts[stream.next_slot[m] as usize] += 1;
        }
        Ok(compare_cells(
            "residual arrivals",
            std::iter::once((analytic, counts)),
            se_limit,
        ))
    }

    /// Same-slot absorption law measured on a truncated stream.
    pub fn check_detained_stream(
        cfg: &SimConfig,
        analytic_ap: &ArrivalProbs,
        se_limit: f64,
        stream: &SimStream,
    ) -> Result<LawCheck> {
        let x_max = cfg.x_max();
        let mut counts = vec![vec![0u64; x_max + 1]; x_max + 1];
        for m in cfg.burn_in..cfg.n_slots {
            counts[stream.x[m] as usize][stream.same_slot[m] as usize] += 1;
        }
        let rows: Vec<_> = (0..=x_max)
            .map(|x| (binomial_pmf_vec(x, analytic_ap.q1()), counts[x].clone()))
            .collect();
        Ok(compare_cells("same-slot absorption", rows.into_iter(), se_limit))
    }

    /// Conditional next-slot law given the in-flight count: x_m fresh
    /// molecules arrive with probability q1 each, and the x_rem molecules
    /// already in flight land with probability q2 each.
    pub fn check_next_given_history<R: Rng + ?Sized>(
        analytic_ap: &ArrivalProbs,
        sim_ap: &ArrivalProbs,
        x_max: usize,
        trials: usize,
        se_limit: f64,
        rng: &mut R,
    ) -> LawCheck {
        let mut rows = Vec::new();
        for x_m in 0..=x_max {
            for x_rem in 0..=x_max {
                let analytic: Vec<f64> = (0..=x_m + x_rem)
                    .map(|y| next_given_history(y, 0, x_m, x_rem, 0, analytic_ap))
                    .collect();
                let mut counts = vec![0u64; x_m + x_rem + 1];
                for _ in 0..trials {
                    let mut y = 0;
                    for _ in 0..x_m {
                        if rng.random::<f64>() < sim_ap.q1() {
                            y += 1;
                        }
                    }
                    for _ in 0..x_rem {
                        if rng.random::<f64>() < sim_ap.q2() {
                            y += 1;
                        }
                    }
                    counts[y] += 1;
                }
                rows.push((analytic, counts));
            }
        }
        compare_cells("in-flight conditional", rows.into_iter(), se_limit)
    }

    /// Matched-filter second slot: molecules that miss their own slot land
    /// in the listen slot with probability q2. Checked conditionally on the
    /// first-slot count.
    pub fn check_mf_second<R: Rng + ?Sized>(
        analytic_ap: &ArrivalProbs,
        sim_ap: &ArrivalProbs,
        x_max: usize,
        trials: usize,
        se_limit: f64,
        rng: &mut R,
    ) -> LawCheck {
        let mut rows = Vec::new();
        for x in 0..=x_max {
            let mut counts = vec![vec![0u64; x + 1]; x + 1];
            for _ in 0..trials {
                let mut first = 0;
                let mut second = 0;
                for _ in 0..x {
                    if rng.random::<f64>() < sim_ap.q1() {
                        first += 1;
                    } else if rng.random::<f64>() < sim_ap.q2() {
                        second += 1;
                    }
                }
                counts[first][second] += 1;
            }
            for y_prev in 0..=x {
                let analytic: Vec<f64> = (0..=x)
                    .map(|y_m| crate::channel::mf_second_slot(y_m, y_prev, x, analytic_ap.q2()))
                    .collect();
                rows.push((analytic, counts[y_prev].clone()));
            }
        }
        compare_cells("matched-filter second slot", rows.into_iter(), se_limit)
    }

    /// The full validation suite at the 4-standard-error criterion.
    ///
    /// `sim_q1_bias` perturbs only the simulated q1, leaving the analytic
    /// laws untouched — a negative control proving the checks can fail.
    pub fn run_law_checks(
        ap: &ArrivalProbs,
        a: &InputDistribution,
        n_slots: usize,
        seed: u64,
        sim_q1_bias: f64,
    ) -> Result<Vec<LawCheck>> {
        const SE_LIMIT: f64 = 4.0;
        let q1_sim = (ap.q1() + sim_q1_bias).clamp(0.0, 1.0 - ap.q2());
        let sim_ap = ArrivalProbs::synthetic(q1_sim, ap.q2())?;
        let x_max = a.x_max();

        let cfg = SimConfig::truncated(sim_ap, a.clone(), n_slots, seed)?;
        let mut rng = cfg.rng();
        let stream = simulate_stream(&cfg, &mut rng)?;

        let trials = (n_slots / (x_max + 1)).max(1);
        let mut checks = Vec::with_capacity(7);
        checks.push(check_binomial_thinning(
            ap.q1(),
            sim_ap.q1(),
            x_max,
            trials,
            SE_LIMIT,
            &mut rng,
        ));
        // the same thinning law with q = q_u backs the interference-free bound
        let mut wide = check_binomial_thinning(
            ap.q_u(),
            sim_ap.q_u(),
            x_max,
            trials,
            SE_LIMIT,
            &mut rng,
        );
        wide.law = "binomial-thinning (two-slot)".to_string();
        checks.push(wide);
        checks.push(check_marginal_stream(&cfg, ap, SE_LIMIT, &stream)?);
        checks.push(check_residual_stream(&cfg, ap, SE_LIMIT, &stream)?);
        checks.push(check_detained_stream(&cfg, ap, SE_LIMIT, &stream)?);
        checks.push(check_next_given_history(ap, &sim_ap, x_max, trials, SE_LIMIT, &mut rng));
        checks.push(check_mf_second(ap, &sim_ap, x_max, trials, SE_LIMIT, &mut rng));
        Ok(checks)
    }
}
