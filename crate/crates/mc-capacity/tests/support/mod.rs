//! Independent oracles for the integration suites: adaptive quadrature for
//! the distribution functions, per-molecule enumerators for every transition
//! law, plug-in mutual information over explicit joint pmfs, and exhaustive
//! simplex grid searches. Nothing here shares code with the library's own
//! computation paths.

#![allow(dead_code)]

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over [a, b].
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_step(&f, a, b, fa, fm, fb, whole, tol, 60)
}

/// Standard normal CDF by quadrature of the density.
pub fn normal_cdf_quad(z: f64) -> f64 {
    let density =
        |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if z >= 0.0 {
        0.5 + adaptive_simpson(density, 0.0, z, 1e-13)
    } else {
        0.5 - adaptive_simpson(density, z, 0.0, 1e-13)
    }
}

fn ig_density(mu: f64, lambda: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    let expo = -lambda * (w - mu) * (w - mu) / (2.0 * mu * mu * w);
    (lambda / (2.0 * std::f64::consts::PI * w * w * w)).sqrt() * expo.exp()
}

/// Inverse-Gaussian CDF by quadrature of the density over [0, w].
pub fn ig_cdf_quad(mu: f64, lambda: f64, w: f64) -> f64 {
    if w <= 0.0 {
        return 0.0;
    }
    // split at the midpoint so sharply peaked densities are bracketed
    let mid = 0.5 * w.min(mu);
    adaptive_simpson(|t| ig_density(mu, lambda, t), 0.0, mid, 5e-13)
        + adaptive_simpson(|t| ig_density(mu, lambda, t), mid, w, 5e-13)
}

// ---------------------------------------------------------------------------
// per-molecule enumerators
// ---------------------------------------------------------------------------

/// Iterate every assignment of `n` molecules to two outcomes (hit with
/// probability `p`), yielding (hits, probability of the assignment).
fn for_each_bernoulli(n: usize, p: f64, mut f: impl FnMut(usize, f64)) {
    for mask in 0..(1usize << n) {
        let mut prob = 1.0;
        let mut hits = 0;
        for bit in 0..n {
            if mask >> bit & 1 == 1 {
                prob *= p;
                hits += 1;
            } else {
                prob *= 1.0 - p;
            }
        }
        f(hits, prob);
    }
}

/// Iterate every assignment of `n` molecules to three outcomes with the
/// given probabilities, yielding (count0, count1, probability).
fn for_each_trinomial(n: usize, p: [f64; 3], mut f: impl FnMut(usize, usize, f64)) {
    let total = 3usize.pow(n as u32);
    for mut code in 0..total {
        let mut prob = 1.0;
        let mut c0 = 0;
        let mut c1 = 0;
        for _ in 0..n {
            match code % 3 {
                0 => {
                    prob *= p[0];
                    c0 += 1;
                }
                1 => {
                    prob *= p[1];
                    c1 += 1;
                }
                _ => prob *= p[2],
            }
            code /= 3;
        }
        f(c0, c1, prob);
    }
}

/// One-slot marginal law by enumeration: the previous symbol j ~ a sends
/// each molecule into the next slot with probability q2, the current symbol
/// lands each molecule in its own slot with probability q1.
pub fn enum_marginal_law(a: &[f64], q1: f64, q2: f64) -> Vec<Vec<f64>> {
    let x_max = a.len() - 1;
    let mut rows = vec![vec![0.0; 2 * x_max + 1]; x_max + 1];
    for x in 0..=x_max {
        for (j, &aj) in a.iter().enumerate() {
            for_each_bernoulli(x, q1, |own, p_own| {
                for_each_bernoulli(j, q2, |late, p_late| {
                    rows[x][own + late] += aj * p_own * p_late;
                });
            });
        }
    }
    rows
}

/// Next-slot arrival mixture by enumeration.
pub fn enum_residual(a: &[f64], q2: f64) -> Vec<f64> {
    let x_max = a.len() - 1;
    let mut out = vec![0.0; x_max + 1];
    for (j, &aj) in a.iter().enumerate() {
        for_each_bernoulli(j, q2, |late, p| out[late] += aj * p);
    }
    out
}

/// Same-slot absorption law by enumeration.
pub fn enum_detained(x_prev: usize, q1: f64) -> Vec<f64> {
    let mut out = vec![0.0; x_prev + 1];
    for_each_bernoulli(x_prev, q1, |own, p| out[own] += p);
    out
}

/// Conditional law of the next received count given x_m fresh molecules
/// (each arriving with probability q1) and x_rem still-in-flight molecules
/// (each arriving with probability q2), by enumeration.
pub fn enum_next_given_history(x_m: usize, x_rem: usize, q1: f64, q2: f64) -> Vec<f64> {
    let mut out = vec![0.0; x_m + x_rem + 1];
    for_each_bernoulli(x_m, q1, |own, p_own| {
        for_each_bernoulli(x_rem, q2, |late, p_late| out[own + late] += p_own * p_late);
    });
    out
}

/// Pairwise law p(y_prev, y_m | x_prev) by enumeration, mirroring the
/// layered conditional structure of the analytic law: interference molecules
/// from two slots back arrive with probability q2 outright; the conditioned
/// symbol's molecules land in their own slot with probability q1, else in
/// the next slot with probability q2 given the miss; the following symbol
/// contributes same-slot arrivals with probability q1. Column (y_prev, y_m)
/// is y_prev·(2·x_max+1) + y_m.
pub fn enum_pair_law_layered(a: &[f64], q1: f64, q2: f64) -> Vec<Vec<f64>> {
    let x_max = a.len() - 1;
    let per_slot = 2 * x_max + 1;
    let cats = [q1, (1.0 - q1) * q2, (1.0 - q1) * (1.0 - q2)];
    let mut rows = vec![vec![0.0; per_slot * per_slot]; x_max + 1];
    for x_prev in 0..=x_max {
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0.0 {
                continue;
            }
            for (x_m, &am) in a.iter().enumerate() {
                if am == 0.0 {
                    continue;
                }
                for_each_bernoulli(j, q2, |resid, p_resid| {
                    for_each_trinomial(x_prev, cats, |own, next, p_mid| {
                        for_each_bernoulli(x_m, q1, |fresh, p_fresh| {
                            let y_prev = resid + own;
                            let y_m = next + fresh;
                            rows[x_prev][y_prev * per_slot + y_m] +=
                                aj * am * p_resid * p_mid * p_fresh;
                        });
                    });
                });
            }
        }
    }
    rows
}

/// Pairwise law of the categorical per-molecule stream (own slot q1, next
/// slot q2, vanish otherwise) — the law the truncated simulator actually
/// realizes. Differs from [`enum_pair_law_layered`] whenever q1 > 0: there a
/// molecule that missed its own slot arrives next with probability
/// q2/(1−q1), not q2.
pub fn enum_pair_law_categorical(a: &[f64], q1: f64, q2: f64) -> Vec<Vec<f64>> {
    let x_max = a.len() - 1;
    let per_slot = 2 * x_max + 1;
    let cats = [q1, q2, 1.0 - q1 - q2];
    let mut rows = vec![vec![0.0; per_slot * per_slot]; x_max + 1];
    for x_prev in 0..=x_max {
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0.0 {
                continue;
            }
            for (x_m, &am) in a.iter().enumerate() {
                if am == 0.0 {
                    continue;
                }
                for_each_trinomial(j, cats, |_, resid, p_resid| {
                    for_each_trinomial(x_prev, cats, |own, next, p_mid| {
                        for_each_trinomial(x_m, cats, |fresh, _, p_fresh| {
                            let y_prev = resid + own;
                            let y_m = next + fresh;
                            rows[x_prev][y_prev * per_slot + y_m] +=
                                aj * am * p_resid * p_mid * p_fresh;
                        });
                    });
                });
            }
        }
    }
    rows
}

/// Matched-filter two-slot law by enumeration: every molecule of the symbol
/// lands in the first slot (q1), the listen slot ((1−q1)q2), or nowhere.
pub fn enum_mf_law(q1: f64, q2: f64, x_max: usize) -> Vec<Vec<f64>> {
    let per_slot = 2 * x_max + 1;
    let cats = [q1, (1.0 - q1) * q2, (1.0 - q1) * (1.0 - q2)];
    let mut rows = vec![vec![0.0; per_slot * per_slot]; x_max + 1];
    for x in 0..=x_max {
        for_each_trinomial(x, cats, |first, second, p| {
            rows[x][first * per_slot + second] += p;
        });
    }
    rows
}

/// Interference pmf at depth 3 by enumeration over the two contributing
/// symbols (depth-2 molecules arrive with q2, depth-3 with q3).
pub fn enum_interference_depth3(a: &[f64], q2: f64, q3: f64) -> Vec<f64> {
    let x_max = a.len() - 1;
    let mut out = vec![0.0; 2 * x_max + 1];
    for (j2, &a2) in a.iter().enumerate() {
        for (j3, &a3) in a.iter().enumerate() {
            for_each_bernoulli(j2, q2, |h2, p2| {
                for_each_bernoulli(j3, q3, |h3, p3| {
                    out[h2 + h3] += a2 * a3 * p2 * p3;
                });
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// plug-in information quantities
// ---------------------------------------------------------------------------

/// Mutual information (bits) of the joint pmf p(x, y) = a_x · law[x][y],
/// straight from the definition.
pub fn plugin_mi(a: &[f64], law: &[Vec<f64>]) -> f64 {
    let n_out = law[0].len();
    let mut py = vec![0.0; n_out];
    for (x, row) in law.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            py[y] += a[x] * v;
        }
    }
    let mut mi = 0.0;
    for (x, row) in law.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            let pxy = a[x] * v;
            if pxy > 0.0 {
                mi += pxy * (pxy / (a[x] * py[y])).log2();
            }
        }
    }
    mi
}

// ---------------------------------------------------------------------------
// exhaustive simplex searches (x_max = 2)
// ---------------------------------------------------------------------------

/// Walk the probability simplex over three symbols with the given step,
/// maximizing `f`.
pub fn grid_search_simplex3(step: f64, mut f: impl FnMut(&[f64; 3]) -> f64) -> (f64, [f64; 3]) {
    let n = (1.0 / step).round() as usize;
    let mut best = (f64::NEG_INFINITY, [0.0; 3]);
    for i in 0..=n {
        let a0 = i as f64 * step;
        for j in 0..=(n - i) {
            let a1 = j as f64 * step;
            let a = [a0, a1, (1.0 - a0 - a1).max(0.0)];
            let v = f(&a);
            if v > best.0 {
                best = (v, a);
            }
        }
    }
    best
}
