//! Special-function support: complementary error function with a log-domain
//! branch for arguments far in the tail, and binomial probabilities that stay
//! accurate for large counts.

/// erfc(x), delegated to libm.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// ln(erfc(x)) without underflow.
///
/// `erfc` itself underflows near x ≈ 26.6; beyond x = 8 we switch to the
/// asymptotic expansion erfc(x) = exp(-x²)/(x√π) · Σ (-1)ⁿ (2n-1)!!/(2x²)ⁿ,
/// whose terms shrink immediately at that magnitude.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 8.0 {
        return libm::erfc(x).ln();
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 1.0;
    let mut coeff = 1.0;
    let mut power = 1.0;
    for n in 1..12 {
        coeff *= -(2.0 * n as f64 - 1.0) / 2.0;
        power *= inv2;
        let term = coeff * power;
        series += term;
        if term.abs() < 1e-18 * series.abs() {
            break;
        }
    }
    -x * x - (x * std::f64::consts::PI.sqrt()).ln() + series.ln()
}

/// Binomial pmf value C(n,k) pᵏ (1-p)ⁿ⁻ᵏ.
///
/// Counts up to 30 use exact double-precision coefficients (so degenerate and
/// dyadic probabilities come out exact); larger counts accumulate in log
/// domain.
pub fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    if n <= 30 {
        return choose_exact(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
    }
    let ln = ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p();
    ln.exp()
}

/// Binomial pmf over the full support 0..=n.
pub fn binomial_pmf_vec(n: usize, p: f64) -> Vec<f64> {
    (0..=n).map(|k| binomial_pmf(n, k, p)).collect()
}

// C(n,k) is an integer at every step of the multiplicative recurrence, and
// stays below 2^53 for n <= 30, so this is exact.
fn choose_exact(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c.round()
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}
