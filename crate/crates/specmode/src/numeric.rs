//! Shared numerical primitives: compensated summation and log-domain
//! combinatorics.

/// Neumaier's variant of Kahan summation.
///
/// Partial sums over disjoint chunks can be combined by feeding each chunk
/// total into a fresh accumulator in a fixed order, which keeps parallel
/// reductions bit-reproducible for a given chunking.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// ln(n!) via the log-gamma function.
pub fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// ln C(n, k); `f64::NEG_INFINITY` when k > n.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// C(n, k) as an exact integer, if it fits in u128.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128; // exact: prefix products are binomials
    }
    Some(acc)
}

/// log(Σ exp(x_i)) over a slice that may contain `NEG_INFINITY` entries.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut sum = NeumaierSum::new();
    for &v in values {
        if v != f64::NEG_INFINITY {
            sum.add((v - max).exp());
        }
    }
    max + sum.total().ln()
}
