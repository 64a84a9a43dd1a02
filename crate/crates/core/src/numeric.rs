//! Numerically stable helpers shared across the crate: log-sum-exp,
//! log-binomials, logistic functions, compensated summation, and a
//! one-dimensional golden-section maximizer.

/// `log(sum(exp(x)))` with max-subtraction. Empty input yields `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &x in xs {
        if x > m {
            m = x;
        }
    }
    if !m.is_finite() {
        return m;
    }
    let mut s = 0.0;
    for &x in xs {
        s += (x - m).exp();
    }
    m + s.ln()
}

/// `log(binomial(n, k))` via log-gamma.
pub fn log_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n, "binomial index out of range: C({n}, {k})");
    if k == 0 || k == n {
        return 0.0;
    }
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}

/// Logistic function `1 / (1 + exp(-x))`, stable on both tails.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(sigmoid(x))` without intermediate underflow.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Shrinks the bracket until its width is at most `xtol`, then returns
/// the best evaluated point. Assumes `f` is continuous; for multimodal
/// functions this finds a local maximum, so callers pair it with a grid
/// scan when unimodality is not established.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    debug_assert!(b >= a);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    // Include the endpoints: the maximum may sit on the bracket edge.
    let fa = f(a);
    let fb = f(b);
    let mut best = (x1, f1);
    for cand in [(x2, f2), (a, fa), (b, fb)] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

/// Relative-or-absolute closeness: `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    let scale = 1.0_f64.max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale
}
