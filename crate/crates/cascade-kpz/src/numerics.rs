//! Base-2 log-domain arithmetic and small statistics helpers.
//!
//! All cascade masses live in log2 space (products of thousands of weights
//! underflow f64 fast), so sums of masses go through a stable log-sum-exp.
//! Reduction order is always fixed by the caller; nothing here is
//! order-insensitive by accident.

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// log2(2^a + 2^b), stable for widely separated magnitudes.
#[inline]
pub fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() * LOG2_E
}

/// log2 of the sum of 2^x over a slice, max-shifted for accuracy.
pub fn log2_sum(xs: &[f64]) -> f64 {
    let mx = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut acc = 0.0;
    for &x in xs {
        acc += (x - mx).exp2();
    }
    mx + acc.log2()
}

/// Least-squares slope of y against x.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[derive(Debug, Clone, Copy)]
pub struct MeanStats {
    pub mean: f64,
    pub sd: f64,
    pub std_error: f64,
    pub count: usize,
}

/// Sample mean, standard deviation (n−1) and standard error.
pub fn mean_stats(xs: &[f64]) -> MeanStats {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    let sd = var.sqrt();
    MeanStats {
        mean,
        sd,
        std_error: sd / (n as f64).sqrt(),
        count: n,
    }
}
