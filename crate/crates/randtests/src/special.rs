use statrs::function::{erf, gamma};

pub(crate) fn erfc(x: f64) -> f64 {
    erf::erfc(x)
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub(crate) fn igamc(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma::gamma_ur(a, x)
}

/// Standard normal CDF.
pub(crate) fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub(crate) fn clamp_p(p: f64) -> f64 {
    if p.is_nan() {
        0.0
    } else {
        p.clamp(0.0, 1.0)
    }
}
