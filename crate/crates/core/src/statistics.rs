//! Sample-complexity and confidence mathematics.
//!
//! The accept count m out of n measurements is compared against the
//! worst-case accept probability 1 − f·ε; the Chernoff bound
//! δ ≤ exp(−D(m/n ‖ 1−f·ε)·n) with the Bernoulli relative entropy D turns
//! counts into confidence statements. Natural logarithms throughout, so that
//! the m = n case reduces exactly to δ = (1 − f·ε)ⁿ.

use core::fmt;

// Required for f64 math under no_std; the import looks unused in test
// builds, where std in the crate graph provides the inherent methods.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsError {
    /// A parameter is outside its admissible range; names the parameter.
    InvalidArgument(&'static str),
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

/// Outcome of a bound evaluation. `Inconclusive` is the regime where the
/// accept frequency is too low for the bound to make any statement
/// (m/n < 1 − f·ε); it is deliberately distinct from a weak bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Bound(f64),
    Inconclusive,
}

impl Verdict {
    pub fn value(self) -> Option<f64> {
        match self {
            Verdict::Bound(v) => Some(v),
            Verdict::Inconclusive => None,
        }
    }
}

/// Relative entropy D(x‖y) between Bernoulli(x) and Bernoulli(y), natural
/// log, with the convention 0·ln 0 = 0. Requires y ∈ (0,1).
pub fn kl_divergence(x: f64, y: f64) -> Result<f64, StatsError> {
    if !(0.0..=1.0).contains(&x) || !x.is_finite() {
        return Err(StatsError::InvalidArgument("x must be in [0, 1]"));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(StatsError::InvalidArgument("y must be in (0, 1)"));
    }
    // boundary forms avoid the division-before-log roundoff, which matters
    // when the divergence is scaled by large n
    if x == 1.0 {
        return Ok(-y.ln());
    }
    if x == 0.0 {
        return Ok(-(-y).ln_1p());
    }
    let d = x * (x / y).ln() + (1.0 - x) * ((1.0 - x) / (1.0 - y)).ln();
    // roundoff can leave a tiny negative value at x ≈ y
    Ok(d.max(0.0))
}

/// Measurements required by the globally optimal strategy:
/// ln(δ⁻¹) / ln((1−ε)⁻¹), as a real number.
pub fn n_global_real(epsilon: f64, delta: f64) -> Result<f64, StatsError> {
    check_unit_open(epsilon, "epsilon")?;
    check_unit_open(delta, "delta")?;
    Ok((1.0 / delta).ln() / (1.0 / (1.0 - epsilon)).ln())
}

/// Ceiling of [`n_global_real`].
pub fn n_global(epsilon: f64, delta: f64) -> Result<u64, StatsError> {
    Ok(n_global_real(epsilon, delta)?.ceil() as u64)
}

/// Measurements required by a local strategy with efficiency f:
/// ln(δ⁻¹) / ln((1−f·ε)⁻¹), as a real number. Reduces to the global count at
/// f = 1.
pub fn n_local_real(epsilon: f64, delta: f64, f: f64) -> Result<f64, StatsError> {
    check_unit_open(epsilon, "epsilon")?;
    check_unit_open(delta, "delta")?;
    check_efficiency(f)?;
    if f * epsilon >= 1.0 {
        return Err(StatsError::InvalidArgument("f * epsilon must be < 1"));
    }
    Ok((1.0 / delta).ln() / (1.0 / (1.0 - f * epsilon)).ln())
}

/// Ceiling of [`n_local_real`].
pub fn n_local(epsilon: f64, delta: f64, f: f64) -> Result<u64, StatsError> {
    Ok(n_local_real(epsilon, delta, f)?.ceil() as u64)
}

/// Confidence-failure bound δ = exp(−D(m/n ‖ 1−f·ε)·n) at a fixed infidelity
/// claim ε. Returns `Inconclusive` when the accept frequency m/n falls below
/// 1 − f·ε.
pub fn delta_from_counts(n: u64, m: u64, epsilon: f64, f: f64) -> Result<Verdict, StatsError> {
    if n == 0 || m > n {
        return Err(StatsError::InvalidArgument("require 0 < n and m <= n"));
    }
    check_unit_open(epsilon, "epsilon")?;
    check_efficiency(f)?;
    let y = 1.0 - f * epsilon;
    if y <= 0.0 || y >= 1.0 {
        return Err(StatsError::InvalidArgument("f * epsilon must be in (0, 1)"));
    }
    let p = m as f64 / n as f64;
    if p < y {
        return Ok(Verdict::Inconclusive);
    }
    let d = kl_divergence(p, y)?;
    let delta = (-d * n as f64).exp();
    Ok(Verdict::Bound(delta.min(1.0)))
}

/// The smallest ε for which `delta_from_counts(n, m, ε, f) ≤ delta`, i.e. the
/// tightest infidelity claim supported at confidence 1−δ.
///
/// For m = n this is the closed form (1 − δ^{1/n})/f; otherwise the bound is
/// strictly decreasing in ε on ((1 − m/n)/f, 1/f), so bisection finds the
/// unique crossing. Returns `Inconclusive` when no ε < 1 achieves the target
/// δ.
pub fn epsilon_from_confidence(n: u64, m: u64, delta: f64, f: f64) -> Result<Verdict, StatsError> {
    if n == 0 || m > n {
        return Err(StatsError::InvalidArgument("require 0 < n and m <= n"));
    }
    check_unit_open(delta, "delta")?;
    check_efficiency(f)?;

    if m == n {
        let eps = (1.0 - delta.powf(1.0 / n as f64)) / f;
        return Ok(if eps < 1.0 { Verdict::Bound(eps) } else { Verdict::Inconclusive });
    }

    let p = m as f64 / n as f64;
    if p == 0.0 {
        return Ok(Verdict::Inconclusive);
    }
    let bound_at = |eps: f64| -> f64 {
        let y = 1.0 - f * eps;
        let d = kl_divergence(p, y).expect("y in (0,1) inside bracket");
        (-d * n as f64).exp()
    };

    // bracket: δ-bound is 1 at the left end and → 0 as ε → 1/f
    let mut lo = (1.0 - p) / f;
    let mut hi = (1.0 / f).min(1.0 / f - f64::EPSILON / f);
    if bound_at(hi * (1.0 - 1e-15)) > delta {
        return Ok(Verdict::Inconclusive);
    }
    hi *= 1.0 - 1e-15;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound_at(mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
    }
    let eps = hi;
    Ok(if eps < 1.0 { Verdict::Bound(eps) } else { Verdict::Inconclusive })
}

fn check_unit_open(v: f64, name: &'static str) -> Result<(), StatsError> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidArgument(name))
    }
}

fn check_efficiency(f: f64) -> Result<(), StatsError> {
    if f.is_finite() && f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidArgument("f must be in (0, 1]"))
    }
}
