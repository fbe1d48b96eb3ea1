//! Windowed limit estimation along a scale sequence.

use serde::{Deserialize, Serialize};

use crate::metric::{Exactness, SpaceOracle};

/// Default plateau window.
pub const WINDOW: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute plateau tolerance `τ_abs`.
    pub abs: f64,
    /// Relative plateau tolerance `τ_rel`.
    pub rel: f64,
    /// Quotient tolerance `τ`: sequences closer than this are identified.
    pub tau: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_window() -> usize {
    WINDOW
}

impl Tolerances {
    pub fn exact() -> Self {
        Tolerances {
            abs: 1e-6,
            rel: 1e-3,
            tau: 1e-6,
            window: WINDOW,
        }
    }

    pub fn sampled() -> Self {
        Tolerances {
            abs: 1e-3,
            rel: 1e-3,
            tau: 1e-2,
            window: WINDOW,
        }
    }

    pub fn for_exactness(e: Exactness) -> Self {
        match e {
            Exactness::Exact => Tolerances::exact(),
            Exactness::Sampled => Tolerances::sampled(),
        }
    }

    pub fn for_space(oracle: &SpaceOracle) -> Self {
        Tolerances::for_exactness(oracle.exactness())
    }

    /// Even/odd window means further apart than this declare oscillation.
    pub fn oscillation(&self) -> f64 {
        10.0 * self.tau
    }

    pub fn is_valid(&self) -> bool {
        self.abs > 0.0 && self.rel >= 0.0 && self.tau > 0.0 && self.window >= 2
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::exact()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitStatus {
    Converged,
    Diverged,
    Oscillating,
    InsufficientData,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// The last value of the sequence; `+inf` when it diverges upwards.
    pub value: f64,
    pub status: LimitStatus,
    /// Spread of the last window.
    pub residual: f64,
    /// First and last (1-based) indices of the window.
    pub window: (usize, usize),
    /// Means over even and odd indices of the last two windows.
    pub sublimits: Option<(f64, f64)>,
}

impl LimitEstimate {
    pub fn is_converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }

    /// `|even - odd|` when sublimits were computed.
    pub fn sublimit_gap(&self) -> Option<f64> {
        self.sublimits.map(|(e, o)| (e - o).abs())
    }
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Strictly increasing with non-shrinking increments.
fn is_accelerating(tail: &[f64]) -> bool {
    let steps: Vec<f64> = tail.windows(2).map(|p| p[1] - p[0]).collect();
    steps.iter().all(|d| *d > 0.0) && steps.windows(2).all(|p| p[1] >= p[0])
}

/// Estimates `lim v_n` from `v_1, ..., v_N` (index `n` is the position plus one).
pub fn estimate_limit(values: &[f64], tol: &Tolerances) -> LimitEstimate {
    let n = values.len();
    let w = tol.window.max(2);
    let last = values.last().copied().unwrap_or(f64::NAN);
    if n < 2 * w || values.iter().any(|v| v.is_nan()) {
        return LimitEstimate {
            value: last,
            status: LimitStatus::InsufficientData,
            residual: f64::NAN,
            window: (n.saturating_sub(w) + 1, n),
            sublimits: None,
        };
    }
    if values[n - w..].iter().any(|v| v.is_infinite()) {
        return LimitEstimate {
            value: f64::INFINITY,
            status: LimitStatus::Diverged,
            residual: f64::INFINITY,
            window: (n - w + 1, n),
            sublimits: None,
        };
    }
    let tail = &values[n - w..];
    let residual = spread(tail);
    let double = &values[n - 2 * w..];
    let first_index = n - 2 * w + 1;
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for (i, v) in double.iter().enumerate() {
        if (first_index + i) % 2 == 0 {
            even.push(*v);
        } else {
            odd.push(*v);
        }
    }
    let (me, mo) = (mean(&even), mean(&odd));
    let osc = tol.oscillation();
    let settled = |xs: &[f64]| spread(xs) <= osc.max(tol.abs + tol.rel * mean(xs).abs());
    let status = if (me - mo).abs() > osc && settled(&even) && settled(&odd) {
        LimitStatus::Oscillating
    } else if residual <= tol.abs + tol.rel * last.abs() {
        LimitStatus::Converged
    } else if is_accelerating(tail) {
        LimitStatus::Diverged
    } else {
        LimitStatus::InsufficientData
    };
    LimitEstimate {
        value: last,
        status,
        residual,
        window: (n - w + 1, n),
        sublimits: Some((me, mo)),
    }
}

/// Least-squares line through `(x_i, y_i)`; returns `(intercept, slope)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return (my, 0.0);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}
