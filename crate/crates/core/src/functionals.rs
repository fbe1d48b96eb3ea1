//! Sphere and annulus functionals, the three uniqueness conditions and the
//! tangent-equivalence deviation `ε_a(t)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Exact, Real};
use crate::limit::{estimate_limit, linear_fit, LimitEstimate, LimitStatus, Tolerances};
use crate::metric::{Exactness, Point, SpaceOracle, DEFAULT_BAND};

pub const DEFAULT_EPSILON: f64 = 0.25;

/// Minimum number of scales in a radius grid.
pub const MIN_SCALES: usize = 8;

/// Condition (i) fails above this extrapolated value.
pub const FAIL_FLOOR_I: f64 = 0.05;

/// Condition (ii) fails when the tail ratio stays above `1 + FAIL_MARGIN_II`.
pub const FAIL_MARGIN_II: f64 = 0.05;

/// Relative window around `c₀` for accepting a snapped pair.
pub const C0_WINDOW: f64 = 0.1;

pub fn default_k_grid() -> Vec<f64> {
    vec![
        2.0, 1.5, 1.2, 1.1, 1.05, 1.02, 1.01, 1.001, 1.0001, 1.00001, 1.000001,
    ]
}

/// `r_j = (1/2) (7/10)^j` for `j = 0..=80` (exact) or `j = 0..=40` (sampled).
pub fn default_r_grid(exactness: Exactness) -> Vec<Real> {
    match exactness {
        Exactness::Exact => {
            let ratio = Exact::ratio(7, 10);
            let mut r = Exact::ratio(1, 2);
            let mut out = Vec::with_capacity(81);
            for _ in 0..=80 {
                out.push(Real::Exact(r.clone()));
                r = &r * &ratio;
            }
            out
        }
        Exactness::Sampled => (0..=40).map(|j| Real::Float(0.5 * 0.7f64.powi(j))).collect(),
    }
}

/// Sphere band used for a space: zero for exact spaces.
pub fn band_for(oracle: &SpaceOracle) -> f64 {
    match oracle.exactness() {
        Exactness::Exact => 0.0,
        Exactness::Sampled => oracle.spec().band().unwrap_or(DEFAULT_BAND),
    }
}

/// A scalar in the space's arithmetic: exact for exact spaces.
pub fn real_for(oracle: &SpaceOracle, x: f64) -> Real {
    match (oracle.exactness(), Exact::from_f64(x)) {
        (Exactness::Exact, Some(e)) => Real::Exact(e),
        _ => Real::Float(x),
    }
}

fn one() -> Real {
    Real::Exact(Exact::one())
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusSpec {
    pub r: Real,
    pub k: Real,
}

impl AnnulusSpec {
    pub fn new(r: Real, k: Real) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Contract(format!("annulus radius must be positive, got {r}")));
        }
        if !(k.to_f64() >= 1.0) {
            return Err(Error::Contract(format!("annulus ratio k must be >= 1, got {k}")));
        }
        Ok(AnnulusSpec { r, k })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpherePair {
    pub g: Real,
    pub t: Real,
    pub epsilon: f64,
}

impl SpherePair {
    /// Checks `|g/t - 1| >= ε`.
    pub fn new(g: Real, t: Real, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Contract(format!("epsilon must lie in ]0,1[, got {epsilon}")));
        }
        if !g.is_positive() || !t.is_positive() {
            return Err(Error::Contract("sphere radii must be positive".into()));
        }
        if (g.ratio_f64(&t) - 1.0).abs() < epsilon {
            return Err(Error::Contract(format!("pair ({g}, {t}) is not in R²_ε for ε = {epsilon}")));
        }
        Ok(SpherePair { g, t, epsilon })
    }
}

fn max_pairwise(oracle: &SpaceOracle, pts: &[Point], scale: &Real) -> f64 {
    let space = oracle.space();
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max(space.scaled_distance(p, q, scale));
        }
    }
    best
}

/// `diam(A_a(r, k)) / scale`, with `diam(∅) = 0`.
fn annulus_ratio(oracle: &SpaceOracle, r: &Real, k: &Real, scale: &Real, budget: usize) -> f64 {
    let pts = oracle.space().annulus_witnesses(r, k, budget);
    max_pairwise(oracle, &pts, scale)
}

/// `diam(A_a(r, k))`; the empty annulus has diameter 0.
pub fn annulus_diameter(oracle: &SpaceOracle, spec: &AnnulusSpec, budget: usize) -> f64 {
    annulus_ratio(oracle, &spec.r, &spec.k, &one(), budget)
}

/// `(Δ, δ) / scale` of the spheres of radii `g` and `t`.
pub fn sphere_gap_scaled(
    oracle: &SpaceOracle,
    g: &Real,
    t: &Real,
    scale: &Real,
    budget: usize,
) -> Result<(f64, f64)> {
    let band = band_for(oracle);
    let sg = oracle.sphere_sample(g, band, budget)?;
    if sg.points.is_empty() {
        return Err(Error::EmptySphere { radius: g.to_string() });
    }
    let st = oracle.sphere_sample(t, band, budget)?;
    if st.points.is_empty() {
        return Err(Error::EmptySphere { radius: t.to_string() });
    }
    let space = oracle.space();
    let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
    for p in &sg.points {
        for q in &st.points {
            let d = space.scaled_distance(p, q, scale);
            hi = hi.max(d);
            lo = lo.min(d);
        }
    }
    Ok((hi, lo))
}

/// `(Δ(S(g), S(t)), δ(S(g), S(t)))`.
pub fn sphere_gap(oracle: &SpaceOracle, pair: &SpherePair, budget: usize) -> Result<(f64, f64)> {
    sphere_gap_scaled(oracle, &pair.g, &pair.t, &one(), budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnulusRow {
    pub k: f64,
    pub g_of_k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub family: String,
    pub g: Real,
    pub t: Real,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaRow {
    pub n: usize,
    pub q_n: Real,
    pub t_n: Real,
    pub kappa_n: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaSeries {
    pub label: String,
    /// `lim q_n / t_n`: `"0"`, `"1/2"`, `"2"` or `"inf"`.
    pub c0: String,
    pub rows: Vec<KappaRow>,
    pub estimate: LimitEstimate,
    pub kappa0: Option<f64>,
    pub probed: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", content = "rows", rename_all = "kebab-case")]
pub enum Profile {
    Annulus(Vec<AnnulusRow>),
    Ratios(Vec<RatioRow>),
    Kappa(Vec<KappaSeries>),
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub scales: usize,
    pub smallest_scale: f64,
    pub tolerances: Tolerances,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub space_id: String,
    /// (i): the value extrapolated to `k = 1`; (ii): the largest tail ratio;
    /// (iii): the `κ₀` of the first probed finite-ratio sequence.
    pub estimate: Option<f64>,
    pub profile: Profile,
    pub evidence: Evidence,
}

fn check_grid(r_grid: &[Real]) -> Result<()> {
    if r_grid.len() < MIN_SCALES {
        return Err(Error::InsufficientGrid {
            len: r_grid.len(),
            min: MIN_SCALES,
        });
    }
    for w in r_grid.windows(2) {
        if !w[0].is_positive() || !(w[1].ratio_f64(&w[0]) < 1.0) {
            return Err(Error::Contract(format!(
                "radius grid must be positive and decreasing near {} and {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn evidence(r_grid: &[Real], tol: &Tolerances, notes: Vec<String>) -> Evidence {
    Evidence {
        scales: r_grid.len(),
        smallest_scale: r_grid.last().map(Real::to_f64).unwrap_or(f64::NAN),
        tolerances: *tol,
        notes,
    }
}

/// Condition (i): `lim_{k→1} limsup_{r→0} diam(A_a(r,k)) / r = 0`.
pub fn condition_i(
    oracle: &SpaceOracle,
    k_grid: &[f64],
    r_grid: &[Real],
    tol: &Tolerances,
    budget: usize,
) -> Result<ConditionReport> {
    check_grid(r_grid)?;
    if k_grid.len() < 3 {
        return Err(Error::InsufficientGrid {
            len: k_grid.len(),
            min: 3,
        });
    }
    if let Some(k) = k_grid.iter().find(|k| !(k.is_finite() && **k >= 1.0)) {
        return Err(Error::Contract(format!("k must be >= 1, got {k}")));
    }
    let w = tol.window.min(r_grid.len());
    let tail = &r_grid[r_grid.len() - w..];
    let per_k: Vec<Vec<f64>> = k_grid
        .par_iter()
        .map(|&k| {
            let kr = real_for(oracle, k);
            tail.iter().map(|r| annulus_ratio(oracle, r, &kr, r, budget)).collect()
        })
        .collect();
    let g: Vec<f64> = per_k.iter().map(|v| v.iter().copied().fold(0.0, f64::max)).collect();
    let profile: Vec<AnnulusRow> = k_grid
        .iter()
        .zip(&g)
        .map(|(&k, &g_of_k)| AnnulusRow { k, g_of_k })
        .collect();

    let mut order: Vec<usize> = (0..k_grid.len()).collect();
    order.sort_by(|&a, &b| k_grid[a].total_cmp(&k_grid[b]));
    let low = &order[..3];
    let xs: Vec<f64> = low.iter().map(|&i| k_grid[i] - 1.0).collect();
    let ys: Vec<f64> = low.iter().map(|&i| g[i]).collect();
    let (intercept, _) = linear_fit(&xs, &ys);
    // g is nondecreasing and nonnegative, so the limit lies in [0, g(k_min)]
    let extrapolated = intercept.clamp(0.0, ys[0]);

    let mut notes = Vec::new();
    let band = band_for(oracle);
    let slack = 4.0 * band + tol.abs;
    for (i, &k) in k_grid.iter().enumerate() {
        if g[i] > 2.0 * k * (1.0 + slack) {
            notes.push(format!("profile exceeds 2k at k = {k}: {}", g[i]));
        }
    }
    for pair in order.windows(2) {
        if g[pair[0]] > g[pair[1]] + slack * (1.0 + g[pair[1]]) {
            notes.push(format!(
                "profile decreases between k = {} and k = {}",
                k_grid[pair[0]], k_grid[pair[1]]
            ));
        }
    }
    let plateau_spread = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().copied().fold(f64::INFINITY, f64::min);
    let window_values = &per_k[low[0]];
    let window_spread = window_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - window_values.iter().copied().fold(f64::INFINITY, f64::min);
    let plateau = plateau_spread <= 0.1 * extrapolated && window_spread <= 0.1 * extrapolated;
    let verdict = if extrapolated <= 3.0 * tol.abs {
        Verdict::Pass
    } else if extrapolated >= FAIL_FLOOR_I && plateau {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    notes.push(format!(
        "limsup over the last {w} scales; linear extrapolation over k = {:?}",
        low.iter().map(|&i| k_grid[i]).collect::<Vec<_>>()
    ));
    Ok(ConditionReport {
        condition: Condition::I,
        verdict,
        space_id: oracle.id(),
        estimate: Some(extrapolated),
        profile: Profile::Annulus(profile),
        evidence: evidence(r_grid, tol, notes),
    })
}

/// Pairs `(g, t)` of radii sharing a label.
#[derive(Clone, Debug, Serialize)]
pub struct PairFamily {
    pub label: String,
    pub pairs: Vec<(Real, Real)>,
}

fn snap(oracle: &SpaceOracle, r: &Real) -> Option<Real> {
    oracle.space().radius_at_or_above(r).filter(Real::is_positive)
}

fn times(oracle: &SpaceOracle, r: &Real, factor: f64) -> Real {
    r.scaled(&real_for(oracle, factor))
}

/// The default pair families `(snap((1+ε)t), t)` and `(snap(2t), t)` over
/// the snapped grid, restricted to `R²_ε`.
pub fn default_pair_families(oracle: &SpaceOracle, r_grid: &[Real], epsilon: f64) -> Vec<PairFamily> {
    [1.0 + epsilon, 2.0]
        .iter()
        .map(|&factor| {
            let mut pairs: Vec<(Real, Real)> = Vec::new();
            for r in r_grid {
                let Some(t) = snap(oracle, r) else { continue };
                let Some(g) = snap(oracle, &times(oracle, &t, factor)) else {
                    continue;
                };
                if (g.ratio_f64(&t) - 1.0).abs() < epsilon {
                    continue;
                }
                if pairs.last() != Some(&(g.clone(), t.clone())) {
                    pairs.push((g, t));
                }
            }
            PairFamily {
                label: format!("g={factor}t"),
                pairs,
            }
        })
        .collect()
}

/// Condition (ii): `Δ/δ → 1` over `R²_ε` as the radii shrink.
pub fn condition_ii(
    oracle: &SpaceOracle,
    epsilon: f64,
    families: &[PairFamily],
    tol: &Tolerances,
    budget: usize,
) -> Result<ConditionReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Contract(format!("epsilon must lie in ]0,1[, got {epsilon}")));
    }
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut verdicts = Vec::new();
    let mut tail_max: Option<f64> = None;
    let mut evaluated = 0usize;
    let band = band_for(oracle);
    for fam in families {
        for (g, t) in &fam.pairs {
            SpherePair::new(g.clone(), t.clone(), epsilon)?;
        }
        let gaps: Vec<Result<(f64, f64)>> = fam
            .pairs
            .par_iter()
            .map(|(g, t)| sphere_gap_scaled(oracle, g, t, t, budget))
            .collect();
        let mut ratios = Vec::new();
        for ((g, t), gap) in fam.pairs.iter().zip(gaps) {
            match gap {
                Ok((hi, lo)) => {
                    let ratio = hi / lo;
                    if ratio < 1.0 - 4.0 * band - 1e-12 {
                        notes.push(format!("ratio {ratio} below 1 at ({g}, {t})"));
                    }
                    ratios.push(ratio);
                    rows.push(RatioRow {
                        family: fam.label.clone(),
                        g: g.clone(),
                        t: t.clone(),
                        ratio,
                    });
                }
                Err(Error::EmptySphere { radius }) => {
                    notes.push(format!("{}: sphere of radius {radius} empty, pair skipped", fam.label));
                }
                Err(e) => return Err(e),
            }
        }
        evaluated += ratios.len();
        if ratios.len() < 2 * tol.window {
            notes.push(format!("{}: {} pairs, not probed", fam.label, ratios.len()));
            continue;
        }
        let est = estimate_limit(&ratios, tol);
        let tail = &ratios[ratios.len() - tol.window..];
        let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let top = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        tail_max = Some(tail_max.map_or(top, |m: f64| m.max(top)));
        verdicts.push(if est.is_converged() && (est.value - 1.0).abs() <= 3.0 * tol.abs {
            Verdict::Pass
        } else if tail_min >= 1.0 + FAIL_MARGIN_II {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        });
    }
    if evaluated == 0 {
        return Err(Error::CannotEvaluate("every sphere in the pair grid is empty".into()));
    }
    Ok(ConditionReport {
        condition: Condition::II,
        verdict: combine(&verdicts),
        space_id: oracle.id(),
        estimate: tail_max,
        profile: Profile::Ratios(rows),
        evidence: evidence(
            &families.first().map(|f| f.pairs.iter().map(|p| p.1.clone()).collect::<Vec<_>>()).unwrap_or_default(),
            tol,
            notes,
        ),
    })
}

fn combine(verdicts: &[Verdict]) -> Verdict {
    if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if !verdicts.is_empty() && verdicts.iter().all(|v| *v == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

/// A sequence of radius pairs `(q_n, t_n)` with `q_n / t_n → c₀`.
#[derive(Clone, Debug, Serialize)]
pub struct PairSequence {
    pub label: String,
    pub c0: String,
    pub pairs: Vec<(Real, Real)>,
}

impl PairSequence {
    fn is_degenerate_ratio(&self) -> bool {
        self.c0 == "0" || self.c0 == "inf"
    }
}

/// Default sequences for `c₀ ∈ {0, 1/2, 2, ∞}` built from the snapped grid.
/// Finite nonzero `c₀` keeps only pairs whose ratio is within
/// [`C0_WINDOW`] of `c₀`.
pub fn default_pair_sequences(oracle: &SpaceOracle, r_grid: &[Real], epsilon: f64) -> Vec<PairSequence> {
    let specs: [(&str, Option<f64>); 4] = [("0", None), ("1/2", Some(0.5)), ("2", Some(2.0)), ("inf", None)];
    specs
        .iter()
        .map(|&(label, c0)| {
            let mut pairs: Vec<(Real, Real)> = Vec::new();
            for r in r_grid {
                let Some(t) = snap(oracle, r) else { continue };
                let q = match c0 {
                    Some(c) => snap(oracle, &times(oracle, &t, c)),
                    None => snap(oracle, &t.scaled(&t)),
                };
                let Some(q) = q else { continue };
                let ratio = q.ratio_f64(&t);
                if let Some(c) = c0 {
                    if (ratio / c - 1.0).abs() > C0_WINDOW {
                        continue;
                    }
                }
                if (ratio - 1.0).abs() < epsilon {
                    continue;
                }
                let pair = if label == "inf" { (t, q) } else { (q, t) };
                if pairs.last() != Some(&pair) {
                    pairs.push(pair);
                }
            }
            PairSequence {
                label: format!("c0={label}"),
                c0: label.to_string(),
                pairs,
            }
        })
        .collect()
}

/// Condition (iii): `κ_n = Δ(S(q_n), S(t_n)) / |q_n - t_n|` converges.
pub fn condition_iii(
    oracle: &SpaceOracle,
    epsilon: f64,
    sequences: &[PairSequence],
    tol: &Tolerances,
    budget: usize,
) -> Result<ConditionReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Contract(format!("epsilon must lie in ]0,1[, got {epsilon}")));
    }
    let mut series = Vec::new();
    let mut verdicts = Vec::new();
    let mut notes = vec![format!(
        "probed c0 values: {}; finitely many sequences sampled, not exhaustive",
        sequences.iter().map(|s| s.c0.as_str()).collect::<Vec<_>>().join(", ")
    )];
    let mut evaluated = 0usize;
    for seq in sequences {
        for (q, t) in &seq.pairs {
            SpherePair::new(q.clone(), t.clone(), epsilon)?;
        }
        let gaps: Vec<Result<(f64, f64)>> = seq
            .pairs
            .par_iter()
            .map(|(q, t)| sphere_gap_scaled(oracle, q, t, t, budget))
            .collect();
        let mut rows = Vec::new();
        for ((q, t), gap) in seq.pairs.iter().zip(gaps) {
            match gap {
                Ok((hi, _)) => {
                    let diff = (q.ratio_f64(t) - 1.0).abs();
                    rows.push(KappaRow {
                        n: rows.len() + 1,
                        q_n: q.clone(),
                        t_n: t.clone(),
                        kappa_n: hi / diff,
                    });
                }
                Err(Error::EmptySphere { radius }) => {
                    notes.push(format!("{}: sphere of radius {radius} empty, pair skipped", seq.label));
                }
                Err(e) => return Err(e),
            }
        }
        evaluated += rows.len();
        let kappas: Vec<f64> = rows.iter().map(|r| r.kappa_n).collect();
        let estimate = estimate_limit(&kappas, tol);
        let probed = kappas.len() >= 2 * tol.window;
        let kappa0 = estimate.is_converged().then_some(estimate.value);
        if probed {
            let verdict = match estimate.status {
                LimitStatus::Converged => {
                    if seq.is_degenerate_ratio() && (estimate.value - 1.0).abs() > 3.0 * tol.abs {
                        notes.push(format!("{}: κ₀ = {} but 1 is forced", seq.label, estimate.value));
                        if (estimate.value - 1.0).abs() > FAIL_MARGIN_II {
                            Verdict::Fail
                        } else {
                            Verdict::Inconclusive
                        }
                    } else {
                        Verdict::Pass
                    }
                }
                LimitStatus::Oscillating | LimitStatus::Diverged => Verdict::Fail,
                LimitStatus::InsufficientData => Verdict::Inconclusive,
            };
            verdicts.push(verdict);
        } else {
            notes.push(format!("{}: {} pairs, not probed", seq.label, kappas.len()));
        }
        series.push(KappaSeries {
            label: seq.label.clone(),
            c0: seq.c0.clone(),
            rows,
            estimate,
            kappa0,
            probed,
        });
    }
    if evaluated == 0 {
        return Err(Error::CannotEvaluate("every sphere in the pair sequences is empty".into()));
    }
    let estimate = series
        .iter()
        .find(|s| s.probed && !matches!(s.c0.as_str(), "0" | "inf") && s.kappa0.is_some())
        .or_else(|| series.iter().find(|s| s.kappa0.is_some()))
        .and_then(|s| s.kappa0);
    let scales: Vec<Real> = sequences.iter().flat_map(|s| s.pairs.iter().map(|p| p.1.clone())).collect();
    Ok(ConditionReport {
        condition: Condition::III,
        verdict: combine(&verdicts),
        space_id: oracle.id(),
        estimate,
        profile: Profile::Kappa(series),
        evidence: evidence(&scales, tol, notes),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniqueness {
    Unique,
    NonUnique,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessVerdict {
    pub verdict: Uniqueness,
    pub failing: Vec<Condition>,
    pub witness_requested: bool,
    pub space_id: String,
}

/// Unique iff all three conditions pass; non-unique iff one fails.
pub fn uniqueness_verdict(reports: &[ConditionReport]) -> Result<UniquenessVerdict> {
    let Some(first) = reports.first() else {
        return Err(Error::Contract("no condition reports given".into()));
    };
    for r in reports {
        if r.space_id != first.space_id {
            return Err(Error::ReportMismatch(first.space_id.clone(), r.space_id.clone()));
        }
    }
    for c in [Condition::I, Condition::II, Condition::III] {
        let n = reports.iter().filter(|r| r.condition == c).count();
        if n != 1 {
            return Err(Error::Contract(format!("expected one report for condition {c:?}, got {n}")));
        }
    }
    let failing: Vec<Condition> = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| r.condition)
        .collect();
    let verdict = if !failing.is_empty() {
        Uniqueness::NonUnique
    } else if reports.iter().all(|r| r.verdict == Verdict::Pass) {
        Uniqueness::Unique
    } else {
        Uniqueness::Inconclusive
    };
    Ok(UniquenessVerdict {
        verdict,
        witness_requested: !failing.is_empty(),
        failing,
        space_id: first.space_id.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonRow {
    pub t: f64,
    pub eps_over_t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentEquivalence {
    pub profile: Vec<EpsilonRow>,
    /// Scales at which a sphere was empty.
    pub skipped: Vec<f64>,
    pub estimate: LimitEstimate,
    /// `Some(true)` when `ε_a(t)/t → 0` is established, `Some(false)` when
    /// it converges to a positive value.
    pub equivalent: Option<bool>,
}

/// `sup_{z ∈ S_t^Z} inf_{y ∈ Y} |z - y|`, over the sphere sample.
pub fn one_sided_deviation(
    from: &SpaceOracle,
    to: &SpaceOracle,
    t: f64,
    budget: usize,
) -> Result<Option<f64>> {
    let sphere = from.sphere_sample(&real_for(from, t), band_for(from), budget)?;
    if sphere.points.is_empty() {
        return Ok(None);
    }
    let mut worst = 0.0f64;
    for p in &sphere.points {
        let x = from
            .space()
            .embed(p)
            .ok_or_else(|| Error::UnsupportedSpace(format!("{:?} has no ambient embedding", from.kind())))?;
        let d = to
            .space()
            .distance_to_set(&x)
            .ok_or_else(|| Error::UnsupportedSpace(format!("{:?} has no distance-to-set", to.kind())))?;
        worst = worst.max(d);
    }
    Ok(Some(worst))
}

/// The profile `t ↦ ε_a(t)/t` with `ε_a(t) = ε_a(t,Z,Y) ∨ ε_a(t,Y,Z)` and
/// its limit as `t → 0`.
pub fn tangent_equivalence_epsilon(
    y: &SpaceOracle,
    z: &SpaceOracle,
    t_grid: &[f64],
    budget: usize,
) -> Result<TangentEquivalence> {
    let ay = y
        .space()
        .embed(&y.marked_point())
        .ok_or_else(|| Error::UnsupportedSpace(format!("{:?} has no ambient embedding", y.kind())))?;
    let az = z
        .space()
        .embed(&z.marked_point())
        .ok_or_else(|| Error::UnsupportedSpace(format!("{:?} has no ambient embedding", z.kind())))?;
    let gap: f64 = ay.iter().zip(&az).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if ay.len() != az.len() || gap > 1e-12 {
        return Err(Error::Contract("the two spaces do not share the marked point".into()));
    }
    let rows: Vec<Result<Option<f64>>> = t_grid
        .par_iter()
        .map(|&t| {
            let a = one_sided_deviation(z, y, t, budget)?;
            let b = one_sided_deviation(y, z, t, budget)?;
            Ok(match (a, b) {
                (Some(a), Some(b)) => Some(a.max(b) / t),
                _ => None,
            })
        })
        .collect();
    let mut profile = Vec::new();
    let mut skipped = Vec::new();
    for (&t, row) in t_grid.iter().zip(rows) {
        match row? {
            Some(eps_over_t) => profile.push(EpsilonRow { t, eps_over_t }),
            None => skipped.push(t),
        }
    }
    let tol = if y.is_exact() && z.is_exact() {
        Tolerances::exact()
    } else {
        Tolerances::sampled()
    };
    let values: Vec<f64> = profile.iter().map(|r| r.eps_over_t).collect();
    let estimate = estimate_limit(&values, &tol);
    let equivalent = estimate
        .is_converged()
        .then(|| estimate.value.abs() <= 3.0 * tol.abs);
    Ok(TangentEquivalence {
        profile,
        skipped,
        estimate,
        equivalent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_space, SpaceSpec};
    use std::f64::consts::PI;

    fn q(n: i64, d: i64) -> Real {
        Real::Exact(Exact::ratio(n, d))
    }

    #[test]
    fn half_line_annulus() {
        let x = build_space(&SpaceSpec::HalfLine {}).unwrap();
        let spec = AnnulusSpec::new(q(9, 100), q(3, 1)).unwrap();
        assert!((annulus_diameter(&x, &spec, 8) - 0.24).abs() < 1e-15);
    }

    #[test]
    fn empty_lacunary_annulus_has_zero_diameter() {
        let x = build_space(&SpaceSpec::Lacunary {}).unwrap();
        let r = crate::spaces::lacunary::r(3).scale3(3);
        let spec = AnnulusSpec::new(Real::Exact(r), q(11, 10)).unwrap();
        assert_eq!(annulus_diameter(&x, &spec, 8), 0.0);
    }

    #[test]
    fn right_angle_rays_functionals() {
        let x = build_space(&SpaceSpec::PlanarRays { theta: PI / 2.0 }).unwrap();
        let spec = AnnulusSpec::new(q(1, 10), q(1, 1)).unwrap();
        assert!((annulus_diameter(&x, &spec, 8) - 0.1 * 2f64.sqrt()).abs() < 1e-15);
        let pair = SpherePair::new(q(1, 5), q(1, 10), 0.5).unwrap();
        let (hi, lo) = sphere_gap(&x, &pair, 8).unwrap();
        assert!((hi - 0.05f64.sqrt()).abs() < 1e-15);
        assert!((lo - 0.1).abs() < 1e-15);
    }

    #[test]
    fn cantor_sphere_gap() {
        let x = build_space(&SpaceSpec::Cantor { marked: 0 }).unwrap();
        let pair = SpherePair::new(q(1, 3), q(1, 9), 0.5).unwrap();
        let (hi, lo) = sphere_gap(&x, &pair, 8).unwrap();
        assert!((hi - 2.0 / 9.0).abs() < 1e-15 && (lo - 2.0 / 9.0).abs() < 1e-15);
        let empty = SpherePair::new(q(1, 2), q(1, 9), 0.5).unwrap();
        assert!(matches!(sphere_gap(&x, &empty, 8), Err(Error::EmptySphere { .. })));
    }

    #[test]
    fn pairs_outside_the_region_are_rejected() {
        assert!(SpherePair::new(q(11, 10), q(1, 1), 0.25).is_err());
    }

    #[test]
    fn verdict_lattice() {
        let x = build_space(&SpaceSpec::HalfLine {}).unwrap();
        let report = |condition, verdict| ConditionReport {
            condition,
            verdict,
            space_id: x.id(),
            estimate: None,
            profile: Profile::Annulus(Vec::new()),
            evidence: evidence(&[], &Tolerances::exact(), Vec::new()),
        };
        let all = |v: [Verdict; 3]| {
            uniqueness_verdict(&[
                report(Condition::I, v[0]),
                report(Condition::II, v[1]),
                report(Condition::III, v[2]),
            ])
            .unwrap()
        };
        assert_eq!(all([Verdict::Pass; 3]).verdict, Uniqueness::Unique);
        let v = all([Verdict::Fail, Verdict::Fail, Verdict::Pass]);
        assert_eq!(v.verdict, Uniqueness::NonUnique);
        assert!(v.witness_requested);
        assert_eq!(
            all([Verdict::Pass, Verdict::Inconclusive, Verdict::Pass]).verdict,
            Uniqueness::Inconclusive
        );
        let mut other = report(Condition::III, Verdict::Pass);
        other.space_id = "other".into();
        let err = uniqueness_verdict(&[report(Condition::I, Verdict::Pass), report(Condition::II, Verdict::Pass), other]);
        assert!(matches!(err, Err(Error::ReportMismatch(..))));
    }

    fn run_all(spec: SpaceSpec) -> (Vec<ConditionReport>, UniquenessVerdict) {
        let x = build_space(&spec).unwrap();
        let tol = Tolerances::for_space(&x);
        let grid = default_r_grid(x.exactness());
        let reports = vec![
            condition_i(&x, &default_k_grid(), &grid, &tol, 256).unwrap(),
            condition_ii(&x, DEFAULT_EPSILON, &default_pair_families(&x, &grid, DEFAULT_EPSILON), &tol, 256).unwrap(),
            condition_iii(&x, DEFAULT_EPSILON, &default_pair_sequences(&x, &grid, DEFAULT_EPSILON), &tol, 256).unwrap(),
        ];
        let v = uniqueness_verdict(&reports).unwrap();
        (reports, v)
    }

    #[test]
    fn half_line_is_unique() {
        let (reports, v) = run_all(SpaceSpec::HalfLine {});
        for r in &reports {
            assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.evidence.notes);
        }
        assert_eq!(v.verdict, Uniqueness::Unique);
    }

    #[test]
    fn right_angle_rays_fail_first_two() {
        let (reports, v) = run_all(SpaceSpec::PlanarRays { theta: PI / 2.0 });
        let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict).collect();
        assert_eq!(verdicts, vec![Verdict::Fail, Verdict::Fail, Verdict::Pass]);
        assert!((reports[0].estimate.unwrap() - 2f64.sqrt()).abs() < 1e-5);
        assert!((reports[2].estimate.unwrap() - 5f64.sqrt()).abs() < 1e-6);
        assert_eq!(v.verdict, Uniqueness::NonUnique);
    }
}
