//! Mutual stability `d̃`, non-uniqueness witnesses, finite pretangent
//! approximations, tangency and the pairwise stability audit.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Exact, Real};
use crate::functionals::{real_for, Condition, ConditionReport, Uniqueness, UniquenessVerdict, Verdict};
use crate::limit::{estimate_limit, LimitEstimate, LimitStatus, Tolerances};
use crate::metric::{Exactness, Point, SpaceKind, SpaceOracle};
use crate::sequence::{IndexSelector, NormalizingSequence, PointSequence};
use crate::spaces::{lacunary, SpaceSpec};
use crate::ternary;

/// Minimum sequence depth accepted by [`dtilde`].
pub const MIN_DEPTH: usize = 32;

pub const DEFAULT_DEPTH: usize = 48;

/// Ternary digits used by the Cantor digit-pattern candidates.
pub const CANDIDATE_DIGITS: u32 = 4;

fn check_depth(depth: usize) -> Result<()> {
    if depth < MIN_DEPTH {
        return Err(Error::InsufficientDepth {
            depth,
            min: MIN_DEPTH,
        });
    }
    Ok(())
}

/// The constant sequence `ã`.
pub fn marked_sequence(oracle: &SpaceOracle) -> PointSequence {
    PointSequence::constant("a", oracle.marked_point())
}

/// `r̃` used when none is configured: `{r_n}` for the lacunary space,
/// `3^-n` for other exact spaces and `2^-n` for sampled ones.
pub fn default_scale(oracle: &SpaceOracle) -> NormalizingSequence {
    match (oracle.kind(), oracle.exactness()) {
        (SpaceKind::Lacunary, _) => lacunary::scale_sequence(),
        (_, Exactness::Exact) => NormalizingSequence::powers_of_three(),
        (_, Exactness::Sampled) => NormalizingSequence::powers_of_two(),
    }
}

/// Points `x_1..x_N` and scales `r_1..r_N`, checked against the space.
struct Materialized {
    label: String,
    points: Vec<Point>,
}

fn materialize(oracle: &SpaceOracle, seq: &PointSequence, depth: usize) -> Result<Materialized> {
    let points: Vec<Point> = (1..=depth).map(|n| seq.at(n)).collect();
    for p in &points {
        oracle.radial(p)?;
    }
    Ok(Materialized {
        label: seq.label().to_string(),
        points,
    })
}

fn scales(r: &NormalizingSequence, depth: usize) -> Result<Vec<Real>> {
    let rs: Vec<Real> = (1..=depth).map(|n| r.at(n)).collect();
    if let Some(bad) = rs.iter().find(|r| !r.is_positive()) {
        return Err(Error::Contract(format!("normalizing sequence has a nonpositive term {bad}")));
    }
    Ok(rs)
}

fn ratio_series(oracle: &SpaceOracle, x: &[Point], y: &[Point], rs: &[Real]) -> Vec<f64> {
    let space = oracle.space();
    x.iter()
        .zip(y)
        .zip(rs)
        .map(|((p, q), r)| space.scaled_distance(p, q, r))
        .collect()
}

/// `d̃_r̃(x̃, ỹ) = lim d(x_n, y_n) / r_n`, estimated over `n = 1..=depth`.
pub fn dtilde(
    oracle: &SpaceOracle,
    x: &PointSequence,
    y: &PointSequence,
    r: &NormalizingSequence,
    depth: usize,
    tol: &Tolerances,
) -> Result<LimitEstimate> {
    check_depth(depth)?;
    let rs = scales(r, depth)?;
    let xs = materialize(oracle, x, depth)?;
    let ys = materialize(oracle, y, depth)?;
    Ok(estimate_limit(&ratio_series(oracle, &xs.points, &ys.points, &rs), tol))
}

/// `z_n = x_n` for even `n` and `y_n` for odd `n`.
pub fn interleave_witness(x: &PointSequence, y: &PointSequence) -> PointSequence {
    let (x, y) = (x.clone(), y.clone());
    let label = format!("interleave({}, {})", x.label(), y.label());
    PointSequence::new(label, move |n| if n % 2 == 0 { x.at(n) } else { y.at(n) })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRow {
    pub n: usize,
    pub x_n: Point,
    pub z_n: Point,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessPair {
    #[serde(skip)]
    pub x: PointSequence,
    #[serde(skip)]
    pub z: PointSequence,
    pub x_label: String,
    pub z_label: String,
    pub scale: String,
    pub depth: usize,
    pub x_radial: LimitEstimate,
    pub z_radial: LimitEstimate,
    pub mutual: LimitEstimate,
    /// `|even sublimit - odd sublimit|` of `d(x_n, z_n) / r_n`.
    pub gap: f64,
    pub rows: Vec<WitnessRow>,
}

fn farthest_annulus_pair(oracle: &SpaceOracle, r: &Real, n: usize) -> Option<(Point, Point)> {
    let k = real_for(oracle, 1.0 + 0.5f64.powi(n as i32));
    let pts = oracle.space().annulus_witnesses(r, &k, crate::metric::DEFAULT_SPHERE_BUDGET);
    let space = oracle.space();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = space.scaled_distance(&pts[i], &pts[j], r);
            if best.is_none_or(|(b, _, _)| d > b) {
                best = Some((d, i, j));
            }
        }
    }
    let (d, i, j) = best?;
    (d > 0.0).then(|| (pts[i].clone(), pts[j].clone()))
}

/// Builds `x̃` and the interleaved `z̃` from farthest pairs of
/// `A_a(r_n, 1 + 2^-n)` and checks that they are each stable with `ã` but
/// not with each other.
pub fn nonuniqueness_witness(
    oracle: &SpaceOracle,
    report: &ConditionReport,
    r: &NormalizingSequence,
    depth: usize,
    tol: &Tolerances,
) -> Result<WitnessPair> {
    if report.condition != Condition::I || report.verdict != Verdict::Fail {
        return Err(Error::WitnessNotFound(format!(
            "needs a failing condition (i) report, got {:?} {:?}",
            report.condition, report.verdict
        )));
    }
    if report.space_id != oracle.id() {
        return Err(Error::ReportMismatch(report.space_id.clone(), oracle.id()));
    }
    check_depth(depth)?;
    let rs = scales(r, depth)?;
    let mut xs = Vec::with_capacity(depth);
    let mut ys = Vec::with_capacity(depth);
    for (i, rn) in rs.iter().enumerate() {
        let (p, q) = farthest_annulus_pair(oracle, rn, i + 1).ok_or_else(|| {
            Error::WitnessNotFound(format!("annulus at r_{} = {rn} has zero diameter", i + 1))
        })?;
        xs.push(p);
        ys.push(q);
    }
    let (o1, r1) = (oracle.clone(), r.clone());
    let x = PointSequence::new("annulus-far-x", move |n| {
        farthest_annulus_pair(&o1, &r1.at(n), n).map_or_else(|| o1.marked_point(), |p| p.0)
    });
    let (o2, r2) = (oracle.clone(), r.clone());
    let y = PointSequence::new("annulus-far-y", move |n| {
        farthest_annulus_pair(&o2, &r2.at(n), n).map_or_else(|| o2.marked_point(), |p| p.1)
    });
    let z = interleave_witness(&x, &y);
    let zs: Vec<Point> = (0..depth)
        .map(|i| if (i + 1) % 2 == 0 { xs[i].clone() } else { ys[i].clone() })
        .collect();
    let a = vec![oracle.marked_point(); depth];
    let x_radial = estimate_limit(&ratio_series(oracle, &xs, &a, &rs), tol);
    let z_radial = estimate_limit(&ratio_series(oracle, &zs, &a, &rs), tol);
    let mutual = estimate_limit(&ratio_series(oracle, &xs, &zs, &rs), tol);
    if !x_radial.is_converged() || !z_radial.is_converged() {
        return Err(Error::WitnessNotFound("annulus sequences are not stable with a".into()));
    }
    if mutual.status != LimitStatus::Oscillating {
        return Err(Error::WitnessNotFound(format!(
            "the interleaved pair does not oscillate (status {:?})",
            mutual.status
        )));
    }
    let gap = mutual.sublimit_gap().unwrap_or(0.0);
    let rows = xs
        .iter()
        .zip(&zs)
        .enumerate()
        .map(|(i, (x, z))| WitnessRow {
            n: i + 1,
            x_n: x.clone(),
            z_n: z.clone(),
        })
        .collect();
    Ok(WitnessPair {
        x_label: x.label().to_string(),
        z_label: z.label().to_string(),
        x,
        z,
        scale: r.label().to_string(),
        depth,
        x_radial,
        z_radial,
        mutual,
        gap,
        rows,
    })
}

/// Exact `lim f(x_n) / r_n` when the last `window` exact ratios coincide.
fn exact_tail(values: &[Option<Exact>], window: usize) -> Option<Exact> {
    let tail = &values[values.len().saturating_sub(window)..];
    let first = tail.first()?.clone()?;
    tail.iter().all(|v| v.as_ref() == Some(&first)).then_some(first)
}

fn exact_ratio(num: &Real, den: &Real) -> Option<Exact> {
    Some(&num.to_exact()? / &den.to_exact()?)
}

#[derive(Clone, Debug, Serialize)]
pub struct Dropped {
    pub label: String,
    pub estimate: LimitEstimate,
}

/// Splits `candidates` into those stable with `ã` and the rest.
pub fn filter_stable(
    oracle: &SpaceOracle,
    r: &NormalizingSequence,
    candidates: &[PointSequence],
    depth: usize,
    tol: &Tolerances,
) -> Result<(Vec<PointSequence>, Vec<Dropped>)> {
    check_depth(depth)?;
    let rs = scales(r, depth)?;
    let a = vec![oracle.marked_point(); depth];
    let estimates: Vec<Result<LimitEstimate>> = candidates
        .par_iter()
        .map(|c| {
            let m = materialize(oracle, c, depth)?;
            Ok(estimate_limit(&ratio_series(oracle, &m.points, &a, &rs), tol))
        })
        .collect();
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for (c, e) in candidates.iter().zip(estimates) {
        let e = e?;
        if e.is_converged() {
            keep.push(c.clone());
        } else {
            dropped.push(Dropped {
                label: c.label().to_string(),
                estimate: e,
            });
        }
    }
    Ok((keep, dropped))
}

#[derive(Clone, Debug, Serialize)]
pub struct PretangentClass {
    pub label: String,
    pub members: Vec<String>,
    /// `d̃(x̃, ã)`.
    pub radial: f64,
    pub radial_exact: Option<Exact>,
    /// Signed `lim (x_n - a) / r_n` for subsets of the line.
    pub value_exact: Option<Exact>,
    #[serde(skip)]
    pub representative: PointSequence,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinitePretangent {
    pub scale: String,
    pub depth: usize,
    pub tau: f64,
    pub classes: Vec<PretangentClass>,
    pub dist: Vec<Vec<f64>>,
}

impl FinitePretangent {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Largest `d(i,k) - d(i,j) - d(j,k)` over class triples.
    pub fn triangle_excess(&self) -> f64 {
        let n = self.len();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.dist[i][k] - self.dist[i][j] - self.dist[j][k]);
                }
            }
        }
        worst
    }

    /// Smallest off-diagonal distance.
    pub fn separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.min(self.dist[i][j]);
            }
        }
        best
    }
}

struct Prepared {
    m: Materialized,
    radial: LimitEstimate,
    radial_exact: Option<Exact>,
    value_exact: Option<Exact>,
    seq: PointSequence,
}

fn prepare(
    oracle: &SpaceOracle,
    seq: &PointSequence,
    rs: &[Real],
    tol: &Tolerances,
) -> Result<Prepared> {
    let depth = rs.len();
    let m = materialize(oracle, seq, depth)?;
    let a = vec![oracle.marked_point(); depth];
    let radial = estimate_limit(&ratio_series(oracle, &m.points, &a, rs), tol);
    let space = oracle.space();
    let (radial_exact, value_exact) = if oracle.is_exact() {
        let radial_ratios: Vec<Option<Exact>> = m
            .points
            .iter()
            .zip(rs)
            .map(|(p, r)| exact_ratio(&space.radial(p), r))
            .collect();
        let offsets: Vec<Option<Exact>> = m
            .points
            .iter()
            .zip(rs)
            .map(|(p, r)| Some(&space.line_offset(p)? / &r.to_exact()?))
            .collect();
        (exact_tail(&radial_ratios, tol.window), exact_tail(&offsets, tol.window))
    } else {
        (None, None)
    };
    Ok(Prepared {
        m,
        radial,
        radial_exact,
        value_exact,
        seq: seq.clone(),
    })
}

/// Metric identification of `{ã} ∪ candidates` along `r̃`: candidates are
/// clustered greedily by `d̃ <= τ` against the class representatives.
pub fn pretangent_approximation(
    oracle: &SpaceOracle,
    r: &NormalizingSequence,
    candidates: &[PointSequence],
    depth: usize,
    tol: &Tolerances,
) -> Result<FinitePretangent> {
    check_depth(depth)?;
    let rs = scales(r, depth)?;
    let mut all = vec![marked_sequence(oracle)];
    all.extend(candidates.iter().cloned());
    let prepared: Vec<Prepared> = all
        .par_iter()
        .map(|c| prepare(oracle, c, &rs, tol))
        .collect::<Result<_>>()?;
    if let Some(bad) = prepared.iter().find(|p| !p.radial.is_converged()) {
        return Err(Error::UnstableCandidate(bad.m.label.clone()));
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<String>> = Vec::new();
    let mut dist: Vec<Vec<f64>> = Vec::new();
    for (i, cand) in prepared.iter().enumerate() {
        let estimates: Vec<LimitEstimate> = reps
            .par_iter()
            .map(|&j| estimate_limit(&ratio_series(oracle, &cand.m.points, &prepared[j].m.points, &rs), tol))
            .collect();
        if let Some((k, _)) = estimates.iter().enumerate().find(|(_, e)| !e.is_converged()) {
            return Err(Error::NotSelfStable {
                x: prepared[reps[k]].m.label.clone(),
                y: cand.m.label.clone(),
            });
        }
        match estimates.iter().position(|e| e.value <= tol.tau) {
            Some(k) => members[k].push(cand.m.label.clone()),
            None => {
                for (row, e) in dist.iter_mut().zip(&estimates) {
                    row.push(e.value);
                }
                let mut row: Vec<f64> = estimates.iter().map(|e| e.value).collect();
                row.push(0.0);
                dist.push(row);
                reps.push(i);
                members.push(vec![cand.m.label.clone()]);
            }
        }
    }
    let classes = reps
        .iter()
        .zip(members)
        .map(|(&i, members)| {
            let p = &prepared[i];
            PretangentClass {
                label: p.m.label.clone(),
                members,
                radial: p.radial.value,
                radial_exact: p.radial_exact.clone(),
                value_exact: p.value_exact.clone(),
                representative: p.seq.clone(),
            }
        })
        .collect();
    Ok(FinitePretangent {
        scale: r.label().to_string(),
        depth,
        tau: tol.tau,
        classes,
        dist,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ValueMap {
    pub value: f64,
    pub exact: Option<Exact>,
    pub estimate: LimitEstimate,
}

/// `c = lim (x_n - a) / r_n` on subsets of the line; Cantor values are
/// checked against `C_m^e`.
pub fn value_map(
    oracle: &SpaceOracle,
    x: &PointSequence,
    r: &NormalizingSequence,
    depth: usize,
    tol: &Tolerances,
) -> Result<ValueMap> {
    check_depth(depth)?;
    let space = oracle.space();
    if space.line_offset(&oracle.marked_point()).is_none() {
        return Err(Error::UnsupportedSpace(format!("{:?} is not a subset of the line", oracle.kind())));
    }
    let rs = scales(r, depth)?;
    let m = materialize(oracle, x, depth)?;
    let offsets: Vec<Option<Exact>> = m
        .points
        .iter()
        .zip(&rs)
        .map(|(p, r)| Some(&space.line_offset(p)? / &r.to_exact()?))
        .collect();
    let floats: Vec<f64> = m
        .points
        .iter()
        .zip(&rs)
        .zip(&offsets)
        .map(|((p, r), exact)| match exact {
            Some(e) => e.to_f64(),
            None => space.line_offset(p).map_or(f64::NAN, |o| o.to_f64() / r.to_f64()),
        })
        .collect();
    let estimate = estimate_limit(&floats, tol);
    if !estimate.is_converged() {
        return Err(Error::NoValue(format!("{} has status {:?}", x.label(), estimate.status)));
    }
    let exact = exact_tail(&offsets, tol.window);
    if let (SpaceSpec::Cantor { marked }, Some(v)) = (oracle.spec(), &exact) {
        let verdict = ternary::is_member_of_ce(v, *marked, ternary::ROUNDING_DEPTH)?;
        if !verdict.is_in() {
            return Err(Error::NoValue(format!(
                "value {} of {} is not in the extended Cantor set",
                v.to_fraction_string(),
                x.label()
            )));
        }
    }
    Ok(ValueMap {
        value: exact.as_ref().map_or(estimate.value, Exact::to_f64),
        exact,
        estimate,
    })
}

/// `ã`, the mesh `c r_n` for `c ∈ {0, 1/8, ..., 8}` snapped into the
/// space, and the space's own candidates.
pub fn candidate_library(oracle: &SpaceOracle, r: &NormalizingSequence) -> Vec<PointSequence> {
    let mut out = vec![marked_sequence(oracle)];
    for j in 1..=64i64 {
        let c = Exact::ratio(j, 8);
        let (o, r) = (oracle.clone(), r.clone());
        let cr = match oracle.exactness() {
            Exactness::Exact => Real::Exact(c.clone()),
            Exactness::Sampled => Real::Float(c.to_f64()),
        };
        out.push(PointSequence::new(format!("mesh[{}]*r_n", c.to_fraction_string()), move |n| {
            o.space()
                .point_near_radius(&r.at(n).scaled(&cr))
                .unwrap_or_else(|| o.marked_point())
        }));
    }
    out.extend(oracle.space().special_candidates(r, CANDIDATE_DIGITS));
    out
}

/// Radial values of the library candidates stable with `ã`.
fn radial_values(
    oracle: &SpaceOracle,
    r: &NormalizingSequence,
    depth: usize,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let rs = scales(r, depth)?;
    let lib = candidate_library(oracle, r);
    let prepared: Vec<Prepared> = lib
        .par_iter()
        .map(|c| prepare(oracle, c, &rs, tol))
        .collect::<Result<_>>()?;
    let mut values: Vec<f64> = prepared
        .iter()
        .filter(|p| p.radial.is_converged())
        .map(|p| p.radial_exact.as_ref().map_or(p.radial.value, Exact::to_f64))
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| (*a - *b).abs() <= tol.tau);
    Ok(values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tangency {
    Tangent,
    NotTangent,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectorCheck {
    pub selector: String,
    pub values: Vec<f64>,
    /// Values farther than `τ` from `V(r̃)`, with that distance.
    pub unmatched: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TangencyReport {
    pub verdict: Tangency,
    pub scale: String,
    pub values: Vec<f64>,
    pub selectors: Vec<SelectorCheck>,
}

fn distance_to(values: &[f64], v: f64) -> f64 {
    values.iter().map(|w| (w - v).abs()).fold(f64::INFINITY, f64::min)
}

/// Surjectivity of the subsequence embeddings on radial values: every
/// value achievable along `r̃'` must be achievable along `r̃`.
pub fn tangency_check(
    oracle: &SpaceOracle,
    uniqueness: Option<&UniquenessVerdict>,
    r: &NormalizingSequence,
    selectors: &[IndexSelector],
    depth: usize,
    tol: &Tolerances,
) -> Result<TangencyReport> {
    if let Some(u) = uniqueness {
        if u.verdict == Uniqueness::NonUnique {
            return Err(Error::UnsupportedSpace("pretangent spaces are not unique here".into()));
        }
        if u.space_id != oracle.id() {
            return Err(Error::ReportMismatch(u.space_id.clone(), oracle.id()));
        }
    }
    check_depth(depth)?;
    if let Some(s) = selectors.iter().find(|s| !s.is_strictly_increasing(depth)) {
        return Err(Error::Contract(format!("selector {} is not strictly increasing", s.label())));
    }
    let base = radial_values(oracle, r, depth, tol)?;
    let mut checks = Vec::new();
    let mut verdict = Tangency::Tangent;
    for s in selectors {
        let values = radial_values(oracle, &r.subsequence(s), depth, tol)?;
        let unmatched: Vec<(f64, f64)> = values
            .iter()
            .map(|&v| (v, distance_to(&base, v)))
            .filter(|(_, d)| *d > tol.tau)
            .collect();
        if unmatched.iter().any(|(_, d)| *d > 3.0 * tol.tau) {
            verdict = Tangency::NotTangent;
        } else if !unmatched.is_empty() && verdict == Tangency::Tangent {
            verdict = Tangency::Inconclusive;
        }
        checks.push(SelectorCheck {
            selector: s.label().to_string(),
            values,
            unmatched,
        });
    }
    Ok(TangencyReport {
        verdict,
        scale: r.label().to_string(),
        values: base,
        selectors: checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaResidual {
    pub i: usize,
    pub j: usize,
    pub dist: f64,
    pub radial_gap: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaCheck {
    pub kappa0: f64,
    pub rows: Vec<KappaResidual>,
    pub max_residual: f64,
    /// Pairs with equal radial values whose distance exceeds `τ`.
    pub collapse_violations: Vec<(usize, usize)>,
}

/// Compares class distances with `κ₀ |d̃(x̃,ã) - d̃(ỹ,ã)|`.
pub fn kappa_cross_check(pretangent: &FinitePretangent, kappa0: f64) -> KappaCheck {
    let mut rows = Vec::new();
    let mut collapse_violations = Vec::new();
    let n = pretangent.len();
    let radial = |c: &PretangentClass| c.radial_exact.as_ref().map_or(c.radial, Exact::to_f64);
    for i in 0..n {
        for j in i + 1..n {
            let (ci, cj) = (&pretangent.classes[i], &pretangent.classes[j]);
            let dist = pretangent.dist[i][j];
            let same = match (&ci.radial_exact, &cj.radial_exact) {
                (Some(a), Some(b)) => a == b,
                _ => (ci.radial - cj.radial).abs() <= pretangent.tau,
            };
            if same {
                if dist > pretangent.tau {
                    collapse_violations.push((i, j));
                }
                continue;
            }
            let radial_gap = match (&ci.radial_exact, &cj.radial_exact) {
                (Some(a), Some(b)) => (a - b).abs().to_f64(),
                _ => (radial(ci) - radial(cj)).abs(),
            };
            rows.push(KappaResidual {
                i,
                j,
                dist,
                radial_gap,
                residual: (dist - kappa0 * radial_gap).abs(),
            });
        }
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    KappaCheck {
        kappa0,
        rows,
        max_residual,
        collapse_violations,
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum AuditOutcome {
    Pass,
    Fail {
        x: String,
        y: String,
        estimate: LimitEstimate,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub outcome: AuditOutcome,
    pub pairs: usize,
    pub dropped: Vec<Dropped>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, AuditOutcome::Pass)
    }
}

/// Evaluates `d̃` on every pair of candidates stable with `ã`; fails on the
/// first pair (in index order) that does not converge.
pub fn lemma26_audit(
    oracle: &SpaceOracle,
    r: &NormalizingSequence,
    candidates: &[PointSequence],
    depth: usize,
    tol: &Tolerances,
) -> Result<AuditReport> {
    let (kept, dropped) = filter_stable(oracle, r, candidates, depth, tol)?;
    let rs = scales(r, depth)?;
    let mats: Vec<Materialized> = kept
        .iter()
        .map(|c| materialize(oracle, c, depth))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..mats.len())
        .flat_map(|i| (i + 1..mats.len()).map(move |j| (i, j)))
        .collect();
    let estimates: Vec<LimitEstimate> = pairs
        .par_iter()
        .map(|&(i, j)| estimate_limit(&ratio_series(oracle, &mats[i].points, &mats[j].points, &rs), tol))
        .collect();
    let outcome = pairs
        .iter()
        .zip(estimates)
        .find(|(_, e)| !e.is_converged())
        .map_or(AuditOutcome::Pass, |(&(i, j), estimate)| AuditOutcome::Fail {
            x: mats[i].label.clone(),
            y: mats[j].label.clone(),
            estimate,
        });
    Ok(AuditReport {
        outcome,
        pairs: pairs.len(),
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_space, LacunaryAtom};
    use std::f64::consts::PI;

    fn line_seq(label: &str, c: Exact) -> PointSequence {
        PointSequence::new(label, move |n| Point::line(c.scale3(-(n as i64))))
    }

    #[test]
    fn dtilde_constant_ratio() {
        let x = build_space(&SpaceSpec::HalfLine {}).unwrap();
        let r = NormalizingSequence::powers_of_three();
        let e = dtilde(&x, &line_seq("x", Exact::one()), &line_seq("y", Exact::from_integer(2)), &r, 40, &Tolerances::exact())
            .unwrap();
        assert!(e.is_converged());
        assert_eq!(e.value, 1.0);
        let short = dtilde(&x, &line_seq("x", Exact::one()), &marked_sequence(&x), &r, 10, &Tolerances::exact());
        assert!(matches!(short, Err(Error::InsufficientDepth { depth: 10, .. })));
    }

    #[test]
    fn lacunary_radial_value() {
        let x = build_space(&SpaceSpec::Lacunary {}).unwrap();
        let seq = PointSequence::new("r_n", |n| Point::Lacunary {
            atom: LacunaryAtom::Single(n as u64),
        });
        let e = dtilde(&x, &seq, &marked_sequence(&x), &lacunary::scale_sequence(), 40, &Tolerances::exact()).unwrap();
        assert!(e.is_converged() && e.value == 1.0);
    }

    #[test]
    fn crossed_rays_oscillate() {
        let x = build_space(&SpaceSpec::PlanarRays { theta: PI / 2.0 }).unwrap();
        let ray = |ray: usize| {
            PointSequence::new(format!("ray{ray}"), move |n| Point::Ray {
                ray,
                radius: Exact::pow3(-(n as i64)),
            })
        };
        let z = interleave_witness(&ray(0), &ray(1));
        let e = dtilde(&x, &ray(0), &z, &NormalizingSequence::powers_of_three(), 40, &Tolerances::exact()).unwrap();
        assert_eq!(e.status, LimitStatus::Oscillating);
        let (even, odd) = e.sublimits.unwrap();
        assert_eq!(even, 0.0);
        assert!((odd - 2f64.sqrt()).abs() < 1e-12);
        let same = interleave_witness(&ray(0), &ray(0));
        assert_eq!(same.at(7), ray(0).at(7));
    }

    #[test]
    fn half_line_value_map() {
        let x = build_space(&SpaceSpec::HalfLine {}).unwrap();
        let r = NormalizingSequence::powers_of_three();
        let v = value_map(&x, &line_seq("x", Exact::ratio(1, 3)), &r, 40, &Tolerances::exact()).unwrap();
        assert_eq!(v.exact, Some(Exact::ratio(1, 3)));
    }

    #[test]
    fn cantor_value_map() {
        let x = build_space(&SpaceSpec::Cantor { marked: 0 }).unwrap();
        let r = NormalizingSequence::powers_of_three();
        let seq = line_seq("x", Exact::ratio(8, 3));
        let v = value_map(&x, &seq, &r, 40, &Tolerances::exact()).unwrap();
        assert_eq!(v.exact, Some(Exact::ratio(8, 3)));
        let d = dtilde(&x, &seq, &marked_sequence(&x), &r, 40, &Tolerances::exact()).unwrap();
        assert_eq!(d.value, v.value);
    }

    #[test]
    fn half_line_pretangent_matrix() {
        let x = build_space(&SpaceSpec::HalfLine {}).unwrap();
        let cands: Vec<PointSequence> = [0, 1, 2, 5, 2]
            .iter()
            .map(|&c| line_seq(&format!("{c}r_n"), Exact::from_integer(c)))
            .collect();
        let p = pretangent_approximation(&x, &NormalizingSequence::powers_of_three(), &cands, 40, &Tolerances::exact())
            .unwrap();
        assert_eq!(p.len(), 4);
        let values: Vec<f64> = p.classes.iter().map(|c| c.radial).collect();
        assert_eq!(values, vec![0.0, 1.0, 2.0, 5.0]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p.dist[i][j], (values[i] - values[j]).abs());
            }
        }
        let check = kappa_cross_check(&p, 1.0);
        assert_eq!(check.max_residual, 0.0);
        assert!(check.collapse_violations.is_empty());
    }

    #[test]
    fn witness_requires_failing_report() {
        let x = build_space(&SpaceSpec::HalfLine {}).unwrap();
        let tol = Tolerances::exact();
        let grid = crate::functionals::default_r_grid(x.exactness());
        let report = crate::functionals::condition_i(&x, &crate::functionals::default_k_grid(), &grid, &tol, 64).unwrap();
        let err = nonuniqueness_witness(&x, &report, &default_scale(&x), 40, &tol);
        assert!(matches!(err, Err(Error::WitnessNotFound(_))));
    }

    #[test]
    fn audit_catches_interleaved_rays() {
        let x = build_space(&SpaceSpec::PlanarRays { theta: PI / 2.0 }).unwrap();
        let ray = |ray: usize| {
            PointSequence::new(format!("ray{ray}"), move |n| Point::Ray {
                ray,
                radius: Exact::pow3(-(n as i64)),
            })
        };
        let z = interleave_witness(&ray(0), &ray(1));
        let report = lemma26_audit(&x, &NormalizingSequence::powers_of_three(), &[ray(0), z], 40, &Tolerances::exact())
            .unwrap();
        match report.outcome {
            AuditOutcome::Fail { x, estimate, .. } => {
                assert_eq!(x, "ray0");
                assert_eq!(estimate.status, LimitStatus::Oscillating);
            }
            AuditOutcome::Pass => panic!("interleaved rays passed the audit"),
        }
    }
}
