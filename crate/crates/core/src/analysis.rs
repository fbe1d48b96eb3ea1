//! Configuration, orchestration and file output of a full analysis.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Exact, Real};
use crate::functionals::{
    condition_i, condition_ii, condition_iii, default_k_grid, default_pair_families, default_pair_sequences,
    default_r_grid, tangent_equivalence_epsilon, uniqueness_verdict, Condition, ConditionReport, Profile,
    TangentEquivalence, UniquenessVerdict, Verdict, DEFAULT_EPSILON, MIN_SCALES,
};
use crate::limit::Tolerances;
use crate::metric::{Exactness, SpaceKind, SpaceOracle, DEFAULT_SPHERE_BUDGET};
use crate::sequence::{IndexSelector, NormalizingSequence};
use crate::spaces::{build_space, curve_tangent_ray, lacunary, SpaceSpec};
use crate::stability::{
    candidate_library, default_scale, filter_stable, kappa_cross_check, nonuniqueness_witness,
    pretangent_approximation, tangency_check, Dropped, FinitePretangent, KappaCheck, TangencyReport, WitnessPair,
    DEFAULT_DEPTH, MIN_DEPTH,
};
use crate::ternary::{self, MembershipVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Conditions,
    Witness,
    Pretangent,
    Tangency,
    TangentEquivalence,
    CantorReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleSpec {
    /// `{r_n}` for the lacunary space, `3^-n` for exact spaces, `2^-n` otherwise.
    Default,
    PowersOfThree,
    PowersOfTwo,
    Harmonic,
    /// `r_n = 3^{-n(n+1)/2}`.
    Lacunary,
    /// `r_{2n}`.
    LacunaryEven,
    /// `r_n = ratio^n` with `0 < ratio < 1`.
    Geometric(Exact),
}

impl ScaleSpec {
    pub fn build(&self, oracle: &SpaceOracle) -> Result<NormalizingSequence> {
        Ok(match self {
            ScaleSpec::Default => default_scale(oracle),
            ScaleSpec::PowersOfThree => NormalizingSequence::powers_of_three(),
            ScaleSpec::PowersOfTwo => NormalizingSequence::powers_of_two(),
            ScaleSpec::Harmonic => NormalizingSequence::harmonic(),
            ScaleSpec::Lacunary => lacunary::scale_sequence(),
            ScaleSpec::LacunaryEven => lacunary::scale_sequence().subsequence(&IndexSelector::even()),
            ScaleSpec::Geometric(q) => {
                if !(q.is_positive() && *q < Exact::one()) {
                    return Err(invalid("scale", format!("geometric ratio must lie in ]0,1[, got {q}")));
                }
                NormalizingSequence::geometric(q.clone())
            }
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Decreasing radii as exact strings (`"1/2"`, `"0.35"`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_grid: Option<Vec<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Radii for the tangent-equivalence profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorTableSpec {
    #[serde(default = "one")]
    pub bound: Exact,
    #[serde(default = "four")]
    pub depth: u32,
}

fn one() -> Exact {
    Exact::one()
}

fn four() -> u32 {
    4
}

impl Default for CantorTableSpec {
    fn default() -> Self {
        CantorTableSpec {
            bound: one(),
            depth: four(),
        }
    }
}

fn default_depth() -> usize {
    DEFAULT_DEPTH
}

fn default_budget() -> usize {
    DEFAULT_SPHERE_BUDGET
}

fn default_scale_spec() -> ScaleSpec {
    ScaleSpec::Default
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub space: SpaceSpec,
    pub tasks: Vec<Task>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default = "default_scale_spec")]
    pub scale: ScaleSpec,
    #[serde(default = "default_depth")]
    pub depth: usize,
    /// Defaults to the exact or sampled preset of the space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default)]
    pub seed: u64,
    /// Second space for tangent equivalence; defaults to the tangent ray of a curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_with: Option<SpaceSpec>,
    #[serde(default)]
    pub cantor_table: CantorTableSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidSpec {
        field,
        reason: reason.into(),
    }
}

impl AnalysisConfig {
    pub fn minimal(space: SpaceSpec, tasks: Vec<Task>) -> Self {
        AnalysisConfig {
            space,
            tasks,
            grids: Grids::default(),
            scale: ScaleSpec::Default,
            depth: DEFAULT_DEPTH,
            tolerances: None,
            budget: DEFAULT_SPHERE_BUDGET,
            seed: 0,
            compare_with: None,
            cantor_table: CantorTableSpec::default(),
            out_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        if self.tasks.is_empty() {
            return Err(invalid("tasks", "at least one task is required"));
        }
        if let Some(t) = &self.tolerances {
            if !t.is_valid() {
                return Err(invalid("tolerances", "tolerances must be positive and the window at least 2"));
            }
        }
        if let Some(ks) = &self.grids.k_grid {
            if ks.len() < 3 {
                return Err(invalid("k_grid", "at least three values are required"));
            }
            if let Some(k) = ks.iter().find(|k| !(k.is_finite() && **k >= 1.0)) {
                return Err(invalid("k_grid", format!("k must be >= 1, got {k}")));
            }
        }
        if let Some(rs) = &self.grids.r_grid {
            if rs.len() < MIN_SCALES {
                return Err(invalid("r_grid", format!("at least {MIN_SCALES} radii are required")));
            }
            if !rs[0].is_positive() || rs.windows(2).any(|w| w[1] >= w[0]) {
                return Err(invalid("r_grid", "radii must be positive and strictly decreasing"));
            }
        }
        if let Some(ts) = &self.grids.t_grid {
            if ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(invalid("t_grid", "radii must be positive"));
            }
        }
        if let Some(e) = self.grids.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(invalid("epsilon", format!("expected 0 < epsilon < 1, got {e}")));
            }
        }
        if self.depth < MIN_DEPTH {
            return Err(invalid("depth", format!("expected depth >= {MIN_DEPTH}, got {}", self.depth)));
        }
        if self.budget == 0 {
            return Err(invalid("budget", "budget must be positive"));
        }
        if let Some(c) = &self.compare_with {
            c.validate()?;
        }
        if self.tasks.contains(&Task::TangentEquivalence)
            && self.compare_with.is_none()
            && !matches!(self.space, SpaceSpec::Curve { .. })
        {
            return Err(invalid("compare_with", "tangent equivalence needs a curve space or a second space"));
        }
        Ok(())
    }

    fn has(&self, task: Task) -> bool {
        self.tasks.contains(&task)
    }
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(text: &str) -> Result<AnalysisConfig> {
    let config: AnalysisConfig = serde_json::from_str(text).map_err(|e| Error::Config {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceSummary {
    pub id: String,
    pub kind: SpaceKind,
    pub exactness: Exactness,
}

#[derive(Clone, Debug, Serialize)]
pub struct PretangentBlock {
    pub pretangent: FinitePretangent,
    pub dropped: Vec<Dropped>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_check: Option<KappaCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassMembership {
    pub label: String,
    pub value: Exact,
    pub verdict: MembershipVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct CantorReport {
    pub bound: Exact,
    pub depth: u32,
    pub marked: u8,
    pub table: Vec<Exact>,
    /// Membership of the pretangent class values, when that task ran.
    pub classes: Vec<ClassMembership>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskError {
    pub task: Task,
    pub message: String,
}

/// A requested task that does not apply to the computed verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct SkippedTask {
    pub task: Task,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub config: AnalysisConfig,
    pub space: SpaceSummary,
    pub scale: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Vec<ConditionReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniqueness: Option<UniquenessVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pretangent: Option<PretangentBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangency: Option<TangencyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangent_equivalence: Option<TangentEquivalence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cantor: Option<CantorReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedTask>,
    pub errors: Vec<TaskError>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }

    fn record<T>(&mut self, task: Task, result: Result<T>) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(TaskError {
                    task,
                    message: e.to_string(),
                });
                None
            }
        }
    }
}

fn r_grid(config: &AnalysisConfig, oracle: &SpaceOracle) -> Vec<Real> {
    match &config.grids.r_grid {
        Some(rs) => rs
            .iter()
            .map(|r| match oracle.exactness() {
                Exactness::Exact => Real::Exact(r.clone()),
                Exactness::Sampled => Real::Float(r.to_f64()),
            })
            .collect(),
        None => default_r_grid(oracle.exactness()),
    }
}

fn default_t_grid() -> Vec<f64> {
    (1..=40).map(|j| 0.5 * 0.7f64.powi(j)).collect()
}

fn run_conditions(
    config: &AnalysisConfig,
    oracle: &SpaceOracle,
    tol: &Tolerances,
) -> Result<(Vec<ConditionReport>, UniquenessVerdict)> {
    let grid = r_grid(config, oracle);
    let ks = config.grids.k_grid.clone().unwrap_or_else(default_k_grid);
    let eps = config.grids.epsilon.unwrap_or(DEFAULT_EPSILON);
    let reports = vec![
        condition_i(oracle, &ks, &grid, tol, config.budget)?,
        condition_ii(oracle, eps, &default_pair_families(oracle, &grid, eps), tol, config.budget)?,
        condition_iii(oracle, eps, &default_pair_sequences(oracle, &grid, eps), tol, config.budget)?,
    ];
    let verdict = uniqueness_verdict(&reports)?;
    Ok((reports, verdict))
}

fn run_pretangent(
    config: &AnalysisConfig,
    oracle: &SpaceOracle,
    scale: &NormalizingSequence,
    tol: &Tolerances,
    conditions: Option<&[ConditionReport]>,
) -> Result<PretangentBlock> {
    let library = candidate_library(oracle, scale);
    let (kept, dropped) = filter_stable(oracle, scale, &library[1..], config.depth, tol)?;
    let pretangent = pretangent_approximation(oracle, scale, &kept, config.depth, tol)?;
    let kappa0 = conditions
        .and_then(|cs| cs.iter().find(|c| c.condition == Condition::III))
        .filter(|c| c.verdict == crate::functionals::Verdict::Pass)
        .and_then(|c| c.estimate);
    Ok(PretangentBlock {
        kappa_check: kappa0.map(|k| kappa_cross_check(&pretangent, k)),
        pretangent,
        dropped,
    })
}

fn run_cantor(config: &AnalysisConfig, pretangent: Option<&PretangentBlock>) -> Result<CantorReport> {
    let marked = match config.space {
        SpaceSpec::Cantor { marked } => marked,
        _ => 0,
    };
    let spec = &config.cantor_table;
    let table = ternary::ce_truncation(&spec.bound, spec.depth, marked)?;
    let mut classes = Vec::new();
    if let (SpaceSpec::Cantor { .. }, Some(block)) = (&config.space, pretangent) {
        for c in &block.pretangent.classes {
            if let Some(v) = &c.value_exact {
                classes.push(ClassMembership {
                    label: c.label.clone(),
                    value: v.clone(),
                    verdict: ternary::is_member_of_ce(v, marked, ternary::ROUNDING_DEPTH)?,
                });
            }
        }
    }
    Ok(CantorReport {
        bound: spec.bound.clone(),
        depth: spec.depth,
        marked,
        table,
        classes,
    })
}

/// Runs the configured tasks in dependency order; task failures are
/// recorded in [`Report::errors`].
pub fn run_analysis(config: &AnalysisConfig) -> Result<Report> {
    config.validate()?;
    let oracle = build_space(&config.space)?;
    let tol = config.tolerances.unwrap_or_else(|| Tolerances::for_space(&oracle));
    let scale = config.scale.build(&oracle)?;
    let mut report = Report {
        tool: ToolInfo {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        },
        config: config.clone(),
        space: SpaceSummary {
            id: oracle.id(),
            kind: oracle.kind(),
            exactness: oracle.exactness(),
        },
        scale: scale.label().to_string(),
        conditions: None,
        uniqueness: None,
        witness: None,
        pretangent: None,
        tangency: None,
        tangent_equivalence: None,
        cantor: None,
        skipped: Vec::new(),
        errors: Vec::new(),
    };

    let needs_conditions = config.has(Task::Conditions) || config.has(Task::Witness) || config.has(Task::Tangency);
    if needs_conditions {
        let result = run_conditions(config, &oracle, &tol);
        if let Some((reports, verdict)) = report.record(Task::Conditions, result) {
            report.conditions = Some(reports);
            report.uniqueness = Some(verdict);
        }
    }

    if config.has(Task::Witness) {
        let failing = report
            .conditions
            .as_ref()
            .and_then(|cs| cs.iter().find(|c| c.condition == Condition::I).cloned());
        match failing {
            Some(c) if c.verdict == Verdict::Fail => {
                let result = nonuniqueness_witness(&oracle, &c, &scale, config.depth, &tol);
                report.witness = report.record(Task::Witness, result);
            }
            Some(c) => report.skipped.push(SkippedTask {
                task: Task::Witness,
                reason: format!("condition (i) verdict is {:?}; a witness needs a failing condition (i)", c.verdict),
            }),
            // the conditions task already recorded why
            None => {}
        }
    }

    if config.has(Task::Pretangent) {
        let result = run_pretangent(config, &oracle, &scale, &tol, report.conditions.as_deref());
        report.pretangent = report.record(Task::Pretangent, result);
    }

    if config.has(Task::Tangency) {
        let selectors = IndexSelector::default_suite(config.seed, config.depth);
        let result = tangency_check(&oracle, report.uniqueness.as_ref(), &scale, &selectors, config.depth, &tol);
        report.tangency = report.record(Task::Tangency, result);
    }

    if config.has(Task::TangentEquivalence) {
        let result = match &config.compare_with {
            Some(spec) => build_space(spec),
            None => curve_tangent_ray(&config.space),
        }
        .and_then(|other| {
            let ts = config.grids.t_grid.clone().unwrap_or_else(default_t_grid);
            tangent_equivalence_epsilon(&oracle, &other, &ts, config.budget)
        });
        report.tangent_equivalence = report.record(Task::TangentEquivalence, result);
    }

    if config.has(Task::CantorReport) {
        let result = run_cantor(config, report.pretangent.as_ref());
        report.cantor = report.record(Task::CantorReport, result);
    }
    Ok(report)
}

/// Writes a CSV file; fields are never quoted since none contains a comma.
fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> Result<()> {
    let mut text = String::from(header);
    text.push_str("\r\n");
    for row in rows {
        text.push_str(&row);
        text.push_str("\r\n");
    }
    fs::write(path, text)?;
    Ok(())
}

fn slug(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' })
        .collect()
}

fn fraction(r: &Real) -> String {
    match r {
        Real::Exact(e) => e.to_fraction_string(),
        Real::Float(x) => format!("{x}"),
    }
}

/// Writes `report.json` and the profile CSVs into `dir`; returns the paths
/// written, in order.
pub fn emit_outputs(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    fs::write(&path, json)?;
    written.push(path);

    for c in report.conditions.iter().flatten() {
        match &c.profile {
            Profile::Annulus(rows) => {
                let path = dir.join("condition_i.csv");
                write_csv(&path, "k,g_of_k", rows.iter().map(|r| format!("{},{}", r.k, r.g_of_k)))?;
                written.push(path);
            }
            Profile::Ratios(rows) => {
                let mut families: Vec<&str> = rows.iter().map(|r| r.family.as_str()).collect();
                families.dedup();
                for fam in families {
                    let path = dir.join(format!("condition_ii_{}.csv", slug(fam)));
                    write_csv(
                        &path,
                        "g,t,ratio",
                        rows.iter()
                            .filter(|r| r.family == fam)
                            .map(|r| format!("{},{},{}", fraction(&r.g), fraction(&r.t), r.ratio)),
                    )?;
                    written.push(path);
                }
            }
            Profile::Kappa(series) => {
                for s in series {
                    let path = dir.join(format!("condition_iii_{}.csv", slug(&s.label)));
                    write_csv(
                        &path,
                        "n,q_n,t_n,kappa_n",
                        s.rows
                            .iter()
                            .map(|r| format!("{},{},{},{}", r.n, fraction(&r.q_n), fraction(&r.t_n), r.kappa_n)),
                    )?;
                    written.push(path);
                }
            }
        }
    }
    if let Some(te) = &report.tangent_equivalence {
        let path = dir.join("tangent_equivalence.csv");
        write_csv(&path, "t,eps_over_t", te.profile.iter().map(|r| format!("{},{}", r.t, r.eps_over_t)))?;
        written.push(path);
    }
    if let Some(c) = &report.cantor {
        let path = dir.join("cantor_table.csv");
        write_csv(&path, "value", c.table.iter().map(Exact::to_fraction_string))?;
        written.push(path);
    }
    Ok(written)
}
