//! Configuration-driven batch runner.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::functionals::{
    apply_scales, check_requirements, csv_error, evaluate_modal, evaluate_radial, format_float, write_reports_csv,
    CoefficientScales, InequalityId, InequalityReport, CATALOG,
};
use crate::functions::{seeded_bumps, seeded_modal_functions};
use crate::geometry::{curvature_at, CurvatureSample, ManifoldModel};
use crate::profiles::{Family, FamilyParams, ProfileSpec, WarpingProfile};
use crate::quadrature::QuadratureSpec;
use crate::sharpness::{
    fit_limit, fit_spectral, sequence_quotient, spectral_constant_estimate, SharpnessResult, SpectralTarget,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub family: Family,
    #[serde(default)]
    pub params: FamilyParams,
    #[serde(rename = "N")]
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Verify,
    Sharpness,
    Sequence,
    Curvature,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Verify => "verify",
            ExperimentKind::Sharpness => "sharpness",
            ExperimentKind::Sequence => "sequence",
            ExperimentKind::Curvature => "curvature",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub count: usize,
    pub support: [f64; 2],
    pub width: f64,
    pub seed: u64,
    /// Mode indices for modal inequalities; defaults to `[0]`.
    #[serde(default)]
    pub modes: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

impl QuadratureOverrides {
    fn apply(&self, mut spec: QuadratureSpec) -> QuadratureSpec {
        if let Some(v) = self.rel_tol {
            spec.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            spec.abs_tol = v;
        }
        if let Some(v) = self.max_subdivisions {
            spec.max_subdivisions = v;
        }
        spec
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Output file stem; defaults to `<index>_<kind>`.
    pub name: Option<String>,
    pub kind: Option<ExperimentKind>,
    pub model: String,
    pub inequality: Option<InequalityId>,
    pub target: Option<SpectralTarget>,
    pub functions: Option<FunctionConfig>,
    pub beta: Option<f64>,
    pub quadrature: Option<QuadratureOverrides>,
    /// Accepted range for a sharpness fit.
    pub window: Option<[f64; 2]>,
    pub radii: Option<Vec<f64>>,
    pub grid_points: Option<usize>,
    /// Fixed grid spacing; overrides `grid_points` so grids nest across radii.
    pub spacing: Option<f64>,
    pub alpha: Option<f64>,
    pub n_values: Option<Vec<f64>>,
    /// Multiplies named term coefficients after evaluation. Diagnostic only:
    /// a wrong constant must make the run fail.
    pub coefficient_scales: Option<CoefficientScales>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: OutputFormat,
    /// Output directory when `--out` is not given.
    pub path: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub experiments: Vec<ExperimentConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// A validated experiment ready to run.
#[derive(Clone, Debug)]
struct Plan {
    stem: String,
    kind: ExperimentKind,
    model: ManifoldModel,
    model_name: String,
    config: ExperimentConfig,
    spec: QuadratureSpec,
}

fn config_err(index: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("experiment {index}: {msg}"))
}

fn build_models(config: &RunConfig) -> Result<HashMap<String, ManifoldModel>> {
    let mut models = HashMap::new();
    for m in &config.models {
        let profile = WarpingProfile::from_spec(&ProfileSpec { family: m.family, params: m.params.clone() })
            .map_err(|e| Error::Config(format!("model `{}`: {e}", m.name)))?;
        let model = ManifoldModel::new(m.dim, profile).map_err(|e| Error::Config(format!("model `{}`: {e}", m.name)))?;
        if models.insert(m.name.clone(), model).is_some() {
            return Err(Error::Config(format!("duplicate model name `{}`", m.name)));
        }
    }
    Ok(models)
}

fn validate(config: &RunConfig) -> Result<Vec<Plan>> {
    if config.workers == Some(0) {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let models = build_models(config)?;
    let mut plans = Vec::new();
    let mut stems = BTreeMap::new();
    for (index, exp) in config.experiments.iter().enumerate() {
        let kind = exp.kind.ok_or_else(|| config_err(index, "missing `kind`"))?;
        let model = models
            .get(&exp.model)
            .ok_or_else(|| config_err(index, format!("unknown model `{}`", exp.model)))?
            .clone();
        let spec = exp.quadrature.unwrap_or_default().apply(QuadratureSpec::default());
        spec.validate().map_err(|e| config_err(index, e))?;
        if let Some([lo, hi]) = exp.window {
            if !(lo <= hi) {
                return Err(config_err(index, format!("window [{lo}, {hi}] is empty")));
            }
        }
        match kind {
            ExperimentKind::Verify => validate_verify(index, exp, &model)?,
            ExperimentKind::Sharpness => validate_sharpness(index, exp, &model)?,
            ExperimentKind::Sequence => validate_sequence(index, exp, &model)?,
            ExperimentKind::Curvature => {
                let radii = exp.radii.as_ref().ok_or_else(|| config_err(index, "curvature needs `radii`"))?;
                for &r in radii {
                    model.profile().check_domain(r).map_err(|e| config_err(index, e))?;
                }
            }
        }
        let stem = exp.name.clone().unwrap_or_else(|| format!("{index:02}_{}", kind.as_str()));
        if stem.is_empty() || stem.contains(['/', '\\']) {
            return Err(config_err(index, format!("invalid experiment name `{stem}`")));
        }
        if stems.insert(stem.clone(), index).is_some() {
            return Err(config_err(index, format!("duplicate experiment name `{stem}`")));
        }
        plans.push(Plan { stem, kind, model, model_name: exp.model.clone(), config: exp.clone(), spec });
    }
    Ok(plans)
}

fn validate_verify(index: usize, exp: &ExperimentConfig, model: &ManifoldModel) -> Result<()> {
    let id = exp.inequality.ok_or_else(|| config_err(index, "verify needs `inequality`"))?;
    check_requirements(id, model, exp.beta).map_err(|e| config_err(index, e))?;
    let f = exp.functions.as_ref().ok_or_else(|| config_err(index, "verify needs `functions`"))?;
    if f.count == 0 {
        return Err(config_err(index, "`functions.count` must be positive"));
    }
    let [lo, hi] = f.support;
    if !(f.width > 0.0 && lo >= 0.0 && hi - lo >= 2.0 * f.width && lo + f.width > 0.0) {
        return Err(config_err(index, format!("cannot place bumps of half-width {} in [{lo}, {hi}]", f.width)));
    }
    model.profile().check_domain(lo.max(1e-12)).map_err(|e| config_err(index, e))?;
    if let Some(modes) = &f.modes {
        if modes.is_empty() {
            return Err(config_err(index, "`functions.modes` must not be empty"));
        }
        if !id.is_modal() {
            return Err(config_err(index, format!("{id} takes radial test functions; remove `functions.modes`")));
        }
    }
    if exp.beta.is_some() && !id.needs_beta() {
        return Err(config_err(index, format!("{id} takes no `beta`")));
    }
    Ok(())
}

fn validate_sharpness(index: usize, exp: &ExperimentConfig, model: &ManifoldModel) -> Result<()> {
    exp.target.ok_or_else(|| config_err(index, "sharpness needs `target`"))?;
    if !model.profile().is_global() {
        return Err(config_err(index, "spectral estimates need a globally defined profile"));
    }
    let radii = exp.radii.as_ref().ok_or_else(|| config_err(index, "sharpness needs `radii`"))?;
    if radii.is_empty() || radii.iter().any(|&r| !(r > 1.0)) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(config_err(index, "`radii` must be increasing and exceed 1"));
    }
    match (exp.grid_points, exp.spacing) {
        (Some(_), Some(_)) => return Err(config_err(index, "give either `grid_points` or `spacing`")),
        (None, None) => return Err(config_err(index, "sharpness needs `grid_points` or `spacing`")),
        (Some(m), None) if m < 256 => return Err(config_err(index, "`grid_points` must be at least 256")),
        (None, Some(h)) if !(h > 0.0) || radii.iter().any(|r| r / h < 256.0) => {
            return Err(config_err(index, "`spacing` must give at least 256 grid points"))
        }
        _ => {}
    }
    Ok(())
}

fn validate_sequence(index: usize, exp: &ExperimentConfig, model: &ManifoldModel) -> Result<()> {
    if !model.profile().is_global() {
        return Err(config_err(index, "the minimizing sequence needs a globally defined profile"));
    }
    let alpha = exp.alpha.unwrap_or(2.0);
    let growth = model.profile().asymptotic().map(|a| a.a).unwrap_or(0.0);
    if !(alpha > 1.0 + growth) {
        return Err(config_err(index, Error::AlphaTooSmall { alpha, bound: 1.0 + growth }));
    }
    let ns = exp.n_values.as_ref().ok_or_else(|| config_err(index, "sequence needs `n_values`"))?;
    if ns.len() < 4 || ns.iter().any(|&n| !(n >= 3.0)) || ns.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(config_err(index, "`n_values` needs at least 4 increasing entries >= 3"));
    }
    Ok(())
}

/// Outcome of one experiment.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub name: String,
    pub kind: ExperimentKind,
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub outcomes: Vec<ExperimentOutcome>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failures.is_empty())
    }

    pub fn failures(&self) -> Vec<String> {
        self.outcomes
            .iter()
            .flat_map(|o| o.failures.iter().map(move |f| format!("{}: {f}", o.name)))
            .collect()
    }
}

/// Validates the configuration; errors here map to exit status 2.
pub fn prepare(config: &RunConfig) -> Result<()> {
    validate(config).map(|_| ())
}

/// Runs every experiment of the selected kinds (all when `only` is `None`)
/// and writes one report per experiment into `out_dir`.
pub fn run(config: &RunConfig, only: Option<ExperimentKind>, out_dir: &Path) -> Result<RunSummary> {
    let plans: Vec<Plan> = validate(config)?
        .into_iter()
        .filter(|p| only.is_none_or(|k| k == p.kind))
        .collect();
    if plans.is_empty() {
        return Ok(RunSummary::default());
    }
    fs::create_dir_all(out_dir)?;
    let format = config.output.format;
    let workers = config.workers.unwrap_or(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let outcomes: Vec<Result<ExperimentOutcome>> =
        pool.install(|| plans.par_iter().map(|plan| run_plan(plan, format, out_dir)).collect());
    Ok(RunSummary { outcomes: outcomes.into_iter().collect::<Result<_>>()? })
}

fn run_plan(plan: &Plan, format: OutputFormat, out_dir: &Path) -> Result<ExperimentOutcome> {
    match plan.kind {
        ExperimentKind::Verify => run_verify(plan, format, out_dir),
        ExperimentKind::Sharpness => run_sharpness(plan, format, out_dir),
        ExperimentKind::Sequence => run_sequence(plan, format, out_dir),
        ExperimentKind::Curvature => run_curvature(plan, format, out_dir),
    }
}

fn outcome(plan: &Plan, files: Vec<PathBuf>, failures: Vec<String>) -> ExperimentOutcome {
    ExperimentOutcome { name: plan.stem.clone(), kind: plan.kind, files, failures }
}

/// Evaluates the configured inequality on every seeded test function.
fn verify_reports(plan: &Plan) -> Result<Vec<InequalityReport>> {
    let exp = &plan.config;
    let id = exp.inequality.expect("validated");
    let f = exp.functions.as_ref().expect("validated");
    let beta = exp.beta.unwrap_or(0.0);
    let support = (f.support[0], f.support[1]);
    let mut reports: Vec<InequalityReport> = if id.is_modal() {
        let modes = f.modes.clone().unwrap_or_else(|| vec![0]);
        let fs = seeded_modal_functions(f.count, &modes, support, f.width, f.seed)?;
        fs.par_iter()
            .map(|u| evaluate_modal(id, &plan.model, u, beta, &plan.spec))
            .collect::<Result<_>>()?
    } else {
        let fs = seeded_bumps(f.count, support, f.width, f.seed)?;
        fs.par_iter()
            .map(|u| evaluate_radial(id, &plan.model, u, beta, &plan.spec))
            .collect::<Result<_>>()?
    };
    if let Some(scales) = &exp.coefficient_scales {
        for r in &mut reports {
            apply_scales(r, scales);
        }
    }
    for r in &mut reports {
        r.model = plan.model_name.clone();
    }
    Ok(reports)
}

fn run_verify(plan: &Plan, format: OutputFormat, out_dir: &Path) -> Result<ExperimentOutcome> {
    let reports = verify_reports(plan)?;
    let mut failures = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        if r.in_hypothesis && !r.passes() {
            failures.push(format!(
                "{} function {i}: margin {:.6e} below slack -{:.3e}",
                r.inequality_id,
                r.margin,
                r.slack()
            ));
        }
        if !r.converged {
            failures.push(format!("{} function {i}: quadrature did not converge", r.inequality_id));
        }
    }
    let path = match format {
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_reports_csv(&reports, &mut buf)?;
            write_atomic(&out_dir.join(format!("{}.csv", plan.stem)), &buf)?
        }
        OutputFormat::Json => {
            let doc = json!({
                "experiment": plan.stem,
                "kind": "verify",
                "reports": reports.iter().map(InequalityReport::to_json).collect::<Vec<_>>(),
            });
            write_json(&out_dir.join(format!("{}.json", plan.stem)), &doc)?
        }
    };
    Ok(outcome(plan, vec![path], failures))
}

fn sharpness_result(plan: &Plan) -> Result<SharpnessResult> {
    let exp = &plan.config;
    let target = exp.target.expect("validated");
    let radii = exp.radii.as_ref().expect("validated");
    let grid = |r: f64| match exp.spacing {
        Some(h) => (r / h).round() as usize,
        None => exp.grid_points.expect("validated"),
    };
    let estimates = radii
        .par_iter()
        .map(|&r| spectral_constant_estimate(&plan.model, target, r, grid(r)))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<(f64, f64)> = estimates.iter().map(|e| (e.radius, e.eigenvalue)).collect();
    fit_spectral(target, &samples, estimates[0].epsilon)
}

fn window_failures(result: &SharpnessResult, window: Option<[f64; 2]>) -> Vec<String> {
    match window {
        Some([lo, hi]) if !(result.fitted_limit >= lo && result.fitted_limit <= hi) => {
            vec![format!("fitted limit {:.6} outside window [{lo}, {hi}]", result.fitted_limit)]
        }
        _ => Vec::new(),
    }
}

fn summary_json(plan: &Plan, result: &SharpnessResult, extra: Value) -> Value {
    let mut doc = json!({
        "experiment": plan.stem,
        "model": plan.model_name,
        "N": plan.model.dim(),
        "target": result.experiment_id.as_str(),
        "fitted_limit": result.fitted_limit,
        "fit_slope": result.fit_slope,
        "fit_model": result.fit_model,
        "fit_residual": result.fit_residual,
        "samples": result.samples.iter().map(|(p, v)| json!([p, v])).collect::<Vec<_>>(),
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    doc
}

fn emit_result(plan: &Plan, format: OutputFormat, out_dir: &Path, result: &SharpnessResult, extra: Value) -> Result<Vec<PathBuf>> {
    let summary = summary_json(plan, result, extra);
    match format {
        OutputFormat::Csv => {
            let csv_path = out_dir.join(format!("{}.csv", plan.stem));
            let json_path = out_dir.join(format!("{}.summary.json", plan.stem));
            let mut files = Vec::new();
            if result.samples.len() >= 2 {
                files.push(emit_plot_data(result, &csv_path)?);
            } else {
                files.push(write_atomic(&csv_path, &plot_csv(result)?)?);
            }
            files.push(write_json(&json_path, &summary)?);
            Ok(files)
        }
        OutputFormat::Json => Ok(vec![write_json(&out_dir.join(format!("{}.json", plan.stem)), &summary)?]),
    }
}

fn run_sharpness(plan: &Plan, format: OutputFormat, out_dir: &Path) -> Result<ExperimentOutcome> {
    let result = sharpness_result(plan)?;
    let failures = window_failures(&result, plan.config.window);
    let extra = json!({
        "grid_points": plan.config.grid_points,
        "spacing": plan.config.spacing,
    });
    let files = emit_result(plan, format, out_dir, &result, extra)?;
    Ok(outcome(plan, files, failures))
}

fn run_sequence(plan: &Plan, format: OutputFormat, out_dir: &Path) -> Result<ExperimentOutcome> {
    let exp = &plan.config;
    let alpha = exp.alpha.unwrap_or(2.0);
    let ns = exp.n_values.as_ref().expect("validated");
    let quotients = ns
        .par_iter()
        .map(|&n| sequence_quotient(&plan.model, n, alpha, &plan.spec))
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<(f64, f64)> = quotients.iter().map(|q| (q.n, q.quotient)).collect();
    let result = fit_limit(&samples, alpha)?;
    let mut failures = window_failures(&result, exp.window);
    for q in &quotients {
        if q.quotient < 0.25 - SLACK * q.error {
            failures.push(format!("quotient {:.6} at n = {} is below 1/4", q.quotient, q.n));
        }
        if !q.converged {
            failures.push(format!("quadrature did not converge at n = {}", q.n));
        }
    }
    let extra = json!({ "alpha": alpha });
    let files = emit_result(plan, format, out_dir, &result, extra)?;
    Ok(outcome(plan, files, failures))
}

const SLACK: f64 = crate::functionals::SLACK_FACTOR;

fn run_curvature(plan: &Plan, format: OutputFormat, out_dir: &Path) -> Result<ExperimentOutcome> {
    let radii = plan.config.radii.as_ref().expect("validated");
    let samples = radii.iter().map(|&r| curvature_at(&plan.model, r)).collect::<Result<Vec<_>>>()?;
    let path = match format {
        OutputFormat::Csv => write_atomic(&out_dir.join(format!("{}.csv", plan.stem)), &curvature_csv(&samples)?)?,
        OutputFormat::Json => {
            let doc = json!({ "experiment": plan.stem, "model": plan.model_name, "N": plan.model.dim(), "samples": samples });
            write_json(&out_dir.join(format!("{}.json", plan.stem)), &doc)?
        }
    };
    Ok(outcome(plan, vec![path], Vec::new()))
}

/// CSV with columns r,K,H,Lambda.
pub fn curvature_csv(samples: &[CurvatureSample]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "K", "H", "Lambda"]).map_err(csv_error)?;
    for s in samples {
        w.write_record([s.r, s.k_rad, s.h_tan, s.lambda_rad].map(format_float)).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn plot_csv(result: &SharpnessResult) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    writeln!(buf, "# fit: {}; c0={}", result.fit_model, format_float(result.fitted_limit))?;
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(["parameter", "value"]).map_err(csv_error)?;
    for (p, v) in &result.samples {
        w.write_record([format_float(*p), format_float(*v)]).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Two-column (parameter, value) CSV with a `# fit:` comment line.
pub fn emit_plot_data(result: &SharpnessResult, path: &Path) -> Result<PathBuf> {
    if result.samples.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "plot data needs at least 2 samples, got {}",
            result.samples.len()
        )));
    }
    write_atomic(path, &plot_csv(result)?)
}

fn write_json(path: &Path, doc: &Value) -> Result<PathBuf> {
    let mut text = serde_json::to_vec_pretty(doc).map_err(|e| Error::Io(e.to_string()))?;
    text.push(b'\n');
    write_atomic(path, &text)
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<PathBuf> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", file_name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(path.to_path_buf())
}

/// Text of `--list-inequalities`.
pub fn inequality_catalog() -> String {
    let mut out = String::new();
    for e in CATALOG {
        let dim = if e.min_dim == 0 { "1-D".to_string() } else { format!("N>={}", e.min_dim) };
        out.push_str(&format!("{:<22} {:<6} {}\n", e.id.as_str(), dim, e.statement));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verify_config(inequality: &str, dim: usize) -> String {
        format!(
            r#"{{
              "models": [{{"name": "h", "family": "hyperbolic", "N": {dim}}}],
              "experiments": [{{
                "kind": "verify", "model": "h", "inequality": "{inequality}",
                "functions": {{"count": 4, "support": [0.5, 8.0], "width": 0.5, "seed": 11}}
              }}]
            }}"#
        )
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_json(r#"{"models": [], "experiments": [], "extra": 1}"#).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let err = RunConfig::from_json(
            r#"{"models": [{"name": "h", "family": "hyperbolic", "N": 3, "colour": "red"}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn rellich_in_four_dimensions_is_a_config_error() {
        let config = RunConfig::from_json(&verify_config("rellich", 4)).unwrap();
        let err = prepare(&config).unwrap_err();
        assert!(err.to_string().contains("N >= 5"), "{err}");
    }

    #[test]
    fn unknown_model_and_missing_fields() {
        let config = RunConfig::from_json(
            r#"{"experiments": [{"kind": "curvature", "model": "nope", "radii": [1.0]}]}"#,
        )
        .unwrap();
        assert!(prepare(&config).is_err());
        let config = RunConfig::from_json(
            r#"{"models": [{"name": "h", "family": "hyperbolic", "N": 3}],
                "experiments": [{"kind": "sequence", "model": "h", "n_values": [10, 100]}]}"#,
        )
        .unwrap();
        assert!(prepare(&config).is_err());
    }

    #[test]
    fn empty_run_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let summary = run(&RunConfig::default(), None, &out).unwrap();
        assert!(summary.passed() && summary.outcomes.is_empty());
        assert!(!out.exists());
    }

    #[test]
    fn verify_writes_one_row_per_function() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig::from_json(&verify_config("first_order", 3)).unwrap();
        let summary = run(&config, Some(ExperimentKind::Verify), dir.path()).unwrap();
        assert!(summary.passed(), "{:?}", summary.failures());
        let text = fs::read_to_string(&summary.outcomes[0].files[0]).unwrap();
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn plot_data_needs_two_samples() {
        let dir = tempfile::tempdir().unwrap();
        let result = SharpnessResult {
            experiment_id: crate::sharpness::ExperimentId::PoincareGap,
            samples: vec![(10.0, 1.1)],
            fitted_limit: 1.1,
            fit_slope: 0.0,
            fit_model: "single sample".into(),
            fit_residual: 0.0,
        };
        assert!(emit_plot_data(&result, &dir.path().join("p.csv")).is_err());
        let mut two = result.clone();
        two.samples.push((20.0, 1.02));
        let path = emit_plot_data(&two, &dir.path().join("p.csv")).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.starts_with("# fit: single sample; c0="));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn catalog_lists_every_inequality() {
        let text = inequality_catalog();
        assert_eq!(text.lines().count(), 14);
        assert!(text.contains("rellich") && text.contains("N>=5"));
    }
}
