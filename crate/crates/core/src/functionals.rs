//! Term-by-term evaluation of the Poincaré–Hardy–Rellich inequalities.
//!
//! Volume integrals over M are reported in full, i.e. with the factor ω_N
//! from the sphere. One-dimensional inequalities are plain integrals over r.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::functions::{ModalTestFunction, RadialFunction, RadialTestFunction};
use crate::geometry::{modal_laplacian_raw, radial_laplacian_raw, sphere_area, sphere_mode, ManifoldModel};
use crate::profiles::{check_con3, check_curvature_bound, Family};
use crate::quadrature::{integrate_pieces, Estimate, QuadratureSpec, POLE_EPSILON};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    FirstOrder,
    FirstOrderPoincare,
    SecondOrderRadial,
    SecondOrderExplicit,
    Rellich,
    Gradient,
    UseCor3,
    RadLap,
    WeightedHardy,
    OneDimHardy,
    VhnRadialHardy,
    ProtoExp,
    ProtoRexp,
    ProtoGauss,
}

pub struct CatalogEntry {
    pub id: InequalityId,
    pub min_dim: usize,
    pub statement: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        id: InequalityId::FirstOrder,
        min_dim: 3,
        statement: "∫u'² − (N−1)/4 ∫Λu² ≥ 1/4 ∫u²/r² + (N−1)(N−3)/4 ∫u²/ψ²",
    },
    CatalogEntry {
        id: InequalityId::FirstOrderPoincare,
        min_dim: 3,
        statement: "∫u'² − ((N−1)/2)² ∫u² ≥ 1/4 ∫u²/r² + (N−1)(N−3)/4 ∫u²/ψ²   [K_rad ≤ −1]",
    },
    CatalogEntry {
        id: InequalityId::SecondOrderRadial,
        min_dim: 3,
        statement: "∫(Δ_r u)² − (N−1)/4 ∫[Λ+4(K−H)]u'² ≥ 1/4 ∫u'²/r² + (N²−1)/4 ∫u'²/ψ²",
    },
    CatalogEntry {
        id: InequalityId::SecondOrderExplicit,
        min_dim: 3,
        statement: "∫(Δ_r u)² − ((N−1)/2)² ∫u'² ≥ 1/4 ∫u'²/r² + (N²−1)/4 ∫u'²/ψ²   [K_rad ≤ −1, K_rad ≥ H_tan]",
    },
    CatalogEntry {
        id: InequalityId::Rellich,
        min_dim: 5,
        statement: "∫(Δu)² − ((N−1)/2)⁴ ∫u² ≥ (N−4)²/16 ∫u²/r⁴ + (N−1)²/16 ∫u²/r²   [K_rad ≤ −1, K_rad ≥ H_tan]",
    },
    CatalogEntry {
        id: InequalityId::Gradient,
        min_dim: 5,
        statement: "∫(Δu)² − ((N−1)/2)² ∫|∇u|² ≥ 1/4 ∫|∇u|²/r² + (N²−1)/4 ∫|∇u|²/ψ²   [K_rad ≤ −1, K_rad ≥ H_tan]",
    },
    CatalogEntry {
        id: InequalityId::UseCor3,
        min_dim: 5,
        statement: "∫(Δ_r u)² − ((N−1)/2)⁴ ∫u² ≥ (N−1)²/16 ∫u²/r² + (N−1)³(N−3)/16 ∫u²/ψ² + 1/4 ∫u'²/r² + (N²−1)/4 ∫u'²/ψ²",
    },
    CatalogEntry {
        id: InequalityId::RadLap,
        min_dim: 5,
        statement: "∫(Δu)² r^−β ≥ ∫(Δ_r u)² r^−β, 0 ≤ β < N−4, equality for radial u",
    },
    CatalogEntry {
        id: InequalityId::WeightedHardy,
        min_dim: 5,
        statement: "∫f'² r^−β ψ^(N−3) dr ≥ (N−β−4)²/4 ∫f² r^−β ψ^(N−5) dr",
    },
    CatalogEntry {
        id: InequalityId::OneDimHardy,
        min_dim: 0,
        statement: "∫d'² dr ≥ 1/4 ∫d²/r² dr",
    },
    CatalogEntry {
        id: InequalityId::VhnRadialHardy,
        min_dim: 5,
        statement: "∫u'²/r² ≥ (N−4)²/4 ∫u²/r⁴",
    },
    CatalogEntry {
        id: InequalityId::ProtoExp,
        min_dim: 3,
        statement: "ψ = A e^(b r^(a+1)) beyond R: ∫u'² ≥ ((N−1)/2)²(a+1)²b² ∫r^(2a)u² + 1/4 ∫u²/r² + 2ba(a+1)(N−1)/4 ∫r^(a−1)u²",
    },
    CatalogEntry {
        id: InequalityId::ProtoRexp,
        min_dim: 3,
        statement: "ψ = A r e^(b r^(a+1)) beyond R: ∫u'² ≥ (N−2)²/4 ∫u²/r² + (a+1)²b²(N−1)²/4 ∫r^(2a)u² + b(a+1)(N−1)(N−1+a)/2 ∫r^(a−1)u²",
    },
    CatalogEntry {
        id: InequalityId::ProtoGauss,
        min_dim: 3,
        statement: "ψ = r e^(r^(2m)): ∫u'² ≥ (N−2)²/4 ∫u²/r² + m²(N−1)² ∫r^(4m−2)u² + m(N−1)(N−2+2m) ∫r^(2m−2)u²",
    },
];

impl InequalityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::FirstOrder => "first_order",
            InequalityId::FirstOrderPoincare => "first_order_poincare",
            InequalityId::SecondOrderRadial => "second_order_radial",
            InequalityId::SecondOrderExplicit => "second_order_explicit",
            InequalityId::Rellich => "rellich",
            InequalityId::Gradient => "gradient",
            InequalityId::UseCor3 => "use_cor_3",
            InequalityId::RadLap => "rad_lap",
            InequalityId::WeightedHardy => "weighted_hardy",
            InequalityId::OneDimHardy => "one_dim_hardy",
            InequalityId::VhnRadialHardy => "vhn_radial_hardy",
            InequalityId::ProtoExp => "proto_exp",
            InequalityId::ProtoRexp => "proto_rexp",
            InequalityId::ProtoGauss => "proto_gauss",
        }
    }

    pub fn min_dim(&self) -> usize {
        CATALOG.iter().find(|e| e.id == *self).map(|e| e.min_dim).unwrap_or(3)
    }

    /// Inequalities whose test functions carry several spherical modes.
    pub fn is_modal(&self) -> bool {
        matches!(self, InequalityId::Gradient | InequalityId::RadLap)
    }

    pub fn needs_beta(&self) -> bool {
        matches!(self, InequalityId::RadLap | InequalityId::WeightedHardy)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lhs,
    Rhs,
}

/// One signed term: `value = coefficient · integral`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Term {
    pub name: String,
    pub side: Side,
    pub coefficient: f64,
    pub integral: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub inequality_id: InequalityId,
    pub model: String,
    pub dim: usize,
    pub params: String,
    pub terms: Vec<Term>,
    pub lhs_total: f64,
    pub rhs_total: f64,
    pub margin: f64,
    pub quotient: Option<f64>,
    pub quadrature_error: f64,
    pub converged: bool,
    /// `None` when the statement does not assume the condition.
    pub con2: Option<bool>,
    pub con3: Option<bool>,
    pub in_hypothesis: bool,
    #[serde(skip)]
    quotient_term: Option<String>,
}

/// Multiple of the propagated quadrature error tolerated below zero.
pub const SLACK_FACTOR: f64 = 10.0;

impl InequalityReport {
    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn slack(&self) -> f64 {
        SLACK_FACTOR * self.quadrature_error
    }

    /// margin ≥ −10·(quadrature error).
    pub fn passes(&self) -> bool {
        self.margin >= -self.slack()
    }

    /// Multiplies the coefficient of `name` by `factor` and recomputes the
    /// totals. Used to check that a deliberately wrong constant is caught.
    pub fn rescale_term(&mut self, name: &str, factor: f64) -> bool {
        let Some(term) = self.terms.iter_mut().find(|t| t.name == name) else {
            return false;
        };
        term.coefficient *= factor;
        term.value = term.coefficient * term.integral;
        term.error *= factor.abs();
        self.recompute();
        true
    }

    fn recompute(&mut self) {
        self.lhs_total = self.terms.iter().filter(|t| t.side == Side::Lhs).map(|t| t.value).sum();
        self.rhs_total = self.terms.iter().filter(|t| t.side == Side::Rhs).map(|t| t.value).sum();
        self.margin = self.lhs_total - self.rhs_total;
        self.quadrature_error = self.terms.iter().map(|t| t.error).sum();
        self.quotient = self.quotient_term.as_ref().and_then(|name| {
            let d = self.term(name)?.integral;
            (d != 0.0).then(|| self.lhs_total / d)
        });
    }

    /// One JSON object; terms flattened into `"term.<name>"` keys.
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("inequality_id".into(), json!(self.inequality_id));
        obj.insert("model".into(), json!(self.model));
        obj.insert("N".into(), json!(self.dim));
        obj.insert("params".into(), json!(self.params));
        for t in &self.terms {
            obj.insert(format!("term.{}", t.name), json!(t.value));
            obj.insert(format!("coefficient.{}", t.name), json!(t.coefficient));
        }
        obj.insert("lhs_total".into(), json!(self.lhs_total));
        obj.insert("rhs_total".into(), json!(self.rhs_total));
        obj.insert("margin".into(), json!(self.margin));
        obj.insert("quotient".into(), json!(self.quotient));
        obj.insert("quadrature_error".into(), json!(self.quadrature_error));
        obj.insert("converged".into(), json!(self.converged));
        obj.insert("con2".into(), json!(self.con2));
        obj.insert("con3".into(), json!(self.con3));
        obj.insert("hypothesis_ok".into(), json!(self.in_hypothesis));
        obj.insert("pass".into(), json!(self.passes()));
        Value::Object(obj)
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["inequality_id".to_string(), "model".into(), "N".into(), "params".into()];
        h.extend(self.terms.iter().map(|t| t.name.clone()));
        h.extend(["margin", "quotient", "error", "hypothesis_ok"].map(String::from));
        h
    }

    pub fn csv_record(&self) -> Vec<String> {
        let mut row = vec![
            self.inequality_id.to_string(),
            self.model.clone(),
            self.dim.to_string(),
            self.params.clone(),
        ];
        row.extend(self.terms.iter().map(|t| format_float(t.value)));
        row.push(format_float(self.margin));
        row.push(self.quotient.map(format_float).unwrap_or_default());
        row.push(format_float(self.quadrature_error));
        row.push(self.in_hypothesis.to_string());
        row
    }
}

pub(crate) fn format_float(x: f64) -> String {
    format!("{x:.12e}")
}

/// Writes reports as CSV rows under the header of the first report.
/// Reports with a different term layout get their own header line.
pub fn write_reports_csv<W: Write>(reports: &[InequalityReport], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let mut last: Option<Vec<String>> = None;
    for report in reports {
        let header = report.csv_header();
        if last.as_ref() != Some(&header) {
            writer.write_record(&header).map_err(csv_error)?;
            last = Some(header);
        }
        writer.write_record(report.csv_record()).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

struct Builder<'a> {
    id: InequalityId,
    model: Option<&'a ManifoldModel>,
    terms: Vec<Term>,
    converged: bool,
    con2: Option<bool>,
    con3: Option<bool>,
}

impl<'a> Builder<'a> {
    fn new(id: InequalityId, model: Option<&'a ManifoldModel>) -> Self {
        Builder { id, model, terms: Vec::new(), converged: true, con2: None, con3: None }
    }

    fn term(&mut self, name: &str, side: Side, coefficient: f64, est: Estimate) -> &mut Self {
        self.converged &= est.converged;
        self.terms.push(Term {
            name: name.into(),
            side,
            coefficient,
            integral: est.value,
            value: coefficient * est.value,
            error: coefficient.abs() * est.error,
        });
        self
    }

    fn conditions(&mut self, support: (f64, f64), con2: bool, con3: bool) -> Result<&mut Self> {
        let model = self.model.expect("conditions need a model");
        let radii = support_samples(support);
        if con2 {
            self.con2 = Some(check_curvature_bound(model.profile(), &radii)?.holds);
        }
        if con3 {
            self.con3 = Some(check_con3(model.profile(), &radii)?.holds);
        }
        Ok(self)
    }

    fn finish(&mut self, quotient_term: Option<&str>) -> InequalityReport {
        let (name, dim, params) = match self.model {
            Some(m) => (
                m.profile().name().to_string(),
                m.dim(),
                serde_json::to_string(&m.profile().params()).unwrap_or_default(),
            ),
            None => ("line".to_string(), 1, "{}".to_string()),
        };
        let mut report = InequalityReport {
            inequality_id: self.id,
            model: name,
            dim,
            params,
            terms: std::mem::take(&mut self.terms),
            lhs_total: 0.0,
            rhs_total: 0.0,
            margin: 0.0,
            quotient: None,
            quadrature_error: 0.0,
            converged: self.converged,
            con2: self.con2,
            con3: self.con3,
            in_hypothesis: self.con2.unwrap_or(true) && self.con3.unwrap_or(true),
            quotient_term: quotient_term.map(String::from),
        };
        report.recompute();
        report
    }
}

fn support_samples(support: (f64, f64)) -> Vec<f64> {
    let lo = support.0.max(1e-3);
    let hi = support.1.max(lo);
    (0..=32).map(|i| lo + (hi - lo) * i as f64 / 32.0).collect()
}

/// ω_N ∫ g(r) ψ^(N−1+extra) dr over the support.
fn volume_integral<G: Fn(f64) -> f64>(
    model: &ManifoldModel,
    support: (f64, f64),
    breaks: &[f64],
    extra_power: f64,
    spec: &QuadratureSpec,
    g: G,
) -> Result<Estimate> {
    Ok(line_integral(model, support, breaks, model.dim() as f64 - 1.0 + extra_power, spec, g)?.scaled(sphere_area(model.dim())))
}

/// ∫ g(r) ψ^power dr over the support.
fn line_integral<G: Fn(f64) -> f64>(
    model: &ManifoldModel,
    support: (f64, f64),
    breaks: &[f64],
    power: f64,
    spec: &QuadratureSpec,
    g: G,
) -> Result<Estimate> {
    let profile = model.profile();
    let points = integration_points(support, breaks);
    if points.len() < 2 {
        return Ok(Estimate::ZERO);
    }
    profile.check_domain(points[0])?;
    integrate_pieces(
        |r| {
            let v = g(r);
            if v == 0.0 {
                0.0
            } else {
                v * profile.psi_pow_raw(r, power)
            }
        },
        &points,
        spec,
    )
}

fn integration_points(support: (f64, f64), breaks: &[f64]) -> Vec<f64> {
    let lo = support.0.max(POLE_EPSILON);
    let hi = support.1;
    if !(hi > lo) {
        return Vec::new();
    }
    let mut points = vec![lo];
    points.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    points.push(hi);
    points
}

fn check_support(model: &ManifoldModel, u: &RadialTestFunction) -> Result<()> {
    let lo = u.support().0;
    model.profile().check_domain(lo.max(POLE_EPSILON))
}

/// Shared radial integrals of a test function against the volume measure.
struct Radial<'a> {
    model: &'a ManifoldModel,
    u: &'a RadialTestFunction,
    spec: &'a QuadratureSpec,
    breaks: Vec<f64>,
}

impl<'a> Radial<'a> {
    fn new(model: &'a ManifoldModel, u: &'a RadialTestFunction, spec: &'a QuadratureSpec) -> Result<Self> {
        check_support(model, u)?;
        Ok(Radial { model, u, spec, breaks: u.breakpoints() })
    }

    fn vol<G: Fn(f64) -> f64>(&self, g: G) -> Result<Estimate> {
        volume_integral(self.model, self.u.support(), &self.breaks, 0.0, self.spec, g)
    }

    fn u2(&self, weight: impl Fn(f64) -> f64) -> Result<Estimate> {
        self.vol(|r| {
            let v = self.u.value(r);
            if v == 0.0 { 0.0 } else { v * v * weight(r) }
        })
    }

    fn du2(&self, weight: impl Fn(f64) -> f64) -> Result<Estimate> {
        self.vol(|r| {
            let d = self.u.deriv1(r);
            if d == 0.0 { 0.0 } else { d * d * weight(r) }
        })
    }

    fn bilaplacian(&self) -> Result<Estimate> {
        self.vol(|r| radial_laplacian_raw(self.model, self.u, r).powi(2))
    }
}

fn n_of(model: &ManifoldModel) -> f64 {
    model.dim() as f64
}

/// Λ + 4(K − H) = −2ψ″/ψ + (N+1)((ψ′)² − 1)/ψ².
pub fn second_order_bracket(model: &ManifoldModel, r: f64) -> Result<f64> {
    model.profile().check_domain(r)?;
    let p = model.profile();
    Ok(-2.0 * p.second_ratio_raw(r) + (n_of(model) + 1.0) * p.tangential_ratio_raw(r))
}

pub fn first_order_terms(model: &ManifoldModel, u: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    let n = n_of(model);
    let q = Radial::new(model, u, spec)?;
    let mut b = Builder::new(InequalityId::FirstOrder, Some(model));
    b.term("grad", Side::Lhs, 1.0, q.du2(|_| 1.0)?)
        .term("lambda", Side::Lhs, -0.25 * (n - 1.0), q.u2(|r| model.lambda_rad_raw(r))?)
        .term("hardy", Side::Rhs, 0.25, q.u2(|r| 1.0 / (r * r))?)
        .term("psi", Side::Rhs, 0.25 * (n - 1.0) * (n - 3.0), q.u2(|r| model.profile().inv_psi_sq_raw(r))?);
    Ok(b.finish(Some("hardy")))
}

pub fn first_order_poincare_terms(model: &ManifoldModel, u: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    let n = n_of(model);
    let q = Radial::new(model, u, spec)?;
    let mut b = Builder::new(InequalityId::FirstOrderPoincare, Some(model));
    b.conditions(u.support(), true, false)?;
    b.term("grad", Side::Lhs, 1.0, q.du2(|_| 1.0)?)
        .term("poincare", Side::Lhs, -0.25 * (n - 1.0) * (n - 1.0), q.u2(|_| 1.0)?)
        .term("hardy", Side::Rhs, 0.25, q.u2(|r| 1.0 / (r * r))?)
        .term("psi", Side::Rhs, 0.25 * (n - 1.0) * (n - 3.0), q.u2(|r| model.profile().inv_psi_sq_raw(r))?);
    Ok(b.finish(Some("hardy")))
}

fn second_order_common(
    id: InequalityId,
    model: &ManifoldModel,
    u: &RadialTestFunction,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    let n = n_of(model);
    let q = Radial::new(model, u, spec)?;
    let mut b = Builder::new(id, Some(model));
    b.term("bilap", Side::Lhs, 1.0, q.bilaplacian()?);
    if id == InequalityId::SecondOrderRadial {
        let p = model.profile();
        b.term(
            "mixed",
            Side::Lhs,
            -0.25 * (n - 1.0),
            q.du2(|r| -2.0 * p.second_ratio_raw(r) + (n + 1.0) * p.tangential_ratio_raw(r))?,
        );
    } else {
        b.conditions(u.support(), true, true)?;
        b.term("poincare", Side::Lhs, -0.25 * (n - 1.0) * (n - 1.0), q.du2(|_| 1.0)?);
    }
    b.term("hardy", Side::Rhs, 0.25, q.du2(|r| 1.0 / (r * r))?)
        .term("psi", Side::Rhs, 0.25 * (n * n - 1.0), q.du2(|r| model.profile().inv_psi_sq_raw(r))?);
    Ok(b.finish(Some("hardy")))
}

pub fn second_order_radial_terms(model: &ManifoldModel, u: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    second_order_common(InequalityId::SecondOrderRadial, model, u, spec)
}

pub fn second_order_explicit_terms(model: &ManifoldModel, u: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    second_order_common(InequalityId::SecondOrderExplicit, model, u, spec)
}

pub fn rellich_terms(model: &ManifoldModel, u: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    model.require_dim(5, "the Rellich inequality")?;
    let n = n_of(model);
    let q = Radial::new(model, u, spec)?;
    let mut b = Builder::new(InequalityId::Rellich, Some(model));
    b.conditions(u.support(), true, true)?;
    b.term("bilap", Side::Lhs, 1.0, q.bilaplacian()?)
        .term("poincare4", Side::Lhs, -((n - 1.0) / 2.0).powi(4), q.u2(|_| 1.0)?)
        .term("rellich", Side::Rhs, (n - 4.0).powi(2) / 16.0, q.u2(|r| r.powi(-4))?)
        .term("hardy2", Side::Rhs, (n - 1.0).powi(2) / 16.0, q.u2(|r| 1.0 / (r * r))?);
    Ok(b.finish(Some("rellich")))
}

pub fn use_cor_3_terms(model: &ManifoldModel, u: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    model.require_dim(5, "the combined second-order inequality")?;
    let n = n_of(model);
    let q = Radial::new(model, u, spec)?;
    let p = model.profile();
    let mut b = Builder::new(InequalityId::UseCor3, Some(model));
    b.conditions(u.support(), true, true)?;
    b.term("bilap", Side::Lhs, 1.0, q.bilaplacian()?)
        .term("poincare4", Side::Lhs, -((n - 1.0) / 2.0).powi(4), q.u2(|_| 1.0)?)
        .term("hardy2", Side::Rhs, (n - 1.0).powi(2) / 16.0, q.u2(|r| 1.0 / (r * r))?)
        .term("psi2", Side::Rhs, (n - 1.0).powi(3) * (n - 3.0) / 16.0, q.u2(|r| p.inv_psi_sq_raw(r))?)
        .term("hardy_grad", Side::Rhs, 0.25, q.du2(|r| 1.0 / (r * r))?)
        .term("psi_grad", Side::Rhs, 0.25 * (n * n - 1.0), q.du2(|r| p.inv_psi_sq_raw(r))?);
    Ok(b.finish(Some("hardy2")))
}

pub fn vhn_radial_hardy_terms(model: &ManifoldModel, u: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    model.require_dim(5, "the radial Hardy inequality with 1/r^4 weight")?;
    let n = n_of(model);
    let q = Radial::new(model, u, spec)?;
    let mut b = Builder::new(InequalityId::VhnRadialHardy, Some(model));
    b.conditions(u.support(), true, false)?;
    b.term("grad_r2", Side::Lhs, 1.0, q.du2(|r| 1.0 / (r * r))?)
        .term("rellich", Side::Rhs, 0.25 * (n - 4.0).powi(2), q.u2(|r| r.powi(-4))?);
    Ok(b.finish(Some("rellich")))
}

fn modal_support(u: &ModalTestFunction) -> ((f64, f64), Vec<f64>) {
    let lo = u.modes().iter().map(|(_, a)| a.support().0).fold(f64::INFINITY, f64::min);
    let hi = u.modes().iter().map(|(_, a)| a.support().1).fold(f64::NEG_INFINITY, f64::max);
    let mut breaks: Vec<f64> = u
        .modes()
        .iter()
        .flat_map(|(_, a)| {
            let (l, h) = a.support();
            let mut v = a.breakpoints();
            v.extend([l, h]);
            v
        })
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    ((lo, hi), breaks)
}

fn check_modal(model: &ManifoldModel, u: &ModalTestFunction) -> Result<()> {
    if u.modes().is_empty() {
        return Err(Error::EmptyModes);
    }
    for (_, a) in u.modes() {
        check_support(model, a)?;
    }
    Ok(())
}

/// Σₙ ∫ f(n, aₙ, r) ψ^(N−1) dr, times ω_N.
fn modal_sum<F>(model: &ManifoldModel, u: &ModalTestFunction, spec: &QuadratureSpec, f: F) -> Result<Estimate>
where
    F: Fn(usize, &RadialTestFunction, f64) -> f64,
{
    let mut total = Estimate::ZERO;
    for (n, a) in u.modes() {
        let mut breaks = a.breakpoints();
        breaks.sort_by(f64::total_cmp);
        total = total + volume_integral(model, a.support(), &breaks, 0.0, spec, |r| f(*n, a, r))?;
    }
    Ok(total)
}

/// |∇u|² per mode: (aₙ′)² + λₙ aₙ²/ψ².
fn modal_gradient_density(model: &ManifoldModel, n: usize, a: &RadialTestFunction, r: f64) -> f64 {
    let d = a.deriv1(r);
    let v = a.value(r);
    if n == 0 || v == 0.0 {
        return d * d;
    }
    d * d + sphere_mode(n, model.dim()).lambda * v * v * model.profile().inv_psi_sq_raw(r)
}

pub fn gradient_inequality_terms(model: &ManifoldModel, u: &ModalTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    model.require_dim(5, "the gradient inequality")?;
    check_modal(model, u)?;
    let n = n_of(model);
    let p = model.profile();
    let (support, _) = modal_support(u);
    let mut b = Builder::new(InequalityId::Gradient, Some(model));
    b.conditions(support, true, true)?;
    let bilap = modal_sum(model, u, spec, |k, a, r| modal_laplacian_raw(model, a, k, r).powi(2))?;
    let grad = modal_sum(model, u, spec, |k, a, r| modal_gradient_density(model, k, a, r))?;
    let grad_r2 = modal_sum(model, u, spec, |k, a, r| modal_gradient_density(model, k, a, r) / (r * r))?;
    let grad_psi2 = modal_sum(model, u, spec, |k, a, r| {
        let g = modal_gradient_density(model, k, a, r);
        if g == 0.0 { 0.0 } else { g * p.inv_psi_sq_raw(r) }
    })?;
    b.term("bilap", Side::Lhs, 1.0, bilap)
        .term("poincare2", Side::Lhs, -0.25 * (n - 1.0) * (n - 1.0), grad)
        .term("hardy", Side::Rhs, 0.25, grad_r2)
        .term("psi", Side::Rhs, 0.25 * (n * n - 1.0), grad_psi2);
    Ok(b.finish(Some("hardy")))
}

fn check_beta(model: &ManifoldModel, beta: f64) -> Result<()> {
    let limit = n_of(model) - 4.0;
    if !(beta >= 0.0 && beta < limit) {
        return Err(Error::BetaRange { beta, limit });
    }
    Ok(())
}

pub fn rad_lap_compare(model: &ManifoldModel, u: &ModalTestFunction, beta: f64, spec: &QuadratureSpec) -> Result<InequalityReport> {
    check_beta(model, beta)?;
    check_modal(model, u)?;
    let (support, _) = modal_support(u);
    let mut b = Builder::new(InequalityId::RadLap, Some(model));
    b.conditions(support, true, false)?;
    let full = modal_sum(model, u, spec, |k, a, r| modal_laplacian_raw(model, a, k, r).powi(2) * r.powf(-beta))?;
    let radial = modal_sum(model, u, spec, |_, a, r| radial_laplacian_raw(model, a, r).powi(2) * r.powf(-beta))?;
    b.term("laplacian", Side::Lhs, 1.0, full).term("radial_laplacian", Side::Rhs, 1.0, radial);
    Ok(b.finish(Some("radial_laplacian")))
}

pub fn weighted_hardy_check(model: &ManifoldModel, f: &RadialTestFunction, beta: f64, spec: &QuadratureSpec) -> Result<InequalityReport> {
    check_beta(model, beta)?;
    check_support(model, f)?;
    let n = n_of(model);
    let breaks = f.breakpoints();
    let mut b = Builder::new(InequalityId::WeightedHardy, Some(model));
    b.conditions(f.support(), true, false)?;
    let lhs = line_integral(model, f.support(), &breaks, n - 3.0, spec, |r| {
        let d = f.deriv1(r);
        if d == 0.0 { 0.0 } else { d * d * r.powf(-beta) }
    })?;
    let rhs = line_integral(model, f.support(), &breaks, n - 5.0, spec, |r| {
        let v = f.value(r);
        if v == 0.0 { 0.0 } else { v * v * r.powf(-beta) }
    })?;
    b.term("grad", Side::Lhs, 1.0, lhs).term("weighted", Side::Rhs, 0.25 * (n - beta - 4.0).powi(2), rhs);
    Ok(b.finish(Some("weighted")))
}

pub fn one_dim_hardy_check(d: &RadialTestFunction, spec: &QuadratureSpec) -> Result<InequalityReport> {
    let points = integration_points(d.support(), &d.breakpoints());
    let (lhs, rhs) = if points.len() < 2 {
        (Estimate::ZERO, Estimate::ZERO)
    } else {
        (
            integrate_pieces(|r| d.deriv1(r).powi(2), &points, spec)?,
            integrate_pieces(|r| d.value(r).powi(2) / (r * r), &points, spec)?,
        )
    };
    let mut b = Builder::new(InequalityId::OneDimHardy, None);
    b.term("grad", Side::Lhs, 1.0, lhs).term("hardy", Side::Rhs, 0.25, rhs);
    Ok(b.finish(Some("hardy")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prototype {
    Proto,
    Proto2,
    Gauss,
}

impl Prototype {
    pub fn family(&self) -> Family {
        match self {
            Prototype::Proto => Family::ExpTail,
            Prototype::Proto2 => Family::RExpTail,
            Prototype::Gauss => Family::Gauss,
        }
    }

    pub fn inequality_id(&self) -> InequalityId {
        match self {
            Prototype::Proto => InequalityId::ProtoExp,
            Prototype::Proto2 => InequalityId::ProtoRexp,
            Prototype::Gauss => InequalityId::ProtoGauss,
        }
    }

    pub fn for_family(family: Family) -> Option<Prototype> {
        match family {
            Family::ExpTail => Some(Prototype::Proto),
            Family::RExpTail => Some(Prototype::Proto2),
            Family::Gauss => Some(Prototype::Gauss),
            _ => None,
        }
    }
}

/// Family-specific first-order inequalities with explicit curvature terms.
pub fn prototype_inequality_terms(
    model: &ManifoldModel,
    u: &RadialTestFunction,
    which: Prototype,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    let profile = model.profile();
    if profile.family() != which.family() {
        return Err(Error::UnsupportedFamily(format!(
            "{} on a {} profile",
            which.inequality_id(),
            profile.family()
        )));
    }
    let params = profile.params();
    let n = n_of(model);
    let (lo, hi) = u.support();
    if which != Prototype::Gauss {
        let radius = params.radius.unwrap_or(0.0);
        if lo < radius {
            return Err(Error::SupportInsideBall { lo, hi, radius });
        }
    }
    let q = Radial::new(model, u, spec)?;
    let mut b = Builder::new(which.inequality_id(), Some(model));
    b.term("grad", Side::Lhs, 1.0, q.du2(|_| 1.0)?);
    match which {
        Prototype::Proto | Prototype::Proto2 => {
            let a = params.exponent.unwrap_or(0.0);
            let rate = params.rate.unwrap_or(0.0);
            if which == Prototype::Proto && a < 0.0 {
                return Err(Error::InvalidParameter(format!("the exponential-tail inequality needs a >= 0, got {a}")));
            }
            let growth = q.u2(|r| r.powf(2.0 * a))?;
            let curvature = q.u2(|r| r.powf(a - 1.0))?;
            let hardy = q.u2(|r| 1.0 / (r * r))?;
            let k2 = (a + 1.0).powi(2) * rate * rate;
            if which == Prototype::Proto {
                b.term("poincare", Side::Rhs, 0.25 * (n - 1.0).powi(2) * k2, growth)
                    .term("hardy", Side::Rhs, 0.25, hardy)
                    .term("curvature", Side::Rhs, 0.5 * rate * a * (a + 1.0) * (n - 1.0), curvature);
            } else {
                b.term("hardy", Side::Rhs, 0.25 * (n - 2.0).powi(2), hardy)
                    .term("poincare", Side::Rhs, 0.25 * k2 * (n - 1.0).powi(2), growth)
                    .term("curvature", Side::Rhs, 0.5 * rate * (a + 1.0) * (n - 1.0) * (n - 1.0 + a), curvature);
            }
        }
        Prototype::Gauss => {
            let m = params.order.unwrap_or(1) as f64;
            b.term("hardy", Side::Rhs, 0.25 * (n - 2.0).powi(2), q.u2(|r| 1.0 / (r * r))?)
                .term("poincare", Side::Rhs, m * m * (n - 1.0).powi(2), q.u2(|r| r.powf(4.0 * m - 2.0))?)
                .term("curvature", Side::Rhs, m * (n - 1.0) * (n - 2.0 + 2.0 * m), q.u2(|r| r.powf(2.0 * m - 2.0))?);
        }
    }
    Ok(b.finish(Some("hardy")))
}

/// Evaluates `id` on a radial test function. Modal inequalities get the
/// function as a single n = 0 mode.
pub fn evaluate_radial(
    id: InequalityId,
    model: &ManifoldModel,
    u: &RadialTestFunction,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    match id {
        InequalityId::FirstOrder => first_order_terms(model, u, spec),
        InequalityId::FirstOrderPoincare => first_order_poincare_terms(model, u, spec),
        InequalityId::SecondOrderRadial => second_order_radial_terms(model, u, spec),
        InequalityId::SecondOrderExplicit => second_order_explicit_terms(model, u, spec),
        InequalityId::Rellich => rellich_terms(model, u, spec),
        InequalityId::UseCor3 => use_cor_3_terms(model, u, spec),
        InequalityId::VhnRadialHardy => vhn_radial_hardy_terms(model, u, spec),
        InequalityId::WeightedHardy => weighted_hardy_check(model, u, beta, spec),
        InequalityId::OneDimHardy => one_dim_hardy_check(u, spec),
        InequalityId::Gradient => gradient_inequality_terms(model, &ModalTestFunction::radial(u.clone()), spec),
        InequalityId::RadLap => rad_lap_compare(model, &ModalTestFunction::radial(u.clone()), beta, spec),
        InequalityId::ProtoExp => prototype_inequality_terms(model, u, Prototype::Proto, spec),
        InequalityId::ProtoRexp => prototype_inequality_terms(model, u, Prototype::Proto2, spec),
        InequalityId::ProtoGauss => prototype_inequality_terms(model, u, Prototype::Gauss, spec),
    }
}

/// Evaluates a modal inequality (`gradient` or `rad_lap`).
pub fn evaluate_modal(
    id: InequalityId,
    model: &ManifoldModel,
    u: &ModalTestFunction,
    beta: f64,
    spec: &QuadratureSpec,
) -> Result<InequalityReport> {
    match id {
        InequalityId::Gradient => gradient_inequality_terms(model, u, spec),
        InequalityId::RadLap => rad_lap_compare(model, u, beta, spec),
        other => Err(Error::Config(format!("{other} takes radial test functions"))),
    }
}

/// Checks the dimension and β requirements of `id` without evaluating.
pub fn check_requirements(id: InequalityId, model: &ManifoldModel, beta: Option<f64>) -> Result<()> {
    let min = id.min_dim();
    if min > 0 {
        model.require_dim(min, id.as_str())?;
    }
    if id.needs_beta() {
        check_beta(model, beta.unwrap_or(0.0))?;
    }
    if let Some(p) = [Prototype::Proto, Prototype::Proto2, Prototype::Gauss]
        .into_iter()
        .find(|p| p.inequality_id() == id)
    {
        if model.profile().family() != p.family() {
            return Err(Error::UnsupportedFamily(format!("{id} on a {} profile", model.profile().family())));
        }
    }
    Ok(())
}

/// Coefficient multipliers keyed by term name, applied after evaluation.
pub type CoefficientScales = BTreeMap<String, f64>;

pub fn apply_scales(report: &mut InequalityReport, scales: &CoefficientScales) {
    for (name, factor) in scales {
        report.rescale_term(name, *factor);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::make_bump;
    use crate::profiles::WarpingProfile;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn bump(c: f64, w: f64) -> RadialTestFunction {
        make_bump(c, w, 1.0).unwrap()
    }

    fn h(n: usize) -> ManifoldModel {
        ManifoldModel::hyperbolic(n).unwrap()
    }

    fn assert_totals(r: &InequalityReport) {
        let lhs: f64 = r.terms.iter().filter(|t| t.side == Side::Lhs).map(|t| t.value).sum();
        let rhs: f64 = r.terms.iter().filter(|t| t.side == Side::Rhs).map(|t| t.value).sum();
        assert_eq!(lhs, r.lhs_total);
        assert_eq!(rhs, r.rhs_total);
        assert_eq!(r.margin, lhs - rhs);
    }

    #[test]
    fn first_order_examples() {
        let r = first_order_terms(&h(3), &bump(3.0, 1.0), &spec()).unwrap();
        assert!(r.passes() && r.margin > 0.0);
        assert_totals(&r);

        let e4 = ManifoldModel::euclidean(4).unwrap();
        let r = first_order_terms(&e4, &bump(2.0, 1.0), &spec()).unwrap();
        let hardy = r.term("hardy").unwrap();
        let psi = r.term("psi").unwrap();
        assert_eq!(r.term("lambda").unwrap().value, 0.0);
        assert!((hardy.value + psi.value - 1.0 * hardy.integral).abs() < 1e-12 * hardy.integral);
        assert!(r.margin > 0.0);

        let r = first_order_terms(&h(3), &RadialTestFunction::zero(), &spec()).unwrap();
        assert!(r.terms.iter().all(|t| t.value == 0.0));
        assert_eq!(r.margin, 0.0);
        assert_eq!(r.quotient, None);
    }

    #[test]
    fn poincare_form_matches_on_hyperbolic() {
        for n in [3, 5, 8] {
            let u = bump(2.0, 1.0);
            let a = first_order_terms(&h(n), &u, &spec()).unwrap();
            let b = first_order_poincare_terms(&h(n), &u, &spec()).unwrap();
            assert!((a.margin - b.margin).abs() <= 1e-12 * a.lhs_total.abs().max(1.0));
            assert_eq!(b.con2, Some(true));
            assert!(b.passes());
        }
        let g = ManifoldModel::new(3, WarpingProfile::gauss(1).unwrap()).unwrap();
        let r = first_order_poincare_terms(&g, &bump(1.5, 0.5), &spec()).unwrap();
        assert!(r.margin >= 0.0 && r.in_hypothesis);
        let e = ManifoldModel::euclidean(4).unwrap();
        let r = first_order_poincare_terms(&e, &bump(2.0, 1.0), &spec()).unwrap();
        assert_eq!(r.con2, Some(false));
        assert!(!r.in_hypothesis);
    }

    #[test]
    fn second_order_examples() {
        let r = second_order_radial_terms(&h(4), &bump(2.0, 1.0), &spec()).unwrap();
        assert!(r.margin >= 0.0);
        for i in 1..50 {
            let x = 0.2 * i as f64;
            assert!((second_order_bracket(&h(4), x).unwrap() - 3.0).abs() < 1e-12);
        }
        let e5 = ManifoldModel::euclidean(5).unwrap();
        let r = second_order_radial_terms(&e5, &bump(2.0, 1.0), &spec()).unwrap();
        assert_eq!(r.term("mixed").unwrap().value, 0.0);
        assert!(r.margin >= 0.0);
        let r = second_order_explicit_terms(&h(5), &bump(2.0, 1.0), &spec()).unwrap();
        assert!(r.passes() && r.in_hypothesis);
    }

    #[test]
    fn rellich_examples() {
        assert!(matches!(
            rellich_terms(&h(4), &bump(3.0, 1.0), &spec()),
            Err(Error::Dimension { min: 5, got: 4, .. })
        ));
        let r = rellich_terms(&h(5), &bump(3.0, 1.0), &spec()).unwrap();
        assert!(r.margin >= 0.0);
        let r = rellich_terms(&h(8), &bump(2.0, 0.5), &spec()).unwrap();
        assert!(r.margin >= 0.0);
        assert_eq!(r.term("rellich").unwrap().coefficient, 1.0);
        let r = rellich_terms(&h(5), &RadialTestFunction::zero(), &spec()).unwrap();
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn use_cor_3_examples() {
        assert!(use_cor_3_terms(&h(5), &bump(2.0, 1.0), &spec()).unwrap().margin >= 0.0);
        assert!(use_cor_3_terms(&h(6), &bump(2.0, 0.3), &spec()).unwrap().margin >= 0.0);
        assert_eq!(use_cor_3_terms(&h(5), &RadialTestFunction::zero(), &spec()).unwrap().margin, 0.0);
    }

    #[test]
    fn gradient_examples() {
        let u0 = ModalTestFunction::radial(bump(2.0, 1.0));
        let r = gradient_inequality_terms(&h(5), &u0, &spec()).unwrap();
        assert!(r.margin >= 0.0);
        // n = 0 reproduces the radial integrals
        let s = second_order_explicit_terms(&h(5), &bump(2.0, 1.0), &spec()).unwrap();
        for (a, b) in [("bilap", "bilap"), ("poincare2", "poincare"), ("hardy", "hardy"), ("psi", "psi")] {
            let x = r.term(a).unwrap().value;
            let y = s.term(b).unwrap().value;
            assert!((x - y).abs() <= 1e-10 * y.abs(), "{a}");
        }
        let u1 = ModalTestFunction::new(vec![(1, bump(2.0, 1.0))]).unwrap();
        assert!(gradient_inequality_terms(&h(5), &u1, &spec()).unwrap().margin >= 0.0);
        let z = ModalTestFunction::radial(RadialTestFunction::zero());
        assert_eq!(gradient_inequality_terms(&h(5), &z, &spec()).unwrap().margin, 0.0);
    }

    #[test]
    fn rad_lap_examples() {
        let radial = ModalTestFunction::radial(bump(2.0, 1.0));
        for n in [5, 6] {
            let r = rad_lap_compare(&h(n), &radial, 0.0, &spec()).unwrap();
            assert!(r.margin.abs() <= 1e-10 * r.lhs_total);
        }
        let one = ModalTestFunction::new(vec![(1, bump(2.0, 1.0))]).unwrap();
        let r = rad_lap_compare(&h(6), &one, 1.0, &spec()).unwrap();
        assert!(r.margin > 10.0 * r.quadrature_error);
        assert!(matches!(rad_lap_compare(&h(6), &one, 2.0, &spec()), Err(Error::BetaRange { .. })));
        assert!(rad_lap_compare(&h(6), &one, -0.5, &spec()).is_err());
    }

    #[test]
    fn weighted_and_one_dim_hardy() {
        let r = weighted_hardy_check(&h(5), &bump(2.0, 1.0), 0.0, &spec()).unwrap();
        assert!(r.margin >= 0.0);
        assert_eq!(r.term("weighted").unwrap().coefficient, 0.25);
        let r = weighted_hardy_check(&h(9), &bump(2.0, 1.0), 2.0, &spec()).unwrap();
        assert_eq!(r.term("weighted").unwrap().coefficient, 2.25);
        assert_eq!(weighted_hardy_check(&h(7), &RadialTestFunction::zero(), 1.0, &spec()).unwrap().margin, 0.0);
        for c in [2.0, 10.0] {
            let r = one_dim_hardy_check(&bump(c, 1.0), &spec()).unwrap();
            assert!(r.margin > 0.0);
        }
        assert_eq!(one_dim_hardy_check(&RadialTestFunction::zero(), &spec()).unwrap().margin, 0.0);
    }

    #[test]
    fn vhn_examples() {
        assert!(vhn_radial_hardy_terms(&h(5), &bump(2.0, 1.0), &spec()).unwrap().margin >= 0.0);
        let e6 = ManifoldModel::euclidean(6).unwrap();
        assert!(vhn_radial_hardy_terms(&e6, &bump(2.0, 1.0), &spec()).unwrap().margin >= 0.0);
        assert!(vhn_radial_hardy_terms(&h(4), &bump(2.0, 1.0), &spec()).is_err());
    }

    #[test]
    fn prototype_examples() {
        let tail = WarpingProfile::exp_tail(1.0, 1.0, 0.0, 1.0).unwrap();
        let m = ManifoldModel::new(3, tail).unwrap();
        let r = prototype_inequality_terms(&m, &bump(3.0, 1.0), Prototype::Proto, &spec()).unwrap();
        assert_eq!(r.term("poincare").unwrap().coefficient, 1.0);
        assert!(r.margin >= 0.0);
        assert!(matches!(
            prototype_inequality_terms(&m, &bump(1.5, 1.0), Prototype::Proto, &spec()),
            Err(Error::SupportInsideBall { .. })
        ));
        assert!(matches!(
            prototype_inequality_terms(&m, &bump(3.0, 1.0), Prototype::Gauss, &spec()),
            Err(Error::UnsupportedFamily(_))
        ));

        let flat = WarpingProfile::r_exp_tail(1.0, 1.0, -1.0, 1.0).unwrap();
        let m = ManifoldModel::new(4, flat).unwrap();
        let r = prototype_inequality_terms(&m, &bump(3.0, 1.0), Prototype::Proto2, &spec()).unwrap();
        assert_eq!(r.term("poincare").unwrap().coefficient, 0.0);
        assert_eq!(r.term("curvature").unwrap().coefficient, 0.0);
        assert_eq!(r.term("hardy").unwrap().coefficient, 1.0);
        assert!(r.margin >= 0.0);

        let g = ManifoldModel::new(4, WarpingProfile::gauss(1).unwrap()).unwrap();
        let r = prototype_inequality_terms(&g, &bump(2.0, 0.5), Prototype::Gauss, &spec()).unwrap();
        assert_eq!(r.terms.iter().filter(|t| t.side == Side::Rhs).count(), 3);
        assert!(r.margin >= 0.0);
    }

    #[test]
    fn prototype_matches_general_statement() {
        // with the exact curvature terms the corollaries are the first-order
        // inequality rearranged
        let m = ManifoldModel::new(5, WarpingProfile::r_exp_tail(1.5, 0.7, 0.5, 1.0).unwrap()).unwrap();
        let u = bump(2.5, 1.0);
        let a = prototype_inequality_terms(&m, &u, Prototype::Proto2, &spec()).unwrap();
        let b = first_order_terms(&m, &u, &spec()).unwrap();
        assert!((a.margin - b.margin).abs() < 1e-9 * a.lhs_total);
    }

    #[test]
    fn rescaling_flips_the_verdict() {
        let mut r = first_order_poincare_terms(&h(3), &bump(3.0, 1.0), &spec()).unwrap();
        assert!(r.passes());
        assert!(r.rescale_term("poincare", 10.0));
        assert!(!r.passes());
        assert!(!r.rescale_term("missing", 2.0));
    }

    #[test]
    fn csv_and_json_output() {
        let reports: Vec<_> = [2.0, 3.0]
            .iter()
            .map(|&c| first_order_terms(&h(3), &bump(c, 1.0), &spec()).unwrap())
            .collect();
        let mut buf = Vec::new();
        write_reports_csv(&reports, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("inequality_id,model,N,params,grad,lambda,hardy,psi,margin"));
        let json = reports[0].to_json();
        assert_eq!(json["inequality_id"], "first_order");
        assert!(json["term.grad"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn requirements() {
        assert!(check_requirements(InequalityId::Rellich, &h(4), None).is_err());
        assert!(check_requirements(InequalityId::Rellich, &h(5), None).is_ok());
        assert!(check_requirements(InequalityId::WeightedHardy, &h(6), Some(2.0)).is_err());
        assert!(check_requirements(InequalityId::ProtoGauss, &h(6), None).is_err());
        assert!(check_requirements(InequalityId::OneDimHardy, &h(3), None).is_ok());
    }
}
