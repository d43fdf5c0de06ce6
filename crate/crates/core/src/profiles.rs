//! Warping functions ψ for rotationally symmetric model manifolds
//! `dr² + ψ(r)² dω²`, together with validators for the structural
//! conditions at the pole and the curvature conditions used by the
//! inequalities.
//!
//! Builtin families carry closed-form derivatives. Besides the raw
//! evaluators (`psi`, `psi_prime`, `psi_second`), every profile exposes
//! overflow-free ratios (`log_derivative` = ψ′/ψ, `second_ratio` = ψ″/ψ,
//! `tangential_ratio` = ((ψ′)² − 1)/ψ²) and `ln_psi`, which is what the
//! integrators use far from the pole where ψ itself overflows.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::differentiate;

/// Smallest radius accepted by the pole-limit checks and curvature samples
/// of global families.
pub const MIN_POLE_RADIUS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Euclidean,
    Hyperbolic,
    /// `A·exp(b·r^(a+1))` for r ≥ R.
    ExpTail,
    /// `A·r·exp(b·r^(a+1))` for r ≥ R.
    RExpTail,
    /// `r·exp(r^(2m))`.
    Gauss,
    Custom,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Euclidean => "euclidean",
            Family::Hyperbolic => "hyperbolic",
            Family::ExpTail => "exp_tail",
            Family::RExpTail => "r_exp_tail",
            Family::Gauss => "gauss",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Family parameters as they appear in JSON: `{"A":.., "b":.., "a":.., "R":.., "m":..}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(rename = "b", default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(rename = "a", default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(rename = "m", default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

impl FamilyParams {
    pub fn tail(amplitude: f64, rate: f64, exponent: f64, radius: f64) -> Self {
        FamilyParams {
            amplitude: Some(amplitude),
            rate: Some(rate),
            exponent: Some(exponent),
            radius: Some(radius),
            order: None,
        }
    }

    pub fn gauss(order: u32) -> Self {
        FamilyParams {
            order: Some(order),
            ..Default::default()
        }
    }

    fn is_empty(&self) -> bool {
        *self == FamilyParams::default()
    }
}

/// JSON form of a profile: `{"family": "...", "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub family: Family,
    #[serde(default)]
    pub params: FamilyParams,
}

/// Asserted large-r behaviour ψ′/ψ ~ C·r^a.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Asymptotic {
    pub c: f64,
    pub a: f64,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Euclidean,
    Hyperbolic,
    ExpTail { amp: f64, rate: f64, exp: f64, radius: f64 },
    RExpTail { amp: f64, rate: f64, exp: f64, radius: f64 },
    Gauss { m: u32 },
    Custom { psi: ScalarFn, valid_from: f64 },
}

#[derive(Clone)]
pub struct WarpingProfile {
    name: String,
    shape: Shape,
    asymptotic: Option<Asymptotic>,
}

impl fmt::Debug for WarpingProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpingProfile")
            .field("name", &self.name)
            .field("family", &self.family())
            .field("params", &self.params())
            .field("valid_from", &self.valid_from())
            .field("asymptotic", &self.asymptotic)
            .finish()
    }
}

fn require_positive(value: Option<f64>, key: &str, family: Family) -> Result<f64> {
    match value {
        Some(v) if v.is_finite() && v > 0.0 => Ok(v),
        Some(v) => Err(Error::InvalidParameter(format!(
            "{family}: `{key}` must be > 0, got {v}"
        ))),
        None => Err(Error::InvalidParameter(format!(
            "{family}: missing parameter `{key}`"
        ))),
    }
}

fn tail_params(params: &FamilyParams, family: Family) -> Result<(f64, f64, f64, f64)> {
    if params.order.is_some() {
        return Err(Error::InvalidParameter(format!(
            "{family}: parameter `m` does not apply"
        )));
    }
    let amp = require_positive(params.amplitude, "A", family)?;
    let rate = require_positive(params.rate, "b", family)?;
    let radius = require_positive(params.radius, "R", family)?;
    let exp = match params.exponent {
        Some(a) if a.is_finite() && a >= -1.0 => a,
        Some(a) => {
            return Err(Error::InvalidParameter(format!(
                "{family}: `a` must be >= -1, got {a}"
            )))
        }
        None => {
            return Err(Error::InvalidParameter(format!(
                "{family}: missing parameter `a`"
            )))
        }
    };
    Ok((amp, rate, exp, radius))
}

/// Builds one of the builtin families.
pub fn make_builtin_profile(family: Family, params: &FamilyParams) -> Result<WarpingProfile> {
    let (shape, asymptotic, name) = match family {
        Family::Euclidean | Family::Hyperbolic => {
            if !params.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "{family} takes no parameters"
                )));
            }
            if family == Family::Euclidean {
                (Shape::Euclidean, None, "euclidean".to_string())
            } else {
                (
                    Shape::Hyperbolic,
                    Some(Asymptotic { c: 1.0, a: 0.0 }),
                    "hyperbolic".to_string(),
                )
            }
        }
        Family::ExpTail | Family::RExpTail => {
            let (amp, rate, exp, radius) = tail_params(params, family)?;
            let asymptotic = (exp >= 0.0).then_some(Asymptotic {
                c: rate * (exp + 1.0),
                a: exp,
            });
            let name = format!("{family}(A={amp},b={rate},a={exp},R={radius})");
            let shape = if family == Family::ExpTail {
                Shape::ExpTail { amp, rate, exp, radius }
            } else {
                Shape::RExpTail { amp, rate, exp, radius }
            };
            (shape, asymptotic, name)
        }
        Family::Gauss => {
            let m = match params.order {
                Some(m) if m >= 1 => m,
                Some(m) => {
                    return Err(Error::InvalidParameter(format!(
                        "gauss: `m` must be >= 1, got {m}"
                    )))
                }
                None => return Err(Error::InvalidParameter("gauss: missing parameter `m`".into())),
            };
            if params.amplitude.is_some()
                || params.rate.is_some()
                || params.exponent.is_some()
                || params.radius.is_some()
            {
                return Err(Error::InvalidParameter(
                    "gauss takes only the parameter `m`".into(),
                ));
            }
            let mf = m as f64;
            (
                Shape::Gauss { m },
                Some(Asymptotic {
                    c: 2.0 * mf,
                    a: 2.0 * mf - 1.0,
                }),
                format!("gauss(m={m})"),
            )
        }
        Family::Custom => {
            return Err(Error::InvalidParameter(
                "custom profiles are built with WarpingProfile::custom".into(),
            ))
        }
    };
    Ok(WarpingProfile { name, shape, asymptotic })
}

impl WarpingProfile {
    pub fn euclidean() -> Self {
        make_builtin_profile(Family::Euclidean, &FamilyParams::default()).unwrap()
    }

    pub fn hyperbolic() -> Self {
        make_builtin_profile(Family::Hyperbolic, &FamilyParams::default()).unwrap()
    }

    pub fn gauss(m: u32) -> Result<Self> {
        make_builtin_profile(Family::Gauss, &FamilyParams::gauss(m))
    }

    pub fn exp_tail(amplitude: f64, rate: f64, exponent: f64, radius: f64) -> Result<Self> {
        make_builtin_profile(
            Family::ExpTail,
            &FamilyParams::tail(amplitude, rate, exponent, radius),
        )
    }

    pub fn r_exp_tail(amplitude: f64, rate: f64, exponent: f64, radius: f64) -> Result<Self> {
        make_builtin_profile(
            Family::RExpTail,
            &FamilyParams::tail(amplitude, rate, exponent, radius),
        )
    }

    /// A user-supplied ψ. Derivatives fall back to central differences.
    pub fn custom<F>(name: impl Into<String>, psi: F, valid_from: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(valid_from >= 0.0 && valid_from.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "custom: valid_from must be a finite non-negative number, got {valid_from}"
            )));
        }
        Ok(WarpingProfile {
            name: name.into(),
            shape: Shape::Custom {
                psi: Arc::new(psi),
                valid_from,
            },
            asymptotic: None,
        })
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<Self> {
        make_builtin_profile(spec.family, &spec.params)
    }

    pub fn with_asymptotic(mut self, asymptotic: Asymptotic) -> Self {
        self.asymptotic = Some(asymptotic);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        match self.shape {
            Shape::Euclidean => Family::Euclidean,
            Shape::Hyperbolic => Family::Hyperbolic,
            Shape::ExpTail { .. } => Family::ExpTail,
            Shape::RExpTail { .. } => Family::RExpTail,
            Shape::Gauss { .. } => Family::Gauss,
            Shape::Custom { .. } => Family::Custom,
        }
    }

    pub fn params(&self) -> FamilyParams {
        match self.shape {
            Shape::ExpTail { amp, rate, exp, radius } | Shape::RExpTail { amp, rate, exp, radius } => {
                FamilyParams::tail(amp, rate, exp, radius)
            }
            Shape::Gauss { m } => FamilyParams::gauss(m),
            _ => FamilyParams::default(),
        }
    }

    pub fn asymptotic(&self) -> Option<Asymptotic> {
        self.asymptotic
    }

    /// Radius below which the profile is undefined (0 for global families).
    pub fn valid_from(&self) -> f64 {
        match self.shape {
            Shape::ExpTail { radius, .. } | Shape::RExpTail { radius, .. } => radius,
            Shape::Custom { valid_from, .. } => valid_from,
            _ => 0.0,
        }
    }

    pub fn is_global(&self) -> bool {
        self.valid_from() == 0.0
    }

    /// True when derivatives are obtained by finite differences.
    pub fn has_numerical_derivatives(&self) -> bool {
        matches!(self.shape, Shape::Custom { .. })
    }

    pub fn check_domain(&self, r: f64) -> Result<()> {
        let valid_from = self.valid_from();
        if !(r.is_finite() && r > 0.0 && r >= valid_from) {
            return Err(Error::BelowValidFrom {
                profile: self.name.clone(),
                valid_from,
                r,
            });
        }
        Ok(())
    }

    pub fn psi(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.psi_raw(r))
    }

    pub fn psi_prime(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.psi_prime_raw(r))
    }

    pub fn psi_second(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.psi_second_raw(r))
    }

    pub fn ln_psi(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.ln_psi_raw(r))
    }

    /// ψ′/ψ.
    pub fn log_derivative(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.log_derivative_raw(r))
    }

    /// ψ″/ψ, i.e. −K_rad.
    pub fn second_ratio(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.second_ratio_raw(r))
    }

    /// ((ψ′)² − 1)/ψ², i.e. −H_tan.
    pub fn tangential_ratio(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.tangential_ratio_raw(r))
    }

    // Unchecked evaluators. Callers validate the domain once per support.

    pub(crate) fn psi_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => r,
            Shape::Hyperbolic => r.sinh(),
            Shape::ExpTail { amp, rate, exp, .. } => amp * (rate * r.powf(exp + 1.0)).exp(),
            Shape::RExpTail { amp, rate, exp, .. } => amp * r * (rate * r.powf(exp + 1.0)).exp(),
            Shape::Gauss { m } => r * r.powi(2 * *m as i32).exp(),
            Shape::Custom { psi, .. } => psi(r),
        }
    }

    pub(crate) fn psi_prime_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => 1.0,
            Shape::Hyperbolic => r.cosh(),
            Shape::ExpTail { amp, rate, exp, .. } => {
                let e = (rate * r.powf(exp + 1.0)).exp();
                amp * e * rate * (exp + 1.0) * r.powf(*exp)
            }
            Shape::RExpTail { amp, rate, exp, .. } => {
                let e = (rate * r.powf(exp + 1.0)).exp();
                let de = e * rate * (exp + 1.0) * r.powf(*exp);
                amp * (e + r * de)
            }
            Shape::Gauss { m } => {
                let p = r.powi(2 * *m as i32);
                p.exp() * (1.0 + 2.0 * *m as f64 * p)
            }
            Shape::Custom { psi, .. } => differentiate(|x| psi(x), r, 1),
        }
    }

    pub(crate) fn psi_second_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => 0.0,
            Shape::Hyperbolic => r.sinh(),
            Shape::ExpTail { amp, rate, exp, .. } => {
                let k = rate * (exp + 1.0);
                let e = (rate * r.powf(exp + 1.0)).exp();
                amp * e * (k * k * r.powf(2.0 * exp) + k * exp * r.powf(exp - 1.0))
            }
            Shape::RExpTail { amp, rate, exp, .. } => {
                let k = rate * (exp + 1.0);
                let e = (rate * r.powf(exp + 1.0)).exp();
                let de = e * k * r.powf(*exp);
                let dde = e * (k * k * r.powf(2.0 * exp) + k * exp * r.powf(exp - 1.0));
                amp * (2.0 * de + r * dde)
            }
            Shape::Gauss { m } => {
                let mf = *m as f64;
                let p = r.powi(2 * *m as i32);
                p.exp() * 2.0 * mf * r.powi(2 * *m as i32 - 1) * (1.0 + 2.0 * mf + 2.0 * mf * p)
            }
            Shape::Custom { psi, .. } => differentiate(|x| psi(x), r, 2),
        }
    }

    pub(crate) fn ln_psi_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => r.ln(),
            Shape::Hyperbolic => ln_sinh(r),
            Shape::ExpTail { amp, rate, exp, .. } => amp.ln() + rate * r.powf(exp + 1.0),
            Shape::RExpTail { amp, rate, exp, .. } => amp.ln() + r.ln() + rate * r.powf(exp + 1.0),
            Shape::Gauss { m } => r.ln() + r.powi(2 * *m as i32),
            Shape::Custom { psi, .. } => psi(r).ln(),
        }
    }

    pub(crate) fn log_derivative_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => 1.0 / r,
            Shape::Hyperbolic => 1.0 / r.tanh(),
            Shape::ExpTail { rate, exp, .. } => rate * (exp + 1.0) * r.powf(*exp),
            Shape::RExpTail { rate, exp, .. } => 1.0 / r + rate * (exp + 1.0) * r.powf(*exp),
            Shape::Gauss { m } => {
                1.0 / r + 2.0 * *m as f64 * r.powi(2 * *m as i32 - 1)
            }
            Shape::Custom { .. } => self.psi_prime_raw(r) / self.psi_raw(r),
        }
    }

    pub(crate) fn second_ratio_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => 0.0,
            Shape::Hyperbolic => 1.0,
            Shape::ExpTail { rate, exp, .. } => {
                let k = rate * (exp + 1.0);
                k * k * r.powf(2.0 * exp) + k * exp * r.powf(exp - 1.0)
            }
            Shape::RExpTail { rate, exp, .. } => {
                let k = rate * (exp + 1.0);
                k * k * r.powf(2.0 * exp) + k * (exp + 2.0) * r.powf(exp - 1.0)
            }
            Shape::Gauss { m } => {
                let mf = *m as f64;
                let p = r.powi(2 * *m as i32);
                2.0 * mf * r.powi(2 * *m as i32 - 2) * (1.0 + 2.0 * mf + 2.0 * mf * p)
            }
            Shape::Custom { .. } => self.psi_second_raw(r) / self.psi_raw(r),
        }
    }

    /// (ln ψ)″ = ψ″/ψ − (ψ′/ψ)², without the cancellation of that difference.
    pub(crate) fn log_second_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => -1.0 / (r * r),
            Shape::Hyperbolic => -self.inv_psi_sq_raw(r),
            Shape::ExpTail { rate, exp, .. } => rate * (exp + 1.0) * exp * r.powf(exp - 1.0),
            Shape::RExpTail { rate, exp, .. } => -1.0 / (r * r) + rate * (exp + 1.0) * exp * r.powf(exp - 1.0),
            Shape::Gauss { m } => {
                let mf = *m as f64;
                -1.0 / (r * r) + 2.0 * mf * (2.0 * mf - 1.0) * r.powi(2 * *m as i32 - 2)
            }
            Shape::Custom { .. } => {
                let l = self.log_derivative_raw(r);
                self.second_ratio_raw(r) - l * l
            }
        }
    }

    /// 1/ψ², computed in log space so it underflows to 0 instead of
    /// producing inf/inf.
    pub(crate) fn inv_psi_sq_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => 1.0 / (r * r),
            Shape::Hyperbolic => {
                let s = r.sinh();
                if s.is_finite() {
                    1.0 / (s * s)
                } else {
                    0.0
                }
            }
            _ => (-2.0 * self.ln_psi_raw(r)).exp(),
        }
    }

    pub(crate) fn tangential_ratio_raw(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Euclidean => 0.0,
            Shape::Hyperbolic => 1.0,
            Shape::Gauss { m } if r < 1.0 => {
                // ψ′ − 1 without cancellation near the pole
                let mf = *m as f64;
                let p = r.powi(2 * *m as i32);
                let excess = p.exp_m1() * (1.0 + 2.0 * mf * p) + 2.0 * mf * p;
                let psi = r * p.exp();
                excess * (excess + 2.0) / (psi * psi)
            }
            _ => {
                let l = self.log_derivative_raw(r);
                l * l - self.inv_psi_sq_raw(r)
            }
        }
    }

    /// ψ(r)^p in log space.
    pub(crate) fn psi_pow_raw(&self, r: f64, p: f64) -> f64 {
        if p == 0.0 {
            return 1.0;
        }
        (p * self.ln_psi_raw(r)).exp()
    }
}

/// ln(sinh r) without overflow for large r.
pub fn ln_sinh(r: f64) -> f64 {
    if r > 1.0 {
        r + (-(-2.0 * r).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        r.sinh().ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub estimate: f64,
    pub target: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub profile: String,
    pub checks: Vec<Check>,
    /// Set for custom profiles whose derivatives come from finite differences.
    pub numerical_derivatives: bool,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Quadratic (Neville) extrapolation of samples `(r, f(r))` to r = 0.
fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len();
    let mut p: Vec<f64> = samples.iter().map(|s| s.1).collect();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (samples[i].0, samples[i + level].0);
            p[i] = (xi * p[i + 1] - xj * p[i]) / (xi - xj);
        }
    }
    p[0]
}

/// Checks ψ(0⁺) = 0, ψ′(0⁺) = 1 and ψ″(0⁺) = 0 by extrapolating samples at
/// r ∈ {1e-3, 1e-4, 1e-5}.
pub fn validate_psi_conditions(profile: &WarpingProfile, tol: f64) -> Result<ValidationReport> {
    if !profile.is_global() {
        return Err(Error::TailFamily("pole conditions".into()));
    }
    let radii = [1e-3, 1e-4, 1e-5];
    let limit = |f: &dyn Fn(f64) -> f64| {
        let samples: Vec<(f64, f64)> = radii.iter().map(|&r| (r, f(r))).collect();
        extrapolate_to_zero(&samples)
    };
    let checks = [
        ("psi(0+) = 0", limit(&|r| profile.psi_raw(r)), 0.0),
        ("psi'(0+) = 1", limit(&|r| profile.psi_prime_raw(r)), 1.0),
        ("psi''(0+) = 0", limit(&|r| profile.psi_second_raw(r)), 0.0),
    ]
    .into_iter()
    .map(|(name, estimate, target)| Check {
        name: name.to_string(),
        estimate,
        target,
        passed: (estimate - target).abs() <= tol,
    })
    .collect();
    Ok(ValidationReport {
        profile: profile.name().to_string(),
        checks,
        numerical_derivatives: profile.has_numerical_derivatives(),
    })
}

/// Outcome of a pointwise condition checked at sample radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    /// False when a precondition failed; `holds` is then meaningless.
    pub applicable: bool,
    pub holds: bool,
    /// Smallest margin over the samples (≥ 0 where the condition holds).
    pub worst_margin: f64,
    pub worst_radius: f64,
}

fn scan<F>(condition: &str, profile: &WarpingProfile, radii: &[f64], margin: F) -> Result<ConditionReport>
where
    F: Fn(f64) -> (f64, f64),
{
    let mut worst = (f64::INFINITY, f64::NAN);
    let mut holds = true;
    for &r in radii {
        profile.check_domain(r)?;
        let (m, scale) = margin(r);
        if m < -1e-12 * scale.max(1.0) || m.is_nan() {
            holds = false;
        }
        if m < worst.0 || worst.1.is_nan() {
            worst = (m, r);
        }
    }
    Ok(ConditionReport {
        condition: condition.to_string(),
        applicable: true,
        holds,
        worst_margin: worst.0,
        worst_radius: worst.1,
    })
}

/// K_rad ≤ −1, i.e. ψ″/ψ ≥ 1, at every sample.
pub fn check_curvature_bound(profile: &WarpingProfile, radii: &[f64]) -> Result<ConditionReport> {
    scan("K_rad <= -1", profile, radii, |r| {
        let s = profile.second_ratio_raw(r);
        (s - 1.0, s.abs())
    })
}

/// K_rad ≥ H_tan at every sample.
pub fn check_con3(profile: &WarpingProfile, radii: &[f64]) -> Result<ConditionReport> {
    scan("K_rad >= H_tan", profile, radii, |r| {
        let s = profile.second_ratio_raw(r);
        let t = profile.tangential_ratio_raw(r);
        (t - s, s.abs().max(t.abs()))
    })
}

/// ψ′/ψ ≥ coth r and ψ ≥ sinh r. Not applicable unless the curvature
/// bound holds on the same radii.
pub fn check_sturm(profile: &WarpingProfile, radii: &[f64]) -> Result<ConditionReport> {
    let bound = check_curvature_bound(profile, radii)?;
    if !bound.holds {
        return Ok(ConditionReport {
            condition: "psi'/psi >= coth r and psi >= sinh r".into(),
            applicable: false,
            holds: false,
            worst_margin: f64::NAN,
            worst_radius: bound.worst_radius,
        });
    }
    scan(
        "psi'/psi >= coth r and psi >= sinh r",
        profile,
        radii,
        |r| {
            let coth = 1.0 / r.tanh();
            let log_ratio = profile.log_derivative_raw(r) / coth - 1.0;
            let ln_gap = profile.ln_psi_raw(r) - ln_sinh(r);
            (log_ratio.min(ln_gap), 1.0 + ln_sinh(r).abs())
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub c: f64,
    pub a: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// Agreement with the profile's declared asymptotics within 5%, if declared.
    pub cross_check: Option<bool>,
}

/// Least-squares fit of ln(ψ′/ψ) against ln r over 64 log-spaced samples.
pub fn estimate_asymptotic_exponent(profile: &WarpingProfile, window: (f64, f64)) -> Result<AsymptoticFit> {
    let (lo, hi) = window;
    if !(hi > lo && lo > profile.valid_from() && lo > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "fit window [{lo}, {hi}] must satisfy valid_from < r_lo < r_hi"
        )));
    }
    const SAMPLES: usize = 64;
    let step = (hi / lo).ln() / (SAMPLES - 1) as f64;
    let mut xs = Vec::with_capacity(SAMPLES);
    let mut ys = Vec::with_capacity(SAMPLES);
    let mut ratios = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let r = lo * (step * i as f64).exp();
        let ratio = profile.log_derivative_raw(r);
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::DegenerateFit(format!("psi'/psi = {ratio} at r = {r}")));
        }
        xs.push(r.ln());
        ys.push(ratio.ln());
        ratios.push(ratio);
    }
    let increasing = ratios.windows(2).all(|w| w[1] >= w[0]);
    let decreasing = ratios.windows(2).all(|w| w[1] <= w[0]);
    if !(increasing || decreasing) {
        return Err(Error::DegenerateFit("psi'/psi is not monotone on the window".into()));
    }
    let (intercept, slope, residual) = linear_least_squares(&xs, &ys)?;
    let c = intercept.exp();
    let cross_check = profile.asymptotic().map(|decl| {
        let close = |fit: f64, reference: f64| (fit - reference).abs() <= 0.05 * reference.abs().max(1.0);
        close(c, decl.c) && close(slope, decl.a)
    });
    Ok(AsymptoticFit {
        c,
        a: slope,
        residual,
        cross_check,
    })
}

/// Ordinary least squares for y ≈ c0 + c1·x; returns (c0, c1, rms residual).
pub(crate) fn linear_least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    Ok((intercept, slope, (rss / n).sqrt()))
}
