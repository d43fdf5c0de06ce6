//! Globally adaptive Gauss–Kronrod (7/15) integration of radial integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;

/// Lower cut used when a support touches the pole.
pub const POLE_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PanelRule {
    /// 7-point Gauss embedded in the 15-point Kronrod rule.
    #[default]
    GaussKronrod15,
}

impl PanelRule {
    pub fn order(&self) -> usize {
        match self {
            PanelRule::GaussKronrod15 => 15,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    #[serde(default)]
    pub panel_rule: PanelRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 4096,
            panel_rule: PanelRule::GaussKronrod15,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions < 64 {
            return Err(Error::InvalidParameter(format!(
                "max_subdivisions must be >= 64, got {}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// An integral value with its accumulated error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub subdivisions: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        error: 0.0,
        converged: true,
        subdivisions: 0,
    };

    pub fn scaled(self, c: f64) -> Estimate {
        Estimate {
            value: c * self.value,
            error: c.abs() * self.error,
            ..self
        }
    }
}

impl Add for Estimate {
    type Output = Estimate;

    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            converged: self.converged && rhs.converged,
            subdivisions: self.subdivisions + rhs.subdivisions,
        }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Estimate {
        iter.fold(Estimate::ZERO, |acc, e| acc + e)
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if fc.is_nan() {
        return Err(Error::NanIntegrand(center));
    }
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, &x) in XGK.iter().take(7).enumerate() {
        let dx = half * x;
        let (r1, r2) = (center - dx, center + dx);
        let f1 = f(r1);
        let f2 = f(r2);
        if f1.is_nan() {
            return Err(Error::NanIntegrand(r1));
        }
        if f2.is_nan() {
            return Err(Error::NanIntegrand(r2));
        }
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        res_asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over consecutive intervals delimited by `points`
/// (sorted, at least two). Interior points are treated as known kinks.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod_panel(&f, w[0], w[1])?);
        }
    }
    if heap.is_empty() {
        return Ok(Estimate::ZERO);
    }
    let mut subdivisions = heap.len();
    let mut value: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    let mut converged = true;
    loop {
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            converged = false;
            break;
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // interval exhausted at machine resolution
            heap.push(worst);
            converged = false;
            break;
        }
        let left = kronrod_panel(&f, worst.a, mid)?;
        let right = kronrod_panel(&f, mid, worst.b)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    // resum to shed the running-update drift
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate {
        value,
        error,
        converged,
        subdivisions,
    })
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    integrate_pieces(f, &[a, b], spec)
}

/// ∫ₐ^∞ f via the substitution r = a/t, t ∈ (0, 1]. Requires a > 0 and
/// polynomial decay of f.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "semi-infinite integration needs a > 0, got {a}"
        )));
    }
    integrate(
        |t| {
            let r = a / t;
            let v = f(r);
            if v == 0.0 {
                0.0
            } else {
                v * a / (t * t)
            }
        },
        0.0,
        1.0,
        spec,
    )
}

/// ∫ g(r)·ψ(r)^(N−1) dr over `support`, with kinks of `g` at `breaks`.
/// A support starting at the pole is cut at [`POLE_EPSILON`].
pub fn integrate_weighted<G: Fn(f64) -> f64>(
    model: &ManifoldModel,
    integrand: G,
    support: (f64, f64),
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let profile = model.profile();
    let lo = support.0.max(POLE_EPSILON);
    let hi = support.1;
    if hi <= lo {
        return Ok(Estimate::ZERO);
    }
    profile.check_domain(lo)?;
    let power = model.dim() as f64 - 1.0;
    let mut points = vec![lo];
    points.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    points.push(hi);
    points.sort_by(f64::total_cmp);
    integrate_pieces(
        |r| {
            let g = integrand(r);
            if g == 0.0 {
                0.0
            } else {
                g * profile.psi_pow_raw(r, power)
            }
        },
        &points,
        spec,
    )
}

/// Central-difference derivative of order 1 or 2.
///
/// Steps are h = max(1e-5, 1e-5·r) for the first derivative and
/// h = max(1e-4, 1e-4·r) for the second.
pub fn differentiate<F: Fn(f64) -> f64>(f: F, r: f64, order: u8) -> f64 {
    match order {
        1 => {
            let h = (1e-5 * r.abs()).max(1e-5);
            (f(r + h) - f(r - h)) / (2.0 * h)
        }
        2 => {
            let h = (1e-4 * r.abs()).max(1e-4);
            (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h)
        }
        _ => panic!("differentiate supports order 1 or 2, got {order}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::WarpingProfile;

    #[test]
    fn quadrature_settings_are_validated() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let s = QuadratureSpec { max_subdivisions: 10, ..Default::default() };
        assert!(s.validate().is_err());
        assert!(QuadratureSpec::default().with_rel_tol(0.0).validate().is_err());
        assert_eq!(PanelRule::GaussKronrod15.order(), 15);
    }

    #[test]
    fn polynomial_weight_euclidean() {
        let m = ManifoldModel::new(3, WarpingProfile::euclidean()).unwrap();
        let est = integrate_weighted(&m, |_| 1.0, (0.0, 1.0), &[], &QuadratureSpec::default()).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 1e-10);
        assert!(est.converged);
    }

    #[test]
    fn weight_cancels_on_hyperbolic() {
        let m = ManifoldModel::new(3, WarpingProfile::hyperbolic()).unwrap();
        let est = integrate_weighted(
            &m,
            |r| 1.0 / r.sinh().powi(2),
            (1.0, 2.0),
            &[],
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_integrand() {
        let m = ManifoldModel::new(4, WarpingProfile::hyperbolic()).unwrap();
        let est = integrate_weighted(&m, |_| 0.0, (0.5, 3.0), &[], &QuadratureSpec::default()).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn nan_is_reported() {
        let err = integrate(|r| if r > 0.5 { f64::NAN } else { r }, 0.0, 1.0, &QuadratureSpec::default());
        assert!(matches!(err, Err(Error::NanIntegrand(_))));
    }

    #[test]
    fn non_convergence_is_flagged() {
        let spec = QuadratureSpec {
            rel_tol: 1e-15,
            abs_tol: 1e-300,
            max_subdivisions: 64,
            panel_rule: PanelRule::GaussKronrod15,
        };
        let est = integrate(|r: f64| (50.0 / r).sin() / r.sqrt(), 1e-6, 1.0, &spec).unwrap();
        assert!(!est.converged);
        assert!(est.value.is_finite());
    }

    #[test]
    fn semi_infinite_tail() {
        let est = integrate_to_infinity(|r| r.powi(-4), 2.0, &QuadratureSpec::default()).unwrap();
        assert!((est.value - 1.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn singular_looking_integrand_near_pole() {
        // √r is not smooth at 0 but integrable; adaptivity must cope
        let est = integrate(|r: f64| r.sqrt(), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn finite_differences() {
        assert!((differentiate(|r| r * r, 3.0, 1) - 6.0).abs() < 1e-8);
        assert!((differentiate(f64::sin, 0.5, 2) + 0.5_f64.sin()).abs() < 1e-5);
        assert_eq!(differentiate(|_| 2.5, 1.7, 1), 0.0);
        assert_eq!(differentiate(|_| 2.5, 1.7, 2), 0.0);
    }
}
