//! Sectional curvatures, radial and modal Laplace–Beltrami operators, and
//! spectral data of the unit sphere.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::RadialFunction;
use crate::profiles::{Family, FamilyParams, WarpingProfile, MIN_POLE_RADIUS};

/// An N-dimensional model manifold `dr² + ψ(r)² dω²`, N ≥ 3.
#[derive(Clone, Debug)]
pub struct ManifoldModel {
    dim: usize,
    profile: WarpingProfile,
}

impl ManifoldModel {
    pub fn new(dim: usize, profile: WarpingProfile) -> Result<Self> {
        if dim < 3 {
            return Err(Error::Dimension {
                what: "a model manifold".into(),
                min: 3,
                got: dim,
            });
        }
        Ok(ManifoldModel { dim, profile })
    }

    pub fn hyperbolic(dim: usize) -> Result<Self> {
        Self::new(dim, WarpingProfile::hyperbolic())
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, WarpingProfile::euclidean())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &WarpingProfile {
        &self.profile
    }

    /// Errors unless N ≥ `min`.
    pub fn require_dim(&self, min: usize, what: &str) -> Result<()> {
        if self.dim < min {
            return Err(Error::Dimension {
                what: what.into(),
                min,
                got: self.dim,
            });
        }
        Ok(())
    }

    pub(crate) fn n(&self) -> f64 {
        self.dim as f64
    }

    /// Λ_rad = 2ψ″/ψ + (N−3)((ψ′)²−1)/ψ², evaluated from the stable ratios.
    pub(crate) fn lambda_rad_raw(&self, r: f64) -> f64 {
        2.0 * self.profile.second_ratio_raw(r) + (self.n() - 3.0) * self.profile.tangential_ratio_raw(r)
    }

    /// (K_rad, H_tan) from the stable ratios.
    pub(crate) fn curvatures_raw(&self, r: f64) -> (f64, f64) {
        (
            -self.profile.second_ratio_raw(r),
            -self.profile.tangential_ratio_raw(r),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub r: f64,
    pub k_rad: f64,
    pub h_tan: f64,
    pub lambda_rad: f64,
}

impl CurvatureSample {
    fn from_curvatures(r: f64, dim: usize, k_rad: f64, h_tan: f64) -> Self {
        CurvatureSample {
            r,
            k_rad,
            h_tan,
            lambda_rad: -2.0 * k_rad - (dim as f64 - 3.0) * h_tan,
        }
    }
}

/// Radial and tangential sectional curvatures and Λ_rad at `r`.
///
/// Uses K = −ψ″/ψ and H = −((ψ′)²−1)/ψ² from the raw evaluators while ψ is
/// representable, switching to overflow-free ratios otherwise and below
/// r = 1e-4, where the tangential quotient is 0/0. Global profiles refuse
/// r < 1e-6.
pub fn curvature_at(model: &ManifoldModel, r: f64) -> Result<CurvatureSample> {
    let profile = model.profile();
    profile.check_domain(r)?;
    if profile.is_global() && r < MIN_POLE_RADIUS {
        return Err(Error::TooCloseToPole(r));
    }
    let psi = profile.psi_raw(r);
    let dpsi = profile.psi_prime_raw(r);
    let ddpsi = profile.psi_second_raw(r);
    let raw_ok = r >= 1e-4 && (psi * psi).is_finite() && (dpsi * dpsi).is_finite() && ddpsi.is_finite() && psi > 0.0;
    let (k_rad, h_tan) = if raw_ok {
        (-ddpsi / psi, -(dpsi * dpsi - 1.0) / (psi * psi))
    } else {
        model.curvatures_raw(r)
    };
    Ok(CurvatureSample::from_curvatures(r, model.dim(), k_rad, h_tan))
}

/// Closed-form curvature expressions for the prototype families, evaluated
/// term by term (independent of the profile evaluators).
pub fn prototype_curvature_closed_form(
    family: Family,
    params: &FamilyParams,
    dim: usize,
    r: f64,
) -> Result<CurvatureSample> {
    let n = dim as f64;
    match family {
        Family::ExpTail | Family::RExpTail => {
            let a_amp = params.amplitude.ok_or_else(|| Error::InvalidParameter("missing A".into()))?;
            let b = params.rate.ok_or_else(|| Error::InvalidParameter("missing b".into()))?;
            let a = params.exponent.ok_or_else(|| Error::InvalidParameter("missing a".into()))?;
            let radius = params.radius.ok_or_else(|| Error::InvalidParameter("missing R".into()))?;
            if r < radius {
                return Err(Error::BelowValidFrom {
                    profile: family.to_string(),
                    valid_from: radius,
                    r,
                });
            }
            let lead = b * b * (a + 1.0) * (a + 1.0) * r.powf(2.0 * a);
            let decay = 1.0 / (a_amp * a_amp * (2.0 * b * r.powf(a + 1.0)).exp());
            if family == Family::ExpTail {
                let k = -lead - b * a * (a + 1.0) * r.powf(a - 1.0);
                let h = -lead + decay;
                let lambda = 2.0 * b * a * (a + 1.0) * r.powf(a - 1.0) + (n - 1.0) * lead - (n - 3.0) * decay;
                Ok(CurvatureSample { r, k_rad: k, h_tan: h, lambda_rad: lambda })
            } else {
                let k = -lead - b * (a + 1.0) * (a + 2.0) * r.powf(a - 1.0);
                let h = -lead - 2.0 * b * (a + 1.0) * r.powf(a - 1.0) - 1.0 / (r * r) + decay / (r * r);
                let lambda = 2.0 * b * (a + 1.0) * (n - 1.0 + a) * r.powf(a - 1.0)
                    + (n - 1.0) * lead
                    + (n - 3.0) / (r * r)
                    - (n - 3.0) * decay / (r * r);
                Ok(CurvatureSample { r, k_rad: k, h_tan: h, lambda_rad: lambda })
            }
        }
        Family::Gauss => {
            let m = params.order.ok_or_else(|| Error::InvalidParameter("missing m".into()))? as f64;
            let p2 = r.powf(4.0 * m - 2.0);
            let p1 = r.powf(2.0 * m - 2.0);
            let decay = 1.0 / (r * r * (2.0 * r.powf(2.0 * m)).exp());
            let k = -(2.0 * m).powi(2) * p2 - 2.0 * m * (2.0 * m + 1.0) * p1;
            let h = -(2.0 * m).powi(2) * p2 - 1.0 / (r * r) - 4.0 * m * p1 + decay;
            let lambda = (2.0 * m).powi(2) * (n - 1.0) * p2 + 4.0 * m * (n - 2.0 + 2.0 * m) * p1
                + (n - 3.0) / (r * r)
                - (n - 3.0) * decay;
            Ok(CurvatureSample { r, k_rad: k, h_tan: h, lambda_rad: lambda })
        }
        other => Err(Error::UnsupportedFamily(format!(
            "prototype closed forms ({other})"
        ))),
    }
}

/// Δ_r f = f″ + (N−1)(ψ′/ψ) f′.
pub fn radial_laplacian<F: RadialFunction + ?Sized>(model: &ManifoldModel, f: &F, r: f64) -> Result<f64> {
    model.profile().check_domain(r)?;
    Ok(radial_laplacian_raw(model, f, r))
}

pub(crate) fn radial_laplacian_raw<F: RadialFunction + ?Sized>(model: &ManifoldModel, f: &F, r: f64) -> f64 {
    let d1 = f.deriv1(r);
    let d2 = f.deriv2(r);
    if d1 == 0.0 {
        return d2;
    }
    d2 + (model.n() - 1.0) * model.profile().log_derivative_raw(r) * d1
}

/// Laplace–Beltrami operator on the n-th spherical-harmonic component:
/// Δ_r a − λₙ a/ψ².
pub fn modal_laplacian<F: RadialFunction + ?Sized>(model: &ManifoldModel, a: &F, n: usize, r: f64) -> Result<f64> {
    model.profile().check_domain(r)?;
    Ok(modal_laplacian_raw(model, a, n, r))
}

pub(crate) fn modal_laplacian_raw<F: RadialFunction + ?Sized>(model: &ManifoldModel, a: &F, n: usize, r: f64) -> f64 {
    let radial = radial_laplacian_raw(model, a, r);
    if n == 0 {
        return radial;
    }
    let value = a.value(r);
    if value == 0.0 {
        return radial;
    }
    let lambda = sphere_mode(n, model.dim()).lambda;
    radial - lambda * value * model.profile().inv_psi_sq_raw(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphereMode {
    pub n: usize,
    /// Eigenvalue n² + (N−2)n of −Δ on S^(N−1).
    pub lambda: f64,
    /// Dimension of the eigenspace.
    pub multiplicity: u128,
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn sphere_mode(n: usize, dim: usize) -> SphereMode {
    let (nf, d) = (n as f64, dim as f64);
    let multiplicity = match n {
        0 => 1,
        1 => dim as u128,
        _ => {
            let (n, dim) = (n as u64, dim as u64);
            binomial(dim + n - 1, n) - binomial(dim + n - 3, n - 2)
        }
    };
    SphereMode {
        n,
        lambda: nf * nf + (d - 2.0) * nf,
        multiplicity,
    }
}

/// Surface measure ω_N = 2π^(N/2)/Γ(N/2) of the unit sphere in ℝ^N.
pub fn sphere_area(dim: usize) -> f64 {
    assert!(dim >= 2, "sphere_area needs N >= 2");
    // Γ(N/2) by the recurrence Γ(x+1) = xΓ(x) from Γ(1) or Γ(1/2)
    let half = dim as f64 / 2.0;
    let (mut x, mut gamma) = if dim.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while x < half {
        gamma *= x;
        x += 1.0;
    }
    2.0 * PI.powf(half) / gamma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{RadialTestFunction, SampledFunction};
    use std::f64::consts::E;

    fn gauss_model(dim: usize) -> ManifoldModel {
        ManifoldModel::new(dim, WarpingProfile::gauss(1).unwrap()).unwrap()
    }

    #[test]
    fn dimension_guard() {
        assert!(ManifoldModel::hyperbolic(2).is_err());
        let m = ManifoldModel::hyperbolic(4).unwrap();
        assert!(m.require_dim(5, "rellich").is_err());
        assert!(m.require_dim(3, "first order").is_ok());
    }

    #[test]
    fn curvature_examples() {
        let s = curvature_at(&ManifoldModel::hyperbolic(4).unwrap(), 1.0).unwrap();
        assert!((s.k_rad + 1.0).abs() < 1e-14);
        assert!((s.h_tan + 1.0).abs() < 1e-14);
        assert!((s.lambda_rad - 3.0).abs() < 1e-13);

        let s = curvature_at(&ManifoldModel::euclidean(5).unwrap(), 2.0).unwrap();
        assert_eq!((s.k_rad, s.h_tan, s.lambda_rad), (0.0, 0.0, 0.0));

        let s = curvature_at(&gauss_model(3), 1.0).unwrap();
        assert!((s.k_rad + 10.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_refuses_pole_and_below_radius() {
        let m = ManifoldModel::hyperbolic(3).unwrap();
        assert!(matches!(curvature_at(&m, 1e-7), Err(Error::TooCloseToPole(_))));
        assert!(curvature_at(&m, 5e-5).is_ok());
        let tail = ManifoldModel::new(3, WarpingProfile::exp_tail(1.0, 1.0, 0.0, 2.0).unwrap()).unwrap();
        assert!(curvature_at(&tail, 1.0).is_err());
    }

    #[test]
    fn small_radius_uses_stable_branch() {
        let m = gauss_model(5);
        for r in [2e-6, 1e-5, 5e-5] {
            let s = curvature_at(&m, r).unwrap();
            let c = prototype_curvature_closed_form(Family::Gauss, &FamilyParams::gauss(1), 5, r).unwrap();
            assert!((s.k_rad - c.k_rad).abs() < 1e-8 * c.k_rad.abs().max(1.0));
            assert!((s.h_tan - c.h_tan).abs() < 1e-6 * c.h_tan.abs().max(1.0), "{r}: {s:?} {c:?}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let p = FamilyParams::tail(1.0, 1.0, 0.0, 1.0);
        let s = prototype_curvature_closed_form(Family::ExpTail, &p, 3, 2.0).unwrap();
        assert!((s.lambda_rad - 2.0).abs() < 1e-14);

        let s = prototype_curvature_closed_form(Family::Gauss, &FamilyParams::gauss(1), 5, 1.0).unwrap();
        let expected = 16.0 + 20.0 + 2.0 - 2.0 * E.powi(-2);
        assert!((s.lambda_rad - expected).abs() < 1e-12);

        let p = FamilyParams::tail(1.0, 1.0, -1.0, 0.5);
        for r in [0.5, 1.0, 7.0] {
            let s = prototype_curvature_closed_form(Family::RExpTail, &p, 4, r).unwrap();
            assert_eq!(s.k_rad, 0.0);
        }

        assert!(matches!(
            prototype_curvature_closed_form(Family::Hyperbolic, &FamilyParams::default(), 3, 1.0),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn closed_form_matches_evaluators() {
        let cases = [
            (Family::ExpTail, FamilyParams::tail(1.3, 0.8, 0.5, 1.0)),
            (Family::ExpTail, FamilyParams::tail(0.4, 1.7, 2.0, 0.5)),
            (Family::RExpTail, FamilyParams::tail(1.0, 1.0, 0.0, 1.0)),
            (Family::RExpTail, FamilyParams::tail(2.0, 0.5, 1.5, 2.0)),
            (Family::Gauss, FamilyParams::gauss(1)),
            (Family::Gauss, FamilyParams::gauss(2)),
        ];
        for (family, params) in cases {
            let profile = crate::profiles::make_builtin_profile(family, &params).unwrap();
            let start = profile.valid_from().max(0.2);
            for dim in [3, 5, 8] {
                let model = ManifoldModel::new(dim, profile.clone()).unwrap();
                for i in 0..12 {
                    let r = start + 0.17 * i as f64;
                    let a = curvature_at(&model, r).unwrap();
                    let b = prototype_curvature_closed_form(family, &params, dim, r).unwrap();
                    let rel = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
                    assert!(rel(a.k_rad, b.k_rad) < 1e-10, "{family} K at {r}");
                    assert!(rel(a.h_tan, b.h_tan) < 1e-10, "{family} H at {r}");
                    assert!(rel(a.lambda_rad, b.lambda_rad) < 1e-10, "{family} Λ at {r}");
                }
            }
        }
    }

    #[test]
    fn lambda_identity_recomputed() {
        let m = gauss_model(6);
        for i in 1..50 {
            let r = 0.05 * i as f64;
            let s = curvature_at(&m, r).unwrap();
            assert_eq!(s.lambda_rad, -2.0 * s.k_rad - 3.0 * s.h_tan);
        }
    }

    #[test]
    fn radial_laplacian_examples() {
        let e3 = ManifoldModel::euclidean(3).unwrap();
        let square = SampledFunction::new(|r| r * r);
        assert!((radial_laplacian(&e3, &square, 1.0).unwrap() - 6.0).abs() < 1e-6);

        let constant = SampledFunction::new(|_| 4.2);
        let h5 = ManifoldModel::hyperbolic(5).unwrap();
        assert_eq!(radial_laplacian(&h5, &constant, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn modal_laplacian_examples() {
        let e3 = ManifoldModel::euclidean(3).unwrap();
        let linear = SampledFunction::new(|r| r);
        assert!(modal_laplacian(&e3, &linear, 1, 1.0).unwrap().abs() < 1e-8);

        let h3 = ManifoldModel::hyperbolic(3).unwrap();
        let one = SampledFunction::new(|_| 1.0);
        let v = modal_laplacian(&h3, &one, 1, 1.0).unwrap();
        assert!((v + 2.0 / 1.0_f64.sinh().powi(2)).abs() < 1e-12);

        let bump = RadialTestFunction::bump(2.0, 1.0, 1.0).unwrap();
        for i in 1..40 {
            let r = 1.0 + 0.05 * i as f64;
            assert_eq!(
                modal_laplacian(&h3, &bump, 0, r).unwrap(),
                radial_laplacian(&h3, &bump, r).unwrap()
            );
        }
    }

    #[test]
    fn sphere_modes() {
        for dim in [3, 4, 7, 10] {
            let m1 = sphere_mode(1, dim);
            assert_eq!(m1.lambda, dim as f64 - 1.0);
            assert_eq!(m1.multiplicity, dim as u128);
            let m0 = sphere_mode(0, dim);
            assert_eq!((m0.lambda, m0.multiplicity), (0.0, 1));
            let mut last = -1.0;
            for n in 0..12 {
                let m = sphere_mode(n, dim);
                assert!(m.lambda > last);
                last = m.lambda;
            }
        }
        let m = sphere_mode(2, 3);
        assert_eq!((m.lambda, m.multiplicity), (6.0, 5));
        // in ℝ³ the n-th eigenspace has dimension 2n+1
        for n in 2..10 {
            assert_eq!(sphere_mode(n, 3).multiplicity, 2 * n as u128 + 1);
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }
}
