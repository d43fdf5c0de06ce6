//! Optimality experiments: the explicit ground state, the cut-off minimizing
//! sequence with its closed-form integrals, and a finite-difference spectral
//! estimate of best constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{curvature_at, sphere_area, ManifoldModel};
use crate::profiles::{check_curvature_bound, linear_least_squares};
use crate::quadrature::{integrate_pieces, integrate_to_infinity, Estimate, QuadratureSpec};

/// (u₀, u₀′/u₀, (u₀′/u₀)′) for u₀ = r^(1/2) ψ^(−(N−1)/2), from the stable ratios.
pub fn ground_state_log_derivatives(model: &ManifoldModel, r: f64) -> (f64, f64, f64) {
    let p = model.profile();
    let k = 0.5 * (model.dim() as f64 - 1.0);
    let u0 = (0.5 * r.ln() - k * p.ln_psi_raw(r)).exp();
    let l = p.log_derivative_raw(r);
    let g = 0.5 / r - k * l;
    let dg = -0.5 / (r * r) - k * (p.second_ratio_raw(r) - l * l);
    (u0, g, dg)
}

/// u₀(r) = r^(1/2)/ψ(r)^((N−1)/2).
pub fn ground_state(model: &ManifoldModel, r: f64) -> Result<f64> {
    positive_radius(model, r)?;
    Ok(ground_state_log_derivatives(model, r).0)
}

/// (u₀, u₀′, u₀″).
pub fn ground_state_derivatives(model: &ManifoldModel, r: f64) -> Result<(f64, f64, f64)> {
    positive_radius(model, r)?;
    let (u0, g, dg) = ground_state_log_derivatives(model, r);
    Ok((u0, u0 * g, u0 * (g * g + dg)))
}

fn positive_radius(model: &ManifoldModel, r: f64) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    model.profile().check_domain(r)
}

/// −Δ_r u₀ − (N−1)/4·Λ·u₀ − u₀/(4r²) − (N−1)(N−3)/4·u₀/ψ².
///
/// Derivatives of u₀ come from ψ, ψ′, ψ″ directly while these are finite,
/// and from the overflow-free ratios beyond.
pub fn ground_state_residual(model: &ManifoldModel, r: f64) -> Result<f64> {
    positive_radius(model, r)?;
    let n = model.dim() as f64;
    let p = model.profile();
    let (psi, dpsi, ddpsi) = (p.psi_raw(r), p.psi_prime_raw(r), p.psi_second_raw(r));
    let lambda = curvature_at(model, r.max(crate::profiles::MIN_POLE_RADIUS))?.lambda_rad;
    let k = 0.5 * (n - 1.0);
    let raw_ok = psi.is_finite() && dpsi.is_finite() && ddpsi.is_finite() && psi.powf(k).is_finite() && psi.powf(k) > 0.0 && (psi * psi).is_finite();
    let (u0, d1, d2, l, inv_sq) = if raw_ok {
        let u0 = r.sqrt() / psi.powf(k);
        // u₀′ = u₀ g with g = 1/(2r) − k ψ′/ψ, u₀″ = u₀ (g² + g′)
        let g = 0.5 / r - k * dpsi / psi;
        let dg = -0.5 / (r * r) - k * (ddpsi / psi - (dpsi / psi).powi(2));
        let (d1, d2) = (u0 * g, u0 * (g * g + dg));
        (u0, d1, d2, dpsi / psi, 1.0 / (psi * psi))
    } else {
        let (u0, g, dg) = ground_state_log_derivatives(model, r);
        (u0, u0 * g, u0 * (g * g + dg), p.log_derivative_raw(r), p.inv_psi_sq_raw(r))
    };
    let laplacian = d2 + (n - 1.0) * l * d1;
    Ok(-laplacian - 0.25 * (n - 1.0) * lambda * u0 - 0.25 * u0 / (r * r) - 0.25 * (n - 1.0) * (n - 3.0) * u0 * inv_sq)
}

/// Cut-off φₙ and its derivative: 0 on (0, 1], n^(−α)(r − 1) on (1, 2],
/// n^(−α) on (2, n], r^(−α) beyond.
pub fn cutoff_phi(n: f64, alpha: f64, r: f64) -> Result<(f64, f64)> {
    check_sequence_parameters(n, alpha, 1.0)?;
    Ok(scaled_cutoff(n, alpha, r, n.powf(-alpha)))
}

fn check_sequence_parameters(n: f64, alpha: f64, bound: f64) -> Result<()> {
    if !(n >= 3.0) || !n.is_finite() {
        return Err(Error::InvalidParameter(format!("sequence index must be >= 3, got {n}")));
    }
    if !(alpha > bound) || !alpha.is_finite() {
        return Err(Error::AlphaTooSmall { alpha, bound });
    }
    Ok(())
}

/// φₙ·scale/n^(−α), i.e. the cut-off with its plateau set to `level`.
fn scaled_cutoff(n: f64, alpha: f64, r: f64, level: f64) -> (f64, f64) {
    if r <= 1.0 {
        (0.0, 0.0)
    } else if r <= 2.0 {
        (level * (r - 1.0), level)
    } else if r <= n {
        (level, 0.0)
    } else {
        let t = level * (r / n).powf(-alpha);
        (t, -alpha * t / r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClosedFormIntegrals {
    /// Lower bound for ∫(u₀φₙ)²/r² dv.
    pub denom_bound: f64,
    /// Exact ∫u₀²(φₙ′)² dv.
    pub grad_term: f64,
    /// Upper bound for ∫(u₀φₙ)²/ψ² dv.
    pub psi_bound: f64,
    /// ω·∫₁² φₙ²/r dr, the piece left out of `denom_bound`.
    pub dropped_piece: f64,
}

pub fn closed_form_integrals(n: f64, alpha: f64, dim: usize) -> Result<ClosedFormIntegrals> {
    check_sequence_parameters(n, alpha, 1.0)?;
    let omega = sphere_area(dim);
    let scale = omega * n.powf(-2.0 * alpha);
    let log_ratio = |x: f64| (((-x).exp() - 1.0) / ((-x).exp() + 1.0)).abs().ln();
    let sinh1 = 1.0f64.sinh();
    Ok(ClosedFormIntegrals {
        denom_bound: scale * ((n / 2.0).ln() + 0.5 / alpha),
        grad_term: scale * (1.5 + 0.5 * alpha),
        psi_bound: scale * (7.0 / (12.0 * sinh1 * sinh1) + log_ratio(n) - log_ratio(2.0) + 1.0 / alpha),
        dropped_piece: scale * (2.0f64.ln() - 0.5),
    })
}

/// Pieces of the Rayleigh quotient of u₀φₙ. All integrals include ω_N.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SequenceQuotient {
    pub n: f64,
    pub alpha: f64,
    /// [∫|∂(u₀φₙ)|² − (N−1)/4 ∫Λ(u₀φₙ)²] / ∫(u₀φₙ)²/r².
    pub quotient: f64,
    /// ∫(∂_r(u₀φₙ))² dv.
    pub gradient: f64,
    /// (N−1)/4·∫Λ(u₀φₙ)² dv.
    pub lambda_term: f64,
    /// ∫(u₀φₙ)²/r² dv.
    pub denominator: f64,
    /// ∫(u₀φₙ)²/ψ² dv.
    pub psi_term: f64,
    /// ∫u₀²(φₙ′)² dv.
    pub cutoff_gradient: f64,
    /// Bound on the quadrature error of `quotient`.
    pub error: f64,
    pub converged: bool,
}

impl SequenceQuotient {
    /// 1/4 + [(N−1)(N−3)/4·ψ-term + cut-off gradient]/denominator.
    pub fn identity_value(&self, dim: usize) -> f64 {
        let n = dim as f64;
        0.25 + (0.25 * (n - 1.0) * (n - 3.0) * self.psi_term + self.cutoff_gradient) / self.denominator
    }
}

/// Integrates `f` over [1, 2], [2, n] and [n, ∞).
fn split_integral<F: Fn(f64) -> f64>(f: F, n: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let near = integrate_pieces(&f, &[1.0, 2.0, n], spec)?;
    let tail = integrate_to_infinity(&f, n, spec)?;
    Ok(near + tail)
}

/// Evaluates the Rayleigh quotient of u₀φₙ by quadrature. Uses u₀²ψ^(N−1) = r
/// so that neither u₀ nor ψ^(N−1) is formed.
pub fn sequence_quotient(model: &ManifoldModel, n: f64, alpha: f64, spec: &QuadratureSpec) -> Result<SequenceQuotient> {
    let profile = model.profile();
    if !profile.is_global() {
        return Err(Error::TailFamily("the minimizing sequence".into()));
    }
    let growth = profile.asymptotic().map(|a| a.a).unwrap_or(0.0);
    check_sequence_parameters(n, alpha, 1.0 + growth)?;
    // the numerator cancels to O(ln n) out of O(n); tighten accordingly
    let spec = spec.with_rel_tol(spec.rel_tol.min(1e-13)).with_abs_tol(1e-300);
    let dim = model.dim() as f64;
    let k = 0.5 * (dim - 1.0);
    let phi = |r: f64| scaled_cutoff(n, alpha, r, 1.0);
    let g = |r: f64| 0.5 / r - k * profile.log_derivative_raw(r);
    // ∂(u₀φ)/u₀ = gφ + φ′ with g = u₀′/u₀
    let combined = |r: f64| {
        let (v, dv) = phi(r);
        if v == 0.0 && dv == 0.0 {
            return 0.0;
        }
        let d = g(r) * v + dv;
        r * d * d
    };
    let lambda = |r: f64| {
        let (v, _) = phi(r);
        if v == 0.0 {
            return 0.0;
        }
        0.25 * (dim - 1.0) * model.lambda_rad_raw(r) * r * v * v
    };
    // r g² − (N−1)/4·Λ r with the (ψ′/ψ)² parts cancelled algebraically;
    // the direct difference loses ~r·ε absolutely and stalls the quadrature
    let balanced = |r: f64| {
        let (v, dv) = phi(r);
        if v == 0.0 && dv == 0.0 {
            return 0.0;
        }
        let plateau = 0.25 / r - k * profile.log_derivative_raw(r)
            + k * r * (0.5 * (dim - 3.0) * profile.inv_psi_sq_raw(r) - profile.log_second_raw(r));
        v * v * plateau + 2.0 * r * g(r) * v * dv + r * dv * dv
    };
    let numerator = split_integral(balanced, n, &spec)?;
    let gradient = split_integral(combined, n, &spec)?;
    let lambda_term = split_integral(lambda, n, &spec)?;
    let denominator = split_integral(|r| phi(r).0.powi(2) / r, n, &spec)?;
    let psi_term = split_integral(|r| r * phi(r).0.powi(2) * profile.inv_psi_sq_raw(r), n, &spec)?;
    let cutoff_gradient = split_integral(|r| r * phi(r).1.powi(2), n, &spec)?;
    let quotient = numerator.value / denominator.value;
    let error = numerator.error / denominator.value + quotient.abs() * denominator.error / denominator.value;
    let scale = sphere_area(model.dim()) * n.powf(-2.0 * alpha);
    let converged = [numerator, gradient, lambda_term, denominator, psi_term, cutoff_gradient]
        .iter()
        .all(|e| e.converged);
    Ok(SequenceQuotient {
        n,
        alpha,
        quotient,
        gradient: scale * gradient.value,
        lambda_term: scale * lambda_term.value,
        denominator: scale * denominator.value,
        psi_term: scale * psi_term.value,
        cutoff_gradient: scale * cutoff_gradient.value,
        error,
        converged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    SequenceQuotient,
    SpectralQuotient,
    PoincareGap,
}

impl ExperimentId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::SequenceQuotient => "sequence_quotient",
            ExperimentId::SpectralQuotient => "spectral_quotient",
            ExperimentId::PoincareGap => "poincare_gap",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessResult {
    pub experiment_id: ExperimentId,
    /// (parameter, value), parameter-sorted.
    pub samples: Vec<(f64, f64)>,
    pub fitted_limit: f64,
    pub fit_slope: f64,
    pub fit_model: String,
    pub fit_residual: f64,
}

/// Least-squares fit q(n) ≈ c₀ + c₁/(ln(n/2) + 1/(2α)).
pub fn fit_limit(samples: &[(f64, f64)], alpha: f64) -> Result<SharpnessResult> {
    if samples.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 samples, got {}", samples.len())));
    }
    check_increasing(samples)?;
    let xs: Vec<f64> = samples.iter().map(|(n, _)| 1.0 / ((n / 2.0).ln() + 0.5 / alpha)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (c0, c1, rms) = linear_least_squares(&xs, &ys)?;
    finish_fit(ExperimentId::SequenceQuotient, samples, c0, c1, rms, format!("c0 + c1/(ln(n/2)+1/(2a)); a={alpha}"))
}

/// Fits a spectral sweep over truncation radii: c₀ + c₁/R² for the
/// Poincaré gap, c₀ + c₁/ln²(R/ε) for the Hardy quotient. Fewer than two
/// samples give the single value back.
pub fn fit_spectral(target: SpectralTarget, samples: &[(f64, f64)], epsilon: f64) -> Result<SharpnessResult> {
    if samples.is_empty() {
        return Err(Error::DegenerateFit("no samples".into()));
    }
    check_increasing(samples)?;
    let id = target.experiment_id();
    if samples.len() < 2 {
        return finish_fit(id, samples, samples[0].1, 0.0, 0.0, "single sample".into());
    }
    let (xs, model): (Vec<f64>, String) = match target {
        SpectralTarget::PoincareGap => (samples.iter().map(|(r, _)| 1.0 / (r * r)).collect(), "c0 + c1/R^2".into()),
        SpectralTarget::CmQuotient => (
            samples.iter().map(|(r, _)| (r / epsilon).ln().powi(-2)).collect(),
            format!("c0 + c1/ln(R/eps)^2; eps={epsilon}"),
        ),
    };
    let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (c0, c1, rms) = linear_least_squares(&xs, &ys)?;
    finish_fit(id, samples, c0, c1, rms, model)
}

fn check_increasing(samples: &[(f64, f64)]) -> Result<()> {
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::DegenerateFit("parameters must be strictly increasing".into()));
    }
    if samples.iter().any(|(p, v)| !p.is_finite() || !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite sample".into()));
    }
    Ok(())
}

fn finish_fit(
    experiment_id: ExperimentId,
    samples: &[(f64, f64)],
    c0: f64,
    c1: f64,
    rms: f64,
    fit_model: String,
) -> Result<SharpnessResult> {
    if !c0.is_finite() {
        return Err(Error::DegenerateFit("fitted limit is not finite".into()));
    }
    Ok(SharpnessResult {
        experiment_id,
        samples: samples.to_vec(),
        fitted_limit: c0,
        fit_slope: c1,
        fit_model,
        fit_residual: rms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralTarget {
    /// inf ∫|u′|² / ∫u².
    PoincareGap,
    /// inf [∫|u′|² − (N−1)/4 ∫Λu²] / ∫u²/r².
    CmQuotient,
}

impl SpectralTarget {
    pub fn experiment_id(&self) -> ExperimentId {
        match self {
            SpectralTarget::PoincareGap => ExperimentId::PoincareGap,
            SpectralTarget::CmQuotient => ExperimentId::SpectralQuotient,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub target: SpectralTarget,
    pub radius: f64,
    pub grid_points: usize,
    /// Grid spacing; also the inner radius where functions vanish.
    pub epsilon: f64,
    pub eigenvalue: f64,
}

/// Smallest generalized eigenvalue of the discretized radial quotient on
/// nodes rᵢ = i·R/M, i = 1..M, with zero values at r₁ and r_M.
///
/// Stiffness uses ψ^(N−1) at midpoints on first differences, mass is lumped
/// on the nodes. The pencil is reduced to a symmetric tridiagonal matrix and
/// its lowest eigenvalue found by Sturm-count bisection.
pub fn spectral_constant_estimate(
    model: &ManifoldModel,
    target: SpectralTarget,
    radius: f64,
    grid_points: usize,
) -> Result<SpectralEstimate> {
    let profile = model.profile();
    if !profile.is_global() {
        return Err(Error::TailFamily("spectral estimation".into()));
    }
    if !(radius > 1.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("truncation radius must exceed 1, got {radius}")));
    }
    if grid_points < 256 {
        return Err(Error::InvalidParameter(format!("need at least 256 grid points, got {grid_points}")));
    }
    let h = radius / grid_points as f64;
    let power = model.dim() as f64 - 1.0;
    if target == SpectralTarget::CmQuotient {
        let probe: Vec<f64> = (1..=64).map(|i| radius * i as f64 / 64.0).collect();
        if !check_curvature_bound(profile, &probe)?.holds {
            return Err(Error::InvalidParameter(format!(
                "the Hardy quotient estimate needs K_rad <= -1; fails for {}",
                profile.name()
            )));
        }
    }
    let node = |i: usize| i as f64 * h;
    // unknowns at nodes 2..=M-1
    let size = grid_points - 2;
    let mut log_mass = Vec::with_capacity(size);
    for i in 2..grid_points {
        let r = node(i);
        let lm = power * profile.ln_psi_raw(r)
            + match target {
                SpectralTarget::PoincareGap => 0.0,
                SpectralTarget::CmQuotient => -2.0 * r.ln(),
            }
            + h.ln();
        if !lm.is_finite() {
            return Err(Error::NonPositiveMass(r));
        }
        log_mass.push(lm);
    }
    // log of stiffness weight ψ^(N−1)(r_{i+1/2})/h for the link i → i+1
    let log_link = |i: usize| power * profile.ln_psi_raw(node(i) + 0.5 * h) - h.ln();
    let mut diag = vec![0.0; size];
    let mut off = vec![0.0; size.saturating_sub(1)];
    for j in 0..size {
        let i = j + 2;
        let lm = log_mass[j];
        diag[j] = (log_link(i - 1) - lm).exp() + (log_link(i) - lm).exp();
        if target == SpectralTarget::CmQuotient {
            let r = node(i);
            // (N−1)/4·Λ ψ^(N−1) h over ψ^(N−1) h/r²
            diag[j] -= 0.25 * power * model.lambda_rad_raw(r) * r * r;
        }
        if j + 1 < size {
            off[j] = -(log_link(i) - 0.5 * (lm + log_mass[j + 1])).exp();
        }
        if !diag[j].is_finite() {
            return Err(Error::EigenNonConvergence(format!("non-finite matrix entry at r = {}", node(i))));
        }
    }
    let eigenvalue = lowest_eigenvalue(&diag, &off)?;
    Ok(SpectralEstimate {
        target,
        radius,
        grid_points,
        epsilon: h,
        eigenvalue,
    })
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (j, a) in diag.iter().enumerate() {
        let b2 = if j == 0 { 0.0 } else { off[j - 1] * off[j - 1] };
        d = a - x - if j == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

pub(crate) fn lowest_eigenvalue(diag: &[f64], off: &[f64]) -> Result<f64> {
    if diag.is_empty() {
        return Err(Error::EigenNonConvergence("empty matrix".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (j, a) in diag.iter().enumerate() {
        let left = if j > 0 { off[j - 1].abs() } else { 0.0 };
        let right = if j < off.len() { off[j].abs() } else { 0.0 };
        lo = lo.min(a - left - right);
        hi = hi.max(a + left + right);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::EigenNonConvergence("non-finite Gershgorin bounds".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::EigenNonConvergence("bisection did not reach tolerance".into()))
}

/// Relative eigenvalue shift when `grid_points` is doubled.
pub fn spectral_grid_shift(model: &ManifoldModel, target: SpectralTarget, radius: f64, grid_points: usize) -> Result<(SpectralEstimate, SpectralEstimate, f64)> {
    let coarse = spectral_constant_estimate(model, target, radius, grid_points)?;
    let fine = spectral_constant_estimate(model, target, radius, 2 * grid_points)?;
    let shift = (fine.eigenvalue - coarse.eigenvalue).abs() / fine.eigenvalue.abs();
    Ok((coarse, fine, shift))
}

/// Continuum bottom of the Dirichlet spectrum of the hyperbolic-space
/// Laplacian on radial functions in the ball of radius R, N = 3.
pub fn hyperbolic3_dirichlet_gap(radius: f64) -> f64 {
    1.0 + PI * PI / (radius * radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::WarpingProfile;

    #[test]
    fn ground_state_examples() {
        let e3 = ManifoldModel::euclidean(3).unwrap();
        assert!((ground_state(&e3, 4.0).unwrap() - 0.5).abs() < 1e-15);
        let h3 = ManifoldModel::hyperbolic(3).unwrap();
        assert!((ground_state(&h3, 1.0).unwrap() - 1.0 / 1.0f64.sinh()).abs() < 1e-14);
        assert!(ground_state(&h3, 0.0).is_err());
        let e5 = ManifoldModel::euclidean(5).unwrap();
        assert!(ground_state(&e5, 1e-4).unwrap() > ground_state(&e5, 1e-3).unwrap());
    }

    #[test]
    fn ground_state_residual_vanishes() {
        let models = [
            ManifoldModel::hyperbolic(5).unwrap(),
            ManifoldModel::euclidean(4).unwrap(),
            ManifoldModel::new(3, WarpingProfile::gauss(1).unwrap()).unwrap(),
        ];
        for m in &models {
            for r in [0.5, 1.0, 2.0, 5.0] {
                let res = ground_state_residual(m, r).unwrap();
                let (u0, _, d2) = ground_state_derivatives(m, r).unwrap();
                assert!(res.abs() <= 1e-9 * (u0.abs() / (r * r) + d2.abs()), "{} r={r}: {res}", m.profile().name());
            }
        }
    }

    #[test]
    fn cutoff_examples() {
        let (v, d) = cutoff_phi(10.0, 2.0, 1.5).unwrap();
        assert!((v - 5e-3).abs() < 1e-17 && (d - 1e-2).abs() < 1e-17);
        let (v, d) = cutoff_phi(10.0, 2.0, 20.0).unwrap();
        assert!((v - 2.5e-3).abs() < 1e-15);
        assert!((d + 2.0 * 20.0f64.powi(-3)).abs() < 1e-15);
        let left = cutoff_phi(10.0, 2.0, 10.0).unwrap().0;
        let right = cutoff_phi(10.0, 2.0, 10.0 + 1e-12).unwrap().0;
        assert!((left - 1e-2).abs() < 1e-16 && (right - left).abs() < 1e-14);
        assert_eq!(cutoff_phi(10.0, 2.0, 0.5).unwrap(), (0.0, 0.0));
        assert!(matches!(cutoff_phi(10.0, 1.0, 3.0), Err(Error::AlphaTooSmall { .. })));
        assert!(cutoff_phi(2.0, 2.0, 3.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let c = closed_form_integrals(10.0, 2.0, 3).unwrap();
        let omega = 4.0 * PI;
        assert!((c.denom_bound / omega - 1e-4 * (5.0f64.ln() + 0.25)).abs() < 1e-16);
        assert!((c.denom_bound / omega / 1e-4 - 1.859438).abs() < 1e-6);
        assert!((c.grad_term / omega - 2.5e-4).abs() < 1e-16);
        let ratio = |n: f64| {
            let c = closed_form_integrals(n, 2.0, 3).unwrap();
            c.psi_bound / c.denom_bound
        };
        assert!(ratio(1e8) < ratio(1e4) && ratio(1e4) < ratio(1e2));
        assert!(ratio(1e70) < 0.01);
    }

    #[test]
    fn hyperbolic3_quotient_matches_exact_expression() {
        let m = ManifoldModel::hyperbolic(3).unwrap();
        let spec = QuadratureSpec::default();
        for (n, alpha) in [(10.0, 2.0), (100.0, 1.5), (1000.0, 3.0)] {
            let q = sequence_quotient(&m, n, alpha, &spec).unwrap();
            let exact = 0.25 + (1.5 + 0.5 * alpha) / ((n / 2.0f64).ln() + 0.5 / alpha + 2.0f64.ln() - 0.5);
            assert!((q.quotient - exact).abs() < 1e-9 * exact, "{n} {alpha}: {} vs {exact}", q.quotient);
            assert!((q.identity_value(3) - q.quotient).abs() < 1e-9);
        }
    }

    #[test]
    fn quotient_pieces_match_closed_forms() {
        for dim in [3, 5] {
            let m = ManifoldModel::hyperbolic(dim).unwrap();
            for alpha in [1.5, 2.0, 3.0] {
                for n in [10.0, 100.0] {
                    let q = sequence_quotient(&m, n, alpha, &QuadratureSpec::default()).unwrap();
                    let c = closed_form_integrals(n, alpha, dim).unwrap();
                    assert!((q.cutoff_gradient - c.grad_term).abs() < 1e-10 * c.grad_term);
                    let gap = q.denominator - c.denom_bound;
                    assert!((gap - c.dropped_piece).abs() < 1e-10 * c.dropped_piece);
                    assert!(q.psi_term <= c.psi_bound);
                    assert!((q.identity_value(dim) - q.quotient).abs() < 1e-8 * q.quotient);
                }
            }
        }
    }

    #[test]
    fn sequence_rejects_small_alpha_for_fast_growth() {
        let m = ManifoldModel::new(3, WarpingProfile::gauss(1).unwrap()).unwrap();
        assert!(matches!(
            sequence_quotient(&m, 10.0, 1.5, &QuadratureSpec::default()),
            Err(Error::AlphaTooSmall { .. })
        ));
        assert!(sequence_quotient(&m, 10.0, 2.5, &QuadratureSpec::default()).is_ok());
    }

    #[test]
    fn fit_examples() {
        let alpha = 2.0;
        let synthetic: Vec<(f64, f64)> = [1e2, 1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&n| (n, 0.25 + 2.0 / ((n / 2.0f64).ln() + 0.25)))
            .collect();
        let fit = fit_limit(&synthetic, alpha).unwrap();
        assert!((fit.fitted_limit - 0.25).abs() < 1e-12);
        assert!((fit.fit_slope - 2.0).abs() < 1e-10);
        let flat: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0].iter().map(|&n| (n, 0.3)).collect();
        let fit = fit_limit(&flat, alpha).unwrap();
        assert!((fit.fitted_limit - 0.3).abs() < 1e-14 && fit.fit_slope.abs() < 1e-12);
        assert!(fit_limit(&flat[..3], alpha).is_err());
        let unsorted = vec![(10.0, 1.0), (5.0, 1.0), (20.0, 1.0), (40.0, 1.0)];
        assert!(matches!(fit_limit(&unsorted, alpha), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn tridiagonal_lowest_eigenvalue() {
        // discrete Dirichlet Laplacian: 2 − 2cos(π/(n+1))
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let exact = 2.0 - 2.0 * (PI / (n as f64 + 1.0)).cos();
        assert!((lowest_eigenvalue(&diag, &off).unwrap() - exact).abs() < 1e-12);
    }

    #[test]
    fn poincare_gap_small_grid() {
        let m = ManifoldModel::hyperbolic(3).unwrap();
        let est = spectral_constant_estimate(&m, SpectralTarget::PoincareGap, 10.0, 1000).unwrap();
        assert!((est.eigenvalue - hyperbolic3_dirichlet_gap(10.0)).abs() < 5e-3, "{}", est.eigenvalue);
        assert!(spectral_constant_estimate(&m, SpectralTarget::PoincareGap, 10.0, 100).is_err());
        assert!(spectral_constant_estimate(&m, SpectralTarget::PoincareGap, 0.5, 1000).is_err());
        let e = ManifoldModel::euclidean(3).unwrap();
        assert!(spectral_constant_estimate(&e, SpectralTarget::CmQuotient, 10.0, 1000).is_err());
    }
}
