//! Radial test functions and finite spherical-harmonic expansions.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ManifoldModel;
use crate::quadrature::differentiate;
use crate::sharpness::ground_state_log_derivatives;

/// A radial function with two derivatives.
pub trait RadialFunction {
    fn value(&self, r: f64) -> f64;
    fn deriv1(&self, r: f64) -> f64;
    fn deriv2(&self, r: f64) -> f64;
}

/// Wraps a plain closure; derivatives are central differences.
#[derive(Clone, Copy)]
pub struct SampledFunction<F> {
    f: F,
}

impl<F: Fn(f64) -> f64> SampledFunction<F> {
    pub fn new(f: F) -> Self {
        SampledFunction { f }
    }
}

impl<F: Fn(f64) -> f64> RadialFunction for SampledFunction<F> {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn deriv1(&self, r: f64) -> f64 {
        differentiate(&self.f, r, 1)
    }
    fn deriv2(&self, r: f64) -> f64 {
        differentiate(&self.f, r, 2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunctionKind {
    Bump,
    Spline,
    GroundStateProduct,
    Custom,
}

type Closure = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Bump { center: f64, half_width: f64, amplitude: f64 },
    Spline { spacing: f64, coefficients: Vec<f64> },
    GroundStateProduct { model: ManifoldModel, bump: Box<RadialTestFunction> },
    Custom { f: Closure },
}

/// Compactly supported radial test function.
#[derive(Clone)]
pub struct RadialTestFunction {
    shape: Shape,
    support: (f64, f64),
}

impl fmt::Debug for RadialTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("RadialTestFunction");
        d.field("kind", &self.kind()).field("support", &self.support);
        match &self.shape {
            Shape::Bump { center, half_width, amplitude } => {
                d.field("center", center).field("half_width", half_width).field("amplitude", amplitude);
            }
            Shape::Spline { coefficients, .. } => {
                d.field("coefficients", coefficients);
            }
            _ => {}
        }
        d.finish()
    }
}

/// `amplitude·exp(−1/(1−((r−c)/w)²))` on `(c−w, c+w)`.
pub fn make_bump(center: f64, half_width: f64, amplitude: f64) -> Result<RadialTestFunction> {
    RadialTestFunction::bump(center, half_width, amplitude)
}

impl RadialTestFunction {
    pub fn bump(center: f64, half_width: f64, amplitude: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidParameter(format!("bump half-width must be positive, got {half_width}")));
        }
        if !(center - half_width > 0.0) || !center.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bump support [{}, {}] must lie in (0, inf)",
                center - half_width,
                center + half_width
            )));
        }
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter("bump amplitude must be finite".into()));
        }
        Ok(RadialTestFunction {
            shape: Shape::Bump { center, half_width, amplitude },
            support: (center - half_width, center + half_width),
        })
    }

    /// Sum of uniform cubic B-splines whose supports tile `[lo, hi]`; C² with
    /// knots every `(hi − lo)/(k + 3)`.
    pub fn spline(lo: f64, hi: f64, coefficients: Vec<f64>) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("spline support [{lo}, {hi}] is invalid")));
        }
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("spline needs finite coefficients".into()));
        }
        let spacing = (hi - lo) / (coefficients.len() + 3) as f64;
        Ok(RadialTestFunction {
            shape: Shape::Spline { spacing, coefficients },
            support: (lo, hi),
        })
    }

    /// `u₀·b` with `u₀` the model's ground state and `b` a bump.
    pub fn ground_state_product(model: &ManifoldModel, bump: RadialTestFunction) -> Result<Self> {
        let support = bump.support;
        model.profile().check_domain(support.0.max(1e-12))?;
        Ok(RadialTestFunction {
            shape: Shape::GroundStateProduct { model: model.clone(), bump: Box::new(bump) },
            support,
        })
    }

    /// User function; must vanish outside `support`. Derivatives are central differences.
    pub fn custom<F>(f: F, support: (f64, f64)) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(support.0 >= 0.0 && support.1 > support.0 && support.1.is_finite()) {
            return Err(Error::InvalidParameter(format!("custom support {support:?} is invalid")));
        }
        Ok(RadialTestFunction { shape: Shape::Custom { f: Arc::new(f) }, support })
    }

    pub fn zero() -> Self {
        RadialTestFunction::bump(2.0, 1.0, 0.0).expect("valid bump")
    }

    pub fn kind(&self) -> TestFunctionKind {
        match self.shape {
            Shape::Bump { .. } => TestFunctionKind::Bump,
            Shape::Spline { .. } => TestFunctionKind::Spline,
            Shape::GroundStateProduct { .. } => TestFunctionKind::GroundStateProduct,
            Shape::Custom { .. } => TestFunctionKind::Custom,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Interior points where the function is not smooth, plus midpoints that
    /// help the integrator find narrow features.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.support;
        match &self.shape {
            Shape::Spline { spacing, coefficients } => {
                (1..coefficients.len() + 3).map(|i| lo + *spacing * i as f64).collect()
            }
            _ => vec![0.5 * (lo + hi)],
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.shape {
            Shape::Bump { amplitude, .. } => *amplitude == 0.0,
            Shape::Spline { coefficients, .. } => coefficients.iter().all(|&c| c == 0.0),
            Shape::GroundStateProduct { bump, .. } => bump.is_zero(),
            Shape::Custom { .. } => false,
        }
    }

    fn inside(&self, r: f64) -> bool {
        r > self.support.0 && r < self.support.1
    }

    fn bump_parts(center: f64, w: f64, amplitude: f64, r: f64) -> (f64, f64, f64) {
        let t = (r - center) / w;
        let s = 1.0 - t * t;
        if s <= 0.0 || amplitude == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let u = amplitude * (-1.0 / s).exp();
        if u == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        let (w2, s2) = (w * w, s * s);
        let d1 = u * (-2.0 * t) / (w * s2);
        let d2 = u * (4.0 * t * t / (w2 * s2 * s2) - 2.0 / (w2 * s2) - 8.0 * t * t / (w2 * s2 * s));
        (u, d1, d2)
    }

    fn spline_parts(lo: f64, spacing: f64, coefficients: &[f64], r: f64) -> (f64, f64, f64) {
        let x = (r - lo) / spacing;
        let first = ((x - 4.0).floor().max(0.0)) as usize;
        let last = (x.floor() as usize).min(coefficients.len() - 1);
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (i, c) in coefficients.iter().enumerate().take(last + 1).skip(first) {
            let (b0, b1, b2) = cubic_bspline(x - i as f64 - 2.0);
            v += c * b0;
            d1 += c * b1;
            d2 += c * b2;
        }
        (v, d1 / spacing, d2 / (spacing * spacing))
    }

    fn parts(&self, r: f64) -> (f64, f64, f64) {
        if !self.inside(r) {
            return (0.0, 0.0, 0.0);
        }
        match &self.shape {
            Shape::Bump { center, half_width, amplitude } => Self::bump_parts(*center, *half_width, *amplitude, r),
            Shape::Spline { spacing, coefficients } => Self::spline_parts(self.support.0, *spacing, coefficients, r),
            Shape::GroundStateProduct { model, bump } => {
                let (b0, b1, b2) = bump.parts(r);
                if b0 == 0.0 && b1 == 0.0 && b2 == 0.0 {
                    return (0.0, 0.0, 0.0);
                }
                let (u0, g, dg) = ground_state_log_derivatives(model, r);
                (u0 * b0, u0 * (g * b0 + b1), u0 * ((g * g + dg) * b0 + 2.0 * g * b1 + b2))
            }
            Shape::Custom { f } => (f(r), differentiate(f.as_ref(), r, 1), differentiate(f.as_ref(), r, 2)),
        }
    }
}

/// Centered cubic B-spline on [−2, 2] with its first two derivatives.
fn cubic_bspline(y: f64) -> (f64, f64, f64) {
    let a = y.abs();
    if a < 1.0 {
        (2.0 / 3.0 - y * y + 0.5 * a * a * a, -2.0 * y + 1.5 * y * a, -2.0 + 3.0 * a)
    } else if a < 2.0 {
        let m = 2.0 - a;
        (m * m * m / 6.0, -y.signum() * m * m / 2.0, m)
    } else {
        (0.0, 0.0, 0.0)
    }
}

impl RadialFunction for RadialTestFunction {
    fn value(&self, r: f64) -> f64 {
        self.parts(r).0
    }
    fn deriv1(&self, r: f64) -> f64 {
        self.parts(r).1
    }
    fn deriv2(&self, r: f64) -> f64 {
        self.parts(r).2
    }
}

/// Finite sum Σ aₙ(r)Pₙ(σ), stored as its radial coefficients.
#[derive(Clone, Debug)]
pub struct ModalTestFunction {
    modes: Vec<(usize, RadialTestFunction)>,
}

impl ModalTestFunction {
    pub fn new(modes: Vec<(usize, RadialTestFunction)>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyModes);
        }
        let mut seen: Vec<usize> = modes.iter().map(|(n, _)| *n).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("mode indices must be distinct".into()));
        }
        Ok(ModalTestFunction { modes })
    }

    pub fn radial(a: RadialTestFunction) -> Self {
        ModalTestFunction { modes: vec![(0, a)] }
    }

    pub fn modes(&self) -> &[(usize, RadialTestFunction)] {
        &self.modes
    }

    pub fn is_radial(&self) -> bool {
        self.modes.iter().all(|(n, a)| *n == 0 || a.is_zero())
    }
}

/// `count` unit-amplitude bumps of half-width `width` with centres drawn
/// log-uniformly from `[lo + width, hi − width]`.
pub fn seeded_bumps(count: usize, support: (f64, f64), width: f64, seed: u64) -> Result<Vec<RadialTestFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    seeded_bumps_with(&mut rng, count, support, width)
}

fn seeded_bumps_with(rng: &mut ChaCha8Rng, count: usize, support: (f64, f64), width: f64) -> Result<Vec<RadialTestFunction>> {
    let (lo, hi) = (support.0 + width, support.1 - width);
    if !(width > 0.0) || !(lo > 0.0) || hi < lo {
        return Err(Error::InvalidParameter(format!(
            "cannot place bumps of half-width {width} in [{}, {}]",
            support.0, support.1
        )));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|_| {
            let c = if lhi > llo { rng.gen_range(llo..=lhi).exp() } else { lo };
            // keep the support strictly inside the requested range
            RadialTestFunction::bump(c.clamp(lo, hi), width, 1.0)
        })
        .collect()
}

/// Random modal functions: each draw uses a non-empty random subset of
/// `modes`, one seeded bump per selected mode with amplitude in [0.5, 1.5].
pub fn seeded_modal_functions(
    count: usize,
    modes: &[usize],
    support: (f64, f64),
    width: f64,
    seed: u64,
) -> Result<Vec<ModalTestFunction>> {
    if modes.is_empty() {
        return Err(Error::EmptyModes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut chosen: Vec<usize> = modes.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if chosen.is_empty() {
            chosen.push(modes[rng.gen_range(0..modes.len())]);
        }
        chosen.sort_unstable();
        chosen.dedup();
        let mut list = Vec::with_capacity(chosen.len());
        for n in chosen {
            let bump = seeded_bumps_with(&mut rng, 1, support, width)?.remove(0);
            let amplitude = rng.gen_range(0.5..1.5);
            let (lo, hi) = bump.support();
            list.push((n, RadialTestFunction::bump(0.5 * (lo + hi), width, amplitude)?));
        }
        out.push(ModalTestFunction::new(list)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn central(f: impl Fn(f64) -> f64, r: f64, h: f64) -> f64 {
        (f(r + h) - f(r - h)) / (2.0 * h)
    }

    #[test]
    fn bump_examples() {
        let b = make_bump(2.0, 1.0, 1.0).unwrap();
        assert!((b.value(2.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(b.value(1.0), 0.0);
        assert_eq!(b.value(3.0), 0.0);
        assert_eq!(b.deriv1(2.0), 0.0);
        assert_eq!(b.value(3.5), 0.0);
        assert_eq!(b.kind(), TestFunctionKind::Bump);
    }

    #[test]
    fn bump_rejects_bad_parameters() {
        assert!(make_bump(1.0, 1.0, 1.0).is_err());
        assert!(make_bump(2.0, 0.0, 1.0).is_err());
        assert!(make_bump(2.0, -1.0, 1.0).is_err());
        assert!(make_bump(2.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn spline_partition_of_unity_in_the_middle() {
        let s = RadialTestFunction::spline(1.0, 11.0, vec![1.0; 7]).unwrap();
        // knots every 1.0; full overlap of four pieces on [4, 8]
        for i in 0..20 {
            let r = 4.0 + 0.2 * i as f64;
            assert!((s.value(r) - 1.0).abs() < 1e-14, "{r}");
            assert!(s.deriv1(r).abs() < 1e-13);
        }
        assert_eq!(s.value(1.0), 0.0);
        assert_eq!(s.value(11.5), 0.0);
        assert_eq!(s.breakpoints().len(), 9);
    }

    #[test]
    fn ground_state_product_derivatives() {
        let model = ManifoldModel::hyperbolic(5).unwrap();
        let f = RadialTestFunction::ground_state_product(&model, make_bump(2.0, 1.0, 1.0).unwrap()).unwrap();
        for i in 1..20 {
            let r = 1.05 + 0.1 * i as f64;
            let d1 = central(|x| f.value(x), r, 1e-5);
            let d2 = central(|x| f.deriv1(x), r, 1e-5);
            assert!((f.deriv1(r) - d1).abs() < 1e-6 * d1.abs().max(1e-3));
            assert!((f.deriv2(r) - d2).abs() < 1e-6 * d2.abs().max(1e-3));
        }
    }

    #[test]
    fn modal_validation() {
        let b = make_bump(2.0, 1.0, 1.0).unwrap();
        assert_eq!(ModalTestFunction::new(vec![]).unwrap_err(), Error::EmptyModes);
        assert!(ModalTestFunction::new(vec![(1, b.clone()), (1, b.clone())]).is_err());
        let m = ModalTestFunction::new(vec![(0, b.clone()), (2, b)]).unwrap();
        assert!(!m.is_radial());
    }

    #[test]
    fn seeded_bumps_are_reproducible() {
        let a = seeded_bumps(10, (0.5, 12.0), 0.5, 7).unwrap();
        let b = seeded_bumps(10, (0.5, 12.0), 0.5, 7).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.support(), y.support());
            assert!(x.support().0 >= 0.5 && x.support().1 <= 12.0);
        }
        let c = seeded_bumps(10, (0.5, 12.0), 0.5, 8).unwrap();
        assert_ne!(a[0].support(), c[0].support());
        assert!(seeded_bumps(1, (0.5, 1.0), 0.5, 0).is_err());
    }

    #[test]
    fn seeded_modal_functions_use_requested_modes() {
        let fs = seeded_modal_functions(20, &[0, 1, 2], (0.5, 8.0), 0.5, 3).unwrap();
        for f in &fs {
            assert!(f.modes().iter().all(|(n, _)| *n <= 2));
        }
    }

    proptest! {
        #[test]
        fn bump_derivatives_match_differences(c in 1.5f64..20.0, w in 0.2f64..1.4, t in -0.9f64..0.9) {
            let b = make_bump(c, w, 1.0).unwrap();
            let r = c + t * w;
            let h = 1e-6 * w;
            let d1 = central(|x| b.value(x), r, h);
            let d2 = central(|x| b.deriv1(x), r, h);
            let scale1 = b.deriv1(r).abs().max(1e-3 * b.value(c) / w);
            let scale2 = b.deriv2(r).abs().max(1e-3 * b.value(c) / (w * w));
            prop_assert!((b.deriv1(r) - d1).abs() <= 1e-6 * scale1);
            prop_assert!((b.deriv2(r) - d2).abs() <= 1e-6 * scale2);
        }

        #[test]
        fn spline_derivatives_match_differences(coefs in proptest::collection::vec(-2.0f64..2.0, 3..9), x in 0.01f64..0.99) {
            let s = RadialTestFunction::spline(0.5, 6.5, coefs.clone()).unwrap();
            let r = 0.5 + 6.0 * x;
            let d1 = central(|y| s.value(y), r, 1e-6);
            let scale = coefs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            prop_assert!((s.deriv1(r) - d1).abs() <= 1e-6 * scale);
        }
    }
}
