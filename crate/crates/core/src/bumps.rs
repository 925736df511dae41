//! Compactly supported bump perturbations and their box-convolved variant.
//!
//! The smooth profile is `exp(-1 / (1 - r^2))` on `r < 1`, rescaled by `e`
//! so a bump's stated height is its achieved peak. The convolved variant
//! slides that profile over an axis-aligned box, producing a plateau inside,
//! zero away from the box, and a continuous ramp in between.

use crate::objectives::TargetRegion;
use crate::{Error, Result};

/// Quadrature resolution of the convolution profile table.
const PROFILE_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpProfile {
    /// Infinitely differentiable, zero for `r >= 1` (open support).
    SmoothBump,
    /// Indicator of the closed unit ball.
    Indicator,
}

/// One scaled, translated bump.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub width: f64,
    pub height: f64,
    pub profile: BumpProfile,
}

impl BumpSpec {
    pub fn new(center: Vec<f64>, width: f64, height: f64, profile: BumpProfile) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidInput("bump center must be nonempty".into()));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidInput(format!("bump width must be positive, got {width}")));
        }
        if !height.is_finite() {
            return Err(Error::InvalidInput("bump height must be finite".into()));
        }
        Ok(Self {
            center,
            width,
            height,
            profile,
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.center.len(), "point dimension mismatch");
        let r = crate::kernels::distance(x, &self.center) / self.width;
        match self.profile {
            BumpProfile::SmoothBump => {
                if r < 1.0 {
                    self.height * smooth_unit_profile(r) * std::f64::consts::E
                } else {
                    0.0
                }
            }
            BumpProfile::Indicator => {
                if r <= 1.0 {
                    self.height
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether the bump's support touches the region box. Smooth supports
    /// are open, indicator supports closed.
    pub fn support_intersects(&self, region: &TargetRegion) -> bool {
        let d = region.distance_to(&self.center);
        match self.profile {
            BumpProfile::SmoothBump => d < self.width,
            BumpProfile::Indicator => d <= self.width,
        }
    }
}

fn smooth_unit_profile(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionSide {
    /// Plateau of `tau` where the width-`w` ball fits inside the box.
    Inside,
    /// Mirrored: `tau` where the ball is disjoint from the box.
    Outside,
}

/// A bump profile convolved with a box indicator, normalized so the plateau
/// equals `tau`.
///
/// In one dimension the convolution is evaluated exactly from a tabulated
/// antiderivative of the profile; in higher dimensions the same ramp is
/// applied to the signed distance from the box boundary, which preserves the
/// plateau / zero / in-between trichotomy and continuity.
#[derive(Debug, Clone)]
pub struct ConvolvedBump {
    region: TargetRegion,
    width: f64,
    tau: f64,
    side: ConvolutionSide,
    /// Cumulative integral of the unit profile over [-w, t].
    cumulative: Vec<f64>,
    mass: f64,
}

impl ConvolvedBump {
    pub fn new(region: TargetRegion, width: f64, tau: f64, side: ConvolutionSide) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidInput(format!(
                "convolution width must be positive, got {width}"
            )));
        }
        if width >= region.min_extent() {
            return Err(Error::InvalidInput(format!(
                "convolution width {width} must be below the smallest region extent {}",
                region.min_extent()
            )));
        }
        // Trapezoid cumulative of the unit-height profile over [-w, w].
        let n = PROFILE_POINTS;
        let step = 2.0 * width / n as f64;
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        let value_at = |k: usize| {
            let t = -width + 2.0 * width * (k as f64) / (n as f64);
            smooth_unit_profile((t / width).abs())
        };
        for k in 0..n {
            acc += 0.5 * (value_at(k) + value_at(k + 1)) * step;
            cumulative.push(acc);
        }
        Ok(Self {
            region,
            width,
            tau,
            side,
            mass: acc,
            cumulative,
        })
    }

    /// Cumulative profile integral, clamped to [0, mass] outside [-w, w].
    fn ramp(&self, t: f64) -> f64 {
        if t <= -self.width {
            return 0.0;
        }
        if t >= self.width {
            return self.mass;
        }
        let n = self.cumulative.len() - 1;
        let pos = (t + self.width) / (2.0 * self.width) * n as f64;
        let k = (pos.floor() as usize).min(n - 1);
        let frac = pos - k as f64;
        self.cumulative[k] * (1.0 - frac) + self.cumulative[k + 1] * frac
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let inside_value = if self.region.dim() == 1 {
            // Exact: (indicator * profile)(x) = Psi(x - lo) - Psi(x - hi).
            let (lo, hi) = self.region.bounds()[0];
            self.tau * (self.ramp(x[0] - lo) - self.ramp(x[0] - hi)) / self.mass
        } else {
            let s = self.region.signed_boundary_distance(x);
            self.tau * self.ramp(s) / self.mass
        };
        match self.side {
            ConvolutionSide::Inside => inside_value,
            ConvolutionSide::Outside => self.tau - inside_value,
        }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// One-shot convolved-bump evaluation; loops should build [`ConvolvedBump`]
/// once instead.
pub fn convolved_bump_eval(
    region: &TargetRegion,
    width: f64,
    tau: f64,
    side: ConvolutionSide,
    x: &[f64],
) -> Result<f64> {
    Ok(ConvolvedBump::new(region.clone(), width, tau, side)?.eval(x))
}

/// Scaling-law estimate of a scaled bump's RKHS norm, `|height| / width^nu`
/// with unit constant. Useful only for comparisons against a reference
/// budget, never as a certified norm.
pub fn bump_rkhs_scale(height: f64, width: f64, nu: f64) -> f64 {
    height.abs() / width.powf(nu)
}

/// Scaling-law estimate for a convolved bump, `|tau| vol(S) / width^nu`.
pub fn convolved_rkhs_scale(tau: f64, region_volume: f64, width: f64, nu: f64) -> f64 {
    tau.abs() * region_volume / width.powf(nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth(center: Vec<f64>, width: f64, height: f64) -> BumpSpec {
        BumpSpec::new(center, width, height, BumpProfile::SmoothBump).unwrap()
    }

    #[test]
    fn peak_equals_the_stated_height() {
        let b = smooth(vec![0.3, -0.2], 0.5, 2.5);
        assert_eq!(b.eval(&[0.3, -0.2]), 2.5);
        let ind = BumpSpec::new(vec![0.0], 1.0, -1.5, BumpProfile::Indicator).unwrap();
        assert_eq!(ind.eval(&[0.0]), -1.5);
    }

    #[test]
    fn half_radius_value_matches_closed_form() {
        // e * exp(-1 / (1 - 1/4)) = exp(-1/3), 30-digit arithmetic.
        let b = smooth(vec![0.0], 1.0, 1.0);
        let expected = 0.716531310573789250425604096925;
        let got = b.eval(&[0.5]);
        assert!((got - expected).abs() < 1e-15, "{got}");
    }

    #[test]
    fn support_is_exactly_bounded() {
        let b = smooth(vec![0.0], 0.7, 3.0);
        assert_eq!(b.eval(&[0.7]), 0.0);
        assert_eq!(b.eval(&[0.70000001]), 0.0);
        assert!(b.eval(&[0.699]) > 0.0);
        let ind = BumpSpec::new(vec![0.0], 0.7, 3.0, BumpProfile::Indicator).unwrap();
        assert_eq!(ind.eval(&[0.7]), 3.0);
        assert_eq!(ind.eval(&[0.7000001]), 0.0);
    }

    #[test]
    fn support_intersection_respects_open_versus_closed_support() {
        let region = TargetRegion::cube(vec![0.0], 1.0).unwrap();
        // Center at 1.0, width 0.5: support reaches exactly the closed
        // region boundary at 0.5.
        let open = smooth(vec![1.0], 0.5, 1.0);
        assert!(!open.support_intersects(&region));
        let closed = BumpSpec::new(vec![1.0], 0.5, 1.0, BumpProfile::Indicator).unwrap();
        assert!(closed.support_intersects(&region));
    }

    #[test]
    fn convolved_bump_hits_the_three_regimes() {
        let region = TargetRegion::cube(vec![0.0], 2.0).unwrap();
        let g = ConvolvedBump::new(region, 0.25, 3.0, ConvolutionSide::Inside).unwrap();
        // Deep inside: plateau.
        assert!((g.eval(&[0.0]) - 3.0).abs() < 1e-9);
        // Far outside: zero.
        assert_eq!(g.eval(&[2.0]), 0.0);
        // On the boundary: strictly between.
        let v = g.eval(&[1.0]);
        assert!(v > 0.0 && v < 3.0, "{v}");
        assert!((v - 1.5).abs() < 1e-6, "boundary value should be half the plateau, got {v}");
    }

    #[test]
    fn outside_side_mirrors_the_inside_ramp() {
        let region = TargetRegion::cube(vec![0.0, 0.0], 2.0).unwrap();
        let inside = ConvolvedBump::new(region.clone(), 0.3, 2.0, ConvolutionSide::Inside).unwrap();
        let outside = ConvolvedBump::new(region, 0.3, 2.0, ConvolutionSide::Outside).unwrap();
        for p in [[0.0, 0.0], [1.0, 0.3], [1.4, 1.4], [0.9, 0.0]] {
            let sum = inside.eval(&p) + outside.eval(&p);
            assert!((sum - 2.0).abs() < 1e-12);
        }
        assert!((outside.eval(&[1.8, 1.8]) - 2.0).abs() < 1e-12);
        assert_eq!(outside.eval(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn convolved_bump_is_continuous_on_a_dense_line() {
        let region = TargetRegion::cube(vec![0.0], 1.0).unwrap();
        let g = ConvolvedBump::new(region, 0.2, 1.0, ConvolutionSide::Inside).unwrap();
        let n = 4000;
        let mut diffs = Vec::with_capacity(n);
        let mut prev = g.eval(&[-1.5]);
        for i in 1..=n {
            let x = -1.5 + 3.0 * (i as f64) / n as f64;
            let v = g.eval(&[x]);
            diffs.push((v - prev).abs());
            prev = v;
        }
        let mut sorted = diffs.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[n / 2].max(1e-12);
        let max = sorted[n - 1];
        assert!(max <= 10.0 * median.max(max / 9.0), "jump {max} vs median {median}");
        // Lipschitz-style bound: adjacent evaluations differ by O(step / w).
        assert!(max < 1.0 / 0.2 * (3.0 / n as f64) * 3.0, "jump too large: {max}");
    }

    #[test]
    fn width_must_fit_inside_the_region() {
        let region = TargetRegion::cube(vec![0.0], 1.0).unwrap();
        assert!(ConvolvedBump::new(region, 1.0, 1.0, ConvolutionSide::Inside).is_err());
    }

    #[test]
    fn rkhs_scale_follows_the_power_law() {
        assert_eq!(bump_rkhs_scale(1.0, 1.0, 2.5), 1.0);
        let base = bump_rkhs_scale(1.0, 1.0, 2.5);
        let halved = bump_rkhs_scale(1.0, 0.5, 2.5);
        assert!((halved / base - 2f64.powf(2.5)).abs() < 1e-12);
        assert_eq!(bump_rkhs_scale(0.0, 0.3, 2.5), 0.0);
        assert_eq!(convolved_rkhs_scale(2.0, 3.0, 1.0, 1.5), 6.0);
    }
}
