//! Neighbor masks: how many lasers and steps around a reading can hold a
//! point within ε of it.
//!
//! A ball of radius ε around a point at distance `d` subtends a cone of
//! half-angle `γ = asin(ε/d)` seen from the sensor. Any laser whose elevation
//! differs by more than `γ` cannot see into the ball, so `λ = ⌈γ/Δθ⌉` lasers
//! on each side suffice.
//!
//! Two step half-widths are provided. [`neighbor_mask`] is the classic
//! `σ = ⌈γ/Δα⌉`. It is exact for lasers on the horizon but narrower than the
//! azimuth extent of the cone for tilted lasers, which widens by `1/cos θ`.
//! [`covering_mask`] uses the exact extent `asin(sin γ / cos θ)` plus a
//! rounding allowance and is what the streaming engine uses by default.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sensor::SensorConfig;

/// Clustering parameters: neighborhood radius and minimum cluster size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterParams<T> {
    epsilon: T,
    min_pts: usize,
}

impl<T: Scalar> ClusterParams<T> {
    pub fn new(epsilon: T, min_pts: usize) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::Domain(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if min_pts == 0 {
            return Err(Error::Domain("min_pts must be at least 1".into()));
        }
        Ok(ClusterParams { epsilon, min_pts })
    }

    #[inline]
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    #[inline]
    pub fn min_pts(&self) -> usize {
        self.min_pts
    }
}

/// Half-widths of the search window around a reading.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborMask {
    /// Lasers above and below (λ).
    pub lasers: usize,
    /// Steps before and after (σ).
    pub steps: usize,
    /// Set when ε ≥ d, where the cone covers the whole sensor.
    pub clamped: bool,
}

/// Which step half-width the engine derives for each point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MaskRule {
    /// Exact azimuth extent of the ε-cone at the point's laser elevation.
    #[default]
    Covering,
    /// `⌈asin(ε/d)/Δα⌉`, independent of elevation.
    Literal,
}

impl MaskRule {
    #[inline]
    pub fn mask<T: Scalar>(
        self,
        config: &SensorConfig<T>,
        d: T,
        laser: usize,
        epsilon: T,
    ) -> NeighborMask {
        match self {
            MaskRule::Covering => covering_unchecked(config, d, laser, epsilon),
            MaskRule::Literal => literal_unchecked(config, d, epsilon),
        }
    }
}

#[inline]
fn full_mask<T: Scalar>(config: &SensorConfig<T>) -> NeighborMask {
    NeighborMask {
        lasers: config.lasers(),
        steps: half_steps(config),
        clamped: true,
    }
}

#[inline]
fn half_steps<T: Scalar>(config: &SensorConfig<T>) -> usize {
    config.steps().div_ceil(2)
}

/// Ceiling that forgives a few ulps above an integer, so that exact
/// ratios such as `asin(1/2)/(π/6)` land on 1 rather than 2.
#[inline]
fn ceil_tolerant<T: Scalar>(x: T) -> usize {
    let slack = x * T::epsilon() * T::lit(4.0);
    let c = (x - slack).ceil();
    c.to_usize().unwrap_or(usize::MAX)
}

fn check_inputs<T: Scalar>(d: T, epsilon: T) -> Result<()> {
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::Domain(format!(
            "point distance must be positive, got {d}"
        )));
    }
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

/// `λ = ⌈asin(ε/d)/Δθ⌉`, `σ = ⌈asin(ε/d)/Δα⌉`, with a full-range mask when
/// `ε ≥ d`. λ is capped at `L` and σ at `⌈S/2⌉`.
pub fn neighbor_mask<T: Scalar>(
    config: &SensorConfig<T>,
    d: T,
    epsilon: T,
) -> Result<NeighborMask> {
    check_inputs(d, epsilon)?;
    Ok(literal_unchecked(config, d, epsilon))
}

#[inline]
fn literal_unchecked<T: Scalar>(config: &SensorConfig<T>, d: T, epsilon: T) -> NeighborMask {
    let ratio = epsilon / d;
    if ratio >= T::one() {
        return full_mask(config);
    }
    let gamma = ratio.asin().abs();
    NeighborMask {
        lasers: ceil_tolerant(gamma / config.delta_theta()).min(config.lasers()),
        steps: ceil_tolerant(gamma / config.delta_alpha()).min(half_steps(config)),
        clamped: false,
    }
}

/// Mask guaranteed to contain every point within ε of a reading at
/// distance `d` on `laser`.
///
/// The laser half-width is the same as [`neighbor_mask`]. The step
/// half-width uses the azimuth extent of the ε-cone around a direction at
/// elevation θ, `asin(sin γ / cos θ)`, which falls back to `⌈S/2⌉` when the
/// cone reaches a pole. ε is inflated by a few ulps of `d + ε` so that
/// rounding in the Cartesian conversion cannot push a pair whose computed
/// distance is within ε outside the window.
pub fn covering_mask<T: Scalar>(
    config: &SensorConfig<T>,
    d: T,
    laser: usize,
    epsilon: T,
) -> Result<NeighborMask> {
    check_inputs(d, epsilon)?;
    if laser >= config.lasers() {
        return Err(Error::Index {
            what: "laser",
            index: laser,
            limit: config.lasers(),
        });
    }
    Ok(covering_unchecked(config, d, laser, epsilon))
}

/// Absolute allowance for rounding in positions of magnitude `scale`.
#[inline]
pub(crate) fn rounding_allowance<T: Scalar>(scale: T) -> T {
    scale * T::epsilon() * T::lit(64.0)
}

#[inline]
fn covering_unchecked<T: Scalar>(
    config: &SensorConfig<T>,
    d: T,
    laser: usize,
    epsilon: T,
) -> NeighborMask {
    let eps = epsilon + rounding_allowance(d + epsilon);
    let ratio = eps / d;
    if ratio >= T::one() {
        return full_mask(config);
    }
    let gamma = ratio.asin();
    let lasers = (gamma / config.delta_theta())
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX);
    let azimuth_ratio = ratio / config.elevation_cos(laser);
    let steps = if azimuth_ratio >= T::one() {
        half_steps(config)
    } else {
        (azimuth_ratio.asin() / config.delta_alpha())
            .ceil()
            .to_usize()
            .unwrap_or(usize::MAX)
    };
    NeighborMask {
        lasers: lasers.min(config.lasers()),
        steps: steps.min(half_steps(config)),
        clamped: false,
    }
}
