//! Sensor geometry, the per-rotation range matrix and the ground pre-filter.
//!
//! A rotating sensor has `L` lasers at fixed elevation angles and fires all of
//! them once per azimuth step; a rotation is `S` steps. One reading is indexed
//! by `(laser, step)` and holds the measured distance, with `0` meaning no
//! return. Indices are 0-based.
//!
//! Cartesian convention: azimuth is measured in the x-y plane from +x,
//! elevation from the x-y plane, the sensor sits at the origin.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Identity of one reading. Ordered by `(step, laser)`, which is also the
/// order in which the sensor delivers readings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointRef {
    pub step: u32,
    pub laser: u32,
}

impl PointRef {
    pub fn new(laser: usize, step: usize) -> Self {
        PointRef {
            step: step as u32,
            laser: laser as u32,
        }
    }

    #[inline]
    pub fn laser(self) -> usize {
        self.laser as usize
    }

    #[inline]
    pub fn step(self) -> usize {
        self.step as usize
    }
}

impl fmt::Display for PointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(l={}, s={})", self.laser, self.step)
    }
}

/// A reading admitted to clustering: distance, indices and derived position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointAttrs<T> {
    pub d: T,
    pub point: PointRef,
    pub xyz: [T; 3],
}

impl<T: Scalar> PointAttrs<T> {
    pub fn laser(&self) -> usize {
        self.point.laser()
    }

    pub fn step(&self) -> usize {
        self.point.step()
    }
}

/// Geometry of a rotating multi-beam sensor with uniform azimuth spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorConfig<T> {
    steps: usize,
    rotation_rate: T,
    azimuth_step: T,
    elevations: Vec<T>,
    ground_z: Option<T>,
    delta_theta: T,
    elev_cos: Vec<T>,
    elev_sin: Vec<T>,
    azim_cos: Vec<T>,
    azim_sin: Vec<T>,
}

impl<T: Scalar> SensorConfig<T> {
    /// Validates and builds a configuration.
    ///
    /// `azimuth_step * steps` may be smaller than a full turn (a partial
    /// sweep) but never larger.
    pub fn new(
        elevations: Vec<T>,
        steps: usize,
        azimuth_step: T,
        rotation_rate: T,
    ) -> Result<Self> {
        if elevations.is_empty() {
            return Err(Error::Config("at least one laser is required".into()));
        }
        if steps < 2 {
            return Err(Error::Config(format!("steps must be >= 2, got {steps}")));
        }
        if u32::try_from(steps).is_err() || u32::try_from(elevations.len()).is_err() {
            return Err(Error::Config("laser or step count exceeds u32".into()));
        }
        let half_pi = T::FRAC_PI_2();
        for (i, &e) in elevations.iter().enumerate() {
            if !e.is_finite() || e.abs() >= half_pi {
                return Err(Error::Config(format!(
                    "elevation {i} = {e} outside (-pi/2, pi/2)"
                )));
            }
        }
        let mut delta_theta = T::infinity();
        for w in elevations.windows(2) {
            let gap = w[1] - w[0];
            if gap <= T::zero() {
                return Err(Error::Config(
                    "elevation angles must be strictly increasing".into(),
                ));
            }
            delta_theta = delta_theta.min(gap);
        }
        if !(azimuth_step > T::zero()) || !azimuth_step.is_finite() {
            return Err(Error::Config(format!(
                "azimuth step must be positive, got {azimuth_step}"
            )));
        }
        // 2π/S rounded to the scalar type may overshoot a full turn slightly
        let slack =
            (T::epsilon() * T::from_usize_lossy(steps.max(1)) * T::lit(4.0)).max(T::lit(1e-9));
        let turn = T::TAU() * (T::one() + slack);
        if azimuth_step * T::from_usize_lossy(steps) > turn {
            return Err(Error::Config(format!(
                "{steps} steps of {azimuth_step} rad exceed one rotation"
            )));
        }
        if !rotation_rate.is_finite() || rotation_rate < T::zero() {
            return Err(Error::Config(format!(
                "rotation rate must be non-negative, got {rotation_rate}"
            )));
        }

        let elev_cos = elevations.iter().map(|e| e.cos()).collect();
        let elev_sin = elevations.iter().map(|e| e.sin()).collect();
        let (azim_cos, azim_sin) = (0..steps)
            .map(|s| {
                let a = T::from_usize_lossy(s) * azimuth_step;
                (a.cos(), a.sin())
            })
            .unzip();

        Ok(SensorConfig {
            steps,
            rotation_rate,
            azimuth_step,
            elevations,
            ground_z: None,
            delta_theta,
            elev_cos,
            elev_sin,
            azim_cos,
            azim_sin,
        })
    }

    /// Full-turn sensor: azimuth step is `2π / steps`.
    pub fn uniform(elevations: Vec<T>, steps: usize) -> Result<Self> {
        let step = T::TAU() / T::from_usize_lossy(steps.max(1));
        Self::new(elevations, steps, step, T::lit(10.0))
    }

    /// Laser elevations evenly spaced over `[lo, hi]` radians.
    pub fn evenly_spaced(lasers: usize, lo: T, hi: T, steps: usize) -> Result<Self> {
        Self::uniform(even_elevations(lasers, lo, hi), steps)
    }

    /// HDL-64-like sensor: 64 lasers evenly spaced over [-24.8°, +2°],
    /// 1125 steps per rotation (72000 cells), 10 rotations per second.
    pub fn hdl64() -> Self {
        let lo = T::lit(-24.8f64.to_radians());
        let hi = T::lit(2.0f64.to_radians());
        Self::evenly_spaced(64, lo, hi, 1125).expect("built-in configuration is valid")
    }

    pub fn with_ground_z(mut self, ground_z: Option<T>) -> Self {
        self.ground_z = ground_z;
        self
    }

    pub fn with_rotation_rate(mut self, rate: T) -> Self {
        self.rotation_rate = rate;
        self
    }

    #[inline]
    pub fn lasers(&self) -> usize {
        self.elevations.len()
    }

    #[inline]
    pub fn steps(&self) -> usize {
        self.steps
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.lasers() * self.steps
    }

    pub fn rotation_rate(&self) -> T {
        self.rotation_rate
    }

    pub fn azimuth_step(&self) -> T {
        self.azimuth_step
    }

    pub fn elevations(&self) -> &[T] {
        &self.elevations
    }

    pub fn elevation(&self, laser: usize) -> T {
        self.elevations[laser]
    }

    pub fn azimuth(&self, step: usize) -> T {
        T::from_usize_lossy(step) * self.azimuth_step
    }

    #[inline]
    pub fn elevation_cos(&self, laser: usize) -> T {
        self.elev_cos[laser]
    }

    /// Minimum angle between consecutive steps.
    pub fn delta_alpha(&self) -> T {
        self.azimuth_step
    }

    /// Minimum angle between consecutive lasers; infinite for a single laser.
    pub fn delta_theta(&self) -> T {
        self.delta_theta
    }

    pub fn ground_z(&self) -> Option<T> {
        self.ground_z
    }

    /// Dense step-major cell id; ascending ids follow `(step, laser)` order.
    #[inline]
    pub fn cell(&self, p: PointRef) -> usize {
        p.step() * self.lasers() + p.laser()
    }

    #[inline]
    pub fn point_of_cell(&self, cell: usize) -> PointRef {
        let l = self.lasers();
        PointRef::new(cell % l, cell / l)
    }

    pub fn check_index(&self, laser: usize, step: usize) -> Result<()> {
        if laser >= self.lasers() {
            return Err(Error::Index {
                what: "laser",
                index: laser,
                limit: self.lasers(),
            });
        }
        if step >= self.steps {
            return Err(Error::Index {
                what: "step",
                index: step,
                limit: self.steps,
            });
        }
        Ok(())
    }

    /// Position of a reading; indices must be in range.
    #[inline]
    pub(crate) fn cartesian_unchecked(&self, d: T, laser: usize, step: usize) -> [T; 3] {
        let horiz = d * self.elev_cos[laser];
        [
            horiz * self.azim_cos[step],
            horiz * self.azim_sin[step],
            d * self.elev_sin[laser],
        ]
    }

    /// Unit vector of the ray fired by `laser` at `step`.
    #[inline]
    pub fn direction(&self, laser: usize, step: usize) -> [T; 3] {
        self.cartesian_unchecked(T::one(), laser, step)
    }

    /// True when the reading falls below the ground threshold.
    #[inline]
    pub(crate) fn is_ground(&self, d: T, laser: usize) -> bool {
        match self.ground_z {
            Some(g) => d * self.elev_sin[laser] < g,
            None => false,
        }
    }

    pub(crate) fn attrs_unchecked(&self, d: T, laser: usize, step: usize) -> PointAttrs<T> {
        PointAttrs {
            d,
            point: PointRef::new(laser, step),
            xyz: self.cartesian_unchecked(d, laser, step),
        }
    }
}

/// `lasers` angles evenly spaced over `[lo, hi]`; a single laser sits at `lo`.
pub fn even_elevations<T: Scalar>(lasers: usize, lo: T, hi: T) -> Vec<T> {
    if lasers == 1 {
        return vec![lo];
    }
    let span = hi - lo;
    let denom = T::from_usize_lossy(lasers - 1);
    (0..lasers)
        .map(|i| lo + span * T::from_usize_lossy(i) / denom)
        .collect()
}

/// Cartesian position of reading `(laser, step)` at distance `d`.
///
/// `x = d cos θ cos α`, `y = d cos θ sin α`, `z = d sin θ`.
pub fn to_cartesian<T: Scalar>(
    config: &SensorConfig<T>,
    d: T,
    laser: usize,
    step: usize,
) -> Result<[T; 3]> {
    config.check_index(laser, step)?;
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    Ok(config.cartesian_unchecked(d, laser, step))
}

/// Euclidean distance between two positions. Every clusterer in the crate
/// decides ε-adjacency through this one function so that all of them agree
/// bit-for-bit on boundary pairs.
#[inline]
pub fn distance<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[inline]
pub fn euclidean_distance<T: Scalar>(a: &PointAttrs<T>, b: &PointAttrs<T>) -> T {
    distance(&a.xyz, &b.xyz)
}

/// One rotation of readings, the `L x S` matrix `M`.
///
/// Stored laser-major (row `l` holds all steps of laser `l`), matching the
/// on-disk layout. A zero entry means no return.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationFrame<T> {
    config: SensorConfig<T>,
    ranges: Vec<T>,
}

impl<T: Scalar> RotationFrame<T> {
    pub fn zeros(config: SensorConfig<T>) -> Self {
        let n = config.cells();
        RotationFrame {
            config,
            ranges: vec![T::zero(); n],
        }
    }

    /// Builds a frame from laser-major ranges.
    pub fn new(config: SensorConfig<T>, ranges: Vec<T>) -> Result<Self> {
        if ranges.len() != config.cells() {
            return Err(Error::Format(format!(
                "expected {} ranges for a {}x{} frame, got {}",
                config.cells(),
                config.lasers(),
                config.steps(),
                ranges.len()
            )));
        }
        if let Some((i, d)) = ranges
            .iter()
            .enumerate()
            .find(|(_, d)| !d.is_finite() || **d < T::zero())
        {
            return Err(Error::Domain(format!(
                "range at laser {}, step {} is {d}; ranges must be finite and >= 0",
                i / config.steps(),
                i % config.steps()
            )));
        }
        Ok(RotationFrame { config, ranges })
    }

    pub fn config(&self) -> &SensorConfig<T> {
        &self.config
    }

    pub fn lasers(&self) -> usize {
        self.config.lasers()
    }

    pub fn steps(&self) -> usize {
        self.config.steps()
    }

    /// Laser-major ranges.
    pub fn ranges(&self) -> &[T] {
        &self.ranges
    }

    #[inline]
    pub fn get(&self, laser: usize, step: usize) -> T {
        self.ranges[laser * self.steps() + step]
    }

    pub fn set(&mut self, laser: usize, step: usize, d: T) -> Result<()> {
        self.config.check_index(laser, step)?;
        if !d.is_finite() || d < T::zero() {
            return Err(Error::Domain(format!(
                "range must be finite and >= 0, got {d}"
            )));
        }
        let s = self.steps();
        self.ranges[laser * s + step] = d;
        Ok(())
    }

    /// The `L` readings of one step, as the sensor delivers them.
    pub fn column(&self, step: usize) -> Vec<T> {
        let s = self.steps();
        (0..self.lasers())
            .map(|l| self.ranges[l * s + step])
            .collect()
    }

    pub fn nonzero_count(&self) -> usize {
        self.ranges.iter().filter(|d| **d > T::zero()).count()
    }

    /// Replaces the configuration, keeping the ranges. Dimensions must match.
    pub fn with_config(self, config: SensorConfig<T>) -> Result<Self> {
        if config.lasers() != self.lasers() || config.steps() != self.steps() {
            return Err(Error::Dimensions {
                expected_lasers: config.lasers(),
                expected_steps: config.steps(),
                lasers: self.lasers(),
                steps: self.steps(),
            });
        }
        Ok(RotationFrame {
            config,
            ranges: self.ranges,
        })
    }

    /// All returns as points, in delivery order `(step, laser)`.
    pub fn points(&self) -> Vec<PointAttrs<T>> {
        let mut out = Vec::with_capacity(self.nonzero_count());
        for s in 0..self.steps() {
            for l in 0..self.lasers() {
                let d = self.get(l, s);
                if d > T::zero() {
                    out.push(self.config.attrs_unchecked(d, l, s));
                }
            }
        }
        out
    }

    /// Zeroes every reading whose height is below the configured ground
    /// threshold. Without a threshold this is the identity.
    pub fn remove_ground(&self) -> Self {
        let mut out = self.clone();
        if self.config.ground_z.is_none() {
            return out;
        }
        let s = self.steps();
        for l in 0..self.lasers() {
            for step in 0..s {
                let d = &mut out.ranges[l * s + step];
                if *d > T::zero() && self.config.is_ground(*d, l) {
                    *d = T::zero();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg(elev: Vec<f64>, steps: usize) -> SensorConfig<f64> {
        SensorConfig::uniform(elev, steps).unwrap()
    }

    #[test]
    fn cartesian_identity_angles() {
        let c = cfg(vec![0.0], 4);
        assert_eq!(to_cartesian(&c, 1.0, 0, 0).unwrap(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn cartesian_straight_up() {
        // elevation just below pi/2 is the closest a valid config gets
        let c = SensorConfig::new(vec![FRAC_PI_2 - 1e-12], 4, PI / 2.0, 10.0).unwrap();
        let [x, y, z] = to_cartesian(&c, 2.0, 0, 0).unwrap();
        assert!(x.abs() < 1e-11 && y.abs() < 1e-11);
        assert!((z - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cartesian_reference_values() {
        // d=3, θ=0.2, α=1.1, values from a 30-digit evaluation:
        // 3 cos(0.2) cos(1.1), 3 cos(0.2) sin(1.1), 3 sin(0.2)
        let c = SensorConfig::<f64>::new(vec![0.2], 2, 1.1, 10.0).unwrap();
        let [x, y, z] = to_cartesian(&c, 3.0, 0, 1).unwrap();
        assert!((x - 1.3336631953428778).abs() < 1e-12, "{x}");
        assert!((y - 2.6203276425670145).abs() < 1e-12, "{y}");
        assert!((z - 0.5960079923851836).abs() < 1e-12, "{z}");
    }

    #[test]
    fn cartesian_errors() {
        let c = cfg(vec![0.0, 0.1], 8);
        assert!(matches!(
            to_cartesian(&c, 1.0, 2, 0),
            Err(Error::Index { what: "laser", .. })
        ));
        assert!(matches!(
            to_cartesian(&c, 1.0, 0, 8),
            Err(Error::Index { what: "step", .. })
        ));
        assert!(matches!(to_cartesian(&c, 0.0, 0, 0), Err(Error::Domain(_))));
        assert!(matches!(
            to_cartesian(&c, -1.0, 0, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn distance_examples() {
        let a = PointAttrs {
            d: 1.0,
            point: PointRef::new(0, 0),
            xyz: [0.0, 0.0, 0.0],
        };
        let b = PointAttrs {
            d: 1.0,
            point: PointRef::new(0, 1),
            xyz: [3.0, 4.0, 0.0],
        };
        assert_eq!(euclidean_distance(&a, &a), 0.0);
        assert_eq!(euclidean_distance(&a, &b), 5.0);
        let p = PointAttrs {
            d: 1.0,
            point: PointRef::new(0, 0),
            xyz: [1.5, -2.0, 0.25],
        };
        let q = PointAttrs {
            d: 1.0,
            point: PointRef::new(0, 0),
            xyz: [-0.5, 1.0, 2.25],
        };
        // sqrt(4 + 9 + 4)
        assert!((euclidean_distance(&p, &q) - 17f64.sqrt()).abs() < 1e-15);
        assert_eq!(euclidean_distance(&p, &q), euclidean_distance(&q, &p));
    }

    #[test]
    fn config_validation() {
        assert!(SensorConfig::<f64>::uniform(vec![], 10).is_err());
        assert!(SensorConfig::<f64>::uniform(vec![0.0], 1).is_err());
        assert!(SensorConfig::<f64>::uniform(vec![0.1, 0.1], 10).is_err());
        assert!(SensorConfig::<f64>::uniform(vec![0.2, 0.1], 10).is_err());
        assert!(SensorConfig::<f64>::new(vec![0.0], 10, 1.0, 10.0).is_err());
        assert!(SensorConfig::<f64>::new(vec![0.0], 10, 0.0, 10.0).is_err());
        let c = cfg(vec![-0.1, 0.0, 0.05], 100);
        assert!((c.delta_theta() - 0.05).abs() < 1e-15);
        assert!((c.delta_alpha() - 2.0 * PI / 100.0).abs() < 1e-15);
        assert!(cfg(vec![0.0], 10).delta_theta().is_infinite());
    }

    #[test]
    fn hdl64_has_72000_cells() {
        let c = SensorConfig::<f64>::hdl64();
        assert_eq!(c.lasers(), 64);
        assert_eq!(c.steps(), 1125);
        assert_eq!(c.cells(), 72000);
        assert!((c.elevation(0) - (-24.8f64).to_radians()).abs() < 1e-12);
        assert!((c.elevation(63) - 2f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn cell_ids_follow_delivery_order() {
        let c = cfg(vec![0.0, 0.1, 0.2], 5);
        let mut prev = None;
        for s in 0..5 {
            for l in 0..3 {
                let p = PointRef::new(l, s);
                let id = c.cell(p);
                assert_eq!(c.point_of_cell(id), p);
                if let Some(q) = prev {
                    assert!(q < p && id > c.cell(q));
                }
                prev = Some(p);
            }
        }
    }

    fn plane_frame(ground: f64, thresh: Option<f64>) -> RotationFrame<f64> {
        let c = SensorConfig::evenly_spaced(8, -0.4, -0.05, 36)
            .unwrap()
            .with_ground_z(thresh);
        let mut f = RotationFrame::zeros(c.clone());
        for l in 0..8 {
            for s in 0..36 {
                // ray hits z = ground at d = ground / sin θ
                f.set(l, s, ground / c.elevation(l).sin()).unwrap();
            }
        }
        f
    }

    #[test]
    fn ground_removal_zeroes_plane() {
        let f = plane_frame(-1.8, Some(-1.5));
        assert_eq!(f.nonzero_count(), 8 * 36);
        assert_eq!(f.remove_ground().nonzero_count(), 0);
    }

    #[test]
    fn ground_removal_keeps_points_above() {
        let f = plane_frame(-1.0, Some(-1.5));
        assert_eq!(f.remove_ground(), f);
    }

    #[test]
    fn ground_removal_without_threshold_is_identity() {
        let f = plane_frame(-1.8, None);
        assert_eq!(f.remove_ground(), f);
    }

    #[test]
    fn frame_rejects_bad_ranges() {
        let c = cfg(vec![0.0], 4);
        assert!(RotationFrame::new(c.clone(), vec![0.0; 3]).is_err());
        assert!(RotationFrame::new(c.clone(), vec![0.0, 1.0, -1.0, 0.0]).is_err());
        assert!(RotationFrame::new(c.clone(), vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        let f = RotationFrame::new(c, vec![0.0, 1.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.column(2), vec![2.0]);
        assert_eq!(f.points().len(), 2);
    }
}
