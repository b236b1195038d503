//! Single-pass streaming clusterer.
//!
//! Steps are fed in sensor order. Each reading is compared only against
//! readings that have already arrived inside the left half of its neighbor
//! mask: the σ previous steps (including its own step, both laser
//! directions) and, near the end of the rotation, the first steps that
//! neighbor it across the step `S-1`/step `0` seam. Every ε-pair is then
//! examined by whichever of its two readings arrives later.

use crate::error::{Error, Result};
use crate::mask::{rounding_allowance, ClusterParams, MaskRule, NeighborMask};
use crate::result::ClusterResult;
use crate::scalar::Scalar;
use crate::sensor::{distance, PointRef, RotationFrame, SensorConfig};
use crate::store::{MergeRecord, Subcluster, SubclusterStore};

const NONE: u32 = u32::MAX;

/// Provisional view of the clustering at some point during a rotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub steps_received: usize,
    pub points_processed: usize,
    pub subclusters: Vec<Subcluster>,
}

impl Snapshot {
    pub fn assigned(&self) -> usize {
        self.subclusters.iter().map(|s| s.members.len()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct LiscoEngine<T> {
    config: SensorConfig<T>,
    params: ClusterParams<T>,
    rule: MaskRule,
    // step-major, indexed by cell id
    ranges: Vec<T>,
    xyz: Vec<[T; 3]>,
    store: SubclusterStore,
    steps_received: usize,
    points: usize,
    candidates: u64,
    comparisons: u64,
}

impl<T: Scalar> LiscoEngine<T> {
    pub fn new(config: SensorConfig<T>, params: ClusterParams<T>) -> Self {
        Self::with_rule(config, params, MaskRule::default())
    }

    pub fn with_rule(config: SensorConfig<T>, params: ClusterParams<T>, rule: MaskRule) -> Self {
        let cells = config.cells();
        let store = SubclusterStore::new(config.lasers(), config.steps());
        LiscoEngine {
            config,
            params,
            rule,
            ranges: vec![T::zero(); cells],
            xyz: vec![[T::zero(); 3]; cells],
            store,
            steps_received: 0,
            points: 0,
            candidates: 0,
            comparisons: 0,
        }
    }

    pub fn config(&self) -> &SensorConfig<T> {
        &self.config
    }

    pub fn params(&self) -> &ClusterParams<T> {
        &self.params
    }

    pub fn steps_received(&self) -> usize {
        self.steps_received
    }

    pub fn is_complete(&self) -> bool {
        self.steps_received == self.config.steps()
    }

    pub fn store(&self) -> &SubclusterStore {
        &self.store
    }

    pub fn merge_log(&self) -> &[MergeRecord] {
        self.store.merge_log()
    }

    /// Mask the engine uses for a reading at distance `d` on `laser`.
    pub fn mask_for(&self, d: T, laser: usize) -> NeighborMask {
        self.rule
            .mask(&self.config, d, laser, self.params.epsilon())
    }

    /// Receives the `L` readings of step `step` and clusters each return.
    ///
    /// Readings below the configured ground threshold are dropped on
    /// arrival.
    pub fn on_step(&mut self, step: usize, column: &[T]) -> Result<()> {
        let lasers = self.config.lasers();
        if step != self.steps_received || step >= self.config.steps() {
            return Err(Error::OutOfOrder {
                expected: self.steps_received,
                got: step,
            });
        }
        if column.len() != lasers {
            return Err(Error::Format(format!(
                "step {step} has {} readings, sensor has {lasers} lasers",
                column.len()
            )));
        }
        if let Some(d) = column.iter().find(|d| !d.is_finite() || **d < T::zero()) {
            return Err(Error::Domain(format!(
                "step {step} carries range {d}; ranges must be finite and >= 0"
            )));
        }

        let base = step * lasers;
        for (l, &d) in column.iter().enumerate() {
            let d = if d > T::zero() && self.config.is_ground(d, l) {
                T::zero()
            } else {
                d
            };
            self.ranges[base + l] = d;
            if d > T::zero() {
                self.xyz[base + l] = self.config.cartesian_unchecked(d, l, step);
            }
        }
        self.steps_received += 1;

        for l in 0..lasers {
            let d = self.ranges[base + l];
            if d > T::zero() {
                let mask = self.mask_for(d, l);
                self.points += 1;
                self.cluster_point(PointRef::new(l, step), mask);
            }
        }
        Ok(())
    }

    /// Compares `p` with every delivered reading in the left half of `mask`
    /// and applies the matching head case for each ε-neighbor.
    fn cluster_point(&mut self, p: PointRef, mask: NeighborMask) {
        let lasers = self.config.lasers();
        let steps = self.config.steps();
        let (l, s) = (p.laser(), p.step());
        let cell = s * lasers + l;
        let d = self.ranges[cell];
        let eps = self.params.epsilon();
        // |d - d'| <= |p - p'|, widened by the rounding allowance
        let eps_range = eps + rounding_allowance(d + eps);
        let here = self.xyz[cell];

        let laser_lo = l.saturating_sub(mask.lasers);
        let laser_hi = (l + mask.lasers).min(lasers - 1);
        let left_lo = s.saturating_sub(mask.steps);
        // wrap branch: steps 0..=s+σ-S, minus any overlap with the left branch
        let wrap = if s + mask.steps >= steps && left_lo > 0 {
            Some(0..=(s + mask.steps - steps).min(left_lo - 1))
        } else {
            None
        };

        let ranges = wrap.into_iter().flatten().chain(left_lo..=s);
        for step in ranges {
            let row = step * lasers;
            for other in (row + laser_lo)..=(row + laser_hi) {
                if other == cell {
                    continue;
                }
                let d2 = self.ranges[other];
                if !(d2 > T::zero()) {
                    continue;
                }
                self.candidates += 1;
                if (d - d2).abs() > eps_range {
                    continue;
                }
                let h1 = self.store.head_cell(cell);
                let h2 = self.store.head_cell(other);
                if h1 != NONE && h1 == h2 {
                    continue;
                }
                self.comparisons += 1;
                if distance(&here, &self.xyz[other]) > eps {
                    continue;
                }
                match (h1, h2) {
                    (NONE, NONE) => {
                        // cell ids are (step, laser) ordered
                        let h = (cell as u32).min(other as u32);
                        self.store.create_cell(h);
                        self.store.set_cell(cell as u32, h);
                        self.store.set_cell(other as u32, h);
                    }
                    (NONE, h2) => self.store.set_cell(cell as u32, h2),
                    (h1, NONE) => self.store.set_cell(other as u32, h1),
                    (h1, h2) => {
                        self.store.merge_cells(h1, h2);
                    }
                }
            }
        }
    }

    /// Copy of the current subclusters; no size filter is applied.
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            steps_received: self.steps_received,
            points_processed: self.points,
            subclusters: self.store.snapshot(),
        }
    }

    /// Readings delivered so far that survived the ground filter.
    pub fn readings(&self) -> impl Iterator<Item = PointRef> + '_ {
        let lasers = self.config.lasers();
        self.ranges
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > T::zero())
            .map(move |(c, _)| PointRef::new(c % lasers, c / lasers))
    }

    /// Applies the `min_pts` filter once the whole rotation has arrived.
    pub fn finalize(&self) -> Result<ClusterResult> {
        if !self.is_complete() {
            return Err(Error::OutOfOrder {
                expected: self.steps_received,
                got: self.config.steps(),
            });
        }
        let mut result = self.store.finalize(self.params.min_pts(), self.readings());
        result.stats.points = self.points;
        result.stats.candidates = self.candidates;
        result.stats.comparisons = self.comparisons;
        Ok(result)
    }
}

/// Streams a whole frame through a fresh engine and finalizes it.
pub fn cluster_frame<T: Scalar>(
    params: ClusterParams<T>,
    frame: &RotationFrame<T>,
) -> Result<ClusterResult> {
    cluster_frame_with_rule(params, frame, MaskRule::default())
}

pub fn cluster_frame_with_rule<T: Scalar>(
    params: ClusterParams<T>,
    frame: &RotationFrame<T>,
    rule: MaskRule,
) -> Result<ClusterResult> {
    let mut engine = LiscoEngine::with_rule(frame.config().clone(), params, rule);
    for s in 0..frame.steps() {
        engine.on_step(s, &frame.column(s))?;
    }
    engine.finalize()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Grid sensor where adjacent cells (including diagonals) are within ε
    /// and cells two apart are not: d = 100, Δ = 1e-3 rad, ε = 0.15.
    fn grid(lasers: usize, steps: usize) -> SensorConfig<f64> {
        let delta = 1e-3;
        let elev = (0..lasers)
            .map(|i| (i as f64 - lasers as f64 / 2.0) * delta)
            .collect();
        SensorConfig::new(elev, steps, delta, 10.0).unwrap()
    }

    fn params(eps: f64, min_pts: usize) -> ClusterParams<f64> {
        ClusterParams::new(eps, min_pts).unwrap()
    }

    fn frame(config: &SensorConfig<f64>, cells: &[(usize, usize)]) -> RotationFrame<f64> {
        let mut f = RotationFrame::zeros(config.clone());
        for &(l, s) in cells {
            f.set(l, s, 100.0).unwrap();
        }
        f
    }

    #[test]
    fn zero_column_changes_nothing() {
        let c = grid(4, 6);
        let mut e = LiscoEngine::new(c, params(0.15, 1));
        e.on_step(0, &[0.0; 4]).unwrap();
        let snap = e.snapshot();
        assert!(snap.subclusters.is_empty());
        assert_eq!(snap.points_processed, 0);
    }

    #[test]
    fn adjacent_lasers_form_a_pair() {
        let c = grid(4, 6);
        let mut e = LiscoEngine::new(c, params(0.15, 1));
        e.on_step(0, &[0.0, 100.0, 100.0, 0.0]).unwrap();
        let snap = e.snapshot();
        assert_eq!(snap.subclusters.len(), 1);
        assert_eq!(snap.subclusters[0].head.point(), PointRef::new(1, 0));
        assert_eq!(snap.subclusters[0].members.len(), 2);
    }

    #[test]
    fn protocol_errors() {
        let c = grid(4, 6);
        let mut e = LiscoEngine::new(c, params(0.15, 1));
        assert!(matches!(
            e.on_step(1, &[0.0; 4]),
            Err(Error::OutOfOrder {
                expected: 0,
                got: 1
            })
        ));
        assert!(matches!(e.on_step(0, &[0.0; 3]), Err(Error::Format(_))));
        assert!(matches!(
            e.on_step(0, &[0.0, -1.0, 0.0, 0.0]),
            Err(Error::Domain(_))
        ));
        e.on_step(0, &[0.0; 4]).unwrap();
        assert!(matches!(
            e.on_step(0, &[0.0; 4]),
            Err(Error::OutOfOrder { .. })
        ));
        assert!(e.finalize().is_err());
    }

    #[test]
    fn isolated_point_stays_headless() {
        let c = grid(5, 8);
        let f = frame(&c, &[(0, 0), (4, 4)]);
        let r = cluster_frame(params(0.15, 2), &f).unwrap();
        assert!(r.clusters.is_empty());
        assert_eq!(r.noise, vec![PointRef::new(0, 0), PointRef::new(4, 4)]);
        assert_eq!(r.stats.heads_created, 0);
        // a lone reading is a component of one point
        let r = cluster_frame(params(0.15, 1), &f).unwrap();
        assert_eq!(
            r.clusters,
            vec![vec![PointRef::new(0, 0)], vec![PointRef::new(4, 4)]]
        );
        assert!(r.noise.is_empty());
    }

    #[test]
    fn wrap_pair_joins_across_seam() {
        // full-turn sensor so step S-1 is geometrically next to step 0
        let c = SensorConfig::uniform(vec![0.0], 360).unwrap();
        let mut f = RotationFrame::zeros(c);
        f.set(0, 0, 10.0).unwrap();
        f.set(0, 359, 10.0).unwrap();
        // chord between adjacent 1° steps at 10 m is about 0.1745 m
        let r = cluster_frame(params(0.2, 2), &f).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].len(), 2);
        let r = cluster_frame(params(0.17, 2), &f).unwrap();
        assert!(r.clusters.is_empty());
    }

    #[test]
    fn empty_frame() {
        let c = grid(3, 5);
        let r = cluster_frame(params(0.15, 1), &RotationFrame::zeros(c)).unwrap();
        assert_eq!(r, ClusterResult::default());
    }

    // Two subclusters that grow separately during the first half of the
    // rotation and are joined by a single reading in the second half.
    fn bridged_scene() -> RotationFrame<f64> {
        let c = grid(7, 10);
        let c1 = [(0, 0), (0, 1), (1, 2), (1, 3), (2, 4)];
        let c2 = [(4, 2), (4, 3), (5, 3), (4, 4)];
        let lone = [(6, 0), (6, 8)];
        let bridge = [(3, 5)];
        let cells: Vec<_> = c1
            .iter()
            .chain(&c2)
            .chain(&lone)
            .chain(&bridge)
            .copied()
            .collect();
        frame(&c, &cells)
    }

    #[test]
    fn bridge_merges_subclusters() {
        let f = bridged_scene();
        let mut e = LiscoEngine::new(f.config().clone(), params(0.15, 10));
        for s in 0..5 {
            e.on_step(s, &f.column(s)).unwrap();
        }
        let half = e.snapshot();
        let sizes: Vec<usize> = half.subclusters.iter().map(|s| s.members.len()).collect();
        assert_eq!(sizes, vec![5, 4]);
        assert_eq!(half.subclusters[0].head.point(), PointRef::new(0, 0));
        for s in 5..10 {
            e.on_step(s, &f.column(s)).unwrap();
        }
        let r = e.finalize().unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].len(), 10);
        assert_eq!(r.noise, vec![PointRef::new(6, 0), PointRef::new(6, 8)]);
        assert_eq!(r.stats.merges, 1);
        assert_eq!(
            e.merge_log(),
            &[MergeRecord {
                survivor: 6,
                absorbed: 4
            }]
        );
        e.store().check_invariants().unwrap();
    }

    #[test]
    fn same_head_pairs_skip_distance_test() {
        // a full 3x3 block: once connected, later pairs need no distance test
        let c = grid(3, 3);
        let cells: Vec<_> = (0..3).flat_map(|l| (0..3).map(move |s| (l, s))).collect();
        let f = frame(&c, &cells);
        let r = cluster_frame(params(0.15, 1), &f).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert!(r.stats.comparisons < r.stats.candidates);
    }

    #[test]
    fn ground_readings_are_dropped_on_arrival() {
        let c = SensorConfig::<f64>::evenly_spaced(4, -0.3, -0.1, 90)
            .unwrap()
            .with_ground_z(Some(-1.5));
        let mut f = RotationFrame::zeros(c.clone());
        for s in 0..90 {
            for l in 0..4 {
                f.set(l, s, -1.8 / c.elevation(l).sin()).unwrap();
            }
        }
        let r = cluster_frame(params(0.5, 1), &f).unwrap();
        assert_eq!(r.total_points(), 0);
    }

    #[test]
    fn candidate_count_respects_mask_bound() {
        let c = SensorConfig::<f64>::hdl64();
        let mut f = RotationFrame::zeros(c.clone());
        for s in 0..1125 {
            for l in 0..64 {
                if (l * 7 + s * 3) % 5 != 0 {
                    f.set(l, s, 6.0 + (s % 17) as f64 * 0.05).unwrap();
                }
            }
        }
        let p = params(0.4, 10);
        let mut e = LiscoEngine::new(c.clone(), p);
        let mut bound = 0u64;
        for s in 0..1125 {
            let col = f.column(s);
            for (l, &d) in col.iter().enumerate() {
                if d > 0.0 {
                    let m = e.mask_for(d, l);
                    let wrap = (s + m.steps + 1).saturating_sub(1125) as u64;
                    bound += (2 * m.lasers as u64 + 1) * (m.steps as u64 + 1 + wrap);
                }
            }
            e.on_step(s, &col).unwrap();
        }
        let r = e.finalize().unwrap();
        assert!(r.stats.candidates <= bound);
        assert!(r.stats.comparisons <= r.stats.candidates);
    }
}
