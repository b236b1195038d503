//! Batch reference clusterers.
//!
//! [`pcl_style_cluster`] is the classic Euclidean cluster extraction: build a
//! kd-tree over the whole rotation, then grow each cluster breadth-first
//! with radius queries. [`brute_force_cluster`] computes connected
//! components of the ε-graph by exhaustive pairwise scans and serves as
//! ground truth for everything else.

mod brute;
mod kdtree;
mod pcl;

pub use brute::{brute_force_cluster, BRUTE_FORCE_LIMIT, BRUTE_FORCE_WARN};
pub use kdtree::KdTree;
pub use pcl::pcl_style_cluster;

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sensor::{PointAttrs, RotationFrame};

/// Flat list of the returns of one rotation, sorted by `(step, laser)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSet<T> {
    points: Vec<PointAttrs<T>>,
}

impl<T: Scalar> PointSet<T> {
    /// Returns of `frame` after the ground filter.
    pub fn from_frame(frame: &RotationFrame<T>) -> Self {
        PointSet {
            points: frame.remove_ground().points(),
        }
    }

    /// Validates and sorts an arbitrary list of points.
    pub fn from_points(mut points: Vec<PointAttrs<T>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if !(p.d > T::zero()) {
                return Err(Error::Domain(format!(
                    "{} has non-positive distance",
                    p.point
                )));
            }
            if !seen.insert(p.point) {
                return Err(Error::Domain(format!("{} appears twice", p.point)));
            }
        }
        points.sort_unstable_by_key(|p| p.point);
        Ok(PointSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointAttrs<T>] {
        &self.points
    }

    pub fn get(&self, id: usize) -> &PointAttrs<T> {
        &self.points[id]
    }
}
