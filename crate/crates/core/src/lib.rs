//! Streaming single-pass Euclidean clustering for rotating LiDAR sensors.
//!
//! Readings arrive one azimuth step at a time; [`LiscoEngine`] clusters each
//! step as soon as it is received, using the sensor's range-image layout
//! instead of a spatial index. The crate also ships the batch baselines used
//! to check it (a kd-tree Euclidean cluster extraction and a brute-force
//! ε-graph oracle), a ray-casting scene generator and a small timing
//! harness.
//!
//! All geometry is generic over the scalar type (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, with `*32` variants for `f32`.

// `!(x > 0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod bench;
pub mod engine;
pub mod error;
pub mod io;
pub mod labels;
pub mod mask;
pub mod result;
pub mod scalar;
pub mod scene;
pub mod sensor;
pub mod store;

pub use baseline::{brute_force_cluster, pcl_style_cluster, KdTree, PointSet};
pub use engine::{cluster_frame, cluster_frame_with_rule, LiscoEngine, Snapshot};
pub use error::{Error, Result};
pub use labels::Labeling;
pub use mask::{covering_mask, neighbor_mask, ClusterParams, MaskRule, NeighborMask};
pub use result::{ClusterResult, Partition, PartitionDiff, Stats};
pub use scalar::Scalar;
pub use scene::{Primitive, SceneSpec};
pub use sensor::{
    distance, euclidean_distance, to_cartesian, PointAttrs, PointRef, RotationFrame, SensorConfig,
};
pub use store::{HeadId, MergeRecord, Subcluster, SubclusterStore};

pub type Config = SensorConfig<f64>;
pub type Frame = RotationFrame<f64>;
pub type Params = ClusterParams<f64>;
pub type Engine = LiscoEngine<f64>;
pub type Point = PointAttrs<f64>;
pub type Points = PointSet<f64>;
pub type Scene = SceneSpec<f64>;

pub type Config32 = SensorConfig<f32>;
pub type Frame32 = RotationFrame<f32>;
pub type Params32 = ClusterParams<f32>;
pub type Engine32 = LiscoEngine<f32>;
pub type Point32 = PointAttrs<f32>;
pub type Points32 = PointSet<f32>;
pub type Scene32 = SceneSpec<f32>;
