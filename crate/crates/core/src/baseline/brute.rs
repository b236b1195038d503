use log::warn;

use crate::error::{Error, Result};
use crate::result::{ClusterResult, Stats};
use crate::scalar::Scalar;
use crate::sensor::distance;

use super::PointSet;

/// Largest input the quadratic oracle accepts.
pub const BRUTE_FORCE_LIMIT: usize = 100_000;
/// Inputs above this size log a warning.
pub const BRUTE_FORCE_WARN: usize = 20_000;

/// Connected components of the graph joining every pair within ε,
/// found by exhaustive scans. Components of at least `min_pts` points are
/// clusters, ordered by smallest member.
pub fn brute_force_cluster<T: Scalar>(
    points: &PointSet<T>,
    epsilon: T,
    min_pts: usize,
) -> Result<ClusterResult> {
    let n = points.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(format!(
            "brute-force clustering refuses {n} points (limit {BRUTE_FORCE_LIMIT})"
        )));
    }
    if n > BRUTE_FORCE_WARN {
        warn!("brute-force clustering of {n} points is quadratic and will be slow");
    }
    let pos: Vec<[T; 3]> = points.points().iter().map(|p| p.xyz).collect();
    let mut visited = vec![false; n];
    // unvisited ids, compacted as the search proceeds
    let mut open: Vec<usize> = (0..n).collect();
    let mut clusters = Vec::new();
    let mut noise = Vec::new();
    let mut evaluated = 0u64;

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        let mut component = vec![seed];
        let mut next = 0;
        while next < component.len() {
            let u = component[next];
            next += 1;
            open.retain(|&j| {
                if visited[j] {
                    return false;
                }
                evaluated += 1;
                if distance(&pos[u], &pos[j]) <= epsilon {
                    visited[j] = true;
                    component.push(j);
                    false
                } else {
                    true
                }
            });
        }
        component.sort_unstable();
        let members = component.iter().map(|&i| points.get(i).point);
        if component.len() >= min_pts {
            clusters.push(members.collect());
        } else {
            noise.extend(members);
        }
    }
    noise.sort_unstable();
    Ok(ClusterResult {
        clusters,
        noise,
        stats: Stats {
            points: n,
            candidates: evaluated,
            comparisons: evaluated,
            ..Stats::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::{PointAttrs, PointRef};

    fn set(pos: &[[f64; 3]]) -> PointSet<f64> {
        let pts = pos
            .iter()
            .enumerate()
            .map(|(i, &xyz)| PointAttrs {
                d: 1.0,
                point: PointRef::new(0, i),
                xyz,
            })
            .collect();
        PointSet::from_points(pts).unwrap()
    }

    #[test]
    fn far_apart_points_are_singletons() {
        let ps = set(&[
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 2.0, 0.0],
            [0.0, 0.0, 2.0],
        ]);
        let r = brute_force_cluster(&ps, 1.0, 1).unwrap();
        assert_eq!(r.clusters.len(), 4);
        assert!(r.noise.is_empty());
    }

    #[test]
    fn exact_epsilon_chain_is_one_component() {
        // gaps of exactly 0.5, representable without rounding
        let ps = set(&[
            [0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.5, 0.0, 0.0],
        ]);
        let r = brute_force_cluster(&ps, 0.5, 4).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].len(), 4);
        let r = brute_force_cluster(&ps, 0.4999, 1).unwrap();
        assert_eq!(r.clusters.len(), 4);
    }

    #[test]
    fn hand_checked_components() {
        // {0,1,2} chain, {3,4} pair, {5} alone
        let ps = set(&[
            [0.0, 0.0, 0.0],
            [0.0, 0.9, 0.0],
            [0.0, 1.8, 0.0],
            [5.0, 0.0, 0.0],
            [5.0, 0.0, 0.9],
            [-5.0, 0.0, 0.0],
        ]);
        let r = brute_force_cluster(&ps, 1.0, 2).unwrap();
        let ids = |c: &Vec<PointRef>| c.iter().map(|p| p.step()).collect::<Vec<_>>();
        assert_eq!(
            r.clusters.iter().map(ids).collect::<Vec<_>>(),
            vec![vec![0, 1, 2], vec![3, 4]]
        );
        assert_eq!(r.noise, vec![PointRef::new(0, 5)]);
        let r = brute_force_cluster(&ps, 1.0, 3).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.noise.len(), 3);
    }

    #[test]
    fn pcl_agrees_on_small_cases() {
        let ps = set(&[[0.0, 0.0, 0.0], [0.3, 0.0, 0.0]]);
        let r = super::super::pcl_style_cluster(&ps, 0.5, 2);
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].len(), 2);
        let empty = PointSet::<f64>::default();
        assert_eq!(
            super::super::pcl_style_cluster(&empty, 0.5, 2).total_points(),
            0
        );
        assert_eq!(
            brute_force_cluster(&empty, 0.5, 2).unwrap().total_points(),
            0
        );
    }

    #[test]
    fn refuses_oversized_input() {
        let pts = (0..BRUTE_FORCE_LIMIT + 1)
            .map(|i| PointAttrs {
                d: 1.0,
                point: PointRef::new(i % 1000, i / 1000),
                xyz: [i as f64, 0.0, 0.0],
            })
            .collect();
        let ps = PointSet::from_points(pts).unwrap();
        assert!(matches!(
            brute_force_cluster(&ps, 0.5, 1),
            Err(Error::TooLarge(_))
        ));
    }
}
