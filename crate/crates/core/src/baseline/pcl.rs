use crate::result::{ClusterResult, Stats};
use crate::scalar::Scalar;

use super::{KdTree, PointSet};

/// Euclidean cluster extraction over a kd-tree.
///
/// Each unprocessed point seeds a queue that is grown breadth-first with
/// radius-ε queries; points are marked processed when queued, so each is
/// queried once. A queue of at least `min_pts` points is a cluster.
/// Clusters come out ordered by their smallest member.
pub fn pcl_style_cluster<T: Scalar>(
    points: &PointSet<T>,
    epsilon: T,
    min_pts: usize,
) -> ClusterResult {
    let tree = KdTree::build(points);
    extract(points, &tree, epsilon, min_pts)
}

fn extract<T: Scalar>(
    points: &PointSet<T>,
    tree: &KdTree<T>,
    epsilon: T,
    min_pts: usize,
) -> ClusterResult {
    let n = points.len();
    let mut processed = vec![false; n];
    let mut clusters = Vec::new();
    let mut noise = Vec::new();
    let mut evaluated = 0u64;
    let mut queue: Vec<usize> = Vec::new();

    for seed in 0..n {
        if processed[seed] {
            continue;
        }
        queue.clear();
        queue.push(seed);
        processed[seed] = true;
        let mut head = 0;
        while head < queue.len() {
            let q = points.get(queue[head]).xyz;
            head += 1;
            evaluated += tree.for_each_within(&q, epsilon, |j| {
                if !processed[j] {
                    processed[j] = true;
                    queue.push(j);
                }
            });
        }
        let members = queue.iter().map(|&i| points.get(i).point);
        if queue.len() >= min_pts {
            clusters.push(members.collect());
        } else {
            noise.extend(members);
        }
    }
    noise.sort_unstable();
    ClusterResult {
        clusters,
        noise,
        stats: Stats {
            points: n,
            candidates: evaluated,
            comparisons: evaluated,
            ..Stats::default()
        },
    }
}
