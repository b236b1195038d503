use crate::scalar::Scalar;
use crate::sensor::distance;

use super::PointSet;

const LEAF_SIZE: usize = 12;

#[derive(Clone, Debug)]
enum Node<T> {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        dim: u8,
        value: T,
        left: u32,
        right: u32,
    },
}

/// Static 3-d tree over the positions of a [`PointSet`], answering
/// fixed-radius queries.
///
/// Points are split at the median of the widest dimension; everything left
/// of a split is `<= value`, everything right is `>= value`. Subtrees are
/// pruned only on the exact per-axis gap, so queries return exactly the
/// points whose [`distance`] to the query is within the radius.
#[derive(Clone, Debug)]
pub struct KdTree<T> {
    positions: Vec<[T; 3]>,
    ids: Vec<u32>,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> KdTree<T> {
    pub fn build(points: &PointSet<T>) -> Self {
        let n = points.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        if n > 0 {
            let pos: Vec<[T; 3]> = points.points().iter().map(|p| p.xyz).collect();
            build_node(&pos, &mut order, 0, &mut nodes);
        }
        let positions = order.iter().map(|&i| points.get(i as usize).xyz).collect();
        KdTree {
            positions,
            ids: order,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Calls `f(id)` for every point within `radius` of `q`. Returns the
    /// number of distance evaluations.
    pub fn for_each_within(&self, q: &[T; 3], radius: T, mut f: impl FnMut(usize)) -> u64 {
        if self.nodes.is_empty() {
            return 0;
        }
        let mut evaluated = 0u64;
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        stack.push(0);
        while let Some(i) = stack.pop() {
            match self.nodes[i as usize] {
                Node::Leaf { start, end } => {
                    for k in start as usize..end as usize {
                        evaluated += 1;
                        if distance(q, &self.positions[k]) <= radius {
                            f(self.ids[k] as usize);
                        }
                    }
                }
                Node::Split {
                    dim,
                    value,
                    left,
                    right,
                } => {
                    let qd = q[dim as usize];
                    if value - qd <= radius {
                        stack.push(right);
                    }
                    if qd - value <= radius {
                        stack.push(left);
                    }
                }
            }
        }
        evaluated
    }

    /// Ids of the points within `radius` of `q`, ascending.
    pub fn neighbors(&self, q: &[T; 3], radius: T) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(q, radius, |i| out.push(i));
        out.sort_unstable();
        out
    }
}

fn build_node<T: Scalar>(
    pos: &[[T; 3]],
    order: &mut [u32],
    offset: usize,
    nodes: &mut Vec<Node<T>>,
) -> u32 {
    let me = nodes.len() as u32;
    if order.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset as u32,
            end: (offset + order.len()) as u32,
        });
        return me;
    }
    let mut lo = [T::infinity(); 3];
    let mut hi = [T::neg_infinity(); 3];
    for &i in order.iter() {
        for k in 0..3 {
            lo[k] = lo[k].min(pos[i as usize][k]);
            hi[k] = hi[k].max(pos[i as usize][k]);
        }
    }
    let dim = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).partial_cmp(&(hi[b] - lo[b])).unwrap())
        .unwrap();
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        pos[a as usize][dim]
            .partial_cmp(&pos[b as usize][dim])
            .unwrap()
    });
    let value = pos[order[mid] as usize][dim];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (left_half, right_half) = order.split_at_mut(mid);
    let left = build_node(pos, left_half, offset, nodes);
    let right = build_node(pos, right_half, offset + mid, nodes);
    nodes[me as usize] = Node::Split {
        dim: dim as u8,
        value,
        left,
        right,
    };
    me
}
