//! Subcluster bookkeeping for the streaming engine.
//!
//! Every cell of the rotation carries a direct pointer to the head of its
//! subcluster, so looking up a head is one array read. Each live head owns a
//! growable member list; merging rewrites the pointers of the smaller side
//! and appends its list to the larger one, which bounds the total rewrite
//! cost of any run by `n log2 n`.

use crate::error::{Error, Result};
use crate::result::{ClusterResult, Stats};
use crate::sensor::PointRef;

const NONE: u32 = u32::MAX;

/// Identifier of a subcluster: the reading that founded it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeadId(pub PointRef);

impl HeadId {
    pub fn point(self) -> PointRef {
        self.0
    }
}

/// Sizes of the two sides of one merge, larger first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeRecord {
    pub survivor: usize,
    pub absorbed: usize,
}

/// A subcluster as seen by [`SubclusterStore::snapshot`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subcluster {
    pub head: HeadId,
    pub members: Vec<PointRef>,
}

#[derive(Clone, Debug)]
pub struct SubclusterStore {
    lasers: usize,
    steps: usize,
    head_of: Vec<u32>,
    members: Vec<Vec<u32>>,
    live: Vec<bool>,
    live_count: usize,
    assigned: usize,
    heads_created: usize,
    merges: usize,
    head_rewrites: u64,
    merge_log: Vec<MergeRecord>,
}

impl SubclusterStore {
    pub fn new(lasers: usize, steps: usize) -> Self {
        let cells = lasers * steps;
        assert!(cells < NONE as usize, "grid too large for 32-bit cell ids");
        SubclusterStore {
            lasers,
            steps,
            head_of: vec![NONE; cells],
            members: vec![Vec::new(); cells],
            live: vec![false; cells],
            live_count: 0,
            assigned: 0,
            heads_created: 0,
            merges: 0,
            head_rewrites: 0,
            merge_log: Vec::new(),
        }
    }

    #[inline]
    fn cell(&self, p: PointRef) -> u32 {
        (p.step() * self.lasers + p.laser()) as u32
    }

    #[inline]
    fn point(&self, cell: u32) -> PointRef {
        let c = cell as usize;
        PointRef::new(c % self.lasers, c / self.lasers)
    }

    fn checked_cell(&self, p: PointRef) -> Result<u32> {
        if p.laser() >= self.lasers {
            return Err(Error::Index {
                what: "laser",
                index: p.laser(),
                limit: self.lasers,
            });
        }
        if p.step() >= self.steps {
            return Err(Error::Index {
                what: "step",
                index: p.step(),
                limit: self.steps,
            });
        }
        Ok(self.cell(p))
    }

    fn checked_live(&self, h: HeadId) -> Result<u32> {
        let c = self.checked_cell(h.0)?;
        if !self.live[c as usize] {
            return Err(Error::Contract(format!("{} is not a live head", h.0)));
        }
        Ok(c)
    }

    /// Starts a subcluster for two unassigned points; the head is the one
    /// with the lower `(step, laser)` index. Members are added by
    /// [`set_head`](Self::set_head).
    pub fn create_head(&mut self, p: PointRef, q: PointRef) -> Result<HeadId> {
        let (a, b) = (self.checked_cell(p)?, self.checked_cell(q)?);
        if a == b {
            return Err(Error::Contract(format!(
                "cannot found a subcluster from {p} alone"
            )));
        }
        for (c, pt) in [(a, p), (b, q)] {
            if self.head_of[c as usize] != NONE {
                return Err(Error::Contract(format!(
                    "{pt} already belongs to a subcluster"
                )));
            }
        }
        let h = a.min(b);
        if self.live[h as usize] {
            return Err(Error::Contract(format!(
                "{} is already a live head",
                self.point(h)
            )));
        }
        self.create_cell(h);
        Ok(HeadId(self.point(h)))
    }

    /// Adds an unassigned point to a live subcluster.
    pub fn set_head(&mut self, p: PointRef, h: HeadId) -> Result<()> {
        let c = self.checked_cell(p)?;
        let hc = self.checked_live(h)?;
        let cur = self.head_of[c as usize];
        if cur != NONE {
            return Err(Error::Contract(format!(
                "{p} already belongs to subcluster {}",
                self.point(cur)
            )));
        }
        self.set_cell(c, hc);
        Ok(())
    }

    /// Current head of `p`, if any. Constant time.
    pub fn head(&self, p: PointRef) -> Option<HeadId> {
        let c = self.checked_cell(p).ok()?;
        match self.head_of[c as usize] {
            NONE => None,
            h => Some(HeadId(self.point(h))),
        }
    }

    /// Joins two live subclusters. The larger survives; on a tie `h1` does.
    pub fn merge(&mut self, h1: HeadId, h2: HeadId) -> Result<HeadId> {
        let a = self.checked_live(h1)?;
        let b = self.checked_live(h2)?;
        if a == b {
            return Err(Error::Contract(format!(
                "cannot merge {} with itself",
                h1.0
            )));
        }
        let s = self.merge_cells(a, b);
        Ok(HeadId(self.point(s)))
    }

    #[inline]
    pub(crate) fn head_cell(&self, cell: usize) -> u32 {
        self.head_of[cell]
    }

    #[inline]
    pub(crate) fn create_cell(&mut self, h: u32) {
        self.live[h as usize] = true;
        self.live_count += 1;
        self.heads_created += 1;
    }

    #[inline]
    pub(crate) fn set_cell(&mut self, cell: u32, h: u32) {
        debug_assert!(self.live[h as usize]);
        debug_assert_eq!(self.head_of[cell as usize], NONE);
        self.head_of[cell as usize] = h;
        self.members[h as usize].push(cell);
        self.assigned += 1;
    }

    pub(crate) fn merge_cells(&mut self, h1: u32, h2: u32) -> u32 {
        debug_assert!(h1 != h2 && self.live[h1 as usize] && self.live[h2 as usize]);
        let (base, other) = if self.members[h1 as usize].len() >= self.members[h2 as usize].len() {
            (h1, h2)
        } else {
            (h2, h1)
        };
        let moved = std::mem::take(&mut self.members[other as usize]);
        for &m in &moved {
            self.head_of[m as usize] = base;
        }
        self.merge_log.push(MergeRecord {
            survivor: self.members[base as usize].len(),
            absorbed: moved.len(),
        });
        self.head_rewrites += moved.len() as u64;
        self.members[base as usize].extend_from_slice(&moved);
        self.live[other as usize] = false;
        self.live_count -= 1;
        self.merges += 1;
        base
    }

    pub fn size(&self, h: HeadId) -> Option<usize> {
        let c = self.checked_live(h).ok()?;
        Some(self.members[c as usize].len())
    }

    pub fn members(&self, h: HeadId) -> Option<Vec<PointRef>> {
        let c = self.checked_live(h).ok()?;
        Some(
            self.members[c as usize]
                .iter()
                .map(|&m| self.point(m))
                .collect(),
        )
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    /// Points that currently belong to some subcluster.
    pub fn assigned(&self) -> usize {
        self.assigned
    }

    /// Live heads in ascending `(step, laser)` order.
    pub fn live_heads(&self) -> impl Iterator<Item = HeadId> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, l)| **l)
            .map(|(c, _)| HeadId(self.point(c as u32)))
    }

    pub fn merge_log(&self) -> &[MergeRecord] {
        &self.merge_log
    }

    pub fn stats(&self) -> Stats {
        Stats {
            heads_created: self.heads_created,
            merges: self.merges,
            head_rewrites: self.head_rewrites,
            ..Stats::default()
        }
    }

    /// Copy of every live subcluster, ordered by head.
    pub fn snapshot(&self) -> Vec<Subcluster> {
        self.live_heads()
            .map(|h| Subcluster {
                head: h,
                members: self.members(h).unwrap_or_default(),
            })
            .collect()
    }

    /// Turns the live subclusters into the final result: those with at
    /// least `min_pts` members are clusters (ordered by head), everything
    /// else in `readings` is noise. Readings never assigned to a subcluster
    /// are components of one point, so `min_pts <= 1` makes each of them a
    /// cluster of its own, appended after the subclusters.
    pub fn finalize(
        &self,
        min_pts: usize,
        readings: impl IntoIterator<Item = PointRef>,
    ) -> ClusterResult {
        let mut clusters = Vec::new();
        for h in self.live_heads() {
            let c = self.cell(h.0) as usize;
            if self.members[c].len() >= min_pts {
                clusters.push(self.members[c].iter().map(|&m| self.point(m)).collect());
            }
        }
        let mut noise = Vec::new();
        for p in readings {
            let c = self.cell(p) as usize;
            let h = self.head_of[c];
            if h == NONE {
                if min_pts <= 1 {
                    clusters.push(vec![p]);
                } else {
                    noise.push(p);
                }
            } else if self.members[h as usize].len() < min_pts {
                noise.push(p);
            }
        }
        noise.sort_unstable();
        ClusterResult {
            clusters,
            noise,
            stats: self.stats(),
        }
    }

    /// Full audit of the store invariants; meant for tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut seen = vec![false; self.head_of.len()];
        let mut total = 0usize;
        let mut live = 0usize;
        for h in 0..self.live.len() {
            if !self.live[h] {
                if !self.members[h].is_empty() {
                    return Err(format!(
                        "dead head {} still owns members",
                        self.point(h as u32)
                    ));
                }
                continue;
            }
            live += 1;
            for &m in &self.members[h] {
                if seen[m as usize] {
                    return Err(format!("{} listed twice", self.point(m)));
                }
                seen[m as usize] = true;
                if self.head_of[m as usize] != h as u32 {
                    return Err(format!(
                        "{} is listed under {} but points elsewhere",
                        self.point(m),
                        self.point(h as u32)
                    ));
                }
            }
            if !self.members[h].is_empty() && self.head_of[h] != h as u32 {
                return Err(format!(
                    "head {} does not point to itself",
                    self.point(h as u32)
                ));
            }
            total += self.members[h].len();
        }
        for (c, &h) in self.head_of.iter().enumerate() {
            if h != NONE && !seen[c] {
                return Err(format!(
                    "{} has a head but is in no list",
                    self.point(c as u32)
                ));
            }
        }
        if total != self.assigned {
            return Err(format!(
                "assigned count {} but lists hold {total}",
                self.assigned
            ));
        }
        if live != self.live_count {
            return Err(format!(
                "live count {} but {live} live flags",
                self.live_count
            ));
        }
        Ok(())
    }
}
