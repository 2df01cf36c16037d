use std::collections::VecDeque;
use std::str::FromStr;

use super::BinaryMask;
use crate::error::{Error, Result};
use crate::midline::{Midline, Point};

/// Image side closest to the arm's base attachment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseHint {
    Top,
    Bottom,
    Left,
    Right,
}

impl BaseHint {
    /// Smaller is closer to the base side.
    fn rank(self, p: Point) -> f64 {
        match self {
            BaseHint::Top => p.y,
            BaseHint::Bottom => -p.y,
            BaseHint::Left => p.x,
            BaseHint::Right => -p.x,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaseHint::Top => "top",
            BaseHint::Bottom => "bottom",
            BaseHint::Left => "left",
            BaseHint::Right => "right",
        }
    }
}

impl FromStr for BaseHint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "top" => Ok(BaseHint::Top),
            "bottom" => Ok(BaseHint::Bottom),
            "left" => Ok(BaseHint::Left),
            "right" => Ok(BaseHint::Right),
            other => Err(Error::invalid(format!("unknown base hint `{other}`"))),
        }
    }
}

/// Pixel adjacency graph of a skeleton.
///
/// Diagonal neighbors are joined only when neither pixel of the shared
/// 4-neighborhood is foreground; otherwise staircase corners would show up as
/// spurious degree-3 nodes.
#[derive(Debug, Clone)]
pub struct SkeletonGraph {
    width: usize,
    nodes: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl SkeletonGraph {
    pub fn nodes(&self) -> &[(usize, usize)] {
        &self.nodes
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    /// Degree-0 and degree-1 nodes.
    pub fn endpoints(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.degree(i) <= 1).collect()
    }

    pub fn branch_points(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.degree(i) >= 3).collect()
    }

    fn pixel_index(&self, i: usize) -> usize {
        let (x, y) = self.nodes[i];
        y * self.width + x
    }

    fn point(&self, i: usize) -> Point {
        let (x, y) = self.nodes[i];
        Point::new(x as f64, y as f64)
    }
}

pub fn build_graph(skeleton: &BinaryMask) -> SkeletonGraph {
    let w = skeleton.width();
    let mut id = vec![usize::MAX; w * skeleton.height()];
    let nodes: Vec<(usize, usize)> = skeleton.foreground().collect();
    for (k, &(x, y)) in nodes.iter().enumerate() {
        id[y * w + x] = k;
    }
    let adj = nodes
        .iter()
        .map(|&(x, y)| {
            let (x, y) = (x as i64, y as i64);
            let mut out = Vec::new();
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if (dx, dy) == (0, 0) || !skeleton.get(x + dx, y + dy) {
                        continue;
                    }
                    if dx != 0 && dy != 0 && (skeleton.get(x + dx, y) || skeleton.get(x, y + dy)) {
                        continue;
                    }
                    out.push(id[(y + dy) as usize * w + (x + dx) as usize]);
                }
            }
            out.sort_unstable();
            out
        })
        .collect();
    SkeletonGraph {
        width: w,
        nodes,
        adj,
    }
}

/// Connected components of the graph with `removed` nodes deleted.
fn components(g: &SkeletonGraph, removed: &[bool]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; g.nodes.len()];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for s in 0..g.nodes.len() {
        if removed[s] || comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &g.adj[u] {
                if !removed[v] && comp[v] == usize::MAX {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Walk a simple-path component from `start` to its other end.
fn walk(g: &SkeletonGraph, removed: &[bool], start: usize) -> Result<Vec<usize>> {
    let live = |u: usize| g.adj[u].iter().copied().filter(|&v| !removed[v]);
    if live(start).count() > 1 {
        return Err(Error::AmbiguousTopology(format!(
            "walk start {:?} is not a path end",
            g.nodes[start]
        )));
    }
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next: Vec<usize> = live(cur).filter(|&v| v != prev).collect();
        match next.len() {
            0 => return Ok(path),
            1 => {
                prev = cur;
                cur = next[0];
                if cur == start {
                    return Err(Error::AmbiguousTopology("skeleton fragment is a loop".into()));
                }
                path.push(cur);
            }
            _ => {
                return Err(Error::AmbiguousTopology(format!(
                    "fragment forks at {:?}",
                    g.nodes[cur]
                )))
            }
        }
    }
}

/// Remove branch points, merge the two closest terminals of a three-terminal
/// skeleton into their midpoint, and return the resulting path ordered from
/// the `base_hint` side, scaled to meters by `pitch`.
pub fn prune_and_order(g: &SkeletonGraph, pitch: f64, base_hint: BaseHint) -> Result<Midline> {
    if g.nodes.is_empty() {
        return Err(Error::EmptyInput("skeleton has no pixels".into()));
    }
    let ends = g.endpoints();
    let branches = g.branch_points();
    if ends.len() > 3 {
        return Err(Error::AmbiguousTopology(format!(
            "{} endpoints (at most 3 can be merged)",
            ends.len()
        )));
    }
    if ends.len() < 2 && !(ends.len() == 1 && g.nodes.len() == 1) {
        return Err(Error::AmbiguousTopology(format!(
            "{} endpoint(s): skeleton contains a loop",
            ends.len()
        )));
    }
    let mut removed = vec![false; g.nodes.len()];
    for &b in &branches {
        removed[b] = true;
    }
    let comp = components(g, &removed);

    let pixels: Vec<Point> = if ends.len() == 3 {
        let (e1, e2, e3) = closest_pair(g, &ends);
        let mid = g.point(e2).lerp(g.point(e3), 0.5);
        if !branches.is_empty() {
            // E2 and E3 sit on the short prongs of a fork; keep the trunk
            // from E1 and end it at M.
            let mut pts: Vec<Point> = walk(g, &removed, e1)?.iter().map(|&i| g.point(i)).collect();
            if comp[e1] == comp[e2] || comp[e1] == comp[e3] {
                return Err(Error::AmbiguousTopology(
                    "merge endpoints share the trunk fragment".into(),
                ));
            }
            push_distinct(&mut pts, mid);
            pts
        } else {
            // Two fragments separated by a gap; M bridges E2 and E3.
            if comp[e2] == comp[e3] {
                return Err(Error::AmbiguousTopology(
                    "three endpoints on one fragment without a branch point".into(),
                ));
            }
            let (near, far) = if comp[e1] == comp[e2] { (e2, e3) } else { (e3, e2) };
            let first = walk(g, &removed, e1)?;
            if *first.last().unwrap() != near {
                return Err(Error::AmbiguousTopology("gap endpoints are not fragment ends".into()));
            }
            let mut pts: Vec<Point> = first.iter().map(|&i| g.point(i)).collect();
            push_distinct(&mut pts, mid);
            for i in walk(g, &removed, far)? {
                push_distinct(&mut pts, g.point(i));
            }
            pts
        }
    } else {
        if !branches.is_empty() {
            return Err(Error::AmbiguousTopology(
                "branch point present with fewer than 3 endpoints".into(),
            ));
        }
        if comp.iter().any(|&c| c != 0) {
            return Err(Error::AmbiguousTopology("disconnected skeleton".into()));
        }
        walk(g, &removed, ends[0])?.iter().map(|&i| g.point(i)).collect()
    };

    if pixels.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "skeleton path has only {} pixel(s)",
            pixels.len()
        )));
    }
    let mut pixels = pixels;
    if base_hint.rank(*pixels.last().unwrap()) < base_hint.rank(pixels[0]) {
        pixels.reverse();
    }
    Midline::new(pixels.into_iter().map(|p| p * pitch).collect(), 0.0)
}

fn push_distinct(pts: &mut Vec<Point>, p: Point) {
    if pts.last() != Some(&p) {
        pts.push(p);
    }
}

/// Returns `(e1, e2, e3)` where `(e2, e3)` is the closest pair. Ties go to
/// the lexicographically smallest pair of pixel indices.
fn closest_pair(g: &SkeletonGraph, ends: &[usize]) -> (usize, usize, usize) {
    let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    let key = |&(a, b, _): &(usize, usize, usize)| {
        let (ia, ib) = (g.pixel_index(ends[a]), g.pixel_index(ends[b]));
        let d2 = {
            let (pa, pb) = (g.nodes[ends[a]], g.nodes[ends[b]]);
            let dx = pa.0 as i64 - pb.0 as i64;
            let dy = pa.1 as i64 - pb.1 as i64;
            dx * dx + dy * dy
        };
        (d2, ia.min(ib), ia.max(ib))
    };
    let &(a, b, c) = pairs.iter().min_by_key(|p| key(p)).unwrap();
    (ends[c], ends[a], ends[b])
}
