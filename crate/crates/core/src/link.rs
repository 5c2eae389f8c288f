//! CAT(1) metric-graph model of links: directions, angular distance,
//! pi-convexity, and link-level chamber projections.
//!
//! Rank-2 apartment links are circles subdivided by the wall directions
//! through the base point; rank-1 links are 0-spheres (two directions at
//! distance pi). Building links (assembled in `atlas`) are metric graphs
//! whose arcs carry chart representatives, so membership and interval
//! predicates stay exact while lengths are floats.

use crate::angle::{angle_between, Angle};
use crate::coxeter::{cyclic_cmp, CoxeterDatum, Wall};
use crate::error::{Error, Result};
use crate::exact::{rat, QMat, QVec, Rat};
use crate::report::{ConvexityReport, Witness};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Topology {
    Circle,
    ZeroSphere,
    Graph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexLabel {
    /// Direction of a wall through the base point (orient = +-1).
    WallDir { wall: Wall, orient: i8 },
    /// Subdivision point of an unsubdivided circle.
    Reference,
}

#[derive(Clone, Debug)]
pub struct LinkVertex {
    pub label: VertexLabel,
    /// Chart id and a primitive rational direction vector there.
    pub chart: usize,
    pub dir: QVec,
}

/// One chart representation of an arc: the cone from `u0` to `u1`
/// (counterclockwise, angle <= pi). Arcs of angle exactly pi carry a `via`
/// interior direction and are parameterized piecewise.
#[derive(Clone, Debug)]
pub struct ArcRep {
    pub chart: usize,
    pub u0: QVec,
    pub u1: QVec,
    pub via: Option<QVec>,
}

impl ArcRep {
    /// Direction vector at projective parameter `t` in [0,1].
    pub fn dir_at(&self, t: &Rat) -> QVec {
        let one = Rat::one();
        match &self.via {
            None => self
                .u0
                .scale(&(&one - t))
                .add(&self.u1.scale(t)),
            Some(via) => {
                let half = rat(1, 2);
                if *t <= half {
                    let s = t * rat(2, 1);
                    self.u0.scale(&(&one - &s)).add(&via.scale(&s))
                } else {
                    let s = (t - &half) * rat(2, 1);
                    via.scale(&(&one - &s)).add(&self.u1.scale(&s))
                }
            }
        }
    }

    /// Parameter of a direction vector inside this arc's cone, if any.
    /// Boundary hits map to t = 0 or 1.
    pub fn locate(&self, v: &QVec) -> Option<Rat> {
        match &self.via {
            None => cone_param(&self.u0, &self.u1, v),
            Some(via) => {
                if let Some(t) = cone_param(&self.u0, via, v) {
                    return Some(t * rat(1, 2));
                }
                if let Some(t) = cone_param(via, &self.u1, v) {
                    return Some(t * rat(1, 2) + rat(1, 2));
                }
                None
            }
        }
    }
}

/// Parameter of `v` in the pointed cone from `a` to `b` (CCW, angle < pi):
/// `v ~ (1-t) a + t b`. None if outside.
fn cone_param(a: &QVec, b: &QVec, v: &QVec) -> Option<Rat> {
    let ca = a.cross(v);
    let cb = v.cross(b);
    if ca.is_negative() || cb.is_negative() {
        return None;
    }
    // Same-side check: v must not be opposite (cone is pointed, a,b CCW).
    if ca.is_zero() {
        // v parallel to a: require same direction.
        return if a.dot(v).is_positive() && !v.is_zero() {
            Some(Rat::zero())
        } else {
            None
        };
    }
    if cb.is_zero() {
        return if b.dot(v).is_positive() {
            Some(Rat::one())
        } else {
            None
        };
    }
    let sum = &ca + &cb;
    Some(ca / sum)
}

#[derive(Clone, Debug)]
pub struct LinkArc {
    pub v0: usize,
    pub v1: usize,
    pub reps: Vec<ArcRep>,
    pub len: Angle,
}

impl LinkArc {
    pub fn rep(&self) -> &ArcRep {
        &self.reps[0]
    }

    pub fn rep_in_chart(&self, chart: usize) -> Option<&ArcRep> {
        self.reps.iter().find(|r| r.chart == chart)
    }
}

/// A link: 0-sphere, circle, or metric graph of directions.
#[derive(Clone, Debug)]
pub struct LinkSpace {
    pub topology: Topology,
    pub verts: Vec<LinkVertex>,
    /// For Circle topology, arcs are stored in cyclic order:
    /// arc i runs from vertex i to vertex (i+1) mod n.
    pub arcs: Vec<LinkArc>,
    pub metric: QMat,
    pub rank: usize,
}

/// A direction in a link, canonical at shared endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    Vertex(usize),
    Inside { arc: usize, t: Rat },
}

impl LinkSpace {
    /// Direction vector (chart, primitive vector) of a direction.
    pub fn dir_vector(&self, d: &Direction) -> (usize, QVec) {
        match d {
            Direction::Vertex(v) => (self.verts[*v].chart, self.verts[*v].dir.clone()),
            Direction::Inside { arc, t } => {
                let rep = self.arcs[*arc].rep();
                (rep.chart, rep.dir_at(t).primitive_signed())
            }
        }
    }

    /// Locate a chart direction vector in the link.
    pub fn locate(&self, chart: usize, v: &QVec) -> Result<Direction> {
        if v.is_zero() {
            return Err(Error::DegenerateSegment);
        }
        if self.topology == Topology::ZeroSphere {
            for (i, lv) in self.verts.iter().enumerate() {
                if lv.chart == chart && lv.dir.dot(v).is_positive() {
                    return Ok(Direction::Vertex(i));
                }
            }
            return Err(Error::Precondition("direction not in 0-sphere".into()));
        }
        // Vertex hit first (canonical representative).
        for (i, lv) in self.verts.iter().enumerate() {
            if lv.chart == chart && lv.dir.cross(v).is_zero() && lv.dir.dot(v).is_positive() {
                return Ok(Direction::Vertex(i));
            }
        }
        for (ai, arc) in self.arcs.iter().enumerate() {
            if let Some(rep) = arc.rep_in_chart(chart) {
                if let Some(t) = rep.locate(v) {
                    if t.is_zero() {
                        return Ok(Direction::Vertex(arc.v0));
                    }
                    if t.is_one() {
                        return Ok(Direction::Vertex(arc.v1));
                    }
                    return Ok(Direction::Inside { arc: ai, t });
                }
            }
        }
        Err(Error::Precondition(format!(
            "direction {:?} in chart {} not found in link",
            v, chart
        )))
    }

    /// Angular offset of an inside-direction from the arc start, in radians.
    fn offset_in_arc(&self, arc: usize, t: &Rat) -> Angle {
        let a = &self.arcs[arc];
        let rep = a.rep();
        let d = rep.dir_at(t);
        match &rep.via {
            None => angle_between(&self.metric, &rep.u0, &d),
            Some(_) => {
                let half = rat(1, 2);
                if *t <= half {
                    angle_between(&self.metric, &rep.u0, &d)
                } else {
                    a.len
                        .sub(&angle_between(&self.metric, &d, &rep.u1))
                }
            }
        }
    }

    /// Counterclockwise angle from `u` to `v` (coordinate orientation),
    /// in [0, 2pi); exact at 0, pi, and crystallographic values.
    pub fn ccw_angle(&self, u: &QVec, v: &QVec) -> Angle {
        let cr = u.cross(v);
        let base = angle_between(&self.metric, u, v);
        if cr.is_positive() {
            base
        } else if cr.is_negative() {
            Angle::pi_mult(rat(2, 1)).sub(&base)
        } else if u.dot(v).is_positive() {
            Angle::zero()
        } else {
            Angle::pi()
        }
    }

    /// Shortest-path distance between two directions. Infinite if the graph
    /// is disconnected between them.
    pub fn distance(&self, d1: &Direction, d2: &Direction) -> Angle {
        match self.topology {
            Topology::ZeroSphere => {
                if d1 == d2 {
                    Angle::zero()
                } else {
                    Angle::pi()
                }
            }
            Topology::Circle => {
                let (_, u) = self.dir_vector(d1);
                let (_, v) = self.dir_vector(d2);
                // On a circle of circumference 2pi, the graph distance is the
                // plane angle between the direction vectors.
                angle_between(&self.metric, &u, &v)
            }
            Topology::Graph => {
                let g = ExpandedGraph::new(self, d1, d2);
                Angle::from_f64(g.shortest())
            }
        }
    }

    /// All shortest paths between two directions, as sequences of traversed
    /// segments. Used by the pi-convexity checker.
    pub fn shortest_paths(&self, d1: &Direction, d2: &Direction) -> (f64, Vec<Vec<Segment>>) {
        let g = ExpandedGraph::new(self, d1, d2);
        let dist = g.shortest();
        let paths = g.enumerate_paths(dist);
        (dist, paths)
    }

    pub fn total_circumference(&self) -> f64 {
        self.arcs.iter().map(|a| a.len.value).sum()
    }

    /// Whether every embedded cycle has length >= 2 pi (CAT(1) girth).
    pub fn check_girth(&self) -> bool {
        match self.topology {
            Topology::ZeroSphere => true,
            Topology::Circle => (self.total_circumference() - 2.0 * std::f64::consts::PI).abs() < 1e-9,
            Topology::Graph => {
                // Desk scale: enumerate simple cycles via DFS over arcs.
                let n = self.verts.len();
                let mut min_cycle = f64::INFINITY;
                // For each arc, shortest path between endpoints avoiding it.
                for (ai, arc) in self.arcs.iter().enumerate() {
                    let d = self.vertex_distance_avoiding(arc.v0, arc.v1, ai);
                    let cyc = d + arc.len.value;
                    if cyc < min_cycle {
                        min_cycle = cyc;
                    }
                }
                let _ = n;
                min_cycle >= 2.0 * std::f64::consts::PI - 1e-9
            }
        }
    }

    fn vertex_distance_avoiding(&self, a: usize, b: usize, skip_arc: usize) -> f64 {
        let n = self.verts.len();
        let mut dist = vec![f64::INFINITY; n];
        dist[a] = 0.0;
        let mut done = vec![false; n];
        for _ in 0..n {
            let mut best = usize::MAX;
            let mut bd = f64::INFINITY;
            for i in 0..n {
                if !done[i] && dist[i] < bd {
                    bd = dist[i];
                    best = i;
                }
            }
            if best == usize::MAX {
                break;
            }
            done[best] = true;
            for (ai, arc) in self.arcs.iter().enumerate() {
                if ai == skip_arc {
                    continue;
                }
                let other = if arc.v0 == best {
                    arc.v1
                } else if arc.v1 == best {
                    arc.v0
                } else {
                    continue;
                };
                let nd = dist[best] + arc.len.value;
                if nd < dist[other] {
                    dist[other] = nd;
                }
            }
        }
        dist[b]
    }
}

/// A traversed piece of an arc: parameter subinterval of `arc`.
#[derive(Clone, Debug)]
pub struct Segment {
    pub arc: usize,
    pub t0: Rat,
    pub t1: Rat,
}

/// Dijkstra helper: link vertices plus up to two inserted arc points.
struct ExpandedGraph<'a> {
    #[allow(dead_code)]
    link: &'a LinkSpace,
    /// node 0..n-1 = link verts; n = point1; n+1 = point2 (present flags).
    n: usize,
    p1: Direction,
    p2: Direction,
    edges: Vec<(usize, usize, f64, EdgeKind)>,
}

#[derive(Clone, Debug)]
enum EdgeKind {
    /// Whole arc.
    Arc(usize),
    /// Piece of an arc between parameters.
    Piece { arc: usize, t0: Rat, t1: Rat },
}

impl<'a> ExpandedGraph<'a> {
    fn new(link: &'a LinkSpace, d1: &Direction, d2: &Direction) -> Self {
        let n = link.verts.len();
        let mut edges: Vec<(usize, usize, f64, EdgeKind)> = Vec::new();
        let node_of = |d: &Direction, idx: usize| match d {
            Direction::Vertex(v) => *v,
            Direction::Inside { .. } => n + idx,
        };
        let n1 = node_of(d1, 0);
        let n2 = node_of(d2, 1);
        for (ai, arc) in link.arcs.iter().enumerate() {
            // Collect inserted points on this arc, sorted by t.
            let mut cuts: Vec<(Rat, usize)> = Vec::new();
            if let Direction::Inside { arc: a, t } = d1 {
                if *a == ai {
                    cuts.push((t.clone(), n1));
                }
            }
            if let Direction::Inside { arc: a, t } = d2 {
                if *a == ai {
                    let existing = cuts.iter().find(|(tt, _)| tt == t).cloned();
                    match existing {
                        Some(_) => {
                            // Same point: connect with a zero edge.
                            edges.push((n1, n2, 0.0, EdgeKind::Piece {
                                arc: ai,
                                t0: t.clone(),
                                t1: t.clone(),
                            }));
                        }
                        None => cuts.push((t.clone(), n2)),
                    }
                }
            }
            cuts.sort_by(|a, b| a.0.cmp(&b.0));
            if cuts.is_empty() {
                edges.push((arc.v0, arc.v1, arc.len.value, EdgeKind::Arc(ai)));
            } else {
                let mut prev_node = arc.v0;
                let mut prev_t = Rat::zero();
                let mut prev_off = 0.0;
                for (t, node) in &cuts {
                    let off = link.offset_in_arc(ai, t).value;
                    edges.push((
                        prev_node,
                        *node,
                        (off - prev_off).max(0.0),
                        EdgeKind::Piece {
                            arc: ai,
                            t0: prev_t.clone(),
                            t1: t.clone(),
                        },
                    ));
                    prev_node = *node;
                    prev_t = t.clone();
                    prev_off = off;
                }
                edges.push((
                    prev_node,
                    arc.v1,
                    (arc.len.value - prev_off).max(0.0),
                    EdgeKind::Piece {
                        arc: ai,
                        t0: prev_t,
                        t1: Rat::one(),
                    },
                ));
            }
        }
        ExpandedGraph {
            link,
            n,
            p1: d1.clone(),
            p2: d2.clone(),
            edges,
        }
    }

    fn node_count(&self) -> usize {
        self.n + 2
    }

    fn start(&self) -> usize {
        match &self.p1 {
            Direction::Vertex(v) => *v,
            _ => self.n,
        }
    }

    fn goal(&self) -> usize {
        match &self.p2 {
            Direction::Vertex(v) => *v,
            _ => self.n + 1,
        }
    }

    fn shortest(&self) -> f64 {
        let nc = self.node_count();
        let mut dist = vec![f64::INFINITY; nc];
        dist[self.start()] = 0.0;
        let mut done = vec![false; nc];
        loop {
            let mut best = usize::MAX;
            let mut bd = f64::INFINITY;
            for i in 0..nc {
                if !done[i] && dist[i] < bd {
                    bd = dist[i];
                    best = i;
                }
            }
            if best == usize::MAX {
                break;
            }
            done[best] = true;
            for (a, b, w, _) in &self.edges {
                let (x, y) = (*a, *b);
                for (from, to) in [(x, y), (y, x)] {
                    if from == best && dist[best] + w < dist[to] {
                        dist[to] = dist[best] + w;
                    }
                }
            }
        }
        dist[self.goal()]
    }

    /// Enumerate all simple paths realizing the shortest distance (1e-9 tie
    /// tolerance), as traversed segments.
    fn enumerate_paths(&self, target: f64) -> Vec<Vec<Segment>> {
        if !target.is_finite() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut visited = vec![false; self.node_count()];
        let start = self.start();
        visited[start] = true;
        let mut segs: Vec<Segment> = Vec::new();
        self.dfs(start, 0.0, target, &mut visited, &mut segs, &mut out);
        out
    }

    fn dfs(
        &self,
        node: usize,
        acc: f64,
        target: f64,
        visited: &mut Vec<bool>,
        segs: &mut Vec<Segment>,
        out: &mut Vec<Vec<Segment>>,
    ) {
        if node == self.goal() && (acc - target).abs() <= 1e-9 {
            out.push(segs.clone());
            return;
        }
        if acc > target + 1e-9 {
            return;
        }
        for (a, b, w, kind) in &self.edges {
            for (from, to) in [(*a, *b), (*b, *a)] {
                if from != node || visited[to] {
                    continue;
                }
                visited[to] = true;
                let seg = match kind {
                    EdgeKind::Arc(ai) => Segment {
                        arc: *ai,
                        t0: Rat::zero(),
                        t1: Rat::one(),
                    },
                    EdgeKind::Piece { arc, t0, t1 } => Segment {
                        arc: *arc,
                        t0: t0.clone(),
                        t1: t1.clone(),
                    },
                };
                segs.push(seg);
                self.dfs(to, acc + w, target, visited, segs, out);
                segs.pop();
                visited[to] = false;
            }
        }
    }
}

/// A closed subset of a link: finite union of closed subarcs (possibly
/// degenerate, i.e. single directions), in canonical merged form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkSubset {
    pub subarcs: Vec<SubArc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubArc {
    pub arc: usize,
    pub t0: Rat,
    pub t1: Rat,
}

impl LinkSubset {
    pub fn empty() -> LinkSubset {
        LinkSubset { subarcs: vec![] }
    }

    pub fn whole(link: &LinkSpace) -> LinkSubset {
        LinkSubset {
            subarcs: (0..link.arcs.len())
                .map(|i| SubArc {
                    arc: i,
                    t0: Rat::zero(),
                    t1: Rat::one(),
                })
                .collect(),
        }
    }

    pub fn canonicalize(mut self) -> LinkSubset {
        self.subarcs
            .sort_by(|a, b| (a.arc, &a.t0).cmp(&(b.arc, &b.t0)));
        let mut merged: Vec<SubArc> = Vec::new();
        for s in self.subarcs {
            if s.t0 > s.t1 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.arc == s.arc && s.t0 <= last.t1 => {
                    if s.t1 > last.t1 {
                        last.t1 = s.t1;
                    }
                }
                _ => merged.push(s),
            }
        }
        LinkSubset { subarcs: merged }
    }

    pub fn is_empty(&self) -> bool {
        self.subarcs.is_empty()
    }

    pub fn contains(&self, link: &LinkSpace, d: &Direction) -> bool {
        match d {
            Direction::Inside { arc, t } => self
                .subarcs
                .iter()
                .any(|s| s.arc == *arc && s.t0 <= *t && *t <= s.t1),
            Direction::Vertex(v) => self.contains_vertex(link, *v),
        }
    }

    pub fn contains_vertex(&self, link: &LinkSpace, v: usize) -> bool {
        self.subarcs.iter().any(|s| {
            let arc = &link.arcs[s.arc];
            (arc.v0 == v && s.t0.is_zero()) || (arc.v1 == v && s.t1.is_one())
        })
    }

    /// Whether a parameter interval of an arc lies inside the subset.
    pub fn covers_interval(&self, arc: usize, t0: &Rat, t1: &Rat) -> bool {
        // Canonical form: merged subarcs; one subarc must cover [t0, t1].
        self.subarcs
            .iter()
            .any(|s| s.arc == arc && s.t0 <= *t0 && *t1 <= s.t1)
    }

    pub fn covers_segment(&self, seg: &Segment) -> bool {
        self.covers_interval(seg.arc, &seg.t0, &seg.t1)
    }

    /// Total length (radians).
    pub fn total_length(&self, link: &LinkSpace) -> f64 {
        self.subarcs
            .iter()
            .map(|s| {
                let a = link.offset_in_arc(s.arc, &s.t0).value;
                let b = link.offset_in_arc(s.arc, &s.t1).value;
                (b - a).max(0.0)
            })
            .sum()
    }

    /// Boundary directions (endpoints of subarcs that are not shared with an
    /// adjacent subarc through a vertex).
    pub fn boundary_directions(&self, link: &LinkSpace) -> Vec<Direction> {
        let mut out: Vec<Direction> = Vec::new();
        let push = |d: Direction, out: &mut Vec<Direction>| {
            if !out.contains(&d) {
                out.push(d);
            }
        };
        for s in &self.subarcs {
            for (t, vend) in [(&s.t0, link.arcs[s.arc].v0), (&s.t1, link.arcs[s.arc].v1)] {
                let d = if t.is_zero() && link.arcs[s.arc].v0 == vend {
                    Direction::Vertex(vend)
                } else if t.is_one() && link.arcs[s.arc].v1 == vend {
                    Direction::Vertex(vend)
                } else {
                    Direction::Inside {
                        arc: s.arc,
                        t: t.clone(),
                    }
                };
                push(d, &mut out);
            }
        }
        out
    }

    /// Candidate critical points for the pi-convexity analysis: subarc
    /// endpoints plus link vertices inside the subset.
    fn critical_points(&self, link: &LinkSpace) -> Vec<Direction> {
        let mut out: Vec<Direction> = Vec::new();
        let push = |d: Direction, out: &mut Vec<Direction>| {
            if !out.contains(&d) {
                out.push(d);
            }
        };
        for s in &self.subarcs {
            for t in [&s.t0, &s.t1] {
                let d = if t.is_zero() {
                    Direction::Vertex(link.arcs[s.arc].v0)
                } else if t.is_one() {
                    Direction::Vertex(link.arcs[s.arc].v1)
                } else {
                    Direction::Inside {
                        arc: s.arc,
                        t: t.clone(),
                    }
                };
                push(d, &mut out);
            }
        }
        for v in 0..link.verts.len() {
            if self.contains_vertex(link, v) {
                push(Direction::Vertex(v), &mut out);
            }
        }
        out
    }
}

/// Serialize a link subset as (arc label, [t0, t1]) rational intervals.
pub fn subset_intervals(s: &LinkSubset) -> Vec<(usize, [String; 2])> {
    s.subarcs
        .iter()
        .map(|sa| {
            (
                sa.arc,
                [crate::exact::rat_str(&sa.t0), crate::exact::rat_str(&sa.t1)],
            )
        })
        .collect()
}

/// Build the link of an apartment point (chart index recorded on vertices).
pub fn apartment_link(datum: &CoxeterDatum, a: &QVec, chart: usize) -> Result<LinkSpace> {
    if datum.rank > 2 {
        return Err(Error::UnsupportedRank(datum.rank));
    }
    if datum.rank == 1 {
        return Ok(LinkSpace {
            topology: Topology::ZeroSphere,
            verts: vec![
                LinkVertex {
                    label: VertexLabel::Reference,
                    chart,
                    dir: QVec::from_i64(&[-1]),
                },
                LinkVertex {
                    label: VertexLabel::Reference,
                    chart,
                    dir: QVec::from_i64(&[1]),
                },
            ],
            arcs: vec![],
            metric: datum.metric.clone(),
            rank: 1,
        });
    }
    let walls = datum.walls_through(a)?;
    let mut dirs: Vec<(QVec, VertexLabel)> = Vec::new();
    if walls.is_empty() {
        for d in [
            QVec::from_i64(&[1, 0]),
            QVec::from_i64(&[0, 1]),
            QVec::from_i64(&[-1, 0]),
            QVec::from_i64(&[0, -1]),
        ] {
            dirs.push((d, VertexLabel::Reference));
        }
    } else {
        for w in &walls {
            let d = w.direction().primitive_signed();
            dirs.push((
                d.clone(),
                VertexLabel::WallDir {
                    wall: w.clone(),
                    orient: 1,
                },
            ));
            dirs.push((
                d.neg(),
                VertexLabel::WallDir {
                    wall: w.clone(),
                    orient: -1,
                },
            ));
        }
    }
    dirs.sort_by(|x, y| cyclic_cmp(&x.0, &y.0));
    build_circle(datum.metric.clone(), chart, dirs)
}

/// Assemble a circle link from cyclically sorted direction vectors.
pub fn build_circle(
    metric: QMat,
    chart: usize,
    dirs: Vec<(QVec, VertexLabel)>,
) -> Result<LinkSpace> {
    let n = dirs.len();
    assert!(n >= 2, "circle needs at least two subdivision directions");
    let verts: Vec<LinkVertex> = dirs
        .iter()
        .map(|(d, l)| LinkVertex {
            label: l.clone(),
            chart,
            dir: d.clone(),
        })
        .collect();
    let mut arcs = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let u0 = verts[i].dir.clone();
        let u1 = verts[j].dir.clone();
        let cr = u0.cross(&u1);
        let via = if cr.is_zero() {
            // Antipodal endpoints: angle exactly pi, insert a via direction.
            assert!(u0.dot(&u1).is_negative(), "coincident circle directions");
            Some(QVec(vec![-u0.0[1].clone(), u0.0[0].clone()]))
        } else {
            assert!(cr.is_positive(), "directions not in CCW order");
            None
        };
        let len = if via.is_some() {
            Angle::pi()
        } else {
            angle_between(&metric, &u0, &u1)
        };
        arcs.push(LinkArc {
            v0: i,
            v1: j,
            reps: vec![ArcRep {
                chart,
                u0,
                u1,
                via,
            }],
            len,
        });
    }
    let total: f64 = arcs.iter().map(|a| a.len.value).sum();
    if (total - 2.0 * std::f64::consts::PI).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "circle arcs sum to {} != 2pi",
            total
        )));
    }
    Ok(LinkSpace {
        topology: Topology::Circle,
        verts,
        arcs,
        metric,
        rank: 2,
    })
}

/// The direction at `a` of the straight segment toward `b`.
pub fn direction_of_segment(
    datum: &CoxeterDatum,
    link: &LinkSpace,
    a: &QVec,
    b: &QVec,
) -> Result<Direction> {
    let _ = datum;
    let v = b.sub(a);
    if v.is_zero() {
        return Err(Error::DegenerateSegment);
    }
    // Apartment links live in a single chart.
    let chart = link.verts.first().map(|x| x.chart).unwrap_or(0);
    link.locate(chart, &v.primitive_signed())
}

/// Euclidean angle at `a` between segments toward `b` and `c` (Gram form).
pub fn angle_between_segments(
    datum: &CoxeterDatum,
    a: &QVec,
    b: &QVec,
    c: &QVec,
) -> Result<Angle> {
    datum.angle_at(a, b, c)
}

/// Cut the subset of a link lying in the cone of directions `d` at the base
/// point that satisfy `c . d >= 0` for every covector in `constraints`
/// (chart-local, exact: constraints are linear in the arc parameter).
pub fn cone_subset(link: &LinkSpace, chart: usize, constraints: &[QVec]) -> LinkSubset {
    let mut subarcs = Vec::new();
    for (ai, arc) in link.arcs.iter().enumerate() {
        let rep = match arc.rep_in_chart(chart) {
            Some(r) => r,
            None => continue,
        };
        let pieces: Vec<(Rat, Rat)> = match &rep.via {
            None => clip_cone_piece(&rep.u0, &rep.u1, constraints)
                .into_iter()
                .map(|(a, b)| (a, b))
                .collect(),
            Some(via) => {
                let mut out = Vec::new();
                for (t0, t1) in clip_cone_piece(&rep.u0, via, constraints) {
                    out.push((t0 * rat(1, 2), t1 * rat(1, 2)));
                }
                for (t0, t1) in clip_cone_piece(via, &rep.u1, constraints) {
                    out.push((t0 * rat(1, 2) + rat(1, 2), t1 * rat(1, 2) + rat(1, 2)));
                }
                out
            }
        };
        for (t0, t1) in pieces {
            subarcs.push(SubArc { arc: ai, t0, t1 });
        }
    }
    LinkSubset { subarcs }.canonicalize()
}

/// Clip the projective segment `(1-s) u0 + s u1`, `s in [0,1]`, by the linear
/// constraints `c . dir >= 0`. Returns at most one interval.
fn clip_cone_piece(u0: &QVec, u1: &QVec, constraints: &[QVec]) -> Vec<(Rat, Rat)> {
    let mut lo = Rat::zero();
    let mut hi = Rat::one();
    for c in constraints {
        let a0 = c.dot(u0);
        let a1 = c.dot(u1);
        // value(s) = (1-s) a0 + s a1 >= 0
        let slope = &a1 - &a0;
        if slope.is_zero() {
            if a0.is_negative() {
                return vec![];
            }
            continue;
        }
        let root = -&a0 / &slope;
        if slope.is_positive() {
            if root > lo {
                lo = root;
            }
        } else if root < hi {
            hi = root;
        }
    }
    if lo <= hi {
        vec![(lo, hi)]
    } else {
        vec![]
    }
}

/// pi-convexity of a closed link subset: for every pair of points of S at
/// distance strictly less than pi, every geodesic between them lies in S.
pub fn is_pi_convex(s: &LinkSubset, link: &LinkSpace) -> ConvexityReport {
    let s = s.clone().canonicalize();
    match link.topology {
        Topology::ZeroSphere => ConvexityReport::pass(),
        Topology::Circle => pi_convex_circle(&s, link),
        Topology::Graph => pi_convex_graph(&s, link),
    }
}

/// Circle rule: S is pi-convex iff every complement gap has length >= pi.
fn pi_convex_circle(s: &LinkSubset, link: &LinkSpace) -> ConvexityReport {
    if s.is_empty() {
        return ConvexityReport::pass();
    }
    // Walk the circle collecting covered intervals in cyclic angular order.
    // Work with (arc, t)-pairs converted to boundary direction vectors.
    let n = link.arcs.len();
    let full: Vec<bool> = (0..n)
        .map(|i| s.covers_interval(i, &Rat::zero(), &Rat::one()))
        .collect();
    if full.iter().all(|&b| b) {
        return ConvexityReport::pass();
    }
    // Ordered list of covered pieces around the circle:
    // each piece = (start dir vector, end dir vector).
    let mut pieces: Vec<(QVec, QVec)> = Vec::new();
    for i in 0..n {
        let rep = link.arcs[i].rep();
        let mut local: Vec<&SubArc> = s.subarcs.iter().filter(|x| x.arc == i).collect();
        local.sort_by(|a, b| a.t0.cmp(&b.t0));
        for sa in local {
            pieces.push((
                rep.dir_at(&sa.t0).primitive_signed(),
                rep.dir_at(&sa.t1).primitive_signed(),
            ));
        }
    }
    // Merge pieces that are adjacent across shared endpoints.
    let mut merged: Vec<(QVec, QVec)> = Vec::new();
    for p in pieces {
        match merged.last_mut() {
            Some(last) if last.1 == p.0 => last.1 = p.1,
            _ => merged.push(p),
        }
    }
    // Wrap-around merge.
    while merged.len() > 1 && merged.last().unwrap().1 == merged[0].0 {
        let last = merged.pop().unwrap();
        merged[0].0 = last.0;
    }
    // Gaps between consecutive pieces (end of piece i to start of piece i+1).
    let m = merged.len();
    let mut witnesses = Vec::new();
    for i in 0..m {
        let end = &merged[i].1;
        let start = &merged[(i + 1) % m].0;
        if end == start {
            continue;
        }
        let gap = link.ccw_angle(end, start);
        let lt_pi = match &gap.exact_pi {
            Some(e) => *e < Rat::one(),
            None => gap.value < std::f64::consts::PI - 1e-12,
        };
        if lt_pi {
            witnesses.push(
                Witness::new(
                    "escaping_geodesic",
                    "gap shorter than pi: the geodesic between its boundary \
                     directions leaves the subset",
                )
                .with_direction(0, end)
                .with_direction(0, start)
                .with_value(gap.value),
            );
        }
    }
    if witnesses.is_empty() {
        ConvexityReport::pass()
    } else {
        ConvexityReport::fail(witnesses)
    }
}

/// Graph case: corner reduction over subarc endpoints and in-subset vertices.
fn pi_convex_graph(s: &LinkSubset, link: &LinkSpace) -> ConvexityReport {
    let candidates = s.critical_points(link);
    let mut witnesses = Vec::new();
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            let (d, paths) = link.shortest_paths(&candidates[i], &candidates[j]);
            if !(d < std::f64::consts::PI - 1e-12) {
                continue;
            }
            for path in &paths {
                if let Some(bad) = path.iter().find(|seg| !s.covers_segment(seg)) {
                    let (c1, v1) = link.dir_vector(&candidates[i]);
                    let (c2, v2) = link.dir_vector(&candidates[j]);
                    let mid = link.arcs[bad.arc]
                        .rep()
                        .dir_at(&((&bad.t0 + &bad.t1) * rat(1, 2)));
                    witnesses.push(
                        Witness::new(
                            "escaping_geodesic",
                            "a geodesic between subset points at distance < pi \
                             leaves the subset",
                        )
                        .with_direction(c1, &v1)
                        .with_direction(c2, &v2)
                        .with_direction(link.arcs[bad.arc].rep().chart, &mid)
                        .with_value(d),
                    );
                    break;
                }
            }
            if !witnesses.is_empty() {
                return ConvexityReport::fail(witnesses);
            }
        }
    }
    ConvexityReport::pass()
}

/// Shortest-path length within a subset (the length metric of S), plus the
/// verdict whether the two directions are connected inside S.
pub fn subset_distance(
    s: &LinkSubset,
    link: &LinkSpace,
    d1: &Direction,
    d2: &Direction,
) -> Option<f64> {
    let s = s.clone().canonicalize();
    // Dijkstra over a graph whose edges are the subarcs of S.
    // Nodes: link vertices in S + subarc endpoints + the two query points.
    let mut nodes: Vec<Direction> = Vec::new();
    let add = |d: Direction, nodes: &mut Vec<Direction>| -> usize {
        if let Some(i) = nodes.iter().position(|x| x == &d) {
            i
        } else {
            nodes.push(d);
            nodes.len() - 1
        }
    };
    if !s.contains(link, d1) || !s.contains(link, d2) {
        return None;
    }
    let start = add(d1.clone(), &mut nodes);
    let goal = add(d2.clone(), &mut nodes);
    // Edges: within each subarc, consecutive cut points.
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for sa in &s.subarcs {
        let mut cuts: Vec<(Rat, usize)> = Vec::new();
        let arc = &link.arcs[sa.arc];
        let endpoint_dir = |t: &Rat| -> Direction {
            if t.is_zero() {
                Direction::Vertex(arc.v0)
            } else if t.is_one() {
                Direction::Vertex(arc.v1)
            } else {
                Direction::Inside {
                    arc: sa.arc,
                    t: t.clone(),
                }
            }
        };
        cuts.push((sa.t0.clone(), add(endpoint_dir(&sa.t0), &mut nodes)));
        cuts.push((sa.t1.clone(), add(endpoint_dir(&sa.t1), &mut nodes)));
        for d in [d1, d2] {
            if let Direction::Inside { arc: a, t } = d {
                if *a == sa.arc && sa.t0 <= *t && *t <= sa.t1 {
                    cuts.push((t.clone(), add(d.clone(), &mut nodes)));
                }
            }
        }
        cuts.sort_by(|a, b| a.0.cmp(&b.0));
        cuts.dedup_by(|a, b| a.0 == b.0);
        for w in cuts.windows(2) {
            let off0 = link.offset_in_arc(sa.arc, &w[0].0).value;
            let off1 = link.offset_in_arc(sa.arc, &w[1].0).value;
            edges.push((w[0].1, w[1].1, (off1 - off0).max(0.0)));
        }
    }
    let nc = nodes.len();
    let mut dist = vec![f64::INFINITY; nc];
    dist[start] = 0.0;
    let mut done = vec![false; nc];
    loop {
        let mut best = usize::MAX;
        let mut bd = f64::INFINITY;
        for i in 0..nc {
            if !done[i] && dist[i] < bd {
                bd = dist[i];
                best = i;
            }
        }
        if best == usize::MAX {
            break;
        }
        done[best] = true;
        for (a, b, w) in &edges {
            for (from, to) in [(*a, *b), (*b, *a)] {
                if from == best && dist[best] + w < dist[to] {
                    dist[to] = dist[best] + w;
                }
            }
        }
    }
    if dist[goal].is_finite() {
        Some(dist[goal])
    } else {
        None
    }
}

/// Compare two directions by cyclic position (circle links only).
pub fn circle_cmp(link: &LinkSpace, a: &Direction, b: &Direction) -> Ordering {
    let pos = |d: &Direction| -> (usize, Rat) {
        match d {
            Direction::Vertex(v) => {
                // A vertex is the start of the arc with v0 == v.
                let arc = link.arcs.iter().position(|a| a.v0 == *v).unwrap();
                (arc, Rat::zero())
            }
            Direction::Inside { arc, t } => (*arc, t.clone()),
        }
    };
    let pa = pos(a);
    let pb = pos(b);
    pa.0.cmp(&pb.0).then(pa.1.cmp(&pb.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::TypeTag;
    
    use std::f64::consts::PI;

    fn a2() -> CoxeterDatum {
        CoxeterDatum::with_box(TypeTag::A2affine, 6)
    }

    #[test]
    fn a2_vertex_link_has_six_pi_over_3_arcs() {
        let d = a2();
        let link = apartment_link(&d, &QVec::from_i64(&[0, 0]), 0).unwrap();
        assert_eq!(link.topology, Topology::Circle);
        assert_eq!(link.arcs.len(), 6);
        for arc in &link.arcs {
            // Oracle: arc length from the Gram form equals pi/3 exactly.
            assert_eq!(arc.len.exact_pi, Some(rat(1, 3)));
        }
        let total: f64 = link.total_circumference();
        assert!((total - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn chamber_interior_link_is_unsubdivided() {
        let d = a2();
        let b = d.fundamental_chamber().barycenter();
        let link = apartment_link(&d, &b, 0).unwrap();
        assert!(link
            .verts
            .iter()
            .all(|v| matches!(v.label, VertexLabel::Reference)));
        assert!((link.total_circumference() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn panel_interior_link_has_two_pi_arcs() {
        let d = a2();
        let p = QVec(vec![rat(1, 2), Rat::zero()]);
        let link = apartment_link(&d, &p, 0).unwrap();
        assert_eq!(link.arcs.len(), 2);
        for arc in &link.arcs {
            assert_eq!(arc.len.exact_pi, Some(Rat::one()));
            assert!(arc.rep().via.is_some());
        }
    }

    #[test]
    fn direction_of_segment_examples() {
        let d = a2();
        let origin = QVec::from_i64(&[0, 0]);
        let link = apartment_link(&d, &origin, 0).unwrap();
        // b on a wall through a: a wall-direction vertex.
        let on_wall = direction_of_segment(&d, &link, &origin, &QVec::from_i64(&[2, 0])).unwrap();
        assert!(matches!(on_wall, Direction::Vertex(_)));
        // b the barycenter of the fundamental chamber: interior of its arc,
        // at angular midpoint (pi/6 from both bounding wall directions).
        let b = d.fundamental_chamber().barycenter();
        let dir = direction_of_segment(&d, &link, &origin, &b).unwrap();
        match &dir {
            Direction::Inside { arc, .. } => {
                let rep = link.arcs[*arc].rep();
                let (_, v) = link.dir_vector(&dir);
                let a0 = angle_between(&d.metric, &rep.u0, &v);
                let a1 = angle_between(&d.metric, &v, &rep.u1);
                // Oracle: inner products give pi/6 on both sides.
                assert_eq!(a0.exact_pi, Some(rat(1, 6)));
                assert_eq!(a1.exact_pi, Some(rat(1, 6)));
            }
            _ => panic!("expected interior direction"),
        }
        // a = b errors.
        assert!(direction_of_segment(&d, &link, &origin, &origin).is_err());
    }

    #[test]
    fn link_distance_examples() {
        let d = a2();
        let origin = QVec::from_i64(&[0, 0]);
        let link = apartment_link(&d, &origin, 0).unwrap();
        let dir1 = link.locate(0, &QVec::from_i64(&[1, 1])).unwrap();
        assert_eq!(link.distance(&dir1, &dir1).value, 0.0);
        // Two chamber barycenter directions two arcs apart: 2pi/3.
        // Oracle: sum of arc lengths both ways around, take the min.
        let u = QVec::from_i64(&[1, 1]); // mid of arc [e1, e2]
        let v = QVec::from_i64(&[-2, 1]); // mid of arc [(-1,1), (-1,0)]
        let du = link.locate(0, &u).unwrap();
        let dv = link.locate(0, &v).unwrap();
        let dist = link.distance(&du, &dv);
        let one_way = PI / 6.0 + PI / 3.0 + PI / 6.0; // 2pi/3
        let other_way = 2.0 * PI - one_way;
        assert!((dist.value - one_way.min(other_way)).abs() < 1e-12);
        assert_eq!(dist.exact_pi, Some(rat(2, 3)));
        // Antipodal directions on a circle: pi.
        let b = d.fundamental_chamber().barycenter();
        let clink = apartment_link(&d, &b, 0).unwrap();
        let p = clink.locate(0, &QVec::from_i64(&[5, 3])).unwrap();
        let q = clink.locate(0, &QVec::from_i64(&[-5, -3])).unwrap();
        assert_eq!(clink.distance(&p, &q).exact_pi, Some(Rat::one()));
    }

    #[test]
    fn angle_examples() {
        let d = a2();
        let a = QVec::from_i64(&[0, 0]);
        let b = QVec::from_i64(&[1, 2]);
        // b = c gives angle 0.
        assert_eq!(
            angle_between_segments(&d, &a, &b, &b).unwrap().exact_pi,
            Some(Rat::zero())
        );
        // Opposite points on a line through a: pi.
        let c = QVec::from_i64(&[-2, -4]);
        assert_eq!(
            angle_between_segments(&d, &a, &b, &c).unwrap().exact_pi,
            Some(Rat::one())
        );
        // Degenerate errors.
        assert!(angle_between_segments(&d, &a, &a, &b).is_err());
    }

    #[test]
    fn angle_equals_link_distance_below_pi() {
        let d = a2();
        let origin = QVec::from_i64(&[0, 0]);
        let link = apartment_link(&d, &origin, 0).unwrap();
        let pts = [
            QVec::from_i64(&[1, 1]),
            QVec::from_i64(&[2, -1]),
            QVec::from_i64(&[-1, 3]),
            QVec::from_i64(&[0, -2]),
            QVec::from_i64(&[5, 1]),
        ];
        for b in &pts {
            for c in &pts {
                if b == c {
                    continue;
                }
                let ang = angle_between_segments(&d, &origin, b, c).unwrap();
                let db = direction_of_segment(&d, &link, &origin, b).unwrap();
                let dc = direction_of_segment(&d, &link, &origin, c).unwrap();
                let dist = link.distance(&db, &dc);
                if ang.value < PI {
                    assert!(
                        (ang.value - dist.value).abs() < 1e-9,
                        "angle {} vs link distance {}",
                        ang.value,
                        dist.value
                    );
                }
            }
        }
    }

    #[test]
    fn pi_convex_examples() {
        let d = a2();
        let b = d.fundamental_chamber().barycenter();
        let link = apartment_link(&d, &b, 0).unwrap();
        // Whole circle.
        let whole = LinkSubset::whole(&link);
        assert!(is_pi_convex(&whole, &link).verdict);
        // A single closed arc of length <= pi: the quarter-ish arc 0.
        let s = LinkSubset {
            subarcs: vec![SubArc {
                arc: 0,
                t0: Rat::zero(),
                t1: Rat::one(),
            }],
        };
        assert!(is_pi_convex(&s, &link).verdict);
        // Circle minus an open arc of length pi/2 fails, witnesses = the two
        // boundary directions of the removed ball.
        let link4 = apartment_link(&CoxeterDatum::new(TypeTag::A1xA1), &QVec(vec![rat(1,2), rat(1,2)]), 0).unwrap();
        // Remove the open first quadrant arc (length pi/2): keep
        // [e2 .. e1 the long way].
        let s = LinkSubset {
            subarcs: vec![
                SubArc { arc: 1, t0: Rat::zero(), t1: Rat::one() },
                SubArc { arc: 2, t0: Rat::zero(), t1: Rat::one() },
                SubArc { arc: 3, t0: Rat::zero(), t1: Rat::one() },
            ],
        };
        let rep = is_pi_convex(&s, &link4);
        assert!(!rep.verdict);
        assert_eq!(rep.witnesses.len(), 1);
        let w = &rep.witnesses[0];
        assert!((w.values[0] - PI / 2.0).abs() < 1e-12);
        // The witness directions are the two boundary directions e2 and e1.
        assert_eq!(w.directions.len(), 2);
    }

    #[test]
    fn pi_convex_arc_length_threshold() {
        // Closed arc of length L is pi-convex iff L <= pi (or full circle),
        // swept over a grid of rational directions.
        let d = CoxeterDatum::new(TypeTag::A1xA1);
        let center = QVec(vec![rat(1, 2), rat(1, 2)]);
        let link = apartment_link(&d, &center, 0).unwrap();
        let dirs = [
            QVec::from_i64(&[1, 0]),
            QVec::from_i64(&[2, 1]),
            QVec::from_i64(&[1, 1]),
            QVec::from_i64(&[1, 2]),
            QVec::from_i64(&[0, 1]),
            QVec::from_i64(&[-1, 2]),
            QVec::from_i64(&[-1, 1]),
            QVec::from_i64(&[-2, 1]),
            QVec::from_i64(&[-1, 0]),
            QVec::from_i64(&[-2, -1]),
            QVec::from_i64(&[-1, -1]),
            QVec::from_i64(&[-1, -2]),
            QVec::from_i64(&[0, -1]),
            QVec::from_i64(&[1, -2]),
            QVec::from_i64(&[1, -1]),
        ];
        // Arc from dirs[0] CCW to dirs[k]: length = ccw angle.
        for (k, end) in dirs.iter().enumerate().skip(1) {
            let length = link.ccw_angle(&dirs[0], end).value;
            let s = arc_subset(&link, &dirs[0], end);
            let verdict = is_pi_convex(&s, &link).verdict;
            let expect = length <= PI + 1e-12;
            assert_eq!(verdict, expect, "k={} length={}", k, length);
        }
    }

    /// Subset = closed CCW arc from u to v on a circle link.
    fn arc_subset(link: &LinkSpace, u: &QVec, v: &QVec) -> LinkSubset {
        let du = link.locate(0, u).unwrap();
        let dv = link.locate(0, v).unwrap();
        let (au, tu) = match &du {
            Direction::Vertex(w) => (
                link.arcs.iter().position(|a| a.v0 == *w).unwrap(),
                Rat::zero(),
            ),
            Direction::Inside { arc, t } => (*arc, t.clone()),
        };
        let (av, tv) = match &dv {
            Direction::Vertex(w) => (
                link.arcs.iter().position(|a| a.v1 == *w).unwrap(),
                Rat::one(),
            ),
            Direction::Inside { arc, t } => (*arc, t.clone()),
        };
        let n = link.arcs.len();
        let mut subarcs = Vec::new();
        if au == av && tu <= tv {
            subarcs.push(SubArc {
                arc: au,
                t0: tu,
                t1: tv,
            });
        } else {
            subarcs.push(SubArc {
                arc: au,
                t0: tu,
                t1: Rat::one(),
            });
            let mut i = (au + 1) % n;
            while i != av {
                subarcs.push(SubArc {
                    arc: i,
                    t0: Rat::zero(),
                    t1: Rat::one(),
                });
                i = (i + 1) % n;
            }
            subarcs.push(SubArc {
                arc: av,
                t0: Rat::zero(),
                t1: tv,
            });
        }
        LinkSubset { subarcs }.canonicalize()
    }

    #[test]
    fn circle_counterexample_lengths() {
        // A = circle minus an open ball of radius pi/4 (an open arc of
        // length pi/2). The length metric between the boundary points is
        // 3pi/2 while the ambient geodesic has length pi/2.
        let d = CoxeterDatum::new(TypeTag::A1xA1);
        let center = QVec(vec![rat(1, 2), rat(1, 2)]);
        let link = apartment_link(&d, &center, 0).unwrap();
        let s = LinkSubset {
            subarcs: vec![
                SubArc { arc: 1, t0: Rat::zero(), t1: Rat::one() },
                SubArc { arc: 2, t0: Rat::zero(), t1: Rat::one() },
                SubArc { arc: 3, t0: Rat::zero(), t1: Rat::one() },
            ],
        };
        let p = link.locate(0, &QVec::from_i64(&[0, 1])).unwrap();
        let q = link.locate(0, &QVec::from_i64(&[1, 0])).unwrap();
        let inside = subset_distance(&s, &link, &p, &q).unwrap();
        assert!((inside - 3.0 * PI / 2.0).abs() < 1e-9);
        let ambient = link.distance(&p, &q);
        assert_eq!(ambient.exact_pi, Some(rat(1, 2)));
    }

    #[test]
    fn metric_properties_on_random_triples() {
        let d = a2();
        let origin = QVec::from_i64(&[0, 0]);
        let link = apartment_link(&d, &origin, 0).unwrap();
        let dirs: Vec<Direction> = [
            [3i64, 1],
            [1, 4],
            [-2, 5],
            [-3, -1],
            [1, -3],
            [7, -2],
        ]
        .iter()
        .map(|c| link.locate(0, &QVec::from_i64(c)).unwrap())
        .collect();
        for a in &dirs {
            for b in &dirs {
                let dab = link.distance(a, b).value;
                let dba = link.distance(b, a).value;
                assert!((dab - dba).abs() < 1e-12, "symmetry");
                for c in &dirs {
                    let dac = link.distance(a, c).value;
                    let dcb = link.distance(c, b).value;
                    assert!(dab <= dac + dcb + 1e-12, "triangle inequality");
                }
            }
        }
    }

    #[test]
    fn cone_subset_on_vertex_link() {
        let d = a2();
        let origin = QVec::from_i64(&[0, 0]);
        let link = apartment_link(&d, &origin, 0).unwrap();
        // Directions into the closed fundamental cone {a1 >= 0, a2 >= 0}.
        let cone = cone_subset(
            &link,
            0,
            &[QVec::from_i64(&[1, 0]), QVec::from_i64(&[0, 1])],
        );
        let total = cone.total_length(&link);
        assert!((total - PI / 3.0).abs() < 1e-12);
        assert!(cone.contains(&link, &link.locate(0, &QVec::from_i64(&[1, 1])).unwrap()));
        assert!(!cone.contains(&link, &link.locate(0, &QVec::from_i64(&[-1, 2])).unwrap()));
    }
}
