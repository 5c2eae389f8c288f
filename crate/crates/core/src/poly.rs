//! Exact rational convex polyhedra in rank 1 and 2 (H-representation).
//!
//! Handles unbounded and lower-dimensional sets: halfplanes, strips, cones,
//! segments, points. Vertex/ray extraction, segment clipping, facet
//! enumeration, and metric nearest-point projection are all exact.

use crate::exact::{QMat, QVec, Rat};
use num_traits::{Signed, Zero};

/// Closed halfspace `normal . x <= rhs` (standard pairing, no metric).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Halfspace {
    pub normal: QVec,
    pub rhs: Rat,
}

impl Halfspace {
    pub fn new(normal: QVec, rhs: Rat) -> Self {
        Halfspace { normal, rhs }
    }

    /// Scale so the normal is a primitive integer covector. Positive scaling
    /// only: the halfspace orientation is preserved.
    pub fn normalized(&self) -> Halfspace {
        let prim = self.normal.primitive();
        // primitive() may flip sign; find the positive scale factor instead.
        let k = self
            .normal
            .0
            .iter()
            .zip(&prim.0)
            .find(|(a, _)| !a.is_zero())
            .map(|(a, p)| a / p)
            .unwrap_or_else(Rat::zero);
        if k.is_positive() {
            Halfspace {
                normal: prim,
                rhs: &self.rhs / &k,
            }
        } else if k.is_negative() {
            Halfspace {
                normal: prim.neg(),
                rhs: &self.rhs / &(-k),
            }
        } else {
            self.clone()
        }
    }

    pub fn contains(&self, p: &QVec) -> bool {
        self.normal.dot(p) <= self.rhs
    }

    pub fn on_boundary(&self, p: &QVec) -> bool {
        self.normal.dot(p) == self.rhs
    }
}

/// Closed rational interval with infinite ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Option<Rat>,
    pub hi: Option<Rat>,
}

impl RatInterval {
    pub fn all() -> Self {
        RatInterval { lo: None, hi: None }
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => a > b,
            _ => false,
        }
    }

    pub fn clamp_lo(&mut self, v: Rat) {
        match &self.lo {
            Some(a) if *a >= v => {}
            _ => self.lo = Some(v),
        }
    }

    pub fn clamp_hi(&mut self, v: Rat) {
        match &self.hi {
            Some(a) if *a <= v => {}
            _ => self.hi = Some(v),
        }
    }
}

/// Convex polyhedron as an intersection of closed halfspaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl Polyhedron {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Self {
        Polyhedron { dim, halfspaces }
    }

    pub fn whole(dim: usize) -> Self {
        Polyhedron {
            dim,
            halfspaces: Vec::new(),
        }
    }

    /// Convex hull of finitely many points, as an H-rep polyhedron (rank 2).
    pub fn from_points(points: &[QVec]) -> Self {
        assert!(!points.is_empty());
        let dim = points[0].dim();
        if dim == 1 {
            let lo = points.iter().map(|p| p.0[0].clone()).min().unwrap();
            let hi = points.iter().map(|p| p.0[0].clone()).max().unwrap();
            return Polyhedron::new(
                1,
                vec![
                    Halfspace::new(QVec::from_i64(&[1]), hi),
                    Halfspace::new(QVec::from_i64(&[-1]), -lo),
                ],
            );
        }
        let hull = convex_hull_2d(points);
        match hull.len() {
            1 => {
                let p = &hull[0];
                Polyhedron::new(
                    2,
                    vec![
                        Halfspace::new(QVec::from_i64(&[1, 0]), p.0[0].clone()),
                        Halfspace::new(QVec::from_i64(&[-1, 0]), -p.0[0].clone()),
                        Halfspace::new(QVec::from_i64(&[0, 1]), p.0[1].clone()),
                        Halfspace::new(QVec::from_i64(&[0, -1]), -p.0[1].clone()),
                    ],
                )
            }
            2 => {
                let (a, b) = (&hull[0], &hull[1]);
                let d = b.sub(a);
                // Normal to the segment line plus the two end caps.
                let n = QVec(vec![-d.0[1].clone(), d.0[0].clone()]);
                let c = n.dot(a);
                let mut hs = vec![
                    Halfspace::new(n.clone(), c.clone()),
                    Halfspace::new(n.neg(), -c),
                ];
                // caps: d.x <= d.b and -d.x <= -d.a
                hs.push(Halfspace::new(d.clone(), d.dot(b)));
                hs.push(Halfspace::new(d.neg(), -d.dot(a)));
                Polyhedron::new(2, hs)
            }
            _ => {
                let mut hs = Vec::new();
                let n = hull.len();
                for i in 0..n {
                    let a = &hull[i];
                    let b = &hull[(i + 1) % n];
                    let d = b.sub(a);
                    // CCW hull: interior is to the left of a->b; outward normal (d.y, -d.x).
                    let nrm = QVec(vec![d.0[1].clone(), -d.0[0].clone()]);
                    hs.push(Halfspace::new(nrm.clone(), nrm.dot(a)).normalized());
                }
                Polyhedron::new(2, hs)
            }
        }
    }

    pub fn contains(&self, p: &QVec) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p))
    }

    pub fn intersect_halfspace(&self, h: Halfspace) -> Polyhedron {
        let mut out = self.clone();
        out.halfspaces.push(h);
        out
    }

    pub fn intersect(&self, o: &Polyhedron) -> Polyhedron {
        let mut out = self.clone();
        out.halfspaces.extend(o.halfspaces.iter().cloned());
        out
    }

    /// Lineality space dimension and basis (directions `d` with `a.d = 0` for
    /// every constraint).
    pub fn lineality(&self) -> Vec<QVec> {
        let mut normals: Vec<&QVec> = self.halfspaces.iter().map(|h| &h.normal).collect();
        normals.retain(|n| !n.is_zero());
        if self.dim == 1 {
            return if normals.is_empty() {
                vec![QVec::from_i64(&[1])]
            } else {
                vec![]
            };
        }
        match normals.len() {
            0 => vec![QVec::from_i64(&[1, 0]), QVec::from_i64(&[0, 1])],
            _ => {
                let first = normals[0].primitive();
                if normals.iter().all(|n| n.primitive() == first) {
                    // All normals parallel: kernel is the perpendicular line.
                    vec![QVec(vec![-first.0[1].clone(), first.0[0].clone()])]
                } else {
                    vec![]
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        if self.dim == 1 {
            return self.interval_1d().is_empty();
        }
        let lin = self.lineality();
        match lin.len() {
            2 => false,
            1 => {
                // Quotient to 1D along the lineality direction.
                let d = &lin[0];
                // Choose e with some normal value nonzero.
                let e = if self
                    .halfspaces
                    .iter()
                    .any(|h| !h.normal.dot(&QVec::from_i64(&[1, 0])).is_zero())
                {
                    QVec::from_i64(&[1, 0])
                } else {
                    QVec::from_i64(&[0, 1])
                };
                let _ = d;
                let mut iv = RatInterval::all();
                for h in &self.halfspaces {
                    let a = h.normal.dot(&e);
                    if a.is_zero() {
                        if h.rhs.is_negative() {
                            return true;
                        }
                        continue;
                    }
                    let bound = &h.rhs / &a;
                    if a.is_positive() {
                        iv.clamp_hi(bound);
                    } else {
                        iv.clamp_lo(bound);
                    }
                }
                iv.is_empty()
            }
            _ => self.vertices().is_empty(),
        }
    }

    fn interval_1d(&self) -> RatInterval {
        let mut iv = RatInterval::all();
        for h in &self.halfspaces {
            let a = &h.normal.0[0];
            if a.is_zero() {
                if h.rhs.is_negative() {
                    return RatInterval {
                        lo: Some(Rat::zero()),
                        hi: Some(-Rat::from_integer(1.into())),
                    };
                }
                continue;
            }
            let bound = &h.rhs / a;
            if a.is_positive() {
                iv.clamp_hi(bound);
            } else {
                iv.clamp_lo(bound);
            }
        }
        iv
    }

    /// Vertices (0-dimensional faces), exact. Empty for sets with a lineality
    /// direction (strips, halfplanes, lines) and for the empty set.
    pub fn vertices(&self) -> Vec<QVec> {
        if self.dim == 1 {
            let iv = self.interval_1d();
            if iv.is_empty() {
                return vec![];
            }
            let mut out = vec![];
            if let Some(lo) = iv.lo {
                out.push(QVec(vec![lo]));
            }
            if let Some(hi) = iv.hi {
                let v = QVec(vec![hi]);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            out.sort();
            return out;
        }
        let n = self.halfspaces.len();
        let mut out: Vec<QVec> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = &self.halfspaces[i];
                let b = &self.halfspaces[j];
                if let Some(p) = line_intersection(a, b) {
                    if self.contains(&p) && !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Extreme rays of the recession cone (primitive). Lineality directions
    /// are reported as a pair of opposite rays.
    pub fn recession_rays(&self) -> Vec<QVec> {
        if self.dim == 1 {
            let iv = self.interval_1d();
            if iv.is_empty() {
                return vec![];
            }
            let mut out = vec![];
            if iv.lo.is_none() {
                out.push(QVec::from_i64(&[-1]));
            }
            if iv.hi.is_none() {
                out.push(QVec::from_i64(&[1]));
            }
            return out;
        }
        if self.is_empty() {
            return vec![];
        }
        let feasible_dir = |d: &QVec| {
            self.halfspaces
                .iter()
                .all(|h| !h.normal.dot(d).is_positive())
        };
        let lin = self.lineality();
        match lin.len() {
            2 => vec![
                QVec::from_i64(&[1, 0]),
                QVec::from_i64(&[-1, 0]),
                QVec::from_i64(&[0, 1]),
                QVec::from_i64(&[0, -1]),
            ],
            1 => {
                // Lineality line plus at most one pointed quotient ray.
                let l = lin[0].primitive_signed();
                let mut out = vec![l.clone(), l.neg().primitive_signed()];
                let e = if self
                    .halfspaces
                    .iter()
                    .any(|h| !h.normal.dot(&QVec::from_i64(&[1, 0])).is_zero())
                {
                    QVec::from_i64(&[1, 0])
                } else {
                    QVec::from_i64(&[0, 1])
                };
                if feasible_dir(&e) {
                    out.push(e.primitive_signed());
                } else if feasible_dir(&e.neg()) {
                    out.push(e.neg().primitive_signed());
                }
                out
            }
            _ => {
                // Pointed cone: extreme rays lie on constraint boundaries.
                let mut cands: Vec<QVec> = Vec::new();
                for h in &self.halfspaces {
                    if h.normal.is_zero() {
                        continue;
                    }
                    let perp = QVec(vec![-h.normal.0[1].clone(), h.normal.0[0].clone()]);
                    for v in [perp.primitive_signed(), perp.neg().primitive_signed()] {
                        if !v.is_zero() && !cands.contains(&v) {
                            cands.push(v);
                        }
                    }
                }
                let feasible: Vec<QVec> = cands.into_iter().filter(|d| feasible_dir(d)).collect();
                extreme_rays_2d(feasible)
            }
        }
    }

    /// Clip the segment `p + t (q - p)`, `t in [0,1]`, to the polyhedron.
    /// Returns the rational parameter subinterval, or None if disjoint.
    pub fn clip_segment(&self, p: &QVec, q: &QVec) -> Option<(Rat, Rat)> {
        let d = q.sub(p);
        let mut lo = Rat::zero();
        let mut hi = Rat::from_integer(1.into());
        for h in &self.halfspaces {
            let ad = h.normal.dot(&d);
            let ap = h.normal.dot(p);
            if ad.is_zero() {
                if ap > h.rhs {
                    return None;
                }
                continue;
            }
            let t = (&h.rhs - &ap) / &ad;
            if ad.is_positive() {
                if t < hi {
                    hi = t;
                }
            } else if t > lo {
                lo = t;
            }
        }
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    /// Affine dimension: None if empty, else 0..=dim.
    pub fn affine_dim(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        if self.dim == 1 {
            let iv = self.interval_1d();
            return Some(match (&iv.lo, &iv.hi) {
                (Some(a), Some(b)) if a == b => 0,
                _ => 1,
            });
        }
        let lin = self.lineality();
        if lin.len() == 2 {
            return Some(2);
        }
        if lin.len() == 1 {
            // Quotient along the lineality direction is a 1D interval.
            let e = if self
                .halfspaces
                .iter()
                .any(|h| !h.normal.dot(&QVec::from_i64(&[1, 0])).is_zero())
            {
                QVec::from_i64(&[1, 0])
            } else {
                QVec::from_i64(&[0, 1])
            };
            let mut iv = RatInterval::all();
            for h in &self.halfspaces {
                let a = h.normal.dot(&e);
                if a.is_zero() {
                    continue;
                }
                let bound = &h.rhs / &a;
                if a.is_positive() {
                    iv.clamp_hi(bound);
                } else {
                    iv.clamp_lo(bound);
                }
            }
            let flat = matches!((&iv.lo, &iv.hi), (Some(a), Some(b)) if a == b);
            return Some(if flat { 1 } else { 2 });
        }
        let pts = self.vertices();
        let rays = self.recession_rays();
        debug_assert!(!pts.is_empty());
        let base = pts[0].clone();
        let mut dirs: Vec<QVec> = pts[1..].iter().map(|p| p.sub(&base)).collect();
        dirs.extend(rays);
        let mut rank = 0usize;
        let mut first: Option<QVec> = None;
        for d in dirs {
            if d.is_zero() {
                continue;
            }
            match &first {
                None => {
                    first = Some(d);
                    rank = 1;
                }
                Some(f) => {
                    if !f.cross(&d).is_zero() {
                        rank = 2;
                        break;
                    }
                }
            }
        }
        Some(rank)
    }

    /// Some feasible point (exact), or None if empty.
    pub fn some_point(&self) -> Option<QVec> {
        if self.is_empty() {
            return None;
        }
        if self.dim == 1 {
            let iv = self.interval_1d();
            return Some(QVec(vec![match (&iv.lo, &iv.hi) {
                (Some(a), Some(b)) => (a + b) / Rat::from_integer(2.into()),
                (Some(a), None) => a + Rat::from_integer(1.into()),
                (None, Some(b)) => b - Rat::from_integer(1.into()),
                (None, None) => Rat::zero(),
            }]));
        }
        let vs = self.vertices();
        if !vs.is_empty() {
            // Average of vertices is feasible by convexity.
            let n = Rat::from_integer((vs.len() as i64).into());
            let mut s = QVec::zeros(2);
            for v in &vs {
                s = s.add(v);
            }
            return Some(QVec(s.0.iter().map(|c| c / &n).collect()));
        }
        // Lineality >= 1: solve the 1D quotient and lift.
        let lin = self.lineality();
        if lin.len() == 2 {
            return Some(QVec::zeros(2));
        }
        let e = if self
            .halfspaces
            .iter()
            .any(|h| !h.normal.dot(&QVec::from_i64(&[1, 0])).is_zero())
        {
            QVec::from_i64(&[1, 0])
        } else {
            QVec::from_i64(&[0, 1])
        };
        let mut iv = RatInterval::all();
        for h in &self.halfspaces {
            let a = h.normal.dot(&e);
            if a.is_zero() {
                continue;
            }
            let bound = &h.rhs / &a;
            if a.is_positive() {
                iv.clamp_hi(bound);
            } else {
                iv.clamp_lo(bound);
            }
        }
        let t = match (&iv.lo, &iv.hi) {
            (Some(a), Some(b)) => (a + b) / Rat::from_integer(2.into()),
            (Some(a), None) => a + Rat::from_integer(1.into()),
            (None, Some(b)) => b - Rat::from_integer(1.into()),
            (None, None) => Rat::zero(),
        };
        Some(e.scale(&t))
    }

    /// Faces induced by each distinct boundary line: `(halfspace, endpoints,
    /// unbounded ray directions)`. Skips constraints whose face is empty.
    pub fn boundary_faces(&self) -> Vec<Face> {
        let mut out: Vec<Face> = Vec::new();
        let mut seen: Vec<(QVec, Rat)> = Vec::new();
        for h in &self.halfspaces {
            let hn = h.normalized();
            if hn.normal.is_zero() {
                continue;
            }
            let key = (hn.normal.clone(), hn.rhs.clone());
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            if let Some(face) = self.face_on(&hn) {
                out.push(face);
            }
        }
        out
    }

    fn face_on(&self, h: &Halfspace) -> Option<Face> {
        if self.dim == 1 {
            let a = &h.normal.0[0];
            if a.is_zero() {
                return None;
            }
            let x = &h.rhs / a;
            let p = QVec(vec![x]);
            if self.contains(&p) {
                return Some(Face {
                    halfspace: h.clone(),
                    endpoints: vec![p],
                    ray_dirs: vec![],
                });
            }
            return None;
        }
        // Point on the line and its direction.
        let n = &h.normal;
        let d = QVec(vec![-n.0[1].clone(), n.0[0].clone()]);
        let nn = n.dot(n);
        let p0 = QVec(vec![
            &n.0[0] * &h.rhs / &nn,
            &n.0[1] * &h.rhs / &nn,
        ]);
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for g in &self.halfspaces {
            let ad = g.normal.dot(&d);
            let ap = g.normal.dot(&p0);
            if ad.is_zero() {
                if ap > g.rhs {
                    return None;
                }
                continue;
            }
            let t = (&g.rhs - &ap) / &ad;
            if ad.is_positive() {
                match &hi {
                    Some(x) if *x <= t => {}
                    _ => hi = Some(t),
                }
            } else {
                match &lo {
                    Some(x) if *x >= t => {}
                    _ => lo = Some(t),
                }
            }
        }
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a > b {
                return None;
            }
        }
        let mut endpoints = vec![];
        let mut ray_dirs = vec![];
        match lo {
            Some(t) => endpoints.push(p0.add(&d.scale(&t))),
            None => ray_dirs.push(d.neg().primitive_signed()),
        }
        match hi {
            Some(t) => {
                let p = p0.add(&d.scale(&t));
                if !endpoints.contains(&p) {
                    endpoints.push(p);
                }
            }
            None => ray_dirs.push(d.primitive_signed()),
        }
        endpoints.sort();
        Some(Face {
            halfspace: h.clone(),
            endpoints,
            ray_dirs,
        })
    }

    /// Exact nearest point of the polyhedron under the metric `M` and the
    /// squared distance. None if empty.
    pub fn nearest_point(&self, metric: &QMat, x: &QVec) -> Option<(QVec, Rat)> {
        if self.contains(x) {
            return Some((x.clone(), Rat::zero()));
        }
        let dist_sq = |p: &QVec| {
            let d = x.sub(p);
            crate::angle::vec_len_sq(metric, &d)
        };
        let mut best: Option<(QVec, Rat)> = None;
        let consider = |p: QVec, best: &mut Option<(QVec, Rat)>| {
            let ds = dist_sq(&p);
            match best {
                Some((_, b)) if *b <= ds => {}
                _ => *best = Some((p, ds)),
            }
        };
        for face in self.boundary_faces() {
            // Metric projection of x onto the face line, clamped to the face.
            let h = &face.halfspace;
            if self.dim == 1 {
                for e in &face.endpoints {
                    consider(e.clone(), &mut best);
                }
                continue;
            }
            let ndual = metric
                .inverse()
                .expect("metric invertible")
                .mul_vec(&h.normal);
            let denom = h.normal.dot(&ndual);
            let t = (&h.normal.dot(x) - &h.rhs) / &denom;
            let proj = x.sub(&ndual.scale(&t));
            // Clamp along the face.
            let candidate = clamp_to_face(&proj, &face);
            if self.contains(&candidate) {
                consider(candidate, &mut best);
            }
            for e in &face.endpoints {
                consider(e.clone(), &mut best);
            }
        }
        best
    }
}

/// A facet-level face of a polyhedron: the boundary segment/ray/line lying on
/// one constraint line.
#[derive(Clone, Debug)]
pub struct Face {
    pub halfspace: Halfspace,
    pub endpoints: Vec<QVec>,
    pub ray_dirs: Vec<QVec>,
}

impl Face {
    pub fn is_unbounded(&self) -> bool {
        !self.ray_dirs.is_empty()
    }

    pub fn midpoint(&self) -> Option<QVec> {
        match self.endpoints.len() {
            2 => {
                let h = Rat::new(1.into(), 2.into());
                Some(self.endpoints[0].add(&self.endpoints[1]).scale(&h))
            }
            1 => {
                if let Some(r) = self.ray_dirs.first() {
                    Some(self.endpoints[0].add(r))
                } else {
                    Some(self.endpoints[0].clone())
                }
            }
            _ => None,
        }
    }
}

fn clamp_to_face(p: &QVec, face: &Face) -> QVec {
    if face.endpoints.len() == 2 {
        let a = &face.endpoints[0];
        let b = &face.endpoints[1];
        let d = b.sub(a);
        let dd = d.dot(&d);
        if dd.is_zero() {
            return a.clone();
        }
        let t = p.sub(a).dot(&d) / dd;
        if t.is_negative() {
            a.clone()
        } else if t > Rat::from_integer(1.into()) {
            b.clone()
        } else {
            a.add(&d.scale(&t))
        }
    } else if face.endpoints.len() == 1 && face.ray_dirs.len() == 1 {
        let a = &face.endpoints[0];
        let r = &face.ray_dirs[0];
        let t = p.sub(a).dot(r) / r.dot(r);
        if t.is_negative() {
            a.clone()
        } else {
            a.add(&r.scale(&t))
        }
    } else {
        p.clone()
    }
}

impl QVec {
    /// Primitive representative of the ray through `self` in the SAME
    /// direction (never flips sign, unlike `primitive`).
    pub fn primitive_signed(&self) -> QVec {
        let p = self.primitive();
        // primitive() may have flipped; undo if so.
        let flip = self
            .0
            .iter()
            .zip(&p.0)
            .find(|(a, _)| !a.is_zero())
            .map(|(a, b)| a.is_positive() != b.is_positive())
            .unwrap_or(false);
        if flip {
            p.neg()
        } else {
            p
        }
    }
}

fn line_intersection(a: &Halfspace, b: &Halfspace) -> Option<QVec> {
    let det = a.normal.cross(&b.normal);
    if det.is_zero() {
        return None;
    }
    let x = (&a.rhs * &b.normal.0[1] - &b.rhs * &a.normal.0[1]) / &det;
    let y = (&a.normal.0[0] * &b.rhs - &b.normal.0[0] * &a.rhs) / &det;
    Some(QVec(vec![x, y]))
}

/// Angular extremes of a set of rays known to span a pointed cone (or less).
fn extreme_rays_2d(rays: Vec<QVec>) -> Vec<QVec> {
    match rays.len() {
        0 | 1 => rays,
        _ => {
            let mut best: Option<(QVec, QVec)> = None;
            for a in &rays {
                for b in &rays {
                    let cr = a.cross(b);
                    if !cr.is_positive() {
                        continue;
                    }
                    // All other rays must lie between a and b (CCW).
                    let inside = rays.iter().all(|r| {
                        !a.cross(r).is_negative() && !r.cross(b).is_negative()
                    });
                    if inside {
                        best = Some((a.clone(), b.clone()));
                    }
                }
            }
            match best {
                Some((a, b)) => vec![a, b],
                None => {
                    // All rays parallel (same direction after dedup impossible)
                    // or opposite: report them as-is.
                    rays
                }
            }
        }
    }
}

/// Exact 2D convex hull (Andrew monotone chain), CCW orientation, no
/// collinear points on the hull boundary.
pub fn convex_hull_2d(points: &[QVec]) -> Vec<QVec> {
    let mut pts: Vec<QVec> = points.to_vec();
    pts.sort();
    pts.dedup();
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let cross3 = |o: &QVec, a: &QVec, b: &QVec| a.sub(o).cross(&b.sub(o));
    let mut lower: Vec<QVec> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && !cross3(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<QVec> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !cross3(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_i};

    fn hs(n: &[i64], c: i64) -> Halfspace {
        Halfspace::new(QVec::from_i64(n), rat_i(c))
    }

    fn unit_square() -> Polyhedron {
        Polyhedron::new(
            2,
            vec![hs(&[1, 0], 1), hs(&[-1, 0], 0), hs(&[0, 1], 1), hs(&[0, -1], 0)],
        )
    }

    #[test]
    fn square_vertices() {
        let p = unit_square();
        let vs = p.vertices();
        assert_eq!(vs.len(), 4);
        assert!(vs.contains(&QVec::from_i64(&[0, 0])));
        assert!(vs.contains(&QVec::from_i64(&[1, 1])));
        assert_eq!(p.affine_dim(), Some(2));
        assert!(p.recession_rays().is_empty());
    }

    #[test]
    fn halfplane_and_strip() {
        let hp = Polyhedron::new(2, vec![hs(&[1, 0], 0)]);
        assert!(!hp.is_empty());
        assert!(hp.vertices().is_empty());
        assert_eq!(hp.affine_dim(), Some(2));
        let rays = hp.recession_rays();
        assert!(!rays.is_empty());
        let strip = Polyhedron::new(2, vec![hs(&[1, 0], 1), hs(&[-1, 0], 0)]);
        assert!(!strip.is_empty());
        assert_eq!(strip.affine_dim(), Some(2));
        let empty = Polyhedron::new(2, vec![hs(&[1, 0], -1), hs(&[-1, 0], 0)]);
        assert!(empty.is_empty());
    }

    #[test]
    fn segment_as_polyhedron() {
        // Segment from (0,0) to (1,1).
        let p = Polyhedron::from_points(&[QVec::from_i64(&[0, 0]), QVec::from_i64(&[1, 1])]);
        assert_eq!(p.affine_dim(), Some(1));
        let vs = p.vertices();
        assert_eq!(vs.len(), 2);
        assert!(p.contains(&QVec(vec![rat(1, 2), rat(1, 2)])));
        assert!(!p.contains(&QVec(vec![rat(1, 2), rat(1, 3)])));
    }

    #[test]
    fn clip_segment_through_square() {
        let p = unit_square();
        let a = QVec(vec![rat(-1, 1), rat(1, 2)]);
        let b = QVec(vec![rat(2, 1), rat(1, 2)]);
        let (t0, t1) = p.clip_segment(&a, &b).unwrap();
        assert_eq!(t0, rat(1, 3));
        assert_eq!(t1, rat(2, 3));
        let out = p.clip_segment(&QVec::from_i64(&[5, 5]), &QVec::from_i64(&[6, 5]));
        assert!(out.is_none());
    }

    #[test]
    fn nearest_point_euclidean() {
        let p = unit_square();
        let m = QMat::identity(2);
        let (np, d2) = p.nearest_point(&m, &QVec::from_i64(&[3, 0])).unwrap();
        assert_eq!(np, QVec::from_i64(&[1, 0]));
        assert_eq!(d2, rat_i(4));
        let (np, d2) = p.nearest_point(&m, &QVec::from_i64(&[2, 3])).unwrap();
        assert_eq!(np, QVec::from_i64(&[1, 1]));
        assert_eq!(d2, rat_i(5));
        // Interior point projects to itself.
        let x = QVec(vec![rat(1, 2), rat(1, 2)]);
        let (np, d2) = p.nearest_point(&m, &x).unwrap();
        assert_eq!(np, x);
        assert!(d2.is_zero());
    }

    #[test]
    fn hull_and_from_points() {
        let pts = vec![
            QVec::from_i64(&[0, 0]),
            QVec::from_i64(&[2, 0]),
            QVec::from_i64(&[1, 1]),
            QVec::from_i64(&[2, 2]),
            QVec::from_i64(&[0, 2]),
            QVec::from_i64(&[1, 1]),
        ];
        let hull = convex_hull_2d(&pts);
        assert_eq!(hull.len(), 4);
        let p = Polyhedron::from_points(&pts);
        assert!(p.contains(&QVec::from_i64(&[1, 1])));
        assert!(!p.contains(&QVec::from_i64(&[3, 1])));
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn boundary_faces_of_cone() {
        // Quadrant cone at origin.
        let p = Polyhedron::new(2, vec![hs(&[-1, 0], 0), hs(&[0, -1], 0)]);
        let faces = p.boundary_faces();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.is_unbounded()));
        let rays = p.recession_rays();
        assert_eq!(rays.len(), 2);
        assert!(rays.contains(&QVec::from_i64(&[1, 0])));
        assert!(rays.contains(&QVec::from_i64(&[0, 1])));
    }
}
