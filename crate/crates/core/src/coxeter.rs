//! Exact model of an affine Coxeter complex: walls, cells, chambers,
//! galleries, and chamber projections over a rational Gram form.
//!
//! Coordinates live in a coroot-style basis so that root covectors are
//! primitive integer vectors and the Gram matrix is rational for every
//! supported type (including A2affine and G2affine). The arrangement is the
//! set of walls `alpha . x = k` for positive roots `alpha` and integers `k`,
//! materialized inside a configurable coordinate box.

use crate::angle::{angle_between, cos_data, Angle};
use crate::error::{Error, Result};
use crate::exact::{rat, rat_i, AffineMap, QMat, QVec, Rat};
use crate::poly::{Halfspace, Polyhedron};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::OnceLock;

/// Supported affine Weyl group types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TypeTag {
    A1affine,
    A1xA1,
    A2affine,
    C2affine,
    G2affine,
}

impl TypeTag {
    pub fn parse(s: &str) -> Option<TypeTag> {
        match s {
            "A1affine" => Some(TypeTag::A1affine),
            "A1xA1" => Some(TypeTag::A1xA1),
            "A2affine" => Some(TypeTag::A2affine),
            "C2affine" => Some(TypeTag::C2affine),
            "G2affine" => Some(TypeTag::G2affine),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TypeTag::A1affine => "A1affine",
            TypeTag::A1xA1 => "A1xA1",
            TypeTag::A2affine => "A2affine",
            TypeTag::C2affine => "C2affine",
            TypeTag::G2affine => "G2affine",
        }
    }
}

/// Exact sign of `normal . p - offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Zero,
    Plus,
}

impl Side {
    pub fn of(r: &Rat) -> Side {
        if r.is_zero() {
            Side::Zero
        } else if r.is_positive() {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
            Side::Zero => Side::Zero,
        }
    }
}

/// A wall `normal . x = offset` in canonical scaling: the normal is a
/// primitive integer covector whose first nonzero entry is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wall {
    pub normal: QVec,
    pub offset: Rat,
}

impl Wall {
    /// Canonicalize arbitrary wall data. Unique per geometric wall.
    pub fn new(normal: QVec, offset: Rat) -> Wall {
        assert!(!normal.is_zero(), "wall normal must be nonzero");
        let prim = normal.primitive();
        let k = normal
            .0
            .iter()
            .zip(&prim.0)
            .find(|(a, _)| !a.is_zero())
            .map(|(a, p)| a / p)
            .expect("nonzero");
        Wall {
            normal: prim,
            offset: offset / k,
        }
    }

    pub fn from_i64(normal: &[i64], offset_num: i64, offset_den: i64) -> Wall {
        Wall::new(QVec::from_i64(normal), rat(offset_num, offset_den))
    }

    /// The halfspace on the given side of the wall.
    pub fn halfspace(&self, side: Side) -> Halfspace {
        match side {
            Side::Plus => Halfspace::new(self.normal.neg(), -self.offset.clone()),
            Side::Minus => Halfspace::new(self.normal.clone(), self.offset.clone()),
            Side::Zero => panic!("no halfspace for Zero side"),
        }
    }

    /// Tangent direction of the wall line (rank 2).
    pub fn direction(&self) -> QVec {
        QVec(vec![-self.normal.0[1].clone(), self.normal.0[0].clone()])
    }
}

/// A cell of the arrangement, canonically represented by its sorted vertex
/// set (every cell of an affine Coxeter arrangement is a bounded polytope).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub verts: Vec<QVec>,
}

impl Cell {
    pub fn new(mut verts: Vec<QVec>) -> Cell {
        verts.sort();
        verts.dedup();
        Cell { verts }
    }

    pub fn dim(&self) -> usize {
        if self.verts.len() <= 1 {
            return 0;
        }
        let base = &self.verts[0];
        let mut first: Option<QVec> = None;
        let mut rank = 0;
        for v in &self.verts[1..] {
            let d = v.sub(base);
            if d.is_zero() {
                continue;
            }
            match &first {
                None => {
                    first = Some(d);
                    rank = 1;
                }
                Some(f) => {
                    if f.dim() == 2 && !f.cross(&d).is_zero() {
                        return 2;
                    }
                }
            }
        }
        rank
    }

    pub fn barycenter(&self) -> QVec {
        let n = Rat::from_integer((self.verts.len() as i64).into());
        let mut s = QVec::zeros(self.verts[0].dim());
        for v in &self.verts {
            s = s.add(v);
        }
        QVec(s.0.iter().map(|c| c / &n).collect())
    }

    pub fn as_polyhedron(&self) -> Polyhedron {
        Polyhedron::from_points(&self.verts)
    }

    pub fn contains_point(&self, p: &QVec) -> bool {
        self.as_polyhedron().contains(p)
    }

    /// Face order: `self <= other` iff self is a face of other's closure.
    pub fn is_face_of(&self, other: &Cell) -> bool {
        self.verts.iter().all(|v| other.verts.contains(v))
    }

    pub fn map(&self, g: &AffineMap) -> Cell {
        Cell::new(self.verts.iter().map(|v| g.apply(v)).collect())
    }
}

/// A gallery: a sequence of chambers, consecutive ones panel-adjacent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gallery {
    pub chambers: Vec<Cell>,
}

impl Gallery {
    pub fn len(&self) -> usize {
        self.chambers.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An affine Coxeter complex over a rational covector Gram form.
#[derive(Debug)]
pub struct CoxeterDatum {
    pub type_tag: TypeTag,
    pub rank: usize,
    /// Gram matrix of covectors (inner products of basis covectors).
    pub cov_gram: QMat,
    /// Metric on vectors: inverse of `cov_gram`.
    pub metric: QMat,
    /// Positive root covectors (primitive, one per parallel wall family).
    pub pos_roots: Vec<QVec>,
    /// Bounding halfspaces of the fundamental alcove (inward).
    pub alcove_bounds: Vec<Halfspace>,
    /// Walls of the simple (alcove-bounding) reflections.
    pub simple_walls: Vec<Wall>,
    pub fundamental_verts: Vec<QVec>,
    /// Half-width of the modeled coordinate box.
    pub box_radius: i64,
    walls_cache: OnceLock<Vec<Wall>>,
    chambers_cache: OnceLock<Vec<Cell>>,
}

impl Clone for CoxeterDatum {
    fn clone(&self) -> Self {
        CoxeterDatum {
            type_tag: self.type_tag,
            rank: self.rank,
            cov_gram: self.cov_gram.clone(),
            metric: self.metric.clone(),
            pos_roots: self.pos_roots.clone(),
            alcove_bounds: self.alcove_bounds.clone(),
            simple_walls: self.simple_walls.clone(),
            fundamental_verts: self.fundamental_verts.clone(),
            box_radius: self.box_radius,
            walls_cache: OnceLock::new(),
            chambers_cache: OnceLock::new(),
        }
    }
}

pub const DEFAULT_BOX_RADIUS: i64 = 8;

impl CoxeterDatum {
    pub fn new(type_tag: TypeTag) -> CoxeterDatum {
        CoxeterDatum::with_box(type_tag, DEFAULT_BOX_RADIUS)
    }

    pub fn with_box(type_tag: TypeTag, box_radius: i64) -> CoxeterDatum {
        let (cov_gram, bounds, verts) = match type_tag {
            TypeTag::A1affine => (
                QMat::from_i64(&[&[1]]),
                vec![(vec![-1], 0), (vec![1], 1)],
                vec![vec![(0, 1)], vec![(1, 1)]],
            ),
            TypeTag::A1xA1 => (
                QMat::identity(2),
                vec![
                    (vec![-1, 0], 0),
                    (vec![1, 0], 1),
                    (vec![0, -1], 0),
                    (vec![0, 1], 1),
                ],
                vec![
                    vec![(0, 1), (0, 1)],
                    vec![(1, 1), (0, 1)],
                    vec![(0, 1), (1, 1)],
                    vec![(1, 1), (1, 1)],
                ],
            ),
            TypeTag::A2affine => (
                QMat::from_i64(&[&[2, -1], &[-1, 2]]),
                vec![(vec![-1, 0], 0), (vec![0, -1], 0), (vec![1, 1], 1)],
                vec![
                    vec![(0, 1), (0, 1)],
                    vec![(1, 1), (0, 1)],
                    vec![(0, 1), (1, 1)],
                ],
            ),
            TypeTag::C2affine => (
                QMat::identity(2),
                vec![(vec![0, -1], 0), (vec![-1, 1], 0), (vec![1, 1], 1)],
                vec![
                    vec![(0, 1), (0, 1)],
                    vec![(1, 2), (1, 2)],
                    vec![(1, 1), (0, 1)],
                ],
            ),
            TypeTag::G2affine => (
                QMat::from_i64(&[&[2, -3], &[-3, 6]]),
                vec![(vec![-1, 0], 0), (vec![0, -1], 0), (vec![3, 2], 1)],
                vec![
                    vec![(0, 1), (0, 1)],
                    vec![(1, 3), (0, 1)],
                    vec![(0, 1), (1, 2)],
                ],
            ),
        };
        let alcove_bounds: Vec<Halfspace> = bounds
            .iter()
            .map(|(n, c)| Halfspace::new(QVec::from_i64(n), rat_i(*c)).normalized())
            .collect();
        let fundamental_verts: Vec<QVec> = verts
            .iter()
            .map(|v| QVec(v.iter().map(|&(p, q)| rat(p, q)).collect()))
            .collect();
        let simple_walls: Vec<Wall> = alcove_bounds
            .iter()
            .map(|h| Wall::new(h.normal.clone(), h.rhs.clone()))
            .collect();
        let rank = cov_gram.rows;
        let metric = cov_gram.inverse().expect("gram positive definite");
        let pos_roots = root_closure(&cov_gram, &simple_walls);
        let d = CoxeterDatum {
            type_tag,
            rank,
            cov_gram,
            metric,
            pos_roots,
            alcove_bounds,
            simple_walls,
            fundamental_verts,
            box_radius,
            walls_cache: OnceLock::new(),
            chambers_cache: OnceLock::new(),
        };
        d.validate().expect("builtin type data is valid");
        d
    }

    /// Validates the datum invariants: positive definite Gram, reflections
    /// preserving the form, and the Coxeter relations on the simple
    /// reflections up to word length 12.
    pub fn validate(&self) -> Result<()> {
        // Positive definite (rank <= 2).
        let g = &self.cov_gram;
        if g.at(0, 0).is_negative() || g.at(0, 0).is_zero() {
            return Err(Error::Scene("gram not positive definite".into()));
        }
        if self.rank == 2 && !g.det().is_positive() {
            return Err(Error::Scene("gram not positive definite".into()));
        }
        // Reflections across simple walls preserve the metric.
        for w in &self.simple_walls {
            let s = self.reflection(w);
            let lhs = s.lin.transpose().mul(&self.metric).mul(&s.lin);
            if lhs != self.metric {
                return Err(Error::Scene(format!(
                    "reflection across {:?} does not preserve the gram form",
                    w
                )));
            }
        }
        // Coxeter relations between simple reflections, up to word length 12.
        let n = self.simple_walls.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let wi = &self.simple_walls[i];
                let wj = &self.simple_walls[j];
                let expected = self.coxeter_order(wi, wj);
                let si = self.reflection(wi);
                let sj = self.reflection(wj);
                let prod = si.compose(&sj);
                let mut acc = prod.clone();
                let mut first_id: Option<usize> = None;
                for k in 1..=6usize {
                    if acc.is_identity() {
                        first_id = Some(k);
                        break;
                    }
                    acc = acc.compose(&prod);
                }
                if first_id != expected {
                    return Err(Error::Scene(format!(
                        "coxeter relation mismatch between walls {} and {}: expected {:?}, found {:?}",
                        i, j, expected, first_id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Order of `s_i s_j` derived from the angle between the walls; None for
    /// parallel walls (infinite order) or order > 6.
    fn coxeter_order(&self, a: &Wall, b: &Wall) -> Option<usize> {
        if a.normal.primitive() == b.normal.primitive() {
            return None;
        }
        let cd = cos_data(&self.cov_gram, &a.normal, &b.normal);
        // Angle between wall lines is min(theta, pi - theta): use cos^2 only.
        if cd.cos_sq.is_zero() {
            Some(2)
        } else if cd.cos_sq == rat(1, 4) {
            Some(3)
        } else if cd.cos_sq == rat(1, 2) {
            Some(4)
        } else if cd.cos_sq == rat(3, 4) {
            Some(6)
        } else {
            None
        }
    }

    /// Exact side predicate: sign of `normal . p - offset`.
    pub fn side_of_wall(&self, p: &QVec, w: &Wall) -> Result<Side> {
        if p.dim() != self.rank || w.normal.dim() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: p.dim().max(w.normal.dim()),
            });
        }
        Ok(Side::of(&(w.normal.dot(p) - &w.offset)))
    }

    /// Reflection across a wall as an exact affine map.
    pub fn reflection(&self, w: &Wall) -> AffineMap {
        let ndual = self.cov_gram.mul_vec(&w.normal);
        let nn = w.normal.dot(&ndual);
        let two = rat_i(2);
        // x -> x - 2 (n.x - c)/<n,n> * N n
        let coef = &two / &nn;
        let rank = self.rank;
        let mut lin = QMat::identity(rank);
        for i in 0..rank {
            for j in 0..rank {
                let delta = &ndual.0[i] * &w.normal.0[j] * &coef;
                *lin.at_mut(i, j) = lin.at(i, j) - delta;
            }
        }
        let tr = ndual.scale(&(&coef * &w.offset));
        AffineMap { lin, tr }
    }

    pub fn in_box(&self, p: &QVec) -> bool {
        let r = rat_i(self.box_radius);
        p.0.iter().all(|c| c.abs() <= r)
    }

    fn box_corners(&self) -> Vec<QVec> {
        let r = self.box_radius;
        match self.rank {
            1 => vec![QVec::from_i64(&[-r]), QVec::from_i64(&[r])],
            _ => vec![
                QVec::from_i64(&[-r, -r]),
                QVec::from_i64(&[-r, r]),
                QVec::from_i64(&[r, -r]),
                QVec::from_i64(&[r, r]),
            ],
        }
    }

    /// All walls meeting the modeled box.
    pub fn walls_in_box(&self) -> &Vec<Wall> {
        self.walls_cache.get_or_init(|| {
            let mut out = Vec::new();
            let corners = self.box_corners();
            for root in &self.pos_roots {
                let vals: Vec<Rat> = corners.iter().map(|c| root.dot(c)).collect();
                let lo = vals.iter().min().unwrap().ceil().to_integer();
                let hi = vals.iter().max().unwrap().floor().to_integer();
                let mut k = lo.clone();
                while k <= hi {
                    out.push(Wall {
                        normal: root.clone(),
                        offset: Rat::from_integer(k.clone()),
                    });
                    k += 1;
                }
            }
            out.sort();
            out
        })
    }

    /// Walls passing through a point (exact; integer offsets per root).
    pub fn walls_through(&self, p: &QVec) -> Result<Vec<Wall>> {
        if !self.in_box(p) {
            return Err(Error::OutsideModeledRegion {
                radius: self.box_radius,
            });
        }
        let mut out = Vec::new();
        for root in &self.pos_roots {
            let v = root.dot(p);
            if v.denom().is_one() {
                out.push(Wall {
                    normal: root.clone(),
                    offset: v,
                });
            }
        }
        out.sort();
        Ok(out)
    }

    /// Fold a point into the closed fundamental alcove. Returns `(g, q)` with
    /// `q = g(p)` in the alcove; `g` is a word in the simple reflections.
    pub fn fold_to_fundamental(&self, p: &QVec) -> Result<(AffineMap, QVec)> {
        if !self.in_box(p) {
            return Err(Error::OutsideModeledRegion {
                radius: self.box_radius,
            });
        }
        let mut q = p.clone();
        let mut g = AffineMap::identity(self.rank);
        for _ in 0..100_000 {
            let mut moved = false;
            for h in &self.alcove_bounds {
                if h.normal.dot(&q) > h.rhs {
                    let s = self.reflection(&Wall::new(h.normal.clone(), h.rhs.clone()));
                    q = s.apply(&q);
                    g = s.compose(&g);
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Ok((g, q));
            }
        }
        Err(Error::Precondition("folding did not terminate".into()))
    }

    /// The smallest cell containing `p` (in its relative interior).
    pub fn carrier(&self, p: &QVec) -> Result<Cell> {
        let (g, q) = self.fold_to_fundamental(p)?;
        let ginv = g.inverse().expect("reflections invertible");
        let active: Vec<&Halfspace> = self
            .alcove_bounds
            .iter()
            .filter(|h| h.normal.dot(&q) == h.rhs)
            .collect();
        let verts: Vec<QVec> = self
            .fundamental_verts
            .iter()
            .filter(|v| active.iter().all(|h| h.normal.dot(v) == h.rhs))
            .map(|v| ginv.apply(v))
            .collect();
        Ok(Cell::new(verts))
    }

    pub fn fundamental_chamber(&self) -> Cell {
        Cell::new(self.fundamental_verts.clone())
    }

    pub fn is_chamber(&self, c: &Cell) -> bool {
        c.dim() == self.rank
    }

    /// Bounding walls of a chamber (the walls of its panels).
    pub fn bounding_walls(&self, c: &Cell) -> Vec<Wall> {
        assert!(self.is_chamber(c));
        if self.rank == 1 {
            return c
                .verts
                .iter()
                .map(|v| Wall::new(QVec::from_i64(&[1]), v.0[0].clone()))
                .collect();
        }
        let hull = crate::poly::convex_hull_2d(&c.verts);
        let n = hull.len();
        let mut out = Vec::new();
        for i in 0..n {
            let a = &hull[i];
            let b = &hull[(i + 1) % n];
            let d = b.sub(a);
            let normal = QVec(vec![-d.0[1].clone(), d.0[0].clone()]);
            out.push(Wall::new(normal.clone(), normal.dot(a)));
        }
        out.sort();
        out
    }

    /// The chamber adjacent to `c` across the panel on `w`.
    pub fn adjacent_chamber(&self, c: &Cell, w: &Wall) -> Cell {
        c.map(&self.reflection(w))
    }

    /// Walls strictly separating two cells (signs at barycenters).
    pub fn separating_walls(&self, a: &Cell, b: &Cell) -> Vec<Wall> {
        let pa = a.barycenter();
        let pb = b.barycenter();
        self.walls_in_box()
            .iter()
            .filter(|w| {
                let sa = Side::of(&(w.normal.dot(&pa) - &w.offset));
                let sb = Side::of(&(w.normal.dot(&pb) - &w.offset));
                sa != Side::Zero && sb != Side::Zero && sa != sb
            })
            .cloned()
            .collect()
    }

    /// A minimal gallery from C to D; ties broken by canonical wall order.
    pub fn gallery_between(&self, c: &Cell, d: &Cell) -> Result<Gallery> {
        if !self.is_chamber(c) || !self.is_chamber(d) {
            return Err(Error::NotAChamber);
        }
        let mut chambers = vec![c.clone()];
        let mut cur = c.clone();
        let bound = self.separating_walls(c, d).len() + 1;
        for _ in 0..bound {
            if cur == *d {
                return Ok(Gallery { chambers });
            }
            let bc_d = d.barycenter();
            let bc_c = cur.barycenter();
            let crossing = self
                .bounding_walls(&cur)
                .into_iter()
                .find(|w| {
                    let sc = Side::of(&(w.normal.dot(&bc_c) - &w.offset));
                    let sd = Side::of(&(w.normal.dot(&bc_d) - &w.offset));
                    sc != Side::Zero && sd != Side::Zero && sc != sd
                })
                .ok_or_else(|| Error::Precondition("no separating bounding wall".into()))?;
            cur = self.adjacent_chamber(&cur, &crossing);
            chambers.push(cur.clone());
        }
        if cur == *d {
            Ok(Gallery { chambers })
        } else {
            Err(Error::Precondition("gallery construction failed".into()))
        }
    }

    /// A generic direction at `b`: off every wall through `b`, exact.
    fn generic_direction(&self, b: &QVec) -> Result<QVec> {
        let walls = self.walls_through(b)?;
        if self.rank == 1 {
            return Ok(QVec::from_i64(&[1]));
        }
        for k in 0..40i64 {
            let d = QVec(vec![rat_i(1), rat(2 * k + 1, 37)]);
            if walls.iter().all(|w| !w.normal.dot(&d).is_zero()) {
                return Ok(d);
            }
        }
        Err(Error::Precondition("no generic direction found".into()))
    }

    /// Largest step `t` such that `b + t d` crosses no wall other than those
    /// through `b` (returns half the minimal crossing parameter).
    fn safe_step(&self, b: &QVec, d: &QVec) -> Rat {
        let mut best: Option<Rat> = None;
        for w in self.walls_in_box() {
            let denom = w.normal.dot(d);
            if denom.is_zero() {
                continue;
            }
            let num = &w.offset - &w.normal.dot(b);
            if num.is_zero() {
                continue; // wall through b
            }
            let t = &num / &denom;
            if t.is_positive() {
                match &best {
                    Some(x) if *x <= t => {}
                    _ => best = Some(t),
                }
            }
        }
        let half = rat(1, 2);
        match best {
            Some(t) => t * half,
            None => half,
        }
    }

    /// The chamber at `b` in direction `d` (d generic at b).
    pub fn chamber_toward(&self, b: &QVec, d: &QVec) -> Result<Cell> {
        let t = self.safe_step(b, d);
        let p = b.add(&d.scale(&t));
        let c = self.carrier(&p)?;
        if !self.is_chamber(&c) {
            return Err(Error::Precondition(
                "direction not generic: landed on a lower cell".into(),
            ));
        }
        Ok(c)
    }

    /// `Proj_sigma C`: unique chamber >= sigma separated from C by exactly the
    /// walls strictly separating sigma and C.
    pub fn project_chamber_to_cell(&self, c: &Cell, sigma: &Cell) -> Result<Cell> {
        if !self.is_chamber(c) {
            return Err(Error::NotAChamber);
        }
        if self.is_chamber(sigma) {
            return Ok(sigma.clone());
        }
        let b = sigma.barycenter();
        let d = c.barycenter().sub(&b);
        self.chamber_toward(&b, &d)
    }

    /// All chambers whose closure contains `sigma`.
    pub fn star_chambers(&self, sigma: &Cell) -> Result<Vec<Cell>> {
        let b = sigma.barycenter();
        let d = self.generic_direction(&b)?;
        let first = self.chamber_toward(&b, &d)?;
        let mut seen: BTreeSet<Cell> = BTreeSet::new();
        let mut queue = vec![first];
        while let Some(ch) = queue.pop() {
            if !seen.insert(ch.clone()) {
                continue;
            }
            for w in self.bounding_walls(&ch) {
                // Only panels containing sigma keep us in the star.
                if sigma
                    .verts
                    .iter()
                    .all(|v| w.normal.dot(v) == w.offset)
                {
                    let nb = self.adjacent_chamber(&ch, &w);
                    if !seen.contains(&nb) {
                        queue.push(nb);
                    }
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// All chambers entirely inside the modeled box.
    pub fn chambers_in_box(&self) -> &Vec<Cell> {
        self.chambers_cache.get_or_init(|| {
            let r = rat_i(self.box_radius);
            let inside =
                |c: &Cell| c.verts.iter().all(|v| v.0.iter().all(|x| x.abs() <= r));
            let mut seen: BTreeSet<Cell> = BTreeSet::new();
            let mut queue = vec![self.fundamental_chamber()];
            while let Some(ch) = queue.pop() {
                if !inside(&ch) || seen.contains(&ch) {
                    continue;
                }
                seen.insert(ch.clone());
                for w in self.bounding_walls(&ch) {
                    let nb = self.adjacent_chamber(&ch, &w);
                    if inside(&nb) && !seen.contains(&nb) {
                        queue.push(nb);
                    }
                }
            }
            seen.into_iter().collect()
        })
    }

    /// Metric angle at `a` between segments toward `b` and `c`.
    pub fn angle_at(&self, a: &QVec, b: &QVec, c: &QVec) -> Result<Angle> {
        let u = b.sub(a);
        let v = c.sub(a);
        if u.is_zero() || v.is_zero() {
            return Err(Error::DegenerateSegment);
        }
        Ok(angle_between(&self.metric, &u, &v))
    }

    /// Metric squared length of `b - a`, exact.
    pub fn dist_sq(&self, a: &QVec, b: &QVec) -> Rat {
        crate::angle::vec_len_sq(&self.metric, &b.sub(a))
    }

    pub fn dist(&self, a: &QVec, b: &QVec) -> f64 {
        crate::exact::rat_to_f64(&self.dist_sq(a, b)).sqrt()
    }

    /// Checks that an affine map sends the wall arrangement to itself:
    /// the linear part permutes root lines and offsets stay integral.
    pub fn preserves_arrangement(&self, g: &AffineMap) -> bool {
        let lt = g.lin.transpose();
        // Metric preservation.
        if g.lin.transpose().mul(&self.metric).mul(&g.lin) != self.metric {
            return false;
        }
        let ginv = match g.inverse() {
            Some(x) => x,
            None => return false,
        };
        for root in &self.pos_roots {
            // Image of wall {root.x = k} under g is {root.(g^-1 y) = k}.
            let img = ginv.lin.transpose().mul_vec(root);
            let prim = img.primitive();
            if !self.pos_roots.contains(&prim) {
                return false;
            }
            // Scale between img and prim must be +-1 and the offset shift
            // root . g^{-1}(0) must be an integer for walls to map to walls.
            let scale = img
                .0
                .iter()
                .zip(&prim.0)
                .find(|(a, _)| !a.is_zero())
                .map(|(a, p)| a / p)
                .unwrap();
            if scale.abs() != Rat::one() {
                return false;
            }
            let shift = root.dot(&ginv.tr);
            if !shift.denom().is_one() {
                return false;
            }
        }
        let _ = lt;
        true
    }
}

/// Close the set of simple wall normals under the linear reflection action;
/// returns the positive roots (primitive, first nonzero entry positive).
fn root_closure(cov_gram: &QMat, simple_walls: &[Wall]) -> Vec<QVec> {
    let mut roots: BTreeSet<QVec> = simple_walls
        .iter()
        .map(|w| w.normal.primitive())
        .collect();
    for _ in 0..20 {
        let mut new_roots: Vec<QVec> = Vec::new();
        for a in &roots {
            for b in &roots {
                // s_a(b) = b - 2 <b,a>/<a,a> a  (in covector gram)
                let aa = cos_ip(cov_gram, a, a);
                let ab = cos_ip(cov_gram, a, b);
                let coef = rat_i(2) * ab / aa;
                let img = b.sub(&a.scale(&coef)).primitive();
                if !roots.contains(&img) && !new_roots.contains(&img) {
                    new_roots.push(img);
                }
            }
        }
        if new_roots.is_empty() {
            break;
        }
        roots.extend(new_roots);
        assert!(roots.len() <= 16, "root closure did not stabilize");
    }
    roots.into_iter().collect()
}

fn cos_ip(g: &QMat, a: &QVec, b: &QVec) -> Rat {
    g.mul_vec(b).dot(a)
}

/// Deterministic cyclic comparison of nonzero rank-2 directions
/// (counterclockwise from the positive x-axis, coordinate orientation).
pub fn cyclic_cmp(a: &QVec, b: &QVec) -> Ordering {
    let half = |v: &QVec| -> u8 {
        if v.0[1].is_positive() || (v.0[1].is_zero() && v.0[0].is_positive()) {
            0
        } else {
            1
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    let cr = a.cross(b);
    if cr.is_positive() {
        Ordering::Less
    } else if cr.is_negative() {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> CoxeterDatum {
        CoxeterDatum::with_box(TypeTag::A2affine, 6)
    }

    #[test]
    fn root_systems_have_expected_family_counts() {
        assert_eq!(CoxeterDatum::new(TypeTag::A1affine).pos_roots.len(), 1);
        assert_eq!(CoxeterDatum::new(TypeTag::A1xA1).pos_roots.len(), 2);
        assert_eq!(a2().pos_roots.len(), 3);
        assert_eq!(CoxeterDatum::new(TypeTag::C2affine).pos_roots.len(), 4);
        assert_eq!(CoxeterDatum::new(TypeTag::G2affine).pos_roots.len(), 6);
    }

    #[test]
    fn side_of_wall_examples() {
        let d = a2();
        let w = Wall::from_i64(&[1, 0], 0, 1);
        // Origin on the wall.
        assert_eq!(
            d.side_of_wall(&QVec::from_i64(&[0, 0]), &w).unwrap(),
            Side::Zero
        );
        // (1,0) on the plus side.
        assert_eq!(
            d.side_of_wall(&QVec::from_i64(&[1, 0]), &w).unwrap(),
            Side::Plus
        );
        // Dimension mismatch errors.
        assert!(d
            .side_of_wall(&QVec::from_i64(&[1]), &w)
            .is_err());
    }

    #[test]
    fn fundamental_barycenter_is_inside_all_three_walls() {
        // Oracle: direct rational evaluation of the defining inequalities.
        let d = a2();
        let b = d.fundamental_chamber().barycenter();
        for h in &d.alcove_bounds {
            assert!(h.normal.dot(&b) < h.rhs, "barycenter strictly inside");
        }
        // In wall terms: plus side of alpha1 = 0, alpha2 = 0, minus of sum = 1.
        let w1 = Wall::from_i64(&[1, 0], 0, 1);
        let w2 = Wall::from_i64(&[0, 1], 0, 1);
        let w3 = Wall::from_i64(&[1, 1], 1, 1);
        assert_eq!(d.side_of_wall(&b, &w1).unwrap(), Side::Plus);
        assert_eq!(d.side_of_wall(&b, &w2).unwrap(), Side::Plus);
        assert_eq!(d.side_of_wall(&b, &w3).unwrap(), Side::Minus);
    }

    #[test]
    fn side_invariant_under_rescaling() {
        let d = a2();
        let p = QVec(vec![rat(3, 7), rat(-2, 5)]);
        let w1 = Wall::new(QVec::from_i64(&[2, 2]), rat_i(2));
        let w2 = Wall::new(QVec(vec![rat(-1, 3), rat(-1, 3)]), rat(-1, 3));
        // Both canonicalize to the same wall: same side.
        assert_eq!(w1, w2);
        assert_eq!(
            d.side_of_wall(&p, &w1).unwrap(),
            d.side_of_wall(&p, &w2).unwrap()
        );
    }

    #[test]
    fn carrier_examples() {
        let d = a2();
        // Interior point of the fundamental chamber.
        let b = d.fundamental_chamber().barycenter();
        assert_eq!(d.carrier(&b).unwrap(), d.fundamental_chamber());
        // Origin: the vertex cell.
        let origin = QVec::from_i64(&[0, 0]);
        assert_eq!(
            d.carrier(&origin).unwrap(),
            Cell::new(vec![origin.clone()])
        );
        // Midpoint of a panel: that panel.
        let mid = QVec(vec![rat(1, 2), Rat::zero()]);
        let car = d.carrier(&mid).unwrap();
        assert_eq!(car.dim(), 1);
        assert_eq!(
            car,
            Cell::new(vec![QVec::from_i64(&[0, 0]), QVec::from_i64(&[1, 0])])
        );
        // Oracle: the zero walls at the midpoint are exactly the walls with
        // side Zero among all walls in the box through it.
        for w in d.walls_in_box() {
            let s = d.side_of_wall(&mid, w).unwrap();
            let contains_cell = car.verts.iter().all(|v| w.normal.dot(v) == w.offset);
            assert_eq!(s == Side::Zero, contains_cell);
        }
    }

    #[test]
    fn carrier_outside_box_errors() {
        let d = a2();
        assert!(matches!(
            d.carrier(&QVec::from_i64(&[100, 100])),
            Err(Error::OutsideModeledRegion { .. })
        ));
    }

    #[test]
    fn gallery_and_separating_walls_agree() {
        let d = a2();
        let c = d.fundamental_chamber();
        // Gallery to itself.
        let g = d.gallery_between(&c, &c).unwrap();
        assert_eq!(g.chambers, vec![c.clone()]);
        assert_eq!(g.len(), 0);
        // Adjacent chamber: length 1.
        let w = &d.bounding_walls(&c)[0];
        let adj = d.adjacent_chamber(&c, w);
        let g = d.gallery_between(&c, &adj).unwrap();
        assert_eq!(g.len(), 1);
        // Walk 4 chambers away, one separating wall at a time.
        let mut target = c.clone();
        for step in 0..4 {
            let next = d
                .bounding_walls(&target)
                .into_iter()
                .map(|w| d.adjacent_chamber(&target, &w))
                .find(|nb| d.separating_walls(&c, nb).len() == step + 1)
                .expect("can move away from c");
            target = next;
        }
        let sep = d.separating_walls(&c, &target).len();
        let g = d.gallery_between(&c, &target).unwrap();
        assert_eq!(g.len(), sep);
        assert_eq!(g.len(), 4);
        // Consecutive chambers are panel-adjacent and distinct.
        for pair in g.chambers.windows(2) {
            assert_ne!(pair[0], pair[1]);
            let shared: Vec<_> = pair[0]
                .verts
                .iter()
                .filter(|v| pair[1].verts.contains(v))
                .collect();
            assert_eq!(shared.len(), d.rank); // a panel in rank 2 has 2 verts
        }
    }

    #[test]
    fn projection_examples_and_characterization() {
        let d = a2();
        let c = d.fundamental_chamber();
        // Projection onto itself.
        assert_eq!(d.project_chamber_to_cell(&c, &c).unwrap(), c);
        // Vertex of the closure projects to the chamber itself.
        let origin_cell = Cell::new(vec![QVec::from_i64(&[0, 0])]);
        assert_eq!(
            d.project_chamber_to_cell(&c, &origin_cell).unwrap(),
            c
        );
        // A distant chamber across the origin (not containing the origin).
        let far = d.carrier(&QVec(vec![rat(-3, 2), rat(-1, 4)])).unwrap();
        assert!(d.is_chamber(&far));
        assert!(!far.contains_point(&QVec::from_i64(&[0, 0])));
        let proj = d.project_chamber_to_cell(&far, &origin_cell).unwrap();
        // Oracle: the star chamber with minimal gallery distance to far.
        let star = d.star_chambers(&origin_cell).unwrap();
        assert_eq!(star.len(), 6);
        let best = star
            .iter()
            .min_by_key(|ch| d.gallery_between(ch, &far).unwrap().len())
            .unwrap();
        assert_eq!(&proj, best);
        // Characterization: separating walls of (proj, far) are exactly the
        // walls strictly separating sigma and far.
        let sep_proj = d.separating_walls(&proj, &far);
        let b = origin_cell.barycenter();
        let bf = far.barycenter();
        let sep_sigma: Vec<Wall> = d
            .walls_in_box()
            .iter()
            .filter(|w| {
                let s1 = Side::of(&(w.normal.dot(&b) - &w.offset));
                let s2 = Side::of(&(w.normal.dot(&bf) - &w.offset));
                s1 != Side::Zero && s2 != Side::Zero && s1 != s2
            })
            .cloned()
            .collect();
        assert_eq!(sep_proj, sep_sigma);
        // And sigma is a face of the projection.
        assert!(origin_cell.is_face_of(&proj));
    }

    #[test]
    fn reflections_preserve_arrangement() {
        for tag in [
            TypeTag::A1affine,
            TypeTag::A1xA1,
            TypeTag::A2affine,
            TypeTag::C2affine,
            TypeTag::G2affine,
        ] {
            let d = CoxeterDatum::with_box(tag, 3);
            for w in d.walls_in_box() {
                let s = d.reflection(w);
                assert!(d.preserves_arrangement(&s), "{:?} wall {:?}", tag, w);
            }
        }
    }

    #[test]
    fn star_of_c2_wall_midpoint_has_two_chambers() {
        let d = CoxeterDatum::with_box(TypeTag::C2affine, 4);
        let panel = d
            .carrier(&QVec(vec![rat(1, 2), Rat::zero()]))
            .unwrap();
        assert_eq!(panel.dim(), 1);
        let star = d.star_chambers(&panel).unwrap();
        assert_eq!(star.len(), 2);
    }
}
