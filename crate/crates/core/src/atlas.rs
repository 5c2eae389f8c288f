//! Euclidean buildings as finite atlases of apartment charts glued along
//! convex chamber subcomplexes.
//!
//! Retractions are computed by chart-path folding: composites of gluing
//! isometries along paths that keep the center (a chamber of the base
//! apartment, or a sector germ at infinity) inside their identification
//! domain. A chart reached by such a path carries a single affine folding
//! map onto the base apartment; points with no representative in any such
//! chart make the retraction error (the atlas is not saturated there).

use crate::coxeter::{Cell, CoxeterDatum, Wall};
use crate::error::{Error, Result};
use crate::exact::{rat, rat_i, AffineMap, QVec, Rat};
use crate::link::{apartment_link, ArcRep, LinkArc, LinkSpace, Topology};
use crate::poly::{Halfspace, Polyhedron};
use crate::report::{ConvexityReport, Witness};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::sync::Mutex;

/// A gluing record: `(i, p) ~ (j, map(p))` for `p` in `domain` (chart-i
/// coordinates). The map extends to a global isometry of the apartment.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub i: usize,
    pub j: usize,
    pub map: AffineMap,
    pub domain: Polyhedron,
}

/// A chamber at infinity: base vertex plus the closed Weyl-chamber direction
/// cone `{d : c . d >= 0 for all c in cone}`.
#[derive(Clone, Debug)]
pub struct SectorGerm {
    pub base: QVec,
    pub cone: Vec<QVec>,
}

impl SectorGerm {
    /// An interior direction of the cone (sum of its extreme rays).
    pub fn interior_dir(&self, rank: usize) -> QVec {
        let rays = self.cone_rays(rank);
        let mut s = QVec::zeros(rank);
        for r in &rays {
            s = s.add(r);
        }
        s
    }

    /// Extreme rays of the direction cone.
    pub fn cone_rays(&self, rank: usize) -> Vec<QVec> {
        let hs: Vec<Halfspace> = self
            .cone
            .iter()
            .map(|c| Halfspace::new(c.neg(), Rat::zero()))
            .collect();
        let p = Polyhedron::new(rank, hs);
        let mut rays = p.recession_rays();
        rays.sort();
        rays
    }

    /// The side of a wall family the germ lies on: sign of `root . d` for
    /// interior cone directions `d` (constant on Weyl chambers).
    pub fn side_of_root(&self, rank: usize, root: &QVec) -> crate::coxeter::Side {
        let d = self.interior_dir(rank);
        crate::coxeter::Side::of(&root.dot(&d))
    }
}

#[derive(Clone, Debug)]
pub enum Center {
    Chamber(Cell),
    Sector(SectorGerm),
}

/// A point of the building: a chart id and apartment coordinates there.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BuildingPoint {
    pub chart: usize,
    pub point: QVec,
}

impl BuildingPoint {
    pub fn new(chart: usize, point: QVec) -> Self {
        BuildingPoint { chart, point }
    }
}

/// A piecewise-linear path with chart-tagged breakpoints; consecutive
/// breakpoints lie in the chart of the earlier one.
#[derive(Clone, Debug)]
pub struct PolyPath {
    pub points: Vec<BuildingPoint>,
    pub length: f64,
}

impl PolyPath {
    pub fn start(&self) -> &BuildingPoint {
        self.points.first().expect("nonempty path")
    }

    pub fn end(&self) -> &BuildingPoint {
        self.points.last().expect("nonempty path")
    }
}

/// A directed gluing edge: `(from, p) ~ (to, map(p))` for `p` in `dom`
/// (from-chart coordinates). Precomputed for both directions of each gluing.
#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    map: AffineMap,
    dom: Polyhedron,
}

/// A euclidean building given by finitely many apartment charts.
#[derive(Debug)]
pub struct AtlasBuilding {
    pub coxeter: CoxeterDatum,
    pub n_charts: usize,
    /// Valid window per chart (bounded; operations error outside).
    pub windows: Vec<Polyhedron>,
    pub gluings: Vec<Gluing>,
    pub base_chart: usize,
    pub center: Center,
    edges: Vec<Vec<Edge>>,
    folding_cache: Mutex<BTreeMap<usize, Vec<Option<AffineMap>>>>,
}

impl AtlasBuilding {
    pub fn new(
        coxeter: CoxeterDatum,
        n_charts: usize,
        windows: Vec<Polyhedron>,
        gluings: Vec<Gluing>,
        center: Center,
    ) -> AtlasBuilding {
        let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); n_charts];
        for g in &gluings {
            if g.i >= n_charts || g.j >= n_charts {
                continue;
            }
            if let Some(inv) = g.map.inverse() {
                edges[g.i].push(Edge {
                    to: g.j,
                    map: g.map.clone(),
                    dom: g.domain.clone(),
                });
                let dom_j = g.domain.map_through(&g.map);
                edges[g.j].push(Edge {
                    to: g.i,
                    map: inv,
                    dom: dom_j,
                });
            }
        }
        AtlasBuilding {
            coxeter,
            n_charts,
            windows,
            gluings,
            base_chart: 0,
            center,
            edges,
            folding_cache: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn box_window(coxeter: &CoxeterDatum) -> Polyhedron {
        let r = rat_i(coxeter.box_radius);
        let mut hs = Vec::new();
        for i in 0..coxeter.rank {
            let mut plus = vec![0i64; coxeter.rank];
            plus[i] = 1;
            hs.push(Halfspace::new(QVec::from_i64(&plus), r.clone()));
            let mut minus = vec![0i64; coxeter.rank];
            minus[i] = -1;
            hs.push(Halfspace::new(QVec::from_i64(&minus), r.clone()));
        }
        Polyhedron::new(coxeter.rank, hs)
    }

    /// Atlas with every chart windowed to the coxeter box.
    pub fn with_box_windows(
        coxeter: CoxeterDatum,
        n_charts: usize,
        gluings: Vec<Gluing>,
        center: Center,
    ) -> AtlasBuilding {
        let w = Self::box_window(&coxeter);
        AtlasBuilding::new(coxeter, n_charts, vec![w; n_charts], gluings, center)
    }

    /// Window invariant under every reflection fixing the origin:
    /// `|root . x| <= box_radius` for all positive roots. Keeps gluings along
    /// walls through the origin from mapping chambers outside the window.
    pub fn weyl_window(coxeter: &CoxeterDatum) -> Polyhedron {
        let r = rat_i(coxeter.box_radius);
        let mut hs = Vec::new();
        for root in &coxeter.pos_roots {
            hs.push(Halfspace::new(root.clone(), r.clone()));
            hs.push(Halfspace::new(root.neg(), r.clone()));
        }
        Polyhedron::new(coxeter.rank, hs)
    }

    /// Atlas with every chart windowed to the Weyl-invariant window.
    pub fn with_weyl_windows(
        coxeter: CoxeterDatum,
        n_charts: usize,
        gluings: Vec<Gluing>,
        center: Center,
    ) -> AtlasBuilding {
        let w = Self::weyl_window(&coxeter);
        AtlasBuilding::new(coxeter, n_charts, vec![w; n_charts], gluings, center)
    }

    pub fn in_window(&self, x: &BuildingPoint) -> bool {
        x.chart < self.n_charts && self.windows[x.chart].contains(&x.point)
    }

    /// The full equivalence class of a point under the gluings, sorted by
    /// chart id. Errors if the gluings identify two distinct points of one
    /// chart (the atlas is then invalid).
    pub fn point_class(&self, x: &BuildingPoint) -> Result<Vec<BuildingPoint>> {
        if x.chart >= self.n_charts {
            return Err(Error::ChartOutOfRange(x.chart));
        }
        let mut seen: BTreeMap<usize, QVec> = BTreeMap::new();
        seen.insert(x.chart, x.point.clone());
        let mut queue = vec![x.clone()];
        while let Some(cur) = queue.pop() {
            for e in &self.edges[cur.chart] {
                if !e.dom.contains(&cur.point) {
                    continue;
                }
                let img = e.map.apply(&cur.point);
                if !self.windows[e.to].contains(&img) {
                    continue;
                }
                match seen.get(&e.to) {
                    Some(existing) => {
                        if existing != &img {
                            return Err(Error::InvalidAtlas(format!(
                                "inconsistent gluings at chart {}: {:?} vs {:?}",
                                e.to, existing, img
                            )));
                        }
                    }
                    None => {
                        seen.insert(e.to, img.clone());
                        queue.push(BuildingPoint::new(e.to, img));
                    }
                }
            }
        }
        Ok(seen
            .into_iter()
            .map(|(c, p)| BuildingPoint::new(c, p))
            .collect())
    }

    /// Canonical representative: minimal chart id of the class.
    pub fn canonical_point(&self, x: &BuildingPoint) -> Result<BuildingPoint> {
        let class = self.point_class(x)?;
        Ok(class.into_iter().next().expect("class contains the point"))
    }

    pub fn points_equal(&self, x: &BuildingPoint, y: &BuildingPoint) -> Result<bool> {
        Ok(self.canonical_point(x)? == self.canonical_point(y)?)
    }

    /// Folding maps onto `target`: for each chart, the affine identification
    /// with the target chart along gluing paths whose domains keep the
    /// center. `None` where no such path exists.
    pub fn folding_maps(&self, target: usize) -> Result<Vec<Option<AffineMap>>> {
        if let Some(f) = self.folding_cache.lock().unwrap().get(&target) {
            return Ok(f.clone());
        }
        let rank = self.coxeter.rank;
        // Probe sets: the state qualifies if ANY probe set is contained in
        // its identification region.
        let probe_sets: Vec<Vec<QVec>> = match &self.center {
            Center::Chamber(c) => vec![self.cell_rep_in_chart(c, target)?],
            Center::Sector(s) => {
                let germ = self.germ_in_chart(s, target)?;
                self.sector_probes(target, &germ)?
            }
        };
        let qualifies =
            |dom: &Polyhedron| probe_sets.iter().any(|ps| ps.iter().all(|p| dom.contains(p)));
        let mut maps: Vec<Option<AffineMap>> = vec![None; self.n_charts];
        maps[target] = Some(AffineMap::identity(rank));
        let mut queue: Vec<(usize, AffineMap, Polyhedron)> = vec![(
            target,
            AffineMap::identity(rank),
            self.windows[target].clone(),
        )];
        while let Some((chart, psi, dom)) = queue.pop() {
            for e in &self.edges[chart] {
                if maps[e.to].is_some() {
                    continue;
                }
                let inv = match e.map.inverse() {
                    Some(m) => m,
                    None => continue,
                };
                // psi2 : e.to -> target.
                let psi2 = psi.compose(&inv);
                // Identification region in target coords.
                let dom2 = dom.intersect(&e.dom.map_through(&psi));
                if !qualifies(&dom2) {
                    continue;
                }
                maps[e.to] = Some(psi2.clone());
                queue.push((e.to, psi2, dom2));
            }
        }
        self.folding_cache
            .lock()
            .unwrap()
            .insert(target, maps.clone());
        Ok(maps)
    }

    /// The germ expressed in the coordinates of `chart` (transported through
    /// the base-chart folding).
    fn germ_in_chart(&self, s: &SectorGerm, chart: usize) -> Result<SectorGerm> {
        if chart == self.base_chart {
            return Ok(s.clone());
        }
        let base_maps = self.folding_maps(self.base_chart)?;
        let psi = base_maps[chart].clone().ok_or_else(|| {
            Error::NotSaturated(format!(
                "chart {} does not contain a sector of the germ",
                chart
            ))
        })?;
        // psi : chart -> base. Transport base point and cone covectors back.
        let inv = psi.inverse().expect("isometry invertible");
        let base = inv.apply(&s.base);
        let cone = s
            .cone
            .iter()
            .map(|c| psi.lin.transpose().mul_vec(c))
            .collect();
        Ok(SectorGerm { base, cone })
    }

    /// Probe point sets certifying that a region holds a truncated sector
    /// representing the germ: for each integer depth along the interior
    /// direction, the translated apex plus the farthest window points along
    /// the cone rays.
    fn sector_probes(&self, target: usize, s: &SectorGerm) -> Result<Vec<Vec<QVec>>> {
        let rank = self.coxeter.rank;
        let d0 = s.interior_dir(rank);
        if d0.is_zero() {
            return Err(Error::Precondition("sector cone is degenerate".into()));
        }
        let rays = s.cone_rays(rank);
        let window = &self.windows[target];
        let big = rat_i(8 * self.coxeter.box_radius.max(1));
        let mut out = Vec::new();
        for m in 0..=(2 * self.coxeter.box_radius) {
            let v = s.base.add(&d0.scale(&rat(m, 2)));
            if !window.contains(&v) {
                continue;
            }
            let mut probes = vec![v.clone()];
            let mut ok = true;
            for r in &rays {
                let far = v.add(&r.scale(&big));
                match window.clip_segment(&v, &far) {
                    Some((_, t1)) => {
                        probes.push(v.add(&r.scale(&(t1 * big.clone()))));
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.push(probes);
            }
        }
        if out.is_empty() {
            return Err(Error::NotSaturated(
                "no sector representative of the germ fits in the target window".into(),
            ));
        }
        Ok(out)
    }

    /// Representative vertex list of a base-chart cell in another chart.
    fn cell_rep_in_chart(&self, c: &Cell, chart: usize) -> Result<Vec<QVec>> {
        let mut out = Vec::new();
        for v in &c.verts {
            let class = self.point_class(&BuildingPoint::new(self.base_chart, v.clone()))?;
            match class.into_iter().find(|bp| bp.chart == chart) {
                Some(bp) => out.push(bp.point),
                None => {
                    return Err(Error::NotSaturated(format!(
                        "center has no representative in chart {}",
                        chart
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Retraction onto the base chart centered at the atlas center.
    pub fn retract(&self, x: &BuildingPoint) -> Result<QVec> {
        self.retract_onto(self.base_chart, x)
    }

    /// Retraction onto an arbitrary chart containing the center. Consistency
    /// across all qualifying representatives is asserted.
    pub fn retract_onto(&self, target: usize, x: &BuildingPoint) -> Result<QVec> {
        if !self.in_window(x) {
            return Err(Error::OutsideModeledRegion {
                radius: self.coxeter.box_radius,
            });
        }
        let maps = self.folding_maps(target)?;
        let class = self.point_class(x)?;
        let mut value: Option<QVec> = None;
        for bp in &class {
            if let Some(psi) = &maps[bp.chart] {
                let img = psi.apply(&bp.point);
                match &value {
                    Some(v) if v != &img => {
                        return Err(Error::InvalidAtlas(format!(
                            "retraction ill-defined at {:?}: {:?} vs {:?}",
                            x, v, img
                        )));
                    }
                    _ => value = Some(img),
                }
            }
        }
        value.ok_or_else(|| {
            Error::NotSaturated(format!(
                "point {:?} has no representative in a chart containing the center",
                x
            ))
        })
    }

    /// Minimal chart containing representatives of both points.
    pub fn common_chart(&self, x: &BuildingPoint, y: &BuildingPoint) -> Result<usize> {
        self.common_charts(x, y)?
            .into_iter()
            .next()
            .ok_or(Error::NoCommonChart)
    }

    /// All charts containing representatives of both points, ascending.
    pub fn common_charts(&self, x: &BuildingPoint, y: &BuildingPoint) -> Result<Vec<usize>> {
        let cx = self.point_class(x)?;
        let cy = self.point_class(y)?;
        Ok(cx
            .iter()
            .filter(|bx| cy.iter().any(|by| by.chart == bx.chart))
            .map(|bx| bx.chart)
            .collect())
    }

    pub fn rep_in_chart(&self, x: &BuildingPoint, chart: usize) -> Result<QVec> {
        let class = self.point_class(x)?;
        class
            .into_iter()
            .find(|bp| bp.chart == chart)
            .map(|bp| bp.point)
            .ok_or(Error::NoCommonChart)
    }

    /// The geodesic from x to y: the straight segment in the minimal common
    /// chart, with breakpoints inserted at wall crossings.
    pub fn geodesic(&self, x: &BuildingPoint, y: &BuildingPoint) -> Result<PolyPath> {
        let chart = self.common_chart(x, y)?;
        self.geodesic_in_chart(chart, x, y)
    }

    pub fn geodesic_in_chart(
        &self,
        chart: usize,
        x: &BuildingPoint,
        y: &BuildingPoint,
    ) -> Result<PolyPath> {
        let px = self.rep_in_chart(x, chart)?;
        let py = self.rep_in_chart(y, chart)?;
        if px == py {
            return Ok(PolyPath {
                points: vec![BuildingPoint::new(chart, px)],
                length: 0.0,
            });
        }
        let ts = segment_wall_crossings(&self.coxeter, &px, &py);
        let d = py.sub(&px);
        let points: Vec<BuildingPoint> = ts
            .iter()
            .map(|t| BuildingPoint::new(chart, px.add(&d.scale(t))))
            .collect();
        let length = self.coxeter.dist(&px, &py);
        Ok(PolyPath { points, length })
    }

    /// Exact squared length of the segment between two points (common chart).
    pub fn dist_sq(&self, x: &BuildingPoint, y: &BuildingPoint) -> Result<Rat> {
        let chart = self.common_chart(x, y)?;
        let px = self.rep_in_chart(x, chart)?;
        let py = self.rep_in_chart(y, chart)?;
        Ok(self.coxeter.dist_sq(&px, &py))
    }

    /// `Proj_sigma c` for a sector germ: the chamber at sigma in the germ's
    /// direction, computed in a chart containing both sigma and a sector of c.
    pub fn project_chamber_at_infinity(
        &self,
        germ: &SectorGerm,
        sigma: &BuildingCell,
    ) -> Result<BuildingCell> {
        let maps = match &self.center {
            Center::Sector(s) if same_germ(s, germ) => self.folding_maps(self.base_chart)?,
            _ => {
                // Build folding maps for this germ on the fly.
                let alt = AtlasBuilding::new(
                    self.coxeter.clone(),
                    self.n_charts,
                    self.windows.clone(),
                    self.gluings.clone(),
                    Center::Sector(germ.clone()),
                );
                alt.folding_maps(self.base_chart)?
            }
        };
        // Find a chart holding sigma whose folding map exists; the germ cone
        // pulled back to that chart gives the direction.
        let reps = self.cell_reps(sigma)?;
        for (chart, psi) in maps.iter().enumerate() {
            let psi = match psi {
                Some(p) => p,
                None => continue,
            };
            let rep = match reps.get(&chart) {
                Some(c) => c.clone(),
                None => continue,
            };
            if self.coxeter.is_chamber(&rep) {
                return Ok(BuildingCell { chart, cell: rep });
            }
            // Direction of the germ in this chart: pull the interior
            // direction back through psi.
            let d_target = germ.interior_dir(self.coxeter.rank);
            let psi_inv = psi.inverse().expect("isometry invertible");
            let d_chart = psi_inv.apply_dir(&d_target);
            let b = rep.barycenter();
            let cell = self.coxeter.chamber_toward(&b, &d_chart)?;
            return Ok(BuildingCell { chart, cell });
        }
        Err(Error::NoCommonChart)
    }

    /// Per-chart representatives of a building cell: classes of its vertices
    /// and barycenter computed once, intersected over charts.
    fn cell_reps(&self, c: &BuildingCell) -> Result<BTreeMap<usize, Cell>> {
        let mut classes: Vec<Vec<BuildingPoint>> = Vec::new();
        for v in &c.cell.verts {
            classes.push(self.point_class(&BuildingPoint::new(c.chart, v.clone()))?);
        }
        // The barycenter class gates the cell interior.
        let bclass = self.point_class(&BuildingPoint::new(c.chart, c.cell.barycenter()))?;
        let mut out = BTreeMap::new();
        'chart: for bp in &bclass {
            let chart = bp.chart;
            let mut verts = Vec::new();
            for class in &classes {
                match class.iter().find(|p| p.chart == chart) {
                    Some(p) => verts.push(p.point.clone()),
                    None => continue 'chart,
                }
            }
            out.insert(chart, Cell::new(verts));
        }
        Ok(out)
    }

    /// Representative of a building cell in a chart, if the whole cell lies
    /// there.
    fn cell_rep_in_building_chart(
        &self,
        c: &BuildingCell,
        chart: usize,
    ) -> Result<Option<Cell>> {
        Ok(self.cell_reps(c)?.remove(&chart))
    }

    /// Canonical form of a building cell: minimal chart containing it.
    pub fn canonical_cell(&self, c: &BuildingCell) -> Result<BuildingCell> {
        let reps = self.cell_reps(c)?;
        match reps.into_iter().next() {
            Some((chart, cell)) => Ok(BuildingCell { chart, cell }),
            None => Ok(c.clone()),
        }
    }

    /// All chambers of the building whose closure contains the point.
    pub fn star_chambers_at(&self, x: &BuildingPoint) -> Result<Vec<BuildingCell>> {
        let class = self.point_class(x)?;
        let mut out: Vec<BuildingCell> = Vec::new();
        for bp in &class {
            let carrier = self.coxeter.carrier(&bp.point)?;
            for cell in self.coxeter.star_chambers(&carrier)? {
                let bc = self.canonical_cell(&BuildingCell {
                    chart: bp.chart,
                    cell,
                })?;
                if !out.iter().any(|c| c.chart == bc.chart && c.cell == bc.cell) {
                    out.push(bc);
                }
            }
        }
        out.sort_by(|a, b| (a.chart, &a.cell).cmp(&(b.chart, &b.cell)));
        Ok(out)
    }

    /// The building link at a point: the per-chart circles merged along the
    /// germ identifications induced by the gluings.
    pub fn link_at(&self, x: &BuildingPoint) -> Result<LinkSpace> {
        let class = self.point_class(x)?;
        // Per-chart circles.
        let mut circles: Vec<(usize, LinkSpace, QVec)> = Vec::new();
        for bp in &class {
            let link = apartment_link(&self.coxeter, &bp.point, bp.chart)?;
            circles.push((bp.chart, link, bp.point.clone()));
        }
        if circles.len() == 1 {
            return Ok(circles.pop().unwrap().1);
        }
        merge_links(self, &class, circles)
    }

    /// Number of chambers adjacent to a panel through the point (thickness).
    pub fn panel_thickness(&self, x: &BuildingPoint) -> Result<usize> {
        Ok(self.star_chambers_at(x)?.len())
    }

    /// Verifies the atlas invariants; failures carry named witnesses.
    pub fn validate(&self) -> ConvexityReport {
        let mut witnesses: Vec<Witness> = Vec::new();
        // 1. Gluing maps preserve the arrangement; domains are full-dim
        //    convex chamber subcomplexes.
        for (gi, g) in self.gluings.iter().enumerate() {
            if g.i >= self.n_charts || g.j >= self.n_charts {
                witnesses.push(Witness::new(
                    "gluing_chart_range",
                    &format!("gluing {} references a chart out of range", gi),
                ));
                continue;
            }
            if !self.coxeter.preserves_arrangement(&g.map) {
                witnesses.push(Witness::new(
                    "gluing_not_arrangement_isometry",
                    &format!("gluing {} map does not preserve the wall arrangement", gi),
                ));
            }
            if g.domain.affine_dim() != Some(self.coxeter.rank) {
                witnesses.push(Witness::new(
                    "gluing_domain_degenerate",
                    &format!("gluing {} domain is empty or lower-dimensional", gi),
                ));
                continue;
            }
            for face in g.domain.boundary_faces() {
                let h = face.halfspace.normalized();
                let wall_backed = self
                    .coxeter
                    .pos_roots
                    .iter()
                    .any(|r| {
                        let p = h.normal.primitive();
                        (p == *r || p == r.neg().primitive()) && {
                            // offset after scaling to the primitive root
                            let k = h
                                .normal
                                .0
                                .iter()
                                .zip(&p.0)
                                .find(|(a, _)| !a.is_zero())
                                .map(|(a, b)| a / b)
                                .unwrap_or_else(Rat::zero);
                            if k.is_zero() {
                                false
                            } else {
                                (h.rhs.clone() / k).denom().is_one()
                            }
                        }
                    });
                if !wall_backed {
                    witnesses.push(
                        Witness::new(
                            "gluing_domain_not_convex_chamber_subcomplex",
                            &format!(
                                "gluing {} domain facet is not on an arrangement wall",
                                gi
                            ),
                        )
                        .with_direction(g.i, &h.normal),
                    );
                }
            }
        }
        if !witnesses.is_empty() {
            return ConvexityReport::fail(witnesses);
        }
        // 2. Chamber census and class consistency.
        let census = match self.chamber_census() {
            Ok(c) => c,
            Err(e) => {
                return ConvexityReport::fail(vec![Witness::new(
                    "gluing_inconsistent",
                    &format!("{}", e),
                )]);
            }
        };
        // 3. Two-chamber axiom: every pair of chamber classes shares a chart.
        assert!(self.n_charts <= 128, "chart bitmask limited to 128 charts");
        let masks: Vec<u128> = census
            .iter()
            .map(|class| {
                class
                    .iter()
                    .fold(0u128, |m, (c, _)| m | (1u128 << c))
            })
            .collect();
        for i in 0..census.len() {
            for j in (i + 1)..census.len() {
                let share = masks[i] & masks[j] != 0;
                if !share {
                    let w1 = &census[i][0];
                    let w2 = &census[j][0];
                    witnesses.push(
                        Witness::new(
                            "building_axiom_pair",
                            "two chambers share no chart (apartment axiom fails)",
                        )
                        .with_point(w1.0, &w1.1.barycenter())
                        .with_point(w2.0, &w2.1.barycenter()),
                    );
                    if witnesses.len() > 4 {
                        return ConvexityReport::fail(witnesses);
                    }
                }
            }
        }
        // 4. Center sanity.
        match &self.center {
            Center::Chamber(c) => {
                if !self.coxeter.is_chamber(c) {
                    witnesses.push(Witness::new("center_not_chamber", "center cell is not top-dimensional"));
                } else if !c
                    .verts
                    .iter()
                    .all(|v| self.windows[self.base_chart].contains(v))
                {
                    witnesses.push(Witness::new(
                        "center_outside_window",
                        "center chamber leaves the base window",
                    ));
                }
            }
            Center::Sector(s) => {
                if s.cone_rays(self.coxeter.rank).is_empty() {
                    witnesses.push(Witness::new("center_cone_empty", "sector cone is empty"));
                }
            }
        }
        if witnesses.is_empty() {
            ConvexityReport::pass()
        } else {
            ConvexityReport::fail(witnesses)
        }
    }

    /// Chamber classes: each class is the list of (chart, chamber cell)
    /// representatives of one building chamber.
    pub fn chamber_census(&self) -> Result<Vec<Vec<(usize, Cell)>>> {
        // Enumerate chambers per chart window.
        let mut items: Vec<(usize, Cell)> = Vec::new();
        let mut index: BTreeMap<(usize, Cell), usize> = BTreeMap::new();
        for chart in 0..self.n_charts {
            for cell in self.chambers_in_window(chart)? {
                index.insert((chart, cell.clone()), items.len());
                items.push((chart, cell));
            }
        }
        // Union-find.
        let mut parent: Vec<usize> = (0..items.len()).collect();
        fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for (idx, (chart, cell)) in items.iter().enumerate() {
            for e in &self.edges[*chart] {
                if !cell.verts.iter().all(|v| e.dom.contains(v)) {
                    continue;
                }
                let img = cell.map(&e.map);
                if let Some(&other) = index.get(&(e.to, img)) {
                    let ra = find(&mut parent, idx);
                    let rb = find(&mut parent, other);
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<(usize, Cell)>> = BTreeMap::new();
        for idx in 0..items.len() {
            let r = find(&mut parent, idx);
            classes.entry(r).or_default().push(items[idx].clone());
        }
        // Injectivity: one representative per chart within a class.
        for class in classes.values() {
            let mut charts: Vec<usize> = class.iter().map(|(c, _)| *c).collect();
            charts.sort_unstable();
            let before = charts.len();
            charts.dedup();
            if charts.len() != before {
                return Err(Error::InvalidAtlas(
                    "a chamber class has two distinct representatives in one chart".into(),
                ));
            }
        }
        Ok(classes.into_values().collect())
    }

    /// Chambers of the arrangement entirely inside a chart window.
    pub fn chambers_in_window(&self, chart: usize) -> Result<Vec<Cell>> {
        let w = &self.windows[chart];
        let all = self.coxeter.chambers_in_box();
        Ok(all
            .iter()
            .filter(|c| c.verts.iter().all(|v| w.contains(v)))
            .cloned()
            .collect())
    }
}

/// A cell of the building: chart id plus the cell there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildingCell {
    pub chart: usize,
    pub cell: Cell,
}

fn same_germ(a: &SectorGerm, b: &SectorGerm) -> bool {
    a.base == b.base && a.cone == b.cone
}

/// Wall-crossing parameters of the segment from p to q, including 0 and 1.
pub fn segment_wall_crossings(coxeter: &CoxeterDatum, p: &QVec, q: &QVec) -> Vec<Rat> {
    let mut ts: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for root in &coxeter.pos_roots {
        let a0 = root.dot(p);
        let a1 = root.dot(q);
        let denom = &a1 - &a0;
        if denom.is_zero() {
            continue;
        }
        let lo = a0.clone().min(a1.clone());
        let hi = a0.clone().max(a1.clone());
        let mut k = lo.ceil().to_integer();
        while Rat::from_integer(k.clone()) <= hi {
            let t = (Rat::from_integer(k.clone()) - &a0) / &denom;
            if t > Rat::zero() && t < Rat::one() && !ts.contains(&t) {
                ts.push(t);
            }
            k += 1;
        }
    }
    ts.sort();
    ts
}

/// Merge per-chart circles at a point into one metric graph using the germ
/// identifications induced by the gluings.
fn merge_links(
    atlas: &AtlasBuilding,
    class: &[BuildingPoint],
    circles: Vec<(usize, LinkSpace, QVec)>,
) -> Result<LinkSpace> {
    // Identify (circle index, vertex) and (circle index, arc) across charts.
    let n = circles.len();
    let chart_pos: BTreeMap<usize, usize> = circles
        .iter()
        .enumerate()
        .map(|(i, (c, _, _))| (*c, i))
        .collect();
    // Union-find over vertices and arcs.
    let mut vert_ids: Vec<(usize, usize)> = Vec::new(); // (circle, vertex)
    let mut arc_ids: Vec<(usize, usize)> = Vec::new();
    for (ci, (_, link, _)) in circles.iter().enumerate() {
        for vi in 0..link.verts.len() {
            vert_ids.push((ci, vi));
        }
        for ai in 0..link.arcs.len() {
            arc_ids.push((ci, ai));
        }
    }
    let vkey: BTreeMap<(usize, usize), usize> = vert_ids
        .iter()
        .enumerate()
        .map(|(i, k)| (*k, i))
        .collect();
    let akey: BTreeMap<(usize, usize), usize> = arc_ids
        .iter()
        .enumerate()
        .map(|(i, k)| (*k, i))
        .collect();
    let mut vparent: Vec<usize> = (0..vert_ids.len()).collect();
    let mut aparent: Vec<usize> = (0..arc_ids.len()).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    fn union(parent: &mut Vec<usize>, a: usize, b: usize) {
        let ra = find(parent, a);
        let rb = find(parent, b);
        if ra != rb {
            parent[ra] = rb;
        }
    }
    // For each gluing applicable at the point: identify germ directions.
    for (from, chart_edges) in atlas.edges.iter().enumerate() {
        for e in chart_edges {
            let to = e.to;
            let (ci, cj) = match (chart_pos.get(&from), chart_pos.get(&to)) {
                (Some(a), Some(b)) => (*a, *b),
                _ => continue,
            };
            let map = e.map.clone();
            let a_from = &class[ci].point;
            debug_assert_eq!(class[ci].chart, from);
            let dom_from = &e.dom;
            if !dom_from.contains(a_from) {
                continue;
            }
            // Tangent cone constraints of the domain at the point: active
            // halfspaces `n . x <= rhs` give `n . v <= 0`.
            let active: Vec<QVec> = dom_from
                .halfspaces
                .iter()
                .filter(|h| h.normal.dot(a_from) == h.rhs)
                .map(|h| h.normal.neg())
                .collect();
            let in_cone = |v: &QVec| active.iter().all(|c| !c.dot(v).is_negative());
            let (_, link_from, _) = &circles[ci];
            let (_, link_to, _) = &circles[cj];
            // Vertices.
            for (vi, v) in link_from.verts.iter().enumerate() {
                if !in_cone(&v.dir) {
                    continue;
                }
                let img = map.apply_dir(&v.dir).primitive_signed();
                if let Some(vj) = link_to
                    .verts
                    .iter()
                    .position(|w| w.dir == img)
                {
                    union(
                        &mut vparent,
                        vkey[&(ci, vi)],
                        vkey[&(cj, vj)],
                    );
                }
            }
            // Arcs: glued when the whole direction cone lies in the domain's
            // tangent cone (endpoints, and the interior via for pi-arcs).
            for (ai, arc) in link_from.arcs.iter().enumerate() {
                let rep = arc.rep();
                let interior_ok = match &rep.via {
                    Some(v) => in_cone(v),
                    None => true,
                };
                if !(in_cone(&rep.u0) && in_cone(&rep.u1) && interior_ok) {
                    continue;
                }
                let im0 = map.apply_dir(&rep.u0).primitive_signed();
                let im1 = map.apply_dir(&rep.u1).primitive_signed();
                let im_via = rep.via.as_ref().map(|v| map.apply_dir(v));
                if let Some(aj) = link_to.arcs.iter().position(|b| {
                    let r = b.rep();
                    let ends = (r.u0 == im0 && r.u1 == im1) || (r.u0 == im1 && r.u1 == im0);
                    if !ends {
                        return false;
                    }
                    match (&r.via, &im_via) {
                        (Some(a), Some(b)) => a.dot(b).is_positive(),
                        (None, None) => true,
                        _ => false,
                    }
                }) {
                    union(&mut aparent, akey[&(ci, ai)], akey[&(cj, aj)]);
                }
            }
        }
    }
    let _ = n;
    // Build merged link: vertex classes and arc classes.
    let mut vclass_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut verts = Vec::new();
    for i in 0..vert_ids.len() {
        let r = find(&mut vparent, i);
        if let std::collections::btree_map::Entry::Vacant(e) = vclass_of.entry(r) {
            let (ci, vi) = vert_ids[r];
            let v = &circles[ci].1.verts[vi];
            e.insert(verts.len());
            verts.push(v.clone());
        }
    }
    let mut arcs: Vec<LinkArc> = Vec::new();
    let mut aclass_of: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..arc_ids.len() {
        let r = find(&mut aparent, i);
        let (ci, ai) = arc_ids[i];
        let link_i = &circles[ci].1;
        let arc = &link_i.arcs[ai];
        let v0_class = vclass_of[&find(&mut vparent, vkey[&(ci, arc.v0)])];
        let v1_class = vclass_of[&find(&mut vparent, vkey[&(ci, arc.v1)])];
        match aclass_of.get(&r) {
            Some(&merged_idx) => {
                // Additional chart representative of an existing arc.
                let m = &mut arcs[merged_idx];
                let rep = arc.rep().clone();
                // Orient the rep consistently with the merged arc ends.
                if m.v0 == v0_class && m.v1 == v1_class {
                    m.reps.push(rep);
                } else {
                    m.reps.push(ArcRep {
                        chart: rep.chart,
                        u0: rep.u1,
                        u1: rep.u0,
                        via: rep.via,
                    });
                }
            }
            None => {
                aclass_of.insert(r, arcs.len());
                arcs.push(LinkArc {
                    v0: v0_class,
                    v1: v1_class,
                    reps: vec![arc.rep().clone()],
                    len: arc.len.clone(),
                });
            }
        }
    }
    Ok(LinkSpace {
        topology: Topology::Graph,
        verts,
        arcs,
        metric: atlas.coxeter.metric.clone(),
        rank: atlas.coxeter.rank,
    })
}

impl Polyhedron {
    /// Image of the polyhedron under an invertible affine map.
    pub fn map_through(&self, g: &AffineMap) -> Polyhedron {
        let inv = g.inverse().expect("affine map invertible");
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| {
                // n . g^{-1}(y) <= c  <=>  (n^T Ginv) y <= c + n . Ginv t ...
                let normal = inv.lin.transpose().mul_vec(&h.normal);
                let rhs = &h.rhs - &h.normal.dot(&inv.tr);
                Halfspace::new(normal, rhs)
            })
            .collect();
        Polyhedron::new(self.dim, halfspaces)
    }
}

/// Reflection wall data as a halfspace pair helper.
pub fn wall_halfspace(w: &Wall, side: crate::coxeter::Side) -> Halfspace {
    w.halfspace(side)
}

// ---------------------------------------------------------------------------
// Canned buildings
// ---------------------------------------------------------------------------

/// Three half-apartment "pages" glued along one thick wall.
pub fn tripod_building(
    tag: crate::coxeter::TypeTag,
    wall: &Wall,
    center_chamber: Cell,
    box_radius: i64,
) -> AtlasBuilding {
    let coxeter = CoxeterDatum::with_box(tag, box_radius);
    let refl = coxeter.reflection(wall);
    let plus = wall.halfspace(crate::coxeter::Side::Plus);
    let minus = wall.halfspace(crate::coxeter::Side::Minus);
    let dim = coxeter.rank;
    let gluings = vec![
        // chart0 branch1 (plus side) = chart1 branch1.
        Gluing {
            i: 0,
            j: 1,
            map: AffineMap::identity(dim),
            domain: Polyhedron::new(dim, vec![plus.clone()]),
        },
        // chart1 minus side (branch3) = chart2 minus side.
        Gluing {
            i: 1,
            j: 2,
            map: AffineMap::identity(dim),
            domain: Polyhedron::new(dim, vec![minus.clone()]),
        },
        // chart0 minus side (branch2) = chart2 plus side, via the reflection.
        Gluing {
            i: 0,
            j: 2,
            map: refl,
            domain: Polyhedron::new(dim, vec![minus]),
        },
    ];
    AtlasBuilding::with_box_windows(coxeter, 3, gluings, Center::Chamber(center_chamber))
}

/// Thick A2 building with a vertex link containing two chambers opposite the
/// center chamber and adjacent to each other: three charts glued along
/// half-apartments through the origin.
pub fn a2_counterexample_building() -> AtlasBuilding {
    let coxeter = CoxeterDatum::with_box(crate::coxeter::TypeTag::A2affine, 4);
    let wall = Wall::from_i64(&[1, 0], 0, 1);
    let refl = coxeter.reflection(&wall);
    let plus = wall.halfspace(crate::coxeter::Side::Plus);
    let minus = wall.halfspace(crate::coxeter::Side::Minus);
    let dim = 2;
    let center = coxeter.fundamental_chamber();
    let gluings = vec![
        Gluing {
            i: 0,
            j: 1,
            map: AffineMap::identity(dim),
            domain: Polyhedron::new(dim, vec![plus]),
        },
        Gluing {
            i: 0,
            j: 2,
            map: AffineMap::identity(dim),
            domain: Polyhedron::new(dim, vec![minus.clone()]),
        },
        // chart1 minus half folds onto chart2's plus half.
        Gluing {
            i: 1,
            j: 2,
            map: refl,
            domain: Polyhedron::new(dim, vec![minus]),
        },
    ];
    AtlasBuilding::with_weyl_windows(coxeter, 3, gluings, Center::Chamber(center))
}

/// Combinatorial ball of the (q+1)-regular tree as an A1affine atlas:
/// charts are leaf-to-leaf geodesic paths.
pub struct TreeData {
    pub atlas: AtlasBuilding,
    /// Node coordinates in the base chart, if on it.
    pub n_nodes: usize,
}

pub fn tree_building(q: usize, depth: i64, center: Center) -> TreeData {
    assert!(q >= 1 && depth >= 1);
    // Nodes: 0 = root; each node has parent and depth.
    #[derive(Clone)]
    struct Node {
        parent: Option<usize>,
        depth: i64,
    }
    let mut nodes = vec![Node {
        parent: None,
        depth: 0,
    }];
    let mut frontier = vec![0usize];
    for d in 1..=depth {
        let mut next = Vec::new();
        for &p in &frontier {
            let fanout = if p == 0 { q + 1 } else { q };
            for _ in 0..fanout {
                nodes.push(Node {
                    parent: Some(p),
                    depth: d,
                });
                next.push(nodes.len() - 1);
            }
        }
        frontier = next;
    }
    let n_nodes = nodes.len();
    // Path from a node to the root.
    let path_to_root = |mut a: usize| -> Vec<usize> {
        let mut out = vec![a];
        while let Some(p) = nodes[a].parent {
            out.push(p);
            a = p;
        }
        out
    };
    // Geodesic between two nodes through the tree.
    let tree_path = |a: usize, b: usize| -> Vec<usize> {
        let pa = path_to_root(a);
        let pb = path_to_root(b);
        // Find deepest common node.
        let set: std::collections::BTreeSet<usize> = pa.iter().cloned().collect();
        let meet = *pb.iter().find(|n| set.contains(n)).unwrap();
        let mut out: Vec<usize> = pa.iter().take_while(|&&n| n != meet).cloned().collect();
        out.push(meet);
        let tail: Vec<usize> = pb.iter().take_while(|&&n| n != meet).cloned().collect();
        out.extend(tail.into_iter().rev());
        out
    };
    let leaves: Vec<usize> = (0..n_nodes).filter(|&i| nodes[i].depth == depth).collect();
    // Charts: leaf pairs, as node sequences. Chart 0 is the path between the
    // two smallest leaves THROUGH THE ROOT (guaranteed via distinct top
    // branches), coordinatized symmetrically around the root.
    let mut charts: Vec<Vec<usize>> = Vec::new();
    // Pick base pair: first two leaves in different root branches.
    let top_branch = |mut a: usize| -> usize {
        while let Some(p) = nodes[a].parent {
            if p == 0 {
                return a;
            }
            a = p;
        }
        a
    };
    let base_l1 = leaves[0];
    let base_l2 = *leaves
        .iter()
        .find(|&&l| top_branch(l) != top_branch(base_l1))
        .expect("tree has >= 2 branches");
    charts.push(tree_path(base_l1, base_l2));
    for (ii, &l1) in leaves.iter().enumerate() {
        for &l2 in leaves.iter().skip(ii + 1) {
            if (l1, l2) == (base_l1.min(base_l2), base_l1.max(base_l2)) {
                continue;
            }
            let p = tree_path(l1, l2);
            if p.len() >= 2 {
                charts.push(p);
            }
        }
    }
    // Chart coordinates: chart 0 maps its nodes to [-depth .. +depth]-style
    // integers with the root at 0; other charts use [0 .. len-1].
    let coord_of = |chart: &Vec<usize>, chart_idx: usize, node: usize| -> Option<i64> {
        chart.iter().position(|&n| n == node).map(|pos| {
            if chart_idx == 0 {
                let root_pos = chart.iter().position(|&n| n == 0).unwrap() as i64;
                pos as i64 - root_pos
            } else {
                pos as i64
            }
        })
    };
    // Windows.
    let coxeter = CoxeterDatum::with_box(crate::coxeter::TypeTag::A1affine, 4 * depth.max(1));
    let mut windows = Vec::new();
    for (cidx, chart) in charts.iter().enumerate() {
        let lo = coord_of(chart, cidx, chart[0]).unwrap();
        let hi = coord_of(chart, cidx, chart[chart.len() - 1]).unwrap();
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        windows.push(Polyhedron::new(
            1,
            vec![
                Halfspace::new(QVec::from_i64(&[1]), rat_i(hi)),
                Halfspace::new(QVec::from_i64(&[-1]), rat_i(-lo)),
            ],
        ));
    }
    // Gluings: for each chart pair with a shared subpath of >= 1 edge.
    let mut gluings = Vec::new();
    for i in 0..charts.len() {
        for j in (i + 1)..charts.len() {
            // Shared nodes, in chart-i order.
            let shared: Vec<usize> = charts[i]
                .iter()
                .cloned()
                .filter(|n| charts[j].contains(n))
                .collect();
            if shared.len() < 2 {
                continue;
            }
            // Affine 1D map determined by two shared nodes.
            let a0 = coord_of(&charts[i], i, shared[0]).unwrap();
            let a1 = coord_of(&charts[i], i, shared[1]).unwrap();
            let b0 = coord_of(&charts[j], j, shared[0]).unwrap();
            let b1 = coord_of(&charts[j], j, shared[1]).unwrap();
            let slope = (b1 - b0) / (a1 - a0);
            debug_assert!(slope == 1 || slope == -1);
            let lin = crate::exact::QMat::from_i64(&[&[slope]]);
            let tr = QVec::from_i64(&[b0 - slope * a0]);
            let lo = shared
                .iter()
                .map(|&n| coord_of(&charts[i], i, n).unwrap())
                .min()
                .unwrap();
            let hi = shared
                .iter()
                .map(|&n| coord_of(&charts[i], i, n).unwrap())
                .max()
                .unwrap();
            gluings.push(Gluing {
                i,
                j,
                map: AffineMap { lin, tr },
                domain: Polyhedron::new(
                    1,
                    vec![
                        Halfspace::new(QVec::from_i64(&[1]), rat_i(hi)),
                        Halfspace::new(QVec::from_i64(&[-1]), rat_i(-lo)),
                    ],
                ),
            });
        }
    }
    let n_charts = charts.len();
    TreeData {
        atlas: AtlasBuilding::new(coxeter, n_charts, windows, gluings, center),
        n_nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::TypeTag;

    fn unit_square_cell() -> Cell {
        Cell::new(vec![
            QVec::from_i64(&[0, 0]),
            QVec::from_i64(&[1, 0]),
            QVec::from_i64(&[0, 1]),
            QVec::from_i64(&[1, 1]),
        ])
    }

    fn tripod() -> AtlasBuilding {
        tripod_building(
            TypeTag::A1xA1,
            &Wall::from_i64(&[1, 0], 0, 1),
            unit_square_cell(),
            4,
        )
    }

    #[test]
    fn single_chart_atlas_is_valid() {
        let coxeter = CoxeterDatum::with_box(TypeTag::A1xA1, 4);
        let center = unit_square_cell();
        let atlas =
            AtlasBuilding::with_box_windows(coxeter, 1, vec![], Center::Chamber(center));
        assert!(atlas.validate().verdict);
    }

    #[test]
    fn tripod_is_valid_and_nonconvex_domain_is_rejected() {
        let t = tripod();
        let rep = t.validate();
        assert!(rep.verdict, "{:?}", rep.witnesses);
        // Same tripod but with a lower-dimensional gluing domain: invalid.
        let coxeter = CoxeterDatum::with_box(TypeTag::A1xA1, 4);
        let bad = AtlasBuilding::with_box_windows(
            coxeter.clone(),
            2,
            vec![Gluing {
                i: 0,
                j: 1,
                map: AffineMap::identity(2),
                domain: Polyhedron::new(
                    2,
                    vec![
                        Halfspace::new(QVec::from_i64(&[1, 0]), rat_i(0)),
                        Halfspace::new(QVec::from_i64(&[-1, 0]), rat_i(0)),
                    ],
                ),
            }],
            Center::Chamber(unit_square_cell()),
        );
        let rep = bad.validate();
        assert!(!rep.verdict);
        assert!(rep
            .witnesses
            .iter()
            .any(|w| w.kind == "gluing_domain_degenerate"));
        // A domain with a non-wall facet is also rejected.
        let bad2 = AtlasBuilding::with_box_windows(
            coxeter,
            2,
            vec![Gluing {
                i: 0,
                j: 1,
                map: AffineMap::identity(2),
                domain: Polyhedron::new(
                    2,
                    vec![Halfspace::new(QVec::from_i64(&[2, 1]), rat_i(0))],
                ),
            }],
            Center::Chamber(unit_square_cell()),
        );
        let rep = bad2.validate();
        assert!(!rep.verdict);
        assert!(rep
            .witnesses
            .iter()
            .any(|w| w.kind == "gluing_domain_not_convex_chamber_subcomplex"));
    }

    #[test]
    fn canonical_point_examples() {
        let t = tripod();
        // Base chart point: itself.
        let x = BuildingPoint::new(0, QVec(vec![rat(1, 2), rat(1, 2)]));
        assert_eq!(t.canonical_point(&x).unwrap(), x);
        // Point in a gluing domain given in chart 2: re-expressed minimally.
        // Chart 2 plus side = chart 0 minus side via the reflection.
        let y = BuildingPoint::new(2, QVec(vec![rat(3, 2), rat(1, 2)]));
        let cy = t.canonical_point(&y).unwrap();
        assert_eq!(cy.chart, 0);
        assert_eq!(cy.point, QVec(vec![rat(-3, 2), rat(1, 2)]));
        // Point outside every gluing domain (interior of branch 3, strictly
        // minus side of chart 1): minimal chart is 1 itself.
        let z = BuildingPoint::new(2, QVec(vec![rat(-3, 2), rat(1, 2)]));
        let cz = t.canonical_point(&z).unwrap();
        assert_eq!(cz.chart, 1);
    }

    #[test]
    fn tripod_retraction_folds_branch3_away_from_center() {
        let t = tripod();
        // x in branch 3 at distance s from the wall: rep in chart 1 minus side.
        let x = BuildingPoint::new(1, QVec(vec![rat(-7, 4), rat(1, 3)]));
        // Oracle: the unique gluing isometry fixing the common half-line
        // folds branch 3 onto the non-center side of the base chart, which
        // here is the identity on coordinates.
        let rho = t.retract(&x).unwrap();
        assert_eq!(rho, QVec(vec![rat(-7, 4), rat(1, 3)]));
        // x in branch 2 (base chart minus side) is fixed: rho = id on Sigma.
        let y = BuildingPoint::new(0, QVec(vec![rat(-7, 4), rat(1, 3)]));
        assert_eq!(t.retract(&y).unwrap(), y.point);
        // And branch 2 expressed through chart 2 coordinates agrees.
        let y2 = BuildingPoint::new(2, QVec(vec![rat(7, 4), rat(1, 3)]));
        assert_eq!(t.retract(&y2).unwrap(), y.point);
        // x in the center chamber is fixed.
        let c = BuildingPoint::new(0, QVec(vec![rat(1, 2), rat(1, 4)]));
        assert_eq!(t.retract(&c).unwrap(), c.point);
    }

    #[test]
    fn retraction_composition_law_on_tripod() {
        let t = tripod();
        // Charts containing the center chamber: 0 and 1.
        let maps = t.folding_maps(0).unwrap();
        assert!(maps[0].is_some() && maps[1].is_some() && maps[2].is_none());
        // rho_{Sigma,C} . rho_{Sigma',C} = rho_{Sigma,C} pointwise.
        let pts = [
            BuildingPoint::new(0, QVec(vec![rat(3, 2), rat(1, 5)])),
            BuildingPoint::new(0, QVec(vec![rat(-5, 2), rat(7, 5)])),
            BuildingPoint::new(1, QVec(vec![rat(-1, 3), rat(-2, 3)])),
            BuildingPoint::new(2, QVec(vec![rat(5, 4), rat(3, 4)])),
            BuildingPoint::new(2, QVec(vec![rat(-5, 4), rat(3, 4)])),
        ];
        for x in &pts {
            let via1 = t.retract_onto(1, x).unwrap();
            let composed = t.retract(&BuildingPoint::new(1, via1)).unwrap();
            let direct = t.retract(x).unwrap();
            assert_eq!(composed, direct, "composition law at {:?}", x);
        }
    }

    #[test]
    fn tripod_geodesic_across_branches() {
        let t = tripod();
        // Mirrored points in branches 2 and 3 at distances s,t from the wall.
        let x = BuildingPoint::new(0, QVec(vec![rat(-1, 1), rat(1, 2)])); // branch 2
        let y = BuildingPoint::new(1, QVec(vec![rat(-3, 2), rat(1, 2)])); // branch 3
        // Common chart: chart 2 (branches 2 and 3).
        let chart = t.common_chart(&x, &y).unwrap();
        assert_eq!(chart, 2);
        let path = t.geodesic(&x, &y).unwrap();
        // Oracle: exact Gram computation in the folding chart. In chart 2
        // coordinates x = (1, 1/2), y = (-3/2, 1/2): distance 5/2.
        assert!((path.length - 2.5).abs() < 1e-12);
        // Breakpoint inserted at the wall crossing.
        assert!(path.points.len() >= 3);
        // Degenerate geodesic.
        let p = t.geodesic(&x, &x).unwrap();
        assert_eq!(p.length, 0.0);
        // Same-chamber segment has no breakpoints.
        let a = BuildingPoint::new(0, QVec(vec![rat(1, 4), rat(1, 4)]));
        let b = BuildingPoint::new(0, QVec(vec![rat(3, 4), rat(2, 3)]));
        let p = t.geodesic(&a, &b).unwrap();
        assert_eq!(p.points.len(), 2);
    }

    #[test]
    fn common_apartment_examples() {
        let t = tripod();
        let x = BuildingPoint::new(0, QVec(vec![rat(1, 2), rat(1, 2)]));
        let y = BuildingPoint::new(0, QVec(vec![rat(5, 2), rat(3, 2)]));
        assert_eq!(t.common_chart(&x, &y).unwrap(), 0);
        assert_eq!(t.common_chart(&x, &x).unwrap(), 0);
        // Branch 2 vs branch 3: the chart glued from both.
        let b2 = BuildingPoint::new(0, QVec(vec![rat(-2, 1), rat(0, 1)]));
        let b3 = BuildingPoint::new(1, QVec(vec![rat(-2, 1), rat(0, 1)]));
        assert_eq!(t.common_chart(&b2, &b3).unwrap(), 2);
    }

    #[test]
    fn tripod_link_at_wall_point_has_three_lobes() {
        let t = tripod();
        // Interior wall point (0, 1/2): three half-apartment germs.
        let x = BuildingPoint::new(0, QVec(vec![rat(0, 1), rat(1, 2)]));
        let link = t.link_at(&x).unwrap();
        assert_eq!(link.topology, Topology::Graph);
        // Two wall-direction vertices, three pi-arcs between them.
        assert_eq!(link.verts.len(), 2);
        assert_eq!(link.arcs.len(), 3);
        for arc in &link.arcs {
            assert!((arc.len.value - std::f64::consts::PI).abs() < 1e-12);
        }
        assert!(link.check_girth());
        // Thickness: three chambers on the panel through the point.
        assert_eq!(t.panel_thickness(&x).unwrap(), 3);
    }

    #[test]
    fn a2_counterexample_building_is_valid_and_thick_at_origin() {
        let b = a2_counterexample_building();
        let rep = b.validate();
        assert!(rep.verdict, "{:?}", rep.witnesses);
        let origin = BuildingPoint::new(0, QVec::from_i64(&[0, 0]));
        let link = b.link_at(&origin).unwrap();
        // Circle (6 arcs) plus an extra path of 3 arcs: 9 arcs, 8 vertices.
        assert_eq!(link.arcs.len(), 9);
        assert_eq!(link.verts.len(), 8);
        assert!(link.check_girth());
    }

    #[test]
    fn a2_counterexample_d_dprime_adjacent_via_panel_reflection() {
        let b = a2_counterexample_building();
        // D = the K3-cone alcove in chart 0; D' = same coords in chart 1.
        let d_cell = Cell::new(vec![
            QVec::from_i64(&[0, 0]),
            QVec::from_i64(&[-1, 0]),
            QVec::from_i64(&[0, -1]),
        ]);
        // Common chart of interior points of D and D' is chart 2.
        let bd = BuildingPoint::new(0, d_cell.barycenter());
        let bdp = BuildingPoint::new(1, d_cell.barycenter());
        let chart = b.common_chart(&bd, &bdp).unwrap();
        assert_eq!(chart, 2);
        let d_in_2 = b.rep_in_chart(&bd, 2).unwrap();
        let dp_in_2 = b.rep_in_chart(&bdp, 2).unwrap();
        let cd = b.coxeter.carrier(&d_in_2).unwrap();
        let cdp = b.coxeter.carrier(&dp_in_2).unwrap();
        // Oracle: gallery enumeration gives distance 1, i.e. the Weyl
        // distance is the reflection fixing the common panel.
        let g = b.coxeter.gallery_between(&cd, &cdp).unwrap();
        assert_eq!(g.len(), 1);
        let sep = b.coxeter.separating_walls(&cd, &cdp);
        assert_eq!(sep.len(), 1);
        // The separating wall contains the shared panel.
        let shared: Vec<&QVec> = cd.verts.iter().filter(|v| cdp.verts.contains(v)).collect();
        assert_eq!(shared.len(), 2);
        for v in shared {
            assert_eq!(sep[0].normal.dot(v), sep[0].offset);
        }
    }

    #[test]
    fn tree_building_valid_and_thick() {
        let tree = tree_building(
            2,
            3,
            Center::Sector(SectorGerm {
                base: QVec::from_i64(&[0]),
                cone: vec![QVec::from_i64(&[1])],
            }),
        );
        let b = &tree.atlas;
        assert_eq!(b.coxeter.rank, 1);
        let rep = b.validate();
        assert!(rep.verdict, "{:?}", rep.witnesses);
        // Thick at every interior node: the root (coordinate 0 of chart 0)
        // has 3 chambers around it.
        let root = BuildingPoint::new(0, QVec::from_i64(&[0]));
        assert_eq!(b.panel_thickness(&root).unwrap(), 3);
        // Interior nodes at depth 1 likewise.
        let n1 = BuildingPoint::new(0, QVec::from_i64(&[1]));
        assert_eq!(b.panel_thickness(&n1).unwrap(), 3);
    }

    #[test]
    fn tree_end_retraction_matches_graph_distance_oracle() {
        // Classical tree retraction via distance to the end.
        let tree = tree_building(
            2,
            3,
            Center::Sector(SectorGerm {
                base: QVec::from_i64(&[0]),
                cone: vec![QVec::from_i64(&[1])],
            }),
        );
        let b = &tree.atlas;
        // x on the base chart retracts to itself.
        let x = BuildingPoint::new(0, QVec(vec![rat(3, 2)]));
        assert_eq!(b.retract(&x).unwrap(), x.point);
        // A point hanging in a branch at parameter t below node v retracts to
        // the point of Sigma at the same distance below v (away from +inf).
        // Chart 1 is some other leaf pair; find a chart whose overlap with
        // chart 0 ends at a node, then step off the overlap.
        let mut checked = 0;
        for g in &b.gluings {
            if g.i != 0 {
                continue;
            }
            // Overlap [lo, hi] in chart-0 coordinates.
            let faces = g.domain.boundary_faces();
            if faces.len() != 2 {
                continue;
            }
            let hi = faces
                .iter()
                .filter_map(|f| f.endpoints.first())
                .map(|p| p.0[0].clone())
                .max()
                .unwrap();
            // Point just beyond the overlap in chart j: at distance 1/3
            // past the top shared node v (in chart-j coordinates).
            let v_in_j = g.map.apply(&QVec(vec![hi.clone()]));
            let dirs = [rat_i(1), rat_i(-1)];
            for dstep in dirs {
                let cand = QVec(vec![&v_in_j.0[0] + &(&dstep * &rat(1, 3))]);
                let bp = BuildingPoint::new(g.j, cand.clone());
                if !b.in_window(&bp) {
                    continue;
                }
                // Skip if the candidate is still glued to chart 0.
                if b.point_class(&bp).unwrap().iter().any(|r| r.chart == 0) {
                    continue;
                }
                let rho = b.retract(&bp).unwrap();
                // Oracle: distance to the end is preserved; the image lies
                // below v at distance 1/3 on the away side.
                let expected = QVec(vec![&hi - &rat(1, 3)]);
                assert_eq!(rho, expected);
                checked += 1;
                break;
            }
            if checked >= 3 {
                break;
            }
        }
        assert!(checked >= 1, "found at least one hanging branch to check");
    }

    #[test]
    fn projection_at_infinity_examples() {
        let germ = SectorGerm {
            base: QVec::from_i64(&[0]),
            cone: vec![QVec::from_i64(&[1])],
        };
        let tree = tree_building(2, 3, Center::Sector(germ.clone()));
        let b = &tree.atlas;
        // sigma = a chamber: the projection is sigma itself.
        let edge = BuildingCell {
            chart: 0,
            cell: Cell::new(vec![QVec::from_i64(&[0]), QVec::from_i64(&[1])]),
        };
        let p = b.project_chamber_at_infinity(&germ, &edge).unwrap();
        assert_eq!(p.cell, edge.cell);
        // sigma = a node: the edge at sigma toward the end.
        let node = BuildingCell {
            chart: 0,
            cell: Cell::new(vec![QVec::from_i64(&[1])]),
        };
        let p = b.project_chamber_at_infinity(&germ, &node).unwrap();
        // Oracle: graph search toward the end = the edge [1, 2] on chart 0.
        assert_eq!(
            p.cell,
            Cell::new(vec![QVec::from_i64(&[1]), QVec::from_i64(&[2])])
        );
    }

    #[test]
    fn infinity_retraction_composition_on_tripod() {
        // Sector germ pointing along the thick wall (into branch 2 side).
        let germ = SectorGerm {
            base: QVec::from_i64(&[0, 0]),
            cone: vec![QVec::from_i64(&[-1, 0]), QVec::from_i64(&[0, 1])],
        };
        let coxeter = CoxeterDatum::new(TypeTag::A1xA1);
        let wall = Wall::from_i64(&[1, 0], 0, 1);
        let refl = coxeter.reflection(&wall);
        let plus = wall.halfspace(crate::coxeter::Side::Plus);
        let minus = wall.halfspace(crate::coxeter::Side::Minus);
        let gluings = vec![
            Gluing {
                i: 0,
                j: 1,
                map: AffineMap::identity(2),
                domain: Polyhedron::new(2, vec![plus]),
            },
            Gluing {
                i: 1,
                j: 2,
                map: AffineMap::identity(2),
                domain: Polyhedron::new(2, vec![minus.clone()]),
            },
            Gluing {
                i: 0,
                j: 2,
                map: refl,
                domain: Polyhedron::new(2, vec![minus]),
            },
        ];
        let b = AtlasBuilding::with_box_windows(coxeter, 3, gluings, Center::Sector(germ));
        // The germ cone sits in the minus side: charts 0 and 2 qualify.
        let maps = b.folding_maps(0).unwrap();
        assert!(maps[0].is_some());
        assert!(maps[2].is_some());
        assert!(maps[1].is_none());
        // Identity on the shared sector.
        let s = BuildingPoint::new(0, QVec(vec![rat(-3, 1), rat(2, 1)]));
        assert_eq!(b.retract(&s).unwrap(), s.point);
        // Branch 1 retracts through chart 0; branch 3 through chart 2.
        let b1 = BuildingPoint::new(0, QVec(vec![rat(3, 2), rat(1, 1)]));
        assert_eq!(b.retract(&b1).unwrap(), b1.point);
        let b3 = BuildingPoint::new(1, QVec(vec![rat(-3, 2), rat(1, 1)]));
        // Chart 1 (-3/2, 1) = chart 2 (-3/2, 1) -> fold via chart 2's map.
        let rho = b.retract(&b3).unwrap();
        // chart2 -> chart0 is the reflection: (-3/2, 1) -> (3/2, 1).
        assert_eq!(rho, QVec(vec![rat(3, 2), rat(1, 1)]));
        // Composition law with target chart 2.
        for x in [
            BuildingPoint::new(0, QVec(vec![rat(5, 2), rat(-1, 2)])),
            BuildingPoint::new(1, QVec(vec![rat(-5, 2), rat(-1, 2)])),
            BuildingPoint::new(0, QVec(vec![rat(-5, 2), rat(3, 2)])),
        ] {
            let via = b.retract_onto(2, &x).unwrap();
            let composed = b.retract(&BuildingPoint::new(2, via)).unwrap();
            assert_eq!(composed, b.retract(&x).unwrap());
        }
    }

    #[test]
    fn geodesic_length_agrees_across_all_common_charts() {
        let t = tripod();
        let pairs = [
            (
                BuildingPoint::new(0, QVec(vec![rat(1, 3), rat(5, 4)])),
                BuildingPoint::new(1, QVec(vec![rat(-7, 3), rat(-1, 4)])),
            ),
            (
                BuildingPoint::new(0, QVec(vec![rat(-3, 2), rat(1, 4)])),
                BuildingPoint::new(2, QVec(vec![rat(-5, 2), rat(9, 4)])),
            ),
        ];
        for (x, y) in &pairs {
            let charts = t.common_charts(x, y).unwrap();
            assert!(!charts.is_empty());
            let mut lens = Vec::new();
            for &c in &charts {
                let p = t.geodesic_in_chart(c, x, y).unwrap();
                lens.push(p.length);
            }
            for l in &lens {
                assert!((l - lens[0]).abs() < 1e-9);
            }
        }
    }
}
