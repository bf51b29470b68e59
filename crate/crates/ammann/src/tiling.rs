//! Finite d-tilings: refinement, coarsening, adjacency and the local rules.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use crate::error::TilingError;
use crate::geometry::{
    ChairSide, ColoredSegment, Linear, ParentRole, PlacedHexagon, Placement, Point, Rect, SizeClass,
};
use crate::ring::RingElem;

/// A finite set of interior-disjoint hexagons of sizes `d = ψ^unit_exp`
/// (Large) and `dψ` (Small). Hexagons are kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Tiling {
    unit_exp: i64,
    hexes: Vec<PlacedHexagon>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CoarsenPolicy {
    Strict,
    TrimBoundary,
}

fn class_for(unit_exp: i64, scale_exp: i64) -> Option<SizeClass> {
    match scale_exp - unit_exp {
        0 => Some(SizeClass::Large),
        1 => Some(SizeClass::Small),
        _ => None,
    }
}

impl Tiling {
    /// Builds a tiling, checking that every hexagon's size class matches
    /// its scale. Interior-disjointness is checked separately by
    /// [`Tiling::check_disjoint`].
    pub fn new(unit_exp: i64, hexes: Vec<PlacedHexagon>) -> Result<Tiling, TilingError> {
        if hexes.is_empty() {
            return Err(TilingError::Empty);
        }
        for h in &hexes {
            if class_for(unit_exp, h.place.scale_exp) != Some(h.class) {
                return Err(TilingError::WrongSize(Box::new(h.clone()), unit_exp));
            }
        }
        Ok(Tiling::from_sorted(unit_exp, hexes))
    }

    fn from_sorted(unit_exp: i64, mut hexes: Vec<PlacedHexagon>) -> Tiling {
        hexes.par_sort();
        hexes.dedup();
        Tiling { unit_exp, hexes }
    }

    pub fn unit_exp(&self) -> i64 {
        self.unit_exp
    }

    pub fn hexes(&self) -> &[PlacedHexagon] {
        &self.hexes
    }

    pub fn len(&self) -> usize {
        self.hexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hexes.is_empty()
    }

    pub fn count(&self, class: SizeClass) -> usize {
        self.hexes.iter().filter(|h| h.class == class).count()
    }

    pub fn contains(&self, h: &PlacedHexagon) -> bool {
        self.hexes.binary_search(h).is_ok()
    }

    pub fn index_of(&self, h: &PlacedHexagon) -> Option<usize> {
        self.hexes.binary_search(h).ok()
    }

    pub fn total_area(&self) -> RingElem {
        self.hexes.iter().fold(RingElem::zero(), |acc, h| &acc + &h.area())
    }

    /// Union of two tilings with the same unit.
    pub fn union(&self, other: &Tiling) -> Tiling {
        assert_eq!(self.unit_exp, other.unit_exp, "union needs a common unit");
        let mut hexes = self.hexes.clone();
        hexes.extend(other.hexes.iter().cloned());
        Tiling::from_sorted(self.unit_exp, hexes)
    }

    /// Applies a similarity to every hexagon.
    pub fn transformed(&self, t: &Placement) -> Tiling {
        let hexes = self.hexes.iter().map(|h| h.transformed(t)).collect();
        Tiling::from_sorted(self.unit_exp + t.scale_exp, hexes)
    }

    /// Keeps the hexagons satisfying `keep`; `None` if nothing remains.
    pub fn filtered(&self, keep: impl Fn(&PlacedHexagon) -> bool) -> Option<Tiling> {
        let hexes: Vec<_> = self.hexes.iter().filter(|h| keep(h)).cloned().collect();
        (!hexes.is_empty()).then(|| Tiling::from_sorted(self.unit_exp, hexes))
    }

    pub fn refine(&self) -> Tiling {
        let hexes: Vec<PlacedHexagon> = self
            .hexes
            .par_iter()
            .flat_map_iter(|h| match h.class {
                SizeClass::Large => {
                    let (d, s) = h.subdivide();
                    vec![d, s]
                }
                SizeClass::Small => vec![PlacedHexagon::new(h.place.clone(), SizeClass::Large)],
            })
            .collect();
        Tiling::from_sorted(self.unit_exp + 1, hexes)
    }

    pub fn refine_n(&self, n: usize) -> Tiling {
        (0..n).fold(self.clone(), |t, _| t.refine())
    }

    /// Image of `h` in the coarsening, or `None` for a Small whose brother
    /// is missing.
    pub fn coarse_image(&self, h: &PlacedHexagon) -> Option<PlacedHexagon> {
        let sib = h.sibling_of();
        match h.class {
            SizeClass::Small => self.contains(&sib).then(|| h.parent_of(ParentRole::AsSon)),
            SizeClass::Large if self.contains(&sib) => Some(h.parent_of(ParentRole::AsDaughter)),
            SizeClass::Large => Some(PlacedHexagon::new(h.place.clone(), SizeClass::Small)),
        }
    }

    /// The unique tiling whose refinement is `self` (Strict), or the
    /// coarsening of `self` minus the Smalls that lack their brother.
    pub fn coarsen(&self, policy: CoarsenPolicy) -> Result<Tiling, TilingError> {
        self.coarsen_with_trimmed(policy).map(|(t, _)| t)
    }

    pub fn coarsen_with_trimmed(
        &self,
        policy: CoarsenPolicy,
    ) -> Result<(Tiling, Vec<PlacedHexagon>), TilingError> {
        let images: Vec<(usize, Option<PlacedHexagon>)> =
            self.hexes.par_iter().enumerate().map(|(i, h)| (i, self.coarse_image(h))).collect();
        let mut hexes = Vec::with_capacity(self.hexes.len());
        let mut trimmed = Vec::new();
        for (i, img) in images {
            match img {
                Some(p) => hexes.push(p),
                None if policy == CoarsenPolicy::Strict => {
                    return Err(TilingError::MissingBrother(Box::new(self.hexes[i].clone())))
                }
                None => trimmed.push(self.hexes[i].clone()),
            }
        }
        if hexes.is_empty() {
            return Err(TilingError::Empty);
        }
        Ok((Tiling::from_sorted(self.unit_exp - 1, hexes), trimmed))
    }

    /// Pairs of hexagons whose interiors intersect.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let boxes: Vec<[f64; 4]> = self.hexes.iter().map(|h| h.bbox().approx()).collect();
        let mut order: Vec<usize> = (0..self.hexes.len()).collect();
        order.sort_by(|&a, &b| boxes[a][0].total_cmp(&boxes[b][0]));
        let mut out = Vec::new();
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                if boxes[j][0] > boxes[i][2] + 1e-9 {
                    break;
                }
                if boxes[j][1] > boxes[i][3] + 1e-9 || boxes[i][1] > boxes[j][3] + 1e-9 {
                    continue;
                }
                if self.hexes[i].overlaps(&self.hexes[j]) {
                    out.push((i.min(j), i.max(j)));
                }
            }
        }
        out.sort();
        out
    }

    pub fn check_disjoint(&self) -> bool {
        self.overlapping_pairs().is_empty()
    }

    /// Exact area of `r` covered by the tiling.
    pub fn covered_area(&self, r: &Rect) -> RingElem {
        let rb = r.approx();
        let mut total = RingElem::zero();
        for h in &self.hexes {
            let hb = h.bbox().approx();
            if hb[0] > rb[2] + 1e-9 || rb[0] > hb[2] + 1e-9 || hb[1] > rb[3] + 1e-9 || rb[1] > hb[3] + 1e-9 {
                continue;
            }
            for hr in h.rects() {
                total += &hr.overlap_area(r);
            }
        }
        total
    }

    pub fn covers_rect(&self, r: &Rect) -> bool {
        self.covered_area(r) == r.area()
    }

    pub fn covers_hexagon(&self, h: &PlacedHexagon) -> bool {
        h.rects().iter().all(|r| self.covers_rect(r))
    }

    pub fn bbox(&self) -> Rect {
        let mut b = self.hexes[0].bbox();
        for h in &self.hexes[1..] {
            let hb = h.bbox();
            b.min.x = RingElem::min_value(&b.min.x, &hb.min.x);
            b.min.y = RingElem::min_value(&b.min.y, &hb.min.y);
            b.max.x = RingElem::max_value(&b.max.x, &hb.max.x);
            b.max.y = RingElem::max_value(&b.max.y, &hb.max.y);
        }
        b
    }
}

/// `n` refinements of a Large hexagon at `base`; level −1 is a lone Small.
pub fn standard_tiling(level: i64, base: &Placement) -> Result<Tiling, TilingError> {
    if level < -1 {
        return Err(TilingError::BadLevel(level));
    }
    if level == -1 {
        let h = PlacedHexagon::new(base.clone(), SizeClass::Small);
        return Ok(Tiling::from_sorted(base.scale_exp - 1, vec![h]));
    }
    let seed = Tiling::from_sorted(base.scale_exp, vec![PlacedHexagon::new(base.clone(), SizeClass::Large)]);
    Ok(seed.refine_n(level as usize))
}

/// `Fib(n)` with `Fib(−1) = Fib(0) = 1`: the hexagon count of a level-`n`
/// standard tiling.
pub fn fib(n: i64) -> u64 {
    let (mut prev, mut cur) = (1u64, 1u64);
    for _ in 0..n.max(0) {
        (prev, cur) = (cur, prev + cur);
    }
    cur
}

/// Axis-parallel line `x = coord` (vertical) or `y = coord`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AxisLine {
    pub vertical: bool,
    pub coord: RingElem,
}

impl AxisLine {
    pub fn of_segment(a: &Point, b: &Point) -> Option<AxisLine> {
        if a.x == b.x {
            Some(AxisLine { vertical: true, coord: a.x.clone() })
        } else if a.y == b.y {
            Some(AxisLine { vertical: false, coord: a.y.clone() })
        } else {
            None
        }
    }

    /// Coordinate along the line.
    pub fn along<'a>(&self, q: &'a Point) -> &'a RingElem {
        if self.vertical {
            &q.y
        } else {
            &q.x
        }
    }

    pub fn across<'a>(&self, q: &'a Point) -> &'a RingElem {
        if self.vertical {
            &q.x
        } else {
            &q.y
        }
    }

    pub fn point(&self, t: &RingElem) -> Point {
        if self.vertical {
            Point::new(self.coord.clone(), t.clone())
        } else {
            Point::new(t.clone(), self.coord.clone())
        }
    }
}

/// A maximal common boundary segment of hexagons `a < b`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SharedSegment {
    pub a: usize,
    pub b: usize,
    pub line: AxisLine,
    pub lo: RingElem,
    pub hi: RingElem,
}

impl SharedSegment {
    pub fn start(&self) -> Point {
        self.line.point(&self.lo)
    }

    pub fn end(&self) -> Point {
        self.line.point(&self.hi)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Adjacency {
    pub segments: Vec<SharedSegment>,
}

impl Adjacency {
    /// Distinct adjacent index pairs `(a, b)` with `a < b`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self.segments.iter().map(|s| (s.a, s.b)).collect();
        set.into_iter().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

struct SideInterval {
    lo: RingElem,
    hi: RingElem,
    owner: usize,
}

fn cmp(a: &RingElem, b: &RingElem) -> Ordering {
    a.cmp_value(b)
}

/// Shared boundary segments of positive length, found by grouping sides by
/// supporting line and sweeping each line.
pub fn adjacency(t: &Tiling) -> Adjacency {
    let mut lines: HashMap<AxisLine, Vec<SideInterval>> = HashMap::new();
    for (i, h) in t.hexes.iter().enumerate() {
        for side in ChairSide::ALL {
            let (a, b) = h.side(side);
            let line = AxisLine::of_segment(&a, &b).expect("sides are axis-parallel");
            let (lo, hi) = {
                let (s, e) = (line.along(&a).clone(), line.along(&b).clone());
                if cmp(&s, &e) == Ordering::Less { (s, e) } else { (e, s) }
            };
            lines.entry(line).or_default().push(SideInterval { lo, hi, owner: i });
        }
    }
    let mut keyed: Vec<(AxisLine, Vec<SideInterval>)> = lines.into_iter().filter(|(_, v)| v.len() > 1).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut segments: Vec<SharedSegment> = keyed
        .into_par_iter()
        .flat_map_iter(|(line, mut ivs)| {
            ivs.sort_by(|a, b| cmp(&a.lo, &b.lo));
            let mut out = Vec::new();
            for i in 0..ivs.len() {
                for j in i + 1..ivs.len() {
                    if cmp(&ivs[j].lo, &ivs[i].hi) != Ordering::Less {
                        break;
                    }
                    if ivs[i].owner == ivs[j].owner {
                        continue;
                    }
                    let hi = RingElem::min_value(&ivs[i].hi, &ivs[j].hi);
                    let (a, b) = (ivs[i].owner.min(ivs[j].owner), ivs[i].owner.max(ivs[j].owner));
                    out.push(SharedSegment { a, b, line: line.clone(), lo: ivs[j].lo.clone(), hi });
                }
            }
            out
        })
        .collect();
    segments.sort_by(|x, y| (x.a, x.b).cmp(&(y.a, y.b)).then_with(|| x.line.cmp(&y.line)).then_with(|| cmp(&x.lo, &y.lo)));
    Adjacency { segments }
}

/// A decoration piece seen along a line: `[lo, hi]`, forward when the arrow
/// points towards increasing coordinate.
#[derive(Clone, Debug)]
pub struct LinePiece {
    pub lo: RingElem,
    pub hi: RingElem,
    pub forward: bool,
    pub color: u8,
    pub side: ChairSide,
    pub class: SizeClass,
}

pub fn pieces_on_line(h: &PlacedHexagon, deco: &[ColoredSegment], line: &AxisLine) -> Vec<LinePiece> {
    let mut out: Vec<LinePiece> = deco
        .iter()
        .filter(|s| AxisLine::of_segment(&s.start, &s.end).as_ref() == Some(line))
        .map(|s| {
            let (a, b) = (line.along(&s.start), line.along(&s.end));
            let forward = cmp(a, b) == Ordering::Less;
            let (lo, hi) = if forward { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
            LinePiece { lo, hi, forward, color: s.color, side: s.side, class: h.class }
        })
        .collect();
    out.sort_by(|a, b| cmp(&a.lo, &b.lo));
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ViolationKind {
    /// Colours (or the extents of the coloured segments) disagree.
    Color,
    /// Same coloured segment, opposite arrows.
    Orientation,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Violation {
    pub a: usize,
    pub b: usize,
    pub start: Point,
    pub end: Point,
    pub kind: ViolationKind,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn find_piece<'a>(pieces: &'a [LinePiece], lo: &RingElem, hi: &RingElem) -> Option<(usize, &'a LinePiece)> {
    pieces
        .iter()
        .enumerate()
        .find(|(_, p)| cmp(&p.lo, lo) != Ordering::Greater && cmp(hi, &p.hi) != Ordering::Greater)
}

/// Compares the decorations of both hexagons along one shared segment.
fn check_segment(
    seg: &SharedSegment,
    pa: &[LinePiece],
    pb: &[LinePiece],
    orientation: bool,
    out: &mut Vec<Violation>,
) {
    let mut cuts: Vec<RingElem> = vec![seg.lo.clone(), seg.hi.clone()];
    for p in pa.iter().chain(pb) {
        for v in [&p.lo, &p.hi] {
            if cmp(v, &seg.lo) == Ordering::Greater && cmp(v, &seg.hi) == Ordering::Less {
                cuts.push(v.clone());
            }
        }
    }
    cuts.sort_by(cmp);
    cuts.dedup();
    let mut seen: HashSet<(Option<usize>, Option<usize>)> = HashSet::new();
    for w in cuts.windows(2) {
        let a = find_piece(pa, &w[0], &w[1]);
        let b = find_piece(pb, &w[0], &w[1]);
        let key = (a.map(|x| x.0), b.map(|x| x.0));
        if !seen.insert(key) {
            continue;
        }
        let kind = match (a, b) {
            (Some((_, x)), Some((_, y))) => {
                if x.color != y.color || x.lo != y.lo || x.hi != y.hi {
                    Some(ViolationKind::Color)
                } else if orientation && x.forward != y.forward {
                    Some(ViolationKind::Orientation)
                } else {
                    None
                }
            }
            _ => Some(ViolationKind::Color),
        };
        if let Some(kind) = kind {
            out.push(Violation {
                a: seg.a,
                b: seg.b,
                start: seg.line.point(&w[0]),
                end: seg.line.point(&w[1]),
                kind,
            });
        }
    }
}

fn decorations(t: &Tiling) -> Vec<Vec<ColoredSegment>> {
    t.hexes.par_iter().map(|h| h.decorate()).collect()
}

fn check_rule(t: &Tiling, orientation: bool) -> Report {
    let adj = adjacency(t);
    let deco = decorations(t);
    let mut violations: Vec<Violation> = adj
        .segments
        .par_iter()
        .flat_map_iter(|seg| {
            let pa = pieces_on_line(&t.hexes[seg.a], &deco[seg.a], &seg.line);
            let pb = pieces_on_line(&t.hexes[seg.b], &deco[seg.b], &seg.line);
            let mut out = Vec::new();
            check_segment(seg, &pa, &pb, orientation, &mut out);
            out
        })
        .collect();
    violations.sort_by(|x, y| (x.a, x.b, x.kind).cmp(&(y.a, y.b, y.kind)).then_with(|| x.start.cmp(&y.start)));
    Report { violations }
}

/// Local rule on colours and arrows of all shared boundary points.
pub fn check_proper(t: &Tiling) -> Report {
    check_rule(t, true)
}

/// Colours only.
pub fn check_almost_proper(t: &Tiling) -> Report {
    check_rule(t, false)
}

/// A `6`-arrow shared with opposite orientation by two outer sides.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ForbiddenOccurrence {
    pub a: usize,
    pub b: usize,
    pub sides: ((SizeClass, ChairSide), (SizeClass, ChairSide)),
    pub start: Point,
    pub end: Point,
}

/// The three places a `6`-arrow occurs outside the small hexagon's cavity.
pub fn six_sites() -> [(SizeClass, ChairSide); 3] {
    [
        (SizeClass::Small, ChairSide::Bottom),
        (SizeClass::Large, ChairSide::Front),
        (SizeClass::Large, ChairSide::Back),
    ]
}

pub fn forbidden_pair_scan(t: &Tiling) -> Vec<ForbiddenOccurrence> {
    let adj = adjacency(t);
    let deco = decorations(t);
    let sites = six_sites();
    let mut out: Vec<ForbiddenOccurrence> = Vec::new();
    for seg in &adj.segments {
        let pa = pieces_on_line(&t.hexes[seg.a], &deco[seg.a], &seg.line);
        let pb = pieces_on_line(&t.hexes[seg.b], &deco[seg.b], &seg.line);
        for x in pa.iter().filter(|p| p.color == 6 && sites.contains(&(p.class, p.side))) {
            for y in pb.iter().filter(|p| p.color == 6 && sites.contains(&(p.class, p.side))) {
                let inside = cmp(&x.lo, &seg.lo) != Ordering::Less && cmp(&x.hi, &seg.hi) != Ordering::Greater;
                if inside && x.lo == y.lo && x.hi == y.hi && x.forward != y.forward {
                    let mut sides = ((x.class, x.side), (y.class, y.side));
                    if sides.1 < sides.0 {
                        sides = (sides.1, sides.0);
                    }
                    out.push(ForbiddenOccurrence {
                        a: seg.a,
                        b: seg.b,
                        sides,
                        start: seg.line.point(&x.lo),
                        end: seg.line.point(&x.hi),
                    });
                }
            }
        }
    }
    out
}

/// Congruence class of an adjacent pair: the second hexagon expressed in
/// the frame of the first, minimised over both orders.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PairClass {
    pub first: SizeClass,
    pub second: SizeClass,
    pub relative: Placement,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PairKind {
    SmallSmall,
    LargeLarge,
    SmallLarge,
}

impl PairClass {
    pub fn of(a: &PlacedHexagon, b: &PlacedHexagon) -> PairClass {
        let key = |x: &PlacedHexagon, y: &PlacedHexagon| PairClass {
            first: x.class,
            second: y.class,
            relative: x.place.invert().compose(&y.place),
        };
        std::cmp::min(key(a, b), key(b, a))
    }

    pub fn kind(&self) -> PairKind {
        match (self.first, self.second) {
            (SizeClass::Small, SizeClass::Small) => PairKind::SmallSmall,
            (SizeClass::Large, SizeClass::Large) => PairKind::LargeLarge,
            _ => PairKind::SmallLarge,
        }
    }

    /// A representative: the first hexagon at the identity frame scaled to
    /// unit 0.
    pub fn realize(&self) -> Tiling {
        let s = match self.first {
            SizeClass::Large => 0,
            SizeClass::Small => 1,
        };
        let a = PlacedHexagon::new(Placement::scaled(s), self.first);
        let b = PlacedHexagon::new(Placement::scaled(s).compose(&self.relative), self.second);
        Tiling::from_sorted(0, vec![a, b])
    }
}

pub fn pair_classes(t: &Tiling) -> BTreeSet<PairClass> {
    adjacency(t)
        .pairs()
        .into_iter()
        .map(|(a, b)| PairClass::of(&t.hexes[a], &t.hexes[b]))
        .collect()
}

/// Pair classes occurring in the level-`n` standard tiling.
pub fn admissible_pairs(level: i64) -> BTreeSet<PairClass> {
    standard_tiling(level, &Placement::identity()).map(|t| pair_classes(&t)).unwrap_or_default()
}

/// Default depth of the admissibility table.
pub const ADMISSIBLE_SEARCH_LEVEL: i64 = 12;

pub fn is_admissible(a: &PlacedHexagon, b: &PlacedHexagon, table: &BTreeSet<PairClass>) -> bool {
    table.contains(&PairClass::of(a, b))
}

fn canonical_scale(class: SizeClass) -> i64 {
    match class {
        SizeClass::Large => 0,
        SizeClass::Small => 1,
    }
}

/// Inward unit normal of a side of the canonical (counter-clockwise) hexagon.
fn inward_normal(side: ChairSide) -> Point {
    let v = crate::geometry::canonical_vertices();
    let i = side.index();
    let d = v[(i + 1) % 6].sub(&v[i]);
    let sgn = |x: &RingElem| RingElem::from_int(x.sign() as i64);
    Point::new(-sgn(&d.y), sgn(&d.x))
}

fn unit_dir(a: &Point, b: &Point) -> Point {
    let d = b.sub(a);
    Point::new(RingElem::from_int(d.x.sign() as i64), RingElem::from_int(d.y.sign() as i64))
}

/// Places a hexagon of class `class` across `host`'s segment `target`, so
/// that its own segment `mine` covers `target` with the same arrow
/// (`same_direction`) or the reverse one.
pub fn attach(
    host: &PlacedHexagon,
    target: &ColoredSegment,
    class: SizeClass,
    mine: &ColoredSegment,
    same_direction: bool,
) -> Option<PlacedHexagon> {
    let host_normal = host.place.apply_vector(&inward_normal(target.side));
    let want_dir = if same_direction {
        unit_dir(&target.start, &target.end)
    } else {
        unit_dir(&target.end, &target.start)
    };
    let my_dir = unit_dir(&mine.start, &mine.end);
    let my_normal = inward_normal(mine.side);
    let s = canonical_scale(class) + host.place.scale_exp - canonical_scale(host.class);
    let host_normal = Point::new(
        RingElem::from_int(host_normal.x.sign() as i64),
        RingElem::from_int(host_normal.y.sign() as i64),
    );
    for lin in Linear::all() {
        if lin.apply(&my_dir) == want_dir && lin.apply(&my_normal) == host_normal.neg() {
            let place = Placement::new(lin.rot, lin.reflect, s, Point::origin());
            let anchor = if same_direction { &target.start } else { &target.end };
            let shift = anchor.sub(&place.apply(&mine.start));
            let h = PlacedHexagon::new(place.translated(&shift), class);
            return (h.place.apply(&mine.end) == *(if same_direction { &target.end } else { &target.start }))
                .then_some(h);
        }
    }
    None
}

/// All congruence classes of pairs attached so that every shared point
/// agrees in colour and orientation.
pub fn properly_attached_pairs() -> BTreeSet<PairClass> {
    let mut out = BTreeSet::new();
    for host_class in [SizeClass::Large, SizeClass::Small] {
        let host = PlacedHexagon::new(Placement::scaled(canonical_scale(host_class)), host_class);
        for target in host.decorate() {
            for class in [SizeClass::Large, SizeClass::Small] {
                let guest_canon = PlacedHexagon::new(Placement::scaled(canonical_scale(class)), class);
                for mine in guest_canon.decorate().iter().filter(|m| m.color == target.color) {
                    let canon_mine = ColoredSegment {
                        start: guest_canon.place.invert().apply(&mine.start),
                        end: guest_canon.place.invert().apply(&mine.end),
                        ..mine.clone()
                    };
                    let Some(g) = attach(&host, &target, class, &canon_mine, true) else { continue };
                    if host.overlaps(&g) {
                        continue;
                    }
                    let pair = Tiling::from_sorted(0, vec![host.clone(), g.clone()]);
                    if check_proper(&pair).passed() {
                        out.insert(PairClass::of(&host, &g));
                    }
                }
            }
        }
    }
    out
}

/// The six attachments that share a `6`-arrow with opposite orientation.
pub fn forbidden_configurations() -> Vec<Tiling> {
    let sites = six_sites();
    let mut out = Vec::new();
    for (i, &(ca, sa)) in sites.iter().enumerate() {
        for &(cb, sb) in &sites[i..] {
            let host = PlacedHexagon::new(Placement::scaled(canonical_scale(ca)), ca);
            let target = host.decorate().into_iter().find(|s| s.color == 6 && s.side == sa).unwrap();
            let mine = crate::geometry::canonical_decoration(cb)
                .into_iter()
                .find(|s| s.color == 6 && s.side == sb)
                .unwrap();
            let guest = attach(&host, &target, cb, &mine, false).expect("attachment exists");
            out.push(Tiling::from_sorted(0, vec![host, guest]));
        }
    }
    out
}

/// Searches for a nonzero translation `v` with `|v| ≤ bound` such that
/// every hexagon whose translate lies inside the patch is mapped onto a
/// hexagon of the patch. Returns the shortest such `v`.
pub fn period_search(t: &Tiling, bound: &RingElem) -> Option<Point> {
    let bound2 = bound * bound;
    let mut by_shape: HashMap<(u8, bool, i64), Vec<&PlacedHexagon>> = HashMap::new();
    for h in &t.hexes {
        by_shape.entry((h.place.rot, h.place.reflect, h.place.scale_exp)).or_default().push(h);
    }
    let anchor = &t.hexes[0];
    let mut candidates: Vec<Point> = by_shape[&(anchor.place.rot, anchor.place.reflect, anchor.place.scale_exp)]
        .iter()
        .map(|h| h.place.shift.sub(&anchor.place.shift))
        .chain(
            by_shape[&(anchor.place.rot, anchor.place.reflect, anchor.place.scale_exp)]
                .iter()
                .map(|h| anchor.place.shift.sub(&h.place.shift)),
        )
        .filter(|v| !(v.x.is_zero() && v.y.is_zero()))
        .filter(|v| v.norm2().cmp_value(&bound2) != Ordering::Greater)
        .collect();
    candidates.sort_by(|a, b| a.norm2().cmp_value(&b.norm2()).then_with(|| a.cmp(b)));
    candidates.dedup();
    candidates.into_par_iter().find_first(|v| translation_is_period(t, v))
}

fn translation_is_period(t: &Tiling, v: &Point) -> bool {
    let mut matched = 0usize;
    for h in &t.hexes {
        let moved = h.translated(v);
        if t.contains(&moved) {
            matched += 1;
        } else if t.covers_hexagon(&moved) {
            return false;
        }
    }
    matched > 0
}

/// A periodic tiling by translates of one Large hexagon under the lattice
/// spanned by `(ψ³, ψ²)` and `(ψ, −ψ⁴)`.
pub fn periodic_lattice_basis() -> (Point, Point) {
    (
        Point::new(RingElem::psi_pow(3), RingElem::psi_pow(2)),
        Point::new(RingElem::psi_pow(1), -RingElem::psi_pow(4)),
    )
}

/// Lattice translates `i·v₁ + j·v₂` with `|i|, |j| ≤ radius`.
pub fn periodic_patch(radius: i64) -> Tiling {
    let (v1, v2) = periodic_lattice_basis();
    let mut hexes = Vec::new();
    for i in -radius..=radius {
        for j in -radius..=radius {
            let shift = v1.scale(&RingElem::from_int(i)).add(&v2.scale(&RingElem::from_int(j)));
            hexes.push(PlacedHexagon::new(Placement::translation(shift), SizeClass::Large));
        }
    }
    Tiling::from_sorted(0, hexes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(n: i64) -> Tiling {
        standard_tiling(n, &Placement::identity()).unwrap()
    }

    #[test]
    fn fibonacci_counts() {
        assert_eq!(level(-1).len(), 1);
        assert_eq!(level(0).len(), 1);
        assert_eq!(level(0).count(SizeClass::Large), 1);
        let one = level(1);
        assert_eq!((one.count(SizeClass::Large), one.count(SizeClass::Small)), (1, 1));
        let eight = level(8);
        assert_eq!(eight.len(), 55);
        assert_eq!((eight.count(SizeClass::Large), eight.count(SizeClass::Small)), (34, 21));
        for n in -1..12 {
            assert_eq!(level(n).len() as u64, fib(n), "level {n}");
        }
    }

    #[test]
    fn refine_preserves_area_and_disjointness() {
        let t = level(6);
        let r = t.refine();
        assert_eq!(r.len(), t.len() + t.count(SizeClass::Large));
        assert_eq!(t.total_area(), r.total_area());
        assert_eq!(r.total_area(), PlacedHexagon::canonical(SizeClass::Large).area());
        assert!(r.check_disjoint());
        assert_eq!(r, level(7));
    }

    #[test]
    fn coarsening_inverts_refinement() {
        for n in 0..10 {
            assert_eq!(level(n + 1).coarsen(CoarsenPolicy::Strict).unwrap(), level(n));
        }
        assert_eq!(level(0).coarsen(CoarsenPolicy::Strict).unwrap(), level(-1));
        let lone = level(-1);
        assert!(matches!(lone.coarsen(CoarsenPolicy::Strict), Err(TilingError::MissingBrother(_))));
        assert!(matches!(lone.coarsen(CoarsenPolicy::TrimBoundary), Err(TilingError::Empty)));
    }

    #[test]
    fn trim_boundary_drops_orphans() {
        let t = level(5);
        let small = t.hexes().iter().find(|h| h.class == SizeClass::Small).unwrap().clone();
        let brother = small.sibling_of();
        let cut = t.filtered(|h| *h != brother).unwrap();
        assert!(cut.coarsen(CoarsenPolicy::Strict).is_err());
        let (c, trimmed) = cut.coarsen_with_trimmed(CoarsenPolicy::TrimBoundary).unwrap();
        assert_eq!(trimmed, vec![small]);
        assert_eq!(c.len(), level(4).len() - 1);
    }

    #[test]
    fn level_one_has_one_adjacent_pair() {
        let adj = adjacency(&level(1));
        assert_eq!(adj.pairs(), vec![(0, 1)]);
        assert!(adjacency(&level(0)).is_empty());
    }

    #[test]
    fn standard_tilings_are_proper() {
        for n in 0..=10 {
            let r = check_proper(&level(n));
            assert!(r.passed(), "level {n}: {:?}", r.violations.first());
        }
    }

    #[test]
    fn flipped_arrow_is_one_violation() {
        // two large backs sharing their 6-arrow with opposite orientation
        let configs = forbidden_configurations();
        let back = (SizeClass::Large, ChairSide::Back);
        let back_back = configs.iter().find(|c| forbidden_pair_scan(c)[0].sides == (back, back)).unwrap();
        assert!(check_almost_proper(back_back).passed());
        let r = check_proper(back_back);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::Orientation);
    }

    #[test]
    fn forbidden_configurations_are_detected() {
        let configs = forbidden_configurations();
        assert_eq!(configs.len(), 6);
        let mut kinds = BTreeSet::new();
        for c in &configs {
            assert!(c.check_disjoint());
            let found = forbidden_pair_scan(c);
            assert_eq!(found.len(), 1);
            kinds.insert(found[0].sides);
            assert!(!check_proper(c).passed());
        }
        assert_eq!(kinds.len(), 6);
        for n in 0..=9 {
            assert!(forbidden_pair_scan(&level(n)).is_empty());
        }
    }

    #[test]
    fn admissible_pair_counts() {
        let pairs = admissible_pairs(8);
        let count = |k| pairs.iter().filter(|p| p.kind() == k).count();
        assert_eq!(count(PairKind::SmallSmall), 2);
        assert_eq!(count(PairKind::LargeLarge), 7);
        assert_eq!(count(PairKind::SmallLarge), 6);
    }

    #[test]
    fn properly_attached_pair_counts() {
        let pairs = properly_attached_pairs();
        let count = |k| pairs.iter().filter(|p| p.kind() == k).count();
        assert_eq!((count(PairKind::SmallSmall), count(PairKind::LargeLarge), count(PairKind::SmallLarge)), (6, 9, 12));
        assert!(admissible_pairs(10).is_subset(&pairs));
    }

    #[test]
    fn pair_class_is_congruence_invariant() {
        let (d, s) = PlacedHexagon::canonical(SizeClass::Large).subdivide();
        let t = Placement::new(3, true, 5, Point::new(RingElem::from_int(7), RingElem::psi_pow(3)));
        assert_eq!(PairClass::of(&d, &s), PairClass::of(&d.transformed(&t), &s.transformed(&t)));
        assert_eq!(PairClass::of(&d, &s), PairClass::of(&s, &d));
    }

    #[test]
    fn periodic_patch_is_a_tiling_with_a_period() {
        let p = periodic_patch(3);
        assert!(p.check_disjoint());
        let (v1, v2) = periodic_lattice_basis();
        assert_eq!(v1.cross(&v2).abs(), PlacedHexagon::canonical(SizeClass::Large).area());
        let v = period_search(&p, &RingElem::from_int(2)).expect("lattice vector");
        assert!(p.hexes().iter().any(|h| p.contains(&h.translated(&v))));
        assert!(period_search(&level(0), &RingElem::from_int(5)).is_none());
    }

    #[test]
    fn standard_patch_has_no_period() {
        let t = level(8);
        let b = t.bbox();
        let bound = RingElem::max_value(&(&b.max.x - &b.min.x), &(&b.max.y - &b.min.y));
        // a third of the patch extent, rounded up to a power of ψ
        let third = (0..).map(|k| RingElem::psi_pow(-k)).find(|p| p.mul_int(&3.into()).cmp_value(&bound) != Ordering::Less).unwrap();
        assert!(period_search(&t, &third).is_none());
    }
}
