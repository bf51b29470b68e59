//! The canonical Ammann hexagon, similarity placements, the daughter/son
//! subdivision and the standard coloured-arrow decoration.
//!
//! The canonical hexagon has size 1 (its back) and is drawn as a chair with
//! the back on the left and the bottom on the x-axis:
//!
//! ```text
//!  (0,1) ____ (ψ³,1)
//!       |    |
//!       |    |(ψ³,ψ²)___ (ψ,ψ²)
//!       |               |
//!       |_______________|
//!  (0,0)                 (ψ,0)
//! ```
//!
//! Its daughter is the hexagon rotated a quarter turn and scaled by `ψ`, lying
//! on the bottom; its son is the mirror image scaled by `ψ²` hanging from the
//! top of the back.

use std::cmp::Ordering;
use std::fmt;

use crate::error::ShadowError;
use crate::ring::RingElem;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Point {
    pub x: RingElem,
    pub y: RingElem,
}

impl Point {
    pub fn new(x: RingElem, y: RingElem) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::default()
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn neg(&self) -> Point {
        Point::new(-&self.x, -&self.y)
    }

    pub fn scale(&self, f: &RingElem) -> Point {
        Point::new(&self.x * f, &self.y * f)
    }

    pub fn scale_pow(&self, k: i64) -> Point {
        Point::new(self.x.scale_pow(k), self.y.scale_pow(k))
    }

    /// Squared euclidean norm.
    pub fn norm2(&self) -> RingElem {
        &(&self.x * &self.x) + &(&self.y * &self.y)
    }

    pub fn dot(&self, o: &Point) -> RingElem {
        &(&self.x * &o.x) + &(&self.y * &o.y)
    }

    pub fn cross(&self, o: &Point) -> RingElem {
        &(&self.x * &o.y) - &(&self.y * &o.x)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

fn p(x: RingElem, y: RingElem) -> Point {
    Point::new(x, y)
}

fn psi(k: i64) -> RingElem {
    RingElem::psi_pow(k)
}

/// Rotation/reflection part of a placement: `x ↦ Rʳ·Fᶠ·x` where `F`
/// mirrors in the x-axis and `R` is a counter-clockwise quarter turn.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Linear {
    pub rot: u8,
    pub reflect: bool,
}

impl Linear {
    pub const IDENTITY: Linear = Linear { rot: 0, reflect: false };

    pub fn new(rot: u8, reflect: bool) -> Self {
        Linear { rot: rot % 4, reflect }
    }

    pub fn all() -> impl Iterator<Item = Linear> {
        (0..8u8).map(|i| Linear::new(i % 4, i >= 4))
    }

    pub fn apply(&self, q: &Point) -> Point {
        let (x, y) = if self.reflect {
            (q.x.clone(), -&q.y)
        } else {
            (q.x.clone(), q.y.clone())
        };
        match self.rot % 4 {
            0 => p(x, y),
            1 => p(-y, x),
            2 => p(-x, -y),
            _ => p(y, -x),
        }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Linear) -> Linear {
        let r2 = if self.reflect { (4 - other.rot % 4) % 4 } else { other.rot };
        Linear::new((self.rot + r2) % 4, self.reflect ^ other.reflect)
    }

    pub fn inverse(&self) -> Linear {
        if self.reflect {
            *self
        } else {
            Linear::new((4 - self.rot) % 4, false)
        }
    }

    /// Whether the map exchanges the horizontal and vertical axes.
    pub fn swaps_axes(&self) -> bool {
        self.rot % 2 == 1
    }
}

/// A similarity `q ↦ shift + ψ^scale_exp · L(q)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Placement {
    pub rot: u8,
    pub reflect: bool,
    pub scale_exp: i64,
    pub shift: Point,
}

impl Placement {
    pub fn identity() -> Self {
        Placement::default()
    }

    pub fn new(rot: u8, reflect: bool, scale_exp: i64, shift: Point) -> Self {
        Placement { rot: rot % 4, reflect, scale_exp, shift }
    }

    pub fn scaled(scale_exp: i64) -> Self {
        Placement { scale_exp, ..Placement::identity() }
    }

    pub fn translation(shift: Point) -> Self {
        Placement { shift, ..Placement::identity() }
    }

    pub fn linear(&self) -> Linear {
        Linear::new(self.rot, self.reflect)
    }

    pub fn apply(&self, q: &Point) -> Point {
        self.shift.add(&self.linear().apply(q).scale_pow(self.scale_exp))
    }

    /// Applies only the linear and scaling part (for direction vectors).
    pub fn apply_vector(&self, v: &Point) -> Point {
        self.linear().apply(v).scale_pow(self.scale_exp)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Placement) -> Placement {
        let lin = self.linear().compose(&other.linear());
        Placement {
            rot: lin.rot,
            reflect: lin.reflect,
            scale_exp: self.scale_exp + other.scale_exp,
            shift: self.apply(&other.shift),
        }
    }

    pub fn invert(&self) -> Placement {
        let inv = self.linear().inverse();
        let shift = inv.apply(&self.shift).scale_pow(-self.scale_exp).neg();
        Placement { rot: inv.rot, reflect: inv.reflect, scale_exp: -self.scale_exp, shift }
    }

    pub fn translated(&self, v: &Point) -> Placement {
        Placement { shift: self.shift.add(v), ..self.clone() }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rot={} reflect={} k={} shift={}",
            self.rot, self.reflect as u8, self.scale_exp, self.shift
        )
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SizeClass {
    Large,
    Small,
}

impl SizeClass {
    pub fn letter(self) -> char {
        match self {
            SizeClass::Large => 'L',
            SizeClass::Small => 'S',
        }
    }
}

/// The six sides of the chair. `InnerH`/`InnerV` bound the notch.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ChairSide {
    Bottom,
    Front,
    InnerH,
    InnerV,
    Top,
    Back,
}

impl ChairSide {
    /// Sides in counter-clockwise order, side `i` running from vertex `i`
    /// to vertex `i + 1` of [`canonical_vertices`].
    pub const ALL: [ChairSide; 6] = [
        ChairSide::Bottom,
        ChairSide::Front,
        ChairSide::InnerH,
        ChairSide::InnerV,
        ChairSide::Top,
        ChairSide::Back,
    ];

    pub fn index(self) -> usize {
        ChairSide::ALL.iter().position(|&s| s == self).unwrap()
    }

    /// Length of this side on the size-1 hexagon, as a power of `ψ`.
    pub fn length_exp(self) -> i64 {
        match self {
            ChairSide::Back => 0,
            ChairSide::Bottom => 1,
            ChairSide::Front => 2,
            ChairSide::Top => 3,
            ChairSide::InnerV => 4,
            ChairSide::InnerH => 5,
        }
    }
}

/// Side label of side `index` (counter-clockwise from the back/bottom
/// corner); placements do not change it.
pub fn chair_side(index: usize) -> Option<ChairSide> {
    ChairSide::ALL.get(index).copied()
}

/// Vertices of the size-1 hexagon, counter-clockwise from the back/bottom
/// corner.
pub fn canonical_vertices() -> [Point; 6] {
    let z = RingElem::zero;
    [
        p(z(), z()),
        p(psi(1), z()),
        p(psi(1), psi(2)),
        p(psi(3), psi(2)),
        p(psi(3), RingElem::one()),
        p(z(), RingElem::one()),
    ]
}

/// Shoelace area of the canonical hexagon, `ψ³ + ψ⁷`.
pub fn canonical_area() -> RingElem {
    let v = canonical_vertices();
    let mut twice = RingElem::zero();
    for i in 0..6 {
        twice += &v[i].cross(&v[(i + 1) % 6]);
    }
    // twice the area is even in every coefficient
    let c = twice.coeffs();
    RingElem::from_coeffs([&c[0] / 2, &c[1] / 2, &c[2] / 2, &c[3] / 2])
}

/// Daughter relative to its parent: quarter turn, scale `ψ`, shift `(ψ, 0)`.
pub fn daughter_placement() -> Placement {
    Placement::new(1, false, 1, p(psi(1), RingElem::zero()))
}

/// Son relative to its parent: mirror, scale `ψ²`, shift `(0, 1)`.
pub fn son_placement() -> Placement {
    Placement::new(0, true, 2, p(RingElem::zero(), RingElem::one()))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PlacedHexagon {
    pub place: Placement,
    pub class: SizeClass,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ParentRole {
    /// The hexagon is the son; its parent is its mother.
    AsSon,
    /// The hexagon is the daughter; its parent is its father.
    AsDaughter,
}

/// Axis-parallel rectangle `[min.x, max.x] × [min.y, max.y]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn from_corners(a: &Point, b: &Point) -> Rect {
        Rect {
            min: p(RingElem::min_value(&a.x, &b.x), RingElem::min_value(&a.y, &b.y)),
            max: p(RingElem::max_value(&a.x, &b.x), RingElem::max_value(&a.y, &b.y)),
        }
    }

    pub fn area(&self) -> RingElem {
        &(&self.max.x - &self.min.x) * &(&self.max.y - &self.min.y)
    }

    /// Area of the intersection (zero if the interiors are disjoint).
    pub fn overlap_area(&self, o: &Rect) -> RingElem {
        let w = &RingElem::min_value(&self.max.x, &o.max.x) - &RingElem::max_value(&self.min.x, &o.min.x);
        let h = &RingElem::min_value(&self.max.y, &o.max.y) - &RingElem::max_value(&self.min.y, &o.min.y);
        if w.sign() <= 0 || h.sign() <= 0 {
            RingElem::zero()
        } else {
            &w * &h
        }
    }

    pub fn interiors_overlap(&self, o: &Rect) -> bool {
        !self.overlap_area(o).is_zero()
    }

    pub fn contains_point(&self, q: &Point) -> bool {
        self.min.x.cmp_value(&q.x) != Ordering::Greater
            && q.x.cmp_value(&self.max.x) != Ordering::Greater
            && self.min.y.cmp_value(&q.y) != Ordering::Greater
            && q.y.cmp_value(&self.max.y) != Ordering::Greater
    }

    pub fn approx(&self) -> [f64; 4] {
        [self.min.x.to_f64(), self.min.y.to_f64(), self.max.x.to_f64(), self.max.y.to_f64()]
    }
}

/// A directed coloured segment: the arrow runs from `start` to `end`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ColoredSegment {
    pub start: Point,
    pub end: Point,
    pub color: u8,
    pub side: ChairSide,
}

impl ColoredSegment {
    pub fn length2(&self) -> RingElem {
        self.end.sub(&self.start).norm2()
    }

    pub fn reversed(&self) -> ColoredSegment {
        ColoredSegment { start: self.end.clone(), end: self.start.clone(), ..self.clone() }
    }
}

type DecoSpec = (i64, i64, i64, i64, u8, ChairSide);

fn sym(code: i64) -> RingElem {
    // 0 → 0, 1 → 1, 2+k → ψᵏ, −1 → 1 − ψ⁶
    match code {
        0 => RingElem::zero(),
        1 => RingElem::one(),
        -1 => &RingElem::one() - &psi(6),
        k => psi(k - 2),
    }
}

// Endpoints use `sym` codes: 3 = ψ, 4 = ψ², 5 = ψ³, 6 = ψ⁴, −1 = 1 − ψ⁶.
const LARGE_DECO: [DecoSpec; 10] = [
    (5, 0, 0, 0, 3, ChairSide::Bottom),
    (3, 0, 5, 0, 5, ChairSide::Bottom),
    (3, 6, 3, 0, 4, ChairSide::Front),
    (3, 4, 3, 6, 6, ChairSide::Front),
    (5, 4, 3, 4, 5, ChairSide::InnerH),
    (5, 1, 5, 4, 4, ChairSide::InnerV),
    (0, 1, 5, 1, 3, ChairSide::Top),
    (0, 1, 0, -1, 6, ChairSide::Back),
    (0, -1, 0, 6, 4, ChairSide::Back),
    (0, 0, 0, 6, 4, ChairSide::Back),
];

// Small hexagon drawn at size 1: colour c has length ψ^(c−1) here.
const SMALL_DECO: [DecoSpec; 8] = [
    (5, 0, 0, 0, 4, ChairSide::Bottom),
    (3, 0, 5, 0, 6, ChairSide::Bottom),
    (3, 0, 3, 4, 3, ChairSide::Front),
    (5, 4, 3, 4, 6, ChairSide::InnerH),
    (5, 1, 5, 4, 5, ChairSide::InnerV),
    (0, 1, 5, 1, 4, ChairSide::Top),
    (0, 6, 0, 1, 3, ChairSide::Back),
    (0, 0, 0, 6, 5, ChairSide::Back),
];

fn build_deco(spec: &[DecoSpec]) -> Vec<ColoredSegment> {
    spec.iter()
        .map(|&(x0, y0, x1, y1, color, side)| ColoredSegment {
            start: p(sym(x0), sym(y0)),
            end: p(sym(x1), sym(y1)),
            color,
            side,
        })
        .collect()
}

/// Standard decoration of the size-1 hexagon of the given class.
pub fn canonical_decoration(class: SizeClass) -> Vec<ColoredSegment> {
    match class {
        SizeClass::Large => build_deco(&LARGE_DECO),
        SizeClass::Small => build_deco(&SMALL_DECO),
    }
}

/// The cut between daughter and son, coloured `→4 →5 →6` at the child unit.
pub fn canonical_cut() -> Vec<ColoredSegment> {
    let z = RingElem::zero;
    vec![
        ColoredSegment { start: p(z(), psi(4)), end: p(psi(5), psi(4)), color: 4, side: ChairSide::Top },
        ColoredSegment { start: p(psi(5), psi(4)), end: p(psi(5), psi(2)), color: 5, side: ChairSide::InnerV },
        ColoredSegment { start: p(psi(5), psi(2)), end: p(psi(3), psi(2)), color: 6, side: ChairSide::InnerH },
    ]
}

/// Style of an Ammann line segment.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum LineStyle {
    Solid,
    Dotted,
}

/// Ammann line segments of the size-1 hexagon of the given class.
pub fn canonical_line_segments(class: SizeClass, style: LineStyle) -> Vec<(Point, Point)> {
    let z = RingElem::zero;
    let one = RingElem::one;
    let back_mark = &one() - &psi(6);
    match (class, style) {
        // slopes ±ψ³ in the hexagon frame
        (SizeClass::Large, LineStyle::Solid) => vec![
            (p(z(), z()), p(psi(1), psi(4))),
            (p(z(), back_mark.clone()), p(psi(1), psi(4))),
            (p(z(), back_mark), p(psi(3), one())),
        ],
        (SizeClass::Small, LineStyle::Dotted) => vec![
            (p(z(), psi(4)), p(psi(1), z())),
            (p(z(), psi(4)), p(psi(3), psi(2))),
        ],
        // slopes ±ψ⁻³ in the hexagon frame
        (SizeClass::Small, LineStyle::Solid) | (SizeClass::Large, LineStyle::Dotted) => vec![
            (p(psi(3), z()), p(z(), one())),
            (p(psi(3), z()), p(psi(1), psi(2))),
        ],
    }
}

impl PlacedHexagon {
    pub fn new(place: Placement, class: SizeClass) -> Self {
        PlacedHexagon { place, class }
    }

    pub fn canonical(class: SizeClass) -> Self {
        PlacedHexagon::new(Placement::identity(), class)
    }

    pub fn vertices(&self) -> [Point; 6] {
        canonical_vertices().map(|v| self.place.apply(&v))
    }

    /// The two interior-disjoint rectangles whose union is the hexagon:
    /// the back column and the front block.
    pub fn rects(&self) -> [Rect; 2] {
        let z = RingElem::zero;
        let column = (p(z(), z()), p(psi(3), RingElem::one()));
        let block = (p(psi(3), z()), p(psi(1), psi(2)));
        [column, block].map(|(a, b)| Rect::from_corners(&self.place.apply(&a), &self.place.apply(&b)))
    }

    pub fn bbox(&self) -> Rect {
        let v = self.vertices();
        let mut min = v[0].clone();
        let mut max = v[0].clone();
        for q in &v[1..] {
            min.x = RingElem::min_value(&min.x, &q.x);
            min.y = RingElem::min_value(&min.y, &q.y);
            max.x = RingElem::max_value(&max.x, &q.x);
            max.y = RingElem::max_value(&max.y, &q.y);
        }
        Rect { min, max }
    }

    pub fn area(&self) -> RingElem {
        canonical_area().scale_pow(2 * self.place.scale_exp)
    }

    /// True when the interiors intersect.
    pub fn overlaps(&self, other: &PlacedHexagon) -> bool {
        let a = self.rects();
        let b = other.rects();
        a.iter().any(|ra| b.iter().any(|rb| ra.interiors_overlap(rb)))
    }

    pub fn translated(&self, v: &Point) -> PlacedHexagon {
        PlacedHexagon::new(self.place.translated(v), self.class)
    }

    /// Map the whole hexagon (placement and class) by a similarity.
    pub fn transformed(&self, t: &Placement) -> PlacedHexagon {
        PlacedHexagon::new(t.compose(&self.place), self.class)
    }

    /// Standard decoration in world coordinates.
    pub fn decorate(&self) -> Vec<ColoredSegment> {
        canonical_decoration(self.class)
            .into_iter()
            .map(|s| ColoredSegment {
                start: self.place.apply(&s.start),
                end: self.place.apply(&s.end),
                ..s
            })
            .collect()
    }

    /// Side `i` as a segment from vertex `i` to vertex `i + 1`.
    pub fn side(&self, side: ChairSide) -> (Point, Point) {
        let v = self.vertices();
        let i = side.index();
        (v[i].clone(), v[(i + 1) % 6].clone())
    }

    /// `(daughter, son)`: scale exponents grow by one and two.
    pub fn subdivide(&self) -> (PlacedHexagon, PlacedHexagon) {
        (
            PlacedHexagon::new(self.place.compose(&daughter_placement()), SizeClass::Large),
            PlacedHexagon::new(self.place.compose(&son_placement()), SizeClass::Small),
        )
    }

    pub fn parent_of(&self, role: ParentRole) -> PlacedHexagon {
        let rel = match role {
            ParentRole::AsSon => son_placement(),
            ParentRole::AsDaughter => daughter_placement(),
        };
        PlacedHexagon::new(self.place.compose(&rel.invert()), SizeClass::Large)
    }

    /// Brother of a small hexagon, sister of a large one.
    pub fn sibling_of(&self) -> PlacedHexagon {
        match self.class {
            SizeClass::Small => self.parent_of(ParentRole::AsSon).subdivide().0,
            SizeClass::Large => self.parent_of(ParentRole::AsDaughter).subdivide().1,
        }
    }

    /// The cut produced by subdividing this hexagon.
    pub fn cut_decoration(&self) -> Vec<ColoredSegment> {
        canonical_cut()
            .into_iter()
            .map(|s| ColoredSegment { start: self.place.apply(&s.start), end: self.place.apply(&s.end), ..s })
            .collect()
    }

    /// Ammann line segments in world coordinates.
    pub fn line_segments(&self, style: LineStyle) -> Vec<(Point, Point)> {
        canonical_line_segments(self.class, style)
            .into_iter()
            .map(|(a, b)| (self.place.apply(&a), self.place.apply(&b)))
            .collect()
    }
}

impl fmt::Display for PlacedHexagon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.class.letter(), self.place)
    }
}

/// Colour substitution applied on refinement: `6→5, 5→4, 4→3, 3→←4←6`.
pub fn refine_decoration(segs: &[ColoredSegment]) -> Result<Vec<ColoredSegment>, ShadowError> {
    let mut out = Vec::with_capacity(segs.len() + 4);
    for s in segs {
        match s.color {
            4..=6 => out.push(ColoredSegment { color: s.color - 1, ..s.clone() }),
            3 => {
                // the 4-piece (length ψ²·|s|) sits at the start, both arrows reversed
                let mid = s.start.add(&s.end.sub(&s.start).scale(&psi(2)));
                out.push(ColoredSegment { start: mid.clone(), end: s.start.clone(), color: 4, side: s.side });
                out.push(ColoredSegment { start: s.end.clone(), end: mid, color: 6, side: s.side });
            }
            c => return Err(ShadowError::NonStandardColor(c)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn sorted(mut v: Vec<ColoredSegment>) -> Vec<(Point, Point, u8)> {
        let mut out: Vec<_> = v.drain(..).map(|s| (s.start, s.end, s.color)).collect();
        out.sort();
        out
    }

    fn side_len_exps() -> Vec<i64> {
        let v = canonical_vertices();
        let mut out = Vec::new();
        for i in 0..6 {
            let d = v[(i + 1) % 6].sub(&v[i]);
            let len2 = d.norm2();
            let k = (0..12).find(|&k| psi(2 * k) == len2).expect("side is a power of ψ");
            out.push(k);
        }
        out
    }

    #[test]
    fn side_lengths_are_distinct_powers() {
        let exps = side_len_exps();
        let set: BTreeSet<_> = exps.iter().copied().collect();
        assert_eq!(set, (0..6).collect());
        for (i, side) in ChairSide::ALL.iter().enumerate() {
            assert_eq!(exps[i], side.length_exp());
        }
    }

    #[test]
    fn closure_and_area() {
        assert_eq!(psi(0), &psi(2) + &psi(4));
        assert_eq!(psi(1), &psi(3) + &psi(5));
        assert_eq!(canonical_area(), &psi(1) - &psi(9));
        let h = PlacedHexagon::canonical(SizeClass::Large);
        let (d, s) = h.subdivide();
        assert_eq!(&d.area() + &s.area(), h.area());
    }

    #[test]
    fn chair_side_labels() {
        assert_eq!(chair_side(5), Some(ChairSide::Back));
        assert_eq!(chair_side(2), Some(ChairSide::InnerH));
        assert_eq!(chair_side(6), None);
        let v = canonical_vertices();
        assert_eq!((v[5].clone(), v[0].clone()), (p(RingElem::zero(), RingElem::one()), Point::origin()));
    }

    #[test]
    fn placement_group_laws() {
        let a = Placement::new(1, true, 2, p(psi(1), RingElem::from_int(-3)));
        let b = Placement::new(3, false, -1, p(psi(5), psi(2)));
        let q = p(RingElem::new(1, 2, 0, -1), psi(3));
        assert_eq!(a.compose(&b).apply(&q), a.apply(&b.apply(&q)));
        assert_eq!(a.invert().compose(&a), Placement::identity());
        assert_eq!(a.compose(&a.invert()), Placement::identity());
        assert_eq!(Placement::identity().apply(&q), q);
        let half = Placement::new(2, false, 0, p(RingElem::one(), RingElem::zero()));
        let full = half.compose(&half);
        assert_eq!(full.rot, 0);
        assert_eq!(full.shift, Point::origin());
        assert_eq!(Placement::scaled(-1).compose(&Placement::scaled(1)), Placement::identity());
    }

    #[test]
    fn subdivision_is_a_dissection() {
        let h = PlacedHexagon::canonical(SizeClass::Large);
        let (d, s) = h.subdivide();
        assert_eq!(d.place.scale_exp, 1);
        assert_eq!(s.place.scale_exp, 2);
        assert!(!d.overlaps(&s));
        // both children lie inside the parent: their rectangle pieces are covered
        let parent = h.rects();
        for child in [&d, &s] {
            for r in child.rects() {
                let covered: RingElem = parent.iter().fold(RingElem::zero(), |acc, pr| &acc + &pr.overlap_area(&r));
                assert_eq!(covered, r.area());
            }
        }
    }

    #[test]
    fn kinship_identities() {
        let h = PlacedHexagon::new(Placement::new(3, true, 4, p(psi(2), psi(7))), SizeClass::Large);
        let (d, s) = h.subdivide();
        assert_eq!(s.parent_of(ParentRole::AsSon), h);
        assert_eq!(d.parent_of(ParentRole::AsDaughter), h);
        assert_ne!(h.parent_of(ParentRole::AsSon), h.parent_of(ParentRole::AsDaughter));
        assert_eq!(s.sibling_of(), d);
        assert_eq!(d.sibling_of(), s);
        assert_eq!(d.sibling_of().sibling_of(), d);
        assert_eq!(s.sibling_of().class, SizeClass::Large);
    }

    #[test]
    fn son_cavity_is_filled_by_daughter_corner() {
        let h = PlacedHexagon::canonical(SizeClass::Large);
        let (d, s) = h.subdivide();
        // son's reflex corner (InnerH/InnerV) coincides with the daughter's
        // Front/InnerH corner, and the cut colours there are 5 and 6
        let son_reflex = s.vertices()[3].clone();
        assert_eq!(son_reflex, d.vertices()[2]);
        let colors: BTreeSet<u8> = s
            .decorate()
            .into_iter()
            .filter(|seg| matches!(seg.side, ChairSide::InnerH | ChairSide::InnerV))
            .map(|seg| seg.color)
            .collect();
        assert_eq!(colors, [5, 6].into_iter().collect());
    }

    #[test]
    fn decoration_tiles_each_side() {
        for class in [SizeClass::Large, SizeClass::Small] {
            let h = PlacedHexagon::canonical(class);
            let unit = if class == SizeClass::Large { 0 } else { -1 };
            for side in ChairSide::ALL {
                let (a, b) = h.side(side);
                let segs: Vec<_> = h.decorate().into_iter().filter(|s| s.side == side).collect();
                let mut total = RingElem::zero();
                for s in &segs {
                    assert_eq!(s.length2(), psi(2 * (s.color as i64 + unit)));
                    total += &psi(s.color as i64 + unit);
                }
                assert_eq!(total.clone() * total, b.sub(&a).norm2(), "{class:?} {side:?}");
                // endpoints are collinear with the side
                for s in &segs {
                    assert!(s.start.sub(&a).cross(&b.sub(&a)).is_zero());
                    assert!(s.end.sub(&a).cross(&b.sub(&a)).is_zero());
                }
            }
        }
    }

    #[test]
    fn large_back_reads_six_four_four() {
        // read from the top of the back downwards
        let h = PlacedHexagon::canonical(SizeClass::Large);
        let mut back: Vec<_> = h.decorate().into_iter().filter(|s| s.side == ChairSide::Back).collect();
        back.sort_by(|a, b| {
            let ya = RingElem::max_value(&a.start.y, &a.end.y);
            let yb = RingElem::max_value(&b.start.y, &b.end.y);
            yb.cmp_value(&ya)
        });
        let read: Vec<(u8, bool)> = back.iter().map(|s| (s.color, s.end.y.cmp_value(&s.start.y) == Ordering::Less)).collect();
        assert_eq!(read, vec![(6, true), (4, true), (4, false)]);
    }

    #[test]
    fn small_refines_to_large() {
        // the small hexagon at unit 1 has the geometry of a large at unit ψ
        let small = PlacedHexagon::new(Placement::scaled(1), SizeClass::Small);
        let large = PlacedHexagon::new(Placement::scaled(1), SizeClass::Large);
        let refined = refine_decoration(&small.decorate()).unwrap();
        assert_eq!(sorted(refined), sorted(large.decorate()));
    }

    #[test]
    fn large_refines_to_children_plus_cut() {
        let h = PlacedHexagon::canonical(SizeClass::Large);
        let (d, s) = h.subdivide();
        let mut lhs = refine_decoration(&h.decorate()).unwrap();
        let cut = h.cut_decoration();
        lhs.extend(cut.iter().cloned());
        lhs.extend(cut.iter().cloned());
        let mut rhs = d.decorate();
        rhs.extend(s.decorate());
        assert_eq!(sorted(lhs), sorted(rhs));
    }

    #[test]
    fn refine_decoration_examples() {
        let z = RingElem::zero;
        let seg = |a: Point, b: Point, c| ColoredSegment { start: a, end: b, color: c, side: ChairSide::Back };
        let three = seg(p(z(), z()), p(psi(3), z()), 3);
        let out = refine_decoration(&[three]).unwrap();
        assert_eq!(out[0], seg(p(psi(5), z()), p(z(), z()), 4));
        assert_eq!(out[1], seg(p(psi(3), z()), p(psi(5), z()), 6));
        assert!(refine_decoration(&[seg(p(z(), z()), p(psi(2), z()), 2)]).is_err());
        // →6→4 twice becomes →4 ←4←6 (lengths ψ⁶, ψ⁶, ψ⁸ at the final unit)
        let six_four = vec![seg(p(z(), z()), p(psi(6), z()), 6), seg(p(psi(6), z()), p(psi(2), z()), 4)];
        let twice = refine_decoration(&refine_decoration(&six_four).unwrap()).unwrap();
        let colors: Vec<u8> = twice.iter().map(|s| s.color).collect();
        assert_eq!(colors, vec![4, 4, 6]);
        assert_eq!(twice[0].start, Point::origin());
        assert_eq!(twice[1].end, twice[0].end);
    }

    #[test]
    fn line_segments_have_two_slopes() {
        let h = PlacedHexagon::canonical(SizeClass::Large);
        for (a, b) in h.line_segments(LineStyle::Solid) {
            let d = b.sub(&a);
            let slope_ok = d.y == &d.x * &psi(3) || d.y == -(&d.x * &psi(3));
            assert!(slope_ok);
        }
        let s = PlacedHexagon::canonical(SizeClass::Small);
        for (a, b) in s.line_segments(LineStyle::Solid) {
            let d = b.sub(&a);
            assert!(d.x == &d.y * &psi(3) || d.x == -(&d.y * &psi(3)));
        }
    }
}
