//! The two families of Ammann lines cut a patch into parallelograms. Each
//! parallelogram, with the decorated hexagon boundaries it contains, is a
//! letter; the 3×3 windows of the resulting array are the allowed motifs.
//!
//! Points inside a cell are written in line coordinates `u = y − s·x` and
//! `v = y + s·x` (the offsets of the two families), relative to the cell's
//! lower lines and divided by the unit `d`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{LinesError, ParseError};
use crate::geometry::{LineStyle, PlacedHexagon, Placement, Point, Rect, SizeClass};
use crate::lines::{assemble_lines, assemble_segments, interior_margin, tiling_segments, LineFamily};
use crate::ring::{FieldElem, RingElem};
use crate::tiling::{periodic_patch, Tiling};

fn psi(k: i64) -> RingElem {
    RingElem::psi_pow(k)
}

/// A point in cell coordinates `(u, v)`.
pub type UV = (RingElem, RingElem);

/// A clipped decoration arrow with the classes of the hexagons on its
/// left and right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CellArrow {
    pub from: UV,
    pub to: UV,
    pub color: u8,
    pub left: Option<SizeClass>,
    pub right: Option<SizeClass>,
}

/// A hexagon meeting the cell: its shape and the position of its
/// placement origin.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HexPart {
    pub class: SizeClass,
    pub rot: u8,
    pub reflect: bool,
    /// Scale exponent relative to the unit.
    pub scale: i64,
    pub at: UV,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Cell {
    /// Spacing of the `u` lines bounding the cell.
    pub height: RingElem,
    /// Spacing of the `v` lines bounding the cell.
    pub width: RingElem,
    pub arrows: Vec<CellArrow>,
    pub parts: Vec<HexPart>,
}

/// Cells indexed by `[row][col]`: row `i` lies between the `u` lines `i`
/// and `i + 1`, column `j` between the `v` lines `j` and `j + 1`. Cells
/// leaving the interior rectangle are `None`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Grid {
    pub slope: RingElem,
    pub u_lines: Vec<RingElem>,
    pub v_lines: Vec<RingElem>,
    pub cells: Vec<Vec<Option<Cell>>>,
}

impl Grid {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn cols(&self) -> usize {
        self.cells.first().map_or(0, |r| r.len())
    }

    /// Point where `u` line `i` meets `v` line `j`.
    pub fn corner(&self, i: usize, j: usize) -> (FieldElem, FieldElem) {
        let a = &self.u_lines[i];
        let b = &self.v_lines[j];
        (half(&(b - a) * &slope_inverse(&self.slope)), half(a + b))
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_some()).count()
    }
}

/// Builds the grid of a proper patch inside `interior`.
pub fn build_grid(t: &Tiling, interior: &Rect) -> Result<Grid, LinesError> {
    let a = assemble_lines(t)?;
    if a.families.len() != 2 {
        return Err(LinesError::TooFewLines(a.families.len()));
    }
    Ok(grid_from_families(t, &a.families[0], &a.families[1], interior))
}

/// Like [`build_grid`] but without requiring a proper tiling; lines are
/// assembled from the raw segments.
pub fn build_grid_unchecked(t: &Tiling, interior: &Rect) -> Result<Grid, LinesError> {
    let a = assemble_segments(t, tiling_segments(t, LineStyle::Solid), &interior_margin(t));
    if a.families.len() != 2 {
        return Err(LinesError::TooFewLines(a.families.len()));
    }
    Ok(grid_from_families(t, &a.families[0], &a.families[1], interior))
}

/// The lattice tiling by Large hexagons with the largest square
/// `[−r, r]²` it covers, `r` a power of `ψ` times `radius`.
pub fn control_patch(radius: i64) -> (Tiling, Rect) {
    let t = periodic_patch(radius);
    let mut r = RingElem::from_int(radius);
    loop {
        let rect = Rect::from_corners(&Point::new(-&r, -&r), &Point::new(r.clone(), r.clone()));
        if t.covers_rect(&rect) {
            return (t, rect);
        }
        r = r.scale_pow(1);
    }
}

fn slope_inverse(s: &RingElem) -> RingElem {
    for k in [3, -3, 1, -1, 0] {
        if s == &psi(k) {
            return psi(-k);
        }
        if s == &-&psi(k) {
            return -&psi(-k);
        }
    }
    panic!("slope {s} is not ±ψᵏ")
}

fn ring_offsets(f: &LineFamily, interior: &Rect) -> Vec<RingElem> {
    f.crossing(interior)
        .lines
        .iter()
        .map(|l| l.offset.as_ring().expect("solid line offsets are ring elements").clone())
        .collect()
}

fn half(x: RingElem) -> FieldElem {
    FieldElem::new(x, RingElem::from_int(2)).expect("2 is nonzero")
}

struct Frame {
    s: RingElem,
    s_inv: RingElem,
    u: Vec<RingElem>,
    v: Vec<RingElem>,
    norm: i64,
}

impl Frame {
    fn uv(&self, q: &Point) -> UV {
        let sx = &self.s * &q.x;
        (&q.y - &sx, &q.y + &sx)
    }

    /// Corner where the lines `u = a` and `v = b` meet.
    fn corner(&self, a: &RingElem, b: &RingElem) -> (FieldElem, FieldElem) {
        (half(&(b - a) * &self.s_inv), half(a + b))
    }

    fn rel(&self, q: &UV, i: usize, j: usize) -> UV {
        ((&q.0 - &self.u[i]).scale_pow(self.norm), (&q.1 - &self.v[j]).scale_pow(self.norm))
    }

    /// Index ranges of rows and columns whose open strips meet `[lo, hi]`.
    fn span(lines: &[RingElem], lo: &RingElem, hi: &RingElem) -> std::ops::Range<usize> {
        let n = lines.len().saturating_sub(1);
        let first = (0..n).find(|&i| lines[i + 1].cmp_value(lo) == Ordering::Greater).unwrap_or(n);
        let last = (first..n).take_while(|&i| lines[i].cmp_value(hi) == Ordering::Less).last();
        match last {
            Some(l) => first..l + 1,
            None => first..first,
        }
    }
}

fn range_of(values: impl Iterator<Item = RingElem>) -> (RingElem, RingElem) {
    let v: Vec<RingElem> = values.collect();
    let lo = v.iter().cloned().reduce(|a, b| RingElem::min_value(&a, &b)).unwrap();
    let hi = v.iter().cloned().reduce(|a, b| RingElem::max_value(&a, &b)).unwrap();
    (lo, hi)
}

fn max_f(a: FieldElem, b: FieldElem) -> FieldElem {
    if a.cmp_value(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

fn min_f(a: FieldElem, b: FieldElem) -> FieldElem {
    if a.cmp_value(&b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn overlap(a: (FieldElem, FieldElem), b: (FieldElem, FieldElem)) -> bool {
    max_f(a.0, b.0).cmp_value(&min_f(a.1, b.1)) == Ordering::Less
}

fn field_range(v: &[FieldElem]) -> (FieldElem, FieldElem) {
    let lo = v.iter().cloned().reduce(min_f).unwrap();
    let hi = v.iter().cloned().reduce(max_f).unwrap();
    (lo, hi)
}

/// Grid of `t` cut by two families of slopes `s` and `−s`.
pub fn grid_from_families(t: &Tiling, fa: &LineFamily, fb: &LineFamily, interior: &Rect) -> Grid {
    let s = fa.slope.clone();
    assert_eq!(fb.slope, -&s, "families must have opposite slopes");
    // `v = y + s·x` is the offset of the second family up to sign
    let u = ring_offsets(fa, interior);
    let mut v: Vec<RingElem> = ring_offsets(fb, interior).into_iter().collect();
    v.sort_by(|a, b| a.cmp_value(b));
    let frame = Frame { s_inv: slope_inverse(&s), s, u, v, norm: -t.unit_exp() };
    let rows = frame.u.len().saturating_sub(1);
    let cols = frame.v.len().saturating_sub(1);

    let lo = (FieldElem::from_ring(interior.min.x.clone()), FieldElem::from_ring(interior.min.y.clone()));
    let hi = (FieldElem::from_ring(interior.max.x.clone()), FieldElem::from_ring(interior.max.y.clone()));
    let inside = |q: &(FieldElem, FieldElem)| {
        q.0.cmp_value(&lo.0) != Ordering::Less
            && q.0.cmp_value(&hi.0) != Ordering::Greater
            && q.1.cmp_value(&lo.1) != Ordering::Less
            && q.1.cmp_value(&hi.1) != Ordering::Greater
    };
    let corners = |i: usize, j: usize| {
        [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)].map(|(a, b)| frame.corner(&frame.u[a], &frame.v[b]))
    };
    let mut keep = vec![vec![false; cols]; rows];
    for (i, row) in keep.iter_mut().enumerate() {
        for (j, k) in row.iter_mut().enumerate() {
            *k = corners(i, j).iter().all(inside);
        }
    }

    type Arrows = BTreeMap<(UV, UV, u8), (Option<SizeClass>, Option<SizeClass>)>;
    let mut arrows: Vec<Vec<Arrows>> = vec![vec![BTreeMap::new(); cols]; rows];
    let mut parts: Vec<Vec<BTreeSet<HexPart>>> = vec![vec![BTreeSet::new(); cols]; rows];

    let per_hex: Vec<Vec<(usize, usize, Item)>> =
        t.hexes().par_iter().map(|h| hex_items(h, &frame, &keep, &corners)).collect();
    for items in per_hex {
        for (i, j, item) in items {
            match item {
                Item::Arrow(key, hex_left, class) => {
                    let e = arrows[i][j].entry(key).or_insert((None, None));
                    if hex_left {
                        e.0 = Some(class);
                    } else {
                        e.1 = Some(class);
                    }
                }
                Item::Part(p) => {
                    parts[i][j].insert(p);
                }
            }
        }
    }

    let mut cells = vec![vec![None; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            if !keep[i][j] {
                continue;
            }
            let cell_arrows = std::mem::take(&mut arrows[i][j])
                .into_iter()
                .map(|((from, to, color), (left, right))| CellArrow { from, to, color, left, right })
                .collect();
            cells[i][j] = Some(Cell {
                height: (&frame.u[i + 1] - &frame.u[i]).scale_pow(frame.norm),
                width: (&frame.v[j + 1] - &frame.v[j]).scale_pow(frame.norm),
                arrows: cell_arrows,
                parts: std::mem::take(&mut parts[i][j]).into_iter().collect(),
            });
        }
    }
    Grid { slope: frame.s.clone(), u_lines: frame.u, v_lines: frame.v, cells }
}

enum Item {
    Arrow((UV, UV, u8), bool, SizeClass),
    Part(HexPart),
}

fn hex_items(
    h: &PlacedHexagon,
    frame: &Frame,
    keep: &[Vec<bool>],
    corners: &dyn Fn(usize, usize) -> [(FieldElem, FieldElem); 4],
) -> Vec<(usize, usize, Item)> {
    let mut out = Vec::new();
    let verts = h.vertices();
    let (ulo, uhi) = range_of(verts.iter().map(|q| frame.uv(q).0));
    let (vlo, vhi) = range_of(verts.iter().map(|q| frame.uv(q).1));
    let rows = Frame::span(&frame.u, &ulo, &uhi);
    let cols = Frame::span(&frame.v, &vlo, &vhi);
    let origin = frame.uv(&h.place.shift);
    let rects = h.rects();
    for i in rows.clone() {
        for j in cols.clone() {
            if !keep[i][j] {
                continue;
            }
            let cs = corners(i, j);
            let cx = field_range(&cs.iter().map(|c| c.0.clone()).collect::<Vec<_>>());
            let cy = field_range(&cs.iter().map(|c| c.1.clone()).collect::<Vec<_>>());
            let cu = (FieldElem::from_ring(frame.u[i].clone()), FieldElem::from_ring(frame.u[i + 1].clone()));
            let cv = (FieldElem::from_ring(frame.v[j].clone()), FieldElem::from_ring(frame.v[j + 1].clone()));
            let meets = rects.iter().any(|r| {
                let pts = [
                    r.min.clone(),
                    r.max.clone(),
                    Point::new(r.min.x.clone(), r.max.y.clone()),
                    Point::new(r.max.x.clone(), r.min.y.clone()),
                ];
                let (ru0, ru1) = range_of(pts.iter().map(|q| frame.uv(q).0));
                let (rv0, rv1) = range_of(pts.iter().map(|q| frame.uv(q).1));
                overlap((r.min.x.clone().into(), r.max.x.clone().into()), cx.clone())
                    && overlap((r.min.y.clone().into(), r.max.y.clone().into()), cy.clone())
                    && overlap((ru0.into(), ru1.into()), cu.clone())
                    && overlap((rv0.into(), rv1.into()), cv.clone())
            });
            if meets {
                out.push((
                    i,
                    j,
                    Item::Part(HexPart {
                        class: h.class,
                        rot: h.place.rot,
                        reflect: h.place.reflect,
                        scale: h.place.scale_exp + frame.norm,
                        at: frame.rel(&origin, i, j),
                    }),
                ));
            }
        }
    }
    for seg in h.decorate() {
        let (a, b) = h.side(seg.side);
        let agrees = seg.end.sub(&seg.start).dot(&b.sub(&a)).is_positive();
        let hex_left = agrees != h.place.reflect;
        let horizontal = seg.start.y == seg.end.y;
        // parameter along the segment: x for horizontal, y for vertical
        let (p0, p1) = if horizontal { (&seg.start.x, &seg.end.x) } else { (&seg.start.y, &seg.end.y) };
        let forward = p0.cmp_value(p1) == Ordering::Less;
        let (plo, phi) = if forward { (p0.clone(), p1.clone()) } else { (p1.clone(), p0.clone()) };
        let (ua, va) = frame.uv(&seg.start);
        let (ub, vb) = frame.uv(&seg.end);
        let (ulo, uhi) = range_of([ua, ub].into_iter());
        let (vlo, vhi) = range_of([va, vb].into_iter());
        for i in Frame::span(&frame.u, &ulo, &uhi) {
            for j in Frame::span(&frame.v, &vlo, &vhi) {
                if !keep[i][j] {
                    continue;
                }
                let (lo, hi) = if horizontal {
                    let c = &seg.start.y;
                    // u = c − s·x and v = c + s·x are monotone in x
                    let x_of_u = |u: &RingElem| &(c - u) * &frame.s_inv;
                    let x_of_v = |v: &RingElem| &(v - c) * &frame.s_inv;
                    let (xu0, xu1) = range_of([x_of_u(&frame.u[i]), x_of_u(&frame.u[i + 1])].into_iter());
                    let (xv0, xv1) = range_of([x_of_v(&frame.v[j]), x_of_v(&frame.v[j + 1])].into_iter());
                    (
                        [plo.clone(), xu0, xv0].into_iter().reduce(|a, b| RingElem::max_value(&a, &b)).unwrap(),
                        [phi.clone(), xu1, xv1].into_iter().reduce(|a, b| RingElem::min_value(&a, &b)).unwrap(),
                    )
                } else {
                    let c = &seg.start.x;
                    let sc = &frame.s * c;
                    let (y0, y1) = (&frame.u[i] + &sc, &frame.u[i + 1] + &sc);
                    let (w0, w1) = (&frame.v[j] - &sc, &frame.v[j + 1] - &sc);
                    (
                        [plo.clone(), y0, w0].into_iter().reduce(|a, b| RingElem::max_value(&a, &b)).unwrap(),
                        [phi.clone(), y1, w1].into_iter().reduce(|a, b| RingElem::min_value(&a, &b)).unwrap(),
                    )
                };
                if lo.cmp_value(&hi) != Ordering::Less {
                    continue;
                }
                let at = |p: &RingElem| {
                    if horizontal {
                        Point::new(p.clone(), seg.start.y.clone())
                    } else {
                        Point::new(seg.start.x.clone(), p.clone())
                    }
                };
                let (from, to) = if forward { (at(&lo), at(&hi)) } else { (at(&hi), at(&lo)) };
                let key = (frame.rel(&frame.uv(&from), i, j), frame.rel(&frame.uv(&to), i, j), seg.color);
                out.push((i, j, Item::Arrow(key, hex_left, h.class)));
            }
        }
    }
    out
}

/// Distinct cells in canonical order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Alphabet {
    pub cells: Vec<Cell>,
}

impl Alphabet {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index_of(&self, c: &Cell) -> Option<usize> {
        self.cells.binary_search(c).ok()
    }
}

pub fn build_alphabet<'a>(grids: impl IntoIterator<Item = &'a Grid>) -> Alphabet {
    let set: BTreeSet<Cell> = grids.into_iter().flat_map(|g| g.cells.iter().flatten().flatten().cloned()).collect();
    Alphabet { cells: set.into_iter().collect() }
}

/// The grid with each cell replaced by its letter.
pub type IndexGrid = Vec<Vec<Option<usize>>>;

pub fn index_grid(g: &Grid, alphabet: &Alphabet) -> IndexGrid {
    g.cells
        .iter()
        .map(|row| row.iter().map(|c| c.as_ref().map(|c| alphabet.index_of(c).expect("cell is in the alphabet"))).collect())
        .collect()
}

/// An `n×n` window, row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Motif {
    pub n: usize,
    pub cells: Vec<usize>,
}

impl Motif {
    pub fn at(&self, r: usize, c: usize) -> usize {
        self.cells[r * self.n + c]
    }
}

/// All `n×n` windows lying wholly inside the grid.
pub fn motifs(g: &IndexGrid, n: usize) -> BTreeSet<Motif> {
    let rows = g.len();
    let cols = g.first().map_or(0, |r| r.len());
    let mut out = BTreeSet::new();
    if rows < n || cols < n {
        return out;
    }
    for r in 0..=rows - n {
        for c in 0..=cols - n {
            let cells: Option<Vec<usize>> = (0..n * n).map(|k| g[r + k / n][c + k % n]).collect();
            if let Some(cells) = cells {
                out.insert(Motif { n, cells });
            }
        }
    }
    out
}

/// Whether every 3×3 window of `b` is allowed. With `torus` the windows
/// wrap around both edges.
pub fn check_configuration(b: &[Vec<usize>], allowed: &BTreeSet<Motif>, torus: bool) -> bool {
    let rows = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return true;
    }
    let set: HashSet<[usize; 9]> = allowed.iter().filter(|m| m.n == 3).map(|m| motif_key(m)).collect();
    let (rmax, cmax) = if torus { (rows, cols) } else { (rows.saturating_sub(2), cols.saturating_sub(2)) };
    (0..rmax).all(|r| (0..cmax).all(|c| set.contains(&window(b, r, c))))
}

fn motif_key(m: &Motif) -> [usize; 9] {
    std::array::from_fn(|k| m.cells[k])
}

fn window(b: &[Vec<usize>], r: usize, c: usize) -> [usize; 9] {
    let (rows, cols) = (b.len(), b[0].len());
    std::array::from_fn(|k| b[(r + k / 3) % rows][(c + k % 3) % cols])
}

/// A torus assignment found by [`periodic_search`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Torus {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Vec<usize>>,
}

/// Backtracking over `m×n` tori (`m ≤ max_m`, `n ≤ max_n`) whose wrapped
/// 3×3 windows are all allowed. Returns the first torus in order of area.
pub fn periodic_search(allowed: &BTreeSet<Motif>, max_m: usize, max_n: usize) -> Option<Torus> {
    let windows: HashSet<[usize; 9]> = allowed.iter().filter(|m| m.n == 3).map(motif_key).collect();
    let mut horiz: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    let mut vert: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for w in &windows {
        for r in 0..3 {
            for c in 0..2 {
                horiz.entry(w[r * 3 + c]).or_default().insert(w[r * 3 + c + 1]);
            }
        }
        for r in 0..2 {
            for c in 0..3 {
                vert.entry(w[r * 3 + c]).or_default().insert(w[(r + 1) * 3 + c]);
            }
        }
    }
    let letters: Vec<usize> = horiz.keys().copied().collect();
    let mut sizes: Vec<(usize, usize)> = (1..=max_m).flat_map(|m| (1..=max_n).map(move |n| (m, n))).collect();
    sizes.sort_by_key(|&(m, n)| (m * n, m));
    let ctx = SearchCtx { windows: &windows, horiz: &horiz, vert: &vert };
    for (m, n) in sizes {
        let found = letters.par_iter().find_map_first(|&first| {
            let mut grid = vec![vec![usize::MAX; n]; m];
            grid[0][0] = first;
            ctx.extend(&mut grid, 1).then(|| grid)
        });
        if let Some(cells) = found {
            return Some(Torus { rows: m, cols: n, cells });
        }
    }
    None
}

struct SearchCtx<'a> {
    windows: &'a HashSet<[usize; 9]>,
    horiz: &'a BTreeMap<usize, BTreeSet<usize>>,
    vert: &'a BTreeMap<usize, BTreeSet<usize>>,
}

impl SearchCtx<'_> {
    fn pair_ok(&self, map: &BTreeMap<usize, BTreeSet<usize>>, a: usize, b: usize) -> bool {
        map.get(&a).is_some_and(|s| s.contains(&b))
    }

    /// Fills cells `k..` in row-major order.
    fn extend(&self, g: &mut Vec<Vec<usize>>, k: usize) -> bool {
        let (m, n) = (g.len(), g[0].len());
        let r0 = (k - 1) / n;
        let c0 = (k - 1) % n;
        if !self.local_ok(g, r0, c0, k - 1) {
            return false;
        }
        if k == m * n {
            return true;
        }
        let (r, c) = (k / n, k % n);
        let left = if c > 0 { Some(g[r][c - 1]) } else { None };
        let up = if r > 0 { Some(g[r - 1][c]) } else { None };
        let options: Vec<usize> = match (left, up) {
            (Some(l), _) => self.horiz.get(&l).map(|s| s.iter().copied().collect()).unwrap_or_default(),
            (None, Some(u)) => self.vert.get(&u).map(|s| s.iter().copied().collect()).unwrap_or_default(),
            (None, None) => unreachable!("cell 0 is fixed by the caller"),
        };
        for x in options {
            if up.is_some_and(|u| !self.pair_ok(self.vert, u, x)) {
                continue;
            }
            g[r][c] = x;
            if self.extend(g, k + 1) {
                return true;
            }
        }
        g[r][c] = usize::MAX;
        false
    }

    /// Checks wrap-around pairs and every complete window through `(r, c)`,
    /// the cell with row-major index `last`.
    fn local_ok(&self, g: &[Vec<usize>], r: usize, c: usize, last: usize) -> bool {
        let (m, n) = (g.len(), g[0].len());
        let x = g[r][c];
        if c == n - 1 && !self.pair_ok(self.horiz, x, g[r][0]) {
            return false;
        }
        if r == m - 1 && !self.pair_ok(self.vert, x, g[0][c]) {
            return false;
        }
        for dr in 0..3 {
            for dc in 0..3 {
                let wr = (r + 3 * m - dr) % m;
                let wc = (c + 3 * n - dc) % n;
                let cells: [(usize, usize); 9] = std::array::from_fn(|k| ((wr + k / 3) % m, (wc + k % 3) % n));
                if cells.iter().all(|&(a, b)| a * n + b <= last) {
                    let key = cells.map(|(a, b)| g[a][b]);
                    if !self.windows.contains(&key) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Puts the hexagons recorded in the cells of `b` back together. `None`
/// if the cells disagree about line spacings or hexagon positions.
pub fn reassemble(b: &[Vec<usize>], alphabet: &Alphabet, slope: &RingElem) -> Option<Tiling> {
    let rows = b.len();
    let cols = b.first()?.len();
    let cell = |r: usize, c: usize| &alphabet.cells[b[r][c]];
    let mut u = vec![RingElem::zero()];
    for r in 0..rows {
        if (0..cols).any(|c| cell(r, c).height != cell(r, 0).height) {
            return None;
        }
        u.push(&u[r] + &cell(r, 0).height);
    }
    let mut v = vec![RingElem::zero()];
    for c in 0..cols {
        if (0..rows).any(|r| cell(r, c).width != cell(0, c).width) {
            return None;
        }
        v.push(&v[c] + &cell(0, c).width);
    }
    let s_inv = slope_inverse(slope);
    let mut placed: BTreeSet<(SizeClass, u8, bool, i64, FieldElemKey)> = BTreeSet::new();
    for r in 0..rows {
        for c in 0..cols {
            for p in &cell(r, c).parts {
                let pu = &u[r] + &p.at.0;
                let pv = &v[c] + &p.at.1;
                let x = half(&(&pv - &pu) * &s_inv);
                let y = half(&pu + &pv);
                placed.insert((p.class, p.rot, p.reflect, p.scale, FieldElemKey(x, y)));
            }
        }
    }
    let first = placed.iter().next()?;
    let (ox, oy) = (first.4 .0.clone(), first.4 .1.clone());
    let mut hexes = Vec::with_capacity(placed.len());
    for (class, rot, reflect, scale, FieldElemKey(x, y)) in &placed {
        let dx = (x - &ox).as_ring()?.clone();
        let dy = (y - &oy).as_ring()?.clone();
        hexes.push(PlacedHexagon::new(Placement::new(*rot, *reflect, *scale, Point::new(dx, dy)), *class));
    }
    Tiling::new(0, hexes).ok()
}

/// A point with field coordinates, ordered by value.
#[derive(Clone, Debug)]
struct FieldElemKey(FieldElem, FieldElem);

impl PartialEq for FieldElemKey {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for FieldElemKey {}

impl PartialOrd for FieldElemKey {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for FieldElemKey {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.cmp_value(&o.0).then_with(|| self.1.cmp_value(&o.1))
    }
}

fn class_str(c: Option<SizeClass>) -> char {
    c.map_or('-', |c| c.letter())
}

fn parse_class(s: &str) -> Result<Option<SizeClass>, ParseError> {
    match s {
        "-" => Ok(None),
        "L" => Ok(Some(SizeClass::Large)),
        "S" => Ok(Some(SizeClass::Small)),
        _ => Err(ParseError::new(format!("bad size class {s:?}"))),
    }
}

/// Text form: a header, one block per letter, then one line per motif.
pub fn export_sft(alphabet: &Alphabet, allowed: &BTreeSet<Motif>, sink: &mut impl Write) -> io::Result<()> {
    sink.write_all(sft_string(alphabet, allowed).as_bytes())
}

pub fn sft_string(alphabet: &Alphabet, allowed: &BTreeSet<Motif>) -> String {
    let n = allowed.iter().next().map_or(3, |m| m.n);
    let mut out = String::new();
    writeln!(out, "SFT1 letters={} window={} motifs={}", alphabet.len(), n, allowed.len()).unwrap();
    for (i, c) in alphabet.cells.iter().enumerate() {
        writeln!(out, "cell {i} {} {} {} {}", c.height, c.width, c.arrows.len(), c.parts.len()).unwrap();
        for a in &c.arrows {
            writeln!(
                out,
                "a {} {} {} {} {} {} {}",
                a.from.0,
                a.from.1,
                a.to.0,
                a.to.1,
                a.color,
                class_str(a.left),
                class_str(a.right)
            )
            .unwrap();
        }
        for p in &c.parts {
            writeln!(out, "h {} {} {} {} {} {}", p.class.letter(), p.rot, p.reflect as u8, p.scale, p.at.0, p.at.1).unwrap();
        }
    }
    for m in allowed {
        let cells: Vec<String> = m.cells.iter().map(|c| c.to_string()).collect();
        writeln!(out, "m {}", cells.join(" ")).unwrap();
    }
    out
}

fn field<T: std::str::FromStr>(parts: &[&str], i: usize, line: usize) -> Result<T, ParseError> {
    parts
        .get(i)
        .ok_or_else(|| ParseError::new("missing field").at_line(line))?
        .parse()
        .map_err(|_| ParseError::new(format!("bad field {:?}", parts[i])).at_line(line))
}

fn ring(parts: &[&str], i: usize, line: usize) -> Result<RingElem, ParseError> {
    parts
        .get(i)
        .ok_or_else(|| ParseError::new("missing field").at_line(line))?
        .parse::<RingElem>()
        .map_err(|e| e.at_line(line))
}

pub fn import_sft(text: &str) -> Result<(Alphabet, BTreeSet<Motif>), ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| ParseError::new("empty SFT file"))?;
    let mut window = 3;
    if !header.starts_with("SFT1") {
        return Err(ParseError::new("missing SFT1 header").at_line(1));
    }
    for kv in header.split_whitespace().skip(1) {
        if let Some(w) = kv.strip_prefix("window=") {
            window = w.parse().map_err(|_| ParseError::new("bad window size").at_line(1))?;
        }
    }
    let mut cells: Vec<Cell> = Vec::new();
    let mut allowed = BTreeSet::new();
    for (no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.first().copied() {
            Some("cell") => cells.push(Cell {
                height: ring(&parts, 2, no)?,
                width: ring(&parts, 3, no)?,
                arrows: Vec::new(),
                parts: Vec::new(),
            }),
            Some("a") => {
                let c = cells.last_mut().ok_or_else(|| ParseError::new("arrow before cell").at_line(no))?;
                c.arrows.push(CellArrow {
                    from: (ring(&parts, 1, no)?, ring(&parts, 2, no)?),
                    to: (ring(&parts, 3, no)?, ring(&parts, 4, no)?),
                    color: field(&parts, 5, no)?,
                    left: parse_class(parts.get(6).copied().unwrap_or(""))?,
                    right: parse_class(parts.get(7).copied().unwrap_or(""))?,
                });
            }
            Some("h") => {
                let c = cells.last_mut().ok_or_else(|| ParseError::new("part before cell").at_line(no))?;
                let class = parse_class(parts.get(1).copied().unwrap_or(""))?
                    .ok_or_else(|| ParseError::new("part needs a class").at_line(no))?;
                c.parts.push(HexPart {
                    class,
                    rot: field(&parts, 2, no)?,
                    reflect: field::<u8>(&parts, 3, no)? == 1,
                    scale: field(&parts, 4, no)?,
                    at: (ring(&parts, 5, no)?, ring(&parts, 6, no)?),
                });
            }
            Some("m") => {
                let idx: Vec<usize> = (1..parts.len()).map(|i| field(&parts, i, no)).collect::<Result<_, _>>()?;
                if idx.len() != window * window || idx.iter().any(|&i| i >= cells.len()) {
                    return Err(ParseError::new("motif has the wrong size or an unknown letter").at_line(no));
                }
                allowed.insert(Motif { n: window, cells: idx });
            }
            None => {}
            Some(other) => return Err(ParseError::new(format!("unknown record {other:?}")).at_line(no)),
        }
    }
    Ok((Alphabet { cells }, allowed))
}
