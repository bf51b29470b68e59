//! Ammann lines: the straight segments drawn inside each hexagon join up
//! into two families of parallel lines.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::LinesError;
use crate::geometry::{LineStyle, PlacedHexagon, Point, Rect};
use crate::ring::{FieldElem, RingElem};
use crate::tiling::{check_proper, Tiling};

fn psi(k: i64) -> RingElem {
    RingElem::psi_pow(k)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LineSegment {
    pub start: Point,
    pub end: Point,
    pub style: LineStyle,
    /// Index of the hexagon in its tiling.
    pub host: usize,
}

pub fn segments_in_hexagon(h: &PlacedHexagon, style: LineStyle, host: usize) -> Vec<LineSegment> {
    h.line_segments(style)
        .into_iter()
        .map(|(start, end)| LineSegment { start, end, style, host })
        .collect()
}

/// Every segment of `style` in the tiling.
pub fn tiling_segments(t: &Tiling, style: LineStyle) -> Vec<LineSegment> {
    t.hexes().iter().enumerate().flat_map(|(i, h)| segments_in_hexagon(h, style, i)).collect()
}

/// The four slopes a segment can have: `±ψ³` and `±ψ⁻³`.
fn slopes() -> [RingElem; 4] {
    [psi(3), -&psi(3), psi(-3), -&psi(-3)]
}

fn slope_of(a: &Point, b: &Point) -> RingElem {
    let dx = &b.x - &a.x;
    let dy = &b.y - &a.y;
    slopes()
        .into_iter()
        .find(|s| dy == s * &dx)
        .expect("Ammann segments have slope ±ψ³ or ±ψ⁻³")
}

/// A maximal run of overlapping or touching segments on one line, as an
/// interval of the coordinate `x + s·y`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chain {
    pub lo: RingElem,
    pub hi: RingElem,
    pub lo_point: Point,
    pub hi_point: Point,
    pub segments: Vec<usize>,
}

/// One line `y − s·x = offset`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AmmannLine {
    pub offset: FieldElem,
    pub chains: Vec<Chain>,
}

/// Parallel lines of slope `slope`, ordered by increasing offset
/// `y − slope·x`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LineFamily {
    pub slope: RingElem,
    pub lines: Vec<AmmannLine>,
}

impl LineFamily {
    pub fn offsets(&self) -> Vec<FieldElem> {
        self.lines.iter().map(|l| l.offset.clone()).collect()
    }

    /// Lines whose offsets lie strictly between those of the corners of `r`,
    /// i.e. the lines crossing the interior of `r`.
    pub fn crossing(&self, r: &Rect) -> LineFamily {
        let (lo, hi) = offset_range(&self.slope, r);
        let lines = self
            .lines
            .iter()
            .filter(|l| l.offset.cmp_value(&lo) == Ordering::Greater && l.offset.cmp_value(&hi) == Ordering::Less)
            .cloned()
            .collect();
        LineFamily { slope: self.slope.clone(), lines }
    }

    /// The same family listed with decreasing offsets (offsets negated).
    pub fn reversed(&self) -> LineFamily {
        let lines = self
            .lines
            .iter()
            .rev()
            .map(|l| AmmannLine { offset: -&l.offset, chains: l.chains.clone() })
            .collect();
        LineFamily { slope: self.slope.clone(), lines }
    }
}

fn offset_range(slope: &RingElem, r: &Rect) -> (FieldElem, FieldElem) {
    let corners = [
        r.min.clone(),
        r.max.clone(),
        Point::new(r.min.x.clone(), r.max.y.clone()),
        Point::new(r.max.x.clone(), r.min.y.clone()),
    ];
    let offs: Vec<RingElem> = corners.iter().map(|c| &c.y - &(slope * &c.x)).collect();
    let lo = offs.iter().cloned().reduce(|a, b| RingElem::min_value(&a, &b)).unwrap();
    let hi = offs.iter().cloned().reduce(|a, b| RingElem::max_value(&a, &b)).unwrap();
    (lo.into(), hi.into())
}

/// A chain end strictly inside the patch.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Defect {
    pub point: Point,
    pub slope: RingElem,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Assembly {
    pub segments: Vec<LineSegment>,
    /// Families sorted by slope.
    pub families: Vec<LineFamily>,
    pub defects: Vec<Defect>,
}

/// One Large diameter, `ψ⁻¹·d`.
pub fn interior_margin(t: &Tiling) -> RingElem {
    psi(t.unit_exp() - 1)
}

/// Whether the square of half-width `margin` around `q` is covered.
pub fn is_interior(t: &Tiling, q: &Point, margin: &RingElem) -> bool {
    let d = Point::new(margin.clone(), margin.clone());
    t.covers_rect(&Rect::from_corners(&q.sub(&d), &q.add(&d)))
}

/// Groups the solid segments of a proper patch into lines and chains.
/// Chain ends at least one Large diameter inside the patch are defects.
pub fn assemble_lines(t: &Tiling) -> Result<Assembly, LinesError> {
    let report = check_proper(t);
    if !report.passed() {
        return Err(LinesError::NotProper(report.violations.len()));
    }
    Ok(assemble_segments(t, tiling_segments(t, LineStyle::Solid), &interior_margin(t)))
}

/// Assembly of arbitrary segments of `t` with an explicit interior margin.
pub fn assemble_segments(t: &Tiling, segments: Vec<LineSegment>, margin: &RingElem) -> Assembly {
    type Piece = (RingElem, RingElem, Point, Point, usize);
    let mut groups: BTreeMap<RingElem, BTreeMap<RingElem, Vec<Piece>>> = BTreeMap::new();
    for (i, s) in segments.iter().enumerate() {
        let slope = slope_of(&s.start, &s.end);
        let offset = &s.start.y - &(&slope * &s.start.x);
        let ta = &s.start.x + &(&slope * &s.start.y);
        let tb = &s.end.x + &(&slope * &s.end.y);
        let piece = if ta.cmp_value(&tb) == Ordering::Less {
            (ta, tb, s.start.clone(), s.end.clone(), i)
        } else {
            (tb, ta, s.end.clone(), s.start.clone(), i)
        };
        groups.entry(slope).or_default().entry(offset).or_default().push(piece);
    }
    let mut families = Vec::new();
    let mut ends = Vec::new();
    for (slope, by_offset) in groups {
        let mut lines = Vec::new();
        for (offset, mut pieces) in by_offset {
            pieces.sort_by(|a, b| a.0.cmp_value(&b.0).then_with(|| a.1.cmp_value(&b.1)));
            let mut chains: Vec<Chain> = Vec::new();
            for (lo, hi, lo_point, hi_point, i) in pieces {
                match chains.last_mut() {
                    Some(c) if lo.cmp_value(&c.hi) != Ordering::Greater => {
                        if hi.cmp_value(&c.hi) == Ordering::Greater {
                            c.hi = hi;
                            c.hi_point = hi_point;
                        }
                        c.segments.push(i);
                    }
                    _ => chains.push(Chain { lo, hi, lo_point, hi_point, segments: vec![i] }),
                }
            }
            for c in &chains {
                ends.push((slope.clone(), c.lo_point.clone()));
                ends.push((slope.clone(), c.hi_point.clone()));
            }
            lines.push((offset, chains));
        }
        lines.sort_by(|a, b| a.0.cmp_value(&b.0));
        let lines = lines
            .into_iter()
            .map(|(offset, chains)| AmmannLine { offset: offset.into(), chains })
            .collect();
        families.push(LineFamily { slope, lines });
    }
    let defects = ends
        .par_iter()
        .filter(|(_, q)| is_interior(t, q, margin))
        .map(|(slope, q)| Defect { point: q.clone(), slope: slope.clone() })
        .collect();
    Assembly { segments, families, defects }
}

/// Consecutive offset differences.
pub fn interval_sequence(f: &LineFamily) -> Result<Vec<FieldElem>, LinesError> {
    if f.lines.len() < 3 {
        return Err(LinesError::TooFewLines(f.lines.len()));
    }
    Ok(f.lines.windows(2).map(|w| &w[1].offset - &w[0].offset).collect())
}

/// Interval word over long (`L`) and short (`S`) intervals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntervalWord {
    pub long: FieldElem,
    pub short: FieldElem,
    pub word: String,
}

/// Classifies the intervals as long and short; `None` unless exactly two
/// lengths occur.
pub fn interval_word(intervals: &[FieldElem]) -> Option<IntervalWord> {
    let mut values: Vec<FieldElem> = Vec::new();
    for v in intervals {
        if !values.iter().any(|u| u.same_value(v)) {
            values.push(v.clone());
        }
    }
    if values.len() != 2 {
        return None;
    }
    values.sort_by(|a, b| a.cmp_value(b));
    let (short, long) = (values[0].clone(), values[1].clone());
    let word = intervals.iter().map(|v| if v.same_value(&long) { 'L' } else { 'S' }).collect();
    Some(IntervalWord { long, short, word })
}

/// Which neighbour interval decides whether a line is erased.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Side {
    /// The interval towards smaller offsets.
    Lower,
    /// The interval towards larger offsets.
    Higher,
}

/// Erases every line with a short interval on `side` and moves the rest
/// by half a long interval towards `side`. The first and last lines, whose
/// neighbour on one side is unknown, are dropped.
pub fn deflate_family(f: &LineFamily, side: Side) -> Result<LineFamily, LinesError> {
    let intervals = interval_sequence(f)?;
    let w = interval_word(&intervals).ok_or(LinesError::TooFewLines(f.lines.len()))?;
    let half = w.long.halve();
    let n = f.lines.len();
    let mut lines = Vec::new();
    for j in 1..n - 1 {
        let (neighbour, shift) = match side {
            Side::Lower => (&intervals[j - 1], -&half),
            Side::Higher => (&intervals[j], half.clone()),
        };
        if neighbour.same_value(&w.short) {
            continue;
        }
        lines.push(AmmannLine { offset: &f.lines[j].offset + &shift, chains: Vec::new() });
    }
    if lines.len() < 2 {
        return Err(LinesError::TooFewLines(lines.len()));
    }
    Ok(LineFamily { slope: f.slope.clone(), lines })
}
