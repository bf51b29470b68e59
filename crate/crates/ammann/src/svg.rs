//! SVG rendering. Coordinates are written with 12 decimals, `y` pointing up.

use std::fmt::Write as _;

use crate::geometry::{LineStyle, Point, Rect};
use crate::lines::tiling_segments;
use crate::ring::{FieldElem, RingElem};
use crate::subshift::build_grid_unchecked;
use crate::tiling::Tiling;

const DIGITS: usize = 12;

#[derive(Clone, Debug, Default)]
pub struct SvgOptions {
    pub decorations: bool,
    pub lines: bool,
    /// Draw the parallelogram grid of the Ammann lines inside this rectangle.
    pub grid: Option<Rect>,
}

fn x(v: &RingElem) -> String {
    v.approx(DIGITS)
}

fn y(v: &RingElem) -> String {
    (-v).approx(DIGITS)
}

fn deco_color(c: u8) -> &'static str {
    match c {
        3 => "#1b9e77",
        4 => "#d95f02",
        5 => "#7570b3",
        _ => "#e7298a",
    }
}

fn line(out: &mut String, a: &Point, b: &Point, attrs: &str) {
    writeln!(out, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" {attrs}/>"##, x(&a.x), y(&a.y), x(&b.x), y(&b.y)).unwrap();
}

pub fn render_svg(t: &Tiling, opts: &SvgOptions) -> String {
    let bb = t.bbox();
    let w = &bb.max.x - &bb.min.x;
    let h = &bb.max.y - &bb.min.y;
    let stroke = RingElem::psi_pow(t.unit_exp() + 6).approx(6);
    let mut out = String::new();
    writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"##,
        x(&bb.min.x),
        y(&bb.max.y),
        x(&w),
        x(&h)
    )
    .unwrap();
    writeln!(
        out,
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="4" markerHeight="4" orient="auto"><path d="M0,0 L10,5 L0,10 z"/></marker></defs>"##
    )
    .unwrap();
    writeln!(out, r##"<g fill="none" stroke="black" stroke-width="{stroke}">"##).unwrap();
    for hx in t.hexes() {
        let pts: Vec<String> = hx.vertices().iter().map(|q| format!("{},{}", x(&q.x), y(&q.y))).collect();
        let fill = if hx.class.letter() == 'L' { "#f6e8b1" } else { "#c9e3f6" };
        writeln!(out, r##"<polygon points="{}" fill="{fill}"/>"##, pts.join(" ")).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    if opts.decorations {
        writeln!(out, r##"<g stroke-width="{stroke}" marker-end="url(#arrow)">"##).unwrap();
        for hx in t.hexes() {
            for s in hx.decorate() {
                line(&mut out, &s.start, &s.end, &format!(r##"stroke="{}""##, deco_color(s.color)));
            }
        }
        writeln!(out, "</g>").unwrap();
    }
    if opts.lines {
        writeln!(out, r##"<g stroke="#c00000" stroke-width="{stroke}">"##).unwrap();
        for style in [LineStyle::Solid, LineStyle::Dotted] {
            let dash = if style == LineStyle::Dotted { format!(r##" stroke-dasharray="{stroke}""##) } else { String::new() };
            for s in tiling_segments(t, style) {
                line(&mut out, &s.start, &s.end, dash.trim_start());
            }
        }
        writeln!(out, "</g>").unwrap();
    }
    if let Some(rect) = &opts.grid {
        if let Ok(g) = build_grid_unchecked(t, rect) {
            let fx = |v: &FieldElem| v.approx(DIGITS);
            let fy = |v: &FieldElem| (-v).approx(DIGITS);
            writeln!(out, r##"<g fill="none" stroke="#0060c0" stroke-width="{stroke}">"##).unwrap();
            for (i, row) in g.cells.iter().enumerate() {
                for (j, c) in row.iter().enumerate() {
                    if c.is_none() {
                        continue;
                    }
                    let pts: Vec<String> = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
                        .iter()
                        .map(|&(a, b)| {
                            let (px, py) = g.corner(a, b);
                            format!("{},{}", fx(&px), fy(&py))
                        })
                        .collect();
                    writeln!(out, r##"<polygon points="{}"/>"##, pts.join(" ")).unwrap();
                }
            }
            writeln!(out, "</g>").unwrap();
        }
    }
    writeln!(out, "</svg>").unwrap();
    out
}
