//! ATF, the plain-text tiling format.
//!
//! ```text
//! ATF1 unit_exp=0
//! L 0 0 0 0+0*p+0*p^2+0*p^3 0+0*p+0*p^2+0*p^3
//! ```
//!
//! Each hexagon line holds the size class, rotation, reflection flag,
//! scale exponent and the two shift coordinates.

use std::fmt::Write as _;

use crate::error::ParseError;
use crate::geometry::{PlacedHexagon, Placement, Point, SizeClass};
use crate::ring::RingElem;
use crate::tiling::Tiling;

pub fn emit_atf(t: &Tiling) -> String {
    let mut out = String::new();
    writeln!(out, "ATF1 unit_exp={}", t.unit_exp()).unwrap();
    for h in t.hexes() {
        let p = &h.place;
        writeln!(out, "{} {} {} {} {} {}", h.class.letter(), p.rot, p.reflect as u8, p.scale_exp, p.shift.x, p.shift.y)
            .unwrap();
    }
    out
}

pub fn parse_atf(text: &str) -> Result<Tiling, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (_, header) = lines.next().ok_or_else(|| ParseError::new("empty ATF input"))?;
    let unit_exp = header
        .strip_prefix("ATF1 unit_exp=")
        .and_then(|k| k.trim().parse::<i64>().ok())
        .ok_or_else(|| ParseError::new("expected header `ATF1 unit_exp=<k>`").at_line(1))?;
    let mut hexes = Vec::new();
    for (no, line) in lines {
        hexes.push(parse_hexagon(line).map_err(|e| e.at_line(no))?);
    }
    Tiling::new(unit_exp, hexes).map_err(|e| ParseError::new(e.to_string()))
}

fn parse_hexagon(line: &str) -> Result<PlacedHexagon, ParseError> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 6 {
        return Err(ParseError::new(format!("expected 6 fields, found {}", f.len())));
    }
    let class = match f[0] {
        "L" => SizeClass::Large,
        "S" => SizeClass::Small,
        other => return Err(ParseError::new(format!("unknown size class {other:?}"))),
    };
    let rot: u8 = f[1].parse().ok().filter(|r| *r < 4).ok_or_else(|| ParseError::new("rotation must be 0..3"))?;
    let reflect = match f[2] {
        "0" => false,
        "1" => true,
        _ => return Err(ParseError::new("reflect must be 0 or 1")),
    };
    let scale_exp: i64 = f[3].parse().map_err(|_| ParseError::new("bad scale exponent"))?;
    let x: RingElem = f[4].parse()?;
    let y: RingElem = f[5].parse()?;
    Ok(PlacedHexagon::new(Placement::new(rot, reflect, scale_exp, Point::new(x, y)), class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::standard_tiling;

    #[test]
    fn round_trip() {
        for level in [-1, 0, 3, 8] {
            let t = standard_tiling(level, &Placement::new(1, true, 2, Point::new(RingElem::psi(), -RingElem::one())))
                .unwrap();
            let text = emit_atf(&t);
            let back = parse_atf(&text).unwrap();
            assert_eq!(back, t);
            assert_eq!(emit_atf(&back), text);
        }
    }

    #[test]
    fn singleton_text() {
        let t = standard_tiling(0, &Placement::identity()).unwrap();
        assert_eq!(emit_atf(&t), "ATF1 unit_exp=0\nL 0 0 0 0+0*p+0*p^2+0*p^3 0+0*p+0*p^2+0*p^3\n");
    }

    #[test]
    fn errors() {
        assert!(parse_atf("").is_err());
        assert!(parse_atf("ATF2 unit_exp=0\n").is_err());
        let e = parse_atf("ATF1 unit_exp=0\nL 5 0 0 0 0\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(parse_atf("ATF1 unit_exp=0\nS 0 0 0 0 0\n").is_err());
        assert!(parse_atf("ATF1 unit_exp=0\n").is_err());
    }
}
