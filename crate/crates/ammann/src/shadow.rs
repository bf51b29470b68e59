//! Shadows: the coloured arrows that a half-plane tiling leaves on its edge.
//!
//! Every shadow is kept in a normalised frame where the edge is the x-axis,
//! the tiling lies above it and the shadow is read towards `+x` (the
//! counter-clockwise direction of the tiling's boundary). `frame` maps that
//! frame back to the world.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{ParseError, ShadowError};
use crate::geometry::{ChairSide, Linear, PlacedHexagon, Placement, Point, SizeClass};
use crate::ring::RingElem;
use crate::tiling::{AxisLine, Tiling};

fn psi(k: i64) -> RingElem {
    RingElem::psi_pow(k)
}

/// One arrow on the edge, starting at `pos`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ShadowSegment {
    pub pos: RingElem,
    pub color: u8,
    pub forward: bool,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ShadowSeq {
    pub unit_exp: i64,
    pub frame: Placement,
    pub segments: Vec<ShadowSegment>,
}

/// Colour and direction without a position.
pub type Token = (u8, bool);

fn token_str(t: Token) -> String {
    format!("{}{}", if t.1 { '>' } else { '<' }, t.0)
}

fn parse_token(s: &str) -> Result<Token, ParseError> {
    let mut chars = s.chars();
    let forward = match chars.next() {
        Some('>') => true,
        Some('<') => false,
        _ => return Err(ParseError::new(format!("token {s:?} must start with > or <"))),
    };
    let n: u8 = chars.as_str().parse().map_err(|_| ParseError::new(format!("bad colour in token {s:?}")))?;
    Ok((n, forward))
}

fn mirror_tokens(t: &[Token]) -> Vec<Token> {
    t.iter().rev().map(|&(c, f)| (c, !f)).collect()
}

impl ShadowSeq {
    /// Lays out `tokens` end to end from `start`.
    pub fn from_tokens(tokens: &[Token], unit_exp: i64, frame: Placement, start: RingElem) -> Result<ShadowSeq, ShadowError> {
        let mut pos = start;
        let mut segments = Vec::with_capacity(tokens.len());
        for &(color, forward) in tokens {
            if !(3..=6).contains(&color) {
                return Err(ShadowError::NonStandardColor(color));
            }
            let next = &pos + &psi(color as i64 + unit_exp);
            segments.push(ShadowSegment { pos, color, forward });
            pos = next;
        }
        Ok(ShadowSeq { unit_exp, frame, segments })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn tokens(&self) -> Vec<Token> {
        self.segments.iter().map(|s| (s.color, s.forward)).collect()
    }

    pub fn colors(&self) -> Vec<u8> {
        self.segments.iter().map(|s| s.color).collect()
    }

    pub fn seg_len(&self, color: u8) -> RingElem {
        psi(color as i64 + self.unit_exp)
    }

    pub fn start(&self) -> RingElem {
        self.segments.first().map(|s| s.pos.clone()).unwrap_or_else(RingElem::zero)
    }

    pub fn end(&self) -> RingElem {
        self.segments
            .last()
            .map(|s| &s.pos + &self.seg_len(s.color))
            .unwrap_or_else(RingElem::zero)
    }

    /// The same edge read in the opposite direction.
    pub fn reversed(&self) -> ShadowSeq {
        let flip = Placement::new(2, true, 0, Point::origin());
        let tokens = mirror_tokens(&self.tokens());
        ShadowSeq::from_tokens(&tokens, self.unit_exp, self.frame.compose(&flip), -&self.end())
            .expect("colours were already valid")
    }
}

impl fmt::Display for ShadowSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.tokens().into_iter().map(token_str).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for ShadowSeq {
    type Err = ParseError;

    /// Whitespace-separated tokens such as `>6 >4 <4`, laid out from 0 at
    /// unit exponent 0.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let tokens = s.split_whitespace().map(parse_token).collect::<Result<Vec<_>, _>>()?;
        ShadowSeq::from_tokens(&tokens, 0, Placement::identity(), RingElem::zero())
            .map_err(|e| ParseError::new(e.to_string()))
    }
}

/// The map from the normalised frame of `line` to the world, with the
/// tiling above the x-axis when `positive` says it lies on the side of
/// increasing coordinate.
pub fn edge_frame(line: &AxisLine, positive: bool) -> Placement {
    let (rot, shift) = match (line.vertical, positive) {
        (false, true) => (0, Point::new(RingElem::zero(), line.coord.clone())),
        (false, false) => (2, Point::new(RingElem::zero(), line.coord.clone())),
        (true, true) => (3, Point::new(line.coord.clone(), RingElem::zero())),
        (true, false) => (1, Point::new(line.coord.clone(), RingElem::zero())),
    };
    Placement::new(rot, false, 0, shift)
}

/// Shadow of `t` on `line`. Every hexagon must lie on one side of the line.
pub fn extract_shadow(t: &Tiling, line: &AxisLine) -> Result<ShadowSeq, ShadowError> {
    let mut side: Option<bool> = None;
    for h in t.hexes() {
        let signs: Vec<Ordering> =
            h.vertices().iter().map(|v| line.across(v).cmp_value(&line.coord)).collect();
        let above = signs.contains(&Ordering::Greater);
        let below = signs.contains(&Ordering::Less);
        if above && below {
            return Err(ShadowError::EdgeCrossed);
        }
        if above || below {
            if side.is_some_and(|s| s != above) {
                return Err(ShadowError::EdgeCrossed);
            }
            side = Some(above);
        }
    }
    let frame = edge_frame(line, side.unwrap_or(true));
    let to_norm = frame.invert();
    let mut segments = Vec::new();
    for h in t.hexes() {
        let hn = h.transformed(&to_norm);
        for s in hn.decorate() {
            if s.start.y.is_zero() && s.end.y.is_zero() {
                let forward = s.start.x.cmp_value(&s.end.x) == Ordering::Less;
                let pos = if forward { s.start.x } else { s.end.x };
                segments.push(ShadowSegment { pos, color: s.color, forward });
            }
        }
    }
    if segments.is_empty() {
        return Err(ShadowError::EmptyShadow);
    }
    segments.sort_by(|a, b| a.pos.cmp_value(&b.pos));
    let out = ShadowSeq { unit_exp: t.unit_exp(), frame, segments };
    for i in 1..out.segments.len() {
        let prev = &out.segments[i - 1];
        if &prev.pos + &out.seg_len(prev.color) != out.segments[i].pos {
            return Err(ShadowError::NotContiguous(i));
        }
    }
    Ok(out)
}

/// Which hexagon sides a block of the shadow comes from.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Witness {
    LargeBack,
    SmallBottom,
    LargeBottom,
    /// A small hexagon's back next to its brother's top.
    SisterBrother,
}

/// A block starting at segment `start`. `reversed` blocks are read
/// clockwise along their hexagon, i.e. the hexagon is mirrored relative to
/// the frame.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Block {
    pub witness: Witness,
    pub reversed: bool,
    pub start: usize,
}

impl Block {
    pub fn len(&self) -> usize {
        block_pattern(self.witness, self.reversed).len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tokens(&self) -> Vec<Token> {
        block_pattern(self.witness, self.reversed)
    }
}

const F: bool = true;
const B: bool = false;

fn block_pattern(w: Witness, reversed: bool) -> Vec<Token> {
    let ccw: Vec<Token> = match w {
        Witness::LargeBack => vec![(6, F), (4, F), (4, B)],
        Witness::SmallBottom => vec![(4, B), (6, B)],
        Witness::LargeBottom => vec![(3, B), (5, B)],
        Witness::SisterBrother => vec![(3, F), (3, B), (5, B)],
    };
    if reversed {
        mirror_tokens(&ccw)
    } else {
        ccw
    }
}

const WITNESSES: [Witness; 4] = [Witness::LargeBack, Witness::SisterBrother, Witness::SmallBottom, Witness::LargeBottom];

fn blocks_at(tokens: &[Token], i: usize) -> impl Iterator<Item = Block> + '_ {
    WITNESSES.iter().flat_map(move |&w| {
        [false, true].into_iter().filter_map(move |rev| {
            let pat = block_pattern(w, rev);
            let end = i + pat.len();
            (end <= tokens.len() && tokens[i..end] == pat[..]).then_some(Block { witness: w, reversed: rev, start: i })
        })
    })
}

/// Number of block partitions of `tokens[i..]`, saturating at 2.
fn partition_counts(tokens: &[Token]) -> Vec<u8> {
    let n = tokens.len();
    let mut count = vec![0u8; n + 1];
    count[n] = 1;
    for i in (0..n).rev() {
        let c: u32 = blocks_at(tokens, i).map(|b| count[i + b.len()] as u32).sum();
        count[i] = c.min(2) as u8;
    }
    count
}

/// Number of block partitions of the shadow, capped at 2.
pub fn count_partitions(s: &ShadowSeq) -> u8 {
    partition_counts(&s.tokens())[0]
}

/// Splits the shadow into the eight blocks `→6→4←4`, `→4←4←6`, `→6→4`,
/// `←4←6`, `→5→3`, `←3←5`, `→5→3←3`, `→3←3←5`.
pub fn parse_blocks(s: &ShadowSeq) -> Result<Vec<Block>, ShadowError> {
    let tokens = s.tokens();
    if tokens.is_empty() {
        return Err(ShadowError::EmptyShadow);
    }
    let count = partition_counts(&tokens);
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let b = blocks_at(&tokens, i)
            .find(|b| count[i + b.len()] > 0)
            .ok_or(ShadowError::UnparsableShadow(i))?;
        i += b.len();
        out.push(b);
    }
    Ok(out)
}

/// `(class, side, first token, token count)` of the hexagons behind a block.
fn block_parts(b: &Block) -> Vec<(SizeClass, ChairSide, usize, usize)> {
    match (b.witness, b.reversed) {
        (Witness::LargeBack, _) => vec![(SizeClass::Large, ChairSide::Back, 0, 3)],
        (Witness::SmallBottom, _) => vec![(SizeClass::Small, ChairSide::Bottom, 0, 2)],
        (Witness::LargeBottom, _) => vec![(SizeClass::Large, ChairSide::Bottom, 0, 2)],
        (Witness::SisterBrother, false) => {
            vec![(SizeClass::Large, ChairSide::Top, 0, 1), (SizeClass::Small, ChairSide::Back, 1, 2)]
        }
        (Witness::SisterBrother, true) => {
            vec![(SizeClass::Small, ChairSide::Back, 0, 2), (SizeClass::Large, ChairSide::Top, 2, 1)]
        }
    }
}

/// The hexagon above the x-axis whose `side` starts at `(x, 0)` and shows
/// `tokens` there.
fn locate(class: SizeClass, side: ChairSide, scale_exp: i64, x: &RingElem, tokens: &[Token]) -> Option<PlacedHexagon> {
    Linear::all().find_map(|lin| {
        let h = PlacedHexagon::new(Placement::new(lin.rot, lin.reflect, scale_exp, Point::origin()), class);
        let (a, b) = h.side(side);
        if a.y != b.y {
            return None;
        }
        let lo = if a.x.cmp_value(&b.x) == Ordering::Less { a.x } else { b.x };
        let h = h.translated(&Point::new(x - &lo, -&a.y));
        if h.vertices().iter().any(|v| v.y.is_negative()) {
            return None;
        }
        let mut seen: Vec<(RingElem, Token)> = h
            .decorate()
            .into_iter()
            .filter(|s| s.side == side && s.start.y.is_zero() && s.end.y.is_zero())
            .map(|s| {
                let fwd = s.start.x.cmp_value(&s.end.x) == Ordering::Less;
                (if fwd { s.start.x } else { s.end.x }, (s.color, fwd))
            })
            .collect();
        seen.sort_by(|p, q| p.0.cmp_value(&q.0));
        let seen: Vec<Token> = seen.into_iter().map(|p| p.1).collect();
        (seen == tokens).then_some(h)
    })
}

/// Hexagons touching the edge, in the normalised frame.
fn edge_hexagons(s: &ShadowSeq) -> Result<Vec<PlacedHexagon>, ShadowError> {
    let blocks = parse_blocks(s)?;
    let tokens = s.tokens();
    let mut out = Vec::new();
    for b in &blocks {
        for (class, side, off, n) in block_parts(b) {
            let i = b.start + off;
            let scale = match class {
                SizeClass::Large => s.unit_exp,
                SizeClass::Small => s.unit_exp + 1,
            };
            let h = locate(class, side, scale, &s.segments[i].pos, &tokens[i..i + n])
                .ok_or(ShadowError::UnparsableShadow(i))?;
            out.push(h);
        }
    }
    Ok(out)
}

/// Inverse of the colour substitution: `←4←6 ↦ →3`, `→6→4 ↦ ←3`, and
/// `c ↦ c + 1` otherwise. The unit grows by one step.
pub fn coarsen_shadow(s: &ShadowSeq) -> Result<ShadowSeq, ShadowError> {
    let t = s.tokens();
    let mut segments = Vec::with_capacity(t.len());
    let mut i = 0;
    while i < t.len() {
        let pos = s.segments[i].pos.clone();
        let next = t.get(i + 1).copied();
        match (t[i], next) {
            ((4, B), Some((6, B))) => {
                segments.push(ShadowSegment { pos, color: 3, forward: true });
                i += 2;
            }
            ((6, F), Some((4, F))) => {
                segments.push(ShadowSegment { pos, color: 3, forward: false });
                i += 2;
            }
            ((6, _), _) => return Err(ShadowError::UnparsableShadow(i)),
            ((c @ 3..=5, fwd), _) => {
                segments.push(ShadowSegment { pos, color: c + 1, forward: fwd });
                i += 1;
            }
            ((c, _), _) => return Err(ShadowError::NonStandardColor(c)),
        }
    }
    Ok(ShadowSeq { unit_exp: s.unit_exp - 1, frame: s.frame.clone(), segments })
}

/// The part of the tiling within `d·ψ^(3−depth)` of the edge, where `d`
/// is the unit of the shadow. The hexagons touching the edge are read off
/// after `depth` coarsenings of the shadow and refined back.
pub fn reconstruct_strip(s: &ShadowSeq, depth: usize) -> Result<Tiling, ShadowError> {
    let mut coarse = s.clone();
    for _ in 0..depth {
        coarse = coarsen_shadow(&coarse)?;
    }
    let hexes = edge_hexagons(&coarse)?;
    let base = Tiling::new(coarse.unit_exp, hexes).map_err(|_| ShadowError::EmptyShadow)?;
    let fine = base.refine_n(depth);
    let width = psi(s.unit_exp + 3 - depth as i64);
    let near = fine
        .filtered(|h| {
            let min_y = h.vertices().iter().map(|v| v.y.clone()).reduce(|a, b| RingElem::min_value(&a, &b)).unwrap();
            min_y.cmp_value(&width) == Ordering::Less
        })
        .ok_or(ShadowError::EmptyShadow)?;
    Ok(near.transformed(&s.frame))
}

/// An edge symbol: a side of length `d·ψ^kind` with an orientation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EdgeSymbol {
    pub kind: u8,
    pub forward: bool,
}

impl EdgeSymbol {
    pub fn fwd(kind: u8) -> Self {
        EdgeSymbol { kind, forward: true }
    }

    pub fn bwd(kind: u8) -> Self {
        EdgeSymbol { kind, forward: false }
    }

    pub fn flipped(self) -> Self {
        EdgeSymbol { forward: !self.forward, ..self }
    }
}

impl fmt::Display for EdgeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.forward { '>' } else { '<' }, self.kind)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct EdgeSeq(pub Vec<EdgeSymbol>);

impl EdgeSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn kinds(&self) -> Vec<u8> {
        self.0.iter().map(|s| s.kind).collect()
    }

    pub fn concat(&self, other: &EdgeSeq) -> EdgeSeq {
        EdgeSeq(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn prefix(&self, n: usize) -> EdgeSeq {
        EdgeSeq(self.0[..n.min(self.len())].to_vec())
    }

    /// Reversed order with every arrow flipped.
    pub fn mirror(&self) -> EdgeSeq {
        EdgeSeq(self.0.iter().rev().map(|s| s.flipped()).collect())
    }
}

impl fmt::Display for EdgeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for EdgeSeq {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        s.split_whitespace()
            .map(|tok| {
                let (kind, forward) = parse_token(tok)?;
                if kind > 3 {
                    return Err(ParseError::new(format!("edge symbol {tok:?} must be 0..3")));
                }
                Ok(EdgeSymbol { kind, forward })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(EdgeSeq)
    }
}

/// Shadow tokens of a forward edge symbol.
fn expansion(kind: u8) -> Vec<Token> {
    match kind {
        0 => vec![(6, F), (4, F), (4, B)],
        1 => vec![(3, B), (5, B)],
        2 => vec![(4, B), (6, B)],
        _ => vec![(3, F)],
    }
}

/// `→0 ↦ →6→4←4`, `→1 ↦ ←3←5`, `→2 ↦ ←4←6`, `→3 ↦ →3`; backward symbols
/// expand to the mirrored word.
pub fn edge_expand(e: &EdgeSeq, unit_exp: i64) -> ShadowSeq {
    let tokens: Vec<Token> = e
        .0
        .iter()
        .flat_map(|s| if s.forward { expansion(s.kind) } else { mirror_tokens(&expansion(s.kind)) })
        .collect();
    ShadowSeq::from_tokens(&tokens, unit_exp, Placement::identity(), RingElem::zero())
        .expect("expansions use standard colours")
}

/// The edge symbols of a shadow, one per hexagon side on the edge.
pub fn edge_sequence(s: &ShadowSeq) -> Result<EdgeSeq, ShadowError> {
    let mut out = Vec::new();
    for b in parse_blocks(s)? {
        let syms: &[EdgeSymbol] = match (b.witness, b.reversed) {
            (Witness::LargeBack, r) => &[EdgeSymbol { kind: 0, forward: !r }],
            (Witness::LargeBottom, r) => &[EdgeSymbol { kind: 1, forward: !r }],
            (Witness::SmallBottom, r) => &[EdgeSymbol { kind: 2, forward: !r }],
            (Witness::SisterBrother, false) => &[EdgeSymbol { kind: 3, forward: true }, EdgeSymbol { kind: 1, forward: true }],
            (Witness::SisterBrother, true) => &[EdgeSymbol { kind: 1, forward: false }, EdgeSymbol { kind: 3, forward: false }],
        };
        out.extend_from_slice(syms);
    }
    Ok(EdgeSeq(out))
}

/// Allowed neighbours: `→2→0, ←0←2, ←2→2, ←0→0, →0←0` and the same with
/// 1 and 3 in place of 0 and 2.
pub fn pair_allowed(a: EdgeSymbol, b: EdgeSymbol) -> bool {
    if a.kind % 2 != b.kind % 2 || a.kind > 3 || b.kind > 3 {
        return false;
    }
    let low = a.kind % 2;
    let high = low + 2;
    let pairs = [
        (EdgeSymbol::fwd(high), EdgeSymbol::fwd(low)),
        (EdgeSymbol::bwd(low), EdgeSymbol::bwd(high)),
        (EdgeSymbol::bwd(high), EdgeSymbol::fwd(high)),
        (EdgeSymbol::bwd(low), EdgeSymbol::fwd(low)),
        (EdgeSymbol::fwd(low), EdgeSymbol::bwd(low)),
    ];
    pairs.contains(&(a, b))
}

/// All ten allowed pairs.
pub fn allowed_pairs() -> Vec<(EdgeSymbol, EdgeSymbol)> {
    let mut out = Vec::new();
    for a in all_symbols() {
        for b in all_symbols() {
            if pair_allowed(a, b) {
                out.push((a, b));
            }
        }
    }
    out
}

fn all_symbols() -> impl Iterator<Item = EdgeSymbol> {
    (0..4u8).flat_map(|k| [EdgeSymbol::fwd(k), EdgeSymbol::bwd(k)])
}

/// Index of the first pair that is not allowed.
pub fn validate_pairs(e: &EdgeSeq) -> Result<(), ShadowError> {
    if e.0.iter().any(|s| s.kind > 3) {
        return Err(ShadowError::InvalidEdge);
    }
    if e.0.windows(2).all(|w| pair_allowed(w[0], w[1])) {
        Ok(())
    } else {
        Err(ShadowError::InvalidEdge)
    }
}

fn refine_symbol(s: EdgeSymbol) -> Vec<EdgeSymbol> {
    let fwd = match s.kind {
        0 => vec![EdgeSymbol::bwd(1), EdgeSymbol::bwd(3)],
        k => vec![EdgeSymbol::fwd(k - 1)],
    };
    if s.forward {
        fwd
    } else {
        EdgeSeq(fwd).mirror().0
    }
}

/// `→0 ↦ ←1←3`, `→1 ↦ →0`, `→2 ↦ →1`, `→3 ↦ →2`, mirrored for backward
/// symbols.
pub fn edge_refine(e: &EdgeSeq) -> EdgeSeq {
    EdgeSeq(e.0.iter().flat_map(|&s| refine_symbol(s)).collect())
}

/// The unique `f` with `edge_refine(f) = e`, if any.
pub fn edge_coarsen(e: &EdgeSeq) -> Result<EdgeSeq, ShadowError> {
    let v = &e.0;
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let next = v.get(i + 1).copied();
        match (v[i], next) {
            (a, Some(b)) if a == EdgeSymbol::bwd(1) && b == EdgeSymbol::bwd(3) => {
                out.push(EdgeSymbol::fwd(0));
                i += 2;
            }
            (a, Some(b)) if a == EdgeSymbol::fwd(3) && b == EdgeSymbol::fwd(1) => {
                out.push(EdgeSymbol::bwd(0));
                i += 2;
            }
            (s, _) if s.kind == 3 || s.kind > 3 => return Err(ShadowError::InvalidEdge),
            (s, _) => {
                out.push(EdgeSymbol { kind: s.kind + 1, forward: s.forward });
                i += 1;
            }
        }
    }
    Ok(EdgeSeq(out))
}

/// Restores the arrows of a window of edge symbols from the allowed-pair
/// relation. Fails with `Ambiguous` unless exactly one orientation fits.
pub fn recover_orientation(kinds: &[u8]) -> Result<EdgeSeq, ShadowError> {
    if kinds.is_empty() {
        return Err(ShadowError::Ambiguous);
    }
    if kinds.iter().any(|&k| k > 3 || k % 2 != kinds[0] % 2) {
        return Err(ShadowError::InvalidEdge);
    }
    // ways[i][o]: orientations of kinds[i..] starting with o, capped at 2
    let n = kinds.len();
    let mut ways = vec![[0u8; 2]; n];
    ways[n - 1] = [1, 1];
    for i in (0..n - 1).rev() {
        for o in 0..2 {
            let a = EdgeSymbol { kind: kinds[i], forward: o == 1 };
            let c: u8 = (0..2)
                .filter(|&p| pair_allowed(a, EdgeSymbol { kind: kinds[i + 1], forward: p == 1 }))
                .map(|p| ways[i + 1][p])
                .sum();
            ways[i][o] = c.min(2);
        }
    }
    match ways[0][0] + ways[0][1] {
        0 => return Err(ShadowError::InvalidEdge),
        1 => {}
        _ => return Err(ShadowError::Ambiguous),
    }
    let mut out = Vec::with_capacity(n);
    let mut o = if ways[0][0] == 1 { 0 } else { 1 };
    for i in 0..n {
        let sym = EdgeSymbol { kind: kinds[i], forward: o == 1 };
        out.push(sym);
        if i + 1 < n {
            o = (0..2)
                .find(|&p| ways[i + 1][p] > 0 && pair_allowed(sym, EdgeSymbol { kind: kinds[i + 1], forward: p == 1 }))
                .expect("a continuation exists");
        }
    }
    Ok(EdgeSeq(out))
}

/// `B₀ = →1`, `B₂ = ←1←3`, `B_{k+4} = mirror(B_{k+2})·mirror(B_k)`; even
/// `k` only.
pub fn back_word(k: usize) -> EdgeSeq {
    assert!(k % 2 == 0, "only even indices are defined");
    let mut a = EdgeSeq(vec![EdgeSymbol::fwd(1)]);
    let mut b = EdgeSeq(vec![EdgeSymbol::bwd(1), EdgeSymbol::bwd(3)]);
    if k == 0 {
        return a;
    }
    for _ in 1..k / 2 {
        let c = b.mirror().concat(&a.mirror());
        a = b;
        b = c;
    }
    b
}

/// The word `w = ←3→3→1←1`, which differs from its mirror image.
pub fn switch_word() -> EdgeSeq {
    EdgeSeq(vec![EdgeSymbol::bwd(3), EdgeSymbol::fwd(3), EdgeSymbol::fwd(1), EdgeSymbol::bwd(1)])
}

/// `(γ, β₁, β₂)` where `β` is the first `n` symbols of `B₀B₂B₄…`,
/// `γ = mirror(β)`, `β₁ = w·β` and `β₂ = mirror(w)·β`. The edges `γβ₁`
/// and `γβ₂` agree on `γ` but come from different tilings. A prefix that
/// would end inside a `→3→1` pair takes one more symbol.
pub fn counterexample(n: usize) -> (EdgeSeq, EdgeSeq, EdgeSeq) {
    let mut beta = EdgeSeq::default();
    let mut k = 0;
    while beta.len() <= n {
        beta = beta.concat(&back_word(k));
        k += 2;
    }
    let cut = if n > 0 && beta.0[n - 1] == EdgeSymbol::fwd(3) { n + 1 } else { n };
    let beta = beta.prefix(cut);
    let w = switch_word();
    (beta.mirror(), w.concat(&beta), w.mirror().concat(&beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PlacedHexagon;
    use crate::tiling::standard_tiling;
    use crate::words::{generate_patch, symmetric_union, SymmetryKind, Word};

    fn e(s: &str) -> EdgeSeq {
        s.parse().unwrap()
    }

    fn sh(s: &str) -> ShadowSeq {
        s.parse().unwrap()
    }

    fn back_line() -> AxisLine {
        AxisLine { vertical: true, coord: RingElem::zero() }
    }

    fn bottom_line() -> AxisLine {
        AxisLine { vertical: false, coord: RingElem::zero() }
    }

    #[test]
    fn singleton_back() {
        let t = standard_tiling(0, &Placement::identity()).unwrap();
        let s = extract_shadow(&t, &back_line()).unwrap();
        assert_eq!(s.to_string(), ">6 >4 <4");
        let b = parse_blocks(&s).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].witness, Witness::LargeBack);
    }

    #[test]
    fn crossing_edge_is_rejected() {
        let t = standard_tiling(0, &Placement::identity()).unwrap();
        let mid = AxisLine { vertical: true, coord: psi(4) };
        assert_eq!(extract_shadow(&t, &mid), Err(ShadowError::EdgeCrossed));
    }

    #[test]
    fn single_blocks() {
        let b = parse_blocks(&sh(">5 >3")).unwrap();
        assert_eq!((b[0].witness, b[0].reversed), (Witness::LargeBottom, true));
        assert_eq!(parse_blocks(&sh(">3 <4")), Err(ShadowError::UnparsableShadow(0)));
        assert!(parse_blocks(&sh(">5 >3 <3 <5")).is_ok());
    }

    #[test]
    fn quadrant_side_colours() {
        let base = PlacedHexagon::canonical(SizeClass::Large);
        let words = [("slslslsl", "44664", "3553"), ("lslslslsl", "644446", "335"), ("llslslslsl", "46644", "533")];
        for (word, vertical, horizontal) in words {
            let w: Word = word.parse().unwrap();
            let t = generate_patch(&base, &w).unwrap();
            let top = crate::words::apply_word(&base, &w);
            // the quadrant corner is the top hexagon's back/bottom corner
            let corner = top.vertices()[0].clone();
            let lines = [
                AxisLine { vertical: true, coord: corner.x.clone() },
                AxisLine { vertical: false, coord: corner.y.clone() },
            ];
            let mut got = Vec::new();
            for line in &lines {
                let s = extract_shadow(&t, line).unwrap();
                let colors: String = s.colors().iter().map(|c| c.to_string()).collect();
                got.push(colors);
            }
            let found = |pat: &str| got.iter().any(|g| g.starts_with(pat) || g.chars().rev().collect::<String>().starts_with(pat));
            assert!(found(vertical), "{word}: {got:?}");
            assert!(found(horizontal), "{word}: {got:?}");
        }
    }

    fn strip_of(source: &Tiling, s: &ShadowSeq, width: &RingElem, margin: &RingElem) -> Vec<PlacedHexagon> {
        let to_norm = s.frame.invert();
        let lo = &s.start() + margin;
        let hi = &s.end() - margin;
        source
            .hexes()
            .iter()
            .filter(|h| {
                let v = h.transformed(&to_norm).vertices();
                let near = v.iter().any(|q| q.y.cmp_value(width) == Ordering::Less);
                let inside = v.iter().all(|q| q.x.cmp_value(&lo) != Ordering::Less && q.x.cmp_value(&hi) != Ordering::Greater);
                near && inside
            })
            .cloned()
            .collect()
    }

    fn assert_round_trip(source: &Tiling, line: &AxisLine, max_depth: usize) {
        let s = extract_shadow(source, line).unwrap();
        assert_eq!(count_partitions(&s), 1);
        for depth in 0..=max_depth {
            let r = reconstruct_strip(&s, depth).unwrap();
            for h in r.hexes() {
                assert!(source.contains(h), "depth {depth}: {h} not in source");
            }
            let width = psi(s.unit_exp + 3 - depth as i64);
            let margin = psi(s.unit_exp - depth as i64);
            for h in strip_of(source, &s, &width, &margin) {
                assert!(r.contains(&h), "depth {depth}: strip hexagon {h} missing");
            }
        }
    }

    #[test]
    fn round_trip_standard() {
        for level in 0..=7 {
            let t = standard_tiling(level, &Placement::identity()).unwrap();
            assert_round_trip(&t, &back_line(), level as usize);
            assert_round_trip(&t, &bottom_line(), level as usize);
        }
    }

    #[test]
    fn round_trip_symmetric_union() {
        let w: Word = "slslsl".parse().unwrap();
        let t = symmetric_union(SymmetryKind::Two, &w);
        let top = crate::words::apply_word(&PlacedHexagon::canonical(SizeClass::Large), &w);
        let (a, b) = top.side(ChairSide::Bottom);
        let line = AxisLine::of_segment(&a, &b).unwrap();
        assert_round_trip(&t, &line, 4);
    }

    #[test]
    fn expansion_lengths() {
        let s = edge_expand(&e(">1"), 0);
        assert_eq!(s.end(), psi(1));
        assert_eq!(edge_expand(&e(">0"), 0).to_string(), ">6 >4 <4");
        assert_eq!(edge_expand(&e(">2"), 0).to_string(), "<4 <6");
        assert_eq!(edge_expand(&e("<0"), 0).to_string(), ">4 <4 <6");
        for k in 0..4u8 {
            let s = edge_expand(&EdgeSeq(vec![EdgeSymbol::fwd(k)]), 0);
            assert_eq!(s.end(), psi(k as i64));
        }
    }

    #[test]
    fn refine_table() {
        assert_eq!(edge_refine(&e(">2 >0")), e(">1 <1 <3"));
        assert_eq!(edge_refine(&e("<0")), e(">3 >1"));
        for (a, b) in allowed_pairs() {
            let r = edge_refine(&EdgeSeq(vec![a, b]));
            assert!(validate_pairs(&r).is_ok(), "{a}{b} -> {r}");
            assert_ne!(a.kind % 2, r.0[0].kind % 2);
        }
        assert_eq!(allowed_pairs().len(), 10);
    }

    #[test]
    fn refine_matches_shadow_substitution() {
        // expanding then refining colours equals refining symbols then expanding
        for a in all_symbols() {
            let seq = EdgeSeq(vec![a]);
            let direct = edge_expand(&edge_refine(&seq), 1);
            let coarse = edge_expand(&seq, 0);
            assert_eq!(coarsen_shadow(&direct).unwrap().tokens(), coarse.tokens(), "{a}");
        }
    }

    fn all_valid(len: usize) -> Vec<EdgeSeq> {
        let mut out: Vec<EdgeSeq> = all_symbols().map(|s| EdgeSeq(vec![s])).collect();
        for _ in 1..len {
            out = out
                .into_iter()
                .flat_map(|q| {
                    let last = *q.0.last().unwrap();
                    all_symbols().filter(move |&s| pair_allowed(last, s)).map(move |s| {
                        let mut v = q.0.clone();
                        v.push(s);
                        EdgeSeq(v)
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn refinement_is_injective() {
        let mut seen = std::collections::HashMap::new();
        for len in 1..=6 {
            for q in all_valid(len) {
                let r = edge_refine(&q);
                assert_eq!(edge_coarsen(&r).unwrap(), q);
                if let Some(prev) = seen.insert(r.clone(), q.clone()) {
                    panic!("{prev} and {q} both refine to {r}");
                }
            }
        }
    }

    #[test]
    fn orientation_recovery() {
        assert_eq!(recover_orientation(&[2, 0]).unwrap(), e(">2 >0"));
        assert_eq!(recover_orientation(&[0, 2]).unwrap(), e("<0 <2"));
        assert_eq!(recover_orientation(&[0, 0, 0, 0]), Err(ShadowError::Ambiguous));
        assert_eq!(recover_orientation(&[2, 1]), Err(ShadowError::InvalidEdge));
        for level in 1..=8 {
            let t = standard_tiling(level, &Placement::identity()).unwrap();
            for line in [back_line(), bottom_line()] {
                let q = edge_sequence(&extract_shadow(&t, &line).unwrap()).unwrap();
                if q.kinds().iter().any(|&k| k >= 2) && q.len() > 1 {
                    assert_eq!(recover_orientation(&q.kinds()).unwrap(), q);
                }
            }
        }
    }

    #[test]
    fn back_words_are_standard_backs() {
        assert_eq!(back_word(4), e(">3 >1 <1"));
        assert_eq!(back_word(4), back_word(2).mirror().concat(&back_word(0).mirror()));
        for k in (0..=12).step_by(2) {
            let t = standard_tiling(k as i64 - 1, &Placement::identity()).unwrap();
            let s = extract_shadow(&t, &back_line()).unwrap();
            let got: EdgeSeq = if k == 0 {
                // a lone small hexagon's back reads like a bottom
                EdgeSeq(vec![EdgeSymbol::fwd(1)])
            } else {
                edge_sequence(&s).unwrap()
            };
            assert_eq!(got, back_word(k), "k = {k}");
            assert_eq!(edge_expand(&back_word(k), s.unit_exp).tokens(), s.tokens());
        }
    }

    #[test]
    fn counterexample_is_valid_and_ambiguous() {
        let w = switch_word();
        assert_ne!(w, w.mirror());
        for n in 1..=20 {
            let (g, b1, b2) = counterexample(n);
            assert!(b1.len() >= n + 4);
            let e1 = g.concat(&b1);
            let e2 = g.concat(&b2);
            validate_pairs(&e1).unwrap();
            validate_pairs(&e2).unwrap();
            let r1 = reconstruct_strip(&edge_expand(&e1, 0), 0).unwrap();
            let r2 = reconstruct_strip(&edge_expand(&e2, 0), 0).unwrap();
            assert_ne!(r1, r2);
            // both agree on γ away from the block that may straddle the junction
            let g_end = &edge_expand(&g, 0).end() - &RingElem::one();
            let on_g = |t: &Tiling| -> Vec<PlacedHexagon> {
                t.hexes()
                    .iter()
                    .filter(|h| h.vertices().iter().all(|v| v.x.cmp_value(&g_end) != Ordering::Greater))
                    .cloned()
                    .collect()
            };
            assert_eq!(on_g(&r1), on_g(&r2));
            if n >= 8 {
                assert!(!on_g(&r1).is_empty());
            }
        }
    }

    #[test]
    fn text_forms() {
        let s = sh(">6 >4 <4");
        assert_eq!(s.to_string(), ">6 >4 <4");
        assert_eq!(s.end(), RingElem::one());
        assert!(">7".parse::<ShadowSeq>().is_err());
        assert!("6".parse::<ShadowSeq>().is_err());
        assert_eq!(e(">0 <2").to_string(), ">0 <2");
        assert!(">4".parse::<EdgeSeq>().is_err());
    }
}
