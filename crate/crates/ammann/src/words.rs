//! Words over `{l, s}`: `l` moves a hexagon to its father, `s` to its mother.

use std::fmt;
use std::str::FromStr;

use crate::error::{ParseError, TilingError, WordError};
use crate::geometry::{ParentRole, PlacedHexagon, Placement, SizeClass};
use crate::ring::RingElem;
use crate::tiling::{standard_tiling, CoarsenPolicy, Tiling};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Letter {
    L,
    S,
}

impl Letter {
    pub fn weight(self) -> i64 {
        match self {
            Letter::L => 1,
            Letter::S => 2,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::L => 'l',
            Letter::S => 's',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn repeat(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }
}

/// `#l + 2·#s`: the level gained by following the word.
pub fn weighted_length(w: &Word) -> i64 {
    w.0.iter().map(|l| l.weight()).sum()
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        s.trim()
            .chars()
            .map(|c| match c {
                'l' | 'L' => Ok(Letter::L),
                's' | 'S' => Ok(Letter::S),
                other => Err(ParseError::new(format!("unexpected letter {other:?} in word"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// An eventually periodic word `prefix · period^ω`, normalised so the
/// period is primitive and the prefix is as short as possible.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct EPWord {
    prefix: Word,
    period: Word,
}

fn primitive_root(v: &[Letter]) -> &[Letter] {
    let n = v.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| v[i] == v[i - p]) {
            return &v[..p];
        }
    }
    v
}

impl EPWord {
    pub fn new(prefix: Word, period: Word) -> Result<EPWord, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        let mut u = prefix.0;
        let mut v = primitive_root(&period.0).to_vec();
        while let (Some(&a), Some(&b)) = (u.last(), v.last()) {
            if a != b {
                break;
            }
            u.pop();
            v.rotate_right(1);
        }
        Ok(EPWord { prefix: Word(u), period: Word(v) })
    }

    pub fn periodic(period: Word) -> Result<EPWord, WordError> {
        EPWord::new(Word::empty(), period)
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn letter(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix.0[i]
        } else {
            let p = &self.period.0;
            p[(i - self.prefix.len()) % p.len()]
        }
    }

    /// The first `n` letters.
    pub fn take(&self, n: usize) -> Word {
        Word((0..n).map(|i| self.letter(i)).collect())
    }
}

impl fmt::Display for EPWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.prefix, self.period)
    }
}

impl FromStr for EPWord {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| ParseError::new("eventually periodic word needs `u(v)`"))?;
        let inner = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| ParseError::new("missing closing parenthesis"))?;
        let prefix: Word = s[..open].parse()?;
        let period: Word = inner.parse()?;
        EPWord::new(prefix, period).map_err(|e| ParseError::new(e.to_string()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Region {
    Plane,
    HalfPlane,
    Quadrant,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Region::Plane => "Plane",
            Region::HalfPlane => "HalfPlane",
            Region::Quadrant => "Quadrant",
        };
        f.write_str(s)
    }
}

/// Whether `period^ω` read from `start` splits into blocks `s` and `lsl`.
fn parses_into_blocks(period: &[Letter], start: usize) -> bool {
    let n = period.len();
    let at = |i: usize| period[i % n];
    let mut pos = start;
    let mut seen = vec![false; n];
    loop {
        if seen[pos % n] {
            return true;
        }
        seen[pos % n] = true;
        match at(pos) {
            Letter::S => pos += 1,
            Letter::L => {
                if at(pos + 1) == Letter::S && at(pos + 2) == Letter::L {
                    pos += 3;
                } else {
                    return false;
                }
            }
        }
    }
}

/// Which region the infinite standard tiling `{H}α` covers: a quadrant iff
/// a tail alternates `l` and `s`, a half-plane iff a tail splits into the
/// blocks `s` and `lsl`, the plane otherwise.
pub fn classify(alpha: &EPWord) -> Region {
    let p = alpha.period.letters();
    if p.len() == 2 && p[0] != p[1] {
        return Region::Quadrant;
    }
    if (0..p.len()).any(|r| parses_into_blocks(p, r)) {
        Region::HalfPlane
    } else {
        Region::Plane
    }
}

/// Offset `r` with `b = rotation of a by r`, if the words are conjugate.
fn rotation_offset(a: &[Letter], b: &[Letter]) -> Option<usize> {
    if a.len() != b.len() {
        return None;
    }
    let n = a.len();
    (0..n).find(|&r| (0..n).all(|i| a[(i + r) % n] == b[i]))
}

/// Weight difference `w(u) − w(v)` for one factorisation `α = uγ`,
/// `β = vγ`, together with the period weight; `None` without a common tail.
fn tail_alignment(alpha: &EPWord, beta: &EPWord) -> Option<(i64, i64)> {
    let r = rotation_offset(alpha.period.letters(), beta.period.letters())?;
    // α[|u₁| + r ..] = β[|u₂| ..]
    let ua = alpha.prefix.concat(&alpha.period.prefix(r));
    let d0 = weighted_length(&ua) - weighted_length(&beta.prefix);
    Some((d0, weighted_length(&alpha.period)))
}

/// `α = uγ`, `β = vγ` with `w(u) − w(v) = level_offset` for some `u, v`.
/// With equal bases use `level_offset = 0`.
pub fn equivalent(alpha: &EPWord, beta: &EPWord, level_offset: i64) -> bool {
    match tail_alignment(alpha, beta) {
        Some((d0, w)) => (d0 - level_offset).rem_euclid(w) == 0,
        None => false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum QuadrantClass {
    /// `(sl)^ω`
    Q1,
    /// `l(sl)^ω`
    Q2,
    /// `ll(sl)^ω`
    Q3,
}

impl QuadrantClass {
    pub fn representative(self) -> EPWord {
        let s = match self {
            QuadrantClass::Q1 => "(sl)",
            QuadrantClass::Q2 => "l(sl)",
            QuadrantClass::Q3 => "ll(sl)",
        };
        s.parse().expect("valid representative")
    }
}

impl fmt::Display for QuadrantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn quadrant_class(alpha: &EPWord) -> Result<QuadrantClass, WordError> {
    if classify(alpha) != Region::Quadrant {
        return Err(WordError::NotQuadrant);
    }
    let q1 = QuadrantClass::Q1.representative();
    let (d0, w) = tail_alignment(alpha, &q1).ok_or(WordError::NotQuadrant)?;
    Ok(match d0.rem_euclid(w) {
        0 => QuadrantClass::Q1,
        1 => QuadrantClass::Q2,
        _ => QuadrantClass::Q3,
    })
}

pub fn step(h: &PlacedHexagon, letter: Letter) -> PlacedHexagon {
    match letter {
        Letter::L => h.parent_of(ParentRole::AsDaughter),
        Letter::S => h.parent_of(ParentRole::AsSon),
    }
}

/// The hexagon `h·w`.
pub fn apply_word(h: &PlacedHexagon, w: &Word) -> PlacedHexagon {
    w.0.iter().fold(h.clone(), |acc, &l| step(&acc, l))
}

/// The standard tiling of `base·w` at the unit of `base`. A small base
/// must be followed by `s`: its father is a single tile of the same unit
/// and would not contain it.
pub fn generate_patch(base: &PlacedHexagon, w: &Word) -> Result<Tiling, WordError> {
    let (unit, base_level) = match base.class {
        SizeClass::Large => (base.place.scale_exp, 0),
        SizeClass::Small => (base.place.scale_exp - 1, -1),
    };
    if base.class == SizeClass::Small && w.0.first() == Some(&Letter::L) {
        return Err(WordError::InvalidStart);
    }
    let top = apply_word(base, w);
    let level = base_level + weighted_length(w);
    if level == -1 {
        return Ok(Tiling::new(unit, vec![base.clone()]).expect("small base is a valid tiling"));
    }
    let t = standard_tiling(level, &top.place).expect("level is at least -1");
    debug_assert_eq!(t.unit_exp(), unit);
    Ok(t)
}

/// The word `u` with `h·u ∈ T[depth]`, following `h` through `depth`
/// coarsenings (boundary Smalls without brothers are trimmed).
pub fn address(t: &Tiling, h: &PlacedHexagon, depth: usize) -> Result<Word, TilingError> {
    if !t.contains(h) {
        return Err(TilingError::NotInTiling(Box::new(h.clone())));
    }
    let mut cur_t = t.clone();
    let mut cur = h.clone();
    let mut out = Vec::new();
    for _ in 0..depth {
        let next = cur_t.coarse_image(&cur).ok_or_else(|| TilingError::HexagonTrimmed(Box::new(h.clone())))?;
        if next.place != cur.place {
            out.push(if cur.class == SizeClass::Small { Letter::S } else { Letter::L });
        }
        cur_t = cur_t.coarsen(CoarsenPolicy::TrimBoundary)?;
        cur = next;
    }
    Ok(Word(out))
}

/// Address of `h` up to the single hexagon that `T` coarsens to.
pub fn full_address(t: &Tiling, h: &PlacedHexagon) -> Result<Word, TilingError> {
    let mut depth = 0;
    let mut cur = t.clone();
    while cur.len() > 1 {
        cur = cur.coarsen(CoarsenPolicy::TrimBoundary)?;
        depth += 1;
    }
    address(t, h, depth)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SymmetryKind {
    Two,
    Four,
}

/// Mirror copies of the standard patch of a Large hexagon `H·w`, arranged
/// so the top hexagons share their backs (`Two`) or touch both axes with
/// their backs and bottoms (`Four`).
pub fn symmetric_union(kind: SymmetryKind, w: &Word) -> Tiling {
    let base = PlacedHexagon::canonical(SizeClass::Large);
    let patch = generate_patch(&base, w).expect("large base accepts every word");
    let top = apply_word(&base, w);
    let to_frame = top.place.invert();
    let from_frame = &top.place;
    // mirrors of the canonical frame in its back (x = 0) and bottom (y = 0)
    let back_mirror = Placement::new(2, true, 0, Default::default());
    let bottom_mirror = Placement::new(0, true, 0, Default::default());
    let conj = |m: &Placement| from_frame.compose(m).compose(&to_frame);
    let mut out = patch.union(&patch.transformed(&conj(&back_mirror)));
    if kind == SymmetryKind::Four {
        out = out.union(&out.transformed(&conj(&bottom_mirror)));
    }
    out
}

/// Bounding boxes of `H₀·α[..n]` sampled after each period, starting from a
/// canonical Large hexagon.
fn hull_trace(alpha: &EPWord, periods: usize) -> Vec<[RingElem; 4]> {
    let mut h = apply_word(&PlacedHexagon::canonical(SizeClass::Large), alpha.prefix());
    let mut out = Vec::with_capacity(periods + 1);
    let snap = |h: &PlacedHexagon| {
        let b = h.bbox();
        [b.min.x, b.min.y, b.max.x, b.max.y]
    };
    out.push(snap(&h));
    for _ in 0..periods {
        h = apply_word(&h, alpha.period());
        out.push(snap(&h));
    }
    out
}

/// Number of directions (of left, down, right, up) in which the hexagons
/// `H₀·α[..n]` keep growing, judged over the last `window` of `periods`.
pub fn growth_directions(alpha: &EPWord, periods: usize, window: usize) -> usize {
    let trace = hull_trace(alpha, periods);
    let last = &trace[trace.len() - 1];
    let earlier = &trace[trace.len() - 1 - window.min(periods)];
    (0..4).filter(|&i| last[i] != earlier[i]).count()
}
