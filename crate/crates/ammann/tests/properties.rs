use std::collections::BTreeSet;

use num_bigint::BigInt;
use proptest::prelude::*;

use ammann::format::{emit_atf, parse_atf};
use ammann::geometry::{canonical_area, ChairSide, ParentRole, Placement, PlacedHexagon, Point, Rect, SizeClass};
use ammann::lines::{assemble_lines, interior_margin, interval_sequence, interval_word};
use ammann::ring::{FieldElem, RingElem};
use ammann::shadow::{allowed_pairs, edge_refine, pair_allowed, recover_orientation, EdgeSeq, EdgeSymbol};
use ammann::subshift::{build_alphabet, build_grid, check_configuration, index_grid, motifs, reassemble, Grid};
use ammann::tiling::{check_proper, fib, standard_tiling, CoarsenPolicy, Tiling};
use ammann::words::{classify, equivalent, generate_patch, weighted_length, EPWord, Word};

fn psi(k: i64) -> RingElem {
    RingElem::psi_pow(k)
}

fn ring() -> impl Strategy<Value = RingElem> {
    prop::array::uniform4(-100i64..100).prop_map(|[a, b, c, d]| RingElem::new(a, b, c, d))
}

fn small_ring() -> impl Strategy<Value = RingElem> {
    prop::array::uniform4(-4i64..4).prop_map(|[a, b, c, d]| RingElem::new(a, b, c, d))
}

fn placement() -> impl Strategy<Value = Placement> {
    (0u8..4, any::<bool>(), -4i64..4, small_ring(), small_ring())
        .prop_map(|(rot, reflect, k, x, y)| Placement::new(rot, reflect, k, Point::new(x, y)))
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(any::<bool>(), 0..max)
        .prop_map(|v| v.iter().map(|&l| if l { 'l' } else { 's' }).collect::<String>().parse().unwrap())
}

fn ep_word() -> impl Strategy<Value = EPWord> {
    (word(4), word(4).prop_filter("period is non-empty", |w| !w.is_empty()))
        .prop_map(|(u, v)| EPWord::new(u, v).unwrap())
}

/// `ψ·10^digits`, rounded down, from integer square roots.
fn psi_scaled(digits: u32) -> BigInt {
    let ten = BigInt::from(10).pow(digits);
    let sqrt5 = (BigInt::from(5) * &ten * &ten).sqrt();
    let psi2: BigInt = (sqrt5 - &ten) / 2;
    (psi2 * &ten).sqrt()
}

fn oracle_sign(x: &RingElem, p: &BigInt, digits: u32) -> i32 {
    let ten = BigInt::from(10).pow(digits);
    let [c0, c1, c2, c3] = x.coeffs().clone();
    let p2 = p * p / &ten;
    let p3 = &p2 * p / &ten;
    let v = c0 * &ten + c1 * p + c2 * p2 + c3 * p3;
    match v.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn ring_axioms(a in ring(), b in ring(), c in ring()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
    }

    #[test]
    fn sign_is_multiplicative_and_matches_oracle(a in ring(), b in ring()) {
        prop_assert_eq!((&a * &b).sign(), a.sign() * b.sign());
        let p = psi_scaled(100);
        prop_assert_eq!(a.sign(), oracle_sign(&a, &p, 100));
    }

    #[test]
    fn field_division(a in ring(), b in ring().prop_filter("nonzero", |b| !b.is_zero())) {
        let q = FieldElem::new(a.clone(), b.clone()).unwrap();
        prop_assert!(q.den().is_positive());
        prop_assert!((&q * &FieldElem::from_ring(b)).same_value(&FieldElem::from_ring(a)));
    }

    #[test]
    fn placements_form_a_group(p in placement(), q in placement(), x in small_ring(), y in small_ring()) {
        let pt = Point::new(x, y);
        prop_assert_eq!(p.compose(&q).apply(&pt), p.apply(&q.apply(&pt)));
        prop_assert_eq!(p.compose(&p.invert()), Placement::identity());
        let h = PlacedHexagon::new(p.clone(), SizeClass::Large);
        prop_assert_eq!(h.area(), &canonical_area() * &psi(2 * p.scale_exp));
    }

    #[test]
    fn decoration_tiles_each_side(p in placement(), small in any::<bool>()) {
        let class = if small { SizeClass::Small } else { SizeClass::Large };
        let h = PlacedHexagon::new(p.clone(), class);
        let unit = p.scale_exp - small as i64;
        let deco = h.decorate();
        for side in ChairSide::ALL {
            let (a, b) = h.side(side);
            let mut segs: Vec<_> = deco.iter().filter(|s| s.side == side).collect();
            // order along the side from `a`
            segs.sort_by(|s, t| {
                let ds = RingElem::min_value(&s.start.sub(&a).norm2(), &s.end.sub(&a).norm2());
                let dt = RingElem::min_value(&t.start.sub(&a).norm2(), &t.end.sub(&a).norm2());
                ds.cmp_value(&dt)
            });
            let mut at = a.clone();
            for s in segs {
                prop_assert_eq!(s.length2(), psi(2 * (s.color as i64 + unit)));
                let (near, far) = if s.start == at { (&s.start, &s.end) } else { (&s.end, &s.start) };
                prop_assert_eq!(near, &at);
                at = far.clone();
            }
            prop_assert_eq!(at, b);
        }
    }

    #[test]
    fn kinship(p in placement()) {
        let h = PlacedHexagon::new(p, SizeClass::Large);
        let (daughter, son) = h.subdivide();
        prop_assert_eq!(daughter.parent_of(ParentRole::AsDaughter), h.clone());
        prop_assert_eq!(son.parent_of(ParentRole::AsSon), h.clone());
        prop_assert_eq!(daughter.sibling_of(), son.clone());
        prop_assert_eq!(son.sibling_of(), daughter.clone());
        prop_assert_eq!(&daughter.area() + &son.area(), h.area());
        prop_assert!(!daughter.overlaps(&son));
    }

    #[test]
    fn refine_then_coarsen(w in word(7), p in placement()) {
        let t = generate_patch(&PlacedHexagon::canonical(SizeClass::Large), &w).unwrap().transformed(&p);
        prop_assert_eq!(t.refine().coarsen(CoarsenPolicy::Strict).unwrap(), t.clone());
        prop_assert_eq!(parse_atf(&emit_atf(&t)).unwrap(), t);
    }

    #[test]
    fn patches_nest_and_count(w in word(8)) {
        let base = PlacedHexagon::canonical(SizeClass::Large);
        let full = generate_patch(&base, &w).unwrap();
        prop_assert_eq!(full.len() as u64, fib(weighted_length(&w)));
        prop_assert!(check_proper(&full).passed());
        let part = generate_patch(&base, &w.prefix(w.len().saturating_sub(1))).unwrap();
        prop_assert!(part.hexes().iter().all(|h| full.contains(h)));
    }

    #[test]
    fn classification_ignores_prefixes(a in ep_word(), u in word(5)) {
        let b = EPWord::new(u.concat(a.prefix()), a.period().clone()).unwrap();
        prop_assert_eq!(classify(&a), classify(&b));
        // s and ll weigh the same
        let doubled: String = a.prefix().to_string().replace('s', "ll");
        let c = EPWord::new(doubled.parse().unwrap(), a.period().clone()).unwrap();
        prop_assert_eq!(classify(&a), classify(&c));
        prop_assert!(equivalent(&a, &c, 0));
    }

    #[test]
    fn equivalence_relation(a in ep_word(), b in ep_word(), c in ep_word()) {
        prop_assert!(equivalent(&a, &a, 0));
        prop_assert_eq!(equivalent(&a, &b, 0), equivalent(&b, &a, 0));
        if equivalent(&a, &b, 0) && equivalent(&b, &c, 0) {
            prop_assert!(equivalent(&a, &c, 0));
        }
    }
}

fn symbol() -> impl Strategy<Value = EdgeSymbol> {
    (0u8..4, any::<bool>()).prop_map(|(k, f)| if f { EdgeSymbol::fwd(k) } else { EdgeSymbol::bwd(k) })
}

/// Random sequences whose consecutive symbols form allowed pairs.
fn edge_seq(max: usize) -> impl Strategy<Value = EdgeSeq> {
    (symbol(), prop::collection::vec(any::<u8>(), 0..max)).prop_map(|(first, picks)| {
        let pairs = allowed_pairs();
        let mut v = vec![first];
        for p in picks {
            let next: Vec<EdgeSymbol> = pairs.iter().filter(|(a, _)| *a == *v.last().unwrap()).map(|x| x.1).collect();
            if next.is_empty() {
                break;
            }
            v.push(next[p as usize % next.len()]);
        }
        EdgeSeq(v)
    })
}

fn all_pairs_allowed(e: &EdgeSeq) -> bool {
    e.0.windows(2).all(|w| pair_allowed(w[0], w[1]))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn refinement_keeps_pairs_allowed(e in edge_seq(10)) {
        let r = edge_refine(&e);
        prop_assert!(all_pairs_allowed(&r));
        let kinds = r.kinds();
        prop_assert!(kinds.iter().all(|k| k % 2 == kinds[0] % 2));
    }

    #[test]
    fn refinement_has_one_preimage(a in edge_seq(6), b in edge_seq(6)) {
        if a != b {
            prop_assert_ne!(edge_refine(&a), edge_refine(&b));
        }
    }

    #[test]
    fn orientation_is_recovered(e in edge_seq(10)) {
        let r = edge_refine(&edge_refine(&e));
        if r.kinds().iter().any(|&k| k >= 2) {
            if let Ok(back) = recover_orientation(&r.kinds()) {
                prop_assert_eq!(back, r);
            }
        }
    }
}

fn column(t: &Tiling) -> Rect {
    let m = interior_margin(t);
    Rect::from_corners(&Point::new(m.clone(), m.clone()), &Point::new(&psi(3) - &m, &RingElem::one() - &m))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn lines_continue_in_standard_tilings(level in 4i64..10, p in placement()) {
        let t = standard_tiling(level, &p).unwrap();
        let a = assemble_lines(&t).unwrap();
        prop_assert!(a.defects.is_empty());
        let mut segs = 0;
        for f in &a.families {
            let offs = f.offsets();
            prop_assert!(offs.windows(2).all(|w| w[0].cmp_value(&w[1]).is_lt()));
            segs += f.lines.iter().flat_map(|l| &l.chains).map(|c| c.segments.len()).sum::<usize>();
            if f.lines.len() >= 3 {
                let iv = interval_sequence(f).unwrap();
                let w = interval_word(&iv).unwrap();
                prop_assert!(!w.word.contains("SS"));
                prop_assert!((&w.short * &FieldElem::from_ring(psi(-2))).same_value(&w.long));
            }
        }
        prop_assert_eq!(segs, a.segments.len());
    }
}

fn level12() -> &'static (Grid, ammann::subshift::Alphabet, Vec<Vec<Option<usize>>>) {
    use std::sync::OnceLock;
    static CELLS: OnceLock<(Grid, ammann::subshift::Alphabet, Vec<Vec<Option<usize>>>)> = OnceLock::new();
    CELLS.get_or_init(|| {
        let t = standard_tiling(12, &Placement::identity()).unwrap();
        let g = build_grid(&t, &column(&t)).unwrap();
        let a = build_alphabet([&g]);
        let ig = index_grid(&g, &a);
        (g, a, ig)
    })
}

#[test]
fn neighbours_share_line_spacings() {
    let (g, a, ig) = level12();
    for r in 0..ig.len() {
        for c in 0..ig[0].len() {
            let Some(x) = ig[r][c] else { continue };
            if let Some(Some(y)) = ig[r].get(c + 1) {
                assert_eq!(a.cells[x].height, a.cells[*y].height);
            }
            if let Some(Some(y)) = ig.get(r + 1).map(|row| row[c]) {
                assert_eq!(a.cells[x].width, a.cells[y].width);
            }
        }
    }
    let heights: BTreeSet<_> = a.cells.iter().map(|c| c.height.clone()).collect();
    assert_eq!(heights.len(), 2);
    assert!(g.cell_count() > 100);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn accepted_blocks_reassemble_properly(r in 0usize..40, c in 0usize..40, m in 3usize..5, n in 3usize..5) {
        let (g, a, ig) = level12();
        let (r, c) = (r % (ig.len() - m + 1), c % (ig[0].len() - n + 1));
        let block: Option<Vec<Vec<usize>>> = (r..r + m).map(|i| (c..c + n).map(|j| ig[i][j]).collect()).collect();
        if let Some(b) = block {
            let m3 = motifs(ig, 3);
            prop_assert!(check_configuration(&b, &m3, false));
            let t = reassemble(&b, a, &g.slope).unwrap();
            prop_assert!(t.check_disjoint());
            prop_assert!(check_proper(&t).passed());
        }
    }
}
