//! Property tests for the grid model, cube algebra, search and analyzer.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use foldlab::analyzer::{classify, cooperates, minimally_cooperating_sets, odd_pair_exists, Cooperation};
use foldlab::constructions::{fixtures, generate_staircase, staircase_facemapping};
use foldlab::cube::{all_placements, Dir, FoldAngle, Placement};
use foldlab::engine::holes::is_trivial;
use foldlab::engine::rules::all_rules;
use foldlab::engine::search::crease_angles;
use foldlab::engine::{
    brute_force_facemappings, collect_facemappings, covered_faces, exists_onto_facemapping, hole_fold_class,
    is_consistent, Facemapping, SearchConfig, Verdict,
};
use foldlab::grid::{
    separation_parity, Axis, Band, BandAxis, Cell, HoleKind, HoleSpec, Polyomino, Rotation, SeparationParity,
};
use proptest::prelude::*;

fn all_cfg() -> SearchConfig {
    SearchConfig { enumerate_all: true, ..SearchConfig::default() }
}

fn arb_axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::Vertical), Just(Axis::Horizontal)]
}

fn arb_rotation() -> impl Strategy<Value = Rotation> {
    prop::sample::select(Rotation::ALL.to_vec())
}

fn arb_hole(w: i32, h: i32, kinds: Vec<HoleKind>) -> impl Strategy<Value = HoleSpec> {
    (prop::sample::select(kinds), 0..=w, 0..=h, arb_axis(), arb_rotation(), any::<bool>()).prop_map(
        |(kind, x, y, axis, rotation, flip)| match kind {
            HoleKind::Square => HoleSpec::Square { x, y },
            HoleKind::Slit2 => HoleSpec::Slit2 { axis, x, y },
            HoleKind::Slit1 => HoleSpec::Slit1 { axis, x, y },
            HoleKind::L => HoleSpec::L { x, y, rotation, flip },
            _ => HoleSpec::U { x, y, rotation },
        },
    )
}

/// Valid polyominoes with side lengths in `sides` and up to `max_holes` holes.
fn arb_polyomino(
    sides: std::ops::RangeInclusive<i32>,
    max_holes: usize,
    kinds: Vec<HoleKind>,
) -> impl Strategy<Value = Polyomino> {
    (sides.clone(), sides).prop_flat_map(move |(w, h)| {
        prop::collection::vec(arb_hole(w, h, kinds.clone()), 0..=max_holes)
            .prop_filter_map("invalid hole layout", move |holes| Polyomino::build(w, h, holes).ok())
    })
}

fn every_kind() -> Vec<HoleKind> {
    vec![HoleKind::Square, HoleKind::Slit2, HoleKind::Slit1, HoleKind::L, HoleKind::U]
}

fn small_polyomino() -> impl Strategy<Value = Polyomino> {
    arb_polyomino(2..=4, 3, every_kind()).prop_filter("at most 12 creases", |p| p.edges().len() <= 12)
}

fn subsets(n: usize) -> Vec<BTreeSet<usize>> {
    (0..1u32 << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn sorted(mut v: Vec<Facemapping>) -> Vec<Facemapping> {
    v.sort();
    v
}

/// Rebuilds a facemapping from a new anchor placement by replaying its crease angles.
fn reanchor(p: &Polyomino, fm: &Facemapping, anchor: Placement) -> Facemapping {
    let start = p.cells().next().unwrap();
    let mut out = Facemapping::new(p.width(), p.height());
    out.set(start, Some(anchor));
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for d in Dir::ALL {
            let Some(n) = p.neighbor(c, d) else { continue };
            if out.get(n).is_some() {
                continue;
            }
            let angle = fm.get(c).unwrap().relation(d, fm.get(n).unwrap()).unwrap();
            out.set(n, Some(out.get(c).unwrap().step(d, angle)));
            queue.push_back(n);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_sizes_follow_the_hole_kind(h in arb_hole(6, 6, every_kind())) {
        let (removed, cuts) = h.expand();
        let expected = match h.kind() {
            HoleKind::Square => (1, 0),
            HoleKind::L => (0, 2),
            HoleKind::U => (0, 3),
            HoleKind::Slit2 => (0, 2),
            _ => (0, 1),
        };
        prop_assert_eq!((removed.len(), cuts.len()), expected);
    }

    #[test]
    fn filling_is_monotone_under_subsets(p in arb_polyomino(3..=6, 4, every_kind()), a in any::<u8>(), b in any::<u8>()) {
        let n = p.holes().len();
        let s: BTreeSet<usize> = (0..n).filter(|i| a >> i & 1 == 1).collect();
        let bigger: BTreeSet<usize> = (0..n).filter(|i| s.contains(i) || b >> i & 1 == 1).collect();
        let direct = p.fill_holes(&s).unwrap();
        let first = p.fill_holes(&bigger).unwrap();
        let renumbered: BTreeSet<usize> =
            bigger.iter().enumerate().filter(|(_, h)| s.contains(h)).map(|(i, _)| i).collect();
        prop_assert!(first.fill_holes(&renumbered).unwrap().same_shape(&direct));
        prop_assert!(direct.fill_holes(&(0..s.len()).collect()).unwrap().same_shape(&direct));
    }

    #[test]
    fn parity_is_symmetric_and_survives_contraction(
        p in arb_polyomino(4..=8, 3, vec![HoleKind::Slit2, HoleKind::Slit1]),
    ) {
        let hs = p.holes();
        for a in hs {
            for b in hs {
                prop_assert_eq!(separation_parity(a, b), separation_parity(b, a));
            }
        }
        for axis in [BandAxis::Rows, BandAxis::Columns] {
            let n = if axis == BandAxis::Rows { p.height() } else { p.width() };
            for index in 0..n - 1 {
                let Ok(q) = p.contract_plain_band(Band { axis, index }) else { continue };
                prop_assert_eq!(q.holes().len(), hs.len());
                for i in 0..hs.len() {
                    for j in 0..hs.len() {
                        prop_assert_eq!(
                            separation_parity(&q.holes()[i], &q.holes()[j]),
                            separation_parity(&hs[i], &hs[j])
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn text_and_json_round_trip(p in arb_polyomino(2..=7, 4, every_kind())) {
        let text = p.to_text();
        let back = Polyomino::parse(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_text(), text);
        let json = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<Polyomino>(&json).unwrap(), p);
    }

    #[test]
    fn search_is_sound_and_complete(p in small_polyomino()) {
        let (found, _) = collect_facemappings(&p, &all_cfg()).unwrap();
        for fm in &found {
            prop_assert!(is_consistent(&p, fm));
        }
        let brute = brute_force_facemappings(&p, &all_cfg()).unwrap();
        prop_assert_eq!(sorted(found), sorted(brute));
    }

    #[test]
    fn anchoring_loses_nothing(p in small_polyomino()) {
        let (found, _) = collect_facemappings(&p, &all_cfg()).unwrap();
        let anchor = p.cells().next().unwrap();
        for fm in found.iter().take(4) {
            let mut seen = BTreeSet::new();
            for &q in all_placements() {
                let moved = reanchor(&p, fm, q);
                prop_assert!(is_consistent(&p, &moved));
                prop_assert_eq!(covered_faces(&moved).len(), covered_faces(fm).len());
                prop_assert!(seen.insert(moved.get(anchor)));
            }
        }
    }

    #[test]
    fn every_rule_holds_on_every_facemapping(p in small_polyomino()) {
        let rules = all_rules(&p);
        for fm in collect_facemappings(&p, &all_cfg()).unwrap().0 {
            let angles = crease_angles(&p, &fm).unwrap();
            for r in &rules {
                let (a, b) = r.creases();
                prop_assert!(r.holds(angles[&a], angles[&b]), "{:?} fails on\n{:?}", r, fm);
            }
        }
    }

    #[test]
    fn vertex_loops_close(p in small_polyomino()) {
        for fm in collect_facemappings(&p, &all_cfg()).unwrap().0 {
            for x in 1..p.width() {
                for y in 1..p.height() {
                    let (a, b, c, d) = (Cell::new(x - 1, y - 1), Cell::new(x, y - 1), Cell::new(x, y), Cell::new(x - 1, y));
                    let steps = [(a, Dir::Right), (b, Dir::Up), (c, Dir::Left), (d, Dir::Down)];
                    if steps.iter().any(|&(cell, dir)| p.neighbor(cell, dir).is_none()) {
                        continue;
                    }
                    let mut pl = fm.get(a).unwrap();
                    for (cell, dir) in steps {
                        let next = fm.get(cell.step(dir)).unwrap();
                        pl = pl.step(dir, fm.get(cell).unwrap().relation(dir, next).unwrap());
                    }
                    prop_assert_eq!(pl, fm.get(a).unwrap());
                }
            }
        }
    }

    #[test]
    fn filling_matches_trivial_holes(p in arb_polyomino(2..=4, 2, every_kind()), mask in any::<u8>()) {
        let n = p.holes().len();
        let keep: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let filled = p.fill_holes(&keep).unwrap();
        prop_assume!(filled.edges().len() <= 14 && p.edges().len() <= 14);
        let restricted: BTreeSet<Facemapping> = collect_facemappings(&filled, &all_cfg())
            .unwrap()
            .0
            .into_iter()
            .map(|mut fm| {
                for c in p.removed_cells() {
                    fm.set(*c, None);
                }
                fm
            })
            .collect();
        let trivial: BTreeSet<Facemapping> = collect_facemappings(&p, &all_cfg())
            .unwrap()
            .0
            .into_iter()
            .filter(|fm| (0..n).filter(|i| !keep.contains(i)).all(|i| is_trivial(&p, fm, &p.holes()[i])))
            .collect();
        // The filled search anchors a possibly different first cell, so
        // compare up to the anchor's placement.
        let anchor = p.cells().next().unwrap();
        let normal = |set: BTreeSet<Facemapping>| -> BTreeSet<Facemapping> {
            set.into_iter().map(|fm| reanchor(&p, &fm, Placement::canonical())).filter(|fm| fm.get(anchor).is_some()).collect()
        };
        prop_assert_eq!(normal(restricted), normal(trivial));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cooperation_is_monotone_and_minimal_sets_are_minimal(
        p in arb_polyomino(3..=5, 3, every_kind()),
    ) {
        let n = p.holes().len();
        let answers: BTreeMap<BTreeSet<usize>, Cooperation> =
            subsets(n).into_iter().map(|s| { let c = cooperates(&p, &s).unwrap(); (s, c) }).collect();
        for (s, c) in &answers {
            if matches!(c, Cooperation::Yes(_)) {
                for (t, d) in &answers {
                    if s.is_subset(t) {
                        prop_assert!(!matches!(d, Cooperation::No(_)), "{:?} yes but {:?} no", s, t);
                    }
                }
            }
        }
        let report = minimally_cooperating_sets(&p, n).unwrap();
        for m in &report.minimal_sets {
            let set: BTreeSet<usize> = m.holes.iter().copied().collect();
            prop_assert!(answers[&set].is_positive());
            for sub in subsets(n).into_iter().filter(|s| s.is_subset(&set) && *s != set) {
                prop_assert!(!answers[&sub].is_positive(), "{:?} has cooperating subset {:?}", set, sub);
            }
        }
    }

    #[test]
    fn foldable_square_l_u_polyominoes_have_a_cooperating_pair(
        p in arb_polyomino(3..=5, 3, vec![HoleKind::Square, HoleKind::L, HoleKind::U]),
    ) {
        let v = classify(&p);
        if v.is_foldable() || matches!(v, Verdict::FacemappingExists { .. }) {
            let n = p.holes().len();
            let pair = subsets(n).into_iter().filter(|s| s.len() <= 2).any(|s| cooperates(&p, &s).unwrap().is_positive());
            prop_assert!(pair);
        }
    }

    #[test]
    fn parity_branch_respects_odd_pairs(
        p in arb_polyomino(4..=8, 3, vec![HoleKind::Slit2]),
    ) {
        if odd_pair_exists(&p).unwrap() {
            let v = classify(&p);
            prop_assert_ne!(v.reason(), "even-separated-slits");
        }
    }

    #[test]
    fn classifier_agrees_with_search(
        p in arb_polyomino(6..=7, 3, vec![HoleKind::Slit2]),
    ) {
        let v = classify(&p);
        let s = exists_onto_facemapping(&p, &SearchConfig::default());
        let known = !matches!(s, Verdict::Unknown { .. });
        prop_assert!(known);
        prop_assert_eq!(v.is_foldable(), !s.is_unfoldable(), "{} vs {}", v.reason(), s.status());
        prop_assert_eq!(v.is_unfoldable(), s.is_unfoldable());
    }
}

#[test]
fn roll_and_flip_are_bijections_with_inverses() {
    for d in Dir::ALL {
        let rolled: BTreeSet<Placement> = all_placements().iter().map(|p| p.roll(d)).collect();
        let flipped: BTreeSet<Placement> = all_placements().iter().map(|p| p.flip(d)).collect();
        assert_eq!(rolled.len(), 48);
        assert_eq!(flipped.len(), 48);
        for &p in all_placements() {
            assert_eq!(p.roll(d).roll(d.opposite()), p);
            assert_eq!(p.flip(d).handedness(), -p.handedness());
            assert_eq!(p.roll(d).handedness(), p.handedness());
            assert_eq!(p.step(d, FoldAngle::Fold90), p.roll(d));
            assert_eq!(p.step(d, FoldAngle::Fold180), p.flip(d));
        }
    }
}

#[test]
fn fig5_pairs_are_odd_separated() {
    for f in fixtures().into_iter().filter(|f| f.figure_id.starts_with("fig5")) {
        let hs = f.polyomino.holes();
        let odd = (0..hs.len())
            .flat_map(|i| (i + 1..hs.len()).map(move |j| (i, j)))
            .any(|(i, j)| separation_parity(&hs[i], &hs[j]) == SeparationParity::Odd);
        assert!(odd, "{}", f.figure_id);
    }
}

#[test]
fn staircase_holes_all_fold_nontrivially() {
    for k in 1..=6 {
        let p = generate_staircase(k).unwrap();
        let fm = staircase_facemapping(k).unwrap();
        assert_eq!(p.holes().len(), 2 * k as usize + 1);
        for h in p.holes() {
            assert!(!hole_fold_class(&p, &fm, h).is_trivial(), "k={k} {h:?}");
        }
    }
}
