//! Local crease rules and their propagation.
//!
//! Every rule relates two attached creases: either they carry equal angles
//! or they are not both 90°. Rules come from two local patterns:
//!
//! - an interior vertex whose four creases are attached: collinear creases
//!   agree and the two crossing lines are not both 90°;
//! - a 2-slit in a clean 2×4 neighbourhood: the creases continuing the slit
//!   agree, the two halves of the crease through its centre agree, and the
//!   continuing crease and the centre crease are not both 90°.
//!
//! Both patterns are checked exhaustively against every consistent
//! facemapping of the isolated block in the tests below.

use std::collections::{BTreeMap, VecDeque};

use crate::cube::FoldAngle;
use crate::grid::{Axis, Cell, HoleSpec, Polyomino, Segment};

/// A partial assignment of angles to attached creases.
pub type CreaseAssignment = BTreeMap<Segment, FoldAngle>;

/// Two rules forced different angles onto one crease.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("conflicting angles forced on crease {crease}")]
pub struct Conflict {
    pub crease: Segment,
}

/// A binary constraint between two creases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Equal(Segment, Segment),
    NotBoth90(Segment, Segment),
}

impl Rule {
    pub fn creases(self) -> (Segment, Segment) {
        match self {
            Rule::Equal(a, b) | Rule::NotBoth90(a, b) => (a, b),
        }
    }

    /// True when the two angles satisfy the rule.
    pub fn holds(self, a: FoldAngle, b: FoldAngle) -> bool {
        match self {
            Rule::Equal(..) => a == b,
            Rule::NotBoth90(..) => !(a == FoldAngle::Fold90 && b == FoldAngle::Fold90),
        }
    }

    /// The angle forced on the other crease once one side is known.
    fn force(self, known: FoldAngle) -> Option<FoldAngle> {
        match self {
            Rule::Equal(..) => Some(known),
            Rule::NotBoth90(..) => (known == FoldAngle::Fold90).then_some(FoldAngle::Fold180),
        }
    }
}

/// Rules of the four creases around an interior vertex.
pub fn vertex_rules(p: &Polyomino, (x, y): (i32, i32)) -> Vec<Rule> {
    let left = Segment::h(x - 1, y);
    let right = Segment::h(x, y);
    let down = Segment::v(x, y - 1);
    let up = Segment::v(x, y);
    if [left, right, down, up].iter().all(|&s| p.is_attached(s)) {
        vec![Rule::Equal(left, right), Rule::Equal(down, up), Rule::NotBoth90(left, down)]
    } else {
        vec![]
    }
}

/// Rules of a vertical 2-slit whose top-left cut starts at `(x, y)`, in a
/// polyomino already transposed so that the slit is vertical.
fn vertical_slit_rules(p: &Polyomino, x: i32, y: i32) -> Option<[Rule; 3]> {
    let cells = (x - 1..=x).flat_map(|cx| (y - 1..=y + 2).map(move |cy| Cell::new(cx, cy)));
    if !cells.into_iter().all(|c| p.is_present(c)) {
        return None;
    }
    let below = Segment::v(x, y - 1);
    let above = Segment::v(x, y + 2);
    let mut inner = vec![below, above];
    for cx in [x - 1, x] {
        inner.extend((y..=y + 2).map(|cy| Segment::h(cx, cy)));
    }
    if !inner.iter().all(|&s| p.is_attached(s)) {
        return None;
    }
    let centre_left = Segment::h(x - 1, y + 1);
    let centre_right = Segment::h(x, y + 1);
    Some([
        Rule::Equal(below, above),
        Rule::Equal(centre_left, centre_right),
        Rule::NotBoth90(above, centre_left),
    ])
}

fn transpose_segment(s: Segment) -> Segment {
    match s.axis {
        Axis::Vertical => Segment::h(s.y, s.x),
        Axis::Horizontal => Segment::v(s.y, s.x),
    }
}

fn transpose_rule(r: Rule) -> Rule {
    match r {
        Rule::Equal(a, b) => Rule::Equal(transpose_segment(a), transpose_segment(b)),
        Rule::NotBoth90(a, b) => Rule::NotBoth90(transpose_segment(a), transpose_segment(b)),
    }
}

/// Rules contributed by a 2-slit hole, if its neighbourhood is clean.
pub fn slit_rules(p: &Polyomino, hole: &HoleSpec) -> Vec<Rule> {
    match *hole {
        HoleSpec::Slit2 { axis: Axis::Vertical, x, y } => {
            vertical_slit_rules(p, x, y).map(Vec::from).unwrap_or_default()
        }
        HoleSpec::Slit2 { axis: Axis::Horizontal, x, y } => {
            let t = p.transformed(crate::grid::Symmetry::TRANSPOSE);
            vertical_slit_rules(&t, y, x)
                .map(|rs| rs.into_iter().map(transpose_rule).collect())
                .unwrap_or_default()
        }
        _ => vec![],
    }
}

/// Every rule that applies to the polyomino, deduplicated.
pub fn all_rules(p: &Polyomino) -> Vec<Rule> {
    let mut out = Vec::new();
    for x in 1..p.width() {
        for y in 1..p.height() {
            out.extend(vertex_rules(p, (x, y)));
        }
    }
    for h in p.holes() {
        out.extend(slit_rules(p, h));
    }
    out.sort();
    out.dedup();
    out
}

/// Extends `partial` to the fixpoint of the rules, or reports a conflict.
pub fn propagate(p: &Polyomino, partial: &CreaseAssignment) -> Result<CreaseAssignment, Conflict> {
    let rules = all_rules(p);
    let mut by_crease: BTreeMap<Segment, Vec<Rule>> = BTreeMap::new();
    for &r in &rules {
        let (a, b) = r.creases();
        by_crease.entry(a).or_default().push(r);
        by_crease.entry(b).or_default().push(r);
    }
    let mut out = partial.clone();
    let mut queue: VecDeque<Segment> = partial.keys().copied().collect();
    while let Some(s) = queue.pop_front() {
        let known = out[&s];
        for &r in by_crease.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
            let (a, b) = r.creases();
            let other = if a == s { b } else { a };
            match out.get(&other) {
                Some(&v) if !r.holds(known, v) => return Err(Conflict { crease: other }),
                Some(_) => {}
                None => {
                    if let Some(v) = r.force(known) {
                        out.insert(other, v);
                        queue.push_back(other);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Rules indexed by crease number for the search engine.
pub(crate) struct RuleIndex {
    /// For each crease, the rules touching it as `(other crease, is_equal)`.
    pub(crate) adjacent: Vec<Vec<(usize, bool)>>,
}

impl RuleIndex {
    pub(crate) fn new(p: &Polyomino, crease_index: &BTreeMap<Segment, usize>) -> RuleIndex {
        let mut adjacent = vec![Vec::new(); crease_index.len()];
        for r in all_rules(p) {
            let (a, b) = r.creases();
            let (Some(&ia), Some(&ib)) = (crease_index.get(&a), crease_index.get(&b)) else {
                continue;
            };
            let eq = matches!(r, Rule::Equal(..));
            adjacent[ia].push((ib, eq));
            adjacent[ib].push((ia, eq));
        }
        RuleIndex { adjacent }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{brute_force_facemappings, implied_angle, SearchConfig};
    use FoldAngle::*;

    fn audit(p: &Polyomino, rules: &[Rule]) -> usize {
        let all = brute_force_facemappings(p, &SearchConfig::default()).unwrap();
        assert!(!all.is_empty());
        for fm in &all {
            for &r in rules {
                let (a, b) = r.creases();
                let (va, vb) = (implied_angle(p, fm, a).unwrap(), implied_angle(p, fm, b).unwrap());
                assert!(r.holds(va, vb), "{r:?} fails on\n{fm:?}");
            }
        }
        all.len()
    }

    #[test]
    fn vertex_rules_hold_on_every_two_by_two_folding() {
        let p = Polyomino::build(2, 2, vec![]).unwrap();
        let rules = vertex_rules(&p, (1, 1));
        assert_eq!(rules.len(), 3);
        audit(&p, &rules);
    }

    #[test]
    fn slit_rules_hold_on_every_isolated_slit_block() {
        let slit = HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 1 };
        let p = Polyomino::build(2, 4, vec![slit.clone()]).unwrap();
        let rules = slit_rules(&p, &slit);
        assert_eq!(rules.len(), 3);
        audit(&p, &rules);
        let slit = HoleSpec::Slit2 { axis: Axis::Horizontal, x: 1, y: 1 };
        let p = Polyomino::build(4, 2, vec![slit.clone()]).unwrap();
        let rules = slit_rules(&p, &slit);
        assert_eq!(rules.len(), 3);
        audit(&p, &rules);
    }

    #[test]
    fn hole_free_rectangle_propagates_a_ninety_degree_column() {
        let p = Polyomino::build(3, 3, vec![]).unwrap();
        let start = CreaseAssignment::from([(Segment::v(1, 0), Fold90)]);
        let out = propagate(&p, &start).unwrap();
        for y in 0..3 {
            assert_eq!(out[&Segment::v(1, y)], Fold90);
        }
        for x in 0..3 {
            for y in 1..3 {
                assert_eq!(out[&Segment::h(x, y)], Fold180);
            }
        }
    }

    #[test]
    fn slit_propagates_across_and_detects_conflict() {
        let slit = HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 1 };
        let p = Polyomino::build(4, 4, vec![slit]).unwrap();
        let out = propagate(&p, &CreaseAssignment::from([(Segment::v(2, 3), Fold180)])).unwrap();
        assert_eq!(out[&Segment::v(2, 0)], Fold180);
        let bad = CreaseAssignment::from([(Segment::v(2, 3), Fold90), (Segment::h(1, 2), Fold90)]);
        assert!(propagate(&p, &bad).is_err());
    }
}
