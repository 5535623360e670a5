//! How a facemapping folds each hole.
//!
//! A hole folds trivially when the facemapping extends across it as if it
//! were filled: every cut edge relates its two cells by a roll or flip, and
//! every removed cell admits a placement consistent with its neighbours.

use serde::{Deserialize, Serialize};

use super::{relation_across, Facemapping};
use crate::cube::{all_placements, Dir, FoldAngle, Placement};
use crate::grid::{Axis, Cell, HoleSpec, Polyomino, Segment};

/// Fold class of one hole under a facemapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HoleFoldClass {
    Trivial,
    /// A 2-slit whose central crease is folded 180°.
    SlitFlap,
    /// A 2-slit whose central crease is folded 90°.
    SlitRing,
    SquareNontrivial,
    LNontrivial,
    /// A U hole whose surrounding ring does not close around the flap cell.
    UAsUnitSquare,
    /// A U hole whose surrounding ring closes but whose flap diverges.
    UTFolded,
    /// Any other hole folded non-trivially.
    Nontrivial,
}

impl HoleFoldClass {
    pub fn is_trivial(self) -> bool {
        self == HoleFoldClass::Trivial
    }
}

/// True when the cells in `fill` can be placed so that every edge listed
/// in `edges` relates its cells, given the placements in `fm`.
fn extends(fm: &Facemapping, fill: &[Cell], edges: &[Segment]) -> bool {
    let mut fm = fm.clone();
    for &c in fill {
        fm.set(c, None);
    }
    fn go(fm: &mut Facemapping, fill: &[Cell], edges: &[Segment], k: usize) -> bool {
        let placed_ok = |fm: &Facemapping| {
            edges.iter().all(|&e| {
                let (a, b) = e.cells();
                fm.get(a).is_none() || fm.get(b).is_none() || relation_across(fm, e).is_some()
            })
        };
        if k == fill.len() {
            return placed_ok(fm);
        }
        for &pl in all_placements() {
            fm.set(fill[k], Some(pl));
            if placed_ok(fm) && go(fm, fill, edges, k + 1) {
                return true;
            }
        }
        fm.set(fill[k], None);
        false
    }
    go(&mut fm, fill, edges, 0)
}

fn cell_edges(c: Cell) -> Vec<Segment> {
    Dir::ALL.iter().map(|&d| c.edge(d)).collect()
}

/// True when the hole folds as if filled.
pub fn is_trivial(p: &Polyomino, fm: &Facemapping, hole: &HoleSpec) -> bool {
    let (removed, cuts) = hole.expand();
    let mut edges = cuts;
    for &c in &removed {
        edges.extend(cell_edges(c));
    }
    edges.retain(|&e| {
        let (a, b) = e.cells();
        p.in_bounds(a) && p.in_bounds(b)
    });
    edges.sort();
    edges.dedup();
    extends(fm, &removed, &edges)
}

/// Classifies how `fm` folds `hole`.
pub fn hole_fold_class(p: &Polyomino, fm: &Facemapping, hole: &HoleSpec) -> HoleFoldClass {
    if is_trivial(p, fm, hole) {
        return HoleFoldClass::Trivial;
    }
    match *hole {
        HoleSpec::Slit2 { axis, x, y } => {
            let centre = match axis {
                Axis::Vertical => Segment::h(x - 1, y + 1),
                Axis::Horizontal => Segment::v(x + 1, y - 1),
            };
            match relation_across(fm, centre) {
                Some(FoldAngle::Fold90) => HoleFoldClass::SlitRing,
                _ => HoleFoldClass::SlitFlap,
            }
        }
        HoleSpec::Slit1 { .. } | HoleSpec::Raw { .. } => HoleFoldClass::Nontrivial,
        HoleSpec::Square { .. } => HoleFoldClass::SquareNontrivial,
        HoleSpec::L { .. } => HoleFoldClass::LNontrivial,
        HoleSpec::U { x, y, .. } => {
            let flap = Cell::new(x, y);
            if extends(fm, &[flap], &cell_edges(flap)) {
                HoleFoldClass::UTFolded
            } else {
                HoleFoldClass::UAsUnitSquare
            }
        }
    }
}

/// Placement a removed cell would need, if one fits all its neighbours.
pub fn filling_placement(fm: &Facemapping, c: Cell) -> Option<Placement> {
    let edges = cell_edges(c);
    let mut fm = fm.clone();
    all_placements().iter().copied().find(|&pl| {
        fm.set(c, Some(pl));
        edges.iter().all(|&e| {
            let (a, b) = e.cells();
            fm.get(a).is_none() || fm.get(b).is_none() || relation_across(&fm, e).is_some()
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{collect_facemappings, is_consistent, SearchConfig};
    use std::collections::BTreeSet;

    fn all(p: &Polyomino) -> Vec<Facemapping> {
        collect_facemappings(p, &SearchConfig { enumerate_all: true, ..SearchConfig::default() }).unwrap().0
    }

    #[test]
    fn punched_filled_facemappings_fold_the_square_trivially() {
        let fms = all(&Polyomino::build(3, 3, vec![]).unwrap());
        assert!(!fms.is_empty());
        let sq = Polyomino::build(3, 3, vec![HoleSpec::Square { x: 1, y: 1 }]).unwrap();
        for fm in fms {
            let mut punched = fm.clone();
            punched.set(Cell::new(1, 1), None);
            assert!(is_consistent(&sq, &punched));
            assert_eq!(hole_fold_class(&sq, &punched, &sq.holes()[0]), HoleFoldClass::Trivial);
        }
    }

    #[test]
    fn trivial_holes_match_the_filled_polyomino() {
        let slit = HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 1 };
        let p = Polyomino::build(3, 4, vec![slit.clone()]).unwrap();
        let filled = p.fill_holes(&BTreeSet::new()).unwrap();
        let mut expected = all(&filled);
        expected.sort();
        let mut trivial: Vec<Facemapping> =
            all(&p).into_iter().filter(|fm| is_trivial(&p, fm, &slit)).collect();
        trivial.sort();
        assert_eq!(trivial, expected);
    }

    #[test]
    fn nontrivial_slits_split_by_central_crease() {
        let slit = HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 1 };
        let p = Polyomino::build(2, 4, vec![slit.clone()]).unwrap();
        let classes: BTreeSet<_> = all(&p).iter().map(|fm| format!("{:?}", hole_fold_class(&p, fm, &slit))).collect();
        assert!(classes.contains("SlitFlap"));
        assert!(classes.contains("Trivial"));
    }
}
