//! Reduction of a polyomino to a witness fixture.
//!
//! A reduction deletes plain two-line bands and outermost lines until the
//! polyomino matches a fixture under some symmetry of the rectangle. The
//! fixture's witness then lifts back through every step: a deleted band
//! returns as a 180° zig-zag and a deleted outer line folds back 180° onto
//! its neighbour.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use crate::constructions::verified_fixtures;
use crate::cube::Dir;
use crate::engine::{lift_contraction, pad_boundary, Facemapping};
use crate::grid::{Band, BandAxis, HoleKind, Polyomino, Symmetry};

/// Upper bound on distinct shapes visited by one reduction.
const STATE_LIMIT: usize = 50_000;

#[derive(Clone, Copy, Debug)]
enum Step {
    Contract(Band),
    Trim(Dir),
}

/// A successful reduction: the fixture reached and the lifted witness.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub fixture_id: String,
    pub facemapping: Facemapping,
}

struct Index {
    by_shape: HashMap<String, (usize, Symmetry)>,
    min_short: i32,
    min_long: i32,
}

fn shape_key(p: &Polyomino) -> String {
    format!("{}x{}:{:?}:{:?}", p.width(), p.height(), p.cuts(), p.removed_cells())
}

fn kinds(p: &Polyomino) -> Vec<HoleKind> {
    let mut k: Vec<HoleKind> = p.holes().iter().map(|h| h.kind()).collect();
    k.sort();
    k
}

fn index() -> &'static Index {
    static INDEX: OnceLock<Index> = OnceLock::new();
    INDEX.get_or_init(|| {
        let mut by_shape = HashMap::new();
        let (mut min_short, mut min_long) = (i32::MAX, i32::MAX);
        for (i, vf) in verified_fixtures().iter().enumerate() {
            let p = &vf.fixture.polyomino;
            min_short = min_short.min(p.width().min(p.height()));
            min_long = min_long.min(p.width().max(p.height()));
            for t in Symmetry::all() {
                by_shape.entry(shape_key(&p.transformed(t))).or_insert((i, t));
            }
        }
        Index { by_shape, min_short, min_long }
    })
}

/// Reduces `p` to a fixture and lifts the fixture's witness back to `p`.
pub fn reduce_to_fixture(p: &Polyomino) -> Option<Reduction> {
    let idx = index();
    let want = kinds(p);
    if !verified_fixtures().iter().any(|vf| kinds(&vf.fixture.polyomino) == want) {
        return None;
    }
    let mut seen = HashSet::new();
    let mut path = Vec::new();
    dfs(p, idx, &mut seen, &mut path)
}

fn dfs(p: &Polyomino, idx: &Index, seen: &mut HashSet<String>, path: &mut Vec<(Polyomino, Step)>) -> Option<Reduction> {
    let key = shape_key(p);
    if !seen.insert(key.clone()) || seen.len() > STATE_LIMIT {
        return None;
    }
    if let Some(&(i, t)) = idx.by_shape.get(&key) {
        let vf = &verified_fixtures()[i];
        if let Some(fm) = lift_path(vf.facemapping.transformed(t), path) {
            return Some(Reduction { fixture_id: vf.fixture.figure_id.clone(), facemapping: fm });
        }
    }
    let (w, h) = (p.width(), p.height());
    for next in moves(p) {
        let (nw, nh) = match next.1 {
            Step::Contract(Band { axis: BandAxis::Rows, .. }) => (w, h - 2),
            Step::Contract(Band { axis: BandAxis::Columns, .. }) => (w - 2, h),
            Step::Trim(Dir::Up | Dir::Down) => (w, h - 1),
            Step::Trim(_) => (w - 1, h),
        };
        if nw.min(nh) < idx.min_short || nw.max(nh) < idx.min_long {
            continue;
        }
        path.push((p.clone(), next.1));
        if let Some(r) = dfs(&next.0, idx, seen, path) {
            return Some(r);
        }
        path.pop();
    }
    None
}

fn moves(p: &Polyomino) -> Vec<(Polyomino, Step)> {
    let mut out = Vec::new();
    for axis in [BandAxis::Rows, BandAxis::Columns] {
        let n = if axis == BandAxis::Rows { p.height() } else { p.width() };
        for index in 0..n - 1 {
            let band = Band { axis, index };
            if let Ok(q) = p.contract_plain_band(band) {
                out.push((q, Step::Contract(band)));
            }
        }
    }
    for side in Dir::ALL {
        if let Ok(q) = p.trim_line(side) {
            out.push((q, Step::Trim(side)));
        }
    }
    out
}

fn lift_path(mut fm: Facemapping, path: &[(Polyomino, Step)]) -> Option<Facemapping> {
    for (orig, step) in path.iter().rev() {
        fm = match *step {
            Step::Contract(band) => lift_contraction(orig, band, &fm).ok()?,
            Step::Trim(side) => pad_boundary(orig, side, &fm).ok()?,
        };
    }
    Some(fm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{covered_faces, is_consistent};
    use crate::grid::{Axis, HoleSpec};

    #[test]
    fn embedded_fixture_reduces_and_lifts() {
        // Two slits one row apart, with room on every side.
        let p = Polyomino::build(
            7,
            7,
            vec![
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 3, y: 1 },
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 4, y: 2 },
            ],
        )
        .unwrap();
        let r = reduce_to_fixture(&p).expect("reducible");
        assert!(is_consistent(&p, &r.facemapping));
        assert_eq!(covered_faces(&r.facemapping).len(), 6);
    }

    #[test]
    fn even_pair_does_not_reduce() {
        let p = Polyomino::build(
            6,
            6,
            vec![
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 1 },
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 3, y: 3 },
            ],
        )
        .unwrap();
        assert!(reduce_to_fixture(&p).is_none());
    }
}
