//! Classification of polyominoes and cooperation of hole sets.
//!
//! [`classify`] walks a ladder of certificates from cheapest to most
//! expensive and falls back to exhaustive search only when no certificate
//! applies. Reason strings name the certificate used:
//!
//! | reason | verdict |
//! |---|---|
//! | `non-simple-hole` | foldable; a hole outside the simple families |
//! | `rectangle-ring-bound` | unfoldable; no holes, so at most four faces |
//! | `fixture-reduction` | foldable; reduces to a shipped fixture |
//! | `staircase-family` | foldable; matches a staircase polyomino |
//! | `three-wide-slits` | unfoldable; slits only and a side of length at most 3 |
//! | `even-separated-slits` | unfoldable; slits only and no odd-separated pair |
//! | `odd-pair-reduction` | foldable; an odd-separated pair reduces to a fixture |
//! | `horizontal-slit-triple` | foldable; narrow, odd vertical pair plus a horizontal slit |
//! | `four-wide-empty-off-central-crease` | unfoldable; width 4, an outer crease without slits |
//! | `four-wide-quadruple` | foldable; width 4, a 1-separated quadruple reduces to a fixture |
//! | `four-wide-no-quadruple` | unfoldable; width 4, no 1-separated quadruple |
//! | `five-wide-central-creases` | unfoldable; width 5, slits only in the central creases |
//! | `five-wide-pair-bound` | unfoldable; width 5, no pair has an onto facemapping |
//! | `square-l-u-pair-bound` | unfoldable; no pair of square/L/U holes has an onto facemapping |
//! | `pair-search` | necessary only; a pair of holes has an onto facemapping |
//! | `no-onto-facemapping` | unfoldable; exhaustive search |
//! | `exhaustive-search` | necessary only; search found an onto facemapping |

pub mod reduce;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::constructions::staircase_verdict;
use crate::engine::{exists_onto_facemapping, Facemapping, SearchConfig, Verdict, Witness};
use crate::grid::{separation_parity, Axis, Cell, HoleKind, HoleSpec, Polyomino, SeparationParity, Symmetry};
pub use reduce::{reduce_to_fixture, Reduction};

/// Default bound on the number of holes in a cooperation sweep.
pub const DEFAULT_HOLE_GUARD: usize = 12;

/// Errors raised by the analyzer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzerError {
    #[error("{0} holes exceed the sweep guard of {1}")]
    GuardExceeded(usize, usize),
    #[error("expected a slit-only polyomino")]
    WrongFamily,
    #[error("hole index {0} out of range")]
    HoleIndex(usize),
}

/// Analyzer options.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzerConfig {
    pub search: SearchConfig,
    /// Treat length-1 slits as never affecting foldability.
    pub slit1_inert: bool,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig { search: SearchConfig::default(), slit1_inert: true }
    }
}

/// Smallest cell rectangle containing a set of holes, inclusive bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Support {
    pub x0: i32,
    pub y0: i32,
    pub x1: i32,
    pub y1: i32,
}

impl Support {
    pub fn overlaps(&self, other: &Support) -> bool {
        self.x0 <= other.x1 && other.x0 <= self.x1 && self.y0 <= other.y1 && other.y0 <= self.y1
    }
}

/// Bounding rectangle of the removed cells and the cells beside every cut.
pub fn support(p: &Polyomino, holes: &BTreeSet<usize>) -> Result<Option<Support>, AnalyzerError> {
    let mut cells: Vec<Cell> = Vec::new();
    for &i in holes {
        let h = p.holes().get(i).ok_or(AnalyzerError::HoleIndex(i))?;
        let (removed, cuts) = h.expand();
        cells.extend(removed);
        for s in cuts {
            let (a, b) = s.cells();
            cells.extend([a, b]);
        }
    }
    Ok(cells.iter().fold(None, |acc: Option<Support>, c| {
        Some(match acc {
            None => Support { x0: c.x, y0: c.y, x1: c.x, y1: c.y },
            Some(s) => Support { x0: s.x0.min(c.x), y0: s.y0.min(c.y), x1: s.x1.max(c.x), y1: s.y1.max(c.y) },
        })
    }))
}

fn odd_pairs(p: &Polyomino) -> Vec<(usize, usize)> {
    let hs = p.holes();
    let mut out = Vec::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            if separation_parity(&hs[i], &hs[j]) == SeparationParity::Odd {
                out.push((i, j));
            }
        }
    }
    out
}

/// True when some two slits of the same axis are odd-separated.
pub fn odd_pair_exists(p: &Polyomino) -> Result<bool, AnalyzerError> {
    if !p.holes().iter().all(HoleSpec::is_slit) {
        return Err(AnalyzerError::WrongFamily);
    }
    Ok(!odd_pairs(p).is_empty())
}

fn vertical_slit(h: &HoleSpec) -> Option<(i32, i32)> {
    match *h {
        HoleSpec::Slit2 { axis: Axis::Vertical, x, y } => Some((x, y)),
        _ => None,
    }
}

fn quadruples(p: &Polyomino) -> Vec<[usize; 4]> {
    if p.width() != 4 {
        return vec![];
    }
    let slits: Vec<(usize, i32, i32)> =
        p.holes().iter().enumerate().filter_map(|(i, h)| vertical_slit(h).map(|(x, y)| (i, x, y))).collect();
    let column = |cx: i32| -> Vec<(usize, i32)> {
        slits.iter().filter(|s| s.1 == cx).map(|s| (s.0, s.2)).collect()
    };
    let (left, centre, right) = (column(1), column(2), column(3));
    let paired = |side: &[(usize, i32)]| -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for &(i, yi) in side {
            for &(c, yc) in &centre {
                if (yi - yc).abs() == 1 {
                    v.push((i, c));
                }
            }
        }
        v
    };
    let mut out = Vec::new();
    for (l, c1) in paired(&left) {
        for (r, c2) in paired(&right) {
            out.push([l, c1, r, c2]);
        }
    }
    out
}

/// In a width-4 slit polyomino, a slit in the left crease and a slit in the
/// right crease, each one row off a slit in the central crease, returned
/// as `[left, central, right, central]`.
pub fn four_by_n_quadruple(p: &Polyomino) -> Result<Option<[usize; 4]>, AnalyzerError> {
    if !p.holes().iter().all(HoleSpec::is_slit) {
        return Err(AnalyzerError::WrongFamily);
    }
    Ok(quadruples(p).into_iter().next())
}

/// Keeps only the placements of cells present in `p`.
fn restrict(fm: &Facemapping, p: &Polyomino) -> Facemapping {
    let mut out = fm.clone();
    for x in 0..p.width() {
        for y in 0..p.height() {
            let c = Cell::new(x, y);
            if !p.is_present(c) {
                out.set(c, None);
            }
        }
    }
    out
}

fn keep(indices: &[usize]) -> BTreeSet<usize> {
    indices.iter().copied().collect()
}

fn certified(reason: &str, r: Reduction, p: &Polyomino) -> Verdict {
    Verdict::FoldableCertified {
        reason: reason.into(),
        fixture: Some(r.fixture_id),
        witness: Some(Witness { facemapping: restrict(&r.facemapping, p), layers: None }),
    }
}

fn unfoldable(reason: &str) -> Verdict {
    Verdict::UnfoldableCertified { reason: reason.into() }
}

/// Maps a verdict computed in a transformed frame back to the original.
fn untransform(v: Verdict, back: Symmetry) -> Verdict {
    let map = |w: Witness| Witness { facemapping: w.facemapping.transformed(back), layers: w.layers };
    match v {
        Verdict::FoldableCertified { reason, fixture, witness } => {
            Verdict::FoldableCertified { reason, fixture, witness: witness.map(map) }
        }
        Verdict::FacemappingExists { reason, witness } => Verdict::FacemappingExists { reason, witness: map(witness) },
        v => v,
    }
}

/// Classifies a polyomino with the default configuration.
pub fn classify(p: &Polyomino) -> Verdict {
    classify_with(p, &AnalyzerConfig::default())
}

/// Classifies a polyomino.
pub fn classify_with(p: &Polyomino, cfg: &AnalyzerConfig) -> Verdict {
    if p.holes().iter().any(|h| h.kind() == HoleKind::Raw) {
        return Verdict::FoldableCertified { reason: "non-simple-hole".into(), fixture: None, witness: None };
    }
    let q = if cfg.slit1_inert {
        let kept: BTreeSet<usize> =
            p.holes().iter().enumerate().filter(|(_, h)| h.kind() != HoleKind::Slit1).map(|(i, _)| i).collect();
        p.fill_holes(&kept).expect("subsets of valid holes stay valid")
    } else {
        p.clone()
    };
    if q.holes().is_empty() {
        return unfoldable("rectangle-ring-bound");
    }
    if let Some(v) = staircase_match(&q) {
        return v;
    }
    if let Some(r) = reduce_to_fixture(&q) {
        return certified("fixture-reduction", r, &q);
    }
    let kinds: BTreeSet<HoleKind> = q.holes().iter().map(|h| h.kind()).collect();
    if kinds.iter().all(|&k| k == HoleKind::Slit2) {
        slit_ladder(&q, cfg)
    } else if kinds.iter().all(|k| matches!(k, HoleKind::Square | HoleKind::L | HoleKind::U)) {
        pair_scan(&q, cfg)
    } else {
        exists_onto_facemapping(&q, &cfg.search)
    }
}

fn staircase_match(q: &Polyomino) -> Option<Verdict> {
    for t in Symmetry::all() {
        let r = q.transformed(t);
        if r.height() != 4 || r.width() < 6 || (r.width() - 2) % 4 != 0 {
            continue;
        }
        let k = ((r.width() - 2) / 4) as u32;
        let s = crate::constructions::generate_staircase(k).ok()?;
        if s.same_shape(&r) {
            return staircase_verdict(k).map(|v| untransform(v, t.inverse()));
        }
    }
    None
}

fn slit_ladder(q: &Polyomino, cfg: &AnalyzerConfig) -> Verdict {
    if q.width().min(q.height()) <= 3 {
        return unfoldable("three-wide-slits");
    }
    let pairs = odd_pairs(q);
    if pairs.is_empty() {
        return unfoldable("even-separated-slits");
    }
    for &(i, j) in &pairs {
        let r = q.fill_holes(&keep(&[i, j])).expect("valid subset");
        if let Some(red) = reduce_to_fixture(&r) {
            return certified("odd-pair-reduction", red, q);
        }
    }
    let (i, _) = pairs[0];
    let t = match q.holes()[i] {
        HoleSpec::Slit2 { axis: Axis::Horizontal, .. } => Symmetry::TRANSPOSE,
        _ => Symmetry::IDENTITY,
    };
    let f = q.transformed(t);
    if !(4..=5).contains(&f.width()) {
        return exists_onto_facemapping(q, &cfg.search);
    }
    untransform(narrow_ladder(&f, cfg), t.inverse())
}

/// Width 4 or 5 with an odd-separated vertical pair that reduces to no fixture.
fn narrow_ladder(f: &Polyomino, cfg: &AnalyzerConfig) -> Verdict {
    let holes = f.holes();
    let horizontal: Vec<usize> = (0..holes.len()).filter(|&i| vertical_slit(&holes[i]).is_none()).collect();
    let vertical_pairs: Vec<(usize, usize)> = odd_pairs(f)
        .into_iter()
        .filter(|&(i, _)| vertical_slit(&holes[i]).is_some())
        .collect();
    if !horizontal.is_empty() {
        for &(i, j) in &vertical_pairs {
            for &h in &horizontal {
                let r = f.fill_holes(&keep(&[i, j, h])).expect("valid subset");
                if let Some(red) = reduce_to_fixture(&r) {
                    return certified("horizontal-slit-triple", red, f);
                }
            }
        }
        return exists_onto_facemapping(f, &cfg.search);
    }
    for &(i, j) in &vertical_pairs {
        let r = f.fill_holes(&keep(&[i, j])).expect("valid subset");
        match exists_onto_facemapping(&r, &cfg.search) {
            Verdict::UnfoldableCertified { .. } => {}
            Verdict::FacemappingExists { witness, .. } => {
                return Verdict::FacemappingExists {
                    reason: "pair-search".into(),
                    witness: Witness { facemapping: restrict(&witness.facemapping, f), layers: None },
                };
            }
            v => return v,
        }
    }
    let in_crease = |cx: i32| holes.iter().filter(|h| vertical_slit(h).map(|s| s.0) == Some(cx)).count();
    if f.width() == 4 {
        if in_crease(1) == 0 || in_crease(3) == 0 {
            return unfoldable("four-wide-empty-off-central-crease");
        }
        let quads = quadruples(f);
        if quads.is_empty() {
            return unfoldable("four-wide-no-quadruple");
        }
        for qd in quads {
            let r = f.fill_holes(&keep(&qd)).expect("valid subset");
            if let Some(red) = reduce_to_fixture(&r) {
                return certified("four-wide-quadruple", red, f);
            }
        }
        return exists_onto_facemapping(f, &cfg.search);
    }
    let central_only = in_crease(1) == 0 && in_crease(4) == 0;
    let same_crease_even = odd_pairs(f).iter().all(|&(i, j)| {
        vertical_slit(&holes[i]).map(|s| s.0) != vertical_slit(&holes[j]).map(|s| s.0)
    });
    if central_only && same_crease_even {
        unfoldable("five-wide-central-creases")
    } else {
        unfoldable("five-wide-pair-bound")
    }
}

fn pair_scan(q: &Polyomino, cfg: &AnalyzerConfig) -> Verdict {
    let n = q.holes().len();
    let subsets: Vec<Vec<usize>> = if n == 1 {
        vec![vec![0]]
    } else {
        (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect()
    };
    let mut unknown = None;
    for s in subsets {
        let r = q.fill_holes(&keep(&s)).expect("valid subset");
        match exists_onto_facemapping(&r, &cfg.search) {
            Verdict::UnfoldableCertified { .. } => {}
            Verdict::FacemappingExists { witness, .. } => {
                return Verdict::FacemappingExists {
                    reason: "pair-search".into(),
                    witness: Witness { facemapping: restrict(&witness.facemapping, q), layers: None },
                };
            }
            v => unknown = Some(v),
        }
    }
    unknown.unwrap_or_else(|| unfoldable("square-l-u-pair-bound"))
}

/// Where a cooperation answer comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name")]
pub enum Provenance {
    TheoremReduction(String),
    FixtureReachable(String),
    ExhaustiveSearch,
    SearchNecessaryOnly,
    /// Inferred because a subset already cooperates.
    Superset(Vec<usize>),
    NodeLimit,
}

/// Whether a set of holes cooperates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", content = "provenance")]
pub enum Cooperation {
    Yes(Provenance),
    No(Provenance),
    NecessaryOnly(Provenance),
    Unknown(Provenance),
}

impl Cooperation {
    /// True for `Yes` and `NecessaryOnly`.
    pub fn is_positive(&self) -> bool {
        matches!(self, Cooperation::Yes(_) | Cooperation::NecessaryOnly(_))
    }
}

fn cooperation_of(v: Verdict) -> Cooperation {
    match v {
        Verdict::FoldableCertified { reason, fixture, .. } => Cooperation::Yes(match fixture {
            Some(id) => Provenance::FixtureReachable(id),
            None => Provenance::TheoremReduction(reason),
        }),
        Verdict::UnfoldableCertified { reason } if reason == "no-onto-facemapping" => {
            Cooperation::No(Provenance::ExhaustiveSearch)
        }
        Verdict::UnfoldableCertified { reason } => Cooperation::No(Provenance::TheoremReduction(reason)),
        Verdict::FacemappingExists { .. } => Cooperation::NecessaryOnly(Provenance::SearchNecessaryOnly),
        Verdict::Unknown { .. } => Cooperation::Unknown(Provenance::NodeLimit),
    }
}

/// Whether the holes in `set` cooperate: classifies the polyomino with all
/// other holes filled.
pub fn cooperates(p: &Polyomino, set: &BTreeSet<usize>) -> Result<Cooperation, AnalyzerError> {
    cooperates_with(p, set, &AnalyzerConfig::default())
}

pub fn cooperates_with(p: &Polyomino, set: &BTreeSet<usize>, cfg: &AnalyzerConfig) -> Result<Cooperation, AnalyzerError> {
    if let Some(&i) = set.iter().find(|&&i| i >= p.holes().len()) {
        return Err(AnalyzerError::HoleIndex(i));
    }
    let filled = p.fill_holes(set).expect("subsets of valid holes stay valid");
    Ok(cooperation_of(classify_with(&filled, cfg)))
}

/// One evaluated or inferred set in a sweep.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetReport {
    pub holes: Vec<usize>,
    pub cooperation: Cooperation,
}

/// Result of [`minimally_cooperating_sets`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooperationReport {
    pub hole_count: usize,
    pub max_set_size: usize,
    /// Every cooperating set found, by size then lexicographically.
    pub cooperating_sets: Vec<SetReport>,
    /// Cooperating sets none of whose proper subsets cooperate.
    pub minimal_sets: Vec<SetReport>,
    /// Sets whose answer was unknown.
    pub unknown_sets: Vec<Vec<usize>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Sweeps hole subsets by size and reports the minimally cooperating ones.
pub fn minimally_cooperating_sets(p: &Polyomino, max_set_size: usize) -> Result<CooperationReport, AnalyzerError> {
    minimally_cooperating_sets_with(p, max_set_size, DEFAULT_HOLE_GUARD, &AnalyzerConfig::default())
}

pub fn minimally_cooperating_sets_with(
    p: &Polyomino,
    max_set_size: usize,
    guard: usize,
    cfg: &AnalyzerConfig,
) -> Result<CooperationReport, AnalyzerError> {
    let n = p.holes().len();
    if n > guard {
        return Err(AnalyzerError::GuardExceeded(n, guard));
    }
    let max = max_set_size.min(n);
    let mut cooperating: Vec<SetReport> = Vec::new();
    let mut minimal: Vec<SetReport> = Vec::new();
    let mut unknown = Vec::new();
    for k in 0..=max {
        let level = combinations(n, k);
        let fresh: Vec<&Vec<usize>> = level
            .iter()
            .filter(|s| !cooperating.iter().any(|c| c.holes.iter().all(|h| s.contains(h))))
            .collect();
        let answers: Vec<Cooperation> = fresh
            .par_iter()
            .map(|s| cooperates_with(p, &keep(s), cfg).expect("indices in range"))
            .collect();
        let mut evaluated = fresh.into_iter().zip(answers);
        let mut next = Vec::new();
        for s in &level {
            if let Some(sub) = cooperating.iter().find(|c| c.holes.iter().all(|h| s.contains(h))) {
                let inferred = match &sub.cooperation {
                    Cooperation::Yes(_) => Cooperation::Yes(Provenance::Superset(sub.holes.clone())),
                    _ => Cooperation::NecessaryOnly(Provenance::Superset(sub.holes.clone())),
                };
                next.push(SetReport { holes: s.clone(), cooperation: inferred });
                continue;
            }
            let (_, answer) = evaluated.next().expect("one answer per fresh set");
            match answer {
                c if c.is_positive() => {
                    let r = SetReport { holes: s.clone(), cooperation: c };
                    minimal.push(r.clone());
                    next.push(r);
                }
                Cooperation::Unknown(_) => unknown.push(s.clone()),
                _ => {}
            }
        }
        cooperating.extend(next);
    }
    Ok(CooperationReport {
        hole_count: n,
        max_set_size: max,
        cooperating_sets: cooperating,
        minimal_sets: minimal,
        unknown_sets: unknown,
    })
}
