//! Witness fixtures and the staircase family.
//!
//! Fixtures are shipped as text files: the polyomino in the grid text
//! format, then a `faces:` block of face labels (top row first, `.` for
//! removed cells) and an optional `layers:` block. Two extra directives are
//! understood before the blocks: `coverage N` declares how many faces the
//! witness covers (6 by default) and `expect no-onto` marks a negative
//! fixture that has no onto facemapping at all.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::cube::FaceLabel;
use crate::engine::{
    check_layers, covered_faces, exists_onto_facemapping, hole_fold_class, infer_orientations,
    is_consistent, Facemapping, LayerMapping, SearchConfig, Verdict,
};
use crate::grid::{Axis, Cell, GridError, HoleSpec, Polyomino};

/// A polyomino with a recorded witness folding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub figure_id: String,
    pub polyomino: Polyomino,
    pub face_labels: BTreeMap<Cell, FaceLabel>,
    pub layer_labels: Option<BTreeMap<Cell, u32>>,
    /// Number of faces the witness covers.
    pub coverage: usize,
    /// False for negative fixtures that must have no onto facemapping.
    pub expect_onto: bool,
}

/// Errors from reading a fixture file.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("line {line}: {message}")]
    Block { line: usize, message: String },
    #[error("unknown fixture `{0}`")]
    Unknown(String),
}

const SOURCES: &[(&str, &str)] = &[
    ("fig2", include_str!("../fixtures/fig2.poly")),
    ("fig3", include_str!("../fixtures/fig3.poly")),
    ("fig5a", include_str!("../fixtures/fig5a.poly")),
    ("fig5b", include_str!("../fixtures/fig5b.poly")),
    ("fig5c", include_str!("../fixtures/fig5c.poly")),
    ("fig5d", include_str!("../fixtures/fig5d.poly")),
    ("fig5e", include_str!("../fixtures/fig5e.poly")),
    ("fig5f", include_str!("../fixtures/fig5f.poly")),
    ("fig5g", include_str!("../fixtures/fig5g.poly")),
    ("fig6a", include_str!("../fixtures/fig6a.poly")),
    ("fig6b", include_str!("../fixtures/fig6b.poly")),
    ("fig6c", include_str!("../fixtures/fig6c.poly")),
    ("fig6d", include_str!("../fixtures/fig6d.poly")),
    ("fig6e", include_str!("../fixtures/fig6e.poly")),
    ("fig6f", include_str!("../fixtures/fig6f.poly")),
    ("fig6g", include_str!("../fixtures/fig6g.poly")),
    ("fig6h", include_str!("../fixtures/fig6h.poly")),
    ("fig6i", include_str!("../fixtures/fig6i.poly")),
    ("fig6j", include_str!("../fixtures/fig6j.poly")),
    ("fig6k", include_str!("../fixtures/fig6k.poly")),
    ("fig6l", include_str!("../fixtures/fig6l.poly")),
    ("fig6m", include_str!("../fixtures/fig6m.poly")),
    ("fig7a", include_str!("../fixtures/fig7a.poly")),
    ("fig7b", include_str!("../fixtures/fig7b.poly")),
    ("fig7c", include_str!("../fixtures/fig7c.poly")),
    ("fig7d", include_str!("../fixtures/fig7d.poly")),
    ("fig7e", include_str!("../fixtures/fig7e.poly")),
    ("fig7f", include_str!("../fixtures/fig7f.poly")),
    ("fig8", include_str!("../fixtures/fig8.poly")),
    ("fig9", include_str!("../fixtures/fig9.poly")),
];

/// Parses one fixture file.
pub fn parse_fixture(figure_id: &str, text: &str) -> Result<Fixture, FixtureError> {
    let mut header = String::new();
    let mut coverage = 6;
    let mut expect_onto = true;
    let mut faces: Vec<(usize, Vec<&str>)> = Vec::new();
    let mut layers: Vec<(usize, Vec<&str>)> = Vec::new();
    let mut block = 0;
    for (ln, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            [] => header.push('\n'),
            ["faces:"] => block = 1,
            ["layers:"] => block = 2,
            _ if block == 1 => faces.push((ln + 1, toks)),
            _ if block == 2 => layers.push((ln + 1, toks)),
            ["coverage", n] => {
                coverage = n.parse().map_err(|_| FixtureError::Block {
                    line: ln + 1,
                    message: format!("bad coverage `{n}`"),
                })?;
                header.push('\n');
            }
            ["expect", "no-onto"] => {
                expect_onto = false;
                header.push('\n');
            }
            _ => {
                header.push_str(line);
                header.push('\n');
            }
        }
    }
    let polyomino = Polyomino::parse(&header)?;
    let face_labels = read_block(&polyomino, &faces, |t| t.parse::<FaceLabel>().ok().filter(|f| (1..=6).contains(f)))?;
    let layer_labels = if layers.is_empty() {
        None
    } else {
        Some(read_block(&polyomino, &layers, |t| t.parse::<u32>().ok().filter(|&l| l > 0))?)
    };
    Ok(Fixture { figure_id: figure_id.to_string(), polyomino, face_labels, layer_labels, coverage, expect_onto })
}

fn read_block<T>(
    p: &Polyomino,
    rows: &[(usize, Vec<&str>)],
    value: impl Fn(&str) -> Option<T>,
) -> Result<BTreeMap<Cell, T>, FixtureError> {
    let mut out = BTreeMap::new();
    if rows.is_empty() {
        return Ok(out);
    }
    if rows.len() != p.height() as usize {
        return Err(FixtureError::Block {
            line: rows[0].0,
            message: format!("expected {} rows, found {}", p.height(), rows.len()),
        });
    }
    for (i, (line, toks)) in rows.iter().enumerate() {
        let y = p.height() - 1 - i as i32;
        if toks.len() != p.width() as usize {
            return Err(FixtureError::Block {
                line: *line,
                message: format!("expected {} entries, found {}", p.width(), toks.len()),
            });
        }
        for (x, t) in toks.iter().enumerate() {
            let c = Cell::new(x as i32, y);
            let err = |m: String| FixtureError::Block { line: *line, message: m };
            match (*t, p.is_present(c)) {
                (".", false) => {}
                (".", true) => return Err(err(format!("cell {c} is present but has no entry"))),
                (_, false) => return Err(err(format!("cell {c} is removed but has entry `{t}`"))),
                (t, true) => {
                    out.insert(c, value(t).ok_or_else(|| err(format!("bad entry `{t}`")))?);
                }
            }
        }
    }
    Ok(out)
}

/// Every shipped fixture.
pub fn fixtures() -> Vec<Fixture> {
    SOURCES
        .iter()
        .map(|(id, text)| parse_fixture(id, text).expect("shipped fixtures parse"))
        .collect()
}

/// The shipped fixture with the given id.
pub fn fixture(figure_id: &str) -> Result<Fixture, FixtureError> {
    SOURCES
        .iter()
        .find(|(id, _)| *id == figure_id)
        .map(|(id, text)| parse_fixture(id, text).expect("shipped fixtures parse"))
        .ok_or_else(|| FixtureError::Unknown(figure_id.to_string()))
}

/// Ids of the shipped fixtures.
pub fn fixture_ids() -> Vec<&'static str> {
    SOURCES.iter().map(|(id, _)| *id).collect()
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Result of [`verify_fixture`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub figure_id: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub facemapping: Option<Facemapping>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Checks a fixture's witness: orientations, consistency, coverage, layers
/// and the fold class of every hole. Negative fixtures are checked by search.
pub fn verify_fixture(f: &Fixture) -> FixtureReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check { name: name.to_string(), passed, detail })
    };
    let p = &f.polyomino;
    if !f.expect_onto {
        let v = exists_onto_facemapping(p, &SearchConfig::default());
        push("no-onto", v.is_unfoldable(), v.status().to_string());
        return FixtureReport { figure_id: f.figure_id.clone(), checks, facemapping: None };
    }
    let fm = infer_orientations(p, &f.face_labels);
    push("orientations", fm.is_some(), if fm.is_some() { "inferred" } else { "no orientation fits" }.into());
    if let Some(fm) = &fm {
        push("consistent", is_consistent(p, fm), String::new());
        let n = covered_faces(fm).len();
        push("coverage", n == f.coverage, format!("{n} faces, expected {}", f.coverage));
        if let Some(layers) = &f.layer_labels {
            let lm = LayerMapping { layers: layers.clone() };
            push("layers", check_layers(p, fm, &lm), String::new());
        }
        for (i, h) in p.holes().iter().enumerate() {
            push(&format!("hole {i}"), true, format!("{:?}", hole_fold_class(p, fm, h)));
        }
    }
    FixtureReport { figure_id: f.figure_id.clone(), checks, facemapping: fm }
}

/// A fixture together with its inferred witness.
#[derive(Clone, Debug)]
pub struct VerifiedFixture {
    pub fixture: Fixture,
    pub facemapping: Facemapping,
}

/// Onto fixtures whose witnesses verify, computed once.
pub fn verified_fixtures() -> &'static [VerifiedFixture] {
    static CACHE: OnceLock<Vec<VerifiedFixture>> = OnceLock::new();
    CACHE.get_or_init(|| {
        fixtures()
            .into_iter()
            .filter(|f| f.expect_onto && f.coverage == 6)
            .filter_map(|f| {
                let fm = infer_orientations(&f.polyomino, &f.face_labels)?;
                (covered_faces(&fm).len() == 6).then_some(VerifiedFixture { fixture: f, facemapping: fm })
            })
            .collect()
    })
}

/// The staircase polyomino of parameter `k`: a 4 by `4k+2` rectangle with
/// a unit-square hole near each top corner and `2k-1` horizontal 2-slits
/// alternating between the second and third rows.
pub fn generate_staircase(k: u32) -> Result<Polyomino, GridError> {
    if k == 0 {
        return Err(GridError::Dimensions(2, 4));
    }
    let k = k as i32;
    let w = 4 * k + 2;
    let mut holes = vec![HoleSpec::Square { x: 1, y: 2 }, HoleSpec::Square { x: w - 2, y: 2 }];
    for i in 0..(2 * k - 1) {
        holes.push(HoleSpec::Slit2 { axis: Axis::Horizontal, x: 2 + 2 * i, y: if i % 2 == 0 { 1 } else { 2 } });
    }
    Polyomino::build(w, 4, holes)
}

/// Face labels of the periodic staircase witness.
pub fn staircase_witness(k: u32) -> Result<BTreeMap<Cell, FaceLabel>, GridError> {
    let p = generate_staircase(k)?;
    let w = p.width();
    let mut out = BTreeMap::new();
    for x in 0..w {
        out.insert(Cell::new(x, 0), 2);
        let row1 = if x < 2 || (x - 2) % 4 >= 2 { 4 } else { 5 };
        out.insert(Cell::new(x, 1), row1);
        if p.is_present(Cell::new(x, 2)) {
            out.insert(Cell::new(x, 2), 6);
        }
        out.insert(Cell::new(x, 3), if x == 0 || x == w - 1 { 1 } else { 3 });
    }
    Ok(out)
}

/// The staircase witness with orientations inferred.
pub fn staircase_facemapping(k: u32) -> Option<Facemapping> {
    let p = generate_staircase(k).ok()?;
    infer_orientations(&p, &staircase_witness(k).ok()?)
}

/// Verdict for a polyomino that matches a staircase exactly.
pub(crate) fn staircase_verdict(k: u32) -> Option<Verdict> {
    let facemapping = staircase_facemapping(k)?;
    Some(Verdict::FoldableCertified {
        reason: "staircase-family".into(),
        fixture: None,
        witness: Some(crate::engine::Witness { facemapping, layers: None }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_files_parse_and_count() {
        let all = fixtures();
        assert_eq!(all.len(), SOURCES.len());
        assert_eq!(all.iter().filter(|f| f.figure_id.starts_with("fig5")).count(), 7);
        let f5a = fixture("fig5a").unwrap();
        assert_eq!((f5a.polyomino.width(), f5a.polyomino.height()), (4, 7));
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn staircase_k2_matches_its_fixture() {
        let p = generate_staircase(2).unwrap();
        let f = fixture("fig9").unwrap();
        assert!(p.same_shape(&f.polyomino));
        assert_eq!(staircase_witness(2).unwrap(), f.face_labels);
        assert_eq!(generate_staircase(3).unwrap().holes().len(), 7);
        assert!(generate_staircase(0).is_err());
    }

    #[test]
    fn mutated_fixture_fails_verification() {
        let mut f = fixture("fig5a").unwrap();
        assert!(verify_fixture(&f).passed());
        let c = Cell::new(0, 0);
        let old = f.face_labels[&c];
        f.face_labels.insert(c, if old == 4 { 3 } else { 4 });
        assert!(!verify_fixture(&f).passed());
    }

    #[test]
    fn block_errors_are_reported() {
        let bad = "poly 2 2\nfaces:\n1 1\n";
        assert!(matches!(parse_fixture("x", bad), Err(FixtureError::Block { .. })));
        let bad = "poly 3 3\nhole square 1 1\nfaces:\n1 1 1\n1 1 1\n1 1 1\n";
        assert!(matches!(parse_fixture("x", bad), Err(FixtureError::Block { .. })));
    }
}
