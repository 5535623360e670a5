//! Facemappings and the search for them.
//!
//! A [`Facemapping`] assigns a [`Placement`] to every present cell. It is
//! consistent when every attached edge relates its two cells by a roll or a
//! flip. Submodules hold crease propagation ([`rules`]), exhaustive search
//! ([`search`]) and hole classification ([`holes`]).

pub mod holes;
pub mod rules;
pub mod search;

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cube::{Dir, FaceLabel, FoldAngle, Placement};
use crate::grid::{Band, BandAxis, Cell, Polyomino, Segment, Symmetry};

pub use holes::{hole_fold_class, HoleFoldClass};
pub use rules::{propagate, Conflict, CreaseAssignment};
pub use search::{
    brute_force_facemappings, collect_facemappings, exists_onto_facemapping, infer_orientations,
    search_facemappings, SearchConfig, SearchStats,
};

/// Errors raised by engine operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("edge {0} violates the roll-or-flip relation")]
    InconsistentEdge(Segment),
    #[error("edge {0} is not an attached interior edge")]
    NotAttached(Segment),
    #[error("cell {0} has no placement")]
    MissingPlacement(Cell),
    #[error("cell {0} is not a present cell but carries a placement")]
    ExtraPlacement(Cell),
    #[error("facemapping is {0}x{1} but the polyomino is {2}x{3}")]
    SizeMismatch(i32, i32, i32, i32),
    #[error("search exceeded the node limit of {0}")]
    NodeLimitExceeded(u64),
    #[error("cannot lift: {0}")]
    Lift(String),
}

/// A placement for every present cell.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facemapping {
    width: i32,
    height: i32,
    cells: Vec<Option<Placement>>,
}

impl Facemapping {
    /// An empty mapping over a `width`×`height` grid.
    pub fn new(width: i32, height: i32) -> Facemapping {
        Facemapping { width, height, cells: vec![None; (width * height) as usize] }
    }

    pub(crate) fn from_indices(width: i32, height: i32, idx: &[u8]) -> Facemapping {
        let cells = idx
            .iter()
            .map(|&i| (i != u8::MAX).then(|| Placement::from_index(i as usize)))
            .collect();
        Facemapping { width, height, cells }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    fn slot(&self, c: Cell) -> Option<usize> {
        (c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height)
            .then(|| (c.y * self.width + c.x) as usize)
    }

    pub fn get(&self, c: Cell) -> Option<Placement> {
        self.slot(c).and_then(|i| self.cells[i])
    }

    /// Sets the placement of an in-bounds cell.
    pub fn set(&mut self, c: Cell, p: Option<Placement>) {
        let i = self.slot(c).expect("cell inside the grid");
        self.cells[i] = p;
    }

    /// Face label of a cell, if placed.
    pub fn face(&self, c: Cell) -> Option<FaceLabel> {
        self.get(c).map(Placement::face)
    }

    /// Placed cells in lexicographic `(x, y)` order.
    pub fn placed(&self) -> impl Iterator<Item = (Cell, Placement)> + '_ {
        (0..self.width)
            .flat_map(move |x| (0..self.height).map(move |y| Cell::new(x, y)))
            .filter_map(move |c| self.get(c).map(|p| (c, p)))
    }

    /// Image under a symmetry of the grid; corners follow the cells.
    pub fn transformed(&self, t: Symmetry) -> Facemapping {
        let (nw, nh) = t.dims(self.width, self.height);
        let perm = t.corner_permutation();
        let mut out = Facemapping::new(nw, nh);
        for (c, p) in self.placed() {
            out.set(t.cell(self.width, self.height, c), Some(p.permuted(perm)));
        }
        out
    }

    /// Face labels as a map.
    pub fn face_labels(&self) -> BTreeMap<Cell, FaceLabel> {
        self.placed().map(|(c, p)| (c, p.face())).collect()
    }
}

impl fmt::Debug for Facemapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for y in (0..self.height).rev() {
            let row: Vec<String> = (0..self.width)
                .map(|x| self.face(Cell::new(x, y)).map_or(".".to_string(), |l| l.to_string()))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CellPlacement {
    x: i32,
    y: i32,
    face: FaceLabel,
    corners: Placement,
}

#[derive(Serialize, Deserialize)]
struct FacemappingRepr {
    width: i32,
    height: i32,
    cells: Vec<CellPlacement>,
}

impl Serialize for Facemapping {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FacemappingRepr {
            width: self.width,
            height: self.height,
            cells: self
                .placed()
                .map(|(c, p)| CellPlacement { x: c.x, y: c.y, face: p.face(), corners: p })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Facemapping {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = FacemappingRepr::deserialize(d)?;
        if r.width < 1 || r.height < 1 {
            return Err(D::Error::custom("non-positive dimensions"));
        }
        let mut fm = Facemapping::new(r.width, r.height);
        for c in r.cells {
            let cell = Cell::new(c.x, c.y);
            if fm.slot(cell).is_none() {
                return Err(D::Error::custom(format!("cell {cell} outside the grid")));
            }
            if c.corners.face() != c.face {
                return Err(D::Error::custom(format!("cell {cell}: corners lie on face {}", c.corners.face())));
            }
            fm.set(cell, Some(c.corners));
        }
        Ok(fm)
    }
}

/// Stacking order per cell; values on each face must form `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerMapping {
    pub layers: BTreeMap<Cell, u32>,
}

/// A witness folding: a facemapping and optionally its layers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub facemapping: Facemapping,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layers: Option<LayerMapping>,
}

/// Tiered foldability result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Verdict {
    /// No onto facemapping exists.
    UnfoldableCertified { reason: String },
    /// A witness folding backed by a verified fixture, a lifted fixture or
    /// the staircase generator. Non-simple holes carry no witness.
    FoldableCertified {
        reason: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        fixture: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        witness: Option<Witness>,
    },
    /// An onto facemapping exists: a necessary condition only.
    FacemappingExists { reason: String, witness: Witness },
    Unknown { reason: String },
}

impl Verdict {
    pub fn reason(&self) -> &str {
        match self {
            Verdict::UnfoldableCertified { reason }
            | Verdict::FoldableCertified { reason, .. }
            | Verdict::FacemappingExists { reason, .. }
            | Verdict::Unknown { reason } => reason,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::UnfoldableCertified { .. } => "UnfoldableCertified",
            Verdict::FoldableCertified { .. } => "FoldableCertified",
            Verdict::FacemappingExists { .. } => "FacemappingExists",
            Verdict::Unknown { .. } => "Unknown",
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::FoldableCertified { witness, .. } => witness.as_ref(),
            Verdict::FacemappingExists { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn is_foldable(&self) -> bool {
        matches!(self, Verdict::FoldableCertified { .. })
    }

    pub fn is_unfoldable(&self) -> bool {
        matches!(self, Verdict::UnfoldableCertified { .. })
    }
}

/// Checks that `fm` places exactly the present cells and respects every attached edge.
pub fn check_consistency(p: &Polyomino, fm: &Facemapping) -> Result<(), EngineError> {
    if (fm.width, fm.height) != (p.width(), p.height()) {
        return Err(EngineError::SizeMismatch(fm.width, fm.height, p.width(), p.height()));
    }
    for x in 0..p.width() {
        for y in 0..p.height() {
            let c = Cell::new(x, y);
            match (p.is_present(c), fm.get(c)) {
                (true, None) => return Err(EngineError::MissingPlacement(c)),
                (false, Some(_)) => return Err(EngineError::ExtraPlacement(c)),
                _ => {}
            }
        }
    }
    for e in p.edges() {
        implied_angle(p, fm, e)?;
    }
    Ok(())
}

/// True when every attached edge satisfies the roll-or-flip relation.
pub fn is_consistent(p: &Polyomino, fm: &Facemapping) -> bool {
    check_consistency(p, fm).is_ok()
}

/// The fold angle an attached edge carries under `fm`.
pub fn implied_angle(p: &Polyomino, fm: &Facemapping, edge: Segment) -> Result<FoldAngle, EngineError> {
    if !p.is_attached(edge) {
        return Err(EngineError::NotAttached(edge));
    }
    relation_across(fm, edge).ok_or(EngineError::InconsistentEdge(edge))
}

/// Roll-or-flip relation across a segment, ignoring whether it is cut.
pub(crate) fn relation_across(fm: &Facemapping, edge: Segment) -> Option<FoldAngle> {
    let (a, b) = edge.cells();
    let (pa, pb) = (fm.get(a)?, fm.get(b)?);
    pa.relation(edge.dir(), pb)
}

/// Face labels covered by the mapping.
pub fn covered_faces(fm: &Facemapping) -> BTreeSet<FaceLabel> {
    fm.placed().map(|(_, p)| p.face()).collect()
}

/// True when the layer values on each face are exactly `1..=k`.
pub fn check_layers(p: &Polyomino, fm: &Facemapping, lm: &LayerMapping) -> bool {
    let mut per_face: BTreeMap<FaceLabel, Vec<u32>> = BTreeMap::new();
    for c in p.cells() {
        let (Some(face), Some(&layer)) = (fm.face(c), lm.layers.get(&c)) else { return false };
        per_face.entry(face).or_default().push(layer);
    }
    if lm.layers.len() != p.cells().count() {
        return false;
    }
    per_face.values_mut().all(|v| {
        v.sort_unstable();
        v.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
    })
}

/// Lifts a facemapping of `orig.contract_plain_band(band)` back to `orig`.
///
/// The two deleted lines come back as a zig-zag of 180° creases copying a
/// neighbouring line, which must be fully present and related along its
/// length under the reduced mapping.
pub fn lift_contraction(orig: &Polyomino, band: Band, reduced: &Facemapping) -> Result<Facemapping, EngineError> {
    match band.axis {
        BandAxis::Rows => lift_rows(orig, band.index, reduced),
        BandAxis::Columns => {
            let t = Symmetry::TRANSPOSE;
            lift_rows(&orig.transformed(t), band.index, &reduced.transformed(t)).map(|f| f.transformed(t))
        }
    }
}

fn lift_rows(orig: &Polyomino, r: i32, reduced: &Facemapping) -> Result<Facemapping, EngineError> {
    let (w, h) = (orig.width(), orig.height());
    if reduced.width != w || reduced.height != h - 2 {
        return Err(EngineError::SizeMismatch(reduced.width, reduced.height, w, h - 2));
    }
    let related_row = |y: i32| -> bool {
        (0..w).all(|x| reduced.get(Cell::new(x, y)).is_some())
            && (1..w).all(|x| relation_across(reduced, Segment::v(x, y)).is_some())
    };
    let mut fm = Facemapping::new(w, h);
    for (c, p) in reduced.placed() {
        let y = if c.y >= r { c.y + 2 } else { c.y };
        fm.set(Cell::new(c.x, y), Some(p));
    }
    if r >= 1 && related_row(r - 1) {
        for x in 0..w {
            let below = reduced.get(Cell::new(x, r - 1)).unwrap();
            fm.set(Cell::new(x, r), Some(below.flip(Dir::Up)));
            fm.set(Cell::new(x, r + 1), Some(below));
        }
    } else if r + 2 < h && related_row(r) {
        for x in 0..w {
            let above = reduced.get(Cell::new(x, r)).unwrap();
            fm.set(Cell::new(x, r + 1), Some(above.flip(Dir::Down)));
            fm.set(Cell::new(x, r), Some(above));
        }
    } else {
        return Err(EngineError::Lift(format!("no clean line beside rows {r} and {}", r + 1)));
    }
    check_consistency(orig, &fm)?;
    Ok(fm)
}

/// Adds one 180°-folded boundary line on the given side of the grid.
///
/// `target` is the padded polyomino; its extra line must carry no cuts and
/// the line it copies must be related along its length.
pub fn pad_boundary(target: &Polyomino, side: Dir, fm: &Facemapping) -> Result<Facemapping, EngineError> {
    // Rotate so the new line is the top row.
    let t = match side {
        Dir::Up => Symmetry::IDENTITY,
        Dir::Down => Symmetry { mirror_x: false, mirror_y: true, transpose: false },
        Dir::Right => Symmetry::TRANSPOSE,
        Dir::Left => Symmetry { mirror_x: true, mirror_y: false, transpose: true },
    };
    let tp = target.transformed(t);
    let tf = fm.transformed(t);
    let (w, h) = (tp.width(), tp.height());
    if tf.width != w || tf.height != h - 1 {
        return Err(EngineError::SizeMismatch(tf.width, tf.height, w, h - 1));
    }
    let mut out = Facemapping::new(w, h);
    for (c, p) in tf.placed() {
        out.set(c, Some(p));
    }
    for x in 0..w {
        let below = tf.get(Cell::new(x, h - 2)).ok_or(EngineError::Lift("boundary line has gaps".into()))?;
        out.set(Cell::new(x, h - 1), Some(below.flip(Dir::Up)));
    }
    let out = out.transformed(t.inverse());
    check_consistency(target, &out)?;
    Ok(out)
}
