//! Rectangular polyominoes with holes.
//!
//! Coordinates put the origin at the bottom-left corner with `x` to the
//! right and `y` up. Cells are unit squares `(x, y)`; grid vertices are the
//! integer points between them. A cut [`Segment`] is the unit edge starting
//! at a grid vertex and running up (vertical) or right (horizontal).

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use crate::cube::Dir;

/// A unit cell of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Cell {
        Cell { x, y }
    }

    pub fn step(self, dir: Dir) -> Cell {
        let (dx, dy) = dir.delta();
        Cell::new(self.x + dx, self.y + dy)
    }

    /// The unit edge of this cell facing `dir`.
    pub fn edge(self, dir: Dir) -> Segment {
        let Cell { x, y } = self;
        match dir {
            Dir::Right => Segment::v(x + 1, y),
            Dir::Left => Segment::v(x, y),
            Dir::Up => Segment::h(x, y + 1),
            Dir::Down => Segment::h(x, y),
        }
    }

    /// Grid vertices at the four corners, in bottom-left, bottom-right,
    /// top-right, top-left order.
    pub fn corners(self) -> [(i32, i32); 4] {
        let Cell { x, y } = self;
        [(x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1)]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Orientation of a cut segment or slit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "v")]
    Vertical,
    #[serde(rename = "h")]
    Horizontal,
}

impl Axis {
    fn token(self) -> &'static str {
        match self {
            Axis::Vertical => "v",
            Axis::Horizontal => "h",
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::Vertical => Axis::Horizontal,
            Axis::Horizontal => Axis::Vertical,
        }
    }
}

/// A unit grid edge. Vertical `(x, y)` runs from vertex `(x, y)` to
/// `(x, y + 1)` and separates cells `(x - 1, y)` and `(x, y)`; horizontal
/// `(x, y)` runs to `(x + 1, y)` and separates `(x, y - 1)` and `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub axis: Axis,
    pub x: i32,
    pub y: i32,
}

impl Segment {
    pub const fn v(x: i32, y: i32) -> Segment {
        Segment { axis: Axis::Vertical, x, y }
    }

    pub const fn h(x: i32, y: i32) -> Segment {
        Segment { axis: Axis::Horizontal, x, y }
    }

    pub fn endpoints(self) -> [(i32, i32); 2] {
        match self.axis {
            Axis::Vertical => [(self.x, self.y), (self.x, self.y + 1)],
            Axis::Horizontal => [(self.x, self.y), (self.x + 1, self.y)],
        }
    }

    /// The segment joining two grid vertices at unit distance.
    pub fn joining(a: (i32, i32), b: (i32, i32)) -> Option<Segment> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        match (hi.0 - lo.0, hi.1 - lo.1) {
            (0, 1) => Some(Segment::v(lo.0, lo.1)),
            (1, 0) => Some(Segment::h(lo.0, lo.1)),
            _ => None,
        }
    }

    /// The two cells on either side: left then right, or below then above.
    pub fn cells(self) -> (Cell, Cell) {
        match self.axis {
            Axis::Vertical => (Cell::new(self.x - 1, self.y), Cell::new(self.x, self.y)),
            Axis::Horizontal => (Cell::new(self.x, self.y - 1), Cell::new(self.x, self.y)),
        }
    }

    /// Direction from the first cell of [`Segment::cells`] to the second.
    pub fn dir(self) -> Dir {
        match self.axis {
            Axis::Vertical => Dir::Right,
            Axis::Horizontal => Dir::Up,
        }
    }

    fn translated(self, dx: i32, dy: i32) -> Segment {
        Segment { axis: self.axis, x: self.x + dx, y: self.y + dy }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.axis {
            Axis::Vertical => 'V',
            Axis::Horizontal => 'H',
        };
        write!(f, "{a}({},{})", self.x, self.y)
    }
}

/// Quarter-turn rotation of an L or U hole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rotation {
    #[serde(rename = "r0")]
    R0,
    #[serde(rename = "r90")]
    R90,
    #[serde(rename = "r180")]
    R180,
    #[serde(rename = "r270")]
    R270,
}

impl Rotation {
    pub const ALL: [Rotation; 4] = [Rotation::R0, Rotation::R90, Rotation::R180, Rotation::R270];

    fn token(self) -> &'static str {
        match self {
            Rotation::R0 => "r0",
            Rotation::R90 => "r90",
            Rotation::R180 => "r180",
            Rotation::R270 => "r270",
        }
    }

    /// Rotates a direction counter-clockwise by this many quarter turns.
    fn apply(self, d: Dir) -> Dir {
        let turns = self as usize;
        let order = [Dir::Right, Dir::Up, Dir::Left, Dir::Down];
        let i = order.iter().position(|&o| o == d).unwrap();
        order[(i + turns) % 4]
    }
}

/// One hole of a polyomino.
///
/// `Square` and `U` are anchored at a cell (the removed cell, or the flap
/// cell of the U); the slits and the L are anchored at a grid vertex. An L
/// at `r0` has arms running right and up from its corner vertex and `flip`
/// mirrors it left-right before rotating. A U at `r0` opens upward: its flap
/// cell is cut on the bottom, left and right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HoleSpec {
    Square { x: i32, y: i32 },
    Slit2 { axis: Axis, x: i32, y: i32 },
    Slit1 { axis: Axis, x: i32, y: i32 },
    #[serde(rename = "L")]
    L { x: i32, y: i32, rotation: Rotation, flip: bool },
    #[serde(rename = "U")]
    U { x: i32, y: i32, rotation: Rotation },
    /// Any other connected arrangement of cuts and removed cells.
    Raw { cuts: Vec<Segment>, removed: Vec<Cell> },
}

/// Family of a hole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HoleKind {
    Square,
    Slit2,
    Slit1,
    L,
    U,
    Raw,
}

impl HoleSpec {
    pub fn kind(&self) -> HoleKind {
        match self {
            HoleSpec::Square { .. } => HoleKind::Square,
            HoleSpec::Slit2 { .. } => HoleKind::Slit2,
            HoleSpec::Slit1 { .. } => HoleKind::Slit1,
            HoleSpec::L { .. } => HoleKind::L,
            HoleSpec::U { .. } => HoleKind::U,
            HoleSpec::Raw { .. } => HoleKind::Raw,
        }
    }

    pub fn is_slit(&self) -> bool {
        matches!(self, HoleSpec::Slit2 { .. } | HoleSpec::Slit1 { .. })
    }

    /// Removed cells and cut segments of the hole.
    pub fn expand(&self) -> (Vec<Cell>, Vec<Segment>) {
        match *self {
            HoleSpec::Square { x, y } => (vec![Cell::new(x, y)], vec![]),
            HoleSpec::Slit1 { axis, x, y } => (vec![], vec![Segment { axis, x, y }]),
            HoleSpec::Slit2 { axis: Axis::Vertical, x, y } => {
                (vec![], vec![Segment::v(x, y), Segment::v(x, y + 1)])
            }
            HoleSpec::Slit2 { axis: Axis::Horizontal, x, y } => {
                (vec![], vec![Segment::h(x, y), Segment::h(x + 1, y)])
            }
            HoleSpec::L { x, y, rotation, flip } => {
                let arms = if flip { [Dir::Left, Dir::Up] } else { [Dir::Right, Dir::Up] };
                let cuts = arms
                    .iter()
                    .map(|&d| {
                        let (dx, dy) = rotation.apply(d).delta();
                        Segment::joining((x, y), (x + dx, y + dy)).unwrap()
                    })
                    .collect();
                (vec![], cuts)
            }
            HoleSpec::U { x, y, rotation } => {
                let open = rotation.apply(Dir::Up);
                let c = Cell::new(x, y);
                let cuts = Dir::ALL.iter().filter(|&&d| d != open).map(|&d| c.edge(d)).collect();
                (vec![], cuts)
            }
            HoleSpec::Raw { ref cuts, ref removed } => (removed.clone(), cuts.clone()),
        }
    }

    /// Every grid vertex touched by the hole.
    pub fn vertices(&self) -> BTreeSet<(i32, i32)> {
        let (removed, cuts) = self.expand();
        let mut out = BTreeSet::new();
        for c in removed {
            out.extend(c.corners());
        }
        for s in cuts {
            out.extend(s.endpoints());
        }
        out
    }

    fn translated(&self, dx: i32, dy: i32) -> HoleSpec {
        match self.clone() {
            HoleSpec::Square { x, y } => HoleSpec::Square { x: x + dx, y: y + dy },
            HoleSpec::Slit2 { axis, x, y } => HoleSpec::Slit2 { axis, x: x + dx, y: y + dy },
            HoleSpec::Slit1 { axis, x, y } => HoleSpec::Slit1 { axis, x: x + dx, y: y + dy },
            HoleSpec::L { x, y, rotation, flip } => {
                HoleSpec::L { x: x + dx, y: y + dy, rotation, flip }
            }
            HoleSpec::U { x, y, rotation } => HoleSpec::U { x: x + dx, y: y + dy, rotation },
            HoleSpec::Raw { cuts, removed } => HoleSpec::Raw {
                cuts: cuts.iter().map(|s| s.translated(dx, dy)).collect(),
                removed: removed.iter().map(|c| Cell::new(c.x + dx, c.y + dy)).collect(),
            },
        }
    }

    /// Doubled midpoint coordinate along the slit's own axis.
    fn doubled_midpoint(&self) -> Option<(Axis, i32)> {
        match *self {
            HoleSpec::Slit2 { axis: Axis::Vertical, y, .. } => Some((Axis::Vertical, 2 * y + 2)),
            HoleSpec::Slit2 { axis: Axis::Horizontal, x, .. } => {
                Some((Axis::Horizontal, 2 * x + 2))
            }
            HoleSpec::Slit1 { axis: Axis::Vertical, y, .. } => Some((Axis::Vertical, 2 * y + 1)),
            HoleSpec::Slit1 { axis: Axis::Horizontal, x, .. } => {
                Some((Axis::Horizontal, 2 * x + 1))
            }
            _ => None,
        }
    }

    /// Text form used after `hole`, or `None` for raw holes.
    fn text(&self) -> Option<String> {
        Some(match self {
            HoleSpec::Square { x, y } => format!("square {x} {y}"),
            HoleSpec::Slit2 { axis, x, y } => format!("slit2 {} {x} {y}", axis.token()),
            HoleSpec::Slit1 { axis, x, y } => format!("slit1 {} {x} {y}", axis.token()),
            HoleSpec::L { x, y, rotation, flip } => {
                let f = if *flip { " flip" } else { "" };
                format!("L {x} {y} {}{f}", rotation.token())
            }
            HoleSpec::U { x, y, rotation } => format!("U {x} {y} {}", rotation.token()),
            HoleSpec::Raw { .. } => return None,
        })
    }
}

/// Parity of the number of rows (or columns) between two slit midpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeparationParity {
    Even,
    Odd,
    Incomparable,
}

/// Separation parity of two slits of the same axis.
///
/// Slits of different axes, slits whose midpoints differ by a half step
/// (a length-1 slit against a length-2 slit), and non-slits are
/// incomparable.
pub fn separation_parity(a: &HoleSpec, b: &HoleSpec) -> SeparationParity {
    match (a.doubled_midpoint(), b.doubled_midpoint()) {
        (Some((ax, ma)), Some((bx, mb))) if ax == bx => {
            let d = (ma - mb).abs();
            if d % 2 != 0 {
                SeparationParity::Incomparable
            } else if (d / 2) % 2 == 0 {
                SeparationParity::Even
            } else {
                SeparationParity::Odd
            }
        }
        _ => SeparationParity::Incomparable,
    }
}

/// Recognizes a connected group of cuts and removed cells as a simple hole.
pub fn recognize_hole(cuts: &[Segment], removed: &[Cell]) -> HoleSpec {
    let mut cuts = cuts.to_vec();
    cuts.sort();
    cuts.dedup();
    let mut removed = removed.to_vec();
    removed.sort();
    removed.dedup();
    let raw = HoleSpec::Raw { cuts: cuts.clone(), removed: removed.clone() };
    if !removed.is_empty() {
        return match (removed.as_slice(), cuts.len()) {
            ([c], 0) => HoleSpec::Square { x: c.x, y: c.y },
            _ => raw,
        };
    }
    match cuts.as_slice() {
        [s] => HoleSpec::Slit1 { axis: s.axis, x: s.x, y: s.y },
        [a, b] if a.axis == b.axis => {
            let collinear = match a.axis {
                Axis::Vertical => a.x == b.x && b.y == a.y + 1,
                Axis::Horizontal => a.y == b.y && b.x == a.x + 1,
            };
            if collinear {
                HoleSpec::Slit2 { axis: a.axis, x: a.x, y: a.y }
            } else {
                raw
            }
        }
        [_, _] => {
            let candidates: Vec<(i32, i32)> = cuts[0]
                .endpoints()
                .into_iter()
                .filter(|p| cuts[1].endpoints().contains(p))
                .collect();
            let Some(&(x, y)) = candidates.first() else { return raw };
            let shape: BTreeSet<Segment> = cuts.iter().copied().collect();
            for rotation in Rotation::ALL {
                let l = HoleSpec::L { x, y, rotation, flip: false };
                if l.expand().1.into_iter().collect::<BTreeSet<_>>() == shape {
                    return l;
                }
            }
            raw
        }
        [_, _, _] => {
            let shape: BTreeSet<Segment> = cuts.iter().copied().collect();
            let mut cells: BTreeSet<Cell> = BTreeSet::new();
            for s in &cuts {
                let (a, b) = s.cells();
                cells.insert(a);
                cells.insert(b);
            }
            for c in cells {
                for rotation in Rotation::ALL {
                    let u = HoleSpec::U { x: c.x, y: c.y, rotation };
                    if u.expand().1.into_iter().collect::<BTreeSet<_>>() == shape {
                        return u;
                    }
                }
            }
            raw
        }
        _ => raw,
    }
}

/// Errors from building, editing or parsing polyominoes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GridError {
    #[error("invalid dimensions {0}x{1}")]
    Dimensions(i32, i32),
    #[error("holes {0} and {1} overlap or touch")]
    Overlap(usize, usize),
    #[error("hole {0} is not strictly inside the rectangle")]
    Boundary(usize),
    #[error("the attachment graph is disconnected")]
    Disconnected,
    #[error("band is not plain: {0}")]
    NotPlain(String),
    #[error("hole index {0} out of range")]
    HoleIndex(usize),
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}

/// Which pair of lines a band contraction removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BandAxis {
    Rows,
    Columns,
}

/// Two adjacent rows or columns starting at `index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Band {
    pub axis: BandAxis,
    pub index: i32,
}

/// A symmetry of the rectangle: optional mirrors, then an optional transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symmetry {
    pub mirror_x: bool,
    pub mirror_y: bool,
    pub transpose: bool,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { mirror_x: false, mirror_y: false, transpose: false };
    pub const TRANSPOSE: Symmetry = Symmetry { mirror_x: false, mirror_y: false, transpose: true };

    /// All eight symmetries.
    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..8).map(|i| Symmetry { mirror_x: i & 1 != 0, mirror_y: i & 2 != 0, transpose: i & 4 != 0 })
    }

    pub fn inverse(self) -> Symmetry {
        if self.transpose {
            Symmetry { mirror_x: self.mirror_y, mirror_y: self.mirror_x, transpose: true }
        } else {
            self
        }
    }

    /// Dimensions of the image of a `w`×`h` rectangle.
    pub fn dims(self, w: i32, h: i32) -> (i32, i32) {
        if self.transpose {
            (h, w)
        } else {
            (w, h)
        }
    }

    pub fn vertex(self, w: i32, h: i32, (x, y): (i32, i32)) -> (i32, i32) {
        let x = if self.mirror_x { w - x } else { x };
        let y = if self.mirror_y { h - y } else { y };
        if self.transpose {
            (y, x)
        } else {
            (x, y)
        }
    }

    pub fn cell(self, w: i32, h: i32, c: Cell) -> Cell {
        let (x, y) = self.vertex(w, h, (c.x, c.y));
        let (x2, y2) = self.vertex(w, h, (c.x + 1, c.y + 1));
        Cell::new(x.min(x2), y.min(y2))
    }

    pub fn segment(self, w: i32, h: i32, s: Segment) -> Segment {
        let [a, b] = s.endpoints();
        Segment::joining(self.vertex(w, h, a), self.vertex(w, h, b)).unwrap()
    }

    /// `perm[k]` is the old corner index that lands on new corner `k`.
    pub fn corner_permutation(self) -> [usize; 4] {
        let offsets = [(0, 0), (1, 0), (1, 1), (0, 1)];
        let mapped: Vec<(i32, i32)> = offsets.iter().map(|&o| self.vertex(1, 1, o)).collect();
        let mut perm = [0; 4];
        for (k, o) in offsets.iter().enumerate() {
            perm[k] = mapped.iter().position(|m| m == o).unwrap();
        }
        perm
    }
}

/// A rectangular polyomino with holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyomino {
    width: i32,
    height: i32,
    holes: Vec<HoleSpec>,
    removed: BTreeSet<Cell>,
    cuts: BTreeSet<Segment>,
    raw: bool,
    present: Vec<bool>,
    cut_v: Vec<bool>,
    cut_h: Vec<bool>,
}

impl Polyomino {
    /// Builds a polyomino from typed holes, validating every invariant.
    pub fn build(width: i32, height: i32, holes: Vec<HoleSpec>) -> Result<Polyomino, GridError> {
        Self::assemble(width, height, holes, false)
    }

    /// Builds a polyomino from bare cuts and removed cells. Connected groups
    /// are recognized as simple holes where possible and kept raw otherwise.
    pub fn from_raw(
        width: i32,
        height: i32,
        cuts: impl IntoIterator<Item = Segment>,
        removed: impl IntoIterator<Item = Cell>,
    ) -> Result<Polyomino, GridError> {
        let cuts: BTreeSet<Segment> = cuts.into_iter().collect();
        let removed: BTreeSet<Cell> = removed.into_iter().collect();
        let holes = components(&cuts, &removed)
            .into_iter()
            .map(|(c, r)| recognize_hole(&c, &r))
            .collect();
        Self::assemble(width, height, holes, true)
    }

    fn assemble(width: i32, height: i32, holes: Vec<HoleSpec>, raw: bool) -> Result<Polyomino, GridError> {
        if width < 1 || height < 1 {
            return Err(GridError::Dimensions(width, height));
        }
        let mut removed = BTreeSet::new();
        let mut cuts = BTreeSet::new();
        let mut vertex_sets = Vec::with_capacity(holes.len());
        for (i, h) in holes.iter().enumerate() {
            let (r, c) = h.expand();
            if r.is_empty() && c.is_empty() {
                return Err(GridError::Boundary(i));
            }
            let inside_cell = |c: &Cell| c.x >= 1 && c.x <= width - 2 && c.y >= 1 && c.y <= height - 2;
            let inside_vertex =
                |&(x, y): &(i32, i32)| x >= 1 && x < width && y >= 1 && y < height;
            if !r.iter().all(inside_cell) || !c.iter().flat_map(|s| s.endpoints()).all(|v| inside_vertex(&v)) {
                return Err(GridError::Boundary(i));
            }
            let verts = h.vertices();
            for (j, other) in vertex_sets.iter().enumerate() {
                if !verts.is_disjoint(other) {
                    return Err(GridError::Overlap(j, i));
                }
            }
            vertex_sets.push(verts);
            removed.extend(r);
            cuts.extend(c);
        }
        let (w, h) = (width as usize, height as usize);
        let mut present = vec![true; w * h];
        for c in &removed {
            present[c.y as usize * w + c.x as usize] = false;
        }
        let mut cut_v = vec![false; (w + 1) * h];
        let mut cut_h = vec![false; w * (h + 1)];
        for s in &cuts {
            match s.axis {
                Axis::Vertical => cut_v[s.y as usize * (w + 1) + s.x as usize] = true,
                Axis::Horizontal => cut_h[s.y as usize * w + s.x as usize] = true,
            }
        }
        let p = Polyomino { width, height, holes, removed, cuts, raw, present, cut_v, cut_h };
        if !p.is_connected() {
            return Err(GridError::Disconnected);
        }
        Ok(p)
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn holes(&self) -> &[HoleSpec] {
        &self.holes
    }

    pub fn removed_cells(&self) -> &BTreeSet<Cell> {
        &self.removed
    }

    pub fn cuts(&self) -> &BTreeSet<Segment> {
        &self.cuts
    }

    /// True when built from bare cuts rather than typed holes.
    pub fn is_raw(&self) -> bool {
        self.raw
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    /// Row-major index of an in-bounds cell.
    pub fn index(&self, c: Cell) -> usize {
        (c.y * self.width + c.x) as usize
    }

    pub fn cell_at(&self, i: usize) -> Cell {
        Cell::new(i as i32 % self.width, i as i32 / self.width)
    }

    pub fn area(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn is_present(&self, c: Cell) -> bool {
        self.in_bounds(c) && self.present[self.index(c)]
    }

    pub fn is_cut(&self, s: Segment) -> bool {
        let w = self.width as usize;
        match s.axis {
            Axis::Vertical => {
                s.x >= 0 && s.x <= self.width && s.y >= 0 && s.y < self.height
                    && self.cut_v[s.y as usize * (w + 1) + s.x as usize]
            }
            Axis::Horizontal => {
                s.x >= 0 && s.x < self.width && s.y >= 0 && s.y <= self.height
                    && self.cut_h[s.y as usize * w + s.x as usize]
            }
        }
    }

    /// True when both cells beside the segment exist and the segment is not cut.
    pub fn is_attached(&self, s: Segment) -> bool {
        let (a, b) = s.cells();
        self.is_present(a) && self.is_present(b) && !self.is_cut(s)
    }

    /// The neighbour in direction `dir`, if attached.
    pub fn neighbor(&self, c: Cell, dir: Dir) -> Option<Cell> {
        let n = c.step(dir);
        (self.is_present(c) && self.is_present(n) && !self.is_cut(c.edge(dir))).then_some(n)
    }

    /// Present cells in lexicographic `(x, y)` order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.width)
            .flat_map(move |x| (0..self.height).map(move |y| Cell::new(x, y)))
            .filter(|&c| self.is_present(c))
    }

    /// Attached interior edges in sorted order.
    pub fn edges(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for x in 1..self.width {
            for y in 0..self.height {
                let s = Segment::v(x, y);
                if self.is_attached(s) {
                    out.push(s);
                }
            }
        }
        for x in 0..self.width {
            for y in 1..self.height {
                let s = Segment::h(x, y);
                if self.is_attached(s) {
                    out.push(s);
                }
            }
        }
        out.sort();
        out
    }

    fn is_connected(&self) -> bool {
        let Some(start) = self.cells().next() else { return false };
        let mut seen = vec![false; self.area()];
        seen[self.index(start)] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(c) = queue.pop_front() {
            for d in Dir::ALL {
                if let Some(n) = self.neighbor(c, d) {
                    let i = self.index(n);
                    if !seen[i] {
                        seen[i] = true;
                        count += 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        count == self.cells().count()
    }

    /// Keeps the holes whose indices are in `keep` and fills in all others.
    pub fn fill_holes(&self, keep: &BTreeSet<usize>) -> Result<Polyomino, GridError> {
        if let Some(&i) = keep.iter().find(|&&i| i >= self.holes.len()) {
            return Err(GridError::HoleIndex(i));
        }
        let holes = keep.iter().map(|&i| self.holes[i].clone()).collect();
        Self::assemble(self.width, self.height, holes, self.raw)
    }

    /// Deletes two adjacent plain rows or columns.
    ///
    /// The band is plain when none of its cells is removed and none of their
    /// edges is cut. Holes beyond the band move by two.
    pub fn contract_plain_band(&self, band: Band) -> Result<Polyomino, GridError> {
        match band.axis {
            BandAxis::Rows => self.contract_rows(band.index),
            BandAxis::Columns => self
                .transformed(Symmetry::TRANSPOSE)
                .contract_rows(band.index)
                .map(|p| p.transformed(Symmetry::TRANSPOSE)),
        }
    }

    /// True when rows `r` and `r + 1` carry no removed cell and no cut edge.
    pub fn is_plain_row_band(&self, r: i32) -> bool {
        if r < 0 || r + 1 >= self.height {
            return false;
        }
        (0..self.width).all(|x| {
            (r..r + 2).all(|y| {
                let c = Cell::new(x, y);
                self.is_present(c) && Dir::ALL.iter().all(|&d| !self.is_cut(c.edge(d)))
            })
        })
    }

    /// Deletes the outermost row or column on side `side`.
    ///
    /// Fails when a hole would touch the new boundary.
    pub fn trim_line(&self, side: Dir) -> Result<Polyomino, GridError> {
        let (w, h) = (self.width, self.height);
        let (dx, dy, nw, nh) = match side {
            Dir::Right => (0, 0, w - 1, h),
            Dir::Up => (0, 0, w, h - 1),
            Dir::Left => (-1, 0, w - 1, h),
            Dir::Down => (0, -1, w, h - 1),
        };
        if nw < 1 || nh < 1 {
            return Err(GridError::Dimensions(nw, nh));
        }
        let holes = self.holes.iter().map(|hole| hole.translated(dx, dy)).collect();
        Self::assemble(nw, nh, holes, self.raw)
    }

    fn contract_rows(&self, r: i32) -> Result<Polyomino, GridError> {
        if self.height < 3 || !self.is_plain_row_band(r) {
            return Err(GridError::NotPlain(format!("rows {r} and {}", r + 1)));
        }
        let holes = self
            .holes
            .iter()
            .map(|h| {
                let above = h.vertices().iter().all(|&(_, y)| y >= r + 2);
                if above {
                    h.translated(0, -2)
                } else {
                    h.clone()
                }
            })
            .collect();
        Self::assemble(self.width, self.height - 2, holes, self.raw)
    }

    /// Image of the polyomino under a symmetry of the rectangle.
    pub fn transformed(&self, t: Symmetry) -> Polyomino {
        let (w, h) = (self.width, self.height);
        let holes = self
            .holes
            .iter()
            .map(|hole| {
                let (r, c) = hole.expand();
                let r: Vec<Cell> = r.into_iter().map(|c| t.cell(w, h, c)).collect();
                let c: Vec<Segment> = c.into_iter().map(|s| t.segment(w, h, s)).collect();
                recognize_hole(&c, &r)
            })
            .collect();
        let (nw, nh) = t.dims(w, h);
        Self::assemble(nw, nh, holes, self.raw).expect("symmetries preserve validity")
    }

    /// True when both polyominoes have the same outline, cuts and removed cells.
    pub fn same_shape(&self, other: &Polyomino) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.cuts == other.cuts
            && self.removed == other.removed
    }

    /// Parses the text format.
    pub fn parse(text: &str) -> Result<Polyomino, GridError> {
        parse(text)
    }

    /// Canonical text form.
    pub fn to_text(&self) -> String {
        let mut out = format!("poly {} {}\n", self.width, self.height);
        let typed = !self.raw && self.holes.iter().all(|h| h.kind() != HoleKind::Raw);
        if typed {
            for h in &self.holes {
                let _ = writeln!(out, "hole {}", h.text().unwrap());
            }
        } else {
            for s in &self.cuts {
                let _ = writeln!(out, "cut {} {} {}", s.axis.token(), s.x, s.y);
            }
            for c in &self.removed {
                let _ = writeln!(out, "remove {} {}", c.x, c.y);
            }
        }
        out
    }
}

impl fmt::Display for Polyomino {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyominoRepr {
    width: i32,
    height: i32,
    holes: Vec<HoleSpec>,
    removed_cells: Vec<Cell>,
    cuts: Vec<Segment>,
    raw: bool,
}

impl Serialize for Polyomino {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyominoRepr {
            width: self.width,
            height: self.height,
            holes: self.holes.clone(),
            removed_cells: self.removed.iter().copied().collect(),
            cuts: self.cuts.iter().copied().collect(),
            raw: self.raw,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyomino {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolyominoRepr::deserialize(d)?;
        let p = if r.raw {
            Polyomino::from_raw(r.width, r.height, r.cuts, r.removed_cells)
        } else {
            Polyomino::build(r.width, r.height, r.holes)
        };
        p.map_err(serde::de::Error::custom)
    }
}

/// Groups cuts and removed cells into components that touch at grid vertices.
fn components(cuts: &BTreeSet<Segment>, removed: &BTreeSet<Cell>) -> Vec<(Vec<Segment>, Vec<Cell>)> {
    enum Item {
        Cut(Segment),
        Cell(Cell),
    }
    let items: Vec<Item> = cuts.iter().map(|&s| Item::Cut(s)).chain(removed.iter().map(|&c| Item::Cell(c))).collect();
    let verts = |it: &Item| -> Vec<(i32, i32)> {
        match it {
            Item::Cut(s) => s.endpoints().to_vec(),
            Item::Cell(c) => c.corners().to_vec(),
        }
    };
    let mut parent: Vec<usize> = (0..items.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut owner: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for (i, it) in items.iter().enumerate() {
        for v in verts(it) {
            if let Some(&j) = owner.get(&v) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            } else {
                owner.insert(v, i);
            }
        }
    }
    let mut groups: BTreeMap<usize, (Vec<Segment>, Vec<Cell>)> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    for (i, it) in items.iter().enumerate() {
        let root = find(&mut parent, i);
        if !groups.contains_key(&root) {
            order.push(root);
        }
        let g = groups.entry(root).or_default();
        match it {
            Item::Cut(s) => g.0.push(*s),
            Item::Cell(c) => g.1.push(*c),
        }
    }
    order.into_iter().map(|r| groups.remove(&r).unwrap()).collect()
}

fn parse(text: &str) -> Result<Polyomino, GridError> {
    let mut dims: Option<(i32, i32)> = None;
    let mut holes = Vec::new();
    let mut raw_cuts = Vec::new();
    let mut raw_removed = Vec::new();
    let mut raw = false;
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = line.split('#').next().unwrap_or("");
        let toks = tokens(content);
        if toks.is_empty() {
            continue;
        }
        let err = |col: usize, message: String| GridError::Syntax { line: line_no, column: col, message };
        let int = |i: usize| -> Result<i32, GridError> {
            let (col, t) = *toks.get(i).ok_or_else(|| err(content.len() + 1, "missing integer".into()))?;
            t.parse::<i32>().map_err(|_| err(col, format!("expected an integer, found `{t}`")))
        };
        let axis = |i: usize| -> Result<Axis, GridError> {
            let (col, t) = *toks.get(i).ok_or_else(|| err(content.len() + 1, "missing axis".into()))?;
            match t {
                "v" => Ok(Axis::Vertical),
                "h" => Ok(Axis::Horizontal),
                _ => Err(err(col, format!("expected `v` or `h`, found `{t}`"))),
            }
        };
        let rotation = |i: usize| -> Result<Rotation, GridError> {
            let (col, t) = *toks.get(i).ok_or_else(|| err(content.len() + 1, "missing rotation".into()))?;
            Rotation::ALL
                .into_iter()
                .find(|r| r.token() == t)
                .ok_or_else(|| err(col, format!("expected a rotation r0|r90|r180|r270, found `{t}`")))
        };
        let expect_len = |n: usize| -> Result<(), GridError> {
            match toks.get(n) {
                Some(&(col, t)) => Err(err(col, format!("unexpected token `{t}`"))),
                None => Ok(()),
            }
        };
        let (col0, head) = toks[0];
        if dims.is_none() && head != "poly" {
            return Err(err(col0, format!("expected `poly` header, found `{head}`")));
        }
        match head {
            "poly" => {
                if dims.is_some() {
                    return Err(err(col0, "duplicate `poly` header".into()));
                }
                dims = Some((int(1)?, int(2)?));
                expect_len(3)?;
            }
            "hole" => {
                let (col, kind) = *toks.get(1).ok_or_else(|| err(content.len() + 1, "missing hole kind".into()))?;
                let h = match kind {
                    "square" => {
                        expect_len(4)?;
                        HoleSpec::Square { x: int(2)?, y: int(3)? }
                    }
                    "slit2" => {
                        expect_len(5)?;
                        HoleSpec::Slit2 { axis: axis(2)?, x: int(3)?, y: int(4)? }
                    }
                    "slit1" => {
                        expect_len(5)?;
                        HoleSpec::Slit1 { axis: axis(2)?, x: int(3)?, y: int(4)? }
                    }
                    "L" => {
                        let flip = match toks.get(5) {
                            Some(&(_, "flip")) => {
                                expect_len(6)?;
                                true
                            }
                            Some(&(c, t)) => return Err(err(c, format!("unexpected token `{t}`"))),
                            None => false,
                        };
                        HoleSpec::L { x: int(2)?, y: int(3)?, rotation: rotation(4)?, flip }
                    }
                    "U" => {
                        expect_len(5)?;
                        HoleSpec::U { x: int(2)?, y: int(3)?, rotation: rotation(4)? }
                    }
                    _ => return Err(err(col, format!("unknown hole kind `{kind}`"))),
                };
                holes.push(h);
            }
            "cut" => {
                raw = true;
                expect_len(4)?;
                raw_cuts.push(Segment { axis: axis(1)?, x: int(2)?, y: int(3)? });
            }
            "remove" => {
                raw = true;
                expect_len(3)?;
                raw_removed.push(Cell::new(int(1)?, int(2)?));
            }
            _ => return Err(err(col0, format!("unknown directive `{head}`"))),
        }
    }
    let (w, h) = dims.ok_or(GridError::Syntax { line: 1, column: 1, message: "missing `poly` header".into() })?;
    if raw {
        for hole in &holes {
            let (r, c) = hole.expand();
            raw_removed.extend(r);
            raw_cuts.extend(c);
        }
        Polyomino::from_raw(w, h, raw_cuts, raw_removed)
    } else {
        Polyomino::build(w, h, holes)
    }
}

/// Whitespace-separated tokens with 1-based column numbers.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((st + 1, &s[st..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((st + 1, &s[st..]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> Polyomino {
        Polyomino::build(
            4,
            5,
            vec![
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 2 },
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 3, y: 2 },
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 1 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn build_examples() {
        let sq = Polyomino::build(3, 3, vec![HoleSpec::Square { x: 1, y: 1 }]).unwrap();
        assert_eq!(sq.removed_cells().len(), 1);
        assert!(sq.cuts().is_empty());
        assert_eq!(sq.cells().count(), 8);
        let p = fig3();
        assert_eq!(p.cuts().len(), 6);
        assert!(p.removed_cells().is_empty());
        let e = Polyomino::build(2, 2, vec![]).unwrap();
        assert_eq!(e.cells().count(), 4);
        assert_eq!(e.edges().len(), 4);
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            Polyomino::build(3, 3, vec![HoleSpec::Square { x: 0, y: 1 }]),
            Err(GridError::Boundary(0))
        );
        assert_eq!(
            Polyomino::build(4, 4, vec![HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 0 }]),
            Err(GridError::Boundary(0))
        );
        let touching = vec![
            HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 1 },
            HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 3 },
        ];
        assert_eq!(Polyomino::build(4, 6, touching), Err(GridError::Overlap(0, 1)));
        assert_eq!(Polyomino::build(0, 3, vec![]), Err(GridError::Dimensions(0, 3)));
        let ring = vec![HoleSpec::Raw {
            cuts: vec![Segment::v(1, 1), Segment::v(2, 1), Segment::h(1, 1), Segment::h(1, 2)],
            removed: vec![],
        }];
        assert_eq!(Polyomino::build(3, 3, ring), Err(GridError::Disconnected));
    }

    #[test]
    fn expansions_match_hole_shapes() {
        let (r, c) = HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 1 }.expand();
        assert!(r.is_empty());
        assert_eq!(c, vec![Segment::v(1, 1), Segment::v(1, 2)]);
        let (_, c) = HoleSpec::U { x: 1, y: 1, rotation: Rotation::R0 }.expand();
        let c: BTreeSet<_> = c.into_iter().collect();
        assert_eq!(c, BTreeSet::from([Segment::h(1, 1), Segment::v(1, 1), Segment::v(2, 1)]));
        let (_, c) = HoleSpec::L { x: 2, y: 2, rotation: Rotation::R90, flip: false }.expand();
        let c: BTreeSet<_> = c.into_iter().collect();
        assert_eq!(c, BTreeSet::from([Segment::v(2, 2), Segment::h(1, 2)]));
        let (_, c) = HoleSpec::L { x: 2, y: 2, rotation: Rotation::R0, flip: true }.expand();
        let c: BTreeSet<_> = c.into_iter().collect();
        assert_eq!(c, BTreeSet::from([Segment::v(2, 2), Segment::h(1, 2)]));
    }

    #[test]
    fn recognition_inverts_expansion() {
        let mut specs = vec![
            HoleSpec::Square { x: 3, y: 3 },
            HoleSpec::Slit2 { axis: Axis::Vertical, x: 3, y: 2 },
            HoleSpec::Slit2 { axis: Axis::Horizontal, x: 2, y: 3 },
            HoleSpec::Slit1 { axis: Axis::Horizontal, x: 3, y: 3 },
        ];
        for r in Rotation::ALL {
            specs.push(HoleSpec::L { x: 3, y: 3, rotation: r, flip: false });
            specs.push(HoleSpec::U { x: 3, y: 3, rotation: r });
        }
        for s in specs {
            let (r, c) = s.expand();
            assert_eq!(recognize_hole(&c, &r), s);
        }
    }

    #[test]
    fn fill_holes_examples() {
        let p = fig3();
        let two = p.fill_holes(&BTreeSet::from([0, 1])).unwrap();
        assert_eq!(two.holes().len(), 2);
        assert_eq!(two.cuts().len(), 4);
        assert_eq!(p.fill_holes(&BTreeSet::from([0, 1, 2])).unwrap(), p);
        let none = p.fill_holes(&BTreeSet::new()).unwrap();
        assert!(none.cuts().is_empty() && none.holes().is_empty());
        assert_eq!(p.fill_holes(&BTreeSet::from([7])), Err(GridError::HoleIndex(7)));
    }

    #[test]
    fn parity_examples() {
        let h = fig3().holes().to_vec();
        assert_eq!(separation_parity(&h[0], &h[1]), SeparationParity::Even);
        assert_eq!(separation_parity(&h[0], &h[2]), SeparationParity::Odd);
        let hz = HoleSpec::Slit2 { axis: Axis::Horizontal, x: 1, y: 1 };
        assert_eq!(separation_parity(&h[0], &hz), SeparationParity::Incomparable);
        let sq = HoleSpec::Square { x: 1, y: 1 };
        assert_eq!(separation_parity(&sq, &h[0]), SeparationParity::Incomparable);
    }

    #[test]
    fn trimming_keeps_holes_interior() {
        let p = Polyomino::build(5, 5, vec![HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 2 }]).unwrap();
        let q = p.trim_line(Dir::Down).unwrap();
        assert_eq!(q.holes(), &[HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 1 }][..]);
        assert_eq!(q.trim_line(Dir::Down), Err(GridError::Boundary(0)));
        let r = p.trim_line(Dir::Left).unwrap().trim_line(Dir::Right).unwrap();
        assert_eq!((r.width(), r.height()), (3, 5));
        assert_eq!(r.holes(), &[HoleSpec::Slit2 { axis: Axis::Vertical, x: 1, y: 2 }][..]);
    }

    #[test]
    fn contraction_examples() {
        let p = Polyomino::build(
            6,
            7,
            vec![
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 3 },
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 3, y: 4 },
            ],
        )
        .unwrap();
        let q = p.contract_plain_band(Band { axis: BandAxis::Rows, index: 0 }).unwrap();
        assert_eq!((q.width(), q.height()), (6, 5));
        let expected = [
            HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 1 },
            HoleSpec::Slit2 { axis: Axis::Vertical, x: 3, y: 2 },
        ];
        assert_eq!(q.holes(), &expected[..]);
        assert!(matches!(
            p.contract_plain_band(Band { axis: BandAxis::Rows, index: 3 }),
            Err(GridError::NotPlain(_))
        ));
        // Plain, but the slit above would end up on the outer boundary.
        let tight = Polyomino::build(6, 7, vec![HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 2 }]).unwrap();
        assert_eq!(
            tight.contract_plain_band(Band { axis: BandAxis::Rows, index: 0 }),
            Err(GridError::Boundary(0))
        );
        let c = p.contract_plain_band(Band { axis: BandAxis::Columns, index: 4 }).unwrap();
        assert_eq!((c.width(), c.height()), (4, 7));
    }

    #[test]
    fn symmetries_compose_with_inverse() {
        let p = Polyomino::build(
            5,
            7,
            vec![
                HoleSpec::L { x: 1, y: 1, rotation: Rotation::R0, flip: false },
                HoleSpec::U { x: 3, y: 4, rotation: Rotation::R90 },
                HoleSpec::Slit2 { axis: Axis::Vertical, x: 2, y: 3 },
            ],
        )
        .unwrap();
        for t in Symmetry::all() {
            let q = p.transformed(t);
            assert!(q.transformed(t.inverse()).same_shape(&p));
            assert_eq!(q.holes().len(), 3);
        }
    }

    #[test]
    fn parse_examples() {
        let text = "# fig\npoly 4 5\nhole slit2 v 1 2\nhole slit2 v 3 2\nhole slit2 v 2 1\n";
        let p = Polyomino::parse(text).unwrap();
        assert_eq!(p, fig3());
        assert_eq!(Polyomino::parse(&p.to_text()).unwrap(), p);
        let one = Polyomino::parse("poly 1 1").unwrap();
        assert_eq!(one.cells().count(), 1);
        let bad = Polyomino::parse("poly 4 5\nhole slot 1 2\n").unwrap_err();
        assert_eq!(bad, GridError::Syntax { line: 2, column: 6, message: "unknown hole kind `slot`".into() });
        let bad = Polyomino::parse("poly 4 5\nhole slit2 q 1 2\n").unwrap_err();
        assert!(matches!(bad, GridError::Syntax { line: 2, column: 12, .. }));
    }

    #[test]
    fn raw_mode_recognizes_holes() {
        let p = Polyomino::parse("poly 4 4\ncut v 2 1\ncut v 2 2\nremove 1 1\n");
        // The removed cell touches the slit at vertex (2,2): one raw hole.
        let p = p.unwrap();
        assert!(p.is_raw());
        assert_eq!(p.holes().len(), 1);
        assert_eq!(p.holes()[0].kind(), HoleKind::Raw);
        let q = Polyomino::parse("poly 5 5\ncut v 1 1\ncut v 1 2\nremove 3 3\n").unwrap();
        assert_eq!(q.holes().iter().map(|h| h.kind()).collect::<Vec<_>>(), vec![HoleKind::Slit2, HoleKind::Square]);
        assert_eq!(Polyomino::parse(&q.to_text()).unwrap(), q);
    }
}
