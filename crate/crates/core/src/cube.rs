//! The rolling-cube algebra.
//!
//! Cube vertices are ids `0..8` whose bit `i` is the coordinate on axis `i`.
//! A [`Placement`] lists the images of a grid cell's bottom-left,
//! bottom-right, top-right and top-left corners. Moving to a neighbouring
//! cell either rolls onto the adjacent face (a 90° crease) or flips back
//! onto the same face (a 180° crease).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;

/// A cube vertex id in `0..8`.
pub type CubeVertex = u8;

/// A cube face label in `1..=6`.
///
/// The labels follow the standard net: 1 is `z = 0`, 2 is `y = 1`,
/// 3 is `x = 1`, 4 is `z = 1`, 5 is `x = 0` and 6 is `y = 0`.
/// Opposite pairs are (1,4), (2,6) and (3,5).
pub type FaceLabel = u8;

/// All six face labels.
pub const FACES: [FaceLabel; 6] = [1, 2, 3, 4, 5, 6];

/// Direction from a cell to one of its grid neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dir {
    Right,
    Up,
    Left,
    Down,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Right, Dir::Up, Dir::Left, Dir::Down];

    pub fn opposite(self) -> Dir {
        match self {
            Dir::Right => Dir::Left,
            Dir::Up => Dir::Down,
            Dir::Left => Dir::Right,
            Dir::Down => Dir::Up,
        }
    }

    /// Grid offset of the neighbour in this direction.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::Right => (1, 0),
            Dir::Up => (0, 1),
            Dir::Left => (-1, 0),
            Dir::Down => (0, -1),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Dihedral angle of an attached crease. A 0° crease is impossible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FoldAngle {
    Fold90,
    Fold180,
}

impl FoldAngle {
    pub const ALL: [FoldAngle; 2] = [FoldAngle::Fold90, FoldAngle::Fold180];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FoldAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoldAngle::Fold90 => write!(f, "90"),
            FoldAngle::Fold180 => write!(f, "180"),
        }
    }
}

/// Error for a corner tuple that is not a face in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("corners {0:?} do not list one cube face in cyclic order")]
pub struct InvalidPlacement(pub [CubeVertex; 4]);

/// Images of a cell's corners in the order bottom-left, bottom-right,
/// top-right, top-left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Placement([CubeVertex; 4]);

impl<'de> Deserialize<'de> for Placement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let corners = <[CubeVertex; 4]>::deserialize(d)?;
        Placement::new(corners).map_err(serde::de::Error::custom)
    }
}

impl Placement {
    /// Validates a corner tuple.
    pub fn new(corners: [CubeVertex; 4]) -> Result<Placement, InvalidPlacement> {
        let ok = corners.iter().all(|&v| v < 8)
            && (0..4).all(|i| (corners[i] ^ corners[(i + 1) % 4]).count_ones() == 1)
            && corners[0] != corners[2]
            && corners[1] != corners[3]
            && common_axis(&corners).is_some();
        if ok {
            Ok(Placement(corners))
        } else {
            Err(InvalidPlacement(corners))
        }
    }

    /// The fixed anchor placement: face 1 with grid axes along cube axes.
    pub const fn canonical() -> Placement {
        Placement([0, 1, 3, 2])
    }

    pub fn corners(self) -> [CubeVertex; 4] {
        self.0
    }

    /// Bit mask of the axis normal to the placement's face.
    fn normal_bit(self) -> u8 {
        1 << common_axis(&self.0).expect("valid placement")
    }

    /// The face label whose vertex set equals the corners.
    pub fn face(self) -> FaceLabel {
        let axis = common_axis(&self.0).expect("valid placement");
        let value = (self.0[0] >> axis) & 1;
        match (axis, value) {
            (2, 0) => 1,
            (1, 1) => 2,
            (0, 1) => 3,
            (2, 1) => 4,
            (0, 0) => 5,
            _ => 6,
        }
    }

    /// Placement of the neighbour in direction `dir` across a crease of the given angle.
    pub fn step(self, dir: Dir, angle: FoldAngle) -> Placement {
        let p = self.0;
        let n = self.normal_bit();
        let far = |near: u8, back: u8| match angle {
            FoldAngle::Fold90 => near ^ n,
            FoldAngle::Fold180 => back,
        };
        Placement(match dir {
            Dir::Right => [p[1], far(p[1], p[0]), far(p[2], p[3]), p[2]],
            Dir::Up => [p[3], p[2], far(p[2], p[1]), far(p[3], p[0])],
            Dir::Left => [far(p[0], p[1]), p[0], p[3], far(p[3], p[2])],
            Dir::Down => [far(p[0], p[3]), far(p[1], p[2]), p[1], p[0]],
        })
    }

    /// The 90° transition onto the adjacent face.
    pub fn roll(self, dir: Dir) -> Placement {
        self.step(dir, FoldAngle::Fold90)
    }

    /// The 180° transition back onto the same face, mirrored.
    pub fn flip(self, dir: Dir) -> Placement {
        self.step(dir, FoldAngle::Fold180)
    }

    /// Angle of the crease when `next` sits in direction `dir`, if the two are related.
    pub fn relation(self, dir: Dir, next: Placement) -> Option<FoldAngle> {
        let t = tables();
        let i = self.index();
        let j = next.index() as u8;
        FoldAngle::ALL
            .into_iter()
            .find(|a| t.step[i][dir.index()][a.index()] == j)
    }

    /// Orientation sign of the corner cycle relative to the outward face normal.
    pub fn handedness(self) -> i8 {
        let pos = |v: u8| [(v & 1) as i32, ((v >> 1) & 1) as i32, ((v >> 2) & 1) as i32];
        let sub = |a: [i32; 3], b: [i32; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        let c0 = pos(self.0[0]);
        let e1 = sub(pos(self.0[1]), c0);
        let e2 = sub(pos(self.0[3]), c0);
        let cross = [
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ];
        let axis = common_axis(&self.0).expect("valid placement") as usize;
        let outward = if c0[axis] == 1 { 1 } else { -1 };
        if cross[axis] * outward > 0 {
            1
        } else {
            -1
        }
    }

    /// Dense index in `0..48`, ordered like [`all_placements`].
    pub fn index(self) -> usize {
        let t = tables();
        t.index_of[code(self.0)] as usize
    }

    pub fn from_index(i: usize) -> Placement {
        tables().all[i]
    }

    /// Corners rearranged after applying a grid symmetry to the cell.
    pub(crate) fn permuted(self, perm: [usize; 4]) -> Placement {
        Placement([self.0[perm[0]], self.0[perm[1]], self.0[perm[2]], self.0[perm[3]]])
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{}]", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// The axis on which all corners agree, if exactly one exists.
fn common_axis(c: &[CubeVertex; 4]) -> Option<u8> {
    let ones = c[0] & c[1] & c[2] & c[3];
    let zeros = !(c[0] | c[1] | c[2] | c[3]) & 7;
    let m = ones | zeros;
    (m.count_ones() == 1).then(|| m.trailing_zeros() as u8)
}

fn code(c: [CubeVertex; 4]) -> usize {
    ((c[0] as usize) << 9) | ((c[1] as usize) << 6) | ((c[2] as usize) << 3) | c[3] as usize
}

struct Tables {
    all: Vec<Placement>,
    index_of: Vec<u8>,
    step: Vec<[[u8; 2]; 4]>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut all = Vec::with_capacity(48);
        for a in 0..8u8 {
            for b in 0..8u8 {
                for c in 0..8u8 {
                    for d in 0..8u8 {
                        if let Ok(p) = Placement::new([a, b, c, d]) {
                            all.push(p);
                        }
                    }
                }
            }
        }
        let mut index_of = vec![u8::MAX; 1 << 12];
        for (i, p) in all.iter().enumerate() {
            index_of[code(p.0)] = i as u8;
        }
        let step = all
            .iter()
            .map(|p| {
                Dir::ALL.map(|d| FoldAngle::ALL.map(|a| index_of[code(p.step(d, a).0)]))
            })
            .collect();
        Tables { all, index_of, step }
    })
}

/// Table lookup of [`Placement::step`] on dense indices.
#[inline]
pub(crate) fn step_index(p: u8, dir: Dir, angle: FoldAngle) -> u8 {
    tables().step[p as usize][dir.index()][angle.index()]
}

/// Face label of a dense placement index.
#[inline]
pub(crate) fn face_of_index(p: u8) -> FaceLabel {
    static F: OnceLock<Vec<FaceLabel>> = OnceLock::new();
    F.get_or_init(|| tables().all.iter().map(|p| p.face()).collect())[p as usize]
}

/// All 48 placements in lexicographic corner order.
pub fn all_placements() -> &'static [Placement] {
    &tables().all
}

/// The fixed anchor placement on face 1.
pub fn canonical_placement() -> Placement {
    Placement::canonical()
}

pub fn roll(p: Placement, dir: Dir) -> Placement {
    p.roll(dir)
}

pub fn flip(p: Placement, dir: Dir) -> Placement {
    p.flip(dir)
}

pub fn face_of(p: Placement) -> FaceLabel {
    p.face()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Signed permutation matrices, the 48 symmetries of the cube.
    fn symmetries() -> Vec<[[i32; 3]; 3]> {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::new();
        for p in perms {
            for signs in 0..8 {
                let mut m = [[0; 3]; 3];
                for r in 0..3 {
                    m[r][p[r]] = if signs >> r & 1 == 1 { -1 } else { 1 };
                }
                out.push(m);
            }
        }
        out
    }

    /// Applies a symmetry to a vertex id, acting on the cube centred at the origin.
    fn act(m: &[[i32; 3]; 3], v: u8) -> u8 {
        let c: Vec<i32> = (0..3).map(|i| 2 * ((v >> i) & 1) as i32 - 1).collect();
        let mut out = 0;
        for (r, row) in m.iter().enumerate() {
            let x: i32 = (0..3).map(|k| row[k] * c[k]).sum();
            if x > 0 {
                out |= 1 << r;
            }
        }
        out
    }

    #[test]
    fn placements_are_the_orbit_of_the_canonical_one() {
        let orbit: BTreeSet<_> = symmetries()
            .iter()
            .map(|m| Placement(Placement::canonical().0.map(|v| act(m, v))))
            .collect();
        let all: BTreeSet<_> = all_placements().iter().copied().collect();
        assert_eq!(orbit.len(), 48);
        assert_eq!(orbit, all);
    }

    #[test]
    fn group_laws_hold_exhaustively() {
        for &p in all_placements() {
            for d in Dir::ALL {
                assert_eq!(p.roll(d).roll(d).roll(d).roll(d), p);
                assert_eq!(p.flip(d).flip(d), p);
                assert_eq!(p.roll(d).roll(d.opposite()), p);
                assert_eq!(p.flip(d).face(), p.face());
                assert_ne!(p.roll(d).face(), p.face());
                assert_eq!(p.flip(d).handedness(), -p.handedness());
                assert_eq!(p.roll(d).handedness(), p.handedness());
            }
        }
    }

    #[test]
    fn roll_lands_on_the_face_across_the_shared_edge() {
        // Geometric construction: the neighbour face contains the shared edge,
        // differs from the current face, and its far corners are the shared
        // corners' cube neighbours on that face.
        for &p in all_placements() {
            let c = p.corners();
            for (d, (s0, s1), (n0, n1)) in [
                (Dir::Right, (1, 2), (0, 3)),
                (Dir::Up, (3, 2), (0, 1)),
                (Dir::Left, (0, 3), (1, 2)),
                (Dir::Down, (0, 1), (3, 2)),
            ] {
                let q = p.roll(d).corners();
                assert_eq!((q[n0], q[n1]), (c[s0], c[s1]));
                let face: BTreeSet<u8> = q.iter().copied().collect();
                let own: BTreeSet<u8> = c.iter().copied().collect();
                assert_eq!(face.intersection(&own).count(), 2);
                assert!(Placement::new(q).is_ok());
            }
        }
    }

    #[test]
    fn net_folding_labels_faces() {
        // The standard net: face 1 in the middle, 2 above, 3 right, 5 left,
        // 6 below, and 4 above 2.
        let c = Placement::canonical();
        assert_eq!(c.face(), 1);
        assert_eq!(c.roll(Dir::Up).face(), 2);
        assert_eq!(c.roll(Dir::Right).face(), 3);
        assert_eq!(c.roll(Dir::Up).roll(Dir::Up).face(), 4);
        assert_eq!(c.roll(Dir::Left).face(), 5);
        assert_eq!(c.roll(Dir::Down).face(), 6);
    }

    #[test]
    fn relation_and_indices_agree() {
        for (i, &p) in all_placements().iter().enumerate() {
            assert_eq!(p.index(), i);
            assert_eq!(Placement::from_index(i), p);
            for d in Dir::ALL {
                assert_eq!(p.relation(d, p.roll(d)), Some(FoldAngle::Fold90));
                assert_eq!(p.relation(d, p.flip(d)), Some(FoldAngle::Fold180));
                assert_eq!(p.relation(d, p), None);
            }
        }
        let faces: Vec<usize> = FACES
            .iter()
            .map(|f| all_placements().iter().filter(|p| p.face() == *f).count())
            .collect();
        assert_eq!(faces, vec![8; 6]);
    }

    #[test]
    fn invalid_tuples_are_rejected() {
        assert!(Placement::new([0, 1, 2, 3]).is_err());
        assert!(Placement::new([0, 1, 3, 3]).is_err());
        assert!(Placement::new([0, 1, 5, 4]).is_ok());
        assert!(Placement::new([0, 8, 3, 2]).is_err());
    }
}
