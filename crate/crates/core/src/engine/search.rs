//! Exhaustive depth-first search for consistent facemappings.
//!
//! Cells are placed in breadth-first order from the anchor. Each non-anchor
//! cell is reached through its parent edge, so choosing that edge's angle
//! fixes the cell's placement; every other edge back to a placed cell is
//! then a check. Crease rules from [`super::rules`] propagate forced angles
//! ahead of the placement front when pruning is on.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use super::rules::RuleIndex;
use super::{EngineError, Facemapping, Verdict, Witness};
use crate::cube::{face_of_index, step_index, all_placements, Dir, FaceLabel, FoldAngle, Placement};
use crate::grid::{Cell, Polyomino, Segment};

/// Default bound on search nodes.
pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

/// Environment variable overriding the default node limit.
pub const NODE_LIMIT_ENV: &str = "FOLDLAB_NODE_LIMIT";

/// The default node limit, honouring [`NODE_LIMIT_ENV`].
pub fn default_node_limit() -> u64 {
    std::env::var(NODE_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_NODE_LIMIT)
}

/// Search options.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Emit every consistent facemapping instead of stopping at the first onto one.
    pub enumerate_all: bool,
    pub node_limit: u64,
    pub use_lemma_pruning: bool,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            enumerate_all: false,
            node_limit: default_node_limit(),
            use_lemma_pruning: true,
            parallel: false,
        }
    }
}

/// Counters reported by a search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub conflicts: u64,
    pub emitted: u64,
    #[serde(with = "millis")]
    pub elapsed: Duration,
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

const UNSET: u8 = 0;
const A90: u8 = 1;
const A180: u8 = 2;

fn angle_code(a: FoldAngle) -> u8 {
    match a {
        FoldAngle::Fold90 => A90,
        FoldAngle::Fold180 => A180,
    }
}

/// An edge from an earlier cell in the order to a later one.
#[derive(Clone, Copy)]
struct Link {
    from: usize,
    dir: Dir,
    crease: usize,
}

/// Static description of one search.
struct Problem {
    width: i32,
    height: i32,
    /// Grid slot of each cell in placement order.
    slots: Vec<usize>,
    /// Parent link of each non-anchor cell.
    parent: Vec<Option<Link>>,
    /// Checks against earlier cells other than the parent.
    back: Vec<Vec<Link>>,
    creases: usize,
    rules: Option<RuleIndex>,
    labels: Option<Vec<FaceLabel>>,
    anchors: Vec<u8>,
    want_onto: bool,
}

impl Problem {
    fn new(p: &Polyomino, use_rules: bool) -> Problem {
        let start = p.cells().next().expect("polyomino has a cell");
        let mut pos: BTreeMap<Cell, usize> = BTreeMap::new();
        let mut order = vec![start];
        let mut parent = vec![None];
        pos.insert(start, 0);
        let edges = p.edges();
        let crease_index: BTreeMap<Segment, usize> = edges.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for d in Dir::ALL {
                if let Some(n) = p.neighbor(c, d) {
                    if let std::collections::btree_map::Entry::Vacant(e) = pos.entry(n) {
                        e.insert(order.len());
                        order.push(n);
                        parent.push(Some(Link { from: pos[&c], dir: d, crease: crease_index[&c.edge(d)] }));
                        queue.push_back(n);
                    }
                }
            }
        }
        let mut back = vec![Vec::new(); order.len()];
        for (&s, &ci) in &crease_index {
            let (a, b) = s.cells();
            let (ia, ib) = (pos[&a], pos[&b]);
            let (from, to, dir) = if ia < ib { (ia, ib, s.dir()) } else { (ib, ia, s.dir().opposite()) };
            if parent[to].map(|l| l.crease) != Some(ci) {
                back[to].push(Link { from, dir, crease: ci });
            }
        }
        Problem {
            width: p.width(),
            height: p.height(),
            slots: order.iter().map(|&c| p.index(c)).collect(),
            parent,
            back,
            creases: edges.len(),
            rules: use_rules.then(|| RuleIndex::new(p, &crease_index)),
            labels: None,
            anchors: vec![Placement::canonical().index() as u8],
            want_onto: false,
        }
    }

    fn facemapping(&self, place: &[u8]) -> Facemapping {
        let mut idx = vec![u8::MAX; (self.width * self.height) as usize];
        for (k, &s) in self.slots.iter().enumerate() {
            idx[s] = place[k];
        }
        Facemapping::from_indices(self.width, self.height, &idx)
    }
}

/// Mutable search state with an undo trail.
#[derive(Clone)]
struct State {
    place: Vec<u8>,
    angle: Vec<u8>,
    trail: Vec<usize>,
    faces: [u32; 7],
    covered: u32,
    queue: Vec<usize>,
}

impl State {
    fn new(pr: &Problem) -> State {
        State {
            place: vec![u8::MAX; pr.slots.len()],
            angle: vec![UNSET; pr.creases],
            trail: Vec::new(),
            faces: [0; 7],
            covered: 0,
            queue: Vec::new(),
        }
    }

    /// Assigns an angle and propagates rules; false on conflict.
    fn assign(&mut self, pr: &Problem, crease: usize, v: u8) -> bool {
        match self.angle[crease] {
            UNSET => {}
            old => return old == v,
        }
        self.angle[crease] = v;
        self.trail.push(crease);
        let Some(rules) = &pr.rules else { return true };
        self.queue.clear();
        self.queue.push(crease);
        while let Some(c) = self.queue.pop() {
            let known = self.angle[c];
            for &(o, eq) in &rules.adjacent[c] {
                let forced = if eq {
                    known
                } else if known == A90 {
                    A180
                } else {
                    continue;
                };
                match self.angle[o] {
                    UNSET => {
                        self.angle[o] = forced;
                        self.trail.push(o);
                        self.queue.push(o);
                    }
                    v if v != forced => return false,
                    _ => {}
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let c = self.trail.pop().unwrap();
            self.angle[c] = UNSET;
        }
    }

    fn put(&mut self, k: usize, pl: u8) {
        self.place[k] = pl;
        let f = face_of_index(pl) as usize;
        if self.faces[f] == 0 {
            self.covered += 1;
        }
        self.faces[f] += 1;
    }

    fn take(&mut self, k: usize) {
        let f = face_of_index(self.place[k]) as usize;
        self.faces[f] -= 1;
        if self.faces[f] == 0 {
            self.covered -= 1;
        }
        self.place[k] = u8::MAX;
    }
}

/// Shared counters and stop signal.
struct Control {
    nodes: AtomicU64,
    conflicts: AtomicU64,
    stop: AtomicBool,
    limit_hit: AtomicBool,
    limit: u64,
}

impl Control {
    fn new(limit: u64) -> Control {
        Control {
            nodes: AtomicU64::new(0),
            conflicts: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            limit_hit: AtomicBool::new(false),
            limit,
        }
    }

    fn tick(&self) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.limit {
            self.limit_hit.store(true, Ordering::Relaxed);
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

/// Places cell `k` with placement `pl` and checks its back edges.
fn try_place(pr: &Problem, st: &mut State, k: usize, pl: u8) -> bool {
    if let Some(labels) = &pr.labels {
        if face_of_index(pl) != labels[k] {
            return false;
        }
    }
    for l in &pr.back[k] {
        let from = st.place[l.from];
        let a = if step_index(from, l.dir, FoldAngle::Fold90) == pl {
            A90
        } else if step_index(from, l.dir, FoldAngle::Fold180) == pl {
            A180
        } else {
            return false;
        };
        if !st.assign(pr, l.crease, a) {
            return false;
        }
    }
    st.put(k, pl);
    if pr.want_onto && (st.covered as usize) + (pr.slots.len() - k - 1) < 6 {
        st.take(k);
        return false;
    }
    true
}

/// Depth-first search from cell `k`; `sink` returns `Break` to stop.
fn dfs(
    pr: &Problem,
    st: &mut State,
    k: usize,
    ctl: &Control,
    sink: &mut dyn FnMut(&State) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if k == pr.slots.len() {
        if pr.want_onto && st.covered < 6 {
            return ControlFlow::Continue(());
        }
        return sink(st);
    }
    let Some(link) = pr.parent[k] else {
        for &a in &pr.anchors {
            if !ctl.tick() {
                return ControlFlow::Break(());
            }
            let mark = st.trail.len();
            if try_place(pr, st, k, a) {
                let r = dfs(pr, st, k + 1, ctl, sink);
                st.take(k);
                st.undo(mark);
                r?;
            } else {
                st.undo(mark);
            }
        }
        return ControlFlow::Continue(());
    };
    for angle in FoldAngle::ALL {
        let code = angle_code(angle);
        let forced = st.angle[link.crease];
        if forced != UNSET && forced != code {
            continue;
        }
        if !ctl.tick() {
            return ControlFlow::Break(());
        }
        let mark = st.trail.len();
        let pl = step_index(st.place[link.from], link.dir, angle);
        if st.assign(pr, link.crease, code) && try_place(pr, st, k, pl) {
            let r = dfs(pr, st, k + 1, ctl, sink);
            st.take(k);
            st.undo(mark);
            r?;
        } else {
            ctl.conflicts.fetch_add(1, Ordering::Relaxed);
            st.undo(mark);
        }
    }
    ControlFlow::Continue(())
}

/// Number of leading cells fixed before the search fans out.
fn split_depth(pr: &Problem) -> usize {
    (pr.slots.len() - 1).min(8)
}

fn run(
    pr: &Problem,
    cfg: &SearchConfig,
    emit: &mut dyn FnMut(Facemapping) -> ControlFlow<()>,
) -> Result<SearchStats, EngineError> {
    let started = Instant::now();
    let ctl = Control::new(cfg.node_limit);
    let stop_after_first = !cfg.enumerate_all;
    let mut emitted = 0;
    if !cfg.parallel {
        let mut st = State::new(pr);
        let _ = dfs(pr, &mut st, 0, &ctl, &mut |s| {
            emitted += 1;
            match emit(pr.facemapping(&s.place)) {
                ControlFlow::Break(()) => ControlFlow::Break(()),
                ControlFlow::Continue(()) if stop_after_first => ControlFlow::Break(()),
                c => c,
            }
        });
    } else {
        let depth = split_depth(pr);
        let mut frontier: Vec<State> = Vec::new();
        let mut st = State::new(pr);
        {
            let pr_short = Problem { slots: pr.slots[..depth].to_vec(), want_onto: false, ..clone_problem(pr) };
            let _ = dfs(&pr_short, &mut st, 0, &ctl, &mut |s| {
                frontier.push(s.clone());
                ControlFlow::Continue(())
            });
        }
        let results: Vec<Vec<Vec<u8>>> = frontier
            .into_par_iter()
            .map(|mut s| {
                let mut found = Vec::new();
                let _ = dfs(pr, &mut s, depth, &ctl, &mut |s| {
                    found.push(s.place.clone());
                    if stop_after_first {
                        ctl.stop.store(true, Ordering::Relaxed);
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
                found
            })
            .collect();
        for place in results.into_iter().flatten() {
            emitted += 1;
            if emit(pr.facemapping(&place)).is_break() || stop_after_first {
                break;
            }
        }
    }
    let stats = SearchStats {
        nodes: ctl.nodes.load(Ordering::Relaxed).min(cfg.node_limit),
        conflicts: ctl.conflicts.load(Ordering::Relaxed),
        emitted,
        elapsed: started.elapsed(),
    };
    if ctl.limit_hit.load(Ordering::Relaxed) {
        return Err(EngineError::NodeLimitExceeded(cfg.node_limit));
    }
    Ok(stats)
}

fn clone_problem(pr: &Problem) -> Problem {
    Problem {
        width: pr.width,
        height: pr.height,
        slots: pr.slots.clone(),
        parent: pr.parent.clone(),
        back: pr.back.clone(),
        creases: pr.creases,
        rules: pr.rules.as_ref().map(|r| RuleIndex { adjacent: r.adjacent.clone() }),
        labels: pr.labels.clone(),
        anchors: pr.anchors.clone(),
        want_onto: pr.want_onto,
    }
}

/// Searches for facemappings with the anchor cell fixed to the canonical placement.
///
/// With `enumerate_all` every consistent facemapping is passed to `emit`;
/// otherwise only the first onto one is. Sequential runs emit in a fixed
/// order.
pub fn search_facemappings(
    p: &Polyomino,
    cfg: &SearchConfig,
    mut emit: impl FnMut(Facemapping) -> ControlFlow<()>,
) -> Result<SearchStats, EngineError> {
    let mut pr = Problem::new(p, cfg.use_lemma_pruning);
    pr.want_onto = !cfg.enumerate_all;
    run(&pr, cfg, &mut emit)
}

/// Collects the output of [`search_facemappings`].
pub fn collect_facemappings(p: &Polyomino, cfg: &SearchConfig) -> Result<(Vec<Facemapping>, SearchStats), EngineError> {
    let mut out = Vec::new();
    let stats = search_facemappings(p, cfg, |fm| {
        out.push(fm);
        ControlFlow::Continue(())
    })?;
    Ok((out, stats))
}

/// Every consistent anchored facemapping, by trying all angle choices on a
/// spanning tree and checking the remaining edges only at the leaves.
pub fn brute_force_facemappings(p: &Polyomino, cfg: &SearchConfig) -> Result<Vec<Facemapping>, EngineError> {
    let pr = Problem::new(p, false);
    let n = pr.slots.len();
    let tree = n - 1;
    if tree >= 63 || (1u64 << tree) > cfg.node_limit {
        return Err(EngineError::NodeLimitExceeded(cfg.node_limit));
    }
    let mut out = Vec::new();
    let mut place = vec![0u8; n];
    place[0] = Placement::canonical().index() as u8;
    for mask in 0..(1u64 << tree) {
        for k in 1..n {
            let l = pr.parent[k].unwrap();
            let angle = if mask >> (k - 1) & 1 == 0 { FoldAngle::Fold90 } else { FoldAngle::Fold180 };
            place[k] = step_index(place[l.from], l.dir, angle);
        }
        let ok = (1..n).all(|k| {
            pr.back[k].iter().all(|l| {
                FoldAngle::ALL.iter().any(|&a| step_index(place[l.from], l.dir, a) == place[k])
            })
        });
        if ok {
            out.push(pr.facemapping(&place));
        }
    }
    Ok(out)
}

/// Decides whether an onto facemapping exists.
pub fn exists_onto_facemapping(p: &Polyomino, cfg: &SearchConfig) -> Verdict {
    let cfg = SearchConfig { enumerate_all: false, ..*cfg };
    let mut found = None;
    match search_facemappings(p, &cfg, |fm| {
        found = Some(fm);
        ControlFlow::Break(())
    }) {
        Err(e) => Verdict::Unknown { reason: e.to_string() },
        Ok(_) => match found {
            Some(facemapping) => Verdict::FacemappingExists {
                reason: "exhaustive-search".into(),
                witness: Witness { facemapping, layers: None },
            },
            None => Verdict::UnfoldableCertified { reason: "no-onto-facemapping".into() },
        },
    }
}

/// Finds a consistent facemapping whose faces match `labels`, trying every
/// orientation of the anchor cell.
pub fn infer_orientations(p: &Polyomino, labels: &BTreeMap<Cell, FaceLabel>) -> Option<Facemapping> {
    if p.cells().any(|c| !labels.contains_key(&c)) {
        return None;
    }
    let mut pr = Problem::new(p, true);
    let order: Vec<Cell> = pr.slots.iter().map(|&s| p.cell_at(s)).collect();
    pr.labels = Some(order.iter().map(|c| labels[c]).collect());
    let anchor_face = labels[&order[0]];
    pr.anchors = all_placements()
        .iter()
        .filter(|pl| pl.face() == anchor_face)
        .map(|pl| pl.index() as u8)
        .collect();
    let cfg = SearchConfig { enumerate_all: true, ..SearchConfig::default() };
    let mut found = None;
    run(&pr, &cfg, &mut |fm| {
        found = Some(fm);
        ControlFlow::Break(())
    })
    .ok()?;
    found
}

/// Angle of each attached crease under a consistent facemapping.
pub fn crease_angles(p: &Polyomino, fm: &Facemapping) -> Result<BTreeMap<Segment, FoldAngle>, EngineError> {
    p.edges().into_iter().map(|e| super::implied_angle(p, fm, e).map(|a| (e, a))).collect()
}
