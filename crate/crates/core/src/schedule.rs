//! Edge-deletion schedules `G_0 ⊂ G_1 ⊂ … ⊂ G_r = G`.
//!
//! An edge is deletable when it lies on some cycle but on no cycle shorter
//! than the threshold `L`. Deletion continues until no deletable edge is
//! left; the result is the base graph `G_0` plus the deleted edges in the
//! order they are re-inserted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components, Edge, Explorer, Graph, GraphDoc, Vertex};

/// `max(3, ceil(ln n / (9 ln d)))`.
pub fn default_threshold(n: usize, d: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::param("n", "threshold needs at least two vertices"));
    }
    if d.is_nan() || d <= 1.0 {
        return Err(Error::param(
            "d",
            format!("threshold formula needs d > 1, got {d}; pass L explicitly"),
        ));
    }
    let raw = ((n as f64).ln() / (9.0 * d.ln())).ceil();
    Ok((raw as usize).max(3))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeletionSchedule {
    base: Graph,
    /// `deletions[i]` turns `G_i` into `G_{i+1}`.
    deletions: Vec<Edge>,
    threshold: usize,
    source_d: Option<f64>,
}

impl DeletionSchedule {
    /// Assembles a schedule from parts without checking its invariants; use
    /// [`audit_schedule`] to validate.
    pub fn from_parts(base: Graph, deletions: Vec<Edge>, threshold: usize, source_d: Option<f64>) -> Self {
        DeletionSchedule {
            base,
            deletions,
            threshold,
            source_d,
        }
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn deletions(&self) -> &[Edge] {
        &self.deletions
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn source_n(&self) -> usize {
        self.base.n()
    }

    pub fn source_d(&self) -> Option<f64> {
        self.source_d
    }

    pub fn set_source_d(&mut self, d: f64) {
        self.source_d = Some(d);
    }

    pub fn r(&self) -> usize {
        self.deletions.len()
    }

    /// `G_i`, rebuilt by replaying the first `i` deletions onto `G_0`.
    pub fn graph_at(&self, i: usize) -> Result<Graph> {
        let mut g = self.base.clone();
        for e in &self.deletions[..i] {
            if !g.add_edge(e.lo(), e.hi())? {
                return Err(Error::DuplicateEdge(*e));
            }
        }
        Ok(g)
    }

    /// `G_r`, the input graph.
    pub fn full_graph(&self) -> Result<Graph> {
        self.graph_at(self.r())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ScheduleDoc::from(self)).expect("schedules always serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScheduleDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// On-disk form: `{"L": int, "base": <graph>, "deletions": [[v, u], ...]}`
/// with deletions in replay order.
#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    #[serde(rename = "L")]
    threshold: usize,
    base: GraphDoc,
    deletions: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source_d: Option<f64>,
}

impl From<&DeletionSchedule> for ScheduleDoc {
    fn from(s: &DeletionSchedule) -> Self {
        ScheduleDoc {
            threshold: s.threshold,
            base: GraphDoc::from(&s.base),
            deletions: s.deletions.iter().map(|e| [e.lo(), e.hi()]).collect(),
            source_d: s.source_d,
        }
    }
}

impl TryFrom<ScheduleDoc> for DeletionSchedule {
    type Error = Error;

    fn try_from(doc: ScheduleDoc) -> Result<Self> {
        let base = doc.base.into_graph()?;
        let mut deletions = Vec::with_capacity(doc.deletions.len());
        for [a, b] in doc.deletions {
            base.check_vertex(a)?;
            base.check_vertex(b)?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            deletions.push(Edge::new(a, b));
        }
        Ok(DeletionSchedule {
            base,
            deletions,
            threshold: doc.threshold,
            source_d: doc.source_d,
        })
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Builds the deletion schedule for threshold `threshold` (≥ 3).
///
/// Works in rounds. Each round marks the candidate edges (no cycle shorter
/// than `L` passes through them), then grows a spanning forest that takes
/// every non-candidate edge first and the candidates in reverse canonical
/// order. Candidates left out of that forest are deleted in canonical order;
/// the forest keeps every one of them on a cycle until it is removed, and
/// removing edges never creates short cycles, so each deletion is legal at
/// the moment it happens. Rounds repeat until no candidate lies on a cycle.
pub fn build_schedule(g: &Graph, threshold: usize) -> Result<DeletionSchedule> {
    if threshold < 3 {
        return Err(Error::param("L", format!("must be at least 3, got {threshold}")));
    }
    let n = g.n();
    let mut current = g.clone();
    let mut performed: Vec<Edge> = Vec::new();
    let mut explorer = Explorer::new(n);

    loop {
        let edges: Vec<Edge> = current.edges().collect();
        let mut candidates = Vec::new();
        let mut keep = DisjointSets::new(n);
        for &e in &edges {
            if explorer
                .shortest_cycle_through(&current, e, threshold - 1)
                .is_none()
            {
                candidates.push(e);
            } else {
                keep.union(e.lo(), e.hi());
            }
        }
        let mut doomed: Vec<Edge> = candidates
            .iter()
            .rev()
            .copied()
            .filter(|e| !keep.union(e.lo(), e.hi()))
            .collect();
        if doomed.is_empty() {
            break;
        }
        doomed.sort_unstable();
        for e in doomed {
            current.remove_edge(e.lo(), e.hi());
            performed.push(e);
        }
    }

    performed.reverse();
    Ok(DeletionSchedule {
        base: current,
        deletions: performed,
        threshold,
        source_d: None,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ComponentCensus {
    pub isolated: usize,
    pub tree: usize,
    pub unicyclic: usize,
    pub other: usize,
}

impl ComponentCensus {
    pub fn total(&self) -> usize {
        self.isolated + self.tree + self.unicyclic + self.other
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub r: usize,
    pub threshold: usize,
    pub max_component_cyclomatic: usize,
    pub census: ComponentCensus,
    /// Minimum of `dist(G_i, v_i, u_i)`; `None` when `r = 0`.
    pub min_pair_distance: Option<usize>,
    /// Steps whose pair is closer than `L - 1` in `G_i`.
    pub distance_violations: usize,
    /// Steps whose pair is already adjacent in `G_i`.
    pub replay_conflicts: usize,
    /// Edges of `G_0` that lie on a cycle but on no cycle shorter than `L`.
    pub long_cycle_edges: usize,
    /// `(1 + n^{-1/3}) d n / 2`, when the source degree is known.
    pub r_bound: Option<f64>,
    pub within_r_bound: Option<bool>,
}

impl ScheduleReport {
    pub fn is_clean(&self) -> bool {
        self.distance_violations == 0
            && self.replay_conflicts == 0
            && self.long_cycle_edges == 0
            && self.within_r_bound != Some(false)
    }
}

/// Recomputes every schedule invariant from scratch.
pub fn audit_schedule(s: &DeletionSchedule) -> ScheduleReport {
    let base = s.base();
    let n = base.n();
    let threshold = s.threshold();
    let mut explorer = Explorer::new(n);

    let mut census = ComponentCensus::default();
    let mut max_cyc = 0;
    for c in components(base) {
        let beta = c.cyclomatic();
        max_cyc = max_cyc.max(beta);
        match (c.vertices.len(), beta) {
            (1, _) => census.isolated += 1,
            (_, 0) => census.tree += 1,
            (_, 1) => census.unicyclic += 1,
            _ => census.other += 1,
        }
    }

    let mut long_cycle_edges = 0;
    for e in base.edges() {
        let short = explorer.shortest_cycle_through(base, e, threshold - 1).is_some();
        let on_cycle = explorer
            .distance_avoiding(base, e.lo(), e.hi(), n, Some(e))
            .is_some();
        if on_cycle && !short {
            long_cycle_edges += 1;
        }
    }

    let mut g = base.clone();
    let mut min_pair: Option<usize> = None;
    let mut distance_violations = 0;
    let mut replay_conflicts = 0;
    for &e in s.deletions() {
        let (v, u) = e.endpoints();
        if g.has_edge(v, u) {
            replay_conflicts += 1;
            continue;
        }
        // Unreachable pairs count as infinitely far apart.
        let dist = explorer.distance_avoiding(&g, v, u, n, None).unwrap_or(usize::MAX);
        min_pair = Some(min_pair.map_or(dist, |m| m.min(dist)));
        if dist < threshold - 1 {
            distance_violations += 1;
        }
        g.add_edge(v, u).expect("schedule vertices are in range");
    }

    let r = s.r();
    let r_bound = s
        .source_d()
        .map(|d| (1.0 + (n as f64).powf(-1.0 / 3.0)) * d * n as f64 / 2.0);
    ScheduleReport {
        r,
        threshold,
        max_component_cyclomatic: max_cyc,
        census,
        min_pair_distance: min_pair,
        distance_violations,
        replay_conflicts,
        long_cycle_edges,
        r_bound,
        within_r_bound: r_bound.map(|b| r as f64 <= b),
    }
}
