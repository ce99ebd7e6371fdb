//! Undirected simple graphs, `G(n, d/n)` generation and capped searches.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

pub type Vertex = usize;

/// Unordered vertex pair stored with the smaller endpoint first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(Vertex, Vertex);

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn lo(self) -> Vertex {
        self.0
    }

    pub fn hi(self) -> Vertex {
        self.1
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.0, self.1)
    }

    pub fn touches(self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.0, self.1)
    }
}

/// Simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Graph::empty(n);
        for (a, b) in edges {
            if !g.add_edge(a, b)? {
                return Err(Error::DuplicateEdge(Edge::new(a, b)));
            }
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|v| (0..n).filter(|&w| w != v).collect())
            .collect();
        Graph {
            adj,
            m: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn path(n: usize) -> Self {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles need at least three vertices");
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle edges are valid")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a < self.n() && b < self.n() && self.adj[a].binary_search(&b).is_ok()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.has_edge(e.lo(), e.hi())
    }

    /// Edges in canonical order: lexicographic on `(min, max)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(v, ns)| {
            let start = ns.partition_point(|&w| w <= v);
            ns[start..].iter().map(move |&w| Edge(v, w))
        })
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            })
        }
    }

    /// Inserts `{a, b}`. Returns `false` if it was already present.
    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<bool> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        match self.adj[a].binary_search(&b) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[a].insert(pos, b);
                let pos = self.adj[b].binary_search(&a).unwrap_err();
                self.adj[b].insert(pos, a);
                self.m += 1;
                Ok(true)
            }
        }
    }

    /// Deletes `{a, b}`. Returns `false` if it was absent.
    pub fn remove_edge(&mut self, a: Vertex, b: Vertex) -> bool {
        if !self.has_edge(a, b) {
            return false;
        }
        let pos = self.adj[a].binary_search(&b).unwrap();
        self.adj[a].remove(pos);
        let pos = self.adj[b].binary_search(&a).unwrap();
        self.adj[b].remove(pos);
        self.m -= 1;
        true
    }

    pub fn without_edge(&self, e: Edge) -> Graph {
        let mut g = self.clone();
        g.remove_edge(e.lo(), e.hi());
        g
    }

    pub fn with_edge(&self, e: Edge) -> Result<Graph> {
        let mut g = self.clone();
        g.add_edge(e.lo(), e.hi())?;
        Ok(g)
    }

    /// Verifies symmetry, sortedness, absence of loops/duplicates and the
    /// edge count.
    pub fn check_invariants(&self) -> Result<()> {
        let mut half = 0usize;
        for (v, ns) in self.adj.iter().enumerate() {
            for pair in ns.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(Error::DuplicateEdge(Edge::new(v, pair[1])));
                }
            }
            for &w in ns {
                self.check_vertex(w)?;
                if w == v {
                    return Err(Error::SelfLoop(v));
                }
                if self.adj[w].binary_search(&v).is_err() {
                    return Err(Error::Format(format!("asymmetric adjacency at {v}-{w}")));
                }
            }
            half += ns.len();
        }
        if half != 2 * self.m {
            return Err(Error::Format(format!(
                "edge count {} disagrees with adjacency ({half} endpoint slots)",
                self.m
            )));
        }
        Ok(())
    }

    /// Subgraph induced by `vertices` (sorted, distinct), relabelled to
    /// `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let adj = vertices
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter_map(|&w| vertices.binary_search(&w).ok())
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>();
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { adj, m }
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            n: self.n(),
            edges: self.edges().map(|e| [e.0, e.1]).collect(),
        };
        serde_json::to_string(&doc).expect("graph documents always serialise")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        doc.into_graph()
    }
}

/// On-disk form: `{"n": int, "edges": [[u, v], ...]}` with `u < v`, sorted.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
}

impl GraphDoc {
    pub fn into_graph(self) -> Result<Graph> {
        Graph::from_edges(self.n, self.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<&Graph> for GraphDoc {
    fn from(g: &Graph) -> Self {
        GraphDoc {
            n: g.n(),
            edges: g.edges().map(|e| [e.0, e.1]).collect(),
        }
    }
}

/// Samples `G(n, p)` with `p = d / n` by geometric skipping over the pairs
/// `(w, v)`, `w < v`, ordered by `v` then `w`.
pub fn generate_gnp(n: usize, d: f64, stream: &mut RandomStream) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if d.is_nan() || d < 0.0 || d > n as f64 {
        return Err(Error::param("d", format!("must lie in [0, n], got {d}")));
    }
    let p = d / n as f64;
    if p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p >= 1.0 {
        return Ok(Graph::complete(n));
    }
    let log_q = (1.0 - p).ln();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    let mut m = 0usize;
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r = stream.uniform_f64();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w = w.saturating_add(1).saturating_add(skip.min(i64::MAX as f64 / 4.0) as i64);
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            let u = w as usize;
            // Pairs arrive in increasing order per vertex, so lists stay sorted.
            adj[u].push(v);
            adj[v].push(u);
            m += 1;
        }
    }
    Ok(Graph { adj, m })
}

/// Reusable breadth-first search buffers with epoch stamping, so repeated
/// local searches cost only the explored region.
pub struct Explorer {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    epoch: u32,
    queue: VecDeque<Vertex>,
}

impl Explorer {
    pub fn new(n: usize) -> Self {
        Explorer {
            stamp: vec![0; n],
            dist: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
            self.dist.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.queue.clear();
    }

    /// BFS distance from `from` to `to` ignoring `skip`, if at most `cap`.
    pub fn distance_avoiding(
        &mut self,
        g: &Graph,
        from: Vertex,
        to: Vertex,
        cap: usize,
        skip: Option<Edge>,
    ) -> Option<usize> {
        if from == to {
            return Some(0);
        }
        if cap == 0 {
            return None;
        }
        self.reset(g.n());
        self.stamp[from] = self.epoch;
        self.dist[from] = 0;
        self.queue.push_back(from);
        while let Some(x) = self.queue.pop_front() {
            let dx = self.dist[x] as usize;
            if dx >= cap {
                continue;
            }
            for &y in g.neighbours(x) {
                if self.stamp[y] == self.epoch {
                    continue;
                }
                if skip == Some(Edge::new(x, y)) {
                    continue;
                }
                if y == to {
                    return Some(dx + 1);
                }
                self.stamp[y] = self.epoch;
                self.dist[y] = (dx + 1) as u32;
                self.queue.push_back(y);
            }
        }
        None
    }

    /// Length of the shortest cycle through `e` if it is at most `cap`.
    pub fn shortest_cycle_through(&mut self, g: &Graph, e: Edge, cap: usize) -> Option<usize> {
        if cap < 3 {
            return None;
        }
        self.distance_avoiding(g, e.lo(), e.hi(), cap - 1, Some(e))
            .map(|d| d + 1)
    }
}

/// Shortest cycle through `e`, computed as one plus the distance between its
/// endpoints once `e` is removed. `None` when no such cycle has length `<= cap`.
pub fn shortest_cycle_through_edge(g: &Graph, e: Edge, cap: usize) -> Result<Option<usize>> {
    if !g.contains(e) {
        return Err(Error::MissingEdge(e));
    }
    Ok(Explorer::new(g.n()).shortest_cycle_through(g, e, cap))
}

/// BFS distance between `v` and `u`, or `None` when it exceeds `cap`.
pub fn distance(g: &Graph, v: Vertex, u: Vertex, cap: usize) -> Result<Option<usize>> {
    g.check_vertex(v)?;
    g.check_vertex(u)?;
    Ok(Explorer::new(g.n()).distance_avoiding(g, v, u, cap, None))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted vertex ids; the first is the lowest.
    pub vertices: Vec<Vertex>,
    pub edges: usize,
}

impl Component {
    pub fn lowest(&self) -> Vertex {
        self.vertices[0]
    }

    /// `|E| - |V| + 1`.
    pub fn cyclomatic(&self) -> usize {
        self.edges + 1 - self.vertices.len()
    }
}

/// Connected components ordered by lowest vertex id.
pub fn components(g: &Graph) -> Vec<Component> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        stack.push(s);
        let mut vertices = Vec::new();
        let mut degree_sum = 0;
        while let Some(x) = stack.pop() {
            vertices.push(x);
            degree_sum += g.degree(x);
            for &y in g.neighbours(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        vertices.sort_unstable();
        out.push(Component {
            vertices,
            edges: degree_sum / 2,
        });
    }
    out
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() <= 1 || components(g).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamLabel;
    use proptest::prelude::*;

    fn stream(seed: u64) -> RandomStream {
        RandomStream::new(seed, StreamLabel::Generation)
    }

    #[test]
    fn gnp_extremes() {
        let g = generate_gnp(4, 0.0, &mut stream(1)).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 0);
        let g = generate_gnp(3, 3.0, &mut stream(1)).unwrap();
        assert_eq!(g, Graph::complete(3));
    }

    #[test]
    fn gnp_rejects_bad_parameters() {
        assert!(generate_gnp(10, -1.0, &mut stream(1)).is_err());
        assert!(generate_gnp(10, 11.0, &mut stream(1)).is_err());
        assert!(generate_gnp(0, 0.0, &mut stream(1)).is_err());
        assert!(generate_gnp(10, f64::NAN, &mut stream(1)).is_err());
    }

    #[test]
    fn gnp_is_deterministic_and_well_formed() {
        let a = generate_gnp(2000, 4.0, &mut stream(11)).unwrap();
        let b = generate_gnp(2000, 4.0, &mut stream(11)).unwrap();
        let c = generate_gnp(2000, 4.0, &mut stream(12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        a.check_invariants().unwrap();
    }

    #[test]
    fn gnp_edge_count_matches_binomial_mean() {
        // Edge count is Binomial(C(n,2), p); mean (n-1)d/2, sd sqrt(C(n,2) p (1-p)).
        let (n, d) = (10_000usize, 5.0);
        let pairs = (n * (n - 1) / 2) as f64;
        let p = d / n as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        assert!((mean - 24_997.5).abs() < 1e-6);
        let total: usize = (0..100)
            .map(|s| generate_gnp(n, d, &mut stream(s)).unwrap().m())
            .sum();
        let empirical = total as f64 / 100.0;
        assert!(
            (empirical - mean).abs() <= 3.0 * sd,
            "mean edge count {empirical} vs {mean} (sd {sd})"
        );
    }

    #[test]
    fn gnp_small_pair_frequencies() {
        // Every pair of a 5-vertex graph at p = 1/2 should appear about half the time.
        let mut hits = [[0u32; 5]; 5];
        for s in 0..4000 {
            let g = generate_gnp(5, 2.5, &mut stream(s)).unwrap();
            for e in g.edges() {
                hits[e.lo()][e.hi()] += 1;
            }
        }
        for a in 0..5 {
            for b in a + 1..5 {
                // sd = sqrt(4000 / 4) ~ 31.6
                assert!((hits[a][b] as i64 - 2000).abs() < 160, "{a}{b}: {}", hits[a][b]);
            }
        }
    }

    #[test]
    fn cycle_through_edge_examples() {
        let tri = Graph::cycle(3);
        assert_eq!(shortest_cycle_through_edge(&tri, Edge::new(0, 1), 10).unwrap(), Some(3));
        let tree = Graph::from_edges(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(shortest_cycle_through_edge(&tree, Edge::new(1, 2), 100).unwrap(), None);
        let c5 = Graph::cycle(5);
        assert_eq!(shortest_cycle_through_edge(&c5, Edge::new(0, 1), 10).unwrap(), Some(5));
        assert_eq!(shortest_cycle_through_edge(&c5, Edge::new(0, 1), 4).unwrap(), None);
        assert_eq!(shortest_cycle_through_edge(&c5, Edge::new(0, 1), 5).unwrap(), Some(5));
        assert!(shortest_cycle_through_edge(&c5, Edge::new(0, 2), 10).is_err());
    }

    #[test]
    fn distance_examples() {
        let p = Graph::path(4);
        assert_eq!(distance(&p, 2, 2, 0).unwrap(), Some(0));
        assert_eq!(distance(&p, 0, 3, 10).unwrap(), Some(3));
        assert_eq!(distance(&p, 0, 3, 2).unwrap(), None);
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(distance(&g, 0, 3, 5).unwrap(), None);
        assert!(distance(&g, 0, 9, 5).is_err());
    }

    #[test]
    fn component_examples() {
        let cs = components(&Graph::empty(3));
        assert_eq!(cs.len(), 3);
        assert!(cs.iter().all(|c| c.vertices.len() == 1 && c.edges == 0));

        let cs = components(&Graph::cycle(4));
        assert_eq!(cs.len(), 1);
        assert_eq!((cs[0].vertices.len(), cs[0].edges, cs[0].cyclomatic()), (4, 4, 1));

        let tree = Graph::from_edges(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)]).unwrap();
        let cs = components(&tree);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].cyclomatic(), 0);
    }

    #[test]
    fn canonical_json_is_stable() {
        let g = Graph::from_edges(4, [(3, 1), (0, 2), (1, 0)]).unwrap();
        assert_eq!(g.to_json(), r#"{"n":4,"edges":[[0,1],[0,2],[1,3]]}"#);
        assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,1],[1,0]]}"#).is_err());
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,2]]}"#).is_err());
    }

    #[test]
    fn mutation_keeps_invariants() {
        let mut g = Graph::cycle(6);
        assert!(g.remove_edge(2, 3));
        assert!(!g.remove_edge(2, 3));
        assert!(g.add_edge(0, 3).unwrap());
        assert!(!g.add_edge(3, 0).unwrap());
        assert!(g.add_edge(1, 1).is_err());
        g.check_invariants().unwrap();
        assert_eq!(g.m(), 6);
    }

    #[test]
    fn induced_relabels() {
        let g = Graph::cycle(6);
        let h = g.induced(&[1, 2, 3, 5]);
        assert_eq!(h.n(), 4);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![Edge::new(0, 1), Edge::new(1, 2)]);
    }

    /// All simple paths from `a` to `b` avoiding edge `skip`, shortest length.
    fn brute_cycle(g: &Graph, e: Edge) -> Option<usize> {
        fn dfs(g: &Graph, x: Vertex, target: Vertex, skip: Edge, on: &mut Vec<bool>, len: usize, best: &mut Option<usize>) {
            if x == target {
                *best = Some(best.map_or(len, |b| b.min(len)));
                return;
            }
            for &y in g.neighbours(x) {
                if on[y] || Edge::new(x, y) == skip {
                    continue;
                }
                on[y] = true;
                dfs(g, y, target, skip, on, len + 1, best);
                on[y] = false;
            }
        }
        let mut on = vec![false; g.n()];
        on[e.lo()] = true;
        let mut best = None;
        dfs(g, e.lo(), e.hi(), e, &mut on, 0, &mut best);
        best.map(|d| d + 1)
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
                let mut edges = Vec::new();
                let mut i = 0;
                for a in 0..n {
                    for b in a + 1..n {
                        if bits[i] {
                            edges.push((a, b));
                        }
                        i += 1;
                    }
                }
                Graph::from_edges(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn cycle_search_matches_path_enumeration(g in arb_graph(8), cap in 3usize..10) {
            for e in g.edges().collect::<Vec<_>>() {
                let brute = brute_cycle(&g, e).filter(|&l| l <= cap);
                prop_assert_eq!(shortest_cycle_through_edge(&g, e, cap).unwrap(), brute);
            }
        }

        #[test]
        fn distance_is_a_metric(g in arb_graph(9), a in 0usize..9, b in 0usize..9, c in 0usize..9) {
            let n = g.n();
            let (a, b, c) = (a % n, b % n, c % n);
            let d = |x, y| distance(&g, x, y, n).unwrap();
            prop_assert_eq!(d(a, b), d(b, a));
            if let (Some(ab), Some(bc)) = (d(a, b), d(b, c)) {
                let ac = d(a, c).expect("connected through b");
                prop_assert!(ac <= ab + bc);
            }
        }

        #[test]
        fn generated_graphs_are_well_formed(n in 1usize..200, d in 0.0f64..8.0, seed in any::<u64>()) {
            let d = d.min(n as f64);
            let g = generate_gnp(n, d, &mut stream(seed)).unwrap();
            prop_assert!(g.check_invariants().is_ok());
            prop_assert_eq!(g.edges().count(), g.m());
        }
    }
}
