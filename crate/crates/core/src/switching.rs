//! Disagreement components, colour switching and the single-edge update step.

use std::collections::VecDeque;

use crate::base::Colouring;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Vertex};
use crate::rng::Chooser;
use crate::Colour;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Good,
    Bad,
}

/// Bad when `v` and `u` share a colour.
pub fn classify(colouring: &Colouring, v: Vertex, u: Vertex) -> Classification {
    if colouring.colour(v) == colouring.colour(u) {
        Classification::Bad
    } else {
        Classification::Good
    }
}

/// Maximal connected set of vertices reachable from `root` through vertices
/// coloured `colour_c` or `colour_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisagreementComponent {
    pub root: Vertex,
    pub colour_c: Colour,
    pub colour_q: Colour,
    /// Sorted.
    pub class_c: Vec<Vertex>,
    /// Sorted.
    pub class_q: Vec<Vertex>,
    pub contains_u: bool,
    /// Adjacency entries inspected while exploring.
    pub edges_scanned: usize,
}

impl DisagreementComponent {
    pub fn size(&self) -> usize {
        self.class_c.len() + self.class_q.len()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut all: Vec<Vertex> = self.class_c.iter().chain(&self.class_q).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn contains(&self, w: Vertex) -> bool {
        self.class_c.binary_search(&w).is_ok() || self.class_q.binary_search(&w).is_ok()
    }

    /// Checks the class, bipartiteness, connectivity and maximality
    /// properties against the colouring the component was computed from.
    pub fn check_invariants(&self, g: &Graph, colouring: &Colouring, skip: Option<Edge>) -> std::result::Result<(), String> {
        let (c, q) = (self.colour_c, self.colour_q);
        if self.class_c.binary_search(&self.root).is_err() {
            return Err("root missing from its class".into());
        }
        if self.class_c.iter().any(|w| self.class_q.binary_search(w).is_ok()) {
            return Err("classes overlap".into());
        }
        if self.class_c.iter().any(|&w| colouring.colour(w) != c) || self.class_q.iter().any(|&w| colouring.colour(w) != q) {
            return Err("class colour mismatch".into());
        }
        let usable = |a: Vertex, b: Vertex| skip != Some(Edge::new(a, b));
        let members = self.vertices();
        for &a in &members {
            for &b in g.neighbours(a) {
                if !usable(a, b) {
                    continue;
                }
                let colour_b = colouring.colour(b);
                if colour_b == colouring.colour(a) && self.contains(b) {
                    return Err(format!("edge {{{a}, {b}}} inside one class"));
                }
                if (colour_b == c || colour_b == q) && !self.contains(b) {
                    return Err(format!("vertex {b} should belong to the component"));
                }
            }
        }
        // Connectivity: BFS inside the member set reaches everything.
        let mut seen = vec![self.root];
        let mut queue = VecDeque::from([self.root]);
        while let Some(a) = queue.pop_front() {
            for &b in g.neighbours(a) {
                if usable(a, b) && self.contains(b) && !seen.contains(&b) {
                    seen.push(b);
                    queue.push_back(b);
                }
            }
        }
        if seen.len() != members.len() {
            return Err("component is disconnected".into());
        }
        Ok(())
    }
}

/// Disagreement component of `v` for colours `colouring(v)` and `q` in `g`.
pub fn disagreement_component(
    g: &Graph,
    colouring: &Colouring,
    v: Vertex,
    q: Colour,
    u: Vertex,
) -> Result<DisagreementComponent> {
    StepEngine::new(g.n()).component(g, colouring, v, q, u, None)
}

/// Exchanges the two colours on the component's classes.
pub fn q_switch(colouring: &Colouring, component: &DisagreementComponent) -> Colouring {
    let mut out = colouring.clone();
    apply_switch(&mut out, component);
    out
}

fn apply_switch(colouring: &mut Colouring, component: &DisagreementComponent) {
    for &w in &component.class_c {
        colouring.set(w, component.colour_q);
    }
    for &w in &component.class_q {
        colouring.set(w, component.colour_c);
    }
}

fn revert_switch(colouring: &mut Colouring, component: &DisagreementComponent) {
    for &w in &component.class_c {
        colouring.set(w, component.colour_c);
    }
    for &w in &component.class_q {
        colouring.set(w, component.colour_q);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepMode {
    /// One switch colour; the output may remain bad.
    Faithful,
    /// Switch colours drawn without replacement until one resolves.
    Retry,
}

#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub colouring: Colouring,
    pub was_bad: bool,
    pub chosen_q: Option<Colour>,
    pub resolved: bool,
    pub retries_used: usize,
    /// The component switched last, if any.
    pub component: Option<DisagreementComponent>,
}

impl StepOutcome {
    pub fn component_size(&self) -> usize {
        self.component.as_ref().map_or(0, DisagreementComponent::size)
    }
}

/// Reusable exploration state so repeated steps on one graph avoid
/// per-call allocation proportional to the vertex count.
pub struct StepEngine {
    stamp: Vec<u32>,
    epoch: u32,
    queue: VecDeque<Vertex>,
}

impl StepEngine {
    pub fn new(n: usize) -> Self {
        StepEngine {
            stamp: vec![0; n],
            epoch: 0,
            queue: VecDeque::new(),
        }
    }

    fn next_epoch(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        if self.epoch == u32::MAX {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
    }

    /// Disagreement component in `g` with the edge `skip` removed.
    pub fn component(
        &mut self,
        g: &Graph,
        colouring: &Colouring,
        v: Vertex,
        q: Colour,
        u: Vertex,
        skip: Option<Edge>,
    ) -> Result<DisagreementComponent> {
        g.check_vertex(v)?;
        g.check_vertex(u)?;
        let c = colouring.colour(v);
        if q == c {
            return Err(Error::param("q", format!("switch colour must differ from the root colour {c}")));
        }
        if q as usize >= colouring.k() {
            return Err(Error::ColourOutOfRange {
                colour: q,
                k: colouring.k(),
            });
        }
        self.next_epoch(g.n());
        let epoch = self.epoch;
        let mut class_c = Vec::new();
        let mut class_q = Vec::new();
        let mut scanned = 0;
        self.stamp[v] = epoch;
        self.queue.clear();
        self.queue.push_back(v);
        while let Some(a) = self.queue.pop_front() {
            if colouring.colour(a) == c {
                class_c.push(a);
            } else {
                class_q.push(a);
            }
            for &b in g.neighbours(a) {
                scanned += 1;
                if self.stamp[b] == epoch || skip == Some(Edge::new(a, b)) {
                    continue;
                }
                let colour_b = colouring.colour(b);
                if colour_b == c || colour_b == q {
                    self.stamp[b] = epoch;
                    self.queue.push_back(b);
                }
            }
        }
        let contains_u = self.stamp[u] == epoch;
        class_c.sort_unstable();
        class_q.sort_unstable();
        Ok(DisagreementComponent {
            root: v,
            colour_c: c,
            colour_q: q,
            class_c,
            class_q,
            contains_u,
            edges_scanned: scanned,
        })
    }

    /// One update step for the edge `{v, u}` of `g_next`; `x` must be proper
    /// on `g_next` without that edge.
    pub fn step<C: Chooser>(
        &mut self,
        g_next: &Graph,
        v: Vertex,
        u: Vertex,
        mut x: Colouring,
        chooser: &mut C,
        mode: StepMode,
    ) -> Result<StepOutcome> {
        let k = x.k();
        if k < 2 {
            return Err(Error::param("k", "needs at least 2 colours"));
        }
        let edge = Edge::new(v, u);
        if !g_next.contains(edge) {
            return Err(Error::MissingEdge(edge));
        }
        if classify(&x, v, u) == Classification::Good {
            return Ok(StepOutcome {
                colouring: x,
                was_bad: false,
                chosen_q: None,
                resolved: true,
                retries_used: 0,
                component: None,
            });
        }
        let c = x.colour(v);
        let skip_c = |i: usize| if i < c as usize { i as Colour } else { i as Colour + 1 };
        match mode {
            StepMode::Faithful => {
                let q = skip_c(chooser.pick_uniform(k - 1));
                let comp = self.component(g_next, &x, v, q, u, Some(edge))?;
                apply_switch(&mut x, &comp);
                Ok(StepOutcome {
                    colouring: x,
                    was_bad: true,
                    chosen_q: Some(q),
                    resolved: !comp.contains_u,
                    retries_used: 0,
                    component: Some(comp),
                })
            }
            StepMode::Retry => {
                let mut remaining: Vec<Colour> = (0..k - 1).map(skip_c).collect();
                let mut attempts = 0;
                loop {
                    let q = remaining.remove(chooser.pick_uniform(remaining.len()));
                    let comp = self.component(g_next, &x, v, q, u, Some(edge))?;
                    apply_switch(&mut x, &comp);
                    attempts += 1;
                    if !comp.contains_u || remaining.is_empty() {
                        return Ok(StepOutcome {
                            colouring: x,
                            was_bad: true,
                            chosen_q: Some(q),
                            resolved: !comp.contains_u,
                            retries_used: attempts - 1,
                            component: Some(comp),
                        });
                    }
                    // Back to the input colouring: switching twice is the identity.
                    revert_switch(&mut x, &comp);
                }
            }
        }
    }
}

/// One update step with a fresh engine.
pub fn step<C: Chooser>(
    g_next: &Graph,
    v: Vertex,
    u: Vertex,
    x: Colouring,
    chooser: &mut C,
    mode: StepMode,
) -> Result<StepOutcome> {
    StepEngine::new(g_next.n()).step(g_next, v, u, x, chooser, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RandomStream, StreamLabel};
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn col(cs: &[Colour], k: usize) -> Colouring {
        Colouring::new(cs.to_vec(), k).unwrap()
    }

    /// Replays a fixed sequence of uniform picks.
    struct Script(Vec<usize>);

    impl Chooser for Script {
        fn pick_uniform(&mut self, n: usize) -> usize {
            let i = self.0.remove(0);
            assert!(i < n);
            i
        }
        fn pick_weighted(&mut self, _: &[num_bigint::BigUint]) -> usize {
            unreachable!()
        }
    }

    #[test]
    fn classification() {
        let x = col(&[1, 1, 2], 3);
        assert_eq!(classify(&x, 0, 1), Classification::Bad);
        assert_eq!(classify(&x, 0, 2), Classification::Good);
    }

    #[test]
    fn component_examples() {
        let p = Graph::path(3);
        let comp = disagreement_component(&p, &col(&[1, 2, 1], 3), 0, 2, 2).unwrap();
        assert_eq!(comp.vertices(), vec![0, 1, 2]);
        assert_eq!(comp.class_c, vec![0, 2]);
        assert!(comp.contains_u);
        let comp = disagreement_component(&p, &col(&[1, 0, 1], 3), 0, 2, 2).unwrap();
        assert_eq!(comp.vertices(), vec![0]);
        assert!(!comp.contains_u);
        let lone = Graph::empty(2);
        let comp = disagreement_component(&lone, &col(&[0, 1], 3), 0, 1, 1).unwrap();
        assert_eq!(comp.vertices(), vec![0]);
        assert!(disagreement_component(&p, &col(&[1, 2, 1], 3), 0, 1, 2).is_err());
    }

    #[test]
    fn switch_example_and_involution() {
        let p = Graph::path(3);
        let x = col(&[1, 2, 1], 3);
        let comp = disagreement_component(&p, &x, 0, 2, 2).unwrap();
        let y = q_switch(&x, &comp);
        assert_eq!(y.colours(), &[2, 1, 2]);
        assert!(y.is_proper(&p));
        let back = disagreement_component(&p, &y, 0, 1, 2).unwrap();
        assert_eq!(q_switch(&y, &back), x);
    }

    #[test]
    fn good_input_passes_through() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let x = col(&[0, 1, 2], 3);
        let out = step(&g, 0, 2, x.clone(), &mut Script(vec![]), StepMode::Faithful).unwrap();
        assert_eq!(out.colouring, x);
        assert!(!out.was_bad && out.resolved && out.chosen_q.is_none());
    }

    #[test]
    fn bad_triangle_both_branches() {
        // Path 0-1-2 plus the restored edge {0, 2}; colours (0, 2, 0), k = 3.
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let x = col(&[0, 2, 0], 3);
        // Index 0 skips colour 0 and gives q = 1: only the root switches.
        let out = step(&g, 0, 2, x.clone(), &mut Script(vec![0]), StepMode::Faithful).unwrap();
        assert_eq!(out.chosen_q, Some(1));
        assert_eq!(out.colouring.colours(), &[1, 2, 0]);
        assert!(out.resolved && out.colouring.is_proper(&g));
        // q = 2 pulls in the middle vertex and then u: still bad.
        let out = step(&g, 0, 2, x.clone(), &mut Script(vec![1]), StepMode::Faithful).unwrap();
        assert_eq!(out.chosen_q, Some(2));
        assert_eq!(out.colouring.colours(), &[2, 0, 2]);
        assert!(!out.resolved);
        assert_eq!(out.component_size(), 3);
        // Retry mode falls back from q = 2 to q = 1, starting again from x.
        let out = step(&g, 0, 2, x, &mut Script(vec![1, 0]), StepMode::Retry).unwrap();
        assert_eq!(out.colouring.colours(), &[1, 2, 0]);
        assert_eq!(out.retries_used, 1);
        assert!(out.resolved);
    }

    #[test]
    fn retry_exhaustion_reports_unresolved() {
        // k = 2 on an even cycle: the only other colour always reaches u.
        let g = Graph::cycle(4);
        let x = col(&[0, 1, 0, 1], 2);
        let out = step(&g, 0, 2, x, &mut Script(vec![]), StepMode::Retry);
        // {0, 2} is not an edge of C4.
        assert!(matches!(out, Err(Error::MissingEdge(_))));
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let x = col(&[0, 1, 0], 2);
        let out = step(&g, 0, 2, x, &mut Script(vec![0]), StepMode::Retry).unwrap();
        assert!(!out.resolved);
        assert_eq!(out.retries_used, 0);
        assert_eq!(out.colouring.colours(), &[1, 0, 1]);
    }

    #[test]
    fn faithful_q_is_uniform() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let x = col(&[0, 2, 0], 4);
        let mut s = RandomStream::new(5, StreamLabel::Step(0));
        let mut counts: HashMap<Colour, usize> = HashMap::new();
        let draws = 30_000;
        for _ in 0..draws {
            let out = step(&g, 0, 2, x.clone(), &mut s, StepMode::Faithful).unwrap();
            *counts.entry(out.chosen_q.unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        let sd = (draws as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - draws as f64 / 3.0).abs() < 4.0 * sd, "{counts:?}");
        }
    }

    fn proper_colourings(g: &Graph, k: usize) -> Vec<Colouring> {
        let n = g.n();
        let mut out = Vec::new();
        let mut cs = vec![0 as Colour; n];
        loop {
            if g.edges().all(|e| cs[e.lo()] != cs[e.hi()]) {
                out.push(Colouring::new(cs.clone(), k).unwrap());
            }
            let mut i = 0;
            while i < n {
                cs[i] += 1;
                if (cs[i] as usize) < k {
                    break;
                }
                cs[i] = 0;
                i += 1;
            }
            if i == n {
                return out;
            }
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..=6).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                let pairs = (0..n).flat_map(|b| (0..b).map(move |a| (a, b)));
                Graph::from_edges(n, pairs.zip(bits).filter(|(_, keep)| *keep).map(|(p, _)| p)).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn switching_preserves_properness(g in arb_graph(), k in 2usize..=4) {
            let mut engine = StepEngine::new(g.n());
            for x in proper_colourings(&g, k) {
                for v in 0..g.n() {
                    for q in (0..k as Colour).filter(|&q| q != x.colour(v)) {
                        let comp = engine.component(&g, &x, v, q, 0, None).unwrap();
                        prop_assert!(comp.check_invariants(&g, &x, None).is_ok());
                        prop_assert!(comp.size() <= g.m() + 1);
                        let y = q_switch(&x, &comp);
                        prop_assert!(y.is_proper(&g));
                        let back = engine.component(&g, &y, v, x.colour(v), 0, None).unwrap();
                        prop_assert_eq!(back.vertices(), comp.vertices());
                        prop_assert_eq!(q_switch(&y, &back), x.clone());
                    }
                }
            }
        }

        #[test]
        fn step_output_proper_without_edge(g in arb_graph(), k in 3usize..=4, seed in any::<u64>()) {
            prop_assume!(g.m() > 0);
            let e = g.edges().next().unwrap();
            let without = g.without_edge(e);
            let mut s = RandomStream::new(seed, StreamLabel::Step(0));
            for x in proper_colourings(&without, k).into_iter().take(50) {
                for mode in [StepMode::Faithful, StepMode::Retry] {
                    let out = step(&g, e.lo(), e.hi(), x.clone(), &mut s, mode).unwrap();
                    prop_assert!(out.colouring.is_proper(&without));
                    prop_assert_eq!(out.resolved, out.colouring.is_proper(&g));
                    if let (StepMode::Faithful, Some(comp)) = (mode, &out.component) {
                        for w in 0..g.n() {
                            if !comp.contains(w) {
                                prop_assert_eq!(out.colouring.colour(w), x.colour(w));
                            }
                        }
                    }
                }
            }
        }
    }
}
