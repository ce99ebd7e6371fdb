//! Exactly uniform colourings of the base graph.
//!
//! Trees are handled by a list-colouring dynamic program: for each vertex `w`
//! and colour `c`, the number of list colourings of the subtree under `w`
//! with `w` coloured `c`. Components with a few extra edges beyond a spanning
//! tree are handled by conditioning on the colours of the extra edges'
//! endpoints, counting the tree under every proper joint assignment, drawing
//! one assignment in proportion to its count and then sampling the tree.
//!
//! Counts are exact. Each table entry is stored as `(k-1)^shift * residual`:
//! a subtree whose lists are all full contributes the same factor to every
//! colour of its parent, so only the exponent is tracked for it and the big
//! integers stay as small as the list restrictions allow.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::graph::{components, Edge, Graph, Vertex};
use crate::rng::{Chooser, RandomStream, StreamLabel};
use crate::Colour;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColouringStatus {
    Proper,
    /// Carries the first monochromatic edge in canonical order.
    Improper(Edge),
}

/// Total assignment of colours `0..k` to the vertices of a graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Colouring {
    colours: Vec<Colour>,
    k: usize,
}

impl Colouring {
    pub fn new(colours: Vec<Colour>, k: usize) -> Result<Self> {
        if let Some(&c) = colours.iter().find(|&&c| c as usize >= k) {
            return Err(Error::ColourOutOfRange { colour: c, k });
        }
        Ok(Colouring { colours, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn colour(&self, v: Vertex) -> Colour {
        self.colours[v]
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    pub fn set(&mut self, v: Vertex, c: Colour) {
        debug_assert!((c as usize) < self.k);
        self.colours[v] = c;
    }

    pub fn status(&self, g: &Graph) -> ColouringStatus {
        g.edges()
            .find(|e| self.colours[e.lo()] == self.colours[e.hi()])
            .map_or(ColouringStatus::Proper, ColouringStatus::Improper)
    }

    pub fn is_proper(&self, g: &Graph) -> bool {
        self.status(g) == ColouringStatus::Proper
    }

    /// Comma-separated colour ids by vertex id.
    pub fn to_line(&self) -> String {
        let mut s = String::with_capacity(self.colours.len() * 3);
        for (i, c) in self.colours.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&c.to_string());
        }
        s
    }
}

/// Per-vertex colour lists; `None` is the full palette.
pub type ColourLists = Vec<Option<Vec<Colour>>>;

/// List-colouring counts for a rooted tree.
#[derive(Clone, Debug)]
pub struct CountTable {
    k: usize,
    order: Vec<Vertex>,
    parent: Vec<Option<Vertex>>,
    shift: Vec<u64>,
    /// `None` stands for the all-ones vector.
    residual: Vec<Option<Vec<BigUint>>>,
}

impl CountTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn root(&self) -> Vertex {
        self.order[0]
    }

    pub fn parent(&self, w: Vertex) -> Option<Vertex> {
        self.parent[w]
    }

    /// BFS order from the root.
    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    fn scale(&self, exp: u64) -> BigUint {
        Pow::pow(BigUint::from(self.k as u64 - 1), exp)
    }

    /// Number of list colourings of the subtree under `w` with `w` coloured `c`.
    pub fn count(&self, w: Vertex, c: Colour) -> BigUint {
        let r = match &self.residual[w] {
            None => BigUint::one(),
            Some(v) => v[c as usize].clone(),
        };
        r * self.scale(self.shift[w])
    }

    fn residual_sum(&self, w: Vertex) -> BigUint {
        match &self.residual[w] {
            None => BigUint::from(self.k),
            Some(v) => v.iter().sum(),
        }
    }

    /// Total number of proper list colourings of the tree.
    pub fn total(&self) -> BigUint {
        let root = self.root();
        self.residual_sum(root) * self.scale(self.shift[root])
    }

    /// `(shift, residual total)`, with `total = (k-1)^shift * residual total`.
    fn factored_total(&self) -> (u64, BigUint) {
        let root = self.root();
        (self.shift[root], self.residual_sum(root))
    }
}

fn bfs_tree(tree: &Graph, root: Vertex) -> (Vec<Vertex>, Vec<Option<Vertex>>) {
    let n = tree.n();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    seen[root] = true;
    queue.push_back(root);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in tree.neighbours(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    (order, parent)
}

fn check_tree(tree: &Graph) -> Result<()> {
    let n = tree.n();
    if n == 0 {
        return Err(Error::NotATree("empty graph".into()));
    }
    if tree.m() != n - 1 {
        return Err(Error::NotATree(format!("{} vertices but {} edges", n, tree.m())));
    }
    if components(tree).len() != 1 {
        return Err(Error::NotATree("disconnected".into()));
    }
    Ok(())
}

fn build_table(tree: &Graph, lists: &ColourLists, k: usize) -> CountTable {
    let n = tree.n();
    let (order, parent) = bfs_tree(tree, 0);
    let mut shift = vec![0u64; n];
    let mut residual: Vec<Option<Vec<BigUint>>> = lists
        .iter()
        .map(|list| match list {
            None => None,
            Some(cs) => {
                let mut v = vec![BigUint::zero(); k];
                for &c in cs {
                    v[c as usize] = BigUint::one();
                }
                if v.iter().all(One::is_one) {
                    None
                } else {
                    Some(v)
                }
            }
        })
        .collect();

    for &w in order.iter().rev() {
        let Some(p) = parent[w] else { continue };
        let child_shift = shift[w];
        match residual[w].take() {
            None => {
                // Full-palette subtree: every parent colour sees (k-1)^(shift+1).
                shift[p] += child_shift + 1;
            }
            Some(child) => {
                shift[p] += child_shift;
                let sum: BigUint = child.iter().sum();
                let parent_vec = residual[p].get_or_insert_with(|| vec![BigUint::one(); k]);
                for (c, slot) in parent_vec.iter_mut().enumerate() {
                    if !slot.is_zero() {
                        *slot *= &sum - &child[c];
                    }
                }
                residual[w] = Some(child);
            }
        }
    }
    CountTable {
        k,
        order,
        parent,
        shift,
        residual,
    }
}

fn validate_lists(n: usize, lists: &ColourLists, k: usize) -> Result<()> {
    if lists.len() != n {
        return Err(Error::param("lists", format!("expected {n} lists, got {}", lists.len())));
    }
    for list in lists.iter().flatten() {
        if let Some(&c) = list.iter().find(|&&c| c as usize >= k) {
            return Err(Error::ColourOutOfRange { colour: c, k });
        }
    }
    Ok(())
}

/// Exact number of proper list colourings of a tree, rooted at vertex 0.
pub fn count_tree_colourings(tree: &Graph, lists: &ColourLists, k: usize) -> Result<(BigUint, CountTable)> {
    if k == 0 {
        return Err(Error::param("k", "palette must be non-empty"));
    }
    check_tree(tree)?;
    validate_lists(tree.n(), lists, k)?;
    let table = build_table(tree, lists, k);
    Ok((table.total(), table))
}

/// Draws a uniformly random proper list colouring described by `table`.
pub fn sample_tree_colouring<C: Chooser>(table: &CountTable, chooser: &mut C) -> Result<Vec<Colour>> {
    let k = table.k;
    let root = table.root();
    if table.residual_sum(root).is_zero() {
        return Err(Error::Uncolourable { lowest: root });
    }
    let n = table.order.len();
    let mut colours = vec![0 as Colour; n];
    let mut weights: Vec<BigUint> = Vec::with_capacity(k);
    for &w in &table.order {
        let c = match (table.parent[w], &table.residual[w]) {
            (None, None) => chooser.pick_uniform(k),
            (None, Some(res)) => chooser.pick_weighted(res),
            (Some(p), None) => {
                let skip = colours[p] as usize;
                let i = chooser.pick_uniform(k - 1);
                if i < skip {
                    i
                } else {
                    i + 1
                }
            }
            (Some(p), Some(res)) => {
                let skip = colours[p] as usize;
                weights.clear();
                weights.extend(
                    res.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != skip)
                        .map(|(_, x)| x.clone()),
                );
                let i = chooser.pick_weighted(&weights);
                if i < skip {
                    i
                } else {
                    i + 1
                }
            }
        };
        colours[w] = c as Colour;
    }
    Ok(colours)
}

/// Exact uniform sampler for one connected component of bounded cyclomatic
/// number. Vertices are local ids `0..n`.
pub struct ComponentSampler {
    k: usize,
    tree: Graph,
    extra: Vec<Edge>,
    conditioned: Vec<Vertex>,
    /// Joint colours of `conditioned`, one entry per proper assignment.
    assignments: Vec<Vec<Colour>>,
    weights: Vec<BigUint>,
    common_shift: u64,
    tables: Vec<Option<CountTable>>,
}

/// Caches the per-assignment tables when they fit in this many table cells.
const TABLE_CACHE_CELLS: usize = 1 << 20;

impl ComponentSampler {
    /// Prepares the sampler. Fails when the component's cyclomatic number
    /// exceeds `c_max` or it has no proper colouring.
    pub fn new(component: &Graph, k: usize, c_max: usize) -> Result<Self> {
        let n = component.n();
        if n == 0 {
            return Err(Error::param("component", "must have at least one vertex"));
        }
        if k == 0 {
            return Err(Error::param("k", "palette must be non-empty"));
        }
        let (order, parent) = bfs_tree(component, 0);
        if order.len() != n {
            return Err(Error::param("component", "must be connected"));
        }
        let beta = component.m() + 1 - n;
        if beta > c_max {
            return Err(Error::ComponentTooCyclic {
                lowest: 0,
                cyclomatic: beta,
                cap: c_max,
            });
        }
        let mut tree = Graph::empty(n);
        for (w, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                tree.add_edge(w, p)?;
            }
        }
        let extra: Vec<Edge> = component.edges().filter(|e| !tree.contains(*e)).collect();
        let mut conditioned: Vec<Vertex> = extra.iter().flat_map(|e| [e.lo(), e.hi()]).collect();
        conditioned.sort_unstable();
        conditioned.dedup();

        let index_of = |v: Vertex| conditioned.binary_search(&v).unwrap();
        let mut assignments = Vec::new();
        let mut joint = vec![0 as Colour; conditioned.len()];
        loop {
            let proper = extra
                .iter()
                .all(|e| joint[index_of(e.lo())] != joint[index_of(e.hi())]);
            if proper {
                assignments.push(joint.clone());
            }
            // Odometer over [k]^conditioned, last position fastest.
            let mut pos = joint.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                joint[pos] += 1;
                if (joint[pos] as usize) < k {
                    break;
                }
                joint[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if joint.is_empty() || pos == usize::MAX {
                break;
            }
        }

        let cache = assignments.len().saturating_mul(n).saturating_mul(k) <= TABLE_CACHE_CELLS;
        let mut factored = Vec::with_capacity(assignments.len());
        let mut tables = Vec::with_capacity(assignments.len());
        for a in &assignments {
            let lists = Self::lists_for(n, &conditioned, a);
            let table = build_table(&tree, &lists, k);
            factored.push(table.factored_total());
            tables.push(cache.then_some(table));
        }
        let common_shift = factored.iter().map(|(s, _)| *s).min().unwrap_or(0);
        let weights: Vec<BigUint> = factored
            .into_iter()
            .map(|(s, r)| r * Pow::pow(BigUint::from(k as u64 - 1), s - common_shift))
            .collect();
        if weights.iter().all(Zero::is_zero) {
            return Err(Error::Uncolourable { lowest: 0 });
        }
        Ok(ComponentSampler {
            k,
            tree,
            extra,
            conditioned,
            assignments,
            weights,
            common_shift,
            tables,
        })
    }

    fn lists_for(n: usize, conditioned: &[Vertex], assignment: &[Colour]) -> ColourLists {
        let mut lists: ColourLists = vec![None; n];
        for (&v, &c) in conditioned.iter().zip(assignment) {
            lists[v] = Some(vec![c]);
        }
        lists
    }

    pub fn cyclomatic(&self) -> usize {
        self.extra.len()
    }

    pub fn spanning_tree(&self) -> &Graph {
        &self.tree
    }

    pub fn extra_edges(&self) -> &[Edge] {
        &self.extra
    }

    /// Exact number of proper colourings of the component.
    pub fn count(&self) -> BigUint {
        let sum: BigUint = self.weights.iter().sum();
        sum * Pow::pow(BigUint::from(self.k as u64 - 1), self.common_shift)
    }

    pub fn sample<C: Chooser>(&self, chooser: &mut C) -> Result<Vec<Colour>> {
        let idx = if self.assignments.len() == 1 {
            0
        } else {
            chooser.pick_weighted(&self.weights)
        };
        match &self.tables[idx] {
            Some(table) => sample_tree_colouring(table, chooser),
            None => {
                let lists = Self::lists_for(self.tree.n(), &self.conditioned, &self.assignments[idx]);
                let table = build_table(&self.tree, &lists, self.k);
                sample_tree_colouring(&table, chooser)
            }
        }
    }
}

/// One exactly uniform colouring of a connected component (local ids).
pub fn sample_component_colouring<C: Chooser>(
    component: &Graph,
    k: usize,
    chooser: &mut C,
    c_max: usize,
) -> Result<Vec<Colour>> {
    ComponentSampler::new(component, k, c_max)?.sample(chooser)
}

#[derive(Clone, Debug)]
pub struct BaseSample {
    pub colouring: Colouring,
    pub bits: u64,
}

/// Exactly uniform colouring of `g0`, one independent substream per
/// component labelled by the component's lowest vertex id.
pub fn sample_base(g0: &Graph, k: usize, seed: u64, c_max: usize) -> Result<BaseSample> {
    if k == 0 {
        return Err(Error::param("k", "palette must be non-empty"));
    }
    let mut colours = vec![0 as Colour; g0.n()];
    let mut bits = 0;
    for comp in components(g0) {
        let lowest = comp.lowest();
        let mut stream = RandomStream::new(seed, StreamLabel::Base(lowest));
        if comp.vertices.len() == 1 {
            colours[lowest] = stream.pick_uniform(k) as Colour;
        } else {
            let local = g0.induced(&comp.vertices);
            let drawn = ComponentSampler::new(&local, k, c_max)
                .and_then(|s| s.sample(&mut stream))
                .map_err(|e| relabel_error(e, lowest))?;
            for (i, &v) in comp.vertices.iter().enumerate() {
                colours[v] = drawn[i];
            }
        }
        bits += stream.bits_consumed();
    }
    Ok(BaseSample {
        colouring: Colouring { colours, k },
        bits,
    })
}

fn relabel_error(e: Error, lowest: Vertex) -> Error {
    match e {
        Error::ComponentTooCyclic { cyclomatic, cap, .. } => Error::ComponentTooCyclic {
            lowest,
            cyclomatic,
            cap,
        },
        Error::Uncolourable { .. } => Error::Uncolourable { lowest },
        other => other,
    }
}
