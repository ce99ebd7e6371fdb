//! Fixed small graphs used by the exact checks.

use recolour_core::{Graph, Vertex};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub graph: Graph,
}

fn g(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges(n, edges.iter().copied()).expect("fixture edges are valid")
}

fn grid(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    g(rows * cols, &edges)
}

fn complete_bipartite(a: usize, b: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (0..a).flat_map(|x| (a..a + b).map(move |y| (x, y))).collect();
    g(a + b, &edges)
}

/// About thirty graphs with at most eight vertices.
pub fn corpus() -> Vec<Fixture> {
    let f = |name, graph| Fixture { name, graph };
    vec![
        f("path3", Graph::path(3)),
        f("path4", Graph::path(4)),
        f("path5", Graph::path(5)),
        f("path6", Graph::path(6)),
        f("star5", g(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])),
        f("spider7", g(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])),
        f("binary7", g(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])),
        f("caterpillar8", g(8, &[(0, 1), (1, 2), (2, 3), (0, 4), (1, 5), (2, 6), (3, 7)])),
        f("cycle4", Graph::cycle(4)),
        f("cycle5", Graph::cycle(5)),
        f("cycle6", Graph::cycle(6)),
        f("cycle7", Graph::cycle(7)),
        f("cycle8", Graph::cycle(8)),
        f("triangle_pendant", g(4, &[(0, 1), (1, 2), (0, 2), (2, 3)])),
        f("k4_minus_edge", g(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])),
        f("k23", complete_bipartite(2, 3)),
        f("k24", complete_bipartite(2, 4)),
        f("k33", complete_bipartite(3, 3)),
        f(
            "cube",
            g(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)]),
        ),
        f("prism", g(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])),
        f("wheel5", g(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])),
        f("bowtie", g(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])),
        f("house", g(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (3, 4)])),
        f("grid2x3", grid(2, 3)),
        f("grid2x4", grid(2, 4)),
        f("triangles_bridged", g(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)])),
        f("cycle6_chord", g(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])),
        f("theta", g(7, &[(0, 1), (1, 6), (0, 2), (2, 3), (3, 6), (0, 4), (4, 5), (5, 6)])),
        f("path2_path3", g(5, &[(0, 1), (2, 3), (3, 4)])),
        f("triangle_edge", g(5, &[(0, 1), (1, 2), (0, 2), (3, 4)])),
    ]
}

/// Distinct non-adjacent pairs `(v, u)` with `v < u`.
pub fn non_adjacent_pairs(g: &Graph) -> Vec<(Vertex, Vertex)> {
    (0..g.n())
        .flat_map(|u| (0..u).map(move |v| (v, u)))
        .filter(|&(v, u)| !g.has_edge(v, u))
        .collect()
}

/// Graphs with short schedules, paired with the threshold to use.
pub fn pipeline_fixtures() -> Vec<(Fixture, usize)> {
    let pick = |name: &str| corpus().into_iter().find(|f| f.name == name).expect("known fixture");
    vec![
        (pick("cycle4"), 3),
        (pick("cycle5"), 4),
        (pick("cycle6"), 4),
        (pick("cycle8"), 4),
        (pick("house"), 4),
        (pick("k23"), 4),
        (pick("grid2x3"), 4),
        (pick("prism"), 4),
        (pick("grid2x4"), 4),
        (pick("theta"), 5),
    ]
}

/// Forests and unicyclic graphs; used with a threshold above `n` so that
/// nothing is deleted and the output is the base sample itself.
pub fn base_fixtures() -> Vec<Fixture> {
    let f = |name, graph| Fixture { name, graph };
    vec![
        f("empty3", Graph::empty(3)),
        f("path4", Graph::path(4)),
        f("star5", g(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])),
        f("spider7", g(7, &[(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])),
        f("caterpillar8", g(8, &[(0, 1), (1, 2), (2, 3), (0, 4), (1, 5), (2, 6), (3, 7)])),
        f("forest6", g(6, &[(0, 3), (3, 4), (1, 5)])),
        f("triangle", Graph::cycle(3)),
        f("cycle4", Graph::cycle(4)),
        f("cycle5", Graph::cycle(5)),
        f("cycle6", Graph::cycle(6)),
        f("triangle_pendant", g(4, &[(0, 1), (1, 2), (0, 2), (2, 3)])),
        f("square_tails", g(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 5), (5, 6), (2, 7)])),
        f("triangle_edge", g(5, &[(0, 1), (1, 2), (0, 2), (3, 4)])),
        f("pentagon_tail", g(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5), (5, 6)])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use recolour_core::graph::components;
    use recolour_core::pipeline::schedule_for;

    #[test]
    fn corpus_shape() {
        let c = corpus();
        assert!(c.len() >= 28);
        assert!(c.iter().all(|f| f.graph.n() <= 8));
        let mut names: Vec<_> = c.iter().map(|f| f.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn pipeline_fixtures_have_short_schedules() {
        for (f, l) in pipeline_fixtures() {
            let s = schedule_for(&f.graph, Some(l)).unwrap();
            assert!((1..=3).contains(&s.r()), "{}: r = {}", f.name, s.r());
            let worst = components(s.base()).iter().map(|c| c.cyclomatic()).max().unwrap();
            assert!(worst <= 2, "{}", f.name);
        }
    }

    #[test]
    fn base_fixtures_are_forests_or_unicyclic() {
        for f in base_fixtures() {
            assert!(components(&f.graph).iter().all(|c| c.cyclomatic() <= 1), "{}", f.name);
            let s = schedule_for(&f.graph, Some(f.graph.n() + 1)).unwrap();
            assert_eq!(s.r(), 0, "{}", f.name);
        }
    }
}
