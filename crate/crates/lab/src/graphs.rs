//! Small-graph catalogues: isomorphism classes and simple paths.

use recolour_core::{Graph, Vertex};

fn pair_index(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|b| (0..b).map(move |a| (a, b))).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// One representative per isomorphism class of graphs on `n` vertices; the
/// representative is the class member with the smallest edge bitmask.
pub fn graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "class enumeration is exhaustive over 2^(n choose 2) masks");
    let pairs = pair_index(n);
    let slot = |a: usize, b: usize| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        b * (b - 1) / 2 + a
    };
    // For each permutation, where each edge slot goes.
    let maps: Vec<Vec<usize>> = permutations(n)
        .into_iter()
        .map(|p| pairs.iter().map(|&(a, b)| slot(p[a], p[b])).collect())
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let canonical = maps.iter().all(|map| {
            let mut image = 0u64;
            for (i, &to) in map.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    image |= 1 << to;
                }
            }
            image >= mask
        });
        if canonical {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            out.push(Graph::from_edges(n, edges).expect("distinct pairs"));
        }
    }
    out
}

pub fn connected_graphs_up_to_isomorphism(n: usize) -> Vec<Graph> {
    graphs_up_to_isomorphism(n)
        .into_iter()
        .filter(recolour_core::graph::is_connected)
        .collect()
}

/// Every simple path starting at `v` with at most `max_len` edges,
/// including the single-vertex path.
pub fn simple_paths_from(g: &Graph, v: Vertex, max_len: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    let mut path = vec![v];
    fn extend(g: &Graph, max_len: usize, path: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        out.push(path.clone());
        if path.len() > max_len {
            return;
        }
        let last = *path.last().unwrap();
        for &w in g.neighbours(last) {
            if !path.contains(&w) {
                path.push(w);
                extend(g, max_len, path, out);
                path.pop();
            }
        }
    }
    extend(g, max_len, &mut path, &mut out);
    out
}
