//! Brute-force colouring enumeration and the canonical colouring code.

use recolour_core::{Colour, Colouring, Graph};

use crate::error::{guard, LabResult};

/// Default cap on `k^n` for exhaustive enumeration.
pub const ENUMERATION_LIMIT: f64 = 1e8;

/// Base-`k` integer with vertex 0 as the most significant digit.
pub fn encode(colours: &[Colour], k: usize) -> u64 {
    colours.iter().fold(0u64, |acc, &c| acc * k as u64 + c as u64)
}

pub fn decode(mut code: u64, n: usize, k: usize) -> Vec<Colour> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (code % k as u64) as Colour;
        code /= k as u64;
    }
    out
}

/// All proper `k`-colourings of `g` in lexicographic order.
pub fn enumerate_proper(g: &Graph, k: usize) -> LabResult<Vec<Colouring>> {
    Ok(proper_colour_vectors(g, k)?
        .into_iter()
        .map(|cs| Colouring::new(cs, k).expect("colours below k"))
        .collect())
}

/// Same as [`enumerate_proper`] but as raw colour vectors.
pub fn proper_colour_vectors(g: &Graph, k: usize) -> LabResult<Vec<Vec<Colour>>> {
    let n = g.n();
    guard("colourings", (k as f64).powi(n as i32), ENUMERATION_LIMIT)?;
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return Ok(out);
    }
    let mut cs: Vec<Colour> = vec![0; n];
    // Backtracking in vertex-id order; only earlier neighbours constrain a vertex.
    fn fill(g: &Graph, k: usize, w: usize, cs: &mut Vec<Colour>, out: &mut Vec<Vec<Colour>>) {
        if w == cs.len() {
            out.push(cs.clone());
            return;
        }
        for c in 0..k as Colour {
            if g.neighbours(w).iter().all(|&x| x > w || cs[x] != c) {
                cs[w] = c;
                fill(g, k, w + 1, cs, out);
            }
        }
    }
    fill(g, k, 0, &mut cs, &mut out);
    Ok(out)
}
