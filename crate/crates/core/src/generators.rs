//! Named graphs, the tight extremal family, and the samplers and exhaustive
//! enumerations the verification campaigns run on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphBuilder};
use crate::patterns::class_violation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("extremal construction needs omega >= 4, got {0}")]
    OmegaTooSmall(usize),
    #[error("exhaustive enumeration supports n <= {max}, got {n}")]
    TooManyVertices { n: usize, max: usize },
}

/// Largest order for exhaustive labeled enumeration (2^21 graphs at n = 7).
pub const MAX_ENUMERATION_N: usize = 7;

/// The 11-vertex triangle-free graph with chromatic number 4: cycle
/// u_0..u_4 on vertices 0..5, shadows w_i = 5 + i adjacent to u_{i−1} and
/// u_{i+1} (mod 5), apex 10 adjacent to every shadow.
pub fn grotzsch() -> Graph {
    let mut b = GraphBuilder::new(11);
    for i in 0..5 {
        b.add_edge(i, (i + 1) % 5).unwrap();
    }
    for i in 0..5 {
        b.add_edge(5 + i, (i + 4) % 5).unwrap();
        b.add_edge(5 + i, (i + 1) % 5).unwrap();
    }
    for i in 0..5 {
        b.add_edge(10, 5 + i).unwrap();
    }
    b.build()
}

/// Standard Mycielskian: originals keep their edges, shadow n + i picks up
/// the neighborhood of i, and the apex 2n joins every shadow. Raises the
/// chromatic number by one and preserves triangle-freeness.
pub fn mycielski(g: &Graph) -> Graph {
    let n = g.n();
    let mut b = GraphBuilder::new(2 * n + 1);
    for (u, v) in g.edges() {
        b.add_edge(u, v).unwrap();
        b.add_edge(n + u, v).unwrap();
        b.add_edge(u, n + v).unwrap();
    }
    for i in 0..n {
        b.add_edge(2 * n, n + i).unwrap();
    }
    b.build()
}

/// The tight family: two complete ω-partite blocks with ω vertices per
/// part, joined by a perfect matching. Vertex numbering is fixed: the A
/// block comes first, row-major by part (`a_i^j` is `(i−1)·ω + (j−1)`),
/// then the B block with the same layout offset by ω². The matching pairs
/// `a_j^i` with `b_i^j`. The result has 2ω² vertices, clique number ω and
/// chromatic number ⌈4ω/3⌉.
pub fn extremal(omega: usize) -> Result<Graph, GeneratorError> {
    if omega < 4 {
        return Err(GeneratorError::OmegaTooSmall(omega));
    }
    let block = omega * omega;
    let mut b = GraphBuilder::new(2 * block);
    let a_vertex = |part: usize, idx: usize| (part - 1) * omega + (idx - 1);
    let b_vertex = |part: usize, idx: usize| block + (part - 1) * omega + (idx - 1);
    for pu in 1..=omega {
        for pv in pu + 1..=omega {
            for iu in 1..=omega {
                for iv in 1..=omega {
                    b.add_edge(a_vertex(pu, iu), a_vertex(pv, iv)).unwrap();
                    b.add_edge(b_vertex(pu, iu), b_vertex(pv, iv)).unwrap();
                }
            }
        }
    }
    for i in 1..=omega {
        for j in 1..=omega {
            b.add_edge(a_vertex(j, i), b_vertex(i, j)).unwrap();
        }
    }
    Ok(b.build())
}

/// Random class member: sample G(n, density) under the seed, then repair by
/// deleting one uniformly random edge of each found forbidden witness until
/// the detectors come back clean. Pure edge deletion, so the loop ends in at
/// most |E| rounds; the edgeless graph is always a member.
pub fn sample_class_member(n: usize, density: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                b.add_edge(u, v).unwrap();
            }
        }
    }
    let mut g = b.build();
    while let Some(witness) = class_violation(&g) {
        let vs = witness.vertices();
        let mut witness_edges: Vec<(usize, usize)> = Vec::new();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if g.has_edge(u, v) {
                    witness_edges.push((u.min(v), u.max(v)));
                }
            }
        }
        witness_edges.sort_unstable();
        let (u, v) = witness_edges[rng.gen_range(0..witness_edges.len())];
        let mut builder = g.to_builder();
        builder.remove_edge(u, v).unwrap();
        g = builder.build();
    }
    g
}

/// All 2^(n(n−1)/2) labeled graphs on `n` vertices, in mask order: bit `t`
/// of the mask drives the `t`-th pair (0,1), (0,2), …, (0,n−1), (1,2), ….
pub fn enumerate_all_graphs(n: usize) -> Result<impl Iterator<Item = Graph>, GeneratorError> {
    if n > MAX_ENUMERATION_N {
        return Err(GeneratorError::TooManyVertices {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let total: u64 = 1 << pairs.len();
    Ok((0..total).map(move |mask| graph_from_mask(n, &pairs, mask)))
}

pub(crate) fn graph_from_mask(n: usize, pairs: &[(usize, usize)], mask: u64) -> Graph {
    let mut b = GraphBuilder::new(n);
    for (t, &(u, v)) in pairs.iter().enumerate() {
        if mask >> t & 1 == 1 {
            b.add_edge(u, v).unwrap();
        }
    }
    b.build()
}

/// The labeled class members among all graphs on `n` vertices.
pub fn enumerate_class_members(n: usize) -> Result<impl Iterator<Item = Graph>, GeneratorError> {
    Ok(enumerate_all_graphs(n)?.filter(|g| class_violation(g).is_none()))
}

/// Canonical form by brute force: the minimum edge-mask over all vertex
/// permutations. Exponential in n; meant for the small-n dedup flag only.
pub fn canonical_form(g: &Graph) -> u64 {
    let n = g.n();
    assert!(
        n <= 8,
        "brute-force canonical form is limited to 8 vertices"
    );
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mut mask = 0u64;
        for (t, &(u, v)) in pairs.iter().enumerate() {
            if g.has_edge(perm[u], perm[v]) {
                mask |= 1 << t;
            }
        }
        best = best.min(mask);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{color_class_member, Branch, ColorBudget};
    use crate::oracle::{chromatic_number, clique_number, NodeBudget};
    use crate::patterns::{find_induced, is_class_member, Pattern};

    #[test]
    fn grotzsch_shape() {
        let g = grotzsch();
        assert_eq!(g.n(), 11);
        assert_eq!(g.edge_count(), 20);
        assert_eq!(clique_number(&g).0, 2, "triangle-free");
        assert!(find_induced(&g, &Pattern::hvn()).unwrap().is_none());
        assert!(is_class_member(&g));
    }

    #[test]
    fn grotzsch_chromatic_number_four() {
        let g = grotzsch();
        assert!(crate::oracle::is_k_colorable(&g, 3, NodeBudget::UNLIMITED)
            .unwrap()
            .is_none());
        let (chi, _) = chromatic_number(&g, NodeBudget::UNLIMITED).unwrap();
        assert_eq!(chi, 4);
        let (coloring, trace) = color_class_member(&g, NodeBudget::UNLIMITED).unwrap();
        assert_eq!(trace.branch, Branch::SmallOmegaOracle);
        assert!(coloring.max_color() <= 4);
    }

    #[test]
    fn mycielski_of_k2_is_c5() {
        let m = mycielski(&Graph::complete(2));
        assert_eq!(m.n(), 5);
        // not numbered as the standard cycle, so compare by isomorphism
        // invariants strong enough at n = 5: 5 edges, all degrees 2,
        // connected, odd chromatic number
        assert_eq!(m.edge_count(), 5);
        assert!((0..5).all(|v| m.degree(v) == 2));
        assert_eq!(chromatic_number(&m, NodeBudget::UNLIMITED).unwrap().0, 3);
    }

    #[test]
    fn mycielski_of_c5_is_grotzsch() {
        assert_eq!(mycielski(&Graph::cycle(5)), grotzsch());
    }

    #[test]
    fn mycielski_raises_chromatic_number() {
        for g in [Graph::complete(1), Graph::complete(2), Graph::path(3), Graph::cycle(5)] {
            let (before, _) = chromatic_number(&g, NodeBudget::UNLIMITED).unwrap();
            let m = mycielski(&g);
            let (after, _) = chromatic_number(&m, NodeBudget::UNLIMITED).unwrap();
            assert_eq!(after, before + 1);
        }
    }

    #[test]
    fn extremal_shape_and_membership() {
        let g = extremal(4).unwrap();
        assert_eq!(g.n(), 32);
        // every vertex: complete to omega-1 parts of its block plus one
        // matched partner
        for v in 0..32 {
            assert_eq!(g.degree(v), 4 * 3 + 1);
        }
        assert_eq!(clique_number(&g).0, 4);
        assert!(is_class_member(&g));

        // the cross relation is a perfect matching
        let block = 16;
        for a in 0..block {
            let cross: Vec<usize> = (block..32).filter(|&b| g.has_edge(a, b)).collect();
            assert_eq!(cross.len(), 1);
        }
        assert_eq!(extremal(3), Err(GeneratorError::OmegaTooSmall(3)));
    }

    #[test]
    fn extremal_matching_indices() {
        // N_B(a_j^i) = {b_i^j}: vertex (j-1)*w + (i-1) pairs with
        // w^2 + (i-1)*w + (j-1)
        let w = 4;
        let g = extremal(w).unwrap();
        for i in 1..=w {
            for j in 1..=w {
                let a = (j - 1) * w + (i - 1);
                let b = w * w + (i - 1) * w + (j - 1);
                assert!(g.has_edge(a, b), "a_{j}^{i} should match b_{i}^{j}");
            }
        }
    }

    #[test]
    fn extremal_chromatic_number_omega4() {
        let g = extremal(4).unwrap();
        let (chi, coloring) = chromatic_number(&g, NodeBudget::UNLIMITED).unwrap();
        assert_eq!(chi, 6);
        assert!(coloring.is_proper(&g));
        let (constructive, _) = color_class_member(&g, NodeBudget::UNLIMITED).unwrap();
        assert!(constructive.max_color() <= 6);
        assert!(constructive.is_proper(&g));
    }

    #[test]
    fn extremal_members_for_small_omegas() {
        for w in [4usize, 5] {
            let g = extremal(w).unwrap();
            assert_eq!(g.n(), 2 * w * w);
            assert_eq!(clique_number(&g).0, w);
            assert!(is_class_member(&g), "omega = {w}");
            let (coloring, _) = color_class_member(&g, NodeBudget::UNLIMITED).unwrap();
            assert!(coloring.max_color() <= ColorBudget::for_omega(w).budget);
            assert!(coloring.is_proper(&g));
        }
    }

    #[test]
    fn sampler_always_lands_in_class() {
        for seed in 0..6u64 {
            for &density in &[0.0, 0.3, 0.7] {
                let g = sample_class_member(16, density, seed);
                assert!(is_class_member(&g), "seed {seed} density {density}");
            }
        }
        // density 0 stays edgeless
        assert_eq!(sample_class_member(10, 0.0, 1).edge_count(), 0);
    }

    #[test]
    fn sampler_is_replayable() {
        let a = sample_class_member(20, 0.5, 7);
        let b = sample_class_member(20, 0.5, 7);
        assert_eq!(a, b);
        let c = sample_class_member(20, 0.5, 8);
        assert_ne!(a, c, "different seed should move the sample");
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_all_graphs(1).unwrap().count(), 1);
        assert_eq!(enumerate_all_graphs(4).unwrap().count(), 64);
        // patterns need at least five vertices, so every 4-vertex graph is
        // a member
        assert_eq!(enumerate_class_members(4).unwrap().count(), 64);
        // at n = 5 exactly the 30 labeled HVNs drop out: 5 choices of the
        // shared vertex times C(4,2) edge pairs
        assert_eq!(enumerate_class_members(5).unwrap().count(), 1024 - 30);
        assert!(matches!(
            enumerate_all_graphs(8),
            Err(GeneratorError::TooManyVertices { n: 8, .. })
        ));
    }

    #[test]
    fn canonical_form_identifies_isomorphs() {
        let c5 = Graph::cycle(5);
        // a relabeled 5-cycle: 0-2-4-1-3-0
        let relabeled = Graph::from_edges(5, &[(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]).unwrap();
        assert_eq!(canonical_form(&c5), canonical_form(&relabeled));
        assert_ne!(canonical_form(&c5), canonical_form(&Graph::path(5)));
    }
}
