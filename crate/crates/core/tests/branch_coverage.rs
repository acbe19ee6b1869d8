//! Constructed instances that route the constructive coloring through every
//! branch, at several clique numbers, with the trace checked for
//! consistency against the emitted coloring.

use hvncolor::coloring::{color_class_member, Branch, BranchTrace, ColorBudget};
use hvncolor::generators::{extremal, grotzsch, mycielski, sample_class_member};
use hvncolor::graph::{Graph, GraphBuilder, VertexSet};
use hvncolor::oracle::{chromatic_number, Coloring, NodeBudget};
use hvncolor::patterns::is_class_member;
use proptest::prelude::*;

/// Complete multipartite block with `parts` parts of size `part_size`, plus
/// a disjoint clique of order `clique`.
fn block_plus_clique(parts: usize, part_size: usize, clique: usize) -> Graph {
    let a = parts * part_size;
    let mut g = GraphBuilder::new(a + clique);
    for pu in 0..parts {
        for pv in pu + 1..parts {
            for u in part_size * pu..part_size * (pu + 1) {
                for v in part_size * pv..part_size * (pv + 1) {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
    }
    for u in a..a + clique {
        for v in u + 1..a + clique {
            g.add_edge(u, v).unwrap();
        }
    }
    g.build()
}

/// Block plus clique plus one cell of `cell` vertices, each complete to the
/// first part of the block and adjacent to the clique vertex `a`; the cell
/// is itself a clique when `cell_clique` is set.
fn with_cell(parts: usize, part_size: usize, clique: usize, cell: usize, cell_clique: bool) -> Graph {
    let a = parts * part_size;
    let base = block_plus_clique(parts, part_size, clique);
    let mut g = GraphBuilder::new(a + clique + cell);
    for (u, v) in base.edges() {
        g.add_edge(u, v).unwrap();
    }
    for s in 0..cell {
        let sv = a + clique + s;
        for p in 0..part_size {
            g.add_edge(sv, p).unwrap();
        }
        g.add_edge(sv, a).unwrap();
        if cell_clique {
            for t in 0..s {
                g.add_edge(sv, a + clique + t).unwrap();
            }
        }
    }
    g.build()
}

fn assert_colored(g: &Graph, expected_branch: Branch) -> (Coloring, BranchTrace) {
    assert!(is_class_member(g), "fixture must be a class member");
    let (coloring, trace) = color_class_member(g, NodeBudget::UNLIMITED).unwrap();
    assert_eq!(trace.branch, expected_branch);
    let budget = ColorBudget::for_omega(trace.omega).budget;
    assert!(coloring.max_color() <= budget);
    assert!(coloring.is_proper(g));
    assert_trace_consistent(g, &coloring, &trace);
    (coloring, trace)
}

/// Every vertex listed in a trace step wears one of the step's colors.
fn assert_trace_consistent(_g: &Graph, coloring: &Coloring, trace: &BranchTrace) {
    for step in &trace.steps {
        for &v in &step.vertices {
            assert!(
                step.colors.contains(&coloring.color_of(v)),
                "vertex {v} in region {} wears {} outside {:?}",
                step.region,
                coloring.color_of(v),
                step.colors
            );
        }
    }
    for hall in &trace.hall {
        let mut sorted = hall.assigned.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), hall.assigned.len(), "hall colors are distinct");
        for (t, palette) in hall.palettes.iter().enumerate() {
            assert!(palette.contains(&hall.assigned[t]));
        }
    }
}

#[test]
fn small_omega_family() {
    // K3 ∪ K2 has omega = 3 and no P4 at all; the Mycielskian of C5 is the
    // omega = 2 extremal case
    let k3_k2 = Graph::complete(3).disjoint_union(&Graph::complete(2));
    for g in [Graph::cycle(5), mycielski(&Graph::cycle(5)), grotzsch(), k3_k2] {
        assert!(is_class_member(&g));
        let (coloring, trace) = color_class_member(&g, NodeBudget::UNLIMITED).unwrap();
        assert_eq!(trace.branch, Branch::SmallOmegaOracle);
        let budget = ColorBudget::for_omega(trace.omega).budget;
        assert!(coloring.max_color() <= budget);
    }
}

#[test]
fn small_k_family() {
    for (parts, part_size, clique) in [(4, 2, 0), (4, 2, 3), (5, 1, 2), (6, 2, 3), (7, 3, 1)] {
        let g = block_plus_clique(parts, part_size, clique);
        let (_, trace) = assert_colored(&g, Branch::SmallKSplit);
        assert_eq!(trace.omega, parts.max(clique));
        assert_eq!(trace.k, Some(clique.min(3)));
    }
}

#[test]
fn banded_family() {
    for (parts, part_size, clique) in [(5, 2, 4), (6, 2, 4), (7, 1, 5), (9, 1, 6), (12, 1, 4)] {
        let g = block_plus_clique(parts, part_size, clique);
        let (coloring, trace) = assert_colored(&g, Branch::BandedPalettes);
        assert_eq!(trace.omega, parts);
        let budget = ColorBudget::for_omega(parts).budget;
        assert!(coloring.max_color() <= budget);
    }
}

#[test]
fn nonstable_cell_family() {
    // the cell clique must stay below the inner K4, or it gets absorbed
    // into the B cover itself
    for (parts, cell) in [(5, 2), (5, 3), (6, 2), (7, 3)] {
        let g = with_cell(parts, 2, 4, cell, true);
        let (_, trace) = assert_colored(&g, Branch::NonstableCell);
        assert_eq!(trace.omega, parts);
        assert_eq!(trace.k, Some(4));
    }
}

#[test]
fn oversized_cell_clique_becomes_dominant_vertex() {
    // with a 4-clique cell, cell ∪ {inner vertex} is a K5, the B cover
    // swallows the cell, and the block vertex touching every cell part
    // triggers the dominant-vertex branch instead
    let g = with_cell(7, 2, 4, 4, true);
    let (coloring, trace) = assert_colored(&g, Branch::StableUnion);
    assert_eq!(trace.omega, 7);
    assert!(coloring.max_color() as usize <= 9);
}

#[test]
fn omega4_scheme_a_family() {
    for cell in [2usize, 3] {
        let g = with_cell(4, 2, 4, cell, true);
        let (_, trace) = assert_colored(&g, Branch::Omega4Hall);
        assert_eq!(trace.omega, 4);
    }
}

#[test]
fn omega4_scheme_b_with_stable_cells() {
    // stable cell vertices (no edges among them) on the omega-4 shape
    let g = with_cell(4, 2, 4, 2, false);
    let (_, trace) = assert_colored(&g, Branch::Omega4Hall);
    assert!(trace.hall.len() <= 2, "stable singleton cells form tiny components");
}

#[test]
fn decorated_extremal_leaves_the_class() {
    // the extremal graphs are rigid: hanging a degree-2 vertex off a
    // matched pair creates an edge anticomplete to one of the many induced
    // P4s inside the construction
    let base = extremal(4).unwrap();
    let mut g = GraphBuilder::new(33);
    for (u, v) in base.edges() {
        g.add_edge(u, v).unwrap();
    }
    g.add_edge(32, 0).unwrap();
    g.add_edge(32, 16).unwrap();
    let g = g.build();
    let violation = hvncolor::class_violation(&g).expect("decoration breaks membership");
    assert_eq!(violation.pattern(), "P2+P4");
}

#[test]
fn stable_union_family() {
    // dominant cover vertex adjacent to k-1 full parts of B, for a range of
    // omega and B part sizes
    for (omega, b_size) in [(5usize, 1usize), (5, 2), (6, 1), (6, 2)] {
        let a = 3 * omega;
        let n = a + 4 * b_size;
        let mut g = GraphBuilder::new(n);
        for pu in 0..omega {
            for pv in pu + 1..omega {
                for u in 3 * pu..3 * pu + 3 {
                    for v in 3 * pv..3 * pv + 3 {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
        }
        for pu in 0..4 {
            for pv in pu + 1..4 {
                for u in a + b_size * pu..a + b_size * (pu + 1) {
                    for v in a + b_size * pv..a + b_size * (pv + 1) {
                        g.add_edge(u, v).unwrap();
                    }
                }
            }
        }
        // vertex 0 of A_1 is complete to the first three parts of B
        for b in a..a + 3 * b_size {
            g.add_edge(0, b).unwrap();
        }
        let g = g.build();
        let (coloring, trace) = assert_colored(&g, Branch::StableUnion);
        assert_eq!(trace.omega, omega);
        assert!(coloring.max_color() as usize <= omega + 2);
    }
}

#[test]
fn extremal_routes_to_banded_at_omega5() {
    let g = extremal(5).unwrap();
    let (coloring, _) = assert_colored(&g, Branch::BandedPalettes);
    assert_eq!(coloring.max_color(), 7, "extremal(5) exhausts the budget");
    let (chi, _) = chromatic_number(&g, NodeBudget::UNLIMITED).unwrap();
    assert_eq!(chi, 7);
}

#[test]
fn extremal4_routes_to_omega4_scheme_b() {
    let g = extremal(4).unwrap();
    let (coloring, _) = assert_colored(&g, Branch::Omega4Hall);
    assert_eq!(coloring.max_color(), 6);
}

#[test]
fn extremal_partition_follows_the_matching() {
    use hvncolor::decompose::{decompose, Decomposition};
    let w = 4;
    let g = extremal(w).unwrap();
    let Decomposition::Full {
        cover_a,
        cover_b,
        partition,
        ..
    } = decompose(&g).unwrap()
    else {
        panic!("expected Full");
    };
    // the two blocks are the covers, so the remainder grid is empty
    assert_eq!(cover_a.order(), w * w);
    assert_eq!(cover_b.order(), w * w);
    assert!(partition.z().is_empty());
    for j in 1..=partition.k {
        assert!(partition.r_set(j).is_empty());
    }
    for i in 1..=partition.omega {
        assert!(partition.t_set(i).is_empty());
        for j in 1..=partition.k {
            assert!(partition.s_cell(i, j).is_empty());
        }
    }
    // each inner vertex b_i^j joins the class of its matched part A_j
    let classes = partition.c_classes();
    for i in 1..=w {
        for j in 1..=w {
            let b_vertex = w * w + (i - 1) * w + (j - 1);
            let a_partner = (j - 1) * w + (i - 1);
            let a_part = cover_a.part_of(a_partner).expect("partner in cover") + 1;
            assert!(
                classes.class(a_part).contains(b_vertex),
                "b_{i}^{j} must land in the class of part {a_part}"
            );
        }
    }
}

#[test]
fn decomposition_is_deterministic() {
    use hvncolor::decompose::{decompose, Decomposition};
    for g in [
        extremal(4).unwrap(),
        with_cell(5, 2, 4, 2, true),
        block_plus_clique(5, 2, 4),
    ] {
        let d1 = decompose(&g).unwrap();
        let d2 = decompose(&g).unwrap();
        match (d1, d2) {
            (
                Decomposition::Full {
                    cover_a: a1,
                    cover_b: b1,
                    partition: p1,
                    ..
                },
                Decomposition::Full {
                    cover_a: a2,
                    cover_b: b2,
                    partition: p2,
                    ..
                },
            ) => {
                assert_eq!(a1, a2);
                assert_eq!(b1, b2);
                assert_eq!(p1.to_record(), p2.to_record());
            }
            _ => panic!("expected Full decompositions"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Sampled members color within budget and the detectors accept every
    /// induced subgraph (hereditary closure).
    #[test]
    fn sampled_members_hereditary_and_bounded(
        n in 6usize..14,
        density in 0.1f64..0.9,
        seed in 0u64..1_000,
        subset_mask in 1u64..16_000,
    ) {
        let g = sample_class_member(n, density, seed);
        prop_assert!(is_class_member(&g));
        let (coloring, trace) = color_class_member(&g, NodeBudget::UNLIMITED).unwrap();
        let budget = ColorBudget::for_omega(trace.omega).budget;
        prop_assert!(coloring.max_color() <= budget);
        prop_assert!(coloring.is_proper(&g));

        let members: Vec<usize> = (0..n).filter(|v| subset_mask >> v & 1 == 1).collect();
        let s = VertexSet::from_vertices(n, &members);
        let h = g.induced_subgraph(&s).unwrap();
        prop_assert!(is_class_member(&h), "induced subgraphs stay in the class");
    }

    /// The oracle sandwich on small members: omega <= chi <= constructive
    /// count <= budget.
    #[test]
    fn oracle_sandwich_small(n in 4usize..11, density in 0.2f64..0.95, seed in 0u64..400) {
        let g = sample_class_member(n, density, seed);
        let (coloring, trace) = color_class_member(&g, NodeBudget::UNLIMITED).unwrap();
        let (chi, _) = chromatic_number(&g, NodeBudget::UNLIMITED).unwrap();
        let budget = ColorBudget::for_omega(trace.omega).budget;
        prop_assert!(trace.omega as u32 <= chi);
        prop_assert!(chi <= coloring.colors_used());
        prop_assert!(coloring.colors_used() <= budget);
    }
}
