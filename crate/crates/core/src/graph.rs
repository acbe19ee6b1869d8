//! Immutable simple-graph value type over dense vertex indices, with the
//! bitset neighborhood algebra the detectors, oracles and decomposition are
//! built on. Vertices of a graph on `n` vertices are `0..n`. Adjacency is
//! stored as fixed-width bit rows so neighborhood intersections run a word
//! at a time.

use std::fmt;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),
    #[error("vertex sets must be disjoint (both contain {0})")]
    OverlappingSets(usize),
    #[error("vertex set capacity {set} does not match graph order {n}")]
    CapacityMismatch { set: usize, n: usize },
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// A subset of the vertices `0..capacity` of an associated graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    words: Vec<u64>,
    capacity: usize,
}

impl VertexSet {
    pub fn new(capacity: usize) -> Self {
        VertexSet {
            words: vec![0; words_for(capacity)],
            capacity,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = VertexSet::new(capacity);
        for v in 0..capacity {
            s.insert(v);
        }
        s
    }

    pub fn from_vertices(capacity: usize, vertices: &[usize]) -> Self {
        let mut s = VertexSet::new(capacity);
        for &v in vertices {
            s.insert(v);
        }
        s
    }

    pub(crate) fn from_words(words: Vec<u64>, capacity: usize) -> Self {
        debug_assert_eq!(words.len(), words_for(capacity));
        VertexSet { words, capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.capacity, "vertex {v} out of range");
        self.words[v / WORD_BITS] |= 1 << (v % WORD_BITS);
    }

    pub fn remove(&mut self, v: usize) {
        assert!(v < self.capacity, "vertex {v} out of range");
        self.words[v / WORD_BITS] &= !(1 << (v % WORD_BITS));
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.capacity && self.words[v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Least member, if any.
    pub fn min(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD_BITS + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        assert_eq!(self.capacity, other.capacity);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        VertexSet::from_words(words, self.capacity)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        assert_eq!(self.capacity, other.capacity);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        VertexSet::from_words(words, self.capacity)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        assert_eq!(self.capacity, other.capacity);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & !b)
            .collect();
        VertexSet::from_words(words, self.capacity)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &VertexSet) {
        assert_eq!(self.capacity, other.capacity);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_with(&self, other: &VertexSet) -> bool {
        assert_eq!(self.capacity, other.capacity);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    /// Collects into a set whose capacity is one past the largest element.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let vs: Vec<usize> = iter.into_iter().collect();
        let cap = vs.iter().max().map_or(0, |&m| m + 1);
        VertexSet::from_vertices(cap, &vs)
    }
}

/// Finite simple undirected graph. Immutable after construction; use
/// [`GraphBuilder`] to assemble or edit one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        let wpr = words_for(n);
        Graph {
            n,
            words_per_row: wpr,
            bits: vec![0; n * wpr],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn complete(n: usize) -> Graph {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                b.add_edge(u, v).unwrap();
            }
        }
        b.build()
    }

    /// Path v0 - v1 - ... - v{n-1}.
    pub fn path(n: usize) -> Graph {
        let mut b = GraphBuilder::new(n);
        for v in 1..n {
            b.add_edge(v - 1, v).unwrap();
        }
        b.build()
    }

    /// Cycle on n >= 3 vertices.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut b = GraphBuilder::new(n);
        for v in 0..n {
            b.add_edge(v, (v + 1) % n).unwrap();
        }
        b.build()
    }

    /// Complete multipartite graph with the given part sizes; parts are
    /// consecutive index blocks in the given order. Zero-size parts allowed.
    pub fn complete_multipartite(part_sizes: &[usize]) -> Graph {
        let n: usize = part_sizes.iter().sum();
        let mut b = GraphBuilder::new(n);
        let mut starts = Vec::with_capacity(part_sizes.len());
        let mut acc = 0;
        for &s in part_sizes {
            starts.push(acc);
            acc += s;
        }
        for (pi, &si) in part_sizes.iter().enumerate() {
            for (pj, &sj) in part_sizes.iter().enumerate().skip(pi + 1) {
                for u in starts[pi]..starts[pi] + si {
                    for v in starts[pj]..starts[pj] + sj {
                        b.add_edge(u, v).unwrap();
                    }
                }
            }
        }
        b.build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        debug_assert!(u < self.n && v < self.n);
        if u == v {
            return false;
        }
        self.bits[u * self.words_per_row + v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    pub(crate) fn row_words(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words_per_row..(v + 1) * self.words_per_row]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row_words(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        let total: usize = (0..self.n).map(|v| self.degree(v)).sum();
        total / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            (u + 1..self.n)
                .filter(move |&v| self.has_edge(u, v))
                .map(move |v| (u, v))
        })
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_set(&self, s: &VertexSet) -> Result<(), GraphError> {
        if s.capacity() != self.n {
            Err(GraphError::CapacityMismatch {
                set: s.capacity(),
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Exact neighbor set of `v`.
    pub fn neighbors(&self, v: usize) -> Result<VertexSet, GraphError> {
        self.check_vertex(v)?;
        Ok(VertexSet::from_words(self.row_words(v).to_vec(), self.n))
    }

    /// Neighbors of `v` inside `s`.
    pub fn neighbors_in(&self, v: usize, s: &VertexSet) -> Result<VertexSet, GraphError> {
        self.check_vertex(v)?;
        self.check_set(s)?;
        let words = self
            .row_words(v)
            .iter()
            .zip(s.words())
            .map(|(a, b)| a & b)
            .collect();
        Ok(VertexSet::from_words(words, self.n))
    }

    /// Subgraph induced by `s`, relabeled to `0..|s|` in ascending order of
    /// the members of `s`. The relabeling is deterministic so witnesses map
    /// back reproducibly.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Graph, GraphError> {
        self.check_set(s)?;
        let vs = s.to_vec();
        let mut b = GraphBuilder::new(vs.len());
        for (i, &u) in vs.iter().enumerate() {
            for (j, &v) in vs.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    b.add_edge(i, j).unwrap();
                }
            }
        }
        Ok(b.build())
    }

    /// Complement graph: adjacency flipped on every pair of distinct vertices.
    pub fn complement(&self) -> Graph {
        let mut b = GraphBuilder::new(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    b.add_edge(u, v).unwrap();
                }
            }
        }
        b.build()
    }

    /// Disjoint union; vertices of `other` are offset by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut b = GraphBuilder::new(self.n + other.n);
        for (u, v) in self.edges() {
            b.add_edge(u, v).unwrap();
        }
        for (u, v) in other.edges() {
            b.add_edge(self.n + u, self.n + v).unwrap();
        }
        b.build()
    }

    /// True iff every pair in `x` × `y` is an edge. `x` and `y` must be
    /// disjoint.
    pub fn is_complete_between(&self, x: &VertexSet, y: &VertexSet) -> Result<bool, GraphError> {
        self.check_set(x)?;
        self.check_set(y)?;
        if let Some(v) = x.intersection(y).min() {
            return Err(GraphError::OverlappingSets(v));
        }
        for u in x.iter() {
            if !y.is_subset_of(&self.neighbors(u)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff no pair in `x` × `y` is an edge. `x` and `y` must be disjoint.
    pub fn is_anticomplete_between(&self, x: &VertexSet, y: &VertexSet) -> Result<bool, GraphError> {
        self.check_set(x)?;
        self.check_set(y)?;
        if let Some(v) = x.intersection(y).min() {
            return Err(GraphError::OverlappingSets(v));
        }
        for u in x.iter() {
            if !self.neighbors_in(u, y)?.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_stable_set(&self, s: &VertexSet) -> bool {
        let vs = s.to_vec();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_clique(&self, s: &VertexSet) -> bool {
        let vs = s.to_vec();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if !self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder {
            n: self.n,
            words_per_row: self.words_per_row,
            bits: self.bits.clone(),
        }
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges().collect::<Vec<_>>())
    }
}

/// Mutable assembly for [`Graph`] values.
#[derive(Clone)]
pub struct GraphBuilder {
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> GraphBuilder {
        let wpr = words_for(n);
        GraphBuilder {
            n,
            words_per_row: wpr,
            bits: vec![0; n * wpr],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: u, n: self.n });
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<&mut Self, GraphError> {
        self.check(u, v)?;
        self.bits[u * self.words_per_row + v / WORD_BITS] |= 1 << (v % WORD_BITS);
        self.bits[v * self.words_per_row + u / WORD_BITS] |= 1 << (u % WORD_BITS);
        Ok(self)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<&mut Self, GraphError> {
        self.check(u, v)?;
        self.bits[u * self.words_per_row + v / WORD_BITS] &= !(1 << (v % WORD_BITS));
        self.bits[v * self.words_per_row + u / WORD_BITS] &= !(1 << (u % WORD_BITS));
        Ok(self)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v
            && u < self.n
            && v < self.n
            && self.bits[u * self.words_per_row + v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    pub fn build(self) -> Graph {
        Graph {
            n: self.n,
            words_per_row: self.words_per_row,
            bits: self.bits,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn induced_subgraph_relabels_ascending() {
        // P4 on 0-1-2-3, keep {0,2,3}: relabels to 0,1,2 with the single
        // edge (2,3) -> (1,2) and 0 isolated.
        let p4 = Graph::path(4);
        let s = VertexSet::from_vertices(4, &[0, 2, 3]);
        let sub = p4.induced_subgraph(&s).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn induced_subgraph_identity_and_complete() {
        let c5 = Graph::cycle(5);
        assert_eq!(c5.induced_subgraph(&c5.vertex_set()).unwrap(), c5);
        let k5 = Graph::complete(5);
        let s = VertexSet::from_vertices(5, &[0, 1, 2]);
        assert_eq!(k5.induced_subgraph(&s).unwrap(), Graph::complete(3));
    }

    #[test]
    fn induced_subgraph_rejects_out_of_range() {
        let g = Graph::complete(3);
        let s = VertexSet::from_vertices(5, &[0, 4]);
        assert!(matches!(
            g.induced_subgraph(&s),
            Err(GraphError::CapacityMismatch { .. })
        ));
    }

    #[test]
    fn complement_involution_and_k4() {
        assert_eq!(Graph::complete(4).complement(), Graph::empty(4));
        let c5 = Graph::cycle(5);
        assert_eq!(c5.complement().complement(), c5);
    }

    #[test]
    fn complement_involution_exhaustive_n6() {
        // bit-exact double complement over every labeled 6-vertex graph,
        // and the induced-subgraph identity on the full vertex set
        for mask in 0u64..1 << 15 {
            let mut b = GraphBuilder::new(6);
            let mut bit = 0;
            for u in 0..6 {
                for v in u + 1..6 {
                    if mask >> bit & 1 == 1 {
                        b.add_edge(u, v).unwrap();
                    }
                    bit += 1;
                }
            }
            let g = b.build();
            assert_eq!(g.complement().complement(), g);
            assert_eq!(g.induced_subgraph(&g.vertex_set()).unwrap(), g);
        }
    }

    #[test]
    fn complement_c5_self_complementary() {
        // Brute-force isomorphism over all 120 permutations of 5 vertices.
        let c5 = Graph::cycle(5);
        let co = c5.complement();
        let mut perm = [0usize, 1, 2, 3, 4];
        let mut found = false;
        permutohedron_heap(&mut perm, &mut |p: &[usize; 5]| {
            let ok = (0..5).all(|u| {
                (u + 1..5).all(|v| c5.has_edge(u, v) == co.has_edge(p[u], p[v]))
            });
            found |= ok;
        });
        assert!(found);
    }

    // Tiny Heap's algorithm helper for the test above.
    fn permutohedron_heap(perm: &mut [usize; 5], f: &mut impl FnMut(&[usize; 5])) {
        fn rec(k: usize, perm: &mut [usize; 5], f: &mut impl FnMut(&[usize; 5])) {
            if k == 1 {
                f(perm);
                return;
            }
            for i in 0..k {
                rec(k - 1, perm, f);
                if k.is_multiple_of(2) {
                    perm.swap(i, k - 1);
                } else {
                    perm.swap(0, k - 1);
                }
            }
        }
        rec(5, perm, f);
    }

    #[test]
    fn disjoint_union_shapes() {
        let p2 = Graph::path(2);
        let p4 = Graph::path(4);
        let u = p2.disjoint_union(&p4);
        assert_eq!(u.n(), 6);
        assert_eq!(u.edges().collect::<Vec<_>>(), vec![(0, 1), (2, 3), (3, 4), (4, 5)]);

        let e = Graph::empty(0);
        assert_eq!(e.disjoint_union(&p4), p4);

        let k2k2 = Graph::path(2).disjoint_union(&Graph::path(2));
        assert_eq!(k2k2.n(), 4);
        assert_eq!(k2k2.edge_count(), 2);
    }

    #[test]
    fn neighbors_star_and_isolated() {
        // K_{1,3}: center 0.
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(star.neighbors(0).unwrap().to_vec(), vec![1, 2, 3]);
        let iso = Graph::empty(3);
        assert!(iso.neighbors(1).unwrap().is_empty());
        assert!(matches!(
            iso.neighbors(7),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn neighbors_in_restricts() {
        let c5 = Graph::cycle(5);
        let s = VertexSet::from_vertices(5, &[1, 2]);
        assert_eq!(c5.neighbors_in(0, &s).unwrap().to_vec(), vec![1]);
    }

    #[test]
    fn complete_and_anticomplete_between() {
        let k4 = Graph::complete(4);
        let x = VertexSet::from_vertices(4, &[0, 1]);
        let y = VertexSet::from_vertices(4, &[2, 3]);
        assert!(k4.is_complete_between(&x, &y).unwrap());
        assert!(!k4.is_anticomplete_between(&x, &y).unwrap());

        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(two_k2.is_anticomplete_between(&x, &y).unwrap());

        let p3 = Graph::path(3);
        let x = VertexSet::from_vertices(3, &[0]);
        let y = VertexSet::from_vertices(3, &[2]);
        assert!(!p3.is_complete_between(&x, &y).unwrap());
        assert!(p3.is_anticomplete_between(&x, &y).unwrap());
    }

    #[test]
    fn overlapping_sets_rejected() {
        let k4 = Graph::complete(4);
        let x = VertexSet::from_vertices(4, &[0, 1]);
        let y = VertexSet::from_vertices(4, &[1, 2]);
        assert_eq!(
            k4.is_complete_between(&x, &y),
            Err(GraphError::OverlappingSets(1))
        );
    }

    #[test]
    fn union_edge_count_additive() {
        let a = Graph::cycle(5);
        let b = Graph::complete(4);
        assert_eq!(
            a.disjoint_union(&b).edge_count(),
            a.edge_count() + b.edge_count()
        );
    }

    #[test]
    fn complete_multipartite_structure() {
        let g = Graph::complete_multipartite(&[2, 2, 2]);
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 12);
        assert!(!g.has_edge(0, 1));
        assert!(g.has_edge(0, 2));
        assert!(g.is_stable_set(&VertexSet::from_vertices(6, &[2, 3])));
    }

    #[test]
    fn builder_roundtrip_and_removal() {
        let g = Graph::complete(5);
        let mut b = g.to_builder();
        b.remove_edge(0, 1).unwrap();
        let h = b.build();
        assert!(!h.has_edge(0, 1));
        assert_eq!(h.edge_count(), 9);
        assert!(matches!(
            GraphBuilder::new(3).add_edge(1, 1),
            Err(GraphError::SelfLoop(1))
        ));
    }

    #[test]
    fn vertex_set_ops_across_word_boundary() {
        let mut a = VertexSet::new(130);
        let mut b = VertexSet::new(130);
        a.insert(0);
        a.insert(63);
        a.insert(64);
        a.insert(129);
        b.insert(64);
        b.insert(129);
        assert_eq!(a.len(), 4);
        assert_eq!(a.intersection(&b).to_vec(), vec![64, 129]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 63]);
        assert!(b.is_subset_of(&a));
        assert_eq!(a.min(), Some(0));
    }
}
