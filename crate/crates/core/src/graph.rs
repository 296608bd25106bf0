//! Undirected simple graphs, strong products and exact maximum independent sets.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use crate::value::Value;

/// Default vertex cap for exact independent-set search.
pub const DEFAULT_SEARCH_CAP: usize = 400;
/// Default vertex cap for materialized strong powers.
pub const DEFAULT_POWER_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) references a missing vertex")]
    MissingVertex(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph has {vertices} vertices, above the cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("search budget exhausted; best independent set found has size {}", best.size())]
    BudgetExceeded { best: IndependentSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<Value>,
    adj: Vec<FixedBitSet>,
}

/// An independent set as sorted vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentSet {
    pub vertices: Vec<usize>,
}

impl IndependentSet {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub cap: usize,
    pub budget: Option<Duration>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { cap: DEFAULT_SEARCH_CAP, budget: None }
    }
}

impl Graph {
    pub fn new(vertices: Vec<Value>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let n = vertices.len();
        let mut adj = vec![FixedBitSet::with_capacity(n); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::MissingVertex(a, b));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            adj[a].insert(b);
            adj[b].insert(a);
        }
        Ok(Graph { vertices, adj })
    }

    /// Vertices labeled `0..n` with no edges.
    pub fn edgeless(n: usize) -> Self {
        Graph::new((0..n as i64).map(Value::Int).collect(), &[]).expect("valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
        Graph::new((0..n as i64).map(Value::Int).collect(), &edges).expect("valid")
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new((0..n as i64).map(Value::Int).collect(), &edges).expect("valid")
    }

    pub fn vertices(&self) -> &[Value] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |a| self.adj[a].ones().filter(move |&b| b > a).map(move |b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.count_ones(..)).sum::<usize>() / 2
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| a != b && !self.has_edge(a, b)))
    }

    /// Strong product: `(u,v) ~ (u',v')` iff each coordinate is equal or
    /// adjacent and the pairs differ. Vertices are pairs in lexicographic order.
    pub fn strong_product(&self, other: &Graph) -> Graph {
        let (n, m) = (self.len(), other.len());
        let vertices = self
            .vertices
            .iter()
            .flat_map(|u| other.vertices.iter().map(move |v| Value::pair(u.clone(), v.clone())))
            .collect();
        let mut adj = vec![FixedBitSet::with_capacity(n * m); n * m];
        for a in 0..n {
            for b in 0..m {
                let idx = a * m + b;
                for a2 in std::iter::once(a).chain(self.adj[a].ones()) {
                    for b2 in std::iter::once(b).chain(other.adj[b].ones()) {
                        if a2 != a || b2 != b {
                            adj[idx].insert(a2 * m + b2);
                        }
                    }
                }
            }
        }
        Graph { vertices, adj }
    }

    /// `k`-fold strong power with flat `k`-tuple vertices in lexicographic order.
    pub fn strong_power(&self, k: usize, cap: usize) -> Result<Graph, GraphError> {
        assert!(k >= 1, "strong power needs k >= 1");
        let n = self.len();
        let total = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(n)).unwrap_or(usize::MAX);
        if total > cap {
            return Err(GraphError::TooLarge { vertices: total, cap });
        }
        let digits = |mut idx: usize| {
            let mut d = vec![0; k];
            for slot in d.iter_mut().rev() {
                *slot = idx % n;
                idx /= n;
            }
            d
        };
        let vertices = (0..total)
            .map(|i| Value::Tuple(digits(i).into_iter().map(|c| self.vertices[c].clone()).collect()))
            .collect();
        let closed: Vec<Vec<usize>> = (0..n).map(|a| std::iter::once(a).chain(self.adj[a].ones()).collect()).collect();
        let mut adj = vec![FixedBitSet::with_capacity(total); total];
        for (i, row) in adj.iter_mut().enumerate() {
            let d = digits(i);
            let mut frontier = vec![0usize];
            for &c in &d {
                frontier = frontier.iter().flat_map(|&p| closed[c].iter().map(move |&x| p * n + x)).collect();
            }
            for j in frontier {
                if j != i {
                    row.insert(j);
                }
            }
        }
        Ok(Graph { vertices, adj })
    }

    /// Adjacency list, one `vertex: neighbor neighbor ...` line per vertex.
    pub fn adjacency_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = write!(out, "{v}:");
            for j in self.adj[i].ones() {
                let _ = write!(out, " {}", self.vertices[j]);
            }
            out.push('\n');
        }
        out
    }

    /// Exact maximum independent set by branch and bound.
    ///
    /// Branches on the lowest-index candidate, include before exclude, and
    /// prunes with a greedy clique-cover bound. The first maximum reached is
    /// kept, which makes the witness the lexicographically smallest maximum
    /// independent set.
    pub fn max_independent_set(&self, opts: SearchOptions) -> Result<IndependentSet, GraphError> {
        if self.len() > opts.cap {
            return Err(GraphError::TooLarge { vertices: self.len(), cap: opts.cap });
        }
        let mut all = FixedBitSet::with_capacity(self.len());
        all.insert_range(..);
        let mut search = Search {
            adj: &self.adj,
            best: Vec::new(),
            found: false,
            current: Vec::new(),
            nodes: 0,
            deadline: opts.budget.map(|b| Instant::now() + b),
            timed_out: false,
        };
        search.expand(all);
        let best = IndependentSet { vertices: search.best };
        if search.timed_out {
            Err(GraphError::BudgetExceeded { best })
        } else {
            Ok(best)
        }
    }
}

struct Search<'a> {
    adj: &'a [FixedBitSet],
    best: Vec<usize>,
    found: bool,
    current: Vec<usize>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Search<'_> {
    fn expand(&mut self, cand: FixedBitSet) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                    return;
                }
            }
        }
        let Some(v) = cand.ones().next() else {
            if !self.found || self.current.len() > self.best.len() {
                self.best = self.current.clone();
                self.found = true;
            }
            return;
        };
        if self.found && self.current.len() + clique_cover(self.adj, &cand) <= self.best.len() {
            return;
        }
        let mut include = cand.clone();
        include.difference_with(&self.adj[v]);
        include.set(v, false);
        let isolated = include.count_ones(..) + 1 == cand.count_ones(..);
        self.current.push(v);
        self.expand(include);
        self.current.pop();
        if isolated {
            return;
        }
        let mut exclude = cand;
        exclude.set(v, false);
        self.expand(exclude);
    }
}

/// Size of a greedy clique cover of `cand`: an upper bound on any
/// independent subset of it.
fn clique_cover(adj: &[FixedBitSet], cand: &FixedBitSet) -> usize {
    let mut rest = cand.clone();
    let mut count = 0;
    while let Some(v) = rest.ones().next() {
        rest.set(v, false);
        let mut common = rest.clone();
        common.intersect_with(&adj[v]);
        while let Some(u) = common.ones().next() {
            rest.set(u, false);
            common.set(u, false);
            common.intersect_with(&adj[u]);
        }
        count += 1;
    }
    count
}

/// Greedy clique cover of the whole graph; its size bounds the independence
/// number of every strong power from above (per factor).
pub fn clique_cover_number_upper(g: &Graph) -> usize {
    let mut all = FixedBitSet::with_capacity(g.len());
    all.insert_range(..);
    clique_cover(&g.adj, &all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_alpha(g: &Graph) -> usize {
        let n = g.len();
        (0u64..1 << n)
            .filter(|m| g.edges().all(|(a, b)| m >> a & 1 == 0 || m >> b & 1 == 0))
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn products_of_small_graphs() {
        let e = Graph::edgeless(2).strong_product(&Graph::edgeless(2));
        assert_eq!((e.len(), e.edge_count()), (4, 0));
        let k = Graph::complete(2).strong_product(&Graph::complete(2));
        assert_eq!((k.len(), k.edge_count()), (4, 6));
        let c = Graph::cycle(5).strong_product(&Graph::cycle(5));
        assert_eq!((c.len(), c.edge_count()), (25, 100));
    }

    #[test]
    fn power_matches_product() {
        let c5 = Graph::cycle(5);
        let p = c5.strong_power(2, DEFAULT_POWER_CAP).unwrap();
        let q = c5.strong_product(&c5);
        assert_eq!(p.vertices(), q.vertices());
        assert_eq!(p.adj, q.adj);
        assert!(matches!(c5.strong_power(7, 1000), Err(GraphError::TooLarge { .. })));
    }

    #[test]
    fn independent_sets() {
        let opts = SearchOptions::default();
        let c5 = Graph::cycle(5);
        let s = c5.max_independent_set(opts).unwrap();
        assert_eq!(s.vertices, vec![0, 2]);
        assert_eq!(Graph::edgeless(3).max_independent_set(opts).unwrap().size(), 3);
        assert_eq!(Graph::complete(4).max_independent_set(opts).unwrap().size(), 1);
        let c55 = c5.strong_product(&c5);
        let w = c55.max_independent_set(opts).unwrap();
        assert_eq!(w.size(), 5);
        assert!(c55.is_independent(&w.vertices));
        assert_eq!(Graph::edgeless(0).max_independent_set(opts).unwrap().size(), 0);
    }

    #[test]
    fn witness_matches_brute_force_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(1..=12);
            let p: f64 = rng.random_range(0.1..0.9);
            let edges: Vec<_> = (0..n)
                .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
                .filter(|_| rng.random_bool(p))
                .collect();
            let g = Graph::new((0..n as i64).map(Value::Int).collect(), &edges).unwrap();
            let s = g.max_independent_set(SearchOptions::default()).unwrap();
            assert!(g.is_independent(&s.vertices));
            assert_eq!(s.size(), brute_alpha(&g));
        }
    }

    #[test]
    fn cap_and_budget() {
        let big = Graph::edgeless(500);
        assert!(matches!(
            big.max_independent_set(SearchOptions::default()),
            Err(GraphError::TooLarge { vertices: 500, cap: 400 })
        ));
        let c5 = Graph::cycle(5);
        let g = c5.strong_power(3, DEFAULT_POWER_CAP).unwrap();
        let r = g.max_independent_set(SearchOptions { cap: 400, budget: Some(Duration::ZERO) });
        match r {
            Err(GraphError::BudgetExceeded { best }) => assert!(g.is_independent(&best.vertices)),
            Ok(s) => assert_eq!(s.size(), 10),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn adjacency_export() {
        let text = Graph::cycle(3).adjacency_text();
        assert_eq!(text, "0: 1 2\n1: 0 2\n2: 0 1\n");
    }
}
