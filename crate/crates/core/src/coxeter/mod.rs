//! Coxeter diagrams, their Gram matrices and the geometry read off from them.

mod format;
mod gram;
mod weights;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{Tower, TowerElement};

pub use format::{parse_diagram, serialize_diagram};
pub use gram::{
    classify_subdiagram, cos_pi_over, double_polyhedron, gram_matrix, signature, truncate_hyperideal, truncated_gram,
    vertex_links,
    SubdiagramKind, VertexKind, VertexLink,
};
pub use weights::{
    numeric_gram, numeric_signature, solve_truncation_weights_numeric, vanishing_minors, verify_truncation_weights,
    MinorCheck, NumericSolution, SolverOptions, WeightReport,
};

/// An edge of a Coxeter diagram. Absent edges mean a right angle.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeKind {
    /// Dihedral angle `pi / m` with `m >= 3`.
    Label(u64),
    /// Parallel facets (`m = inf`).
    Heavy,
    /// Diverging facets with weight `-<e_i, e_j>`; `None` when unknown.
    Dotted(Option<Weight>),
}

/// A known dotted weight together with the text it was written as.
#[derive(Debug, Clone)]
pub struct Weight {
    pub value: TowerElement,
    pub source: String,
}

impl PartialEq for Weight {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Weight {
    pub fn new(value: TowerElement) -> Weight {
        let source = value.to_string();
        Weight { value, source }
    }
}

#[derive(Debug, Clone)]
pub struct CoxeterDiagram {
    name: Option<String>,
    tower: Arc<Tower>,
    nodes: Vec<String>,
    edges: BTreeMap<(usize, usize), EdgeKind>,
}

fn key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl CoxeterDiagram {
    /// A diagram on `n` nodes with no edges.
    pub fn new(n: usize) -> CoxeterDiagram {
        CoxeterDiagram {
            name: None,
            tower: Tower::rationals(),
            nodes: (1..=n).map(|i| i.to_string()).collect(),
            edges: BTreeMap::new(),
        }
    }

    /// A linear diagram with the given labels (`2` leaves a gap).
    pub fn chain(labels: &[u64]) -> CoxeterDiagram {
        let mut d = CoxeterDiagram::new(labels.len() + 1);
        for (i, &m) in labels.iter().enumerate() {
            if m > 2 {
                d.set_edge(i, i + 1, EdgeKind::Label(m)).expect("valid chain");
            }
        }
        d
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn set_node_name(&mut self, i: usize, name: impl Into<String>) {
        self.nodes[i] = name.into();
    }

    /// Index of the node with the given display name.
    pub fn find_node(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<&EdgeKind> {
        self.edges.get(&key(i, j))
    }

    /// All edges with `i < j`, in order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &EdgeKind)> {
        self.edges.iter().map(|(&k, e)| (k, e))
    }

    /// Inserts or replaces an edge, validating labels and known weights.
    pub fn set_edge(&mut self, i: usize, j: usize, kind: EdgeKind) -> Result<()> {
        let n = self.n();
        if i >= n || j >= n {
            return Err(Error::InvalidDiagram(format!("edge {} {} out of range", i + 1, j + 1)));
        }
        if i == j {
            return Err(Error::InvalidDiagram(format!("self-edge at node {}", i + 1)));
        }
        match &kind {
            EdgeKind::Label(m) if *m < 3 => {
                return Err(Error::InvalidDiagram(format!("label m={m} must be at least 3")));
            }
            EdgeKind::Dotted(Some(w)) => {
                let one = TowerElement::one(w.value.tower());
                if w.value.cmp_value(&one)? != std::cmp::Ordering::Greater {
                    return Err(Error::InvalidDiagram(format!(
                        "dotted weight {} between {} and {} is not greater than 1",
                        w.source,
                        i + 1,
                        j + 1
                    )));
                }
                self.adopt_tower(w.value.tower())?;
            }
            _ => {}
        }
        self.edges.insert(key(i, j), kind);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.edges.remove(&key(i, j));
    }

    /// Makes `t` the diagram's tower when it extends the current one.
    pub(crate) fn adopt_tower(&mut self, t: &Arc<Tower>) -> Result<()> {
        if self.tower.is_prefix_of(t) {
            self.tower = t.clone();
            Ok(())
        } else if t.is_prefix_of(&self.tower) {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    /// Pairs whose dotted weight is unknown.
    pub fn unknown_weights(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter(|(_, e)| matches!(e, EdgeKind::Dotted(None)))
            .map(|(&k, _)| k)
            .collect()
    }

    /// Nodes joined to `i` by any edge.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| j != i && self.edge(i, j).is_some())
            .collect()
    }

    /// Connected components of the induced subdiagram on `nodes`.
    pub fn components(&self, nodes: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let inside: Vec<bool> = (0..self.n()).map(|i| nodes.contains(&i)).collect();
        let mut out = Vec::new();
        for &s in nodes {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                for w in self.neighbours(v) {
                    if inside[w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let all: Vec<usize> = (0..self.n()).collect();
        self.components(&all).len() <= 1
    }

    /// Induced subdiagram on the given nodes, renumbered in the given order.
    pub fn subdiagram(&self, nodes: &[usize]) -> CoxeterDiagram {
        let mut d = CoxeterDiagram {
            name: None,
            tower: self.tower.clone(),
            nodes: nodes.iter().map(|&i| self.nodes[i].clone()).collect(),
            edges: BTreeMap::new(),
        };
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate().skip(a + 1) {
                if let Some(e) = self.edge(i, j) {
                    d.edges.insert(key(a, b), e.clone());
                }
            }
        }
        d
    }

    /// Structural isomorphism of diagrams, comparing labels and weights.
    pub fn is_isomorphic(&self, other: &CoxeterDiagram) -> bool {
        self.isomorphism(other).is_some()
    }

    /// The first node map `i -> map[i]` carrying `self` onto `other`, found
    /// by backtracking over nodes in order.
    pub fn isomorphism(&self, other: &CoxeterDiagram) -> Option<Vec<usize>> {
        let n = self.n();
        if n != other.n() || self.edges.len() != other.edges.len() {
            return None;
        }
        let degree = |d: &CoxeterDiagram, i| d.neighbours(i).len();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn extend(
            a: &CoxeterDiagram,
            b: &CoxeterDiagram,
            k: usize,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
            degree: &dyn Fn(&CoxeterDiagram, usize) -> usize,
        ) -> bool {
            if k == a.n() {
                return true;
            }
            for c in 0..b.n() {
                if used[c] || degree(a, k) != degree(b, c) {
                    continue;
                }
                let ok = (0..k).all(|j| a.edge(k, j) == b.edge(c, map[j]));
                if ok {
                    map[k] = c;
                    used[c] = true;
                    if extend(a, b, k + 1, map, used, degree) {
                        return true;
                    }
                    used[c] = false;
                }
            }
            false
        }
        extend(self, other, 0, &mut map, &mut used, &degree).then_some(map)
    }

    /// Doubling template along facet `f`.
    ///
    /// Facets meeting `f` at a right angle are kept once; every other facet
    /// gets a mirror copy named with a trailing `'`. Edges between distinct
    /// copies are unknown dotted edges.
    pub fn double_template(&self, f: usize) -> Result<CoxeterDiagram> {
        let n = self.n();
        if f >= n {
            return Err(Error::OutOfRange(format!("facet {}", f + 1)));
        }
        let mut kept = Vec::new();
        let mut copied = Vec::new();
        for j in (0..n).filter(|&j| j != f) {
            match self.edge(f, j) {
                None => kept.push(j),
                Some(EdgeKind::Dotted(_) | EdgeKind::Heavy) => copied.push(j),
                Some(EdgeKind::Label(m)) => {
                    return Err(Error::Precondition(format!(
                        "facet {} meets facet {} at angle pi/{m}",
                        self.nodes[f], self.nodes[j]
                    )))
                }
            }
        }
        let order: Vec<usize> = (0..n).filter(|&j| j != f).collect();
        let mut d = self.subdiagram(&order);
        let pos = |j: usize| order.iter().position(|&x| x == j).unwrap();
        let base = d.n();
        for (c, &j) in copied.iter().enumerate() {
            d.nodes.push(format!("{}'", self.nodes[j]));
            let jc = base + c;
            for &k in &kept {
                if let Some(e) = self.edge(j, k) {
                    d.edges.insert(key(jc, pos(k)), e.clone());
                }
            }
            for (c2, &k) in copied.iter().enumerate().take(c) {
                if let Some(e) = self.edge(j, k) {
                    d.edges.insert(key(jc, base + c2), e.clone());
                }
            }
        }
        for c in 0..copied.len() {
            for &k in &copied {
                d.edges.insert(key(base + c, pos(k)), EdgeKind::Dotted(None));
            }
        }
        d.name = self.name.as_ref().map(|s| format!("{s}-double-{}", self.nodes[f]));
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_components() {
        let d = CoxeterDiagram::chain(&[4, 3, 5, 3]);
        assert_eq!(d.n(), 5);
        assert!(d.is_connected());
        let d2 = CoxeterDiagram::chain(&[3, 2, 3]);
        assert_eq!(d2.components(&[0, 1, 2, 3]), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn rejects_bad_edges() {
        let mut d = CoxeterDiagram::new(3);
        assert!(d.set_edge(0, 0, EdgeKind::Heavy).is_err());
        assert!(d.set_edge(0, 1, EdgeKind::Label(2)).is_err());
        assert!(d.set_edge(0, 5, EdgeKind::Heavy).is_err());
    }

    #[test]
    fn isomorphism_ignores_numbering() {
        let a = CoxeterDiagram::chain(&[4, 3, 5]);
        let b = CoxeterDiagram::chain(&[5, 3, 4]);
        let c = CoxeterDiagram::chain(&[3, 5, 3]);
        assert!(a.is_isomorphic(&b));
        assert!(!a.is_isomorphic(&c));
    }

    #[test]
    fn doubling_a_right_angled_square() {
        // Square: sides 1..4, opposite sides diverge.
        let mut d = CoxeterDiagram::new(4);
        d.set_edge(0, 2, EdgeKind::Dotted(None)).unwrap();
        d.set_edge(1, 3, EdgeKind::Dotted(None)).unwrap();
        let t = d.double_template(0).unwrap();
        // Sides 2 and 4 are kept, side 3 gets a copy.
        assert_eq!(t.n(), 4);
        assert_eq!(t.unknown_weights().len(), 2);
        assert_eq!(t.node_name(3), "3'");
    }

    #[test]
    fn doubling_requires_right_angles() {
        let d = CoxeterDiagram::chain(&[3, 3]);
        assert!(matches!(d.double_template(1), Err(Error::Precondition(_))));
    }
}
