//! Causal DAGs with variable metadata and exact d-separation.
//!
//! Variables carry a cardinality (the number of values they take) and an
//! observed/hidden flag. Cardinality is mandatory even for observed
//! variables because the cardinality comparisons downstream need it
//! uniformly. Graphs are immutable after construction, so queries can be
//! shared freely.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSpec {
    pub name: String,
    pub cardinality: usize,
    pub observed: bool,
}

impl VariableSpec {
    pub fn observed(name: impl Into<String>, cardinality: usize) -> Self {
        VariableSpec { name: name.into(), cardinality, observed: true }
    }

    pub fn hidden(name: impl Into<String>, cardinality: usize) -> Self {
        VariableSpec { name: name.into(), cardinality, observed: false }
    }
}

/// A d-separation query: are `x_set` and `y_set` separated given `z_set`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationQuery {
    pub x_set: Vec<String>,
    pub y_set: Vec<String>,
    pub z_set: Vec<String>,
}

impl SeparationQuery {
    pub fn new<S: Into<String> + Clone>(x: &[S], y: &[S], z: &[S]) -> Self {
        let conv = |s: &[S]| s.iter().cloned().map(Into::into).collect();
        SeparationQuery { x_set: conv(x), y_set: conv(y), z_set: conv(z) }
    }

    pub fn pair(x: impl Into<String>, y: impl Into<String>) -> Self {
        SeparationQuery { x_set: vec![x.into()], y_set: vec![y.into()], z_set: Vec::new() }
    }

    pub fn given<S: Into<String> + Clone>(mut self, z: &[S]) -> Self {
        self.z_set = z.iter().cloned().map(Into::into).collect();
        self
    }
}

#[derive(Debug, Clone)]
pub struct CausalGraph {
    variables: Vec<VariableSpec>,
    index: BTreeMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    edges: BTreeSet<(usize, usize)>,
}

impl CausalGraph {
    /// Validates variable declarations and the edge set, rejecting
    /// duplicate names, undeclared endpoints and directed cycles.
    pub fn build(variables: Vec<VariableSpec>, edges: &[(&str, &str)]) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if v.cardinality == 0 {
                return Err(Error::ZeroCardinality(v.name.clone()));
            }
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateName(v.name.clone()));
            }
        }
        let n = variables.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        let mut edge_set = BTreeSet::new();
        for &(from, to) in edges {
            let f = *index.get(from).ok_or_else(|| Error::UnknownVariable(from.to_string()))?;
            let t = *index.get(to).ok_or_else(|| Error::UnknownVariable(to.to_string()))?;
            if edge_set.insert((f, t)) {
                children[f].push(t);
                parents[t].push(f);
            }
        }
        // Canonical adjacency order: by variable index.
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }

        // Kahn's algorithm; leftovers mean a directed cycle (self-loops
        // included).
        let mut in_deg: Vec<usize> = parents.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&i| in_deg[i] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop() {
            removed += 1;
            for &c in &children[v] {
                in_deg[c] -= 1;
                if in_deg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if removed != n {
            return Err(Error::CycleDetected);
        }

        Ok(CausalGraph { variables, index, parents, children, edges: edge_set })
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn variable(&self, index: usize) -> &VariableSpec {
        &self.variables[index]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(f, t)| (self.variables[f].name.as_str(), self.variables[t].name.as_str()))
    }

    pub fn parents(&self, index: usize) -> &[usize] {
        &self.parents[index]
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Topological order of variable indices.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut in_deg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: Vec<usize> = (0..self.len()).filter(|&i| in_deg[i] == 0).collect();
        queue.sort_unstable();
        let mut order = Vec::with_capacity(self.len());
        while let Some(v) = queue.pop() {
            order.push(v);
            for &c in &self.children[v] {
                in_deg[c] -= 1;
                if in_deg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        order
    }

    /// Proper descendants of `v` (excluding `v`).
    pub fn descendants(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<usize> = self.children[v].clone();
        while let Some(c) = stack.pop() {
            if out.insert(c) {
                stack.extend_from_slice(&self.children[c]);
            }
        }
        out
    }

    fn resolve_set(&self, names: &[String]) -> Result<BTreeSet<usize>> {
        names.iter().map(|n| self.variable_index(n)).collect()
    }

    /// Whether the conditioning set `z_set` blocks the given path.
    ///
    /// A path is blocked when it contains a fork or chain whose middle
    /// vertex is conditioned on, or a collider whose middle vertex and all
    /// of its descendants are unconditioned.
    pub fn path_is_blocked(&self, path: &[&str], z_set: &[String]) -> Result<bool> {
        let z = self.resolve_set(z_set)?;
        let idx: Vec<usize> =
            path.iter().map(|n| self.variable_index(n)).collect::<Result<_>>()?;
        for w in idx.windows(2) {
            if !self.adjacent(w[0], w[1]) {
                return Err(Error::InvalidPath {
                    from: self.variables[w[0]].name.clone(),
                    to: self.variables[w[1]].name.clone(),
                });
            }
        }
        for w in idx.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let collider = self.has_edge(a, b) && self.has_edge(c, b);
            if collider {
                if !z.contains(&b) && self.descendants(b).is_disjoint(&z) {
                    return Ok(true);
                }
            } else if z.contains(&b) {
                // Fork or chain with a conditioned middle vertex.
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// All simple paths between two vertices over the graph skeleton
    /// (edge direction ignored). Exponential in general; intended for the
    /// small graphs this crate works with.
    pub fn all_simple_paths(&self, x: usize, y: usize) -> Vec<Vec<usize>> {
        let mut paths = Vec::new();
        let mut current = vec![x];
        let mut on_path = vec![false; self.len()];
        on_path[x] = true;
        self.path_dfs(y, &mut current, &mut on_path, &mut paths);
        paths
    }

    fn path_dfs(
        &self,
        target: usize,
        current: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        paths: &mut Vec<Vec<usize>>,
    ) {
        let v = *current.last().unwrap();
        if v == target {
            paths.push(current.clone());
            return;
        }
        let mut nexts: Vec<usize> = self.parents[v].iter().chain(&self.children[v]).copied().collect();
        nexts.sort_unstable();
        nexts.dedup();
        for next in nexts {
            if on_path[next] {
                continue;
            }
            on_path[next] = true;
            current.push(next);
            self.path_dfs(target, current, on_path, paths);
            current.pop();
            on_path[next] = false;
        }
    }

    fn validate_query(&self, query: &SeparationQuery) -> Result<(BTreeSet<usize>, BTreeSet<usize>, BTreeSet<usize>)> {
        let x = self.resolve_set(&query.x_set)?;
        let y = self.resolve_set(&query.y_set)?;
        let z = self.resolve_set(&query.z_set)?;
        for &v in x.intersection(&y).chain(x.intersection(&z)).chain(y.intersection(&z)) {
            return Err(Error::QuerySetsOverlap(self.variables[v].name.clone()));
        }
        Ok((x, y, z))
    }

    /// Exact d-separation via the reachable-vertices algorithm.
    ///
    /// The contract is equivalence with exhaustive path enumeration: `x_set`
    /// and `y_set` are separated iff every skeleton path between them is
    /// blocked by `z_set`.
    pub fn d_separated(&self, query: &SeparationQuery) -> Result<bool> {
        let (x, y, z) = self.validate_query(query)?;

        // Vertices with a descendant in Z (or in Z themselves) open
        // colliders.
        let mut opens_collider = z.clone();
        let mut stack: Vec<usize> = z.iter().copied().collect();
        while let Some(v) = stack.pop() {
            for &p in &self.parents[v] {
                if opens_collider.insert(p) {
                    stack.push(p);
                }
            }
        }

        // Breadth-first search on (vertex, arrival direction) states.
        // `FromChild` also covers the virtual start state of the sources.
        #[derive(Clone, Copy, PartialEq)]
        enum Arrival {
            FromChild,
            FromParent,
        }
        let mut visited = vec![[false; 2]; self.len()];
        let mut queue: Vec<(usize, Arrival)> =
            x.iter().map(|&v| (v, Arrival::FromChild)).collect();
        while let Some((v, dir)) = queue.pop() {
            let slot = &mut visited[v][matches!(dir, Arrival::FromParent) as usize];
            if *slot {
                continue;
            }
            *slot = true;
            if !z.contains(&v) && y.contains(&v) {
                return Ok(false);
            }
            match dir {
                Arrival::FromChild => {
                    if !z.contains(&v) {
                        for &p in &self.parents[v] {
                            queue.push((p, Arrival::FromChild));
                        }
                        for &c in &self.children[v] {
                            queue.push((c, Arrival::FromParent));
                        }
                    }
                }
                Arrival::FromParent => {
                    if !z.contains(&v) {
                        for &c in &self.children[v] {
                            queue.push((c, Arrival::FromParent));
                        }
                    }
                    if opens_collider.contains(&v) {
                        for &p in &self.parents[v] {
                            queue.push((p, Arrival::FromChild));
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Product of the cardinalities of `z_set`; 1 for the empty set.
    pub fn separator_cardinality(&self, z_set: &[String]) -> Result<u64> {
        let mut product = 1u64;
        for name in z_set {
            let i = self.variable_index(name)?;
            product = product.saturating_mul(self.variables[i].cardinality as u64);
        }
        Ok(product)
    }

    /// All inclusion-minimal sets of hidden variables `S` such that
    /// `S ∪ conditioned` d-separates `x` and `y`, each paired with the
    /// product of the cardinalities of `S` (the hidden part; the observed
    /// part is handled by slicing on its values).
    ///
    /// Returns an empty list when no such set exists, e.g. when the
    /// hypothesis graph has a direct edge between `x` and `y`.
    pub fn find_hidden_separators(
        &self,
        x: &str,
        y: &str,
        conditioned: &[String],
    ) -> Result<Vec<(Vec<String>, u64)>> {
        let xi = self.variable_index(x)?;
        let yi = self.variable_index(y)?;
        if xi == yi {
            return Err(Error::QuerySetsOverlap(x.to_string()));
        }
        for name in conditioned {
            let i = self.variable_index(name)?;
            if !self.variables[i].observed {
                return Err(Error::NoObservedData(name.clone()));
            }
        }
        let candidates: Vec<usize> = (0..self.len())
            .filter(|&i| !self.variables[i].observed && i != xi && i != yi)
            .filter(|&i| !conditioned.iter().any(|c| c == &self.variables[i].name))
            .collect();

        let mut subsets: Vec<Vec<usize>> = (0u32..(1 << candidates.len()))
            .map(|mask| {
                candidates
                    .iter()
                    .enumerate()
                    .filter(|&(bit, _)| mask & (1 << bit) != 0)
                    .map(|(_, &i)| i)
                    .collect()
            })
            .collect();
        subsets.sort_by_key(|s: &Vec<usize>| (s.len(), s.clone()));

        let mut minimal: Vec<Vec<usize>> = Vec::new();
        let mut result = Vec::new();
        for subset in subsets {
            if minimal.iter().any(|m| m.iter().all(|v| subset.contains(v))) {
                continue; // a subset of it already separates
            }
            let mut z_names: Vec<String> =
                subset.iter().map(|&i| self.variables[i].name.clone()).collect();
            z_names.extend(conditioned.iter().cloned());
            let query = SeparationQuery {
                x_set: vec![x.to_string()],
                y_set: vec![y.to_string()],
                z_set: z_names,
            };
            if self.d_separated(&query)? {
                let cardinality = subset
                    .iter()
                    .map(|&i| self.variables[i].cardinality as u64)
                    .product::<u64>();
                result.push((
                    subset.iter().map(|&i| self.variables[i].name.clone()).collect(),
                    cardinality,
                ));
                minimal.push(subset);
            }
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fork: Z -> X, Z -> Y with hidden Z.
    pub(crate) fn fig_fork(card_z: usize) -> CausalGraph {
        CausalGraph::build(
            vec![
                VariableSpec::observed("X", 3),
                VariableSpec::observed("Y", 3),
                VariableSpec::hidden("Z", card_z),
            ],
            &[("Z", "X"), ("Z", "Y")],
        )
        .unwrap()
    }

    /// Seed-and-mediary graph: Z1 -> X, Z1 -> Y, X -> Z2, Z2 -> Y.
    fn fig_hybrid() -> CausalGraph {
        CausalGraph::build(
            vec![
                VariableSpec::observed("X", 2),
                VariableSpec::observed("Y", 2),
                VariableSpec::hidden("Z1", 2),
                VariableSpec::hidden("Z2", 3),
            ],
            &[("Z1", "X"), ("Z1", "Y"), ("X", "Z2"), ("Z2", "Y")],
        )
        .unwrap()
    }

    /// Confounder with direct influence: U -> X, U -> Y, X -> Y.
    fn fig_direct() -> CausalGraph {
        CausalGraph::build(
            vec![
                VariableSpec::observed("X", 3),
                VariableSpec::observed("Y", 3),
                VariableSpec::hidden("U", 2),
            ],
            &[("U", "X"), ("U", "Y"), ("X", "Y")],
        )
        .unwrap()
    }

    /// Partially observed common cause: U -> X, U -> Y, Z -> X, Z -> Y.
    fn fig_partial() -> CausalGraph {
        CausalGraph::build(
            vec![
                VariableSpec::observed("X", 2),
                VariableSpec::observed("Y", 2),
                VariableSpec::observed("Z", 2),
                VariableSpec::hidden("U", 2),
            ],
            &[("U", "X"), ("U", "Y"), ("Z", "X"), ("Z", "Y")],
        )
        .unwrap()
    }

    #[test]
    fn build_validates() {
        assert!(fig_fork(4).d_separated(&SeparationQuery::pair("X", "Y").given(&["Z"])).unwrap());

        let err = CausalGraph::build(
            vec![VariableSpec::observed("X", 2)],
            &[("X", "X")],
        )
        .unwrap_err();
        assert_eq!(err, Error::CycleDetected);

        let err = CausalGraph::build(
            vec![VariableSpec::observed("X", 2), VariableSpec::observed("Y", 2)],
            &[("X", "Y"), ("Y", "X")],
        )
        .unwrap_err();
        assert_eq!(err, Error::CycleDetected);

        let err = CausalGraph::build(
            vec![VariableSpec::observed("X", 2), VariableSpec::observed("X", 3)],
            &[],
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateName("X".into()));

        let err =
            CausalGraph::build(vec![VariableSpec::observed("X", 2)], &[("X", "W")]).unwrap_err();
        assert_eq!(err, Error::UnknownVariable("W".into()));
    }

    #[test]
    fn blocking_conditions() {
        let g = fig_fork(2);
        // Fork X <- Z -> Y blocked once Z is conditioned.
        assert!(g.path_is_blocked(&["X", "Z", "Y"], &["Z".into()]).unwrap());
        assert!(!g.path_is_blocked(&["X", "Z", "Y"], &[]).unwrap());

        let collider = CausalGraph::build(
            vec![
                VariableSpec::observed("X", 2),
                VariableSpec::observed("Y", 2),
                VariableSpec::observed("Z", 2),
            ],
            &[("X", "Z"), ("Y", "Z")],
        )
        .unwrap();
        assert!(collider.path_is_blocked(&["X", "Z", "Y"], &[]).unwrap());
        assert!(!collider.path_is_blocked(&["X", "Z", "Y"], &["Z".into()]).unwrap());

        // Conditioning a collider's descendant also unblocks it.
        let desc = CausalGraph::build(
            vec![
                VariableSpec::observed("X", 2),
                VariableSpec::observed("Y", 2),
                VariableSpec::observed("Z", 2),
                VariableSpec::observed("W", 2),
            ],
            &[("X", "Z"), ("Y", "Z"), ("Z", "W")],
        )
        .unwrap();
        assert!(!desc.path_is_blocked(&["X", "Z", "Y"], &["W".into()]).unwrap());

        let err = fig_fork(2).path_is_blocked(&["X", "Y"], &[]).unwrap_err();
        assert!(matches!(err, Error::InvalidPath { .. }));
    }

    #[test]
    fn d_separation_on_reference_graphs() {
        let fork = fig_fork(4);
        assert!(fork.d_separated(&SeparationQuery::pair("X", "Y").given(&["Z"])).unwrap());
        assert!(!fork.d_separated(&SeparationQuery::pair("X", "Y")).unwrap());

        let hybrid = fig_hybrid();
        assert!(hybrid
            .d_separated(&SeparationQuery::pair("X", "Y").given(&["Z1", "Z2"]))
            .unwrap());
        assert!(!hybrid.d_separated(&SeparationQuery::pair("X", "Y").given(&["Z1"])).unwrap());
        assert!(!hybrid.d_separated(&SeparationQuery::pair("X", "Y").given(&["Z2"])).unwrap());

        // A direct edge is never blockable.
        let direct = fig_direct();
        assert!(!direct.d_separated(&SeparationQuery::pair("X", "Y").given(&["U"])).unwrap());
    }

    #[test]
    fn d_separation_is_symmetric() {
        let g = fig_hybrid();
        for z in [&[][..], &["Z1"][..], &["Z2"][..], &["Z1", "Z2"][..]] {
            let fwd = g.d_separated(&SeparationQuery::pair("X", "Y").given(z)).unwrap();
            let bwd = g.d_separated(&SeparationQuery::pair("Y", "X").given(z)).unwrap();
            assert_eq!(fwd, bwd);
        }
    }

    #[test]
    fn query_validation() {
        let g = fig_fork(2);
        let err = g
            .d_separated(&SeparationQuery::new(&["X"], &["X"], &[]))
            .unwrap_err();
        assert!(matches!(err, Error::QuerySetsOverlap(_)));
        let err = g.d_separated(&SeparationQuery::pair("X", "Q")).unwrap_err();
        assert!(matches!(err, Error::UnknownVariable(_)));
    }

    #[test]
    fn separator_cardinalities() {
        let g = fig_hybrid();
        assert_eq!(g.separator_cardinality(&[]).unwrap(), 1);
        assert_eq!(g.separator_cardinality(&["Z2".into()]).unwrap(), 3);
        assert_eq!(g.separator_cardinality(&["Z1".into(), "Z2".into()]).unwrap(), 6);
        let fork = fig_fork(4);
        assert_eq!(fork.separator_cardinality(&["Z".into()]).unwrap(), 4);
    }

    #[test]
    fn hidden_separators_found() {
        let fork = fig_fork(2);
        let seps = fork.find_hidden_separators("X", "Y", &[]).unwrap();
        assert_eq!(seps, vec![(vec!["Z".to_string()], 2)]);

        let direct = fig_direct();
        assert!(direct.find_hidden_separators("X", "Y", &[]).unwrap().is_empty());

        let partial = fig_partial();
        let seps = partial.find_hidden_separators("X", "Y", &["Z".into()]).unwrap();
        assert_eq!(seps, vec![(vec!["U".to_string()], 2)]);
        // Without conditioning on Z nothing separates: the path X <- Z -> Y
        // stays open.
        assert!(partial.find_hidden_separators("X", "Y", &[]).unwrap().is_empty());

        let hybrid = fig_hybrid();
        let seps = hybrid.find_hidden_separators("X", "Y", &[]).unwrap();
        assert_eq!(seps, vec![(vec!["Z1".to_string(), "Z2".to_string()], 6)]);
    }

    #[test]
    fn paths_enumerated_on_skeleton() {
        let g = fig_hybrid();
        let x = g.variable_index("X").unwrap();
        let y = g.variable_index("Y").unwrap();
        let paths = g.all_simple_paths(x, y);
        // X <- Z1 -> Y and X -> Z2 -> Y.
        assert_eq!(paths.len(), 2);
    }
}
