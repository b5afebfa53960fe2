//! Predicate dependency graphs and query-relevance pruning.
//!
//! A clause is relevant to a query when its head predicate is reachable from
//! a query predicate. Edges run from a head predicate to each predicate in its
//! body; negated literals count like positive ones.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use indexmap::{IndexMap, IndexSet};

use crate::engine::{is_prelude_predicate, prelude_predicates};
use crate::syntax::{Builtin, Literal, PredId, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Positive,
    Naf,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: PredId,
    pub to: PredId,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, Default)]
pub struct DepGraph {
    /// In order of first appearance: builtins, library predicates, then the
    /// program's predicates and the query's.
    pub nodes: IndexSet<PredId>,
    pub edges: Vec<Edge>,
    pub roots: IndexSet<PredId>,
}

impl DepGraph {
    pub fn successors<'a>(&'a self, p: &'a PredId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.from == p)
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges
            .iter()
            .any(|e| e.from.to_string() == from && e.to.to_string() == to)
    }
}

fn always_kept() -> Vec<PredId> {
    let mut v = vec![Builtin::Unify.pred_id(), Builtin::NotUnify.pred_id()];
    v.extend(prelude_predicates());
    v
}

/// Builds the dependency graph of `p` rooted at the predicates of `query`.
pub fn build_depgraph(p: &Program, query: &[Literal]) -> DepGraph {
    let mut g = DepGraph::default();
    g.nodes.extend(always_kept());
    let mut seen = HashSet::new();
    for c in p.clauses() {
        let head = c.pred_id();
        g.nodes.insert(head.clone());
        for lit in &c.body {
            let to = lit.pred_id();
            g.nodes.insert(to.clone());
            let kind = if lit.is_naf() {
                EdgeKind::Naf
            } else {
                EdgeKind::Positive
            };
            let edge = Edge {
                from: head.clone(),
                to,
                kind,
            };
            if seen.insert(edge.clone()) {
                g.edges.push(edge);
            }
        }
    }
    for lit in query {
        let p = lit.pred_id();
        g.nodes.insert(p.clone());
        g.roots.insert(p);
    }
    g
}

/// Forward closure of the roots over all edges, together with the builtins
/// and library predicates.
pub fn reachable(g: &DepGraph) -> BTreeSet<PredId> {
    let mut adj: IndexMap<&PredId, Vec<&PredId>> = IndexMap::new();
    for e in &g.edges {
        adj.entry(&e.from).or_default().push(&e.to);
    }
    let mut visited: HashSet<&PredId> = g.roots.iter().collect();
    let mut queue: VecDeque<&PredId> = g.roots.iter().collect();
    while let Some(p) = queue.pop_front() {
        for &q in adj.get(p).into_iter().flatten() {
            if visited.insert(q) {
                queue.push_back(q);
            }
        }
    }
    let mut out: BTreeSet<PredId> = always_kept().into_iter().collect();
    out.extend(visited.into_iter().cloned());
    out
}

/// A pruned program plus diagnostics about the query.
#[derive(Clone, Debug)]
pub struct PruneReport {
    pub program: Program,
    pub warnings: Vec<String>,
}

/// Keeps exactly the clauses whose head predicate is reachable from the
/// query, in source order. Clauses the program gives for library predicates
/// are always kept.
pub fn prune_program(p: &Program, query: &[Literal]) -> Program {
    prune_with_report(p, query).program
}

pub fn prune_with_report(p: &Program, query: &[Literal]) -> PruneReport {
    let g = build_depgraph(p, query);
    let keep = reachable(&g);
    let program = p.filter(|c| {
        let head = c.pred_id();
        is_prelude_predicate(&head) || keep.contains(&head)
    });
    let warnings = g
        .roots
        .iter()
        .filter(|r| !p.defines(r) && !always_kept().contains(r))
        .map(|r| format!("query predicate {r} has no clauses in the program"))
        .collect();
    PruneReport { program, warnings }
}

fn quote(p: &PredId) -> String {
    let label = p.to_string();
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering. Roots are filled, negated dependencies dashed.
pub fn to_dot(g: &DepGraph) -> String {
    let mut out = String::from("digraph deps {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box, fontname=\"Helvetica\"];\n");
    for n in &g.nodes {
        if g.roots.contains(n) {
            let _ = writeln!(out, "  {} [style=filled, fillcolor=\"#ffd54f\", penwidth=2];", quote(n));
        } else {
            let _ = writeln!(out, "  {};", quote(n));
        }
    }
    for e in &g.edges {
        let style = match e.kind {
            EdgeKind::Positive => "",
            EdgeKind::Naf => " [style=dashed, label=\"not\"]",
        };
        let _ = writeln!(out, "  {} -> {}{};", quote(&e.from), quote(&e.to), style);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_query};

    const FAMILY: &str = include_str!("../fixtures/family.lp");

    fn ids(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn user_reachable(g: &DepGraph) -> BTreeSet<String> {
        let builtins: Vec<PredId> = always_kept();
        reachable(g)
            .into_iter()
            .filter(|p| !builtins.contains(p))
            .map(|p| p.to_string())
            .collect()
    }

    #[test]
    fn family_edges() {
        let p = parse_program(FAMILY).unwrap();
        let g = build_depgraph(&p, &parse_query("?- niece(X, Y).").unwrap());
        for (a, b) in [
            ("niece/2", "auntuncle/2"),
            ("niece/2", "female/1"),
            ("auntuncle/2", "sibling/2"),
            ("auntuncle/2", "parent/2"),
            ("sibling/2", "parent/2"),
            ("parent/2", "sibling/2"),
            ("parent/2", "parent/2"),
        ] {
            assert!(g.has_edge(a, b), "missing {a} -> {b}");
        }
        assert_eq!(
            user_reachable(&g),
            ids(&["niece/2", "auntuncle/2", "female/1", "sibling/2", "parent/2"])
        );
    }

    #[test]
    fn grandparent_reach() {
        let p = parse_program(FAMILY).unwrap();
        let g = build_depgraph(&p, &parse_query("grandparent(A, B).").unwrap());
        assert_eq!(user_reachable(&g), ids(&["grandparent/2", "parent/2", "sibling/2"]));
    }

    #[test]
    fn empty_roots_reach_builtins_only() {
        let p = parse_program(FAMILY).unwrap();
        let g = build_depgraph(&p, &[]);
        assert!(user_reachable(&g).is_empty());
        assert_eq!(reachable(&g).len(), 5);
    }

    #[test]
    fn empty_program() {
        let g = build_depgraph(&Program::default(), &parse_query("foo(X).").unwrap());
        assert!(g.edges.is_empty());
        assert_eq!(g.roots.iter().map(|r| r.to_string()).collect::<Vec<_>>(), ["foo/1"]);
        assert!(g.nodes.contains(&PredId::new("=", 2)));
        assert!(g.nodes.contains(&PredId::new("\\=", 2)));
    }

    #[test]
    fn family_prune_drops_male_and_grandparent() {
        let p = parse_program(FAMILY).unwrap();
        let q = parse_query("niece(X,Y).").unwrap();
        let pruned = prune_program(&p, &q);
        assert_eq!((p.len(), pruned.len()), (12, 9));
        let text = pruned.to_string();
        assert!(!text.contains("male(") || text.contains("female("));
        assert!(!text.lines().any(|l| l.starts_with("male(")));
        assert!(!text.contains("grandparent("));
        assert_eq!(prune_program(&pruned, &q), pruned);
    }

    #[test]
    fn absent_query_predicate_warns() {
        let p = parse_program(FAMILY).unwrap();
        let r = prune_with_report(&p, &parse_query("cousin(X,Y).").unwrap());
        assert!(r.program.is_empty());
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("cousin/2"));
    }

    #[test]
    fn user_library_clauses_survive() {
        let p = parse_program("member(x, y).\nfoo(a).\nbar(b).").unwrap();
        let pruned = prune_program(&p, &parse_query("foo(X).").unwrap());
        assert_eq!(pruned.to_string(), "member(x,y).\nfoo(a).\n");
    }

    #[test]
    fn dot_output() {
        let p = parse_program(FAMILY).unwrap();
        let g = build_depgraph(&p, &parse_query("niece(X,Y).").unwrap());
        let dot = to_dot(&g);
        assert!(dot.starts_with("digraph deps {"));
        assert!(dot.contains("\"niece/2\" -> \"auntuncle/2\""));
        assert!(dot.contains("\"niece/2\" [style=filled"));

        let naf = parse_program("p(X) :- q(X), not r(X).").unwrap();
        let dot = to_dot(&build_depgraph(&naf, &[]));
        assert!(dot.contains("\"p/1\" -> \"r/1\" [style=dashed"));
        assert!(!dot.contains("\"p/1\" -> \"q/1\" [style=dashed"));

        let empty = to_dot(&DepGraph::default());
        assert!(empty.starts_with("digraph deps {") && empty.trim_end().ends_with('}'));
    }
}
