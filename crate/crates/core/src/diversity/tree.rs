//! Typed syntax trees of tasks.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::syntax::{Arg, Atom, Expr, TaskSpec, GRIPPER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NodeKind {
    Task,
    Predicate,
    Verb,
    Constraint,
    Object,
    Region,
}

impl NodeKind {
    pub const ALL: [NodeKind; 6] =
        [NodeKind::Task, NodeKind::Predicate, NodeKind::Verb, NodeKind::Constraint, NodeKind::Object, NodeKind::Region];
}

/// Ordered, labeled tree node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxNode {
    pub kind: NodeKind,
    pub label: String,
    pub children: Vec<SyntaxNode>,
}

impl SyntaxNode {
    pub fn leaf(kind: NodeKind, label: impl Into<String>) -> SyntaxNode {
        SyntaxNode { kind, label: label.into(), children: Vec::new() }
    }

    pub fn new(kind: NodeKind, label: impl Into<String>, children: Vec<SyntaxNode>) -> SyntaxNode {
        SyntaxNode { kind, label: label.into(), children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(SyntaxNode::size).sum::<usize>()
    }

    /// Nodes in postorder.
    pub fn postorder(&self) -> Vec<&SyntaxNode> {
        fn walk<'a>(n: &'a SyntaxNode, out: &mut Vec<&'a SyntaxNode>) {
            n.children.iter().for_each(|c| walk(c, out));
            out.push(n);
        }
        let mut out = Vec::with_capacity(self.size());
        walk(self, &mut out);
        out
    }
}

/// Manipulation verbs recognized in instructions.
pub const VERBS: &[&str] = &[
    "pick", "put", "place", "push", "pull", "open", "close", "turn", "move", "stack", "pour", "lift", "grab", "select",
    "choose", "seize", "set", "position", "locate", "shove", "nudge", "thrust", "slide", "wipe", "insert", "remove",
    "take", "press", "hand", "cut", "fetch", "drop", "avoid", "rotate", "flip",
];

/// `Task(domain)` with one Verb leaf per verb in the instruction, one subtree
/// per goal conjunct and one Constraint subtree per cost term.
///
/// Object leaves carry the object's category, region leaves their name, so
/// renamed instances of a category compare equal.
pub fn task_to_tree(spec: &TaskSpec) -> SyntaxNode {
    let mut children = Vec::new();
    if let Some(text) = &spec.language {
        for word in text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
            let w = word.to_lowercase();
            if VERBS.contains(&w.as_str()) {
                children.push(SyntaxNode::leaf(NodeKind::Verb, w));
            }
        }
    }
    let goals: Vec<&Expr> = match &spec.goal {
        Expr::And(cs) => cs.iter().collect(),
        g => alloc::vec![g],
    };
    children.extend(goals.into_iter().map(|g| expr_node(spec, g)));
    for term in spec.cost_terms() {
        let node = expr_node(spec, term);
        children.push(SyntaxNode { kind: NodeKind::Constraint, ..node });
    }
    SyntaxNode::new(NodeKind::Task, spec.domain.clone(), children)
}

fn expr_node(spec: &TaskSpec, e: &Expr) -> SyntaxNode {
    match e {
        Expr::Atom(a) => atom_node(spec, a),
        Expr::And(cs) => SyntaxNode::new(NodeKind::Predicate, "And", cs.iter().map(|c| expr_node(spec, c)).collect()),
        Expr::Or(cs) => SyntaxNode::new(NodeKind::Predicate, "Or", cs.iter().map(|c| expr_node(spec, c)).collect()),
        Expr::Not(c) => SyntaxNode::new(NodeKind::Predicate, "Not", alloc::vec![expr_node(spec, c)]),
    }
}

fn atom_node(spec: &TaskSpec, a: &Atom) -> SyntaxNode {
    let leaves = a
        .args
        .iter()
        .filter_map(Arg::as_name)
        .map(|n| match spec.object(n) {
            Some(o) if o.is_region() => SyntaxNode::leaf(NodeKind::Region, n),
            Some(o) => SyntaxNode::leaf(NodeKind::Object, o.category.clone()),
            None if n == GRIPPER => SyntaxNode::leaf(NodeKind::Object, "gripper"),
            None => SyntaxNode::leaf(NodeKind::Object, n.to_string()),
        })
        .collect();
    SyntaxNode::new(NodeKind::Predicate, a.predicate.name(), leaves)
}
