//! Weighted ordered tree edit distance (Zhang–Shasha).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::tree::{NodeKind, SyntaxNode};
use super::DiversityError;

/// Edit costs. Inserting or deleting a node costs its kind's weight; updating
/// within a kind costs `update_base * weight * (1 - jaccard(labels))`;
/// changing the kind costs the two weights together.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostModel {
    pub weights: BTreeMap<NodeKind, f64>,
    /// In `(0, 2]`, so an update never beats its own delete plus insert.
    pub update_base: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        let weights = [
            (NodeKind::Task, 4.0),
            (NodeKind::Predicate, 3.0),
            (NodeKind::Verb, 3.0),
            (NodeKind::Constraint, 3.0),
            (NodeKind::Object, 1.0),
            (NodeKind::Region, 1.0),
        ];
        CostModel { weights: weights.into_iter().collect(), update_base: 1.0 }
    }
}

impl CostModel {
    /// Checks that every kind has a positive finite weight and the update base fits.
    pub fn validate(&self) -> Result<(), DiversityError> {
        for k in NodeKind::ALL {
            match self.weights.get(&k) {
                Some(w) if w.is_finite() && *w > 0.0 => {}
                Some(w) => return Err(DiversityError::Weight(k, *w)),
                None => return Err(DiversityError::MissingWeight(k)),
            }
        }
        if !(self.update_base > 0.0 && self.update_base <= 2.0) {
            return Err(DiversityError::UpdateBase(self.update_base));
        }
        Ok(())
    }

    pub fn weight(&self, kind: NodeKind) -> f64 {
        self.weights.get(&kind).copied().unwrap_or(1.0)
    }

    pub fn insert(&self, n: &SyntaxNode) -> f64 {
        self.weight(n.kind)
    }

    pub fn delete(&self, n: &SyntaxNode) -> f64 {
        self.weight(n.kind)
    }

    pub fn update(&self, a: &SyntaxNode, b: &SyntaxNode) -> f64 {
        if a.kind != b.kind {
            return self.weight(a.kind) + self.weight(b.kind);
        }
        if a.label == b.label {
            return 0.0;
        }
        self.update_base * self.weight(a.kind) * discount(&a.label, &b.label)
    }
}

/// `1 - J` for the token sets of two labels split on `_` and whitespace,
/// compared case-insensitively.
pub fn discount(a: &str, b: &str) -> f64 {
    let tokens = |s: &str| -> BTreeSet<alloc::string::String> {
        s.split(|c: char| c == '_' || c.is_whitespace()).filter(|t| !t.is_empty()).map(|t| t.to_lowercase()).collect()
    };
    let (ta, tb) = (tokens(a), tokens(b));
    let union = ta.union(&tb).count();
    if union == 0 {
        return 0.0;
    }
    let inter = ta.intersection(&tb).count();
    1.0 - inter as f64 / union as f64
}

struct Indexed<'a> {
    nodes: Vec<&'a SyntaxNode>,
    /// Leftmost leaf descendant of each node, by postorder index.
    lmd: Vec<usize>,
    keyroots: Vec<usize>,
}

fn index(t: &SyntaxNode) -> Indexed<'_> {
    fn walk<'a>(n: &'a SyntaxNode, nodes: &mut Vec<&'a SyntaxNode>, lmd: &mut Vec<usize>) -> usize {
        let mut first = None;
        for c in &n.children {
            let l = walk(c, nodes, lmd);
            first.get_or_insert(l);
        }
        let me = nodes.len();
        nodes.push(n);
        let l = first.unwrap_or(me);
        lmd.push(l);
        l
    }
    let (mut nodes, mut lmd) = (Vec::new(), Vec::new());
    walk(t, &mut nodes, &mut lmd);
    // A keyroot is the highest node for its leftmost leaf.
    let mut seen = BTreeMap::new();
    for (i, l) in lmd.iter().enumerate() {
        seen.insert(*l, i);
    }
    let mut keyroots: Vec<usize> = seen.into_values().collect();
    keyroots.sort_unstable();
    Indexed { nodes, lmd, keyroots }
}

/// Minimum cost of an edit script turning `a` into `b`.
pub fn tree_edit_distance(a: &SyntaxNode, b: &SyntaxNode, cm: &CostModel) -> f64 {
    let (ta, tb) = (index(a), index(b));
    let (n, m) = (ta.nodes.len(), tb.nodes.len());
    let mut td = alloc::vec![alloc::vec![0.0f64; m]; n];
    let mut fd = alloc::vec![alloc::vec![0.0f64; m + 1]; n + 1];
    for &i in &ta.keyroots {
        for &j in &tb.keyroots {
            let (li, lj) = (ta.lmd[i], tb.lmd[j]);
            // fd[x][y]: forest a[li..li+x) vs b[lj..lj+y).
            fd[0][0] = 0.0;
            for x in 1..=i - li + 1 {
                fd[x][0] = fd[x - 1][0] + cm.delete(ta.nodes[li + x - 1]);
            }
            for y in 1..=j - lj + 1 {
                fd[0][y] = fd[0][y - 1] + cm.insert(tb.nodes[lj + y - 1]);
            }
            for x in 1..=i - li + 1 {
                let ia = li + x - 1;
                for y in 1..=j - lj + 1 {
                    let jb = lj + y - 1;
                    let del = fd[x - 1][y] + cm.delete(ta.nodes[ia]);
                    let ins = fd[x][y - 1] + cm.insert(tb.nodes[jb]);
                    if ta.lmd[ia] == li && tb.lmd[jb] == lj {
                        let upd = fd[x - 1][y - 1] + cm.update(ta.nodes[ia], tb.nodes[jb]);
                        fd[x][y] = del.min(ins).min(upd);
                        td[ia][jb] = fd[x][y];
                    } else {
                        let (px, py) = (ta.lmd[ia] - li, tb.lmd[jb] - lj);
                        fd[x][y] = del.min(ins).min(fd[px][py] + td[ia][jb]);
                    }
                }
            }
        }
    }
    td[n - 1][m - 1]
}
