//! Labelled unordered rooted trees and forests, in canonical form.
//!
//! Canonical form: children are stored sorted by the total order
//! (grade, canonical encoding), so structural equality is equality of
//! unordered trees. The same order makes all printed output deterministic.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;

use crate::error::AlgebraError;
use crate::freevec::Rational;

/// An unordered rooted tree with vertex labels in `{0, ..., d}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LabeledTree {
    label: u8,
    children: Vec<LabeledTree>,
    nodes: usize,
}

impl LabeledTree {
    pub fn leaf(label: u8) -> Self {
        LabeledTree { label, children: Vec::new(), nodes: 1 }
    }

    /// Builds `[c_1 ... c_n]_{label}`, sorting the children into canonical
    /// order. The order of the input is irrelevant.
    pub fn node(label: u8, mut children: Vec<LabeledTree>) -> Self {
        children.sort();
        let nodes = 1 + children.iter().map(|c| c.nodes).sum::<usize>();
        LabeledTree { label, children, nodes }
    }

    pub fn label(&self) -> u8 {
        self.label
    }

    pub fn children(&self) -> &[LabeledTree] {
        &self.children
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Number of vertices with label 0.
    pub fn zero_count(&self) -> usize {
        (self.label == 0) as usize + self.children.iter().map(|c| c.zero_count()).sum::<usize>()
    }

    pub fn max_label(&self) -> u8 {
        self.children
            .iter()
            .map(|c| c.max_label())
            .max()
            .map_or(self.label, |m| m.max(self.label))
    }

    /// Whether the tree is linear (every node has at most one child).
    pub fn is_linear(&self) -> bool {
        match self.children.len() {
            0 => true,
            1 => self.children[0].is_linear(),
            _ => false,
        }
    }

    /// Symmetry factor: product over nodes of (multiplicities of equal
    /// child subtrees) factorials, recursively.
    pub fn symmetry_factor(&self) -> BigInt {
        let mut sigma = BigInt::from(1u8);
        let mut i = 0;
        while i < self.children.len() {
            let mut j = i;
            while j < self.children.len() && self.children[j] == self.children[i] {
                j += 1;
            }
            let mult = j - i;
            for m in 2..=mult {
                sigma *= BigInt::from(m);
            }
            sigma *= self.children[i].symmetry_factor().pow(mult as u32);
            i = j;
        }
        sigma
    }

    /// Tree factorial: product over nodes of their subtree sizes. The
    /// canonical lift of a linear path pairs with a tree as
    /// (product of increments) / tree factorial.
    pub fn tree_factorial(&self) -> BigInt {
        let mut f = BigInt::from(self.nodes);
        for c in &self.children {
            f *= c.tree_factorial();
        }
        f
    }

    /// Label-preserving relabel of the whole tree with `f`.
    pub fn relabel(&self, f: &impl Fn(u8) -> u8) -> LabeledTree {
        LabeledTree::node(f(self.label), self.children.iter().map(|c| c.relabel(f)).collect())
    }
}

impl PartialOrd for LabeledTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LabeledTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nodes
            .cmp(&other.nodes)
            .then_with(|| self.label.cmp(&other.label))
            .then_with(|| self.children.cmp(&other.children))
    }
}

/// An unordered forest: a sorted multiset of trees. The empty forest is the
/// unit of the forest product.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Forest {
    trees: Vec<LabeledTree>,
}

impl Forest {
    pub fn unit() -> Self {
        Forest { trees: Vec::new() }
    }

    pub fn single(tree: LabeledTree) -> Self {
        Forest { trees: vec![tree] }
    }

    pub fn from_trees(mut trees: Vec<LabeledTree>) -> Self {
        trees.sort();
        Forest { trees }
    }

    pub fn trees(&self) -> &[LabeledTree] {
        &self.trees
    }

    pub fn is_unit(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn nodes(&self) -> usize {
        self.trees.iter().map(|t| t.nodes()).sum()
    }

    pub fn zero_count(&self) -> usize {
        self.trees.iter().map(|t| t.zero_count()).sum()
    }

    pub fn max_label(&self) -> u8 {
        self.trees.iter().map(|t| t.max_label()).max().unwrap_or(0)
    }

    /// Multiset union (the commutative forest product).
    pub fn mul(&self, other: &Forest) -> Forest {
        let mut trees = self.trees.clone();
        trees.extend(other.trees.iter().cloned());
        Forest::from_trees(trees)
    }

    /// The single tree, if the forest has exactly one.
    pub fn as_single_tree(&self) -> Option<&LabeledTree> {
        if self.trees.len() == 1 {
            Some(&self.trees[0])
        } else {
            None
        }
    }

    /// Splits off the first tree; `None` for the unit.
    pub fn split_first(&self) -> Option<(&LabeledTree, Forest)> {
        let (first, rest) = self.trees.split_first()?;
        Some((first, Forest { trees: rest.to_vec() }))
    }

    pub fn symmetry_factor(&self) -> BigInt {
        // Multiplicities across equal trees times per-tree factors.
        let mut sigma = BigInt::from(1u8);
        let mut i = 0;
        while i < self.trees.len() {
            let mut j = i;
            while j < self.trees.len() && self.trees[j] == self.trees[i] {
                j += 1;
            }
            for m in 2..=(j - i) {
                sigma *= BigInt::from(m);
            }
            sigma *= self.trees[i].symmetry_factor().pow((j - i) as u32);
            i = j;
        }
        sigma
    }
}

impl PartialOrd for Forest {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Forest {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nodes()
            .cmp(&other.nodes())
            .then_with(|| self.trees.cmp(&other.trees))
    }
}

/// `[t_1 ... t_n]_{label}`: grafts a forest onto a new root.
pub fn b_plus(children: Vec<LabeledTree>, label: u8, dim: usize) -> Result<LabeledTree, AlgebraError> {
    if usize::from(label) > dim {
        return Err(AlgebraError::LabelOutOfRange { label, max: dim as u8 });
    }
    Ok(LabeledTree::node(label, children))
}

/// Rational symmetry factor 1/sigma(tau), used by the Euler scheme.
pub fn inverse_symmetry(tree: &LabeledTree) -> Rational {
    Rational::new(1.into(), tree.symmetry_factor())
}

type TreeCache = Mutex<HashMap<(usize, usize), Arc<Vec<LabeledTree>>>>;
type ForestCache = Mutex<HashMap<(usize, usize), Arc<Vec<Forest>>>>;

fn tree_cache() -> &'static TreeCache {
    static CACHE: OnceLock<TreeCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn forest_cache() -> &'static ForestCache {
    static CACHE: OnceLock<ForestCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All trees with exactly `n` nodes and labels in `0..=dim`, canonically
/// ordered. Memoized; safe for concurrent readers.
pub fn trees_with_nodes(n: usize, dim: usize) -> Arc<Vec<LabeledTree>> {
    if n == 0 {
        return Arc::new(Vec::new());
    }
    if let Some(hit) = tree_cache().lock().unwrap().get(&(n, dim)) {
        return hit.clone();
    }
    let mut out = Vec::new();
    let child_forests = forests_with_nodes(n - 1, dim);
    for label in 0..=dim as u8 {
        for f in child_forests.iter() {
            out.push(LabeledTree::node(label, f.trees().to_vec()));
        }
    }
    out.sort();
    out.dedup();
    let arc = Arc::new(out);
    tree_cache().lock().unwrap().insert((n, dim), arc.clone());
    arc
}

/// All forests with exactly `n` nodes and labels in `0..=dim`.
pub fn forests_with_nodes(n: usize, dim: usize) -> Arc<Vec<Forest>> {
    if n == 0 {
        return Arc::new(vec![Forest::unit()]);
    }
    if let Some(hit) = forest_cache().lock().unwrap().get(&(n, dim)) {
        return hit.clone();
    }
    // Multisets of trees totaling n nodes: pick the minimal tree first and
    // recurse over forests of the remainder whose trees are all >= it.
    let mut out: Vec<Forest> = Vec::new();
    fn rec(
        remaining: usize,
        min_tree: Option<&LabeledTree>,
        acc: &mut Vec<LabeledTree>,
        out: &mut Vec<Forest>,
        dim: usize,
    ) {
        if remaining == 0 {
            out.push(Forest::from_trees(acc.clone()));
            return;
        }
        for size in 1..=remaining {
            for t in trees_with_nodes(size, dim).iter() {
                if let Some(m) = min_tree {
                    if t < m {
                        continue;
                    }
                }
                acc.push(t.clone());
                rec(remaining - size, Some(t), acc, out, dim);
                acc.pop();
            }
        }
    }
    rec(n, None, &mut Vec::new(), &mut out, dim);
    out.sort();
    out.dedup();
    let arc = Arc::new(out);
    forest_cache().lock().unwrap().insert((n, dim), arc.clone());
    arc
}

/// All trees with `1..=n` nodes.
pub fn trees_up_to(n: usize, dim: usize) -> Vec<LabeledTree> {
    let mut out = Vec::new();
    for k in 1..=n {
        out.extend(trees_with_nodes(k, dim).iter().cloned());
    }
    out
}

/// All forests with `0..=n` nodes (the unit first).
pub fn forests_up_to(n: usize, dim: usize) -> Vec<Forest> {
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(forests_with_nodes(k, dim).iter().cloned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(label: u8, children: Vec<LabeledTree>) -> LabeledTree {
        LabeledTree::node(label, children)
    }

    #[test]
    fn canonical_form_is_order_free() {
        let a = t(0, vec![LabeledTree::leaf(2), LabeledTree::leaf(1)]);
        let b = t(0, vec![LabeledTree::leaf(1), LabeledTree::leaf(2)]);
        assert_eq!(a, b);
    }

    #[test]
    fn b_plus_checks_labels() {
        assert!(b_plus(vec![], 3, 2).is_err());
        let cherry = b_plus(vec![LabeledTree::leaf(1), LabeledTree::leaf(2)], 0, 2).unwrap();
        assert_eq!(cherry.nodes(), 3);
        assert_eq!(cherry.children().len(), 2);
    }

    #[test]
    fn enumeration_counts() {
        // With labels {0,1,2}: t(n) = 3 * F(n-1), F = forest counts.
        assert_eq!(trees_with_nodes(1, 2).len(), 3);
        assert_eq!(trees_with_nodes(2, 2).len(), 9);
        assert_eq!(forests_with_nodes(2, 2).len(), 15);
        assert_eq!(trees_with_nodes(3, 2).len(), 45);
        assert_eq!(forests_with_nodes(3, 2).len(), 82);
        assert_eq!(trees_with_nodes(4, 2).len(), 246);
        // Single label: unlabeled rooted trees 1, 1, 2, 4, 9.
        assert_eq!(trees_with_nodes(3, 0).len(), 2);
        assert_eq!(trees_with_nodes(4, 0).len(), 4);
        assert_eq!(trees_with_nodes(5, 0).len(), 9);
    }

    #[test]
    fn symmetry_and_factorial() {
        let leaf = LabeledTree::leaf(0);
        assert_eq!(leaf.symmetry_factor(), BigInt::from(1));
        assert_eq!(leaf.tree_factorial(), BigInt::from(1));

        let cherry_same = t(0, vec![leaf.clone(), leaf.clone()]);
        assert_eq!(cherry_same.symmetry_factor(), BigInt::from(2));
        assert_eq!(cherry_same.tree_factorial(), BigInt::from(3));

        let cherry_diff = t(0, vec![LabeledTree::leaf(1), LabeledTree::leaf(2)]);
        assert_eq!(cherry_diff.symmetry_factor(), BigInt::from(1));

        let tall3 = t(0, vec![t(0, vec![leaf.clone()])]);
        assert_eq!(tall3.tree_factorial(), BigInt::from(6));
        assert_eq!(tall3.symmetry_factor(), BigInt::from(1));

        let bushy3 = t(1, vec![cherry_same.clone(), cherry_same.clone(), leaf.clone()]);
        // two equal cherries (each sigma 2) and a leaf: 2! * 2^2 = 8
        assert_eq!(bushy3.symmetry_factor(), BigInt::from(8));
    }

    #[test]
    fn order_is_grade_first() {
        let leaf1 = LabeledTree::leaf(1);
        let tall = t(0, vec![LabeledTree::leaf(0)]);
        assert!(leaf1 < tall);
        let f_small = Forest::single(leaf1.clone());
        let f_big = Forest::from_trees(vec![leaf1.clone(), leaf1.clone()]);
        assert!(f_small < f_big);
        assert!(Forest::unit() < f_small);
    }
}
