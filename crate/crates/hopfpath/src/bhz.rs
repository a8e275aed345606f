//! The reduced regularity-structure symbol spaces for the step-kernel
//! specialization: symbols, symbolic degrees, the negative and positive
//! coactions, the root-removal identification with labelled trees, and
//! negative-renormalization characters.
//!
//! Symbols live in the direct sum of the forest algebra and its noise-tagged
//! copies; a symbol is a labelled forest with at most one noise tag. The
//! identification with trees removes the root: the root's label becomes the
//! tag (label 0 means no tag), the root's branches become the forest.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;
use crate::freevec::{LinComb, LinComb2, Rational};
use crate::translation::{Character, Monomial, TreeTranslation};
use crate::tree::{trees_up_to, Forest, LabeledTree};

/// An element of the reduced symbol space: a labelled forest with an
/// optional noise tag in `{1, ..., d}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Symbol {
    forest: Forest,
    tag: Option<u8>,
}

impl Symbol {
    pub fn new(forest: Forest, tag: Option<u8>) -> Self {
        debug_assert!(tag != Some(0), "label 0 means no tag");
        Symbol { forest, tag }
    }

    /// The unit symbol (empty forest, no noise).
    pub fn unit() -> Self {
        Symbol { forest: Forest::unit(), tag: None }
    }

    /// The bare noise symbol.
    pub fn noise(i: u8) -> Self {
        debug_assert!(i != 0);
        Symbol { forest: Forest::unit(), tag: Some(i) }
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn tag(&self) -> Option<u8> {
        self.tag
    }

    pub fn is_unit(&self) -> bool {
        self.forest.is_unit() && self.tag.is_none()
    }

    /// Content node count (tree nodes; the noise tag is not a node).
    pub fn nodes(&self) -> usize {
        self.forest.nodes()
    }

    /// Wraps the symbol in an integration edge: a single-tree forest.
    pub fn integrate(&self) -> Symbol {
        Symbol { forest: Forest::single(phi_inv(self)), tag: None }
    }

    /// Multiplies two symbols; fails if both carry a noise tag.
    pub fn mul(&self, other: &Symbol) -> Option<Symbol> {
        let tag = match (self.tag, other.tag) {
            (None, t) | (t, None) => t,
            _ => return None,
        };
        Some(Symbol { forest: self.forest.mul(&other.forest), tag })
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.nodes()
            .cmp(&other.nodes())
            .then_with(|| self.tag.cmp(&other.tag))
            .then_with(|| self.forest.cmp(&other.forest))
    }
}

/// A degree of the form `units + alphas * alpha`, kept symbolic so suites
/// can quantify over ranges of the regularity parameter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Degree {
    pub units: i64,
    pub alphas: i64,
}

impl Degree {
    pub fn eval(&self, alpha: &Rational) -> Rational {
        Rational::from_integer(self.units.into()) + alpha * Rational::from_integer(self.alphas.into())
    }

    pub fn is_negative_at(&self, alpha: &Rational) -> bool {
        self.eval(alpha).is_negative()
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.units, self.alphas) {
            (u, 0) => write!(f, "{u}"),
            (0, 1) => write!(f, "alpha"),
            (0, -1) => write!(f, "-alpha"),
            (0, a) => write!(f, "{a}*alpha"),
            (u, 1) => write!(f, "alpha{u:+}"),
            (u, -1) => write!(f, "-alpha{u:+}"),
            (u, a) => write!(f, "{a}*alpha{u:+}"),
        }
    }
}

/// Degree of a symbol: each tree contributes its label-0 count in integer
/// units plus its remaining nodes in alpha units; a noise tag contributes
/// `alpha - 1`.
pub fn degree(s: &Symbol) -> Degree {
    let mut units = 0i64;
    let mut alphas = 0i64;
    for t in s.forest.trees() {
        let zeros = t.zero_count() as i64;
        units += zeros;
        alphas += t.nodes() as i64 - zeros;
    }
    if s.tag.is_some() {
        units -= 1;
        alphas += 1;
    }
    Degree { units, alphas }
}

/// Root removal: the root's branches become the forest and its label the
/// noise tag (label 0 becomes no tag).
pub fn phi(t: &LabeledTree) -> Symbol {
    let tag = if t.label() == 0 { None } else { Some(t.label()) };
    Symbol { forest: Forest::from_trees(t.children().to_vec()), tag }
}

/// Root addition: the inverse of [`phi`].
pub fn phi_inv(s: &Symbol) -> LabeledTree {
    LabeledTree::node(s.tag.unwrap_or(0), s.forest.trees().to_vec())
}

/// Largest node count that keeps a label-0-free tree's symbol negative:
/// `n * alpha - 1 < 0`.
pub fn negative_node_bound(alpha: &Rational) -> usize {
    let mut n = 0usize;
    while Rational::from_integer(((n + 1) as i64).into()) * alpha < Rational::one() {
        n += 1;
        if n > 64 {
            break;
        }
    }
    n
}

/// All negative-degree symbols: the root-removals of label-0-free trees
/// within the node bound set by `alpha`.
pub fn negative_generators(alpha: &Rational, dim: usize) -> Vec<Symbol> {
    let bound = negative_node_bound(alpha);
    let mut out: Vec<Symbol> = trees_up_to(bound, dim)
        .into_iter()
        .filter(|t| t.zero_count() == 0 && t.max_label() >= 1)
        .map(|t| phi(&t))
        .collect();
    out.sort();
    out
}

/// Whether a symbol is a negative-renormalization generator at `alpha`.
pub fn is_negative_generator(s: &Symbol, alpha: &Rational) -> bool {
    s.tag.is_some()
        && s.forest.zero_count() == 0
        && degree(s).is_negative_at(alpha)
}

// Blue-graph view of a symbol used by the negative coaction: vertices are
// the nodes of the root-added tree, edges are the tree edges plus one noise
// edge per non-0 label.
struct BlueTree {
    label: Vec<u8>,
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

impl BlueTree {
    fn build(t: &LabeledTree) -> Self {
        let mut b = BlueTree { label: vec![], children: vec![], parent: vec![] };
        fn rec(t: &LabeledTree, parent: Option<usize>, b: &mut BlueTree) -> usize {
            let idx = b.label.len();
            b.label.push(t.label());
            b.children.push(Vec::new());
            b.parent.push(parent);
            for c in t.children() {
                let ci = rec(c, Some(idx), b);
                b.children[idx].push(ci);
            }
            idx
        }
        rec(t, None, &mut b);
        b
    }

    fn len(&self) -> usize {
        self.label.len()
    }
}

/// The negative coaction on a symbol: the sum over edge subforests of the
/// blue graph whose connected components all have negative degree, with the
/// components on the left (as a monomial of generators) and the contraction
/// on the right. Computed directly on the symbol's edge structure,
/// independently of the tree-side extraction machinery.
pub fn delta_minus(s: &Symbol, alpha: &Rational) -> LinComb2<Monomial<Symbol>, Symbol> {
    let t = phi_inv(s);
    let blue = BlueTree::build(&t);
    let n = blue.len();
    // edge list: tree edges (child index), then noise edges (vertex index)
    let tree_edges: Vec<usize> = (1..n).collect();
    let noise_vertices: Vec<usize> = (0..n).filter(|&i| blue.label[i] != 0).collect();
    let total = tree_edges.len() + noise_vertices.len();
    let mut out = LinComb::zero();
    'subsets: for mask in 0u64..(1u64 << total) {
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(comp: &mut Vec<usize>, i: usize) -> usize {
            if comp[i] != i {
                let r = find(comp, comp[i]);
                comp[i] = r;
            }
            comp[i]
        }
        let mut vertex_in = vec![false; n];
        let mut noise_in = vec![false; n];
        for (bit, &c) in tree_edges.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                let p = blue.parent[c].unwrap();
                vertex_in[c] = true;
                vertex_in[p] = true;
                let (rc, rp) = (find(&mut comp, c), find(&mut comp, p));
                if rc != rp {
                    comp[rc] = rp;
                }
            }
        }
        for (bit, &v) in noise_vertices.iter().enumerate() {
            if mask & (1 << (tree_edges.len() + bit)) != 0 {
                noise_in[v] = true;
                vertex_in[v] = true;
            }
        }
        // group spanned vertices into components
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            if vertex_in[i] {
                groups.entry(find(&mut comp, i)).or_default().push(i);
            }
        }
        // each component becomes a symbol; all must be negative
        let mut extracted: Vec<Symbol> = Vec::new();
        for part in groups.values() {
            let in_part: Vec<bool> = {
                let mut v = vec![false; n];
                for &i in part {
                    v[i] = true;
                }
                v
            };
            let top = *part
                .iter()
                .find(|&&i| blue.parent[i].map_or(true, |p| !in_part[p]))
                .expect("nonempty part");
            fn build(
                blue: &BlueTree,
                idx: usize,
                in_part: &[bool],
                noise_in: &[bool],
            ) -> LabeledTree {
                let children = blue.children[idx]
                    .iter()
                    .filter(|&&c| in_part[c])
                    .map(|&c| build(blue, c, in_part, noise_in))
                    .collect();
                let label = if noise_in[idx] { blue.label[idx] } else { 0 };
                LabeledTree::node(label, children)
            }
            let part_tree = build(&blue, top, &in_part, &noise_in);
            let sym = phi(&part_tree);
            if !degree(&sym).is_negative_at(alpha) {
                continue 'subsets;
            }
            extracted.push(sym);
        }
        extracted.sort();
        // contraction: collapse each component to a bare vertex
        let mut part_of = vec![usize::MAX; n];
        for (pi, part) in groups.values().enumerate() {
            for &i in part {
                part_of[i] = pi;
            }
        }
        fn contract(
            blue: &BlueTree,
            idx: usize,
            part_of: &[usize],
            noise_in: &[bool],
        ) -> LabeledTree {
            let pid = part_of[idx];
            let mut stack = vec![idx];
            let mut ext = Vec::new();
            while let Some(u) = stack.pop() {
                for &c in &blue.children[u] {
                    if pid != usize::MAX && part_of[c] == pid {
                        stack.push(c);
                    } else {
                        ext.push(contract(blue, c, part_of, noise_in));
                    }
                }
            }
            let label = if pid != usize::MAX {
                0
            } else {
                blue.label[idx]
            };
            LabeledTree::node(label, ext)
        }
        let contracted = contract(&blue, 0, &part_of, &noise_in);
        out.insert_add((extracted, phi(&contracted)), Rational::one());
    }
    out
}

/// A character of the negative-renormalization group: values on the
/// negative generators, multiplicative over their free products.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegCharacter {
    chi: Character<Symbol>,
    alpha: Rational,
    dim: usize,
}

impl NegCharacter {
    pub fn counit(alpha: Rational, dim: usize) -> Self {
        NegCharacter { chi: Character::counit(), alpha, dim }
    }

    /// The character associated to a direction series supported on
    /// label-0-free trees within the negative node bound.
    pub fn from_series(
        v0: &LinComb<LabeledTree>,
        alpha: Rational,
        dim: usize,
    ) -> Result<Self, AlgebraError> {
        let bound = negative_node_bound(&alpha);
        let mut values = BTreeMap::new();
        for (t, c) in v0.iter() {
            if t.zero_count() > 0 || t.nodes() > bound {
                return Err(AlgebraError::SeriesPrecondition(
                    "character directions must be label-0-free trees of negative symbol degree",
                ));
            }
            values.insert(phi(t), c.clone());
        }
        Ok(NegCharacter { chi: Character::new(values), alpha, dim })
    }

    /// The direction series this character came from.
    pub fn to_series(&self) -> LinComb<LabeledTree> {
        LinComb::from_terms(
            self.chi
                .generators()
                .map(|(s, c)| (phi_inv(s), c.clone())),
        )
    }

    pub fn to_translation(&self) -> TreeTranslation {
        let bound = negative_node_bound(&self.alpha);
        TreeTranslation::special(self.to_series(), bound.max(1), self.dim)
            .expect("negative generators are valid directions")
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, gen: &Symbol) -> Rational {
        self.chi.value(gen)
    }

    pub fn eval_monomial(&self, mono: &[Symbol]) -> Rational {
        self.chi.eval_monomial(mono)
    }
}

/// The renormalization action of a character: the character applied to the
/// left leg of the negative coaction, extended linearly.
pub fn renormalize(ell: &NegCharacter, x: &LinComb<Symbol>) -> LinComb<Symbol> {
    x.flat_map(|s| {
        let mut out = LinComb::zero();
        for ((mono, right), c) in delta_minus(s, &ell.alpha).iter() {
            let w = ell.eval_monomial(mono);
            if !w.is_zero() {
                out.insert_add(right.clone(), c * w);
            }
        }
        out
    })
}

/// Composition of negative characters via the coproduct reading of the
/// negative coaction: the right leg is projected back into the negative
/// algebra (generators and the unit survive; positive symbols vanish).
pub fn compose_characters(
    ell: &NegCharacter,
    ell2: &NegCharacter,
) -> Result<NegCharacter, AlgebraError> {
    if ell.alpha != ell2.alpha {
        return Err(AlgebraError::SeriesPrecondition("characters use different alpha"));
    }
    if ell.dim != ell2.dim {
        return Err(AlgebraError::DimensionMismatch(ell.dim, ell2.dim));
    }
    let mut values = BTreeMap::new();
    for gen in negative_generators(&ell.alpha, ell.dim) {
        let mut total = Rational::zero();
        for ((mono, right), c) in delta_minus(&gen, &ell.alpha).iter() {
            let right_val = if right.is_unit() {
                Rational::one()
            } else if is_negative_generator(right, &ell.alpha) {
                ell2.value(right)
            } else {
                Rational::zero()
            };
            if right_val.is_zero() {
                continue;
            }
            total += c * ell.eval_monomial(mono) * right_val;
        }
        if !total.is_zero() {
            values.insert(gen, total);
        }
    }
    Ok(NegCharacter { chi: Character::new(values), alpha: ell.alpha.clone(), dim: ell.dim })
}

type DeltaPlusCache = HashMap<LabeledTree, LinComb2<Symbol, Forest>>;

fn delta_plus_integrated(t: &LabeledTree, cache: &mut DeltaPlusCache) -> LinComb2<Symbol, Forest> {
    // The coaction of an integrated symbol: integrate the left leg of the
    // content's coaction and add the unit (x) one-generator term.
    if let Some(hit) = cache.get(t) {
        return hit.clone();
    }
    let inner = delta_plus_symbol(&phi(t), cache);
    let mut out = inner.map_keys(|(l, r)| (l.integrate(), r.clone()));
    out.insert_add(
        (Symbol::unit(), Forest::single(t.clone())),
        Rational::one(),
    );
    cache.insert(t.clone(), out.clone());
    out
}

fn delta_plus_symbol(s: &Symbol, cache: &mut DeltaPlusCache) -> LinComb2<Symbol, Forest> {
    let mut out: LinComb2<Symbol, Forest> = LinComb::basis((Symbol::unit(), Forest::unit()));
    for t in s.forest.trees() {
        let factor = delta_plus_integrated(t, cache);
        out = crate::freevec::bilinear_extend(
            |(la, ra): &(Symbol, Forest), (lb, rb): &(Symbol, Forest)| {
                match la.mul(lb) {
                    Some(l) => LinComb::basis((l, ra.mul(rb))),
                    None => LinComb::zero(),
                }
            },
            &out,
            &factor,
        );
    }
    if let Some(i) = s.tag {
        out = out.map_keys(|(l, r)| {
            (l.mul(&Symbol::noise(i)).expect("left legs of untagged factors carry no tag"), r.clone())
        });
    }
    out
}

/// The positive coaction on symbols: noises are grouplike-on-the-left,
/// integration recurses with a single kernel-generator term, and the whole
/// map is multiplicative. Right legs live in the forest algebra under the
/// generator identification.
pub fn delta_plus(s: &Symbol) -> LinComb2<Symbol, Forest> {
    let mut cache = HashMap::new();
    delta_plus_symbol(s, &mut cache)
}

/// The structure-group action of a forest character on a symbol:
/// the character evaluated on the right leg of the positive coaction.
pub fn structure_action(
    g_tree: &impl Fn(&LabeledTree) -> Rational,
    s: &Symbol,
) -> LinComb<Symbol> {
    let mut out = LinComb::zero();
    for ((l, r), c) in delta_plus(s).iter() {
        let mut w = c.clone();
        for t in r.trees() {
            w *= g_tree(t);
            if w.is_zero() {
                break;
            }
        }
        if !w.is_zero() {
            out.insert_add(l.clone(), w);
        }
    }
    out
}

/// Float variant of the structure-group action, for sampled trace
/// characters.
pub fn structure_action_f64(
    g_tree: &impl Fn(&LabeledTree) -> f64,
    s: &Symbol,
) -> BTreeMap<Symbol, f64> {
    let mut out: BTreeMap<Symbol, f64> = BTreeMap::new();
    for ((l, r), c) in delta_plus(s).iter() {
        let mut w = rational_to_f64(c);
        for t in r.trees() {
            w *= g_tree(t);
        }
        if w != 0.0 {
            *out.entry(l.clone()).or_insert(0.0) += w;
        }
    }
    out.retain(|_, v| *v != 0.0);
    out
}

pub(crate) fn rational_to_f64(c: &Rational) -> f64 {
    let num = c.numer();
    let den = c.denom();
    // exact for all coefficients this crate produces
    num_to_f64(num) / num_to_f64(den)
}

fn num_to_f64(n: &num_bigint::BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// All symbols whose root-added tree has at most `nodes` nodes.
pub fn symbols_up_to(nodes: usize, dim: usize) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = trees_up_to(nodes, dim).iter().map(phi).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freevec::{rat, rat_int};

    fn leaf(i: u8) -> LabeledTree {
        LabeledTree::leaf(i)
    }

    fn node(i: u8, c: Vec<LabeledTree>) -> LabeledTree {
        LabeledTree::node(i, c)
    }

    #[test]
    fn degree_examples() {
        // bare noise: alpha - 1
        assert_eq!(degree(&Symbol::noise(1)), Degree { units: -1, alphas: 1 });
        // I(Xi_i) I(Xi_j) Xi_k: 3 alpha - 1
        let s = phi(&node(3, vec![leaf(1), leaf(2)]));
        assert_eq!(degree(&s), Degree { units: -1, alphas: 3 });
        // the double integration of nothing: degree 2
        let s = phi(&node(0, vec![node(0, vec![leaf(0)])]));
        assert_eq!(degree(&s), Degree { units: 2, alphas: 0 });
        // unit symbol: degree 0
        assert_eq!(degree(&phi(&leaf(0))), Degree { units: 0, alphas: 0 });
        assert_eq!(format!("{}", Degree { units: -1, alphas: 3 }), "3*alpha-1");
    }

    #[test]
    fn phi_examples_and_roundtrip() {
        let t = node(3, vec![leaf(1), leaf(2)]);
        let s = phi(&t);
        assert_eq!(s.tag(), Some(3));
        assert_eq!(s.forest().trees().len(), 2);
        // label-0 root gives the untagged unit
        assert_eq!(phi(&leaf(0)), Symbol::unit());
        for t in trees_up_to(4, 2) {
            assert_eq!(phi_inv(&phi(&t)), t);
        }
    }

    #[test]
    fn negative_generator_sets() {
        // alpha in (1/3, 1/2), d=1: bare noise and the equal-label ladder
        let alpha = rat(2, 5);
        let gens = negative_generators(&alpha, 1);
        assert_eq!(
            gens,
            vec![Symbol::noise(1), phi(&node(1, vec![leaf(1)]))]
        );
        // alpha in (1/4, 1/3): all label-0-free 3-node shapes join
        let alpha = rat(3, 10);
        let gens = negative_generators(&alpha, 1);
        let three_nodes = gens.iter().filter(|s| s.nodes() == 2).count();
        assert_eq!(three_nodes, 2); // ladder-of-3 and cherry over one noise label
        assert_eq!(gens.len(), 4);
        // alpha > 1/2: only bare noises
        let alpha = rat(3, 5);
        assert_eq!(negative_generators(&alpha, 2), vec![Symbol::noise(1), Symbol::noise(2)]);
    }

    #[test]
    fn delta_minus_unit_example() {
        // the symbol of the single label-0 node keeps only the trivial term
        let alpha = rat(2, 5);
        let s = phi(&leaf(0));
        let d = delta_minus(&s, &alpha);
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&(vec![], s.clone())), rat_int(1));
    }

    #[test]
    fn delta_minus_generator_primitive_shape() {
        let alpha = rat(2, 5);
        let gen = phi(&node(1, vec![leaf(1)]));
        let d = delta_minus(&gen, &alpha);
        // gen (x) 1 + 1 (x) gen + single-noise middle terms with positive right legs
        assert_eq!(d.coeff(&(vec![gen.clone()], Symbol::unit())), rat_int(1));
        assert_eq!(d.coeff(&(vec![], gen.clone())), rat_int(1));
        for ((mono, right), _) in d.iter() {
            if mono.is_empty() || right.is_unit() {
                continue;
            }
            assert!(!degree(right).is_negative_at(&alpha));
        }
    }

    #[test]
    fn renormalize_counit_is_identity() {
        let alpha = rat(2, 5);
        let ell = NegCharacter::counit(alpha, 1);
        let x = LinComb::basis(phi(&node(1, vec![leaf(1), leaf(0)])));
        assert_eq!(renormalize(&ell, &x), x);
    }

    #[test]
    fn renorm_commutes_with_integration_spot() {
        let alpha = rat(2, 5);
        let v0 = LinComb::term(node(1, vec![leaf(1)]), rat(1, 2));
        let ell = NegCharacter::from_series(&v0, alpha, 1).unwrap();
        for t in trees_up_to(3, 1) {
            let s = phi(&t);
            let lhs = renormalize(&ell, &LinComb::basis(s.integrate()));
            let rhs = renormalize(&ell, &LinComb::basis(s.clone()))
                .map_keys(|sym| sym.integrate());
            assert_eq!(lhs, rhs, "commutation fails at {t:?}");
        }
    }

    #[test]
    fn delta_plus_examples() {
        // bare noise is grouplike-on-the-left
        let d = delta_plus(&Symbol::noise(1));
        assert_eq!(d.len(), 1);
        assert_eq!(d.coeff(&(Symbol::noise(1), Forest::unit())), rat_int(1));
        // one integrated noise: itself (x) 1 + 1 (x) generator
        let s = phi(&node(0, vec![leaf(1)]));
        let d = delta_plus(&s);
        assert_eq!(d.coeff(&(s.clone(), Forest::unit())), rat_int(1));
        assert_eq!(d.coeff(&(Symbol::unit(), Forest::single(leaf(1)))), rat_int(1));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn delta_plus_matches_flipped_cut_coproduct() {
        // on integrated symbols the positive coaction is the admissible-cut
        // coproduct with its legs swapped, trunk integrated on the left
        for t in trees_up_to(4, 1) {
            let got = delta_plus_integrated(&t, &mut HashMap::new());
            let mut want: LinComb2<Symbol, Forest> = LinComb::zero();
            for ((branches, trunk), c) in crate::forest::ck_coproduct(&Forest::single(t.clone())).iter() {
                let trunk_tree = trunk
                    .as_single_tree()
                    .cloned()
                    .map(|tt| Symbol { forest: Forest::single(tt), tag: None });
                if let Some(l) = trunk_tree {
                    want.insert_add((l, branches.clone()), c.clone());
                } else {
                    assert!(trunk.is_unit());
                    want.insert_add((Symbol::unit(), branches.clone()), c.clone());
                }
            }
            assert_eq!(got, want, "flip mismatch at {t:?}");
        }
    }

    #[test]
    fn character_composition_is_addition() {
        let alpha = rat(3, 10);
        let v = LinComb::term(node(1, vec![leaf(1)]), rat(1, 2));
        let w = {
            let mut w = LinComb::term(leaf(1), rat(2, 3));
            w.insert_add(node(1, vec![leaf(1), leaf(1)]), rat(-1, 4));
            w
        };
        let lv = NegCharacter::from_series(&v, alpha.clone(), 1).unwrap();
        let lw = NegCharacter::from_series(&w, alpha.clone(), 1).unwrap();
        let composed = compose_characters(&lv, &lw).unwrap();
        let sum = NegCharacter::from_series(&(&v + &w), alpha.clone(), 1).unwrap();
        assert_eq!(composed, sum);
        // counit is neutral, composition commutes
        let e = NegCharacter::counit(alpha, 1);
        assert_eq!(compose_characters(&lv, &e).unwrap(), lv);
        assert_eq!(
            compose_characters(&lv, &lw).unwrap(),
            compose_characters(&lw, &lv).unwrap()
        );
    }
}
