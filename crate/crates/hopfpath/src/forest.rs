//! The Connes-Kreimer Hopf algebra of labelled forests and its
//! Grossman-Larson dual, truncated at a node-count bound.
//!
//! Conventions: the coproduct over admissible cuts keeps the trunk on the
//! right; the pairing between the two sides is the basis-delta pairing; the
//! dual product is computed as the pairing-adjoint of the coproduct, never
//! via explicit grafting-sum formulas (the paired examples validate that
//! choice).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::freevec::{bilinear_extend, rat_int, LinComb, LinComb2, Rational};
use crate::tensor::TensorPoly;
use crate::tree::{forests_up_to, Forest, LabeledTree};

/// An element of the truncated forest algebra: a forest series with all
/// forests of at most `trunc` nodes and labels `<= dim`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ForestPoly {
    value: LinComb<Forest>,
    trunc: usize,
    dim: usize,
}

impl ForestPoly {
    pub fn new(value: LinComb<Forest>, trunc: usize, dim: usize) -> Result<Self, AlgebraError> {
        for f in value.keys() {
            if f.nodes() > trunc {
                return Err(AlgebraError::TruncationMismatch(f.nodes(), trunc));
            }
            if usize::from(f.max_label()) > dim {
                return Err(AlgebraError::LabelOutOfRange { label: f.max_label(), max: dim as u8 });
            }
        }
        Ok(ForestPoly { value, trunc, dim })
    }

    pub fn truncated(value: LinComb<Forest>, trunc: usize, dim: usize) -> Self {
        ForestPoly { value: value.filter_keys(|f| f.nodes() <= trunc), trunc, dim }
    }

    pub fn unit(trunc: usize, dim: usize) -> Self {
        ForestPoly { value: LinComb::basis(Forest::unit()), trunc, dim }
    }

    pub fn zero(trunc: usize, dim: usize) -> Self {
        ForestPoly { value: LinComb::zero(), trunc, dim }
    }

    pub fn node(label: u8, trunc: usize, dim: usize) -> Result<Self, AlgebraError> {
        if usize::from(label) > dim {
            return Err(AlgebraError::LabelOutOfRange { label, max: dim as u8 });
        }
        Ok(ForestPoly {
            value: LinComb::basis(Forest::single(LabeledTree::leaf(label))),
            trunc,
            dim,
        })
    }

    pub fn tree(t: LabeledTree, trunc: usize, dim: usize) -> Result<Self, AlgebraError> {
        ForestPoly::new(LinComb::basis(Forest::single(t)), trunc, dim)
    }

    pub fn value(&self) -> &LinComb<Forest> {
        &self.value
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        Ok(ForestPoly { value: &self.value + &other.value, trunc: self.trunc, dim: self.dim })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        Ok(ForestPoly { value: &self.value - &other.value, trunc: self.trunc, dim: self.dim })
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        ForestPoly { value: self.value.scaled(c), trunc: self.trunc, dim: self.dim }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch(self.dim, other.dim));
        }
        if self.trunc != other.trunc {
            return Err(AlgebraError::TruncationMismatch(self.trunc, other.trunc));
        }
        Ok(())
    }
}

type CopCache = Mutex<HashMap<Forest, Arc<LinComb2<Forest, Forest>>>>;

fn cop_cache() -> &'static CopCache {
    static CACHE: OnceLock<CopCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn ck_coproduct_tree(t: &LabeledTree) -> LinComb2<Forest, Forest> {
    // Cut recursion: the whole tree to the left plus every cut of the
    // child forest with the trunk regrafted onto the root.
    let whole = Forest::single(t.clone());
    let mut out = LinComb::basis((whole.clone(), Forest::unit()));
    let child_cop = ck_coproduct(&Forest::from_trees(t.children().to_vec()));
    for ((branches, trunk), c) in child_cop.iter() {
        let regrafted = LabeledTree::node(t.label(), trunk.trees().to_vec());
        out.insert_add((branches.clone(), Forest::single(regrafted)), c.clone());
    }
    out
}

/// The admissible-cut coproduct, branches on the left and the trunk on the
/// right, extended multiplicatively over forests. Memoized per forest.
pub fn ck_coproduct(f: &Forest) -> Arc<LinComb2<Forest, Forest>> {
    if let Some(hit) = cop_cache().lock().unwrap().get(f) {
        return hit.clone();
    }
    let result = match f.split_first() {
        None => LinComb::basis((Forest::unit(), Forest::unit())),
        Some((first, rest)) => {
            let a = ck_coproduct_tree(first);
            if rest.is_unit() {
                a
            } else {
                let b = ck_coproduct(&rest);
                crate::freevec::pair_product(&a, &b, Forest::mul, Forest::mul)
            }
        }
    };
    let arc = Arc::new(result);
    cop_cache().lock().unwrap().insert(f.clone(), arc.clone());
    arc
}

/// Basis-delta pairing of two forest series.
pub fn pairing(a: &LinComb<Forest>, b: &LinComb<Forest>) -> Rational {
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().map(|(f, c)| c * big.coeff(f)).sum()
}

/// The dual product on forest series: the pairing-adjoint of the cut
/// coproduct, truncated at `trunc` nodes.
pub fn gl_product_value(
    a: &LinComb<Forest>,
    b: &LinComb<Forest>,
    trunc: usize,
    dim: usize,
) -> LinComb<Forest> {
    if a.is_zero() || b.is_zero() {
        return LinComb::zero();
    }
    let max_a = a.keys().map(|f| f.nodes()).max().unwrap();
    let max_b = b.keys().map(|f| f.nodes()).max().unwrap();
    let mut out = LinComb::zero();
    for h in forests_up_to(trunc.min(max_a + max_b), dim) {
        let cop = ck_coproduct(&h);
        let mut coeff = Rational::zero();
        for ((left, right), c) in cop.iter() {
            if !a.contains(left) || !b.contains(right) {
                continue;
            }
            coeff += c * a.coeff(left) * b.coeff(right);
        }
        if !coeff.is_zero() {
            out.insert_add(h, coeff);
        }
    }
    out
}

/// Grossman-Larson product of truncated forest series.
pub fn gl_product(a: &ForestPoly, b: &ForestPoly) -> Result<ForestPoly, AlgebraError> {
    a.check_compatible(b)?;
    Ok(ForestPoly {
        value: gl_product_value(&a.value, &b.value, a.trunc, a.dim),
        trunc: a.trunc,
        dim: a.dim,
    })
}

/// The commutative forest product, extended bilinearly.
pub fn forest_product(a: &ForestPoly, b: &ForestPoly) -> Result<ForestPoly, AlgebraError> {
    a.check_compatible(b)?;
    let n = a.trunc;
    let value = bilinear_extend(
        |f: &Forest, g: &Forest| {
            if f.nodes() + g.nodes() <= n {
                LinComb::basis(f.mul(g))
            } else {
                LinComb::zero()
            }
        },
        &a.value,
        &b.value,
    );
    Ok(ForestPoly { value, trunc: n, dim: a.dim })
}

/// Grafting as a plain sum over vertices of the target: attach the source's
/// root below each node once. This is the convention under which the raw
/// elementary-differential assignment of the RDE layer is a pre-Lie
/// morphism.
pub fn attach_graft(source: &LabeledTree, target: &LabeledTree) -> LinComb<LabeledTree> {
    let mut out = LinComb::zero();
    // attach at the root
    let mut children = target.children().to_vec();
    children.push(source.clone());
    out.insert_add(LabeledTree::node(target.label(), children), Rational::one());
    // or inside one of the children
    for (i, c) in target.children().iter().enumerate() {
        for (grafted, coeff) in attach_graft(source, c).iter() {
            let mut children = target.children().to_vec();
            children[i] = grafted.clone();
            out.insert_add(LabeledTree::node(target.label(), children), coeff.clone());
        }
    }
    out
}

/// Pre-Lie grafting of trees in the cut-counting convention: the
/// coefficient of a result tree is the number of its single admissible cuts
/// with the source as branch and the target as trunk. Under the basis-delta
/// pairing this is exactly the tree part of the dual product, and the two
/// conventions are related by the symmetry-factor rescaling
/// `sigma(result) / (sigma(source) * sigma(target))`.
pub fn graft(source: &LabeledTree, target: &LabeledTree) -> LinComb<LabeledTree> {
    let denom = source.symmetry_factor() * target.symmetry_factor();
    attach_graft(source, target).flat_map(|t| {
        LinComb::term(t.clone(), Rational::new(t.symmetry_factor(), denom.clone()))
    })
}

/// Grafting extended bilinearly to tree series, truncated.
pub fn graft_series(
    a: &LinComb<LabeledTree>,
    b: &LinComb<LabeledTree>,
    trunc: usize,
) -> LinComb<LabeledTree> {
    bilinear_extend(
        |s: &LabeledTree, t: &LabeledTree| {
            if s.nodes() + t.nodes() <= trunc {
                graft(s, t)
            } else {
                LinComb::zero()
            }
        },
        a,
        b,
    )
}

/// Vertex-attach grafting extended bilinearly to tree series, truncated.
pub fn attach_graft_series(
    a: &LinComb<LabeledTree>,
    b: &LinComb<LabeledTree>,
    trunc: usize,
) -> LinComb<LabeledTree> {
    bilinear_extend(
        |s: &LabeledTree, t: &LabeledTree| {
            if s.nodes() + t.nodes() <= trunc {
                attach_graft(s, t)
            } else {
                LinComb::zero()
            }
        },
        a,
        b,
    )
}

/// Adjoint of grafting: sum over single admissible cuts, branch on the
/// left, trunk on the right.
pub fn graft_adjoint(t: &LabeledTree) -> LinComb2<LabeledTree, LabeledTree> {
    let mut out = LinComb::zero();
    // A single cut removes one edge: recursing over the nodes, cut the edge
    // above each child.
    for (i, child) in t.children().iter().enumerate() {
        let mut rest = t.children().to_vec();
        rest.remove(i);
        out.insert_add(
            (child.clone(), LabeledTree::node(t.label(), rest)),
            Rational::one(),
        );
        for ((branch, trunk), c) in graft_adjoint(child).iter() {
            let mut rest = t.children().to_vec();
            rest[i] = trunk.clone();
            out.insert_add(
                (branch.clone(), LabeledTree::node(t.label(), rest)),
                c.clone(),
            );
        }
    }
    out
}

/// The coproduct dual to the forest product: all splits of a forest into an
/// ordered pair of sub-multisets.
pub fn gl_coproduct_forest(f: &Forest) -> LinComb2<Forest, Forest> {
    // Distinct trees split independently; equal copies split by count.
    let mut splits: Vec<(Vec<LabeledTree>, Vec<LabeledTree>)> = vec![(vec![], vec![])];
    let trees = f.trees();
    let mut i = 0;
    while i < trees.len() {
        let mut j = i;
        while j < trees.len() && trees[j] == trees[i] {
            j += 1;
        }
        let mult = j - i;
        let mut next = Vec::new();
        for (l, r) in &splits {
            for k in 0..=mult {
                let mut l2 = l.clone();
                let mut r2 = r.clone();
                l2.extend(std::iter::repeat(trees[i].clone()).take(k));
                r2.extend(std::iter::repeat(trees[i].clone()).take(mult - k));
                next.push((l2, r2));
            }
        }
        splits = next;
        i = j;
    }
    let mut out = LinComb::zero();
    for (l, r) in splits {
        out.insert_add((Forest::from_trees(l), Forest::from_trees(r)), Rational::one());
    }
    out
}

/// The coproduct on the dual side, extended linearly over a series.
pub fn gl_coproduct(x: &ForestPoly) -> LinComb2<Forest, Forest> {
    x.value.flat_map(gl_coproduct_forest)
}

type AntipodeCache = Mutex<HashMap<LabeledTree, Arc<LinComb<Forest>>>>;

fn ck_antipode_cache() -> &'static AntipodeCache {
    static CACHE: OnceLock<AntipodeCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn ck_antipode_tree(t: &LabeledTree) -> Arc<LinComb<Forest>> {
    if let Some(hit) = ck_antipode_cache().lock().unwrap().get(t) {
        return hit.clone();
    }
    let whole = Forest::single(t.clone());
    let mut out = LinComb::term(whole.clone(), rat_int(-1));
    for ((branches, trunk), c) in ck_coproduct(&whole).iter() {
        if branches.is_unit() || trunk.is_unit() {
            continue;
        }
        let ab = ck_antipode_value(&LinComb::basis(branches.clone()));
        for (f, x) in ab.iter() {
            out.insert_add(f.mul(trunk), -(c * x));
        }
    }
    let arc = Arc::new(out);
    ck_antipode_cache().lock().unwrap().insert(t.clone(), arc.clone());
    arc
}

/// Antipode of the Connes-Kreimer side, extended multiplicatively over
/// forests and linearly over series.
pub fn ck_antipode_value(x: &LinComb<Forest>) -> LinComb<Forest> {
    x.flat_map(|f| {
        let mut acc = LinComb::basis(Forest::unit());
        for t in f.trees() {
            let at = ck_antipode_tree(t);
            acc = bilinear_extend(|a: &Forest, b: &Forest| LinComb::basis(a.mul(b)), &acc, &at);
        }
        acc
    })
}

pub fn ck_antipode(x: &ForestPoly) -> ForestPoly {
    ForestPoly {
        value: ck_antipode_value(&x.value),
        trunc: x.trunc,
        dim: x.dim,
    }
}

/// Antipode of the dual side: the recursion from the antipode convolution
/// identity, with products taken in the dual algebra.
pub fn gl_antipode(x: &ForestPoly) -> ForestPoly {
    let mut memo: HashMap<Forest, LinComb<Forest>> = HashMap::new();
    fn basis_antipode(
        f: &Forest,
        trunc: usize,
        dim: usize,
        memo: &mut HashMap<Forest, LinComb<Forest>>,
    ) -> LinComb<Forest> {
        if f.is_unit() {
            return LinComb::basis(Forest::unit());
        }
        if let Some(hit) = memo.get(f) {
            return hit.clone();
        }
        let mut out = LinComb::term(f.clone(), rat_int(-1));
        for ((l, r), c) in gl_coproduct_forest(f).iter() {
            if l.is_unit() || r.is_unit() {
                continue;
            }
            let al = basis_antipode(l, trunc, dim, memo);
            let prod = gl_product_value(&al, &LinComb::basis(r.clone()), trunc, dim);
            out.add_scaled(&prod, &-c.clone());
        }
        memo.insert(f.clone(), out.clone());
        out
    }
    let value = x
        .value
        .flat_map(|f| basis_antipode(f, x.trunc, x.dim, &mut memo));
    ForestPoly { value, trunc: x.trunc, dim: x.dim }
}

/// Exponential for the dual product; the input must have no constant term.
pub fn exp_star(x: &ForestPoly) -> Result<ForestPoly, AlgebraError> {
    if !x.value.coeff(&Forest::unit()).is_zero() {
        return Err(AlgebraError::SeriesPrecondition("exp needs zero constant term"));
    }
    let mut out = ForestPoly::unit(x.trunc, x.dim);
    let mut power = ForestPoly::unit(x.trunc, x.dim);
    let mut factorial = Rational::one();
    for k in 1..=x.trunc {
        power = gl_product(&power, x)?;
        factorial *= rat_int(k as i64);
        if power.value.is_zero() {
            break;
        }
        out = out.add(&power.scaled(&(Rational::one() / &factorial)))?;
    }
    Ok(out)
}

/// Logarithm for the dual product; the input must have constant term 1.
pub fn log_star(g: &ForestPoly) -> Result<ForestPoly, AlgebraError> {
    if g.value.coeff(&Forest::unit()) != Rational::one() {
        return Err(AlgebraError::SeriesPrecondition("log needs constant term 1"));
    }
    let mut rest = g.clone();
    rest.value.insert_add(Forest::unit(), rat_int(-1));
    let mut out = ForestPoly::zero(g.trunc, g.dim);
    let mut power = ForestPoly::unit(g.trunc, g.dim);
    for k in 1..=g.trunc {
        power = gl_product(&power, &rest)?;
        if power.value.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { rat_int(1) } else { rat_int(-1) };
        out = out.add(&power.scaled(&(sign / rat_int(k as i64))))?;
    }
    Ok(out)
}

/// Group-like on the truncation: pairs multiplicatively with the forest
/// product and takes value 1 on the unit.
pub fn is_grouplike_star(g: &ForestPoly) -> bool {
    if g.value.coeff(&Forest::unit()) != Rational::one() {
        return false;
    }
    let forests = forests_up_to(g.trunc, g.dim);
    for s in &forests {
        if s.is_unit() {
            continue;
        }
        for t in &forests {
            if t.is_unit() || s.nodes() + t.nodes() > g.trunc || s > t {
                continue;
            }
            if g.value.coeff(&s.mul(t)) != g.value.coeff(s) * g.value.coeff(t) {
                return false;
            }
        }
    }
    true
}

/// Primitive on the truncation: supported on single trees. (The tree series
/// are exactly the primitive elements of the dual.)
pub fn is_primitive_star(x: &ForestPoly) -> bool {
    x.value
        .keys()
        .all(|f| f.as_single_tree().is_some())
}

/// The canonical embedding of the tensor algebra: letters map to single
/// nodes and words to iterated dual products.
pub fn iota(x: &TensorPoly) -> Result<ForestPoly, AlgebraError> {
    let n = x.trunc();
    let d = x.dim();
    let mut out = ForestPoly::zero(n, d);
    for (w, c) in x.value().iter() {
        let mut acc = ForestPoly::unit(n, d);
        for &letter in w.letters() {
            acc = gl_product(&acc, &ForestPoly::node(letter, n, d)?)?;
        }
        out = out.add(&acc.scaled(c))?;
    }
    Ok(out)
}

/// Projection onto linear trees, as a word series (the inverse of the
/// linear-tree part of the embedding).
pub fn linear_projection(x: &ForestPoly) -> LinComb<crate::tensor::Word> {
    let mut out = LinComb::zero();
    for (f, c) in x.value.iter() {
        if let Some(t) = f.as_single_tree() {
            if t.is_linear() {
                // leaf letter first: the word spells the tree from the leaf
                // down to the root
                let mut letters = Vec::with_capacity(t.nodes());
                let mut cur = t;
                loop {
                    letters.push(cur.label());
                    match cur.children().first() {
                        Some(c) => cur = c,
                        None => break,
                    }
                }
                letters.reverse();
                out.insert_add(crate::tensor::Word(letters), c.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freevec::rat;
    use crate::tensor::Word;

    fn leaf(i: u8) -> LabeledTree {
        LabeledTree::leaf(i)
    }

    fn node(i: u8, children: Vec<LabeledTree>) -> LabeledTree {
        LabeledTree::node(i, children)
    }

    fn fp(t: LabeledTree, n: usize, d: usize) -> ForestPoly {
        ForestPoly::tree(t, n, d).unwrap()
    }

    #[test]
    fn ck_coproduct_examples() {
        // single node
        let cop = ck_coproduct(&Forest::single(leaf(1)));
        assert_eq!(cop.len(), 2);
        // [o0]_{o0}: whole (x) 1 + 1 (x) whole + o0 (x) o0
        let tall = node(0, vec![leaf(0)]);
        let cop = ck_coproduct(&Forest::single(tall.clone()));
        assert_eq!(cop.len(), 3);
        assert_eq!(
            cop.coeff(&(Forest::single(leaf(0)), Forest::single(leaf(0)))),
            rat_int(1)
        );
        // multiplicativity: o0 o0
        let ff = Forest::from_trees(vec![leaf(0), leaf(0)]);
        let cop = ck_coproduct(&ff);
        assert_eq!(
            cop.coeff(&(Forest::single(leaf(0)), Forest::single(leaf(0)))),
            rat_int(2)
        );
        assert_eq!(cop.coeff(&(ff.clone(), Forest::unit())), rat_int(1));
        assert_eq!(cop.len(), 3);
    }

    #[test]
    fn gl_product_golden() {
        // o0 * o0 = [o0]_{o0} + 2 o0 o0
        let a = ForestPoly::node(0, 3, 0).unwrap();
        let prod = gl_product(&a, &a).unwrap();
        let tall = Forest::single(node(0, vec![leaf(0)]));
        let pair = Forest::from_trees(vec![leaf(0), leaf(0)]);
        assert_eq!(prod.value().coeff(&tall), rat_int(1));
        assert_eq!(prod.value().coeff(&pair), rat_int(2));
        assert_eq!(prod.value().len(), 2);

        // unit is neutral
        let unit = ForestPoly::unit(3, 0);
        assert_eq!(gl_product(&unit, &a).unwrap(), a);

        // o1 * o2 = [o1]_{o2} + o1 o2 (grafting only into the right factor)
        let x = ForestPoly::node(1, 3, 2).unwrap();
        let y = ForestPoly::node(2, 3, 2).unwrap();
        let prod = gl_product(&x, &y).unwrap();
        assert_eq!(prod.value().coeff(&Forest::single(node(2, vec![leaf(1)]))), rat_int(1));
        assert_eq!(prod.value().coeff(&Forest::from_trees(vec![leaf(1), leaf(2)])), rat_int(1));
        assert_eq!(prod.value().coeff(&Forest::single(node(1, vec![leaf(2)]))), rat_int(0));
        assert_eq!(prod.value().len(), 2);
    }

    #[test]
    fn forest_product_examples() {
        let x = ForestPoly::node(1, 4, 2).unwrap();
        let y = ForestPoly::node(2, 4, 2).unwrap();
        let unit = ForestPoly::unit(4, 2);
        assert_eq!(forest_product(&unit, &x).unwrap(), x);
        assert_eq!(
            forest_product(&x, &y).unwrap(),
            forest_product(&y, &x).unwrap()
        );
        let sq = forest_product(&x, &x).unwrap();
        assert_eq!(
            sq.value().coeff(&Forest::from_trees(vec![leaf(1), leaf(1)])),
            rat_int(1)
        );
    }

    #[test]
    fn graft_examples() {
        // o1 grafted onto o2
        let g = graft(&leaf(1), &leaf(2));
        assert_eq!(g, LinComb::basis(node(2, vec![leaf(1)])));

        // o0 onto [o1]_{o2}: at the root or at the leaf
        let target = node(2, vec![leaf(1)]);
        let g = graft(&leaf(0), &target);
        assert_eq!(g.coeff(&node(2, vec![leaf(1), leaf(0)])), rat_int(1));
        assert_eq!(g.coeff(&node(2, vec![node(1, vec![leaf(0)])])), rat_int(1));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn graft_is_tree_part_of_gl() {
        let all = crate::tree::trees_up_to(3, 1);
        for s in &all {
            for t in &all {
                if s.nodes() + t.nodes() > 3 {
                    continue;
                }
                let n = s.nodes() + t.nodes();
                let prod = gl_product(&fp(s.clone(), n, 1), &fp(t.clone(), n, 1)).unwrap();
                let tree_part: LinComb<LabeledTree> = LinComb::from_terms(
                    prod.value()
                        .iter()
                        .filter_map(|(f, c)| f.as_single_tree().map(|t| (t.clone(), c.clone()))),
                );
                assert_eq!(tree_part, graft(s, t), "graft mismatch at {s:?} -> {t:?}");
            }
        }
    }

    #[test]
    fn exp_star_golden() {
        // exp(o1) at N=2: 1 + o1 + 1/2 [o1]_{o1} + o1 o1
        let x = ForestPoly::node(1, 2, 1).unwrap();
        let g = exp_star(&x).unwrap();
        assert_eq!(g.value().coeff(&Forest::unit()), rat_int(1));
        assert_eq!(g.value().coeff(&Forest::single(leaf(1))), rat_int(1));
        assert_eq!(g.value().coeff(&Forest::single(node(1, vec![leaf(1)]))), rat(1, 2));
        assert_eq!(g.value().coeff(&Forest::from_trees(vec![leaf(1), leaf(1)])), rat_int(1));
        assert_eq!(g.value().len(), 4);
    }

    #[test]
    fn log_exp_roundtrip() {
        let x = ForestPoly::new(
            &LinComb::basis(Forest::single(leaf(0)))
                + &LinComb::term(Forest::single(node(1, vec![leaf(0)])), rat(1, 3)),
            4,
            1,
        )
        .unwrap();
        assert_eq!(log_star(&exp_star(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn grouplike_and_primitive() {
        let x = ForestPoly::node(1, 3, 1).unwrap();
        assert!(is_primitive_star(&x));
        let g = exp_star(&x).unwrap();
        assert!(is_grouplike_star(&g));
        assert!(!is_grouplike_star(&x));
        let ff = ForestPoly::new(
            LinComb::basis(Forest::from_trees(vec![leaf(0), leaf(0)])),
            3,
            1,
        )
        .unwrap();
        assert!(!is_primitive_star(&ff));
    }

    #[test]
    fn antipode_convolution_spot() {
        // m(antipode (x) id) cop = unit . counit on a couple of elements
        for f in [
            Forest::single(leaf(0)),
            Forest::single(node(0, vec![leaf(0)])),
            Forest::from_trees(vec![leaf(0), leaf(0)]),
        ] {
            let cop = ck_coproduct(&f);
            let mut conv = LinComb::zero();
            for ((l, r), c) in cop.iter() {
                let al = ck_antipode_value(&LinComb::basis(l.clone()));
                for (g, x) in al.iter() {
                    conv.insert_add(g.mul(r), c * x);
                }
            }
            assert!(conv.is_zero(), "antipode identity fails on {f:?}: {conv:?}");
        }
    }

    #[test]
    fn iota_examples() {
        let n = 3;
        let d = 2;
        let e1 = TensorPoly::letter(1, n, d).unwrap();
        assert_eq!(iota(&e1).unwrap(), ForestPoly::node(1, n, d).unwrap());
        // iota(e12) = o1 * o2 = [o1]_{o2} + o1 o2
        let w12 = TensorPoly::new(LinComb::basis(Word(vec![1, 2])), n, d).unwrap();
        let got = iota(&w12).unwrap();
        assert_eq!(got.value().coeff(&Forest::single(node(2, vec![leaf(1)]))), rat_int(1));
        assert_eq!(got.value().coeff(&Forest::from_trees(vec![leaf(1), leaf(2)])), rat_int(1));
        // unit maps to unit
        assert_eq!(iota(&TensorPoly::unit(n, d)).unwrap(), ForestPoly::unit(n, d));
    }

    #[test]
    fn linear_projection_inverts_iota_on_words() {
        let n = 3;
        let d = 1;
        for w in crate::tensor::words_up_to(n, d) {
            let x = TensorPoly::new(LinComb::basis(w.clone()), n, d).unwrap();
            let proj = linear_projection(&iota(&x).unwrap());
            assert_eq!(proj, LinComb::basis(w));
        }
    }
}
