//! Exact sparse linear combinations over an ordered canonical basis.
//!
//! Coefficients are arbitrary-precision rationals throughout the algebraic
//! layer; floats appear only in the rough-path and RDE layers. The pairing
//! used everywhere is the basis-delta pairing: `<k, k'> = 1` iff `k = k'`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::AlgebraError;

/// Exact rational scalar: reduced fraction with positive denominator.
pub type Rational = num_rational::BigRational;

/// `n/d` as a [`Rational`].
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Integer `n` as a [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// A finitely supported map from basis keys to rational coefficients.
///
/// Invariants: no stored coefficient is zero, and keys are kept in the
/// canonical `Ord` order of `K` (grade first, then canonical encoding, for
/// every key type in this crate).
#[derive(Clone, PartialEq, Eq)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

/// Linear combinations of key pairs; houses coproduct values.
pub type LinComb2<K, L> = LinComb<(K, L)>;

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<K: Ord> LinComb<K> {
    pub fn zero() -> Self {
        LinComb { terms: BTreeMap::new() }
    }

    /// The basis vector `1 * k`.
    pub fn basis(k: K) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(k, Rational::one());
        LinComb { terms }
    }

    /// The single term `c * k` (empty if `c = 0`).
    pub fn term(k: K, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        LinComb { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in iter {
            out.insert_add(k, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `k` (zero if absent).
    pub fn coeff(&self, k: &K) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, k: &K) -> bool {
        self.terms.contains_key(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    /// Adds `c * k` in place, dropping the entry if it cancels.
    pub fn insert_add(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational)
    where
        K: Clone,
    {
        if c.is_zero() {
            return;
        }
        for (k, x) in other.iter() {
            self.insert_add(k.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self
    where
        K: Clone,
    {
        if c.is_zero() {
            return Self::zero();
        }
        LinComb {
            terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect(),
        }
    }

    /// Linear extension of a basis-key map.
    pub fn map_keys<L: Ord>(&self, mut f: impl FnMut(&K) -> L) -> LinComb<L> {
        let mut out = LinComb::zero();
        for (k, c) in self.iter() {
            out.insert_add(f(k), c.clone());
        }
        out
    }

    /// Linear extension of a map into linear combinations.
    pub fn flat_map<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> LinComb<L>) -> LinComb<L> {
        let mut out = LinComb::zero();
        for (k, c) in self.iter() {
            out.add_scaled(&f(k), c);
        }
        out
    }

    pub fn filter_keys(&self, keep: impl Fn(&K) -> bool) -> Self
    where
        K: Clone,
    {
        LinComb {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }
}

impl<K: Ord + Clone> Add for &LinComb<K> {
    type Output = LinComb<K>;
    fn add(self, rhs: Self) -> LinComb<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> AddAssign<&LinComb<K>> for LinComb<K> {
    fn add_assign(&mut self, rhs: &LinComb<K>) {
        for (k, c) in rhs.iter() {
            self.insert_add(k.clone(), c.clone());
        }
    }
}

impl<K: Ord + Clone> Sub for &LinComb<K> {
    type Output = LinComb<K>;
    fn sub(self, rhs: Self) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl<K: Ord + Clone> Neg for &LinComb<K> {
    type Output = LinComb<K>;
    fn neg(self) -> LinComb<K> {
        self.scaled(&-Rational::one())
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{:?}", c, k)?;
        }
        Ok(())
    }
}

/// Bilinear extension: `f` is defined on basis-key pairs and extended to
/// `sum_{i,j} a_i b_j f(k_i, k_j)`.
pub fn bilinear_extend<A: Ord, B: Ord, C: Ord + Clone>(
    f: impl Fn(&A, &B) -> LinComb<C>,
    a: &LinComb<A>,
    b: &LinComb<B>,
) -> LinComb<C> {
    let mut out = LinComb::zero();
    for (ka, ca) in a.iter() {
        for (kb, cb) in b.iter() {
            out.add_scaled(&f(ka, kb), &(ca * cb));
        }
    }
    out
}

/// `a (x) b` as an element of the tensor square.
pub fn tensor2<K: Ord + Clone, L: Ord + Clone>(a: &LinComb<K>, b: &LinComb<L>) -> LinComb2<K, L> {
    bilinear_extend(|k, l| LinComb::basis((k.clone(), l.clone())), a, b)
}

/// Componentwise product of tensor-square elements, with the two leg
/// products supplied by the caller (used for multiplicative coproducts).
pub fn pair_product<K: Ord + Clone, L: Ord + Clone>(
    a: &LinComb2<K, L>,
    b: &LinComb2<K, L>,
    left_mul: impl Fn(&K, &K) -> K,
    right_mul: impl Fn(&L, &L) -> L,
) -> LinComb2<K, L> {
    bilinear_extend(
        |(ka, la): &(K, L), (kb, lb): &(K, L)| {
            LinComb::basis((left_mul(ka, kb), right_mul(la, lb)))
        },
        a,
        b,
    )
}

/// Applies a functional to the left leg: `sum c * f(k) * l`.
pub fn contract_left<K: Ord, L: Ord + Clone>(
    x: &LinComb2<K, L>,
    f: impl Fn(&K) -> Rational,
) -> LinComb<L> {
    let mut out = LinComb::zero();
    for ((k, l), c) in x.iter() {
        let v = f(k);
        if !v.is_zero() {
            out.insert_add(l.clone(), c * v);
        }
    }
    out
}

/// Swaps the two legs of a tensor-square element.
pub fn swap_legs<K: Ord + Clone, L: Ord + Clone>(x: &LinComb2<K, L>) -> LinComb2<L, K> {
    x.map_keys(|(k, l)| (l.clone(), k.clone()))
}

/// A linear map stored as its matrix on an explicit ordered basis.
///
/// Column `j` holds the image of `basis[j]`. Built from any operator whose
/// images stay inside the supplied basis; `transpose` is with respect to the
/// basis-delta pairing.
pub struct MatrixMap<K: Ord + Clone> {
    basis: Vec<K>,
    index: BTreeMap<K, usize>,
    cols: Vec<LinComb<K>>,
}

impl<K: Ord + Clone> MatrixMap<K> {
    pub fn from_op(
        op: impl Fn(&K) -> LinComb<K>,
        basis: &[K],
    ) -> Result<Self, AlgebraError> {
        let index: BTreeMap<K, usize> =
            basis.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        let mut cols = Vec::with_capacity(basis.len());
        for k in basis {
            let img = op(k);
            for key in img.keys() {
                if !index.contains_key(key) {
                    return Err(AlgebraError::KeyOutsideBasis);
                }
            }
            cols.push(img);
        }
        Ok(MatrixMap { basis: basis.to_vec(), index, cols })
    }

    /// Matrix transpose with respect to the basis-delta pairing.
    pub fn transpose(&self) -> Self {
        let mut cols: Vec<LinComb<K>> = vec![LinComb::zero(); self.basis.len()];
        for (j, col) in self.cols.iter().enumerate() {
            for (k, c) in col.iter() {
                let i = self.index[k];
                cols[i].insert_add(self.basis[j].clone(), c.clone());
            }
        }
        MatrixMap { basis: self.basis.clone(), index: self.index.clone(), cols }
    }

    pub fn apply(&self, x: &LinComb<K>) -> Result<LinComb<K>, AlgebraError> {
        let mut out = LinComb::zero();
        for (k, c) in x.iter() {
            let j = self.index.get(k).ok_or(AlgebraError::KeyOutsideBasis)?;
            out.add_scaled(&self.cols[*j], c);
        }
        Ok(out)
    }

    pub fn apply_basis(&self, k: &K) -> Result<&LinComb<K>, AlgebraError> {
        let j = self.index.get(k).ok_or(AlgebraError::KeyOutsideBasis)?;
        Ok(&self.cols[*j])
    }

    pub fn basis(&self) -> &[K] {
        &self.basis
    }
}

/// Formats a rational without superfluous `/1`.
pub fn fmt_rational(c: &Rational) -> String {
    c.to_string()
}

/// Parses `a`, `a/b`, or a decimal like `0.5` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: num_bigint::BigInt = num.trim().parse().ok()?;
        let d: num_bigint::BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let i: num_bigint::BigInt = if int.is_empty() || int == "-" {
            0.into()
        } else {
            int.parse().ok()?
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return None;
        }
        let f: num_bigint::BigInt = frac.parse().ok()?;
        let scale = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
        let mag = Rational::new(i.abs() * &scale + f, scale);
        return Some(if neg { -mag } else { mag });
    }
    let n: num_bigint::BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_cancels_and_merges() {
        let x = LinComb::basis("x");
        let neg = -&x;
        assert!((&x + &neg).is_zero());

        let two = LinComb::term("k", rat_int(2));
        let three = LinComb::term("k", rat_int(3));
        assert_eq!(&two + &three, LinComb::term("k", rat_int(5)));

        let a = LinComb::basis("a");
        let b = LinComb::basis("b");
        let sum = &a + &b;
        assert_eq!(sum.len(), 2);
        assert_eq!(sum.coeff(&"a"), rat_int(1));
    }

    #[test]
    fn bilinear_extension() {
        let concat = |a: &String, b: &String| LinComb::basis(format!("{a}{b}"));
        let e1 = LinComb::basis("1".to_string());
        let e2 = LinComb::basis("2".to_string());
        assert_eq!(bilinear_extend(concat, &e1, &e2), LinComb::basis("12".to_string()));
        assert_eq!(bilinear_extend(concat, &LinComb::zero(), &e2), LinComb::zero());
        let a = e1.scaled(&rat_int(2));
        let b = e2.scaled(&rat_int(3));
        assert_eq!(bilinear_extend(concat, &a, &b), LinComb::term("12".to_string(), rat_int(6)));
    }

    #[test]
    fn transpose_small() {
        // e0 -> e0 + e1 on letters; transpose maps e1 -> e1 + e0.
        let basis = vec![0u8, 1u8];
        let op = |k: &u8| {
            if *k == 0 {
                &LinComb::basis(0u8) + &LinComb::basis(1u8)
            } else {
                LinComb::basis(1u8)
            }
        };
        let m = MatrixMap::from_op(op, &basis).unwrap();
        let t = m.transpose();
        assert_eq!(t.apply(&LinComb::basis(1u8)).unwrap(), &LinComb::basis(1u8) + &LinComb::basis(0u8));
        assert_eq!(t.apply(&LinComb::basis(0u8)).unwrap(), LinComb::basis(0u8));
        // identity transposes to identity
        let id = MatrixMap::from_op(|k: &u8| LinComb::basis(*k), &basis).unwrap();
        let idt = id.transpose();
        for k in &basis {
            assert_eq!(idt.apply(&LinComb::basis(*k)).unwrap(), LinComb::basis(*k));
        }
    }

    #[test]
    fn transpose_involution() {
        let basis: Vec<u8> = (0..4).collect();
        let op = |k: &u8| match *k {
            0 => LinComb::from_terms([(1u8, rat_int(2)), (3u8, rat(1, 3))]),
            1 => LinComb::basis(2u8),
            2 => LinComb::from_terms([(0u8, rat_int(-1)), (2u8, rat_int(7))]),
            _ => LinComb::zero(),
        };
        let m = MatrixMap::from_op(op, &basis).unwrap();
        let tt = m.transpose().transpose();
        for k in &basis {
            assert_eq!(tt.apply(&LinComb::basis(*k)).unwrap(), m.apply(&LinComb::basis(*k)).unwrap());
        }
    }

    #[test]
    fn out_of_basis_detected() {
        let basis = vec![0u8];
        let op = |_: &u8| LinComb::basis(5u8);
        assert!(MatrixMap::from_op(op, &basis).is_err());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/2"), Some(rat(3, 2)));
        assert_eq!(parse_rational("-1/3"), Some(rat(-1, 3)));
        assert_eq!(parse_rational("5"), Some(rat_int(5)));
        assert_eq!(parse_rational("0.5"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
