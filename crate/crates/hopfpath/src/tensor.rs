//! The tensor-series Hopf algebra over R^(1+d) and its shuffle dual,
//! truncated at word length N, with the translation operator and its dual
//! via disjoint-subword extraction.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::freevec::{bilinear_extend, rat_int, LinComb, LinComb2, Rational};

/// A word over the letters `{0, ..., d}`; the empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: u8) -> Self {
        Word(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    pub fn zero_count(&self) -> usize {
        self.0.iter().filter(|&&c| c == 0).count()
    }

    pub fn max_label(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: grade (length) first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// All words of length `1..=n` over `{0,...,dim}`.
pub fn words_up_to(n: usize, dim: usize) -> Vec<Word> {
    let mut out = vec![];
    let mut level: Vec<Word> = vec![Word::empty()];
    for _ in 1..=n {
        let mut next = Vec::with_capacity(level.len() * (dim + 1));
        for w in &level {
            for i in 0..=dim as u8 {
                let mut v = w.0.clone();
                v.push(i);
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out.sort();
    out
}

/// An element of the truncated tensor algebra: a word series with all words
/// of length <= `trunc` and letters <= `dim`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorPoly {
    value: LinComb<Word>,
    trunc: usize,
    dim: usize,
}

impl TensorPoly {
    pub fn new(value: LinComb<Word>, trunc: usize, dim: usize) -> Result<Self, AlgebraError> {
        for w in value.keys() {
            if w.len() > trunc {
                return Err(AlgebraError::TruncationMismatch(w.len(), trunc));
            }
            if usize::from(w.max_label()) > dim {
                return Err(AlgebraError::LabelOutOfRange { label: w.max_label(), max: dim as u8 });
            }
        }
        Ok(TensorPoly { value, trunc, dim })
    }

    /// Builds from any series by dropping words longer than `trunc`.
    pub fn truncated(value: LinComb<Word>, trunc: usize, dim: usize) -> Self {
        TensorPoly {
            value: value.filter_keys(|w| w.len() <= trunc),
            trunc,
            dim,
        }
    }

    pub fn unit(trunc: usize, dim: usize) -> Self {
        TensorPoly { value: LinComb::basis(Word::empty()), trunc, dim }
    }

    pub fn zero(trunc: usize, dim: usize) -> Self {
        TensorPoly { value: LinComb::zero(), trunc, dim }
    }

    pub fn letter(i: u8, trunc: usize, dim: usize) -> Result<Self, AlgebraError> {
        if usize::from(i) > dim {
            return Err(AlgebraError::LabelOutOfRange { label: i, max: dim as u8 });
        }
        Ok(TensorPoly { value: LinComb::basis(Word::letter(i)), trunc, dim })
    }

    pub fn value(&self) -> &LinComb<Word> {
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
        Ok(TensorPoly { value: &self.value + &other.value, trunc: self.trunc, dim: self.dim })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_compatible(other)?;
        Ok(TensorPoly { value: &self.value - &other.value, trunc: self.trunc, dim: self.dim })
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        TensorPoly { value: self.value.scaled(c), trunc: self.trunc, dim: self.dim }
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

/// Word concatenation, extended bilinearly; words beyond the truncation are
/// dropped (the quotient algebra).
pub fn concat(a: &TensorPoly, b: &TensorPoly) -> Result<TensorPoly, AlgebraError> {
    a.check_compatible(b)?;
    let n = a.trunc;
    let value = bilinear_extend(
        |u: &Word, v: &Word| {
            if u.len() + v.len() <= n {
                LinComb::basis(u.concat(v))
            } else {
                LinComb::zero()
            }
        },
        &a.value,
        &b.value,
    );
    Ok(TensorPoly { value, trunc: n, dim: a.dim })
}

fn shuffle_words(u: &[u8], v: &[u8]) -> LinComb<Word> {
    // Recursive riffle: uv-shuffles end with the last letter of u or of v.
    if u.is_empty() {
        return LinComb::basis(Word(v.to_vec()));
    }
    if v.is_empty() {
        return LinComb::basis(Word(u.to_vec()));
    }
    let mut out = LinComb::zero();
    let (u_init, u_last) = u.split_at(u.len() - 1);
    for (w, c) in shuffle_words(u_init, v).iter() {
        let mut ext = w.0.clone();
        ext.push(u_last[0]);
        out.insert_add(Word(ext), c.clone());
    }
    let (v_init, v_last) = v.split_at(v.len() - 1);
    for (w, c) in shuffle_words(u, v_init).iter() {
        let mut ext = w.0.clone();
        ext.push(v_last[0]);
        out.insert_add(Word(ext), c.clone());
    }
    out
}

/// Shuffle product: sum over all riffle interleavings.
pub fn shuffle(a: &TensorPoly, b: &TensorPoly) -> Result<TensorPoly, AlgebraError> {
    a.check_compatible(b)?;
    let n = a.trunc;
    let value = bilinear_extend(
        |u: &Word, v: &Word| {
            if u.len() + v.len() <= n {
                shuffle_words(&u.0, &v.0)
            } else {
                LinComb::zero()
            }
        },
        &a.value,
        &b.value,
    );
    Ok(TensorPoly { value, trunc: n, dim: a.dim })
}

/// Deconcatenation coproduct of a word: the sum over all splits
/// `w = uv`, including empty prefix and suffix.
pub fn deconcat_coproduct(w: &Word) -> LinComb2<Word, Word> {
    let mut out = LinComb::zero();
    for cut in 0..=w.len() {
        out.insert_add(
            (Word(w.0[..cut].to_vec()), Word(w.0[cut..].to_vec())),
            Rational::one(),
        );
    }
    out
}

/// Unshuffle coproduct of a word: the unique algebra-morphism extension of
/// `letter -> letter (x) 1 + 1 (x) letter`, i.e. the sum over complementary
/// subsequences.
pub fn shuffle_coproduct_word(w: &Word) -> LinComb2<Word, Word> {
    let n = w.len();
    let mut out = LinComb::zero();
    for mask in 0u64..(1u64 << n) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, &c) in w.0.iter().enumerate() {
            if mask & (1 << i) != 0 {
                left.push(c);
            } else {
                right.push(c);
            }
        }
        out.insert_add((Word(left), Word(right)), Rational::one());
    }
    out
}

/// Unshuffle coproduct of a series, extended linearly.
pub fn shuffle_coproduct(x: &TensorPoly) -> LinComb2<Word, Word> {
    x.value.flat_map(shuffle_coproduct_word)
}

/// Antipode of the concatenation Hopf algebra (equally, of the shuffle Hopf
/// algebra): word reversal with sign `(-1)^length`.
pub fn antipode(x: &TensorPoly) -> TensorPoly {
    let value = x.value.flat_map(|w| {
        let sign = if w.len() % 2 == 0 { rat_int(1) } else { rat_int(-1) };
        LinComb::term(w.reversed(), sign)
    });
    TensorPoly { value, trunc: x.trunc, dim: x.dim }
}

/// Concatenation exponential of a series with no constant term.
pub fn exp_concat(x: &TensorPoly) -> Result<TensorPoly, AlgebraError> {
    if !x.value.coeff(&Word::empty()).is_zero() {
        return Err(AlgebraError::SeriesPrecondition("exp needs zero constant term"));
    }
    let mut out = TensorPoly::unit(x.trunc, x.dim);
    let mut power = TensorPoly::unit(x.trunc, x.dim);
    let mut factorial = Rational::one();
    for k in 1..=x.trunc {
        power = concat(&power, x)?;
        factorial *= rat_int(k as i64);
        if power.value.is_zero() {
            break;
        }
        out = out.add(&power.scaled(&(Rational::one() / &factorial)))?;
    }
    Ok(out)
}

/// Concatenation logarithm of a series with constant term 1.
pub fn log_concat(g: &TensorPoly) -> Result<TensorPoly, AlgebraError> {
    if g.value.coeff(&Word::empty()) != Rational::one() {
        return Err(AlgebraError::SeriesPrecondition("log needs constant term 1"));
    }
    let mut rest = g.clone();
    rest.value.insert_add(Word::empty(), rat_int(-1));
    let mut out = TensorPoly::zero(g.trunc, g.dim);
    let mut power = TensorPoly::unit(g.trunc, g.dim);
    for k in 1..=g.trunc {
        power = concat(&power, &rest)?;
        if power.value.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { rat_int(1) } else { rat_int(-1) };
        out = out.add(&power.scaled(&(sign / rat_int(k as i64))))?;
    }
    Ok(out)
}

/// Group-like on the truncation: unit pairing 1 and multiplicative under
/// the shuffle coproduct, i.e. `<g, u sh v> = <g,u><g,v>` whenever
/// `|u| + |v| <= N`.
pub fn is_grouplike(g: &TensorPoly) -> bool {
    if g.value.coeff(&Word::empty()) != Rational::one() {
        return false;
    }
    let words = words_up_to(g.trunc, g.dim);
    for u in &words {
        for v in &words {
            if u.len() + v.len() > g.trunc || u > v {
                continue;
            }
            let sh = shuffle_words(&u.0, &v.0);
            let lhs: Rational = sh.iter().map(|(w, c)| c * g.value.coeff(w)).sum();
            if lhs != g.value.coeff(u) * g.value.coeff(v) {
                return false;
            }
        }
    }
    true
}

/// Primitive on the truncation: the unshuffle coproduct is
/// `x (x) 1 + 1 (x) x`. These are exactly the (truncated) Lie series.
pub fn is_primitive(x: &TensorPoly) -> bool {
    if !x.value.coeff(&Word::empty()).is_zero() {
        return false;
    }
    let cop = shuffle_coproduct(x);
    let expected = {
        let mut e = LinComb::zero();
        for (w, c) in x.value.iter() {
            e.insert_add((w.clone(), Word::empty()), c.clone());
            e.insert_add((Word::empty(), w.clone()), c.clone());
        }
        e
    };
    cop == expected
}

/// A tuple `(v_0, ..., v_d)` of primitive word series; the directions of a
/// tensor-algebra translation.
#[derive(Clone, Debug)]
pub struct WordTranslation {
    entries: Vec<LinComb<Word>>,
    trunc: usize,
    dim: usize,
    special: bool,
}

impl WordTranslation {
    /// Validates primitivity of every entry on the truncation.
    pub fn new(entries: Vec<LinComb<Word>>, trunc: usize, dim: usize) -> Result<Self, AlgebraError> {
        if entries.len() != dim + 1 {
            return Err(AlgebraError::DimensionMismatch(entries.len(), dim + 1));
        }
        for (i, e) in entries.iter().enumerate() {
            let p = TensorPoly::new(e.clone(), trunc, dim)?;
            if !is_primitive(&p) && !e.is_zero() {
                return Err(AlgebraError::NotPrimitive(i));
            }
        }
        let special = entries.iter().skip(1).all(|e| e.is_zero());
        Ok(WordTranslation { entries, trunc, dim, special })
    }

    pub fn zero(trunc: usize, dim: usize) -> Self {
        WordTranslation {
            entries: vec![LinComb::zero(); dim + 1],
            trunc,
            dim,
            special: true,
        }
    }

    pub fn entry(&self, i: u8) -> &LinComb<Word> {
        &self.entries[usize::from(i)]
    }

    pub fn entries(&self) -> &[LinComb<Word>] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whether `v = (v_0, 0, ..., 0)`.
    pub fn is_special(&self) -> bool {
        self.special
    }

    /// Entrywise sum (defines the composition law in the special case).
    pub fn add(&self, other: &WordTranslation) -> Result<Self, AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch(self.dim, other.dim));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        WordTranslation::new(entries, self.trunc.max(other.trunc), self.dim)
    }
}

/// The translation operator: the unique concatenation-algebra morphism with
/// `letter i -> letter i + v_i`, truncated at the target's length bound.
pub fn translate(v: &WordTranslation, x: &TensorPoly) -> Result<TensorPoly, AlgebraError> {
    if v.dim != x.dim {
        return Err(AlgebraError::DimensionMismatch(v.dim, x.dim));
    }
    let n = x.trunc;
    let mut out = TensorPoly::zero(n, x.dim);
    for (w, c) in x.value.iter() {
        let mut acc = TensorPoly::unit(n, x.dim);
        for &letter in w.letters() {
            let mut factor = LinComb::basis(Word::letter(letter));
            factor += v.entry(letter);
            let factor = TensorPoly::truncated(factor, n, x.dim);
            acc = concat(&acc, &factor)?;
        }
        out = out.add(&acc.scaled(c))?;
    }
    Ok(out)
}

/// One term of the subword-extraction expansion: a multiset of extracted
/// (subword, replacement-label) pairs and the remainder word in which each
/// extracted occurrence has been replaced by its label's letter.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct WordExtraction {
    pub extracted: Vec<(Word, u8)>,
    pub remainder: Word,
}

/// Enumerates all selections of disjoint nonempty contiguous subwords of
/// `w`, each replaced by a letter from `labels` (the marking of the general
/// dual). The `k = 0` selection is included.
pub fn word_extractions(w: &Word, labels: &[u8]) -> Vec<WordExtraction> {
    let mut out = Vec::new();
    let n = w.len();
    fn rec(
        w: &[u8],
        pos: usize,
        labels: &[u8],
        extracted: &mut Vec<(Word, u8)>,
        remainder: &mut Vec<u8>,
        out: &mut Vec<WordExtraction>,
    ) {
        if pos == w.len() {
            let mut ext = extracted.clone();
            ext.sort();
            out.push(WordExtraction { extracted: ext, remainder: Word(remainder.clone()) });
            return;
        }
        // letter stays
        remainder.push(w[pos]);
        rec(w, pos + 1, labels, extracted, remainder, out);
        remainder.pop();
        // or a subword starting here is extracted and replaced by a label
        for end in pos + 1..=w.len() {
            for &label in labels {
                extracted.push((Word(w[pos..end].to_vec()), label));
                remainder.push(label);
                rec(w, end, labels, extracted, remainder, out);
                remainder.pop();
                extracted.pop();
            }
        }
    }
    rec(&w.0[..n], 0, labels, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

/// The extraction expansion for the special-form dual (every replacement is
/// the letter 0): a sum of (commutative word monomial, remainder) pairs.
pub fn extraction_s(w: &Word) -> LinComb2<Vec<Word>, Word> {
    let mut out = LinComb::zero();
    for t in word_extractions(w, &[0]) {
        let mono: Vec<Word> = t.extracted.into_iter().map(|(sub, _)| sub).collect();
        out.insert_add((mono, t.remainder), Rational::one());
    }
    out
}

/// The dual translation: the character of `v` applied to the left leg of
/// the (label-marked) extraction expansion.
pub fn dual_translate(v: &WordTranslation, y: &TensorPoly) -> Result<TensorPoly, AlgebraError> {
    if v.dim != y.dim {
        return Err(AlgebraError::DimensionMismatch(v.dim, y.dim));
    }
    // In the special form only label-0 replacements can pair nonzero.
    let labels: Vec<u8> = if v.is_special() {
        vec![0]
    } else {
        (0..=y.dim as u8).collect()
    };
    let mut value = LinComb::zero();
    for (w, c) in y.value.iter() {
        for term in word_extractions(w, &labels) {
            let mut weight = c.clone();
            for (sub, label) in &term.extracted {
                weight *= v.entry(*label).coeff(sub);
                if weight.is_zero() {
                    break;
                }
            }
            if !weight.is_zero() {
                value.insert_add(term.remainder, weight);
            }
        }
    }
    Ok(TensorPoly { value, trunc: y.trunc, dim: y.dim })
}

/// The basis-delta pairing of two word series.
pub fn pairing(a: &LinComb<Word>, b: &LinComb<Word>) -> Rational {
    let (small, big) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().map(|(w, c)| c * big.coeff(w)).sum()
}

/// `[a, b] = ab - ba` in the concatenation algebra; brackets of primitives
/// are primitive.
pub fn bracket(a: &TensorPoly, b: &TensorPoly) -> Result<TensorPoly, AlgebraError> {
    concat(a, b)?.sub(&concat(b, a)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freevec::rat;

    fn w(letters: &[u8]) -> Word {
        Word(letters.to_vec())
    }

    fn poly(letters: &[u8], n: usize, d: usize) -> TensorPoly {
        TensorPoly::new(LinComb::basis(w(letters)), n, d).unwrap()
    }

    #[test]
    fn concat_examples() {
        let a = poly(&[1], 4, 2);
        let b = poly(&[2], 4, 2);
        assert_eq!(concat(&a, &b).unwrap(), poly(&[1, 2], 4, 2));
        let unit = TensorPoly::unit(4, 2);
        assert_eq!(concat(&unit, &b).unwrap(), b);
        let sum = a.add(&b).unwrap();
        let e0 = poly(&[0], 4, 2);
        let got = concat(&sum, &e0).unwrap();
        let want = poly(&[1, 0], 4, 2).add(&poly(&[2, 0], 4, 2)).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn shuffle_examples() {
        let e1 = poly(&[1], 4, 3);
        let e2 = poly(&[2], 4, 3);
        let got = shuffle(&e1, &e2).unwrap();
        assert_eq!(got, poly(&[1, 2], 4, 3).add(&poly(&[2, 1], 4, 3)).unwrap());

        let sq = shuffle(&e1, &e1).unwrap();
        assert_eq!(sq.value().coeff(&w(&[1, 1])), rat_int(2));

        // e12 sh e3: all three interleavings keeping 1 before 2.
        let e12 = poly(&[1, 2], 4, 3);
        let e3 = poly(&[3], 4, 3);
        let got = shuffle(&e12, &e3).unwrap();
        let want = poly(&[1, 2, 3], 4, 3)
            .add(&poly(&[1, 3, 2], 4, 3))
            .unwrap()
            .add(&poly(&[3, 1, 2], 4, 3))
            .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn deconcat_examples() {
        let cop = deconcat_coproduct(&w(&[1, 2]));
        assert_eq!(cop.len(), 3);
        assert_eq!(cop.coeff(&(w(&[1]), w(&[2]))), rat_int(1));
        assert_eq!(deconcat_coproduct(&Word::empty()).len(), 1);
    }

    #[test]
    fn shuffle_coproduct_examples() {
        let e1 = poly(&[1], 4, 2);
        let cop = shuffle_coproduct(&e1);
        assert_eq!(cop.coeff(&(w(&[1]), Word::empty())), rat_int(1));
        assert_eq!(cop.coeff(&(Word::empty(), w(&[1]))), rat_int(1));
        assert_eq!(cop.len(), 2);

        let e12 = poly(&[1, 2], 4, 2);
        let cop = shuffle_coproduct(&e12);
        assert_eq!(cop.coeff(&(w(&[1]), w(&[2]))), rat_int(1));
        assert_eq!(cop.coeff(&(w(&[2]), w(&[1]))), rat_int(1));
        assert_eq!(cop.len(), 4);
    }

    #[test]
    fn antipode_examples() {
        let e1 = poly(&[1], 4, 2);
        assert_eq!(antipode(&e1), e1.scaled(&rat_int(-1)));
        let e12 = poly(&[1, 2], 4, 2);
        assert_eq!(antipode(&e12), poly(&[2, 1], 4, 2));
        assert_eq!(antipode(&TensorPoly::unit(4, 2)), TensorPoly::unit(4, 2));
    }

    #[test]
    fn exp_log_roundtrip() {
        let x = poly(&[1], 2, 2);
        let g = exp_concat(&x).unwrap();
        assert_eq!(g.value().coeff(&Word::empty()), rat_int(1));
        assert_eq!(g.value().coeff(&w(&[1])), rat_int(1));
        assert_eq!(g.value().coeff(&w(&[1, 1])), rat(1, 2));

        let lie = poly(&[1], 4, 2).add(&poly(&[2], 4, 2)).unwrap();
        assert_eq!(log_concat(&exp_concat(&lie).unwrap()).unwrap(), lie);

        assert!(exp_concat(&TensorPoly::unit(3, 2)).is_err());
        assert_eq!(
            exp_concat(&TensorPoly::zero(3, 2)).unwrap(),
            TensorPoly::unit(3, 2)
        );
    }

    #[test]
    fn grouplike_and_primitive() {
        let g = exp_concat(&poly(&[1], 3, 2)).unwrap();
        assert!(is_grouplike(&g));
        let e12 = poly(&[1, 2], 4, 2);
        let e21 = poly(&[2, 1], 4, 2);
        let lie = e12.sub(&e21).unwrap();
        assert!(is_primitive(&lie));
        assert!(!is_primitive(&e12));
    }

    #[test]
    fn translation_golden() {
        // v0 = [e1, e2], u = e{0,1,2}: T_v u = e{0,1,2} + e{1,2,1,2} - e{2,1,1,2}
        let n = 4;
        let d = 2;
        let v0 = &LinComb::basis(w(&[1, 2])) - &LinComb::basis(w(&[2, 1]));
        let mut entries = vec![v0];
        entries.push(LinComb::zero());
        entries.push(LinComb::zero());
        let v = WordTranslation::new(entries, n, d).unwrap();
        assert!(v.is_special());
        let u = poly(&[0, 1, 2], n, d);
        let got = translate(&v, &u).unwrap();
        let want = poly(&[0, 1, 2], n, d)
            .add(&poly(&[1, 2, 1, 2], n, d))
            .unwrap()
            .sub(&poly(&[2, 1, 1, 2], n, d))
            .unwrap();
        assert_eq!(got, want);

        // zero translation is the identity
        let z = WordTranslation::zero(n, d);
        assert_eq!(translate(&z, &u).unwrap(), u);
    }

    #[test]
    fn translation_rejects_non_primitive() {
        let mut entries = vec![LinComb::basis(w(&[1, 2]))];
        entries.push(LinComb::zero());
        entries.push(LinComb::zero());
        assert!(matches!(
            WordTranslation::new(entries, 4, 2),
            Err(AlgebraError::NotPrimitive(0))
        ));
    }

    #[test]
    fn extraction_counts() {
        // Single letter: keep, or extract it.
        let s = extraction_s(&w(&[0]));
        assert_eq!(s.len(), 2);
        assert_eq!(s.coeff(&(vec![], w(&[0]))), rat_int(1));
        assert_eq!(s.coeff(&(vec![w(&[0])], w(&[0]))), rat_int(1));
        // Empty word: only the trivial selection.
        let s = extraction_s(&Word::empty());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn dual_translate_examples() {
        let n = 4;
        let d = 2;
        let v0 = &LinComb::basis(w(&[1, 2])) - &LinComb::basis(w(&[2, 1]));
        let v = WordTranslation::new(vec![v0, LinComb::zero(), LinComb::zero()], n, d).unwrap();

        // v = 0 acts as the identity
        let z = WordTranslation::zero(n, d);
        let y = poly(&[1, 2], n, d);
        assert_eq!(dual_translate(&z, &y).unwrap(), y);

        // <T_v e0, e12> = 1 and the dual contains e0 with coefficient 1
        let e0 = poly(&[0], n, d);
        let te0 = translate(&v, &e0).unwrap();
        assert_eq!(pairing(te0.value(), &LinComb::basis(w(&[1, 2]))), rat_int(1));
        let dual = dual_translate(&v, &poly(&[1, 2], n, d)).unwrap();
        assert_eq!(dual.value().coeff(&w(&[0])), rat_int(1));
    }

    #[test]
    fn adjointness_small() {
        let n = 3;
        let d = 2;
        let v0 = &LinComb::basis(w(&[1, 2])) - &LinComb::basis(w(&[2, 1]));
        let v = WordTranslation::new(vec![v0, LinComb::zero(), LinComb::zero()], n, d).unwrap();
        let words = words_up_to(n, d);
        for x in &words {
            let tx = translate(&v, &poly(&x.0, n, d)).unwrap();
            for y in &words {
                let lhs = tx.value().coeff(y);
                let ty = dual_translate(&v, &poly(&y.0, n, d)).unwrap();
                let rhs = ty.value().coeff(x);
                assert_eq!(lhs, rhs, "adjointness fails at x={x:?}, y={y:?}");
            }
        }
    }
}
