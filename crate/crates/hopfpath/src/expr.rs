//! Textual syntax for basis elements and their linear combinations.
//!
//! Trees are s-expressions `(label child child ...)`, forests are braced
//! multisets `{ t1 t2 ... }` (a single tree may appear bare, the unit is
//! `{}`), words are `e[0,1,2]` with `[]` for the empty word, and symbols
//! are `I(...)` products with an optional `XiN` noise factor (`1` for the
//! unit). Linear combinations read and print as `3/2*(0) + (1 (2))`; output
//! uses the same grammar as input and canonical term order throughout.

use num_traits::{One, Signed};

use crate::bhz::Symbol;
use crate::error::ParseError;
use crate::freevec::{parse_rational, LinComb, LinComb2, Rational};
use crate::tensor::Word;
use crate::tree::{Forest, LabeledTree};

pub fn print_word(w: &Word) -> String {
    if w.is_empty() {
        return "[]".into();
    }
    let inner: Vec<String> = w.letters().iter().map(|l| l.to_string()).collect();
    format!("e[{}]", inner.join(","))
}

pub fn print_tree(t: &LabeledTree) -> String {
    let mut out = format!("({}", t.label());
    for c in t.children() {
        out.push(' ');
        out.push_str(&print_tree(c));
    }
    out.push(')');
    out
}

pub fn print_forest(f: &Forest) -> String {
    match f.trees() {
        [] => "{}".into(),
        [t] => print_tree(t),
        ts => {
            let inner: Vec<String> = ts.iter().map(print_tree).collect();
            format!("{{{}}}", inner.join(" "))
        }
    }
}

pub fn print_symbol(s: &Symbol) -> String {
    if s.is_unit() {
        return "1".into();
    }
    let mut out = String::new();
    for t in s.forest().trees() {
        out.push_str(&format!("I({})", print_symbol(&crate::bhz::phi(t))));
    }
    if let Some(i) = s.tag() {
        out.push_str(&format!("Xi{i}"));
    }
    out
}

fn print_coeff(c: &Rational, key: &str, first: bool) -> String {
    let mag = c.abs();
    let body = if mag.is_one() && !key.is_empty() {
        key.to_string()
    } else if key.is_empty() {
        format!("{mag}")
    } else {
        format!("{mag}*{key}")
    };
    if first {
        if c.is_negative() {
            format!("-{body}")
        } else {
            body
        }
    } else if c.is_negative() {
        format!(" - {body}")
    } else {
        format!(" + {body}")
    }
}

pub fn print_lincomb<K: Ord>(lc: &LinComb<K>, print_key: impl Fn(&K) -> String) -> String {
    if lc.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (k, c)) in lc.iter().enumerate() {
        out.push_str(&print_coeff(c, &print_key(k), i == 0));
    }
    out
}

/// Tensor-square output: `c*(left (x) right)` terms.
pub fn print_lincomb2<K: Ord, L: Ord>(
    lc: &LinComb2<K, L>,
    print_left: impl Fn(&K) -> String,
    print_right: impl Fn(&L) -> String,
) -> String {
    if lc.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, ((k, l), c)) in lc.iter().enumerate() {
        let key = format!("({} (x) {})", print_left(k), print_right(l));
        out.push_str(&print_coeff(c, &key, i == 0));
    }
    out
}

/// A commutative monomial of basis keys, dot-separated: `(0 (1)).(2)`.
pub fn print_monomial<K>(mono: &[K], print_key: impl Fn(&K) -> String) -> String {
    if mono.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = mono.iter().map(print_key).collect();
    parts.join(".")
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src, pos: 0 }
    }

    fn bytes(&self) -> &[u8] {
        self.src.as_bytes()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes().get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.bytes().get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::new(self.pos, format!("expected '{}'", b as char)))
        }
    }

    fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn number_u8(&mut self) -> Result<u8, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.bytes()[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::new(start, "expected a label"))
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.bytes()[self.pos].is_ascii_digit()
                || self.bytes()[self.pos] == b'/'
                || self.bytes()[self.pos] == b'.')
        {
            self.pos += 1;
        }
        parse_rational(&self.src[start..self.pos])
            .ok_or_else(|| ParseError::new(start, "expected a rational"))
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn tree(&mut self) -> Result<LabeledTree, ParseError> {
        self.eat(b'(')?;
        let label = self.number_u8()?;
        let mut children = Vec::new();
        while self.peek() == Some(b'(') {
            children.push(self.tree()?);
        }
        self.eat(b')')?;
        Ok(LabeledTree::node(label, children))
    }

    fn forest(&mut self) -> Result<Forest, ParseError> {
        match self.peek() {
            Some(b'{') => {
                self.eat(b'{')?;
                let mut trees = Vec::new();
                while self.peek() == Some(b'(') {
                    trees.push(self.tree()?);
                }
                self.eat(b'}')?;
                Ok(Forest::from_trees(trees))
            }
            Some(b'(') => Ok(Forest::single(self.tree()?)),
            _ => Err(ParseError::new(self.pos, "expected a forest or a tree")),
        }
    }

    fn word(&mut self) -> Result<Word, ParseError> {
        self.skip_ws();
        if self.eat_str("e[") || self.eat_str("[") {
            let mut letters = Vec::new();
            loop {
                match self.peek() {
                    Some(b']') => {
                        self.pos += 1;
                        break;
                    }
                    Some(_) => {
                        letters.push(self.number_u8()?);
                        if self.peek() == Some(b',') {
                            self.pos += 1;
                        }
                    }
                    None => return Err(ParseError::new(self.pos, "unterminated word")),
                }
            }
            Ok(Word(letters))
        } else {
            Err(ParseError::new(self.pos, "expected a word"))
        }
    }

    fn symbol(&mut self) -> Result<Symbol, ParseError> {
        self.skip_ws();
        if self.eat_str("1") {
            return Ok(Symbol::unit());
        }
        let mut trees = Vec::new();
        let mut tag: Option<u8> = None;
        loop {
            self.skip_ws();
            if self.src[self.pos..].starts_with("I(") {
                self.pos += 2;
                let inner = self.symbol()?;
                self.eat(b')')?;
                trees.push(crate::bhz::phi_inv(&inner));
            } else if self.src[self.pos..].starts_with("Xi") {
                self.pos += 2;
                let i = self.number_u8()?;
                if i == 0 {
                    return Err(ParseError::new(self.pos, "noise labels start at 1"));
                }
                if tag.replace(i).is_some() {
                    return Err(ParseError::new(self.pos, "at most one noise factor"));
                }
            } else {
                break;
            }
        }
        if trees.is_empty() && tag.is_none() {
            return Err(ParseError::new(self.pos, "expected a symbol"));
        }
        Ok(Symbol::new(Forest::from_trees(trees), tag))
    }

    fn lincomb<K: Ord + Clone>(
        &mut self,
        mut key: impl FnMut(&mut Self) -> Result<K, ParseError>,
    ) -> Result<LinComb<K>, ParseError> {
        let mut out = LinComb::zero();
        let mut sign = Rational::one();
        self.skip_ws();
        if self.peek() == Some(b'+') {
            self.pos += 1;
        } else if self.peek() == Some(b'-') {
            sign = -sign;
            self.pos += 1;
        }
        if self.eat_str("0") && self.at_end() {
            return Ok(out);
        }
        loop {
            self.skip_ws();
            // optional coefficient
            let coeff = match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let c = self.rational()?;
                    self.skip_ws();
                    if self.peek() == Some(b'*') {
                        self.pos += 1;
                    } else {
                        return Err(ParseError::new(self.pos, "expected '*' after coefficient"));
                    }
                    c
                }
                _ => Rational::one(),
            };
            let k = key(self)?;
            out.insert_add(k, &sign * coeff);
            match self.peek() {
                Some(b'+') => {
                    sign = Rational::one();
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -Rational::one();
                    self.pos += 1;
                }
                _ => break,
            }
        }
        Ok(out)
    }
}

fn finish<T>(mut sc: Scanner, value: T) -> Result<T, ParseError> {
    if sc.at_end() {
        Ok(value)
    } else {
        Err(ParseError::new(sc.pos, "trailing input"))
    }
}

pub fn parse_tree(src: &str) -> Result<LabeledTree, ParseError> {
    let mut sc = Scanner::new(src);
    let t = sc.tree()?;
    finish(sc, t)
}

pub fn parse_forest(src: &str) -> Result<Forest, ParseError> {
    let mut sc = Scanner::new(src);
    let f = sc.forest()?;
    finish(sc, f)
}

pub fn parse_word(src: &str) -> Result<Word, ParseError> {
    let mut sc = Scanner::new(src);
    let w = sc.word()?;
    finish(sc, w)
}

pub fn parse_symbol(src: &str) -> Result<Symbol, ParseError> {
    let mut sc = Scanner::new(src);
    let s = sc.symbol()?;
    finish(sc, s)
}

pub fn parse_forest_lincomb(src: &str) -> Result<LinComb<Forest>, ParseError> {
    let mut sc = Scanner::new(src);
    let lc = sc.lincomb(|s| s.forest())?;
    finish(sc, lc)
}

pub fn parse_tree_lincomb(src: &str) -> Result<LinComb<LabeledTree>, ParseError> {
    let mut sc = Scanner::new(src);
    let lc = sc.lincomb(|s| s.tree())?;
    finish(sc, lc)
}

pub fn parse_word_lincomb(src: &str) -> Result<LinComb<Word>, ParseError> {
    let mut sc = Scanner::new(src);
    let lc = sc.lincomb(|s| s.word())?;
    finish(sc, lc)
}

pub fn parse_symbol_lincomb(src: &str) -> Result<LinComb<Symbol>, ParseError> {
    let mut sc = Scanner::new(src);
    let lc = sc.lincomb(|s| s.symbol())?;
    finish(sc, lc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freevec::rat;

    #[test]
    fn tree_and_forest_roundtrip() {
        let t = parse_tree("(0 (1) (2 (0)))").unwrap();
        assert_eq!(t.nodes(), 4);
        assert_eq!(parse_tree(&print_tree(&t)).unwrap(), t);
        // child order is irrelevant
        assert_eq!(parse_tree("(0 (2 (0)) (1))").unwrap(), t);

        let f = parse_forest("{(0) (1) (1)}").unwrap();
        assert_eq!(f.trees().len(), 3);
        assert_eq!(parse_forest(&print_forest(&f)).unwrap(), f);
        assert_eq!(parse_forest("{}").unwrap(), Forest::unit());
        assert_eq!(print_forest(&Forest::unit()), "{}");
    }

    #[test]
    fn word_roundtrip() {
        let w = parse_word("e[0,1,2]").unwrap();
        assert_eq!(w.letters(), &[0, 1, 2]);
        assert_eq!(print_word(&w), "e[0,1,2]");
        assert_eq!(parse_word("[]").unwrap(), Word::empty());
        assert_eq!(print_word(&Word::empty()), "[]");
    }

    #[test]
    fn symbol_roundtrip() {
        let s = parse_symbol("I(Xi1)I(Xi2)Xi3").unwrap();
        assert_eq!(s.tag(), Some(3));
        assert_eq!(print_symbol(&s), "I(Xi1)I(Xi2)Xi3");
        let s = parse_symbol("I(I(Xi1)Xi2)").unwrap();
        assert_eq!(print_symbol(&s), "I(I(Xi1)Xi2)");
        assert_eq!(parse_symbol("1").unwrap(), Symbol::unit());
        // the integration of nothing
        let s = parse_symbol("I(1)").unwrap();
        assert_eq!(s.nodes(), 1);
        assert_eq!(print_symbol(&s), "I(1)");
    }

    #[test]
    fn lincomb_roundtrip() {
        let lc = parse_tree_lincomb("3/2*(0) + (1 (2)) - 2*(1)").unwrap();
        assert_eq!(lc.coeff(&LabeledTree::leaf(0)), rat(3, 2));
        assert_eq!(lc.coeff(&LabeledTree::leaf(1)), rat(-2, 1));
        let printed = print_lincomb(&lc, print_tree);
        assert_eq!(parse_tree_lincomb(&printed).unwrap(), lc);
        assert_eq!(parse_word_lincomb("0").unwrap(), LinComb::zero());
        assert_eq!(print_lincomb(&LinComb::<Word>::zero(), print_word), "0");
    }
}
