//! Sparse multivariate polynomials with exact rational coefficients, just
//! enough for symbolic elementary differentials: arithmetic, partial
//! derivatives, and evaluation.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::bhz::rational_to_f64;
use crate::error::ParseError;
use crate::freevec::{parse_rational, Rational};

/// A polynomial in `vars` variables: exponent vector -> coefficient.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: usize) -> Self {
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational, vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars], c);
        }
        MultiPoly { vars, terms }
    }

    pub fn var(i: usize, vars: usize) -> Self {
        assert!(i < vars);
        let mut exp = vec![0; vars];
        exp[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(exp, Rational::one());
        MultiPoly { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert_add(&mut self, exp: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
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

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars);
        }
        MultiPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = MultiPoly::zero(self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert_add(exp, ca * cb);
            }
        }
        out
    }

    /// Partial derivative in variable `i`.
    pub fn partial(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[i] -= 1;
            out.insert_add(exp, c * Rational::from_integer((e[i] as i64).into()));
        }
        out
    }

    pub fn eval_f64(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.vars);
        let mut out = 0.0;
        for (e, c) in &self.terms {
            let mut m = rational_to_f64(c);
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    m *= y[i];
                }
            }
            out += m;
        }
        out
    }

    pub fn eval_rational(&self, y: &[Rational]) -> Rational {
        debug_assert_eq!(y.len(), self.vars);
        let mut out = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    m *= &y[i];
                }
            }
            out += m;
        }
        out
    }

    /// Parses `1/2*y1^2*y2 - y3 + 3` with variables `y1..y<vars>`.
    pub fn parse(src: &str, vars: usize) -> Result<MultiPoly, ParseError> {
        let mut out = MultiPoly::zero(vars);
        let bytes = src.as_bytes();
        let mut pos = 0usize;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let mut sign = Rational::one();
        skip_ws(&mut pos);
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            if bytes[pos] == b'-' {
                sign = -sign;
            }
            pos += 1;
        }
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(ParseError::new(pos, "expected a term"));
            }
            // one term: factors joined by '*'
            let mut coeff = sign.clone();
            let mut exp = vec![0u32; vars];
            loop {
                skip_ws(&mut pos);
                let start = pos;
                if pos < bytes.len() && (bytes[pos] == b'y' || bytes[pos] == b'Y') {
                    pos += 1;
                    let dstart = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let idx: usize = src[dstart..pos]
                        .parse()
                        .map_err(|_| ParseError::new(dstart, "expected variable index"))?;
                    if idx == 0 || idx > vars {
                        return Err(ParseError::new(start, format!("variable y{idx} out of range 1..={vars}")));
                    }
                    let mut power = 1u32;
                    skip_ws(&mut pos);
                    if pos < bytes.len() && bytes[pos] == b'^' {
                        pos += 1;
                        skip_ws(&mut pos);
                        let pstart = pos;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                        power = src[pstart..pos]
                            .parse()
                            .map_err(|_| ParseError::new(pstart, "expected exponent"))?;
                    }
                    exp[idx - 1] += power;
                } else {
                    // a numeric factor
                    while pos < bytes.len()
                        && (bytes[pos].is_ascii_digit() || bytes[pos] == b'/' || bytes[pos] == b'.')
                    {
                        pos += 1;
                    }
                    if pos == start {
                        return Err(ParseError::new(pos, "expected a factor"));
                    }
                    let c = parse_rational(&src[start..pos])
                        .ok_or_else(|| ParseError::new(start, "bad number"))?;
                    coeff *= c;
                }
                skip_ws(&mut pos);
                if pos < bytes.len() && bytes[pos] == b'*' {
                    pos += 1;
                    continue;
                }
                break;
            }
            out.insert_add(exp, coeff);
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                break;
            }
            sign = match bytes[pos] {
                b'+' => Rational::one(),
                b'-' => -Rational::one(),
                _ => return Err(ParseError::new(pos, "expected '+' or '-'")),
            };
            pos += 1;
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        use num_traits::Signed;
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let is_const = e.iter().all(|&p| p == 0);
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if is_const || !mag.is_one() {
                write!(f, "{mag}")?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut first = true;
            for (j, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "y{}", j + 1)?;
                if p > 1 {
                    write!(f, "^{p}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freevec::rat;

    #[test]
    fn arithmetic_and_derivative() {
        let y1 = MultiPoly::var(0, 2);
        let y2 = MultiPoly::var(1, 2);
        let p = y1.mul(&y1).add(&y2.scaled(&rat(1, 2)));
        assert_eq!(p.partial(0), y1.scaled(&rat(2, 1)));
        assert_eq!(p.partial(1), MultiPoly::constant(rat(1, 2), 2));
        assert_eq!(p.eval_f64(&[2.0, 4.0]), 6.0);
        assert_eq!(p.eval_rational(&[rat(2, 1), rat(4, 1)]), rat(6, 1));
    }

    #[test]
    fn parse_roundtrip() {
        let p = MultiPoly::parse("1/2*y1^2*y2 - y2 + 3", 2).unwrap();
        assert_eq!(p.eval_rational(&[rat(2, 1), rat(3, 1)]), rat(6, 1));
        let q = MultiPoly::parse(&p.to_string(), 2).unwrap();
        assert_eq!(p, q);
        assert!(MultiPoly::parse("y3", 2).is_err());
        assert!(MultiPoly::parse("y1 +", 2).is_err());
        assert_eq!(
            MultiPoly::parse("-0.5*y1", 1).unwrap(),
            MultiPoly::var(0, 1).scaled(&rat(-1, 2))
        );
    }
}
