use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::monomial::{self, dim_below, exponents, index};
use crate::error::{Error, Result};
use crate::linalg::{PrimeField, SparseVec};

/// The ring k[x,y]/m^N with k = F_p. `order` is N; it caps every truncation the
/// engine performs, while individual ideals are stored at their own adequacy order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncatedAlgebra {
    field: PrimeField,
    order: u32,
}

impl TruncatedAlgebra {
    pub fn new(field: PrimeField, order: u32) -> Self {
        assert!(order > 0, "truncation order must be positive");
        TruncatedAlgebra { field, order }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ambient_dim(&self) -> usize {
        dim_below(self.order)
    }

    pub fn with_order(&self, order: u32) -> Self {
        TruncatedAlgebra::new(self.field, order)
    }

    pub fn monomial(&self, i: u32, j: u32) -> PolyElement {
        self.from_terms(vec![(index(i, j), 1)])
    }

    pub fn one(&self) -> PolyElement {
        self.monomial(0, 0)
    }

    pub fn zero(&self) -> PolyElement {
        self.from_terms(Vec::new())
    }

    /// Builds an element from sorted sparse terms, truncating at degree `order`.
    pub fn from_terms(&self, terms: SparseVec) -> PolyElement {
        let limit = dim_below(self.order) as u32;
        let truncated = terms.iter().any(|&(c, _)| c >= limit);
        PolyElement {
            algebra: *self,
            terms: terms.into_iter().filter(|&(c, v)| c < limit && v != 0).collect(),
            truncated,
            source: None,
        }
    }

    pub fn parse_poly(&self, text: &str) -> Result<PolyElement> {
        let mut p = Parser::new(text, self.field);
        let terms = p.polynomial()?;
        let mut el = self.from_terms(terms);
        el.source = Some(text.trim().to_string());
        Ok(el)
    }

    /// Parses a comma-separated generator list such as `"x^2, x*y, y^2"`.
    pub fn parse_generators(&self, text: &str) -> Result<Vec<PolyElement>> {
        let mut out = Vec::new();
        let mut offset = 0;
        for piece in text.split(',') {
            let el = self.parse_poly(piece).map_err(|e| match e {
                Error::Parse { position, message } => Error::Parse {
                    position: position + offset,
                    message,
                },
                other => other,
            })?;
            out.push(el);
            offset += piece.len() + 1;
        }
        Ok(out)
    }
}

/// An element of R = k[[x,y]] known through its polynomial representative of degree < N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyElement {
    algebra: TruncatedAlgebra,
    terms: SparseVec,
    truncated: bool,
    source: Option<String>,
}

impl PolyElement {
    pub fn algebra(&self) -> TruncatedAlgebra {
        self.algebra
    }

    pub fn terms(&self) -> &SparseVec {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether parsing dropped terms of degree >= N.
    pub fn was_truncated(&self) -> bool {
        self.truncated
    }

    pub fn source_text(&self) -> Option<&str> {
        self.source.as_deref()
    }

    /// Least degree of a term (the m-adic order); `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.first().map(|&(c, _)| monomial::degree_of(c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|&(c, _)| monomial::degree_of(c))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Dense coordinates in the full truncation k[x,y]/m^N.
    pub fn coords(&self) -> Vec<u32> {
        let mut v = vec![0; self.algebra.ambient_dim()];
        for &(c, val) in &self.terms {
            v[c as usize] = val;
        }
        v
    }

    /// Terms of degree < `order`.
    pub fn truncated_terms(&self, order: u32) -> SparseVec {
        let limit = dim_below(order) as u32;
        self.terms.iter().copied().take_while(|&(c, _)| c < limit).collect()
    }

    /// Product truncated at degree `order` (at most N).
    pub fn mul_trunc(&self, other: &PolyElement, order: u32) -> PolyElement {
        let f = self.algebra.field();
        let order = order.min(self.algebra.order);
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for &(c1, v1) in &self.terms {
            let (i1, j1) = exponents(c1);
            if i1 + j1 >= order {
                break;
            }
            for &(c2, v2) in &other.terms {
                let (i2, j2) = exponents(c2);
                if i1 + j1 + i2 + j2 >= order {
                    break;
                }
                let e = acc.entry(index(i1 + i2, j1 + j2)).or_insert(0);
                *e = f.add(*e, f.mul(v1, v2));
            }
        }
        PolyElement {
            algebra: self.algebra,
            terms: acc.into_iter().filter(|&(_, v)| v != 0).collect(),
            truncated: false,
            source: None,
        }
    }

    pub fn mul(&self, other: &PolyElement) -> PolyElement {
        self.mul_trunc(other, self.algebra.order)
    }

    pub fn pow_trunc(&self, k: u32, order: u32) -> PolyElement {
        let mut acc = self.algebra.one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_trunc(&base, order);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_trunc(&base, order);
            }
        }
        acc
    }

    pub fn pow(&self, k: u32) -> PolyElement {
        self.pow_trunc(k, self.algebra.order)
    }

    pub fn scale(&self, c: u32) -> PolyElement {
        let f = self.algebra.field();
        let terms = self.terms.iter().map(|&(m, v)| (m, f.mul(v, c))).filter(|&(_, v)| v != 0).collect();
        PolyElement {
            algebra: self.algebra,
            terms,
            truncated: false,
            source: None,
        }
    }

    pub fn add(&self, other: &PolyElement) -> PolyElement {
        let f = self.algebra.field();
        let mut acc: BTreeMap<u32, u32> = self.terms.iter().copied().collect();
        for &(c, v) in &other.terms {
            let e = acc.entry(c).or_insert(0);
            *e = f.add(*e, v);
        }
        PolyElement {
            algebra: self.algebra,
            terms: acc.into_iter().filter(|&(_, v)| v != 0).collect(),
            truncated: false,
            source: None,
        }
    }
}

impl fmt::Display for PolyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = self.algebra.field();
        for (n, &(c, v)) in self.terms.iter().enumerate() {
            let s = field.to_signed(v);
            let mag = s.unsigned_abs();
            if n == 0 {
                if s < 0 {
                    write!(f, "-")?;
                }
            } else if s < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = monomial::format_monomial(c);
            match (mag, mono.as_str()) {
                (m, "1") => write!(f, "{m}")?,
                (1, m) => write!(f, "{m}")?,
                (m, mono) => write!(f, "{m}*{mono}")?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: PrimeField,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, field: PrimeField) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            field,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn small_int(&mut self) -> Result<u32> {
        let at = self.pos;
        let d = self.digits()?;
        d.parse::<u32>().map_err(|_| Error::Parse {
            position: at,
            message: "exponent too large".into(),
        })
    }

    fn polynomial(&mut self) -> Result<SparseVec> {
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        let f = self.field;
        let mut first = true;
        loop {
            let mut negative = false;
            match self.peek() {
                Some(b'+') if !first => self.pos += 1,
                Some(b'-') => {
                    self.pos += 1;
                    negative = true;
                }
                None if first => return self.err("empty polynomial"),
                _ if !first => return self.err("expected '+' or '-'"),
                _ => {}
            }
            let (c, mono) = self.term()?;
            let c = if negative { f.neg(c) } else { c };
            let e = acc.entry(mono).or_insert(0);
            *e = f.add(*e, c);
            first = false;
            if self.peek().is_none() {
                break;
            }
        }
        Ok(acc.into_iter().filter(|&(_, v)| v != 0).collect())
    }

    fn term(&mut self) -> Result<(u32, u32)> {
        let f = self.field;
        let mut coef = 1u32;
        let (mut i, mut j) = (0u32, 0u32);
        loop {
            match self.peek() {
                Some(b'x') | Some(b'y') => {
                    let var = self.src[self.pos];
                    self.pos += 1;
                    let e = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.small_int()?
                    } else {
                        1
                    };
                    if var == b'x' {
                        i += e;
                    } else {
                        j += e;
                    }
                }
                Some(b'(') => {
                    self.pos += 1;
                    let d = self.digits()?;
                    coef = f.mul(coef, f.from_decimal(d));
                    if self.peek() != Some(b')') {
                        return self.err("expected ')'");
                    }
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_digit() => {
                    let d = self.digits()?;
                    coef = f.mul(coef, f.from_decimal(d));
                }
                Some(_) => return self.err("expected coefficient, 'x' or 'y'"),
                None => return self.err("unexpected end of input"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((coef, index(i, j)))
    }
}
