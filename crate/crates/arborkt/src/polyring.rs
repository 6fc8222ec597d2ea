//! Exact multivariate polynomial arithmetic over the rationals.
//!
//! All coefficients are arbitrary-precision rationals; there is no floating
//! point anywhere. The monomial order is degree-reverse-lexicographic with
//! respect to the declared variable order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// The coefficient ring `O = K[x_1..x_n]` is identified by its variable list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ring {
    vars: Vec<String>,
}

impl Ring {
    pub fn new(vars: Vec<String>) -> Arc<Ring> {
        assert!(!vars.is_empty(), "ring needs at least one variable");
        Arc::new(Ring { vars })
    }

    /// Convenience constructor from a comma separated list, e.g. `"x,y,z"`.
    pub fn from_names(names: &str) -> Arc<Ring> {
        Ring::new(names.split(',').map(|s| s.trim().to_string()).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

/// A monomial, stored as one exponent per ring variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Monomial {
        Monomial { exps }
    }

    pub fn one(num_vars: usize) -> Monomial {
        Monomial {
            exps: vec![0; num_vars],
        }
    }

    pub fn var(num_vars: usize, idx: usize) -> Monomial {
        let mut exps = vec![0; num_vars];
        exps[idx] = 1;
        Monomial { exps }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        assert_eq!(self.exps.len(), other.exps.len());
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// Componentwise max of exponents.
    pub fn lcm(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.min(b))
                .collect(),
        }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(a, b)| *a == 0 || *b == 0)
    }

    /// `self / other`, or `None` when some exponent of `other` exceeds ours.
    pub fn quotient(&self, other: &Monomial) -> Option<Monomial> {
        assert_eq!(self.exps.len(), other.exps.len());
        if !other.divides(self) {
            return None;
        }
        Some(Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// Degree-reverse-lexicographic order with the declared variable order.
impl Ord for Monomial {
    fn cmp(&self, other: &Monomial) -> Ordering {
        assert_eq!(
            self.exps.len(),
            other.exps.len(),
            "monomials from different rings"
        );
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Same total degree: the larger monomial has the *smaller* exponent
        // in the last position where they differ.
        for i in (0..self.exps.len()).rev() {
            match self.exps[i].cmp(&other.exps[i]) {
                Ordering::Equal => continue,
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Monomial) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Checked lcm of two monomials from possibly different rings.
pub fn monomial_lcm(ring: &Arc<Ring>, m1: &Monomial, m2: &Monomial) -> Result<Monomial> {
    check_arity(ring, m1)?;
    check_arity(ring, m2)?;
    Ok(m1.lcm(m2))
}

/// Checked quotient; `Ok(None)` means "not divisible", which is a value.
pub fn monomial_quotient(
    ring: &Arc<Ring>,
    m1: &Monomial,
    m2: &Monomial,
) -> Result<Option<Monomial>> {
    check_arity(ring, m1)?;
    check_arity(ring, m2)?;
    Ok(m1.quotient(m2))
}

fn check_arity(ring: &Arc<Ring>, m: &Monomial) -> Result<()> {
    if m.exps.len() != ring.num_vars() {
        return Err(Error::RingMismatch(format!(
            "monomial has {} exponents, ring has {} variables",
            m.exps.len(),
            ring.num_vars()
        )));
    }
    Ok(())
}

/// Exact polynomial: a map from monomials to nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Arc<Ring>,
    // Sorted ascending in the monomial order; the leading term is last.
    terms: Vec<(Monomial, BigRational)>,
}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Poly {
        Poly {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Poly {
        Poly::constant(ring, BigRational::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(ring);
        }
        Poly {
            ring: ring.clone(),
            terms: vec![(Monomial::one(ring.num_vars()), c)],
        }
    }

    pub fn from_int(ring: &Arc<Ring>, n: i64) -> Poly {
        Poly::constant(ring, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(ring: &Arc<Ring>, idx: usize) -> Poly {
        Poly::monomial(
            ring,
            Monomial::var(ring.num_vars(), idx),
            BigRational::one(),
        )
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(ring);
        }
        assert_eq!(m.exponents().len(), ring.num_vars());
        Poly {
            ring: ring.clone(),
            terms: vec![(m, c)],
        }
    }

    pub fn from_terms(ring: &Arc<Ring>, mut terms: Vec<(Monomial, BigRational)>) -> Poly {
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Monomial, BigRational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            if let Some(last) = merged.last_mut() {
                if last.0 == m {
                    last.1 += c;
                    if last.1.is_zero() {
                        merged.pop();
                    }
                    continue;
                }
            }
            merged.push((m, c));
        }
        Poly {
            ring: ring.clone(),
            terms: merged,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> &[(Monomial, BigRational)] {
        &self.terms
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.last().map(|(m, c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        match self.terms.binary_search_by(|(t, _)| t.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    /// Value at the origin: the coefficient of the constant monomial.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .first()
            .filter(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// True when every monomial of the polynomial has positive degree.
    pub fn in_maximal_ideal(&self) -> bool {
        self.constant_term().is_zero()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert!(self.ring == other.ring, "ring mismatch");
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Poly::from_terms(&self.ring, terms)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert!(self.ring == other.ring, "ring mismatch");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                terms.push((m1.mul(m2), c1 * c2));
            }
        }
        Poly::from_terms(&self.ring, terms)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect(),
        }
    }

    /// Checked arithmetic entry points used by callers handling foreign input.
    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_same_ring(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_same_ring(other)?;
        Ok(self.mul(other))
    }

    fn check_same_ring(&self, other: &Poly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "[{}] vs [{}]",
                self.ring.vars().join(","),
                other.ring.vars().join(",")
            )));
        }
        Ok(())
    }

    /// Parse the textual syntax, e.g. `x^2*y - 3*z` or `-1/2*x*y`.
    pub fn parse(ring: &Arc<Ring>, input: &str) -> Result<Poly> {
        Parser::new(ring, input)?.parse_poly()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Print leading term first.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(format_rational(&abs));
            }
            for (v, &e) in self.ring.vars().iter().zip(m.exponents()) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{}^{}", v, e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

struct Parser<'a> {
    ring: Arc<Ring>,
    tokens: Vec<Token>,
    pos: usize,
    input: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Int(BigInt),
    Ident(String),
}

impl<'a> Parser<'a> {
    fn new(ring: &Arc<Ring>, input: &'a str) -> Result<Parser<'a>> {
        let mut tokens = Vec::new();
        let bytes: Vec<char> = input.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    tokens.push(Token::Plus);
                    i += 1;
                }
                '-' => {
                    tokens.push(Token::Minus);
                    i += 1;
                }
                '*' => {
                    tokens.push(Token::Star);
                    i += 1;
                }
                '^' => {
                    tokens.push(Token::Caret);
                    i += 1;
                }
                '/' => {
                    tokens.push(Token::Slash);
                    i += 1;
                }
                '(' => {
                    tokens.push(Token::LParen);
                    i += 1;
                }
                ')' => {
                    tokens.push(Token::RParen);
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = bytes[start..i].iter().collect();
                    tokens.push(Token::Int(s.parse().unwrap()));
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                        i += 1;
                    }
                    tokens.push(Token::Ident(bytes[start..i].iter().collect()));
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character `{}` at byte {} in `{}`",
                        other, i, input
                    )))
                }
            }
        }
        Ok(Parser {
            ring: ring.clone(),
            tokens,
            pos: 0,
            input,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_poly(&mut self) -> Result<Poly> {
        let p = self.parse_sum()?;
        if self.pos != self.tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{}`", self.input)));
        }
        Ok(p)
    }

    fn parse_sum(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.bump();
                self.parse_product()?.neg()
            }
            Some(Token::Plus) => {
                self.bump();
                self.parse_product()?
            }
            _ => self.parse_product()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = acc.add(&self.parse_product()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.parse_product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_product(&mut self) -> Result<Poly> {
        let mut acc = self.parse_power()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    acc = acc.mul(&self.parse_power()?);
                }
                Some(Token::Slash) => {
                    // Only rational coefficient literals: numerator and
                    // denominator must both be constants.
                    self.bump();
                    let d = self.parse_power()?;
                    let dc = constant_of(&d).ok_or_else(|| {
                        Error::Parse(format!("non-constant denominator in `{}`", self.input))
                    })?;
                    if dc.is_zero() {
                        return Err(Error::Parse("division by zero".into()));
                    }
                    acc = acc.scale(&dc.recip());
                }
                // Implicit multiplication: `3x`, `x y`, `2(x+y)`.
                Some(Token::Ident(_)) | Some(Token::Int(_)) | Some(Token::LParen) => {
                    acc = acc.mul(&self.parse_power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_power(&mut self) -> Result<Poly> {
        let base = self.parse_atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.bump();
            match self.bump() {
                Some(Token::Int(n)) => {
                    let e: u32 = n.try_into().map_err(|_| {
                        Error::Parse(format!("exponent out of range in `{}`", self.input))
                    })?;
                    let mut acc = Poly::one(&self.ring);
                    for _ in 0..e {
                        acc = acc.mul(&base);
                    }
                    Ok(acc)
                }
                _ => Err(Error::Parse(format!(
                    "expected exponent in `{}`",
                    self.input
                ))),
            }
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<Poly> {
        match self.bump() {
            Some(Token::Int(n)) => Ok(Poly::constant(&self.ring, BigRational::from_integer(n))),
            Some(Token::Ident(name)) => {
                let idx = self
                    .ring
                    .var_index(&name)
                    .ok_or(Error::UnknownVariable(name))?;
                Ok(Poly::var(&self.ring, idx))
            }
            Some(Token::LParen) => {
                let inner = self.parse_sum()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Parse(format!("missing `)` in `{}`", self.input))),
                }
            }
            other => Err(Error::Parse(format!(
                "unexpected token {:?} in `{}`",
                other, self.input
            ))),
        }
    }
}

fn constant_of(p: &Poly) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    if p.num_terms() == 1 && p.terms()[0].0.is_one() {
        return Some(p.terms()[0].1.clone());
    }
    None
}
