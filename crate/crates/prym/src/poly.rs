//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are edge-length symbols (edge ids of a base graph). Terms are
//! kept in graded-lex order over the sorted variable names, which makes the
//! string rendering canonical and byte-stable.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Exponent vector, sparse: absent variables have exponent zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(BTreeMap<String, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(BTreeMap::new())
    }

    pub fn var(name: &str) -> Self {
        Self::var_pow(name, 1)
    }

    pub fn var_pow(name: &str, exp: u32) -> Self {
        let mut m = BTreeMap::new();
        if exp > 0 {
            m.insert(name.to_string(), exp);
        }
        Monomial(m)
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(v, &e)| (v.as_str(), e))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            *m.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(m)
    }

    /// Exact monomial quotient, or None if some exponent would go negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut m = self.0.clone();
        for (v, e) in &other.0 {
            let slot = m.get_mut(v)?;
            if *slot < *e {
                return None;
            }
            *slot -= e;
            if *slot == 0 {
                m.remove(v);
            }
        }
        Some(Monomial(m))
    }
}

// Graded lex: total degree first, then lexicographic on the exponent
// vectors with variables in sorted name order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter();
        let mut b = other.0.iter();
        let (mut na, mut nb) = (a.next(), b.next());
        loop {
            match (na, nb) {
                (None, None) => return Ordering::Equal,
                // remaining exponents in the other monomial sit on later
                // variables, so the side that ran out is lex-smaller there
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    // earlier variable with positive exponent wins lex
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            na = a.next();
                            nb = b.next();
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    // invariant: no zero coefficients stored
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        MultiPoly { terms }
    }

    pub fn var(name: &str) -> Self {
        Self::term(BigRational::one(), Monomial::var(name))
    }

    pub fn term(coeff: BigRational, monomial: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(monomial, coeff);
        }
        MultiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Total degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .terms
            .keys()
            .flat_map(|m| m.exponents().map(|(v, _)| v.to_string()))
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    fn insert(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Exact substitution. Every variable of the polynomial must be assigned.
    pub fn eval(&self, assignment: &BTreeMap<String, BigRational>) -> Result<BigRational, Error> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.exponents() {
                let val = assignment
                    .get(v)
                    .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                for _ in 0..e {
                    t *= val;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Exact division: returns r with self = q * r, or an error if the
    /// division leaves a remainder.
    pub fn exact_div(&self, q: &MultiPoly) -> Result<MultiPoly, Error> {
        if q.is_zero() {
            return Err(Error::NotDivisible);
        }
        let (lm, lc) = q.leading().expect("nonzero divisor");
        let mut rem = self.clone();
        let mut out = MultiPoly::zero();
        loop {
            let t = match rem.leading() {
                None => break,
                Some((rm, rc)) => {
                    let m = rm.div(lm).ok_or(Error::NotDivisible)?;
                    MultiPoly::term(rc / lc, m)
                }
            };
            rem = rem.sub(&t.mul(q));
            out = out.add(&t);
        }
        Ok(out)
    }

    /// 2^k as a rational, k possibly negative.
    pub fn pow2(k: i64) -> BigRational {
        let two = BigInt::from(2);
        if k >= 0 {
            BigRational::from(two.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), two.pow((-k) as u32))
        }
    }

    /// Canonical string form: terms in descending graded-lex order.
    pub fn render(&self) -> String {
        format!("{self}")
    }

    /// Parses the canonical string form (also accepts '-' separators,
    /// explicit '^' powers, and bare rational constants).
    pub fn parse(input: &str) -> Result<MultiPoly, Error> {
        Parser { chars: input.chars().peekable() }.parse_poly()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
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
            if !abs.is_one() || m.degree() == 0 {
                factors.push(abs.to_string());
            }
            for (v, e) in m.exponents() {
                if e == 1 {
                    factors.push(v.to_string());
                } else {
                    factors.push(format!("{v}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn parse_poly(&mut self) -> Result<MultiPoly, Error> {
        let mut out = MultiPoly::zero();
        self.skip_ws();
        let mut sign = BigRational::one();
        if let Some(&'-') = self.chars.peek() {
            self.chars.next();
            sign = -sign;
        } else if let Some(&'+') = self.chars.peek() {
            self.chars.next();
        }
        loop {
            let term = self.parse_term()?;
            out = out.add(&term.scale(&sign));
            self.skip_ws();
            match self.chars.next() {
                None => return Ok(out),
                Some('+') => sign = BigRational::one(),
                Some('-') => sign = -BigRational::one(),
                Some(c) => return Err(Error::Parse(format!("unexpected character '{c}'"))),
            }
            self.skip_ws();
        }
    }

    fn parse_term(&mut self) -> Result<MultiPoly, Error> {
        let mut coeff = BigRational::one();
        let mut mono = Monomial::one();
        loop {
            self.skip_ws();
            match self.chars.peek() {
                Some(c) if c.is_ascii_digit() => {
                    coeff *= self.parse_rational()?;
                }
                Some(c) if c.is_alphabetic() || *c == '_' => {
                    let name = self.parse_ident();
                    let exp = if let Some(&'^') = { self.skip_ws(); self.chars.peek() } {
                        self.chars.next();
                        self.skip_ws();
                        self.parse_uint()?
                    } else {
                        1
                    };
                    mono = mono.mul(&Monomial::var_pow(&name, exp));
                }
                _ => return Err(Error::Parse("expected term".into())),
            }
            self.skip_ws();
            if let Some(&'*') = self.chars.peek() {
                self.chars.next();
            } else {
                break;
            }
        }
        Ok(MultiPoly::term(coeff, mono))
    }

    fn parse_ident(&mut self) -> String {
        let mut s = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_alphanumeric() || *c == '_') {
            s.push(self.chars.next().unwrap());
        }
        s
    }

    fn parse_uint(&mut self) -> Result<u32, Error> {
        let mut s = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            s.push(self.chars.next().unwrap());
        }
        s.parse().map_err(|_| Error::Parse("bad exponent".into()))
    }

    fn parse_rational(&mut self) -> Result<BigRational, Error> {
        let mut num = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            num.push(self.chars.next().unwrap());
        }
        let n: BigInt = num.parse().map_err(|_| Error::Parse("bad number".into()))?;
        self.skip_ws();
        if let Some(&'/') = self.chars.peek() {
            self.chars.next();
            self.skip_ws();
            let mut den = String::new();
            while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
                den.push(self.chars.next().unwrap());
            }
            let d: BigInt = den.parse().map_err(|_| Error::Parse("bad denominator".into()))?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from(n))
        }
    }
}

/// Fraction-free (Bareiss) determinant over the polynomial ring. All
/// interior divisions are exact.
pub fn det(mut m: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut sign = false;
    let mut prev = MultiPoly::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return MultiPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num
                    .exact_div(&prev)
                    .expect("Bareiss division is exact over an integral domain");
            }
        }
        for i in k + 1..n {
            m[i][k] = MultiPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        d.neg()
    } else {
        d
    }
}
