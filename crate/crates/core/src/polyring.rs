//! The standard graded polynomial ring over GF(p), its monomials in graded
//! reverse-lexicographic order, and sparse polynomials.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::linal::PrimeField;

/// Largest total degree accepted from user input.
pub const MAX_DEGREE: u32 = 10_000;

pub type Exponents = SmallVec<[u16; 8]>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Exponents,
    degree: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { exps: SmallVec::from_elem(0, nvars), degree: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exponents(exps: &[u16]) -> Result<Self> {
        let degree: u64 = exps.iter().map(|&e| e as u64).sum();
        if degree > MAX_DEGREE as u64 {
            return Err(Error::DegreeOverflow(degree as i64));
        }
        Ok(Monomial { exps: exps.into(), degree: degree as u32 })
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps, degree: self.degree + other.degree }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        let exps = other.exps.iter().zip(&self.exps).map(|(a, b)| a - b).collect();
        Some(Monomial { exps, degree: other.degree - self.degree })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps: Exponents = self.exps.iter().zip(&other.exps).map(|(&a, &b)| a.max(b)).collect();
        let degree = exps.iter().map(|&e| e as u32).sum();
        Monomial { exps, degree }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(&a, &b)| a == 0 || b == 0)
    }

    /// Graded reverse lexicographic comparison; `Greater` means "leads".
    pub fn grevlex_cmp(&self, other: &Monomial) -> Ordering {
        match self.degree.cmp(&other.degree) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.exps.iter().rev().zip(other.exps.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                // smaller exponent in the last differing variable wins
                o => return o.reverse(),
            }
        }
        Ordering::Equal
    }

    pub fn try_grevlex_cmp(&self, other: &Monomial) -> Result<Ordering> {
        if self.nvars() != other.nvars() {
            return Err(Error::VariableMismatch(self.nvars(), other.nvars()));
        }
        Ok(self.grevlex_cmp(other))
    }

    /// All monomials of total degree `d` in `nvars` variables, in descending order.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps: Exponents = SmallVec::from_elem(0, nvars);
        fn rec(i: usize, left: u32, exps: &mut Exponents, out: &mut Vec<Monomial>, d: u32) {
            let n = exps.len();
            if i + 1 == n {
                exps[i] = left as u16;
                out.push(Monomial { exps: exps.clone(), degree: d });
                return;
            }
            for e in (0..=left).rev() {
                exps[i] = e as u16;
                rec(i + 1, left - e, exps, out, d);
            }
            exps[i] = 0;
        }
        if nvars == 0 {
            if d == 0 {
                out.push(Monomial { exps, degree: 0 });
            }
            return out;
        }
        rec(0, d, &mut exps, &mut out, d);
        out.sort_by(|a, b| b.grevlex_cmp(a));
        out
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        parts.join("*")
    }
}

/// Sparse polynomial; terms sorted descending in grevlex, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    terms: Vec<(Monomial, u32)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(field: &PrimeField, nvars: usize, c: i64) -> Self {
        Self::monomial(Monomial::one(nvars), field.from_i64(c))
    }

    pub fn monomial(m: Monomial, c: u32) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), 1)
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms(field: &PrimeField, mut terms: Vec<(Monomial, u32)>) -> Self {
        terms.sort_by(|a, b| b.0.grevlex_cmp(&a.0));
        let mut out: Vec<(Monomial, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = field.add(*lc, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        Polynomial { terms: out }
    }

    /// Terms must already be sorted, distinct and nonzero.
    pub(crate) fn from_sorted_unchecked(terms: Vec<(Monomial, u32)>) -> Self {
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, u32)> {
        self.terms.first()
    }

    /// Total degree when homogeneous; `None` for zero or inhomogeneous input.
    pub fn degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.degree();
        self.terms.iter().all(|(m, _)| m.degree() == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Constant term value if the polynomial is a constant (zero included).
    pub fn as_constant(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if m.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn add(&self, field: &PrimeField, other: &Polynomial) -> Polynomial {
        self.combine(field, other, 1)
    }

    pub fn sub(&self, field: &PrimeField, other: &Polynomial) -> Polynomial {
        self.combine(field, other, field.neg(1))
    }

    /// `self + c * other`
    pub fn combine(&self, field: &PrimeField, other: &Polynomial, c: u32) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.grevlex_cmp(&b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let v = field.mul(c, other.terms[j].1);
                    if v != 0 {
                        out.push((other.terms[j].0.clone(), v));
                    }
                    j += 1;
                }
                Ordering::Equal => {
                    let v = field.add(self.terms[i].1, field.mul(c, other.terms[j].1));
                    if v != 0 {
                        out.push((self.terms[i].0.clone(), v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Polynomial { terms: out }
    }

    pub fn neg(&self, field: &PrimeField) -> Polynomial {
        self.scale(field, field.neg(1))
    }

    pub fn scale(&self, field: &PrimeField, c: u32) -> Polynomial {
        if c == 0 {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, a)| (m.clone(), field.mul(*a, c))).collect() }
    }

    /// Multiplication by a term keeps the order, so no re-sorting is needed.
    pub fn mul_term(&self, field: &PrimeField, m: &Monomial, c: u32) -> Polynomial {
        if c == 0 {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(t, a)| (t.mul(m), field.mul(*a, c))).collect() }
    }

    pub fn mul(&self, field: &PrimeField, other: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for (m, c) in &other.terms {
            acc = acc.add(field, &self.mul_term(field, m, *c));
        }
        acc
    }

    pub fn pow(&self, field: &PrimeField, nvars: usize, e: u32) -> Polynomial {
        let mut acc = Polynomial::monomial(Monomial::one(nvars), 1);
        for _ in 0..e {
            acc = acc.mul(field, self);
        }
        acc
    }

    pub fn fmt_with(&self, field: &PrimeField, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let c = field.to_signed(*c);
            let (neg, a) = (c < 0, c.unsigned_abs());
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&a.to_string());
            } else if a == 1 {
                s.push_str(&m.fmt_with(names));
            } else {
                s.push_str(&format!("{}*{}", a, m.fmt_with(names)));
            }
        }
        s
    }
}

#[derive(Debug)]
pub struct RingData {
    field: PrimeField,
    names: Vec<String>,
    ideal_gens: Vec<Polynomial>,
    ideal_gb: Vec<Polynomial>,
}

/// The graded ring `S = k[x_0..x_n]`, or a quotient `S/I` by a homogeneous ideal.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field && self.0.names == other.0.names && self.0.ideal_gb == other.0.ideal_gb)
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn polynomial(field: PrimeField, names: Vec<String>) -> Result<Ring> {
        if names.is_empty() {
            return Err(Error::Domain("a ring needs at least one variable".into()));
        }
        Ok(Ring(Arc::new(RingData { field, names, ideal_gens: Vec::new(), ideal_gb: Vec::new() })))
    }

    /// `k[x0..x{nvars-1}]` over GF(p).
    pub fn standard(p: u64, nvars: usize) -> Result<Ring> {
        let names = (0..nvars).map(|i| format!("x{i}")).collect();
        Ring::polynomial(PrimeField::new(p)?, names)
    }

    pub(crate) fn with_ideal(&self, gens: Vec<Polynomial>, gb: Vec<Polynomial>) -> Ring {
        Ring(Arc::new(RingData { field: self.0.field, names: self.0.names.clone(), ideal_gens: gens, ideal_gb: gb }))
    }

    pub fn field(&self) -> &PrimeField {
        &self.0.field
    }

    pub fn nvars(&self) -> usize {
        self.0.names.len()
    }

    /// `n` in `P^n`.
    pub fn projective_dimension(&self) -> i32 {
        self.nvars() as i32 - 1
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn is_quotient(&self) -> bool {
        !self.0.ideal_gb.is_empty()
    }

    pub fn ideal_generators(&self) -> &[Polynomial] {
        &self.0.ideal_gens
    }

    /// Reduced Groebner basis of the defining ideal (empty for `S`).
    pub fn ideal_gb(&self) -> &[Polynomial] {
        &self.0.ideal_gb
    }

    /// The polynomial ring this ring is a quotient of.
    pub fn ambient(&self) -> Ring {
        if !self.is_quotient() {
            return self.clone();
        }
        self.with_ideal(Vec::new(), Vec::new())
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(self.nvars(), i)
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::monomial(Monomial::one(self.nvars()), 1)
    }

    pub fn format(&self, f: &Polynomial) -> String {
        f.fmt_with(self.field(), self.names())
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial> {
        let (f, used) = self.parse_prefix(text)?;
        if text[used..].trim().is_empty() {
            Ok(f)
        } else {
            Err(Error::Parse { offset: used, msg: format!("unexpected `{}`", text[used..].trim()) })
        }
    }

    /// Parses the longest polynomial expression at the start of `text`,
    /// returning it with the number of bytes consumed.
    pub fn parse_prefix(&self, text: &str) -> Result<(Polynomial, usize)> {
        let mut p = PolyParser { ring: self, src: text, pos: 0 };
        let f = p.expr()?;
        Ok((f, p.pos))
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})[{}]", self.field().characteristic(), self.names().join(","))?;
        if self.is_quotient() {
            let gens: Vec<String> = self.ideal_generators().iter().map(|g| self.format(g)).collect();
            write!(f, "/({})", gens.join(", "))?;
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    ring: &'a Ring,
    src: &'a str,
    pos: usize,
}

impl PolyParser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let field = *self.ring.field();
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                self.term()?.neg(&field)
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&field, &self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&field, &self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let field = *self.ring.field();
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = acc.mul(&field, &self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            if e > MAX_DEGREE as u64 {
                return Err(Error::DegreeOverflow(e as i64));
            }
            let total = base.degree().unwrap_or(0) as u64 * e;
            if total > MAX_DEGREE as u64 {
                return Err(Error::DegreeOverflow(total as i64));
            }
            return Ok(base.pow(self.ring.field(), self.ring.nvars(), e as u32));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        self.src[start..self.pos].parse::<u64>().or_else(|_| self.err("integer too large"))
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let field = *self.ring.field();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let f = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(f)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits = &self.src[start..self.pos];
                // reduce digit by digit so arbitrarily long literals are accepted
                let c = digits.bytes().fold(0u32, |acc, b| field.add(field.mul(acc, 10), (b - b'0') as u32));
                Ok(Polynomial::monomial(Monomial::one(self.ring.nvars()), c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                match self.ring.names().iter().position(|n| n == name) {
                    Some(i) => Ok(self.ring.var(i)),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown variable `{name}`"))
                    }
                }
            }
            _ => self.err("expected a polynomial term"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering::*;

    fn mono(e: &[u16]) -> Monomial {
        Monomial::from_exponents(e).unwrap()
    }

    #[test]
    fn grevlex_examples() {
        assert_eq!(mono(&[2, 0, 0]).grevlex_cmp(&mono(&[1, 1, 0])), Greater);
        assert_eq!(mono(&[0, 2, 0]).grevlex_cmp(&mono(&[1, 0, 1])), Greater);
        assert_eq!(mono(&[0, 0, 3]).grevlex_cmp(&mono(&[2, 0, 0])), Greater);
        assert!(mono(&[1, 0]).try_grevlex_cmp(&mono(&[1, 0, 0])).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let r = Ring::standard(32003, 3).unwrap();
        let k = r.field();
        let f = r.parse("3*x0^2*x1 + x2^3").unwrap();
        assert_eq!(f.mul(k, &r.one()), f);
        let a = r.parse("x0 + x1").unwrap();
        let b = r.parse("x0 - x1").unwrap();
        assert_eq!(a.mul(k, &b), r.parse("x0^2 - x1^2").unwrap());
        assert_eq!(r.format(&r.parse("-(x0+x1)^2").unwrap()), "-x0^2 - 2*x0*x1 - x1^2");
        assert_eq!(r.parse("x0*x1 - x1*x0").unwrap(), Polynomial::zero());
    }

    #[test]
    fn parse_errors() {
        let r = Ring::standard(7, 2).unwrap();
        assert!(matches!(r.parse("x0 + y"), Err(Error::Parse { offset: 5, .. })));
        assert!(matches!(r.parse("x0^20000"), Err(Error::DegreeOverflow(_))));
        let (f, used) = r.parse_prefix("x0*x1, x1").unwrap();
        assert_eq!(used, 5);
        assert_eq!(f.degree(), Some(2));
    }

    #[test]
    fn monomials_of_degree() {
        assert_eq!(Monomial::all_of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::all_of_degree(4, 3).len(), 20);
        let ms = Monomial::all_of_degree(3, 2);
        assert!(ms.windows(2).all(|w| w[0].grevlex_cmp(&w[1]) == Greater));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn exps() -> impl Strategy<Value = Monomial> {
            proptest::collection::vec(0u16..4, 4).prop_map(|e| Monomial::from_exponents(&e).unwrap())
        }

        fn poly() -> impl Strategy<Value = Polynomial> {
            proptest::collection::vec((exps(), 0u32..11), 0..5)
                .prop_map(|t| Polynomial::from_terms(&PrimeField::new(11).unwrap(), t))
        }

        proptest! {
            #[test]
            fn order_is_multiplicative(a in exps(), b in exps(), c in exps()) {
                let ord = a.grevlex_cmp(&b);
                prop_assert_eq!(a.mul(&c).grevlex_cmp(&b.mul(&c)), ord);
                prop_assert_eq!(b.grevlex_cmp(&a), ord.reverse());
                prop_assert_eq!(ord == Equal, a == b);
            }

            #[test]
            fn canonical_terms(f in poly(), g in poly(), h in poly()) {
                let k = PrimeField::new(11).unwrap();
                prop_assert_eq!(f.add(&k, &g), g.add(&k, &f));
                prop_assert_eq!(f.mul(&k, &g.add(&k, &h)), f.mul(&k, &g).add(&k, &f.mul(&k, &h)));
                prop_assert_eq!(f.mul(&k, &g).mul(&k, &h), f.mul(&k, &g.mul(&k, &h)));
                prop_assert!(f.sub(&k, &f).is_zero());
            }
        }
    }
}
