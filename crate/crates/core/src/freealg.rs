//! The free associative algebra `V = Q<e0,e1>` and its free Lie subalgebra.
//!
//! Words are packed into a `u64` (first letter in the most significant used
//! bit), so the derived ordering on [`Word`] is graded lexicographic with
//! `e0 < e1`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Longest word that fits in the packed representation.
pub const MAX_WORD_LEN: usize = 63;

/// A word in the letters `e0` (bit 0) and `e1` (bit 1).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    len: u8,
    bits: u64,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    pub fn new(len: usize, bits: u64) -> Word {
        assert!(len <= MAX_WORD_LEN, "word too long");
        debug_assert!(len == 64 || bits >> len == 0);
        Word {
            len: len as u8,
            bits,
        }
    }

    pub fn letter(l: u8) -> Word {
        debug_assert!(l < 2);
        Word {
            len: 1,
            bits: l as u64,
        }
    }

    pub fn from_letters(letters: &[u8]) -> Word {
        let mut w = Word::EMPTY;
        for &l in letters {
            w = w.push(l);
        }
        w
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Letter at position `i` (0-based from the left).
    pub fn at(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.bits >> (self.len() - 1 - i)) & 1) as u8
    }

    pub fn letters(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |i| self.at(i))
    }

    pub fn push(self, l: u8) -> Word {
        Word::new(self.len() + 1, (self.bits << 1) | l as u64)
    }

    pub fn concat(self, other: Word) -> Word {
        Word::new(
            self.len() + other.len(),
            (self.bits << other.len) | other.bits,
        )
    }

    /// Subword `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        debug_assert!(start <= end && end <= self.len());
        let n = end - start;
        let shifted = self.bits >> (self.len() - end);
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        Word::new(n, shifted & mask)
    }

    pub fn last(&self) -> Option<u8> {
        (!self.is_empty()).then_some((self.bits & 1) as u8)
    }

    pub fn first(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.at(0))
    }

    /// Parse the `"0"/"1"` text form; `""` is the unit.
    pub fn parse(s: &str) -> Result<Word> {
        if s.len() > MAX_WORD_LEN {
            return Err(AlgebraError::Parse(format!("word too long: {}", s.len())));
        }
        let mut w = Word::EMPTY;
        for c in s.chars() {
            w = match c {
                '0' => w.push(0),
                '1' => w.push(1),
                _ => return Err(AlgebraError::Parse(format!("invalid word {s:?}"))),
            };
        }
        Ok(w)
    }

    /// All words of length `d`, in increasing order.
    pub fn all_of_length(d: usize) -> impl Iterator<Item = Word> {
        assert!(d < 32, "enumeration limited to short words");
        (0..(1u64 << d)).map(move |b| Word::new(d, b))
    }

    /// True iff the word is strictly smaller than each of its proper
    /// rotations.
    pub fn is_lyndon(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        (1..n).all(|i| {
            let rot = self.slice(i, n).concat(self.slice(0, i));
            self.bits < rot.bits
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            f.write_str(if l == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Element of `V = Q<e0,e1>`: a finitely supported map from words to
/// rationals. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, Rational>,
}

impl NCPoly {
    pub fn zero() -> NCPoly {
        NCPoly::default()
    }

    pub fn one() -> NCPoly {
        NCPoly::word(Word::EMPTY)
    }

    pub fn e0() -> NCPoly {
        NCPoly::word(Word::letter(0))
    }

    pub fn e1() -> NCPoly {
        NCPoly::word(Word::letter(1))
    }

    pub fn word(w: Word) -> NCPoly {
        NCPoly::monomial(w, Rational::one())
    }

    pub fn monomial(w: Word, c: Rational) -> NCPoly {
        let mut p = NCPoly::zero();
        p.add_term(w, c);
        p
    }

    /// `e0^{a-1} e1 ... ` style helper: parse a word and wrap it.
    pub fn from_word_str(s: &str) -> Result<NCPoly> {
        Ok(NCPoly::word(Word::parse(s)?))
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Rational)>>(terms: I) -> NCPoly {
        let mut p = NCPoly::zero();
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    pub fn add_term(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, Rational)> {
        self.terms.into_iter()
    }

    /// The coefficient `(x|w)`.
    pub fn coeff(&self, w: &Word) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Word::EMPTY)
    }

    /// Membership in `V0`, the positive-degree part.
    pub fn is_in_v0(&self) -> bool {
        !self.terms.contains_key(&Word::EMPTY)
    }

    pub fn ensure_v0(&self) -> Result<()> {
        if self.is_in_v0() {
            Ok(())
        } else {
            Err(AlgebraError::NonzeroConstant)
        }
    }

    /// The homogeneous component `x[d]`.
    pub fn component(&self, d: usize) -> NCPoly {
        NCPoly {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (*w, c.clone()))
                .collect(),
        }
    }

    /// `Some(d)` if every word has length `d`; the zero polynomial is
    /// homogeneous of every degree and reports `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let d = it.next()?.len();
        it.all(|w| w.len() == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous_degree().is_some() || self.is_zero()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    pub fn scale(&self, c: &Rational) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero();
        }
        NCPoly {
            terms: self.terms.iter().map(|(w, a)| (*w, a * c)).collect(),
        }
    }

    /// Commutator `[x, y] = xy - yx`.
    pub fn bracket(&self, other: &NCPoly) -> NCPoly {
        &(self * other) - &(other * self)
    }

    /// Splits `x = x_0 e0 + x_1 e1 + (x|1)` by last letter.
    pub fn split_last(&self) -> [NCPoly; 2] {
        let mut parts = [NCPoly::zero(), NCPoly::zero()];
        for (w, c) in &self.terms {
            if let Some(l) = w.last() {
                parts[l as usize].add_term(w.slice(0, w.len() - 1), c.clone());
            }
        }
        parts
    }

    /// Serializable `{word: "p/q"}` map.
    pub fn to_json(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(w, c)| (w.to_string(), format_rational(c)))
            .collect()
    }

    pub fn from_json(m: &BTreeMap<String, String>) -> Result<NCPoly> {
        let mut p = NCPoly::zero();
        for (w, c) in m {
            p.add_term(Word::parse(w)?, parse_rational(c)?);
        }
        Ok(p)
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c } else { c.clone() };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let word: String = if w.is_empty() {
                "1".into()
            } else {
                w.letters()
                    .map(|l| if l == 0 { "e0" } else { "e1" })
                    .collect()
            };
            if abs.is_one() {
                f.write_str(&word)?;
            } else if w.is_empty() {
                write!(f, "{abs}")?;
            } else {
                write!(f, "{abs}*{word}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCPoly({self})")
    }
}

impl AddAssign<&NCPoly> for NCPoly {
    fn add_assign(&mut self, rhs: &NCPoly) {
        for (w, c) in &rhs.terms {
            self.add_term(*w, c.clone());
        }
    }
}

impl SubAssign<&NCPoly> for NCPoly {
    fn sub_assign(&mut self, rhs: &NCPoly) {
        for (w, c) in &rhs.terms {
            self.add_term(*w, -c);
        }
    }
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for NCPoly {
    type Output = NCPoly;
    fn add(mut self, rhs: NCPoly) -> NCPoly {
        self += &rhs;
        self
    }
}

impl Sub for NCPoly {
    type Output = NCPoly;
    fn sub(mut self, rhs: NCPoly) -> NCPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        NCPoly {
            terms: self.terms.iter().map(|(w, c)| (*w, -c)).collect(),
        }
    }
}

impl Neg for NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        -&self
    }
}

impl Mul for &NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.add_term(u.concat(*v), a * b);
            }
        }
        out
    }
}

impl Mul for NCPoly {
    type Output = NCPoly;
    fn mul(self, rhs: NCPoly) -> NCPoly {
        &self * &rhs
    }
}

/// A Lyndon word together with its standard bracketing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LyndonElement {
    pub word: Word,
    pub poly: NCPoly,
}

/// Lyndon words of length exactly `d`, in increasing order (Duval's
/// generation algorithm).
pub fn lyndon_words(d: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if d == 0 {
        return out;
    }
    let mut w: Vec<u8> = vec![0];
    loop {
        if w.len() == d {
            out.push(Word::from_letters(&w));
        }
        // extend periodically to length d, then increment
        let m = w.len();
        while w.len() < d {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&1) {
            w.pop();
        }
        match w.last_mut() {
            Some(l) => *l = 1,
            None => break,
        }
    }
    out
}

/// Standard right factorization `w = u v`, with `v` the longest proper
/// Lyndon suffix.
pub fn standard_factorization(w: Word) -> Option<(Word, Word)> {
    let n = w.len();
    if n < 2 {
        return None;
    }
    (1..n)
        .map(|i| (w.slice(0, i), w.slice(i, n)))
        .find(|(_, v)| v.is_lyndon())
}

fn bracketing(w: Word, memo: &mut BTreeMap<Word, NCPoly>) -> NCPoly {
    if let Some(p) = memo.get(&w) {
        return p.clone();
    }
    let p = match standard_factorization(w) {
        None => NCPoly::word(w),
        Some((u, v)) => bracketing(u, memo).bracket(&bracketing(v, memo)),
    };
    memo.insert(w, p.clone());
    p
}

/// Basis of `lie(e0,e1)[d]` given by standard bracketings of Lyndon words.
pub fn lyndon_basis(d: usize) -> Vec<LyndonElement> {
    let mut memo = BTreeMap::new();
    lyndon_words(d)
        .into_iter()
        .map(|word| LyndonElement {
            word,
            poly: bracketing(word, &mut memo),
        })
        .collect()
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1i64;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of binary necklaces of length `d`: `(1/d) sum_{e|d} mu(d/e) 2^e`,
/// the dimension of `lie(e0,e1)[d]`.
pub fn witt_dimension(d: usize) -> usize {
    assert!(d >= 1);
    let total: i64 = (1..=d)
        .filter(|e| d % e == 0)
        .map(|e| mobius(d / e) * (1i64 << e))
        .sum();
    (total / d as i64) as usize
}

/// Left-normed bracketing `w = x1..xd -> [..[x1,x2],..,xd]`, extended
/// linearly. Computed by peeling off last letters so that each prefix
/// polynomial is bracketed once.
pub fn dynkin_map(x: &NCPoly) -> NCPoly {
    let mut out = x.component(1);
    let rest: NCPoly = NCPoly::from_terms(
        x.terms()
            .filter(|(w, _)| w.len() >= 2)
            .map(|(w, c)| (*w, c.clone())),
    );
    if rest.is_zero() {
        return out;
    }
    for (l, part) in rest.split_last().iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let inner = dynkin_map(part);
        out += &inner.bracket(&NCPoly::word(Word::letter(l as u8)));
    }
    out
}

/// Membership in `lie(e0,e1)` for homogeneous input, via the
/// Dynkin–Specht–Wever criterion `r(x) = d x`.
pub fn is_lie_element(x: &NCPoly) -> Result<bool> {
    if x.is_zero() {
        return Ok(true);
    }
    let d = x.homogeneous_degree().ok_or(AlgebraError::NotHomogeneous)?;
    if d == 0 {
        return Err(AlgebraError::Degree { min: 1, got: 0 });
    }
    Ok(dynkin_map(x) == x.scale(&Rational::from_integer((d as i64).into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn p(s: &str) -> NCPoly {
        NCPoly::from_word_str(s).unwrap()
    }

    #[test]
    fn ring_ops_examples() {
        let prod = &NCPoly::e0() * &NCPoly::e1();
        assert_eq!(prod, p("01"));
        assert_eq!(prod.coeff(&Word::parse("01").unwrap()), int(1));
        assert!(NCPoly::e0().bracket(&NCPoly::e0()).is_zero());
        assert_eq!(NCPoly::e0().bracket(&NCPoly::e1()), &p("01") - &p("10"));
    }

    #[test]
    fn coeff_examples() {
        let x = &p("01") + &p("11").scale(&frac(2, 3));
        assert_eq!(x.coeff(&Word::parse("01").unwrap()), int(1));
        assert_eq!(p("01").coeff(&Word::parse("10").unwrap()), int(0));
        let br = NCPoly::e0().bracket(&NCPoly::e1());
        assert_eq!(br.coeff(&Word::parse("10").unwrap()), int(-1));
    }

    #[test]
    fn component_examples() {
        let x = &NCPoly::e0() + &p("01");
        assert_eq!(x.component(2), p("01"));
        assert!(NCPoly::e0().component(5).is_zero());
        assert!(x.component(2).component(1).is_zero());
    }

    #[test]
    fn word_packing() {
        let w = Word::parse("0110").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "0110");
        assert_eq!(w.slice(1, 3).to_string(), "11");
        assert_eq!(w.last(), Some(0));
        assert_eq!(w.first(), Some(0));
        assert_eq!(Word::EMPTY.to_string(), "");
        assert!(Word::parse("012").is_err());
        assert!(Word::parse("01").unwrap() < Word::parse("10").unwrap());
        assert!(Word::parse("11").unwrap() < Word::parse("000").unwrap());
    }

    #[test]
    fn lyndon_small_degrees() {
        let b1 = lyndon_basis(1);
        assert_eq!(b1.len(), 2);
        assert_eq!(b1[0].poly, NCPoly::e0());
        assert_eq!(b1[1].poly, NCPoly::e1());
        let b2 = lyndon_basis(2);
        assert_eq!(b2.len(), 1);
        assert_eq!(b2[0].poly, NCPoly::e0().bracket(&NCPoly::e1()));
        assert_eq!(lyndon_basis(6).len(), 9);
    }

    #[test]
    fn witt_numbers() {
        let expected = [2, 1, 2, 3, 6, 9, 18, 30, 56, 99, 186, 335];
        for (d, &n) in (1..=12).zip(expected.iter()) {
            assert_eq!(witt_dimension(d), n, "degree {d}");
        }
    }

    #[test]
    fn lie_membership_examples() {
        let e0 = NCPoly::e0();
        let e1 = NCPoly::e1();
        assert!(is_lie_element(&e0.bracket(&e0.bracket(&e1))).unwrap());
        assert!(!is_lie_element(&p("01")).unwrap());
        assert!(is_lie_element(&e0).unwrap());
        assert_eq!(
            is_lie_element(&(&e0 + &p("01"))),
            Err(AlgebraError::NotHomogeneous)
        );
    }

    #[test]
    fn display_form() {
        let x = &p("01") - &p("11").scale(&frac(1, 2));
        assert_eq!(x.to_string(), "e0e1 - 1/2*e1e1");
        assert_eq!(NCPoly::zero().to_string(), "0");
    }
}
