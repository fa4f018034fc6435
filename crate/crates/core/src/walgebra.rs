//! The subalgebra `W = Q + V e1`, the module `M = V / V e0`, and `W ⊗ W`.
//!
//! `W` is free on the harmonic generators `ỹ_a = e0^{a-1} e1` (`a > 0`), so
//! a [`Composition`] `(a1,..,al)` names the monomial `ỹ_{a1}..ỹ_{al}`. The
//! extended values `ỹ_0 = -1` and `ỹ_a = 0` for `a < 0` are available through
//! [`y_tilde`] and [`y_product`].
//!
//! `M` is free of rank one over `W` on `1_M`, so [`MElem`] reuses the same
//! composition keys.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{AlgebraError, Result};
use crate::freealg::{NCPoly, Word};
use crate::lincomb::LinComb;
use crate::rational::{format_rational, parse_rational, Rational};

/// A finite sequence of positive integers, the index of a `ỹ`-monomial.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Composition(SmallVec<[u8; 16]>);

impl Composition {
    pub fn empty() -> Composition {
        Composition(SmallVec::new())
    }

    /// Panics if a part is zero or does not fit in a byte.
    pub fn new(parts: &[usize]) -> Composition {
        Composition(
            parts
                .iter()
                .map(|&a| {
                    assert!((1..=255).contains(&a), "composition part {a} out of range");
                    a as u8
                })
                .collect(),
        )
    }

    pub fn parts(&self) -> impl DoubleEndedIterator<Item = usize> + ExactSizeIterator + '_ {
        self.0.iter().map(|&a| a as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `a1 + .. + al`, the degree in `V`.
    pub fn weight(&self) -> usize {
        self.parts().sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().map(|&a| a as usize)
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().map(|&a| a as usize)
    }

    pub fn push(&mut self, a: usize) {
        assert!((1..=255).contains(&a));
        self.0.push(a as u8);
    }

    pub fn concat(&self, other: &Composition) -> Composition {
        let mut out = self.clone();
        out.0.extend_from_slice(&other.0);
        out
    }

    pub fn reversed(&self) -> Composition {
        Composition(self.0.iter().rev().copied().collect())
    }

    pub fn without_last(&self) -> Composition {
        Composition(self.0[..self.0.len().saturating_sub(1)].into())
    }

    pub fn without_first(&self) -> Composition {
        Composition(self.0.get(1..).unwrap_or(&[]).into())
    }

    pub fn slice(&self, start: usize, end: usize) -> Composition {
        Composition(self.0[start..end].into())
    }

    /// The word `e0^{a1-1} e1 .. e0^{al-1} e1`.
    pub fn to_word(&self) -> Word {
        let mut w = Word::EMPTY;
        for a in self.parts() {
            for _ in 1..a {
                w = w.push(0);
            }
            w = w.push(1);
        }
        w
    }

    /// Inverse of [`Composition::to_word`]; `None` if the word ends in `e0`.
    pub fn from_word(w: &Word) -> Option<Composition> {
        if w.last() == Some(0) {
            return None;
        }
        let mut out = Composition::empty();
        let mut run = 1;
        for l in w.letters() {
            if l == 0 {
                run += 1;
            } else {
                out.push(run);
                run = 1;
            }
        }
        Some(out)
    }

    /// All compositions of `weight`, in increasing order.
    pub fn all_of_weight(weight: usize) -> Vec<Composition> {
        fn rec(rem: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
            if rem == 0 {
                out.push(Composition::new(cur));
                return;
            }
            for a in 1..=rem {
                cur.push(a);
                rec(rem - a, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(weight, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

/// Graded lexicographic: by weight, then lexicographically on parts.
impl Ord for Composition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Composition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.parts()).finish()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for a in self.parts() {
            write!(f, "y{a}")?;
        }
        Ok(())
    }
}

impl Serialize for Composition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.parts())
    }
}

impl<'de> Deserialize<'de> for Composition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<usize>::deserialize(d)?;
        if parts.iter().any(|&a| a == 0 || a > 255) {
            return Err(serde::de::Error::custom(
                "composition parts must be in 1..=255",
            ));
        }
        Ok(Composition::new(&parts))
    }
}

/// Element of `W` in the `ỹ`-monomial basis.
pub type WPoly = LinComb<Composition>;

/// Element of `W ⊗ W` (and, read through `1_M`, of `M ⊗ M`).
pub type Tensor2 = LinComb<(Composition, Composition)>;

/// Element of `M = V / V e0`, written `sum c · ỹ_c · 1_M`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct MElem(pub WPoly);

impl MElem {
    pub fn zero() -> MElem {
        MElem(WPoly::zero())
    }

    /// `1_M`.
    pub fn unit() -> MElem {
        MElem(WPoly::one())
    }

    /// `w · 1_M`.
    pub fn from_w(w: WPoly) -> MElem {
        MElem(w)
    }

    pub fn as_w(&self) -> &WPoly {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Left action of `W` on `M`.
    pub fn act(&self, w: &WPoly) -> MElem {
        MElem(w.mul(&self.0))
    }
}

impl LinComb<Composition> {
    pub fn one() -> WPoly {
        WPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> WPoly {
        WPoly::monomial(Composition::empty(), c)
    }

    pub fn from_comp(c: Composition) -> WPoly {
        WPoly::monomial(c, Rational::one())
    }

    pub fn from_parts(parts: &[usize]) -> WPoly {
        WPoly::from_comp(Composition::new(parts))
    }

    pub fn mul(&self, other: &WPoly) -> WPoly {
        let mut out = WPoly::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a.concat(b), x * y);
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> WPoly {
        (0..n).fold(WPoly::one(), |acc, _| acc.mul(self))
    }

    /// Maximal weight in the support, `None` for zero.
    pub fn max_weight(&self) -> Option<usize> {
        self.keys().map(|c| c.weight()).max()
    }

    pub fn is_homogeneous_of(&self, d: usize) -> bool {
        self.keys().all(|c| c.weight() == d)
    }

    pub fn to_json(&self) -> Vec<WTermJson> {
        self.terms()
            .map(|(c, q)| WTermJson {
                comp: c.clone(),
                coeff: format_rational(q),
            })
            .collect()
    }

    pub fn from_json(terms: &[WTermJson]) -> Result<WPoly> {
        let mut out = WPoly::zero();
        for t in terms {
            out.add_term(t.comp.clone(), parse_rational(&t.coeff)?);
        }
        Ok(out)
    }

    pub fn display(&self) -> String {
        display_terms(self.terms().map(|(c, q)| (c.to_string(), q)))
    }
}

impl LinComb<(Composition, Composition)> {
    /// `a ⊗ b`.
    pub fn tensor(a: &WPoly, b: &WPoly) -> Tensor2 {
        let mut out = Tensor2::zero();
        for (x, p) in a.terms() {
            for (y, q) in b.terms() {
                out.add_term((x.clone(), y.clone()), p * q);
            }
        }
        out
    }

    /// `1 ⊗ 1`.
    pub fn unit() -> Tensor2 {
        Tensor2::tensor(&WPoly::one(), &WPoly::one())
    }

    /// Componentwise product `(w ⊗ x)(w' ⊗ x') = ww' ⊗ xx'`.
    pub fn mul(&self, other: &Tensor2) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((a, b), p) in self.terms() {
            for ((c, d), q) in other.terms() {
                out.add_term((a.concat(c), b.concat(d)), p * q);
            }
        }
        out
    }

    /// `(f ⊗ g)(t)` for linear maps given on monomials.
    pub fn apply(
        &self,
        f: impl Fn(&Composition) -> WPoly,
        g: impl Fn(&Composition) -> WPoly,
    ) -> Tensor2 {
        let mut out = Tensor2::zero();
        for ((a, b), p) in self.terms() {
            let fa = f(a);
            if fa.is_zero() {
                continue;
            }
            let gb = g(b);
            for (x, r) in fa.terms() {
                for (y, s) in gb.terms() {
                    out.add_term((x.clone(), y.clone()), p * r * s);
                }
            }
        }
        out
    }

    pub fn apply_left(&self, f: impl Fn(&Composition) -> WPoly) -> Tensor2 {
        self.apply(f, |c| WPoly::from_comp(c.clone()))
    }

    pub fn apply_right(&self, g: impl Fn(&Composition) -> WPoly) -> Tensor2 {
        self.apply(|c| WPoly::from_comp(c.clone()), g)
    }

    /// Contract both factors with scalar-valued maps.
    pub fn contract(
        &self,
        f: impl Fn(&Composition) -> Rational,
        g: impl Fn(&Composition) -> Rational,
    ) -> Rational {
        let mut acc = Rational::zero();
        for ((a, b), p) in self.terms() {
            let x = f(a);
            if x.is_zero() {
                continue;
            }
            acc += p * x * g(b);
        }
        acc
    }

    /// `(id ⊗ g)` for a scalar-valued `g`, landing in `W`.
    pub fn contract_right(&self, g: impl Fn(&Composition) -> Rational) -> WPoly {
        let mut out = WPoly::zero();
        for ((a, b), p) in self.terms() {
            out.add_term(a.clone(), p * g(b));
        }
        out
    }

    /// `(f ⊗ id)` for a scalar-valued `f`, landing in `W`.
    pub fn contract_left(&self, f: impl Fn(&Composition) -> Rational) -> WPoly {
        let mut out = WPoly::zero();
        for ((a, b), p) in self.terms() {
            out.add_term(b.clone(), p * f(a));
        }
        out
    }

    pub fn to_json(&self) -> Vec<TensorTermJson> {
        self.terms()
            .map(|((l, r), q)| TensorTermJson {
                left: l.clone(),
                right: r.clone(),
                coeff: format_rational(q),
            })
            .collect()
    }

    pub fn from_json(terms: &[TensorTermJson]) -> Result<Tensor2> {
        let mut out = Tensor2::zero();
        for t in terms {
            out.add_term((t.left.clone(), t.right.clone()), parse_rational(&t.coeff)?);
        }
        Ok(out)
    }

    pub fn display(&self) -> String {
        display_terms(self.terms().map(|((a, b), q)| (format!("{a}⊗{b}"), q)))
    }
}

fn display_terms<'a>(terms: impl Iterator<Item = (String, &'a Rational)>) -> String {
    let mut s = String::new();
    for (i, (basis, c)) in terms.enumerate() {
        let neg = c < &Rational::zero();
        let abs = if neg { -c } else { c.clone() };
        s.push_str(match (i, neg) {
            (0, true) => "-",
            (0, false) => "",
            (_, true) => " - ",
            (_, false) => " + ",
        });
        if abs.is_one() {
            s.push_str(&basis);
        } else {
            s.push_str(&format!("{abs}*{basis}"));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WTermJson {
    pub comp: Composition,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTermJson {
    pub left: Composition,
    pub right: Composition,
    pub coeff: String,
}

/// `ỹ_a` with the conventions `ỹ_0 = -1`, `ỹ_a = 0` for `a < 0`.
pub fn y_tilde(a: i64) -> WPoly {
    match a.cmp(&0) {
        Ordering::Greater => WPoly::from_parts(&[a as usize]),
        Ordering::Equal => WPoly::constant(-Rational::one()),
        Ordering::Less => WPoly::zero(),
    }
}

/// `ỹ_{a1} .. ỹ_{al}` with the extended conventions applied to each factor.
pub fn y_product(parts: &[i64]) -> WPoly {
    let mut comp = Composition::empty();
    let mut negate = false;
    for &a in parts {
        match a.cmp(&0) {
            Ordering::Less => return WPoly::zero(),
            Ordering::Equal => negate = !negate,
            Ordering::Greater => comp.push(a as usize),
        }
    }
    let c = if negate {
        -Rational::one()
    } else {
        Rational::one()
    };
    WPoly::monomial(comp, c)
}

/// The exponents `(a0,..,al)` of a word written `e0^{a0-1} e1 .. e1 e0^{al-1}`;
/// `l` is the number of `e1` letters.
pub fn word_runs(w: &Word) -> Vec<usize> {
    let mut runs = vec![1];
    for l in w.letters() {
        if l == 0 {
            *runs.last_mut().unwrap() += 1;
        } else {
            runs.push(1);
        }
    }
    runs
}

/// Inverse of [`word_runs`]. Panics on an empty or zero entry.
pub fn runs_word(runs: &[usize]) -> Word {
    let mut w = Word::EMPTY;
    for (i, &a) in runs.iter().enumerate() {
        assert!(a >= 1);
        if i > 0 {
            w = w.push(1);
        }
        for _ in 1..a {
            w = w.push(0);
        }
    }
    w
}

/// `y_embed((a1,..,al)) = e0^{a1-1} e1 .. e0^{al-1} e1`.
pub fn y_embed(c: &Composition) -> NCPoly {
    NCPoly::word(c.to_word())
}

/// The inclusion `W ⊂ V`.
pub fn w_to_v(a: &WPoly) -> NCPoly {
    NCPoly::from_terms(a.terms().map(|(c, q)| (c.to_word(), q.clone())))
}

/// Inverse of [`w_to_v`] on `Q + V e1`.
pub fn w_from_v(v: &NCPoly) -> Result<WPoly> {
    let mut out = WPoly::zero();
    for (w, q) in v.terms() {
        let c = Composition::from_word(w).ok_or_else(|| AlgebraError::NotInW(w.to_string()))?;
        out.add_term(c, q.clone());
    }
    Ok(out)
}

/// `π : V0 → W`, identity on `V e1` and zero on `V e0`.
pub fn pi(v: &NCPoly) -> Result<WPoly> {
    v.ensure_v0()?;
    Ok(project_ve1(v))
}

fn project_ve1(v: &NCPoly) -> WPoly {
    let mut out = WPoly::zero();
    for (w, q) in v.terms() {
        if let Some(c) = Composition::from_word(w) {
            out.add_term(c, q.clone());
        }
    }
    out
}

/// The projection `v ↦ v · 1_M`, with kernel `V e0`.
pub fn to_m(v: &NCPoly) -> MElem {
    MElem(project_ve1(v))
}

/// `∂_n`: `∂_n(a ỹ_m) = δ_{nm} a`, `∂_n(1) = 0`.
pub fn partial(n: usize, a: &WPoly) -> WPoly {
    let mut out = WPoly::zero();
    for (c, q) in a.terms() {
        if c.last() == Some(n) {
            out.add_term(c.without_last(), q.clone());
        }
    }
    out
}

/// `∂'_n`: `∂'_n(ỹ_m a) = δ_{nm} a`, `∂'_n(1) = 0`.
pub fn partial_prime(n: usize, a: &WPoly) -> WPoly {
    let mut out = WPoly::zero();
    for (c, q) in a.terms() {
        if c.first() == Some(n) {
            out.add_term(c.without_first(), q.clone());
        }
    }
    out
}

pub(crate) fn partial_mono(n: usize, c: &Composition) -> WPoly {
    if c.last() == Some(n) {
        WPoly::from_comp(c.without_last())
    } else {
        WPoly::zero()
    }
}

pub(crate) fn partial_prime_mono(n: usize, c: &Composition) -> WPoly {
    if c.first() == Some(n) {
        WPoly::from_comp(c.without_first())
    } else {
        WPoly::zero()
    }
}

/// The anti-automorphism of `W` fixing `1` and every `ỹ_m`.
pub fn inv(a: &WPoly) -> WPoly {
    WPoly::from_terms(a.terms().map(|(c, q)| (c.reversed(), q.clone())))
}

/// `ε : W → Q`, the degree zero part.
pub fn epsilon(a: &WPoly) -> Rational {
    a.coeff(&Composition::empty())
}

pub(crate) fn epsilon_mono(c: &Composition) -> Rational {
    if c.is_empty() {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// `ε ⊗ ε`.
pub fn epsilon2(t: &Tensor2) -> Rational {
    t.coeff(&(Composition::empty(), Composition::empty()))
}

/// Swap of tensor factors.
pub fn sigma(t: &Tensor2) -> Tensor2 {
    Tensor2::from_terms(
        t.terms()
            .map(|((a, b), q)| ((b.clone(), a.clone()), q.clone())),
    )
}

/// `inv ⊗ inv`.
pub fn inv2(t: &Tensor2) -> Tensor2 {
    Tensor2::from_terms(
        t.terms()
            .map(|((a, b), q)| ((a.reversed(), b.reversed()), q.clone())),
    )
}

/// `deg(a)`: least `d` with `a ∈ Q ⊕ (⊕_{k ≤ d} W ỹ_k)`, i.e. the largest last
/// index over the support.
pub fn deg(a: &WPoly) -> usize {
    a.keys().filter_map(|c| c.last()).max().unwrap_or(0)
}

/// `deg'(a) = deg(inv(a))`: largest first index.
pub fn deg_prime(a: &WPoly) -> usize {
    a.keys().filter_map(|c| c.first()).max().unwrap_or(0)
}

/// `deg^{(1)}`: largest last index of a left factor.
pub fn deg1(t: &Tensor2) -> usize {
    t.keys().filter_map(|(a, _)| a.last()).max().unwrap_or(0)
}

/// `deg^{(2)}`: largest last index of a right factor.
pub fn deg2(t: &Tensor2) -> usize {
    t.keys().filter_map(|(_, b)| b.last()).max().unwrap_or(0)
}

/// `deg'^{(1)}`: largest first index of a left factor.
pub fn deg1_prime(t: &Tensor2) -> usize {
    t.keys().filter_map(|(a, _)| a.first()).max().unwrap_or(0)
}

/// `deg'^{(2)}`: largest first index of a right factor.
pub fn deg2_prime(t: &Tensor2) -> usize {
    t.keys().filter_map(|(_, b)| b.first()).max().unwrap_or(0)
}

/// A monomial `y_{n1,1} .. y_{nr,1}` of the `Q<Y>` presentation of `M`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YWord(pub Vec<usize>);

impl fmt::Display for YWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for n in &self.0 {
            write!(f, "y_{{{n},1}}")?;
        }
        Ok(())
    }
}

fn sign_of_len(r: usize) -> Rational {
    if r % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Relabel `ỹ_{n1}..ỹ_{nr} · 1_M ↦ (-1)^r y_{n1,1}..y_{nr,1}`.
pub fn m_to_y_alphabet(m: &MElem) -> BTreeMap<YWord, Rational> {
    let mut out = BTreeMap::new();
    for (c, q) in m.0.terms() {
        out.insert(YWord(c.parts().collect()), q * sign_of_len(c.len()));
    }
    out
}

/// Inverse of [`m_to_y_alphabet`].
pub fn y_alphabet_to_m(y: &BTreeMap<YWord, Rational>) -> MElem {
    MElem(WPoly::from_terms(y.iter().map(|(w, q)| {
        (Composition::new(&w.0), q * sign_of_len(w.0.len()))
    })))
}
