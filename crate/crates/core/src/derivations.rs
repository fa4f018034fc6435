//! Derivations attached to elements of `V0`, the Ihara-type bracket, the map
//! `θ`, and the actions of `V0` and `lie(e0,e1)` on maps into tensor squares.

use crate::coproducts::DeltaCache;
use crate::error::{AlgebraError, Result};
use crate::freealg::{NCPoly, Word};
use crate::rational::{frac, Rational};
use crate::walgebra::{to_m, word_runs, Composition, MElem, Tensor2, WPoly};

/// Which of the four derivations attached to `v` is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DerivationTag {
    /// `der^{V,(1)}_v` on `V`: `e0 ↦ [v,e0]`, `e1 ↦ 0`.
    V1,
    /// Restriction of `V1` to `W`.
    W1,
    /// `der^{V,(10)}_v(a) = der^{V,(1)}_v(a) + a v` on `V`.
    V10,
    /// `V10` pushed to `M = V / V e0`.
    M10,
}

impl DerivationTag {
    pub fn name(self) -> &'static str {
        match self {
            DerivationTag::V1 => "V1",
            DerivationTag::W1 => "W1",
            DerivationTag::V10 => "V10",
            DerivationTag::M10 => "M10",
        }
    }
}

/// An operand for [`apply_derivation`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    V(NCPoly),
    W(WPoly),
    M(MElem),
}

impl Operand {
    fn kind(&self) -> &'static str {
        match self {
            Operand::V(_) => "V",
            Operand::W(_) => "W",
            Operand::M(_) => "M",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationHandle {
    v: NCPoly,
    tag: DerivationTag,
}

impl DerivationHandle {
    pub fn new(v: NCPoly, tag: DerivationTag) -> Result<DerivationHandle> {
        v.ensure_v0()?;
        Ok(DerivationHandle { v, tag })
    }

    pub fn element(&self) -> &NCPoly {
        &self.v
    }

    pub fn tag(&self) -> DerivationTag {
        self.tag
    }
}

pub fn apply_derivation(h: &DerivationHandle, a: &Operand) -> Result<Operand> {
    use DerivationTag::*;
    match (h.tag, a) {
        (V1, Operand::V(x)) => Ok(Operand::V(der_v1(&h.v, x))),
        (V10, Operand::V(x)) => Ok(Operand::V(der_v10(&h.v, x))),
        (W1, Operand::W(x)) => Ok(Operand::W(DerW::new(&h.v).apply(x))),
        (M10, Operand::M(x)) => Ok(Operand::M(der_m10(&h.v, x))),
        (tag, a) => Err(AlgebraError::KindMismatch {
            tag: tag.name(),
            kind: a.kind(),
        }),
    }
}

/// `der^{V,(1)}_v`: each `e0` of each word is replaced by `[v,e0]` in turn.
pub fn der_v1(v: &NCPoly, a: &NCPoly) -> NCPoly {
    let image = v.bracket(&NCPoly::e0());
    let mut out = NCPoly::zero();
    for (w, c) in a.terms() {
        for i in (0..w.len()).filter(|&i| w.at(i) == 0) {
            let left = NCPoly::word(w.slice(0, i));
            let right = NCPoly::word(w.slice(i + 1, w.len()));
            out += &(&(&left * &image) * &right).scale(c);
        }
    }
    out
}

/// `der^{V,(10)}_v(a) = der^{V,(1)}_v(a) + a v`.
pub fn der_v10(v: &NCPoly, a: &NCPoly) -> NCPoly {
    der_v1(v, a) + a * v
}

/// `der^{W,(1)}_v`, evaluated on harmonic generators by
/// `ỹ_n ↦ v ỹ_n - e0^{n-1} v e1`, which for a word `v` with exponents
/// `(a0,..,al)` reads `ỹ_{a0}..ỹ_{a_{l-1}} ỹ_{al+n-1} - ỹ_{a0+n-1} ỹ_{a1}..ỹ_{al}`.
#[derive(Clone, Debug)]
pub struct DerW {
    words: Vec<(Vec<usize>, Rational)>,
}

impl DerW {
    /// Panics unless `v ∈ V0`.
    pub fn new(v: &NCPoly) -> DerW {
        assert!(v.is_in_v0(), "derivation parameter must lie in V0");
        DerW {
            words: v.terms().map(|(w, c)| (word_runs(w), c.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn generator(&self, n: usize) -> WPoly {
        let mut out = WPoly::zero();
        for (runs, c) in &self.words {
            let (init, last) = runs.split_at(runs.len() - 1);
            let mut first = Composition::new(init);
            first.push(last[0] + n - 1);
            out.add_term(first, c.clone());
            let mut second = Composition::new(&[runs[0] + n - 1]);
            for &a in &runs[1..] {
                second.push(a);
            }
            out.add_term(second, -c);
        }
        out
    }

    /// Leibniz extension to monomials.
    pub fn monomial(&self, c: &Composition) -> WPoly {
        let parts: Vec<usize> = c.parts().collect();
        let mut out = WPoly::zero();
        for (i, &n) in parts.iter().enumerate() {
            let left = WPoly::from_parts(&parts[..i]);
            let right = WPoly::from_parts(&parts[i + 1..]);
            out += &left.mul(&self.generator(n)).mul(&right);
        }
        out
    }

    pub fn apply(&self, a: &WPoly) -> WPoly {
        a.map_linear(|c| self.monomial(c))
    }

    /// `der^{M,(10)}_v(w·1_M) = der^{W,(1)}_v(w) + w·(v·1_M)`.
    pub fn apply_m10(&self, m: &MElem, v_m: &MElem) -> MElem {
        MElem(&self.apply(m.as_w()) + &m.as_w().mul(v_m.as_w()))
    }

    /// `D⊗id + id⊗D` on `W⊗W`.
    pub fn on_tensor(&self, t: &Tensor2) -> Tensor2 {
        &t.apply_left(|c| self.monomial(c)) + &t.apply_right(|c| self.monomial(c))
    }
}

/// `der^{M,(10)}_v`.
pub fn der_m10(v: &NCPoly, m: &MElem) -> MElem {
    DerW::new(v).apply_m10(m, &to_m(v))
}

/// `⟨v,v'⟩ = der_v(v') - der_{v'}(v) + [v',v]`.
pub fn ihara_bracket(v: &NCPoly, w: &NCPoly) -> Result<NCPoly> {
    v.ensure_v0()?;
    w.ensure_v0()?;
    Ok(der_v1(v, w) - der_v1(w, v) + w.bracket(v))
}

/// `θ(x) = x - (x|e0) e0 + sum_{n≥1} (1/n) (x|e0^{n-1}e1) e1^n`.
pub fn theta(x: &NCPoly) -> NCPoly {
    let mut out = x.clone();
    out.add_term(Word::letter(0), -x.coeff(&Word::letter(0)));
    for (w, c) in x.terms() {
        let n = w.len();
        if n >= 1 && w.last() == Some(1) && w.letters().take(n - 1).all(|l| l == 0) {
            let e1n = Word::from_letters(&vec![1; n]);
            out.add_term(e1n, c * frac(1, n as i64));
        }
    }
    out
}

/// A linear map `W → W⊗W`, given on monomials.
pub trait TensorMap {
    fn eval_monomial(&self, c: &Composition) -> Tensor2;

    fn eval(&self, a: &WPoly) -> Tensor2 {
        let mut out = Tensor2::zero();
        for (c, q) in a.terms() {
            out.add_scaled(&self.eval_monomial(c), q);
        }
        out
    }
}

/// `Δ^W` as a [`TensorMap`].
pub struct DeltaW;

impl TensorMap for DeltaW {
    fn eval_monomial(&self, c: &Composition) -> Tensor2 {
        DeltaCache::new().monomial(c).clone()
    }
}

impl<F: Fn(&Composition) -> Tensor2> TensorMap for F {
    fn eval_monomial(&self, c: &Composition) -> Tensor2 {
        self(c)
    }
}

/// `v·h = (D⊗id + id⊗D)∘h - h∘D` with `D = der^{W,(1)}_v`.
pub struct Acted<'a, H: TensorMap + ?Sized> {
    der: DerW,
    inner: &'a H,
}

impl<'a, H: TensorMap + ?Sized> Acted<'a, H> {
    pub fn new(v: &NCPoly, inner: &'a H) -> Self {
        Acted {
            der: DerW::new(v),
            inner,
        }
    }
}

impl<H: TensorMap + ?Sized> TensorMap for Acted<'_, H> {
    fn eval_monomial(&self, c: &Composition) -> Tensor2 {
        let outer = self.der.on_tensor(&self.inner.eval_monomial(c));
        &outer - &self.inner.eval(&self.der.monomial(c))
    }
}

/// `(v·Δ^W)(w)` for `v ∈ V0`.
pub fn act_w(v: &NCPoly, w: &WPoly) -> Result<Tensor2> {
    v.ensure_v0()?;
    let der = DerW::new(v);
    let mut cache = DeltaCache::new();
    Ok(act_w_cached(&der, w, &mut cache))
}

pub(crate) fn act_w_cached(der: &DerW, w: &WPoly, cache: &mut DeltaCache) -> Tensor2 {
    let mut out = Tensor2::zero();
    for (c, q) in w.terms() {
        let outer = der.on_tensor(cache.monomial(c));
        let inner = cache.apply(&der.monomial(c));
        out.add_scaled(&(&outer - &inner), q);
    }
    out
}

/// The `M⊗M`-valued action with `D = der^{M,(10)}_v` for `v ∈ V0`:
/// `(D⊗id + id⊗D)∘Δ^M - Δ^M∘D`.
pub(crate) fn act_m_v0(v: &NCPoly, m: &MElem) -> Tensor2 {
    let der = DerW::new(v);
    let v_m = to_m(v);
    let on_m = |c: &Composition| der.apply_m10(&MElem(WPoly::from_comp(c.clone())), &v_m).0;
    let mut cache = DeltaCache::new();
    let delta = cache.apply(m.as_w());
    let outer = &delta.apply_left(on_m) + &delta.apply_right(on_m);
    let inner = cache.apply(der.apply_m10(m, &v_m).as_w());
    &outer - &inner
}

/// `(x∗Δ^M)(m)` for `x ∈ lie(e0,e1)`, using `der^{M,(10)}_{θ(x)}`.
pub fn act_m(x: &NCPoly, m: &MElem) -> Result<Tensor2> {
    let t = theta(x);
    t.ensure_v0()?;
    Ok(act_m_v0(&t, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coproducts::delta_w;
    use crate::rational::int;
    use crate::walgebra::{w_from_v, w_to_v};

    fn p(s: &str) -> NCPoly {
        NCPoly::from_word_str(s).unwrap()
    }

    fn y(parts: &[usize]) -> WPoly {
        WPoly::from_parts(parts)
    }

    #[test]
    fn der_generator_rule() {
        let e0 = NCPoly::e0();
        let e1 = NCPoly::e1();
        assert_eq!(der_v1(&e1, &e0), e1.bracket(&e0));
        assert!(der_v1(&e1, &e1).is_zero());
        assert_eq!(der_v10(&p("01"), &NCPoly::one()), p("01"));
    }

    #[test]
    fn der_w_on_generators() {
        let d = DerW::new(&NCPoly::e1());
        for n in 1..=6 {
            let expect = &y(&[1, n]) - &y(&[n, 1]);
            assert_eq!(d.generator(n), expect);
        }
    }

    #[test]
    fn der_w_matches_v_route() {
        for v in ["01", "10", "0", "110", "0101"] {
            let v = p(v);
            let d = DerW::new(&v);
            for c in [vec![1], vec![2, 1], vec![3], vec![1, 3, 2]] {
                let c = Composition::new(&c);
                let via_v = w_from_v(&der_v1(&v, &w_to_v(&WPoly::from_comp(c.clone())))).unwrap();
                assert_eq!(d.monomial(&c), via_v);
            }
        }
    }

    #[test]
    fn der_m10_matches_v_route() {
        for v in ["01", "10", "0", "1", "100"] {
            let v = p(v);
            for c in [vec![], vec![1], vec![2, 1]] {
                let w = WPoly::from_parts(&c);
                let via_v = to_m(&der_v10(&v, &w_to_v(&w)));
                assert_eq!(der_m10(&v, &MElem(w)), via_v);
            }
        }
    }

    #[test]
    fn kind_mismatch_rejected() {
        let h = DerivationHandle::new(NCPoly::e1(), DerivationTag::W1).unwrap();
        assert!(matches!(
            apply_derivation(&h, &Operand::V(NCPoly::e0())),
            Err(AlgebraError::KindMismatch { .. })
        ));
        assert!(DerivationHandle::new(NCPoly::one(), DerivationTag::V1).is_err());
        let out = apply_derivation(&h, &Operand::W(y(&[2]))).unwrap();
        assert_eq!(out, Operand::W(&y(&[1, 2]) - &y(&[2, 1])));
    }

    #[test]
    fn bracket_examples() {
        let e0 = NCPoly::e0();
        let e1 = NCPoly::e1();
        assert!(ihara_bracket(&e0, &e1).unwrap().is_zero());
        let x = &p("01") - &p("10");
        assert!(ihara_bracket(&x, &x).unwrap().is_zero());
        let expect = &(&p("10101") + &p("01011")) - &(&p("10011") + &p("01101"));
        assert_eq!(ihara_bracket(&p("01"), &p("101")).unwrap(), expect);
        assert!(ihara_bracket(&NCPoly::one(), &e0).is_err());
    }

    #[test]
    fn theta_examples() {
        assert!(theta(&NCPoly::e0()).is_zero());
        assert_eq!(theta(&NCPoly::e1()), NCPoly::e1().scale(&int(2)));
        let c = NCPoly::e0().bracket(&NCPoly::e1());
        let expect = &c + &p("11").scale(&frac(1, 2));
        assert_eq!(theta(&c), expect);
    }

    #[test]
    fn act_w_examples() {
        for n in 1..=6 {
            assert!(act_w(&NCPoly::e1(), &y(&[n])).unwrap().is_zero());
        }
        let t = theta(&NCPoly::e0().bracket(&NCPoly::e1()));
        assert!(act_w(&t, &y(&[1])).unwrap().is_zero());
        assert!(!act_w(&t, &y(&[2])).unwrap().is_zero());
    }

    #[test]
    fn general_action_with_delta_matches_act_w() {
        let v = p("011");
        let acted = Acted::new(&v, &DeltaW);
        for c in [vec![1], vec![3], vec![1, 2]] {
            let w = WPoly::from_parts(&c);
            assert_eq!(acted.eval(&w), act_w(&v, &w).unwrap());
        }
        let closure = |c: &Composition| delta_w(&WPoly::from_comp(c.clone()));
        let acted2 = Acted::new(&v, &closure);
        assert_eq!(acted2.eval(&y(&[2, 2])), act_w(&v, &y(&[2, 2])).unwrap());
    }

    #[test]
    fn act_m_examples() {
        for m in [MElem::unit(), MElem(y(&[1])), MElem(y(&[2, 1]))] {
            assert!(act_m(&NCPoly::e0(), &m).unwrap().is_zero());
        }
        assert!(act_m(&NCPoly::e1(), &MElem::unit()).unwrap().is_zero());
        let c = NCPoly::e0().bracket(&NCPoly::e1());
        // θ([e0,e1])·1_M = ỹ_2 + ½ỹ_1², which is primitive.
        assert!(act_m(&c, &MElem::unit()).unwrap().is_zero());
    }
}
