//! The factorization `v·Δ^W = i∘h∘H(v)` and the exact sequence `(j, h)`.
//!
//! `H` sends `v ∈ V0` to a triple of finitely supported sequences
//! `(a_k)`, `(b_k)` in `W⊗W` and `(z_i)` in `W`. `h` turns such a triple into
//! a sequence `n ↦ h(t)(n) ∈ W⊗W`, which `i` extends to a `Δ^W`-derivation
//! `W → W⊗W`. The kernel of `h` is the image of `j : c ↦ (c·1⊗1, c·1⊗1, 0)`,
//! which makes `v·Δ^W = 0` decidable without truncation.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coproducts::{delta_seq, DeltaCache};
use crate::derivations::act_w;
use crate::error::Result;
use crate::freealg::NCPoly;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::walgebra::{
    deg, deg1, deg1_prime, deg2, deg2_prime, deg_prime, epsilon2, epsilon_mono, partial_mono,
    partial_prime_mono, word_runs, y_product, Composition, Tensor2, TensorTermJson, WPoly,
    WTermJson,
};

/// `(Δ^W - id⊗1 - 1⊗id)(ỹ_c)`; note `(1) ↦ -1⊗1`.
fn reduced(cache: &mut DeltaCache, parts: &[usize]) -> Tensor2 {
    cache.reduced_monomial(&Composition::new(parts))
}

fn as_i64(parts: &[usize]) -> Vec<i64> {
    parts.iter().map(|&a| a as i64).collect()
}

/// `M_i` on a single word with exponents `runs`.
fn mix_term(runs: &[usize], i: usize) -> WPoly {
    let l = runs.len() - 1;
    if l == 0 {
        return WPoly::zero();
    }
    let mut first = as_i64(&runs[..l]);
    first.push(runs[l] as i64 - i as i64);
    let mut second = vec![runs[0] as i64 - i as i64];
    second.extend(as_i64(&runs[1..]));
    &y_product(&first) - &y_product(&second)
}

/// `L_k(v)`: for each word, `δ_{al,k}(Δ^W - id⊗1 - 1⊗id)(ỹ_{a0}..ỹ_{a_{l-1}})`.
pub fn map_l(k: usize, v: &NCPoly) -> Result<Tensor2> {
    v.ensure_v0()?;
    let mut cache = DeltaCache::new();
    let mut out = Tensor2::zero();
    for (w, c) in v.terms() {
        let runs = word_runs(w);
        if runs[runs.len() - 1] == k {
            out.add_scaled(&reduced(&mut cache, &runs[..runs.len() - 1]), c);
        }
    }
    Ok(out)
}

/// `R_k(v)`: for each word, `δ_{a0,k}(Δ^W - id⊗1 - 1⊗id)(ỹ_{a1}..ỹ_{al})`.
pub fn map_r(k: usize, v: &NCPoly) -> Result<Tensor2> {
    v.ensure_v0()?;
    let mut cache = DeltaCache::new();
    let mut out = Tensor2::zero();
    for (w, c) in v.terms() {
        let runs = word_runs(w);
        if runs[0] == k {
            out.add_scaled(&reduced(&mut cache, &runs[1..]), c);
        }
    }
    Ok(out)
}

/// `M_i(v)`: for each word, `ỹ_{a0}..ỹ_{a_{l-1}}ỹ_{al-i} - ỹ_{a0-i}ỹ_{a1}..ỹ_{al}`.
pub fn map_mi(i: usize, v: &NCPoly) -> Result<WPoly> {
    v.ensure_v0()?;
    let mut out = WPoly::zero();
    for (w, c) in v.terms() {
        out.add_scaled(&mix_term(&word_runs(w), i), c);
    }
    Ok(out)
}

/// A point of `(⊕_k W⊗W) ⊕ (⊕_k W⊗W) ⊕ (⊕_i W)`. Zero slots are not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HTriple {
    pub a: BTreeMap<usize, Tensor2>,
    pub b: BTreeMap<usize, Tensor2>,
    pub z: BTreeMap<usize, WPoly>,
}

fn add_slot<T: Clone + Default + std::ops::AddAssign<T>>(
    map: &mut BTreeMap<usize, T>,
    k: usize,
    x: T,
    is_zero: impl Fn(&T) -> bool,
) {
    let slot = map.entry(k).or_default();
    *slot += x;
    if is_zero(slot) {
        map.remove(&k);
    }
}

impl HTriple {
    pub fn zero() -> HTriple {
        HTriple::default()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_empty() && self.b.is_empty() && self.z.is_empty()
    }

    pub fn add_a(&mut self, k: usize, x: Tensor2) {
        add_slot(&mut self.a, k, x, Tensor2::is_zero);
    }

    pub fn add_b(&mut self, k: usize, x: Tensor2) {
        add_slot(&mut self.b, k, x, Tensor2::is_zero);
    }

    pub fn add_z(&mut self, i: usize, x: WPoly) {
        add_slot(&mut self.z, i, x, WPoly::is_zero);
    }

    pub fn a_slot(&self, k: usize) -> Tensor2 {
        self.a.get(&k).cloned().unwrap_or_default()
    }

    pub fn b_slot(&self, k: usize) -> Tensor2 {
        self.b.get(&k).cloned().unwrap_or_default()
    }

    pub fn z_slot(&self, i: usize) -> WPoly {
        self.z.get(&i).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> HTriple {
        let mut out = HTriple::zero();
        for (k, x) in &self.a {
            out.add_a(*k, x.scale(c));
        }
        for (k, x) in &self.b {
            out.add_b(*k, x.scale(c));
        }
        for (i, x) in &self.z {
            out.add_z(*i, x.scale(c));
        }
        out
    }

    pub fn add(&self, other: &HTriple) -> HTriple {
        let mut out = self.clone();
        for (k, x) in &other.a {
            out.add_a(*k, x.clone());
        }
        for (k, x) in &other.b {
            out.add_b(*k, x.clone());
        }
        for (i, x) in &other.z {
            out.add_z(*i, x.clone());
        }
        out
    }

    /// Largest index carrying a nonzero `a` or `b` slot.
    pub fn max_k(&self) -> usize {
        self.a
            .keys()
            .chain(self.b.keys())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Coordinates of the class of `self` modulo the image of `j`; they all
    /// vanish exactly when `self ∈ Im j`.
    pub fn coordinates_mod_im_j(&self) -> Vec<(HKey, Rational)> {
        let unit = (Composition::empty(), Composition::empty());
        let mut out = Vec::new();
        for (k, t) in &self.a {
            for (key, c) in t.terms() {
                if *key == unit {
                    out.push((HKey::Unit(*k), c.clone()));
                } else {
                    out.push((HKey::A(*k, key.0.clone(), key.1.clone()), c.clone()));
                }
            }
        }
        for (k, t) in &self.b {
            for (key, c) in t.terms() {
                if *key == unit {
                    out.push((HKey::Unit(*k), -c));
                } else {
                    out.push((HKey::B(*k, key.0.clone(), key.1.clone()), c.clone()));
                }
            }
        }
        for (i, w) in &self.z {
            for (c, q) in w.terms() {
                out.push((HKey::Z(*i, c.clone()), q.clone()));
            }
        }
        out
    }

    pub fn to_json(&self) -> HTripleJson {
        HTripleJson {
            a: self
                .a
                .iter()
                .map(|(k, t)| SlotJson {
                    k: *k,
                    tensor: t.to_json(),
                })
                .collect(),
            b: self
                .b
                .iter()
                .map(|(k, t)| SlotJson {
                    k: *k,
                    tensor: t.to_json(),
                })
                .collect(),
            z: self
                .z
                .iter()
                .map(|(i, w)| ZSlotJson {
                    i: *i,
                    wpoly: w.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(js: &HTripleJson) -> Result<HTriple> {
        let mut out = HTriple::zero();
        for s in &js.a {
            out.add_a(s.k, Tensor2::from_json(&s.tensor)?);
        }
        for s in &js.b {
            out.add_b(s.k, Tensor2::from_json(&s.tensor)?);
        }
        for s in &js.z {
            out.add_z(s.i, WPoly::from_json(&s.wpoly)?);
        }
        Ok(out)
    }
}

impl fmt::Display for HTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, t) in &self.a {
            parts.push(format!("a_{k} = {}", t.display()));
        }
        for (k, t) in &self.b {
            parts.push(format!("b_{k} = {}", t.display()));
        }
        for (i, w) in &self.z {
            parts.push(format!("z_{i} = {}", w.display()));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join("; "))
        }
    }
}

/// Coordinate labels for [`HTriple::coordinates_mod_im_j`]. `Unit(k)` is
/// `a_k(1⊗1) - b_k(1⊗1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HKey {
    A(usize, Composition, Composition),
    B(usize, Composition, Composition),
    Z(usize, Composition),
    Unit(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotJson {
    pub k: usize,
    pub tensor: Vec<TensorTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSlotJson {
    pub i: usize,
    pub wpoly: Vec<WTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTripleJson {
    pub a: Vec<SlotJson>,
    pub b: Vec<SlotJson>,
    pub z: Vec<ZSlotJson>,
}

/// The map `H = (⊕ L_{k+1}) ⊕ (⊕ R_{k+1}) ⊕ (⊕ M_{i+1})`.
pub fn map_h_big(v: &NCPoly) -> Result<HTriple> {
    v.ensure_v0()?;
    let mut cache = DeltaCache::new();
    Ok(map_h_big_cached(v, &mut cache))
}

pub(crate) fn map_h_big_cached(v: &NCPoly, cache: &mut DeltaCache) -> HTriple {
    let mut out = HTriple::zero();
    for (w, c) in v.terms() {
        out = out.add(&h_of_word(&word_runs(w), cache).scale(c));
    }
    out
}

/// `H` of the single word with exponents `runs`.
pub(crate) fn h_of_word(runs: &[usize], cache: &mut DeltaCache) -> HTriple {
    let l = runs.len() - 1;
    let mut out = HTriple::zero();
    out.add_a(runs[l] - 1, reduced(cache, &runs[..l]));
    out.add_b(runs[0] - 1, reduced(cache, &runs[1..]));
    for i in 1..=runs[0].max(runs[l]) {
        out.add_z(i - 1, mix_term(runs, i));
    }
    out
}

/// A sequence `n ↦ s(n) ∈ W⊗W` for `n > 0`, evaluated on demand and memoized.
pub struct DeltaDerivationSeq {
    rule: Box<dyn Fn(usize) -> Tensor2>,
    memo: RefCell<HashMap<usize, Tensor2>>,
}

impl DeltaDerivationSeq {
    pub fn from_fn(rule: impl Fn(usize) -> Tensor2 + 'static) -> DeltaDerivationSeq {
        DeltaDerivationSeq {
            rule: Box::new(rule),
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// `s(n)`; panics for `n = 0`.
    pub fn at(&self, n: usize) -> Tensor2 {
        assert!(n >= 1, "sequences are indexed by positive integers");
        if let Some(t) = self.memo.borrow().get(&n) {
            return t.clone();
        }
        let t = (self.rule)(n);
        self.memo.borrow_mut().insert(n, t.clone());
        t
    }

    /// Whether `s(n) = 0` for `1 ≤ n ≤ n_max`.
    pub fn vanishes_up_to(&self, n_max: usize) -> bool {
        (1..=n_max).all(|n| self.at(n).is_zero())
    }
}

/// `h(t)(n) = sum_k (a_k Δ(n+k) - Δ(n+k) b_k) + sum_i (z_i⊗ỹ_{n+i} + ỹ_{n+i}⊗z_i)`.
pub fn map_h(t: &HTriple) -> DeltaDerivationSeq {
    let t = t.clone();
    DeltaDerivationSeq::from_fn(move |n| eval_h(&t, n))
}

/// Pointwise value of [`map_h`].
pub fn eval_h(t: &HTriple, n: usize) -> Tensor2 {
    let mut out = Tensor2::zero();
    for (k, a) in &t.a {
        out += &a.mul(&delta_seq((n + k) as i64).unwrap());
    }
    for (k, b) in &t.b {
        out -= &delta_seq((n + k) as i64).unwrap().mul(b);
    }
    for (i, z) in &t.z {
        let y = WPoly::from_parts(&[n + i]);
        out += &Tensor2::tensor(z, &y);
        out += &Tensor2::tensor(&y, z);
    }
    out
}

/// `i(s)(ỹ_c) = sum_i Δ^W(ỹ_{c_1}..ỹ_{c_{i-1}}) s(c_i) Δ^W(ỹ_{c_{i+1}}..ỹ_{c_l})`.
pub fn map_i_eval(s: &DeltaDerivationSeq, c: &Composition) -> Tensor2 {
    let mut cache = DeltaCache::new();
    map_i_eval_cached(s, c, &mut cache)
}

fn map_i_eval_cached(s: &DeltaDerivationSeq, c: &Composition, cache: &mut DeltaCache) -> Tensor2 {
    let mut out = Tensor2::zero();
    for (i, n) in c.parts().enumerate() {
        let left = cache.monomial(&c.slice(0, i)).clone();
        let right = cache.monomial(&c.slice(i + 1, c.len())).clone();
        out += &left.mul(&s.at(n)).mul(&right);
    }
    out
}

/// `i(s)` on a polynomial.
pub fn map_i_eval_poly(s: &DeltaDerivationSeq, w: &WPoly) -> Tensor2 {
    let mut cache = DeltaCache::new();
    let mut out = Tensor2::zero();
    for (c, q) in w.terms() {
        out.add_scaled(&map_i_eval_cached(s, c, &mut cache), q);
    }
    out
}

/// `j(c) = (c·1⊗1, c·1⊗1, 0)`.
pub fn map_j(c: &BTreeMap<usize, Rational>) -> HTriple {
    let mut out = HTriple::zero();
    for (k, x) in c {
        out.add_a(*k, Tensor2::unit().scale(x));
        out.add_b(*k, Tensor2::unit().scale(x));
    }
    out
}

/// `Some(c)` with `j(c) = t` if `t ∈ Im j`, else `None`.
pub fn in_im_j(t: &HTriple) -> Option<BTreeMap<usize, Rational>> {
    if !t.z.is_empty() {
        return None;
    }
    let unit = (Composition::empty(), Composition::empty());
    let mut cert = BTreeMap::new();
    for k in t.a.keys().chain(t.b.keys()) {
        let (a, b) = (t.a_slot(*k), t.b_slot(*k));
        if a != b || a.len() != 1 {
            return None;
        }
        cert.insert(*k, a.coeff(&unit));
    }
    if map_j(&cert) == *t {
        Some(cert)
    } else {
        None
    }
}

/// Checks `(v·Δ^W)(ỹ_n) = h(H(v))(n)` for `1 ≤ n ≤ n_max`.
pub fn verify_decomposition(v: &NCPoly, n_max: usize) -> Result<bool> {
    let t = map_h_big(v)?;
    for n in 1..=n_max {
        if act_w(v, &WPoly::from_parts(&[n]))? != eval_h(&t, n) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `N(b,z) = max(deg^{(1)}(b_k), deg^{(2)}(b_k), deg(z_i))`.
pub fn bound_n(t: &HTriple) -> usize {
    let b = t.b.values().map(|x| deg1(x).max(deg2(x)));
    let z = t.z.values().map(deg);
    b.chain(z).max().unwrap_or(0)
}

/// `Ñ(a,z) = max(deg'^{(1)}(a_k), deg'^{(2)}(a_k), deg'(z_i))`.
pub fn bound_n_prime(t: &HTriple) -> usize {
    let a = t.a.values().map(|x| deg1_prime(x).max(deg2_prime(x)));
    let z = t.z.values().map(deg_prime);
    a.chain(z).max().unwrap_or(0)
}

/// Bound such that `h(t)` vanishes on `1..=2·bound+4` only if `t ∈ Im j`.
pub fn window_bound(t: &HTriple) -> usize {
    bound_n(t).max(bound_n_prime(t)).max(t.max_k())
}

/// `(∂_n⊗∂_{n+k})(h(t)(2n))`.
pub fn unprimed_extract(t: &HTriple, k: usize, n: usize) -> Tensor2 {
    eval_h(t, 2 * n).apply(|c| partial_mono(n, c), |c| partial_mono(n + k, c))
}

/// `(∂'_n⊗∂'_{n+k})(h(t)(2n))`.
pub fn primed_extract(t: &HTriple, k: usize, n: usize) -> Tensor2 {
    eval_h(t, 2 * n).apply(
        |c| partial_prime_mono(n, c),
        |c| partial_prime_mono(n + k, c),
    )
}

/// `((ε∘∂_{n+i})⊗id)(h(0,0,z)(n))`.
pub fn z_extract(t: &HTriple, i: usize, n: usize) -> WPoly {
    let only_z = HTriple {
        z: t.z.clone(),
        ..HTriple::default()
    };
    eval_h(&only_z, n).contract_left(|c| {
        let p = partial_mono(n + i, c);
        p.terms()
            .map(|(c, q)| q * epsilon_mono(c))
            .fold(Rational::zero(), |acc, x| acc + x)
    })
}

/// Stable value of [`unprimed_extract`]: `a_k - ε⊗ε(b_k)·1⊗1`.
pub fn unprimed_limit(t: &HTriple, k: usize) -> Tensor2 {
    &t.a_slot(k) - &Tensor2::unit().scale(&epsilon2(&t.b_slot(k)))
}

/// Stable value of [`primed_extract`]: `-b_k + ε⊗ε(a_k)·1⊗1`.
pub fn primed_limit(t: &HTriple, k: usize) -> Tensor2 {
    &Tensor2::unit().scale(&epsilon2(&t.a_slot(k))) - &t.b_slot(k)
}

/// Which of the three stabilizing sequences a check refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Unprimed,
    Primed,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationCheck {
    pub kind: SequenceKind,
    pub index: usize,
    /// The sequence is checked to equal its limit for `threshold < n`.
    pub threshold: usize,
    pub n_checked: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationReport {
    pub bound_n: usize,
    pub bound_n_prime: usize,
    pub checks: Vec<StabilizationCheck>,
}

impl StabilizationReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

/// Checks, for `0 ≤ k ≤ k_max`, that the three extraction sequences equal
/// their limits at the first `n_max` indices past the stabilization
/// threshold. For the `a`/`b` sequences the threshold is `max(N, k)`
/// (resp. `max(Ñ, k)`): below `n = k` the term `ỹ_0⊗ỹ_{2n+k'}` of
/// `Δ(2n+k')` can still reach slot `k`.
pub fn stabilization_suite(t: &HTriple, k_max: usize, n_max: usize) -> StabilizationReport {
    let n_b = bound_n(t);
    let n_a = bound_n_prime(t);
    let n_z = t.z.values().map(deg).max().unwrap_or(0);
    let mut checks = Vec::new();
    for k in 0..=k_max {
        let thr = n_b.max(k);
        let limit = unprimed_limit(t, k);
        let ok = (thr + 1..=thr + n_max).all(|n| unprimed_extract(t, k, n) == limit);
        checks.push(StabilizationCheck {
            kind: SequenceKind::Unprimed,
            index: k,
            threshold: thr,
            n_checked: n_max,
            ok,
        });
        let thr = n_a.max(k);
        let limit = primed_limit(t, k);
        let ok = (thr + 1..=thr + n_max).all(|n| primed_extract(t, k, n) == limit);
        checks.push(StabilizationCheck {
            kind: SequenceKind::Primed,
            index: k,
            threshold: thr,
            n_checked: n_max,
            ok,
        });
        let limit = t.z_slot(k);
        let ok = (n_z + 1..=n_z + n_max).all(|n| z_extract(t, k, n) == limit);
        checks.push(StabilizationCheck {
            kind: SequenceKind::Z,
            index: k,
            threshold: n_z,
            n_checked: n_max,
            ok,
        });
    }
    StabilizationReport {
        bound_n: n_b,
        bound_n_prime: n_a,
        checks,
    }
}

/// JSON helper used by reports: `{k: coeff}` as strings.
pub fn certificate_json(c: &BTreeMap<usize, Rational>) -> BTreeMap<usize, String> {
    c.iter().map(|(k, q)| (*k, format_rational(q))).collect()
}

pub fn certificate_from_json(c: &BTreeMap<usize, String>) -> Result<BTreeMap<usize, Rational>> {
    c.iter()
        .map(|(k, s)| Ok((*k, parse_rational(s)?)))
        .collect()
}
