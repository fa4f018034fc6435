//! Seeded generators of random inputs for property checks.
//!
//! All generators draw from a [`ChaCha8Rng`], so a seed fixes every input.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{map_j, HTriple};
use crate::freealg::{lyndon_basis, NCPoly, Word};
use crate::rational::{frac, int, Rational};
use crate::walgebra::{Composition, Tensor2, WPoly};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero small rational: integers in `[-3, 3]` or halves.
pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let n = loop {
        let n = rng.gen_range(-3i64..=3);
        if n != 0 {
            break n;
        }
    };
    if rng.gen_bool(0.25) {
        frac(n, 2)
    } else {
        int(n)
    }
}

pub fn random_word(rng: &mut ChaCha8Rng, d: usize) -> Word {
    Word::new(d, rng.gen_range(0..(1u64 << d)))
}

/// Homogeneous element of `V0[d]` with up to `terms` words.
pub fn random_v0(rng: &mut ChaCha8Rng, d: usize, terms: usize) -> NCPoly {
    assert!(d >= 1);
    let mut out = NCPoly::zero();
    while out.is_zero() {
        for _ in 0..terms.max(1) {
            out.add_term(random_word(rng, d), small_rational(rng));
        }
    }
    out
}

/// Homogeneous element of `lie(e0,e1)[d]`, a random combination of the
/// Lyndon basis with at most `terms` members.
pub fn random_lie(rng: &mut ChaCha8Rng, d: usize, terms: usize) -> NCPoly {
    let basis = lyndon_basis(d);
    let mut out = NCPoly::zero();
    while out.is_zero() {
        for _ in 0..terms.max(1) {
            let l = &basis[rng.gen_range(0..basis.len())];
            out += &l.poly.scale(&small_rational(rng));
        }
    }
    out
}

pub fn random_composition(rng: &mut ChaCha8Rng, weight: usize) -> Composition {
    let mut parts = Vec::new();
    let mut rem = weight;
    while rem > 0 {
        let a = rng.gen_range(1..=rem.min(4));
        parts.push(a);
        rem -= a;
    }
    Composition::new(&parts)
}

/// Element of `W` with monomials of weight at most `max_weight`.
pub fn random_wpoly(rng: &mut ChaCha8Rng, max_weight: usize, terms: usize) -> WPoly {
    let mut out = WPoly::zero();
    for _ in 0..terms {
        let w = rng.gen_range(0..=max_weight);
        out.add_term(random_composition(rng, w), small_rational(rng));
    }
    out
}

/// Element of `W⊗W` with total weight at most `max_weight`.
pub fn random_tensor(rng: &mut ChaCha8Rng, max_weight: usize, terms: usize) -> Tensor2 {
    let mut out = Tensor2::zero();
    for _ in 0..terms {
        let total = rng.gen_range(0..=max_weight);
        let left = rng.gen_range(0..=total);
        let key = (
            random_composition(rng, left),
            random_composition(rng, total - left),
        );
        out.add_term(key, small_rational(rng));
    }
    out
}

pub fn random_sequence(rng: &mut ChaCha8Rng, max_k: usize) -> BTreeMap<usize, Rational> {
    let mut c = BTreeMap::new();
    for k in 0..=max_k {
        if rng.gen_bool(0.5) {
            c.insert(k, small_rational(rng));
        }
    }
    c
}

/// Random triple whose slots have weight at most `max_weight`. One third
/// lie in `Im j`, one third are `Im j` plus a single perturbed slot, and one
/// third are unconstrained.
pub fn random_htriple(rng: &mut ChaCha8Rng, max_weight: usize) -> HTriple {
    let max_k = rng.gen_range(0..=3);
    let base = map_j(&random_sequence(rng, max_k));
    match rng.gen_range(0..3) {
        0 => base,
        1 => {
            let mut t = base;
            let k = rng.gen_range(0..=3);
            match rng.gen_range(0..3) {
                0 => t.add_a(k, random_tensor(rng, max_weight, 2)),
                1 => t.add_b(k, random_tensor(rng, max_weight, 2)),
                _ => t.add_z(k, random_wpoly(rng, max_weight, 2)),
            }
            t
        }
        _ => {
            let mut t = HTriple::zero();
            for k in 0..=rng.gen_range(0..=2) {
                if rng.gen_bool(0.6) {
                    t.add_a(k, random_tensor(rng, max_weight, 2));
                }
                if rng.gen_bool(0.6) {
                    t.add_b(k, random_tensor(rng, max_weight, 2));
                }
                if rng.gen_bool(0.5) {
                    t.add_z(k, random_wpoly(rng, max_weight, 2));
                }
            }
            t
        }
    }
}

/// A fixed pseudo-random linear map `W → W⊗W`: the image of each monomial
/// is derived from `seed` and the monomial alone.
#[derive(Clone, Copy, Debug)]
pub struct RandomTensorMap {
    pub seed: u64,
    pub max_weight: usize,
}

impl crate::derivations::TensorMap for RandomTensorMap {
    fn eval_monomial(&self, c: &Composition) -> Tensor2 {
        // FNV-1a over the seed and the parts, stable across platforms.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for x in std::iter::once(self.seed).chain(c.parts().map(|a| a as u64 | 1 << 56)) {
            for byte in x.to_le_bytes() {
                h = (h ^ byte as u64).wrapping_mul(0x0100_0000_01b3);
            }
        }
        let mut r = rng(h);
        random_tensor(&mut r, self.max_weight, 2)
    }
}
