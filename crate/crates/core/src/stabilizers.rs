//! Graded stabilizers of `Δ^W` and `Δ^M`.
//!
//! `v·Δ^W = 0` holds exactly when `H(v) ∈ Im j`, so `stab_{V0}(Δ^W)[d]` is
//! the kernel of a finite linear map on the word basis of `V0[d]`. The Lie
//! versions pull back along `θ` over the Lyndon basis. On the module side,
//! `stab_lie(Δ^M)[d]` is the set of `x` with `θ(x)·1_M` primitive, except in
//! degree 2 where it vanishes.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::coproducts::{delta_m_reduced, is_primitive, DeltaCache};
use crate::decomposition::{h_of_word, in_im_j, map_h_big_cached, HKey};
use crate::derivations::{act_m, theta};
use crate::error::{AlgebraError, Result};
use crate::freealg::{lyndon_basis, witt_dimension, LyndonElement, NCPoly, Word};
use crate::linalg::{in_span, rref, KernelProblem};
use crate::rational::{format_rational, Rational};
use crate::walgebra::{to_m, word_runs, Composition, MElem, WPoly};

/// The ambient basis a [`GradedSubspace`] is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    /// Words of length `d`, in increasing order.
    Words,
    /// `lyndon_basis(d)`, in increasing order of Lyndon words.
    Lyndon,
}

/// A subspace of a homogeneous component, stored as its reduced echelon
/// basis; equal subspaces have identical bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSubspace {
    pub degree: usize,
    pub ambient: Ambient,
    pub basis: Vec<Vec<Rational>>,
}

impl GradedSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        match self.ambient {
            Ambient::Words => 1 << self.degree,
            Ambient::Lyndon => witt_dimension(self.degree),
        }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        in_span(&self.basis, v)
    }

    pub fn is_subspace_of(&self, other: &GradedSubspace) -> bool {
        self.degree == other.degree
            && self.ambient == other.ambient
            && self.basis.iter().all(|v| other.contains(v))
    }

    /// The basis vectors as elements of `V`.
    pub fn elements(&self) -> Vec<NCPoly> {
        let ambient = ambient_elements(self.ambient, self.degree);
        self.basis.iter().map(|v| combine(&ambient, v)).collect()
    }

    /// Basis vectors as lists of `p/q` strings.
    pub fn coordinates_json(&self) -> Vec<Vec<String>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(format_rational).collect())
            .collect()
    }
}

fn ambient_elements(ambient: Ambient, d: usize) -> Vec<NCPoly> {
    match ambient {
        Ambient::Words => Word::all_of_length(d).map(NCPoly::word).collect(),
        Ambient::Lyndon => lyndon_basis(d).into_iter().map(|l| l.poly).collect(),
    }
}

fn combine(elements: &[NCPoly], v: &[Rational]) -> NCPoly {
    let mut out = NCPoly::zero();
    for (e, c) in elements.iter().zip(v) {
        if !c.is_zero() {
            out += &e.scale(c);
        }
    }
    out
}

fn check_degree(d: usize) -> Result<()> {
    if d < 1 {
        return Err(AlgebraError::Degree { min: 1, got: d });
    }
    Ok(())
}

/// Per-degree data shared by the stabilizer computations: the coordinates
/// of `H(w)` modulo `Im j` for every word `w` of length `d`.
pub struct DegreeData {
    degree: usize,
    words: Vec<Word>,
    word_index: BTreeMap<Word, usize>,
    h_coords: Vec<Vec<(HKey, Rational)>>,
    lyndon: Vec<LyndonElement>,
}

impl DegreeData {
    pub fn new(d: usize) -> Result<DegreeData> {
        check_degree(d)?;
        let words: Vec<Word> = Word::all_of_length(d).collect();
        let mut cache = DeltaCache::new();
        let h_coords = words
            .iter()
            .map(|w| h_of_word(&word_runs(w), &mut cache).coordinates_mod_im_j())
            .collect();
        let word_index = words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        Ok(DegreeData {
            degree: d,
            words,
            word_index,
            h_coords,
            lyndon: lyndon_basis(d),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coordinates of `H(v) mod Im j` for `v` homogeneous of this degree.
    fn h_column(&self, v: &NCPoly) -> Vec<(HKey, Rational)> {
        let mut out = Vec::new();
        for (w, c) in v.terms() {
            let idx = self.word_index[w];
            out.extend(self.h_coords[idx].iter().map(|(k, q)| (k.clone(), q * c)));
        }
        out
    }

    /// `θ` restricted to this degree. In degree 1 it kills `e0` and doubles `e1`.
    fn theta_homogeneous(&self, x: &NCPoly) -> NCPoly {
        theta(x).component(self.degree)
    }

    pub fn stab_w_v0(&self) -> GradedSubspace {
        let mut kp = KernelProblem::new();
        for coords in &self.h_coords {
            kp.add_column(coords.iter().cloned());
        }
        GradedSubspace {
            degree: self.degree,
            ambient: Ambient::Words,
            basis: kp.kernel(),
        }
    }

    pub fn stab_w_lie(&self) -> GradedSubspace {
        let mut kp = KernelProblem::new();
        for l in &self.lyndon {
            kp.add_column(self.h_column(&self.theta_homogeneous(&l.poly)));
        }
        GradedSubspace {
            degree: self.degree,
            ambient: Ambient::Lyndon,
            basis: kp.kernel(),
        }
    }

    pub fn stab_m_lie(&self) -> GradedSubspace {
        module_stabilizer(self.degree, &self.lyndon)
    }

    /// Whether every element of `stab_w_v0` has a primitive image in `M`.
    pub fn check_inclusion_aux(&self, stab: &GradedSubspace) -> bool {
        stab.elements().iter().all(|v| is_primitive(&to_m(v)))
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }
}

/// `stab_{V0}(Δ^W)[d]` over the word basis.
pub fn stab_w_v0(d: usize) -> Result<GradedSubspace> {
    Ok(DegreeData::new(d)?.stab_w_v0())
}

/// `stab_{lie}(Δ^W)[d] = {x : H(θ(x)) ∈ Im j}` over the Lyndon basis.
pub fn stab_w_lie(d: usize) -> Result<GradedSubspace> {
    Ok(DegreeData::new(d)?.stab_w_lie())
}

/// `stab_{lie}(Δ^M)[d]` over the Lyndon basis.
pub fn stab_m_lie(d: usize) -> Result<GradedSubspace> {
    check_degree(d)?;
    Ok(module_stabilizer(d, &lyndon_basis(d)))
}

/// Zero in degree 2; elsewhere the `x` with `θ(x)·1_M` primitive.
fn module_stabilizer(d: usize, lyndon: &[LyndonElement]) -> GradedSubspace {
    let basis = if d == 2 {
        Vec::new()
    } else {
        let mut kp = KernelProblem::new();
        for l in lyndon {
            kp.add_column(delta_m_reduced(&to_m(&theta(&l.poly))).into_terms());
        }
        kp.kernel()
    };
    GradedSubspace {
        degree: d,
        ambient: Ambient::Lyndon,
        basis,
    }
}

/// `{x ∈ lie[d] : (x∗Δ^M)(m) = 0 for every composition m of weight ≤ max_weight}`,
/// computed from the action itself. For a large enough weight bound this
/// contains `stab_m_lie(d)`, with equality once the bound is large enough.
pub fn stab_m_lie_direct(d: usize, max_weight: usize) -> Result<GradedSubspace> {
    check_degree(d)?;
    let comps: Vec<Composition> = (0..=max_weight)
        .flat_map(|w| {
            if w == 0 {
                vec![Composition::empty()]
            } else {
                Composition::all_of_weight(w)
            }
        })
        .collect();
    let mut kp = KernelProblem::new();
    for l in lyndon_basis(d) {
        let mut col = Vec::new();
        for (mi, c) in comps.iter().enumerate() {
            let val = act_m(&l.poly, &MElem(WPoly::from_comp(c.clone())))?;
            col.extend(val.into_terms().map(|(key, q)| ((mi, key), q)));
        }
        kp.add_column(col);
    }
    Ok(GradedSubspace {
        degree: d,
        ambient: Ambient::Lyndon,
        basis: kp.kernel(),
    })
}

/// `stab_{V0}(Δ^W)[d] ⊆ (−·1_M)^{-1}(P(M))`.
pub fn check_inclusion_aux(d: usize) -> Result<bool> {
    let data = DegreeData::new(d)?;
    Ok(data.check_inclusion_aux(&data.stab_w_v0()))
}

/// Whether `x ∈ V0` satisfies `H(x) ∈ Im j`, checked slot by slot.
pub fn stabilizes_w(x: &NCPoly) -> Result<bool> {
    x.ensure_v0()?;
    let mut cache = DeltaCache::new();
    Ok(in_im_j(&map_h_big_cached(x, &mut cache)).is_some())
}

/// Result of comparing the two Lie stabilizers in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainReport {
    pub degree: usize,
    pub dim_lie: usize,
    pub dim_stab_w: usize,
    pub dim_stab_m: usize,
    /// Identical echelon bases.
    pub equal: bool,
    /// Every basis vector of the module stabilizer passes the `Im j` test.
    pub m_subset_w: bool,
    pub basis_w: Vec<Vec<String>>,
    pub basis_m: Vec<Vec<String>>,
    /// `stab_{V0}(Δ^W)[d]` maps into primitives of `M`.
    pub inclusion_aux: bool,
    pub dim_stab_w_v0: usize,
}

pub fn verify_main_equality(d: usize) -> Result<MainReport> {
    let data = DegreeData::new(d)?;
    let w = data.stab_w_lie();
    let m = data.stab_m_lie();
    let mut m_subset_w = true;
    for x in m.elements() {
        m_subset_w &= stabilizes_w(&theta(&x).component(d))?;
    }
    let v0 = data.stab_w_v0();
    Ok(MainReport {
        degree: d,
        dim_lie: witt_dimension(d),
        dim_stab_w: w.dim(),
        dim_stab_m: m.dim(),
        equal: w == m,
        m_subset_w,
        basis_w: w.coordinates_json(),
        basis_m: m.coordinates_json(),
        inclusion_aux: data.check_inclusion_aux(&v0),
        dim_stab_w_v0: v0.dim(),
    })
}

/// Canonical echelon basis of the span of arbitrary coordinate vectors.
pub fn span(degree: usize, ambient: Ambient, vectors: Vec<Vec<Rational>>) -> GradedSubspace {
    GradedSubspace {
        degree,
        ambient,
        basis: rref(vectors),
    }
}

/// Coordinates of a homogeneous Lie element over `lyndon_basis(d)`.
pub fn lyndon_coordinates(x: &NCPoly, d: usize) -> Option<Vec<Rational>> {
    let basis = lyndon_basis(d);
    let mut kp = KernelProblem::new();
    for l in &basis {
        kp.add_column(l.poly.terms().map(|(w, c)| (*w, c.clone())));
    }
    kp.add_column(x.terms().map(|(w, c)| (*w, -c)));
    // Lyndon elements are independent, so the kernel is at most a line and,
    // when it exists, has its last coordinate nonzero.
    let ker = kp.kernel();
    let v = ker.into_iter().find(|v| !v[basis.len()].is_zero());
    match v {
        Some(v) => {
            let s = v[basis.len()].clone();
            Some(v[..basis.len()].iter().map(|c| c / &s).collect())
        }
        None if x.is_zero() => Some(vec![Rational::zero(); basis.len()]),
        None => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::ihara_bracket;
    use crate::rational::int;

    #[test]
    fn degree_one() {
        let w = stab_w_lie(1).unwrap();
        assert_eq!(w.dim(), 2);
        let m = stab_m_lie(1).unwrap();
        assert_eq!(m, w);
        let v0 = stab_w_v0(1).unwrap();
        assert_eq!(v0.dim(), 2);
        assert!(v0.contains(&[int(1), int(0)]));
        assert!(v0.contains(&[int(0), int(1)]));
    }

    #[test]
    fn degree_two() {
        assert_eq!(stab_w_lie(2).unwrap().dim(), 0);
        assert_eq!(stab_m_lie(2).unwrap().dim(), 0);
        let th = theta(&NCPoly::e0().bracket(&NCPoly::e1()));
        let v0 = stab_w_v0(2).unwrap();
        let coords: Vec<Rational> = Word::all_of_length(2).map(|w| th.coeff(&w)).collect();
        assert!(!v0.contains(&coords));
        assert!(!stabilizes_w(&th).unwrap());
    }

    #[test]
    fn degree_three() {
        assert_eq!(stab_w_lie(3).unwrap().dim(), 1);
        assert_eq!(stab_m_lie(3).unwrap().dim(), 1);
        assert_eq!(stab_w_lie(3).unwrap(), stab_m_lie(3).unwrap());
    }

    #[test]
    fn main_reports_low_degree() {
        for d in 1..=5 {
            let r = verify_main_equality(d).unwrap();
            assert!(
                r.equal && r.m_subset_w && r.inclusion_aux,
                "degree {d}: {r:?}"
            );
        }
        assert!(verify_main_equality(0).is_err());
    }

    #[test]
    fn direct_module_stabilizer_agrees() {
        for d in 1..=4 {
            let direct = stab_m_lie_direct(d, d + 4).unwrap();
            assert_eq!(direct, stab_m_lie(d).unwrap(), "degree {d}");
        }
    }

    #[test]
    fn lie_closure_low_degree() {
        let gens: Vec<(usize, Vec<NCPoly>)> = (1..=4)
            .map(|d| (d, stab_w_lie(d).unwrap().elements()))
            .collect();
        for (d1, xs) in &gens {
            for (d2, ys) in &gens {
                if d1 + d2 > 5 {
                    continue;
                }
                let target = stab_w_lie(d1 + d2).unwrap();
                for x in xs {
                    for y in ys {
                        let b = ihara_bracket(x, y).unwrap();
                        let c = lyndon_coordinates(&b, d1 + d2).unwrap();
                        assert!(target.contains(&c));
                    }
                }
            }
        }
    }

    #[test]
    fn lyndon_coordinates_roundtrip() {
        let basis = lyndon_basis(4);
        let x = &basis[0].poly.scale(&int(3)) - &basis[2].poly;
        let c = lyndon_coordinates(&x, 4).unwrap();
        assert_eq!(c, vec![int(3), int(0), int(-1)]);
        assert!(lyndon_coordinates(&NCPoly::from_word_str("0011").unwrap(), 4).is_none());
    }
}
