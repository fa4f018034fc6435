//! The harmonic coproduct `Δ^W` on `W`, its module version `Δ^M` on `M`, the
//! sequence `Δ(n) = -Δ^W(ỹ_n)`, and primitive elements of `M`.

use std::collections::HashMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{AlgebraError, Result};
use crate::linalg::KernelProblem;
use crate::rational::Rational;
use crate::walgebra::{Composition, MElem, Tensor2, WPoly, WTermJson};

/// `Δ^W(ỹ_n) = ỹ_n⊗1 + 1⊗ỹ_n - sum_{0<i<n} ỹ_i⊗ỹ_{n-i}`.
pub fn delta_w_generator(n: usize) -> Tensor2 {
    assert!(n >= 1);
    let y = |a: usize| {
        if a == 0 {
            Composition::empty()
        } else {
            Composition::new(&[a])
        }
    };
    let mut out = Tensor2::zero();
    out.add_term((y(n), y(0)), Rational::one());
    out.add_term((y(0), y(n)), Rational::one());
    for i in 1..n {
        out.add_term((y(i), y(n - i)), -Rational::one());
    }
    out
}

/// Memo table for `Δ^W` on monomials, filled by multiplicativity.
#[derive(Default, Debug, Clone)]
pub struct DeltaCache {
    table: HashMap<Composition, Tensor2>,
}

impl DeltaCache {
    pub fn new() -> DeltaCache {
        DeltaCache::default()
    }

    /// `Δ^W(ỹ_c)`.
    pub fn monomial(&mut self, c: &Composition) -> &Tensor2 {
        if !self.table.contains_key(c) {
            let value = match c.last() {
                None => Tensor2::unit(),
                Some(n) => {
                    let head = c.without_last();
                    self.monomial(&head).mul(&delta_w_generator(n))
                }
            };
            self.table.insert(c.clone(), value);
        }
        &self.table[c]
    }

    pub fn apply(&mut self, a: &WPoly) -> Tensor2 {
        let mut out = Tensor2::zero();
        for (c, q) in a.terms() {
            out.add_scaled(self.monomial(c), q);
        }
        out
    }

    /// `(Δ^W - id⊗1 - 1⊗id)(ỹ_c)`.
    pub fn reduced_monomial(&mut self, c: &Composition) -> Tensor2 {
        let mut out = self.monomial(c).clone();
        let one = Composition::empty();
        out.add_term((c.clone(), one.clone()), -Rational::one());
        out.add_term((one, c.clone()), -Rational::one());
        out
    }

    pub fn reduced(&mut self, a: &WPoly) -> Tensor2 {
        let mut out = Tensor2::zero();
        for (c, q) in a.terms() {
            out.add_scaled(&self.reduced_monomial(c), q);
        }
        out
    }
}

/// The algebra morphism `Δ^W : W → W⊗W`.
pub fn delta_w(a: &WPoly) -> Tensor2 {
    DeltaCache::new().apply(a)
}

/// `Δ(n) = -Δ^W(ỹ_n) = sum_{i=0}^{n} ỹ_i⊗ỹ_{n-i}`, for `n ≥ 1`.
pub fn delta_seq(n: i64) -> Result<Tensor2> {
    if n < 1 {
        return Err(AlgebraError::Degree {
            min: 1,
            got: n.max(0) as usize,
        });
    }
    Ok(-delta_w_generator(n as usize))
}

/// `Δ^M(w·1_M) = Δ^W(w)·1_M⊗1_M`, with `M⊗M` keyed like `W⊗W`.
pub fn delta_m(m: &MElem) -> Tensor2 {
    delta_w(m.as_w())
}

/// `(Δ^M - id⊗1_M - 1_M⊗id)(m)`; zero exactly when `m` is primitive.
pub fn delta_m_reduced(m: &MElem) -> Tensor2 {
    DeltaCache::new().reduced(m.as_w())
}

pub fn is_primitive(m: &MElem) -> bool {
    delta_m_reduced(m).is_zero()
}

/// A basis of the primitive elements of `M` in one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveBasis {
    pub degree: usize,
    pub basis: Vec<MElem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveBasisJson {
    pub degree: usize,
    pub dim: usize,
    pub basis: Vec<Vec<WTermJson>>,
}

impl PrimitiveBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_json(&self) -> PrimitiveBasisJson {
        PrimitiveBasisJson {
            degree: self.degree,
            dim: self.dim(),
            basis: self.basis.iter().map(|m| m.as_w().to_json()).collect(),
        }
    }
}

/// `P(M)[d]` as the kernel of `Δ^M - id⊗1_M - 1_M⊗id` on `M[d]`, in reduced
/// echelon form over the compositions of weight `d`.
pub fn primitives_basis(d: usize) -> Result<PrimitiveBasis> {
    if d < 1 {
        return Err(AlgebraError::Degree { min: 1, got: d });
    }
    let comps = Composition::all_of_weight(d);
    let mut cache = DeltaCache::new();
    let mut kp = KernelProblem::new();
    for c in &comps {
        kp.add_column(cache.reduced_monomial(c).into_terms());
    }
    let basis = kp
        .kernel()
        .into_iter()
        .map(|v| MElem(WPoly::from_terms(comps.iter().cloned().zip(v))))
        .collect();
    Ok(PrimitiveBasis { degree: d, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::walgebra::{epsilon2, sigma};
    use num_traits::Zero;

    fn y(parts: &[usize]) -> WPoly {
        WPoly::from_parts(parts)
    }

    fn t(a: &[usize], b: &[usize]) -> Tensor2 {
        Tensor2::tensor(&y(a), &y(b))
    }

    #[test]
    fn generator_values() {
        assert_eq!(delta_w(&y(&[1])), &t(&[1], &[]) + &t(&[], &[1]));
        assert_eq!(
            delta_w(&y(&[2])),
            &(&t(&[2], &[]) + &t(&[], &[2])) - &t(&[1], &[1])
        );
        let sq = &(&t(&[1, 1], &[]) + &t(&[1], &[1]).scale(&int(2))) + &t(&[], &[1, 1]);
        assert_eq!(delta_w(&y(&[1, 1])), sq);
        assert_eq!(delta_w(&WPoly::one()), Tensor2::unit());
    }

    #[test]
    fn sequence_values() {
        assert_eq!(delta_seq(1).unwrap(), -(&t(&[1], &[]) + &t(&[], &[1])));
        assert_eq!(
            delta_seq(2).unwrap(),
            &(&t(&[1], &[1]) - &t(&[2], &[])) - &t(&[], &[2])
        );
        for n in 1..=8 {
            assert!((&delta_seq(n).unwrap() + &delta_w(&y(&[n as usize]))).is_zero());
        }
        assert!(delta_seq(0).is_err());
        assert!(delta_seq(-2).is_err());
    }

    #[test]
    fn module_coproduct() {
        assert_eq!(delta_m(&MElem::unit()), Tensor2::unit());
        assert_eq!(delta_m(&MElem(y(&[2]))), delta_w(&y(&[2])));
        let m = MElem(&y(&[2]) + &y(&[1, 1]).scale(&frac(1, 2)));
        assert!(is_primitive(&m));
        assert!(!is_primitive(&MElem(y(&[2]))));
    }

    #[test]
    fn primitive_bases_low_degree() {
        let p1 = primitives_basis(1).unwrap();
        assert_eq!(p1.basis, vec![MElem(y(&[1]))]);
        let p2 = primitives_basis(2).unwrap();
        assert_eq!(p2.basis, vec![MElem(&y(&[1, 1]) + &y(&[2]).scale(&int(2)))]);
        assert!(primitives_basis(0).is_err());
        let js = serde_json::to_value(p2.to_json()).unwrap();
        assert_eq!(js["dim"], 1);
        assert_eq!(js["degree"], 2);
    }

    #[test]
    fn counit_and_cocommutativity_on_generators() {
        for n in 1..=10 {
            let d = delta_w_generator(n);
            assert_eq!(sigma(&d), d);
            assert!(epsilon2(&d).is_zero());
        }
    }
}
