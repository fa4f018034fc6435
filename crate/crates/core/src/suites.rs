//! Named verification suites and their reports.
//!
//! Every check carries a short anchor naming the property it exercises.
//! Reports are assembled in a fixed order, so equal configurations produce
//! byte-identical output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coproducts::{
    delta_m, delta_m_reduced, delta_w, is_primitive, primitives_basis, DeltaCache,
};
use crate::decomposition::{
    eval_h, in_im_j, map_h, map_h_big, map_j, map_l, stabilization_suite, verify_decomposition,
    window_bound,
};
use crate::derivations::{
    act_w, der_m10, der_v1, der_v10, ihara_bracket, theta, Acted, DerW, TensorMap,
};
use crate::error::AlgebraError;
use crate::freealg::{is_lie_element, lyndon_basis, NCPoly, Word};
use crate::linalg::KernelProblem;
use crate::lincomb::LinComb;
use crate::random::{
    random_composition, random_htriple, random_lie, random_sequence, random_v0, random_wpoly, rng,
    RandomTensorMap,
};
use crate::rational::{int, Rational};
use crate::stabilizers::{
    lyndon_coordinates, span, verify_main_equality, Ambient, DegreeData, GradedSubspace, MainReport,
};
use crate::walgebra::{epsilon, sigma, to_m, w_from_v, w_to_v, Composition, Tensor2, WPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Bracket,
    Theta,
    Coproducts,
    Derivations,
    Decomposition,
    Kerh,
    Square,
    Stab,
    Main,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Bracket,
        Suite::Theta,
        Suite::Coproducts,
        Suite::Derivations,
        Suite::Decomposition,
        Suite::Kerh,
        Suite::Square,
        Suite::Stab,
        Suite::Main,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bracket => "bracket",
            Suite::Theta => "theta",
            Suite::Coproducts => "coproducts",
            Suite::Derivations => "derivations",
            Suite::Decomposition => "decomposition",
            Suite::Kerh => "kerh",
            Suite::Square => "square",
            Suite::Stab => "stab",
            Suite::Main => "main",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn default_max_degree(self) -> usize {
        match self {
            Suite::Stab => 10,
            _ => 8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            "text" => Some(Format::Text),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub max_degree: usize,
    pub n_window: usize,
    pub seed: u64,
    /// Number of random inputs per randomized check.
    pub samples: usize,
    pub format: Format,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> SuiteConfig {
        SuiteConfig {
            suite,
            max_degree: suite.default_max_degree(),
            n_window: 6,
            seed: 0,
            samples: 50,
            format: Format::Text,
        }
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        if self.max_degree < 1 {
            return Err(AlgebraError::Degree {
                min: 1,
                got: self.max_degree,
            });
        }
        if self.n_window < 1 {
            return Err(AlgebraError::Degree {
                min: 1,
                got: self.n_window,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub anchor: &'static str,
    pub input: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub max_degree: usize,
    pub n_window: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub degrees: Vec<MainReport>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => {
                let mut s = String::from("suite,check,anchor,input,status\n");
                for c in &self.checks {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{}",
                        self.suite.name(),
                        csv_field(&c.name),
                        csv_field(c.anchor),
                        csv_field(&c.input),
                        if c.passed { "pass" } else { "fail" }
                    );
                }
                s
            }
            Format::Text => {
                let mut s = format!(
                    "suite {} (max degree {}, window {}, seed {})\n",
                    self.suite.name(),
                    self.max_degree,
                    self.n_window,
                    self.seed
                );
                for c in &self.checks {
                    let _ = write!(
                        s,
                        "{} {} [{}] {}",
                        if c.passed { "PASS" } else { "FAIL" },
                        c.name,
                        c.anchor,
                        c.input
                    );
                    if let Some(d) = &c.detail {
                        let _ = write!(s, " ({d})");
                    }
                    s.push('\n');
                }
                let failed = self.checks.iter().filter(|c| !c.passed).count();
                let _ = writeln!(
                    s,
                    "{} checks, {} failed: {}",
                    self.checks.len(),
                    failed,
                    if self.passed { "PASS" } else { "FAIL" }
                );
                s
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs `f` inside a pool capped by `SHUFFLE_STAB_THREADS`, when set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var("SHUFFLE_STAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1);
    match cap {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

pub fn run(config: &SuiteConfig) -> Result<Report, AlgebraError> {
    config.validate()?;
    let mut ctx = Ctx {
        cfg: config,
        checks: Vec::new(),
        degrees: Vec::new(),
    };
    with_thread_cap(|| match config.suite {
        Suite::Bracket => ctx.bracket(),
        Suite::Theta => ctx.theta(),
        Suite::Coproducts => ctx.coproducts(),
        Suite::Derivations => ctx.derivations(),
        Suite::Decomposition => ctx.decomposition(),
        Suite::Kerh => ctx.kerh(),
        Suite::Square => ctx.square(),
        Suite::Stab => ctx.stab(),
        Suite::Main => ctx.main(),
    });
    let passed = ctx.checks.iter().all(|c| c.passed);
    Ok(Report {
        suite: config.suite,
        max_degree: config.max_degree,
        n_window: config.n_window,
        seed: config.seed,
        passed,
        checks: ctx.checks,
        degrees: ctx.degrees,
    })
}

/// `θ([e0,e1])·Δ^W(ỹ_n)` written out term by term.
pub fn theta_bracket_action_closed_form(n: usize) -> Tensor2 {
    let y = |parts: &[usize]| WPoly::from_parts(parts);
    let one = WPoly::one();
    let two = int(2);
    let q = &y(&[2]) + &y(&[1, 1]);
    let mut out = (&Tensor2::tensor(&y(&[1]), &y(&[n + 1]))
        + &Tensor2::tensor(&y(&[n + 1]), &y(&[1])))
        .scale(&two);
    out -= &(&Tensor2::tensor(&q, &y(&[n])) + &Tensor2::tensor(&y(&[n]), &q)).scale(&two);
    let mut d = &Tensor2::tensor(&y(&[n]), &one) + &Tensor2::tensor(&one, &y(&[n]));
    for k in 1..n {
        d -= &Tensor2::tensor(&y(&[k]), &y(&[n - k]));
    }
    out += &d.mul(&Tensor2::tensor(&y(&[1]), &y(&[1]))).scale(&two);
    out
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    checks: Vec<Check>,
    degrees: Vec<MainReport>,
}

/// Outcome of a randomized check: the index of the first failing sample.
fn first_failure(samples: usize, mut f: impl FnMut(usize) -> bool) -> Option<usize> {
    (0..samples).find(|&i| !f(i))
}

impl Ctx<'_> {
    fn push(
        &mut self,
        name: &str,
        anchor: &'static str,
        input: String,
        passed: bool,
        detail: Option<String>,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            anchor,
            input,
            passed,
            detail,
        });
    }

    fn randomized(
        &mut self,
        name: &str,
        anchor: &'static str,
        salt: u64,
        f: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> bool,
    ) {
        let mut f = f;
        let mut r = rng(self.cfg.seed.wrapping_mul(0x9e37_79b9).wrapping_add(salt));
        let n = self.cfg.samples;
        let fail = first_failure(n, |_| f(&mut r));
        self.push(
            name,
            anchor,
            format!("{n} samples, max degree {}", self.cfg.max_degree),
            fail.is_none(),
            fail.map(|i| format!("sample {i} failed")),
        );
    }

    /// Degrees `(d1,..,dk)`, each at least 1, with sum at most `max_degree`.
    fn degrees(r: &mut rand_chacha::ChaCha8Rng, k: usize, max: usize) -> Option<Vec<usize>> {
        if max < k {
            return None;
        }
        let total = r.gen_range(k..=max);
        let mut cuts: Vec<usize> = (0..k - 1).map(|_| r.gen_range(1..total)).collect();
        cuts.sort();
        cuts.dedup();
        if cuts.len() != k - 1 {
            return Some(vec![1; k]);
        }
        let mut out = Vec::new();
        let mut prev = 0;
        for c in cuts {
            out.push(c - prev);
            prev = c;
        }
        out.push(total - prev);
        Some(out)
    }

    fn bracket(&mut self) {
        let max = self.cfg.max_degree;
        self.push(
            "bracket-e0-e1",
            "e0 and e1 commute for the bracket",
            "<e0,e1>".into(),
            ihara_bracket(&NCPoly::e0(), &NCPoly::e1())
                .unwrap()
                .is_zero(),
            None,
        );
        self.randomized(
            "bracket-antisymmetry",
            "antisymmetry of the bracket",
            1,
            |r| {
                let Some(ds) = Self::degrees(r, 2, max) else {
                    return true;
                };
                let x = random_v0(r, ds[0], 3);
                let y = random_v0(r, ds[1], 3);
                (ihara_bracket(&x, &y).unwrap() + ihara_bracket(&y, &x).unwrap()).is_zero()
            },
        );
        self.randomized(
            "bracket-jacobi",
            "Jacobi identity for the bracket",
            2,
            |r| {
                let Some(ds) = Self::degrees(r, 3, max) else {
                    return true;
                };
                let x = random_v0(r, ds[0], 2);
                let y = random_v0(r, ds[1], 2);
                let z = random_v0(r, ds[2], 2);
                let b = |a: &NCPoly, c: &NCPoly| ihara_bracket(a, c).unwrap();
                let s = b(&x, &b(&y, &z)) + b(&y, &b(&z, &x)) + b(&z, &b(&x, &y));
                s.is_zero()
            },
        );
        self.randomized(
            "bracket-lie-closure",
            "lie(e0,e1) is closed under the bracket",
            3,
            |r| {
                let Some(ds) = Self::degrees(r, 2, max) else {
                    return true;
                };
                let x = random_lie(r, ds[0], 2);
                let y = random_lie(r, ds[1], 2);
                is_lie_element(&ihara_bracket(&x, &y).unwrap()).unwrap()
            },
        );
        self.randomized(
            "der1-commutator",
            "v -> der^(1)_v is a Lie morphism",
            4,
            |r| {
                let Some(ds) = Self::degrees(r, 3, max) else {
                    return true;
                };
                let v = random_v0(r, ds[0], 2);
                let w = random_v0(r, ds[1], 2);
                let a = if r.gen_bool(0.3) {
                    NCPoly::e0()
                } else {
                    random_v0(r, ds[2], 2)
                };
                let lhs = der_v1(&ihara_bracket(&v, &w).unwrap(), &a);
                let rhs = der_v1(&v, &der_v1(&w, &a)) - der_v1(&w, &der_v1(&v, &a));
                lhs == rhs
            },
        );
    }

    fn theta(&mut self) {
        let max = self.cfg.max_degree;
        let c = NCPoly::e0().bracket(&NCPoly::e1());
        let expect = &c
            + &NCPoly::from_word_str("11")
                .unwrap()
                .scale(&crate::rational::frac(1, 2));
        self.push(
            "theta-bracket",
            "theta([e0,e1]) = [e0,e1] + e1^2/2",
            "[e0,e1]".into(),
            theta(&c) == expect,
            None,
        );
        self.push(
            "theta-generators",
            "theta(e0) = 0, theta(e1) = 2 e1",
            "e0, e1".into(),
            theta(&NCPoly::e0()).is_zero() && theta(&NCPoly::e1()) == NCPoly::e1().scale(&int(2)),
            None,
        );
        self.randomized("theta-in-v0", "theta lands in V0", 5, |r| {
            let d = r.gen_range(1..=max);
            theta(&random_lie(r, d, 3)).is_in_v0()
        });
        self.randomized(
            "theta-lie-morphism",
            "theta intertwines the bracket on lie(e0,e1)",
            6,
            |r| {
                let Some(ds) = Self::degrees(r, 2, max) else {
                    return true;
                };
                let x = random_lie(r, ds[0], 2);
                let y = random_lie(r, ds[1], 2);
                let lhs = theta(&ihara_bracket(&x, &y).unwrap());
                let rhs = ihara_bracket(&theta(&x), &theta(&y)).unwrap();
                lhs == rhs
            },
        );
    }

    fn coproducts(&mut self) {
        let max = self.cfg.max_degree;
        self.randomized(
            "coproduct-cocommutative",
            "Delta^W is cocommutative",
            7,
            |r| {
                let a = random_wpoly(r, max, 3);
                sigma(&delta_w(&a)) == delta_w(&a)
            },
        );
        let coassoc = (1..=max).all(|n| coassociative_on(&WPoly::from_parts(&[n])));
        self.push(
            "coproduct-coassociative-generators",
            "Delta^W is coassociative",
            format!("y_n, 1 <= n <= {max}"),
            coassoc,
            None,
        );
        self.randomized(
            "coproduct-coassociative-products",
            "Delta^W is coassociative",
            8,
            |r| coassociative_on(&random_wpoly(r, max.min(6), 2)),
        );
        self.randomized(
            "coproduct-counit",
            "epsilon is a counit for Delta^W",
            9,
            |r| {
                let a = random_wpoly(r, max, 3);
                let d = delta_w(&a);
                let l = d.contract_left(|c| epsilon(&WPoly::from_comp(c.clone())));
                let rr = d.contract_right(|c| epsilon(&WPoly::from_comp(c.clone())));
                l == a && rr == a
            },
        );
        self.randomized(
            "coproduct-multiplicative",
            "Delta^W is an algebra morphism",
            10,
            |r| {
                let a = random_wpoly(r, max / 2 + 1, 2);
                let b = random_wpoly(r, max / 2 + 1, 2);
                delta_w(&a.mul(&b)) == delta_w(&a).mul(&delta_w(&b))
            },
        );
        let compat = (1..=max).all(|w| {
            Composition::all_of_weight(w).into_iter().all(|c| {
                let m = to_m(&w_to_v(&WPoly::from_comp(c.clone())));
                delta_m(&m) == delta_w(&WPoly::from_comp(c))
            })
        });
        self.push(
            "module-coproduct-compatibility",
            "Delta^M(w 1_M) = Delta^W(w) 1_M^2",
            format!("all compositions of weight <= {max}"),
            compat,
            None,
        );
        let mut dims = Vec::new();
        let prim = (1..=max).all(|d| {
            let p = primitives_basis(d).unwrap();
            dims.push(p.dim().to_string());
            p.basis.iter().all(is_primitive)
        });
        self.push(
            "primitives-basis",
            "P(M) as the kernel of Delta^M - id(x)1 - 1(x)id",
            format!("degrees 1..={max}"),
            prim,
            Some(format!("dims {}", dims.join(" "))),
        );
    }

    fn derivations(&mut self) {
        let max = self.cfg.max_degree;
        self.randomized(
            "der10-commutator",
            "v -> der^(10)_v is a Lie morphism",
            11,
            |r| {
                let Some(ds) = Self::degrees(r, 3, max) else {
                    return true;
                };
                let v = random_v0(r, ds[0], 2);
                let w = random_v0(r, ds[1], 2);
                let a = random_v0(r, ds[2], 2);
                let lhs = der_v10(&ihara_bracket(&v, &w).unwrap(), &a);
                let rhs = der_v10(&v, &der_v10(&w, &a)) - der_v10(&w, &der_v10(&v, &a));
                lhs == rhs
            },
        );
        self.randomized(
            "derM10-commutator",
            "v -> der^(M,10)_v is a Lie morphism",
            12,
            |r| {
                let Some(ds) = Self::degrees(r, 3, max) else {
                    return true;
                };
                let v = random_v0(r, ds[0], 2);
                let w = random_v0(r, ds[1], 2);
                let m = to_m(&random_v0(r, ds[2], 3));
                let lhs = der_m10(&ihara_bracket(&v, &w).unwrap(), &m);
                let rhs = &der_m10(&v, &der_m10(&w, &m)).0 - &der_m10(&w, &der_m10(&v, &m)).0;
                lhs.0 == rhs
            },
        );
        self.randomized(
            "der10-preserves-ve0",
            "der^(10)_v preserves V e0",
            13,
            |r| {
                let Some(ds) = Self::degrees(r, 2, max) else {
                    return true;
                };
                let v = random_v0(r, ds[0], 2);
                let u = if ds[1] > 1 {
                    random_v0(r, ds[1] - 1, 2)
                } else {
                    NCPoly::one()
                };
                to_m(&der_v10(&v, &(&u * &NCPoly::e0()))).is_zero()
            },
        );
        self.randomized(
            "derW1-restriction",
            "der^(W,1) is the restriction of der^(V,1)",
            14,
            |r| {
                let Some(ds) = Self::degrees(r, 2, max) else {
                    return true;
                };
                let v = random_v0(r, ds[0], 2);
                let w = WPoly::from_comp(random_composition(r, ds[1]));
                let via_v = w_from_v(&der_v1(&v, &w_to_v(&w))).unwrap();
                DerW::new(&v).apply(&w) == via_v
            },
        );
        self.randomized(
            "action-is-delta-derivation",
            "v.Delta^W is a Delta^W-derivation",
            15,
            |r| {
                let Some(ds) = Self::degrees(r, 3, max) else {
                    return true;
                };
                let v = random_v0(r, ds[0], 2);
                let a = WPoly::from_comp(random_composition(r, ds[1]));
                let b = WPoly::from_comp(random_composition(r, ds[2]));
                let lhs = act_w(&v, &a.mul(&b)).unwrap();
                let rhs = &act_w(&v, &a).unwrap().mul(&delta_w(&b))
                    + &delta_w(&a).mul(&act_w(&v, &b).unwrap());
                lhs == rhs
            },
        );
        let module_max = max.min(6);
        let seed = self.cfg.seed;
        self.randomized(
            "action-module-law",
            "<v,v'>.h = v.(v'.h) - v'.(v.h)",
            16,
            |r| {
                let Some(ds) = Self::degrees(r, 3, module_max) else {
                    return true;
                };
                let v = random_v0(r, ds[0], 2);
                let w = random_v0(r, ds[1], 2);
                let h = RandomTensorMap {
                    seed: seed ^ r.gen::<u64>(),
                    max_weight: 3,
                };
                let a = WPoly::from_comp(random_composition(r, ds[2]));
                let vw = ihara_bracket(&v, &w).unwrap();
                let lhs = Acted::new(&vw, &h).eval(&a);
                let inner_w = Acted::new(&w, &h);
                let inner_v = Acted::new(&v, &h);
                let rhs = &Acted::new(&v, &inner_w).eval(&a) - &Acted::new(&w, &inner_v).eval(&a);
                lhs == rhs
            },
        );
    }

    fn decomposition(&mut self) {
        let max = self.cfg.max_degree;
        let n_window = self.cfg.n_window;
        let words: Vec<Word> = (1..=max).flat_map(Word::all_of_length).collect();
        let bad: Vec<String> = words
            .par_iter()
            .filter(|w| !verify_decomposition(&NCPoly::word(**w), n_window).unwrap())
            .map(|w| w.to_string())
            .collect();
        self.push(
            "decomposition-identity",
            "v.Delta^W = i o h o H(v)",
            format!("{} words of degree <= {max}, n <= {n_window}", words.len()),
            bad.is_empty(),
            (!bad.is_empty()).then(|| format!("first failure {}", bad[0])),
        );
        let th = theta(&NCPoly::e0().bracket(&NCPoly::e1()));
        let closed = (1..=n_window).all(|n| {
            let y = WPoly::from_parts(&[n]);
            act_w(&th, &y).unwrap() == theta_bracket_action_closed_form(n)
        });
        let nonzero_at_two = !act_w(&th, &WPoly::from_parts(&[2])).unwrap().is_zero();
        self.push(
            "theta-bracket-action",
            "closed form of theta([e0,e1]).Delta^W",
            format!("n <= {n_window}"),
            closed && nonzero_at_two,
            None,
        );
        self.randomized("homogeneity", "slot k of H(v) has weight d-k", 17, |r| {
            let d = r.gen_range(1..=max);
            let v = random_v0(r, d, 3);
            let t = map_h_big(&v).unwrap();
            t.a.iter()
                .chain(t.b.iter())
                .all(|(k, x)| x.keys().all(|(a, b)| a.weight() + b.weight() + k == d))
                && t.z
                    .iter()
                    .all(|(i, z)| z.keys().all(|c| c.weight() + i == d))
        });
        let n_win = n_window;
        self.randomized(
            "stabilization",
            "discrete-topology limits of the h-sequences",
            18,
            |r| {
                let t = random_htriple(r, max.min(8));
                stabilization_suite(&t, t.max_k() + 1, n_win.min(3)).all_ok()
            },
        );
    }

    fn kerh(&mut self) {
        let max = self.cfg.max_degree;
        self.randomized("kerh-equals-imj", "Ker h = Im j", 19, |r| {
            let t = random_htriple(r, max.min(8));
            let window = 2 * window_bound(&t) + 4;
            let vanishes = map_h(&t).vanishes_up_to(window);
            let member = in_im_j(&t).is_some();
            vanishes == member && (!member || map_h(&t).vanishes_up_to(window + 8))
        });
        self.randomized("h-after-j", "h o j = 0", 20, |r| {
            let c = random_sequence(r, 5);
            let t = map_j(&c);
            let nonzero = |m: BTreeMap<usize, Rational>| -> BTreeMap<usize, Rational> {
                m.into_iter().filter(|(_, q)| !q.is_zero()).collect()
            };
            in_im_j(&t).map(nonzero) == Some(nonzero(c))
                && (1..=12).all(|n| eval_h(&t, n).is_zero())
        });
    }

    fn square(&mut self) {
        let max = self.cfg.max_degree;
        let words: Vec<Word> = (1..=max).flat_map(Word::all_of_length).collect();
        let ok = words.par_iter().all(|w| {
            let v = NCPoly::word(*w);
            map_l(1, &v).unwrap() == delta_m_reduced(&to_m(&v))
        });
        self.push(
            "commutative-square",
            "(-.1_M)^2 o p_0 o H = Delta^M - id(x)1 - 1(x)id",
            format!("{} words of degree <= {max}", words.len()),
            ok,
            None,
        );
        self.randomized(
            "commutative-triangle",
            "(-.1_M)^2 o p_0 o j = c_0 1_M^2",
            21,
            |r| {
                let c = random_sequence(r, 6);
                let c0 = c.get(&0).cloned().unwrap_or_default();
                map_j(&c).a_slot(0) == Tensor2::unit().scale(&c0)
            },
        );
    }

    fn stab(&mut self) {
        let max = self.cfg.max_degree;
        let per_degree: Vec<(usize, StabSummary)> = (1..=max)
            .into_par_iter()
            .map(|d| (d, stab_summary(d)))
            .collect();
        let by_degree: BTreeMap<usize, StabSummary> = per_degree.into_iter().collect();
        for (d, s) in &by_degree {
            self.push(
                &format!("stab-v0-degree-{d}"),
                "stab_V0(Delta^W) maps into P(M)",
                format!("dim stab_V0 = {}", s.dim_v0),
                s.inclusion_aux,
                None,
            );
            self.push(
                &format!("stab-theta-preimage-degree-{d}"),
                "stab_lie(Delta^W) = theta^-1(stab_V0(Delta^W))",
                format!("dim stab_lie = {}", s.dim_lie),
                s.preimage_consistent,
                None,
            );
            self.push(
                &format!("stab-truncated-degree-{d}"),
                "truncated action test agrees with the Im j test",
                "n <= 8".into(),
                s.truncated_agrees,
                None,
            );
        }
        let mut closure_ok = true;
        for (d1, s1) in &by_degree {
            for (d2, s2) in &by_degree {
                if d1 + d2 > max.min(8) {
                    continue;
                }
                let Some(target) = by_degree.get(&(d1 + d2)) else {
                    continue;
                };
                for x in &s1.lie_elements {
                    for y in &s2.lie_elements {
                        let b = ihara_bracket(x, y).unwrap();
                        let c = lyndon_coordinates(&b, d1 + d2).expect("bracket is Lie");
                        closure_ok &= target.lie_space.contains(&c);
                    }
                }
            }
        }
        self.push(
            "stab-lie-closure",
            "stab_lie(Delta^W) is a Lie subalgebra",
            format!("pairs of degree sum <= {}", max.min(8)),
            closure_ok,
            None,
        );
    }

    fn main(&mut self) {
        let max = self.cfg.max_degree;
        let reports: Vec<MainReport> = (1..=max)
            .into_par_iter()
            .map(|d| verify_main_equality(d).unwrap())
            .collect();
        for r in &reports {
            let anchor = match r.degree {
                1 => "stab_lie(Delta^M)[1] = Q e0 + Q e1",
                2 => "degree-2 stabilizers vanish",
                _ => "stab_lie(Delta^W) = stab_lie(Delta^M)",
            };
            self.push(
                &format!("main-degree-{}", r.degree),
                anchor,
                format!(
                    "dim lie = {}, dim stab_W = {}, dim stab_M = {}",
                    r.dim_lie, r.dim_stab_w, r.dim_stab_m
                ),
                r.equal && r.m_subset_w && r.inclusion_aux,
                None,
            );
        }
        self.degrees = reports;
    }
}

type Tensor3 = LinComb<(Composition, Composition, Composition)>;

/// `(Δ^W⊗id)(t)` and `(id⊗Δ^W)(t)` as elements of `W⊗W⊗W`.
fn expand_left_right(t: &Tensor2) -> (Tensor3, Tensor3) {
    let mut cache = DeltaCache::new();
    let mut left = Tensor3::zero();
    let mut right = Tensor3::zero();
    for ((a, b), q) in t.terms() {
        for ((x, y), r) in cache.monomial(a).clone().terms() {
            left.add_term((x.clone(), y.clone(), b.clone()), q * r);
        }
        for ((x, y), r) in cache.monomial(b).clone().terms() {
            right.add_term((a.clone(), x.clone(), y.clone()), q * r);
        }
    }
    (left, right)
}

fn coassociative_on(a: &WPoly) -> bool {
    let (l, r) = expand_left_right(&delta_w(a));
    l == r
}

struct StabSummary {
    dim_v0: usize,
    dim_lie: usize,
    inclusion_aux: bool,
    preimage_consistent: bool,
    truncated_agrees: bool,
    lie_space: GradedSubspace,
    lie_elements: Vec<NCPoly>,
}

fn stab_summary(d: usize) -> StabSummary {
    let data = DegreeData::new(d).unwrap();
    let v0 = data.stab_w_v0();
    let lie = data.stab_w_lie();
    let inclusion_aux = data.check_inclusion_aux(&v0);
    // θ^{-1}(stab_V0): kernel of (x, y) ↦ θ(x) - y over Lyndon coordinates
    // x and stab_V0 coordinates y, projected onto x.
    let basis = lyndon_basis(d);
    let mut kp = KernelProblem::new();
    for l in &basis {
        kp.add_column(theta(&l.poly).component(d).into_terms());
    }
    for y in v0.elements() {
        kp.add_column((-y).into_terms());
    }
    let projected = kp
        .kernel()
        .into_iter()
        .map(|v| v[..basis.len()].to_vec())
        .collect();
    let preimage = span(d, Ambient::Lyndon, projected);
    let preimage_consistent = preimage == lie;
    let lie_elements = lie.elements();
    let truncated_agrees = lie_elements.iter().all(|x| {
        let th = theta(x);
        (1..=8).all(|n| act_w(&th, &WPoly::from_parts(&[n])).unwrap().is_zero())
    });
    StabSummary {
        dim_v0: v0.dim(),
        dim_lie: lie.dim(),
        inclusion_aux,
        preimage_consistent,
        truncated_agrees,
        lie_space: lie,
        lie_elements,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(suite: Suite, d: usize) -> SuiteConfig {
        SuiteConfig {
            max_degree: d,
            samples: 10,
            ..SuiteConfig::new(suite)
        }
    }

    #[test]
    fn main_low_degrees() {
        let r = run(&config(Suite::Main, 2)).unwrap();
        assert!(r.passed);
        let dims: Vec<_> = r
            .degrees
            .iter()
            .map(|m| (m.dim_stab_w, m.dim_stab_m, m.equal))
            .collect();
        assert_eq!(dims, vec![(2, 2, true), (0, 0, true)]);
    }

    #[test]
    fn zero_degree_is_rejected() {
        assert!(run(&config(Suite::Main, 0)).is_err());
    }

    #[test]
    fn every_suite_passes_at_low_degree() {
        for s in Suite::ALL {
            let r = run(&config(s, 4)).unwrap();
            assert!(r.passed, "{}", r.render(Format::Text));
        }
    }

    #[test]
    fn kerh_with_seed() {
        let mut c = config(Suite::Kerh, 6);
        c.seed = 1;
        assert!(run(&c).unwrap().passed);
    }

    #[test]
    fn reports_are_deterministic() {
        let c = config(Suite::Derivations, 5);
        for f in [Format::Json, Format::Csv, Format::Text] {
            assert_eq!(run(&c).unwrap().render(f), run(&c).unwrap().render(f));
        }
        let csv = run(&c).unwrap().render(Format::Csv);
        assert!(csv.starts_with("suite,check,anchor,input,status\n"));
    }

    #[test]
    fn closed_form_vanishes_at_one() {
        assert!(theta_bracket_action_closed_form(1).is_zero());
        assert!(!theta_bracket_action_closed_form(2).is_zero());
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Format::parse("csv"), Some(Format::Csv));
        assert_eq!(Format::parse("xml"), None);
    }
}
