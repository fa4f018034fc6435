//! Exact nullspaces of sparse rational matrices.
//!
//! A [`KernelProblem`] is assembled column by column, with rows addressed by
//! arbitrary hashable keys. [`KernelProblem::kernel`] returns the kernel in
//! reduced row echelon form (leftmost pivots, pivot entries equal to 1),
//! which is unique for a given column order.
//!
//! The solver eliminates modulo word-sized primes after compressing the rows
//! with a sparse random embedding, lifts the echelon basis back to `Q` by
//! Chinese remaindering and rational reconstruction, and then checks the
//! candidate exactly against every original row. Since the rank of the
//! compressed system modulo `p` never exceeds the rank over `Q`, a verified
//! candidate whose size equals the modular nullity is the whole kernel. Any
//! failed check triggers more primes or a weaker compression, ending at the
//! uncompressed system, so the result never depends on luck.

use std::collections::HashMap;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;

/// Sparse matrix over `Q` built one column at a time.
#[derive(Clone, Debug)]
pub struct KernelProblem<R: Hash + Eq> {
    row_index: HashMap<R, usize>,
    cols: Vec<Vec<(usize, Rational)>>,
}

impl<R: Hash + Eq> Default for KernelProblem<R> {
    fn default() -> Self {
        KernelProblem {
            row_index: HashMap::new(),
            cols: Vec::new(),
        }
    }
}

impl<R: Hash + Eq> KernelProblem<R> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a column; repeated row keys are summed. Returns its index.
    pub fn add_column<I: IntoIterator<Item = (R, Rational)>>(&mut self, entries: I) -> usize {
        let mut acc: HashMap<usize, Rational> = HashMap::new();
        for (key, c) in entries {
            if c.is_zero() {
                continue;
            }
            let next = self.row_index.len();
            let r = *self.row_index.entry(key).or_insert(next);
            *acc.entry(r).or_insert_with(Rational::zero) += c;
        }
        let mut col: Vec<(usize, Rational)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        col.sort_by_key(|(r, _)| *r);
        self.cols.push(col);
        self.cols.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn n_rows(&self) -> usize {
        self.row_index.len()
    }

    /// Reduced echelon basis of the nullspace, as dense coordinate vectors.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        IntMatrix::from_columns(self.n_rows(), &self.cols).kernel()
    }

    /// `A x` as a map from row index to value; used by tests.
    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n_rows()];
        for (j, col) in self.cols.iter().enumerate() {
            if x[j].is_zero() {
                continue;
            }
            for (r, c) in col {
                out[*r] += c * &x[j];
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Int {
    Small(i64),
    Big(BigInt),
}

impl Int {
    fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(s) => Int::Small(s),
            None => Int::Big(b),
        }
    }

    fn to_big(&self) -> BigInt {
        match self {
            Int::Small(s) => BigInt::from(*s),
            Int::Big(b) => b.clone(),
        }
    }

    fn mod_p(&self, p: u64) -> u64 {
        match self {
            Int::Small(s) => s.rem_euclid(p as i64) as u64,
            Int::Big(b) => b.mod_floor(&BigInt::from(p)).to_u64().unwrap(),
        }
    }
}

/// Row-major integer matrix, each row scaled by the lcm of its denominators.
struct IntMatrix {
    n_cols: usize,
    rows: Vec<Vec<(usize, Int)>>,
}

impl IntMatrix {
    fn from_columns(n_rows: usize, cols: &[Vec<(usize, Rational)>]) -> IntMatrix {
        let mut rat_rows: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); n_rows];
        for (j, col) in cols.iter().enumerate() {
            for (r, c) in col {
                rat_rows[*r].push((j, c));
            }
        }
        let rows = rat_rows
            .into_iter()
            .map(|row| {
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
                row.into_iter()
                    .map(|(j, c)| (j, Int::from_big(c.numer() * (&lcm / c.denom()))))
                    .collect()
            })
            .collect();
        IntMatrix {
            n_cols: cols.len(),
            rows,
        }
    }

    fn kernel(&self) -> Vec<Vec<Rational>> {
        let n = self.n_cols;
        if n == 0 {
            return Vec::new();
        }
        let m = self.rows.len();
        let mut primes = PrimeStream::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_4b1d);
        let mut buckets = (n + 24).min(m);
        loop {
            let compressed = buckets < m;
            let embedding = compressed.then(|| Embedding::random(m, buckets, &mut rng));
            let mut acc: Option<CrtKernel> = None;
            let mut verified = None;
            let mut previous: Option<Vec<Vec<Rational>>> = None;
            for _ in 0..24 {
                let p = primes.next_prime();
                let mat = match &embedding {
                    Some(e) => self.compress_mod(e, p),
                    None => self.dense_mod(p),
                };
                let kp = kernel_rref_mod(mat, n, p);
                acc = Some(match acc.take() {
                    None => CrtKernel::new(kp, p),
                    Some(old) => match old.pivots.len().cmp(&kp.pivots.len()) {
                        // A smaller nullity means the earlier primes were unlucky.
                        std::cmp::Ordering::Greater => CrtKernel::new(kp, p),
                        std::cmp::Ordering::Less => old,
                        std::cmp::Ordering::Equal if old.pivots != kp.pivots => {
                            CrtKernel::new(kp, p)
                        }
                        std::cmp::Ordering::Equal => old.extend(kp, p),
                    },
                });
                let cur = acc.as_ref().unwrap();
                if let Some(cand) = cur.reconstruct() {
                    if self.annihilates(&cand) {
                        verified = Some(cand);
                        break;
                    }
                    // A stable lift that still fails means the compression
                    // lost rank, not that the modulus is too small.
                    if previous.as_ref() == Some(&cand) {
                        break;
                    }
                    previous = Some(cand);
                }
            }
            if let Some(v) = verified {
                return v;
            }
            assert!(
                compressed,
                "exact kernel failed to converge on the full system"
            );
            buckets = (buckets * 2).min(m);
        }
    }

    fn dense_mod(&self, p: u64) -> Vec<Vec<u64>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0u64; self.n_cols];
                for (j, c) in row {
                    dense[*j] = c.mod_p(p);
                }
                dense
            })
            .collect()
    }

    fn compress_mod(&self, e: &Embedding, p: u64) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.n_cols]; e.buckets];
        for (r, row) in self.rows.iter().enumerate() {
            for &(b, w) in &e.targets[r] {
                let w = w % p;
                let target = &mut out[b];
                for (j, c) in row {
                    target[*j] = (target[*j] + w * c.mod_p(p)) % p;
                }
            }
        }
        out
    }

    /// Exact check that every candidate vector lies in the kernel.
    fn annihilates(&self, basis: &[Vec<Rational>]) -> bool {
        basis.iter().all(|v| {
            let lcm = v
                .iter()
                .filter(|c| !c.is_zero())
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let ints: Vec<Int> = v
                .iter()
                .map(|c| Int::from_big(c.numer() * (&lcm / c.denom())))
                .collect();
            self.rows.iter().all(|row| row_dot_is_zero(row, &ints))
        })
    }
}

fn row_dot_is_zero(row: &[(usize, Int)], x: &[Int]) -> bool {
    let mut small: i128 = 0;
    let mut big: Option<BigInt> = None;
    for (j, a) in row {
        match (a, &x[*j]) {
            (_, Int::Small(0)) => {}
            (Int::Small(a), Int::Small(b)) => {
                let prod = (*a as i128) * (*b as i128);
                match small.checked_add(prod) {
                    Some(s) => small = s,
                    None => {
                        *big.get_or_insert_with(BigInt::zero) += BigInt::from(small) + prod;
                        small = 0;
                    }
                }
            }
            (a, b) => *big.get_or_insert_with(BigInt::zero) += a.to_big() * b.to_big(),
        }
    }
    match big {
        None => small == 0,
        Some(b) => (b + small).is_zero(),
    }
}

/// Each original row is added, with random weights, into a few buckets.
struct Embedding {
    buckets: usize,
    targets: Vec<Vec<(usize, u64)>>,
}

impl Embedding {
    const FAN_OUT: usize = 3;

    fn random(m: usize, buckets: usize, rng: &mut ChaCha8Rng) -> Embedding {
        let targets = (0..m)
            .map(|_| {
                (0..Self::FAN_OUT)
                    .map(|_| (rng.gen_range(0..buckets), rng.gen_range(1..u32::MAX as u64)))
                    .collect()
            })
            .collect();
        Embedding { buckets, targets }
    }
}

/// Primes just below `2^31`, so that products fit in a `u64`.
struct PrimeStream {
    next: u64,
}

impl PrimeStream {
    fn new() -> PrimeStream {
        PrimeStream {
            next: (1 << 31) - 1,
        }
    }

    fn next_prime(&mut self) -> u64 {
        loop {
            let c = self.next;
            self.next -= 2;
            if is_prime(c) {
                return c;
            }
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

/// Kernel modulo `p` in reduced echelon form.
struct ModKernel {
    pivots: Vec<usize>,
    rows: Vec<Vec<u64>>,
}

fn kernel_rref_mod(mut mat: Vec<Vec<u64>>, n: usize, p: u64) -> ModKernel {
    let pivots = rref_mod(&mut mat, n, p);
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut ker = Vec::new();
    for f in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; n];
        v[f] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            let x = mat[i][f];
            if x != 0 {
                v[pc] = p - x;
            }
        }
        ker.push(v);
    }
    let kp = rref_mod(&mut ker, n, p);
    ModKernel {
        pivots: kp,
        rows: ker,
    }
}

/// In-place reduced row echelon form modulo `p`; returns pivot columns and
/// truncates the matrix to its nonzero rows.
fn rref_mod(mat: &mut Vec<Vec<u64>>, n: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == mat.len() {
            break;
        }
        let Some(sel) = (r..mat.len()).find(|&i| mat[i][c] != 0) else {
            continue;
        };
        mat.swap(r, sel);
        let inv = inv_mod(mat[r][c], p);
        for x in mat[r][c..].iter_mut() {
            *x = *x * inv % p;
        }
        let (head, tail) = mat.split_at_mut(r);
        let (pivot_row, rest) = tail.split_first_mut().unwrap();
        for row in head.iter_mut().chain(rest.iter_mut()) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if y != 0 {
                    *x = (*x + nf * y) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    mat.truncate(r);
    pivots
}

/// Residues of an echelon basis accumulated over several primes.
struct CrtKernel {
    pivots: Vec<usize>,
    modulus: BigInt,
    residues: Vec<Vec<BigInt>>,
}

impl CrtKernel {
    fn new(k: ModKernel, p: u64) -> CrtKernel {
        CrtKernel {
            pivots: k.pivots,
            modulus: BigInt::from(p),
            residues: k
                .rows
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
        }
    }

    fn extend(self, k: ModKernel, p: u64) -> CrtKernel {
        let pb = BigInt::from(p);
        let m_mod_p = (&self.modulus % &pb).to_u64().unwrap();
        let m_inv = BigInt::from(inv_mod(m_mod_p, p));
        let residues = self
            .residues
            .into_iter()
            .zip(k.rows)
            .map(|(old, new)| {
                old.into_iter()
                    .zip(new)
                    .map(|(a, b)| {
                        // x = a + M * ((b - a) / M mod p)
                        let t = ((BigInt::from(b) - &a) * &m_inv).mod_floor(&pb);
                        a + &self.modulus * t
                    })
                    .collect()
            })
            .collect();
        CrtKernel {
            pivots: self.pivots,
            modulus: self.modulus * pb,
            residues,
        }
    }

    fn reconstruct(&self) -> Option<Vec<Vec<Rational>>> {
        self.residues
            .iter()
            .map(|row| {
                row.iter()
                    .map(|a| rational_reconstruction(a, &self.modulus))
                    .collect()
            })
            .collect()
    }
}

/// Find `r/s` with `r ≡ a s (mod m)` and `|r|, s ≤ sqrt(m/2)`.
fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let a = a.mod_floor(m);
    if a.is_zero() {
        return Some(Rational::zero());
    }
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    Some(Rational::new(r1, s1))
}

/// Reduced row echelon form of a small dense rational matrix. Zero rows are
/// dropped, so the result is the canonical basis of the row span.
pub fn rref(mut rows: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..n {
        let Some(sel) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = rows[r][c].recip();
        for x in rows[r][c..].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

/// Whether `v` lies in the span of an echelon basis produced by [`rref`].
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let mut w = v.to_vec();
    for row in basis {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        if w[c].is_zero() {
            continue;
        }
        let f = w[c].clone();
        for (x, y) in w.iter_mut().zip(row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
    w.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn reconstruction_recovers_small_fractions() {
        let m = BigInt::from(2147483647u64);
        for (n, d) in [(1, 2), (-3, 7), (5, 1), (-1, 12)] {
            let q = frac(n, d);
            let dm = (q.denom() % &m).to_u64().unwrap();
            let a = (q.numer() * BigInt::from(inv_mod(dm, 2147483647))).mod_floor(&m);
            assert_eq!(rational_reconstruction(&a, &m), Some(q));
        }
    }

    #[test]
    fn simple_kernel() {
        // x + y + z = 0, y - 2z = 0  =>  kernel spanned by (-3, 2, 1).
        let mut kp: KernelProblem<u8> = KernelProblem::new();
        kp.add_column([(0, int(1))]);
        kp.add_column([(0, int(1)), (1, int(1))]);
        kp.add_column([(0, int(1)), (1, int(-2))]);
        assert_eq!(kp.kernel(), vec![vec![int(1), frac(-2, 3), frac(-1, 3)]]);
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let mut kp: KernelProblem<u8> = KernelProblem::new();
        kp.add_column([]);
        kp.add_column([]);
        assert_eq!(
            kp.kernel(),
            vec![vec![int(1), int(0)], vec![int(0), int(1)]]
        );
    }

    #[test]
    fn large_entries_need_several_primes() {
        // x - N y = 0 with N well beyond a single 31-bit modulus.
        let big = Rational::from_integer(BigInt::from(10u64).pow(30));
        let mut kp: KernelProblem<u8> = KernelProblem::new();
        kp.add_column([(0, int(1))]);
        kp.add_column([(0, -big.clone())]);
        assert_eq!(kp.kernel(), vec![vec![int(1), big.recip()]]);
    }

    #[test]
    fn rref_and_span() {
        let rows = vec![
            vec![int(0), int(2), int(4)],
            vec![int(1), int(1), int(1)],
            vec![int(1), int(2), int(3)],
        ];
        let e = rref(rows);
        assert_eq!(
            e,
            vec![vec![int(1), int(0), int(-1)], vec![int(0), int(1), int(2)]]
        );
        assert!(in_span(&e, &[int(2), int(3), int(4)]));
        assert!(!in_span(&e, &[int(0), int(0), int(1)]));
    }
}
