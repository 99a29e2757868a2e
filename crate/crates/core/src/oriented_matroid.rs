//! Sign vectors, covector sets and chirotopes, with axiom checkers.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spherical_kernel::Sign;

/// Largest ground set supported by the packed representation.
pub const MAX_ELEMENTS: usize = 128;

/// A sign vector over {+,0,−}, packed as two bitmasks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    pos: u128,
    neg: u128,
    n: usize,
}

impl SignVector {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS, "sign vectors support at most {MAX_ELEMENTS} elements");
        SignVector { pos: 0, neg: 0, n }
    }

    pub fn from_signs(signs: impl IntoIterator<Item = Sign>) -> Self {
        let mut v = SignVector::zero(0);
        for (i, s) in signs.into_iter().enumerate() {
            assert!(i < MAX_ELEMENTS, "sign vectors support at most {MAX_ELEMENTS} elements");
            v.n = i + 1;
            v.set(i, s);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize) -> Sign {
        if self.pos >> i & 1 == 1 {
            Sign::Pos
        } else if self.neg >> i & 1 == 1 {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn set(&mut self, i: usize, s: Sign) {
        let bit = 1u128 << i;
        self.pos &= !bit;
        self.neg &= !bit;
        match s {
            Sign::Pos => self.pos |= bit,
            Sign::Neg => self.neg |= bit,
            Sign::Zero => {}
        }
    }

    pub fn signs(&self) -> Vec<Sign> {
        (0..self.n).map(|i| self.get(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.pos | self.neg == 0
    }

    pub fn support(&self) -> u128 {
        self.pos | self.neg
    }

    pub fn zero_count(&self) -> usize {
        self.n - self.support().count_ones() as usize
    }

    /// Composition σ∘τ: σ where nonzero, τ elsewhere.
    pub fn compose(&self, other: &SignVector) -> SignVector {
        let free = !self.support();
        SignVector { pos: self.pos | (other.pos & free), neg: self.neg | (other.neg & free), n: self.n }
    }

    /// Coordinates where the two vectors have opposite nonzero signs.
    pub fn separation(&self, other: &SignVector) -> u128 {
        (self.pos & other.neg) | (self.neg & other.pos)
    }

    /// σ ≤ τ: every nonzero coordinate of σ agrees with τ.
    pub fn le(&self, other: &SignVector) -> bool {
        self.pos & !other.pos == 0 && self.neg & !other.neg == 0
    }

    pub fn restrict(&self, idx: &[usize]) -> SignVector {
        SignVector::from_signs(idx.iter().map(|&i| self.get(i)))
    }

    pub fn parse(s: &str) -> Result<SignVector> {
        let signs: Option<Vec<Sign>> = s.chars().map(Sign::from_char).collect();
        signs
            .map(SignVector::from_signs)
            .ok_or_else(|| Error::InvalidInput(format!("bad sign vector {s:?}")))
    }
}

impl std::ops::Neg for SignVector {
    type Output = SignVector;
    fn neg(self) -> SignVector {
        SignVector { pos: self.neg, neg: self.pos, n: self.n }
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.get(i).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector({self})")
    }
}

/// A set of sign vectors of common length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovectorSet {
    n: usize,
    vectors: BTreeSet<SignVector>,
}

/// Result of an axiom check: the first violation found, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub ok: bool,
    pub violation: Option<String>,
}

impl AxiomReport {
    fn pass() -> Self {
        AxiomReport { ok: true, violation: None }
    }
    fn fail(msg: String) -> Self {
        AxiomReport { ok: false, violation: Some(msg) }
    }
}

/// Rank, bases and independent sets of a covector set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankInfo {
    pub rank: usize,
    pub bases: Vec<Vec<usize>>,
    pub independent: Vec<Vec<usize>>,
}

impl CovectorSet {
    pub fn new(n: usize, vectors: impl IntoIterator<Item = SignVector>) -> Result<Self> {
        if n > MAX_ELEMENTS {
            return Err(Error::InvalidInput(format!("at most {MAX_ELEMENTS} elements supported")));
        }
        let vectors: BTreeSet<SignVector> = vectors.into_iter().collect();
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(Error::InvalidInput(format!("sign vector {v} has length {} instead of {n}", v.len())));
        }
        Ok(CovectorSet { n, vectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.vectors.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SignVector> {
        self.vectors.iter()
    }

    pub fn remove(&mut self, v: &SignVector) -> bool {
        self.vectors.remove(v)
    }

    /// Covectors of minimal nonempty support.
    pub fn cocircuits(&self) -> Vec<SignVector> {
        let nonzero: Vec<&SignVector> = self.vectors.iter().filter(|v| !v.is_zero()).collect();
        nonzero
            .iter()
            .filter(|v| {
                let s = v.support();
                !nonzero.iter().any(|w| {
                    let t = w.support();
                    t != s && t & !s == 0
                })
            })
            .map(|v| **v)
            .collect()
    }

    /// Height of each covector in the face poset, minus one (zero has grade −1).
    pub fn grading(&self) -> Vec<(SignVector, i32)> {
        let mut by_support: Vec<&SignVector> = self.vectors.iter().collect();
        by_support.sort_by_key(|v| v.support().count_ones());
        let mut grade: Vec<(SignVector, i32)> = Vec::with_capacity(by_support.len());
        for v in by_support {
            let below = grade
                .iter()
                .filter(|(w, _)| w != v && w.le(v))
                .map(|(_, g)| *g)
                .max();
            grade.push((*v, below.map_or(-1, |g| g + 1)));
        }
        grade
    }

    /// Independent sets by the restriction test, bases, and rank.
    pub fn rank_bases(&self) -> RankInfo {
        let n = self.n;
        let mut independent: Vec<Vec<usize>> = vec![Vec::new()];
        let mut level: Vec<Vec<usize>> = vec![Vec::new()];
        let mut rank = 0;
        loop {
            let mut next = Vec::new();
            for set in &level {
                let start = set.last().map_or(0, |l| l + 1);
                for e in start..n {
                    let mut cand = set.clone();
                    cand.push(e);
                    if self.is_independent(&cand) {
                        next.push(cand);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            rank += 1;
            independent.extend(next.iter().cloned());
            level = next;
        }
        RankInfo { rank, bases: level.into_iter().filter(|b| b.len() == rank).collect(), independent }
    }

    /// Restriction test: the projections onto `idx` realize all of {+,0,−}^m.
    pub fn is_independent(&self, idx: &[usize]) -> bool {
        let want = 3usize.pow(idx.len() as u32);
        if self.vectors.len() < want {
            return false;
        }
        let seen: HashSet<SignVector> = self.vectors.iter().map(|v| v.restrict(idx)).collect();
        seen.len() == want
    }

    /// Covector axioms: zero vector, symmetry, composition, elimination.
    pub fn check_axioms(&self) -> AxiomReport {
        let zero = SignVector::zero(self.n);
        if !self.vectors.contains(&zero) {
            return AxiomReport::fail("zero vector missing".into());
        }
        for v in &self.vectors {
            if !self.vectors.contains(&-*v) {
                return AxiomReport::fail(format!("{v} present but its negation is not"));
            }
        }
        let list: Vec<SignVector> = self.vectors.iter().copied().collect();
        for x in &list {
            for y in &list {
                let c = x.compose(y);
                if !self.vectors.contains(&c) {
                    return AxiomReport::fail(format!("composition {x}∘{y} = {c} missing"));
                }
            }
        }
        let zeros_at: Vec<Vec<SignVector>> =
            (0..self.n).map(|e| list.iter().copied().filter(|z| z.get(e) == Sign::Zero).collect()).collect();
        let full = if self.n == 128 { u128::MAX } else { (1u128 << self.n) - 1 };
        for (a, x) in list.iter().enumerate() {
            for y in &list[a + 1..] {
                let sep = x.separation(y);
                if sep == 0 {
                    continue;
                }
                let c = x.compose(y);
                let keep = full & !sep;
                let (cp, cn) = (c.pos & keep, c.neg & keep);
                let mut bits = sep;
                while bits != 0 {
                    let e = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let found = zeros_at[e].iter().any(|z| z.pos & keep == cp && z.neg & keep == cn);
                    if !found {
                        return AxiomReport::fail(format!("no elimination of {x} and {y} at element {e}"));
                    }
                }
            }
        }
        AxiomReport::pass()
    }
}

/// Checks the covector axioms of `x`.
pub fn check_covector_axioms(x: &CovectorSet) -> AxiomReport {
    x.check_axioms()
}

/// An alternating sign map on ordered triples.
#[derive(Clone, PartialEq, Eq)]
pub struct Chirotope {
    n: usize,
    table: Vec<i8>,
}

impl fmt::Debug for Chirotope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chirotope(n={}, ", self.n)?;
        for (i, j, k, s) in self.sorted_entries() {
            write!(f, "{i}{j}{k}{s} ")?;
        }
        write!(f, ")")
    }
}

impl Chirotope {
    /// Extends values on sorted triples i<j<k by alternation.
    pub fn from_sorted(n: usize, mut f: impl FnMut(usize, usize, usize) -> Sign) -> Chirotope {
        let mut chi = Chirotope { n, table: vec![0; n * n * n] };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let s = f(i, j, k).to_i8();
                    for (p, sign) in [
                        ((i, j, k), 1),
                        ((j, k, i), 1),
                        ((k, i, j), 1),
                        ((j, i, k), -1),
                        ((i, k, j), -1),
                        ((k, j, i), -1),
                    ] {
                        let at = chi.idx(p.0, p.1, p.2);
                        chi.table[at] = s * sign;
                    }
                }
            }
        }
        chi
    }

    /// A raw table over all ordered triples (not necessarily alternating).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> Sign) -> Chirotope {
        let mut table = vec![0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    table[(i * n + j) * n + k] = f(i, j, k).to_i8();
                }
            }
        }
        Chirotope { n, table }
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Sign {
        Sign::from_i8(self.table[self.idx(i, j, k)])
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, s: Sign) {
        let at = self.idx(i, j, k);
        self.table[at] = s.to_i8();
    }

    pub fn negated(&self) -> Chirotope {
        Chirotope { n: self.n, table: self.table.iter().map(|v| -v).collect() }
    }

    pub fn scaled(&self, s: Sign) -> Chirotope {
        Chirotope { n: self.n, table: self.table.iter().map(|v| v * s.to_i8()).collect() }
    }

    /// (i, j, k, sign) for i<j<k.
    pub fn sorted_entries(&self) -> Vec<(usize, usize, usize, Sign)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                for k in j + 1..self.n {
                    out.push((i, j, k, self.get(i, j, k)));
                }
            }
        }
        out
    }

    /// Alternation, nonvanishing, basis exchange of the support, and the
    /// three-term Grassmann–Plücker relations.
    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if (i == j || j == k || i == k) && v != Sign::Zero {
                        return AxiomReport::fail(format!("repeated index ({i},{j},{k}) is nonzero"));
                    }
                    if v != -self.get(j, i, k) || v != -self.get(i, k, j) {
                        return AxiomReport::fail(format!("not alternating at ({i},{j},{k})"));
                    }
                }
            }
        }
        let bases: Vec<[usize; 3]> =
            self.sorted_entries().into_iter().filter(|e| e.3 != Sign::Zero).map(|e| [e.0, e.1, e.2]).collect();
        if bases.is_empty() {
            return AxiomReport::fail("identically zero".into());
        }
        let is_basis = |mut b: [usize; 3]| {
            b.sort();
            b[0] != b[1] && b[1] != b[2] && self.get(b[0], b[1], b[2]) != Sign::Zero
        };
        for b1 in &bases {
            for b2 in &bases {
                for &x in b1.iter().filter(|x| !b2.contains(x)) {
                    let ok = b2.iter().filter(|y| !b1.contains(y)).any(|&y| {
                        let mut c = *b1;
                        c[c.iter().position(|&v| v == x).unwrap()] = y;
                        is_basis(c)
                    });
                    if !ok {
                        return AxiomReport::fail(format!("basis exchange fails for {b1:?}, {b2:?} at {x}"));
                    }
                }
            }
        }
        for a in 0..n {
            for x1 in 0..n {
                for x2 in x1 + 1..n {
                    for x3 in x2 + 1..n {
                        for x4 in x3 + 1..n {
                            let t = [
                                self.get(a, x1, x2) * self.get(a, x3, x4),
                                -(self.get(a, x1, x3) * self.get(a, x2, x4)),
                                self.get(a, x1, x4) * self.get(a, x2, x3),
                            ];
                            let has_pos = t.contains(&Sign::Pos);
                            let has_neg = t.contains(&Sign::Neg);
                            if has_pos != has_neg {
                                return AxiomReport::fail(format!(
                                    "Grassmann-Plücker relation fails at a={a}, x=({x1},{x2},{x3},{x4})"
                                ));
                            }
                        }
                    }
                }
            }
        }
        AxiomReport::pass()
    }
}

/// Checks the chirotope axioms of `chi`.
pub fn check_chirotope_axioms(chi: &Chirotope) -> AxiomReport {
    chi.check_axioms()
}

/// Whether `chi` (up to sign) is the chirotope of the oriented matroid with
/// covectors `x`: for every pair {j,k} spanning a rank-2 flat, the column
/// e ↦ χ(e,j,k) must be ± the cocircuit of `x` vanishing on j and k.
pub fn om_consistency(x: &CovectorSet, chi: &Chirotope) -> bool {
    let n = x.n();
    if chi.n() != n {
        return false;
    }
    let cocircuits: HashSet<SignVector> = x.cocircuits().into_iter().collect();
    let mut used = HashSet::new();
    for j in 0..n {
        for k in j + 1..n {
            let col = SignVector::from_signs((0..n).map(|e| chi.get(e, j, k)));
            if col.is_zero() {
                continue;
            }
            if !cocircuits.contains(&col) && !cocircuits.contains(&-col) {
                return false;
            }
            used.insert(if cocircuits.contains(&col) { col } else { -col });
        }
    }
    // Every cocircuit must come from some pair.
    cocircuits.iter().all(|c| used.contains(c) || used.contains(&-*c))
}
