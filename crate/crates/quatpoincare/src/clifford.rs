//! Rational matrix representations of Clifford algebras and their even
//! modules.
//!
//! Sign convention (fixed throughout the crate): `x * x = -<x,x> * 1`, so
//! the generators for the positive basis vectors square to `-Id` and the
//! ones for the negative basis vectors square to `+Id`. Much of the
//! literature uses the opposite sign; this one is forced by the embedding
//! computation `(w x')^2 = -w^2 x'^2` used in [`iota_embedding`].
//!
//! Generators are built as signed Kronecker monomials in the 2x2 seeds
//! I, A = [[0,1],[1,0]], B = [[0,-1],[1,0]], C = [[1,0],[0,-1]], so every
//! matrix has entries in {0, +-1} and the representation module has the
//! minimal dimension allowed by the classification of real Clifford
//! algebras. Irreducible even modules are obtained from the isomorphism
//! of the even algebra with the Clifford algebra on one basis vector less
//! (v -> v e_n on the orthogonal complement), splitting along the
//! eigenspaces of the volume element when that algebra is not simple.

use crate::matrix::RatMatrix;
use crate::scalar::{rat, rint, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Self {
        Signature { p, q }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// `<e_i, e_i>` for the 1-based global index `i`.
    pub fn metric_sign(&self, i: usize) -> i64 {
        assert!((1..=self.dim()).contains(&i));
        if i <= self.p {
            1
        } else {
            -1
        }
    }

    /// `e_i^2` in the Clifford algebra (paper convention `x^2 = -<x,x>`).
    pub fn clifford_square(&self, i: usize) -> i64 {
        -self.metric_sign(i)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CliffordError {
    #[error("block label {0:?} is not available for signature ({1},{2})")]
    InvalidBlockLabel(BlockLabel, usize, usize),
    #[error("signature must contain at least one basis vector")]
    EmptySignature,
    #[error("spin generator requires two distinct indices")]
    EqualIndices,
}

// ---------------------------------------------------------------------------
// Pauli strings
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Letter {
    I,
    A,
    B,
    C,
}

impl Letter {
    /// Product of two letters as (sign, letter).
    fn mul(self, other: Letter) -> (i8, Letter) {
        use Letter::*;
        match (self, other) {
            (I, x) | (x, I) => (1, x),
            (A, A) | (C, C) => (1, I),
            (B, B) => (-1, I),
            (A, B) => (1, C),
            (B, A) => (-1, C),
            (B, C) => (1, A),
            (C, B) => (-1, A),
            (C, A) => (-1, B),
            (A, C) => (1, B),
        }
    }

    fn matrix(self) -> RatMatrix {
        let e = |entries: [[i64; 2]; 2]| {
            RatMatrix::from_fn(2, 2, |r, c| rint(entries[r][c]))
        };
        match self {
            Letter::I => e([[1, 0], [0, 1]]),
            Letter::A => e([[0, 1], [1, 0]]),
            Letter::B => e([[0, -1], [1, 0]]),
            Letter::C => e([[1, 0], [0, -1]]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PauliString {
    sign: i8,
    letters: Vec<Letter>,
}

impl PauliString {
    fn parse(s: &str) -> Self {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' => Letter::I,
                'A' => Letter::A,
                'B' => Letter::B,
                'C' => Letter::C,
                _ => panic!("bad pauli letter {c}"),
            })
            .collect();
        PauliString { sign: 1, letters }
    }

    fn mul(&self, other: &PauliString) -> PauliString {
        assert_eq!(self.letters.len(), other.letters.len());
        let mut sign = self.sign * other.sign;
        let letters = self
            .letters
            .iter()
            .zip(other.letters.iter())
            .map(|(&a, &b)| {
                let (s, l) = a.mul(b);
                sign *= s;
                l
            })
            .collect();
        PauliString { sign, letters }
    }

    /// Prefix with one letter (tensor on the left).
    fn prefixed(&self, l: Letter) -> PauliString {
        let mut letters = vec![l];
        letters.extend(self.letters.iter().copied());
        PauliString { sign: self.sign, letters }
    }

    /// Tensor concatenation `self (x) other`.
    fn concat(&self, other: &PauliString) -> PauliString {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().copied());
        PauliString { sign: self.sign * other.sign, letters }
    }

    fn identity_like(len: usize) -> PauliString {
        PauliString { sign: 1, letters: vec![Letter::I; len] }
    }

    fn matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::identity(1);
        for l in &self.letters {
            m = m.kron(&l.matrix());
        }
        if self.sign < 0 {
            m = m.neg();
        }
        m
    }
}

/// Base tables for the pure signatures `Cl_{k,0}` (all squares `+1`) and
/// `Cl_{0,k}` (all squares `-1`), `k <= 8`, each of minimal faithful module
/// dimension.
fn pure_table(square: i8, k: usize) -> Vec<PauliString> {
    let p = |xs: &[&str]| xs.iter().map(|s| PauliString::parse(s)).collect::<Vec<_>>();
    if square > 0 {
        match k {
            0 => vec![],
            1 => p(&["C"]),
            2 => p(&["A", "C"]),
            3 => p(&["AI", "CI", "BB"]),
            4 => p(&["AII", "CII", "BBC", "BBA"]),
            5 => p(&["AIII", "CIII", "BIBC", "BIBA", "BCIB"]),
            6 => p(&["AIII", "CIII", "BIBC", "BIBA", "BAIB", "BCIB"]),
            7 => p(&["AIII", "CIII", "BAIB", "BBII", "BCAB", "BCBI", "BCCB"]),
            8 => p(&["AIII", "CIII", "BAIB", "BBII", "BCAB", "BCBI", "BCCB", "BABC"]),
            _ => unreachable!(),
        }
    } else {
        match k {
            0 => vec![],
            1 => p(&["B"]),
            2 => p(&["BC", "BA"]),
            3 => p(&["IBC", "IBA", "CIB"]),
            4 => p(&["IBC", "IBA", "AIB", "CIB"]),
            5 => p(&["AIB", "BII", "CAB", "CBI", "CCB"]),
            6 => p(&["AIB", "BII", "CAB", "CBI", "CCB", "ABC"]),
            7 => p(&["CAIB", "CBII", "CCAB", "CCBI", "CCCB", "CABC", "CABA"]),
            8 => p(&["CAIB", "CBII", "CCAB", "CCBI", "CCCB", "CABC", "CABA", "BIII"]),
            _ => unreachable!(),
        }
    }
}

/// Pure-signature generators for arbitrary `k`, applying mod 8 periodicity:
/// `Cl(k) = Cl(k-8) (x) Cl(8)` with the old generators tensored by the
/// volume element of the octet.
fn pure_strings(square: i8, k: usize) -> Vec<PauliString> {
    if k <= 8 {
        return pure_table(square, k);
    }
    let base = pure_strings(square, k - 8);
    let octet = pure_table(square, 8);
    let mut omega = PauliString::identity_like(4);
    for g in &octet {
        omega = omega.mul(g);
    }
    let base_len = base.first().map_or(0, |s| s.letters.len());
    let mut out: Vec<PauliString> = base.iter().map(|g| g.concat(&omega)).collect();
    out.extend(octet.iter().map(|h| PauliString::identity_like(base_len).concat(h)));
    out
}

/// Strings for the mixed signature with `r` generators squaring `+1` and
/// `s` squaring `-1`; returns the two lists separately.
fn mixed_strings(r: usize, s: usize) -> (Vec<PauliString>, Vec<PauliString>) {
    if r > 0 && s > 0 {
        let (plus, minus) = mixed_strings(r - 1, s - 1);
        let len = plus.first().or(minus.first()).map_or(0, |g| g.letters.len());
        let id = PauliString::identity_like(len);
        let mut new_plus = vec![id.prefixed(Letter::A)];
        new_plus.extend(plus.iter().map(|g| g.prefixed(Letter::C)));
        let mut new_minus = vec![id.prefixed(Letter::B)];
        new_minus.extend(minus.iter().map(|g| g.prefixed(Letter::C)));
        (new_plus, new_minus)
    } else if s == 0 {
        (pure_strings(1, r), vec![])
    } else {
        (vec![], pure_strings(-1, s))
    }
}

/// Pairwise anticommuting matrices `g_i` with `g_i^2 = squares[i] * Id`, of
/// minimal faithful dimension, entries in {0,+-1}.
pub fn anticommuting_generators(squares: &[i8]) -> Vec<RatMatrix> {
    assert!(squares.iter().all(|&s| s == 1 || s == -1));
    let r = squares.iter().filter(|&&s| s > 0).count();
    let s = squares.len() - r;
    let (plus, minus) = mixed_strings(r, s);
    let (mut ip, mut im) = (plus.into_iter(), minus.into_iter());
    let strings: Vec<PauliString> = squares
        .iter()
        .map(|&sq| if sq > 0 { ip.next().unwrap() } else { im.next().unwrap() })
        .collect();
    if strings.is_empty() {
        return vec![];
    }
    strings.iter().map(|s| s.matrix()).collect()
}

// ---------------------------------------------------------------------------
// Full Clifford representation
// ---------------------------------------------------------------------------

/// Faithful matrix representation of `Cl(p,q)` of minimal module dimension.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    pub sig: Signature,
    pub dim_module: usize,
    pub generators: Vec<RatMatrix>,
}

pub fn build_clifford(sig: Signature) -> Result<CliffordRep, CliffordError> {
    if sig.dim() == 0 {
        return Err(CliffordError::EmptySignature);
    }
    let squares: Vec<i8> = (1..=sig.dim()).map(|i| sig.clifford_square(i) as i8).collect();
    let generators = anticommuting_generators(&squares);
    let dim_module = generators[0].rows();
    Ok(CliffordRep { sig, dim_module, generators })
}

impl CliffordRep {
    pub fn generator(&self, i: usize) -> &RatMatrix {
        &self.generators[i - 1]
    }

    /// Product of the listed generator matrices, in order; the empty list
    /// yields the identity.
    pub fn volume_element(&self, indices: &[usize]) -> VolumeElement {
        let mut m = RatMatrix::identity(self.dim_module);
        for &i in indices {
            m = m.mul(self.generator(i));
        }
        VolumeElement { subspace_indices: indices.to_vec(), matrix: m }
    }
}

#[derive(Clone, Debug)]
pub struct VolumeElement {
    pub subspace_indices: Vec<usize>,
    pub matrix: RatMatrix,
}

/// Images of the generators of `Cl(R^q)` (positive definite metric) under
/// `x -> w_p x'`, acting on the faithful module of `Cl(p,q)`. The images are
/// even elements; they anticommute and square to `-Id`, and the 2^q
/// monomials in them are linearly independent.
pub fn iota_embedding(rep: &CliffordRep) -> Vec<RatMatrix> {
    let p = rep.sig.p;
    let omega = rep.volume_element(&(1..=p).collect::<Vec<_>>()).matrix;
    (1..=rep.sig.q).map(|a| omega.mul(rep.generator(p + a))).collect()
}

// ---------------------------------------------------------------------------
// Even modules
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum BlockLabel {
    Sigma,
    SPlus,
    SMinus,
}

impl std::fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockLabel::Sigma => write!(f, "Sigma"),
            BlockLabel::SPlus => write!(f, "S+"),
            BlockLabel::SMinus => write!(f, "S-"),
        }
    }
}

impl std::str::FromStr for BlockLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Sigma" => Ok(BlockLabel::Sigma),
            "S+" => Ok(BlockLabel::SPlus),
            "S-" => Ok(BlockLabel::SMinus),
            _ => Err(format!("unknown block label {s:?} (expected Sigma, S+ or S-)")),
        }
    }
}

/// True when the even algebra of `Cl(p,q)` is simple, i.e. has a unique
/// irreducible module Sigma.
pub fn even_algebra_simple(sig: Signature) -> bool {
    sig.p % 4 != sig.q % 4
}

/// Quaternionic dimension of an irreducible even module for signature
/// `(3,q)`, with the period-8 recursion `N(q+8) = 16 N(q)`.
pub fn n_of_q(q: usize) -> usize {
    match q {
        0..=3 => 1,
        4 => 2,
        5 => 4,
        6 | 7 => 8,
        _ => 16 * n_of_q(q - 8),
    }
}

/// A module of the even Clifford algebra, presented as an explicit direct
/// sum of labeled irreducible blocks. The stored matrices `gens[i]` are the
/// images of the even elements `e_i e_n`, where `e_n` is the dropped basis
/// vector; products of those recover every even monomial.
#[derive(Clone, Debug)]
pub struct EvenModule {
    pub sig: Signature,
    pub dim_w: usize,
    dropped: usize,
    dropped_square: i64,
    gens: Vec<Option<RatMatrix>>,
    pub blocks: Vec<(BlockLabel, usize, usize)>,
}

pub fn even_module(
    sig: Signature,
    blocks: &[(BlockLabel, usize)],
) -> Result<EvenModule, CliffordError> {
    if sig.dim() == 0 {
        return Err(CliffordError::EmptySignature);
    }
    let simple = even_algebra_simple(sig);
    let semispinors = sig.p % 4 == 3 && sig.q % 4 == 3;
    for &(label, _) in blocks {
        let ok = match label {
            BlockLabel::Sigma => simple,
            BlockLabel::SPlus | BlockLabel::SMinus => semispinors,
        };
        if !ok {
            return Err(CliffordError::InvalidBlockLabel(label, sig.p, sig.q));
        }
    }

    let n = sig.dim();
    let dropped = n;
    let dropped_square = sig.clifford_square(n);
    // squares of the transported generators e_i e_n on the complement
    let small_squares: Vec<i8> = (1..n)
        .map(|i| (-sig.clifford_square(i) * dropped_square) as i8)
        .collect();
    let small = anticommuting_generators(&small_squares);
    let small_dim = small.first().map_or(1, |m| m.rows());

    // per-label irreducible actions of the transported generators
    let irreducible = |label: BlockLabel| -> Vec<RatMatrix> {
        if label == BlockLabel::Sigma {
            return small.clone();
        }
        // split along the eigenspaces of the image of the full volume
        // element e_1 ... e_n, an even element since n is even here
        let vol = raw_monomial(&(1..=n).collect::<Vec<_>>(), &small, sig, dropped, dropped_square);
        let id = RatMatrix::identity(small_dim);
        let sign = if label == BlockLabel::SPlus { 1 } else { -1 };
        let eig = vol.sub(&id.scale(&rint(sign))).nullspace();
        assert!(!eig.is_empty(), "volume eigenspace must not be empty");
        let basis = RatMatrix::from_fn(small_dim, eig.len(), |r, c| eig[c][r].clone());
        small
            .iter()
            .map(|g| {
                let image = g.mul(&basis);
                // solve basis * X = image column by column (invariant subspace)
                let cols: Vec<Vec<Rational>> = (0..image.cols())
                    .map(|c| basis.solve(&image.column(c)).expect("block not invariant"))
                    .collect();
                RatMatrix::from_fn(eig.len(), eig.len(), |r, c| cols[c][r].clone())
            })
            .collect()
    };

    let mut block_gens: Vec<Vec<RatMatrix>> = Vec::new();
    let mut layout = Vec::new();
    let mut offset = 0;
    for &(label, mult) in blocks {
        let action = irreducible(label);
        let d = action.first().map_or(small_dim, |m| m.rows());
        if sig.p == 3 {
            assert_eq!(d, 4 * n_of_q(sig.q), "irreducible even module dimension audit");
        }
        for _ in 0..mult {
            layout.push((label, offset, d));
            offset += d;
            block_gens.push(action.clone());
        }
    }
    let dim_w = offset;
    let gens: Vec<Option<RatMatrix>> = (1..=n)
        .map(|i| {
            if i == dropped {
                return None;
            }
            let blocks: Vec<&RatMatrix> = block_gens.iter().map(|g| &g[i - 1]).collect();
            Some(if blocks.is_empty() {
                RatMatrix::zeros(0, 0)
            } else {
                RatMatrix::block_diag(&blocks)
            })
        })
        .collect();
    Ok(EvenModule { sig, dim_w, dropped, dropped_square, gens, blocks: layout })
}

/// Matrix of the even monomial with the given generator indices on the
/// module carrying `gens` (used before block splitting).
fn raw_monomial(
    indices: &[usize],
    gens: &[RatMatrix],
    sig: Signature,
    dropped: usize,
    dropped_square: i64,
) -> RatMatrix {
    assert!(indices.len() % 2 == 0, "only even monomials act on W");
    let dim = gens.first().map_or(1, |m| m.rows());
    let pair = |i: usize, j: usize| -> RatMatrix {
        assert_ne!(i, j);
        if j == dropped {
            gens[i - 1].clone()
        } else if i == dropped {
            gens[j - 1].neg()
        } else {
            let m = gens[i - 1].mul(&gens[j - 1]);
            if dropped_square > 0 {
                m.neg()
            } else {
                m
            }
        }
    };
    let mut out = RatMatrix::identity(dim);
    for chunk in indices.chunks(2) {
        let (a, b) = (chunk[0], chunk[1]);
        if a == b {
            out = out.scale(&rint(sig.clifford_square(a)));
        } else {
            out = out.mul(&pair(a, b));
        }
    }
    out
}

impl EvenModule {
    /// Rewrites all stored actions in a new W basis: `G -> P^{-1} G P`.
    /// Block offsets are kept verbatim; they remain meaningful only for
    /// block-diagonal changes of basis.
    pub(crate) fn apply_conjugation(&mut self, pinv: &RatMatrix, p: &RatMatrix) {
        for g in self.gens.iter_mut().flatten() {
            *g = pinv.mul(g).mul(p);
        }
    }

    /// Action of `e_i e_j` on W (`i != j`, 1-based global indices).
    pub fn pair(&self, i: usize, j: usize) -> RatMatrix {
        assert_ne!(i, j, "pair requires distinct indices");
        if self.dim_w == 0 {
            return RatMatrix::zeros(0, 0);
        }
        if j == self.dropped {
            self.gens[i - 1].clone().unwrap()
        } else if i == self.dropped {
            self.gens[j - 1].clone().unwrap().neg()
        } else {
            let m = self.gens[i - 1].as_ref().unwrap().mul(self.gens[j - 1].as_ref().unwrap());
            if self.dropped_square > 0 {
                m.neg()
            } else {
                m
            }
        }
    }

    /// Action of an even monomial `e_{i1} ... e_{i2k}` on W.
    pub fn monomial(&self, indices: &[usize]) -> RatMatrix {
        assert!(indices.len() % 2 == 0, "only even monomials act on W");
        let mut out = RatMatrix::identity(self.dim_w);
        for chunk in indices.chunks(2) {
            let (a, b) = (chunk[0], chunk[1]);
            if a == b {
                out = out.scale(&rint(self.sig.clifford_square(a)));
            } else {
                out = out.mul(&self.pair(a, b));
            }
        }
        out
    }

    /// Spin action `ad^{-1}(e_i wedge e_j) = -1/2 e_i e_j` on W.
    pub fn spin_generator(&self, i: usize, j: usize) -> Result<RatMatrix, CliffordError> {
        if i == j {
            return Err(CliffordError::EqualIndices);
        }
        Ok(self.pair(i, j).scale(&rat(-1, 2)))
    }
}

/// Wedge action of `e_i ^ e_j` on V: `(x ^ y) z = <y,z> x - <x,z> y`.
pub fn wedge_matrix(sig: Signature, i: usize, j: usize) -> RatMatrix {
    let n = sig.dim();
    let mut m = RatMatrix::zeros(n, n);
    m.set(i - 1, j - 1, rint(sig.metric_sign(j)));
    m.set(j - 1, i - 1, rint(-sig.metric_sign(i)));
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn check_relations(sig: Signature, gens: &[RatMatrix]) {
        let d = gens[0].rows();
        let id = RatMatrix::identity(d);
        for (a, ga) in gens.iter().enumerate() {
            for (b, gb) in gens.iter().enumerate() {
                let anti = ga.mul(gb).add(&gb.mul(ga));
                let expect = if a == b {
                    id.scale(&rint(2 * sig.clifford_square(a + 1)))
                } else {
                    RatMatrix::zeros(d, d)
                };
                assert_eq!(anti, expect, "clifford relation failed at ({a},{b})");
            }
        }
    }

    #[test]
    fn clifford_1_0() {
        let rep = build_clifford(Signature::new(1, 0)).unwrap();
        assert_eq!(rep.dim_module, 2);
        let g = &rep.generators[0];
        assert_eq!(g.mul(g), RatMatrix::identity(2).neg());
    }

    #[test]
    fn clifford_0_1() {
        let rep = build_clifford(Signature::new(0, 1)).unwrap();
        assert_eq!(rep.dim_module, 2); // faithful sum of the two 1-dim modules
        let g = &rep.generators[0];
        assert_eq!(g.mul(g), RatMatrix::identity(2));
    }

    #[test]
    fn clifford_relations_small_signatures() {
        for (p, q) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (3, 1), (2, 2), (3, 4)] {
            let sig = Signature::new(p, q);
            let rep = build_clifford(sig).unwrap();
            check_relations(sig, &rep.generators);
        }
    }

    #[test]
    fn minimal_dimensions_follow_classification() {
        // (p, q, expected module dimension) from the real Clifford tables
        for (p, q, d) in [
            (1usize, 0usize, 2usize),
            (0, 1, 2),
            (2, 0, 4),  // Cl(0,2)=H
            (0, 2, 2),  // Cl(2,0)=M2(R)
            (3, 0, 8),  // H + H faithful
            (0, 3, 4),  // M2(C)
            (3, 1, 8),  // M2(H)
            (3, 2, 8),  // M4(C)
            (3, 3, 8),  // M8(R)
            (3, 4, 16), // M8(R)+M8(R) faithful
            (7, 0, 16), // M8(R)+M8(R) faithful
            (0, 7, 16), // M8(C)
            (0, 9, 32), // periodicity step
        ] {
            let rep = build_clifford(Signature::new(p, q)).unwrap();
            assert_eq!(rep.dim_module, d, "dimension mismatch for ({p},{q})");
            check_relations(Signature::new(p, q), &rep.generators);
        }
    }

    #[test]
    fn faithfulness_of_nonsimple_cases() {
        // where the full algebra is a sum of two ideals, the volume element
        // must not act as a scalar (otherwise one ideal would be killed)
        for (p, q) in [(3usize, 0usize), (7, 0), (0, 1), (0, 5), (1, 2)] {
            let rep = build_clifford(Signature::new(p, q)).unwrap();
            let all: Vec<usize> = (1..=p + q).collect();
            let vol = rep.volume_element(&all).matrix;
            let id = RatMatrix::identity(rep.dim_module);
            assert_ne!(vol, id, "volume acts as +Id for ({p},{q})");
            assert_ne!(vol, id.neg(), "volume acts as -Id for ({p},{q})");
        }
        let rep = build_clifford(Signature::new(3, 0)).unwrap();
        let vol = rep.volume_element(&[1, 2, 3]).matrix;
        assert_eq!(vol.mul(&vol), RatMatrix::identity(8)); // omega_3^2 = 1
    }

    #[test]
    fn volume_element_properties() {
        for q in [0usize, 1, 2] {
            let rep = build_clifford(Signature::new(3, q)).unwrap();
            let id = RatMatrix::identity(rep.dim_module);
            let vol = rep.volume_element(&[1, 2, 3]).matrix;
            assert_eq!(vol.mul(&vol), id, "omega^2 = 1 for p' = 3, q = {q}");
            // commutes with the listed generators, anticommutes with the rest
            for i in 1..=3 {
                assert_eq!(vol.mul(rep.generator(i)), rep.generator(i).mul(&vol));
            }
            for a in 1..=q {
                assert_eq!(vol.mul(rep.generator(3 + a)), rep.generator(3 + a).mul(&vol).neg());
            }
        }
        // empty product
        let rep = build_clifford(Signature::new(3, 0)).unwrap();
        assert_eq!(rep.volume_element(&[]).matrix, RatMatrix::identity(8));
        // (gamma_1 gamma_2)^2 = -Id in (3,0)
        let v12 = rep.volume_element(&[1, 2]).matrix;
        assert_eq!(v12.mul(&v12), RatMatrix::identity(8).neg());
    }

    #[test]
    fn iota_embedding_examples() {
        // q = 0: empty map
        let rep = build_clifford(Signature::new(3, 0)).unwrap();
        assert!(iota_embedding(&rep).is_empty());
        // q = 1: (w_3 e'_1)^2 = -Id
        let rep = build_clifford(Signature::new(3, 1)).unwrap();
        let iota = iota_embedding(&rep);
        let id = RatMatrix::identity(rep.dim_module);
        assert_eq!(iota[0].mul(&iota[0]), id.neg());
        // q = 2: images anticommute, squares are -Id, monomials independent
        let rep = build_clifford(Signature::new(3, 2)).unwrap();
        let iota = iota_embedding(&rep);
        let id = RatMatrix::identity(rep.dim_module);
        assert_eq!(iota[0].mul(&iota[1]), iota[1].mul(&iota[0]).neg());
        for g in &iota {
            assert_eq!(g.mul(g), id.neg());
        }
        // injectivity on the monomial basis, here and for the non-simple
        // target q = 3
        for q in [2usize, 3] {
            let rep = build_clifford(Signature::new(3, q)).unwrap();
            let iota = iota_embedding(&rep);
            let mut stacked: Vec<Vec<Rational>> = Vec::new();
            for mask in 0..(1u32 << q) {
                let mut m = RatMatrix::identity(rep.dim_module);
                for (a, g) in iota.iter().enumerate() {
                    if mask & (1 << a) != 0 {
                        m = m.mul(g);
                    }
                }
                stacked.push(m.flatten());
            }
            let mat = RatMatrix::from_rows(stacked);
            assert_eq!(mat.rank(), 1 << q, "iota monomials dependent for q = {q}");
        }
    }

    #[test]
    fn even_module_dimensions() {
        let w = even_module(Signature::new(3, 0), &[(BlockLabel::Sigma, 1)]).unwrap();
        assert_eq!(w.dim_w, 4);
        let w = even_module(Signature::new(3, 4), &[(BlockLabel::Sigma, 1)]).unwrap();
        assert_eq!(w.dim_w, 8);
        let w = even_module(
            Signature::new(3, 3),
            &[(BlockLabel::SPlus, 1), (BlockLabel::SMinus, 1)],
        )
        .unwrap();
        assert_eq!(w.dim_w, 8);
        assert_eq!(w.blocks.len(), 2);
        assert_eq!(w.blocks[0].2, 4);
        assert_eq!(w.blocks[1].2, 4);
    }

    #[test]
    fn even_module_label_validation() {
        assert!(matches!(
            even_module(Signature::new(3, 3), &[(BlockLabel::Sigma, 1)]),
            Err(CliffordError::InvalidBlockLabel(..))
        ));
        assert!(matches!(
            even_module(Signature::new(3, 0), &[(BlockLabel::SPlus, 1)]),
            Err(CliffordError::InvalidBlockLabel(..))
        ));
    }

    #[test]
    fn even_module_respects_clifford_relations() {
        for (p, q, blocks) in [
            (3usize, 0usize, vec![(BlockLabel::Sigma, 1usize)]),
            (3, 1, vec![(BlockLabel::Sigma, 1)]),
            (3, 2, vec![(BlockLabel::Sigma, 2)]),
            (7, 0, vec![(BlockLabel::Sigma, 1)]),
            (3, 3, vec![(BlockLabel::SPlus, 1), (BlockLabel::SMinus, 1)]),
        ] {
            let sig = Signature::new(p, q);
            let w = even_module(sig, &blocks).unwrap();
            let n = sig.dim();
            // pair(i,j) pair(j,i) = -(e_i e_j)(e_j e_i)... check via the
            // defining relations: pair(i,j)^2 = e_i e_j e_i e_j = -e_i^2 e_j^2
            for i in 1..=n {
                for j in 1..=n {
                    if i == j {
                        continue;
                    }
                    let pij = w.pair(i, j);
                    let sq = pij.mul(&pij);
                    let expect = RatMatrix::identity(w.dim_w).scale(&rint(
                        -sig.clifford_square(i) * sig.clifford_square(j),
                    ));
                    assert_eq!(sq, expect, "(e{i} e{j})^2 in ({p},{q})");
                    assert_eq!(w.pair(j, i), pij.neg(), "antisymmetry of pairs");
                }
            }
            // two routes through the algebra: e1 e2 e2 e3 = e2^2 e1 e3
            let lhs = w.monomial(&[1, 2, 2, 3]);
            let rhs = w.pair(1, 3).scale(&rint(sig.clifford_square(2)));
            assert_eq!(lhs, rhs, "monomial reduction in ({p},{q})");
            // block invariance under all quadratic monomials
            for (_, off, size) in &w.blocks {
                for i in 1..=n {
                    for j in 1..=n {
                        if i == j {
                            continue;
                        }
                        let m = w.pair(i, j);
                        for c in *off..*off + *size {
                            for r in 0..w.dim_w {
                                if r < *off || r >= *off + *size {
                                    assert!(m.at(r, c).is_zero(), "block leak in ({p},{q})");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spin_generator_examples() {
        let sig = Signature::new(3, 0);
        let w = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        // -2 spin(b,c) = gamma_b gamma_c
        let s = w.spin_generator(2, 3).unwrap();
        assert_eq!(s.scale(&rint(-2)), w.pair(2, 3));
        assert!(matches!(w.spin_generator(1, 1), Err(CliffordError::EqualIndices)));
        // equivariance with the wedge action on V:
        // [spin(1,2) as V-action, e_3] = (e1^e2) e3 = 0 here; check instead
        // the commutation relation of wedge matrices themselves
        let w12 = wedge_matrix(sig, 1, 2);
        let e3 = vec![rint(0), rint(0), rint(1)];
        assert!(w12.mul_vec(&e3).iter().all(|x| x.is_zero()));
        let e2 = vec![rint(0), rint(1), rint(0)];
        assert_eq!(w12.mul_vec(&e2), vec![rint(1), rint(0), rint(0)]);
    }

    #[test]
    fn semispinor_split_by_volume_sign() {
        let sig = Signature::new(3, 3);
        let w = even_module(sig, &[(BlockLabel::SPlus, 1), (BlockLabel::SMinus, 1)]).unwrap();
        let vol = w.monomial(&[1, 2, 3, 4, 5, 6]);
        // +1 on the S+ block, -1 on the S- block
        for c in 0..4 {
            assert_eq!(vol.at(c, c), &rint(1));
        }
        for c in 4..8 {
            assert_eq!(vol.at(c, c), &rint(-1));
        }
    }

    #[test]
    fn n_of_q_table() {
        assert_eq!(
            (0..=8).map(n_of_q).collect::<Vec<_>>(),
            vec![1, 1, 1, 1, 2, 4, 8, 8, 16]
        );
        assert_eq!(n_of_q(9), 16);
        assert_eq!(n_of_q(12), 32);
    }
}
