//! Extended and superextended Poincare algebras.
//!
//! For a module `W` of the even Clifford algebra and a spin-equivariant map
//! `Pi` on the exterior (even case) or symmetric (super case) square of `W`,
//! the algebra `g(Pi) = R D + o(V) + V + W` carries the bracket
//!
//! * `[D, A] = 0`, `[D, v] = v`, `[D, s] = s/2`,
//! * `[A, B]` the commutator of `o(V)`, `[A, v]` the wedge action,
//!   `[A, s]` the spin action `ad^{-1}(A) s`,
//! * `[v, w] = [v, s] = 0` and `[s, t] = Pi(s, t)`.
//!
//! This module solves for the equivariant maps, builds the structure
//! constants, computes the canonical bilinear form `b` and runs the
//! finitely-checkable structure theory: kernel comparison, block
//! decomposition, the isomorphism-class labels, faithfulness of the adjoint
//! action on the radical, and the embedding of `g(V)` into `o(p+1,q+1)`.

use crate::clifford::{even_algebra_simple, wedge_matrix, BlockLabel, EvenModule, Signature};
use crate::matrix::{RatMatrix, RowReducer};
use crate::scalar::{rat, rint, Rational};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Even,
    Super,
}

impl Variant {
    pub fn pi_symmetric(&self) -> bool {
        matches!(self, Variant::Super)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EpaError {
    #[error("Jacobi identity violated on basis triple ({0}, {1}, {2})")]
    JacobiViolation(String, String, String),
    #[error("Pi variant does not match the requested algebra variant")]
    VariantMismatch,
    #[error("signature must satisfy {0}")]
    SignatureConstraint(&'static str),
}

// ---------------------------------------------------------------------------
// Equivariant maps
// ---------------------------------------------------------------------------

/// Coefficient tensor of a bilinear map `W x W -> V`, alternating or
/// symmetric according to the variant. Stored densely as `coeffs[s][t][v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantMap {
    pub variant: Variant,
    pub dim_w: usize,
    pub dim_v: usize,
    coeffs: Vec<Rational>,
}

impl EquivariantMap {
    pub fn zero(variant: Variant, dim_w: usize, dim_v: usize) -> Self {
        EquivariantMap { variant, dim_w, dim_v, coeffs: vec![Rational::zero(); dim_w * dim_w * dim_v] }
    }

    pub fn value(&self, s: usize, t: usize, v: usize) -> &Rational {
        &self.coeffs[(s * self.dim_w + t) * self.dim_v + v]
    }

    pub fn set(&mut self, s: usize, t: usize, v: usize, val: Rational) {
        let sym = if self.variant.pi_symmetric() { val.clone() } else { -val.clone() };
        self.coeffs[(s * self.dim_w + t) * self.dim_v + v] = val;
        if s != t {
            self.coeffs[(t * self.dim_w + s) * self.dim_v + v] = sym;
        }
    }

    /// `Pi(s, t)` as a vector of V-coordinates for basis indices `s`, `t`.
    pub fn bracket(&self, s: usize, t: usize) -> Vec<Rational> {
        (0..self.dim_v).map(|v| self.value(s, t, v).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        EquivariantMap {
            variant: self.variant,
            dim_w: self.dim_w,
            dim_v: self.dim_v,
            coeffs: self.coeffs.iter().map(|c| c.clone() * k.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim_w, self.dim_v), (other.dim_w, other.dim_v));
        EquivariantMap {
            variant: self.variant,
            dim_w: self.dim_w,
            dim_v: self.dim_v,
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    /// Matrix of `s -> Pi(s, .)`, rows indexed by `(t, v)`; its nullspace is
    /// `ker Pi`.
    pub fn kernel_system(&self) -> RatMatrix {
        RatMatrix::from_fn(self.dim_w * self.dim_v, self.dim_w, |row, s| {
            let (t, v) = (row / self.dim_v, row % self.dim_v);
            self.value(s, t, v).clone()
        })
    }

    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        self.kernel_system().nullspace()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.kernel_basis().is_empty()
    }

    /// Direct sum of per-block scaled copies of `self` over a module with
    /// `mult` identical blocks (no cross terms).
    pub fn block_diagonal(&self, scales: &[Rational]) -> Self {
        let d = self.dim_w;
        let mut out = Self::zero(self.variant, d * scales.len(), self.dim_v);
        for (blk, k) in scales.iter().enumerate() {
            for s in 0..d {
                for t in 0..d {
                    for v in 0..self.dim_v {
                        let val = self.value(s, t, v).clone() * k.clone();
                        out.coeffs[((blk * d + s) * out.dim_w + blk * d + t) * out.dim_v + v] = val;
                    }
                }
            }
        }
        out
    }

    /// Conjugate by a W basis change `P`: `Pi'(s,t) = Pi(P s, P t)`.
    pub fn change_basis(&self, p: &RatMatrix) -> Self {
        assert_eq!(p.rows(), self.dim_w);
        let mut out = Self::zero(self.variant, self.dim_w, self.dim_v);
        for s in 0..self.dim_w {
            for t in 0..self.dim_w {
                for v in 0..self.dim_v {
                    let mut acc = Rational::zero();
                    for a in 0..self.dim_w {
                        if p.at(a, s).is_zero() {
                            continue;
                        }
                        for b in 0..self.dim_w {
                            if p.at(b, t).is_zero() || self.value(a, b, v).is_zero() {
                                continue;
                            }
                            acc += self.value(a, b, v).clone()
                                * p.at(a, s).clone()
                                * p.at(b, t).clone();
                        }
                    }
                    out.coeffs[(s * self.dim_w + t) * self.dim_v + v] = acc;
                }
            }
        }
        out
    }

    /// Equivariance residual against the spin generator for `e_i ^ e_j`:
    /// `Pi(A s, t) + Pi(s, A t) - A_V Pi(s, t)`, which must vanish.
    pub fn equivariance_residual(&self, w: &EvenModule, i: usize, j: usize) -> bool {
        let rho = w.spin_generator(i, j).unwrap();
        let av = wedge_matrix(w.sig, i, j);
        for s in 0..self.dim_w {
            for t in 0..self.dim_w {
                for v in 0..self.dim_v {
                    let mut acc = Rational::zero();
                    for u in 0..self.dim_w {
                        if !rho.at(u, s).is_zero() {
                            acc += rho.at(u, s).clone() * self.value(u, t, v).clone();
                        }
                        if !rho.at(u, t).is_zero() {
                            acc += rho.at(u, t).clone() * self.value(s, u, v).clone();
                        }
                    }
                    for x in 0..self.dim_v {
                        if !av.at(v, x).is_zero() {
                            acc -= av.at(v, x).clone() * self.value(s, t, x).clone();
                        }
                    }
                    if !acc.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Basis of the space of spin-equivariant maps on the exterior
/// (alternating) or symmetric square of `W` with values in `V`.
///
/// The linear system is assembled over a Lie-generating chain of wedge
/// generators (equivariance under `A` and `B` implies it under `[A,B]`),
/// then every basis vector is verified against the full set of wedge
/// generators. Each one-dimensional ray is normalized so that the first
/// nonzero entry of its canonical form `b` (or of the map itself when `b`
/// is unavailable) has absolute value 1.
pub fn solve_equivariant(sig: Signature, w: &EvenModule, variant: Variant) -> Vec<EquivariantMap> {
    let dw = w.dim_w;
    let n = sig.dim();
    if dw == 0 {
        return vec![];
    }
    let symmetric = variant.pi_symmetric();
    let mut pairs = Vec::new();
    for s in 0..dw {
        let start = if symmetric { s } else { s + 1 };
        for t in start..dw {
            pairs.push((s, t));
        }
    }
    let pidx = |s: usize, t: usize| pairs.binary_search(&(s, t)).ok();
    let unknowns = pairs.len() * n;
    let unknown = |s: usize, t: usize, v: usize| -> Option<(usize, Rational)> {
        // returns (index, sign) of the unknown representing Pi[s][t][v]
        if s == t && !symmetric {
            return None;
        }
        if s <= t {
            Some((pidx(s, t).unwrap() * n + v, Rational::one()))
        } else {
            let sign = if symmetric { Rational::one() } else { -Rational::one() };
            Some((pidx(t, s).unwrap() * n + v, sign))
        }
    };

    let mut reducer = RowReducer::new(unknowns);
    for i in 1..n {
        let (gi, gj) = (i, i + 1);
        let rho = w.spin_generator(gi, gj).unwrap();
        let av = wedge_matrix(sig, gi, gj);
        for &(s, t) in &pairs {
            for v in 0..n {
                let mut row = vec![Rational::zero(); unknowns];
                let mut nonzero = false;
                for u in 0..dw {
                    if !rho.at(u, s).is_zero() {
                        if let Some((idx, sign)) = unknown(u, t, v) {
                            row[idx] += rho.at(u, s).clone() * sign;
                            nonzero = true;
                        }
                    }
                    if !rho.at(u, t).is_zero() {
                        if let Some((idx, sign)) = unknown(s, u, v) {
                            row[idx] += rho.at(u, t).clone() * sign;
                            nonzero = true;
                        }
                    }
                }
                for x in 0..n {
                    if !av.at(v, x).is_zero() {
                        if let Some((idx, sign)) = unknown(s, t, x) {
                            row[idx] -= av.at(v, x).clone() * sign;
                            nonzero = true;
                        }
                    }
                }
                if nonzero {
                    reducer.insert(row);
                }
            }
        }
    }

    let basis = reducer.nullspace();
    let mut maps = Vec::new();
    for vec in basis {
        let mut map = EquivariantMap::zero(variant, dw, n);
        for (k, &(s, t)) in pairs.iter().enumerate() {
            for v in 0..n {
                if !vec[k * n + v].is_zero() {
                    map.set(s, t, v, vec[k * n + v].clone());
                }
            }
        }
        let map = normalize_map(map, w);
        // exact residual against every spin generator, not just the chain
        for i in 1..=n {
            for j in i + 1..=n {
                assert!(
                    map.equivariance_residual(w, i, j),
                    "solver produced a non-equivariant map"
                );
            }
        }
        maps.push(map);
    }
    maps
}

fn normalize_map(map: EquivariantMap, w: &EvenModule) -> EquivariantMap {
    let reference: Vec<Rational> = if w.sig.p >= 3 {
        canonical_b(w, &map, 3).flatten()
    } else {
        vec![]
    };
    let lead = reference
        .iter()
        .find(|x| !x.is_zero())
        .cloned()
        .or_else(|| map.coeffs.iter().find(|x| !x.is_zero()).cloned());
    match lead {
        Some(l) => map.scale(&(Rational::one() / l.abs())),
        None => map,
    }
}

// ---------------------------------------------------------------------------
// Canonical bilinear form
// ---------------------------------------------------------------------------

/// Canonical form `b(s,t) = <e_1, Pi(e_2 ... e_{p'} s, t)>` for the standard
/// frame of the leading `p'` basis vectors, `p' = 3 mod 4`, `p' <= p`.
pub fn canonical_b(w: &EvenModule, pi: &EquivariantMap, p_prime: usize) -> RatMatrix {
    let frame: Vec<usize> = (1..=p_prime).collect();
    canonical_b_frame(w, pi, &frame)
}

/// `b` for an arbitrary ordered orthonormal frame inside the positive part:
/// `b(s,t) = <e_{f1}, Pi(e_{f2} ... e_{fk} s, t)>`.
pub fn canonical_b_frame(w: &EvenModule, pi: &EquivariantMap, frame: &[usize]) -> RatMatrix {
    assert!(frame.len() % 4 == 3, "frame length must be 3 mod 4");
    assert!(frame.iter().all(|&f| f <= w.sig.p), "frame must lie in the positive part");
    let mono = w.monomial(&frame[1..]);
    let v0 = frame[0] - 1;
    let dw = w.dim_w;
    RatMatrix::from_fn(dw, dw, |s, t| {
        let mut acc = Rational::zero();
        for u in 0..dw {
            if !mono.at(u, s).is_zero() {
                acc += mono.at(u, s).clone() * pi.value(u, t, v0).clone();
            }
        }
        acc
    })
}

/// Outcome of the symmetry and invariance checks of the canonical form.
#[derive(Clone, Debug)]
pub struct BPropertyReport {
    /// `b^T = b` (even) or `b^T = -b` (super).
    pub parity_ok: bool,
    /// generators of `^2 E` and `^2 E'` act b-skew.
    pub skew_action_ok: bool,
    /// generators of `E ^ E'` act b-symmetrically.
    pub symmetric_action_ok: bool,
    /// `b` from the rotated frame `(e_2,e_3,e_1)` equals `b`, and from the
    /// reflected frame `(e_2,e_1,e_3)` equals `-b`.
    pub frame_covariance_ok: bool,
}

impl BPropertyReport {
    pub fn all_ok(&self) -> bool {
        self.parity_ok && self.skew_action_ok && self.symmetric_action_ok && self.frame_covariance_ok
    }
}

/// Verifies the structural properties of `b` for the split `p = p' + p''`.
pub fn check_b_properties(
    w: &EvenModule,
    pi: &EquivariantMap,
    p_prime: usize,
) -> BPropertyReport {
    let sig = w.sig;
    let b = canonical_b(w, pi, p_prime);
    let bt = b.transpose();
    let parity_ok = match pi.variant {
        Variant::Even => bt == b,
        Variant::Super => bt == b.neg(),
    };

    let n = sig.dim();
    let in_e = |i: usize| i <= p_prime;
    let mut skew_action_ok = true;
    let mut symmetric_action_ok = true;
    for i in 1..=n {
        for j in i + 1..=n {
            let rho = w.spin_generator(i, j).unwrap();
            let lhs = rho.transpose().mul(&b);
            let rhs = b.mul(&rho);
            if in_e(i) == in_e(j) {
                // within E or within E': b-skew
                if lhs != rhs.neg() {
                    skew_action_ok = false;
                }
            } else if lhs != rhs {
                symmetric_action_ok = false;
            }
        }
    }

    let mut frame_covariance_ok = true;
    if p_prime == 3 {
        let rotated = canonical_b_frame(w, pi, &[2, 3, 1]);
        let reflected = canonical_b_frame(w, pi, &[2, 1, 3]);
        frame_covariance_ok = rotated == b && reflected == b.neg();
    }
    BPropertyReport { parity_ok, skew_action_ok, symmetric_action_ok, frame_covariance_ok }
}

/// Exact span comparison of `ker Pi` and `ker b`.
#[derive(Clone, Debug)]
pub struct KernelReport {
    pub dim_ker_pi: usize,
    pub dim_ker_b: usize,
    pub equal: bool,
}

pub fn kernel_compare(pi: &EquivariantMap, b: &RatMatrix) -> KernelReport {
    let ker_pi = pi.kernel_basis();
    let ker_b = b.nullspace();
    let mut span_pi = RowReducer::new(pi.dim_w);
    span_pi.insert_all(ker_pi.iter().cloned());
    let mut span_b = RowReducer::new(pi.dim_w);
    span_b.insert_all(ker_b.iter().cloned());
    KernelReport {
        dim_ker_pi: ker_pi.len(),
        dim_ker_b: ker_b.len(),
        equal: span_pi.same_span(&span_b),
    }
}

// ---------------------------------------------------------------------------
// Decomposition and classification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockFlag {
    Kernel,
    DefinitePlus,
    DefiniteMinus,
    IsotropicPair,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    /// flag and `b`-inertia per supplied irreducible block.
    pub blocks: Vec<(BlockLabel, BlockFlag, crate::matrix::Inertia)>,
    /// distinct non-paired blocks are mutually `b`-orthogonal.
    pub b_orthogonal_ok: bool,
    /// `[W_i, W_j] = 0` for blocks in distinct groups.
    pub bracket_orthogonal_ok: bool,
    /// the kernel blocks span exactly `ker b`.
    pub kernel_matches: bool,
    /// indices of paired isotropic blocks.
    pub isotropic_pairs: Vec<(usize, usize)>,
}

impl DecompositionReport {
    pub fn all_ok(&self) -> bool {
        self.b_orthogonal_ok && self.bracket_orthogonal_ok && self.kernel_matches
    }
}

/// Verifies the conclusions of the orthogonal decomposition theorem on a
/// module supplied as an explicit direct sum of irreducible blocks (even
/// variant; the super layer only needs the kernel comparison).
pub fn decompose(w: &EvenModule, pi: &EquivariantMap, b: &RatMatrix) -> DecompositionReport {
    assert_eq!(pi.variant, Variant::Even, "decompose applies to the even variant");
    let blocks = &w.blocks;
    let sub = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> RatMatrix {
        RatMatrix::from_fn(rows.len(), cols.len(), |r, c| {
            b.at(rows.start + r, cols.start + c).clone()
        })
    };
    let mut flags = Vec::new();
    for &(label, off, size) in blocks {
        let bb = sub(off..off + size, off..off + size);
        let inertia = bb.inertia().unwrap();
        let flag = if inertia.n_zero == size {
            BlockFlag::Kernel // refined to IsotropicPair below when paired
        } else if inertia.n_minus == 0 && inertia.n_zero == 0 {
            BlockFlag::DefinitePlus
        } else if inertia.n_plus == 0 && inertia.n_zero == 0 {
            BlockFlag::DefiniteMinus
        } else {
            BlockFlag::IsotropicPair
        };
        flags.push((label, flag, inertia));
    }

    // pair up blocks with vanishing internal form that still pair with a
    // partner (those are not kernel blocks)
    let mut isotropic_pairs = Vec::new();
    let mut partner: Vec<Option<usize>> = vec![None; blocks.len()];
    for i in 0..blocks.len() {
        if flags[i].1 != BlockFlag::Kernel || partner[i].is_some() {
            continue;
        }
        let (_, oi, si) = blocks[i];
        for j in 0..blocks.len() {
            if i == j || partner[j].is_some() {
                continue;
            }
            let (_, oj, sj) = blocks[j];
            let cross = sub(oi..oi + si, oj..oj + sj);
            if !cross.is_zero() {
                partner[i] = Some(j);
                partner[j] = Some(i);
                flags[i].1 = BlockFlag::IsotropicPair;
                flags[j].1 = BlockFlag::IsotropicPair;
                isotropic_pairs.push((i, j));
                break;
            }
        }
    }

    // distinct blocks not paired together must be b-orthogonal and must not
    // bracket into V
    let mut b_orthogonal_ok = true;
    let mut bracket_orthogonal_ok = true;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            if partner[i] == Some(j) {
                continue;
            }
            let (_, oi, si) = blocks[i];
            let (_, oj, sj) = blocks[j];
            if !sub(oi..oi + si, oj..oj + sj).is_zero() {
                b_orthogonal_ok = false;
            }
            'outer: for s in oi..oi + si {
                for t in oj..oj + sj {
                    if pi.bracket(s, t).iter().any(|x| !x.is_zero()) {
                        bracket_orthogonal_ok = false;
                        break 'outer;
                    }
                }
            }
        }
    }

    // kernel blocks must span ker b exactly
    let mut span = RowReducer::new(w.dim_w);
    for (k, &(_, off, size)) in blocks.iter().enumerate() {
        if flags[k].1 == BlockFlag::Kernel {
            for c in off..off + size {
                let mut v = vec![Rational::zero(); w.dim_w];
                v[c] = Rational::one();
                span.insert(v);
            }
        }
    }
    let mut ker_span = RowReducer::new(w.dim_w);
    ker_span.insert_all(b.nullspace());
    let kernel_matches = span.same_span(&ker_span);

    DecompositionReport {
        blocks: flags,
        b_orthogonal_ok,
        bracket_orthogonal_ok,
        kernel_matches,
        isotropic_pairs,
    }
}

/// Isomorphism-class label: the triple `(l0, l+, l-)` when the even algebra
/// has a unique irreducible module, the per-semispinor sextuple when both
/// `p` and `q` are 3 mod 4. Canonicalized to the lexicographic minimum over
/// the allowed symmetry group.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum ClassLabel {
    Triple { l0: usize, l_plus: usize, l_minus: usize },
    Sextuple { plus: (usize, usize, usize), minus: (usize, usize, usize) },
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassLabel::Triple { l0, l_plus, l_minus } => {
                write!(f, "({l0},{l_plus},{l_minus})")
            }
            ClassLabel::Sextuple { plus, minus } => write!(
                f,
                "({},{},{},{},{},{})",
                plus.0, plus.1, plus.2, minus.0, minus.1, minus.2
            ),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("classification requires p = 3 mod 4 (got p = {0})")]
    BadSignature(usize),
    #[error("b pairs the two semispinor isotypic components")]
    MixedIsotypic,
}

/// Computes `(l0, l+, l-)` (or the semispinor sextuple) from the inertia of
/// `b`, using that every definite block of an orthogonal decomposition
/// contributes one full irreducible dimension to the positive or negative
/// count.
pub fn classify(w: &EvenModule, pi: &EquivariantMap) -> Result<ClassLabel, ClassifyError> {
    let sig = w.sig;
    if sig.p % 4 != 3 {
        return Err(ClassifyError::BadSignature(sig.p));
    }
    let b = canonical_b(w, pi, sig.p);
    if even_algebra_simple(sig) {
        let dim_sigma = w.blocks.first().map(|b| b.2).unwrap_or(1);
        let inertia = b.inertia().unwrap();
        let (l0, lp, lm) = (
            inertia.n_zero / dim_sigma,
            inertia.n_plus / dim_sigma,
            inertia.n_minus / dim_sigma,
        );
        let (lp, lm) = if (lp, lm) <= (lm, lp) { (lp, lm) } else { (lm, lp) };
        Ok(ClassLabel::Triple { l0, l_plus: lp, l_minus: lm })
    } else {
        // isotypic components are canonical; b must not pair them
        let counts = |label: BlockLabel| -> Result<(usize, usize, usize), ClassifyError> {
            let idx: Vec<usize> = w
                .blocks
                .iter()
                .filter(|&&(l, _, _)| l == label)
                .flat_map(|&(_, off, size)| off..off + size)
                .collect();
            let dim_s = w
                .blocks
                .iter()
                .find(|&&(l, _, _)| l == label)
                .map(|b| b.2)
                .unwrap_or(1);
            let sub = RatMatrix::from_fn(idx.len(), idx.len(), |r, c| {
                b.at(idx[r], idx[c]).clone()
            });
            let inertia = sub.inertia().unwrap();
            Ok((inertia.n_zero / dim_s, inertia.n_plus / dim_s, inertia.n_minus / dim_s))
        };
        // cross-pairing must vanish
        let plus_idx: Vec<usize> = w
            .blocks
            .iter()
            .filter(|&&(l, _, _)| l == BlockLabel::SPlus)
            .flat_map(|&(_, off, size)| off..off + size)
            .collect();
        let minus_idx: Vec<usize> = w
            .blocks
            .iter()
            .filter(|&&(l, _, _)| l == BlockLabel::SMinus)
            .flat_map(|&(_, off, size)| off..off + size)
            .collect();
        for &s in &plus_idx {
            for &t in &minus_idx {
                if !b.at(s, t).is_zero() {
                    return Err(ClassifyError::MixedIsotypic);
                }
            }
        }
        let p = counts(BlockLabel::SPlus)?;
        let m = counts(BlockLabel::SMinus)?;
        // Gamma = Z2 x Z2: swap (l+,l-) in both components simultaneously,
        // and swap the two components
        let orbit = [
            (p, m),
            ((p.0, p.2, p.1), (m.0, m.2, m.1)),
            (m, p),
            ((m.0, m.2, m.1), (p.0, p.2, p.1)),
        ];
        let (plus, minus) = orbit.iter().min().copied().unwrap();
        Ok(ClassLabel::Sextuple { plus, minus })
    }
}

// ---------------------------------------------------------------------------
// The algebra g(Pi)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisLabel {
    D,
    /// `e_i ^ e_j`, `i < j`, 1-based global V indices.
    Wedge(usize, usize),
    /// `e_i`, 1-based global V index.
    V(usize),
    /// W basis vector, 0-based.
    W(usize),
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisLabel::D => write!(f, "D"),
            BasisLabel::Wedge(i, j) => write!(f, "e{i}^e{j}"),
            BasisLabel::V(i) => write!(f, "e{i}"),
            BasisLabel::W(k) => write!(f, "s{k}"),
        }
    }
}

type SparseVec = Vec<(usize, Rational)>;

/// The (super)extended Poincare algebra `g(Pi)` as labeled structure
/// constants, together with the module action used to build it.
#[derive(Clone, Debug)]
pub struct EpaStructure {
    pub sig: Signature,
    pub variant: Variant,
    pub weven: EvenModule,
    pub pi: EquivariantMap,
    pub labels: Vec<BasisLabel>,
    pub parity: Vec<u8>,
    brackets: Vec<Vec<SparseVec>>,
}

impl EpaStructure {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn dim_w(&self) -> usize {
        self.weven.dim_w
    }

    pub fn n_wedges(&self) -> usize {
        let n = self.sig.dim();
        n * (n - 1) / 2
    }

    pub fn wedge_index(&self, i: usize, j: usize) -> usize {
        assert!(i < j);
        let n = self.sig.dim();
        // lex order of (i,j), i < j, 1-based
        1 + (i - 1) * n - (i - 1) * i / 2 + (j - i - 1)
    }

    pub fn v_index(&self, i: usize) -> usize {
        1 + self.n_wedges() + (i - 1)
    }

    pub fn w_index(&self, k: usize) -> usize {
        1 + self.n_wedges() + self.sig.dim() + k
    }

    pub fn d_index(&self) -> usize {
        0
    }

    /// Indices of the radical `r = R D + V + W`.
    pub fn radical_indices(&self) -> Vec<usize> {
        let mut idx = vec![self.d_index()];
        idx.extend((1..=self.sig.dim()).map(|i| self.v_index(i)));
        idx.extend((0..self.dim_w()).map(|k| self.w_index(k)));
        idx
    }

    /// Indices of the nilradical `n = V + W`.
    pub fn nilradical_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (1..=self.sig.dim()).map(|i| self.v_index(i)).collect();
        idx.extend((0..self.dim_w()).map(|k| self.w_index(k)));
        idx
    }

    pub fn bracket_basis(&self, x: usize, y: usize) -> &SparseVec {
        &self.brackets[x][y]
    }

    /// Bracket of coordinate vectors.
    pub fn bracket_vec(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim()];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                for (k, c) in &self.brackets[i][j] {
                    out[*k] += xi.clone() * yj.clone() * c.clone();
                }
            }
        }
        out
    }

    /// First basis triple violating the (super) Jacobi identity, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let dim = self.dim();
        let sparse_bracket = |x: usize, v: &SparseVec| -> SparseVec {
            let mut acc: std::collections::BTreeMap<usize, Rational> = Default::default();
            for (k, c) in v {
                for (t, d) in &self.brackets[x][*k] {
                    let e = acc.entry(*t).or_insert_with(Rational::zero);
                    *e += c.clone() * d.clone();
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        };
        for x in 0..dim {
            for y in 0..dim {
                let sign_xy = (self.parity[x] & self.parity[y]) == 1;
                for z in 0..dim {
                    // [x,[y,z]] - [[x,y],z] - (-1)^{xy} [y,[x,z]]
                    let mut acc: std::collections::BTreeMap<usize, Rational> = Default::default();
                    for (k, c) in sparse_bracket(x, &self.brackets[y][z]) {
                        *acc.entry(k).or_insert_with(Rational::zero) += c;
                    }
                    for (k, c) in &self.brackets[x][y] {
                        for (t, d) in &self.brackets[*k][z] {
                            *acc.entry(*t).or_insert_with(Rational::zero) -= c.clone() * d.clone();
                        }
                    }
                    for (k, c) in sparse_bracket(y, &self.brackets[x][z]) {
                        let e = acc.entry(k).or_insert_with(Rational::zero);
                        if sign_xy {
                            *e += c;
                        } else {
                            *e -= c;
                        }
                    }
                    if acc.values().any(|v| !v.is_zero()) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    /// `[D, x]` eigenvalue bookkeeping: 0 on `o(V)`, 1 on `V`, 1/2 on `W`.
    pub fn derivation_eigenvalues_ok(&self) -> bool {
        let d = self.d_index();
        for (idx, label) in self.labels.iter().enumerate() {
            let expect: SparseVec = match label {
                BasisLabel::D | BasisLabel::Wedge(..) => vec![],
                BasisLabel::V(_) => vec![(idx, Rational::one())],
                BasisLabel::W(_) => vec![(idx, rat(1, 2))],
            };
            if self.brackets[d][idx] != expect {
                return false;
            }
        }
        true
    }

    /// Rebuilds the same algebra in a new W basis (`P` columns express the
    /// new basis in the old coordinates).
    pub fn change_w_basis(&self, p: &RatMatrix) -> EpaStructure {
        let pinv = p.inverse().expect("W basis change must be invertible");
        let mut weven = self.weven.clone();
        weven.conjugate_gens(&pinv, p);
        let pi = self.pi.change_basis(p);
        build_epa(self.sig, weven, pi, self.variant).expect("basis change preserves Jacobi")
    }

    pub fn canonical_b(&self, p_prime: usize) -> RatMatrix {
        canonical_b(&self.weven, &self.pi, p_prime)
    }
}

impl EvenModule {
    /// Conjugates all stored generator actions by a basis change of W.
    pub(crate) fn conjugate_gens(&mut self, pinv: &RatMatrix, p: &RatMatrix) {
        self.apply_conjugation(pinv, p);
    }
}

/// Builds the full structure-constant tensor and validates the (super)
/// Jacobi identity.
pub fn build_epa(
    sig: Signature,
    weven: EvenModule,
    pi: EquivariantMap,
    variant: Variant,
) -> Result<EpaStructure, EpaError> {
    if pi.variant != variant {
        return Err(EpaError::VariantMismatch);
    }
    let n = sig.dim();
    let dw = weven.dim_w;
    let mut labels = vec![BasisLabel::D];
    for i in 1..=n {
        for j in i + 1..=n {
            labels.push(BasisLabel::Wedge(i, j));
        }
    }
    labels.extend((1..=n).map(BasisLabel::V));
    labels.extend((0..dw).map(BasisLabel::W));
    let dim = labels.len();
    let parity: Vec<u8> = labels
        .iter()
        .map(|l| match (variant, l) {
            (Variant::Super, BasisLabel::W(_)) => 1,
            _ => 0,
        })
        .collect();

    let mut structure = EpaStructure {
        sig,
        variant,
        weven,
        pi,
        labels,
        parity,
        brackets: vec![vec![SparseVec::new(); dim]; dim],
    };

    let n_wedges = structure.n_wedges();
    let wedge_of = |k: usize| -> (usize, usize) {
        match &structure.labels[1 + k] {
            BasisLabel::Wedge(i, j) => (*i, *j),
            _ => unreachable!(),
        }
    };

    // precompute wedge matrices and spin actions
    let wedges: Vec<RatMatrix> = (0..n_wedges)
        .map(|k| {
            let (i, j) = wedge_of(k);
            wedge_matrix(sig, i, j)
        })
        .collect();
    let spins: Vec<RatMatrix> = (0..n_wedges)
        .map(|k| {
            let (i, j) = wedge_of(k);
            structure.weven.spin_generator(i, j).unwrap()
        })
        .collect();

    let set = |x: usize, y: usize, val: SparseVec, br: &mut Vec<Vec<SparseVec>>, parity: &[u8]| {
        let sign_swap = (parity[x] & parity[y]) == 1;
        br[y][x] = val
            .iter()
            .map(|(k, c)| (*k, if sign_swap { c.clone() } else { -c.clone() }))
            .collect();
        br[x][y] = val;
    };

    let mut brackets = std::mem::take(&mut structure.brackets);
    let d = structure.d_index();
    // [D, v] = v, [D, s] = s/2
    for i in 1..=n {
        let vi = structure.v_index(i);
        set(d, vi, vec![(vi, Rational::one())], &mut brackets, &structure.parity);
    }
    for k in 0..dw {
        let wk = structure.w_index(k);
        set(d, wk, vec![(wk, rat(1, 2))], &mut brackets, &structure.parity);
    }
    // o(V) internal brackets, action on V, action on W
    for a in 0..n_wedges {
        let xa = 1 + a;
        for b in a..n_wedges {
            if a == b {
                continue;
            }
            let xb = 1 + b;
            let comm = wedges[a].commutator(&wedges[b]);
            let mut val = SparseVec::new();
            for i in 1..=n {
                for j in i + 1..=n {
                    let c = comm.at(i - 1, j - 1).clone() * rint(sig.metric_sign(j));
                    if !c.is_zero() {
                        val.push((structure.wedge_index(i, j), c));
                    }
                }
            }
            set(xa, xb, val, &mut brackets, &structure.parity);
        }
        for i in 1..=n {
            let vi = structure.v_index(i);
            let col = wedges[a].column(i - 1);
            let val: SparseVec = col
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(r, c)| (structure.v_index(r + 1), c))
                .collect();
            set(xa, vi, val, &mut brackets, &structure.parity);
        }
        for k in 0..dw {
            let wk = structure.w_index(k);
            let col = spins[a].column(k);
            let val: SparseVec = col
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(r, c)| (structure.w_index(r), c))
                .collect();
            set(xa, wk, val, &mut brackets, &structure.parity);
        }
    }
    // [W, W] = Pi
    for s in 0..dw {
        let t_start = s;
        for t in t_start..dw {
            let val: SparseVec = structure
                .pi
                .bracket(s, t)
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(v, c)| (structure.v_index(v + 1), c))
                .collect();
            let (ws, wt) = (structure.w_index(s), structure.w_index(t));
            if s == t {
                // graded antisymmetry allows [s,s] != 0 only in the super case
                brackets[ws][wt] = val;
            } else {
                set(ws, wt, val, &mut brackets, &structure.parity);
            }
        }
    }
    structure.brackets = brackets;

    if structure.variant == Variant::Even {
        // ordinary algebra: [s,s] must vanish, guaranteed by alternating Pi
        for s in 0..dw {
            debug_assert!(structure.brackets[structure.w_index(s)][structure.w_index(s)].is_empty());
        }
    }

    if let Some((x, y, z)) = structure.jacobi_violation() {
        return Err(EpaError::JacobiViolation(
            structure.labels[x].to_string(),
            structure.labels[y].to_string(),
            structure.labels[z].to_string(),
        ));
    }
    Ok(structure)
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

/// Levi data: the nilradical `n = V + W` must satisfy `[[n,n],n] = 0`, with
/// `[n,n] = 0` exactly when `Pi = 0`.
#[derive(Clone, Debug)]
pub struct LeviReport {
    pub two_step_ok: bool,
    pub nn_zero: bool,
    pub pi_zero: bool,
}

pub fn check_levi(alg: &EpaStructure) -> LeviReport {
    let nil = alg.nilradical_indices();
    let mut nn_nonzero = false;
    let mut two_step_ok = true;
    for &x in &nil {
        for &y in &nil {
            let br = alg.bracket_basis(x, y);
            if !br.is_empty() {
                nn_nonzero = true;
                for (k, _) in br {
                    for &z in &nil {
                        if !alg.bracket_basis(*k, z).is_empty() {
                            two_step_ok = false;
                        }
                    }
                }
            }
        }
    }
    LeviReport { two_step_ok, nn_zero: !nn_nonzero, pi_zero: alg.pi.is_zero() }
}

/// The map `g -> der(r)`, `x -> ad(x)|_r`, must have trivial kernel
/// (`dim V > 2`).
pub fn check_ad_faithful_on_radical(alg: &EpaStructure) -> Result<bool, EpaError> {
    if alg.sig.dim() <= 2 {
        return Err(EpaError::SignatureConstraint("dim V > 2"));
    }
    let rad = alg.radical_indices();
    let dim = alg.dim();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for &a in &rad {
        for b_pos in 0..rad.len() {
            let mut row = vec![Rational::zero(); dim];
            let mut nonzero = false;
            for x in 0..dim {
                for (k, c) in alg.bracket_basis(x, a) {
                    if *k == rad[b_pos] {
                        row[x] = c.clone();
                        if !c.is_zero() {
                            nonzero = true;
                        }
                    }
                }
            }
            if nonzero {
                rows.push(row);
            }
        }
    }
    let m = RatMatrix::from_rows(rows);
    Ok(m.nullspace().is_empty())
}

/// Bracket-preservation of the embedding `g(V) -> o(p+1, q+1)` defined by
/// `D -> e_0 ^ e_0'`, `v -> (e_0 - e_0') ^ v` and the identity on `o(V)`.
pub fn check_emb_gv(alg: &EpaStructure) -> bool {
    let sig = alg.sig;
    let big = Signature::new(sig.p + 1, sig.q + 1);
    // index map into (p+1, q+1): e_0 -> 1, e_i -> 1 + i for positive i,
    // negative e'_a keeps its offset, e_0' -> last
    let map_v = |i: usize| -> usize { 1 + i };
    let e0 = 1usize;
    let e0p = big.dim();
    let phi = |label: &BasisLabel| -> RatMatrix {
        match label {
            BasisLabel::D => wedge_matrix(big, e0, e0p),
            BasisLabel::Wedge(i, j) => wedge_matrix(big, map_v(*i), map_v(*j)),
            BasisLabel::V(i) => {
                wedge_matrix(big, e0, map_v(*i)).sub(&wedge_matrix(big, e0p, map_v(*i)))
            }
            BasisLabel::W(_) => unreachable!(),
        }
    };
    let gv: Vec<usize> = (0..alg.dim())
        .filter(|&x| !matches!(alg.labels[x], BasisLabel::W(_)))
        .collect();
    for &x in &gv {
        for &y in &gv {
            let lhs = phi(&alg.labels[x]).commutator(&phi(&alg.labels[y]));
            let mut rhs = RatMatrix::zeros(big.dim(), big.dim());
            for (k, c) in alg.bracket_basis(x, y) {
                rhs = rhs.add(&phi(&alg.labels[*k]).scale(c));
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::even_module;

    fn sigma_instance(p: usize, q: usize) -> (Signature, EvenModule) {
        let sig = Signature::new(p, q);
        let w = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        (sig, w)
    }

    #[test]
    fn solver_dimension_one_for_irreducible_modules() {
        for (p, q) in [(3usize, 0usize), (3, 1), (3, 2)] {
            let (sig, w) = sigma_instance(p, q);
            let basis = solve_equivariant(sig, &w, Variant::Even);
            assert_eq!(basis.len(), 1, "dim for ({p},{q})");
        }
    }

    #[test]
    fn solver_empty_module() {
        let sig = Signature::new(3, 0);
        let w = even_module(sig, &[]).unwrap();
        assert!(solve_equivariant(sig, &w, Variant::Even).is_empty());
    }

    #[test]
    fn build_epa_even_and_jacobi() {
        let (sig, w) = sigma_instance(3, 0);
        let pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
        let alg = build_epa(sig, w, pi, Variant::Even).unwrap();
        assert!(alg.derivation_eigenvalues_ok());
        assert_eq!(alg.dim(), 1 + 3 + 3 + 4);
        // [D, s] = s/2 example is covered by derivation_eigenvalues_ok
    }

    #[test]
    fn levi_structure() {
        let (sig, w) = sigma_instance(3, 0);
        let pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
        let alg = build_epa(sig, w.clone(), pi, Variant::Even).unwrap();
        let levi = check_levi(&alg);
        assert!(levi.two_step_ok && !levi.nn_zero && !levi.pi_zero);
        let zero = EquivariantMap::zero(Variant::Even, w.dim_w, sig.dim());
        let alg0 = build_epa(sig, w, zero, Variant::Even).unwrap();
        let levi0 = check_levi(&alg0);
        assert!(levi0.two_step_ok && levi0.nn_zero && levi0.pi_zero);
    }

    #[test]
    fn b_properties_and_kernel() {
        let (sig, w) = sigma_instance(3, 1);
        let pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
        let rep = check_b_properties(&w, &pi, 3);
        assert!(rep.all_ok(), "{rep:?}");
        let b = canonical_b(&w, &pi, 3);
        let ker = kernel_compare(&pi, &b);
        assert!(ker.equal);
        assert_eq!(ker.dim_ker_pi, 0);
        // zero map: both kernels are all of W
        let zero = EquivariantMap::zero(Variant::Even, w.dim_w, sig.dim());
        let b0 = canonical_b(&w, &zero, 3);
        assert!(b0.is_zero());
        let ker0 = kernel_compare(&zero, &b0);
        assert!(ker0.equal);
        assert_eq!(ker0.dim_ker_pi, w.dim_w);
    }

    #[test]
    fn normalized_first_b_entry_is_unit() {
        let (sig, w) = sigma_instance(3, 0);
        let pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
        let b = canonical_b(&w, &pi, 3);
        let first = b.flatten().into_iter().find(|x| !x.is_zero()).unwrap();
        assert_eq!(first.abs(), Rational::one());
    }

    #[test]
    fn classify_examples_and_invariance() {
        let (sig, w) = sigma_instance(3, 0);
        let pi1 = solve_equivariant(sig, &w, Variant::Even).remove(0);
        // one definite block
        let c1 = classify(&w, &pi1).unwrap();
        assert!(matches!(
            c1,
            ClassLabel::Triple { l0: 0, l_plus: 0, l_minus: 1 }
        ));
        // invariance under sign flip and positive squares
        assert_eq!(classify(&w, &pi1.scale(&rint(-1))).unwrap(), c1);
        assert_eq!(classify(&w, &pi1.scale(&rint(4))).unwrap(), c1);
        // zero map
        let zero = EquivariantMap::zero(Variant::Even, w.dim_w, sig.dim());
        assert!(matches!(
            classify(&w, &zero).unwrap(),
            ClassLabel::Triple { l0: 1, l_plus: 0, l_minus: 0 }
        ));
        // mixed: one live block, one kernel block
        let w2 = even_module(sig, &[(BlockLabel::Sigma, 2)]).unwrap();
        let pi2 = pi1.block_diagonal(&[Rational::one(), Rational::zero()]);
        assert!(matches!(
            classify(&w2, &pi2).unwrap(),
            ClassLabel::Triple { l0: 1, l_plus: 0, l_minus: 1 }
        ));
    }

    #[test]
    fn decompose_flags() {
        let sig = Signature::new(3, 0);
        let w2 = even_module(sig, &[(BlockLabel::Sigma, 2)]).unwrap();
        let w1 = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        let pi1 = solve_equivariant(sig, &w1, Variant::Even).remove(0);
        let pi = pi1.block_diagonal(&[Rational::one(), Rational::zero()]);
        let b = canonical_b(&w2, &pi, 3);
        let rep = decompose(&w2, &pi, &b);
        assert!(rep.all_ok(), "{rep:?}");
        assert!(matches!(rep.blocks[0].1, BlockFlag::DefinitePlus | BlockFlag::DefiniteMinus));
        assert_eq!(rep.blocks[1].1, BlockFlag::Kernel);
        assert!(rep.isotropic_pairs.is_empty());
    }

    #[test]
    fn ad_faithful_and_embedding() {
        let (sig, w) = sigma_instance(3, 0);
        let pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
        let alg = build_epa(sig, w, pi, Variant::Even).unwrap();
        assert!(check_ad_faithful_on_radical(&alg).unwrap());
        assert!(check_emb_gv(&alg));
    }

    #[test]
    fn super_variant_builds() {
        let (sig, w) = sigma_instance(3, 0);
        let basis = solve_equivariant(sig, &w, Variant::Super);
        assert!(!basis.is_empty(), "symmetric equivariant maps must exist for (3,0)");
        // find a basis element (or accept the first) and build the algebra
        let pi = basis[0].clone();
        let alg = build_epa(sig, w.clone(), pi.clone(), Variant::Super).unwrap();
        assert!(alg.derivation_eigenvalues_ok());
        // b is skew in the super case
        let rep = check_b_properties(&w, &pi, 3);
        assert!(rep.all_ok(), "{rep:?}");
    }

    #[test]
    fn jacobi_violation_detected() {
        let (sig, w) = sigma_instance(3, 0);
        let mut pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
        // corrupt one entry: destroys equivariance hence Jacobi
        let old = pi.value(0, 1, 0).clone();
        pi.set(0, 1, 0, old + rint(1));
        let pi_broken = pi;
        assert!(matches!(
            build_epa(sig, w, pi_broken, Variant::Even),
            Err(EpaError::JacobiViolation(..))
        ));
    }

    #[test]
    fn variant_mismatch_rejected() {
        let (sig, w) = sigma_instance(3, 0);
        let pi = solve_equivariant(sig, &w, Variant::Even).remove(0);
        assert!(matches!(
            build_epa(sig, w, pi, Variant::Super),
            Err(EpaError::VariantMismatch)
        ));
    }
}
