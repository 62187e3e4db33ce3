//! Homogeneous quaternionic geometry attached to a (super)extended
//! Poincare algebra.
//!
//! For `p = 3 + r` the isotropy subalgebra is `k = o(3) + o(r,q)` (wedges
//! inside `E = span(e_1,e_2,e_3)` and inside its complement) and the
//! tangent model is `m = m(V) + W` with the grid basis
//!
//! ```text
//!   e_00 = D,  e_0a = e'_a,  e_alpha0 = e_alpha,  e_alpha a = e_alpha ^ e'_a
//! ```
//!
//! (`iota`-major order, `a = 1..r+q`), followed by the W basis. The metric
//! is `diag(eps_i)` on the grid and `-b` (even) or `b` (super) on W. The
//! quaternionic frame acts by quaternion left multiplication on the grid
//! index `iota` and by `J_alpha = e_beta e_gamma` on W.
//!
//! Nomizu maps are produced twice on nondegenerate instances: once from the
//! closed formulas of the Levi-Civita connection and once from the exact
//! Koszul solve; the two must agree entrywise. Degenerate instances route
//! through the torsion-free extension of the nondegenerate part.

use crate::clifford::even_module;
use crate::epa::{build_epa, BasisLabel, EpaStructure, EquivariantMap, Variant};
use crate::matrix::RatMatrix;
use crate::scalar::{rat, rint, Rational};
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error)]
pub enum GeomError {
    #[error("geometry requires p >= 3 (got p = {0})")]
    SignatureConstraint(usize),
    #[error("the canonical form b is degenerate; use the degenerate-connection path")]
    DegenerateMetric,
    #[error("supplied kernel block does not equal ker Pi")]
    KernelMismatch,
    #[error("ker Pi is not a union of trailing module blocks; rebuild W with kernel blocks last")]
    KernelNotTrailing,
    #[error("instance is not Riemannian (requires p = 3 and -b positive definite)")]
    NotRiemannian,
    #[error(transparent)]
    Epa(#[from] crate::epa::EpaError),
}

/// Label of an `m`-basis vector: a grid point of `m(V)` or a W vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MLabel {
    /// `(iota, i)` with `iota = 0..3`, `i = 0..r+q`.
    Grid(usize, usize),
    W(usize),
}

/// The reductive split `g = k + m` with the paper's basis conventions.
#[derive(Clone, Debug)]
pub struct IsotropyDecomposition {
    pub alg: EpaStructure,
    pub r: usize,
    pub q: usize,
    pub k_idx: Vec<usize>,
    pub m_labels: Vec<MLabel>,
    pub m_to_g: Vec<usize>,
    /// metric signs per grid column `i = 0..r+q`.
    pub eps: Vec<i64>,
    /// index in `m` of the first W vector.
    pub w_offset: usize,
}

impl IsotropyDecomposition {
    pub fn dim_m(&self) -> usize {
        self.m_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.r + self.q + 1
    }

    pub fn grid(&self, iota: usize, i: usize) -> usize {
        iota * self.cols() + i
    }

    /// Parity of an `m` basis vector (0 on the grid, 1 on W in the super
    /// case).
    pub fn m_parity(&self, m: usize) -> u8 {
        self.alg.parity[self.m_to_g[m]]
    }

    /// Projection `g -> m` (coordinate selection along `k`).
    pub fn project(&self, g_vec: &[Rational]) -> Vec<Rational> {
        self.m_to_g.iter().map(|&gi| g_vec[gi].clone()).collect()
    }

    /// `pi [x, y]` for two m-basis indices, in m coordinates.
    pub fn bracket_m(&self, x: usize, y: usize) -> Vec<Rational> {
        self.project(&self.bracket_g(x, y))
    }

    /// Full bracket `[x, y]` of two m-basis vectors in g coordinates.
    pub fn bracket_g(&self, x: usize, y: usize) -> Vec<Rational> {
        let mut g_vec = vec![Rational::zero(); self.alg.dim()];
        for (k, c) in self.alg.bracket_basis(self.m_to_g[x], self.m_to_g[y]) {
            g_vec[*k] = c.clone();
        }
        g_vec
    }

    /// Matrix of `ad(x)|_m` for a g basis index `x` normalizing `m`.
    pub fn ad_m(&self, x: usize) -> RatMatrix {
        let dim = self.dim_m();
        let mut out = RatMatrix::zeros(dim, dim);
        for (col, &gy) in self.m_to_g.iter().enumerate() {
            for (k, c) in self.alg.bracket_basis(x, gy) {
                if let Some(row) = self.m_to_g.iter().position(|&g| g == *k) {
                    out.set(row, col, c.clone());
                }
            }
        }
        out
    }
}

/// Splits `g = k + m` and verifies the bracket closure `[k,k] c k`,
/// `[k,m] c m`.
pub fn isotropy_split(alg: EpaStructure) -> Result<IsotropyDecomposition, GeomError> {
    let sig = alg.sig;
    if sig.p < 3 {
        return Err(GeomError::SignatureConstraint(sig.p));
    }
    let (r, q) = (sig.p - 3, sig.q);
    let cols = r + q + 1;
    let mut k_idx = Vec::new();
    for (idx, label) in alg.labels.iter().enumerate() {
        if let BasisLabel::Wedge(i, j) = label {
            if (*i <= 3 && *j <= 3) || (*i > 3 && *j > 3) {
                k_idx.push(idx);
            }
        }
    }
    let mut m_labels = Vec::new();
    let mut m_to_g = Vec::new();
    for iota in 0..4 {
        for i in 0..cols {
            m_labels.push(MLabel::Grid(iota, i));
            let g = match (iota, i) {
                (0, 0) => alg.d_index(),
                (0, a) => alg.v_index(3 + a),
                (alpha, 0) => alg.v_index(alpha),
                (alpha, a) => alg.wedge_index(alpha, 3 + a),
            };
            m_to_g.push(g);
        }
    }
    let w_offset = m_labels.len();
    for k in 0..alg.dim_w() {
        m_labels.push(MLabel::W(k));
        m_to_g.push(alg.w_index(k));
    }
    let eps: Vec<i64> = (0..cols)
        .map(|i| if i == 0 { 1 } else if i <= r { -1 } else { 1 })
        .collect();
    let dec = IsotropyDecomposition { alg, r, q, k_idx, m_labels, m_to_g, eps, w_offset };

    // bracket closure: [k,k] c k and [k,m] c m
    let in_k = |idx: usize| dec.k_idx.contains(&idx);
    let in_m = |idx: usize| dec.m_to_g.contains(&idx);
    for &x in &dec.k_idx {
        for &y in &dec.k_idx {
            for (t, _) in dec.alg.bracket_basis(x, y) {
                assert!(in_k(*t), "[k,k] escaped k");
            }
        }
        for &y in &dec.m_to_g {
            for (t, _) in dec.alg.bracket_basis(x, y) {
                assert!(in_m(*t), "[k,m] escaped m");
            }
        }
    }
    Ok(dec)
}

// ---------------------------------------------------------------------------
// Metric
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MetricForm {
    pub matrix: RatMatrix,
}

impl MetricForm {
    pub fn value(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let gy = self.matrix.mul_vec(y);
        x.iter()
            .zip(gy.iter())
            .map(|(a, b)| a.clone() * b.clone())
            .fold(Rational::zero(), |s, t| s + t)
    }
}

/// Builds the invariant metric `diag(eps) (+) (-b | b)` and verifies its
/// k-invariance; fails if `b` is singular.
pub fn build_metric(dec: &IsotropyDecomposition, b: &RatMatrix) -> Result<MetricForm, GeomError> {
    let dw = dec.alg.dim_w();
    if b.rank() != dw {
        return Err(GeomError::DegenerateMetric);
    }
    let dim = dec.dim_m();
    let mut g = RatMatrix::zeros(dim, dim);
    for iota in 0..4 {
        for i in 0..dec.cols() {
            let idx = dec.grid(iota, i);
            g.set(idx, idx, rint(dec.eps[i]));
        }
    }
    let sign = match dec.alg.variant {
        Variant::Even => -Rational::one(),
        Variant::Super => Rational::one(),
    };
    for s in 0..dw {
        for t in 0..dw {
            let val = b.at(s, t).clone() * sign.clone();
            if !val.is_zero() {
                g.set(dec.w_offset + s, dec.w_offset + t, val);
            }
        }
    }
    // k-invariance: ad(x)^T g + g ad(x) = 0 for all x in k (k is even, so
    // no graded signs enter)
    for &x in &dec.k_idx {
        let a = dec.ad_m(x);
        let resid = a.transpose().mul(&g).add(&g.mul(&a));
        assert!(resid.is_zero(), "metric failed k-invariance");
    }
    Ok(MetricForm { matrix: g })
}

// ---------------------------------------------------------------------------
// Quaternionic frame
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct QuaternionicFrame {
    /// `J_1, J_2, J_3` on `m`.
    pub j: [RatMatrix; 3],
}

impl QuaternionicFrame {
    pub fn j(&self, alpha: usize) -> &RatMatrix {
        &self.j[alpha - 1]
    }
}

fn cyclic(alpha: usize) -> (usize, usize) {
    match alpha {
        1 => (2, 3),
        2 => (3, 1),
        3 => (1, 2),
        _ => unreachable!(),
    }
}

/// `J_alpha` = quaternion left multiplication on the grid, `e_beta e_gamma`
/// on W.
pub fn build_quaternionic_frame(dec: &IsotropyDecomposition) -> QuaternionicFrame {
    let dim = dec.dim_m();
    let dw = dec.alg.dim_w();
    let j = |alpha: usize| -> RatMatrix {
        let mut m = RatMatrix::zeros(dim, dim);
        let (beta, gamma) = cyclic(alpha);
        for i in 0..dec.cols() {
            // quaternion left multiplication by the alpha unit
            m.set(dec.grid(alpha, i), dec.grid(0, i), rint(1));
            m.set(dec.grid(0, i), dec.grid(alpha, i), rint(-1));
            m.set(dec.grid(gamma, i), dec.grid(beta, i), rint(1));
            m.set(dec.grid(beta, i), dec.grid(gamma, i), rint(-1));
        }
        let w_action = dec.alg.weven.pair(beta, gamma);
        for s in 0..dw {
            for t in 0..dw {
                if !w_action.at(s, t).is_zero() {
                    m.set(dec.w_offset + s, dec.w_offset + t, w_action.at(s, t).clone());
                }
            }
        }
        m
    };
    QuaternionicFrame { j: [j(1), j(2), j(3)] }
}

/// Structural validation of the frame: hypercomplex relations, hermitian
/// property against a metric, and the specific `k`-normalizer relations.
pub fn validate_frame(
    dec: &IsotropyDecomposition,
    frame: &QuaternionicFrame,
    metric: Option<&MetricForm>,
) -> bool {
    let dim = dec.dim_m();
    let id = RatMatrix::identity(dim);
    for alpha in 1..=3 {
        if frame.j(alpha).mul(frame.j(alpha)) != id.neg() {
            return false;
        }
    }
    if frame.j(1).mul(frame.j(2)) != *frame.j(3) {
        return false;
    }
    if let Some(g) = metric {
        for alpha in 1..=3 {
            let resid = frame.j(alpha).transpose().mul(&g.matrix).add(&g.matrix.mul(frame.j(alpha)));
            if !resid.is_zero() {
                return false;
            }
        }
    }
    // k normalizes the frame: [ad(e_beta ^ e_gamma), J_alpha] = 0 and
    // [ad(e_beta ^ e_gamma), J_beta] = -J_gamma; o(E') centralizes
    for &x in &dec.k_idx {
        let BasisLabel::Wedge(i, j) = dec.alg.labels[x] else { continue };
        let a = dec.ad_m(x);
        if i > 3 {
            for alpha in 1..=3 {
                if !a.commutator(frame.j(alpha)).is_zero() {
                    return false;
                }
            }
        } else {
            // (i,j) inside E: the remaining index plays the role of alpha,
            // and [ad(e_i ^ e_j), J_i] = -J_j, [ad(e_i ^ e_j), J_j] = J_i
            let alpha = 6 - i - j;
            if !a.commutator(frame.j(alpha)).is_zero() {
                return false;
            }
            if a.commutator(frame.j(i)) != frame.j(j).neg() {
                return false;
            }
            if a.commutator(frame.j(j)) != *frame.j(i) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Nomizu maps
// ---------------------------------------------------------------------------

/// Family of Nomizu operators `L_x` on `m`, indexed by the g basis.
#[derive(Clone, Debug, PartialEq)]
pub struct NomizuMap {
    pub l: Vec<RatMatrix>,
}

impl NomizuMap {
    /// `L` applied to a g coordinate vector.
    pub fn of_vec(&self, x: &[Rational]) -> RatMatrix {
        let dim = self.l[0].rows();
        let mut out = RatMatrix::zeros(dim, dim);
        for (i, c) in x.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.l[i].scale(c));
            }
        }
        out
    }

    pub fn of_m<'a>(&'a self, dec: &IsotropyDecomposition, m: usize) -> &'a RatMatrix {
        &self.l[dec.m_to_g[m]]
    }
}

fn wedge_g(g: &RatMatrix, dim: usize, x: usize, y: usize) -> RatMatrix {
    // (x ^_g y)(z) = g(y,z) x - g(x,z) y on basis vectors
    let mut m = RatMatrix::zeros(dim, dim);
    for c in 0..dim {
        if !g.at(y, c).is_zero() {
            m.set(x, c, g.at(y, c).clone());
        }
        if !g.at(x, c).is_zero() {
            let v = m.at(y, c).clone() - g.at(x, c).clone();
            m.set(y, c, v);
        }
    }
    m
}

/// Closed-form Levi-Civita Nomizu map. The even and super variants share
/// every displayed formula; they differ only in the sign of the metric
/// adjointness determining `L_s|W` from `L_s|m(V)`.
pub fn nomizu_closed_form(
    dec: &IsotropyDecomposition,
    metric: &MetricForm,
) -> Result<NomizuMap, GeomError> {
    let g = &metric.matrix;
    let dim = dec.dim_m();
    let dw = dec.alg.dim_w();
    let cols = dec.cols();
    let mut l: Vec<RatMatrix> = vec![RatMatrix::zeros(dim, dim); dec.alg.dim()];

    for &x in &dec.k_idx {
        l[x] = dec.ad_m(x);
    }
    let frame = build_quaternionic_frame(dec);
    // L_{e_alpha} = 1/2 J_alpha
    //   + 1/2 sum_i eps_i e_{alpha i} ^_g e'_i
    //   - 1/2 sum_i eps_i e_{gamma i} ^_g e_{beta i}
    for alpha in 1..=3 {
        let (beta, gamma) = cyclic(alpha);
        let mut m = frame.j(alpha).scale(&rat(1, 2));
        for i in 0..cols {
            let e = rat(dec.eps[i], 2);
            m = m.add(&wedge_g(g, dim, dec.grid(alpha, i), dec.grid(0, i)).scale(&e));
            m = m.sub(&wedge_g(g, dim, dec.grid(gamma, i), dec.grid(beta, i)).scale(&e));
        }
        l[dec.alg.v_index(alpha)] = m;
    }
    // L_{e'_a} = sum_iota e_{iota a} ^_g e_iota on m(V),
    //            1/2 e_1 e_2 e_3 e'_a on W
    for a in 1..cols {
        let mut m = RatMatrix::zeros(dim, dim);
        for iota in 0..4 {
            m = m.add(&wedge_g(g, dim, dec.grid(iota, a), dec.grid(iota, 0)));
        }
        let cliff = dec.alg.weven.monomial(&[1, 2, 3, 3 + a]).scale(&rat(1, 2));
        for s in 0..dw {
            for t in 0..dw {
                if !cliff.at(s, t).is_zero() {
                    m.set(dec.w_offset + s, dec.w_offset + t, cliff.at(s, t).clone());
                }
            }
        }
        l[dec.alg.v_index(3 + a)] = m;
    }
    // L_{e_0} = L_{e_{alpha a}} = 0: already zero.

    // L_s: the m(V) -> W block from L_s e'_0 = s/2, L_s e'_a =
    // (e_1 e_2 e_3 e'_a s)/2 and L_s e_{alpha i} = J_alpha L_s e_{0i};
    // the W -> m(V) block from g(L_s t, x) = -g(t, L_s x) (even) or
    // +g(t, L_s x) (super).
    let sigma = match dec.alg.variant {
        Variant::Even => -Rational::one(),
        Variant::Super => Rational::one(),
    };
    let half_cliff: Vec<RatMatrix> = (1..cols)
        .map(|a| dec.alg.weven.monomial(&[1, 2, 3, 3 + a]).scale(&rat(1, 2)))
        .collect();
    for s in 0..dw {
        let mut m = RatMatrix::zeros(dim, dim);
        let mut base: Vec<Vec<Rational>> = Vec::with_capacity(cols); // images of e_{0i}
        {
            let mut v = vec![Rational::zero(); dw];
            v[s] = rat(1, 2);
            base.push(v);
        }
        for a in 1..cols {
            base.push(half_cliff[a - 1].column(s));
        }
        for (i, img) in base.iter().enumerate() {
            for (t, c) in img.iter().enumerate() {
                if !c.is_zero() {
                    m.set(dec.w_offset + t, dec.grid(0, i), c.clone());
                }
            }
        }
        for alpha in 1..=3 {
            let (beta, gamma) = cyclic(alpha);
            let jw = dec.alg.weven.pair(beta, gamma);
            for (i, img) in base.iter().enumerate() {
                let jimg = jw.mul_vec(img);
                for (t, c) in jimg.iter().enumerate() {
                    if !c.is_zero() {
                        m.set(dec.w_offset + t, dec.grid(alpha, i), c.clone());
                    }
                }
            }
        }
        for t in 0..dw {
            for x in 0..dec.w_offset {
                let MLabel::Grid(_, i) = dec.m_labels[x] else { unreachable!() };
                let mut acc = Rational::zero();
                for u in 0..dw {
                    let gw = g.at(dec.w_offset + t, dec.w_offset + u);
                    if !gw.is_zero() {
                        let a_ux = m.at(dec.w_offset + u, x);
                        if !a_ux.is_zero() {
                            acc += gw.clone() * a_ux.clone();
                        }
                    }
                }
                if !acc.is_zero() {
                    let val = sigma.clone() * acc / rint(dec.eps[i]);
                    m.set(x, dec.w_offset + t, val);
                }
            }
        }
        l[dec.alg.w_index(s)] = m;
    }
    Ok(NomizuMap { l })
}

/// Exact Koszul-formula solve:
/// `-2 <L_x pi y, pi z> = <pi[x,y], pi z> - <pi x, pi[y,z]> - (-1)^{xy} <pi y, pi[x,z]>`,
/// solved against the Gram matrix, independently of the closed form.
pub fn nomizu_koszul_oracle(
    dec: &IsotropyDecomposition,
    metric: &MetricForm,
) -> Result<NomizuMap, GeomError> {
    let g = &metric.matrix;
    let dim = dec.dim_m();
    let ginv_t = g.transpose().inverse().ok_or(GeomError::DegenerateMetric)?;
    let mut l: Vec<RatMatrix> = vec![RatMatrix::zeros(dim, dim); dec.alg.dim()];
    for &x in &dec.k_idx {
        l[x] = dec.ad_m(x);
    }
    let brackets: Vec<Vec<Vec<Rational>>> = (0..dim)
        .map(|x| (0..dim).map(|y| dec.bracket_m(x, y)).collect())
        .collect();
    // <u, basis_z> = (G^T u)_z, so all three pairings reduce to rows of G
    let g_row = |vec: &[Rational], z: usize| -> Rational {
        let mut acc = Rational::zero();
        for (i, c) in vec.iter().enumerate() {
            if !c.is_zero() {
                let gv = g.at(i, z);
                if !gv.is_zero() {
                    acc += c.clone() * gv.clone();
                }
            }
        }
        acc
    };
    for x in 0..dim {
        let px = dec.m_parity(x);
        let mut mx = RatMatrix::zeros(dim, dim);
        for y in 0..dim {
            let py = dec.m_parity(y);
            let graded = (px & py) == 1;
            let mut w = Vec::with_capacity(dim);
            for z in 0..dim {
                // <pi[x,y], z>
                let mut rhs = g_row(&brackets[x][y], z);
                // - <x, pi[y,z]>
                rhs = rhs - g.mul_vec(&brackets[y][z])[x].clone();
                // - (-1)^{xy} <y, pi[x,z]>
                let third = g.mul_vec(&brackets[x][z])[y].clone();
                rhs = if graded { rhs + third } else { rhs - third };
                w.push(rhs * rat(-1, 2));
            }
            let u = ginv_t.mul_vec(&w);
            for (row, c) in u.into_iter().enumerate() {
                if !c.is_zero() {
                    mx.set(row, y, c);
                }
            }
        }
        l[dec.m_to_g[x]] = mx;
    }
    Ok(NomizuMap { l })
}

/// Torsion tensor `T(x,y) = -(L_x y - (-1)^{xy} L_y x + pi[x,y])` over the
/// m basis.
pub fn torsion(dec: &IsotropyDecomposition, n: &NomizuMap) -> Vec<Vec<Vec<Rational>>> {
    let dim = dec.dim_m();
    let mut out = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
    for x in 0..dim {
        let lx = n.of_m(dec, x);
        for y in 0..dim {
            let ly = n.of_m(dec, y);
            let sign = if dec.m_parity(x) & dec.m_parity(y) == 1 { -1i64 } else { 1 };
            let br = dec.bracket_m(x, y);
            for z in 0..dim {
                let val = lx.at(z, y).clone() - ly.at(z, x).clone() * rint(sign) + br[z].clone();
                out[x][y][z] = -val;
            }
        }
    }
    out
}

pub fn tensor_is_zero(t: &[Vec<Vec<Rational>>]) -> bool {
    t.iter().flatten().flatten().all(|x| x.is_zero())
}

/// Graded metricity residual `<L_x y, z> + (-1)^{xy} <y, L_x z>`; must be
/// zero for the Levi-Civita map.
pub fn metricity_holds(
    dec: &IsotropyDecomposition,
    n: &NomizuMap,
    metric: &MetricForm,
) -> bool {
    let g = &metric.matrix;
    let dim = dec.dim_m();
    for x in 0..dim {
        let lx = n.of_m(dec, x);
        let px = dec.m_parity(x);
        // G L_x + (sign pattern) L_x^T G, entry (y,z):
        for y in 0..dim {
            for z in 0..dim {
                let mut acc = Rational::zero();
                for t in 0..dim {
                    // <L_x y, z> = sum_t (L_x)[t][y] G[t][z]
                    if !lx.at(t, y).is_zero() && !g.at(t, z).is_zero() {
                        acc += lx.at(t, y).clone() * g.at(t, z).clone();
                    }
                }
                let sign = if px & dec.m_parity(y) == 1 { -1i64 } else { 1 };
                for t in 0..dim {
                    if !g.at(y, t).is_zero() && !lx.at(t, z).is_zero() {
                        acc += g.at(y, t).clone() * lx.at(t, z).clone() * rint(sign);
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

// ---------------------------------------------------------------------------
// Curvature and the Einstein check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CurvatureData {
    /// `R(x,y)` for all ordered m-basis pairs.
    pub r: Vec<Vec<RatMatrix>>,
    pub ric: RatMatrix,
    pub einstein_c: Option<Rational>,
}

/// Assembles `R(x,y) = [L_x, L_y] + L_{[x,y]}` (graded commutator), the
/// Ricci tensor as the graded trace of `x -> R(x,y) z`, and the exact
/// Einstein constant when `Ric = c g`.
pub fn curvature_and_einstein(
    dec: &IsotropyDecomposition,
    n: &NomizuMap,
    metric: &MetricForm,
) -> CurvatureData {
    let dim = dec.dim_m();
    let mut r = vec![vec![RatMatrix::zeros(dim, dim); dim]; dim];
    for x in 0..dim {
        let lx = n.of_m(dec, x);
        for y in 0..dim {
            let ly = n.of_m(dec, y);
            let graded = (dec.m_parity(x) & dec.m_parity(y)) == 1;
            let prod = lx.mul(ly);
            let comm = if graded { prod.add(&ly.mul(lx)) } else { prod.sub(&ly.mul(lx)) };
            let br = dec.bracket_g(x, y);
            r[x][y] = comm.add(&n.of_vec(&br));
        }
    }
    // Ric(y,z) = graded trace of x -> R(x,y) z
    let mut ric = RatMatrix::zeros(dim, dim);
    for y in 0..dim {
        for z in 0..dim {
            let mut acc = Rational::zero();
            for x in 0..dim {
                let v = r[x][y].at(x, z);
                if !v.is_zero() {
                    if dec.m_parity(x) == 1 {
                        acc -= v.clone();
                    } else {
                        acc += v.clone();
                    }
                }
            }
            ric.set(y, z, acc);
        }
    }
    let einstein_c = ric.solve_proportionality(&metric.matrix);
    CurvatureData { r, ric, einstein_c }
}

/// `[R(x,y), J_alpha]` must lie in the span of the frame for all pairs.
pub fn q_annihilates_r(
    dec: &IsotropyDecomposition,
    curv: &CurvatureData,
    frame: &QuaternionicFrame,
) -> bool {
    let dim = dec.dim_m();
    let span = frame_span_system(frame);
    for x in 0..dim {
        for y in 0..dim {
            for alpha in 1..=3 {
                let c = curv.r[x][y].commutator(frame.j(alpha));
                if span.solve(&c.flatten()).is_none() {
                    return false;
                }
            }
        }
    }
    true
}

fn frame_span_system(frame: &QuaternionicFrame) -> RatMatrix {
    let flat: [Vec<Rational>; 3] =
        [frame.j[0].flatten(), frame.j[1].flatten(), frame.j[2].flatten()];
    RatMatrix::from_fn(flat[0].len(), 3, |r, c| flat[c][r].clone())
}

// ---------------------------------------------------------------------------
// Normalizer check and the 1-forms omega
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct NormalizerReport {
    pub all_in_span: bool,
    /// (g basis index, alpha) of the first failure, if any.
    pub first_failure: Option<(usize, usize)>,
    /// `omega_alpha(x)` over the m basis (index `alpha - 1`).
    pub omega: [Vec<Rational>; 3],
}

/// Checks `[L_x, J_alpha] in span(J_1,J_2,J_3)` for every basis vector of g
/// and reads off the decomposition 1-forms `omega_alpha` on m from
/// `[L,J_1] = 2 omega_3 J_2 - 2 omega_2 J_3` and
/// `[L,J_2] = 2 omega_1 J_3 - 2 omega_3 J_1`.
pub fn check_normalizer(
    dec: &IsotropyDecomposition,
    n: &NomizuMap,
    frame: &QuaternionicFrame,
) -> NormalizerReport {
    let span = frame_span_system(frame);
    let dim_g = dec.alg.dim();
    let mut all_in_span = true;
    let mut first_failure = None;
    let mut coeffs: Vec<Option<[Vec<Rational>; 3]>> = vec![None; dim_g];
    for x in 0..dim_g {
        let mut per_alpha: [Vec<Rational>; 3] = Default::default();
        let mut ok = true;
        for alpha in 1..=3 {
            let c = n.l[x].commutator(frame.j(alpha));
            match span.solve(&c.flatten()) {
                Some(sol) => per_alpha[alpha - 1] = sol,
                None => {
                    ok = false;
                    if first_failure.is_none() {
                        first_failure = Some((x, alpha));
                    }
                }
            }
        }
        if ok {
            coeffs[x] = Some(per_alpha);
        } else {
            all_in_span = false;
        }
    }
    let dim_m = dec.dim_m();
    let mut omega: [Vec<Rational>; 3] = [
        vec![Rational::zero(); dim_m],
        vec![Rational::zero(); dim_m],
        vec![Rational::zero(); dim_m],
    ];
    for m in 0..dim_m {
        if let Some(c) = &coeffs[dec.m_to_g[m]] {
            omega[0][m] = c[1][2].clone() * rat(1, 2);
            omega[1][m] = -c[0][2].clone() * rat(1, 2);
            omega[2][m] = c[0][1].clone() * rat(1, 2);
        }
    }
    NormalizerReport { all_in_span, first_failure, omega }
}

// ---------------------------------------------------------------------------
// Degenerate extension
// ---------------------------------------------------------------------------

/// Extends the Levi-Civita Nomizu map of the nondegenerate part `W'` to a
/// torsion-free quaternionic Nomizu map on `m = m(V) + W' + W_0`, where
/// `W_0 = ker Pi` spans the trailing `dim W - dim W'` basis vectors:
///
/// * `omega_alpha|W_0 = 0`,
/// * `Lbar_{e_0}|W_0 = Lbar_{e_{alpha a}}|W_0 = Lbar_{e_alpha}|W_0 = 0`,
/// * `Lbar_{e'_a}|W_0 = 1/2 e_1 e_2 e_3 e'_a`,
/// * `Lbar_s|W_0 = 0` for `s in W`,
/// * `Lbar_s x = (-1)^x L_x s - [s, x]` for `s in W_0`, `x in m(Pi')`
///   (the parity sign only appears in the super case).
pub fn nomizu_degenerate_extension(
    dec: &IsotropyDecomposition,
    l_prime: &NomizuMap,
    sub_dec: &IsotropyDecomposition,
    dim_w_prime: usize,
) -> Result<NomizuMap, GeomError> {
    let dw = dec.alg.dim_w();
    let dim = dec.dim_m();
    assert_eq!(sub_dec.alg.dim_w(), dim_w_prime);
    assert_eq!(sub_dec.cols(), dec.cols());

    // the trailing block must span exactly ker Pi
    {
        let mut ker_span = crate::matrix::RowReducer::new(dw);
        ker_span.insert_all(dec.alg.pi.kernel_basis());
        let mut trailing = crate::matrix::RowReducer::new(dw);
        for k in dim_w_prime..dw {
            let mut v = vec![Rational::zero(); dw];
            v[k] = Rational::one();
            trailing.insert(v);
        }
        if !ker_span.same_span(&trailing) {
            return Err(GeomError::KernelMismatch);
        }
    }

    let sub_dim = sub_dec.dim_m();
    let embed = |i: usize| -> usize {
        if i < sub_dec.w_offset {
            i
        } else {
            dec.w_offset + (i - sub_dec.w_offset)
        }
    };
    let embed_matrix = |m: &RatMatrix| -> RatMatrix {
        let mut out = RatMatrix::zeros(dim, dim);
        for r in 0..sub_dim {
            for c in 0..sub_dim {
                if !m.at(r, c).is_zero() {
                    out.set(embed(r), embed(c), m.at(r, c).clone());
                }
            }
        }
        out
    };

    let mut l: Vec<RatMatrix> = vec![RatMatrix::zeros(dim, dim); dec.alg.dim()];
    for &x in &dec.k_idx {
        l[x] = dec.ad_m(x);
    }
    let frame = build_quaternionic_frame(dec);
    // m(V) operators: the sub map embedded, plus the W_0 columns
    for m_idx in 0..dec.w_offset {
        let g_full = dec.m_to_g[m_idx];
        // D, wedge and V labels carry identical indices in both algebras
        let mut mat = embed_matrix(&l_prime.l[g_full]);
        match dec.m_labels[m_idx] {
            MLabel::Grid(0, 0) => { /* L_{e_0}|W_0 = 0 */ }
            MLabel::Grid(0, a) => {
                let cliff = dec.alg.weven.monomial(&[1, 2, 3, 3 + a]).scale(&rat(1, 2));
                for t in dim_w_prime..dw {
                    for u in 0..dw {
                        if !cliff.at(u, t).is_zero() {
                            mat.set(dec.w_offset + u, dec.w_offset + t, cliff.at(u, t).clone());
                        }
                    }
                }
            }
            MLabel::Grid(alpha, 0) => {
                // L_{e_alpha}|W_0 = omega'_alpha(e_alpha) J_alpha = J_alpha / 2
                let j = frame.j(alpha);
                for t in dim_w_prime..dw {
                    let col = dec.w_offset + t;
                    for u in 0..dw {
                        let v = j.at(dec.w_offset + u, col);
                        if !v.is_zero() {
                            mat.set(dec.w_offset + u, col, v.clone() * rat(1, 2));
                        }
                    }
                }
            }
            MLabel::Grid(..) => { /* L_{e_{alpha a}}|W_0 = 0 */ }
            MLabel::W(_) => unreachable!(),
        }
        l[g_full] = mat;
    }
    // W' operators: embedded verbatim (Lbar_s|W_0 = 0, omega|W_0 = 0)
    for k in 0..dim_w_prime {
        l[dec.alg.w_index(k)] = embed_matrix(&l_prime.l[sub_dec.alg.w_index(k)]);
    }
    // W_0 operators
    for k in dim_w_prime..dw {
        let g_s = dec.alg.w_index(k);
        let m_s = dec.w_offset + k;
        let mut mat = RatMatrix::zeros(dim, dim);
        for x in 0..dim {
            if x >= dec.w_offset + dim_w_prime {
                continue; // L_s|W_0 = 0
            }
            let sign = if dec.alg.variant == Variant::Super && dec.m_parity(x) == 1 {
                -1i64
            } else {
                1
            };
            let g_x = dec.m_to_g[x];
            let lx_s = l[g_x].column(m_s);
            let br = dec.bracket_m(m_s, x); // [s, x] projected to m
            for row in 0..dim {
                let val = lx_s[row].clone() * rint(sign) - br[row].clone();
                if !val.is_zero() {
                    mat.set(row, x, val);
                }
            }
        }
        l[g_s] = mat;
    }
    Ok(NomizuMap { l })
}

// ---------------------------------------------------------------------------
// Riemannian labels
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlekseevskyLabel {
    pub q: usize,
    /// `l` (and the split `(l+, l-)` when semispinors occur).
    pub l_counts: (usize, Option<usize>),
    pub dim_h: usize,
    pub family: String,
}

/// Family tags of the Riemannian instances: requires `p = 3`, the even
/// variant and `-b` positive definite.
pub fn alekseevsky_labels(
    dec: &IsotropyDecomposition,
    b: &RatMatrix,
) -> Result<AlekseevskyLabel, GeomError> {
    if dec.r != 0 || dec.alg.variant != Variant::Even {
        return Err(GeomError::NotRiemannian);
    }
    let inertia = b.neg().inertia().map_err(|_| GeomError::NotRiemannian)?;
    if !(inertia.is_positive_definite() && inertia.n_plus == dec.alg.dim_w()) {
        return Err(GeomError::NotRiemannian);
    }
    let q = dec.q;
    let blocks = &dec.alg.weven.blocks;
    let count = |label: crate::clifford::BlockLabel| {
        blocks.iter().filter(|&&(l, _, _)| l == label).count()
    };
    let (l, l_counts) = if q % 4 == 3 {
        let lp = count(crate::clifford::BlockLabel::SPlus);
        let lm = count(crate::clifford::BlockLabel::SMinus);
        (lp + lm, (lp, Some(lm)))
    } else {
        let l = count(crate::clifford::BlockLabel::Sigma);
        (l, (l, None))
    };
    let dim_m = dec.dim_m();
    assert_eq!(dim_m % 4, 0);
    let dim_h = dim_m / 4;
    assert_eq!(
        dim_h,
        q + 1 + l * crate::clifford::n_of_q(q),
        "dimension formula dim_H = q + 1 + l N(q)"
    );
    let family = match q {
        0 => "quaternionic-hyperbolic".to_string(),
        1 => format!("SU({},2)-type", l + 2),
        2 => format!("T({l})"),
        3 => format!("W({},{})", l_counts.0, l_counts.1.unwrap_or(0)),
        _ => "V-family".to_string(),
    };
    Ok(AlekseevskyLabel { q, l_counts, dim_h, family })
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

/// Everything the verification checks consume for one instance.
pub struct GeometryData {
    pub dec: IsotropyDecomposition,
    pub metric: Option<MetricForm>,
    pub frame: QuaternionicFrame,
    pub nomizu: NomizuMap,
    pub koszul: Option<NomizuMap>,
    pub degenerate: bool,
}

fn orthonormalizing_change(variant: Variant, b: &RatMatrix) -> RatMatrix {
    match variant {
        Variant::Even => b.congruence_diagonalize().expect("b is symmetric").0,
        Variant::Super => b.darboux_reduce().expect("b is skew").0,
    }
}

/// Rewrites W in a basis where the metric block is diagonal (even) or in
/// Darboux form (super), splits the isotropy and produces the Nomizu data
/// along the nondegenerate or the degenerate route.
pub fn build_geometry(alg: &EpaStructure) -> Result<GeometryData, GeomError> {
    let b0 = alg.canonical_b(3);
    let dw = alg.dim_w();
    if b0.rank() == dw {
        let p = orthonormalizing_change(alg.variant, &b0);
        let alg2 = alg.change_w_basis(&p);
        let b = alg2.canonical_b(3);
        let dec = isotropy_split(alg2)?;
        let metric = build_metric(&dec, &b)?;
        let frame = build_quaternionic_frame(&dec);
        let nomizu = nomizu_closed_form(&dec, &metric)?;
        let koszul = nomizu_koszul_oracle(&dec, &metric)?;
        Ok(GeometryData {
            dec,
            metric: Some(metric),
            frame,
            nomizu,
            koszul: Some(koszul),
            degenerate: false,
        })
    } else {
        // the kernel must consist of trailing module blocks
        let ker = alg.pi.kernel_basis();
        let mut ker_span = crate::matrix::RowReducer::new(dw);
        ker_span.insert_all(ker);
        let mut live_blocks = 0usize;
        let mut dim_w_prime = 0usize;
        for &(_, off, size) in &alg.weven.blocks {
            let mut in_kernel = true;
            for c in off..off + size {
                let mut v = vec![Rational::zero(); dw];
                v[c] = Rational::one();
                if !ker_span.contains(&v) {
                    in_kernel = false;
                    break;
                }
            }
            if !in_kernel {
                if off != dim_w_prime {
                    return Err(GeomError::KernelNotTrailing);
                }
                live_blocks += 1;
                dim_w_prime = off + size;
            }
        }
        if ker_span.rank() != dw - dim_w_prime {
            return Err(GeomError::KernelNotTrailing);
        }
        let sub_blocks: Vec<(crate::clifford::BlockLabel, usize)> = alg
            .weven
            .blocks
            .iter()
            .take(live_blocks)
            .map(|&(l, _, _)| (l, 1))
            .collect();
        let sub_w = even_module(alg.sig, &sub_blocks).expect("sub-module labels are valid");
        let mut sub_pi = EquivariantMap::zero(alg.variant, dim_w_prime, alg.sig.dim());
        for s in 0..dim_w_prime {
            let t_start = if alg.variant.pi_symmetric() { s } else { s + 1 };
            for t in t_start..dim_w_prime {
                for v in 0..alg.sig.dim() {
                    let val = alg.pi.value(s, t, v).clone();
                    if !val.is_zero() {
                        sub_pi.set(s, t, v, val);
                    }
                }
            }
        }
        let sub_alg = build_epa(alg.sig, sub_w, sub_pi, alg.variant)?;
        let sub_b0 = sub_alg.canonical_b(3);
        let p_sub = orthonormalizing_change(alg.variant, &sub_b0);
        let sub_alg2 = sub_alg.change_w_basis(&p_sub);
        let sub_b = sub_alg2.canonical_b(3);
        let sub_dec = isotropy_split(sub_alg2)?;
        let sub_metric = build_metric(&sub_dec, &sub_b)?;
        let sub_nomizu = nomizu_closed_form(&sub_dec, &sub_metric)?;
        let p_full = RatMatrix::block_diag(&[&p_sub, &RatMatrix::identity(dw - dim_w_prime)]);
        let alg2 = alg.change_w_basis(&p_full);
        let dec = isotropy_split(alg2)?;
        let frame = build_quaternionic_frame(&dec);
        let nomizu = nomizu_degenerate_extension(&dec, &sub_nomizu, &sub_dec, dim_w_prime)?;
        Ok(GeometryData { dec, metric: None, frame, nomizu, koszul: None, degenerate: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{even_module, BlockLabel, Signature};
    use crate::epa::solve_equivariant;
    use crate::matrix::Inertia;

    fn instance(p: usize, q: usize, mult: usize) -> EpaStructure {
        let sig = Signature::new(p, q);
        let w1 = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        let pi1 = solve_equivariant(sig, &w1, Variant::Even).remove(0);
        let b1 = crate::epa::canonical_b(&w1, &pi1, 3);
        let pi1 = if b1.neg().inertia().unwrap().is_positive_definite() {
            pi1
        } else {
            pi1.scale(&rint(-1))
        };
        let w = even_module(sig, &[(BlockLabel::Sigma, mult)]).unwrap();
        let pi = pi1.block_diagonal(&vec![Rational::one(); mult]);
        build_epa(sig, w, pi, Variant::Even).unwrap()
    }

    #[test]
    fn isotropy_dimensions() {
        let dec = isotropy_split(instance(3, 0, 1)).unwrap();
        assert_eq!(dec.dim_m(), 8);
        let dec = isotropy_split(instance(3, 2, 1)).unwrap();
        assert_eq!(dec.dim_m(), 16);
    }

    #[test]
    fn metric_signature_riemannian() {
        let data = build_geometry(&instance(3, 0, 1)).unwrap();
        let g = data.metric.unwrap();
        assert_eq!(
            g.matrix.inertia().unwrap(),
            Inertia { n_plus: 8, n_minus: 0, n_zero: 0 }
        );
    }

    #[test]
    fn frame_is_valid() {
        let data = build_geometry(&instance(3, 0, 1)).unwrap();
        assert!(validate_frame(&data.dec, &data.frame, data.metric.as_ref()));
    }

    #[test]
    fn closed_form_equals_koszul() {
        let data = build_geometry(&instance(3, 0, 1)).unwrap();
        assert_eq!(data.nomizu, data.koszul.unwrap());
    }

    #[test]
    fn torsion_vanishes_and_metricity() {
        let data = build_geometry(&instance(3, 0, 1)).unwrap();
        assert!(tensor_is_zero(&torsion(&data.dec, &data.nomizu)));
        assert!(metricity_holds(&data.dec, &data.nomizu, data.metric.as_ref().unwrap()));
    }

    #[test]
    fn normalizer_and_einstein() {
        let data = build_geometry(&instance(3, 0, 1)).unwrap();
        let rep = check_normalizer(&data.dec, &data.nomizu, &data.frame);
        assert!(rep.all_in_span);
        for alpha in 1..=3usize {
            let m = data.dec.grid(alpha, 0);
            assert_eq!(rep.omega[alpha - 1][m], rat(1, 2), "omega_alpha(e_alpha) = 1/2");
        }
        let g = data.metric.as_ref().unwrap();
        let curv = curvature_and_einstein(&data.dec, &data.nomizu, g);
        let c = curv.einstein_c.clone().expect("Einstein constant exists");
        assert!(c < Rational::zero(), "negative scalar curvature, got {c}");
        assert!(q_annihilates_r(&data.dec, &curv, &data.frame));
    }

    #[test]
    fn corrupted_nomizu_fails_normalizer() {
        let data = build_geometry(&instance(3, 0, 1)).unwrap();
        let mut broken = data.nomizu.clone();
        // add e_0 ^_g e_1 to L_{e_0}
        let g = &data.metric.as_ref().unwrap().matrix;
        let extra = wedge_g(g, data.dec.dim_m(), data.dec.grid(0, 0), data.dec.grid(1, 0));
        let d = data.dec.alg.d_index();
        broken.l[d] = broken.l[d].add(&extra);
        let rep = check_normalizer(&data.dec, &broken, &data.frame);
        assert!(!rep.all_in_span);
    }

    #[test]
    fn degenerate_extension_torsion_free() {
        let sig = Signature::new(3, 0);
        let w1 = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        let pi1 = solve_equivariant(sig, &w1, Variant::Even).remove(0);
        let w = even_module(sig, &[(BlockLabel::Sigma, 2)]).unwrap();
        let pi = pi1.block_diagonal(&[Rational::one(), Rational::zero()]);
        let alg = build_epa(sig, w, pi, Variant::Even).unwrap();
        let data = build_geometry(&alg).unwrap();
        assert!(data.degenerate);
        assert!(tensor_is_zero(&torsion(&data.dec, &data.nomizu)));
        let rep = check_normalizer(&data.dec, &data.nomizu, &data.frame);
        assert!(rep.all_in_span);
    }

    #[test]
    fn fully_degenerate_pi_zero() {
        let sig = Signature::new(3, 0);
        let w = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        let pi = EquivariantMap::zero(Variant::Even, w.dim_w, sig.dim());
        let alg = build_epa(sig, w, pi, Variant::Even).unwrap();
        let data = build_geometry(&alg).unwrap();
        assert!(data.degenerate);
        assert!(tensor_is_zero(&torsion(&data.dec, &data.nomizu)));
        assert!(check_normalizer(&data.dec, &data.nomizu, &data.frame).all_in_span);
    }

    #[test]
    fn labels_for_small_instances() {
        let data = build_geometry(&instance(3, 0, 1)).unwrap();
        let b = data.dec.alg.canonical_b(3);
        let label = alekseevsky_labels(&data.dec, &b).unwrap();
        assert_eq!(label.dim_h, 2);
        assert_eq!(label.family, "quaternionic-hyperbolic");
    }
}
