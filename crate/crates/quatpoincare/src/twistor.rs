//! Algebraic twistor layer over the Gaussian rationals.
//!
//! The stabilizer of the base complex structure is
//! `g_{z0} = R e_2^e_3 + o(E')`, with invariant complement
//! `z = R e_1^e_2 + R e_1^e_3 + m` carrying the complex structure
//! `JJ(e_1^e_2) = e_1^e_3`, `JJ|m = J_1`. Horizontal lifts are
//! `x~ = x + 2 omega_2(x) e_1^e_3 - 2 omega_3(x) e_1^e_2`. The layer builds
//!
//! * `z^{0,1}` (the -i eigenspace) and `h = (g_{z0})^C + z^{0,1}`,
//! * the closure and invariant-distribution checks
//!   `[h,h] c h`, `[h,(z^hor)^{1,0}] c h + (z^hor)^{1,0}`,
//! * the Frobenius form `omega` on `(z^hor)^{1,0}` with values in the
//!   quotient line generated by the image of `e_2 - i e_3`, whose exact
//!   rank decides the complex contact property.

use crate::epa::{BasisLabel, EpaStructure};
use crate::homgeom::{IsotropyDecomposition, MLabel};
use crate::matrix::{Matrix, RowReducer};
use crate::scalar::{gauss, gauss_re, rint, GaussianRational, Rational, Scalar};
use num_traits::{One, Zero};

type CVec = Vec<GaussianRational>;

fn c_zero(dim: usize) -> CVec {
    vec![GaussianRational::zero(); dim]
}

fn unit(dim: usize, i: usize) -> CVec {
    let mut v = c_zero(dim);
    v[i] = GaussianRational::one();
    v
}

/// Bracket of complex coordinate vectors over the rational structure
/// constants.
fn bracket_c(alg: &EpaStructure, x: &CVec, y: &CVec) -> CVec {
    let mut out = c_zero(alg.dim());
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            for (k, c) in alg.bracket_basis(i, j) {
                out[*k] = out[*k].clone() + xi.clone() * yj.clone() * gauss_re(c.clone());
            }
        }
    }
    out
}

/// The assembled twistor data for one instance.
pub struct TwistorData {
    /// ordered basis of `(z^hor)^{1,0}`: the `m(V)` lifts first, then the
    /// W lifts.
    pub zhor10: Vec<CVec>,
    /// number of `m(V)`-type vectors at the head of `zhor10`.
    pub n_zv: usize,
    /// basis of `h` (stabilizer vectors first, then the canonical rows of
    /// `z^{0,1}`).
    pub h_basis: Vec<CVec>,
    pub h_span: RowReducer<GaussianRational>,
    pub z01: RowReducer<GaussianRational>,
    pub z10: RowReducer<GaussianRational>,
    /// span of `h + (z^hor)^{1,0}`.
    pub u_span: RowReducer<GaussianRational>,
    /// quotient-line generator: the coordinates of `e_2 - i e_3`.
    pub t_gen: CVec,
    w12: usize,
    w13: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum TwistorError {
    #[error("[h,h] escapes h at basis pair ({0}, {1})")]
    ClosureViolation(usize, usize),
    #[error("twistor layer requires p >= 3")]
    SignatureConstraint,
}

/// Builds `z`, the horizontal lifts, `z^{0,1}` and `h` from the isotropy
/// data and the connection 1-forms `omega_alpha`.
pub fn build_twistor(
    dec: &IsotropyDecomposition,
    omega: &[Vec<Rational>; 3],
) -> Result<TwistorData, TwistorError> {
    let alg = &dec.alg;
    let dim = alg.dim();
    let w12 = alg.wedge_index(1, 2);
    let w13 = alg.wedge_index(1, 3);
    let i_c = gauss(rint(0), rint(1));

    // JJ on z as an endomorphism of g coordinates (zero on g_{z0})
    let jz = |v: &CVec| -> CVec {
        let mut out = c_zero(dim);
        out[w13] = v[w12].clone();
        out[w12] = -v[w13].clone();
        let jw = dec.alg.weven.pair(2, 3);
        for (m_idx, &g_idx) in dec.m_to_g.iter().enumerate() {
            if v[g_idx].is_zero() {
                continue;
            }
            let coeff = v[g_idx].clone();
            match dec.m_labels[m_idx] {
                MLabel::Grid(0, i) => {
                    let t = dec.m_to_g[dec.grid(1, i)];
                    out[t] = out[t].clone() + coeff;
                }
                MLabel::Grid(1, i) => {
                    let t = dec.m_to_g[dec.grid(0, i)];
                    out[t] = out[t].clone() - coeff;
                }
                MLabel::Grid(2, i) => {
                    let t = dec.m_to_g[dec.grid(3, i)];
                    out[t] = out[t].clone() + coeff;
                }
                MLabel::Grid(3, i) => {
                    let t = dec.m_to_g[dec.grid(2, i)];
                    out[t] = out[t].clone() - coeff;
                }
                MLabel::Grid(..) => unreachable!(),
                MLabel::W(k) => {
                    for t in 0..dec.alg.dim_w() {
                        if !jw.at(t, k).is_zero() {
                            let g_t = dec.alg.w_index(t);
                            out[g_t] =
                                out[g_t].clone() + coeff.clone() * gauss_re(jw.at(t, k).clone());
                        }
                    }
                }
            }
        }
        out
    };

    // z^{0,1} = span{ v + i JJ v }, z^{1,0} = span{ v - i JJ v }
    let mut z01 = RowReducer::new(dim);
    let mut z10 = RowReducer::new(dim);
    let mut z_basis: Vec<CVec> = vec![unit(dim, w12), unit(dim, w13)];
    for &g_idx in &dec.m_to_g {
        z_basis.push(unit(dim, g_idx));
    }
    for v in &z_basis {
        let jv = jz(v);
        let plus: CVec = v
            .iter()
            .zip(jv.iter())
            .map(|(a, b)| a.clone() + i_c.clone() * b.clone())
            .collect();
        let minus: CVec = v
            .iter()
            .zip(jv.iter())
            .map(|(a, b)| a.clone() - i_c.clone() * b.clone())
            .collect();
        z01.insert(plus);
        z10.insert(minus);
    }
    assert_eq!(z01.rank(), (2 + dec.dim_m()) / 2, "dim z^{{0,1}}");

    // h = (g_{z0})^C + z^{0,1}
    let mut h_basis: Vec<CVec> = Vec::new();
    h_basis.push(unit(dim, alg.wedge_index(2, 3)));
    for (idx, label) in alg.labels.iter().enumerate() {
        if let BasisLabel::Wedge(i, j) = label {
            if *i > 3 && *j > 3 {
                h_basis.push(unit(dim, idx));
            }
        }
    }
    let stab_count = h_basis.len();
    for row in z01.canonical_rows() {
        h_basis.push(row.clone());
    }
    let mut h_span = RowReducer::new(dim);
    h_span.insert_all(h_basis.iter().cloned());
    assert_eq!(h_span.rank(), stab_count + z01.rank(), "h is a direct sum");

    // horizontal lifts: x~ = x + 2 omega_2(x) e1^e3 - 2 omega_3(x) e1^e2
    let lift = |m_idx: usize| -> CVec {
        let mut v = unit(dim, dec.m_to_g[m_idx]);
        let o2 = &omega[1][m_idx];
        let o3 = &omega[2][m_idx];
        v[w13] = v[w13].clone() + gauss_re(o2.clone() * rint(2));
        v[w12] = v[w12].clone() - gauss_re(o3.clone() * rint(2));
        v
    };
    // (z^hor)^{1,0} = { x~ - i (J_1 x)~ }: quaternion pairs (iota = 0, 2)
    // on the grid, a greedy half-basis on W
    let mut zhor10: Vec<CVec> = Vec::new();
    let mut span10 = RowReducer::new(dim);
    let lift10 = |m_idx: usize, j_m_coeffs: &[(usize, Rational)]| -> CVec {
        let mut out = lift(m_idx);
        for (j_idx, c) in j_m_coeffs {
            let lj = lift(*j_idx);
            for (o, l) in out.iter_mut().zip(lj.iter()) {
                *o -= i_c.clone() * gauss_re(c.clone()) * l.clone();
            }
        }
        out
    };
    for i in 0..dec.cols() {
        for iota in [0usize, 2] {
            let m_idx = dec.grid(iota, i);
            let j_target = dec.grid(iota + 1, i);
            let v = lift10(m_idx, &[(j_target, Rational::one())]);
            let grew = span10.insert(v.clone());
            assert!(grew);
            zhor10.push(v);
        }
    }
    let n_zv = zhor10.len();
    let jw = dec.alg.weven.pair(2, 3);
    for k in 0..dec.alg.dim_w() {
        let m_idx = dec.w_offset + k;
        let coeffs: Vec<(usize, Rational)> = (0..dec.alg.dim_w())
            .filter(|&t| !jw.at(t, k).is_zero())
            .map(|t| (dec.w_offset + t, jw.at(t, k).clone()))
            .collect();
        let v = lift10(m_idx, &coeffs);
        if span10.insert(v.clone()) {
            zhor10.push(v);
        }
    }
    assert_eq!(zhor10.len(), dec.dim_m() / 2, "dim (z^hor)^{{1,0}}");

    let mut u_span = h_span.clone();
    u_span.insert_all(zhor10.iter().cloned());
    assert_eq!(
        u_span.rank(),
        dim - 1,
        "h + (z^hor)^{{1,0}} has complex codimension one"
    );
    let mut t_gen = c_zero(dim);
    t_gen[alg.v_index(2)] = GaussianRational::one();
    t_gen[alg.v_index(3)] = -i_c.clone();
    assert!(!u_span.contains(&t_gen), "e_2 - i e_3 spans the quotient line");

    Ok(TwistorData { zhor10, n_zv, h_basis, h_span, z01, z10, u_span, t_gen, w12, w13 })
}

impl TwistorData {
    /// `[h, h] c h`, exact.
    pub fn check_h_closure(&self, alg: &EpaStructure) -> Result<(), TwistorError> {
        for (i, x) in self.h_basis.iter().enumerate() {
            for (j, y) in self.h_basis.iter().enumerate().skip(i + 1) {
                let br = bracket_c(alg, x, y);
                if !self.h_span.contains(&br) {
                    return Err(TwistorError::ClosureViolation(i, j));
                }
            }
        }
        Ok(())
    }

    /// The subalgebra generated by `z^{0,1}` equals `o(E')^C + z^{0,1}`.
    pub fn check_generated_subalgebra(&self, alg: &EpaStructure) -> bool {
        let dim = alg.dim();
        let mut gen = RowReducer::new(dim);
        gen.insert_all(self.z01.canonical_rows().iter().cloned());
        loop {
            let rows: Vec<CVec> = gen.canonical_rows().to_vec();
            let mut grew = false;
            for (i, x) in rows.iter().enumerate() {
                for y in rows.iter().skip(i) {
                    if gen.insert(bracket_c(alg, x, y)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut expect = RowReducer::new(dim);
        for (idx, label) in alg.labels.iter().enumerate() {
            if let BasisLabel::Wedge(i, j) = label {
                if *i > 3 && *j > 3 {
                    expect.insert(unit(dim, idx));
                }
            }
        }
        expect.insert_all(self.z01.canonical_rows().iter().cloned());
        gen.same_span(&expect)
    }

    /// `[h, (z^hor)^{1,0}] c h + (z^hor)^{1,0}`, exact.
    pub fn check_distribution_invariance(&self, alg: &EpaStructure) -> bool {
        for x in &self.h_basis {
            for y in &self.zhor10 {
                if !self.u_span.contains(&bracket_c(alg, x, y)) {
                    return false;
                }
            }
        }
        true
    }

    /// Conjugating `z^{0,1}` entrywise yields `z^{1,0}`.
    pub fn check_conjugation_symmetry(&self) -> bool {
        let mut conj = RowReducer::new(self.z10.cols());
        for row in self.z01.canonical_rows() {
            conj.insert(row.iter().map(Scalar::conj).collect());
        }
        conj.same_span(&self.z10)
    }

    /// Span checks used in the closure lemma:
    /// `[z^{0,1}(V), W^{0,1}] = W^{0,1}` and
    /// `[W^{0,1}, W^{0,1}] c C (e_2 + i e_3)`.
    pub fn check_w01_brackets(&self, dec: &IsotropyDecomposition) -> bool {
        let alg = &dec.alg;
        let dim = alg.dim();
        let i_c = gauss(rint(0), rint(1));
        let jw = alg.weven.pair(2, 3);
        // W^{0,1} = { s + i J_1 s }
        let mut w01: Vec<CVec> = Vec::new();
        let mut w01_span = RowReducer::new(dim);
        for k in 0..alg.dim_w() {
            let mut v = unit(dim, alg.w_index(k));
            for t in 0..alg.dim_w() {
                if !jw.at(t, k).is_zero() {
                    v[alg.w_index(t)] =
                        v[alg.w_index(t)].clone() + i_c.clone() * gauss_re(jw.at(t, k).clone());
                }
            }
            w01_span.insert(v.clone());
            w01.push(v);
        }
        // z^{0,1}(V): the vertical vector w12 + i w13 plus the grid part
        let mut zv01: Vec<CVec> = Vec::new();
        {
            let mut v = unit(dim, self.w12);
            v[self.w13] = i_c.clone();
            zv01.push(v);
        }
        for i in 0..dec.cols() {
            for iota in [0usize, 2] {
                let a = dec.m_to_g[dec.grid(iota, i)];
                let b = dec.m_to_g[dec.grid(iota + 1, i)];
                let mut v = unit(dim, a);
                v[b] = i_c.clone();
                zv01.push(v);
            }
        }
        // [z^{0,1}(V), W^{0,1}] spans W^{0,1}
        let mut span = RowReducer::new(dim);
        for x in &zv01 {
            for y in &w01 {
                span.insert(bracket_c(alg, x, y));
            }
        }
        if !span.same_span(&w01_span) {
            return false;
        }
        // [W^{0,1}, W^{0,1}] c C (e_2 + i e_3)
        let mut line = RowReducer::new(dim);
        let mut t = c_zero(dim);
        t[alg.v_index(2)] = GaussianRational::one();
        t[alg.v_index(3)] = i_c.clone();
        line.insert(t);
        for (i, x) in w01.iter().enumerate() {
            for y in w01.iter().skip(i) {
                let br = bracket_c(alg, x, y);
                if br.iter().any(|c| !c.is_zero()) && !line.contains(&br) {
                    return false;
                }
            }
        }
        true
    }

    /// Frobenius form on `(z^hor)^{1,0}` as a matrix of coefficients
    /// against the image of `e_2 - i e_3`.
    pub fn frobenius_form(&self, alg: &EpaStructure) -> FrobeniusForm {
        let n = self.zhor10.len();
        let rt = self.u_span.reduce(self.t_gen.clone());
        let lead = rt.iter().position(|c| !c.is_zero()).expect("t generates the quotient");
        let mut matrix = Matrix::<GaussianRational>::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let br = bracket_c(alg, &self.zhor10[i], &self.zhor10[j]);
                let r = self.u_span.reduce(br);
                let c = r[lead].clone() / rt[lead].clone();
                // consistency: r = c rt exactly (the quotient is a line)
                for (a, b) in r.iter().zip(rt.iter()) {
                    assert_eq!(a.clone(), c.clone() * b.clone(), "quotient is one-dimensional");
                }
                matrix.set(i, j, c.clone());
                matrix.set(j, i, -c);
            }
        }
        let rank = matrix.rank();
        FrobeniusForm { n_zv: self.n_zv, rank, contact: rank == n, matrix }
    }
}

#[derive(Clone, Debug)]
pub struct FrobeniusForm {
    pub matrix: Matrix<GaussianRational>,
    pub n_zv: usize,
    pub rank: usize,
    pub contact: bool,
}

impl FrobeniusForm {
    /// `omega((z(V)^hor)^{1,0}, W^{1,0}) = 0`.
    pub fn zv_w_block_vanishes(&self) -> bool {
        for i in 0..self.n_zv {
            for j in self.n_zv..self.matrix.cols() {
                if !self.matrix.at(i, j).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// `omega` restricted to the `z(V)` part is nondegenerate.
    pub fn zv_block_nondegenerate(&self) -> bool {
        let sub = Matrix::<GaussianRational>::from_fn(self.n_zv, self.n_zv, |r, c| {
            self.matrix.at(r, c).clone()
        });
        sub.rank() == self.n_zv
    }

    /// rank of the W-part block.
    pub fn w_block_rank(&self) -> usize {
        let n = self.matrix.cols() - self.n_zv;
        let sub = Matrix::<GaussianRational>::from_fn(n, n, |r, c| {
            self.matrix.at(self.n_zv + r, self.n_zv + c).clone()
        });
        sub.rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{even_module, BlockLabel, Signature};
    use crate::epa::{build_epa, canonical_b, solve_equivariant, Variant};
    use crate::homgeom::{build_geometry, check_normalizer};

    fn geometry(mult: usize, kill_last: bool) -> crate::homgeom::GeometryData {
        let sig = Signature::new(3, 0);
        let w1 = even_module(sig, &[(BlockLabel::Sigma, 1)]).unwrap();
        let pi1 = solve_equivariant(sig, &w1, Variant::Even).remove(0);
        let b1 = canonical_b(&w1, &pi1, 3);
        let pi1 = if b1.neg().inertia().unwrap().is_positive_definite() {
            pi1
        } else {
            pi1.scale(&rint(-1))
        };
        let w = even_module(sig, &[(BlockLabel::Sigma, mult)]).unwrap();
        let mut scales = vec![Rational::one(); mult];
        if kill_last {
            *scales.last_mut().unwrap() = Rational::zero();
        }
        let pi = pi1.block_diagonal(&scales);
        let alg = build_epa(sig, w, pi, Variant::Even).unwrap();
        build_geometry(&alg).unwrap()
    }

    fn twistor_of(data: &crate::homgeom::GeometryData) -> TwistorData {
        let rep = check_normalizer(&data.dec, &data.nomizu, &data.frame);
        assert!(rep.all_in_span);
        build_twistor(&data.dec, &rep.omega).unwrap()
    }

    #[test]
    fn closure_and_invariance_nondegenerate() {
        let data = geometry(1, false);
        let tw = twistor_of(&data);
        tw.check_h_closure(&data.dec.alg).unwrap();
        assert!(tw.check_distribution_invariance(&data.dec.alg));
        assert!(tw.check_generated_subalgebra(&data.dec.alg));
        assert!(tw.check_conjugation_symmetry());
        assert!(tw.check_w01_brackets(&data.dec));
    }

    #[test]
    fn contact_iff_nondegenerate() {
        let data = geometry(1, false);
        let tw = twistor_of(&data);
        let fr = tw.frobenius_form(&data.dec.alg);
        assert!(fr.contact);
        assert!(fr.zv_w_block_vanishes());
        assert!(fr.zv_block_nondegenerate());

        let data = geometry(2, true);
        let tw = twistor_of(&data);
        tw.check_h_closure(&data.dec.alg).unwrap();
        assert!(tw.check_distribution_invariance(&data.dec.alg));
        let fr = tw.frobenius_form(&data.dec.alg);
        assert!(!fr.contact);
        // rank deficit = half the real dimension of ker b
        assert_eq!(fr.rank, fr.matrix.cols() - 2);
        assert!(fr.zv_w_block_vanishes());
        assert!(fr.zv_block_nondegenerate());
        assert_eq!(fr.w_block_rank(), 2);
    }

    #[test]
    fn negative_control_dropped_h_vector() {
        let data = geometry(1, false);
        let tw = twistor_of(&data);
        // dropping one basis vector from h breaks the invariance check
        let kept: Vec<CVec> = tw.h_basis.iter().skip(1).cloned().collect();
        let mut u = RowReducer::new(tw.h_span.cols());
        u.insert_all(kept.iter().cloned());
        u.insert_all(tw.zhor10.iter().cloned());
        let mut ok = true;
        'outer: for x in &kept {
            for y in &tw.zhor10 {
                if !u.contains(&bracket_c(&data.dec.alg, x, y)) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        assert!(!ok, "corrupted h must fail the invariance check");
    }
}
