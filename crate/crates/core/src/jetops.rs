//! Jet-operator matrices for polynomial vector fields and gauge maps.
//!
//! A vector field acting on a truncated jet fiber is represented by a
//! matrix `T^m_n(xi)` indexed by multi-indices of order at most `p` with
//! values in the representation algebra; gauge maps give `J^m_n(X)`.
//! Both are built here by their grade recursions
//!
//! ```text
//! T^m_{n+v}(xi) = d_v xi^u d^m_{n+u} I + T^m_n(d_v xi) + T^{m-v}_n(xi)
//! T^m_0(xi)     = d^m_0 d_v xi^u T^v_u
//! J^m_{n+u}(X)  = J^m_n(d_u X) + J^{m-u}_n(X)
//! J^m_0(X)      = d^m_0 X_a J^a
//! ```
//!
//! with entries kept as exact polynomials in the expansion point, and
//! cross-validated three ways: against the explicit binomial closed form,
//! against a Taylor-expansion oracle acting on monomial test functions, and
//! through the composition identities for brackets of fields and maps.
//!
//! The summed supertrace lemmas evaluated by [`trace_lemmas`] are the
//! combinatorial ground truth behind the abelian-charge tables: each lemma
//! compares an explicit multi-index enumeration with a closed form in
//! binomial coefficients and representation invariants.

use crate::linalg::Mat;
use crate::multiindex::{enumerate, multi_binomial, MultiIndex};
use crate::poly::MPoly;
use crate::repkit::{block_matrices, rep_params_direct, Parity, RepError, RepParams, RepSpec};
use crate::scalar::{binomial, GaussRat, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Polynomial vector field: one exact-rational polynomial per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    pub n: usize,
    pub components: Vec<MPoly<Rat>>,
}

impl PolyVectorField {
    pub fn new(n: usize, components: Vec<MPoly<Rat>>) -> Self {
        assert_eq!(components.len(), n);
        assert!(components.iter().all(|c| c.nvars == n));
        PolyVectorField { n, components }
    }

    pub fn zero(n: usize) -> Self {
        PolyVectorField { n, components: vec![MPoly::zero(n); n] }
    }

    /// Lie bracket of vector fields:
    /// `[xi, eta]^nu = xi^mu d_mu eta^nu - eta^mu d_mu xi^nu`.
    pub fn bracket(&self, other: &PolyVectorField) -> PolyVectorField {
        assert_eq!(self.n, other.n);
        let mut components = Vec::new();
        for nu in 0..self.n {
            let mut acc = MPoly::zero(self.n);
            for mu in 0..self.n {
                acc = acc.add(&self.components[mu].mul(&other.components[nu].deriv(mu)));
                acc = acc.sub(&other.components[mu].mul(&self.components[nu].deriv(mu)));
            }
            components.push(acc);
        }
        PolyVectorField { n: self.n, components }
    }

    /// Componentwise partial derivative.
    pub fn deriv(&self, v: usize) -> PolyVectorField {
        PolyVectorField {
            n: self.n,
            components: self.components.iter().map(|c| c.deriv(v)).collect(),
        }
    }

    /// Divergence `d_mu xi^mu`.
    pub fn divergence(&self) -> MPoly<Rat> {
        let mut acc = MPoly::zero(self.n);
        for mu in 0..self.n {
            acc = acc.add(&self.components[mu].deriv(mu));
        }
        acc
    }

    pub fn max_degree(&self) -> u32 {
        self.components
            .iter()
            .map(|c| c.total_degree())
            .max()
            .unwrap_or(0)
    }
}

/// Polynomial gauge map: one coefficient polynomial per algebra generator.
/// Coefficients live in Q(i) because the map bracket carries a factor `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyGaugeMap {
    pub n: usize,
    pub components: Vec<MPoly<GaussRat>>,
}

impl PolyGaugeMap {
    pub fn new(n: usize, components: Vec<MPoly<GaussRat>>) -> Self {
        assert!(components.iter().all(|c| c.nvars == n));
        PolyGaugeMap { n, components }
    }

    pub fn from_rat(n: usize, components: Vec<MPoly<Rat>>) -> Self {
        PolyGaugeMap {
            n,
            components: components.iter().map(poly_to_gauss).collect(),
        }
    }

    pub fn zero(n: usize, gauge_dim: usize) -> Self {
        PolyGaugeMap { n, components: vec![MPoly::zero(n); gauge_dim] }
    }

    /// `[X, Y]_c = i f^ab_c X_a Y_b`.
    pub fn bracket(&self, other: &PolyGaugeMap, f: &[Vec<Vec<Rat>>]) -> PolyGaugeMap {
        let d = self.components.len();
        let mut components = vec![MPoly::zero(self.n); d];
        for a in 0..d {
            for b in 0..d {
                let prod = self.components[a].mul(&other.components[b]);
                if prod.is_zero() {
                    continue;
                }
                for c in 0..d {
                    if f[a][b][c].is_zero() {
                        continue;
                    }
                    let coeff = GaussRat::new(Rat::zero(), f[a][b][c].clone());
                    components[c] = components[c].add(&prod.scale(&coeff));
                }
            }
        }
        PolyGaugeMap { n: self.n, components }
    }

    /// Directional derivative `xi^mu d_mu X`.
    pub fn directional(&self, xi: &PolyVectorField) -> PolyGaugeMap {
        let mut components = vec![MPoly::zero(self.n); self.components.len()];
        for (a, xa) in self.components.iter().enumerate() {
            for mu in 0..self.n {
                components[a] =
                    components[a].add(&xa.deriv(mu).mul(&poly_to_gauss(&xi.components[mu])));
            }
        }
        PolyGaugeMap { n: self.n, components }
    }

    pub fn deriv(&self, v: usize) -> PolyGaugeMap {
        PolyGaugeMap {
            n: self.n,
            components: self.components.iter().map(|c| c.deriv(v)).collect(),
        }
    }
}

pub fn poly_to_gauss(p: &MPoly<Rat>) -> MPoly<GaussRat> {
    let mut out = MPoly::zero(p.nvars);
    for (e, c) in &p.terms {
        out.terms.insert(e.clone(), GaussRat::from_rat(c.clone()));
    }
    out
}

/// Matrix with polynomial entries over the expansion point.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMat {
    pub rows: usize,
    pub cols: usize,
    pub nvars: usize,
    pub data: Vec<MPoly<GaussRat>>,
}

impl PolyMat {
    pub fn zeros(rows: usize, cols: usize, nvars: usize) -> Self {
        PolyMat { rows, cols, nvars, data: vec![MPoly::zero(nvars); rows * cols] }
    }

    pub fn identity_scaled(dim: usize, p: MPoly<GaussRat>) -> Self {
        let nvars = p.nvars;
        let mut m = PolyMat::zeros(dim, dim, nvars);
        for i in 0..dim {
            m.data[i * dim + i] = p.clone();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &MPoly<GaussRat> {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut MPoly<GaussRat> {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, rhs: &PolyMat) -> PolyMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        PolyMat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &PolyMat) -> PolyMat {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> PolyMat {
        PolyMat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().map(|p| p.neg()).collect(),
        }
    }

    pub fn mul(&self, rhs: &PolyMat) -> PolyMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = PolyMat::zeros(self.rows, rhs.cols, self.nvars);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(i, j).add(&a.mul(b));
                    *out.at_mut(i, j) = v;
                }
            }
        }
        out
    }

    pub fn scale_poly(&self, p: &MPoly<GaussRat>) -> PolyMat {
        PolyMat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().map(|e| e.mul(p)).collect(),
        }
    }

    pub fn deriv(&self, v: usize) -> PolyMat {
        PolyMat {
            rows: self.rows,
            cols: self.cols,
            nvars: self.nvars,
            data: self.data.iter().map(|e| e.deriv(v)).collect(),
        }
    }

    pub fn trace(&self) -> MPoly<GaussRat> {
        assert_eq!(self.rows, self.cols);
        let mut acc = MPoly::zero(self.nvars);
        for i in 0..self.rows {
            acc = acc.add(self.at(i, i));
        }
        acc
    }

    pub fn from_scalar_mat(m: &Mat<GaussRat>, nvars: usize) -> Self {
        PolyMat {
            rows: m.rows,
            cols: m.cols,
            nvars,
            data: m
                .data
                .iter()
                .map(|c| MPoly::constant(nvars, c.clone()))
                .collect(),
        }
    }

    /// Evaluate every entry at a rational point.
    pub fn eval(&self, point: &[GaussRat]) -> Mat<GaussRat> {
        let mut out = Mat::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(i, j) = self.at(i, j).eval(point);
            }
        }
        out
    }
}

/// One species block of a jet-operator matrix: a `(jets x jets)` grid of
/// `vdim x vdim` polynomial matrices. Entries vanish whenever the row
/// multi-index has higher order than the column one.
pub struct BlockJetMatrix {
    pub vdim: usize,
    pub parity: Parity,
    pub copies: u32,
    /// entries[row_jet][col_jet]
    pub entries: Vec<Vec<PolyMat>>,
}

/// Jet-operator matrix over the truncated fiber of a representation.
pub struct JetMatrix {
    pub n: usize,
    pub p: u32,
    pub jets: Vec<MultiIndex>,
    pub blocks: Vec<BlockJetMatrix>,
}

impl JetMatrix {
    pub fn jet_index(&self, m: &MultiIndex) -> Option<usize> {
        self.jets.iter().position(|j| j == m)
    }

    /// Sum of block supertraces of the `(m, m)` diagonal entries over all
    /// jets: `sum_m str(A^m_m)`.
    pub fn str_diagonal_sum(&self) -> MPoly<GaussRat> {
        let mut acc = MPoly::zero(self.n);
        for block in &self.blocks {
            let copies = GaussRat::from_int(block.copies as i64);
            let sign = match block.parity {
                Parity::Bosonic => GaussRat::one(),
                Parity::Fermionic => GaussRat::from_int(-1),
            };
            for m in 0..self.jets.len() {
                acc = acc.add(
                    &block.entries[m][m]
                        .trace()
                        .scale(&sign)
                        .scale(&copies),
                );
            }
        }
        acc
    }

    /// `sum_{m,n} str(A^m_n B^n_m)` over all jets and blocks.
    pub fn str_product_sum(&self, other: &JetMatrix) -> MPoly<GaussRat> {
        assert_eq!(self.jets.len(), other.jets.len());
        let mut acc = MPoly::zero(self.n);
        for (ba, bb) in self.blocks.iter().zip(&other.blocks) {
            let copies = GaussRat::from_int(ba.copies as i64);
            let sign = match ba.parity {
                Parity::Bosonic => GaussRat::one(),
                Parity::Fermionic => GaussRat::from_int(-1),
            };
            for m in 0..self.jets.len() {
                for n in 0..self.jets.len() {
                    // order triangularity: skip guaranteed-zero products
                    if self.jets[m].order() > self.jets[n].order()
                        || other.jets[n].order() > other.jets[m].order()
                    {
                        continue;
                    }
                    let prod = ba.entries[m][n].mul(&bb.entries[n][m]);
                    acc = acc.add(&prod.trace().scale(&sign).scale(&copies));
                }
            }
        }
        acc
    }
}

/// Memoized per-block recursion state for `T`-matrices: tables keyed by the
/// derivative multi-index applied to the field argument.
struct TRecursion<'a> {
    n: usize,
    p: u32,
    jets: Vec<MultiIndex>,
    /// gl+gauge generator matrices of the block, constants lifted to polys
    t_gen: Vec<Vec<PolyMat>>,
    vdim: usize,
    xi: &'a PolyVectorField,
    /// (deriv multi-index, m, n) -> matrix
    memo: BTreeMap<(MultiIndex, usize, usize), PolyMat>,
}

impl<'a> TRecursion<'a> {
    fn field_component(&self, a: &MultiIndex, mu: usize) -> MPoly<GaussRat> {
        poly_to_gauss(&self.xi.components[mu].deriv_multi(a))
    }

    fn get(&mut self, a: &MultiIndex, mi: usize, ni: usize) -> PolyMat {
        if let Some(hit) = self.memo.get(&(a.clone(), mi, ni)) {
            return hit.clone();
        }
        let m = self.jets[mi].clone();
        let n = self.jets[ni].clone();
        let result = if m.order() > n.order() {
            PolyMat::zeros(self.vdim, self.vdim, self.n)
        } else if n.is_zero() {
            // seed: T^m_0 = d^m_0 d_v xi^u T^v_u
            let mut acc = PolyMat::zeros(self.vdim, self.vdim, self.n);
            if m.is_zero() {
                for nu in 0..self.n {
                    for mu in 0..self.n {
                        let c = self.field_component(&a.bump(nu), mu);
                        if !c.is_zero() {
                            acc = acc.add(&self.t_gen[nu][mu].scale_poly(&c));
                        }
                    }
                }
            }
            acc
        } else {
            // peel the first nonzero direction: n = n' + unit(v)
            let v = n.0.iter().position(|&c| c > 0).unwrap();
            let n_low = n.lower(v).unwrap();
            let nli = self.jet_pos(&n_low);
            let mut acc = PolyMat::zeros(self.vdim, self.vdim, self.n);
            // identity term d_v xi^u d^m_{n'+u}
            for mu in 0..self.n {
                if n_low.bump(mu) == m {
                    let c = self.field_component(&a.bump(v), mu);
                    if !c.is_zero() {
                        acc = acc.add(&PolyMat::identity_scaled(self.vdim, c));
                    }
                }
            }
            // T^m_{n'}(d_v xi)
            acc = acc.add(&self.get(&a.bump(v), mi, nli).clone());
            // T^{m - unit(v)}_{n'}(xi)
            if let Some(m_low) = m.lower(v) {
                let mli = self.jet_pos(&m_low);
                acc = acc.add(&self.get(a, mli, nli).clone());
            }
            acc
        };
        self.memo.insert((a.clone(), mi, ni), result.clone());
        result
    }

    fn jet_pos(&self, m: &MultiIndex) -> usize {
        self.jets.iter().position(|j| j == m).expect("jet in range")
    }
}

/// Build the `T`-matrix of a polynomial vector field by the grade
/// recursion, applied through the representation matrices of every block.
pub fn build_t(xi: &PolyVectorField, p: u32, rep: &RepSpec) -> Result<JetMatrix, RepError> {
    let n = rep.n;
    assert_eq!(xi.n, n);
    let jets = enumerate(n, p);
    let mut blocks = Vec::new();
    for block in &rep.blocks {
        let mats = block_matrices(rep, block)?;
        let t_gen: Vec<Vec<PolyMat>> = (0..n)
            .map(|mu| {
                (0..n)
                    .map(|nu| PolyMat::from_scalar_mat(&mats.t[mu][nu], n))
                    .collect()
            })
            .collect();
        let mut rec = TRecursion {
            n,
            p,
            jets: jets.clone(),
            t_gen,
            vdim: mats.dim,
            xi,
            memo: BTreeMap::new(),
        };
        let _ = rec.p;
        let mut entries = Vec::new();
        for mi in 0..jets.len() {
            let mut row = Vec::new();
            for ni in 0..jets.len() {
                row.push(rec.get(&MultiIndex::zero(n), mi, ni));
            }
            entries.push(row);
        }
        blocks.push(BlockJetMatrix {
            vdim: mats.dim,
            parity: block.parity,
            copies: block.copies,
            entries,
        });
    }
    Ok(JetMatrix { n, p, jets, blocks })
}

/// Build the `J`-matrix of a polynomial gauge map by its grade recursion.
pub fn build_j(x: &PolyGaugeMap, p: u32, rep: &RepSpec) -> Result<JetMatrix, RepError> {
    let n = rep.n;
    assert_eq!(x.n, n);
    let jets = enumerate(n, p);
    let mut blocks = Vec::new();
    for block in &rep.blocks {
        let mats = block_matrices(rep, block)?;
        let j_gen: Vec<PolyMat> = mats
            .j
            .iter()
            .map(|m| PolyMat::from_scalar_mat(m, n))
            .collect();
        let vdim = mats.dim;
        // memo over (deriv index, m, n)
        let mut memo: BTreeMap<(MultiIndex, usize, usize), PolyMat> = BTreeMap::new();
        let jet_pos =
            |jets: &Vec<MultiIndex>, m: &MultiIndex| jets.iter().position(|j| j == m).unwrap();
        // recursive closure via explicit stack-free evaluation in grade order
        fn get(
            memo: &mut BTreeMap<(MultiIndex, usize, usize), PolyMat>,
            jets: &Vec<MultiIndex>,
            j_gen: &Vec<PolyMat>,
            x: &PolyGaugeMap,
            n: usize,
            vdim: usize,
            a: &MultiIndex,
            mi: usize,
            ni: usize,
        ) -> PolyMat {
            if let Some(hit) = memo.get(&(a.clone(), mi, ni)) {
                return hit.clone();
            }
            let m = jets[mi].clone();
            let nn = jets[ni].clone();
            let result = if m.order() > nn.order() {
                PolyMat::zeros(vdim, vdim, n)
            } else if nn.is_zero() {
                let mut acc = PolyMat::zeros(vdim, vdim, n);
                if m.is_zero() {
                    for (ga, gen) in j_gen.iter().enumerate() {
                        let c = x.components[ga].deriv_multi(a);
                        if !c.is_zero() {
                            acc = acc.add(&gen.scale_poly(&c));
                        }
                    }
                }
                acc
            } else {
                let v = nn.0.iter().position(|&c| c > 0).unwrap();
                let n_low = nn.lower(v).unwrap();
                let nli = jets.iter().position(|j| *j == n_low).unwrap();
                let mut acc = get(memo, jets, j_gen, x, n, vdim, &a.bump(v), mi, nli);
                if let Some(m_low) = m.lower(v) {
                    let mli = jets.iter().position(|j| *j == m_low).unwrap();
                    acc = acc.add(&get(memo, jets, j_gen, x, n, vdim, a, mli, nli));
                }
                acc
            };
            memo.insert((a.clone(), mi, ni), result.clone());
            result
        }
        let _ = jet_pos;
        let mut entries = Vec::new();
        for mi in 0..jets.len() {
            let mut row = Vec::new();
            for ni in 0..jets.len() {
                row.push(get(
                    &mut memo,
                    &jets,
                    &j_gen,
                    x,
                    n,
                    vdim,
                    &MultiIndex::zero(n),
                    mi,
                    ni,
                ));
            }
            entries.push(row);
        }
        blocks.push(BlockJetMatrix {
            vdim,
            parity: block.parity,
            copies: block.copies,
            entries,
        });
    }
    Ok(JetMatrix { n, p, jets, blocks })
}

/// Closed-form `T`-matrix: binomial coefficients times derivatives of the
/// field, generator part plus identity part. Used to cross-check the
/// recursion.
pub fn closed_t(xi: &PolyVectorField, p: u32, rep: &RepSpec) -> Result<JetMatrix, RepError> {
    let n = rep.n;
    let jets = enumerate(n, p);
    let mut blocks = Vec::new();
    for block in &rep.blocks {
        let mats = block_matrices(rep, block)?;
        let vdim = mats.dim;
        let mut entries = Vec::new();
        for m in &jets {
            let mut row = Vec::new();
            for nn in &jets {
                let mut acc = PolyMat::zeros(vdim, vdim, n);
                if m.order() <= nn.order() {
                    // generator part: C(n, m) d_{n-m+v} xi^u T^v_u
                    let coeff = multi_binomial(nn, m);
                    if !coeff.is_zero() {
                        let c = GaussRat::from_rat(Rat::from_integer(coeff));
                        let base = nn.checked_sub(m).unwrap();
                        for nu in 0..n {
                            for mu in 0..n {
                                let d = poly_to_gauss(
                                    &xi.components[mu].deriv_multi(&base.bump(nu)),
                                );
                                if d.is_zero() {
                                    continue;
                                }
                                acc = acc.add(
                                    &PolyMat::from_scalar_mat(&mats.t[nu][mu], n)
                                        .scale_poly(&d.scale(&c)),
                                );
                            }
                        }
                    }
                    // identity part: C(n, m-u)(1 - d^{m-u}_n) d_{n-m+u} xi^u
                    for mu in 0..n {
                        let Some(m_low) = m.lower(mu) else { continue };
                        if m_low == *nn {
                            continue;
                        }
                        let coeff = multi_binomial(nn, &m_low);
                        if coeff.is_zero() {
                            continue;
                        }
                        let base = nn.checked_sub(&m_low).unwrap();
                        let d = poly_to_gauss(&xi.components[mu].deriv_multi(&base));
                        if d.is_zero() {
                            continue;
                        }
                        let c = GaussRat::from_rat(Rat::from_integer(coeff));
                        acc = acc.add(&PolyMat::identity_scaled(vdim, d.scale(&c)));
                    }
                }
                row.push(acc);
            }
            entries.push(row);
        }
        blocks.push(BlockJetMatrix {
            vdim,
            parity: block.parity,
            copies: block.copies,
            entries,
        });
    }
    Ok(JetMatrix { n, p, jets, blocks })
}

/// Closed-form `J`-matrix: `C(n, m) d_{n-m} X_a J^a`.
pub fn closed_j(x: &PolyGaugeMap, p: u32, rep: &RepSpec) -> Result<JetMatrix, RepError> {
    let n = rep.n;
    let jets = enumerate(n, p);
    let mut blocks = Vec::new();
    for block in &rep.blocks {
        let mats = block_matrices(rep, block)?;
        let vdim = mats.dim;
        let mut entries = Vec::new();
        for m in &jets {
            let mut row = Vec::new();
            for nn in &jets {
                let mut acc = PolyMat::zeros(vdim, vdim, n);
                if m.order() <= nn.order() {
                    let coeff = multi_binomial(nn, m);
                    if !coeff.is_zero() {
                        let c = GaussRat::from_rat(Rat::from_integer(coeff));
                        let base = nn.checked_sub(m).unwrap();
                        for (ga, gen) in mats.j.iter().enumerate() {
                            let d = x.components[ga].deriv_multi(&base);
                            if d.is_zero() {
                                continue;
                            }
                            acc = acc.add(
                                &PolyMat::from_scalar_mat(gen, n).scale_poly(&d.scale(&c)),
                            );
                        }
                    }
                }
                row.push(acc);
            }
            entries.push(row);
        }
        blocks.push(BlockJetMatrix {
            vdim,
            parity: block.parity,
            copies: block.copies,
            entries,
        });
    }
    Ok(JetMatrix { n, p, jets, blocks })
}

fn jet_matrices_equal(a: &JetMatrix, b: &JetMatrix) -> bool {
    a.jets == b.jets
        && a.blocks.len() == b.blocks.len()
        && a.blocks.iter().zip(&b.blocks).all(|(ba, bb)| {
            ba.entries
                .iter()
                .zip(&bb.entries)
                .all(|(ra, rb)| ra.iter().zip(rb).all(|(ea, eb)| ea == eb))
        })
}

/// The three composition identities at truncation `p`, as exact matrix
/// identities entry by entry:
///
/// * `T([xi, eta])` against the quadratic `T T` expansion,
/// * `J([X, Y])` against the quadratic `J J` expansion,
/// * `J(xi . dX)` against the mixed `T J` expansion.
pub fn verify_composition(
    xi: &PolyVectorField,
    eta: &PolyVectorField,
    x: &PolyGaugeMap,
    y: &PolyGaugeMap,
    p: u32,
    rep: &RepSpec,
) -> Result<bool, RepError> {
    let n = rep.n;
    let jets = enumerate(n, p);
    let t_xi = build_t(xi, p, rep)?;
    let t_eta = build_t(eta, p, rep)?;
    let t_bracket = build_t(&xi.bracket(eta), p, rep)?;
    // first-derivative T matrices for the inhomogeneous terms
    let t_deta: Vec<JetMatrix> = (0..n)
        .map(|mu| build_t(&eta.deriv(mu), p, rep))
        .collect::<Result<_, _>>()?;
    let t_dxi: Vec<JetMatrix> = (0..n)
        .map(|mu| build_t(&xi.deriv(mu), p, rep))
        .collect::<Result<_, _>>()?;

    let xi_polys: Vec<MPoly<GaussRat>> = xi.components.iter().map(poly_to_gauss).collect();
    let eta_polys: Vec<MPoly<GaussRat>> = eta.components.iter().map(poly_to_gauss).collect();

    for (bi, _) in rep.blocks.iter().enumerate() {
        let vdim = t_xi.blocks[bi].vdim;
        for (mi, m) in jets.iter().enumerate() {
            for (ni, nn) in jets.iter().enumerate() {
                let mut rhs = PolyMat::zeros(vdim, vdim, n);
                for mu in 0..n {
                    rhs = rhs.add(
                        &t_deta[mu].blocks[bi].entries[mi][ni].scale_poly(&xi_polys[mu]),
                    );
                    rhs = rhs.sub(
                        &t_dxi[mu].blocks[bi].entries[mi][ni].scale_poly(&eta_polys[mu]),
                    );
                }
                for (ri, r) in jets.iter().enumerate() {
                    if r.order() < m.order() || r.order() > nn.order() {
                        continue;
                    }
                    rhs = rhs.add(
                        &t_xi.blocks[bi].entries[ri][ni]
                            .mul(&t_eta.blocks[bi].entries[mi][ri]),
                    );
                    rhs = rhs.sub(
                        &t_eta.blocks[bi].entries[ri][ni]
                            .mul(&t_xi.blocks[bi].entries[mi][ri]),
                    );
                }
                if t_bracket.blocks[bi].entries[mi][ni] != rhs {
                    return Ok(false);
                }
            }
        }
    }

    if !rep.algebra.is_trivial() && rep.algebra.has_structure_tensor() {
        let j_x = build_j(x, p, rep)?;
        let j_y = build_j(y, p, rep)?;
        let j_bracket = build_j(&x.bracket(y, &rep.algebra.f), p, rep)?;
        for (bi, _) in rep.blocks.iter().enumerate() {
            let vdim = j_x.blocks[bi].vdim;
            for (mi, m) in jets.iter().enumerate() {
                for (ni, nn) in jets.iter().enumerate() {
                    let mut rhs = PolyMat::zeros(vdim, vdim, n);
                    for (ri, r) in jets.iter().enumerate() {
                        if r.order() < m.order() || r.order() > nn.order() {
                            continue;
                        }
                        rhs = rhs.add(
                            &j_x.blocks[bi].entries[ri][ni]
                                .mul(&j_y.blocks[bi].entries[mi][ri]),
                        );
                        rhs = rhs.sub(
                            &j_y.blocks[bi].entries[ri][ni]
                                .mul(&j_x.blocks[bi].entries[mi][ri]),
                        );
                    }
                    if j_bracket.blocks[bi].entries[mi][ni] != rhs {
                        return Ok(false);
                    }
                }
            }
        }
        // mixed identity: J(xi . dX) = xi^mu J(d_mu X) + sum T(xi) J(X) - J(X) T(xi)
        let j_dir = build_j(&x.directional(xi), p, rep)?;
        let j_dx: Vec<JetMatrix> = (0..n)
            .map(|mu| build_j(&x.deriv(mu), p, rep))
            .collect::<Result<_, _>>()?;
        for (bi, _) in rep.blocks.iter().enumerate() {
            let vdim = j_x.blocks[bi].vdim;
            for (mi, m) in jets.iter().enumerate() {
                for (ni, nn) in jets.iter().enumerate() {
                    let mut rhs = PolyMat::zeros(vdim, vdim, n);
                    for mu in 0..n {
                        rhs = rhs.add(
                            &j_dx[mu].blocks[bi].entries[mi][ni].scale_poly(&xi_polys[mu]),
                        );
                    }
                    for (ri, r) in jets.iter().enumerate() {
                        if r.order() < m.order() || r.order() > nn.order() {
                            continue;
                        }
                        rhs = rhs.add(
                            &t_xi.blocks[bi].entries[ri][ni]
                                .mul(&j_x.blocks[bi].entries[mi][ri]),
                        );
                        rhs = rhs.sub(
                            &j_x.blocks[bi].entries[ri][ni]
                                .mul(&t_xi.blocks[bi].entries[mi][ri]),
                        );
                    }
                    if j_dir.blocks[bi].entries[mi][ni] != rhs {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Both sides of one summed supertrace identity.
pub struct TraceLemma {
    pub name: &'static str,
    pub enumerated: MPoly<GaussRat>,
    pub closed: MPoly<GaussRat>,
}

impl TraceLemma {
    pub fn holds(&self) -> bool {
        self.enumerated == self.closed
    }
}

/// Report from [`trace_lemmas`]: all six identities with both sides.
pub struct TraceReport {
    pub lemmas: Vec<TraceLemma>,
}

impl TraceReport {
    pub fn all_hold(&self) -> bool {
        self.lemmas.iter().all(|l| l.holds())
    }
}

fn const_poly(n: usize, r: Rat) -> MPoly<GaussRat> {
    MPoly::constant(n, GaussRat::from_rat(r))
}

/// Evaluate the six summed supertrace identities by explicit enumeration
/// over the truncated jet fiber and compare with their closed forms in
/// binomial coefficients and the representation invariants:
///
/// ```text
/// sum_m str(I)              = C(N+p, p) sd
/// sum_m str(T^m_m)          = div xi [C(N+p,p) k0 + C(N+p,p-1) sd]
/// sum_{m,n} str(T^m_n T^n_m) = P1 [C k1 + (C' + C'') sd]
///                            + P2 [C k2 + C'' sd + 2 C' k0]
/// sum_m str(J^m_m)          = X.delta z C
/// sum_{m,n} str(J^m_n J^n_m) = y C sum_ab X_a Y_b d^ab
/// sum_{m,n} str(T^m_n J^n_m) = div xi X.delta [C kz + C' z]
/// ```
///
/// with `P1 = d_nu xi^mu d_mu eta^nu`, `P2 = div xi div eta`, `C`, `C'`,
/// `C''` the binomials with lower argument `p`, `p-1`, `p-2`. The signs of
/// the subleading binomial terms follow from the grade-by-grade evaluation
/// of the diagonal identity parts (the sum over jets of `m_u d_u xi^u`
/// telescopes to `C(N+p, p-1)` per coordinate).
pub fn trace_lemmas(
    xi: &PolyVectorField,
    eta: &PolyVectorField,
    x: &PolyGaugeMap,
    y_map: &PolyGaugeMap,
    p: u32,
    rep: &RepSpec,
) -> Result<TraceReport, RepError> {
    let n = rep.n;
    let params = rep_params_direct(rep)?;
    let RepParams { sd, k0, k1, k2, y, z, kz } = params;
    let c = Rat::from_integer(binomial((n as i64) + p as i64, p as i64));
    let c1 = Rat::from_integer(binomial((n as i64) + p as i64, p as i64 - 1));
    let c2 = Rat::from_integer(binomial((n as i64) + p as i64, p as i64 - 2));

    let t_xi = build_t(xi, p, rep)?;
    let t_eta = build_t(eta, p, rep)?;

    let div_xi = poly_to_gauss(&xi.divergence());
    let div_eta = poly_to_gauss(&eta.divergence());
    let mut p1 = MPoly::zero(n);
    for mu in 0..n {
        for nu in 0..n {
            p1 = p1.add(&poly_to_gauss(&xi.components[mu].deriv(nu)).mul(&poly_to_gauss(
                &eta.components[nu].deriv(mu),
            )));
        }
    }
    let p2 = div_xi.mul(&div_eta);

    let mut lemmas = Vec::new();

    // 1: identity trace
    let jets_count = enumerate(n, p).len();
    let mut sd_total = MPoly::zero(n);
    sd_total = sd_total.add(&const_poly(n, Rat::from_integer((jets_count as i64).into()) * &sd));
    lemmas.push(TraceLemma {
        name: "str-identity",
        enumerated: {
            // enumerated: jets x signed block dimensions
            let mut acc = Rat::zero();
            for block in &rep.blocks {
                acc += block.parity.sign()
                    * Rat::from_integer((block.dim(n) as i64).into())
                    * Rat::from_integer((jets_count as i64).into());
            }
            const_poly(n, acc)
        },
        closed: sd_total,
    });

    // 2: single T trace
    lemmas.push(TraceLemma {
        name: "str-T",
        enumerated: t_xi.str_diagonal_sum(),
        closed: div_xi.scale(&GaussRat::from_rat(&c * &k0 + &c1 * &sd)),
    });

    // 3: double T trace
    lemmas.push(TraceLemma {
        name: "str-TT",
        enumerated: t_xi.str_product_sum(&t_eta),
        closed: p1
            .scale(&GaussRat::from_rat(&c * &k1 + (&c1 + &c2) * &sd))
            .add(&p2.scale(&GaussRat::from_rat(
                &c * &k2 + &c2 * &sd + Rat::from_integer(2.into()) * &c1 * &k0,
            ))),
    });

    // gauge lemmas
    let x_delta = {
        let mut acc = MPoly::zero(n);
        for (a, xa) in x.components.iter().enumerate() {
            if a < rep.algebra.delta.len() && !rep.algebra.delta[a].is_zero() {
                acc = acc.add(&xa.scale(&GaussRat::from_rat(rep.algebra.delta[a].clone())));
            }
        }
        acc
    };
    let xy_pair = {
        let mut acc = MPoly::zero(n);
        for (xa, ya) in x.components.iter().zip(&y_map.components) {
            acc = acc.add(&xa.mul(ya));
        }
        acc
    };

    let (j_x, j_y) = if rep.algebra.is_trivial() {
        (None, None)
    } else {
        (Some(build_j(x, p, rep)?), Some(build_j(y_map, p, rep)?))
    };

    // 4: single J trace
    lemmas.push(TraceLemma {
        name: "str-J",
        enumerated: j_x
            .as_ref()
            .map(|j| j.str_diagonal_sum())
            .unwrap_or_else(|| MPoly::zero(n)),
        closed: x_delta.scale(&GaussRat::from_rat(&z * &c)),
    });

    // 5: double J trace
    lemmas.push(TraceLemma {
        name: "str-JJ",
        enumerated: match (&j_x, &j_y) {
            (Some(a), Some(b)) => a.str_product_sum(b),
            _ => MPoly::zero(n),
        },
        closed: xy_pair.scale(&GaussRat::from_rat(&y * &c)),
    });

    // 6: mixed trace
    lemmas.push(TraceLemma {
        name: "str-TJ",
        enumerated: match &j_x {
            Some(j) => t_xi.str_product_sum(j),
            None => MPoly::zero(n),
        },
        closed: div_xi
            .mul(&x_delta)
            .scale(&GaussRat::from_rat(&c * &kz + &c1 * &z)),
    });

    Ok(TraceReport { lemmas })
}

/// Taylor-expansion oracle: check the jet transformation law on an explicit
/// monomial test function against the matrix action of `T^m_n(xi)`.
///
/// For a monomial section with components `phi_gamma(x) = x^a` on one basis
/// slot, the transformation at a symbolic expansion point must satisfy, jet
/// by jet,
///
/// ```text
/// d^n(-xi.dphi - dxi rho(T) phi)(x0) + xi^v(x0) phi_{n+v}(x0)
///   = - sum_m rho(T^m_n(xi(x0))) phi_m(x0)
/// ```
///
/// as an exact polynomial identity in `x0`. The left side uses nothing but
/// calculus on the test function; the right side is the recursion-built
/// matrix.
pub fn taylor_oracle_t(
    xi: &PolyVectorField,
    p: u32,
    rep: &RepSpec,
    max_test_degree: u32,
) -> Result<bool, RepError> {
    let n = rep.n;
    let t = build_t(xi, p, rep)?;
    let jets = enumerate(n, p);
    for (bi, block) in rep.blocks.iter().enumerate() {
        let mats = block_matrices(rep, block)?;
        let vdim = mats.dim;
        // test monomials up to the requested degree, one basis slot at a time
        for a in enumerate(n, max_test_degree) {
            for gamma in 0..vdim {
                // phi_beta(x) = delta_{beta,gamma} x^a
                let xa = MPoly::<Rat>::monomial(
                    n,
                    a.0.iter().map(|&c| c).collect(),
                    Rat::one(),
                );
                // delta phi_beta = -xi^mu d_mu phi_beta - d_nu xi^mu rho^g_b(T^nu_mu) phi_g
                let mut delta_phi: Vec<MPoly<GaussRat>> =
                    vec![MPoly::zero(n); vdim];
                for beta in 0..vdim {
                    let mut acc = MPoly::zero(n);
                    if beta == gamma {
                        for mu in 0..n {
                            acc = acc.sub(
                                &poly_to_gauss(&xi.components[mu]).mul(&poly_to_gauss(
                                    &xa.deriv(mu),
                                )),
                            );
                        }
                    }
                    for nu in 0..n {
                        for mu in 0..n {
                            let r = mats.t[nu][mu].at(beta, gamma);
                            if r.is_zero() {
                                continue;
                            }
                            acc = acc.sub(
                                &poly_to_gauss(&xi.components[mu].deriv(nu))
                                    .mul(&poly_to_gauss(&xa))
                                    .scale(r),
                            );
                        }
                    }
                    delta_phi[beta] = acc;
                }
                // jets of the test function and of its variation
                for (ni, njet) in jets.iter().enumerate() {
                    for alpha in 0..vdim {
                        // LHS: d^n(delta phi_alpha) + xi^v d^{n+v} phi_alpha
                        let mut lhs = delta_phi[alpha].deriv_multi(njet);
                        if alpha == gamma {
                            for v in 0..n {
                                lhs = lhs.add(
                                    &poly_to_gauss(&xi.components[v])
                                        .mul(&poly_to_gauss(&xa.deriv_multi(&njet.bump(v)))),
                                );
                            }
                        }
                        // RHS: - sum_m rho(T^m_n)[alpha][gamma] phi_{gamma,m};
                        // row = target component, column = source component
                        let mut rhs = MPoly::zero(n);
                        for (mi, mjet) in jets.iter().enumerate() {
                            let entry = &t.blocks[bi].entries[mi][ni];
                            let coeff = entry.at(alpha, gamma);
                            if coeff.is_zero() {
                                continue;
                            }
                            rhs = rhs.sub(
                                &coeff.mul(&poly_to_gauss(&xa.deriv_multi(mjet))),
                            );
                        }
                        if lhs != rhs {
                            return Ok(false);
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Derivative intertwining: `d_v T^m_n(xi) = T^m_n(d_v xi)` entrywise.
pub fn verify_derivative_intertwining(
    xi: &PolyVectorField,
    p: u32,
    rep: &RepSpec,
) -> Result<bool, RepError> {
    let t = build_t(xi, p, rep)?;
    for v in 0..rep.n {
        let t_d = build_t(&xi.deriv(v), p, rep)?;
        for (ba, bb) in t.blocks.iter().zip(&t_d.blocks) {
            for (ra, rb) in ba.entries.iter().zip(&bb.entries) {
                for (ea, eb) in ra.iter().zip(rb) {
                    if ea.deriv(v) != *eb {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Recursion-built matrices must equal the closed binomial form.
pub fn verify_closed_form(
    xi: &PolyVectorField,
    x: &PolyGaugeMap,
    p: u32,
    rep: &RepSpec,
) -> Result<bool, RepError> {
    let a = build_t(xi, p, rep)?;
    let b = closed_t(xi, p, rep)?;
    if !jet_matrices_equal(&a, &b) {
        return Ok(false);
    }
    if !rep.algebra.is_trivial() {
        let a = build_j(x, p, rep)?;
        let b = closed_j(x, p, rep)?;
        if !jet_matrices_equal(&a, &b) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sample a random polynomial vector field with the given degree bound.
pub fn random_vector_field<R: rand::Rng>(
    rng: &mut R,
    n: usize,
    degree: u32,
) -> PolyVectorField {
    let exps = enumerate(n, degree);
    let components = (0..n)
        .map(|_| {
            let mut p = MPoly::zero(n);
            for e in &exps {
                let c = rng.gen_range(-3i64..=3);
                if c != 0 {
                    p.add_term(e.0.iter().map(|&k| k).collect(), Rat::from_integer(c.into()));
                }
            }
            p
        })
        .collect();
    PolyVectorField { n, components }
}

/// Sample a random polynomial gauge map with the given degree bound.
pub fn random_gauge_map<R: rand::Rng>(
    rng: &mut R,
    n: usize,
    gauge_dim: usize,
    degree: u32,
) -> PolyGaugeMap {
    let exps = enumerate(n, degree);
    let components = (0..gauge_dim)
        .map(|_| {
            let mut p = MPoly::zero(n);
            for e in &exps {
                let c = rng.gen_range(-3i64..=3);
                if c != 0 {
                    p.add_term(
                        e.0.iter().map(|&k| k).collect(),
                        GaussRat::from_int(c),
                    );
                }
            }
            p
        })
        .collect();
    PolyGaugeMap { n, components }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repkit::{GaugeAlgebra, GaugeIrrep, GlIrrep, SpeciesBlock};
    use crate::scalar::rat_int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn vector_rep(n: usize) -> RepSpec {
        RepSpec::new(
            n,
            GaugeAlgebra::none(),
            vec![SpeciesBlock::new(
                "vec",
                GlIrrep::vector(),
                GaugeIrrep::Trivial,
                Parity::Bosonic,
            )],
        )
    }

    fn scalar_rep(n: usize) -> RepSpec {
        RepSpec::trivial_scalar(n)
    }

    #[test]
    fn linear_field_seed_matrix() {
        // N=1, xi = x d/dx, p=0, vector block of gl(1): T^0_0 = dxi T = T
        let xi = PolyVectorField::new(1, vec![MPoly::var(1, 0)]);
        let t = build_t(&xi, 0, &vector_rep(1)).unwrap();
        let entry = &t.blocks[0].entries[0][0];
        assert_eq!(entry.at(0, 0), &MPoly::constant(1, GaussRat::one()));
    }

    #[test]
    fn triangularity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xi = random_vector_field(&mut rng, 2, 2);
        let t = build_t(&xi, 2, &vector_rep(2)).unwrap();
        for (mi, m) in t.jets.iter().enumerate() {
            for (ni, n) in t.jets.iter().enumerate() {
                if m.order() > n.order() {
                    assert!(t.blocks[0].entries[mi][ni].is_zero());
                }
            }
        }
    }

    #[test]
    fn constant_gauge_map_is_block_diagonal() {
        let alg = GaugeAlgebra::u1();
        let rep = RepSpec::new(
            2,
            alg,
            vec![SpeciesBlock::new(
                "q",
                GlIrrep::scalar(Rat::zero()),
                GaugeIrrep::Charge(rat_int(2)),
                Parity::Bosonic,
            )],
        );
        let x = PolyGaugeMap::new(2, vec![MPoly::constant(2, GaussRat::from_int(5))]);
        let j = build_j(&x, 2, &rep).unwrap();
        for (mi, m) in j.jets.iter().enumerate() {
            for (ni, n) in j.jets.iter().enumerate() {
                let e = &j.blocks[0].entries[mi][ni];
                if m == n {
                    assert_eq!(e.at(0, 0), &MPoly::constant(2, GaussRat::from_int(10)));
                } else {
                    assert!(e.is_zero(), "J^{m:?}_{n:?} should vanish");
                }
            }
        }
    }

    #[test]
    fn trivial_gauge_irrep_gives_zero_j() {
        let rep = RepSpec::new(
            2,
            GaugeAlgebra::u1(),
            vec![SpeciesBlock::new(
                "s",
                GlIrrep::scalar(Rat::zero()),
                GaugeIrrep::Trivial,
                Parity::Bosonic,
            )],
        );
        let x = PolyGaugeMap::new(2, vec![MPoly::var(2, 0)]);
        let j = build_j(&x, 1, &rep).unwrap();
        assert!(j.blocks[0].entries.iter().flatten().all(|e| e.is_zero()));
    }

    #[test]
    fn one_dim_linear_charge_map_offdiagonal() {
        // N=1, X(x)=x, u(1) charge 1, p=1: J^0_{(1)} = 1 * charge
        let rep = RepSpec::new(
            1,
            GaugeAlgebra::u1(),
            vec![SpeciesBlock::new(
                "q",
                GlIrrep::scalar(Rat::zero()),
                GaugeIrrep::Charge(Rat::one()),
                Parity::Bosonic,
            )],
        );
        let x = PolyGaugeMap::new(1, vec![MPoly::var(1, 0)]);
        let j = build_j(&x, 1, &rep).unwrap();
        let e = &j.blocks[0].entries[0][1];
        assert_eq!(e.at(0, 0), &MPoly::constant(1, GaussRat::one()));
    }

    #[test]
    fn recursion_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=2usize {
            let rep = vector_rep(n);
            let xi = random_vector_field(&mut rng, n, 3);
            let x = PolyGaugeMap::zero(n, 0);
            assert!(verify_closed_form(&xi, &x, 2, &rep).unwrap());
        }
    }

    #[test]
    fn oracle_agreement_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // N=2, xi = (x^1)^2 d_0 among others, p=2, scalar and vector reps
        let mut xi = PolyVectorField::zero(2);
        xi.components[0] = MPoly::var(2, 1).mul(&MPoly::var(2, 1));
        assert!(taylor_oracle_t(&xi, 2, &scalar_rep(2), 3).unwrap());
        assert!(taylor_oracle_t(&xi, 2, &vector_rep(2), 3).unwrap());
        let xi2 = random_vector_field(&mut rng, 2, 2);
        assert!(taylor_oracle_t(&xi2, 2, &vector_rep(2), 3).unwrap());
    }

    #[test]
    fn composition_identities_linear_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // linear fields, N=2
        let mut xi = PolyVectorField::zero(2);
        xi.components[0] = MPoly::var(2, 1);
        let mut eta = PolyVectorField::zero(2);
        eta.components[1] = MPoly::var(2, 0);
        let x0 = PolyGaugeMap::zero(2, 0);
        assert!(verify_composition(&xi, &eta, &x0, &x0, 2, &vector_rep(2)).unwrap());
        // xi = eta: both sides vanish
        assert!(verify_composition(&xi, &xi, &x0, &x0, 2, &vector_rep(2)).unwrap());
        // random cubic with u(1) gauge content
        let rep = RepSpec::new(
            2,
            GaugeAlgebra::u1(),
            vec![SpeciesBlock::new(
                "q",
                GlIrrep::vector(),
                GaugeIrrep::Charge(rat_int(1)),
                Parity::Bosonic,
            )],
        );
        let xi = random_vector_field(&mut rng, 2, 3);
        let eta = random_vector_field(&mut rng, 2, 3);
        let x = random_gauge_map(&mut rng, 2, 1, 2);
        let y = random_gauge_map(&mut rng, 2, 1, 2);
        assert!(verify_composition(&xi, &eta, &x, &y, 2, &rep).unwrap());
    }

    #[test]
    fn derivative_intertwining_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let xi = random_vector_field(&mut rng, 2, 3);
        assert!(verify_derivative_intertwining(&xi, 2, &vector_rep(2)).unwrap());
    }

    #[test]
    fn trace_lemmas_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // identity lemma, N=2, p=3, vector rep: C(5,3) sd = 10 * 2 = 20
        let xi = random_vector_field(&mut rng, 2, 2);
        let eta = random_vector_field(&mut rng, 2, 2);
        let x = PolyGaugeMap::zero(2, 0);
        let report = trace_lemmas(&xi, &eta, &x, &x, 3, &vector_rep(2)).unwrap();
        assert!(report.all_hold());
        assert_eq!(
            report.lemmas[0].enumerated,
            MPoly::constant(2, GaussRat::from_int(20))
        );
        // with an su(2) gauge block
        let rep = RepSpec::new(
            2,
            GaugeAlgebra::su2(),
            vec![SpeciesBlock::new(
                "f",
                GlIrrep::covector(),
                GaugeIrrep::Su2Fundamental,
                Parity::Fermionic,
            )],
        );
        let x = random_gauge_map(&mut rng, 2, 3, 2);
        let y = random_gauge_map(&mut rng, 2, 3, 2);
        let report = trace_lemmas(&xi, &eta, &x, &y, 2, &rep).unwrap();
        for lemma in &report.lemmas {
            assert!(lemma.holds(), "lemma {} failed", lemma.name);
        }
    }
}
