//! Symbolic local functionals of the observer trajectory and the extended
//! symmetry brackets.
//!
//! Elements of the observer algebra are exact linear combinations of
//! normalized integrals
//!
//! ```text
//! (1/2 pi i) Int dt  e^{ikt} t^j  prod_a d^{k_a} q^{mu_a}(t) / dt^{k_a}
//! ```
//!
//! with coefficients that are polynomials in the seven formal abelian
//! charges over the Gaussian rationals. The only structural fact used
//! about the circle is that integrals of total derivatives vanish;
//! canonicalization is the exact quotient of the bounded monomial span by
//! the image of `d/dt`, computed blockwise by Gaussian elimination (the
//! derivative preserves the Fourier mode and the coordinate multiset of a
//! monomial, so the elimination decomposes into small blocks).
//!
//! On top of that sit the extended brackets of diffeomorphisms,
//! reparametrizations and gauge maps with all seven extension terms, the
//! Jacobi-defect computation, the second-class gauge fixing of the
//! reparametrization sector, the Virasoro restriction of the mixed
//! charge, and the expansion into the velocity-string/acceleration-string
//! operator basis.

use crate::jetops::{poly_to_gauss, PolyGaugeMap, PolyVectorField};
use crate::linalg::{rref, Mat, Rref};
use crate::poly::MPoly;
use crate::scalar::{rat, rat_int, GaussRat, Rat};
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObsError {
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("element outside the supported sector: {0}")]
    UnsupportedSector(String),
    #[error("functional outside the velocity/acceleration string span: {0}")]
    OutsideSrSpan(String),
}

/// Exponent vector over the seven formal charges.
type CExp = [u8; 7];

/// Polynomial in the formal charges `c_1..c_7` over the Gaussian
/// rationals. Extension terms are linear in the charges, so degrees stay
/// tiny; the representation is general anyway.
#[derive(Clone, PartialEq, Eq)]
pub struct ChargePoly {
    pub terms: BTreeMap<CExp, GaussRat>,
}

impl fmt::Debug for ChargePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    write!(f, "*c{}^{}", j + 1, k)?;
                }
            }
        }
        Ok(())
    }
}

impl ChargePoly {
    pub fn zero() -> Self {
        ChargePoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut p = ChargePoly::zero();
        if !c.is_zero() {
            p.terms.insert([0; 7], c);
        }
        p
    }

    pub fn one() -> Self {
        ChargePoly::constant(GaussRat::one())
    }

    /// The formal charge symbol `c_j` (1-based).
    pub fn symbol(j: usize) -> Self {
        assert!((1..=7).contains(&j));
        let mut e = [0u8; 7];
        e[j - 1] = 1;
        let mut p = ChargePoly::zero();
        p.terms.insert(e, GaussRat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: CExp, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().clone() + c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        ChargePoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = ChargePoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for j in 0..7 {
                    e[j] += eb[j];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return ChargePoly::zero();
        }
        ChargePoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }
}

/// The seven abelian charges, each either a formal symbol or a fixed
/// rational value.
#[derive(Clone, Debug, Default)]
pub struct ChargeSymbols {
    pub fixed: [Option<Rat>; 7],
}

impl ChargeSymbols {
    /// All seven kept symbolic.
    pub fn symbolic() -> Self {
        ChargeSymbols::default()
    }

    pub fn with_fixed(mut self, j: usize, v: Rat) -> Self {
        self.fixed[j - 1] = Some(v);
        self
    }

    /// The charge `c_j` as a polynomial, honoring fixed values.
    pub fn charge(&self, j: usize) -> ChargePoly {
        match &self.fixed[j - 1] {
            Some(v) => ChargePoly::constant(GaussRat::from_rat(v.clone())),
            None => ChargePoly::symbol(j),
        }
    }
}

/// One trajectory-derivative factor `d^k q^mu / dt^k`.
pub type Factor = (u32, usize);

/// A single monomial of a local expression.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mono {
    pub fourier: i64,
    pub tpow: u32,
    /// sorted factors `(order, coordinate)`
    pub factors: Vec<Factor>,
}

impl Mono {
    pub fn unit() -> Self {
        Mono { fourier: 0, tpow: 0, factors: vec![] }
    }

    fn mul(&self, rhs: &Mono) -> Mono {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&rhs.factors);
        factors.sort_unstable();
        Mono {
            fourier: self.fourier + rhs.fourier,
            tpow: self.tpow + rhs.tpow,
            factors,
        }
    }

    /// Total derivative weight of the monomial.
    fn weight(&self) -> u32 {
        self.factors.iter().map(|(k, _)| *k).sum()
    }

    /// Multiset of coordinates, sorted.
    fn coord_multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.factors.iter().map(|(_, m)| *m).collect();
        v.sort_unstable();
        v
    }
}

/// A local expression of the parameter: a finite sum of monomials with
/// charge-polynomial coefficients. Used both for un-integrated densities
/// and, inside [`LocalFunctional`], for normalized integrands.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub terms: BTreeMap<Mono, ChargePoly>,
}

impl Density {
    pub fn zero() -> Self {
        Density { terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: ChargePoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().add(&c);
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, rhs: &Density) -> Density {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Density) -> Density {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Density {
        Density {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Density) -> Density {
        let mut out = Density::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &ChargePoly) -> Density {
        let mut out = Density::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.mul(c));
        }
        out
    }

    /// Exact `d/dt`: Fourier phase, explicit `t` powers and the chain rule
    /// over every trajectory factor.
    pub fn ddt(&self) -> Density {
        let mut out = Density::zero();
        for (m, c) in &self.terms {
            if m.fourier != 0 {
                let ik = GaussRat::new(Rat::zero(), rat_int(m.fourier));
                out.add_term(m.clone(), c.scale(&ik));
            }
            if m.tpow > 0 {
                let mut lowered = m.clone();
                lowered.tpow -= 1;
                out.add_term(lowered, c.scale(&GaussRat::from_int(m.tpow as i64)));
            }
            for (i, &(k, mu)) in m.factors.iter().enumerate() {
                let mut raised = m.clone();
                raised.factors[i] = (k + 1, mu);
                raised.factors.sort_unstable();
                out.add_term(raised, c.clone());
            }
        }
        out
    }

    pub fn ddt_n(&self, n: u32) -> Density {
        let mut d = self.clone();
        for _ in 0..n {
            d = d.ddt();
        }
        d
    }

    /// Substitute the gauge choice `q^0(t) = t`: order-zero factors of the
    /// time coordinate become explicit `t` powers, first derivatives become
    /// one, higher derivatives kill the term.
    pub fn substitute_q0_t(&self) -> Density {
        let mut out = Density::zero();
        'terms: for (m, c) in &self.terms {
            let mut new = Mono { fourier: m.fourier, tpow: m.tpow, factors: vec![] };
            for &(k, mu) in &m.factors {
                if mu == 0 {
                    match k {
                        0 => new.tpow += 1,
                        1 => {}
                        _ => continue 'terms,
                    }
                } else {
                    new.factors.push((k, mu));
                }
            }
            new.factors.sort_unstable();
            out.add_term(new, c.clone());
        }
        out
    }

    /// Substitute a polynomial in the spacetime coordinates by the
    /// trajectory symbols: `x^mu -> q^mu(t)`.
    pub fn from_poly(p: &MPoly<GaussRat>) -> Density {
        let mut out = Density::zero();
        for (exp, c) in &p.terms {
            let mut factors = Vec::new();
            for (mu, &e) in exp.iter().enumerate() {
                for _ in 0..e {
                    factors.push((0u32, mu));
                }
            }
            factors.sort_unstable();
            out.add_term(
                Mono { fourier: 0, tpow: 0, factors },
                ChargePoly::constant(c.clone()),
            );
        }
        out
    }

    /// A single trajectory-derivative factor as a density.
    pub fn factor(k: u32, mu: usize) -> Density {
        let mut d = Density::zero();
        d.add_term(
            Mono { fourier: 0, tpow: 0, factors: vec![(k, mu)] },
            ChargePoly::one(),
        );
        d
    }

    /// One Fourier phase `e^{ikt}`.
    pub fn phase(k: i64) -> Density {
        let mut d = Density::zero();
        d.add_term(Mono { fourier: k, tpow: 0, factors: vec![] }, ChargePoly::one());
        d
    }
}

/// A finite Fourier polynomial on the circle.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPoly {
    pub modes: BTreeMap<i64, GaussRat>,
}

impl FourierPoly {
    pub fn zero() -> Self {
        FourierPoly { modes: BTreeMap::new() }
    }

    pub fn mode(k: i64) -> Self {
        let mut m = BTreeMap::new();
        m.insert(k, GaussRat::one());
        FourierPoly { modes: m }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn add_mode(&mut self, k: i64, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.modes.entry(k) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().clone() + c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.modes {
            out.add_mode(*k, c.clone());
        }
        out
    }

    /// Vector-field bracket on the circle: `[f, g] = f g' - g f'`,
    /// modewise `i (l - k) a_k b_l` at mode `k + l`.
    pub fn bracket(&self, rhs: &Self) -> Self {
        let mut out = FourierPoly::zero();
        for (k, a) in &self.modes {
            for (l, b) in &rhs.modes {
                let c = GaussRat::new(Rat::zero(), rat_int(l - k)) * (a * b);
                out.add_mode(k + l, c);
            }
        }
        out
    }

    /// As a density with explicit phases.
    pub fn density(&self) -> Density {
        let mut d = Density::zero();
        for (k, c) in &self.modes {
            d.add_term(
                Mono { fourier: *k, tpow: 0, factors: vec![] },
                ChargePoly::constant(c.clone()),
            );
        }
        d
    }
}

/// A normalized integrated local functional: the density stands under
/// `(1/2 pi i) Int dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFunctional {
    pub integrand: Density,
}

impl LocalFunctional {
    pub fn zero() -> Self {
        LocalFunctional { integrand: Density::zero() }
    }

    pub fn from_density(d: Density) -> Self {
        LocalFunctional { integrand: d }
    }

    pub fn is_zero(&self) -> bool {
        self.integrand.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        LocalFunctional { integrand: self.integrand.add(&rhs.integrand) }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        LocalFunctional { integrand: self.integrand.sub(&rhs.integrand) }
    }

    pub fn neg(&self) -> Self {
        LocalFunctional { integrand: self.integrand.neg() }
    }

    pub fn scale(&self, c: &ChargePoly) -> Self {
        LocalFunctional { integrand: self.integrand.scale(c) }
    }

    /// The constant value of a purely numerical functional: only the
    /// zero-mode, factor-free part survives integration, and the
    /// normalization contributes a factor `-i` (from `2 pi / (2 pi i)`).
    pub fn constant_value(&self) -> ChargePoly {
        let mut acc = ChargePoly::zero();
        for (m, c) in &self.integrand.terms {
            if m.fourier == 0 && m.tpow == 0 && m.factors.is_empty() {
                acc = acc.add(&c.scale(&GaussRat::new(Rat::zero(), -Rat::one())));
            }
        }
        acc
    }
}

/// Budgets for the canonicalization basis.
#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    /// maximum total derivative weight of a monomial
    pub max_weight: u32,
    /// maximum explicit `t` power
    pub max_tpow: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_weight: 7, max_tpow: 5 }
    }
}

type BlockKey = (i64, Vec<usize>, u32); // fourier, coordinate multiset, tpow ceiling

struct BlockBasis {
    monos: Vec<Mono>,
    index: BTreeMap<Mono, usize>,
    reduced: Rref<GaussRat>,
}

/// Canonicalization context: dimension, budgets and the per-block
/// elimination cache.
pub struct ObsContext {
    pub n: usize,
    pub budgets: Budgets,
    cache: RefCell<BTreeMap<BlockKey, Rc<BlockBasis>>>,
}

impl ObsContext {
    pub fn new(n: usize) -> Self {
        ObsContext { n, budgets: Budgets::default(), cache: RefCell::new(BTreeMap::new()) }
    }

    pub fn with_budgets(n: usize, budgets: Budgets) -> Self {
        ObsContext { n, budgets, cache: RefCell::new(BTreeMap::new()) }
    }

    /// All order assignments to a fixed coordinate multiset with total
    /// weight at most the budget, together with `t` powers up to the
    /// given ceiling, at a fixed Fourier mode.
    fn block_monomials(&self, fourier: i64, coords: &[usize], tpow_cap: u32) -> Vec<Mono> {
        let mut groups: Vec<(usize, usize)> = Vec::new(); // (coord, count)
        for &c in coords {
            match groups.last_mut() {
                Some((g, n)) if *g == c => *n += 1,
                _ => groups.push((c, 1)),
            }
        }
        let mut assignments: Vec<Vec<Factor>> = vec![vec![]];
        for (coord, count) in groups {
            let mut next = Vec::new();
            for partial in &assignments {
                let used: u32 = partial.iter().map(|(k, _)| k).sum();
                let avail = self.budgets.max_weight.saturating_sub(used);
                // nondecreasing order sequences of length `count`, sum <= avail
                let mut stack: Vec<(Vec<u32>, u32, u32)> = vec![(vec![], 0, 0)];
                while let Some((seq, total, min)) = stack.pop() {
                    if seq.len() == count {
                        let mut ext = partial.clone();
                        for &k in &seq {
                            ext.push((k, coord));
                        }
                        next.push(ext);
                        continue;
                    }
                    let mut k = min;
                    while total + k <= avail {
                        let mut s = seq.clone();
                        s.push(k);
                        stack.push((s, total + k, k));
                        k += 1;
                    }
                }
            }
            assignments = next;
        }
        let mut out = Vec::new();
        for factors in assignments {
            let mut f = factors;
            f.sort_unstable();
            for tpow in 0..=tpow_cap {
                out.push(Mono { fourier, tpow, factors: f.clone() });
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn block_basis(&self, key: &BlockKey) -> Rc<BlockBasis> {
        if let Some(hit) = self.cache.borrow().get(key) {
            return hit.clone();
        }
        let (fourier, coords, tcap) = key;
        let monos = self.block_monomials(*fourier, coords, *tcap);
        let index: BTreeMap<Mono, usize> =
            monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        // image of d/dt from sources inside the bounded span; in the bare
        // block (no trajectory factors, mode zero) explicit-parameter
        // sources are not legitimate total derivatives on the circle, so
        // the constant functional survives
        let bare_block = *fourier == 0 && coords.is_empty();
        let mut rows: Vec<Vec<GaussRat>> = Vec::new();
        for m in &monos {
            if m.weight() + 1 > self.budgets.max_weight {
                continue;
            }
            if bare_block && m.tpow > 0 {
                continue;
            }
            let src = Density {
                terms: [(m.clone(), ChargePoly::one())].into_iter().collect(),
            };
            let img = src.ddt();
            let mut row = vec![GaussRat::zero(); monos.len()];
            for (mono, coeff) in &img.terms {
                let i = *index
                    .get(mono)
                    .expect("derivative image stays inside the block basis");
                row[i] = coeff
                    .terms
                    .get(&[0u8; 7])
                    .cloned()
                    .unwrap_or_else(GaussRat::zero);
            }
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
        let reduced = if rows.is_empty() {
            rref(Mat::<GaussRat>::zeros(0, monos.len()))
        } else {
            rref(Mat::from_rows(rows))
        };
        let basis = Rc::new(BlockBasis { monos, index, reduced });
        self.cache.borrow_mut().insert(key.clone(), basis.clone());
        basis
    }

    /// Canonical representative modulo integrated total derivatives.
    pub fn ibp_reduce(&self, f: &LocalFunctional) -> Result<LocalFunctional, ObsError> {
        let mut max_tpow_per: BTreeMap<(i64, Vec<usize>), u32> = BTreeMap::new();
        for m in f.integrand.terms.keys() {
            if m.weight() > self.budgets.max_weight {
                return Err(ObsError::BudgetExceeded(format!(
                    "derivative weight {} exceeds budget {}",
                    m.weight(),
                    self.budgets.max_weight
                )));
            }
            if m.tpow > self.budgets.max_tpow {
                return Err(ObsError::BudgetExceeded(format!(
                    "t power {} exceeds budget {}",
                    m.tpow, self.budgets.max_tpow
                )));
            }
            let pre = (m.fourier, m.coord_multiset());
            let cap = max_tpow_per.entry(pre).or_insert(0);
            *cap = (*cap).max(m.tpow);
        }
        let mut blocks: BTreeMap<BlockKey, Vec<(Mono, ChargePoly)>> = BTreeMap::new();
        for (m, c) in &f.integrand.terms {
            let pre = (m.fourier, m.coord_multiset());
            let cap = *max_tpow_per.get(&pre).unwrap();
            blocks
                .entry((pre.0, pre.1, cap))
                .or_default()
                .push((m.clone(), c.clone()));
        }
        let mut out = Density::zero();
        for (key, terms) in blocks {
            let basis = self.block_basis(&key);
            let mut vec: Vec<ChargePoly> = vec![ChargePoly::zero(); basis.monos.len()];
            for (m, c) in terms {
                let i = *basis
                    .index
                    .get(&m)
                    .expect("input monomial inside block basis");
                vec[i] = vec[i].add(&c);
            }
            // eliminate the pivot coordinates of the derivative image
            let rr = &basis.reduced;
            for (row, &pivot) in rr.pivots.iter().enumerate() {
                let lead = vec[pivot].clone();
                if lead.is_zero() {
                    continue;
                }
                for col in 0..basis.monos.len() {
                    let rc = rr.mat.at(row, col);
                    if rc.is_zero() {
                        continue;
                    }
                    let delta = lead.scale(rc).neg();
                    vec[col] = vec[col].add(&delta);
                }
            }
            for (i, c) in vec.into_iter().enumerate() {
                if !c.is_zero() {
                    out.add_term(basis.monos[i].clone(), c);
                }
            }
        }
        Ok(LocalFunctional { integrand: out })
    }

    /// Reduced equality test.
    pub fn equivalent(&self, a: &LocalFunctional, b: &LocalFunctional) -> Result<bool, ObsError> {
        Ok(self.ibp_reduce(&a.sub(b))?.is_zero())
    }
}

/// An element of the extended algebra: a polynomial vector field part, a
/// circle vector field part, a gauge map part and an observer part.
#[derive(Clone, Debug)]
pub struct DgroElement {
    pub n: usize,
    pub diff: PolyVectorField,
    pub rep: FourierPoly,
    pub gauge: PolyGaugeMap,
    pub obs: LocalFunctional,
}

impl DgroElement {
    pub fn zero(n: usize, gauge_dim: usize) -> Self {
        DgroElement {
            n,
            diff: PolyVectorField::zero(n),
            rep: FourierPoly::zero(),
            gauge: PolyGaugeMap::zero(n, gauge_dim),
            obs: LocalFunctional::zero(),
        }
    }

    pub fn from_diff(xi: PolyVectorField, gauge_dim: usize) -> Self {
        let n = xi.n;
        DgroElement { diff: xi, ..DgroElement::zero(n, gauge_dim) }
    }

    pub fn from_rep(n: usize, f: FourierPoly, gauge_dim: usize) -> Self {
        DgroElement { rep: f, ..DgroElement::zero(n, gauge_dim) }
    }

    pub fn from_gauge(x: PolyGaugeMap) -> Self {
        let n = x.n;
        let d = x.components.len();
        DgroElement { gauge: x, ..DgroElement::zero(n, d) }
    }

    pub fn from_obs(n: usize, f: LocalFunctional, gauge_dim: usize) -> Self {
        DgroElement { obs: f, ..DgroElement::zero(n, gauge_dim) }
    }

    pub fn has_diff(&self) -> bool {
        self.diff.components.iter().any(|c| !c.is_zero())
    }

    pub fn has_rep(&self) -> bool {
        !self.rep.is_zero()
    }

    pub fn has_gauge(&self) -> bool {
        self.gauge.components.iter().any(|c| !c.is_zero())
    }

    pub fn add(&self, rhs: &DgroElement) -> DgroElement {
        let mut diff = self.diff.clone();
        for mu in 0..self.n {
            diff.components[mu] = diff.components[mu].add(&rhs.diff.components[mu]);
        }
        let mut gauge = self.gauge.clone();
        for (a, c) in gauge.components.iter_mut().enumerate() {
            *c = c.add(&rhs.gauge.components[a]);
        }
        DgroElement {
            n: self.n,
            diff,
            rep: self.rep.add(&rhs.rep),
            gauge,
            obs: self.obs.add(&rhs.obs),
        }
    }
}

/// Substituted composite `P(q(t))` of a rational coefficient polynomial.
fn subst(p: &MPoly<Rat>) -> Density {
    Density::from_poly(&poly_to_gauss(p))
}

fn subst_g(p: &MPoly<GaussRat>) -> Density {
    Density::from_poly(p)
}

fn half() -> ChargePoly {
    ChargePoly::constant(GaussRat::from_rat(rat(1, 2)))
}

fn twelfth() -> ChargePoly {
    ChargePoly::constant(GaussRat::from_rat(rat(1, 12)))
}

/// Structure constants with the privileged-vector contraction.
pub struct GaugeData {
    pub f: Vec<Vec<Vec<Rat>>>,
    pub delta: Vec<Rat>,
}

impl GaugeData {
    pub fn none() -> Self {
        GaugeData { f: vec![], delta: vec![] }
    }

    pub fn from_algebra(a: &crate::repkit::GaugeAlgebra) -> Self {
        GaugeData { f: a.f.clone(), delta: a.delta.clone() }
    }
}

/// The bracket engine: the canonicalization context, the gauge structure
/// constants and the charge assignment.
pub struct BracketEngine {
    pub ctx: ObsContext,
    pub gauge: GaugeData,
    pub charges: ChargeSymbols,
}

impl BracketEngine {
    pub fn new(n: usize, gauge: GaugeData, charges: ChargeSymbols) -> Self {
        BracketEngine { ctx: ObsContext::new(n), gauge, charges }
    }

    fn c(&self, j: usize) -> ChargePoly {
        self.charges.charge(j)
    }

    /// `[L_xi, d^k q^mu/dt^k] = d^k/dt^k (xi^mu(q))`.
    fn diff_replacement(&self, xi: &PolyVectorField, k: u32, mu: usize) -> Density {
        subst(&xi.components[mu]).ddt_n(k)
    }

    /// `[L_f, d^k q^mu/dt^k] = d^k/dt^k (-f(t) qdot^mu)`.
    fn rep_replacement(&self, f: &FourierPoly, k: u32, mu: usize) -> Density {
        f.density().neg().mul(&Density::factor(1, mu)).ddt_n(k)
    }

    /// Leibniz action of an element's Lie parts on a local functional.
    pub fn act(&self, a: &DgroElement, f: &LocalFunctional) -> LocalFunctional {
        let mut out = Density::zero();
        for (m, c) in &f.integrand.terms {
            for (i, &(k, mu)) in m.factors.iter().enumerate() {
                let mut rest = m.clone();
                rest.factors.remove(i);
                let rest_density = Density {
                    terms: [(rest, c.clone())].into_iter().collect(),
                };
                if a.has_diff() {
                    out = out.add(&rest_density.mul(&self.diff_replacement(&a.diff, k, mu)));
                }
                if a.has_rep() {
                    out = out.add(&rest_density.mul(&self.rep_replacement(&a.rep, k, mu)));
                }
            }
        }
        LocalFunctional { integrand: out }
    }

    /// Diffeomorphism-pair extension:
    /// `(1/2 pi i) Int qdot^rho [c1 d_rho d_nu xi^mu d_mu eta^nu
    ///                         + c2 d_rho (div xi) (div eta)]`.
    fn ext_diff_diff(&self, xi: &PolyVectorField, eta: &PolyVectorField) -> LocalFunctional {
        let n = self.ctx.n;
        let mut total = Density::zero();
        for rho in 0..n {
            let mut g1 = MPoly::<Rat>::zero(n);
            for mu in 0..n {
                for nu in 0..n {
                    g1 = g1.add(
                        &xi.components[mu]
                            .deriv(rho)
                            .deriv(nu)
                            .mul(&eta.components[nu].deriv(mu)),
                    );
                }
            }
            let g2 = xi.divergence().deriv(rho).mul(&eta.divergence());
            let qdot = Density::factor(1, rho);
            total = total.add(&qdot.mul(&subst(&g1)).scale(&self.c(1)));
            total = total.add(&qdot.mul(&subst(&g2)).scale(&self.c(2)));
        }
        LocalFunctional { integrand: total }
    }

    /// Mode profile of `f'' - i f'`: mode `k` carries `(k - k^2) a_k`.
    fn smeared_profile(f: &FourierPoly) -> Density {
        let mut profile = Density::zero();
        for (k, a) in &f.modes {
            let w = rat_int(k - k * k);
            if w.is_zero() {
                continue;
            }
            profile = profile
                .add(&Density::phase(*k).scale(&ChargePoly::constant(a.scale(&w))));
        }
        profile
    }

    /// Mixed reparametrization/diffeomorphism extension:
    /// `(c3 / 4 pi i) Int (f'' - i f') div xi (q)`.
    fn ext_rep_diff(&self, f: &FourierPoly, xi: &PolyVectorField) -> LocalFunctional {
        let profile = Self::smeared_profile(f);
        let div = subst(&xi.divergence());
        LocalFunctional {
            integrand: profile.mul(&div).scale(&self.c(3)).scale(&half()),
        }
    }

    /// Reparametrization-pair extension:
    /// `(c4 / 24 pi i) Int (f'' g' - f' g)`; modewise the integrand
    /// coefficient is `-i k (k l + 1) a_k b_l` at mode `k + l`.
    fn ext_rep_rep(&self, f: &FourierPoly, g: &FourierPoly) -> LocalFunctional {
        let mut total = Density::zero();
        for (k, a) in &f.modes {
            for (l, b) in &g.modes {
                let w = GaussRat::new(Rat::zero(), -rat_int(k * (k * l + 1)));
                let c = (a * b) * w;
                if c.is_zero() {
                    continue;
                }
                total = total.add(&Density::phase(k + l).scale(&ChargePoly::constant(c)));
            }
        }
        LocalFunctional { integrand: total.scale(&self.c(4)).scale(&twelfth()) }
    }

    /// Gauge-pair extension:
    /// `-(c5 / 2 pi i) Int qdot^rho sum_a d_rho X_a Y_a`.
    fn ext_gauge_gauge(&self, x: &PolyGaugeMap, y: &PolyGaugeMap) -> LocalFunctional {
        let n = self.ctx.n;
        let mut total = Density::zero();
        for rho in 0..n {
            let mut g = MPoly::<GaussRat>::zero(n);
            for (xa, ya) in x.components.iter().zip(&y.components) {
                g = g.add(&xa.deriv(rho).mul(ya));
            }
            total = total.add(&Density::factor(1, rho).mul(&subst_g(&g)));
        }
        LocalFunctional { integrand: total.neg().scale(&self.c(5)) }
    }

    fn delta_weighted(&self, x: &PolyGaugeMap) -> MPoly<GaussRat> {
        let n = self.ctx.n;
        let mut weighted = MPoly::<GaussRat>::zero(n);
        for (a, xa) in x.components.iter().enumerate() {
            if a < self.gauge.delta.len() && !self.gauge.delta[a].is_zero() {
                weighted =
                    weighted.add(&xa.scale(&GaussRat::from_rat(self.gauge.delta[a].clone())));
            }
        }
        weighted
    }

    /// Mixed reparametrization/gauge extension:
    /// `(c6 / 4 pi i) d^a Int (f'' - i f') X_a(q)`.
    fn ext_rep_gauge(&self, f: &FourierPoly, x: &PolyGaugeMap) -> LocalFunctional {
        let weighted = self.delta_weighted(x);
        let profile = Self::smeared_profile(f);
        LocalFunctional {
            integrand: profile.mul(&subst_g(&weighted)).scale(&self.c(6)).scale(&half()),
        }
    }

    /// Mixed diffeomorphism/gauge extension:
    /// `-(c7 / 2 pi i) d^a Int qdot^rho X_a(q) d_rho div xi (q)`.
    fn ext_diff_gauge(&self, xi: &PolyVectorField, x: &PolyGaugeMap) -> LocalFunctional {
        let n = self.ctx.n;
        let weighted = self.delta_weighted(x);
        let div = poly_to_gauss(&xi.divergence());
        let mut total = Density::zero();
        for rho in 0..n {
            let g = weighted.mul(&div.deriv(rho));
            total = total.add(&Density::factor(1, rho).mul(&subst_g(&g)));
        }
        LocalFunctional { integrand: total.neg().scale(&self.c(7)) }
    }

    /// The full extended bracket.
    pub fn bracket(&self, a: &DgroElement, b: &DgroElement) -> DgroElement {
        let n = self.ctx.n;
        let gauge_dim = a.gauge.components.len();
        let diff = a.diff.bracket(&b.diff);
        let rep = a.rep.bracket(&b.rep);
        // gauge part: [X, Y] + xi_a . d(X_b) - xi_b . d(X_a)
        let mut gauge = if gauge_dim > 0 && !self.gauge.f.is_empty() {
            a.gauge.bracket(&b.gauge, &self.gauge.f)
        } else {
            PolyGaugeMap::zero(n, gauge_dim)
        };
        if a.has_diff() {
            let dir = b.gauge.directional(&a.diff);
            for (c, d) in gauge.components.iter_mut().zip(dir.components) {
                *c = c.add(&d);
            }
        }
        if b.has_diff() {
            let dir = a.gauge.directional(&b.diff);
            for (c, d) in gauge.components.iter_mut().zip(dir.components) {
                *c = c.sub(&d);
            }
        }
        // observer part: the seven extensions plus the Leibniz action on
        // the operands' observer parts
        let mut obs = LocalFunctional::zero();
        obs = obs.add(&self.ext_diff_diff(&a.diff, &b.diff));
        obs = obs.add(&self.ext_rep_diff(&a.rep, &b.diff));
        obs = obs.sub(&self.ext_rep_diff(&b.rep, &a.diff));
        obs = obs.add(&self.ext_rep_rep(&a.rep, &b.rep));
        obs = obs.add(&self.ext_gauge_gauge(&a.gauge, &b.gauge));
        obs = obs.add(&self.ext_rep_gauge(&a.rep, &b.gauge));
        obs = obs.sub(&self.ext_rep_gauge(&b.rep, &a.gauge));
        obs = obs.add(&self.ext_diff_gauge(&a.diff, &b.gauge));
        obs = obs.sub(&self.ext_diff_gauge(&b.diff, &a.gauge));
        obs = obs.add(&self.act(a, &b.obs));
        obs = obs.sub(&self.act(b, &a.obs));
        DgroElement { n, diff, rep, gauge, obs }
    }

    /// Action on the trajectory itself: `[a, q^mu(t)]` as a density. Gauge
    /// maps commute with the trajectory.
    pub fn act_on_trajectory(&self, a: &DgroElement, mu: usize) -> Density {
        let mut d = Density::zero();
        if a.has_diff() {
            d = d.add(&subst(&a.diff.components[mu]));
        }
        if a.has_rep() {
            d = d.add(&a.rep.density().neg().mul(&Density::factor(1, mu)));
        }
        d
    }

    /// Cyclic Jacobi defect, canonicalized. The vector-field, circle and
    /// gauge parts of the cyclic sum must cancel identically; the returned
    /// functional is the canonical form of the observer part.
    pub fn jacobi_defect(
        &self,
        a: &DgroElement,
        b: &DgroElement,
        c: &DgroElement,
    ) -> Result<LocalFunctional, ObsError> {
        let ab_c = self.bracket(&self.bracket(a, b), c);
        let bc_a = self.bracket(&self.bracket(b, c), a);
        let ca_b = self.bracket(&self.bracket(c, a), b);
        let total = ab_c.add(&bc_a).add(&ca_b);
        if total.has_diff() || total.has_rep() || total.has_gauge() {
            return Err(ObsError::UnsupportedSector(
                "Lie parts of the cyclic sum do not cancel".into(),
            ));
        }
        self.ibp_reduce(&total.obs)
    }

    pub fn ibp_reduce(&self, f: &LocalFunctional) -> Result<LocalFunctional, ObsError> {
        self.ctx.ibp_reduce(f)
    }
}

/// Densities measuring an element against the two second-class
/// constraints of the reparametrization gauge fixing.
struct ConstraintBrackets {
    /// `[A, chi_1(t)]` with the gauge condition on the time coordinate; a
    /// plain density.
    with_gauge_condition: Density,
    /// `[A, chi_2(t)]` with the reparametrization generator; normalized
    /// (carries one `1/2 pi i`).
    with_generator: Density,
}

impl BracketEngine {
    fn constraint_brackets(&self, a: &DgroElement) -> Result<ConstraintBrackets, ObsError> {
        if a.has_gauge() {
            return Err(ObsError::UnsupportedSector(
                "gauge sector not part of the reparametrization gauge fixing".into(),
            ));
        }
        let mut chi1 = Density::zero();
        let mut chi2 = Density::zero();
        if a.has_diff() {
            // [L_xi, q^0(t)] = xi^0(q)
            chi1 = chi1.add(&subst(&a.diff.components[0]));
            // [L_xi, L(t)] = -(c3 / 4 pi i)(D^2 + i D)(div xi (q))
            let u = subst(&a.diff.divergence());
            let prof = u
                .ddt_n(2)
                .add(&u.ddt().scale(&ChargePoly::constant(GaussRat::i())));
            chi2 = chi2.add(&prof.neg().scale(&self.c(3)).scale(&half()));
        }
        if a.has_rep() {
            // [L_f, q^0(t)] = -f(t) qdot^0
            chi1 = chi1.add(&a.rep.density().neg().mul(&Density::factor(1, 0)));
            // [L_f, L(t)] = -(c4 / 24 pi i)(f''' + f') on the surface
            let f = a.rep.density();
            let prof = f.ddt_n(3).add(&f.ddt());
            chi2 = chi2.add(&prof.neg().scale(&self.c(4)).scale(&twelfth()));
        }
        if !a.obs.is_zero() {
            // [F, L(t)] = +(1/2 pi i) qdot^mu (dF/dq^mu)(t): the
            // variational derivative of the integrand
            let mut acc = Density::zero();
            for (m, c) in &a.obs.integrand.terms {
                for (i, &(k, mu)) in m.factors.iter().enumerate() {
                    let mut rest = m.clone();
                    rest.factors.remove(i);
                    let rest_density = Density {
                        terms: [(rest, c.clone())].into_iter().collect(),
                    };
                    let mut piece = rest_density.ddt_n(k);
                    if k % 2 == 1 {
                        piece = piece.neg();
                    }
                    acc = acc.add(&piece.mul(&Density::factor(1, mu)));
                }
            }
            chi2 = chi2.add(&acc);
        }
        Ok(ConstraintBrackets { with_gauge_condition: chi1, with_generator: chi2 })
    }

    fn dirac_fix_raw(&self, a: &DgroElement, b: &DgroElement) -> Result<DgroElement, ObsError> {
        let raw = self.bracket(a, b);
        let ka = self.constraint_brackets(a)?;
        let kb = self.constraint_brackets(b)?;
        // [chi_R(t), B] = -[B, chi_R(t)]
        let chi1_b = kb.with_gauge_condition.neg();
        let chi2_b = kb.with_generator.neg();
        // piece (1,2): Delta^{12} = -delta(s-t)
        let piece12 = ka.with_gauge_condition.mul(&chi2_b).neg();
        // piece (2,1): Delta^{21} = +delta(s-t)
        let piece21 = ka.with_generator.mul(&chi1_b);
        // piece (1,1): Delta^{11} = (c4 / 24 pi i)(d''' + d'), which
        // integrates by parts onto -(D^3 + D) of the left factor
        let lhs = ka
            .with_gauge_condition
            .ddt_n(3)
            .add(&ka.with_gauge_condition.ddt())
            .neg();
        let piece11 = lhs.mul(&chi1_b).scale(&self.c(4)).scale(&twelfth());
        let correction = piece12.add(&piece21).add(&piece11);
        let fixed_obs = raw.obs.integrand.sub(&correction);
        Ok(DgroElement {
            n: raw.n,
            diff: raw.diff,
            rep: FourierPoly::zero(),
            gauge: raw.gauge,
            obs: LocalFunctional { integrand: fixed_obs },
        })
    }

    /// Second-class gauge fixing of the reparametrization sector: the
    /// bracket corrected by `[A, chi] Delta [chi, B]`, with the inverse
    /// constraint matrix collapsed analytically, the weakly-vanishing
    /// circle part dropped and the observer part canonicalized. The result
    /// is expressed in composites along the trajectory (the gauge choice
    /// not yet substituted), which is where the algebra is exact.
    pub fn dirac_fix(&self, a: &DgroElement, b: &DgroElement) -> Result<DgroElement, ObsError> {
        let raw = self.dirac_fix_raw(a, b)?;
        let reduced = self.ctx.ibp_reduce(&raw.obs)?;
        Ok(DgroElement { obs: reduced, ..raw })
    }

    /// [`BracketEngine::dirac_fix`] restricted to the constraint surface:
    /// the gauge choice `q^0(t) = t` is substituted before
    /// canonicalization. Identities that hold only weakly (brackets with
    /// the eliminated generator itself) reduce to zero here.
    pub fn dirac_fix_on_surface(
        &self,
        a: &DgroElement,
        b: &DgroElement,
    ) -> Result<DgroElement, ObsError> {
        let raw = self.dirac_fix_raw(a, b)?;
        let reduced = self
            .ctx
            .ibp_reduce(&LocalFunctional { integrand: raw.obs.integrand.substitute_q0_t() })?;
        Ok(DgroElement { obs: reduced, ..raw })
    }

    /// `[a, q^mu(t)]*`: the gauge-fixed action on the trajectory, with the
    /// gauge choice substituted.
    pub fn dirac_fix_trajectory(&self, a: &DgroElement, mu: usize) -> Result<Density, ObsError> {
        let ka = self.constraint_brackets(a)?;
        let raw = self.act_on_trajectory(a, mu);
        // only the gauge-condition channel couples to the trajectory:
        // correction = [A, chi_1](t) qdot^mu(t)
        let corr = ka.with_gauge_condition.mul(&Density::factor(1, mu));
        Ok(raw.sub(&corr).substitute_q0_t())
    }
}

/// The gauge-fixed diffeomorphism bracket built directly from its known
/// closed form, for comparison against [`BracketEngine::dirac_fix`]:
///
/// ```text
/// [L_xi, L_eta]* = L_[xi,eta]
///   + (1/2pi i) Int [c1 D(d_nu xi^mu . q) (d_mu eta^nu . q)
///                  + c2 D(div xi . q) (div eta . q)]
///   + (c3/4pi i) Int [div eta (D^2 - i D)(xi^0 . q)
///                   - div xi  (D^2 - i D)(eta^0 . q)]
///   + (c4/24pi i) Int [D^2(xi^0.q) D(eta^0.q) - D(xi^0.q)(eta^0.q)]
/// ```
///
/// everything along the trajectory with the gauge choice `q^0(t) = t`
/// substituted and `D = d/dt`.
pub fn gauge_fixed_reference(
    engine: &BracketEngine,
    xi: &PolyVectorField,
    eta: &PolyVectorField,
) -> Result<LocalFunctional, ObsError> {
    let n = engine.ctx.n;
    let mut total = Density::zero();
    // c1 and c2 lines
    for mu in 0..n {
        for nu in 0..n {
            let a = subst(&xi.components[mu].deriv(nu)).ddt();
            let b = subst(&eta.components[nu].deriv(mu));
            total = total.add(&a.mul(&b).scale(&engine.c(1)));
        }
    }
    let dxi = subst(&xi.divergence());
    let deta = subst(&eta.divergence());
    total = total.add(&dxi.ddt().mul(&deta).scale(&engine.c(2)));
    // c3 line
    let xi0 = subst(&xi.components[0]);
    let eta0 = subst(&eta.components[0]);
    let smear =
        |u: &Density| u.ddt_n(2).sub(&u.ddt().scale(&ChargePoly::constant(GaussRat::i())));
    total = total.add(&deta.mul(&smear(&xi0)).scale(&engine.c(3)).scale(&half()));
    total = total.sub(&dxi.mul(&smear(&eta0)).scale(&engine.c(3)).scale(&half()));
    // c4 line
    total = total.add(
        &xi0.ddt_n(2)
            .mul(&eta0.ddt())
            .sub(&xi0.ddt().mul(&eta0))
            .scale(&engine.c(4))
            .scale(&twelfth()),
    );
    Ok(LocalFunctional { integrand: total })
}

/// Cocycle value of the diagonal subalgebra at paired exponential
/// profiles: a circle vector field combined with the longitudinal
/// spacetime field sharing its profile, with the gauge choice
/// substituted. All four extension lines contribute:
///
/// ```text
/// omega(m) = (c1 + c2) m^3                       [the pair terms]
///          + (c3 / 4 pi i) Int [(f''-if') g' - (g''-ig') f']
///          + (c4 / 12)(m^3 - m),
/// ```
///
/// with `f = e^{imt}`, `g = e^{-imt}`. Setting the first two charges and
/// the last to zero isolates the mixed term, whose cubic shape carries
/// the central charge of the restriction.
pub fn virasoro_restriction_cocycle(charges: &ChargeSymbols, m: i64) -> ChargePoly {
    let cube = m * m * m;
    // pair terms: (1/2 pi i) Int (c1 + c2) f'' g' with unit velocity
    let pair = charges
        .charge(1)
        .add(&charges.charge(2))
        .scale(&GaussRat::from_int(cube));
    // mixed term
    let c3 = charges.charge(3);
    let term = |k_smeared: i64, k_plain: i64| -> GaussRat {
        if k_smeared + k_plain != 0 {
            return GaussRat::zero();
        }
        let smear = rat_int(k_smeared - k_smeared * k_smeared);
        let deriv = GaussRat::new(Rat::zero(), rat_int(k_plain));
        // (1/2 pi i) Int e^{i0t} X = -i X
        GaussRat::new(Rat::zero(), -Rat::one()) * (GaussRat::from_rat(smear) * deriv)
    };
    let mixed = c3.scale(&((term(m, -m) - term(-m, m)) * GaussRat::from_rat(rat(1, 2))));
    // circle term: (c4/12)(m^3 - m)
    let circle = charges
        .charge(4)
        .scale(&GaussRat::from_rat(rat(cube - m, 12)));
    pair.add(&mixed).add(&circle)
}

/// The central charge of the restricted subalgebra: extract the cubic
/// coefficient of the cocycle at two modes and scale to the standard
/// normalization. With the other extensions switched off this is twelve
/// times the mixed charge.
pub fn restricted_central_charge(charges: &ChargeSymbols) -> ChargePoly {
    // omega(m) = alpha m^3 + beta m; central charge = 12 alpha
    let w1 = virasoro_restriction_cocycle(charges, 1);
    let w2 = virasoro_restriction_cocycle(charges, 2);
    let alpha = w2
        .add(&w1.scale(&GaussRat::from_int(-2)))
        .scale(&GaussRat::from_rat(rat(1, 6)));
    alpha.scale(&GaussRat::from_int(12))
}

/// One entry of a string-basis expansion: the acceleration slot when
/// present, the sorted velocity string, and the coefficient data (Fourier
/// mode, `t` power, plain trajectory factors).
#[derive(Clone, Debug, PartialEq)]
pub struct SrEntry {
    pub rho: Option<usize>,
    pub nu: Vec<usize>,
    pub coeff_mono: Mono,
    pub coeff: ChargePoly,
}

/// Expand a canonical functional over the velocity-string and
/// acceleration-string operator families. Derivative orders above two, or
/// more than one acceleration factor, fall outside the span.
pub fn sr_expand(f: &LocalFunctional) -> Result<Vec<SrEntry>, ObsError> {
    let mut out = Vec::new();
    for (m, c) in &f.integrand.terms {
        let mut rho = None;
        let mut nu = Vec::new();
        let mut plain = Vec::new();
        for &(k, mu) in &m.factors {
            match k {
                0 => plain.push((0, mu)),
                1 => nu.push(mu),
                2 => {
                    if rho.is_some() {
                        return Err(ObsError::OutsideSrSpan(
                            "two acceleration factors in one monomial".into(),
                        ));
                    }
                    rho = Some(mu);
                }
                _ => {
                    return Err(ObsError::OutsideSrSpan(format!(
                        "derivative order {k} exceeds the string span"
                    )))
                }
            }
        }
        nu.sort_unstable();
        plain.sort_unstable();
        out.push(SrEntry {
            rho,
            nu,
            coeff_mono: Mono { fourier: m.fourier, tpow: m.tpow, factors: plain },
            coeff: c.clone(),
        });
    }
    out.sort_by(|a, b| (a.rho, &a.nu).cmp(&(b.rho, &b.nu)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetops::random_vector_field;
    use crate::repkit::GaugeAlgebra;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn engine(n: usize) -> BracketEngine {
        BracketEngine::new(n, GaugeData::none(), ChargeSymbols::symbolic())
    }

    fn functional(terms: Vec<(Vec<Factor>, i64)>) -> LocalFunctional {
        let mut d = Density::zero();
        for (mut factors, c) in terms {
            factors.sort_unstable();
            d.add_term(
                Mono { fourier: 0, tpow: 0, factors },
                ChargePoly::constant(GaussRat::from_int(c)),
            );
        }
        LocalFunctional { integrand: d }
    }

    #[test]
    fn ibp_total_derivative_vanishes() {
        let ctx = ObsContext::new(2);
        // d/dt (q^0 qdot^0) = qdot^0 qdot^0 + q^0 qddot^0
        let f = functional(vec![(vec![(1, 0), (1, 0)], 1), (vec![(0, 0), (2, 0)], 1)]);
        assert!(ctx.ibp_reduce(&f).unwrap().is_zero());
        // qddot^0 qdot^1 + qdot^0 qddot^1 = d/dt(qdot^0 qdot^1)
        let g = functional(vec![(vec![(2, 0), (1, 1)], 1), (vec![(1, 0), (2, 1)], 1)]);
        assert!(ctx.ibp_reduce(&g).unwrap().is_zero());
    }

    #[test]
    fn ibp_canonical_antisymmetry() {
        let ctx = ObsContext::new(2);
        // Int qddot^0 qdot^1 = -Int qdot^0 qddot^1 in the quotient
        let a = functional(vec![(vec![(2, 0), (1, 1)], 1)]);
        let b = functional(vec![(vec![(1, 0), (2, 1)], -1)]);
        let ra = ctx.ibp_reduce(&a).unwrap();
        let rb = ctx.ibp_reduce(&b).unwrap();
        assert!(!ra.is_zero());
        assert_eq!(ra, rb);
    }

    #[test]
    fn ibp_kills_nonzero_fourier_constants() {
        let ctx = ObsContext::new(1);
        let mut d = Density::zero();
        d.add_term(Mono { fourier: 3, tpow: 0, factors: vec![] }, ChargePoly::one());
        let f = LocalFunctional { integrand: d };
        assert!(ctx.ibp_reduce(&f).unwrap().is_zero());
    }

    #[test]
    fn budget_errors_are_reported() {
        let ctx = ObsContext::with_budgets(1, Budgets { max_weight: 2, max_tpow: 1 });
        let f = functional(vec![(vec![(3, 0)], 1)]);
        assert!(matches!(ctx.ibp_reduce(&f), Err(ObsError::BudgetExceeded(_))));
    }

    #[test]
    fn linear_fields_have_no_extension() {
        // xi = x^1 d_0, eta = x^0 d_1: [L_xi, L_eta] = L_{x^1 d_1 - x^0 d_0}
        let n = 2;
        let e = engine(n);
        let mut xi = PolyVectorField::zero(n);
        xi.components[0] = MPoly::var(n, 1);
        let mut eta = PolyVectorField::zero(n);
        eta.components[1] = MPoly::var(n, 0);
        let a = DgroElement::from_diff(xi, 0);
        let b = DgroElement::from_diff(eta, 0);
        let r = e.bracket(&a, &b);
        assert!(e.ibp_reduce(&r.obs).unwrap().is_zero());
        assert_eq!(r.diff.components[1], MPoly::var(n, 1));
        assert_eq!(r.diff.components[0], MPoly::var(n, 0).neg());
    }

    #[test]
    fn virasoro_line_of_the_bracket() {
        // [L_f, L_g] with f = e^{imt}, g = e^{-imt}
        let n = 1;
        let e = engine(n);
        let a = DgroElement::from_rep(n, FourierPoly::mode(1), 0);
        let b = DgroElement::from_rep(n, FourierPoly::mode(-1), 0);
        let r = e.bracket(&a, &b);
        // [f, g] = -2i e^{i0t}... bracket: i(l-k) a b = i(-2) at mode 0
        assert_eq!(
            r.rep.modes.get(&0),
            Some(&GaussRat::new(Rat::zero(), rat_int(-2)))
        );
        // extension value: (c4/12)(m^3 - m) = 0 at m = 1
        assert!(r.obs.constant_value().is_zero());
        // at m = 2: (c4/12)(8 - 2) = c4/2
        let a = DgroElement::from_rep(n, FourierPoly::mode(2), 0);
        let b = DgroElement::from_rep(n, FourierPoly::mode(-2), 0);
        let r = e.bracket(&a, &b);
        let expect = ChargePoly::symbol(4).scale(&GaussRat::from_rat(rat(1, 2)));
        assert_eq!(r.obs.constant_value(), expect);
    }

    #[test]
    fn gauge_maps_commute_with_trajectory() {
        let n = 2;
        let algebra = GaugeAlgebra::u1();
        let e = BracketEngine::new(
            n,
            GaugeData::from_algebra(&algebra),
            ChargeSymbols::symbolic(),
        );
        let mut x = PolyGaugeMap::zero(n, 1);
        x.components[0] = MPoly::var(n, 0).mul(&MPoly::var(n, 1));
        let a = DgroElement::from_gauge(x);
        for mu in 0..n {
            assert!(e.act_on_trajectory(&a, mu).is_zero());
        }
    }

    #[test]
    fn jacobi_linear_triple_vanishes() {
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DgroElement::from_diff(random_vector_field(&mut rng, n, 1), 0);
        let b = DgroElement::from_diff(random_vector_field(&mut rng, n, 1), 0);
        let c = DgroElement::from_diff(random_vector_field(&mut rng, n, 1), 0);
        let defect = e.jacobi_defect(&a, &b, &c).unwrap();
        assert!(defect.is_zero(), "defect {:?}", defect);
    }

    #[test]
    fn jacobi_quadratic_diff_triples() {
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let a = DgroElement::from_diff(random_vector_field(&mut rng, n, 2), 0);
            let b = DgroElement::from_diff(random_vector_field(&mut rng, n, 2), 0);
            let c = DgroElement::from_diff(random_vector_field(&mut rng, n, 2), 0);
            let defect = e.jacobi_defect(&a, &b, &c).unwrap();
            assert!(defect.is_zero(), "defect {:?}", defect);
        }
    }

    #[test]
    fn jacobi_mixed_rep_diff_triples() {
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for modes in [(1i64, -1i64), (2, -1), (3, -2)] {
            let a = DgroElement::from_rep(n, FourierPoly::mode(modes.0), 0);
            let b = DgroElement::from_rep(n, FourierPoly::mode(modes.1), 0);
            let c = DgroElement::from_diff(random_vector_field(&mut rng, n, 3), 0);
            let defect = e.jacobi_defect(&a, &b, &c).unwrap();
            assert!(defect.is_zero(), "defect {:?}", defect);
        }
    }

    #[test]
    fn jacobi_gauge_triples() {
        let n = 2;
        let algebra = GaugeAlgebra::su2();
        let e = BracketEngine::new(
            n,
            GaugeData::from_algebra(&algebra),
            ChargeSymbols::symbolic(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut rand_map = |rng: &mut ChaCha8Rng| {
            let mut x = PolyGaugeMap::zero(n, 3);
            for a in 0..3 {
                let mut p = MPoly::<GaussRat>::zero(n);
                for e in crate::multiindex::enumerate(n, 2) {
                    let c: i64 = rng.gen_range(-2..=2);
                    if c != 0 {
                        p.add_term(e.0.to_vec(), GaussRat::from_int(c));
                    }
                }
                x.components[a] = p;
            }
            x
        };
        let a = DgroElement::from_gauge(rand_map(&mut rng));
        let b = DgroElement::from_gauge(rand_map(&mut rng));
        let c = DgroElement::from_gauge(rand_map(&mut rng));
        assert!(e.jacobi_defect(&a, &b, &c).unwrap().is_zero());
        let d = DgroElement::from_diff(random_vector_field(&mut rng, n, 2), 3);
        assert!(e.jacobi_defect(&d, &b, &c).unwrap().is_zero());
        let f = DgroElement::from_rep(n, FourierPoly::mode(2), 3);
        assert!(e.jacobi_defect(&f, &b, &c).unwrap().is_zero());
        assert!(e.jacobi_defect(&d, &f, &c).unwrap().is_zero());
    }

    #[test]
    fn bracket_antisymmetry() {
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = DgroElement::from_diff(random_vector_field(&mut rng, n, 3), 0);
        let b = DgroElement::from_rep(n, FourierPoly::mode(2), 0);
        let ab = e.bracket(&a, &b);
        let ba = e.bracket(&b, &a);
        let sum = ab.add(&ba);
        assert!(!sum.has_diff() && !sum.has_rep());
        assert!(e.ibp_reduce(&sum.obs).unwrap().is_zero());
    }

    #[test]
    fn dgro_restricts_to_dro() {
        // with the gauge charges dead and no gauge parts the bracket
        // collapses to the four-charge algebra term for term
        let n = 2;
        let charges = ChargeSymbols::symbolic()
            .with_fixed(5, Rat::zero())
            .with_fixed(6, Rat::zero())
            .with_fixed(7, Rat::zero());
        let algebra = GaugeAlgebra::u1();
        let e = BracketEngine::new(n, GaugeData::from_algebra(&algebra), charges);
        let plain = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xi = random_vector_field(&mut rng, n, 2);
        let eta = random_vector_field(&mut rng, n, 2);
        let a = DgroElement::from_diff(xi.clone(), 1);
        let b = DgroElement::from_diff(eta.clone(), 1);
        let r1 = e.bracket(&a, &b);
        let a0 = DgroElement::from_diff(xi, 0);
        let b0 = DgroElement::from_diff(eta, 0);
        let r2 = plain.bracket(&a0, &b0);
        assert_eq!(
            e.ibp_reduce(&r1.obs).unwrap(),
            plain.ibp_reduce(&r2.obs).unwrap()
        );
    }

    #[test]
    fn trajectory_action() {
        let n = 2;
        let e = engine(n);
        let mut xi = PolyVectorField::zero(n);
        xi.components[0] = MPoly::var(n, 1).mul(&MPoly::var(n, 1));
        let a = DgroElement::from_diff(xi, 0);
        let d = e.act_on_trajectory(&a, 0);
        let mut expect = Density::zero();
        expect.add_term(
            Mono { fourier: 0, tpow: 0, factors: vec![(0, 1), (0, 1)] },
            ChargePoly::one(),
        );
        assert_eq!(d, expect);
    }

    #[test]
    fn dirac_trajectory_rules() {
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let xi = random_vector_field(&mut rng, n, 3);
        let a = DgroElement::from_diff(xi.clone(), 0);
        // [L_xi, q^0]* = 0
        assert!(e.dirac_fix_trajectory(&a, 0).unwrap().is_zero());
        // [L_xi, q^mu]* = xi^mu(q) - qdot^mu xi^0(q) with the gauge choice
        let got = e.dirac_fix_trajectory(&a, 1).unwrap();
        let expect = subst(&xi.components[1])
            .sub(&Density::factor(1, 1).mul(&subst(&xi.components[0])))
            .substitute_q0_t();
        assert_eq!(got, expect);
    }

    #[test]
    fn dirac_matches_reference_lines() {
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..3 {
            let xi = random_vector_field(&mut rng, n, 2);
            let eta = random_vector_field(&mut rng, n, 2);
            let a = DgroElement::from_diff(xi.clone(), 0);
            let b = DgroElement::from_diff(eta.clone(), 0);
            let fixed = e.dirac_fix(&a, &b).unwrap();
            assert_eq!(fixed.diff, xi.bracket(&eta));
            let reference = gauge_fixed_reference(&e, &xi, &eta).unwrap();
            // compare in one quotient: reduce the difference
            let defect = e.ibp_reduce(&fixed.obs.sub(&reference)).unwrap();
            assert!(defect.is_zero(), "gauge-fixed lines differ: {defect:?}");
        }
    }

    #[test]
    fn dirac_constraint_compatibility() {
        // the gauge-fixed bracket of a pure circle element with anything
        // reduces to zero on the constraint surface
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let xi = random_vector_field(&mut rng, n, 2);
        let a = DgroElement::from_rep(n, FourierPoly::mode(2), 0);
        let b = DgroElement::from_diff(xi, 0);
        let fixed = e.dirac_fix_on_surface(&a, &b).unwrap();
        assert!(!fixed.has_rep());
        assert!(fixed.obs.is_zero(), "{:?}", fixed.obs);
        // circle against circle: only the weakly-zero circle part remains
        let g = DgroElement::from_rep(n, FourierPoly::mode(1), 0);
        let h = DgroElement::from_rep(n, FourierPoly::mode(-1), 0);
        let fixed = e.dirac_fix_on_surface(&g, &h).unwrap();
        assert!(fixed.obs.is_zero(), "{:?}", fixed.obs);
        // an observer functional against a circle element
        let f = functional(vec![(vec![(1, 1), (1, 1)], 1)]);
        let o = DgroElement::from_obs(n, f, 0);
        let fixed = e.dirac_fix_on_surface(&g, &o).unwrap();
        assert!(fixed.obs.is_zero(), "{:?}", fixed.obs);
    }

    #[test]
    fn dirac_rejects_gauge_elements() {
        let n = 2;
        let algebra = GaugeAlgebra::u1();
        let e = BracketEngine::new(
            n,
            GaugeData::from_algebra(&algebra),
            ChargeSymbols::symbolic(),
        );
        let mut x = PolyGaugeMap::zero(n, 1);
        x.components[0] = MPoly::var(n, 0);
        let a = DgroElement::from_gauge(x);
        let b = DgroElement::from_diff(PolyVectorField::zero(n), 1);
        assert!(matches!(
            e.dirac_fix(&a, &b),
            Err(ObsError::UnsupportedSector(_))
        ));
    }

    #[test]
    fn restricted_central_charge_is_twelve_c3() {
        let charges = ChargeSymbols::symbolic()
            .with_fixed(1, Rat::zero())
            .with_fixed(2, Rat::zero())
            .with_fixed(4, Rat::zero());
        let c = restricted_central_charge(&charges);
        let expect = ChargePoly::symbol(3).scale(&GaussRat::from_int(12));
        assert_eq!(c, expect);
        // cocycle shape: omega(m) = c3 m^3
        for m in 1..=3i64 {
            let w = virasoro_restriction_cocycle(&charges, m);
            let expect = ChargePoly::symbol(3).scale(&GaussRat::from_int(m * m * m));
            assert_eq!(w, expect, "m={m}");
        }
        // with the charge set to zero the whole thing dies
        let dead = ChargeSymbols::symbolic()
            .with_fixed(1, Rat::zero())
            .with_fixed(2, Rat::zero())
            .with_fixed(3, Rat::zero())
            .with_fixed(4, Rat::zero());
        assert!(restricted_central_charge(&dead).is_zero());
        // without the restriction the other lines contribute too:
        // 12(c1 + c2 + c3) + c4
        let full = restricted_central_charge(&ChargeSymbols::symbolic());
        let expect = ChargePoly::symbol(1)
            .add(&ChargePoly::symbol(2))
            .add(&ChargePoly::symbol(3))
            .scale(&GaussRat::from_int(12))
            .add(&ChargePoly::symbol(4));
        assert_eq!(full, expect);
    }

    #[test]
    fn sr_expansion_shapes() {
        let n = 2;
        let e = engine(n);
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        // the first extension of a diffeomorphism pair is a pure velocity
        // string of length one
        let xi = random_vector_field(&mut rng, n, 2);
        let eta = random_vector_field(&mut rng, n, 2);
        let ext = e.ext_diff_diff(&xi, &eta);
        let entries = sr_expand(&ext).unwrap();
        assert!(!entries.is_empty());
        assert!(entries.iter().all(|s| s.rho.is_none() && s.nu.len() == 1));
        // and the string coefficients carry exactly the second-derivative
        // contraction of the two fields per velocity slot
        let c1_only = ChargeSymbols::symbolic()
            .with_fixed(2, Rat::zero())
            .with_fixed(1, crate::scalar::rat_int(1));
        let e1 = BracketEngine::new(n, GaugeData::none(), c1_only);
        let ext = e1.ext_diff_diff(&xi, &eta);
        for rho in 0..n {
            let mut expected = MPoly::<Rat>::zero(n);
            for mu in 0..n {
                for nu in 0..n {
                    expected = expected.add(
                        &xi.components[mu]
                            .deriv(rho)
                            .deriv(nu)
                            .mul(&eta.components[nu].deriv(mu)),
                    );
                }
            }
            let mut coeff = Density::zero();
            for entry in sr_expand(&ext).unwrap() {
                if entry.nu == vec![rho] {
                    coeff.add_term(entry.coeff_mono.clone(), entry.coeff.clone());
                }
            }
            assert_eq!(coeff, subst(&expected), "velocity slot {rho}");
        }
        // an acceleration-string element
        let f = functional(vec![(vec![(2, 0), (0, 1)], 1)]);
        let entries = sr_expand(&f).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].rho, Some(0));
        assert!(entries[0].nu.is_empty());
        // zero expands to nothing
        assert!(sr_expand(&LocalFunctional::zero()).unwrap().is_empty());
        // order three falls outside the span
        let g = functional(vec![(vec![(3, 0)], 1)]);
        assert!(sr_expand(&g).is_err());
    }
}
