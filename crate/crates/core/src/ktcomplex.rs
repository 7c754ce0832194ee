//! Desk-scale Koszul-Tate complexes for toy actions in frozen jet space.
//!
//! The complex is a graded-commutative polynomial algebra over conjugate
//! pairs of generators (fields and momenta, antifields and antifield
//! momenta, higher antifields, identity antifields) with a single frozen
//! parameter mode. The differential is the graded Poisson bracket with an
//! odd generator
//!
//! ```text
//! Q = sum_k S_k c_k
//! ```
//!
//! where each `S_k` is the constraint killed by the antifield whose
//! momentum is `c_k`. Ghost number and momentum number bigrade the
//! complex: the bracket with `Q` raises ghost number by one and preserves
//! momentum number, and cohomology dimensions per bidegree come out of
//! exact rank computations on the degree-filtered monomial basis.

use crate::linalg::{rank, solve_in_span, Mat};
use crate::multiindex::{enumerate, MultiIndex};
use crate::scalar::{rat, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

pub use crate::repkit::Parity;

#[derive(Debug, Error)]
pub enum KtError {
    #[error("truncation order {0} too small for field-equation order {1}")]
    TruncationTooSmall(u32, u32),
    #[error("sector flags inconsistent: {0}")]
    InconsistentFlags(String),
    #[error("the differential is not homogeneous in polynomial degree")]
    InhomogeneousDifferential,
    #[error("the generator is not nilpotent; cohomology is undefined")]
    NotNilpotent,
}

/// What a generator is, for reports and grading sanity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    Field,
    FieldMomentum,
    LongAntifield,
    LongMomentum,
    ElAntifield,
    ElMomentum,
    CompatAntifield,
    CompatMomentum,
    NoetherAntifield,
    NoetherMomentum,
    Einbein,
    EinbeinMomentum,
    Velocity,
    VelocityMomentum,
    GeoAntifield,
    GeoMomentum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Coord,
    Momentum,
}

/// One generator of the complex.
#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub species: Species,
    pub kind: Kind,
    pub parity: Parity,
    pub ghost: i32,
    pub momentum: i32,
    /// index of the conjugate generator
    pub partner: usize,
}

/// A monomial: sorted flat list of generator indices (fermionic
/// generators appear at most once).
pub type SMono = Vec<usize>;

/// Polynomial in the generators with rational coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SPoly {
    pub terms: BTreeMap<SMono, Rat>,
}

impl SPoly {
    pub fn zero() -> Self {
        SPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        let mut t = BTreeMap::new();
        t.insert(vec![], Rat::one());
        SPoly { terms: t }
    }

    pub fn gen(g: usize) -> Self {
        let mut t = BTreeMap::new();
        t.insert(vec![g], Rat::one());
        SPoly { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: SMono, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, rhs: &SPoly) -> SPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &SPoly) -> SPoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> SPoly {
        SPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &Rat) -> SPoly {
        if c.is_zero() {
            return SPoly::zero();
        }
        SPoly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }
}

/// The assembled complex: generators, the odd generator's terms, and the
/// derived differential table.
pub struct KtComplex {
    pub gens: Vec<Generator>,
    /// `Q = sum_k S_k c_k`
    pub q_terms: Vec<(SPoly, usize)>,
    /// `[Q, g}` per generator
    pub delta: Vec<SPoly>,
}

impl KtComplex {
    fn is_fermionic(&self, g: usize) -> bool {
        self.gens[g].parity == Parity::Fermionic
    }

    fn mono_parity(&self, m: &SMono) -> u32 {
        m.iter().filter(|&&g| self.is_fermionic(g)).count() as u32 % 2
    }

    /// Product of canonical monomials with the Koszul sign; `None` when a
    /// fermionic generator squares to zero.
    fn mono_mul(&self, a: &SMono, b: &SMono) -> Option<(SMono, Rat)> {
        let mut out = a.clone();
        let mut sign = Rat::one();
        for &g in b {
            let pos = out.partition_point(|&h| h <= g);
            if self.is_fermionic(g) {
                if pos > 0 && out[pos - 1] == g {
                    return None;
                }
                let fermions_after =
                    out[pos..].iter().filter(|&&h| self.is_fermionic(h)).count();
                if fermions_after % 2 == 1 {
                    sign = -sign;
                }
            }
            out.insert(pos, g);
        }
        Some((out, sign))
    }

    pub fn poly_mul(&self, a: &SPoly, b: &SPoly) -> SPoly {
        let mut out = SPoly::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((m, sign)) = self.mono_mul(ma, mb) {
                    out.add_term(m, ca * cb * sign);
                }
            }
        }
        out
    }

    /// Fundamental bracket of two generators: `[g, h}`.
    fn pair_value(&self, g: usize, h: usize) -> Rat {
        if self.gens[g].partner != h {
            return Rat::zero();
        }
        match (self.gens[g].kind, self.gens[g].parity) {
            (Kind::Momentum, _) => Rat::one(),
            // bosonic [x, p] = -1, fermionic {x, p} = +1
            (Kind::Coord, Parity::Bosonic) => -Rat::one(),
            (Kind::Coord, Parity::Fermionic) => Rat::one(),
        }
    }

    /// `[g, v}` for a single generator against a monomial.
    fn bracket_gen_mono(&self, g: usize, v: &SMono) -> SPoly {
        let mut out = SPoly::zero();
        let g_ferm = self.is_fermionic(g);
        let mut prefix_parity = 0u32;
        for (i, &h) in v.iter().enumerate() {
            let pv = self.pair_value(g, h);
            if !pv.is_zero() {
                let mut rest = v.clone();
                rest.remove(i);
                let sign =
                    if g_ferm && prefix_parity == 1 { -Rat::one() } else { Rat::one() };
                out.add_term(rest, pv * sign);
            }
            if self.is_fermionic(h) {
                prefix_parity ^= 1;
            }
        }
        out
    }

    /// `[u, v}` for monomials, by graded Leibniz in the first argument:
    /// `[g u', v} = g [u', v} + (-1)^{|u'||v|} [g, v} u'`.
    fn bracket_mono_mono(&self, u: &SMono, v: &SMono) -> SPoly {
        if u.is_empty() {
            return SPoly::zero();
        }
        let g = u[0];
        let u_rest: SMono = u[1..].to_vec();
        let mut out = SPoly::zero();
        let inner = self.bracket_mono_mono(&u_rest, v);
        out = out.add(&self.poly_mul(&SPoly::gen(g), &inner));
        let sign = if self.mono_parity(&u_rest) * self.mono_parity(v) == 1 {
            -Rat::one()
        } else {
            Rat::one()
        };
        let gv = self.bracket_gen_mono(g, v);
        let mut u_rest_poly = SPoly::zero();
        u_rest_poly.add_term(u_rest, Rat::one());
        out = out.add(&self.poly_mul(&gv, &u_rest_poly).scale(&sign));
        out
    }

    /// Graded Poisson bracket of polynomials.
    pub fn pbracket(&self, a: &SPoly, b: &SPoly) -> SPoly {
        let mut out = SPoly::zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out = out.add(&self.bracket_mono_mono(ma, mb).scale(&(ca * cb)));
            }
        }
        out
    }

    fn q_poly(&self) -> SPoly {
        let mut q = SPoly::zero();
        for (s, c) in &self.q_terms {
            q = q.add(&self.poly_mul(s, &SPoly::gen(*c)));
        }
        q
    }

    /// The differential: `delta x = [Q, x}` extended as an odd derivation.
    pub fn apply_delta(&self, x: &SPoly) -> SPoly {
        let mut out = SPoly::zero();
        for (m, c) in &x.terms {
            let mut prefix_parity = 0u32;
            for (i, &g) in m.iter().enumerate() {
                let img = &self.delta[g];
                if !img.is_zero() {
                    let left: SMono = m[..i].to_vec();
                    let right: SMono = m[i + 1..].to_vec();
                    let sign =
                        if prefix_parity == 1 { -Rat::one() } else { Rat::one() };
                    let mut left_poly = SPoly::zero();
                    left_poly.add_term(left, Rat::one());
                    let mut right_poly = SPoly::zero();
                    right_poly.add_term(right, Rat::one());
                    let piece =
                        self.poly_mul(&self.poly_mul(&left_poly, img), &right_poly);
                    out = out.add(&piece.scale(&(c * sign)));
                }
                if self.is_fermionic(g) {
                    prefix_parity ^= 1;
                }
            }
        }
        out
    }

    /// Ghost number of a monomial.
    pub fn ghost(&self, m: &SMono) -> i32 {
        m.iter().map(|&g| self.gens[g].ghost).sum()
    }

    /// Momentum number of a monomial (additive over factors).
    pub fn momentum(&self, m: &SMono) -> i32 {
        m.iter().map(|&g| self.gens[g].momentum).sum()
    }

    /// Exact nilpotency: `[Q, [Q, g}} = 0` for every generator. Because
    /// the bracket with `Q` is an odd derivation, this is equivalent to
    /// the square vanishing on the whole algebra.
    pub fn check_nilpotent(&self) -> bool {
        (0..self.gens.len()).all(|g| self.apply_delta(&self.delta[g]).is_zero())
    }

    /// Is the differential homogeneous in polynomial degree?
    fn degree_homogeneous(&self) -> bool {
        self.delta
            .iter()
            .all(|img| img.is_zero() || img.terms.keys().all(|m| m.len() == 1))
    }

    /// All monomials of total degree exactly `d` (fermions square to zero).
    fn monomials_of_degree(&self, d: usize) -> Vec<SMono> {
        if d == 0 {
            return vec![vec![]];
        }
        let mut out: Vec<SMono> = vec![vec![]];
        for _ in 0..d {
            let mut next = Vec::new();
            for m in &out {
                let start = m.last().copied().unwrap_or(0);
                for g in start..self.gens.len() {
                    if self.is_fermionic(g) && m.last() == Some(&g) {
                        continue;
                    }
                    let mut ext = m.clone();
                    ext.push(g);
                    next.push(ext);
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    }

    /// Cohomology dimensions per bidegree (ghost, momentum), accumulated
    /// over polynomial degrees up to `max_degree`. Requires a
    /// degree-homogeneous, nilpotent differential.
    pub fn cohomology_dims(
        &self,
        max_degree: usize,
    ) -> Result<BTreeMap<(i32, i32), usize>, KtError> {
        if !self.check_nilpotent() {
            return Err(KtError::NotNilpotent);
        }
        if !self.degree_homogeneous() {
            return Err(KtError::InhomogeneousDifferential);
        }
        let mut dims: BTreeMap<(i32, i32), usize> = BTreeMap::new();
        for d in 0..=max_degree {
            let monos = self.monomials_of_degree(d);
            let mut buckets: BTreeMap<(i32, i32), Vec<SMono>> = BTreeMap::new();
            for m in monos {
                buckets
                    .entry((self.ghost(&m), self.momentum(&m)))
                    .or_default()
                    .push(m);
            }
            for ((g, l), basis) in &buckets {
                let target = buckets.get(&(g + 1, *l)).cloned().unwrap_or_default();
                let source = buckets.get(&(g - 1, *l)).cloned().unwrap_or_default();
                let out_rank = self.delta_rank(basis, &target);
                let in_rank = self.delta_rank(&source, basis);
                let h = basis.len() - out_rank - in_rank;
                if h > 0 {
                    *dims.entry((*g, *l)).or_insert(0) += h;
                }
            }
        }
        Ok(dims)
    }

    fn delta_matrix(&self, source: &[SMono], target: &[SMono]) -> Mat<Rat> {
        let index: BTreeMap<&SMono, usize> =
            target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mat = Mat::zeros(target.len(), source.len());
        for (col, src) in source.iter().enumerate() {
            let mut x = SPoly::zero();
            x.add_term(src.clone(), Rat::one());
            let img = self.apply_delta(&x);
            for (mono, c) in &img.terms {
                let row = *index
                    .get(mono)
                    .expect("differential image stays inside the degree slice");
                *mat.at_mut(row, col) = c.clone();
            }
        }
        mat
    }

    fn delta_rank(&self, source: &[SMono], target: &[SMono]) -> usize {
        if source.is_empty() || target.is_empty() {
            return 0;
        }
        rank(&self.delta_matrix(source, target))
    }

    /// Independent nilpotency check at the matrix level: the square of the
    /// differential vanishes on the whole degree slice.
    pub fn delta_square_vanishes_on_degree(&self, d: usize) -> bool {
        self.monomials_of_degree(d).iter().all(|m| {
            let mut x = SPoly::zero();
            x.add_term(m.clone(), Rat::one());
            self.apply_delta(&self.apply_delta(&x)).is_zero()
        })
    }
}

/// Classification of a state against the differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateClass {
    NonPhysical,
    PhysicalExact,
    PhysicalNontrivial,
}

impl KtComplex {
    /// The state-side differential: the bracket action restricted to
    /// coordinate polynomials (momentum factors annihilate the frozen
    /// vacuum, so only the contraction terms survive).
    pub fn coordinate_delta(&self, v: &SPoly) -> SPoly {
        let full = self.apply_delta(v);
        SPoly {
            terms: full
                .terms
                .into_iter()
                .filter(|(m, _)| m.iter().all(|&g| self.gens[g].kind == Kind::Coord))
                .collect(),
        }
    }

    /// Classify a coordinate polynomial — a state of the frozen Fock
    /// sector: outside the kernel of the differential, an image, or a
    /// nontrivial cohomology class.
    pub fn physical_state_check(&self, v: &SPoly) -> StateClass {
        let dv = self.coordinate_delta(v);
        if !dv.is_zero() {
            return StateClass::NonPhysical;
        }
        if v.is_zero() {
            return StateClass::PhysicalExact;
        }
        let degrees: Vec<usize> = {
            let mut d: Vec<usize> = v.terms.keys().map(|m| m.len()).collect();
            d.sort_unstable();
            d.dedup();
            d
        };
        let ghosts: Vec<i32> = {
            let mut g: Vec<i32> = v.terms.keys().map(|m| self.ghost(m)).collect();
            g.sort_unstable();
            g.dedup();
            g
        };
        let mut source = Vec::new();
        for d in &degrees {
            for m in self.monomials_of_degree(*d) {
                if m.iter().any(|&g| self.gens[g].kind == Kind::Momentum) {
                    continue;
                }
                if ghosts.contains(&(self.ghost(&m) + 1)) {
                    source.push(m);
                }
            }
        }
        let mut target: Vec<SMono> = v.terms.keys().cloned().collect();
        for src in &source {
            let mut x = SPoly::zero();
            x.add_term(src.clone(), Rat::one());
            for mono in self.coordinate_delta(&x).terms.keys() {
                target.push(mono.clone());
            }
        }
        target.sort();
        target.dedup();
        let index: BTreeMap<&SMono, usize> =
            target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mat = Mat::zeros(target.len(), source.len());
        for (col, src) in source.iter().enumerate() {
            let mut x = SPoly::zero();
            x.add_term(src.clone(), Rat::one());
            for (mono, c) in &self.coordinate_delta(&x).terms {
                *mat.at_mut(index[mono], col) = c.clone();
            }
        }
        let mut tgt = vec![Rat::zero(); target.len()];
        for (mono, c) in &v.terms {
            tgt[index[mono]] = c.clone();
        }
        if solve_in_span(&mat, &tgt).is_some() {
            StateClass::PhysicalExact
        } else {
            StateClass::PhysicalNontrivial
        }
    }

    /// Dual pairing of a momentum-side word with a coordinate-side word:
    /// apply the momenta as graded contractions and take the constant
    /// term. Nonzero pairings balance the ghost numbers to zero.
    pub fn pairing(&self, bra: &SPoly, ket: &SPoly) -> Rat {
        let mut acc = Rat::zero();
        for (mb, cb) in &bra.terms {
            let mut state = ket.clone();
            for &g in mb.iter().rev() {
                let mut next = SPoly::zero();
                for (mk, ck) in &state.terms {
                    let img = self.bracket_gen_mono(g, mk);
                    next = next.add(&img.scale(ck));
                }
                state = next;
            }
            acc += cb * state.terms.get(&vec![]).cloned().unwrap_or_else(Rat::zero);
        }
        acc
    }
}

/// Shipped toy actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Preset {
    /// `S = 1/2 Int phi^2`: every jet is its own field equation.
    Auxiliary,
    /// one-dimensional oscillator: jets of `-phi'' - phi`.
    Harmonic,
    /// two-dimensional wave operator.
    FreeScalar,
    /// a gauge pair in one dimension with one exact identity per jet.
    ToyU1,
}

pub use crate::charges::LongitudinalVariant;

/// Sector switches for [`build_q`].
#[derive(Clone, Debug)]
pub struct KtOptions {
    pub longitudinal: bool,
    pub compat: bool,
    pub variant: LongitudinalVariant,
    pub geodesic: bool,
    pub noether: bool,
    /// deliberately corrupt the identity kernel (regression guard)
    pub corrupt_noether: bool,
}

impl Default for KtOptions {
    fn default() -> Self {
        KtOptions {
            longitudinal: false,
            compat: false,
            variant: LongitudinalVariant::Dd2,
            geodesic: false,
            noether: false,
            corrupt_noether: false,
        }
    }
}

/// Taylor coefficients of the field equations of a single-family toy
/// action: for each multi-index within range, the equation jet as a
/// combination of field jets. The auxiliary action gives `E_m = phi_m`;
/// the oscillator `E_m = -phi_{m+2} - phi_m`; the wave operator
/// `E_m = -phi_{m+2e0} + phi_{m+2e1}`.
pub fn el_jets(
    preset: Preset,
    p: u32,
) -> Result<Vec<(MultiIndex, Vec<(MultiIndex, Rat)>)>, KtError> {
    let o = match preset {
        Preset::Auxiliary => 0,
        _ => 2,
    };
    if p < o {
        return Err(KtError::TruncationTooSmall(p, o));
    }
    let n = match preset {
        Preset::FreeScalar => 2,
        _ => 1,
    };
    let mut out = Vec::new();
    for m in enumerate(n, p - o) {
        let jets: Vec<(MultiIndex, Rat)> = match preset {
            Preset::Auxiliary => vec![(m.clone(), Rat::one())],
            Preset::Harmonic => vec![
                (m.add(&MultiIndex(vec![2])), -Rat::one()),
                (m.clone(), -Rat::one()),
            ],
            Preset::FreeScalar => vec![
                (m.add(&MultiIndex(vec![2, 0])), -Rat::one()),
                (m.add(&MultiIndex(vec![0, 2])), Rat::one()),
            ],
            Preset::ToyU1 => vec![
                (m.add(&MultiIndex(vec![2])), -Rat::one()),
            ],
        };
        out.push((m, jets));
    }
    Ok(out)
}

struct Builder {
    gens: Vec<Generator>,
    by_name: BTreeMap<String, usize>,
}

impl Builder {
    fn new() -> Self {
        Builder { gens: Vec::new(), by_name: BTreeMap::new() }
    }

    fn pair(
        &mut self,
        name: &str,
        species: (Species, Species),
        parity: Parity,
        ghost: i32,
    ) -> (usize, usize) {
        let ci = self.gens.len();
        let mi = ci + 1;
        self.gens.push(Generator {
            name: name.into(),
            species: species.0,
            kind: Kind::Coord,
            parity,
            ghost,
            momentum: 0,
            partner: mi,
        });
        self.gens.push(Generator {
            name: format!("{name}^"),
            species: species.1,
            kind: Kind::Momentum,
            parity,
            ghost: -ghost,
            momentum: 1,
            partner: ci,
        });
        self.by_name.insert(name.into(), ci);
        (ci, mi)
    }

    fn idx(&self, name: &str) -> usize {
        self.by_name[name]
    }
}

/// Assemble the total generator for a preset: the longitudinal sector,
/// the field-equation sector, the compatibility sector coupling the two
/// towers, the optional mass-shell sector and (for the gauge pair) the
/// identity sector with its second-order antifield.
pub fn build_q(preset: Preset, p: u32, options: &KtOptions) -> Result<KtComplex, KtError> {
    if options.compat && !options.longitudinal {
        return Err(KtError::InconsistentFlags(
            "compatibility sector requires the longitudinal sector".into(),
        ));
    }
    if options.noether && preset != Preset::ToyU1 {
        return Err(KtError::InconsistentFlags(
            "identity sector only ships with the gauge-pair preset".into(),
        ));
    }
    if preset == Preset::ToyU1 && (options.longitudinal || options.compat) {
        return Err(KtError::InconsistentFlags(
            "the gauge-pair preset ships with equation and identity sectors only".into(),
        ));
    }
    let n = match preset {
        Preset::FreeScalar => 2,
        _ => 1,
    };
    let o: u32 = match preset {
        Preset::Auxiliary => 0,
        _ => 2,
    };
    if p < o {
        return Err(KtError::TruncationTooSmall(p, o));
    }

    let mut b = Builder::new();
    let dd2 = options.longitudinal && options.variant == LongitudinalVariant::Dd2;

    for m in enumerate(n, p) {
        b.pair(
            &format!("phi{m:?}"),
            (Species::Field, Species::FieldMomentum),
            Parity::Bosonic,
            0,
        );
    }
    if preset == Preset::ToyU1 {
        for m in enumerate(n, p) {
            b.pair(
                &format!("a{m:?}"),
                (Species::Field, Species::FieldMomentum),
                Parity::Bosonic,
                0,
            );
        }
    }
    if dd2 {
        b.pair("eprime", (Species::Einbein, Species::EinbeinMomentum), Parity::Bosonic, 0);
        b.pair("einv", (Species::Einbein, Species::EinbeinMomentum), Parity::Bosonic, 0);
        b.pair(
            "einv*",
            (Species::ElAntifield, Species::ElMomentum),
            Parity::Fermionic,
            -1,
        );
    }
    if options.longitudinal {
        for m in enumerate(n, p - 1) {
            b.pair(
                &format!("beta{m:?}"),
                (Species::LongAntifield, Species::LongMomentum),
                Parity::Fermionic,
                -1,
            );
        }
    }
    match preset {
        Preset::ToyU1 => {
            for m in enumerate(1, p - 2) {
                b.pair(
                    &format!("phi*{m:?}"),
                    (Species::ElAntifield, Species::ElMomentum),
                    Parity::Fermionic,
                    -1,
                );
            }
            for m in enumerate(1, p - 1) {
                b.pair(
                    &format!("a*{m:?}"),
                    (Species::ElAntifield, Species::ElMomentum),
                    Parity::Fermionic,
                    -1,
                );
            }
            if options.noether {
                for m in enumerate(1, p - 2) {
                    b.pair(
                        &format!("b{m:?}"),
                        (Species::NoetherAntifield, Species::NoetherMomentum),
                        Parity::Bosonic,
                        -2,
                    );
                }
            }
        }
        _ => {
            for m in enumerate(n, p - o) {
                b.pair(
                    &format!("phi*{m:?}"),
                    (Species::ElAntifield, Species::ElMomentum),
                    Parity::Fermionic,
                    -1,
                );
            }
        }
    }
    if options.compat && p >= o + 1 {
        for m in enumerate(n, p - o - 1) {
            b.pair(
                &format!("bstar{m:?}"),
                (Species::CompatAntifield, Species::CompatMomentum),
                Parity::Bosonic,
                -2,
            );
        }
    }
    if options.geodesic {
        for mu in 0..n {
            b.pair(
                &format!("u{mu}"),
                (Species::Velocity, Species::VelocityMomentum),
                Parity::Bosonic,
                0,
            );
        }
        if !dd2 {
            b.pair("eprime", (Species::Einbein, Species::EinbeinMomentum), Parity::Bosonic, 0);
        }
        b.pair("e*", (Species::GeoAntifield, Species::GeoMomentum), Parity::Fermionic, -1);
    }

    let helper = KtComplex { gens: b.gens.clone(), q_terms: vec![], delta: vec![] };
    let mut q_terms: Vec<(SPoly, usize)> = Vec::new();
    let phi = |b: &Builder, m: &MultiIndex| SPoly::gen(b.idx(&format!("phi{m:?}")));

    // longitudinal constraints: background unit velocity along the first
    // coordinate; the second variant multiplies by the inverse einbein
    if options.longitudinal {
        let e0 = MultiIndex::unit(n, 0);
        for m in enumerate(n, p - 1) {
            let base = phi(&b, &m.add(&e0)).neg();
            let s = if dd2 {
                helper.poly_mul(&SPoly::gen(b.idx("einv")), &base)
            } else {
                base
            };
            let gamma = b.gens[b.idx(&format!("beta{m:?}"))].partner;
            q_terms.push((s, gamma));
        }
    }
    if dd2 {
        // inverse-einbein elimination: einv (1 + eprime) - 1 = 0
        let einv = SPoly::gen(b.idx("einv"));
        let eprime = SPoly::gen(b.idx("eprime"));
        let s = einv.add(&helper.poly_mul(&einv, &eprime)).sub(&SPoly::one());
        let mom = b.gens[b.idx("einv*")].partner;
        q_terms.push((s, mom));
    }

    // field-equation constraints
    match preset {
        Preset::ToyU1 => {
            let a = |b: &Builder, m: &MultiIndex| SPoly::gen(b.idx(&format!("a{m:?}")));
            let one = MultiIndex(vec![1]);
            let two = MultiIndex(vec![2]);
            for m in enumerate(1, p - 2) {
                // E_phi = -(phi_{m+2} - a_{m+1})
                let s = phi(&b, &m.add(&two)).neg().add(&a(&b, &m.add(&one)));
                let mom = b.gens[b.idx(&format!("phi*{m:?}"))].partner;
                q_terms.push((s, mom));
            }
            for m in enumerate(1, p - 1) {
                // E_a = phi_{m+1} - a_m
                let s = phi(&b, &m.add(&one)).sub(&a(&b, &m));
                let mom = b.gens[b.idx(&format!("a*{m:?}"))].partner;
                q_terms.push((s, mom));
            }
            if options.noether {
                // identity E_phi,m + E_a,m+1 = 0: the closed combination
                // phi*_m + a*_{m+1} becomes exact
                for m in enumerate(1, p - 2) {
                    let sign =
                        if options.corrupt_noether { -Rat::one() } else { Rat::one() };
                    let s = SPoly::gen(b.idx(&format!("phi*{m:?}"))).add(
                        &SPoly::gen(b.idx(&format!("a*{:?}", m.add(&one)))).scale(&sign),
                    );
                    let mom = b.gens[b.idx(&format!("b{m:?}"))].partner;
                    q_terms.push((s, mom));
                }
            }
        }
        _ => {
            for (m, jets) in el_jets(preset, p)? {
                let mut s = SPoly::zero();
                for (jet, c) in jets {
                    s = s.add(&phi(&b, &jet).scale(&c));
                }
                let mom = b.gens[b.idx(&format!("phi*{m:?}"))].partner;
                q_terms.push((s, mom));
            }
        }
    }

    // compatibility sector: kills the closed combination of equation
    // antifields and longitudinal antifields (with the einbein dressing
    // when the second variant is in force)
    if options.compat && p >= o + 1 {
        let e0 = MultiIndex::unit(n, 0);
        for m in enumerate(n, p - o - 1) {
            let fstar = SPoly::gen(b.idx(&format!("phi*{:?}", m.add(&e0))));
            let mut s = if dd2 {
                helper.poly_mul(&SPoly::gen(b.idx("einv")), &fstar)
            } else {
                fstar
            };
            match preset {
                Preset::Harmonic => {
                    let two = MultiIndex(vec![2]);
                    s = s.sub(&SPoly::gen(b.idx(&format!("beta{:?}", m.add(&two)))));
                    s = s.sub(&SPoly::gen(b.idx(&format!("beta{m:?}"))));
                }
                Preset::FreeScalar => {
                    let e00 = MultiIndex(vec![2, 0]);
                    let e11 = MultiIndex(vec![0, 2]);
                    s = s.sub(&SPoly::gen(b.idx(&format!("beta{:?}", m.add(&e00)))));
                    s = s.add(&SPoly::gen(b.idx(&format!("beta{:?}", m.add(&e11)))));
                }
                Preset::Auxiliary => {
                    // order zero: E_{m+e0} = -D_m, so the closed partner is
                    // the longitudinal antifield at m itself
                    s = s.add(&SPoly::gen(b.idx(&format!("beta{m:?}"))));
                }
                Preset::ToyU1 => unreachable!(),
            }
            let mom = b.gens[b.idx(&format!("bstar{m:?}"))].partner;
            q_terms.push((s, mom));
        }
    }

    // mass-shell sector of the einbein: u.u - (1 + eprime)^2
    if options.geodesic {
        let mut uu = SPoly::zero();
        for mu in 0..n {
            let u = SPoly::gen(b.idx(&format!("u{mu}")));
            uu = uu.add(&helper.poly_mul(&u, &u));
        }
        let eprime = SPoly::gen(b.idx("eprime"));
        let one_plus = SPoly::one().add(&eprime);
        let sq = helper.poly_mul(&one_plus, &one_plus);
        let s = uu.sub(&sq).scale(&rat(1, 2));
        let mom = b.gens[b.idx("e*")].partner;
        q_terms.push((s, mom));
    }

    let mut complex = KtComplex { gens: b.gens, q_terms, delta: vec![] };
    let q = complex.q_poly();
    complex.delta = (0..complex.gens.len())
        .map(|g| complex.pbracket(&q, &SPoly::gen(g)))
        .collect();
    Ok(complex)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims_at(dims: &BTreeMap<(i32, i32), usize>, g: i32, l: i32) -> usize {
        dims.get(&(g, l)).copied().unwrap_or(0)
    }

    #[test]
    fn el_jets_examples() {
        // auxiliary: E_m = phi_m for all |m| <= p
        let jets = el_jets(Preset::Auxiliary, 2).unwrap();
        assert_eq!(jets.len(), 3);
        // oscillator: E_m = -phi_{m+2} - phi_m for |m| <= p-2
        let jets = el_jets(Preset::Harmonic, 4).unwrap();
        assert_eq!(jets.len(), 3);
        let (m0, combo) = &jets[0];
        assert_eq!(m0, &MultiIndex(vec![0]));
        assert!(combo.contains(&(MultiIndex(vec![2]), -Rat::one())));
        assert!(combo.contains(&(MultiIndex(vec![0]), -Rat::one())));
        // wave operator pattern
        let jets = el_jets(Preset::FreeScalar, 3).unwrap();
        let (_, combo) = &jets[0];
        assert!(combo.contains(&(MultiIndex(vec![2, 0]), -Rat::one())));
        assert!(combo.contains(&(MultiIndex(vec![0, 2]), Rat::one())));
        // too small a truncation errors
        assert!(matches!(
            el_jets(Preset::Harmonic, 1),
            Err(KtError::TruncationTooSmall(1, 2))
        ));
    }

    #[test]
    fn gradings_of_q() {
        let c = build_q(Preset::Harmonic, 3, &KtOptions::default()).unwrap();
        for (g, img) in c.delta.iter().enumerate() {
            for m in img.terms.keys() {
                assert_eq!(c.ghost(m), c.gens[g].ghost + 1, "gh at {}", c.gens[g].name);
                assert_eq!(c.momentum(m), c.gens[g].momentum, "mom at {}", c.gens[g].name);
            }
        }
        // every term of the generator carries ghost +1 and momentum +1
        for (s, mom) in &c.q_terms {
            for m in s.terms.keys() {
                assert_eq!(c.ghost(m) + c.gens[*mom].ghost, 1);
                assert_eq!(c.momentum(m) + c.gens[*mom].momentum, 1);
            }
        }
    }

    #[test]
    fn nilpotency_all_presets() {
        let mut combos: Vec<(Preset, KtOptions)> = vec![
            (Preset::Auxiliary, KtOptions::default()),
            (Preset::Harmonic, KtOptions::default()),
            (Preset::FreeScalar, KtOptions::default()),
            (Preset::ToyU1, KtOptions::default()),
            (Preset::ToyU1, KtOptions { noether: true, ..KtOptions::default() }),
        ];
        for variant in [LongitudinalVariant::Dd1, LongitudinalVariant::Dd2] {
            combos.push((
                Preset::Harmonic,
                KtOptions { longitudinal: true, compat: true, variant, ..KtOptions::default() },
            ));
            combos.push((
                Preset::FreeScalar,
                KtOptions { longitudinal: true, compat: true, variant, ..KtOptions::default() },
            ));
        }
        combos.push((Preset::Harmonic, KtOptions { geodesic: true, ..KtOptions::default() }));
        for (preset, options) in combos {
            let c = build_q(preset, 3, &options).unwrap();
            assert!(c.check_nilpotent(), "{preset:?} {options:?}");
            for d in 0..=2 {
                assert!(
                    c.delta_square_vanishes_on_degree(d),
                    "{preset:?} {options:?} degree {d}"
                );
            }
        }
    }

    #[test]
    fn corrupted_identity_kernel_breaks_nilpotency() {
        let c = build_q(
            Preset::ToyU1,
            3,
            &KtOptions { noether: true, corrupt_noether: true, ..KtOptions::default() },
        )
        .unwrap();
        assert!(!c.check_nilpotent());
    }

    #[test]
    fn auxiliary_resolution_in_bidegree_zero() {
        let c = build_q(Preset::Auxiliary, 0, &KtOptions::default()).unwrap();
        let dims = c.cohomology_dims(3).unwrap();
        assert_eq!(dims_at(&dims, 0, 0), 1);
        assert_eq!(dims.len(), 1, "cohomology concentrated in (0,0): {dims:?}");
        let c = build_q(Preset::Auxiliary, 2, &KtOptions::default()).unwrap();
        let dims = c.cohomology_dims(2).unwrap();
        assert_eq!(dims_at(&dims, 0, 0), 1);
        assert_eq!(dims.len(), 1, "{dims:?}");
    }

    #[test]
    fn harmonic_cauchy_data_survive() {
        // equations kill all but the two Cauchy jets: constants plus two
        // jets at polynomial degree one
        let c = build_q(Preset::Harmonic, 3, &KtOptions::default()).unwrap();
        let dims = c.cohomology_dims(1).unwrap();
        assert_eq!(dims_at(&dims, 0, 0), 3);
        assert!(dims.keys().all(|(g, _)| *g >= 0), "{dims:?}");
    }

    #[test]
    fn no_negative_ghost_cohomology_in_resolved_presets() {
        for (preset, options) in [
            (Preset::Auxiliary, KtOptions::default()),
            (Preset::Harmonic, KtOptions::default()),
            (Preset::ToyU1, KtOptions { noether: true, ..KtOptions::default() }),
        ] {
            let c = build_q(preset, 3, &options).unwrap();
            let dims = c.cohomology_dims(2).unwrap();
            assert!(dims.keys().all(|(g, _)| *g >= 0), "{preset:?}: {dims:?}");
        }
    }

    #[test]
    fn identity_sector_kills_negative_ghost_cohomology() {
        // without the second-order antifield the closed combination
        // phi*_m + a*_{m+1} survives at ghost -1
        let without = build_q(Preset::ToyU1, 3, &KtOptions::default()).unwrap();
        let dims = without.cohomology_dims(1).unwrap();
        assert!(dims.keys().any(|(g, _)| *g < 0), "{dims:?}");
        let with =
            build_q(Preset::ToyU1, 3, &KtOptions { noether: true, ..KtOptions::default() })
                .unwrap();
        let dims = with.cohomology_dims(1).unwrap();
        assert!(dims.keys().all(|(g, _)| *g >= 0), "{dims:?}");
    }

    #[test]
    fn geodesic_sector_is_nilpotent_but_inhomogeneous() {
        let c = build_q(
            Preset::Harmonic,
            2,
            &KtOptions { geodesic: true, ..KtOptions::default() },
        )
        .unwrap();
        assert!(c.check_nilpotent());
        assert!(matches!(
            c.cohomology_dims(2),
            Err(KtError::InhomogeneousDifferential)
        ));
    }

    #[test]
    fn physical_state_classification() {
        let c = build_q(Preset::Auxiliary, 1, &KtOptions::default()).unwrap();
        // the vacuum is physical and no equation image hits it
        assert_eq!(
            c.physical_state_check(&SPoly::one()),
            StateClass::PhysicalNontrivial
        );
        // any image is physical-exact
        let af = (0..c.gens.len())
            .find(|&g| c.gens[g].species == Species::ElAntifield)
            .unwrap();
        let image = c.delta[af].clone();
        assert_eq!(c.physical_state_check(&image), StateClass::PhysicalExact);
        // a field jet dies in cohomology (it is an equation image)
        let field = (0..c.gens.len())
            .find(|&g| c.gens[g].species == Species::Field)
            .unwrap();
        assert_eq!(
            c.physical_state_check(&SPoly::gen(field)),
            StateClass::PhysicalExact
        );
        // an antifield itself is not closed
        assert_eq!(c.physical_state_check(&SPoly::gen(af)), StateClass::NonPhysical);
    }

    #[test]
    fn pairing_balances_ghost_numbers() {
        let c = build_q(Preset::Harmonic, 3, &KtOptions::default()).unwrap();
        let af = (0..c.gens.len())
            .find(|&g| c.gens[g].species == Species::ElAntifield)
            .unwrap();
        let af_mom = c.gens[af].partner;
        // matched pairing: a momentum word against its conjugate coordinate
        let bra = SPoly::gen(af_mom);
        let ket = SPoly::gen(af);
        assert!(!c.pairing(&bra, &ket).is_zero());
        // mismatched ghost pairing vanishes
        let field = (0..c.gens.len())
            .find(|&g| c.gens[g].species == Species::Field)
            .unwrap();
        assert!(c.pairing(&bra, &SPoly::gen(field)).is_zero());
        for mb in bra.terms.keys() {
            for mk in ket.terms.keys() {
                if !c.pairing(&bra, &ket).is_zero() {
                    assert_eq!(c.ghost(mb) + c.ghost(mk), 0);
                }
            }
        }
    }

    #[test]
    fn harmonic_with_towers_collapses_cohomology() {
        // longitudinal plus equation towers kill every jet: only the
        // constants survive at the vacuum bidegree
        let c = build_q(
            Preset::Harmonic,
            3,
            &KtOptions {
                longitudinal: true,
                compat: true,
                variant: LongitudinalVariant::Dd1,
                ..KtOptions::default()
            },
        )
        .unwrap();
        let dims = c.cohomology_dims(1).unwrap();
        assert_eq!(dims_at(&dims, 0, 0), 1, "{dims:?}");
    }
}
