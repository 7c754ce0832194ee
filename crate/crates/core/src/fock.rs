//! Exact Fock-space oracle for normal-ordered bilinear operators.
//!
//! States are finite rational combinations of creation-operator words over
//! a labelled fiber of conjugate pairs `(phi_i, pi^i)` with Fourier modes.
//! The vacuum conventions split the modes asymmetrically:
//!
//! ```text
//! phi_i(r) |0> = 0  for r <  0        <0| phi_i(r) = 0  for r >= 0
//! pi^i(r)  |0> = 0  for r <= 0        <0| pi^i(r)  = 0  for r >  0
//! ```
//!
//! so `phi(r >= 0)` and `pi(r >= 1)` create. The graded bracket is
//! `[pi^i(r), phi_j(s)} = d^i_j d_{r+s,0}`. Normal ordering puts
//! annihilators to the right; bilinears built that way act exactly on any
//! finite state because every creation window at a fixed mode shift is
//! finite. Commutator anomalies are therefore finite sums of double
//! contractions, computed here with no cutoff and no regularization.

use crate::linalg::Mat;
use crate::scalar::{rat_int, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("mode cutoff exceeded: state reaches mode {0}, cutoff {1}")]
    CutoffExceeded(i64, i64),
    #[error("mode cutoff {0} too small; need at least {1}")]
    CutoffTooSmall(i64, i64),
    #[error("jet-operator entry is not real at the evaluation point")]
    NotReal,
}

/// Grassmann parity of a fiber slot.
pub use crate::repkit::Parity;

/// One conjugate pair in the fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub parity: Parity,
}

/// The labelled fiber: an ordered list of conjugate pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fiber {
    pub slots: Vec<Slot>,
}

impl Fiber {
    pub fn new(slots: Vec<Slot>) -> Self {
        Fiber { slots }
    }

    pub fn bosonic(names: &[&str]) -> Self {
        Fiber {
            slots: names
                .iter()
                .map(|n| Slot { name: (*n).into(), parity: Parity::Bosonic })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }
}

/// Coordinate side or momentum side of a conjugate pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Coord,
    Mom,
}

/// A single creation/annihilation operator label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModeLabel {
    pub slot: usize,
    pub side: Side,
    pub mode: i64,
}

impl ModeLabel {
    pub fn phi(slot: usize, mode: i64) -> Self {
        ModeLabel { slot, side: Side::Coord, mode }
    }

    pub fn pi(slot: usize, mode: i64) -> Self {
        ModeLabel { slot, side: Side::Mom, mode }
    }

    /// Does this operator annihilate the ket vacuum?
    pub fn is_annihilator(&self) -> bool {
        match self.side {
            Side::Coord => self.mode < 0,
            Side::Mom => self.mode <= 0,
        }
    }
}

/// Sorted word of creation operators.
pub type Word = Vec<ModeLabel>;

/// A finite exact state: map from creation words to amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    pub terms: BTreeMap<Word, Rat>,
}

impl FockState {
    pub fn zero() -> Self {
        FockState { terms: BTreeMap::new() }
    }

    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Rat::one());
        FockState { terms }
    }

    pub fn single(label: ModeLabel) -> Self {
        assert!(!label.is_annihilator(), "single() takes a creation label");
        let mut terms = BTreeMap::new();
        terms.insert(vec![label], Rat::one());
        FockState { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vacuum_amplitude(&self) -> Rat {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, word: Word, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn add(&self, rhs: &FockState) -> FockState {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> FockState {
        if c.is_zero() {
            return FockState::zero();
        }
        FockState {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &FockState) -> FockState {
        self.add(&rhs.scale(&rat_int(-1)))
    }

    pub fn max_abs_mode(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|w| w.iter().map(|l| l.mode.abs()))
            .max()
            .unwrap_or(0)
    }
}

fn is_fermionic(fiber: &Fiber, label: &ModeLabel) -> bool {
    fiber.slots[label.slot].parity == Parity::Fermionic
}

/// Graded bracket value `[x, y}` for conjugate labels, zero otherwise.
fn bracket_value(fiber: &Fiber, x: &ModeLabel, y: &ModeLabel) -> Rat {
    if x.slot != y.slot || x.mode + y.mode != 0 || x.side == y.side {
        return Rat::zero();
    }
    match (x.side, is_fermionic(fiber, x)) {
        // [pi(r), phi(-r)} = +1 in both statistics
        (Side::Mom, _) => Rat::one(),
        // bosonic [phi, pi] = -1; fermionic {phi, pi} = +1
        (Side::Coord, false) => -Rat::one(),
        (Side::Coord, true) => Rat::one(),
    }
}

/// Apply one raw operator to a state (the operator itself, from the left).
fn apply_label(fiber: &Fiber, label: &ModeLabel, state: &FockState) -> FockState {
    let mut out = FockState::zero();
    let label_ferm = is_fermionic(fiber, label);
    for (word, coeff) in &state.terms {
        if label.is_annihilator() {
            // move right through the word, contracting where possible;
            // an annihilator reaching the vacuum gives nothing
            let mut sign = Rat::one();
            for (k, other) in word.iter().enumerate() {
                let b = bracket_value(fiber, label, other);
                if !b.is_zero() {
                    let mut reduced = word.clone();
                    reduced.remove(k);
                    out.add_term(reduced, coeff * &b * &sign);
                }
                if label_ferm && is_fermionic(fiber, other) {
                    sign = -sign;
                }
            }
        } else {
            // creation: insert into the sorted word with a Koszul sign
            if label_ferm && word.iter().any(|o| o == label) {
                continue; // fermionic square is zero
            }
            let pos = word.partition_point(|o| *o < *label);
            let mut sign = Rat::one();
            if label_ferm {
                let fermions_before =
                    word[..pos].iter().filter(|o| is_fermionic(fiber, o)).count();
                if fermions_before % 2 == 1 {
                    sign = -sign;
                }
            }
            let mut grown = word.clone();
            grown.insert(pos, *label);
            out.add_term(grown, coeff * &sign);
        }
    }
    out
}

/// One normal-ordered quadratic term `c :phi_i(a) pi^j(b):` applied to a
/// state. Annihilators act first; reordering two fermionic labels flips
/// the sign.
fn apply_pair(
    fiber: &Fiber,
    coeff: &Rat,
    phi: ModeLabel,
    pi: ModeLabel,
    state: &FockState,
) -> FockState {
    debug_assert_eq!(phi.side, Side::Coord);
    debug_assert_eq!(pi.side, Side::Mom);
    let (first, second, sign) = if phi.is_annihilator() && !pi.is_annihilator() {
        // reorder: :phi pi: = (+-) pi phi
        let s = if is_fermionic(fiber, &phi) && is_fermionic(fiber, &pi) {
            -Rat::one()
        } else {
            Rat::one()
        };
        (phi, pi, s)
    } else {
        (pi, phi, Rat::one())
    };
    let mid = apply_label(fiber, &first, state);
    let done = apply_label(fiber, &second, &mid);
    done.scale(&(coeff * &sign))
}

/// A normal-ordered bilinear operator over the fiber:
///
/// ```text
/// B = sum_{i,j} sum_r (a[i][j] + b[i][j] r) :phi_i(r) pi^j(shift - r):
/// ```
///
/// Currents take `a = M`, `b = 0`; Virasoro-type generators take a
/// diagonal `a = lambda m`, `b = 1` with `shift = -m`.
#[derive(Clone, Debug)]
pub struct BilinearOperator {
    pub fiber: Fiber,
    pub shift: i64,
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Vec<Rat>>,
}

impl BilinearOperator {
    /// Current-type operator with matrix `m` and Fourier shift `shift`.
    pub fn current(fiber: Fiber, m: Vec<Vec<Rat>>, shift: i64) -> Self {
        let d = fiber.dim();
        assert_eq!(m.len(), d);
        let b = vec![vec![Rat::zero(); d]; d];
        BilinearOperator { fiber, shift, a: m, b }
    }

    /// Virasoro generator at mode `m` for a diagonal system of weights:
    /// `V_m = sum_i sum_r (l_i m + r) :phi_i(r) pi^i(-m - r):`.
    ///
    /// Positive modes annihilate the vacuum, matching the lowest-energy
    /// split of the mode conventions.
    pub fn virasoro(fiber: Fiber, weights: &[Rat], m: i64) -> Self {
        let d = fiber.dim();
        assert_eq!(weights.len(), d);
        let mut a = vec![vec![Rat::zero(); d]; d];
        let mut b = vec![vec![Rat::zero(); d]; d];
        for i in 0..d {
            a[i][i] = &weights[i] * rat_int(m);
            b[i][i] = Rat::one();
        }
        BilinearOperator { fiber, shift: -m, a, b }
    }

    fn coeff(&self, i: usize, j: usize, r: i64) -> Rat {
        &self.a[i][j] + &self.b[i][j] * rat_int(r)
    }

    fn entry_nonzero(&self, i: usize, j: usize) -> bool {
        !self.a[i][j].is_zero() || !self.b[i][j].is_zero()
    }

    /// Exact image of a state. Every sum over the internal mode is finite:
    /// the creation-creation window is `0 <= r <= shift - 1`, and every
    /// other term must contract against a mode present in the state.
    pub fn apply(&self, state: &FockState) -> FockState {
        let mut out = FockState::zero();
        for (word, amp) in &state.terms {
            let single = FockState {
                terms: [(word.clone(), amp.clone())].into_iter().collect(),
            };
            for i in 0..self.fiber.dim() {
                for j in 0..self.fiber.dim() {
                    if !self.entry_nonzero(i, j) {
                        continue;
                    }
                    let mut candidates: Vec<i64> = Vec::new();
                    // creation x creation window
                    for r in 0..self.shift.max(0) {
                        candidates.push(r);
                    }
                    for l in word.iter() {
                        // pi(shift - r) contracts phi_j(u) in the word
                        if l.slot == j && l.side == Side::Coord {
                            candidates.push(l.mode + self.shift);
                        }
                        // phi_i(r) contracts pi^i(v) in the word
                        if l.slot == i && l.side == Side::Mom {
                            candidates.push(-l.mode);
                        }
                    }
                    candidates.sort_unstable();
                    candidates.dedup();
                    for r in candidates {
                        let phi = ModeLabel::phi(i, r);
                        let pi = ModeLabel::pi(j, self.shift - r);
                        // pure creation pairs only inside the window
                        if !phi.is_annihilator()
                            && !pi.is_annihilator()
                            && !(r >= 0 && r <= self.shift - 1)
                        {
                            continue;
                        }
                        let c = self.coeff(i, j, r);
                        if c.is_zero() {
                            continue;
                        }
                        out = out.add(&apply_pair(&self.fiber, &c, phi, pi, &single));
                    }
                }
            }
        }
        out
    }

    /// [`BilinearOperator::apply`] guarded by a mode cutoff: errors if the
    /// state's support plus the operator shift would leave the window.
    pub fn apply_with_cutoff(
        &self,
        state: &FockState,
        cutoff: i64,
    ) -> Result<FockState, FockError> {
        let reach = state.max_abs_mode() + self.shift.abs();
        if reach > cutoff {
            return Err(FockError::CutoffExceeded(reach, cutoff));
        }
        Ok(self.apply(state))
    }
}

/// Vacuum expectation of the commutator `[A, B]`. The classical image of
/// the bracket is normal ordered, so its vacuum value vanishes and this is
/// exactly the commutator anomaly.
pub fn commutator_vacuum(a: &BilinearOperator, b: &BilinearOperator) -> Rat {
    let ab = a.apply(&b.apply(&FockState::vacuum()));
    let ba = b.apply(&a.apply(&FockState::vacuum()));
    ab.vacuum_amplitude() - ba.vacuum_amplitude()
}

/// Anomaly of two current-type operators at mode `m`:
/// `<0| [A_m, B_{-m}] |0>`, an exact rational. For currents this comes out
/// linear in `m` with slope `str(ab)`.
pub fn anomaly(fiber: &Fiber, a: &[Vec<Rat>], b: &[Vec<Rat>], m: i64) -> Rat {
    let op_a = BilinearOperator::current(fiber.clone(), a.to_vec(), m);
    let op_b = BilinearOperator::current(fiber.clone(), b.to_vec(), -m);
    commutator_vacuum(&op_a, &op_b)
}

/// Fit `A(m) = (c/12)(m^3 - m) + 2 h m` from measurements at `m = 1, 2`.
fn solve_c_h(a1: &Rat, a2: &Rat) -> (Rat, Rat) {
    // A(1) = 2h; A(2) = c/2 + 4h
    let h = a1 / rat_int(2);
    let c = rat_int(2) * (a2 - rat_int(2) * a1);
    (c, h)
}

/// One weighted pair family in a free system.
#[derive(Clone, Debug)]
pub struct WeightedPair {
    pub lambda: Rat,
    pub parity: Parity,
    pub multiplicity: u32,
}

/// Measure the Virasoro central charge of a free system of conjugate
/// pairs: build the weighted generators, measure `<0|[L_m, L_{-m}]|0>` at
/// `m = 1, 2`, eliminate the vacuum weight and return `c`. When the cutoff
/// allows, a third mode checks the cubic shape.
pub fn virasoro_charge(system: &[WeightedPair], cutoff: i64) -> Result<Rat, FockError> {
    if cutoff < 2 {
        return Err(FockError::CutoffTooSmall(cutoff, 2));
    }
    let mut slots = Vec::new();
    let mut weights = Vec::new();
    for (k, pair) in system.iter().enumerate() {
        for c in 0..pair.multiplicity {
            slots.push(Slot { name: format!("pair{k}.{c}"), parity: pair.parity });
            weights.push(pair.lambda.clone());
        }
    }
    let fiber = Fiber::new(slots);
    let measure = |m: i64| -> Rat {
        let vm = BilinearOperator::virasoro(fiber.clone(), &weights, m);
        let vmm = BilinearOperator::virasoro(fiber.clone(), &weights, -m);
        commutator_vacuum(&vm, &vmm)
    };
    let a1 = measure(1);
    let a2 = measure(2);
    let (c, h) = solve_c_h(&a1, &a2);
    if cutoff >= 3 {
        // consistency of the cubic shape at a third mode:
        // A(3) = (c/12) * 24 + 6h
        let a3 = measure(3);
        let predicted = &c * rat_int(2) + rat_int(6) * &h;
        assert_eq!(a3, predicted, "commutator anomaly is not of Virasoro shape");
    }
    Ok(c)
}

/// Outcome of the convention self-checks.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VacuumReport {
    pub ket_split_ok: bool,
    pub one_point_functions_vanish: bool,
    pub mode_one_central_term_absent: bool,
    pub shift_invariance_ok: bool,
}

impl VacuumReport {
    pub fn all_ok(&self) -> bool {
        self.ket_split_ok
            && self.one_point_functions_vanish
            && self.mode_one_central_term_absent
            && self.shift_invariance_ok
    }
}

/// Verify the mode-splitting conventions and their consequences: the
/// annihilation windows, vanishing one-point functions, the absence of the
/// cubic central term at mode one, and insensitivity of the measured
/// bracket anomaly to the constant shift of a weight-one variable (the
/// shift only adds a linear tadpole, which has no vacuum overlap in a
/// bilinear commutator).
pub fn vacuum_conventions_check() -> VacuumReport {
    let fiber = Fiber::bosonic(&["e"]);
    let vac = FockState::vacuum();

    let mut ket_split_ok = true;
    for r in -3..=3i64 {
        let phi_kills = apply_label(&fiber, &ModeLabel::phi(0, r), &vac).is_zero();
        let pi_kills = apply_label(&fiber, &ModeLabel::pi(0, r), &vac).is_zero();
        ket_split_ok &= phi_kills == (r < 0);
        ket_split_ok &= pi_kills == (r <= 0);
    }

    let mut one_point_ok = true;
    for r in -3..=3i64 {
        let image = apply_label(&fiber, &ModeLabel::phi(0, r), &vac);
        one_point_ok &= image.vacuum_amplitude().is_zero();
    }

    // <0|[L_1, L_{-1}]|0> = 2h exactly: the (m^3 - m) factor vanishes
    let weights = vec![Rat::one()];
    let v1 = BilinearOperator::virasoro(fiber.clone(), &weights, 1);
    let v1m = BilinearOperator::virasoro(fiber.clone(), &weights, -1);
    let a1 = commutator_vacuum(&v1, &v1m);
    let v2 = BilinearOperator::virasoro(fiber.clone(), &weights, 2);
    let v2m = BilinearOperator::virasoro(fiber.clone(), &weights, -2);
    let a2 = commutator_vacuum(&v2, &v2m);
    let (c, h) = solve_c_h(&a1, &a2);
    let mode_one_ok = a1 == rat_int(2) * &h && c == rat_int(2);

    // shifted variable: the inhomogeneous linear tadpole of e = 1 + e'
    // adds single-creation cross terms with no vacuum component
    let linear = |m: i64| {
        let mut st = FockState::zero();
        if m > 0 {
            st.add_term(vec![ModeLabel::pi(0, m)], rat_int(m));
        }
        st
    };
    let shifted_commutator = |m: i64| -> Rat {
        let vm = BilinearOperator::virasoro(fiber.clone(), &weights, m);
        let vmm = BilinearOperator::virasoro(fiber.clone(), &weights, -m);
        let base = commutator_vacuum(&vm, &vmm);
        let cross = vm.apply(&linear(-m)).vacuum_amplitude()
            - vmm.apply(&linear(m)).vacuum_amplitude();
        base + cross
    };
    let shift_ok = shifted_commutator(2) == a2 && shifted_commutator(1) == a1;

    VacuumReport {
        ket_split_ok,
        one_point_functions_vanish: one_point_ok,
        mode_one_central_term_absent: mode_one_ok,
        shift_invariance_ok: shift_ok,
    }
}

/// Evaluate a jet-operator matrix at a rational point and flatten it into
/// a current matrix over the full fiber (slots ordered block-major, then
/// component, then jet index).
pub fn current_matrix_from_jet(
    jm: &crate::jetops::JetMatrix,
    point: &[Rat],
) -> Result<(Fiber, Vec<Vec<Rat>>), FockError> {
    let gpoint: Vec<crate::scalar::GaussRat> = point
        .iter()
        .map(|r| crate::scalar::GaussRat::from_rat(r.clone()))
        .collect();
    let mut slots = Vec::new();
    for (bi, block) in jm.blocks.iter().enumerate() {
        for v in 0..block.vdim {
            for jet in &jm.jets {
                slots.push(Slot {
                    name: format!("b{bi}.v{v}.{jet:?}"),
                    parity: block.parity,
                });
            }
        }
    }
    let fiber = Fiber::new(slots);
    let d = fiber.dim();
    let mut m = vec![vec![Rat::zero(); d]; d];
    let mut base = 0usize;
    for block in &jm.blocks {
        let jets = jm.jets.len();
        for v in 0..block.vdim {
            for w in 0..block.vdim {
                for mi in 0..jets {
                    for ni in 0..jets {
                        let val = block.entries[mi][ni].at(v, w).eval(&gpoint);
                        if !val.is_real() {
                            return Err(FockError::NotReal);
                        }
                        if val.re.is_zero() {
                            continue;
                        }
                        let row = base + v * jets + mi;
                        let col = base + w * jets + ni;
                        m[row][col] = val.re.clone();
                    }
                }
            }
        }
        base += block.vdim * jets;
    }
    Ok((fiber, m))
}

/// Fiber supertrace of a matrix product, `str(ab)`, for comparison with
/// commutator anomalies.
pub fn supertrace_product(fiber: &Fiber, a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Rat {
    let am = Mat::from_rows(a.to_vec());
    let bm = Mat::from_rows(b.to_vec());
    let prod = am.mul(&bm);
    let mut acc = Rat::zero();
    for i in 0..fiber.dim() {
        let sign = fiber.slots[i].parity.sign();
        acc += sign * prod.at(i, i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn normal_ordered_on_vacuum() {
        // any operator with pure annihilation content kills the vacuum
        let fiber = Fiber::bosonic(&["q"]);
        let op = BilinearOperator::current(fiber, vec![vec![Rat::one()]], -2);
        assert!(op.apply(&FockState::vacuum()).is_zero());
    }

    #[test]
    fn number_operator_eigenstate() {
        let fiber = Fiber::bosonic(&["q"]);
        let state = FockState::single(ModeLabel::phi(0, 3));
        let op = BilinearOperator::current(fiber, vec![vec![Rat::one()]], 0);
        assert_eq!(op.apply(&state), state);
    }

    #[test]
    fn weighted_zero_mode_measures_the_mode() {
        // V_0 on a mode-r coordinate state gives r times the state (l = 0)
        let fiber = Fiber::bosonic(&["q"]);
        let op = BilinearOperator::virasoro(fiber, &[Rat::zero()], 0);
        let state = FockState::single(ModeLabel::phi(0, 4));
        assert_eq!(op.apply(&state), state.scale(&rat_int(4)));
    }

    #[test]
    fn anomaly_examples() {
        // bosonic 1-dim identity: m str(AB) = m
        let fiber = Fiber::bosonic(&["q"]);
        let one = vec![vec![Rat::one()]];
        assert_eq!(anomaly(&fiber, &one, &one, 1), Rat::one());
        assert_eq!(anomaly(&fiber, &one, &one, 0), Rat::zero());
        assert_eq!(anomaly(&fiber, &one, &one, 3), rat_int(3));
        // fermionic 1-dim identity: str counts fermions negative
        let ferm = Fiber::new(vec![Slot { name: "psi".into(), parity: Parity::Fermionic }]);
        assert_eq!(anomaly(&ferm, &one, &one, 1), rat_int(-1));
        assert_eq!(anomaly(&ferm, &one, &one, 2), rat_int(-2));
    }

    #[test]
    fn anomaly_antisymmetry() {
        let fiber = Fiber::bosonic(&["a", "b"]);
        let m1 = vec![vec![Rat::one(), rat_int(2)], vec![rat_int(-1), rat_int(3)]];
        let m2 = vec![vec![rat_int(2), Rat::zero()], vec![Rat::one(), rat_int(-2)]];
        for m in 0..=3i64 {
            let lhs = anomaly(&fiber, &m1, &m2, m);
            let rhs = -anomaly(&fiber, &m2, &m1, -m);
            assert_eq!(lhs, rhs, "m={m}");
        }
    }

    #[test]
    fn anomaly_is_linear_in_mode_for_currents() {
        let fiber = Fiber::bosonic(&["a", "b"]);
        let m1 = vec![vec![Rat::one(), rat_int(2)], vec![rat_int(-1), rat_int(3)]];
        let m2 = vec![vec![rat_int(2), Rat::one()], vec![Rat::zero(), rat_int(-2)]];
        let s = supertrace_product(&fiber, &m1, &m2);
        for m in 0..=3i64 {
            assert_eq!(anomaly(&fiber, &m1, &m2, m), rat_int(m) * &s);
        }
    }

    #[test]
    fn virasoro_charges_of_free_pairs() {
        // one bosonic lambda = 0 pair: c = 2
        let c = virasoro_charge(
            &[WeightedPair { lambda: Rat::zero(), parity: Parity::Bosonic, multiplicity: 1 }],
            3,
        )
        .unwrap();
        assert_eq!(c, rat_int(2));
        // N bosonic pairs: 2N
        let c = virasoro_charge(
            &[WeightedPair { lambda: Rat::zero(), parity: Parity::Bosonic, multiplicity: 3 }],
            3,
        )
        .unwrap();
        assert_eq!(c, rat_int(6));
        // einbein system: lambda = 1 gives 2
        let c = virasoro_charge(
            &[WeightedPair { lambda: Rat::one(), parity: Parity::Bosonic, multiplicity: 1 }],
            3,
        )
        .unwrap();
        assert_eq!(c, rat_int(2));
        // lambda = 1/2: 2(1 - 6l + 6l^2) = -1
        let c = virasoro_charge(
            &[WeightedPair { lambda: rat(1, 2), parity: Parity::Bosonic, multiplicity: 1 }],
            3,
        )
        .unwrap();
        assert_eq!(c, rat_int(-1));
        // fermionic pair flips the sign
        let c = virasoro_charge(
            &[WeightedPair { lambda: rat(1, 2), parity: Parity::Fermionic, multiplicity: 1 }],
            3,
        )
        .unwrap();
        assert_eq!(c, Rat::one());
        // additivity over independent subsystems
        let c = virasoro_charge(
            &[
                WeightedPair { lambda: Rat::zero(), parity: Parity::Bosonic, multiplicity: 2 },
                WeightedPair { lambda: Rat::one(), parity: Parity::Bosonic, multiplicity: 1 },
            ],
            3,
        )
        .unwrap();
        assert_eq!(c, rat_int(6));
    }

    #[test]
    fn cutoff_errors() {
        assert!(matches!(
            virasoro_charge(
                &[WeightedPair {
                    lambda: Rat::zero(),
                    parity: Parity::Bosonic,
                    multiplicity: 1
                }],
                1,
            ),
            Err(FockError::CutoffTooSmall(..))
        ));
        let fiber = Fiber::bosonic(&["q"]);
        let op = BilinearOperator::current(fiber, vec![vec![Rat::one()]], 5);
        let state = FockState::single(ModeLabel::phi(0, 4));
        assert!(op.apply_with_cutoff(&state, 3).is_err());
        assert!(op.apply_with_cutoff(&state, 20).is_ok());
    }

    #[test]
    fn vacuum_report_all_green() {
        let report = vacuum_conventions_check();
        assert!(report.all_ok(), "{report:?}");
    }
}
