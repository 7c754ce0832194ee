//! Sparse exact polynomials: multivariate over a generic field and
//! univariate over the rationals (used for symbolic truncation orders).

use crate::multiindex::MultiIndex;
use crate::scalar::{Field, Rat};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse multivariate polynomial with exponent-vector keys.
///
/// The variable universe is positional; what the variables mean (spacetime
/// coordinates, jet symbols, ...) is up to the caller.
#[derive(Clone, PartialEq, Eq)]
pub struct MPoly<F: Field> {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, F>,
}

impl<F: Field> fmt::Debug for MPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?}", c)?;
            for (v, e) in exp.iter().enumerate() {
                if *e > 0 {
                    write!(f, "*x{}^{}", v, e)?;
                }
            }
        }
        Ok(())
    }
}

impl<F: Field> MPoly<F> {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, v: usize) -> Self {
        let mut exp = vec![0; nvars];
        exp[v] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(exp, F::one());
        p
    }

    pub fn monomial(nvars: usize, exp: Vec<u32>, c: F) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: F) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = o.get().add(&c);
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(vac) => {
                vac.insert(c);
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exp, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k.mul(c)))
                .collect(),
        }
    }

    /// Partial derivative in variable `v`.
    pub fn deriv(&self, v: usize) -> Self {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[v] -= 1;
            // exponent as a field element, built by repeated addition
            let mult = (1..e[v]).fold(F::one(), |acc, _| acc.add(&F::one()));
            out.add_term(exp, c.mul(&mult));
        }
        out
    }

    /// Iterated partial derivative along a multi-index.
    pub fn deriv_multi(&self, m: &MultiIndex) -> Self {
        let mut p = self.clone();
        for (v, &k) in m.0.iter().enumerate() {
            for _ in 0..k {
                p = p.deriv(v);
            }
        }
        p
    }

    /// Evaluate at a point.
    pub fn eval(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.nvars);
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term.mul(&point[v]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }
}

/// Univariate polynomial over the rationals, dense in a sparse map.
/// These represent charge values as exact polynomials in the truncation
/// order `p`.
#[derive(Clone, PartialEq, Eq)]
pub struct UPoly {
    /// degree -> coefficient, no zero entries
    pub coeffs: BTreeMap<u32, Rat>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})p^{}", c, d)?;
        }
        Ok(())
    }
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: BTreeMap::new() }
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = UPoly::zero();
        if !c.is_zero() {
            p.coeffs.insert(0, c);
        }
        p
    }

    /// The variable itself.
    pub fn var() -> Self {
        let mut p = UPoly::zero();
        p.coeffs.insert(1, Rat::one());
        p
    }

    /// The variable shifted by an integer: `p + shift`.
    pub fn var_shifted(shift: i64) -> Self {
        let mut p = UPoly::zero();
        p.coeffs.insert(1, Rat::one());
        let c = Rat::from_integer(shift.into());
        if !c.is_zero() {
            p.coeffs.insert(0, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.coeffs.values().next_back()
    }

    pub fn coeff(&self, d: u32) -> Rat {
        self.coeffs.get(&d).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, d: u32, c: Rat) {
        if c.is_zero() {
            return;
        }
        let v = self.coeff(d) + c;
        if v.is_zero() {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, v);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in &rhs.coeffs {
            out.add_term(*d, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        UPoly {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = UPoly::zero();
        for (da, ca) in &self.coeffs {
            for (db, cb) in &rhs.coeffs {
                out.add_term(da + db, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return UPoly::zero();
        }
        UPoly {
            coeffs: self.coeffs.iter().map(|(d, k)| (*d, k * c)).collect(),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (d, c) in self.coeffs.iter().rev() {
            let mut pow = Rat::one();
            for _ in 0..*d {
                pow *= x;
            }
            acc += c * pow;
        }
        acc
    }

    /// Substitute `p -> p + shift`.
    pub fn compose_shift(&self, shift: i64) -> Self {
        let x = UPoly::var_shifted(shift);
        let mut acc = UPoly::zero();
        for (d, c) in &self.coeffs {
            let mut pow = UPoly::constant(Rat::one());
            for _ in 0..*d {
                pow = pow.mul(&x);
            }
            acc = acc.add(&pow.scale(c));
        }
        acc
    }

    /// The polynomial `C(N + p + a, p + b)` in the symbolic variable `p`,
    /// for integer offsets: the product form
    /// `prod_{i=1}^{N+a-b} (p + b + i) / (N + a - b)!`.
    ///
    /// This is the polynomial that agrees with the binomial convention at
    /// every integer `p >= max(0, -b)`.
    pub fn binomial_in_p(n: i64, a: i64, b: i64) -> Self {
        let top = n + a - b;
        if top < 0 {
            return UPoly::zero();
        }
        let mut acc = UPoly::constant(Rat::one());
        for i in 1..=top {
            acc = acc.mul(&UPoly::var_shifted(b + i));
        }
        let mut fact = Rat::one();
        for i in 2..=top {
            fact *= Rat::from_integer(i.into());
        }
        acc.scale(&fact.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{binomial, rat_int};

    #[test]
    fn mpoly_derivative_and_eval() {
        // f(x, y) = x^2 y + 3 y
        let x = MPoly::<Rat>::var(2, 0);
        let y = MPoly::<Rat>::var(2, 1);
        let f = x.mul(&x).mul(&y).add(&y.scale(&rat_int(3)));
        let fx = f.deriv(0);
        // df/dx = 2 x y
        assert_eq!(fx, x.mul(&y).scale(&rat_int(2)));
        let v = f.eval(&[rat_int(2), rat_int(5)]);
        assert_eq!(v, rat_int(4 * 5 + 15));
    }

    #[test]
    fn upoly_binomial_matches_integer_values() {
        // C(N+p, p-2) with N=3 against direct evaluation for p = 0..10
        let q = UPoly::binomial_in_p(3, 0, -2);
        for p in 0..=10i64 {
            let expect = Rat::from_integer(binomial(3 + p, p - 2));
            assert_eq!(q.eval(&rat_int(p)), expect, "p={p}");
        }
    }

    #[test]
    fn upoly_shift_composition() {
        let q = UPoly::binomial_in_p(2, 0, 0); // C(2+p, p)
        let shifted = q.compose_shift(-1); // C(1+p, p-1) as a polynomial
        for p in 1..=8i64 {
            let expect = Rat::from_integer(binomial(2 + p - 1, p - 1));
            assert_eq!(shifted.eval(&rat_int(p)), expect);
        }
    }
}
