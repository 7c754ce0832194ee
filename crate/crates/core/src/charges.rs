//! The abelian-charge calculus.
//!
//! Seven charges `c_1..c_7` label the extension terms of the extended
//! diffeomorphism/gauge/reparametrization algebra. Their values for a
//! truncated jet module are polynomial expressions in binomial coefficients
//! and the representation invariants of the field content. This module
//! carries the base tables, the dimension-lowering reduction, the
//! per-sector model accounting, the large-truncation asymptotics and the
//! finiteness scanner.
//!
//! Every function exists in two forms: exact numeric (integer truncation
//! order, binomials with the negative-argument-is-zero convention) and
//! symbolic (polynomials in the truncation order `p`, valid for `p` large
//! enough that no shifted argument goes negative).

use crate::poly::UPoly;
use crate::repkit::{
    block_params_direct, GaugeAlgebra, GaugeIrrep, GlIrrep, Parity, RepError, RepParams, RepSpec,
    SpeciesBlock,
};
use crate::scalar::{binomial, rat_int, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChargeError {
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("model inconsistency: {0}")]
    Inconsistent(String),
    #[error("operation requires a symbolic truncation order")]
    NeedsSymbolicOrder,
    #[error("operation requires a numeric truncation order")]
    NeedsNumericOrder,
}

/// The seven abelian charges as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeVector {
    pub c: [Rat; 7],
}

impl ChargeVector {
    pub fn zero() -> Self {
        ChargeVector { c: std::array::from_fn(|_| Rat::zero()) }
    }

    pub fn add(&self, rhs: &ChargeVector) -> ChargeVector {
        ChargeVector { c: std::array::from_fn(|j| &self.c[j] + &rhs.c[j]) }
    }

    pub fn sub(&self, rhs: &ChargeVector) -> ChargeVector {
        ChargeVector { c: std::array::from_fn(|j| &self.c[j] - &rhs.c[j]) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

/// The seven charges as polynomials in the truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct ChargePolyVector {
    pub c: [UPoly; 7],
}

impl ChargePolyVector {
    pub fn zero() -> Self {
        ChargePolyVector { c: std::array::from_fn(|_| UPoly::zero()) }
    }

    pub fn add(&self, rhs: &ChargePolyVector) -> ChargePolyVector {
        ChargePolyVector { c: std::array::from_fn(|j| self.c[j].add(&rhs.c[j])) }
    }

    pub fn sub(&self, rhs: &ChargePolyVector) -> ChargePolyVector {
        ChargePolyVector { c: std::array::from_fn(|j| self.c[j].sub(&rhs.c[j])) }
    }

    pub fn eval(&self, p: i64) -> ChargeVector {
        let x = rat_int(p);
        ChargeVector { c: std::array::from_fn(|j| self.c[j].eval(&x)) }
    }
}

fn bino(n: i64, k: i64) -> Rat {
    Rat::from_integer(binomial(n, k))
}

/// Field contribution to the charges at truncation `p` in dimension
/// argument `n_arg`, for a representation with invariants `params` and
/// causal weight `lambda`:
///
/// ```text
/// c1 = C k1 + C' sd
/// c2 = C k2 + (N+1)/N C'' sd - 2 C' k0
/// c3 = (2l - 1)(C k0 - C' sd)
/// c4 = 2(1 - 6l + 6l^2) C sd
/// c5 = -C y
/// c6 = (2l - 1) C z
/// c7 = C' z - C kz
/// ```
///
/// with `C = C(N+p, p)`, `C' = C(N+p, p-1)`, `C'' = C(N+p, p-2)`, all zero
/// for negative lower argument. Negative `p` gives the zero vector.
pub fn c_phi(p: i64, n_arg: i64, params: &RepParams, lambda: &Rat) -> ChargeVector {
    let c = bino(n_arg + p, p);
    let c1b = bino(n_arg + p, p - 1);
    let c2b = bino(n_arg + p, p - 2);
    c_phi_from_binomials(&c, &c1b, &c2b, n_arg, params, lambda)
}

fn c_phi_from_binomials(
    c: &Rat,
    c1b: &Rat,
    c2b: &Rat,
    n_arg: i64,
    params: &RepParams,
    lambda: &Rat,
) -> ChargeVector {
    assert!(n_arg >= 1, "dimension argument must be at least 1");
    let two = rat_int(2);
    let lam_lin = lambda * &two - Rat::one(); // 2l - 1
    let lam_quad = two.clone() * (Rat::one() - rat_int(6) * lambda + rat_int(6) * lambda * lambda);
    let ratio = rat_int(n_arg + 1) / rat_int(n_arg);
    ChargeVector {
        c: [
            c * &params.k1 + c1b * &params.sd,
            c * &params.k2 + &ratio * c2b * &params.sd - &two * c1b * &params.k0,
            &lam_lin * (c * &params.k0 - c1b * &params.sd),
            &lam_quad * c * &params.sd,
            -(c * &params.y),
            &lam_lin * c * &params.z,
            c1b * &params.z - c * &params.kz,
        ],
    }
}

/// Symbolic version of [`c_phi`]: charges as polynomials in `p`, with the
/// truncation argument shifted by `shift` (so the result represents
/// `c_phi(p + shift, n_arg, ...)`). Valid wherever `p + shift >= 0`.
pub fn c_phi_sym(n_arg: i64, params: &RepParams, lambda: &Rat, shift: i64) -> ChargePolyVector {
    assert!(n_arg >= 1, "dimension argument must be at least 1");
    let c = UPoly::binomial_in_p(n_arg, shift, shift);
    let c1b = UPoly::binomial_in_p(n_arg, shift, shift - 1);
    let c2b = UPoly::binomial_in_p(n_arg, shift, shift - 2);
    let two = rat_int(2);
    let lam_lin = lambda * &two - Rat::one();
    let lam_quad = two.clone() * (Rat::one() - rat_int(6) * lambda + rat_int(6) * lambda * lambda);
    let ratio = rat_int(n_arg + 1) / rat_int(n_arg);
    ChargePolyVector {
        c: [
            c.scale(&params.k1).add(&c1b.scale(&params.sd)),
            c.scale(&params.k2)
                .add(&c2b.scale(&(&ratio * &params.sd)))
                .sub(&c1b.scale(&(&two * &params.k0))),
            c.scale(&(&lam_lin * &params.k0))
                .sub(&c1b.scale(&(&lam_lin * &params.sd))),
            c.scale(&(&lam_quad * &params.sd)),
            c.scale(&params.y).neg(),
            c.scale(&(&lam_lin * &params.z)),
            c1b.scale(&params.z).sub(&c.scale(&params.kz)),
        ],
    }
}

/// Trajectory contribution: `(1, 0, 1, 2N, 0, 0, 0)`.
pub fn c_q(n: i64) -> ChargeVector {
    ChargeVector {
        c: [
            Rat::one(),
            Rat::zero(),
            Rat::one(),
            rat_int(2 * n),
            Rat::zero(),
            Rat::zero(),
            Rat::zero(),
        ],
    }
}

/// Einbein contribution: only `c4 = 2(1 - 6l + 6l^2)`.
pub fn c_e(lambda: &Rat) -> ChargeVector {
    let mut v = ChargeVector::zero();
    v.c[3] = rat_int(2) * (Rat::one() - rat_int(6) * lambda + rat_int(6) * lambda * lambda);
    v
}

/// The dimension-lowering reduction
/// `c~_j(p, N; rho, l) = c_j(p, N+1; rho, l) - c_j(p-1, N+1; rho, l)`.
///
/// It equals `c_j(p, N; rho, l)` for every `j != 2`; this is a theorem
/// (tested, not assumed), so the function is implemented by its defining
/// difference.
pub fn c_tilde(p: i64, n_arg: i64, params: &RepParams, lambda: &Rat) -> ChargeVector {
    c_phi(p, n_arg + 1, params, lambda).sub(&c_phi(p - 1, n_arg + 1, params, lambda))
}

/// Symbolic version of [`c_tilde`] with a shift in `p`.
pub fn c_tilde_sym(
    n_arg: i64,
    params: &RepParams,
    lambda: &Rat,
    shift: i64,
) -> ChargePolyVector {
    c_phi_sym(n_arg + 1, params, lambda, shift)
        .sub(&c_phi_sym(n_arg + 1, params, lambda, shift - 1))
}

/// The three counterterm normalization functions:
///
/// ```text
/// u1 = -l (C k0 - C' sd),  u2 = -l z C,  u3 = (l - l^2)/2 sd C
/// ```
pub fn u_funcs(p: i64, n_arg: i64, params: &RepParams, lambda: &Rat) -> (Rat, Rat, Rat) {
    let c = bino(n_arg + p, p);
    let c1b = bino(n_arg + p, p - 1);
    let u1 = -lambda * (&c * &params.k0 - &c1b * &params.sd);
    let u2 = -lambda * &params.z * &c;
    let u3 = (lambda - lambda * lambda) / rat_int(2) * &params.sd * &c;
    (u1, u2, u3)
}

/// The reduction identity for the counterterms:
/// `u_j(p, N) - u_j(p-1, N) = u_j(p, N-1)`.
pub fn verify_u_reduction(p: i64, n_arg: i64, params: &RepParams, lambda: &Rat) -> bool {
    if n_arg < 2 {
        return true;
    }
    let (a1, a2, a3) = u_funcs(p, n_arg, params, lambda);
    let (b1, b2, b3) = u_funcs(p - 1, n_arg, params, lambda);
    let (r1, r2, r3) = u_funcs(p, n_arg - 1, params, lambda);
    a1 - b1 == r1 && a2 - b2 == r2 && a3 - b3 == r3
}

/// Which version of the longitudinal constraint the model uses. The two
/// are classically equivalent but give inequivalent modules; the default
/// throughout is the einbein-dressed second variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum LongitudinalVariant {
    /// plain time derivative; the antifield tower carries weight `l + 1`
    Dd1,
    /// einbein-dressed, weight-preserving variant (the default)
    Dd2,
}

/// Noether sectors that can contribute antifield towers.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub enum NoetherSector {
    Diff,
    Rep,
    Gauge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum NoetherAntifields {
    Keep,
    Dismiss,
}

/// Truncation order: a concrete integer or the formal variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    Numeric(i64),
    Symbolic,
}

/// A complete model: dimension, truncation, field content and sector flags.
///
/// The default flag set (everything enabled, second longitudinal variant)
/// reproduces the full constrained accounting; disabling the constraint
/// sectors one by one recovers the unconstrained module charges
/// `c_q + c_e + c_phi`.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub rep: RepSpec,
    pub p: Truncation,
    pub variant: LongitudinalVariant,
    pub include_trajectory: bool,
    pub include_einbein: bool,
    /// longitudinal antifield tower enabled
    pub longitudinal: bool,
    /// field-equation and compatibility antifield towers enabled
    pub el_constraints: bool,
    /// geodesic/einbein antifield cancellation enabled
    pub geodesic: bool,
    pub noether: BTreeSet<NoetherSector>,
    pub noether_antifields: NoetherAntifields,
}

impl ModelSpec {
    /// The empty model: no fields, trajectory and einbein present and
    /// eliminated by the geodesic sector, reparametrization identity kept.
    pub fn empty(n: usize, p: Truncation) -> Self {
        ModelSpec {
            rep: RepSpec::new(n, GaugeAlgebra::none(), vec![]),
            p,
            variant: LongitudinalVariant::Dd2,
            include_trajectory: true,
            include_einbein: true,
            longitudinal: true,
            el_constraints: true,
            geodesic: true,
            noether: [NoetherSector::Rep].into_iter().collect(),
            noether_antifields: NoetherAntifields::Keep,
        }
    }

    pub fn with_fields(mut self, rep: RepSpec) -> Self {
        self.rep = rep;
        self
    }

    pub fn validate(&self) -> Result<(), ChargeError> {
        if self.rep.n < 1 {
            return Err(ChargeError::Inconsistent("dimension must be >= 1".into()));
        }
        if self.noether.contains(&NoetherSector::Gauge) && self.rep.algebra.is_trivial() {
            return Err(ChargeError::Inconsistent(
                "gauge Noether sector requires a gauge algebra".into(),
            ));
        }
        for b in &self.rep.blocks {
            if b.el_order > 2 {
                return Err(ChargeError::Inconsistent(format!(
                    "species '{}' has unsupported field-equation order {}",
                    b.name, b.el_order
                )));
            }
        }
        Ok(())
    }
}

fn single_block_spec(rep: &RepSpec, block: &SpeciesBlock) -> RepSpec {
    RepSpec::new(rep.n, rep.algebra.clone(), vec![block.clone()])
}

/// Parameters of a block and of its dual. Blocks with explicit matrices go
/// through the direct supertrace; closed-form-only gauge blocks fall back
/// to the closed layer (their gl content is in the small tensor family so
/// the layers agree where asserted).
fn block_params_pair(
    rep: &RepSpec,
    block: &SpeciesBlock,
) -> Result<(RepParams, RepParams), ChargeError> {
    let spec = single_block_spec(rep, block);
    let direct = match &block.gauge {
        GaugeIrrep::ClosedForm { .. } => crate::repkit::rep_params_closed_auto(&spec)?,
        _ => block_params_direct(&spec, block)?,
    };
    let dual = RepParams {
        sd: direct.sd.clone(),
        k0: -direct.k0.clone(),
        k1: direct.k1.clone(),
        k2: direct.k2.clone(),
        y: direct.y.clone(),
        z: -direct.z.clone(),
        kz: direct.kz.clone(),
    };
    Ok((direct, dual))
}

/// Invariants of one Noether antifield representation: the vector part for
/// the diffeomorphism identities, the adjoint part for the gauge ones.
fn noether_params(rep: &RepSpec, sector: NoetherSector) -> Result<RepParams, ChargeError> {
    match sector {
        NoetherSector::Rep => Ok(RepParams::zero()),
        NoetherSector::Diff => {
            let spec = RepSpec::new(
                rep.n,
                GaugeAlgebra::none(),
                vec![SpeciesBlock::new(
                    "noether-diff",
                    GlIrrep::vector(),
                    GaugeIrrep::Trivial,
                    Parity::Bosonic,
                )],
            );
            Ok(crate::repkit::rep_params_direct(&spec)?)
        }
        NoetherSector::Gauge => {
            if rep.algebra.is_trivial() {
                return Err(ChargeError::Inconsistent("gauge Noether without algebra".into()));
            }
            let gauge = match rep.algebra.name.as_str() {
                "u1" => GaugeIrrep::Trivial, // adjoint of u(1) is trivial
                "su2" => GaugeIrrep::Su2Adjoint,
                "su3" => GaugeIrrep::su3_adjoint(),
                other => {
                    return Err(ChargeError::Inconsistent(format!(
                        "no adjoint data for algebra {other}"
                    )))
                }
            };
            let block = SpeciesBlock::new(
                "noether-gauge",
                GlIrrep::scalar(Rat::zero()),
                gauge,
                Parity::Bosonic,
            );
            let spec = RepSpec::new(rep.n, rep.algebra.clone(), vec![block.clone()]);
            Ok(block_params_pair(&spec, &block)?.0)
        }
    }
}

/// Assemble the total abelian charges of a model at a numeric truncation.
///
/// Sector by sector:
/// * trajectory `+c_q(N)`, cancelled by its antifield under the geodesic
///   sector;
/// * einbein `+c_e(1)`, cancelled by `-c_e(0)` (both are `2 d_{j,4}`);
/// * every field block `+c_phi(p, N; rho, l)`, longitudinal tower
///   `-c_phi(p-1, N; rho, l)` (variant two) or `-c_phi(p-1, N; rho, l+1)`
///   (variant one), field-equation towers
///   `-c_phi(p-o, N; rho+, 0) + c_phi(p-o-1, N; rho+, 0)`;
/// * Noether sectors (when kept): reparametrization `+2 d_{j,4}`, and the
///   adjoint-valued towers `c~(p-3, N-1; ., 1)` for the diffeomorphism and
///   gauge identities.
pub fn total_charges(model: &ModelSpec) -> Result<ChargeVector, ChargeError> {
    model.validate()?;
    let Truncation::Numeric(p) = model.p else {
        return Err(ChargeError::NeedsNumericOrder);
    };
    let n = model.rep.n as i64;
    let mut total = ChargeVector::zero();

    if model.include_trajectory {
        total = total.add(&c_q(n));
        if model.geodesic {
            total = total.sub(&c_q(n));
        }
    }
    if model.include_einbein {
        total = total.add(&c_e(&Rat::one()));
        if model.geodesic {
            total = total.sub(&c_e(&Rat::zero()));
        }
    }

    for block in &model.rep.blocks {
        let (params, dual) = block_params_pair(&model.rep, block)?;
        total = total.add(&c_phi(p, n, &params, &block.lambda));
        if model.longitudinal {
            let beta_lambda = match model.variant {
                LongitudinalVariant::Dd2 => block.lambda.clone(),
                LongitudinalVariant::Dd1 => &block.lambda + Rat::one(),
            };
            total = total.sub(&c_phi(p - 1, n, &params, &beta_lambda));
        }
        if model.el_constraints {
            let o = block.el_order as i64;
            total = total.sub(&c_phi(p - o, n, &dual, &Rat::zero()));
            total = total.add(&c_phi(p - o - 1, n, &dual, &Rat::zero()));
        }
    }

    if model.noether_antifields == NoetherAntifields::Keep {
        for sector in &model.noether {
            match sector {
                NoetherSector::Rep => {
                    total = total.add(&c_e(&Rat::one()));
                }
                NoetherSector::Diff | NoetherSector::Gauge => {
                    let params = noether_params(&model.rep, *sector)?;
                    total = total.add(&c_tilde(p - 3, n - 1, &params, &Rat::one()));
                }
            }
        }
    }

    Ok(total)
}

/// Symbolic counterpart of [`total_charges`]: every sector as a polynomial
/// in `p`. Agrees with the numeric accounting for all `p` at least as
/// large as the deepest shift used (4 with Noether towers, `o+1` without).
pub fn total_charges_sym(model: &ModelSpec) -> Result<ChargePolyVector, ChargeError> {
    model.validate()?;
    let n = model.rep.n as i64;
    let mut total = ChargePolyVector::zero();
    let add_const = |total: &mut ChargePolyVector, v: &ChargeVector| {
        for j in 0..7 {
            total.c[j] = total.c[j].add(&UPoly::constant(v.c[j].clone()));
        }
    };

    if model.include_trajectory && !model.geodesic {
        add_const(&mut total, &c_q(n));
    }
    if model.include_einbein {
        if model.geodesic {
            // c_e(1) - c_e(0) = 0; kept explicit for clarity
            add_const(&mut total, &c_e(&Rat::one()).sub(&c_e(&Rat::zero())));
        } else {
            add_const(&mut total, &c_e(&Rat::one()));
        }
    }

    for block in &model.rep.blocks {
        let (params, dual) = block_params_pair(&model.rep, block)?;
        total = total.add(&c_phi_sym(n, &params, &block.lambda, 0));
        if model.longitudinal {
            let beta_lambda = match model.variant {
                LongitudinalVariant::Dd2 => block.lambda.clone(),
                LongitudinalVariant::Dd1 => &block.lambda + Rat::one(),
            };
            total = total.sub(&c_phi_sym(n, &params, &beta_lambda, -1));
        }
        if model.el_constraints {
            let o = block.el_order as i64;
            total = total.sub(&c_phi_sym(n, &dual, &Rat::zero(), -o));
            total = total.add(&c_phi_sym(n, &dual, &Rat::zero(), -o - 1));
        }
    }

    if model.noether_antifields == NoetherAntifields::Keep {
        for sector in &model.noether {
            match sector {
                NoetherSector::Rep => {
                    add_const(&mut total, &c_e(&Rat::one()));
                }
                NoetherSector::Diff | NoetherSector::Gauge => {
                    let params = noether_params(&model.rep, *sector)?;
                    total = total.add(&c_tilde_sym(n - 1, &params, &Rat::one(), -3));
                }
            }
        }
    }

    Ok(total)
}

/// Sum of the counterterm normalization functions over the model's
/// sectors, with the weight assignments of the charge accounting (fields
/// at their own weight, equation antifields at zero, identity towers at
/// one). When every weight input is zero the sum vanishes identically,
/// since each counterterm is proportional to its weight.
pub fn u_sector_sum(model: &ModelSpec) -> Result<(Rat, Rat, Rat), ChargeError> {
    model.validate()?;
    let Truncation::Numeric(p) = model.p else {
        return Err(ChargeError::NeedsNumericOrder);
    };
    let n = model.rep.n as i64;
    let mut total = (Rat::zero(), Rat::zero(), Rat::zero());
    let mut accumulate = |t: (Rat, Rat, Rat), sign: Rat| {
        total.0 += &sign * t.0;
        total.1 += &sign * t.1;
        total.2 += &sign * t.2;
    };
    for block in &model.rep.blocks {
        let (params, dual) = block_params_pair(&model.rep, block)?;
        accumulate(u_funcs(p, n, &params, &block.lambda), Rat::one());
        if model.longitudinal {
            let beta_lambda = match model.variant {
                LongitudinalVariant::Dd2 => block.lambda.clone(),
                LongitudinalVariant::Dd1 => &block.lambda + Rat::one(),
            };
            accumulate(u_funcs(p - 1, n, &params, &beta_lambda), -Rat::one());
        }
        if model.el_constraints {
            let o = block.el_order as i64;
            accumulate(u_funcs(p - o, n, &dual, &Rat::zero()), -Rat::one());
            accumulate(u_funcs(p - o - 1, n, &dual, &Rat::zero()), Rat::one());
        }
    }
    if model.noether_antifields == NoetherAntifields::Keep {
        for sector in &model.noether {
            if matches!(sector, NoetherSector::Diff | NoetherSector::Gauge) {
                let params = noether_params(&model.rep, *sector)?;
                let hi = u_funcs(p - 3, n, &params, &Rat::one());
                let lo = u_funcs(p - 4, n, &params, &Rat::one());
                accumulate(hi, Rat::one());
                accumulate(lo, -Rat::one());
            }
        }
    }
    Ok(total)
}

/// Leading/subleading data of one charge polynomial.
#[derive(Clone, Debug)]
pub struct AsymRow {
    pub degree: Option<u32>,
    pub leading: Rat,
    pub subleading: Rat,
    pub poly: UPoly,
}

/// Asymptotic expansion of the model's total charges in the truncation
/// order.
#[derive(Clone, Debug)]
pub struct AsymptoticCoeffs {
    pub rows: [AsymRow; 7],
}

pub fn asymptotics(model: &ModelSpec) -> Result<AsymptoticCoeffs, ChargeError> {
    if model.p != Truncation::Symbolic {
        return Err(ChargeError::NeedsSymbolicOrder);
    }
    let sym = total_charges_sym(model)?;
    Ok(AsymptoticCoeffs {
        rows: std::array::from_fn(|j| {
            let poly = sym.c[j].clone();
            let degree = poly.degree();
            let leading = degree.map(|d| poly.coeff(d)).unwrap_or_else(Rat::zero);
            let subleading = degree
                .and_then(|d| d.checked_sub(1))
                .map(|d| poly.coeff(d))
                .unwrap_or_else(Rat::zero);
            AsymRow { degree, leading, subleading, poly }
        }),
    })
}

fn factorial(n: i64) -> Rat {
    let mut acc = Rat::one();
    for k in 2..=n {
        acc *= rat_int(k);
    }
    acc
}

/// The leading-power table for the reduced field contribution
/// `c~_j(p, N; rho, l)`: per charge, the degree in `p` and the leading
/// coefficient. Signs follow the charge table itself (in particular the
/// gauge-current charge carries its minus sign).
pub fn ctilde_leading_table(n_arg: i64, params: &RepParams, lambda: &Rat) -> [(u32, Rat); 7] {
    let n = n_arg;
    let sd = &params.sd;
    let lam_lin = Rat::one() - rat_int(2) * lambda; // 1 - 2l
    let lam_quad =
        rat_int(2) * (Rat::one() - rat_int(6) * lambda + rat_int(6) * lambda * lambda);
    [
        ((n + 1) as u32, sd / factorial(n + 1)),
        ((n + 2) as u32, sd / (rat_int(n + 1) * factorial(n + 1))),
        ((n + 1) as u32, &lam_lin * sd / factorial(n + 1)),
        (n as u32, &lam_quad * sd / factorial(n)),
        (n as u32, -params.y.clone() / factorial(n)),
        (n as u32, (rat_int(2) * lambda - Rat::one()) * &params.z / factorial(n)),
        ((n + 1) as u32, params.z.clone() / factorial(n + 1)),
    ]
}

/// Check the leading table against the symbolic expansion of `c~`.
/// A zero predicted coefficient makes a row vacuous up to a degree bound:
/// the polynomial must then have strictly smaller degree.
pub fn verify_ctilde_asymptotics(n_arg: i64, params: &RepParams, lambda: &Rat) -> [bool; 7] {
    let sym = c_tilde_sym(n_arg, params, lambda, 0);
    let table = ctilde_leading_table(n_arg, params, lambda);
    std::array::from_fn(|j| {
        let (deg, coeff) = &table[j];
        if coeff.is_zero() {
            sym.c[j].degree().map_or(true, |d| d < *deg)
        } else {
            sym.c[j].degree() == Some(*deg) && &sym.c[j].coeff(*deg) == coeff
        }
    })
}

/// One candidate field content for the finiteness scan: total bosonic and
/// fermionic non-auxiliary dimensions.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ScanCandidate {
    pub bosonic_dim: u32,
    pub fermionic_dim: u32,
    /// order-weighted signed dimension sum `sum_a o_a sd_a`
    pub weighted_sum: String,
    /// the subleading survivor of the asymptotic cancellation vanishes
    pub accepted: bool,
}

/// Scan field contents (bosonic order-2 dimension x fermionic order-1
/// dimension) up to `max_dim` against the finiteness condition: with the
/// Noether antifields dismissed, the leading field/antifield coefficients
/// cancel and the subleading survivor is proportional to
/// `sum_a o_a sd(rho_a)`; acceptance means that survivor vanishes, i.e.
/// `2 dim(bosonic) = dim(fermionic)`.
pub fn finiteness_scan(n: usize, max_dim: u32) -> Result<Vec<ScanCandidate>, ChargeError> {
    let mut out = Vec::new();
    for b in 0..=max_dim {
        for f in 0..=max_dim {
            if b == 0 && f == 0 {
                continue;
            }
            let mut blocks = Vec::new();
            if b > 0 {
                blocks.push(
                    SpeciesBlock::new(
                        "bosonic",
                        GlIrrep::scalar(Rat::zero()),
                        GaugeIrrep::Trivial,
                        Parity::Bosonic,
                    )
                    .with_order(2)
                    .with_copies(b),
                );
            }
            if f > 0 {
                blocks.push(
                    SpeciesBlock::new(
                        "fermionic",
                        GlIrrep::scalar(Rat::zero()),
                        GaugeIrrep::Trivial,
                        Parity::Fermionic,
                    )
                    .with_order(1)
                    .with_copies(f),
                );
            }
            let mut model = ModelSpec::empty(n, Truncation::Symbolic)
                .with_fields(RepSpec::new(n, GaugeAlgebra::none(), blocks));
            model.noether_antifields = NoetherAntifields::Dismiss;
            model.noether.clear();
            let sym = total_charges_sym(&model)?;
            // field/antifield towers cancel at degree N-1 in the c4 row;
            // the subleading coefficient at degree N-2 carries the
            // order-weighted sum
            let n_i = n as i64;
            let survivor_degree = (n_i - 2).max(0) as u32;
            let survivor = sym.c[3].coeff(survivor_degree);
            let leading_gone = sym.c[3].degree().map_or(true, |d| (d as i64) < n_i - 1);
            let weighted: Rat = rat_int(2 * b as i64) - rat_int(f as i64);
            out.push(ScanCandidate {
                bosonic_dim: b,
                fermionic_dim: f,
                weighted_sum: crate::scalar::rat_string(&weighted),
                accepted: leading_gone && survivor.is_zero(),
            });
        }
    }
    Ok(out)
}
