//! Typed command dispatch behind the command-line surface.
//!
//! Every command takes explicit options (including seeds for anything
//! randomized), produces a deterministic [`Report`] and signals failure
//! classes through [`CmdError`], which the binary maps onto distinct exit
//! codes: 2 parse, 3 validation, 4 budget, 5 property violation.

use crate::charges::{
    asymptotics, c_phi, c_q, c_e, finiteness_scan, total_charges, total_charges_sym, ModelSpec,
    Truncation,
};
use crate::fock::{
    anomaly, current_matrix_from_jet, supertrace_product, vacuum_conventions_check,
    virasoro_charge, WeightedPair,
};
use crate::jetops::{
    build_t, random_gauge_map, random_vector_field, trace_lemmas, verify_composition,
    PolyGaugeMap,
};
use crate::ktcomplex::{build_q, KtOptions, Preset};
use crate::modelio::{charges_json, parse_model, serialize_model, CmdError, Report};
use crate::multiindex::verify_np1;
use crate::obsalg::{
    gauge_fixed_reference, restricted_central_charge, virasoro_restriction_cocycle,
    BracketEngine, ChargePoly, ChargeSymbols, DgroElement, FourierPoly, GaugeData,
};
use crate::repkit::{GaugeAlgebra, GaugeIrrep, GlIrrep, Parity, RepSpec, SpeciesBlock};
use crate::scalar::{parse_rat, rat_int, rat_string, GaussRat, Rat};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

/// Canonicalization budgets, overridable through the environment
/// (`JETKT_MAX_WEIGHT`, `JETKT_MAX_TPOW`).
fn budgets_from_env() -> crate::obsalg::Budgets {
    let mut b = crate::obsalg::Budgets::default();
    if let Ok(v) = std::env::var("JETKT_MAX_WEIGHT") {
        if let Ok(w) = v.parse() {
            b.max_weight = w;
        }
    }
    if let Ok(v) = std::env::var("JETKT_MAX_TPOW") {
        if let Ok(t) = v.parse() {
            b.max_tpow = t;
        }
    }
    b
}

fn engine_with_env(n: usize, gauge: GaugeData, charges: ChargeSymbols) -> BracketEngine {
    BracketEngine {
        ctx: crate::obsalg::ObsContext::with_budgets(n, budgets_from_env()),
        gauge,
        charges,
    }
}

/// The command set of the workbench.
#[derive(Clone, Debug)]
pub enum Command {
    Np1 { max_n: u32, max_p: u32 },
    Charges { model: String },
    Asymptotics { model: String },
    Scan { n: usize, max_dim: u32 },
    VerifyTraces { n: usize, p: u32, samples: u32, seed: u64, degree: u32 },
    Jacobi { n: usize, degree: u32, modes: i64, samples: u32, seed: u64 },
    Dirac { n: usize, degree: u32, samples: u32, seed: u64 },
    FockAnomaly { n: usize, p: u32, samples: u32, seed: u64, max_mode: i64 },
    Virasoro { pairs: String, cutoff: i64 },
    Kt {
        preset: Preset,
        p: u32,
        degree: usize,
        longitudinal: bool,
        compat: bool,
        dd1: bool,
        geodesic: bool,
        noether: bool,
    },
}

fn poly_json(p: &crate::poly::UPoly) -> Value {
    let mut obj = Map::new();
    for (d, c) in &p.coeffs {
        obj.insert(format!("p^{d}"), json!(rat_string(c)));
    }
    Value::Object(obj)
}

/// Dispatch a command to the owning module and serialize the result.
pub fn run_command(cmd: &Command) -> Result<Report, CmdError> {
    match cmd {
        Command::Np1 { max_n, max_p } => {
            let mut failures = Vec::new();
            for n in 1..=*max_n {
                for p in 0..=*max_p {
                    if !verify_np1(n, p) {
                        failures.push(json!({"n": n, "p": p}));
                    }
                }
            }
            let ok = failures.is_empty();
            let payload = json!({
                "all_hold": ok,
                "cases": (*max_n as u64) * (*max_p as u64 + 1),
                "failures": failures,
            });
            let input = format!("np1 {max_n} {max_p}");
            let report = Report::new("np1", &input, payload);
            if ok {
                Ok(report)
            } else {
                Err(CmdError::Property("a binomial reduction identity failed".into()))
            }
        }

        Command::Charges { model } => {
            let spec = parse_model(model).map_err(CmdError::Parse)?;
            let canonical = serialize_model(&spec);
            let payload = match spec.p {
                Truncation::Numeric(_) => charges_json(&total_charges(&spec)?),
                Truncation::Symbolic => {
                    let sym = total_charges_sym(&spec)?;
                    let mut obj = Map::new();
                    for (j, p) in sym.c.iter().enumerate() {
                        obj.insert(format!("c{}", j + 1), poly_json(p));
                    }
                    Value::Object(obj)
                }
            };
            Ok(Report::new("charges", &canonical, payload))
        }

        Command::Asymptotics { model } => {
            let mut spec = parse_model(model).map_err(CmdError::Parse)?;
            spec.p = Truncation::Symbolic;
            let canonical = serialize_model(&spec);
            let asym = asymptotics(&spec)?;
            let rows: Vec<Value> = asym
                .rows
                .iter()
                .enumerate()
                .map(|(j, row)| {
                    json!({
                        "charge": format!("c{}", j + 1),
                        "degree": row.degree,
                        "leading": rat_string(&row.leading),
                        "subleading": rat_string(&row.subleading),
                        "poly": poly_json(&row.poly),
                    })
                })
                .collect();
            Ok(Report::new("asymptotics", &canonical, Value::Array(rows)))
        }

        Command::Scan { n, max_dim } => {
            let report = finiteness_scan(*n, *max_dim)?;
            let mut ok = true;
            let rows: Vec<Value> = report
                .iter()
                .map(|c| {
                    let brute = 2 * c.bosonic_dim as i64 == c.fermionic_dim as i64;
                    ok &= brute == c.accepted;
                    json!({
                        "bosonic_dim": c.bosonic_dim,
                        "fermionic_dim": c.fermionic_dim,
                        "weighted_sum": c.weighted_sum,
                        "accepted": c.accepted,
                    })
                })
                .collect();
            let input = format!("scan {n} {max_dim}");
            let r = Report::new("scan", &input, Value::Array(rows))
                .with_note("brute_force_agrees", ok);
            if ok {
                Ok(r)
            } else {
                Err(CmdError::Property(
                    "scanner disagrees with the brute-force filter".into(),
                ))
            }
        }

        Command::VerifyTraces { n, p, samples, seed, degree } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut rows = Vec::new();
            let mut all_ok = true;
            for rep in trace_rep_suite(*n) {
                for _ in 0..*samples {
                    let xi = random_vector_field(&mut rng, *n, *degree);
                    let eta = random_vector_field(&mut rng, *n, *degree);
                    let (x, y) = if rep.algebra.is_trivial() {
                        (PolyGaugeMap::zero(*n, 0), PolyGaugeMap::zero(*n, 0))
                    } else {
                        (
                            random_gauge_map(&mut rng, *n, rep.algebra.dim, *degree),
                            random_gauge_map(&mut rng, *n, rep.algebra.dim, *degree),
                        )
                    };
                    let comp = verify_composition(&xi, &eta, &x, &y, *p, &rep)?;
                    let report = trace_lemmas(&xi, &eta, &x, &y, *p, &rep)?;
                    for lemma in &report.lemmas {
                        all_ok &= lemma.holds();
                        rows.push(json!({
                            "rep": rep_label(&rep),
                            "lemma": lemma.name,
                            "holds": lemma.holds(),
                        }));
                    }
                    all_ok &= comp;
                    rows.push(json!({
                        "rep": rep_label(&rep),
                        "lemma": "composition",
                        "holds": comp,
                    }));
                }
            }
            let input = format!("verify-traces {n} {p} {samples} {seed} {degree}");
            let r = Report::new("verify-traces", &input, Value::Array(rows))
                .with_note("seed", seed)
                .with_note("all_hold", all_ok);
            if all_ok {
                Ok(r)
            } else {
                Err(CmdError::Property("a supertrace or composition identity failed".into()))
            }
        }

        Command::Jacobi { n, degree, modes, samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut rows = Vec::new();
            let mut all_zero = true;
            for algebra in [GaugeAlgebra::none(), GaugeAlgebra::u1(), GaugeAlgebra::su2()] {
                let gauge_dim = algebra.dim;
                let engine = engine_with_env(
                    *n,
                    GaugeData::from_algebra(&algebra),
                    ChargeSymbols::symbolic(),
                );
                let per_algebra = (*samples as usize).div_euclid(3).max(2);
                for k in 0..per_algebra {
                    let triple = sample_triple(&mut rng, *n, *degree, *modes, gauge_dim, k);
                    let defect = engine
                        .jacobi_defect(&triple[0], &triple[1], &triple[2])
                        .map_err(CmdError::from)?;
                    let zero = defect.is_zero();
                    all_zero &= zero;
                    rows.push(json!({
                        "algebra": algebra.name,
                        "sample": k,
                        "defect_zero": zero,
                    }));
                }
            }
            let input = format!("jacobi {n} {degree} {modes} {samples} {seed}");
            let r = Report::new("jacobi", &input, Value::Array(rows))
                .with_note("seed", seed)
                .with_note("charges", "symbolic c1..c7");
            if all_zero {
                Ok(r)
            } else {
                Err(CmdError::Property("a cyclic bracket defect did not vanish".into()))
            }
        }

        Command::Dirac { n, degree, samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let engine = engine_with_env(*n, GaugeData::none(), ChargeSymbols::symbolic());
            let mut rows = Vec::new();
            let mut all_ok = true;
            for k in 0..*samples {
                let xi = random_vector_field(&mut rng, *n, *degree);
                let eta = random_vector_field(&mut rng, *n, *degree);
                let a = DgroElement::from_diff(xi.clone(), 0);
                let b = DgroElement::from_diff(eta.clone(), 0);
                let fixed = engine.dirac_fix(&a, &b).map_err(CmdError::from)?;
                let reference =
                    gauge_fixed_reference(&engine, &xi, &eta).map_err(CmdError::from)?;
                let lines_ok = engine
                    .ibp_reduce(&fixed.obs.sub(&reference))
                    .map_err(CmdError::from)?
                    .is_zero();
                let time_fixed = engine
                    .dirac_fix_trajectory(&a, 0)
                    .map_err(CmdError::from)?
                    .is_zero();
                all_ok &= lines_ok && time_fixed;
                rows.push(json!({
                    "sample": k,
                    "gauge_fixed_lines_match": lines_ok,
                    "time_component_fixed": time_fixed,
                }));
            }
            // the restricted diagonal subalgebra measures twelve times the
            // mixed charge
            let restricted = ChargeSymbols::symbolic()
                .with_fixed(1, Rat::zero())
                .with_fixed(2, Rat::zero())
                .with_fixed(4, Rat::zero());
            let c = restricted_central_charge(&restricted);
            let expected = ChargePoly::symbol(3).scale(&GaussRat::from_int(12));
            let kk_ok = c == expected;
            all_ok &= kk_ok;
            let cocycle: Vec<Value> = (1..=3)
                .map(|m| {
                    json!({
                        "mode": m,
                        "cocycle": format!("{:?}", virasoro_restriction_cocycle(&restricted, m)),
                    })
                })
                .collect();
            let input = format!("dirac {n} {degree} {samples} {seed}");
            let r = Report::new(
                "dirac",
                &input,
                json!({
                    "samples": rows,
                    "restricted_central_charge": format!("{c:?}"),
                    "restricted_charge_is_twelve_c3": kk_ok,
                    "cocycle_values": cocycle,
                }),
            )
            .with_note("seed", seed);
            if all_ok {
                Ok(r)
            } else {
                Err(CmdError::Property("a gauge-fixed line failed to match".into()))
            }
        }

        Command::FockAnomaly { n, p, samples, seed, max_mode } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let rep = RepSpec::new(
                *n,
                GaugeAlgebra::none(),
                vec![SpeciesBlock::new(
                    "vec",
                    GlIrrep::vector(),
                    GaugeIrrep::Trivial,
                    Parity::Bosonic,
                )],
            );
            let mut rows = Vec::new();
            let mut all_ok = true;
            for k in 0..*samples {
                let xi = random_vector_field(&mut rng, *n, 2);
                let eta = random_vector_field(&mut rng, *n, 2);
                let t_xi = build_t(&xi, *p, &rep)?;
                let t_eta = build_t(&eta, *p, &rep)?;
                let point: Vec<Rat> =
                    (0..*n).map(|i| rat_int((k as i64 % 3) - 1 + i as i64)).collect();
                let (fiber, a) = current_matrix_from_jet(&t_xi, &point)?;
                let (_, b) = current_matrix_from_jet(&t_eta, &point)?;
                let expected = supertrace_product(&fiber, &a, &b);
                let mut sample_ok = true;
                for m in 0..=*max_mode {
                    let got = anomaly(&fiber, &a, &b, m);
                    sample_ok &= got == rat_int(m) * &expected;
                }
                all_ok &= sample_ok;
                rows.push(json!({
                    "sample": k,
                    "supertrace": rat_string(&expected),
                    "anomaly_matches": sample_ok,
                }));
            }
            let input = format!("fock-anomaly {n} {p} {samples} {seed} {max_mode}");
            let r = Report::new("fock-anomaly", &input, Value::Array(rows))
                .with_note("seed", seed);
            if all_ok {
                Ok(r)
            } else {
                Err(CmdError::Property(
                    "a commutator anomaly disagreed with the supertrace sum".into(),
                ))
            }
        }

        Command::Virasoro { pairs, cutoff } => {
            let system = parse_pairs(pairs)?;
            let c = virasoro_charge(&system, *cutoff)?;
            let conventions = vacuum_conventions_check();
            let payload = json!({
                "central_charge": rat_string(&c),
                "conventions": {
                    "ket_split_ok": conventions.ket_split_ok,
                    "one_point_functions_vanish": conventions.one_point_functions_vanish,
                    "mode_one_central_term_absent": conventions.mode_one_central_term_absent,
                    "shift_invariance_ok": conventions.shift_invariance_ok,
                },
            });
            let input = format!("virasoro {pairs} {cutoff}");
            let r = Report::new("virasoro", &input, payload);
            if conventions.all_ok() {
                Ok(r)
            } else {
                Err(CmdError::Property("a vacuum convention check failed".into()))
            }
        }

        Command::Kt { preset, p, degree, longitudinal, compat, dd1, geodesic, noether } => {
            let options = KtOptions {
                longitudinal: *longitudinal,
                compat: *compat,
                variant: if *dd1 {
                    crate::charges::LongitudinalVariant::Dd1
                } else {
                    crate::charges::LongitudinalVariant::Dd2
                },
                geodesic: *geodesic,
                noether: *noether,
                corrupt_noether: false,
            };
            let complex = build_q(*preset, *p, &options)?;
            let nilpotent = complex.check_nilpotent();
            let mut rows = Vec::new();
            let mut table_note = "computed";
            if nilpotent {
                match complex.cohomology_dims(*degree) {
                    Ok(dims) => {
                        for ((g, l), d) in dims {
                            rows.push(json!({"ghost": g, "momentum": l, "dim": d}));
                        }
                    }
                    Err(crate::ktcomplex::KtError::InhomogeneousDifferential) => {
                        table_note = "skipped: differential not degree-homogeneous";
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let payload = json!({
                "generators": complex.gens.len(),
                "nilpotent": nilpotent,
                "cohomology": rows,
                "table": table_note,
            });
            let input = format!("kt {preset:?} {p} {degree} {options:?}");
            let r = Report::new("kt", &input, payload);
            if nilpotent {
                Ok(r)
            } else {
                Err(CmdError::Property("the generator is not nilpotent".into()))
            }
        }
    }
}

fn rep_label(rep: &RepSpec) -> String {
    let block = &rep.blocks[0];
    let gl = match (block.gl.upper, block.gl.lower) {
        (0, 0) => {
            if block.gl.kappa.is_zero() {
                "scalar".to_string()
            } else {
                format!("density({})", rat_string(&block.gl.kappa))
            }
        }
        (1, 0) => "vector".into(),
        (0, 1) => "covector".into(),
        _ => "sym2".into(),
    };
    if rep.algebra.is_trivial() {
        gl
    } else {
        format!("{gl}+{}", rep.algebra.name)
    }
}

/// The representation sweep behind the trace verification: vector,
/// covector, symmetric two-tensor and scalar density, bare and with
/// abelian/non-abelian gauge blocks.
pub fn trace_rep_suite(n: usize) -> Vec<RepSpec> {
    let mut out = vec![
        RepSpec::new(
            n,
            GaugeAlgebra::none(),
            vec![SpeciesBlock::new("v", GlIrrep::vector(), GaugeIrrep::Trivial, Parity::Bosonic)],
        ),
        RepSpec::new(
            n,
            GaugeAlgebra::none(),
            vec![SpeciesBlock::new(
                "c",
                GlIrrep::covector(),
                GaugeIrrep::Trivial,
                Parity::Bosonic,
            )],
        ),
        RepSpec::new(
            n,
            GaugeAlgebra::none(),
            vec![SpeciesBlock::new(
                "s2",
                GlIrrep::sym2_lower(),
                GaugeIrrep::Trivial,
                Parity::Bosonic,
            )],
        ),
        RepSpec::new(
            n,
            GaugeAlgebra::none(),
            vec![SpeciesBlock::new(
                "dens",
                GlIrrep::scalar(rat_int(1)),
                GaugeIrrep::Trivial,
                Parity::Bosonic,
            )],
        ),
    ];
    out.push(RepSpec::new(
        n,
        GaugeAlgebra::u1(),
        vec![SpeciesBlock::new(
            "v+u1",
            GlIrrep::vector(),
            GaugeIrrep::Charge(rat_int(1)),
            Parity::Bosonic,
        )],
    ));
    out.push(RepSpec::new(
        n,
        GaugeAlgebra::u1(),
        vec![SpeciesBlock::new(
            "dens+u1",
            GlIrrep::scalar(rat_int(1)),
            GaugeIrrep::Charge(rat_int(2)),
            Parity::Fermionic,
        )],
    ));
    out.push(RepSpec::new(
        n,
        GaugeAlgebra::su2(),
        vec![SpeciesBlock::new(
            "c+su2",
            GlIrrep::covector(),
            GaugeIrrep::Su2Fundamental,
            Parity::Bosonic,
        )],
    ));
    out.push(RepSpec::new(
        n,
        GaugeAlgebra::su2(),
        vec![SpeciesBlock::new(
            "s2+su2",
            GlIrrep::sym2_lower(),
            GaugeIrrep::Su2Adjoint,
            Parity::Fermionic,
        )],
    ));
    out
}

fn sample_triple(
    rng: &mut ChaCha8Rng,
    n: usize,
    degree: u32,
    modes: i64,
    gauge_dim: usize,
    k: usize,
) -> [DgroElement; 3] {
    use rand::Rng;
    let mut element = |kind: usize| -> DgroElement {
        match kind {
            0 => DgroElement::from_diff(random_vector_field(rng, n, degree), gauge_dim),
            1 => {
                let mode = rng.gen_range(-modes..=modes);
                DgroElement::from_rep(n, FourierPoly::mode(mode), gauge_dim)
            }
            _ => {
                if gauge_dim == 0 {
                    DgroElement::from_diff(random_vector_field(rng, n, degree), 0)
                } else {
                    DgroElement::from_gauge(random_gauge_map(rng, n, gauge_dim, degree))
                }
            }
        }
    };
    [element(k % 3), element((k + 1) % 3), element((k + 2) % 3)]
}

fn parse_pairs(text: &str) -> Result<Vec<WeightedPair>, CmdError> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let bits: Vec<&str> = part.trim().split(':').collect();
        if bits.len() != 3 {
            return Err(CmdError::Validation(format!(
                "expected lambda:parity:multiplicity, found `{part}`"
            )));
        }
        let lambda = parse_rat(bits[0])
            .ok_or_else(|| CmdError::Validation(format!("bad weight `{}`", bits[0])))?;
        let parity = match bits[1].to_ascii_lowercase().as_str() {
            "b" | "bosonic" => Parity::Bosonic,
            "f" | "fermionic" => Parity::Fermionic,
            other => return Err(CmdError::Validation(format!("bad parity `{other}`"))),
        };
        let multiplicity: u32 = bits[2]
            .parse()
            .map_err(|_| CmdError::Validation(format!("bad multiplicity `{}`", bits[2])))?;
        out.push(WeightedPair { lambda, parity, multiplicity });
    }
    if out.is_empty() {
        return Err(CmdError::Validation("empty pair list".into()));
    }
    Ok(out)
}

/// Charges of the unconstrained module, exposed for cross-checks:
/// `c_q + c_e(1) + c_phi`.
pub fn unconstrained_charges(model: &ModelSpec) -> Result<crate::charges::ChargeVector, CmdError> {
    let Truncation::Numeric(p) = model.p else {
        return Err(CmdError::Validation("needs a numeric truncation".into()));
    };
    let n = model.rep.n as i64;
    let mut total = c_q(n).add(&c_e(&Rat::one()));
    for block in &model.rep.blocks {
        let spec = RepSpec::new(model.rep.n, model.rep.algebra.clone(), vec![block.clone()]);
        let params = crate::repkit::rep_params_direct(&spec)?;
        total = total.add(&c_phi(p, n, &params, &block.lambda));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn np1_command_reports_all_hold() {
        let r = run_command(&Command::Np1 { max_n: 4, max_p: 10 }).unwrap();
        assert!(r.to_json().contains("\"all_hold\": true"));
    }

    #[test]
    fn charges_command_on_empty_model() {
        let model = "[model]\nn = 2\np = 4\n";
        let r = run_command(&Command::Charges { model: model.into() }).unwrap();
        let json = r.to_json();
        assert!(json.contains("\"c4\": \"2\""), "{json}");
        assert!(json.contains("\"c1\": \"0\""));
    }

    #[test]
    fn parse_failures_exit_with_code_two() {
        let err = run_command(&Command::Charges { model: "[model]\nbad = 1\n".into() })
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn virasoro_command() {
        let r = run_command(&Command::Virasoro { pairs: "0:b:2".into(), cutoff: 3 }).unwrap();
        assert!(r.to_json().contains("\"central_charge\": \"4\""));
    }

    #[test]
    fn kt_command_reports_table() {
        let r = run_command(&Command::Kt {
            preset: Preset::Auxiliary,
            p: 1,
            degree: 2,
            longitudinal: false,
            compat: false,
            dd1: false,
            geodesic: false,
            noether: false,
        })
        .unwrap();
        let json = r.to_json();
        assert!(json.contains("\"nilpotent\": true"));
        assert!(json.contains("\"dim\": 1"));
        let csv = r.to_csv();
        assert!(csv.contains("key,value"));
    }

    #[test]
    fn determinism_of_randomized_commands() {
        let cmd = Command::Jacobi { n: 2, degree: 2, modes: 2, samples: 6, seed: 7 };
        let a = run_command(&cmd).unwrap().to_json();
        let b = run_command(&cmd).unwrap().to_json();
        assert_eq!(a, b);
    }
}
