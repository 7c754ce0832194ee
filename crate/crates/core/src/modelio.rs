//! Model files, validation diagnostics, command dispatch and reports.
//!
//! The model format is a small line-oriented sectioned text file:
//!
//! ```text
//! # einbein and trajectory with one charged scalar
//! [model]
//! n = 2
//! p = 4                 # integer or "symbolic"
//! variant = dd2
//! trajectory = true
//! einbein = true
//! longitudinal = true
//! el = true
//! geodesic = true
//! noether = rep, diff
//! noether_antifields = keep
//!
//! [gauge]
//! algebra = u1
//!
//! [species]
//! name = matter
//! gl = scalar
//! kappa = 0
//! gauge = charge(1)
//! parity = fermionic
//! order = 1
//! lambda = 0
//! copies = 4
//! ```
//!
//! Unknown keys are rejected with positioned diagnostics. Rationals are
//! written `a/b` or as integers; reports serialize every rational the same
//! way and never contain floating point.

use crate::charges::{
    self, ChargeVector, LongitudinalVariant, ModelSpec, NoetherAntifields, NoetherSector,
    Truncation,
};
use crate::repkit::{GaugeAlgebra, GaugeIrrep, GlIrrep, Parity, RepSpec, SpeciesBlock};
use crate::scalar::{parse_rat, rat_string, Rat};
use num_traits::Zero;
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;

/// A positioned parse or validation message.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Errors from command dispatch, each with a distinct process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error("parse failure:\n{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Parse(Vec<Diagnostic>),
    #[error("validation failure: {0}")]
    Validation(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("property violation: {0}")]
    Property(String),
    #[error("{0}")]
    Other(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Parse(_) => 2,
            CmdError::Validation(_) => 3,
            CmdError::Budget(_) => 4,
            CmdError::Property(_) => 5,
            CmdError::Other(_) => 1,
        }
    }
}

impl From<charges::ChargeError> for CmdError {
    fn from(e: charges::ChargeError) -> Self {
        CmdError::Validation(e.to_string())
    }
}

impl From<crate::obsalg::ObsError> for CmdError {
    fn from(e: crate::obsalg::ObsError) -> Self {
        match e {
            crate::obsalg::ObsError::BudgetExceeded(m) => CmdError::Budget(m),
            other => CmdError::Validation(other.to_string()),
        }
    }
}

impl From<crate::ktcomplex::KtError> for CmdError {
    fn from(e: crate::ktcomplex::KtError) -> Self {
        CmdError::Validation(e.to_string())
    }
}

impl From<crate::fock::FockError> for CmdError {
    fn from(e: crate::fock::FockError) -> Self {
        match e {
            crate::fock::FockError::CutoffExceeded(..) => CmdError::Budget(e.to_string()),
            other => CmdError::Validation(other.to_string()),
        }
    }
}

impl From<crate::repkit::RepError> for CmdError {
    fn from(e: crate::repkit::RepError) -> Self {
        CmdError::Validation(e.to_string())
    }
}

struct Line<'a> {
    no: usize,
    section: String,
    key: String,
    value: &'a str,
}

fn tokenize(text: &str) -> Result<Vec<Line<'_>>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut section = String::new();
    let mut diags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                diags.push(Diagnostic { line: no, message: "unterminated section header".into() });
                continue;
            }
            section = line[1..line.len() - 1].trim().to_ascii_lowercase();
            out.push(Line { no, section: section.clone(), key: "[section]".into(), value: "" });
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            diags.push(Diagnostic { line: no, message: format!("expected `key = value`, found `{line}`") });
            continue;
        };
        if section.is_empty() {
            diags.push(Diagnostic { line: no, message: "key outside any section".into() });
            continue;
        }
        out.push(Line {
            no,
            section: section.clone(),
            key: k.trim().to_ascii_lowercase(),
            value: v.trim(),
        });
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

fn parse_bool(v: &str, no: usize, diags: &mut Vec<Diagnostic>) -> bool {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" => true,
        "false" | "no" | "off" => false,
        other => {
            diags.push(Diagnostic { line: no, message: format!("expected a boolean, found `{other}`") });
            false
        }
    }
}

fn parse_rat_at(v: &str, no: usize, diags: &mut Vec<Diagnostic>) -> Rat {
    match parse_rat(v) {
        Some(r) => r,
        None => {
            diags.push(Diagnostic { line: no, message: format!("expected a rational `a/b`, found `{v}`") });
            Rat::zero()
        }
    }
}

#[derive(Default)]
struct SpeciesDraft {
    line: usize,
    name: Option<String>,
    gl: Option<(String, usize)>,
    kappa: Rat,
    gauge: Option<(String, usize)>,
    parity: Option<(Parity, usize)>,
    order: Option<(u32, usize)>,
    lambda: Rat,
    copies: u32,
}

/// Parse a model file into a validated model, or a list of positioned
/// diagnostics.
pub fn parse_model(text: &str) -> Result<ModelSpec, Vec<Diagnostic>> {
    let lines = tokenize(text)?;
    let mut diags: Vec<Diagnostic> = Vec::new();

    let mut n: usize = 1;
    let mut p = Truncation::Numeric(0);
    let mut variant = LongitudinalVariant::Dd2;
    let mut trajectory = true;
    let mut einbein = true;
    let mut longitudinal = true;
    let mut el = true;
    let mut geodesic = true;
    // the reparametrization identity rides along with the trajectory
    // sector unless the file says otherwise
    let mut noether: BTreeSet<NoetherSector> =
        [NoetherSector::Rep].into_iter().collect();
    let mut noether_antifields = NoetherAntifields::Keep;
    let mut algebra = GaugeAlgebra::none();
    let mut species: Vec<SpeciesDraft> = Vec::new();

    for line in &lines {
        if line.key == "[section]" {
            match line.section.as_str() {
                "model" | "gauge" | "run" => {}
                "species" => species.push(SpeciesDraft {
                    line: line.no,
                    copies: 1,
                    ..SpeciesDraft::default()
                }),
                other => diags.push(Diagnostic {
                    line: line.no,
                    message: format!("unknown section `[{other}]`"),
                }),
            }
            continue;
        }
        match line.section.as_str() {
            "model" => match line.key.as_str() {
                "n" => match line.value.parse::<usize>() {
                    Ok(v) if v >= 1 => n = v,
                    _ => diags.push(Diagnostic {
                        line: line.no,
                        message: "dimension must be a positive integer".into(),
                    }),
                },
                "p" => {
                    if line.value.eq_ignore_ascii_case("symbolic") {
                        p = Truncation::Symbolic;
                    } else {
                        match line.value.parse::<i64>() {
                            Ok(v) if v >= 0 => p = Truncation::Numeric(v),
                            _ => diags.push(Diagnostic {
                                line: line.no,
                                message: "truncation must be a non-negative integer or `symbolic`"
                                    .into(),
                            }),
                        }
                    }
                }
                "variant" => match line.value.to_ascii_lowercase().as_str() {
                    "dd1" => variant = LongitudinalVariant::Dd1,
                    "dd2" => variant = LongitudinalVariant::Dd2,
                    other => diags.push(Diagnostic {
                        line: line.no,
                        message: format!("unknown longitudinal variant `{other}`"),
                    }),
                },
                "trajectory" => trajectory = parse_bool(line.value, line.no, &mut diags),
                "einbein" => einbein = parse_bool(line.value, line.no, &mut diags),
                "longitudinal" => longitudinal = parse_bool(line.value, line.no, &mut diags),
                "el" => el = parse_bool(line.value, line.no, &mut diags),
                "geodesic" => geodesic = parse_bool(line.value, line.no, &mut diags),
                "noether" => {
                    noether.clear();
                    for part in line.value.split(',') {
                        match part.trim().to_ascii_lowercase().as_str() {
                            "" | "none" => {}
                            "diff" => {
                                noether.insert(NoetherSector::Diff);
                            }
                            "rep" => {
                                noether.insert(NoetherSector::Rep);
                            }
                            "gauge" => {
                                noether.insert(NoetherSector::Gauge);
                            }
                            other => diags.push(Diagnostic {
                                line: line.no,
                                message: format!("unknown symmetry sector `{other}`"),
                            }),
                        }
                    }
                }
                "noether_antifields" => match line.value.to_ascii_lowercase().as_str() {
                    "keep" => noether_antifields = NoetherAntifields::Keep,
                    "dismiss" => noether_antifields = NoetherAntifields::Dismiss,
                    other => diags.push(Diagnostic {
                        line: line.no,
                        message: format!("expected keep/dismiss, found `{other}`"),
                    }),
                },
                other => diags.push(Diagnostic {
                    line: line.no,
                    message: format!("unknown key `{other}` in [model]"),
                }),
            },
            "gauge" => match line.key.as_str() {
                "algebra" => match line.value.to_ascii_lowercase().as_str() {
                    "none" => algebra = GaugeAlgebra::none(),
                    "u1" => algebra = GaugeAlgebra::u1(),
                    "su2" => algebra = GaugeAlgebra::su2(),
                    "su3" => algebra = GaugeAlgebra::su3(),
                    other => diags.push(Diagnostic {
                        line: line.no,
                        message: format!("unknown gauge algebra `{other}`"),
                    }),
                },
                other => diags.push(Diagnostic {
                    line: line.no,
                    message: format!("unknown key `{other}` in [gauge]"),
                }),
            },
            "species" => {
                let Some(draft) = species.last_mut() else {
                    diags.push(Diagnostic {
                        line: line.no,
                        message: "species key outside a [species] section".into(),
                    });
                    continue;
                };
                match line.key.as_str() {
                    "name" => draft.name = Some(line.value.to_string()),
                    "gl" => draft.gl = Some((line.value.to_ascii_lowercase(), line.no)),
                    "kappa" => draft.kappa = parse_rat_at(line.value, line.no, &mut diags),
                    "gauge" => draft.gauge = Some((line.value.to_ascii_lowercase(), line.no)),
                    "parity" => match line.value.to_ascii_lowercase().as_str() {
                        "bosonic" => draft.parity = Some((Parity::Bosonic, line.no)),
                        "fermionic" => draft.parity = Some((Parity::Fermionic, line.no)),
                        other => diags.push(Diagnostic {
                            line: line.no,
                            message: format!("unknown parity `{other}`"),
                        }),
                    },
                    "order" => match line.value.parse::<u32>() {
                        Ok(v) => draft.order = Some((v, line.no)),
                        Err(_) => diags.push(Diagnostic {
                            line: line.no,
                            message: "order must be a non-negative integer".into(),
                        }),
                    },
                    "lambda" => draft.lambda = parse_rat_at(line.value, line.no, &mut diags),
                    "copies" => match line.value.parse::<u32>() {
                        Ok(v) if v >= 1 => draft.copies = v,
                        _ => diags.push(Diagnostic {
                            line: line.no,
                            message: "copies must be a positive integer".into(),
                        }),
                    },
                    other => diags.push(Diagnostic {
                        line: line.no,
                        message: format!("unknown key `{other}` in [species]"),
                    }),
                }
            }
            "run" => { /* reserved for command-specific options */ }
            other => diags.push(Diagnostic {
                line: line.no,
                message: format!("key in unknown section `{other}`"),
            }),
        }
    }

    // assemble species blocks with semantic validation
    let mut blocks = Vec::new();
    for (i, draft) in species.iter().enumerate() {
        let name = draft.name.clone().unwrap_or_else(|| format!("species{}", i + 1));
        let gl = match draft.gl.as_ref().map(|(s, no)| (s.as_str(), *no)) {
            None | Some(("scalar", _)) => GlIrrep::scalar(draft.kappa.clone()),
            Some(("vector", _)) => GlIrrep::vector().with_kappa(draft.kappa.clone()),
            Some(("covector", _)) => GlIrrep::covector().with_kappa(draft.kappa.clone()),
            Some(("sym2", _)) => GlIrrep::sym2_upper().with_kappa(draft.kappa.clone()),
            Some(("sym2_lower", _)) => GlIrrep::sym2_lower().with_kappa(draft.kappa.clone()),
            Some(("asym2", _)) => GlIrrep::antisym2_upper().with_kappa(draft.kappa.clone()),
            Some(("asym2_lower", _)) => {
                GlIrrep::antisym2_lower().with_kappa(draft.kappa.clone())
            }
            Some((other, no)) => {
                diags.push(Diagnostic {
                    line: no,
                    message: format!("unknown tensor family `{other}`"),
                });
                GlIrrep::scalar(Rat::zero())
            }
        };
        let gauge = match draft.gauge.as_ref().map(|(s, no)| (s.as_str(), *no)) {
            None | Some(("trivial", _)) => GaugeIrrep::Trivial,
            Some((spec_str, no)) if spec_str.starts_with("charge(") && spec_str.ends_with(')') => {
                if algebra.name != "u1" {
                    diags.push(Diagnostic {
                        line: no,
                        message: "charged species require the u1 gauge algebra".into(),
                    });
                }
                let inner = &spec_str["charge(".len()..spec_str.len() - 1];
                match parse_rat(inner) {
                    Some(q) => GaugeIrrep::Charge(q),
                    None => {
                        diags.push(Diagnostic {
                            line: no,
                            message: format!("bad charge `{inner}`"),
                        });
                        GaugeIrrep::Trivial
                    }
                }
            }
            Some(("fundamental", no)) => match algebra.name.as_str() {
                "su2" => GaugeIrrep::Su2Fundamental,
                "su3" => GaugeIrrep::su3_fundamental(),
                _ => {
                    diags.push(Diagnostic {
                        line: no,
                        message: "fundamental species require an su gauge algebra".into(),
                    });
                    GaugeIrrep::Trivial
                }
            },
            Some(("adjoint", no)) => match algebra.name.as_str() {
                "su2" => GaugeIrrep::Su2Adjoint,
                "su3" => GaugeIrrep::su3_adjoint(),
                "u1" => GaugeIrrep::Trivial,
                _ => {
                    diags.push(Diagnostic {
                        line: no,
                        message: "adjoint species require a gauge algebra".into(),
                    });
                    GaugeIrrep::Trivial
                }
            },
            Some((other, no)) => {
                diags.push(Diagnostic {
                    line: no,
                    message: format!("unknown gauge content `{other}`"),
                });
                GaugeIrrep::Trivial
            }
        };
        if gauge != GaugeIrrep::Trivial && algebra.is_trivial() {
            diags.push(Diagnostic {
                line: draft.line,
                message: format!("species `{name}` carries gauge content but no [gauge] algebra is declared"),
            });
        }
        let parity = draft.parity.map(|(p, _)| p).unwrap_or(Parity::Bosonic);
        let order = match draft.order {
            Some((o, no)) => {
                if o > 2 {
                    diags.push(Diagnostic {
                        line: no,
                        message: format!("unsupported field-equation order {o} (supported: 0, 1, 2)"),
                    });
                }
                o.min(2)
            }
            None => match parity {
                Parity::Bosonic => 2,
                Parity::Fermionic => 1,
            },
        };
        blocks.push(
            SpeciesBlock::new(&name, gl, gauge, parity)
                .with_order(order)
                .with_lambda(draft.lambda.clone())
                .with_copies(draft.copies),
        );
    }
    if noether.contains(&NoetherSector::Gauge) && algebra.is_trivial() {
        diags.push(Diagnostic {
            line: 0,
            message: "the gauge symmetry sector requires a gauge algebra".into(),
        });
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    let model = ModelSpec {
        rep: RepSpec::new(n, algebra, blocks),
        p,
        variant,
        include_trajectory: trajectory,
        include_einbein: einbein,
        longitudinal,
        el_constraints: el,
        geodesic,
        noether,
        noether_antifields,
    };
    model.validate().map_err(|e| vec![Diagnostic { line: 0, message: e.to_string() }])?;
    Ok(model)
}

/// Canonical text form of a model; `parse(serialize(parse(t)))` equals
/// `parse(t)`.
pub fn serialize_model(m: &ModelSpec) -> String {
    let mut out = String::new();
    out.push_str("[model]\n");
    out.push_str(&format!("n = {}\n", m.rep.n));
    match m.p {
        Truncation::Numeric(p) => out.push_str(&format!("p = {p}\n")),
        Truncation::Symbolic => out.push_str("p = symbolic\n"),
    }
    out.push_str(&format!(
        "variant = {}\n",
        match m.variant {
            LongitudinalVariant::Dd1 => "dd1",
            LongitudinalVariant::Dd2 => "dd2",
        }
    ));
    out.push_str(&format!("trajectory = {}\n", m.include_trajectory));
    out.push_str(&format!("einbein = {}\n", m.include_einbein));
    out.push_str(&format!("longitudinal = {}\n", m.longitudinal));
    out.push_str(&format!("el = {}\n", m.el_constraints));
    out.push_str(&format!("geodesic = {}\n", m.geodesic));
    let sectors: Vec<&str> = m
        .noether
        .iter()
        .map(|s| match s {
            NoetherSector::Diff => "diff",
            NoetherSector::Rep => "rep",
            NoetherSector::Gauge => "gauge",
        })
        .collect();
    out.push_str(&format!(
        "noether = {}\n",
        if sectors.is_empty() { "none".into() } else { sectors.join(", ") }
    ));
    out.push_str(&format!(
        "noether_antifields = {}\n",
        match m.noether_antifields {
            NoetherAntifields::Keep => "keep",
            NoetherAntifields::Dismiss => "dismiss",
        }
    ));
    if !m.rep.algebra.is_trivial() {
        out.push_str(&format!("\n[gauge]\nalgebra = {}\n", m.rep.algebra.name));
    }
    for b in &m.rep.blocks {
        out.push_str("\n[species]\n");
        out.push_str(&format!("name = {}\n", b.name));
        let gl = match (b.gl.upper, b.gl.lower, b.gl.symmetry) {
            (0, 0, _) => "scalar".to_string(),
            (1, 0, _) => "vector".into(),
            (0, 1, _) => "covector".into(),
            (2, 0, crate::repkit::SymmetryType::Symmetric) => "sym2".into(),
            (0, 2, crate::repkit::SymmetryType::Symmetric) => "sym2_lower".into(),
            (2, 0, crate::repkit::SymmetryType::Antisymmetric) => "asym2".into(),
            (0, 2, crate::repkit::SymmetryType::Antisymmetric) => "asym2_lower".into(),
            _ => "scalar".into(),
        };
        out.push_str(&format!("gl = {gl}\n"));
        out.push_str(&format!("kappa = {}\n", rat_string(&b.gl.kappa)));
        let gauge = match &b.gauge {
            GaugeIrrep::Trivial => "trivial".to_string(),
            GaugeIrrep::Charge(q) => format!("charge({})", rat_string(q)),
            GaugeIrrep::Su2Fundamental => "fundamental".into(),
            GaugeIrrep::Su2Adjoint => "adjoint".into(),
            GaugeIrrep::ClosedForm { dim, .. } => {
                if *dim == 3 {
                    "fundamental".into()
                } else {
                    "adjoint".into()
                }
            }
        };
        out.push_str(&format!("gauge = {gauge}\n"));
        out.push_str(&format!(
            "parity = {}\n",
            match b.parity {
                Parity::Bosonic => "bosonic",
                Parity::Fermionic => "fermionic",
            }
        ));
        out.push_str(&format!("order = {}\n", b.el_order));
        out.push_str(&format!("lambda = {}\n", rat_string(&b.lambda)));
        out.push_str(&format!("copies = {}\n", b.copies));
    }
    out
}

/// 64-bit FNV-1a digest of the canonical input, hex encoded. Keeps
/// reports self-identifying without external dependencies.
pub fn digest(text: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

/// A deterministic report: command echo, input digest, provenance notes
/// and the result payload. Serialization order is fixed.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub notes: Vec<(String, String)>,
    pub payload: Value,
}

impl Report {
    pub fn new(command: &str, input: &str, payload: Value) -> Self {
        Report {
            command: command.into(),
            input_digest: digest(input),
            notes: Vec::new(),
            payload,
        }
    }

    pub fn with_note(mut self, key: &str, value: impl ToString) -> Self {
        self.notes.push((key.into(), value.to_string()));
        self
    }

    pub fn to_json(&self) -> String {
        let mut top = Map::new();
        top.insert("command".into(), json!(self.command));
        top.insert("input_digest".into(), json!(self.input_digest));
        let mut notes = Map::new();
        let mut sorted = self.notes.clone();
        sorted.sort();
        for (k, v) in sorted {
            notes.insert(k, json!(v));
        }
        top.insert("notes".into(), Value::Object(notes));
        top.insert("result".into(), self.payload.clone());
        serde_json::to_string_pretty(&Value::Object(top)).expect("report serialization")
    }

    /// Flat CSV rendering for tabular payloads (arrays of uniform
    /// objects); scalar payloads render as a two-column table.
    pub fn to_csv(&self) -> String {
        fn row_of(obj: &Map<String, Value>) -> (Vec<String>, Vec<String>) {
            let mut keys: Vec<&String> = obj.keys().collect();
            keys.sort();
            let header = keys.iter().map(|k| (*k).clone()).collect();
            let cells = keys
                .iter()
                .map(|k| match &obj[k.as_str()] {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            (header, cells)
        }
        match &self.payload {
            Value::Array(rows) => {
                let mut out = String::new();
                let mut header_done = false;
                for row in rows {
                    if let Value::Object(obj) = row {
                        let (header, cells) = row_of(obj);
                        if !header_done {
                            out.push_str(&header.join(","));
                            out.push('\n');
                            header_done = true;
                        }
                        out.push_str(&cells.join(","));
                        out.push('\n');
                    }
                }
                out
            }
            Value::Object(obj) => {
                let mut out = String::from("key,value\n");
                let mut keys: Vec<&String> = obj.keys().collect();
                keys.sort();
                for k in keys {
                    let v = match &obj[k.as_str()] {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("{k},{v}\n"));
                }
                out
            }
            other => format!("value\n{other}\n"),
        }
    }
}

/// Serialize a charge vector with `num/den` rationals.
pub fn charges_json(c: &ChargeVector) -> Value {
    let mut obj = Map::new();
    for (j, v) in c.c.iter().enumerate() {
        obj.insert(format!("c{}", j + 1), json!(rat_string(v)));
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charges::total_charges;
    use crate::scalar::rat_int;

    const MINIMAL: &str = "\n[model]\nn = 2\np = 4\n\n[species]\nname = s\ngl = scalar\nparity = bosonic\norder = 2\n";

    #[test]
    fn minimal_model_parses() {
        let m = parse_model(MINIMAL).unwrap();
        assert_eq!(m.rep.n, 2);
        assert_eq!(m.p, Truncation::Numeric(4));
        assert_eq!(m.rep.blocks.len(), 1);
        assert_eq!(m.rep.blocks[0].el_order, 2);
    }

    #[test]
    fn unsupported_order_is_diagnosed() {
        let text = MINIMAL.replace("order = 2", "order = 5");
        let err = parse_model(&text).unwrap_err();
        assert!(err.iter().any(|d| d.message.contains("unsupported field-equation order")));
        assert!(err.iter().all(|d| d.line > 0));
    }

    #[test]
    fn unknown_keys_are_rejected_with_positions() {
        let text = format!("{MINIMAL}\nwibble = 3\n");
        let err = parse_model(&text).unwrap_err();
        assert!(err.iter().any(|d| d.message.contains("unknown key `wibble`")));
    }

    #[test]
    fn gauge_species_without_algebra_fails() {
        let text = MINIMAL.replace("gl = scalar", "gl = scalar\ngauge = charge(1)");
        let err = parse_model(&text).unwrap_err();
        assert!(err.iter().any(|d| d.message.contains("u1 gauge algebra")));
    }

    #[test]
    fn electrodynamics_shaped_preset() {
        // a gauge field with two fermionic spinor-surrogate blocks: the
        // order-weighted dimension sum cancels (2*4 = 1*4 + 1*4)
        let text = "\n[model]\nn = 4\np = symbolic\nnoether = rep, gauge\nnoether_antifields = dismiss\n\n[gauge]\nalgebra = u1\n\n[species]\nname = potential\ngl = covector\nparity = bosonic\norder = 2\n\n[species]\nname = matter\ngl = scalar\ngauge = charge(1)\nparity = fermionic\norder = 1\ncopies = 4\n\n[species]\nname = conjugate\ngl = scalar\ngauge = charge(-1)\nparity = fermionic\norder = 1\ncopies = 4\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.rep.blocks.len(), 3);
        let dims: Vec<usize> = m.rep.blocks.iter().map(|b| b.dim(4)).collect();
        assert_eq!(dims, vec![4, 4, 4]);
        // order-weighted signed sum vanishes
        let weighted: Rat = m
            .rep
            .blocks
            .iter()
            .map(|b| {
                b.parity.sign() * rat_int(b.el_order as i64) * rat_int(b.dim(4) as i64)
            })
            .sum();
        assert!(weighted.is_zero());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let m = parse_model(MINIMAL).unwrap();
        let text1 = serialize_model(&m);
        let m2 = parse_model(&text1).unwrap();
        let text2 = serialize_model(&m2);
        assert_eq!(text1, text2);
        // and the physics agrees
        assert_eq!(total_charges(&m).unwrap(), total_charges(&m2).unwrap());
    }

    #[test]
    fn reports_are_deterministic() {
        let payload = json!({"c4": "2", "c1": "0"});
        let r1 = Report::new("charges", MINIMAL, payload.clone()).with_note("seed", 7);
        let r2 = Report::new("charges", MINIMAL, payload).with_note("seed", 7);
        assert_eq!(r1.to_json(), r2.to_json());
        assert!(r1.to_json().contains("input_digest"));
        let csv = r1.to_csv();
        assert!(csv.starts_with("key,value"));
    }
}
