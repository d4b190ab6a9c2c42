//! Self-contained verdict reports.
//!
//! Every CLI run can emit a structured JSON report carrying the command,
//! digests of the input files, the parsed systems themselves, the verdict
//! with its condition breakdown, and — for the exact decision procedures —
//! a certificate: the relation or subspace bases written as exact strings.
//! Because the systems are embedded, a report is self-contained: `check`
//! re-verifies the certificate from the report alone, with no access to
//! the original input files.
//!
//! Certificates are compared semantically (as subspaces, not as strings),
//! so a rescaled but equivalent basis still verifies, while any change
//! that alters the claimed subspace or verdict is flagged.

use crate::bisim::{is_bisimulation, maximal_bisimulation, BisimVerdict, ConditionFlags};
use crate::field::{parse_rational, Field, Rat};
use crate::geometric::{consistent_subset, ConsistentResult};
use crate::matrix::Matrix;
use crate::model::{
    matrix_in_field, matrix_to_value, parse_matrix, parse_system_value, system_to_value, DaeSystem,
};
use crate::regular::{
    is_regular, pencil_polynomial, transfer_equal_with_samples, PencilReport, TransferComparison,
    TransferWitness,
};
use crate::relation::Relation;
use crate::simrel::{
    abstract_system, is_simulation, maximal_simulation, Abstraction, SimConditionFlags, SimVerdict,
};
use crate::subspace::Subspace;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt;
use std::str::FromStr;

/// Scalar field a run computes over: exact rationals by default, or a
/// small prime field for diagnostics and cross-checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldChoice {
    Rational,
    Prime(u64),
}

impl FromStr for FieldChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(FieldChoice::Rational),
            "gf:2" => Ok(FieldChoice::Prime(2)),
            "gf:3" => Ok(FieldChoice::Prime(3)),
            "gf:5" => Ok(FieldChoice::Prime(5)),
            "gf:7" => Ok(FieldChoice::Prime(7)),
            other => Err(format!(
                "unknown field {other:?}; supported: rational, gf:2, gf:3, gf:5, gf:7"
            )),
        }
    }
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldChoice::Rational => write!(f, "rational"),
            FieldChoice::Prime(p) => write!(f, "gf:{p}"),
        }
    }
}

/// Stamps out `$body` with the type alias `$ty` bound to the scalar type
/// selected by a [`FieldChoice`]. Only the primes `FromStr` accepts occur.
macro_rules! with_field {
    ($choice:expr, $ty:ident, $body:block) => {
        match $choice {
            crate::report::FieldChoice::Rational => {
                type $ty = crate::field::Rat;
                $body
            }
            crate::report::FieldChoice::Prime(2) => {
                type $ty = crate::field::Gf<2>;
                $body
            }
            crate::report::FieldChoice::Prime(3) => {
                type $ty = crate::field::Gf<3>;
                $body
            }
            crate::report::FieldChoice::Prime(5) => {
                type $ty = crate::field::Gf<5>;
                $body
            }
            crate::report::FieldChoice::Prime(7) => {
                type $ty = crate::field::Gf<7>;
                $body
            }
            crate::report::FieldChoice::Prime(p) => {
                unreachable!("field parsing admits no other prime, got {p}")
            }
        }
    };
}
pub(crate) use with_field;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// The structured result of one CLI run. Identical inputs produce
/// byte-identical reports except for `timing_ms`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    /// Subcommand followed by its file arguments, as invoked.
    pub command: Vec<String>,
    /// Scalar field of the run (`"rational"` or `"gf:P"`).
    pub field: String,
    pub inputs: Vec<InputDigest>,
    /// The parsed systems, re-serialized exactly; `check` works from these.
    pub systems: Vec<Value>,
    /// Additional matrix input (the abstraction map), when the command takes one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_input: Option<Value>,
    /// Whether the decided property holds (the exit-0 condition).
    pub holds: bool,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    /// Floating-point measurements (simulation / validation commands only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Value>,
    pub timing_ms: u64,
}

impl Report {
    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Report, String> {
        serde_json::from_str(text).map_err(|e| format!("not a report file: {e}"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

// ---- certificate builders (shared by the CLI and by re-verification) ----

pub fn subspace_value<F: Field>(s: &Subspace<F>) -> Value {
    json!({ "ambient": s.ambient(), "basis": matrix_to_value(s.basis()) })
}

pub fn optional_subspace_value<F: Field>(s: &Option<Subspace<F>>) -> Value {
    match s {
        None => json!("empty"),
        Some(s) => subspace_value(s),
    }
}

pub fn relation_value<F: Field>(r: &Relation<F>) -> Value {
    json!({ "n1": r.n1(), "n2": r.n2(), "basis": matrix_to_value(r.space().basis()) })
}

pub fn bisim_conditions_value(f: &ConditionFlags) -> Value {
    json!({
        "cond_a": f.cond_a, "cond_b": f.cond_b, "cond_c": f.cond_c, "cond_d": f.cond_d,
        "proj1_in": f.proj1_in, "proj2_in": f.proj2_in,
        "proj1_eq": f.proj1_eq, "proj2_eq": f.proj2_eq,
    })
}

pub fn sim_conditions_value(f: &SimConditionFlags) -> Value {
    json!({
        "cond_a": f.cond_a, "cond_b": f.cond_b, "cond_c": f.cond_c, "cond_d": f.cond_d,
        "proj1_in": f.proj1_in, "proj2_in": f.proj2_in,
        "proj1_eq": f.proj1_eq, "proj2_eq": f.proj2_eq,
    })
}

pub fn consistent_certificate<F: Field>(result: &ConsistentResult<F>) -> Value {
    json!({
        "kind": "consistent-subset",
        "v0_star": subspace_value(&result.v0_star),
        "v_star": optional_subspace_value(&result.v_star),
        "iterations": result.iterations,
    })
}

pub fn bisim_certificate<F: Field>(verdict: &BisimVerdict<F>) -> Value {
    json!({
        "kind": "bisimulation",
        "relation": relation_value(&verdict.examined),
        "v1_star": optional_subspace_value(&verdict.v1_star),
        "v2_star": optional_subspace_value(&verdict.v2_star),
        "iterations": verdict.iterations,
    })
}

pub fn sim_certificate<F: Field>(verdict: &SimVerdict<F>) -> Value {
    json!({
        "kind": "simulation",
        "relation": relation_value(&verdict.examined),
        "v1_star": optional_subspace_value(&verdict.v1_star),
        "v2_star": optional_subspace_value(&verdict.v2_star),
        "iterations": verdict.iterations,
    })
}

pub fn pencil_certificate(report: &PencilReport, det_poly: &[Rat]) -> Value {
    json!({
        "kind": "pencil",
        "det_poly": det_poly.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "is_square": report.is_square,
        "det_poly_nonzero": report.det_poly_nonzero,
        "geometric_regular": report.geometric_regular,
        "regular": report.regular,
    })
}

pub fn transfer_certificate(cmp: &TransferComparison) -> Value {
    json!({
        "kind": "transfer",
        "sample_points": cmp.sample_points.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "equal": cmp.equal,
        "witness": cmp.witness.as_ref().map(|w| json!({
            "s": w.s.to_string(),
            "row": w.row,
            "col": w.col,
            "left": w.left.to_string(),
            "right": w.right.to_string(),
        })),
    })
}

pub fn abstraction_certificate(abs: &Abstraction<Rat>) -> Value {
    json!({
        "kind": "abstraction",
        "h": matrix_to_value(&abs.h),
        "h_plus": matrix_to_value(&abs.h_plus),
        "c_bar": matrix_to_value(&abs.c_bar),
        "abstract_system": system_to_value(&abs.abstract_sys),
        "canonical_relation": relation_value(&abs.canonical_sim),
    })
}

// ---- certificate parsers ----

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key)
        .ok_or_else(|| format!("certificate is missing {key:?}"))
}

fn usize_of(v: &Value, key: &str) -> Result<usize, String> {
    field_of(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| format!("certificate field {key:?} must be a non-negative integer"))
}

fn matrix_of<F: Field>(v: &Value, key: &str) -> Result<Matrix<F>, String> {
    let raw = parse_matrix(key, field_of(v, key)?).map_err(|e| e.to_string())?;
    matrix_in_field::<F>(&raw).map_err(|e| e.to_string())
}

fn subspace_of<F: Field>(v: &Value) -> Result<Subspace<F>, String> {
    let ambient = usize_of(v, "ambient")?;
    let basis = matrix_of::<F>(v, "basis")?;
    if basis.rows() != ambient {
        return Err(format!(
            "subspace basis has {} rows but claims ambient dimension {ambient}",
            basis.rows()
        ));
    }
    Ok(Subspace::from_columns(&basis))
}

fn optional_subspace_of<F: Field>(v: &Value) -> Result<Option<Subspace<F>>, String> {
    if v == &json!("empty") {
        return Ok(None);
    }
    subspace_of::<F>(v).map(Some)
}

fn relation_of<F: Field>(v: &Value) -> Result<Relation<F>, String> {
    let n1 = usize_of(v, "n1")?;
    let n2 = usize_of(v, "n2")?;
    let basis = matrix_of::<F>(v, "basis")?;
    if basis.rows() != n1 + n2 {
        return Err(format!(
            "relation basis has {} rows for a {}+{} product space",
            basis.rows(),
            n1,
            n2
        ));
    }
    Ok(Relation::from_subspace(
        n1,
        n2,
        Subspace::from_columns(&basis),
    ))
}

fn rationals_of(v: &Value, key: &str) -> Result<Vec<Rat>, String> {
    let Some(list) = field_of(v, key)?.as_array() else {
        return Err(format!("certificate field {key:?} must be an array"));
    };
    list.iter()
        .map(|entry| {
            entry
                .as_str()
                .ok_or_else(|| format!("{key:?} entries must be strings"))
                .and_then(|s| parse_rational(s))
        })
        .collect()
}

fn bool_of(v: &Value, key: &str) -> Result<bool, String> {
    field_of(v, key)?
        .as_bool()
        .ok_or_else(|| format!("certificate field {key:?} must be a boolean"))
}

// ---- re-verification ----

/// Outcome of re-verifying a report. `Tampered` means the report parsed
/// but its claims do not reproduce; `Malformed` means the report cannot be
/// interpreted (or carries nothing checkable).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckVerdict {
    Intact,
    Tampered(String),
    Malformed(String),
}

fn parsed_systems(report: &Report, expect: usize) -> Result<Vec<DaeSystem<Rat>>, String> {
    if report.systems.len() != expect {
        return Err(format!(
            "report embeds {} systems, expected {expect}",
            report.systems.len()
        ));
    }
    report
        .systems
        .iter()
        .map(|v| parse_system_value(v).map_err(|e| e.to_string()))
        .collect()
}

fn certificate_kind<'a>(cert: &'a Value, expected: &str) -> Result<&'a Value, String> {
    let kind = field_of(cert, "kind")?
        .as_str()
        .ok_or("certificate kind must be a string")?;
    if kind != expected {
        return Err(format!(
            "certificate kind {kind:?} does not match the command (expected {expected:?})"
        ));
    }
    Ok(cert)
}

fn mismatch(what: &str) -> CheckVerdict {
    CheckVerdict::Tampered(format!("{what} does not match the recomputation"))
}

fn check_consistent<F: Field>(sys: &DaeSystem<Rat>, cert: &Value, holds: bool) -> CheckVerdict {
    let sys = match sys.map_field::<F>() {
        Ok(s) => s,
        Err(e) => return CheckVerdict::Malformed(e.to_string()),
    };
    let (v0, v_star, iterations) = match (|| -> Result<_, String> {
        Ok((
            subspace_of::<F>(field_of(cert, "v0_star")?)?,
            optional_subspace_of::<F>(field_of(cert, "v_star")?)?,
            usize_of(cert, "iterations")?,
        ))
    })() {
        Ok(t) => t,
        Err(e) => return CheckVerdict::Malformed(e),
    };
    let recomputed = consistent_subset(&sys);
    if recomputed.v0_star != v0 {
        return mismatch("the undisturbed consistent subset");
    }
    if recomputed.v_star != v_star {
        return mismatch("the consistent subset");
    }
    if recomputed.iterations != iterations {
        return mismatch("the iteration count");
    }
    if holds != recomputed.v_star.is_some() {
        return mismatch("the recorded verdict");
    }
    CheckVerdict::Intact
}

fn check_relation_report<F: Field>(
    command: &str,
    s1: &DaeSystem<Rat>,
    s2: &DaeSystem<Rat>,
    cert: &Value,
    holds: bool,
) -> CheckVerdict {
    let (s1, s2) = match (s1.map_field::<F>(), s2.map_field::<F>()) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CheckVerdict::Malformed(e.to_string()),
    };
    let parsed = (|| -> Result<_, String> {
        Ok((
            relation_of::<F>(field_of(cert, "relation")?)?,
            optional_subspace_of::<F>(field_of(cert, "v1_star")?)?,
            optional_subspace_of::<F>(field_of(cert, "v2_star")?)?,
        ))
    })();
    let (relation, v1, v2) = match parsed {
        Ok(t) => t,
        Err(e) => return CheckVerdict::Malformed(e),
    };
    if command == "bisim" {
        let recomputed = match maximal_bisimulation(&s1, &s2) {
            Ok(v) => v,
            Err(e) => return CheckVerdict::Tampered(format!("recomputation failed: {e}")),
        };
        if recomputed.examined.space() != relation.space() {
            return mismatch("the certified relation");
        }
        if recomputed.v1_star != v1 || recomputed.v2_star != v2 {
            return mismatch("a consistent subset");
        }
        // independent pass: the recorded relation itself through the checker
        let direct = match is_bisimulation(&relation, &s1, &s2) {
            Ok(v) => v,
            Err(e) => return CheckVerdict::Tampered(format!("recomputation failed: {e}")),
        };
        if holds != direct.conditions.bisimilar() {
            return mismatch("the recorded verdict");
        }
    } else {
        let recomputed = match maximal_simulation(&s1, &s2) {
            Ok(v) => v,
            Err(e) => return CheckVerdict::Tampered(format!("recomputation failed: {e}")),
        };
        if recomputed.examined.space() != relation.space() {
            return mismatch("the certified relation");
        }
        if recomputed.v1_star != v1 || recomputed.v2_star != v2 {
            return mismatch("a consistent subset");
        }
        let direct = match is_simulation(&relation, &s1, &s2) {
            Ok(v) => v,
            Err(e) => return CheckVerdict::Tampered(format!("recomputation failed: {e}")),
        };
        if holds != direct.conditions.simulated_by() {
            return mismatch("the recorded verdict");
        }
    }
    CheckVerdict::Intact
}

fn check_regular(sys: &DaeSystem<Rat>, cert: &Value, holds: bool) -> CheckVerdict {
    let (det_poly, recorded_regular) = match (|| -> Result<_, String> {
        Ok((rationals_of(cert, "det_poly")?, bool_of(cert, "regular")?))
    })() {
        Ok(t) => t,
        Err(e) => return CheckVerdict::Malformed(e),
    };
    let report = match is_regular(sys) {
        Ok(r) => r,
        Err(e) => return CheckVerdict::Tampered(format!("recomputation failed: {e}")),
    };
    if pencil_polynomial(&sys.e, &sys.a) != det_poly {
        return mismatch("the determinant polynomial");
    }
    if report.regular != recorded_regular || holds != report.regular {
        return mismatch("the recorded verdict");
    }
    CheckVerdict::Intact
}

fn check_transfer(
    s1: &DaeSystem<Rat>,
    s2: &DaeSystem<Rat>,
    cert: &Value,
    holds: bool,
) -> CheckVerdict {
    let (points, recorded_equal, witness) = match (|| -> Result<_, String> {
        let witness = match field_of(cert, "witness")? {
            Value::Null => None,
            w => Some(TransferWitness {
                s: parse_rational(
                    field_of(w, "s")?
                        .as_str()
                        .ok_or("witness s must be a string")?,
                )?,
                row: usize_of(w, "row")?,
                col: usize_of(w, "col")?,
                left: parse_rational(
                    field_of(w, "left")?
                        .as_str()
                        .ok_or("witness left must be a string")?,
                )?,
                right: parse_rational(
                    field_of(w, "right")?
                        .as_str()
                        .ok_or("witness right must be a string")?,
                )?,
            }),
        };
        Ok((
            rationals_of(cert, "sample_points")?,
            bool_of(cert, "equal")?,
            witness,
        ))
    })() {
        Ok(t) => t,
        Err(e) => return CheckVerdict::Malformed(e),
    };
    let recomputed = match transfer_equal_with_samples(s1, s2, points.len()) {
        Ok(c) => c,
        Err(e) => return CheckVerdict::Tampered(format!("recomputation failed: {e}")),
    };
    if recomputed.sample_points != points {
        return mismatch("the sample schedule");
    }
    if recomputed.equal != recorded_equal || holds != recorded_equal {
        return mismatch("the recorded verdict");
    }
    if recomputed.witness != witness {
        return mismatch("the disagreement witness");
    }
    CheckVerdict::Intact
}

fn check_abstraction(report: &Report, cert: &Value) -> CheckVerdict {
    let sys = match parsed_systems(report, 1) {
        Ok(mut v) => v.pop().expect("one system"),
        Err(e) => return CheckVerdict::Malformed(e),
    };
    let Some(h_value) = &report.matrix_input else {
        return CheckVerdict::Malformed("abstraction report is missing its map input".into());
    };
    let h = match parse_matrix("H", h_value) {
        Ok(m) => m,
        Err(e) => return CheckVerdict::Malformed(e.to_string()),
    };
    let recomputed = match abstract_system(&sys, &h) {
        Ok(a) => a,
        Err(e) => return CheckVerdict::Tampered(format!("recomputation failed: {e}")),
    };
    if &abstraction_certificate(&recomputed) != cert {
        return mismatch("the abstraction certificate");
    }
    CheckVerdict::Intact
}

/// Re-verifies a report from its embedded contents alone.
pub fn reverify(report: &Report) -> CheckVerdict {
    let Some(command) = report.command.first().map(String::as_str) else {
        return CheckVerdict::Malformed("report carries no command".into());
    };
    let field = match FieldChoice::from_str(&report.field) {
        Ok(f) => f,
        Err(e) => return CheckVerdict::Malformed(e),
    };
    let Some(certificate) = &report.certificate else {
        return CheckVerdict::Malformed(format!(
            "a {command} report carries no certificate to re-verify"
        ));
    };
    match command {
        "consistent" => {
            let cert = match certificate_kind(certificate, "consistent-subset") {
                Ok(c) => c,
                Err(e) => return CheckVerdict::Malformed(e),
            };
            let sys = match parsed_systems(report, 1) {
                Ok(mut v) => v.pop().expect("one system"),
                Err(e) => return CheckVerdict::Malformed(e),
            };
            with_field!(field, F, {
                check_consistent::<F>(&sys, cert, report.holds)
            })
        }
        "bisim" | "simrel" => {
            let kind = if command == "bisim" {
                "bisimulation"
            } else {
                "simulation"
            };
            let cert = match certificate_kind(certificate, kind) {
                Ok(c) => c,
                Err(e) => return CheckVerdict::Malformed(e),
            };
            let systems = match parsed_systems(report, 2) {
                Ok(v) => v,
                Err(e) => return CheckVerdict::Malformed(e),
            };
            with_field!(field, F, {
                check_relation_report::<F>(command, &systems[0], &systems[1], cert, report.holds)
            })
        }
        "regular" => {
            if field != FieldChoice::Rational {
                return CheckVerdict::Malformed("pencil reports are rational-only".into());
            }
            let cert = match certificate_kind(certificate, "pencil") {
                Ok(c) => c,
                Err(e) => return CheckVerdict::Malformed(e),
            };
            match parsed_systems(report, 1) {
                Ok(v) => check_regular(&v[0], cert, report.holds),
                Err(e) => CheckVerdict::Malformed(e),
            }
        }
        "transfer-eq" => {
            if field != FieldChoice::Rational {
                return CheckVerdict::Malformed("transfer reports are rational-only".into());
            }
            let cert = match certificate_kind(certificate, "transfer") {
                Ok(c) => c,
                Err(e) => return CheckVerdict::Malformed(e),
            };
            match parsed_systems(report, 2) {
                Ok(v) => check_transfer(&v[0], &v[1], cert, report.holds),
                Err(e) => CheckVerdict::Malformed(e),
            }
        }
        "abstract" => {
            if field != FieldChoice::Rational {
                return CheckVerdict::Malformed("abstraction reports are rational-only".into());
            }
            let cert = match certificate_kind(certificate, "abstraction") {
                Ok(c) => c,
                Err(e) => return CheckVerdict::Malformed(e),
            };
            check_abstraction(report, cert)
        }
        other => CheckVerdict::Malformed(format!(
            "a {other} report carries no certificate to re-verify"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests_support::sys;

    fn integrator() -> DaeSystem<Rat> {
        sys(&[&[1]], &[&[0]], &[&[1]], &[], &[&[1]])
    }

    fn disturbed_partner() -> DaeSystem<Rat> {
        sys(
            &[&[1, 0], &[0, 1]],
            &[&[0, 0], &[0, 0]],
            &[&[1], &[0]],
            &[&[0], &[1]],
            &[&[1, 0]],
        )
    }

    fn bisim_report() -> Report {
        let s1 = integrator();
        let s2 = disturbed_partner();
        let verdict = maximal_bisimulation(&s1, &s2).unwrap();
        Report {
            command: vec!["bisim".into(), "a.json".into(), "b.json".into()],
            field: "rational".into(),
            inputs: vec![],
            systems: vec![system_to_value(&s1), system_to_value(&s2)],
            matrix_input: None,
            holds: verdict.conditions.bisimilar(),
            summary: String::new(),
            conditions: Some(bisim_conditions_value(&verdict.conditions)),
            certificate: Some(bisim_certificate(&verdict)),
            metrics: None,
            timing_ms: 0,
        }
    }

    #[test]
    fn intact_bisim_report_reverifies() {
        assert_eq!(reverify(&bisim_report()), CheckVerdict::Intact);
    }

    #[test]
    fn tampering_with_the_relation_basis_is_detected() {
        let mut report = bisim_report();
        let cert = report.certificate.as_mut().unwrap();
        cert["relation"]["basis"][0][0] = json!("7");
        assert!(matches!(reverify(&report), CheckVerdict::Tampered(_)));
    }

    #[test]
    fn tampering_with_the_verdict_flag_is_detected() {
        let mut report = bisim_report();
        report.holds = !report.holds;
        assert!(matches!(reverify(&report), CheckVerdict::Tampered(_)));
    }

    #[test]
    fn tampering_with_an_embedded_system_is_detected() {
        let mut report = bisim_report();
        report.systems[0]["A"][0][0] = json!("5");
        assert!(matches!(reverify(&report), CheckVerdict::Tampered(_)));
    }

    #[test]
    fn reports_without_certificates_are_rejected_as_uncheckable() {
        let mut report = bisim_report();
        report.command[0] = "validate".into();
        report.certificate = None;
        assert!(matches!(reverify(&report), CheckVerdict::Malformed(_)));
    }

    #[test]
    fn consistent_report_roundtrip_and_tamper() {
        let s = integrator();
        let result = consistent_subset(&s);
        let mut report = Report {
            command: vec!["consistent".into(), "a.json".into()],
            field: "rational".into(),
            inputs: vec![],
            systems: vec![system_to_value(&s)],
            matrix_input: None,
            holds: result.v_star.is_some(),
            summary: String::new(),
            conditions: None,
            certificate: Some(consistent_certificate(&result)),
            metrics: None,
            timing_ms: 0,
        };
        assert_eq!(reverify(&report), CheckVerdict::Intact);
        report.certificate.as_mut().unwrap()["v_star"] = json!("empty");
        assert!(matches!(reverify(&report), CheckVerdict::Tampered(_)));
    }

    #[test]
    fn rescaled_but_equivalent_bases_still_verify() {
        let mut report = bisim_report();
        let cert = report.certificate.as_mut().unwrap();
        // double every entry of the relation basis: same subspace
        let basis = cert["relation"]["basis"].clone();
        if let Value::Array(rows) = &basis {
            let doubled: Vec<Value> = rows
                .iter()
                .map(|row| {
                    Value::Array(
                        row.as_array()
                            .unwrap()
                            .iter()
                            .map(|e| {
                                let r = parse_rational(e.as_str().unwrap()).unwrap();
                                Value::String((r * Rat::from_int(2)).to_string())
                            })
                            .collect(),
                    )
                })
                .collect();
            cert["relation"]["basis"] = Value::Array(doubled);
        } else {
            panic!("expected a dense basis");
        }
        assert_eq!(reverify(&report), CheckVerdict::Intact);
    }

    #[test]
    fn digests_are_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
