//! Pipeline behind the `hypergroup` command: load an instance, build and
//! check the expectation, construct the hypergroup, run the requested
//! verifications and produce one JSON document.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for unreadable input or unknown names, 3 when a precondition of the
//! construction fails (the document names the stage).

pub mod spec;

use hypergroup_core::catalog::{self, NamedGroup};
use hypergroup_core::fourier::{fourier_submultiplicativity_report_with, takesaki_cp_certificate_with};
use hypergroup_core::io::HypergroupDoc;
use hypergroup_core::representation::{
    characters, left_regular, right_regular, verify_representation, OperatorMatrix,
};
use hypergroup_core::scalar::{format_rational, int};
use hypergroup_core::{ConditionalExpectation, HypergroupTable, Report};
use serde_json::{json, Value};

pub use spec::InstanceSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

pub const CHECKS: [&str; 6] = ["djs", "dual", "haar", "representation", "cp", "fourier"];

const OP_NORM_SLACK: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
}

impl CliError {
    pub fn document(&self) -> Value {
        let kind = match self {
            CliError::Parse(_) => "parse_error",
            CliError::UnknownName(_) => "unknown_name",
        };
        json!({ "status": kind, "exit_code": EXIT_PARSE, "message": self.to_string() })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Relative tolerance of the spectral positivity tests.
    pub tolerance: f64,
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tolerance: 1e-9,
            samples: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub document: Value,
}

/// A constructed instance together with the stage log that produced it.
pub struct Prepared {
    pub group: NamedGroup,
    pub expectation: ConditionalExpectation,
    pub hypergroup: HypergroupTable,
    stages: Vec<Value>,
    header: Value,
}

fn report_stage(name: &str, report: &Report) -> Value {
    json!({ "stage": name, "passed": report.passed(), "report": report })
}

fn error_stage(name: &str, message: String) -> Value {
    json!({ "stage": name, "passed": false, "error": message })
}

fn header(spec: &InstanceSpec) -> Value {
    json!({
        "group": spec.group.label(),
        "expectation": spec.expectation.label(),
        "seed": spec.seed,
    })
}

fn precondition(header: Value, mut stages: Vec<Value>, stage: &str, entry: Value) -> Outcome {
    stages.push(entry);
    Outcome {
        exit_code: EXIT_PRECONDITION,
        document: json!({
            "instance": header,
            "status": "precondition_failed",
            "failed_stage": stage,
            "exit_code": EXIT_PRECONDITION,
            "stages": stages,
        }),
    }
}

/// Runs everything up to and including the construction. The inner `Err`
/// is a finished document for a failed precondition.
pub fn prepare(spec: &InstanceSpec) -> Result<Result<Prepared, Outcome>, CliError> {
    spec.expectation.check_name()?;
    for c in &spec.checks {
        if !CHECKS.contains(&c.as_str()) {
            return Err(CliError::UnknownName(format!("check `{c}`")));
        }
    }
    let head = header(spec);
    let mut stages = Vec::new();
    let group = match spec.group.resolve()? {
        Ok(g) => g,
        Err(e) => {
            return Ok(Err(precondition(head, stages, "validate_group", error_stage("validate_group", e.to_string()))))
        }
    };
    stages.push(json!({ "stage": "validate_group", "passed": true, "order": group.table.order() }));
    let p = match spec::build_expectation(spec, &group)? {
        Ok(p) => p,
        Err(e) => {
            return Ok(Err(precondition(
                head,
                stages,
                "build_expectation",
                error_stage("build_expectation", e.to_string()),
            )))
        }
    };
    stages.push(json!({ "stage": "build_expectation", "passed": true, "blocks": p.num_blocks() }));
    let axioms = p.verify_axioms(spec.seed);
    if !axioms.passed() {
        let entry = report_stage("verify_expectation_axioms", &axioms);
        return Ok(Err(precondition(head, stages, "verify_expectation_axioms", entry)));
    }
    stages.push(report_stage("verify_expectation_axioms", &axioms));
    let conditions = match p.verify_hypergroup_conditions(&group.table) {
        Ok(r) => r,
        Err(e) => {
            let entry = error_stage("verify_hypergroup_conditions", e.to_string());
            return Ok(Err(precondition(head, stages, "verify_hypergroup_conditions", entry)));
        }
    };
    if !conditions.passed() {
        let entry = report_stage("verify_hypergroup_conditions", &conditions);
        return Ok(Err(precondition(head, stages, "verify_hypergroup_conditions", entry)));
    }
    stages.push(report_stage("verify_hypergroup_conditions", &conditions));
    let h = match HypergroupTable::from_expectation_unchecked(&p, &group.table) {
        Ok(h) => h,
        Err(e) => {
            let entry = error_stage("construct_hypergroup", e.to_string());
            return Ok(Err(precondition(head, stages, "construct_hypergroup", entry)));
        }
    };
    stages.push(json!({ "stage": "construct_hypergroup", "passed": true, "points": h.size() }));
    Ok(Ok(Prepared {
        group,
        expectation: p,
        hypergroup: h,
        stages,
        header: head,
    }))
}

/// `haar_solve` agrees with the stored weights up to an exact scale.
pub fn haar_cross_check(h: &HypergroupTable) -> Report {
    let mut r = Report::new("Haar cross-check");
    let witness = match h.haar_solve() {
        Err(e) => Some(e.to_string()),
        Ok(x) => {
            let k = &h.haar()[h.identity()];
            x.coeffs
                .iter()
                .zip(h.haar())
                .position(|(xs, m)| xs.im != int(0) || &xs.re * k != *m)
                .map(|s| format!("s = {s}"))
        }
    };
    r.record("solved Haar measure proportional to stored weights", witness);
    r
}

/// Product rule and adjoint of the regular representations, contraction
/// bounds, and commutation of left and right operators.
pub fn representation_checks(h: &HypergroupTable) -> Report {
    let left = left_regular(h);
    let mut r = match verify_representation(&left, h) {
        Ok(r) => r,
        Err(e) => {
            let mut r = Report::new("representation conditions (i)-(iii)");
            r.record("dimensions", Some(e.to_string()));
            return r;
        }
    };
    r.subject = "left regular representation".into();
    let worst = left
        .iter()
        .enumerate()
        .map(|(s, l)| (s, l.op_norm()))
        .find(|(_, n)| *n > 1.0 + OP_NORM_SLACK)
        .map(|(s, n)| format!("s = {s}: {n}"));
    r.record("contraction", worst);
    match right_regular(h) {
        Ok(right) => {
            let w = left.iter().enumerate().find_map(|(s, a)| {
                right.iter().enumerate().find_map(|(t, b)| {
                    (a.mul(b).ok() != b.mul(a).ok()).then(|| format!("(L_{s}, R_{t})"))
                })
            });
            r.record("left and right operators commute", w);
        }
        Err(e) => r.automatic("left and right operators commute", &format!("skipped: {e}")),
    }
    r
}

fn requested(spec: &InstanceSpec, check: &str) -> bool {
    spec.checks.is_empty() || spec.checks.iter().any(|c| c == check)
}

/// The full pipeline. Checks not listed in `spec.checks` are skipped
/// (all run when the list is empty).
pub fn run_pipeline(spec: &InstanceSpec, opts: &Options) -> Result<Outcome, CliError> {
    let prepared = match prepare(spec)? {
        Ok(p) => p,
        Err(outcome) => return Ok(outcome),
    };
    let Prepared {
        hypergroup: h,
        mut stages,
        header,
        ..
    } = prepared;
    let mut all = true;
    let mut summary = serde_json::Map::new();
    summary.insert("points".into(), json!(h.size()));
    summary.insert("commutative".into(), json!(h.is_commutative()));
    summary.insert("unimodular".into(), json!(h.is_unimodular()));
    let mut push = |stages: &mut Vec<Value>, name: &str, r: Report| {
        all &= r.passed();
        stages.push(report_stage(name, &r));
    };
    if requested(spec, "djs") {
        push(&mut stages, "verify_djs", h.verify_djs());
    }
    if requested(spec, "dual") {
        push(&mut stages, "verify_dual_axioms", h.verify_dual_axioms());
    }
    if requested(spec, "haar") {
        push(&mut stages, "haar_cross_check", haar_cross_check(&h));
    }
    if requested(spec, "representation") {
        push(&mut stages, "representation_checks", representation_checks(&h));
    }
    if requested(spec, "cp") {
        match takesaki_cp_certificate_with(&h, opts.tolerance) {
            Ok(c) => {
                all &= c.is_cp;
                summary.insert("is_cp".into(), json!(c.is_cp));
                summary.insert("min_eigenvalue".into(), json!(c.min_eigenvalue));
                stages.push(json!({ "stage": "takesaki_cp_certificate", "passed": c.is_cp, "result": c }));
            }
            Err(e) => {
                all = false;
                stages.push(error_stage("takesaki_cp_certificate", e.to_string()));
            }
        }
    }
    if requested(spec, "fourier") {
        match fourier_submultiplicativity_report_with(&h, opts.samples, spec.seed, opts.tolerance) {
            Ok(r) => {
                let ok = r.report.passed();
                all &= ok;
                summary.insert("worst_submult_ratio".into(), json!(r.worst_ratio));
                stages.push(json!({ "stage": "fourier_submultiplicativity_report", "passed": ok, "result": r }));
            }
            Err(e) => {
                all = false;
                stages.push(error_stage("fourier_submultiplicativity_report", e.to_string()));
            }
        }
    }
    let exit_code = if all { EXIT_OK } else { EXIT_CHECK_FAILED };
    let mut doc = json!({
        "instance": header,
        "status": if all { "ok" } else { "check_failed" },
        "exit_code": exit_code,
        "stages": stages,
        "hypergroup": HypergroupDoc::from_table(&h),
    });
    doc.as_object_mut()
        .expect("object")
        .insert("summary".into(), Value::Object(summary));
    Ok(Outcome {
        exit_code,
        document: doc,
    })
}

/// Structure constants, Haar weights, modular function, involution and
/// identity of the constructed hypergroup.
pub fn emit_structure_constants(spec: &InstanceSpec) -> Result<Outcome, CliError> {
    Ok(match prepare(spec)? {
        Err(o) => o,
        Ok(p) => Outcome {
            exit_code: EXIT_OK,
            document: serde_json::to_value(HypergroupDoc::from_table(&p.hypergroup))
                .expect("serializable"),
        },
    })
}

/// Verifies a hand-authored or previously constructed table.
pub fn verify_table(doc: &HypergroupDoc) -> Result<Outcome, CliError> {
    let h = doc
        .to_table()
        .map_err(|e| CliError::Parse(format!("hypergroup table: {e}")))?;
    let reports = [h.verify_djs(), h.verify_dual_axioms(), haar_cross_check(&h)];
    let all = reports.iter().all(Report::passed);
    let exit_code = if all { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome {
        exit_code,
        document: json!({
            "status": if all { "ok" } else { "check_failed" },
            "exit_code": exit_code,
            "reports": reports,
        }),
    })
}

pub fn cp_check(spec: &InstanceSpec, opts: &Options) -> Result<Outcome, CliError> {
    let p = match prepare(spec)? {
        Err(o) => return Ok(o),
        Ok(p) => p,
    };
    let c = takesaki_cp_certificate_with(&p.hypergroup, opts.tolerance)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let exit_code = if c.is_cp { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome {
        exit_code,
        document: json!({
            "instance": p.header,
            "is_cp": c.is_cp,
            "min_eigenvalue": c.min_eigenvalue,
            "norm": c.norm,
            "matrix_dim": c.matrix_dim,
            "hermitian": c.hermitian,
            "seed": spec.seed,
            "exit_code": exit_code,
        }),
    })
}

pub fn norms(spec: &InstanceSpec, opts: &Options) -> Result<Outcome, CliError> {
    let p = match prepare(spec)? {
        Err(o) => return Ok(o),
        Ok(p) => p,
    };
    let r = fourier_submultiplicativity_report_with(&p.hypergroup, opts.samples, spec.seed, opts.tolerance)
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let exit_code = if r.report.passed() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome {
        exit_code,
        document: json!({
            "instance": p.header,
            "worst_submult_ratio": r.worst_ratio,
            "seed": spec.seed,
            "exit_code": exit_code,
            "result": r,
        }),
    })
}

fn pairs(ops: &[OperatorMatrix]) -> Value {
    json!(ops.iter().map(OperatorMatrix::to_pairs).collect::<Vec<_>>())
}

/// Left and right regular operators and, for commutative hypergroups, the
/// characters.
pub fn reps(spec: &InstanceSpec) -> Result<Outcome, CliError> {
    let p = match prepare(spec)? {
        Err(o) => return Ok(o),
        Ok(p) => p,
    };
    let h = &p.hypergroup;
    let right = match right_regular(h) {
        Ok(r) => pairs(&r),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let chars = match characters(h) {
        Ok(cs) => json!(cs
            .iter()
            .map(|c| {
                json!({
                    "values": c.values.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                    "exact": c.exact.as_ref().map(|v| v
                        .iter()
                        .map(|z| [format_rational(&z.re), format_rational(&z.im)])
                        .collect::<Vec<_>>()),
                })
            })
            .collect::<Vec<_>>()),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(Outcome {
        exit_code: EXIT_OK,
        document: json!({
            "instance": p.header,
            "haar": h.haar().iter().map(format_rational).collect::<Vec<_>>(),
            "left": pairs(&left_regular(h)),
            "right": right,
            "characters": chars,
        }),
    })
}

/// Built-in groups with their element names, and the expectation builders.
pub fn catalog_list() -> Value {
    let groups: Vec<Value> = catalog::group_names()
        .iter()
        .map(|n| {
            let g = catalog::group(n).expect("catalog name");
            json!({ "name": n, "order": g.table.order(), "elements": g.element_names })
        })
        .collect();
    json!({ "groups": groups, "builders": spec::BUILDERS })
}

/// Validates the group and, when given, the expectation and the
/// construction hypotheses.
pub fn validate(spec: &InstanceSpec) -> Result<Outcome, CliError> {
    Ok(match prepare(spec)? {
        Err(o) => o,
        Ok(p) => Outcome {
            exit_code: EXIT_OK,
            document: json!({
                "instance": p.header,
                "status": "ok",
                "exit_code": EXIT_OK,
                "stages": p.stages,
            }),
        },
    })
}

pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}
