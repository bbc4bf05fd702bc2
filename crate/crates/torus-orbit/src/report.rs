//! JSON and CSV rendering of library results.

use serde_json::{json, Value};

use torus_orbit_core::fixed_points::{
    FixRegion, FixedPointIndex, FixedPointRecord, FixedPointSearch, GeneratorNormalization, IndexSum,
    NormalizationOutcome, OrbitReport, PipelineFailure,
};
use torus_orbit_core::mcg_algebra::{InconclusiveReason, IntMatrix2, McgClassification, Obstruction, RatMatrix2, Word};
use torus_orbit_core::rotation::RotationEstimate;

use crate::config::RunConfig;

pub const FORMAT_VERSION: &str = "torus-orbit-report/1";

pub fn matrix(m: &IntMatrix2) -> Value {
    json!(m.rows())
}

pub fn rational_matrix(m: &RatMatrix2) -> Value {
    let e = m.entries();
    json!([[e[0][0].to_string(), e[0][1].to_string()], [e[1][0].to_string(), e[1][1].to_string()]])
}

/// Letters as signed 1-based generator indices, negative for inverses.
pub fn word(w: &Word) -> Value {
    json!(w.to_signed())
}

pub fn classification(c: &McgClassification) -> Value {
    let mut v = match c {
        McgClassification::Trivial => json!({}),
        McgClassification::Cyclic { root, root_word, powers } => json!({
            "root": matrix(root),
            "root_word": word(root_word),
            "powers": powers.iter().map(|p| json!({"sign": p.sign, "exponent": p.exponent})).collect::<Vec<_>>(),
        }),
        McgClassification::PlusMinusCyclic { root, root_word, minus_identity_word, powers } => json!({
            "root": matrix(root),
            "root_word": word(root_word),
            "minus_identity_word": word(minus_identity_word),
            "powers": powers.iter().map(|p| json!({"sign": p.sign, "exponent": p.exponent})).collect::<Vec<_>>(),
        }),
        McgClassification::DihedralH { conjugator, table } => json!({
            "conjugator": rational_matrix(conjugator),
            "table": table.iter().map(|e| json!({
                "matrix": matrix(&e.matrix),
                "word": word(&e.word),
                "normal_form": matrix(&e.normal_form),
            })).collect::<Vec<_>>(),
        }),
        McgClassification::NotNilpotent { witness, value, obstruction } => json!({
            "witness": word(witness),
            "value": matrix(value),
            "obstruction": match obstruction {
                Obstruction::CommutatorNotCentral => "commutator-not-central",
            },
        }),
        McgClassification::Inconclusive(reason) => match reason {
            InconclusiveReason::NoInfiniteOrderElement => json!({"reason": "no-infinite-order-element"}),
            InconclusiveReason::NoCertifyingRoot { candidates_tried } => {
                json!({"reason": "no-certifying-root", "candidates_tried": candidates_tried})
            }
            InconclusiveReason::UnrecognizedFiniteGroup { order } => {
                json!({"reason": "unrecognized-finite-group", "order": order})
            }
            InconclusiveReason::Overflow => json!({"reason": "overflow"}),
        },
    };
    v["tag"] = json!(c.tag());
    v
}

pub fn region(r: &FixRegion) -> Value {
    json!({
        "min_singular": r.min_singular,
        "max_singular": r.max_singular,
        "displacement_bound": r.displacement_bound,
        "margin": r.margin,
        "radius": r.radius,
        "lift_bound": r.lift_bound(),
    })
}

fn index_name(i: FixedPointIndex) -> Value {
    match i.value() {
        Some(v) => json!(v),
        None => json!("degenerate"),
    }
}

pub fn record(r: &FixedPointRecord) -> Value {
    json!({
        "torus_point": r.torus_point,
        "location": r.location,
        "lift_vector": r.lift_vector,
        "residual": r.residual,
        "det": r.det,
        "index": index_name(r.index),
    })
}

pub fn search(s: &FixedPointSearch) -> Value {
    json!({
        "records": s.records.iter().map(record).collect::<Vec<_>>(),
        "seeds": s.seeds,
        "newton_failures": s.newton_failures,
        "bound_violations": s.bound_violations,
    })
}

pub fn index_sum(s: &IndexSum) -> Value {
    match s {
        IndexSum::Pass(sum) => json!({"status": "pass", "sum": sum}),
        IndexSum::Mismatch { sum, expected } => json!({"status": "mismatch", "sum": sum, "expected": expected}),
    }
}

pub fn normalization(n: &GeneratorNormalization) -> Value {
    let outcome = match &n.outcome {
        NormalizationOutcome::Irrotational { shift } => json!({"kind": "irrotational", "shift": shift}),
        NormalizationOutcome::Power { power, shift } => json!({"kind": "power", "power": power, "shift": shift}),
        NormalizationOutcome::NotIrrotational { residuals } => {
            json!({"kind": "not-irrotational", "residuals": residuals})
        }
    };
    json!({
        "generator": n.generator + 1,
        "label": n.label,
        "rotation_vectors": n.rotation_vectors,
        "outcome": outcome,
    })
}

pub fn orbit_summary(r: &OrbitReport) -> Value {
    json!({
        "orbit_size": r.points.len(),
        "points": r.points,
        "generator_residuals": r.generator_residuals,
        "common_fixed_point": r.common_fixed_point,
        "common_residual": r.common_residual,
        "lift_vector": r.lift_vector,
        "psi_word": word(&r.psi_word),
        "psi_class": matrix(&r.psi_class),
        "lefschetz": r.lefschetz,
    })
}

pub fn orbit_full(r: &OrbitReport) -> Value {
    let mut v = orbit_summary(r);
    v["classification"] = classification(&r.classification);
    v["region"] = region(&r.region);
    v["psi_fixed_points"] = search(&r.psi_fixed_points);
    v["m_cap"] = json!(r.m_cap);
    v["battery_size"] = json!(r.battery_size);
    v["normalizations"] = json!(r.normalizations.iter().map(normalization).collect::<Vec<_>>());
    v["log"] = json!(r.log);
    v
}

pub fn failure(f: &PipelineFailure, full: bool) -> Value {
    let mut v = json!({
        "stage": f.stage.name(),
        "stage_index": f.stage.index(),
        "diagnostics": f.diagnostics,
        "inconclusive": f.inconclusive,
    });
    if full {
        v["classification"] = f.classification.as_ref().map(classification).unwrap_or(Value::Null);
        v["log"] = json!(f.log);
    }
    v
}

pub fn rotation_estimate(e: &RotationEstimate) -> Value {
    json!({
        "samples": e.samples.iter().map(|s| json!({
            "start": s.start,
            "horizon": s.horizon,
            "average": s.average,
        })).collect::<Vec<_>>(),
        "hull": e.hull,
        "diameter": e.diameter(),
    })
}

/// A CSV body: header plus rows of already formatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Top-level document written for every command.
pub struct Report<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub status: &'a str,
    pub exit_code: u8,
    pub result: Value,
    pub table: Table,
}

impl Report<'_> {
    pub fn to_json(&self) -> String {
        let doc = json!({
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "config": self.config,
            "status": self.status,
            "exit_code": self.exit_code,
            "result": self.result,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Provenance as `#` comment lines, then the table.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut out = format!(
            "# format_version: {FORMAT_VERSION}\n# command: {}\n# status: {}\n# exit_code: {}\n# config: {}\n",
            self.command,
            self.status,
            self.exit_code,
            serde_json::to_string(self.config).expect("config serializes"),
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        let body = w.into_inner().map_err(|e| e.into_error())?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use torus_orbit_core::mcg_algebra::{classify_nilpotent_subgroup, ClosureCaps};

    #[test]
    fn words_are_signed_and_one_based() {
        let w = Word::from_signed(&[1, -2, 2]).unwrap();
        assert_eq!(word(&w), json!([1, -2, 2]));
    }

    #[test]
    fn dihedral_classification_fields() {
        let gens = [IntMatrix2::new(0, -1, 1, 0).unwrap(), IntMatrix2::new(1, 0, 0, -1).unwrap()];
        let c = classify_nilpotent_subgroup(&gens, ClosureCaps::default()).unwrap();
        let v = classification(&c);
        assert_eq!(v["tag"], "dihedral-h");
        assert_eq!(v["table"].as_array().unwrap().len(), 8);
        assert!(v["conjugator"][0][0].is_string());
    }

    #[test]
    fn csv_carries_provenance() {
        let config = RunConfig::default();
        let mut table = Table::new(vec!["x", "y"]);
        table.push(vec!["0.5".into(), "0".into()]);
        let r = Report { command: "demo", config: &config, status: "ok", exit_code: 0, result: json!({}), table };
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("# format_version: "));
        assert!(csv.ends_with("x,y\n0.5,0\n"));
        assert!(r.to_json().contains("\"config\""));
    }
}
