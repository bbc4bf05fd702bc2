//! One function per subcommand. Each validates its input, calls one library
//! operation and converts the result.

use serde_json::{json, Value};

use torus_orbit_core::fixed_points::{
    find_finite_orbit, find_torus_fixed_points, fix_region_with_margin, index_sum_check, IndexSum,
};
use torus_orbit_core::mcg_algebra::{
    classify_element, classify_nilpotent_subgroup, lefschetz_number, ElementType, IntMatrix2, McgClassification,
};
use torus_orbit_core::rotation::rotation_set_estimate;
use torus_orbit_core::surfaces::{
    circle_rotation_number, double_annulus, klein_lifts, mobius_reduce, reversing_fixed_points, AnnulusMap,
    BoundaryOrbits, CircleLift, CircleMap, Iterate, SEAM_TOL,
};
use torus_orbit_core::torus_maps::{GroupSpec, TorusMap};

use crate::config::RunConfig;
use crate::exit;
use crate::report::{self, Table};

/// What a subcommand produced, before the envelope is added.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: u8,
    pub result: Value,
    pub table: Table,
    /// Printed to stderr when the run did not succeed.
    pub message: Option<String>,
}

impl Outcome {
    fn ok(result: Value, table: Table) -> Self {
        Outcome { exit_code: exit::SUCCESS, result, table, message: None }
    }

    fn failed(exit_code: u8, message: String, result: Value, table: Table) -> Self {
        Outcome { exit_code, result, table, message: Some(message) }
    }

    pub(crate) fn library_error(err: impl std::fmt::Display) -> Self {
        let message = err.to_string();
        Outcome::failed(exit::LIBRARY_ERROR, message.clone(), json!({"error": message}), Table::new(vec!["error"]))
    }
}

fn f(x: f64) -> String {
    x.to_string()
}

fn matrix_cells(m: &IntMatrix2) -> Vec<String> {
    let [[a, b], [c, d]] = m.rows();
    vec![a.to_string(), b.to_string(), c.to_string(), d.to_string()]
}

fn element_type(m: &IntMatrix2) -> String {
    match classify_element(m) {
        ElementType::FiniteOrder(n) => format!("order-{n}"),
        ElementType::Parabolic => "parabolic".into(),
        ElementType::Hyperbolic => "hyperbolic".into(),
    }
}

pub fn classify(gens: &[IntMatrix2], config: &RunConfig) -> Outcome {
    let class = match classify_nilpotent_subgroup(gens, config.caps()) {
        Ok(c) => c,
        Err(e) => return Outcome::library_error(e),
    };
    let mut table = Table::new(vec!["generator", "a", "b", "c", "d", "lefschetz", "tag"]);
    for (i, g) in gens.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(matrix_cells(g));
        row.push(lefschetz_number(g).to_string());
        row.push(class.tag().to_string());
        table.push(row);
    }
    let result = json!({
        "generators": gens.iter().map(report::matrix).collect::<Vec<_>>(),
        "classification": report::classification(&class),
    });
    if matches!(class, McgClassification::Inconclusive(_)) {
        Outcome::failed(exit::INCONCLUSIVE, "classification is inconclusive".into(), result, table)
    } else {
        Outcome::ok(result, table)
    }
}

pub fn lefschetz(gens: &[IntMatrix2]) -> Outcome {
    let mut table = Table::new(vec!["generator", "a", "b", "c", "d", "lefschetz", "type"]);
    let mut entries = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let l = lefschetz_number(g);
        let kind = element_type(g);
        let mut row = vec![(i + 1).to_string()];
        row.extend(matrix_cells(g));
        row.push(l.to_string());
        row.push(kind.clone());
        table.push(row);
        entries.push(json!({"matrix": report::matrix(g), "lefschetz": l, "type": kind}));
    }
    Outcome::ok(json!({ "entries": entries }), table)
}

pub fn rotation_set(map: &TorusMap, config: &RunConfig) -> Outcome {
    let estimate = match rotation_set_estimate(map, config.grid_n, config.birkhoff_n, config.seed) {
        Ok(e) => e,
        Err(e) => return Outcome::library_error(e),
    };
    let mut table = Table::new(vec!["start_x", "start_y", "average_x", "average_y"]);
    for s in &estimate.samples {
        table.push(vec![f(s.start[0]), f(s.start[1]), f(s.average[0]), f(s.average[1])]);
    }
    Outcome::ok(report::rotation_estimate(&estimate), table)
}

pub fn fixed_points(map: &TorusMap, config: &RunConfig) -> Outcome {
    let region = match fix_region_with_margin(map, config.margin) {
        Ok(r) => r,
        Err(e) => return Outcome::library_error(e),
    };
    let search = match find_torus_fixed_points(map, &region, config.grid_n, config.newton_tol) {
        Ok(s) => s,
        Err(e) => return Outcome::library_error(e),
    };
    let mut table = Table::new(vec!["x", "y", "lift_v0", "lift_v1", "residual", "det", "index"]);
    for r in &search.records {
        table.push(vec![
            f(r.torus_point[0]),
            f(r.torus_point[1]),
            r.lift_vector[0].to_string(),
            r.lift_vector[1].to_string(),
            f(r.residual),
            f(r.det),
            r.index.value().map_or_else(|| "degenerate".into(), |v| v.to_string()),
        ]);
    }
    let class = map.class();
    let check = index_sum_check(&search.records, &class);
    let mut result = json!({
        "class": report::matrix(&class),
        "lefschetz": lefschetz_number(&class),
        "region": report::region(&region),
        "search": report::search(&search),
    });
    match check {
        Ok(sum) => {
            result["index_sum"] = report::index_sum(&sum);
            if let IndexSum::Mismatch { sum, expected } = sum {
                let msg = format!("index sum {sum} differs from the Lefschetz number {expected}");
                return Outcome::failed(exit::CHECK_FAILED, msg, result, table);
            }
            Outcome::ok(result, table)
        }
        Err(e) => {
            result["index_sum"] = json!({"status": "error", "error": e.to_string()});
            Outcome::failed(exit::LIBRARY_ERROR, e.to_string(), result, table)
        }
    }
}

fn orbit_table(points: &[[f64; 2]]) -> Table {
    let mut table = Table::new(vec!["x", "y"]);
    for p in points {
        table.push(vec![f(p[0]), f(p[1])]);
    }
    table
}

/// `finite-orbit` emits the orbit; `verify` emits every intermediate result.
pub fn finite_orbit(group: &GroupSpec, config: &RunConfig, full: bool) -> Outcome {
    let labels: Vec<&str> = group.labels();
    match find_finite_orbit(group, &config.orbit_params()) {
        Ok(r) => {
            let mut result = if full { report::orbit_full(&r) } else { report::orbit_summary(&r) };
            result["labels"] = json!(labels);
            result["certified"] = json!(true);
            Outcome::ok(result, orbit_table(&r.points))
        }
        Err(fail) => {
            let code = if fail.inconclusive { exit::INCONCLUSIVE } else { exit::stage(fail.stage) };
            let mut result = json!({"failure": report::failure(&fail, full), "labels": labels});
            result["certified"] = json!(false);
            Outcome::failed(code, fail.to_string(), result, Table::new(vec!["x", "y"]))
        }
    }
}

pub fn circle(lift: &CircleLift, config: &RunConfig, iterate: u32) -> Outcome {
    if iterate == 0 {
        return Outcome::failed(
            exit::INPUT,
            "iterate must be at least 1".into(),
            json!({"error": "iterate must be at least 1"}),
            Table::new(vec!["error"]),
        );
    }
    let g = Iterate { base: lift, count: iterate };
    if g.degree() == -1 && iterate != 1 {
        let msg = "odd iterates of an orientation-reversing map are not supported";
        return Outcome::failed(exit::INPUT, msg.into(), json!({"error": msg}), Table::new(vec!["error"]));
    }
    if g.degree() == 1 {
        match circle_rotation_number(&g, 0.0, config.birkhoff_n) {
            Ok(r) => {
                let mut table = Table::new(vec!["iterate", "horizon", "rotation_number"]);
                table.push(vec![iterate.to_string(), config.birkhoff_n.to_string(), f(r)]);
                Outcome::ok(
                    json!({"degree": 1, "iterate": iterate, "horizon": config.birkhoff_n, "start": 0.0, "rotation_number": r}),
                    table,
                )
            }
            Err(e) => Outcome::library_error(e),
        }
    } else {
        match reversing_fixed_points(lift, config.newton_tol) {
            Ok(points) => {
                let mut table = Table::new(vec!["x"]);
                for p in points {
                    table.push(vec![f(p)]);
                }
                Outcome::ok(json!({"degree": -1, "iterate": iterate, "fixed_points": points}), table)
            }
            Err(e) => Outcome::library_error(e),
        }
    }
}

pub fn double(map: &AnnulusMap) -> Outcome {
    match double_annulus(map) {
        Ok(d) => {
            let class = d.class();
            let l = lefschetz_number(&class);
            let mut table = Table::new(vec!["a", "b", "c", "d", "lefschetz", "seam_mismatch"]);
            let mut row = matrix_cells(&class);
            row.push(l.to_string());
            row.push(f(d.seam_mismatch()));
            table.push(row);
            Outcome::ok(
                json!({
                    "class": report::matrix(&class),
                    "lefschetz": l,
                    "seam_mismatch": d.seam_mismatch(),
                    "seam_tolerance": SEAM_TOL,
                    "note": "the double is glued C0 only",
                }),
                table,
            )
        }
        Err(e) => Outcome::library_error(e),
    }
}

pub fn klein(map: &TorusMap, check_tol: f64, declared: Option<i64>) -> Outcome {
    match klein_lifts(map, check_tol, declared) {
        Ok(k) => {
            let mut table = Table::new(vec!["lift", "a", "b", "c", "d", "lefschetz"]);
            for (name, lift, l) in [("plus", &k.plus, k.lefschetz[0]), ("minus", &k.minus, k.lefschetz[1])] {
                let mut row = vec![name.to_string()];
                row.extend(matrix_cells(&lift.class()));
                row.push(l.to_string());
                table.push(row);
            }
            Outcome::ok(
                json!({
                    "plus_class": report::matrix(&k.plus.class()),
                    "minus_class": report::matrix(&k.minus.class()),
                    "lefschetz": k.lefschetz,
                    "contains_zero": k.contains_zero(),
                    "equivariance_residual": k.equivariance_residual,
                }),
                table,
            )
        }
        Err(e) => Outcome::library_error(e),
    }
}

pub fn mobius(map: &AnnulusMap, check_tol: f64, config: &RunConfig) -> Outcome {
    match mobius_reduce(map, check_tol, &config.orbit_params()) {
        Ok(a) => {
            let boundary = match &a.boundary {
                BoundaryOrbits::ReversingFixedPoints(p) => json!({"kind": "reversing-fixed-points", "points": p}),
                BoundaryOrbits::RotationNumber(r) => json!({"kind": "rotation-number", "value": r}),
            };
            let interior = match &a.interior {
                Ok(r) => report::orbit_summary(r),
                Err(fail) => json!({"failure": report::failure(fail, false)}),
            };
            let mut table = Table::new(vec!["x", "height"]);
            for p in &a.interior_points {
                table.push(vec![f(p[0]), f(p[1])]);
            }
            Outcome::ok(
                json!({
                    "equivariance_residual": a.equivariance_residual,
                    "doubled_class": report::matrix(&a.doubled_class),
                    "lefschetz": a.lefschetz,
                    "seam_mismatch": a.seam_mismatch,
                    "interior": interior,
                    "interior_points": a.interior_points,
                    "boundary": boundary,
                    "notes": a.notes,
                }),
                table,
            )
        }
        Err(e) => Outcome::library_error(e),
    }
}
