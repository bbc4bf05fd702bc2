use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{find_torus_fixed_points, fix_region_with_margin, FixRegion, FixedPointRecord, FixedPointSearch};
use crate::linalg::{self, Vec2};
use crate::mcg_algebra::{
    classify_nilpotent_subgroup, lefschetz_number, select_special_element, ClosureCaps, IntMatrix2,
    McgClassification, Word,
};
use crate::rotation::{self, BatterySpec, EmpiricalMeasure};
use crate::torus_maps::{GroupSpec, TorusMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    NotNilpotent,
    NoSpecialElement,
    NoPsiFixedPoint,
    IrrotationalPower,
    NoCommonFixedPoint,
    OrbitNotClosed,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::NotNilpotent,
        Stage::NoSpecialElement,
        Stage::NoPsiFixedPoint,
        Stage::IrrotationalPower,
        Stage::NoCommonFixedPoint,
        Stage::OrbitNotClosed,
    ];

    pub fn index(&self) -> u8 {
        *self as u8
    }

    pub fn name(&self) -> &'static str {
        match self {
            Stage::NotNilpotent => "not-nilpotent",
            Stage::NoSpecialElement => "no-special-element",
            Stage::NoPsiFixedPoint => "no-psi-fixed-point",
            Stage::IrrotationalPower => "irrotational-power",
            Stage::NoCommonFixedPoint => "no-common-fixed-point",
            Stage::OrbitNotClosed => "orbit-not-closed",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteOrbitParams {
    pub newton_tol: f64,
    pub rot_tol: f64,
    pub orbit_tol: f64,
    /// Seeds per side for the torus fixed-point search of the special element.
    pub grid_n: usize,
    /// Seeds per side for the common fixed-point multistart.
    pub multistart_grid: usize,
    pub orbit_cap: usize,
    /// Defaults to `|det(B - Id)|^2 · 4`.
    pub m_cap: Option<u64>,
    pub margin: f64,
    pub caps: ClosureCaps,
    pub battery: BatterySpec,
    pub seed: u64,
}

impl Default for FiniteOrbitParams {
    fn default() -> Self {
        FiniteOrbitParams {
            newton_tol: 1e-12,
            rot_tol: 1e-3,
            orbit_tol: 1e-9,
            grid_n: 32,
            multistart_grid: 64,
            orbit_cap: 10_000,
            m_cap: None,
            margin: super::DEFAULT_MARGIN,
            caps: ClosureCaps::default(),
            battery: BatterySpec::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormalizationOutcome {
    /// The lift `T_{-shift} ∘ g` is irrotational with respect to the battery.
    Irrotational { shift: [i64; 2] },
    /// `g` itself is not, but `T_{-shift} ∘ g^power` is.
    Power { power: u64, shift: [i64; 2] },
    /// `ρ_μ - round(ρ_μ)` per measure when no power up to the cap works.
    NotIrrotational { residuals: Vec<Vec2> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorNormalization {
    pub generator: usize,
    pub label: String,
    /// One rotation vector per battery measure.
    pub rotation_vectors: Vec<Vec2>,
    pub outcome: NormalizationOutcome,
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub classification: McgClassification,
    pub psi_word: Word,
    pub psi_class: IntMatrix2,
    pub lefschetz: i64,
    pub region: FixRegion,
    pub psi_fixed_points: FixedPointSearch,
    pub m_cap: u64,
    pub battery_size: usize,
    pub normalizations: Vec<GeneratorNormalization>,
    /// `v` such that `T_v ∘ ψ̃` fixes `common_fixed_point`.
    pub lift_vector: [i64; 2],
    pub common_fixed_point: Vec2,
    pub common_residual: f64,
    /// Orbit points in `[0,1)^2`, in discovery order.
    pub points: Vec<Vec2>,
    /// Per generator: the largest distance from an image of an orbit point
    /// to the orbit.
    pub generator_residuals: Vec<f64>,
    pub log: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct PipelineFailure {
    pub stage: Stage,
    pub diagnostics: String,
    /// The classification could neither confirm nor refute nilpotency.
    pub inconclusive: bool,
    pub classification: Option<McgClassification>,
    pub log: Vec<String>,
}

impl fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.diagnostics)
    }
}

struct Run {
    log: Vec<String>,
    classification: Option<McgClassification>,
}

impl Run {
    fn fail(self, stage: Stage, diagnostics: String) -> PipelineFailure {
        let mut log = self.log;
        log.push(format!("failed at {stage}: {diagnostics}"));
        PipelineFailure {
            stage,
            diagnostics,
            inconclusive: false,
            classification: self.classification,
            log,
        }
    }
}

/// Searches a finite orbit of the group: classify the mapping classes, take
/// the special element `ψ`, find the fixed points of its lifts, normalize
/// the identity-class generators to irrotational lifts (or powers of them),
/// find a common fixed point and close its orbit.
pub fn find_finite_orbit(group: &GroupSpec, params: &FiniteOrbitParams) -> Result<OrbitReport, PipelineFailure> {
    let maps = group.maps();
    let classes = group.classes();
    let labels = group.labels();
    let mut run = Run {
        log: Vec::new(),
        classification: None,
    };

    // (1) classes and the special element
    let classification = match classify_nilpotent_subgroup(&classes, params.caps) {
        Ok(c) => c,
        Err(e) => return Err(run.fail(Stage::NotNilpotent, format!("{e}"))),
    };
    run.log.push(format!("classification: {}", classification.tag()));
    run.classification = Some(classification.clone());
    match &classification {
        McgClassification::NotNilpotent { witness, value, .. } => {
            let d = format!("commutator {witness} = {value} is not ±Id");
            return Err(run.fail(Stage::NotNilpotent, d));
        }
        McgClassification::Inconclusive(reason) => {
            let mut f = run.fail(Stage::NotNilpotent, format!("inconclusive: {reason:?}"));
            f.inconclusive = true;
            return Err(f);
        }
        _ => {}
    }
    let special = match select_special_element(&classification) {
        Ok(s) => s,
        Err(e) => return Err(run.fail(Stage::NoSpecialElement, format!("{e}"))),
    };
    let psi = TorusMap::from_word(&special.word, &maps).expect("special word uses known generators");
    let lefschetz = lefschetz_number(&special.matrix);
    debug_assert_ne!(lefschetz, 0);
    run.log.push(format!(
        "psi = {} with class {} and L = {lefschetz}",
        special.word, special.matrix
    ));

    // (2) fixed points of ψ on the torus
    let region = match fix_region_with_margin(&psi, params.margin) {
        Ok(r) => r,
        Err(e) => return Err(run.fail(Stage::NoPsiFixedPoint, format!("{e}"))),
    };
    run.log.push(format!(
        "region: C = {:e}, K = {:e}, R = {:e}",
        region.min_singular, region.displacement_bound, region.radius
    ));
    let search = match find_torus_fixed_points(&psi, &region, params.grid_n, params.newton_tol) {
        Ok(s) => s,
        Err(e) => return Err(run.fail(Stage::NoPsiFixedPoint, format!("{e}"))),
    };
    run.log.push(format!(
        "psi fixed points: {} found, {} of {} seeds failed",
        search.records.len(),
        search.newton_failures,
        search.seeds
    ));
    if search.records.is_empty() {
        let d = format!("no fixed point from {} seeds", search.seeds);
        return Err(run.fail(Stage::NoPsiFixedPoint, d));
    }

    // (3) irrotational normalization of identity-class generators
    let det_b_minus_id = lefschetz.unsigned_abs();
    let m_cap = params
        .m_cap
        .unwrap_or_else(|| det_b_minus_id.saturating_mul(det_b_minus_id).saturating_mul(4));
    let mut normalizations = Vec::new();
    let mut lifts: Vec<TorusMap> = Vec::new();
    let mut battery_size = 0;
    for (i, g) in maps.iter().enumerate() {
        if !g.class().is_identity() {
            continue;
        }
        let measures = match params.battery.build(g, stream_seed(params.seed, i)) {
            Ok(m) => m,
            Err(e) => return Err(run.fail(Stage::IrrotationalPower, format!("generator {}: {e}", labels[i]))),
        };
        battery_size = measures.len();
        let rhos = match rotation_vectors(g, &measures) {
            Ok(r) => r,
            Err(e) => return Err(run.fail(Stage::IrrotationalPower, format!("generator {}: {e}", labels[i]))),
        };
        let outcome = match rotation::irrotational_power(&rhos, params.rot_tol, m_cap) {
            Some((1, shift)) => {
                lifts.push(rotation::shift_lift(g, shift));
                NormalizationOutcome::Irrotational { shift }
            }
            Some((power, shift)) => {
                lifts.push(rotation::shift_lift(&g.power(power as i64), shift));
                NormalizationOutcome::Power { power, shift }
            }
            None => {
                let residuals = rhos
                    .iter()
                    .map(|r| linalg::sub(*r, [libm::rint(r[0]), libm::rint(r[1])]))
                    .collect();
                NormalizationOutcome::NotIrrotational { residuals }
            }
        };
        run.log.push(format!("generator {}: {:?} w.r.t. battery of {}", labels[i], outcome, measures.len()));
        let failed = matches!(outcome, NormalizationOutcome::NotIrrotational { .. });
        normalizations.push(GeneratorNormalization {
            generator: i,
            label: String::from(labels[i]),
            rotation_vectors: rhos,
            outcome,
        });
        if failed {
            let d = format!("generator {} has no irrotational power up to {m_cap}", labels[i]);
            return Err(run.fail(Stage::IrrotationalPower, d));
        }
    }

    // (4) common fixed point of T_v ∘ ψ̃ and the normalized lifts
    let Some((lift_vector, point, residual)) = common_fixed_point(&psi, &region, &search.records, &lifts, params)
    else {
        let d = format!(
            "no common fixed point of {} lift(s) of psi and {} normalized lift(s) at tolerance {:e}",
            distinct_lift_vectors(&search.records).len(),
            lifts.len(),
            params.orbit_tol
        );
        return Err(run.fail(Stage::NoCommonFixedPoint, d));
    };
    run.log.push(format!(
        "common fixed point {point:?} of T_{lift_vector:?} psi, residual {residual:e}"
    ));

    // (5) orbit closure under the original generators
    let (points, generator_residuals) = match close_orbit(&maps, linalg::reduce_torus(point), params) {
        Ok(r) => r,
        Err(d) => return Err(run.fail(Stage::OrbitNotClosed, d)),
    };
    run.log.push(format!("orbit closed with {} point(s)", points.len()));

    Ok(OrbitReport {
        classification,
        psi_word: special.word,
        psi_class: special.matrix,
        lefschetz,
        region,
        psi_fixed_points: search,
        m_cap,
        battery_size,
        normalizations,
        lift_vector,
        common_fixed_point: point,
        common_residual: residual,
        points,
        generator_residuals,
        log: run.log,
    })
}

fn stream_seed(seed: u64, generator: usize) -> u64 {
    seed ^ (generator as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

fn rotation_vectors(g: &TorusMap, measures: &[EmpiricalMeasure]) -> Result<Vec<Vec2>, rotation::RotationError> {
    measures.iter().map(|m| rotation::rho_mu(g, m)).collect()
}

fn distinct_lift_vectors(records: &[FixedPointRecord]) -> Vec<[i64; 2]> {
    let mut vs: Vec<[i64; 2]> = records.iter().map(|r| r.lift_vector).collect();
    vs.sort_by_key(|v| ((v[0] as i128).pow(2) + (v[1] as i128).pow(2), *v));
    vs.dedup();
    vs
}

/// Largest `‖h(x) - x‖` over `h ∈ {T_v ∘ ψ̃} ∪ lifts`.
fn stacked_max(psi_v: &TorusMap, lifts: &[TorusMap], x: Vec2) -> Option<f64> {
    let mut worst = linalg::norm(psi_v.displacement(x).ok()?);
    for g in lifts {
        worst = worst.max(linalg::norm(g.displacement(x).ok()?));
    }
    Some(worst)
}

/// Levenberg-Marquardt on the stacked system `h_i(x) - x = 0`.
fn stacked_solve(psi_v: &TorusMap, lifts: &[TorusMap], seed: Vec2, tol: f64) -> Option<(Vec2, f64)> {
    let maps: Vec<&TorusMap> = core::iter::once(psi_v).chain(lifts.iter()).collect();
    let cost = |x: Vec2| -> Option<f64> {
        let mut c = 0.0;
        for h in &maps {
            let r = h.displacement(x).ok()?;
            c += r[0] * r[0] + r[1] * r[1];
        }
        Some(c)
    };
    let mut x = seed;
    let mut c = cost(x)?;
    let mut lambda = 1e-3;
    for _ in 0..100 {
        if stacked_max(psi_v, lifts, x)? <= tol * 0.01 {
            break;
        }
        let mut h = [[0.0; 2]; 2];
        let mut g = [0.0; 2];
        for m in &maps {
            let r = m.displacement(x).ok()?;
            let j = linalg::mat_sub(&m.derivative(x).ok()?, &linalg::IDENTITY);
            for a in 0..2 {
                for b in 0..2 {
                    h[a][b] += j[0][a] * j[0][b] + j[1][a] * j[1][b];
                }
                g[a] += j[0][a] * r[0] + j[1][a] * r[1];
            }
        }
        let mut accepted = false;
        while lambda < 1e12 {
            let damped = [[h[0][0] * (1.0 + lambda), h[0][1]], [h[1][0], h[1][1] * (1.0 + lambda)]];
            let Some(step) = linalg::solve(&damped, g, 1e-300) else {
                lambda *= 10.0;
                continue;
            };
            let cand = linalg::sub(x, step);
            if let Some(cc) = cost(cand) {
                if cc < c {
                    x = cand;
                    c = cc;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    let worst = stacked_max(psi_v, lifts, x)?;
    (worst <= tol).then_some((x, worst))
}

fn common_fixed_point(
    psi: &TorusMap,
    region: &FixRegion,
    records: &[FixedPointRecord],
    lifts: &[TorusMap],
    params: &FiniteOrbitParams,
) -> Option<([i64; 2], Vec2, f64)> {
    for v in distinct_lift_vectors(records) {
        let psi_v = if v == [0, 0] {
            psi.clone()
        } else {
            psi.translated([v[0] as f64, v[1] as f64])
        };
        let exact_seeds = records.iter().filter(|r| r.lift_vector == v).map(|r| r.location);
        for seed in exact_seeds {
            if let Some((x, res)) = stacked_solve(&psi_v, lifts, seed, params.orbit_tol) {
                return Some((v, x, res));
            }
        }
        let radius = region.radius_for(v);
        let n = params.multistart_grid.max(1);
        let h = 2.0 * radius / n as f64;
        for i in 0..n {
            for j in 0..n {
                let seed = [-radius + (i as f64 + 0.5) * h, -radius + (j as f64 + 0.5) * h];
                if let Some((x, res)) = stacked_solve(&psi_v, lifts, seed, params.orbit_tol) {
                    return Some((v, x, res));
                }
            }
        }
    }
    None
}

fn nearest(points: &[Vec2], p: Vec2) -> (usize, f64) {
    points
        .iter()
        .enumerate()
        .map(|(i, q)| (i, linalg::torus_distance(*q, p)))
        .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn close_orbit(maps: &[TorusMap], start: Vec2, params: &FiniteOrbitParams) -> Result<(Vec<Vec2>, Vec<f64>), String> {
    let radius = 10.0 * params.orbit_tol;
    let mut points = alloc::vec![start];
    let mut next = 0;
    while next < points.len() {
        let p = points[next];
        next += 1;
        for (gi, g) in maps.iter().enumerate() {
            let q = g.evaluate_torus(p).map_err(|e| format!("generator {gi} at {p:?}: {e}"))?;
            if nearest(&points, q).1 > radius {
                if points.len() >= params.orbit_cap {
                    return Err(format!("orbit exceeds the cap of {} points", params.orbit_cap));
                }
                points.push(q);
            }
        }
    }
    let mut residuals = alloc::vec![0.0f64; maps.len()];
    for p in &points {
        for (gi, g) in maps.iter().enumerate() {
            let q = g.evaluate_torus(*p).map_err(|e| format!("generator {gi} at {p:?}: {e}"))?;
            residuals[gi] = residuals[gi].max(nearest(&points, q).1);
        }
    }
    Ok((points, residuals))
}
