//! Executes scenarios: one directory of artifacts per run, published atomically.

use std::fs;
use std::path::{Path, PathBuf};

use nfal_core::ambiguity::{evaluate_af, is_invalid, measure_peak, to_db, DB_FLOOR};
use nfal_core::analysis::{
    afr, bandwidth, boundary_points, check_addition, check_inclusion, check_removal, max_matched_frequency, ncz,
    resolution_box, resolution_region, safe_spacing, ArrayKind, Frame, MatchedField, PropReport, RegionMask, Verdict,
};
use nfal_core::field::DerivAxis;
use nfal_core::geometry::{ArrayGeometry, CoordSystem, SampleAxis, Sampling, Vec2};
use nfal_core::grid::GridSpec;
use nfal_core::loci::{asymptotes, exact_loci, ff_circular_roots, hyperbola_coefficients, SamplingCurve};
use nfal_core::spectrum::{
    default_polar_region, default_region, spectrum_g, spectrum_h, spectrum_polar, SpectrumEstimate, SpectrumSource,
};
use nfal_core::NfalError;

use crate::error::{CliError, Context, Result};
use crate::output::{Cell, Raster, Sink, Table};
use crate::scenario::{Case, Expect, Metric, Output, Scenario, Sweep, TrendKind};

/// Relative tolerance used when comparing sweep values.
pub const TREND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub scope: String,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub dir: PathBuf,
    /// `(relative path, sha256)` sorted by path.
    pub artifacts: Vec<(String, String)>,
    pub checks: Vec<CheckResult>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Cases and sweeps, into `<root>/<name>`.
    Run,
    /// Sweeps only, into `<root>/<name>.sweep`.
    Sweep,
}

/// Run a parsed scenario. Nothing is left under `root` if an error occurs.
pub fn execute(scenario: &Scenario, root: &Path, mode: Mode) -> Result<Outcome> {
    if mode == Mode::Sweep && scenario.sweeps.is_empty() {
        return Err(CliError::Invalid {
            path: scenario.name.clone(),
            field: "sweep".into(),
            message: "the scenario defines no [[sweep]] block".into(),
        });
    }
    let dir_name = match mode {
        Mode::Run => scenario.name.clone(),
        Mode::Sweep => format!("{}.sweep", scenario.name),
    };
    let final_dir = root.join(&dir_name);
    let staging = root.join(format!(".{dir_name}.partial-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| CliError::io(&staging, e))?;
    }
    let result = produce(scenario, Sink::new(staging.clone())?, mode);
    let (artifacts, checks) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
    };
    if final_dir.exists() {
        fs::remove_dir_all(&final_dir).map_err(|e| CliError::io(&final_dir, e))?;
    }
    fs::rename(&staging, &final_dir).map_err(|e| CliError::io(&final_dir, e))?;
    Ok(Outcome { dir: final_dir, artifacts, checks })
}

type Produced = (Vec<(String, String)>, Vec<CheckResult>);

fn produce(scenario: &Scenario, mut sink: Sink, mode: Mode) -> Result<Produced> {
    let mut checks = Vec::new();
    let mut summary = Table::new(&["case", "metric", "value"]);
    if mode == Mode::Run {
        for case in &scenario.cases {
            run_case(case, &mut sink, &mut checks, &mut summary)?;
        }
        sink.csv("summary.csv", &summary)?;
    }
    for sweep in &scenario.sweeps {
        run_sweep(sweep, &mut sink, &mut checks)?;
    }
    let mut table = Table::new(&["scope", "check", "pass", "detail"]);
    for c in &checks {
        table.row(vec![c.scope.clone().into(), c.name.clone().into(), c.pass.into(), c.detail.clone().into()]);
    }
    sink.csv("checks.csv", &table)?;
    Ok((sink.finish()?, checks))
}

fn metric(summary: &mut Table, case: &str, name: &str, v: impl Into<Cell>) {
    summary.row(vec![case.into(), name.into(), v.into()]);
}

fn mask_csv(mask: &RegionMask, column: &str) -> Table {
    let mut t = Table::new(&["x", "y", column]);
    for (i, &b) in mask.bits.iter().enumerate() {
        let p = mask.spec.point(i);
        t.row(vec![p.x.into(), p.y.into(), b.into()]);
    }
    t
}

fn mask_raster(mask: &RegionMask) -> Raster {
    let levels = mask.bits.iter().map(|&b| if b { u16::MAX } else { 0 }).collect();
    Raster { nx: mask.spec.nx, ny: mask.spec.ny, levels }
}

fn boundary_csv(mask: &RegionMask) -> Table {
    let mut t = Table::new(&["polyline", "x", "y"]);
    for (i, line) in mask.boundary.iter().enumerate() {
        for p in line {
            t.row(vec![i.into(), p.x.into(), p.y.into()]);
        }
    }
    t
}

fn run_case(case: &Case, sink: &mut Sink, checks: &mut Vec<CheckResult>, summary: &mut Table) -> Result<()> {
    let name = case.name.as_str();
    let ctx = |what: &str| format!("case '{name}' ({what})");
    let scene = &case.scene;
    let (k, x_s, spec) = (scene.k(), scene.source, scene.grid());
    metric(summary, name, "elements", case.array.len());
    let mut afr_mask = None;
    let mut res_mask = None;
    for &out in &case.outputs {
        match out {
            Output::Af => write_af(case, sink, summary)?,
            Output::Afr => {
                let m = afr(&case.array, scene).context(|| ctx("afr"))?;
                sink.csv(&format!("{name}/afr.csv"), &mask_csv(&m, "inside"))?;
                sink.csv(&format!("{name}/afr_boundary.csv"), &boundary_csv(&m))?;
                sink.png(&format!("{name}/afr.png"), &mask_raster(&m), &[(0, "aliased"), (u16::MAX, "alias-free")])?;
                metric(summary, name, "afr_cells", m.count());
                metric(summary, name, "afr_area", m.area());
                metric(summary, name, "afr_fraction", m.fraction());
                afr_mask = Some(m);
            }
            Output::Resolution => {
                let b = resolution_box(&case.array, x_s, k, case.frame).context(|| ctx("resolution"))?;
                let m = resolution_region(&case.array, x_s, k, case.frame, spec).context(|| ctx("resolution"))?;
                sink.csv(&format!("{name}/resolution.csv"), &mask_csv(&m, "inside"))?;
                sink.png(&format!("{name}/resolution.png"), &mask_raster(&m), &[(0, "outside"), (u16::MAX, "inside")])?;
                let bw = bandwidth(&case.array, x_s, k, case.frame).context(|| ctx("bandwidth"))?;
                for (i, band) in bw.axes.iter().enumerate() {
                    metric(summary, name, &format!("bandwidth_{}", i + 1), band.bandwidth());
                    metric(summary, name, &format!("delta_{}", i + 1), b.widths[i]);
                }
                metric(summary, name, "resolution_cells", m.count());
                res_mask = Some(m);
            }
            Output::Ncz => {
                let r = ncz(&case.array, x_s, k, case.frame, spec).context(|| ctx("ncz"))?;
                let mut t = Table::new(&["x", "y", "axis_1", "axis_2", "all", "invalid"]);
                for i in 0..spec.len() {
                    let p = spec.point(i);
                    let a = |j: usize| r.per_axis.get(j).is_some_and(|m| m.bits[i]);
                    t.row(vec![p.x.into(), p.y.into(), a(0).into(), a(1).into(), r.all.bits[i].into(), r.invalid[i].into()]);
                }
                sink.csv(&format!("{name}/ncz.csv"), &t)?;
                sink.png(&format!("{name}/ncz.png"), &mask_raster(&r.all), &[(0, "contributive"), (u16::MAX, "non-contributive")])?;
                metric(summary, name, "ncz_cells", r.all.count());
            }
            Output::Cae => write_cae(case, sink)?,
            Output::SpectrumG | Output::SpectrumH => write_spectrum(case, out, sink, summary)?,
            Output::Loci => write_loci(case, sink)?,
            Output::CheckProp1 | Output::CheckProp2 | Output::CheckProp3 => {
                checks.push(check_prop(case, out, sink)?);
            }
            Output::SafeSpacing => write_safe(case, sink)?,
        }
    }
    if let (Some(a), Some(r)) = (&afr_mask, &res_mask) {
        let mut t = Table::new(&["x", "y", "afr", "resolution"]);
        let mut levels = Vec::with_capacity(spec.len());
        for i in 0..spec.len() {
            let p = spec.point(i);
            t.row(vec![p.x.into(), p.y.into(), a.bits[i].into(), r.bits[i].into()]);
            levels.push(match (a.bits[i], r.bits[i]) {
                (false, false) => 0,
                (false, true) => 21845,
                (true, false) => 43690,
                (true, true) => u16::MAX,
            });
        }
        sink.csv(&format!("{name}/overlay.csv"), &t)?;
        sink.png(
            &format!("{name}/overlay.png"),
            &Raster { nx: spec.nx, ny: spec.ny, levels },
            &[(0, "aliased"), (21845, "resolution region outside AFR"), (43690, "alias-free"), (u16::MAX, "resolution region inside AFR")],
        )?;
    }
    Ok(())
}

fn write_af(case: &Case, sink: &mut Sink, summary: &mut Table) -> Result<()> {
    let name = case.name.as_str();
    let grid = evaluate_af(&case.array, &case.scene).context(|| format!("case '{name}' (af)"))?;
    let x_s = case.scene.source;
    // Normalise to the value at the true source.
    let reference: f64 = case.array.elements().iter().map(|z| 1.0 / (x_s - *z).norm_sqr()).sum();
    let mut t = Table::new(&["x", "y", "re", "im", "db"]);
    let mut db = Vec::with_capacity(grid.values.len());
    for (i, v) in grid.values.iter().enumerate() {
        let p = grid.spec.point(i);
        let d = if is_invalid(*v) { f64::NAN } else { to_db(*v, reference) };
        t.row(vec![p.x.into(), p.y.into(), v.re.into(), v.im.into(), d.into()]);
        db.push(d);
    }
    sink.csv(&format!("{name}/af.csv"), &t)?;
    let raster = Raster::scaled(grid.spec.nx, grid.spec.ny, &db, DB_FLOOR, 0.0);
    sink.png(&format!("{name}/af.png"), &raster, &[(0, "-60 dB or below, or invalid"), (u16::MAX, "0 dB (value at the source)")])?;
    metric(summary, name, "af_reference", reference);
    match measure_peak(&grid, x_s) {
        Ok(p) => {
            metric(summary, name, "peak_x", p.location.x);
            metric(summary, name, "peak_y", p.location.y);
            metric(summary, name, "fwhm_x", p.fwhm_x);
            metric(summary, name, "fwhm_y", p.fwhm_y);
        }
        Err(NfalError::BorderPeak) => metric(summary, name, "fwhm", "border"),
        Err(e) => return Err(CliError::Analysis { context: format!("case '{name}' (af peak)"), source: e }),
    }
    Ok(())
}

fn axis_label(a: &SampleAxis) -> String {
    match a {
        SampleAxis::Dir(u) => format!("dir({};{})", crate::output::fmt_f64(u.x), crate::output::fmt_f64(u.y)),
        SampleAxis::Radial { .. } => "r".into(),
        SampleAxis::Angular { .. } => "theta".into(),
    }
}

fn write_cae(case: &Case, sink: &mut Sink) -> Result<()> {
    let name = case.name.as_str();
    let ctx = || format!("case '{name}' (cae)");
    let (k, x_s) = (case.scene.k(), case.scene.source);
    let field = MatchedField::new(&case.array, x_s, k).context(ctx)?;
    let mask = afr(&case.array, &case.scene).context(ctx)?;
    let mut t = Table::new(&["kind", "x", "y", "axis", "k_value", "threshold", "antennas"]);
    let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";");
    for bp in boundary_points(&field, &mask) {
        if let Some(c) = field.cae(bp.point, bp.axis) {
            t.row(vec![
                "boundary".into(),
                bp.point.x.into(),
                bp.point.y.into(),
                axis_label(&field.axes()[bp.axis]).into(),
                c.value.into(),
                field.thresholds()[bp.axis].into(),
                join(&c.indices).into(),
            ]);
        }
    }
    if let Some(p) = case.test_point {
        for (i, axis) in field.axes().iter().enumerate() {
            let (v, c) = max_matched_frequency(&case.array, p, x_s, k, *axis).context(ctx)?;
            t.row(vec![
                "test_point".into(),
                p.x.into(),
                p.y.into(),
                axis_label(axis).into(),
                v.into(),
                field.thresholds()[i].into(),
                join(&c.indices).into(),
            ]);
        }
    }
    sink.csv(&format!("{name}/cae.csv"), &t)
}

fn write_spectrum(case: &Case, out: Output, sink: &mut Sink, summary: &mut Table) -> Result<()> {
    let name = case.name.as_str();
    let tag = if out == Output::SpectrumG { "spectrum_g" } else { "spectrum_h" };
    let ctx = || format!("case '{name}' ({tag})");
    let (k, x_s) = (case.scene.k(), case.scene.source);
    let polar = case.array.coord_system() == CoordSystem::Polar;
    let x_t = case.test_point.unwrap_or(x_s);
    let est: SpectrumEstimate = if polar {
        let r_max = case.array.polar_layout().map(|l| l.radii[l.radii.len() - 1]).unwrap_or(1.0);
        let region = case.spectrum_region.unwrap_or_else(|| default_polar_region(k, r_max));
        let src = if out == Output::SpectrumG {
            SpectrumSource::G { x_tilde: x_t, x_s }
        } else {
            SpectrumSource::H { x_s }
        };
        spectrum_polar(&case.array, src, k, region, case.spectrum_shape, case.threshold).context(ctx)?
    } else {
        let region = case.spectrum_region.unwrap_or_else(|| default_region(k));
        if out == Output::SpectrumG {
            spectrum_g(&case.array, x_t, x_s, k, region, case.spectrum_shape, case.threshold).context(ctx)?
        } else {
            spectrum_h(&case.array, x_s, k, region, case.spectrum_shape, case.threshold).context(ctx)?
        }
    };
    let mut t = Table::new(&["k_1", "k_2", "magnitude"]);
    for (i, m) in est.magnitudes.iter().enumerate() {
        let p = est.spec.point(i);
        t.row(vec![p.x.into(), p.y.into(), (*m).into()]);
    }
    sink.csv(&format!("{name}/{tag}.csv"), &t)?;
    let raster = Raster::scaled(est.spec.nx, est.spec.ny, &est.magnitudes, 0.0, est.peak);
    sink.png(&format!("{name}/{tag}.png"), &raster, &[(0, "zero magnitude"), (u16::MAX, "peak magnitude")])?;
    // Chirp predictions on the same axes.
    let frame = if polar { Frame::Polar } else { Frame::AxisAligned };
    let axes = frame.axes(&case.array, x_s).context(ctx)?;
    let mut s = Table::new(&["axis", "support_min", "support_max", "half_extent", "cell", "chirp_min", "chirp_max"]);
    let bw = bandwidth(&case.array, x_s, k, frame).context(ctx)?;
    for (i, axis) in axes.iter().enumerate() {
        let (lo, hi) = if out == Output::SpectrumG {
            let (kk, _) = max_matched_frequency(&case.array, x_t, x_s, k, *axis).context(ctx)?;
            (-kk, kk)
        } else {
            (bw.axes[i].k_min, bw.axes[i].k_max)
        };
        s.row(vec![
            axis_label(axis).into(),
            est.support[i].0.into(),
            est.support[i].1.into(),
            est.half_extent(i).into(),
            est.cell(i).into(),
            lo.into(),
            hi.into(),
        ]);
    }
    sink.csv(&format!("{name}/{tag}_support.csv"), &s)?;
    metric(summary, name, &format!("{tag}_peak"), est.peak);
    Ok(())
}

fn write_loci(case: &Case, sink: &mut Sink) -> Result<()> {
    let name = case.name.as_str();
    let ctx = || format!("case '{name}' (loci)");
    let (k, x_s) = (case.scene.k(), case.scene.source);
    let x_t = case.test_point.expect("validated: loci need a test point");
    let el = case.array.elements();
    let mut t = Table::new(&["kind", "x", "y"]);
    let mut conic = Table::new(&["name", "value"]);
    match case.array.sampling() {
        Sampling::Polar(l) => {
            let r = l.radii[0];
            let curve = SamplingCurve::Arc { center: l.center, radius: r, theta0: l.start_angle, theta1: l.start_angle + l.arc };
            let res = exact_loci(x_t, x_s, k, DerivAxis::Theta, curve, None).context(ctx)?;
            for p in res.roots {
                t.row(vec!["root".into(), p.x.into(), p.y.into()]);
            }
            for th in ff_circular_roots(x_t - l.center, x_s - l.center) {
                let p = l.center + nfal_core::geometry::from_polar(r, th);
                t.row(vec!["far_field_root".into(), p.x.into(), p.y.into()]);
            }
        }
        _ => {
            let (first, last) = (el[0], el[el.len() - 1]);
            let res = exact_loci(x_t, x_s, k, DerivAxis::X, SamplingCurve::Segment { from: first, to: last }, None);
            // Along a lattice axis other than x the x-curvature is not the relevant one.
            let along_x = el.iter().all(|p| p.y == 0.0);
            if along_x {
                for p in res.context(ctx)?.roots {
                    t.row(vec!["root".into(), p.x.into(), p.y.into()]);
                }
                match hyperbola_coefficients(x_t, x_s) {
                    Ok(c) => {
                        for (n, v) in [("a", c.a), ("b", c.b), ("c", c.c), ("d", c.d), ("e", c.e), ("f", c.f), ("u0", c.u0), ("u1", c.u1), ("u2", c.u2), ("u3", c.u3), ("eps", c.eps)] {
                            conic.row(vec![n.into(), v.into()]);
                        }
                        if let Ok((a1, a2)) = asymptotes(&c) {
                            for (tag, line) in [("asymptote_1", a1), ("asymptote_2", a2)] {
                                for x in [first.x, last.x] {
                                    let p = line.at(x);
                                    t.row(vec![tag.into(), p.x.into(), p.y.into()]);
                                }
                            }
                        }
                    }
                    Err(NfalError::DegenerateExpansion) => conic.row(vec!["degenerate".into(), 1.0.into()]),
                    Err(e) => return Err(CliError::Analysis { context: ctx(), source: e }),
                }
            }
        }
    }
    sink.csv(&format!("{name}/loci.csv"), &t)?;
    sink.csv(&format!("{name}/loci_conic.csv"), &conic)
}

fn prop_table(r: &PropReport) -> Table {
    let mut t = Table::new(&["field", "value"]);
    let v = |x: Verdict| format!("{x:?}").to_lowercase();
    t.row(vec!["predicted".into(), v(r.predicted).into()]);
    t.row(vec!["direct".into(), v(r.direct).into()]);
    t.row(vec!["boundary_points".into(), r.boundary_points.into()]);
    t.row(vec!["witnesses".into(), r.witnesses.len().into()]);
    t.row(vec!["changed_cells".into(), r.changed_cells.into()]);
    t.row(vec!["far_changes".into(), r.far_changes.into()]);
    t.row(vec!["monotonicity_violations".into(), r.monotonicity_violations.into()]);
    t.row(vec!["exact".into(), r.exact.into()]);
    t.row(vec!["agree".into(), r.agree.into()]);
    t
}

fn check_prop(case: &Case, out: Output, sink: &mut Sink) -> Result<CheckResult> {
    let name = case.name.as_str();
    let other = case.other.as_ref().expect("validated: proposition checks need a second array");
    let scope = format!("case:{name}");
    let fail = |check: &str, detail: String| CheckResult { scope: scope.clone(), name: check.into(), pass: false, detail };
    match out {
        Output::CheckProp1 => {
            let (sub, sup) = if case.array.is_subset_of(other) {
                (&case.array, other)
            } else if other.is_subset_of(&case.array) {
                (other, &case.array)
            } else {
                return Ok(fail("prop1-inclusion", "arrays are not nested".into()));
            };
            let r = match check_inclusion(sub, sup, &case.scene) {
                Ok(r) => r,
                Err(e) => return Ok(fail("prop1-inclusion", e.to_string())),
            };
            let mut t = Table::new(&["field", "value"]);
            t.row(vec!["violations".into(), r.violations.into()]);
            t.row(vec!["beyond_slack".into(), r.beyond_slack.into()]);
            t.row(vec!["holds".into(), r.holds.into()]);
            sink.csv(&format!("{name}/check_prop1.csv"), &t)?;
            Ok(CheckResult {
                scope,
                name: "prop1-inclusion".into(),
                pass: r.holds,
                detail: format!("{} violating cells, {} beyond one-cell slack", r.violations, r.beyond_slack),
            })
        }
        _ => {
            let (label, file, res) = if out == Output::CheckProp2 {
                ("prop2-removal", "check_prop2.csv", check_removal(&case.array, other, &case.scene))
            } else {
                ("prop3-addition", "check_prop3.csv", check_addition(&case.array, other, &case.scene))
            };
            let r = match res {
                Ok(r) => r,
                Err(e) => return Ok(fail(label, e.to_string())),
            };
            sink.csv(&format!("{name}/{file}"), &prop_table(&r))?;
            let expected = match case.expect {
                None => true,
                Some(Expect::Equal) => r.predicted == Verdict::Equal && r.direct == Verdict::Equal,
                Some(Expect::Strict) => r.predicted != Verdict::Equal && r.direct != Verdict::Equal,
            };
            let pass = r.agree && r.monotonicity_violations == 0 && expected;
            Ok(CheckResult {
                scope,
                name: label.into(),
                pass,
                detail: format!(
                    "predicted {:?}, direct {:?}, {} changed cells ({} away from the boundary){}",
                    r.predicted,
                    r.direct,
                    r.changed_cells,
                    r.far_changes,
                    case.expect.map(|e| format!(", expected {e:?}")).unwrap_or_default()
                ),
            })
        }
    }
}

fn write_safe(case: &Case, sink: &mut Sink) -> Result<()> {
    let name = case.name.as_str();
    let w = case.scene.wavelength;
    let mut t = Table::new(&["axis", "spacing", "bound", "safe"]);
    match case.array.sampling() {
        Sampling::Lattice(axes) => {
            let bound = safe_spacing(ArrayKind::Cartesian, w);
            for (i, a) in axes.iter().enumerate() {
                t.row(vec![format!("lattice_{}", i + 1).into(), a.spacing.into(), bound.into(), (a.spacing <= bound).into()]);
            }
        }
        Sampling::Polar(l) => {
            if let Some(dr) = l.dr {
                let bound = safe_spacing(ArrayKind::Cartesian, w);
                t.row(vec!["r".into(), dr.into(), bound.into(), (dr <= bound).into()]);
            }
            if let Some(dt) = l.dtheta {
                let bound = safe_spacing(ArrayKind::Circular { radius: l.radii[l.radii.len() - 1] }, w);
                t.row(vec!["theta".into(), dt.into(), bound.into(), (dt <= bound).into()]);
            }
        }
        Sampling::Irregular => {}
    }
    sink.csv(&format!("{name}/safe_spacing.csv"), &t)
}

/// Largest `max_i K_i` and normalised margin over the cells on the region perimeter.
pub fn boundary_k(array: &ArrayGeometry, x_s: Vec2, k: f64, spec: GridSpec) -> Result<(f64, f64)> {
    let field = MatchedField::new(array, x_s, k).context(|| "sweep (boundary K)".into())?;
    let mut kmax = 0.0f64;
    let mut margin = 0.0f64;
    for i in 0..spec.len() {
        let (ix, iy) = spec.coords(i);
        if ix != 0 && iy != 0 && ix + 1 != spec.nx && iy + 1 != spec.ny {
            continue;
        }
        let p = spec.point(i);
        if let Some(ks) = field.k_max(p) {
            kmax = ks.iter().fold(kmax, |a, &b| a.max(b));
            margin = margin.max(field.margin(p));
        }
    }
    Ok((kmax, margin))
}

fn value_cell(v: &toml::Value) -> Cell {
    match v {
        toml::Value::Float(f) => Cell::F(*f),
        toml::Value::Integer(i) => Cell::I(*i),
        other => Cell::S(other.to_string()),
    }
}

/// Whether `series` follows `trend` under a relative tolerance.
pub fn trend_holds(series: &[f64], trend: TrendKind, tol: f64) -> bool {
    let close = |a: f64, b: f64| a == b || (a - b).abs() <= tol * a.abs().max(b.abs());
    let steps = series.windows(2);
    match trend {
        TrendKind::Increasing => steps.clone().all(|w| w[1] > w[0] && !close(w[0], w[1])),
        TrendKind::Decreasing => steps.clone().all(|w| w[1] < w[0] && !close(w[0], w[1])),
        TrendKind::NonIncreasing => steps.clone().all(|w| w[1] <= w[0] || close(w[0], w[1])),
        TrendKind::NonDecreasing => steps.clone().all(|w| w[1] >= w[0] || close(w[0], w[1])),
        TrendKind::Constant => steps.clone().all(|w| close(w[0], w[1])),
        TrendKind::NonIncreasingWithPlateau => {
            trend_holds(series, TrendKind::NonIncreasing, tol) && steps.clone().any(|w| close(w[0], w[1]))
        }
    }
}

fn run_sweep(sweep: &Sweep, sink: &mut Sink, checks: &mut Vec<CheckResult>) -> Result<()> {
    let mut t = Table::new(&["value", "afr_cells", "afr_area", "delta_1", "delta_2", "k_max_boundary", "margin_boundary"]);
    let mut cols: Vec<[f64; 4]> = Vec::with_capacity(sweep.points.len());
    for pt in &sweep.points {
        let c = &pt.case;
        let ctx = || format!("sweep '{}' at {}", sweep.name, pt.value);
        let (k, x_s) = (c.scene.k(), c.scene.source);
        let mask = afr(&c.array, &c.scene).context(ctx)?;
        let widths = match resolution_box(&c.array, x_s, k, c.frame) {
            Ok(b) => b.widths,
            Err(NfalError::UnboundedRegion(i)) => {
                let mut w = [0.0; 2];
                for (j, band) in bandwidth(&c.array, x_s, k, c.frame).context(ctx)?.axes.iter().enumerate() {
                    w[j] = if j == i { f64::INFINITY } else { band.resolution() };
                }
                w
            }
            Err(e) => return Err(CliError::Analysis { context: ctx(), source: e }),
        };
        let (kb, mb) = boundary_k(&c.array, x_s, k, c.scene.grid())?;
        t.row(vec![
            value_cell(&pt.value),
            mask.count().into(),
            mask.area().into(),
            widths[0].into(),
            widths[1].into(),
            kb.into(),
            mb.into(),
        ]);
        cols.push([mask.area(), widths[0], widths[1], kb]);
    }
    sink.csv(&format!("sweep_{}.csv", sweep.name), &t)?;
    let mut flags = Table::new(&["metric", "trend", "pass"]);
    for e in &sweep.expect {
        let idx = match e.metric {
            Metric::AfrArea => 0,
            Metric::Delta1 => 1,
            Metric::Delta2 => 2,
            Metric::KMaxBoundary => 3,
        };
        let series: Vec<f64> = cols.iter().map(|c| c[idx]).collect();
        let pass = trend_holds(&series, e.trend, TREND_TOL);
        flags.row(vec![e.metric.column().into(), e.trend.label().into(), pass.into()]);
        let shown: Vec<String> = series.iter().map(|v| format!("{v:.6e}")).collect();
        checks.push(CheckResult {
            scope: format!("sweep:{}", sweep.name),
            name: format!("{} {}", e.metric.column(), e.trend.label()),
            pass,
            detail: format!("{} over {} = [{}]", e.metric.column(), sweep.parameter, shown.join(" ")),
        });
    }
    sink.csv(&format!("sweep_{}_flags.csv", sweep.name), &flags)
}
