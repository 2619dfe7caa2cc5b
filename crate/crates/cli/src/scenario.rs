//! Scenario files: schema, validation and resolution into ready-to-run cases.

use std::f64::consts::PI;

use nfal_core::analysis::Frame;
use nfal_core::geometry::{ArrayGeometry, Scene, Vec2};
use nfal_core::grid::Rect;
use nfal_core::spectrum::{DEFAULT_SHAPE, DEFAULT_THRESHOLD};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default, rename = "case")]
    pub cases: Vec<CaseSpec>,
    #[serde(default, rename = "sweep")]
    pub sweeps: Vec<SweepSpec>,
}

/// Values inherited by every case that does not set them.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub region: Option<[f64; 4]>,
    pub grid: Option<[usize; 2]>,
    pub frame: Option<FrameName>,
    pub spectrum_shape: Option<[usize; 2]>,
    pub spectrum_region: Option<[f64; 4]>,
    pub threshold: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameName {
    Axis,
    Beam,
    Polar,
}

impl From<FrameName> for Frame {
    fn from(f: FrameName) -> Frame {
        match f {
            FrameName::Axis => Frame::AxisAligned,
            FrameName::Beam => Frame::BeamAligned,
            FrameName::Polar => Frame::Polar,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    Af,
    Afr,
    Resolution,
    Ncz,
    Cae,
    SpectrumG,
    SpectrumH,
    Loci,
    CheckProp1,
    CheckProp2,
    CheckProp3,
    SafeSpacing,
}

/// Expected verdict of a proposition check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Equal,
    Strict,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub array: ArraySpec,
    /// Second array for the proposition checks.
    pub other: Option<ArraySpec>,
    pub scene: SceneSpec,
    pub outputs: Vec<Output>,
    pub test_point: Option<[f64; 2]>,
    pub expect: Option<Expect>,
    pub frame: Option<FrameName>,
    pub spectrum_shape: Option<[usize; 2]>,
    pub spectrum_region: Option<[f64; 4]>,
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub source: [f64; 2],
    pub region: Option<[f64; 4]>,
    pub grid: Option<[usize; 2]>,
}

fn origin() -> [f64; 2] {
    [0.0, 0.0]
}

fn x_axis() -> [f64; 2] {
    [1.0, 0.0]
}

fn full_circle() -> f64 {
    360.0
}

/// Array builders. Lengths in wavelengths, angles in degrees.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArraySpec {
    /// Exactly two of `n`, `aperture`, `spacing`.
    Linear {
        n: Option<usize>,
        aperture: Option<f64>,
        spacing: Option<f64>,
        #[serde(default = "origin")]
        center: [f64; 2],
        #[serde(default = "x_axis")]
        axis: [f64; 2],
    },
    /// Per axis exactly one of `aperture_*`, `spacing_*`.
    Rectangular {
        nx: usize,
        ny: usize,
        aperture_x: Option<f64>,
        aperture_y: Option<f64>,
        spacing_x: Option<f64>,
        spacing_y: Option<f64>,
        #[serde(default = "origin")]
        center: [f64; 2],
    },
    /// Exactly one of `n`, `dtheta_deg`. The arc is centred on +y unless `start_deg` is set.
    Circular {
        n: Option<usize>,
        dtheta_deg: Option<f64>,
        #[serde(default = "full_circle")]
        arc_deg: f64,
        radius: f64,
        #[serde(default = "origin")]
        center: [f64; 2],
        start_deg: Option<f64>,
    },
    /// Rings given by `radii`, or by `r_min`, `r_max` and `n_r`.
    Concentric {
        n_theta: Option<usize>,
        dtheta_deg: Option<f64>,
        #[serde(default = "full_circle")]
        arc_deg: f64,
        radii: Option<Vec<f64>>,
        r_min: Option<f64>,
        r_max: Option<f64>,
        n_r: Option<usize>,
        #[serde(default = "origin")]
        center: [f64; 2],
        start_deg: Option<f64>,
    },
    Points { points: Vec<[f64; 2]> },
}

/// One swept parameter over a base case.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Name of the case used as template.
    pub base: String,
    /// Dotted path into the case table, e.g. `array.spacing` or `scene.source.y`.
    pub parameter: ParameterList,
    pub values: Vec<toml::Value>,
    #[serde(default)]
    pub expect: Vec<Trend>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ParameterList {
    One(String),
    Many(Vec<String>),
}

/// Expected behaviour of one sweep column.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trend {
    pub metric: Metric,
    pub trend: TrendKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    AfrArea,
    Delta1,
    Delta2,
    KMaxBoundary,
}

impl Metric {
    pub fn column(self) -> &'static str {
        match self {
            Metric::AfrArea => "afr_area",
            Metric::Delta1 => "delta_1",
            Metric::Delta2 => "delta_2",
            Metric::KMaxBoundary => "k_max_boundary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrendKind {
    Increasing,
    Decreasing,
    NonIncreasing,
    NonDecreasing,
    Constant,
    /// Non-increasing with at least one equal step.
    NonIncreasingWithPlateau,
}

impl TrendKind {
    pub fn label(self) -> &'static str {
        match self {
            TrendKind::Increasing => "increasing",
            TrendKind::Decreasing => "decreasing",
            TrendKind::NonIncreasing => "non-increasing",
            TrendKind::NonDecreasing => "non-decreasing",
            TrendKind::Constant => "constant",
            TrendKind::NonIncreasingWithPlateau => "non-increasing-with-plateau",
        }
    }
}

/// A case with its geometry built and every default applied.
#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub description: String,
    pub array: ArrayGeometry,
    pub array_spec: ArraySpec,
    pub other: Option<ArrayGeometry>,
    pub scene: Scene,
    pub outputs: Vec<Output>,
    pub test_point: Option<Vec2>,
    pub expect: Option<Expect>,
    pub frame: Frame,
    pub spectrum_shape: (usize, usize),
    pub spectrum_region: Option<Rect>,
    pub threshold: f64,
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: toml::Value,
    pub case: Case,
}

#[derive(Clone, Debug)]
pub struct Sweep {
    pub name: String,
    pub description: String,
    pub parameter: String,
    pub points: Vec<SweepPoint>,
    pub expect: Vec<Trend>,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub cases: Vec<Case>,
    pub sweeps: Vec<Sweep>,
}

struct Ctx<'a> {
    path: &'a str,
}

impl Ctx<'_> {
    fn err(&self, field: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Invalid { path: self.path.to_string(), field: field.into(), message: message.into() }
    }
}

/// Parse and fully validate a scenario; `origin` names the source in diagnostics.
pub fn parse(text: &str, origin: &str) -> Result<Scenario> {
    let parse_err = |e: toml::de::Error| CliError::Parse { path: origin.to_string(), message: e.to_string() };
    let file: ScenarioFile = toml::from_str(text).map_err(parse_err)?;
    let raw: toml::Table = text.parse().map_err(parse_err)?;
    let ctx = Ctx { path: origin };
    validate_name(&ctx, "name", &file.name)?;
    if file.cases.is_empty() {
        return Err(ctx.err("case", "a scenario needs at least one [[case]]"));
    }
    let raw_cases: Vec<toml::Table> = match raw.get("case") {
        Some(toml::Value::Array(a)) => a.iter().filter_map(|v| v.as_table().cloned()).collect(),
        _ => Vec::new(),
    };
    let mut cases = Vec::with_capacity(file.cases.len());
    for (i, spec) in file.cases.iter().enumerate() {
        let field = format!("case[{i}]");
        validate_name(&ctx, &format!("{field}.name"), &spec.name)?;
        if cases.iter().any(|c: &Case| c.name == spec.name) {
            return Err(ctx.err(format!("{field}.name"), format!("duplicate case name '{}'", spec.name)));
        }
        cases.push(resolve_case(&ctx, &field, spec, &file.defaults)?);
    }
    let mut sweeps = Vec::with_capacity(file.sweeps.len());
    for (i, s) in file.sweeps.iter().enumerate() {
        let field = format!("sweep[{i}]");
        validate_name(&ctx, &format!("{field}.name"), &s.name)?;
        if sweeps.iter().any(|w: &Sweep| w.name == s.name) {
            return Err(ctx.err(format!("{field}.name"), format!("duplicate sweep name '{}'", s.name)));
        }
        let parameter = match &s.parameter {
            ParameterList::One(p) => p.clone(),
            ParameterList::Many(v) if v.len() == 1 => v[0].clone(),
            ParameterList::Many(v) => {
                return Err(ctx.err(
                    format!("{field}.parameter"),
                    format!("invalid argument: exactly one swept parameter per sweep block, got {}", v.len()),
                ))
            }
        };
        if s.values.is_empty() {
            return Err(ctx.err(format!("{field}.values"), "at least one value is required"));
        }
        let Some(pos) = file.cases.iter().position(|c| c.name == s.base) else {
            return Err(ctx.err(format!("{field}.base"), format!("no case named '{}'", s.base)));
        };
        let base = raw_cases
            .get(pos)
            .ok_or_else(|| ctx.err(format!("{field}.base"), "base case table not found"))?;
        let mut points = Vec::with_capacity(s.values.len());
        for (j, v) in s.values.iter().enumerate() {
            let vfield = format!("{field}.values[{j}]");
            let mut table = base.clone();
            set_path(&mut table, &parameter).map(|slot| *slot = v.clone()).map_err(|m| ctx.err(&vfield, m))?;
            let spec: CaseSpec = toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| ctx.err(&vfield, e.message().to_string()))?;
            let case = resolve_case(&ctx, &vfield, &spec, &file.defaults)?;
            points.push(SweepPoint { value: v.clone(), case });
        }
        sweeps.push(Sweep {
            name: s.name.clone(),
            description: s.description.clone(),
            parameter,
            points,
            expect: s.expect.clone(),
        });
    }
    Ok(Scenario { name: file.name, description: file.description, cases, sweeps })
}

fn validate_name(ctx: &Ctx, field: &str, name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        && !name.starts_with('-');
    if ok {
        Ok(())
    } else {
        Err(ctx.err(field, format!("'{name}' must be non-empty and use only [A-Za-z0-9_-]")))
    }
}

/// Locate the slot addressed by a dotted path; `.x`/`.y` index two-element arrays.
fn set_path<'a>(table: &'a mut toml::Table, path: &str) -> std::result::Result<&'a mut toml::Value, String> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.len() < 2 {
        return Err(format!("parameter '{path}' must name a field inside a table, e.g. array.spacing"));
    }
    let mut cur = table
        .get_mut(parts[0])
        .ok_or_else(|| format!("parameter '{path}': no table '{}' in the base case", parts[0]))?;
    for (i, part) in parts.iter().enumerate().skip(1) {
        let last = i + 1 == parts.len();
        cur = match cur {
            toml::Value::Table(t) => {
                if last {
                    t.entry(part.to_string()).or_insert(toml::Value::Boolean(false))
                } else {
                    t.get_mut(*part).ok_or_else(|| format!("parameter '{path}': no field '{part}'"))?
                }
            }
            toml::Value::Array(a) if a.len() == 2 && (*part == "x" || *part == "y") => {
                &mut a[if *part == "x" { 0 } else { 1 }]
            }
            _ => return Err(format!("parameter '{path}': '{part}' does not address a field")),
        };
    }
    Ok(cur)
}

fn finite(ctx: &Ctx, field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ctx.err(field, format!("must be finite, got {v}")))
    }
}

fn rect(ctx: &Ctx, field: &str, r: [f64; 4]) -> Result<Rect> {
    for v in r {
        finite(ctx, field, v)?;
    }
    let out = Rect::new(r[0], r[1], r[2], r[3]);
    out.validate().map_err(|e| ctx.err(field, e.to_string()))?;
    Ok(out)
}

fn resolve_case(ctx: &Ctx, field: &str, spec: &CaseSpec, d: &Defaults) -> Result<Case> {
    if spec.outputs.is_empty() {
        return Err(ctx.err(format!("{field}.outputs"), "at least one output is required"));
    }
    let array = build_array(ctx, &format!("{field}.array"), &spec.array)?;
    let other = spec.other.as_ref().map(|o| build_array(ctx, &format!("{field}.other"), o)).transpose()?;
    let region = spec
        .scene
        .region
        .or(d.region)
        .ok_or_else(|| ctx.err(format!("{field}.scene.region"), "missing (set it here or in [defaults])"))?;
    let region = rect(ctx, &format!("{field}.scene.region"), region)?;
    let grid = spec
        .scene
        .grid
        .or(d.grid)
        .ok_or_else(|| ctx.err(format!("{field}.scene.grid"), "missing (set it here or in [defaults])"))?;
    let source = Vec2::new(
        finite(ctx, &format!("{field}.scene.source"), spec.scene.source[0])?,
        finite(ctx, &format!("{field}.scene.source"), spec.scene.source[1])?,
    );
    let scene = Scene::new(source, region, (grid[0], grid[1])).map_err(|e| ctx.err(format!("{field}.scene"), e.to_string()))?;
    scene.validate_for(&array).map_err(|e| ctx.err(format!("{field}.scene.source"), e.to_string()))?;
    let mut outputs = spec.outputs.clone();
    outputs.sort();
    outputs.dedup();
    let needs_axes = outputs
        .iter()
        .any(|o| matches!(o, Output::Afr | Output::Cae | Output::CheckProp1 | Output::CheckProp2 | Output::CheckProp3));
    if needs_axes {
        array
            .sample_axes()
            .map_err(|e| ctx.err(format!("{field}.array"), format!("{e}; aliasing outputs need a uniform array")))?;
    }
    let props = outputs.iter().any(|o| matches!(o, Output::CheckProp1 | Output::CheckProp2 | Output::CheckProp3));
    if props && other.is_none() {
        return Err(ctx.err(format!("{field}.other"), "proposition checks need a second array"));
    }
    if let Some(o) = &other {
        scene.validate_for(o).map_err(|e| ctx.err(format!("{field}.other"), e.to_string()))?;
    }
    let test_point = spec
        .test_point
        .map(|p| -> Result<Vec2> {
            Ok(Vec2::new(finite(ctx, &format!("{field}.test_point"), p[0])?, finite(ctx, &format!("{field}.test_point"), p[1])?))
        })
        .transpose()?;
    if test_point.is_none() && outputs.iter().any(|o| matches!(o, Output::SpectrumG | Output::Loci)) {
        return Err(ctx.err(format!("{field}.test_point"), "spectrum-g and loci need a test point"));
    }
    if let Some(p) = test_point {
        if array.min_distance_to(p) <= nfal_core::geometry::SINGULARITY_GUARD {
            return Err(ctx.err(format!("{field}.test_point"), "test point coincides with an antenna"));
        }
    }
    if outputs.contains(&Output::Loci) {
        loci_curve_supported(&array).map_err(|m| ctx.err(format!("{field}.array"), m))?;
    }
    let threshold = spec.threshold.or(d.threshold).unwrap_or(DEFAULT_THRESHOLD);
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(ctx.err(format!("{field}.threshold"), format!("must lie in (0, 1), got {threshold}")));
    }
    let shape = spec.spectrum_shape.or(d.spectrum_shape).unwrap_or([DEFAULT_SHAPE, DEFAULT_SHAPE]);
    if shape[0] < 2 || shape[1] < 2 {
        return Err(ctx.err(format!("{field}.spectrum_shape"), "needs at least 2 cells per axis"));
    }
    let spectrum_region = spec
        .spectrum_region
        .or(d.spectrum_region)
        .map(|r| rect(ctx, &format!("{field}.spectrum_region"), r))
        .transpose()?;
    let frame: Frame = spec.frame.or(d.frame).unwrap_or(FrameName::Beam).into();
    if frame == Frame::BeamAligned && (source - array.centroid()).norm() == 0.0 {
        return Err(ctx.err(format!("{field}.frame"), "beam frame undefined with the source at the array centroid"));
    }
    Ok(Case {
        name: spec.name.clone(),
        description: spec.description.clone(),
        array,
        array_spec: spec.array.clone(),
        other,
        scene,
        outputs,
        test_point,
        expect: spec.expect,
        frame,
        spectrum_shape: (shape[0], shape[1]),
        spectrum_region,
        threshold,
    })
}

/// Loci are traced along straight x-axis arrays or single-ring arcs.
pub(crate) fn loci_curve_supported(array: &ArrayGeometry) -> std::result::Result<(), String> {
    use nfal_core::geometry::Sampling;
    match array.sampling() {
        Sampling::Lattice(axes) if axes.len() == 1 => Ok(()),
        Sampling::Polar(l) if l.radii.len() == 1 => Ok(()),
        _ => Err("loci need a linear array or a single-ring circular array".into()),
    }
}

fn count_from(ctx: &Ctx, field: &str, span: f64, step: f64, plus_one: bool) -> Result<usize> {
    if !(step > 0.0) || !step.is_finite() || !(span > 0.0) || !span.is_finite() {
        return Err(ctx.err(field, "span and spacing must be positive and finite"));
    }
    let q = span / step;
    let r = q.round();
    if (q - r).abs() > 1e-9 * q.max(1.0) {
        return Err(ctx.err(field, format!("span {span} is not a whole multiple of spacing {step}")));
    }
    Ok(r as usize + usize::from(plus_one))
}

fn build_array(ctx: &Ctx, field: &str, spec: &ArraySpec) -> Result<ArrayGeometry> {
    let wrap = |e: nfal_core::NfalError| ctx.err(field, e.to_string());
    let v = |a: [f64; 2]| Vec2::new(a[0], a[1]);
    match spec {
        ArraySpec::Linear { n, aperture, spacing, center, axis } => {
            let (n, aperture) = match (*n, *aperture, *spacing) {
                (Some(n), Some(a), None) => (n, a),
                (Some(n), None, Some(s)) => (n, s * n.saturating_sub(1) as f64),
                (None, Some(a), Some(s)) => (count_from(ctx, field, a, s, true)?, a),
                _ => return Err(ctx.err(field, "give exactly two of n, aperture, spacing")),
            };
            ArrayGeometry::build_linear(n, aperture, v(*center), v(*axis)).map_err(wrap)
        }
        ArraySpec::Rectangular { nx, ny, aperture_x, aperture_y, spacing_x, spacing_y, center } => {
            let span = |n: usize, a: Option<f64>, s: Option<f64>, name: &str| -> Result<f64> {
                match (a, s) {
                    (Some(a), None) => Ok(a),
                    (None, Some(s)) => Ok(s * n.saturating_sub(1) as f64),
                    _ => Err(ctx.err(field, format!("give exactly one of aperture_{name}, spacing_{name}"))),
                }
            };
            let dx = span(*nx, *aperture_x, *spacing_x, "x")?;
            let dy = span(*ny, *aperture_y, *spacing_y, "y")?;
            ArrayGeometry::build_rectangular(*nx, *ny, dx, dy, v(*center)).map_err(wrap)
        }
        ArraySpec::Circular { n, dtheta_deg, arc_deg, radius, center, start_deg } => {
            let (n, arc, start) = angular(ctx, field, *n, *dtheta_deg, *arc_deg, *start_deg)?;
            ArrayGeometry::build_circular(n, arc, *radius, v(*center), start).map_err(wrap)
        }
        ArraySpec::Concentric { n_theta, dtheta_deg, arc_deg, radii, r_min, r_max, n_r, center, start_deg } => {
            let (n, arc, start) = angular(ctx, field, *n_theta, *dtheta_deg, *arc_deg, *start_deg)?;
            let radii = match (radii, r_min, r_max, n_r) {
                (Some(r), None, None, None) => r.clone(),
                (None, Some(a), Some(b), Some(m)) if *m >= 2 => {
                    (0..*m).map(|i| a + (b - a) * i as f64 / (*m as f64 - 1.0)).collect()
                }
                (None, Some(a), None, Some(1)) => vec![*a],
                _ => return Err(ctx.err(field, "give either radii, or r_min, r_max and n_r >= 2")),
            };
            ArrayGeometry::build_concentric(n, arc, &radii, v(*center), start).map_err(wrap)
        }
        ArraySpec::Points { points } => ArrayGeometry::from_points(points.iter().map(|p| v(*p)).collect()).map_err(wrap),
    }
}

/// Element count, arc (rad) and start angle (rad) of an angular layout.
fn angular(
    ctx: &Ctx,
    field: &str,
    n: Option<usize>,
    dtheta_deg: Option<f64>,
    arc_deg: f64,
    start_deg: Option<f64>,
) -> Result<(usize, f64, f64)> {
    if !(arc_deg > 0.0 && arc_deg <= 360.0) {
        return Err(ctx.err(field, format!("arc_deg must lie in (0, 360], got {arc_deg}")));
    }
    let full = arc_deg == 360.0;
    let n = match (n, dtheta_deg) {
        (Some(n), None) => n,
        (None, Some(d)) => count_from(ctx, field, arc_deg, d, !full)?,
        _ => return Err(ctx.err(field, "give exactly one of the element count and dtheta_deg")),
    };
    let arc = arc_deg.to_radians();
    let start = match start_deg {
        Some(s) => finite(ctx, field, s)?.to_radians(),
        None if full => 0.0,
        None => PI / 2.0 - arc / 2.0,
    };
    Ok((n, arc, start))
}
