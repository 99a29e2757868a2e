//! JSON formats, seeded generators and SVG rendering behind the command line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arrangement::{great_circle, Arrangement, Curve, WeightedPseudocircle};
use crate::error::{Error, Result};
use crate::oriented_matroid::{Chirotope, CovectorSet, MAX_ELEMENTS};
use crate::spherical_kernel::{ChartBasis, ChartPoint, UnitVec3, Vec3};
use crate::straighten::DeformationTrace;

/// Vertices read from JSON may be off the unit sphere by this much.
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Vertices per generated circle.
pub const GEN_VERTICES: usize = 64;

/// Rejection-sampling cap of the generators.
pub const GEN_TRIES: usize = 1000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementRepr {
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 3]>>,
}

/// Wire form of an arrangement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrangementRepr {
    pub n: usize,
    pub elements: Vec<ElementRepr>,
    pub symmetric: bool,
}

impl From<Arrangement> for ArrangementRepr {
    fn from(a: Arrangement) -> Self {
        let elements = a
            .elements
            .iter()
            .map(|e| ElementRepr {
                weight: e.weight(),
                vertices: e.curve().map(|c| c.vertices().iter().map(UnitVec3::to_array).collect()),
            })
            .collect();
        ArrangementRepr { n: a.n(), elements, symmetric: a.symmetric }
    }
}

impl TryFrom<ArrangementRepr> for Arrangement {
    type Error = Error;

    fn try_from(r: ArrangementRepr) -> Result<Arrangement> {
        if r.n > MAX_ELEMENTS {
            return Err(Error::InvalidInput(format!("at most {MAX_ELEMENTS} elements are supported")));
        }
        if r.n != r.elements.len() {
            return Err(Error::invalid(format!("n = {} but {} elements given", r.n, r.elements.len())));
        }
        let mut elements = Vec::with_capacity(r.n);
        for (i, e) in r.elements.into_iter().enumerate() {
            if e.weight == 0.0 {
                elements.push(WeightedPseudocircle::trivial());
                continue;
            }
            let Some(vs) = e.vertices else {
                return Err(Error::invalid(format!("element {i} has positive weight and no vertices")));
            };
            let mut unit = Vec::with_capacity(vs.len());
            for v in vs {
                let v = Vec3::from(v);
                if (v.norm() - 1.0).abs() > UNIT_TOLERANCE {
                    return Err(Error::invalid(format!("element {i}: vertex {v:?} is not a unit vector")));
                }
                unit.push(UnitVec3::from_vec(v));
            }
            elements.push(WeightedPseudocircle::from_vertices(e.weight, unit)?);
        }
        Ok(Arrangement::new(elements, r.symmetric))
    }
}

pub fn read_arrangement(json: &str) -> Result<Arrangement> {
    let repr: ArrangementRepr = serde_json::from_str(json)?;
    Arrangement::try_from(repr)
}

pub fn write_arrangement(a: &Arrangement) -> String {
    serde_json::to_string_pretty(a).expect("arrangement serializes")
}

pub fn covectors_json(x: &CovectorSet) -> serde_json::Value {
    serde_json::Value::from(x.iter().map(|v| v.to_string()).collect::<Vec<_>>())
}

/// Chirotope as a list of `[i, j, k, sign]` over sorted triples.
pub fn chirotope_json(chi: &Chirotope) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = chi
        .sorted_entries()
        .into_iter()
        .map(|(i, j, k, s)| serde_json::json!([i, j, k, s.to_i8()]))
        .collect();
    serde_json::Value::from(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    RandomCircles,
    Perturbed,
    NonPappus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub amplitude: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn check(&self) -> Result<()> {
        if !(0.0..=0.2).contains(&self.amplitude) {
            return Err(Error::InvalidInput(format!("amplitude {} outside [0, 0.2]", self.amplitude)));
        }
        if self.kind != GenKind::NonPappus && !(3..=MAX_ELEMENTS).contains(&self.n) {
            return Err(Error::InvalidInput(format!("n = {} outside [3, 128]", self.n)));
        }
        Ok(())
    }
}

const NON_PAPPUS: &str = include_str!("../data/non_pappus.json");

/// The embedded 9-element non-Pappus arrangement.
pub fn non_pappus() -> Arrangement {
    read_arrangement(NON_PAPPUS).expect("embedded non-Pappus arrangement parses")
}

fn gaussian_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(StandardNormal.sample(rng), StandardNormal.sample(rng), StandardNormal.sample(rng));
        if v.norm() > 1e-6 {
            return v.normalize();
        }
    }
}

/// A great circle whose first half is pushed off along its normal by
/// independent Gaussian offsets of standard deviation `amplitude`; the
/// second half is the negation of the first.
fn perturbed_circle(normal: &Vec3, amplitude: f64, rng: &mut ChaCha8Rng) -> Result<Curve> {
    let base = great_circle(normal, None, GEN_VERTICES);
    if amplitude == 0.0 {
        return Ok(base);
    }
    let half = GEN_VERTICES / 2;
    let mut vs: Vec<UnitVec3> = base.vertices()[..half]
        .iter()
        .map(|v| {
            let g: f64 = StandardNormal.sample(rng);
            UnitVec3::from_vec(v.v() + normal * (amplitude * g))
        })
        .collect();
    let neg: Vec<UnitVec3> = vs.iter().map(|v| -*v).collect();
    vs.extend(neg);
    Curve::new(vs)
}

pub fn gen(spec: &GenSpec) -> Result<Arrangement> {
    spec.check()?;
    if spec.kind == GenKind::NonPappus {
        return Ok(non_pappus());
    }
    let amplitude = if spec.kind == GenKind::Perturbed { spec.amplitude } else { 0.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..GEN_TRIES {
        let mut elements = Vec::with_capacity(spec.n);
        for _ in 0..spec.n {
            let normal = gaussian_unit(&mut rng);
            elements.push(WeightedPseudocircle::new(1.0, perturbed_circle(&normal, amplitude, &mut rng)?)?);
        }
        let a = Arrangement::new(elements, true);
        if a.validate().is_ok_and(|r| r.valid && r.spanning) {
            return Ok(a);
        }
    }
    Err(Error::Degenerate { stage: "gen", detail: format!("no valid spanning sample in {GEN_TRIES} tries") })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum View {
    SphereOrthographicNorth,
    SphereOrthographicSouth,
    Chart,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub view: View,
    pub width: u32,
    pub height: u32,
    /// Stroke colors, cycled by element index.
    pub strokes: Vec<String>,
    pub labels: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            view: View::SphereOrthographicNorth,
            width: 512,
            height: 512,
            strokes: ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            labels: false,
        }
    }
}

impl RenderSpec {
    pub fn check(&self) -> Result<()> {
        for d in [self.width, self.height] {
            if !(64..=8192).contains(&d) {
                return Err(Error::InvalidInput(format!("image size {d} outside [64, 8192]")));
            }
        }
        if self.strokes.is_empty() {
            return Err(Error::InvalidInput("empty stroke table".into()));
        }
        Ok(())
    }

    /// Chart window half-width in chart units.
    const CHART_EXTENT: f64 = 3.0;

    /// Screen position of `x`, or None when it is hidden in this view.
    fn project(&self, x: &UnitVec3) -> Option<(f64, f64)> {
        let (w, h) = (self.width as f64, self.height as f64);
        let r = 0.45 * w.min(h);
        let (u, v) = match self.view {
            View::SphereOrthographicNorth => (x.z() >= 0.0).then_some((x.x(), x.y()))?,
            View::SphereOrthographicSouth => (x.z() <= 0.0).then_some((x.x(), -x.y()))?,
            View::Chart => match ChartBasis::standard().to_chart(x) {
                ChartPoint::Affine(u, v) if x.x() > 0.0 => {
                    let e = Self::CHART_EXTENT;
                    (u.abs() <= 4.0 * e && v.abs() <= 4.0 * e).then_some((u / e, v / e))?
                }
                _ => return None,
            },
        };
        Some((0.5 * w + r * u, 0.5 * h - r * v))
    }
}

/// Visible runs of a curve's densely resampled trace.
fn visible_runs(c: &Curve, spec: &RenderSpec) -> Vec<Vec<(f64, f64)>> {
    let pts = c.resample(512);
    let proj: Vec<Option<(f64, f64)>> = pts.iter().map(|p| spec.project(p)).collect();
    let Some(start) = proj.iter().position(Option::is_none) else {
        let mut run: Vec<_> = proj.into_iter().flatten().collect();
        run.push(run[0]);
        return vec![run];
    };
    let n = proj.len();
    let mut runs = Vec::new();
    let mut cur = Vec::new();
    for k in 1..=n {
        match proj[(start + k) % n] {
            Some(p) => cur.push(p),
            None if cur.len() > 1 => runs.push(std::mem::take(&mut cur)),
            None => cur.clear(),
        }
    }
    runs
}

/// Deterministic SVG of an arrangement.
pub fn render(a: &Arrangement, spec: &RenderSpec) -> Result<String> {
    spec.check()?;
    let (w, h) = (spec.width, spec.height);
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    if spec.view != View::Chart {
        let r = 0.45 * f64::from(w.min(h));
        writeln!(s, r##"<circle cx="{:.3}" cy="{:.3}" r="{r:.3}" fill="none" stroke="#999"/>"##, 0.5 * f64::from(w), 0.5 * f64::from(h))
            .unwrap();
    }
    for (i, e) in a.elements.iter().enumerate() {
        let Some(c) = e.curve() else { continue };
        let stroke = &spec.strokes[i % spec.strokes.len()];
        let runs = visible_runs(c, spec);
        for run in &runs {
            let mut d = String::new();
            for (k, (x, y)) in run.iter().enumerate() {
                write!(d, "{}{x:.3},{y:.3}", if k == 0 { "M" } else { " L" }).unwrap();
            }
            if run.len() > 2 && run.first() == run.last() {
                d.push_str(" Z");
            }
            writeln!(s, r#"<path data-element="{i}" d="{d}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#).unwrap();
        }
        if spec.labels {
            if let Some((x, y)) = runs.first().and_then(|r| r.first()) {
                writeln!(s, r#"<text x="{x:.3}" y="{y:.3}" font-size="12" fill="{stroke}">{i}</text>"#).unwrap();
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Writes `frame_NNN.svg` per trace frame and `index.html` into `dir`,
/// returning the paths written.
pub fn render_trace(trace: &DeformationTrace, spec: &RenderSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    let io = |path: &Path, source| Error::Io { path: path.display().to_string(), source };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    let mut index = String::from("<!DOCTYPE html>\n<html><body>\n");
    for (k, f) in trace.frames.iter().enumerate() {
        let name = format!("frame_{k:03}.svg");
        let path = dir.join(&name);
        fs::write(&path, render(&f.arrangement, spec)?).map_err(|e| io(&path, e))?;
        writeln!(index, r#"<figure><img src="{name}"/><figcaption>{k}: {} t={:.4}</figcaption></figure>"#, f.stage, f.t)
            .unwrap();
        written.push(path);
    }
    index.push_str("</body></html>\n");
    let path = dir.join("index.html");
    fs::write(&path, index).map_err(|e| io(&path, e))?;
    written.push(path);
    Ok(written)
}
