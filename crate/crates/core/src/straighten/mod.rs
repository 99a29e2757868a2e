//! Straightening: chord redraw over a straight prefix, basis normalization,
//! the pivot deformations, PL interpolation between arrangements with equal
//! covectors, and the greedy pipeline ending at a Parseval frame.

mod chart;
mod interp;
mod pivot;
mod redraw;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use chart::{chart_crossings, ChartPseudoline};
pub use interp::{interp_pl, Interpolator};
pub use pivot::{h_pivot_cell, h_projective_pivot, ProjectivePivot};
pub use redraw::{basis_normalize, chord_redraw};

use crate::arrangement::{coincide, Arrangement, CellComplex, Curve, WeightedPseudocircle};
use crate::error::{Error, Result};
use crate::frames::{circles_from_frame, frame_from_circles, orthonormalize_path, Frame};
use crate::spherical_kernel::ChartBasis;

/// Slack in surrogate-radius comparisons; ties go to the lowest index.
const RADIUS_SLACK: f64 = 1e-12;

/// Fewest frames a trace can hold: input, the two straightening endpoints,
/// one pivot sample and one orthonormalization sample.
pub const MIN_FRAMES: usize = 5;

/// Lower bound on how far the prefix `seq` (ending in j) is from leaving the
/// set where it is independent: ‖α_j‖ for prefixes of length 1 or more than 3;
/// for pairs the smallest weight times half their Hausdorff distance; for
/// triples the smallest weight times half the smallest distance from a face
/// sample to the curves; 0 when the prefix is dependent.
pub fn surrogate_radius(a: &Arrangement, seq: &[usize]) -> Result<f64> {
    let Some(&j) = seq.last() else { return Ok(0.0) };
    let wj = a.element(j).weight();
    if wj == 0.0 {
        return Ok(0.0);
    }
    if seq.len() == 1 || seq.len() > 3 {
        return Ok(wj);
    }
    let els: Vec<WeightedPseudocircle> = seq.iter().map(|&i| a.element(i).clone()).collect();
    if els.iter().any(WeightedPseudocircle::is_trivial) {
        return Ok(0.0);
    }
    let curves: Vec<_> = els.iter().map(|e| e.curve().unwrap()).collect();
    for x in 0..curves.len() {
        for y in x + 1..curves.len() {
            if coincide(curves[x], curves[y]).is_some() {
                return Ok(0.0);
            }
        }
    }
    let min_w = els.iter().map(|e| e.weight()).fold(f64::INFINITY, f64::min);
    if seq.len() == 2 {
        // Fréchet distance is at least Hausdorff distance, which vertices bound below.
        let spread = |p: &Curve, q: &Curve| p.vertices().iter().map(|v| q.distance(v)).fold(0.0, f64::max);
        return Ok(min_w * 0.5 * spread(curves[0], curves[1]).max(spread(curves[1], curves[0])));
    }
    let sub = Arrangement::new(els.clone(), a.symmetric);
    if !sub.is_spanning()? {
        return Ok(0.0);
    }
    let cx = CellComplex::build(&sub)?;
    let min_d = cx
        .faces
        .iter()
        .map(|f| curves.iter().map(|c| c.distance(&f.sample)).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min);
    Ok(min_w * 0.5 * min_d)
}

/// The ordered triple maximizing the smallest surrogate radius over its prefixes.
pub fn choose_basis(a: &Arrangement) -> Result<[usize; 3]> {
    let n = a.n();
    let mut pairs: HashMap<(usize, usize), f64> = HashMap::new();
    let mut triples: HashMap<[usize; 3], f64> = HashMap::new();
    let mut best: Option<([usize; 3], f64)> = None;
    for i in 0..n {
        let r1 = a.element(i).weight();
        if r1 == 0.0 {
            continue;
        }
        for j in (0..n).filter(|&j| j != i) {
            let key = (i.min(j), i.max(j));
            let r2 = match pairs.get(&key) {
                Some(r) => *r,
                None => *pairs.entry(key).or_insert(surrogate_radius(a, &[key.0, key.1])?),
            };
            if r2 == 0.0 {
                continue;
            }
            for k in (0..n).filter(|&k| k != i && k != j) {
                let mut key3 = [i, j, k];
                key3.sort_unstable();
                let r3 = match triples.get(&key3) {
                    Some(r) => *r,
                    None => *triples.entry(key3).or_insert(surrogate_radius(a, &key3)?),
                };
                let score = r1.min(r2).min(r3);
                if score > 0.0 && best.is_none_or(|(_, b)| score > b + RADIUS_SLACK) {
                    best = Some(([i, j, k], score));
                }
            }
        }
    }
    best.map(|(b, _)| b).ok_or(Error::NotSpanning)
}

/// One sampled arrangement of a deformation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFrame {
    pub t: f64,
    pub stage: String,
    pub arrangement: Arrangement,
    pub valid: bool,
}

/// Sampled frames of the straightening, with the basis it used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationTrace {
    pub basis: [usize; 3],
    pub frames: Vec<TraceFrame>,
}

impl DeformationTrace {
    pub fn all_valid(&self) -> bool {
        self.frames.iter().all(|f| f.valid)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub frames: usize,
    /// Basis to use instead of the greedy choice.
    pub basis: Option<[usize; 3]>,
    /// Run the validator on every emitted frame.
    pub validate_frames: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { frames: 20, basis: None, validate_frames: true }
    }
}

/// Straightens a valid symmetric spanning arrangement to a Parseval frame,
/// recording `frame_count` frames.
pub fn greedy_pipeline(a: &Arrangement, frame_count: usize) -> Result<(Frame, DeformationTrace)> {
    pipeline(a, &PipelineOptions { frames: frame_count, ..PipelineOptions::default() })
}

pub fn pipeline(a: &Arrangement, opts: &PipelineOptions) -> Result<(Frame, DeformationTrace)> {
    if opts.frames < MIN_FRAMES {
        return Err(Error::InvalidInput(format!("at least {MIN_FRAMES} frames are needed")));
    }
    if !a.symmetric {
        return Err(Error::InvalidInput("straightening needs a symmetric arrangement".into()));
    }
    a.require_valid_spanning()?;
    let basis = match opts.basis {
        Some(b) => {
            crate::frames::basis_vertices(a, b)?;
            b
        }
        None => choose_basis(a)?,
    };
    let rest = opts.frames - 3;
    let pivots = rest.div_ceil(2);
    let orthos = rest - pivots;

    let normalized = basis_normalize(a, basis)?;
    let chordal = chord_redraw(&normalized, &basis)?;
    let mut stages: Vec<(&'static str, Arrangement)> =
        vec![("input", a.clone()), ("basis_normalize", normalized), ("chord_redraw", chordal.clone())];

    let normals: Vec<_> = basis
        .iter()
        .map(|&i| chordal.element(i).curve().and_then(|c| c.great_circle_normal(1e-9)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::degenerate("pipeline", "basis is not straight after normalization"))?;
    let chart = ChartBasis::new(normals[0], normals[1], normals[2])
        .ok_or_else(|| Error::degenerate("pipeline", "basis normals are dependent"))?;
    let mut plans: Vec<(usize, ProjectivePivot)> = Vec::new();
    for (j, e) in chordal.elements.iter().enumerate() {
        let Some(c) = e.curve() else { continue };
        if basis.contains(&j) || c.great_circle_normal(1e-9).is_some() {
            continue;
        }
        if let Some(p) = ProjectivePivot::plan(&ChartPseudoline::from_curve(c, &chart)?)? {
            plans.push((j, p));
        }
    }
    for k in 1..=pivots {
        let t = k as f64 / pivots as f64;
        let mut arr = chordal.clone();
        for (j, p) in &plans {
            if p.angle(t) == p.phi0 {
                continue;
            }
            let w = arr.element(*j).weight();
            arr.elements[*j] = WeightedPseudocircle::new(w, p.at(t)?.lift(&chart))?;
        }
        stages.push(("projective_pivot", arr));
    }
    let straight = &stages.last().unwrap().1;
    let f0 = frame_from_circles(straight)?;
    for k in 1..=orthos {
        let t = k as f64 / orthos as f64;
        stages.push(("orthonormalize", circles_from_frame(&orthonormalize_path(&f0, t)?)));
    }
    let out = orthonormalize_path(&f0, 1.0)?;
    let last = (stages.len() - 1) as f64;
    let frames = stages
        .into_iter()
        .enumerate()
        .map(|(i, (stage, arrangement))| {
            let valid = !opts.validate_frames || arrangement.is_valid()?;
            Ok(TraceFrame { t: i as f64 / last, stage: stage.to_string(), arrangement, valid })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, DeformationTrace { basis, frames }))
}
