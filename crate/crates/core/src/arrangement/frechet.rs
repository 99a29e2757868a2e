//! Discrete cyclic Fréchet distance between weighted closed curves.

use super::curve::Curve;
use super::WeightedPseudocircle;
use crate::spherical_kernel::Vec3;

/// Samples per curve.
pub const FRECHET_SAMPLES: usize = 256;

/// Weighted Fréchet distance between two weighted pseudocircles.
///
/// Both curves are resampled to [`FRECHET_SAMPLES`] points uniformly by arc
/// length and scaled by their weights; the result is the discrete Fréchet
/// distance minimized over cyclic shifts, an upper bound within O(r·π/N) of the
/// continuous value. The second curve's samples start at its point nearest the
/// first curve's starting vertex, so identical curves give 0 regardless of how
/// their vertex lists are phased. A trivial element acts as a curve of radius 0.
pub fn weighted_frechet(a: &WeightedPseudocircle, b: &WeightedPseudocircle) -> f64 {
    match (a.curve(), b.curve()) {
        (None, None) => 0.0,
        (None, Some(_)) => b.weight(),
        (Some(_), None) => a.weight(),
        (Some(ca), Some(cb)) => curve_frechet(ca, a.weight(), cb, b.weight(), FRECHET_SAMPLES),
    }
}

pub(crate) fn curve_frechet(ca: &Curve, wa: f64, cb: &Curve, wb: f64, n: usize) -> f64 {
    let p: Vec<Vec3> = ca.resample(n).into_iter().map(|v| v.v() * wa).collect();
    let near = cb.nearest(&ca.vertex(0));
    let start = cb.position_on_edge(near.edge, &near.point);
    let q: Vec<Vec3> = cb.resample_from(start, n).into_iter().map(|v| v.v() * wb).collect();
    cyclic_frechet(&p, &q)
}

/// Discrete Fréchet distance between closed polygons `p` and `q`, minimized
/// over the starting index of `q`.
pub fn cyclic_frechet(p: &[Vec3], q: &[Vec3]) -> f64 {
    let (n, m) = (p.len(), q.len());
    let dist: Vec<f64> = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| (p[i] - q[j]).norm()).collect();
    let d = |i: usize, j: usize| dist[(i % n) * m + (j % m)];
    let mut shifts: Vec<usize> = (0..m).collect();
    shifts.sort_by(|&a, &b| d(0, a).partial_cmp(&d(0, b)).unwrap());
    let mut best = f64::INFINITY;
    let mut prev: Vec<f64> = vec![0.0; m + 1];
    let mut cur: Vec<f64> = vec![0.0; m + 1];
    for s in shifts {
        if d(0, s) >= best {
            break;
        }
        // Closed walk: p_0..p_n (= p_0) against q_s..q_{s+m} (= q_s).
        let mut pruned = false;
        for i in 0..=n {
            let mut row_min = f64::INFINITY;
            for j in 0..=m {
                let here = d(i, s + j);
                let v = match (i, j) {
                    (0, 0) => here,
                    (0, _) => cur[j - 1].max(here),
                    (_, 0) => prev[0].max(here),
                    _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(here),
                };
                cur[j] = v;
                row_min = row_min.min(v);
            }
            if row_min >= best {
                pruned = true;
                break;
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        if !pruned {
            best = best.min(prev[m]);
        }
    }
    best
}
