//! Where two closed curves meet, and whether they cross or touch there.

use super::curve::Curve;
use crate::error::Result;
use crate::spherical_kernel::{arc_intersect, stabilized, ContactKind, Sign, UnitVec3};
use crate::tolerance::EPS_CLUSTER;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeetKind {
    /// The curves pass from one side to the other.
    Crossing,
    /// The curves touch without crossing.
    Touch,
    /// The curves share a stretch.
    Overlap,
}

/// A meeting point with its arc-length positions along both curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Meeting {
    pub point: UnitVec3,
    pub s_p: f64,
    pub s_q: f64,
    pub kind: MeetKind,
}

/// All meetings of `p` with `q`, sorted by position along `p`.
pub fn meetings(p: &Curve, q: &Curve) -> Result<Vec<Meeting>> {
    stabilized("crossing detection", 0x5eed, |rot| match rot {
        None => meetings_once(p, q),
        Some(r) => {
            let rt = r.transpose();
            meetings_once(&p.mapped(r), &q.mapped(r)).map(|ms| {
                ms.into_iter()
                    .map(|m| Meeting { point: m.point.transform(&rt), ..m })
                    .collect()
            })
        }
    })
}

/// Number of transversal crossings between two curves.
pub fn crossing_count(p: &Curve, q: &Curve) -> Result<usize> {
    Ok(meetings(p, q)?.iter().filter(|m| m.kind == MeetKind::Crossing).count())
}

struct Raw {
    point: UnitVec3,
    s_p: f64,
    s_q: f64,
    overlap: bool,
}

fn meetings_once(p: &Curve, q: &Curve) -> Option<Vec<Meeting>> {
    let cap = |c: &Curve, i: usize| {
        let e = c.edge(i);
        (e.midpoint(), 0.5 * e.length())
    };
    let pcaps: Vec<_> = (0..p.vertex_count()).map(|i| cap(p, i)).collect();
    let qcaps: Vec<_> = (0..q.vertex_count()).map(|i| cap(q, i)).collect();
    let mut raw: Vec<Raw> = Vec::new();
    for (i, (pc, pr)) in pcaps.iter().enumerate() {
        for (j, (qc, qr)) in qcaps.iter().enumerate() {
            if pc.angle_to(qc) > pr + qr + 1e-9 {
                continue;
            }
            for c in arc_intersect(&p.edge(i), &q.edge(j)) {
                raw.push(Raw {
                    point: c.point,
                    s_p: p.position_on_edge(i, &c.point),
                    s_q: q.position_on_edge(j, &c.point),
                    overlap: c.kind == ContactKind::Overlap,
                });
            }
        }
    }
    // Cluster coincident contacts (a crossing at a vertex is reported by each adjacent edge).
    let mut clusters: Vec<(Raw, bool)> = Vec::new();
    for r in raw {
        if let Some(c) = clusters.iter_mut().find(|(c, _)| c.point.chord(&r.point) <= EPS_CLUSTER) {
            c.1 |= r.overlap;
        } else {
            let ov = r.overlap;
            clusters.push((r, ov));
        }
    }
    clusters.sort_by(|a, b| a.0.s_p.partial_cmp(&b.0.s_p).unwrap());
    let total = p.length();
    let count = clusters.len();
    let mut out = Vec::with_capacity(count);
    for (k, (c, overlap)) in clusters.iter().enumerate() {
        if *overlap {
            out.push(Meeting { point: c.point, s_p: c.s_p, s_q: c.s_q, kind: MeetKind::Overlap });
            continue;
        }
        let gap = if count == 1 {
            total
        } else {
            let prev = clusters[(k + count - 1) % count].0.s_p;
            let next = clusters[(k + 1) % count].0.s_p;
            (c.s_p - prev).rem_euclid(total).min((next - c.s_p).rem_euclid(total))
        };
        let mut delta = (0.25 * gap).min(1e-5);
        let mut kind = None;
        for _ in 0..4 {
            let before = q.side(&p.point_at(c.s_p - delta));
            let after = q.side(&p.point_at(c.s_p + delta));
            if before != Sign::Zero && after != Sign::Zero {
                kind = Some(if before == after { MeetKind::Touch } else { MeetKind::Crossing });
                break;
            }
            delta *= 0.1;
        }
        out.push(Meeting { point: c.point, s_p: c.s_p, s_q: c.s_q, kind: kind? });
    }
    Some(out)
}
