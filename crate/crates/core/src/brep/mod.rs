//! Explicit boundary-representation domain model.
//!
//! A [`Solid`] is a set of faces, edges and vertices keyed by id. Faces are
//! trimmed parametric surfaces bounded by ordered loops of edge references,
//! edges are trimmed parametric curves bounded by a start and end vertex.

pub mod iso;
pub mod json;
pub mod synth;
pub mod validate;

use nalgebra::Vector3;
use std::collections::BTreeMap;
use thiserror::Error;

pub type Id = u32;

/// Coincidence tolerance between a curve endpoint and its trimming vertex.
pub const VERTEX_COINCIDENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub position: Vector3<f64>,
}

/// Trimmed parametric curve. Evaluation maps a parameter in `domain` to a
/// 3D point; the domain endpoints are the trimming vertices of the edge.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// `a` and `b` are the points at the domain endpoints.
    Line {
        a: Vector3<f64>,
        b: Vector3<f64>,
        domain: [f64; 2],
    },
    /// Circle of `radius` about `center` in the plane spanned by `x_ref` and
    /// `axis × x_ref`; the parameter is the angle measured from `x_ref`.
    Arc {
        center: Vector3<f64>,
        axis: Vector3<f64>,
        x_ref: Vector3<f64>,
        radius: f64,
        domain: [f64; 2],
    },
    CubicBezier {
        control: [Vector3<f64>; 4],
        domain: [f64; 2],
    },
}

impl Curve {
    pub fn domain(&self) -> [f64; 2] {
        match self {
            Curve::Line { domain, .. }
            | Curve::Arc { domain, .. }
            | Curve::CubicBezier { domain, .. } => *domain,
        }
    }

    pub fn eval(&self, u: f64) -> Vector3<f64> {
        match self {
            Curve::Line { a, b, domain } => {
                let s = (u - domain[0]) / (domain[1] - domain[0]);
                a + (b - a) * s
            }
            Curve::Arc {
                center,
                axis,
                x_ref,
                radius,
                ..
            } => {
                let x = x_ref.normalize();
                let y = axis.normalize().cross(&x);
                center + (x * u.cos() + y * u.sin()) * *radius
            }
            Curve::CubicBezier { control, domain } => {
                let s = (u - domain[0]) / (domain[1] - domain[0]);
                let t = 1.0 - s;
                control[0] * (t * t * t)
                    + control[1] * (3.0 * t * t * s)
                    + control[2] * (3.0 * t * s * s)
                    + control[3] * (s * s * s)
            }
        }
    }

    pub fn start_point(&self) -> Vector3<f64> {
        self.eval(self.domain()[0])
    }

    pub fn end_point(&self) -> Vector3<f64> {
        self.eval(self.domain()[1])
    }
}

/// Trimmed parametric surface with a rectangular parameter domain
/// `[u_min, u_max] × [v_min, v_max]` stored as `[u_min, u_max, v_min, v_max]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    Plane {
        origin: Vector3<f64>,
        u_axis: Vector3<f64>,
        v_axis: Vector3<f64>,
        domain: [f64; 4],
    },
    /// `u` is the angle from `x_ref` about `axis`, `v` the offset along `axis`.
    Cylinder {
        center: Vector3<f64>,
        axis: Vector3<f64>,
        x_ref: Vector3<f64>,
        radius: f64,
        domain: [f64; 4],
    },
    /// `u` is azimuth from `x_ref`, `v` latitude towards `axis`.
    Sphere {
        center: Vector3<f64>,
        axis: Vector3<f64>,
        x_ref: Vector3<f64>,
        radius: f64,
        domain: [f64; 4],
    },
    BicubicBezier {
        /// Row-major control net, `control[i][j]` with `i` along u.
        control: [[Vector3<f64>; 4]; 4],
        domain: [f64; 4],
    },
}

fn bezier_basis(s: f64) -> [f64; 4] {
    let t = 1.0 - s;
    [t * t * t, 3.0 * t * t * s, 3.0 * t * s * s, s * s * s]
}

impl Surface {
    pub fn domain(&self) -> [f64; 4] {
        match self {
            Surface::Plane { domain, .. }
            | Surface::Cylinder { domain, .. }
            | Surface::Sphere { domain, .. }
            | Surface::BicubicBezier { domain, .. } => *domain,
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> Vector3<f64> {
        match self {
            Surface::Plane {
                origin,
                u_axis,
                v_axis,
                ..
            } => origin + u_axis * u + v_axis * v,
            Surface::Cylinder {
                center,
                axis,
                x_ref,
                radius,
                ..
            } => {
                let z = axis.normalize();
                let x = x_ref.normalize();
                let y = z.cross(&x);
                center + (x * u.cos() + y * u.sin()) * *radius + z * v
            }
            Surface::Sphere {
                center,
                axis,
                x_ref,
                radius,
                ..
            } => {
                let z = axis.normalize();
                let x = x_ref.normalize();
                let y = z.cross(&x);
                center + ((x * u.cos() + y * u.sin()) * v.cos() + z * v.sin()) * *radius
            }
            Surface::BicubicBezier {
                control, domain, ..
            } => {
                let s = (u - domain[0]) / (domain[1] - domain[0]);
                let t = (v - domain[2]) / (domain[3] - domain[2]);
                let bu = bezier_basis(s);
                let bv = bezier_basis(t);
                let mut p = Vector3::zeros();
                for i in 0..4 {
                    for j in 0..4 {
                        p += control[i][j] * (bu[i] * bv[j]);
                    }
                }
                p
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub curve: Curve,
    pub start: Id,
    pub end: Id,
}

/// One oriented edge reference inside a face loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopEntry {
    pub edge: Id,
    pub reversed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub surface: Surface,
    pub loops: Vec<Vec<LoopEntry>>,
}

/// Explicit B-rep solid. Construction via [`Solid::new`] checks structural
/// invariants; watertightness is a separate query ([`validate::validate_topology`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Solid {
    pub vertices: BTreeMap<Id, Vertex>,
    pub edges: BTreeMap<Id, Edge>,
    pub faces: BTreeMap<Id, Face>,
    pub class: Option<u8>,
}

#[derive(Debug, Error, PartialEq)]
pub enum BrepError {
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(Id),
    #[error("edge {0} references missing vertex {1}")]
    DanglingVertex(Id, Id),
    #[error("face {0} references missing edge {1}")]
    DanglingEdge(Id, Id),
    #[error("edge {0} endpoint deviates from vertex {1} by {2:.3e}")]
    EndpointMismatch(Id, Id, f64),
    #[error("face {0} has no loops")]
    EmptyFace(Id),
    #[error("face {0} has an open loop at edge {1}")]
    OpenLoop(Id, Id),
    #[error("face {0} repeats edge {1} within a loop")]
    RepeatedEdge(Id, Id),
    #[error("non-manifold edge {0}: referenced by {1} faces")]
    NonManifoldEdge(Id, usize),
    #[error("edge {0}: arc radius must be positive")]
    BadRadius(Id),
    #[error("face {0}: degenerate parameter domain")]
    DegenerateDomain(Id),
}

impl Solid {
    /// Builds a solid and checks the structural invariants: all ids resolve,
    /// loops are non-empty, topologically closed and repeat-free, curve
    /// endpoints coincide with their trimming vertices, no edge is used by
    /// more than two faces.
    pub fn new(
        vertices: BTreeMap<Id, Vertex>,
        edges: BTreeMap<Id, Edge>,
        faces: BTreeMap<Id, Face>,
        class: Option<u8>,
    ) -> Result<Self, BrepError> {
        for (&vid, v) in &vertices {
            if !v.position.iter().all(|c| c.is_finite()) {
                return Err(BrepError::NonFiniteVertex(vid));
            }
        }
        for (&eid, e) in &edges {
            if let Curve::Arc { radius, .. } = e.curve {
                if radius <= 0.0 {
                    return Err(BrepError::BadRadius(eid));
                }
            }
            for (vid, point) in [(e.start, e.curve.start_point()), (e.end, e.curve.end_point())] {
                let v = vertices
                    .get(&vid)
                    .ok_or(BrepError::DanglingVertex(eid, vid))?;
                let dev = (v.position - point).norm();
                if dev > VERTEX_COINCIDENCE_TOL {
                    return Err(BrepError::EndpointMismatch(eid, vid, dev));
                }
            }
        }
        let mut edge_use: BTreeMap<Id, usize> = BTreeMap::new();
        for (&fid, face) in &faces {
            let d = face.surface.domain();
            if !(d[1] > d[0] && d[3] > d[2]) {
                return Err(BrepError::DegenerateDomain(fid));
            }
            if face.loops.is_empty() {
                return Err(BrepError::EmptyFace(fid));
            }
            for lp in &face.loops {
                if lp.is_empty() {
                    return Err(BrepError::EmptyFace(fid));
                }
                let mut seen = std::collections::BTreeSet::new();
                for entry in lp {
                    if !edges.contains_key(&entry.edge) {
                        return Err(BrepError::DanglingEdge(fid, entry.edge));
                    }
                    if !seen.insert(entry.edge) {
                        return Err(BrepError::RepeatedEdge(fid, entry.edge));
                    }
                    *edge_use.entry(entry.edge).or_insert(0) += 1;
                }
                // consecutive oriented edges must share a vertex id
                for k in 0..lp.len() {
                    let cur = &edges[&lp[k].edge];
                    let nxt_entry = lp[(k + 1) % lp.len()];
                    let nxt = &edges[&nxt_entry.edge];
                    let cur_end = if lp[k].reversed { cur.start } else { cur.end };
                    let nxt_start = if nxt_entry.reversed { nxt.end } else { nxt.start };
                    if cur_end != nxt_start {
                        return Err(BrepError::OpenLoop(fid, lp[k].edge));
                    }
                }
            }
        }
        for (&eid, &count) in &edge_use {
            if count > 2 {
                return Err(BrepError::NonManifoldEdge(eid, count));
            }
        }
        Ok(Solid {
            vertices,
            edges,
            faces,
            class,
        })
    }

    pub fn vertex(&self, id: Id) -> &Vertex {
        &self.vertices[&id]
    }

    pub fn edge(&self, id: Id) -> &Edge {
        &self.edges[&id]
    }

    pub fn face(&self, id: Id) -> &Face {
        &self.faces[&id]
    }

    /// Axis-aligned bounds over all vertices and all face-surface corners.
    pub fn bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        let mut take = |p: Vector3<f64>| {
            lo = lo.inf(&p);
            hi = hi.sup(&p);
        };
        for v in self.vertices.values() {
            take(v.position);
        }
        for f in self.faces.values() {
            let d = f.surface.domain();
            for (u, v) in [(d[0], d[2]), (d[0], d[3]), (d[1], d[2]), (d[1], d[3])] {
                take(f.surface.eval(u, v));
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn line_eval_hits_endpoints() {
        let c = Curve::Line {
            a: Vector3::new(0.0, 0.0, 0.0),
            b: Vector3::new(1.0, 2.0, 3.0),
            domain: [0.0, 1.0],
        };
        assert_relative_eq!(c.eval(0.5), Vector3::new(0.5, 1.0, 1.5));
        assert_eq!(c.start_point(), Vector3::new(0.0, 0.0, 0.0));
        assert_eq!(c.end_point(), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn arc_eval_stays_on_circle() {
        let c = Curve::Arc {
            center: Vector3::new(1.0, 1.0, 0.0),
            axis: Vector3::z(),
            x_ref: Vector3::x(),
            radius: 2.0,
            domain: [0.0, std::f64::consts::FRAC_PI_2],
        };
        for k in 0..=10 {
            let u = k as f64 / 10.0 * std::f64::consts::FRAC_PI_2;
            let p = c.eval(u);
            assert_relative_eq!((p - Vector3::new(1.0, 1.0, 0.0)).norm(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_eval_radius() {
        let s = Surface::Sphere {
            center: Vector3::zeros(),
            axis: Vector3::z(),
            x_ref: Vector3::x(),
            radius: 1.5,
            domain: [0.0, 1.0, -0.5, 0.5],
        };
        let p = s.eval(0.3, 0.2);
        assert_relative_eq!(p.norm(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn bezier_patch_corners_match_control_net() {
        let mut control = [[Vector3::zeros(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                control[i][j] = Vector3::new(i as f64, j as f64, 0.0);
            }
        }
        let s = Surface::BicubicBezier {
            control,
            domain: [0.0, 1.0, 0.0, 1.0],
        };
        assert_relative_eq!(s.eval(0.0, 0.0), control[0][0]);
        assert_relative_eq!(s.eval(1.0, 1.0), control[3][3]);
    }
}
