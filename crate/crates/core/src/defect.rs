//! Angle defects of a glued tetrahedral complex and their derivatives.
//!
//! A pre-complex records how abstract tetrahedra share vertex, edge and face
//! classes. Given a length per edge class and an orientation sign per
//! tetrahedron, the defect at edge class e is
//!
//! ```text
//! omega_e = - sum over (tetrahedron T, slots of T landing in e) of
//!             sign(T) * theta(T, slot),
//! ```
//!
//! reduced to the principal branch (-pi, pi]. A metric is flat when every
//! defect vanishes. Jacobians with respect to the edge-class lengths come
//! either from the closed-form angle gradients or from central differences
//! of the unreduced sums (branch shifts are locally constant, so the raw
//! sums are the right thing to difference).

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tetgeom::{
    dihedral_angle, dihedral_jacobian, oriented_volume, EdgeSlot, Point3, TetrahedronLengths,
    VOLUME_REL_FLOOR,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

/// One tetrahedron of a pre-complex. The vertex order is part of the data:
/// it fixes the reference orientation that the per-tetrahedron metric sign
/// is measured against. `edges[s]` is the edge class met by slot s (in
/// [`EdgeSlot::ALL`] order); `faces[k]` is the face class opposite local
/// vertex k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Tetrahedron {
    pub vertices: [usize; 4],
    pub edges: [usize; 6],
    pub faces: [usize; 4],
}

/// Tetrahedra glued along shared classes. Class counts are fixed at
/// construction; every class must actually be met, and no face class may be
/// shared by more than two tetrahedra.
#[derive(Clone, Debug, Serialize)]
pub struct PreComplex {
    vertex_count: usize,
    edge_count: usize,
    face_count: usize,
    tetrahedra: Vec<Tetrahedron>,
}

impl PreComplex {
    pub fn new(
        vertex_count: usize,
        edge_count: usize,
        face_count: usize,
        tetrahedra: Vec<Tetrahedron>,
    ) -> Result<Self> {
        let mut vertex_used = vec![false; vertex_count];
        let mut edge_used = vec![false; edge_count];
        let mut face_incidence = vec![0usize; face_count];
        for (i, t) in tetrahedra.iter().enumerate() {
            for &v in &t.vertices {
                if v >= vertex_count {
                    return Err(Error::InvalidComplex {
                        reason: format!("tetrahedron {i}: vertex class {v} out of range"),
                    });
                }
                vertex_used[v] = true;
            }
            for &e in &t.edges {
                if e >= edge_count {
                    return Err(Error::InvalidComplex {
                        reason: format!("tetrahedron {i}: edge class {e} out of range"),
                    });
                }
                edge_used[e] = true;
            }
            for &f in &t.faces {
                if f >= face_count {
                    return Err(Error::InvalidComplex {
                        reason: format!("tetrahedron {i}: face class {f} out of range"),
                    });
                }
                face_incidence[f] += 1;
            }
        }
        if let Some(v) = vertex_used.iter().position(|u| !u) {
            return Err(Error::InvalidComplex { reason: format!("vertex class {v} unused") });
        }
        if let Some(e) = edge_used.iter().position(|u| !u) {
            return Err(Error::InvalidComplex { reason: format!("edge class {e} unused") });
        }
        for (f, &n) in face_incidence.iter().enumerate() {
            if n == 0 || n > 2 {
                return Err(Error::InvalidComplex {
                    reason: format!("face class {f} met {n} times, expected 1 or 2"),
                });
            }
        }
        Ok(PreComplex { vertex_count, edge_count, face_count, tetrahedra })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn tetrahedra(&self) -> &[Tetrahedron] {
        &self.tetrahedra
    }

    /// True when every face class is shared by exactly two tetrahedra.
    pub fn is_closed(&self) -> bool {
        let mut incidence = vec![0usize; self.face_count];
        for t in &self.tetrahedra {
            for &f in &t.faces {
                incidence[f] += 1;
            }
        }
        incidence.iter().all(|&n| n == 2)
    }

    /// V - E + F - T over the classes.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count as i64 + self.face_count as i64
            - self.tetrahedra.len() as i64
    }
}

/// Metric data on a pre-complex: one length per edge class and one
/// orientation sign (+1 or -1) per tetrahedron.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricData {
    pub lengths: Vec<f64>,
    pub signs: Vec<i8>,
}

fn check_metric(complex: &PreComplex, metric: &MetricData) -> Result<()> {
    if metric.lengths.len() != complex.edge_count() {
        return Err(Error::InvalidMetric {
            reason: format!(
                "{} lengths for {} edge classes",
                metric.lengths.len(),
                complex.edge_count()
            ),
        });
    }
    if metric.signs.len() != complex.tetrahedra().len() {
        return Err(Error::InvalidMetric {
            reason: format!(
                "{} signs for {} tetrahedra",
                metric.signs.len(),
                complex.tetrahedra().len()
            ),
        });
    }
    if let Some(i) = metric.signs.iter().position(|s| *s != 1 && *s != -1) {
        return Err(Error::InvalidMetric { reason: format!("sign of tetrahedron {i} not +1/-1") });
    }
    Ok(())
}

fn tetra_lengths(complex: &PreComplex, metric: &MetricData, i: usize) -> Result<TetrahedronLengths> {
    let t = &complex.tetrahedra()[i];
    let mut l = [0.0; 6];
    for s in 0..6 {
        l[s] = metric.lengths[t.edges[s]];
    }
    TetrahedronLengths::new(l).map_err(|e| match e {
        Error::InvalidLengths => Error::InvalidMetric {
            reason: format!("tetrahedron {i} received a non-positive edge length"),
        },
        other => other,
    })
}

/// Defect per edge class, reduced to (-pi, pi].
#[derive(Clone, Debug, Serialize)]
pub struct DefectVector {
    values: Vec<f64>,
}

impl DefectVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Matrix of defect derivatives d omega_e / d l_f.
#[derive(Clone, Debug)]
pub struct DefectJacobian {
    matrix: Matrix,
}

impl DefectJacobian {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn entry(&self, e: usize, f: usize) -> f64 {
        self.matrix.get(e, f)
    }
}

/// Signed angle sums per edge class, before branch reduction.
pub fn raw_defect_angles(complex: &PreComplex, metric: &MetricData) -> Result<Vec<f64>> {
    check_metric(complex, metric)?;
    let mut sums = vec![0.0; complex.edge_count()];
    for (i, t) in complex.tetrahedra().iter().enumerate() {
        let tl = tetra_lengths(complex, metric, i)?;
        let sign = metric.signs[i] as f64;
        for (s, slot) in EdgeSlot::ALL.iter().enumerate() {
            sums[t.edges[s]] -= sign * dihedral_angle(&tl, *slot);
        }
    }
    Ok(sums)
}

/// Representative of `w` modulo 2 pi in (-pi, pi].
pub fn reduce_to_principal(w: f64) -> f64 {
    let r = w.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Branch-reduced defects per edge class.
pub fn defect_angles(complex: &PreComplex, metric: &MetricData) -> Result<DefectVector> {
    let values = raw_defect_angles(complex, metric)?.iter().map(|w| reduce_to_principal(*w)).collect();
    Ok(DefectVector { values })
}

/// Defect Jacobian assembled from the closed-form dihedral-angle gradients.
pub fn defect_jacobian_analytic(complex: &PreComplex, metric: &MetricData) -> Result<DefectJacobian> {
    check_metric(complex, metric)?;
    let mut matrix = Matrix::zeros(complex.edge_count());
    for (i, t) in complex.tetrahedra().iter().enumerate() {
        let tl = tetra_lengths(complex, metric, i)?;
        let jac = dihedral_jacobian(&tl);
        let sign = metric.signs[i] as f64;
        for s in 0..6 {
            for w in 0..6 {
                matrix.add_to(t.edges[s], t.edges[w], -sign * jac[s][w]);
            }
        }
    }
    Ok(DefectJacobian { matrix })
}

/// Defect Jacobian by central differences of the raw angle sums.
pub fn defect_jacobian_fd(complex: &PreComplex, metric: &MetricData, h: f64) -> Result<DefectJacobian> {
    check_metric(complex, metric)?;
    let n = complex.edge_count();
    let mut matrix = Matrix::zeros(n);
    for f in 0..n {
        let mut plus = metric.clone();
        plus.lengths[f] += h;
        let mut minus = metric.clone();
        minus.lengths[f] -= h;
        let wp = raw_defect_angles(complex, &plus)?;
        let wm = raw_defect_angles(complex, &minus)?;
        for e in 0..n {
            matrix.set(e, f, (wp[e] - wm[e]) / (2.0 * h));
        }
    }
    Ok(DefectJacobian { matrix })
}

/// A pre-complex made of concretely placed tetrahedra: vertex classes are
/// points, edge and face classes are assigned to vertex pairs and triples
/// in order of first appearance, lengths are distances, and each sign is
/// the sign of the oriented volume in the listed vertex order.
#[derive(Clone, Debug)]
pub struct EmbeddedComplex {
    pub complex: PreComplex,
    pub metric: MetricData,
    pub points: Vec<Point3>,
    edge_ids: HashMap<(usize, usize), usize>,
}

impl EmbeddedComplex {
    pub fn from_embedded_tetrahedra(points: &[Point3], tets: &[[usize; 4]]) -> Result<Self> {
        let mut scale = 0.0f64;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                scale = scale.max(points[i].distance(points[j]));
            }
        }
        let floor = VOLUME_REL_FLOOR * scale.powi(3);
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut face_ids: HashMap<[usize; 3], usize> = HashMap::new();
        let mut lengths: Vec<f64> = Vec::new();
        let mut signs: Vec<i8> = Vec::new();
        let mut tetrahedra: Vec<Tetrahedron> = Vec::new();
        for (i, vs) in tets.iter().enumerate() {
            if vs.iter().any(|&v| v >= points.len()) {
                return Err(Error::InvalidComplex {
                    reason: format!("tetrahedron {i}: vertex index out of range"),
                });
            }
            let p = [points[vs[0]], points[vs[1]], points[vs[2]], points[vs[3]]];
            let vol = oriented_volume(p[0], p[1], p[2], p[3]);
            if vol.abs() <= floor {
                return Err(Error::DegenerateRealization { min_volume: vol, floor });
            }
            signs.push(if vol > 0.0 { 1 } else { -1 });
            let mut edges = [0usize; 6];
            for (s, slot) in EdgeSlot::ALL.iter().enumerate() {
                let (a, b) = slot.vertices();
                let (u, v) = (vs[a as usize], vs[b as usize]);
                let key = (u.min(v), u.max(v));
                let next = edge_ids.len();
                let id = *edge_ids.entry(key).or_insert(next);
                if id == lengths.len() {
                    lengths.push(points[u].distance(points[v]));
                }
                edges[s] = id;
            }
            let mut faces = [0usize; 4];
            for k in 0..4 {
                let mut tri: Vec<usize> = (0..4).filter(|&m| m != k).map(|m| vs[m]).collect();
                tri.sort_unstable();
                let key = [tri[0], tri[1], tri[2]];
                let next = face_ids.len();
                faces[k] = *face_ids.entry(key).or_insert(next);
            }
            tetrahedra.push(Tetrahedron { vertices: *vs, edges, faces });
        }
        let complex = PreComplex::new(points.len(), edge_ids.len(), face_ids.len(), tetrahedra)?;
        Ok(EmbeddedComplex {
            complex,
            metric: MetricData { lengths, signs },
            points: points.to_vec(),
            edge_ids,
        })
    }

    /// Edge class of the pair of vertex indices; panics when no tetrahedron
    /// uses that pair.
    pub fn edge_id(&self, u: usize, v: usize) -> usize {
        *self
            .edge_ids
            .get(&(u.min(v), u.max(v)))
            .unwrap_or_else(|| panic!("no edge joins vertices {u} and {v}"))
    }
}
