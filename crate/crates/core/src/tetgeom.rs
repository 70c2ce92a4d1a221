//! Euclidean tetrahedron geometry from edge lengths.
//!
//! A tetrahedron lives on local vertices {0, 1, 2, 3}; its six edges are the
//! unordered vertex pairs in the order (0,1), (0,2), (0,3), (1,2), (1,3),
//! (2,3). Writing x_e for the squared length of edge e, the volume comes
//! from the Cayley-Menger determinant, 288 V^2 = det CM, and the dihedral
//! angle at edge ij (with opposite edge km) from
//!
//! ```text
//! theta_ij = atan2(6 l_ij V, P_ij),
//! P_ij = x_ij (AC.AD) - (AB.AC)(AB.AD),   (A,B,C,D) = (i,j,k,m),
//! ```
//!
//! which lands obtuse angles on the correct branch with no case analysis.
//! Angle gradients are closed-form derivatives of that expression; the
//! volume derivative uses d(det CM)/d x_e = 2 cof_e, where cof_e is the
//! cofactor of CM at the entry holding x_e.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};

/// Relative floor for det CM (scaled by max length^6) and for the face
/// Heron quantities (scaled by max length^4) below which six lengths count
/// as degenerate.
pub const CM_DET_REL_FLOOR: f64 = 1e-12;

/// Relative floor for oriented volumes in glued-pair computations, scaled
/// by the cube of the largest pairwise distance.
pub const VOLUME_REL_FLOOR: f64 = 1e-12;

/// Unordered pair of local vertices naming an edge of a tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeSlot {
    lo: u8,
    hi: u8,
}

impl EdgeSlot {
    /// All six slots in canonical order.
    pub const ALL: [EdgeSlot; 6] = [
        EdgeSlot { lo: 0, hi: 1 },
        EdgeSlot { lo: 0, hi: 2 },
        EdgeSlot { lo: 0, hi: 3 },
        EdgeSlot { lo: 1, hi: 2 },
        EdgeSlot { lo: 1, hi: 3 },
        EdgeSlot { lo: 2, hi: 3 },
    ];

    /// Slot joining two distinct local vertices. Panics when the vertices
    /// coincide or exceed 3.
    pub fn new(a: u8, b: u8) -> Self {
        assert!(a < 4 && b < 4 && a != b, "local vertices must be distinct and < 4");
        if a < b {
            EdgeSlot { lo: a, hi: b }
        } else {
            EdgeSlot { lo: b, hi: a }
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    /// Position in the canonical slot order.
    pub fn index(self) -> usize {
        match (self.lo, self.hi) {
            (0, 1) => 0,
            (0, 2) => 1,
            (0, 3) => 2,
            (1, 2) => 3,
            (1, 3) => 4,
            (2, 3) => 5,
            _ => unreachable!(),
        }
    }

    pub fn vertices(self) -> (u8, u8) {
        (self.lo, self.hi)
    }

    /// The edge joining the two vertices this one does not touch.
    pub fn opposite(self) -> Self {
        Self::ALL[5 - self.index()]
    }

    pub fn is_opposite(self, other: Self) -> bool {
        self.opposite() == other
    }

    pub fn shares_vertex(self, other: Self) -> bool {
        self.lo == other.lo || self.lo == other.hi || self.hi == other.lo || self.hi == other.hi
    }
}

/// Point in Euclidean 3-space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(self, other: Point3) -> f64 {
        let d = sub(other, self);
        dot(d, d).sqrt()
    }
}

fn sub(a: Point3, b: Point3) -> [f64; 3] {
    [a.x - b.x, a.y - b.y, a.z - b.z]
}

fn dot(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// Six positive edge lengths realizable as a nondegenerate tetrahedron,
/// indexed by [`EdgeSlot`].
///
/// Construction checks positivity, the strict triangle inequality on all
/// four faces and a scale-aware positive floor on the Cayley-Menger
/// determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TetrahedronLengths {
    l: [f64; 6],
}

impl TetrahedronLengths {
    pub fn new(lengths: [f64; 6]) -> Result<Self> {
        if lengths.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return Err(Error::InvalidLengths);
        }
        let t = TetrahedronLengths { l: lengths };
        let max = t.max_length();
        for v in 0..4u8 {
            let q = t.face_heron_q(v);
            let floor = CM_DET_REL_FLOOR * max.powi(4);
            if q <= floor {
                return Err(Error::DegenerateTetrahedron { det: q, floor });
            }
        }
        let det = t.cayley_menger_det();
        let floor = CM_DET_REL_FLOOR * max.powi(6);
        if det <= floor {
            return Err(Error::DegenerateTetrahedron { det, floor });
        }
        Ok(t)
    }

    /// Lengths induced by four embedded points.
    pub fn from_points(a: Point3, b: Point3, c: Point3, d: Point3) -> Result<Self> {
        let p = [a, b, c, d];
        let mut l = [0.0; 6];
        for (i, slot) in EdgeSlot::ALL.iter().enumerate() {
            let (u, v) = slot.vertices();
            l[i] = p[u as usize].distance(p[v as usize]);
        }
        Self::new(l)
    }

    pub fn length(&self, e: EdgeSlot) -> f64 {
        self.l[e.index()]
    }

    pub fn lengths(&self) -> [f64; 6] {
        self.l
    }

    pub fn max_length(&self) -> f64 {
        self.l.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    fn squares(&self) -> [f64; 6] {
        let mut x = [0.0; 6];
        for i in 0..6 {
            x[i] = self.l[i] * self.l[i];
        }
        x
    }

    /// Determinant of the bordered 5x5 Cayley-Menger matrix; equals 288 V^2.
    pub fn cayley_menger_det(&self) -> f64 {
        cm_matrix(&self.squares()).det()
    }

    /// 16 * area^2 of the face opposite local vertex `v`.
    fn face_heron_q(&self, v: u8) -> f64 {
        let x = self.squares();
        let mut face: Vec<f64> = Vec::with_capacity(3);
        for slot in EdgeSlot::ALL {
            let (a, b) = slot.vertices();
            if a != v && b != v {
                face.push(x[slot.index()]);
            }
        }
        let (xa, xb, xc) = (face[0], face[1], face[2]);
        2.0 * (xa * xb + xa * xc + xb * xc) - xa * xa - xb * xb - xc * xc
    }
}

fn cm_matrix(x: &[f64; 6]) -> Matrix {
    let mut m = Matrix::zeros(5);
    for j in 1..5 {
        m.set(0, j, 1.0);
        m.set(j, 0, 1.0);
    }
    for u in 0..4u8 {
        for v in 0..4u8 {
            if u != v {
                m.set(1 + u as usize, 1 + v as usize, x[EdgeSlot::new(u, v).index()]);
            }
        }
    }
    m
}

fn cm_cofactor(m: &Matrix, r: usize, c: usize) -> f64 {
    let rows: Vec<usize> = (0..5).filter(|&i| i != r).collect();
    let cols: Vec<usize> = (0..5).filter(|&j| j != c).collect();
    let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
    sign * m.submatrix(&rows, &cols).det()
}

/// Positive volume of the tetrahedron with these edge lengths.
pub fn unsigned_volume(t: &TetrahedronLengths) -> f64 {
    (t.cayley_menger_det() / 288.0).sqrt()
}

/// Signed volume of the tetrahedron spanned by four points: positive when
/// (b-a, c-a, d-a) is a right-handed frame.
///
/// The points are sorted lexicographically (tracking permutation parity)
/// before the determinant is evaluated, so swapping any two arguments
/// negates the result exactly, to the last bit. Degeneracy simply returns a
/// value near zero.
pub fn oriented_volume(a: Point3, b: Point3, c: Point3, d: Point3) -> f64 {
    let mut pts = [a, b, c, d];
    let mut sign = 1.0f64;
    // 5-comparator sorting network on 4 elements
    for (i, j) in [(0usize, 1usize), (2, 3), (0, 2), (1, 3), (1, 2)] {
        if lex_gt(pts[i], pts[j]) {
            pts.swap(i, j);
            sign = -sign;
        }
    }
    let u = sub(pts[1], pts[0]);
    let v = sub(pts[2], pts[0]);
    let w = sub(pts[3], pts[0]);
    sign * dot(u, cross(v, w)) / 6.0
}

fn lex_gt(p: Point3, q: Point3) -> bool {
    (p.x, p.y, p.z) > (q.x, q.y, q.z)
}

/// P_ij and the vertex-i dot products entering it: (P, AC.AD, AB.AC, AB.AD).
fn p_terms(x: &[f64; 6], at: EdgeSlot) -> (f64, f64, f64, f64) {
    let (i, j) = at.vertices();
    let (k, m) = at.opposite().vertices();
    let xs = |u: u8, v: u8| x[EdgeSlot::new(u, v).index()];
    let d1 = (xs(i, k) + xs(i, m) - xs(k, m)) / 2.0;
    let d2 = (xs(i, j) + xs(i, k) - xs(j, k)) / 2.0;
    let d3 = (xs(i, j) + xs(i, m) - xs(j, m)) / 2.0;
    (xs(i, j) * d1 - d2 * d3, d1, d2, d3)
}

/// Interior dihedral angle at `at`, in (0, pi).
pub fn dihedral_angle(t: &TetrahedronLengths, at: EdgeSlot) -> f64 {
    let x = t.squares();
    let v = unsigned_volume(t);
    let (p, _, _, _) = p_terms(&x, at);
    (6.0 * t.length(at) * v).atan2(p)
}

/// All 36 partial derivatives d theta_at / d l_wrt, indexed [at][wrt] in
/// slot order.
pub fn dihedral_jacobian(t: &TetrahedronLengths) -> [[f64; 6]; 6] {
    let x = t.squares();
    let l = t.lengths();
    let v = unsigned_volume(t);
    let cm = cm_matrix(&x);
    // dV/dx_e = cof_e / (288 V), from det CM = 288 V^2 and
    // d(det CM)/dx_e = 2 cof_e (x_e sits at two symmetric entries).
    let mut dv = [0.0; 6];
    for (e, slot) in EdgeSlot::ALL.iter().enumerate() {
        let (u, w) = slot.vertices();
        dv[e] = cm_cofactor(&cm, 1 + u as usize, 1 + w as usize) / (288.0 * v);
    }
    let mut jac = [[0.0; 6]; 6];
    for (a, &at) in EdgeSlot::ALL.iter().enumerate() {
        let (pp, d1, d2, d3) = p_terms(&x, at);
        let (i, j) = at.vertices();
        let (k, m) = at.opposite().vertices();
        let st = 6.0 * l[a] * v;
        let denom = pp * pp + st * st;
        let idx = |u: u8, w: u8| EdgeSlot::new(u, w).index();
        let mut dp = [0.0; 6];
        dp[a] = d1 - (d2 + d3) / 2.0;
        dp[idx(i, k)] = (x[a] - d3) / 2.0;
        dp[idx(i, m)] = (x[a] - d2) / 2.0;
        dp[idx(k, m)] = -x[a] / 2.0;
        dp[idx(j, k)] = d3 / 2.0;
        dp[idx(j, m)] = d2 / 2.0;
        for e in 0..6 {
            let mut ds = 6.0 * l[a] * dv[e];
            if e == a {
                ds += 3.0 * v / l[a];
            }
            let dtheta_dx = (pp * ds - st * dp[e]) / denom;
            jac[a][e] = 2.0 * l[e] * dtheta_dx;
        }
    }
    jac
}

/// Single entry of [`dihedral_jacobian`].
pub fn dihedral_gradient(t: &TetrahedronLengths, at: EdgeSlot, wrt: EdgeSlot) -> f64 {
    dihedral_jacobian(t)[at.index()][wrt.index()]
}

/// For tetrahedra ABCD and EABC glued along face ABC: the derivative of the
/// apex separation |DE| with respect to the shared-face edge |AB| when the
/// remaining eight edge lengths are held fixed.
///
/// Errors when either glued tetrahedron is flat or D, E coincide (the
/// configuration then does not determine |DE|); a vanishing numerator
/// volume legitimately makes the response zero.
pub fn skew_length_response(a: Point3, b: Point3, c: Point3, d: Point3, e: Point3) -> Result<f64> {
    let pts = [a, b, c, d, e];
    let mut scale = 0.0f64;
    for i in 0..5 {
        for j in i + 1..5 {
            scale = scale.max(pts[i].distance(pts[j]));
        }
    }
    let vol_floor = VOLUME_REL_FLOOR * scale.powi(3);
    let v_abcd = oriented_volume(a, b, c, d);
    if v_abcd.abs() <= vol_floor {
        return Err(Error::FlatConfiguration { quantity: "V(ABCD)", value: v_abcd });
    }
    let v_eabc = oriented_volume(e, a, b, c);
    if v_eabc.abs() <= vol_floor {
        return Err(Error::FlatConfiguration { quantity: "V(EABC)", value: v_eabc });
    }
    let l_de = d.distance(e);
    if l_de <= VOLUME_REL_FLOOR * scale {
        return Err(Error::FlatConfiguration { quantity: "|DE|", value: l_de });
    }
    let l_ab = a.distance(b);
    let v_ceda = oriented_volume(c, e, d, a);
    let v_bced = oriented_volume(b, c, e, d);
    Ok(-(l_ab / l_de) * v_ceda * v_bced / (v_abcd * v_eabc))
}
