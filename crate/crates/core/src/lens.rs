//! Bipyramid pre-triangulation of the lens space L(p,q) and its flat
//! realizations.
//!
//! Start from the p-gonal bipyramid on base vertices B_0, ..., B_{p-1} with
//! cone vertices C_0 (above) and C_1 (below), and glue the boundary face
//! B_j C_0 B_{j+1} to B_{j+q} C_1 B_{j+q+1}, matching vertices in the order
//! written (indices mod p). The axis edge C_0 C_1 cuts the solid into the p
//! tetrahedra T_i = (C_0, C_1, B_{i+1}, B_i). After gluing there are two
//! vertex classes (all B's, all C's), p + 2 edge classes — the rim
//! a = B_i B_{i+1}, the spokes b_j with C_0 B_j ~ C_1 B_{j+q}, and the axis
//! c = C_0 C_1 — and 2p face classes. The Euler characteristic is 0 and the
//! complex is closed.
//!
//! A realization with winding number k places, in cylindrical coordinates,
//!
//! ```text
//! B_j at (rho, 2 pi j k / p, 0),    C_m at (sigma, alpha + 2 pi q m k / p, s),
//! ```
//!
//! and equips the complex with the induced lengths:
//!
//! ```text
//! l_a = 2 rho sin(pi k / p),            l_c = 2 sigma |sin(pi q k / p)|,
//! l_{b_j}^2 = rho^2 + sigma^2 + s^2 - 2 rho sigma cos(alpha - 2 pi j k / p).
//! ```
//!
//! The signed volumes are V_i = (R / 6) sin(alpha + pi k (q - 1 - 2i) / p)
//! with R = 4 rho sigma s sin(pi k / p) sin(pi q k / p); each tetrahedron's
//! metric sign is the sign of its V_i. Every defect of such a metric
//! vanishes.

use crate::defect::{MetricData, PreComplex, Tetrahedron};
use crate::error::{Error, Result};
use crate::tetgeom::Point3;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Hard floor on min |V_i| relative to |R|/6; below it a realization is an
/// error rather than usable metric data.
const REALIZE_REL_FLOOR: f64 = 1e-9;

/// Rejection threshold of the sampler, deliberately looser than the hard
/// floor so accepted samples sit safely inside the valid region.
const SAMPLE_REL_FLOOR: f64 = 1e-6;

const SAMPLE_MAX_ATTEMPTS: usize = 64;

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Validated lens-space parameters: p >= 3, 1 <= q < p, gcd(p, q) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LensParams {
    p: u32,
    q: u32,
}

impl LensParams {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p < 3 {
            return Err(Error::InvalidLensParams { reason: format!("p = {p}, need p >= 3") });
        }
        if q == 0 || q >= p {
            return Err(Error::InvalidLensParams {
                reason: format!("q = {q} outside 1..{p}"),
            });
        }
        if gcd(p, q) != 1 {
            return Err(Error::InvalidLensParams {
                reason: format!("gcd({p}, {q}) = {} != 1", gcd(p, q)),
            });
        }
        Ok(LensParams { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Winding numbers the invariant is indexed by: 1 <= k <= p/2 coprime
    /// to p. (I_k = I_{p-k}, so larger k repeat these values.)
    pub fn valid_k(&self) -> Vec<u32> {
        (1..=self.p / 2).filter(|&k| gcd(self.p, k) == 1).collect()
    }

    /// Edge class of the base rim a.
    pub fn edge_a(&self) -> usize {
        0
    }

    /// Edge class of the spoke b_j (index taken mod p).
    pub fn edge_b(&self, j: i64) -> usize {
        1 + j.rem_euclid(self.p as i64) as usize
    }

    /// Edge class of the axis c.
    pub fn edge_c(&self) -> usize {
        self.p as usize + 1
    }

    /// Spokes b_1 .. b_{p-2}: the defect-derivative block over these edges
    /// is the determinant entering the invariant.
    pub fn bulk_edges(&self) -> Vec<usize> {
        (1..=self.p as i64 - 2).map(|j| self.edge_b(j)).collect()
    }

    /// The other four edge classes (rim, b_0, b_{p-1}, axis), whose lengths
    /// act as coordinates dual to the four realization parameters.
    pub fn free_edges(&self) -> [usize; 4] {
        [self.edge_a(), self.edge_b(0), self.edge_b(self.p as i64 - 1), self.edge_c()]
    }

    /// The glued complex. Face class i < p is the internal fan face
    /// C_0 C_1 B_i; class p + j is the glued boundary pair at the base face
    /// B_j C_0 B_{j+1}.
    pub fn complex(&self) -> PreComplex {
        let p = self.p as i64;
        let q = self.q as i64;
        let f = |j: i64| j.rem_euclid(p) as usize;
        let g = |j: i64| (p + j.rem_euclid(p)) as usize;
        let mut tets = Vec::with_capacity(p as usize);
        for i in 0..p {
            tets.push(Tetrahedron {
                // local order (C_0, C_1, B_{i+1}, B_i)
                vertices: [1, 1, 0, 0],
                edges: [
                    self.edge_c(),
                    self.edge_b(i + 1),
                    self.edge_b(i),
                    self.edge_b(i + 1 - q),
                    self.edge_b(i - q),
                    self.edge_a(),
                ],
                faces: [g(i - q), g(i), f(i), f(i + 1)],
            });
        }
        PreComplex::new(2, self.p as usize + 2, 2 * self.p as usize, tets)
            .expect("bipyramid gluing data is always a valid pre-complex")
    }
}

/// The four shape parameters of a realization: base radius rho, cone radius
/// sigma, cone height s, cone twist alpha.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealizationParams {
    pub rho: f64,
    pub sigma: f64,
    pub s: f64,
    pub alpha: f64,
}

impl RealizationParams {
    fn validate(&self) -> Result<()> {
        let positive =
            [("rho", self.rho), ("sigma", self.sigma), ("s", self.s)];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidRealizationParams {
                    reason: format!("{name} = {v}, need a positive finite value"),
                });
            }
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidRealizationParams {
                reason: format!("alpha = {}", self.alpha),
            });
        }
        Ok(())
    }
}

/// Flat metric data on the L(p,q) complex produced by a parameter choice.
#[derive(Clone, Debug, Serialize)]
pub struct Realization {
    pub lens: LensParams,
    pub k: u32,
    pub params: RealizationParams,
    pub metric: MetricData,
    /// Signed volume V_i of tetrahedron T_i.
    pub volumes: Vec<f64>,
    /// |R|/6, the amplitude of the V_i.
    pub volume_scale: f64,
}

impl Realization {
    /// Position of base vertex B_j in the defining placement.
    pub fn base_vertex(&self, j: i64) -> Point3 {
        let ang = TAU * j as f64 * self.k as f64 / self.lens.p() as f64;
        Point3::new(self.params.rho * ang.cos(), self.params.rho * ang.sin(), 0.0)
    }

    /// Position of cone vertex C_m (m = 0 or 1).
    pub fn cone_vertex(&self, m: i64) -> Point3 {
        let ang = self.params.alpha
            + TAU * self.lens.q() as f64 * m as f64 * self.k as f64 / self.lens.p() as f64;
        Point3::new(
            self.params.sigma * ang.cos(),
            self.params.sigma * ang.sin(),
            self.params.s,
        )
    }
}

impl LensParams {
    /// Checks that k is a usable winding number: 0 < k < p, coprime to p.
    pub fn validate_k(&self, k: u32) -> Result<()> {
        if k == 0 || k >= self.p || gcd(self.p, k) != 1 {
            return Err(Error::InvalidLensParams {
                reason: format!(
                    "winding number k = {k} not coprime to p = {} in 1..{}",
                    self.p, self.p
                ),
            });
        }
        Ok(())
    }
}

/// Metric data induced by the cylindrical placement with winding number k.
pub fn realize(lens: LensParams, k: u32, params: RealizationParams) -> Result<Realization> {
    lens.validate_k(k)?;
    params.validate()?;
    let p = lens.p() as f64;
    let q = lens.q() as f64;
    let kf = k as f64;
    let RealizationParams { rho, sigma, s, alpha } = params;

    let mut lengths = vec![0.0; lens.p() as usize + 2];
    lengths[lens.edge_a()] = 2.0 * rho * (PI * kf / p).sin();
    lengths[lens.edge_c()] = 2.0 * sigma * (PI * q * kf / p).sin().abs();
    for j in 0..lens.p() as i64 {
        let phi = alpha - TAU * j as f64 * kf / p;
        lengths[lens.edge_b(j)] =
            (rho * rho + sigma * sigma + s * s - 2.0 * rho * sigma * phi.cos()).sqrt();
    }

    let r = 4.0 * rho * sigma * s * (PI * kf / p).sin() * (PI * q * kf / p).sin();
    let volume_scale = r.abs() / 6.0;
    let floor = REALIZE_REL_FLOOR * volume_scale;
    let mut volumes = Vec::with_capacity(lens.p() as usize);
    let mut signs = Vec::with_capacity(lens.p() as usize);
    let mut min_abs = f64::INFINITY;
    for i in 0..lens.p() as i64 {
        let v = r / 6.0 * (alpha + PI * kf * (q - 1.0 - 2.0 * i as f64) / p).sin();
        min_abs = min_abs.min(v.abs());
        signs.push(if v > 0.0 { 1 } else { -1 });
        volumes.push(v);
    }
    if min_abs <= floor {
        return Err(Error::DegenerateRealization { min_volume: min_abs, floor });
    }
    Ok(Realization {
        lens,
        k,
        params,
        metric: MetricData { lengths, signs },
        volumes,
        volume_scale,
    })
}

/// Random realization: rho, sigma, s uniform in [0.5, 2] and alpha uniform
/// in (0.05, 0.95) * pi/p, redrawn (up to 64 times) while any |V_i| falls
/// within 1e-6 of degeneracy relative to |R|/6.
pub fn sample_realization(lens: LensParams, k: u32, rng: &mut impl Rng) -> Result<Realization> {
    lens.validate_k(k)?;
    let mut last_min = 0.0;
    let mut last_floor = 0.0;
    for _ in 0..SAMPLE_MAX_ATTEMPTS {
        let params = RealizationParams {
            rho: rng.gen_range(0.5..2.0),
            sigma: rng.gen_range(0.5..2.0),
            s: rng.gen_range(0.5..2.0),
            alpha: PI / lens.p() as f64 * rng.gen_range(0.05..0.95),
        };
        let real = match realize(lens, k, params) {
            Ok(r) => r,
            Err(Error::DegenerateRealization { min_volume, floor }) => {
                last_min = min_volume;
                last_floor = floor;
                continue;
            }
            Err(e) => return Err(e),
        };
        let min_abs = real.volumes.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let reject_floor = SAMPLE_REL_FLOOR * real.volume_scale;
        if min_abs <= reject_floor {
            last_min = min_abs;
            last_floor = reject_floor;
            continue;
        }
        return Ok(real);
    }
    Err(Error::DegenerateRealization { min_volume: last_min, floor: last_floor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::defect::defect_angles;
    use crate::tetgeom::oriented_volume;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn fixed_params(lens: LensParams) -> RealizationParams {
        RealizationParams { rho: 1.1, sigma: 0.8, s: 1.3, alpha: 0.37 * PI / lens.p() as f64 }
    }

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let scale = expected.abs().max(1e-15);
        assert!(
            (actual - expected).abs() / scale <= tol,
            "actual {actual:.15e}, expected {expected:.15e}"
        );
    }

    #[test]
    fn complex_is_closed_with_zero_euler() {
        for (p, q) in [(3, 1), (3, 2), (5, 2), (7, 1), (7, 2), (12, 5)] {
            let lens = LensParams::new(p, q).unwrap();
            let c = lens.complex();
            assert_eq!(c.vertex_count(), 2);
            assert_eq!(c.edge_count(), p as usize + 2);
            assert_eq!(c.face_count(), 2 * p as usize);
            assert_eq!(c.tetrahedra().len(), p as usize);
            assert!(c.is_closed());
            assert_eq!(c.euler_characteristic(), 0);
        }
    }

    #[test]
    fn edge_partition_covers_all_classes() {
        for (p, q) in [(3, 1), (7, 2), (11, 3)] {
            let lens = LensParams::new(p, q).unwrap();
            let mut all: Vec<usize> = lens.free_edges().to_vec();
            all.extend(lens.bulk_edges());
            all.sort_unstable();
            let expected: Vec<usize> = (0..p as usize + 2).collect();
            assert_eq!(all, expected);
            assert_eq!(lens.bulk_edges().len(), p as usize - 2);
        }
    }

    #[test]
    fn lengths_match_wrapped_coordinates() {
        for (p, q, k) in [(7, 1, 1), (7, 2, 3), (5, 2, 2), (7, 4, 2)] {
            let lens = LensParams::new(p, q).unwrap();
            let real = realize(lens, k, fixed_params(lens)).unwrap();
            let c0 = real.cone_vertex(0);
            let c1 = real.cone_vertex(1);
            for j in 0..p as i64 {
                let bj = real.base_vertex(j);
                let bj1 = real.base_vertex(j + 1);
                assert_rel(real.metric.lengths[lens.edge_a()], bj.distance(bj1), 1e-13);
                // the two sides of the spoke identification C_0 B_j ~ C_1 B_{j+q}
                let spoke = real.metric.lengths[lens.edge_b(j)];
                assert_rel(spoke, c0.distance(bj), 1e-14);
                let glued = real.base_vertex(j + q as i64);
                assert_rel(spoke, c1.distance(glued), 1e-13);
            }
            assert_rel(real.metric.lengths[lens.edge_c()], c0.distance(c1), 1e-13);
        }
    }

    #[test]
    fn volumes_match_coordinates_and_stack() {
        for (p, q, k) in [(7, 1, 1), (7, 2, 3), (5, 2, 2), (7, 4, 2), (9, 4, 2)] {
            let lens = LensParams::new(p, q).unwrap();
            let real = realize(lens, k, fixed_params(lens)).unwrap();
            let c0 = real.cone_vertex(0);
            let c1 = real.cone_vertex(1);
            let scale = real.volume_scale;
            for i in 0..p as i64 {
                let vi =
                    oriented_volume(c0, c1, real.base_vertex(i + 1), real.base_vertex(i));
                let formula = real.volumes[i as usize];
                assert!((formula - vi).abs() <= 1e-12 * scale, "V_{i}: {formula} vs {vi}");
                // stacking two adjacent tetrahedra over the same axis
                let v2 =
                    oriented_volume(c0, c1, real.base_vertex(i + 2), real.base_vertex(i));
                let sum = real.volumes[i as usize]
                    + real.volumes[((i + 1) % p as i64) as usize];
                assert!((v2 - sum).abs() <= 1e-12 * scale, "stack at {i}: {v2} vs {sum}");
            }
        }
    }

    #[test]
    fn sampled_realizations_are_flat() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut worst = 0.0f64;
        for (p, q) in [(7, 1), (7, 2), (9, 4)] {
            let lens = LensParams::new(p, q).unwrap();
            let complex = lens.complex();
            for k in lens.valid_k() {
                for _ in 0..5 {
                    let real = sample_realization(lens, k, &mut rng).unwrap();
                    let defects = defect_angles(&complex, &real.metric).unwrap();
                    worst = worst.max(defects.max_abs());
                }
            }
        }
        eprintln!("max |defect| over sampled realizations = {worst:.2e}");
        assert!(worst <= 1e-12);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(LensParams::new(2, 1), Err(Error::InvalidLensParams { .. })));
        assert!(matches!(LensParams::new(4, 2), Err(Error::InvalidLensParams { .. })));
        assert!(matches!(LensParams::new(7, 0), Err(Error::InvalidLensParams { .. })));
        assert!(matches!(LensParams::new(7, 7), Err(Error::InvalidLensParams { .. })));
        let lens = LensParams::new(7, 2).unwrap();
        let pr = fixed_params(lens);
        assert!(matches!(realize(lens, 0, pr), Err(Error::InvalidLensParams { .. })));
        assert!(matches!(realize(lens, 7, pr), Err(Error::InvalidLensParams { .. })));
        let nine = LensParams::new(9, 4).unwrap();
        assert!(matches!(
            realize(nine, 3, fixed_params(nine)),
            Err(Error::InvalidLensParams { .. })
        ));
        let bad = RealizationParams { rho: -1.0, ..pr };
        assert!(matches!(realize(lens, 1, bad), Err(Error::InvalidRealizationParams { .. })));
    }

    #[test]
    fn sampling_is_deterministic() {
        let lens = LensParams::new(7, 2).unwrap();
        let a = sample_realization(lens, 3, &mut StdRng::seed_from_u64(99)).unwrap();
        let b = sample_realization(lens, 3, &mut StdRng::seed_from_u64(99)).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.metric.lengths, b.metric.lengths);
    }
}
