//! Pinned derivative fixtures: small embedded complexes whose defect-Jacobian
//! entries reduce to closed-form ratios of edge lengths and oriented volumes.
//!
//! Each fixture pins one entry of the Jacobian of an [`EmbeddedComplex`] to
//! the value forced by its five-or-six-point geometry, giving an oracle that
//! is independent of the per-slot gradient code. `derivative_checks` bundles
//! these with finite-difference sweeps over sampled lens realizations.

use crate::defect::{defect_jacobian_analytic, defect_jacobian_fd, EmbeddedComplex};
use crate::error::Result;
use crate::lens::{realize, LensParams, RealizationParams};
use crate::tetgeom::{oriented_volume, Point3};
use serde::Serialize;
use std::f64::consts::PI;

/// Step for the central finite differences used in the Jacobian sweeps.
pub const FD_STEP: f64 = 1e-6;

/// Central differences on the defect angles carry a truncation error of
/// h^2/6 times third derivatives, which blow up like the inverse cube of
/// tetrahedron thinness; bipyramid tetrahedra are never better than
/// moderately thin (some spoke always spans nearly the full diameter), so
/// the lens sweeps run on one fixed, plump, deliberately large realization
/// per lens: truncation shrinks with the cube of the overall scale while
/// the Jacobian entries only shrink linearly.
fn fd_reference_realization(lens: LensParams) -> Result<crate::lens::Realization> {
    let params = RealizationParams { rho: 4.0, sigma: 4.0, s: 5.6, alpha: PI / 7.0 * 0.35 };
    realize(lens, 1, params)
}

/// One pinned entry of the defect Jacobian of an embedded complex:
/// d(omega at `at_edge`) / d(length of `wrt_edge`) must equal `expected`.
pub struct DerivativeFixture {
    pub name: &'static str,
    pub embedded: EmbeddedComplex,
    pub at_edge: usize,
    pub wrt_edge: usize,
    pub expected: f64,
}

/// A single tetrahedron; the defect at an edge responds to the length of the
/// opposite (skew) edge with -(product of the two lengths) / (6 volume).
pub fn opposite_edge_fixture() -> DerivativeFixture {
    let a = Point3::new(0.1, 0.0, 0.05);
    let b = Point3::new(1.2, -0.1, 0.0);
    let e = Point3::new(0.4, 1.1, 0.15);
    let d = Point3::new(0.55, 0.35, 1.3);
    let expected = -a.distance(b) * d.distance(e) / (6.0 * oriented_volume(a, b, e, d));
    let embedded =
        EmbeddedComplex::from_embedded_tetrahedra(&[a, b, e, d], &[[0, 1, 2, 3]]).unwrap();
    DerivativeFixture {
        name: "opposite edges of one tetrahedron",
        at_edge: embedded.edge_id(2, 3),
        wrt_edge: embedded.edge_id(0, 1),
        expected,
        embedded,
    }
}

/// Two tetrahedra ABCD and EABC glued along the face ABC, with D and E on
/// opposite sides; the response between the face edges AC and AB is
/// (l_AB l_AC / 6) V_BCED / (V_ABCD V_EABC).  Both tetrahedra contribute a
/// slot term; their sum telescopes into the angle of the virtual tetrahedron
/// CEDA chased through the length of the virtual diagonal DE.
pub fn shared_face_fixture() -> DerivativeFixture {
    let a = Point3::new(0.0, 0.0, 0.0);
    let b = Point3::new(1.25, -0.05, 0.0);
    let c = Point3::new(0.45, 1.15, 0.0);
    let d = Point3::new(0.5, 0.4, 1.2);
    let e = Point3::new(0.4, 0.35, -1.05);
    let expected = a.distance(b) * a.distance(c) / 6.0 * oriented_volume(b, c, e, d)
        / (oriented_volume(a, b, c, d) * oriented_volume(e, a, b, c));
    let embedded =
        EmbeddedComplex::from_embedded_tetrahedra(&[a, b, c, d, e], &[[0, 1, 2, 3], [4, 0, 1, 2]])
            .unwrap();
    DerivativeFixture {
        name: "edges sharing a glued face",
        at_edge: embedded.edge_id(0, 2),
        wrt_edge: embedded.edge_id(0, 1),
        expected,
        embedded,
    }
}

/// Three tetrahedra ABED, BCED, CAED tiling a full turn around the interior
/// edge DE; the diagonal response of DE is
/// -(l_DE^2 / 6) V_ABCD V_EABC / (V_ABED V_BCED V_CAED).
pub fn full_star_fixture() -> DerivativeFixture {
    let a = Point3::new(1.05, 0.1, 0.02);
    let b = Point3::new(-0.5, 0.95, -0.06);
    let c = Point3::new(-0.55, -0.9, 0.04);
    let d = Point3::new(0.06, -0.03, 1.15);
    let e = Point3::new(-0.02, 0.05, -1.0);
    let l_de = d.distance(e);
    let expected = -l_de * l_de / 6.0 * oriented_volume(a, b, c, d) * oriented_volume(e, a, b, c)
        / (oriented_volume(a, b, e, d) * oriented_volume(b, c, e, d) * oriented_volume(c, a, e, d));
    let embedded = EmbeddedComplex::from_embedded_tetrahedra(
        &[a, b, c, d, e],
        &[[0, 1, 4, 3], [1, 2, 4, 3], [2, 0, 4, 3]],
    )
    .unwrap();
    DerivativeFixture {
        name: "three-tetrahedron edge star",
        at_edge: embedded.edge_id(3, 4),
        wrt_edge: embedded.edge_id(3, 4),
        expected,
        embedded,
    }
}

/// Four tetrahedra ABED, BCED, CFED, FAED around the interior edge DE; the
/// diagonal response is the sum of two three-star terms, one per half of the
/// star split along the virtual diagonal AC (the dihedral angles of the two
/// virtual tetrahedra CAED and ACED cancel in the sum).
pub fn four_tetra_star_fixture() -> DerivativeFixture {
    let a = Point3::new(1.1, 0.05, 0.03);
    let b = Point3::new(0.02, 1.08, -0.04);
    let c = Point3::new(-1.04, 0.06, 0.05);
    let f = Point3::new(-0.03, -1.12, 0.0);
    let d = Point3::new(0.04, -0.02, 1.2);
    let e = Point3::new(-0.05, 0.03, -1.06);
    let l_de = d.distance(e);
    let term1 = oriented_volume(a, b, c, d) * oriented_volume(e, a, b, c)
        / (oriented_volume(a, b, e, d) * oriented_volume(b, c, e, d) * oriented_volume(c, a, e, d));
    let term2 = oriented_volume(a, c, f, d) * oriented_volume(e, a, c, f)
        / (oriented_volume(a, c, e, d) * oriented_volume(c, f, e, d) * oriented_volume(f, a, e, d));
    let expected = -l_de * l_de / 6.0 * (term1 + term2);
    let embedded = EmbeddedComplex::from_embedded_tetrahedra(
        &[a, b, c, f, d, e],
        &[[0, 1, 5, 4], [1, 2, 5, 4], [2, 3, 5, 4], [3, 0, 5, 4]],
    )
    .unwrap();
    DerivativeFixture {
        name: "four-tetrahedron edge star",
        at_edge: embedded.edge_id(4, 5),
        wrt_edge: embedded.edge_id(4, 5),
        expected,
        embedded,
    }
}

pub fn all_fixtures() -> Vec<DerivativeFixture> {
    vec![
        opposite_edge_fixture(),
        shared_face_fixture(),
        full_star_fixture(),
        four_tetra_star_fixture(),
    ]
}

/// Outcome of one analytic-vs-finite-difference Jacobian sweep.
/// `formula_rel_err` is present for the pinned fixtures only.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeCheck {
    pub name: String,
    pub max_fd_dev: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_rel_err: Option<f64>,
}

fn max_entry_dev(embedded: &EmbeddedComplex) -> Result<f64> {
    let analytic = defect_jacobian_analytic(&embedded.complex, &embedded.metric)?;
    let fd = defect_jacobian_fd(&embedded.complex, &embedded.metric, FD_STEP)?;
    let n = embedded.complex.edge_count();
    let mut dev = 0.0f64;
    for e in 0..n {
        for f in 0..n {
            dev = dev.max((analytic.entry(e, f) - fd.entry(e, f)).abs());
        }
    }
    Ok(dev)
}

/// Sweeps the analytic Jacobian against central finite differences on
/// reference L(7,1) and L(7,2) realizations and on all pinned fixtures,
/// reporting the worst entrywise deviation of each and the fixtures'
/// formula residuals.
pub fn derivative_checks() -> Result<Vec<DerivativeCheck>> {
    let mut checks = Vec::new();
    for q in [1, 2] {
        let lens = LensParams::new(7, q)?;
        let real = fd_reference_realization(lens)?;
        let complex = lens.complex();
        let analytic = defect_jacobian_analytic(&complex, &real.metric)?;
        let fd = defect_jacobian_fd(&complex, &real.metric, FD_STEP)?;
        let mut dev = 0.0f64;
        for e in 0..complex.edge_count() {
            for f in 0..complex.edge_count() {
                dev = dev.max((analytic.entry(e, f) - fd.entry(e, f)).abs());
            }
        }
        checks.push(DerivativeCheck {
            name: format!("L(7,{q}) realization"),
            max_fd_dev: dev,
            formula_rel_err: None,
        });
    }
    for fixture in all_fixtures() {
        let analytic = defect_jacobian_analytic(&fixture.embedded.complex, &fixture.embedded.metric)?;
        let entry = analytic.entry(fixture.at_edge, fixture.wrt_edge);
        checks.push(DerivativeCheck {
            name: fixture.name.to_string(),
            max_fd_dev: max_entry_dev(&fixture.embedded)?,
            formula_rel_err: Some((entry - fixture.expected).abs() / fixture.expected.abs()),
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_entries_match_closed_forms() {
        for fixture in all_fixtures() {
            let analytic =
                defect_jacobian_analytic(&fixture.embedded.complex, &fixture.embedded.metric)
                    .unwrap();
            let entry = analytic.entry(fixture.at_edge, fixture.wrt_edge);
            let rel = (entry - fixture.expected).abs() / fixture.expected.abs();
            eprintln!(
                "{}: entry {entry:.12} expected {:.12} rel {rel:.2e}",
                fixture.name, fixture.expected
            );
            assert!(rel <= 1e-9, "{}: rel {rel:.2e}", fixture.name);
        }
    }

    #[test]
    fn fixtures_match_finite_differences() {
        for fixture in all_fixtures() {
            let dev = max_entry_dev(&fixture.embedded).unwrap();
            eprintln!("{}: max |analytic - fd| = {dev:.2e}", fixture.name);
            assert!(dev <= 1e-6, "{}: dev {dev:.2e}", fixture.name);
        }
    }

    #[test]
    fn four_star_splits_into_two_three_stars() {
        // splitting the four-tetrahedron star along the virtual diagonal AC
        // yields two three-stars whose shared virtual tetrahedron appears
        // with opposite orientations, so its angle cancels and the diagonal
        // responses add up exactly
        let whole = four_tetra_star_fixture();
        let p = &whole.embedded.points;
        let (a, b, c, f, d, e) = (p[0], p[1], p[2], p[3], p[4], p[5]);
        let tets = [[0usize, 1, 4, 3], [1, 2, 4, 3], [2, 0, 4, 3]];
        let half1 = EmbeddedComplex::from_embedded_tetrahedra(&[a, b, c, d, e], &tets).unwrap();
        let half2 = EmbeddedComplex::from_embedded_tetrahedra(&[a, c, f, d, e], &tets).unwrap();
        let mut sum = 0.0;
        for half in [&half1, &half2] {
            let jac = defect_jacobian_analytic(&half.complex, &half.metric).unwrap();
            let de = half.edge_id(3, 4);
            sum += jac.entry(de, de);
        }
        let jac =
            defect_jacobian_analytic(&whole.embedded.complex, &whole.embedded.metric).unwrap();
        let total = jac.entry(whole.at_edge, whole.wrt_edge);
        eprintln!("four-star diagonal {total:.12}, half sum {sum:.12}");
        assert!((total - sum).abs() <= 1e-12 * total.abs());
    }

    #[test]
    fn lens_realizations_match_finite_differences() {
        let checks = derivative_checks().unwrap();
        assert_eq!(checks.len(), 6);
        for check in &checks {
            eprintln!(
                "{}: max fd dev {:.2e}, formula rel {:?}",
                check.name, check.max_fd_dev, check.formula_rel_err
            );
            assert!(check.max_fd_dev <= 1e-6, "{}: {:.2e}", check.name, check.max_fd_dev);
            if let Some(rel) = check.formula_rel_err {
                assert!(rel <= 1e-9, "{}: formula rel {rel:.2e}", check.name);
            }
        }
    }
}
