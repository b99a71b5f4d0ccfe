//! Lame-parameter phantoms built from quintic-smoothed circular bumps.
//!
//! Each bump has a circular plateau of radius r1 at value h1, a far value h2
//! beyond r2, and a C2 quintic radial transition in between.

use crate::error::{Error, Result};
use crate::field::{LameField, ScalarField};
use crate::mesh::TriMesh;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: [f64; 2],
    pub r1: f64,
    pub r2: f64,
    /// Plateau value, kPa.
    pub h1: f64,
    /// Far value, kPa.
    pub h2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhantomSpec {
    /// Constant background (lambda, mu), kPa.
    pub background: [f64; 2],
    /// Inclusions as (lambda bump, mu bump) pairs sharing a center.
    pub inclusions: Vec<(BumpSpec, BumpSpec)>,
}

/// The unique quintic S on [r1, r2] with S(r1)=h1, S(r2)=h2 and vanishing
/// first and second derivatives at both ends.
pub fn quintic_transition(r1: f64, r2: f64, h1: f64, h2: f64, r: f64) -> f64 {
    assert!(r1 < r2, "transition interval must be non-degenerate");
    assert!(
        (r1..=r2).contains(&r),
        "r = {r} outside transition interval [{r1}, {r2}]"
    );
    let t = (r - r1) / (r2 - r1);
    let smooth = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    h1 + (h2 - h1) * smooth
}

/// Radially symmetric bump value at a point.
pub fn eval_bump(spec: &BumpSpec, x: [f64; 2]) -> f64 {
    let dx = x[0] - spec.center[0];
    let dy = x[1] - spec.center[1];
    let r = (dx * dx + dy * dy).sqrt();
    if r <= spec.r1 {
        spec.h1
    } else if r >= spec.r2 {
        spec.h2
    } else {
        quintic_transition(spec.r1, spec.r2, spec.h1, spec.h2, r)
    }
}

/// Vertexwise evaluation of the phantom on a mesh. Overlapping inclusions
/// are resolved by last-writer-wins in list order.
pub fn compose_phantom(spec: &PhantomSpec, mesh: &TriMesh) -> Result<LameField> {
    let mut lambda = vec![spec.background[0]; mesh.num_vertices()];
    let mut mu = vec![spec.background[1]; mesh.num_vertices()];
    for (bl, bm) in &spec.inclusions {
        for (i, &p) in mesh.vertices.iter().enumerate() {
            let dx = p[0] - bl.center[0];
            let dy = p[1] - bl.center[1];
            if dx * dx + dy * dy < bl.r2 * bl.r2 {
                lambda[i] = eval_bump(bl, p);
            }
            let dx = p[0] - bm.center[0];
            let dy = p[1] - bm.center[1];
            if dx * dx + dy * dy < bm.r2 * bm.r2 {
                mu[i] = eval_bump(bm, p);
            }
        }
    }
    if let Some((vertex, &bad)) = mu
        .iter()
        .enumerate()
        .find(|&(_, &v)| v <= 0.0)
        .map(|(i, v)| (i, v))
    {
        return Err(Error::AdmissibilityViolation { vertex, mu: bad });
    }
    Ok(LameField {
        lambda: ScalarField { values: lambda },
        mu: ScalarField { values: mu },
    })
}

/// Named phantom presets. The paper shows its phantoms only as figures, so
/// all concrete numbers here are calibration choices, not reported values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhantomPreset {
    /// One smooth inclusion per parameter, centered in the square.
    Smooth,
    /// Same geometry with a one-percent transition width; behaves like a
    /// discontinuous field after discretization.
    NearDiscontinuous,
    /// Three inclusions of varying elastic contrast.
    ThreeInclusions,
}

impl PhantomPreset {
    pub fn spec(self) -> PhantomSpec {
        let background = [2.0, 0.3];
        let pair = |center: [f64; 2], r1: f64, r2: f64, h_l: f64, h_m: f64| {
            (
                BumpSpec {
                    center,
                    r1,
                    r2,
                    h1: h_l,
                    h2: background[0],
                },
                BumpSpec {
                    center,
                    r1,
                    r2,
                    h1: h_m,
                    h2: background[1],
                },
            )
        };
        match self {
            PhantomPreset::Smooth => PhantomSpec {
                background,
                inclusions: vec![pair([0.5, 0.5], 0.15, 0.35, 4.0, 0.9)],
            },
            PhantomPreset::NearDiscontinuous => PhantomSpec {
                background,
                inclusions: vec![pair([0.5, 0.5], 0.24, 0.25, 4.0, 0.9)],
            },
            PhantomPreset::ThreeInclusions => PhantomSpec {
                background,
                inclusions: vec![
                    pair([0.3, 0.3], 0.08, 0.18, 4.0, 0.9),
                    pair([0.7, 0.35], 0.06, 0.16, 3.0, 0.6),
                    pair([0.5, 0.7], 0.1, 0.2, 5.0, 1.2),
                ],
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_unit_square_mesh;
    use proptest::prelude::*;

    #[test]
    fn quintic_interpolation_conditions() {
        let (r1, r2, h1, h2) = (0.3, 0.8, 2.0, 5.0);
        assert_eq!(quintic_transition(r1, r2, h1, h2, r1), h1);
        assert_eq!(quintic_transition(r1, r2, h1, h2, r2), h2);
        // odd symmetry about the midpoint
        let mid = quintic_transition(r1, r2, h1, h2, 0.5 * (r1 + r2));
        assert!((mid - 0.5 * (h1 + h2)).abs() < 1e-14);
    }

    #[test]
    fn quintic_reference_value() {
        // r1=0, r2=1, h1=1, h2=0: S(t) = 1 - (10 t^3 - 15 t^4 + 6 t^5)
        let v = quintic_transition(0.0, 1.0, 1.0, 0.0, 0.25);
        assert!((v - 0.896484375).abs() < 1e-15);
    }

    #[test]
    fn quintic_is_monotone() {
        let (r1, r2, h1, h2) = (0.1, 0.4, 3.0, 0.5);
        let mut prev = h1;
        for k in 1..=1000 {
            let r = r1 + (r2 - r1) * k as f64 / 1000.0;
            let v = quintic_transition(r1, r2, h1, h2, r);
            assert!(v <= prev + 1e-14, "overshoot at r={r}");
            prev = v;
        }
    }

    #[test]
    #[should_panic]
    fn quintic_rejects_out_of_range() {
        quintic_transition(0.2, 0.4, 1.0, 0.0, 0.5);
    }

    #[test]
    fn bump_plateau_and_far_field() {
        let b = BumpSpec {
            center: [0.5, 0.5],
            r1: 0.1,
            r2: 0.3,
            h1: 4.0,
            h2: 2.0,
        };
        assert_eq!(eval_bump(&b, [0.5, 0.5]), 4.0);
        assert_eq!(eval_bump(&b, [0.5 + 2.0 * b.r2, 0.5]), 2.0);
    }

    #[test]
    fn bump_is_c2_across_seams() {
        // one-sided second differences agree to O(step) across r1 and r2
        let b = BumpSpec {
            center: [0.0, 0.0],
            r1: 0.2,
            r2: 0.6,
            h1: 1.0,
            h2: 0.0,
        };
        let f = |r: f64| eval_bump(&b, [r, 0.0]);
        for &seam in &[b.r1, b.r2] {
            let gap = |step: f64| {
                let l = (f(seam) - 2.0 * f(seam - step) + f(seam - 2.0 * step)) / (step * step);
                let r = (f(seam + 2.0 * step) - 2.0 * f(seam + step) + f(seam)) / (step * step);
                (l - r).abs()
            };
            // mismatch of one-sided second differences is O(step * |f'''|),
            // with |f'''| ~ 60 |h2 - h1| / (r2 - r1)^3 ~ 940 here
            assert!(gap(1e-3) < 2.0, "seam {seam}: gap {}", gap(1e-3));
            assert!(gap(1e-4) < 0.3 * gap(1e-3) + 1e-6, "seam {seam}");
        }
    }

    proptest! {
        #[test]
        fn bump_is_radially_symmetric(angle in 0.0..std::f64::consts::TAU, r in 0.0..0.5f64) {
            let b = BumpSpec {
                center: [0.4, 0.6],
                r1: 0.1,
                r2: 0.3,
                h1: 4.0,
                h2: 2.0,
            };
            let p = [b.center[0] + r * angle.cos(), b.center[1] + r * angle.sin()];
            let q = [b.center[0] + r, b.center[1]];
            prop_assert!((eval_bump(&b, p) - eval_bump(&b, q)).abs() < 1e-12);
        }
    }

    #[test]
    fn compose_background_only() {
        let m = build_unit_square_mesh(4).unwrap();
        let spec = PhantomSpec {
            background: [2.0, 0.3],
            inclusions: vec![],
        };
        let f = compose_phantom(&spec, &m).unwrap();
        assert!(f.lambda.values.iter().all(|&v| v == 2.0));
        assert!(f.mu.values.iter().all(|&v| v == 0.3));
    }

    #[test]
    fn compose_center_vertex_hits_plateau() {
        let m = build_unit_square_mesh(8).unwrap();
        let f = compose_phantom(&PhantomPreset::Smooth.spec(), &m).unwrap();
        // (0.5, 0.5) is a vertex of the n=8 mesh
        let center = m
            .vertices
            .iter()
            .position(|&p| p == [0.5, 0.5])
            .unwrap();
        assert_eq!(f.lambda.values[center], 4.0);
        assert_eq!(f.mu.values[center], 0.9);
    }

    #[test]
    fn near_discontinuous_annulus_is_one_element_wide() {
        let n = 100usize; // element width 0.01 = r2 - r1
        let m = build_unit_square_mesh(n).unwrap();
        let spec = PhantomSpec {
            background: [2.0, 0.3],
            inclusions: vec![(
                BumpSpec {
                    center: [0.5, 0.5],
                    r1: 0.24,
                    r2: 0.25,
                    h1: 4.0,
                    h2: 2.0,
                },
                BumpSpec {
                    center: [0.5, 0.5],
                    r1: 0.24,
                    r2: 0.25,
                    h1: 0.9,
                    h2: 0.3,
                },
            )],
        };
        let f = compose_phantom(&spec, &m).unwrap();
        // vertex classification scan: everything outside the annulus is
        // exactly h1 or h2
        for (i, &p) in m.vertices.iter().enumerate() {
            let r = ((p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2)).sqrt();
            let v = f.lambda.values[i];
            if r <= 0.24 {
                assert_eq!(v, 4.0);
            } else if r >= 0.25 {
                assert_eq!(v, 2.0);
            } else {
                assert!((2.0..=4.0).contains(&v));
            }
        }
    }

    #[test]
    fn negative_mu_rejected() {
        let m = build_unit_square_mesh(8).unwrap();
        let spec = PhantomSpec {
            background: [2.0, 0.3],
            inclusions: vec![(
                BumpSpec {
                    center: [0.5, 0.5],
                    r1: 0.1,
                    r2: 0.3,
                    h1: 2.0,
                    h2: 2.0,
                },
                BumpSpec {
                    center: [0.5, 0.5],
                    r1: 0.1,
                    r2: 0.3,
                    h1: -0.5,
                    h2: 0.3,
                },
            )],
        };
        match compose_phantom(&spec, &m) {
            Err(Error::AdmissibilityViolation { .. }) => {}
            other => panic!("expected admissibility violation, got {other:?}"),
        }
    }

    #[test]
    fn shipped_presets_are_admissible() {
        let m = build_unit_square_mesh(32).unwrap();
        for preset in [
            PhantomPreset::Smooth,
            PhantomPreset::NearDiscontinuous,
            PhantomPreset::ThreeInclusions,
        ] {
            let f = compose_phantom(&preset.spec(), &m).unwrap();
            assert!(f.mu.values.iter().all(|&v| v > 0.0));
            assert!(f.lambda.values.iter().all(|&v| v >= 0.0));
        }
    }
}
