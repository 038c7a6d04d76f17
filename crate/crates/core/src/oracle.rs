//! Root finders that do not use homotopy continuation: companion-matrix
//! eigenvalues for binary forms, and multi-start projective Newton for small
//! systems. They exist to cross-check the trackers.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{HomoPoly, MultiIndex, PolySystem, C64, ONE, ZERO};
use crate::projective::{projective_newton_step, residual, riemann_distance, ProjectivePoint};
use crate::rng::{domain, stream};

/// Roots closer than this (Riemann distance) are considered equal.
pub const DEDUP_DISTANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Companion,
    Multistart,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRootSet {
    pub roots: Vec<ProjectivePoint>,
    /// `||h(z)|| / ||h||` per root after refinement.
    pub residuals: Vec<f64>,
    pub method: OracleMethod,
}

fn refine(h: &PolySystem, z: ProjectivePoint, max_iters: usize) -> ProjectivePoint {
    let mut z = z;
    for _ in 0..max_iters {
        match projective_newton_step(h, &z) {
            Ok(next) => {
                let moved = riemann_distance(&z, &next);
                z = next;
                if moved < 1e-15 {
                    break;
                }
            }
            Err(_) => break,
        }
    }
    z
}

/// Parlett–Reinsch balancing with radix 2.
fn balance(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = col + row;
            let (mut c, mut r) = (col, row);
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Eigenvalues of the companion matrix of the monic polynomial with
/// coefficients `coeffs` (lowest degree first, leading coefficient last).
fn companion_eigenvalues(coeffs: &[C64]) -> Vec<C64> {
    let m = coeffs.len() - 1;
    let lead = coeffs[m];
    if m == 1 {
        return vec![-coeffs[0] / lead];
    }
    let mut comp = DMatrix::from_element(m, m, ZERO);
    for i in 1..m {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..m {
        comp[(i, m - 1)] = -coeffs[i] / lead;
    }
    balance(&mut comp);
    let schur = comp.schur();
    let (_, t) = schur.unpack();
    (0..m).map(|i| t[(i, i)]).collect()
}

/// Projective roots of a binary form, via the companion matrix of its
/// dehomogenization at `X_0 = 1`. A vanishing leading coefficient contributes
/// the root `(0, 1)` at infinity.
pub fn univariate_roots(p: &HomoPoly) -> Result<OracleRootSet> {
    if p.num_vars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: p.num_vars(),
        });
    }
    let d = p.degree();
    if p.is_zero() {
        return Err(Error::ZeroSystem);
    }
    let coeffs: Vec<C64> = (0..=d)
        .map(|k| p.coeff(&MultiIndex::new(vec![d - k, k])))
        .collect();
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let negligible = |c: &C64| c.norm() <= 1e-14 * scale;

    let mut top = d as usize;
    let mut at_infinity = 0;
    while top > 0 && negligible(&coeffs[top]) {
        top -= 1;
        at_infinity += 1;
    }
    if at_infinity > 1 {
        return Err(Error::NotSquareFree(0, 1));
    }

    let system = PolySystem::new(vec![p.clone()])?.normalize_to_sphere()?;
    let mut affine: Vec<C64> = if top >= 1 {
        companion_eigenvalues(&coeffs[..=top])
    } else {
        Vec::new()
    };
    affine.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mut roots: Vec<ProjectivePoint> = affine
        .into_iter()
        .map(|x| {
            refine(
                &system,
                ProjectivePoint::new(vec![ONE, x]).expect("finite root"),
                8,
            )
        })
        .collect();
    if at_infinity == 1 {
        roots.push(refine(&system, ProjectivePoint::basis(1, 2), 8));
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if riemann_distance(&roots[i], &roots[j]) < DEDUP_DISTANCE {
                return Err(Error::NotSquareFree(i, j));
            }
        }
    }
    let residuals = roots
        .iter()
        .map(|z| residual(&system, z))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleRootSet {
        roots,
        residuals,
        method: OracleMethod::Companion,
    })
}

const MULTISTART_MAX_ITERS: usize = 50;
const MULTISTART_RESIDUAL: f64 = 1e-10;

/// Default number of random starts: fifty per expected root.
pub fn default_attempts(h: &PolySystem) -> usize {
    50 * h.degrees().bezout_number() as usize
}

/// Roots of a small system from projective Newton runs started at uniformly
/// random points. Succeeds only when all Bezout-many distinct roots appear.
pub fn multistart_roots(h: &PolySystem, attempts: usize, seed: u64) -> Result<OracleRootSet> {
    let n = h.num_equations();
    let expected = h.degrees().bezout_number();
    if n > 3 || expected > 64 {
        return Err(Error::InvalidConfig(format!(
            "multistart oracle limited to n <= 3 and at most 64 roots (n = {n}, {expected} roots)"
        )));
    }
    let expected = expected as usize;
    let system = h.normalize_to_sphere()?;
    let mut roots: Vec<ProjectivePoint> = Vec::new();
    let mut residuals = Vec::new();

    for attempt in 0..attempts {
        if roots.len() == expected {
            break;
        }
        let mut rng = stream(seed, domain::ORACLE, attempt as u64);
        let coords: Vec<C64> = (0..n + 1)
            .map(|_| {
                use rand::Rng;
                use rand_distr::StandardNormal;
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
            .collect();
        let Ok(mut z) = ProjectivePoint::new(coords) else {
            continue;
        };
        let mut converged = false;
        for _ in 0..MULTISTART_MAX_ITERS {
            match projective_newton_step(&system, &z) {
                Ok(next) => z = next,
                Err(_) => break,
            }
            if residual(&system, &z)? <= MULTISTART_RESIDUAL {
                converged = true;
                break;
            }
        }
        if !converged {
            continue;
        }
        let z = refine(&system, z, 3);
        let res = residual(&system, &z)?;
        if res > MULTISTART_RESIDUAL {
            continue;
        }
        if roots
            .iter()
            .all(|r| riemann_distance(r, &z) >= DEDUP_DISTANCE)
        {
            roots.push(z);
            residuals.push(res);
        }
    }
    if roots.len() != expected {
        return Err(Error::RootCountDeficit {
            expected,
            found: roots.len(),
        });
    }
    Ok(OracleRootSet {
        roots,
        residuals,
        method: OracleMethod::Multistart,
    })
}

/// Greedy bijection check: every point of `a` has a distinct partner in `b`
/// within `tol`. Returns the number of unmatched points of `a`.
pub fn count_unmatched(a: &[ProjectivePoint], b: &[ProjectivePoint], tol: f64) -> usize {
    let mut used = vec![false; b.len()];
    let mut unmatched = 0;
    for z in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, w)| (j, riemann_distance(z, w)))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((j, dist)) if dist <= tol => used[j] = true,
            _ => unmatched += 1,
        }
    }
    unmatched + b.len().saturating_sub(a.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::DegreeVector;
    use crate::start::{fekete_quartic_raw, good_initial_pair, sample_sphere, total_degree};
    use std::f64::consts::PI;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn expect_roots(found: &[ProjectivePoint], expected: &[ProjectivePoint]) {
        assert_eq!(found.len(), expected.len());
        assert_eq!(count_unmatched(found, expected, 1e-10), 0);
    }

    #[test]
    fn quartic_roots_of_unity() {
        let p = HomoPoly::from_terms(4, 2, [(vec![0, 4], r(1.0)), (vec![4, 0], r(-1.0))]).unwrap();
        let set = univariate_roots(&p).unwrap();
        let expected: Vec<ProjectivePoint> = (0..4)
            .map(|k| {
                ProjectivePoint::new(vec![r(1.0), C64::from_polar(1.0, PI * k as f64 / 2.0)])
                    .unwrap()
            })
            .collect();
        expect_roots(&set.roots, &expected);
        assert_eq!(set.method, OracleMethod::Companion);
    }

    #[test]
    fn quadric_roots() {
        let p = HomoPoly::from_terms(2, 2, [(vec![0, 2], r(1.0)), (vec![2, 0], r(-1.0))]).unwrap();
        let set = univariate_roots(&p).unwrap();
        let expected = vec![
            ProjectivePoint::new(vec![r(1.0), r(1.0)]).unwrap(),
            ProjectivePoint::new(vec![r(1.0), r(-1.0)]).unwrap(),
        ];
        expect_roots(&set.roots, &expected);
    }

    #[test]
    fn fekete_roots_include_origin_and_cube_roots() {
        let set = univariate_roots(&fekete_quartic_raw().polys()[0]).unwrap();
        let mut expected = vec![ProjectivePoint::basis(0, 2)];
        for k in 0..3 {
            let w = C64::from_polar(2f64.sqrt(), 2.0 * PI * k as f64 / 3.0);
            expected.push(ProjectivePoint::new(vec![r(1.0), w]).unwrap());
        }
        expect_roots(&set.roots, &expected);
        assert!(set.residuals.iter().all(|&x| x <= 1e-10));
    }

    #[test]
    fn root_at_infinity_is_reported() {
        // X0 * (X1^2 - X0^2): roots (1, 1), (1, -1) and (0, 1).
        let p = HomoPoly::from_terms(3, 2, [(vec![1, 2], r(1.0)), (vec![3, 0], r(-1.0))]).unwrap();
        let set = univariate_roots(&p).unwrap();
        assert_eq!(set.roots.len(), 3);
        assert!(set
            .roots
            .iter()
            .any(|z| riemann_distance(z, &ProjectivePoint::basis(1, 2)) < 1e-12));
    }

    #[test]
    fn repeated_roots_are_reported() {
        // (X1 - X0)^2
        let p = HomoPoly::from_terms(
            2,
            2,
            [
                (vec![0, 2], r(1.0)),
                (vec![1, 1], r(-2.0)),
                (vec![2, 0], r(1.0)),
            ],
        )
        .unwrap();
        assert!(matches!(
            univariate_roots(&p),
            Err(Error::NotSquareFree(_, _))
        ));
        let p = HomoPoly::from_terms(2, 2, [(vec![2, 0], r(1.0))]).unwrap();
        assert!(matches!(
            univariate_roots(&p),
            Err(Error::NotSquareFree(_, _))
        ));
    }

    #[test]
    fn random_forms_have_small_residuals() {
        let d = DegreeVector::new(vec![10]).unwrap();
        let mut rng = stream(5, 99, 0);
        for _ in 0..20 {
            let g = sample_sphere(&d, &mut rng);
            let set = univariate_roots(&g.polys()[0]).unwrap();
            assert_eq!(set.roots.len(), 10);
            assert!(
                set.residuals.iter().all(|&x| x <= 1e-10),
                "{:?}",
                set.residuals
            );
        }
    }

    #[test]
    fn multistart_finds_total_degree_roots() {
        let pair = total_degree(&DegreeVector::new(vec![2, 2]).unwrap(), 1.0);
        let set = multistart_roots(&pair.system, default_attempts(&pair.system), 1).unwrap();
        expect_roots(&set.roots, &pair.starts);
        assert_eq!(set.method, OracleMethod::Multistart);
    }

    #[test]
    fn multistart_finds_good_pair_root() {
        // Target with a root at e0: the good system plus a generic cubic-free term.
        let d = DegreeVector::new(vec![2, 2]).unwrap();
        let good = good_initial_pair(&d).system;
        let mut rng = stream(2, 99, 0);
        let noise = sample_sphere(&d, &mut rng);
        let polys: Vec<HomoPoly> = good
            .polys()
            .iter()
            .zip(noise.polys())
            .map(|(p, q)| {
                let e0 = MultiIndex::new(vec![2, 0, 0]);
                let mut q = q.clone();
                let c = q.coeff(&e0);
                q.add_term(e0, -c).unwrap();
                p.lin_comb(ONE, &q, r(0.5)).unwrap()
            })
            .collect();
        let h = PolySystem::new(polys).unwrap();
        let set = multistart_roots(&h, 500, 3).unwrap();
        assert!(set
            .roots
            .iter()
            .any(|z| riemann_distance(z, &ProjectivePoint::basis(0, 3)) < 1e-10));
    }

    #[test]
    fn multistart_scope_and_undercount() {
        let d = DegreeVector::new(vec![2, 2, 2, 2]).unwrap();
        let h = total_degree(&d, 1.0).system;
        assert!(matches!(
            multistart_roots(&h, 10, 0),
            Err(Error::InvalidConfig(_))
        ));
        let d = DegreeVector::new(vec![2, 2]).unwrap();
        let h = total_degree(&d, 1.0).system;
        assert!(matches!(
            multistart_roots(&h, 1, 0),
            Err(Error::RootCountDeficit { expected: 4, .. })
        ));
    }
}
