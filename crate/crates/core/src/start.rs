//! Start systems and initial pairs: total-degree, the conjectured good pair,
//! uniform samples on the unit sphere, random pairs, the Fekete quartic, and
//! the search for the best-conditioned total-degree radius.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::univariate_roots;
use crate::poly::{kernel_poly, monomials, DegreeVector, HomoPoly, PolySystem, C64, ONE};
use crate::projective::{mu_system, newton_refine, ProjectivePoint};

/// A start system on the unit sphere together with known zeros of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialPair {
    pub system: PolySystem,
    pub starts: Vec<ProjectivePoint>,
}

/// `(X_i^{d_i} - r^{d_i} X_0^{d_i})_i` on the sphere, with all of its roots
/// `(1, r w_1, ..., r w_n)`, `w_i = exp(2 pi i k_i / d_i)`, ordered by
/// ascending `k` with the last index varying fastest.
pub fn total_degree(d: &DegreeVector, r: f64) -> InitialPair {
    InitialPair {
        system: total_degree_system(d, r),
        starts: total_degree_roots(d, r),
    }
}

fn total_degree_system(d: &DegreeVector, r: f64) -> PolySystem {
    let n = d.len();
    let polys = d
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &di)| {
            let mut lead = vec![0u32; n + 1];
            lead[i + 1] = di;
            let mut tail = vec![0u32; n + 1];
            tail[0] = di;
            HomoPoly::from_terms(
                di,
                n + 1,
                [(lead, ONE), (tail, C64::new(-r.powi(di as i32), 0.0))],
            )
            .expect("total-degree terms are well formed")
        })
        .collect();
    PolySystem::new(polys)
        .and_then(|s| s.normalize_to_sphere())
        .expect("total-degree system is nonzero")
}

fn total_degree_roots(d: &DegreeVector, r: f64) -> Vec<ProjectivePoint> {
    let degs = d.as_slice();
    let count = d.bezout_number() as usize;
    let mut out = Vec::with_capacity(count);
    let mut idx = vec![0u32; degs.len()];
    for _ in 0..count {
        let mut coords = Vec::with_capacity(degs.len() + 1);
        coords.push(ONE);
        for (k, &di) in idx.iter().zip(degs) {
            coords.push(C64::from_polar(r, 2.0 * PI * *k as f64 / di as f64));
        }
        out.push(ProjectivePoint::new(coords).expect("nonzero root"));
        for pos in (0..degs.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < degs[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
    out
}

/// `(sqrt(d_i) X_0^{d_i - 1} X_i)_i` on the sphere with its isolated root `e_0`.
pub fn good_initial_pair(d: &DegreeVector) -> InitialPair {
    let n = d.len();
    let polys = d
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &di)| {
            let mut exps = vec![0u32; n + 1];
            exps[0] = di - 1;
            exps[i + 1] += 1;
            HomoPoly::from_terms(di, n + 1, [(exps, C64::new((di as f64).sqrt(), 0.0))])
                .expect("good-pair term is well formed")
        })
        .collect();
    let system = PolySystem::new(polys)
        .and_then(|s| s.normalize_to_sphere())
        .expect("good-pair system is nonzero");
    InitialPair {
        system,
        starts: vec![ProjectivePoint::basis(0, n + 1)],
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Gaussian system whose coordinates in a Bombieri–Weyl orthonormal basis are
/// independent standard complex normals: the coefficient of `X^a` has
/// variance `binom(l, a)`.
pub fn sample_gaussian<R: Rng + ?Sized>(d: &DegreeVector, rng: &mut R) -> PolySystem {
    let nv = d.num_vars();
    let polys = d
        .as_slice()
        .iter()
        .map(|&di| {
            HomoPoly::from_terms(
                di,
                nv,
                monomials(di, nv).into_iter().map(|alpha| {
                    let scale = alpha.multinomial().sqrt();
                    let c = complex_gaussian(rng) * scale;
                    (alpha.exponents().to_vec(), c)
                }),
            )
            .expect("monomials are well formed")
        })
        .collect();
    PolySystem::new(polys).expect("degree vector is well formed")
}

/// Uniformly distributed system on the unit sphere.
pub fn sample_sphere<R: Rng + ?Sized>(d: &DegreeVector, rng: &mut R) -> PolySystem {
    loop {
        if let Ok(s) = sample_gaussian(d, rng).normalize_to_sphere() {
            return s;
        }
    }
}

const RANDOM_PAIR_ATTEMPTS: usize = 10;

/// Random initial pair: `z` uniform on the unit sphere of `C^{n+1}` and `g` a
/// Gaussian system projected onto `{h : h(z) = 0}` with the reproducing
/// kernel, then normalized.
pub fn random_initial_pair<R: Rng + ?Sized>(d: &DegreeVector, rng: &mut R) -> Result<InitialPair> {
    let nv = d.num_vars();
    for _ in 0..RANDOM_PAIR_ATTEMPTS {
        let z = loop {
            let coords: Vec<C64> = (0..nv).map(|_| complex_gaussian(rng)).collect();
            if let Ok(p) = ProjectivePoint::new(coords) {
                break p;
            }
        };
        let h = sample_gaussian(d, rng);
        let values = h.evaluate(z.coords())?;
        let polys = h
            .polys()
            .iter()
            .zip(&values)
            .map(|(p, v)| p.lin_comb(ONE, &kernel_poly(z.coords(), p.degree())?, -v))
            .collect::<Result<Vec<_>>>()?;
        let g = PolySystem::new(polys)?;
        if g.bw_norm() < 1e-12 {
            continue;
        }
        return Ok(InitialPair {
            system: g.normalize_to_sphere()?,
            starts: vec![z],
        });
    }
    Err(Error::DegenerateDraw(RANDOM_PAIR_ATTEMPTS))
}

/// `X_1 (X_1^3 - 2 sqrt(2) X_0^3)` on the sphere with its four roots, whose
/// images on the Riemann sphere form a regular tetrahedron.
pub fn fekete_quartic() -> InitialPair {
    let system = fekete_quartic_raw()
        .normalize_to_sphere()
        .expect("Fekete quartic is nonzero");
    let oracle = univariate_roots(&system.polys()[0]).expect("Fekete quartic is square-free");
    let starts = oracle
        .roots
        .iter()
        .map(|z| {
            newton_refine(&system, z, 3)
                .map(|t| t.last().clone())
                .unwrap_or_else(|_| z.clone())
        })
        .collect();
    InitialPair { system, starts }
}

/// The Fekete quartic before normalization (Bombieri–Weyl norm `sqrt 3`).
pub fn fekete_quartic_raw() -> PolySystem {
    PolySystem::new(vec![HomoPoly::from_terms(
        4,
        2,
        [
            (vec![0, 4], ONE),
            (vec![3, 1], C64::new(-2.0 * 2f64.sqrt(), 0.0)),
        ],
    )
    .expect("Fekete terms are well formed")])
    .expect("one equation in two variables")
}

/// Condition number of the total-degree system with radius `r`, computed over
/// its closed-form roots.
pub fn total_degree_mu(d: &DegreeVector, r: f64) -> f64 {
    let pair = total_degree(d, r);
    mu_system(&pair.system, &pair.starts).expect("total-degree root list is nonempty")
}

pub const R_SEARCH_LOWER: f64 = 0.05;
pub const R_SEARCH_UPPER: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalRadius {
    pub r_star: f64,
    pub mu_star: f64,
}

/// Minimizes `r -> mu(total_degree(d, r))` over `(0.05, 5]` by golden-section
/// search, then polishes with parabolic steps through symmetric triples.
pub fn optimize_r(d: &DegreeVector) -> OptimalRadius {
    let phi = |r: f64| total_degree_mu(d, r);
    let inv_golden = (5f64.sqrt() - 1.0) / 2.0;

    let (mut a, mut b) = (R_SEARCH_LOWER, R_SEARCH_UPPER);
    let mut c = b - inv_golden * (b - a);
    let mut e = a + inv_golden * (b - a);
    let (mut fc, mut fe) = (phi(c), phi(e));
    while b - a > 1e-7 {
        if fc <= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - inv_golden * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + inv_golden * (b - a);
            fe = phi(e);
        }
    }
    let (mut r, mut best) = if fc <= fe { (c, fc) } else { (e, fe) };

    for h in [1e-4, 1e-5, 1e-5] {
        let (fm, f0, fp) = (phi(r - h), phi(r), phi(r + h));
        let curvature = fp - 2.0 * f0 + fm;
        if curvature <= 0.0 {
            break;
        }
        let cand = r - h * (fp - fm) / (2.0 * curvature);
        if (cand - r).abs() > h || !(R_SEARCH_LOWER..=R_SEARCH_UPPER).contains(&cand) {
            break;
        }
        let fcand = phi(cand);
        if fcand > best + 1e-14 * best {
            break;
        }
        r = cand;
        best = fcand;
    }
    OptimalRadius {
        r_star: r,
        mu_star: best,
    }
}
