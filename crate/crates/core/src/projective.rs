//! Points of complex projective space, the Riemann distance, the projective
//! Newton operator and the normalized condition number.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{checked_inverse, hermitian, spectral_norm, vec_norm};
use crate::poly::{PolySystem, C64, ONE, ZERO};

/// Unit-norm representative of a point of `P(C^{n+1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    coords: Vec<C64>,
}

impl ProjectivePoint {
    /// Normalizes `coords` to unit length.
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite("point coordinate".into()));
        }
        let nrm = vec_norm(&coords);
        if nrm == 0.0 {
            return Err(Error::NotUnit(0.0));
        }
        Ok(ProjectivePoint {
            coords: coords.into_iter().map(|c| c / nrm).collect(),
        })
    }

    /// Accepts an already unit-norm vector without rescaling.
    pub fn from_unit(coords: Vec<C64>) -> Result<Self> {
        let nrm = vec_norm(&coords);
        if !nrm.is_finite() || (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::NotUnit(nrm));
        }
        Ok(ProjectivePoint { coords })
    }

    /// Coordinate point `e_k` in `dim` coordinates.
    pub fn basis(k: usize, dim: usize) -> Self {
        let mut coords = vec![ZERO; dim];
        coords[k] = ONE;
        ProjectivePoint { coords }
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.coords
    }

    pub fn distance(&self, other: &ProjectivePoint) -> f64 {
        riemann_distance(self, other)
    }
}

/// `arccos(|<z, z'>|)` for unit representatives, in `[0, pi/2]`.
///
/// Evaluated as `atan2(|w - <w, z> z|, |<w, z>|)`, which stays accurate for
/// nearby points where the arccosine loses half the digits.
pub fn riemann_distance(z: &ProjectivePoint, w: &ProjectivePoint) -> f64 {
    let (zc, wc) = (&z.coords, &w.coords);
    let ip = hermitian(wc, zc);
    let perp: Vec<C64> = wc.iter().zip(zc).map(|(a, b)| a - ip * b).collect();
    vec_norm(&perp).atan2(ip.norm())
}

/// Inverse of the `(n+1) x (n+1)` matrix stacking `Dh(z)` over the row `z*`.
///
/// Its first `n` columns realize `(Dh(z)|_{z^perp})^{-1}`; its last column is
/// `z` itself whenever `Dh(z) z = 0`.
#[derive(Clone, Debug)]
pub struct StackedInverse {
    inv: DMatrix<C64>,
}

impl StackedInverse {
    pub fn new(jacobian: &DMatrix<C64>, z: &[C64]) -> Result<Self> {
        let n = jacobian.nrows();
        if jacobian.ncols() != n + 1 || z.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                actual: z.len(),
            });
        }
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n + 1)).copy_from(jacobian);
        for (j, zj) in z.iter().enumerate() {
            m[(n, j)] = zj.conj();
        }
        Ok(StackedInverse {
            inv: checked_inverse(&m)?,
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.inv
    }

    /// `y` with `Dh(z) y = b` and `<y, z> = 0`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.inv.nrows() - 1;
        (0..=n)
            .map(|i| (0..n).fold(ZERO, |acc, j| acc + self.inv[(i, j)] * b[j]))
            .collect()
    }

    /// Operator norm of the first `n` columns scaled by `Diag(weights)`.
    pub fn restricted_norm(&self, weights: &[f64]) -> f64 {
        let n = self.inv.nrows() - 1;
        let mut m = self.inv.columns(0, n).into_owned();
        for (j, w) in weights.iter().enumerate() {
            m.column_mut(j).scale_mut(*w);
        }
        spectral_norm(&m)
    }

    /// Operator norm of the full inverse scaled by `Diag(weights, last)`.
    pub fn full_norm(&self, weights: &[f64], last: f64) -> f64 {
        let n = self.inv.nrows() - 1;
        let mut m = self.inv.clone();
        for (j, w) in weights.iter().enumerate() {
            m.column_mut(j).scale_mut(*w);
        }
        m.column_mut(n).scale_mut(last);
        spectral_norm(&m)
    }
}

pub(crate) fn sqrt_degrees(h: &PolySystem) -> Vec<f64> {
    h.degrees()
        .as_slice()
        .iter()
        .map(|&d| (d as f64).sqrt())
        .collect()
}

/// Action of `(Dh(z)|_{z^perp})^{-1}` on `b`.
pub fn augmented_solve(h: &PolySystem, z: &ProjectivePoint, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != h.num_equations() {
        return Err(Error::DimensionMismatch {
            expected: h.num_equations(),
            actual: b.len(),
        });
    }
    let jac = h.jacobian(z.coords())?;
    Ok(StackedInverse::new(&jac, z.coords())?.solve(b))
}

/// `N_P(h)(z) = z - (Dh(z)|_{z^perp})^{-1} h(z)`, renormalized.
pub fn projective_newton_step(h: &PolySystem, z: &ProjectivePoint) -> Result<ProjectivePoint> {
    newton_step_with_correction(h, z).map(|(p, _)| p)
}

/// Newton step that also reports the Euclidean length of the correction.
pub(crate) fn newton_step_with_correction(
    h: &PolySystem,
    z: &ProjectivePoint,
) -> Result<(ProjectivePoint, f64)> {
    let (vals, jac) = h.eval_jacobian(z.coords())?;
    let y = StackedInverse::new(&jac, z.coords())?.solve(&vals);
    let next: Vec<C64> = z.coords().iter().zip(&y).map(|(a, b)| a - b).collect();
    Ok((ProjectivePoint::new(next)?, vec_norm(&y)))
}

/// Iterates of repeated projective Newton steps with successive distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonTrace {
    /// `iters + 1` points, starting with the input.
    pub iterates: Vec<ProjectivePoint>,
    /// `d_R(iterates[k], iterates[k + 1])`.
    pub distances: Vec<f64>,
}

impl NewtonTrace {
    pub fn last(&self) -> &ProjectivePoint {
        self.iterates
            .last()
            .expect("trace holds the starting point")
    }
}

pub fn newton_refine(h: &PolySystem, z: &ProjectivePoint, iters: usize) -> Result<NewtonTrace> {
    let mut iterates = Vec::with_capacity(iters + 1);
    let mut distances = Vec::with_capacity(iters);
    iterates.push(z.clone());
    for _ in 0..iters {
        let cur = iterates.last().unwrap();
        let next = projective_newton_step(h, cur)?;
        distances.push(riemann_distance(cur, &next));
        iterates.push(next);
    }
    Ok(NewtonTrace {
        iterates,
        distances,
    })
}

/// Normalized condition number `mu(h, z)`; `+inf` when the restricted
/// Jacobian is numerically singular.
pub fn condition_mu(h: &PolySystem, z: &ProjectivePoint) -> f64 {
    let jac = match h.jacobian(z.coords()) {
        Ok(j) => j,
        Err(_) => return f64::INFINITY,
    };
    match StackedInverse::new(&jac, z.coords()) {
        Ok(inv) => h.bw_norm() * inv.restricted_norm(&sqrt_degrees(h)),
        Err(_) => f64::INFINITY,
    }
}

/// `max_z mu(h, z)` over the supplied root list.
pub fn mu_system(h: &PolySystem, roots: &[ProjectivePoint]) -> Result<f64> {
    if roots.is_empty() {
        return Err(Error::EmptyRoots);
    }
    Ok(roots.iter().map(|z| condition_mu(h, z)).fold(0.0, f64::max))
}

/// Scaled residual `||h(z)|| / ||h||` at a unit point.
pub fn residual(h: &PolySystem, z: &ProjectivePoint) -> Result<f64> {
    Ok(vec_norm(&h.evaluate(z.coords())?) / h.bw_norm())
}
