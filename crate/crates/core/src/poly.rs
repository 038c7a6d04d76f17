//! Dense homogeneous polynomials, systems of them, and the Bombieri–Weyl
//! (unitarily invariant) Hermitian structure on those spaces.
//!
//! A polynomial of degree `l` in `n + 1` variables `X_0..X_n` is stored as an
//! ordered map from exponent tuples to complex coefficients. Iteration order is
//! lexicographic in the exponent tuple, which for a fixed total degree is a
//! graded order, so every traversal (and therefore every floating-point sum)
//! is deterministic.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Exponent tuple `(a_0, ..., a_n)` of a monomial `X_0^{a_0} ... X_n^{a_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `l! / (a_0! ... a_n!)`.
    pub fn multinomial(&self) -> f64 {
        let mut acc: u128 = 1;
        let mut partial: u32 = 0;
        for &a in &self.0 {
            partial += a;
            acc *= binomial(partial, a);
        }
        acc as f64
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All exponent tuples of total degree `degree` in `num_vars` variables, in
/// ascending lexicographic order.
pub fn monomials(degree: u32, num_vars: usize) -> Vec<MultiIndex> {
    fn rec(remaining: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in 0..=remaining {
            prefix.push(a);
            rec(remaining - a, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if num_vars == 0 {
        return out;
    }
    rec(
        degree,
        num_vars,
        &mut Vec::with_capacity(num_vars),
        &mut out,
    );
    out
}

/// Degrees `(d_1, ..., d_n)` of a square system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeVector(Vec<u32>);

impl DegreeVector {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidDegrees("empty degree vector".into()));
        }
        if degrees.contains(&0) {
            return Err(Error::InvalidDegrees(format!(
                "degrees must be positive, got {degrees:?}"
            )));
        }
        Ok(DegreeVector(degrees))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    /// Number of equations `n`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.0.len() + 1
    }

    pub fn max_degree(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(1)
    }

    /// Product of the degrees.
    pub fn bezout_number(&self) -> u64 {
        self.0.iter().map(|&d| d as u64).product()
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Product of the degrees, the generic number of projective roots.
pub fn bezout_number(d: &DegreeVector) -> u64 {
    d.bezout_number()
}

/// A homogeneous polynomial with complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomoPoly {
    degree: u32,
    num_vars: usize,
    coeffs: BTreeMap<MultiIndex, C64>,
}

impl HomoPoly {
    /// The zero polynomial of the given shape.
    pub fn zero(degree: u32, num_vars: usize) -> Self {
        HomoPoly {
            degree,
            num_vars,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// exponents are summed.
    pub fn from_terms<I>(degree: u32, num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        let mut p = HomoPoly::zero(degree, num_vars);
        for (exps, c) in terms {
            p.add_term(MultiIndex(exps), c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: C64) -> Result<()> {
        if alpha.len() != self.num_vars || alpha.degree() != self.degree {
            return Err(Error::InvalidMultiIndex {
                exponents: alpha.0,
                degree: self.degree,
                num_vars: self.num_vars,
            });
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient of {:?}", alpha.0)));
        }
        *self.coeffs.entry(alpha).or_insert(ZERO) += c;
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> C64 {
        self.coeffs.get(alpha).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| *c == ZERO)
    }

    pub fn scale(&self, c: C64) -> HomoPoly {
        HomoPoly {
            degree: self.degree,
            num_vars: self.num_vars,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: C64, other: &HomoPoly, b: C64) -> Result<HomoPoly> {
        self.check_shape(other)?;
        let mut coeffs: BTreeMap<MultiIndex, C64> = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), v * a))
            .collect();
        for (k, v) in &other.coeffs {
            *coeffs.entry(k.clone()).or_insert(ZERO) += v * b;
        }
        Ok(HomoPoly {
            degree: self.degree,
            num_vars: self.num_vars,
            coeffs,
        })
    }

    fn check_shape(&self, other: &HomoPoly) -> Result<()> {
        if self.degree != other.degree || self.num_vars != other.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "degree {} in {} vars vs degree {} in {} vars",
                self.degree, self.num_vars, other.degree, other.num_vars
            )));
        }
        Ok(())
    }

    /// Bombieri–Weyl product `sum_a binom(l, a)^{-1} a_a conj(b_a)`.
    pub fn bw_inner(&self, other: &HomoPoly) -> Result<C64> {
        self.check_shape(other)?;
        let mut acc = ZERO;
        for (alpha, a) in &self.coeffs {
            if let Some(b) = other.coeffs.get(alpha) {
                acc += a * b.conj() / alpha.multinomial();
            }
        }
        Ok(acc)
    }

    pub fn bw_norm_sqr(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(alpha, a)| a.norm_sqr() / alpha.multinomial())
            .sum()
    }

    pub fn evaluate(&self, z: &[C64]) -> Result<C64> {
        self.check_point(z)?;
        let pw = Powers::new(z, self.degree);
        Ok(self.eval_with(&pw))
    }

    /// Gradient `(dp/dX_0, ..., dp/dX_n)` at `z`.
    pub fn gradient(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.check_point(z)?;
        let pw = Powers::new(z, self.degree);
        let mut out = vec![ZERO; self.num_vars];
        self.accumulate_gradient(&pw, ONE, &mut out);
        Ok(out)
    }

    fn check_point(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                actual: z.len(),
            });
        }
        Ok(())
    }

    fn eval_with(&self, pw: &Powers) -> C64 {
        let mut acc = ZERO;
        for (alpha, c) in &self.coeffs {
            let mut m = *c;
            for (j, &a) in alpha.0.iter().enumerate() {
                m *= pw.get(j, a);
            }
            acc += m;
        }
        acc
    }

    /// Adds `scale * grad p(z)` into `out`.
    fn accumulate_gradient(&self, pw: &Powers, scale: C64, out: &mut [C64]) {
        for (alpha, c) in &self.coeffs {
            let c = c * scale;
            for (j, &aj) in alpha.0.iter().enumerate() {
                if aj == 0 {
                    continue;
                }
                let mut m = c * aj as f64;
                for (k, &ak) in alpha.0.iter().enumerate() {
                    m *= if k == j {
                        pw.get(k, ak - 1)
                    } else {
                        pw.get(k, ak)
                    };
                }
                out[j] += m;
            }
        }
    }
}

/// Cached coordinate powers `z_j^k` for `k <= max_power`.
struct Powers {
    table: Vec<C64>,
    stride: usize,
}

impl Powers {
    fn new(z: &[C64], max_power: u32) -> Self {
        let stride = max_power as usize + 1;
        let mut table = vec![ONE; z.len() * stride];
        for (j, zj) in z.iter().enumerate() {
            for k in 1..stride {
                table[j * stride + k] = table[j * stride + k - 1] * zj;
            }
        }
        Powers { table, stride }
    }

    #[inline]
    fn get(&self, var: usize, power: u32) -> C64 {
        self.table[var * self.stride + power as usize]
    }
}

/// A square system of `n` homogeneous polynomials in `n + 1` variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolySystem {
    degrees: DegreeVector,
    polys: Vec<HomoPoly>,
}

impl PolySystem {
    pub fn new(polys: Vec<HomoPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::ShapeMismatch(
                "a system needs at least one polynomial".into(),
            ));
        }
        let n = polys.len();
        for (i, p) in polys.iter().enumerate() {
            if p.num_vars() != n + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "polynomial {i} has {} variables, a system of {n} equations needs {}",
                    p.num_vars(),
                    n + 1
                )));
            }
        }
        let degrees = DegreeVector::new(polys.iter().map(|p| p.degree()).collect())?;
        Ok(PolySystem { degrees, polys })
    }

    pub fn degrees(&self) -> &DegreeVector {
        &self.degrees
    }

    pub fn polys(&self) -> &[HomoPoly] {
        &self.polys
    }

    pub fn num_equations(&self) -> usize {
        self.polys.len()
    }

    pub fn num_vars(&self) -> usize {
        self.polys.len() + 1
    }

    fn check_point(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                actual: z.len(),
            });
        }
        Ok(())
    }

    fn check_shape(&self, other: &PolySystem) -> Result<()> {
        if self.degrees != other.degrees {
            return Err(Error::ShapeMismatch(format!(
                "degree vectors {} and {} differ",
                self.degrees, other.degrees
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.check_point(z)?;
        let pw = Powers::new(z, self.degrees.max_degree());
        Ok(self.polys.iter().map(|p| p.eval_with(&pw)).collect())
    }

    /// The `n x (n+1)` Jacobian matrix at `z`.
    pub fn jacobian(&self, z: &[C64]) -> Result<DMatrix<C64>> {
        self.check_point(z)?;
        let pw = Powers::new(z, self.degrees.max_degree());
        Ok(self.jacobian_with(&pw))
    }

    /// Values and Jacobian sharing one power table.
    pub fn eval_jacobian(&self, z: &[C64]) -> Result<(Vec<C64>, DMatrix<C64>)> {
        self.check_point(z)?;
        let pw = Powers::new(z, self.degrees.max_degree());
        let vals = self.polys.iter().map(|p| p.eval_with(&pw)).collect();
        Ok((vals, self.jacobian_with(&pw)))
    }

    fn jacobian_with(&self, pw: &Powers) -> DMatrix<C64> {
        let n = self.polys.len();
        let mut jac = DMatrix::zeros(n, n + 1);
        let mut row = vec![ZERO; n + 1];
        for (i, p) in self.polys.iter().enumerate() {
            row.iter_mut().for_each(|r| *r = ZERO);
            p.accumulate_gradient(pw, ONE, &mut row);
            for (j, v) in row.iter().enumerate() {
                jac[(i, j)] = *v;
            }
        }
        jac
    }

    /// Sum of the componentwise Bombieri–Weyl products.
    pub fn bw_inner(&self, other: &PolySystem) -> Result<C64> {
        self.check_shape(other)?;
        let mut acc = ZERO;
        for (p, q) in self.polys.iter().zip(&other.polys) {
            acc += p.bw_inner(q)?;
        }
        Ok(acc)
    }

    pub fn bw_norm(&self) -> f64 {
        self.polys
            .iter()
            .map(HomoPoly::bw_norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// `h / ||h||`, a point of the unit sphere.
    pub fn normalize_to_sphere(&self) -> Result<PolySystem> {
        let nrm = self.bw_norm();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::ZeroSystem);
        }
        Ok(self.scale(C64::new(1.0 / nrm, 0.0)))
    }

    pub fn scale(&self, c: C64) -> PolySystem {
        PolySystem {
            degrees: self.degrees.clone(),
            polys: self.polys.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn lin_comb(&self, a: C64, other: &PolySystem, b: C64) -> Result<PolySystem> {
        self.check_shape(other)?;
        let polys = self
            .polys
            .iter()
            .zip(&other.polys)
            .map(|(p, q)| p.lin_comb(a, q, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolySystem {
            degrees: self.degrees.clone(),
            polys,
        })
    }

    /// Largest coefficient-wise modulus of `self - other`.
    pub fn max_coeff_diff(&self, other: &PolySystem) -> Result<f64> {
        let diff = self.lin_comb(ONE, other, -ONE)?;
        Ok(diff
            .polys
            .iter()
            .flat_map(|p| p.coeffs.values().map(|c| c.norm()))
            .fold(0.0, f64::max))
    }
}

/// Bombieri–Weyl reproducing kernel `K_z(X) = <X, z>^l`, satisfying
/// `<p, K_z> = p(z)` for every `p` of degree `l`. Requires `||z|| = 1`.
pub fn kernel_poly(z: &[C64], degree: u32) -> Result<HomoPoly> {
    let nrm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(nrm));
    }
    let zc: Vec<C64> = z.iter().map(|c| c.conj()).collect();
    let pw = Powers::new(&zc, degree);
    let mut p = HomoPoly::zero(degree, z.len());
    for alpha in monomials(degree, z.len()) {
        let mut c = C64::new(alpha.multinomial(), 0.0);
        for (j, &a) in alpha.exponents().iter().enumerate() {
            c *= pw.get(j, a);
        }
        p.coeffs.insert(alpha, c);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn r(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sys(polys: Vec<HomoPoly>) -> PolySystem {
        PolySystem::new(polys).unwrap()
    }

    fn random_poly(rng: &mut ChaCha8Rng, degree: u32, num_vars: usize) -> HomoPoly {
        HomoPoly::from_terms(
            degree,
            num_vars,
            monomials(degree, num_vars).into_iter().map(|a| {
                (
                    a.0,
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                )
            }),
        )
        .unwrap()
    }

    fn random_system(rng: &mut ChaCha8Rng, degrees: &[u32]) -> PolySystem {
        let n = degrees.len();
        sys(degrees
            .iter()
            .map(|&d| random_poly(rng, d, n + 1))
            .collect())
    }

    fn random_point(rng: &mut ChaCha8Rng, len: usize) -> Vec<C64> {
        (0..len)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn quartic_diff() -> PolySystem {
        sys(vec![HomoPoly::from_terms(
            4,
            2,
            [(vec![0, 4], r(1.0)), (vec![4, 0], r(-1.0))],
        )
        .unwrap()])
    }

    #[test]
    fn evaluate_examples() {
        let q = sys(vec![HomoPoly::from_terms(
            2,
            2,
            [(vec![0, 2], r(1.0)), (vec![2, 0], r(-1.0))],
        )
        .unwrap()]);
        assert_eq!(q.evaluate(&[r(1.0), r(1.0)]).unwrap(), vec![r(0.0)]);

        let good = sys(vec![HomoPoly::from_terms(
            2,
            2,
            [(vec![1, 1], r(2f64.sqrt()))],
        )
        .unwrap()]);
        assert_eq!(good.evaluate(&[r(1.0), r(0.0)]).unwrap(), vec![r(0.0)]);

        assert_eq!(
            quartic_diff().evaluate(&[r(1.0), r(2.0)]).unwrap(),
            vec![r(15.0)]
        );
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        let err = quartic_diff().evaluate(&[r(1.0)]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                actual: 1
            }
        );
        assert!(quartic_diff().jacobian(&[r(1.0); 3]).is_err());
    }

    #[test]
    fn jacobian_examples() {
        let q = sys(vec![HomoPoly::from_terms(
            2,
            2,
            [(vec![0, 2], r(1.0)), (vec![2, 0], r(-1.0))],
        )
        .unwrap()]);
        let j = q.jacobian(&[r(1.0), r(1.0)]).unwrap();
        assert_eq!((j[(0, 0)], j[(0, 1)]), (r(-2.0), r(2.0)));

        let good = sys(vec![HomoPoly::from_terms(
            2,
            2,
            [(vec![1, 1], r(2f64.sqrt()))],
        )
        .unwrap()]);
        let j = good.jacobian(&[r(1.0), r(0.0)]).unwrap();
        assert_eq!((j[(0, 0)], j[(0, 1)]), (r(0.0), r(2f64.sqrt())));
    }

    #[test]
    fn euler_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for degrees in [vec![3], vec![2, 2], vec![1, 3, 2]] {
            for _ in 0..10 {
                let h = random_system(&mut rng, &degrees);
                let z = random_point(&mut rng, h.num_vars());
                let (vals, jac) = h.eval_jacobian(&z).unwrap();
                for i in 0..h.num_equations() {
                    let lhs: C64 = (0..h.num_vars()).map(|j| jac[(i, j)] * z[j]).sum();
                    let rhs = vals[i] * degrees[i] as f64;
                    assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let eps = 1e-6;
        for degrees in [vec![4], vec![2, 3]] {
            for _ in 0..10 {
                let h = random_system(&mut rng, &degrees);
                let z = random_point(&mut rng, h.num_vars());
                let u = random_point(&mut rng, h.num_vars());
                let plus: Vec<C64> = z.iter().zip(&u).map(|(a, b)| a + b * eps).collect();
                let minus: Vec<C64> = z.iter().zip(&u).map(|(a, b)| a - b * eps).collect();
                let fp = h.evaluate(&plus).unwrap();
                let fm = h.evaluate(&minus).unwrap();
                let jac = h.jacobian(&z).unwrap();
                for i in 0..h.num_equations() {
                    let fd = (fp[i] - fm[i]) / (2.0 * eps);
                    let exact: C64 = (0..h.num_vars()).map(|j| jac[(i, j)] * u[j]).sum();
                    assert!((fd - exact).norm() <= 1e-5 * exact.norm().max(1e-3));
                }
            }
        }
    }

    #[test]
    fn bw_inner_examples() {
        let x0sq = HomoPoly::from_terms(2, 2, [(vec![2, 0], ONE)]).unwrap();
        let x1sq = HomoPoly::from_terms(2, 2, [(vec![0, 2], ONE)]).unwrap();
        let x0x1 = HomoPoly::from_terms(2, 2, [(vec![1, 1], ONE)]).unwrap();
        assert_eq!(x0sq.bw_inner(&x0sq).unwrap(), ONE);
        assert_eq!(x0x1.bw_inner(&x0x1).unwrap(), r(0.5));
        assert_eq!(x0sq.bw_inner(&x1sq).unwrap(), ZERO);
        let cubic = HomoPoly::zero(3, 2);
        assert!(x0sq.bw_inner(&cubic).is_err());
    }

    #[test]
    fn bw_norm_examples() {
        assert!((quartic_diff().bw_norm() - 2f64.sqrt()).abs() < 1e-15);
        let fekete_like = sys(vec![HomoPoly::from_terms(
            4,
            2,
            [(vec![0, 4], ONE), (vec![3, 1], r(-2.0 * 2f64.sqrt()))],
        )
        .unwrap()]);
        assert!((fekete_like.bw_norm() - 3f64.sqrt()).abs() < 1e-15);
        let good = sys(vec![HomoPoly::from_terms(
            2,
            2,
            [(vec![1, 1], r(2f64.sqrt()))],
        )
        .unwrap()]);
        assert!((good.bw_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_examples() {
        let good = sys(vec![HomoPoly::from_terms(
            2,
            2,
            [(vec![1, 1], r(2f64.sqrt()))],
        )
        .unwrap()]);
        let n = good.normalize_to_sphere().unwrap();
        assert!(n.max_coeff_diff(&good).unwrap() < 1e-15);

        let q = quartic_diff().normalize_to_sphere().unwrap();
        let expected = quartic_diff().scale(r(1.0 / 2f64.sqrt()));
        assert!(q.max_coeff_diff(&expected).unwrap() < 1e-15);
        assert!((q.bw_norm() - 1.0).abs() < 1e-14);

        let scaled = quartic_diff().scale(r(37.5)).normalize_to_sphere().unwrap();
        assert!(scaled.max_coeff_diff(&q).unwrap() < 1e-15);

        let zero = sys(vec![HomoPoly::zero(2, 2)]);
        assert_eq!(zero.normalize_to_sphere().unwrap_err(), Error::ZeroSystem);
    }

    #[test]
    fn bezout_examples() {
        assert_eq!(bezout_number(&DegreeVector::new(vec![2, 2]).unwrap()), 4);
        assert_eq!(bezout_number(&DegreeVector::new(vec![4]).unwrap()), 4);
        assert_eq!(bezout_number(&DegreeVector::new(vec![4, 4]).unwrap()), 16);
        assert!(DegreeVector::new(vec![]).is_err());
        assert!(DegreeVector::new(vec![2, 0]).is_err());
    }

    #[test]
    fn multi_index_validation() {
        assert!(HomoPoly::from_terms(2, 2, [(vec![1, 2], ONE)]).is_err());
        assert!(HomoPoly::from_terms(2, 2, [(vec![2, 0, 0], ONE)]).is_err());
        assert!(HomoPoly::from_terms(2, 2, [(vec![2, 0], c(f64::NAN, 0.0))]).is_err());
        assert_eq!(MultiIndex::new(vec![1, 1, 2]).multinomial(), 12.0);
        assert_eq!(monomials(3, 3).len(), 10);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_poly(&[ONE, ZERO], 2).unwrap();
        let x0sq = HomoPoly::from_terms(2, 2, [(vec![2, 0], ONE)]).unwrap();
        assert_eq!(k.lin_comb(ONE, &x0sq, -ONE).unwrap().bw_norm_sqr(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x0x1 = HomoPoly::from_terms(2, 2, [(vec![1, 1], ONE)]).unwrap();
        for _ in 0..20 {
            let mut z = random_point(&mut rng, 2);
            let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            z.iter_mut().for_each(|c| *c /= n);
            let k = kernel_poly(&z, 2).unwrap();
            let lhs = x0x1.bw_inner(&k).unwrap();
            assert!((lhs - x0x1.evaluate(&z).unwrap()).norm() < 1e-14);
            assert!((k.bw_norm_sqr().sqrt() - 1.0).abs() < 1e-14);

            let k3 = kernel_poly(&z, 5).unwrap();
            let p = random_poly(&mut rng, 5, 2);
            assert!((p.bw_inner(&k3).unwrap() - p.evaluate(&z).unwrap()).norm() < 1e-12);
        }
        assert!(matches!(
            kernel_poly(&[r(2.0), ZERO], 2),
            Err(Error::NotUnit(_))
        ));
    }

    #[test]
    fn bw_product_is_conjugate_symmetric_and_sesquilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let v = random_system(&mut rng, &[2, 3]);
            let w = random_system(&mut rng, &[2, 3]);
            let u = random_system(&mut rng, &[2, 3]);
            let a = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let vw = v.bw_inner(&w).unwrap();
            assert!((vw - w.bw_inner(&v).unwrap().conj()).norm() < 1e-12);
            let lhs = v.lin_comb(a, &u, ONE).unwrap().bw_inner(&w).unwrap();
            let rhs = a * vw + u.bw_inner(&w).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            let lhs = w.bw_inner(&v.scale(a)).unwrap();
            assert!((lhs - a.conj() * w.bw_inner(&v).unwrap()).norm() < 1e-12);
        }
    }

    /// Expands `p(U x)` for a binary form `p` by multiplying out linear forms.
    /// Dense binary forms are stored by the power of `X_1`.
    fn substitute_binary(p: &HomoPoly, u: [[C64; 2]; 2]) -> HomoPoly {
        let l = p.degree() as usize;
        let mul = |a: &[C64], b: &[C64]| {
            let mut out = vec![ZERO; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        };
        // New X_0 = u00 x0 + u01 x1, new X_1 = u10 x0 + u11 x1.
        let lin0 = [u[0][0], u[0][1]];
        let lin1 = [u[1][0], u[1][1]];
        let mut acc = vec![ZERO; l + 1];
        for (alpha, coeff) in p.terms() {
            let mut prod = vec![*coeff];
            for _ in 0..alpha.exponents()[0] {
                prod = mul(&prod, &lin0);
            }
            for _ in 0..alpha.exponents()[1] {
                prod = mul(&prod, &lin1);
            }
            for (k, v) in prod.into_iter().enumerate() {
                acc[k] += v;
            }
        }
        HomoPoly::from_terms(
            p.degree(),
            2,
            acc.into_iter()
                .enumerate()
                .map(|(k, v)| (vec![(l - k) as u32, k as u32], v)),
        )
        .unwrap()
    }

    #[test]
    fn bw_norm_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for degree in 1..=4 {
            for _ in 0..10 {
                let theta: f64 = rng.random_range(0.0..6.3);
                let a: f64 = rng.random_range(0.0..6.3);
                let b: f64 = rng.random_range(0.0..6.3);
                let ph: f64 = rng.random_range(0.0..6.3);
                let (ct, st) = (theta.cos(), theta.sin());
                let e = |x: f64| C64::from_polar(1.0, x);
                let u = [[e(a) * ct, e(b) * st], [-e(ph - b) * st, e(ph - a) * ct]];
                let p = random_poly(&mut rng, degree, 2);
                let q = substitute_binary(&p, u);
                assert!((p.bw_norm_sqr().sqrt() - q.bw_norm_sqr().sqrt()).abs() < 1e-10);
            }
        }
    }
}
