//! Homogeneous polynomials with the Bessel operator applied symbolically.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::grid::GammaIndex;

/// Homogeneous polynomial `sum a_alpha x^alpha` of degree `k` in `n`
/// variables. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenPoly {
    n: usize,
    degree: u32,
    coeffs: BTreeMap<Vec<u32>, f64>,
}

#[derive(Serialize, Deserialize)]
struct Term {
    alpha: Vec<u32>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct Literal {
    n: usize,
    k: u32,
    terms: Vec<Term>,
}

impl EvenPoly {
    pub fn zero(n: usize, degree: u32) -> Self {
        Self { n, degree, coeffs: BTreeMap::new() }
    }

    /// Builds a polynomial from `(alpha, coefficient)` pairs, merging repeats.
    pub fn new(n: usize, degree: u32, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("polynomial needs at least one variable".into()));
        }
        let mut p = Self::zero(n, degree);
        for (alpha, c) in terms {
            check_dim(n, alpha.len())?;
            let d: u32 = alpha.iter().sum();
            if d != degree {
                return Err(Error::InvalidArgument(format!(
                    "monomial {alpha:?} has degree {d}, expected {degree}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient {c} is not finite")));
            }
            *p.coeffs.entry(alpha).or_insert(0.0) += c;
        }
        p.coeffs.retain(|_, c| *c != 0.0);
        Ok(p)
    }

    /// `|x|^2 = x_1^2 + ... + x_n^2`.
    pub fn norm_squared(n: usize) -> Self {
        let terms = (0..n).map(|i| {
            let mut a = vec![0; n];
            a[i] = 2;
            (a, 1.0)
        });
        Self::new(n, 2, terms).expect("valid terms")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.coeffs.iter().map(|(a, c)| (a.as_slice(), *c))
    }

    pub fn coefficient(&self, alpha: &[u32]) -> f64 {
        self.coeffs.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when every exponent of every stored monomial is even.
    pub fn is_even(&self) -> bool {
        self.coeffs.keys().all(|a| a.iter().all(|e| e % 2 == 0))
    }

    /// Constant term; nonzero only for degree 0.
    pub fn value_at_origin(&self) -> f64 {
        if self.degree == 0 {
            self.coefficient(&vec![0; self.n])
        } else {
            0.0
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let terms = self.coeffs.iter().map(|(a, c)| (a.clone(), c * s));
        Self::new(self.n, self.degree, terms).expect("same shape")
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.n, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(a, c)| c * a.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product::<f64>())
            .sum()
    }

    /// The symbol of `P(B_1, ..., B_n)`: substitutes `x_i^2 -> -xi_i^2`.
    pub fn bessel_symbol(&self, xi: &[f64]) -> Result<f64> {
        check_dim(self.n, xi.len())?;
        if !self.is_even() {
            return Err(Error::InvalidArgument(
                "P(B) is only defined for polynomials in x_i^2".into(),
            ));
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(a, c)| {
                c * a
                    .iter()
                    .zip(xi)
                    .map(|(&e, &v)| (-v * v).powi(e as i32 / 2))
                    .product::<f64>()
            })
            .sum())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let lit: Literal = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Self::new(lit.n, lit.k, lit.terms.into_iter().map(|t| (t.alpha, t.c)))
    }

    pub fn to_json(&self) -> String {
        let lit = Literal {
            n: self.n,
            k: self.degree,
            terms: self.coeffs.iter().map(|(a, c)| Term { alpha: a.clone(), c: *c }).collect(),
        };
        serde_json::to_string(&lit).expect("serializable")
    }
}

pub fn eval_poly(p: &EvenPoly, x: &[f64]) -> Result<f64> {
    p.eval(x)
}

/// Exact image of `p` under `B = sum_i [d_i^2 + (2 gamma_i / x_i) d_i]`.
pub fn apply_bessel(p: &EvenPoly, gamma: &GammaIndex) -> Result<EvenPoly> {
    check_dim(p.n, gamma.n())?;
    let g = gamma.values();
    if p.degree < 2 {
        if let Some((a, _)) = p.coeffs.iter().find(|(a, _)| a.contains(&1)) {
            return Err(Error::NonPolynomial(format!("B x^{a:?} has a 1/x term")));
        }
        return Ok(EvenPoly::zero(p.n, 0));
    }
    let mut terms = Vec::new();
    for (a, &c) in &p.coeffs {
        for i in 0..p.n {
            match a[i] {
                0 => {}
                1 => {
                    return Err(Error::NonPolynomial(format!(
                        "B x^{a:?} has a 1/x_{} term",
                        i + 1
                    )))
                }
                e => {
                    let mut b = a.clone();
                    b[i] -= 2;
                    let e = e as f64;
                    terms.push((b, c * e * (e - 1.0 + 2.0 * g[i])));
                }
            }
        }
    }
    EvenPoly::new(p.n, p.degree - 2, terms)
}

/// Classical Laplacian of `p`.
pub fn apply_laplacian(p: &EvenPoly) -> EvenPoly {
    if p.degree < 2 {
        return EvenPoly::zero(p.n, 0);
    }
    let mut terms = Vec::new();
    for (a, &c) in &p.coeffs {
        for i in 0..p.n {
            if a[i] >= 2 {
                let mut b = a.clone();
                b[i] -= 2;
                let e = a[i] as f64;
                terms.push((b, c * e * (e - 1.0)));
            }
        }
    }
    EvenPoly::new(p.n, p.degree - 2, terms).expect("same shape")
}

/// All multi-indices of `n` entries summing to `total`, in lexicographic
/// order with the first entry largest first.
fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n - 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            go(n, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, total, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Tries to write `x` as `p/q` with a small denominator, exactly in f64.
fn small_rational(x: f64) -> Option<BigRational> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..20 {
        let a = r.floor();
        if a.abs() > 1e9 {
            return None;
        }
        let a = a as i64;
        (h0, h1) = (h1, a.checked_mul(h1)?.checked_add(h0)?);
        (k0, k1) = (k1, a.checked_mul(k1)?.checked_add(k0)?);
        if k1 > 10_000 {
            return None;
        }
        if h1 as f64 / k1 as f64 == x {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Null space of an exact rational matrix (`rows x cols`), each vector scaled
/// to coprime integers with a positive leading entry.
fn rational_null_space(mut m: Vec<Vec<BigRational>>, cols: usize) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from(lcm.clone())).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            let lead_neg = ints.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
            ints.into_iter()
                .map(|x| {
                    let y = x / &g;
                    if lead_neg {
                        -y
                    } else {
                        y
                    }
                })
                .collect()
        })
        .collect()
}

/// Null space by SVD, threshold `1e-12 * sigma_max`; vectors scaled so the
/// largest entry is 1.
fn float_null_space(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let cols = m.ncols();
    // pad to square so the SVD returns a full right basis
    let mut sq = DMatrix::zeros(cols.max(m.nrows()), cols);
    sq.rows_mut(0, m.nrows()).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-12 * smax.max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= tol {
            let row: Vec<f64> = vt.row(i).iter().copied().collect();
            let big = row.iter().cloned().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
            out.push(row.iter().map(|v| v / big).collect());
        }
    }
    out
}

/// Basis of B-harmonic polynomials of even degree `k` built from even
/// monomials only.
pub fn b_harmonic_basis(n: usize, k: u32, gamma: &GammaIndex) -> Result<Vec<EvenPoly>> {
    check_dim(n, gamma.n())?;
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidArgument(format!("degree must be even and at least 2, got {k}")));
    }
    let domain: Vec<Vec<u32>> =
        compositions(n, k / 2).into_iter().map(|b| b.iter().map(|e| 2 * e).collect()).collect();
    let range: Vec<Vec<u32>> =
        compositions(n, k / 2 - 1).into_iter().map(|b| b.iter().map(|e| 2 * e).collect()).collect();
    let row_of = |a: &[u32]| range.iter().position(|r| r.as_slice() == a).expect("even image");

    let exact: Option<Vec<BigRational>> = gamma.values().iter().map(|&g| small_rational(g)).collect();
    let vectors: Vec<Vec<f64>> = if let Some(g) = exact {
        let mut m = vec![vec![BigRational::zero(); domain.len()]; range.len()];
        for (col, a) in domain.iter().enumerate() {
            for i in 0..n {
                if a[i] >= 2 {
                    let mut b = a.clone();
                    b[i] -= 2;
                    let e = BigRational::from(BigInt::from(a[i]));
                    let two = BigRational::from(BigInt::from(2));
                    m[row_of(&b)][col] += &e * (&e - BigRational::one() + &two * &g[i]);
                }
            }
        }
        rational_null_space(m, domain.len())
            .into_iter()
            .map(|v| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    } else {
        let g = gamma.values();
        let mut m = DMatrix::zeros(range.len(), domain.len());
        for (col, a) in domain.iter().enumerate() {
            for i in 0..n {
                if a[i] >= 2 {
                    let mut b = a.clone();
                    b[i] -= 2;
                    let e = a[i] as f64;
                    m[(row_of(&b), col)] += e * (e - 1.0 + 2.0 * g[i]);
                }
            }
        }
        float_null_space(&m)
    };
    vectors
        .into_iter()
        .map(|v| EvenPoly::new(n, k, domain.iter().cloned().zip(v)))
        .collect()
}

/// Basis of classical harmonic polynomials (`Delta P = 0`) of any degree,
/// including odd monomials. Used only for the experimental first-order
/// transforms.
pub fn classical_harmonic_basis(n: usize, k: u32) -> Result<Vec<EvenPoly>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one variable".into()));
    }
    let domain = compositions(n, k);
    if k < 2 {
        return domain
            .into_iter()
            .map(|a| EvenPoly::new(n, k, [(a, 1.0)]))
            .collect();
    }
    let range = compositions(n, k - 2);
    let mut m = vec![vec![BigRational::zero(); domain.len()]; range.len()];
    for (col, a) in domain.iter().enumerate() {
        for i in 0..n {
            if a[i] >= 2 {
                let mut b = a.clone();
                b[i] -= 2;
                let row = range.iter().position(|r| *r == b).expect("image");
                m[row][col] += BigRational::from(BigInt::from(a[i] * (a[i] - 1)));
            }
        }
    }
    rational_null_space(m, domain.len())
        .into_iter()
        .map(|v| {
            EvenPoly::new(n, k, domain.iter().cloned().zip(v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN))))
        })
        .collect()
}

/// Radical inverse of `i` in the given prime base.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Halton sample of unit vectors, mapped through hyperspherical
/// angles. For polynomials in `x_i^2` this covers the positive hemisphere.
pub fn sphere_sample(n: usize, samples: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let mut out = Vec::with_capacity(samples + 2 * n);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        out.push(e);
    }
    for s in 1..=samples as u64 {
        let mut theta = vec![0.0; n];
        let mut sin_prod = 1.0;
        for j in 0..n - 1 {
            let u = radical_inverse(s, PRIMES[j % PRIMES.len()]);
            let phi = if j == n - 2 { 2.0 * std::f64::consts::PI * u } else { std::f64::consts::PI * u };
            theta[j] = sin_prod * phi.cos();
            sin_prod *= phi.sin();
        }
        theta[n - 1] = sin_prod;
        out.push(theta);
    }
    out
}

/// Sampled ellipticity test: false on a sign change or when `min |P|` over
/// the sample is at most `1e-9`. A sufficient check, not a proof.
pub fn is_elliptic(p: &EvenPoly, samples: usize) -> Result<bool> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {samples}")));
    }
    if p.is_zero() {
        return Ok(false);
    }
    let mut min_abs = f64::INFINITY;
    let (mut pos, mut neg) = (false, false);
    for t in sphere_sample(p.n, samples) {
        let v = p.eval_unchecked(&t);
        min_abs = min_abs.min(v.abs());
        pos |= v > 0.0;
        neg |= v < 0.0;
    }
    Ok(!(pos && neg) && min_abs > 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: &[f64]) -> GammaIndex {
        GammaIndex::new(v.to_vec()).unwrap()
    }

    fn worked() -> EvenPoly {
        EvenPoly::new(2, 2, [(vec![2, 0], 4.0), (vec![0, 2], -2.0)]).unwrap()
    }

    #[test]
    fn evaluation() {
        let x1sq = EvenPoly::new(2, 2, [(vec![2, 0], 1.0)]).unwrap();
        assert_eq!(x1sq.eval(&[2.0, 3.0]).unwrap(), 4.0);
        assert_eq!(worked().eval(&[1.0, 1.0]).unwrap(), 2.0);
        let p = EvenPoly::new(2, 4, [(vec![2, 2], 1.0)]).unwrap();
        assert_eq!(p.eval(&[2.0, 0.5]).unwrap(), 1.0);
        assert!(p.eval(&[1.0]).is_err());
    }

    #[test]
    fn bessel_images() {
        let x1sq = EvenPoly::new(1, 2, [(vec![2], 1.0)]).unwrap();
        let b = apply_bessel(&x1sq, &g(&[0.5])).unwrap();
        assert_eq!(b.degree(), 0);
        assert_eq!(b.value_at_origin(), 4.0);
        assert!(apply_bessel(&worked(), &g(&[0.5, 1.5])).unwrap().is_zero());
        let r2 = EvenPoly::norm_squared(2);
        assert_eq!(apply_bessel(&r2, &g(&[0.5, 1.5])).unwrap().value_at_origin(), 12.0);
    }

    #[test]
    fn odd_exponents_are_rejected() {
        let p = EvenPoly::new(2, 2, [(vec![1, 1], 1.0)]).unwrap();
        assert!(matches!(apply_bessel(&p, &g(&[0.5, 0.5])), Err(Error::NonPolynomial(_))));
        let x = EvenPoly::new(1, 1, [(vec![1], 1.0)]).unwrap();
        assert!(apply_bessel(&x, &g(&[0.5])).is_err());
    }

    #[test]
    fn basis_examples() {
        let b = b_harmonic_basis(2, 2, &g(&[0.5, 1.5])).unwrap();
        assert_eq!(b.len(), 1);
        // proportional to 4 x1^2 - 2 x2^2
        let r = b[0].coefficient(&[2, 0]) / b[0].coefficient(&[0, 2]);
        assert_eq!(r, -2.0);
        assert!(b_harmonic_basis(1, 2, &g(&[0.5])).unwrap().is_empty());
        let b4 = b_harmonic_basis(2, 4, &g(&[0.5, 0.5])).unwrap();
        assert_eq!(b4.len(), 1);
        assert!(apply_bessel(&b4[0], &g(&[0.5, 0.5])).unwrap().is_zero());
        assert!(b_harmonic_basis(2, 3, &g(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn irrational_gamma_uses_svd() {
        let gm = g(&[std::f64::consts::SQRT_2, std::f64::consts::E]);
        let b = b_harmonic_basis(2, 4, &gm).unwrap();
        assert_eq!(b.len(), 1);
        for (_, c) in apply_bessel(&b[0], &gm).unwrap().terms() {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn three_variable_kernel_dimension() {
        // even monomials of degree 4 in 3 variables: 6, images of degree 2: 3
        let b = b_harmonic_basis(3, 4, &g(&[0.5, 1.0, 1.5])).unwrap();
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn classical_basis() {
        assert_eq!(classical_harmonic_basis(2, 1).unwrap().len(), 2);
        let b = classical_harmonic_basis(2, 3).unwrap();
        assert_eq!(b.len(), 2);
        for p in &b {
            assert!(apply_laplacian(p).is_zero());
        }
    }

    #[test]
    fn ellipticity() {
        assert!(is_elliptic(&EvenPoly::norm_squared(2), 256).unwrap());
        assert!(!is_elliptic(&worked(), 256).unwrap());
        let q = EvenPoly::new(2, 4, [(vec![4, 0], 1.0), (vec![0, 4], 1.0)]).unwrap();
        assert!(is_elliptic(&q, 256).unwrap());
        assert!(is_elliptic(&q, 10).is_err());
    }

    #[test]
    fn bessel_symbol_reads_x_squared_as_minus_xi_squared() {
        let r2 = EvenPoly::norm_squared(2);
        assert_eq!(r2.bessel_symbol(&[1.0, 2.0]).unwrap(), -5.0);
        let q = EvenPoly::new(2, 4, [(vec![4, 0], 1.0)]).unwrap();
        assert_eq!(q.bessel_symbol(&[3.0, 0.0]).unwrap(), 81.0);
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"n":2,"k":2,"terms":[{"alpha":[2,0],"c":4.0},{"alpha":[0,2],"c":-2.0}]}"#;
        let p = EvenPoly::from_json(s).unwrap();
        assert_eq!(p, worked());
        assert_eq!(EvenPoly::from_json(&p.to_json()).unwrap(), p);
        assert!(EvenPoly::from_json(r#"{"n":2,"k":2,"terms":[{"alpha":[2,1],"c":1.0}]}"#).is_err());
    }
}
