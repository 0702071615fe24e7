//! The classical side for `K = SU(n)`: cotangent points `(x, ξ) ∈ K × k`,
//! the polar map, the momentum map and its zero set, torus normal forms,
//! regularity tests, the adjoint contraction determinant and orientation
//! signs of normalizer elements.
//!
//! Conventions: `⟨X, Y⟩ = −tr(XY)` on `su(n)`; a diagonal element is
//! `H = i·diag(θ)` with `Σθ = 0`, and the root `α_jk` pairs with it as
//! `θ_j − θ_k`. A normal form `(θ₁, θ₂)` stands for `x = exp(i·diag θ₁)`,
//! `ξ = i·diag θ₂` and the torus point `z = x·e^{−iξ} = diag(e^{iθ₁ + θ₂})`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{sigma_product, TorusPointC};
use crate::roots::{build_root_system, RootSystem, Weight};

pub type CMatrix = DMatrix<Complex64>;

/// Largest supported matrix size.
pub const MAX_N: usize = 8;
/// Tolerance on the cotangent-point invariants.
pub const POINT_TOL: f64 = 1e-10;
/// Largest momentum norm accepted as zero.
pub const ZERO_SET_TOL: f64 = 1e-8;
/// Eigenvalues of `x` closer than this share a cluster.
pub const CLUSTER_GAP: f64 = 1e-8;
/// Regularity threshold on `|φ_α(z) − 1|`.
pub const EPS_REG: f64 = 1e-9;
/// Tolerance for `Ad_y` preserving the diagonal torus.
pub const NORMALIZER_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "matrix size {n} outside 2..={MAX_N}"
        )));
    }
    Ok(())
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let mut s = 0.0;
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            if j != k {
                s += m[(j, k)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn diag_from(v: impl Iterator<Item = Complex64>) -> CMatrix {
    let v: Vec<Complex64> = v.collect();
    let n = v.len();
    let mut m = CMatrix::zeros(n, n);
    for (j, z) in v.into_iter().enumerate() {
        m[(j, j)] = z;
    }
    m
}

/// `exp` of a Hermitian matrix through its eigendecomposition.
fn exp_hermitian(h: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let d = diag_from(eig.eigenvalues.iter().map(|l| c(l.exp())));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// A point `(x, ξ)` of `T*SU(n) ≅ SU(n) × su(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CotangentPoint {
    x: CMatrix,
    xi: CMatrix,
}

impl CotangentPoint {
    pub fn new(x: CMatrix, xi: CMatrix) -> Result<Self> {
        let n = x.nrows();
        check_n(n)?;
        if !x.is_square() || xi.shape() != (n, n) {
            return Err(Error::InvalidCotangentPoint("shape".into()));
        }
        let unit = frob(&(x.adjoint() * &x - CMatrix::identity(n, n)));
        if unit > POINT_TOL {
            return Err(Error::InvalidCotangentPoint(format!(
                "x not unitary ({unit:e})"
            )));
        }
        let det = (x.determinant() - c(1.0)).norm();
        if det > POINT_TOL {
            return Err(Error::InvalidCotangentPoint(format!(
                "det x differs from 1 ({det:e})"
            )));
        }
        let skew = frob(&(&xi + xi.adjoint()));
        if skew > POINT_TOL {
            return Err(Error::InvalidCotangentPoint(format!(
                "xi not skew-Hermitian ({skew:e})"
            )));
        }
        let tr = xi.trace().norm();
        if tr > POINT_TOL {
            return Err(Error::InvalidCotangentPoint(format!(
                "xi not traceless ({tr:e})"
            )));
        }
        Ok(CotangentPoint { x, xi })
    }

    /// The torus point with angles `θ₁` and `θ₂`, each summing to zero.
    pub fn from_torus(theta1: &[f64], theta2: &[f64]) -> Result<Self> {
        if theta1.len() != theta2.len() {
            return Err(Error::DimensionMismatch {
                expected: theta1.len(),
                got: theta2.len(),
            });
        }
        let x = diag_from(theta1.iter().map(|t| Complex64::from_polar(1.0, *t)));
        let xi = diag_from(theta2.iter().map(|t| I * *t));
        CotangentPoint::new(x, xi)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &CMatrix {
        &self.x
    }

    pub fn xi(&self) -> &CMatrix {
        &self.xi
    }

    /// The adjoint action `y·(x, ξ) = (y x y*, y ξ y*)`.
    pub fn conjugated_by(&self, y: &CMatrix) -> Result<Self> {
        let ya = y.adjoint();
        CotangentPoint::new(y * &self.x * &ya, y * &self.xi * &ya)
    }
}

/// `g = x·exp(−iξ) ∈ SL(n, ℂ)`.
pub fn polar_embed(p: &CotangentPoint) -> CMatrix {
    let h = p.xi.map(|z| -I * z);
    &p.x * exp_hermitian(&h)
}

/// `φ(x, ξ) = x ξ x⁻¹ − ξ`.
pub fn momentum(p: &CotangentPoint) -> CMatrix {
    &p.x * &p.xi * p.x.adjoint() - &p.xi
}

/// Haar-random element of `SU(n)`: QR of a complex Ginibre matrix with
/// the phases of `R` moved into `Q`, then the determinant divided out.
pub fn random_su<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for j in 0..n {
            q[(j, k)] *= ph;
        }
    }
    let det = q.determinant();
    let root = Complex64::from_polar(1.0, -det.arg() / n as f64);
    q * root
}

/// Angles summing to zero, uniform in each coordinate before centering.
pub fn random_angles<R: Rng + ?Sized>(n: usize, rng: &mut R, scale: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| scale * (2.0 * rng.random::<f64>() - 1.0)).collect();
    center(v)
}

fn center(mut v: Vec<f64>) -> Vec<f64> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for t in v.iter_mut() {
        *t -= mean;
    }
    v
}

/// Dictionary between diagonal `su(n)` data and `A_{n−1}` coordinates.
#[derive(Clone, Debug)]
pub struct SuDictionary {
    n: usize,
    rs: RootSystem,
}

pub fn weight_dictionary(n: usize) -> Result<SuDictionary> {
    check_n(n)?;
    Ok(SuDictionary {
        n,
        rs: build_root_system("A", n - 1)?,
    })
}

impl SuDictionary {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    /// `i·diag(θ)`.
    pub fn diag_element(&self, theta: &[f64]) -> CMatrix {
        diag_from(theta.iter().map(|t| I * *t))
    }

    /// The coroot of `α_jk` inside `su(n)`.
    pub fn root_element(&self, j: usize, k: usize) -> CMatrix {
        let mut theta = vec![0.0; self.n];
        theta[j] = 1.0;
        theta[k] = -1.0;
        self.diag_element(&theta)
    }

    /// `⟨X, Y⟩ = −Re tr(XY)`.
    pub fn pairing(&self, x: &CMatrix, y: &CMatrix) -> f64 {
        -(x * y).trace().re
    }

    /// `H = i·diag(θ)` as a weight: `Σ_j (θ_j − θ_{j+1}) ϖ_j`.
    pub fn theta_to_weight(&self, theta: &[f64]) -> Weight {
        let mut v = Weight::zeros(self.n - 1);
        for (j, fw) in self.rs.fundamental_weights().iter().enumerate() {
            v = &v + &(fw * (theta[j] - theta[j + 1]));
        }
        v
    }

    /// Inverse of [`SuDictionary::theta_to_weight`] on trace-zero angles.
    pub fn weight_to_theta(&self, v: &Weight) -> Vec<f64> {
        let mut theta = vec![0.0; self.n];
        for (j, a) in self.rs.simple_roots().iter().enumerate() {
            theta[j + 1] = theta[j] - a.dot(v);
        }
        center(theta)
    }

    /// Torus point of a normal form.
    pub fn torus_point(&self, theta1: &[f64], theta2: &[f64]) -> TorusPointC {
        TorusPointC {
            h1: self.theta_to_weight(theta1),
            h2: self.theta_to_weight(theta2),
        }
    }

    /// Diagonal entries of `z = e^{H₁}e^{−iH₂}` in `SL(n, ℂ)`.
    pub fn torus_diagonal(&self, z: &TorusPointC) -> Vec<Complex64> {
        let t1 = self.weight_to_theta(&z.h1);
        let t2 = self.weight_to_theta(&z.h2);
        t1.iter()
            .zip(&t2)
            .map(|(a, b)| Complex64::from_polar(b.exp(), *a))
            .collect()
    }

    /// Orthonormal basis of the diagonal subalgebra `t`.
    pub fn torus_basis(&self) -> Vec<CMatrix> {
        (1..self.n)
            .map(|k| {
                let s = ((k * (k + 1)) as f64).sqrt();
                let mut theta = vec![0.0; self.n];
                for t in theta.iter_mut().take(k) {
                    *t = 1.0 / s;
                }
                theta[k] = -(k as f64) / s;
                self.diag_element(&theta)
            })
            .collect()
    }

    /// Orthonormal basis of `t^⊥`: `(E_jk − E_kj)/√2` and `i(E_jk + E_kj)/√2`
    /// for `j < k` in lexicographic order.
    pub fn orthocomplement_basis(&self) -> Vec<CMatrix> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = Vec::with_capacity(self.n * (self.n - 1));
        for j in 0..self.n {
            for k in j + 1..self.n {
                let mut a = CMatrix::zeros(self.n, self.n);
                a[(j, k)] = c(s);
                a[(k, j)] = c(-s);
                let mut b = CMatrix::zeros(self.n, self.n);
                b[(j, k)] = I * s;
                b[(k, j)] = I * s;
                out.push(a);
                out.push(b);
            }
        }
        out
    }
}

/// Conjugacy-class representative of a zero-set point.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusNormalForm {
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    /// `y` with `y x y*` and `y ξ y*` diagonal.
    pub conjugator: CMatrix,
}

impl TorusNormalForm {
    pub fn torus_point(&self, dict: &SuDictionary) -> TorusPointC {
        dict.torus_point(&self.theta1, &self.theta2)
    }

    /// `φ_α(z) = e^{i(θ₁_j − θ₁_k) + (θ₂_j − θ₂_k)}` for every ordered pair
    /// `j ≠ k`.
    pub fn root_values(&self) -> Vec<((usize, usize), Complex64)> {
        let n = self.theta1.len();
        let mut out = Vec::with_capacity(n * (n - 1));
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    let v = Complex64::new(
                        self.theta2[j] - self.theta2[k],
                        self.theta1[j] - self.theta1[k],
                    )
                    .exp();
                    out.push(((j, k), v));
                }
            }
        }
        out
    }
}

fn union_find_clusters(eigs: &[Complex64], gap: f64) -> Vec<Vec<usize>> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for a in 0..n {
        for b in a + 1..n {
            if (eigs[a] - eigs[b]).norm() <= gap {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(ci) => clusters[ci].push(i),
            None => {
                root_of[r] = Some(clusters.len());
                clusters.push(vec![i]);
            }
        }
    }
    clusters
}

/// Representatives in `(−π, π]`, shifted by `2π` so that they sum to zero.
fn balance_angles(mut t: Vec<f64>) -> Vec<f64> {
    let k = (t.iter().sum::<f64>() / (2.0 * PI)).round() as i64;
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[b].total_cmp(&t[a]).then(a.cmp(&b)));
    if k > 0 {
        for &i in order.iter().take(k as usize) {
            t[i] -= 2.0 * PI;
        }
    } else if k < 0 {
        for &i in order.iter().rev().take((-k) as usize) {
            t[i] += 2.0 * PI;
        }
    }
    t
}

/// Tolerance for treating two angles as tied in the canonical order.
const TIE_TOL: f64 = 1e-9;

/// Canonical order: `θ₂` descending, ties broken by `θ₁` descending.
fn canonical_order(theta1: &[f64], theta2: &[f64]) -> Vec<usize> {
    let n = theta1.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| theta2[b].total_cmp(&theta2[a]).then(a.cmp(&b)));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && theta2[order[end - 1]] - theta2[order[end]] <= TIE_TOL {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| theta1[b].total_cmp(&theta1[a]).then(a.cmp(&b)));
        start = end;
    }
    order
}

/// Simultaneous diagonalization of a zero-set point: eigenvectors of `x`
/// first, then of `ξ` inside each eigenvalue cluster of `x`.
pub fn conjugate_to_torus(p: &CotangentPoint) -> Result<TorusNormalForm> {
    let mom = frob(&momentum(p));
    if mom > ZERO_SET_TOL {
        return Err(Error::NotInZeroSet(mom));
    }
    let n = p.n();
    let (q, t) = Schur::new(p.x.clone()).unpack();
    let eigs: Vec<Complex64> = (0..n).map(|j| t[(j, j)]).collect();
    let mut basis = CMatrix::zeros(n, n);
    let mut col = 0;
    let h = p.xi.map(|z| -I * z);
    for cluster in union_find_clusters(&eigs, CLUSTER_GAP) {
        let qc = CMatrix::from_fn(n, cluster.len(), |r, k| q[(r, cluster[k])]);
        let block = qc.adjoint() * &h * &qc;
        let block = (&block + block.adjoint()) * c(0.5);
        let eig = SymmetricEigen::new(block);
        let v = qc * eig.eigenvectors;
        for k in 0..v.ncols() {
            basis.set_column(col, &v.column(k));
            col += 1;
        }
    }
    let y = basis.adjoint();

    let dx = &y * &p.x * y.adjoint();
    let dxi = &y * &p.xi * y.adjoint();
    let residual = off_diagonal_norm(&dx).max(off_diagonal_norm(&dxi));
    if residual > ZERO_SET_TOL {
        return Err(Error::JointDiagonalization(residual));
    }
    let theta1 = balance_angles((0..n).map(|j| dx[(j, j)].arg()).collect());
    let theta2 = center((0..n).map(|j| dxi[(j, j)].im).collect());
    let order = canonical_order(&theta1, &theta2);
    let mut conj = CMatrix::zeros(n, n);
    for (r, &src) in order.iter().enumerate() {
        conj.set_row(r, &y.row(src));
    }
    let det = conj.determinant();
    conj *= Complex64::from_polar(1.0, -det.arg() / n as f64);
    Ok(TorusNormalForm {
        theta1: order.iter().map(|&i| theta1[i]).collect(),
        theta2: order.iter().map(|&i| theta2[i]).collect(),
        conjugator: conj,
    })
}

fn order_parity(p: &[usize]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1i8;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Sign of a permutation given as `k ↦ p[k]`.
pub fn permutation_sign(p: &[usize]) -> i8 {
    order_parity(p)
}

/// Outcome of the three regularity tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// No root has `⟨α,H₁⟩ ∈ 2πℤ` together with `⟨α,H₂⟩ = 0`.
    pub via_theorem: bool,
    /// No root has `φ_α(z) = 1`.
    pub via_rss: bool,
    /// The stabilizer of `(x, ξ)` in `su(n)` is a maximal torus.
    pub via_stabilizer_dim: bool,
    pub stabilizer_dim: usize,
    /// `min_α |φ_α(z) − 1|`.
    pub min_root_gap: f64,
    /// Some `|φ_α(z) − 1|` lies in `[ε/10, 10ε]`; the flags are not
    /// meaningful.
    pub indeterminate: bool,
}

impl RegularityReport {
    pub fn agree(&self) -> bool {
        self.via_theorem == self.via_rss && self.via_rss == self.via_stabilizer_dim
    }
}

fn dist_to_2pi_z(t: f64) -> f64 {
    (t - 2.0 * PI * (t / (2.0 * PI)).round()).abs()
}

/// Dimension of `{η ∈ su(n) : Ad_x η = η, [ξ, η] = 0}` as the nullity of
/// the stacked real-linear map.
pub fn stabilizer_dim(p: &CotangentPoint, tol: f64) -> usize {
    let n = p.n();
    let dict = SuDictionary {
        n,
        rs: build_root_system("A", n - 1).expect("n checked at construction"),
    };
    let basis: Vec<CMatrix> = dict
        .torus_basis()
        .into_iter()
        .chain(dict.orthocomplement_basis())
        .collect();
    let xa = p.x.adjoint();
    let mut a = DMatrix::<f64>::zeros(4 * n * n, basis.len());
    for (col, eta) in basis.iter().enumerate() {
        let ad = &p.x * eta * &xa - eta;
        let br = &p.xi * eta - eta * &p.xi;
        for (i, z) in ad.iter().chain(br.iter()).enumerate() {
            a[(2 * i, col)] = z.re;
            a[(2 * i + 1, col)] = z.im;
        }
    }
    let sv = a.svd(false, false).singular_values;
    sv.iter().filter(|s| **s <= tol).count() + basis.len().saturating_sub(sv.len())
}

/// Classifies a zero-set point as regular or not, three independent ways.
pub fn classify_regular(p: &CotangentPoint) -> Result<RegularityReport> {
    let nf = conjugate_to_torus(p)?;
    let n = p.n();
    let mut via_theorem = true;
    for j in 0..n {
        for k in j + 1..n {
            let d1 = dist_to_2pi_z(nf.theta1[j] - nf.theta1[k]);
            let d2 = (nf.theta2[j] - nf.theta2[k]).abs();
            if d1 <= EPS_REG && d2 <= EPS_REG {
                via_theorem = false;
            }
        }
    }
    let gaps: Vec<f64> = nf
        .root_values()
        .iter()
        .map(|(_, v)| (v - c(1.0)).norm())
        .collect();
    let via_rss = gaps.iter().all(|g| *g > EPS_REG);
    let indeterminate = gaps
        .iter()
        .any(|g| (EPS_REG / 10.0..=10.0 * EPS_REG).contains(g));
    let min_root_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let dim = stabilizer_dim(p, EPS_REG);
    Ok(RegularityReport {
        via_theorem,
        via_rss,
        via_stabilizer_dim: dim == n - 1,
        stabilizer_dim: dim,
        min_root_gap,
        indeterminate,
    })
}

/// `det(Ad_{z⁻¹} − I)` on the off-diagonal part of `sl(n, ℂ)`, computed
/// from the matrix of the map, alongside `(−1)^m σ_C(z)²`.
pub fn det_contraction(dict: &SuDictionary, z: &TorusPointC) -> (Complex64, Complex64) {
    let n = dict.n;
    let zd = dict.torus_diagonal(z);
    let zm = diag_from(zd.iter().copied());
    let zinv = diag_from(zd.iter().map(|v| v.inv()));
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
        .collect();
    let mut a = CMatrix::zeros(pairs.len(), pairs.len());
    for (col, &(j, k)) in pairs.iter().enumerate() {
        let mut e = CMatrix::zeros(n, n);
        e[(j, k)] = c(1.0);
        let img = &zinv * &e * &zm - &e;
        for (row, &(r, s)) in pairs.iter().enumerate() {
            a[(row, col)] = img[(r, s)];
        }
    }
    let m = dict.rs.num_positive_roots();
    let sigma = sigma_product(&dict.rs, z);
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    (a.determinant(), sigma * sigma * sign)
}

fn normalizer_residual(dict: &SuDictionary, y: &CMatrix) -> f64 {
    let ya = y.adjoint();
    dict.torus_basis()
        .iter()
        .map(|h| off_diagonal_norm(&(y * h * &ya)))
        .fold(0.0, f64::max)
}

fn check_normalizer(dict: &SuDictionary, y: &CMatrix) -> Result<()> {
    if y.shape() != (dict.n, dict.n) {
        return Err(Error::DimensionMismatch {
            expected: dict.n,
            got: y.nrows(),
        });
    }
    let res = normalizer_residual(dict, y);
    if res > NORMALIZER_TOL {
        return Err(Error::NotNormalizer(res));
    }
    Ok(())
}

/// Sign of `det(Ad_y)` on `t^⊥` in the orthonormal basis of
/// [`SuDictionary::orthocomplement_basis`].
pub fn orientation_sign(dict: &SuDictionary, y: &CMatrix) -> Result<i8> {
    check_normalizer(dict, y)?;
    let basis = dict.orthocomplement_basis();
    let ya = y.adjoint();
    let d = basis.len();
    let mut m = DMatrix::<f64>::zeros(d, d);
    for (col, b) in basis.iter().enumerate() {
        let img = y * b * &ya;
        for (row, e) in basis.iter().enumerate() {
            m[(row, col)] = dict.pairing(e, &img);
        }
    }
    Ok(if m.determinant() > 0.0 { 1 } else { -1 })
}

/// The permutation `π` with `y E_kk y* = E_{π(k)π(k)}`.
pub fn induced_permutation(dict: &SuDictionary, y: &CMatrix) -> Result<Vec<usize>> {
    check_normalizer(dict, y)?;
    let n = dict.n;
    let perm: Vec<usize> = (0..n)
        .map(|k| {
            (0..n)
                .max_by(|&a, &b| y[(a, k)].norm().total_cmp(&y[(b, k)].norm()))
                .expect("n ≥ 2")
        })
        .collect();
    let mut seen = vec![false; n];
    for &p in &perm {
        if seen[p] {
            return Err(Error::NotNormalizer(1.0));
        }
        seen[p] = true;
    }
    Ok(perm)
}

/// Index of the Weyl group element induced by `Ad_y` on `t`.
pub fn weyl_element_of(dict: &SuDictionary, y: &CMatrix) -> Result<usize> {
    let perm = induced_permutation(dict, y)?;
    let n = dict.n;
    let generic = center((0..n).map(|k| 1.0 + k as f64 * (k as f64 + PI)).collect());
    let mut image = vec![0.0; n];
    for k in 0..n {
        image[perm[k]] = generic[k];
    }
    let v = dict.theta_to_weight(&generic);
    let target = dict.theta_to_weight(&image);
    dict.rs
        .weyl_group()
        .iter()
        .position(|w| w.apply(&v).approx_eq(&target, 1e-9))
        .ok_or(Error::NotNormalizer(0.0))
}

/// A determinant-one matrix in `N(T)` inducing the permutation `perm`.
pub fn normalizer_representative(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let mut y = CMatrix::zeros(n, n);
    for (k, &p) in perm.iter().enumerate() {
        y[(p, k)] = c(1.0);
    }
    if permutation_sign(perm) < 0 {
        for r in 0..n {
            y[(r, 0)] = -y[(r, 0)];
        }
    }
    y
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// A seeded zero-set point `y·(θ₁, θ₂)` together with its generating data.
#[derive(Clone, Debug)]
pub struct ZeroSetSample {
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    pub point: CotangentPoint,
}

/// Draws sample `index` of a battery. About half the samples carry an
/// exact coincidence in `θ₁` (possibly up to `2π`), in `θ₂`, or in both, so
/// that irregular points occur.
pub fn zero_set_sample(n: usize, seed: u64, index: u64) -> Result<ZeroSetSample> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut t1: Vec<f64> = (0..n).map(|_| PI * (2.0 * rng.random::<f64>() - 1.0)).collect();
    let mut t2: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let j = rng.random_range(0..n);
    let k = (j + 1 + rng.random_range(0..n - 1)) % n;
    match rng.random_range(0..8) {
        0 => t1[k] = t1[j],
        1 => t2[k] = t2[j],
        2 | 3 => {
            t1[k] = t1[j];
            t2[k] = t2[j];
        }
        4 => {
            t1[k] = t1[j] + 2.0 * PI;
            t2[k] = t2[j];
        }
        _ => {}
    }
    let t1 = center(t1);
    let t2 = center(t2);
    let y = random_su(n, &mut rng);
    let point = CotangentPoint::from_torus(&t1, &t2)?.conjugated_by(&y)?;
    Ok(ZeroSetSample {
        theta1: t1,
        theta2: t2,
        point,
    })
}

/// One line of a sample dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub n: usize,
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    pub report: RegularityReport,
    pub sigma_abs: f64,
    pub det_residual: f64,
}

impl SampleRecord {
    pub const CSV_HEADER: &'static str = "n,theta1,theta2,via_theorem,via_rss,via_stabilizer_dim,stabilizer_dim,sigma_abs,det_residual";

    pub fn csv_row(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|t| format!("{t:.17e}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        format!(
            "{},{},{},{},{},{},{},{:.17e},{:.17e}",
            self.n,
            join(&self.theta1),
            join(&self.theta2),
            self.report.via_theorem,
            self.report.via_rss,
            self.report.via_stabilizer_dim,
            self.report.stabilizer_dim,
            self.sigma_abs,
            self.det_residual
        )
    }
}

/// Classifies `count` seeded samples in parallel; output is in index order.
pub fn classify_battery(n: usize, count: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    let dict = weight_dictionary(n)?;
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = zero_set_sample(n, seed, i)?;
            let report = classify_regular(&s.point)?;
            let z = dict.torus_point(&s.theta1, &s.theta2);
            let (det, sq) = det_contraction(&dict, &z);
            Ok(SampleRecord {
                n,
                sigma_abs: sigma_product(dict.root_system(), &z).norm(),
                det_residual: (det - sq).norm() / (1.0 + sq.norm()),
                theta1: s.theta1,
                theta2: s.theta2,
                report,
            })
        })
        .collect()
}

/// CSV text of a sample dump, header included.
pub fn samples_to_csv(records: &[SampleRecord]) -> String {
    let mut out = String::from(SampleRecord::CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        frob(&(a - b)) <= tol
    }

    #[test]
    fn cotangent_point_validation() {
        let id = CMatrix::identity(2, 2);
        assert!(CotangentPoint::new(id.clone(), CMatrix::zeros(2, 2)).is_ok());
        let bad_x = id.clone() * c(2.0);
        assert!(CotangentPoint::new(bad_x, CMatrix::zeros(2, 2)).is_err());
        let det_m1 = diag_from([c(1.0), c(-1.0)].into_iter());
        assert!(CotangentPoint::new(det_m1, CMatrix::zeros(2, 2)).is_err());
        let herm = diag_from([c(1.0), c(-1.0)].into_iter());
        assert!(CotangentPoint::new(id.clone(), herm).is_err());
        let trace = diag_from([I, I].into_iter());
        assert!(CotangentPoint::new(id, trace).is_err());
        assert!(CotangentPoint::from_torus(&[0.0; 9], &[0.0; 9]).is_err());
    }

    #[test]
    fn polar_examples() {
        let p = CotangentPoint::from_torus(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(close(&polar_embed(&p), &CMatrix::identity(2, 2), 1e-15));
        let s = 0.7;
        let p = CotangentPoint::from_torus(&[0.0, 0.0], &[s, -s]).unwrap();
        let g = polar_embed(&p);
        let expected = diag_from([c(s.exp()), c((-s).exp())].into_iter());
        assert!(close(&g, &expected, 1e-13));

        let mut r = rng(3);
        for _ in 0..20 {
            let y = random_su(3, &mut r);
            let t1 = random_angles(3, &mut r, PI);
            let t2 = random_angles(3, &mut r, 1.0);
            let p = CotangentPoint::from_torus(&t1, &t2).unwrap().conjugated_by(&y).unwrap();
            let g = polar_embed(&p);
            assert!((g.determinant() - c(1.0)).norm() < 1e-8);
            let unitary = frob(&(g.adjoint() * &g - CMatrix::identity(3, 3))) < 1e-10;
            assert!(!unitary);
            let q = CotangentPoint::new(p.x().clone(), CMatrix::zeros(3, 3)).unwrap();
            let g = polar_embed(&q);
            assert!(frob(&(g.adjoint() * &g - CMatrix::identity(3, 3))) < 1e-12);
        }
    }

    #[test]
    fn random_su_is_special_unitary() {
        let mut r = rng(11);
        for n in 2..=MAX_N {
            let y = random_su(n, &mut r);
            assert!(frob(&(y.adjoint() * &y - CMatrix::identity(n, n))) < 1e-12);
            assert!((y.determinant() - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn momentum_examples() {
        let p = CotangentPoint::from_torus(&[0.4, -0.4], &[1.0, -1.0]).unwrap();
        assert!(frob(&momentum(&p)) < 1e-15);

        let mut r = rng(5);
        let x = random_su(3, &mut r);
        let xi = dict3().diag_element(&[0.5, 0.2, -0.7]);
        let p = CotangentPoint::new(x, xi).unwrap();
        assert!(frob(&momentum(&p)) > 1e-3);

        for _ in 0..20 {
            let y = random_su(3, &mut r);
            let lhs = momentum(&p.conjugated_by(&y).unwrap());
            let rhs = &y * momentum(&p) * y.adjoint();
            assert!(close(&lhs, &rhs, 1e-10));
        }
    }

    fn dict2() -> SuDictionary {
        weight_dictionary(2).unwrap()
    }

    fn dict3() -> SuDictionary {
        weight_dictionary(3).unwrap()
    }

    #[test]
    fn dictionary_examples() {
        let d = dict2();
        let a = d.root_element(0, 1);
        assert!((d.pairing(&a, &a) - 2.0).abs() < 1e-15);
        let delta = d.root_system().delta();
        let theta = d.weight_to_theta(delta);
        assert!((theta[0] - 0.5).abs() < 1e-15 && (theta[1] + 0.5).abs() < 1e-15);

        let d = dict3();
        let rs = d.root_system();
        for j in 0..3 {
            for k in 0..3 {
                if j == k {
                    continue;
                }
                let th = [0.3, -1.1, 0.8];
                let h = d.diag_element(&th);
                let pair = d.pairing(&d.root_element(j, k), &h);
                assert!((pair - (th[j] - th[k])).abs() < 1e-14);
            }
        }
        for root in rs.positive_roots() {
            let th = d.weight_to_theta(&root.vector);
            let h = d.diag_element(&th);
            assert!((d.pairing(&h, &h) - 2.0).abs() < 1e-12);
        }
        let basis: Vec<CMatrix> = d.torus_basis().into_iter().chain(d.orthocomplement_basis()).collect();
        for (a, x) in basis.iter().enumerate() {
            for (b, y) in basis.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((d.pairing(x, y) - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn normal_form_of_diagonal_input() {
        let p = CotangentPoint::from_torus(&[0.1, 0.5, -0.6], &[-0.3, 0.9, -0.6]).unwrap();
        let nf = conjugate_to_torus(&p).unwrap();
        let expect1 = [0.5, 0.1, -0.6];
        let expect2 = [0.9, -0.3, -0.6];
        for j in 0..3 {
            assert!((nf.theta1[j] - expect1[j]).abs() < 1e-12);
            assert!((nf.theta2[j] - expect2[j]).abs() < 1e-12);
        }
        let y = &nf.conjugator;
        assert!(normalizer_residual(&dict3(), y) < 1e-12);
        for row in 0..3 {
            let nz = (0..3).filter(|&k| y[(row, k)].norm() > 1e-12).count();
            assert_eq!(nz, 1);
        }
        // ties in θ₂ are broken by θ₁
        let p = CotangentPoint::from_torus(&[-0.2, 0.2], &[0.0, 0.0]).unwrap();
        let nf = conjugate_to_torus(&p).unwrap();
        assert!((nf.theta1[0] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn normal_form_rejects_nonzero_momentum() {
        let mut r = rng(9);
        let x = random_su(2, &mut r);
        let p = CotangentPoint::new(x, dict2().diag_element(&[1.0, -1.0])).unwrap();
        assert!(matches!(conjugate_to_torus(&p), Err(Error::NotInZeroSet(_))));
    }

    #[test]
    fn normal_form_round_trip() {
        let mut r = rng(21);
        for n in 2..=4 {
            for _ in 0..50 {
                let t1 = random_angles(n, &mut r, 2.0);
                let t2 = random_angles(n, &mut r, 1.5);
                let base = conjugate_to_torus(&CotangentPoint::from_torus(&t1, &t2).unwrap()).unwrap();
                let y0 = random_su(n, &mut r);
                let p = CotangentPoint::from_torus(&t1, &t2).unwrap().conjugated_by(&y0).unwrap();
                let nf = conjugate_to_torus(&p).unwrap();
                for j in 0..n {
                    assert!(dist_to_2pi_z(nf.theta1[j] - base.theta1[j]) < 1e-8);
                    assert!((nf.theta2[j] - base.theta2[j]).abs() < 1e-8);
                }
                let y = &nf.conjugator;
                let back_x = y * p.x() * y.adjoint();
                let back_xi = y * p.xi() * y.adjoint();
                let want = CotangentPoint::from_torus(&nf.theta1, &nf.theta2).unwrap();
                assert!(close(&back_x, want.x(), 1e-8));
                assert!(close(&back_xi, want.xi(), 1e-8));
                assert!((y.determinant() - c(1.0)).norm() < 1e-10);
                let s1: f64 = nf.theta1.iter().sum();
                assert!(s1.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn two_conjugators_differ_by_a_weyl_permutation() {
        let mut r = rng(33);
        let d = dict3();
        for _ in 0..20 {
            let t1 = random_angles(3, &mut r, 2.0);
            let t2 = random_angles(3, &mut r, 1.0);
            let ya = random_su(3, &mut r);
            let yb = random_su(3, &mut r);
            let p = CotangentPoint::from_torus(&t1, &t2).unwrap();
            let na = conjugate_to_torus(&p.conjugated_by(&ya).unwrap()).unwrap();
            let nb = conjugate_to_torus(&p.conjugated_by(&yb).unwrap()).unwrap();
            // the change of conjugator normalizes T and fixes the normal form
            let rel = &na.conjugator * ya * yb.adjoint() * nb.conjugator.adjoint();
            let w = weyl_element_of(&d, &rel).unwrap();
            assert!(d.root_system().weyl_group()[w].is_identity());
            assert_eq!(orientation_sign(&d, &rel).unwrap(), 1);
            // an unsorted conjugator relates by a genuine permutation
            let perm = vec![2, 0, 1];
            let rep = normalizer_representative(&perm);
            let shuffled = &rep * &na.conjugator;
            let rel = &shuffled * na.conjugator.adjoint();
            let w = weyl_element_of(&d, &rel).unwrap();
            let we = &d.root_system().weyl_group()[w];
            assert_eq!(we.sign(), permutation_sign(&perm));
            assert_eq!(orientation_sign(&d, &rel).unwrap(), we.sign());
        }
    }

    #[test]
    fn regularity_examples() {
        let p = CotangentPoint::from_torus(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let rep = classify_regular(&p).unwrap();
        assert!(!rep.via_theorem && !rep.via_rss && !rep.via_stabilizer_dim);
        assert_eq!(rep.stabilizer_dim, 3);
        assert!(!rep.indeterminate);

        let p = CotangentPoint::from_torus(&[PI / 2.0, -PI / 2.0], &[0.0, 0.0]).unwrap();
        let rep = classify_regular(&p).unwrap();
        assert!(rep.via_theorem && rep.via_rss && rep.via_stabilizer_dim);
        assert_eq!(rep.stabilizer_dim, 1);

        let p = CotangentPoint::from_torus(&[0.0, 0.0], &[0.5, -0.5]).unwrap();
        let rep = classify_regular(&p).unwrap();
        assert!(rep.via_theorem && rep.via_rss && rep.via_stabilizer_dim);

        // θ₁ gap 2π is the same group element as gap 0
        let p = CotangentPoint::from_torus(&[PI, -PI], &[0.0, 0.0]).unwrap();
        let rep = classify_regular(&p).unwrap();
        assert!(!rep.via_theorem && !rep.via_rss);
        assert_eq!(rep.stabilizer_dim, 3);

        let p = CotangentPoint::from_torus(&[0.0, 0.0], &[3e-9, -3e-9]).unwrap();
        assert!(classify_regular(&p).unwrap().indeterminate);
    }

    #[test]
    fn classifiers_agree_on_batteries() {
        for n in [2, 3] {
            let recs = classify_battery(n, 600, 77).unwrap();
            let mut irregular = 0;
            for r in &recs {
                assert!(!r.report.indeterminate);
                assert!(r.report.agree(), "{:?}", r);
                if !r.report.via_rss {
                    irregular += 1;
                }
                assert!(r.det_residual < 1e-10);
            }
            assert!(irregular > 50 && irregular < 550);
        }
    }

    #[test]
    fn continuous_samples_are_regular() {
        let mut r = rng(4);
        for n in [2, 3] {
            let d = weight_dictionary(n).unwrap();
            for _ in 0..2000 {
                let t1 = random_angles(n, &mut r, PI);
                let t2 = random_angles(n, &mut r, 1.0);
                let z = d.torus_point(&t1, &t2);
                assert!(sigma_product(d.root_system(), &z).norm() > EPS_REG);
                let p = CotangentPoint::from_torus(&t1, &t2).unwrap();
                assert!(classify_regular(&p).unwrap().via_rss);
            }
        }
    }

    #[test]
    fn det_contraction_examples() {
        let d = dict2();
        let z = TorusPointC::identity(1);
        let (det, sq) = det_contraction(&d, &z);
        assert_eq!(det.norm(), 0.0);
        assert!(sq.norm() < 1e-30);

        let z = d.torus_point(&[0.0, 0.0], &[0.5, -0.5]);
        let (det, sq) = det_contraction(&d, &z);
        let expected = -4.0 * 0.5f64.sinh().powi(2);
        assert!((det.re - expected).abs() < 1e-13 && det.im.abs() < 1e-13);
        assert!((det.re + 1.08616).abs() < 1e-5);
        assert!((det - sq).norm() < 1e-13);
    }

    #[test]
    fn orientation_examples() {
        let d = dict2();
        assert_eq!(orientation_sign(&d, &CMatrix::identity(2, 2)).unwrap(), 1);
        let y = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)]);
        assert_eq!(orientation_sign(&d, &y).unwrap(), -1);
        let y = diag_from([I, -I].into_iter());
        assert_eq!(orientation_sign(&d, &y).unwrap(), 1);
        let mut r = rng(1);
        let y = random_su(2, &mut r);
        assert!(matches!(orientation_sign(&d, &y), Err(Error::NotNormalizer(_))));
    }

    #[test]
    fn orientation_matches_weyl_sign_on_coset_representatives() {
        for n in 2..=4 {
            let d = weight_dictionary(n).unwrap();
            let perms = permutations(n);
            assert_eq!(perms.len(), d.root_system().weyl_order());
            let mut hit = vec![false; perms.len()];
            for p in &perms {
                let y = normalizer_representative(p);
                assert!((y.determinant() - c(1.0)).norm() < 1e-14);
                let w = weyl_element_of(&d, &y).unwrap();
                hit[w] = true;
                let sign = d.root_system().weyl_group()[w].sign();
                assert_eq!(sign, permutation_sign(p));
                assert_eq!(orientation_sign(&d, &y).unwrap(), sign);
            }
            assert!(hit.iter().all(|h| *h));
        }
    }

    #[test]
    fn sample_dump_format() {
        let recs = classify_battery(2, 3, 1).unwrap();
        let csv = samples_to_csv(&recs);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], SampleRecord::CSV_HEADER);
        assert_eq!(lines[1].split(',').count(), 9);
        assert_eq!(csv, samples_to_csv(&classify_battery(2, 3, 1).unwrap()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn zero_set_is_stable_under_conjugation(seed in any::<u64>(), n in 2usize..5) {
            let mut r = rng(seed);
            let t1 = random_angles(n, &mut r, PI);
            let t2 = random_angles(n, &mut r, 2.0);
            let y = random_su(n, &mut r);
            let p = CotangentPoint::from_torus(&t1, &t2).unwrap().conjugated_by(&y).unwrap();
            prop_assert!(frob(&momentum(&p)) < 1e-10);
        }

        #[test]
        fn det_identity_holds(seed in any::<u64>(), n in 2usize..4) {
            let d = weight_dictionary(n).unwrap();
            let mut r = rng(seed);
            let z = d.torus_point(&random_angles(n, &mut r, PI), &random_angles(n, &mut r, 1.5));
            let (det, sq) = det_contraction(&d, &z);
            prop_assert!((det - sq).norm() <= 1e-10 * (1.0 + sq.norm()));
        }

        #[test]
        fn orientation_is_multiplicative(seed in any::<u64>(), n in 2usize..5) {
            let d = weight_dictionary(n).unwrap();
            let mut r = rng(seed);
            let perms = permutations(n);
            let mut pick = || {
                let p = &perms[r.random_range(0..perms.len())];
                let t = random_angles(n, &mut r, PI);
                let torus = diag_from(t.iter().map(|a| Complex64::from_polar(1.0, *a)));
                torus * normalizer_representative(p)
            };
            let (a, b) = (pick(), pick());
            let sab = orientation_sign(&d, &(&a * &b)).unwrap();
            prop_assert_eq!(sab, orientation_sign(&d, &a).unwrap() * orientation_sign(&d, &b).unwrap());
        }

        #[test]
        fn dictionary_round_trip(seed in any::<u64>(), n in 2usize..6) {
            let d = weight_dictionary(n).unwrap();
            let mut r = rng(seed);
            let th = random_angles(n, &mut r, 3.0);
            let back = d.weight_to_theta(&d.theta_to_weight(&th));
            for j in 0..n {
                prop_assert!((back[j] - th[j]).abs() < 1e-12);
            }
            let th2 = random_angles(n, &mut r, 3.0);
            let (h, h2) = (d.diag_element(&th), d.diag_element(&th2));
            let (v, v2) = (d.theta_to_weight(&th), d.theta_to_weight(&th2));
            prop_assert!((d.pairing(&h, &h2) - v.dot(&v2)).abs() < 1e-11);
        }

        #[test]
        fn torus_diagonal_matches_root_values(seed in any::<u64>()) {
            let d = dict3();
            let mut r = rng(seed);
            let t1 = random_angles(3, &mut r, PI);
            let t2 = random_angles(3, &mut r, 1.0);
            let z = d.torus_point(&t1, &t2);
            let zd = d.torus_diagonal(&z);
            let nf = TorusNormalForm { theta1: t1, theta2: t2, conjugator: CMatrix::identity(3, 3) };
            for ((j, k), v) in nf.root_values() {
                prop_assert!((zd[j] / zd[k] - v).norm() < 1e-12 * v.norm().max(1.0));
            }
            for root in d.root_system().roots() {
                let th = d.weight_to_theta(&root.vector);
                let j = (0..3).find(|&i| th[i] > 0.5).unwrap();
                let k = (0..3).find(|&i| th[i] < -0.5).unwrap();
                prop_assert!((z.monomial(&root.vector) - zd[j] / zd[k]).norm() < 1e-11 * zd[j].norm().max(1.0) / zd[k].norm().min(1.0));
            }
        }
    }
}
