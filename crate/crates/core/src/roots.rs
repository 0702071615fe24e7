//! Root data and Weyl groups for simply-laced root systems.
//!
//! Roots are normalized to squared length 2, so every coroot coincides with
//! its root and the pairing `⟨λ, α⟩` of an integral weight with a root is an
//! integer. Two coordinate systems are used side by side:
//!
//! * [`Weight`]: real coordinates in a fixed orthonormal basis of `t`. The
//!   simple roots are the rows of the Cholesky factor of the Gram matrix.
//! * [`LatticeWeight`]: exact integer coordinates in the fundamental-weight
//!   basis, i.e. the Dynkin labels `λ_i = ⟨λ, α_i⟩`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used when comparing real weights.
pub const WEIGHT_TOL: f64 = 1e-9;

/// Hard cap on the Weyl group order accepted by [`RootSystem::from_cartan`].
pub const MAX_WEYL_ORDER: usize = 40_320;

/// A vector of `t` in orthonormal coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight(DVector<f64>);

impl Weight {
    pub fn new(coords: Vec<f64>) -> Self {
        Weight(DVector::from_vec(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Weight(DVector::zeros(dim))
    }

    pub fn from_vector(v: DVector<f64>) -> Self {
        Weight(v)
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Euclidean dot product of the orthonormal coordinates.
    pub fn dot(&self, other: &Weight) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn approx_eq(&self, other: &Weight, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .0
                .iter()
                .zip(other.0.iter())
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(&self.0 + &rhs.0)
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, rhs: &Weight) -> Weight {
        Weight(&self.0 - &rhs.0)
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(-&self.0)
    }
}

impl Mul<f64> for &Weight {
    type Output = Weight;
    fn mul(self, rhs: f64) -> Weight {
        Weight(&self.0 * rhs)
    }
}

/// An integral weight written in the fundamental-weight basis.
///
/// The derived ordering is lexicographic on the labels, which fixes the
/// iteration order of every sparse container keyed by lattice weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeWeight(Vec<i64>);

impl LatticeWeight {
    pub fn new(labels: Vec<i64>) -> Self {
        LatticeWeight(labels)
    }

    pub fn zero(rank: usize) -> Self {
        LatticeWeight(vec![0; rank])
    }

    /// `k` times the `i`-th fundamental weight.
    pub fn fundamental(rank: usize, i: usize, k: i64) -> Self {
        let mut v = vec![0; rank];
        v[i] = k;
        LatticeWeight(v)
    }

    pub fn labels(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn is_strictly_dominant(&self) -> bool {
        self.0.iter().all(|&c| c > 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Sum of the Dynkin labels.
    pub fn level(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Largest absolute label.
    pub fn max_abs_label(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for LatticeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &LatticeWeight {
    type Output = LatticeWeight;
    fn add(self, rhs: &LatticeWeight) -> LatticeWeight {
        LatticeWeight(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeWeight {
    type Output = LatticeWeight;
    fn sub(self, rhs: &LatticeWeight) -> LatticeWeight {
        LatticeWeight(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeWeight {
    type Output = LatticeWeight;
    fn neg(self) -> LatticeWeight {
        LatticeWeight(self.0.iter().map(|a| -a).collect())
    }
}

/// Element of the Weyl group.
#[derive(Clone, Debug)]
pub struct WeylElement {
    matrix: DMatrix<f64>,
    // row-major integer action on Dynkin labels
    lattice_action: Vec<i64>,
    sign: i8,
    word: Vec<usize>,
}

impl WeylElement {
    /// Orthogonal matrix acting on orthonormal coordinates.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `(-1)^{length}`, equal to the determinant of [`Self::matrix`].
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Reduced word in the simple reflections, applied right to left.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn apply(&self, v: &Weight) -> Weight {
        Weight(&self.matrix * v.as_vector())
    }

    pub fn apply_lattice(&self, lambda: &LatticeWeight) -> LatticeWeight {
        let r = lambda.rank();
        let labels = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| self.lattice_action[i * r + j] * lambda.0[j])
                    .sum()
            })
            .collect();
        LatticeWeight(labels)
    }
}

/// A root, stored in all three coordinate systems.
#[derive(Clone, Debug)]
pub struct Root {
    /// Dynkin labels (pairings with the simple roots).
    pub lattice: LatticeWeight,
    /// Coefficients in the simple-root basis.
    pub simple_coords: Vec<i64>,
    pub vector: Weight,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.simple_coords.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.simple_coords.iter().all(|&c| c >= 0)
    }
}

/// Result of moving a weight into the closed fundamental chamber.
#[derive(Clone, Debug)]
pub struct DominantRep<'a> {
    pub weight: Weight,
    pub element: &'a WeylElement,
    pub on_wall: bool,
}

/// A finite simply-laced root system with its Weyl group.
#[derive(Clone, Debug)]
pub struct RootSystem {
    label: String,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    gram: DMatrix<f64>,
    inverse_gram: DMatrix<f64>,
    simple_roots: Vec<Weight>,
    fundamental_weights: Vec<Weight>,
    roots: Vec<Root>,
    num_positive: usize,
    delta: Weight,
    weyl: Vec<WeylElement>,
    // image of delta (Dynkin labels) -> index into `weyl`
    by_delta_image: HashMap<LatticeWeight, usize>,
}

/// Cartan matrix of type `A_rank`.
pub fn cartan_type_a(rank: usize) -> Vec<Vec<i64>> {
    (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect()
}

/// Builds the root system of the given Cartan type and rank.
///
/// Only type `A` is supported; other simply-laced types can be built through
/// [`RootSystem::from_cartan`].
pub fn build_root_system(label: &str, rank: usize) -> Result<RootSystem> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    match label {
        "A" | "a" => RootSystem::from_cartan(&format!("A{rank}"), cartan_type_a(rank)),
        other => Err(Error::UnsupportedType(other.to_string())),
    }
}

impl RootSystem {
    /// Builds root data from a symmetric, positive-definite Cartan matrix with
    /// diagonal 2 and off-diagonal entries in `{0, -1}`.
    pub fn from_cartan(label: &str, cartan: Vec<Vec<i64>>) -> Result<Self> {
        let r = cartan.len();
        if r == 0 {
            return Err(Error::InvalidCartan("empty matrix".into()));
        }
        for (i, row) in cartan.iter().enumerate() {
            if row.len() != r {
                return Err(Error::InvalidCartan("matrix is not square".into()));
            }
            for (j, &a) in row.iter().enumerate() {
                if a != cartan[j][i] {
                    return Err(Error::InvalidCartan("matrix is not symmetric".into()));
                }
                let ok = if i == j { a == 2 } else { a == 0 || a == -1 };
                if !ok {
                    return Err(Error::InvalidCartan(format!(
                        "entry ({i},{j}) = {a} is not simply laced"
                    )));
                }
            }
        }

        let gram = DMatrix::from_fn(r, r, |i, j| cartan[i][j] as f64);
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidCartan("matrix is not positive definite".into()))?;
        let lower = chol.l();
        let inverse_gram = chol.inverse();
        let simple_roots: Vec<Weight> = (0..r)
            .map(|i| Weight(lower.row(i).transpose()))
            .collect();
        // rows of L^{-T}, so that <w_j, a_i> = delta_ij
        let lower_inv = lower
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidCartan("singular Cholesky factor".into()))?;
        let fundamental_weights: Vec<Weight> =
            (0..r).map(|j| Weight(lower_inv.column(j).into_owned())).collect();

        let roots = close_roots(&cartan, &simple_roots)?;
        let num_positive = roots.iter().filter(|a| a.is_positive()).count();

        let mut delta = Weight::zeros(r);
        for w in &fundamental_weights {
            delta = &delta + w;
        }

        let (weyl, by_delta_image) = generate_weyl(&cartan, &simple_roots)?;

        Ok(RootSystem {
            label: label.to_string(),
            rank: r,
            cartan,
            gram,
            inverse_gram,
            simple_roots,
            fundamental_weights,
            roots,
            num_positive,
            delta,
            weyl,
            by_delta_image,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Gram matrix of the simple roots.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn simple_roots(&self) -> &[Weight] {
        &self.simple_roots
    }

    pub fn fundamental_weights(&self) -> &[Weight] {
        &self.fundamental_weights
    }

    /// All roots: positive roots first (by height), then their negatives.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.num_positive]
    }

    /// Number of positive roots.
    pub fn num_positive_roots(&self) -> usize {
        self.num_positive
    }

    /// Half the sum of the positive roots.
    pub fn delta(&self) -> &Weight {
        &self.delta
    }

    /// Dynkin labels of `delta`, all equal to one.
    pub fn delta_lattice(&self) -> LatticeWeight {
        LatticeWeight(vec![1; self.rank])
    }

    pub fn weyl_group(&self) -> &[WeylElement] {
        &self.weyl
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    fn check_dim(&self, v: &Weight) -> Result<()> {
        if v.dim() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: v.dim(),
            });
        }
        Ok(())
    }

    /// Errors unless `v` has one label per simple root.
    pub fn check_lattice_dim(&self, v: &LatticeWeight) -> Result<()> {
        if v.rank() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: v.rank(),
            });
        }
        Ok(())
    }

    /// Invariant inner product of two weights.
    pub fn inner(&self, v: &Weight, w: &Weight) -> Result<f64> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(v.dot(w))
    }

    /// Inner product of two integral weights, `λᵀ G⁻¹ μ` in Dynkin labels.
    pub fn lattice_inner(&self, lambda: &LatticeWeight, mu: &LatticeWeight) -> f64 {
        let r = self.rank;
        let mut acc = 0.0;
        for i in 0..r {
            for j in 0..r {
                acc += lambda.0[i] as f64 * self.inverse_gram[(i, j)] * mu.0[j] as f64;
            }
        }
        acc
    }

    pub fn lattice_norm_sq(&self, lambda: &LatticeWeight) -> f64 {
        self.lattice_inner(lambda, lambda)
    }

    /// Orthonormal coordinates of an integral weight.
    pub fn lattice_to_weight(&self, lambda: &LatticeWeight) -> Weight {
        let mut v = DVector::zeros(self.rank);
        for (c, w) in lambda.0.iter().zip(&self.fundamental_weights) {
            v += w.as_vector() * (*c as f64);
        }
        Weight(v)
    }

    /// Dynkin labels of `v` if every pairing with a simple root is an integer
    /// within [`WEIGHT_TOL`].
    pub fn weight_to_lattice(&self, v: &Weight) -> Option<LatticeWeight> {
        if v.dim() != self.rank {
            return None;
        }
        let mut labels = Vec::with_capacity(self.rank);
        for a in &self.simple_roots {
            let p = a.dot(v);
            let k = p.round();
            if (p - k).abs() > WEIGHT_TOL {
                return None;
            }
            labels.push(k as i64);
        }
        Some(LatticeWeight(labels))
    }

    pub fn is_integral(&self, v: &Weight) -> bool {
        self.weight_to_lattice(v).is_some()
    }

    /// Index of the root equal to `alpha`, if any.
    pub fn root_index(&self, alpha: &Weight) -> Option<usize> {
        self.roots
            .iter()
            .position(|r| r.vector.approx_eq(alpha, WEIGHT_TOL))
    }

    /// Reflection `s_α(v) = v − ⟨v, α⟩ α`.
    pub fn reflect(&self, alpha: &Weight, v: &Weight) -> Result<Weight> {
        self.check_dim(alpha)?;
        self.check_dim(v)?;
        let idx = self.root_index(alpha).ok_or(Error::NotARoot)?;
        let a = &self.roots[idx].vector;
        Ok(v - &(a * a.dot(v)))
    }

    /// Reflection of an integral weight in the root with index `root`.
    pub fn reflect_lattice(&self, root: usize, lambda: &LatticeWeight) -> LatticeWeight {
        let a = &self.roots[root];
        let pairing = self.lattice_inner(lambda, &a.lattice).round() as i64;
        LatticeWeight(
            lambda
                .0
                .iter()
                .zip(&a.lattice.0)
                .map(|(l, c)| l - pairing * c)
                .collect(),
        )
    }

    fn simple_reflect_lattice(&self, i: usize, lambda: &mut LatticeWeight) {
        let k = lambda.0[i];
        for (j, l) in lambda.0.iter_mut().enumerate() {
            *l -= k * self.cartan[i][j];
        }
    }

    /// Index of the Weyl element sending `delta` to `image`.
    fn element_by_delta_image(&self, image: &LatticeWeight) -> usize {
        self.by_delta_image[image]
    }

    /// Index of `weyl_group()[a] ∘ weyl_group()[b]`.
    pub fn compose(&self, a: usize, b: usize) -> usize {
        let img = self.weyl[b].apply_lattice(&self.delta_lattice());
        let img = self.weyl[a].apply_lattice(&img);
        self.element_by_delta_image(&img)
    }

    /// Index of the inverse of `weyl_group()[a]`.
    pub fn inverse(&self, a: usize) -> usize {
        let mut img = self.delta_lattice();
        for &i in &self.weyl[a].word {
            self.simple_reflect_lattice(i, &mut img);
        }
        self.element_by_delta_image(&img)
    }

    /// Index of the Weyl element whose matrix equals `m` within `tol`.
    pub fn element_index_of_matrix(&self, m: &DMatrix<f64>, tol: f64) -> Option<usize> {
        self.weyl
            .iter()
            .position(|w| (w.matrix() - m).amax() <= tol)
    }

    /// Moves an integral weight into the closed fundamental chamber.
    ///
    /// Returns the dominant weight and the index of the Weyl element `w` with
    /// `w · lambda = dominant`.
    pub fn dominant_lattice(&self, lambda: &LatticeWeight) -> (LatticeWeight, usize) {
        let mut mu = lambda.clone();
        let mut word = Vec::new();
        while let Some(i) = mu.0.iter().position(|&c| c < 0) {
            self.simple_reflect_lattice(i, &mut mu);
            word.push(i);
        }
        // w = s_{word[k-1]} ... s_{word[0]}
        let mut img = self.delta_lattice();
        for &i in &word {
            self.simple_reflect_lattice(i, &mut img);
        }
        (mu, self.element_by_delta_image(&img))
    }

    /// Moves an arbitrary weight into the closed fundamental chamber.
    pub fn dominant_representative(&self, lambda: &Weight) -> Result<DominantRep<'_>> {
        self.check_dim(lambda)?;
        let mut mu = lambda.clone();
        let mut word = Vec::new();
        let limit = 4 * self.roots.len() + 8;
        loop {
            let next = self
                .simple_roots
                .iter()
                .position(|a| a.dot(&mu) < -WEIGHT_TOL);
            match next {
                Some(i) => {
                    let a = &self.simple_roots[i];
                    mu = &mu - &(a * a.dot(&mu));
                    word.push(i);
                    if word.len() > limit {
                        return Err(Error::InvalidArgument(
                            "chamber walk did not terminate".into(),
                        ));
                    }
                }
                None => break,
            }
        }
        let mut img = self.delta_lattice();
        for &i in &word {
            self.simple_reflect_lattice(i, &mut img);
        }
        let element = &self.weyl[self.element_by_delta_image(&img)];
        let on_wall = self
            .positive_roots()
            .iter()
            .any(|a| a.vector.dot(&mu).abs() <= WEIGHT_TOL);
        Ok(DominantRep {
            weight: mu,
            element,
            on_wall,
        })
    }
}

fn close_roots(cartan: &[Vec<i64>], simple_roots: &[Weight]) -> Result<Vec<Root>> {
    let r = cartan.len();
    let pair = |beta: &[i64], j: usize| -> i64 { (0..r).map(|k| beta[k] * cartan[k][j]).sum() };

    let mut seen: Vec<Vec<i64>> = Vec::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..r {
        let mut e = vec![0; r];
        e[i] = 1;
        seen.push(e.clone());
        queue.push_back(e);
    }
    while let Some(beta) = queue.pop_front() {
        for j in 0..r {
            let p = pair(&beta, j);
            let mut image = beta.clone();
            image[j] -= p;
            if !seen.contains(&image) {
                seen.push(image.clone());
                queue.push_back(image);
                if seen.len() > 2 * MAX_WEYL_ORDER {
                    return Err(Error::InvalidCartan("root system is not finite".into()));
                }
            }
        }
    }

    let to_root = |beta: Vec<i64>| -> Root {
        let lattice = LatticeWeight((0..r).map(|j| pair(&beta, j)).collect());
        let mut v = Weight::zeros(r);
        for (c, a) in beta.iter().zip(simple_roots) {
            v = &v + &(a * (*c as f64));
        }
        Root {
            lattice,
            simple_coords: beta,
            vector: v,
        }
    };

    let mut positive: Vec<Vec<i64>> = seen
        .into_iter()
        .filter(|b| b.iter().all(|&c| c >= 0))
        .collect();
    positive.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    let negative: Vec<Vec<i64>> = positive
        .iter()
        .map(|b| b.iter().map(|c| -c).collect())
        .collect();
    Ok(positive
        .into_iter()
        .chain(negative)
        .map(to_root)
        .collect())
}

type WeylData = (Vec<WeylElement>, HashMap<LatticeWeight, usize>);

fn generate_weyl(cartan: &[Vec<i64>], simple_roots: &[Weight]) -> Result<WeylData> {
    let r = cartan.len();
    let identity_action: Vec<i64> = (0..r * r)
        .map(|k| if k / r == k % r { 1 } else { 0 })
        .collect();
    let reflection_matrix = |a: &Weight| -> DMatrix<f64> {
        DMatrix::identity(r, r) - a.as_vector() * a.as_vector().transpose()
    };
    let gens: Vec<DMatrix<f64>> = simple_roots.iter().map(reflection_matrix).collect();

    let delta = LatticeWeight(vec![1; r]);
    let mut elements = vec![WeylElement {
        matrix: DMatrix::identity(r, r),
        lattice_action: identity_action,
        sign: 1,
        word: Vec::new(),
    }];
    let mut index = HashMap::new();
    index.insert(delta.clone(), 0);
    let mut images = vec![delta];

    let mut head = 0;
    while head < elements.len() {
        for i in 0..r {
            let mut img = images[head].clone();
            let k = img.0[i];
            for (j, l) in img.0.iter_mut().enumerate() {
                *l -= k * cartan[i][j];
            }
            if index.contains_key(&img) {
                continue;
            }
            let parent = &elements[head];
            // left-multiply the parent by s_i
            let mut action = parent.lattice_action.clone();
            for col in 0..r {
                let li = parent.lattice_action[i * r + col];
                for row in 0..r {
                    action[row * r + col] -= cartan[i][row] * li;
                }
            }
            let mut word = Vec::with_capacity(parent.word.len() + 1);
            word.push(i);
            word.extend_from_slice(&parent.word);
            let elem = WeylElement {
                matrix: &gens[i] * &parent.matrix,
                lattice_action: action,
                sign: -parent.sign,
                word,
            };
            index.insert(img.clone(), elements.len());
            images.push(img);
            elements.push(elem);
            if elements.len() > MAX_WEYL_ORDER {
                return Err(Error::InvalidCartan("Weyl group exceeds size cap".into()));
            }
        }
        head += 1;
    }
    Ok((elements, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(r: usize) -> RootSystem {
        build_root_system("A", r).unwrap()
    }

    #[test]
    fn root_counts() {
        assert_eq!(a(1).roots().len(), 2);
        assert_eq!(a(1).num_positive_roots(), 1);
        assert_eq!(a(2).roots().len(), 6);
        assert_eq!(a(2).num_positive_roots(), 3);
        assert_eq!(a(3).roots().len(), 12);
        assert_eq!(a(3).num_positive_roots(), 6);
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(a(1).weyl_order(), 2);
        assert_eq!(a(2).weyl_order(), 6);
        assert_eq!(a(3).weyl_order(), 24);
        assert_eq!(a(4).weyl_order(), 120);
    }

    #[test]
    fn unsupported_type_is_rejected() {
        assert!(matches!(
            build_root_system("B", 2),
            Err(Error::UnsupportedType(_))
        ));
        assert!(build_root_system("A", 0).is_err());
    }

    #[test]
    fn cartan_validation() {
        assert!(RootSystem::from_cartan("x", vec![vec![2, -2], vec![-2, 2]]).is_err());
        assert!(RootSystem::from_cartan("x", vec![vec![2, -1], vec![0, 2]]).is_err());
        // affine A1~ is positive semi-definite only
        let affine = vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]];
        assert!(RootSystem::from_cartan("x", affine).is_err());
        // D4 through the extension hook
        let d4 = vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ];
        let rs = RootSystem::from_cartan("D4", d4).unwrap();
        assert_eq!(rs.roots().len(), 24);
        assert_eq!(rs.weyl_order(), 192);
    }

    #[test]
    fn root_axioms() {
        for r in 1..=4 {
            let rs = a(r);
            for root in rs.roots() {
                assert!((root.vector.norm_sq() - 2.0).abs() < 1e-12);
            }
            let (pos, neg) = rs.roots().split_at(rs.num_positive_roots());
            for (p, n) in pos.iter().zip(neg) {
                assert!((&p.vector + &n.vector).norm_sq() < 1e-24);
            }
            for alpha in rs.roots() {
                for beta in rs.roots() {
                    let img = rs.reflect(&alpha.vector, &beta.vector).unwrap();
                    assert!(rs.root_index(&img).is_some());
                }
            }
        }
    }

    #[test]
    fn delta_is_sum_of_fundamental_weights() {
        for r in 1..=4 {
            let rs = a(r);
            let mut half = Weight::zeros(r);
            for p in rs.positive_roots() {
                half = &half + &p.vector;
            }
            let half = &half * 0.5;
            assert!(half.approx_eq(rs.delta(), 1e-12));
            assert_eq!(rs.weight_to_lattice(rs.delta()), Some(rs.delta_lattice()));
        }
    }

    #[test]
    fn inner_products() {
        let a1 = a(1);
        let alpha = &a1.simple_roots()[0];
        assert!((a1.inner(alpha, alpha).unwrap() - 2.0).abs() < 1e-14);
        assert!((a1.inner(a1.delta(), a1.delta()).unwrap() - 0.5).abs() < 1e-14);
        let a2 = a(2);
        assert!((a2.inner(a2.delta(), a2.delta()).unwrap() - 2.0).abs() < 1e-14);
        let g = a2.gram();
        assert_eq!(g[(0, 1)], -1.0);
        assert!(matches!(
            a2.inner(a1.delta(), a2.delta()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!((a2.lattice_norm_sq(&a2.delta_lattice()) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn reflections() {
        let a1 = a(1);
        let alpha = a1.simple_roots()[0].clone();
        let img = a1.reflect(&alpha, &alpha).unwrap();
        assert!(img.approx_eq(&-&alpha, 1e-14));
        let a2 = a(2);
        let a1_2 = a2.simple_roots()[0].clone();
        let img = a2.reflect(&a1_2, a2.delta()).unwrap();
        assert!(img.approx_eq(&(a2.delta() - &a1_2), 1e-12));
        // a vector orthogonal to alpha is fixed
        let perp = &a2.simple_roots()[0] + &(&a2.simple_roots()[1] * 2.0);
        let img = a2.reflect(&a2.simple_roots()[0], &perp).unwrap();
        assert!(img.approx_eq(&perp, 1e-12));
        // delta is the highest root of A2, but 2*delta is not a root
        let two_delta = a2.delta() * 2.0;
        assert!(matches!(
            a2.reflect(&two_delta, a2.delta()),
            Err(Error::NotARoot)
        ));
    }

    #[test]
    fn dominant_representative_examples() {
        let a1 = a(1);
        let rep = a1.dominant_representative(&-a1.delta()).unwrap();
        assert!(rep.weight.approx_eq(a1.delta(), 1e-12));
        assert_eq!(rep.element.sign(), -1);
        assert!(!rep.on_wall);

        let rep = a1.dominant_representative(&Weight::zeros(1)).unwrap();
        assert!(rep.element.is_identity());
        assert!(rep.on_wall);

        let a2 = a(2);
        let rep = a2.dominant_representative(a2.delta()).unwrap();
        assert!(rep.element.is_identity());
        assert!(!rep.on_wall);
    }

    #[test]
    fn weyl_elements_are_consistent() {
        let rs = a(3);
        for w in rs.weyl_group() {
            let det = w.matrix().clone().determinant();
            assert!((det - w.sign() as f64).abs() < 1e-12);
            let wtw = w.matrix().transpose() * w.matrix();
            assert!((wtw - DMatrix::identity(3, 3)).amax() < 1e-12);
            // lattice action agrees with the matrix action
            let lam = LatticeWeight::new(vec![2, -1, 3]);
            let via_matrix = w.apply(&rs.lattice_to_weight(&lam));
            let via_lattice = rs.lattice_to_weight(&w.apply_lattice(&lam));
            assert!(via_matrix.approx_eq(&via_lattice, 1e-12));
        }
        let n = rs.weyl_order();
        for i in 0..n {
            assert_eq!(rs.compose(i, rs.inverse(i)), 0);
        }
    }

    proptest! {
        #[test]
        fn weyl_action_is_orthogonal(r in 1usize..=3, v in prop::collection::vec(-5.0f64..5.0, 3),
                                     u in prop::collection::vec(-5.0f64..5.0, 3)) {
            let rs = a(r);
            let v = Weight::new(v[..r].to_vec());
            let u = Weight::new(u[..r].to_vec());
            for w in rs.weyl_group() {
                let lhs = rs.inner(&w.apply(&v), &w.apply(&u)).unwrap();
                let rhs = rs.inner(&v, &u).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
        }

        #[test]
        fn sign_is_multiplicative(r in 1usize..=3, i in 0usize..24, j in 0usize..24) {
            let rs = a(r);
            let n = rs.weyl_order();
            let (i, j) = (i % n, j % n);
            let k = rs.compose(i, j);
            let g = rs.weyl_group();
            prop_assert_eq!(g[k].sign(), g[i].sign() * g[j].sign());
            let prod = g[i].matrix() * g[j].matrix();
            prop_assert!((prod - g[k].matrix()).amax() < 1e-12);
        }

        #[test]
        fn integrality_is_preserved(r in 1usize..=3, labels in prop::collection::vec(-6i64..6, 3)) {
            let rs = a(r);
            let lam = rs.lattice_to_weight(&LatticeWeight::new(labels[..r].to_vec()));
            for w in rs.weyl_group() {
                prop_assert!(rs.is_integral(&w.apply(&lam)));
            }
        }

        #[test]
        fn dominant_rep_is_idempotent(r in 1usize..=3, v in prop::collection::vec(-4.0f64..4.0, 3)) {
            let rs = a(r);
            let v = Weight::new(v[..r].to_vec());
            let rep = rs.dominant_representative(&v).unwrap();
            prop_assert!(rep.element.apply(&v).approx_eq(&rep.weight, 1e-9));
            for s in rs.simple_roots() {
                prop_assert!(s.dot(&rep.weight) >= -1e-9);
            }
            let again = rs.dominant_representative(&rep.weight).unwrap();
            prop_assert!(again.element.is_identity());
            prop_assert!(again.weight.approx_eq(&rep.weight, 1e-12));
        }

        #[test]
        fn dominant_lattice_matches_real(r in 1usize..=3, labels in prop::collection::vec(-6i64..6, 3)) {
            let rs = a(r);
            let lam = LatticeWeight::new(labels[..r].to_vec());
            let (mu, w) = rs.dominant_lattice(&lam);
            prop_assert!(mu.is_dominant());
            prop_assert_eq!(rs.weyl_group()[w].apply_lattice(&lam), mu.clone());
            let rep = rs.dominant_representative(&rs.lattice_to_weight(&lam)).unwrap();
            prop_assert!(rep.weight.approx_eq(&rs.lattice_to_weight(&mu), 1e-9));
        }
    }

    #[test]
    fn delta_orbit_is_regular() {
        for r in 1..=3 {
            let rs = a(r);
            let orbit: Vec<Weight> = rs.weyl_group().iter().map(|w| w.apply(rs.delta())).collect();
            for i in 0..orbit.len() {
                for j in i + 1..orbit.len() {
                    assert!(!orbit[i].approx_eq(&orbit[j], 1e-9));
                }
            }
        }
    }

    #[test]
    fn words_are_reduced_and_match_matrices() {
        let rs = a(3);
        for w in rs.weyl_group() {
            let mut m = DMatrix::identity(3, 3);
            for &i in w.word().iter().rev() {
                let s = &rs.simple_roots()[i];
                let refl = DMatrix::identity(3, 3) - s.as_vector() * s.as_vector().transpose();
                m = refl * m;
            }
            assert!((m - w.matrix()).amax() < 1e-12);
        }
        // longest element of A3 has length m = 6
        assert_eq!(rs.weyl_group().iter().map(|w| w.length()).max(), Some(6));
    }
}
