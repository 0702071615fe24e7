//! Sparse Laurent class functions on the complexified maximal torus.
//!
//! A point of `T_C` is written `z = exp(H₁) exp(−i H₂)` with `H₁, H₂ ∈ t`,
//! and the monomial attached to an integral weight `λ` takes the value
//! `exp(i⟨λ, H₁⟩) exp(⟨λ, H₂⟩)` there. Lattice points are exact Dynkin
//! labels; all roundoff lives in the complex coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{LatticeWeight, RootSystem, Weight, WeylElement};

/// Relative tolerance for alternation checks.
pub const ALTERNATION_TOL: f64 = 1e-12;

/// Relative magnitude above which a wall coefficient counts as nonzero.
pub const WALL_TOL: f64 = 1e-15;

/// Below this magnitude of the Weyl denominator characters are evaluated
/// from their weight expansion only.
pub const NEAR_SINGULAR: f64 = 1e-9;

/// A point `exp(H₁) exp(−i H₂)` of the complexified torus.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPointC {
    pub h1: Weight,
    pub h2: Weight,
}

impl TorusPointC {
    pub fn new(h1: Weight, h2: Weight) -> Result<Self> {
        if h1.dim() != h2.dim() {
            return Err(Error::DimensionMismatch {
                expected: h1.dim(),
                got: h2.dim(),
            });
        }
        Ok(TorusPointC { h1, h2 })
    }

    pub fn identity(rank: usize) -> Self {
        TorusPointC {
            h1: Weight::zeros(rank),
            h2: Weight::zeros(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.h1.dim()
    }

    /// The complex pairing `⟨v, H₁ − i H₂⟩`.
    pub fn pairing(&self, v: &Weight) -> Complex64 {
        Complex64::new(v.dot(&self.h1), -v.dot(&self.h2))
    }

    /// Value of the monomial `e^{i⟨λ,·⟩}` at this point.
    pub fn monomial(&self, lambda: &Weight) -> Complex64 {
        (Complex64::i() * self.pairing(lambda)).exp()
    }

    /// Values of the monomials of the fundamental weights.
    pub fn fundamental_monomials(&self, rs: &RootSystem) -> Vec<Complex64> {
        rs.fundamental_weights()
            .iter()
            .map(|w| self.monomial(w))
            .collect()
    }

    /// The Weyl group action `w · z`.
    pub fn act(&self, w: &WeylElement) -> TorusPointC {
        TorusPointC {
            h1: w.apply(&self.h1),
            h2: w.apply(&self.h2),
        }
    }
}

/// One serialized term of a [`LaurentClassFunction`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentTerm {
    pub weight: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

/// A finite Fourier–Laurent sum `Σ c_λ e^{i⟨λ,·⟩}` over integral weights.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<LaurentTerm>", from = "Vec<LaurentTerm>")]
pub struct LaurentClassFunction {
    terms: BTreeMap<LatticeWeight, Complex64>,
}

impl From<LaurentClassFunction> for Vec<LaurentTerm> {
    fn from(f: LaurentClassFunction) -> Self {
        f.terms
            .into_iter()
            .map(|(w, c)| LaurentTerm {
                weight: w.labels().to_vec(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }
}

impl From<Vec<LaurentTerm>> for LaurentClassFunction {
    fn from(terms: Vec<LaurentTerm>) -> Self {
        let mut f = LaurentClassFunction::new();
        for t in terms {
            f.add_term(LatticeWeight::new(t.weight), Complex64::new(t.re, t.im));
        }
        f
    }
}

impl LaurentClassFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(lambda: LatticeWeight, c: Complex64) -> Self {
        let mut f = Self::new();
        f.add_term(lambda, c);
        f
    }

    pub fn constant(rank: usize, c: Complex64) -> Self {
        Self::monomial(LatticeWeight::zero(rank), c)
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (LatticeWeight, Complex64)>,
    {
        let mut f = Self::new();
        for (w, c) in terms {
            f.add_term(w, c);
        }
        f
    }

    /// Adds `c` to the coefficient at `lambda`; exact zeros are removed.
    pub fn add_term(&mut self, lambda: LatticeWeight, c: Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self.terms.entry(lambda) {
            Entry::Vacant(v) => {
                if c != zero {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == zero {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, lambda: &LatticeWeight) -> Complex64 {
        self.terms
            .get(lambda)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LatticeWeight, &Complex64)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &LatticeWeight> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn rank(&self) -> Option<usize> {
        self.terms.keys().next().map(|w| w.rank())
    }

    /// Largest absolute Dynkin label over the support; the per-dimension
    /// integer frequency of the function in lattice coordinates.
    pub fn max_abs_label(&self) -> i64 {
        self.terms
            .keys()
            .map(|w| w.max_abs_label())
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, v)| (w.clone(), v * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Product in the Laurent algebra (convolution of supports).
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a + b, ca * cb);
            }
        }
        out
    }

    /// Drops coefficients with magnitude at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }

    /// Applies a Weyl element to the exponents: `(w·f)(z) = f(w⁻¹·z)`.
    pub fn act(&self, w: &WeylElement) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, c)| (w.apply_lattice(l), *c)))
    }

    /// Evaluates the sum at `z` using tables of powers of the fundamental
    /// monomials.
    pub fn evaluate(&self, rs: &RootSystem, z: &TorusPointC) -> Complex64 {
        if self.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let compiled = CompiledLaurent::new(self);
        let mut scratch = Vec::new();
        compiled.eval(&z.fundamental_monomials(rs), &mut scratch)
    }

    /// Evaluates every monomial with its own complex exponential.
    pub fn evaluate_direct(&self, rs: &RootSystem, z: &TorusPointC) -> Complex64 {
        self.terms
            .iter()
            .map(|(l, c)| c * z.monomial(&rs.lattice_to_weight(l)))
            .sum()
    }
}

/// A Laurent sum flattened for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledLaurent {
    rank: usize,
    lo: Vec<i64>,
    span: Vec<usize>,
    // per term: table offsets into the concatenated power tables
    offsets: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl CompiledLaurent {
    pub fn new(f: &LaurentClassFunction) -> Self {
        let rank = f.rank().unwrap_or(0);
        let mut lo = vec![0i64; rank];
        let mut hi = vec![0i64; rank];
        for w in f.support() {
            for (j, &l) in w.labels().iter().enumerate() {
                lo[j] = lo[j].min(l);
                hi[j] = hi[j].max(l);
            }
        }
        let span: Vec<usize> = (0..rank).map(|j| (hi[j] - lo[j] + 1) as usize).collect();
        let mut base = vec![0usize; rank];
        for j in 1..rank {
            base[j] = base[j - 1] + span[j - 1];
        }
        let mut offsets = Vec::with_capacity(f.len() * rank);
        let mut coeffs = Vec::with_capacity(f.len());
        for (w, c) in f.terms() {
            for (j, &l) in w.labels().iter().enumerate() {
                offsets.push(base[j] + (l - lo[j]) as usize);
            }
            coeffs.push(*c);
        }
        CompiledLaurent {
            rank,
            lo,
            span,
            offsets,
            coeffs,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluates at the point whose fundamental monomials are `zeta`.
    pub fn eval(&self, zeta: &[Complex64], table: &mut Vec<Complex64>) -> Complex64 {
        if self.coeffs.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        table.clear();
        for (j, &zj) in zeta.iter().enumerate().take(self.rank) {
            let start = table.len();
            table.resize(start + self.span[j], Complex64::new(0.0, 0.0));
            let lo = self.lo[j];
            let hi = lo + self.span[j] as i64 - 1;
            let zero = (-lo) as usize;
            // exponent 0 sits at `zero` when lo <= 0 <= hi
            if lo <= 0 && hi >= 0 {
                table[start + zero] = Complex64::new(1.0, 0.0);
                let mut p = Complex64::new(1.0, 0.0);
                for k in 1..=hi {
                    p *= zj;
                    table[start + zero + k as usize] = p;
                }
                let inv = zj.inv();
                let mut p = Complex64::new(1.0, 0.0);
                for k in 1..=(-lo) {
                    p *= inv;
                    table[start + zero - k as usize] = p;
                }
            } else {
                let mut p = zj.powi(lo as i32);
                for k in 0..self.span[j] {
                    table[start + k] = p;
                    p *= zj;
                }
            }
        }
        let r = self.rank;
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, c) in self.coeffs.iter().enumerate() {
            let mut m = *c;
            for off in &self.offsets[t * r..(t + 1) * r] {
                m *= table[*off];
            }
            acc += m;
        }
        acc
    }
}

/// The alternating orbit sum `N_λ = Σ_w sign(w) e^{i⟨wλ,·⟩}` for a strictly
/// dominant integral weight.
pub fn weyl_numerator(rs: &RootSystem, lambda: &LatticeWeight) -> Result<LaurentClassFunction> {
    if lambda.rank() != rs.rank() {
        return Err(Error::DimensionMismatch {
            expected: rs.rank(),
            got: lambda.rank(),
        });
    }
    if !lambda.is_dominant() {
        return Err(Error::NotDominant(lambda.labels().to_vec()));
    }
    if !lambda.is_strictly_dominant() {
        return Err(Error::OnWall(lambda.labels().to_vec()));
    }
    Ok(LaurentClassFunction::from_terms(rs.weyl_group().iter().map(
        |w| (w.apply_lattice(lambda), Complex64::new(w.sign() as f64, 0.0)),
    )))
}

/// The Weyl denominator `(2i)^m ∏_{α>0} sin(⟨α, H₁ − iH₂⟩ / 2)` by the
/// product formula.
pub fn sigma_product(rs: &RootSystem, z: &TorusPointC) -> Complex64 {
    let m = rs.num_positive_roots() as i32;
    let prefactor = Complex64::new(0.0, 2.0).powi(m);
    rs.positive_roots()
        .iter()
        .map(|a| (z.pairing(&a.vector) * 0.5).sin())
        .fold(prefactor, |acc, s| acc * s)
}

fn order_key(height: &[i64], lambda: &LatticeWeight) -> i64 {
    height.iter().zip(lambda.labels()).map(|(h, l)| h * l).sum()
}

fn leading_term(height: &[i64], f: &LaurentClassFunction) -> Option<(LatticeWeight, Complex64)> {
    f.terms()
        .max_by(|(a, _), (b, _)| {
            order_key(height, a)
                .cmp(&order_key(height, b))
                .then_with(|| a.cmp(b))
        })
        .map(|(w, c)| (w.clone(), *c))
}

/// Exact division `f / g` in the Laurent algebra.
///
/// Uses the monomial order given by pairing with `2δ`, ties broken
/// lexicographically. Fails with [`Error::InexactDivision`] when `g` does
/// not divide `f`.
pub fn divide_exact(
    rs: &RootSystem,
    f: &LaurentClassFunction,
    g: &LaurentClassFunction,
) -> Result<LaurentClassFunction> {
    if g.is_empty() {
        return Err(Error::InvalidArgument("division by the zero function".into()));
    }
    let height: Vec<i64> = (0..rs.rank())
        .map(|j| rs.positive_roots().iter().map(|a| a.simple_coords[j]).sum())
        .collect();
    let (g_lead, g_coeff) = leading_term(&height, g).expect("nonempty");
    let g_min = g.support().map(|w| order_key(&height, w)).min().unwrap_or(0);
    let f_min = f.support().map(|w| order_key(&height, w)).min().unwrap_or(0);
    let floor = f_min - g_min;
    let tol = 1e-12 * f.max_abs_coeff().max(1.0);

    let mut remainder = f.clone();
    let mut quotient = LaurentClassFunction::new();
    let cap = 16 * (f.len() + 1) * (g.len() + 1) + 1024;
    for _ in 0..cap {
        remainder = remainder.pruned(tol);
        let Some((lead, c)) = leading_term(&height, &remainder) else {
            return Ok(quotient);
        };
        let q_weight = &lead - &g_lead;
        if order_key(&height, &q_weight) < floor {
            return Err(Error::InexactDivision);
        }
        let q = c / g_coeff;
        quotient.add_term(q_weight.clone(), q);
        let step = g
            .multiply(&LaurentClassFunction::monomial(q_weight, q))
            .scale(Complex64::new(-1.0, 0.0));
        remainder = remainder.add(&step);
    }
    Err(Error::InexactDivision)
}

/// Weight expansion of the irreducible character with highest weight `mu`,
/// computed as `N_{μ+δ} / N_δ`.
pub fn character_coeffs(rs: &RootSystem, mu: &LatticeWeight) -> Result<LaurentClassFunction> {
    if mu.rank() != rs.rank() {
        return Err(Error::DimensionMismatch {
            expected: rs.rank(),
            got: mu.rank(),
        });
    }
    if !mu.is_dominant() {
        return Err(Error::NotDominant(mu.labels().to_vec()));
    }
    let delta = rs.delta_lattice();
    let num = weyl_numerator(rs, &(mu + &delta))?;
    let den = weyl_numerator(rs, &delta)?;
    divide_exact(rs, &num, &den)
}

/// Value of the character `χ_μ` at `z`.
///
/// Away from the walls this is the ratio `N_{μ+δ}(z) / σ_C(z)`; near them
/// the weight expansion is evaluated instead.
pub fn character_value(rs: &RootSystem, mu: &LatticeWeight, z: &TorusPointC) -> Result<Complex64> {
    let sigma = sigma_product(rs, z);
    if sigma.norm() < NEAR_SINGULAR {
        return Ok(character_coeffs(rs, mu)?.evaluate(rs, z));
    }
    let num = weyl_numerator(rs, &(mu + &rs.delta_lattice()))?;
    Ok(num.evaluate(rs, z) / sigma)
}

/// Whether `f(w·z) = sign(w) f(z)` holds coefficientwise for every `w`.
pub fn is_alternating(rs: &RootSystem, f: &LaurentClassFunction) -> bool {
    let tol = ALTERNATION_TOL * f.max_abs_coeff().max(1.0);
    f.terms().all(|(lambda, c)| {
        rs.weyl_group().iter().all(|w| {
            let expected = c * w.sign() as f64;
            (f.coeff(&w.apply_lattice(lambda)) - expected).norm() <= tol
        })
    })
}

/// Writes an alternating function as `Σ_μ c_μ N_{μ+δ}` over dominant `μ`.
pub fn decompose_alternating(
    rs: &RootSystem,
    phi: &LaurentClassFunction,
) -> Result<BTreeMap<LatticeWeight, Complex64>> {
    if !is_alternating(rs, phi) {
        return Err(Error::NotAlternating);
    }
    let tol = WALL_TOL * phi.max_abs_coeff().max(1.0);
    let delta = rs.delta_lattice();
    let mut out = BTreeMap::new();
    for (lambda, c) in phi.terms() {
        if !lambda.is_dominant() {
            continue;
        }
        if !lambda.is_strictly_dominant() {
            if c.norm() > tol {
                return Err(Error::WallCoefficient {
                    weight: lambda.labels().to_vec(),
                    coeff: c.norm(),
                });
            }
            continue;
        }
        out.insert(lambda - &delta, *c);
    }
    Ok(out)
}

/// `Σ_μ c_μ N_{μ+δ}` for dominant `μ`.
pub fn numerator_sum(
    rs: &RootSystem,
    coeffs: &BTreeMap<LatticeWeight, Complex64>,
) -> Result<LaurentClassFunction> {
    let delta = rs.delta_lattice();
    let mut out = LaurentClassFunction::new();
    for (mu, c) in coeffs {
        if !mu.is_dominant() {
            return Err(Error::NotDominant(mu.labels().to_vec()));
        }
        let n = weyl_numerator(rs, &(mu + &delta))?;
        for (w, s) in n.terms() {
            out.add_term(w.clone(), s * c);
        }
    }
    Ok(out)
}

/// All dominant weights with level at most `max_level`, in lexicographic
/// order.
pub fn dominant_weights(rank: usize, max_level: i64) -> Vec<LatticeWeight> {
    fn rec(rank: usize, left: i64, prefix: &mut Vec<i64>, out: &mut Vec<LatticeWeight>) {
        if prefix.len() == rank {
            out.push(LatticeWeight::new(prefix.clone()));
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(rank, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if max_level >= 0 {
        rec(rank, max_level, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::build_root_system;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn lw(v: &[i64]) -> LatticeWeight {
        LatticeWeight::new(v.to_vec())
    }

    fn a(r: usize) -> RootSystem {
        build_root_system("A", r).unwrap()
    }

    /// Point with `⟨α, H₁⟩ = theta` and `⟨α, H₂⟩ = s` in A1.
    fn a1_point(rs: &RootSystem, theta: f64, s: f64) -> TorusPointC {
        let alpha = &rs.simple_roots()[0];
        TorusPointC::new(alpha * (theta / 2.0), alpha * (s / 2.0)).unwrap()
    }

    #[test]
    fn numerator_examples() {
        let a1 = a(1);
        let n = weyl_numerator(&a1, &lw(&[1])).unwrap();
        assert_eq!(n.coeff(&lw(&[1])), c(1.0));
        assert_eq!(n.coeff(&lw(&[-1])), c(-1.0));
        assert_eq!(n.len(), 2);

        let n = weyl_numerator(&a1, &lw(&[2])).unwrap();
        assert_eq!(n.coeff(&lw(&[2])), c(1.0));
        assert_eq!(n.coeff(&lw(&[-2])), c(-1.0));

        let a2 = a(2);
        let n = weyl_numerator(&a2, &lw(&[1, 1])).unwrap();
        assert_eq!(n.len(), 6);
        assert!(n.terms().all(|(_, v)| v.norm() == 1.0));
        let sum: Complex64 = n.terms().map(|(_, v)| v).sum();
        assert_eq!(sum, c(0.0));

        assert!(matches!(
            weyl_numerator(&a2, &lw(&[0, 1])),
            Err(Error::OnWall(_))
        ));
        assert!(matches!(
            weyl_numerator(&a2, &lw(&[-1, 2])),
            Err(Error::NotDominant(_))
        ));
    }

    #[test]
    fn sigma_examples() {
        let a1 = a(1);
        let theta = 0.7;
        let z = a1_point(&a1, theta, 0.0);
        let expected = Complex64::new(0.0, 2.0 * (theta / 2.0).sin());
        assert!((sigma_product(&a1, &z) - expected).norm() < 1e-15);

        for r in 1..=3 {
            let rs = a(r);
            assert_eq!(sigma_product(&rs, &TorusPointC::identity(r)).norm(), 0.0);
        }

        let s = 1.3;
        let z = a1_point(&a1, 0.0, s);
        let sig = sigma_product(&a1, &z);
        assert!((sig.norm_sqr() - 4.0 * (s / 2.0).sinh().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn evaluate_examples() {
        let a1 = a(1);
        let one = LaurentClassFunction::constant(1, c(1.0));
        let z = a1_point(&a1, 0.4, -0.9);
        assert!((one.evaluate(&a1, &z) - c(1.0)).norm() < 1e-15);

        let n = weyl_numerator(&a1, &lw(&[1])).unwrap();
        let theta = 1.1;
        let z = a1_point(&a1, theta, 0.0);
        let expected = Complex64::new(0.0, 2.0 * (theta / 2.0).sin());
        assert!((n.evaluate(&a1, &z) - expected).norm() < 1e-14);

        let s = 0.8;
        let z = a1_point(&a1, 0.0, s);
        assert!((n.evaluate(&a1, &z) - c(2.0 * (s / 2.0).sinh())).norm() < 1e-14);
    }

    #[test]
    fn character_examples() {
        let a1 = a(1);
        assert_eq!(
            character_coeffs(&a1, &lw(&[0])).unwrap(),
            LaurentClassFunction::constant(1, c(1.0))
        );
        let chi = character_coeffs(&a1, &lw(&[1])).unwrap();
        assert_eq!(chi.len(), 2);
        assert_eq!(chi.coeff(&lw(&[1])), c(1.0));
        assert_eq!(chi.coeff(&lw(&[-1])), c(1.0));

        let a2 = a(2);
        let chi = character_coeffs(&a2, &lw(&[1, 0])).unwrap();
        assert_eq!(chi.len(), 3);
        assert!(chi.terms().all(|(_, v)| *v == c(1.0)));
        // defining representation weights: w1, w2 - w1, -w2
        for w in [lw(&[1, 0]), lw(&[-1, 1]), lw(&[0, -1])] {
            assert_eq!(chi.coeff(&w), c(1.0));
        }
        // adjoint of A2 has dimension 8 with a doubled zero weight
        let adj = character_coeffs(&a2, &lw(&[1, 1])).unwrap();
        let dim: Complex64 = adj.terms().map(|(_, v)| v).sum();
        assert_eq!(dim, c(8.0));
        assert_eq!(adj.coeff(&lw(&[0, 0])), c(2.0));

        assert!(matches!(
            character_coeffs(&a2, &lw(&[1, -1])),
            Err(Error::NotDominant(_))
        ));
    }

    #[test]
    fn multiply_examples() {
        let a1 = a(1);
        let n = weyl_numerator(&a1, &lw(&[1])).unwrap();
        assert_eq!(n.multiply(&LaurentClassFunction::constant(1, c(1.0))), n);
        let k = Complex64::new(2.0, -3.0);
        assert_eq!(
            n.multiply(&LaurentClassFunction::constant(1, k)),
            n.scale(k)
        );
        let chi = character_coeffs(&a1, &lw(&[1])).unwrap();
        assert_eq!(chi.multiply(&n), weyl_numerator(&a1, &lw(&[2])).unwrap());
    }

    #[test]
    fn alternating_examples() {
        let a1 = a(1);
        let n = weyl_numerator(&a1, &lw(&[1])).unwrap();
        assert!(is_alternating(&a1, &n));
        assert!(!is_alternating(&a1, &LaurentClassFunction::constant(1, c(1.0))));
        let a2 = a(2);
        for mu in dominant_weights(2, 3).into_iter().filter(|m| !m.is_zero()) {
            assert!(!is_alternating(&a2, &character_coeffs(&a2, &mu).unwrap()));
        }
    }

    #[test]
    fn decompose_examples() {
        let a1 = a(1);
        let n1 = weyl_numerator(&a1, &lw(&[1])).unwrap();
        let d = decompose_alternating(&a1, &n1).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&lw(&[0])], c(1.0));

        let n2 = weyl_numerator(&a1, &lw(&[2])).unwrap();
        let phi = n1.add(&n2.scale(c(2.0)));
        let d = decompose_alternating(&a1, &phi).unwrap();
        assert_eq!(d[&lw(&[0])], c(1.0));
        assert_eq!(d[&lw(&[1])], c(2.0));

        assert!(decompose_alternating(&a1, &LaurentClassFunction::new())
            .unwrap()
            .is_empty());
        assert!(matches!(
            decompose_alternating(&a1, &LaurentClassFunction::constant(1, c(1.0))),
            Err(Error::NotAlternating)
        ));
    }

    #[test]
    fn wall_coefficient_below_alternation_tolerance_is_reported() {
        // a tiny wall coefficient passes the alternation test but is flagged
        let a1 = a(1);
        let mut phi = weyl_numerator(&a1, &lw(&[1])).unwrap();
        phi.add_term(lw(&[0]), c(1e-16));
        assert!(is_alternating(&a1, &phi));
        assert!(decompose_alternating(&a1, &phi).is_ok());
        let mut phi = weyl_numerator(&a1, &lw(&[1])).unwrap().scale(c(1e3));
        phi.add_term(lw(&[0]), c(1e-10));
        assert!(is_alternating(&a1, &phi));
        assert!(matches!(
            decompose_alternating(&a1, &phi),
            Err(Error::WallCoefficient { .. })
        ));
    }

    #[test]
    fn division_detects_non_divisible() {
        let a1 = a(1);
        let n = weyl_numerator(&a1, &lw(&[1])).unwrap();
        let f = LaurentClassFunction::constant(1, c(1.0));
        assert!(matches!(
            divide_exact(&a1, &f, &n),
            Err(Error::InexactDivision)
        ));
    }

    #[test]
    fn dominant_weight_enumeration() {
        assert_eq!(dominant_weights(1, 5).len(), 6);
        assert_eq!(dominant_weights(2, 5).len(), 21);
        assert_eq!(dominant_weights(3, 2).len(), 10);
        assert!(dominant_weights(2, 4).iter().all(|w| w.is_dominant()));
    }

    #[test]
    fn serialization_roundtrip() {
        let a2 = a(2);
        let f = character_coeffs(&a2, &lw(&[2, 1]))
            .unwrap()
            .scale(Complex64::new(0.5, -1.25));
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.starts_with("[{\"weight\":["));
        let back: LaurentClassFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    fn random_point(r: usize, seed: &[f64]) -> TorusPointC {
        TorusPointC::new(
            Weight::new(seed[..r].to_vec()),
            Weight::new(seed[3..3 + r].to_vec()),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn denominator_product_equals_orbit_sum(r in 1usize..=3,
                                                seed in prop::collection::vec(-3.0f64..3.0, 6)) {
            let rs = a(r);
            let z = random_point(r, &seed);
            let n = weyl_numerator(&rs, &rs.delta_lattice()).unwrap();
            let sp = sigma_product(&rs, &z);
            let ns = n.evaluate(&rs, &z);
            prop_assert!((sp - ns).norm() <= 1e-10 * (1.0 + sp.norm()));
        }

        #[test]
        fn table_evaluation_matches_direct(r in 1usize..=3, level in 0i64..4,
                                           seed in prop::collection::vec(-1.5f64..1.5, 6)) {
            let rs = a(r);
            let z = random_point(r, &seed);
            let mu = LatticeWeight::fundamental(r, r - 1, level);
            let f = character_coeffs(&rs, &mu).unwrap();
            let x = f.evaluate(&rs, &z);
            let y = f.evaluate_direct(&rs, &z);
            prop_assert!((x - y).norm() <= 1e-11 * (1.0 + y.norm()));
        }

        #[test]
        fn denominator_alternates(r in 1usize..=3, seed in prop::collection::vec(-3.0f64..3.0, 6)) {
            let rs = a(r);
            let z = random_point(r, &seed);
            let n = weyl_numerator(&rs, &rs.delta_lattice()).unwrap();
            let base = n.evaluate(&rs, &z);
            for w in rs.weyl_group() {
                let v = n.evaluate(&rs, &z.act(w));
                prop_assert!((v - base * w.sign() as f64).norm() <= 1e-10 * (1.0 + base.norm()));
            }
        }

        #[test]
        fn characters_are_invariant(r in 1usize..=3, idx in 0usize..10,
                                    seed in prop::collection::vec(-2.0f64..2.0, 6)) {
            let rs = a(r);
            let weights = dominant_weights(r, 2);
            let mu = &weights[idx % weights.len()];
            let chi = character_coeffs(&rs, mu).unwrap();
            let z = random_point(r, &seed);
            let base = chi.evaluate(&rs, &z);
            for w in rs.weyl_group() {
                let v = chi.evaluate(&rs, &z.act(w));
                prop_assert!((v - base).norm() <= 1e-10 * (1.0 + base.norm()));
            }
        }

        #[test]
        fn weyl_character_formula_is_exact(r in 1usize..=3, idx in 0usize..35) {
            let rs = a(r);
            let weights = dominant_weights(r, 4);
            let mu = &weights[idx % weights.len()];
            let chi = character_coeffs(&rs, mu).unwrap();
            let den = weyl_numerator(&rs, &rs.delta_lattice()).unwrap();
            let num = weyl_numerator(&rs, &(mu + &rs.delta_lattice())).unwrap();
            prop_assert_eq!(chi.multiply(&den), num);
        }

        #[test]
        fn decompose_inverts_synthesis(r in 1usize..=3,
                                       picks in prop::collection::vec((0usize..35, -3.0f64..3.0, -3.0f64..3.0), 1..8)) {
            let rs = a(r);
            let weights = dominant_weights(r, 4);
            let coeffs: BTreeMap<LatticeWeight, Complex64> = picks
                .iter()
                .map(|(i, re, im)| (weights[i % weights.len()].clone(), Complex64::new(*re, *im)))
                .collect();
            let phi = numerator_sum(&rs, &coeffs).unwrap();
            prop_assert!(is_alternating(&rs, &phi));
            let back = decompose_alternating(&rs, &phi).unwrap();
            prop_assert_eq!(back, coeffs);
        }

        #[test]
        fn near_wall_character_values_are_finite(r in 1usize..=3, eps in -1e-12f64..1e-12) {
            // the identity is the most singular point; dimension falls out
            let rs = a(r);
            let mu = LatticeWeight::fundamental(r, 0, 2);
            let z = TorusPointC::new(&rs.delta().clone() * eps, Weight::zeros(r)).unwrap();
            let v = character_value(&rs, &mu, &z).unwrap();
            let dim: Complex64 = character_coeffs(&rs, &mu).unwrap().terms().map(|(_, c)| c).sum();
            prop_assert!((v - dim).norm() < 1e-9);
        }
    }
}
