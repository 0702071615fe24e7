//! Inner products on `L²(T_C, ν′_ħ)`.
//!
//! `ν′_ħ` is the probability measure `(πħ)^{−r/2} e^{−|H₂|²/ħ} dH₂` times the
//! normalized Haar measure on `T`. Three independent integrators are
//! provided: a closed form from monomial orthogonality and Gaussian moments,
//! a tensor rule (uniform torus grid times Gauss–Hermite), and Monte Carlo.
//!
//! The torus is parametrized as `H₁ = Σ_j u_j · 2π α_j` with `u ∈ [0,1)^r`,
//! so the monomial of `λ` has integer frequency `λ_j` in `u_j`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{gauss_hermite, nodes_for_exponent};
use crate::laurent::{CompiledLaurent, LaurentClassFunction, TorusPointC};
use crate::roots::{LatticeWeight, RootSystem, Weight};

/// Samples per counter-keyed random stream in Monte Carlo runs.
pub const MC_BLOCK: usize = 4096;

/// The heat measure `ν′_ħ` on the complexified torus.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatMeasure {
    hbar: f64,
    rank: usize,
    lattice_basis: Vec<Weight>,
}

impl HeatMeasure {
    pub fn new(rs: &RootSystem, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidHbar(hbar));
        }
        Ok(HeatMeasure {
            hbar,
            rank: rs.rank(),
            lattice_basis: rs.simple_roots().iter().map(|a| a * (2.0 * PI)).collect(),
        })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Generators `2π α_j` of the kernel of `exp` on `t`.
    pub fn lattice_basis(&self) -> &[Weight] {
        &self.lattice_basis
    }

    /// Gaussian density in the noncompact direction.
    pub fn density(&self, h2: &Weight) -> f64 {
        (PI * self.hbar).powf(-(self.rank as f64) / 2.0) * (-h2.norm_sq() / self.hbar).exp()
    }

    fn point(&self, u: &[f64], h2: Weight) -> TorusPointC {
        let mut h1 = Weight::zeros(self.rank);
        for (uj, b) in u.iter().zip(&self.lattice_basis) {
            h1 = &h1 + &(b * *uj);
        }
        TorusPointC { h1, h2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: Complex64,
    /// Zero for closed forms and certified quadrature; the standard error of
    /// the mean for Monte Carlo.
    pub abs_error_estimate: f64,
    pub method: Method,
    pub samples_or_nodes: usize,
    /// Quadrature only: the rule is exact for the declared bandwidth.
    pub certified: bool,
    /// Quadrature only: a declared bandwidth violates the node-count rule.
    pub exactness_warning: bool,
}

impl IntegralResult {
    fn closed(value: Complex64, terms: usize) -> Self {
        IntegralResult {
            value,
            abs_error_estimate: 0.0,
            method: Method::ClosedForm,
            samples_or_nodes: terms,
            certified: true,
            exactness_warning: false,
        }
    }
}

/// Frequency content of an integrand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bandwidth {
    /// Largest absolute integer frequency per lattice coordinate.
    pub torus: i64,
    /// Largest absolute orthonormal coordinate of a support weight.
    pub extent: f64,
}

impl Bandwidth {
    pub fn of(rs: &RootSystem, f: &LaurentClassFunction) -> Self {
        let extent = f
            .support()
            .map(|w| {
                rs.lattice_to_weight(w)
                    .coords()
                    .iter()
                    .fold(0.0f64, |m, c| m.max(c.abs()))
            })
            .fold(0.0, f64::max);
        Bandwidth {
            torus: f.max_abs_label(),
            extent,
        }
    }

    pub fn max(self, other: Bandwidth) -> Bandwidth {
        Bandwidth {
            torus: self.torus.max(other.torus),
            extent: self.extent.max(other.extent),
        }
    }
}

/// Node counts of the tensor rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub torus_points_per_dim: usize,
    pub hermite_nodes_per_dim: usize,
}

impl QuadratureSpec {
    pub fn new(torus_points_per_dim: usize, hermite_nodes_per_dim: usize) -> Self {
        QuadratureSpec {
            torus_points_per_dim,
            hermite_nodes_per_dim,
        }
    }

    /// Smallest rule that is exact on the torus (`N = 2B + 1`) and resolves
    /// the Gaussian moments to double precision.
    pub fn exact_for(bw: Bandwidth, hbar: f64) -> Self {
        QuadratureSpec {
            torus_points_per_dim: (2 * bw.torus + 1) as usize,
            hermite_nodes_per_dim: nodes_for_exponent(hbar.sqrt() * bw.extent),
        }
    }

    pub fn is_exact_for(&self, bw: Bandwidth, hbar: f64) -> bool {
        self.torus_points_per_dim as i64 > 2 * bw.torus
            && self.hermite_nodes_per_dim >= nodes_for_exponent(hbar.sqrt() * bw.extent)
    }
}

/// A function on `T_C` that the numerical integrators can sample.
pub trait TorusIntegrand: Sync {
    /// Value at `z`; `zeta` holds the fundamental monomials at `z`.
    fn eval(&self, z: &TorusPointC, zeta: &[Complex64], scratch: &mut Vec<Complex64>)
        -> Complex64;

    /// Declared frequency content, if known.
    fn bandwidth(&self) -> Option<Bandwidth>;
}

/// A Laurent sum prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct LaurentIntegrand {
    compiled: CompiledLaurent,
    bandwidth: Bandwidth,
}

impl LaurentIntegrand {
    pub fn new(rs: &RootSystem, f: &LaurentClassFunction) -> Self {
        LaurentIntegrand {
            compiled: CompiledLaurent::new(f),
            bandwidth: Bandwidth::of(rs, f),
        }
    }
}

impl TorusIntegrand for LaurentIntegrand {
    fn eval(&self, _z: &TorusPointC, zeta: &[Complex64], scratch: &mut Vec<Complex64>) -> Complex64 {
        self.compiled.eval(zeta, scratch)
    }

    fn bandwidth(&self) -> Option<Bandwidth> {
        Some(self.bandwidth)
    }
}

/// An arbitrary closure, with an optional declared bandwidth.
pub struct FnIntegrand<F> {
    f: F,
    bandwidth: Option<Bandwidth>,
}

impl<F> FnIntegrand<F>
where
    F: Fn(&TorusPointC) -> Complex64 + Sync,
{
    pub fn new(f: F, bandwidth: Option<Bandwidth>) -> Self {
        FnIntegrand { f, bandwidth }
    }
}

impl<F> TorusIntegrand for FnIntegrand<F>
where
    F: Fn(&TorusPointC) -> Complex64 + Sync,
{
    fn eval(&self, z: &TorusPointC, _zeta: &[Complex64], _scratch: &mut Vec<Complex64>) -> Complex64 {
        (self.f)(z)
    }

    fn bandwidth(&self) -> Option<Bandwidth> {
        self.bandwidth
    }
}

/// `(πħ)^{−r/2} ∫ e^{2⟨λ,H⟩} e^{−|H|²/ħ} dH = e^{ħ‖λ‖²}`.
pub fn gaussian_moment(lambda: &Weight, hm: &HeatMeasure) -> f64 {
    (hm.hbar * lambda.norm_sq()).exp()
}

/// `⟨f, g⟩_{ν′} = Σ_λ f_λ conj(g_λ) e^{ħ‖λ‖²}`.
pub fn inner_closed_form(
    rs: &RootSystem,
    f: &LaurentClassFunction,
    g: &LaurentClassFunction,
    hm: &HeatMeasure,
) -> IntegralResult {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    for (lambda, a) in f.terms() {
        let b = g.coeff(lambda);
        if b != Complex64::new(0.0, 0.0) {
            acc += a * b.conj() * (hm.hbar * rs.lattice_norm_sq(lambda)).exp();
            terms += 1;
        }
    }
    IntegralResult::closed(acc, terms)
}

/// `⟨f, g⟩_{L²(T)}` against normalized Haar measure, `Σ_λ f_λ conj(g_λ)`.
pub fn torus_inner_closed_form(f: &LaurentClassFunction, g: &LaurentClassFunction) -> Complex64 {
    f.terms().map(|(l, a)| a * g.coeff(l).conj()).sum()
}

fn torus_phases(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

fn multi_index(mut k: usize, base: usize, out: &mut [usize]) {
    for slot in out.iter_mut() {
        *slot = k % base;
        k /= base;
    }
}

fn same_integrand(f: &dyn TorusIntegrand, g: &dyn TorusIntegrand) -> bool {
    std::ptr::addr_eq(f as *const dyn TorusIntegrand, g as *const dyn TorusIntegrand)
}

fn product(
    f: &dyn TorusIntegrand,
    g: &dyn TorusIntegrand,
    same: bool,
    z: &TorusPointC,
    zeta: &[Complex64],
    scratch: &mut Vec<Complex64>,
) -> Complex64 {
    let a = f.eval(z, zeta, scratch);
    if same {
        Complex64::new(a.norm_sqr(), 0.0)
    } else {
        a * g.eval(z, zeta, scratch).conj()
    }
}

/// Trapezoid rule on the torus with `n` points per lattice coordinate.
///
/// Exact for trigonometric polynomials whose integer frequencies are below
/// `n` in absolute value.
pub fn torus_inner_quadrature(
    rs: &RootSystem,
    f: &dyn TorusIntegrand,
    g: &dyn TorusIntegrand,
    n: usize,
) -> IntegralResult {
    let r = rs.rank();
    let hm = HeatMeasure::new(rs, 1.0).expect("unit heat parameter");
    let phases = torus_phases(n);
    let same = same_integrand(f, g);
    let total = n.pow(r as u32);
    let mut idx = vec![0usize; r];
    let mut u = vec![0.0; r];
    let mut zeta = vec![Complex64::new(0.0, 0.0); r];
    let mut scratch = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..total {
        multi_index(k, n, &mut idx);
        for j in 0..r {
            u[j] = idx[j] as f64 / n as f64;
            zeta[j] = phases[idx[j]];
        }
        let z = hm.point(&u, Weight::zeros(r));
        acc += product(f, g, same, &z, &zeta, &mut scratch);
    }
    let bw = f.bandwidth().zip(g.bandwidth()).map(|(a, b)| a.max(b));
    let certified = bw.is_some_and(|b| n as i64 > 2 * b.torus);
    IntegralResult {
        value: acc / total as f64,
        abs_error_estimate: 0.0,
        method: Method::Quadrature,
        samples_or_nodes: total,
        certified,
        exactness_warning: bw.is_some() && !certified,
    }
}

fn tensor_rule(
    rs: &RootSystem,
    f: &dyn TorusIntegrand,
    g: &dyn TorusIntegrand,
    hm: &HeatMeasure,
    spec: QuadratureSpec,
) -> Complex64 {
    let r = rs.rank();
    let n = spec.torus_points_per_dim.max(1);
    let m = spec.hermite_nodes_per_dim.max(1);
    let (x, w) = gauss_hermite(m);
    let phases = torus_phases(n);
    let scale = hm.hbar.sqrt();
    let norm = PI.powf(-(r as f64) / 2.0) / (n as f64).powi(r as i32);
    let same = same_integrand(f, g);
    let hermite_total = m.pow(r as u32);
    let torus_total = n.pow(r as u32);

    let partial: Vec<Complex64> = (0..hermite_total)
        .into_par_iter()
        .map(|hk| {
            let mut hidx = vec![0usize; r];
            multi_index(hk, m, &mut hidx);
            let h2 = Weight::new(hidx.iter().map(|&i| scale * x[i]).collect());
            let weight: f64 = hidx.iter().map(|&i| w[i]).product();
            let amp: Vec<f64> = rs
                .fundamental_weights()
                .iter()
                .map(|fw| fw.dot(&h2).exp())
                .collect();
            let mut tidx = vec![0usize; r];
            let mut u = vec![0.0; r];
            let mut zeta = vec![Complex64::new(0.0, 0.0); r];
            let mut scratch = Vec::new();
            let mut acc = Complex64::new(0.0, 0.0);
            for tk in 0..torus_total {
                multi_index(tk, n, &mut tidx);
                for j in 0..r {
                    u[j] = tidx[j] as f64 / n as f64;
                    zeta[j] = phases[tidx[j]] * amp[j];
                }
                let z = hm.point(&u, h2.clone());
                acc += product(f, g, same, &z, &zeta, &mut scratch);
            }
            acc * weight
        })
        .collect();
    partial.into_iter().sum::<Complex64>() * norm
}

/// `⟨f, g⟩_{ν′}` by the tensor rule: uniform torus grid composed with
/// Gauss–Hermite in each noncompact direction after `H₂ = √ħ · u`.
///
/// Inside the exactness regime of the declared bandwidths the result is
/// certified with zero error; otherwise the error estimate is the change
/// against the rule with half the nodes.
pub fn inner_quadrature(
    rs: &RootSystem,
    f: &dyn TorusIntegrand,
    g: &dyn TorusIntegrand,
    hm: &HeatMeasure,
    spec: QuadratureSpec,
) -> IntegralResult {
    let value = tensor_rule(rs, f, g, hm, spec);
    let bw = f.bandwidth().zip(g.bandwidth()).map(|(a, b)| a.max(b));
    let certified = bw.is_some_and(|b| spec.is_exact_for(b, hm.hbar));
    let abs_error_estimate = if certified {
        0.0
    } else {
        let coarse = QuadratureSpec::new(
            (spec.torus_points_per_dim / 2).max(1),
            (spec.hermite_nodes_per_dim / 2).max(1),
        );
        (value - tensor_rule(rs, f, g, hm, coarse)).norm()
    };
    let r = rs.rank() as u32;
    IntegralResult {
        value,
        abs_error_estimate,
        method: Method::Quadrature,
        samples_or_nodes: spec.torus_points_per_dim.pow(r) * spec.hermite_nodes_per_dim.pow(r),
        certified,
        exactness_warning: bw.is_some() && !certified,
    }
}

/// Tensor-rule inner product of two Laurent sums; picks the exact rule when
/// `spec` is `None`.
pub fn inner_quadrature_laurent(
    rs: &RootSystem,
    f: &LaurentClassFunction,
    g: &LaurentClassFunction,
    hm: &HeatMeasure,
    spec: Option<QuadratureSpec>,
) -> IntegralResult {
    let fi = LaurentIntegrand::new(rs, f);
    if f == g {
        let spec = spec.unwrap_or_else(|| QuadratureSpec::exact_for(fi.bandwidth, hm.hbar));
        return inner_quadrature(rs, &fi, &fi, hm, spec);
    }
    let gi = LaurentIntegrand::new(rs, g);
    let spec = spec.unwrap_or_else(|| {
        QuadratureSpec::exact_for(fi.bandwidth.max(gi.bandwidth), hm.hbar)
    });
    inner_quadrature(rs, &fi, &gi, hm, spec)
}

/// Gram matrix `G_ij = ⟨f_i, f_j⟩_{ν′}` from one pass of the tensor rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GramResult {
    pub size: usize,
    /// Row-major entries.
    pub entries: Vec<Complex64>,
    pub spec: QuadratureSpec,
    pub certified: bool,
}

impl GramResult {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.size + j]
    }
}

/// Gram matrix of several Laurent sums by the tensor rule; picks the exact
/// rule for the joint bandwidth when `spec` is `None`.
pub fn gram_quadrature(
    rs: &RootSystem,
    fs: &[LaurentClassFunction],
    hm: &HeatMeasure,
    spec: Option<QuadratureSpec>,
) -> GramResult {
    let k = fs.len();
    let compiled: Vec<LaurentIntegrand> = fs.iter().map(|f| LaurentIntegrand::new(rs, f)).collect();
    let bw = compiled.iter().map(|c| c.bandwidth).reduce(Bandwidth::max);
    let spec = spec.unwrap_or_else(|| match bw {
        Some(b) => QuadratureSpec::exact_for(b, hm.hbar),
        None => QuadratureSpec::new(1, 1),
    });
    let r = rs.rank();
    let n = spec.torus_points_per_dim.max(1);
    let m = spec.hermite_nodes_per_dim.max(1);
    let (x, w) = gauss_hermite(m);
    let phases = torus_phases(n);
    let scale = hm.hbar.sqrt();
    let norm = PI.powf(-(r as f64) / 2.0) / (n as f64).powi(r as i32);

    let partial: Vec<Vec<Complex64>> = (0..m.pow(r as u32))
        .into_par_iter()
        .map(|hk| {
            let mut hidx = vec![0usize; r];
            multi_index(hk, m, &mut hidx);
            let h2 = Weight::new(hidx.iter().map(|&i| scale * x[i]).collect());
            let weight: f64 = hidx.iter().map(|&i| w[i]).product();
            let amp: Vec<f64> = rs
                .fundamental_weights()
                .iter()
                .map(|fw| fw.dot(&h2).exp())
                .collect();
            let mut tidx = vec![0usize; r];
            let mut zeta = vec![Complex64::new(0.0, 0.0); r];
            let mut scratch = Vec::new();
            let mut vals = vec![Complex64::new(0.0, 0.0); k];
            let mut acc = vec![Complex64::new(0.0, 0.0); k * k];
            for tk in 0..n.pow(r as u32) {
                multi_index(tk, n, &mut tidx);
                for j in 0..r {
                    zeta[j] = phases[tidx[j]] * amp[j];
                }
                for (v, c) in vals.iter_mut().zip(&compiled) {
                    *v = c.compiled.eval(&zeta, &mut scratch);
                }
                for i in 0..k {
                    for j in 0..k {
                        acc[i * k + j] += vals[i] * vals[j].conj();
                    }
                }
            }
            acc.iter().map(|a| a * weight).collect()
        })
        .collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); k * k];
    for p in partial {
        for (e, v) in entries.iter_mut().zip(p) {
            *e += v * norm;
        }
    }
    GramResult {
        size: k,
        entries,
        spec,
        certified: bw.is_some_and(|b| spec.is_exact_for(b, hm.hbar)),
    }
}

/// Monte Carlo settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
    /// Pair every draw `(H₁, H₂)` with `(H₁, −H₂)`.
    pub antithetic: bool,
    /// Thread count; `None` uses the ambient rayon pool. Results do not
    /// depend on it.
    pub workers: Option<usize>,
}

impl McOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        McOptions {
            samples,
            seed,
            antithetic: true,
            workers: None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Moments {
    count: f64,
    mean: Complex64,
    m2: f64,
}

impl Moments {
    fn empty() -> Self {
        Moments {
            count: 0.0,
            mean: Complex64::new(0.0, 0.0),
            m2: 0.0,
        }
    }

    fn push(&mut self, y: Complex64) {
        self.count += 1.0;
        let d = y - self.mean;
        self.mean += d / self.count;
        self.m2 += (d * (y - self.mean).conj()).re;
    }

    fn merge(self, other: Moments) -> Moments {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count: n,
            mean: self.mean + d * (other.count / n),
            m2: self.m2 + other.m2 + d.norm_sqr() * self.count * other.count / n,
        }
    }
}

/// `⟨f, g⟩_{ν′}` by Monte Carlo: `H₁` uniform on the fundamental domain and
/// `H₂ ~ N(0, ħ/2 · I)`.
///
/// Draws come from ChaCha streams keyed by block index, and block moments
/// are merged in index order, so the result is bit-identical for any worker
/// count.
pub fn inner_monte_carlo(
    rs: &RootSystem,
    f: &dyn TorusIntegrand,
    g: &dyn TorusIntegrand,
    hm: &HeatMeasure,
    opts: &McOptions,
) -> Result<IntegralResult> {
    if opts.samples < 2 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least two samples".into(),
        ));
    }
    let antithetic = opts.antithetic && opts.samples >= 4;
    let per_unit = if antithetic { 2 } else { 1 };
    let units = opts.samples / per_unit;
    let units_per_block = MC_BLOCK / per_unit;
    let blocks = units.div_ceil(units_per_block);
    let r = rs.rank();
    let sd = (hm.hbar / 2.0).sqrt();
    let same = same_integrand(f, g);

    let run_block = |b: usize| -> Moments {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(b as u64);
        let count = units_per_block.min(units - b * units_per_block);
        let mut stats = Moments::empty();
        let mut u = vec![0.0; r];
        let mut zeta = vec![Complex64::new(0.0, 0.0); r];
        let mut scratch = Vec::new();
        for _ in 0..count {
            for uj in u.iter_mut() {
                *uj = rng.random::<f64>();
            }
            let h2 = Weight::new(
                (0..r)
                    .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            );
            let amp: Vec<f64> = rs
                .fundamental_weights()
                .iter()
                .map(|fw| fw.dot(&h2).exp())
                .collect();
            for j in 0..r {
                zeta[j] = Complex64::from_polar(amp[j], 2.0 * PI * u[j]);
            }
            let z = hm.point(&u, h2.clone());
            let mut y = product(f, g, same, &z, &zeta, &mut scratch);
            if antithetic {
                for j in 0..r {
                    zeta[j] = Complex64::from_polar(1.0 / amp[j], 2.0 * PI * u[j]);
                }
                let z = hm.point(&u, -&h2);
                y = (y + product(f, g, same, &z, &zeta, &mut scratch)) * 0.5;
            }
            stats.push(y);
        }
        stats
    };

    let collect = || -> Vec<Moments> { (0..blocks).into_par_iter().map(run_block).collect() };
    let per_block = match opts.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(collect),
        None => collect(),
    };
    let stats = per_block.into_iter().fold(Moments::empty(), Moments::merge);
    let var = if stats.count > 1.0 {
        stats.m2 / (stats.count - 1.0)
    } else {
        0.0
    };
    Ok(IntegralResult {
        value: stats.mean,
        abs_error_estimate: (var / stats.count).sqrt(),
        method: Method::MonteCarlo,
        samples_or_nodes: units * per_unit,
        certified: false,
        exactness_warning: false,
    })
}

/// Monte Carlo inner product of two Laurent sums.
pub fn inner_monte_carlo_laurent(
    rs: &RootSystem,
    f: &LaurentClassFunction,
    g: &LaurentClassFunction,
    hm: &HeatMeasure,
    opts: &McOptions,
) -> Result<IntegralResult> {
    let fi = LaurentIntegrand::new(rs, f);
    if f == g {
        return inner_monte_carlo(rs, &fi, &fi, hm, opts);
    }
    let gi = LaurentIntegrand::new(rs, g);
    inner_monte_carlo(rs, &fi, &gi, hm, opts)
}

/// The torus heat operator `e^{ħΔ_T/2}`: the coefficient at `λ` is scaled
/// by `e^{−ħ‖λ‖²/2}`.
pub fn sb_scale_torus(rs: &RootSystem, f: &LaurentClassFunction, hbar: f64) -> LaurentClassFunction {
    LaurentClassFunction::from_terms(f.terms().map(|(l, c)| {
        (l.clone(), c * (-0.5 * hbar * rs.lattice_norm_sq(l)).exp())
    }))
}

/// `‖μ+δ‖² − ‖δ‖²`, minus the Laplacian eigenvalue on `χ_μ`.
pub fn casimir_shift(rs: &RootSystem, mu: &LatticeWeight) -> Result<f64> {
    rs.check_lattice_dim(mu)?;
    if !mu.is_dominant() {
        return Err(Error::NotDominant(mu.labels().to_vec()));
    }
    let delta = rs.delta_lattice();
    Ok(rs.lattice_norm_sq(&(mu + &delta)) - rs.lattice_norm_sq(&delta))
}

/// `∫_{SU(2)} |χ_k|²` against normalized Haar measure, by direct quadrature
/// over the unit quaternions.
///
/// `U = [[a+ib, c+id], [−c+id, a−ib]]` with hyperspherical angles
/// `(ψ, ϑ, φ)`; Haar measure is `sin²ψ dψ d(cos ϑ) dφ`. The character of
/// the `(k+1)`-dimensional representation comes from the Clebsch–Gordan
/// recurrence `χ_{j+1} = tr(U) χ_j − χ_{j−1}`. Midpoint rules are used in
/// every angle and the result is divided by the rule's total mass.
pub fn haar_norm_su2(k: u32, grid: usize) -> f64 {
    let grid = grid.max(2);
    let side = (grid / 4).max(2);
    let mut num = 0.0;
    let mut mass = 0.0;
    for ip in 0..grid {
        let psi = (ip as f64 + 0.5) * PI / grid as f64;
        let (s, a) = psi.sin_cos();
        let rho = s * s;
        for ic in 0..side {
            let cos_t = -1.0 + (ic as f64 + 0.5) * 2.0 / side as f64;
            let sin_t = (1.0 - cos_t * cos_t).sqrt();
            for iphi in 0..side {
                let phi = (iphi as f64 + 0.5) * 2.0 * PI / side as f64;
                let b = s * cos_t;
                let c = s * sin_t * phi.cos();
                let d = s * sin_t * phi.sin();
                let u = [
                    [Complex64::new(a, b), Complex64::new(c, d)],
                    [Complex64::new(-c, d), Complex64::new(a, -b)],
                ];
                let tr = (u[0][0] + u[1][1]).re;
                let (mut prev, mut cur) = (1.0, tr);
                let chi = if k == 0 {
                    1.0
                } else {
                    for _ in 1..k {
                        let next = tr * cur - prev;
                        prev = cur;
                        cur = next;
                    }
                    cur
                };
                num += chi * chi * rho;
                mass += rho;
            }
        }
    }
    num / mass
}
