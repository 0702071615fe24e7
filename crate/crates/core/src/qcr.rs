//! The invariant and reduced quantum Hilbert spaces as coefficient spaces,
//! the map `B: F ↦ σ_C · F|_{T_C}` between them, and its unitarity up to
//! the constant `e^{−ħ‖δ‖²}`.
//!
//! An [`InvariantState`] holds `F = Σ_μ c_μ χ_μ` by its character
//! coefficients; a [`ReducedState`] holds an alternating Laurent sum `φ` on
//! `T_C`. Since `σ_C χ_μ = N_{μ+δ}`, the map `B` sends `{μ: c}` to
//! `c·N_{μ+δ}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{
    character_coeffs, decompose_alternating, dominant_weights, numerator_sum, sigma_product,
    LaurentClassFunction, LaurentTerm, TorusPointC,
};
use crate::measures::{
    casimir_shift, inner_closed_form, inner_monte_carlo_laurent, inner_quadrature_laurent,
    HeatMeasure, IntegralResult, McOptions, QuadratureSpec,
};
use crate::reduction::EPS_REG;
use crate::roots::{LatticeWeight, RootSystem};

fn check_hbar(hbar: f64) -> Result<()> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidHbar(hbar));
    }
    Ok(())
}

/// A holomorphic class function on `K_C` by its character coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantState {
    coeffs: BTreeMap<LatticeWeight, Complex64>,
    hbar: f64,
}

impl InvariantState {
    /// Zero coefficients are dropped.
    pub fn new(
        rs: &RootSystem,
        coeffs: BTreeMap<LatticeWeight, Complex64>,
        hbar: f64,
    ) -> Result<Self> {
        check_hbar(hbar)?;
        for mu in coeffs.keys() {
            rs.check_lattice_dim(mu)?;
            if !mu.is_dominant() {
                return Err(Error::NotDominant(mu.labels().to_vec()));
            }
        }
        let coeffs = coeffs
            .into_iter()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        Ok(InvariantState { coeffs, hbar })
    }

    /// The single character `χ_μ`.
    pub fn character(rs: &RootSystem, mu: LatticeWeight, hbar: f64) -> Result<Self> {
        InvariantState::new(rs, BTreeMap::from([(mu, Complex64::new(1.0, 0.0))]), hbar)
    }

    pub fn coeffs(&self) -> &BTreeMap<LatticeWeight, Complex64> {
        &self.coeffs
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &InvariantState) -> Result<InvariantState> {
        if self.hbar != other.hbar {
            return Err(Error::HbarMismatch(self.hbar, other.hbar));
        }
        let mut coeffs = self.coeffs.clone();
        for (mu, c) in &other.coeffs {
            *coeffs.entry(mu.clone()).or_default() += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(InvariantState {
            coeffs,
            hbar: self.hbar,
        })
    }

    /// `F = Σ c_μ χ_μ` as a Laurent sum on `T_C`.
    pub fn restriction(&self, rs: &RootSystem) -> Result<LaurentClassFunction> {
        let mut out = LaurentClassFunction::new();
        for (mu, c) in &self.coeffs {
            out = out.add(&character_coeffs(rs, mu)?.scale(*c));
        }
        Ok(out)
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            hbar: self.hbar,
            terms: self
                .coeffs
                .iter()
                .map(|(w, c)| LaurentTerm {
                    weight: w.labels().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    pub fn from_file(rs: &RootSystem, file: &StateFile) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for t in &file.terms {
            *coeffs
                .entry(LatticeWeight::new(t.weight.clone()))
                .or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(t.re, t.im);
        }
        InvariantState::new(rs, coeffs, file.hbar)
    }
}

/// An alternating Laurent sum on `T_C`, the coefficient form of a reduced
/// section `φ e^{−|H₂|²/2ħ} / √σ_C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    phi: LaurentClassFunction,
    hbar: f64,
}

impl ReducedState {
    /// Rejects non-alternating input and non-negligible wall coefficients.
    pub fn new(rs: &RootSystem, phi: LaurentClassFunction, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        for w in phi.support() {
            rs.check_lattice_dim(w)?;
        }
        decompose_alternating(rs, &phi)?;
        Ok(ReducedState { phi, hbar })
    }

    pub fn phi(&self) -> &LaurentClassFunction {
        &self.phi
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            hbar: self.hbar,
            terms: self.phi.clone().into(),
        }
    }

    pub fn from_file(rs: &RootSystem, file: &StateFile) -> Result<Self> {
        ReducedState::new(rs, file.terms.clone().into(), file.hbar)
    }
}

/// On-disk form of either kind of state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub hbar: f64,
    pub terms: Vec<LaurentTerm>,
}

impl StateFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("state file: {e}")))
    }
}

/// `e^{−ħ‖δ‖²}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitarityConstant {
    pub value: f64,
}

impl UnitarityConstant {
    pub fn new(rs: &RootSystem, hbar: f64) -> Result<Self> {
        if !(hbar >= 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidHbar(hbar));
        }
        Ok(UnitarityConstant {
            value: (-hbar * rs.lattice_norm_sq(&rs.delta_lattice())).exp(),
        })
    }
}

/// `Σ_μ |c_μ|² e^{ħ c(μ)}`, the squared `L²(K_C, ν_ħ)` norm of `F`.
pub fn norm_sq_invariant(rs: &RootSystem, s: &InvariantState) -> Result<f64> {
    let mut acc = 0.0;
    for (mu, c) in &s.coeffs {
        acc += c.norm_sqr() * (s.hbar * casimir_shift(rs, mu)?).exp();
    }
    Ok(acc)
}

/// `F ↦ σ_C · F|_{T_C} = Σ_μ c_μ N_{μ+δ}`.
pub fn b_map(rs: &RootSystem, s: &InvariantState) -> Result<ReducedState> {
    Ok(ReducedState {
        phi: numerator_sum(rs, &s.coeffs)?,
        hbar: s.hbar,
    })
}

/// The unique invariant state mapping to `t`.
pub fn b_inverse(rs: &RootSystem, t: &ReducedState) -> Result<InvariantState> {
    let coeffs = decompose_alternating(rs, &t.phi)?;
    InvariantState::new(rs, coeffs, t.hbar)
}

/// Integration method for reduced norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormMethod {
    ClosedForm,
    /// `None` selects the exact rule for the state's bandwidth.
    Quadrature(Option<QuadratureSpec>),
    MonteCarlo(McOptions),
}

/// `(1/|W|) ⟨φ, φ⟩_{ν′_ħ}`.
pub fn norm_sq_reduced(
    rs: &RootSystem,
    t: &ReducedState,
    method: NormMethod,
) -> Result<IntegralResult> {
    let hm = HeatMeasure::new(rs, t.hbar)?;
    let f = &t.phi;
    let mut r = match method {
        NormMethod::ClosedForm => inner_closed_form(rs, f, f, &hm),
        NormMethod::Quadrature(spec) => inner_quadrature_laurent(rs, f, f, &hm, spec),
        NormMethod::MonteCarlo(opts) => inner_monte_carlo_laurent(rs, f, f, &hm, &opts)?,
    };
    let order = rs.weyl_order() as f64;
    r.value /= order;
    r.abs_error_estimate /= order;
    Ok(r)
}

/// Outcome of comparing the two norms of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitarityCheck {
    /// `‖F‖² / ‖B F‖²`.
    pub ratio: f64,
    /// `e^{−ħ‖δ‖²}`.
    pub expected: f64,
    pub rel_err: f64,
    pub norm_invariant: f64,
    pub reduced: IntegralResult,
}

impl UnitarityCheck {
    /// The reduced norm predicted from the invariant one.
    pub fn predicted_reduced(&self) -> f64 {
        self.norm_invariant / self.expected
    }

    /// Whether the prediction lies within `k` error estimates of the
    /// computed reduced norm.
    pub fn covered(&self, k: f64) -> bool {
        (self.reduced.value.re - self.predicted_reduced()).abs() <= k * self.reduced.abs_error_estimate
    }
}

pub fn unitarity_check(
    rs: &RootSystem,
    s: &InvariantState,
    method: NormMethod,
) -> Result<UnitarityCheck> {
    if s.is_zero() {
        return Err(Error::ZeroState);
    }
    let norm_invariant = norm_sq_invariant(rs, s)?;
    let reduced = norm_sq_reduced(rs, &b_map(rs, s)?, method)?;
    let ratio = norm_invariant / reduced.value.re;
    let expected = UnitarityConstant::new(rs, s.hbar)?.value;
    Ok(UnitarityCheck {
        ratio,
        expected,
        rel_err: (ratio / expected - 1.0).abs(),
        norm_invariant,
        reduced,
    })
}

/// `|φ(z)| e^{−|H₂|²/2ħ} / |σ_C(z)|^{1/2}`.
pub fn reduced_pointwise_magnitude(
    rs: &RootSystem,
    t: &ReducedState,
    z: &TorusPointC,
) -> Result<f64> {
    let sigma = sigma_product(rs, z).norm();
    if sigma <= EPS_REG {
        return Err(Error::SingularPoint(sigma));
    }
    let phi = t.phi.evaluate(rs, z).norm();
    Ok(phi * (-z.h2.norm_sq() / (2.0 * t.hbar)).exp() / sigma.sqrt())
}

/// A state with `n_terms` distinct dominant weights of level at most
/// `max_level` and standard complex Gaussian coefficients.
pub fn random_invariant_state<R: Rng + ?Sized>(
    rs: &RootSystem,
    hbar: f64,
    n_terms: usize,
    max_level: i64,
    rng: &mut R,
) -> Result<InvariantState> {
    let mut pool = dominant_weights(rs.rank(), max_level);
    if pool.len() < n_terms {
        return Err(Error::InvalidArgument(format!(
            "only {} dominant weights up to level {max_level}",
            pool.len()
        )));
    }
    let mut coeffs = BTreeMap::new();
    for _ in 0..n_terms {
        let mu = pool.swap_remove(rng.random_range(0..pool.len()));
        let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        coeffs.insert(mu, c);
    }
    InvariantState::new(rs, coeffs, hbar)
}

/// Smallest level whose dominant weights number at least `n_terms`.
pub fn level_for_terms(rank: usize, n_terms: usize) -> i64 {
    let mut level = 0;
    while dominant_weights(rank, level).len() < n_terms {
        level += 1;
    }
    level
}
