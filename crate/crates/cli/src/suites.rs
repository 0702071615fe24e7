//! The verification suites. Each suite turns a configuration into report
//! rows; all randomness is derived from the campaign seed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use qcr_core::laurent::{dominant_weights, numerator_sum, weyl_numerator, LaurentClassFunction};
use qcr_core::measures::{
    gram_quadrature, haar_norm_su2, inner_closed_form, inner_quadrature_laurent, sb_scale_torus,
    torus_inner_closed_form, torus_inner_quadrature, Bandwidth, HeatMeasure, LaurentIntegrand,
    McOptions, QuadratureSpec,
};
use qcr_core::qcr::{
    b_inverse, b_map, level_for_terms, random_invariant_state, unitarity_check, InvariantState,
    NormMethod, ReducedState, StateFile,
};
use qcr_core::reduction::{
    classify_battery, det_contraction, normalizer_representative, orientation_sign,
    permutation_sign, permutations, random_angles, samples_to_csv, weight_dictionary,
    weyl_element_of, SampleRecord,
};
use qcr_core::roots::{build_root_system, LatticeWeight, RootSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::config::CampaignConfig;
use crate::report::{rel_err, Report, ReportRow, SuiteSummary};
use crate::CliError;

/// Largest rank for which tensor quadrature rows are produced.
const QUADRATURE_MAX_RANK: usize = 2;
/// Largest absolute label of the random torus polynomials.
const SB_BANDWIDTH: i64 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Isometry,
    WeylIntegral,
    Orthogonality,
    Reduction,
    DetIdentity,
    QcrRoundtrip,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Isometry,
        Suite::WeylIntegral,
        Suite::Orthogonality,
        Suite::Reduction,
        Suite::DetIdentity,
        Suite::QcrRoundtrip,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Isometry => "isometry",
            Suite::WeylIntegral => "weyl-integral",
            Suite::Orthogonality => "orthogonality",
            Suite::Reduction => "reduction",
            Suite::DetIdentity => "det-identity",
            Suite::QcrRoundtrip => "qcr-roundtrip",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Isometry => {
                "reduced norm of each character against exp(hbar |mu+delta|^2) and the norm ratio \
                 against exp(-hbar |delta|^2) by closed form, quadrature and Monte Carlo; heat-scaled \
                 torus polynomials against the torus L2 norm"
            }
            Suite::WeylIntegral => {
                "Weyl integration formula: Haar norms of SU(2) characters and torus norms of \
                 sigma times a character divided by the Weyl group order"
            }
            Suite::Orthogonality => {
                "Gram matrix of Weyl numerators in the heat measure: vanishing off-diagonal and \
                 closed-form diagonal"
            }
            Suite::Reduction => {
                "regular points of the zero set: agreement of three regularity tests, contraction \
                 determinant on the battery, orientation signs of Weyl group representatives"
            }
            Suite::DetIdentity => {
                "det(Ad of z inverse minus identity) on the root spaces equals (-1)^m sigma(z)^2"
            }
            Suite::QcrRoundtrip => {
                "reduction map on holomorphic class functions: exact inverse on both sides and \
                 norm ratio exp(-hbar |delta|^2)"
            }
        }
    }

    fn tag(self) -> u64 {
        self as u64 + 1
    }

    pub fn run(self, cfg: &CampaignConfig) -> Result<SuiteOutput, CliError> {
        let mut out = SuiteOutput::new(self, cfg.timings);
        match self {
            Suite::Isometry => isometry(cfg, &mut out)?,
            Suite::WeylIntegral => weyl_integral(cfg, &mut out)?,
            Suite::Orthogonality => orthogonality(cfg, &mut out)?,
            Suite::Reduction => reduction(cfg, &mut out)?,
            Suite::DetIdentity => det_identity(cfg, &mut out)?,
            Suite::QcrRoundtrip => qcr_roundtrip(cfg, &mut out)?,
        }
        Ok(out)
    }
}

/// Rows of one suite in generation order.
#[derive(Clone, Debug)]
pub struct SuiteOutput {
    pub suite: Suite,
    pub rows: Vec<ReportRow>,
    pub skipped: usize,
    timings: bool,
}

impl SuiteOutput {
    fn new(suite: Suite, timings: bool) -> Self {
        SuiteOutput {
            suite,
            rows: Vec::new(),
            skipped: 0,
            timings,
        }
    }

    /// Appends a row that passes when `rel_err(lhs, rhs) ≤ tol`.
    fn check(&mut self, start: Instant, case: String, method: &str, lhs: f64, rhs: f64, tol: f64) {
        let e = rel_err(lhs, rhs);
        self.push(start, case, method, lhs, rhs, e, e <= tol);
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        start: Instant,
        case: String,
        method: &str,
        lhs: f64,
        rhs: f64,
        rel_err: f64,
        pass: bool,
    ) {
        let runtime_ms = if self.timings {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        self.rows.push(ReportRow {
            suite: self.suite.id().into(),
            case,
            lhs,
            rhs,
            rel_err,
            method: method.into(),
            pass,
            runtime_ms,
        });
    }

    fn summary(&self) -> SuiteSummary {
        SuiteSummary {
            description: self.suite.description().into(),
            rows: self.rows.len(),
            failed: self.rows.iter().filter(|r| !r.pass).count(),
            skipped: self.skipped,
        }
    }
}

/// Runs the suites concurrently and merges their rows in suite order.
pub fn run_suites(cfg: &CampaignConfig, suites: &[Suite]) -> Result<Report, CliError> {
    let mut suites = suites.to_vec();
    suites.sort();
    suites.dedup();
    let outputs: Vec<SuiteOutput> = suites
        .par_iter()
        .map(|s| s.run(cfg))
        .collect::<Result<_, _>>()?;
    let summaries = outputs
        .iter()
        .map(|o| (o.suite.id().to_string(), o.summary()))
        .collect();
    let rows = outputs.into_iter().flat_map(|o| o.rows).collect();
    Ok(Report::new(cfg, summaries, rows))
}

/// SplitMix64 finalizer over the seed, a suite tag and an index.
fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    let mut z = seed
        ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(cfg: &CampaignConfig, suite: Suite, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, suite.tag(), index))
}

fn label(w: &LatticeWeight) -> String {
    let parts: Vec<String> = w.labels().iter().map(|l| l.to_string()).collect();
    format!("[{}]", parts.join(" "))
}

fn root_system(cfg: &CampaignConfig) -> Result<RootSystem, CliError> {
    Ok(build_root_system("A", cfg.rank)?)
}

/// The configured node counts, completed by the exact rule for `bw`.
fn quadrature_spec(cfg: &CampaignConfig, bw: Bandwidth, hbar: f64) -> Option<QuadratureSpec> {
    if cfg.torus_points_per_dim.is_none() && cfg.hermite_nodes.is_none() {
        return None;
    }
    let exact = QuadratureSpec::exact_for(bw, hbar);
    Some(QuadratureSpec::new(
        cfg.torus_points_per_dim.unwrap_or(exact.torus_points_per_dim),
        cfg.hermite_nodes.unwrap_or(exact.hermite_nodes_per_dim),
    ))
}

fn numerator(rs: &RootSystem, mu: &LatticeWeight) -> Result<LaurentClassFunction, CliError> {
    Ok(weyl_numerator(rs, &(mu + &rs.delta_lattice()))?)
}

fn isometry(cfg: &CampaignConfig, out: &mut SuiteOutput) -> Result<(), CliError> {
    let rs = root_system(cfg)?;
    let delta = rs.delta_lattice();
    let weights = dominant_weights(cfg.rank, cfg.max_level);
    for (hi, &hbar) in cfg.hbar_list.iter().enumerate() {
        for (mi, mu) in weights.iter().enumerate() {
            let s = InvariantState::character(&rs, mu.clone(), hbar)?;
            let shifted = rs.lattice_norm_sq(&(mu + &delta));
            let expected_norm = (hbar * shifted).exp();
            let case = format!("hbar={hbar};mu={}", label(mu));

            let mut methods = vec![("closed_form", NormMethod::ClosedForm, cfg.tol(cfg.tol_closed_form))];
            if cfg.rank <= QUADRATURE_MAX_RANK {
                let bw = Bandwidth::of(&rs, &numerator(&rs, mu)?);
                let spec = quadrature_spec(cfg, bw, hbar);
                methods.push(("quadrature", NormMethod::Quadrature(spec), cfg.tol(cfg.tol_quadrature)));
            } else {
                out.skipped += 1;
            }
            if 2.0 * hbar * shifted <= cfg.mc_max_log_variance {
                let index = (hi * weights.len() + mi) as u64;
                let opts = McOptions::new(cfg.mc_samples, derive_seed(cfg.seed, Suite::Isometry.tag(), index));
                methods.push(("monte_carlo", NormMethod::MonteCarlo(opts), f64::NAN));
            } else {
                out.skipped += 1;
            }

            for (name, method, tol) in methods {
                let start = Instant::now();
                let c = unitarity_check(&rs, &s, method)?;
                let reduced = c.reduced.value.re;
                if matches!(method, NormMethod::MonteCarlo(_)) {
                    let covered = c.covered(cfg.sigmas());
                    out.push(
                        start,
                        format!("{case};reduced-norm"),
                        name,
                        reduced,
                        expected_norm,
                        rel_err(reduced, expected_norm),
                        (reduced - expected_norm).abs() <= cfg.sigmas() * c.reduced.abs_error_estimate,
                    );
                    out.push(start, format!("{case};ratio"), name, c.ratio, c.expected, c.rel_err, covered);
                } else {
                    out.check(start, format!("{case};reduced-norm"), name, reduced, expected_norm, tol);
                    out.check(start, format!("{case};ratio"), name, c.ratio, c.expected, tol);
                }
            }
        }
    }
    sb_rows(cfg, &rs, out)
}

/// Heat-scaled torus polynomials: their heat-measure norm equals the torus
/// norm of the unscaled polynomial.
fn sb_rows(cfg: &CampaignConfig, rs: &RootSystem, out: &mut SuiteOutput) -> Result<(), CliError> {
    let r = rs.rank();
    let tol = cfg.tol(cfg.tol_isometry_torus);
    let mut rng = rng_for(cfg, Suite::Isometry, u64::MAX);
    for i in 0..cfg.sb_samples {
        let start = Instant::now();
        let hbar = cfg.hbar_list[rng.random_range(0..cfg.hbar_list.len())];
        let mut f = LaurentClassFunction::new();
        for _ in 0..rng.random_range(1..=12) {
            let w = LatticeWeight::new((0..r).map(|_| rng.random_range(-SB_BANDWIDTH..=SB_BANDWIDTH)).collect());
            f.add_term(w, Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        }
        let fi = LaurentIntegrand::new(rs, &f);
        let n = 2 * SB_BANDWIDTH as usize + 1;
        let torus = torus_inner_quadrature(rs, &fi, &fi, n).value.re;
        let hm = HeatMeasure::new(rs, hbar)?;
        let g = sb_scale_torus(rs, &f, hbar);
        let case = format!("sb={i};hbar={hbar}");
        let closed = inner_closed_form(rs, &g, &g, &hm).value.re;
        out.check(start, case.clone(), "closed_form", closed, torus, tol);
        let exact_torus = torus_inner_closed_form(&f, &f).re;
        out.check(start, case.clone(), "torus_closed_form", exact_torus, torus, tol);
        if r <= QUADRATURE_MAX_RANK {
            let start = Instant::now();
            let spec = quadrature_spec(cfg, Bandwidth::of(rs, &g), hbar);
            let quad = inner_quadrature_laurent(rs, &g, &g, &hm, spec).value.re;
            out.check(start, case, "quadrature", quad, torus, tol);
        } else {
            out.skipped += 1;
        }
    }
    Ok(())
}

fn weyl_integral(cfg: &CampaignConfig, out: &mut SuiteOutput) -> Result<(), CliError> {
    let tol_haar = cfg.tol(cfg.tol_haar);
    let tol = cfg.tol(cfg.tol_closed_form);
    let a1 = build_root_system("A", 1)?;
    for k in 0..=cfg.haar_max_k {
        let start = Instant::now();
        let haar = haar_norm_su2(k, cfg.haar_grid);
        out.check(start, format!("su2;k={k}"), "haar_quadrature", haar, 1.0, tol_haar);
    }
    let mut torus_case = |rs: &RootSystem, mu: &LatticeWeight, case: String| -> Result<(), CliError> {
        let start = Instant::now();
        let f = numerator(rs, mu)?;
        let order = rs.weyl_order() as f64;
        let closed = torus_inner_closed_form(&f, &f).re / order;
        out.check(start, case.clone(), "torus_closed_form", closed, 1.0, tol);
        let start = Instant::now();
        let fi = LaurentIntegrand::new(rs, &f);
        let n = 2 * f.max_abs_label() as usize + 1;
        let quad = torus_inner_quadrature(rs, &fi, &fi, n).value.re / order;
        out.check(start, case, "torus_quadrature", quad, 1.0, tol);
        Ok(())
    };
    for k in 0..=cfg.haar_max_k {
        torus_case(&a1, &LatticeWeight::new(vec![k as i64]), format!("A1;mu=[{k}]"))?;
    }
    if cfg.rank > 1 {
        let rs = root_system(cfg)?;
        for mu in dominant_weights(cfg.rank, cfg.max_level) {
            torus_case(&rs, &mu, format!("A{};mu={}", cfg.rank, label(&mu)))?;
        }
    }
    Ok(())
}

fn orthogonality(cfg: &CampaignConfig, out: &mut SuiteOutput) -> Result<(), CliError> {
    let rs = root_system(cfg)?;
    let delta = rs.delta_lattice();
    let order = rs.weyl_order() as f64;
    let weights = dominant_weights(cfg.rank, cfg.max_level);
    let fs = weights.iter().map(|mu| numerator(&rs, mu)).collect::<Result<Vec<_>, _>>()?;
    let tol_off = cfg.tol(cfg.tol_orthogonality);
    for &hbar in &cfg.hbar_list {
        let hm = HeatMeasure::new(&rs, hbar)?;
        let diag: Vec<f64> = weights
            .iter()
            .map(|mu| order * (hbar * rs.lattice_norm_sq(&(mu + &delta))).exp())
            .collect();

        let start = Instant::now();
        let closed: Vec<Vec<Complex64>> = fs
            .iter()
            .map(|f| fs.iter().map(|g| inner_closed_form(&rs, f, g, &hm).value).collect())
            .collect();
        gram_rows(out, start, hbar, &weights, "closed_form", |i, j| closed[i][j], &diag, cfg.tol(cfg.tol_closed_form), tol_off);

        if cfg.rank <= QUADRATURE_MAX_RANK {
            let start = Instant::now();
            let bw = fs.iter().map(|f| Bandwidth::of(&rs, f)).reduce(Bandwidth::max);
            let spec = bw.and_then(|b| quadrature_spec(cfg, b, hbar));
            let g = gram_quadrature(&rs, &fs, &hm, spec);
            gram_rows(out, start, hbar, &weights, "quadrature", |i, j| g.get(i, j), &diag, cfg.tol(cfg.tol_quadrature), tol_off);
        } else {
            out.skipped += 1;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gram_rows(
    out: &mut SuiteOutput,
    start: Instant,
    hbar: f64,
    weights: &[LatticeWeight],
    method: &str,
    entry: impl Fn(usize, usize) -> Complex64,
    diag: &[f64],
    tol_diag: f64,
    tol_off: f64,
) {
    for i in 0..weights.len() {
        let case = format!("hbar={hbar};mu={}", label(&weights[i]));
        out.check(start, case, method, entry(i, i).re, diag[i], tol_diag);
    }
    for i in 0..weights.len() {
        for j in i + 1..weights.len() {
            let scale = (entry(i, i).re * entry(j, j).re).sqrt();
            let off = entry(i, j).norm() / scale;
            let case = format!(
                "hbar={hbar};mu={};nu={}",
                label(&weights[i]),
                label(&weights[j])
            );
            out.check(start, case, method, off, 0.0, tol_off);
        }
    }
}

/// Matrix sizes exercised by the matrix-group suites.
fn matrix_sizes(cfg: &CampaignConfig) -> Vec<usize> {
    let mut ns = vec![2, 3, cfg.rank + 1];
    ns.sort_unstable();
    ns.dedup();
    ns
}

fn reduction(cfg: &CampaignConfig, out: &mut SuiteOutput) -> Result<(), CliError> {
    let tol_det = cfg.tol(cfg.tol_det);
    let tol_band = cfg.tol(cfg.tol_band_fraction);
    let mut dump: Vec<SampleRecord> = Vec::new();
    for n in matrix_sizes(cfg) {
        let start = Instant::now();
        let seed = derive_seed(cfg.seed, Suite::Reduction.tag(), n as u64);
        let recs = classify_battery(n, cfg.reduction_samples, seed)?;
        let checked: Vec<&SampleRecord> = recs.iter().filter(|r| !r.report.indeterminate).collect();
        let disagree = checked.iter().filter(|r| !r.report.agree()).count();
        let irregular = checked.iter().filter(|r| !r.report.via_theorem).count();
        let total = recs.len() as f64;
        let fraction = checked.len() as f64 / total;
        out.push(
            start,
            format!("n={n};classifier-agreement;irregular={irregular}"),
            "three_way_classifier",
            disagree as f64,
            0.0,
            disagree as f64 / checked.len().max(1) as f64,
            disagree == 0,
        );
        out.check(start, format!("n={n};classified-fraction"), "three_way_classifier", fraction, 1.0, tol_band);
        let worst = recs.iter().map(|r| r.det_residual).fold(0.0, f64::max);
        out.check(start, format!("n={n};det-residual"), "matrix_determinant", worst, 0.0, tol_det);

        let dict = weight_dictionary(n)?;
        for p in permutations(n) {
            let start = Instant::now();
            let y = normalizer_representative(&p);
            let w = weyl_element_of(&dict, &y)?;
            let weyl_sign = dict.root_system().weyl_group()[w].sign();
            let s = orientation_sign(&dict, &y)?;
            let ok = s == weyl_sign && weyl_sign == permutation_sign(&p);
            let perm: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            out.push(
                start,
                format!("n={n};perm=[{}]", perm.join(" ")),
                "orientation_sign",
                s as f64,
                weyl_sign as f64,
                if ok { 0.0 } else { 1.0 },
                ok,
            );
        }
        dump.extend(recs);
    }
    if let Some(path) = &cfg.sample_dump {
        std::fs::write(path, samples_to_csv(&dump))
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn det_identity(cfg: &CampaignConfig, out: &mut SuiteOutput) -> Result<(), CliError> {
    let tol = cfg.tol(cfg.tol_det);
    for n in matrix_sizes(cfg) {
        let dict = weight_dictionary(n)?;
        let start = Instant::now();
        let (det, sq) = det_contraction(&dict, &qcr_core::laurent::TorusPointC::identity(n - 1));
        out.check(start, format!("n={n};identity"), "matrix_determinant", det.norm() + sq.norm(), 0.0, tol);

        let start = Instant::now();
        let mut rng = rng_for(cfg, Suite::DetIdentity, n as u64);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.det_samples {
            let z = dict.torus_point(&random_angles(n, &mut rng, PI), &random_angles(n, &mut rng, 1.5));
            let (det, sq) = det_contraction(&dict, &z);
            worst = worst.max((det - sq).norm() / sq.norm());
        }
        out.check(
            start,
            format!("n={n};random-points={}", cfg.det_samples),
            "matrix_determinant",
            worst,
            0.0,
            tol,
        );
    }
    let dict = weight_dictionary(2)?;
    let start = Instant::now();
    let z = dict.torus_point(&[0.0, 0.0], &[0.5, -0.5]);
    let (det, _) = det_contraction(&dict, &z);
    let expected = -4.0 * 0.5f64.sinh().powi(2);
    out.check(start, "n=2;s=1".into(), "matrix_determinant", det.re, expected, tol);
    Ok(())
}

fn qcr_roundtrip(cfg: &CampaignConfig, out: &mut SuiteOutput) -> Result<(), CliError> {
    let rs = root_system(cfg)?;
    let tol = cfg.tol(cfg.tol_unitarity);
    let level = level_for_terms(cfg.rank, cfg.state_terms);
    let mut rng = rng_for(cfg, Suite::QcrRoundtrip, 0);
    let first = cfg.hbar_list[0];
    for i in 0..cfg.state_count {
        let s = random_invariant_state(&rs, first, cfg.state_terms, level, &mut rng)?;
        state_rows(cfg, &rs, out, &format!("state={i}"), &s, tol)?;
    }

    let pool = dominant_weights(cfg.rank, level + 2);
    for i in 0..cfg.state_count {
        let start = Instant::now();
        let mut coeffs = BTreeMap::new();
        for _ in 0..rng.random_range(1..8) {
            let mu = pool[rng.random_range(0..pool.len())].clone();
            coeffs.insert(mu, Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
        }
        let t = ReducedState::new(&rs, numerator_sum(&rs, &coeffs)?, first)?;
        let back = b_map(&rs, &b_inverse(&rs, &t)?)?;
        let diff = back.phi().sub(t.phi()).max_abs_coeff();
        out.push(start, format!("alternating={i}"), "exact_roundtrip", diff, 0.0, diff, back == t);
    }

    if let Some(path) = &cfg.state_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let file = StateFile::from_json(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let s = InvariantState::from_file(&rs, &file)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if s.is_zero() {
            return Err(CliError::Config(format!("{}: state is zero", path.display())));
        }
        state_rows(cfg, &rs, out, "state-file", &s, tol)?;
    }
    Ok(())
}

/// Exact inverse at the state's own ħ and closed-form unitarity at every
/// configured ħ.
fn state_rows(
    cfg: &CampaignConfig,
    rs: &RootSystem,
    out: &mut SuiteOutput,
    case: &str,
    s: &InvariantState,
    tol: f64,
) -> Result<(), CliError> {
    let start = Instant::now();
    let back = b_inverse(rs, &b_map(rs, s)?)?;
    let diff = s
        .coeffs()
        .iter()
        .map(|(mu, c)| (back.coeffs().get(mu).copied().unwrap_or_default() - c).norm())
        .fold(0.0, f64::max);
    out.push(
        start,
        format!("{case};inverse"),
        "exact_roundtrip",
        diff,
        0.0,
        diff,
        back == *s,
    );
    let mut hbars = vec![s.hbar()];
    hbars.extend(cfg.hbar_list.iter().copied().filter(|h| *h != s.hbar()));
    for hbar in hbars {
        let start = Instant::now();
        let at = InvariantState::new(rs, s.coeffs().clone(), hbar)?;
        let c = unitarity_check(rs, &at, NormMethod::ClosedForm)?;
        out.check(start, format!("{case};hbar={hbar}"), "closed_form", c.ratio, c.expected, tol);
    }
    Ok(())
}
