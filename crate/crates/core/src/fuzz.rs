//! Seeded random instances and the invariant suite run over them.
//!
//! Case `i` of a run with seed `s` draws from ChaCha8 seeded with `s` on stream
//! `i`, so every case is reproducible on its own and the order in which worker
//! threads finish does not matter.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::exactla::{int, vector, Matrix, Scalar, Subspace};
use crate::filtered::{CochainComplex, FilteredComplex, Filtration};
use crate::geometry::{build_model, d2_from_alpha, ModelKind, ObstructionDatum, VarietyModel};
use crate::io::{derivation_to_json, filtered_complex_to_json, model_to_json};
use crate::lefschetz::{degeneration_certify, serre_sign_check, CertifyOptions};
use crate::multalg::{realize, verify_leibniz, Derivation, RealizeFiltration};
use crate::spectral::{
    abutment_report, decalage_compare, direct_dims, SpectralSequence,
};

pub fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComplexBounds {
    pub max_dim: usize,
    pub min_degree: i64,
    pub max_degree: i64,
    pub max_width: usize,
    pub max_entry: i64,
}

impl Default for ComplexBounds {
    fn default() -> Self {
        ComplexBounds {
            max_dim: 8,
            min_degree: -4,
            max_degree: 4,
            max_width: 4,
            max_entry: 2,
        }
    }
}

/// Nonzero entry in `[-e, e]`.
fn nonzero_entry(rng: &mut ChaCha8Rng, e: i64) -> i64 {
    let v = rng.gen_range(1..=e.max(1));
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Invertible `n x n`: permutation times lower and upper unipotent factors.
fn random_invertible(rng: &mut ChaCha8Rng, n: usize, e: i64) -> Matrix {
    let mut lower = Matrix::identity(n);
    let mut upper = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            lower[(i, j)] = int(rng.gen_range(-e..=e));
            upper[(j, i)] = int(rng.gen_range(-e..=e));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = Matrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p[(i, j)] = int(1);
    }
    &(&p * &lower) * &upper
}

/// Random bounded filtered complex with `d² = 0` and `d(F^p) ⊆ F^p` by construction.
///
/// The complex starts as a sum of one-dimensional pieces and two-dimensional
/// pieces `x ↦ c·y` with filtration weights `w(x) ≤ w(y)`; a random change of
/// basis in each degree then hides the splitting.
pub fn random_filtered_complex(rng: &mut ChaCha8Rng, bounds: &ComplexBounds) -> FilteredComplex {
    let lo = rng.gen_range(bounds.min_degree..=bounds.max_degree);
    let hi = rng.gen_range(lo..=bounds.max_degree.min(lo + 4));
    let width = rng.gen_range(1..=bounds.max_width.max(1)) as i64;
    let f_lo = rng.gen_range(-2..=2);
    let f_hi = f_lo + width;
    let span = (hi - lo + 1) as usize;
    let target: Vec<usize> = (0..span).map(|_| rng.gen_range(0..=bounds.max_dim)).collect();
    // (degree offset, weight) per basis vector, plus pairs (source, target, coefficient)
    let mut vectors: Vec<Vec<i64>> = vec![Vec::new(); span];
    let mut pairs = Vec::new();
    for k in 0..span {
        while vectors[k].len() < target[k] {
            let room = k + 1 < span && vectors[k + 1].len() < target[k + 1];
            let w1 = rng.gen_range(f_lo..f_hi);
            if room && rng.gen_bool(0.6) {
                let w2 = rng.gen_range(w1..f_hi);
                let c = nonzero_entry(rng, bounds.max_entry);
                pairs.push((k, vectors[k].len(), vectors[k + 1].len(), c));
                vectors[k].push(w1);
                vectors[k + 1].push(w2);
            } else {
                vectors[k].push(w1);
            }
        }
    }
    let dims: Vec<usize> = vectors.iter().map(Vec::len).collect();
    let mut split: Vec<Matrix> = (0..span.saturating_sub(1))
        .map(|k| Matrix::zeros(dims[k + 1], dims[k]))
        .collect();
    for &(k, x, y, c) in &pairs {
        split[k][(y, x)] = int(c);
    }
    let change: Vec<Matrix> = dims
        .iter()
        .map(|&n| random_invertible(rng, n, bounds.max_entry))
        .collect();
    let inverse: Vec<Matrix> = change.iter().map(|g| g.inverse().expect("unipotent factors")).collect();
    let diffs: Vec<Matrix> = (0..split.len())
        .map(|k| &(&change[k + 1] * &split[k]) * &inverse[k])
        .collect();
    let complex = CochainComplex::new(lo, dims.clone(), diffs).expect("square-zero by construction");
    let mut levels = BTreeMap::new();
    for p in f_lo..=f_hi {
        for k in 0..span {
            let cols: Vec<Vec<Scalar>> = vectors[k]
                .iter()
                .enumerate()
                .filter(|(_, &w)| w >= p)
                .map(|(i, _)| change[k].column(i))
                .collect();
            let s = Subspace::span(dims[k], &cols).expect("column lengths");
            levels.insert((p, lo + k as i64), s);
        }
    }
    let filtration = Filtration::new(f_lo, f_hi, levels).expect("range");
    FilteredComplex::new(complex, filtration).expect("filtered by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    Zero,
    Free,
    /// Random `alpha` subject to `d(ω) = 0`.
    OmegaClosed,
}

/// Built-in models that carry `(0,1)` forms, plus one without.
pub fn fuzz_models() -> Vec<ModelKind> {
    let t = |n| Box::new(ModelKind::Torus(n));
    vec![
        ModelKind::Torus(2),
        ModelKind::Torus(3),
        ModelKind::Product(t(1), t(1)),
        ModelKind::Product(t(1), Box::new(ModelKind::ProjectiveSpace(1))),
        ModelKind::ProjectiveSpace(2),
    ]
}

fn built_fuzz_models() -> &'static [VarietyModel] {
    static MODELS: OnceLock<Vec<VarietyModel>> = OnceLock::new();
    MODELS.get_or_init(|| fuzz_models().iter().map(|k| build_model(k).expect("built-in model")).collect())
}

/// Random obstruction datum: each form goes to a random element of its target cell.
pub fn random_alpha(rng: &mut ChaCha8Rng, model: &VarietyModel, mode: AlphaMode) -> ObstructionDatum {
    let alg = model.algebra().algebra();
    let forms = &model.roles().forms;
    let target = alg.cell_indices((2, 0)).to_vec();
    let unknowns = forms.len() * target.len();
    let coefficients: Vec<Scalar> = match mode {
        AlphaMode::Zero => vec![int(0); unknowns],
        AlphaMode::Free => (0..unknowns).map(|_| int(rng.gen_range(-2..=2))).collect(),
        AlphaMode::OmegaClosed => {
            let kernel = omega_closed_kernel(model);
            let weights: Vec<Scalar> = (0..kernel.dim()).map(|_| int(rng.gen_range(-2..=2))).collect();
            vector::combine(unknowns, &weights, kernel.basis_vectors())
        }
    };
    assemble(alg.dim(), forms.len(), &target, &coefficients)
}

/// Coefficient vectors of alpha whose d₂ kills ω, cached per model.
fn omega_closed_kernel(model: &VarietyModel) -> Subspace {
    static CACHE: OnceLock<Mutex<HashMap<String, Subspace>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = model.kind().label();
    if let Some(k) = cache.lock().expect("kernel cache").get(&key) {
        return k.clone();
    }
    let alg = model.algebra().algebra();
    let forms = &model.roles().forms;
    let target = alg.cell_indices((2, 0)).to_vec();
    let unknowns = forms.len() * target.len();
    // columns: d(ω) for the derivation with a single unit coefficient
    let cols: Vec<Vec<Scalar>> = (0..unknowns)
        .map(|u| {
            let mut coeffs = vec![int(0); unknowns];
            coeffs[u] = int(1);
            let datum = assemble(alg.dim(), forms.len(), &target, &coeffs);
            let d = d2_from_alpha(model, &datum).expect("generated datum");
            d.apply(model.algebra().omega())
        })
        .collect();
    let kernel = Matrix::from_columns(alg.dim(), &cols).expect("lengths").kernel();
    cache.lock().expect("kernel cache").insert(key, kernel.clone());
    kernel
}

fn assemble(dim: usize, forms: usize, target: &[usize], coeffs: &[Scalar]) -> ObstructionDatum {
    let alpha = (0..forms)
        .map(|f| {
            let mut v = vector::zeros(dim);
            for (t, &i) in target.iter().enumerate() {
                v[i] = coeffs[f * target.len() + t].clone();
            }
            v
        })
        .collect();
    ObstructionDatum { alpha, scale: int(1) }
}

pub const COMPLEX_CHECKS: [&str; 3] = ["oracle", "abutment", "decalage"];
pub const DERIVATION_CHECKS: [&str; 5] =
    ["leibniz", "omega_closed", "serre_sign", "certificate_sound", "degeneration_matches"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn new(check: &str, result: Result<Option<String>>) -> Self {
        let detail = match result {
            Ok(d) => d,
            Err(e) => Some(e.to_string()),
        };
        CheckOutcome {
            check: check.into(),
            passed: detail.is_none(),
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub index: u64,
    pub kind: String,
    pub outcomes: Vec<CheckOutcome>,
    /// The full instance, present only when some check failed.
    pub instance: Option<Value>,
    /// Certified or not, for derivation cases.
    pub certified: Option<bool>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

/// Oracle equivalence up to `max_r`, abutment at the stable page, décalage for `r ≤ 3`.
pub fn check_complex(fk: &FilteredComplex, max_r: usize) -> Vec<CheckOutcome> {
    let oracle = || -> Result<Option<String>> {
        let mut ss = SpectralSequence::new(fk.clone())?;
        for r in 1..=max_r {
            let iterated = ss.page(r)?.dims();
            let direct = direct_dims(fk, r)?;
            if iterated != direct {
                return Ok(Some(format!("E_{r}: iterated {iterated:?}, direct {direct:?}")));
            }
        }
        Ok(None)
    };
    let abutment = || -> Result<Option<String>> {
        let mut ss = SpectralSequence::new(fk.clone())?;
        abutment_report(&mut ss).map(|_| None)
    };
    let decalage = || -> Result<Option<String>> {
        let rows = decalage_compare(fk, 3)?;
        Ok(rows.iter().find(|r| !r.agrees()).map(|r| {
            format!(
                "r = {}: Dec E_{}^{:?} = {}, E_{}^{:?} = {}",
                r.r,
                r.r,
                r.cell,
                r.decalage_dim,
                r.r + 1,
                r.original_cell,
                r.original_dim
            )
        }))
    };
    vec![
        CheckOutcome::new("oracle", oracle()),
        CheckOutcome::new("abutment", abutment()),
        CheckOutcome::new("decalage", decalage()),
    ]
}

/// Leibniz, `d(ω) = 0` when imposed, Serre signs, and certificate soundness:
/// a certificate implies `d = 0`, and `E_3 = E_2` of the realized complex holds
/// exactly when `d = 0`.
pub fn check_derivation(model: &VarietyModel, d: &Derivation, mode: AlphaMode) -> (Vec<CheckOutcome>, Option<bool>) {
    let pa = model.algebra();
    let alg = pa.algebra();
    let leibniz = || -> Result<Option<String>> {
        let c = verify_leibniz(alg, d);
        Ok(c.witness.map(|w| w.into_error(alg).to_string()))
    };
    let omega = || -> Result<Option<String>> {
        let dw = d.apply(pa.omega());
        Ok((mode != AlphaMode::Free && !vector::is_zero(&dw)).then(|| alg.format_element(&dw)))
    };
    let serre = || -> Result<Option<String>> {
        let c = serre_sign_check(pa, d)?;
        Ok(c.witness.map(|w| {
            format!(
                "pair ({}, {}): {} vs {}",
                alg.basis()[w.x].name,
                alg.basis()[w.y].name,
                w.lhs,
                w.rhs
            )
        }))
    };
    let mut certified = None;
    let mut sound = || -> Result<Option<String>> {
        let cert = degeneration_certify(pa, d, CertifyOptions::default())?;
        certified = Some(cert.is_certified());
        Ok((cert.is_certified() && !d.is_zero()).then(|| "certified a nonzero derivation".to_string()))
    };
    let sound_outcome = CheckOutcome::new("certificate_sound", sound());
    let degeneration = || -> Result<Option<String>> {
        let dga = realize(alg, d, RealizeFiltration::ByP)?;
        let fk = dga.filtered_complex();
        let e2 = direct_dims(fk, 2)?;
        let e3 = direct_dims(fk, 3)?;
        Ok(((e2 == e3) != d.is_zero()).then(|| format!("E_2 {e2:?}, E_3 {e3:?}, d zero: {}", d.is_zero())))
    };
    (
        vec![
            CheckOutcome::new("leibniz", leibniz()),
            CheckOutcome::new("omega_closed", omega()),
            CheckOutcome::new("serre_sign", serre()),
            sound_outcome,
            CheckOutcome::new("degeneration_matches", degeneration()),
        ],
        certified,
    )
}

pub fn complex_case(seed: u64, index: u64, bounds: &ComplexBounds, max_r: usize) -> CaseResult {
    let mut rng = case_rng(seed, index);
    let fk = random_filtered_complex(&mut rng, bounds);
    let outcomes = check_complex(&fk, max_r);
    let failed = outcomes.iter().any(|o| !o.passed);
    CaseResult {
        index,
        kind: "complex".into(),
        outcomes,
        instance: failed.then(|| filtered_complex_to_json(&fk)),
        certified: None,
    }
}

/// The model, datum mode and derivation drawn for a derivation case.
pub fn derivation_instance(seed: u64, index: u64) -> (VarietyModel, AlphaMode, Derivation) {
    let mut rng = case_rng(seed, index);
    let models = built_fuzz_models();
    let model = models[rng.gen_range(0..models.len())].clone();
    let mode = [AlphaMode::Zero, AlphaMode::Free, AlphaMode::OmegaClosed][rng.gen_range(0..3)];
    let datum = random_alpha(&mut rng, &model, mode);
    let d = d2_from_alpha(&model, &datum).expect("generated datum");
    (model, mode, d)
}

pub fn derivation_case(seed: u64, index: u64) -> CaseResult {
    let (model, mode, d) = derivation_instance(seed, index);
    let (outcomes, certified) = check_derivation(&model, &d, mode);
    let failed = outcomes.iter().any(|o| !o.passed);
    CaseResult {
        index,
        kind: format!("derivation:{}:{}", model.name(), serde_json::to_value(mode).unwrap().as_str().unwrap()),
        outcomes,
        instance: failed.then(|| {
            json!({
                "model": model_to_json(&model),
                "derivation": derivation_to_json(model.algebra().algebra(), &d),
            })
        }),
        certified,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Complexes,
    Derivations,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub cases: u64,
    pub suite: Suite,
    pub bounds: ComplexBounds,
    pub max_page: usize,
}

impl FuzzConfig {
    pub fn new(seed: u64, cases: u64) -> Self {
        FuzzConfig {
            seed,
            cases,
            suite: Suite::All,
            bounds: ComplexBounds::default(),
            max_page: 6,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: u64,
    pub failed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub complex_cases: u64,
    pub derivation_cases: u64,
    pub certified: u64,
    pub checks: BTreeMap<String, Tally>,
    pub counterexamples: Vec<CaseResult>,
}

/// Runs `cases` instances of each selected suite in parallel; results are sorted by index.
pub fn run(config: &FuzzConfig) -> FuzzReport {
    let mut results: Vec<CaseResult> = Vec::new();
    let with_complexes = config.suite != Suite::Derivations;
    let with_derivations = config.suite != Suite::Complexes;
    if with_complexes {
        results.par_extend(
            (0..config.cases)
                .into_par_iter()
                .map(|i| complex_case(config.seed, i, &config.bounds, config.max_page)),
        );
    }
    if with_derivations {
        // derivation cases use the streams after the complex cases
        results.par_extend(
            (0..config.cases)
                .into_par_iter()
                .map(|i| derivation_case(config.seed, config.cases + i)),
        );
    }
    results.sort_by_key(|r| r.index);
    let mut checks: BTreeMap<String, Tally> = BTreeMap::new();
    let mut certified = 0;
    for r in &results {
        for o in &r.outcomes {
            let t = checks.entry(o.check.clone()).or_default();
            if o.passed {
                t.passed += 1;
            } else {
                t.failed += 1;
            }
        }
        certified += u64::from(r.certified == Some(true));
    }
    FuzzReport {
        seed: config.seed,
        complex_cases: if with_complexes { config.cases } else { 0 },
        derivation_cases: if with_derivations { config.cases } else { 0 },
        certified,
        checks,
        counterexamples: results.into_iter().filter(|r| !r.passed()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_complexes_respect_bounds() {
        let b = ComplexBounds::default();
        for i in 0..40 {
            let fk = random_filtered_complex(&mut case_rng(1, i), &b);
            let k = fk.complex();
            assert!(k.lo() >= b.min_degree && k.hi() <= b.max_degree);
            assert!(k.degrees().all(|n| k.dim(n) <= b.max_dim));
            let (lo, hi) = fk.filtration_range();
            assert!(hi - lo >= 1 && hi - lo <= b.max_width as i64);
        }
    }

    #[test]
    fn cases_are_reproducible() {
        let b = ComplexBounds::default();
        let a = random_filtered_complex(&mut case_rng(9, 3), &b);
        let c = random_filtered_complex(&mut case_rng(9, 3), &b);
        assert_eq!(a, c);
        let (_, _, d1) = derivation_instance(9, 5);
        let (_, _, d2) = derivation_instance(9, 5);
        assert_eq!(d1, d2);
    }

    #[test]
    fn omega_closed_alpha_kills_omega() {
        let m = build_model(&ModelKind::Torus(3)).unwrap();
        for i in 0..5 {
            let datum = random_alpha(&mut case_rng(2, i), &m, AlphaMode::OmegaClosed);
            let d = d2_from_alpha(&m, &datum).unwrap();
            assert!(vector::is_zero(&d.apply(m.algebra().omega())));
        }
    }

    #[test]
    fn small_run_is_clean() {
        let mut config = FuzzConfig::new(7, 12);
        config.max_page = 4;
        let report = run(&config);
        assert!(report.counterexamples.is_empty(), "{:?}", report.counterexamples);
        assert_eq!(report.checks["oracle"].passed, 12);
        assert_eq!(report.checks["leibniz"].passed, 12);
    }
}
