//! Lefschetz structures on bigraded algebras and the degeneration certifier.
//!
//! A [`PolarizedAlgebra`] is a bigraded algebra with a class `ω ∈ A^{1,1}` and an
//! integral on `A^{n,n}`. The certifier runs through the primitive-decomposition
//! argument for vanishing of a bidegree `(r, 1-r)` derivation one exact check at
//! a time and stops at the first check that fails.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::scalar::sign;
use crate::exactla::{pairing_rank, vector, Matrix, Scalar, Subspace};
use crate::multalg::{verify_leibniz, BigradedAlgebra, Derivation};
use crate::Bidegree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizedAlgebra {
    algebra: BigradedAlgebra,
    omega: Vec<Scalar>,
    integral: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LefschetzCheck {
    pub holds: bool,
    pub first_failure: Option<usize>,
}

/// Checks that `L^i : A^{n-i} → A^{n+i}` is bijective, from `i = n` down to `0`;
/// the first failure reported is the largest failing `i`.
pub fn hard_lefschetz(alg: &BigradedAlgebra, omega: &[Scalar]) -> LefschetzCheck {
    let n = alg.n() as i64;
    for i in (0..=n).rev() {
        let src = alg.degree_indices(n - i);
        let tgt = alg.degree_indices(n + i);
        let li = alg.power(omega, i as usize);
        let ok = src.len() == tgt.len() && {
            let cols: Vec<Vec<Scalar>> = src
                .iter()
                .map(|&s| {
                    let v = alg.mul(&li, &alg.basis_vector(s));
                    tgt.iter().map(|&t| v[t].clone()).collect()
                })
                .collect();
            Matrix::from_columns(tgt.len(), &cols).unwrap().rank() == src.len()
        };
        if !ok {
            return LefschetzCheck {
                holds: false,
                first_failure: Some(i as usize),
            };
        }
    }
    LefschetzCheck {
        holds: true,
        first_failure: None,
    }
}

impl PolarizedAlgebra {
    /// Validates hard Lefschetz, Poincaré duality and non-degeneracy of the
    /// `ω`-twisted pairing between primitive cells `(a, b)` and `(b, a)`.
    pub fn new(algebra: BigradedAlgebra, omega: Vec<Scalar>, integral: Vec<Scalar>) -> Result<Self> {
        let pa = PolarizedAlgebra::from_parts_unchecked(algebra, omega, integral)?;
        let check = pa.verify_hard_lefschetz();
        if let Some(i) = check.first_failure {
            return Err(Error::Algebra(format!(
                "hard Lefschetz fails: L^{i} is not bijective from degree {} to degree {}",
                pa.n() as i64 - i as i64,
                pa.n() + i
            )));
        }
        pa.check_poincare()?;
        pa.check_twisted_pairings()?;
        Ok(pa)
    }

    /// Only checks shapes and bidegrees of `ω` and the integral.
    pub fn from_parts_unchecked(
        algebra: BigradedAlgebra,
        omega: Vec<Scalar>,
        integral: Vec<Scalar>,
    ) -> Result<Self> {
        let dim = algebra.dim();
        if omega.len() != dim || integral.len() != dim {
            return Err(Error::Dimension(format!(
                "ω has length {}, integral has length {}, algebra has dimension {dim}",
                omega.len(),
                integral.len()
            )));
        }
        if let Some(i) = (0..dim).find(|&i| !omega[i].is_zero() && algebra.bidegree(i) != (1, 1)) {
            return Err(Error::Algebra(format!(
                "ω has a component along {} outside A^(1,1)",
                algebra.basis()[i].name
            )));
        }
        let n = algebra.n() as i64;
        if let Some(i) = (0..dim).find(|&i| !integral[i].is_zero() && algebra.bidegree(i) != (n, n)) {
            return Err(Error::Algebra(format!(
                "the integral is nonzero on {}, outside A^({n},{n})",
                algebra.basis()[i].name
            )));
        }
        Ok(PolarizedAlgebra {
            algebra,
            omega,
            integral,
        })
    }

    pub fn algebra(&self) -> &BigradedAlgebra {
        &self.algebra
    }

    pub fn omega(&self) -> &[Scalar] {
        &self.omega
    }

    pub fn integral(&self) -> &[Scalar] {
        &self.integral
    }

    pub fn n(&self) -> usize {
        self.algebra.n()
    }

    pub fn integrate(&self, x: &[Scalar]) -> Scalar {
        vector::dot(&self.integral, x)
    }

    /// Matrix of `L_ω = ω·`.
    pub fn lefschetz_operator(&self) -> Matrix {
        self.algebra.left_mul_matrix(&self.omega)
    }

    pub fn verify_hard_lefschetz(&self) -> LefschetzCheck {
        hard_lefschetz(&self.algebra, &self.omega)
    }

    /// Gram matrix of `(x, y) ↦ ∫ w·x·y` between two lists of elements.
    pub fn gram(&self, w: &[Scalar], xs: &[Vec<Scalar>], ys: &[Vec<Scalar>]) -> Matrix {
        let mut g = Matrix::zeros(xs.len(), ys.len());
        for (i, x) in xs.iter().enumerate() {
            let wx = self.algebra.mul(w, x);
            for (j, y) in ys.iter().enumerate() {
                g[(i, j)] = self.integrate(&self.algebra.mul(&wx, y));
            }
        }
        g
    }

    fn check_poincare(&self) -> Result<()> {
        let n = self.n() as i64;
        let alg = &self.algebra;
        for (c, idx) in alg.cells() {
            let dual = alg.cell_indices((n - c.0, n - c.1));
            let xs: Vec<_> = idx.iter().map(|&i| alg.basis_vector(i)).collect();
            let ys: Vec<_> = dual.iter().map(|&i| alg.basis_vector(i)).collect();
            let g = self.gram(alg.unit(), &xs, &ys);
            if g.nrows() != g.ncols() || !pairing_rank(&g)?.nondegenerate {
                return Err(Error::Algebra(format!(
                    "Poincaré pairing A^{c:?} x A^({},{}) is degenerate",
                    n - c.0,
                    n - c.1
                )));
            }
        }
        Ok(())
    }

    fn check_twisted_pairings(&self) -> Result<()> {
        let prim = self.primitive_subspaces();
        for (&(a, b), h) in &prim {
            if h.is_zero() {
                continue;
            }
            let m = a + b;
            let other = prim.get(&(b, a)).cloned().unwrap_or_else(|| Subspace::zero(self.algebra.dim()));
            let w = self.algebra.power(&self.omega, (self.n() as i64 - m) as usize);
            let g = self.gram(&w, h.basis_vectors(), other.basis_vectors());
            if g.nrows() != g.ncols() || !pairing_rank(&g)?.nondegenerate {
                return Err(Error::Algebra(format!(
                    "twisted primitive pairing H₀^({a},{b}) x H₀^({b},{a}) is degenerate"
                )));
            }
        }
        Ok(())
    }

    /// `H₀^{p,q} = ker L^{n-p-q+1} ∩ A^{p,q}` for every nonzero cell, as subspaces of `A`.
    /// Cells of total degree above `n` get the zero subspace.
    pub fn primitive_subspaces(&self) -> BTreeMap<Bidegree, Subspace> {
        let alg = &self.algebra;
        let dim = alg.dim();
        let n = self.n() as i64;
        alg.cells()
            .into_par_iter()
            .map(|(c, idx)| {
                let e = n - (c.0 + c.1) + 1;
                if e <= 0 {
                    return (c, Subspace::zero(dim));
                }
                let le = alg.power(&self.omega, e as usize);
                let cols: Vec<Vec<Scalar>> =
                    idx.iter().map(|&i| alg.mul(&le, &alg.basis_vector(i))).collect();
                let k = Matrix::from_columns(dim, &cols).unwrap().kernel();
                let embedded: Vec<Vec<Scalar>> = k
                    .basis_vectors()
                    .iter()
                    .map(|v| {
                        let mut x = vector::zeros(dim);
                        for (t, &i) in idx.iter().enumerate() {
                            x[i] = v[t].clone();
                        }
                        x
                    })
                    .collect();
                (c, Subspace::span(dim, &embedded).unwrap())
            })
            .collect()
    }

    /// Per degree `m`: `(dim H₀^m, Σ_j dim L^j H₀^{m-2j}, dim of the sum of those pieces, b_m)`.
    pub fn lefschetz_decomposition(&self) -> Vec<DecompositionRow> {
        let alg = &self.algebra;
        let prim = self.primitive_subspaces();
        let betti = alg.betti();
        let mut by_degree: BTreeMap<i64, Vec<&Subspace>> = BTreeMap::new();
        for (c, s) in &prim {
            by_degree.entry(c.0 + c.1).or_default().push(s);
        }
        let dim = alg.dim();
        let mut rows = Vec::new();
        for (m, &b) in betti.iter().enumerate() {
            let m = m as i64;
            let primitive = by_degree
                .get(&m)
                .map_or(0, |v| v.iter().map(|s| s.dim()).sum());
            let mut total = 0;
            let mut sum = Subspace::zero(dim);
            for j in 0..=m / 2 {
                let lj = alg.power(&self.omega, j as usize);
                for s in by_degree.get(&(m - 2 * j)).into_iter().flatten() {
                    let imgs: Vec<Vec<Scalar>> =
                        s.basis_vectors().iter().map(|v| alg.mul(&lj, v)).collect();
                    let piece = Subspace::span(dim, &imgs).unwrap();
                    total += piece.dim();
                    sum = sum.sum(&piece);
                }
            }
            rows.push(DecompositionRow {
                degree: m,
                primitive,
                pieces: total,
                span: sum.dim(),
                betti: b,
            });
        }
        rows
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionRow {
    pub degree: i64,
    pub primitive: usize,
    pub pieces: usize,
    pub span: usize,
    pub betti: usize,
}

fn commutator_with_omega(pa: &PolarizedAlgebra, d: &Derivation) -> Matrix {
    let l = pa.lefschetz_operator();
    (d.matrix() * &l).sub(&(&l * d.matrix()))
}

/// Components of `d(α) = γ + ω δ` for one primitive cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCell {
    pub source: Bidegree,
    /// `γ` of each basis vector of `H₀^{source}`, in the canonical basis of `H₀^{source + (r,1-r)}`.
    pub primitive_part: Matrix,
    /// `δ` of each basis vector, in the canonical basis of `H₀^{source + (r-1,-r)}`.
    pub lefschetz_part: Matrix,
    pub gamma: Vec<Vec<Scalar>>,
    pub delta: Vec<Vec<Scalar>>,
}

fn shift(c: Bidegree, s: Bidegree) -> Bidegree {
    (c.0 + s.0, c.1 + s.1)
}

fn primitive_or_zero(prim: &BTreeMap<Bidegree, Subspace>, c: Bidegree, dim: usize) -> Subspace {
    prim.get(&c).cloned().unwrap_or_else(|| Subspace::zero(dim))
}

/// Splits `d` on every nonzero primitive cell. Requires `[d, L_ω] = 0`.
pub fn split_differential(pa: &PolarizedAlgebra, d: &Derivation) -> Result<Vec<SplitCell>> {
    if let Some((i, j)) = commutator_with_omega(pa, d).first_nonzero() {
        return Err(Error::Precondition(format!(
            "[d, L_ω] ≠ 0: component along {} of [d, L_ω]({})",
            pa.algebra.basis()[i].name,
            pa.algebra.basis()[j].name
        )));
    }
    let prim = pa.primitive_subspaces();
    let mut out = Vec::new();
    for (&c, h) in &prim {
        if h.is_zero() {
            continue;
        }
        let (split, escape) = split_cell(pa, d, &prim, c, h);
        if let Some(alpha) = escape {
            return Err(Error::Containment {
                what: format!(
                    "d({}) leaves H₀ ⊕ L_ω H₀ at cell {c:?}",
                    pa.algebra.format_element(&alpha)
                ),
                vector: crate::exactla::format_vector(&d.apply(&alpha)),
            });
        }
        out.push(split);
    }
    Ok(out)
}

fn split_cell(
    pa: &PolarizedAlgebra,
    d: &Derivation,
    prim: &BTreeMap<Bidegree, Subspace>,
    c: Bidegree,
    h: &Subspace,
) -> (SplitCell, Option<Vec<Scalar>>) {
    let alg = &pa.algebra;
    let dim = alg.dim();
    let c1 = shift(c, d.bidegree());
    let c2 = shift(c1, (-1, -1));
    let p1 = primitive_or_zero(prim, c1, dim);
    let p2 = primitive_or_zero(prim, c2, dim);
    let mut cols: Vec<Vec<Scalar>> = p1.basis_vectors().to_vec();
    cols.extend(p2.basis_vectors().iter().map(|v| alg.mul(&pa.omega, v)));
    let m = Matrix::from_columns(dim, &cols).unwrap();
    let (k1, k2) = (p1.dim(), p2.dim());
    let mut gammas = Vec::new();
    let mut deltas = Vec::new();
    let mut g_coords = Vec::new();
    let mut d_coords = Vec::new();
    let mut escape = None;
    for alpha in h.basis_vectors() {
        let y = d.apply(alpha);
        let Some(sol) = m.solve(&y) else {
            escape.get_or_insert_with(|| alpha.clone());
            g_coords.push(vector::zeros(k1));
            d_coords.push(vector::zeros(k2));
            gammas.push(vector::zeros(dim));
            deltas.push(vector::zeros(dim));
            continue;
        };
        let (a, b) = sol.split_at(k1);
        gammas.push(vector::combine(dim, a, p1.basis_vectors()));
        deltas.push(vector::combine(dim, b, p2.basis_vectors()));
        g_coords.push(a.to_vec());
        d_coords.push(b.to_vec());
    }
    let split = SplitCell {
        source: c,
        primitive_part: Matrix::from_columns(k1, &g_coords).unwrap(),
        lefschetz_part: Matrix::from_columns(k2, &d_coords).unwrap(),
        gamma: gammas,
        delta: deltas,
    };
    (split, escape)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeligneReport {
    /// Dimension of the space of degree `-1` maps commuting with `L_ω`.
    pub commuting: usize,
    /// Dimension of the space of all degree `-1` maps, `Σ_m b_m b_{m-1}`.
    pub all_maps: usize,
}

/// Solves `[f, L_ω] = 0` over all linear maps `f` of total degree `-1`.
///
/// The system splits along the bidegree shift `(a, b)` of `f` (with `a + b = -1`)
/// and, for a fixed shift, along the classes `p - q` of the source cells.
pub fn deligne_vanishing(pa: &PolarizedAlgebra) -> DeligneReport {
    let alg = &pa.algebra;
    let cells = alg.cells();
    let n = pa.n() as i64;
    let betti = alg.betti();
    let all_maps = (1..betti.len()).map(|m| betti[m] * betti[m - 1]).sum();
    let omega = &pa.omega;
    let block = |from: Bidegree, to: Bidegree| -> Matrix {
        // L_ω : A^{from} → A^{to}, in cell bases
        let src = cells.get(&from).cloned().unwrap_or_default();
        let tgt = cells.get(&to).cloned().unwrap_or_default();
        let cols: Vec<Vec<Scalar>> = src
            .iter()
            .map(|&i| {
                let v = alg.mul(omega, &alg.basis_vector(i));
                tgt.iter().map(|&t| v[t].clone()).collect()
            })
            .collect();
        Matrix::from_columns(tgt.len(), &cols).unwrap()
    };
    let dim_of = |c: Bidegree| cells.get(&c).map_or(0, Vec::len);
    let mut jobs = Vec::new();
    for a in -2 * n - 1..=2 * n + 1 {
        let s = (a, -1 - a);
        let mut classes: BTreeMap<i64, Vec<Bidegree>> = BTreeMap::new();
        for &c in cells.keys() {
            classes.entry(c.0 - c.1).or_default().push(c);
        }
        for (_, group) in classes {
            if group.iter().any(|&c| dim_of(shift(c, s)) > 0) {
                jobs.push((s, group));
            }
        }
    }
    let commuting = jobs
        .into_par_iter()
        .map(|(s, group)| {
            // unknowns: blocks f_c : A^c → A^{c+s}, column-major within each block
            let mut offset = BTreeMap::new();
            let mut unknowns = 0;
            for &c in &group {
                offset.insert(c, unknowns);
                unknowns += dim_of(shift(c, s)) * dim_of(c);
            }
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for &c in &group {
                // (f_{c+(1,1)} L_c - L_{c+s} f_c) : A^c → A^{c+s+(1,1)}
                let up = shift(c, (1, 1));
                let tgt = shift(up, s);
                let (nc, nt) = (dim_of(c), dim_of(tgt));
                if nc == 0 || nt == 0 {
                    continue;
                }
                let l_c = block(c, up);
                let l_cs = block(shift(c, s), tgt);
                for i in 0..nt {
                    for j in 0..nc {
                        let mut row = vec![Scalar::zero(); unknowns];
                        if let Some(&off) = offset.get(&up) {
                            let rows_up = dim_of(shift(up, s));
                            for k in 0..dim_of(up) {
                                // f_up[i, k] * L_c[k, j]
                                let coef = &l_c[(k, j)];
                                if !coef.is_zero() {
                                    row[off + k * rows_up + i] += coef;
                                }
                            }
                        }
                        let off = offset[&c];
                        let rows_c = dim_of(shift(c, s));
                        for k in 0..rows_c {
                            // L_{c+s}[i, k] * f_c[k, j]
                            let coef = &l_cs[(i, k)];
                            if !coef.is_zero() {
                                row[off + j * rows_c + k] -= coef;
                            }
                        }
                        rows.push(row);
                    }
                }
            }
            let rank = if rows.is_empty() {
                0
            } else {
                Matrix::from_rows(rows, unknowns).unwrap().rank()
            };
            unknowns - rank
        })
        .sum();
    DeligneReport {
        commuting,
        all_maps,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerreWitness {
    pub x: usize,
    pub y: usize,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerreCheck {
    pub holds: bool,
    pub witness: Option<SerreWitness>,
}

/// Checks `∫ d(x) y = -(-1)^{|x|} ∫ x d(y)` on all basis pairs landing in `A^{n,n}`.
/// Requires `∫ ∘ d = 0`.
pub fn serre_sign_check(pa: &PolarizedAlgebra, d: &Derivation) -> Result<SerreCheck> {
    let alg = &pa.algebra;
    let dim = alg.dim();
    let n = pa.n() as i64;
    if let Some(j) = (0..dim).find(|&j| !pa.integrate(&d.image_of(j)).is_zero()) {
        return Err(Error::Precondition(format!(
            "∫ d({}) ≠ 0; d must not reach the top cell",
            alg.basis()[j].name
        )));
    }
    let images: Vec<Vec<Scalar>> = (0..dim).map(|i| d.image_of(i)).collect();
    let s = d.bidegree();
    let witness = (0..dim).into_par_iter().find_map_first(|i| {
        let (p, q) = alg.bidegree(i);
        let want = (n - p - s.0, n - q - s.1);
        alg.cell_indices(want).into_iter().find_map(|j| {
            let lhs = pa.integrate(&alg.mul(&images[i], &alg.basis_vector(j)));
            let rhs = -sign(alg.degree(i)) * pa.integrate(&alg.mul(&alg.basis_vector(i), &images[j]));
            (lhs != rhs).then_some(SerreWitness { x: i, y: j, lhs, rhs })
        })
    });
    Ok(SerreCheck {
        holds: witness.is_none(),
        witness,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Adds a step 0 checking `d ∘ d = 0`.
    pub require_square_zero: bool,
}

/// Concrete data pinpointing a failed (or informative) check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub summary: String,
    /// Labelled elements, as rendered text and as coefficient vectors in the algebra basis.
    pub elements: Vec<WitnessElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessElement {
    pub label: String,
    pub rendered: String,
    pub coefficients: Vec<String>,
}

impl Witness {
    fn new(summary: impl Into<String>) -> Self {
        Witness {
            summary: summary.into(),
            elements: Vec::new(),
        }
    }

    fn with(mut self, alg: &BigradedAlgebra, label: &str, x: &[Scalar]) -> Self {
        self.elements.push(WitnessElement {
            label: label.into(),
            rendered: alg.format_element(x),
            coefficients: x.iter().map(crate::exactla::format_scalar).collect(),
        });
        self
    }

    /// The element with the given label, as rendered text.
    pub fn rendered(&self, label: &str) -> Option<&str> {
        self.elements
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.rendered.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: u8,
    pub statement: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Failed { step: u8, witness: Witness },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub bidegree: Bidegree,
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    pub fn failing_step(&self) -> Option<u8> {
        match &self.verdict {
            Verdict::Certified => None,
            Verdict::Failed { step, .. } => Some(*step),
        }
    }

    pub fn failure_witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Certified => None,
            Verdict::Failed { witness, .. } => Some(witness),
        }
    }
}

struct Transcript {
    steps: Vec<StepRecord>,
}

impl Transcript {
    fn record(&mut self, step: u8, statement: &str, failure: Option<Witness>) -> Option<Verdict> {
        let passed = failure.is_none();
        self.steps.push(StepRecord {
            step,
            statement: statement.into(),
            passed,
            witness: failure.clone(),
        });
        failure.map(|witness| Verdict::Failed { step, witness })
    }
}

/// Checks, in order, each step of the primitive-decomposition argument that a
/// bidegree `(r, 1-r)` derivation of a polarized algebra vanishes. Stops at the
/// first failing step.
pub fn degeneration_certify(
    pa: &PolarizedAlgebra,
    d: &Derivation,
    options: CertifyOptions,
) -> Result<Certificate> {
    let alg = &pa.algebra;
    let dim = alg.dim();
    let n = pa.n() as i64;
    let (r, s) = d.bidegree();
    if r + s != 1 {
        return Err(Error::Precondition(format!(
            "expected a derivation of bidegree (r, 1-r), got ({r}, {s})"
        )));
    }
    d.check_bidegree(alg)?;
    if let Some(w) = verify_leibniz(alg, d).witness {
        return Err(w.into_error(alg));
    }
    let mut t = Transcript { steps: Vec::new() };
    let finish = |t: Transcript, verdict: Verdict| Certificate {
        bidegree: d.bidegree(),
        steps: t.steps,
        verdict,
    };
    macro_rules! step {
        ($id:expr, $statement:expr, $failure:expr) => {
            if let Some(v) = t.record($id, $statement, $failure) {
                return Ok(finish(t, v));
            }
        };
    }

    if options.require_square_zero {
        let sq = d.square();
        let failure = sq.matrix().first_nonzero().map(|(_, j)| {
            Witness::new("d(d(x)) ≠ 0")
                .with(alg, "x", &alg.basis_vector(j))
                .with(alg, "d(d(x))", &sq.image_of(j))
        });
        step!(0, "d ∘ d = 0", failure);
    }

    let d_omega = d.apply(&pa.omega);
    let failure = (!vector::is_zero(&d_omega))
        .then(|| Witness::new("d(ω) ≠ 0").with(alg, "d(ω)", &d_omega));
    step!(1, "d(ω) = 0", failure);

    let comm = commutator_with_omega(pa, d);
    let failure = comm.first_nonzero().map(|(_, j)| {
        Witness::new("d(ωx) ≠ ω d(x)")
            .with(alg, "x", &alg.basis_vector(j))
            .with(alg, "[d, L_ω](x)", &comm.column(j))
    });
    step!(2, "[d, L_ω] = 0", failure);

    let prim = pa.primitive_subspaces();
    let mut splits = Vec::new();
    let mut failure = None;
    for (&c, h) in prim.iter().filter(|(c, _)| c.0 + c.1 <= n) {
        if h.is_zero() {
            continue;
        }
        let (split, escape) = split_cell(pa, d, &prim, c, h);
        if let Some(alpha) = escape {
            failure = Some(
                Witness::new(format!("d(α) ∉ H₀ ⊕ L_ω H₀ for primitive α in {c:?}"))
                    .with(alg, "α", &alpha)
                    .with(alg, "d(α)", &d.apply(&alpha)),
            );
            break;
        }
        splits.push(split);
    }
    step!(3, "d(H₀^{p,q}) ⊆ H₀^{p+r,q+1-r} ⊕ L_ω H₀^{p+r-1,q-r}", failure);

    let failure = splits.iter().find_map(|sp| {
        let k = sp.delta.iter().position(|v| !vector::is_zero(v))?;
        let h = &prim[&sp.source];
        let alpha = &h.basis_vectors()[k];
        Some(
            Witness::new(format!(
                "d(α) has a nonzero L_ω component for primitive α in {:?}",
                sp.source
            ))
            .with(alg, "α", alpha)
            .with(alg, "d(α)", &d.apply(alpha))
            .with(alg, "δ", &sp.delta[k]),
        )
    });
    step!(4, "d′ = 0 on every primitive cell", failure);

    let failure = alg.degree_indices(n).into_iter().find_map(|i| {
        let img = d.image_of(i);
        (!vector::is_zero(&img)).then(|| {
            Witness::new("d ≠ 0 in total degree n")
                .with(alg, "x", &alg.basis_vector(i))
                .with(alg, "d(x)", &img)
        })
    });
    step!(5, "d = 0 on total degree n", failure);

    let mut failure = None;
    'down: for k in (0..n).rev() {
        let w = alg.power(&pa.omega, (n - k - 1) as usize);
        for (&c, h) in prim.iter().filter(|(c, h)| c.0 + c.1 == k && !h.is_zero()) {
            let c1 = shift(c, d.bidegree());
            let p1 = primitive_or_zero(&prim, c1, dim);
            let p1t = primitive_or_zero(&prim, (c1.1, c1.0), dim);
            let g = pa.gram(&w, p1.basis_vectors(), p1t.basis_vectors());
            if g.nrows() != g.ncols() || !pairing_rank(&g)?.nondegenerate {
                failure = Some(Witness::new(format!(
                    "twisted pairing H₀^{c1:?} x H₀^({},{}) is degenerate",
                    c1.1, c1.0
                )));
                break 'down;
            }
            for alpha in h.basis_vectors() {
                let da = d.apply(alpha);
                let wda = alg.mul(&w, &da);
                if let Some(beta) = p1t
                    .basis_vectors()
                    .iter()
                    .find(|b| !pa.integrate(&alg.mul(&wda, b)).is_zero())
                {
                    failure = Some(
                        Witness::new(format!(
                            "∫ ω^{} d(α) β ≠ 0 for primitive α in {c:?}",
                            n - k - 1
                        ))
                        .with(alg, "α", alpha)
                        .with(alg, "d(α)", &da)
                        .with(alg, "β", beta),
                    );
                    break 'down;
                }
                if !vector::is_zero(&da) {
                    failure = Some(
                        Witness::new(format!(
                            "d(α) pairs to zero with H₀^({},{}) but is nonzero",
                            c1.1, c1.0
                        ))
                        .with(alg, "α", alpha)
                        .with(alg, "d(α)", &da),
                    );
                    break 'down;
                }
            }
        }
    }
    step!(6, "for k = n-1 … 0: ∫ ω^{n-k-1} d(α) β = 0 and d(α) = 0 on primitives of degree k", failure);

    let mut failure = None;
    'lift: for (&c, h) in prim.iter().filter(|(_, h)| !h.is_zero()) {
        let m = c.0 + c.1;
        for j in 0..=(n - m).max(0) {
            let lj = alg.power(&pa.omega, j as usize);
            for alpha in h.basis_vectors() {
                let x = alg.mul(&lj, alpha);
                let dx = d.apply(&x);
                if !vector::is_zero(&dx) {
                    failure = Some(
                        Witness::new(format!("d(ω^{j} α) ≠ 0 for primitive α in {c:?}"))
                            .with(alg, "ω^j α", &x)
                            .with(alg, "d(ω^j α)", &dx),
                    );
                    break 'lift;
                }
            }
        }
    }
    if failure.is_none() {
        failure = d.matrix().first_nonzero().map(|(_, j)| {
            Witness::new("d is nonzero on a basis element")
                .with(alg, "x", &alg.basis_vector(j))
                .with(alg, "d(x)", &d.image_of(j))
        });
    }
    step!(7, "d = 0 on every L_ω^j H₀ and hence on A", failure);

    Ok(finish(t, Verdict::Certified))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{projective_space, torus};
    use crate::multalg::derivation_extend;

    fn torus_derivation(pa: &PolarizedAlgebra, images: &[(&str, &str)]) -> Derivation {
        let alg = pa.algebra();
        let gens = crate::multalg::degree_one_generators(alg);
        let map = gens
            .into_iter()
            .map(|g| {
                let name = &alg.basis()[g].name;
                let v = images
                    .iter()
                    .find(|(src, _)| src == name)
                    .map_or_else(|| vector::zeros(alg.dim()), |(_, dst)| {
                        alg.basis_vector(alg.index_of(dst).unwrap())
                    });
                (g, v)
            })
            .collect();
        derivation_extend(alg, (2, -1), &map).unwrap()
    }

    #[test]
    fn hard_lefschetz_on_models() {
        assert!(projective_space(3).unwrap().verify_hard_lefschetz().holds);
        let t = torus(2).unwrap();
        assert!(t.verify_hard_lefschetz().holds);
        let alg = t.algebra();
        let top = alg.index_of("ξ1η1ξ2η2").unwrap();
        let w2 = alg.power(t.omega(), 2);
        assert_eq!(w2, vector::scale(&alg.basis_vector(top), &crate::exactla::int(2)));
        let degenerate = alg.basis_vector(alg.index_of("ξ1η1").unwrap());
        let check = hard_lefschetz(alg, &degenerate);
        assert_eq!(check.first_failure, Some(2));
    }

    #[test]
    fn primitive_dimensions_on_torus() {
        let t = torus(2).unwrap();
        let rows = t.lefschetz_decomposition();
        let prim: Vec<usize> = rows.iter().map(|r| r.primitive).collect();
        assert_eq!(prim, vec![1, 4, 5, 0, 0]);
        for r in rows {
            assert_eq!(r.pieces, r.betti);
            assert_eq!(r.span, r.betti);
        }
    }

    #[test]
    fn primitive_of_projective_space_is_the_unit() {
        let p = projective_space(3).unwrap();
        let prim = p.primitive_subspaces();
        let dims: Vec<(Bidegree, usize)> = prim.iter().map(|(&c, s)| (c, s.dim())).collect();
        assert_eq!(dims, vec![((0, 0), 1), ((1, 1), 0), ((2, 2), 0), ((3, 3), 0)]);
    }

    #[test]
    fn split_of_the_witness_derivation() {
        let t = torus(2).unwrap();
        let d = torus_derivation(&t, &[("ξ1", "η1η2")]);
        let splits = split_differential(&t, &d).unwrap();
        let at = |c: Bidegree| splits.iter().find(|s| s.source == c).unwrap();
        let s01 = at((0, 1));
        assert!(s01.delta.iter().all(|v| vector::is_zero(v)));
        assert!(!s01.primitive_part.is_zero());
        let s02 = at((0, 2));
        assert!(s02.primitive_part.is_zero());
        assert!(!s02.lefschetz_part.is_zero());
        let zero = split_differential(&t, &Derivation::zero(t.algebra(), (2, -1))).unwrap();
        assert!(zero.iter().all(|s| s.primitive_part.is_zero() && s.lefschetz_part.is_zero()));
    }

    #[test]
    fn deligne_on_small_models() {
        let t = torus(2).unwrap();
        let rep = deligne_vanishing(&t);
        assert_eq!(rep.commuting, 0);
        assert_eq!(rep.all_maps, 4 + 24 + 24 + 4);
        assert_eq!(deligne_vanishing(&projective_space(2).unwrap()).commuting, 0);
    }

    #[test]
    fn deligne_counts_commuting_maps_when_lefschetz_fails() {
        // A degenerate ω leaves room for degree -1 maps commuting with it.
        let t = torus(1).unwrap();
        let zero = PolarizedAlgebra::from_parts_unchecked(
            t.algebra().clone(),
            vector::zeros(4),
            t.integral().to_vec(),
        )
        .unwrap();
        assert_eq!(deligne_vanishing(&zero).commuting, deligne_vanishing(&zero).all_maps);
    }

    #[test]
    fn serre_signs() {
        let t = torus(2).unwrap();
        let d = torus_derivation(&t, &[("ξ1", "η1η2"), ("ξ2", "η1η2")]);
        assert!(serre_sign_check(&t, &d).unwrap().holds);
        let mut bad = d.matrix().clone();
        let x = t.algebra().index_of("ξ1ξ2").unwrap();
        for i in 0..t.algebra().dim() {
            bad[(i, x)] = -bad[(i, x)].clone();
        }
        let check = serre_sign_check(&t, &Derivation::from_matrix((2, -1), bad)).unwrap();
        assert!(!check.holds);
    }

    #[test]
    fn certify_zero_and_witness() {
        let t = torus(2).unwrap();
        let zero = Derivation::zero(t.algebra(), (2, -1));
        let cert = degeneration_certify(&t, &zero, CertifyOptions::default()).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.steps.len(), 7);

        let d = torus_derivation(&t, &[("ξ1", "η1η2")]);
        let cert = degeneration_certify(&t, &d, CertifyOptions::default()).unwrap();
        assert_eq!(cert.failing_step(), Some(4));
        let w = cert.failure_witness().unwrap();
        assert_eq!(w.rendered("α"), Some("ξ1ξ2"));
    }

    #[test]
    fn certify_rejects_non_derivations() {
        let t = torus(1).unwrap();
        let alg = t.algebra();
        let mut m = Matrix::zeros(4, 4);
        m[(alg.index_of("η1").unwrap(), alg.index_of("1").unwrap())] = crate::exactla::int(1);
        let d = Derivation::from_matrix((1, 0), m);
        let err = degeneration_certify(&t, &d, CertifyOptions::default()).unwrap_err();
        assert!(err.to_string().contains("Leibniz"), "{err}");
    }
}
