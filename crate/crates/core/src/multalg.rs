//! Bigraded graded-commutative algebras, graded derivations and pairings of
//! spectral sequences.
//!
//! Signs are Koszul signs on the total degree `p + q`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactla::scalar::{one, sign};
use crate::exactla::{format_scalar, vector, Matrix, Scalar, Subquotient, Subspace};
use crate::filtered::{CochainComplex, FilteredComplex};
use crate::spectral::{homology_identification, target_cell, Page};
use crate::Bidegree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub p: i64,
    pub q: i64,
}

impl BasisElement {
    pub fn new(name: impl Into<String>, p: i64, q: i64) -> Self {
        BasisElement {
            name: name.into(),
            p,
            q,
        }
    }

    pub fn bidegree(&self) -> Bidegree {
        (self.p, self.q)
    }

    pub fn degree(&self) -> i64 {
        self.p + self.q
    }
}

type Sparse = Vec<(usize, Scalar)>;

fn to_sparse(v: &[Scalar]) -> Sparse {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

/// Finite-dimensional bigraded algebra given by structure constants on a named basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedAlgebra {
    n: usize,
    basis: Vec<BasisElement>,
    products: Vec<Vec<Sparse>>,
    unit: Vec<Scalar>,
}

impl BigradedAlgebra {
    /// Validates bidegrees, associativity, graded commutativity and the
    /// existence of a unit in `A^{0,0}`. Pairs absent from `products` multiply to zero.
    pub fn new(
        n: usize,
        basis: Vec<BasisElement>,
        products: &BTreeMap<(usize, usize), Vec<Scalar>>,
    ) -> Result<Self> {
        let dim = basis.len();
        for b in &basis {
            if b.degree() < 0 || b.degree() > 2 * n as i64 {
                return Err(Error::Algebra(format!(
                    "basis element {} has total degree {} outside [0, {}]",
                    b.name,
                    b.degree(),
                    2 * n
                )));
            }
        }
        let mut table = vec![vec![Sparse::new(); dim]; dim];
        for (&(i, j), v) in products {
            if i >= dim || j >= dim || v.len() != dim {
                return Err(Error::Dimension(format!(
                    "product entry ({i},{j}) does not fit a {dim}-dimensional algebra"
                )));
            }
            let (p, q) = (basis[i].p + basis[j].p, basis[i].q + basis[j].q);
            if let Some(k) = (0..dim).find(|&k| !v[k].is_zero() && basis[k].bidegree() != (p, q)) {
                return Err(Error::Algebra(format!(
                    "{}·{} has a component along {} outside bidegree ({p},{q})",
                    basis[i].name, basis[j].name, basis[k].name
                )));
            }
            table[i][j] = to_sparse(v);
        }
        let mut alg = BigradedAlgebra {
            n,
            basis,
            products: table,
            unit: Vec::new(),
        };
        alg.check_commutativity()?;
        alg.check_associativity()?;
        alg.unit = alg.find_unit()?;
        Ok(alg)
    }

    fn check_commutativity(&self) -> Result<()> {
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let s = sign(self.degree(i) * self.degree(j));
                let lhs = self.mul_basis(i, j);
                let rhs = vector::scale(&self.mul_basis(j, i), &s);
                if lhs != rhs {
                    return Err(Error::Algebra(format!(
                        "graded commutativity fails on ({}, {})",
                        self.basis[i].name, self.basis[j].name
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<()> {
        let dim = self.dim();
        let bad = (0..dim).into_par_iter().find_map_first(|i| {
            for j in 0..dim {
                let ij = self.mul_basis(i, j);
                for k in 0..dim {
                    let left = self.mul_right_basis(&ij, k);
                    let right = self.mul_left_basis(i, &self.mul_basis(j, k));
                    if left != right {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        match bad {
            Some((i, j, k)) => Err(Error::Algebra(format!(
                "associativity fails on ({}, {}, {})",
                self.basis[i].name, self.basis[j].name, self.basis[k].name
            ))),
            None => Ok(()),
        }
    }

    fn find_unit(&self) -> Result<Vec<Scalar>> {
        let dim = self.dim();
        let cands = self.cell_indices((0, 0));
        // u = Σ c_k e_k with u·e_i = e_i for all i: one block of rows per i.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..dim {
            for t in 0..dim {
                rows.push(
                    cands
                        .iter()
                        .map(|&k| {
                            self.products[k][i]
                                .iter()
                                .find(|(idx, _)| *idx == t)
                                .map_or_else(Scalar::zero, |(_, c)| c.clone())
                        })
                        .collect::<Vec<_>>(),
                );
                rhs.push(if t == i { one() } else { Scalar::zero() });
            }
        }
        let m = Matrix::from_rows(rows, cands.len())?;
        let c = m
            .solve(&rhs)
            .ok_or_else(|| Error::Algebra("no unit element in A^{0,0}".into()))?;
        let mut u = vector::zeros(dim);
        for (k, ck) in cands.iter().zip(c) {
            u[*k] = ck;
        }
        Ok(u)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn unit(&self) -> &[Scalar] {
        &self.unit
    }

    pub fn bidegree(&self, i: usize) -> Bidegree {
        self.basis[i].bidegree()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.name == name)
    }

    /// Basis indices of `A^{p,q}`, in basis order.
    pub fn cell_indices(&self, c: Bidegree) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.bidegree(i) == c).collect()
    }

    /// Nonzero cells with their basis indices.
    pub fn cells(&self) -> BTreeMap<Bidegree, Vec<usize>> {
        let mut out: BTreeMap<Bidegree, Vec<usize>> = BTreeMap::new();
        for i in 0..self.dim() {
            out.entry(self.bidegree(i)).or_default().push(i);
        }
        out
    }

    pub fn cell_dims(&self) -> BTreeMap<Bidegree, usize> {
        self.cells().into_iter().map(|(c, v)| (c, v.len())).collect()
    }

    /// `b_m = dim A^m` for `m` in `0..=2n`.
    pub fn betti(&self) -> Vec<usize> {
        let mut b = vec![0; 2 * self.n + 1];
        for e in &self.basis {
            b[e.degree() as usize] += 1;
        }
        b
    }

    /// Basis indices of total degree `m`.
    pub fn degree_indices(&self, m: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) == m).collect()
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> Vec<Scalar> {
        let mut out = vector::zeros(self.dim());
        for (k, c) in &self.products[i][j] {
            out[*k] = c.clone();
        }
        out
    }

    pub fn product_terms(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.products[i][j]
    }

    fn mul_right_basis(&self, x: &[Scalar], k: usize) -> Vec<Scalar> {
        let mut out = vector::zeros(self.dim());
        for (i, xi) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (t, c) in &self.products[i][k] {
                out[*t] += xi * c;
            }
        }
        out
    }

    fn mul_left_basis(&self, i: usize, y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vector::zeros(self.dim());
        for (j, yj) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (t, c) in &self.products[i][j] {
                out[*t] += yj * c;
            }
        }
        out
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let mut out = vector::zeros(self.dim());
        for (i, xi) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                for (t, c) in &self.products[i][j] {
                    out[*t] += xi * yj * c;
                }
            }
        }
        out
    }

    pub fn power(&self, x: &[Scalar], k: usize) -> Vec<Scalar> {
        let mut acc = self.unit.clone();
        for _ in 0..k {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// Matrix of `y ↦ x·y`.
    pub fn left_mul_matrix(&self, x: &[Scalar]) -> Matrix {
        let cols: Vec<Vec<Scalar>> = (0..self.dim())
            .map(|j| self.mul(x, &vector::unit(self.dim(), j)))
            .collect();
        Matrix::from_columns(self.dim(), &cols).expect("square")
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        vector::unit(self.dim(), i)
    }

    /// Bidegree shared by all nonzero components; `None` for zero or mixed elements.
    pub fn homogeneous_bidegree(&self, x: &[Scalar]) -> Option<Bidegree> {
        let mut cells = x
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.bidegree(i));
        let first = cells.next()?;
        cells.all(|c| c == first).then_some(first)
    }

    /// `3*ξ1η1 - η2` style rendering.
    pub fn format_element(&self, x: &[Scalar]) -> String {
        let mut out = String::new();
        for (i, c) in x.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let neg = c < &Scalar::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if mag != one() {
                out.push_str(&format_scalar(&mag));
                out.push('*');
            }
            out.push_str(&self.basis[i].name);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Linear endomorphism of a bigraded algebra of fixed bidegree; column `i` is `d(e_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    bidegree: Bidegree,
    matrix: Matrix,
}

impl Derivation {
    pub fn zero(alg: &BigradedAlgebra, bidegree: Bidegree) -> Self {
        Derivation {
            bidegree,
            matrix: Matrix::zeros(alg.dim(), alg.dim()),
        }
    }

    /// No Leibniz or bidegree check; see [`verify_leibniz`] and [`Derivation::check_bidegree`].
    pub fn from_matrix(bidegree: Bidegree, matrix: Matrix) -> Self {
        Derivation { bidegree, matrix }
    }

    /// `images[i] = d(e_i)`; checks that each image sits in the shifted cell.
    pub fn from_images(
        alg: &BigradedAlgebra,
        bidegree: Bidegree,
        images: &[Vec<Scalar>],
    ) -> Result<Self> {
        let m = Matrix::from_columns(alg.dim(), images)?;
        let d = Derivation::from_matrix(bidegree, m);
        d.check_bidegree(alg)?;
        Ok(d)
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn total_degree(&self) -> i64 {
        self.bidegree.0 + self.bidegree.1
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.matrix.apply(x)
    }

    pub fn image_of(&self, i: usize) -> Vec<Scalar> {
        self.matrix.column(i)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn scale(&self, s: &Scalar) -> Derivation {
        Derivation::from_matrix(self.bidegree, self.matrix.scale(s))
    }

    /// `d ∘ d`, of doubled bidegree.
    pub fn square(&self) -> Derivation {
        let (a, b) = self.bidegree;
        Derivation::from_matrix((2 * a, 2 * b), &self.matrix * &self.matrix)
    }

    pub fn check_bidegree(&self, alg: &BigradedAlgebra) -> Result<()> {
        if self.matrix.shape() != (alg.dim(), alg.dim()) {
            return Err(Error::Dimension(format!(
                "derivation matrix is {:?}, algebra has dimension {}",
                self.matrix.shape(),
                alg.dim()
            )));
        }
        for i in 0..alg.dim() {
            let (p, q) = alg.bidegree(i);
            let want = (p + self.bidegree.0, q + self.bidegree.1);
            for t in 0..alg.dim() {
                if !self.matrix[(t, i)].is_zero() && alg.bidegree(t) != want {
                    return Err(Error::Algebra(format!(
                        "d({}) has a component along {} outside bidegree {want:?}",
                        alg.basis[i].name, alg.basis[t].name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Block `A^{c} → A^{c + bidegree}` in cell basis order.
    pub fn restrict(&self, alg: &BigradedAlgebra, c: Bidegree) -> Matrix {
        let src = alg.cell_indices(c);
        let tgt = alg.cell_indices((c.0 + self.bidegree.0, c.1 + self.bidegree.1));
        self.matrix.submatrix(&tgt, &src)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeibnizWitness {
    pub left: usize,
    pub right: usize,
    /// `d(e_l e_r) - d(e_l) e_r - (-1)^{|d||e_l|} e_l d(e_r)`.
    pub discrepancy: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeibnizCheck {
    pub holds: bool,
    pub witness: Option<LeibnizWitness>,
}

impl LeibnizWitness {
    pub fn into_error(self, alg: &BigradedAlgebra) -> Error {
        Error::Leibniz {
            left: alg.basis[self.left].name.clone(),
            right: alg.basis[self.right].name.clone(),
            discrepancy: alg.format_element(&self.discrepancy),
        }
    }
}

fn leibniz_defect(alg: &BigradedAlgebra, d: &Derivation, i: usize, j: usize) -> Vec<Scalar> {
    let lhs = d.apply(&alg.mul_basis(i, j));
    let a = alg.mul_right_basis(&d.image_of(i), j);
    let b = alg.mul_left_basis(i, &d.image_of(j));
    let s = sign(d.total_degree() * alg.degree(i));
    let mut out = vector::sub(&lhs, &a);
    vector::axpy(&mut out, &(-s), &b);
    out
}

/// Checks `d(xy) = d(x) y + (-1)^{|d||x|} x d(y)` on every basis pair; the first
/// failing pair in row-major order is the witness.
pub fn verify_leibniz(alg: &BigradedAlgebra, d: &Derivation) -> LeibnizCheck {
    let dim = alg.dim();
    let witness = (0..dim).into_par_iter().find_map_first(|i| {
        (0..dim).find_map(|j| {
            let defect = leibniz_defect(alg, d, i, j);
            (!vector::is_zero(&defect)).then(|| LeibnizWitness {
                left: i,
                right: j,
                discrepancy: defect,
            })
        })
    });
    LeibnizCheck {
        holds: witness.is_none(),
        witness,
    }
}

/// Basis indices of total degree 1, which must generate `A`.
pub fn degree_one_generators(alg: &BigradedAlgebra) -> Vec<usize> {
    alg.degree_indices(1)
}

/// Unique derivation extending `images` (keyed by basis index) from the degree-1
/// generators. Requires `A` to be generated in total degree 1.
pub fn derivation_extend(
    alg: &BigradedAlgebra,
    bidegree: Bidegree,
    images: &BTreeMap<usize, Vec<Scalar>>,
) -> Result<Derivation> {
    let gens = degree_one_generators(alg);
    if let Some(k) = images.keys().find(|k| !gens.contains(k)) {
        return Err(Error::Precondition(format!(
            "image supplied for basis element {k}, which is not a degree-1 generator"
        )));
    }
    let mut imgs = Vec::with_capacity(gens.len());
    for g in &gens {
        let v = images.get(g).ok_or_else(|| {
            Error::Precondition(format!(
                "no image supplied for generator {}",
                alg.basis[*g].name
            ))
        })?;
        imgs.push(v.clone());
    }
    extend_from_generators(alg, bidegree, &gens, &imgs)
}

/// Leibniz extension from arbitrary homogeneous basis generators.
pub fn extend_from_generators(
    alg: &BigradedAlgebra,
    bidegree: Bidegree,
    gens: &[usize],
    images: &[Vec<Scalar>],
) -> Result<Derivation> {
    let dim = alg.dim();
    if gens.len() != images.len() {
        return Err(Error::Dimension(format!(
            "{} generators but {} images",
            gens.len(),
            images.len()
        )));
    }
    for (&g, img) in gens.iter().zip(images) {
        if img.len() != dim {
            return Err(Error::Dimension(format!(
                "image of {} has length {}, expected {dim}",
                alg.basis[g].name,
                img.len()
            )));
        }
        let (p, q) = alg.bidegree(g);
        let want = (p + bidegree.0, q + bidegree.1);
        if let Some(c) = alg.homogeneous_bidegree(img).filter(|&c| c != want) {
            return Err(Error::Algebra(format!(
                "image of {} lies in bidegree {c:?}, expected {want:?}",
                alg.basis[g].name
            )));
        }
        if alg.homogeneous_bidegree(img).is_none() && !vector::is_zero(img) {
            return Err(Error::Algebra(format!(
                "image of {} is not bihomogeneous",
                alg.basis[g].name
            )));
        }
    }
    let deg = bidegree.0 + bidegree.1;

    // Words g·w built breadth first, with d(g·w) = d(g)w + (-1)^{|d||g|} g d(w).
    let mut words: Vec<(Vec<Scalar>, Vec<Scalar>)> = vec![(alg.unit().to_vec(), vector::zeros(dim))];
    let mut spans: BTreeMap<Bidegree, Subspace> = BTreeMap::new();
    spans.insert((0, 0), Subspace::span(dim, &[alg.unit().to_vec()])?);
    let mut cursor = 0;
    while cursor < words.len() {
        let (w, dw) = words[cursor].clone();
        cursor += 1;
        for (&g, dg) in gens.iter().zip(images) {
            let x = alg.mul_left_basis(g, &w);
            let Some(c) = alg.homogeneous_bidegree(&x) else {
                continue;
            };
            let span = spans.entry(c).or_insert_with(|| Subspace::zero(dim));
            if span.contains(&x) {
                continue;
            }
            *span = span.add_vectors(std::slice::from_ref(&x))?;
            let mut dx = alg.mul(dg, &w);
            vector::axpy(&mut dx, &sign(deg * alg.degree(g)), &alg.mul_left_basis(g, &dw));
            words.push((x, dx));
        }
    }

    let mut matrix = Matrix::zeros(dim, dim);
    for (c, idx) in alg.cells() {
        let cell_words: Vec<&(Vec<Scalar>, Vec<Scalar>)> = words
            .iter()
            .filter(|(x, _)| alg.homogeneous_bidegree(x) == Some(c))
            .collect();
        if cell_words.len() < idx.len() {
            return Err(Error::Precondition(format!(
                "the generators do not span cell {c:?}: {} of {} dimensions reached",
                cell_words.len(),
                idx.len()
            )));
        }
        let x = Matrix::from_columns(
            idx.len(),
            &cell_words
                .iter()
                .map(|(x, _)| idx.iter().map(|&i| x[i].clone()).collect())
                .collect::<Vec<_>>(),
        )?;
        let dx = Matrix::from_columns(
            dim,
            &cell_words.iter().map(|(_, d)| d.clone()).collect::<Vec<_>>(),
        )?;
        let inv = x
            .inverse()
            .ok_or_else(|| Error::Internal(format!("word matrix of cell {c:?} is singular")))?;
        let block = &dx * &inv;
        for (col, &i) in idx.iter().enumerate() {
            for t in 0..dim {
                matrix[(t, i)] = block[(t, col)].clone();
            }
        }
    }
    let d = Derivation::from_matrix(bidegree, matrix);
    for (&g, img) in gens.iter().zip(images) {
        if &d.image_of(g) != img {
            return Err(Error::Algebra(format!(
                "generator images are inconsistent at {}: forced {}, supplied {}",
                alg.basis[g].name,
                alg.format_element(&d.image_of(g)),
                alg.format_element(img)
            )));
        }
    }
    if let Some(w) = verify_leibniz(alg, &d).witness {
        return Err(w.into_error(alg));
    }
    Ok(d)
}

/// Dimensions and differentials of one page, detached from how it was computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageData {
    pub r: usize,
    pub cells: BTreeMap<Bidegree, usize>,
    /// `d_r` out of each cell; cells whose target is absent have `0 x dim` matrices.
    pub differentials: BTreeMap<Bidegree, Matrix>,
    /// Columns express this page's basis of a cell in the canonical coordinates of
    /// `ker d_{r-1} / im d_{r-1}` on the previous page. Empty on a first page.
    pub identification: BTreeMap<Bidegree, Matrix>,
}

impl PageData {
    pub fn dim(&self, c: Bidegree) -> usize {
        self.cells.get(&c).copied().unwrap_or(0)
    }

    fn differential_or_zero(&self, c: Bidegree) -> Matrix {
        let t = target_cell(c, self.r);
        self.differentials
            .get(&c)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dim(t), self.dim(c)))
    }

    /// `ker d_r / im d_r` at `c` in page coordinates.
    pub fn homology(&self, c: Bidegree) -> Subquotient {
        let d = self.differential_or_zero(c);
        let kernel = if d.nrows() == 0 {
            Subspace::full(self.dim(c))
        } else {
            d.kernel()
        };
        let src = (c.0 - self.r as i64, c.1 + self.r as i64 - 1);
        let image = if self.dim(src) == 0 {
            Subspace::zero(self.dim(c))
        } else {
            self.differential_or_zero(src).image()
        };
        Subquotient::new(kernel, image).expect("d_r ∘ d_r = 0")
    }

    /// Page data of an engine page.
    pub fn from_page(page: &Page) -> PageData {
        PageData {
            r: page.r(),
            cells: page.cells().iter().map(|(&c, s)| (c, s.dim())).collect(),
            differentials: page.differentials().clone(),
            identification: BTreeMap::new(),
        }
    }

    /// Consecutive engine pages, with identifications between them.
    pub fn from_pages(pages: &[Page]) -> Result<Vec<PageData>> {
        let mut out: Vec<PageData> = Vec::with_capacity(pages.len());
        for (i, page) in pages.iter().enumerate() {
            let mut data = PageData::from_page(page);
            if i > 0 {
                for &c in page.cells().keys() {
                    data.identification
                        .insert(c, homology_identification(&pages[i - 1], page, c)?);
                }
            }
            out.push(data);
        }
        Ok(out)
    }

    /// A bigraded algebra as page `r` with differential `d`.
    pub fn from_derivation(alg: &BigradedAlgebra, d: &Derivation, r: usize) -> PageData {
        let cells = alg.cell_dims();
        let differentials = cells
            .keys()
            .map(|&c| (c, d.restrict(alg, c)))
            .collect();
        PageData {
            r,
            cells,
            differentials,
            identification: BTreeMap::new(),
        }
    }

    /// Page `r + 1` as the homology of this one, with the supplied next differential
    /// (zero when `None`).
    pub fn homology_page(&self, next: Option<&BTreeMap<Bidegree, Matrix>>) -> PageData {
        let mut cells = BTreeMap::new();
        let mut identification = BTreeMap::new();
        for &c in self.cells.keys() {
            let h = self.homology(c);
            cells.insert(c, h.dim());
            identification.insert(c, Matrix::identity(h.dim()));
        }
        let r = self.r + 1;
        let differentials = match next {
            Some(d) => d.clone(),
            None => cells
                .keys()
                .map(|&c| {
                    let t = target_cell(c, r);
                    (c, Matrix::zeros(cells.get(&t).copied().unwrap_or(0), cells[&c]))
                })
                .collect(),
        };
        PageData {
            r,
            cells,
            differentials,
            identification,
        }
    }

    /// Single copy of the ground field in bidegree `(0, 0)` with zero differentials.
    pub fn point(r: usize) -> PageData {
        let mut cells = BTreeMap::new();
        cells.insert((0, 0), 1);
        let mut differentials = BTreeMap::new();
        differentials.insert((0, 0), Matrix::zeros(0, 1));
        PageData {
            r,
            cells,
            differentials,
            identification: BTreeMap::new(),
        }
    }
}

/// Bilinear maps `E'_r^{c1} ⊗ E''_r^{c2} → E_r^{c1+c2}`. Column `a * dim E''^{c2} + b`
/// holds the product of basis vectors `a` and `b`.
pub type PageProducts = BTreeMap<(Bidegree, Bidegree), Matrix>;

fn add(c1: Bidegree, c2: Bidegree) -> Bidegree {
    (c1.0 + c2.0, c1.1 + c2.1)
}

/// Pairing of three spectral sequences, known on consecutive pages starting at `left[0].r`.
#[derive(Clone, Debug)]
pub struct SsPairing {
    pub left: Vec<PageData>,
    pub right: Vec<PageData>,
    pub target: Vec<PageData>,
    pub products: Vec<PageProducts>,
}

fn cup(
    products: &PageProducts,
    right: &PageData,
    target: &PageData,
    c1: Bidegree,
    x: &[Scalar],
    c2: Bidegree,
    y: &[Scalar],
) -> Vec<Scalar> {
    let c = add(c1, c2);
    let mut out = vector::zeros(target.dim(c));
    let Some(m) = products.get(&(c1, c2)) else {
        return out;
    };
    let dr = right.dim(c2);
    for (a, xa) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
        for (b, yb) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let col = m.column(a * dr + b);
            vector::axpy(&mut out, &(xa * yb), &col);
        }
    }
    out
}

impl SsPairing {
    pub fn new(
        left: PageData,
        right: PageData,
        target: PageData,
        products: PageProducts,
    ) -> Result<Self> {
        if left.r != right.r || left.r != target.r {
            return Err(Error::Precondition(format!(
                "pages {}, {}, {} do not line up",
                left.r, right.r, target.r
            )));
        }
        check_product_shapes(&left, &right, &target, &products)?;
        Ok(SsPairing {
            left: vec![left],
            right: vec![right],
            target: vec![target],
            products: vec![products],
        })
    }

    pub fn first_page(&self) -> usize {
        self.left[0].r
    }

    fn index(&self, r: usize) -> Result<usize> {
        let first = self.first_page();
        if r < first || r - first >= self.products.len() {
            return Err(Error::Precondition(format!("no products stored for page {r}")));
        }
        Ok(r - first)
    }

    pub fn products_at(&self, r: usize) -> Result<&PageProducts> {
        Ok(&self.products[self.index(r)?])
    }

    /// `d(a ∪ b) = d(a) ∪ b + (-1)^{p+q} a ∪ d(b)` on every pair of basis vectors at page `r`.
    pub fn check_compatibility(&self, r: usize) -> Result<()> {
        let i = self.index(r)?;
        let (l, rt, t, prods) = (&self.left[i], &self.right[i], &self.target[i], &self.products[i]);
        for (&c1, &n1) in &l.cells {
            for (&c2, &n2) in &rt.cells {
                let c = add(c1, c2);
                let tc = target_cell(c, r);
                if t.dim(tc) == 0 {
                    continue;
                }
                let dt = t.differential_or_zero(c);
                let dl = l.differential_or_zero(c1);
                let drt = rt.differential_or_zero(c2);
                let s = sign(c1.0 + c1.1);
                for a in 0..n1 {
                    let ea = vector::unit(n1, a);
                    for b in 0..n2 {
                        let eb = vector::unit(n2, b);
                        let ab = cup(prods, rt, t, c1, &ea, c2, &eb);
                        let lhs = if ab.is_empty() {
                            vector::zeros(t.dim(tc))
                        } else {
                            dt.apply(&ab)
                        };
                        let da = if dl.nrows() == 0 { Vec::new() } else { dl.apply(&ea) };
                        let db = if drt.nrows() == 0 { Vec::new() } else { drt.apply(&eb) };
                        let mut rhs = vector::zeros(t.dim(tc));
                        if !da.is_empty() {
                            let v = cup(prods, rt, t, target_cell(c1, r), &da, c2, &eb);
                            vector::axpy(&mut rhs, &one(), &v);
                        }
                        if !db.is_empty() {
                            let v = cup(prods, rt, t, c1, &ea, target_cell(c2, r), &db);
                            vector::axpy(&mut rhs, &s, &v);
                        }
                        if lhs != rhs {
                            return Err(Error::Leibniz {
                                left: format!("E'_{r}^{c1:?} basis vector {a}"),
                                right: format!("E''_{r}^{c2:?} basis vector {b}"),
                                discrepancy: crate::exactla::format_vector(&vector::sub(&lhs, &rhs)),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Appends the next pages of the three sequences; their identifications must
    /// refer to the current last pages.
    pub fn push_pages(&mut self, left: PageData, right: PageData, target: PageData) -> Result<()> {
        let r = self.left.last().unwrap().r + 1;
        if left.r != r || right.r != r || target.r != r {
            return Err(Error::Precondition(format!("expected pages numbered {r}")));
        }
        self.left.push(left);
        self.right.push(right);
        self.target.push(target);
        Ok(())
    }

    /// Computes `∪_{r+1}` from `∪_r`, after checking Leibniz compatibility at `r`
    /// and well-definedness on coset representatives. Stores and returns it.
    pub fn induced_pairing(&mut self, r: usize) -> Result<PageProducts> {
        self.check_compatibility(r)?;
        let i = self.index(r)?;
        if i + 1 >= self.left.len() {
            return Err(Error::Precondition(format!("page {} data missing", r + 1)));
        }
        let (l, rt, t) = (&self.left[i], &self.right[i], &self.target[i]);
        let (l2, rt2, t2) = (&self.left[i + 1], &self.right[i + 1], &self.target[i + 1]);
        let prods = &self.products[i];
        let mut out = PageProducts::new();
        for (&c1, &n1) in &l2.cells {
            for (&c2, &n2) in &rt2.cells {
                let c = add(c1, c2);
                let nt = t2.dim(c);
                if n1 == 0 || n2 == 0 || nt == 0 {
                    continue;
                }
                let (h1, h2, ht) = (l.homology(c1), rt.homology(c2), t.homology(c));
                // Representatives of both denominators must multiply into boundaries.
                for (which, gens, other, c_gen, c_other, gen_left) in [
                    ("left", h1.denominator(), h2.numerator(), c1, c2, true),
                    ("right", h2.denominator(), h1.numerator(), c2, c1, false),
                ] {
                    for u in gens.basis_vectors() {
                        for v in other.basis_vectors() {
                            let prod = if gen_left {
                                cup(prods, rt, t, c_gen, u, c_other, v)
                            } else {
                                cup(prods, rt, t, c_other, v, c_gen, u)
                            };
                            if !ht.denominator().contains(&pad(prod, t.dim(c))) {
                                return Err(Error::Containment {
                                    what: format!(
                                        "product with a {which} boundary at page {r}, cells {c1:?} x {c2:?}, is not a boundary"
                                    ),
                                    vector: crate::exactla::format_vector(u),
                                });
                            }
                        }
                    }
                }
                let id1 = ident(l2, c1, n1);
                let id2 = ident(rt2, c2, n2);
                let id_t = ident(t2, c, nt);
                let inv_t = id_t
                    .inverse()
                    .ok_or_else(|| Error::Internal(format!("identification at {c:?} is singular")))?;
                let mut cols = Vec::with_capacity(n1 * n2);
                for a in 0..n1 {
                    let x = h1.lift(&id1.column(a));
                    for b in 0..n2 {
                        let y = h2.lift(&id2.column(b));
                        let z = pad(cup(prods, rt, t, c1, &x, c2, &y), t.dim(c));
                        let coords = ht.coords(&z).map_err(|e| {
                            Error::Internal(format!("product of cycles is not a cycle at {c:?}: {e}"))
                        })?;
                        cols.push(inv_t.apply(&coords));
                    }
                }
                out.insert((c1, c2), Matrix::from_columns(nt, &cols)?);
            }
        }
        if self.products.len() == i + 1 {
            self.products.push(out.clone());
        } else {
            self.products[i + 1] = out.clone();
        }
        Ok(out)
    }
}

fn pad(v: Vec<Scalar>, n: usize) -> Vec<Scalar> {
    if v.len() == n {
        v
    } else {
        vector::zeros(n)
    }
}

fn ident(page: &PageData, c: Bidegree, n: usize) -> Matrix {
    page.identification
        .get(&c)
        .cloned()
        .unwrap_or_else(|| Matrix::identity(n))
}

fn check_product_shapes(
    left: &PageData,
    right: &PageData,
    target: &PageData,
    products: &PageProducts,
) -> Result<()> {
    for (&(c1, c2), m) in products {
        let want = (target.dim(add(c1, c2)), left.dim(c1) * right.dim(c2));
        if m.shape() != want {
            return Err(Error::Dimension(format!(
                "product block {c1:?} x {c2:?} is {:?}, expected {want:?}",
                m.shape()
            )));
        }
    }
    Ok(())
}

/// How to filter the total complex of a bigraded algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealizeFiltration {
    /// `F^s = ⊕_{p ≥ s} A^{p,*}`.
    ByP,
    /// `F^0 = everything`, `F^1 = 0`.
    Trivial,
}

/// A filtered complex whose spaces are the total degrees of a bigraded algebra,
/// with the algebra's multiplicative structure.
#[derive(Clone, Debug)]
pub struct FilteredDga {
    fk: FilteredComplex,
    algebra: BigradedAlgebra,
    // positions[m] = algebra basis indices spanning K^m, in order
    positions: BTreeMap<i64, Vec<usize>>,
}

/// Total complex of `(A, d)`. Requires `d ∘ d = 0` and a derivation of total degree 1.
pub fn realize(
    alg: &BigradedAlgebra,
    d: &Derivation,
    filtration: RealizeFiltration,
) -> Result<FilteredDga> {
    if d.total_degree() != 1 {
        return Err(Error::Precondition(format!(
            "a differential has total degree 1, got bidegree {:?}",
            d.bidegree()
        )));
    }
    if d.bidegree().0 < 0 && filtration == RealizeFiltration::ByP {
        return Err(Error::Precondition(
            "the filtration by p needs a differential that does not lower p".into(),
        ));
    }
    if let Some((i, j)) = d.square().matrix().first_nonzero() {
        return Err(Error::Complex(format!(
            "d ∘ d ≠ 0: component along {} of d(d({}))",
            alg.basis()[i].name,
            alg.basis()[j].name
        )));
    }
    if let Some(w) = verify_leibniz(alg, d).witness {
        return Err(w.into_error(alg));
    }
    let top = 2 * alg.n() as i64;
    let positions: BTreeMap<i64, Vec<usize>> =
        (0..=top).map(|m| (m, alg.degree_indices(m))).collect();
    let dims: Vec<usize> = positions.values().map(Vec::len).collect();
    let mut diffs = Vec::new();
    for m in 0..top {
        diffs.push(d.matrix().submatrix(&positions[&(m + 1)], &positions[&m]));
    }
    let k = CochainComplex::new(0, dims, diffs)?;
    let fk = match filtration {
        RealizeFiltration::Trivial => FilteredComplex::trivial(k),
        RealizeFiltration::ByP => {
            let hi = positions
                .values()
                .flatten()
                .map(|&i| alg.bidegree(i).0)
                .max()
                .unwrap_or(0)
                + 1;
            let lo = positions
                .values()
                .flatten()
                .map(|&i| alg.bidegree(i).0)
                .min()
                .unwrap_or(0);
            FilteredComplex::from_levels(k, lo, hi, |s, m| {
                let idx = &positions[&m];
                let vs: Vec<Vec<Scalar>> = idx
                    .iter()
                    .enumerate()
                    .filter(|(_, &i)| alg.bidegree(i).0 >= s)
                    .map(|(t, _)| vector::unit(idx.len(), t))
                    .collect();
                Subspace::span(idx.len(), &vs).expect("unit vectors")
            })?
        }
    };
    Ok(FilteredDga {
        fk,
        algebra: alg.clone(),
        positions,
    })
}

impl FilteredDga {
    pub fn filtered_complex(&self) -> &FilteredComplex {
        &self.fk
    }

    pub fn algebra(&self) -> &BigradedAlgebra {
        &self.algebra
    }

    /// Element of `K^m` as an algebra element.
    pub fn to_algebra(&self, m: i64, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vector::zeros(self.algebra.dim());
        for (t, &i) in self.positions[&m].iter().enumerate() {
            out[i] = v[t].clone();
        }
        out
    }

    pub fn from_algebra(&self, m: i64, x: &[Scalar]) -> Vec<Scalar> {
        match self.positions.get(&m) {
            Some(idx) => idx.iter().map(|&i| x[i].clone()).collect(),
            None => Vec::new(),
        }
    }

    /// Product `K^a × K^b → K^{a+b}`.
    pub fn multiply(&self, a: i64, x: &[Scalar], b: i64, y: &[Scalar]) -> Vec<Scalar> {
        let z = self
            .algebra
            .mul(&self.to_algebra(a, x), &self.to_algebra(b, y));
        self.from_algebra(a + b, &z)
    }

    /// `∪_r` on an engine page, induced from the product on representatives.
    pub fn page_pairing(&self, page: &Page) -> Result<PageProducts> {
        let mut out = PageProducts::new();
        for (&c1, s1) in page.cells() {
            for (&c2, s2) in page.cells() {
                if s1.dim() == 0 || s2.dim() == 0 {
                    continue;
                }
                let c = add(c1, c2);
                let (n1, n2) = (c1.0 + c1.1, c2.0 + c2.1);
                let target = page.cell(c);
                // Well-definedness on denominators.
                for (u_set, v_set, u_left) in [
                    (s1.denominator(), s2.numerator(), true),
                    (s2.denominator(), s1.numerator(), false),
                ] {
                    for u in u_set.basis_vectors() {
                        for v in v_set.basis_vectors() {
                            let z = if u_left {
                                self.multiply(n1, u, n2, v)
                            } else {
                                self.multiply(n1, v, n2, u)
                            };
                            let ok = match target {
                                Some(t) => t.denominator().contains(&z),
                                None => vector::is_zero(&z),
                            };
                            if !ok {
                                return Err(Error::Containment {
                                    what: format!(
                                        "product of a boundary with a cycle at {c1:?} x {c2:?} on page {} is not a boundary",
                                        page.r()
                                    ),
                                    vector: crate::exactla::format_vector(u),
                                });
                            }
                        }
                    }
                }
                let nt = target.map_or(0, Subquotient::dim);
                let mut cols = Vec::new();
                for x in s1.complement_basis() {
                    for y in s2.complement_basis() {
                        let z = self.multiply(n1, x, n2, y);
                        match target {
                            Some(t) => cols.push(t.coords(&z).map_err(|e| Error::Containment {
                                what: format!("filtration is not multiplicative at {c1:?} x {c2:?}: {e}"),
                                vector: crate::exactla::format_vector(&z),
                            })?),
                            None if vector::is_zero(&z) => {}
                            None => {
                                return Err(Error::Containment {
                                    what: format!("product of {c1:?} and {c2:?} leaves the grid"),
                                    vector: crate::exactla::format_vector(&z),
                                })
                            }
                        }
                    }
                }
                if nt > 0 {
                    out.insert((c1, c2), Matrix::from_columns(nt, &cols)?);
                }
            }
        }
        Ok(out)
    }
}

/// Structure constants of a bigraded algebra as products on a [`PageData::from_derivation`] page.
pub fn algebra_products(alg: &BigradedAlgebra) -> PageProducts {
    let cells = alg.cells();
    let mut out = PageProducts::new();
    for (&c1, i1) in &cells {
        for (&c2, i2) in &cells {
            let c = add(c1, c2);
            let Some(it) = cells.get(&c) else { continue };
            let mut cols = Vec::with_capacity(i1.len() * i2.len());
            for &a in i1 {
                for &b in i2 {
                    let prod = alg.mul_basis(a, b);
                    cols.push(it.iter().map(|&k| prod[k].clone()).collect());
                }
            }
            out.insert((c1, c2), Matrix::from_columns(it.len(), &cols).expect("shape"));
        }
    }
    out
}

/// Cells whose products are nonzero somewhere.
pub fn support(products: &PageProducts) -> BTreeSet<(Bidegree, Bidegree)> {
    products
        .iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(&k, _)| k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;
    use crate::spectral::SpectralSequence;

    /// Exterior algebra on named odd generators with the given bidegrees.
    pub(crate) fn exterior(n: usize, gens: &[(&str, i64, i64)]) -> BigradedAlgebra {
        let k = gens.len();
        let masks: Vec<u32> = (0..1u32 << k).collect();
        let basis: Vec<BasisElement> = masks
            .iter()
            .map(|&m| {
                let mut name = String::new();
                let (mut p, mut q) = (0, 0);
                for (t, g) in gens.iter().enumerate() {
                    if m >> t & 1 == 1 {
                        name.push_str(g.0);
                        p += g.1;
                        q += g.2;
                    }
                }
                if name.is_empty() {
                    name.push('1');
                }
                BasisElement::new(name, p, q)
            })
            .collect();
        let mut products = BTreeMap::new();
        for &a in &masks {
            for &b in &masks {
                if a & b != 0 {
                    continue;
                }
                let mut inv = 0;
                for t in 0..k {
                    if b >> t & 1 == 1 {
                        inv += (a >> (t + 1)).count_ones();
                    }
                }
                let mut v = vector::zeros(masks.len());
                v[(a | b) as usize] = sign(inv as i64);
                products.insert((a as usize, b as usize), v);
            }
        }
        BigradedAlgebra::new(n, basis, &products).unwrap()
    }

    fn heisenberg() -> (BigradedAlgebra, Derivation) {
        let alg = exterior(2, &[("x", 1, 0), ("y", 1, 0), ("z", 0, 1)]);
        let x = alg.index_of("x").unwrap();
        let y = alg.index_of("y").unwrap();
        let z = alg.index_of("z").unwrap();
        let xy = alg.index_of("xy").unwrap();
        let mut images = BTreeMap::new();
        images.insert(x, vector::zeros(8));
        images.insert(y, vector::zeros(8));
        images.insert(z, alg.basis_vector(xy));
        let d = derivation_extend(&alg, (2, -1), &images).unwrap();
        (alg, d)
    }

    #[test]
    fn exterior_algebra_validates() {
        let a = exterior(1, &[("a", 0, 1), ("b", 1, 0)]);
        assert_eq!(a.dim(), 4);
        assert_eq!(a.betti(), vec![1, 2, 1]);
        assert_eq!(a.unit(), a.basis_vector(0).as_slice());
        let ab = a.mul_basis(1, 2);
        let ba = a.mul_basis(2, 1);
        assert_eq!(ab, vector::scale(&ba, &int(-1)));
    }

    #[test]
    fn rejects_noncommutative_products() {
        let basis = vec![BasisElement::new("1", 0, 0), BasisElement::new("a", 0, 1)];
        let mut products = BTreeMap::new();
        products.insert((0, 0), vec![int(1), int(0)]);
        products.insert((0, 1), vec![int(0), int(1)]);
        products.insert((1, 0), vec![int(0), int(-1)]);
        let err = BigradedAlgebra::new(1, basis, &products).unwrap_err();
        assert!(err.to_string().contains("commutativity"), "{err}");
    }

    #[test]
    fn rejects_product_in_wrong_bidegree() {
        let basis = vec![BasisElement::new("1", 0, 0), BasisElement::new("a", 1, 1)];
        let mut products = BTreeMap::new();
        products.insert((1, 1), vec![int(1), int(0)]);
        assert!(BigradedAlgebra::new(1, basis, &products).is_err());
    }

    #[test]
    fn rejects_missing_unit() {
        let basis = vec![BasisElement::new("1", 0, 0)];
        let products = BTreeMap::new();
        let err = BigradedAlgebra::new(0, basis, &products).unwrap_err();
        assert!(err.to_string().contains("unit"), "{err}");
    }

    #[test]
    fn zero_images_extend_to_zero() {
        let a = exterior(1, &[("a", 0, 1), ("b", 1, 0)]);
        let images = degree_one_generators(&a)
            .into_iter()
            .map(|g| (g, vector::zeros(4)))
            .collect();
        assert!(derivation_extend(&a, (2, -1), &images).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_extension_and_leibniz() {
        let (alg, d) = heisenberg();
        assert!(verify_leibniz(&alg, &d).holds);
        let xz = alg.index_of("xz").unwrap();
        // d(xz) = -x·xy = 0
        assert!(vector::is_zero(&d.image_of(xz)));
        assert!(d.square().is_zero());
    }

    #[test]
    fn corrupted_sign_is_caught_with_its_pair() {
        let alg = exterior(2, &[("a", 0, 1), ("b", 0, 1), ("c", 1, 0), ("e", 1, 0)]);
        let ce = alg.basis_vector(alg.index_of("ce").unwrap());
        let images = degree_one_generators(&alg)
            .into_iter()
            .map(|g| {
                let v = if alg.basis()[g].name == "a" { ce.clone() } else { vector::zeros(16) };
                (g, v)
            })
            .collect();
        let d = derivation_extend(&alg, (2, -1), &images).unwrap();
        let ab = alg.index_of("ab").unwrap();
        assert!(!vector::is_zero(&d.image_of(ab)));
        let mut bad = d.matrix().clone();
        for t in 0..16 {
            bad[(t, ab)] = -bad[(t, ab)].clone();
        }
        let check = verify_leibniz(&alg, &Derivation::from_matrix((2, -1), bad));
        assert!(!check.holds);
        let w = check.witness.unwrap();
        let names = (alg.basis()[w.left].name.as_str(), alg.basis()[w.right].name.as_str());
        assert_eq!(names, ("a", "b"));
    }

    #[test]
    fn inconsistent_images_are_rejected() {
        // In Λ(a) with a² = 0, d(a) = 1·... of the wrong bidegree fails the bidegree check.
        let a = exterior(1, &[("a", 0, 1), ("b", 1, 0)]);
        let mut images = BTreeMap::new();
        images.insert(1, a.basis_vector(1));
        images.insert(2, vector::zeros(4));
        assert!(derivation_extend(&a, (2, -1), &images).is_err());
    }

    #[test]
    fn realize_by_p_gives_algebra_as_page() {
        let (alg, d) = heisenberg();
        let dga = realize(&alg, &d, RealizeFiltration::ByP).unwrap();
        let mut ss = SpectralSequence::new(dga.filtered_complex().clone()).unwrap();
        let e2 = ss.page(2).unwrap().clone();
        assert_eq!(e2.dims(), alg.cell_dims());
        let e3 = ss.page(3).unwrap().clone();
        let total: usize = e3.dims().values().sum();
        assert_eq!(total, 6); // Heisenberg nilmanifold: 1, 2, 2, 1
        let data2 = PageData::from_page(&e2);
        let from_d = PageData::from_derivation(&alg, &d, 2);
        for (c, m) in &from_d.differentials {
            assert_eq!(data2.differentials.get(c).map(Matrix::rank), Some(m.rank()), "{c:?}");
        }
    }

    #[test]
    fn induced_pairing_agrees_with_page_products() {
        let (alg, d) = heisenberg();
        let dga = realize(&alg, &d, RealizeFiltration::ByP).unwrap();
        let mut ss = SpectralSequence::new(dga.filtered_complex().clone()).unwrap();
        let pages = vec![ss.page(2).unwrap().clone(), ss.page(3).unwrap().clone()];
        let data = PageData::from_pages(&pages).unwrap();
        let p2 = dga.page_pairing(&pages[0]).unwrap();
        let mut pairing =
            SsPairing::new(data[0].clone(), data[0].clone(), data[0].clone(), p2).unwrap();
        pairing
            .push_pages(data[1].clone(), data[1].clone(), data[1].clone())
            .unwrap();
        let induced = pairing.induced_pairing(2).unwrap();
        let direct = dga.page_pairing(&pages[1]).unwrap();
        assert_eq!(induced, direct);
        assert!(!support(&induced).is_empty());
    }

    #[test]
    fn zero_differential_pairing_is_unchanged() {
        let a = exterior(1, &[("a", 0, 1), ("b", 1, 0)]);
        let d = Derivation::zero(&a, (2, -1));
        let page = PageData::from_derivation(&a, &d, 2);
        let prods = algebra_products(&a);
        let mut pairing =
            SsPairing::new(page.clone(), page.clone(), page.clone(), prods.clone()).unwrap();
        let next = page.homology_page(None);
        pairing.push_pages(next.clone(), next.clone(), next).unwrap();
        assert_eq!(pairing.induced_pairing(2).unwrap(), prods);
    }

    #[test]
    fn incompatible_products_are_rejected() {
        let (alg, d) = heisenberg();
        let page = PageData::from_derivation(&alg, &d, 2);
        let mut prods = algebra_products(&alg);
        // z ∪ 1 = 2z breaks d(z ∪ 1) = d(z) ∪ 1.
        let key = ((0, 1), (0, 0));
        let doubled = prods[&key].scale(&int(2));
        prods.insert(key, doubled);
        let pairing = SsPairing::new(page.clone(), page.clone(), page, prods).unwrap();
        assert!(pairing.check_compatibility(2).is_err());
    }

    #[test]
    fn format_element_renders_terms() {
        let a = exterior(1, &[("a", 0, 1), ("b", 1, 0)]);
        let mut v = vector::zeros(4);
        v[1] = int(2);
        v[3] = int(-1);
        assert_eq!(a.format_element(&v), "2*a - ab");
        assert_eq!(a.format_element(&vector::zeros(4)), "0");
    }
}
