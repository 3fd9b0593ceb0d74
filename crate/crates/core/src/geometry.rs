//! Model second pages `E_2^{p,q}` with cup product, obstruction-class
//! differentials, Ext dimension tables and lci `E_2` shapes.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::scalar::{one, sign};
use crate::exactla::{vector, Scalar};
use crate::lefschetz::PolarizedAlgebra;
use crate::multalg::{extend_from_generators, BasisElement, BigradedAlgebra, Derivation};
use crate::Bidegree;

const MAX_TORUS: usize = 4;
const MAX_PN: usize = 12;
const MAX_PRODUCT_DIM: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Torus(usize),
    ProjectiveSpace(usize),
    Product(Box<ModelKind>, Box<ModelKind>),
    Custom,
}

impl ModelKind {
    pub fn label(&self) -> String {
        match self {
            ModelKind::Torus(n) => format!("torus({n})"),
            ModelKind::ProjectiveSpace(n) => format!("projective_space({n})"),
            ModelKind::Product(a, b) => format!("product({}, {})", a.label(), b.label()),
            ModelKind::Custom => "custom".into(),
        }
    }
}

/// Which basis elements generate the algebra, by role.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorRoles {
    /// Generators in bidegree `(0, 1)`.
    pub forms: Vec<usize>,
    /// Generators in bidegree `(1, 0)`.
    pub classes: Vec<usize>,
    pub other: Vec<usize>,
}

impl GeneratorRoles {
    pub fn all(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .forms
            .iter()
            .chain(&self.classes)
            .chain(&self.other)
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    /// Degree-1 basis elements split by bidegree; anything else is left out.
    pub fn degree_one(alg: &BigradedAlgebra) -> Self {
        let mut roles = GeneratorRoles::default();
        for i in alg.degree_indices(1) {
            match alg.bidegree(i) {
                (0, 1) => roles.forms.push(i),
                (1, 0) => roles.classes.push(i),
                _ => roles.other.push(i),
            }
        }
        roles
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeDiamond {
    n: usize,
    h: Vec<Vec<usize>>,
}

impl HodgeDiamond {
    pub fn new(n: usize, h: Vec<Vec<usize>>) -> Result<Self> {
        if h.len() != n + 1 || h.iter().any(|row| row.len() != n + 1) {
            return Err(Error::Dimension(format!("a Hodge diamond of dimension {n} is {0}x{0}", n + 1)));
        }
        for p in 0..=n {
            for q in 0..=n {
                if h[p][q] != h[q][p] {
                    return Err(Error::Algebra(format!("h^({p},{q}) ≠ h^({q},{p})")));
                }
                if h[p][q] != h[n - p][n - q] {
                    return Err(Error::Algebra(format!(
                        "h^({p},{q}) ≠ h^({},{})",
                        n - p,
                        n - q
                    )));
                }
            }
        }
        if h[0][0] != 1 || h[n][n] != 1 {
            return Err(Error::Algebra("h^(0,0) and h^(n,n) must be 1".into()));
        }
        Ok(HodgeDiamond { n, h })
    }

    pub fn of_algebra(alg: &BigradedAlgebra) -> Result<Self> {
        let n = alg.n();
        let mut h = vec![vec![0; n + 1]; n + 1];
        for ((p, q), d) in alg.cell_dims() {
            if p < 0 || q < 0 || p > n as i64 || q > n as i64 {
                return Err(Error::Algebra(format!("cell ({p},{q}) lies outside the diamond")));
            }
            h[p as usize][q as usize] = d;
        }
        HodgeDiamond::new(n, h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self, p: usize, q: usize) -> usize {
        self.h.get(p).and_then(|r| r.get(q)).copied().unwrap_or(0)
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.h
    }

    pub fn betti(&self) -> Vec<usize> {
        let mut b = vec![0; 2 * self.n + 1];
        for p in 0..=self.n {
            for q in 0..=self.n {
                b[p + q] += self.h[p][q];
            }
        }
        b
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyModel {
    name: String,
    kind: ModelKind,
    algebra: PolarizedAlgebra,
    roles: GeneratorRoles,
}

impl VarietyModel {
    /// Checks roles against bidegrees, the Hodge symmetries and hard Lefschetz.
    pub fn new(
        name: impl Into<String>,
        kind: ModelKind,
        algebra: PolarizedAlgebra,
        roles: GeneratorRoles,
    ) -> Result<Self> {
        let alg = algebra.algebra();
        for (list, want, what) in [(&roles.forms, (0, 1), "form"), (&roles.classes, (1, 0), "class")] {
            if let Some(&i) = list.iter().find(|&&i| i >= alg.dim() || alg.bidegree(i) != want) {
                return Err(Error::Algebra(format!("generator {i} is not a {what} of bidegree {want:?}")));
            }
        }
        if let Some(&i) = roles.other.iter().find(|&&i| i >= alg.dim()) {
            return Err(Error::Dimension(format!("generator index {i} out of range")));
        }
        HodgeDiamond::of_algebra(alg)?;
        if let Some(i) = algebra.verify_hard_lefschetz().first_failure {
            return Err(Error::Algebra(format!("hard Lefschetz fails at L^{i}")));
        }
        Ok(VarietyModel {
            name: name.into(),
            kind,
            algebra,
            roles,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn algebra(&self) -> &PolarizedAlgebra {
        &self.algebra
    }

    pub fn roles(&self) -> &GeneratorRoles {
        &self.roles
    }

    pub fn hodge_diamond(&self) -> HodgeDiamond {
        HodgeDiamond::of_algebra(self.algebra.algebra()).expect("validated on construction")
    }
}

fn torus_algebra(n: usize) -> Result<BigradedAlgebra> {
    // generator 2i is ξ_{i+1} in (0,1), generator 2i+1 is η_{i+1} in (1,0)
    let k = 2 * n;
    let mut masks: Vec<u32> = (0..1u32 << k).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let position: BTreeMap<u32, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let basis = masks
        .iter()
        .map(|&m| {
            let mut name = String::new();
            let (mut p, mut q) = (0, 0);
            for t in 0..k {
                if m >> t & 1 == 1 {
                    let (sym, i) = if t % 2 == 0 { ("ξ", t / 2 + 1) } else { ("η", t / 2 + 1) };
                    name.push_str(&format!("{sym}{i}"));
                    if t % 2 == 0 {
                        q += 1;
                    } else {
                        p += 1;
                    }
                }
            }
            if name.is_empty() {
                name.push('1');
            }
            BasisElement::new(name, p, q)
        })
        .collect();
    let dim = masks.len();
    let mut products = BTreeMap::new();
    for &a in &masks {
        for &b in &masks {
            if a & b != 0 {
                continue;
            }
            let inversions: u32 = (0..k)
                .filter(|t| b >> t & 1 == 1)
                .map(|t| (a >> (t + 1)).count_ones())
                .sum();
            let mut v = vector::zeros(dim);
            v[position[&(a | b)]] = sign(inversions as i64);
            products.insert((position[&a], position[&b]), v);
        }
    }
    BigradedAlgebra::new(n, basis, &products)
}

/// Exterior algebra on `ξ_i ∈ (0,1)`, `η_i ∈ (1,0)`, with `ω = Σ ξ_i η_i`
/// and `∫ ξ_1 η_1 … ξ_n η_n = 1`.
pub fn torus(n: usize) -> Result<PolarizedAlgebra> {
    if n == 0 || n > MAX_TORUS {
        return Err(Error::Precondition(format!("torus(n) needs 1 ≤ n ≤ {MAX_TORUS}, got {n}")));
    }
    let alg = torus_algebra(n)?;
    let mut omega = vector::zeros(alg.dim());
    for i in 1..=n {
        omega[alg.index_of(&format!("ξ{i}η{i}")).unwrap()] = one();
    }
    let mut integral = vector::zeros(alg.dim());
    integral[alg.dim() - 1] = one();
    PolarizedAlgebra::new(alg, omega, integral)
}

/// Truncated polynomial algebra on `ω ∈ (1,1)` with `∫ ω^n = 1`.
pub fn projective_space(n: usize) -> Result<PolarizedAlgebra> {
    if n == 0 || n > MAX_PN {
        return Err(Error::Precondition(format!(
            "projective_space(n) needs 1 ≤ n ≤ {MAX_PN}, got {n}"
        )));
    }
    let basis = (0..=n as i64)
        .map(|i| {
            let name = match i {
                0 => "1".to_string(),
                1 => "ω".to_string(),
                _ => format!("ω^{i}"),
            };
            BasisElement::new(name, i, i)
        })
        .collect();
    let mut products = BTreeMap::new();
    for i in 0..=n {
        for j in 0..=n - i {
            products.insert((i, j), vector::unit(n + 1, i + j));
        }
    }
    let alg = BigradedAlgebra::new(n, basis, &products)?;
    PolarizedAlgebra::new(alg, vector::unit(n + 1, 1), vector::unit(n + 1, n))
}

/// Graded tensor product `(a⊗b)(c⊗d) = (-1)^{|b||c|} ac ⊗ bd`, with
/// `ω = ω_A ⊗ 1 + 1 ⊗ ω_B` and the product integral.
pub fn product_algebra(a: &PolarizedAlgebra, b: &PolarizedAlgebra) -> Result<PolarizedAlgebra> {
    let (aa, bb) = (a.algebra(), b.algebra());
    let (da, db) = (aa.dim(), bb.dim());
    if da * db > MAX_PRODUCT_DIM {
        return Err(Error::Precondition(format!(
            "product of dimension {} exceeds the limit {MAX_PRODUCT_DIM}",
            da * db
        )));
    }
    let idx = |i: usize, j: usize| i * db + j;
    let basis = (0..da)
        .flat_map(|i| (0..db).map(move |j| (i, j)))
        .map(|(i, j)| {
            let (x, y) = (&aa.basis()[i], &bb.basis()[j]);
            BasisElement::new(format!("{}⊗{}", x.name, y.name), x.p + y.p, x.q + y.q)
        })
        .collect();
    let dim = da * db;
    let mut products = BTreeMap::new();
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    let left = aa.product_terms(i, k);
                    let right = bb.product_terms(j, l);
                    if left.is_empty() || right.is_empty() {
                        continue;
                    }
                    let s = sign(bb.degree(j) * aa.degree(k));
                    let mut v = vector::zeros(dim);
                    for (x, cx) in left {
                        for (y, cy) in right {
                            v[idx(*x, *y)] += &s * cx * cy;
                        }
                    }
                    products.insert((idx(i, j), idx(k, l)), v);
                }
            }
        }
    }
    let alg = BigradedAlgebra::new(aa.n() + bb.n(), basis, &products)?;
    let tensor = |x: &[Scalar], y: &[Scalar]| {
        let mut v = vector::zeros(dim);
        for i in 0..da {
            for j in 0..db {
                v[idx(i, j)] = &x[i] * &y[j];
            }
        }
        v
    };
    let omega = vector::add(&tensor(a.omega(), bb.unit()), &tensor(aa.unit(), b.omega()));
    let integral = tensor(a.integral(), b.integral());
    PolarizedAlgebra::new(alg, omega, integral)
}

fn unit_index(alg: &BigradedAlgebra) -> usize {
    alg.unit().iter().position(|c| *c == one()).unwrap_or(0)
}

pub fn build_model(kind: &ModelKind) -> Result<VarietyModel> {
    match kind {
        ModelKind::Torus(n) => {
            let pa = torus(*n)?;
            let roles = GeneratorRoles::degree_one(pa.algebra());
            VarietyModel::new(kind.label(), kind.clone(), pa, roles)
        }
        ModelKind::ProjectiveSpace(n) => {
            let pa = projective_space(*n)?;
            let roles = GeneratorRoles {
                other: vec![pa.algebra().index_of("ω").unwrap()],
                ..Default::default()
            };
            VarietyModel::new(kind.label(), kind.clone(), pa, roles)
        }
        ModelKind::Product(a, b) => product(&build_model(a)?, &build_model(b)?),
        ModelKind::Custom => Err(Error::Precondition(
            "custom models are read from JSON, not built".into(),
        )),
    }
}

/// Product model; generators `g⊗1` and `1⊗h` keep their roles.
pub fn product(a: &VarietyModel, b: &VarietyModel) -> Result<VarietyModel> {
    let pa = product_algebra(&a.algebra, &b.algebra)?;
    let db = b.algebra.algebra().dim();
    let ua = unit_index(a.algebra.algebra());
    let ub = unit_index(b.algebra.algebra());
    let left = |v: &[usize]| v.iter().map(|&i| i * db + ub).collect::<Vec<_>>();
    let right = |v: &[usize]| v.iter().map(|&j| ua * db + j).collect::<Vec<_>>();
    let roles = GeneratorRoles {
        forms: [left(&a.roles.forms), right(&b.roles.forms)].concat(),
        classes: [left(&a.roles.classes), right(&b.roles.classes)].concat(),
        other: [left(&a.roles.other), right(&b.roles.other)].concat(),
    };
    let kind = ModelKind::Product(Box::new(a.kind.clone()), Box::new(b.kind.clone()));
    let name = format!("{} x {}", a.name, b.name);
    VarietyModel::new(name, kind, pa, roles)
}

/// Action of an obstruction class: images of the `(0,1)` generators, scaled by `scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionDatum {
    /// `alpha[k]` is the image of `roles.forms[k]` before scaling.
    pub alpha: Vec<Vec<Scalar>>,
    pub scale: Scalar,
}

impl ObstructionDatum {
    pub fn zero(model: &VarietyModel) -> Self {
        let dim = model.algebra.algebra().dim();
        ObstructionDatum {
            alpha: vec![vector::zeros(dim); model.roles.forms.len()],
            scale: one(),
        }
    }
}

/// The bidegree `(2,-1)` derivation sending each form to `scale · alpha` and every
/// other generator to zero.
pub fn d2_from_alpha(model: &VarietyModel, datum: &ObstructionDatum) -> Result<Derivation> {
    let alg = model.algebra.algebra();
    if datum.alpha.len() != model.roles.forms.len() {
        return Err(Error::Dimension(format!(
            "{} images supplied for {} forms",
            datum.alpha.len(),
            model.roles.forms.len()
        )));
    }
    let gens = model.roles.all();
    let images: Vec<Vec<Scalar>> = gens
        .iter()
        .map(|g| match model.roles.forms.iter().position(|f| f == g) {
            Some(k) => vector::scale(&datum.alpha[k], &datum.scale),
            None => vector::zeros(alg.dim()),
        })
        .collect();
    extend_from_generators(alg, (2, -1), &gens, &images)
}

/// `dim E_2^{p,q}` for `0 ≤ p, q ≤ n`.
pub fn lagrangian_e2_table(model: &VarietyModel) -> BTreeMap<Bidegree, usize> {
    let d = model.hodge_diamond();
    let n = d.n() as i64;
    let mut out = BTreeMap::new();
    for p in 0..=n {
        for q in 0..=n {
            out.insert((p, q), d.h(p as usize, q as usize));
        }
    }
    out
}

/// `dim Ext^k = Σ_{p+q=k} dim E_2^{p,q}`; only the degenerate case is implemented.
pub fn ext_dimensions(model: &VarietyModel, degenerate: bool) -> Result<Vec<usize>> {
    if !degenerate {
        return Err(Error::Unsupported(
            "Ext dimensions of a non-degenerate spectral sequence need the geometric d₂".into(),
        ));
    }
    Ok(model.hodge_diamond().betti())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YonedaProduct {
    /// Exterior multiplication in the `q` index.
    Exterior,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LciTable {
    pub codimension: usize,
    pub table: BTreeMap<Bidegree, usize>,
    pub product: YonedaProduct,
}

/// `E_2` shape for an lci embedding of codimension `c`; rows `q` outside `[0, c]` must vanish.
pub fn lci_e2_table(c: usize, dims: &BTreeMap<Bidegree, usize>) -> Result<LciTable> {
    let c_i = c as i64;
    if let Some((&(p, q), &d)) = dims.iter().find(|(&(p, q), &d)| d > 0 && (q < 0 || q > c_i || p < 0)) {
        return Err(Error::Precondition(format!(
            "E_2^({p},{q}) = {d} but rows outside q ∈ [0, {c}] and columns p < 0 vanish"
        )));
    }
    let p_max = dims
        .iter()
        .filter(|(_, &d)| d > 0)
        .map(|(&(p, _), _)| p)
        .max()
        .unwrap_or(0);
    let mut table = BTreeMap::new();
    for p in 0..=p_max {
        for q in 0..=c_i {
            table.insert((p, q), dims.get(&(p, q)).copied().unwrap_or(0));
        }
    }
    Ok(LciTable {
        codimension: c,
        table,
        product: YonedaProduct::Exterior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, ratio};
    use crate::lefschetz::serre_sign_check;
    use crate::multalg::verify_leibniz;

    #[test]
    fn torus_two_shape() {
        let m = build_model(&ModelKind::Torus(2)).unwrap();
        assert_eq!(m.algebra().algebra().dim(), 16);
        assert_eq!(m.hodge_diamond().betti(), vec![1, 4, 6, 4, 1]);
        for ((p, q), d) in lagrangian_e2_table(&m) {
            let binom = |k: i64| [1, 2, 1][k as usize];
            assert_eq!(d, binom(p) * binom(q));
        }
        assert_eq!(m.roles().forms.len(), 2);
        assert_eq!(m.roles().classes.len(), 2);
    }

    #[test]
    fn projective_space_shape() {
        let m = build_model(&ModelKind::ProjectiveSpace(3)).unwrap();
        for ((p, q), d) in lagrangian_e2_table(&m) {
            assert_eq!(d, usize::from(p == q));
        }
        assert_eq!(ext_dimensions(&m, true).unwrap(), vec![1, 0, 1, 0, 1, 0, 1]);
        assert!(matches!(ext_dimensions(&m, false), Err(Error::Unsupported(_))));
    }

    #[test]
    fn product_of_circles_matches_torus() {
        let t1 = Box::new(ModelKind::Torus(1));
        let prod = build_model(&ModelKind::Product(t1.clone(), t1)).unwrap();
        let t2 = build_model(&ModelKind::Torus(2)).unwrap();
        assert_eq!(prod.hodge_diamond(), t2.hodge_diamond());
        let mixed = build_model(&ModelKind::Product(
            Box::new(ModelKind::Torus(1)),
            Box::new(ModelKind::ProjectiveSpace(1)),
        ))
        .unwrap();
        assert_eq!(ext_dimensions(&mixed, true).unwrap(), vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn d2_on_torus_and_scaling() {
        let m = build_model(&ModelKind::Torus(2)).unwrap();
        let alg = m.algebra().algebra();
        let e = alg.basis_vector(alg.index_of("η1η2").unwrap());
        let datum = ObstructionDatum {
            alpha: vec![e, vector::zeros(16)],
            scale: one(),
        };
        let d = d2_from_alpha(&m, &datum).unwrap();
        assert!(verify_leibniz(alg, &d).holds);
        assert!(serre_sign_check(m.algebra(), &d).unwrap().holds);
        let x = alg.index_of("ξ1ξ2").unwrap();
        // d(ξ1ξ2) = η1η2ξ2 = η1ξ2η2 after one transposition
        let mut want = vector::zeros(16);
        want[alg.index_of("η1ξ2η2").unwrap()] = int(-1);
        assert_eq!(d.image_of(x), want);
        let s = ratio(3, 7);
        let scaled = d2_from_alpha(&m, &ObstructionDatum { scale: s.clone(), ..datum }).unwrap();
        assert_eq!(scaled, d.scale(&s));
        assert!(d2_from_alpha(&m, &ObstructionDatum::zero(&m)).unwrap().is_zero());
    }

    #[test]
    fn d2_on_projective_space_is_zero() {
        let m = build_model(&ModelKind::ProjectiveSpace(2)).unwrap();
        let d = d2_from_alpha(&m, &ObstructionDatum::zero(&m)).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn lci_tables() {
        let dims: BTreeMap<Bidegree, usize> = [((0, 0), 1), ((1, 0), 2), ((0, 1), 3)].into();
        let t = lci_e2_table(1, &dims).unwrap();
        assert_eq!(t.table.len(), 4);
        assert_eq!(t.table[&(1, 1)], 0);
        let bad: BTreeMap<Bidegree, usize> = [((0, 2), 1)].into();
        assert!(lci_e2_table(1, &bad).is_err());
        let m = build_model(&ModelKind::Torus(2)).unwrap();
        let hodge = lagrangian_e2_table(&m);
        assert_eq!(lci_e2_table(2, &hodge).unwrap().table, hodge);
    }

    #[test]
    fn hodge_diamond_rejects_asymmetry() {
        assert!(HodgeDiamond::new(1, vec![vec![1, 2], vec![1, 1]]).is_err());
        assert!(HodgeDiamond::new(1, vec![vec![1, 1], vec![1, 1]]).is_ok());
    }
}
