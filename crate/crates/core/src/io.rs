//! JSON reading and writing. Rationals travel as strings `"a/b"` (or `"a"`),
//! matrices as row-major arrays of such strings, and every parse error names
//! the JSON path where it happened.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactla::{format_scalar, parse_scalar, vector, Matrix, Scalar, Subspace};
use crate::filtered::{CochainComplex, FilteredComplex, Filtration};
use crate::geometry::{GeneratorRoles, ModelKind, ObstructionDatum, VarietyModel};
use crate::lefschetz::PolarizedAlgebra;
use crate::multalg::{extend_from_generators, BasisElement, BigradedAlgebra, Derivation};
use crate::spectral::Page;
use crate::Bidegree;

fn at(path: &str, key: impl std::fmt::Display) -> String {
    format!("{path}.{key}")
}

fn idx(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(path, "expected an array"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(path, format!("missing field \"{key}\"")))
}

fn integer(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| Error::parse(path, "expected an integer"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(path, "expected a non-negative integer"))
}

fn key_integer(key: &str, path: &str) -> Result<i64> {
    key.trim()
        .parse()
        .map_err(|_| Error::parse(path, format!("key \"{key}\" is not an integer")))
}

pub fn scalar_from_json(v: &Value, path: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s).map_err(|_| {
            Error::parse(path, format!("\"{s}\" is not a rational \"a/b\" or integer"))
        }),
        Value::Number(n) if n.is_i64() => Ok(crate::exactla::int(n.as_i64().unwrap())),
        _ => Err(Error::parse(path, "expected a rational string")),
    }
}

pub fn scalar_to_json(x: &Scalar) -> Value {
    Value::String(format_scalar(x))
}

pub fn vector_to_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_to_json).collect())
}

/// Row-major array of rows; an empty array stands for any matrix with no rows.
pub fn matrix_to_json(m: &Matrix) -> Value {
    Value::Array(m.rows_vec().iter().map(|r| vector_to_json(r)).collect())
}

/// Parses a matrix of shape `rows x cols`.
pub fn matrix_from_json(v: &Value, rows: usize, cols: usize, path: &str) -> Result<Matrix> {
    let rs = array(v, path)?;
    if rs.is_empty() && (rows == 0 || cols == 0) {
        return Ok(Matrix::zeros(rows, cols));
    }
    if rs.len() != rows {
        return Err(Error::parse(path, format!("expected {rows} rows, found {}", rs.len())));
    }
    let mut out = Vec::with_capacity(rows);
    for (i, r) in rs.iter().enumerate() {
        let p = idx(path, i);
        let entries = array(r, &p)?;
        if entries.len() != cols {
            return Err(Error::parse(&p, format!("expected {cols} entries, found {}", entries.len())));
        }
        out.push(
            entries
                .iter()
                .enumerate()
                .map(|(j, e)| scalar_from_json(e, &idx(&p, j)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Matrix::from_rows(out, cols)
}

/// Rows are spanning vectors of the subspace.
fn subspace_from_json(v: &Value, ambient: usize, path: &str) -> Result<Subspace> {
    let rows = array(v, path)?;
    let m = matrix_from_json(v, rows.len(), ambient, path)?;
    Subspace::span(ambient, &m.rows_vec())
}

fn subspace_to_json(s: &Subspace) -> Value {
    Value::Array(s.basis_vectors().iter().map(|b| vector_to_json(b)).collect())
}

/// Reads `{ "degrees": [lo, hi], "dims": {n: int}, "d": {n: matrix}, "filtration": {p: {n: rows}} }`.
///
/// Filtration levels run from the smallest listed `p` (which must be everything)
/// to one past the largest, where the filtration is zero. A degree missing under
/// some `p` repeats the level `F^{p+1}`.
pub fn filtered_complex_from_json(v: &Value) -> Result<FilteredComplex> {
    let root = object(v, "$")?;
    let degrees = array(field(root, "degrees", "$")?, "$.degrees")?;
    if degrees.len() != 2 {
        return Err(Error::parse("$.degrees", "expected [lo, hi]"));
    }
    let lo = integer(&degrees[0], "$.degrees[0]")?;
    let hi = integer(&degrees[1], "$.degrees[1]")?;
    if hi < lo {
        return Err(Error::parse("$.degrees", format!("hi = {hi} is below lo = {lo}")));
    }
    let dims_obj = object(field(root, "dims", "$")?, "$.dims")?;
    let mut dims = vec![0usize; (hi - lo + 1) as usize];
    for (k, d) in dims_obj {
        let n = key_integer(k, "$.dims")?;
        if n < lo || n > hi {
            return Err(Error::parse(at("$.dims", k), format!("degree {n} outside [{lo}, {hi}]")));
        }
        dims[(n - lo) as usize] = count(d, &at("$.dims", k))?;
    }
    let dim = |n: i64| dims[(n - lo) as usize];
    let mut diffs: Vec<Matrix> = (lo..hi).map(|n| Matrix::zeros(dim(n + 1), dim(n))).collect();
    if let Some(d) = root.get("d") {
        for (k, m) in object(d, "$.d")? {
            let n = key_integer(k, "$.d")?;
            if n < lo || n >= hi {
                return Err(Error::parse(at("$.d", k), format!("no differential leaves degree {n}")));
            }
            diffs[(n - lo) as usize] = matrix_from_json(m, dim(n + 1), dim(n), &at("$.d", k))?;
        }
    }
    let complex = CochainComplex::new(lo, dims.clone(), diffs)?;
    let filt = object(field(root, "filtration", "$")?, "$.filtration")?;
    let mut given: BTreeMap<i64, BTreeMap<i64, Subspace>> = BTreeMap::new();
    for (pk, row) in filt {
        let p = key_integer(pk, "$.filtration")?;
        let path = at("$.filtration", pk);
        let mut levels = BTreeMap::new();
        for (nk, basis) in object(row, &path)? {
            let n = key_integer(nk, &path)?;
            if n < lo || n > hi {
                return Err(Error::parse(at(&path, nk), format!("degree {n} outside [{lo}, {hi}]")));
            }
            levels.insert(n, subspace_from_json(basis, dim(n), &at(&path, nk))?);
        }
        given.insert(p, levels);
    }
    let (Some(&f_lo), Some(&f_top)) = (given.keys().next(), given.keys().next_back()) else {
        return Err(Error::parse("$.filtration", "at least one level is required"));
    };
    let f_hi = f_top + 1;
    let mut levels = BTreeMap::new();
    for n in lo..=hi {
        levels.insert((f_hi, n), Subspace::zero(dim(n)));
    }
    for p in (f_lo..f_hi).rev() {
        for n in lo..=hi {
            let s = given
                .get(&p)
                .and_then(|row| row.get(&n))
                .cloned()
                .unwrap_or_else(|| levels[&(p + 1, n)].clone());
            levels.insert((p, n), s);
        }
    }
    FilteredComplex::new(complex, Filtration::new(f_lo, f_hi, levels)?)
}

pub fn filtered_complex_to_json(fk: &FilteredComplex) -> Value {
    let k = fk.complex();
    let (f_lo, f_hi) = fk.filtration_range();
    let dims: Map<String, Value> = k.degrees().map(|n| (n.to_string(), json!(k.dim(n)))).collect();
    let d: Map<String, Value> = (k.lo()..k.hi())
        .map(|n| (n.to_string(), matrix_to_json(&k.differential(n))))
        .collect();
    let filtration: Map<String, Value> = (f_lo..f_hi)
        .map(|p| {
            let row: Map<String, Value> = k
                .degrees()
                .map(|n| (n.to_string(), subspace_to_json(&fk.level(p, n))))
                .collect();
            (p.to_string(), Value::Object(row))
        })
        .collect();
    json!({
        "degrees": [k.lo(), k.hi()],
        "dims": dims,
        "d": d,
        "filtration": filtration,
    })
}

pub fn cell_key((p, q): Bidegree) -> String {
    format!("{p},{q}")
}

pub fn parse_cell_key(key: &str, path: &str) -> Result<Bidegree> {
    let bad = || Error::parse(path, format!("key \"{key}\" is not of the form \"p,q\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Nonzero cell dimensions `{"p,q": dim}`.
pub fn page_dims_json(page: &Page) -> Value {
    Value::Object(
        page.dims()
            .into_iter()
            .map(|(c, d)| (cell_key(c), json!(d)))
            .collect(),
    )
}

/// Nonzero differentials `{"p,q": matrix}` in the cell bases.
pub fn page_maps_json(page: &Page) -> Value {
    Value::Object(
        page.differentials()
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&c, m)| (cell_key(c), matrix_to_json(m)))
            .collect(),
    )
}

/// An algebra as read from JSON, with the optional polarization and generator roles.
#[derive(Clone, Debug)]
pub struct AlgebraFile {
    pub name: Option<String>,
    pub algebra: BigradedAlgebra,
    pub omega: Option<Vec<Scalar>>,
    pub integral: Option<Vec<Scalar>>,
    pub generators: Option<GeneratorRoles>,
}

/// Numeric keys are indices; anything else is looked up as a basis name.
fn basis_index(alg_names: &[String], key: &str, path: &str) -> Result<usize> {
    if let Ok(i) = key.trim().parse::<usize>() {
        return if i < alg_names.len() {
            Ok(i)
        } else {
            Err(Error::parse(path, format!("index {i} out of range")))
        };
    }
    alg_names
        .iter()
        .position(|n| n == key)
        .ok_or_else(|| Error::parse(path, format!("\"{key}\" is neither a basis name nor an index")))
}

fn basis_ref(names: &[String], v: &Value, path: &str) -> Result<usize> {
    match v {
        Value::String(s) => basis_index(names, s, path),
        Value::Number(_) => {
            let i = count(v, path)?;
            if i < names.len() {
                Ok(i)
            } else {
                Err(Error::parse(path, format!("index {i} out of range")))
            }
        }
        _ => Err(Error::parse(path, "expected a basis name or index")),
    }
}

/// A vector is a dense array of rationals or a sparse object `{index or basis name: rational}`.
pub fn element_from_json(names: &[String], v: &Value, path: &str) -> Result<Vec<Scalar>> {
    let dim = names.len();
    match v {
        Value::Array(xs) => {
            if xs.len() != dim {
                return Err(Error::parse(path, format!("expected {dim} coordinates, found {}", xs.len())));
            }
            xs.iter()
                .enumerate()
                .map(|(i, x)| scalar_from_json(x, &idx(path, i)))
                .collect()
        }
        Value::Object(m) => {
            let mut out = vector::zeros(dim);
            for (k, x) in m {
                let i = basis_index(names, k, path)?;
                out[i] += scalar_from_json(x, &at(path, k))?;
            }
            Ok(out)
        }
        _ => Err(Error::parse(path, "expected a coordinate array or a sparse object")),
    }
}

/// Reads `{ "n", "basis": [{"name","p","q"}], "products": {"i,j": vector},
/// "omega"?, "integral"?, "generators"?: {"forms","classes","other"}, "name"? }`.
/// Absent products are zero.
pub fn algebra_from_json(v: &Value) -> Result<AlgebraFile> {
    let root = object(v, "$")?;
    let n = count(field(root, "n", "$")?, "$.n")?;
    let mut basis = Vec::new();
    for (i, b) in array(field(root, "basis", "$")?, "$.basis")?.iter().enumerate() {
        let p = idx("$.basis", i);
        let o = object(b, &p)?;
        let name = field(o, "name", &p)?
            .as_str()
            .ok_or_else(|| Error::parse(at(&p, "name"), "expected a string"))?;
        basis.push(BasisElement::new(
            name,
            integer(field(o, "p", &p)?, &at(&p, "p"))?,
            integer(field(o, "q", &p)?, &at(&p, "q"))?,
        ));
    }
    let names: Vec<String> = basis.iter().map(|b| b.name.clone()).collect();
    let mut products = BTreeMap::new();
    if let Some(prods) = root.get("products") {
        for (k, val) in object(prods, "$.products")? {
            let path = at("$.products", k);
            let (a, b) = k
                .split_once(',')
                .ok_or_else(|| Error::parse(&path, "key must be \"i,j\""))?;
            let i = basis_index(&names, a.trim(), &path)?;
            let j = basis_index(&names, b.trim(), &path)?;
            products.insert((i, j), element_from_json(&names, val, &path)?);
        }
    }
    let algebra = BigradedAlgebra::new(n, basis, &products)?;
    let optional = |key: &str| -> Result<Option<Vec<Scalar>>> {
        root.get(key)
            .map(|x| element_from_json(&names, x, &at("$", key)))
            .transpose()
    };
    let omega = optional("omega")?;
    let integral = optional("integral")?;
    let generators = match root.get("generators") {
        None => None,
        Some(g) => {
            let o = object(g, "$.generators")?;
            let list = |key: &str| -> Result<Vec<usize>> {
                let path = at("$.generators", key);
                match o.get(key) {
                    None => Ok(Vec::new()),
                    Some(x) => array(x, &path)?
                        .iter()
                        .enumerate()
                        .map(|(i, e)| basis_ref(&names, e, &idx(&path, i)))
                        .collect(),
                }
            };
            Some(GeneratorRoles {
                forms: list("forms")?,
                classes: list("classes")?,
                other: list("other")?,
            })
        }
    };
    let name = root.get("name").and_then(Value::as_str).map(str::to_string);
    Ok(AlgebraFile {
        name,
        algebra,
        omega,
        integral,
        generators,
    })
}

impl AlgebraFile {
    pub fn names(&self) -> Vec<String> {
        self.algebra.basis().iter().map(|b| b.name.clone()).collect()
    }

    pub fn polarized(&self) -> Result<PolarizedAlgebra> {
        let omega = self
            .omega
            .clone()
            .ok_or_else(|| Error::parse("$", "missing field \"omega\""))?;
        let integral = self
            .integral
            .clone()
            .ok_or_else(|| Error::parse("$", "missing field \"integral\""))?;
        PolarizedAlgebra::new(self.algebra.clone(), omega, integral)
    }

    /// Generators default to the degree-1 basis elements sorted by bidegree.
    pub fn model(&self) -> Result<VarietyModel> {
        let pa = self.polarized()?;
        let roles = self
            .generators
            .clone()
            .unwrap_or_else(|| GeneratorRoles::degree_one(&self.algebra));
        let name = self.name.clone().unwrap_or_else(|| "custom".into());
        VarietyModel::new(name, ModelKind::Custom, pa, roles)
    }

    fn generator_list(&self) -> Vec<usize> {
        match &self.generators {
            Some(g) => g.all(),
            None => self.algebra.degree_indices(1),
        }
    }
}

pub fn algebra_to_json(alg: &BigradedAlgebra) -> Map<String, Value> {
    let basis: Vec<Value> = alg
        .basis()
        .iter()
        .map(|b| json!({"name": b.name, "p": b.p, "q": b.q}))
        .collect();
    let mut products = Map::new();
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            let terms = alg.product_terms(i, j);
            if terms.is_empty() {
                continue;
            }
            let sparse: Map<String, Value> = terms
                .iter()
                .map(|(k, c)| (k.to_string(), scalar_to_json(c)))
                .collect();
            products.insert(format!("{i},{j}"), Value::Object(sparse));
        }
    }
    let mut out = Map::new();
    out.insert("n".into(), json!(alg.n()));
    out.insert("basis".into(), Value::Array(basis));
    out.insert("products".into(), Value::Object(products));
    out
}

/// `{index: coefficient}` over the nonzero coordinates.
fn sparse_element(v: &[Scalar]) -> Value {
    Value::Object(
        v.iter()
            .enumerate()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(i, c)| (i.to_string(), scalar_to_json(c)))
            .collect(),
    )
}

pub fn model_to_json(model: &VarietyModel) -> Value {
    let pa = model.algebra();
    let alg = pa.algebra();
    let mut out = algebra_to_json(alg);
    let names = |v: &[usize]| -> Vec<Value> {
        v.iter().map(|&i| Value::String(alg.basis()[i].name.clone())).collect()
    };
    out.insert("name".into(), json!(model.name()));
    out.insert("omega".into(), sparse_element(pa.omega()));
    out.insert("integral".into(), sparse_element(pa.integral()));
    out.insert(
        "generators".into(),
        json!({
            "forms": names(&model.roles().forms),
            "classes": names(&model.roles().classes),
            "other": names(&model.roles().other),
        }),
    );
    Value::Object(out)
}

pub fn model_from_json(v: &Value) -> Result<VarietyModel> {
    algebra_from_json(v)?.model()
}

/// Reads `{ "bidegree": [a, b], "derivation": {basis name or index: vector} }`.
///
/// When every basis element has an image the map is taken as given (and may fail
/// Leibniz). Otherwise the listed elements must be generators; unlisted generators
/// map to zero and the rest follows by the Leibniz rule.
pub fn derivation_from_json(file: &AlgebraFile, v: &Value) -> Result<Derivation> {
    let alg = &file.algebra;
    let names = file.names();
    let root = object(v, "$")?;
    let bd = array(field(root, "bidegree", "$")?, "$.bidegree")?;
    if bd.len() != 2 {
        return Err(Error::parse("$.bidegree", "expected [a, b]"));
    }
    let bidegree = (integer(&bd[0], "$.bidegree[0]")?, integer(&bd[1], "$.bidegree[1]")?);
    let mut images = BTreeMap::new();
    if let Some(d) = root.get("derivation") {
        for (k, val) in object(d, "$.derivation")? {
            let path = at("$.derivation", k);
            let i = basis_index(&names, k, &path)?;
            images.insert(i, element_from_json(&names, val, &path)?);
        }
    }
    if images.len() == alg.dim() {
        let cols: Vec<Vec<Scalar>> = images.into_values().collect();
        return Derivation::from_images(alg, bidegree, &cols);
    }
    let gens = file.generator_list();
    if let Some(&k) = images.keys().find(|k| !gens.contains(k)) {
        return Err(Error::parse(
            at("$.derivation", &names[k]),
            "partial derivations may only list generators",
        ));
    }
    let imgs: Vec<Vec<Scalar>> = gens
        .iter()
        .map(|g| images.get(g).cloned().unwrap_or_else(|| vector::zeros(alg.dim())))
        .collect();
    extend_from_generators(alg, bidegree, &gens, &imgs)
}

pub fn derivation_to_json(alg: &BigradedAlgebra, d: &Derivation) -> Value {
    let images: Map<String, Value> = (0..alg.dim())
        .map(|i| (i.to_string(), sparse_element(&d.image_of(i))))
        .collect();
    let (a, b) = d.bidegree();
    json!({"bidegree": [a, b], "derivation": images})
}

/// Reads `{ "alpha": {form name or index: vector} }`; forms not listed map to zero.
pub fn alpha_from_json(model: &VarietyModel, v: &Value, scale: Scalar) -> Result<ObstructionDatum> {
    let alg = model.algebra().algebra();
    let names: Vec<String> = alg.basis().iter().map(|b| b.name.clone()).collect();
    let root = object(v, "$")?;
    let forms = &model.roles().forms;
    let mut alpha = vec![vector::zeros(alg.dim()); forms.len()];
    if let Some(a) = root.get("alpha") {
        for (k, val) in object(a, "$.alpha")? {
            let path = at("$.alpha", k);
            let i = basis_index(&names, k, &path)?;
            let slot = forms
                .iter()
                .position(|&f| f == i)
                .ok_or_else(|| Error::parse(&path, format!("\"{k}\" is not a (0,1) generator")))?;
            alpha[slot] = element_from_json(&names, val, &path)?;
        }
    }
    Ok(ObstructionDatum { alpha, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_model, d2_from_alpha};
    use crate::spectral::SpectralSequence;

    const ACYCLIC: &str = r#"{
        "degrees": [0, 1],
        "dims": {"0": 1, "1": 1},
        "d": {"0": [["1"]]},
        "filtration": {"0": {"0": [["1"]], "1": [["1"]]}, "1": {"0": []}, "2": {"1": [["1"]]}}
    }"#;

    #[test]
    fn acyclic_file_round_trips() {
        let fk = filtered_complex_from_json(&parse_json(ACYCLIC).unwrap()).unwrap();
        assert_eq!(fk.filtration_range(), (0, 3));
        let back = filtered_complex_from_json(&filtered_complex_to_json(&fk)).unwrap();
        assert_eq!(back, fk);
        let mut ss = SpectralSequence::new(fk).unwrap();
        let e2: BTreeMap<Bidegree, usize> = ss.page(2).unwrap().dims();
        assert_eq!(e2, [((0, 0), 1), ((2, -1), 1)].into());
    }

    #[test]
    fn parse_errors_carry_locations() {
        let bad = ACYCLIC.replace(r#""d": {"0": [["1"]]}"#, r#""d": {"0": [["x"]]}"#);
        let err = filtered_complex_from_json(&parse_json(&bad).unwrap()).unwrap_err();
        match err {
            Error::Parse { location, .. } => assert_eq!(location, "$.d.0[0][0]"),
            e => panic!("{e}"),
        }
        let err = parse_json("{ \"degrees\": [0,").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let short = ACYCLIC.replace(r#""d": {"0": [["1"]]}"#, r#""d": {"0": [["1", "2"]]}"#);
        let err = filtered_complex_from_json(&parse_json(&short).unwrap()).unwrap_err();
        assert!(err.to_string().contains("$.d.0[0]"));
    }

    #[test]
    fn invariant_violations_are_not_parse_errors() {
        let bad = ACYCLIC.replace(r#""2": {"1": [["1"]]}"#, r#""2": {"0": [["1"]]}"#);
        let err = filtered_complex_from_json(&parse_json(&bad).unwrap()).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Invariant);
    }

    #[test]
    fn models_round_trip() {
        for kind in [ModelKind::Torus(2), ModelKind::ProjectiveSpace(3)] {
            let m = build_model(&kind).unwrap();
            let back = model_from_json(&model_to_json(&m)).unwrap();
            assert_eq!(back.algebra(), m.algebra());
            assert_eq!(back.roles(), m.roles());
            assert_eq!(back.hodge_diamond(), m.hodge_diamond());
        }
    }

    #[test]
    fn derivations_round_trip_and_extend() {
        let m = build_model(&ModelKind::Torus(2)).unwrap();
        let file = algebra_from_json(&model_to_json(&m)).unwrap();
        let partial = json!({"bidegree": [2, -1], "derivation": {"ξ1": {"η1η2": "1"}}});
        let d = derivation_from_json(&file, &partial).unwrap();
        let alg = m.algebra().algebra();
        let datum = ObstructionDatum {
            alpha: vec![alg.basis_vector(alg.index_of("η1η2").unwrap()), vector::zeros(16)],
            scale: crate::exactla::int(1),
        };
        assert_eq!(d, d2_from_alpha(&m, &datum).unwrap());
        let full = derivation_to_json(alg, &d);
        assert_eq!(derivation_from_json(&file, &full).unwrap(), d);
        let alpha = alpha_from_json(&m, &json!({"alpha": {"ξ1": {"η1η2": "1"}}}), datum.scale.clone()).unwrap();
        assert_eq!(alpha, datum);
        let not_gen = json!({"bidegree": [2, -1], "derivation": {"ξ1ξ2": {}}});
        assert!(matches!(derivation_from_json(&file, &not_gen), Err(Error::Parse { .. })));
    }
}
