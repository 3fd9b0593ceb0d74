use num_traits::Zero;

use super::matrix::{row_reduce, vector, Matrix};
use super::scalar::{format_vector, Scalar};
use crate::error::{Error, Result};

/// A linear subspace of `Q^ambient`, stored by its reduced column echelon basis.
///
/// Two subspaces are equal iff their stored bases are equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    ambient: usize,
    // Basis vectors in reduced echelon form: vector k has a 1 at pivots[k]
    // and every other basis vector vanishes there.
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient).map(|i| vector::unit(ambient, i)).collect();
        Subspace {
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    /// Canonical basis of the span of `vectors`.
    pub fn span(ambient: usize, vectors: &[Vec<Scalar>]) -> Result<Self> {
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != ambient) {
            return Err(Error::Dimension(format!(
                "vector {i} has length {}, ambient dimension is {ambient}",
                v.len()
            )));
        }
        let mut rows = vectors.to_vec();
        let pivots = row_reduce(&mut rows, ambient);
        Ok(Subspace {
            ambient,
            basis: rows,
            pivots,
        })
    }

    pub fn from_basis_matrix(m: &Matrix) -> Self {
        Subspace::span(m.nrows(), &m.columns()).expect("columns match row count")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis_vectors(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Basis as an `ambient x dim` matrix in reduced column echelon form.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.ambient, &self.basis).expect("basis lengths")
    }

    /// `v` minus its component along this subspace with respect to the pivot
    /// coordinates. Linear, idempotent, with kernel exactly this subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut r = v.to_vec();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let c = -r[p].clone();
                vector::axpy(&mut r, &c, b);
            }
        }
        r
    }

    /// Coefficients of `v` in the stored basis. Only meaningful when `v` lies in the subspace.
    pub fn coefficients(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        v.len() == self.ambient && vector::is_zero(&self.reduce(v))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    /// First basis vector not contained in `other`.
    pub fn first_outside(&self, other: &Subspace) -> Option<&Vec<Scalar>> {
        self.basis.iter().find(|b| !other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "sum: ambient mismatch");
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &all).expect("same ambient")
    }

    pub fn add_vectors(&self, vectors: &[Vec<Scalar>]) -> Result<Subspace> {
        let mut all = self.basis.clone();
        all.extend(vectors.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "intersection: ambient mismatch");
        // x in self ∩ other  <=>  x = U a with reduce_other(U a) = 0.
        let reduced: Vec<Vec<Scalar>> = self.basis.iter().map(|b| other.reduce(b)).collect();
        let m = Matrix::from_columns(self.ambient, &reduced).expect("lengths");
        let coeffs = m.kernel();
        let vectors: Vec<Vec<Scalar>> = coeffs
            .basis_vectors()
            .iter()
            .map(|a| vector::combine(self.ambient, a, &self.basis))
            .collect();
        Subspace::span(self.ambient, &vectors).expect("same ambient")
    }

    /// Image under `f`, a subspace of `Q^{f.nrows()}`.
    pub fn image(&self, f: &Matrix) -> Subspace {
        assert_eq!(f.ncols(), self.ambient, "image: map domain mismatch");
        let vs: Vec<Vec<Scalar>> = self.basis.iter().map(|b| f.apply(b)).collect();
        Subspace::span(f.nrows(), &vs).expect("image lengths")
    }

    /// `{ x : f x ∈ target }`, a subspace of `Q^{f.ncols()}`.
    pub fn preimage(f: &Matrix, target: &Subspace) -> Subspace {
        assert_eq!(f.nrows(), target.ambient, "preimage: codomain mismatch");
        let cols: Vec<Vec<Scalar>> = f.columns().iter().map(|c| target.reduce(c)).collect();
        Matrix::from_columns(f.nrows(), &cols)
            .expect("lengths")
            .kernel()
    }
}

/// A subquotient `Z / B` of `Q^ambient`, with `B ⊆ Z`.
///
/// Elements are represented by coordinates in a canonical complement of `B`
/// inside `Z`: the echelon basis of the projection of `Z` along `B`'s pivots.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subquotient {
    numerator: Subspace,
    denominator: Subspace,
    complement: Subspace,
}

impl Subquotient {
    pub fn new(numerator: Subspace, denominator: Subspace) -> Result<Self> {
        if numerator.ambient != denominator.ambient {
            return Err(Error::Dimension(format!(
                "subquotient: numerator ambient {} vs denominator ambient {}",
                numerator.ambient, denominator.ambient
            )));
        }
        if let Some(v) = denominator.first_outside(&numerator) {
            return Err(Error::Containment {
                what: "subquotient denominator is not inside the numerator".into(),
                vector: format_vector(v),
            });
        }
        let projected: Vec<Vec<Scalar>> =
            numerator.basis.iter().map(|z| denominator.reduce(z)).collect();
        let complement = Subspace::span(numerator.ambient, &projected)?;
        Ok(Subquotient {
            numerator,
            denominator,
            complement,
        })
    }

    /// The whole space viewed as `Q^n / 0`.
    pub fn whole(ambient: usize) -> Self {
        Subquotient::new(Subspace::full(ambient), Subspace::zero(ambient)).expect("0 ⊆ Q^n")
    }

    pub fn ambient_dim(&self) -> usize {
        self.numerator.ambient
    }

    pub fn dim(&self) -> usize {
        self.complement.dim()
    }

    pub fn numerator(&self) -> &Subspace {
        &self.numerator
    }

    pub fn denominator(&self) -> &Subspace {
        &self.denominator
    }

    /// Coset representatives forming a basis of the quotient.
    pub fn complement_basis(&self) -> &[Vec<Scalar>] {
        self.complement.basis_vectors()
    }

    /// Coordinates of the class of `v`; `v` must lie in the numerator.
    pub fn coords(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if !self.numerator.contains(v) {
            return Err(Error::Containment {
                what: "vector is not in the subquotient numerator".into(),
                vector: format_vector(v),
            });
        }
        let r = self.denominator.reduce(v);
        Ok(self.complement.coefficients(&r))
    }

    /// The canonical representative with the given coordinates.
    pub fn lift(&self, coords: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(coords.len(), self.dim(), "lift: coordinate count");
        vector::combine(self.ambient_dim(), coords, self.complement_basis())
    }

    /// Matrix (`dim x ambient`) sending a vector of the numerator to its coordinates.
    /// Only valid on the numerator.
    pub fn projection_matrix(&self) -> Matrix {
        let n = self.ambient_dim();
        let cols: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let r = self.denominator.reduce(&vector::unit(n, i));
                self.complement.coefficients(&r)
            })
            .collect();
        Matrix::from_columns(self.dim(), &cols).expect("lengths")
    }
}

/// Matrix of the map induced by `f` from `source` to `target`, in canonical complement bases.
pub fn induced_map(f: &Matrix, source: &Subquotient, target: &Subquotient) -> Result<Matrix> {
    if f.ncols() != source.ambient_dim() || f.nrows() != target.ambient_dim() {
        return Err(Error::Dimension(format!(
            "induced map: f is {}x{}, source ambient {}, target ambient {}",
            f.nrows(),
            f.ncols(),
            source.ambient_dim(),
            target.ambient_dim()
        )));
    }
    for (i, b) in source.denominator.basis_vectors().iter().enumerate() {
        let fb = f.apply(b);
        if !target.denominator.contains(&fb) {
            return Err(Error::Containment {
                what: format!("f(source denominator basis vector {i}) is not in the target denominator"),
                vector: format_vector(b),
            });
        }
    }
    for (i, z) in source.numerator.basis_vectors().iter().enumerate() {
        let fz = f.apply(z);
        if !target.numerator.contains(&fz) {
            return Err(Error::Containment {
                what: format!("f(source numerator basis vector {i}) is not in the target numerator"),
                vector: format_vector(z),
            });
        }
    }
    let cols: Result<Vec<Vec<Scalar>>> = source
        .complement_basis()
        .iter()
        .map(|c| target.coords(&f.apply(c)))
        .collect();
    Matrix::from_columns(target.dim(), &cols?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairingRank {
    pub rank: usize,
    pub nondegenerate: bool,
}

/// Rank of a square Gram matrix, and whether the pairing it represents is perfect.
pub fn pairing_rank(gram: &Matrix) -> Result<PairingRank> {
    if gram.nrows() != gram.ncols() {
        return Err(Error::Dimension(format!(
            "Gram matrix must be square, got {}x{}",
            gram.nrows(),
            gram.ncols()
        )));
    }
    let rank = gram.rank();
    Ok(PairingRank {
        rank,
        nondegenerate: rank == gram.nrows(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::scalar::int;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn canonical_basis_examples() {
        let s = Subspace::span(2, &[v(&[2, 4]), v(&[1, 2])]).unwrap();
        assert_eq!(s.basis_vectors(), &[v(&[1, 2])]);
        let e = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(e.basis_matrix(), Matrix::identity(3));
        assert!(Subspace::span(2, &[v(&[1, 2, 3])]).is_err());
    }

    #[test]
    fn canonical_basis_is_idempotent() {
        let s = Subspace::span(3, &[v(&[1, 2, 3]), v(&[2, 1, 0])]).unwrap();
        let again = Subspace::span(3, s.basis_vectors()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn induced_map_examples() {
        let id = Matrix::identity(2);
        let sq = Subquotient::new(
            Subspace::full(2),
            Subspace::span(2, &[v(&[1, 0])]).unwrap(),
        )
        .unwrap();
        assert_eq!(induced_map(&id, &sq, &sq).unwrap(), Matrix::from_ints(1, 1, &[1]));
        let zero = Matrix::zeros(2, 2);
        assert_eq!(induced_map(&zero, &sq, &sq).unwrap(), Matrix::zeros(1, 1));
    }

    #[test]
    fn induced_map_names_offending_vector() {
        let swap = Matrix::from_ints(2, 2, &[0, 1, 1, 0]);
        let sq = Subquotient::new(
            Subspace::full(2),
            Subspace::span(2, &[v(&[1, 0])]).unwrap(),
        )
        .unwrap();
        let err = induced_map(&swap, &sq, &sq).unwrap_err();
        assert!(err.to_string().contains("(1, 0)"), "{err}");
    }

    #[test]
    fn subquotient_requires_containment() {
        let z = Subspace::span(2, &[v(&[1, 0])]).unwrap();
        let b = Subspace::span(2, &[v(&[0, 1])]).unwrap();
        assert!(Subquotient::new(z, b).is_err());
    }

    #[test]
    fn coords_and_lift_round_trip() {
        let z = Subspace::span(3, &[v(&[1, 1, 0]), v(&[0, 1, 1])]).unwrap();
        let b = Subspace::span(3, &[v(&[1, 2, 1])]).unwrap();
        let q = Subquotient::new(z, b).unwrap();
        assert_eq!(q.dim(), 1);
        let c = q.coords(&v(&[1, 1, 0])).unwrap();
        let back = q.lift(&c);
        assert!(q.denominator().contains(&vector::sub(&back, &v(&[1, 1, 0]))));
        assert!(q.coords(&v(&[1, 0, 0])).is_err());
    }

    #[test]
    fn pairing_rank_examples() {
        let sympl = Matrix::from_ints(2, 2, &[0, 1, -1, 0]);
        assert_eq!(
            pairing_rank(&sympl).unwrap(),
            PairingRank { rank: 2, nondegenerate: true }
        );
        assert_eq!(
            pairing_rank(&Matrix::zeros(3, 3)).unwrap(),
            PairingRank { rank: 0, nondegenerate: false }
        );
        assert!(pairing_rank(&Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn preimage_and_intersection() {
        // f = projection onto first coordinate
        let f = Matrix::from_ints(1, 2, &[1, 0]);
        let pre = Subspace::preimage(&f, &Subspace::zero(1));
        assert_eq!(pre.basis_vectors(), &[v(&[0, 1])]);
        let a = Subspace::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        let b = Subspace::span(3, &[v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        assert_eq!(a.intersection(&b).basis_vectors(), &[v(&[0, 1, 0])]);
        assert_eq!(a.sum(&b).dim(), 3);
    }
}
