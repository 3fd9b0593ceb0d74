//! Bounded cochain complexes of finite-dimensional Q-vector spaces, canonical
//! truncations, and finite decreasing filtrations compatible with `d`.
//!
//! Conventions are cohomological: `d^n : K^n -> K^{n+1}`, and a filtration is a
//! decreasing chain `F^lo K = K ⊇ F^{lo+1} K ⊇ ... ⊇ F^hi K = 0`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::{format_vector, induced_map, vector, Matrix, Subquotient, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    lo: i64,
    dims: Vec<usize>,
    // d[k] is d^{lo+k} : K^{lo+k} -> K^{lo+k+1}; the last one maps into the zero space.
    d: Vec<Matrix>,
}

impl CochainComplex {
    /// `dims[k]` is `dim K^{lo+k}`; `differentials[k]` is `d^{lo+k}`, one fewer than `dims`.
    pub fn new(lo: i64, dims: Vec<usize>, differentials: Vec<Matrix>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Complex("a complex needs at least one degree".into()));
        }
        if differentials.len() + 1 != dims.len() {
            return Err(Error::Complex(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len() - 1,
                differentials.len()
            )));
        }
        for (k, m) in differentials.iter().enumerate() {
            let want = (dims[k + 1], dims[k]);
            if m.shape() != want {
                return Err(Error::Dimension(format!(
                    "d^{} has shape {:?}, expected {:?}",
                    lo + k as i64,
                    m.shape(),
                    want
                )));
            }
        }
        let mut d = differentials;
        d.push(Matrix::zeros(0, *dims.last().unwrap()));
        let complex = CochainComplex { lo, dims, d };
        for n in complex.lo..complex.hi() {
            let dd = &complex.differential(n + 1) * &complex.differential(n);
            if let Some((_, j)) = dd.first_nonzero() {
                return Err(Error::Complex(format!(
                    "d^{} ∘ d^{} ≠ 0 on basis vector e_{j} of K^{n}",
                    n + 1,
                    n
                )));
            }
        }
        Ok(complex)
    }

    /// A complex with zero differentials.
    pub fn with_zero_differential(lo: i64, dims: Vec<usize>) -> Result<Self> {
        let d = dims.windows(2).map(|w| Matrix::zeros(w[1], w[0])).collect();
        CochainComplex::new(lo, dims, d)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `d^n`, with zero maps outside the degree range.
    pub fn differential(&self, n: i64) -> Matrix {
        if n < self.lo || n > self.hi() {
            Matrix::zeros(self.dim(n + 1), self.dim(n))
        } else {
            self.d[(n - self.lo) as usize].clone()
        }
    }

    /// `H^n = ker d^n / im d^{n-1}`; the zero space outside the range.
    pub fn cohomology(&self, n: i64) -> Subquotient {
        let z = self.differential(n).kernel();
        let b = self.differential(n - 1).image();
        Subquotient::new(z, b).expect("d∘d = 0 checked at construction")
    }

    pub fn betti(&self) -> BTreeMap<i64, usize> {
        self.degrees().map(|n| (n, self.cohomology(n).dim())).collect()
    }

    /// Canonical truncation `τ≤p`: `K^i` below `p`, `ker d^p` in degree `p`, zero above.
    /// The comparison map is the inclusion into `K`.
    pub fn truncate_below(&self, p: i64) -> Truncation {
        let mut dims = Vec::new();
        let mut comparison = BTreeMap::new();
        let kernel_p = self.differential(p).kernel();
        for n in self.degrees() {
            let (dim, map) = if n < p {
                (self.dim(n), Matrix::identity(self.dim(n)))
            } else if n == p {
                (kernel_p.dim(), kernel_p.basis_matrix())
            } else {
                (0, Matrix::zeros(self.dim(n), 0))
            };
            dims.push(dim);
            comparison.insert(n, map);
        }
        let mut d = Vec::new();
        for n in self.lo..self.hi() {
            let m = if n + 1 < p {
                self.differential(n)
            } else if n + 1 == p {
                // d^{p-1} lands in ker d^p; express it in the kernel basis.
                let full = self.differential(n);
                let cols: Vec<_> = full
                    .columns()
                    .iter()
                    .map(|c| kernel_p.coefficients(c))
                    .collect();
                Matrix::from_columns(kernel_p.dim(), &cols).expect("lengths")
            } else {
                Matrix::zeros(dims[(n + 1 - self.lo) as usize], dims[(n - self.lo) as usize])
            };
            d.push(m);
        }
        let complex = CochainComplex::new(self.lo, dims, d).expect("truncation is a complex");
        Truncation {
            complex,
            comparison,
        }
    }

    /// Canonical truncation `τ≥p`: zero below `p`, `K^p / im d^{p-1}` in degree `p`,
    /// `K^i` above. The comparison map is the projection from `K`.
    pub fn truncate_above(&self, p: i64) -> Truncation {
        let quotient_p = Subquotient::new(
            Subspace::full(self.dim(p)),
            self.differential(p - 1).image(),
        )
        .expect("image ⊆ whole space");
        let mut dims = Vec::new();
        let mut comparison = BTreeMap::new();
        for n in self.degrees() {
            let (dim, map) = if n < p {
                (0, Matrix::zeros(0, self.dim(n)))
            } else if n == p {
                (quotient_p.dim(), quotient_p.projection_matrix())
            } else {
                (self.dim(n), Matrix::identity(self.dim(n)))
            };
            dims.push(dim);
            comparison.insert(n, map);
        }
        let mut d = Vec::new();
        for n in self.lo..self.hi() {
            let m = if n < p {
                Matrix::zeros(dims[(n + 1 - self.lo) as usize], dims[(n - self.lo) as usize])
            } else if n == p {
                induced_map(
                    &self.differential(n),
                    &quotient_p,
                    &Subquotient::whole(self.dim(n + 1)),
                )
                .expect("d kills im d")
            } else {
                self.differential(n)
            };
            d.push(m);
        }
        let complex = CochainComplex::new(self.lo, dims, d).expect("truncation is a complex");
        Truncation {
            complex,
            comparison,
        }
    }

    /// `τ^{[p-1,p]} = τ≥(p-1) τ≤p`: a two-term complex carrying `H^{p-1}` and `H^p`.
    pub fn window(&self, p: i64) -> CochainComplex {
        self.truncate_below(p).complex.truncate_above(p - 1).complex
    }
}

/// A truncated complex together with its comparison chain map to or from the original.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub complex: CochainComplex,
    /// Per degree: the inclusion `τ≤p K -> K` or the projection `K -> τ≥p K`.
    pub comparison: BTreeMap<i64, Matrix>,
}

/// Levels `F^p K^n` for `p` in `lo..=hi`; below `lo` everything, from `hi` on nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    lo: i64,
    hi: i64,
    levels: BTreeMap<(i64, i64), Subspace>,
}

impl Filtration {
    /// `levels[(p, n)]` for every `p` in `lo..=hi` and every degree `n` of the complex.
    pub fn new(lo: i64, hi: i64, levels: BTreeMap<(i64, i64), Subspace>) -> Result<Self> {
        if hi < lo {
            return Err(Error::Filtration(format!("empty level range [{lo}, {hi}]")));
        }
        Ok(Filtration { lo, hi, levels })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn width(&self) -> i64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    complex: CochainComplex,
    filtration: Filtration,
}

impl FilteredComplex {
    /// Validates exhaustiveness, boundedness, monotonicity and `d(F^p) ⊆ F^p`.
    pub fn new(complex: CochainComplex, filtration: Filtration) -> Result<Self> {
        let (lo, hi) = (filtration.lo, filtration.hi);
        for p in lo..=hi {
            for n in complex.degrees() {
                let Some(s) = filtration.levels.get(&(p, n)) else {
                    return Err(Error::Filtration(format!("missing level F^{p} K^{n}")));
                };
                if s.ambient_dim() != complex.dim(n) {
                    return Err(Error::Dimension(format!(
                        "F^{p} K^{n} lives in dimension {}, but dim K^{n} = {}",
                        s.ambient_dim(),
                        complex.dim(n)
                    )));
                }
            }
        }
        let fk = FilteredComplex {
            complex,
            filtration,
        };
        for n in fk.complex.degrees() {
            if !fk.filtration.levels[&(lo, n)].is_full() {
                return Err(Error::Filtration(format!(
                    "not exhaustive: F^{lo} K^{n} is a proper subspace"
                )));
            }
            if let Some(v) = fk.filtration.levels[&(hi, n)].basis_vectors().first() {
                return Err(Error::Filtration(format!(
                    "not bounded: F^{hi} K^{n} contains {}",
                    format_vector(v)
                )));
            }
            for p in lo..hi {
                let stored = |p: i64| &fk.filtration.levels[&(p, n)];
                if let Some(v) = stored(p + 1).first_outside(stored(p)) {
                    return Err(Error::Filtration(format!(
                        "not decreasing: {} ∈ F^{} K^{n} but not in F^{p} K^{n}",
                        format_vector(v),
                        p + 1
                    )));
                }
                let d = fk.complex.differential(n);
                let target = fk.level(p, n + 1);
                if let Some(v) = fk
                    .level(p, n)
                    .basis_vectors()
                    .iter()
                    .find(|v| !target.contains(&d.apply(v)))
                {
                    return Err(Error::Filtration(format!(
                        "d does not preserve F^{p}: d^{n}{} ∉ F^{p} K^{}",
                        format_vector(v),
                        n + 1
                    )));
                }
            }
        }
        Ok(fk)
    }

    /// Build from a closure giving `F^p K^n` for `p` in `lo..=hi`.
    pub fn from_levels(
        complex: CochainComplex,
        lo: i64,
        hi: i64,
        mut level: impl FnMut(i64, i64) -> Subspace,
    ) -> Result<Self> {
        let mut levels = BTreeMap::new();
        for p in lo..=hi {
            for n in complex.degrees() {
                levels.insert((p, n), level(p, n));
            }
        }
        FilteredComplex::new(complex, Filtration::new(lo, hi, levels)?)
    }

    /// `F^0 = K`, `F^1 = 0`.
    pub fn trivial(complex: CochainComplex) -> Self {
        FilteredComplex::from_levels(complex.clone(), 0, 1, |p, n| {
            if p <= 0 {
                Subspace::full(complex.dim(n))
            } else {
                Subspace::zero(complex.dim(n))
            }
        })
        .expect("trivial filtration is valid")
    }

    /// The stupid (bête) filtration `F^p K^n = K^n` for `n ≥ p`, else `0`.
    pub fn bete(complex: CochainComplex) -> Self {
        let (lo, hi) = (complex.lo(), complex.hi() + 1);
        FilteredComplex::from_levels(complex.clone(), lo, hi, |p, n| {
            if n >= p {
                Subspace::full(complex.dim(n))
            } else {
                Subspace::zero(complex.dim(n))
            }
        })
        .expect("bête filtration is valid")
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    pub fn filtration_range(&self) -> (i64, i64) {
        (self.filtration.lo, self.filtration.hi)
    }

    /// `F^p K^n` for any integers `p`, `n`.
    pub fn level(&self, p: i64, n: i64) -> Subspace {
        let dim = self.complex.dim(n);
        if dim == 0 || p >= self.filtration.hi {
            Subspace::zero(dim)
        } else if p <= self.filtration.lo {
            Subspace::full(dim)
        } else {
            self.filtration.levels[&(p, n)].clone()
        }
    }

    /// `Gr^p_F K`, with its spaces recorded as subquotients of the original `K^n`.
    pub fn graded_piece(&self, p: i64) -> GradedPiece {
        let cells: BTreeMap<i64, Subquotient> = self
            .complex
            .degrees()
            .map(|n| {
                let sq = Subquotient::new(self.level(p, n), self.level(p + 1, n))
                    .expect("filtration is decreasing");
                (n, sq)
            })
            .collect();
        let dims = cells.values().map(Subquotient::dim).collect();
        let d = (self.complex.lo()..self.complex.hi())
            .map(|n| {
                induced_map(&self.complex.differential(n), &cells[&n], &cells[&(n + 1)])
                    .expect("d preserves the filtration")
            })
            .collect();
        let complex =
            CochainComplex::new(self.complex.lo(), dims, d).expect("graded piece is a complex");
        GradedPiece { complex, cells }
    }

    /// Element-wise check that a vector lies in `F^p K^n`.
    pub fn in_level(&self, p: i64, n: i64, v: &[crate::Scalar]) -> bool {
        vector::is_zero(v) || self.level(p, n).contains(v)
    }
}

#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub complex: CochainComplex,
    pub cells: BTreeMap<i64, Subquotient>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;

    /// `Q --id--> Q` in degrees 0, 1.
    fn acyclic() -> CochainComplex {
        CochainComplex::new(0, vec![1, 1], vec![Matrix::identity(1)]).unwrap()
    }

    #[test]
    fn rejects_d_squared_nonzero() {
        let d0 = Matrix::from_ints(1, 1, &[1]);
        let d1 = Matrix::from_ints(1, 1, &[1]);
        let err = CochainComplex::new(0, vec![1, 1, 1], vec![d0, d1]).unwrap_err();
        assert!(matches!(err, Error::Complex(_)));
    }

    #[test]
    fn cohomology_examples() {
        let k = acyclic();
        assert_eq!(k.cohomology(0).dim(), 0);
        assert_eq!(k.cohomology(1).dim(), 0);
        assert_eq!(k.cohomology(7).dim(), 0);
        let z = CochainComplex::with_zero_differential(-1, vec![2, 0, 3]).unwrap();
        assert_eq!(z.betti(), BTreeMap::from([(-1, 2), (0, 0), (1, 3)]));
    }

    #[test]
    fn truncation_examples() {
        let k = acyclic();
        assert_eq!(k.truncate_below(1).complex, k);
        let t = k.truncate_below(0).complex;
        assert_eq!((t.dim(0), t.dim(1)), (0, 0));
        let t = k.truncate_above(1).complex;
        assert_eq!((t.dim(0), t.dim(1)), (0, 0));
        let w = k.window(1);
        assert!(w.degrees().all(|n| w.cohomology(n).dim() == 0));
    }

    #[test]
    fn window_of_zero_differential_is_two_cohomologies() {
        let k = CochainComplex::with_zero_differential(0, vec![1, 2, 3, 4]).unwrap();
        let w = k.window(2);
        let dims: Vec<usize> = w.degrees().map(|n| w.dim(n)).collect();
        assert_eq!(dims, vec![0, 2, 3, 0]);
    }

    #[test]
    fn graded_piece_examples() {
        let k = CochainComplex::new(0, vec![2, 2], vec![Matrix::from_ints(2, 2, &[1, 0, 0, 0])])
            .unwrap();
        let trivial = FilteredComplex::trivial(k.clone());
        assert_eq!(trivial.graded_piece(0).complex, k);
        assert_eq!(trivial.graded_piece(1).complex.total_dim(), 0);

        let flat = CochainComplex::with_zero_differential(0, vec![2]).unwrap();
        let line = Subspace::span(2, &[vec![int(1), int(1)]]).unwrap();
        let flag = FilteredComplex::from_levels(flat, 0, 2, |p, _| match p {
            0 => Subspace::full(2),
            1 => line.clone(),
            _ => Subspace::zero(2),
        })
        .unwrap();
        assert_eq!(flag.graded_piece(0).complex.dim(0), 1);
        assert_eq!(flag.graded_piece(1).complex.dim(0), 1);
    }

    #[test]
    fn bete_graded_pieces_are_single_terms() {
        let k = CochainComplex::new(
            0,
            vec![1, 2, 1],
            vec![Matrix::from_ints(2, 1, &[1, 1]), Matrix::from_ints(1, 2, &[1, -1])],
        )
        .unwrap();
        let fk = FilteredComplex::bete(k.clone());
        for p in 0..=2 {
            let gr = fk.graded_piece(p).complex;
            for n in k.degrees() {
                assert_eq!(gr.dim(n), if n == p { k.dim(n) } else { 0 });
            }
        }
    }

    #[test]
    fn filtration_validation_witnesses() {
        let k = acyclic();
        // F^1 K^0 = K^0 but F^1 K^1 = 0 breaks d(F^1) ⊆ F^1.
        let err = FilteredComplex::from_levels(k.clone(), 0, 2, |p, n| match (p, n) {
            (0, _) | (1, 0) => Subspace::full(1),
            _ => Subspace::zero(1),
        })
        .unwrap_err();
        assert!(err.to_string().contains("d does not preserve"), "{err}");
        let err = FilteredComplex::from_levels(k, 0, 1, |_, _| Subspace::full(1)).unwrap_err();
        assert!(err.to_string().contains("not bounded"), "{err}");
    }
}
