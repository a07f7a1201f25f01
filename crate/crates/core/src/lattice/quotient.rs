use num_traits::{One, Zero};

use super::{hnf, in_span, inverse_unimodular, GramForm, IntMatrix, LatticeError, LatticeVector};

/// A sublattice given by basis rows in ambient coordinates.
#[derive(Clone, Debug)]
pub struct Sublattice {
    pub basis: Vec<LatticeVector>,
    pub ambient: GramForm,
}

impl Sublattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn gram(&self) -> GramForm {
        self.ambient.restrict(&self.basis)
    }

    /// Coordinates of an ambient vector in the sublattice basis.
    pub fn coordinates(&self, v: &LatticeVector) -> Option<LatticeVector> {
        in_span(v, &self.basis).map(LatticeVector)
    }
}

/// `S/ℤξ` with its induced form.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub gram: GramForm,
    /// Ambient representatives of the quotient basis.
    pub representatives: Vec<LatticeVector>,
    /// Maps sublattice coordinates to quotient coordinates.
    pub projection: IntMatrix,
    pub sub: Sublattice,
    pub xi: LatticeVector,
}

impl Quotient {
    pub fn rank(&self) -> usize {
        self.representatives.len()
    }

    /// Quotient coordinates of an ambient vector of `S`.
    pub fn project(&self, v: &LatticeVector) -> Option<LatticeVector> {
        let y = self.sub.coordinates(v)?;
        Some(self.projection.mul_vector(&y))
    }

    /// Ambient representative of quotient coordinates.
    pub fn lift(&self, coords: &LatticeVector) -> LatticeVector {
        let dim = self.sub.ambient.dim();
        coords.coords().iter().zip(&self.representatives).fold(LatticeVector::zeros(dim), |acc, (c, r)| {
            if c.is_zero() {
                acc
            } else {
                &acc + &r.scale(c)
            }
        })
    }
}

pub fn quotient_by_isotropic(s: &Sublattice, xi: &LatticeVector) -> Result<Quotient, LatticeError> {
    let k = s.rank();
    let c = in_span(xi, &s.basis).ok_or(LatticeError::NotInSublattice)?;
    if s.basis.iter().any(|b| !s.ambient.pairing(xi, b).is_zero()) {
        return Err(LatticeError::NotIsotropic);
    }
    let c = LatticeVector(c);
    let content = c.content();
    if !content.is_one() {
        return Err(LatticeError::NotPrimitive { content: content.to_string() });
    }
    let column = IntMatrix::from_rows(c.coords().iter().map(|x| vec![x.clone()]));
    let (_, u) = hnf(&column);
    let w = inverse_unimodular(&u).expect("transform of hnf is unimodular");
    let basis = IntMatrix::from_vectors(&s.basis, s.ambient.dim());
    let representatives: Vec<LatticeVector> =
        (1..k).map(|j| basis.combine_rows(w.column_vector(j).coords())).collect();
    debug_assert_eq!(&basis.combine_rows(w.column_vector(0).coords()), xi);
    Ok(Quotient {
        gram: s.ambient.restrict(&representatives),
        representatives,
        projection: u.select_rows(1..k),
        sub: s.clone(),
        xi: xi.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(gram: Vec<Vec<i64>>) -> Sublattice {
        let g = GramForm::from_rows(gram).unwrap();
        let n = g.dim();
        Sublattice { basis: (0..n).map(|i| LatticeVector::unit(n, i)).collect(), ambient: g }
    }

    #[test]
    fn zero_form_quotient() {
        let s = sub(vec![vec![0, 0], vec![0, 0]]);
        let q = quotient_by_isotropic(&s, &LatticeVector::from_i64s(&[1, 0])).unwrap();
        assert_eq!(q.rank(), 1);
        assert!(q.gram.matrix().is_zero());
    }

    #[test]
    fn hyperbolic_plane_is_not_isotropic_on_itself() {
        let s = sub(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(quotient_by_isotropic(&s, &LatticeVector::from_i64s(&[1, 0])).unwrap_err(), LatticeError::NotIsotropic);
    }

    #[test]
    fn hyperbolic_isotropic_line_quotient() {
        // ξ = e lies in S = ξ⊥ = ℤe inside the hyperbolic plane.
        let g = GramForm::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let s = Sublattice { basis: vec![LatticeVector::from_i64s(&[1, 0])], ambient: g };
        let q = quotient_by_isotropic(&s, &LatticeVector::from_i64s(&[1, 0])).unwrap();
        assert_eq!(q.rank(), 0);
    }

    #[test]
    fn errors_for_bad_xi() {
        let s = sub(vec![vec![0, 0], vec![0, 0]]);
        assert!(matches!(quotient_by_isotropic(&s, &LatticeVector::from_i64s(&[2, 0])), Err(LatticeError::NotPrimitive { .. })));
        let t = Sublattice { basis: vec![LatticeVector::from_i64s(&[2, 0])], ambient: s.ambient.clone() };
        assert_eq!(quotient_by_isotropic(&t, &LatticeVector::from_i64s(&[1, 0])).unwrap_err(), LatticeError::NotInSublattice);
    }

    #[test]
    fn projection_respects_representatives() {
        let s = sub(vec![vec![-2, 2, 0], vec![2, -2, 0], vec![0, 0, -2]]);
        let xi = LatticeVector::from_i64s(&[1, 1, 0]);
        let q = quotient_by_isotropic(&s, &xi).unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(q.rank(), 2);
        for (i, r) in q.representatives.iter().enumerate() {
            assert_eq!(q.project(r).unwrap(), LatticeVector::unit(2, i));
        }
        assert!(q.project(&xi).unwrap().is_zero());
    }
}
