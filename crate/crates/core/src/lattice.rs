//! Lattices represented by an exact rational Gram matrix.
//!
//! A lattice vector is addressed by its integer coefficient vector `u`; its
//! squared length is `u G u^T`. Only the Gram matrix is stored, so lattices
//! with irrational bases but rational Gram matrices (A2, Construction A with
//! a `1/sqrt(q)` factor) are represented exactly.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, format_rational, parse_rational, Rational, RationalMatrix};

#[derive(Clone, Debug)]
pub struct QuadraticLattice {
    label: Option<String>,
    gram: RationalMatrix,
    /// `gram * scale`, all integral.
    int_gram: Vec<i64>,
    scale: i64,
}

impl PartialEq for QuadraticLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl QuadraticLattice {
    /// Validates symmetry and positive definiteness (exact leading minors).
    pub fn from_gram(gram: RationalMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::Dimension(format!(
                "Gram matrix must be square, got {}x{}",
                gram.rows(),
                gram.cols()
            )));
        }
        if gram.rows() == 0 {
            return Err(Error::Dimension("lattice dimension must be at least 1".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::Domain("Gram matrix is not symmetric".into()));
        }
        if let Some(k) = gram.leading_minors()?.iter().position(|m| !m.is_positive()) {
            return Err(Error::Domain(format!(
                "Gram matrix is not positive definite (leading minor {} is not positive)",
                k + 1
            )));
        }
        let scale_big = gram.denominator_lcm();
        let scale = scale_big
            .to_i64()
            .ok_or_else(|| Error::Domain("Gram denominators are too large".into()))?;
        let int_gram = gram
            .entries()
            .iter()
            .map(|x| {
                (x.numer() * (&scale_big / x.denom()))
                    .to_i64()
                    .ok_or_else(|| Error::Domain("Gram entries are too large".into()))
            })
            .collect::<Result<Vec<i64>>>()?;
        Ok(Self {
            label: None,
            gram,
            int_gram,
            scale,
        })
    }

    /// Lattice generated by the rows of a square nonsingular basis `B`; Gram `B B^T`.
    pub fn from_rational_basis(basis: &RationalMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Dimension("basis must be square".into()));
        }
        if basis.det()?.is_zero() {
            return Err(Error::Rank("basis matrix is singular".into()));
        }
        Self::from_gram(basis.mul(&basis.transpose())?)
    }

    pub fn integer_lattice(n: usize) -> Result<Self> {
        Ok(Self::from_gram(RationalMatrix::identity(n))?.with_label(format!("zn:{n}")))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &RationalMatrix {
        &self.gram
    }

    /// Common denominator `D` such that `D * G` is integral.
    pub fn gram_scale(&self) -> i64 {
        self.scale
    }

    pub(crate) fn int_gram(&self) -> &[i64] {
        &self.int_gram
    }

    pub fn gram_f64(&self) -> Vec<f64> {
        self.gram.entries().iter().map(exact::to_f64).collect()
    }

    /// Dual lattice: Gram `G^{-1}`.
    pub fn dual(&self) -> Self {
        let inv = self
            .gram
            .inverse()
            .expect("square")
            .expect("positive definite Gram matrix is invertible");
        let mut dual = Self::from_gram(inv).expect("inverse of a positive definite matrix");
        dual.label = self.label.as_ref().map(|l| format!("dual({l})"));
        dual
    }

    /// `vol(L)^2 = det(G)`.
    pub fn volume_sq(&self) -> Rational {
        self.gram.det().expect("square")
    }

    /// Gram `c G`, i.e. the lattice scaled by `sqrt(c)` (up to rotation).
    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {}",
                format_rational(c)
            )));
        }
        let mut out = Self::from_gram(self.gram.scaled(c))?;
        out.label = self.label.clone();
        Ok(out)
    }

    /// `u G v^T` scaled by [`gram_scale`](Self::gram_scale); exact.
    pub(crate) fn inner_int(&self, u: &[i64], v: &[i64]) -> i128 {
        let n = self.dim();
        let mut total: i128 = 0;
        for i in 0..n {
            if u[i] == 0 {
                continue;
            }
            let row = &self.int_gram[i * n..(i + 1) * n];
            let gv: i128 = row.iter().zip(v).map(|(&g, &x)| g as i128 * x as i128).sum();
            total += u[i] as i128 * gv;
        }
        total
    }

    pub(crate) fn scaled_to_rational(&self, value: i128) -> Rational {
        Rational::new(BigInt::from(value), BigInt::from(self.scale))
    }

    pub fn norm_sq(&self, u: &[i64]) -> Rational {
        self.scaled_to_rational(self.inner_int(u, u))
    }

    pub fn inner(&self, u: &[i64], v: &[i64]) -> Rational {
        self.scaled_to_rational(self.inner_int(u, v))
    }

    /// `det(U G U^T)` for coefficient rows `U`; zero when the rows are dependent.
    pub fn subset_gram_det(&self, u: &[Vec<i64>]) -> Result<Rational> {
        let n = self.dim();
        if let Some(row) = u.iter().find(|row| row.len() != n) {
            return Err(Error::Dimension(format!(
                "coefficient row of length {} in a rank-{n} lattice",
                row.len()
            )));
        }
        let r = u.len();
        let mut m = vec![0i128; r * r];
        for i in 0..r {
            for j in i..r {
                let v = self.inner_int(&u[i], &u[j]);
                m[i * r + j] = v;
                m[j * r + i] = v;
            }
        }
        let det = exact::det_small(&m, r);
        let denom = num_traits::pow(BigInt::from(self.scale), r);
        Ok(Rational::new(det, denom))
    }

    pub fn is_integral(&self) -> bool {
        self.gram.entries().iter().all(|x| x.denom().is_one())
    }

    pub fn to_file(&self) -> LatticeFile {
        LatticeFile {
            label: self.label.clone(),
            dim: self.dim(),
            gram: self
                .gram
                .to_rows()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &LatticeFile) -> Result<Self> {
        if file.gram.len() != file.dim {
            return Err(Error::Parse(format!(
                "dim is {} but the Gram matrix has {} rows",
                file.dim,
                file.gram.len()
            )));
        }
        let rows = file
            .gram
            .iter()
            .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let lattice = Self::from_gram(RationalMatrix::from_rows(rows)?)?;
        Ok(match &file.label {
            Some(l) => lattice.with_label(l.clone()),
            None => lattice,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("lattice serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: LatticeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("lattice JSON: {e}")))?;
        Self::from_file(&file)
    }
}

/// On-disk lattice description; Gram entries are `p/q` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dim: usize,
    pub gram: Vec<Vec<String>>,
}

/// A lattice vector given by integer coefficients, with its exact squared length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    pub coeffs: Vec<i64>,
    pub norm_sq: Rational,
}

impl LatticeVector {
    pub fn new(lattice: &QuadraticLattice, coeffs: Vec<i64>) -> Self {
        let norm_sq = lattice.norm_sq(&coeffs);
        Self { coeffs, norm_sq }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn a2() -> QuadraticLattice {
        QuadraticLattice::from_gram(
            RationalMatrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), int(1)]]).unwrap(),
        )
        .unwrap()
    }

    fn d4_basis() -> RationalMatrix {
        RationalMatrix::from_int_rows(&[
            vec![2, 0, 0, 0],
            vec![1, 1, 0, 0],
            vec![1, 0, 1, 0],
            vec![1, 0, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn basis_to_gram() {
        let z3 = QuadraticLattice::from_rational_basis(&RationalMatrix::identity(3)).unwrap();
        assert_eq!(z3.gram(), &RationalMatrix::identity(3));
        let d4 = QuadraticLattice::from_rational_basis(&d4_basis()).unwrap();
        let diag: Vec<Rational> = (0..4).map(|i| d4.gram().get(i, i).clone()).collect();
        assert_eq!(diag, vec![int(4), int(2), int(2), int(2)]);
        let half = QuadraticLattice::from_rational_basis(&d4_basis().scaled(&rat(1, 2))).unwrap();
        assert_eq!(half.gram(), &d4.gram().scaled(&rat(1, 4)));
    }

    #[test]
    fn singular_basis_is_rejected() {
        let b = RationalMatrix::from_int_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert!(matches!(QuadraticLattice::from_rational_basis(&b), Err(Error::Rank(_))));
    }

    #[test]
    fn non_positive_definite_is_rejected() {
        let g = RationalMatrix::from_int_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        assert!(matches!(QuadraticLattice::from_gram(g), Err(Error::Domain(_))));
        let asym = RationalMatrix::from_int_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        assert!(QuadraticLattice::from_gram(asym).is_err());
    }

    #[test]
    fn dual_examples() {
        let z4 = QuadraticLattice::integer_lattice(4).unwrap();
        assert_eq!(z4.dual(), z4);
        let inv = RationalMatrix::from_rows(vec![
            vec![rat(4, 3), rat(-2, 3)],
            vec![rat(-2, 3), rat(4, 3)],
        ])
        .unwrap();
        assert_eq!(a2().dual().gram(), &inv);
        let d4 = QuadraticLattice::from_rational_basis(&d4_basis()).unwrap();
        assert_eq!(d4.dual().dual(), d4);
    }

    #[test]
    fn volumes() {
        assert_eq!(QuadraticLattice::integer_lattice(5).unwrap().volume_sq(), int(1));
        let d4 = QuadraticLattice::from_rational_basis(&d4_basis()).unwrap();
        assert_eq!(d4.volume_sq(), int(4));
        assert_eq!(a2().volume_sq(), rat(3, 4));
        assert_eq!(d4.dual().volume_sq(), rat(1, 4));
    }

    #[test]
    fn scaling() {
        let d4 = QuadraticLattice::from_rational_basis(&d4_basis()).unwrap();
        assert_eq!(d4.scale(&int(1)).unwrap(), d4);
        let c = rat(2, 3);
        assert_eq!(d4.scale(&c).unwrap().volume_sq(), d4.volume_sq() * num_traits::pow(c, 4));
        assert!(matches!(d4.scale(&int(0)), Err(Error::Domain(_))));
        assert!(matches!(d4.scale(&rat(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn subset_determinants() {
        let a2 = a2();
        assert_eq!(a2.subset_gram_det(&[vec![1, 0]]).unwrap(), int(1));
        assert_eq!(a2.subset_gram_det(&[vec![1, 0], vec![0, 1]]).unwrap(), rat(3, 4));
        let z2 = QuadraticLattice::integer_lattice(2).unwrap();
        assert_eq!(z2.subset_gram_det(&[vec![1, 0], vec![1, 1]]).unwrap(), int(1));
        assert_eq!(z2.subset_gram_det(&[vec![1, 0], vec![-2, 0]]).unwrap(), int(0));
        assert!(z2.subset_gram_det(&[vec![1, 0, 0]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = a2().with_label("a2");
        let text = l.to_json();
        assert!(text.contains("\"1/2\""));
        let back = QuadraticLattice::from_json(&text).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.label(), Some("a2"));
        assert!(QuadraticLattice::from_json(r#"{"dim":2,"gram":[["1"]]}"#).is_err());
    }
}
