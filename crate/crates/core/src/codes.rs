//! Linear codes over `Z_q`, their weight data and Construction A lattices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, rat, RationalMatrix};
use crate::lattice::QuadraticLattice;

/// A `Z_q` linear code given by generator rows; the code is their additive span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    q: u32,
    n: usize,
    generator: Vec<Vec<u32>>,
    label: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightHierarchy {
    pub values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub q: u32,
    pub n: usize,
    pub generator: Vec<Vec<u32>>,
}

impl LinearCode {
    pub fn new(q: u32, n: usize, generator: Vec<Vec<u32>>) -> Result<Self> {
        if q < 2 {
            return Err(Error::Domain(format!("modulus must be at least 2, got {q}")));
        }
        if n == 0 {
            return Err(Error::Domain("code length must be at least 1".into()));
        }
        for row in &generator {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "generator row of length {} for a length-{n} code",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= q) {
                return Err(Error::Domain(format!("entry {bad} is not in [0, {}]", q - 1)));
            }
        }
        Ok(Self {
            q,
            n,
            generator,
            label: None,
        })
    }

    /// The zero code `{0}` of length `n`.
    pub fn zero(q: u32, n: usize) -> Result<Self> {
        Self::new(q, n, Vec::new())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn generator(&self) -> &[Vec<u32>] {
        &self.generator
    }

    fn require_binary(&self, what: &str) -> Result<()> {
        if self.q != 2 {
            return Err(Error::Unsupported(format!(
                "{what} is only implemented for binary codes (q = 2), got q = {}",
                self.q
            )));
        }
        if self.n > 64 {
            return Err(Error::Unsupported("binary codes longer than 64".into()));
        }
        Ok(())
    }

    /// Row-reduced GF(2) basis as bitmasks (bit `i` = coordinate `i`).
    fn binary_basis(&self) -> Vec<u64> {
        let mut basis: Vec<u64> = Vec::new();
        for row in &self.generator {
            let mut v = row
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &x)| acc | ((x as u64 & 1) << i));
            for &b in &basis {
                let pivot = 63 - b.leading_zeros();
                if v >> pivot & 1 == 1 {
                    v ^= b;
                }
            }
            if v != 0 {
                // Keep the basis fully reduced on pivot columns.
                let pivot = 63 - v.leading_zeros();
                for b in basis.iter_mut() {
                    if *b >> pivot & 1 == 1 {
                        *b ^= v;
                    }
                }
                basis.push(v);
            }
        }
        basis
    }

    /// Dimension over GF(2) (binary codes only).
    pub fn dimension(&self) -> Result<usize> {
        self.require_binary("dimension")?;
        Ok(self.binary_basis().len())
    }

    fn binary_codewords(&self) -> Result<Vec<u64>> {
        self.require_binary("codeword enumeration")?;
        let basis = self.binary_basis();
        if basis.len() > 24 {
            return Err(Error::capacity("binary code dimension for full enumeration", 24));
        }
        Ok((0u64..1 << basis.len())
            .map(|msg| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| msg >> i & 1 == 1)
                    .fold(0u64, |acc, (_, b)| acc ^ b)
            })
            .collect())
    }

    /// Weight distribution `A_0..A_n` of a binary code.
    pub fn weight_enumerator(&self) -> Result<Vec<u64>> {
        let mut counts = vec![0u64; self.n + 1];
        for c in self.binary_codewords()? {
            counts[c.count_ones() as usize] += 1;
        }
        Ok(counts)
    }

    /// `d_r`: smallest support of an `r`-dimensional subcode (binary codes).
    pub fn generalized_hamming_weight(&self, r: usize) -> Result<usize> {
        let words: Vec<u64> = self.binary_codewords()?.into_iter().filter(|&c| c != 0).collect();
        let k = self.binary_basis().len();
        if r == 0 || r > k {
            return Err(Error::Domain(format!("r = {r} is outside [1, {k}]")));
        }
        let mut best = self.n + 1;
        let mut span = vec![0u64];
        min_support(&words, 0, r, 0, &mut span, &mut best);
        Ok(best)
    }

    pub fn weight_hierarchy(&self) -> Result<WeightHierarchy> {
        let k = self.dimension()?;
        Ok(WeightHierarchy {
            values: (1..=k)
                .map(|r| self.generalized_hamming_weight(r))
                .collect::<Result<_>>()?,
        })
    }

    /// `(1/sqrt(q)) (phi_q(C) + q Z^n)` as a Gram matrix `M M^T / q`, where `M`
    /// is the Hermite basis of the integer lattice `phi_q(C) + q Z^n`.
    pub fn construction_a(&self) -> Result<QuadraticLattice> {
        let q = self.q as i64;
        let mut stacked: Vec<Vec<i64>> = self
            .generator
            .iter()
            .map(|row| row.iter().map(|&x| x as i64).collect())
            .collect();
        stacked.extend((0..self.n).map(|i| {
            let mut e = vec![0i64; self.n];
            e[i] = q;
            e
        }));
        let basis = exact::hermite_rows(&stacked)?;
        debug_assert_eq!(basis.len(), self.n);
        let m = RationalMatrix::from_int_rows(&basis)?;
        let gram = m.mul(&m.transpose())?.scaled(&rat(1, q));
        let lattice = QuadraticLattice::from_gram(gram)?;
        Ok(match &self.label {
            Some(l) => lattice.with_label(format!("A{}({l})", self.q)),
            None => lattice,
        })
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            label: self.label.clone(),
            q: self.q,
            n: self.n,
            generator: self.generator.clone(),
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self> {
        let code = Self::new(file.q, file.n, file.generator.clone())?;
        Ok(match &file.label {
            Some(l) => code.with_label(l.clone()),
            None => code,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("code JSON: {e}")))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("code serialises")
    }
}

/// Depth-first search over independent codeword choices, pruned on support size.
fn min_support(words: &[u64], start: usize, remaining: usize, support: u64, span: &mut Vec<u64>, best: &mut usize) {
    if remaining == 0 {
        *best = (*best).min(support.count_ones() as usize);
        return;
    }
    for (i, &w) in words.iter().enumerate().skip(start) {
        if span.contains(&w) {
            continue;
        }
        let union = support | w;
        if union.count_ones() as usize >= *best {
            continue;
        }
        let before = span.len();
        for j in 0..before {
            let x = span[j] ^ w;
            span.push(x);
        }
        min_support(words, i + 1, remaining - 1, union, span, best);
        span.truncate(before);
    }
}

/// Pretty `x^6 + 3x^4y^2 + ...` form of a weight distribution.
pub fn format_weight_enumerator(counts: &[u64]) -> String {
    let n = counts.len().saturating_sub(1);
    let mono = |var: &str, e: usize| match e {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{e}"),
    };
    let parts: Vec<String> = counts
        .iter()
        .enumerate()
        .filter(|(_, &a)| a > 0)
        .map(|(w, &a)| {
            let body = format!("{}{}", mono("x", n - w), mono("y", w));
            match (a, body.is_empty()) {
                (1, true) => "1".into(),
                (1, false) => body,
                _ => format!("{a}{body}"),
            }
        })
        .collect();
    parts.join(" + ")
}

fn systematic(b: [[u32; 3]; 3]) -> Vec<Vec<u32>> {
    (0..3)
        .map(|i| {
            let mut row = vec![0u32; 6];
            row[i] = 1;
            row[3..].copy_from_slice(&b[i]);
            row
        })
        .collect()
}

/// Built-in codes: `c1`, `c2` (binary [6,3]) and `c3`, `c4` (over `Z_4`).
pub fn builtin_code(name: &str) -> Result<LinearCode> {
    let code = match name {
        "c1" => LinearCode::new(2, 6, systematic([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))?,
        "c2" => LinearCode::new(2, 6, systematic([[0, 1, 0], [1, 1, 1], [0, 1, 0]]))?,
        "c3" => LinearCode::new(4, 6, systematic([[1, 2, 2], [2, 0, 2], [2, 2, 0]]))?,
        "c4" => LinearCode::new(4, 6, systematic([[0, 1, 1], [1, 0, 2], [1, 2, 0]]))?,
        other => return Err(Error::Parse(format!("unknown built-in code {other:?}"))),
    };
    Ok(code.with_label(name))
}

pub const BUILTIN_CODES: [&str; 4] = ["c1", "c2", "c3", "c4"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use num_traits::Zero;

    #[test]
    fn enumerators_are_equal() {
        let c1 = builtin_code("c1").unwrap();
        let c2 = builtin_code("c2").unwrap();
        assert_eq!(c1.weight_enumerator().unwrap(), vec![1, 0, 3, 0, 3, 0, 1]);
        assert_eq!(c2.weight_enumerator().unwrap(), vec![1, 0, 3, 0, 3, 0, 1]);
        assert_eq!(
            format_weight_enumerator(&c1.weight_enumerator().unwrap()),
            "x^6 + 3x^4y^2 + 3x^2y^4 + y^6"
        );
    }

    #[test]
    fn zero_code() {
        let z = LinearCode::zero(2, 5).unwrap();
        assert_eq!(z.weight_enumerator().unwrap(), vec![1, 0, 0, 0, 0, 0]);
        assert!(z.generalized_hamming_weight(1).is_err());
        let lattice = LinearCode::zero(3, 4).unwrap().construction_a().unwrap();
        assert_eq!(lattice.gram(), &RationalMatrix::identity(4).scaled(&int(3)));
    }

    #[test]
    fn hierarchies() {
        let c1 = builtin_code("c1").unwrap();
        let c2 = builtin_code("c2").unwrap();
        assert_eq!(c1.weight_hierarchy().unwrap().values, vec![2, 4, 6]);
        assert_eq!(c2.weight_hierarchy().unwrap().values, vec![2, 3, 6]);
        assert_eq!(c1.generalized_hamming_weight(2).unwrap(), 4);
        assert_eq!(c2.generalized_hamming_weight(2).unwrap(), 3);
    }

    #[test]
    fn full_code_hierarchy() {
        let n = 5;
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as u32).collect())
            .collect();
        let full = LinearCode::new(2, n, rows).unwrap();
        assert_eq!(full.weight_hierarchy().unwrap().values, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn first_weight_is_minimum_distance() {
        for name in ["c1", "c2"] {
            let c = builtin_code(name).unwrap();
            let wd = c.weight_enumerator().unwrap();
            let dmin = (1..wd.len()).find(|&w| wd[w] > 0).unwrap();
            assert_eq!(c.generalized_hamming_weight(1).unwrap(), dmin);
        }
    }

    #[test]
    fn non_binary_is_unsupported() {
        let c3 = builtin_code("c3").unwrap();
        assert!(matches!(c3.weight_enumerator(), Err(Error::Unsupported(_))));
        assert!(matches!(c3.weight_hierarchy(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn validation() {
        assert!(LinearCode::new(1, 3, vec![]).is_err());
        assert!(LinearCode::new(2, 3, vec![vec![0, 2, 1]]).is_err());
        assert!(LinearCode::new(2, 3, vec![vec![0, 1]]).is_err());
        assert!(builtin_code("c9").is_err());
    }

    #[test]
    fn construction_a_volumes() {
        for name in BUILTIN_CODES {
            let lattice = builtin_code(name).unwrap().construction_a().unwrap();
            assert_eq!(lattice.volume_sq(), int(1), "{name}");
            let q = builtin_code(name).unwrap().q() as i64;
            for x in lattice.gram().entries() {
                assert!((num_bigint::BigInt::from(q) % x.denom()).is_zero());
            }
        }
    }

    #[test]
    fn code_json() {
        let c3 = builtin_code("c3").unwrap();
        let text = c3.to_json();
        assert_eq!(LinearCode::from_json(&text).unwrap(), c3);
        let raw = r#"{"q": 4, "n": 6, "generator": [[1,0,0,1,2,2],[0,1,0,2,0,2],[0,0,1,2,2,0]]}"#;
        let parsed = LinearCode::from_json(raw).unwrap();
        assert_eq!(parsed.generator(), c3.generator());
    }
}
