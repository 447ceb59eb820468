//! Built-in lattices by name.

use crate::codes::builtin_code;
use crate::error::{Error, Result};
use crate::exact::{int, rat, RationalMatrix};
use crate::lattice::QuadraticLattice;

/// Fixed registry names; `zn:<n>` is accepted in addition.
pub const BUILTIN_LATTICES: &[&str] = &["a2", "d4", "d4bar", "a2_c1", "a2_c2", "a4_c3", "a4_c4"];

/// Largest `n` accepted for `zn:<n>`.
pub const MAX_ZN_DIM: usize = 64;

pub fn builtin_lattice(name: &str) -> Result<QuadraticLattice> {
    let lattice = match name {
        "a2" => QuadraticLattice::from_gram(RationalMatrix::from_rows(vec![
            vec![int(1), rat(1, 2)],
            vec![rat(1, 2), int(1)],
        ])?)?,
        "d4" => d4()?,
        "d4bar" => d4()?.scale(&rat(1, 2))?,
        "a2_c1" => builtin_code("c1")?.construction_a()?,
        "a2_c2" => builtin_code("c2")?.construction_a()?,
        "a4_c3" => builtin_code("c3")?.construction_a()?,
        "a4_c4" => builtin_code("c4")?.construction_a()?,
        other => {
            let n = other
                .strip_prefix("zn:")
                .ok_or_else(|| unknown(other))?
                .parse::<usize>()
                .map_err(|_| unknown(other))?;
            if n == 0 || n > MAX_ZN_DIM {
                return Err(Error::Domain(format!("zn:<n> needs 1 <= n <= {MAX_ZN_DIM}")));
            }
            return QuadraticLattice::integer_lattice(n);
        }
    };
    Ok(lattice.with_label(name))
}

fn unknown(name: &str) -> Error {
    Error::Parse(format!(
        "unknown lattice '{name}'; expected zn:<n> or one of {}",
        BUILTIN_LATTICES.join(", ")
    ))
}

fn d4() -> Result<QuadraticLattice> {
    QuadraticLattice::from_rational_basis(&RationalMatrix::from_int_rows(&[
        vec![2, 0, 0, 0],
        vec![1, 1, 0, 0],
        vec![1, 0, 1, 0],
        vec![1, 0, 0, 1],
    ])?)
}
