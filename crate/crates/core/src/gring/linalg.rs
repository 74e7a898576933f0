use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{Coeff, CoefficientMode};

/// Rank of an integer matrix, over `Q` in integer mode and over `F_2` in mod-2
/// mode. Fraction-free elimination; rows are consumed.
pub fn rank(mut rows: Vec<Vec<Coeff>>, mode: CoefficientMode) -> usize {
    if mode == CoefficientMode::Mod2 {
        let two = BigInt::from(2);
        for row in rows.iter_mut() {
            for c in row.iter_mut() {
                *c = c.mod_floor(&two);
            }
        }
    }
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for c in col..width {
                let v = &row[c] * &pivot_row[col] - &factor * &pivot_row[c];
                row[c] = match mode {
                    CoefficientMode::Mod2 => v.mod_floor(&BigInt::from(2)),
                    CoefficientMode::IntegerModTorsion => v,
                };
            }
            if mode == CoefficientMode::IntegerModTorsion {
                let g = row.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
                if !g.is_zero() {
                    for v in row.iter_mut() {
                        *v /= &g;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}
