//! Column rank over a prime field GF(p).

/// Dense matrix over GF(p), stored column-major so column subsets are cheap to gather.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnMatrix {
    p: u64,
    rows: usize,
    columns: Vec<Vec<u64>>,
}

impl ColumnMatrix {
    /// Builds from row-major entries; the caller guarantees entries are already reduced mod p.
    pub fn from_rows(p: u32, rows: &[Vec<u32>], m: usize) -> Self {
        let columns = (0..m)
            .map(|j| rows.iter().map(|r| r[j] as u64).collect())
            .collect();
        Self {
            p: p as u64,
            rows: rows.len(),
            columns,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Rank of the chosen columns, by Gaussian elimination.
    pub fn rank_of_columns(&self, cols: impl Iterator<Item = usize>) -> usize {
        let mut mat: Vec<Vec<u64>> = cols.map(|j| self.columns[j].clone()).collect();
        eliminate(&mut mat, self.rows, self.p)
    }

    /// Whether the chosen columns are linearly independent.
    pub fn independent_columns(&self, cols: impl Iterator<Item = usize>) -> bool {
        let mat: Vec<Vec<u64>> = cols.map(|j| self.columns[j].clone()).collect();
        if mat.len() > self.rows {
            return false;
        }
        let count = mat.len();
        let mut mat = mat;
        eliminate(&mut mat, self.rows, self.p) == count
    }
}

/// Row-reduces a list of vectors (each of length `rows`) and returns its rank.
fn eliminate(vectors: &mut [Vec<u64>], rows: usize, p: u64) -> usize {
    let mut rank = 0;
    for r in 0..rows {
        let Some(pivot) = (rank..vectors.len()).find(|&i| vectors[i][r] != 0) else {
            continue;
        };
        vectors.swap(rank, pivot);
        let inv = inverse(vectors[rank][r], p);
        for v in vectors[rank].iter_mut() {
            *v = *v * inv % p;
        }
        let (head, tail) = vectors.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for v in tail.iter_mut() {
            let factor = v[r];
            if factor == 0 {
                continue;
            }
            for (a, &b) in v.iter_mut().zip(pivot_row.iter()) {
                *a = (*a + p - factor * b % p) % p;
            }
        }
        rank += 1;
        if rank == vectors.len() {
            break;
        }
    }
    rank
}

fn inverse(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_over_gf2_and_gf3() {
        // columns: e1, e1, e2 over GF(2)
        let m = ColumnMatrix::from_rows(2, &[vec![1, 1, 0], vec![0, 0, 1]], 3);
        assert_eq!(m.rank_of_columns([0, 1, 2].into_iter()), 2);
        assert!(!m.independent_columns([0, 1].into_iter()));
        assert!(m.independent_columns([1, 2].into_iter()));

        // (1,1) and (1,2) are independent over GF(3) but (1,1),(2,2) are not
        let m = ColumnMatrix::from_rows(3, &[vec![1, 1, 2], vec![1, 2, 2]], 3);
        assert!(m.independent_columns([0, 1].into_iter()));
        assert!(!m.independent_columns([0, 2].into_iter()));
    }

    #[test]
    fn primes() {
        let primes: Vec<u32> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
