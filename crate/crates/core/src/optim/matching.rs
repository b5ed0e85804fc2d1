use crate::error::{Error, Result};

/// Minimum-weight perfect matching of a complete bipartite graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    /// `permutation[i]` is the column matched to row `i`.
    pub permutation: Vec<usize>,
    pub cost: i64,
}

/// Hungarian method with row and column potentials, `O(n^3)`.
pub fn min_weight_perfect_matching(costs: &[Vec<i64>]) -> Result<Matching> {
    let n = costs.len();
    if costs.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("cost matrix must be square"));
    }
    if n == 0 {
        return Ok(Matching { permutation: Vec::new(), cost: 0 });
    }
    const INF: i64 = i64::MAX / 4;
    // 1-based arrays; column 0 is a virtual column holding the row being inserted.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut permutation = vec![0usize; n];
    for j in 1..=n {
        permutation[row_of[j] - 1] = j - 1;
    }
    let cost = permutation.iter().enumerate().map(|(i, &j)| costs[i][j]).sum();
    Ok(Matching { permutation, cost })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_costs() {
        let c = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        let m = min_weight_perfect_matching(&c).unwrap();
        assert_eq!(m.permutation, vec![0, 1, 2]);
        assert_eq!(m.cost, 0);
    }

    #[test]
    fn single_pair() {
        let m = min_weight_perfect_matching(&[vec![7]]).unwrap();
        assert_eq!(m, Matching { permutation: vec![0], cost: 7 });
    }

    #[test]
    fn anti_diagonal() {
        let m = min_weight_perfect_matching(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(m.permutation, vec![1, 0]);
        assert_eq!(m.cost, 2);
    }

    #[test]
    fn rejects_non_square() {
        assert!(min_weight_perfect_matching(&[vec![1, 2]]).is_err());
    }

    #[test]
    fn empty_matrix() {
        assert_eq!(min_weight_perfect_matching(&[]).unwrap().cost, 0);
    }
}
