/// Row-to-column assignment maximizing the total weight of a square matrix.
///
/// Shortest augmenting paths with vertex potentials, `O(m³)`. Integer
/// weights keep the optimum exact.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> Vec<usize> {
    let m = weights.len();
    if m == 0 {
        return Vec::new();
    }
    assert!(weights.iter().all(|r| r.len() == m), "weight matrix must be square");
    let max = weights.iter().flatten().copied().max().unwrap_or(0);
    // Minimize `max − w`; 1-based with column 0 as the virtual root.
    let cost = |i: usize, j: usize| max - weights[i - 1][j - 1];
    let mut u = vec![0i64; m + 1];
    let mut v = vec![0i64; m + 1];
    let mut row_of = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
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
    let mut col_of_row = vec![0; m];
    for j in 1..=m {
        col_of_row[row_of[j] - 1] = j - 1;
    }
    col_of_row
}
