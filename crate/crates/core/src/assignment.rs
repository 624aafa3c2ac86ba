//! Minimum-cost perfect assignment on a square integer matrix
//! (Hungarian method with row/column potentials, O(n^3)).

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub total: i64,
    /// `column_of_row[i]` is the column assigned to row `i`.
    pub column_of_row: Vec<usize>,
}

pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Assignment {
    let n = cost.len();
    assert!(
        cost.iter().all(|row| row.len() == n),
        "cost matrix must be square"
    );
    if n == 0 {
        return Assignment {
            total: 0,
            column_of_row: Vec::new(),
        };
    }

    // 1-based arrays; index 0 is the virtual column used while growing a row.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut min_to = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if reduced < min_to[j] {
                    min_to[j] = reduced;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut column_of_row = vec![0; n];
    for j in 1..=n {
        column_of_row[row_of_col[j] - 1] = j - 1;
    }
    let total = column_of_row
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    Assignment {
        total,
        column_of_row,
    }
}
