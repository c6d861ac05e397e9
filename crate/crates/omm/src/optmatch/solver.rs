//! Exact assignment solvers behind [`opt_offline`](super::opt_offline).
//!
//! All three routes compute a true minimum-cost matching of every request
//! to a distinct server (`n ≤ m`):
//!
//! - [`solve_dense`]: successive shortest paths with potentials over the
//!   full cost matrix, O(n·m²). The reference route.
//! - [`solve_line`]: monotone matching by dynamic programming over sorted
//!   positions, valid for costs `|x−y|^p` on the line (`p ≥ 1`, convex),
//!   O(n·(m−n+1)).
//! - [`solve_sparse`]: successive shortest paths restricted to per-request
//!   nearest-server candidate edges, then a dual-feasibility check over
//!   the full matrix; violated edges are added and the solve repeats, so
//!   the returned matching is certified optimal. Fast on large geometric
//!   instances where optimal partners are near.

/// Reduced costs below this count as dual violations during sparse
/// verification. Summed over an instance this stays far below the 1e-9
/// equality tolerance used by the tests.
const DUAL_TOL: f64 = 1e-12;

/// Successive shortest paths with potentials on a dense cost matrix
/// (`cost[i*m + j]`, row i = request, column j = server). Columns beyond
/// the matched ones act as zero-cost slack, so `n < m` needs no padding.
pub fn solve_dense(n: usize, m: usize, cost: &[f64]) -> Vec<usize> {
    assert!(n <= m, "requests must not outnumber servers");
    assert_eq!(cost.len(), n * m);
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    // p[j] = 1-based row matched to column j (0 = free); p[0] is scratch.
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![inf; m + 1];
    let mut used = vec![false; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = inf);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let ui0 = u[i0];
            let row = &cost[(i0 - 1) * m..i0 * m];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if !used[j] {
                    let cur = row[j - 1] - ui0 - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            debug_assert!(delta < inf, "augmenting path must exist");
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        // Flip the alternating path.
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    debug_assert!(assign.iter().all(|&j| j != usize::MAX));
    assign
}

/// Monotone matching on the line. `cost(r, s) = |r − s|^p` with `p ≥ 1`
/// is convex in the displacement, so some optimal matching is
/// non-crossing in sorted order; the DP scans requests in sorted order
/// and decides for each whether to take or skip the next sorted server.
pub fn solve_line(requests: &[f64], servers: &[f64], power: f64) -> Vec<usize> {
    let n = requests.len();
    let m = servers.len();
    assert!(n <= m);
    if n == 0 {
        return Vec::new();
    }
    let mut ri: Vec<u32> = (0..n as u32).collect();
    ri.sort_by(|&a, &b| requests[a as usize].total_cmp(&requests[b as usize]));
    let mut si: Vec<u32> = (0..m as u32).collect();
    si.sort_by(|&a, &b| servers[a as usize].total_cmp(&servers[b as usize]));

    let pair_cost = |i: usize, j: usize| -> f64 {
        let d = (requests[ri[i] as usize] - servers[si[j] as usize]).abs();
        if power == 1.0 {
            d
        } else {
            d.powf(power)
        }
    };

    let width = m - n + 1; // skippable servers + 1
    // Rolling DP: best cost for sorted requests i.. with k servers skipped.
    let mut next = vec![0.0f64; width];
    let mut cur = vec![0.0f64; width];
    let mut take = vec![false; n * width];
    for i in (0..n).rev() {
        for k in (0..width).rev() {
            let matched = pair_cost(i, i + k) + next[k];
            let skipped = if k + 1 < width { cur[k + 1] } else { f64::INFINITY };
            if matched <= skipped {
                cur[k] = matched;
                take[i * width + k] = true;
            } else {
                cur[k] = skipped;
                take[i * width + k] = false;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut assign = vec![usize::MAX; n];
    let mut k = 0usize;
    for i in 0..n {
        while !take[i * width + k] {
            k += 1;
        }
        assign[ri[i] as usize] = si[i + k] as usize;
    }
    assign
}

/// Successive shortest paths over nearest-server candidate edges with
/// certification against the full cost matrix. Starts from `k0`
/// candidates per request; rounds add dual-infeasible edges (and widen
/// the neighborhood if no augmenting path exists) until the optimum is
/// certified, so the result always equals [`solve_dense`]'s cost.
pub fn solve_sparse(n: usize, m: usize, cost: &[f64], k0: usize) -> Vec<usize> {
    assert!(n <= m);
    assert_eq!(cost.len(), n * m);
    let mut k = k0.clamp(1, m);
    let mut extra: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut scratch: Vec<(u32, f64)> = vec![(0, 0.0); m];
    loop {
        let mut cand: Vec<Vec<(u32, f64)>> = Vec::with_capacity(n);
        for i in 0..n {
            let row = &cost[i * m..(i + 1) * m];
            for (j, slot) in scratch.iter_mut().enumerate() {
                *slot = (j as u32, row[j]);
            }
            if k < m {
                scratch.select_nth_unstable_by(k - 1, |a, b| a.1.total_cmp(&b.1));
            }
            let mut list = scratch[..k].to_vec();
            list.extend(extra[i].iter().map(|&j| (j, row[j as usize])));
            cand.push(list);
        }
        match sparse_ssp(n, m, &cand) {
            None => {
                // Candidate graph too thin to cover every request.
                debug_assert!(k < m);
                k = (k * 2).min(m);
            }
            Some((assign, u, v)) => {
                let mut violated = false;
                for i in 0..n {
                    let row = &cost[i * m..(i + 1) * m];
                    for j in 0..m {
                        if row[j] - u[i] - v[j] < -DUAL_TOL {
                            extra[i].push(j as u32);
                            violated = true;
                        }
                    }
                }
                if !violated {
                    return assign;
                }
            }
        }
    }
}

/// One sparse SSP pass. Returns `None` if some request cannot reach a
/// free server through the candidate graph.
fn sparse_ssp(
    n: usize,
    m: usize,
    cand: &[Vec<(u32, f64)>],
) -> Option<(Vec<usize>, Vec<f64>, Vec<f64>)> {
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Entry(f64, u32);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.total_cmp(&self.0) // min-heap on distance
        }
    }

    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; n];
    let mut v = vec![0.0f64; m];
    let mut row_of = vec![usize::MAX; m];
    let mut col_of = vec![usize::MAX; n];
    let mut dist_col = vec![inf; m];
    let mut pred = vec![(usize::MAX, usize::MAX); m]; // (row, previous col)
    let mut done = vec![false; m];
    let mut settled: Vec<u32> = Vec::new();
    let mut touched: Vec<u32> = Vec::new();

    for start in 0..n {
        for &j in &touched {
            dist_col[j as usize] = inf;
            done[j as usize] = false;
        }
        touched.clear();
        settled.clear();
        let mut heap = BinaryHeap::new();
        for &(j, c) in &cand[start] {
            let ju = j as usize;
            let d = (c - u[start] - v[ju]).max(0.0);
            if d < dist_col[ju] {
                if dist_col[ju] == inf {
                    touched.push(j);
                }
                dist_col[ju] = d;
                pred[ju] = (start, usize::MAX);
                heap.push(Entry(d, j));
            }
        }
        let mut final_col = usize::MAX;
        let mut final_dist = inf;
        while let Some(Entry(d, j)) = heap.pop() {
            let ju = j as usize;
            if done[ju] || d > dist_col[ju] {
                continue;
            }
            done[ju] = true;
            settled.push(j);
            if row_of[ju] == usize::MAX {
                final_col = ju;
                final_dist = d;
                break;
            }
            let i = row_of[ju];
            for &(j2, c) in &cand[i] {
                let j2u = j2 as usize;
                if done[j2u] {
                    continue;
                }
                let nd = d + (c - u[i] - v[j2u]).max(0.0);
                if nd < dist_col[j2u] {
                    if dist_col[j2u] == inf {
                        touched.push(j2);
                    }
                    dist_col[j2u] = nd;
                    pred[j2u] = (i, ju);
                    heap.push(Entry(nd, j2));
                }
            }
        }
        if final_col == usize::MAX {
            return None;
        }
        // Dual update over settled columns keeps reduced costs of explored
        // edges nonnegative and matched edges tight.
        for &j in &settled {
            let ju = j as usize;
            if ju == final_col {
                continue;
            }
            let delta = final_dist - dist_col[ju];
            v[ju] -= delta;
            u[row_of[ju]] += delta;
        }
        u[start] += final_dist;
        // Augment.
        let mut j = final_col;
        loop {
            let (i, prev) = pred[j];
            row_of[j] = i;
            col_of[i] = j;
            if prev == usize::MAX {
                break;
            }
            j = prev;
        }
    }
    Some((col_of, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(cost: &[f64], m: usize, assign: &[usize]) -> f64 {
        assign.iter().enumerate().map(|(i, &j)| cost[i * m + j]).sum()
    }

    #[test]
    fn dense_square_known_case() {
        let cost = vec![
            10.0, 25.0, 15.0, 20.0, //
            15.0, 30.0, 5.0, 15.0, //
            35.0, 20.0, 12.0, 24.0, //
            17.0, 25.0, 24.0, 20.0,
        ];
        let assign = solve_dense(4, 4, &cost);
        assert_eq!(assign, vec![0, 2, 1, 3]);
        assert_eq!(total(&cost, 4, &assign), 55.0);
    }

    #[test]
    fn dense_rectangular_uses_slack() {
        let assign = solve_dense(1, 2, &[0.9, 0.1]);
        assert_eq!(assign, vec![1]);
        let cost = vec![
            1.0, 2.0, 3.0, //
            6.0, 5.0, 4.0,
        ];
        let assign = solve_dense(2, 3, &cost);
        assert_eq!(total(&cost, 3, &assign), 5.0);
    }

    #[test]
    fn line_matches_non_crossing() {
        // S = {0, 1}, R = {0.4, 0.6}: optimum is 0.4 + 0.4 = 0.8.
        let assign = solve_line(&[0.4, 0.6], &[0.0, 1.0], 1.0);
        assert_eq!(assign, vec![0, 1]);
        // Single request picks the nearest of two.
        let assign = solve_line(&[0.1], &[0.0, 1.0], 1.0);
        assert_eq!(assign, vec![0]);
    }

    #[test]
    fn line_agrees_with_dense_on_random_instances() {
        use rand::Rng;
        let mut rng = crate::seed::rng(2024);
        for trial in 0..200 {
            let n = rng.gen_range(1..=12);
            let m = n + rng.gen_range(0..=6);
            let requests: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let servers: Vec<f64> = (0..m).map(|_| rng.gen()).collect();
            let power = [1.0, 1.5, 2.0][trial % 3];
            let cost: Vec<f64> = requests
                .iter()
                .flat_map(|r| servers.iter().map(move |s| (r - s).abs().powf(power)))
                .collect();
            let c_line = total(&cost, m, &solve_line(&requests, &servers, power));
            let c_dense = total(&cost, m, &solve_dense(n, m, &cost));
            assert!(
                (c_line - c_dense).abs() < 1e-9,
                "trial {trial}: line {c_line} vs dense {c_dense}"
            );
        }
    }

    #[test]
    fn sparse_agrees_with_dense_on_random_instances() {
        use rand::Rng;
        let mut rng = crate::seed::rng(77);
        for trial in 0..60 {
            let n = rng.gen_range(5..=60);
            let m = n + rng.gen_range(0..=20);
            let d = 1 + trial % 3;
            let req: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let srv: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..d).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let dist = |i: usize, j: usize| -> f64 {
                req[i]
                    .iter()
                    .zip(&srv[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            };
            let cost: Vec<f64> = (0..n)
                .flat_map(|i| (0..m).map(move |j| dist(i, j)))
                .collect();
            // Deliberately tiny candidate budget to exercise the repair loop.
            let c_sparse = total(&cost, m, &solve_sparse(n, m, &cost, 2));
            let c_dense = total(&cost, m, &solve_dense(n, m, &cost));
            assert!(
                (c_sparse - c_dense).abs() < 1e-9,
                "trial {trial}: sparse {c_sparse} vs dense {c_dense}"
            );
            let mut seen = vec![false; m];
            for &j in &solve_sparse(n, m, &cost, 2) {
                assert!(!seen[j]);
                seen[j] = true;
            }
        }
    }

    #[test]
    fn collocated_points_are_fine() {
        // All-zero costs: any perfect assignment is optimal.
        let cost = vec![0.0; 12];
        let assign = solve_dense(3, 4, &cost);
        assert_eq!(total(&cost, 4, &assign), 0.0);
        let assign = solve_sparse(3, 4, &cost, 1);
        assert_eq!(total(&cost, 4, &assign), 0.0);
    }
}
