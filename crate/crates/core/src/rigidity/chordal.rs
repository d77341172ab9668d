use crate::cones::lindenstrauss::k_pinv;
use crate::numerics::{default_rank_tol, sym_eigen_unchecked, Mat};

use super::{Graph, RigidityError};

/// Lexicographic breadth-first search; returns vertices in visit order.
pub fn lex_bfs(g: &Graph) -> Vec<usize> {
    let adj = g.adjacency();
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); g.n];
    let mut visited = vec![false; g.n];
    let mut order = Vec::with_capacity(g.n);
    for step in 0..g.n {
        let v = (0..g.n)
            .filter(|&v| !visited[v])
            .fold(None, |best: Option<usize>, v| match best {
                Some(b) if labels[b] >= labels[v] => Some(b),
                _ => Some(v),
            })
            .expect("an unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for &w in &adj[v] {
            if !visited[w] {
                labels[w].push(g.n - step);
            }
        }
    }
    order
}

fn later_neighbors(g: &Graph, order: &[usize]) -> Vec<Vec<usize>> {
    let mut pos = vec![0; g.n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    let adj = g.adjacency();
    order.iter().map(|&v| adj[v].iter().copied().filter(|&w| pos[w] > pos[v]).collect()).collect()
}

/// A perfect elimination ordering (reversed Lex-BFS order), if the graph is chordal.
pub fn perfect_elimination_order(g: &Graph) -> Option<Vec<usize>> {
    let mut order = lex_bfs(g);
    order.reverse();
    let later = later_neighbors(g, &order);
    let ok = later.iter().all(|nb| nb.iter().enumerate().all(|(a, &x)| nb[a + 1..].iter().all(|&y| g.has_edge(x, y))));
    ok.then_some(order)
}

pub fn is_chordal(g: &Graph) -> bool {
    perfect_elimination_order(g).is_some()
}

/// Maximal cliques of a chordal graph, each sorted.
pub fn maximal_cliques(g: &Graph) -> Result<Vec<Vec<usize>>, RigidityError> {
    let order = perfect_elimination_order(g).ok_or_else(|| RigidityError::Invalid("graph is not chordal".into()))?;
    let later = later_neighbors(g, &order);
    let mut cands: Vec<Vec<usize>> = order
        .iter()
        .zip(later)
        .map(|(&v, mut nb)| {
            nb.push(v);
            nb.sort_unstable();
            nb
        })
        .collect();
    cands.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for c in cands {
        if !out.iter().any(|o| c.iter().all(|x| o.contains(x))) {
            out.push(c);
        }
    }
    Ok(out)
}

/// Whether edge-indexed squared distances on a chordal graph are EDM-completable: every
/// maximal clique must carry a Euclidean distance matrix.
pub fn bakonyi_johnson_check(g: &Graph, partial_d: &[f64]) -> Result<bool, RigidityError> {
    if partial_d.len() != g.m() {
        return Err(RigidityError::Invalid(format!("{} distances for {} edges", partial_d.len(), g.m())));
    }
    if partial_d.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Ok(false);
    }
    for clique in maximal_cliques(g)? {
        let k = clique.len();
        if k < 2 {
            continue;
        }
        let d = Mat::from_fn(k, k, |a, b| {
            if a == b {
                0.0
            } else {
                partial_d[g.edge_index(clique[a], clique[b]).expect("clique pairs are edges")]
            }
        });
        let e = sym_eigen_unchecked(&k_pinv(&d));
        if e.min() < -default_rank_tol(e.max_abs(), k) {
            return Ok(false);
        }
    }
    Ok(true)
}
