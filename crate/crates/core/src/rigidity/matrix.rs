use num_traits::Zero;

use crate::numerics::{exact_rank, rational_nullspace, Mat, RatMat, Rational};

use super::{Framework, Graph};

/// |E| × dn matrix: row of edge uv holds p(u) − p(v) in the u-columns and p(v) − p(u) in
/// the v-columns.
pub fn rigidity_matrix_exact(f: &Framework) -> RatMat {
    let d = f.dim;
    let mut r = RatMat::zeros(f.graph.m(), d * f.n());
    for (row, &(u, v)) in f.graph.edges.iter().enumerate() {
        for k in 0..d {
            let diff = f.coords[u][k].clone() - f.coords[v][k].clone();
            r[(row, u * d + k)] = diff.clone();
            r[(row, v * d + k)] = -diff;
        }
    }
    r
}

pub fn rigidity_matrix(f: &Framework) -> Mat {
    rigidity_matrix_exact(f).to_f64()
}

/// Squared edge lengths.
pub fn rigidity_map_exact(f: &Framework) -> Vec<Rational> {
    f.graph
        .edges
        .iter()
        .map(|&(u, v)| {
            f.coords[u].iter().zip(&f.coords[v]).fold(Rational::zero(), |acc, (a, b)| {
                let t = a.clone() - b.clone();
                acc + t.clone() * t
            })
        })
        .collect()
}

pub fn rigidity_map(f: &Framework) -> Vec<f64> {
    rigidity_map_exact(f).iter().map(crate::numerics::to_f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Infinitesimal {
    pub rank: usize,
    /// Rank needed for infinitesimal rigidity.
    pub required: usize,
    pub rigid: bool,
    /// Rows of the rigidity matrix are linearly independent.
    pub independent: bool,
    pub minimal: bool,
}

/// Exact-rank infinitesimal rigidity test.
pub fn infinitesimal_verdict(f: &Framework) -> Infinitesimal {
    let (n, d) = (f.n(), f.dim);
    let rank = exact_rank(&rigidity_matrix_exact(f));
    let required = if n > d { d * n - d * (d + 1) / 2 } else { n * n.saturating_sub(1) / 2 };
    let rigid = rank == required;
    let independent = rank == f.graph.m();
    Infinitesimal { rank, required, rigid, independent, minimal: rigid && independent }
}

/// Exact basis of the equilibrium stresses (left kernel of the rigidity matrix).
pub fn equilibrium_stress_basis(f: &Framework) -> Vec<Vec<Rational>> {
    let null = rational_nullspace(&rigidity_matrix_exact(f).transpose());
    (0..null.cols()).map(|j| null.col(j)).collect()
}

/// Stress matrix with off-diagonal −ω_ij on edges and zero row sums.
pub fn stress_matrix_exact(g: &Graph, omega: &[Rational]) -> RatMat {
    assert_eq!(omega.len(), g.m(), "one stress per edge");
    let mut s = RatMat::zeros(g.n, g.n);
    for (&(i, j), w) in g.edges.iter().zip(omega) {
        s[(i, j)] = s[(i, j)].clone() - w.clone();
        s[(j, i)] = s[(j, i)].clone() - w.clone();
        s[(i, i)] = s[(i, i)].clone() + w.clone();
        s[(j, j)] = s[(j, j)].clone() + w.clone();
    }
    s
}

pub fn stress_matrix_from(g: &Graph, omega: &[f64]) -> Mat {
    assert_eq!(omega.len(), g.m(), "one stress per edge");
    let mut s = Mat::zeros(g.n, g.n);
    for (&(i, j), w) in g.edges.iter().zip(omega) {
        s[(i, j)] -= w;
        s[(j, i)] -= w;
        s[(i, i)] += w;
        s[(j, j)] += w;
    }
    s
}

/// Dimension of {Q ∈ 𝒮ᵈ : (pᵢ − pⱼ)ᵀ Q (pᵢ − pⱼ) = 0 on every edge}, computed exactly.
pub fn affine_flex_dim(f: &Framework) -> usize {
    let d = f.dim;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let rows: Vec<Vec<Rational>> = f
        .graph
        .edges
        .iter()
        .map(|&(u, v)| {
            let diff: Vec<Rational> = (0..d).map(|k| f.coords[u][k].clone() - f.coords[v][k].clone()).collect();
            pairs
                .iter()
                .map(|&(a, b)| {
                    let t = diff[a].clone() * diff[b].clone();
                    if a == b {
                        t
                    } else {
                        t.clone() + t
                    }
                })
                .collect()
        })
        .collect();
    if rows.is_empty() {
        return pairs.len();
    }
    pairs.len() - exact_rank(&RatMat::from_rows(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rational::int;
    use crate::numerics::to_f64;
    use crate::rigidity::{random_generic_config, Graph};
    use num_traits::Signed;

    fn square_k4() -> Framework {
        // edge order 12, 23, 34, 14, 13, 24 (zero-based)
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)]).unwrap();
        Framework::from_f64(g, 2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    fn triangle() -> Framework {
        Framework::from_f64(Graph::complete(3), 2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn single_edge_row() {
        let f = Framework::from_f64(Graph::new(2, &[(0, 1)]).unwrap(), 2, &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(rigidity_matrix(&f).row(0), &[-1.0, 0.0, 1.0, 0.0]);
        assert_eq!(rigidity_map(&f), vec![1.0]);
        assert!(equilibrium_stress_basis(&f).is_empty());
        assert_eq!(affine_flex_dim(&f), 2);
    }

    #[test]
    fn coincident_points_give_zero_matrix() {
        let f = Framework::from_f64(Graph::complete(3), 2, &vec![vec![0.5, 0.5]; 3]).unwrap();
        assert_eq!(rigidity_matrix(&f).max_abs(), 0.0);
        assert_eq!(rigidity_map(&f), vec![0.0; 3]);
    }

    #[test]
    fn triangle_and_path_verdicts() {
        let t = triangle();
        let v = infinitesimal_verdict(&t);
        assert_eq!(v.rank, 3);
        assert!(v.rigid && v.independent && v.minimal);
        assert!(equilibrium_stress_basis(&t).is_empty());

        let path = Framework::from_f64(Graph::new(3, &[(0, 1), (1, 2)]).unwrap(), 2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let v = infinitesimal_verdict(&path);
        assert_eq!(v.rank, 2);
        assert!(!v.rigid);
    }

    #[test]
    fn square_k4_stress_and_map() {
        let f = square_k4();
        assert_eq!(rigidity_map(&f), vec![1.0, 1.0, 1.0, 1.0, 2.0, 2.0]);
        let v = infinitesimal_verdict(&f);
        assert_eq!(v.rank, 5);
        assert!(v.rigid && !v.independent);
        let basis = equilibrium_stress_basis(&f);
        assert_eq!(basis.len(), 1);
        let w = &basis[0];
        let scale = w[0].clone();
        let normalized: Vec<Rational> = w.iter().map(|x| x.clone() / scale.clone()).collect();
        let expect: Vec<Rational> = [1, 1, 1, 1, -1, -1].iter().map(|&x| int(x)).collect();
        assert_eq!(normalized, expect);
        let omega = stress_matrix_exact(&f.graph, &normalized);
        let v4: [i64; 4] = [1, -1, 1, -1];
        let vvt = RatMat::from_fn(4, 4, |i, j| int(v4[i] * v4[j]));
        assert_eq!(omega, vvt);
        assert_eq!(affine_flex_dim(&f), 0);
    }

    #[test]
    fn single_edge_stress_matrix() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        assert_eq!(stress_matrix_from(&g, &[1.0]), Mat::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]));
        assert_eq!(stress_matrix_from(&g, &[0.0]), Mat::zeros(2, 2));
    }

    #[test]
    fn collinear_framework_has_affine_flex() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let f = Framework::from_f64(g, 2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![3.0, 0.0]]).unwrap();
        assert!(affine_flex_dim(&f) >= 1);
    }

    #[test]
    fn stresses_are_exact_equilibria() {
        for seed in 0..10u64 {
            let g = Graph::complete(5);
            let f = random_generic_config(&g, 2, seed).unwrap();
            let p = RatMat::from_rows(&f.coords);
            for w in equilibrium_stress_basis(&f) {
                let omega = stress_matrix_exact(&f.graph, &w);
                let ones = vec![int(1); 5];
                assert!(omega.matvec(&ones).iter().all(|x| x.is_zero()));
                let op = &omega * &p;
                assert!(op.data().iter().all(|x| x.is_zero()));
                let fo = stress_matrix_from(&f.graph, &w.iter().map(to_f64).collect::<Vec<_>>());
                let scale = w.iter().map(|x| to_f64(&x.abs())).fold(0.0, f64::max);
                let fp = &fo * &Mat::from_rows(&f.points());
                assert!(fp.max_abs() <= 1e-9 * (1.0 + scale));
            }
        }
    }

    #[test]
    fn jacobian_matches_twice_the_rigidity_matrix() {
        for seed in 0..8u64 {
            let n = 3 + (seed as usize % 6);
            let g = Graph::complete(n);
            let f = random_generic_config(&g, 2 + (seed as usize % 2), seed).unwrap();
            let d = f.dim;
            let r = rigidity_matrix(&f);
            let pts = f.points();
            let h = 1e-6;
            for col in 0..d * n {
                let (v, k) = (col / d, col % d);
                let eval = |delta: f64| {
                    let mut q = pts.clone();
                    q[v][k] += delta;
                    Framework::from_f64(g.clone(), d, &q).map(|ff| rigidity_map(&ff)).unwrap()
                };
                let (plus, minus) = (eval(h), eval(-h));
                for row in 0..g.m() {
                    let fd = (plus[row] - minus[row]) / (2.0 * h);
                    let want = 2.0 * r[(row, col)];
                    assert!((fd - want).abs() <= 1e-6 * (1.0 + want.abs()), "seed {seed} row {row} col {col}: {fd} vs {want}");
                }
            }
        }
    }
}
