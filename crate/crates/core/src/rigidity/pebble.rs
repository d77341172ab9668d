//! (2,3)-pebble game.

use super::Graph;

const K: usize = 2;
const L: usize = 3;

struct PebbleGame {
    pebbles: Vec<usize>,
    /// Directed accepted edges; an edge u → w is covered by a pebble of u.
    out: Vec<Vec<usize>>,
}

impl PebbleGame {
    fn new(n: usize) -> Self {
        PebbleGame { pebbles: vec![K; n], out: vec![Vec::new(); n] }
    }

    /// Move one free pebble to `root` along a reversed path, never entering `blocked`.
    fn gather(&mut self, root: usize, blocked: usize) -> bool {
        let n = self.pebbles.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        seen[blocked] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &y in &self.out[x] {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                parent[y] = x;
                if self.pebbles[y] > 0 {
                    self.pebbles[y] -= 1;
                    self.pebbles[root] += 1;
                    let mut cur = y;
                    while cur != root {
                        let p = parent[cur];
                        let pos = self.out[p].iter().position(|&t| t == cur).expect("path edge exists");
                        self.out[p].swap_remove(pos);
                        self.out[cur].push(p);
                        cur = p;
                    }
                    return true;
                }
                stack.push(y);
            }
        }
        false
    }

    fn try_add(&mut self, u: usize, v: usize) -> bool {
        while self.pebbles[u] + self.pebbles[v] < L + 1 {
            let moved = (self.pebbles[u] < K && self.gather(u, v)) || (self.pebbles[v] < K && self.gather(v, u));
            if !moved {
                return false;
            }
        }
        if self.pebbles[u] > 0 {
            self.pebbles[u] -= 1;
            self.out[u].push(v);
        } else {
            self.pebbles[v] -= 1;
            self.out[v].push(u);
        }
        true
    }
}

/// Indices of the edges accepted greedily, in edge order: a maximal (2,3)-sparse subset.
pub fn pebble_independent_edges(g: &Graph) -> Vec<usize> {
    let mut game = PebbleGame::new(g.n);
    g.edges.iter().enumerate().filter(|(_, &(u, v))| game.try_add(u, v)).map(|(k, _)| k).collect()
}

/// Every k-vertex subgraph has at most 2k − 3 edges.
pub fn laman_sparse(g: &Graph) -> bool {
    pebble_independent_edges(g).len() == g.m()
}

/// |E| − (2n − 3).
pub fn laman_excess(g: &Graph) -> isize {
    g.m() as isize - (2 * g.n as isize - 3)
}

pub fn is_laman(g: &Graph) -> bool {
    g.n >= 2 && laman_excess(g) == 0 && laman_sparse(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidity::gen_laman;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_sparse(g: &Graph) -> bool {
        (0u32..1 << g.n).all(|mask| {
            let k = mask.count_ones() as usize;
            if k < 2 {
                return true;
            }
            let e = g.edges.iter().filter(|&&(i, j)| mask & (1 << i) != 0 && mask & (1 << j) != 0).count();
            e <= 2 * k - 3
        })
    }

    fn brute_laman(g: &Graph) -> bool {
        g.n >= 2 && g.m() == 2 * g.n - 3 && brute_sparse(g)
    }

    #[test]
    fn small_examples() {
        assert!(is_laman(&Graph::complete(3)));
        assert!(!is_laman(&Graph::complete(4)));
        assert_eq!(laman_excess(&Graph::complete(4)), 1);
        let bowtie = Graph::new(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert!(!is_laman(&bowtie));
        assert!(laman_sparse(&bowtie));
        assert_eq!(laman_excess(&bowtie), -1);
    }

    #[test]
    fn agrees_with_subgraph_counting() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..400 {
            let n = rng.gen_range(2..=7);
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let p = rng.gen_range(0.2..0.9);
            let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|_| rng.gen_bool(p)).collect();
            let g = Graph::new(n, &edges).unwrap();
            assert_eq!(laman_sparse(&g), brute_sparse(&g), "{:?}", g.edges);
            assert_eq!(is_laman(&g), brute_laman(&g), "{:?}", g.edges);
        }
        for seed in 0..30 {
            let g = gen_laman(3 + seed as usize % 5, seed).unwrap();
            assert!(brute_laman(&g));
        }
    }
}
