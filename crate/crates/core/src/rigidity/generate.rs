use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cones::{ConeDesc, Element};
use crate::facial::ConicSystem;
use crate::numerics::{Mat, Rational};

use super::{Framework, Graph, RigidityError};

pub const MAX_GEN_N: usize = 64;

/// Coordinates are k / 2³² with k uniform in [0, 2³²].
const COORD_DENOM_BITS: u32 = 32;

fn check_n(n: usize, min: usize) -> Result<(), RigidityError> {
    if n < min || n > MAX_GEN_N {
        return Err(RigidityError::Invalid(format!("n = {n} outside [{min}, {MAX_GEN_N}]")));
    }
    Ok(())
}

/// Laman graph by Henneberg vertex additions (each new vertex joined to two old ones).
pub fn gen_laman(n: usize, seed: u64) -> Result<Graph, RigidityError> {
    check_n(n, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![(0, 1)];
    if n >= 3 {
        edges.extend([(0, 2), (1, 2)]);
    }
    for v in 3..n {
        let mut old: Vec<usize> = (0..v).collect();
        old.shuffle(&mut rng);
        edges.push((old[0], v));
        edges.push((old[1], v));
    }
    Graph::new(n, &edges)
}

/// Chordal graph: every new vertex is joined to a random nonempty part of a maximal clique
/// of the graph so far, so it is simplicial when added.
pub fn gen_chordal(n: usize, density: f64, seed: u64) -> Result<Graph, RigidityError> {
    check_n(n, 1)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(RigidityError::Invalid(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cliques: Vec<Vec<usize>> = vec![vec![0]];
    let mut edges = Vec::new();
    for v in 1..n {
        let c = cliques.choose(&mut rng).expect("at least one clique").clone();
        let mut part: Vec<usize> = c.iter().copied().filter(|_| rng.gen_bool(density)).collect();
        if part.is_empty() {
            part.push(*c.choose(&mut rng).expect("cliques are nonempty"));
        }
        edges.extend(part.iter().map(|&u| (u, v)));
        let mut fresh = part.clone();
        fresh.push(v);
        if part.len() == c.len() {
            let pos = cliques.iter().position(|x| *x == c).expect("clique is listed");
            cliques[pos] = fresh;
        } else {
            cliques.push(fresh);
        }
    }
    Graph::new(n, &edges)
}

/// Maximal planar graph: a triangle (n = 3) or tetrahedron grown by inserting vertices
/// into random triangular faces.
pub fn gen_maximal_planar(n: usize, seed: u64) -> Result<Graph, RigidityError> {
    check_n(n, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = vec![(0, 1), (1, 2), (0, 2)];
    if n == 3 {
        return Graph::new(3, &edges);
    }
    edges.extend([(0, 3), (1, 3), (2, 3)]);
    let mut faces: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 1, 3], [1, 2, 3], [0, 2, 3]];
    for v in 4..n {
        let k = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(k);
        edges.extend([(a, v), (b, v), (c, v)]);
        faces.extend([[a, b, v], [b, c, v], [a, c, v]]);
    }
    Graph::new(n, &edges)
}

/// PSD system with ⟨e₁e₁ᵀ, X⟩ = 0 and ⟨eᵢeᵢᵀ + eᵢ₋₁eᵢ₊₁ᵀ + eᵢ₊₁eᵢ₋₁ᵀ, X⟩ = 0 for
/// 1 < i < n; its singularity degree is n − 1.
pub fn gen_ladder_sdp(n: usize) -> Result<ConicSystem, RigidityError> {
    check_n(n, 2)?;
    let mut cons = vec![Element::Matrix(Mat::from_fn(n, n, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 }))];
    for i in 1..n - 1 {
        let mut m = Mat::zeros(n, n);
        m[(i, i)] = 1.0;
        m[(i - 1, i + 1)] = 1.0;
        m[(i + 1, i - 1)] = 1.0;
        cons.push(Element::Matrix(m));
    }
    Ok(ConicSystem::float(ConeDesc::Psd(n), cons, &vec![0.0; n - 1])?)
}

/// Random rational configuration in [0, 1]^d, generic with probability close to one.
pub fn random_generic_config(g: &Graph, dim: usize, seed: u64) -> Result<Framework, RigidityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = num_bigint::BigInt::from(1u64 << COORD_DENOM_BITS);
    let coords = (0..g.n)
        .map(|_| (0..dim).map(|_| Rational::new(rng.gen_range(0..=1u64 << COORD_DENOM_BITS).into(), denom.clone())).collect())
        .collect();
    Ok(Framework::new(g.clone(), dim, coords)?.with_provenance(format!("random-rational seed {seed}")))
}
