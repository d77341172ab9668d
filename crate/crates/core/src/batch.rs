//! Batch analysis over independent instances.
//!
//! With the `parallel` feature the instances are spread over a rayon pool; without it
//! they run in order on the calling thread. Results come back in input order either way.

use crate::facial::{facial_reduction, ConicSystem, FacialError, SingularityReport};
use crate::rigidity::{rigidity_verdicts, Framework, RigidityError, RigidityVerdict};

/// Apply `f` to every item. `jobs` caps the worker count; `None` uses the global pool.
pub fn map_instances<T, R, F>(items: &[T], jobs: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        match jobs {
            Some(1) => items.iter().map(&f).collect(),
            Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                Err(_) => items.par_iter().map(&f).collect(),
            },
            None => items.par_iter().map(&f).collect(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        items.iter().map(&f).collect()
    }
}

/// Sequential reference path, available regardless of features.
pub fn map_sequential<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}

pub fn reduce_all(systems: &[ConicSystem], jobs: Option<usize>) -> Vec<Result<SingularityReport, FacialError>> {
    map_instances(systems, jobs, facial_reduction)
}

pub fn rigidity_all(frameworks: &[Framework], jobs: Option<usize>) -> Vec<Result<RigidityVerdict, RigidityError>> {
    map_instances(frameworks, jobs, rigidity_verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidity::{gen_laman, random_generic_config};

    #[test]
    fn order_is_preserved() {
        let v: Vec<u64> = (0..100).collect();
        assert_eq!(map_instances(&v, Some(3), |x| x * x), map_sequential(&v, |x| x * x));
        assert_eq!(map_instances(&v, None, |x| x + 1)[99], 100);
    }

    #[test]
    fn batch_matches_single_runs() {
        let fs: Vec<Framework> = (0..4u64)
            .map(|s| random_generic_config(&gen_laman(4 + s as usize, s).unwrap(), 2, 10 + s).unwrap())
            .collect();
        let batch = rigidity_all(&fs, Some(2));
        for (f, r) in fs.iter().zip(batch) {
            assert_eq!(r.unwrap().sd, rigidity_verdicts(f).unwrap().sd);
        }
    }
}
