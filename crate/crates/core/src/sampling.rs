//! Seeded random instance generation for the randomized cross-checking
//! suites. Everything is driven by an explicit `ChaCha8Rng` so failures
//! reproduce from the printed seed.

use crate::field::{Field, Rat};
use crate::geometric::consistent_subset;
use crate::matrix::Matrix;
use crate::model::DaeSystem;
use crate::subspace::Subspace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut ChaCha8Rng, max_num: i64, max_den: i64) -> Rat {
    let n = rng.gen_range(-max_num..=max_num);
    let d = rng.gen_range(1..=max_den);
    Rat::new(n.into(), d.into())
}

pub fn matrix(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    max_num: i64,
    max_den: i64,
) -> Matrix<Rat> {
    Matrix::from_fn(rows, cols, |_, _| rational(rng, max_num, max_den))
}

/// Integer-entried matrix; sparser than uniform so that structural zeros
/// (singular descriptors, rank-deficient blocks) appear often.
pub fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> Matrix<Rat> {
    Matrix::from_fn(rows, cols, |_, _| {
        if rng.gen_bool(0.35) {
            Rat::from_int(0)
        } else {
            Rat::from_int(rng.gen_range(-bound..=bound))
        }
    })
}

pub fn system(
    rng: &mut ChaCha8Rng,
    q: usize,
    n: usize,
    m: usize,
    s: usize,
    p: usize,
    bound: i64,
) -> DaeSystem<Rat> {
    DaeSystem::new(
        "random",
        int_matrix(rng, q, n, bound),
        int_matrix(rng, q, n, bound),
        int_matrix(rng, q, m, bound),
        int_matrix(rng, q, s, bound),
        int_matrix(rng, p, n, bound),
    )
    .expect("sampled dimensions are consistent")
}

/// Resamples until the consistent subset is non-empty.
pub fn consistent_system(
    rng: &mut ChaCha8Rng,
    q: usize,
    n: usize,
    m: usize,
    s: usize,
    p: usize,
    bound: i64,
) -> DaeSystem<Rat> {
    loop {
        let sys = system(rng, q, n, m, s, p, bound);
        if consistent_subset(&sys).v_star.is_some() {
            return sys;
        }
    }
}

/// Explicit system: `E = I` with random integer remaining data.
pub fn explicit_system(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    s: usize,
    p: usize,
    bound: i64,
) -> DaeSystem<Rat> {
    DaeSystem::new(
        "random-explicit",
        Matrix::identity(n),
        int_matrix(rng, n, n, bound),
        int_matrix(rng, n, m, bound),
        int_matrix(rng, n, s, bound),
        int_matrix(rng, p, n, bound),
    )
    .expect("sampled dimensions are consistent")
}

/// Explicit system plus a surjective aggregation map `h` (z×n) whose kernel
/// the output respects: the output matrix is built as a random factor
/// through `h`, so `ker h ⊆ ker C` holds by construction.
pub fn abstraction_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
    z: usize,
    m: usize,
    s: usize,
    p: usize,
    bound: i64,
) -> (DaeSystem<Rat>, Matrix<Rat>) {
    let h = loop {
        let candidate = int_matrix(rng, z, n, bound);
        if candidate.rank() == z {
            break candidate;
        }
    };
    let c = int_matrix(rng, p, z, bound).mul(&h);
    let sys = DaeSystem::new(
        "random-aggregated",
        Matrix::identity(n),
        int_matrix(rng, n, n, bound),
        int_matrix(rng, n, m, bound),
        int_matrix(rng, n, s, bound),
        c,
    )
    .expect("sampled dimensions are consistent");
    (sys, h)
}

pub fn invertible(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Matrix<Rat> {
    loop {
        let m = int_matrix(rng, n, n, bound);
        if !m.determinant().is_zero() {
            return m;
        }
    }
}

/// Strictly upper triangular, hence nilpotent.
pub fn nilpotent(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Matrix<Rat> {
    Matrix::from_fn(n, n, |r, c| {
        if c > r {
            Rat::from_int(rng.gen_range(-bound..=bound))
        } else {
            Rat::from_int(0)
        }
    })
}

pub fn subspace(
    rng: &mut ChaCha8Rng,
    ambient: usize,
    spanning_cols: usize,
    bound: i64,
) -> Subspace<Rat> {
    Subspace::from_columns(&int_matrix(rng, ambient, spanning_cols, bound))
}

pub fn gf_matrix<const P: u64>(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
) -> Matrix<crate::field::Gf<P>> {
    Matrix::from_fn(rows, cols, |_, _| {
        crate::field::Gf::<P>::from_int(rng.gen_range(0..P) as i64)
    })
}

pub fn gf_system<const P: u64>(
    rng: &mut ChaCha8Rng,
    q: usize,
    n: usize,
    m: usize,
    s: usize,
    p_rows: usize,
) -> DaeSystem<crate::field::Gf<P>> {
    DaeSystem::new(
        "random-gf",
        gf_matrix::<P>(rng, q, n),
        gf_matrix::<P>(rng, q, n),
        gf_matrix::<P>(rng, q, m),
        gf_matrix::<P>(rng, q, s),
        gf_matrix::<P>(rng, p_rows, n),
    )
    .expect("sampled dimensions are consistent")
}
