//! Reference step sets used by tests, benchmarks and the documentation.

use crate::model::WalkModel;

fn build(d: usize, steps: &[&[i32]]) -> WalkModel {
    WalkModel::uniform(d, steps.iter().map(|s| s.to_vec()).collect())
        .expect("reference model is valid")
}

/// Nearest-neighbour walk: ±e_i.
pub fn simple_walk(d: usize) -> WalkModel {
    let mut steps = Vec::with_capacity(2 * d);
    for i in 0..d {
        for sign in [1, -1] {
            let mut v = vec![0; d];
            v[i] = sign;
            steps.push(v);
        }
    }
    WalkModel::uniform(d, steps).expect("valid")
}

/// χ = x̄_1 + Σ x_i x̄_{i+1} + x_d.
pub fn tandem(d: usize) -> WalkModel {
    let mut steps = Vec::with_capacity(d + 1);
    let mut first = vec![0; d];
    first[0] = -1;
    steps.push(first);
    for i in 0..d.saturating_sub(1) {
        let mut v = vec![0; d];
        v[i] = 1;
        v[i + 1] = -1;
        steps.push(v);
    }
    let mut last = vec![0; d];
    last[d - 1] = 1;
    steps.push(last);
    WalkModel::uniform(d, steps).expect("valid")
}

/// Three-dimensional model whose first and third walls meet at an angle
/// with rational rotation cosine 2/5, so the reflection group is infinite.
pub fn two_fifths_rotation() -> WalkModel {
    build(
        3,
        &[
            &[-1, -1, -1],
            &[-1, 1, -1],
            &[-1, -1, 0],
            &[0, 1, 0],
            &[1, -1, 0],
            &[1, -1, 1],
            &[1, 1, 1],
        ],
    )
}

/// Zero-drift model with every off-diagonal covariance entry equal to −1/3.
pub fn minus_third_covariance() -> WalkModel {
    build(
        3,
        &[
            &[-1, -1, 1],
            &[-1, 0, 0],
            &[-1, 1, 1],
            &[0, 0, -1],
            &[0, 1, -1],
            &[0, 1, 0],
            &[1, -1, 0],
            &[1, -1, 1],
            &[1, 0, -1],
        ],
    )
}

/// Identity covariance, so the reflection group is (ℤ/2ℤ)³, yet the
/// combinatorial group is infinite.
pub fn identity_covariance() -> WalkModel {
    build(
        3,
        &[
            &[-1, -1, -1],
            &[-1, -1, 0],
            &[-1, 0, 1],
            &[-1, 1, 0],
            &[0, 1, -1],
            &[0, 1, 1],
            &[1, -1, -1],
            &[1, -1, 1],
            &[1, 0, 1],
            &[1, 1, -1],
        ],
    )
}

/// Four-dimensional zero-drift model with covariance entries such as 1/√6.
pub fn skew_4d() -> WalkModel {
    build(
        4,
        &[
            &[1, 1, 0, 0],
            &[0, -1, 1, 0],
            &[0, 0, -1, 1],
            &[-1, 1, 1, 0],
            &[0, -1, 1, -1],
            &[1, 1, -1, 0],
            &[-1, -1, -1, 0],
        ],
    )
}

/// Five-step model in dimension 4 whose chamber is of type A_4.
pub fn a4_chamber_4d() -> WalkModel {
    build(4, &[&[0, 0, 0, -1], &[1, 0, -1, 0], &[-1, 1, 0, 0], &[0, 0, 1, 0], &[0, -1, 0, 1]])
}

/// The small-step models above, for property sweeps.
pub fn small_step_models() -> Vec<WalkModel> {
    vec![
        simple_walk(1),
        simple_walk(2),
        simple_walk(3),
        tandem(2),
        tandem(3),
        two_fifths_rotation(),
        minus_third_covariance(),
        identity_covariance(),
        skew_4d(),
        a4_chamber_4d(),
    ]
}
