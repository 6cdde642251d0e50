//! Independent oracle implementations and the runtime self-check suite.
//!
//! Everything in here is written from the defining formulas, deliberately
//! not sharing code with the production paths it cross-checks: transforms
//! as explicit multi-sums rather than separable passes, the cell ordering
//! re-derived with a different enumeration strategy. The `selftest` CLI
//! subcommand runs [`run_all`]; the test suites call the oracles directly.

use crate::dct::{self, RealArrayND};
use crate::ordering;
use crate::snes;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Inverse transform by direct evaluation of the defining sum.
pub fn oracle_dct3_1d(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut sum = coeffs[0];
        for (f, c) in coeffs.iter().enumerate().skip(1) {
            sum += 2.0 * c * (PI / n as f64 * f as f64 * (k as f64 + 0.5)).cos();
        }
        out.push(sum / (n as f64).sqrt());
    }
    out
}

/// Forward transform by direct evaluation of the inverse's orthogonality
/// relations.
pub fn oracle_dct2_1d(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    for f in 0..n {
        let mut sum = 0.0;
        for (k, v) in values.iter().enumerate() {
            sum += v * (PI / n as f64 * f as f64 * (k as f64 + 0.5)).cos();
        }
        out.push(sum / (n as f64).sqrt());
    }
    out
}

/// Per-axis basis factors for the explicit multi-sum transforms.
fn axis_factors(extent: usize, inverse: bool) -> Vec<Vec<f64>> {
    (0..extent)
        .map(|f| {
            (0..extent)
                .map(|k| {
                    let c = (PI / extent as f64 * f as f64 * (k as f64 + 0.5)).cos();
                    if inverse {
                        if f == 0 {
                            1.0
                        } else {
                            2.0 * c
                        }
                    } else {
                        c
                    }
                })
                .collect()
        })
        .collect()
}

fn for_each_cell(dims: &[usize], mut f: impl FnMut(&[usize])) {
    let mut coords = vec![0usize; dims.len()];
    loop {
        f(&coords);
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            coords[axis] += 1;
            if coords[axis] < dims[axis] {
                break;
            }
            coords[axis] = 0;
        }
    }
}

/// n-D inverse transform as one explicit sum over every coefficient cell,
/// the product-of-cosines form of the separable definition.
pub fn oracle_dct3_nd(array: &RealArrayND) -> RealArrayND {
    oracle_transform_nd(array, true)
}

/// n-D forward transform as one explicit sum over every value cell.
pub fn oracle_dct2_nd(array: &RealArrayND) -> RealArrayND {
    oracle_transform_nd(array, false)
}

fn oracle_transform_nd(array: &RealArrayND, inverse: bool) -> RealArrayND {
    let dims = array.dims().to_vec();
    let factors: Vec<Vec<Vec<f64>>> = dims
        .iter()
        .map(|&d| axis_factors(d, inverse))
        .collect();
    let norm = 1.0 / (array.len() as f64).sqrt();
    let mut out = RealArrayND::zeros(&dims).expect("valid dims");
    let mut outputs: Vec<(Vec<usize>, f64)> = Vec::with_capacity(array.len());
    for_each_cell(&dims, |out_coords| {
        let mut sum = 0.0;
        for_each_cell(&dims, |in_coords| {
            let mut term = array.get(in_coords);
            for axis in 0..dims.len() {
                let (freq, space) = if inverse {
                    (in_coords[axis], out_coords[axis])
                } else {
                    (out_coords[axis], in_coords[axis])
                };
                term *= factors[axis][freq][space];
            }
            sum += term;
        });
        outputs.push((out_coords.to_vec(), norm * sum));
    });
    for (coords, value) in outputs {
        out.set(&coords, value);
    }
    out
}

/// Cell ordering re-derived from its description: partition the array into
/// constant-coordinate-sum simplexes, then empty each simplex by cycling
/// over the corner points (found by scanning every cell) and taking the
/// nearest unvisited member each time.
pub fn oracle_simplex_order(dims: &[usize]) -> Vec<Vec<usize>> {
    // Corner points: exactly one non-zero coordinate, sitting at its axis
    // extreme. Found by brute-force scan.
    let mut corners: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for_each_cell(dims, |coords| {
        let nonzero: Vec<usize> = (0..dims.len()).filter(|&a| coords[a] != 0).collect();
        if nonzero.len() == 1 && coords[nonzero[0]] == dims[nonzero[0]] - 1 {
            corners.push((dims[nonzero[0]], nonzero[0], coords.to_vec()));
        }
    });
    corners.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let corners: Vec<Vec<usize>> = corners.into_iter().map(|(_, _, c)| c).collect();

    let max_sum: usize = dims.iter().map(|d| d - 1).sum();
    let mut order = Vec::new();
    for target in 0..=max_sum {
        let mut simplex: Vec<Vec<usize>> = Vec::new();
        for_each_cell(dims, |coords| {
            if coords.iter().sum::<usize>() == target {
                simplex.push(coords.to_vec());
            }
        });
        let mut turn = 0usize;
        while !simplex.is_empty() {
            if corners.is_empty() {
                order.append(&mut simplex);
                break;
            }
            let corner = &corners[turn % corners.len()];
            let mut best = 0;
            for i in 1..simplex.len() {
                let di = euclid(&simplex[i], corner);
                let db = euclid(&simplex[best], corner);
                if di < db || (di == db && simplex[i] < simplex[best]) {
                    best = i;
                }
            }
            order.push(simplex.remove(best));
            turn += 1;
        }
    }
    order
}

fn euclid(a: &[usize], b: &[usize]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn random_dims(rng: &mut impl Rng, max_extent: usize) -> Vec<usize> {
    let rank = rng.gen_range(1..=4);
    (0..rank).map(|_| rng.gen_range(1..=max_extent)).collect()
}

fn random_array(rng: &mut impl Rng, dims: &[usize]) -> RealArrayND {
    let len = dims.iter().product();
    let data = (0..len).map(|_| rng.gen_range(-10.0..10.0)).collect();
    RealArrayND::from_data(dims, data).expect("valid dims")
}

type CheckResult = std::result::Result<(), String>;

fn check_dct_1d_against_oracle() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..50 {
        let n = rng.gen_range(1..=32);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let err = max_abs_diff(&dct::dct3_1d(&x).unwrap(), &oracle_dct3_1d(&x));
        if err >= 1e-9 {
            return Err(format!("inverse 1d deviates from direct sum by {err}"));
        }
        let err = max_abs_diff(&dct::dct2_1d(&x).unwrap(), &oracle_dct2_1d(&x));
        if err >= 1e-9 {
            return Err(format!("forward 1d deviates from direct sum by {err}"));
        }
    }
    Ok(())
}

fn check_dct_nd_against_oracle() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..40 {
        let dims = random_dims(&mut rng, 6);
        let arr = random_array(&mut rng, &dims);
        let err = max_abs_diff(dct::dct3_nd(&arr).data(), oracle_dct3_nd(&arr).data());
        if err >= 1e-9 {
            return Err(format!("inverse nd deviates on dims {dims:?} by {err}"));
        }
        let err = max_abs_diff(dct::dct2_nd(&arr).data(), oracle_dct2_nd(&arr).data());
        if err >= 1e-9 {
            return Err(format!("forward nd deviates on dims {dims:?} by {err}"));
        }
    }
    Ok(())
}

fn check_dct_roundtrip() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..40 {
        let dims = random_dims(&mut rng, 8);
        let arr = random_array(&mut rng, &dims);
        let back = dct::dct3_nd(&dct::dct2_nd(&arr));
        let err = max_abs_diff(arr.data(), back.data());
        if err >= 1e-9 {
            return Err(format!("roundtrip error {err} on dims {dims:?}"));
        }
    }
    Ok(())
}

fn check_ordering_against_oracle() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..50 {
        let dims = random_dims(&mut rng, 6);
        let ours = ordering::simplex_order(&dims).map_err(|e| e.to_string())?;
        let oracle = oracle_simplex_order(&dims);
        if ours.sequence() != oracle.as_slice() {
            return Err(format!("cell order differs on dims {dims:?}"));
        }
        let mut seen = vec![false; ours.len()];
        for &idx in ours.flat_indices() {
            if seen[idx] {
                return Err(format!("cell visited twice on dims {dims:?}"));
            }
            seen[idx] = true;
        }
        let sums: Vec<usize> = ours.sequence().iter().map(|c| c.iter().sum()).collect();
        if !sums.windows(2).all(|w| w[0] <= w[1]) {
            return Err(format!("coordinate sums decrease on dims {dims:?}"));
        }
    }
    Ok(())
}

fn check_snes_formulas() -> CheckResult {
    let frozen = [
        (1usize, 8usize),
        (10, 14),
        (20, 16),
        (40, 19),
        (80, 21),
        (160, 23),
        (320, 25),
        (728, 27),
        (3680, 32),
    ];
    for (c, lambda) in frozen {
        let got = snes::population_size(c).map_err(|e| e.to_string())?;
        if got != lambda {
            return Err(format!("population size at {c}: got {got}, want {lambda}"));
        }
        let direct = 8 + (3.0 * (c as f64).ln()).floor() as usize;
        if got != direct {
            return Err(format!("population size at {c} deviates from direct evaluation"));
        }
        let (eta_mu, eta_sigma) = snes::learning_rates(c).map_err(|e| e.to_string())?;
        let expected = ((c as f64).ln() + 3.0) / (5.0 * (c as f64).sqrt());
        if (eta_mu - expected).abs() >= 1e-12 || (eta_sigma - expected).abs() >= 1e-12 {
            return Err(format!("learning rate at {c} deviates from direct evaluation"));
        }
    }
    Ok(())
}

fn check_fitness_unit_cases() -> CheckResult {
    let cases = [
        (250.0, 7.0, 0.0),
        (1e-9, 0.0, 1.0),
        (125.0, 3.5, 0.75),
    ];
    for (t, d, want) in cases {
        let got = crate::arm::trial_score(t, d, 250.0, 7.0);
        if (got - want).abs() >= 1e-12 {
            return Err(format!("score({t}, {d}) = {got}, want {want}"));
        }
    }
    Ok(())
}

/// Runs every self-check, printing one line per check. Returns the number
/// of failures.
pub fn run_all() -> usize {
    let checks: [(&str, fn() -> CheckResult); 6] = [
        ("dct-1d-direct-sum", check_dct_1d_against_oracle),
        ("dct-nd-direct-sum", check_dct_nd_against_oracle),
        ("dct-roundtrip", check_dct_roundtrip),
        ("ordering-transcription", check_ordering_against_oracle),
        ("snes-formulas", check_snes_formulas),
        ("fitness-unit-cases", check_fitness_unit_cases),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    failures
}
