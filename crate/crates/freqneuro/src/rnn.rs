//! Fully-connected recurrent network runtime.
//!
//! One step computes `a' = tanh(W_in * x + W_rec * a + b)` synchronously
//! (every neuron reads the previous step's activations) and exposes the
//! outputs `(a' + 1) / 2`, so action activations always land in `[0, 1]`.

use crate::encoding::NetworkWeights;
use crate::error::{Error, Result};
use ndarray::{aview1, Array1};

/// Neuron activations after the most recent step; all values in (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RnnState {
    activations: Array1<f64>,
}

impl RnnState {
    pub fn activations(&self) -> &[f64] {
        self.activations.as_slice().expect("contiguous")
    }
}

/// Fresh all-zero state for an `n`-neuron network.
pub fn reset(n: usize) -> RnnState {
    RnnState {
        activations: Array1::zeros(n),
    }
}

/// Advances the network one step and returns the new state and the outputs
/// in `[0, 1]`, one per neuron.
pub fn step(
    weights: &NetworkWeights,
    state: &RnnState,
    input: &[f64],
) -> Result<(RnnState, Vec<f64>)> {
    if input.len() != weights.inputs() {
        return Err(Error::InputLength {
            got: input.len(),
            expected: weights.inputs(),
        });
    }
    if input.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut net = weights.input.dot(&aview1(input));
    net += &weights.recurrent.dot(&state.activations);
    net += &weights.bias;
    let activations = net.mapv(f64::tanh);
    let outputs = activations.iter().map(|a| (a + 1.0) / 2.0).collect();
    Ok((RnnState { activations }, outputs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{NetworkArchitecture, NetworkWeights};
    use ndarray::{arr1, arr2};

    #[test]
    fn reset_is_all_zeros() {
        assert_eq!(reset(8).activations(), &[0.0; 8]);
        assert_eq!(reset(32).activations(), vec![0.0; 32]);
    }

    #[test]
    fn zero_weights_output_one_half() {
        let arch = NetworkArchitecture::meta(3);
        let weights = NetworkWeights::zeros(&arch);
        let state = reset(arch.neurons);
        let input = vec![0.7; arch.inputs];
        let (next, out) = step(&weights, &state, &input).unwrap();
        assert!(next.activations().iter().all(|&a| a == 0.0));
        assert!(out.iter().all(|&o| o == 0.5));
    }

    #[test]
    fn single_neuron_bias_only() {
        let weights = NetworkWeights {
            input: arr2(&[[0.0]]),
            recurrent: arr2(&[[0.0]]),
            bias: arr1(&[0.8]),
        };
        let (next, _) = step(&weights, &reset(1), &[0.0]).unwrap();
        assert!((next.activations()[0] - 0.8f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn two_steps_match_straight_line_trace() {
        let w_in = [[0.1, -0.2], [0.3, 0.05], [-0.4, 0.2]];
        let w_rec = [
            [0.05, -0.1, 0.2],
            [0.15, 0.0, -0.05],
            [-0.2, 0.1, 0.3],
        ];
        let b = [0.01, -0.02, 0.03];
        let weights = NetworkWeights {
            input: arr2(&w_in),
            recurrent: arr2(&w_rec),
            bias: arr1(&b),
        };
        let inputs = [[0.5, -1.0], [0.25, 0.75]];

        // Independent evaluation with explicit loops.
        let mut a = [0.0f64; 3];
        for x in &inputs {
            let mut next = [0.0f64; 3];
            for r in 0..3 {
                let mut sum = b[r];
                for (c, xv) in x.iter().enumerate() {
                    sum += w_in[r][c] * xv;
                }
                for (c, av) in a.iter().enumerate() {
                    sum += w_rec[r][c] * av;
                }
                next[r] = sum.tanh();
            }
            a = next;
        }

        let mut state = reset(3);
        let mut out = Vec::new();
        for x in &inputs {
            let (next, o) = step(&weights, &state, x).unwrap();
            state = next;
            out = o;
        }
        for (lhs, rhs) in state.activations().iter().zip(&a) {
            assert!((lhs - rhs).abs() < 1e-15);
        }
        for (o, rhs) in out.iter().zip(&a) {
            assert!((o - (rhs + 1.0) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn outputs_stay_bounded_for_huge_weights() {
        let weights = NetworkWeights {
            input: arr2(&[[1e12]]),
            recurrent: arr2(&[[-1e12]]),
            bias: arr1(&[1e12]),
        };
        let (state, out) = step(&weights, &reset(1), &[1e6]).unwrap();
        assert!(state.activations()[0] > -1.0 && state.activations()[0] <= 1.0);
        assert!(out[0] >= 0.0 && out[0] <= 1.0);
    }

    #[test]
    fn non_finite_input_is_an_error() {
        let arch = NetworkArchitecture::meta(3);
        let weights = NetworkWeights::zeros(&arch);
        let mut input = vec![0.0; arch.inputs];
        input[5] = f64::NAN;
        assert!(matches!(
            step(&weights, &reset(8), &input),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn wrong_input_length_is_an_error() {
        let arch = NetworkArchitecture::meta(3);
        let weights = NetworkWeights::zeros(&arch);
        assert!(matches!(
            step(&weights, &reset(8), &[0.0; 4]),
            Err(Error::InputLength { got: 4, .. })
        ));
    }
}
