//! Seeded pseudo-random registry documents for property tests and quick
//! experiments.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub seed: u64,
    pub n_services: usize,
    pub n_params: usize,
    /// Upper bound on a service's input count; inputs may be empty.
    pub max_inputs: usize,
    /// Upper bound on a service's output count; at least one output always.
    pub max_outputs: usize,
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            seed: 0,
            n_services: 10,
            n_params: 8,
            max_inputs: 3,
            max_outputs: 3,
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("n_params must be positive")]
    NoParameters,
}

#[derive(Serialize)]
struct GenDoc {
    parameters: Vec<String>,
    services: Vec<GenService>,
}

#[derive(Serialize)]
struct GenService {
    id: String,
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

/// Produce a registry document that always passes validation. Identical
/// spec, identical bytes.
pub fn generate_registry_doc(spec: &GenSpec) -> Result<String, GenError> {
    if spec.n_params == 0 {
        return Err(GenError::NoParameters);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let parameters: Vec<String> = (1..=spec.n_params).map(|i| format!("p{i}")).collect();
    let mut services = Vec::with_capacity(spec.n_services);
    for i in 1..=spec.n_services {
        let n_in = rng.gen_range(0..=spec.max_inputs.min(spec.n_params));
        let n_out = rng.gen_range(1..=spec.max_outputs.clamp(1, spec.n_params));
        let pick = |rng: &mut ChaCha8Rng, n: usize| -> Vec<String> {
            let mut idx = sample(rng, spec.n_params, n).into_vec();
            idx.sort_unstable();
            idx.iter().map(|j| parameters[*j].clone()).collect()
        };
        let inputs = pick(&mut rng, n_in);
        let outputs = pick(&mut rng, n_out);
        services.push(GenService {
            id: format!("ws{i}"),
            name: format!("Service{i}"),
            inputs,
            outputs,
        });
    }
    let doc = GenDoc {
        parameters,
        services,
    };
    Ok(serde_json::to_string_pretty(&doc).expect("generated document serializes"))
}
