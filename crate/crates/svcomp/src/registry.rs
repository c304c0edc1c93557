//! Service registry: parameter normalization, loading, validation and the
//! producer/consumer index used to restrict candidate lookups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

/// A normalized parameter name. Comparison, ordering and hashing use only
/// the canonical key, so `HotelCost` and `Hotelcost` are the same parameter.
#[derive(Debug, Clone)]
pub struct ParameterSymbol {
    canonical: String,
    display: String,
}

impl ParameterSymbol {
    pub fn canonical(&self) -> &str {
        &self.canonical
    }

    pub fn display(&self) -> &str {
        &self.display
    }
}

impl PartialEq for ParameterSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

impl Eq for ParameterSymbol {}

impl PartialOrd for ParameterSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ParameterSymbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical.cmp(&other.canonical)
    }
}

impl std::hash::Hash for ParameterSymbol {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.canonical.hash(state);
    }
}

impl fmt::Display for ParameterSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

/// Ordered set of parameters; `BTreeSet` keeps every downstream iteration
/// deterministic.
pub type ParamSet = BTreeSet<ParameterSymbol>;

/// Trim and case-fold a raw parameter name.
pub fn normalize_param(raw: &str) -> Result<ParameterSymbol, RegistryError> {
    let display = raw.trim();
    if display.is_empty() {
        return Err(RegistryError::EmptyParameterName);
    }
    Ok(ParameterSymbol {
        canonical: display.to_lowercase(),
        display: display.to_string(),
    })
}

/// Unique service identifier within a registry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ServiceId(String);

impl ServiceId {
    pub fn new(id: impl Into<String>) -> Self {
        ServiceId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ServiceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ServiceId {
    fn from(s: &str) -> Self {
        ServiceId(s.to_string())
    }
}

/// One web service: identity plus its input and output parameter sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceDescriptor {
    pub id: ServiceId,
    pub name: String,
    pub inputs: ParamSet,
    pub outputs: ParamSet,
}

/// Maps each parameter to the services producing it (`by_output`) and the
/// services consuming it (`by_input`). Built once at load time.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProducerIndex {
    by_output: BTreeMap<ParameterSymbol, BTreeSet<ServiceId>>,
    by_input: BTreeMap<ParameterSymbol, BTreeSet<ServiceId>>,
}

impl ProducerIndex {
    pub fn producers_of(&self, param: &ParameterSymbol) -> Option<&BTreeSet<ServiceId>> {
        self.by_output.get(param)
    }

    pub fn consumers_of(&self, param: &ParameterSymbol) -> Option<&BTreeSet<ServiceId>> {
        self.by_input.get(param)
    }
}

/// Single pass over validated services.
pub fn build_producer_index(services: &[ServiceDescriptor]) -> ProducerIndex {
    let mut index = ProducerIndex::default();
    for svc in services {
        for p in &svc.outputs {
            index
                .by_output
                .entry(p.clone())
                .or_default()
                .insert(svc.id.clone());
        }
        for p in &svc.inputs {
            index
                .by_input
                .entry(p.clone())
                .or_default()
                .insert(svc.id.clone());
        }
    }
    index
}

/// The service universe: parameters, services in ascending id order, and the
/// producer index. Immutable after load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    parameters: ParamSet,
    services: Vec<ServiceDescriptor>,
    index: ProducerIndex,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("parameter name is empty or whitespace-only")]
    EmptyParameterName,
    #[error("service `{service}`: empty parameter name in field `{field}`")]
    EmptyParameterIn { service: String, field: &'static str },
    #[error("duplicate service id `{0}`")]
    DuplicateServiceId(String),
    #[error("service `{0}` declares no outputs")]
    NoOutputs(String),
    #[error("service `{service}` uses parameter `{parameter}` missing from the declared parameter list")]
    UndeclaredParameter { service: String, parameter: String },
    #[error("malformed registry document: {0}")]
    Malformed(#[from] serde_json::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryDoc {
    #[serde(default)]
    parameters: Option<Vec<String>>,
    services: Vec<ServiceDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceDoc {
    id: String,
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

impl Registry {
    /// Parse and validate a registry document (JSON, see the book for the
    /// schema). Loading the same bytes twice yields identical registries.
    pub fn from_json(document: &str) -> Result<Registry, RegistryError> {
        let doc: RegistryDoc = serde_json::from_str(document)?;
        let mut services = Vec::with_capacity(doc.services.len());
        for svc in &doc.services {
            let norm_set = |raw: &[String], field: &'static str| -> Result<ParamSet, RegistryError> {
                raw.iter()
                    .map(|r| {
                        normalize_param(r).map_err(|_| RegistryError::EmptyParameterIn {
                            service: svc.id.clone(),
                            field,
                        })
                    })
                    .collect()
            };
            services.push(ServiceDescriptor {
                id: ServiceId::new(svc.id.clone()),
                name: svc.name.clone(),
                inputs: norm_set(&svc.inputs, "inputs")?,
                outputs: norm_set(&svc.outputs, "outputs")?,
            });
        }
        let declared = match doc.parameters {
            Some(raw) => Some(
                raw.iter()
                    .map(|r| normalize_param(r))
                    .collect::<Result<ParamSet, _>>()?,
            ),
            None => None,
        };
        Registry::from_services_with_declared(services, declared)
    }

    pub fn from_services(services: Vec<ServiceDescriptor>) -> Result<Registry, RegistryError> {
        Registry::from_services_with_declared(services, None)
    }

    fn from_services_with_declared(
        mut services: Vec<ServiceDescriptor>,
        declared: Option<ParamSet>,
    ) -> Result<Registry, RegistryError> {
        services.sort_by(|a, b| a.id.cmp(&b.id));
        let mut seen = BTreeSet::new();
        for svc in &services {
            if !seen.insert(svc.id.clone()) {
                return Err(RegistryError::DuplicateServiceId(svc.id.to_string()));
            }
            if svc.outputs.is_empty() {
                return Err(RegistryError::NoOutputs(svc.id.to_string()));
            }
        }
        let used: ParamSet = services
            .iter()
            .flat_map(|s| s.inputs.iter().chain(s.outputs.iter()))
            .cloned()
            .collect();
        let parameters = match declared {
            Some(declared) => {
                for svc in &services {
                    for p in svc.inputs.iter().chain(svc.outputs.iter()) {
                        if !declared.contains(p) {
                            return Err(RegistryError::UndeclaredParameter {
                                service: svc.id.to_string(),
                                parameter: p.canonical().to_string(),
                            });
                        }
                    }
                }
                declared
            }
            None => used,
        };
        let index = build_producer_index(&services);
        Ok(Registry {
            parameters,
            services,
            index,
        })
    }

    pub fn parameters(&self) -> &ParamSet {
        &self.parameters
    }

    pub fn services(&self) -> &[ServiceDescriptor] {
        &self.services
    }

    pub fn index(&self) -> &ProducerIndex {
        &self.index
    }

    pub fn get(&self, id: &ServiceId) -> Option<&ServiceDescriptor> {
        self.services
            .binary_search_by(|s| s.id.cmp(id))
            .ok()
            .map(|i| &self.services[i])
    }

    /// Classify every candidate producer of a desired parameter into the
    /// exact / super / partial buckets, each sorted ascending by id.
    pub fn find_matching_services(&self, desired: &ParamSet) -> MatchLists {
        assert!(!desired.is_empty(), "desired output set must be non-empty");
        let mut candidates: BTreeSet<&ServiceId> = BTreeSet::new();
        for p in desired {
            if let Some(ids) = self.index.producers_of(p) {
                candidates.extend(ids.iter());
            }
        }
        let mut lists = MatchLists::default();
        for id in candidates {
            let svc = self.get(id).expect("index refers to known service");
            match classify_match(&svc.outputs, desired) {
                MatchClass::Exact => lists.exact.push(id.clone()),
                MatchClass::Super => lists.superset.push(id.clone()),
                MatchClass::Partial => lists.partial.push(id.clone()),
                MatchClass::None => {}
            }
        }
        lists
    }
}

/// How one service's output set relates to a desired output set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchClass {
    /// outputs = desired
    Exact,
    /// outputs ⊋ desired
    Super,
    /// outputs overlap desired without containing it
    Partial,
    /// outputs disjoint from desired
    None,
}

/// Exactly one class holds for any (outputs, desired) pair.
pub fn classify_match(outputs: &ParamSet, desired: &ParamSet) -> MatchClass {
    assert!(!desired.is_empty(), "desired output set must be non-empty");
    if outputs == desired {
        MatchClass::Exact
    } else if desired.is_subset(outputs) {
        MatchClass::Super
    } else if outputs.is_disjoint(desired) {
        MatchClass::None
    } else {
        MatchClass::Partial
    }
}

/// Candidate ids per match class, each list sorted ascending by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchLists {
    pub exact: Vec<ServiceId>,
    pub superset: Vec<ServiceId>,
    pub partial: Vec<ServiceId>,
}

/// A composition request: initial inputs and desired outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub inputs: ParamSet,
    pub outputs: ParamSet,
}

impl Query {
    pub fn new(inputs: ParamSet, outputs: ParamSet) -> Query {
        Query { inputs, outputs }
    }
}
