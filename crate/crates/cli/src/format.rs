//! JSON instance and scheme files.
//!
//! Floats are written in the shortest form that parses back to the same
//! `f64`, so saving and reloading is bit-exact.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use persuasion_core::exact::{expand_product, ProductPrior};
use persuasion_core::profile::{profile_count, profile_index, DEFAULT_STATE_CAP};
use persuasion_core::{DirectScheme, ExplicitInstance, IidInstance, IndependentInstance, Marginal, State};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub prob: f64,
    pub sender: Vec<f64>,
    pub receiver: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalRecord {
    pub q: Vec<f64>,
    pub xi: Vec<f64>,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceFile {
    Explicit {
        actions: usize,
        states: Vec<StateRecord>,
    },
    Iid {
        actions: usize,
        types: usize,
        q: Vec<f64>,
        xi: Vec<f64>,
        rho: Vec<f64>,
    },
    Independent {
        marginals: Vec<MarginalRecord>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindTag {
    Explicit,
    Iid,
    Independent,
}

/// Flat reading form of [`InstanceFile`]. An internally tagged enum would
/// buffer its input and lose the field path and line of parse errors.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstanceFile {
    kind: KindTag,
    actions: Option<usize>,
    states: Option<Vec<StateRecord>>,
    types: Option<usize>,
    q: Option<Vec<f64>>,
    xi: Option<Vec<f64>>,
    rho: Option<Vec<f64>>,
    marginals: Option<Vec<MarginalRecord>>,
}

impl RawInstanceFile {
    fn into_file(self) -> anyhow::Result<InstanceFile> {
        fn need<T>(v: Option<T>, field: &str, kind: &str) -> anyhow::Result<T> {
            v.ok_or_else(|| anyhow!("missing field `{field}` for kind `{kind}`"))
        }
        let reject = |present: &[(&str, bool)], kind: &str| -> anyhow::Result<()> {
            match present.iter().find(|(_, p)| *p) {
                Some((f, _)) => bail!("field `{f}` does not belong to kind `{kind}`"),
                None => Ok(()),
            }
        };
        let Self { kind, actions, states, types, q, xi, rho, marginals } = self;
        Ok(match kind {
            KindTag::Explicit => {
                reject(
                    &[("types", types.is_some()), ("q", q.is_some()), ("xi", xi.is_some()), ("rho", rho.is_some()), ("marginals", marginals.is_some())],
                    "explicit",
                )?;
                InstanceFile::Explicit { actions: need(actions, "actions", "explicit")?, states: need(states, "states", "explicit")? }
            }
            KindTag::Iid => {
                reject(&[("states", states.is_some()), ("marginals", marginals.is_some())], "iid")?;
                InstanceFile::Iid {
                    actions: need(actions, "actions", "iid")?,
                    types: need(types, "types", "iid")?,
                    q: need(q, "q", "iid")?,
                    xi: need(xi, "xi", "iid")?,
                    rho: need(rho, "rho", "iid")?,
                }
            }
            KindTag::Independent => {
                reject(
                    &[("actions", actions.is_some()), ("states", states.is_some()), ("types", types.is_some()), ("q", q.is_some()), ("xi", xi.is_some()), ("rho", rho.is_some())],
                    "independent",
                )?;
                InstanceFile::Independent { marginals: need(marginals, "marginals", "independent")? }
            }
        })
    }
}

/// Parses an instance file's text.
pub fn parse_instance(text: &str) -> anyhow::Result<Instance> {
    parse::<RawInstanceFile>(text)?.into_file()?.into_instance()
}

/// A validated instance of any kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Explicit(ExplicitInstance),
    Iid(IidInstance),
    Independent(IndependentInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Explicit(_) => "explicit",
            Instance::Iid(_) => "iid",
            Instance::Independent(_) => "independent",
        }
    }

    pub fn actions(&self) -> usize {
        match self {
            Instance::Explicit(e) => e.actions(),
            Instance::Iid(i) => i.actions(),
            Instance::Independent(i) => i.actions(),
        }
    }

    /// The explicit form: the instance itself, or its profile expansion.
    pub fn explicit(&self) -> anyhow::Result<ExplicitInstance> {
        Ok(match self {
            Instance::Explicit(e) => e.clone(),
            Instance::Iid(i) => expand_product(i)?,
            Instance::Independent(i) => expand_product(i)?,
        })
    }

    /// Labels of the explicit states, in order: `[k]` for explicit
    /// instances, the type profile otherwise.
    pub fn state_labels(&self) -> anyhow::Result<Vec<Vec<usize>>> {
        match self {
            Instance::Explicit(e) => Ok((0..e.state_count()).map(|k| vec![k]).collect()),
            Instance::Iid(i) => product_labels(i),
            Instance::Independent(i) => product_labels(i),
        }
    }

    /// Index of the explicit state with this label.
    pub fn state_index(&self, label: &[usize]) -> anyhow::Result<usize> {
        let check = |radices: Vec<usize>| -> anyhow::Result<usize> {
            if label.len() != radices.len() || label.iter().zip(&radices).any(|(t, r)| t >= r) {
                bail!("state {label:?} is not a type profile with radices {radices:?}");
            }
            Ok(profile_index(&radices, label))
        };
        match self {
            Instance::Explicit(e) => match label {
                [k] if *k < e.state_count() => Ok(*k),
                _ => bail!("state {label:?} is not one of the {} explicit states", e.state_count()),
            },
            Instance::Iid(i) => check(i.radices()),
            Instance::Independent(i) => check(i.radices()),
        }
    }
}

fn product_labels<P: ProductPrior>(p: &P) -> anyhow::Result<Vec<Vec<usize>>> {
    let radices = p.radices();
    profile_count(&radices, DEFAULT_STATE_CAP)?;
    Ok(persuasion_core::profile::Profiles::new(&radices).collect())
}

impl InstanceFile {
    pub fn into_instance(self) -> anyhow::Result<Instance> {
        Ok(match self {
            InstanceFile::Explicit { actions, states } => {
                let states = states
                    .into_iter()
                    .map(|s| State { prob: s.prob, sender: s.sender, receiver: s.receiver })
                    .collect();
                Instance::Explicit(ExplicitInstance::new(actions, states)?)
            }
            InstanceFile::Iid { actions, types, q, xi, rho } => {
                if q.len() != types {
                    bail!("field `types` is {types} but `q` has {} entries", q.len());
                }
                Instance::Iid(IidInstance::new(actions, q, xi, rho)?)
            }
            InstanceFile::Independent { marginals } => Instance::Independent(IndependentInstance::new(
                marginals
                    .into_iter()
                    .map(|m| Marginal { q: m.q, xi: m.xi, rho: m.rho })
                    .collect(),
            )?),
        })
    }
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        match inst {
            Instance::Explicit(e) => InstanceFile::Explicit {
                actions: e.actions(),
                states: e
                    .states()
                    .iter()
                    .map(|s| StateRecord { prob: s.prob, sender: s.sender.clone(), receiver: s.receiver.clone() })
                    .collect(),
            },
            Instance::Iid(i) => InstanceFile::Iid {
                actions: i.actions(),
                types: i.types(),
                q: i.q().to_vec(),
                xi: i.xi().to_vec(),
                rho: i.rho().to_vec(),
            },
            Instance::Independent(i) => InstanceFile::Independent {
                marginals: i
                    .marginals()
                    .iter()
                    .map(|m| MarginalRecord { q: m.q.clone(), xi: m.xi.clone(), rho: m.rho.clone() })
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SSignatureRecord {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcReport {
    pub min_slack: f64,
    pub epsilon_certified: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub method: String,
    /// Expected sender utility of the scheme.
    pub value: f64,
    pub epsilon: f64,
    /// Upper bound from a relaxation, when the method has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_bound: Option<f64>,
    /// `phi[k]` is the signal distribution at `states[k]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_signature: Option<SSignatureRecord>,
    pub ic_report: IcReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SchemeFile {
    /// The scheme as a direct scheme over the instance's explicit states in
    /// canonical order, if the file carries one.
    pub fn direct(&self, inst: &Instance) -> anyhow::Result<Option<DirectScheme>> {
        let Some(phi) = &self.phi else { return Ok(None) };
        let labels = self.states.as_ref().ok_or_else(|| anyhow!("field `phi` needs `states`"))?;
        if labels.len() != phi.len() {
            bail!("`states` has {} entries but `phi` has {} rows", labels.len(), phi.len());
        }
        let count = inst.state_labels()?.len();
        if phi.len() != count {
            bail!("`phi` has {} rows but the instance has {count} states", phi.len());
        }
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; count];
        for (label, row) in labels.iter().zip(phi) {
            let k = inst.state_index(label)?;
            if rows[k].replace(row.clone()).is_some() {
                bail!("state {label:?} appears twice in `states`");
            }
        }
        Ok(Some(DirectScheme::new(rows.into_iter().map(|r| r.expect("bijection")).collect())?))
    }
}

/// Parses JSON, naming the offending field and line on failure.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> anyhow::Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            anyhow!("{inner}")
        } else {
            anyhow!("field `{path}`: {inner}")
        }
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("in instance file {}", path.display()))
}

pub fn save_instance(path: &Path, inst: &Instance) -> anyhow::Result<()> {
    fs::write(path, to_json(&InstanceFile::from(inst))).with_context(|| format!("writing {}", path.display()))
}

pub fn load_scheme(path: &Path) -> anyhow::Result<SchemeFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in scheme file {}", path.display()))
}

pub fn save_scheme(path: &Path, scheme: &SchemeFile) -> anyhow::Result<()> {
    fs::write(path, to_json(scheme)).with_context(|| format!("writing {}", path.display()))
}
