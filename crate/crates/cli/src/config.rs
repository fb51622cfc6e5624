//! Experiment configuration: a single TOML file declaring shifts, factor
//! maps, potentials, and run parameters. All references are validated up
//! front and reported together.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use factorgibbs::{FactorMap, LabeledGraph, Potential, Subshift, Word};

pub const SPEC_VERSION: u32 = 1;

/// Hard cap on |alphabet|^n_max enumeration cost, overridable with --force.
pub const ENUMERATION_BUDGET: f64 = 1e8;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub spec_version: u32,
    #[serde(default)]
    pub shifts: BTreeMap<String, ShiftSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub potentials: BTreeMap<String, PotentialSpec>,
    #[serde(default)]
    pub run: RunSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    pub kind: String,
    pub alphabet: Option<usize>,
    /// 0/1 rows for kind = "sft"
    pub transition_matrix: Option<Vec<Vec<u8>>>,
    /// presentation for kind = "sofic"
    pub labeled_graph: Option<GraphSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub states: usize,
    /// (from, symbol, to) triples
    pub edges: Vec<(usize, u8, usize)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub domain: String,
    pub codomain: String,
    /// (domain symbol, image symbol) pairs; every domain symbol exactly once
    pub symbol_map: Vec<(u8, u8)>,
    /// surjectivity verification depth (default 6)
    pub check_len: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    // single-function form
    pub shift: Option<String>,
    pub window: Option<usize>,
    /// log-values keyed by window words written as digit strings
    pub log_values: Option<BTreeMap<String, f64>>,
    // derived form: "pullback" | "fiber_quotient" | "tilt"
    pub derived: Option<String>,
    pub source: Option<String>,
    pub map: Option<String>,
    pub per_step_log: Option<f64>,
    /// certified near-multiplicativity constant for fiber quotients;
    /// scanned up to `d_scan` (default 8) when absent
    pub d: Option<f64>,
    pub d_scan: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub shift: Option<String>,
    pub potential: Option<String>,
    pub map: Option<String>,
    pub psi: Option<String>,
    /// "oracle" (default) or "approximant" for factor-gibbs
    pub measure: Option<String>,
    pub y_head: Option<Vec<u8>>,
    pub y_cycle: Option<Vec<u8>>,
    /// periodic tail cycles for u-converge (default: min and max symbol)
    pub tails: Option<Vec<Vec<u8>>>,
    pub order: Option<usize>,
    pub steps: Option<usize>,
    pub restarts: Option<usize>,
}

/// Fully resolved experiment inputs.
pub struct Resolved {
    pub shifts: BTreeMap<String, Arc<Subshift>>,
    pub maps: BTreeMap<String, Arc<FactorMap>>,
    pub potentials: BTreeMap<String, Arc<Potential>>,
    pub run: RunSpec,
}

pub fn load(path: &std::path::Path) -> Result<Resolved> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let file: ConfigFile = toml::from_str(&text).context("parsing config")?;
    resolve(file)
}

pub fn resolve(file: ConfigFile) -> Result<Resolved> {
    if file.spec_version != SPEC_VERSION {
        bail!(
            "config schema error: spec_version = {} (expected {})",
            file.spec_version,
            SPEC_VERSION
        );
    }
    let mut problems: Vec<String> = Vec::new();

    let mut shifts: BTreeMap<String, Arc<Subshift>> = BTreeMap::new();
    for (name, spec) in &file.shifts {
        match build_shift(spec) {
            Ok(s) => {
                shifts.insert(name.clone(), s);
            }
            Err(e) => problems.push(format!("shifts.{name}: {e}")),
        }
    }

    let mut maps: BTreeMap<String, Arc<FactorMap>> = BTreeMap::new();
    for (name, spec) in &file.maps {
        let domain = shifts.get(&spec.domain);
        let codomain = shifts.get(&spec.codomain);
        match (domain, codomain) {
            (Some(x), Some(y)) => match pairs_to_table(&spec.symbol_map, x.alphabet()) {
                Ok(table) => {
                    match FactorMap::new(
                        Arc::clone(x),
                        Arc::clone(y),
                        table,
                        spec.check_len.unwrap_or(6),
                    ) {
                        Ok(m) => {
                            maps.insert(name.clone(), Arc::new(m));
                        }
                        Err(e) => problems.push(format!("maps.{name}: {e}")),
                    }
                }
                Err(e) => problems.push(format!("maps.{name}.symbol_map: {e}")),
            },
            _ => {
                if domain.is_none() {
                    problems.push(format!("maps.{name}.domain: unknown shift `{}`", spec.domain));
                }
                if codomain.is_none() {
                    problems.push(format!(
                        "maps.{name}.codomain: unknown shift `{}`",
                        spec.codomain
                    ));
                }
            }
        }
    }

    let mut potentials: BTreeMap<String, Arc<Potential>> = BTreeMap::new();
    // multi-pass resolution: derived potentials depend on earlier ones
    let mut pending: Vec<&String> = file.potentials.keys().collect();
    let mut made_progress = true;
    while made_progress && !pending.is_empty() {
        made_progress = false;
        pending.retain(|name| {
            let spec = &file.potentials[*name];
            match build_potential(spec, &shifts, &maps, &potentials) {
                Ok(Some(p)) => {
                    potentials.insert((*name).clone(), p);
                    made_progress = true;
                    false
                }
                Ok(None) => true, // dependency not ready yet
                Err(e) => {
                    problems.push(format!("potentials.{name}: {e}"));
                    made_progress = true;
                    false
                }
            }
        });
    }
    for name in pending {
        problems.push(format!(
            "potentials.{name}: unresolved dependency (missing or cyclic `source`)"
        ));
    }

    if !problems.is_empty() {
        bail!("config schema error:\n  {}", problems.join("\n  "));
    }
    Ok(Resolved {
        shifts,
        maps,
        potentials,
        run: file.run,
    })
}

fn build_shift(spec: &ShiftSpec) -> Result<Arc<Subshift>> {
    match spec.kind.as_str() {
        "full" => {
            let k = spec
                .alphabet
                .ok_or_else(|| anyhow!("full shift needs `alphabet`"))?;
            Ok(Subshift::full(k)?)
        }
        "sft" => {
            let m = spec
                .transition_matrix
                .as_ref()
                .ok_or_else(|| anyhow!("sft needs `transition_matrix`"))?;
            Ok(Subshift::sft(m)?)
        }
        "sofic" => {
            let graph = spec
                .labeled_graph
                .as_ref()
                .ok_or_else(|| anyhow!("sofic needs `labeled_graph`"))?;
            let alphabet = spec
                .alphabet
                .ok_or_else(|| anyhow!("sofic needs `alphabet`"))?;
            Ok(Subshift::sofic(
                LabeledGraph {
                    num_states: graph.states,
                    edges: graph.edges.clone(),
                },
                alphabet,
            )?)
        }
        other => bail!("unknown kind `{other}` (full | sft | sofic)"),
    }
}

fn build_potential(
    spec: &PotentialSpec,
    shifts: &BTreeMap<String, Arc<Subshift>>,
    maps: &BTreeMap<String, Arc<FactorMap>>,
    done: &BTreeMap<String, Arc<Potential>>,
) -> Result<Option<Arc<Potential>>> {
    match (&spec.derived, &spec.log_values) {
        (None, Some(values)) => {
            let shift_name = spec
                .shift
                .as_ref()
                .ok_or_else(|| anyhow!("single potential needs `shift`"))?;
            let shift = shifts
                .get(shift_name)
                .ok_or_else(|| anyhow!("unknown shift `{shift_name}`"))?;
            let window = spec.window.unwrap_or(1);
            let mut entries = Vec::with_capacity(values.len());
            for (key, &v) in values {
                let word = Word::parse(key)
                    .ok_or_else(|| anyhow!("bad word key `{key}` in log_values"))?;
                entries.push((word, v));
            }
            Ok(Some(Potential::single(Arc::clone(shift), window, &entries)?))
        }
        (Some(kind), None) => {
            let source_name = spec
                .source
                .as_ref()
                .ok_or_else(|| anyhow!("derived potential needs `source`"))?;
            let Some(source) = done.get(source_name) else {
                return Ok(None);
            };
            match kind.as_str() {
                "pullback" => {
                    let map = lookup_map(spec, maps)?;
                    Ok(Some(Potential::pullback(Arc::clone(source), map)?))
                }
                "fiber_quotient" => {
                    let map = lookup_map(spec, maps)?;
                    let d = match spec.d {
                        Some(d) => d,
                        None => {
                            map.check_condition_a(spec.d_scan.unwrap_or(8))?
                                .best_d
                        }
                    };
                    Ok(Some(Potential::fiber_quotient(
                        Arc::clone(source),
                        map,
                        Some(d),
                    )?))
                }
                "tilt" => {
                    let delta = spec
                        .per_step_log
                        .ok_or_else(|| anyhow!("tilt needs `per_step_log`"))?;
                    Ok(Some(source.tilt(delta)))
                }
                other => bail!("unknown derived kind `{other}` (pullback | fiber_quotient | tilt)"),
            }
        }
        (Some(_), Some(_)) => bail!("give either `derived` or `log_values`, not both"),
        (None, None) => bail!("potential needs `log_values` or `derived`"),
    }
}

fn lookup_map(
    spec: &PotentialSpec,
    maps: &BTreeMap<String, Arc<FactorMap>>,
) -> Result<Arc<FactorMap>> {
    let name = spec
        .map
        .as_ref()
        .ok_or_else(|| anyhow!("derived potential needs `map`"))?;
    maps.get(name)
        .cloned()
        .ok_or_else(|| anyhow!("unknown map `{name}`"))
}

/// Expand (symbol, image) pairs into a dense per-symbol table.
fn pairs_to_table(pairs: &[(u8, u8)], alphabet: usize) -> Result<Vec<u8>> {
    let mut table = vec![None; alphabet];
    for &(s, img) in pairs {
        let slot = table
            .get_mut(s as usize)
            .ok_or_else(|| anyhow!("symbol {s} outside the domain alphabet of size {alphabet}"))?;
        if slot.is_some() {
            bail!("symbol {s} mapped twice");
        }
        *slot = Some(img);
    }
    table
        .into_iter()
        .enumerate()
        .map(|(s, img)| img.ok_or_else(|| anyhow!("symbol {s} has no image")))
        .collect()
}

impl Resolved {
    pub fn shift(&self, name: &str) -> Result<&Arc<Subshift>> {
        self.shifts
            .get(name)
            .ok_or_else(|| anyhow!("run references unknown shift `{name}`"))
    }

    pub fn map(&self, name: &str) -> Result<&Arc<FactorMap>> {
        self.maps
            .get(name)
            .ok_or_else(|| anyhow!("run references unknown map `{name}`"))
    }

    pub fn potential(&self, name: &str) -> Result<&Arc<Potential>> {
        self.potentials
            .get(name)
            .ok_or_else(|| anyhow!("run references unknown potential `{name}`"))
    }
}
