// SPDX-License-Identifier: Apache-2.0

//! JSON instance files and series manifests.

use super::{Component, MipInstance, ModelError, Row, Sense};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    /// Only `"min"` is accepted; the key may be omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective_sense: Option<String>,
    vars: Vec<VarEntry>,
    rows: Vec<RowEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VarEntry {
    name: String,
    #[serde(with = "crate::serde_ext")]
    lb: f64,
    #[serde(with = "crate::serde_ext")]
    ub: f64,
    integer: bool,
    obj: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowEntry {
    name: String,
    coefs: IndexMap<String, f64>,
    sense: Sense,
    rhs: f64,
}

pub fn parse_instance(text: &str, origin: &str) -> Result<MipInstance, ModelError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        origin: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if let Some(sense) = &file.objective_sense {
        if !sense.eq_ignore_ascii_case("min") && !sense.eq_ignore_ascii_case("minimize") {
            return Err(ModelError::Maximization);
        }
    }
    let n = file.vars.len();
    let mut names = Vec::with_capacity(n);
    let mut objective = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut integer = Vec::with_capacity(n);
    let mut index = std::collections::HashMap::with_capacity(n);
    for (j, v) in file.vars.into_iter().enumerate() {
        if index.insert(v.name.clone(), j).is_some() {
            return Err(ModelError::DuplicateVariable(v.name));
        }
        names.push(v.name);
        objective.push(v.obj);
        lower.push(v.lb);
        upper.push(v.ub);
        integer.push(v.integer);
    }
    let mut rows = Vec::with_capacity(file.rows.len());
    for r in file.rows {
        let mut coefs = Vec::with_capacity(r.coefs.len());
        for (var, a) in r.coefs {
            let Some(&j) = index.get(&var) else {
                return Err(ModelError::UnknownVariable { row: r.name, var });
            };
            coefs.push((j, a));
        }
        rows.push(Row::new(r.name, coefs, r.sense, r.rhs));
    }
    MipInstance::new(file.name, names, objective, lower, upper, integer, rows)
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<MipInstance, ModelError> {
    let path = path.as_ref();
    let text = read(path)?;
    parse_instance(&text, &path.display().to_string())
}

pub fn instance_to_json(inst: &MipInstance) -> String {
    let file = InstanceFile {
        name: inst.name.clone(),
        objective_sense: None,
        vars: (0..inst.num_vars())
            .map(|j| VarEntry {
                name: inst.var_names[j].clone(),
                lb: inst.lower[j],
                ub: inst.upper[j],
                integer: inst.integer[j],
                obj: inst.objective[j],
            })
            .collect(),
        rows: inst
            .rows
            .iter()
            .map(|r| RowEntry {
                name: r.name.clone(),
                coefs: r
                    .coefs
                    .iter()
                    .map(|&(j, a)| (inst.var_names[j].clone(), a))
                    .collect(),
                sense: r.sense,
                rhs: r.rhs,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serializes");
    s.push('\n');
    s
}

pub fn write_instance(inst: &MipInstance, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(inst)).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesManifest {
    pub series_name: String,
    pub time_limit: f64,
    pub changing: BTreeSet<Component>,
    pub instances: Vec<PathBuf>,
}

impl SeriesManifest {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.instances.is_empty() {
            return Err(ModelError::EmptySeries);
        }
        if !(self.time_limit > 0.0) {
            return Err(ModelError::NonPositiveTimeLimit(self.time_limit));
        }
        if self.changing.is_empty() {
            return Err(ModelError::NoChangingComponents);
        }
        Ok(())
    }

    pub fn objective_only(&self) -> bool {
        self.changing.len() == 1 && self.changing.contains(&Component::Objective)
    }
}

/// A validated manifest whose instances are read on demand.
#[derive(Debug, Clone)]
pub struct Series {
    pub manifest: SeriesManifest,
    base_dir: PathBuf,
}

impl Series {
    pub fn len(&self) -> usize {
        self.manifest.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.instances.is_empty()
    }

    pub fn instance_path(&self, index: usize) -> PathBuf {
        self.base_dir.join(&self.manifest.instances[index])
    }

    pub fn load_instance(&self, index: usize) -> Result<MipInstance, ModelError> {
        load_instance(self.instance_path(index))
    }
}

/// Reads a manifest, checks that every instance exists and that all
/// instances declare the same set of variable names.
pub fn load_series(path: impl AsRef<Path>) -> Result<Series, ModelError> {
    let path = path.as_ref();
    let text = read(path)?;
    let manifest: SeriesManifest = serde_json::from_str(&text).map_err(|e| ModelError::Parse {
        origin: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    manifest.validate()?;
    let series = Series {
        manifest,
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    for i in 0..series.len() {
        let p = series.instance_path(i);
        if !p.is_file() {
            return Err(ModelError::MissingFile(p));
        }
    }
    let first = series.load_instance(0)?;
    let reference: BTreeSet<&str> = first.var_names.iter().map(String::as_str).collect();
    for i in 1..series.len() {
        let inst = series.load_instance(i)?;
        let names: BTreeSet<&str> = inst.var_names.iter().map(String::as_str).collect();
        if names != reference {
            let detail = match reference.difference(&names).next() {
                Some(missing) => format!("`{missing}` is absent from the later instance"),
                None => {
                    let extra = names.difference(&reference).next().unwrap();
                    format!("`{extra}` is not present in the first instance")
                }
            };
            return Err(ModelError::VariableSetMismatch {
                first: series.instance_path(0).display().to_string(),
                other: series.instance_path(i).display().to_string(),
                detail,
            });
        }
    }
    Ok(series)
}

/// Writes `instances` as `instance_NNN.json` plus `manifest.json` into `dir`
/// and returns the manifest path.
pub fn write_series(
    dir: impl AsRef<Path>,
    series_name: &str,
    time_limit: f64,
    changing: &BTreeSet<Component>,
    instances: &[MipInstance],
) -> Result<PathBuf, ModelError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| ModelError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::with_capacity(instances.len());
    for (i, inst) in instances.iter().enumerate() {
        let rel = PathBuf::from(format!("instance_{i:03}.json"));
        write_instance(inst, dir.join(&rel))?;
        paths.push(rel);
    }
    let manifest = SeriesManifest {
        series_name: series_name.to_string(),
        time_limit,
        changing: changing.clone(),
        instances: paths,
    };
    manifest.validate()?;
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|source| ModelError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn read(path: &Path) -> Result<String, ModelError> {
    if !path.exists() {
        return Err(ModelError::MissingFile(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })
}
