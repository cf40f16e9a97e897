//! Run configuration: parsing, reference resolution and itemized validation.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use pue_core::{
    hat_partition, make_cylinder_partition, make_smoothed_partition, IntervalSystem, LocallyConstantFunction,
    PartitionOfUnity, Potential, SampledFunction, ShiftMeasure, StructureInput, SubshiftSystem, Word, DEFAULT_GRID,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const TASKS: [&str; 6] = ["entropy", "pressure", "conditional", "tail", "structure", "product-check"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub task: String,
    #[serde(default)]
    pub horizon: Option<usize>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub format: Option<Format>,
    /// Error-bar threshold above which interval estimates are flagged.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub system: Option<SystemSpec>,
    #[serde(default)]
    pub second_system: Option<SystemSpec>,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureSpec>,
    #[serde(default)]
    pub partitions: BTreeMap<String, PartitionSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub measure: Option<String>,
    #[serde(default)]
    pub partition: Option<String>,
    #[serde(default)]
    pub condition: Option<String>,
    #[serde(default)]
    pub second_measure: Option<String>,
    #[serde(default)]
    pub second_partition: Option<String>,
    #[serde(default)]
    pub structure: Option<StructureSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemSpec {
    Full {
        alphabet_size: usize,
    },
    Golden,
    Sft {
        alphabet_size: usize,
        #[serde(default)]
        forbidden_pairs: Vec<(usize, usize)>,
    },
    Doubling {
        #[serde(default)]
        grid: Option<usize>,
    },
    Pwl {
        breakpoints: Vec<f64>,
        slopes: Vec<f64>,
        #[serde(default)]
        grid: Option<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    Bernoulli {
        p: Vec<f64>,
    },
    Markov {
        #[serde(rename = "P")]
        transition: Vec<Vec<f64>>,
        #[serde(default)]
        stationary: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PartitionSpec {
    Cylinder {
        depth: usize,
    },
    Smoothed {
        depth: usize,
        lambda: f64,
    },
    /// One word-keyed table per member; missing words read as 0.
    Explicit {
        depth: usize,
        values: Vec<BTreeMap<String, f64>>,
    },
    /// `members` hat functions on the interval grid.
    Hats {
        members: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Cylinder {
        depths: Vec<usize>,
    },
    Smoothed {
        depths: Vec<usize>,
        lambda: f64,
    },
    /// Named entries of `partitions`, coarsest first.
    Members {
        names: Vec<String>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Constant {
        value: f64,
    },
    /// `value` on the cylinder of `word`, 0 elsewhere.
    Cylinder {
        word: String,
        value: f64,
    },
    /// Word-keyed values at `depth`; missing words read as 0.
    Table {
        depth: usize,
        values: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureSpec {
    #[serde(flatten)]
    pub input: StructureInput,
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub h_star: Option<f64>,
    /// Candidate superenvelopes checked against the candidate.
    #[serde(default)]
    pub envelopes: Vec<Vec<f64>>,
}

fn default_gammas() -> Vec<f64> {
    vec![0.05, 0.1]
}

fn default_max_iter() -> usize {
    32
}

/// Reads a TOML spec, or JSON when the extension is `.json`.
pub fn load(path: &Path) -> Result<RunSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse(&text, path.extension().is_some_and(|e| e == "json"))
}

pub fn parse(text: &str, json: bool) -> Result<RunSpec, CliError> {
    let parsed = if json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Validation(vec![e.trim().to_string()]))
}

/// The system a spec runs on.
#[derive(Debug, Clone)]
pub enum System {
    Shift(Arc<SubshiftSystem>),
    Interval { map: IntervalSystem, grid: usize },
}

impl SystemSpec {
    pub fn build(&self) -> Result<System, String> {
        let shift = |s: pue_core::Result<SubshiftSystem>| s.map(|s| System::Shift(Arc::new(s))).map_err(|e| e.to_string());
        match self {
            SystemSpec::Full { alphabet_size } => shift(SubshiftSystem::full_shift(*alphabet_size)),
            SystemSpec::Golden => Ok(System::Shift(Arc::new(SubshiftSystem::golden_mean()))),
            SystemSpec::Sft { alphabet_size, forbidden_pairs } => shift(SubshiftSystem::new(*alphabet_size, forbidden_pairs)),
            SystemSpec::Doubling { grid } => Ok(System::Interval {
                map: IntervalSystem::doubling(),
                grid: grid.unwrap_or(DEFAULT_GRID),
            }),
            SystemSpec::Pwl { breakpoints, slopes, grid } => IntervalSystem::piecewise_linear(breakpoints.clone(), slopes.clone())
                .map(|map| System::Interval { map, grid: grid.unwrap_or(DEFAULT_GRID) })
                .map_err(|e| e.to_string()),
        }
    }
}

fn shift_of(system: &System, what: &str) -> Result<Arc<SubshiftSystem>, String> {
    match system {
        System::Shift(s) => Ok(s.clone()),
        System::Interval { .. } => Err(format!("{what} needs a shift system, not an interval map")),
    }
}

fn parse_table(table: &BTreeMap<String, f64>) -> Result<HashMap<Word, f64>, String> {
    table
        .iter()
        .map(|(w, v)| Word::parse(w).map(|w| (w, *v)).map_err(|e| e.to_string()))
        .collect()
}

impl MeasureSpec {
    pub fn build(&self, system: &System) -> Result<ShiftMeasure, String> {
        let s = shift_of(system, "a measure")?;
        match self {
            MeasureSpec::Bernoulli { p } => ShiftMeasure::bernoulli(s, p.clone()),
            MeasureSpec::Markov { transition, stationary } => ShiftMeasure::markov(s, transition.clone(), stationary.clone()),
        }
        .map_err(|e| e.to_string())
    }
}

/// A partition on either kind of system.
#[derive(Debug, Clone)]
pub enum Partition {
    Shift(PartitionOfUnity),
    Interval(Vec<SampledFunction>),
}

impl PartitionSpec {
    pub fn build(&self, system: &System) -> Result<Partition, String> {
        match (self, system) {
            (PartitionSpec::Hats { members }, System::Interval { grid, .. }) => {
                hat_partition(*members, *grid).map(Partition::Interval).map_err(|e| e.to_string())
            }
            (PartitionSpec::Hats { .. }, System::Shift(_)) => Err("hat partitions need an interval map".into()),
            (_, System::Interval { .. }) => Err("interval maps only take hat partitions".into()),
            (PartitionSpec::Cylinder { depth }, System::Shift(s)) => {
                make_cylinder_partition(s.clone(), *depth).map(Partition::Shift).map_err(|e| e.to_string())
            }
            (PartitionSpec::Smoothed { depth, lambda }, System::Shift(s)) => {
                make_smoothed_partition(s.clone(), *depth, *lambda).map(Partition::Shift).map_err(|e| e.to_string())
            }
            (PartitionSpec::Explicit { depth, values }, System::Shift(s)) => {
                let tables = values.iter().map(parse_table).collect::<Result<Vec<_>, _>>()?;
                PartitionOfUnity::explicit(s.clone(), *depth, &tables).map(Partition::Shift).map_err(|e| e.to_string())
            }
        }
    }
}

impl PotentialSpec {
    pub fn build(&self, system: &System) -> Result<Potential, String> {
        let s = shift_of(system, "a potential")?;
        let f = match self {
            PotentialSpec::Constant { value } => LocallyConstantFunction::constant(s, *value),
            PotentialSpec::Cylinder { word, value } => {
                let w = Word::parse(word).map_err(|e| e.to_string())?;
                LocallyConstantFunction::cylinder_indicator(s, &w).map(|f| f.scale(*value))
            }
            PotentialSpec::Table { depth, values } => {
                LocallyConstantFunction::from_table(s, *depth, &parse_table(values)?, 0.0)
            }
        };
        f.map(Potential::new).map_err(|e| e.to_string())
    }
}

impl FamilySpec {
    pub fn build(&self, system: &System, partitions: &BTreeMap<String, PartitionSpec>) -> Result<Vec<PartitionOfUnity>, String> {
        let s = shift_of(system, "a partition family")?;
        let family: Vec<PartitionOfUnity> = match self {
            FamilySpec::Cylinder { depths } => depths
                .iter()
                .map(|&d| make_cylinder_partition(s.clone(), d).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?,
            FamilySpec::Smoothed { depths, lambda } => depths
                .iter()
                .map(|&d| make_smoothed_partition(s.clone(), d, *lambda).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?,
            FamilySpec::Members { names } => names
                .iter()
                .map(|n| {
                    let spec = partitions.get(n).ok_or_else(|| format!("family member `{n}` is not a declared partition"))?;
                    match spec.build(system)? {
                        Partition::Shift(p) => Ok(p),
                        Partition::Interval(_) => Err(format!("family member `{n}` is not a shift partition")),
                    }
                })
                .collect::<Result<_, String>>()?,
        };
        if family.is_empty() {
            return Err("partition family is empty".into());
        }
        Ok(family)
    }
}

/// Everything a task needs, resolved against the declared systems.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub task: String,
    pub horizon: usize,
    pub system: Option<System>,
    pub second_system: Option<System>,
    pub measure: Option<ShiftMeasure>,
    pub partition: Option<Partition>,
    pub condition: Option<PartitionOfUnity>,
    pub second_measure: Option<ShiftMeasure>,
    pub second_partition: Option<PartitionOfUnity>,
    pub family: Option<Vec<PartitionOfUnity>>,
    pub potential: Option<Potential>,
    pub structure: Option<StructureSpec>,
}

struct Collector(Vec<String>);

impl Collector {
    fn take<T>(&mut self, r: Result<T, String>, context: &str) -> Option<T> {
        r.map_err(|e| self.0.push(format!("{context}: {e}"))).ok()
    }

    fn require<T: Clone>(&mut self, v: &Option<T>, field: &str, task: &str) -> Option<T> {
        if v.is_none() {
            self.0.push(format!("task `{task}` requires `{field}`"));
        }
        v.clone()
    }
}

fn lookup<'a, T>(names: &'a BTreeMap<String, T>, name: &str, field: &str, errors: &mut Collector) -> Option<&'a T> {
    let found = names.get(name);
    if found.is_none() {
        errors.0.push(format!("`{field}` refers to undeclared name `{name}`"));
    }
    found
}

impl RunSpec {
    /// Resolves every reference and builds every object, collecting all
    /// problems instead of stopping at the first.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let mut errors = Collector(Vec::new());
        let task = self.task.as_str();
        if !TASKS.contains(&task) {
            errors.0.push(format!("unknown task `{task}`; expected one of {}", TASKS.join(", ")));
        }
        let needs_horizon = task != "structure";
        let horizon = match (self.horizon, needs_horizon) {
            (Some(0), true) => {
                errors.0.push("`horizon` must be at least 1".into());
                0
            }
            (Some(h), _) => h,
            (None, true) => {
                errors.0.push(format!("task `{task}` requires `horizon`"));
                0
            }
            (None, false) => 0,
        };
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                errors.0.push("`tolerance` must be positive".into());
            }
        }

        let needs_system = task != "structure";
        let system = match &self.system {
            Some(s) => errors.take(s.build(), "system"),
            None => {
                if needs_system {
                    errors.0.push("missing required table `system`".into());
                }
                None
            }
        };
        let second_system = self.second_system.as_ref().and_then(|s| errors.take(s.build(), "second_system"));

        let measure_on = |name: &Option<String>, field: &str, sys: &Option<System>, errors: &mut Collector| {
            let name = name.as_ref()?;
            let spec = lookup(&self.measures, name, field, errors)?;
            errors.take(spec.build(sys.as_ref()?), &format!("measure `{name}`"))
        };
        let partition_on = |name: &Option<String>, field: &str, sys: &Option<System>, errors: &mut Collector| {
            let name = name.as_ref()?;
            let spec = lookup(&self.partitions, name, field, errors)?;
            errors.take(spec.build(sys.as_ref()?), &format!("partition `{name}`"))
        };
        let shift_only = |p: Option<Partition>, field: &str, errors: &mut Collector| match p? {
            Partition::Shift(p) => Some(p),
            Partition::Interval(_) => {
                errors.0.push(format!("`{field}` must be a shift partition"));
                None
            }
        };

        let measure = measure_on(&self.measure, "measure", &system, &mut errors);
        let partition = partition_on(&self.partition, "partition", &system, &mut errors);
        let condition = partition_on(&self.condition, "condition", &system, &mut errors);
        let condition = shift_only(condition, "condition", &mut errors);
        let second_measure = measure_on(&self.second_measure, "second_measure", &second_system, &mut errors);
        let second_partition = partition_on(&self.second_partition, "second_partition", &second_system, &mut errors);
        let second_partition = shift_only(second_partition, "second_partition", &mut errors);
        let potential = match (&self.potential, &system) {
            (Some(p), Some(s)) => errors.take(p.build(s), "potential"),
            _ => None,
        };
        let family = match (&self.family, &system) {
            (Some(f), Some(s)) => errors.take(f.build(s, &self.partitions), "family"),
            _ => None,
        };
        let structure = self.structure.clone();

        let interval = matches!(system, Some(System::Interval { .. }));
        match task {
            "entropy" => {
                errors.require(&self.partition, "partition", task);
                if interval && self.measure.is_some() {
                    errors.0.push("interval maps use their invariant density; drop `measure`".into());
                }
            }
            "pressure" => {
                errors.require(&self.partition, "partition", task);
                errors.require(&self.potential, "potential", task);
            }
            "conditional" => {
                errors.require(&self.partition, "partition", task);
                errors.require(&self.condition, "condition", task);
            }
            "tail" => {
                errors.require(&self.family, "family", task);
            }
            "structure" => {
                if let Some(s) = errors.require(&self.structure, "structure", task) {
                    errors.take(s.input.build().map(|_| ()).map_err(|e| e.to_string()), "structure");
                }
            }
            "product-check" => {
                for (v, f) in [
                    (&self.measure, "measure"),
                    (&self.partition, "partition"),
                    (&self.second_measure, "second_measure"),
                    (&self.second_partition, "second_partition"),
                ] {
                    errors.require(v, f, task);
                }
                errors.require(&self.second_system, "second_system", task);
            }
            _ => {}
        }
        if interval && !matches!(task, "entropy") && TASKS.contains(&task) && task != "structure" {
            errors.0.push(format!("task `{task}` is not available for interval maps"));
        }
        if !interval && matches!(task, "entropy" | "pressure" | "conditional" | "product-check") {
            shift_only(partition.clone(), "partition", &mut errors);
        }

        if errors.0.is_empty() {
            Ok(Resolved {
                task: self.task.clone(),
                horizon,
                system,
                second_system,
                measure,
                partition,
                condition,
                second_measure,
                second_partition,
                family,
                potential,
                structure,
            })
        } else {
            Err(CliError::Validation(errors.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENTROPY_TOML: &str = r#"
task = "entropy"
horizon = 4
measure = "chain"
partition = "cyl"
[system]
kind = "sft"
alphabet_size = 2
forbidden_pairs = [[1, 1]]
[measures.chain]
kind = "markov"
P = [[0.5, 0.5], [1.0, 0.0]]
[partitions.cyl]
kind = "cylinder"
depth = 1
"#;

    fn errors(spec: &RunSpec) -> Vec<String> {
        match spec.resolve() {
            Err(CliError::Validation(e)) => e,
            other => panic!("expected validation errors, got {other:?}"),
        }
    }

    #[test]
    fn toml_and_json_forms_agree() {
        let from_toml = parse(ENTROPY_TOML, false).unwrap();
        let json = serde_json::to_string(&from_toml).unwrap();
        let from_json = parse(&json, true).unwrap();
        assert_eq!(serde_json::to_value(&from_toml).unwrap(), serde_json::to_value(&from_json).unwrap());
        assert!(from_json.resolve().is_ok());
    }

    #[test]
    fn unknown_keys_and_kinds_are_rejected() {
        assert!(parse("task = \"entropy\"\nhorizn = 3\n", false).is_err());
        assert!(parse("task = \"entropy\"\n[system]\nkind = \"torus\"\n", false).is_err());
    }

    #[test]
    fn partitions_must_match_the_system() {
        let spec = parse(
            "task = \"entropy\"\nhorizon = 2\npartition = \"c\"\n[system]\nkind = \"doubling\"\n[partitions.c]\nkind = \"cylinder\"\ndepth = 1\n",
            false,
        )
        .unwrap();
        assert!(errors(&spec).iter().any(|e| e.contains("hat partitions")));
        let spec = parse(
            "task = \"entropy\"\nhorizon = 2\npartition = \"h\"\n[system]\nkind = \"golden\"\n[partitions.h]\nkind = \"hats\"\nmembers = 4\n",
            false,
        )
        .unwrap();
        assert!(errors(&spec).iter().any(|e| e.contains("interval map")));
    }

    #[test]
    fn core_validation_errors_surface() {
        let spec = parse(
            "task = \"entropy\"\nhorizon = 2\nmeasure = \"m\"\npartition = \"p\"\n[system]\nkind = \"golden\"\n\
             [measures.m]\nkind = \"bernoulli\"\np = [0.5, 0.5]\n\
             [partitions.p]\nkind = \"explicit\"\ndepth = 1\nvalues = [{ \"0\" = 0.7 }, { \"1\" = 1.0 }]\n",
            false,
        )
        .unwrap();
        let e = errors(&spec);
        assert_eq!(e.len(), 2, "{e:?}");
    }

    #[test]
    fn structure_task_needs_no_system() {
        let spec = parse(
            r#"{"task": "structure", "structure": {"points": ["a"], "h": [1.0], "h_k": [[0.5], [1.0]]}}"#,
            true,
        )
        .unwrap();
        assert!(spec.resolve().is_ok());
    }
}
