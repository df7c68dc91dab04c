//! JSON forms of subshift definitions and target manifests.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use subshift_core::codec::{code_to_spec, NatStream, SubshiftCode};
use subshift_core::pattern::Forbidden;
use subshift_core::skeleton::{self, skeleton_forbidden_stream, SkeletonParams};
use subshift_core::{Alphabet, Letter, PartialPattern, SubshiftSpec};

use crate::CliError;

/// A forbidden pattern: a full 1-D word or explicit `(coordinates, letter)` cells.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PatternRecord {
    Word { word: String },
    Letters { letters: Vec<Letter> },
    Cells { cells: Vec<(Vec<i64>, Letter)> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpecRecord {
    pub alphabet: u32,
    #[serde(default = "one")]
    pub dimension: usize,
    #[serde(default)]
    pub forbidden: Vec<PatternRecord>,
    #[serde(default = "yes")]
    pub sft: bool,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

impl PatternRecord {
    pub fn from_pattern(p: &PartialPattern) -> PatternRecord {
        PatternRecord::Cells { cells: p.cells().to_vec() }
    }

    fn resolve(&self, alphabet: Alphabet, dimension: usize) -> Result<PartialPattern, CliError> {
        let line = |letters: Vec<Letter>| -> Result<PartialPattern, CliError> {
            if dimension != 1 {
                return Err(CliError::manifest("word patterns need dimension 1"));
            }
            let cells: Vec<(i64, Letter)> = letters.into_iter().enumerate().map(|(i, l)| (i as i64, l)).collect();
            Ok(PartialPattern::from_cells_1d(alphabet, &cells)?)
        };
        match self {
            PatternRecord::Word { word } => {
                let letters = word
                    .chars()
                    .map(|c| c.to_digit(10).ok_or_else(|| CliError::manifest(format!("non-digit letter {c:?} in {word:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                line(letters)
            }
            PatternRecord::Letters { letters } => line(letters.clone()),
            PatternRecord::Cells { cells } => Ok(PartialPattern::new(alphabet, dimension, cells.clone())?),
        }
    }
}

impl SpecRecord {
    pub fn resolve(&self) -> Result<SubshiftSpec, CliError> {
        let alphabet = Alphabet::new(self.alphabet)?;
        let pats = self.forbidden.iter().map(|r| r.resolve(alphabet, self.dimension)).collect::<Result<Vec<_>, _>>()?;
        let mut spec = SubshiftSpec::sft(alphabet, self.dimension, pats)?;
        if !self.sft {
            if matches!(&spec.forbidden, Forbidden::List(v) if v.is_empty()) {
                return Err(CliError::manifest("a non-SFT entry needs at least one pattern"));
            }
            spec.sft_bound = None;
        }
        Ok(spec)
    }
}

/// `builtin:golden_mean`, `builtin:no00no11`, `builtin:fullshift:<s>` or
/// `builtin:skeleton:<k>`.
pub fn builtin(name: &str) -> Result<SubshiftSpec, CliError> {
    let rest = name.strip_prefix("builtin:").ok_or_else(|| CliError::manifest(format!("unknown spec name {name:?}")))?;
    let arg = |prefix: &str| rest.strip_prefix(prefix).map(|v| v.parse::<u32>());
    if rest == "golden_mean" {
        return Ok(SubshiftSpec::golden_mean());
    }
    if rest == "no00no11" {
        return Ok(SubshiftSpec::no00no11());
    }
    if let Some(s) = arg("fullshift:") {
        let s = s.map_err(|_| CliError::manifest(format!("bad alphabet size in {name:?}")))?;
        return Ok(SubshiftSpec::fullshift(s)?);
    }
    if let Some(k) = arg("skeleton:") {
        let k = k.map_err(|_| CliError::manifest(format!("bad k in {name:?}")))?;
        let params = SkeletonParams::new(k)?;
        return Ok(SubshiftSpec::stream(skeleton::alphabet(), 1, skeleton_forbidden_stream(params)));
    }
    Err(CliError::manifest(format!("unknown builtin {name:?}")))
}

/// One manifest entry: a builtin name, an inline spec, `{"code": [...]}` (a
/// Gödel-code prefix, the last code repeating) or `{"spec": ..., "b": n}`.
pub fn resolve_entry(v: &Value) -> Result<SubshiftSpec, CliError> {
    match v {
        Value::String(s) => builtin(s),
        Value::Object(o) if o.contains_key("spec") => resolve_entry(&o["spec"]),
        Value::Object(o) if o.contains_key("code") => {
            let codes: Vec<u64> = serde_json::from_value(o["code"].clone())
                .map_err(|e| CliError::manifest(format!("code prefix: {e}")))?;
            if codes.len() < 3 {
                return Err(CliError::manifest("a code prefix needs a header and at least one pattern code"));
            }
            let last = *codes.last().expect("non-empty");
            let distinct = Some(codes.len() - 2);
            let code = SubshiftCode { stream: NatStream::with_prefix(codes, NatStream::constant(last)), distinct };
            Ok(code_to_spec(&code)?)
        }
        Value::Object(_) => {
            let rec: SpecRecord =
                serde_json::from_value(v.clone()).map_err(|e| CliError::manifest(format!("spec record: {e}")))?;
            rec.resolve()
        }
        _ => Err(CliError::manifest("an entry must be a builtin name or an object")),
    }
}

/// Precision given with an entry as `{"spec": ..., "b": n}`.
pub fn entry_b(v: &Value) -> Option<usize> {
    v.get("b").and_then(Value::as_u64).map(|b| b as usize)
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::manifest(format!("{}: {e}", path.display())))
}

/// `--spec` takes a builtin name or a JSON file holding one entry.
pub fn load_spec(arg: &str) -> Result<SubshiftSpec, CliError> {
    if arg.starts_with("builtin:") {
        return builtin(arg);
    }
    resolve_entry(&read_json(Path::new(arg))?)
}

/// A list of entries plus optional global options.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub entries: Vec<Value>,
    pub options: serde_json::Map<String, Value>,
}

impl Manifest {
    /// A JSON array of entries, or `{"entries": [...], "options": {...}}`.
    pub fn load(path: &Path) -> Result<Manifest, CliError> {
        Manifest::from_value(read_json(path)?)
    }

    pub fn from_value(v: Value) -> Result<Manifest, CliError> {
        match v {
            Value::Array(entries) => Ok(Manifest { entries, options: Default::default() }),
            Value::Object(mut o) => {
                let entries = match o.remove("entries") {
                    Some(Value::Array(e)) => e,
                    _ => return Err(CliError::manifest("manifest object needs an \"entries\" array")),
                };
                let options = match o.remove("options") {
                    Some(Value::Object(m)) => m,
                    None => Default::default(),
                    Some(_) => return Err(CliError::manifest("\"options\" must be an object")),
                };
                Ok(Manifest { entries, options })
            }
            _ => Err(CliError::manifest("a manifest is an array or an object")),
        }
    }

    pub fn specs(&self) -> Result<Vec<SubshiftSpec>, CliError> {
        self.entries.iter().map(resolve_entry).collect()
    }

    pub fn option_u64(&self, key: &str) -> Option<u64> {
        self.options.get(key).and_then(Value::as_u64)
    }
}
