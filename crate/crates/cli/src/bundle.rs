//! Bundle files: enough to rebuild a universal bundle, plus a stream prefix
//! that is checked on load.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use subshift_core::skeleton::SkeletonParams;
use subshift_core::universal::{build_universal_1d_with, UniversalBundle};

use crate::manifest::{resolve_entry, PatternRecord};
use crate::CliError;

pub const FORMAT: &str = "subshift-bundle/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssignmentRecord {
    /// Alphabet size per target.
    pub sizes: Vec<u32>,
    /// `(layer, target)` for layers `1..=covering`.
    pub layers: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorRecord {
    pub name: String,
    pub layer: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleFile {
    pub format: String,
    pub k: u32,
    pub max_layer: usize,
    /// Manifest entries as given.
    pub targets: Vec<Value>,
    pub assignment: AssignmentRecord,
    pub registry: Vec<OperatorRecord>,
    pub forbidden_prefix: Vec<PatternRecord>,
}

impl BundleFile {
    pub fn build(targets: Vec<Value>, k: u32, max_layer: usize, prefix: usize) -> Result<(BundleFile, UniversalBundle), CliError> {
        let specs = targets.iter().map(resolve_entry).collect::<Result<Vec<_>, _>>()?;
        let bundle = build_universal_1d_with(specs, SkeletonParams::new(k)?, max_layer)?;
        let covering = bundle.assignment.covering_layer().unwrap_or(0);
        let layers = (1..=covering).filter_map(|n| bundle.assignment.target(n).map(|t| (n, t))).collect();
        let registry = (0..bundle.registry.len())
            .map(|i| OperatorRecord { name: bundle.registry.name(i).expect("index in range").to_string(), layer: bundle.registry_layers[i] })
            .collect();
        let forbidden_prefix = bundle.spec.first(prefix).iter().map(PatternRecord::from_pattern).collect();
        let file = BundleFile {
            format: FORMAT.to_string(),
            k,
            max_layer,
            targets,
            assignment: AssignmentRecord { sizes: bundle.assignment.sizes().to_vec(), layers },
            registry,
            forbidden_prefix,
        };
        Ok((file, bundle))
    }

    /// Reads a bundle file and rebuilds it; the stored prefix and registry
    /// must match the rebuilt ones.
    pub fn load(path: &Path) -> Result<(BundleFile, UniversalBundle), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file: BundleFile =
            serde_json::from_str(&text).map_err(|e| CliError::bundle(format!("{}: {e}", path.display())))?;
        if file.format != FORMAT {
            return Err(CliError::bundle(format!("unsupported bundle format {:?}", file.format)));
        }
        let (fresh, bundle) = BundleFile::build(file.targets.clone(), file.k, file.max_layer, file.forbidden_prefix.len())?;
        if fresh.forbidden_prefix != file.forbidden_prefix {
            return Err(CliError::bundle("stored forbidden prefix differs from the rebuilt stream"));
        }
        let names = |f: &BundleFile| f.registry.iter().map(|o| (o.name.clone(), o.layer)).collect::<Vec<_>>();
        if names(&fresh) != names(&file) {
            return Err(CliError::bundle("stored registry differs from the rebuilt one"));
        }
        Ok((file, bundle))
    }
}
