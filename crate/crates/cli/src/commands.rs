use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;
use subshift_core::certify::{build_b, enumerate_simulated, Budgets};
use subshift_core::codec::{code_to_spec, encode_config, spec_to_code, NatStream, Periodic1d, SubshiftCode};
use subshift_core::decode::{decoded_language_window, fitting_layer_patterns};
use subshift_core::lang::{admissible_words, sft_language};
use subshift_core::oracle::{modulus_of_continuity, HeaderMachine, IdentityMachine, ModulusCaps, OracleMachine};
use subshift_core::skeleton::{parse_letters, render, SkeletonParams, Verdict};
use subshift_core::universal::DEFAULT_MAX_LAYER;
use subshift_core::{Alphabet, Letter};

use crate::args::*;
use crate::bundle::BundleFile;
use crate::manifest::{entry_b, load_spec, Manifest, PatternRecord};
use crate::{CliError, Config};

const DEFAULT_K: u32 = 4;
const DEFAULT_PREFIX: usize = 64;
const DEFAULT_BUNDLE_PREFIX: usize = 256;

/// Runs one subcommand and returns its standard output.
pub fn run(cmd: Command, cfg: &Config) -> Result<String, CliError> {
    match cmd {
        Command::Skeleton(SkeletonCmd::Gen { k, depth, bits }) => {
            let params = SkeletonParams::new(k.or(cfg.u32("k")).unwrap_or(DEFAULT_K))?;
            let depth = depth.or(cfg.usize("depth")).unwrap_or(1);
            let hex = bits.or(cfg.string("bits")).unwrap_or_default();
            let sizes = params.bits_per_layer(depth)?;
            let flat = hex_bits(&hex, sizes.iter().sum())?;
            let mut layers = Vec::new();
            let mut at = 0;
            for n in sizes {
                layers.push(flat[at..at + n].to_vec());
                at += n;
            }
            Ok(line(render(&params.generate(depth, &layers)?)))
        }
        Command::Skeleton(SkeletonCmd::Check { k, depth, word }) => {
            let params = SkeletonParams::new(k.or(cfg.u32("k")).unwrap_or(DEFAULT_K))?;
            let w = parse_letters(&word)?;
            let depth = depth.or(cfg.usize("depth")).unwrap_or_else(|| params.depth_for_len(w.len()));
            let v = match params.check(&w, depth)? {
                Verdict::Valid => json!({ "verdict": "valid", "depth": depth }),
                Verdict::Violation { layer, position, rule } => json!({
                    "verdict": "violation",
                    "depth": depth,
                    "layer": layer,
                    "position": position,
                    "rule": format!("{rule:?}").to_lowercase(),
                }),
            };
            Ok(line(v.to_string()))
        }
        Command::Universal(UniversalCmd::Build { targets, k, out, prefix, max_layer }) => {
            let manifest = Manifest::load(&targets)?;
            let k = k.or(cfg.u32("k")).or(manifest.option_u64("k").map(|v| v as u32)).unwrap_or(DEFAULT_K);
            let max_layer = max_layer.or(cfg.usize("max-layer")).unwrap_or(DEFAULT_MAX_LAYER);
            let prefix = prefix.or(cfg.usize("prefix")).unwrap_or(DEFAULT_BUNDLE_PREFIX);
            let (file, _) = BundleFile::build(manifest.entries, k, max_layer, prefix)?;
            let text = serde_json::to_string_pretty(&file).expect("bundle serialises");
            std::fs::write(&out, text + "\n").map_err(|e| CliError::io(&out, e))?;
            let summary = json!({
                "out": out.display().to_string(),
                "targets": file.targets.len(),
                "registry": file.registry.iter().map(|o| o.name.clone()).collect::<Vec<_>>(),
                "prefix": file.forbidden_prefix.len(),
            });
            Ok(line(summary.to_string()))
        }
        Command::Universal(UniversalCmd::Decode { bundle, layer, len, margin }) => {
            let (_, b) = BundleFile::load(&bundle)?;
            let margin = margin.or(cfg.usize("margin")).unwrap_or(1);
            let m = b.params.geometry(layer)?.m as usize;
            let extra = fitting_layer_patterns(&b, m * (len + 1 + 2 * margin) + 1);
            let words = decoded_language_window(b.params, layer, len, margin, &extra)?;
            let size = 1u32.checked_shl(layer as u32).unwrap_or(u32::MAX);
            Ok(words.iter().map(|w| line(word_text(w, size))).collect())
        }
        Command::Certify(a) => certify(a, cfg),
        Command::Codec(CodecCmd::Encode { spec, prefix }) => {
            let spec = load_spec(&spec)?;
            let code = spec_to_code(&spec)?;
            let n = prefix.or(cfg.usize("prefix")).unwrap_or(DEFAULT_PREFIX);
            Ok(line(json!(code.stream.prefix(n)).to_string()))
        }
        Command::Codec(CodecCmd::Decode { codes, prefix }) => {
            if codes.len() < 3 {
                return Err(CliError::new("usage", "--codes needs a header and at least one pattern code"));
            }
            let last = *codes.last().expect("non-empty");
            let distinct = Some(codes.len() - 2);
            let spec = code_to_spec(&SubshiftCode { stream: NatStream::with_prefix(codes, NatStream::constant(last)), distinct })?;
            let n = prefix.or(cfg.usize("prefix")).unwrap_or(DEFAULT_PREFIX);
            Ok(spec.first(n).iter().map(|p| line(serde_json::to_string(&PatternRecord::from_pattern(p)).expect("record"))).collect())
        }
        Command::Codec(CodecCmd::Config { alphabet, period, prefix }) => {
            let a = Alphabet::new(alphabet)?;
            let period = digits(&period)?;
            for &l in &period {
                a.check(l)?;
            }
            if period.is_empty() {
                return Err(CliError::new("usage", "--period must not be empty"));
            }
            let s = encode_config(Arc::new(Periodic1d { alphabet: a, period }));
            let n = prefix.or(cfg.usize("prefix")).unwrap_or(DEFAULT_PREFIX);
            Ok(line(json!(s.prefix(n)).to_string()))
        }
        Command::Modulus(a) => {
            let spec = load_spec(&a.spec)?;
            let mut caps = ModulusCaps::default();
            if let Some(m) = a.max_i.or(cfg.usize("max-i")) {
                caps.max_i = m;
            }
            let k = a.k.or(cfg.u32("k")).unwrap_or(DEFAULT_K);
            let op: Box<dyn OracleMachine> = match a.op.as_str() {
                "identity" => Box::new(IdentityMachine),
                "header" => Box::new(HeaderMachine),
                name => match name.strip_prefix('L').and_then(|n| n.parse::<usize>().ok()) {
                    Some(n) => Box::new(SkeletonParams::new(k)?.layer_operator(n)?),
                    None => return Err(CliError::new("unknown_operator", format!("no operator named {name:?}"))),
                },
            };
            let rep = modulus_of_continuity(op.as_ref(), a.r, &spec, caps)?;
            let v = json!({
                "op": a.op,
                "r": a.r,
                "ell": rep.ell,
                "vacuous": rep.vacuous,
                "words_tested": rep.words_tested,
                "max_queried": rep.max_queried,
            });
            Ok(line(v.to_string()))
        }
        Command::Lang(a) => {
            let spec = load_spec(&a.spec)?;
            let depth = a.depth.or(cfg.usize("depth"));
            let words = match depth {
                Some(t) => admissible_words(&spec, a.len, t)?,
                None if spec.is_sft() => sft_language(&spec, a.len)?,
                None => return Err(CliError::new("not_sft", "an effective spec needs --depth")),
            };
            let size = spec.alphabet.size();
            let sorted: BTreeSet<Vec<Letter>> = words.into_iter().map(|w| w.into_cells()).collect();
            Ok(sorted.iter().map(|w| line(word_text(w, size))).collect())
        }
    }
}

fn certify(a: CertifyArgs, cfg: &Config) -> Result<String, CliError> {
    let registry = a.registry.or(cfg.string("registry")).unwrap_or_else(|| "auto".into());
    if registry != "auto" {
        return Err(CliError::new("usage", "only --registry auto is supported"));
    }
    let emit = a.emit.or(cfg.string("emit")).unwrap_or_else(|| "jsonl".into());
    if emit != "jsonl" {
        return Err(CliError::new("usage", "only --emit jsonl is supported"));
    }
    let (_, bundle) = BundleFile::load(&a.x)?;
    let manifest = Manifest::load(&a.g)?;
    let g = manifest.specs()?;
    let bs = match a.b.or(cfg.string("b")).as_deref().unwrap_or("auto") {
        "auto" => build_b(&g)?,
        "manifest" => manifest
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| entry_b(e).map(|b| (i, b)).ok_or_else(|| CliError::manifest(format!("entry {i} has no \"b\""))))
            .collect::<Result<Vec<_>, _>>()?,
        other => return Err(CliError::new("usage", format!("--b takes auto or manifest, not {other:?}"))),
    };
    let mut budgets = Budgets::default();
    if let Some(n) = a.budget.or(cfg.usize("budget")).or(manifest.option_u64("budget").map(|v| v as usize)) {
        budgets.max_sum = n;
    }
    if let Some(c) = a.enum_cap.or(cfg.u64("enum-cap")).or(manifest.option_u64("enum_cap")) {
        budgets.enum_cap = c;
    }
    let mut out = String::new();
    let names: Vec<String> = (0..bundle.registry.len()).map(|i| bundle.registry.name(i).unwrap_or("?").to_string()).collect();
    enumerate_simulated(&bundle.spec, &bundle.registry, &g, &bs, &budgets, &mut |c| {
        let v = json!({
            "target": c.target,
            "operator": c.operator,
            "operator_name": names.get(c.operator),
            "b": c.b,
            "j": c.j,
        });
        out.push_str(&line(v.to_string()));
    })?;
    Ok(out)
}

fn line(s: impl AsRef<str>) -> String {
    format!("{}\n", s.as_ref())
}

/// Digits for alphabets up to 10 letters, dot-separated numbers otherwise.
fn word_text(w: &[Letter], size: u32) -> String {
    if size <= 10 {
        w.iter().map(|&l| char::from_digit(l, 10).expect("digit")).collect()
    } else {
        w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(".")
    }
}

fn digits(s: &str) -> Result<Vec<Letter>, CliError> {
    s.chars()
        .map(|c| c.to_digit(10).ok_or_else(|| CliError::new("usage", format!("non-digit {c:?}"))))
        .collect()
}

/// The first `need` bits of a hex string, most significant first. Missing
/// digits are an error; padding bits past `need` must be 0.
fn hex_bits(hex: &str, need: usize) -> Result<Vec<bool>, CliError> {
    let mut bits = Vec::new();
    for c in hex.chars() {
        let v = c.to_digit(16).ok_or_else(|| CliError::new("usage", format!("non-hex digit {c:?} in --bits")))?;
        bits.extend((0..4).rev().map(|i| v >> i & 1 == 1));
    }
    if bits.len() < need || bits.len() >= need + 4 {
        return Err(CliError::new("size_mismatch", format!("--bits needs {} hex digits for {need} bits", need.div_ceil(4))));
    }
    if bits[need..].iter().any(|&b| b) {
        return Err(CliError::new("size_mismatch", "padding bits after the last coding bit must be 0"));
    }
    bits.truncate(need);
    Ok(bits)
}

pub fn read_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::new("config", format!("{}: {e}", path.display())))?;
    Ok(Config(table))
}
