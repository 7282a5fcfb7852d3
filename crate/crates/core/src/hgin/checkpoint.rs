//! Plain-text checkpoints.
//!
//! ```text
//! hgin-checkpoint 1
//! config {"layers":5,...,"vertex_labels":["A","B"],"edge_labels":["e"]}
//! matrix labels 2 64
//! <row>
//! <row>
//! matrix msg 1 0 0 0 32 64
//! ...
//! matrix self 1 64 64
//! ...
//! end
//! ```
//!
//! Labels are stored by name; message blocks are keyed by
//! (layer, edge label index, identity bit, direction). Values are written
//! with 17 significant digits so a reload is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::LabelDict;

use super::config::{Ablations, Gating, ModelConfig};
use super::{Model, ModelError};

const MAGIC: &str = "hgin-checkpoint";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("label id {0} has no name in the dictionary")]
    UnnamedLabel(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Serialize, Deserialize)]
struct Header {
    layers: usize,
    dim: usize,
    margin: f64,
    threshold: f64,
    seed: u64,
    dualsim_filtered: bool,
    ablations: Ablations,
    gating: Gating,
    vertex_labels: Vec<String>,
    edge_labels: Vec<String>,
}

struct Block {
    tag: String,
    rows: usize,
    cols: usize,
    range: std::ops::Range<usize>,
}

fn blocks(model: &Model) -> Vec<Block> {
    let c = &model.config;
    let l = &model.layout;
    let half = c.dim / 2;
    let mut out = vec![Block {
        tag: "labels".into(),
        rows: c.vertex_labels.len(),
        cols: c.dim,
        range: l.label_table(),
    }];
    for k in 1..=c.layers {
        for r in 0..c.edge_labels.len() {
            for bit in 0..2 {
                for dir in 0..2 {
                    out.push(Block {
                        tag: format!("msg {k} {r} {bit} {dir}"),
                        rows: half,
                        cols: c.dim,
                        range: l.msg(k, r, bit, dir),
                    });
                }
            }
        }
    }
    for k in 1..=c.layers {
        out.push(Block { tag: format!("self {k}"), rows: c.dim, cols: c.dim, range: l.self_weight(k) });
    }
    out
}

fn names(dict: &LabelDict, ids: &[u32]) -> Result<Vec<String>, CheckpointError> {
    ids.iter()
        .map(|&id| dict.name(id).map(str::to_owned).ok_or(CheckpointError::UnnamedLabel(id)))
        .collect()
}

pub fn save_checkpoint(model: &Model, dict: &LabelDict) -> Result<String, CheckpointError> {
    let c = &model.config;
    let header = Header {
        layers: c.layers,
        dim: c.dim,
        margin: c.margin,
        threshold: c.threshold,
        seed: c.seed,
        dualsim_filtered: c.dualsim_filtered,
        ablations: c.ablations,
        gating: c.gating,
        vertex_labels: names(dict, &c.vertex_labels)?,
        edge_labels: names(dict, &c.edge_labels)?,
    };
    let mut out = format!("{MAGIC} {VERSION}\nconfig {}\n", serde_json::to_string(&header).expect("header serializes"));
    for b in blocks(model) {
        let _ = writeln!(out, "matrix {} {} {}", b.tag, b.rows, b.cols);
        for row in model.params[b.range].chunks(b.cols) {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out.push_str("end\n");
    Ok(out)
}

pub fn write_checkpoint(path: impl AsRef<Path>, model: &Model, dict: &LabelDict) -> Result<(), CheckpointError> {
    fs::write(path, save_checkpoint(model, dict)?)?;
    Ok(())
}

/// Parses a checkpoint, interning its label names into `dict`.
pub fn parse_checkpoint(text: &str, dict: &mut LabelDict) -> Result<Model, CheckpointError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let mut next = |what: &str| -> Result<(usize, &str), CheckpointError> {
        lines.next().ok_or_else(|| CheckpointError::Format { line: 0, msg: format!("unexpected end of input, expected {what}") })
    };
    let fail = |line: usize, msg: String| CheckpointError::Format { line, msg };

    let (ln, first) = next("header")?;
    let version = first
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.trim().parse::<u32>().ok())
        .ok_or_else(|| fail(ln, format!("expected `{MAGIC} <version>`")))?;
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let (ln, cfg_line) = next("config")?;
    let json = cfg_line.strip_prefix("config ").ok_or_else(|| fail(ln, "expected `config {...}`".into()))?;
    let header: Header = serde_json::from_str(json).map_err(|e| fail(ln, e.to_string()))?;
    let config = ModelConfig {
        layers: header.layers,
        dim: header.dim,
        margin: header.margin,
        threshold: header.threshold,
        vertex_labels: header.vertex_labels.iter().map(|n| dict.intern(n)).collect(),
        edge_labels: header.edge_labels.iter().map(|n| dict.intern(n)).collect(),
        ablations: header.ablations,
        gating: header.gating,
        seed: header.seed,
        dualsim_filtered: header.dualsim_filtered,
    };
    config.validate()?;

    let layout_len = super::Layout::new(config.layers, config.dim, config.vertex_labels.len(), config.edge_labels.len()).len();
    let mut params = vec![0.0; layout_len];
    let skeleton = Model::from_params(config.clone(), params.clone())?;
    for b in blocks(&skeleton) {
        let (ln, head) = next("matrix header")?;
        let expected = format!("matrix {} {} {}", b.tag, b.rows, b.cols);
        if head != expected {
            return Err(fail(ln, format!("expected `{expected}`, found `{head}`")));
        }
        for (row_idx, row) in params[b.range].chunks_mut(b.cols).enumerate() {
            let (ln, line) = next("matrix row")?;
            let mut count = 0;
            for tok in line.split_whitespace() {
                if count == b.cols {
                    return Err(fail(ln, format!("row {row_idx} of `{}` has more than {} values", b.tag, b.cols)));
                }
                row[count] = tok.parse::<f64>().map_err(|_| fail(ln, format!("invalid number `{tok}`")))?;
                count += 1;
            }
            if count != b.cols {
                return Err(fail(ln, format!("row {row_idx} of `{}` has {count} values, expected {}", b.tag, b.cols)));
            }
        }
    }
    let (ln, tail) = next("end")?;
    if tail != "end" {
        return Err(fail(ln, format!("expected `end`, found `{tail}`")));
    }
    Ok(Model::from_params(config, params)?)
}

pub fn load_checkpoint(path: impl AsRef<Path>, dict: &mut LabelDict) -> Result<Model, CheckpointError> {
    parse_checkpoint(&fs::read_to_string(path)?, dict)
}
