//! Line-oriented text serialization of fitted forests.
//!
//! ```text
//! rstsf-model 1
//! config trees=500 runs=50 seed=0 reprs=ori,per,der,reg aggs=mean,... split=et partition=random candidates=sqrt
//! series_len 24
//! lag 8
//! labels 2
//! label 1
//! label 2
//! pool 130
//! f ori mean 0 11 0
//! ...
//! trees 500
//! tree 7 20
//! s 12 0.4375 1 2 0.97 20
//! l 0 9
//! ...
//! end
//! ```
//!
//! Floats use the shortest representation that parses back to the same
//! value, so save, load, save is byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::aggregate::Aggregation;
use crate::error::{Error, Result};
use crate::forest::{Forest, TrainConfig};
use crate::intervals::{FeaturePool, IntervalFeature};
use crate::representations::Representation;
use crate::tree::{Tree, TreeNode};

pub const MAGIC: &str = "rstsf-model";
pub const FORMAT_VERSION: u32 = 1;

fn join_codes<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn to_string(model: &Forest) -> String {
    let c = model.config();
    let mut out = String::new();
    writeln!(out, "{MAGIC} {FORMAT_VERSION}").unwrap();
    writeln!(
        out,
        "config trees={} runs={} seed={} reprs={} aggs={} split={} partition={} candidates={}",
        c.trees,
        c.runs,
        c.seed,
        join_codes(&c.representations),
        join_codes(&c.aggregations),
        c.split_mode,
        c.partition_mode.code(),
        c.candidates
    )
    .unwrap();
    writeln!(out, "series_len {}", model.series_len()).unwrap();
    writeln!(out, "lag {}", model.lag()).unwrap();
    writeln!(out, "labels {}", model.label_names().len()).unwrap();
    for name in model.label_names() {
        writeln!(out, "label {name}").unwrap();
    }
    let pool = model.pool();
    writeln!(out, "pool {}", pool.len()).unwrap();
    for (f, run) in pool.features().iter().zip(pool.provenance()) {
        writeln!(out, "f {} {} {} {} {run}", f.repr, f.agg, f.start, f.end).unwrap();
    }
    writeln!(out, "trees {}", model.trees().len()).unwrap();
    for tree in model.trees() {
        writeln!(out, "tree {} {}", tree.nodes().len(), tree.n_train()).unwrap();
        for node in tree.nodes() {
            match *node {
                TreeNode::Split {
                    feature,
                    cut,
                    left,
                    right,
                    gain,
                    count,
                } => writeln!(out, "s {feature} {cut} {left} {right} {gain} {count}").unwrap(),
                TreeNode::Leaf { label, count } => writeln!(out, "l {label} {count}").unwrap(),
            }
        }
    }
    out.push_str("end\n");
    out
}

pub fn save_model(model: &Forest, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Forest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(&text)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| corrupt("unexpected end of file"))
    }

    /// Next line, which must start with `keyword`; returns the rest.
    fn expect(&mut self, keyword: &str) -> Result<(usize, &'a str)> {
        let (no, line) = self.next_line()?;
        match line.split_once(' ') {
            Some((k, rest)) if k == keyword => Ok((no, rest)),
            _ if line == keyword => Ok((no, "")),
            _ => Err(corrupt(format!("line {no}: expected {keyword:?}"))),
        }
    }
}

fn parse<T: FromStr>(token: &str, no: usize) -> Result<T> {
    token
        .parse()
        .map_err(|_| corrupt(format!("line {no}: cannot parse {token:?}")))
}

fn fields<const N: usize>(rest: &str, no: usize) -> Result<[&str; N]> {
    let parts: Vec<&str> = rest.split(' ').collect();
    parts
        .try_into()
        .map_err(|_| corrupt(format!("line {no}: expected {N} fields")))
}

fn parse_list<T: FromStr>(value: &str, no: usize) -> Result<Vec<T>> {
    value.split(',').map(|t| parse(t, no)).collect()
}

fn parse_config(rest: &str, no: usize) -> Result<TrainConfig> {
    let mut c = TrainConfig::default();
    let mut seen = 0;
    for pair in rest.split(' ') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| corrupt(format!("line {no}: malformed config entry {pair:?}")))?;
        match key {
            "trees" => c.trees = parse(value, no)?,
            "runs" => c.runs = parse(value, no)?,
            "seed" => c.seed = parse(value, no)?,
            "reprs" => c.representations = parse_list(value, no)?,
            "aggs" => c.aggregations = parse_list(value, no)?,
            "split" => c.split_mode = parse(value, no)?,
            "partition" => c.partition_mode = parse(value, no)?,
            "candidates" => c.candidates = parse(value, no)?,
            _ => return Err(corrupt(format!("line {no}: unknown config key {key:?}"))),
        }
        seen += 1;
    }
    if seen != 8 {
        return Err(corrupt(format!("line {no}: incomplete config")));
    }
    Ok(c)
}

pub fn from_str(text: &str) -> Result<Forest> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (no, version) = lines.expect(MAGIC)?;
    let version: u32 = parse(version, no)?;
    if version != FORMAT_VERSION {
        return Err(Error::IncompatibleModel(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }

    let (no, rest) = lines.expect("config")?;
    let config = parse_config(rest, no)?;
    let (no, rest) = lines.expect("series_len")?;
    let series_len: usize = parse(rest, no)?;
    let (no, rest) = lines.expect("lag")?;
    let lag: usize = parse(rest, no)?;

    let (no, rest) = lines.expect("labels")?;
    let n_labels: usize = parse(rest, no)?;
    let mut label_names = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        let (_, name) = lines.expect("label")?;
        label_names.push(name.to_string());
    }

    let (no, rest) = lines.expect("pool")?;
    let n_pool: usize = parse(rest, no)?;
    let mut features = Vec::with_capacity(n_pool);
    let mut provenance = Vec::with_capacity(n_pool);
    for _ in 0..n_pool {
        let (no, rest) = lines.expect("f")?;
        let [r, a, s, e, run] = fields::<5>(rest, no)?;
        let repr: Representation = parse(r, no)?;
        let agg: Aggregation = parse(a, no)?;
        let (start, end): (usize, usize) = (parse(s, no)?, parse(e, no)?);
        let width = match repr {
            Representation::Original => series_len,
            Representation::Periodogram => series_len / 2,
            Representation::Derivative => series_len.saturating_sub(1),
            Representation::Autoregressive => lag,
        };
        if start > end || end >= width {
            return Err(corrupt(format!("line {no}: interval out of range")));
        }
        features.push(IntervalFeature::new(repr, agg, start, end));
        provenance.push(parse(run, no)?);
    }
    let pool = FeaturePool::new(features, provenance).map_err(|e| corrupt(e.to_string()))?;

    let (no, rest) = lines.expect("trees")?;
    let n_trees: usize = parse(rest, no)?;
    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let (no, rest) = lines.expect("tree")?;
        let [n_nodes, n_train] = fields::<2>(rest, no)?;
        let n_nodes: usize = parse(n_nodes, no)?;
        let n_train: usize = parse(n_train, no)?;
        let mut nodes = Vec::with_capacity(n_nodes);
        for _ in 0..n_nodes {
            let (no, line) = lines.next_line()?;
            let node = match line.split_once(' ') {
                Some(("s", rest)) => {
                    let [f, cut, l, r, g, n] = fields::<6>(rest, no)?;
                    TreeNode::Split {
                        feature: parse(f, no)?,
                        cut: parse(cut, no)?,
                        left: parse(l, no)?,
                        right: parse(r, no)?,
                        gain: parse(g, no)?,
                        count: parse(n, no)?,
                    }
                }
                Some(("l", rest)) => {
                    let [label, n] = fields::<2>(rest, no)?;
                    TreeNode::Leaf {
                        label: parse(label, no)?,
                        count: parse(n, no)?,
                    }
                }
                _ => return Err(corrupt(format!("line {no}: expected tree node"))),
            };
            nodes.push(node);
        }
        trees.push(Tree::from_nodes(nodes, n_train)?);
    }
    lines.expect("end")?;
    if let Ok((no, _)) = lines.next_line() {
        return Err(corrupt(format!("line {no}: trailing content")));
    }
    Forest::from_parts(trees, pool, config, label_names, lag, series_len)
}
