//! Dataset files and result documents.
//!
//! Formats:
//!
//! * `*.hyperedges`: one hyperedge per line, whitespace-separated node ids.
//!   Blank lines and lines starting with `#` are skipped.
//! * `*.features.csv`: `id,x1,x2,...` per node, optionally preceded by a
//!   header whose first cell is `id`. With the sparse flag each line is
//!   instead `id idx:value idx:value ...` (whitespace separated, zero-based
//!   column indices).
//! * `*.labels.csv`: `id,class`, optional `id,...` header.
//! * splits: a JSON object `{"train": [...], "test": [...]}` of node ids.
//! * optional node list: one id per line; when given, every id referenced
//!   elsewhere must appear in it.
//!
//! External ids are arbitrary tokens. Dense ids follow sorted order:
//! numeric order when every id is an integer, byte order otherwise.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::hypergraph::{Hypergraph, NodeId};
use crate::propagation::Backend;
use crate::selector::{ResolvedParams, SelectionConfig, SelectionResult, TraceStep};

/// Bijection between external string ids and dense node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdMap {
    external: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl IdMap {
    /// Assigns dense ids in sorted order of the given external ids.
    pub fn from_ids<I: IntoIterator<Item = String>>(ids: I) -> Self {
        let set: BTreeSet<String> = ids.into_iter().collect();
        let mut external: Vec<String> = set.into_iter().collect();
        if external.iter().all(|s| s.parse::<i64>().is_ok()) {
            external.sort_by_key(|s| s.parse::<i64>().unwrap());
        }
        let index = external
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        IdMap { external, index }
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    pub fn dense(&self, external: &str) -> Option<NodeId> {
        self.index.get(external).copied()
    }

    pub fn external(&self, dense: NodeId) -> &str {
        &self.external[dense]
    }

    pub fn externals(&self) -> &[String] {
        &self.external
    }
}

/// Train / test node sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Splits {
    pub train: Vec<NodeId>,
    pub test: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub hypergraph: Hypergraph,
    pub features: FeatureMatrix,
    /// Dense class id per node.
    pub labels: Option<Vec<usize>>,
    /// Class names indexed by dense class id.
    pub classes: Vec<String>,
    pub id_map: IdMap,
    pub splits: Option<Splits>,
}

/// Input file locations.
#[derive(Clone, Debug, Default)]
pub struct DatasetPaths {
    pub hyperedges: PathBuf,
    pub features: PathBuf,
    pub labels: Option<PathBuf>,
    pub splits: Option<PathBuf>,
    pub nodes: Option<PathBuf>,
    pub sparse_features: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Non-empty CSV records with their 1-based line numbers. Lines starting
/// with `#` are skipped and rows may differ in length.
fn csv_records(path: &Path, text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn valid_token(tok: &str) -> bool {
    !tok.contains([',', '#', '"', '\''])
}

/// Raw hyperedge lists of external ids.
pub fn load_hypergraph(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = read(path)?;
    let mut edges = Vec::new();
    for (line, content) in content_lines(&text) {
        let mut edge = Vec::new();
        for tok in content.split_whitespace() {
            if !valid_token(tok) {
                return Err(parse_error(
                    path,
                    line,
                    format!("malformed node id `{tok}`"),
                ));
            }
            edge.push(tok.to_string());
        }
        edges.push(edge);
    }
    Ok(edges)
}

fn load_node_list(path: &Path) -> Result<Vec<String>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (line, content) in content_lines(&text) {
        let mut toks = content.split_whitespace();
        let tok = toks.next().unwrap();
        if toks.next().is_some() || !valid_token(tok) {
            return Err(parse_error(path, line, "expected one node id per line"));
        }
        out.push(tok.to_string());
    }
    Ok(out)
}

/// Feature values keyed by external id.
pub type FeatureRows = Vec<(String, Vec<f64>)>;

/// Feature rows with a consistent width, and that width.
pub fn load_feature_rows(path: &Path, sparse: bool) -> Result<(FeatureRows, usize)> {
    let text = read(path)?;
    let records: Vec<(usize, Vec<String>)> = if sparse {
        content_lines(&text)
            .map(|(line, l)| (line, l.split_whitespace().map(str::to_string).collect()))
            .collect()
    } else {
        csv_records(path, &text)?
    };
    let mut rows: FeatureRows = Vec::new();
    let mut seen = BTreeSet::new();
    let mut width: Option<usize> = None;
    let mut max_sparse = 0;
    for (line, cells) in records {
        let (id, values) =
            if sparse {
                let mut vals = Vec::new();
                for tok in &cells[1..] {
                    let (idx, val) = tok.split_once(':').ok_or_else(|| {
                        parse_error(path, line, format!("expected idx:value, got `{tok}`"))
                    })?;
                    let idx: usize = idx.parse().map_err(|_| {
                        parse_error(path, line, format!("bad column index `{idx}`"))
                    })?;
                    let val: f64 = val.parse().map_err(|_| {
                        parse_error(path, line, format!("non-numeric value `{val}`"))
                    })?;
                    max_sparse = max_sparse.max(idx + 1);
                    vals.push((idx, val));
                }
                let mut dense = vec![0.0; vals.iter().map(|p| p.0 + 1).max().unwrap_or(0)];
                for (idx, val) in vals {
                    dense[idx] = val;
                }
                (cells[0].clone(), dense)
            } else {
                if rows.is_empty() && cells[0].eq_ignore_ascii_case("id") {
                    continue;
                }
                let mut vals = Vec::with_capacity(cells.len() - 1);
                for cell in &cells[1..] {
                    vals.push(cell.parse::<f64>().map_err(|_| {
                        parse_error(path, line, format!("non-numeric cell `{cell}`"))
                    })?);
                }
                match width {
                    None => width = Some(vals.len()),
                    Some(w) if w != vals.len() => {
                        return Err(parse_error(
                            path,
                            line,
                            format!("ragged row: {} values, expected {w}", vals.len()),
                        ))
                    }
                    _ => {}
                }
                (cells[0].clone(), vals)
            };
        if !valid_token(&id) || id.is_empty() {
            return Err(parse_error(path, line, format!("malformed node id `{id}`")));
        }
        if !seen.insert(id.clone()) {
            return Err(parse_error(path, line, format!("duplicate node id `{id}`")));
        }
        rows.push((id, values));
    }
    let width = if sparse {
        max_sparse
    } else {
        width.unwrap_or(0)
    };
    Ok((
        rows.into_iter()
            .map(|(id, mut v)| {
                v.resize(width, 0.0);
                (id, v)
            })
            .collect(),
        width,
    ))
}

/// Features ordered by the dense ids of `ids`; every node must be present.
pub fn load_features(path: &Path, ids: &IdMap, sparse: bool) -> Result<FeatureMatrix> {
    let (rows, width) = load_feature_rows(path, sparse)?;
    assemble_features(path, rows, width, ids)
}

fn assemble_features(
    path: &Path,
    rows: FeatureRows,
    width: usize,
    ids: &IdMap,
) -> Result<FeatureMatrix> {
    let mut slots: Vec<Option<Vec<f64>>> = vec![None; ids.len()];
    for (id, vals) in rows {
        let dense = ids.dense(&id).ok_or_else(|| Error::Dataset {
            path: path.to_path_buf(),
            message: format!("unknown node id `{id}`"),
        })?;
        slots[dense] = Some(vals);
    }
    let mut data = Vec::with_capacity(ids.len() * width);
    for (i, slot) in slots.into_iter().enumerate() {
        let row = slot.ok_or_else(|| Error::Dataset {
            path: path.to_path_buf(),
            message: format!("node `{}` has no feature row", ids.external(i)),
        })?;
        data.extend(row);
    }
    FeatureMatrix::new(ids.len(), width, data)
}

fn load_pairs(path: &Path) -> Result<Vec<(usize, String, String)>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (line, cells) in csv_records(path, &text)? {
        if cells.len() != 2 {
            return Err(parse_error(path, line, "expected `id,class`"));
        }
        if out.is_empty() && cells[0].eq_ignore_ascii_case("id") {
            continue;
        }
        let [id, class]: [String; 2] = cells.try_into().unwrap();
        out.push((line, id, class));
    }
    Ok(out)
}

fn sort_classes(names: BTreeSet<String>) -> Vec<String> {
    let mut v: Vec<String> = names.into_iter().collect();
    if v.iter().all(|s| s.parse::<i64>().is_ok()) {
        v.sort_by_key(|s| s.parse::<i64>().unwrap());
    }
    v
}

/// Dense class per node and the class names.
pub fn load_labels(path: &Path, ids: &IdMap) -> Result<(Vec<usize>, Vec<String>)> {
    let pairs = load_pairs(path)?;
    let classes = sort_classes(pairs.iter().map(|p| p.2.clone()).collect());
    let class_index: HashMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut labels = vec![None; ids.len()];
    for (line, id, class) in &pairs {
        let dense = ids
            .dense(id)
            .ok_or_else(|| parse_error(path, *line, format!("unknown node id `{id}`")))?;
        if labels[dense].replace(class_index[class.as_str()]).is_some() {
            return Err(parse_error(
                path,
                *line,
                format!("duplicate label for `{id}`"),
            ));
        }
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| Error::Dataset {
                path: path.to_path_buf(),
                message: format!("node `{}` has no label", ids.external(i)),
            })
        })
        .collect::<Result<_>>()?;
    Ok((labels, classes))
}

#[derive(Deserialize, Serialize)]
struct SplitFile {
    train: Vec<serde_json::Value>,
    #[serde(default)]
    test: Vec<serde_json::Value>,
}

fn id_string(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

pub fn load_splits(path: &Path, ids: &IdMap) -> Result<Splits> {
    let text = read(path)?;
    let file: SplitFile = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let resolve = |vals: &[serde_json::Value]| -> Result<Vec<NodeId>> {
        let mut out = Vec::with_capacity(vals.len());
        for v in vals {
            let id = id_string(v).ok_or_else(|| Error::Dataset {
                path: path.to_path_buf(),
                message: format!("split entry {v} is not a node id"),
            })?;
            out.push(ids.dense(&id).ok_or_else(|| Error::Dataset {
                path: path.to_path_buf(),
                message: format!("unknown node id `{id}` in splits"),
            })?);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    };
    Ok(Splits {
        train: resolve(&file.train)?,
        test: resolve(&file.test)?,
    })
}

impl Dataset {
    pub fn load(paths: &DatasetPaths) -> Result<Dataset> {
        let raw_edges = load_hypergraph(&paths.hyperedges)?;
        let (feature_rows, width) = load_feature_rows(&paths.features, paths.sparse_features)?;

        let id_map = match &paths.nodes {
            Some(node_path) => {
                let declared = IdMap::from_ids(load_node_list(node_path)?);
                for (e, edge) in raw_edges.iter().enumerate() {
                    if let Some(id) = edge.iter().find(|id| declared.dense(id).is_none()) {
                        return Err(Error::Dataset {
                            path: paths.hyperedges.clone(),
                            message: format!("hyperedge {e} references undeclared node `{id}`"),
                        });
                    }
                }
                declared
            }
            None => IdMap::from_ids(
                raw_edges
                    .iter()
                    .flatten()
                    .cloned()
                    .chain(feature_rows.iter().map(|r| r.0.clone())),
            ),
        };

        let edges: Vec<Vec<NodeId>> = raw_edges
            .iter()
            .map(|e| e.iter().map(|id| id_map.dense(id).unwrap()).collect())
            .collect();
        let hypergraph = Hypergraph::build(id_map.len(), &edges)?;
        let features = assemble_features(&paths.features, feature_rows, width, &id_map)?;
        let (labels, classes) = match &paths.labels {
            Some(p) => {
                let (l, c) = load_labels(p, &id_map)?;
                (Some(l), c)
            }
            None => (None, Vec::new()),
        };
        let splits = paths
            .splits
            .as_deref()
            .map(|p| load_splits(p, &id_map))
            .transpose()?;
        Ok(Dataset {
            hypergraph,
            features,
            labels,
            classes,
            id_map,
            splits,
        })
    }

    /// Writes the dataset in the formats read by [`Dataset::load`] and
    /// returns the paths used. Files are named `<stem>.hyperedges`,
    /// `<stem>.features.csv`, `<stem>.labels.csv`, `<stem>.splits.json` and
    /// `<stem>.nodes`.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<DatasetPaths> {
        let file = |suffix: &str| dir.join(format!("{stem}.{suffix}"));
        let ext = |v: NodeId| self.id_map.external(v);

        let mut text = String::new();
        for e in 0..self.hypergraph.num_edges() {
            let members: Vec<&str> = self
                .hypergraph
                .nodes_of(e)
                .iter()
                .map(|&v| ext(v))
                .collect();
            text.push_str(&members.join(" "));
            text.push('\n');
        }
        let paths = DatasetPaths {
            hyperedges: file("hyperedges"),
            features: file("features.csv"),
            labels: self.labels.as_ref().map(|_| file("labels.csv")),
            splits: self.splits.as_ref().map(|_| file("splits.json")),
            nodes: Some(file("nodes")),
            sparse_features: false,
        };
        write_text(&paths.hyperedges, &text)?;

        let mut text = String::new();
        for v in 0..self.features.rows() {
            text.push_str(ext(v));
            for x in self.features.row(v) {
                // `{:?}` on f64 prints the shortest exactly round-tripping form
                text.push_str(&format!(",{x:?}"));
            }
            text.push('\n');
        }
        write_text(&paths.features, &text)?;

        let nodes: String = self
            .id_map
            .externals()
            .iter()
            .map(|s| format!("{s}\n"))
            .collect();
        write_text(paths.nodes.as_ref().unwrap(), &nodes)?;

        if let (Some(labels), Some(p)) = (&self.labels, &paths.labels) {
            let text: String = labels
                .iter()
                .enumerate()
                .map(|(v, &c)| format!("{},{}\n", ext(v), self.classes[c]))
                .collect();
            write_text(p, &text)?;
        }
        if let (Some(s), Some(p)) = (&self.splits, &paths.splits) {
            let to_ids =
                |v: &[NodeId]| v.iter().map(|&x| serde_json::Value::from(ext(x))).collect();
            let doc = SplitFile {
                train: to_ids(&s.train),
                test: to_ids(&s.test),
            };
            write_text(p, &serde_json::to_string_pretty(&doc).unwrap())?;
        }
        Ok(paths)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Parameters as recorded in a result document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub budget: usize,
    pub k: usize,
    pub alpha: f64,
    pub theta: f64,
    pub radius: f64,
    pub beta: f64,
    pub gamma: f64,
    pub backend: Backend,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizers {
    pub moi: f64,
    pub edv: f64,
}

/// Serialized selection outcome. Field order is fixed by declaration
/// order, so documents diff cleanly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool: String,
    pub version: String,
    pub params: RunParams,
    pub normalizers: Normalizers,
    /// External ids in selection order.
    pub seeds: Vec<String>,
    pub gains: Vec<f64>,
    pub trace: Vec<TraceStep>,
}

impl ResultDocument {
    pub fn new(result: &SelectionResult, config: &SelectionConfig, ids: &IdMap) -> Self {
        let ResolvedParams {
            theta,
            radius,
            moi_hat,
            edv_hat,
        } = result.resolved;
        ResultDocument {
            tool: "hyperseed".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            params: RunParams {
                budget: config.budget,
                k: config.k,
                alpha: config.alpha,
                theta,
                radius,
                beta: config.beta,
                gamma: config.gamma,
                backend: config.backend,
                seed: config.seed,
            },
            normalizers: Normalizers {
                moi: moi_hat,
                edv: edv_hat,
            },
            seeds: result
                .seeds
                .iter()
                .map(|&v| ids.external(v).to_string())
                .collect(),
            gains: result.gains.clone(),
            trace: result.trace.clone(),
        }
    }
}

/// Writes a result document as pretty-printed JSON. Floats are written in
/// their shortest exactly round-tripping form; an infinite radius is written
/// as `null`.
pub fn write_result(doc: &ResultDocument, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_result(path: &Path) -> Result<ResultDocument> {
    let text = read(path)?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
    // non-finite floats serialize as null
    if let Some(params) = value.get_mut("params").and_then(|p| p.as_object_mut()) {
        for key in ["theta", "radius"] {
            if params.get(key).is_some_and(|v| v.is_null()) {
                params.insert(key.into(), serde_json::Value::from(f64::MAX));
            }
        }
    }
    let mut doc: ResultDocument = serde_json::from_value(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    for x in [&mut doc.params.theta, &mut doc.params.radius] {
        if *x == f64::MAX {
            *x = f64::INFINITY;
        }
    }
    Ok(doc)
}

/// Seeds from either a result document (`.json`) or a plain list with one
/// external id per line.
pub fn read_seed_ids(path: &Path) -> Result<Vec<String>> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        return Ok(read_result(path)?.seeds);
    }
    Ok(content_lines(&text).map(|(_, l)| l.to_string()).collect())
}

/// Class histogram keyed by class name, for reporting.
pub fn class_counts(labels: &[usize], classes: &[String]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for &c in labels {
        *out.entry(classes[c].clone()).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tempfile::TempDir;

    fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn hyperedge_file() {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "a.hyperedges", "0 1 2\n1 2\n");
        assert_eq!(
            load_hypergraph(&p).unwrap(),
            vec![vec!["0", "1", "2"], vec!["1", "2"]]
        );
        let p = write(&dir, "b.hyperedges", "# header\n0 1\n\n");
        assert_eq!(load_hypergraph(&p).unwrap(), vec![vec!["0", "1"]]);
        let p = write(&dir, "c.hyperedges", "");
        assert!(load_hypergraph(&p).unwrap().is_empty());
        let p = write(&dir, "d.hyperedges", "0 1\n2,3\n");
        match load_hypergraph(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn feature_file() {
        let dir = TempDir::new().unwrap();
        let ids = IdMap::from_ids(["0".to_string(), "1".to_string()]);
        let p = write(&dir, "f.csv", "0,1.0,0.0\n1,0.0,1.0\n");
        let f = load_features(&p, &ids, false).unwrap();
        assert_eq!(
            f,
            FeatureMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap()
        );
        let p = write(&dir, "h.csv", "id,a,b\n1,0.0,1.0\n0,1.0,0.0\n");
        assert_eq!(load_features(&p, &ids, false).unwrap(), f);

        let dup = write(&dir, "dup.csv", "0,1.0\n0,2.0\n");
        assert!(matches!(
            load_features(&dup, &ids, false),
            Err(Error::Parse { line: 2, .. })
        ));
        let missing = write(&dir, "m.csv", "0,1.0\n");
        assert!(matches!(
            load_features(&missing, &ids, false),
            Err(Error::Dataset { .. })
        ));
        let ragged = write(&dir, "r.csv", "0,1.0,2.0\n1,1.0\n");
        assert!(matches!(
            load_features(&ragged, &ids, false),
            Err(Error::Parse { line: 2, .. })
        ));
        let text = write(&dir, "t.csv", "0,1.0\n1,abc\n");
        assert!(matches!(
            load_features(&text, &ids, false),
            Err(Error::Parse { line: 2, .. })
        ));

        let sparse = write(&dir, "s.txt", "0 0:1.0\n1 1:1.0\n");
        assert_eq!(load_features(&sparse, &ids, true).unwrap(), f);
    }

    #[test]
    fn numeric_ids_sort_numerically() {
        let ids = IdMap::from_ids(["10", "2", "1"].map(String::from));
        assert_eq!(ids.externals(), &["1", "2", "10"]);
        let ids = IdMap::from_ids(["b", "a", "10"].map(String::from));
        assert_eq!(ids.externals(), &["10", "a", "b"]);
    }

    #[test]
    fn missing_feature_row_rejected_at_load() {
        let dir = TempDir::new().unwrap();
        let paths = DatasetPaths {
            hyperedges: write(&dir, "g.hyperedges", "a b c\n"),
            features: write(&dir, "g.features.csv", "a,1\nb,2\n"),
            ..Default::default()
        };
        let err = Dataset::load(&paths).unwrap_err();
        assert!(err.to_string().contains("`c` has no feature row"), "{err}");
    }

    #[test]
    fn undeclared_node_rejected() {
        let dir = TempDir::new().unwrap();
        let paths = DatasetPaths {
            hyperedges: write(&dir, "g.hyperedges", "a b\nb z\n"),
            features: write(&dir, "g.features.csv", "a,1\nb,2\n"),
            nodes: Some(write(&dir, "g.nodes", "a\nb\n")),
            ..Default::default()
        };
        assert!(matches!(Dataset::load(&paths), Err(Error::Dataset { .. })));
    }

    #[test]
    fn result_round_trip() {
        let dir = TempDir::new().unwrap();
        let ids = IdMap::from_ids(["x", "y", "z"].map(String::from));
        let result = SelectionResult {
            seeds: vec![2, 0],
            gains: vec![0.1 + 0.2, 1.0 / 3.0],
            trace: vec![
                TraceStep {
                    moi: 3,
                    edv: 1.5,
                    objective: 0.3,
                },
                TraceStep {
                    moi: 4,
                    edv: 2.0000000000000004,
                    objective: 0.6333333333333333,
                },
            ],
            resolved: ResolvedParams {
                theta: 0.125,
                radius: f64::INFINITY,
                moi_hat: 9.0,
                edv_hat: 3.0,
            },
            evaluations: 5,
        };
        let cfg = SelectionConfig {
            budget: 2,
            ..Default::default()
        };
        let doc = ResultDocument::new(&result, &cfg, &ids);
        assert_eq!(doc.seeds, vec!["z", "x"]);
        assert_eq!(doc.trace.len(), cfg.budget);
        let p = dir.path().join("out.json");
        write_result(&doc, &p).unwrap();
        let back = read_result(&p).unwrap();
        assert_eq!(back, doc);
        assert_eq!(read_seed_ids(&p).unwrap(), vec!["z", "x"]);
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        (2usize..12, 1usize..4).prop_flat_map(|(n, d)| {
            (
                prop::collection::vec(prop::collection::vec(0..n, 1..4), 1..8),
                prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, n * d),
                prop::collection::vec(0usize..3, n),
                prop::collection::vec(any::<bool>(), n),
                prop::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n),
            )
                .prop_map(move |(edges, data, labels, is_train, test)| {
                    let ids = IdMap::from_ids((0..n).map(|i| format!("n{i:02}")));
                    let classes = vec!["c0".to_string(), "c1".to_string(), "c2".to_string()];
                    Dataset {
                        hypergraph: Hypergraph::build(n, &edges).unwrap(),
                        features: FeatureMatrix::new(n, d, data).unwrap(),
                        labels: Some(labels),
                        classes,
                        id_map: ids,
                        splits: Some(Splits {
                            train: (0..n).filter(|&i| is_train[i]).collect(),
                            test,
                        }),
                    }
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn save_then_load_is_identity(ds in arb_dataset()) {
            let dir = TempDir::new().unwrap();
            let paths = ds.save(dir.path(), "ds").unwrap();
            let back = Dataset::load(&paths).unwrap();
            // class ids are reassigned from the names that occur
            prop_assert_eq!(&back.hypergraph, &ds.hypergraph);
            prop_assert_eq!(&back.features, &ds.features);
            prop_assert_eq!(&back.id_map, &ds.id_map);
            prop_assert_eq!(&back.splits, &ds.splits);
            let names = |d: &Dataset| d.labels.as_ref().unwrap().iter()
                .map(|&c| d.classes[c].clone()).collect::<Vec<_>>();
            prop_assert_eq!(names(&back), names(&ds));
        }
    }
}
