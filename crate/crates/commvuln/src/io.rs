//! Text formats: edge lists, `node community` files and metric CSVs.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use commvuln_core::{Graph, MetricVector, Partition};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no edges or nodes found")]
    Empty,
    #[error(transparent)]
    Graph(#[from] commvuln_core::Error),
}

/// How node tokens become dense ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdMode {
    /// Ids follow the order in which labels first appear.
    #[default]
    FirstSeen,
    /// Tokens are non-negative integers used as ids directly; gaps become
    /// isolated nodes.
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeListOptions {
    pub comment_prefix: String,
    /// Field separator; `None` splits on any whitespace.
    pub separator: Option<char>,
    pub ids: IdMode,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        EdgeListOptions {
            comment_prefix: "#".into(),
            separator: None,
            ids: IdMode::FirstSeen,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub duplicates: usize,
    pub self_loops: usize,
    pub weighted: bool,
}

struct Labeler {
    mode: IdMode,
    index: HashMap<String, usize>,
    labels: Vec<String>,
    max_id: Option<usize>,
}

impl Labeler {
    fn new(mode: IdMode) -> Self {
        Labeler {
            mode,
            index: HashMap::new(),
            labels: Vec::new(),
            max_id: None,
        }
    }

    fn id(&mut self, token: &str, line: usize) -> Result<usize, IoError> {
        match self.mode {
            IdMode::FirstSeen => {
                if let Some(&id) = self.index.get(token) {
                    return Ok(id);
                }
                let id = self.labels.len();
                self.index.insert(token.to_owned(), id);
                self.labels.push(token.to_owned());
                Ok(id)
            }
            IdMode::Integer => {
                let id: usize = token.parse().map_err(|_| IoError::Parse {
                    line,
                    message: format!("node id {token:?} is not a non-negative integer"),
                })?;
                self.max_id = Some(self.max_id.map_or(id, |m| m.max(id)));
                Ok(id)
            }
        }
    }

    fn finish(self) -> Vec<String> {
        match self.mode {
            IdMode::FirstSeen => self.labels,
            IdMode::Integer => (0..self.max_id.map_or(0, |m| m + 1)).map(|i| i.to_string()).collect(),
        }
    }
}

fn fields(line: &str, sep: Option<char>) -> Vec<&str> {
    match sep {
        None => line.split_whitespace().collect(),
        Some(c) => line.split(c).map(str::trim).filter(|t| !t.is_empty()).collect(),
    }
}

/// Parses `u v [weight]` lines. Duplicate edges and self loops are dropped
/// and counted; the graph is weighted when any line carries a weight.
pub fn load_edge_list<R: BufRead>(reader: R, opts: &EdgeListOptions) -> Result<(Graph, LoadReport), IoError> {
    let mut labeler = Labeler::new(opts.ids);
    let mut edges = Vec::new();
    let mut weighted = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || (!opts.comment_prefix.is_empty() && trimmed.starts_with(&opts.comment_prefix)) {
            continue;
        }
        let toks = fields(trimmed, opts.separator);
        if toks.len() < 2 {
            return Err(IoError::Parse {
                line: lineno,
                message: "expected at least two fields".into(),
            });
        }
        let u = labeler.id(toks[0], lineno)?;
        let v = labeler.id(toks[1], lineno)?;
        let w = match toks.get(2) {
            None => 1.0,
            Some(t) => {
                weighted = true;
                let w: f64 = t.parse().map_err(|_| IoError::Parse {
                    line: lineno,
                    message: format!("weight {t:?} is not a number"),
                })?;
                if !(w > 0.0 && w.is_finite()) {
                    return Err(IoError::Parse {
                        line: lineno,
                        message: format!("weight {t:?} must be positive and finite"),
                    });
                }
                w
            }
        };
        edges.push((u, v, w));
    }
    let labels = labeler.finish();
    if labels.is_empty() {
        return Err(IoError::Empty);
    }
    let (g, build) = if weighted {
        Graph::from_weighted_edges(labels.len(), edges)?
    } else {
        Graph::from_edges(labels.len(), edges.into_iter().map(|(u, v, _)| (u, v)))?
    };
    let report = LoadReport {
        duplicates: build.duplicates,
        self_loops: build.self_loops,
        weighted,
    };
    Ok((g.with_labels(labels)?, report))
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    File::open(path).map(BufReader::new).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_edge_list_path(path: &Path, opts: &EdgeListOptions) -> Result<(Graph, LoadReport), IoError> {
    load_edge_list(open(path)?, opts)
}

fn label_index(g: &Graph) -> HashMap<String, usize> {
    match g.labels() {
        Some(labels) => labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect(),
        None => (0..g.universe_size()).map(|i| (i.to_string(), i)).collect(),
    }
}

/// Reads `node community` lines; nodes are matched by label. Every present
/// node of `g` must be assigned.
pub fn read_partition<R: BufRead>(reader: R, g: &Graph) -> Result<Partition, IoError> {
    let index = label_index(g);
    let mut communities: HashMap<String, usize> = HashMap::new();
    let mut assignment = vec![None; g.universe_size()];
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(IoError::Parse {
                line: lineno,
                message: "expected `node community`".into(),
            });
        }
        let v = *index.get(toks[0]).ok_or_else(|| IoError::Parse {
            line: lineno,
            message: format!("unknown node {:?}", toks[0]),
        })?;
        let next = communities.len();
        let c = *communities.entry(toks[1].to_owned()).or_insert(next);
        assignment[v] = Some(c);
    }
    Ok(Partition::for_graph(g, &assignment)?)
}

pub fn read_partition_path(path: &Path, g: &Graph) -> Result<Partition, IoError> {
    read_partition(open(path)?, g)
}

fn label_of(g: &Graph, v: usize) -> String {
    g.label(v).map_or_else(|| v.to_string(), str::to_owned)
}

/// Writes `node community` lines in ascending id order.
pub fn write_partition<W: Write>(mut w: W, g: &Graph, p: &Partition) -> io::Result<()> {
    for v in p.nodes() {
        writeln!(w, "{} {}", label_of(g, v), p.label(v).unwrap_or(0))?;
    }
    Ok(())
}

/// `node_id,score` rows, scores with six decimals.
pub fn write_metric_csv<W: Write>(w: W, g: &Graph, mv: &MetricVector) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node_id", "score"]).map_err(csv_err)?;
    for (v, s) in mv.iter() {
        out.write_record([label_of(g, v), format!("{s:.6}")]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> IoError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => IoError::Io(e),
        other => IoError::Io(io::Error::other(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use commvuln_core::{node_metric, NodeMetricId};

    fn load(text: &str) -> (Graph, LoadReport) {
        load_edge_list(text.as_bytes(), &EdgeListOptions::default()).unwrap()
    }

    #[test]
    fn triangle() {
        let (g, r) = load("0 1\n1 2\n2 0");
        assert_eq!((g.node_count(), g.edge_count()), (3, 3));
        assert_eq!(r, LoadReport::default());
    }

    #[test]
    fn dedup_report() {
        let (g, r) = load("0 1\n0 1\n3 3\n");
        assert_eq!((g.node_count(), g.edge_count()), (3, 1));
        assert_eq!((r.duplicates, r.self_loops), (1, 1));
        let opts = EdgeListOptions {
            ids: IdMode::Integer,
            ..Default::default()
        };
        let (g, _) = load_edge_list("0 1\n0 1\n3 3\n".as_bytes(), &opts).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 1));
    }

    #[test]
    fn first_seen_labels() {
        let (g, _) = load("# header\nb a\n\na c\n");
        assert_eq!(g.labels().unwrap(), ["b", "a", "c"]);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = load_edge_list("0 1\n# ok\n7\n".as_bytes(), &EdgeListOptions::default()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 3, .. }), "{err}");
        let err = load_edge_list("0 1 x\n".as_bytes(), &EdgeListOptions::default()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));
        assert!(matches!(
            load_edge_list("# nothing\n".as_bytes(), &EdgeListOptions::default()),
            Err(IoError::Empty)
        ));
    }

    #[test]
    fn weights_and_separators() {
        let opts = EdgeListOptions {
            separator: Some(','),
            ..Default::default()
        };
        let (g, r) = load_edge_list("x,y,2.5\ny,z\n".as_bytes(), &opts).unwrap();
        assert!(r.weighted && g.is_weighted());
        assert_eq!(g.weighted_neighbors(0).next(), Some((1, 2.5)));
    }

    #[test]
    fn partition_round_trip() {
        let (g, _) = load("a b\nb c\nc d\n");
        let p = read_partition("a x\nb x\nc y\nd y\n".as_bytes(), &g).unwrap();
        assert_eq!(p.community_count(), 2);
        let mut buf = Vec::new();
        write_partition(&mut buf, &g, &p).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "a 0\nb 0\nc 1\nd 1\n");
        assert_eq!(read_partition(buf.as_slice(), &g).unwrap(), p);
        assert!(read_partition("a x\n".as_bytes(), &g).is_err());
        assert!(matches!(
            read_partition("q x\n".as_bytes(), &g),
            Err(IoError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn metric_csv() {
        let (g, _) = load("a b\nb c\n");
        let mut buf = Vec::new();
        write_metric_csv(&mut buf, &g, &node_metric(&g, NodeMetricId::Degree)).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "node_id,score\na,1.000000\nb,2.000000\nc,1.000000\n"
        );
    }
}
