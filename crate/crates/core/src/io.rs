//! Text formats: edge-list and numeric TSV with `# kind key=value` headers,
//! prior-set and measurement tables, and atomic file writes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::interpret::FactorMeasurement;
use crate::linalg::DenseMatrix;
use crate::netsim::{Edge, NetworkModel, SimulatedDataset, Topology};

/// Metadata line `# <kind> key=value ...`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Header {
    pub kind: String,
    pub fields: BTreeMap<String, String>,
}

impl Header {
    pub fn get<T: std::str::FromStr>(&self, key: &str, path: &str) -> Result<T> {
        let raw = self.fields.get(key).ok_or_else(|| Error::Parse {
            path: path.to_string(),
            line: 1,
            msg: format!("header lacks '{key}='"),
        })?;
        raw.parse().map_err(|_| Error::Parse {
            path: path.to_string(),
            line: 1,
            msg: format!("cannot parse {key}={raw}"),
        })
    }
}

fn parse_header(line: &str) -> Option<Header> {
    let mut words = line.strip_prefix('#')?.split_whitespace();
    let kind = words.next()?.to_string();
    let fields = words
        .filter_map(|w| w.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect();
    Some(Header { kind, fields })
}

fn perr(path: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), line, msg: msg.into() }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn format_network(net: &NetworkModel) -> String {
    let mut s = format!(
        "# network n={} p={} topology={} seed={} degree={}\n",
        net.n_observed, net.n_hidden, net.topology, net.seed, net.mean_out_degree
    );
    for e in &net.edges {
        let _ = writeln!(s, "{}\t{}\t{}", e.regulator + 1, e.target + 1, e.weight);
    }
    s
}

/// Parses an edge list; indices in the file are 1-based.
pub fn parse_network(text: &str, path: &str) -> Result<NetworkModel> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .and_then(|(_, l)| parse_header(l))
        .filter(|h| h.kind == "network")
        .ok_or_else(|| perr(path, 1, "expected '# network ...' header"))?;
    let n: usize = header.get("n", path)?;
    let p: usize = header.get("p", path)?;
    let topology: Topology = header.get("topology", path)?;
    let seed: u64 = header.get("seed", path)?;
    let mut edges = Vec::new();
    for (k, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(perr(path, k + 1, format!("expected 3 tab-separated fields, got {}", cols.len())));
        }
        let idx = |s: &str, max: usize, what: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(i) if (1..=max).contains(&i) => Ok(i - 1),
                _ => Err(perr(path, k + 1, format!("{what} '{s}' not in 1..={max}"))),
            }
        };
        let regulator = idx(cols[0], p, "regulator")?;
        let target = idx(cols[1], n, "target")?;
        let weight: f64 = cols[2].parse().map_err(|_| perr(path, k + 1, format!("bad weight '{}'", cols[2])))?;
        if !weight.is_finite() {
            return Err(perr(path, k + 1, "non-finite weight"));
        }
        edges.push(Edge { regulator, target, weight });
    }
    edges.sort_by_key(|e| (e.regulator, e.target));
    if let Some(w) = edges.windows(2).find(|w| (w[0].regulator, w[0].target) == (w[1].regulator, w[1].target)) {
        return Err(perr(path, 0, format!("duplicate edge {} -> {}", w[0].regulator + 1, w[0].target + 1)));
    }
    let mean_out_degree = match header.fields.get("degree") {
        Some(_) => header.get("degree", path)?,
        None if p > 0 => edges.len() as f64 / p as f64,
        None => 0.0,
    };
    Ok(NetworkModel { n_observed: n, n_hidden: p, edges, topology, mean_out_degree, seed })
}

pub fn read_network(path: &Path) -> Result<NetworkModel> {
    parse_network(&read_text(path)?, &path.display().to_string())
}

pub fn write_network(path: &Path, net: &NetworkModel) -> Result<()> {
    atomic_write(path, &format_network(net))
}

/// Numeric TSV with a header line; values use shortest round-trip formatting.
pub fn format_matrix(header: &str, m: &DenseMatrix) -> String {
    let mut s = String::with_capacity(m.rows() * m.cols() * 20 + header.len() + 2);
    s.push_str(header);
    s.push('\n');
    for i in 0..m.rows() {
        for (j, x) in m.row(i).iter().enumerate() {
            if j > 0 {
                s.push('\t');
            }
            let _ = write!(s, "{x}");
        }
        s.push('\n');
    }
    s
}

/// Parses a numeric TSV; `#` lines other than the first are ignored.
pub fn parse_matrix(text: &str, path: &str) -> Result<(Option<Header>, DenseMatrix)> {
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.starts_with('#') {
            if k == 0 {
                header = parse_header(line);
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split('\t')
            .map(|f| f.trim().parse::<f64>().map_err(|_| perr(path, k + 1, format!("bad number '{f}'"))))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(perr(path, k + 1, format!("{} fields, expected {}", row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    let m = DenseMatrix::from_rows(&rows).map_err(|e| perr(path, 0, e.to_string()))?;
    Ok((header, m))
}

pub fn read_matrix(path: &Path) -> Result<(Option<Header>, DenseMatrix)> {
    parse_matrix(&read_text(path)?, &path.display().to_string())
}

pub fn data_header(ds: &SimulatedDataset) -> String {
    format!("# data m={} n={} noise={} seed={}", ds.g.rows(), ds.g.cols(), ds.noise_level, ds.seed)
}

pub fn regulators_header(ds: &SimulatedDataset) -> String {
    format!("# regulators m={} p={} seed={}", ds.r_gold.rows(), ds.r_gold.cols(), ds.seed)
}

/// Reads a dataset written with [`data_header`]; the regulator matrix is
/// supplied separately because it lives in its own file.
pub fn parse_dataset(data: &str, regulators: &str, path: &str) -> Result<SimulatedDataset> {
    let (h, g) = parse_matrix(data, path)?;
    let h = h.filter(|h| h.kind == "data").ok_or_else(|| perr(path, 1, "expected '# data ...' header"))?;
    let (_, r_gold) = parse_matrix(regulators, path)?;
    if h.get::<usize>("m", path)? != g.rows() || h.get::<usize>("n", path)? != g.cols() {
        return Err(perr(path, 1, "header dimensions disagree with the table"));
    }
    Ok(SimulatedDataset { g, r_gold, noise_level: h.get("noise", path)?, seed: h.get("seed", path)? })
}

/// `set_name<TAB>member_id` lines (1-based member ids); sets keep first-appearance order.
pub fn parse_prior_sets(text: &str, path: &str) -> Result<Vec<(String, Vec<usize>)>> {
    let mut sets: Vec<(String, Vec<usize>)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let (name, member) = line.split_once('\t').ok_or_else(|| perr(path, k + 1, "expected set_name<TAB>member_id"))?;
        let id: usize = match member.trim().parse::<usize>() {
            Ok(i) if i >= 1 => i - 1,
            _ => return Err(perr(path, k + 1, format!("member id '{member}' is not a positive integer"))),
        };
        match sets.iter_mut().find(|(n, _)| n == name) {
            Some((_, members)) => {
                if !members.contains(&id) {
                    members.push(id);
                }
            }
            None => sets.push((name.to_string(), vec![id])),
        }
    }
    for (_, m) in &mut sets {
        m.sort_unstable();
    }
    Ok(sets)
}

/// `label<TAB>config_index<TAB>value` lines (1-based configuration indices),
/// grouped by label in first-appearance order.
pub fn parse_measurements(text: &str, path: &str) -> Result<Vec<FactorMeasurement>> {
    let mut out: Vec<FactorMeasurement> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(perr(path, k + 1, "expected label<TAB>config_index<TAB>value"));
        }
        let idx: usize = match cols[1].trim().parse::<usize>() {
            Ok(i) if i >= 1 => i - 1,
            _ => return Err(perr(path, k + 1, format!("bad configuration index '{}'", cols[1]))),
        };
        let value: f64 = cols[2].trim().parse().map_err(|_| perr(path, k + 1, format!("bad value '{}'", cols[2])))?;
        match out.iter_mut().find(|m| m.label == cols[0]) {
            Some(m) => {
                m.config_indices.push(idx);
                m.values.push(value);
            }
            None => out.push(FactorMeasurement {
                label: cols[0].to_string(),
                config_indices: vec![idx],
                values: vec![value],
            }),
        }
    }
    Ok(out)
}
