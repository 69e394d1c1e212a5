use serde::Deserialize;

use crate::error::{Error, Result};

/// Quasi-cyclic LDPC code with its expanded Tanner graph.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    pub name: String,
    pub id: u32,
    pub n: usize,
    pub k: usize,
    pub rate: f64,
    pub circulant_size: usize,
    /// Circulant shift per base entry, −1 for a zero block.
    pub base_matrix: Vec<Vec<i32>>,
    /// Edge-perspective variable-degree distribution; entry i is the
    /// coefficient of xⁱ.
    pub lambda: Vec<f64>,
    /// Edge-perspective check-degree distribution.
    pub rho: Vec<f64>,
    pub edge_types: Vec<String>,
    /// Column indices of each parity check.
    pub checks: Vec<Vec<u32>>,
    /// Row indices of each variable.
    pub vars: Vec<Vec<u32>>,
}

#[derive(Debug, Deserialize)]
struct Sidecar {
    name: String,
    id: u32,
    rate: f64,
    circulant_size: usize,
    lambda: Vec<f64>,
    rho: Vec<f64>,
    #[serde(default)]
    edge_types: Vec<String>,
    base_matrix: Vec<Vec<i32>>,
}

/// Expands a base matrix: block (r, c) with shift s puts a 1 at
/// (r·Z + i, c·Z + (i + s) mod Z).
pub fn expand_base(base: &[Vec<i32>], z: usize) -> Vec<Vec<u32>> {
    let rows = base.len();
    let mut checks = vec![Vec::new(); rows * z];
    for (br, row) in base.iter().enumerate() {
        for (bc, &s) in row.iter().enumerate() {
            if s < 0 {
                continue;
            }
            for i in 0..z {
                checks[br * z + i].push((bc * z + (i + s as usize) % z) as u32);
            }
        }
    }
    for c in checks.iter_mut() {
        c.sort_unstable();
    }
    checks
}

/// Parses an alist file into (n, check adjacency).
pub fn parse_alist(text: &str) -> Result<(usize, Vec<Vec<u32>>)> {
    let bad = |m: &str| Error::CodeFormat(format!("alist: {m}"));
    let mut nums = text.split_whitespace().map(|t| t.parse::<usize>());
    let mut next = || -> Result<usize> {
        nums.next().ok_or_else(|| bad("unexpected end"))?.map_err(|_| bad("non-integer token"))
    };
    let n = next()?;
    let m = next()?;
    let max_col = next()?;
    let max_row = next()?;
    let col_deg: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
    let row_deg: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
    let mut vars = vec![Vec::new(); n];
    for (c, &d) in col_deg.iter().enumerate() {
        for j in 0..max_col {
            let v = next()?;
            if j < d {
                if v == 0 || v > m {
                    return Err(bad("row index out of range"));
                }
                vars[c].push((v - 1) as u32);
            } else if v != 0 {
                return Err(bad("non-zero padding"));
            }
        }
    }
    let mut checks = vec![Vec::new(); m];
    for (r, &d) in row_deg.iter().enumerate() {
        for j in 0..max_row {
            let v = next()?;
            if j < d {
                if v == 0 || v > n {
                    return Err(bad("column index out of range"));
                }
                checks[r].push((v - 1) as u32);
            } else if v != 0 {
                return Err(bad("non-zero padding"));
            }
        }
    }
    // Column and row lists must describe the same matrix.
    let mut from_cols = vec![Vec::new(); m];
    for (c, rows) in vars.iter().enumerate() {
        for &r in rows {
            from_cols[r as usize].push(c as u32);
        }
    }
    for (a, b) in from_cols.iter_mut().zip(checks.iter_mut()) {
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(bad("row and column lists disagree"));
        }
    }
    Ok((n, checks))
}

/// Serializes a check adjacency as alist text.
pub fn write_alist(n: usize, checks: &[Vec<u32>]) -> String {
    let mut vars = vec![Vec::new(); n];
    for (r, cols) in checks.iter().enumerate() {
        for &c in cols {
            vars[c as usize].push(r as u32 + 1);
        }
    }
    let max_col = vars.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = checks.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = format!("{} {}\n{} {}\n", n, checks.len(), max_col, max_row);
    let join = |v: Vec<String>| v.join(" ") + "\n";
    out += &join(vars.iter().map(|v| v.len().to_string()).collect());
    out += &join(checks.iter().map(|v| v.len().to_string()).collect());
    for v in &vars {
        let mut f: Vec<String> = v.iter().map(u32::to_string).collect();
        f.resize(max_col, "0".into());
        out += &join(f);
    }
    for v in checks {
        let mut f: Vec<String> = v.iter().map(|c| (c + 1).to_string()).collect();
        f.resize(max_row, "0".into());
        out += &join(f);
    }
    out
}

fn degree_distribution(degrees: impl Iterator<Item = usize>) -> Vec<f64> {
    let degrees: Vec<usize> = degrees.collect();
    let edges: usize = degrees.iter().sum();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let mut dist = vec![0.0; max];
    for d in degrees {
        if d > 0 {
            dist[d - 1] += d as f64 / edges as f64;
        }
    }
    dist
}

impl LdpcCode {
    /// Loads a code from alist text and its TOML sidecar, checking that the
    /// base matrix expands to the alist matrix and that the metadata agrees.
    pub fn from_files(alist: &str, sidecar: &str) -> Result<Self> {
        let meta: Sidecar = toml::from_str(sidecar).map_err(|e| Error::CodeFormat(format!("sidecar: {e}")))?;
        let (n, checks) = parse_alist(alist)?;
        let z = meta.circulant_size;
        let cols = meta.base_matrix.first().map(Vec::len).unwrap_or(0);
        if meta.base_matrix.iter().any(|r| r.len() != cols) || cols * z != n {
            return Err(Error::CodeFormat(format!("{}: base matrix does not match n = {n}", meta.name)));
        }
        if expand_base(&meta.base_matrix, z) != checks {
            return Err(Error::CodeFormat(format!("{}: circulant expansion differs from alist", meta.name)));
        }
        let m = checks.len();
        let k = n - m;
        let rate = k as f64 / n as f64;
        if (rate - meta.rate).abs() > 1e-9 {
            return Err(Error::CodeFormat(format!("{}: sidecar rate {} but k/n = {rate}", meta.name, meta.rate)));
        }
        let mut vars = vec![Vec::new(); n];
        for (r, cs) in checks.iter().enumerate() {
            for &c in cs {
                vars[c as usize].push(r as u32);
            }
        }
        let code = LdpcCode {
            name: meta.name,
            id: meta.id,
            n,
            k,
            rate,
            circulant_size: z,
            base_matrix: meta.base_matrix,
            lambda: meta.lambda,
            rho: meta.rho,
            edge_types: meta.edge_types,
            checks,
            vars,
        };
        code.check_distributions()?;
        Ok(code)
    }

    /// Degree distributions computed from the graph.
    pub fn measured_distributions(&self) -> (Vec<f64>, Vec<f64>) {
        let lam = degree_distribution(self.vars.iter().map(Vec::len));
        let rho = degree_distribution(self.checks.iter().map(Vec::len));
        (lam, rho)
    }

    fn check_distributions(&self) -> Result<()> {
        let close = |a: &[f64], b: &[f64]| {
            let len = a.len().max(b.len());
            (0..len).all(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs() < 1e-9)
        };
        for (name, d) in [("lambda", &self.lambda), ("rho", &self.rho)] {
            if d.iter().any(|&v| v < 0.0) || (d.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::CodeFormat(format!("{}: {name} is not a distribution", self.name)));
            }
        }
        let (lam, rho) = self.measured_distributions();
        if !close(&lam, &self.lambda) || !close(&rho, &self.rho) {
            return Err(Error::CodeFormat(format!("{}: degree metadata disagrees with the graph", self.name)));
        }
        Ok(())
    }

    pub fn syndrome_len(&self) -> usize {
        self.n - self.k
    }

    pub fn edge_count(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }
}

/// s = H·bits over GF(2), computed block-wise from the circulant shifts.
pub fn ldpc_syndrome_encode(bits: &[u8], code: &LdpcCode) -> Result<Vec<u8>> {
    if bits.len() != code.n {
        return Err(Error::LengthMismatch { expected: code.n, actual: bits.len() });
    }
    let z = code.circulant_size;
    let mut syn = vec![0u8; code.syndrome_len()];
    for (br, row) in code.base_matrix.iter().enumerate() {
        let out = &mut syn[br * z..(br + 1) * z];
        for (bc, &s) in row.iter().enumerate() {
            if s < 0 {
                continue;
            }
            let block = &bits[bc * z..(bc + 1) * z];
            let s = s as usize;
            // Row i of a circulant with shift s reads column (i + s) mod Z.
            for (i, o) in out[..z - s].iter_mut().enumerate() {
                *o ^= block[i + s] & 1;
            }
            for (i, o) in out[z - s..].iter_mut().enumerate() {
                *o ^= block[i] & 1;
            }
        }
    }
    Ok(syn)
}

/// s = H·bits using the expanded adjacency lists.
pub fn syndrome_expanded(bits: &[u8], code: &LdpcCode) -> Vec<u8> {
    code.checks
        .iter()
        .map(|cols| cols.iter().fold(0u8, |acc, &c| acc ^ (bits[c as usize] & 1)))
        .collect()
}
