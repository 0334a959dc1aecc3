//! Configuration-model graph generation with per-direction edge weights.
//!
//! Vertices draw i.i.d. degrees, each degree becomes that many half-edges,
//! and a uniformly random perfect matching of the half-edges creates the
//! edges. Self-loops are erased and parallel edges merged, which biases
//! nothing asymptotically under a finite second moment; the erased
//! fraction is o(n) and the generator reports it. Weights are then drawn
//! for the surviving edges in sorted edge order, two independent values
//! per edge (one per direction), except for degree-dependent models where
//! the outgoing weight is a deterministic function of the sender's
//! half-edge count before erasure.
//!
//! Generation is single-threaded and fully determined by the seed.

use crate::degree::DegreeDist;
use crate::error::{Error, Result};
use crate::weight::WeightModel;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Simple undirected graph in compressed sparse rows with two weights per
/// edge. Row `u` lists its neighbors in increasing order; entry `i` of
/// `out_weights(u)` is the transmission weight from `u` toward
/// `neighbors(u)[i]`, and the matching entry of `in_weights(u)` is the
/// weight for the reverse direction. Both orientations of an edge are
/// stored, mirrored exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    w_out: Vec<f64>,
    w_in: Vec<f64>,
    seed: u64,
    degree_spec: String,
    weight_spec: String,
}

/// What generation erased, plus the pre-erasure half-edge count per vertex
/// (the degree that degree-dependent weights are evaluated at).
#[derive(Debug, Clone)]
pub struct GenStats {
    pub self_loops: usize,
    pub merged_edges: usize,
    pub pre_degrees: Vec<u32>,
}

const MAGIC: [u8; 4] = *b"NEPG";
const FORMAT_VERSION: u32 = 1;

impl WeightedGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Neighbor ids of `u`, strictly increasing.
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Weights on edges leaving `u`, aligned with `neighbors(u)`.
    pub fn out_weights(&self, u: usize) -> &[f64] {
        &self.w_out[self.offsets[u]..self.offsets[u + 1]]
    }

    /// Weights on edges entering `u`, aligned with `neighbors(u)`.
    pub fn in_weights(&self, u: usize) -> &[f64] {
        &self.w_in[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn degree_spec(&self) -> &str {
        &self.degree_spec
    }

    pub fn weight_spec(&self) -> &str {
        &self.weight_spec
    }

    /// Writes the graph in the native binary format: a header carrying
    /// (n, seed, spec strings), then per vertex its neighbor count and
    /// `(neighbor, out_weight)` runs. Incoming weights are not stored;
    /// they are the outgoing weights of the mirrored entries.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for s in [&self.degree_spec, &self.weight_spec] {
            w.write_all(&(s.len() as u32).to_le_bytes())?;
            w.write_all(s.as_bytes())?;
        }
        for u in 0..self.n {
            let nbrs = self.neighbors(u);
            w.write_all(&(nbrs.len() as u32).to_le_bytes())?;
            for (v, wt) in nbrs.iter().zip(self.out_weights(u)) {
                w.write_all(&v.to_le_bytes())?;
                w.write_all(&wt.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let corrupt = |what: &str| Error::parameter(format!("graph file {path:?}: {what}"));

        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(corrupt("not a graph file (bad magic)"));
        }
        let version = read_u32(&mut r)?;
        if version != FORMAT_VERSION {
            return Err(corrupt(&format!("unsupported format version {version}")));
        }
        let n = read_u64(&mut r)? as usize;
        let seed = read_u64(&mut r)?;
        let degree_spec = read_string(&mut r)?;
        let weight_spec = read_string(&mut r)?;

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        let mut neighbors = Vec::new();
        let mut w_out = Vec::new();
        for _ in 0..n {
            let cnt = read_u32(&mut r)? as usize;
            for _ in 0..cnt {
                neighbors.push(read_u32(&mut r)?);
                w_out.push(f64::from_le_bytes(read_bytes(&mut r)?));
            }
            offsets.push(neighbors.len());
        }

        // Recover incoming weights from the mirrored entries, validating
        // symmetry along the way.
        let mut w_in = vec![0.0; w_out.len()];
        for u in 0..n {
            for idx in offsets[u]..offsets[u + 1] {
                let v = neighbors[idx] as usize;
                if v >= n {
                    return Err(corrupt(&format!("neighbor id {v} out of range")));
                }
                let row = &neighbors[offsets[v]..offsets[v + 1]];
                match row.binary_search(&(u as u32)) {
                    Ok(pos) => w_in[idx] = w_out[offsets[v] + pos],
                    Err(_) => {
                        return Err(corrupt(&format!("edge {u}-{v} is not mirrored")));
                    }
                }
            }
        }

        let g = Self {
            n,
            offsets,
            neighbors,
            w_out,
            w_in,
            seed,
            degree_spec,
            weight_spec,
        };
        g.validate().map_err(|e| corrupt(&e.to_string()))?;
        Ok(g)
    }

    /// Edge-list CSV: one row per undirected edge with `u < v` and both
    /// directed weights, preceded by a provenance comment and a header.
    pub fn export_edge_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# graph n={} seed={} degree={} weight={}",
            self.n, self.seed, self.degree_spec, self.weight_spec
        )?;
        writeln!(out, "u,v,w_uv,w_vu")?;
        for u in 0..self.n {
            let base = self.offsets[u];
            for (i, &v) in self.neighbors(u).iter().enumerate() {
                if (v as usize) > u {
                    writeln!(out, "{u},{v},{},{}", self.w_out[base + i], self.w_in[base + i])?;
                }
            }
        }
        Ok(())
    }

    /// Structural sanity used after generation and load: sorted rows, no
    /// loops or duplicates, exact mirror symmetry of structure and
    /// weights, weights within [0,1].
    fn validate(&self) -> Result<()> {
        for u in 0..self.n {
            let nbrs = self.neighbors(u);
            for w in nbrs.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::parameter(format!(
                        "row {u} is not strictly sorted"
                    )));
                }
            }
            let base = self.offsets[u];
            for (i, &v) in nbrs.iter().enumerate() {
                let v = v as usize;
                if v == u {
                    return Err(Error::parameter(format!("self-loop at {u}")));
                }
                let wo = self.w_out[base + i];
                let wi = self.w_in[base + i];
                if !(0.0..=1.0).contains(&wo) || !(0.0..=1.0).contains(&wi) {
                    return Err(Error::parameter(format!(
                        "weight outside [0,1] on edge {u}-{v}"
                    )));
                }
                let row = &self.neighbors[self.offsets[v]..self.offsets[v + 1]];
                let pos = row
                    .binary_search(&(u as u32))
                    .map_err(|_| Error::parameter(format!("edge {u}-{v} is not mirrored")))?;
                let mirror = self.offsets[v] + pos;
                if self.w_out[mirror] != wi || self.w_in[mirror] != wo {
                    return Err(Error::parameter(format!(
                        "weights on edge {u}-{v} disagree with the mirror"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn read_bytes<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    Ok(u32::from_le_bytes(read_bytes(r)?))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_bytes(r)?))
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(Error::parameter("graph file: unreasonable string length"));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::parameter("graph file: invalid UTF-8 in header"))
}

/// Builds one graph. See the module docs for the pipeline; everything
/// downstream of `seed` is reproducible, including the erasure report.
pub fn generate(n: usize, d: &DegreeDist, w: &WeightModel, seed: u64) -> Result<WeightedGraph> {
    generate_with_stats(n, d, w, seed).map(|(g, _)| g)
}

/// As [`generate`], also returning what was erased and the pre-erasure
/// half-edge counts.
pub fn generate_with_stats(
    n: usize,
    d: &DegreeDist,
    w: &WeightModel,
    seed: u64,
) -> Result<(WeightedGraph, GenStats)> {
    if n < 2 {
        return Err(Error::parameter(format!(
            "graph needs at least 2 vertices, got {n}"
        )));
    }
    if n > u32::MAX as usize {
        return Err(Error::parameter(format!("vertex count {n} exceeds u32 range")));
    }
    // Degree-dependent models evaluate g during generation; everything
    // else samples weights from the marginal law.
    let sampler = match w {
        WeightModel::DegreeDependent(_) => None,
        _ => Some(w.sampler()?),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deg_sampler = d.sampler();
    let mut pre_degrees: Vec<u32> = (0..n).map(|_| deg_sampler.sample(&mut rng)).collect();
    let total: usize = pre_degrees.iter().map(|&k| k as usize).sum();
    if total % 2 == 1 {
        let lucky = rng.gen_range(0..n);
        pre_degrees[lucky] += 1;
    }

    // Uniform perfect matching: shuffle the half-edge owners and pair
    // consecutive entries.
    let mut half: Vec<u32> = Vec::with_capacity(total + 1);
    for (u, &k) in pre_degrees.iter().enumerate() {
        for _ in 0..k {
            half.push(u as u32);
        }
    }
    half.shuffle(&mut rng);

    let mut self_loops = 0usize;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(half.len() / 2);
    for pair in half.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b {
            self_loops += 1;
        } else {
            edges.push((a.min(b), a.max(b)));
        }
    }
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    let merged_edges = before - edges.len();

    // Offsets from post-erasure degrees.
    let mut counts = vec![0usize; n];
    for &(u, v) in &edges {
        counts[u as usize] += 1;
        counts[v as usize] += 1;
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for c in &counts {
        acc += c;
        offsets.push(acc);
    }

    // One pass in sorted edge order fills both mirrored entries and draws
    // both directed weights. Appending in this order leaves every row
    // sorted: a row's smaller-endpoint partners arrive while their side
    // leads the sort, larger ones after, each group increasing.
    let mut cursor = offsets[..n].to_vec();
    let mut neighbors = vec![0u32; 2 * edges.len()];
    let mut w_out = vec![0.0f64; 2 * edges.len()];
    let mut w_in = vec![0.0f64; 2 * edges.len()];
    for &(u, v) in &edges {
        let (w_uv, w_vu) = match (&sampler, w.weight_function()) {
            (Some(s), _) => (s.sample(&mut rng), s.sample(&mut rng)),
            (None, Some(g)) => (
                g.eval(pre_degrees[u as usize]),
                g.eval(pre_degrees[v as usize]),
            ),
            (None, None) => unreachable!("sampler exists unless degree-dependent"),
        };
        let (iu, iv) = (cursor[u as usize], cursor[v as usize]);
        neighbors[iu] = v;
        w_out[iu] = w_uv;
        w_in[iu] = w_vu;
        neighbors[iv] = u;
        w_out[iv] = w_vu;
        w_in[iv] = w_uv;
        cursor[u as usize] += 1;
        cursor[v as usize] += 1;
    }

    let g = WeightedGraph {
        n,
        offsets,
        neighbors,
        w_out,
        w_in,
        seed,
        degree_spec: d.label().to_string(),
        weight_spec: w.label(),
    };
    debug_assert!(g.validate().is_ok());
    Ok((
        g,
        GenStats {
            self_loops,
            merged_edges,
            pre_degrees,
        },
    ))
}

/// Histogram of the realized (post-erasure) degrees.
pub fn empirical_degree_dist(g: &WeightedGraph) -> Result<DegreeDist> {
    let mut counts: Vec<(u32, f64)> = Vec::new();
    let mut hist = vec![0u64; 1];
    for u in 0..g.n() {
        let k = g.degree(u);
        if k >= hist.len() {
            hist.resize(k + 1, 0);
        }
        hist[k] += 1;
    }
    for (k, &c) in hist.iter().enumerate() {
        if c > 0 {
            counts.push((k as u32, c as f64));
        }
    }
    DegreeDist::empirical(&counts)
}
