//! Output-frequency tallies and the coding-theorem table built from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use super::machine::{machine_count, MachineRule};
use super::sim::{MachineOutput, Simulator};
use super::CtmError;
use crate::graph::BitMatrix;
use crate::rng::stream_rng;

pub const FORMALISM: &str = "abs4/turmite";
pub const OUTPUT_CONVENTION: &str = "bbox1";
pub const DEFAULT_BUDGET: u64 = 500;
/// Largest state count allowed in exhaustive mode.
pub const MAX_EXHAUSTIVE_STATES: u8 = 2;

/// A block shape and its row-major bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockKey {
    pub rows: usize,
    pub cols: usize,
    pub pattern: String,
}

impl BlockKey {
    pub fn of(m: &BitMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            pattern: m.to_bit_string(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn to_matrix(&self) -> BitMatrix {
        BitMatrix::from_bit_string(self.rows, self.cols, &self.pattern)
            .expect("block keys hold valid patterns")
    }
}

/// Which halting outputs are kept in the table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ShapeFilter {
    #[default]
    All,
    Only(BTreeSet<(usize, usize)>),
}

impl ShapeFilter {
    pub fn admits(&self, shape: (usize, usize)) -> bool {
        match self {
            ShapeFilter::All => true,
            ShapeFilter::Only(shapes) => shapes.contains(&shape),
        }
    }
}

impl std::fmt::Display for ShapeFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShapeFilter::All => f.write_str("all"),
            ShapeFilter::Only(shapes) => {
                let parts: Vec<String> = shapes.iter().map(|(r, c)| format!("{r}x{c}")).collect();
                f.write_str(&parts.join(" "))
            }
        }
    }
}

impl FromStr for ShapeFilter {
    type Err = CtmError;

    /// `all`, or shapes like `3x3,2x2` (comma or space separated).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            return Ok(ShapeFilter::All);
        }
        let shapes = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .map(|p| {
                let (r, c) = p
                    .split_once('x')
                    .ok_or_else(|| CtmError::InvalidParameter(format!("bad shape {p:?}")))?;
                let parse = |v: &str| {
                    v.parse::<usize>()
                        .ok()
                        .filter(|&x| x >= 1)
                        .ok_or_else(|| CtmError::InvalidParameter(format!("bad shape {p:?}")))
                };
                Ok((parse(r)?, parse(c)?))
            })
            .collect::<Result<BTreeSet<_>, CtmError>>()?;
        if shapes.is_empty() {
            return Err(CtmError::InvalidParameter("empty shape filter".into()));
        }
        Ok(ShapeFilter::Only(shapes))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildMode {
    Exhaustive,
    /// `count` rules drawn uniformly; rule `j` comes from stream `j` of `seed`.
    Sampled {
        count: u64,
        seed: u64,
    },
}

impl std::fmt::Display for BuildMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuildMode::Exhaustive => f.write_str("exhaustive"),
            BuildMode::Sampled { count, seed } => write!(f, "sampled:{count}:{seed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtmConfig {
    pub states: u8,
    pub max_steps: u64,
    pub shapes: ShapeFilter,
    pub mode: BuildMode,
    pub detect_cycles: bool,
}

impl CtmConfig {
    pub fn exhaustive(states: u8, max_steps: u64) -> Self {
        Self {
            states,
            max_steps,
            shapes: ShapeFilter::All,
            mode: BuildMode::Exhaustive,
            detect_cycles: false,
        }
    }

    /// Number of rules the build visits.
    pub fn work_size(&self) -> Result<u64, CtmError> {
        if self.states < 1 {
            return Err(CtmError::InvalidParameter("need at least one state".into()));
        }
        if self.max_steps < 1 {
            return Err(CtmError::InvalidParameter(
                "step budget must be >= 1".into(),
            ));
        }
        match self.mode {
            BuildMode::Exhaustive => {
                if self.states > MAX_EXHAUSTIVE_STATES {
                    return Err(CtmError::InvalidParameter(format!(
                        "exhaustive builds are limited to {MAX_EXHAUSTIVE_STATES} states; use sampled mode"
                    )));
                }
                Ok(machine_count(self.states).expect("small state counts fit") as u64)
            }
            BuildMode::Sampled { count, .. } => Ok(count),
        }
    }

    fn rule(&self, j: u64) -> MachineRule {
        match self.mode {
            BuildMode::Exhaustive => {
                MachineRule::from_index(self.states, j as u128).expect("index within range")
            }
            BuildMode::Sampled { seed, .. } => {
                MachineRule::random(self.states, &mut stream_rng(seed, j))
            }
        }
    }
}

/// Raw counts from running a range of rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub counts: BTreeMap<BlockKey, u64>,
    pub machines_run: u64,
    pub machines_halted: u64,
    pub machines_blank: u64,
    /// Halted with a block outside the shape filter.
    pub machines_filtered: u64,
    pub machines_cycled: u64,
}

impl Tally {
    pub fn merge(&mut self, other: Tally) {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_default() += c;
        }
        self.machines_run += other.machines_run;
        self.machines_halted += other.machines_halted;
        self.machines_blank += other.machines_blank;
        self.machines_filtered += other.machines_filtered;
        self.machines_cycled += other.machines_cycled;
    }

    pub fn tabulated_total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Runs rules `range` (indexes into the build's rule sequence).
pub fn tally_range(config: &CtmConfig, range: Range<u64>) -> Result<Tally, CtmError> {
    let total = config.work_size()?;
    if range.end > total {
        return Err(CtmError::InvalidParameter(format!(
            "range end {} exceeds {total} rules",
            range.end
        )));
    }
    let mut sim = Simulator::new(config.detect_cycles);
    let mut tally = Tally::default();
    for j in range {
        let res = sim.run(&config.rule(j), config.max_steps);
        tally.machines_run += 1;
        tally.machines_cycled += res.cycle_detected as u64;
        match res.output {
            None => {}
            Some(MachineOutput::Blank) => {
                tally.machines_halted += 1;
                tally.machines_blank += 1;
            }
            Some(MachineOutput::Block(m)) => {
                tally.machines_halted += 1;
                if config.shapes.admits(m.shape()) {
                    *tally.counts.entry(BlockKey::of(&m)).or_default() += 1;
                } else {
                    tally.machines_filtered += 1;
                }
            }
        }
    }
    Ok(tally)
}

/// Splits `0..total` into `shards` contiguous ranges.
pub fn shard_ranges(total: u64, shards: usize) -> Vec<Range<u64>> {
    let shards = shards.max(1) as u64;
    (0..shards)
        .map(|i| (total * i / shards)..(total * (i + 1) / shards))
        .collect()
}

/// Key-value provenance stamped into table files.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Provenance {
    pub states: Option<u8>,
    pub symbols: Option<u8>,
    pub budget: Option<u64>,
    pub machines_run: Option<u64>,
    pub machines_halted: Option<u64>,
    /// Sum of counts over table entries; the denominator of every frequency.
    pub tabulated_total: Option<u64>,
    pub formalism: Option<String>,
    pub output: Option<String>,
    pub mode: Option<String>,
    pub shapes: Option<String>,
    pub cycle_detection: Option<bool>,
    pub extra: BTreeMap<String, String>,
}

impl Provenance {
    fn pairs(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut push = |k: &str, val: Option<String>| {
            if let Some(val) = val {
                v.push((k.to_string(), val));
            }
        };
        push("states", self.states.map(|x| x.to_string()));
        push("symbols", self.symbols.map(|x| x.to_string()));
        push("budget", self.budget.map(|x| x.to_string()));
        push("machines_run", self.machines_run.map(|x| x.to_string()));
        push(
            "machines_halted",
            self.machines_halted.map(|x| x.to_string()),
        );
        push(
            "tabulated_total",
            self.tabulated_total.map(|x| x.to_string()),
        );
        push("formalism", self.formalism.clone());
        push("output", self.output.clone());
        push("mode", self.mode.clone());
        push("shapes", self.shapes.clone());
        push(
            "cycle_detection",
            self.cycle_detection.map(|x| x.to_string()),
        );
        for (k, val) in &self.extra {
            v.push((k.clone(), val.clone()));
        }
        v
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), CtmError> {
        fn num<T: FromStr>(v: &str, key: &str, line: usize) -> Result<T, CtmError> {
            v.parse().map_err(|_| CtmError::Parse {
                line,
                message: format!("bad value {v:?} for {key}"),
            })
        }
        match key {
            "states" => self.states = Some(num(value, key, line)?),
            "symbols" => self.symbols = Some(num(value, key, line)?),
            "budget" => self.budget = Some(num(value, key, line)?),
            "machines_run" => self.machines_run = Some(num(value, key, line)?),
            "machines_halted" => self.machines_halted = Some(num(value, key, line)?),
            "tabulated_total" => self.tabulated_total = Some(num(value, key, line)?),
            "formalism" => self.formalism = Some(value.to_string()),
            "output" => self.output = Some(value.to_string()),
            "mode" => self.mode = Some(value.to_string()),
            "shapes" => self.shapes = Some(value.to_string()),
            "cycle_detection" => self.cycle_detection = Some(num(value, key, line)?),
            other => {
                self.extra.insert(other.to_string(), value.to_string());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub km_bits: f64,
    /// How many machines produced the block, when known.
    pub count: Option<u64>,
}

/// Coding-theorem estimates `km = -log2(count / total)` for small blocks,
/// where `total` is the number of halting machines whose output was
/// tabulated. The frequencies therefore sum to one over the table.
#[derive(Debug, Clone, PartialEq)]
pub struct CtmTable {
    pub provenance: Provenance,
    entries: BTreeMap<BlockKey, TableEntry>,
    max_km: f64,
}

impl CtmTable {
    pub fn from_tally(tally: &Tally, config: &CtmConfig) -> Result<Self, CtmError> {
        let total = tally.tabulated_total();
        if total == 0 {
            return Err(CtmError::EmptyTable);
        }
        let entries: BTreeMap<BlockKey, TableEntry> = tally
            .counts
            .iter()
            .map(|(k, &count)| {
                let km_bits = -(count as f64 / total as f64).log2();
                (
                    k.clone(),
                    TableEntry {
                        km_bits,
                        count: Some(count),
                    },
                )
            })
            .collect();
        let provenance = Provenance {
            states: Some(config.states),
            symbols: Some(2),
            budget: Some(config.max_steps),
            machines_run: Some(tally.machines_run),
            machines_halted: Some(tally.machines_halted),
            tabulated_total: Some(total),
            formalism: Some(FORMALISM.into()),
            output: Some(OUTPUT_CONVENTION.into()),
            mode: Some(config.mode.to_string()),
            shapes: Some(config.shapes.to_string()),
            cycle_detection: Some(config.detect_cycles),
            extra: BTreeMap::new(),
        };
        Self::from_entries(entries, provenance)
    }

    /// Table from explicit values; rejects an empty map and negative or
    /// non-finite values.
    pub fn from_entries(
        entries: BTreeMap<BlockKey, TableEntry>,
        provenance: Provenance,
    ) -> Result<Self, CtmError> {
        if entries.is_empty() {
            return Err(CtmError::EmptyTable);
        }
        if let Some((k, e)) = entries
            .iter()
            .find(|(_, e)| !e.km_bits.is_finite() || e.km_bits < 0.0)
        {
            return Err(CtmError::Inconsistent(format!(
                "pattern {} has invalid km {}",
                k.pattern, e.km_bits
            )));
        }
        let max_km = entries.values().map(|e| e.km_bits).fold(0.0, f64::max);
        Ok(Self {
            provenance,
            entries,
            max_km,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BlockKey, &TableEntry)> {
        self.entries.iter()
    }

    pub fn get(&self, key: &BlockKey) -> Option<&TableEntry> {
        self.entries.get(key)
    }

    pub fn max_km(&self) -> f64 {
        self.max_km
    }

    pub fn shapes(&self) -> BTreeSet<(usize, usize)> {
        self.entries.keys().map(BlockKey::shape).collect()
    }

    pub fn covers(&self, shape: (usize, usize)) -> bool {
        self.entries.keys().any(|k| k.shape() == shape)
    }

    /// `Σ 2^-km` over all entries.
    pub fn normalization(&self) -> f64 {
        self.entries.values().map(|e| (-e.km_bits).exp2()).sum()
    }

    /// Same table with every value increased by `c`.
    pub fn shifted(&self, c: f64) -> Result<CtmTable, CtmError> {
        let entries = self
            .entries
            .iter()
            .map(|(k, e)| {
                (
                    k.clone(),
                    TableEntry {
                        km_bits: e.km_bits + c,
                        count: None,
                    },
                )
            })
            .collect();
        let mut provenance = self.provenance.clone();
        provenance.tabulated_total = None;
        provenance.extra.insert("shift".into(), c.to_string());
        Self::from_entries(entries, provenance)
    }

    /// Shape-aware exact lookup; `None` means the block never appeared.
    pub fn km_lookup(&self, block: &BitMatrix) -> Option<f64> {
        self.entries.get(&BlockKey::of(block)).map(|e| e.km_bits)
    }

    /// `# key=value` provenance lines, then `rows,cols,pattern,km_bits`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.provenance.pairs() {
            writeln!(out, "# {k}={v}").unwrap();
        }
        out.push_str("rows,cols,pattern,km_bits\n");
        for (k, e) in &self.entries {
            writeln!(out, "{},{},{},{:.15}", k.rows, k.cols, k.pattern, e.km_bits).unwrap();
        }
        out
    }

    /// Parses [`CtmTable::to_csv`] output or an externally produced table.
    ///
    /// When `tabulated_total` is in the provenance, every value must imply an
    /// integer count and the implied frequencies must sum to one.
    pub fn from_csv(text: &str) -> Result<CtmTable, CtmError> {
        let mut provenance = Provenance::default();
        let mut entries = BTreeMap::new();
        let mut header_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if header_seen {
                    return Err(CtmError::Parse {
                        line: line_no,
                        message: "provenance must precede the header".into(),
                    });
                }
                if let Some((k, v)) = rest.trim().split_once('=') {
                    provenance.set(k.trim(), v.trim(), line_no)?;
                }
                continue;
            }
            if !header_seen {
                if line != "rows,cols,pattern,km_bits" {
                    return Err(CtmError::Parse {
                        line: line_no,
                        message: format!("expected header rows,cols,pattern,km_bits, got {line:?}"),
                    });
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |message: String| CtmError::Parse {
                line: line_no,
                message,
            };
            let [rows, cols, pattern, km] = fields[..] else {
                return Err(bad(format!("expected 4 fields, got {}", fields.len())));
            };
            let rows: usize = rows
                .parse()
                .map_err(|_| bad(format!("bad rows {rows:?}")))?;
            let cols: usize = cols
                .parse()
                .map_err(|_| bad(format!("bad cols {cols:?}")))?;
            let km_bits: f64 = km.parse().map_err(|_| bad(format!("bad km_bits {km:?}")))?;
            if rows == 0 || cols == 0 || pattern.len() != rows * cols {
                return Err(bad(format!(
                    "pattern {pattern:?} does not fill {rows}x{cols}"
                )));
            }
            if !pattern.chars().all(|c| c == '0' || c == '1') {
                return Err(bad(format!("pattern {pattern:?} is not binary")));
            }
            let key = BlockKey {
                rows,
                cols,
                pattern: pattern.to_string(),
            };
            if entries.contains_key(&key) {
                return Err(bad(format!("duplicate pattern {rows}x{cols} {pattern}")));
            }
            entries.insert(
                key,
                TableEntry {
                    km_bits,
                    count: None,
                },
            );
        }
        if !header_seen {
            return Err(CtmError::Parse {
                line: text.lines().count(),
                message: "missing header".into(),
            });
        }
        if let Some(total) = provenance.tabulated_total {
            let mut sum = 0.0;
            for (k, e) in entries.iter_mut() {
                let implied = (-e.km_bits).exp2() * total as f64;
                let count = implied.round();
                if count < 1.0 || (implied - count).abs() > 1e-6 * count.max(1.0) {
                    return Err(CtmError::Inconsistent(format!(
                        "km {} for {} implies non-integer count {implied}",
                        e.km_bits, k.pattern
                    )));
                }
                e.count = Some(count as u64);
                sum += (-e.km_bits).exp2();
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(CtmError::Inconsistent(format!(
                    "frequencies sum to {sum}, expected 1"
                )));
            }
        }
        Self::from_entries(entries, provenance)
    }
}

pub fn build_ctm_table(config: &CtmConfig) -> Result<CtmTable, CtmError> {
    let tally = tally_range(config, 0..config.work_size()?)?;
    CtmTable::from_tally(&tally, config)
}

/// Splits the rule sequence into `shards` ranges, tallies them in parallel
/// and merges in shard order. Equal to [`build_ctm_table`] for any `shards`.
pub fn build_ctm_table_sharded(config: &CtmConfig, shards: usize) -> Result<CtmTable, CtmError> {
    let tallies = shard_ranges(config.work_size()?, shards)
        .into_par_iter()
        .map(|r| tally_range(config, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut merged = Tally::default();
    for t in tallies {
        merged.merge(t);
    }
    CtmTable::from_tally(&merged, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_filter_parsing() {
        assert_eq!("all".parse::<ShapeFilter>().unwrap(), ShapeFilter::All);
        let f: ShapeFilter = "3x3,2x2".parse().unwrap();
        assert!(f.admits((2, 2)) && f.admits((3, 3)) && !f.admits((2, 3)));
        assert_eq!(f.to_string(), "2x2 3x3");
        assert_eq!(f.to_string().parse::<ShapeFilter>().unwrap(), f);
        assert!("3by3".parse::<ShapeFilter>().is_err());
        assert!("0x3".parse::<ShapeFilter>().is_err());
        assert!("".parse::<ShapeFilter>().is_err());
    }

    #[test]
    fn one_state_table() {
        let table = build_ctm_table(&CtmConfig::exhaustive(1, 50)).unwrap();
        assert_eq!(table.len(), 1);
        let one = BitMatrix::from_rows(&["1"]).unwrap();
        assert_eq!(table.km_lookup(&one), Some(0.0));
        assert_eq!(table.km_lookup(&BitMatrix::zeros(1, 1)), None);
        assert_eq!(table.provenance.machines_halted, Some(128));
    }

    #[test]
    fn exhaustive_limit() {
        let cfg = CtmConfig::exhaustive(3, 10);
        assert!(matches!(
            build_ctm_table(&cfg),
            Err(CtmError::InvalidParameter(_))
        ));
        assert!(matches!(
            build_ctm_table(&CtmConfig::exhaustive(1, 0)),
            Err(CtmError::InvalidParameter(_))
        ));
    }

    #[test]
    fn filter_that_admits_nothing_is_empty() {
        let mut cfg = CtmConfig::exhaustive(1, 20);
        cfg.shapes = "5x5".parse().unwrap();
        assert_eq!(build_ctm_table(&cfg), Err(CtmError::EmptyTable));
    }

    #[test]
    fn shard_ranges_cover() {
        let r = shard_ranges(10, 3);
        assert_eq!(r, vec![0..3, 3..6, 6..10]);
        assert_eq!(shard_ranges(5, 1), vec![0..5]);
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let mut cfg = CtmConfig::exhaustive(2, 60);
        cfg.shapes = "1x2,2x1,2x2,1x3".parse().unwrap();
        let table = build_ctm_table(&cfg).unwrap();
        let text = table.to_csv();
        assert!(text.contains("# formalism=abs4/turmite\n"));
        assert!(text.contains("\nrows,cols,pattern,km_bits\n"));
        let back = CtmTable::from_csv(&text).unwrap();
        assert_eq!(back.len(), table.len());
        for (k, e) in table.entries() {
            let b = back.get(k).unwrap();
            assert_eq!(b.count, e.count);
            assert!((b.km_bits - e.km_bits).abs() < 1e-14);
        }
        assert_eq!(back.to_csv(), text);

        let dup = "rows,cols,pattern,km_bits\n1,1,1,0.5\n1,1,1,0.5\n";
        assert!(matches!(
            CtmTable::from_csv(dup),
            Err(CtmError::Parse { line: 3, .. })
        ));
        let inconsistent =
            "# tabulated_total=4\nrows,cols,pattern,km_bits\n1,1,1,1.0\n1,2,11,1.3\n";
        assert!(matches!(
            CtmTable::from_csv(inconsistent),
            Err(CtmError::Inconsistent(_))
        ));
        let unnormalized = "# tabulated_total=4\nrows,cols,pattern,km_bits\n1,1,1,1.0\n";
        assert!(matches!(
            CtmTable::from_csv(unnormalized),
            Err(CtmError::Inconsistent(_))
        ));
        let external = "rows,cols,pattern,km_bits\n2,2,0000,3.5\n2,2,1111,4.25\n";
        let t = CtmTable::from_csv(external).unwrap();
        assert_eq!(t.km_lookup(&BitMatrix::zeros(2, 2)), Some(3.5));
        assert_eq!(t.max_km(), 4.25);
        assert!(CtmTable::from_csv("rows,cols,pattern,km_bits\n2,2,010,1\n").is_err());
        assert!(CtmTable::from_csv("1,1,1,0\n").is_err());
        assert!(CtmTable::from_csv("rows,cols,pattern,km_bits\n1,1,1,-1\n").is_err());
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let cfg = CtmConfig {
            states: 4,
            max_steps: 100,
            shapes: ShapeFilter::All,
            mode: BuildMode::Sampled {
                count: 2000,
                seed: 11,
            },
            detect_cycles: false,
        };
        let a = build_ctm_table(&cfg).unwrap();
        let b = build_ctm_table_sharded(&cfg, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.provenance.machines_run, Some(2000));
        assert_eq!(a.provenance.mode.as_deref(), Some("sampled:2000:11"));
    }
}
