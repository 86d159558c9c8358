//! Command-line front end. Every subcommand writes to the given sink so the
//! output can be captured in tests.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::basis::{elements_to_json, BasisElement};
use crate::complexes::{boundary_matrix, ComplexSpec, Ring};
use crate::error::{Error, Result};
use crate::formula::FormulaCache;
use crate::morse::{critical_cells_strip, critical_counts_strip, critical_counts_unordered, critical_counts_weighted};
use crate::oracle::{homology_z, smith_normal_form, SparseMatrix};
use crate::order::Weights;
use crate::persistence::{barcode, count_barcode, Mode};
use crate::verify::{all_passed, run as run_verify, Level};

#[derive(Parser, Debug)]
#[command(name = "strip-homology", version, about = "Homology of configuration spaces of disks in a strip")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest complex the oracle accepts; overrides STRIP_HOMOLOGY_CELL_LIMIT.
    #[arg(long, global = true)]
    pub cell_limit: Option<u128>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Betti numbers of cell(n, w).
    Betti {
        #[arg(long)]
        n: usize,
        /// A width or a range `a..b`.
        #[arg(long)]
        w: String,
        /// Degree range `a..b` (default: all).
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
        /// Compute by Smith normal form instead of counting critical cells.
        #[arg(long)]
        oracle: bool,
    },
    /// Width persistence barcode of cell(n, *).
    Barcode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Count)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = BarcodeFormat::Text)]
        format: BarcodeFormat,
    },
    /// Closed formula for beta_j(cell(n, w)) as a function of n.
    Formula {
        #[arg(long)]
        j: u32,
        #[arg(long)]
        w: u32,
        /// Print the exact value at this n.
        #[arg(long)]
        eval: Option<u32>,
        /// JSON file of previously derived formulas.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Betti numbers of the unordered complex over F_p (p = 0 for Q).
    Unordered {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        w: u32,
        #[arg(long, default_value_t = 0)]
        p: u32,
    },
    /// Critical cell counts per dimension.
    Critical {
        #[arg(long, value_enum, default_value_t = KindArg::Strip)]
        kind: KindArg,
        #[arg(long)]
        n: Option<usize>,
        /// Width, or threshold k for the weighted kind.
        #[arg(long)]
        w: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        /// Comma separated nondecreasing weights.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, default_value_t = 0)]
        p: u32,
        /// Emit the boundary matrix of this dimension as triplets instead.
        #[arg(long)]
        boundary: Option<usize>,
    },
    /// Homology basis elements of cell(n, w).
    Basis {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: u32,
        #[arg(long)]
        j: Option<usize>,
        /// Print only the number of elements.
        #[arg(long)]
        count: bool,
    },
    /// Smith normal form of a boundary matrix in triplet format.
    Snf {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run the self-checks.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Count,
    Enumerate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BarcodeFormat {
    Json,
    Csv,
    Svg,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Strip,
    Weighted,
    Unordered,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

/// Parse `a..b`, `a..=b` or a single number, checked against `lo..=hi`.
pub fn parse_range(text: &str, lo: usize, hi: usize) -> Result<(usize, usize)> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad range {text:?}")));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let a = num(text)?;
            (a, a)
        }
    };
    if a > b || a < lo || b > hi {
        return Err(Error::InvalidInput(format!("range {text} is outside {lo}..{hi}")));
    }
    Ok((a, b))
}

fn parse_weights(text: &str) -> Result<Weights> {
    let w = text
        .split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad weight {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let w = Weights::new(w)?;
    if !w.is_nondecreasing() {
        return Err(Error::InvalidInput("weights must be nondecreasing".into()));
    }
    Ok(w)
}

fn io(e: std::io::Error) -> Error {
    Error::InvalidInput(e.to_string())
}

/// Outcome of a command: `Ok(true)` success, `Ok(false)` a failed check.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Betti { n, w, degrees, format, oracle } => {
            if *n == 0 {
                return Err(Error::InvalidInput("n must be positive".into()));
            }
            let (w0, w1) = parse_range(w, 1, usize::MAX)?;
            let top = n - n.div_ceil(w1.min(*n));
            let (d0, d1) = match degrees {
                Some(d) => parse_range(d, 0, n - 1)?,
                None => (0, top),
            };
            let counts = if *oracle { None } else { Some(count_barcode(*n)) };
            let mut rows = Vec::new();
            for w in w0..=w1 {
                let w = w as u32;
                let betti: Vec<String> = match &counts {
                    Some(bars) => (d0..=d1).map(|j| bars.betti_at(w, j).to_string()).collect(),
                    None => {
                        let h = homology_z(&ComplexSpec::strip(*n, w))?;
                        h.betti()[d0..=d1].iter().map(|b| b.to_string()).collect()
                    }
                };
                rows.push((w, betti));
            }
            match format {
                TableFormat::Csv if rows.len() == 1 => writeln!(out, "{}", rows[0].1.join(",")).map_err(io)?,
                TableFormat::Csv => {
                    let header: Vec<String> = (d0..=d1).map(|j| format!("b{j}")).collect();
                    writeln!(out, "w,{}", header.join(",")).map_err(io)?;
                    for (w, b) in &rows {
                        writeln!(out, "{w},{}", b.join(",")).map_err(io)?;
                    }
                }
                TableFormat::Json => {
                    let v: Vec<serde_json::Value> = rows
                        .iter()
                        .map(|(w, b)| serde_json::json!({"n": n, "w": w, "first_degree": d0, "betti": b}))
                        .collect();
                    writeln!(out, "{}", serde_json::to_string(&v).unwrap()).map_err(io)?;
                }
            }
        }
        Command::Barcode { n, degrees, mode, format } => {
            if *n == 0 {
                return Err(Error::InvalidInput("n must be positive".into()));
            }
            let (d0, d1) = match degrees {
                Some(d) => parse_range(d, 0, n - 1)?,
                None => (0, n - 1),
            };
            let mode = match mode {
                ModeArg::Count => Mode::Count,
                ModeArg::Enumerate => Mode::Enumerate,
            };
            let b = barcode(*n, d0..=d1, mode)?;
            let text = match format {
                BarcodeFormat::Json => b.to_json() + "\n",
                BarcodeFormat::Csv => b.to_csv(),
                BarcodeFormat::Svg => b.to_svg(*n),
                BarcodeFormat::Text => b.to_text(),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        Command::Formula { j, w, eval, cache } => {
            let mut c = match cache {
                Some(p) => FormulaCache::load(p)?,
                None => FormulaCache::default(),
            };
            let f = c.get(*j, *w)?;
            if let Some(p) = cache {
                c.save(p)?;
            }
            match eval {
                Some(n) => writeln!(out, "{}", f.evaluate(*n)).map_err(io)?,
                None => {
                    writeln!(out, "{f}").map_err(io)?;
                    writeln!(out, "{}", f.to_json()).map_err(io)?;
                }
            }
        }
        Command::Unordered { n, w, p } => {
            ComplexSpec::unordered(*n as usize, *w, *p).validate()?;
            writeln!(out, "degree,dim").map_err(io)?;
            let top = *n - n.div_ceil((*w).min(*n));
            for (d, b) in critical_counts_unordered(*n, *w, *p).iter().enumerate().take(top as usize + 1) {
                writeln!(out, "{d},{b}").map_err(io)?;
            }
        }
        Command::Critical { kind, n, w, k, weights, p, boundary } => {
            let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Error::InvalidInput(format!("--{name} is required")));
            let (spec, counts): (ComplexSpec, Box<dyn Fn() -> Result<Vec<String>>>) = match kind {
                KindArg::Strip => {
                    let (n, w) = (need(*n, "n")?, need(w.map(|w| w as usize), "w")? as u32);
                    (ComplexSpec::strip(n, w), Box::new(move || Ok(critical_counts_strip(n, w).iter().map(|c| c.to_string()).collect())))
                }
                KindArg::Weighted => {
                    let ws = parse_weights(weights.as_deref().ok_or_else(|| Error::InvalidInput("--weights is required".into()))?)?;
                    let k = need(k.or(*w).map(|k| k as usize), "k")? as u32;
                    let wc = ws.clone();
                    (
                        ComplexSpec::weighted(ws, k),
                        Box::new(move || Ok(critical_counts_weighted(&wc, k)?.iter().map(|c| c.to_string()).collect())),
                    )
                }
                KindArg::Unordered => {
                    let (n, w) = (need(*n, "n")?, need(w.map(|w| w as usize), "w")? as u32);
                    let p = *p;
                    (
                        ComplexSpec::unordered(n, w, p),
                        Box::new(move || Ok(critical_counts_unordered(n as u32, w, p).iter().map(|c| c.to_string()).collect())),
                    )
                }
            };
            spec.validate()?;
            if let Some(d) = boundary {
                spec.check_size()?;
                let m = boundary_matrix(&spec, *d, Ring::Integers)?;
                out.write_all(m.to_triplets(*d).as_bytes()).map_err(io)?;
                return Ok(true);
            }
            writeln!(out, "kind,n,w_or_k,p,dim,count").map_err(io)?;
            for (d, c) in counts()?.iter().enumerate() {
                writeln!(out, "{},{},{},{},{d},{c}", spec.kind, spec.n, spec.w_or_k, spec.characteristic).map_err(io)?;
            }
        }
        Command::Basis { n, w, j, count } => {
            ComplexSpec::strip(*n, *w).validate()?;
            if *count {
                let counts = critical_counts_strip(*n, *w);
                match j {
                    Some(j) => writeln!(out, "{}", counts.get(*j).map(|c| c.to_string()).unwrap_or_else(|| "0".into())).map_err(io)?,
                    None => writeln!(out, "{}", counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")).map_err(io)?,
                }
                return Ok(true);
            }
            let elements = critical_cells_strip(*n, *w)?
                .iter()
                .filter(|s| j.is_none_or(|j| s.dim() == j))
                .map(BasisElement::from_critical_cell)
                .collect::<Result<Vec<_>>>()?;
            writeln!(out, "{}", elements_to_json(&elements)).map_err(io)?;
        }
        Command::Snf { input } => {
            let text = std::fs::read_to_string(input).map_err(io)?;
            let (_, m): (usize, SparseMatrix) = SparseMatrix::from_triplets(&text)?;
            writeln!(out, "{}", serde_json::to_string(&smith_normal_form(&m)).unwrap()).map_err(io)?;
        }
        Command::Verify { level, json } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let reports = run_verify(level);
            if *json {
                writeln!(out, "{}", serde_json::to_string_pretty(&reports).unwrap()).map_err(io)?;
            } else {
                for r in &reports {
                    writeln!(out, "{} ({:.1}s)", r.line(), r.seconds).map_err(io)?;
                }
            }
            return Ok(all_passed(&reports));
        }
    }
    Ok(true)
}
