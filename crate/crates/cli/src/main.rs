use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use clifford_index::acceptance::run_acceptance;
use clifford_index::clifford::{blade_product, classify_complex, classify_real, Blade, Multivector, QuadraticForm};
use clifford_index::dirac::{build_torus_dirac, index, FluxBundleSpec};
use clifford_index::flow::{spectral_flow, FamilyKind, HermitianFamily};
use clifford_index::spin::{covering_map, lift_rotation, SpinElement};
use clifford_index::spinor::spinor_module;
use clifford_index::symbols::{
    abs_class, abs_group, exterior_module, is_elliptic, principal_symbol, winding_number, OperatorSpec, Sampling,
};
use clifford_index::{Error, Scalar};

/// Largest dimension for which a full multiplication table is printed.
const TABLE_MAX_DIM: usize = 8;

#[derive(Parser)]
#[command(name = "clifford-index", version, about = "Clifford algebras, spinors, symbols and lattice Dirac indices")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Laplacian,
    Dalembert,
    Dirac,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuleName {
    /// The spinor module of Cl₂.
    Spinor,
    /// The spinor module with the opposite grading.
    SpinorFlipped,
    /// Exterior algebra of ℂ, the complex Thom class.
    Exterior,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Shift,
    WilsonMass,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplication table of the blade basis.
    ClTable {
        #[arg(long)]
        dim: usize,
        /// Generator signs `q(eᵢ)`, e.g. `++-` or `1,1,-1`; default all `+`.
        #[arg(long)]
        signs: Option<String>,
    },
    /// Identify the algebra with matrix algebras.
    ClClassify {
        #[arg(long)]
        dim: usize,
        /// Classify the real algebra instead of the complex one.
        #[arg(long)]
        real: bool,
        /// With `--real`: number of generators squaring to `+1`.
        #[arg(long, default_value_t = 0)]
        minus: usize,
    },
    /// Lift the rotation by `theta` in the (i, j) plane to Spin(n); axes are
    /// 1-based like the blade names.
    SpinLift {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        theta: f64,
    },
    /// Rotation matrix of a spin element given as multivector JSON.
    SpinCover {
        #[arg(long)]
        element: String,
    },
    /// The group of graded Cl_k modules modulo restrictions from Cl_{k+1}.
    AbsGroup {
        #[arg(long)]
        k: usize,
    },
    /// Winding number of the clutching class of a graded Cl₂ module.
    AbsWinding {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum)]
        module: ModuleName,
    },
    /// Principal symbol and ellipticity of a model operator.
    Symbol {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Index of the lattice Dirac operator twisted by a flux bundle.
    IndexTorus {
        #[arg(long = "N")]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        /// Also write the assembled operator as `row col re im` triplets.
        #[arg(long)]
        triplets: Option<PathBuf>,
    },
    /// Spectral flow of a Hermitian family.
    SpectralFlow {
        #[arg(long, value_enum, default_value_t = Family::Shift)]
        family: Family,
        #[arg(long, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        /// Lattice size for `wilson-mass`.
        #[arg(long = "N", default_value_t = 6)]
        n: usize,
        /// Flux for `wilson-mass`.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
    },
    /// Run the acceptance suite.
    Acceptance {
        /// Only run criteria whose name contains this text.
        #[arg(long)]
        only: Option<String>,
    },
}

enum Failure {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

/// A command result: JSON value, human text, and whether it counts as success.
struct Output {
    json: Value,
    human: String,
    ok: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn parse_signs(dim: usize, signs: Option<&str>) -> Result<QuadraticForm, Failure> {
    let Some(text) = signs else {
        return Ok(QuadraticForm::euclidean(dim)?);
    };
    let parsed: Vec<i8> = if text.contains(',') {
        text.split(',')
            .map(|s| s.trim().parse::<i8>().map_err(|_| Failure::Validation(format!("bad sign '{s}'"))))
            .collect::<Result<_, _>>()?
    } else {
        text.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(Failure::Validation(format!("bad sign '{c}'"))),
            })
            .collect::<Result<_, _>>()?
    };
    if parsed.len() != dim {
        return Err(Failure::Validation(format!("{} signs for dimension {dim}", parsed.len())));
    }
    Ok(QuadraticForm::new(parsed)?)
}

fn cl_table(dim: usize, signs: Option<&str>) -> Result<Output, Failure> {
    if dim > TABLE_MAX_DIM {
        return Err(Failure::Validation(format!("tables are limited to dimension {TABLE_MAX_DIM}")));
    }
    let form = parse_signs(dim, signs)?;
    let blades: Vec<Blade> = (0..1u32 << dim).map(Blade::from_mask).collect();
    let mut rows = Vec::new();
    let mut human = String::new();
    let width = blades.iter().map(|b| b.to_string().len()).max().unwrap_or(1) + 2;
    let _ = write!(human, "{:>width$}", "");
    for b in &blades {
        let _ = write!(human, "{:>width$}", b.to_string());
    }
    human.push('\n');
    for &a in &blades {
        let mut row = Vec::new();
        let _ = write!(human, "{:>width$}", a.to_string());
        for &b in &blades {
            let (sign, c) = blade_product(a, b, &form)?;
            let negative = sign == Scalar::int(-1);
            row.push(json!({"sign": if negative { -1 } else { 1 }, "blade": c}));
            let cell = format!("{}{c}", if negative { "-" } else { "" });
            let _ = write!(human, "{cell:>width$}");
        }
        rows.push(Value::Array(row));
        human.push('\n');
    }
    Ok(Output {
        json: json!({"dim": dim, "signs": form.signs(), "blades": blades, "table": rows}),
        human,
        ok: true,
    })
}

fn cl_classify(dim: usize, real: bool, minus: usize) -> Result<Output, Failure> {
    let t = if real {
        if minus > dim {
            return Err(Failure::Validation(format!("--minus {minus} exceeds --dim {dim}")));
        }
        classify_real(dim - minus, minus)?
    } else {
        if minus != 0 {
            return Err(Failure::Validation("--minus needs --real".into()));
        }
        classify_complex(dim)?
    };
    Ok(Output { human: t.to_string(), json: to_value(&t), ok: true })
}

fn spin_lift(n: usize, i: usize, j: usize, theta: f64) -> Result<Output, Failure> {
    if !theta.is_finite() {
        return Err(Failure::Validation("theta must be finite".into()));
    }
    if i == 0 || j == 0 {
        return Err(Failure::Validation("axes are numbered from 1".into()));
    }
    let u = lift_rotation(n, i - 1, j - 1, theta)?;
    let r = covering_map(&u)?;
    Ok(Output {
        human: format!("{}\nrotation: {:?}", u.value(), r.rows()),
        json: json!({"element": u, "rotation": r}),
        ok: true,
    })
}

fn spin_cover(element: &str) -> Result<Output, Failure> {
    let x: Multivector<Scalar> =
        serde_json::from_str(element).map_err(|e| Failure::Validation(format!("malformed element: {e}")))?;
    let u = SpinElement::new(x)?;
    let r = covering_map(&u)?;
    let human = r
        .rows()
        .iter()
        .map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("\t"))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Output { json: json!({"rotation": r}), human, ok: true })
}

fn abs_winding(k: usize, module: ModuleName) -> Result<Output, Failure> {
    if k != 2 {
        return Err(Failure::Validation("winding numbers are defined for k = 2".into()));
    }
    let w = match module {
        ModuleName::Spinor => spinor_module(2)?,
        ModuleName::SpinorFlipped => spinor_module(2)?.flip_grading(),
        ModuleName::Exterior => exterior_module(1)?,
    };
    let result = winding_number(&abs_class(&w)?)?;
    Ok(Output { human: format!("winding {}", result.winding), json: to_value(&result), ok: true })
}

fn symbol(op: Op, dim: usize) -> Result<Output, Failure> {
    let spec = match op {
        Op::Laplacian => OperatorSpec::laplacian(dim)?,
        Op::Dalembert => OperatorSpec::dalembertian(dim)?,
        Op::Dirac => OperatorSpec::standard_dirac(dim)?,
    };
    let s = principal_symbol(&spec)?;
    let e = is_elliptic(&s, Sampling::default())?;
    let human = match &e.witness {
        Some(w) => format!("not elliptic; singular at ξ = {w:?}"),
        None => format!("elliptic ({} sample directions)", e.samples),
    };
    Ok(Output { json: json!({"symbol": s, "ellipticity": e}), human, ok: true })
}

fn index_torus(n: usize, d: i64, triplets: Option<&PathBuf>) -> Result<Output, Failure> {
    let op = build_torus_dirac(&FluxBundleSpec::new(n, d)?)?;
    let r = index(&op)?;
    if let Some(path) = triplets {
        std::fs::write(path, op.to_triplets()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(Output {
        human: format!(
            "N = {n}, d = {d}: dim ker D⁺ = {}, dim ker D⁻ = {}, index = {}, gap = {:.6}",
            r.dim_ker_plus, r.dim_ker_minus, r.index, r.gap
        ),
        json: to_value(&r),
        ok: true,
    })
}

fn flow(family: Family, t0: f64, t1: f64, n: usize, d: i64) -> Result<Output, Failure> {
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Failure::Validation("endpoints must be finite".into()));
    }
    let fam = match family {
        Family::Shift => HermitianFamily::shift(t0, t1),
        Family::WilsonMass => HermitianFamily { kind: FamilyKind::WilsonMass(FluxBundleSpec::new(n, d)?), t0, t1 },
    };
    let f = spectral_flow(&fam)?;
    Ok(Output { human: format!("spectral flow {} ({} steps)", f.flow, f.steps), json: to_value(&f), ok: true })
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::ClTable { dim, signs } => cl_table(*dim, signs.as_deref()),
        Command::ClClassify { dim, real, minus } => cl_classify(*dim, *real, *minus),
        Command::SpinLift { n, i, j, theta } => spin_lift(*n, *i, *j, *theta),
        Command::SpinCover { element } => spin_cover(element),
        Command::AbsGroup { k } => {
            let g = abs_group(*k)?;
            Ok(Output { human: g.group.clone(), json: to_value(&g), ok: true })
        }
        Command::AbsWinding { k, module } => abs_winding(*k, *module),
        Command::Symbol { op, dim } => symbol(*op, *dim),
        Command::IndexTorus { n, d, triplets } => index_torus(*n, *d, triplets.as_ref()),
        Command::SpectralFlow { family, t0, t1, n, d } => flow(*family, *t0, *t1, *n, *d),
        Command::Acceptance { only } => {
            let report = run_acceptance(cli.seed, only.as_deref());
            Ok(Output { human: report.to_string(), json: to_value(&report), ok: report.passed() })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("JSON encodes"),
                Format::Human => out.human,
            };
            match &cli.out {
                Some(path) => {
                    let json = serde_json::to_string_pretty(&out.json).expect("JSON encodes");
                    if let Err(e) = std::fs::write(path, json + "\n") {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    if cli.format == Format::Human {
                        println!("{text}");
                    }
                }
                None => println!("{text}"),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Validation(msg)) | Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
