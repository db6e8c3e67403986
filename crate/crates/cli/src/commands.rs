use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use holant_core::io::{self, InstanceDocument, IoError, ReportDocument, REPORT_SCHEMA};
use holant_core::random::random_basis_for;
use holant_core::{
    holant_value, holant_value_chunked, pairing_form, random_instance, relative_error,
    verify_holant, verify_with_fault, Basis, FaultInjection, HolantError, HolantInstance, InstanceSpec, Scalar, Side,
    VerificationReport,
};

use crate::SideArg;

/// Anything that should end the process with exit code 2.
#[derive(Debug)]
pub enum CliError {
    Io(IoError),
    Holant(HolantError),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Holant(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e)
    }
}

impl From<HolantError> for CliError {
    fn from(e: HolantError) -> Self {
        CliError::Holant(e)
    }
}

type CliResult = Result<ExitCode, CliError>;

pub fn fmt_scalar(v: Scalar) -> String {
    if v.im == 0.0 {
        format!("{}", v.re)
    } else if v.im.is_sign_negative() {
        format!("{}-{}i", v.re, -v.im)
    } else {
        format!("{}+{}i", v.re, v.im)
    }
}

/// Resolves `--basis`: a builtin name, a path, or the instance's own
/// reference (relative to the instance file).
fn resolve_basis(instance_path: &Path, doc: &InstanceDocument, inst: &HolantInstance, arg: Option<&str>) -> Result<(Basis, String), CliError> {
    let arg = match arg {
        Some(a) => a.to_string(),
        None => {
            let reference = doc.basis.as_ref().ok_or_else(|| {
                CliError::Usage("no --basis given and the instance does not reference one".into())
            })?;
            let dir = instance_path.parent().unwrap_or(Path::new("."));
            dir.join(reference).to_string_lossy().into_owned()
        }
    };
    let basis = match arg.as_str() {
        "@standard" | "@identity" => Basis::standard(inst.alphabet().clone()),
        "@cumulative" => Basis::cumulative(inst.alphabet().clone()),
        other if other.starts_with('@') => {
            return Err(CliError::Usage(format!("unknown builtin basis `{other}` (use @standard or @cumulative)")))
        }
        path => {
            let b = io::load_basis(Path::new(path))?;
            if b.alphabet() != inst.alphabet() {
                return Err(CliError::Usage(format!(
                    "basis alphabet {:?} does not match instance alphabet {:?}",
                    b.alphabet().symbols(),
                    inst.alphabet().symbols()
                )));
            }
            b
        }
    };
    Ok((basis, arg))
}

fn load(path: &Path) -> Result<(InstanceDocument, HolantInstance), CliError> {
    let doc = io::load_instance_document(path)?;
    let inst = doc.to_instance(path)?;
    Ok((doc, inst))
}

pub fn eval(path: &Path, cross_check: bool, chunks: Option<usize>) -> CliResult {
    let (_, inst) = load(path)?;
    let value = match chunks {
        Some(0) => return Err(CliError::Usage("--chunks must be at least 1".into())),
        Some(c) => holant_value_chunked(&inst, c)?,
        None => holant_value(&inst)?,
    };
    println!("holant       {}", fmt_scalar(value));
    if cross_check {
        let pf = pairing_form(&inst)?;
        println!("pairing_form {}", fmt_scalar(pf));
        println!("rel_gap      {:e}", relative_error(value, pf));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn transform(path: &Path, basis_arg: Option<&str>, side: SideArg, index: usize, json: bool) -> CliResult {
    let (doc, inst) = load(path)?;
    let (basis, _) = resolve_basis(path, &doc, &inst, basis_arg)?;
    let side = match side {
        SideArg::Gen => Side::Generator,
        SideArg::Rec => Side::Recognizer,
    };
    let table = inst
        .side(side)
        .get(index)
        .ok_or(HolantError::IndexOutOfRange { index, size: inst.side(side).len() })?;
    let out = match side {
        Side::Generator => holant_core::hat_transform(table, &basis)?,
        Side::Recognizer => holant_core::check_transform(table, &basis)?,
    };
    if json {
        let doc = io::FunctionDocument {
            scope: out.scope().labels().map(str::to_string).collect(),
            table: out.values().iter().map(|v| [v.re, v.im]).collect(),
        };
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
        return Ok(ExitCode::SUCCESS);
    }
    let labels = basis.element_alphabet();
    let scope: Vec<&str> = out.scope().labels().collect();
    println!("# {} over ({})", if side == Side::Generator { "hat" } else { "check" }, scope.join(", "));
    for (b, v) in out.entries() {
        let names: Vec<&str> = b.values().iter().map(|&j| labels.symbol(j).expect("in range")).collect();
        println!("{}\t{}", names.join(" "), fmt_scalar(v));
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_fault(spec: &str) -> Result<FaultInjection, CliError> {
    let bad = || CliError::Usage(format!("--inject-fault expects gen:<index> or rec:<index>, got `{spec}`"));
    let (side, index) = spec.split_once(':').ok_or_else(bad)?;
    let side = match side {
        "gen" => Side::Generator,
        "rec" => Side::Recognizer,
        _ => return Err(bad()),
    };
    let index = index.parse().map_err(|_| bad())?;
    Ok(FaultInjection { side, index })
}

fn print_report(r: &VerificationReport, instance: &Path, basis: &str) {
    println!("instance    {} (sha256 {})", instance.display(), &r.instance_digest[..16]);
    println!("basis       {} (sha256 {}, cond {:.6e})", basis, &r.basis_digest[..16], r.basis_condition);
    println!("space       {}^{}", r.alphabet_size, r.edge_count);
    println!("lhs         {}", fmt_scalar(r.lhs));
    println!("rhs         {}", fmt_scalar(r.rhs));
    println!("abs_error   {:e}", r.abs_error);
    println!("rel_error   {:e}", r.rel_error);
    println!("tolerance   {:e}", r.tolerance);
    println!("cross_check lhs {:e}, rhs {:e}", r.lhs_cross_check, r.rhs_cross_check);
    if let Some(f) = r.fault {
        println!("fault       {:?}[{}] corrupted", f.side, f.index);
    }
    println!("elapsed     {:.3} ms", r.elapsed_seconds * 1e3);
    println!("{}", if r.pass { "PASS" } else { "FAIL" });
}

pub fn verify(
    path: &Path,
    basis_arg: Option<&str>,
    tol: Option<f64>,
    json: Option<&Path>,
    fault: Option<&str>,
) -> CliResult {
    if let Some(t) = tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!("--tol must be finite and non-negative, got {t}")));
        }
    }
    let fault = fault.map(parse_fault).transpose()?;
    let (doc, inst) = load(path)?;
    let (basis, basis_name) = resolve_basis(path, &doc, &inst, basis_arg)?;
    let report = match fault {
        Some(f) => verify_with_fault(&inst, &basis, tol, f)?,
        None => verify_holant(&inst, &basis, tol)?,
    };
    let pass = report.pass;
    match json {
        Some(out) => {
            let wall_clock_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
            let doc = ReportDocument {
                schema_version: REPORT_SCHEMA.to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                seed: doc.seed,
                wall_clock_unix,
                report,
            };
            if out == Path::new("-") {
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            } else {
                io::save_report(&doc, out)?;
                print_report(&doc.report, path, &basis_name);
            }
        }
        None => print_report(&report, path, &basis_name),
    }
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

pub fn gen(
    seed: u64,
    spec: InstanceSpec,
    basis_cond: Option<f64>,
    basis_out: Option<PathBuf>,
    output: &Path,
) -> CliResult {
    if basis_out.is_some() && basis_cond.is_none() {
        return Err(CliError::Usage("--basis-out requires --basis-cond".into()));
    }
    let inst = random_instance(seed, spec)?;
    let mut doc = InstanceDocument::from_instance(&inst);
    doc.seed = Some(seed);
    if let Some(cond) = basis_cond {
        let basis = random_basis_for(seed, inst.alphabet().clone(), cond)?;
        let basis_path = basis_out.unwrap_or_else(|| {
            let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into());
            output.with_file_name(format!("{stem}.basis.json"))
        });
        io::save_basis(&basis, &basis_path)?;
        doc.basis = Some(relative_reference(output, &basis_path));
        println!("wrote {} (cond {:.6e})", basis_path.display(), basis.condition());
    }
    io::save_instance_document(&doc, output)?;
    println!("wrote {}", output.display());
    Ok(ExitCode::SUCCESS)
}

/// `target` relative to the directory of `from` when it lives there,
/// otherwise as given.
fn relative_reference(from: &Path, target: &Path) -> String {
    let dir = from.parent().unwrap_or(Path::new(""));
    match target.strip_prefix(dir) {
        Ok(rel) if !dir.as_os_str().is_empty() => rel.to_string_lossy().into_owned(),
        _ if target.parent() == Some(dir) => target.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        _ => target.to_string_lossy().into_owned(),
    }
}
