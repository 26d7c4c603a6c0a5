use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sectors::classify2d::{classify_based, classify_free, ClassifyError, SectorClassification};
use sectors::cohomology::{special_case_classify, twisted_second_cohomology, CoefficientModule, SpecialTarget};
use sectors::complexes::{CWComplex, CatalogSpace, Pi1Labeling};
use sectors::dim3::{classify_s2, crossed_square_report, pontrjagin_classify, CupTable, S2Classification};
use sectors::xmod::{target_catalog, FiniteCrossedModule, ModuleXMod};
use sectors::zlinalg::{smith_normal_form, smallvec, AbelianGroup, IntMatrix};

#[derive(Parser)]
#[command(name = "sectors", version, about = "Topological sectors of maps between low-dimensional CW complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify maps from a source complex to a target.
    Classify(RunArgs),
    /// Compare the classification with an independent route.
    Crosscheck(CrosscheckArgs),
    /// Check a target, finite crossed module or complex file.
    Validate {
        /// File path or catalog target name.
        path: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smith normal form of an integer matrix.
    Snf {
        /// JSON rows, e.g. "[[2,4],[6,8]]".
        #[arg(long, conflicts_with = "file")]
        matrix: Option<String>,
        /// File holding the JSON rows.
        #[arg(long)]
        file: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Homotopy invariants (π₁, π₂, action, 3-cocycle) of a finite crossed module file.
    Hoang {
        path: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Structural report on the free crossed square of a source complex.
    Report {
        #[arg(long)]
        source: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// Catalog name (`torus2`, `torus_knot:2,3`, ...) or complex file.
    #[arg(long)]
    source: String,
    /// `rp2`, `sphere2`, `trivial:r,k`, `lens:p,q`, `so3`, `sphere3`, or a target file.
    #[arg(long)]
    target: String,
    /// Based classes (the default).
    #[arg(long, conflicts_with = "free")]
    based: bool,
    /// Free classes.
    #[arg(long)]
    free: bool,
    /// Sector sweep bound for infinite families of sectors.
    #[arg(long, default_value_t = 3)]
    bound: i64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Cup-product table replacing the built-in one.
    #[arg(long)]
    cup: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

enum Failure {
    Input(String),
    Unsupported(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Unsupported(_) => 2,
            Failure::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Unsupported(m) | Failure::Mismatch(m) => m,
        }
    }
}

type Outcome = Result<(String, Value), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn classify_failure(e: ClassifyError) -> Failure {
    match e {
        ClassifyError::UnsupportedTarget(_) | ClassifyError::Dimension { .. } => Failure::Unsupported(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

struct Source {
    name: String,
    complex: CWComplex,
    labeling: Pi1Labeling,
    catalog: Option<CatalogSpace>,
}

fn load_source(spec: &str) -> Result<Source, Failure> {
    if Path::new(spec).is_file() {
        let complex = CWComplex::load_path(spec).map_err(input)?;
        return Ok(Source { name: spec.into(), complex, labeling: Pi1Labeling::Abelianization, catalog: None });
    }
    let space = CatalogSpace::parse(spec).map_err(input)?;
    Ok(Source { name: space.name(), complex: space.complex(), labeling: space.labeling(), catalog: Some(space) })
}

enum Target {
    Module(String, ModuleXMod),
    Special(SpecialTarget),
}

fn load_target(spec: &str) -> Result<Target, Failure> {
    if Path::new(spec).is_file() {
        let x = ModuleXMod::load_path(spec).map_err(input)?;
        return Ok(Target::Module(spec.into(), x));
    }
    if let Some(t) = SpecialTarget::parse(spec) {
        return Ok(Target::Special(t));
    }
    let x = target_catalog(spec).map_err(input)?;
    Ok(Target::Module(spec.into(), x))
}

fn group_json(g: &AbelianGroup) -> Value {
    json!(g.factors_i64())
}

fn summary(c: &SectorClassification, free: bool) -> String {
    let mut out = format!("{} sector(s)", c.sectors.len());
    if free {
        let counts: Option<usize> = c.sectors.iter().map(|s| s.free_count()).sum();
        match counts {
            Some(n) => out.push_str(&format!(", {n} free class(es)")),
            None => out.push_str(", infinitely many free classes"),
        }
    }
    out
}

fn cmd_classify(a: &RunArgs) -> Outcome {
    let source = load_source(&a.source)?;
    let target = load_target(&a.target)?;
    let m = &source.complex;
    match target {
        Target::Special(t) => {
            if m.dimension() != 3 {
                return Err(Failure::Unsupported(format!("target {} needs a 3-dimensional source", t.name)));
            }
            let c = special_case_classify(m, &source.labeling, &t).map_err(input)?;
            if a.free && !c.free_equals_based {
                return Err(Failure::Unsupported("free classes need a trivial π₁ action on π₃".into()));
            }
            let mut text = format!("maps {} -> {}\n", source.name, t.name);
            for s in &c.sectors {
                let images: Vec<String> = s.images.iter().map(|i| i.to_string()).collect();
                text.push_str(&format!("sector ({}): {}\n", images.join(","), s.group));
            }
            text.push_str(&format!("{}: {}\n", if a.free { "free" } else { "based" }, c.description()));
            let sectors: Vec<Value> =
                c.sectors.iter().map(|s| json!({"phi1": s.images, "group": group_json(&s.group)})).collect();
            let v = json!({
                "source": source.name,
                "target": t.name,
                "sectors": sectors,
                "free_equals_based": c.free_equals_based,
                "description": c.description(),
            });
            Ok((text, v))
        }
        Target::Module(name, x) => {
            if m.dimension() == 3 {
                if name != "sphere2" {
                    return Err(Failure::Unsupported(format!("3-dimensional sources only map to sphere2, not {name}")));
                }
                let c = s2_route(&source, a.bound)?;
                return Ok((c.to_string(), c.to_json()));
            }
            let c = if a.free { classify_free(m, &x) } else { classify_based(m, &x) }.map_err(classify_failure)?;
            let text = format!("maps {} -> {name}\n{c}{}\n", source.name, summary(&c, a.free));
            let mut v = c.to_json();
            v["source"] = json!(source.name);
            v["target"] = json!(name);
            Ok((text, v))
        }
    }
}

fn s2_route(source: &Source, bound: i64) -> Result<S2Classification, Failure> {
    let space = source
        .catalog
        .as_ref()
        .ok_or_else(|| Failure::Unsupported("maps to sphere2 need a catalog source with a cylinder preset".into()))?;
    classify_s2(space, bound).map_err(|e| match e {
        sectors::dim3::Dim3Error::NoPreset(_) => Failure::Unsupported(e.to_string()),
        other => input(other),
    })
}

struct Row {
    label: String,
    left: AbelianGroup,
    right: Option<AbelianGroup>,
}

fn report_rows(rows: &[Row], left: &str, right: &str) -> Outcome {
    let mut text = String::new();
    let mut mismatches = 0;
    let mut list = Vec::new();
    for r in rows {
        let ok = r.right.as_ref() == Some(&r.left);
        mismatches += usize::from(!ok);
        let shown = r.right.as_ref().map_or("missing".to_string(), |g| g.to_string());
        text.push_str(&format!("{}: {left} {} / {right} {shown} {}\n", r.label, r.left, if ok { "ok" } else { "MISMATCH" }));
        list.push(json!({
            "sector": r.label,
            left: group_json(&r.left),
            right: r.right.as_ref().map(group_json),
            "match": ok,
        }));
    }
    text.push_str(&format!("{} sector(s), {mismatches} mismatch(es)\n", rows.len()));
    let v = json!({"sectors": list, "mismatches": mismatches});
    if mismatches > 0 {
        Err(Failure::Mismatch(format!("{mismatches} sector(s) disagree\n{text}")))
    } else {
        Ok((text, v))
    }
}

fn cmd_crosscheck(a: &CrosscheckArgs) -> Outcome {
    let source = load_source(&a.run.source)?;
    let target = load_target(&a.run.target)?;
    let m = &source.complex;
    let x = match target {
        Target::Module(_, x) => x,
        Target::Special(t) => return Err(Failure::Unsupported(format!("no second route for {}", t.name))),
    };
    if m.dimension() == 3 {
        if a.run.target != "sphere2" {
            return Err(Failure::Unsupported("3-dimensional sources cross-check only against sphere2".into()));
        }
        let squares = s2_route(&source, a.run.bound)?;
        let table = match &a.cup {
            Some(path) => CupTable::load_path(path).map_err(input)?,
            None => CupTable::for_space(source.catalog.as_ref().expect("catalog source")).map_err(input)?,
        };
        let cup = pontrjagin_classify(&table, a.run.bound).map_err(input)?;
        let mut rows: Vec<Row> = squares
            .sectors
            .iter()
            .map(|s| Row {
                label: format!("{:?}", smallvec(&s.phi2)),
                left: s.group.clone(),
                right: cup.iter().find(|c| c.phi2 == s.phi2).map(|c| c.group.clone()),
            })
            .collect();
        if cup.len() != squares.sectors.len() {
            rows.push(Row {
                label: "sector count".into(),
                left: AbelianGroup::from_cyclic(&[squares.sectors.len() as i64]),
                right: Some(AbelianGroup::from_cyclic(&[cup.len() as i64])),
            });
        }
        return report_rows(&rows, "crossed-square", "cup-product");
    }
    let c = classify_based(m, &x).map_err(classify_failure)?;
    let mut rows = Vec::new();
    for s in &c.sectors {
        let coeffs = CoefficientModule::from_sector(&x, &s.sector);
        let h2 = twisted_second_cohomology(m, &coeffs).map_err(input)?;
        let labels: Vec<String> = s.sector.coordinates.iter().map(|v| format!("{:?}", smallvec(v))).collect();
        rows.push(Row { label: format!("({})", labels.join(",")), left: s.based_group().clone(), right: Some(h2) });
    }
    report_rows(&rows, "classify", "twisted-H2")
}

fn cmd_validate(path: &str) -> Outcome {
    let text = if Path::new(path).is_file() {
        std::fs::read_to_string(path).map_err(input)?
    } else {
        let x = target_catalog(path).map_err(input)?;
        return validated(path, x.validate().iter().map(|v| v.to_string()).collect(), "target");
    };
    let raw: Value = serde_json::from_str(&text).map_err(input)?;
    if raw.get("generators").is_some() {
        let m = CWComplex::load(&text).map_err(input)?;
        let cells = format!("{} + {} + {}", m.generators().len(), m.two_cells().len(), m.three_cells().len());
        return validated(path, vec![], &format!("complex with {cells} cells"));
    }
    if raw.get("H").is_some() {
        let x = FiniteCrossedModule::load(&text).map_err(input)?;
        return validated(path, x.validate().iter().map(|v| v.to_string()).collect(), "finite crossed module");
    }
    let x = ModuleXMod::load(&text).map_err(input)?;
    validated(path, x.validate().iter().map(|v| v.to_string()).collect(), "target")
}

fn validated(path: &str, violations: Vec<String>, kind: &str) -> Outcome {
    if violations.is_empty() {
        Ok((format!("{path}: ok ({kind})\n"), json!({"path": path, "kind": kind, "ok": true})))
    } else {
        Err(Failure::Input(format!("{path}: {}", violations.join("; "))))
    }
}

fn cmd_snf(matrix: Option<&str>, file: Option<&str>) -> Outcome {
    let text = match (matrix, file) {
        (Some(m), _) => m.to_string(),
        (None, Some(f)) => std::fs::read_to_string(f).map_err(input)?,
        (None, None) => return Err(Failure::Input("pass --matrix or --file".into())),
    };
    let rows: Vec<Vec<i64>> = serde_json::from_str(&text).map_err(input)?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Failure::Input("matrix rows must be nonempty and of equal length".into()));
    }
    let a = IntMatrix::from_rows(&rows);
    let d = smith_normal_form(&a);
    let fmt = |m: &IntMatrix| format!("{:?}", m.to_i64_rows());
    let diag = smallvec(&d.diagonal());
    let text = format!("diagonal: {diag:?}\nS = {}\nU = {}\nV = {}\n", fmt(&d.s), fmt(&d.u), fmt(&d.v));
    let v = json!({
        "diagonal": diag,
        "S": d.s.to_i64_rows(),
        "U": d.u.to_i64_rows(),
        "V": d.v.to_i64_rows(),
    });
    Ok((text, v))
}

fn cmd_hoang(path: &str) -> Outcome {
    let x = FiniteCrossedModule::load_path(path).map_err(input)?;
    let d = x.hoang_data();
    let n = d.pi1.order();
    let witness = if n <= 4 && x.is_split() { d.coboundary_witness() } else { None };
    let trivial_beta = d.is_zero();
    let text = format!(
        "|pi1| = {n}\npi2 = {}\naction of pi1 on pi2: {:?}\nbeta cocycle: {}\nbeta zero: {trivial_beta}\nsplit: {}\ncoboundary witness: {}\n",
        d.pi2,
        d.alpha,
        d.is_cocycle(),
        x.is_split(),
        if witness.is_some() { "found" } else { "none" },
    );
    let v = json!({
        "pi1_order": n,
        "pi1_table": d.pi1.table(),
        "pi2": group_json(&d.pi2),
        "alpha": d.alpha,
        "beta_cocycle": d.is_cocycle(),
        "beta_zero": trivial_beta,
        "split": x.is_split(),
        "coboundary_witness": witness,
    });
    Ok((text, v))
}

fn cmd_report(spec: &str) -> Outcome {
    let source = load_source(spec)?;
    let r = crossed_square_report(&source.name, &source.complex).map_err(input)?;
    Ok((r.to_string(), r.to_json()))
}

fn emit(output: &OutputArgs, text: &str, value: &Value) -> Result<(), Failure> {
    let body = match output.format {
        Format::Text => text.to_string(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(value).expect("json serializes")),
    };
    match &output.out {
        Some(path) => std::fs::write(path, body).map_err(input),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match &cli.command {
        Command::Classify(a) => (cmd_classify(a), &a.output),
        Command::Crosscheck(a) => (cmd_crosscheck(a), &a.run.output),
        Command::Validate { path, output } => (cmd_validate(path), output),
        Command::Snf { matrix, file, output } => (cmd_snf(matrix.as_deref(), file.as_deref()), output),
        Command::Hoang { path, output } => (cmd_hoang(path), output),
        Command::Report { source, output } => (cmd_report(source), output),
    };
    match result.and_then(|(text, value)| emit(output, &text, &value)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
