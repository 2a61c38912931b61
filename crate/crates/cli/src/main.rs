//! `symbasis`: dimensions, invariant bases, obstructions and structural checks
//! for polynomial form spaces on the simplex.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use symbasis::bases::{geometric_decomposability_with, predicted_decomposability, predicted_existence};
use symbasis::duality::{duality_map, verify_sign_equivariance_for};
use symbasis::geodecomp::{decomposition_map_with, ComplementRule};
use symbasis::stiffness::stiffness_orbits;
use symbasis::symmetry::{character, monomial_cone_test, z3_decompose, GroupSpec};
use symbasis::{Error, Family, Permutation, Resolver, SpaceDesc};

use output::{Format, Table};

const MAX_N: usize = 3;
const MAX_R: i64 = 12;

#[derive(Parser)]
#[command(name = "symbasis", version, about = "Sign-invariant bases of polynomial form spaces on the simplex")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Write the result to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions of P_rΛ^k(T^n), P⁻_rΛ^k(T^n) and their trace-free subspaces.
    Dims(DimsArgs),
    /// Construct and verify an invariant basis, or print the ℤ/3 obstruction.
    Basis(SpaceArgs),
    /// Computed existence verdicts next to the closed-form conditions.
    InvariantTable(TableArgs),
    /// Whether an invariant basis compatible with the geometric decomposition exists.
    Decomposability(SpaceArgs),
    /// ℤ/3 multiplicities (m, n2), the S_{n+1} character and the monomial cone test.
    RepDecompose(SpaceArgs),
    /// Orbits of the scalar stiffness matrix under vertex permutations.
    StiffnessOrbits(StiffnessArgs),
    /// Build the duality isomorphism and check bijectivity and sign equivariance.
    DualityCheck(DualityArgs),
    /// Build the geometric decomposition map and check its properties.
    GeodecompCheck(GeodecompArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "P")]
    P,
    #[value(name = "Pminus", alias = "P-")]
    Pminus,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::P => Family::P,
            FamilyArg::Pminus => Family::Pminus,
        }
    }
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, allow_negative_numbers = true)]
    r: i64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    /// Use the trace-free subspace.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    trace_free: bool,
}

impl SpaceArgs {
    fn desc(&self) -> Result<SpaceDesc, Error> {
        check_range(self.r, self.k, self.n)?;
        Ok(SpaceDesc::new(self.family.into(), self.r, self.k, self.n, self.trace_free))
    }
}

#[derive(Args)]
struct DimsArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Tabulate r, r+1, …, r_max.
    #[arg(long, allow_negative_numbers = true)]
    r_max: Option<i64>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    r_max: i64,
}

#[derive(Args)]
struct StiffnessArgs {
    #[arg(long)]
    r: i64,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct DualityArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, allow_negative_numbers = true)]
    r: i64,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    L2,
    Coefficient,
}

#[derive(Args)]
struct GeodecompArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Inner product defining the complements W_d.
    #[arg(long, value_enum, default_value_t = RuleArg::L2)]
    complement: RuleArg,
}

fn check_range(r: i64, k: usize, n: usize) -> Result<(), Error> {
    if n > MAX_N {
        return Err(Error::Unsupported(format!("n = {n} exceeds the supported maximum {MAX_N}")));
    }
    if k > n {
        return Err(Error::DegreeOutOfRange { k: k as i64, n });
    }
    if r > MAX_R {
        return Err(Error::Unsupported(format!("r = {r} exceeds the supported maximum {MAX_R}")));
    }
    Ok(())
}

/// What a command produced and how the process should exit.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn emit_record<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> Table) -> Result<String, Error> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))? + "\n"),
        f => table().render(f),
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn cmd_dims(args: &DimsArgs, format: Format) -> Result<Outcome, Error> {
    let base = args.space.desc()?;
    let r_max = args.r_max.unwrap_or(base.r);
    check_range(r_max, base.k, base.n)?;
    #[derive(Serialize)]
    struct Row {
        space: String,
        family: Family,
        r: i64,
        k: usize,
        n: usize,
        trace_free: bool,
        dim: usize,
    }
    let rows = (base.r..=r_max)
        .into_par_iter()
        .map(|r| {
            let d = SpaceDesc { r, ..base };
            Ok(Row { space: d.to_string(), family: d.family, r, k: d.k, n: d.n, trace_free: d.trace_free, dim: d.build()?.dim() })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    if format == Format::Text && rows.len() == 1 {
        return Ok(Outcome::ok(format!("{}\n", rows[0].dim)));
    }
    let text = emit_record(format, &rows, || {
        Table::new(["space", "r", "dim"]).rows(rows.iter().map(|x| vec![x.space.clone(), x.r.to_string(), x.dim.to_string()]))
    })?;
    Ok(Outcome::ok(text))
}

fn cmd_basis(args: &SpaceArgs, format: Format) -> Result<Outcome, Error> {
    let desc = args.desc()?;
    let v = Resolver::new().verdict(desc)?;
    let code = if v.exists { 0 } else { 2 };
    let text = match format {
        Format::Text => {
            let mut s = format!("{} (dim {})\n", v.space, v.dim);
            if let (Some(basis), Some(route)) = (&v.basis, &v.route) {
                s += &format!("invariant basis up to sign ({route:?} construction, verified over S_{}):\n", desc.n + 1);
                for b in basis {
                    s += &format!("  {b}\n");
                }
            }
            if let Some(c) = &v.obstruction {
                s += &format!("no invariant basis: restricted to ℤ/3 the space is {}·1 ⊕ {}·2 with m < n2\n", c.m, c.n2);
            }
            s
        }
        f => emit_record(f, &v, || {
            let mut t = Table::new(["space", "dim", "exists", "route", "m", "n2"]);
            let (m, n2) = v.obstruction.map_or((String::new(), String::new()), |c| (c.m.to_string(), c.n2.to_string()));
            t.push(vec![
                v.space.to_string(),
                v.dim.to_string(),
                yes_no(v.exists),
                v.route.map(|r| format!("{r:?}").to_lowercase()).unwrap_or_default(),
                m,
                n2,
            ]);
            t
        })?,
    };
    Ok(Outcome { text, code })
}

fn table_rows(n: usize) -> Result<Vec<(Family, usize, bool)>, Error> {
    let tf = [false, true];
    let fams = [Family::P, Family::Pminus];
    match n {
        2 => Ok(tf.iter().flat_map(|&t| fams.iter().map(move |&f| (f, 1, t))).collect()),
        3 => Ok(tf.iter().flat_map(|&t| fams.iter().flat_map(move |&f| [(f, 1, t), (f, 2, t)])).collect()),
        _ => Err(Error::Unsupported(format!("closed-form tables exist for n = 2, 3, not {n}"))),
    }
}

fn cmd_invariant_table(args: &TableArgs, format: Format) -> Result<Outcome, Error> {
    let rows = table_rows(args.n)?;
    check_range(args.r_max, 0, args.n)?;
    if args.r_max < 0 {
        return Err(Error::Invalid("r_max must be nonnegative".into()));
    }
    #[derive(Serialize)]
    struct Cell {
        space: SpaceDesc,
        computed: bool,
        predicted: bool,
        decomposable: Option<bool>,
        decomposable_predicted: Option<bool>,
    }
    let resolver = Resolver::new();
    let cells: Vec<(usize, i64)> = (0..rows.len()).flat_map(|i| (0..=args.r_max).map(move |r| (i, r))).collect();
    let out = cells
        .par_iter()
        .map(|&(i, r)| {
            let (family, k, trace_free) = rows[i];
            let space = SpaceDesc::new(family, r, k, args.n, trace_free);
            let computed = resolver.exists(space)?;
            let predicted = predicted_existence(space).expect("closed-form row");
            let (decomposable, decomposable_predicted) = if args.n == 3 && !trace_free && r >= 1 {
                let d = geometric_decomposability_with(&resolver, family, r, k, 3)?;
                (Some(d.decomposable), predicted_decomposability(family, r, k))
            } else {
                (None, None)
            };
            Ok(Cell { space, computed, predicted, decomposable, decomposable_predicted })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let agree = out.iter().all(|c| c.computed == c.predicted && c.decomposable == c.decomposable_predicted);

    let mark = |b: bool| if b { "✓" } else { "✗" }.to_string();
    let text = emit_record(format, &out, || {
        let mut header = vec!["space".to_string()];
        header.extend((0..=args.r_max).map(|r| format!("r={r}")));
        let mut t = Table::new(header);
        for &(family, k, trace_free) in &rows {
            let row: Vec<&Cell> = out.iter().filter(|c| c.space.family == family && c.space.k == k && c.space.trace_free == trace_free).collect();
            let label = SpaceDesc::new(family, 0, k, args.n, trace_free).to_string().replacen("_0", "_r", 1);
            let mut line = vec![label];
            line.extend(row.iter().map(|c| {
                let s = mark(c.computed);
                if c.computed == c.predicted { s } else { format!("{s}!") }
            }));
            t.push(line);
            if row.iter().any(|c| c.decomposable.is_some()) {
                let mut line = vec!["  decomposable".to_string()];
                line.extend(row.iter().map(|c| match (c.decomposable, c.decomposable_predicted) {
                    (Some(d), Some(p)) if d == p => mark(d),
                    (Some(d), _) => format!("{}!", mark(d)),
                    _ => "·".into(),
                }));
                t.push(line);
            }
        }
        t
    })?;
    if !agree {
        return Ok(Outcome { text: text + "computed verdicts disagree with the closed-form conditions (marked !)\n", code: 1 });
    }
    Ok(Outcome::ok(text))
}

fn cmd_decomposability(args: &SpaceArgs, format: Format) -> Result<Outcome, Error> {
    let desc = args.desc()?;
    if desc.trace_free {
        return Err(Error::Invalid("decomposability is asked of the full space".into()));
    }
    let v = geometric_decomposability_with(&Resolver::new(), desc.family, desc.r, desc.k, desc.n)?;
    let code = if v.decomposable { 0 } else { 2 };
    let text = emit_record(format, &v, || {
        let mut t = Table::new(["face space", "invariant basis"]);
        for f in &v.faces {
            t.push(vec![f.space.to_string(), yes_no(f.exists)]);
        }
        t.push(vec![format!("{} decomposable", v.space), yes_no(v.decomposable)]);
        t
    })?;
    Ok(Outcome { text, code })
}

fn cmd_rep_decompose(args: &SpaceArgs, format: Format) -> Result<Outcome, Error> {
    let desc = args.desc()?;
    let v = desc.build()?;
    let g = GroupSpec::symmetric(desc.n);
    let chi = character(&v, &g)?;
    let z3 = if desc.n >= 2 { Some(z3_decompose(&v)?) } else { None };
    let cone = monomial_cone_test(&chi, &g)?;
    let record = json!({
        "space": desc,
        "dim": v.dim(),
        "character": chi,
        "class_representatives": g.class_representatives(),
        "z3": z3,
        "cone": cone,
    });
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&record).map_err(|e| Error::Internal(e.to_string()))? + "\n",
        f => {
            let mut t = Table::new(["quantity", "value"]);
            t.push(vec!["space".into(), desc.to_string()]);
            t.push(vec!["dim".into(), v.dim().to_string()]);
            let reps: Vec<String> = g.class_representatives().iter().map(|p| p.to_string()).collect();
            t.push(vec!["classes".into(), reps.join(" ")]);
            t.push(vec!["character".into(), format!("{:?}", chi.values())]);
            if let Some(z) = z3 {
                t.push(vec!["(m, n2)".into(), format!("({}, {})", z.m, z.n2)]);
            }
            t.push(vec!["monomial".into(), yes_no(cone.exists)]);
            for term in cone.certificate.iter().flatten() {
                let gens: Vec<String> = term.generator.subgroup_generators.iter().map(|p| p.to_string()).collect();
                t.push(vec![
                    format!("  {} × Ind", term.multiplicity),
                    format!("H = ⟨{}⟩ (order {}), L = {:?}", gens.join(", "), term.generator.subgroup_order, term.generator.line),
                ]);
            }
            t.render(f)?
        }
    };
    Ok(Outcome { text, code: if cone.exists { 0 } else { 2 } })
}

fn cmd_stiffness(args: &StiffnessArgs, format: Format) -> Result<Outcome, Error> {
    check_range(args.r, 0, args.n)?;
    let rep = stiffness_orbits(args.r, args.n)?;
    let text = match format {
        Format::Text => {
            let mut s = format!("{} orbits among {} monomials of degree {} on T^{}\n", rep.orbits.len(), rep.monomials.len(), args.r, args.n);
            for o in &rep.orbits {
                s += &format!("  a({}, {}) = {}  ({} entries)\n", o.row, o.column, o.value, o.size);
            }
            s
        }
        f => emit_record(f, &rep, || {
            let mut t = Table::new(["u", "v", "a(u,v)", "orbit size"]);
            for o in &rep.orbits {
                t.push(vec![o.row.clone(), o.column.clone(), o.value.to_string(), o.size.to_string()]);
            }
            t
        })?,
    };
    Ok(Outcome::ok(text))
}

fn cmd_duality(args: &DualityArgs, format: Format) -> Result<Outcome, Error> {
    check_range(args.r, args.k, args.n)?;
    let desc = SpaceDesc::new(args.family.into(), args.r, args.k, args.n, false);
    let d = duality_map(&desc.build()?)?;
    let m = args.n + 1;
    let mut perms = Permutation::coxeter_generators(m);
    if m >= 3 {
        perms.push(GroupSpec::three_cycle(args.n));
    }
    let bijective = d.is_bijective();
    let equivariant = verify_sign_equivariance_for(&d, &perms)?;
    let record = json!({
        "source": desc,
        "target": d.target.desc(),
        "source_dim": d.source.dim(),
        "target_dim": d.target.dim(),
        "bijective": bijective,
        "sign_equivariant": equivariant,
        "checked_permutations": perms,
        "matrix": d.matrix,
    });
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&record).map_err(|e| Error::Internal(e.to_string()))? + "\n",
        f => {
            let mut t = Table::new(["source", "target", "dims", "bijective", "sign-equivariant"]);
            t.push(vec![
                desc.to_string(),
                d.target.desc().to_string(),
                format!("{} → {}", d.source.dim(), d.target.dim()),
                yes_no(bijective),
                yes_no(equivariant),
            ]);
            t.render(f)?
        }
    };
    Ok(Outcome { text, code: if bijective && equivariant { 0 } else { 1 } })
}

fn cmd_geodecomp(args: &GeodecompArgs, format: Format) -> Result<Outcome, Error> {
    let desc = args.space.desc()?;
    let rule = match args.complement {
        RuleArg::L2 => ComplementRule::L2,
        RuleArg::Coefficient => ComplementRule::Coefficient,
    };
    let rep = decomposition_map_with(&desc.build()?, rule)?.report()?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rep).map_err(|e| Error::Internal(e.to_string()))? + "\n",
        f => {
            let mut t = Table::new(["quantity", "value"]);
            t.push(vec!["space".into(), desc.to_string()]);
            t.push(vec!["filtration dims".into(), format!("{:?}", rep.filtration_dims)]);
            t.push(vec!["complement dims".into(), format!("{:?}", rep.complement_dims)]);
            let mut per_dim = vec![0usize; desc.n + 1];
            for b in &rep.blocks {
                per_dim[b.face.dim()] += b.dim;
            }
            t.push(vec!["block dims by face dimension".into(), format!("{per_dim:?}")]);
            t.push(vec!["dim V → dim codomain".into(), format!("{} → {}", rep.domain_dim, rep.codomain_dim)]);
            t.push(vec!["injective".into(), yes_no(rep.injective)]);
            t.push(vec!["bijective".into(), yes_no(rep.bijective)]);
            t.push(vec!["equivariant".into(), yes_no(rep.equivariant)]);
            t.push(vec!["complements stable".into(), yes_no(rep.complement_stable.iter().all(|&s| s))]);
            t.render(f)?
        }
    };
    let ok = rep.injective && rep.equivariant;
    Ok(Outcome { text, code: if ok { 0 } else { 1 } })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let f = cli.format;
    match &cli.command {
        Command::Dims(a) => cmd_dims(a, f),
        Command::Basis(a) => cmd_basis(a, f),
        Command::InvariantTable(a) => cmd_invariant_table(a, f),
        Command::Decomposability(a) => cmd_decomposability(a, f),
        Command::RepDecompose(a) => cmd_rep_decompose(a, f),
        Command::StiffnessOrbits(a) => cmd_stiffness(a, f),
        Command::DualityCheck(a) => cmd_duality(a, f),
        Command::GeodecompCheck(a) => cmd_geodecomp(a, f),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &out.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
