use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use d4quad_core::linforms::p_bound_with;
use d4quad_core::oracle::{self, fibonacci_check, k4_check, lucas_fibonacci_even};
use d4quad_core::pell::{fundamental_pair, pair_at};
use d4quad_core::pipeline::{verify_family_with, Verdict, VerifyOptions};
use d4quad_core::reduction::{branch_label, build_reduction, iterate_reduce, sign_branches};
use d4quad_core::sequences::InitialKind;
use d4quad_core::tuples::{c_family, check_tuple, is_regular, FamilyClass};
use d4quad_core::{linforms, Error, Family, Multiplier};

#[derive(Parser)]
#[command(
    name = "d4quad",
    version,
    about = "Regularity checks for D(4)-quadruples containing {a, ka}, k = 2, 3, 6"
)]
struct Cli {
    /// Starting working precision for certified real arithmetic.
    #[arg(long, global = true, default_value_t = linforms::DEFAULT_BITS)]
    precision_bits: u32,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (default: text for queries, json for `verify`, csv for `oracle sweep`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    A,
    B,
    #[value(alias = "vw-even")]
    Even,
    #[value(alias = "vw-odd")]
    Odd,
}

impl From<KindArg> for InitialKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::A => InitialKind::TypeA,
            KindArg::B => InitialKind::TypeB,
            KindArg::Even => InitialKind::VwEven,
            KindArg::Odd => InitialKind::VwOdd,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// The pair equation r² − k·a² = 4.
    Pell {
        #[command(subcommand)]
        cmd: PellCmd,
    },
    /// D(4)-tuple checks and extensions.
    Tuple {
        #[command(subcommand)]
        cmd: TupleCmd,
    },
    /// Third elements c from the Pell families.
    Family {
        #[command(subcommand)]
        cmd: FamilyCmd,
    },
    /// Largest p and index cap left open by the Matveev bound.
    Bounds {
        #[arg(long)]
        k: u32,
        /// `c1`, `c2`, `c3`, or a single branch such as `c2-`.
        #[arg(long)]
        family: String,
        #[arg(long = "type", value_enum)]
        kind: KindArg,
    },
    /// Baker–Davenport reduction of the index cap at one p, every sign branch.
    Reduce {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        family: Family,
        #[arg(long = "type", value_enum)]
        kind: KindArg,
    },
    /// Full verification of one family.
    Verify {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        family: Family,
        #[arg(long)]
        p_min: Option<u32>,
        #[arg(long)]
        p_max: Option<u32>,
    },
    /// Brute-force ground truth.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
    /// Identities for k = 4 and k = 5.
    Sanity {
        #[command(subcommand)]
        cmd: SanityCmd,
    },
}

#[derive(Subcommand)]
enum PellCmd {
    Fundamental {
        #[arg(long)]
        k: u32,
    },
    At {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u32,
    },
}

#[derive(Subcommand)]
enum TupleCmd {
    Check {
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        elements: Vec<BigInt>,
    },
    Extend {
        #[arg(long, value_delimiter = ',')]
        triple: Vec<BigInt>,
        #[arg(long)]
        d_max: BigInt,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    Gen {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    Sweep {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        a_max: u64,
        #[arg(long)]
        c_max: u64,
        #[arg(long)]
        d_max: u64,
    },
}

#[derive(Subcommand)]
enum SanityCmd {
    Fib {
        #[arg(long, default_value_t = 15)]
        n_max: u32,
    },
    K4 {
        #[arg(long, default_value_t = 1_000_000)]
        r_max: u64,
    },
}

/// One result in every output format.
struct Rendered {
    text: String,
    json: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    default: Format,
    /// A negative answer (failed check, unconfirmed verdict) exits with 1.
    ok: bool,
}

impl Rendered {
    fn query(text: String, json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Rendered {
            text,
            json,
            header,
            rows,
            default: Format::Text,
            ok: true,
        }
    }
}

fn s(n: impl ToString) -> String {
    n.to_string()
}

fn sci(n: &BigInt) -> String {
    let digits = n.to_string();
    if digits.len() <= 6 {
        return digits;
    }
    let lead: u32 = digits[..4].parse().expect("decimal digits");
    let mut mant = (lead + 5) / 10;
    let mut exp = digits.len() - 1;
    if mant == 1000 {
        mant = 100;
        exp += 1;
    }
    format!("{}.{:02}e{}", mant / 100, mant % 100, exp)
}

fn run(cli: &Cli) -> Result<Rendered, Error> {
    let prec = cli.precision_bits;
    Ok(match &cli.cmd {
        Cmd::Pell {
            cmd: PellCmd::Fundamental { k },
        } => {
            let (r, a) = fundamental_pair(*k)?;
            Rendered::query(
                format!("r={r} a={a}"),
                json!({"k": s(k), "r": s(&r), "a": s(&a)}),
                vec!["k", "r", "a"],
                vec![vec![s(k), s(&r), s(&a)]],
            )
        }
        Cmd::Pell {
            cmd: PellCmd::At { k, p },
        } => {
            let pair = pair_at(*k, *p)?;
            let b = pair.b();
            Rendered::query(
                format!("p={p} a={} b={b} r={}", pair.a, pair.r),
                json!({"k": s(k), "p": s(p), "a": s(&pair.a), "b": s(&b), "r": s(&pair.r)}),
                vec!["k", "p", "a", "b", "r"],
                vec![vec![s(k), s(p), s(&pair.a), s(&b), s(&pair.r)]],
            )
        }
        Cmd::Tuple {
            cmd: TupleCmd::Check { elements },
        } => {
            let valid = check_tuple(elements);
            let regular = match <&[BigInt; 4]>::try_from(elements.as_slice()) {
                Ok(q) if valid => Some(is_regular(q)?),
                _ => None,
            };
            let text = match regular {
                Some(r) => format!("{valid} regular={r}"),
                None => valid.to_string(),
            };
            let list = elements.iter().map(s).collect::<Vec<_>>().join(",");
            let ok = valid && regular != Some(false);
            Rendered {
                ok,
                ..Rendered::query(
                    text,
                    json!({"elements": elements.iter().map(s).collect::<Vec<_>>(), "d4_tuple": valid, "regular": regular}),
                    vec!["elements", "d4_tuple", "regular"],
                    vec![vec![list, s(valid), regular.map(s).unwrap_or_default()]],
                )
            }
        }
        Cmd::Tuple {
            cmd: TupleCmd::Extend { triple, d_max },
        } => {
            if triple.len() != 3 {
                return Err(Error::Parse(format!("--triple takes 3 elements, got {}", triple.len())));
            }
            let ds = oracle::extend_triple(&triple[0], &triple[1], &triple[2], d_max)?;
            let mut sorted = triple.clone();
            sorted.sort();
            let t3 = [sorted[0].clone(), sorted[1].clone(), sorted[2].clone()];
            let mut rows = Vec::new();
            for d in &ds {
                rows.push(vec![s(d), oracle::classify_d(&t3, d)?.label().to_string()]);
            }
            Rendered::query(
                ds.iter().map(s).collect::<Vec<_>>().join("\n"),
                json!(rows
                    .iter()
                    .map(|r| json!({"d": r[0], "class": r[1]}))
                    .collect::<Vec<_>>()),
                vec!["d", "class"],
                rows,
            )
        }
        Cmd::Family {
            cmd: FamilyCmd::Gen { k, p, family },
        } => {
            let pair = pair_at(*k, *p)?;
            let cand = c_family(&pair, *family)?;
            let (dm, dp) = cand.sorted.d_pm();
            let b = pair.b();
            let fields = [
                ("a", s(&pair.a)),
                ("b", s(&b)),
                ("c", s(&cand.c)),
                ("r", s(&pair.r)),
                ("s", s(&cand.s)),
                ("t", s(&cand.t)),
                ("order", cand.role_order()),
                ("d_minus", s(&dm)),
                ("d_plus", s(&dp)),
            ];
            let text = fields
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join("\n");
            let mut obj = serde_json::Map::new();
            obj.insert("k".into(), json!(s(k)));
            obj.insert("p".into(), json!(s(p)));
            obj.insert("family".into(), json!(s(family)));
            for (k, v) in &fields {
                obj.insert((*k).into(), json!(v));
            }
            Rendered::query(
                text,
                Value::Object(obj),
                fields.iter().map(|(k, _)| *k).collect(),
                vec![fields.iter().map(|(_, v)| v.clone()).collect()],
            )
        }
        Cmd::Bounds { k, family, kind } => {
            let kind = InitialKind::from(*kind);
            let (class, only) = match family.parse::<Family>() {
                Ok(f) => (f.class(), Some(f)),
                Err(_) => (family.parse::<FamilyClass>()?, None),
            };
            let pb = p_bound_with(*k, class, kind, prec)?;
            let vw = matches!(kind, InitialKind::VwEven | InitialKind::VwOdd);
            let (p_max, cap) = match only {
                Some(f) => {
                    let br = pb
                        .branches
                        .iter()
                        .find(|b| b.family == f)
                        .ok_or_else(|| Error::Precondition(format!("no admissible p for {f}")))?;
                    let cap = if vw {
                        &br.full_index_cap / 2u32
                    } else {
                        br.full_index_cap.clone()
                    };
                    (br.p_max, cap)
                }
                None => (pb.p_max, pb.index_cap.clone()),
            };
            let name = if vw { "m_max" } else { "l_max" };
            Rendered::query(
                format!("p_max={p_max} {name}≈{}", sci(&cap)),
                json!({"k": s(k), "family": family, "type": format!("{kind:?}"), "p_max": s(p_max), name: s(&cap)}),
                vec!["k", "family", "type", "p_max", "index_cap"],
                vec![vec![s(k), family.clone(), format!("{kind:?}"), s(p_max), s(&cap)]],
            )
        }
        Cmd::Reduce { k, p, family, kind } => {
            let mult = Multiplier::try_from(*k)?;
            let kind = InitialKind::from(*kind);
            let pair = pair_at(*k, *p)?;
            let cand = c_family(&pair, *family)?;
            let cap = linforms::index_cap_at(mult, *family, kind, *p, prec)?;
            let mut text = vec![format!("M={cap}")];
            let mut items = Vec::new();
            let mut rows = Vec::new();
            for init in sign_branches(&cand.sorted, kind) {
                let label = branch_label(&cand.sorted, &init);
                let tr = cand.sorted.clone();
                let builder = move |m: &BigInt, bits: u32| build_reduction(&tr, &init, m, bits);
                let out = iterate_reduce(&builder, &cap, Some(prec))?;
                let chain: Vec<String> = out.steps.iter().map(|st| s(&st.new_bound)).collect();
                text.push(format!(
                    "{label}: {} -> {} (rounds {})",
                    sci(&cap),
                    chain.join(" -> "),
                    out.iterations
                ));
                rows.push(vec![label.clone(), s(&cap), s(&out.final_bound), s(out.iterations)]);
                items.push(json!({"branch": label, "final_bound": s(&out.final_bound), "iterations": s(out.iterations), "steps": out.steps}));
            }
            Rendered::query(
                text.join("\n"),
                json!({"k": s(k), "p": s(p), "family": s(family), "type": format!("{kind:?}"), "M": s(&cap), "branches": items}),
                vec!["branch", "M", "final_bound", "iterations"],
                rows,
            )
        }
        Cmd::Verify {
            k,
            family,
            p_min,
            p_max,
        } => {
            let opts = VerifyOptions {
                precision_bits: prec,
                p_min: *p_min,
                p_max: *p_max,
            };
            let rep = verify_family_with(*k, *family, &opts)?;
            let rows = rep
                .records
                .iter()
                .map(|r| {
                    vec![
                        s(r.k),
                        s(r.family),
                        s(r.p),
                        format!("{:?}", r.kind),
                        r.branch.clone(),
                        s(&r.bounds.matveev_l),
                        r.bounds.reduced_l.as_ref().map(s).unwrap_or_default(),
                        s(&r.bounds.gap_lower),
                        s(r.residual.len()),
                        s(r.verdict),
                    ]
                })
                .collect();
            let text = format!(
                "{} {} {} ({} records)",
                rep.k,
                rep.family,
                rep.verdict,
                rep.records.len()
            );
            Rendered {
                text,
                json: serde_json::to_value(&rep).expect("report serializes"),
                header: vec![
                    "k",
                    "family",
                    "p",
                    "type",
                    "branch",
                    "matveev_l",
                    "reduced_l",
                    "gap_lower",
                    "residuals",
                    "verdict",
                ],
                rows,
                default: Format::Json,
                ok: rep.verdict == Verdict::RegularConfirmed,
            }
        }
        Cmd::Oracle {
            cmd: OracleCmd::Sweep { k, a_max, c_max, d_max },
        } => {
            let rep = oracle::quadruples_containing_pair(*k, *a_max, *c_max, *d_max)?;
            let rows = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        format!("{{{},{}}}", r.a, r.b),
                        format!("{{{},{},{}}}", r.a, r.b, r.c),
                        s(&r.d),
                        r.class.label().to_string(),
                        s(r.cell_micros),
                    ]
                })
                .collect();
            Rendered {
                text: format!(
                    "k={k} pairs={} triples={} extensions={} irregular={} runtime_ms={}",
                    rep.pair_smaller.len(),
                    rep.triples,
                    rep.rows.len(),
                    rep.irregular,
                    rep.runtime_ms
                ),
                json: serde_json::to_value(&rep).expect("report serializes"),
                header: vec!["pair", "triple", "d", "classification", "runtime_us"],
                rows,
                default: Format::Csv,
                ok: rep.irregular == 0,
            }
        }
        Cmd::Sanity {
            cmd: SanityCmd::Fib { n_max },
        } => {
            let ok = fibonacci_check(*n_max);
            let sols = lucas_fibonacci_even(*n_max);
            Rendered {
                ok,
                ..Rendered::query(
                    format!("fibonacci_check({n_max}) = {ok}"),
                    json!({"n_max": s(n_max), "pass": ok, "solutions": sols.iter().map(|(r, a)| json!({"r": s(r), "a": s(a)})).collect::<Vec<_>>()}),
                    vec!["n", "r", "a"],
                    sols.iter()
                        .enumerate()
                        .map(|(i, (r, a))| vec![s(i + 1), s(r), s(a)])
                        .collect(),
                )
            }
        }
        Cmd::Sanity {
            cmd: SanityCmd::K4 { r_max },
        } => {
            let ok = k4_check(*r_max);
            Rendered {
                ok,
                ..Rendered::query(
                    format!("k4_check({r_max}) = {ok}"),
                    json!({"r_max": s(r_max), "pass": ok}),
                    vec!["r_max", "pass"],
                    vec![vec![s(r_max), s(ok)]],
                )
            }
        }
    })
}

fn emit(out: &mut dyn Write, r: &Rendered, format: Format) -> io::Result<()> {
    match format {
        Format::Text => writeln!(out, "{}", r.text),
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r.json).expect("json value")),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&r.header)?;
            for row in &r.rows {
                w.write_record(row)?;
            }
            w.flush()
        }
    }
}

/// Argument-shaped errors exit with 2 like clap's usage errors; failures of
/// the computation itself with 3.
fn error_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedK(_)
        | Error::NotAD4Pair { .. }
        | Error::NotATriple(_)
        | Error::UnsupportedFamily(_)
        | Error::Parse(_)
        | Error::Precondition(_)
        | Error::WindowTooLarge(_)
        | Error::DegenerateC(_)
        | Error::InapplicableSmallR(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let rendered = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_code(&e));
        }
    };
    let format = cli.format.unwrap_or(rendered.default);
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| emit(&mut f, &rendered, format)),
        None => emit(&mut io::stdout().lock(), &rendered, format),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(3);
    }
    if rendered.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
