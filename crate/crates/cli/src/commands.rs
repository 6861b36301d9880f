//! The subcommands, each behind the [`Command`] trait and registered by name.

use clap::{value_parser, Arg, ArgAction, ArgMatches};
use serde::Serialize;
use serde_json::Value;

use corrterm::alexander::torsion_table;
use corrterm::brcover::{KpModel, SigmaRow, SURROGATE_NOTE};
use corrterm::cfk::{equal_up_to_acyclic, split_summands, tensor, BifilteredComplex};
use corrterm::exactnum::serialize_bigint;
use corrterm::lens::{d_lens, symmetric_representative, LensSpace, SpincLabel};
use corrterm::obstruction::{witness, LinearCombination};
use corrterm::registry::{ComplexSource, KnotSource, Registry};
use corrterm::surgery::{d_surgery, torsion_index, SurgeryDescription};
use corrterm::{Error, Rational, Result};

use crate::render;

/// A parsed invocation: an optional cache key and the computation itself.
pub struct Plan {
    pub key: Option<String>,
    pub job: Box<dyn FnOnce() -> Result<Value>>,
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;

    fn definition(&self) -> clap::Command;

    /// Validate the arguments and prepare the computation.
    fn plan(&self, m: &ArgMatches) -> Result<Plan>;

    fn exit_code(&self, _report: &Value) -> i32 {
        0
    }

    fn render_tsv(&self, report: &Value) -> String {
        render::table(report)
    }
}

pub struct Commands {
    entries: Vec<Box<dyn Command>>,
}

impl Commands {
    pub fn standard() -> Self {
        let mut c = Commands {
            entries: Vec::new(),
        };
        c.register(Box::new(Dlens));
        c.register(Box::new(Dsurgery));
        c.register(Box::new(Torsion));
        c.register(Box::new(Sigma));
        c.register(Box::new(Obstruct));
        c.register(Box::new(Cfk));
        c
    }

    pub fn register(&mut self, cmd: Box<dyn Command>) {
        self.entries.retain(|c| c.name() != cmd.name());
        self.entries.push(cmd);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.entries.iter().find(|c| c.name() == name).map(|c| &**c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Command> {
        self.entries.iter().map(|c| &**c)
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn label_args() -> [Arg; 2] {
    [
        Arg::new("label")
            .long("label")
            .value_name("I")
            .value_parser(value_parser!(u64))
            .conflicts_with("all"),
        Arg::new("all")
            .long("all")
            .action(ArgAction::SetTrue)
            .help("every label (the default)"),
    ]
}

/// The requested labels and their part of a cache key.
fn labels(m: &ArgMatches, p: u64) -> Result<(Vec<SpincLabel>, String)> {
    match m.get_one::<u64>("label") {
        Some(&i) => Ok((vec![SpincLabel::new(i, p)?], format!("label={i}"))),
        None => Ok((
            (0..p)
                .map(|i| SpincLabel::new(i, p))
                .collect::<Result<_>>()?,
            "all".into(),
        )),
    }
}

fn knot_arg() -> Arg {
    Arg::new("knot")
        .long("knot")
        .value_name("KNOT")
        .required(true)
        .help("torus:A,B | unknot | alexander:E:C,E:C,...")
}

struct Dlens;

#[derive(Serialize)]
struct DlensRow {
    label: u64,
    d: Rational,
}

#[derive(Serialize)]
struct DlensReport {
    p: u64,
    q: u64,
    rows: Vec<DlensRow>,
}

impl Command for Dlens {
    fn name(&self) -> &'static str {
        "dlens"
    }

    fn definition(&self) -> clap::Command {
        clap::Command::new("dlens")
            .about("d-invariants of -L(p,q) = S^3_{p/q}(U)")
            .arg(
                Arg::new("p")
                    .long("p")
                    .required(true)
                    .value_parser(value_parser!(u64)),
            )
            .arg(
                Arg::new("q")
                    .long("q")
                    .required(true)
                    .allow_negative_numbers(true)
                    .value_parser(value_parser!(i64)),
            )
            .args(label_args())
    }

    fn plan(&self, m: &ArgMatches) -> Result<Plan> {
        let lens = LensSpace::new(*m.get_one("p").unwrap(), *m.get_one("q").unwrap())?;
        let (labels, which) = labels(m, lens.p())?;
        Ok(Plan {
            key: Some(format!("dlens p={} q={} {which}", lens.p(), lens.q())),
            job: Box::new(move || {
                let rows = labels
                    .into_iter()
                    .map(|l| {
                        Ok(DlensRow {
                            label: l.value(),
                            d: d_lens(lens.p(), lens.q() as i64, l)?,
                        })
                    })
                    .collect::<Result<_>>()?;
                to_value(&DlensReport {
                    p: lens.p(),
                    q: lens.q(),
                    rows,
                })
            }),
        })
    }
}

struct Dsurgery;

#[derive(Serialize)]
struct DsurgeryRow {
    label: u64,
    symmetric: i64,
    torsion_index: String,
    d_lens: Rational,
    d: Rational,
}

#[derive(Serialize)]
struct DsurgeryReport {
    manifold: String,
    knot: String,
    alexander: String,
    genus: u64,
    slope: Rational,
    rows: Vec<DsurgeryRow>,
}

impl Command for Dsurgery {
    fn name(&self) -> &'static str {
        "dsurgery"
    }

    fn definition(&self) -> clap::Command {
        clap::Command::new("dsurgery")
            .about("d-invariants of positive p/q surgery on an L-space knot")
            .arg(knot_arg())
            .arg(
                Arg::new("slope")
                    .long("slope")
                    .value_name("P/Q")
                    .required(true),
            )
            .args(label_args())
    }

    fn plan(&self, m: &ArgMatches) -> Result<Plan> {
        let knot =
            Registry::<dyn KnotSource>::knots().build(m.get_one::<String>("knot").unwrap())?;
        let slope: Rational = m.get_one::<String>("slope").unwrap().parse()?;
        let s = SurgeryDescription::new(knot, &slope)?;
        let (labels, which) = labels(m, s.p())?;
        let key = format!(
            "dsurgery knot={} alexander={} slope={} {which}",
            s.knot().name(),
            s.knot().alexander().machine_form(),
            s.slope()
        );
        Ok(Plan {
            key: Some(key),
            job: Box::new(move || {
                let rows = labels
                    .into_iter()
                    .map(|l| {
                        Ok(DsurgeryRow {
                            label: l.value(),
                            symmetric: symmetric_representative(l),
                            torsion_index: torsion_index(&s, l).to_string(),
                            d_lens: d_lens(s.p(), s.q() as i64, l)?,
                            d: d_surgery(&s, l)?,
                        })
                    })
                    .collect::<Result<_>>()?;
                to_value(&DsurgeryReport {
                    manifold: s.to_string(),
                    knot: s.knot().name().to_string(),
                    alexander: s.knot().alexander().symmetric_form(),
                    genus: s.knot().genus(),
                    slope: s.slope(),
                    rows,
                })
            }),
        })
    }
}

struct Torsion;

#[derive(Serialize)]
struct TorsionRow {
    i: i64,
    #[serde(serialize_with = "serialize_bigint")]
    t: num_bigint::BigInt,
}

#[derive(Serialize)]
struct TorsionReport {
    knot: String,
    alexander: String,
    genus: u64,
    rows: Vec<TorsionRow>,
}

impl Command for Torsion {
    fn name(&self) -> &'static str {
        "torsion"
    }

    fn definition(&self) -> clap::Command {
        clap::Command::new("torsion")
            .about("torsion coefficients t_i for 0 <= i <= g")
            .arg(knot_arg())
    }

    fn plan(&self, m: &ArgMatches) -> Result<Plan> {
        let knot =
            Registry::<dyn KnotSource>::knots().build(m.get_one::<String>("knot").unwrap())?;
        Ok(Plan {
            key: Some(format!(
                "torsion knot={} alexander={}",
                knot.name(),
                knot.alexander().machine_form()
            )),
            job: Box::new(move || {
                let rows = torsion_table(&knot)
                    .into_iter()
                    .map(|(i, t)| TorsionRow { i, t })
                    .collect();
                to_value(&TorsionReport {
                    knot: knot.name().to_string(),
                    alexander: knot.alexander().symmetric_form(),
                    genus: knot.genus(),
                    rows,
                })
            }),
        })
    }
}

struct Sigma;

#[derive(Serialize)]
struct SigmaReport {
    p: u64,
    order: u64,
    slope: Rational,
    spin_label: u64,
    negative_k: Vec<u64>,
    surrogate: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<Vec<SigmaRow>>,
}

impl Command for Sigma {
    fn name(&self) -> &'static str {
        "sigma"
    }

    fn definition(&self) -> clap::Command {
        clap::Command::new("sigma")
            .about("the branched cover Sigma_p of K_p and its metabolizer labels")
            .arg(
                Arg::new("p")
                    .long("p")
                    .required(true)
                    .value_parser(value_parser!(u64)),
            )
            .arg(
                Arg::new("table")
                    .long("table")
                    .action(ArgAction::SetTrue)
                    .help("print the full label table"),
            )
    }

    fn plan(&self, m: &ArgMatches) -> Result<Plan> {
        let kp = KpModel::new(*m.get_one("p").unwrap())?;
        let with_table = m.get_flag("table");
        Ok(Plan {
            key: Some(format!("sigma p={} table={with_table}", kp.p())),
            job: Box::new(move || {
                let rows = kp.table()?;
                let negative_k = rows
                    .iter()
                    .filter(|r| r.d.is_negative())
                    .map(|r| r.k)
                    .collect();
                to_value(&SigmaReport {
                    p: kp.p(),
                    order: kp.order(),
                    slope: kp.slope(),
                    spin_label: kp.spin_label().value(),
                    negative_k,
                    surrogate: SURROGATE_NOTE,
                    rows: with_table.then_some(rows),
                })
            }),
        })
    }
}

struct Obstruct;

impl Command for Obstruct {
    fn name(&self) -> &'static str {
        "obstruct"
    }

    fn definition(&self) -> clap::Command {
        clap::Command::new("obstruct")
            .about("certify that a combination of the knots K_p is not in T_1")
            .arg(
                Arg::new("combo")
                    .long("combo")
                    .value_name("COMBINATION")
                    .required(true)
                    .allow_hyphen_values(true)
                    .help("e.g. \"1*K3 + 2*K5 - 1*K8\""),
            )
            .arg(
                Arg::new("alexander-one")
                    .long("alexander-one")
                    .action(ArgAction::SetTrue)
                    .help("add an Alexander polynomial one summand"),
            )
    }

    fn plan(&self, m: &ArgMatches) -> Result<Plan> {
        let c = LinearCombination::parse(
            m.get_one::<String>("combo").unwrap(),
            m.get_flag("alexander-one"),
        )?;
        Ok(Plan {
            key: Some(format!(
                "obstruct combo={c} alexander_one={}",
                c.alexander_one()
            )),
            job: Box::new(move || to_value(&witness(&c)?)),
        })
    }

    fn exit_code(&self, report: &Value) -> i32 {
        if report["obstructed"] == Value::Bool(true) {
            0
        } else {
            2
        }
    }

    fn render_tsv(&self, r: &Value) -> String {
        let mut out = render::fields(
            r,
            &[
                "combination",
                "obstructed",
                "q",
                "mirrored",
                "reduced",
                "witness_element",
                "d_witness",
            ],
        );
        for w in r["witness_labels"].as_array().into_iter().flatten() {
            out.push_str(&format!(
                "witness\t{}\t{}\t{} mod {}\t{}\t{}\n",
                render::scalar(&w["summand"]),
                render::scalar(&w["sign"]),
                render::scalar(&w["label"]),
                render::scalar(&w["modulus"]),
                render::scalar(&w["kind"]),
                render::scalar(&w["d"]),
            ));
        }
        for t in r["d_tables"].as_array().into_iter().flatten() {
            out.push_str(&format!(
                "d_table\t{}\t{}\t{}\n",
                render::scalar(&t["summand"]),
                render::scalar(&t["coefficient"]),
                render::scalar(&t["d"]),
            ));
        }
        for line in r["narrative"].as_array().into_iter().flatten() {
            out.push_str(&format!("# {}\n", render::scalar(line)));
        }
        out.push_str(&format!("# scope\t{}\n", render::scalar(&r["scope"])));
        out.push_str(&format!(
            "# surrogate\t{}\n",
            render::scalar(&r["surrogate"])
        ));
        out
    }
}

struct Cfk;

#[derive(Serialize)]
struct ComplexSummary {
    generators: usize,
    arrows: usize,
    homology_rank: usize,
    acyclic: bool,
    complex: String,
}

impl ComplexSummary {
    fn of(c: &BifilteredComplex) -> Self {
        ComplexSummary {
            generators: c.len(),
            arrows: c.arrow_count(),
            homology_rank: c.homology_rank(),
            acyclic: c.is_acyclic(),
            complex: c.to_text(),
        }
    }
}

#[derive(Serialize)]
struct SplitReport {
    moves: usize,
    recombines: bool,
    summands: Vec<ComplexSummary>,
}

#[derive(Serialize)]
struct CompareReport {
    against: String,
    /// `null` when the isomorphism search was inconclusive.
    equal_up_to_acyclic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct CfkReport {
    a: String,
    b: String,
    tensor: ComplexSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    split: Option<SplitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<CompareReport>,
}

impl Command for Cfk {
    fn name(&self) -> &'static str {
        "cfk"
    }

    fn definition(&self) -> clap::Command {
        let source = "staircase:N | unknot | box:I,J,GR | file:PATH";
        clap::Command::new("cfk")
            .about("bifiltered complexes over F_2[U,U^-1]")
            .subcommand_required(true)
            .subcommand(
                clap::Command::new("tensor")
                    .about(
                        "tensor two complexes, optionally split and compare up to acyclic summands",
                    )
                    .arg(
                        Arg::new("a")
                            .long("a")
                            .value_name("SOURCE")
                            .required(true)
                            .help(source),
                    )
                    .arg(
                        Arg::new("b")
                            .long("b")
                            .value_name("SOURCE")
                            .required(true)
                            .help(source),
                    )
                    .arg(Arg::new("split").long("split").action(ArgAction::SetTrue))
                    .arg(Arg::new("compare").long("compare").value_name("SOURCE")),
            )
    }

    fn plan(&self, m: &ArgMatches) -> Result<Plan> {
        let Some(("tensor", m)) = m.subcommand() else {
            return Err(Error::InvalidInput("expected `cfk tensor`".into()));
        };
        let registry = Registry::<dyn ComplexSource>::complexes();
        let source_a = m.get_one::<String>("a").unwrap().clone();
        let source_b = m.get_one::<String>("b").unwrap().clone();
        let compare_source = m.get_one::<String>("compare").cloned();
        let a = registry.build(&source_a)?;
        let b = registry.build(&source_b)?;
        let compare = compare_source
            .as_deref()
            .map(|s| registry.build(s))
            .transpose()?;
        let split = m.get_flag("split");
        let from_file = [Some(&source_a), Some(&source_b), compare_source.as_ref()]
            .into_iter()
            .flatten()
            .any(|s| s.starts_with("file:"));
        let key = (!from_file).then(|| {
            format!(
                "cfk tensor a={source_a} b={source_b} split={split} compare={}",
                compare_source.as_deref().unwrap_or("-")
            )
        });
        Ok(Plan {
            key,
            job: Box::new(move || {
                let t = tensor(&a, &b);
                let split = if split {
                    let s = split_summands(&t);
                    Some(SplitReport {
                        moves: s.basis_change.moves.len(),
                        recombines: s.recombine()? == t,
                        summands: s.components.iter().map(ComplexSummary::of).collect(),
                    })
                } else {
                    None
                };
                let compare = match (compare, compare_source) {
                    (Some(c), Some(against)) => Some(match equal_up_to_acyclic(&t, &c) {
                        Ok(eq) => CompareReport {
                            against,
                            equal_up_to_acyclic: Some(eq),
                            note: None,
                        },
                        Err(e @ Error::Inconclusive(_)) => CompareReport {
                            against,
                            equal_up_to_acyclic: None,
                            note: Some(e.to_string()),
                        },
                        Err(e) => return Err(e),
                    }),
                    _ => None,
                };
                to_value(&CfkReport {
                    a: source_a,
                    b: source_b,
                    tensor: ComplexSummary::of(&t),
                    split,
                    compare,
                })
            }),
        })
    }

    fn exit_code(&self, report: &Value) -> i32 {
        match report.get("compare") {
            Some(c) if c["equal_up_to_acyclic"] != Value::Bool(true) => 2,
            _ => 0,
        }
    }

    fn render_tsv(&self, r: &Value) -> String {
        let summary = |title: String, c: &Value| {
            format!(
                "# {title}: {} generators, {} arrows, homology rank {}, acyclic {}\n{}",
                render::scalar(&c["generators"]),
                render::scalar(&c["arrows"]),
                render::scalar(&c["homology_rank"]),
                render::scalar(&c["acyclic"]),
                render::scalar(&c["complex"]),
            )
        };
        let mut out = summary(
            format!(
                "tensor {} * {}",
                render::scalar(&r["a"]),
                render::scalar(&r["b"])
            ),
            &r["tensor"],
        );
        if let Some(s) = r.get("split") {
            out.push_str(&format!(
                "# split: {} moves, recombines {}\n",
                render::scalar(&s["moves"]),
                render::scalar(&s["recombines"])
            ));
            for (k, c) in s["summands"].as_array().into_iter().flatten().enumerate() {
                out.push_str(&summary(format!("summand {k}"), c));
            }
        }
        if let Some(c) = r.get("compare") {
            out.push_str(&format!(
                "# compare {}: equal_up_to_acyclic {}\n",
                render::scalar(&c["against"]),
                match &c["equal_up_to_acyclic"] {
                    Value::Null => "inconclusive".to_string(),
                    v => render::scalar(v),
                }
            ));
        }
        out
    }
}
