use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use looptop_core::cobar::{predicted_loop_hilbert, verify_loop_homology, DEFAULT_MAX_CELLS};
use looptop_core::lyndon::{bracket_string, lie_basis};
use looptop_core::ncalgebra::{normalize_relation, relation_from_space, Letter};
use looptop_core::normal_form::hilbert_from_enumeration;
use looptop_core::series::PowerSeries;
use looptop_core::spaces::{betti_one_report, classify_rational, decomposition_report, moore_report, SpaceModel};
use looptop_core::Error;
use num_traits::Signed;
use serde_json::Number;

use looptop::report::*;
use looptop::space::{parse_factors, parse_matrix, parse_signs, parse_space};
use looptop::table::{fields, Table};

const MAX_DIM_GUARD: u32 = 64;
const VERIFY_DEGREE_GUARD: u32 = 16;
const HILBERT_DEGREE_GUARD: u32 = 40;
const LIE_DEGREE_GUARD: u32 = 24;

#[derive(Parser)]
#[command(name = "looptop", version, about = "Loop space homotopy decompositions of highly connected manifolds and two-cell complexes")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an (n-1)-connected 2n-manifold with middle Betti number r.
    Manifold {
        #[arg(long)]
        n: u32,
        #[arg(long, alias = "r")]
        betti: u32,
        /// Intersection form, e.g. "0,1;1,0". Defaults to a standard form.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, default_value_t = 10)]
        max_dim: u32,
        /// Lift the size guard on --max-dim.
        #[arg(long)]
        allow_large: bool,
    },
    /// Decompose a connected sum of sphere products.
    ConnectedSum {
        /// Factors such as "2x3,2x3".
        #[arg(long)]
        factors: String,
        /// Orientation signs such as "+,-". Defaults to all positive.
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
        #[arg(long, default_value_t = 10)]
        max_dim: u32,
        #[arg(long)]
        allow_large: bool,
    },
    /// Decompose a wedge of n-spheres with one 2n-cell attached.
    Cw {
        #[arg(long)]
        n: u32,
        /// Cup-product form, e.g. "0,7;7,0".
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 10)]
        max_dim: u32,
        #[arg(long)]
        allow_large: bool,
    },
    /// Report on a manifold with a single middle class in dimension 2n.
    BettiOne {
        #[arg(long)]
        n: u32,
        /// Attaching-map parameter, reduced mod 12 for n = 4 and mod 120 for n = 8.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
    },
    /// Independent checks.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Rational type and homotopy exponent verdict.
    Moore {
        #[arg(long)]
        space: String,
    },
    /// Hilbert series of loop space homology, from the series and from normal words.
    Hilbert {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 12)]
        max_degree: u32,
        #[arg(long)]
        allow_large: bool,
    },
    /// Lyndon-word basis of the homotopy Lie algebra.
    LieBasis {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Integral homology of the cobar construction against the predicted ranks and torsion.
    Cobar {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
        /// Largest chain complex basis, in words.
        #[arg(long, env = "LOOPTOP_MAX_CELLS", default_value_t = DEFAULT_MAX_CELLS)]
        max_cells: usize,
        #[arg(long)]
        allow_large: bool,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Integrity(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

struct Outcome {
    text: String,
    passed: bool,
}

fn guard(value: u32, limit: u32, flag: &str, allow: bool) -> Result<(), Failure> {
    if value > limit && !allow {
        return Err(Failure::Usage(format!("{flag} {value} exceeds the guard of {limit}; pass --allow-large to run anyway")));
    }
    Ok(())
}

fn usage(msg: String) -> Failure {
    Failure::Usage(msg)
}

fn subscript(n: usize) -> String {
    n.to_string().chars().map(|c| char::from_u32(0x2080 + c.to_digit(10).unwrap()).unwrap()).collect()
}

fn letter_names(space: &SpaceModel) -> impl Fn(Letter) -> String {
    let csum = matches!(space, SpaceModel::ConnectedSum { .. });
    move |l: Letter| {
        let l = l as usize;
        if csum {
            format!("{}{}", if l.is_multiple_of(2) { "α" } else { "β" }, subscript(l / 2 + 1))
        } else {
            format!("α{}", subscript(l + 1))
        }
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

fn join_or_none<T: ToString>(xs: &[T]) -> String {
    if xs.is_empty() {
        "none".into()
    } else {
        xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
    }
}

fn decomposition(space: &SpaceModel, max_dim: u32, format: Format) -> Result<Outcome, Failure> {
    let rep = match space {
        SpaceModel::BettiOne { n, m } => betti_one_report(*n, *m)?,
        _ => decomposition_report(space, max_dim)?,
    };
    let json = ReportJson::new(space, &rep);
    let text = match format {
        Format::Json => to_json(&json),
        Format::Table => {
            let mut pairs = vec![
                ("space", json.space.text.clone()),
                ("max dimension", json.max_dimension.to_string()),
                ("classification", json.classification.clone()),
            ];
            if let Some(g) = &rep.growth {
                pairs.push(("growth rate", format!("{} ≈ {}", g.symbolic(), g.decimal(GROWTH_DIGITS))));
            }
            pairs.push(("inverted primes", join_or_none(&rep.inverted_primes)));
            pairs.push(("loop decomposition", json.loop_decomposition.clone()));
            pairs.push(("moore verdict", json.moore.verdict.clone()));
            pairs.push(("moore reason", json.moore.justification.clone()));
            if let Some(c) = &json.moore.caveat {
                pairs.push(("moore caveat", c.clone()));
            }
            for n in &json.notes {
                pairs.push(("note", n.clone()));
            }
            let mut t = Table::new(&["sphere", "multiplicity", "witnesses"]);
            for s in &json.summands {
                t.row(vec![format!("S{}", superscript(s.sphere_dim)), s.multiplicity.to_string(), s.witnesses.join(", ")]);
            }
            format!("{}\n{}", fields(&pairs), t.render())
        }
    };
    Ok(Outcome { text, passed: true })
}

fn moore(space: &SpaceModel, format: Format) -> Result<Outcome, Failure> {
    let (class, _) = classify_rational(space)?;
    let out = MooreOutput {
        space: SpaceJson::new(space),
        classification: class.as_str().into(),
        moore: (&moore_report(space)?).into(),
    };
    let text = match format {
        Format::Json => to_json(&out),
        Format::Table => {
            let mut pairs = vec![
                ("space", out.space.text.clone()),
                ("classification", out.classification.clone()),
                ("verdict", out.moore.verdict.clone()),
                ("reason", out.moore.justification.clone()),
            ];
            if let Some(c) = &out.moore.caveat {
                pairs.push(("caveat", c.clone()));
            }
            fields(&pairs)
        }
    };
    Ok(Outcome { text, passed: true })
}

fn verify_cobar(space: &SpaceModel, max_degree: u32, max_cells: usize, format: Format) -> Result<Outcome, Failure> {
    let rep = verify_loop_homology(space, max_degree + 1, max_cells)?;
    let json = VerifyJson::new(space, max_degree, &rep);
    let text = match format {
        Format::Json => to_json(&json),
        Format::Table => {
            let primes: Vec<String> = json.allowed_torsion_primes.iter().map(Number::to_string).collect();
            let policy = match json.torsion_policy.as_str() {
                "none" => "torsion-free expected".to_string(),
                "bad-primes" => format!("torsion allowed only at primes {}", join_or_none(&primes)),
                _ => "torsion unconstrained".to_string(),
            };
            let mut pairs = vec![
                ("space", json.space.text.clone()),
                ("max degree", max_degree.to_string()),
                ("cells", json.cells.to_string()),
                ("torsion", policy),
                ("euler-audited weights", join_or_none(&json.euler_weights)),
            ];
            for d in &json.discrepancies {
                pairs.push(("discrepancy", d.clone()));
            }
            pairs.push(("result", if json.passed { "passed".into() } else { "FAILED".into() }));
            let mut t = Table::new(&["degree", "rank", "predicted", "torsion"]);
            for r in &json.rows {
                let torsion: Vec<String> = r.torsion.iter().map(|t| format!("Z/{t}")).collect();
                t.row(vec![
                    r.degree.to_string(),
                    r.rank.to_string(),
                    r.predicted.map_or("-".into(), |p| p.to_string()),
                    if torsion.is_empty() { "0".into() } else { torsion.join(" ⊕ ") },
                ]);
            }
            format!("{}\n{}", fields(&pairs), t.render())
        }
    };
    Ok(Outcome { text, passed: json.passed })
}

fn natural(s: &PowerSeries, k: usize) -> Result<Number, Failure> {
    let c = s.coeff(k);
    if !c.is_integer() || c.is_negative() {
        return Err(Failure::Verification(format!("series coefficient {c} in degree {k} is not a natural number")));
    }
    Ok(c.to_integer().to_string().parse().expect("integers are valid JSON numbers"))
}

fn hilbert(space: &SpaceModel, max_degree: u32, format: Format) -> Result<Outcome, Failure> {
    let order = max_degree as usize;
    let (source, series, enumerated) = match relation_from_space(space) {
        Ok((alphabet, rel)) => {
            let nr = normalize_relation(&alphabet, &rel)?;
            let series = PowerSeries::one_relator_denominator(alphabet.degrees(), nr.relation_degree(), order).inverse()?;
            let words = hilbert_from_enumeration(nr.alphabet(), &nr.forbidden_word(), max_degree)?;
            ("one-relator", series, Some(words))
        }
        Err(Error::Unsupported(why)) => match predicted_loop_hilbert(space, order)? {
            Some(s) => ("cobar-prediction", s, None),
            None => return Err(Failure::Usage(format!("unsupported: {why}"))),
        },
        Err(e) => return Err(e.into()),
    };
    let mut rows = Vec::new();
    for d in 0..=max_degree {
        let s = natural(&series, d as usize)?;
        let e = enumerated.as_ref().map(|w| natural(w, d as usize)).transpose()?;
        rows.push(HilbertRowJson { degree: d, series: s, enumerated: e });
    }
    let agree = rows.iter().all(|r| r.enumerated.as_ref().is_none_or(|e| *e == r.series));
    let out = HilbertJson { space: SpaceJson::new(space), max_degree, source: source.into(), rows, agree };
    let text = match format {
        Format::Json => to_json(&out),
        Format::Table => {
            let pairs = [
                ("space", out.space.text.clone()),
                ("series", out.source.clone()),
                ("agreement", if out.agree { "series and normal words agree".into() } else { "MISMATCH".to_string() }),
            ];
            let mut t = Table::new(&["degree", "series", "normal words"]);
            for r in &out.rows {
                t.row(vec![r.degree.to_string(), r.series.to_string(), r.enumerated.as_ref().map_or("-".into(), Number::to_string)]);
            }
            format!("{}\n{}", fields(&pairs), t.render())
        }
    };
    Ok(Outcome { text, passed: out.agree })
}

fn lie(space: &SpaceModel, max_degree: u32, format: Format) -> Result<Outcome, Failure> {
    let (alphabet, rel) = relation_from_space(space)?;
    let nr = normalize_relation(&alphabet, &rel)?;
    let names = letter_names(space);
    let basis = lie_basis(&nr, max_degree)?;
    let relation = format!("{} = 0", nr.relation_tensor().render(&names));
    let degrees = basis
        .into_iter()
        .map(|(degree, elems)| LieDegreeJson {
            degree,
            elements: elems
                .iter()
                .map(|e| LieElementJson { lyndon: e.lyndon.word().to_digits(), bracket: bracket_string(&e.lyndon, &names) })
                .collect(),
        })
        .collect();
    let out = LieBasisJson { space: SpaceJson::new(space), max_degree, relation, degrees };
    let text = match format {
        Format::Json => to_json(&out),
        Format::Table => {
            let pairs = [("space", out.space.text.clone()), ("relation", out.relation.clone())];
            let mut t = Table::new(&["degree", "lyndon", "bracket"]);
            for d in &out.degrees {
                for e in &d.elements {
                    t.row(vec![d.degree.to_string(), e.lyndon.clone(), e.bracket.clone()]);
                }
            }
            format!("{}\n{}", fields(&pairs), t.render())
        }
    };
    Ok(Outcome { text, passed: true })
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Manifold { n, betti, matrix, max_dim, allow_large } => {
            guard(max_dim, MAX_DIM_GUARD, "--max-dim", allow_large)?;
            let matrix = matrix.as_deref().map(parse_matrix).transpose().map_err(usage)?;
            let space = SpaceModel::manifold(n, betti, matrix)?;
            decomposition(&space, max_dim, format)
        }
        Command::ConnectedSum { factors, signs, max_dim, allow_large } => {
            guard(max_dim, MAX_DIM_GUARD, "--max-dim", allow_large)?;
            let factors = parse_factors(&factors).map_err(usage)?;
            let signs = match signs {
                Some(s) => parse_signs(&s).map_err(usage)?,
                None => vec![1; factors.len()],
            };
            decomposition(&SpaceModel::connected_sum(factors, signs)?, max_dim, format)
        }
        Command::Cw { n, matrix, max_dim, allow_large } => {
            guard(max_dim, MAX_DIM_GUARD, "--max-dim", allow_large)?;
            let space = SpaceModel::two_cell(n, parse_matrix(&matrix).map_err(usage)?)?;
            decomposition(&space, max_dim, format)
        }
        Command::BettiOne { n, m } => decomposition(&SpaceModel::betti_one(n, m)?, 0, format),
        Command::Verify { check: VerifyCommand::Cobar { space, max_degree, max_cells, allow_large } } => {
            guard(max_degree, VERIFY_DEGREE_GUARD, "--max-degree", allow_large)?;
            verify_cobar(&parse_space(&space).map_err(usage)?, max_degree, max_cells, format)
        }
        Command::Moore { space } => moore(&parse_space(&space).map_err(usage)?, format),
        Command::Hilbert { space, max_degree, allow_large } => {
            guard(max_degree, HILBERT_DEGREE_GUARD, "--max-degree", allow_large)?;
            hilbert(&parse_space(&space).map_err(usage)?, max_degree, format)
        }
        Command::LieBasis { space, max_degree, allow_large } => {
            guard(max_degree, LIE_DEGREE_GUARD, "--max-degree", allow_large)?;
            lie(&parse_space(&space).map_err(usage)?, max_degree, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.text);
            if !out.text.ends_with('\n') {
                println!();
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
