use fsdim::arithmetic::{add_rational_mod1, multiply_mod1};
use fsdim::entropy::dimension_profile;
use fsdim::gambler::{success_report, Gambler};
use fsdim::measures::{
    average_entropy_profile, check_partition_invariance, pushforward_integer, renyi_profile, AnalyticMeasure,
    MeasureSpec,
};
use fsdim::params::{parse_checkpoints, parse_int_list};
use fsdim::repro;
use fsdim::sequences::{DilutionPattern, MuChampernowneSchedule, StageSchedule};
use fsdim::weyl::{max_depth, measure_fourier, weyl_series};
use fsdim::SymbolSequence;
use serde::Serialize;

use crate::io::{failed, invalid, prefix_length, read_digits, read_text, write_digits, write_report};
use crate::{
    ArithArgs, Cli, Command, EntropyArgs, GambleArgs, GenerateArgs, GeneratorKind, MeasureAction, MeasureArgs,
    Outcome, ReproArgs, WeylArgs,
};

pub fn run(cli: &Cli) -> Outcome<()> {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Entropy(a) => entropy(cli, a, false),
        Command::Dims(a) => entropy(cli, a, true),
        Command::Weyl(a) => weyl(cli, a),
        Command::Measure(a) => measure(cli, a),
        Command::Arith(a) => arith(cli, a),
        Command::Gamble(a) => gamble(cli, a),
        Command::Repro(a) => repro_cmd(cli, a),
    }
}

fn need<'a, T>(value: &'a Option<T>, flag: &str, kind: &str) -> Outcome<&'a T> {
    value.as_ref().ok_or_else(|| invalid(format!("{kind} needs --{flag}")))
}

fn fill_sequence(a: &GenerateArgs) -> Outcome<SymbolSequence> {
    match &a.fill {
        Some(path) => {
            let y = read_digits(path)?;
            if y.base() != a.base {
                return Err(invalid(format!("fill file has base {} but --base is {}", y.base(), a.base)));
            }
            Ok(y)
        }
        None => SymbolSequence::champernowne(a.base).map_err(invalid),
    }
}

fn measure_from(path: &std::path::Path) -> Outcome<AnalyticMeasure> {
    let spec = MeasureSpec::parse(&read_text(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    spec.build().map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn generate(a: &GenerateArgs) -> Outcome<()> {
    let x = match a.kind {
        GeneratorKind::Champernowne => SymbolSequence::champernowne(a.base).map_err(invalid)?,
        GeneratorKind::Periodic => {
            let period = need(&a.period, "period", "periodic")?;
            let file = fsdim::sequences::parse_digits(&format!("#base:{}\n{period}", a.base)).map_err(invalid)?;
            SymbolSequence::periodic(a.base, file.digits).map_err(invalid)?
        }
        GeneratorKind::Diluted => {
            let p = DilutionPattern::parse(need(&a.pattern, "pattern", "diluted")?).map_err(invalid)?;
            SymbolSequence::diluted(&fill_sequence(a)?, &p).map_err(invalid)?
        }
        GeneratorKind::Alternating => {
            let odd = DilutionPattern::parse(&a.odd).map_err(invalid)?;
            let even = DilutionPattern::parse(&a.even).map_err(invalid)?;
            let schedule = StageSchedule::geometric(a.first_stage, a.ratio, a.stages).map_err(invalid)?;
            SymbolSequence::alternating(&odd, &even, &fill_sequence(a)?, &schedule).map_err(invalid)?
        }
        GeneratorKind::MuChampernowne => {
            let mu = measure_from(need(&a.measure, "measure", "mu-champernowne")?)?;
            let schedule = MuChampernowneSchedule::desk(&mu, a.n).map_err(invalid)?;
            SymbolSequence::mu_champernowne(&mu, &schedule).map_err(invalid)?
        }
    };
    let digits = x.prefix(a.n).map_err(failed)?;
    write_digits(a.output.as_deref(), x.base(), &digits)
}

fn entropy(cli: &Cli, a: &EntropyArgs, summary: bool) -> Outcome<()> {
    let x = read_digits(&a.input)?;
    let l_list: Vec<usize> = parse_int_list(&a.l).map_err(invalid)?;
    let n = prefix_length(&x, a.n, 0)?;
    let checkpoints = parse_checkpoints(&a.checkpoints, n).map_err(invalid)?;
    if !(0.0..=1.0).contains(&a.burn_in) {
        return Err(invalid("--burn-in must lie in [0, 1]"));
    }
    let est = dimension_profile(&x, &l_list, &checkpoints, a.mode, a.burn_in).map_err(invalid)?;
    if summary {
        #[derive(Serialize)]
        struct Dims<'a> {
            dim_lo: f64,
            dim_hi: f64,
            estimate: &'a fsdim::entropy::DimensionEstimate,
        }
        write_report(a.json.as_deref(), cli, &Dims { dim_lo: est.dim_lo, dim_hi: est.dim_hi, estimate: &est })
    } else {
        write_report(a.json.as_deref(), cli, &est)
    }
}

fn weyl(cli: &Cli, a: &WeylArgs) -> Outcome<()> {
    let x = read_digits(&a.input)?;
    let ks: Vec<i64> = parse_int_list(&a.k).map_err(invalid)?;
    if a.depth == 0 {
        return Err(invalid("--depth must be positive"));
    }
    let depth = a.depth.min(max_depth(x.base()));
    let n = prefix_length(&x, a.n, depth - 1)?;
    let checkpoints = parse_checkpoints(&a.checkpoints, n).map_err(invalid)?;
    let series = weyl_series(&x, &ks, &checkpoints, depth).map_err(failed)?;
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_path(path).map_err(failed)?;
        w.write_record(["k", "n", "re", "im", "err_bound"]).map_err(failed)?;
        for s in &series {
            for (n, z) in s.points() {
                w.write_record([s.k.to_string(), n.to_string(), z.re.to_string(), z.im.to_string(), format!("{:e}", s.error_bound)])
                    .map_err(failed)?;
            }
        }
        w.flush().map_err(failed)?;
        if a.json.is_none() {
            return Ok(());
        }
    }
    write_report(a.json.as_deref(), cli, &series)
}

fn measure(cli: &Cli, a: &MeasureArgs) -> Outcome<()> {
    let mu = measure_from(&a.spec)?;
    let out = a.json.as_deref();
    match &a.action {
        MeasureAction::Average { n } => {
            let n_list: Vec<usize> = parse_int_list(n).map_err(invalid)?;
            write_report(out, cli, &average_entropy_profile(&mu, &n_list).map_err(invalid)?)
        }
        MeasureAction::Renyi { m, n } => {
            let n_list: Vec<usize> = parse_int_list(n).map_err(invalid)?;
            write_report(out, cli, &renyi_profile(&mu, *m, &n_list).map_err(invalid)?)
        }
        MeasureAction::Invariance { m1, m2, l } => {
            let ls: Vec<usize> = parse_int_list(l).map_err(invalid)?;
            let rows = ls
                .iter()
                .map(|&l| check_partition_invariance(&mu, *m1, *m2, l, 0.0))
                .collect::<fsdim::Result<Vec<_>>>()
                .map_err(invalid)?;
            write_report(out, cli, &rows)
        }
        MeasureAction::Fourier { k, depth, push } => {
            let ks: Vec<i64> = parse_int_list(k).map_err(invalid)?;
            let target = match push {
                Some(m) => pushforward_integer(&mu, *m).map_err(invalid)?,
                None => mu,
            };
            #[derive(Serialize)]
            struct Coefficient {
                k: i64,
                re: f64,
                im: f64,
                error_bound: f64,
            }
            let rows = ks
                .iter()
                .map(|&k| {
                    measure_fourier(&target, k, *depth)
                        .map(|b| Coefficient { k, re: b.value.re, im: b.value.im, error_bound: b.error_bound })
                })
                .collect::<fsdim::Result<Vec<_>>>()
                .map_err(invalid)?;
            write_report(out, cli, &rows)
        }
        MeasureAction::Cylinder { word } => {
            let file = fsdim::sequences::parse_digits(&format!("#base:{}\n{word}", mu.base())).map_err(invalid)?;
            write_report(out, cli, &mu.cylinder_prob(&file.digits))
        }
    }
}

fn arith(cli: &Cli, a: &ArithArgs) -> Outcome<()> {
    let x = read_digits(&a.input)?;
    let result = match (a.mul, &a.add) {
        (Some(m), None) => multiply_mod1(&x, m, a.want).map_err(invalid)?,
        (None, Some(pq)) => {
            let (p, q) = pq.split_once('/').ok_or_else(|| invalid(format!("--add expects p/q, got {pq:?}")))?;
            let p: i64 = p.trim().parse().map_err(|_| invalid(format!("bad numerator in {pq:?}")))?;
            let q: u64 = q.trim().parse().map_err(|_| invalid(format!("bad denominator in {pq:?}")))?;
            add_rational_mod1(&x, p, q, a.want).map_err(invalid)?
        }
        _ => return Err(invalid("give exactly one of --mul and --add")),
    };
    if let Some(d) = &result.diagnostic {
        eprintln!("note: {d}");
    }
    if a.json.is_some() {
        #[derive(Serialize)]
        struct Meta<'a> {
            base: u32,
            certified_count: usize,
            input_digits: usize,
            diagnostic: &'a Option<String>,
        }
        let meta = Meta {
            base: result.base,
            certified_count: result.certified_count,
            input_digits: result.input_digits,
            diagnostic: &result.diagnostic,
        };
        write_report(a.json.as_deref(), cli, &meta)?;
    }
    write_digits(a.out.as_deref(), result.base, result.certified())?;
    if result.certified_count < a.want {
        return Err(failed(format!("only {} of {} digits could be certified", result.certified_count, a.want)));
    }
    Ok(())
}

fn gamble(cli: &Cli, a: &GambleArgs) -> Outcome<()> {
    let g = Gambler::from_json(&read_text(&a.gambler)?).map_err(|e| invalid(format!("{}: {e}", a.gambler.display())))?;
    let x = read_digits(&a.input)?;
    if x.base() != 2 {
        return Err(invalid(format!("gamblers read binary input, got base {}", x.base())));
    }
    if !a.s.is_finite() || a.s < 0.0 {
        return Err(invalid("--s must be finite and nonnegative"));
    }
    let n = prefix_length(&x, a.n, 0)?;
    let checkpoints = parse_checkpoints(&a.checkpoints, n).map_err(invalid)?;
    let report = success_report(&g, a.s, &x, &checkpoints, a.threshold).map_err(failed)?;
    write_report(a.json.as_deref(), cli, &report)
}

fn repro_cmd(cli: &Cli, a: &ReproArgs) -> Outcome<()> {
    if a.case == "lemma41" {
        let rows = repro::stage_table().map_err(failed)?;
        println!("{:>5} {:>10} {:>7} {:>8} {:>8}", "stage", "end", "pattern", "P(01)", "target");
        for r in &rows {
            println!("{:>5} {:>10} {:>7} {:>8.4} {:>8.4}", r.stage, r.end, r.pattern, r.frequency_01, r.target);
        }
        if a.json.is_some() {
            write_report(a.json.as_deref(), cli, &rows)?;
        }
        return Ok(());
    }
    let outcomes = if a.case == "all" {
        repro::run_all()
    } else {
        let id: u32 = a.case.parse().map_err(|_| invalid(format!("unknown case {:?}", a.case)))?;
        vec![repro::run(id).ok_or_else(|| invalid(format!("no criterion {id}")))?]
    };
    for o in &outcomes {
        println!("{}", o.line());
    }
    if a.json.is_some() {
        write_report(a.json.as_deref(), cli, &outcomes)?;
    }
    let failures = outcomes.iter().filter(|o| !o.passed).count();
    if failures > 0 {
        return Err(failed(format!("{failures} of {} criteria failed", outcomes.len())));
    }
    Ok(())
}
