//! Subcommand dispatch: parse the remaining textual arguments, call into
//! the core library, and assemble deterministic JSON or CSV output.

use std::collections::BTreeSet;

use anyhow::Result;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use spectra_core::arith::{decimal_string, parse_rational, Dir};
use spectra_core::cantor::{cantor_sum_cover, parse_family, sum_interval_check, SumCover};
use spectra_core::cf::{
    form_markov_value, freiman_constant, height_map, lagrange_value, markov_value_word, parse_cf,
    QuadraticForm,
};
use spectra_core::combinat::{
    census_exact, core_power_report, injection_trials, prohibited_transition_census, trace_bounds,
    DenseMatrix, ProhibitionInstance, ProhibitionRule,
};
use spectra_core::horseshoe::MarkovHorseshoe;
use spectra_core::symbolic::{
    interval_detect, spectrum_sample, CfSumPotential, Potential, Sft, SpectrumSample, Sym,
    TablePotential,
};
use spectra_core::Error;

use crate::args::{usage, Cli, Command, HorseshoeAction, LemmaCommand, OutputFormat, RunConfig};
use crate::render::{
    csv_output, display_digits, enclosure_csv_row, enclosure_json, json_output, rational_json,
    scalar_csv_header,
};

pub struct Output {
    pub text: String,
    pub exit: u8,
}

pub fn dispatch(cli: &Cli) -> Result<Output> {
    let cfg = cli.run_config()?;
    match &cli.command {
        Command::Lagrange { cf } => {
            let parsed = parse_cf(cf)?;
            let value = lagrange_value(&parsed, &cfg.tol)?;
            scalar_output("lagrange", &cfg, &[("value", value)])
        }
        Command::MarkovWord { word } => {
            let digits = parse_word(word)?;
            let value = markov_value_word(&digits, &cfg.tol)?;
            scalar_output("markov-word", &cfg, &[("value", value)])
        }
        Command::Form {
            coefficients,
            radius,
        } => {
            let (a, b, c) = parse_coefficients(coefficients)?;
            let q = QuadraticForm::new(a, b, c)?;
            let value = form_markov_value(&q, *radius, &cfg.tol)?;
            scalar_output("form", &cfg, &[("value", value)])
        }
        Command::Constants => {
            let freiman = freiman_constant(&cfg.tol)?;
            let mu = height_map(&freiman)?;
            scalar_output("constants", &cfg, &[("freiman", freiman), ("mu", mu)])
        }
        Command::Dim { family } => {
            let set = parse_family(family)?;
            let bounds = set.dim_bounds(cfg.level, &cfg.tol)?;
            scalar_output("dim", &cfg, &[("dimension", bounds)])
        }
        Command::Sum {
            family_a,
            family_b,
            check,
            slack,
        } => run_sum(&cfg, family_a, family_b, check.as_deref(), slack),
        Command::Spectrum {
            sft,
            potential,
            max_period,
            detect,
        } => {
            let shift = parse_sft(sft)?;
            let (f, digit_map) = parse_potential(potential, &shift)?;
            guard_orbit_budget(&cfg, shift.alphabet_size(), *max_period)?;
            let sample = spectrum_sample(&shift, f.as_ref(), *max_period, &cfg.tol)?;
            spectrum_output("spectrum", &cfg, &sample, digit_map, detect.as_deref())
        }
        Command::Horseshoe { file, action } => {
            let h = MarkovHorseshoe::from_toml_file(file)?;
            match action {
                HorseshoeAction::Dim => {
                    let stable = h.stable_cantor()?.dim_bounds(cfg.level, &cfg.tol)?;
                    let unstable = h.unstable_cantor()?.dim_bounds(cfg.level, &cfg.tol)?;
                    let total = h.hd_estimate(cfg.level, &cfg.tol)?;
                    scalar_output(
                        "horseshoe dim",
                        &cfg,
                        &[
                            ("stable_dimension", stable),
                            ("unstable_dimension", unstable),
                            ("total_dimension", total),
                        ],
                    )
                }
                HorseshoeAction::Spectrum {
                    max_period,
                    locality,
                    detect,
                } => {
                    let f = h.cf_potential(*locality)?;
                    guard_orbit_budget(&cfg, h.sft().alphabet_size(), *max_period)?;
                    let sample = h.spectrum(&f, *max_period, &cfg.tol)?;
                    let digit_map = h.digits().map(|d| d.to_vec());
                    spectrum_output(
                        "horseshoe spectrum",
                        &cfg,
                        &sample,
                        digit_map,
                        detect.as_deref(),
                    )
                }
            }
        }
        Command::Lemma { lemma } => run_lemma(&cfg, lemma),
        Command::Accept => {
            let outcomes = crate::accept::run_all();
            let all_pass = outcomes.iter().all(|o| o.pass);
            let mut text = String::new();
            for o in &outcomes {
                text.push_str(&o.line());
                text.push('\n');
            }
            let passed = outcomes.iter().filter(|o| o.pass).count();
            text.push_str(&format!(
                "summary: {passed}/{} criteria pass\n",
                outcomes.len()
            ));
            Ok(Output {
                text,
                exit: u8::from(!all_pass),
            })
        }
    }
}

/// Named enclosures rendered as one JSON object or one CSV row per entry.
fn scalar_output(command: &str, cfg: &RunConfig, items: &[(&str, spectra_core::Enclosure)]) -> Result<Output> {
    let text = match cfg.format {
        OutputFormat::Json => {
            let mut result = serde_json::Map::new();
            for (name, e) in items {
                result.insert((*name).into(), enclosure_json(e, cfg));
            }
            json_output(command, cfg, Value::Object(result))
        }
        OutputFormat::Csv => {
            let rows: Vec<String> = items
                .iter()
                .map(|(n, e)| enclosure_csv_row(n, e, cfg))
                .collect();
            csv_output(cfg, scalar_csv_header(cfg), &rows)
        }
    };
    Ok(Output { text, exit: 0 })
}

fn run_sum(
    cfg: &RunConfig,
    family_a: &str,
    family_b: &str,
    check: Option<&str>,
    slack: &str,
) -> Result<Output> {
    let a = parse_family(family_a)?;
    let b = parse_family(family_b)?;
    let cover_a = a.construction_level(cfg.level)?;
    let cover_b = b.construction_level(cfg.level)?;
    let pairs = (cover_a.cylinders.len() as u64).saturating_mul(cover_b.cylinders.len() as u64);
    if pairs > cfg.budget {
        return Err(Error::BudgetExceeded {
            what: "sum cover pairs",
            needed: pairs,
            budget: cfg.budget,
        }
        .into());
    }
    let cover = cantor_sum_cover(&cover_a, &cover_b)?;
    let digits = display_digits(cfg);
    let (hull_lo, hull_hi) = cover_hull(&cover);
    let check_report = match check {
        Some(target) => {
            let (lo, hi) = parse_interval(target)?;
            let slack = parse_rational(slack).map_err(|e| usage(e.to_string()))?;
            Some((sum_interval_check(&cover, &lo, &hi, &slack)?, lo, hi, slack))
        }
        None => None,
    };
    let text = match cfg.format {
        OutputFormat::Json => {
            let mut result = serde_json::Map::new();
            result.insert("pairs".into(), json!(cover.pairs));
            result.insert("components".into(), json!(cover.components.len()));
            result.insert("hull_lo".into(), rational_json(hull_lo, cfg));
            result.insert("hull_hi".into(), rational_json(hull_hi, cfg));
            if cfg.exact {
                let comps: Vec<Value> = cover
                    .components
                    .iter()
                    .map(|(lo, hi)| json!([lo.to_string(), hi.to_string()]))
                    .collect();
                result.insert("component_intervals".into(), Value::Array(comps));
            }
            if let Some((rep, lo, hi, slack)) = &check_report {
                result.insert(
                    "check".into(),
                    json!({
                        "target_lo": decimal_string(lo, digits, Dir::Down),
                        "target_hi": decimal_string(hi, digits, Dir::Up),
                        "slack": decimal_string(slack, digits, Dir::Up),
                        "pass": rep.pass,
                        "largest_gap": decimal_string(&rep.largest_gap, digits, Dir::Up),
                        "components_touched": rep.components_touched,
                    }),
                );
            }
            json_output("sum", cfg, Value::Object(result))
        }
        OutputFormat::Csv => {
            let rows: Vec<String> = cover
                .components
                .iter()
                .map(|(lo, hi)| {
                    format!(
                        "{},{}",
                        decimal_string(lo, digits, Dir::Down),
                        decimal_string(hi, digits, Dir::Up)
                    )
                })
                .collect();
            let mut text = csv_output(cfg, "component_lo,component_hi", &rows);
            if let Some((rep, _, _, _)) = &check_report {
                text.push_str(&format!(
                    "# check pass={} largest_gap={} components_touched={}\n",
                    rep.pass,
                    decimal_string(&rep.largest_gap, digits, Dir::Up),
                    rep.components_touched
                ));
            }
            text
        }
    };
    Ok(Output { text, exit: 0 })
}

fn spectrum_output(
    command: &str,
    cfg: &RunConfig,
    sample: &SpectrumSample,
    digit_map: Option<Vec<u64>>,
    detect: Option<&str>,
) -> Result<Output> {
    let digits = display_digits(cfg);
    let label = move |s: Sym| match &digit_map {
        Some(d) => d.get(s).map_or_else(|| format!("?{s}"), |x| x.to_string()),
        None => (s + 1).to_string(),
    };
    let runs = match detect {
        Some(threshold) => {
            let gap = parse_rational(threshold).map_err(|e| usage(e.to_string()))?;
            Some(interval_detect(sample, &gap))
        }
        None => None,
    };
    let text = match cfg.format {
        OutputFormat::Json => {
            let entries: Vec<Value> = sample
                .entries
                .iter()
                .map(|(e, p)| {
                    let word: Vec<String> = p.word().iter().map(|&s| label(s)).collect();
                    json!({
                        "lo": decimal_string(e.lo(), digits, Dir::Down),
                        "hi": decimal_string(e.hi(), digits, Dir::Up),
                        "witness": word.join(" "),
                    })
                })
                .collect();
            let mut result = serde_json::Map::new();
            result.insert("max_period".into(), json!(sample.max_period));
            result.insert("entries".into(), Value::Array(entries));
            if let Some(runs) = &runs {
                let rows: Vec<Value> = runs
                    .iter()
                    .map(|r| {
                        json!({
                            "lo": decimal_string(&r.lo, digits, Dir::Down),
                            "hi": decimal_string(&r.hi, digits, Dir::Up),
                            "run_len": r.run_len,
                        })
                    })
                    .collect();
                result.insert("detected_runs".into(), Value::Array(rows));
            }
            json_output(command, cfg, Value::Object(result))
        }
        OutputFormat::Csv => {
            let mut text = String::new();
            text.push_str(&cfg.comment_line());
            text.push('\n');
            text.push_str(&sample.to_csv(digits, label));
            if let Some(runs) = &runs {
                for r in runs {
                    text.push_str(&format!(
                        "# run lo={} hi={} len={}\n",
                        decimal_string(&r.lo, digits, Dir::Down),
                        decimal_string(&r.hi, digits, Dir::Up),
                        r.run_len
                    ));
                }
            }
            text
        }
    };
    Ok(Output { text, exit: 0 })
}

fn run_lemma(cfg: &RunConfig, lemma: &LemmaCommand) -> Result<Output> {
    let result = match lemma {
        LemmaCommand::Trace {
            n,
            zeros,
            k_min,
            k_max,
        } => {
            let a = DenseMatrix::random_dense(*n, *zeros, cfg.seed)?;
            let bounds = trace_bounds(&a, *k_min, *k_max)?;
            let rows: Vec<Value> = bounds.iter().map(|b| b.to_json()).collect();
            json!({
                "n": n,
                "zeros": zeros,
                "all_hold": bounds.iter().all(|b| b.holds),
                "bounds": rows,
            })
        }
        LemmaCommand::Core {
            n,
            zeros,
            k_max,
            samples,
        } => {
            let samples = budget_capped(cfg, *samples)?;
            let a = DenseMatrix::random_dense(*n, *zeros, cfg.seed)?;
            core_power_report(&a, *k_max, samples, cfg.seed)?.to_json()
        }
        LemmaCommand::Inject { n, alpha, trials } => {
            let alpha = parse_rational(alpha).map_err(|e| usage(e.to_string()))?;
            let trials = budget_capped(cfg, *trials)?;
            injection_trials(*n, &alpha, trials, cfg.seed)?.to_json()
        }
        LemmaCommand::Census {
            alphabet,
            block,
            disturb,
            samples,
            scale,
        } => {
            let words = all_words(*alphabet, *block, cfg.budget)?;
            let disturb = match disturb {
                Some(list) => Some(parse_index_set(list, words.len())?),
                None => None,
            };
            let instance = ProhibitionInstance::new(words, ProhibitionRule::Factor { disturb })?;
            let scale = parse_rational(scale).map_err(|e| usage(e.to_string()))?;
            let samples = budget_capped(cfg, *samples)?;
            let report = prohibited_transition_census(&instance, samples, &scale, cfg.seed)?;
            let mut v = report.to_json();
            if cfg.exact && instance.words().len() <= 256 {
                let exact = census_exact(&instance)?;
                if let Value::Object(m) = &mut v {
                    m.insert("exact_probability".into(), json!(exact.to_string()));
                }
            }
            v
        }
    };
    let text = match cfg.format {
        OutputFormat::Json => json_output("lemma", cfg, result),
        OutputFormat::Csv => {
            // Lemma reports are structured; CSV carries one flattened
            // key,value row per top-level field.
            let mut rows = Vec::new();
            if let Value::Object(m) = &result {
                for (k, v) in m {
                    rows.push(format!("{k},{}", flat(v)));
                }
            }
            csv_output(cfg, "key,value", &rows)
        }
    };
    Ok(Output { text, exit: 0 })
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string().replace(',', ";"),
    }
}

/// Periodic-orbit enumeration touches at most sum_{l <= p} n^l words;
/// refuse up front when that exceeds the configured budget.
fn guard_orbit_budget(cfg: &RunConfig, alphabet: usize, max_period: usize) -> Result<()> {
    let mut total: u64 = 0;
    let n = alphabet as u64;
    for len in 1..=max_period {
        let count = (0..len).try_fold(1u64, |acc, _| acc.checked_mul(n));
        total = count
            .and_then(|c| total.checked_add(c))
            .unwrap_or(u64::MAX);
    }
    if total > cfg.budget {
        return Err(Error::BudgetExceeded {
            what: "periodic word enumeration",
            needed: total,
            budget: cfg.budget,
        }
        .into());
    }
    Ok(())
}

fn budget_capped(cfg: &RunConfig, requested: u64) -> Result<u64> {
    if requested > cfg.budget {
        return Err(Error::BudgetExceeded {
            what: "sampling",
            needed: requested,
            budget: cfg.budget,
        }
        .into());
    }
    Ok(requested)
}

fn cover_hull(cover: &SumCover) -> (&BigRational, &BigRational) {
    let first = cover.components.first().expect("cover is never empty");
    let last = cover.components.last().expect("cover is never empty");
    (&first.0, &last.1)
}

/// A word is either comma-separated digits ("2,1,1") or a contiguous run of
/// single decimal digits ("211").
pub fn parse_word(s: &str) -> Result<Vec<u64>> {
    let text = s.trim();
    if text.is_empty() {
        return Err(usage("word must be non-empty"));
    }
    if text.contains(',') {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| usage(format!("bad digit {p:?} in word")))
            })
            .collect()
    } else {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(u64::from)
                    .ok_or_else(|| usage(format!("bad digit {c:?} in word")))
            })
            .collect()
    }
}

fn parse_coefficients(s: &str) -> Result<(BigRational, BigRational, BigRational)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(usage("form needs three comma-separated coefficients a,b,c"));
    }
    let mut vals = parts
        .iter()
        .map(|p| parse_rational(p.trim()).map_err(|e| usage(e.to_string())));
    let a = vals.next().unwrap()?;
    let b = vals.next().unwrap()?;
    let c = vals.next().unwrap()?;
    Ok((a, b, c))
}

fn parse_interval(s: &str) -> Result<(BigRational, BigRational)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(usage("interval must be written lo,hi"));
    }
    let lo = parse_rational(parts[0].trim()).map_err(|e| usage(e.to_string()))?;
    let hi = parse_rational(parts[1].trim()).map_err(|e| usage(e.to_string()))?;
    if lo > hi {
        return Err(usage("interval endpoints are out of order"));
    }
    Ok((lo, hi))
}

/// Transition structures: "full:N", "golden" (or "golden_mean"),
/// "allow:N:a-b,c-d,..." listing the allowed pairs, or
/// "forbid:N:a-b,..." listing the forbidden pairs over a full shift.
pub fn parse_sft(s: &str) -> Result<Sft> {
    let text = s.trim();
    if text == "golden" || text == "golden_mean" {
        return Ok(Sft::golden_mean());
    }
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        ["full", n] => {
            let n = parse_count(n)?;
            Ok(Sft::full(n)?)
        }
        ["allow", n, pairs] => {
            let n = parse_count(n)?;
            Ok(Sft::new(n, &parse_pairs(pairs)?)?)
        }
        ["forbid", n, pairs] => {
            let n = parse_count(n)?;
            Ok(Sft::forbidding(n, &parse_pairs(pairs)?)?)
        }
        _ => Err(usage(
            "transition structure must be full:N, golden, allow:N:a-b,..., or forbid:N:a-b,...",
        )),
    }
}

fn parse_count(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| usage(format!("bad count {s:?}")))
}

fn parse_pairs(s: &str) -> Result<Vec<(Sym, Sym)>> {
    s.split(',')
        .map(|p| {
            let (a, b) = p
                .trim()
                .split_once('-')
                .ok_or_else(|| usage(format!("bad pair {p:?}, expected a-b")))?;
            Ok((parse_count(a)?, parse_count(b)?))
        })
        .collect()
}

/// A parsed potential together with the digit map used to label witnesses.
pub type ParsedPotential = (Box<dyn Potential>, Option<Vec<u64>>);

/// Potentials: "cfsum:M" (two-sided continued fraction sum truncated at
/// locality M over digits 1..=n), "cfsum:M:d1,d2,..." with an explicit digit
/// per symbol, or "const:X".
pub fn parse_potential(s: &str, shift: &Sft) -> Result<ParsedPotential> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    match parts.as_slice() {
        ["cfsum", m] => {
            let m = parse_count(m)?;
            let f = CfSumPotential::for_digit_alphabet(m, shift.alphabet_size())?;
            Ok((Box::new(f), None))
        }
        ["cfsum", m, digits] => {
            let m = parse_count(m)?;
            let digits: Vec<u64> = digits
                .split(',')
                .map(|d| {
                    d.trim()
                        .parse::<u64>()
                        .map_err(|_| usage(format!("bad digit {d:?}")))
                })
                .collect::<Result<_>>()?;
            if digits.len() != shift.alphabet_size() {
                return Err(usage(format!(
                    "potential lists {} digits for an alphabet of size {}",
                    digits.len(),
                    shift.alphabet_size()
                )));
            }
            let f = CfSumPotential::new(m, digits.clone())?;
            Ok((Box::new(f), Some(digits)))
        }
        ["const", x] => {
            let c = parse_rational(x.trim()).map_err(|e| usage(e.to_string()))?;
            Ok((Box::new(TablePotential::constant(c)), None))
        }
        _ => Err(usage(
            "potential must be cfsum:M, cfsum:M:d1,d2,..., or const:X",
        )),
    }
}

/// All length-`block` words over an alphabet of size `k`, lexicographic.
fn all_words(k: usize, block: usize, budget: u64) -> Result<Vec<Vec<Sym>>> {
    if k == 0 || block == 0 {
        return Err(usage("alphabet and block length must be positive"));
    }
    let count = (0..block).try_fold(1u64, |acc, _| acc.checked_mul(k as u64));
    let count = match count {
        Some(c) if c <= budget.min(1 << 20) => c,
        _ => {
            return Err(Error::BudgetExceeded {
                what: "census word list",
                needed: count.unwrap_or(u64::MAX),
                budget: budget.min(1 << 20),
            }
            .into())
        }
    };
    let mut words = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let mut w = vec![0usize; block];
    loop {
        words.push(w.clone());
        let mut i = block;
        loop {
            if i == 0 {
                return Ok(words);
            }
            i -= 1;
            w[i] += 1;
            if w[i] < k {
                break;
            }
            w[i] = 0;
        }
    }
}

fn parse_index_set(s: &str, word_count: usize) -> Result<BTreeSet<usize>> {
    let mut set = BTreeSet::new();
    for p in s.split(',') {
        let i = parse_count(p)?;
        if i >= word_count {
            return Err(usage(format!(
                "disturbing word index {i} is outside the word list 0..{word_count}"
            )));
        }
        set.insert(i);
    }
    Ok(set)
}
