//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use chrono::{Datelike, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use cte_core::deontic::{ContractState, Due, ObligationSpec, ObligationStatus};
use cte_core::dsl::{compile, parse, CompileEnv, CompiledValue, ReasonablenessConfig};
use cte_core::engine::{replay, Scenario};
use cte_core::ru::{Atom, EvalOptions, Evaluator, Formula, Span, SpanExpr, TimeExpr, Trace};
use cte_core::{
    BindingRegistry, ContinuousInterval, DateBag, DateSet, Day, DayPredicate, PropertyCalendar, Relation, Rule,
    TimePoint, Tri, Weekday,
};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn day(s: &str) -> Day {
    s.parse().unwrap()
}

fn naive(d: Day) -> NaiveDate {
    NaiveDate::parse_from_str(&d.to_string(), "%Y-%m-%d").unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- formulas

struct FormulaGen {
    rng: ChaCha8Rng,
    begin: Day,
    len: i64,
    fresh: usize,
}

impl FormulaGen {
    fn new(seed: u64) -> Self {
        FormulaGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            begin: day("2018-01-01"),
            len: 31,
            fresh: 0,
        }
    }

    fn horizon(&mut self) -> (Day, Day) {
        let len = self.rng.gen_range(1..=31);
        self.len = len;
        let b = self.begin;
        (b, b.add_days(len - 1).unwrap())
    }

    fn day(&mut self) -> Day {
        self.begin.add_days(self.rng.gen_range(0..self.len)).unwrap()
    }

    fn trace(&mut self) -> Trace {
        let (b, e) = self.horizon();
        let mut tr = Trace::new(b, e).unwrap();
        let atoms = [Atom::unary("p", "a"), Atom::unary("p", "b"), Atom::unary("q", "a"), Atom::nullary("r")];
        let density = self.rng.gen_range(0.1..0.9);
        for a in atoms {
            for d in Day::range_inclusive(b, e) {
                if self.rng.gen_bool(density) {
                    tr.record(a.clone(), d).unwrap();
                }
            }
        }
        tr
    }

    fn time(&mut self, vars: &[String]) -> TimeExpr {
        match self.rng.gen_range(0..4) {
            0 => TimeExpr::from(self.day()),
            1 => TimeExpr::Now,
            2 if !vars.is_empty() => TimeExpr::Var(vars.choose(&mut self.rng).unwrap().clone()),
            _ => TimeExpr::Now.offset(self.rng.gen_range(-3..=3)),
        }
    }

    fn span(&mut self, vars: &[String]) -> SpanExpr {
        SpanExpr::new(self.time(vars), self.time(vars))
    }

    fn domain(&mut self) -> DateSet {
        let a = self.day();
        let b = self.day();
        let set = DateSet::range(a.min(b), a.max(b)).unwrap();
        // thin it out so domains are not always contiguous
        let keep: Vec<bool> = (0..set.len()).map(|_| self.rng.gen_bool(0.7)).collect();
        let mut i = 0;
        set.filter(|_| {
            i += 1;
            keep[i - 1]
        })
    }

    fn formula(&mut self, depth: u32, vars: &[String]) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return match self.rng.gen_range(0..6) {
                0 => Formula::Truth(self.rng.gen()),
                1 => Formula::precedes(self.time(vars), self.time(vars)),
                2 => Formula::atom(Atom::unary("p", "a")),
                3 => Formula::atom(Atom::unary("p", "b")),
                4 => Formula::atom(Atom::unary("q", "a")),
                _ => Formula::atom(Atom::nullary("r")),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 => Formula::not(self.formula(d, vars)),
            1 => Formula::and(self.formula(d, vars), self.formula(d, vars)),
            2 => Formula::or(self.formula(d, vars), self.formula(d, vars)),
            3 => Formula::realized_at(self.time(vars), self.formula(d, vars)),
            4 => Formula::rd(self.span(vars), self.formula(d, vars)),
            5 => Formula::rt(self.span(vars), self.formula(d, vars)),
            6 => Formula::rb(self.time(vars), self.formula(d, vars)),
            k => {
                self.fresh += 1;
                let var = format!("x{}", self.fresh);
                let mut inner = vars.to_vec();
                inner.push(var.clone());
                let domain = self.domain();
                let body = Box::new(self.formula(d, &inner));
                if k == 7 {
                    Formula::ForAllDays { var, domain, body }
                } else {
                    Formula::ExistsDay { var, domain, body }
                }
            }
        }
    }
}

const CLAMP: EvalOptions = EvalOptions { clamp_spans: true };

fn ru_axioms() -> Outcome {
    let mut g = FormulaGen::new(1);
    let (mut checked, mut attempts) = (0u32, 0u32);
    while checked < 1000 {
        attempts += 1;
        if attempts > 20_000 {
            return Err(format!("only {checked} evaluable triples generated"));
        }
        let tr = g.trace();
        let f = g.formula(3, &[]);
        let h = g.formula(3, &[]);
        let t = g.day();
        let ev = Evaluator::new(&tr).with_options(CLAMP);
        let (Ok(rf), Ok(rh)) = (ev.realized_at(&f, t, &[]), ev.realized_at(&h, t, &[])) else {
            continue;
        };
        let neg = ev.realized_at(&Formula::not(f.clone()), t, &[]).map_err(|e| e.to_string())?;
        ensure(neg == !rf, || format!("R_t(¬Φ) ≠ ¬R_tΦ for {f} at {t}"))?;
        let conj = ev.realized_at(&Formula::and(f.clone(), h.clone()), t, &[]).map_err(|e| e.to_string())?;
        ensure(conj == (rf && rh), || format!("R_t(Φ&Ψ) ≠ R_tΦ&R_tΨ for {f}, {h} at {t}"))?;

        // R_t'(∀x Φ) ↔ ∀x R_t' Φ, with x ranging over a day domain
        let domain = g.domain();
        let body = g.formula(2, &["x0".to_string()]);
        let all = Formula::ForAllDays {
            var: "x0".into(),
            domain: domain.clone(),
            body: Box::new(body.clone()),
        };
        let Ok(lhs) = ev.realized_at(&all, t, &[]) else { continue };
        let mut rhs = true;
        for x in domain.iter() {
            rhs &= ev.realized_at(&body, t, &[("x0".into(), x)]).map_err(|e| e.to_string())?;
        }
        ensure(lhs == rhs, || format!("R_t(∀xΦ) ≠ ∀x R_tΦ for {body} over {} days at {t}", domain.len()))?;
        checked += 1;
    }
    Ok(format!("{checked} (trace, formula, day) triples, 0 counterexamples"))
}

fn rd_rt_duality() -> Outcome {
    let mut g = FormulaGen::new(2);
    let mut checked = 0u32;
    let mut attempts = 0u32;
    while checked < 1000 {
        attempts += 1;
        if attempts > 20_000 {
            return Err(format!("only {checked} evaluable spans generated"));
        }
        let tr = g.trace();
        let f = g.formula(3, &[]);
        let ev = Evaluator::new(&tr).with_options(CLAMP);
        let (a, b) = (g.day(), g.day());
        let span = Span::new(a, b);
        let (Ok(rd), Ok(rt)) = (ev.rd(&f, span), ev.rt(&f, span)) else { continue };
        let rd_not = ev.rd(&Formula::not(f.clone()), span).map_err(|e| e.to_string())?;
        ensure(rt == !rd_not, || format!("RT ≠ ¬RD¬ for {f} over {a}..{b}"))?;

        // a wider span
        let (lo, hi) = (a.min(b), a.max(b));
        let wide = Span::new(
            lo.add_days(-g.rng.gen_range(0..4)).unwrap(),
            hi.add_days(g.rng.gen_range(0..4)).unwrap(),
        );
        if let (true, Ok(wrd), Ok(wrt)) = (a <= b, ev.rd(&f, wide), ev.rt(&f, wide)) {
            ensure(!rd || wrd, || format!("RD not monotone for {f}"))?;
            ensure(!wrt || rt, || format!("RT not antitone for {f}"))?;
        }

        // RB against a brute-force scan of the clamped span
        let d = tr.horizon_begin().add_days(g.rng.gen_range(-3..g.len + 3)).unwrap();
        let mut brute = Ok(false);
        let mut c = tr.horizon_begin();
        while c < d && c <= tr.horizon_end() {
            brute = match (brute, ev.realized_at(&f, c, &[])) {
                (Ok(acc), Ok(v)) => Ok(acc || v),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            c = c.succ().unwrap();
        }
        if let (Ok(rb), Ok(brute)) = (ev.rb(&f, TimePoint::Finite(d)), brute) {
            ensure(rb == brute, || format!("RB ≠ brute-force RD for {f} before {d}"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} spans: duality, monotonicity and RB oracle hold"))
}

// ---------------------------------------------------------------- calendars

const HOLIDAYS: [&str; 10] = [
    "2018-01-01", "2018-03-30", "2018-04-02", "2018-05-07", "2018-12-25", "2019-01-01", "2019-04-19", "2019-12-25",
    "2020-05-08", "2020-12-28",
];

fn oracle(property: &str, d: Day) -> bool {
    let n = naive(d);
    let wd = n.weekday().num_days_from_monday();
    match property {
        "Gbd" => wd < 5 && !HOLIDAYS.contains(&d.to_string().as_str()),
        "ThirdWed" => wd == 2 && (n.day() - 1) / 7 == 2,
        "LastFri" => wd == 4 && (n + chrono::Duration::days(7)).month() != n.month(),
        "MonthEnd" => n.succ_opt().unwrap().day() == 1,
        "QuarterMid" => n.month().is_multiple_of(3) && n.day() == 15,
        "Weekend" => wd >= 5,
        "Fixed" => ["2018-02-14", "2019-02-14", "2020-02-14", "2018-07-04"].contains(&d.to_string().as_str()),
        "Window" => (day("2018-06-03")..=day("2018-06-12")).contains(&d),
        "NotGbd" => !oracle("Gbd", d),
        other => panic!("no oracle for {other}"),
    }
}

fn rules() -> Vec<(&'static str, Rule)> {
    use Weekday::*;
    let days = |xs: &[&str]| xs.iter().map(|s| day(s)).collect::<BTreeSet<Day>>();
    vec![
        ("Gbd", Rule::Weekdays { days: [Mon, Tue, Wed, Thu, Fri].into(), holidays: days(&HOLIDAYS) }),
        ("ThirdWed", Rule::NthWeekdayOfMonth { n: 3, weekday: Wed }),
        ("LastFri", Rule::NthWeekdayOfMonth { n: -1, weekday: Fri }),
        ("MonthEnd", Rule::Predicate { expr: DayPredicate::LastDayOfMonth }),
        (
            "QuarterMid",
            Rule::Predicate {
                expr: DayPredicate::All {
                    exprs: vec![
                        DayPredicate::MonthIn { months: [3, 6, 9, 12].into() },
                        DayPredicate::DayOfMonthIn { days: [15].into() },
                    ],
                },
            },
        ),
        ("Weekend", Rule::Predicate { expr: DayPredicate::WeekdayIn { days: [Sat, Sun].into() } }),
        ("Fixed", Rule::Explicit { days: days(&["2018-02-14", "2019-02-14", "2020-02-14", "2018-07-04"]) }),
        ("Window", Rule::Window { anchor: day("2018-06-01"), lo: 2, hi: 11 }),
    ]
}

fn calendar() -> PropertyCalendar {
    rules().into_iter().fold(PropertyCalendar::new(), |c, (n, r)| c.with_rule(n, r).unwrap())
}

fn calendar_oracle() -> Outcome {
    let cal = calendar();
    let names: Vec<&str> = rules().iter().map(|(n, _)| *n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let base = day("2017-12-01");
    for _ in 0..500 {
        let d = base.add_days(rng.gen_range(0..1100)).unwrap();
        let p = *names.choose(&mut rng).unwrap();
        let horizon = rng.gen_range(1u32..120);
        let got = cal.first_with_property_after(d, p, horizon).ok();
        let want = (1..=horizon as i64).map(|k| d.add_days(k).unwrap()).find(|c| oracle(p, *c));
        ensure(got == want, || format!("first {p} after {d} within {horizon}: {got:?} vs {want:?}"))?;

        let to = d.add_days(rng.gen_range(-5..400)).unwrap();
        let got = cal.count_days_with_property(d, to, p).map_err(|e| e.to_string())?;
        let want = if to < d { 0 } else { Day::range_inclusive(d, to).filter(|c| oracle(p, *c)).count() as u64 };
        ensure(got == want, || format!("count {p} in {d}..={to}: {got} vs {want}"))?;
    }
    Ok("500 first-after and 500 count queries match a linear scan".into())
}

fn generator_oracle() -> Outcome {
    let cal = calendar();
    let mut all = rules();
    all.push(("NotGbd", Rule::Predicate { expr: DayPredicate::Not { expr: Box::new(DayPredicate::HasProperty { name: "Gbd".into() }) } }));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ranges = 0;
    for (name, rule) in &all {
        let mut starts = vec![day("2018-01-01"), day("2019-12-31"), day("2020-01-01")];
        starts.extend((0..20).map(|_| day("2017-06-01").add_days(rng.gen_range(0..1200)).unwrap()));
        for s in starts {
            let e = s.add_days(365).unwrap();
            let set = DateSet::from_rule(rule, s.into(), e.into(), Some(&cal)).map_err(|x| x.to_string())?;
            let got: Vec<Day> = set.iter().collect();
            let want: Vec<Day> = Day::range_inclusive(s, e).filter(|d| oracle(name, *d)).collect();
            ensure(got == want, || format!("{name} over {s}..{e}: {} members vs {}", got.len(), want.len()))?;
            ranges += 1;
        }
    }

    let (reg, cfg) = (BindingRegistry::new(), ReasonablenessConfig::default());
    let phrase = parse("every first Monday of every month from 2018-01-01 to 2018-12-31").map_err(|e| e.to_string())?;
    let env = CompileEnv::new(&reg, &cal, &cfg, ContinuousInterval::unbounded());
    let CompiledValue::Set(s) = compile(&phrase, &env).map_err(|e| e.to_string())? else {
        return Err("phrase did not compile to a set".into());
    };
    let want: Vec<Day> = Day::range_inclusive(day("2018-01-01"), day("2018-12-31"))
        .filter(|d| naive(*d).weekday().num_days_from_monday() == 0 && naive(*d).day() <= 7)
        .collect();
    let got: Vec<Day> = s.iter().collect();
    ensure(got == want && got.len() == 12 && got[0] == day("2018-01-01"), || format!("first Mondays of 2018: {got:?}"))?;
    Ok(format!("{ranges} 366-day ranges over {} rules match a linear scan; 12 first Mondays in 2018 from 2018-01-01", all.len()))
}

// ---------------------------------------------------------------- bags

fn bag_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = day("2018-06-01");
    let tr = Trace::new(base.add_days(-5).unwrap(), base.add_days(30).unwrap()).unwrap();
    let ev = Evaluator::new(&tr);
    let mut checks = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..7);
        let alts: Vec<Day> = (0..n).map(|_| base.add_days(rng.gen_range(0..8)).unwrap()).collect();
        let bag = DateBag::new(alts.clone());
        let t = base.add_days(rng.gen_range(-2..10)).unwrap();
        let rel = *[Relation::Before, Relation::After, Relation::Same].choose(&mut rng).unwrap();
        let open = bag.compare(t, rel);
        let f = Formula::precedes(TimeExpr::Bag(bag.clone()), TimeExpr::from(t));
        let open_f = ev.supervaluate(&f, t, &[]).map_err(|e| e.to_string())?;
        for c in &alts {
            let fixed = bag.resolve(*c, base, "test").map_err(|e| e.to_string())?;
            let v = fixed.compare(t, rel).known().ok_or("resolved bag gave an indeterminate comparison")?;
            ensure(open.admits(v), || format!("{bag} {rel:?} {t}: unresolved {open:?} contradicts {v} after choosing {c}"))?;
            let fv = ev
                .realized_at(&Formula::precedes(TimeExpr::Bag(fixed), TimeExpr::from(t)), t, &[])
                .map_err(|e| e.to_string())?;
            ensure(open_f.admits(fv), || format!("supervaluation of {bag} before {t} contradicts choice {c}"))?;
            checks += 1;
        }
        if alts.iter().all(|a| *a == alts[0]) {
            ensure(open != Tri::Indeterminate, || format!("single-valued bag {bag} was indeterminate"))?;
        }
    }
    Ok(format!("500 bags, {checks} resolutions, no contradiction"))
}

// ---------------------------------------------------------------- lifecycle

fn lifecycle() -> Outcome {
    let d = |k: i64| day("2018-01-01").add_days(k - 1).unwrap();
    let grid: [i64; 5] = [1, 8, 15, 22, 31];
    let term = ContinuousInterval::new(d(0), d(32));
    let mut histories = 0u64;
    let mut late = 0u64;

    // deferral sequences as (set_at, new_due), at most three
    let pairs: Vec<(i64, i64)> = grid.iter().flat_map(|a| grid.iter().map(move |b| (*a, *b))).collect();
    let mut seqs: Vec<Vec<(i64, i64)>> = vec![vec![]];
    for len in 1..=3 {
        let prev: Vec<Vec<(i64, i64)>> = seqs.iter().filter(|s| s.len() == len - 1).cloned().collect();
        for s in prev {
            for p in &pairs {
                let mut n = s.clone();
                n.push(*p);
                seqs.push(n);
            }
        }
    }

    for due in grid {
        for end_date in [None, Some(22)] {
            for deferrals in &seqs {
                for discharge in grid.iter().map(|x| Some(*x)).chain([None]) {
                    // apply in day order; a discharge goes after same-day deferrals
                    let mut actions: Vec<(i64, u8, i64)> = deferrals.iter().map(|(at, nd)| (*at, 0, *nd)).collect();
                    if let Some(x) = discharge {
                        actions.push((x, 1, 0));
                    }
                    actions.sort_by_key(|a| (a.0, a.1));
                    let spec = ObligationSpec {
                        id: "P".into(),
                        class: String::new(),
                        obligor: String::new(),
                        obligee: String::new(),
                        due: Due::Day(d(due)),
                        end_date: end_date.map(d),
                        survives: false,
                        inferred: false,
                    };
                    let Ok((mut st, _)) = ContractState::new(d(1), term).incur_obligation(spec, d(1)) else { continue };
                    let mut valid = true;
                    for (at, kind, nd) in actions {
                        let next = if kind == 0 { st.defer("P", d(nd), d(at), "") } else { st.discharge("P", d(at)) };
                        match next {
                            Ok(s) => st = s,
                            Err(_) => {
                                valid = false;
                                break;
                            }
                        }
                    }
                    if !valid {
                        continue;
                    }
                    histories += 1;
                    let ob = st.obligation("P").map_err(|e| e.to_string())?;
                    let mut prev = ObligationStatus::Pending;
                    for k in 1..=31 {
                        let s = ob.status(d(k));
                        ensure(s.rank() >= prev.rank(), || format!("status regressed {prev} -> {s} on day {k}: {ob:?}"))?;
                        if s.is_discharged() && prev.is_discharged() {
                            ensure(s == prev, || format!("discharged status changed {prev} -> {s}"))?;
                        }
                        if s == ObligationStatus::DischargedLate {
                            ensure(ob.discharged_at.is_some_and(|x| x > ob.effective_due()), || format!("late without lateness: {ob:?}"))?;
                        }
                        prev = s;
                    }
                    if prev == ObligationStatus::DischargedLate {
                        late += 1;
                    }
                }
            }
        }
    }
    ensure(late > 0, || "no late discharge was enumerated".into())?;
    Ok(format!("{histories} valid histories (≤3 deferrals, 31 days), {late} late; no regression"))
}

// ---------------------------------------------------------------- phrases

fn phrase_corpus() -> Outcome {
    let mut ok = 0;
    let mut rejected = BTreeSet::new();
    for line in include_str!("corpus/phrases.tsv").lines().filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let cols: Vec<&str> = line.split('\t').collect();
        let (phrase, expected) = (cols[1], cols[2]);
        let got = match parse(phrase) {
            Ok(n) => format!("ok:{}", format!("{:?}", n.sort()).to_lowercase()),
            Err(e) => format!("reject:{}", e.kind),
        };
        ensure(got == expected, || format!("{phrase:?}: expected {expected}, got {got}"))?;
        match expected.strip_prefix("reject:") {
            Some(kind) => {
                rejected.insert(kind.to_string());
            }
            None => ok += 1,
        }
    }
    ensure(ok >= 25, || format!("only {ok} phrases parse"))?;
    for kind in ["nested_alternative", "human_input_required"] {
        ensure(rejected.contains(kind), || format!("no {kind} rejection in the corpus"))?;
    }
    Ok(format!("{ok} phrases parse; rejections: {}", rejected.into_iter().collect::<Vec<_>>().join(", ")))
}

// ---------------------------------------------------------------- scenarios

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn determinism() -> Outcome {
    let cases = [
        ("on_time_payment.json", 0, None),
        ("late_payment.json", 1, Some("sanction_late")),
        ("prohibition_breach.json", 1, Some("prohibition_breach")),
    ];
    for (file, code, kind) in cases {
        let mut outputs = Vec::new();
        for _ in 0..5 {
            let out = Command::new(env!("CARGO_BIN_EXE_cte"))
                .args(["check", "--format", "json"])
                .arg(scenario_path(file))
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.code() == Some(code), || format!("{file}: exit {:?}, expected {code}", out.status.code()))?;
            outputs.push(out.stdout);
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || format!("{file}: reports differ across runs"))?;
        let report: Value = serde_json::from_slice(&outputs[0]).map_err(|e| e.to_string())?;
        let kinds: Vec<&str> = report["violations"]
            .as_array()
            .ok_or("no violations array")?
            .iter()
            .filter_map(|v| v["kind"].as_str())
            .collect();
        match kind {
            None => ensure(kinds.is_empty(), || format!("{file}: unexpected {kinds:?}"))?,
            Some(k) => ensure(kinds.iter().filter(|x| **x == k).count() == 1, || format!("{file}: {kinds:?}"))?,
        }
    }
    Ok("3 scenarios x 5 runs: byte-identical reports, exits 0/1/1".into())
}

/// Removes report entries that concern `subjects`.
fn without(report: &Value, subjects: &BTreeSet<String>) -> Value {
    let mut r = report.clone();
    let keep = |v: &Value, key: &str| !subjects.contains(v[key].as_str().unwrap_or_default());
    let filter = |arr: &mut Value, key: &str| {
        if let Some(a) = arr.as_array_mut() {
            a.retain(|v| keep(v, key));
        }
    };
    filter(&mut r["violations"], "subject");
    filter(&mut r["final_state"]["obligations"], "id");
    filter(&mut r["final_state"]["bindings"], "name");
    r
}

fn sensitivity() -> Outcome {
    let text = std::fs::read_to_string(scenario_path("promptly_notice.json")).map_err(|e| e.to_string())?;
    let sc = Scenario::from_json(&text).map_err(|e| e.to_string())?;
    let cal = PropertyCalendar::from_json(
        &std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("calendars/general_business_2018.json"))
            .map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for w in [1u32, 2, 5] {
        let cfg = ReasonablenessConfig::default().with_window(cte_core::dsl::ast::Adverb::Promptly, w);
        let r = replay(&sc, &cal, &cfg).map_err(|e| e.to_string())?;
        for b in &r.final_state.bindings {
            if let cte_core::BindingValue::Bag(bag) = &b.value {
                ensure(bag.len() == w as usize + 1, || format!("window {w}: bag {} has {} days", b.name, bag.len()))?;
            }
        }
        reports.push((w, r));
    }

    // subjects whose values come from a bag, and everything downstream of them
    let mut dependent = BTreeSet::new();
    for (_, r) in &reports {
        for b in &r.final_state.bindings {
            if matches!(b.value, cte_core::BindingValue::Bag(_)) {
                dependent.insert(b.name.clone());
            }
        }
        for o in &r.final_state.obligations {
            if matches!(o.due, Due::Bag(_)) {
                dependent.insert(o.id.clone());
            }
        }
    }
    let json: Vec<Value> = reports.iter().map(|(_, r)| serde_json::to_value(r).unwrap()).collect();
    let base = without(&json[0], &dependent);
    for (i, (w, _)) in reports.iter().enumerate().skip(1) {
        ensure(without(&json[i], &dependent) == base, || format!("window {w} changed entries outside {dependent:?}"))?;
    }
    ensure(json[0] != json[1], || "changing the window changed nothing".into())?;
    let late: Vec<usize> = reports.iter().map(|(_, r)| r.violations.iter().filter(|v| dependent.contains(&v.subject)).count()).collect();
    Ok(format!(
        "promptly in {{1, 2, 5}}: bag sizes 2/3/6, bag-dependent violations {late:?}, all other entries identical ({} dependent subjects)",
        dependent.len()
    ))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("RU axiom suite", ru_axioms),
        ("RD/RT duality and monotonicity", rd_rt_duality),
        ("calendar oracle", calendar_oracle),
        ("generator oracle", generator_oracle),
        ("bag soundness", bag_soundness),
        ("lifecycle state machine", lifecycle),
        ("phrase corpus", phrase_corpus),
        ("end-to-end determinism", determinism),
        ("sensitivity harness", sensitivity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
