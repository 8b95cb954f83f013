//! Command execution. Every command yields records plus a human table; `main`
//! picks which one to print.

use hypiso_core::combiner::{check_hypotheses, Verification};
use hypiso_core::dynamics::{
    axis_point, estimate_delta_insize, independent_separation, local_quasigeodesic_check, ns_dynamics_check,
    orbit_projection, separation_check, standard_sample, NeighborhoodSpec,
};
use hypiso_core::geometry::exact_to_f64;
use hypiso_core::sampling::{random_point, rng};
use hypiso_core::{
    estimate_delta_four_point, format_rational, independent, simultaneous_hyperbolic, verify_certificate, Action,
    ActionSystem, Certificate, CombineError, GroupWord, Isometry, IsometryClass, Point, SearchSchedule,
};

use crate::config::SystemConfig;
use crate::report::Record;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

/// Word length for the up-front hypothesis scan.
const HYPOTHESIS_DEPTH: usize = 4;
const PROJECTION_RANGE: u32 = 8;
const QG_PERIODS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    NorthSouth,
    Separation,
    Quasigeodesic,
    Projection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub max_exponent: u32,
    pub witness_depth: usize,
    pub orbit_depth: u32,
    pub ball_radius: u32,
    pub seed: u64,
    pub threshold: f64,
    pub checks: Vec<Check>,
}

impl Settings {
    fn schedule(&self) -> SearchSchedule {
        SearchSchedule { max_exponent: self.max_exponent, witness_depth: self.witness_depth }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub table: String,
    pub status: i32,
}

impl Outcome {
    fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.table.push_str(s.as_ref());
        self.table.push('\n');
    }

    fn fail(&mut self, status: i32, kind: &str, message: String) {
        self.line(format!("error ({kind}): {message}"));
        self.push(Record::Error { kind: kind.to_string(), message });
        self.status = self.status.max(status);
    }

    fn finish(mut self) -> Self {
        self.push(Record::Exit { status: self.status });
        self
    }
}

fn abs_trace(iso: &Isometry) -> Option<String> {
    match iso {
        Isometry::Mobius(m) => Some(format_rational(&m.abs_trace())),
        _ => None,
    }
}

/// `"7/1"` shown as `7` in tables.
fn shown(tr: &Option<String>) -> &str {
    match tr.as_deref() {
        Some(t) => t.strip_suffix("/1").unwrap_or(t),
        None => "-",
    }
}

fn class_summary(class: &IsometryClass) -> (String, String) {
    match class {
        IsometryClass::Hyperbolic(h) => {
            let t = &h.translation_length;
            let exact = match &t.exact_value {
                Some(hypiso_core::ExactValue::Cosh(c)) => format!("cosh = {}", format_rational(c)),
                Some(hypiso_core::ExactValue::Integer(n)) => n.to_string(),
                None => "-".into(),
            };
            (exact, format!("{:.6}", t.value))
        }
        IsometryClass::Elliptic(e) => (
            match e.order {
                Some(o) => format!("order {o}"),
                None => "infinite order".into(),
            },
            "0".into(),
        ),
        IsometryClass::HypothesisViolation { reason } => (reason.clone(), "-".into()),
    }
}

fn combine_status(e: &CombineError) -> (i32, &'static str) {
    match e {
        CombineError::ScheduleExhausted { .. } => (EXIT_EXHAUSTED, "schedule-exhausted"),
        CombineError::HypothesisViolation { .. } => (EXIT_HYPOTHESIS, "hypothesis-violation"),
        CombineError::WitnessNotHyperbolic { .. } => (EXIT_HYPOTHESIS, "witness-not-hyperbolic"),
        CombineError::NoWitness { .. } => (EXIT_HYPOTHESIS, "no-witness"),
        CombineError::Model(_) => (EXIT_INVALID, "model"),
    }
}

fn classify(cfg: &SystemConfig, out: &mut Outcome) {
    let sys = &cfg.system;
    let mut words: Vec<GroupWord> = sys.generators().iter().map(GroupWord::generator).collect();
    words.extend(cfg.words.iter().cloned());
    out.line(format!("{:<10} {:<16} {:<22} {:<28} {:>12} {:>10}", "action", "word", "class", "exact τ", "τ (approx)", "|trace|"));
    for (i, action) in sys.actions().iter().enumerate() {
        for w in &words {
            let result = action.evaluate(w).and_then(|iso| Ok((action.model.classify(&iso)?, iso)));
            match result {
                Ok((class, iso)) => {
                    let (exact, approx) = class_summary(&class);
                    let tr = abs_trace(&iso);
                    out.line(format!(
                        "{:<10} {:<16} {:<22} {:<28} {:>12} {:>10}",
                        action.name,
                        w.to_string(),
                        class.tag(),
                        exact,
                        approx,
                        shown(&tr)
                    ));
                    out.push(Record::Classification {
                        action: i,
                        action_name: action.name.clone(),
                        word: w.clone(),
                        abs_trace: tr,
                        class,
                    });
                }
                Err(e) => out.fail(EXIT_INVALID, "model", format!("action {i}, word {w}: {e}")),
            }
        }
    }
}

fn hypotheses(sys: &ActionSystem, out: &mut Outcome) -> bool {
    match check_hypotheses(sys, HYPOTHESIS_DEPTH) {
        Ok(report) => {
            let ok = report.passed();
            out.line(format!(
                "hypotheses: {} words checked, {} violations",
                report.words_checked,
                report.violations.len()
            ));
            for v in &report.violations {
                out.line(format!("  action {} ({}), word {}: {}", v.action, sys.actions()[v.action].name, v.word, v.reason));
            }
            if let Some(v) = report.violations.first() {
                let msg = format!("{} in action {}: {}", v.word, v.action, v.reason);
                out.push(Record::Hypotheses { report });
                out.fail(EXIT_HYPOTHESIS, "hypothesis-violation", msg);
            } else {
                out.push(Record::Hypotheses { report });
            }
            ok
        }
        Err(e) => {
            let (status, kind) = combine_status(&e);
            out.fail(status, kind, e.to_string());
            false
        }
    }
}

fn certificate_table(sys: &ActionSystem, cert: &Certificate, out: &mut Outcome) {
    out.line(format!("certificate: {}", cert.word));
    out.line(format!("{:<10} {:<28} {:>12} {:>10}", "action", "exact τ", "τ (approx)", "|trace|"));
    for (i, (action, class)) in sys.actions().iter().zip(&cert.per_action).enumerate() {
        let (exact, approx) = class_summary(class);
        let tr = sys.evaluate(i, &cert.word).ok().and_then(|iso| abs_trace(&iso));
        out.line(format!("{:<10} {:<28} {:>12} {:>10}", action.name, exact, approx, shown(&tr)));
    }
    out.line(format!("{:<6} {:<20} {:<20} {:>4} {:>4} {:>4} {:>4} {:>7} {:>7}", "stage", "f", "g", "p", "q", "a", "b", "trivial", "index"));
    for s in &cert.stages {
        out.line(format!(
            "{:<6} {:<20} {:<20} {:>4} {:>4} {:>4} {:>4} {:>7} {:>7}",
            s.action,
            s.f.to_string(),
            s.g.to_string(),
            s.p,
            s.q,
            s.a,
            s.b,
            s.trivial,
            s.schedule_index.map_or("-".into(), |i| i.to_string())
        ));
        for e in &s.profile.entries {
            out.line(format!(
                "         action {}: f {}, g {}, tag {}",
                e.action,
                e.f_class,
                e.g_class,
                e.tag.map_or("-".into(), |t| t.to_string())
            ));
        }
    }
    out.line(format!("candidates tried: {}", cert.search_stats.candidates_tried));
}

fn combine(cfg: &SystemConfig, settings: &Settings, out: &mut Outcome) -> Option<Certificate> {
    let sys = &cfg.system;
    if !hypotheses(sys, out) {
        return None;
    }
    match simultaneous_hyperbolic(sys, &settings.schedule()) {
        Ok(cert) => {
            certificate_table(sys, &cert, out);
            let v = verify_certificate(sys, &cert);
            if !v.valid {
                out.fail(EXIT_INVALID, "verification", v.diagnostic.clone().unwrap_or_default());
            }
            out.push(Record::Certificate { certificate: cert.clone() });
            Some(cert)
        }
        Err(e) => {
            let (status, kind) = combine_status(&e);
            if let CombineError::ScheduleExhausted { trials, .. } = &e {
                out.line(format!("{} candidates tried", trials.len()));
            }
            out.fail(status, kind, e.to_string());
            None
        }
    }
}

fn delta_sample(action: &Action, settings: &Settings) -> Vec<Point> {
    let model = &action.model;
    if model.kind().is_tree() {
        let radius = model.ball_radius().min(3);
        return model.ball_around(&model.basepoint(), radius).map(|b| b.vertices).unwrap_or_default();
    }
    let mut r = rng(settings.seed);
    let mut out: Vec<Point> = Vec::new();
    while out.len() < 40 {
        let p = random_point(&mut r, model, 0);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn delta(cfg: &SystemConfig, settings: &Settings, out: &mut Outcome) {
    out.line(format!("{:<10} {:<18} {:>8} {:>14} {:>10} {:>10}", "action", "model", "points", "four-point δ", "triangles", "insize"));
    for (i, action) in cfg.system.actions().iter().enumerate() {
        let model = &action.model;
        let sample = delta_sample(action, settings);
        let len = sample.len();
        let triangles: Vec<_> = (0..len.min(100))
            .map(|k| (k, (k * 7 + 3) % len, (k * 13 + 5) % len))
            .filter(|(a, b, c)| a != b && b != c && c != a)
            .map(|(a, b, c)| (sample[a].clone(), sample[b].clone(), sample[c].clone()))
            .collect();
        let fp = estimate_delta_four_point(model, &sample, &model.basepoint());
        let ins = estimate_delta_insize(model, &triangles);
        match (fp, ins) {
            (Ok(fp), Ok(ins)) => {
                out.line(format!(
                    "{:<10} {:<18} {:>8} {:>14} {:>10} {:>10}",
                    action.name,
                    model.kind().to_string(),
                    sample.len(),
                    format!("{:.6}", fp.delta),
                    triangles.len(),
                    format!("{:.6}", ins.delta)
                ));
                out.push(Record::Delta { action: i, model: model.kind().to_string(), four_point: fp, insize: ins });
            }
            (Err(e), _) | (_, Err(e)) => out.fail(EXIT_INVALID, "model", format!("action {i}: {e}")),
        }
    }
}

fn north_south(i: usize, action: &Action, w: &GroupWord, settings: &Settings, out: &mut Outcome) {
    let model = &action.model;
    let Ok(iso) = action.evaluate(w) else { return };
    let prepared = model.fixed_points(&iso).and_then(|(plus, minus)| {
        let base = axis_point(model, &iso)?;
        let up = NeighborhoodSpec::new(plus, settings.threshold, base.clone())?;
        let um = NeighborhoodSpec::new(minus, settings.threshold, base.clone())?;
        let sample = standard_sample(model, &base)?;
        Ok((up, um, sample))
    });
    let (n, failure, size) = match prepared {
        Ok((up, um, sample)) => match ns_dynamics_check(action, w, &up, &um, &sample, settings.orbit_depth) {
            Ok(n) => (Some(n), None, sample.len()),
            Err(e) => (None, Some(e.to_string()), sample.len()),
        },
        Err(e) => (None, Some(e.to_string()), 0),
    };
    out.line(format!(
        "  north-south {} in {}: {}",
        w,
        action.name,
        match (&n, &failure) {
            (Some(n), _) => format!("N = {n} over {size} points"),
            (_, Some(f)) => format!("failed: {f}"),
            _ => unreachable!(),
        }
    ));
    out.push(Record::NorthSouth { action: i, word: w.clone(), threshold: settings.threshold, sample_size: size, n, failure });
}

fn separation(i: usize, action: &Action, f: &GroupWord, g: &GroupWord, settings: &Settings, out: &mut Outcome) {
    let model = &action.model;
    let hyperbolic = |w: &GroupWord| action.evaluate(w).is_ok_and(|x| x.is_hyperbolic());
    if !hyperbolic(f) || !hyperbolic(g) {
        return;
    }
    let indep = independent(action, f, g).unwrap_or(false);
    let mut rec = Record::Separation {
        action: i,
        f: f.clone(),
        g: g.clone(),
        independent: indep,
        n: None,
        powers_tested: Vec::new(),
        passed: false,
        failure: None,
    };
    let Record::Separation { n, powers_tested, passed, failure, .. } = &mut rec else { unreachable!() };
    if !indep {
        *failure = Some("not independent: the fixed-point pairs meet".into());
    } else {
        let sample = standard_sample(model, &model.basepoint()).unwrap_or_default();
        match independent_separation(action, f, g, &sample, settings.orbit_depth) {
            Ok(setup) => {
                *n = Some(setup.n);
                *passed = true;
                for k in setup.n..=setup.n + 4 {
                    powers_tested.push(k);
                    match separation_check(action, &g.pow(i64::from(k)), &setup.u_plus, &setup.u_minus, &sample) {
                        Ok(r) if r.passed => {}
                        Ok(r) => {
                            *passed = false;
                            *failure = Some(format!("g^{k} maps {} from U+ into U-", r.witness.map_or("-".into(), |p| p.to_string())));
                            break;
                        }
                        Err(e) => {
                            *passed = false;
                            *failure = Some(e.to_string());
                            break;
                        }
                    }
                }
            }
            Err(e) => *failure = Some(e.to_string()),
        }
    }
    out.line(format!(
        "  separation {f} / {g} in {}: {}",
        action.name,
        match (&n, &failure) {
            (Some(n), None) => format!("passes for powers {n}..={}", n + 4),
            (_, Some(msg)) => format!("failed: {msg}"),
            _ => "-".into(),
        }
    ));
    out.push(rec);
}

fn dynamics(cfg: &SystemConfig, settings: &Settings, out: &mut Outcome) {
    let sys = &cfg.system;
    let gens: Vec<GroupWord> = sys.generators().iter().map(GroupWord::generator).collect();
    let wants = |c| settings.checks.is_empty() || settings.checks.contains(&c);
    let cert = if wants(Check::Quasigeodesic) {
        match simultaneous_hyperbolic(sys, &settings.schedule()) {
            Ok(c) => Some(c),
            Err(e) => {
                out.line(format!("quasi-geodesic checks skipped: {e}"));
                None
            }
        }
    } else {
        None
    };
    for (i, action) in sys.actions().iter().enumerate() {
        out.line(format!("action {} ({})", action.name, action.model.kind()));
        let hyperbolic: Vec<&GroupWord> =
            gens.iter().filter(|w| action.evaluate(w).is_ok_and(|x| x.is_hyperbolic())).collect();
        if wants(Check::NorthSouth) {
            for w in &hyperbolic {
                north_south(i, action, w, settings, out);
            }
        }
        if wants(Check::Separation) {
            for (a, f) in gens.iter().enumerate() {
                for g in &gens[a + 1..] {
                    separation(i, action, f, g, settings, out);
                }
            }
        }
        if let Some(cert) = &cert {
            let base = action.model.basepoint();
            match local_quasigeodesic_check(action, &cert.word, &GroupWord::identity(), 1, &base, QG_PERIODS) {
                Ok(r) => {
                    out.line(format!(
                        "  quasi-geodesic {}: λ = {}, ε = {} over {} pairs",
                        cert.word,
                        r.lambda.map_or("-".into(), |l| l.to_string()),
                        r.epsilon.map_or("-".into(), |e| e.to_string()),
                        r.pairs_tested
                    ));
                    out.push(Record::QuasiGeodesic {
                        action: i,
                        word: cert.word.clone(),
                        periods: QG_PERIODS,
                        lambda: r.lambda,
                        epsilon: r.epsilon,
                        approx_scale: r.scale.value,
                        pairs_tested: r.pairs_tested,
                    });
                }
                Err(e) => out.fail(EXIT_INVALID, "model", format!("action {i}: {e}")),
            }
        }
        if wants(Check::Projection) {
            for w in &hyperbolic {
                let base = action.model.basepoint();
                let points = standard_sample(&action.model, &base).unwrap_or_default();
                let worst = points
                    .iter()
                    .filter_map(|z| orbit_projection(action, w, &base, z, PROJECTION_RANGE).ok())
                    .map(|p| p.defect)
                    .fold(0.0, f64::max);
                out.line(format!("  projection onto ⟨{w}⟩-orbit: max defect {worst:.6} over {} points", points.len()));
                out.push(Record::Projection { action: i, word: (*w).clone(), points: points.len(), approx_max_defect: worst });
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Classify,
    Combine,
    Delta,
    Dynamics,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Combine => "combine",
            Command::Delta => "delta",
            Command::Dynamics => "dynamics",
            Command::Report => "report",
        }
    }
}

fn start(command: &str, settings: &Settings) -> Outcome {
    let mut out = Outcome::default();
    out.push(Record::header());
    out.push(Record::Command {
        command: command.to_string(),
        max_exponent: settings.max_exponent,
        orbit_depth: settings.orbit_depth,
        ball_radius: settings.ball_radius,
        seed: settings.seed,
    });
    out
}

pub fn run(command: Command, cfg: &SystemConfig, settings: &Settings) -> Outcome {
    let mut out = start(command.name(), settings);
    match command {
        Command::Classify => classify(cfg, &mut out),
        Command::Combine => {
            combine(cfg, settings, &mut out);
        }
        Command::Delta => delta(cfg, settings, &mut out),
        Command::Dynamics => dynamics(cfg, settings, &mut out),
        Command::Report => {
            out.line("== classification");
            classify(cfg, &mut out);
            out.line("== combination");
            combine(cfg, settings, &mut out);
            out.line("== hyperbolicity constants");
            delta(cfg, settings, &mut out);
        }
    }
    out.finish()
}

/// Re-verifies a certificate taken from a record stream against `cfg`.
pub fn verify(cfg: &SystemConfig, cert: &Certificate, settings: &Settings) -> Outcome {
    let mut out = start("verify", settings);
    let v: Verification = verify_certificate(&cfg.system, cert);
    if v.valid {
        out.line(format!("certificate {} verified in {} actions", cert.word, cfg.system.actions().len()));
        for (i, c) in cert.per_action.iter().enumerate() {
            if let Some(t) = c.translation_length().and_then(|t| t.exact_value.as_ref()) {
                out.line(format!("  action {i}: τ ≈ {:.6}", exact_to_f64(t)));
            }
        }
    } else {
        out.line(format!("certificate rejected: {}", v.diagnostic.clone().unwrap_or_default()));
        out.status = EXIT_INVALID;
    }
    out.push(Record::Verification { verification: v });
    out.finish()
}

/// Outcome for inputs that never reached a command (I/O or config errors).
pub fn failed(command: &str, settings: &Settings, kind: &str, message: String) -> Outcome {
    let mut out = start(command, settings);
    out.fail(EXIT_INVALID, kind, message);
    out.finish()
}
