use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use gevrey_nse::constants::{
    appendix_bounds, grashof, ln_rtilde_index, rtilde_new, BoundSet, ChainInputs, ClassConstants, GevreyBoundInputs,
};
use gevrey_nse::dynamics::{attractor_sample, bound_slack, gevrey_along_ray, integrate, EnsembleConfig, IntegratorConfig};
use gevrey_nse::gevrey::{
    attractor_b, cor55_b, csigma_certificate, csigma_fit, lemma71_check, prop53_bound_check, thm54_b, weight_sweep, weighted_force_norm,
    Prop53Outcome,
};
use gevrey_nse::inequalities::inequality_audit;
use gevrey_nse::kolmogorov::{eigen_force, kolmogorov_verdict};
use gevrey_nse::report::{fmt_f64, CsvTable};
use gevrey_nse::snapshot::{field_to_string, read_field};
use gevrey_nse::spectral::{random_real_field, random_sparse_field, GridSpec, SpectralField, Wavevector};
use gevrey_nse::taylor::{criterion_verdict, taylor_coefficients, ConformalMap, TaylorConfig, VerdictConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::{Failure, Status};

type Outcome = Result<Status, Failure>;

// Independent streams of one seed, so adding a draw in one place never
// shifts another.
const STREAM_FORCE: u64 = 1;
const STREAM_INIT: u64 = 2;
const STREAM_FIELD: u64 = 3;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

struct Sink {
    dir: PathBuf,
    quiet: bool,
}

impl Sink {
    fn new(o: &OutputArgs) -> Result<Self, Failure> {
        fs::create_dir_all(&o.out).map_err(|e| input(format!("{}: {e}", o.out.display())))?;
        Ok(Self { dir: o.out.clone(), quiet: o.quiet })
    }

    fn write(&self, name: &str, text: &str) -> Result<(), Failure> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&p, text).map_err(|e| input(format!("{}: {e}", p.display())))
    }

    fn say(&self, text: &str) {
        if !self.quiet {
            // a closed pipe downstream is not a failure of the run
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
    }
}

fn read_snapshot(path: &Path) -> Result<SpectralField, Failure> {
    let f = fs::File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    read_field(std::io::BufReader::new(f)).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn wavevector(k: &[i32]) -> Result<Wavevector, Failure> {
    match k {
        [a, b] => Ok(Wavevector::new(*a, *b)),
        _ => Err(input("--k takes two integers")),
    }
}

fn build_force(f: &ForceArgs, grid: GridSpec, seed: u64) -> Result<SpectralField, Failure> {
    match f.force {
        ForceKind::Zero => Ok(SpectralField::zeros(grid)),
        ForceKind::Kolmogorov => Ok(eigen_force(wavevector(&f.k)?, f.amplitude, grid)?.field),
        ForceKind::Random => {
            let g = random_sparse_field(grid, f.force_max_mode, f.force_modes, 1.0, &mut rng(seed, STREAM_FORCE));
            let n = g.norm();
            if n == 0.0 {
                return Err(input("random force is empty; raise --force-modes"));
            }
            Ok(g.scale(f.amplitude / n))
        }
        ForceKind::File => {
            let p = f.force_file.as_ref().ok_or_else(|| input("--force file needs --force-file"))?;
            read_snapshot(p)
        }
    }
}

fn chain(g: f64, nu: f64, kappa0: f64, c: &ChainArgs) -> Result<BoundSet, Failure> {
    Ok(appendix_bounds(ChainInputs { g, nu, kappa0, c_l: c.c_l, c_a: c.c_a }, c.gamma_max, c.tol)?)
}

pub(crate) fn execute(cmd: &Command, meta: &str) -> Outcome {
    let sink = Sink::new(cmd.output())?;
    sink.write("run.meta", meta)?;
    match cmd {
        Command::Constants(a) => constants(a, &sink),
        Command::Criterion(a) => criterion(a, &sink),
        Command::Kolmogorov(a) => kolmogorov(a, &sink),
        Command::Simulate(a) => simulate(a, &sink),
        Command::GevreyDiag(a) => gevrey_diag(a, &sink),
    }
}

fn two_column(rows: &[(String, f64)]) -> (String, CsvTable) {
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut text = String::new();
    let mut csv = CsvTable::new(["name", "value"]);
    for (k, v) in rows {
        let _ = writeln!(text, "{k:<width$}  {}", fmt_f64(*v));
        csv.push(vec![k.clone(), fmt_f64(*v)]);
    }
    (text, csv)
}

fn constants(a: &ConstantsArgs, sink: &Sink) -> Outcome {
    let force = a.g_file.as_deref().map(read_snapshot).transpose()?;
    let (g, kappa0) = match (&force, a.grashof) {
        (Some(f), _) => (grashof(f, a.nu), f.grid().kappa0()),
        (None, Some(g)) => (g, a.kappa0),
        (None, None) => return Err(input("one of --G or --g-file is required")),
    };
    let bounds = chain(g, a.nu, kappa0, &a.chain)?;
    let mut rows: Vec<(String, f64)> = vec![("G".into(), g)];
    rows.extend(bounds.rows().into_iter().map(|(k, v)| (k.to_string(), v)));
    for j in 4..=5 {
        rows.push((format!("ln_Rt{j}"), ln_rtilde_index(j, &bounds)?));
    }
    if let Some(b) = a.b {
        let delta = a.delta.unwrap_or(bounds.delta3);
        let g_weighted = match (&force, a.g_weighted) {
            (Some(f), _) => weighted_force_norm(f, b),
            (None, Some(w)) => w,
            (None, None) => return Err(input("--b with --G needs --g-weighted (or pass --g-file)")),
        };
        let r = rtilde_new(&GevreyBoundInputs { delta, b, g_weighted }, &bounds, &ClassConstants::for_exponent(a.c0, b))?;
        rows.extend([
            ("b".to_string(), b),
            ("delta".into(), delta),
            ("g_weighted".into(), g_weighted),
            ("c0".into(), a.c0),
            ("ln_M1".into(), r.ln_m1),
            ("ln_M2".into(), r.ln_m2),
            ("ln_Rt_new_sq".into(), r.ln_sq),
            ("ln_ln_Rt_new_sq".into(), r.ln_ln_sq),
            ("ln_bound_M".into(), r.ln_bound(a.nu)),
        ]);
    }
    let (text, csv) = two_column(&rows);
    sink.write("constants.csv", &csv.render())?;
    let mut gamma = CsvTable::new(["gamma", "Gamma", "epsilon", "eta"]);
    for t in &bounds.gamma_terms {
        gamma.push_f64(&[t.gamma as f64, t.big_gamma, t.epsilon, t.eta]);
    }
    sink.write("gamma.csv", &gamma.render())?;
    sink.say(&text);
    sink.say("note: c_L and c_A are uncalibrated placeholders unless set explicitly\n");
    sink.say("note: G = |g| / (nu^2 kappa0^2) with |g| the L2 norm, a convention\n");
    Ok(Status::Clean)
}

fn criterion(a: &CriterionArgs, sink: &Sink) -> Outcome {
    let grid = GridSpec::new(a.grid.k_max, a.grid.kappa0)?;
    let g = build_force(&a.force, grid, a.output.seed)?;
    let grid = *g.grid();
    let gr = grashof(&g, a.nu);
    let bounds = if gr > 0.0 && (a.delta.is_none() || a.m.is_none()) {
        Some(chain(gr, a.nu, grid.kappa0(), &a.chain)?)
    } else {
        None
    };
    // g = 0: the attractor is {0}, any strip works and the bound is 0
    let delta = a.delta.or(bounds.as_ref().map(|b| b.delta3)).unwrap_or(1.0);
    let (m, m_source) = match (a.m, &bounds) {
        (Some(m), _) => (m, "flag"),
        (None, Some(b)) => {
            let r = rtilde_new(
                &GevreyBoundInputs { delta, b: a.b, g_weighted: weighted_force_norm(&g, a.b) },
                b,
                &ClassConstants::for_exponent(a.c0, a.b),
            )?;
            (r.ln_bound(a.nu).exp(), "R~_new nu")
        }
        (None, None) => (0.0, "zero force"),
    };
    let map = ConformalMap::new(delta)?;
    let series = taylor_coefficients(&g, a.nu, map, &TaylorConfig { n: a.n, b: a.b, backend: a.backend.into() })?;
    let rep = criterion_verdict(&series, m, &VerdictConfig { margin: a.margin, ..VerdictConfig::default() })?;

    let mut csv = CsvTable::new(["n", "norm_b", "ratio"]);
    for (n, v, r) in series.norm_table() {
        csv.push_f64(&[n as f64, v, r]);
    }
    sink.write("criterion.csv", &csv.render())?;
    if a.snapshots {
        for (n, u) in series.coeffs.iter().enumerate() {
            sink.write(&format!("snapshots/U_{n:04}.field"), &field_to_string(u))?;
        }
    }
    let mut block = String::new();
    let _ = writeln!(block, "force: {:?} (G = {})", a.force.force, fmt_f64(gr));
    let _ = writeln!(block, "delta: {} (delta0 = {})", fmt_f64(delta), fmt_f64(map.delta0()));
    let _ = writeln!(block, "b: {}", fmt_f64(a.b));
    let _ = writeln!(block, "bound_source: {m_source}");
    block.push_str(&rep.render());
    sink.write("verdict.txt", &block)?;
    sink.say(&block);
    if series.divergent {
        return Ok(Status::Flagged(format!("Taylor coefficients overflowed after n = {}", series.order())));
    }
    Ok(Status::Clean)
}

fn kolmogorov(a: &KolmogorovArgs, sink: &Sink) -> Outcome {
    let k = wavevector(&a.k)?;
    if k.is_zero() {
        return Err(input("--k must be a nonzero wavevector"));
    }
    let grid = GridSpec::new(a.k_max.unwrap_or(k.sup_norm().max(1)), a.kappa0)?;
    let f = eigen_force(k, a.amplitude, grid)?;
    let map = ConformalMap::new(a.delta)?;
    let rep = kolmogorov_verdict(&f, a.nu, map.delta0(), a.n)?;

    let mut csv = CsvTable::new(["n", "p_n", "ln_abs_p_n", "sign"]);
    for (n, v) in rep.pn.values.iter().enumerate() {
        csv.push(vec![n.to_string(), fmt_f64(v.to_f64()), fmt_f64(v.ln_abs()), v.sign().to_string()]);
    }
    sink.write("pn.csv", &csv.render())?;
    sink.write("equilibrium.field", &field_to_string(&rep.equilibrium))?;
    let mut block = String::new();
    let _ = writeln!(block, "k: ({}, {})  lambda: {}", k.k1, k.k2, fmt_f64(f.lambda));
    let _ = writeln!(block, "delta: {}  delta0: {}", fmt_f64(a.delta), fmt_f64(map.delta0()));
    let _ = writeln!(block, "a = nu lambda delta0 / 2: {}", fmt_f64(a.nu * f.lambda * map.delta0() / 2.0));
    block.push_str(&rep.render());
    sink.write("kolmogorov.txt", &block)?;
    sink.say(&block);
    Ok(Status::Clean)
}

fn simulate(a: &SimulateArgs, sink: &Sink) -> Outcome {
    let grid = GridSpec::new(a.grid.k_max, a.grid.kappa0)?;
    let g = build_force(&a.force, grid, a.output.seed)?;
    let grid = *g.grid();
    let u0 = match a.init {
        InitKind::Zero => SpectralField::zeros(grid),
        InitKind::Random => {
            let amp = a.init_amplitude.unwrap_or(a.nu * grid.kappa0());
            random_real_field(grid, a.init_max_mode, amp, &mut rng(a.output.seed, STREAM_INIT))
        }
        InitKind::File => {
            let p = a.init_file.as_ref().ok_or_else(|| input("--init file needs --init-file"))?;
            let u = read_snapshot(p)?;
            if !u.grid().same_lattice(&grid) {
                return Err(input("initial field and force live on different grids"));
            }
            u
        }
    };
    let it = &a.integrator;
    let cfg = IntegratorConfig {
        dt: it.dt,
        theta: it.theta,
        t_end: it.t_end,
        b: it.b,
        record_every: a.snapshot_every,
        backend: it.backend.into(),
    };
    let tr = integrate(&u0, &g, a.nu, 0.0, &cfg)?;

    let mut csv = if it.theta == 0.0 {
        CsvTable::new(["t", "norm", "norm_a_half", "norm_b", "energy_residual"])
    } else {
        CsvTable::new(["rho", "t_re", "t_im", "norm", "norm_a_half", "norm_b", "energy_residual"])
    };
    for d in &tr.diagnostics {
        if it.theta == 0.0 {
            csv.push_f64(&[d.t.re, d.norm, d.norm_a_half, d.norm_b, d.energy_residual]);
        } else {
            csv.push_f64(&[d.rho, d.t.re, d.t.im, d.norm, d.norm_a_half, d.norm_b, d.energy_residual]);
        }
    }
    sink.write("trajectory.csv", &csv.render())?;
    if a.snapshot_every > 0 {
        for (i, u) in tr.states.iter().enumerate() {
            sink.write(&format!("snapshots/state_{i:06}.field"), &field_to_string(u))?;
        }
    }
    sink.write("final.field", &field_to_string(tr.last()))?;
    let last = tr.diagnostics.last().expect("initial diagnostics");
    let mut s = String::new();
    let _ = writeln!(s, "steps: {}", tr.diagnostics.len() - 1);
    let _ = writeln!(s, "final t: {} + {}i", fmt_f64(last.t.re), fmt_f64(last.t.im));
    let _ = writeln!(s, "final |u|: {}", fmt_f64(last.norm));
    let _ = writeln!(s, "final |u|_b: {}", fmt_f64(last.norm_b));
    if it.theta == 0.0 {
        let _ = writeln!(s, "max energy residual: {}", fmt_f64(tr.max_energy_residual()));
    }
    sink.say(&s);
    match tr.blow_up {
        Some(rho) => Ok(Status::Flagged(format!("blow-up at ray parameter {}", fmt_f64(rho)))),
        None => Ok(Status::Clean),
    }
}

fn gevrey_diag(a: &DiagArgs, sink: &Sink) -> Outcome {
    let grid = GridSpec::new(a.grid.k_max, a.grid.kappa0)?;
    let mut report = String::new();
    let mut status = Status::Clean;
    let mut attractor = None;
    let u = match a.source {
        FieldSource::Random => {
            random_real_field(grid, a.field_max_mode, a.field_amplitude, &mut rng(a.output.seed, STREAM_FIELD))
        }
        FieldSource::File => read_snapshot(a.field.as_ref().ok_or_else(|| input("--source file needs --field"))?)?,
        FieldSource::Attractor => {
            let g = build_force(&a.force, grid, a.output.seed)?;
            let ens = EnsembleConfig {
                members: a.members,
                t_transient: a.t_transient,
                t_sample: a.t_sample,
                samples_per_member: a.samples_per_member,
                seed: a.output.seed,
            };
            let cfg = IntegratorConfig {
                dt: a.dt,
                b: a.check_b.unwrap_or(0.0),
                backend: a.backend.into(),
                ..IntegratorConfig::default()
            };
            let s = attractor_sample(&g, a.nu, &ens, &cfg)?;
            let blown: Vec<u64> = s.members.iter().filter(|m| m.blow_up.is_some()).map(|m| m.seed).collect();
            if !blown.is_empty() {
                status = Status::Flagged(format!("ensemble members with seeds {blown:?} blew up"));
            }
            let _ = writeln!(report, "samples: {} from {} members", s.samples.len(), s.members.len());
            let _ = writeln!(report, "|u| range: [{}, {}]", fmt_f64(s.min_norm), fmt_f64(s.max_norm));
            let _ = writeln!(report, "|u|_b range: [{}, {}]", fmt_f64(s.min_norm_b), fmt_f64(s.max_norm_b));
            let _ = writeln!(report, "distance of 0 to the sample set: {}", fmt_f64(s.dist_zero));
            let first = s.samples.first().cloned().ok_or_else(|| Failure::Numerical("no attractor samples".into()))?;
            attractor = Some((g, s, cfg));
            first
        }
    };
    sink.write("field.field", &field_to_string(&u))?;

    let fit = match a.sigma {
        Some(sigma) => csigma_certificate(&u, a.nu, sigma, a.alpha_max),
        None => csigma_fit(&u, a.nu, a.alpha_max)?,
    };
    let mut cs = CsvTable::new(["alpha", "d_alpha", "bound"]);
    for (al, d, b) in fit.table() {
        cs.push_f64(&[al as f64, d, b]);
    }
    sink.write("csigma.csv", &cs.render())?;
    let _ = writeln!(report, "C(sigma): sigma = {}, c0 = {}", fmt_f64(fit.sigma), fmt_f64(fit.c0));

    match prop53_bound_check(&u, &fit, a.epsilon, a.nu)? {
        Prop53Outcome::Checked { b, check } => {
            let _ = writeln!(
                report,
                "inclusion (eps = {}): b = {}, lhs = {}, rhs = {}, pass = {}",
                a.epsilon,
                fmt_f64(b),
                fmt_f64(check.lhs),
                fmt_f64(check.rhs),
                check.pass
            );
        }
        Prop53Outcome::Degenerate => report.push_str("inclusion: degenerate (sigma = 0)\n"),
    }
    let b_check = match (a.check_b, a.beta3) {
        (Some(b), _) => b,
        (None, Some(beta3)) => {
            let b = match a.beta3_rule {
                Beta3Rule::Force => cor55_b(beta3)?,
                Beta3Rule::Solution => attractor_b(beta3)?,
            };
            let _ = writeln!(report, "beta3 = {} ({:?} rule): b = {}", fmt_f64(beta3), a.beta3_rule, fmt_f64(b));
            b
        }
        (None, None) if fit.sigma > 0.0 => thm54_b(fit.sigma)?.min(1.0),
        (None, None) => 1.0,
    };
    let l71 = lemma71_check(&u, b_check, a.chain.c_a)?;
    let _ = writeln!(
        report,
        "weighted product bound (b = {}): lhs = {}, rhs = {}, pass = {}",
        fmt_f64(b_check),
        fmt_f64(l71.lhs),
        fmt_f64(l71.rhs),
        l71.pass
    );
    let au = inequality_audit(&u, a.chain.c_l, a.chain.c_a, a.resolution);
    let _ = writeln!(
        report,
        "audit: poincare = {}, ladyzhenskaya = {}, agmon = {}, empirical c_L = {}, empirical c_A = {}",
        fmt_f64(au.poincare),
        fmt_f64(au.ladyzhenskaya),
        fmt_f64(au.agmon),
        fmt_f64(au.empirical_c_l),
        fmt_f64(au.empirical_c_a)
    );
    let mut sw = CsvTable::new(["b", "norm"]);
    for (b, n) in weight_sweep(&u, &a.b_values) {
        sw.push_f64(&[b, n]);
    }
    sink.write("sweep.csv", &sw.render())?;

    if let Some((g, s, cfg)) = attractor {
        let bounds = chain(grashof(&g, a.nu), a.nu, grid.kappa0(), &a.chain)?;
        let mut sl = CsvTable::new(["j", "max_norm", "ln_bound", "ln_slack"]);
        for r in bound_slack(&s.samples, &bounds)? {
            sl.push_f64(&[r.j as f64, r.max_norm, r.ln_bound, r.ln_slack]);
        }
        sink.write("slack.csv", &sl.render())?;
        let delta = a.delta.unwrap_or(bounds.delta3);
        let rn = rtilde_new(
            &GevreyBoundInputs { delta, b: b_check, g_weighted: weighted_force_norm(&g, b_check) },
            &bounds,
            &ClassConstants::for_exponent(fit.c0.max(f64::MIN_POSITIVE), b_check),
        )?;
        let prof = gevrey_along_ray(&u, &g, a.nu, delta, rn.ln_bound(a.nu), &IntegratorConfig { b: b_check, ..cfg })?;
        let mut rc = CsvTable::new(["theta", "rho", "norm_b"]);
        for r in &prof.rays {
            for &(rho, nb) in &r.profile {
                rc.push_f64(&[r.theta, rho, nb]);
            }
        }
        sink.write("rays.csv", &rc.render())?;
        let _ = writeln!(
            report,
            "rays: delta = {}, sup |u|_b = {}, ln(R~_new nu) = {}, ln slack = {}, narrower strip = {}",
            fmt_f64(delta),
            fmt_f64(prof.sup_norm_b),
            fmt_f64(prof.ln_bound),
            fmt_f64(prof.ln_slack),
            prof.narrower_strip
        );
    }
    sink.write("diag.txt", &report)?;
    sink.say(&report);
    Ok(status)
}
