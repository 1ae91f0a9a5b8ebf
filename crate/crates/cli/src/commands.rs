use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use melinv::io::{read_mel, read_wav, write_mel, write_trace, write_wav, MelFile};
use melinv::metrics::{scm_with_storage, spectral_convergence_fullband};
use melinv::solvers::{run, InitPhase, Method, Problem, SolverConfig};
use melinv::{MelFilterbank, MelSpectrogram, Signal, Stft, StftConfig, Storage};

use crate::args::{EvalArgs, InvertArgs, MelspecArgs, SolverArgs, SweepArgs};

/// Everything leaves the process through 32-bit files.
const STORAGE: Storage = Storage::F32;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(melinv::Error),
    Stall(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Stall(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Input(e) => write!(f, "{e}"),
            CliError::Stall(k) => write!(
                f,
                "gradient descent stalled after {k} iterations (no decreasing step found)"
            ),
        }
    }
}

impl From<melinv::Error> for CliError {
    fn from(e: melinv::Error) -> Self {
        CliError::Input(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn with_path<T>(path: &Path, r: melinv::Result<T>) -> Result<T> {
    r.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn melspec(args: &MelspecArgs) -> Result<()> {
    let signal: Signal<f64> = with_path(&args.input, read_wav(&args.input))?;
    let sr = signal.sample_rate();
    let cfg = StftConfig::new(args.win, args.hop)?;
    let stft = Stft::new(cfg);
    // Filter edges are stored as f32; build from the stored values so that
    // the file reproduces exactly.
    let f_min = args.fmin as f32 as f64;
    let f_max = args.fmax.unwrap_or(sr as f64 / 2.0) as f32 as f64;
    let bank = MelFilterbank::new(sr, args.win, args.mels, f_min, f_max)?;
    let mel = bank.apply_mel(&stft.stft(signal.samples())?.magnitude())?;
    let file = bank.to_file(&mel, &cfg)?;
    write_mel(&file, &args.output)?;

    let (mel, bank) = load_mel(&file)?;
    let check = scm_with_storage(signal.samples(), &mel, &bank, &stft, STORAGE)?;
    println!(
        "n_mels={} n_frames={} scm_db={check:?}",
        file.n_mels, file.n_frames
    );
    Ok(())
}

fn load_mel(file: &MelFile) -> Result<(MelSpectrogram<f64>, MelFilterbank<f64>)> {
    Ok((
        MelSpectrogram::from_file(file)?,
        MelFilterbank::for_file(file)?,
    ))
}

struct Loaded {
    mel: MelSpectrogram<f64>,
    bank: MelFilterbank<f64>,
    stft: Stft<f64>,
}

impl Loaded {
    fn read(path: &Path) -> Result<Self> {
        let file = with_path(path, read_mel(path))?;
        let (mel, bank) = load_mel(&file)?;
        let stft = Stft::new(file.stft_config()?);
        Ok(Self { mel, bank, stft })
    }

    fn problem(&self) -> Result<Problem<'_, f64>> {
        Ok(Problem::new(&self.mel, &self.bank, &self.stft)?)
    }
}

/// Solver configuration from the shared flags, rejecting flags the method
/// would ignore.
fn solver_config(s: &SolverArgs, lambda: Option<f64>, alpha: Option<f64>) -> Result<SolverConfig> {
    let method = s.method;
    if lambda.is_some() && !method.uses_lambda() {
        return Err(conflict(
            "--lambda",
            method,
            "only prop-mel and prop-full weigh a mel fidelity term",
        ));
    }
    if alpha.is_some() && !method.uses_alpha() {
        let hint = match method {
            Method::Gla => "GLA takes no momentum; use --method fgla",
            Method::CascadeGla => "cascade-gla takes no momentum; use --method cascade-fgla",
            _ => "gradient descent takes no momentum",
        };
        return Err(conflict("--alpha", method, hint));
    }
    if s.mu.is_some() && !method.uses_step_size() {
        return Err(conflict("--mu", method, "only gd takes a step size"));
    }
    if s.nnls_iters.is_some() && !method.uses_nnls() {
        return Err(conflict(
            "--nnls-iters",
            method,
            "only the cascade methods run NNLS",
        ));
    }
    if s.seed.is_some() && s.init != InitPhase::Random {
        return Err(CliError::Usage(
            "--seed only applies with --init random".into(),
        ));
    }
    let mut cfg = SolverConfig::new(method);
    cfg.iterations = s.iters;
    cfg.init = s.init;
    cfg.storage = STORAGE;
    if let Some(v) = lambda {
        cfg.lambda = v;
    }
    if let Some(v) = alpha {
        cfg.alpha = v;
    }
    if let Some(v) = s.seed {
        cfg.seed = v;
    }
    if let Some(v) = s.nnls_iters {
        cfg.nnls_iterations = v;
    }
    cfg.step_size = s.mu;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn conflict(flag: &str, method: Method, hint: &str) -> CliError {
    CliError::Usage(format!("{flag} conflicts with --method {method}: {hint}"))
}

pub fn invert(args: &InvertArgs) -> Result<()> {
    let cfg = solver_config(&args.solver, args.lambda, args.alpha)?;
    let loaded = Loaded::read(&args.mel)?;
    let out = run(&loaded.problem()?, &cfg)?;
    write_wav(&out.signal, &args.output)?;
    if let Some(path) = &args.trace {
        write_trace(&out.trace, path)?;
    }
    let last = out.trace.last().expect("trace always has an initial row");
    println!("scm_db={:?}", last.scm_db);
    if out.stalled {
        return Err(CliError::Stall(last.iteration));
    }
    Ok(())
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let loaded = Loaded::read(&args.mel)?;
    let estimate: Signal<f64> = with_path(&args.input, read_wav(&args.input))?;
    if estimate.sample_rate() != loaded.bank.sample_rate() {
        return Err(CliError::Usage(format!(
            "estimate is sampled at {} Hz, mel file at {} Hz",
            estimate.sample_rate(),
            loaded.bank.sample_rate()
        )));
    }
    let scm = scm_with_storage(
        estimate.samples(),
        &loaded.mel,
        &loaded.bank,
        &loaded.stft,
        STORAGE,
    )?;
    println!("scm_db={scm:?}");
    if let Some(path) = &args.reference {
        let reference: Signal<f64> = with_path(path, read_wav(path))?;
        if reference.sample_rate() != estimate.sample_rate() {
            return Err(CliError::Usage(format!(
                "reference is sampled at {} Hz, estimate at {} Hz",
                reference.sample_rate(),
                estimate.sample_rate()
            )));
        }
        let sc =
            spectral_convergence_fullband(estimate.samples(), reference.samples(), &loaded.stft)?;
        println!("sc_db={sc:?}");
    }
    Ok(())
}

fn parse_grid(flag: &str, list: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("{flag}: {s:?} is not a number")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("{flag}: empty grid")));
    }
    Ok(values)
}

struct GridPoint {
    cfg: SolverConfig,
    lambda: Option<f64>,
    alpha: Option<f64>,
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    if args.lambdas.is_none() && args.alphas.is_none() {
        return Err(CliError::Usage(
            "empty grid: give --lambdas and/or --alphas".into(),
        ));
    }
    let lambdas: Vec<Option<f64>> = match &args.lambdas {
        Some(l) => parse_grid("--lambdas", l)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let alphas: Vec<Option<f64>> = match &args.alphas {
        Some(a) => parse_grid("--alphas", a)?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut points = Vec::new();
    for &lambda in &lambdas {
        for &alpha in &alphas {
            let cfg = solver_config(&args.solver, lambda, alpha)?;
            points.push(GridPoint { cfg, lambda, alpha });
        }
    }
    let loaded = Loaded::read(&args.mel)?;
    let problem = loaded.problem()?;

    let results = Mutex::new(vec![f64::NAN; points.len()]);
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(points.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(point) = points.get(i) else { break };
                let scm = match run(&problem, &point.cfg) {
                    Ok(out) if !out.stalled => out.trace.last().map_or(f64::NAN, |r| r.scm_db),
                    Ok(_) => {
                        eprintln!("melinv: grid point {} stalled", i + 1);
                        f64::NAN
                    }
                    Err(e) => {
                        eprintln!("melinv: grid point {} failed: {e}", i + 1);
                        f64::NAN
                    }
                };
                results
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = scm;
            });
        }
    });
    let results = results.into_inner().expect("workers have finished");

    let sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    writeln!(w, "method,lambda,alpha,final_scm_db")?;
    let cell = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for (point, scm) in points.iter().zip(&results) {
        let method = point.cfg.method;
        // Report the value actually in effect, blank when the method has no
        // such parameter.
        let lambda = method
            .uses_lambda()
            .then_some(point.lambda.unwrap_or(point.cfg.lambda));
        let alpha = method
            .uses_alpha()
            .then_some(point.alpha.unwrap_or(point.cfg.alpha));
        writeln!(w, "{method},{},{},{scm}", cell(lambda), cell(alpha))?;
    }
    w.flush()?;
    Ok(())
}
