//! One function per subcommand. Each resolves its inputs, writes its outputs
//! and the resolved `experiment.json` into the output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use monkeyzipf::budget::MemoryBudget;
use monkeyzipf::corpus::{build_corpus_table, decode, tokenize, TextSelection, TokenizerConfig};
use monkeyzipf::ensemble::{enumerate_cutoff_with_budget, top_k_with_budget};
use monkeyzipf::keyboard::DEFAULT_BETA_TOLERANCE;
use monkeyzipf::output::Meta;
use monkeyzipf::rng::PRNG_ID;
use monkeyzipf::spacings::parse_spacings;
use monkeyzipf::stats::{
    fit_tail_slope, length_law_check, normality_report_with, tail_mass, write_length_census, NormalityOptions,
};
use monkeyzipf::twitter::{lnre_summary, run_experiment_with_budget, write_ranked_words, write_summary};
use monkeyzipf::{
    log_moments, make_keyboard, make_spacings, mean_log_letter, shao_hahn_statistic, solve_beta, Error, Keyboard,
    RankFrequencyTable, Result, SpacingDistribution, TwitterConfig,
};

use crate::experiment::{ExperimentSpec, KeyboardSource, KeyboardSpec, Params};
use crate::{Cli, Command, Dist, KeyboardArgs};

pub fn run(cli: &Cli) -> Result<()> {
    let budget = MemoryBudget::from_env()?;
    let mut ctx = Context { seed: cli.seed, out: cli.out.clone(), budget, keyboards: Vec::new() };
    let params = match &cli.command {
        Command::Keyboard(args) => keyboard(&mut ctx, args)?,
        Command::Figure2 { size, s, k, fit_lo, fit_hi } => figure2(&mut ctx, *size, *s, *k, (*fit_lo, *fit_hi))?,
        Command::Figure3 { keyboard, n, m, band_lo, band_hi, centering } => {
            figure3(&mut ctx, keyboard, *n, *m, (*band_lo, *band_hi), *centering)?
        }
        Command::Convergence { sizes, dists, s } => convergence(&mut ctx, sizes, dists, *s)?,
        Command::Topk { keyboard, k } => topk(&mut ctx, keyboard, *k)?,
        Command::Cutoff { keyboard, n } => cutoff(&mut ctx, keyboard, *n)?,
        Command::Twitter { keyboard, n, messages, shards } => twitter(&mut ctx, keyboard, *n, *messages, *shards)?,
        Command::Corpus { input, skip_lines, start_marker, end_marker, keep_case, split_apostrophes, fit_lo, fit_hi } => {
            let selection =
                TextSelection { skip_lines: *skip_lines, start_marker: start_marker.clone(), end_marker: end_marker.clone() };
            let config = TokenizerConfig { fold_case: !keep_case, internal_apostrophes: !split_apostrophes };
            corpus(&mut ctx, input, selection, config, (*fit_lo, *fit_hi))?
        }
    };
    let spec = ExperimentSpec {
        version: monkeyzipf::VERSION.to_string(),
        prng: PRNG_ID.to_string(),
        seed: ctx.seed,
        out_dir: ctx.out.clone(),
        memory_budget: ctx.budget.bytes(),
        keyboards: ctx.keyboards,
        params,
    };
    let json = serde_json::to_string_pretty(&spec).map_err(|e| Error::Io(e.into()))?;
    fs::write(ctx.out.join("experiment.json"), json + "\n")?;
    Ok(())
}

struct Context {
    seed: u64,
    out: PathBuf,
    budget: MemoryBudget,
    keyboards: Vec<KeyboardSpec>,
}

impl Context {
    /// Creates the output file `name`, and the directory if needed.
    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(&self.out)?;
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }

    fn write(&self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn generated(&mut self, dist: Dist, size: usize, s: f64) -> Result<Keyboard> {
        let spacings = make_spacings(&dist.distribution(), size, self.seed)?;
        let kb = make_keyboard(&spacings, s)?;
        let source = KeyboardSource::Generated { distribution: dist.distribution().name().into(), size, seed: self.seed };
        self.record(source, &kb);
        Ok(kb)
    }

    fn resolve(&mut self, args: &KeyboardArgs) -> Result<Keyboard> {
        if let Some(path) = &args.keyboard_file {
            let kb = Keyboard::parse(&read_text(path)?)?;
            self.record(KeyboardSource::File { path: path.clone() }, &kb);
            Ok(kb)
        } else if let Some(path) = &args.spacings_file {
            let values = parse_spacings(&read_text(path)?)?;
            let k = values.len();
            let spacings = make_spacings(&SpacingDistribution::explicit(values)?, k, self.seed)?;
            let kb = make_keyboard(&spacings, args.s)?;
            self.record(KeyboardSource::Spacings { path: path.clone() }, &kb);
            Ok(kb)
        } else {
            self.generated(args.dist, args.size, args.s)
        }
    }

    fn record(&mut self, source: KeyboardSource, kb: &Keyboard) {
        self.keyboards.push(KeyboardSpec { source, space: kb.space(), size: kb.size(), fingerprint: kb.fingerprint() });
    }

    fn meta(&self, kb: &Keyboard) -> Meta {
        Meta::new().with("seed", self.seed).with("keyboard", kb.fingerprint()).with("K", kb.size()).with("s", kb.space())
    }
}

fn read_text(path: &Path) -> Result<String> {
    let bytes =
        fs::read(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    Ok(decode(&bytes)?.to_string())
}

fn keyboard(ctx: &mut Context, args: &KeyboardArgs) -> Result<Params> {
    let kb = ctx.resolve(args)?;
    let beta = solve_beta(&kb, DEFAULT_BETA_TOLERANCE)?;
    let moments = log_moments(&kb);
    fs::create_dir_all(&ctx.out)?;
    fs::write(ctx.out.join("keyboard.txt"), kb.to_text())?;
    println!("fingerprint {}", kb.fingerprint());
    println!("beta {:.6}", beta.beta);
    println!("mean_log_letter {:.6}", mean_log_letter(&kb));
    println!("mu1 {:.6}", moments.mu1);
    println!("sigma1_sq {:.6}", moments.sigma1_sq);
    Ok(Params::Keyboard)
}

fn figure2(ctx: &mut Context, size: usize, s: f64, k: usize, fit: (usize, usize)) -> Result<Params> {
    let keyboards = Dist::ALL.iter().map(|&d| ctx.generated(d, size, s)).collect::<Result<Vec<_>>>()?;
    // The four enumerations are independent; run them side by side.
    let budget = MemoryBudget::new(ctx.budget.bytes() / Dist::ALL.len() as u64);
    let tops = std::thread::scope(|scope| {
        let handles: Vec<_> = keyboards.iter().map(|kb| scope.spawn(|| top_k_with_budget(kb, k, &budget))).collect();
        handles.into_iter().map(|h| h.join().expect("enumeration thread panicked")).collect::<Result<Vec<_>>>()
    })?;

    let mut fits = ctx.create("figure2_fits.csv")?;
    Meta::new().with("seed", ctx.seed).with("K", size).with("s", s).write_header(&mut fits)?;
    writeln!(fits, "dist,keyboard,beta,slope,intercept,r_squared,fit_lo,fit_hi,slope_plus_beta")?;
    for ((dist, kb), top) in Dist::ALL.iter().zip(&keyboards).zip(&tops) {
        let name = dist.distribution().name();
        let meta = ctx.meta(kb).with("dist", name);
        ctx.write(&format!("figure2_{name}.csv"), |w| top.write_csv(w, &meta))?;
        let beta = solve_beta(kb, DEFAULT_BETA_TOLERANCE)?.beta;
        let fit = fit_tail_slope(&RankFrequencyTable::from_ranked(top)?, fit.0, fit.1)?;
        writeln!(
            fits,
            "{name},{},{beta},{},{},{},{},{},{}",
            kb.fingerprint(),
            fit.slope,
            fit.intercept,
            fit.r_squared,
            fit.fit_range.0,
            fit.fit_range.1,
            fit.slope + beta
        )?;
        println!("{name:<10} beta {beta:.4}  slope {:.4}  slope+beta {:+.4}", fit.slope, fit.slope + beta);
    }
    fits.flush()?;
    Ok(Params::Figure2 { k, fit_range: fit })
}

fn figure3(
    ctx: &mut Context,
    args: &KeyboardArgs,
    n: usize,
    m: usize,
    band: (f64, f64),
    centering: crate::CenteringArg,
) -> Result<Params> {
    let kb = ctx.resolve(args)?;
    let cut = enumerate_cutoff_with_budget(&kb, n, &ctx.budget)?;
    let options = NormalityOptions { centering: centering.centering(), ..NormalityOptions::default() };
    let report = normality_report_with(&cut, &kb, band, &options)?;
    let mass = tail_mass(&cut, m)?;
    let table = RankFrequencyTable::from_cutoff(&cut)?;
    let meta = ctx.meta(&kb).with("n", n);
    ctx.write("figure3_ranks.csv", |w| table.write_csv(w, &meta))?;
    let qmeta = meta.clone().with("centering", format!("{centering:?}")).with("band", format!("{}-{}", band.0, band.1));
    ctx.write("figure3_quantiles.csv", |w| report.write_csv(w, &qmeta))?;
    ctx.write("figure3_lengths.csv", |w| write_length_census(&length_law_check(&cut), w, &meta))?;
    println!("words {}", cut.len());
    println!("tail_mass({m}) {mass:.4}");
    println!("central_deviation({}-{}) {:.4}", band.0, band.1, report.central_deviation);
    Ok(Params::Figure3 { n, m, band, centering: format!("{centering:?}") })
}

fn convergence(ctx: &mut Context, sizes: &[usize], dists: &[Dist], s: f64) -> Result<Params> {
    let mut rows = Vec::new();
    for &dist in dists {
        for &size in sizes {
            let spacings = make_spacings(&dist.distribution(), size, ctx.seed)?;
            let kb = make_keyboard(&spacings, s)?;
            let beta = solve_beta(&kb, DEFAULT_BETA_TOLERANCE)?.beta;
            rows.push((dist.distribution().name(), size, mean_log_letter(&kb), beta, shao_hahn_statistic(&spacings)));
        }
    }
    ctx.write("convergence.csv", |w| {
        Meta::new().with("seed", ctx.seed).with("s", s).write_header(w)?;
        writeln!(w, "dist,K,mean_log_letter,beta,shao_hahn")?;
        for (name, size, m, beta, sh) in &rows {
            writeln!(w, "{name},{size},{m},{beta},{sh}")?;
        }
        Ok(())
    })?;
    for (name, size, m, beta, sh) in &rows {
        println!("{name:<10} K {size:>5}  mean_log_letter {m:.4}  -beta {:.4}  shao_hahn {sh:.4}", -beta);
    }
    Ok(Params::Convergence {
        sizes: sizes.to_vec(),
        distributions: dists.iter().map(|d| d.distribution().name().to_string()).collect(),
        space: s,
    })
}

fn topk(ctx: &mut Context, args: &KeyboardArgs, k: usize) -> Result<Params> {
    let kb = ctx.resolve(args)?;
    let top = top_k_with_budget(&kb, k, &ctx.budget)?;
    let meta = ctx.meta(&kb);
    ctx.write("topk.csv", |w| top.write_csv(w, &meta))?;
    println!("words {}", top.len());
    Ok(Params::Topk { k })
}

fn cutoff(ctx: &mut Context, args: &KeyboardArgs, n: usize) -> Result<Params> {
    let kb = ctx.resolve(args)?;
    let cut = enumerate_cutoff_with_budget(&kb, n, &ctx.budget)?;
    let table = RankFrequencyTable::from_cutoff(&cut)?;
    let meta = ctx.meta(&kb).with("n", n);
    ctx.write("cutoff_ranks.csv", |w| table.write_csv(w, &meta))?;
    ctx.write("cutoff_lengths.csv", |w| write_length_census(&length_law_check(&cut), w, &meta))?;
    println!("words {}", cut.len());
    Ok(Params::Cutoff { n })
}

fn twitter(ctx: &mut Context, args: &KeyboardArgs, n: usize, messages: u64, shards: usize) -> Result<Params> {
    let kb = ctx.resolve(args)?;
    let cfg = TwitterConfig::new(kb.clone(), n + 1, messages, ctx.seed)?.with_shards(shards)?;
    let res = run_experiment_with_budget(&cfg, &ctx.budget)?;
    // The population comparison needs the whole cutoff ensemble; skip it
    // when that does not fit.
    let lnre = match enumerate_cutoff_with_budget(&kb, n, &ctx.budget) {
        Ok(cut) => Some(lnre_summary(&res, &cut)?),
        Err(Error::BudgetExceeded { .. }) => {
            eprintln!("note: population of words up to {n} letters exceeds the memory budget; skipping coverage");
            None
        }
        Err(e) => return Err(e),
    };
    let meta = ctx.meta(&kb).with("n", n).with("messages", messages).with("shards", shards);
    ctx.write("twitter_words.csv", |w| write_ranked_words(&res, w, &meta))?;
    ctx.write("twitter_summary.json", |w| write_summary(&res, lnre.as_ref(), w))?;
    println!("total_words {}", res.total_words);
    println!("discarded_nonwords {}", res.discarded_nonwords);
    println!("distinct_words {}", res.distinct_words);
    if let Some(l) = lnre {
        println!("zero_class {}", l.zero_class);
        println!("mass_covered {:.4}", l.mass_covered);
    }
    Ok(Params::Twitter { n, messages, shards })
}

fn corpus(
    ctx: &mut Context,
    input: &Path,
    selection: TextSelection,
    config: TokenizerConfig,
    fit: (usize, usize),
) -> Result<Params> {
    let text = read_text(input)?;
    let name = input.file_name().map_or_else(|| input.display().to_string(), |n| n.to_string_lossy().into_owned());
    let table = build_corpus_table(tokenize(selection.apply(&text), config), &name)?;
    let meta = Meta::new().with("source_name", &name);
    ctx.write("corpus_types.csv", |w| table.write_types_csv(w, &meta))?;
    ctx.write("corpus_ranks.csv", |w| table.table.write_csv(w, &meta))?;
    println!("tokens {}", table.token_count);
    println!("types {}", table.type_count);
    if table.table.len() >= fit.1 {
        let f = fit_tail_slope(&table.table, fit.0, fit.1)?;
        println!("slope[{}..{}] {:.4}", fit.0, fit.1, f.slope);
    } else {
        println!("slope skipped: only {} types", table.table.len());
    }
    Ok(Params::Corpus {
        input: input.to_path_buf(),
        skip_lines: selection.skip_lines,
        start_marker: selection.start_marker,
        end_marker: selection.end_marker,
        fold_case: config.fold_case,
        internal_apostrophes: config.internal_apostrophes,
        fit_range: fit,
    })
}
