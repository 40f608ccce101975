use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use cmpdp::eval::{eval_dataset, solve_with, Method, SolveContext};
use cmpdp::graph::{
    generate, read_graph_file, write_graph_file, write_solution, GenSpec, GraphModel,
};
use cmpdp::nn::{load_params_file, save_params_file};
use cmpdp::solvers::emit_lp;
use cmpdp::train::{train, write_metrics_csv, TrainConfig, TrainOutcome};
use cmpdp::CmpParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{graphs_only, load_dataset};
use crate::{usage, AblateParam, Command, Failure, ModelKind};

pub fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            model,
            count,
            n,
            n_min,
            n_max,
            p,
            attach,
            ring_degree,
            beta,
            a,
            seed,
            out,
        } => {
            let (lo, hi) = n.map_or((n_min, n_max), |n| (n, n));
            if lo == 0 || lo > hi {
                return Err(usage(format!("bad vertex range {lo}..={hi}")));
            }
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..count {
                let n = rng.gen_range(lo..=hi);
                let model = match model {
                    ModelKind::Er => GraphModel::ErdosRenyi { n, p },
                    ModelKind::Ba => GraphModel::BarabasiAlbert { n, attach },
                    ModelKind::Ws => GraphModel::WattsStrogatz {
                        n,
                        k: ring_degree,
                        beta,
                    },
                    ModelKind::Special => GraphModel::Special { n, a },
                };
                let spec = GenSpec::new(model, rng.gen());
                spec.validate().map_err(|e| usage(e.to_string()))?;
                let g = generate(&spec)?;
                write_graph_file(&g, out.join(format!("g{i:04}.col")))?;
            }
            println!("wrote {count} graphs to {}", out.display());
            Ok(())
        }

        Command::Train {
            data,
            cfg,
            epochs,
            mixed,
            out,
            metrics,
        } => {
            let mut run_cfg = cfg.resolve()?;
            if let Some(e) = epochs {
                run_cfg.train.total_epochs = e;
            }
            run_cfg.train.mixed |= mixed;
            let dataset = graphs_only(load_dataset(&data)?);
            let outcome = train::<f64>(&dataset, &run_cfg.train)?;
            save_params_file(&outcome.params, &out)?;
            if let Some(path) = metrics {
                write_metrics_csv(&outcome.metrics, create(&path)?)?;
            }
            report_training(&outcome);
            Ok(())
        }

        Command::Solve {
            graph,
            method,
            cfg,
            weights,
            out,
        } => {
            let run_cfg = cfg.resolve()?;
            let method: Method = method.parse().map_err(usage)?;
            let params = load_weights(method.needs_params(), weights.as_deref())?;
            let g =
                read_graph_file(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let ctx = context(&run_cfg, params.as_ref());
            let set = solve_with(&g, method, &ctx)?;
            let out = out.unwrap_or_else(|| {
                let mut p = graph.clone().into_os_string();
                p.push(".sol");
                PathBuf::from(p)
            });
            fs::write(&out, write_solution(&set))
                .with_context(|| format!("writing {}", out.display()))?;
            println!("{} {} size {}", ctx.problem, method, set.len());
            Ok(())
        }

        Command::Eval {
            data,
            methods,
            cfg,
            weights,
            out,
            summary,
        } => {
            let run_cfg = cfg.resolve()?;
            let methods: Vec<Method> = methods
                .iter()
                .map(|m| m.trim().parse())
                .collect::<Result<_, String>>()
                .map_err(usage)?;
            if methods.is_empty() {
                return Err(usage("no methods given"));
            }
            let needs = methods.iter().any(|m| m.needs_params());
            let params = load_weights(needs, weights.as_deref())?;
            let dataset = load_dataset(&data)?;
            let report = eval_dataset(&dataset, &methods, &context(&run_cfg, params.as_ref()))?;
            report.write_rows_csv(create(&out)?)?;
            if let Some(path) = summary {
                report.write_summary_csv(create(&path)?)?;
            }
            report.write_summary_csv(std::io::stdout().lock())?;
            Ok(())
        }

        Command::Consistency {
            data,
            cfg,
            epochs,
            out,
        } => {
            let mut run_cfg = cfg.resolve()?;
            if let Some(e) = epochs {
                run_cfg.train.total_epochs = e;
            }
            let dataset = graphs_only(load_dataset(&data)?);
            let outcome = train::<f64>(&dataset, &run_cfg.train)?;
            write_consistency_curve(&outcome, &run_cfg.train, create(&out)?)?;
            report_training(&outcome);
            Ok(())
        }

        Command::EmitLp {
            graph,
            problem,
            out,
        } => {
            let g =
                read_graph_file(&graph).with_context(|| format!("reading {}", graph.display()))?;
            let text = emit_lp(&g, problem);
            match out {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
            Ok(())
        }

        Command::Ablate {
            data,
            param,
            values,
            cfg,
            epochs,
            test,
            out_dir,
        } => {
            let base = cfg.resolve()?;
            let dataset = graphs_only(load_dataset(&data)?);
            let test_set = test.as_deref().map(load_dataset).transpose()?;
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let name = match param {
                AblateParam::K => "K",
                AblateParam::L => "L",
                AblateParam::D => "D",
            };
            let mut table = create(&out_dir.join("ablation.csv"))?;
            writeln!(
                table,
                "param,value,val_loss,val_pair_accuracy,consistency,mean_ratio"
            )?;
            for &value in &values {
                let mut run_cfg = base.clone();
                if let Some(e) = epochs {
                    run_cfg.train.total_epochs = e;
                }
                let key = name.to_ascii_lowercase();
                run_cfg
                    .set(&key, &value.to_string())
                    .map_err(|e| usage(e.to_string()))?;
                run_cfg.validate().map_err(|e| usage(e.to_string()))?;
                let outcome = train::<f64>(&dataset, &run_cfg.train)?;
                let tag = format!("{name}{value}");
                write_metrics_csv(
                    &outcome.metrics,
                    create(&out_dir.join(format!("metrics_{tag}.csv")))?,
                )?;
                save_params_file(&outcome.params, out_dir.join(format!("weights_{tag}.bin")))?;
                let ratio = match &test_set {
                    Some(graphs) => {
                        let report = eval_dataset(
                            graphs,
                            &[Method::Learned],
                            &context(&run_cfg, Some(&outcome.params)),
                        )?;
                        format!(
                            "{:.6}",
                            report
                                .summary_for(Method::Learned)
                                .map_or(f64::NAN, |s| s.mean)
                        )
                    }
                    None => String::new(),
                };
                let last = outcome.metrics.last();
                writeln!(
                    table,
                    "{name},{value},{:.6},{:.6},{:.6},{ratio}",
                    last.map_or(f64::NAN, |r| r.val_loss),
                    last.map_or(f64::NAN, |r| r.val_pair_accuracy),
                    last.map_or(f64::NAN, |r| r.consistency),
                )?;
                println!("{tag}: done");
            }
            table.flush()?;
            Ok(())
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn load_weights(needed: bool, path: Option<&Path>) -> Result<Option<CmpParams>, Failure> {
    match (needed, path) {
        (true, None) => Err(usage("the learned methods need --weights")),
        (_, Some(p)) => Ok(Some(
            load_params_file(p, None).with_context(|| format!("loading {}", p.display()))?,
        )),
        (false, None) => Ok(None),
    }
}

fn context<'a>(
    cfg: &cmpdp::config::RunConfig,
    params: Option<&'a CmpParams>,
) -> SolveContext<'a, f64> {
    SolveContext {
        problem: cfg.train.problem,
        params,
        m: cfg.train.m,
        local_search: cfg.local_search_limit(),
        exact_budget: cfg.exact_budget,
        seed: cfg.train.seed,
    }
}

fn report_training(outcome: &TrainOutcome<f64>) {
    if let Some(last) = outcome.metrics.last() {
        println!(
            "epochs {} val_loss {:.4} val_acc {:.3} consistency {:.3} (selected epoch {})",
            last.epoch,
            last.val_loss,
            last.val_pair_accuracy,
            last.consistency,
            outcome.selected_epoch
        );
    }
}

/// One row per buffer iteration: the consistency measured when that buffer
/// was built, then the value after the final epoch.
fn write_consistency_curve<W: Write>(
    outcome: &TrainOutcome<f64>,
    cfg: &TrainConfig,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "iteration,epoch,consistency")?;
    let mut last_index = None;
    for row in &outcome.metrics {
        let boundary =
            row.epoch == 0 || (row.epoch > 1 && (row.epoch - 1) % cfg.epochs_per_refresh == 0);
        if boundary && last_index != Some(row.refresh_index) {
            let epoch = row.epoch.saturating_sub(1);
            writeln!(w, "{},{},{:.6}", row.refresh_index, epoch, row.consistency)?;
            last_index = Some(row.refresh_index);
        }
    }
    if let Some(last) = outcome.metrics.last() {
        writeln!(
            w,
            "{},{},{:.6}",
            last.refresh_index + 1,
            last.epoch,
            last.consistency
        )?;
    }
    w.flush()
}
