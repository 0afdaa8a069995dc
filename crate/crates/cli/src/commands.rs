use std::path::{Path, PathBuf};

use qrlsim_core::analytics::{analytic_error_rates, grover_success_estimate, CLASSICAL_SUCCESS, RANDOM_SUCCESS};
use qrlsim_core::circuit::Gate;
use qrlsim_core::experiments::*;
use qrlsim_core::fmps::FmpsState;
use qrlsim_core::grid::GridSpec;
use qrlsim_core::logical::{logical_dm, DvState};
use qrlsim_core::qrl::*;
use qrlsim_core::states::epsilon_from_db;
use qrlsim_core::svd::SvdPolicy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{demo_input, Config};
use crate::error::{CliError, CliResult};
use crate::output::*;

pub const TABLE_FILE: &str = "angle_table.toml";

/// `--table`, then the config's `table`, then `angle_table.toml` in the working directory.
pub fn resolve_table(flag: Option<&Path>, cfg: &Config) -> PathBuf {
    flag.map(Path::to_path_buf).or_else(|| cfg.table.clone()).unwrap_or_else(|| PathBuf::from(TABLE_FILE))
}

pub fn load_table(path: &Path) -> CliResult<AngleTable> {
    if !path.exists() {
        return Err(CliError::Missing(format!("angle table {} not found; run `qrlsim calibrate` first", path.display())));
    }
    AngleTable::load(path).map_err(|e| CliError::Missing(format!("unreadable angle table: {e}")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenRow {
    pub gate: String,
    pub screened: usize,
    pub first_program: String,
    pub noise_gain: f64,
}

pub fn calibrate(cfg: &Config, out: &Path, dry_run: bool) -> CliResult<RunManifest> {
    cfg.validate()?;
    let started = now();
    let mut dir = RunDir::create(out)?;
    let c = &cfg.calibration;
    let gates = cfg.gates()?;
    if dry_run {
        let mut rows = Vec::new();
        for &g in &gates {
            let s = screen_candidates(g, &c.candidates)?;
            rows.push(ScreenRow {
                gate: g.to_string(),
                screened: s.len(),
                first_program: s.first().map_or("none".into(), |p| p.0.to_string()),
                noise_gain: s.first().map_or(f64::NAN, |p| p.1),
            });
        }
        dir.write_csv("screening.csv", &rows)?;
        return dir.finish("calibrate", cfg, started, true);
    }
    let settings = CalibrationSettings {
        squeezing_db: c.squeezing_db,
        grid: GridSpec::new(c.grid_points)?,
        policy: SvdPolicy { chi_max: c.chi_max, ..SvdPolicy::default() },
        shots_per_input: c.shots_per_input,
        threshold: c.threshold,
        seed: cfg.seed,
        max_simulated: c.max_simulated,
    };
    let (table, reports) = calibrate_table(&gates, &c.candidates, &settings)?;
    let text = table.to_text()?;
    dir.write_text(TABLE_FILE, &text)?;
    let results = CalibrationResults {
        manifest: MANIFEST.into(),
        table: TABLE_FILE.into(),
        gates: reports
            .iter()
            .map(|r| CalibrationRow {
                gate: r.gate.to_string(),
                program: r.program.to_string(),
                worst_fidelity: r.worst_fidelity,
                screened: r.screened,
                simulated: r.simulated.len(),
            })
            .collect(),
        inputs: reports
            .iter()
            .flat_map(|r| r.per_input.iter().map(|i| InputRow { gate: r.gate.to_string(), input: i.input.clone(), fidelity: i.fidelity }))
            .collect(),
    };
    for r in &results.gates {
        eprintln!("{:>5} {}  worst fidelity {:.4}", r.gate, r.program, r.worst_fidelity);
    }
    dir.write_json(RESULTS_JSON, &results)?;
    dir.write_csv(RESULTS_CSV, &results.gates)?;
    dir.finish("calibrate", cfg, started, false)
}

fn schedule_row(label: String, s: &QrlSchedule) -> ScheduleRow {
    ScheduleRow { label, width: s.width, depth: s.depth(), bell_pairs: s.bell_pairs(), magic_pairs: s.magic_pairs(), modes: s.physical_modes() }
}

pub fn rb(cfg: &Config, table: &Path, out: &Path, dry_run: bool) -> CliResult<RunManifest> {
    cfg.validate()?;
    let table = load_table(table)?;
    let started = now();
    let mut dir = RunDir::create(out)?;
    let sec = &cfg.rb;
    if dry_run {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let rows = sec
            .depths
            .iter()
            .map(|&m| {
                let c = random_clifford_circuit(sec.n_qubits, m, &mut rng);
                Ok(schedule_row(format!("rb depth {m}"), &compile(&c, sec.n_qubits)?))
            })
            .collect::<CliResult<Vec<_>>>()?;
        dir.write_csv("schedules.csv", &rows)?;
        return dir.finish("rb", cfg, started, true);
    }
    let mut results = RbResults { manifest: MANIFEST.into(), points: Vec::new(), fits: Vec::new(), curve: Vec::new(), samples: Vec::new() };
    for (k, &db) in sec.squeezing_db.iter().enumerate() {
        let rc = sec.rb_config(db, task_seed(cfg.seed, 100, k as u64));
        eprintln!("rb at {db} dB: {} depths x {} sequences", rc.depths.len(), rc.sequences_per_depth);
        let run = run_rb(&rc, &table)?;
        let purity = mean_purity(&run.samples);
        let f = &run.fit;
        for (p, (_, pur)) in run.points.iter().zip(&purity) {
            results.points.push(RbRow {
                squeezing_db: db,
                depth: p.depth,
                mean_fidelity: p.mean_fidelity,
                std_error: p.std_error,
                n_samples: p.n_samples,
                fit_fidelity: f.a * f.p.powi(p.depth as i32) + f.b,
                mean_purity: *pur,
            });
        }
        let a = analytic_error_rates(db)?;
        let free = run.fit_free_b.as_ref();
        results.fits.push(FitRow {
            squeezing_db: db,
            a: f.a,
            p: f.p,
            b: f.b,
            r: f.r,
            sigma_r: f.sigma_r(),
            free_b: free.map(|g| g.b),
            free_b_sigma: free.map(|g| g.covariance[2][2].max(0.0).sqrt()),
            r_low: a.r_low,
            r_high: a.r_high,
            r_mean: a.r_mean,
            normalized_residual: (f.r - a.r_mean) / f.sigma_r(),
            flag: f.flag.clone(),
        });
        eprintln!("  r = {:.5} ± {:.5} (analytic mean {:.5})", f.r, f.sigma_r(), a.r_mean);
        results.samples.extend(run.samples.iter().map(|s| SampleRow {
            squeezing_db: db,
            depth: s.depth,
            sequence: s.sequence,
            fidelity: s.fidelity,
            purity: s.purity,
        }));
    }
    for s in sec.curve() {
        let a = analytic_error_rates(s)?;
        results.curve.push(CurveRow { squeezing_db: s, r_low: a.r_low, r_high: a.r_high, r_mean: a.r_mean });
    }
    dir.write_json(RESULTS_JSON, &results)?;
    dir.write_csv(RESULTS_CSV, &results.points)?;
    dir.write_csv("fits.csv", &results.fits)?;
    dir.write_csv("curve.csv", &results.curve)?;
    dir.write_csv("samples.csv", &results.samples)?;
    dir.finish("rb", cfg, started, false)
}

pub fn grover(cfg: &Config, table: &Path, out: &Path, dry_run: bool) -> CliResult<RunManifest> {
    cfg.validate()?;
    let table = load_table(table)?;
    let started = now();
    let mut dir = RunDir::create(out)?;
    let sec = &cfg.grover;
    let schedules = sec
        .oracles
        .iter()
        .map(|&o| Ok((o, compile(&grover_circuit(o), GROVER_QUBITS)?)))
        .collect::<CliResult<Vec<_>>>()?;
    if dry_run {
        let rows: Vec<ScheduleRow> = schedules.iter().map(|(o, s)| schedule_row(format!("grover {o}"), s)).collect();
        dir.write_csv("schedules.csv", &rows)?;
        return dir.finish("grover", cfg, started, true);
    }
    let mut results = GroverResults { manifest: MANIFEST.into(), rows: Vec::new(), shots: Vec::new() };
    for (k, &db) in sec.squeezing_db.iter().enumerate() {
        let r_mean = analytic_error_rates(db)?.r_mean;
        let mut pooled = Vec::new();
        let (mut dsum, mut psum, mut msum) = (0.0, 0.0, 0.0);
        for (j, (oracle, s)) in schedules.iter().enumerate() {
            let gc = GroverConfig {
                oracle: *oracle,
                squeezing_db: db,
                shots: sec.shots,
                seed: task_seed(cfg.seed, 200 + j as u64, k as u64),
                grid_points: sec.grid_points,
                chi_max: sec.chi_max,
            };
            eprintln!("grover oracle {oracle} at {db} dB: {} shots", sec.shots);
            let run = run_grover(&gc, &table)?;
            let n = run.shots.len();
            results.rows.push(GroverRow {
                oracle: oracle.to_string(),
                squeezing_db: db,
                shots: n,
                successes: run.successes(),
                success_prob: run.success_prob,
                ci_low: run.ci95.0,
                ci_high: run.ci95.1,
                analytic_estimate: grover_success_estimate(r_mean, GROVER_QUBITS, s.depth(), 2, 1.0)?,
                random_line: RANDOM_SUCCESS,
                classical_line: CLASSICAL_SUCCESS,
                depth: s.depth() as f64,
                bell_pairs: s.bell_pairs() as f64,
                magic_pairs: s.magic_pairs(),
                modes: s.physical_modes() as f64,
            });
            eprintln!("  success {:.3} [{:.3}, {:.3}]", run.success_prob, run.ci95.0, run.ci95.1);
            dsum += (s.depth() * n) as f64;
            psum += (s.bell_pairs() * n) as f64;
            msum += grover_success_estimate(r_mean, GROVER_QUBITS, s.depth(), 2, 1.0)? * n as f64;
            results.shots.extend(run.shots.iter().enumerate().map(|(i, r)| ShotRow {
                oracle: oracle.to_string(),
                squeezing_db: db,
                shot: i,
                outcome: r.outcome.clone(),
                gadgets: r.gadgets,
                x_syndromes: r.x_syndromes,
                z_syndromes: r.z_syndromes,
                discarded_weight: r.discarded_weight,
                success: r.success,
            }));
            pooled.extend(run.shots);
        }
        let run = summarize_shots(pooled);
        let n = run.shots.len() as f64;
        results.rows.push(GroverRow {
            oracle: "pooled".into(),
            squeezing_db: db,
            shots: run.shots.len(),
            successes: run.successes(),
            success_prob: run.success_prob,
            ci_low: run.ci95.0,
            ci_high: run.ci95.1,
            analytic_estimate: msum / n,
            random_line: RANDOM_SUCCESS,
            classical_line: CLASSICAL_SUCCESS,
            depth: dsum / n,
            bell_pairs: psum / n,
            magic_pairs: schedules[0].1.magic_pairs(),
            modes: 2.0 * psum / n,
        });
    }
    dir.write_json(RESULTS_JSON, &results)?;
    dir.write_csv(RESULTS_CSV, &results.rows)?;
    dir.write_csv("shots.csv", &results.shots)?;
    dir.finish("grover", cfg, started, false)
}

/// One identity gadget on a chosen input, with the decoding spelled out.
pub fn decode_demo(cfg: &Config, table: Option<&Path>, out: &Path) -> CliResult<RunManifest> {
    cfg.validate()?;
    let started = now();
    let mut dir = RunDir::create(out)?;
    let d = &cfg.demo;
    let table = match table {
        Some(p) => load_table(p)?,
        None => AngleTable::analytic_default(),
    };
    let program = table.single(qrlsim_core::circuit::GateLabel::I)?;
    let input = demo_input(&d.input)?;
    let phys = Physical { squeezing_db: d.squeezing_db, grid_points: d.grid_points, chi_max: SvdPolicy::default().chi_max };
    let prep = phys.prepare(false)?;
    let eps = epsilon_from_db(d.squeezing_db)?;
    let mut st = FmpsState::product(prep.grid, vec![input.build::<f64>(eps, prep.grid)?], prep.policy, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let out_g = execute_single_gadget(&mut st, 0, &program, &prep.pairs.plain, &mut rng)?;
    let mut frame = PauliFrame::identity(1);
    frame.absorb_syndrome(0, &out_g.syndrome)?;
    frame.update_clifford(&Gate::one(qrlsim_core::circuit::GateLabel::I, 0))?;
    let ideal = DvState::from_amplitudes(input.amplitudes().to_vec())?;
    let rho = logical_dm(&st, &[0])?;
    let res = DemoResults {
        manifest: MANIFEST.into(),
        squeezing_db: d.squeezing_db,
        input: d.input.clone(),
        program: Program::Single(program).to_string(),
        m_a: out_g.m_a,
        m_b: out_g.m_b,
        s1: out_g.syndrome.raw.0,
        s2: out_g.syndrome.raw.1,
        x_bit: out_g.syndrome.x_bit,
        z_bit: out_g.syndrome.z_bit,
        fidelity_before: rho.fidelity(&ideal)?,
        fidelity_after: rho.conjugate_pauli(&frame.x, &frame.z).fidelity(&ideal)?,
    };
    println!("input |{}> at {} dB, identity program {}", res.input, res.squeezing_db, res.program);
    println!("homodyne outcomes m_a = {:.6}, m_b = {:.6}", res.m_a, res.m_b);
    println!("decoded displacement s = ({:.6}, {:.6}) -> syndrome bits x = {}, z = {}", res.s1, res.s2, res.x_bit, res.z_bit);
    println!("logical fidelity {:.6} raw, {:.6} after the Pauli frame", res.fidelity_before, res.fidelity_after);
    dir.write_json(RESULTS_JSON, &res)?;
    dir.finish("decode-demo", cfg, started, false)
}
