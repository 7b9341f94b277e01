use std::fs::File;
use std::io::{BufWriter, Write};

use qkpr::channels::{
    completeness_defect, completeness_sum, describe_sum, lift_to_three, printed_kraus, ChannelKind,
    PhaseFlipVariant, TritPhaseFlipVariant,
};
use qkpr::engine::{
    best_response, p_grid, phi_grid, play, sweep_decoherence, sweep_state_angles, theta_grid,
    GameConfig, InitialState, NoiseStage, SearchOptions, DEFAULT_ANGLE_POINTS, DEFAULT_P_POINTS,
};
use qkpr::payoff::Player;
use qkpr::states::{MixingFraction, StateAngles, StatePreset};
use qkpr::strategies::{u_opt, u_opt_equal_amplitude, Move, StrategyParams, StrategyTriple};
use serde_json::Value;

use crate::args::*;
use crate::output::{json_num, Cell, Table};
use crate::{expr, usage, CliError};

const PAYOFF_COLUMNS: [&str; 3] = ["payoff_alice", "payoff_bob", "payoff_charlie"];
const DEFAULT_NASH_TOL: f64 = 1e-3;
const DEFAULT_COMPLETENESS_TOL: f64 = 1e-10;

type Res<T> = Result<T, CliError>;

pub fn execute(command: Command) -> Res<()> {
    let name = command.name();
    let opts = load(command.options().clone())?;
    check_applicable(name, &opts)?;
    match command {
        Command::Simulate(_) => simulate(&opts),
        Command::SweepP(_) => sweep_p(&opts),
        Command::SweepAngles(_) => sweep_angles(&opts),
        Command::NashCheck(_) => nash_check(&opts),
        Command::ValidateChannels(_) => validate_channels(&opts),
    }
}

fn load(flags: Options) -> Res<Options> {
    let Some(path) = flags.config.clone() else {
        return Ok(flags);
    };
    let fail = |reason: String| CliError::Config {
        path: path.clone(),
        reason,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| fail(e.to_string()))?;
    let file: Options = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
    Ok(flags.merged_over(file))
}

fn check_applicable(command: &str, opts: &Options) -> Res<()> {
    let allowed: &[&str] = match command {
        "simulate" => &[
            "--state",
            "--f",
            "--theta",
            "--phi",
            "--preset",
            "--moves",
            "--alice",
            "--bob",
            "--charlie",
            "--channel",
            "--pf-variant",
            "--tpf-variant",
            "--p",
            "--noise-stage",
        ],
        "sweep-p" => &[
            "--state",
            "--f",
            "--theta",
            "--phi",
            "--preset",
            "--moves",
            "--alice",
            "--bob",
            "--charlie",
            "--channel",
            "--pf-variant",
            "--tpf-variant",
            "--noise-stage",
            "--grid",
        ],
        "sweep-angles" => &[
            "--moves",
            "--alice",
            "--bob",
            "--charlie",
            "--channel",
            "--pf-variant",
            "--tpf-variant",
            "--p",
            "--noise-stage",
            "--theta-grid",
            "--phi-grid",
        ],
        "nash-check" => &[
            "--state",
            "--f",
            "--theta",
            "--phi",
            "--preset",
            "--moves",
            "--alice",
            "--bob",
            "--charlie",
            "--channel",
            "--pf-variant",
            "--tpf-variant",
            "--p",
            "--noise-stage",
            "--player",
            "--budget",
            "--tol",
        ],
        _ => &[
            "--channel",
            "--pf-variant",
            "--tpf-variant",
            "--p",
            "--grid",
            "--tol",
        ],
    };
    for flag in opts.set_flags() {
        if !allowed.contains(&flag) {
            return Err(usage(format!("{flag} does not apply to {command}")));
        }
    }
    let state = opts.state.unwrap_or(StateArg::Ghz);
    let stray = [
        (
            opts.f.is_some() && state != StateArg::Mixed,
            "--f needs --state mixed",
        ),
        (
            (opts.theta.is_some() || opts.phi.is_some()) && state != StateArg::Angles,
            "--theta/--phi need --state angles",
        ),
        (
            opts.preset.is_some() && state != StateArg::Preset,
            "--preset needs --state preset",
        ),
        (
            opts.p.is_some() && opts.grid.is_some(),
            "--p and --grid are exclusive",
        ),
    ];
    match stray.iter().find(|(bad, _)| *bad) {
        Some((_, msg)) => Err(usage(*msg)),
        None => Ok(()),
    }
}

fn angle(e: &Expr) -> Res<f64> {
    match e {
        Expr::Number(x) => Ok(*x),
        Expr::Text(s) => Ok(expr::eval(s)?),
    }
}

fn initial_state(opts: &Options) -> Res<InitialState<f64>> {
    Ok(match opts.state.unwrap_or(StateArg::Ghz) {
        StateArg::Ghz => InitialState::Ghz,
        StateArg::Mixed => {
            let f = opts.f.ok_or_else(|| usage("--state mixed needs --f"))?;
            InitialState::Mixed {
                f: MixingFraction::new(f)?,
            }
        }
        StateArg::Angles => {
            let (Some(t), Some(p)) = (&opts.theta, &opts.phi) else {
                return Err(usage("--state angles needs --theta and --phi"));
            };
            InitialState::Angles {
                angles: StateAngles::new(angle(t)?, angle(p)?)?,
            }
        }
        StateArg::Preset => InitialState::Preset {
            preset: match opts.preset.unwrap_or(PresetArg::AsPrinted) {
                PresetArg::AsPrinted => StatePreset::AsPrinted,
                PresetArg::Maximal => StatePreset::Maximal,
            },
        },
    })
}

fn state_label(s: &InitialState<f64>) -> Value {
    match s {
        InitialState::Ghz => "ghz".into(),
        InitialState::Mixed { f } => serde_json::json!({ "kind": "mixed", "f": json_num(f.get()) }),
        InitialState::Angles { angles } => {
            serde_json::json!({ "kind": "angles", "theta": json_num(angles.theta), "phi": json_num(angles.phi) })
        }
        InitialState::Preset { preset } => serde_json::to_value(preset).map_or(
            Value::Null,
            |p| serde_json::json!({ "kind": "preset", "preset": p }),
        ),
    }
}

fn parse_move(spec: &str) -> Res<Move<f64>> {
    match spec.trim() {
        "opt" => return Ok(Move::Angles(u_opt_equal_amplitude())),
        "opt-as-printed" => return Ok(Move::Angles(u_opt())),
        "identity" => return Ok(Move::Identity),
        _ => {}
    }
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 8 {
        return Err(usage(format!(
            "a move takes opt, opt-as-printed, identity or 8 comma-separated angles, got {spec:?}"
        )));
    }
    let mut a = [0.0; 8];
    for (slot, text) in a.iter_mut().zip(parts) {
        *slot = expr::eval(text)?;
    }
    Ok(Move::Angles(StrategyParams::from_array(a)?))
}

fn moves(opts: &Options) -> Res<(StrategyTriple<f64>, &'static str)> {
    let per_player = [&opts.alice, &opts.bob, &opts.charlie];
    let any_custom = per_player.iter().any(|m| m.is_some());
    let kind = opts.moves.unwrap_or(if any_custom {
        MovesArg::Custom
    } else {
        MovesArg::Opt
    });
    if any_custom && kind != MovesArg::Custom {
        return Err(usage("--alice/--bob/--charlie need --moves custom"));
    }
    let triple = match kind {
        MovesArg::Opt => StrategyTriple::symmetric(Move::Angles(u_opt_equal_amplitude())),
        MovesArg::OptAsPrinted => StrategyTriple::symmetric(Move::Angles(u_opt())),
        MovesArg::Identity => StrategyTriple::identity(),
        MovesArg::Custom => {
            let mut ms = [Move::Angles(u_opt_equal_amplitude()); 3];
            for (slot, spec) in ms.iter_mut().zip(per_player) {
                if let Some(s) = spec {
                    *slot = parse_move(s)?;
                }
            }
            StrategyTriple::from_array(ms)
        }
    };
    let label = match kind {
        MovesArg::Opt => "opt",
        MovesArg::OptAsPrinted => "opt-as-printed",
        MovesArg::Identity => "identity",
        MovesArg::Custom => "custom",
    };
    Ok((triple, label))
}

fn move_label(m: &Move<f64>) -> String {
    match m {
        Move::Identity => "identity".into(),
        Move::Angles(p) => p
            .to_array()
            .iter()
            .map(|x| crate::output::fmt_num(*x))
            .collect::<Vec<_>>()
            .join(";"),
    }
}

fn channel_kind(code: &str, opts: &Options) -> Res<ChannelKind> {
    Ok(match code {
        "ad" => ChannelKind::AmplitudeDamping,
        "pd" => ChannelKind::PhaseDamping,
        "dep" => ChannelKind::Depolarizing,
        "pf" => ChannelKind::PhaseFlip(match opts.pf_variant.unwrap_or(PfVariantArg::Standard) {
            PfVariantArg::Standard => PhaseFlipVariant::Standard,
            PfVariantArg::AsPrinted => PhaseFlipVariant::AsPrinted,
        }),
        "tpf" => ChannelKind::TritPhaseFlip(
            match opts.tpf_variant.unwrap_or(TpfVariantArg::Renormalized) {
                TpfVariantArg::Renormalized => TritPhaseFlipVariant::Renormalized,
                TpfVariantArg::AsPrinted => TritPhaseFlipVariant::AsPrinted,
            },
        ),
        other => {
            return Err(usage(format!(
                "unknown channel {other:?}; expected ad, pd, dep, pf or tpf"
            )))
        }
    })
}

fn channels(opts: &Options, many: bool, default_all: bool) -> Res<Vec<ChannelKind>> {
    let codes = match &opts.channel {
        Some(list) => list.codes(),
        None if default_all => vec!["all".to_string()],
        None => vec!["pd".to_string()],
    };
    let mut out = Vec::new();
    for code in &codes {
        if code == "all" {
            for c in ["ad", "pd", "dep", "pf", "tpf"] {
                out.push(channel_kind(c, opts)?);
            }
        } else {
            out.push(channel_kind(code, opts)?);
        }
    }
    if out.is_empty() || (!many && out.len() != 1) {
        return Err(usage("--channel takes exactly one channel here"));
    }
    Ok(out)
}

/// Channel code, suffixed when a non-default variant is selected.
fn channel_label(kind: ChannelKind) -> String {
    match kind {
        ChannelKind::PhaseFlip(PhaseFlipVariant::AsPrinted)
        | ChannelKind::TritPhaseFlip(TritPhaseFlipVariant::AsPrinted) => {
            format!("{}-as-printed", kind.code())
        }
        _ => kind.code().to_string(),
    }
}

fn stage(opts: &Options) -> NoiseStage {
    match opts.noise_stage.unwrap_or(StageArg::Pre) {
        StageArg::Pre => NoiseStage::PreStrategy,
        StageArg::Post => NoiseStage::PostStrategy,
    }
}

fn grid_size(n: Option<usize>, default: usize, flag: &str) -> Res<usize> {
    match n.unwrap_or(default) {
        0 => Err(usage(format!("{flag} must be at least 1"))),
        n => Ok(n),
    }
}

fn payoff_cells(t: &qkpr::PayoffTriple) -> [Cell; 3] {
    t.as_array().map(Cell::Num)
}

fn emit(opts: &Options, table: &Table) -> Res<()> {
    let format = opts.format.unwrap_or(FormatArg::Csv);
    let result = match &opts.out {
        Some(path) => {
            let write_err = |e| CliError::Write {
                path: path.display().to_string(),
                source: e,
            };
            let file = File::create(path).map_err(write_err)?;
            let mut w = BufWriter::new(file);
            table
                .write(format, &mut w)
                .and_then(|_| w.flush())
                .map_err(write_err)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock).map_err(|e| CliError::Write {
                path: "standard output".into(),
                source: e,
            })
        }
    };
    result
}

fn common_settings(table: &mut Table, opts: &Options, moves_label: &str) {
    table.setting("moves", moves_label);
    table.setting("noise_stage", stage(opts).code());
    for (key, m) in [
        ("alice", &opts.alice),
        ("bob", &opts.bob),
        ("charlie", &opts.charlie),
    ] {
        if let Some(m) = m {
            table.setting(key, m.as_str());
        }
    }
}

fn simulate(opts: &Options) -> Res<()> {
    let initial = initial_state(opts)?;
    let (moves, label) = moves(opts)?;
    let kind = channels(opts, false, false)?[0];
    let p = opts.p.unwrap_or(0.0);
    let cfg = GameConfig::new(initial)
        .with_moves(moves)
        .with_channel(kind, p)
        .with_stage(stage(opts));
    let payoffs = play(&cfg)?;
    let mut table = Table::new(
        "simulate",
        &[
            "p",
            "channel",
            "noise_stage",
            PAYOFF_COLUMNS[0],
            PAYOFF_COLUMNS[1],
            PAYOFF_COLUMNS[2],
        ],
    );
    let [a, b, c] = payoff_cells(&payoffs);
    table.push(vec![
        p.into(),
        channel_label(kind).into(),
        cfg.noise_stage.code().into(),
        a,
        b,
        c,
    ]);
    table.setting("state", state_label(&initial));
    common_settings(&mut table, opts, label);
    emit(opts, &table)
}

fn sweep_p(opts: &Options) -> Res<()> {
    let initial = initial_state(opts)?;
    let (moves, label) = moves(opts)?;
    let kinds = channels(opts, true, true)?;
    let n = grid_size(opts.grid, DEFAULT_P_POINTS, "--grid")?;
    let result = sweep_decoherence(&initial, &moves, &kinds, stage(opts), &p_grid(n))?;
    let mut table = Table::new(
        "sweep-p",
        &[
            "p",
            "channel",
            "noise_stage",
            PAYOFF_COLUMNS[0],
            PAYOFF_COLUMNS[1],
            PAYOFF_COLUMNS[2],
        ],
    );
    for pt in &result.points {
        let [a, b, c] = payoff_cells(&pt.payoffs);
        table.push(vec![
            pt.p.into(),
            channel_label(pt.channel).into(),
            result.noise_stage.code().into(),
            a,
            b,
            c,
        ]);
    }
    table.setting("state", state_label(&initial));
    table.setting("grid", n);
    common_settings(&mut table, opts, label);
    emit(opts, &table)
}

fn sweep_angles(opts: &Options) -> Res<()> {
    let (moves, label) = moves(opts)?;
    let kind = channels(opts, false, false)?[0];
    let p = opts.p.unwrap_or(0.0);
    let nt = grid_size(opts.theta_grid, DEFAULT_ANGLE_POINTS, "--theta-grid")?;
    let np = grid_size(opts.phi_grid, DEFAULT_ANGLE_POINTS, "--phi-grid")?;
    let result = sweep_state_angles(&theta_grid(nt), &phi_grid(np), &moves, kind, p, stage(opts))?;
    let mut table = Table::new(
        "sweep-angles",
        &[
            "theta",
            "phi",
            "p",
            "channel",
            PAYOFF_COLUMNS[0],
            PAYOFF_COLUMNS[1],
            PAYOFF_COLUMNS[2],
        ],
    );
    for pt in &result.points {
        let [a, b, c] = payoff_cells(&pt.payoffs);
        let (theta, phi) = (pt.theta.unwrap_or(f64::NAN), pt.phi.unwrap_or(f64::NAN));
        table.push(vec![
            theta.into(),
            phi.into(),
            pt.p.into(),
            channel_label(pt.channel).into(),
            a,
            b,
            c,
        ]);
    }
    table.setting("theta_grid", nt);
    table.setting("phi_grid", np);
    common_settings(&mut table, opts, label);
    emit(opts, &table)
}

fn nash_check(opts: &Options) -> Res<()> {
    let initial = initial_state(opts)?;
    let (moves, label) = moves(opts)?;
    let kinds = channels(opts, true, false)?;
    let p = opts.p.unwrap_or(0.0);
    let tol = opts.tol.unwrap_or(DEFAULT_NASH_TOL);
    let search = SearchOptions {
        budget: opts.budget.unwrap_or(SearchOptions::default().budget),
        ..SearchOptions::default()
    };
    if search.budget < 2 {
        return Err(usage("--budget must be at least 2"));
    }
    let players: Vec<Player> = match opts.player {
        None => Player::ALL.to_vec(),
        Some(PlayerArg::Alice) => vec![Player::Alice],
        Some(PlayerArg::Bob) => vec![Player::Bob],
        Some(PlayerArg::Charlie) => vec![Player::Charlie],
    };
    let mut table = Table::new(
        "nash-check",
        &[
            "channel",
            "p",
            "noise_stage",
            "player",
            "baseline",
            "best_payoff",
            "improvement",
            "evaluations",
            "nash_holds",
            "best_move",
        ],
    );
    let mut violations = 0;
    for kind in kinds {
        let cfg = GameConfig::new(initial)
            .with_moves(moves)
            .with_channel(kind, p)
            .with_stage(stage(opts));
        for &player in &players {
            let r = best_response(&cfg, player, &search)?;
            let holds = r.improvement <= tol;
            violations += usize::from(!holds);
            table.push(vec![
                channel_label(kind).into(),
                p.into(),
                cfg.noise_stage.code().into(),
                player.name().into(),
                r.baseline.into(),
                r.best_payoff.into(),
                r.improvement.into(),
                Cell::Int(r.evaluations),
                Cell::Bool(holds),
                move_label(&r.best_move).into(),
            ]);
        }
    }
    table.setting("state", state_label(&initial));
    table.setting("budget", search.budget);
    table.setting("tol", json_num(tol));
    common_settings(&mut table, opts, label);
    emit(opts, &table)?;
    if violations > 0 {
        eprintln!(
            "qkpr nash-check: {violations} of {} deviations improve by more than {tol}",
            table.rows.len()
        );
    }
    Ok(())
}

fn validate_channels(opts: &Options) -> Res<()> {
    let kinds = channels(opts, true, true)?;
    let tol = opts.tol.unwrap_or(DEFAULT_COMPLETENESS_TOL);
    let ps: Vec<f64> = match (opts.p, opts.grid) {
        (Some(p), _) => vec![p],
        (None, Some(n)) => p_grid(grid_size(Some(n), n, "--grid")?),
        (None, None) => p_grid(11),
    };
    for &p in &ps {
        if !(0.0..=1.0).contains(&p) {
            return Err(usage(format!("p = {p} is outside [0, 1]")));
        }
    }
    let mut table = Table::new(
        "validate-channels",
        &["channel", "p", "single_defect", "lifted_defect", "complete"],
    );
    let mut defects = Vec::new();
    for kind in kinds {
        for &p in &ps {
            let single = printed_kraus(kind, p);
            let single_defect = completeness_defect(&single);
            let lifted_defect = completeness_defect(&lift_to_three(&single));
            let ok = single_defect <= tol && lifted_defect <= tol;
            if !ok {
                defects.push(format!(
                    "{kind} at p = {}: {} (max deviation {})",
                    crate::output::fmt_num(p),
                    describe_sum(&completeness_sum(&single), tol),
                    crate::output::fmt_num(single_defect.max(lifted_defect)),
                ));
            }
            table.push(vec![
                channel_label(kind).into(),
                p.into(),
                single_defect.into(),
                lifted_defect.into(),
                Cell::Bool(ok),
            ]);
        }
    }
    table.setting("tol", json_num(tol));
    emit(opts, &table)?;
    if defects.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChannelInvalid(format!(
            "{} Kraus set(s) not trace preserving:\n  {}",
            defects.len(),
            defects.join("\n  ")
        )))
    }
}
