// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use bdlc_core::dfg::NodeKind;
use bdlc_core::emit::{
    emit_verilog_netlist, emit_verilog_rtl, emit_vhdl_rtl, emit_vhdl_structural, read_pla,
    read_verilog_netlist, write_pla,
};
use bdlc_core::hls::Allocation;
use bdlc_core::logic::{
    check_against_table, check_equivalence, limit_fanin2, map_to_library, minimize_table,
    EquivResult, GateNetlist, MapTarget, TruthTable,
};
use bdlc_core::pipeline::{synthesize, AllocationChoice, SynthOptions, Synthesis, SynthesisError};
use bdlc_core::sim::{cosim, interpret, simulate_rtl_traced};

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (report-json v1, pla v1, netlist-json v1)"
);

#[derive(Parser)]
#[command(
    name = "bdlc",
    version = VERSION,
    about = "Behavioral description language compiler: synthesis, scheduling, minimization, simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a .bdl module into an RTL design plus a schedule report
    Synth(SynthArgs),
    /// Schedule and bind only; print the schedule/binding report
    Schedule(ScheduleArgs),
    /// Minimize a PLA truth table and emit a gate netlist
    Minimize(MinimizeArgs),
    /// Interpret a .bdl module and simulate its RTL design
    Sim(SimArgs),
    /// Co-simulate the interpreter against the RTL design
    Cosim(CosimArgs),
    /// Exhaustively check two artifacts (.pla, .v, netlist .json) for equivalence
    Check(CheckArgs),
}

#[derive(Args)]
struct ResourceArgs {
    /// Per-kind instance counts, e.g. mul=2,add=1
    #[arg(long, value_name = "KIND=N,...")]
    resources: Option<String>,
    /// Allocate the per-step concurrency maximum of the ASAP schedule
    #[arg(long)]
    auto_allocate: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Input .bdl file
    file: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Emission format
    #[arg(long, value_enum, default_value_t = SynthEmit::Verilog)]
    emit: SynthEmit,
    /// Output path (defaults to the input stem with the format extension)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rewrite power-of-two constant multiplications into shifts
    #[arg(long)]
    strength_reduce: bool,
    /// Machine-readable stdout
    #[arg(long)]
    json: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum SynthEmit {
    Verilog,
    Vhdl,
    Json,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Input .bdl file
    file: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Rewrite power-of-two constant multiplications into shifts
    #[arg(long)]
    strength_reduce: bool,
    /// Write the JSON report here as well
    #[arg(long)]
    out: Option<PathBuf>,
    /// Machine-readable stdout
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MinimizeArgs {
    /// Input .pla file
    file: PathBuf,
    /// Emission format
    #[arg(long, value_enum, default_value_t = MinimizeEmit::Verilog)]
    emit: MinimizeEmit,
    /// Target library
    #[arg(long, value_enum, default_value_t = MapArg::Aoi)]
    map: MapArg,
    /// Output path (defaults to the input stem with the format extension)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Machine-readable stdout
    #[arg(long)]
    json: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum MinimizeEmit {
    Verilog,
    Vhdl,
    Pla,
}

#[derive(Copy, Clone, ValueEnum)]
enum MapArg {
    Aoi,
    Nand2,
}

#[derive(Args)]
struct SimArgs {
    /// Input .bdl file
    file: PathBuf,
    /// Input values, e.g. a=3,b=2 (decimal, 0x.., or 0b..)
    #[arg(long, value_name = "NAME=V,...", default_value = "")]
    inputs: String,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Dump the per-cycle RTL trace
    #[arg(long)]
    trace: bool,
    /// Machine-readable stdout
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CosimArgs {
    /// Input .bdl file
    file: PathBuf,
    #[command(flatten)]
    resources: ResourceArgs,
    /// Pseudo-random vectors on top of the two corner vectors
    #[arg(long, default_value_t = 100)]
    trials: u32,
    /// Seed for the splitmix generator
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Machine-readable stdout
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// First artifact (.pla, .v, or netlist .json)
    a: PathBuf,
    /// Second artifact (.pla, .v, or netlist .json)
    b: PathBuf,
}

pub struct CommandError {
    message: String,
    code: u8,
}

impl CommandError {
    fn usage(message: impl Into<String>) -> CommandError {
        CommandError {
            message: message.into(),
            code: 1,
        }
    }

    fn io(path: &Path, err: std::io::Error) -> CommandError {
        CommandError {
            message: format!("{}: {err}", path.display()),
            code: 2,
        }
    }

    fn verification(message: impl Into<String>) -> CommandError {
        CommandError {
            message: message.into(),
            code: 3,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}", self.message)
    }
}

impl From<SynthesisError> for CommandError {
    fn from(err: SynthesisError) -> CommandError {
        CommandError::usage(err.to_string())
    }
}

pub fn run(cli: Cli) -> Result<(), CommandError> {
    match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Minimize(args) => cmd_minimize(args),
        Command::Sim(args) => cmd_sim(args),
        Command::Cosim(args) => cmd_cosim(args),
        Command::Check(args) => cmd_check(args),
    }
}

// --- shared helpers -----------------------------------------------------

fn read_text(path: &Path) -> Result<String, CommandError> {
    std::fs::read_to_string(path).map_err(|e| CommandError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CommandError> {
    std::fs::write(path, text).map_err(|e| CommandError::io(path, e))
}

fn parse_literal(text: &str) -> Option<u64> {
    let lower = text.trim().to_ascii_lowercase();
    if let Some(digits) = lower.strip_prefix("0b") {
        u64::from_str_radix(digits, 2).ok()
    } else if let Some(digits) = lower.strip_prefix("0x") {
        u64::from_str_radix(digits, 16).ok()
    } else {
        lower.parse().ok()
    }
}

fn parse_resources(spec: &str) -> Result<Allocation, CommandError> {
    let mut allocation = Allocation::new();
    for item in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (kind, count) = item
            .split_once('=')
            .ok_or_else(|| CommandError::usage(format!("`{item}` is not KIND=N")))?;
        let kind = NodeKind::parse_operation(kind.trim()).ok_or_else(|| {
            CommandError::usage(format!("unknown resource kind `{}`", kind.trim()))
        })?;
        let count = parse_literal(count)
            .ok_or_else(|| CommandError::usage(format!("bad count in `{item}`")))?;
        allocation.set(kind, count as u32);
    }
    Ok(allocation)
}

fn parse_inputs(spec: &str) -> Result<BTreeMap<String, u64>, CommandError> {
    let mut inputs = BTreeMap::new();
    for item in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CommandError::usage(format!("`{item}` is not NAME=VALUE")))?;
        let value = parse_literal(value)
            .ok_or_else(|| CommandError::usage(format!("bad value in `{item}`")))?;
        inputs.insert(name.trim().to_string(), value);
    }
    Ok(inputs)
}

fn allocation_choice(args: &ResourceArgs, require: bool) -> Result<AllocationChoice, CommandError> {
    match (&args.resources, args.auto_allocate) {
        (Some(_), true) => Err(CommandError::usage(
            "--resources and --auto-allocate are mutually exclusive",
        )),
        (Some(spec), false) => Ok(AllocationChoice::Explicit(parse_resources(spec)?)),
        (None, true) => Ok(AllocationChoice::Auto),
        (None, false) if require => Err(CommandError::usage(
            "pass --resources KIND=N,... or --auto-allocate",
        )),
        (None, false) => Ok(AllocationChoice::Auto),
    }
}

fn run_pipeline(
    file: &Path,
    allocation: AllocationChoice,
    strength_reduce: bool,
) -> Result<Synthesis, CommandError> {
    let source = read_text(file)?;
    let options = SynthOptions {
        allocation,
        strength_reduce,
        ..SynthOptions::default()
    };
    Ok(synthesize(&source, &options)?)
}

fn allocation_summary(allocation: &Allocation) -> String {
    let parts: Vec<String> = allocation
        .iter()
        .filter(|(_, count)| *count > 0)
        .map(|(kind, count)| format!("{}={count}", kind.name()))
        .collect();
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join(",")
    }
}

// --- synth ---------------------------------------------------------------

fn cmd_synth(args: SynthArgs) -> Result<(), CommandError> {
    let choice = allocation_choice(&args.resources, true)?;
    let synth = run_pipeline(&args.file, choice, args.strength_reduce)?;

    let extension = match args.emit {
        SynthEmit::Verilog => "v",
        SynthEmit::Vhdl => "vhd",
        SynthEmit::Json => "json",
    };
    let out = args
        .out
        .unwrap_or_else(|| args.file.with_extension(extension));
    let text = match args.emit {
        SynthEmit::Verilog => emit_verilog_rtl(&synth.design, &synth.design.name),
        SynthEmit::Vhdl => emit_vhdl_rtl(&synth.design, &synth.design.name),
        SynthEmit::Json => {
            let mut json = serde_json::to_string_pretty(&synth.design).expect("design serializes");
            json.push('\n');
            json
        }
    };
    write_text(&out, &text)?;

    let report_path = out.with_extension(match out.extension().and_then(|e| e.to_str()) {
        Some("json") => "report.json".to_string(),
        _ => "report.json".to_string(),
    });
    let mut report_json = serde_json::to_string_pretty(&synth.report).expect("report serializes");
    report_json.push('\n');
    write_text(&report_path, &report_json)?;

    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "module": synth.design.name,
                "out": out.display().to_string(),
                "report": report_path.display().to_string(),
                "length": synth.schedule.length,
                "allocation": allocation_summary(&synth.allocation),
                "cost": synth.cost,
            })
        );
    } else {
        println!(
            "{}: {} steps, allocation {}, wrote {} and {}",
            synth.design.name,
            synth.schedule.length,
            allocation_summary(&synth.allocation),
            out.display(),
            report_path.display()
        );
    }
    Ok(())
}

// --- schedule -------------------------------------------------------------

fn cmd_schedule(args: ScheduleArgs) -> Result<(), CommandError> {
    let choice = allocation_choice(&args.resources, true)?;
    let synth = run_pipeline(&args.file, choice, args.strength_reduce)?;
    let mut report_json = serde_json::to_string_pretty(&synth.report).expect("report serializes");
    report_json.push('\n');
    if let Some(out) = &args.out {
        write_text(out, &report_json)?;
    }
    if args.json {
        print!("{report_json}");
    } else {
        println!(
            "{}: length {} (allocation {})",
            synth.design.name,
            synth.schedule.length,
            allocation_summary(&synth.allocation)
        );
        for step in &synth.report.steps {
            let ops: Vec<String> = step
                .ops
                .iter()
                .map(|op| format!("n{}:{}{}", op.node, op.kind, op.instance))
                .collect();
            println!("  step {}: {}", step.step, ops.join(" "));
        }
        for register in &synth.report.registers {
            let values: Vec<String> = register.values.iter().map(|v| format!("n{v}")).collect();
            println!(
                "  r{} ({} bits): {}",
                register.index,
                register.width,
                values.join(" ")
            );
        }
    }
    Ok(())
}

// --- minimize ---------------------------------------------------------------

fn cmd_minimize(args: MinimizeArgs) -> Result<(), CommandError> {
    let text = read_text(&args.file)?;
    let table = read_pla(&text).map_err(|e| CommandError::usage(e.to_string()))?;
    let stem = args
        .file
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("minimized")
        .to_string();
    let (netlist, stats) =
        minimize_table(&table, &stem).map_err(|e| CommandError::usage(e.to_string()))?;

    let mapped = match args.map {
        MapArg::Aoi => map_to_library(&netlist, MapTarget::AoiUnrestricted),
        MapArg::Nand2 => map_to_library(&netlist, MapTarget::Nand2),
    };
    // Every netlist is equivalence-checked against the table before write.
    match check_against_table(&mapped, &table).map_err(|e| CommandError::usage(e.to_string()))? {
        EquivResult::Equivalent => {}
        EquivResult::Counterexample(assignment) => {
            return Err(CommandError::verification(format!(
                "minimized netlist diverges from the table at {assignment:?}"
            )));
        }
    }

    let extension = match args.emit {
        MinimizeEmit::Verilog => "v",
        MinimizeEmit::Vhdl => "vhd",
        MinimizeEmit::Pla => "min.pla",
    };
    let out = args
        .out
        .unwrap_or_else(|| args.file.with_extension(extension));
    let emitted = match args.emit {
        MinimizeEmit::Verilog => emit_verilog_netlist(&mapped, &stem),
        MinimizeEmit::Vhdl => {
            // Structural VHDL needs two-input gates.
            let narrow = limit_fanin2(&mapped);
            emit_vhdl_structural(&narrow, &stem).map_err(|e| CommandError::usage(e.to_string()))?
        }
        MinimizeEmit::Pla => write_pla(&table).map_err(|e| CommandError::usage(e.to_string()))?,
    };
    write_text(&out, &emitted)?;

    if args.json {
        let outputs: Vec<serde_json::Value> = stats
            .iter()
            .map(|(name, canonical, minimized)| {
                serde_json::json!({
                    "output": name,
                    "canonical_products": canonical,
                    "products": minimized,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::json!({
                "outputs": outputs,
                "gates": mapped.gates.len(),
                "out": out.display().to_string(),
                "equivalent": true,
            })
        );
    } else {
        for (name, canonical, minimized) in &stats {
            println!("{name}: {canonical} products -> {minimized} products");
        }
        println!(
            "gates: {}, equivalence: PASS, wrote {}",
            mapped.gates.len(),
            out.display()
        );
    }
    Ok(())
}

// --- sim -----------------------------------------------------------------

fn cmd_sim(args: SimArgs) -> Result<(), CommandError> {
    let choice = allocation_choice(&args.resources, false)?;
    let synth = run_pipeline(&args.file, choice, false)?;
    let inputs = parse_inputs(&args.inputs)?;

    let interpreted =
        interpret(&synth.program, &inputs).map_err(|e| CommandError::usage(e.to_string()))?;
    let simulated = simulate_rtl_traced(&synth.design, &inputs, args.trace)
        .map_err(|e| CommandError::usage(e.to_string()))?;

    if args.json {
        println!(
            "{}",
            serde_json::json!({
                "outputs": interpreted.outputs,
                "source_cycles": interpreted.cycles,
                "rtl_cycles": simulated.cycles,
                "rtl_outputs": simulated.outputs,
            })
        );
    } else {
        let mut parts: Vec<String> = interpreted
            .outputs
            .iter()
            .map(|(name, value)| format!("{name}={value}"))
            .collect();
        parts.push(format!("source-cycles={}", interpreted.cycles));
        parts.push(format!("rtl-cycles={}", simulated.cycles));
        println!("{}", parts.join(", "));
    }
    if args.trace {
        if let Some(trace) = &simulated.trace {
            for line in trace {
                let regs: Vec<String> = line.registers.iter().map(|v| v.to_string()).collect();
                println!(
                    "trace: cycle={} state={} regs=[{}] cw={}",
                    line.cycle,
                    line.state,
                    regs.join(","),
                    line.control_word
                );
            }
        }
    }
    Ok(())
}

// --- cosim ------------------------------------------------------------------

fn cmd_cosim(args: CosimArgs) -> Result<(), CommandError> {
    let choice = allocation_choice(&args.resources, true)?;
    let synth = run_pipeline(&args.file, choice, false)?;
    let report = cosim(&synth.program, &synth.design, args.trials, args.seed)
        .map_err(|e| CommandError::usage(e.to_string()))?;

    if args.json {
        println!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
    } else {
        println!(
            "{}: {} vectors (trials={}, seed={}), source-cycles={}, rtl-cycles={}",
            synth.design.name,
            report.vectors,
            report.trials,
            args.seed,
            report.source_cycles,
            report.rtl_cycles
        );
        if report.pass() {
            println!("PASS");
        } else {
            println!("FAIL: {} mismatching vectors", report.mismatches.len());
            for mismatch in &report.mismatches {
                println!(
                    "  inputs {:?} interpreter {:?} rtl {:?}",
                    mismatch.inputs, mismatch.interpreted, mismatch.simulated
                );
            }
        }
    }
    if report.pass() {
        Ok(())
    } else {
        Err(CommandError::verification(format!(
            "co-simulation found {} mismatching vectors",
            report.mismatches.len()
        )))
    }
}

// --- check ------------------------------------------------------------------

enum Artifact {
    Table(TruthTable),
    Netlist(GateNetlist),
}

fn load_artifact(path: &Path) -> Result<Artifact, CommandError> {
    let text = read_text(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("pla") => Ok(Artifact::Table(
            read_pla(&text).map_err(|e| CommandError::usage(e.to_string()))?,
        )),
        Some("v") => Ok(Artifact::Netlist(
            read_verilog_netlist(&text).map_err(|e| CommandError::usage(e.to_string()))?,
        )),
        Some("json") => Ok(Artifact::Netlist(
            serde_json::from_str(&text)
                .map_err(|e| CommandError::usage(format!("{}: {e}", path.display())))?,
        )),
        _ => Err(CommandError::usage(format!(
            "{}: expected a .pla, .v, or .json artifact",
            path.display()
        ))),
    }
}

fn cmd_check(args: CheckArgs) -> Result<(), CommandError> {
    let a = load_artifact(&args.a)?;
    let b = load_artifact(&args.b)?;
    let result = match (&a, &b) {
        (Artifact::Netlist(x), Artifact::Netlist(y)) => {
            check_equivalence(x, y).map_err(|e| CommandError::usage(e.to_string()))?
        }
        (Artifact::Netlist(x), Artifact::Table(t)) | (Artifact::Table(t), Artifact::Netlist(x)) => {
            check_against_table(x, t).map_err(|e| CommandError::usage(e.to_string()))?
        }
        (Artifact::Table(x), Artifact::Table(y)) => compare_tables(x, y)?,
    };
    match result {
        EquivResult::Equivalent => {
            println!("equivalent");
            Ok(())
        }
        EquivResult::Counterexample(assignment) => {
            let rendered: Vec<String> = assignment
                .iter()
                .map(|(name, value)| format!("{name}={}", u8::from(*value)))
                .collect();
            println!("not equivalent: counterexample {}", rendered.join(","));
            Err(CommandError::verification(
                "artifacts are not equivalent".to_string(),
            ))
        }
    }
}

fn compare_tables(a: &TruthTable, b: &TruthTable) -> Result<EquivResult, CommandError> {
    if a.inputs() != b.inputs() || a.outputs() != b.outputs() {
        return Err(CommandError::usage(
            "tables declare different interfaces".to_string(),
        ));
    }
    for minterm in 0..a.row_count() {
        for output in a.outputs() {
            if a.value(output, minterm) != b.value(output, minterm) {
                let assignment = a
                    .inputs()
                    .iter()
                    .enumerate()
                    .map(|(j, name)| (name.clone(), a.input_bit(minterm, j)))
                    .collect();
                return Ok(EquivResult::Counterexample(assignment));
            }
        }
    }
    Ok(EquivResult::Equivalent)
}
