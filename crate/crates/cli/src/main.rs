use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use upacket::amending::{
    amending_block_formula, amending_brute_force, amending_character, cutoff_from_env, grid_points,
    nu_p, run_grid, transfer_character, GridOptions, GridResult, Tag, Vertex,
};
use upacket::characters::{SkewCharacterComponent, VeryCuspidalDatum};
use upacket::embeddings::{
    enumerate_embeddings, hermitian_twists, ComponentId, EmbeddingClass, HermitianTwist,
};
use upacket::hecke::{hecke_params, match_test, reducibility_points};
use upacket::lattices::{check_appendix, filtration_matrix, LatticeKind, SubgroupKind};
use upacket::packets::{
    amendment_tag, assemble_packet, base_change_of, endoscopic_split, PacketDescription,
};
use upacket::{Error, Sign};

#[derive(Parser)]
#[command(
    name = "upacket",
    version,
    about = "Stable packets and amending characters for very cuspidal parameters"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Embedding {
    /// Comma-separated component ids forming I_e (default: empty).
    #[arg(long, value_delimiter = ',')]
    even: Vec<ComponentId>,
    /// The component i∘ paired with the GL factor.
    #[arg(long, default_value_t = 0)]
    i0: ComponentId,
}

#[derive(Subcommand)]
enum Command {
    /// Stable packet (or endoscopic split) of a parameter file.
    Packet {
        file: PathBuf,
        /// Also compare every amendment with the brute-force oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Block-valuation table of a compact subgroup.
    Filtration {
        file: PathBuf,
        #[arg(long, value_enum)]
        lattice: LatticeArg,
        #[arg(long, value_enum)]
        group: GroupArg,
        #[command(flatten)]
        embedding: Embedding,
    },
    /// Amending and transfer characters for one embedding class.
    Amend {
        file: PathBuf,
        #[command(flatten)]
        embedding: Embedding,
    },
    /// Hecke parameters and reducibility points.
    Hecke {
        file: PathBuf,
        #[command(flatten)]
        embedding: Embedding,
        /// Tame exponent of the GL-side character (default: the amended i∘ component).
        #[arg(long)]
        gl_tame: Option<i64>,
        /// Leading-coefficient log of the GL-side character.
        #[arg(long, allow_hyphen_values = true)]
        gl_beta_log: Option<i64>,
    },
    /// The embedding classes of the parameter's torus.
    Embeddings { file: PathBuf },
    /// Run an oracle grid or the golden tables.
    Verify {
        #[arg(long, value_enum, default_value_t = GridPreset::Small)]
        grid: GridPreset,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Write one line per grid point to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    #[value(name = "Lambda")]
    Lambda,
    #[value(name = "My")]
    My,
    #[value(name = "Mz")]
    Mz,
}

impl From<LatticeArg> for LatticeKind {
    fn from(l: LatticeArg) -> Self {
        match l {
            LatticeArg::Lambda => LatticeKind::Lambda,
            LatticeArg::My => LatticeKind::My,
            LatticeArg::Mz => LatticeKind::Mz,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    #[value(name = "H1")]
    H1,
    #[value(name = "J1")]
    J1,
    #[value(name = "J")]
    J,
}

impl From<GroupArg> for SubgroupKind {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::H1 => SubgroupKind::H1,
            GroupArg::J1 => SubgroupKind::J1,
            GroupArg::J => SubgroupKind::J,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GridPreset {
    Small,
    Full,
    Appendix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    n: u32,
    level: u32,
    #[serde(default)]
    beta_log: Option<i64>,
    tame: i64,
    omega: Sign,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParameterFile {
    q0: u64,
    components: Vec<ComponentSpec>,
    #[serde(default)]
    endoscopic_signs: Option<(Sign, Sign)>,
}

enum Failure {
    Invalid(String),
    Inconsistent(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid { .. } => Failure::Invalid(e.to_string()),
            Error::Inconsistent(_) => Failure::Inconsistent(e.to_string()),
        }
    }
}

type CliResult = std::result::Result<String, Failure>;

fn load(path: &Path) -> std::result::Result<(VeryCuspidalDatum, Option<(Sign, Sign)>), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Invalid(format!("invalid input: {}: {e}", path.display())))?;
    let file: ParameterFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Invalid(format!("invalid input: {}: {e}", path.display())))?;
    let components = file
        .components
        .iter()
        .map(|c| SkewCharacterComponent::new(file.q0, c.n, c.level, c.beta_log, c.tame, c.omega))
        .collect::<upacket::Result<Vec<_>>>()?;
    Ok((
        VeryCuspidalDatum::new(file.q0, components)?,
        file.endoscopic_signs,
    ))
}

fn embedding_of(e: &Embedding, datum: &VeryCuspidalDatum) -> upacket::Result<EmbeddingClass> {
    let even: BTreeSet<ComponentId> = e.even.iter().copied().collect();
    let x = EmbeddingClass::new((0..datum.len()).collect(), even)?;
    x.class_of(e.i0)?;
    Ok(x)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn beta_text(c: &SkewCharacterComponent) -> String {
    c.beta
        .and_then(|b| b.log())
        .map_or("-".to_string(), |l| format!("g^{l}"))
}

fn component_text(c: &SkewCharacterComponent) -> String {
    format!(
        "n={} level={} beta={} tame={} omega={}",
        c.n,
        c.level,
        beta_text(c),
        c.tame_exponent,
        c.omega
    )
}

fn datum_text(out: &mut String, datum: &VeryCuspidalDatum) {
    let _ = writeln!(
        out,
        "parameter: q0={} n={} d={} #I={}",
        datum.q0,
        datum.total_degree(),
        datum.level(),
        datum.len()
    );
    for (i, c) in datum.components.iter().enumerate() {
        let _ = writeln!(out, "  xi_{i}: {}", component_text(c));
    }
}

fn packet_text(out: &mut String, p: &PacketDescription) {
    let _ = writeln!(out, "twist: chi_{} (xi_+ = xi * chi_{})", p.twist, p.twist);
    let _ = writeln!(out, "members ({}):", p.len());
    for m in &p.members {
        let _ = writeln!(out, "  {}", m.x);
        for c in &m.components {
            let _ = writeln!(
                out,
                "    {}: nu_y={} -> tame={} omega={}",
                c.id, c.amendment, c.character.tame_exponent, c.character.omega
            );
        }
    }
    let _ = writeln!(out, "base change:");
    for c in &p.base_change {
        let _ = writeln!(out, "  {}", component_text(c));
    }
}

#[derive(Serialize)]
struct PacketReport<'a> {
    packet: &'a PacketDescription,
    oracle_checked: usize,
}

fn verify_packet(p: &PacketDescription) -> std::result::Result<usize, Failure> {
    let datum = &p.parameter;
    let d = datum.level();
    if d == 0 {
        return Ok(0);
    }
    let cutoff = cutoff_from_env();
    let mut checked = 0;
    for m in &p.members {
        for c in &m.components {
            let oracle =
                amending_brute_force(Vertex::Y, c.id, &m.x, d, datum.q0, &datum.degrees(), cutoff)?;
            if oracle.character.gl != c.amendment {
                return Err(Failure::Inconsistent(format!(
                    "internal inconsistency: formula and oracle disagree at {} i0={} ({} vs {})",
                    m.x, c.id, c.amendment, oracle.character.gl
                )));
            }
            checked += 1;
        }
        let bc = base_change_of(&m.x, &m.label(datum.q0))?;
        if bc.untwisted != datum.components {
            return Err(Failure::Inconsistent(format!(
                "internal inconsistency: base change at {} does not return the parameter",
                m.x
            )));
        }
    }
    Ok(checked)
}

fn cmd_packet(json: bool, file: &Path, verify: bool) -> CliResult {
    let (datum, signs) = load(file)?;
    if let Some(signs) = signs {
        let split = endoscopic_split(&datum, signs)?;
        if json {
            return Ok(to_json(&split));
        }
        let mut out = String::new();
        datum_text(&mut out, &datum);
        let _ = writeln!(
            out,
            "endoscopic datum: U_{} x U_{} signs ({}, {})",
            split.datum.n1, split.datum.n2, split.datum.signs.0, split.datum.signs.1
        );
        for (j, f) in split.factors.iter().enumerate() {
            let _ = writeln!(out, "factor {} ids {:?}:", j + 1, f.ids);
            match &f.packet {
                Some(p) => packet_text(&mut out, p),
                None => {
                    let _ = writeln!(out, "  empty (one member)");
                }
            }
        }
        let _ = writeln!(out, "total members: {}", split.total_members());
        return Ok(out);
    }
    let packet = assemble_packet(&datum)?;
    let checked = if verify { verify_packet(&packet)? } else { 0 };
    if json {
        return Ok(to_json(&PacketReport {
            packet: &packet,
            oracle_checked: checked,
        }));
    }
    let mut out = String::new();
    datum_text(&mut out, &datum);
    let _ = writeln!(out, "embedding classes ({}):", packet.len());
    for m in &packet.members {
        let _ = writeln!(out, "  {}", m.x);
    }
    packet_text(&mut out, &packet);
    if verify {
        let _ = writeln!(out, "oracle: {checked} amendments agree");
    }
    Ok(out)
}

#[derive(Serialize)]
struct FiltrationReport {
    lattice: &'static str,
    group: &'static str,
    d: u32,
    x: String,
    i0: ComponentId,
    labels: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn cmd_filtration(
    json: bool,
    file: &Path,
    lattice: LatticeKind,
    group: SubgroupKind,
    e: &Embedding,
) -> CliResult {
    let (datum, _) = load(file)?;
    let x = embedding_of(e, &datum)?;
    let m = filtration_matrix(group, lattice, datum.level(), &x, e.i0)?;
    if json {
        return Ok(to_json(&FiltrationReport {
            lattice: lattice.name(),
            group: group.name(),
            d: datum.level(),
            x: x.to_string(),
            i0: e.i0,
            labels: m.labels.iter().map(|l| l.to_string()).collect(),
            rows: m
                .entries
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect())
                .collect(),
        }));
    }
    let mut out = format!(
        "{} {} d={} {} i0={}\n",
        lattice.name(),
        group.name(),
        datum.level(),
        x,
        e.i0
    );
    out.push_str(&m.to_grid());
    Ok(out)
}

#[derive(Serialize)]
struct AmendRow {
    w: Vertex,
    parity_rule: Tag,
    block_formula: Tag,
    oracle: Option<Tag>,
    nu_p_gl: Option<Tag>,
}

#[derive(Serialize)]
struct AmendReport {
    x: String,
    i0: ComponentId,
    d: u32,
    rows: Vec<AmendRow>,
    transfer: Tag,
    nu_p_unitary_trivial: bool,
}

fn cmd_amend(json: bool, file: &Path, e: &Embedding) -> CliResult {
    let (datum, _) = load(file)?;
    let x = embedding_of(e, &datum)?;
    let d = datum.level();
    let degrees = datum.degrees();
    let cutoff = cutoff_from_env();
    let mut rows = Vec::new();
    for w in Vertex::BOTH {
        let rule = amending_character(w, e.i0, &x, d)?.gl;
        let formula = amending_block_formula(w, e.i0, &x, d, datum.q0, &degrees)?.gl;
        let oracle = if d > 0 {
            Some(amending_brute_force(
                w, e.i0, &x, d, datum.q0, &degrees, cutoff,
            )?)
        } else {
            None
        };
        let row = AmendRow {
            w,
            parity_rule: rule,
            block_formula: formula,
            oracle: oracle.as_ref().map(|o| o.character.gl),
            nu_p_gl: oracle.as_ref().map(|o| o.nu_p.gl),
        };
        if rule != formula || row.oracle.is_some_and(|o| o != rule) {
            return Err(Failure::Inconsistent(format!(
                "internal inconsistency: nu^{w} at {x} i0={}: rule {rule}, formula {formula}, oracle {:?}",
                e.i0, row.oracle
            )));
        }
        rows.push(row);
    }
    let report = AmendReport {
        x: x.to_string(),
        i0: e.i0,
        d,
        rows,
        transfer: transfer_character(e.i0, &x, d)?.gl,
        nu_p_unitary_trivial: nu_p(&x, e.i0, d)?.values().all(|&t| t == Tag::Trivial),
    };
    if json {
        return Ok(to_json(&report));
    }
    let mut out = format!("{} i0={} d={}\n", report.x, report.i0, d);
    let _ = writeln!(out, "w  rule       formula    oracle     nu_P");
    for r in &report.rows {
        let opt = |t: Option<Tag>| t.map_or("-".to_string(), |t| t.to_string());
        let _ = writeln!(
            out,
            "{}  {:<10} {:<10} {:<10} {}",
            r.w,
            r.parity_rule.to_string(),
            r.block_formula.to_string(),
            opt(r.oracle),
            opt(r.nu_p_gl)
        );
    }
    let _ = writeln!(out, "transfer chi_y^z: {}", report.transfer);
    Ok(out)
}

#[derive(Serialize)]
struct HeckeReport {
    x: String,
    i0: ComponentId,
    gl_tame: u64,
    gl_beta_log: Option<u64>,
    matching: bool,
    r_y: String,
    r_z: String,
    reducibility_points: Vec<String>,
}

fn cmd_hecke(
    json: bool,
    file: &Path,
    e: &Embedding,
    gl_tame: Option<i64>,
    gl_beta_log: Option<i64>,
) -> CliResult {
    let (datum, _) = load(file)?;
    let x = embedding_of(e, &datum)?;
    let base = &datum.components[e.i0];
    let amended = match amendment_tag(&x, e.i0, datum.level())? {
        Tag::Trivial => base.clone(),
        Tag::Quadratic => base.twist_tame_quadratic(),
    };
    let beta_log = gl_beta_log.or_else(|| amended.beta.and_then(|b| b.log()).map(|l| l as i64));
    let tame = gl_tame.unwrap_or(amended.tame_exponent as i64);
    let gl = SkewCharacterComponent::new(datum.q0, base.n, base.level, beta_log, tame, base.omega)?;
    let matching = match_test(&gl, &x, &datum, e.i0, Vertex::Y)?;
    let params = hecke_params(matching, base.n)?;
    let points = reducibility_points(params, base.n);
    let report = HeckeReport {
        x: x.to_string(),
        i0: e.i0,
        gl_tame: gl.tame_exponent,
        gl_beta_log: gl.beta.and_then(|b| b.log()),
        matching,
        r_y: params.r_y.to_string(),
        r_z: params.r_z.to_string(),
        reducibility_points: points.points.iter().map(|p| p.to_string()).collect(),
    };
    if json {
        return Ok(to_json(&report));
    }
    Ok(format!(
        "{} i0={}\nGL character: {}\nmatching: {}\nr_y = {}  r_z = {}\nreducibility points: {{{}}}\n",
        report.x,
        report.i0,
        component_text(&gl),
        report.matching,
        report.r_y,
        report.r_z,
        report.reducibility_points.join(", ")
    ))
}

#[derive(Serialize)]
struct EmbeddingRow {
    x: String,
    odd: Vec<ComponentId>,
    even: Vec<ComponentId>,
    twists: Vec<HermitianTwist>,
}

fn cmd_embeddings(json: bool, file: &Path) -> CliResult {
    let (datum, _) = load(file)?;
    let ids: Vec<ComponentId> = (0..datum.len()).collect();
    let rows: Vec<EmbeddingRow> = enumerate_embeddings(&ids)?
        .iter()
        .map(|x| EmbeddingRow {
            x: x.to_string(),
            odd: x.odd_part().iter().copied().collect(),
            even: x.even_part().iter().copied().collect(),
            twists: hermitian_twists(x).into_values().collect(),
        })
        .collect();
    if json {
        return Ok(to_json(&rows));
    }
    let mut out = format!("{} embedding classes\n", rows.len());
    for r in &rows {
        let tw: Vec<&str> = r
            .twists
            .iter()
            .map(|t| match t {
                HermitianTwist::Unit => "1",
                HermitianTwist::Uniformizer => "w",
            })
            .collect();
        let _ = writeln!(out, "  {}  forms [{}]", r.x, tw.join(" "));
    }
    Ok(out)
}

#[derive(Serialize)]
struct VerifySummary {
    grid: &'static str,
    points: usize,
    agree: usize,
    literal_blocks: usize,
    cycle_only_blocks: usize,
    first_disagreement: Option<String>,
}

fn transfer_holds(r: &GridResult) -> bool {
    let p = &r.point;
    let chi = transfer_character(p.i0, &p.x, p.d).map(|c| c.gl);
    chi == Ok(Tag::from_bool(p.x.len() % 2 == 1))
}

fn cmd_verify(
    json: bool,
    grid: GridPreset,
    jobs: usize,
    report: Option<&Path>,
    inject_fault: bool,
) -> CliResult {
    let write_report = |lines: &[String]| -> std::result::Result<(), Failure> {
        if let Some(path) = report {
            let mut text = lines.join("\n");
            text.push('\n');
            std::fs::write(path, text)
                .map_err(|e| Failure::Invalid(format!("invalid input: {}: {e}", path.display())))?;
        }
        Ok(())
    };
    if grid == GridPreset::Appendix {
        let checks = check_appendix(2..=7)?;
        let lines: Vec<String> = checks
            .iter()
            .map(|c| {
                format!(
                    "{} {} {} {}",
                    c.lattice.name(),
                    c.group.name(),
                    c.d,
                    if c.matches() { "match" } else { "mismatch" }
                )
            })
            .collect();
        write_report(&lines)?;
        let ok = checks.iter().filter(|c| c.matches()).count();
        let summary = format!("appendix: {ok}/{} tables match\n", checks.len());
        if ok != checks.len() {
            return Err(Failure::Inconsistent(format!(
                "internal inconsistency: {summary}"
            )));
        }
        return Ok(if json {
            to_json(&serde_json::json!({"grid": "appendix", "tables": checks.len(), "match": ok}))
        } else {
            summary
        });
    }
    let q0s: &[u64] = if grid == GridPreset::Small {
        &[3]
    } else {
        &[3, 5]
    };
    let points = grid_points(q0s, &[1, 3], &[1, 2, 3, 4], 3)?;
    let opts = GridOptions {
        cutoff: cutoff_from_env(),
        flip_rule: inject_fault,
    };
    let results = run_grid(&points, jobs, opts)?;
    let lines: Vec<String> = results.iter().map(|r| r.report_line()).collect();
    write_report(&lines)?;
    let first_bad = results.iter().find(|r| !r.agree() || !transfer_holds(r));
    let summary = VerifySummary {
        grid: if grid == GridPreset::Small {
            "small"
        } else {
            "full"
        },
        points: results.len(),
        agree: results
            .iter()
            .filter(|r| r.agree() && transfer_holds(r))
            .count(),
        literal_blocks: results.iter().map(|r| r.modes.literal).sum(),
        cycle_only_blocks: results.iter().map(|r| r.modes.cycle_only).sum(),
        first_disagreement: first_bad.map(|r| r.report_line()),
    };
    if let Some(line) = &summary.first_disagreement {
        return Err(Failure::Inconsistent(format!(
            "internal inconsistency: grid point disagrees: {line}"
        )));
    }
    if json {
        return Ok(to_json(&summary));
    }
    Ok(format!(
        "{} grid: {}/{} points agree ({} blocks enumerated, {} by cycle count)\n",
        summary.grid,
        summary.agree,
        summary.points,
        summary.literal_blocks,
        summary.cycle_only_blocks
    ))
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Packet { file, verify } => cmd_packet(cli.json, file, *verify),
        Command::Filtration {
            file,
            lattice,
            group,
            embedding,
        } => cmd_filtration(
            cli.json,
            file,
            (*lattice).into(),
            (*group).into(),
            embedding,
        ),
        Command::Amend { file, embedding } => cmd_amend(cli.json, file, embedding),
        Command::Hecke {
            file,
            embedding,
            gl_tame,
            gl_beta_log,
        } => cmd_hecke(cli.json, file, embedding, *gl_tame, *gl_beta_log),
        Command::Embeddings { file } => cmd_embeddings(cli.json, file),
        Command::Verify {
            grid,
            jobs,
            report,
            inject_fault,
        } => cmd_verify(cli.json, *grid, *jobs, report.as_deref(), *inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Inconsistent(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
