use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;
use spectral_pu::basis::BasisDocument;
use spectral_pu::design::{design_metrics, optimize_warp, write_metrics_csv, ConstraintDirection, WarpSearch};
use spectral_pu::effects::{
    default_depths, depth_trajectory, medium_coefficients, metameric_palette, palette_spread, MetamerPaletteEntry,
    PaletteSettings,
};
use spectral_pu::imaging::{
    equalized_pair, hidden_image, hidden_pattern, load_gray, region_difference, save_png, select_by_luminance,
    ImagePair, LuminanceRank, Mask,
};
use spectral_pu::sampler::{boundary_solution, feasibility_check, ClassSampler};
use spectral_pu::{
    BasisConfig, ClassSample, ColorTarget, Error, Illuminant, PuBasis, RgbSpace, TrianglePolicy, WarpParams,
};

use crate::args::{
    BasisCmd, BasisSource, Command, Direction, HideCmd, OptimizeCmd, PaletteCmd, Rank, ReplayCmd, SampleCmd, ServeCmd,
    TrajectoryCmd,
};
use crate::run::{read_text, CliResult, Failure, Run, RunManifest};

pub fn execute(command: Command) -> CliResult<()> {
    match &command {
        Command::Basis(c) => basis(c, &command),
        Command::Optimize(c) => optimize(c, &command),
        Command::Sample(c) => sample(c, &command),
        Command::Trajectory(c) => trajectory(c, &command),
        Command::Palette(c) => palette(c, &command),
        Command::Hide(c) => hide(c, &command),
        Command::Serve(c) => serve(c),
        Command::Replay(c) => replay(c),
    }
}

fn illuminant(name: &str) -> CliResult<Illuminant> {
    Ok(Illuminant::by_name(name)?)
}

fn rgb_space(name: &str) -> CliResult<RgbSpace> {
    Ok(name.parse::<RgbSpace>()?)
}

fn load_basis(path: &Path, run: &mut Run) -> CliResult<PuBasis> {
    run.input(path);
    let doc = BasisDocument::from_json(&read_text(path)?)?;
    Ok(PuBasis::from_document(&doc)?)
}

fn resolve_basis(src: &BasisSource, run: &mut Run) -> CliResult<PuBasis> {
    match (&src.basis, src.bases) {
        (Some(path), _) => load_basis(path, run),
        (None, Some(count)) => Ok(PuBasis::new(BasisConfig::new(
            count,
            WarpParams::new(src.s, src.p)?,
            src.offset_nm,
        ))?),
        (None, None) => Err(Failure::Usage(
            "a basis is required: pass --basis FILE or -K COUNT".into(),
        )),
    }
}

fn parse_policy(text: &str) -> CliResult<TrianglePolicy> {
    match text.to_ascii_lowercase().as_str() {
        "random" => Ok(TrianglePolicy::Random),
        "largest" => Ok(TrianglePolicy::Largest),
        "first" => Ok(TrianglePolicy::First),
        other => other
            .parse::<usize>()
            .map(TrianglePolicy::Fixed)
            .map_err(|_| Failure::Usage(format!("unknown triangle policy '{text}'"))),
    }
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn basis(cmd: &BasisCmd, command: &Command) -> CliResult<()> {
    let mut run = Run::new(&cmd.out)?;
    let rgb = rgb_space(&cmd.rgb)?;
    let built = run.phase("build", || -> CliResult<PuBasis> {
        let base = PuBasis::new(BasisConfig::new(
            cmd.bases,
            WarpParams::new(cmd.s, cmd.p)?,
            cmd.offset_nm,
        ))?;
        match &cmd.illuminant {
            Some(name) => Ok(base.with_illuminant(&illuminant(name)?)?),
            None => Ok(base),
        }
    })?;
    let metrics = run.phase("metrics", || design_metrics(&built, rgb))?;

    run.write("basis.json", built.to_document().to_json() + "\n")?;
    let mut gamut = String::from("index,x,y,X,Y,Z\n");
    for (k, (c, xyz)) in built.chromaticities().iter().zip(built.colors()).enumerate() {
        writeln!(gamut, "{k},{},{},{},{},{}", c.x, c.y, xyz.x, xyz.y, xyz.z).unwrap();
    }
    run.write("gamut.csv", gamut)?;

    println!(
        "basis K={} s={} p={} offset={} nm illuminant={}",
        built.count(),
        cmd.s,
        cmd.p,
        cmd.offset_nm,
        built.illuminant_tag()
    );
    println!("excess_area ({rgb}) = {:.6}", metrics.excess_area);
    println!("smoothness_nm = {:.3}", metrics.smoothness_nm);
    run.set_result(json!(metrics));
    run.finish(command)
}

fn optimize(cmd: &OptimizeCmd, command: &Command) -> CliResult<()> {
    let mut run = Run::new(&cmd.out)?;
    let mut search = WarpSearch::new(cmd.bases);
    search.rgb = rgb_space(&cmd.rgb)?;
    search.threshold_nm = cmd.threshold;
    search.direction = match cmd.direction {
        Direction::AtLeast => ConstraintDirection::AtLeast,
        Direction::Below => ConstraintDirection::Below,
    };
    search.grid_s = cmd.grid_s.unwrap_or(cmd.grid);
    search.grid_p = cmd.grid_p.unwrap_or(cmd.grid);
    search.boundary_offset_nm = cmd.offset_nm;

    let best = run.phase("search", || optimize_warp(&search))?;
    let mut csv = Vec::new();
    write_metrics_csv(&best.cells, &mut csv)?;
    run.write("metrics.csv", csv)?;

    println!(
        "searched {}x{} grid, smoothness {} {} nm",
        search.grid_s, search.grid_p, search.direction, search.threshold_nm
    );
    println!(
        "chosen s={} p={} excess_area={:.6} smoothness_nm={:.3}",
        best.warp.s, best.warp.p, best.metrics.excess_area, best.metrics.smoothness_nm
    );
    run.set_result(json!({
        "s": best.warp.s,
        "p": best.warp.p,
        "excess_area": best.metrics.excess_area,
        "smoothness_nm": best.metrics.smoothness_nm,
    }));
    run.finish(command)
}

fn write_samples(run: &mut Run, basis: &PuBasis, samples: &[ClassSample]) -> CliResult<()> {
    let k = basis.count();
    let mut csv = String::from("stream,triangle,luminance_met,scaled,achieved_luminance");
    for i in 0..k {
        write!(csv, ",w_{i}").unwrap();
    }
    csv.push('\n');
    for s in samples {
        let triangle = s.triangle.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-");
        writeln!(
            csv,
            "{},{triangle},{},{},{},{}",
            s.stream,
            s.luminance_met,
            s.scaled,
            s.achieved_luminance,
            join(s.w.iter().copied())
        )
        .unwrap();
    }
    run.write("samples.csv", csv)?;

    let spectra = samples
        .iter()
        .map(|s| basis.reconstruct_visible(&s.w))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("wavelength_nm");
    for s in samples {
        write!(csv, ",stream_{}", s.stream).unwrap();
    }
    csv.push('\n');
    if let Some(first) = spectra.first() {
        for (i, nm) in first.wavelengths().enumerate() {
            writeln!(csv, "{nm},{}", join(spectra.iter().map(|c| c.values()[i]))).unwrap();
        }
    }
    run.write("spectra.csv", csv)?;
    Ok(())
}

fn sample(cmd: &SampleCmd, command: &Command) -> CliResult<()> {
    if cmd.count == 0 || cmd.batch == 0 {
        return Err(Failure::Usage("--count and --batch must be positive".into()));
    }
    let mut run = Run::new(&cmd.out)?;
    let clock = Instant::now();
    let basis = resolve_basis(&cmd.basis, &mut run)?;
    run.record("load", clock.elapsed().as_secs_f64());
    let policy = parse_policy(&cmd.policy)?;
    let target = ColorTarget::new(cmd.target.cx, cmd.target.cy, cmd.target.luminance)?;
    let feasibility = run.phase("feasibility", || feasibility_check(&basis, &target))?;
    println!(
        "target ({}, {}) Y={}: max luminance {:.6} at f<=1, feasible={}",
        cmd.target.cx, cmd.target.cy, cmd.target.luminance, feasibility.max_scaled_luminance, feasibility.feasible
    );

    let samples = match ClassSampler::new(&basis, target) {
        Ok(sampler) => {
            let mut samples = Vec::with_capacity(cmd.count);
            let batches = cmd.count.div_ceil(cmd.batch);
            for b in 0..batches {
                let start = (b * cmd.batch) as u64;
                let end = ((b + 1) * cmd.batch).min(cmd.count) as u64;
                let clock = Instant::now();
                let batch = sampler.sample_streams(start..end, cmd.seed, policy)?;
                let seconds = clock.elapsed().as_secs_f64();
                println!(
                    "timing batch {}/{}: {} samples in {:.3} ms ({:.2} us/sample)",
                    b + 1,
                    batches,
                    batch.len(),
                    seconds * 1e3,
                    seconds * 1e6 / batch.len() as f64
                );
                run.record(&format!("sample batch {}", b + 1), seconds);
                samples.extend(batch);
            }
            samples
        }
        Err(Error::BoundarySingular { first, second, .. }) => {
            println!("target lies on the gamut boundary: single solution on bases {first} and {second}");
            vec![boundary_solution(&basis, &target, first, second, cmd.seed)?]
        }
        Err(e) => return Err(e.into()),
    };

    let clock = Instant::now();
    write_samples(&mut run, &basis, &samples)?;
    run.record("write", clock.elapsed().as_secs_f64());

    let met = samples.iter().filter(|s| s.luminance_met).count();
    let fraction = met as f64 / samples.len() as f64;
    println!("achieving fraction {fraction:.4} ({met}/{})", samples.len());
    run.set_result(json!({
        "samples": samples.len(),
        "achieving": met,
        "achieving_fraction": fraction,
        "max_luminance": feasibility.max_scaled_luminance,
        "feasible": feasibility.feasible,
    }));
    run.finish(command)
}

fn weights_from_samples(path: &Path, row: usize) -> CliResult<Vec<f64>> {
    let text = read_text(path)?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let columns: Vec<usize> = (0..header.len()).filter(|&i| header[i].starts_with("w_")).collect();
    if columns.is_empty() {
        return Err(Error::Parse(format!("{} has no weight columns", path.display())).into());
    }
    let line = lines
        .nth(row)
        .ok_or_else(|| Failure::Usage(format!("{} has no row {row}", path.display())))?;
    let fields: Vec<&str> = line.split(',').collect();
    columns
        .iter()
        .map(|&i| {
            fields
                .get(i)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| Error::Parse(format!("bad weight in row {row} of {}", path.display())).into())
        })
        .collect()
}

fn trajectory(cmd: &TrajectoryCmd, command: &Command) -> CliResult<()> {
    let mut run = Run::new(&cmd.out)?;
    let basis = resolve_basis(&cmd.basis, &mut run)?;
    let w = match (&cmd.weights, &cmd.samples) {
        (Some(w), _) => w.clone(),
        (None, Some(path)) => {
            run.input(path);
            weights_from_samples(path, cmd.row)?
        }
        (None, None) => return Err(Failure::Usage("pass --weights or --samples".into())),
    };
    let light = cmd.illuminant.as_deref().map(illuminant).transpose()?;
    let depths = cmd.depths.clone().unwrap_or_else(default_depths);
    let t1 = basis.reconstruct_visible(&w)?;
    let traj = run.phase("trajectory", || depth_trajectory(&t1, &depths, light.as_ref()))?;

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    run.write("trajectory.csv", csv)?;
    let mut csv = Vec::new();
    t1.write_csv(&mut csv)?;
    run.write("spectrum.csv", csv)?;
    let medium = match medium_coefficients(&t1) {
        Ok(m) => {
            let mut csv = String::from("wavelength_nm,sigma_s,sigma_a,clamped\n");
            for (i, nm) in m.sigma_s.wavelengths().enumerate() {
                writeln!(
                    csv,
                    "{nm},{},{},{}",
                    m.sigma_s.values()[i],
                    m.sigma_a.values()[i],
                    m.clamped_mask[i]
                )
                .unwrap();
            }
            run.write("medium.csv", csv)?;
            json!({"clamped": m.clamped})
        }
        Err(e @ Error::InfiniteExtinction { .. }) => {
            println!("medium coefficients skipped: {e}");
            serde_json::Value::Null
        }
        Err(e) => return Err(e.into()),
    };

    let unit = traj.depths.iter().position(|d| *d == 1.0);
    let at_one = unit.and_then(|i| traj.points[i].map(|c| (c, traj.luminances[i])));
    if let Some((c, y)) = at_one {
        println!("d=1: x={:.6} y={:.6} Y={:.6}", c.x, c.y, y);
    }
    println!("{} depths written", traj.depths.len());
    run.set_result(json!({
        "at_unit_depth": at_one.map(|(c, y)| json!({"x": c.x, "y": c.y, "Y": y})),
        "medium": medium,
    }));
    run.finish(command)
}

/// Palette document shared by `palette` and `hide`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaletteFile {
    pub basis: BasisDocument,
    pub first: String,
    pub second: String,
    pub target: ColorTarget,
    pub seed: u64,
    pub entries: Vec<MetamerPaletteEntry>,
}

fn palette(cmd: &PaletteCmd, command: &Command) -> CliResult<()> {
    let mut run = Run::new(&cmd.out)?;
    let basis = resolve_basis(&cmd.basis, &mut run)?;
    let (first, second) = (illuminant(&cmd.first)?, illuminant(&cmd.second)?);
    let (cx, cy) = match (cmd.cx, cmd.cy) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            let white = first.white_point();
            (white.x, white.y)
        }
    };
    let target = ColorTarget::new(cx, cy, cmd.luminance)?;
    let mut settings = PaletteSettings::new(cmd.count, cmd.seed);
    settings.keep_unmet = cmd.keep_unmet;
    let entries = run.phase("palette", || {
        metameric_palette(&basis, &first, &second, &target, &settings)
    })?;

    let file = PaletteFile {
        basis: basis.to_document(),
        first: first.name().to_string(),
        second: second.name().to_string(),
        target,
        seed: cmd.seed,
        entries,
    };
    run.write(
        "palette.json",
        serde_json::to_string_pretty(&file).expect("palette serializes") + "\n",
    )?;
    let mut csv = String::from("index,stream,X1,Y1,Z1,X2,Y2,Z2,x2,y2\n");
    for (i, e) in file.entries.iter().enumerate() {
        let (a, b) = (e.color_under_first, e.color_under_second);
        let c = b.chromaticity().ok();
        writeln!(
            csv,
            "{i},{},{},{},{},{},{},{},{},{}",
            e.stream,
            a.x,
            a.y,
            a.z,
            b.x,
            b.y,
            b.z,
            c.map_or(f64::NAN, |c| c.x),
            c.map_or(f64::NAN, |c| c.y)
        )
        .unwrap();
    }
    run.write("palette.csv", csv)?;

    let spread = palette_spread(&file.entries);
    println!(
        "{} metamers of ({cx:.4}, {cy:.4}) Y={} under {}, spread under {} = {spread:.6}",
        file.entries.len(),
        cmd.luminance,
        file.first,
        file.second
    );
    run.set_result(json!({"entries": file.entries.len(), "spread": spread}));
    run.finish(command)
}

fn hide(cmd: &HideCmd, command: &Command) -> CliResult<()> {
    let mut run = Run::new(&cmd.out)?;
    run.input(&cmd.palette);
    let file: PaletteFile = serde_json::from_str(&read_text(&cmd.palette)?).map_err(Error::from)?;
    let basis = PuBasis::from_document(&file.basis)?;
    let (first, second) = (illuminant(&file.first)?, illuminant(&file.second)?);

    let (pair, result) = if let Some(mask_path) = &cmd.mask {
        run.input(mask_path);
        let mask = Mask::load(mask_path)?;
        let chosen = equalized_pair(&basis, &second, &file.entries, file.target.luminance)?;
        let pair = run.phase("render", || {
            hidden_pattern(&mask, &chosen.clear, &chosen.set, &basis, &first, &second)
        })?;
        let levels = |img| region_difference(img, &mask).iter().fold(0.0f64, |m, v| m.max(*v)) * 255.0;
        let (hidden, shown) = (levels(&pair.first), levels(&pair.second));
        println!(
            "pair at Y={:.6}: difference {hidden:.2}/255 under {}, {shown:.2}/255 under {}",
            chosen.luminance, file.first, file.second
        );
        let result = json!({
            "luminance": chosen.luminance,
            "luminance_met": chosen.luminance_met,
            "separation": chosen.separation,
            "difference_first": hidden,
            "difference_second": shown,
        });
        (pair, result)
    } else {
        let gray_path = cmd.gray.as_ref().expect("clap requires --mask or --gray");
        run.input(gray_path);
        let gray = load_gray(gray_path)?;
        let rank = match cmd.rank {
            Rank::First => LuminanceRank::First,
            Rank::Second => LuminanceRank::Second,
        };
        let chosen = select_by_luminance(&file.entries, cmd.levels, rank)?;
        let pair: ImagePair = run.phase("render", || {
            hidden_image(&gray, &chosen, rank, &basis, &first, &second, cmd.levels)
        })?;
        println!(
            "blended {} palette entries over {}x{} pixels",
            chosen.len(),
            gray.width(),
            gray.height()
        );
        (pair, json!({"levels": chosen.len()}))
    };

    let first_path = run.path("first.png");
    save_png(&pair.first, &first_path)?;
    run.wrote(first_path);
    let second_path = run.path("second.png");
    save_png(&pair.second, &second_path)?;
    run.wrote(second_path);
    run.set_result(result);
    run.finish(command)
}

fn serve(cmd: &ServeCmd) -> CliResult<()> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(format!("cannot start runtime: {e}")))?;
    runtime
        .block_on(spectral_service::serve(SocketAddr::new(cmd.host, cmd.port)))
        .map_err(|e| Failure::Io(format!("server failed: {e}")))
}

fn replay(cmd: &ReplayCmd) -> CliResult<()> {
    let manifest = RunManifest::load(&cmd.manifest)?;
    let mut command = manifest.parameters;
    let Some(out) = command.out_mut() else {
        return Err(Failure::Usage(format!(
            "'{}' runs cannot be replayed",
            manifest.command
        )));
    };
    if let Some(dir) = &cmd.out {
        *out = dir.clone();
    }
    println!("replaying {} into {}", manifest.command, out.display());
    execute(command)
}
