use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tomo_core::grains::{gbpd_assign, gbpd_fit, volume_bounds, GbpdSpec, LabelMap};
use tomo_core::image::{parse_pgm, BinaryImage};
use tomo_core::io::{dr_instance_to_json, instance_to_json, parse_dr_instance, parse_instance, parse_set, set_to_file, set_to_json, SetFile};
use tomo_core::lattice::distinct_directions;
use tomo_core::pte::{pte_from_switching, pte_verify, project, prouhet_solution, PteOutcome};
use tomo_core::recon2::{count_solutions_bruteforce, reconstruct_two_directions, unique2, Codomain};
use tomo_core::reconm::{alternating_directions, reconstruct_bruteforce};
use tomo_core::superres::{dr_solve, DrInstance};
use tomo_core::switching::{zonotope_switching, zonotope_switching_with_steps};
use tomo_core::tracking::{markov_track, rolling_horizon, squared_step, RollingOutcome, TrackSet, WeightModel};
use tomo_core::{grid, xray_difference, BoundingBox, Direction, Instance, Point, WeightedLatticeSet};

use crate::{svg, Cli, DrCmd, Failure, GrainsCmd, Ints, PteCmd, RollingModel, TrackCmd, Verb};

type CmdResult = Result<(), Failure>;

pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match &cli.verb {
        Verb::Xray(a) => xray_cmd(cli, a, out),
        Verb::Reconstruct(a) => reconstruct_cmd(cli, a, out, err),
        Verb::Unique(a) => unique_cmd(a, out),
        Verb::Count(a) => count_cmd(cli, a, out, err),
        Verb::Switch(a) => switch_cmd(a, out),
        Verb::Dr { cmd } => dr_cmd(cli, cmd, out),
        Verb::Track { cmd } => track_cmd(cmd, out, err),
        Verb::Grains { cmd } => grains_cmd(cli, cmd, out),
        Verb::Pte { cmd } => pte_cmd(cmd, out),
        Verb::Stability(a) => {
            let dirs = directions(&a.dirs)?;
            let delta = xray_difference(&load_set(&a.a)?, &load_set(&a.b)?, &dirs)?;
            writeln!(out, "{delta}")?;
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn located(path: &Path) -> impl Fn(tomo_core::Error) -> Failure + '_ {
    move |e| Failure::usage(format!("{}: {e}", path.display()))
}

fn load_instance(path: &Path, err: &mut dyn Write) -> Result<Instance, Failure> {
    let parsed = parse_instance(&read(path)?).map_err(located(path))?;
    for w in &parsed.warnings {
        writeln!(err, "warning: {}: {w}", path.display())?;
    }
    Ok(parsed.instance)
}

fn load_set(path: &Path) -> Result<WeightedLatticeSet, Failure> {
    parse_set(&read(path)?).map_err(located(path))
}

fn directions(dirs: &[Ints]) -> Result<Vec<Direction>, Failure> {
    let vs: Vec<Vec<i64>> = dirs.iter().map(|d| d.0.clone()).collect();
    Ok(distinct_directions(&vs)?)
}

/// Writes `text` to `path`, or to `out` when no path is given.
fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn base_point(base: Option<&Ints>, dim: usize) -> Point {
    base.map_or_else(|| Point::origin(dim), |b| Point::from(b.0.clone()))
}

/// Maps `f` over `items` on up to `jobs` threads, keeping the input order.
fn parallel_map<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// The bounding box of the grid, used when no search box is given.
fn grid_box(inst: &Instance) -> Result<BoundingBox, Failure> {
    let pts = grid(inst)?;
    let set = WeightedLatticeSet::from_points(inst.dim(), pts)?;
    Ok(set.bounding_box().unwrap_or_else(|| BoundingBox::cube(inst.dim(), 1)))
}

fn xray_cmd(cli: &Cli, a: &crate::XrayArgs, out: &mut dyn Write) -> CmdResult {
    let set = match (&a.set, a.random) {
        (Some(path), _) => load_set(path)?,
        (None, Some(k)) => random_set(cli.seed, a.dim, a.size, k)?,
        (None, None) => return Err(Failure::usage("xray needs --set or --random")),
    };
    if let Some(p) = &a.set_out {
        emit(out, Some(p), &set_to_json(&set))?;
    }
    let inst = Instance::from_set(&set, &directions(&a.dirs)?)?;
    emit(out, a.out.as_ref(), &instance_to_json(&inst))
}

fn random_set(seed: u64, dim: usize, size: i64, k: usize) -> Result<WeightedLatticeSet, Failure> {
    if size < 1 {
        return Err(Failure::usage("--size must be positive"));
    }
    let points = BoundingBox::cube(dim, size).points();
    if k > points.len() {
        return Err(Failure::usage(format!("cannot draw {k} points from a box of {}", points.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen = sample(&mut rng, points.len(), k);
    Ok(WeightedLatticeSet::from_points(dim, chosen.into_iter().map(|i| points[i].clone()))?)
}

enum Solved {
    Set(WeightedLatticeSet),
    Infeasible(String, Option<WeightedLatticeSet>),
}

#[derive(Serialize)]
struct SolveRecord<'a> {
    instance: &'a str,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    set: Option<SetFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

fn reconstruct_cmd(cli: &Cli, a: &crate::ReconstructArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut insts = Vec::with_capacity(a.instances.len());
    for p in &a.instances {
        insts.push(load_instance(p, err)?);
    }
    let results = parallel_map(cli.jobs, &insts, |inst| solve_one(inst, a));
    if let [single] = &results[..] {
        return match single {
            Err(f) => Err(Failure { code: f.code, message: f.message.clone() }),
            Ok(Solved::Set(s)) => emit(out, a.out.as_ref(), &set_to_json(s)),
            Ok(Solved::Infeasible(msg, best)) => {
                if let Some(s) = best {
                    emit(out, a.out.as_ref(), &set_to_json(s))?;
                }
                Err(Failure::infeasible(msg.clone()))
            }
        };
    }
    let mut text = String::new();
    let mut code = crate::EXIT_OK;
    for (path, r) in a.instances.iter().zip(results) {
        let name = path.display().to_string();
        let record = match r? {
            Solved::Set(s) => SolveRecord { instance: &name, status: "solved", set: Some(set_to_file(&s)), message: None },
            Solved::Infeasible(msg, best) => {
                code = crate::EXIT_INFEASIBLE;
                SolveRecord { instance: &name, status: "infeasible", set: best.as_ref().map(set_to_file), message: Some(msg) }
            }
        };
        text += &serde_json::to_string(&record).expect("serialisable");
        text.push('\n');
    }
    emit(out, a.out.as_ref(), &text)?;
    if code == crate::EXIT_OK {
        Ok(())
    } else {
        Err(Failure::infeasible("infeasible: at least one instance has no solution"))
    }
}

fn solve_one(inst: &Instance, a: &crate::ReconstructArgs) -> Result<Solved, Failure> {
    let m = inst.num_directions();
    let none = || Solved::Infeasible("infeasible".to_string(), None);
    if m == 2 && !a.brute && !a.alternating {
        let codomain = if a.natural { Codomain::Natural } else { Codomain::Binary };
        return Ok(reconstruct_two_directions(inst, codomain)?.map_or_else(none, Solved::Set));
    }
    if a.natural {
        return Err(Failure::usage("--natural applies to two-direction exact reconstruction only"));
    }
    if a.brute {
        let bbox = match &a.bbox {
            Some(b) => b.clone(),
            None => grid_box(inst)?,
        };
        return Ok(reconstruct_bruteforce(inst, &bbox)?.map_or_else(none, Solved::Set));
    }
    if a.alternating {
        let r = alternating_directions(inst, a.max_rounds)?;
        return Ok(if r.residual == 0 {
            Solved::Set(r.set)
        } else {
            Solved::Infeasible(format!("infeasible: no exact solution found, residual {}", r.residual), Some(r.set))
        });
    }
    Err(Failure::usage(format!("{m} directions: choose --brute or --alternating")))
}

fn unique_cmd(a: &crate::UniqueArgs, out: &mut dyn Write) -> CmdResult {
    let set = load_set(&a.set)?;
    let dirs = directions(&a.dirs)?;
    let unique = if dirs.len() == 2 && a.bbox.is_none() {
        unique2(&set, &dirs)?
    } else {
        let inst = Instance::from_set(&set, &dirs)?;
        let bbox = match &a.bbox {
            Some(b) => b.clone(),
            None => grid_box(&inst)?,
        };
        count_solutions_bruteforce(&inst, &bbox)? == 1
    };
    writeln!(out, "{}", if unique { "unique" } else { "not unique" })?;
    Ok(())
}

fn count_cmd(cli: &Cli, a: &crate::CountArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut insts = Vec::with_capacity(a.instances.len());
    for p in &a.instances {
        insts.push(load_instance(p, err)?);
    }
    let counts = parallel_map(cli.jobs, &insts, |inst| -> Result<u64, Failure> {
        let bbox = match &a.bbox {
            Some(b) => b.clone(),
            None => grid_box(inst)?,
        };
        Ok(count_solutions_bruteforce(inst, &bbox)?)
    });
    for (path, c) in a.instances.iter().zip(counts) {
        let c = c?;
        if a.instances.len() == 1 {
            writeln!(out, "{c}")?;
        } else {
            writeln!(out, "{}\t{c}", path.display())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PairFile {
    directions: Vec<Vec<i64>>,
    steps: Vec<i64>,
    plus: SetFile,
    minus: SetFile,
}

fn switch_cmd(a: &crate::SwitchArgs, out: &mut dyn Write) -> CmdResult {
    let dirs = directions(&a.dirs)?;
    let dim = dirs[0].dim();
    let base = base_point(a.base.as_ref(), dim);
    let pair = match &a.steps {
        Some(s) => zonotope_switching_with_steps(&dirs, &base, &s.0)?,
        None => zonotope_switching(&dirs, &base)?,
    };
    if let Some(p) = &a.svg {
        if dim != 2 {
            return Err(Failure::usage("--svg draws planar pairs only"));
        }
        emit(out, Some(p), &svg::switching_pair(&pair.plus, &pair.minus))?;
    }
    let file = PairFile {
        directions: pair.directions.iter().map(|d| d.components().to_vec()).collect(),
        steps: pair.steps.clone(),
        plus: set_to_file(&pair.plus),
        minus: set_to_file(&pair.minus),
    };
    emit(out, a.out.as_ref(), &(serde_json::to_string_pretty(&file).expect("serialisable") + "\n"))
}

fn load_binary_image(path: &Path) -> Result<BinaryImage, Failure> {
    let pgm = parse_pgm(&read(path)?).map_err(located(path))?;
    let mut img = BinaryImage::new(pgm.height, pgm.width);
    for (n, &v) in pgm.values.iter().enumerate() {
        img.set(n / pgm.width, n % pgm.width, v != 0);
    }
    Ok(img)
}

fn dr_cmd(cli: &Cli, cmd: &DrCmd, out: &mut dyn Write) -> CmdResult {
    match cmd {
        DrCmd::Make { image, k, epsilon, unreliable, out: path } => {
            let img = load_binary_image(image)?;
            let mut inst = DrInstance::from_image(&img, *k)?;
            for b in unreliable {
                let [i, j] = b.0[..] else {
                    return Err(Failure::usage("--unreliable takes a block index `i,j`"));
                };
                let key = (usize::try_from(i).unwrap_or(usize::MAX), usize::try_from(j).unwrap_or(usize::MAX));
                if !inst.reliable.remove(&key) {
                    return Err(Failure::usage(format!("no block {i},{j}")));
                }
            }
            inst.epsilon = *epsilon;
            emit(out, path.as_ref(), &dr_instance_to_json(&inst))
        }
        DrCmd::Solve { instances, out: path } => {
            let mut insts = Vec::with_capacity(instances.len());
            for p in instances {
                insts.push(parse_dr_instance(&read(p)?).map_err(located(p))?);
            }
            let results = parallel_map(cli.jobs, &insts, dr_solve);
            let mut text = String::new();
            let mut infeasible = Vec::new();
            for (p, r) in instances.iter().zip(results) {
                match r? {
                    Some(img) => text += &img.to_pgm(),
                    None => infeasible.push(p.display().to_string()),
                }
            }
            if !text.is_empty() {
                emit(out, path.as_ref(), &text)?;
            }
            if infeasible.is_empty() {
                Ok(())
            } else {
                Err(Failure::infeasible(format!("infeasible: {}", infeasible.join(", "))))
            }
        }
    }
}

#[derive(Serialize)]
struct TrackRecord<'a> {
    particle: usize,
    points: &'a [Point],
}

fn track_lines(tracks: &TrackSet) -> String {
    let mut text = String::new();
    for (i, tr) in tracks.tracks.iter().enumerate() {
        text += &serde_json::to_string(&TrackRecord { particle: i, points: tr }).expect("serialisable");
        text.push('\n');
    }
    text
}

fn frame_points(path: &Path) -> Result<Vec<Point>, Failure> {
    let set = load_set(path)?;
    if !set.is_binary() {
        return Err(Failure::usage(format!("{}: frames must list each particle once with weight 1", path.display())));
    }
    Ok(set.points().cloned().collect())
}

fn track_cmd(cmd: &TrackCmd, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match cmd {
        TrackCmd::Markov { frames, out: path } => {
            let frames: Vec<Vec<Point>> = frames.iter().map(|p| frame_points(p)).collect::<Result<_, _>>()?;
            let tracks = markov_track(&frames, squared_step)?;
            emit(out, path.as_ref(), &track_lines(&tracks))
        }
        TrackCmd::Rolling { first, data, model, frames_out, out: path } => {
            let first = frame_points(first)?;
            let data: Vec<Instance> = data.iter().map(|p| load_instance(p, err)).collect::<Result<_, _>>()?;
            let model = match model {
                RollingModel::NearestPredecessor => WeightModel::NearestPredecessor,
                RollingModel::ConstantVelocity => WeightModel::ConstantVelocity,
            };
            match rolling_horizon(&first, &data, model)? {
                RollingOutcome::Solved { frames, tracks } => {
                    if let Some(prefix) = frames_out {
                        for (tau, f) in frames.iter().enumerate() {
                            let set = WeightedLatticeSet::from_points(first[0].dim(), f.iter().cloned())?;
                            let p = PathBuf::from(format!("{prefix}{}.json", tau + 1));
                            emit(out, Some(&p), &set_to_json(&set))?;
                        }
                    }
                    emit(out, path.as_ref(), &track_lines(&tracks))
                }
                RollingOutcome::InfeasibleFrame(tau) => Err(Failure::infeasible(format!("infeasible: frame {tau} has no solution"))),
            }
        }
    }
}

/// Diagram file and label-map sidecar.
#[derive(Serialize, Deserialize)]
struct GrainsFile {
    sites: Vec<Vec<f64>>,
    matrices: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    weights: Vec<f64>,
    #[serde(default)]
    volumes: Vec<usize>,
}

fn write_label_map(out: &mut dyn Write, prefix: &Path, map: &LabelMap, spec: &GbpdSpec) -> CmdResult {
    let side = GrainsFile {
        sites: spec.sites.clone(),
        matrices: spec.matrices.clone(),
        weights: spec.weights.clone(),
        volumes: map.volumes(spec.len()),
    };
    emit(out, Some(&prefix.with_extension("pgm")), &map.to_pgm()?)?;
    emit(out, Some(&prefix.with_extension("json")), &(serde_json::to_string_pretty(&side).expect("serialisable") + "\n"))
}

fn random_spec(seed: u64, l: usize, rows: i64, cols: i64) -> Result<GbpdSpec, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites: Vec<Vec<f64>> = Vec::with_capacity(l);
    while sites.len() < l {
        let s = vec![rng.gen_range(0.0..rows as f64), rng.gen_range(0.0..cols as f64)];
        if !sites.contains(&s) {
            sites.push(s);
        }
    }
    let matrices = (0..l)
        .map(|_| {
            let b: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let off = b[0] * b[2] + b[1] * b[3];
            vec![vec![b[0] * b[0] + b[1] * b[1] + 0.5, off], vec![off, b[2] * b[2] + b[3] * b[3] + 0.5]]
        })
        .collect();
    let weights = (0..l).map(|_| rng.gen_range(0.0..(rows * cols) as f64 / 8.0)).collect();
    Ok(GbpdSpec::new(sites, matrices, weights)?)
}

fn grains_cmd(cli: &Cli, cmd: &GrainsCmd, out: &mut dyn Write) -> CmdResult {
    match cmd {
        GrainsCmd::Assign { spec, random, size, out: prefix, svg: svg_path } => {
            let [rows, cols] = size.0[..] else {
                return Err(Failure::usage("--size takes `rows,cols`"));
            };
            if rows < 1 || cols < 1 {
                return Err(Failure::usage("--size must be positive"));
            }
            let spec = match (spec, random) {
                (Some(p), _) => {
                    let f: GrainsFile = serde_json::from_str(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
                    let weights = if f.weights.is_empty() { vec![0.0; f.sites.len()] } else { f.weights };
                    GbpdSpec::new(f.sites, f.matrices, weights).map_err(located(p))?
                }
                (None, Some(l)) => random_spec(cli.seed, *l, rows, cols)?,
                (None, None) => return Err(Failure::usage("grains assign needs --spec or --random")),
            };
            let domain = BoundingBox::new([0, 0], [rows - 1, cols - 1])?;
            let map = gbpd_assign(&spec, &domain)?;
            if let Some(p) = svg_path {
                emit(out, Some(p), &svg::label_map(&map, &spec.sites))?;
            }
            write_label_map(out, prefix, &map, &spec)
        }
        GrainsCmd::Fit { labels, spec, tol, out: prefix, svg: svg_path } => {
            let f: GrainsFile = serde_json::from_str(&read(spec)?).map_err(|e| Failure::usage(format!("{}: {e}", spec.display())))?;
            let pgm = parse_pgm(&read(labels)?).map_err(located(labels))?;
            let l = f.sites.len();
            let domain = BoundingBox::new([0, 0], [pgm.height as i64 - 1, pgm.width as i64 - 1])?;
            let mut given = LabelMap::unassigned(domain.clone());
            let mut pixels = Vec::new();
            for (n, &v) in pgm.values.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                if v as usize > l {
                    return Err(Failure::usage(format!("{}: label {v} but only {l} sites", labels.display())));
                }
                let p = Point::from([(n / pgm.width) as i64, (n % pgm.width) as i64]);
                given.set(&p, Some(v as usize - 1))?;
                pixels.push(p);
            }
            let (lower, upper) = volume_bounds(&given.volumes(l), *tol);
            let Some(fit) = gbpd_fit(&pixels, &f.sites, &f.matrices, &lower, &upper)? else {
                return Err(Failure::infeasible("infeasible: the volume bounds admit no assignment"));
            };
            let fitted = fit.spec(&f.sites, &f.matrices)?;
            let map = fit.label_map(&domain, &pixels)?;
            if let Some(p) = svg_path {
                emit(out, Some(p), &svg::label_map(&map, &fitted.sites))?;
            }
            write_label_map(out, prefix, &map, &fitted)?;
            let summary = serde_json::json!({
                "cost": fit.cost,
                "scaled_cost": fit.scaled_cost,
                "agreement": map.agreement(&given)?,
            });
            writeln!(out, "{summary}")?;
            Ok(())
        }
    }
}

fn pte_cmd(cmd: &PteCmd, out: &mut dyn Write) -> CmdResult {
    match cmd {
        PteCmd::Verify { x, y, k } => {
            let ok = pte_verify(&x.0, &y.0, *k)?;
            writeln!(out, "{ok}")?;
            if ok {
                Ok(())
            } else {
                Err(Failure::infeasible(format!("power sums differ at some degree up to {k}")))
            }
        }
        PteCmd::Project { set, c } => {
            let values = project(&load_set(set)?, &c.0)?;
            writeln!(out, "{}", serde_json::to_string(&values).expect("serialisable"))?;
            Ok(())
        }
        PteCmd::Derive { dirs, base, c } => {
            let dirs = directions(dirs)?;
            let pair = zonotope_switching(&dirs, &base_point(base.as_ref(), dirs[0].dim()))?;
            match pte_from_switching(&pair, &c.0)? {
                PteOutcome::Solution(p) => {
                    writeln!(out, "{}", serde_json::to_string(&p).expect("serialisable"))?;
                    Ok(())
                }
                PteOutcome::Degenerate => Err(Failure::infeasible("degenerate: both classes project onto the same multiset")),
            }
        }
        PteCmd::Prouhet { k } => {
            let p = prouhet_solution(*k)?;
            writeln!(out, "{}", serde_json::to_string(&p).expect("serialisable"))?;
            Ok(())
        }
    }
}
