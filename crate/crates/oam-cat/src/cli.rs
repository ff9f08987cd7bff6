//! Command-line front end. One subcommand per figure family; every command
//! writes its outputs plus a JSON metadata sidecar that records the full
//! parameter set, the tool version, and the seed, so any run can be
//! reproduced exactly.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use crate::analysis::{
    bloch_closed_form, bloch_scan, mub_bases, mub_probabilities, reconstruct_density,
    spiral_spectrum, truncate_and_renormalize, visibility,
};
use crate::cat::{
    acst_field, cat_coefficients, cat_field, cat_intensity_analytic, macroscopicity, parity_class,
    AlphaParam, CatSpec,
};
use crate::density::fidelity_pure;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, Grid2D};
use crate::holography::{simulate_reconstruction, synthesize_hologram};
use crate::io::{fmt_f64, write_csv, write_json, write_matrix_csv, write_pgm, GrayScale};
use crate::lobes::lobe_metrics;
use crate::modes::{lg_mode, LGModeSpec, WaistPolicy};
use crate::propagation::{interfere_plane_wave, winding_number};
use crate::turbulence::{cat_fidelity_vs_strength, ChannelSpec, SweepConfig};
use crate::wigner::{wigner_qcs, PhaseSpaceGrid};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const OUT_DIR_ENV: &str = "OAM_CAT_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "oam-cat",
    version,
    about = "Analogous cat states from orbital-angular-momentum light: \
             synthesis, holography, tomography, and turbulence, all on disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (default: $OAM_CAT_OUT_DIR, then the current directory)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cat-state intensity and phase images plus lobe metrics
    Field(FieldArgs),
    /// Spiral spectrum of a cat or coherent state
    Spectrum(SpectrumArgs),
    /// Wigner map of the matching quantum cat state
    Wigner(WignerArgs),
    /// Amplitude-encoded phase hologram of a target field
    Holo(HoloArgs),
    /// Hologram synthesis plus simulated first-order reconstruction
    Reconstruct(HoloArgs),
    /// Interferogram against a tilted plane wave, with winding numbers
    Interfere(InterfereArgs),
    /// Bloch-sphere interference scan and visibility
    Bloch(BlochArgs),
    /// MUB projection probabilities and tomography round trip
    Mub(MubArgs),
    /// Turbulence fidelity decay and mode survival curves
    Turb(TurbArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PolicyArg {
    Constant,
    Eq5,
}

impl From<PolicyArg> for WaistPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Constant => WaistPolicy::Constant,
            PolicyArg::Eq5 => WaistPolicy::Eq5,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum TargetArg {
    Cat,
    Coherent,
    Lg,
    Gaussian,
}

/// Physical beam and grid parameters shared by most commands.
#[derive(Args, Debug, Serialize)]
struct BeamArgs {
    /// Vacuum wavelength in meters
    #[arg(long, default_value_t = 780e-9)]
    wavelength: f64,
    /// Input Gaussian waist w0 in meters
    #[arg(long, default_value_t = 200e-6)]
    waist: f64,
    /// Samples per grid side (power of two recommended)
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Full grid extent in meters (default: 12 waists, 32 for the eq5 policy)
    #[arg(long)]
    extent: Option<f64>,
    /// Cat size |alpha|^2
    #[arg(long, default_value_t = 3.5)]
    alpha_sq: f64,
    /// Phase of alpha in radians (rotates the lobes)
    #[arg(long, default_value_t = 0.0)]
    alpha_phase: f64,
    /// Relative phase theta between the two branches
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Waist assignment across the mode ladder
    #[arg(long, value_enum, default_value_t = PolicyArg::Constant)]
    waist_policy: PolicyArg,
    /// Mode ladder truncation
    #[arg(long, default_value_t = 50)]
    l_max: usize,
}

impl BeamArgs {
    fn policy(&self) -> WaistPolicy {
        self.waist_policy.into()
    }

    fn extent(&self) -> f64 {
        self.extent.unwrap_or(match self.policy() {
            WaistPolicy::Constant => 12.0 * self.waist,
            WaistPolicy::Eq5 => 32.0 * self.waist,
        })
    }

    fn grid2d(&self) -> Result<Grid2D> {
        Grid2D::square(self.grid, self.extent())
    }

    fn alpha(&self) -> Result<AlphaParam> {
        if !(self.alpha_sq >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "alpha_sq",
                message: format!("must be non-negative, got {}", self.alpha_sq),
            });
        }
        AlphaParam::new(self.alpha_sq.sqrt(), self.alpha_phase)
    }

    fn cat_spec(&self) -> Result<CatSpec> {
        let alpha = self.alpha()?;
        let l_max = self.l_max.max(CatSpec::min_l_max(&alpha));
        CatSpec::new(
            alpha,
            self.theta,
            self.waist,
            self.policy(),
            l_max,
            self.wavelength,
        )
    }
}

#[derive(Args, Debug, Serialize)]
struct FieldArgs {
    #[command(flatten)]
    beam: BeamArgs,
}

#[derive(Args, Debug, Serialize)]
struct SpectrumArgs {
    #[command(flatten)]
    beam: BeamArgs,
    /// Analyze the full cat or the single coherent branch
    #[arg(long, value_enum, default_value_t = TargetArg::Cat)]
    state: TargetArg,
    /// Spectrum window: charges 0..=l-window
    #[arg(long, default_value_t = 25)]
    l_window: i32,
}

#[derive(Args, Debug, Serialize)]
struct WignerArgs {
    /// Packet displacement x0 (default sqrt(alpha_sq))
    #[arg(long)]
    x0: Option<f64>,
    /// Matching cat size when x0 is not given
    #[arg(long, default_value_t = 3.5)]
    alpha_sq: f64,
    /// Fringe phase phi
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Normalization phase theta (defaults to phi)
    #[arg(long)]
    theta_cat: Option<f64>,
    /// Samples per phase-space axis
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// Half range of both quadratures (default 3.5 + 2 x0)
    #[arg(long)]
    half_range: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct HoloArgs {
    #[command(flatten)]
    beam: BeamArgs,
    /// What to encode
    #[arg(long, value_enum, default_value_t = TargetArg::Cat)]
    target: TargetArg,
    /// Topological charge for --target lg
    #[arg(long, default_value_t = 1)]
    l: i32,
    /// Grating period in grid pixels
    #[arg(long, default_value_t = 8)]
    grating_px: usize,
    /// Illumination Gaussian waist in meters (default: the grid extent)
    #[arg(long)]
    input_waist: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct InterfereArgs {
    #[command(flatten)]
    beam: BeamArgs,
    #[arg(long, value_enum, default_value_t = TargetArg::Cat)]
    target: TargetArg,
    #[arg(long, default_value_t = 1)]
    l: i32,
    /// Reference attenuation factor
    #[arg(long, default_value_t = 1.0)]
    atten: f64,
    /// Reference tilt in radians (default: fringe period of 16 pixels)
    #[arg(long)]
    tilt: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct BlochArgs {
    #[command(flatten)]
    beam: BeamArgs,
    /// Number of theta samples over [0, 2 pi)
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Args, Debug, Serialize)]
struct MubArgs {
    #[command(flatten)]
    beam: BeamArgs,
    /// Prime subspace dimension
    #[arg(long, default_value_t = 7)]
    dim: usize,
}

#[derive(Args, Debug, Serialize)]
struct TurbArgs {
    /// Vacuum wavelength in meters
    #[arg(long, default_value_t = 780e-9)]
    wavelength: f64,
    /// Beam waist in meters (Fig.-scale default)
    #[arg(long, default_value_t = 0.0735)]
    waist: f64,
    /// Samples per grid side
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Full grid extent in meters
    #[arg(long, default_value_t = 2.0)]
    extent: f64,
    /// Comma-separated cat sizes |alpha|^2
    #[arg(long, default_value = "0.5,3.5")]
    alphas: String,
    /// Strengths w0/r0 as a comma list or start:step:end range
    #[arg(long, default_value = "0.1:0.1:1.0")]
    strengths: String,
    /// Channel draws per strength point
    #[arg(long, default_value_t = 10)]
    realizations: usize,
    /// Number of screens (segments)
    #[arg(long, default_value_t = 5)]
    screens: usize,
    /// Segment length in meters
    #[arg(long, default_value_t = 2.0)]
    segment: f64,
    /// Projection subspace dimension
    #[arg(long, default_value_t = 17)]
    dim: usize,
    /// Comma-separated probe charges for survival curves
    #[arg(long, default_value = "0,10,20")]
    probes: String,
    /// Master seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Relative phase theta of the cats
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
}

/// Parse "a,b,c" or "start:step:end" into a float list.
fn parse_number_list(text: &str, field: &'static str) -> Result<Vec<f64>> {
    let bad = |message: String| Error::InvalidParameter { field, message };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse().map_err(|_| bad(format!("bad range `{text}`")))?;
        let step: f64 = parts[1].trim().parse().map_err(|_| bad(format!("bad range `{text}`")))?;
        let end: f64 = parts[2].trim().parse().map_err(|_| bad(format!("bad range `{text}`")))?;
        if !(step > 0.0) || end < start {
            return Err(bad(format!("range `{text}` must ascend with positive step")));
        }
        let mut out = Vec::new();
        let mut k = 0u64;
        loop {
            let v = start + step * k as f64;
            if v > end + 1e-9 * step {
                break;
            }
            out.push(v);
            k += 1;
        }
        return Ok(out);
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("bad number `{s}`")))
        })
        .collect()
}

fn parse_int_list(text: &str, field: &'static str) -> Result<Vec<i32>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            s.trim().parse::<i32>().map_err(|_| Error::InvalidParameter {
                field,
                message: format!("bad integer `{s}`"),
            })
        })
        .collect()
}

fn build_target(beam: &BeamArgs, target: TargetArg, l: i32, grid: &Grid2D) -> Result<ComplexField> {
    match target {
        TargetArg::Cat => cat_field(&beam.cat_spec()?, grid),
        TargetArg::Coherent => {
            let alpha = beam.alpha()?;
            acst_field(&alpha, beam.waist, beam.policy(), beam.l_max, grid)
        }
        TargetArg::Lg => lg_mode(&LGModeSpec::new(l, beam.waist, beam.wavelength)?, grid),
        TargetArg::Gaussian => lg_mode(&LGModeSpec::new(0, beam.waist, beam.wavelength)?, grid),
    }
}

fn meta(command: &str, args: &impl Serialize, extra: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "command": command,
        "version": VERSION,
        "parameters": serde_json::to_value(args).expect("serializable args"),
        "results": extra,
    })
}

fn cmd_field(out: &Path, args: &FieldArgs) -> Result<()> {
    let grid = args.beam.grid2d()?;
    let spec = args.beam.cat_spec()?;
    let field = cat_field(&spec, &grid)?;
    let intensity = field.intensity();
    write_pgm(&out.join("intensity.pgm"), &intensity.values, GrayScale::MaxNormalized)?;
    write_pgm(&out.join("phase.pgm"), &field.phase().values, GrayScale::Phase)?;
    let metrics = lobe_metrics(&intensity)?;
    write_csv(
        &out.join("lobe_metrics.csv"),
        "separation_m,overlap,centroid_plus_x,centroid_plus_y,centroid_minus_x,centroid_minus_y,axis_x,axis_y,lobe_sigma_m",
        [vec![
            fmt_f64(metrics.separation),
            fmt_f64(metrics.overlap),
            fmt_f64(metrics.centroid_plus.0),
            fmt_f64(metrics.centroid_plus.1),
            fmt_f64(metrics.centroid_minus.0),
            fmt_f64(metrics.centroid_minus.1),
            fmt_f64(metrics.principal_axis.0),
            fmt_f64(metrics.principal_axis.1),
            fmt_f64(metrics.lobe_sigma),
        ]],
    )?;
    if spec.waist_policy == WaistPolicy::Constant {
        let analytic = cat_intensity_analytic(&spec.alpha, spec.theta, spec.waist, &grid)?;
        write_matrix_csv(&out.join("intensity_analytic.csv"), &analytic.values)?;
    }
    let parity = parity_class(&spec)?;
    write_json(
        &out.join("field_meta.json"),
        &meta(
            "field",
            args,
            serde_json::json!({
                "separation_m": metrics.separation,
                "overlap": metrics.overlap,
                "parity": parity.to_string(),
                "macroscopicity": macroscopicity(&spec.alpha),
                "power": field.power(),
            }),
        ),
    )?;
    println!(
        "field: separation = {:.4e} m, overlap = {:.4}, parity = {}",
        metrics.separation, metrics.overlap, parity
    );
    Ok(())
}

fn cmd_spectrum(out: &Path, args: &SpectrumArgs) -> Result<()> {
    let grid = args.beam.grid2d()?;
    let field = match args.state {
        TargetArg::Cat => cat_field(&args.beam.cat_spec()?, &grid)?,
        TargetArg::Coherent => build_target(&args.beam, TargetArg::Coherent, 0, &grid)?,
        _ => {
            return Err(Error::InvalidParameter {
                field: "state",
                message: "spectrum expects cat or coherent".into(),
            })
        }
    };
    let spectrum = spiral_spectrum(&field, args.beam.waist, args.beam.policy(), 0..=args.l_window)?;
    write_csv(
        &out.join("spectrum.csv"),
        "l,power",
        spectrum
            .l_values
            .iter()
            .zip(spectrum.powers.iter())
            .map(|(l, p)| vec![l.to_string(), fmt_f64(*p)]),
    )?;
    write_json(
        &out.join("spectrum_meta.json"),
        &meta(
            "spectrum",
            args,
            serde_json::json!({ "captured_power": spectrum.captured_power }),
        ),
    )?;
    println!(
        "spectrum: {} charges, captured power {:.6}",
        spectrum.l_values.len(),
        spectrum.captured_power
    );
    Ok(())
}

fn cmd_wigner(out: &Path, args: &WignerArgs) -> Result<()> {
    let x0 = args.x0.unwrap_or_else(|| args.alpha_sq.max(0.0).sqrt());
    let half = args.half_range.unwrap_or(3.5 + 2.0 * x0);
    let grid = PhaseSpaceGrid::square(args.grid, half)?;
    let theta_cat = args.theta_cat.unwrap_or(args.phi);
    let map = wigner_qcs(x0, args.phi, theta_cat, &grid)?;
    write_matrix_csv(&out.join("wigner.csv"), &map.values)?;
    write_pgm(&out.join("wigner.pgm"), &map.values, GrayScale::MinMax)?;
    write_json(
        &out.join("wigner_meta.json"),
        &meta(
            "wigner",
            args,
            serde_json::json!({
                "x0": x0,
                "integral": map.total(),
                "fringe_period_p": std::f64::consts::PI / (2.0 * x0.max(1e-300)),
            }),
        ),
    )?;
    println!("wigner: x0 = {x0:.4}, integral = {:.9}", map.total());
    Ok(())
}

fn cmd_holo(out: &Path, args: &HoloArgs, reconstruct: bool) -> Result<()> {
    let grid = args.beam.grid2d()?;
    let target = build_target(&args.beam, args.target, args.l, &grid)?;
    let period = args.grating_px as f64 * grid.dx();
    let holo = synthesize_hologram(&target, period)?;
    write_pgm(&out.join("holo.pgm"), &holo.phase, GrayScale::Phase)?;
    let mut results = serde_json::json!({
        "grating_period_m": period,
        "target_bandwidth_cpm": holo.target_bandwidth,
    });
    if reconstruct {
        let input_waist = args.input_waist.unwrap_or_else(|| grid.extent_x());
        let recon = simulate_reconstruction(&holo, input_waist)?;
        let fidelity = crate::grid::overlap_power(&recon, &target)?;
        write_pgm(
            &out.join("recon_intensity.pgm"),
            &recon.intensity().values,
            GrayScale::MaxNormalized,
        )?;
        write_csv(
            &out.join("recon.csv"),
            "fidelity,first_order_power",
            [vec![fmt_f64(fidelity), fmt_f64(recon.power())]],
        )?;
        results["fidelity"] = serde_json::json!(fidelity);
        println!("reconstruct: fidelity = {fidelity:.6}");
    } else {
        println!("holo: grating period = {period:.4e} m");
    }
    let name = if reconstruct { "reconstruct" } else { "holo" };
    write_json(&out.join(format!("{name}_meta.json")), &meta(name, args, results))?;
    Ok(())
}

fn cmd_interfere(out: &Path, args: &InterfereArgs) -> Result<()> {
    let grid = args.beam.grid2d()?;
    let target = build_target(&args.beam, args.target, args.l, &grid)?;
    let tilt = args
        .tilt
        .unwrap_or_else(|| (args.beam.wavelength / (16.0 * grid.dy())).asin());
    let map = interfere_plane_wave(&target, args.atten, tilt, args.beam.wavelength)?;
    write_pgm(&out.join("interferogram.pgm"), &map.values, GrayScale::MaxNormalized)?;
    // winding numbers: on the axis for eigenmodes, on each lobe for cats
    let mut rows: Vec<Vec<String>> = Vec::new();
    match args.target {
        TargetArg::Lg | TargetArg::Gaussian => {
            let l = if args.target == TargetArg::Gaussian { 0 } else { args.l };
            let radius = args.beam.waist * ((l.abs().max(1)) as f64 / 2.0).sqrt();
            let w = winding_number(&target, (0.0, 0.0), radius)?;
            rows.push(vec![
                "axis".into(),
                fmt_f64(0.0),
                fmt_f64(0.0),
                fmt_f64(radius),
                w.to_string(),
            ]);
        }
        TargetArg::Cat | TargetArg::Coherent => {
            let metrics = lobe_metrics(&target.intensity())?;
            for (label, c) in [
                ("lobe_plus", metrics.centroid_plus),
                ("lobe_minus", metrics.centroid_minus),
            ] {
                let radius = 0.25 * args.beam.waist;
                let w = winding_number(&target, c, radius)?;
                rows.push(vec![
                    label.into(),
                    fmt_f64(c.0),
                    fmt_f64(c.1),
                    fmt_f64(radius),
                    w.to_string(),
                ]);
            }
        }
    }
    write_csv(&out.join("winding.csv"), "site,x_m,y_m,radius_m,winding", rows)?;
    write_json(
        &out.join("interfere_meta.json"),
        &meta(
            "interfere",
            args,
            serde_json::json!({
                "tilt_rad": tilt,
                "fringe_period_m": args.beam.wavelength / tilt.sin(),
            }),
        ),
    )?;
    println!("interfere: tilt = {tilt:.4e} rad");
    Ok(())
}

fn cmd_bloch(out: &Path, args: &BlochArgs) -> Result<()> {
    if args.samples < 2 {
        return Err(Error::InvalidParameter {
            field: "samples",
            message: "need at least two theta samples".into(),
        });
    }
    let grid = args.beam.grid2d()?;
    let cat = args.beam.cat_spec()?;
    let thetas: Vec<f64> = (0..args.samples)
        .map(|k| TAU * k as f64 / args.samples as f64)
        .collect();
    let numeric = bloch_scan(&cat, &thetas, &grid)?;
    let alpha_mag = cat.alpha.magnitude();
    write_csv(
        &out.join("bloch.csv"),
        "theta,p_numeric,p_closed_form",
        thetas.iter().zip(numeric.iter()).map(|(t, p)| {
            vec![
                fmt_f64(*t),
                fmt_f64(*p),
                fmt_f64(bloch_closed_form(cat.theta, alpha_mag, *t).unwrap_or(f64::NAN)),
            ]
        }),
    )?;
    let vis = visibility(&numeric)?;
    write_json(
        &out.join("bloch_meta.json"),
        &meta("bloch", args, serde_json::json!({ "visibility": vis })),
    )?;
    println!("bloch: visibility = {vis:.9}");
    Ok(())
}

fn cmd_mub(out: &Path, args: &MubArgs) -> Result<()> {
    let bases = mub_bases(args.dim)?;
    let cat = args.beam.cat_spec()?;
    let coeffs = cat_coefficients(&cat)?;
    let state = truncate_and_renormalize(&coeffs, args.dim)?;
    let probs = mub_probabilities(&state, &bases)?;
    let header: Vec<String> = (0..args.dim).map(|m| format!("p{m}")).collect();
    write_csv(
        &out.join("mub.csv"),
        &header.join(","),
        probs
            .iter()
            .map(|row| row.iter().map(|p| fmt_f64(*p)).collect::<Vec<_>>()),
    )?;
    let rho = reconstruct_density(&probs, &bases)?;
    let fidelity = fidelity_pure(&state, &rho)?;
    write_json(
        &out.join("mub_meta.json"),
        &meta(
            "mub",
            args,
            serde_json::json!({
                "bases": args.dim + 1,
                "roundtrip_fidelity": fidelity,
            }),
        ),
    )?;
    println!(
        "mub: {} bases x {} outcomes, round-trip fidelity = {:.9}",
        args.dim + 1,
        args.dim,
        fidelity
    );
    Ok(())
}

fn cmd_turb(out: &Path, args: &TurbArgs) -> Result<()> {
    let alphas = parse_number_list(&args.alphas, "alphas")?;
    let strengths = parse_number_list(&args.strengths, "strengths")?;
    let probes = parse_int_list(&args.probes, "probes")?;
    let grid = Grid2D::square(args.grid, args.extent)?;
    let chan = ChannelSpec::uniform(grid, args.screens, args.segment, 1.0, args.wavelength, args.seed)?;

    let mut fidelity_rows: Vec<Vec<String>> = Vec::new();
    let mut survival_rows: Vec<Vec<String>> = Vec::new();
    let mut realization_rows: Vec<Vec<String>> = Vec::new();
    for (ai, &alpha_sq) in alphas.iter().enumerate() {
        let alpha = AlphaParam::from_alpha_sq(alpha_sq)?;
        let l_max = 50usize.max(CatSpec::min_l_max(&alpha)).max(args.dim - 1);
        let cat = CatSpec::new(alpha, args.theta, args.waist, WaistPolicy::Constant, l_max, args.wavelength)?;
        let cfg = SweepConfig {
            dim: args.dim,
            n_realizations: args.realizations,
            // survival curves are alpha-independent; compute once
            probes: if ai == 0 { probes.clone() } else { Vec::new() },
        };
        let sweep = cat_fidelity_vs_strength(&cat, &strengths, &chan, &cfg)?;
        for point in &sweep.points {
            fidelity_rows.push(vec![
                fmt_f64(point.strength),
                fmt_f64(alpha_sq),
                fmt_f64(point.r0),
                fmt_f64(point.fidelity_ensemble),
                fmt_f64(point.fidelity_pure_mean),
            ]);
            for record in &point.realizations {
                realization_rows.push(vec![
                    fmt_f64(point.strength),
                    fmt_f64(alpha_sq),
                    record.index.to_string(),
                    record.seed.to_string(),
                    fmt_f64(point.r0),
                    fmt_f64(record.captured_power),
                    fmt_f64(record.fidelity_pure),
                ]);
            }
        }
        for curve in &sweep.survival {
            for (s, p) in sweep.strengths.iter().zip(curve.survival.iter()) {
                survival_rows.push(vec![fmt_f64(*s), curve.l0.to_string(), fmt_f64(*p)]);
            }
        }
    }
    write_csv(
        &out.join("turb_fidelity.csv"),
        "strength,alpha_sq,r0_m,fidelity_ensemble,fidelity_pure_mean",
        fidelity_rows,
    )?;
    write_csv(&out.join("turb_survival.csv"), "strength,l0,survival", survival_rows)?;
    write_csv(
        &out.join("turb_realizations.csv"),
        "strength,alpha_sq,realization,seed,r0_m,captured_power,fidelity_pure",
        realization_rows,
    )?;
    write_json(
        &out.join("turb_meta.json"),
        &meta(
            "turb",
            args,
            serde_json::json!({
                "alphas": alphas,
                "strengths": strengths,
                "probes": probes,
            }),
        ),
    )?;
    println!(
        "turb: {} strengths x {} alphas x {} realizations written",
        strengths.len(),
        alphas.len(),
        args.realizations
    );
    Ok(())
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn dispatch(cli: &Cli) -> Result<()> {
    let out = out_dir(cli)?;
    match &cli.command {
        Command::Field(args) => cmd_field(&out, args),
        Command::Spectrum(args) => cmd_spectrum(&out, args),
        Command::Wigner(args) => cmd_wigner(&out, args),
        Command::Holo(args) => cmd_holo(&out, args, false),
        Command::Reconstruct(args) => cmd_holo(&out, args, true),
        Command::Interfere(args) => cmd_interfere(&out, args),
        Command::Bloch(args) => cmd_bloch(&out, args),
        Command::Mub(args) => cmd_mub(&out, args),
        Command::Turb(args) => cmd_turb(&out, args),
    }
}

/// Run the CLI on explicit arguments; returns the process exit code
/// (0 success, 2 invalid configuration, 3 numerical contract violation,
/// 1 I/O failure).
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path with exit code 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the binary.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}
