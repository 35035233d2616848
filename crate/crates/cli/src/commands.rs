use std::f64::consts::PI;

use serde::Serialize;

use qsd::bounds::{cloning_row, universal_row, OverlapScalar};
use qsd::entangle::build_plan;
use qsd::mcsim::{run_concentration, run_discrimination, run_unambiguous, sweep_theta, SimConfig, SimReport};
use qsd::minerror::{
    brute_force_two_state, error_probability, helstrom_measurement, make_symmetric_real, trine_povm, trine_states,
    Ensemble, TwoStateFamily,
};
use qsd::unambiguous::{
    idp_bound, interferometer_sim, reciprocal_states, symmetric_unambiguous_optimum, unambiguous_povm,
    InterferometerReport, UnambiguousPovm,
};
use qsd::{BipartiteState, Ket};

use crate::args::{BoundsArgs, Format, HelstromArgs, Scenario, SimulateArgs, UdpArgs};
use crate::format::{angle, coefficients, fmt17, quarter_grid};
use crate::CliError;

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn helstrom(args: &HelstromArgs, degrees: bool) -> Result<String, CliError> {
    let thetas = match (args.theta, args.grid) {
        (Some(t), _) => vec![angle(t, degrees)],
        (None, Some(n)) => quarter_grid(n)?,
        (None, None) => return Err(CliError::Usage("one of --theta or --grid is required".into())),
    };
    let mut rows = Vec::with_capacity(thetas.len());
    for theta in thetas {
        if theta <= 0.0 {
            return Err(qsd::Error::OutOfRange {
                what: "theta",
                value: theta,
                range: "(0, pi/4]",
            }
            .into());
        }
        let fam = TwoStateFamily::new(theta, args.eta_plus)?;
        let ens = fam.ensemble();
        let achieved = error_probability(&ens, &helstrom_measurement(&fam), None)?;
        let (brute, _) = brute_force_two_state(&ens, args.resolution)?;
        rows.push(vec![
            fmt17(theta),
            fmt17(args.eta_plus),
            fmt17(fam.bound()),
            fmt17(achieved),
            fmt17(brute),
        ]);
    }
    csv_string(&["theta", "eta_plus", "bound", "achieved", "brute_force"], rows)
}

#[derive(Serialize)]
struct TwoStateUdp {
    theta: f64,
    overlap: f64,
    inconclusive: f64,
    success: f64,
    reciprocal: Vec<Ket>,
    povm: UnambiguousPovm,
    interferometer: InterferometerReport,
}

#[derive(Serialize)]
struct SymmetricUdp {
    coefficients: Vec<f64>,
    inconclusive: f64,
    success: f64,
    states: Vec<Ket>,
    povm: UnambiguousPovm,
}

pub fn udp(args: &UdpArgs, degrees: bool) -> Result<String, CliError> {
    if let Some(t) = args.theta {
        let theta = angle(t, degrees);
        let fam = TwoStateFamily::new(theta, 0.5)?;
        let states = fam.states().to_vec();
        let overlap = fam.overlap();
        let inconclusive = idp_bound(overlap)?;
        let success = 1.0 - inconclusive;
        let povm = unambiguous_povm(&states, &[success, success])?;
        let interferometer = interferometer_sim(theta)?;
        match args.format {
            Format::Json => {
                let out = TwoStateUdp {
                    theta,
                    overlap,
                    inconclusive,
                    success,
                    reciprocal: reciprocal_states(&states)?.states,
                    povm,
                    interferometer,
                };
                Ok(serde_json::to_string_pretty(&out)? + "\n")
            }
            Format::Csv => {
                let rows = interferometer
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.state.clone(),
                            fmt17(r.d_plus),
                            fmt17(r.d_minus),
                            fmt17(r.d_inconclusive),
                        ]
                    })
                    .collect();
                csv_string(&["state", "d_plus", "d_minus", "d_inconclusive"], rows)
            }
        }
    } else {
        let list = args.coeffs.as_deref().unwrap_or("uniform");
        let cs = coefficients(list, args.n)?;
        let fam = make_symmetric_real(&cs)?;
        let opt = symmetric_unambiguous_optimum(&fam)?;
        let povm = unambiguous_povm(&fam.states, &opt.success_vector(fam.len()))?;
        match args.format {
            Format::Json => {
                let out = SymmetricUdp {
                    coefficients: cs,
                    inconclusive: opt.inconclusive,
                    success: opt.success,
                    states: fam.states.clone(),
                    povm,
                };
                Ok(serde_json::to_string_pretty(&out)? + "\n")
            }
            Format::Csv => {
                let rows = fam
                    .states
                    .iter()
                    .enumerate()
                    .map(|(j, s)| {
                        let q = qsd::qcore::expectation(&s.density(), &povm.inconclusive).map(|z| z.re)?;
                        Ok(vec![j.to_string(), fmt17(opt.success), fmt17(q)])
                    })
                    .collect::<Result<_, CliError>>()?;
                csv_string(&["state", "success", "inconclusive"], rows)
            }
        }
    }
}

pub fn bounds(args: &BoundsArgs) -> Result<String, CliError> {
    let n = args.n.unwrap_or(args.m);
    match args.overlap {
        Some(s) => {
            let r = cloning_row(args.m, n, OverlapScalar::new(s)?)?;
            csv_string(
                &[
                    "m",
                    "n",
                    "overlap",
                    "clone_probability",
                    "multicopy_m",
                    "multicopy_n",
                    "chain_residual",
                    "separation_residual",
                ],
                vec![vec![
                    r.m.to_string(),
                    r.n.to_string(),
                    fmt17(r.overlap),
                    fmt17(r.clone_probability),
                    fmt17(r.multicopy_m),
                    fmt17(r.multicopy_n),
                    fmt17(r.chain_residual),
                    fmt17(r.separation_residual),
                ]],
            )
        }
        None => {
            let r = universal_row(args.m, n)?;
            csv_string(
                &[
                    "m",
                    "n",
                    "estimation_fidelity",
                    "estimation_shrink",
                    "ucm_shrink",
                    "ucm_fidelity",
                    "fidelity_residual",
                    "ratio_residual",
                ],
                vec![vec![
                    r.m.to_string(),
                    r.n.to_string(),
                    fmt17(r.estimation_fidelity),
                    fmt17(r.estimation_shrink),
                    fmt17(r.ucm_shrink),
                    fmt17(r.ucm_fidelity),
                    fmt17(r.fidelity_residual),
                    fmt17(r.ratio_residual),
                ]],
            )
        }
    }
}

const SIM_HEADER: [&str; 7] = ["theta", "analytic", "empirical", "stderr", "trials", "seed", "metric"];

fn report_rows(theta: Option<f64>, rep: &SimReport) -> Vec<Vec<String>> {
    rep.metrics
        .iter()
        .map(|m| {
            vec![
                theta.map(fmt17).unwrap_or_default(),
                fmt17(m.analytic),
                fmt17(m.rate),
                fmt17(m.stderr),
                m.n.to_string(),
                rep.seed.to_string(),
                m.name.clone(),
            ]
        })
        .collect()
}

fn single_theta(args: &SimulateArgs, degrees: bool, default: f64) -> Result<f64, CliError> {
    match args.theta.as_slice() {
        [] => Ok(default),
        [t] => Ok(angle(*t, degrees)),
        _ => Err(CliError::Usage("this scenario takes a single --theta".into())),
    }
}

pub fn simulate(args: &SimulateArgs, degrees: bool) -> Result<String, CliError> {
    let cfg = SimConfig::new(args.seed, args.trials)?.with_reporting(args.reporting)?;
    let rows = match args.scenario {
        Scenario::HelstromSweep => {
            let grid = match (&args.theta[..], args.grid) {
                ([], Some(n)) => quarter_grid(n)?,
                ([], None) => (1..=9).map(|i| (5.0 * i as f64).to_radians()).collect(),
                (ts, _) => ts.iter().map(|&t| angle(t, degrees)).collect(),
            };
            sweep_theta(&grid, &cfg)?
                .into_iter()
                .map(|r| {
                    vec![
                        fmt17(r.theta),
                        fmt17(r.analytic),
                        fmt17(r.empirical),
                        fmt17(r.stderr),
                        r.trials.to_string(),
                        r.seed.to_string(),
                        "error".into(),
                    ]
                })
                .collect()
        }
        Scenario::Trine => {
            let ens = Ensemble::uniform(trine_states().to_vec())?;
            report_rows(None, &run_discrimination(&ens, &trine_povm(), None, &cfg)?)
        }
        Scenario::Idp => {
            let theta = single_theta(args, degrees, PI / 6.0)?;
            let fam = TwoStateFamily::new(theta, 0.5)?;
            let states = fam.states().to_vec();
            let p = 1.0 - idp_bound(fam.overlap())?;
            let povm = unambiguous_povm(&states, &[p, p])?;
            report_rows(Some(theta), &run_unambiguous(&states, &povm, None, &cfg)?)
        }
        Scenario::SymmetricUd => {
            let cs = coefficients(args.coeffs.as_deref().unwrap_or("0.7071067811865476,0.5,0.5"), args.n)?;
            let fam = make_symmetric_real(&cs)?;
            let opt = symmetric_unambiguous_optimum(&fam)?;
            let povm = unambiguous_povm(&fam.states, &opt.success_vector(fam.len()))?;
            report_rows(None, &run_unambiguous(&fam.states, &povm, None, &cfg)?)
        }
        Scenario::Concentrate => {
            let (theta, cs) = match &args.coeffs {
                Some(list) => (None, coefficients(list, args.n)?),
                None => {
                    let t = single_theta(args, degrees, PI / 8.0)?;
                    (Some(t), vec![t.cos(), t.sin()])
                }
            };
            let basis: Vec<Ket> = (0..cs.len()).map(|i| Ket::basis(cs.len(), i)).collect();
            let psi = BipartiteState::from_schmidt(&cs, &basis, &basis)?;
            let plan = build_plan(&psi)?;
            report_rows(theta, &run_concentration(&psi, &plan, &cfg)?)
        }
    };
    csv_string(&SIM_HEADER, rows)
}
