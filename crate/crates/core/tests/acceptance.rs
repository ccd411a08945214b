// Copyright 2026 The cqed-photons Authors
// SPDX-License-Identifier: Apache-2.0

//! Exit criteria. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cqed_core::analysis::{
    infidelity_stagger_analytic, infidelity_stagger_simulated, linspace, sweep_success, StaggerSpec,
};
use cqed_core::hilbert::expm::propagator;
use cqed_core::hilbert::{density_fidelity, evolve_const, StateVector};
use cqed_core::microwave::{
    self, atom_space, build_effective_hamiltonian, effective_couplings, effective_model_fidelity,
    effective_with_cavity, fock_independence, make_timing_plan, reduced_atoms, with_fock, MicrowaveParams,
};
use cqed_core::optical::{
    cavity_hamiltonian, evolve_optical, initial_state, solve_interaction_time, OpticalCavityParams,
};
use cqed_core::protocol::{run_protocol, ProtocolConfig};
use cqed_core::units::{from_mhz, us_to_ns};
use cqed_core::Complex64;
use proptest::prelude::RngExt;
use proptest::test_runner::{RngAlgorithm, TestRng};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < budget;
    let pass = out.pass && in_time;
    println!(
        "criterion {id} [{}] {name}: {} ({:.3} s of {:.0} s budget{})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs_f64(),
        if in_time { "" } else { ", over budget" }
    );
    pass
}

/// Uniform in [lo, hi).
fn uniform(rng: &mut TestRng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn reference_optical() -> OpticalCavityParams {
    OpticalCavityParams::symmetric(from_mhz(34.0), from_mhz(2.6), from_mhz(4.1)).unwrap()
}

fn ground(n: usize) -> StateVector {
    StateVector::basis(atom_space(n).unwrap(), &vec![0; n]).unwrap()
}

fn reference_microwave(n_atoms: usize, g_over: f64, cutoff: usize) -> MicrowaveParams {
    let g = from_mhz(0.05);
    MicrowaveParams::new(g, g_over * g, 5.0 * g, 20.0 * g_over * g, cutoff, n_atoms).unwrap()
}

fn success_probability() -> Outcome {
    let r = cqed_core::optical::run_optical_stage(&reference_optical()).unwrap();
    let tau_ns = us_to_ns(r.tau);
    let total = r.success_prob * r.success_prob;
    Outcome {
        pass: (tau_ns - 10.8).abs() <= 0.1 && (total - 0.481).abs() <= 0.003,
        detail: format!("tau = {tau_ns:.4} ns (10.8 ± 0.1), P1·P2 = {total:.5} (0.481 ± 0.003)"),
    }
}

fn closed_form_vs_brute_force() -> Outcome {
    let mut rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut worst: f64 = 0.0;
    let mut sets = 0;
    while sets < 100 {
        let p = OpticalCavityParams::new(
            from_mhz(uniform(&mut rng, 5.0, 60.0)),
            from_mhz(uniform(&mut rng, 5.0, 60.0)),
            from_mhz(uniform(&mut rng, 0.0, 10.0)),
            from_mhz(uniform(&mut rng, 0.0, 10.0)),
        )
        .unwrap();
        if p.radicand() <= 0.0 {
            continue;
        }
        let tau = uniform(&mut rng, 0.0, 2.0) * solve_interaction_time(&p).unwrap();
        let closed = evolve_optical(&p, tau).unwrap().cavity_state;
        let brute = evolve_const(&cavity_hamiltonian(&p).unwrap(), &initial_state(), tau).unwrap();
        for (x, y) in closed.amplitudes().iter().zip(brute.amplitudes().iter()) {
            worst = worst.max((x - y).norm());
        }
        sets += 1;
    }
    Outcome {
        pass: worst <= 1e-8, detail: format!("{sets} parameter sets, max amplitude error {worst:.2e} (≤ 1e-8)")
    }
}

fn bell_set() -> Outcome {
    let result = run_protocol(&ProtocolConfig::reference(2).unwrap()).unwrap();
    let plan = result.config.plan;
    let lambda = result.config.microwave.couplings().unwrap().lambda;
    let timing_ok = (lambda * plan.t0 - FRAC_PI_4).abs() <= 1e-12
        && (result.config.microwave.big_g * plan.t0 / PI - plan.n_branch as f64).abs() <= 1e-10;
    let mut worst_p: f64 = 0.0;
    let mut worst_f: f64 = 1.0;
    let mut labels = Vec::new();
    for row in &result.outcome_table {
        worst_p = worst_p.max((row.probability - 0.25).abs());
        let cl = row.classification.as_ref().expect("nonzero outcome");
        worst_f = worst_f.min(cl.fidelity);
        labels.push(format!("{}→{}", row.pattern, cl.label()));
    }
    Outcome {
        pass: timing_ok && worst_p <= 1e-10 && worst_f >= 1.0 - 1e-9,
        detail: format!(
            "max |p − 0.25| = {worst_p:.1e}, min Bell fidelity = {:.1e} below 1, {}",
            1.0 - worst_f,
            labels.join(" ")
        ),
    }
}

fn three_atom_map() -> Outcome {
    let g = from_mhz(0.05);
    let lambda = effective_couplings(g, 5.0 * g).unwrap().lambda;
    let plan = make_timing_plan(lambda, 3, microwave::default_min_drive(g, 5.0 * g)).unwrap();
    let u = propagator(&microwave::effective_hamiltonian(3, lambda, plan.g_required).unwrap(), plan.t0);
    let space = atom_space(3).unwrap();
    let printed = |x: usize, rel: Complex64| {
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[x] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        v[7 - x] += rel * FRAC_1_SQRT_2;
        StateVector::from_vec(space.clone(), v).unwrap()
    };
    // One global phase shared by all eight lines, taken from the first.
    let min_fidelity = |rel: Complex64| {
        let outs: Vec<StateVector> =
            (0..8).map(|x| u.apply(&StateVector::basis(space.clone(), &space.digits(x)).unwrap()).unwrap()).collect();
        let phase = printed(0, rel).inner(&outs[0]).unwrap();
        let phase = if phase.norm() > 0.0 { phase / phase.norm() } else { Complex64::new(1.0, 0.0) };
        (0..8)
            .map(|x| (printed(x, rel).inner(&outs[x]).unwrap() * phase.conj()).re.max(0.0).powi(2))
            .fold(1.0, f64::min)
    };
    let plus_i = min_fidelity(Complex64::i());
    let minus_i = min_fidelity(-Complex64::i());
    Outcome {
        pass: plus_i >= 1.0 - 1e-10,
        detail: format!(
            "Gt0 = (2·{}+3/4)π: min fidelity to |x⟩+i|x̄⟩ lines = {plus_i:.3e} (≥ 1 − 1e-10); to |x⟩−i|x̄⟩ = {minus_i:.12}",
            plan.n_branch
        ),
    }
}

fn effective_model_validity() -> Outcome {
    let g = from_mhz(0.05);
    let lambda = effective_couplings(g, 5.0 * g).unwrap().lambda;
    let plan = make_timing_plan(lambda, 3, 50.0 * g).unwrap();
    let g_over = plan.g_required / g;
    // Threshold runs at the planned drive, then the drive sweep; all independent.
    let runs: Vec<(usize, f64)> =
        [(2, g_over), (3, g_over), (2, 10.0), (2, 30.0), (2, 50.0), (2, 100.0)].into_iter().collect();
    let fids: Vec<f64> = runs
        .par_iter()
        .map(|&(n, r)| effective_model_fidelity(&reference_microwave(n, r, 8), &ground(n), plan.t0).unwrap())
        .collect();
    let threshold_ok = fids[..2].iter().all(|&f| f >= 0.98);
    let lines: Vec<String> =
        runs[..2].iter().zip(&fids).map(|(&(n, r), f)| format!("N={n} G={r:.1}g F={f:.4}")).collect();
    let sweep = &fids[2..];
    let monotone = sweep.windows(2).all(|w| w[1] > w[0]);
    Outcome {
        pass: threshold_ok && monotone,
        detail: format!(
            "{} (≥ 0.98: {}); N=2 over G/g 10,30,50,100: {} (increasing: {})",
            lines.join(", "),
            if threshold_ok { "yes" } else { "no" },
            sweep.iter().map(|f| format!("{f:.4}")).collect::<Vec<_>>().join(" "),
            if monotone { "yes" } else { "no" }
        ),
    }
}

fn photon_number_independence() -> Outcome {
    let g = from_mhz(0.05);
    let lambda = effective_couplings(g, 5.0 * g).unwrap().lambda;
    let plan = make_timing_plan(lambda, 2, 50.0 * g).unwrap();
    let p = reference_microwave(2, plan.g_required / g, 8);
    let psi = ground(2);
    let strong = fock_independence(&p, &psi, &[0, 1, 2], plan.t0).unwrap();
    let strong_ok = strong.iter().all(|&(_, _, f)| f >= 0.98);

    let u = propagator(&effective_with_cavity(&p).unwrap(), plan.t0);
    let rhos: Vec<_> =
        (0..=2).map(|n| reduced_atoms(&u.apply(&with_fock(&p, &psi, n).unwrap()).unwrap(), 2).unwrap()).collect();
    let mut exact_dev: f64 = 0.0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let diff = rhos[i].matrix() - rhos[j].matrix();
            exact_dev = exact_dev.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
            exact_dev = exact_dev.max((1.0 - density_fidelity(&rhos[i], &rhos[j]).unwrap()).abs());
        }
    }
    let atoms_only = propagator(&build_effective_hamiltonian(&p).unwrap(), plan.t0).apply(&psi).unwrap();
    let rho_direct = cqed_core::OperatorMatrix::new(
        atoms_only.space().clone(),
        atoms_only.amplitudes() * atoms_only.amplitudes().adjoint(),
    )
    .unwrap();
    let direct_dev = (rho_direct.matrix() - rhos[0].matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let exact_ok = exact_dev <= 1e-12 && direct_dev <= 1e-12;
    Outcome {
        pass: strong_ok && exact_ok,
        detail: format!(
            "strong-driving pairwise F: {} (≥ 0.98: {}); effective max deviation {:.1e} (exact: {})",
            strong.iter().map(|(a, b, f)| format!("{a}-{b}={f:.4}")).collect::<Vec<_>>().join(" "),
            if strong_ok { "yes" } else { "no" },
            exact_dev.max(direct_dev),
            if exact_ok { "yes" } else { "no" }
        ),
    }
}

fn stagger_model() -> Outcome {
    let lambda = effective_couplings(from_mhz(0.05), from_mhz(0.25)).unwrap().lambda;
    let t0 = FRAC_PI_4 / lambda;
    let grid = linspace(0.0, 0.05, 50);
    let mut max_dev: f64 = 0.0;
    let mut zero: f64 = 0.0;
    let mut ordered = true;
    let mut at_one_percent = Vec::new();
    for g_over_lambda in [500.0, 507.0] {
        let big_g = g_over_lambda * lambda;
        for &f in &grid {
            let spec = |n| StaggerSpec { delta_t: f * t0, t0, n_atoms: n, big_g, lambda };
            let two = infidelity_stagger_simulated(&spec(2)).unwrap();
            let three = infidelity_stagger_simulated(&spec(3)).unwrap();
            max_dev = max_dev.max((two - infidelity_stagger_analytic(&spec(2)).unwrap()).abs());
            if f == 0.0 {
                zero = zero.max(two).max(three);
            }
            // Both sides are roundoff-level at δt = 0.
            ordered &= three >= two - 1e-12;
            if (f - 0.01).abs() < 1e-12 {
                at_one_percent.push(format!("G={g_over_lambda}λ: N=2 {two:.4}, N=3 {three:.4}"));
            }
        }
    }
    Outcome {
        pass: max_dev <= 1e-3 && zero <= 1e-10 && ordered,
        detail: format!(
            "max |sim − closed form| = {max_dev:.1e} (≤ 1e-3), δt=0 infidelity {zero:.1e}, N=3 ≥ N=2 on all {} points: {}; at δt = 0.01·t0 {}",
            grid.len(),
            if ordered { "yes" } else { "no" },
            at_one_percent.join("; ")
        ),
    }
}

fn sweep_monotonicity() -> Outcome {
    let h = from_mhz(34.0);
    let grid = linspace(0.0, h / 2.0, 16);
    let table = sweep_success(h, &grid, &grid, 2).unwrap();
    let p = table.column("p_total").unwrap();
    let n = grid.len();
    let at = |i: usize, j: usize| p[i * n + j];
    let mut violations = 0;
    let mut flagged = 0;
    for i in 0..n {
        for j in 0..n {
            if at(i, j).is_nan() {
                flagged += 1;
                continue;
            }
            if j + 1 < n && !at(i, j + 1).is_nan() && at(i, j + 1) > at(i, j) + 1e-12 {
                violations += 1;
            }
            if i + 1 < n && !at(i + 1, j).is_nan() && at(i + 1, j) > at(i, j) + 1e-12 {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0 && flagged < n * n,
        detail: format!(
            "{n}×{n} grid over γ, κ ∈ [0, h/2]: {violations} monotonicity violations, {flagged} overdamped points"
        ),
    }
}

fn main() -> ExitCode {
    let results = [
        run(1, "optical success probability", Duration::from_secs(1), success_probability),
        run(2, "closed-form vs brute-force optical evolution", Duration::from_secs(10), closed_form_vs_brute_force),
        run(3, "two-photon Bell set", Duration::from_secs(1), bell_set),
        run(4, "three-atom complement map", Duration::from_secs(1), three_atom_map),
        run(5, "effective-model validity", Duration::from_secs(60), effective_model_validity),
        run(6, "photon-number independence", Duration::from_secs(60), photon_number_independence),
        run(7, "staggered-entry error model", Duration::from_secs(30), stagger_model),
        run(8, "success-probability sweep monotonicity", Duration::from_secs(5), sweep_monotonicity),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
