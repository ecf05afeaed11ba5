//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p ncosc-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ncosc_core::dirac::{landau_equivalence_check, SpinorBasis};
use ncosc_core::irrep::{IrrepSpec, MGrid, MWindow};
use ncosc_core::lie::{deformed_heisenberg, derived_subalgebra, idx, levi_decompose, Subspace, SUBSPACE_TOL};
use ncosc_core::linalg::unit;
use ncosc_core::nc::{
    build_hamiltonian, check_recursion, cross_sector_coupling, m0_matrix, NCParams, SectorBasis, TensorState,
};
use ncosc_core::spectra::convergence::{convergence_study, SectorProblem, Truncation};
use ncosc_core::spectra::eigen::dense_eigenvalues;
use ncosc_core::spectra::large_z::large_z_check;
use ncosc_core::spectra::pt::{first_order, pt_small_z, second_order_sum};
use ncosc_core::spectra::scaling::residual_scaling;
use ncosc_core::{Complex64, HalfInt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Check);

fn h(n: i64) -> HalfInt {
    HalfInt::from_int(n)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("n/a".into(), |v| format!("{v:.3e}"))
}

fn levi_pipeline() -> Check {
    let start = Instant::now();
    let grid = [0.1, 1.0, 10.0];
    let mut worst_membership = 0.0f64;
    let mut ok = true;
    let mut notes = Vec::new();
    for &theta in &grid {
        for &kappa in &grid {
            let alg = deformed_heisenberg(theta, kappa);
            let n = alg.dim();
            let derived = derived_subalgebra(&alg);
            let centre_and_s: Vec<_> = [idx::ONE, idx::s(0), idx::s(1), idx::s(2)]
                .iter()
                .map(|&i| unit(n, i))
                .collect();
            let target = Subspace::span(n, &centre_and_s);
            let membership = centre_and_s
                .iter()
                .map(|v| derived.residual(v))
                .chain(derived.basis().iter().map(|v| target.residual(v)))
                .fold(0.0, f64::max);
            worst_membership = worst_membership.max(membership);

            let dec = levi_decompose(&alg).map_err(err)?;
            let mut radical_res = 0.0f64;
            for mu in 0..3 {
                for (a, c) in [(idx::x(mu), theta), (idx::p(mu), kappa)] {
                    let mut v = unit(n, a);
                    v[idx::s(mu)] -= Complex64::new(c, 0.0);
                    radical_res = radical_res.max(dec.radical.residual(&v));
                }
            }
            let r = &dec.report;
            let here = derived.dim() == 4
                && membership <= 1e-10
                && r.radical_dim == 7
                && radical_res <= 1e-10
                && r.complement_dim == 3
                && r.sl2r_fingerprint
                && r.passes(SUBSPACE_TOL);
            if !here {
                notes.push(format!(
                    "(θ,κ)=({theta},{kappa}): derived {} radical {} complement {} fingerprint {}",
                    derived.dim(),
                    r.radical_dim,
                    r.complement_dim,
                    r.sl2r_fingerprint
                ));
            }
            ok &= here;
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    Ok((
        ok,
        format!(
            "9 points, max membership residual {worst_membership:.1e}, {:.0} ms{}",
            elapsed.as_secs_f64() * 1e3,
            notes.iter().map(|s| format!("; {s}")).collect::<String>()
        ),
    ))
}

fn jacobi_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let theta = 10f64.powf(rng.gen_range(-2.0..1.0));
        let kappa = 10f64.powf(rng.gen_range(-2.0..1.0));
        worst = worst.max(deformed_heisenberg(theta, kappa).jacobi_residual());
    }
    Ok((worst <= 1e-12, format!("20 points, max residual {worst:.1e}")))
}

/// `ω(n + 1)` with the multiplicity counted directly from `l = n_b − n_a`
/// and `m = j − l` on the window, independently of the sector enumeration.
fn expected_commutative(irrep: &IrrepSpec, j: HalfInt, n_max: u32, omega: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for n in 0..=n_max as i64 {
        for l in (-n..=n).step_by(2) {
            if irrep.index_of(j - l).is_some() {
                out.push(omega * (n + 1) as f64);
            }
        }
    }
    out
}

fn commutative_limit() -> Check {
    let params = NCParams::commutative(1.0, 1.3).map_err(err)?;
    let irreps = [
        IrrepSpec::discrete_plus(h(1), 10).map_err(err)?,
        IrrepSpec::discrete_plus(HalfInt::HALF, 10).map_err(err)?,
        IrrepSpec::continuous(-1.0, MGrid::Integer, h(-5), h(5)).map_err(err)?,
        IrrepSpec::continuous(-2.0, MGrid::HalfInteger, HalfInt::from_twice(-9), HalfInt::from_twice(9))
            .map_err(err)?,
    ];
    let n_max = 6;
    let (mut sectors, mut worst, mut ok) = (0, 0.0f64, true);
    for irrep in &irreps {
        for j in SectorBasis::sector_labels(irrep, n_max) {
            let basis = SectorBasis::sector(irrep, j, n_max).map_err(err)?;
            let got = dense_eigenvalues(&build_hamiltonian(&params, &basis).map_err(err)?).map_err(err)?;
            let want = expected_commutative(irrep, j, n_max, params.omega);
            if got.len() != want.len() {
                ok = false;
                continue;
            }
            for (a, b) in got.iter().zip(&want) {
                worst = worst.max((a - b).abs());
            }
            sectors += 1;
        }
    }
    ok &= worst <= 1e-10;
    Ok((ok, format!("{sectors} sectors over 4 irreps, max eigenvalue error {worst:.1e}")))
}

fn small_z_scaling() -> Check {
    let start = Instant::now();
    let base = NCParams::new(1.0, 1.0, 0.05, 0.05).map_err(err)?;
    let t_grid = [1.0, 2.0, 4.0, 8.0];
    let cases = [
        ("k=1", IrrepSpec::discrete_plus(h(1), 24).map_err(err)?),
        ("λ=-1", IrrepSpec::continuous(-1.0, MGrid::Integer, h(-11), h(12)).map_err(err)?),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, irrep) in cases {
        let problem = SectorProblem::new(base, irrep, h(1));
        let ladder: Vec<Truncation> = [14, 16, 18].iter().map(|&n| Truncation::new(n, irrep.window())).collect();
        let rep = residual_scaling(&problem, &ladder, &t_grid, 10).map_err(err)?;
        let here = rep.levels.len() == 10
            && rep.dropped.is_empty()
            && rep.min_slope.is_some_and(|s| s >= 2.8)
            && rep.max_residual_first.is_some_and(|r| r <= 1e-4);
        ok &= here;
        notes.push(format!(
            "{name}: {} levels, min slope {}, t=1 residual {} (with +g·ml: slope {}, residual {})",
            rep.levels.len(),
            rep.min_slope.map_or("n/a".into(), |s| format!("{s:.2}")),
            fmt_opt(rep.max_residual_first),
            rep.min_corrected_slope.map_or("n/a".into(), |s| format!("{s:.2}")),
            fmt_opt(rep.max_corrected_residual_first),
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(120);
    Ok((ok, format!("{}; {:.1} s", notes.join("; "), elapsed.as_secs_f64())))
}

fn first_order_and_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let irrep = IrrepSpec::discrete_plus(h(1), 12).map_err(err)?;
    let basis = SectorBasis::full(&irrep, 8);
    let params = NCParams::new(1.0, 1.0, 0.3, 0.2).map_err(err)?;
    let mut worst_e1 = 0.0f64;
    for _ in 0..50 {
        let i = rng.gen_range(0..basis.dim());
        worst_e1 = worst_e1.max(first_order(&params, &basis, i).map_err(err)?.abs());
    }

    let mut worst_identity = 0.0f64;
    for _ in 0..100 {
        let k = HalfInt::from_twice(rng.gen_range(1..=6));
        let len = 40;
        let spec = if rng.gen_bool(0.5) {
            IrrepSpec::discrete_plus(k, len).map_err(err)?
        } else {
            let lambda = -0.25 - rng.gen_range(0.01..5.0);
            let grid = if rng.gen_bool(0.5) { MGrid::Integer } else { MGrid::HalfInteger };
            let lo = if grid == MGrid::Integer { h(-20) } else { HalfInt::from_twice(-39) };
            IrrepSpec::continuous(lambda, grid, lo, lo + 39).map_err(err)?
        };
        let ms = spec.ms();
        let m = ms[rng.gen_range(0..ms.len())];
        let s = TensorState::new(rng.gen_range(0..20), rng.gen_range(0..20), m);
        let p = NCParams::new(
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
        )
        .map_err(err)?;
        let r = pt_small_z(&p, &spec, &s).map_err(err)?;
        let scale = r.e0.abs().max(r.e2.abs()).max(1.0);
        worst_identity = worst_identity.max(r.identity_residual() / scale);
    }

    // the second-order energy from the hop sum, against the printed E⁽²⁾
    let probe = NCParams::new(1.0, 1.0, 0.1, 0.0).map_err(err)?;
    let s = TensorState::new(0, 1, h(2));
    let i = basis.index_of(&s).ok_or("probe state missing")?;
    let brute = second_order_sum(&probe, &basis, i).map_err(err)?;
    let printed = pt_small_z(&probe, &irrep, &s).map_err(err)?.e2;

    let ok = worst_e1 <= 1e-12 && worst_identity <= 4.0 * f64::EPSILON;
    Ok((
        ok,
        format!(
            "max |E1| {worst_e1:.1e} over 50 states; max relative identity residual {worst_identity:.1e} over 100 tuples; \
             note: hop-sum E2 at (0,1,2), z=0.1 is {brute:.6e}, printed E2 {printed:.6e}"
        ),
    ))
}

fn degeneracy_breaking() -> Check {
    let irrep = IrrepSpec::discrete_plus(h(1), 24).map_err(err)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for zabs in [0.05, 0.1] {
        let c = zabs / 2f64.sqrt();
        let params = NCParams::from_z(1.0, 1.0, Complex64::new(c, c)).map_err(err)?;
        let energy = |s: TensorState| -> Result<f64, String> {
            let problem = SectorProblem::new(params, irrep, s.j());
            let window = MWindow::new(h(1), h(24));
            let ladder: Vec<Truncation> = [10, 14, 18].iter().map(|&n| Truncation::new(n, window)).collect();
            let rep = convergence_study(&problem, &ladder).map_err(err)?;
            let row = rep.level(&s).ok_or(format!("{s:?} not found"))?;
            if !row.converged {
                return Err(format!("{s:?} not converged"));
            }
            Ok(row.energy)
        };
        let e01 = energy(TensorState::new(0, 1, h(1)))?;
        let e10 = energy(TensorState::new(1, 0, h(1)))?;
        let measured = e01 - e10;
        let predicted = 2.0 * params.z_abs2() / (2.0 * params.mass) * 1.0;
        let rel = (measured.abs() - predicted).abs() / predicted;
        ok &= rel <= 10.0 * zabs;
        notes.push(format!(
            "|z|={zabs}: E(0,1)-E(1,0) = {measured:+.6e}, 2(|z|²/2M)m = {predicted:.6e}, rel err {rel:.1e}"
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn large_z_regime() -> Check {
    let start = Instant::now();
    let (mass, omega, kappa): (f64, f64, f64) = (1.0, 1e-3, 0.1);
    // |z|²/2M = 1 with Im z = κ
    let re = (2.0 * mass - kappa * kappa).sqrt();
    let params = NCParams::from_z(mass, omega, Complex64::new(re, kappa)).map_err(err)?;
    let irrep = IrrepSpec::discrete_plus(h(1), 16).map_err(err)?;
    let problem = SectorProblem::new(params, irrep, h(1));
    let ladder: Vec<Truncation> = [28, 34, 40].iter().map(|&n| Truncation::new(n, irrep.window())).collect();
    let rep = large_z_check(&problem, &ladder).map_err(err)?;
    let elapsed = start.elapsed();
    let ok = !rep.levels.is_empty()
        && rep.max_relative_error <= 5.0 * omega / mass
        && rep.gap_ratio >= 10.0
        && rep.lowest_has_minimal_m2
        && elapsed < Duration::from_secs(120);
    Ok((
        ok,
        format!(
            "{} converged levels in {} m-clusters, max rel err {:.2e} (C = {:.2}), gap ratio {:.1}, lowest cluster m = {}, {:.1} s",
            rep.levels.len(),
            rep.clusters.len(),
            rep.max_relative_error,
            rep.c,
            rep.gap_ratio,
            rep.lowest_cluster_m.map_or("n/a".into(), |m| m.to_string()),
            elapsed.as_secs_f64()
        ),
    ))
}

fn recursion_oracle() -> Check {
    let params = NCParams::new(1.3, 0.7, 0.4, 0.25).map_err(err)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for irrep in [
        IrrepSpec::discrete_plus(h(1), 12).map_err(err)?,
        IrrepSpec::continuous(-1.0, MGrid::Integer, h(-6), h(6)).map_err(err)?,
    ] {
        let basis = SectorBasis::sector(&irrep, h(1), 8).map_err(err)?;
        let rep = check_recursion(&params, &basis).map_err(err)?;
        ok &= rep.agrees(1e-12) && rep.index_discrepancy;
        notes.push(format!(
            "{} interior rows, max deviation {:.1e}, index discrepancy flagged: {}, conjugation flagged: {}",
            rep.rows_checked, rep.max_deviation, rep.index_discrepancy, rep.conjugation_discrepancy
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn dirac_equivalence() -> Check {
    let params = NCParams::commutative(1.0, 0.8).map_err(err)?;
    let commutative = landau_equivalence_check(&params, &SpinorBasis::commutative(8)).map_err(err)?;
    let irrep = IrrepSpec::discrete_plus(h(1), 12).map_err(err)?;
    let nc = NCParams::new(1.0, 0.8, 0.1, 0.1).map_err(err)?;
    let deformed = landau_equivalence_check(&nc, &SpinorBasis::noncommutative(8, irrep)).map_err(err)?;
    let ok = commutative.sign().is_some() && deformed.sign() == commutative.sign();
    Ok((
        ok,
        format!(
            "commutative matching signs {:?}, (θ,κ)=(0.1,0.1) matching signs {:?}, dim {}",
            commutative.matching_signs, deformed.matching_signs, deformed.dim
        ),
    ))
}

fn block_diagonality() -> Check {
    let params = NCParams::new(1.0, 1.0, 0.3, 0.2).map_err(err)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for irrep in [
        IrrepSpec::discrete_plus(h(1), 10).map_err(err)?,
        IrrepSpec::continuous(-1.0, MGrid::Integer, h(-5), h(5)).map_err(err)?,
    ] {
        let basis = SectorBasis::full(&irrep, 6);
        let hm = build_hamiltonian(&params, &basis).map_err(err)?;
        let cross = cross_sector_coupling(hm.as_sparse(), &basis);
        let comm = hm.as_sparse().commutator(m0_matrix(&basis).as_sparse()).max_abs();
        ok &= cross == 0.0 && comm == 0.0;
        notes.push(format!("dim {}: cross-sector {cross:e}, ‖[H, M0]‖ {comm:e}", basis.dim()));
    }
    Ok((ok, notes.join("; ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("levi-pipeline", levi_pipeline),
        ("jacobi-suite", jacobi_suite),
        ("commutative-limit", commutative_limit),
        ("small-z-scaling", small_z_scaling),
        ("first-order-and-identity", first_order_and_identity),
        ("degeneracy-breaking", degeneracy_breaking),
        ("large-z-regime", large_z_regime),
        ("recursion-oracle", recursion_oracle),
        ("dirac-equivalence", dirac_equivalence),
        ("block-diagonality", block_diagonality),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
