//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Reference values are squares of Bessel zeros and closed forms evaluated to
//! 30 digits outside this crate.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sgl::comparison::nu_inverse_identity;
use sgl::fem;
use sgl::gap::{self, hadamard_ratio, BoundOptions, Evaluation, Verdict};
use sgl::harness::{self, CorpusEntry, Source, Tolerances};
use sgl::mesh::{generate, MeshDomain};
use sgl::radial::{self, RadialOptions};
use sgl::spaceform::{self, CurvaturePair, Spaceform};
use sgl::symmetrize::{
    check_hardy_littlewood, check_norms, check_powers, decreasing_sym, increasing_sym, SymmetrizedProfile, WeightedSamples,
};

const J01_SQ: f64 = 5.783_185_962_946_784_5;
const J11_SQ: f64 = 14.681_970_642_123_893;
/// `2π² − π j₀₁²`: Faber–Krahn slack of the unit square.
const SQUARE_FK_SLACK: f64 = 1.570_794_266_641_484_8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Corpus = Vec<(CorpusEntry, sgl::Result<Evaluation>)>;

fn load_corpus() -> (Corpus, Duration) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/default.cfg");
    let entries = harness::read_corpus(&path).expect("default corpus parses");
    let opts = BoundOptions::default();
    let t = Instant::now();
    let evals = sgl::par::map(&entries, |e| e.evaluate(&opts));
    let elapsed = t.elapsed();
    (entries.into_iter().zip(evals).collect(), elapsed)
}

fn is_ball(e: &CorpusEntry) -> bool {
    matches!(e.source, Source::Disk { .. } | Source::SphericalCap { .. })
}

fn is_flat(e: &CorpusEntry) -> bool {
    matches!(e.source, Source::Square { .. } | Source::Rectangle { .. } | Source::Ellipse { .. })
        || matches!(e.source, Source::Disk { k, .. } if k == 0.0)
}

/// Longest geodesic edge.
fn mesh_size(m: &MeshDomain) -> f64 {
    let g = m.geometry();
    let v = m.conformal_vertices();
    m.triangles()
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| g.distance(v[a], v[b]))
        .fold(0.0, f64::max)
}

fn radial_accuracy() -> Outcome {
    let t = Instant::now();
    let s = radial::ball_spectrum(&Spaceform::new(2, 0.0).unwrap(), 1.0).unwrap();
    let dt = t.elapsed();
    let e1 = (s.lambda1() - J01_SQ).abs() / J01_SQ;
    let e2 = (s.lambda2() - J11_SQ).abs() / J11_SQ;
    outcome(
        e1 < 1e-8 && e2 < 1e-8 && dt < Duration::from_secs(1),
        format!("rel. errors {e1:.2e}, {e2:.2e}; {dt:.2?}"),
    )
}

fn fem_cross_validation() -> Outcome {
    let t = Instant::now();
    let sq = generate::unit_square(100).unwrap();
    let (_, p) = fem::solve_mesh(&sq).unwrap();
    let dt_sq = t.elapsed();
    let e1 = (p.lambda1 - 2.0 * PI * PI).abs() / (2.0 * PI * PI);
    let e2 = (p.lambda2 - 5.0 * PI * PI).abs() / (5.0 * PI * PI);

    let t = Instant::now();
    let disk = generate::geodesic_disk(-1.0, 1.0, 5).unwrap();
    let (_, q) = fem::solve_mesh(&disk).unwrap();
    let dt_h = t.elapsed();
    let exact = radial::ball_spectrum(&Spaceform::new(2, -1.0).unwrap(), 1.0).unwrap();
    let h1 = (q.lambda1 - exact.lambda1()).abs() / exact.lambda1();
    let h2 = (q.lambda2 - exact.lambda2()).abs() / exact.lambda2();
    let limit = Duration::from_secs(30);
    outcome(
        e1 < 0.01 && e2 < 0.01 && h1 < 0.01 && h2 < 0.01 && dt_sq < limit && dt_h < limit,
        format!(
            "square ({} vertices) {e1:.2e}, {e2:.2e} in {dt_sq:.2?}; hyperbolic disk ({} vertices) {h1:.2e}, {h2:.2e} in {dt_h:.2?}",
            sq.vertices().len(),
            disk.vertices().len()
        ),
    )
}

fn sharpness() -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    for (k, r) in [(-1.0, 1.0), (0.0, 1.0), (1.0, 0.6)] {
        let rep = gap::evaluate_ball(2, k, r, &tol).unwrap();
        worst = worst.max(rep.relative_slack.abs());
    }
    let mut meshed = Vec::new();
    for level in [4, 5, 6] {
        let m = generate::geodesic_disk(0.0, 1.0, level).unwrap();
        let ev = gap::evaluate_mesh(&m, 1.0, &CurvaturePair::equal(0.0), &BoundOptions::default()).unwrap();
        meshed.push(ev.report.relative_slack.abs());
    }
    let monotone = meshed.windows(2).all(|w| w[1] < w[0]);
    let within = meshed.iter().all(|s| *s < tol.sharpness_margin);
    outcome(
        worst < 1e-6 && monotone && within,
        format!("radial balls max |slack| {worst:.2e}; meshed disk levels 4-6 |slack| {}", meshed.iter().map(|s| format!("{s:.2e}")).collect::<Vec<_>>().join(" > ")),
    )
}

fn corpus_holds(corpus: &Corpus, elapsed: Duration) -> Outcome {
    let mut bad = Vec::new();
    for (e, r) in corpus {
        match r {
            Ok(ev) if ev.report.verdict == Verdict::Holds => {}
            Ok(ev) => bad.push(format!("{} violated (slack {:.3e})", e.id, ev.report.relative_slack)),
            Err(err) => bad.push(format!("{}: {err}", e.id)),
        }
    }
    let slacks: Vec<String> = corpus
        .iter()
        .filter_map(|(e, r)| r.as_ref().ok().map(|ev| format!("{} {:.2e}", e.id, ev.report.relative_slack)))
        .collect();
    outcome(
        bad.is_empty() && corpus.len() == 6 && elapsed < Duration::from_secs(300),
        if bad.is_empty() {
            format!("{} entries hold in {elapsed:.2?} (slack: {})", corpus.len(), slacks.join(", "))
        } else {
            bad.join("; ")
        },
    )
}

fn faber_krahn(corpus: &Corpus) -> Outcome {
    let all = corpus.iter().all(|(_, r)| r.as_ref().map_or(false, |ev| ev.faber_krahn.holds));
    let sq = corpus.iter().find(|(e, _)| e.id == "square").and_then(|(_, r)| r.as_ref().ok());
    let Some(sq) = sq else { return outcome(false, "square entry missing".into()) };
    let err = (sq.faber_krahn.slack - SQUARE_FK_SLACK).abs() / SQUARE_FK_SLACK;
    outcome(
        all && err < 0.02,
        format!("all entries λ₁(Ω) ≥ λ₁(ball): {all}; square slack {:.5} (rel. error {err:.2e})", sq.faber_krahn.slack),
    )
}

fn chiti(corpus: &Corpus) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (e, r) in corpus.iter().filter(|(e, _)| !is_ball(e)) {
        match r {
            Ok(ev) if ev.chiti.holds && !ev.chiti.vacuous => {
                notes.push(format!("{} r0={:.4}", e.id, ev.chiti.r0.unwrap_or(f64::NAN)))
            }
            Ok(ev) => {
                pass = false;
                notes.push(format!("{} pattern {}", e.id, ev.chiti.sign_pattern));
            }
            Err(err) => {
                pass = false;
                notes.push(format!("{}: {err}", e.id));
            }
        }
    }
    let mut worst = 0.0f64;
    for (k, r) in [(-1.0, 1.0), (0.0, 1.0), (1.0, 0.6)] {
        let ball = radial::ball_spectrum(&Spaceform::new(2, k).unwrap(), r).unwrap();
        worst = worst.max(nu_inverse_identity(&ball, 0.05).unwrap().max_relative_error);
    }
    outcome(pass && worst < 1e-4, format!("{}; ν⁻¹ identity max rel. error {worst:.2e}", notes.join(", ")))
}

/// Random step function: some values repeated to exercise ties.
fn random_samples(rng: &mut ChaCha8Rng, sf: &Spaceform) -> WeightedSamples {
    let n = rng.gen_range(1..40);
    let mut values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..5.0)).collect();
    for i in 1..n {
        if rng.gen_bool(0.2) {
            values[i] = values[rng.gen_range(0..i)];
        }
    }
    let mut weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let mut total = weights.iter().sum::<f64>() * rng.gen_range(1.0..2.0);
    let cap = 0.4 * sf.total_volume();
    if total > cap {
        let s = cap / total;
        weights.iter_mut().for_each(|w| *w *= s);
        total = cap;
    }
    WeightedSamples::new(values, weights, total).unwrap()
}

/// `(volume intervals, value)` of the decreasing (or increasing) rearrangement
/// by sorting.
fn sorted_oracle(ws: &WeightedSamples, decreasing: bool) -> Vec<(f64, f64, f64)> {
    let mut pairs: Vec<(f64, f64)> = ws.values().iter().copied().zip(ws.weights().iter().copied()).collect();
    pairs.sort_by(|a, b| if decreasing { b.0.total_cmp(&a.0) } else { a.0.total_cmp(&b.0) });
    let mut out = Vec::new();
    let mut s = if decreasing { 0.0 } else { ws.total_measure() - ws.sampled_measure() };
    if !decreasing && s > 0.0 {
        out.push((0.0, s, 0.0));
    }
    for (v, w) in pairs {
        out.push((s, s + w, v));
        s += w;
    }
    out
}

/// Levels and shell volumes of the nonzero part of a decreasing
/// rearrangement (the trailing zero shell only records `|D|`).
fn positive_part(p: &SymmetrizedProfile) -> (Vec<f64>, Vec<f64>) {
    let n = p.levels().iter().take_while(|v| **v > 0.0).count();
    (p.levels()[..n].to_vec(), p.volumes()[..=n].to_vec())
}

fn symmetrization_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let tol = 1e-10;
    let (mut norm, mut hl, mut pow, mut oracle) = (0.0f64, 0usize, 0.0f64, 0.0f64);
    let mut d_independent = true;
    for i in 0..1000 {
        let sf = Spaceform::new(2 + i % 2, [-1.0, 0.0, 1.0][i % 3]).unwrap();
        let f = random_samples(&mut rng, &sf);
        let g0 = random_samples(&mut rng, &sf);
        let g = WeightedSamples::new(
            (0..f.len()).map(|j| g0.values()[j % g0.len()]).collect(),
            f.weights().to_vec(),
            f.total_measure(),
        )
        .unwrap();
        norm = norm.max(check_norms(&f, &sf, &[1.0, 2.0, 3.5]).unwrap().max_relative_error);
        if !check_hardy_littlewood(&f, &g, &sf).unwrap().holds(tol) {
            hl += 1;
        }
        let beta = rng.gen_range(0.2..4.0);
        let pr = check_powers(&f, &sf, beta).unwrap();
        pow = pow.max(pr.decreasing_error).max(pr.increasing_error);

        for (dec, sym) in [(true, decreasing_sym(&f, &sf).unwrap()), (false, increasing_sym(&f, &sf).unwrap())] {
            for (a, b, v) in sorted_oracle(&f, dec) {
                if b - a > 1e-12 * f.total_measure() {
                    oracle = oracle.max((sym.value_at_volume(0.5 * (a + b)) - v).abs());
                }
            }
        }

        // Enlarging |D| leaves the decreasing rearrangement unchanged and pads
        // the increasing one with a central zero region of the added volume.
        let extra = 0.25 * f.total_measure();
        let total = if sf.curvature() > 0.0 { (f.total_measure() + extra).min(0.45 * sf.total_volume()) } else { f.total_measure() + extra };
        let added = total - f.total_measure();
        let big = f.with_total_measure(total).unwrap();
        let (d0, d1) = (decreasing_sym(&f, &sf).unwrap(), decreasing_sym(&big, &sf).unwrap());
        d_independent &= positive_part(&d0) == positive_part(&d1);
        let (i0, i1) = (increasing_sym(&f, &sf).unwrap(), increasing_sym(&big, &sf).unwrap());
        let pad0 = if i0.levels().first() == Some(&0.0) { i0.volumes()[1] } else { 0.0 };
        let pad1 = if i1.levels().first() == Some(&0.0) { i1.volumes()[1] } else { 0.0 };
        d_independent &= ((pad1 - pad0) - added).abs() <= 1e-12 * total;
    }
    outcome(
        norm < tol && hl == 0 && pow < tol && oracle < tol && d_independent,
        format!(
            "1000 instances: norms {norm:.1e}, Hardy–Littlewood failures {hl}, powers {pow:.1e}, sort oracle {oracle:.1e}, D-independence {d_independent}"
        ),
    )
}

fn monotonicity_certification() -> Outcome {
    let opts = RadialOptions { intervals: 10_000, ..RadialOptions::default() };
    let mut failed = Vec::new();
    let mut worst = (0.0f64, 0.0f64);
    for n in [2, 3] {
        for k in [-1.0, 0.0, 1.0] {
            let sf = Spaceform::new(n, k).unwrap();
            for r in [0.3, 0.6, 1.0f64] {
                let r = r.min(0.99 * sf.hemisphere_radius());
                let spectrum = radial::ball_spectrum_with(&sf, r, &opts).unwrap();
                let tp = radial::h_and_f(&spectrum).unwrap();
                let (a, b) = tp.violations();
                worst = (worst.0.max(a), worst.1.max(b));
                if !tp.certified() || tp.h().len() < 10_001 {
                    failed.push(format!("n={n} k={k} R={r}"));
                }
            }
        }
    }
    outcome(
        failed.is_empty(),
        format!(
            "18 balls on 10⁴ intervals; worst h drop {:.1e}, F rise {:.1e}{}",
            worst.0,
            worst.1,
            if failed.is_empty() { String::new() } else { format!("; failed {}", failed.join(", ")) }
        ),
    )
}

fn spaceform_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let mut notes = Vec::new();
    let mut pass = true;
    for k in [-1.0, 0.0, 1.0] {
        let sf = Spaceform::new(2, k).unwrap();
        let sf3 = Spaceform::new(3, k).unwrap();
        let r_cap = if k > 0.0 { 0.999 * sf.hemisphere_radius() } else { 3.0 };
        let s_cap = sf.ball_volume(r_cap).unwrap();
        let (mut conc, mut defect, mut ident, mut dil, mut c1_excess) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..1000 {
            // Second divided difference of the profile at three sampled volumes.
            let space = if rng.gen_bool(0.5) { &sf } else { &sf3 };
            let cap = space.ball_volume(r_cap).unwrap();
            let mut s = [rng.gen_range(1e-3..1.0) * cap, rng.gen_range(1e-3..1.0) * cap, rng.gen_range(1e-3..1.0) * cap];
            s.sort_by(f64::total_cmp);
            if s[1] - s[0] > 1e-6 * cap && s[2] - s[1] > 1e-6 * cap {
                let a: Vec<f64> = s.iter().map(|v| space.iso_profile(*v).unwrap()).collect();
                let dd = ((a[2] - a[1]) / (s[2] - s[1]) - (a[1] - a[0]) / (s[1] - s[0])) / (s[2] - s[0]);
                conc = conc.max(dd);
            }
            let r = rng.gen_range(1e-3..1.0) * r_cap;
            defect = defect.max(space.profile_concavity_defect(r));
            ident = ident.max((spaceform::cn(k, r).powi(2) + k * spaceform::sn(k, r).powi(2) - 1.0).abs());
            let g = rng.gen_range(1e-3..=1.0);
            let sv = rng.gen_range(1e-3..1.0) * s_cap;
            let lhs = sf.iso_profile(sv).unwrap();
            let rhs = sf.iso_profile(g * sv).unwrap() / g;
            dil = dil.max((lhs - rhs) / rhs);

            // C₁ of a ball of N(K) transferred into N(k), against the
            // sphere-area ratio at the diameter.
            // For k > 0 the ball must stay under half the model sphere.
            let (kl, d, lower) = loop {
                let kl = k - rng.gen_range(0.0..2.0);
                let d = rng.gen_range(0.05..1.0) * if k > 0.0 { 0.99 * sf.hemisphere_radius() } else { 2.0 };
                let lower = Spaceform::new(2, kl).unwrap();
                if k <= 0.0 || lower.ball_volume(d).unwrap() < 0.5 * sf.total_volume() {
                    break (kl, d, lower);
                }
            };
            let mut c1 = 1.0f64;
            for j in 1..=64 {
                let t = d * j as f64 / 64.0;
                let sig = sf.ball_radius_for_volume(lower.ball_volume(t).unwrap()).unwrap();
                let dsig = lower.sphere_area(t).unwrap() / sf.sphere_area(sig).unwrap();
                c1 = c1.max(dsig).max(sf.sn(sig) / sf.sn(t));
            }
            let pair = CurvaturePair::new(k, kl).unwrap();
            let ratio = spaceform::sphere_area_ratio(2, &pair, d).unwrap();
            c1_excess = c1_excess.max((c1 - ratio) / ratio);
        }
        let mut cc = 0.0f64;
        for n in [2, 3, 4] {
            for kl in [k - 1.5, k - 0.5, k] {
                let pair = CurvaturePair::new(k, kl).unwrap();
                let d = if k > 0.0 { 1.2 } else { 1.7 };
                let c = spaceform::curvature_constant(n, &pair, d).unwrap();
                let ratio = spaceform::sphere_area_ratio(n, &pair, d).unwrap();
                cc = cc.max((c - ratio * ratio).abs() / c);
            }
        }
        let ok = conc <= 1e-10 && defect <= 0.0 && ident <= 1e-12 && dil <= 1e-12 && c1_excess <= 1e-9 && cc <= 1e-12;
        pass &= ok;
        notes.push(format!(
            "k={k}: dd {conc:.1e}, defect {defect:.1e}, sn′² {ident:.1e}, dilation {dil:.1e}, C₁ excess {c1_excess:.1e}, ratio² {cc:.1e}"
        ));
    }
    outcome(pass, notes.join("; "))
}

fn balancing(corpus: &Corpus) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (e, r) in corpus {
        let Ok(ev) = r else {
            pass = false;
            notes.push(format!("{} failed", e.id));
            continue;
        };
        let off = ev.balance.p[0].hypot(ev.balance.p[1]);
        let allowed = match e.source.mesh().unwrap() {
            Some(m) if m.curvature() != 0.0 => {
                let c = m.geometry().distance(ev.balance.point(), num_complex::Complex64::new(0.0, 0.0));
                pass &= c <= mesh_size(&m);
                c
            }
            _ => {
                pass &= off <= 1e-6;
                off
            }
        };
        pass &= ev.balance.residual < 1e-6;
        notes.push(format!("{} res {:.1e} off {:.1e}", e.id, ev.balance.residual, allowed));
    }
    // An asymmetric domain, where the iteration has to move.
    let l = generate::l_shape(12).unwrap();
    match gap::evaluate_mesh(&l, 1.0, &CurvaturePair::equal(0.0), &BoundOptions::default()) {
        Ok(ev) => {
            pass &= ev.balance.residual < 1e-6;
            notes.push(format!("L-shape res {:.1e} after {} steps", ev.balance.residual, ev.balance.iterations));
        }
        Err(err) => {
            pass = false;
            notes.push(format!("L-shape: {err}"));
        }
    }
    outcome(pass, notes.join(", "))
}

fn hadamard(corpus: &Corpus) -> Outcome {
    let ppw = J11_SQ / J01_SQ;
    let mut notes = Vec::new();
    let mut pass = true;
    for (e, r) in corpus.iter().filter(|(e, _)| is_flat(e)) {
        let Ok(ev) = r else {
            pass = false;
            continue;
        };
        let ratio = ev.report.lambda2 / ev.report.lambda1;
        let h = hadamard_ratio(&ev.report, 2, 0.01).unwrap();
        pass &= ratio <= ppw * 1.01 && h.holds;
        notes.push(format!("{} {ratio:.4}", e.id));
    }
    let disk = generate::geodesic_disk(0.0, 1.0, 5).unwrap();
    let (_, p) = fem::solve_mesh(&disk).unwrap();
    let dr = p.lambda2 / p.lambda1;
    pass &= (dr - ppw).abs() / ppw < 0.01;
    outcome(pass, format!("PPW {ppw:.4}; {}; disk {dr:.4}", notes.join(", ")))
}

fn main() {
    let (corpus, elapsed) = load_corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("radial solver accuracy", Box::new(radial_accuracy)),
        ("FEM cross-validation", Box::new(fem_cross_validation)),
        ("sharpness on geodesic balls", Box::new(sharpness)),
        ("gap bound on the corpus", Box::new(|| corpus_holds(&corpus, elapsed))),
        ("Faber–Krahn", Box::new(|| faber_krahn(&corpus))),
        ("Chiti crossing and ν⁻¹ identity", Box::new(|| chiti(&corpus))),
        ("symmetrization suite", Box::new(symmetrization_suite)),
        ("monotonicity certification", Box::new(monotonicity_certification)),
        ("spaceform identities", Box::new(spaceform_identities)),
        ("balancing point", Box::new(|| balancing(&corpus))),
        ("Hadamard ratio", Box::new(|| hadamard(&corpus))),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("{} {:>2} {name}: {} [{:.2?}]", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail, t.elapsed());
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
