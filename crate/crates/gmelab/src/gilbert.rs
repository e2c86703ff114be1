//! Iterative projection onto the convex hull of pure (bi)product states.
//!
//! One run repeatedly draws a random class-admissible trial state, keeps it
//! when it passes the preselection test, polishes it with see-saw sweeps, and
//! mixes it into the current closest-state approximation with the closed-form
//! optimal weight. The squared distance to the test state is recorded every
//! `record_interval` corrections (plus once at the end), giving the decay
//! history the distance estimator consumes.
//!
//! Runs are sequential and fully determined by their seed; distinct runs are
//! independent and may execute concurrently.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eigen::top_eigenpair;
use crate::error::{Error, Result};
use crate::operator::{
    c, hs_distance_sq, hs_inner, permute_ket, permute_matrix, ComplexMatrix, DensityMatrix, Ket,
    C_ZERO,
};
use crate::partition::{
    cut_factor_dims, enumerate_bipartitions, Bipartition, PartySpec, SeparabilityClass,
};

/// Knobs for one projection run.
#[derive(Clone, Debug)]
pub struct GilbertConfig {
    /// Accepted-correction budget.
    pub max_corrections: u64,
    /// Total trial budget, counting failed preselections.
    pub max_trials: u64,
    /// Squared distance is recorded every this many corrections.
    pub record_interval: u64,
    /// See-saw sweep cap per accepted trial.
    pub seesaw_sweeps: u32,
    /// See-saw stops early when a full sweep improves the objective by less.
    pub seesaw_tol: f64,
    pub rng_seed: u64,
    /// Optional halt once the distance upper bound drops this low.
    pub target_distance: Option<f64>,
}

impl Default for GilbertConfig {
    fn default() -> Self {
        Self {
            max_corrections: 3500,
            max_trials: 2_000_000,
            record_interval: 50,
            seesaw_sweeps: 60,
            seesaw_tol: 1e-10,
            rng_seed: 1,
            target_distance: None,
        }
    }
}

impl GilbertConfig {
    pub fn validate(&self) -> Result<()> {
        if self.record_interval < 1 {
            return Err(Error::ParamOutOfRange {
                name: "record_interval",
                value: self.record_interval as f64,
            });
        }
        if self.max_corrections < 1 {
            return Err(Error::ParamOutOfRange {
                name: "max_corrections",
                value: self.max_corrections as f64,
            });
        }
        if self.seesaw_tol <= 0.0 {
            return Err(Error::ParamOutOfRange {
                name: "seesaw_tol",
                value: self.seesaw_tol,
            });
        }
        Ok(())
    }
}

/// One accepted correction: the trial projector mixed in with weight 1-p.
#[derive(Clone, Debug)]
pub struct CorrectionRecord {
    pub mix_weight: f64,
    pub trial: Ket,
    /// Cut the trial was a biproduct over; `None` for fully product trials.
    pub cut: Option<Bipartition>,
}

/// Result of a projection run.
#[derive(Clone, Debug)]
pub struct GilbertRun {
    pub rho: DensityMatrix,
    /// Current approximation of the closest state in the class.
    pub css: DensityMatrix,
    pub class: SeparabilityClass,
    pub spec: PartySpec,
    pub config: GilbertConfig,
    /// (correction index, squared distance) samples, non-increasing.
    pub history: Vec<(u64, f64)>,
    pub corrections_done: u64,
    pub trials_used: u64,
    /// √Tr(ρ-ρ')² at halt: the distance upper bound.
    pub d_last: f64,
    /// Construction log witnessing that `css` is a convex combination of
    /// class-admissible pure states.
    pub log: Vec<CorrectionRecord>,
}

impl GilbertRun {
    /// History serialized as CSV with header `correction,d_squared`.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("correction,d_squared\n");
        for (c, d2) in &self.history {
            out.push_str(&format!("{c},{d2}\n"));
        }
        out
    }
}

/// Haar-random ket: normalized vector of standard complex Gaussians.
pub fn haar_ket(dim: usize, rng: &mut ChaCha8Rng) -> Ket {
    let amps: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    Ket::new(amps).expect("gaussian vector is nonzero")
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller from two uniforms.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let mag = (-2.0 * u1.ln()).sqrt();
    let angle = 2.0 * std::f64::consts::PI * u2;
    c(mag * angle.cos(), mag * angle.sin())
}

/// A trial pure state plus the factor structure it was drawn with.
#[derive(Clone, Debug)]
pub struct Trial {
    pub ket: Ket,
    pub cut: Option<Bipartition>,
    /// Local factors in the sampling layout (per group, or the two cut sides).
    factors: Vec<Ket>,
}

/// Draws a class-admissible random pure state: independent Haar-random local
/// kets per group for the fully separable class, a Haar-random ket on each
/// side of the cut otherwise. The biseparable class draws its cut uniformly.
pub fn random_trial(
    class: &SeparabilityClass,
    spec: &PartySpec,
    rng: &mut ChaCha8Rng,
) -> Result<Trial> {
    match class {
        SeparabilityClass::FullySeparable => {
            let factors: Vec<Ket> = spec
                .group_dims()
                .iter()
                .map(|&d| haar_ket(d, rng))
                .collect();
            let ket = tensor_all(&factors);
            Ok(Trial {
                ket,
                cut: None,
                factors,
            })
        }
        SeparabilityClass::SingleCut(cut) => trial_for_cut(cut.clone(), spec, rng),
        SeparabilityClass::Biseparable => {
            let cuts = enumerate_bipartitions(spec)?;
            let cut = cuts[rng.gen_range(0..cuts.len())].clone();
            trial_for_cut(cut, spec, rng)
        }
    }
}

fn trial_for_cut(cut: Bipartition, spec: &PartySpec, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let (dim_a, dim_b, perm) = cut_factor_dims(&cut, spec)?;
    let factors = vec![haar_ket(dim_a, rng), haar_ket(dim_b, rng)];
    let cut_ordered = factors[0].tensor(&factors[1]);
    // Undo the cut ordering: apply the inverse slot map.
    let mut cut_dims = vec![0usize; perm.len()];
    let mut inv = vec![0usize; perm.len()];
    for (old, &new) in perm.iter().enumerate() {
        cut_dims[new] = spec.particle_dims()[old];
        inv[new] = old;
    }
    let (ket, _) = permute_ket(&cut_ordered, &cut_dims, &inv)?;
    Ok(Trial {
        ket,
        cut: Some(cut),
        factors,
    })
}

fn tensor_all(factors: &[Ket]) -> Ket {
    let mut it = factors.iter();
    let first = it.next().expect("at least one factor").clone();
    it.fold(first, |acc, f| acc.tensor(f))
}

/// Preselection test: Tr (ρ-ρ')(Π(trial)-ρ') > 0.
pub fn preselect(rho: &DensityMatrix, css: &DensityMatrix, trial: &Ket) -> Result<bool> {
    let m = rho.matrix().sub(css.matrix())?;
    let value = trial.expectation(&m)? - hs_inner(&m, css.matrix())?;
    Ok(value > 0.0)
}

/// What the see-saw optimizes over.
#[derive(Clone, Copy, Debug)]
pub enum SeesawScope<'a> {
    /// Product over every group of the spec.
    Full,
    /// Biproduct across one cut.
    Cut(&'a Bipartition),
}

/// Alternating maximization of ⟨ψ|m|ψ⟩ over pure product states: each factor
/// in turn is replaced by the top eigenvector of its local effective
/// operator. The value sequence is non-decreasing; sweeps stop early once a
/// full sweep gains less than `tol`.
pub fn seesaw_maximize(
    m: &ComplexMatrix,
    scope: SeesawScope<'_>,
    spec: &PartySpec,
    start: &Ket,
    sweeps: u32,
    tol: f64,
) -> Result<(Ket, f64)> {
    m.check_hermitian(crate::operator::OP_HERMITIAN_TOL)?;
    match scope {
        SeesawScope::Full => {
            let dims = spec.group_dims();
            let factors = split_product(start, &dims)?;
            let (factors, value) = seesaw_factors(m, &dims, factors, sweeps, tol)?;
            Ok((tensor_all(&factors), value))
        }
        SeesawScope::Cut(cut) => {
            let (dim_a, dim_b, perm) = cut_factor_dims(cut, spec)?;
            let (m_cut, _) = permute_matrix(m, spec.particle_dims(), &perm)?;
            let (start_cut, _) = permute_ket(start, spec.particle_dims(), &perm)?;
            let dims = vec![dim_a, dim_b];
            let factors = split_product(&start_cut, &dims)?;
            let (factors, value) = seesaw_factors(&m_cut, &dims, factors, sweeps, tol)?;
            let joined = tensor_all(&factors);
            let mut cut_dims = vec![0usize; perm.len()];
            let mut inv = vec![0usize; perm.len()];
            for (old, &new) in perm.iter().enumerate() {
                cut_dims[new] = spec.particle_dims()[old];
                inv[new] = old;
            }
            let (ket, _) = permute_ket(&joined, &cut_dims, &inv)?;
            Ok((ket, value))
        }
    }
}

/// Recovers the local factors of a (near-)product ket as top eigenvectors of
/// its reduced states.
fn split_product(ket: &Ket, dims: &[usize]) -> Result<Vec<Ket>> {
    let rho = DensityMatrix::from_pure(ket, dims.to_vec())?;
    let mut factors = Vec::with_capacity(dims.len());
    for k in 0..dims.len() {
        let reduced = rho.partial_trace(&[k])?;
        let (_, top) = top_eigenpair(reduced.matrix())?;
        factors.push(top);
    }
    Ok(factors)
}

/// Core see-saw loop over explicit factors (dims must be contiguous).
fn seesaw_factors(
    m: &ComplexMatrix,
    dims: &[usize],
    mut factors: Vec<Ket>,
    sweeps: u32,
    tol: f64,
) -> Result<(Vec<Ket>, f64)> {
    let mut value = tensor_all(&factors).expectation(m)?;
    for _ in 0..sweeps {
        let before = value;
        for i in 0..factors.len() {
            let eff = effective_operator(m, dims, &factors, i)?;
            let (top_val, top_vec) = top_eigenpair(&eff)?;
            factors[i] = top_vec;
            value = top_val;
        }
        if value - before < tol {
            break;
        }
    }
    Ok((factors, value))
}

/// Contracts `m` with every factor except `slot`, leaving the Hermitian
/// operator whose top eigenvector is the optimal replacement for that factor.
fn effective_operator(
    m: &ComplexMatrix,
    dims: &[usize],
    factors: &[Ket],
    slot: usize,
) -> Result<ComplexMatrix> {
    let d = dims[slot];
    let total: usize = dims.iter().product();
    // Embedded vectors v_a = f_0 ⊗ … ⊗ e_a ⊗ … ⊗ f_{k-1}.
    let mut embedded: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for a in 0..d {
        let mut parts: Vec<&Ket> = factors.iter().collect();
        let basis = Ket::basis(d, a);
        parts[slot] = &basis;
        let mut acc = parts[0].amplitudes().to_vec();
        for f in &parts[1..] {
            let mut next = Vec::with_capacity(acc.len() * f.dim());
            for x in &acc {
                for y in f.amplitudes() {
                    next.push(x * y);
                }
            }
            acc = next;
        }
        debug_assert_eq!(acc.len(), total);
        embedded.push(acc);
    }
    // M[a][b] = v_a† m v_b
    let mut out = ComplexMatrix::zeros(d);
    for b in 0..d {
        let mut mv = vec![C_ZERO; total];
        for (i, row) in mv.iter_mut().enumerate() {
            let mut acc = C_ZERO;
            for j in 0..total {
                acc += m.get(i, j) * embedded[b][j];
            }
            *row = acc;
        }
        for a in 0..d {
            let mut acc = C_ZERO;
            for i in 0..total {
                acc += embedded[a][i].conj() * mv[i];
            }
            out.set(a, b, acc);
        }
    }
    // Hermitize away the last bits of rounding.
    Ok(out.add(&out.adjoint())?.scale(0.5))
}

/// Closed-form minimizer of D²(ρ, pρ' + (1-p)Π'') clamped to [0, 1];
/// returns 1 when ρ' and Π'' coincide.
pub fn optimal_mix(rho: &ComplexMatrix, css: &ComplexMatrix, trial_proj: &ComplexMatrix) -> Result<f64> {
    let rho_minus = rho.sub(trial_proj)?;
    let css_minus = css.sub(trial_proj)?;
    let denom = hs_inner(&css_minus, &css_minus)?;
    if denom < 1e-30 {
        return Ok(1.0);
    }
    let p = hs_inner(&rho_minus, &css_minus)? / denom;
    Ok(p.clamp(0.0, 1.0))
}

/// Runs the full projection loop from the maximally mixed state, which is
/// admissible for every class.
///
/// Failed preselections consume the trial budget but not the correction
/// budget. Halting: corrections exhausted, trials exhausted, or the target
/// distance reached. A run that exhausts its trials before any correction is
/// returned with zero corrections rather than an error.
pub fn run(
    rho: &DensityMatrix,
    class: &SeparabilityClass,
    spec: &PartySpec,
    config: &GilbertConfig,
) -> Result<GilbertRun> {
    let initial = DensityMatrix::maximally_mixed(rho.factor_dims().to_vec())?;
    run_from(rho, class, spec, config, &initial)
}

/// [`run`] with an explicit starting approximation. The caller is
/// responsible for the start being inside the class; the correction log only
/// witnesses the states mixed in after it.
pub fn run_from(
    rho: &DensityMatrix,
    class: &SeparabilityClass,
    spec: &PartySpec,
    config: &GilbertConfig,
    initial: &DensityMatrix,
) -> Result<GilbertRun> {
    config.validate()?;
    if rho.dim() != spec.total_dim() {
        return Err(Error::DimMismatch {
            left: rho.dim(),
            right: spec.total_dim(),
        });
    }
    if initial.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            left: initial.dim(),
            right: rho.dim(),
        });
    }
    if spec.group_count() < 2 {
        return Err(Error::SingleGroup);
    }
    if let SeparabilityClass::SingleCut(cut) = class {
        // Validates the cut against the spec's groups.
        cut_factor_dims(cut, spec)?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let dim = rho.dim();
    let mut css = initial.matrix().clone();
    let mut m = rho.matrix().sub(&css)?; // ρ - ρ'
    let mut m_css = hs_inner(&m, &css)?;
    let mut d2 = hs_distance_sq(rho.matrix(), &css)?;

    let mut history: Vec<(u64, f64)> = Vec::new();
    let mut log: Vec<CorrectionRecord> = Vec::new();
    let mut corrections: u64 = 0;
    let mut trials: u64 = 0;

    loop {
        if let Some(target) = config.target_distance {
            if d2.sqrt() <= target {
                break;
            }
        }
        if corrections >= config.max_corrections || trials >= config.max_trials {
            break;
        }
        trials += 1;
        let trial = random_trial(class, spec, &mut rng)?;
        let trial_value = trial.ket.expectation(&m)?;
        if trial_value - m_css <= 0.0 {
            continue; // preselection failed
        }
        // Polish the trial along its own factor structure.
        let polished = match &trial.cut {
            None => {
                let dims = spec.group_dims();
                let (factors, _) =
                    seesaw_factors(&m, &dims, trial.factors.clone(), config.seesaw_sweeps, config.seesaw_tol)?;
                tensor_all(&factors)
            }
            Some(cut) => {
                let (dim_a, dim_b, perm) = cut_factor_dims(cut, spec)?;
                let (m_cut, _) = permute_matrix(&m, spec.particle_dims(), &perm)?;
                let dims = vec![dim_a, dim_b];
                let (factors, _) = seesaw_factors(
                    &m_cut,
                    &dims,
                    trial.factors.clone(),
                    config.seesaw_sweeps,
                    config.seesaw_tol,
                )?;
                let joined = tensor_all(&factors);
                let mut cut_dims = vec![0usize; perm.len()];
                let mut inv = vec![0usize; perm.len()];
                for (old, &new) in perm.iter().enumerate() {
                    cut_dims[new] = spec.particle_dims()[old];
                    inv[new] = old;
                }
                permute_ket(&joined, &cut_dims, &inv)?.0
            }
        };
        let proj = polished.projector();
        let p = optimal_mix(rho.matrix(), &css, &proj)?;
        let mut next = css.scale(p).add(&proj.scale(1.0 - p))?;
        // Keep the diagonal exactly real against rounding drift.
        for i in 0..dim {
            let v = next.get(i, i);
            next.set(i, i, c(v.re, 0.0));
        }
        let next_d2 = hs_distance_sq(rho.matrix(), &next)?;
        if next_d2 > d2 {
            // Numerically sterile update; discard it.
            continue;
        }
        css = next;
        d2 = next_d2;
        m = rho.matrix().sub(&css)?;
        m_css = hs_inner(&m, &css)?;
        corrections += 1;
        log.push(CorrectionRecord {
            mix_weight: p,
            trial: polished,
            cut: trial.cut.clone(),
        });
        if corrections % config.record_interval == 0 {
            history.push((corrections, d2));
        }
    }
    if corrections > 0 && history.last().map(|&(c, _)| c) != Some(corrections) {
        history.push((corrections, d2));
    }

    let css = DensityMatrix::new(css, rho.factor_dims().to_vec())?;
    Ok(GilbertRun {
        rho: rho.clone(),
        css,
        class: class.clone(),
        spec: spec.clone(),
        config: config.clone(),
        history,
        corrections_done: corrections,
        trials_used: trials,
        d_last: d2.sqrt(),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::hs_distance;
    use crate::states::{build_state, ghz_ket, psi_plus_ket, StateName};
    use crate::test_support::{assert_close, rng};

    fn two_qubit_spec() -> PartySpec {
        PartySpec::single_qubits(2).unwrap()
    }

    #[test]
    fn haar_trials_are_normalized_and_deterministic() {
        let spec = PartySpec::single_qubits(3).unwrap();
        let mut r1 = rng(5);
        let mut r2 = rng(5);
        for _ in 0..10 {
            let a = random_trial(&SeparabilityClass::Biseparable, &spec, &mut r1).unwrap();
            let b = random_trial(&SeparabilityClass::Biseparable, &spec, &mut r2).unwrap();
            assert_close(a.ket.norm(), 1.0, 1e-12);
            assert_eq!(a.cut, b.cut);
            for (x, y) in a.ket.amplitudes().iter().zip(b.ket.amplitudes()) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn single_cut_trial_is_biproduct() {
        let spec = PartySpec::single_qubits(3).unwrap();
        let cut = Bipartition::parse("A|BC", &spec).unwrap();
        let mut r = rng(11);
        let trial =
            random_trial(&SeparabilityClass::SingleCut(cut), &spec, &mut r).unwrap();
        // Schmidt rank 1 across the cut: reduced state on A is pure.
        let rho = DensityMatrix::from_pure(&trial.ket, vec![2, 2, 2]).unwrap();
        let reduced = rho.partial_trace(&[0]).unwrap();
        assert_close(reduced.purity(), 1.0, 1e-12);
    }

    #[test]
    fn preselect_on_converged_run_is_false() {
        let spec = two_qubit_spec();
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let css = rho.clone();
        let mut r = rng(3);
        for _ in 0..20 {
            let trial = random_trial(&SeparabilityClass::FullySeparable, &spec, &mut r).unwrap();
            assert!(!preselect(&rho, &css, &trial.ket).unwrap());
        }
    }

    #[test]
    fn preselect_value_on_bell_state() {
        // Tr((Π(Ψ⁺)-𝟙/4)(Π(|00⟩)-𝟙/4)) = 1/4 > 0.
        let rho = DensityMatrix::from_pure(&psi_plus_ket(), vec![2, 2]).unwrap();
        let css = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let trial = Ket::basis(4, 0);
        assert!(preselect(&rho, &css, &trial).unwrap());
        let m = rho.matrix().sub(css.matrix()).unwrap();
        let value = trial.expectation(&m).unwrap() - hs_inner(&m, css.matrix()).unwrap();
        assert_close(value, 0.25, 1e-14);
    }

    #[test]
    fn preselect_zero_when_trial_equals_pure_css() {
        let rho = DensityMatrix::from_pure(&psi_plus_ket(), vec![2, 2]).unwrap();
        let css = DensityMatrix::from_pure(&Ket::basis(4, 0), vec![2, 2]).unwrap();
        assert!(!preselect(&rho, &css, &Ket::basis(4, 0)).unwrap());
    }

    #[test]
    fn optimal_mix_examples() {
        let rho = psi_plus_ket().projector();
        let p00 = Ket::basis(4, 0).projector();
        let p11 = Ket::basis(4, 3).projector();
        // Trial hits the target exactly.
        assert_close(optimal_mix(&p00, &p11, &p00).unwrap(), 0.0, 1e-15);
        // Tie rule: ρ' = Π''.
        assert_close(optimal_mix(&rho, &p00, &p00).unwrap(), 1.0, 0.0);
        // Hand-derived quadratic minimum.
        assert_close(optimal_mix(&rho, &p00, &p11).unwrap(), 0.5, 1e-14);
    }

    #[test]
    fn seesaw_bell_overlap_over_products() {
        // max ⟨ab|Π(Ψ⁺)|ab⟩ over product states = 1/2.
        let spec = two_qubit_spec();
        let m = psi_plus_ket().projector();
        let mut best = f64::NEG_INFINITY;
        let mut r = rng(19);
        for _ in 0..20 {
            let start = random_trial(&SeparabilityClass::FullySeparable, &spec, &mut r).unwrap();
            let (_, v) =
                seesaw_maximize(&m, SeesawScope::Full, &spec, &start.ket, 200, 1e-14).unwrap();
            best = best.max(v);
        }
        assert_close(best, 0.5, 1e-9);
    }

    #[test]
    fn seesaw_ghz_witness_biseparable_max() {
        // max over biseparable pure states of ⟨ψ|8Π(GHZ₃)-𝟙|ψ⟩ = 3.
        let spec = PartySpec::single_qubits(3).unwrap();
        let ghz = ghz_ket(3).unwrap();
        let m = ghz
            .projector()
            .scale(8.0)
            .sub(&ComplexMatrix::identity(8))
            .unwrap();
        let mut best = f64::NEG_INFINITY;
        let mut r = rng(23);
        for cut in enumerate_bipartitions(&spec).unwrap() {
            for _ in 0..30 {
                let start =
                    random_trial(&SeparabilityClass::SingleCut(cut.clone()), &spec, &mut r)
                        .unwrap();
                let (_, v) =
                    seesaw_maximize(&m, SeesawScope::Cut(&cut), &spec, &start.ket, 200, 1e-14)
                        .unwrap();
                best = best.max(v);
            }
        }
        assert_close(best, 3.0, 1e-6);
    }

    #[test]
    fn seesaw_values_never_decrease() {
        let spec = PartySpec::single_qubits(3).unwrap();
        let mut r = rng(31);
        let m = crate::test_support::random_hermitian(&mut r, 8);
        let dims = spec.group_dims();
        for _ in 0..10 {
            let trial = random_trial(&SeparabilityClass::FullySeparable, &spec, &mut r).unwrap();
            let mut factors = trial.factors.clone();
            let mut last = tensor_all(&factors).expectation(&m).unwrap();
            for _ in 0..12 {
                for i in 0..factors.len() {
                    let eff = effective_operator(&m, &dims, &factors, i).unwrap();
                    let (v, vec) = top_eigenpair(&eff).unwrap();
                    factors[i] = vec;
                    assert!(v >= last - 1e-11, "seesaw step decreased: {v} < {last}");
                    last = v;
                }
            }
        }
    }

    #[test]
    fn run_on_maximally_mixed_needs_no_corrections() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let spec = two_qubit_spec();
        let config = GilbertConfig {
            max_corrections: 10,
            max_trials: 200,
            target_distance: Some(1e-6),
            rng_seed: 7,
            ..Default::default()
        };
        let run = run(&rho, &SeparabilityClass::FullySeparable, &spec, &config).unwrap();
        assert!(run.d_last < 1e-6);
        assert_eq!(run.corrections_done, 0);
        assert_eq!(run.trials_used, 0); // target met before any trial
    }

    #[test]
    fn budget_exhaustion_reports_zero_corrections() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        let spec = two_qubit_spec();
        let config = GilbertConfig {
            max_corrections: 10,
            max_trials: 50,
            rng_seed: 7,
            ..Default::default()
        };
        let run = run(&rho, &SeparabilityClass::FullySeparable, &spec, &config).unwrap();
        assert_eq!(run.corrections_done, 0);
        assert_eq!(run.trials_used, 50);
        assert!(run.d_last < 1e-12);
    }

    #[test]
    fn run_converges_on_pure_product_state() {
        let ket = Ket::basis(2, 0).tensor(&Ket::basis(2, 1));
        let rho = DensityMatrix::from_pure(&ket, vec![2, 2]).unwrap();
        let spec = two_qubit_spec();
        let config = GilbertConfig {
            max_corrections: 200,
            max_trials: 50_000,
            rng_seed: 5,
            target_distance: Some(1e-5),
            ..Default::default()
        };
        let run = run(&rho, &SeparabilityClass::FullySeparable, &spec, &config).unwrap();
        assert!(run.d_last < 1e-4, "d_last = {}", run.d_last);
    }

    #[test]
    fn history_is_monotone_and_reproducible() {
        let state = build_state(StateName::Rho3(0.0)).unwrap();
        let rho = state.density().unwrap();
        let config = GilbertConfig {
            max_corrections: 300,
            max_trials: 100_000,
            rng_seed: 99,
            record_interval: 25,
            ..Default::default()
        };
        let r1 = run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
        let r2 = run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
        assert_eq!(r1.history, r2.history);
        assert_eq!(r1.trials_used, r2.trials_used);
        for w in r1.history.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15);
        }
        assert!(hs_distance(r1.css.matrix(), r2.css.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn run_from_continues_a_previous_approximation() {
        let state = build_state(StateName::Rho3(0.0)).unwrap();
        let rho = state.density().unwrap();
        let config = GilbertConfig {
            max_corrections: 30,
            max_trials: 20_000,
            rng_seed: 51,
            ..Default::default()
        };
        let first = run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
        let resumed = run_from(
            &rho,
            &SeparabilityClass::Biseparable,
            &state.spec,
            &GilbertConfig {
                rng_seed: 52,
                ..config
            },
            &first.css,
        )
        .unwrap();
        assert!(resumed.d_last <= first.d_last + 1e-12);
    }

    #[test]
    fn estimate_from_run_is_bounded_by_d_last() {
        let state = build_state(StateName::Rho3(0.2)).unwrap();
        let rho = state.density().unwrap();
        let config = GilbertConfig {
            max_corrections: 300,
            max_trials: 150_000,
            rng_seed: 17,
            record_interval: 1,
            ..Default::default()
        };
        let result = run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
        let est = crate::estimator::estimate(&result.history).unwrap();
        assert!(est.d_est <= result.d_last + 1e-9);
        assert!(est.a_star < result.history.last().unwrap().1);
    }

    #[test]
    fn css_reconstructs_from_correction_log() {
        let state = build_state(StateName::Rho3(0.3)).unwrap();
        let rho = state.density().unwrap();
        let config = GilbertConfig {
            max_corrections: 120,
            max_trials: 50_000,
            rng_seed: 13,
            ..Default::default()
        };
        let result = run(&rho, &SeparabilityClass::Biseparable, &state.spec, &config).unwrap();
        let mut rebuilt = ComplexMatrix::identity(8).scale(1.0 / 8.0);
        for rec in &result.log {
            rebuilt = rebuilt
                .scale(rec.mix_weight)
                .add(&rec.trial.projector().scale(1.0 - rec.mix_weight))
                .unwrap();
        }
        assert!(hs_distance(&rebuilt, result.css.matrix()).unwrap() < 1e-9);
        // Every logged trial is a biproduct over its recorded cut: after the
        // cut reordering the reduced state on side A is pure.
        for rec in &result.log {
            let cut = rec.cut.as_ref().expect("biseparable trials carry cuts");
            let (dim_a, _, perm) = cut_factor_dims(cut, &state.spec).unwrap();
            let (permuted, new_dims) =
                permute_ket(&rec.trial, state.spec.particle_dims(), &perm).unwrap();
            let pure = DensityMatrix::from_pure(&permuted, new_dims.clone()).unwrap();
            let mut side_a_slots = 0;
            let mut acc = 1;
            while acc < dim_a {
                acc *= new_dims[side_a_slots];
                side_a_slots += 1;
            }
            let keep: Vec<usize> = (0..side_a_slots).collect();
            let reduced = pure.partial_trace(&keep).unwrap();
            assert!(reduced.purity() > 1.0 - 1e-9);
        }
    }
}
