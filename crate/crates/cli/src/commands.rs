//! One function per subcommand. Each returns a [`Report`]; none print.

use anyhow::{anyhow, bail, Result};
use num_rational::BigRational;
use tamegraph::graph::{example1::Blade, mixing_check, transition_matrix, validate, LeoStatus, MarkovMapSpec};
use tamegraph::horseshoe::horseshoe_sequence;
use tamegraph::slope::{
    analyze_slope, check_subeigenvector, example1_eigenvector, exact_perron_vector, lipschitz_report, perron_vector,
    to_rational, vj_subeigenvector, ResidualReport, RowClass, SubEigenvector, Summability, VjOptions,
};
use tamegraph::transition::{
    gurevich_entropy_with, spectral_radius, ArcIndex, CountableMatrix, DepthSchedule, EntropyStatus, FiniteMatrix,
};
use tamegraph::Scalar;

use crate::config::JobConfig;
use crate::report::Report;

const ANALYZE_HORIZON: usize = 64;
const ENTROPY_STEPS: usize = 20;
const HORSESHOE_N: usize = 40;
const SCAN_DEPTH: usize = 30;

fn base_arc(cfg: &JobConfig, m: &dyn CountableMatrix) -> Result<ArcIndex> {
    let base = match cfg.base_arc() {
        Some(b) => b,
        None => m.enumeration().first().cloned().ok_or_else(|| anyhow!("map has no arcs"))?,
    };
    if !m.in_enumeration(&base) {
        bail!("base arc `{base}` is not in the enumeration prefix");
    }
    Ok(base)
}

fn whole(m: &dyn CountableMatrix) -> Result<FiniteMatrix> {
    Ok(FiniteMatrix::principal(m, m.enumeration().to_vec())?)
}

/// Validation, matrix size and mixing certificate.
pub fn analyze(cfg: &JobConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let mut r = Report::new("analyze", &["property", "value"]);
    let row = |r: &mut Report, k: &str, v: String| r.push(vec![k.to_string(), v]);
    row(&mut r, "family", spec.family().to_string());
    row(&mut r, "arcs", spec.arcs().len().to_string());
    row(&mut r, "finite", spec.is_finite().to_string());
    let checked = validate(&spec);
    for v in &checked.violations {
        row(&mut r, "violation", v.to_string());
        r.note(format!("violation: {v}"));
    }
    if !checked.passed() {
        let verdict = format!("invalid, {} violation(s)", checked.violations.len());
        row(&mut r, "verdict", verdict.clone());
        r.set("verdict", verdict);
        r.ok = false;
        return Ok(r);
    }
    let m = transition_matrix(&spec);
    let a = whole(&m)?;
    row(&mut r, "nonzero", a.nnz().to_string());
    let cert = mixing_check(&m, cfg.horizon.unwrap_or(ANALYZE_HORIZON))?;
    row(&mut r, "irreducible", cert.irreducible.to_string());
    row(&mut r, "period", cert.period.map(|p| p.to_string()).unwrap_or_default());
    row(&mut r, "aperiodic", cert.aperiodic.to_string());
    let leo = match &cert.leo {
        LeoStatus::Witness { n } => format!("leo-witness {n}"),
        LeoStatus::Inconclusive { reason } => format!("leo inconclusive ({reason})"),
    };
    row(&mut r, "leo", leo.clone());
    let verdict = if spec.is_finite() {
        let irr = if cert.irreducible { "irreducible" } else { "reducible" };
        let per = match cert.period {
            Some(1) => "aperiodic".to_string(),
            Some(p) => format!("period {p}"),
            None => "period undefined".to_string(),
        };
        format!("valid, {irr}, {per}, {leo}")
    } else if cert.irreducible {
        "valid, irreducible-on-truncation".to_string()
    } else {
        "valid, reducible-on-truncation".to_string()
    };
    row(&mut r, "verdict", verdict.clone());
    r.set("verdict", verdict);
    Ok(r)
}

/// Entropy lower bounds; a finite matrix gives its exact value in one row.
pub fn entropy(cfg: &JobConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let m = transition_matrix(&spec);
    let mut r = Report::new("entropy", &["step", "depth", "size", "log_radius", "irreducible"]);
    if spec.is_finite() {
        let a = whole(&m)?;
        let rad = spectral_radius(&a, (cfg.tol() * 1e-3).max(1e-14))?;
        let value = rad.lower.ln();
        r.push(vec!["1".into(), "full".into(), a.size().to_string(), value.to_string(), rad.irreducible.to_string()]);
        r.set("value", value);
        r.set("status", "finite");
        return Ok(r);
    }
    let base = base_arc(cfg, &m)?;
    let schedule: DepthSchedule = cfg.schedule.into();
    let est = gurevich_entropy_with(&m, &base, cfg.horizon.unwrap_or(ENTROPY_STEPS), cfg.tol(), schedule)?;
    for (k, b) in est.bounds.iter().enumerate() {
        r.push(vec![
            (k + 1).to_string(),
            b.depth.to_string(),
            b.size.to_string(),
            b.log_radius.to_string(),
            b.irreducible.to_string(),
        ]);
    }
    r.set("base", &base);
    r.set("value", est.value);
    r.set(
        "status",
        match est.status {
            EntropyStatus::Converged => "converged",
            EntropyStatus::BudgetExhausted => "budget-exhausted",
        },
    );
    if !est.all_irreducible() {
        r.note("some truncations were reducible; their values are still lower bounds");
    }
    Ok(r)
}

fn class_cell(c: RowClass) -> &'static str {
    match c {
        RowClass::Eigen => "eigen",
        RowClass::Deficient => "deficient",
        RowClass::Violation => "violation",
    }
}

fn residual_rows<S: Scalar>(r: &mut Report, res: &ResidualReport<S>, v: &SubEigenvector<S>) -> Result<()> {
    for row in &res.rows {
        r.push(vec![
            "row".into(),
            row.arc.to_string(),
            v.entry(&row.arc)?.cell(),
            row.image.cell(),
            row.bound.cell(),
            row.slack.cell(),
            class_cell(row.class).into(),
        ]);
    }
    r.set("lambda", res.lambda.cell());
    r.set("rows", res.rows.len());
    r.set("eigen", res.is_eigenvector());
    let deficient: Vec<String> = res.deficient_rows().iter().map(|a| a.to_string()).collect();
    r.set("deficient", deficient.join(" "));
    if !res.is_subeigenvector() {
        r.ok = false;
        r.note("some rows violate Mv <= lambda v");
    }
    Ok(())
}

const EIGEN_COLUMNS: [&str; 7] = ["kind", "id", "entry", "image", "bound", "slack", "class"];

fn example1_eigen<S: Scalar>(cfg: &JobConfig, spec: &MarkovMapSpec, r: &mut Report) -> Result<()> {
    let m = transition_matrix(spec);
    let v = example1_eigenvector::<S>();
    let res = check_subeigenvector(&m, &v.lambda, &v, spec.arcs(), cfg.tol())?;
    residual_rows(r, &res, &v)?;
    let depth = cfg.depth.or(cfg.builtin.as_ref().and_then(|b| b.depth)).unwrap_or(0);
    let blades = (0..=depth)
        .map(Blade::A)
        .chain([Blade::B])
        .chain((1..=depth.max(1) as u64).map(Blade::C));
    for blade in blades {
        let mut sum = S::zero();
        for lap in blade.laps() {
            sum = sum + v.entry(&lap.label())?;
        }
        r.push(vec!["blade".into(), blade.label(), sum.cell(), String::new(), String::new(), String::new(), String::new()]);
    }
    Ok(())
}

fn table_eigen<S: Scalar>(cfg: &JobConfig, m: &dyn CountableMatrix, v: &SubEigenvector<S>, r: &mut Report) -> Result<()> {
    let rows = v.arcs().to_vec();
    let res = check_subeigenvector(m, &v.lambda, v, &rows, cfg.tol())?;
    residual_rows(r, &res, v)
}

/// Perron eigenvector of a finite map, exact when the field allows.
fn finite_perron(cfg: &JobConfig, a: &FiniteMatrix) -> Result<PerronVector> {
    if cfg.exact() {
        let v = exact_perron_vector(a)?;
        Ok(match to_rational(&v) {
            Some(q) => PerronVector::Rational(q),
            None => PerronVector::Surd(v),
        })
    } else {
        Ok(PerronVector::Float(perron_vector(a, cfg.tol().min(1e-12))?))
    }
}

enum PerronVector {
    Rational(SubEigenvector<BigRational>),
    Surd(SubEigenvector<tamegraph::Quadratic>),
    Float(SubEigenvector<f64>),
}

/// Eigenvector with residuals. `lambda` selects the subeigenvector
/// deficient at the base arc.
pub fn eigen(cfg: &JobConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let m = transition_matrix(&spec);
    let mut r = Report::new("eigen", &EIGEN_COLUMNS);
    if let Some(lambda) = cfg.lambda()? {
        if cfg.exact() {
            r.note("subeigenvectors from generating series are computed in floating point");
        }
        let base = base_arc(cfg, &m)?;
        let opts = VjOptions { horizon: cfg.horizon.unwrap_or(VjOptions::default().horizon), tol: cfg.tol(), ..VjOptions::default() };
        let vj = vj_subeigenvector(&m, lambda, &base, opts)?;
        residual_rows(&mut r, &vj.residual, &vj.vector)?;
        r.set("base", &base);
        r.set("expected_deficient_image", vj.expected_deficient_image);
        r.set("certified", vj.certified);
        if !vj.certified {
            r.ok = false;
            r.note("series tails could not be certified; raise the horizon");
        }
        return Ok(r);
    }
    if cfg.is_example1() {
        if cfg.exact() {
            example1_eigen::<BigRational>(cfg, &spec, &mut r)?;
        } else {
            example1_eigen::<f64>(cfg, &spec, &mut r)?;
        }
        return Ok(r);
    }
    if !spec.is_finite() {
        bail!("no eigenvector rule for family `{}`", spec.family());
    }
    match finite_perron(cfg, &whole(&m)?)? {
        PerronVector::Rational(v) => table_eigen(cfg, &m, &v, &mut r)?,
        PerronVector::Surd(v) => table_eigen(cfg, &m, &v, &mut r)?,
        PerronVector::Float(v) => table_eigen(cfg, &m, &v, &mut r)?,
    }
    Ok(r)
}

fn slope_report<S: Scalar>(cfg: &JobConfig, spec: &MarkovMapSpec, v: &SubEigenvector<S>, r: &mut Report) -> Result<()> {
    let out = analyze_slope(spec, v, cfg.horizon.unwrap_or(SCAN_DEPTH))?;
    r.set("lambda", v.lambda.cell());
    r.set(
        "summability",
        match &out.summability {
            Summability::Summable { .. } => "summable".to_string(),
            Summability::NotSummable { arcs, .. } => format!("not-summable over {arcs} arcs"),
            Summability::Unknown => "unknown".to_string(),
        },
    );
    r.set("warnings", out.warnings.len());
    if let Some(w) = out.warnings.iter().max_by(|a, b| a.delta_end.partial_cmp(&b.delta_end).unwrap_or(std::cmp::Ordering::Equal)) {
        r.note(w.to_string());
        if out.warnings.len() > 1 {
            r.note(format!("{} more chains keep positive delta", out.warnings.len() - 1));
        }
    }
    let Some(model) = out.model else {
        r.set("model", "none");
        if let Some(e) = out.error {
            r.note(e.to_string());
        }
        r.ok = false;
        return Ok(());
    };
    r.set("model", format!("{:?}", model.mode()).to_lowercase());
    for a in model.arcs() {
        r.push(vec![
            a.to_string(),
            model.length(a)?.cell(),
            model.slope(a)?.cell(),
            model.image_length(a)?.cell(),
        ]);
    }
    if let Some(eps) = cfg.epsilon {
        let m = transition_matrix(spec);
        let base = base_arc(cfg, &m)?;
        let est = gurevich_entropy_with(&m, &base, ENTROPY_STEPS, 1e-12, DepthSchedule::Doubling)?;
        let lip = lipschitz_report(&model, &est, eps)?;
        r.set("hausdorff_dimension", lip.hausdorff_dimension);
        r.set("lipschitz", lip.lipschitz);
        r.set("product", lip.product);
        r.set("entropy", lip.entropy);
        r.set("epsilon", lip.epsilon);
        r.set("holds", lip.holds);
        if !lip.holds {
            r.ok = false;
            r.note("HD * log+ Lip is not below entropy + epsilon");
        }
    }
    Ok(())
}

/// Constant- or bounded-slope model built from an eigenvector or, with
/// `lambda`, from the subeigenvector deficient at the base arc.
pub fn slope_model(cfg: &JobConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let m = transition_matrix(&spec);
    let mut r = Report::new("slope-model", &["arc", "length", "slope", "image_length"]);
    if let Some(lambda) = cfg.lambda()? {
        let base = base_arc(cfg, &m)?;
        let vj = vj_subeigenvector(&m, lambda, &base, VjOptions { tol: cfg.tol(), ..VjOptions::default() })?;
        r.set("base", &base);
        slope_report(cfg, &spec, &vj.vector, &mut r)?;
        if !vj.certified {
            r.ok = false;
            r.note("series tails could not be certified");
        }
        return Ok(r);
    }
    if cfg.is_example1() {
        if cfg.exact() {
            slope_report(cfg, &spec, &example1_eigenvector::<BigRational>(), &mut r)?;
        } else {
            slope_report(cfg, &spec, &example1_eigenvector::<f64>(), &mut r)?;
        }
        return Ok(r);
    }
    if !spec.is_finite() {
        bail!("no eigenvector rule for family `{}`", spec.family());
    }
    match finite_perron(cfg, &whole(&m)?)? {
        PerronVector::Rational(v) => slope_report(cfg, &spec, &v, &mut r)?,
        PerronVector::Surd(v) => slope_report(cfg, &spec, &v, &mut r)?,
        PerronVector::Float(v) => slope_report(cfg, &spec, &v, &mut r)?,
    }
    Ok(r)
}

/// Loop counts `m_jj(n)` and the entropy bounds `(1/n) log m_jj(n)`.
pub fn horseshoe(cfg: &JobConfig) -> Result<Report> {
    let spec = cfg.spec()?;
    let m = transition_matrix(&spec);
    let base = base_arc(cfg, &m)?;
    let seq = horseshoe_sequence(&m, &base, cfg.horizon.unwrap_or(HORSESHOE_N))?;
    let mut r = Report::new("horseshoe", &["n", "s_n", "bound"]);
    for row in &seq.rows {
        r.push(vec![row.n.to_string(), row.count.to_string(), row.bound_cell("")]);
    }
    r.set("base", &base);
    r.set("best_bound", seq.best_bound().map(|b| b.to_string()).unwrap_or_default());
    Ok(r)
}
