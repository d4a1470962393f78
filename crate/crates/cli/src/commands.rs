use extkp_core::flows::{flow_rhs, FlowSystem};
use extkp_core::pearcey::{asym_compare, ContourSpec};
use extkp_core::string_ops::{
    a_equation_residual, block_coefficients, concomitant_expected, concomitant_sum,
    d_equation_residual, ortho_matrix, ortho_required_order, psi_initial_check, psi_required_order,
    solve_a, solve_d_from,
};
use extkp_core::{qi, LaurentSeries, Which};
use serde_json::json;

use crate::error::CliError;
use crate::formats::{diffpoly_to_json, rational_to_string, CoeffsJson, PearceyJson, SeriesJson};
use crate::report::{Report, Status};
use crate::{Command, VerifyTarget, WhichArg};

/// Below this modulus the asymptotic bound is shown but not asserted.
pub const SMALL_Z: f64 = 3.0;

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Coeffs { r, which, order } => coeffs(r.r, *which, *order),
        Command::Verify { target } => verify(target),
        Command::Flow { r, m } => flow(r.r, *m),
        Command::Pearcey {
            r,
            which,
            z,
            terms,
            tolerance,
            nodes,
            detour,
        } => {
            let spec = ContourSpec {
                r: r.r,
                origin_detour: *detour,
                nodes_per_ray: *nodes,
                tolerance: *tolerance,
            };
            pearcey((*which).into(), *z, *terms, &spec)
        }
    }
}

fn verify(target: &VerifyTarget) -> Result<Report, CliError> {
    match target {
        VerifyTarget::Ortho { r, max, order } => ortho(r.r, *max, *order),
        VerifyTarget::Concomitant { r, order } => concomitant(r.r, *order),
        VerifyTarget::PsiInit { r, n, order } => psi_init(r.r, *n, *order),
        VerifyTarget::OdeResidual { r, order } => ode_residual(r.r, *order),
        VerifyTarget::FlowCommute { r, m, n, max } => flow_commute(r.r, *m, *n, *max),
    }
}

fn strings(v: &[extkp_core::Rational]) -> Vec<String> {
    v.iter().map(rational_to_string).collect()
}

pub fn coeffs(r: u32, which: Option<WhichArg>, order: usize) -> Result<Report, CliError> {
    let a = solve_a(r, order)?;
    let want_a = which != Some(WhichArg::D);
    let want_d = which != Some(WhichArg::A);
    let a_k = block_coefficients(&a, r, order)?;
    let d_k = if want_d {
        Some(block_coefficients(&solve_d_from(&a, r, order)?, r, order)?)
    } else {
        None
    };
    let body = CoeffsJson {
        r,
        order,
        a: want_a.then(|| strings(&a_k)),
        d: d_k.as_deref().map(strings),
    };
    let mut csv = String::from("k");
    if want_a {
        csv.push_str(",a_k");
    }
    if want_d {
        csv.push_str(",d_k");
    }
    csv.push('\n');
    let mut report = Report::new(
        Status::Pass,
        serde_json::to_value(&body).expect("serializable"),
    );
    for k in 0..order {
        let mut row = format!("{}", k + 1);
        let mut line = format!("k={}", k + 1);
        if let Some(a) = &body.a {
            row.push_str(&format!(",{}", a[k]));
            line.push_str(&format!("  a_{} = {}", k + 1, a_k[k]));
        }
        if let (Some(d), Some(dk)) = (&body.d, &d_k) {
            row.push_str(&format!(",{}", d[k]));
            line.push_str(&format!("  d_{} = {}", k + 1, dk[k]));
        }
        csv.push_str(&row);
        csv.push('\n');
        report = report.line(line);
    }
    if order == 0 {
        report = report.line(format!("r={r}: no coefficients requested (order 0)"));
    }
    Ok(report.with_csv(csv))
}

pub fn ortho(r: u32, max: usize, order: Option<usize>) -> Result<Report, CliError> {
    let required = ortho_required_order(r, max, max);
    let order = order.unwrap_or(required);
    if order < required {
        return Err(extkp_core::Error::InsufficientPrecision(format!(
            "residues up to m = n = {max} need order >= {required}, got {order}; increase --order"
        ))
        .into());
    }
    let m = ortho_matrix(r, max, order)?;
    let nonzero: Vec<_> = m
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v != qi(0))
                .map(move |(j, v)| json!([i, j, rational_to_string(v)]))
        })
        .collect();
    let count = (max + 1) * (max + 1);
    let pass = nonzero.is_empty();
    let margin = order - required;
    let json = json!({
        "check": "ortho", "r": r, "max": max, "order": order, "required_order": required,
        "residues": count, "nonzero": nonzero, "margin": margin, "pass": pass,
    });
    Ok(Report::new(Status::from_pass(pass), json)
        .line(format!("ortho r={r}, 0 <= m, n <= {max}, order {order}"))
        .line(format!("{count} residues, {} nonzero", nonzero.len()))
        .line(format!(
            "margin: {margin} blocks above the required order {required}"
        )))
}

pub fn concomitant(r: u32, order: usize) -> Result<Report, CliError> {
    let value = concomitant_sum(r, order)?;
    let expected = concomitant_expected(r, value.trunc());
    let pass = value == expected;
    let json = json!({
        "check": "concomitant", "r": r, "order": order,
        "value": SeriesJson::from(&value), "expected": SeriesJson::from(&expected),
        "margin": value.trunc() - 1, "pass": pass,
    });
    Ok(Report::new(Status::from_pass(pass), json)
        .line(format!("concomitant r={r}, order {order}"))
        .line(format!("value    {value}"))
        .line(format!("expected {expected}"))
        .line(format!(
            "margin: exact through z^-{}, {} orders below the residue",
            value.trunc(),
            value.trunc() - 1
        )))
}

pub fn psi_init(r: u32, n: usize, order: Option<usize>) -> Result<Report, CliError> {
    let required = psi_required_order(r, n);
    let order = order.unwrap_or(required);
    let values = psi_initial_check(r, order, n)?;
    let pass = values
        .iter()
        .enumerate()
        .all(|(k, v)| *v == qi(i64::from(k == 0)));
    let margin = order.saturating_sub(required);
    let shown: Vec<String> = values.iter().map(ToString::to_string).collect();
    let json = json!({
        "check": "psi-init", "r": r, "n": n, "order": order,
        "values": strings(&values), "margin": margin, "pass": pass,
    });
    Ok(Report::new(Status::from_pass(pass), json)
        .line(format!("psi-init r={r}, x^0..x^{n}, order {order}"))
        .line(format!("values: [{}]", shown.join(", ")))
        .line(format!(
            "margin: {margin} blocks above the required order {required}"
        )))
}

pub fn ode_residual(r: u32, order: usize) -> Result<Report, CliError> {
    let a = solve_a(r, order)?;
    let d = solve_d_from(&a, r, order)?;
    let ra = a_equation_residual(&a, r);
    let rd = d_equation_residual(&d, &a, r)?;
    let pass = ra.is_zero() && rd.is_zero();
    let summary = |s: &LaurentSeries| {
        if s.is_zero() {
            format!("0 through z^-{}", s.trunc())
        } else {
            s.to_string()
        }
    };
    let json = json!({
        "check": "ode-residual", "r": r, "order": order,
        "a_residual": SeriesJson::from(&ra), "d_residual": SeriesJson::from(&rd),
        "margin": ra.trunc().min(rd.trunc()), "pass": pass,
    });
    Ok(Report::new(Status::from_pass(pass), json)
        .line(format!("ode-residual r={r}, order {order}"))
        .line(format!("(S^r - (-z)^r) a      = {}", summary(&ra)))
        .line(format!("-S*(d/z) - a(omega z) = {}", summary(&rd)))
        .line(format!(
            "margin: residuals checked on {} orders",
            ra.trunc().min(rd.trunc()) + 1
        )))
}

pub fn flow_commute(r: u32, m: Option<u32>, n: Option<u32>, max: u32) -> Result<Report, CliError> {
    let pairs: Vec<(u32, u32)> = match (m, n) {
        (Some(m), Some(n)) => vec![(m, n)],
        _ => (1..=max)
            .flat_map(|m| ((m + 1)..=max).map(move |n| (m, n)))
            .collect(),
    };
    let mut system = FlowSystem::new(r)?;
    let mut results = Vec::with_capacity(pairs.len());
    let mut report_lines = Vec::new();
    for (m, n) in pairs {
        let ok = system.flows_commute(m, n)?;
        results.push(json!({"m": m, "n": n, "commute": ok}));
        report_lines.push(format!(
            "[d_t{m}, d_t{n}] = 0: {}",
            if ok { "yes" } else { "NO" }
        ));
    }
    let pass = results.iter().all(|v| v["commute"] == true);
    let json =
        json!({"check": "flow-commute", "r": r, "pairs": results, "margin": "exact", "pass": pass});
    let mut report = Report::new(Status::from_pass(pass), json).line(format!("flow-commute r={r}"));
    for l in report_lines {
        report = report.line(l);
    }
    Ok(report.line("margin: exact polynomial identity"))
}

pub fn flow(r: u32, m: u32) -> Result<Report, CliError> {
    let rhs = flow_rhs(m, r)?;
    let single = r == 2;
    let json = json!({
        "r": r, "m": m,
        "rhs": rhs.iter().enumerate().map(|(i, p)| json!({"alpha": i + 1, "terms": diffpoly_to_json(p)})).collect::<Vec<_>>(),
    });
    let mut report = Report::new(Status::Pass, json);
    for (i, p) in rhs.iter().enumerate() {
        let lhs = if single {
            "u_t".to_string()
        } else {
            format!("u_{}_t", i + 1)
        };
        report = report.line(format!("{lhs} = {}", p.display(single)));
    }
    Ok(report)
}

pub fn pearcey(
    which: Which,
    z: extkp_core::pearcey::Complex,
    terms: usize,
    spec: &ContourSpec,
) -> Result<Report, CliError> {
    let c = asym_compare(which, z, terms, spec)?;
    let asserted = z.norm() >= SMALL_Z;
    let body = PearceyJson::new(&c, asserted);
    let status = if asserted {
        Status::from_pass(c.passes())
    } else {
        Status::Reported
    };
    let name = match which {
        Which::A => "A",
        Which::D => "D",
    };
    let mut report = Report::new(status, serde_json::to_value(&body).expect("finite floats"))
        .line(format!("{name}(z), r={}, z = {} {:+}i", spec.r, z.re, z.im))
        .line(format!(
            "quadrature   {:.15} {:+.15}i  (error estimate {:.1e})",
            c.value.re, c.value.im, c.error_estimate
        ))
        .line(format!(
            "{terms}-term series {:.15} {:+.15}i",
            c.truncation.re, c.truncation.im
        ))
        .line(format!(
            "gap {:.3e}, bound 2|next term| = {:.3e}, margin {:.3e}",
            c.gap,
            c.bound,
            c.bound - c.gap
        ));
    if !asserted {
        report = report.line(format!("|z| < {SMALL_Z}: bound reported, not asserted"));
    }
    Ok(report)
}
