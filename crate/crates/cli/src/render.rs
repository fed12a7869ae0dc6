//! Human-readable rendering of reports.

use std::fmt::Write as _;

use nullcover::exactnum::Scalar;
use nullcover::ks::{KsCertificate, Verdict};
use nullcover::nogo::{DutchBook, NoGoReport, NullCover, Outcome, Provenance};
use nullcover::spaces::{AxiomReport, EventSet, MeasureSpace};

/// Obligations listed before the rest are summarized.
const SHOWN_OBLIGATIONS: usize = 10;

fn names(events: &[EventSet], space: &MeasureSpace) -> String {
    events.iter().map(|e| space.name_of(e)).collect::<Vec<_>>().join(", ")
}

pub fn report(r: &AxiomReport, space: &MeasureSpace) -> String {
    let mut s = String::new();
    let status = if r.passed() { "ok" } else { "FAILED" };
    let _ = writeln!(
        s,
        "{}: {status} ({} checked, {} violations, {} unassigned obligations)",
        r.subject,
        r.checked,
        r.violations.len(),
        r.unassigned_obligations.len()
    );
    for v in &r.violations {
        let scope = v.scope.as_deref().map(|x| format!(" in {x}")).unwrap_or_default();
        let _ = write!(s, "  violation {}{scope}: {}", v.axiom, names(&v.events, space));
        if !v.values.is_empty() {
            let _ = write!(s, " [{}]", v.values.join("; "));
        }
        s.push('\n');
    }
    for o in r.unassigned_obligations.iter().take(SHOWN_OBLIGATIONS) {
        let scope = o.scope.as_deref().map(|x| format!(" in {x}")).unwrap_or_default();
        let _ = writeln!(s, "  unassigned {}{scope}: {}", o.axiom, names(&o.events, space));
    }
    if r.unassigned_obligations.len() > SHOWN_OBLIGATIONS {
        let _ = writeln!(
            s,
            "  ... {} more unassigned obligations",
            r.unassigned_obligations.len() - SHOWN_OBLIGATIONS
        );
    }
    s
}

pub fn certificate(c: &KsCertificate) -> String {
    let rule = if c.exclusive { "exclusive rule" } else { "context rule" };
    let head = match &c.verdict {
        Verdict::Colorable(_) => "colorable",
        Verdict::Noncolorable => "noncolorable (KS set)",
        Verdict::Undecided => "undecided: node cap reached",
        Verdict::NotKsCandidate => "not a KS candidate (dimension below 3)",
    };
    let mut s = format!(
        "{head}\n  {} projectors, {} contexts, {rule}, {} nodes, {} conflicts, depth {}\n",
        c.vertices, c.contexts_used, c.nodes_explored, c.conflicts, c.max_depth
    );
    if let Verdict::Colorable(f) = &c.verdict {
        let _ = writeln!(s, "  colored 1: {}", f.ones().join(", "));
    }
    s
}

pub fn cover(c: &NullCover, space: &MeasureSpace) -> String {
    let mut s = format!("null cover with {} events\n", c.events.len());
    for (e, p) in c.events.iter().zip(&c.provenance) {
        let origin = match p {
            Provenance::OrthoPair { first, second } => format!(" (E({first}) ∩ E({second}))"),
            Provenance::ContextComplement { context } => format!(" (X minus events of {{{}}})", context.join(", ")),
            Provenance::Supplied => String::new(),
        };
        let _ = writeln!(s, "  {} = {e}{origin}", space.name_of(e));
    }
    s
}

pub fn book(b: &DutchBook, payoffs: &[Scalar], space: &MeasureSpace) -> String {
    let mut s = String::from("Dutch book\n");
    for bet in &b.bets {
        let _ = writeln!(s, "  stake {} on {}", bet.stake, space.name_of(&bet.event));
    }
    let pays: Vec<String> = payoffs.iter().map(ToString::to_string).collect();
    let _ = writeln!(s, "  payoff by point: {}", pays.join(" "));
    s
}

pub fn nogo(r: &NoGoReport, space: &MeasureSpace) -> String {
    let mut s = format!("R1 = {}\nR2 = {}\nX' = {}\n", r.r1, r.r2, r.x_prime);
    match &r.outcome {
        Outcome::Coloring { point, coloring } => {
            let _ = writeln!(
                s,
                "coloring from point {point}: colored 1: {}",
                coloring.ones().join(", ")
            );
        }
        Outcome::NullCover { cover: c, book: b } => {
            s.push_str(&cover(c, space));
            let pay = nullcover::nogo::payoffs(b, space).unwrap_or_default();
            s.push_str(&book(b, &pay, space));
        }
        Outcome::Violation { details } => {
            s.push_str("inconsistent representation\n");
            for d in details {
                let _ = writeln!(s, "  {d}");
            }
        }
    }
    s
}
