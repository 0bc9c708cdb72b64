//! The trace-repair schemes: single-erasure repair, three two-erasure
//! schemes (Distributed I, Centralized, Distributed II), and the
//! three-erasure centralized and distributed schemes built on repair cycles
//! and activation.
//!
//! Every scheme consumes a [`PartialCodeword`] (erased content is absent by
//! construction) and produces a [`RepairResult`] carrying the recovered
//! symbols, an exact per-link [`BandwidthLedger`] in sub-symbols, and a
//! transcript of each repair equation with its interference cancellations.

use crate::code::{CodeParams, PartialCodeword};
use crate::error::{Error, Result};
use crate::field::{Bel, Fel, FieldTower};
use crate::linalg::{self, TraceBasis};

/// One, two, or three erased positions. The listed order assigns the roles:
/// the first position is `alpha*`, the second `alpha-bar`, the third
/// `alpha-prime`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    positions: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(positions: &[usize]) -> Result<ErasurePattern> {
        if positions.is_empty() || positions.len() > 3 {
            return Err(Error::PatternError("pattern must erase 1..=3 positions"));
        }
        for (i, a) in positions.iter().enumerate() {
            if positions[i + 1..].contains(a) {
                return Err(Error::PatternError("erased positions must be distinct"));
            }
        }
        Ok(ErasurePattern { positions: positions.to_vec() })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.positions.contains(&pos)
    }
}

/// Endpoint of a transfer: a surviving node, a replacement node, or the
/// repair center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef {
    Node(usize),
    Replacement(usize),
    Center,
}

impl std::fmt::Display for NodeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeRef::Node(j) => write!(f, "node:{j}"),
            NodeRef::Replacement(j) => write!(f, "repl:{j}"),
            NodeRef::Center => write!(f, "center"),
        }
    }
}

/// A single transfer of `subsymbols` sub-symbols. Single-trace transfers
/// carry their value; whole-symbol transfers carry the symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transfer {
    pub from: NodeRef,
    pub to: NodeRef,
    pub subsymbols: u32,
    pub value: Option<Fel>,
}

/// Every transfer that the repair performed, in download order. Totals are
/// exact equalities against the schemes' closed forms, not bounds.
#[derive(Debug, Clone, Default)]
pub struct BandwidthLedger {
    transfers: Vec<Transfer>,
}

impl BandwidthLedger {
    pub fn push(&mut self, from: NodeRef, to: NodeRef, subsymbols: u32, value: Option<Fel>) {
        debug_assert!(subsymbols > 0);
        self.transfers.push(Transfer { from, to, subsymbols, value });
    }

    pub fn transfers(&self) -> &[Transfer] {
        &self.transfers
    }

    /// Grand total in sub-symbols.
    pub fn total(&self) -> u64 {
        self.transfers.iter().map(|t| t.subsymbols as u64).sum()
    }

    /// Sub-symbols downloaded by the repair center.
    pub fn center_total(&self) -> u64 {
        self.transfers
            .iter()
            .filter(|t| t.to == NodeRef::Center)
            .map(|t| t.subsymbols as u64)
            .sum()
    }

    /// Sub-symbols exchanged between replacement nodes.
    pub fn exchange_total(&self) -> u64 {
        self.transfers
            .iter()
            .filter(|t| {
                matches!(t.from, NodeRef::Replacement(_)) && matches!(t.to, NodeRef::Replacement(_))
            })
            .map(|t| t.subsymbols as u64)
            .sum()
    }

    /// Sub-symbols received by one destination.
    pub fn received_by(&self, dest: NodeRef) -> u64 {
        self.transfers
            .iter()
            .filter(|t| t.to == dest)
            .map(|t| t.subsymbols as u64)
            .sum()
    }
}

/// How an interfering trace was removed from a repair equation: the erased
/// position it involved, the deduced trace value, and the B-combination of
/// previously extracted traces that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cancellation {
    pub at_position: usize,
    pub value: Bel,
    pub via: Vec<(String, Bel)>,
}

/// One repair equation: the check that generated it, its right-hand side,
/// and the trace extracted after cancelling interference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptRow {
    pub check: String,
    pub center_value: Fel,
    pub rhs: Bel,
    pub extracted: Bel,
    pub cancels: Vec<Cancellation>,
}

/// Data specific to the three-erasure rounds: the dimension `s` of the
/// triple root space, the shared basis `U = V = W`, the per-symbol
/// extension elements, and the activation ratio that triggered the cycles.
#[derive(Debug, Clone)]
pub struct ThreeErasureContext {
    pub s: usize,
    pub shared_basis: Vec<Fel>,
    pub extensions: [Vec<Fel>; 3],
    /// 1-based index of the correctability ratio used, and its value.
    pub activation_ratio: (usize, Fel),
}

/// Outcome of one repair job.
#[derive(Debug, Clone)]
pub struct RepairResult {
    pub scheme: String,
    pub pattern: ErasurePattern,
    /// Recovered `(position, symbol)` pairs in pattern order.
    pub recovered: Vec<(usize, Fel)>,
    pub ledger: BandwidthLedger,
    pub transcript: Vec<TranscriptRow>,
    pub three: Option<ThreeErasureContext>,
    pub fallback: bool,
}

impl RepairResult {
    /// Stable textual report used by golden tests and transcript dumps.
    pub fn render(&self, tower: &FieldTower) -> String {
        let mut out = String::new();
        out.push_str(&format!("scheme = {}\n", self.scheme));
        let pat: Vec<String> = self.pattern.positions().iter().map(usize::to_string).collect();
        out.push_str(&format!("pattern = {}\n", pat.join(";")));
        out.push_str(&format!("fallback = {}\n", self.fallback));
        for (pos, val) in &self.recovered {
            out.push_str(&format!("recovered {} = {}\n", pos, tower.format(*val)));
        }
        if let Some(ctx) = &self.three {
            let basis: Vec<String> =
                ctx.shared_basis.iter().map(|&e| tower.format(e)).collect();
            out.push_str(&format!(
                "round1 s = {} basis = {} ratio{} = {}\n",
                ctx.s,
                basis.join(","),
                ctx.activation_ratio.0,
                tower.format(ctx.activation_ratio.1),
            ));
        }
        for t in self.ledger.transfers() {
            let val = t.value.map_or("-".to_string(), |v| tower.format(v));
            out.push_str(&format!(
                "transfer {} -> {} subsymbols={} value={}\n",
                t.from, t.to, t.subsymbols, val
            ));
        }
        out.push_str(&format!(
            "bandwidth total={} center={} exchanged={}\n",
            self.ledger.total(),
            self.ledger.center_total(),
            self.ledger.exchange_total()
        ));
        for row in &self.transcript {
            out.push_str(&format!(
                "check {} center={} rhs={} extracted={}",
                row.check,
                tower.format(row.center_value),
                tower.format(row.rhs),
                tower.format(row.extracted)
            ));
            for c in &row.cancels {
                let via: Vec<String> = c
                    .via
                    .iter()
                    .map(|(id, coef)| format!("{}*{}", id, tower.format(*coef)))
                    .collect();
                out.push_str(&format!(
                    " cancel at={} value={} via={}",
                    c.at_position,
                    tower.format(c.value),
                    via.join(",")
                ));
            }
            out.push('\n');
        }
        out
    }
}

/// The helping trace `Tr(symbol / (alpha - center))`: the one sub-symbol a
/// node at `alpha` sends toward repairing the symbol at `center`.
pub fn helping_trace(tower: &FieldTower, symbol: Fel, alpha: Fel, center: Fel) -> Result<Bel> {
    if alpha == center {
        return Err(Error::DegenerateInput("helping trace needs alpha != center"));
    }
    let delta = tower.sub(alpha, center);
    Ok(tower.trace(tower.mul(symbol, tower.inv(delta)?)))
}

fn validate(params: &CodeParams, cw: &PartialCodeword, arity: usize) -> Result<()> {
    if cw.pattern().len() != arity {
        return Err(Error::PatternError("erasure count does not match the scheme"));
    }
    if cw.len() != params.n() {
        return Err(Error::ShapeError("codeword length must equal n"));
    }
    if cw.pattern().positions().iter().any(|&p| p >= params.n()) {
        return Err(Error::PatternError("erased position out of range"));
    }
    if cw.pattern().len() > params.n() - params.k() {
        return Err(Error::PatternError("more erasures than the code can correct"));
    }
    if !params.trace_checks_fit() {
        return Err(Error::PatternError("trace checks need n - k >= |B|^(t-1)"));
    }
    Ok(())
}

fn require_divisibility(tower: &FieldTower) -> Result<()> {
    if !tower.char_divides_t() {
        return Err(Error::DivisibilityError { t: tower.t(), ch: tower.p() });
    }
    Ok(())
}

/// `-sum_j Tr(mult * (alpha_j - center)) * h_j` over the given helpers:
/// the right-hand side of a repair equation assembled from helping traces.
fn equation_rhs(
    tower: &FieldTower,
    center: Fel,
    helpers: &[(usize, Fel, Bel)],
    mult: Fel,
) -> Bel {
    let mut acc = Fel::ZERO;
    for &(_, point, h) in helpers {
        let coeff = tower.trace(tower.mul(mult, tower.sub(point, center)));
        acc = tower.add(acc, tower.mul(coeff, h));
    }
    tower.neg(acc)
}

/// Recovers a symbol from its `t` independent traces `Tr(basis_i * symbol)`.
fn symbol_from_traces(tower: &FieldTower, basis: &[Fel], traces: &[Bel]) -> Result<Fel> {
    let tb = linalg::dual_basis(tower, &TraceBasis::new(basis.to_vec()))?;
    let dual = tb.dual.expect("dual filled");
    let mut acc = Fel::ZERO;
    for (tau, d) in traces.iter().zip(&dual) {
        acc = tower.add(acc, tower.mul(*tau, *d));
    }
    Ok(acc)
}

/// Downloads helping traces toward `center` from every survivor, recording
/// them in the ledger.
fn download_helpers(
    params: &CodeParams,
    cw: &PartialCodeword,
    center_pos: usize,
    to: NodeRef,
    ledger: &mut BandwidthLedger,
) -> Result<Vec<(usize, Fel, Bel)>> {
    let tower = params.tower();
    let center = params.point(center_pos);
    let mut out = Vec::new();
    for (j, symbol) in cw.survivors() {
        let h = helping_trace(tower, symbol, params.point(j), center)?;
        ledger.push(NodeRef::Node(j), to, 1, Some(h));
        out.push((j, params.point(j), h));
    }
    Ok(out)
}

/// Guruswami-Wootters single-erasure repair: one sub-symbol from each of the
/// `n - 1` surviving nodes.
pub fn repair_single_gw(params: &CodeParams, cw: &PartialCodeword) -> Result<RepairResult> {
    validate(params, cw, 1)?;
    let tower = params.tower();
    let pos = cw.pattern().positions()[0];
    let mut ledger = BandwidthLedger::default();
    let helpers = download_helpers(params, cw, pos, NodeRef::Replacement(pos), &mut ledger)?;

    let basis = linalg::complete_basis(tower, &[])?;
    let center = params.point(pos);
    let mut transcript = Vec::new();
    let mut traces = Vec::with_capacity(basis.elements.len());
    for (i, &u) in basis.elements.iter().enumerate() {
        let tau = equation_rhs(tower, center, &helpers, u);
        transcript.push(TranscriptRow {
            check: format!("p{}", i + 1),
            center_value: u,
            rhs: tau,
            extracted: tau,
            cancels: Vec::new(),
        });
        traces.push(tau);
    }
    let recovered = symbol_from_traces(tower, &basis.elements, &traces)?;
    Ok(RepairResult {
        scheme: "gw".to_string(),
        pattern: cw.pattern().clone(),
        recovered: vec![(pos, recovered)],
        ledger,
        transcript,
        three: None,
        fallback: false,
    })
}

/// Distributed Scheme I for two erasures: repair the first symbol with
/// `n - 2 + k` sub-symbols (no divisibility condition), then the second via
/// the single-erasure scheme at `n - 1`.
pub fn repair_two_distributed_one(
    params: &CodeParams,
    cw: &PartialCodeword,
) -> Result<RepairResult> {
    validate(params, cw, 2)?;
    let tower = params.tower();
    if tower.t() < 2 {
        return Err(Error::PatternError("distributed scheme I needs t >= 2"));
    }
    let (p0, p1) = (cw.pattern().positions()[0], cw.pattern().positions()[1]);
    let (a_star, a_bar) = (params.point(p0), params.point(p1));

    // Phase 1: recover f(alpha*).
    let root = linalg::root_space(tower, a_star, a_bar)?;
    let basis = linalg::complete_basis(tower, root.basis())?;
    let u1 = basis.elements[0];
    let ut = basis.elements[tower.t() as usize - 1];

    let mut ledger = BandwidthLedger::default();
    let helpers = download_helpers(params, cw, p0, NodeRef::Replacement(p0), &mut ledger)?;

    let mut transcript = Vec::new();
    let mut traces = Vec::new();
    for (i, &u) in basis.elements.iter().enumerate().take(tower.t() as usize - 1) {
        let tau = equation_rhs(tower, a_star, &helpers, u);
        transcript.push(TranscriptRow {
            check: format!("p{}", i + 1),
            center_value: u,
            rhs: tau,
            extracted: tau,
            cancels: Vec::new(),
        });
        traces.push(tau);
    }

    // Last check p_t = (u_t/u_1) p_1: its support off alpha* is the k points
    // where Tr(u_1(alpha - alpha*)) != 0; each contributes one extra trace.
    let ratio = tower.div(ut, u1)?;
    let mut last = Fel::ZERO;
    for (j, point, _) in &helpers {
        let b = tower.trace(tower.mul(u1, tower.sub(*point, a_star)));
        if b.is_zero() {
            continue;
        }
        let symbol = cw.symbol(*j).expect("survivor");
        let extra = tower.trace(tower.mul(
            ratio,
            tower.mul(symbol, tower.inv(tower.sub(*point, a_star))?),
        ));
        ledger.push(NodeRef::Node(*j), NodeRef::Replacement(p0), 1, Some(extra));
        last = tower.add(last, tower.mul(b, extra));
    }
    let tau_t = tower.neg(last);
    transcript.push(TranscriptRow {
        check: format!("p{}", tower.t()),
        center_value: ut,
        rhs: tau_t,
        extracted: tau_t,
        cancels: Vec::new(),
    });
    traces.push(tau_t);
    let first = symbol_from_traces(tower, &basis.elements, &traces)?;

    // Phase 2: single-erasure repair of f(alpha-bar); the replacement for
    // alpha* serves as a helper with its recovered content.
    let gw_basis = linalg::complete_basis(tower, &[])?;
    let mut helpers2 = Vec::new();
    for (j, symbol) in cw.survivors() {
        let h = helping_trace(tower, symbol, params.point(j), a_bar)?;
        ledger.push(NodeRef::Node(j), NodeRef::Replacement(p1), 1, Some(h));
        helpers2.push((j, params.point(j), h));
    }
    let h0 = helping_trace(tower, first, a_star, a_bar)?;
    ledger.push(NodeRef::Replacement(p0), NodeRef::Replacement(p1), 1, Some(h0));
    helpers2.push((p0, a_star, h0));

    let mut traces2 = Vec::new();
    for (i, &u) in gw_basis.elements.iter().enumerate() {
        let tau = equation_rhs(tower, a_bar, &helpers2, u);
        transcript.push(TranscriptRow {
            check: format!("q{}", i + 1),
            center_value: u,
            rhs: tau,
            extracted: tau,
            cancels: Vec::new(),
        });
        traces2.push(tau);
    }
    let second = symbol_from_traces(tower, &gw_basis.elements, &traces2)?;

    Ok(RepairResult {
        scheme: "dist1".to_string(),
        pattern: cw.pattern().clone(),
        recovered: vec![(p0, first), (p1, second)],
        ledger,
        transcript,
        three: None,
        fallback: false,
    })
}

/// Shared setup for the centralized and Distributed II two-erasure schemes:
/// the canonical basis `U = V` of the root space completed to `U' = V'`.
fn two_erasure_checks(
    tower: &FieldTower,
    a_star: Fel,
    a_bar: Fel,
) -> Result<(Vec<Fel>, usize)> {
    let root = linalg::root_space(tower, a_star, a_bar)?;
    let basis = linalg::complete_basis(tower, root.basis())?;
    Ok((basis.elements, root.dim()))
}

struct TwoErasureTraces {
    traces_p: Vec<Bel>,
    traces_q: Vec<Bel>,
    rhs_p_t: Bel,
    rhs_q_t: Bel,
}

/// Extracts the first `t - 1` traces of both erased symbols and the partial
/// right-hand sides of the two doubly-involved checks.
fn two_erasure_partial_traces(
    tower: &FieldTower,
    basis: &[Fel],
    a_star: Fel,
    a_bar: Fel,
    helpers_star: &[(usize, Fel, Bel)],
    helpers_bar: &[(usize, Fel, Bel)],
    transcript: &mut Vec<TranscriptRow>,
) -> TwoErasureTraces {
    let t = basis.len();
    let mut traces_p = Vec::new();
    let mut traces_q = Vec::new();
    for (i, &u) in basis.iter().enumerate().take(t - 1) {
        let tau_p = equation_rhs(tower, a_star, helpers_star, u);
        transcript.push(TranscriptRow {
            check: format!("p{}", i + 1),
            center_value: u,
            rhs: tau_p,
            extracted: tau_p,
            cancels: Vec::new(),
        });
        traces_p.push(tau_p);
        let tau_q = equation_rhs(tower, a_bar, helpers_bar, u);
        transcript.push(TranscriptRow {
            check: format!("q{}", i + 1),
            center_value: u,
            rhs: tau_q,
            extracted: tau_q,
            cancels: Vec::new(),
        });
        traces_q.push(tau_q);
    }
    let ut = basis[t - 1];
    TwoErasureTraces {
        traces_p,
        traces_q,
        rhs_p_t: equation_rhs(tower, a_star, helpers_star, ut),
        rhs_q_t: equation_rhs(tower, a_bar, helpers_bar, ut),
    }
}

/// Value of the check `p_{u,center}` at an off-center point.
fn check_value_at(tower: &FieldTower, u: Fel, center: Fel, point: Fel) -> Fel {
    let delta = tower.sub(point, center);
    tower.mul(
        tower.trace(tower.mul(u, delta)),
        tower.inv(delta).expect("distinct points"),
    )
}

/// Writes an interfering value as a B-combination of known traces and
/// returns the deduced interfering trace with its provenance.
fn cancel_interference(
    tower: &FieldTower,
    value: Fel,
    span: &[Fel],
    traces: &[Bel],
    labels: &[String],
    at_position: usize,
) -> Result<Cancellation> {
    let coeffs = linalg::express_in_span(tower, value, span)
        .ok_or(Error::Internal("interfering value escaped its root space"))?;
    let mut deduced = Fel::ZERO;
    let mut via = Vec::new();
    for ((c, tau), label) in coeffs.iter().zip(traces).zip(labels) {
        deduced = tower.add(deduced, tower.mul(*c, *tau));
        via.push((label.clone(), *c));
    }
    Ok(Cancellation { at_position, value: deduced, via })
}

/// Centralized two-erasure repair: `2(n-2)` sub-symbols downloaded by the
/// repair center; needs the extension degree divisible by the characteristic.
pub fn repair_two_centralized(params: &CodeParams, cw: &PartialCodeword) -> Result<RepairResult> {
    validate(params, cw, 2)?;
    let tower = params.tower();
    require_divisibility(tower)?;
    let (p0, p1) = (cw.pattern().positions()[0], cw.pattern().positions()[1]);
    let (a_star, a_bar) = (params.point(p0), params.point(p1));
    let (basis, dim) = two_erasure_checks(tower, a_star, a_bar)?;
    let t = basis.len();

    let mut ledger = BandwidthLedger::default();
    let helpers_star = download_helpers(params, cw, p0, NodeRef::Center, &mut ledger)?;
    let helpers_bar = download_helpers(params, cw, p1, NodeRef::Center, &mut ledger)?;

    let mut transcript = Vec::new();
    let mut partial = two_erasure_partial_traces(
        tower, &basis, a_star, a_bar, &helpers_star, &helpers_bar, &mut transcript,
    );

    let ut = basis[t - 1];
    let labels_q: Vec<String> = (1..t).map(|i| format!("q{i}")).collect();
    let labels_p: Vec<String> = (1..t).map(|i| format!("p{i}")).collect();
    let span = &basis[..dim];

    // p_t involves both erased symbols; its interference at alpha-bar is a
    // B-combination of the q-traces.
    let p_t_at_bar = check_value_at(tower, ut, a_star, a_bar);
    let cancel_p = cancel_interference(
        tower, p_t_at_bar, span, &partial.traces_q, &labels_q, p1,
    )?;
    let tau_p_t = tower.sub(partial.rhs_p_t, cancel_p.value);
    transcript.push(TranscriptRow {
        check: format!("p{t}"),
        center_value: ut,
        rhs: partial.rhs_p_t,
        extracted: tau_p_t,
        cancels: vec![cancel_p],
    });
    partial.traces_p.push(tau_p_t);

    let q_t_at_star = check_value_at(tower, ut, a_bar, a_star);
    let cancel_q = cancel_interference(
        tower, q_t_at_star, span, &partial.traces_p[..t - 1], &labels_p, p0,
    )?;
    let tau_q_t = tower.sub(partial.rhs_q_t, cancel_q.value);
    transcript.push(TranscriptRow {
        check: format!("q{t}"),
        center_value: ut,
        rhs: partial.rhs_q_t,
        extracted: tau_q_t,
        cancels: vec![cancel_q],
    });
    partial.traces_q.push(tau_q_t);

    let first = symbol_from_traces(tower, &basis, &partial.traces_p)?;
    let second = symbol_from_traces(tower, &basis, &partial.traces_q)?;

    Ok(RepairResult {
        scheme: "central2".to_string(),
        pattern: cw.pattern().clone(),
        recovered: vec![(p0, first), (p1, second)],
        ledger,
        transcript,
        three: None,
        fallback: false,
    })
}

/// Distributed Scheme II for two erasures: each replacement downloads
/// `n - 2` sub-symbols from the survivors plus one computed by the other
/// replacement from its own extracted traces, `2(n-1)` in total.
pub fn repair_two_distributed_two(
    params: &CodeParams,
    cw: &PartialCodeword,
) -> Result<RepairResult> {
    validate(params, cw, 2)?;
    let tower = params.tower();
    require_divisibility(tower)?;
    let (p0, p1) = (cw.pattern().positions()[0], cw.pattern().positions()[1]);
    let (a_star, a_bar) = (params.point(p0), params.point(p1));
    let (basis, dim) = two_erasure_checks(tower, a_star, a_bar)?;
    let t = basis.len();

    let mut ledger = BandwidthLedger::default();
    let helpers_star =
        download_helpers(params, cw, p0, NodeRef::Replacement(p0), &mut ledger)?;
    let helpers_bar =
        download_helpers(params, cw, p1, NodeRef::Replacement(p1), &mut ledger)?;

    let mut transcript = Vec::new();
    let mut partial = two_erasure_partial_traces(
        tower, &basis, a_star, a_bar, &helpers_star, &helpers_bar, &mut transcript,
    );

    let ut = basis[t - 1];
    let span = &basis[..dim];

    // The replacement for alpha-bar computes Tr(f(a_bar)/(a_bar - a_star))
    // from its t-1 traces and sends it across; symmetrically the other way.
    let exch_to_star = {
        let mult = tower.inv(tower.sub(a_bar, a_star))?;
        let coeffs = linalg::express_in_span(tower, mult, span)
            .ok_or(Error::Internal("exchange multiplier escaped the root space"))?;
        let mut v = Fel::ZERO;
        for (c, tau) in coeffs.iter().zip(&partial.traces_q) {
            v = tower.add(v, tower.mul(*c, *tau));
        }
        v
    };
    ledger.push(NodeRef::Replacement(p1), NodeRef::Replacement(p0), 1, Some(exch_to_star));

    let exch_to_bar = {
        let mult = tower.inv(tower.sub(a_star, a_bar))?;
        let coeffs = linalg::express_in_span(tower, mult, span)
            .ok_or(Error::Internal("exchange multiplier escaped the root space"))?;
        let mut v = Fel::ZERO;
        for (c, tau) in coeffs.iter().zip(&partial.traces_p) {
            v = tower.add(v, tower.mul(*c, *tau));
        }
        v
    };
    ledger.push(NodeRef::Replacement(p0), NodeRef::Replacement(p1), 1, Some(exch_to_bar));

    // Tr(p_t(a_bar) f(a_bar)) = Tr(u_t(a_bar - a_star)) * exchanged value.
    let b_star = tower.trace(tower.mul(ut, tower.sub(a_bar, a_star)));
    let interf_p = tower.mul(b_star, exch_to_star);
    let tau_p_t = tower.sub(partial.rhs_p_t, interf_p);
    transcript.push(TranscriptRow {
        check: format!("p{t}"),
        center_value: ut,
        rhs: partial.rhs_p_t,
        extracted: tau_p_t,
        cancels: vec![Cancellation {
            at_position: p1,
            value: interf_p,
            via: vec![("exchange".to_string(), b_star)],
        }],
    });
    partial.traces_p.push(tau_p_t);

    let b_bar = tower.trace(tower.mul(ut, tower.sub(a_star, a_bar)));
    let interf_q = tower.mul(b_bar, exch_to_bar);
    let tau_q_t = tower.sub(partial.rhs_q_t, interf_q);
    transcript.push(TranscriptRow {
        check: format!("q{t}"),
        center_value: ut,
        rhs: partial.rhs_q_t,
        extracted: tau_q_t,
        cancels: vec![Cancellation {
            at_position: p0,
            value: interf_q,
            via: vec![("exchange".to_string(), b_bar)],
        }],
    });
    partial.traces_q.push(tau_q_t);

    let first = symbol_from_traces(tower, &basis, &partial.traces_p)?;
    let second = symbol_from_traces(tower, &basis, &partial.traces_q)?;

    Ok(RepairResult {
        scheme: "dist2".to_string(),
        pattern: cw.pattern().clone(),
        recovered: vec![(p0, first), (p1, second)],
        ledger,
        transcript,
        three: None,
        fallback: false,
    })
}

/// The three ratios of pairwise differences tested by the three-erasure
/// schemes, in the fixed order of the correctability condition.
fn difference_ratios(tower: &FieldTower, a: Fel, b: Fel, c: Fel) -> Result<[Fel; 3]> {
    Ok([
        tower.div(tower.sub(b, a), tower.sub(b, c))?,
        tower.div(tower.sub(c, b), tower.sub(c, a))?,
        tower.div(tower.sub(a, c), tower.sub(a, b))?,
    ])
}

/// True when a triple of distinct points can be repaired at low bandwidth:
/// at least one pairwise-difference ratio has zero trace.
pub fn is_correctable_triple(tower: &FieldTower, a: Fel, b: Fel, c: Fel) -> Result<bool> {
    if a == b || b == c || a == c {
        return Err(Error::DegenerateInput("correctability needs distinct points"));
    }
    let ratios = difference_ratios(tower, a, b, c)?;
    Ok(ratios.iter().any(|&r| tower.trace(r).is_zero()))
}

/// Per-symbol state in the three-erasure rounds: the erased position, its
/// evaluation point, its check-label prefix, the generator list (shared
/// basis plus extensions), and the traces extracted so far.
struct Family {
    pos: usize,
    point: Fel,
    prefix: char,
    gens: Vec<Fel>,
    traces: Vec<Bel>,
}

impl Family {
    fn labels(&self) -> Vec<String> {
        (0..self.gens.len()).map(|i| format!("{}{}", self.prefix, i + 1)).collect()
    }
}

struct ThreeOutcome {
    recovered: Vec<(usize, Fel)>,
    transcript: Vec<TranscriptRow>,
    ctx: ThreeErasureContext,
    families: [Family; 3],
}

/// The trace-extraction engine shared by the centralized and distributed
/// three-erasure schemes: Round I traces, then per the dimension of the
/// triple root space either the two activation-triggered repair cycles
/// (Round II) or the doubly-interfered final checks (Round III).
#[allow(clippy::needless_range_loop)] // f and g jointly index the family triple
fn three_erasure_core(
    params: &CodeParams,
    cw: &PartialCodeword,
    helpers: &[Vec<(usize, Fel, Bel)>; 3],
) -> Result<ThreeOutcome> {
    let tower = params.tower();
    let t = tower.t() as usize;
    let pos: Vec<usize> = cw.pattern().positions().to_vec();
    let pts: Vec<Fel> = pos.iter().map(|&p| params.point(p)).collect();
    let (a, b, c) = (pts[0], pts[1], pts[2]);

    let ratios = difference_ratios(tower, a, b, c)?;
    let activation = ratios
        .iter()
        .position(|&r| tower.trace(r).is_zero())
        .map(|i| (i + 1, ratios[i]))
        .ok_or(Error::NotCorrectable)?;

    let triple = linalg::triple_root_space(tower, a, b, c)?;
    let s = triple.dim();
    let base = triple.basis().to_vec();

    let mut families = [
        Family { pos: pos[0], point: a, prefix: 'p', gens: base.clone(), traces: Vec::new() },
        Family { pos: pos[1], point: b, prefix: 'q', gens: base.clone(), traces: Vec::new() },
        Family { pos: pos[2], point: c, prefix: 'r', gens: base.clone(), traces: Vec::new() },
    ];

    // Round I: s traces per symbol, straight from the helping traces.
    let mut transcript = Vec::new();
    for (f, fam) in families.iter_mut().enumerate() {
        for (i, &u) in base.iter().enumerate().take(s) {
            let tau = equation_rhs(tower, fam.point, &helpers[f], u);
            transcript.push(TranscriptRow {
                check: format!("{}{}", fam.prefix, i + 1),
                center_value: u,
                rhs: tau,
                extracted: tau,
                cancels: Vec::new(),
            });
            fam.traces.push(tau);
        }
    }

    let extensions: [Vec<Fel>; 3];
    if s == t - 2 {
        // Round II. Extension elements: the first enumerated element inside
        // the target root space that is independent of the shared basis.
        let extend = |alpha: Fel, beta: Fel| -> Result<Fel> {
            let space = linalg::root_space(tower, alpha, beta)?;
            tower
                .elements()
                .find(|&e| {
                    linalg::express_in_span(tower, e, space.basis()).is_some()
                        && linalg::express_in_span(tower, e, &base).is_none()
                })
                .ok_or(Error::Internal("root space does not extend the triple space"))
        };
        // gens[s] spans the first root space with the base, gens[s+1] the second:
        //   p-family: K(a,b) then K(c,a); q: K(b,c) then K(a,b); r: K(c,a) then K(b,c).
        let u1 = extend(a, b)?;
        let u2 = extend(c, a)?;
        let v1 = extend(b, c)?;
        let v2 = extend(a, b)?;
        let w1 = extend(c, a)?;
        let w2 = extend(b, c)?;
        families[0].gens.extend([u1, u2]);
        families[1].gens.extend([v1, v2]);
        families[2].gens.extend([w1, w2]);
        extensions = [vec![u1, u2], vec![v1, v2], vec![w1, w2]];

        // Each cycle step extracts the trace of check `fam[slot]` whose lone
        // interference sits at family `interf` and is spanned by the shared
        // basis plus `interf`'s element in the same slot (except for the
        // activated first step, where the shared basis alone suffices).
        //
        // Cycle I (slot s+1): p interferes at r, q at p, r at q.
        // Cycle II (slot s+2): p interferes at q, q at r, r at p.
        let interferer_of = |fam: usize, slot: usize| -> usize {
            if slot == 0 {
                [2, 0, 1][fam]
            } else {
                [1, 2, 0][fam]
            }
        };
        // Execution order per cycle, keyed by the activation ratio index:
        // the activated check first, then the checks that need it.
        let orders: [[usize; 3]; 2] = match activation.0 {
            1 => [[2, 0, 1], [1, 0, 2]],
            2 => [[0, 1, 2], [2, 1, 0]],
            _ => [[1, 2, 0], [0, 2, 1]],
        };

        for (slot, order) in orders.iter().enumerate() {
            for (step, &f) in order.iter().enumerate() {
                let fam_point = families[f].point;
                let fam_prefix = families[f].prefix;
                let mult = families[f].gens[s + slot];
                let g = interferer_of(f, slot);
                let interf_value = check_value_at(tower, mult, fam_point, families[g].point);
                let (span, traces, labels): (Vec<Fel>, Vec<Bel>, Vec<String>) = if step == 0 {
                    // Activated: the interference lies in the triple space.
                    (
                        base.clone(),
                        families[g].traces[..s].to_vec(),
                        families[g].labels()[..s].to_vec(),
                    )
                } else {
                    // The interfering family's same-slot trace is known.
                    let mut span = base.clone();
                    span.push(families[g].gens[s + slot]);
                    let mut tr = families[g].traces[..s].to_vec();
                    tr.push(families[g].traces[s + slot]);
                    let mut lb = families[g].labels()[..s].to_vec();
                    lb.push(format!("{}{}", families[g].prefix, s + slot + 1));
                    (span, tr, lb)
                };
                let cancel = cancel_interference(
                    tower,
                    interf_value,
                    &span,
                    &traces,
                    &labels,
                    families[g].pos,
                )?;
                let rhs = equation_rhs(tower, fam_point, &helpers[f], mult);
                let tau = tower.sub(rhs, cancel.value);
                transcript.push(TranscriptRow {
                    check: format!("{}{}", fam_prefix, s + slot + 1),
                    center_value: mult,
                    rhs,
                    extracted: tau,
                    cancels: vec![cancel],
                });
                // Cycle I fills trace index s for every family before
                // cycle II fills index s+1, so a push lands correctly.
                debug_assert_eq!(families[f].traces.len(), s + slot);
                families[f].traces.push(tau);
            }
        }
    } else {
        // Round III: one more check per symbol, interfering at both other
        // erased symbols; both interferences lie in the (coincident) root
        // spaces spanned by the shared basis.
        let last = tower
            .elements()
            .find(|&e| linalg::express_in_span(tower, e, &base).is_none())
            .ok_or(Error::Internal("no element extends the triple space"))?;
        for fam in families.iter_mut() {
            fam.gens.push(last);
        }
        extensions = [vec![last], vec![last], vec![last]];

        for f in 0..3 {
            let fam_point = families[f].point;
            let fam_prefix = families[f].prefix;
            let rhs = equation_rhs(tower, fam_point, &helpers[f], last);
            let mut tau = rhs;
            let mut cancels = Vec::new();
            for g in 0..3 {
                if g == f {
                    continue;
                }
                let interf_value = check_value_at(tower, last, fam_point, families[g].point);
                let cancel = cancel_interference(
                    tower,
                    interf_value,
                    &base,
                    &families[g].traces[..s],
                    &families[g].labels()[..s],
                    families[g].pos,
                )?;
                tau = tower.sub(tau, cancel.value);
                cancels.push(cancel);
            }
            transcript.push(TranscriptRow {
                check: format!("{}{}", fam_prefix, s + 1),
                center_value: last,
                rhs,
                extracted: tau,
                cancels,
            });
            families[f].traces.push(tau);
        }
    }

    let mut recovered = Vec::new();
    for fam in &families {
        debug_assert_eq!(linalg::rank(tower, &fam.gens), t);
        let symbol = symbol_from_traces(tower, &fam.gens, &fam.traces)?;
        recovered.push((fam.pos, symbol));
    }

    Ok(ThreeOutcome {
        recovered,
        transcript,
        ctx: ThreeErasureContext {
            s,
            shared_basis: base,
            extensions,
            activation_ratio: activation,
        },
        families,
    })
}

fn three_erasure_guard(params: &CodeParams, cw: &PartialCodeword) -> Result<()> {
    validate(params, cw, 3)?;
    require_divisibility(params.tower())
}

/// Centralized three-erasure repair: `3(n-3)` sub-symbols, three helping
/// traces downloaded once per surviving node; fails with `NotCorrectable`
/// when no pairwise-difference ratio lies in the trace kernel.
pub fn repair_three_centralized(
    params: &CodeParams,
    cw: &PartialCodeword,
) -> Result<RepairResult> {
    three_erasure_guard(params, cw)?;
    let mut ledger = BandwidthLedger::default();
    let helpers = [
        download_helpers(params, cw, cw.pattern().positions()[0], NodeRef::Center, &mut ledger)?,
        download_helpers(params, cw, cw.pattern().positions()[1], NodeRef::Center, &mut ledger)?,
        download_helpers(params, cw, cw.pattern().positions()[2], NodeRef::Center, &mut ledger)?,
    ];
    let out = three_erasure_core(params, cw, &helpers)?;
    Ok(RepairResult {
        scheme: "central3".to_string(),
        pattern: cw.pattern().clone(),
        recovered: out.recovered,
        ledger,
        transcript: out.transcript,
        three: Some(out.ctx),
        fallback: false,
    })
}

/// Distributed three-erasure repair: each replacement downloads `n - 3`
/// sub-symbols from the survivors and two more computed by the other two
/// replacements from their own traces, `3(n-1)` in total.
#[allow(clippy::needless_range_loop)] // f and g jointly index the family triple
pub fn repair_three_distributed(
    params: &CodeParams,
    cw: &PartialCodeword,
) -> Result<RepairResult> {
    three_erasure_guard(params, cw)?;
    let tower = params.tower();
    let pos: Vec<usize> = cw.pattern().positions().to_vec();
    let mut ledger = BandwidthLedger::default();
    let helpers = [
        download_helpers(params, cw, pos[0], NodeRef::Replacement(pos[0]), &mut ledger)?,
        download_helpers(params, cw, pos[1], NodeRef::Replacement(pos[1]), &mut ledger)?,
        download_helpers(params, cw, pos[2], NodeRef::Replacement(pos[2]), &mut ledger)?,
    ];
    let out = three_erasure_core(params, cw, &helpers)?;

    // Each replacement receives, from each of the other two, the helping
    // trace it is missing; the sender reconstructs it as a B-combination of
    // its own extracted traces.
    for f in 0..3 {
        for g in 0..3 {
            if g == f {
                continue;
            }
            let sender = &out.families[g];
            let receiver_point = out.families[f].point;
            let mult = tower.inv(tower.sub(sender.point, receiver_point))?;
            let coeffs = linalg::express_in_span(tower, mult, &sender.gens)
                .ok_or(Error::Internal("exchange multiplier escaped the sender's span"))?;
            let mut value = Fel::ZERO;
            for (cf, tau) in coeffs.iter().zip(&sender.traces) {
                value = tower.add(value, tower.mul(*cf, *tau));
            }
            ledger.push(
                NodeRef::Replacement(sender.pos),
                NodeRef::Replacement(out.families[f].pos),
                1,
                Some(value),
            );
        }
    }

    Ok(RepairResult {
        scheme: "dist3".to_string(),
        pattern: cw.pattern().clone(),
        recovered: out.recovered,
        ledger,
        transcript: out.transcript,
        three: Some(out.ctx),
        fallback: false,
    })
}

/// Fallback for non-correctable triples: repair the third symbol through a
/// weight-`(k+1)` check that avoids the other two erasures (`k*t`
/// sub-symbols), then run the centralized two-erasure scheme. The ledger
/// reports the true, larger total.
pub fn repair_three_fallback(params: &CodeParams, cw: &PartialCodeword) -> Result<RepairResult> {
    three_erasure_guard(params, cw)?;
    let tower = params.tower();
    let pos: Vec<usize> = cw.pattern().positions().to_vec();
    let (p0, p1, p2) = (pos[0], pos[1], pos[2]);

    // Weight-(k+1) dual codeword through alpha-prime avoiding the pair.
    let mut support = vec![p2];
    support.extend((0..params.n()).filter(|j| !pos.contains(j)).take(params.k()));
    let support_points: Vec<Fel> = support.iter().map(|&j| params.point(j)).collect();
    let coeffs = crate::code::dual_coefficients_on_support(tower, &support_points);

    let mut ledger = BandwidthLedger::default();
    let mut acc = Fel::ZERO;
    for (idx, &j) in support.iter().enumerate().skip(1) {
        let symbol = cw.symbol(j).ok_or(Error::Internal("support point erased"))?;
        acc = tower.add(acc, tower.mul(coeffs[idx], symbol));
        ledger.push(NodeRef::Node(j), NodeRef::Center, tower.t(), Some(symbol));
    }
    let third = tower.mul(tower.neg(tower.inv(coeffs[0])?), acc);

    // Two-erasure centralized repair with the third symbol restored.
    let mut symbols: Vec<Option<Fel>> = (0..params.n()).map(|j| cw.symbol(j)).collect();
    symbols[p2] = Some(third);
    let pair = ErasurePattern::new(&[p0, p1])?;
    let full = crate::code::Codeword {
        symbols: symbols.iter().map(|s| s.unwrap_or(Fel::ZERO)).collect(),
        message: None,
    };
    let partial_pair = full.with_erasures(&pair);
    let mut inner = repair_two_centralized(params, &partial_pair)?;

    // Transfers sourced at the restored position come from its replacement.
    for t in inner.ledger.transfers() {
        let from = match t.from {
            NodeRef::Node(j) if j == p2 => NodeRef::Replacement(p2),
            other => other,
        };
        ledger.push(from, t.to, t.subsymbols, t.value);
    }

    let mut recovered = inner.recovered.clone();
    recovered.push((p2, third));
    let mut transcript = Vec::new();
    transcript.append(&mut inner.transcript);

    Ok(RepairResult {
        scheme: "central3-fallback".to_string(),
        pattern: cw.pattern().clone(),
        recovered,
        ledger,
        transcript,
        three: None,
        fallback: true,
    })
}
