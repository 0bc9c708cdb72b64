//! Full-length Reed-Solomon encoding over `A = F`, the trace-check
//! construction `p_{u,alpha}`, and the naive whole-symbol repair baseline.

use crate::error::{Error, Result};
use crate::field::{Fel, FieldTower};
use crate::repair::{BandwidthLedger, ErasurePattern, NodeRef, RepairResult};

/// Code parameters: evaluation points are the whole field in canonical
/// enumeration order, so `n = |F|`. The default dimension `k = n(1 - 1/|B|)`
/// makes `n - k = |B|^(t-1)`, exactly the degree bound of the trace checks.
pub struct CodeParams {
    tower: FieldTower,
    n: usize,
    k: usize,
    points: Vec<Fel>,
}

impl CodeParams {
    /// Code with the default dimension `k = n(1 - 1/|B|)`.
    pub fn new(tower: FieldTower) -> CodeParams {
        let n = tower.order() as usize;
        let k = n - n / tower.subfield_order() as usize;
        Self::with_dimension(tower, k).expect("default dimension is valid")
    }

    pub fn with_dimension(tower: FieldTower, k: usize) -> Result<CodeParams> {
        let n = tower.order() as usize;
        if k == 0 || k >= n {
            return Err(Error::DegenerateInput("dimension must satisfy 1 <= k < n"));
        }
        let points = tower.elements().collect();
        Ok(CodeParams { tower, n, k, points })
    }

    pub fn tower(&self) -> &FieldTower {
        &self.tower
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Evaluation point at position `j`.
    pub fn point(&self, j: usize) -> Fel {
        self.points[j]
    }

    pub fn points(&self) -> &[Fel] {
        &self.points
    }

    /// True when the trace checks `p_{u,alpha}` fit inside the dual code,
    /// i.e. `n - k >= |B|^(t-1)`.
    pub fn trace_checks_fit(&self) -> bool {
        let bound = self.tower.subfield_order().pow(self.tower.t() - 1);
        (self.n - self.k) as u64 >= bound
    }
}

/// One codeword: the evaluations of a polynomial of degree below `k` at all
/// `n` points, with the message kept when produced by the encoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub symbols: Vec<Fel>,
    pub message: Option<Vec<Fel>>,
}

impl Codeword {
    /// Erases the pattern's positions, producing the view a repair scheme is
    /// allowed to read.
    pub fn with_erasures(&self, pattern: &ErasurePattern) -> PartialCodeword {
        let mut symbols: Vec<Option<Fel>> = self.symbols.iter().copied().map(Some).collect();
        for &pos in pattern.positions() {
            symbols[pos] = None;
        }
        PartialCodeword { symbols, pattern: pattern.clone() }
    }
}

/// A codeword with its erased positions blanked out. Repair engines receive
/// only this view, so erased content is unreachable by construction.
#[derive(Debug, Clone)]
pub struct PartialCodeword {
    symbols: Vec<Option<Fel>>,
    pattern: ErasurePattern,
}

impl PartialCodeword {
    pub fn pattern(&self) -> &ErasurePattern {
        &self.pattern
    }

    pub fn symbol(&self, j: usize) -> Option<Fel> {
        self.symbols[j]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Surviving positions with their symbols, in position order.
    pub fn survivors(&self) -> Vec<(usize, Fel)> {
        self.symbols
            .iter()
            .enumerate()
            .filter_map(|(j, s)| s.map(|v| (j, v)))
            .collect()
    }
}

/// Evaluations of the check polynomial `p_{u,alpha}(x) = Tr(u(x-alpha))/(x-alpha)`
/// at every evaluation point: a dual codeword with exactly `k + 1` nonzero
/// entries when `k = n(1 - 1/|B|)`. The value at `alpha` itself is `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckVector {
    pub u: Fel,
    pub center: Fel,
    pub values: Vec<Fel>,
}

impl CheckVector {
    pub fn weight(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }
}

/// Evaluates the message polynomial at every point of `A`.
pub fn encode(params: &CodeParams, message: &[Fel]) -> Result<Codeword> {
    if message.len() > params.k() {
        return Err(Error::DegreeError);
    }
    let f = params.tower();
    let symbols = params
        .points()
        .iter()
        .map(|&alpha| {
            // Horner evaluation.
            let mut acc = Fel::ZERO;
            for &c in message.iter().rev() {
                acc = f.add(f.mul(acc, alpha), c);
            }
            acc
        })
        .collect();
    Ok(Codeword { symbols, message: Some(message.to_vec()) })
}

/// Builds the dual check `p_{u,alpha}`: value `u` at `alpha` and
/// `Tr(u(beta-alpha)) / (beta-alpha)` elsewhere.
pub fn check_vector(params: &CodeParams, u: Fel, alpha: Fel) -> Result<CheckVector> {
    if u.is_zero() {
        return Err(Error::DegenerateInput("check multiplier u must be nonzero"));
    }
    if !params.trace_checks_fit() {
        return Err(Error::DegreeError);
    }
    let f = params.tower();
    let values = params
        .points()
        .iter()
        .map(|&beta| {
            if beta == alpha {
                u
            } else {
                let delta = f.sub(beta, alpha);
                f.mul(f.trace(f.mul(u, delta)), f.inv(delta).expect("delta is nonzero"))
            }
        })
        .collect();
    Ok(CheckVector { u, center: alpha, values })
}

/// True when the check annihilates the codeword: `sum_j chk_j * c_j = 0`.
pub fn verify_dual(params: &CodeParams, chk: &CheckVector, cw: &Codeword) -> Result<bool> {
    if chk.values.len() != cw.symbols.len() || cw.symbols.len() != params.n() {
        return Err(Error::ShapeError("check and codeword lengths must equal n"));
    }
    let f = params.tower();
    let mut acc = Fel::ZERO;
    for (&p, &c) in chk.values.iter().zip(&cw.symbols) {
        acc = f.add(acc, f.mul(p, c));
    }
    Ok(acc.is_zero())
}

/// Dual-codeword coefficients supported exactly on `support` (classical MDS
/// product formula): `c_j = prod_{l != j} (alpha_j - alpha_l)^(-1)`.
pub(crate) fn dual_coefficients_on_support(
    tower: &FieldTower,
    support_points: &[Fel],
) -> Vec<Fel> {
    support_points
        .iter()
        .map(|&aj| {
            let mut prod = Fel::ONE;
            for &al in support_points {
                if al != aj {
                    prod = tower.mul(prod, tower.inv(tower.sub(aj, al)).expect("distinct"));
                }
            }
            prod
        })
        .collect()
}

/// Naive repair of a single erasure: downloads `k` whole symbols along a
/// weight-`(k+1)` dual codeword through the erased point, costing `k*t`
/// sub-symbols.
pub fn naive_repair(params: &CodeParams, cw: &PartialCodeword) -> Result<RepairResult> {
    let pattern = cw.pattern();
    if pattern.positions().len() != 1 {
        return Err(Error::PatternError("naive repair handles exactly one erasure"));
    }
    let erased = pattern.positions()[0];
    let f = params.tower();

    // Support: the erased point plus the first k surviving points in
    // canonical order.
    let mut support = vec![erased];
    support.extend(
        (0..params.n())
            .filter(|&j| j != erased)
            .take(params.k()),
    );
    let support_points: Vec<Fel> = support.iter().map(|&j| params.point(j)).collect();
    let coeffs = dual_coefficients_on_support(f, &support_points);

    let mut ledger = BandwidthLedger::default();
    let mut acc = Fel::ZERO;
    for (idx, &j) in support.iter().enumerate().skip(1) {
        let symbol = cw.symbol(j).ok_or(Error::Internal("support point erased"))?;
        acc = f.add(acc, f.mul(coeffs[idx], symbol));
        ledger.push(
            NodeRef::Node(j),
            NodeRef::Replacement(erased),
            f.t(),
            Some(symbol),
        );
    }
    let recovered = f.mul(f.neg(f.inv(coeffs[0])?), acc);

    Ok(RepairResult {
        scheme: "naive".to_string(),
        pattern: pattern.clone(),
        recovered: vec![(erased, recovered)],
        ledger,
        transcript: Vec::new(),
        three: None,
        fallback: false,
    })
}

/// Serializes a codeword as one element per line, `position element`.
pub fn codeword_to_text(tower: &FieldTower, cw: &Codeword) -> String {
    let mut out = String::new();
    for (j, &s) in cw.symbols.iter().enumerate() {
        out.push_str(&format!("{} {}\n", j, tower.format(s)));
    }
    out
}

/// Parses the line format produced by [`codeword_to_text`].
pub fn codeword_from_text(tower: &FieldTower, text: &str) -> Result<Codeword> {
    let mut symbols = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, ' ');
        let idx: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or(Error::ShapeError("codeword line must start with an index"))?;
        if idx != symbols.len() {
            return Err(Error::ShapeError("codeword positions must be consecutive"));
        }
        let elem = parts
            .next()
            .ok_or(Error::ShapeError("codeword line is missing the element"))?;
        symbols.push(tower.parse(elem)?);
    }
    Ok(Codeword { symbols, message: None })
}
