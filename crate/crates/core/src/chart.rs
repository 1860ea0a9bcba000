//! Fundamental-domain charts {0 <= u < g(h), 0 <= h <= M} with node
//! bookkeeping: hat nodes near the two ridge ends, parked nodes with their
//! straight-down cuts, slides, tangle endpoint configurations, and the
//! wedge-subtraction length oracle.
//!
//! Node placement fixes a convention: hat nodes sit at height M - eps/2,
//! offset from the ridge-end positions u = 0 and u = w in steps of eps/2
//! (left end) and eps/3 (right end) so cuts never collide; parked nodes sit
//! on the reference segment at u = 0, tie groups staggered by eps/5. No
//! verdict downstream depends on the exact offsets, only on counts, heights
//! and cut directions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{CanonicalError, CanonicalType, CanonicalTypeFile, EndType, HatClass};
use crate::exact::{ExactError, LatticeVector, QuadraticNumber};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChartError {
    #[error("invalid canonical data: {0}")]
    InvalidType(CanonicalError),
    #[error("two cuts would coincide or cross at u = {0}")]
    CutCrossing(QuadraticNumber),
    #[error("node {0} does not exist")]
    NoSuchNode(usize),
    #[error("node {0} is not a parked node")]
    NotParked(usize),
    #[error("the ridge-end tangle needs positive width")]
    ZeroWidth,
    #[error("height lies in the hat neighbourhood, above the certified range")]
    AboveNodes,
    #[error("height out of range: {0}")]
    OutOfRange(&'static str),
    #[error("exact arithmetic: {0}")]
    Exact(#[from] ExactError),
}

impl From<CanonicalError> for ChartError {
    fn from(e: CanonicalError) -> Self {
        ChartError::InvalidType(e)
    }
}

/// What a node is: part of the hat at one of the two ridge ends, or a
/// parked node indexed into the canonical height list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeTag {
    Hat { end: usize },
    Parked { index: usize },
}

/// A node of the chart: position in (u, h) coordinates, primitive eigen
/// direction, and its role. Its branch cut is the vertical segment from
/// the node straight down to h = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub u: QuadraticNumber,
    pub h: QuadraticNumber,
    pub eigen: LatticeVector,
    pub tag: NodeTag,
}

/// A fundamental-domain chart of a canonical type.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalChart {
    ctype: CanonicalType,
    nodes: Vec<Node>,
}

#[derive(Serialize, Deserialize)]
struct NodeDto {
    u: QuadraticNumber,
    h: QuadraticNumber,
    eigen: [i64; 2],
    tag: String,
}

/// Chart serialization: the canonical-type block plus the node list, with
/// stable field order for golden-file comparisons.
#[derive(Serialize, Deserialize)]
pub struct ChartFile {
    #[serde(flatten)]
    pub ctype: CanonicalTypeFile,
    nodes: Vec<NodeDto>,
}

impl NodalChart {
    /// The natural chart of a canonical type: domain width g(h) at height
    /// h, hat nodes near the ridge ends, parked nodes on the reference
    /// segment.
    pub fn natural(ctype: &CanonicalType) -> Result<Self, ChartError> {
        let eps = ctype.eps().clone();
        let m = ctype.max_height().clone();
        let node_h = &m - &eps.div_int(2);
        let g_at_nodes = ctype.level_length(&node_h)?;
        let mut nodes = Vec::new();
        let (e0, e1) = ctype.end_types();
        let end_positions = [QuadraticNumber::zero(), ctype.width().clone()];
        for (end, (end_type, step)) in [(e0, eps.div_int(2)), (e1, eps.div_int(3))]
            .into_iter()
            .enumerate()
        {
            let count = end_type.node_count();
            let left = count.div_ceil(2);
            for j in 0..count {
                // alternate left of the end, then right, in growing steps
                let offset = if j < left {
                    -step.mul_int(j as i64 + 1)
                } else {
                    step.mul_int((j - left) as i64 + 1)
                };
                let u = (&end_positions[end] + &offset).rem_euclid(&g_at_nodes)?;
                nodes.push(Node {
                    u,
                    h: node_h.clone(),
                    eigen: LatticeVector::new(0, 1),
                    tag: NodeTag::Hat { end },
                });
            }
        }
        let mut prev: Option<&QuadraticNumber> = None;
        let mut tie = 0i64;
        let alphas = ctype.parked_heights().to_vec();
        for (i, alpha) in alphas.iter().enumerate() {
            tie = if prev == Some(alpha) { tie + 1 } else { 0 };
            let u = eps
                .div_int(5)
                .mul_int(tie)
                .rem_euclid(&ctype.level_length(alpha)?)?;
            nodes.push(Node {
                u,
                h: alpha.clone(),
                eigen: LatticeVector::new(0, 1),
                tag: NodeTag::Parked { index: i },
            });
            prev = Some(alpha);
        }
        let chart = NodalChart {
            ctype: ctype.clone(),
            nodes,
        };
        chart.check_cuts()?;
        Ok(chart)
    }

    pub fn ctype(&self) -> &CanonicalType {
        &self.ctype
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Domain width at height h, i.e. the level length g(h).
    pub fn width_at(&self, h: &QuadraticNumber) -> Result<QuadraticNumber, ChartError> {
        Ok(self.ctype.level_length(h)?)
    }

    /// Cuts run straight down, so two cuts are disjoint unless they share
    /// the u coordinate. A shared column is allowed only for parked nodes
    /// stacked at distinct heights on one cut line.
    fn check_cuts(&self) -> Result<(), ChartError> {
        for i in 0..self.nodes.len() {
            for j in (i + 1)..self.nodes.len() {
                let (a, b) = (&self.nodes[i], &self.nodes[j]);
                if a.u != b.u {
                    continue;
                }
                let both_parked = matches!(a.tag, NodeTag::Parked { .. })
                    && matches!(b.tag, NodeTag::Parked { .. });
                if !both_parked || a.h == b.h {
                    return Err(ChartError::CutCrossing(a.u.clone()));
                }
            }
        }
        Ok(())
    }

    /// Slide the parked node with the given canonical index clockwise
    /// (left) by twice its distance to the ridge, wrapping modulo the level
    /// length at its height.
    pub fn slide_parked_left(&self, index: usize) -> Result<Self, ChartError> {
        let pos = self
            .nodes
            .iter()
            .position(|n| n.tag == NodeTag::Parked { index })
            .ok_or(ChartError::NoSuchNode(index))?;
        let node = &self.nodes[pos];
        let alpha = node.h.clone();
        let shift = (self.ctype.max_height() - &alpha).mul_int(2);
        let g = self.ctype.level_length(&alpha)?;
        let new_u = (&node.u - &shift).rem_euclid(&g)?;
        let mut out = self.clone();
        out.nodes[pos].u = new_u;
        out.check_cuts()?;
        Ok(out)
    }

    /// Geometric level length at height h, read off the chart instead of
    /// the closed formula: the hat baseline 2w + k(M - h) minus, for every
    /// parked node strictly above h, the width of the monodromy wedge its
    /// cut removes. The wedge below a node of eigen direction v widens by
    /// |det(v, horizontal)| per unit depth.
    pub fn wedge_level_length(&self, h: &QuadraticNumber) -> Result<QuadraticNumber, ChartError> {
        let m = self.ctype.max_height();
        if h.is_negative() || h >= m {
            return Err(ChartError::OutOfRange("height must lie in [0, M)"));
        }
        if m - h < *self.ctype.eps() {
            return Err(ChartError::AboveNodes);
        }
        let mut total = self.ctype.width().mul_int(2) + (m - h).mul_int(self.ctype.k());
        let horizontal = LatticeVector::new(1, 0);
        for node in &self.nodes {
            if matches!(node.tag, NodeTag::Hat { .. }) {
                continue;
            }
            let depth = &node.h - h;
            if depth.is_positive() {
                let unit = node.eigen.det(&horizontal).abs();
                total = &total - &depth.mul_int(unit);
            }
        }
        Ok(total)
    }

    pub fn to_file(&self) -> ChartFile {
        ChartFile {
            ctype: self.ctype.to_file(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDto {
                    u: n.u.clone(),
                    h: n.h.clone(),
                    eigen: [n.eigen.x, n.eigen.y],
                    tag: match n.tag {
                        NodeTag::Hat { end } => format!("hat:{end}"),
                        NodeTag::Parked { index } => format!("parked:{index}"),
                    },
                })
                .collect(),
        }
    }

    pub fn from_file(file: &ChartFile) -> Result<Self, ChartError> {
        let ctype = CanonicalType::from_file(&file.ctype)?;
        let nodes = file
            .nodes
            .iter()
            .map(|n| -> Result<Node, ChartError> {
                let tag = if let Some(rest) = n.tag.strip_prefix("hat:") {
                    NodeTag::Hat {
                        end: rest.parse().map_err(|_| {
                            ChartError::InvalidType(CanonicalError::InvalidType(format!(
                                "bad node tag {:?}",
                                n.tag
                            )))
                        })?,
                    }
                } else if let Some(rest) = n.tag.strip_prefix("parked:") {
                    NodeTag::Parked {
                        index: rest.parse().map_err(|_| {
                            ChartError::InvalidType(CanonicalError::InvalidType(format!(
                                "bad node tag {:?}",
                                n.tag
                            )))
                        })?,
                    }
                } else {
                    return Err(ChartError::InvalidType(CanonicalError::InvalidType(
                        format!("bad node tag {:?}", n.tag),
                    )));
                };
                Ok(Node {
                    u: n.u.clone(),
                    h: n.h.clone(),
                    eigen: LatticeVector::new(n.eigen[0], n.eigen[1]),
                    tag,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let chart = NodalChart {
            ctype,
            nodes,
        };
        chart.check_cuts()?;
        Ok(chart)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("chart serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ChartError> {
        let file: ChartFile = serde_json::from_str(s).map_err(|e| {
            ChartError::InvalidType(CanonicalError::InvalidType(e.to_string()))
        })?;
        Self::from_file(&file)
    }
}

/// The chart of the product-of-spheres instance with factor areas 2M + w
/// and 2M: no parked nodes, four hat nodes, two near each ridge end.
pub fn make_s2xs2(
    m: &QuadraticNumber,
    w: &QuadraticNumber,
    eps: &QuadraticNumber,
) -> Result<NodalChart, ChartError> {
    let d = m
        .radicand()
        .or(w.radicand())
        .or(eps.radicand())
        .unwrap_or(2);
    let ctype = CanonicalType::new(
        HatClass::B,
        (EndType::TwoNodes, EndType::TwoNodes),
        m.clone(),
        w.clone(),
        Vec::new(),
        d,
        eps.clone(),
    )?;
    NodalChart::natural(&ctype)
}

/// Start and end configurations of the connecting tangle: the natural
/// chart, and the chart with every ridge end transformed and every parked
/// node slid left by twice its distance to the ridge.
#[derive(Clone, Debug)]
pub struct TangleEndpoints {
    pub start: NodalChart,
    pub end: NodalChart,
}

pub fn tangle_endpoints(ctype: &CanonicalType) -> Result<TangleEndpoints, ChartError> {
    if !ctype.width().is_positive() {
        return Err(ChartError::ZeroWidth);
    }
    let start = NodalChart::natural(ctype)?;
    let mut end = start.clone();
    // ridge-end transformation: the tangle reflects each end's node pattern
    // across the end position
    let ends = [QuadraticNumber::zero(), ctype.width().clone()];
    let node_heights: Vec<QuadraticNumber> =
        end.nodes.iter().map(|n| n.h.clone()).collect();
    for (node, h) in end.nodes.iter_mut().zip(node_heights) {
        if let NodeTag::Hat { end: which } = node.tag {
            let g = ctype.level_length(&h)?;
            node.u = (&ends[which].mul_int(2) - &node.u).rem_euclid(&g)?;
        }
    }
    end.check_cuts()?;
    let parked: Vec<usize> = (0..ctype.parked_heights().len()).collect();
    for index in parked {
        end = end.slide_parked_left(index)?;
    }
    Ok(TangleEndpoints { start, end })
}

impl TangleEndpoints {
    /// Both charts must share the type, carry equally many nodes, and show
    /// each parked node displaced by exactly twice its ridge distance.
    pub fn validate(&self) -> Result<(), ChartError> {
        if self.start.ctype != self.end.ctype {
            return Err(ChartError::InvalidType(CanonicalError::InvalidType(
                "endpoint charts disagree on the canonical type".into(),
            )));
        }
        if self.start.nodes.len() != self.end.nodes.len() {
            return Err(ChartError::InvalidType(CanonicalError::InvalidType(
                "endpoint charts disagree on the node count".into(),
            )));
        }
        let ctype = self.start.ctype();
        for (i, alpha) in ctype.parked_heights().iter().enumerate() {
            let find = |chart: &NodalChart| {
                chart
                    .nodes
                    .iter()
                    .find(|n| n.tag == NodeTag::Parked { index: i })
                    .cloned()
                    .ok_or(ChartError::NoSuchNode(i))
            };
            let a = find(&self.start)?;
            let b = find(&self.end)?;
            let g = ctype.level_length(alpha)?;
            let shift = (ctype.max_height() - alpha).mul_int(2);
            let moved = (&a.u - &b.u).rem_euclid(&g)?;
            let expect = shift.rem_euclid(&g)?;
            if moved != expect {
                return Err(ChartError::InvalidType(CanonicalError::InvalidType(
                    format!("parked node {i} moved by {moved}, expected {expect}"),
                )));
            }
        }
        Ok(())
    }
}
