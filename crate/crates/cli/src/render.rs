//! Deterministic SVG rendering of nodal charts: the tent-shaped domain
//! outline, grey level sets, the ridge, node crosses and dashed cut rays.
//!
//! All layout arithmetic stays exact; decimals appear only in the final
//! coordinate strings, at a fixed 12 significant digits, so identical
//! input yields identical bytes.

use std::fmt::Write as _;

use num_bigint::BigInt;

use ridgeline::chart::{NodalChart, NodeTag};
use ridgeline::exact::QuadraticNumber;

/// Fixed 12-significant-digit decimal rendering of an exact value, computed
/// through integer arithmetic (no floating point).
pub fn decimal12(x: &QuadraticNumber) -> String {
    const WORK: u32 = 24;
    const SIG: usize = 12;
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let y = x.abs();
    let pow = BigInt::from(10u32).pow(WORK);
    let scaled = (y.mul_bigint(&pow)).floor_int();
    if scaled == BigInt::from(0) {
        return "0".to_string();
    }
    let digits = scaled.to_string();
    let len = digits.len() as i64;
    // value = digits * 10^(-WORK); decimal point sits len - WORK digits in
    let mut point = len - WORK as i64;
    let kept: String = digits.chars().take(SIG).collect();
    let mut kept_int: BigInt = kept.parse().expect("digit string");
    if digits.len() > SIG {
        let next = digits.as_bytes()[SIG] - b'0';
        if next >= 5 {
            kept_int += 1;
        }
    }
    let mut kept = kept_int.to_string();
    if kept.len() > SIG.min(digits.len()) {
        // carry overflowed into a new digit
        point += 1;
        kept.pop();
    }
    let body = if point >= kept.len() as i64 {
        let zeros = point as usize - kept.len();
        format!("{kept}{}", "0".repeat(zeros))
    } else if point > 0 {
        let (int_part, frac_part) = kept.split_at(point as usize);
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac}")
        }
    } else {
        let zeros = (-point) as usize;
        let frac = format!("{}{kept}", "0".repeat(zeros));
        let frac = frac.trim_end_matches('0');
        format!("0.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

struct Layout {
    scale: QuadraticNumber,
    margin: QuadraticNumber,
    max_height: QuadraticNumber,
}

impl Layout {
    fn sx(&self, u: &QuadraticNumber) -> QuadraticNumber {
        &self.margin + &(u * &self.scale)
    }

    fn sy(&self, h: &QuadraticNumber) -> QuadraticNumber {
        &self.margin + &(&(&self.max_height - h) * &self.scale)
    }
}

fn line(
    svg: &mut String,
    class: &str,
    x1: &QuadraticNumber,
    y1: &QuadraticNumber,
    x2: &QuadraticNumber,
    y2: &QuadraticNumber,
) {
    let _ = writeln!(
        svg,
        r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        decimal12(x1),
        decimal12(y1),
        decimal12(x2),
        decimal12(y2)
    );
}

/// Render the chart. `levels` grey level sets are drawn at evenly spaced
/// heights strictly between the boundary and the ridge.
pub fn chart_svg(chart: &NodalChart, levels: u64) -> Result<String, String> {
    let ctype = chart.ctype();
    let m = ctype.max_height().clone();
    let base_width = ctype
        .level_length(&QuadraticNumber::zero())
        .map_err(|e| e.to_string())?;
    let layout = Layout {
        scale: QuadraticNumber::from_int(640)
            .checked_div(&base_width)
            .map_err(|e| e.to_string())?,
        margin: QuadraticNumber::from_int(20),
        max_height: m.clone(),
    };
    let total_w = QuadraticNumber::from_int(680);
    let total_h = &layout.margin.mul_int(2) + &(&m * &layout.scale);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}" width="{}" height="{}">"#,
        decimal12(&total_w),
        decimal12(&total_h),
        decimal12(&total_w),
        decimal12(&total_h)
    );
    let _ = writeln!(
        svg,
        "<style>.domain{{fill:none;stroke:#000;stroke-width:1.5}}\
         .level{{stroke:#999;stroke-width:0.8}}\
         .ridge{{stroke:#c00;stroke-width:3}}\
         .cut{{stroke:#333;stroke-width:0.8;stroke-dasharray:4 3}}\
         .node-cross{{stroke:#000;stroke-width:1.6}}</style>"
    );

    // domain outline: bottom edge, right boundary through the breakpoints,
    // top edge at the ridge, left edge back down
    let mut right_heights: Vec<QuadraticNumber> = ctype.parked_heights().to_vec();
    right_heights.reverse();
    right_heights.dedup();
    right_heights.push(m.clone());
    let zero = QuadraticNumber::zero();
    let mut d = format!(
        "M {},{} L {},{}",
        decimal12(&layout.sx(&zero)),
        decimal12(&layout.sy(&zero)),
        decimal12(&layout.sx(&base_width)),
        decimal12(&layout.sy(&zero))
    );
    for h in &right_heights {
        let g = ctype.level_length(h).map_err(|e| e.to_string())?;
        let _ = write!(
            d,
            " L {},{}",
            decimal12(&layout.sx(&g)),
            decimal12(&layout.sy(h))
        );
    }
    let _ = write!(
        d,
        " L {},{} Z",
        decimal12(&layout.sx(&zero)),
        decimal12(&layout.sy(&m))
    );
    let _ = writeln!(svg, r#"<path class="domain" d="{d}"/>"#);

    // grey level sets
    for j in 1..=levels {
        let h = m
            .mul_bigint(&BigInt::from(j))
            .div_bigint(&BigInt::from(levels + 1));
        let g = ctype.level_length(&h).map_err(|e| e.to_string())?;
        line(
            &mut svg,
            "level",
            &layout.sx(&zero),
            &layout.sy(&h),
            &layout.sx(&g),
            &layout.sy(&h),
        );
    }

    // the ridge along the top
    if ctype.width().is_positive() {
        let two_w = ctype.width().mul_int(2);
        line(
            &mut svg,
            "ridge",
            &layout.sx(&zero),
            &layout.sy(&m),
            &layout.sx(&two_w),
            &layout.sy(&m),
        );
    }

    // cut rays first, then node crosses on top
    for node in chart.nodes() {
        let class = match node.tag {
            NodeTag::Hat { .. } => "cut hat",
            NodeTag::Parked { .. } => "cut parked",
        };
        line(
            &mut svg,
            class,
            &layout.sx(&node.u),
            &layout.sy(&node.h),
            &layout.sx(&node.u),
            &layout.sy(&zero),
        );
    }
    let arm = QuadraticNumber::from_int(4);
    for node in chart.nodes() {
        let class = match node.tag {
            NodeTag::Hat { .. } => "node-cross hat",
            NodeTag::Parked { .. } => "node-cross parked",
        };
        let cx = layout.sx(&node.u);
        let cy = layout.sy(&node.h);
        let _ = writeln!(
            svg,
            r#"<path class="{class}" d="M {},{} L {},{} M {},{} L {},{}"/>"#,
            decimal12(&(&cx - &arm)),
            decimal12(&(&cy - &arm)),
            decimal12(&(&cx + &arm)),
            decimal12(&(&cy + &arm)),
            decimal12(&(&cx - &arm)),
            decimal12(&(&cy + &arm)),
            decimal12(&(&cx + &arm)),
            decimal12(&(&cy - &arm))
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadraticNumber {
        s.parse().unwrap()
    }

    #[test]
    fn decimal_rendering_is_exact_per_digit() {
        assert_eq!(decimal12(&q("0")), "0");
        assert_eq!(decimal12(&q("3")), "3");
        assert_eq!(decimal12(&q("-3/2")), "-1.5");
        assert_eq!(decimal12(&q("1/3")), "0.333333333333");
        assert_eq!(decimal12(&q("2/3")), "0.666666666667");
        assert_eq!(decimal12(&q("1*sqrt(2)")), "1.41421356237");
        assert_eq!(decimal12(&q("100")), "100");
        assert_eq!(decimal12(&q("1/1000")), "0.001");
    }
}
