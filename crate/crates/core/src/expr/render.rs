//! Fully parenthesized infix text format for expression trees.
//!
//! ```text
//! (c0[3.5] * x0)          binary operations: `(left op right)`
//! sqrt(pow3(x0))          unary operations: `name(child)`
//! c1                      constant without a value (parses as 1.0)
//! ```

use std::fmt::Write;

use super::{ExprNode, ExprTree};
use crate::error::ParseError;
use crate::units::OpKind;

/// Renders a tree with constants as `c{i}[value]`.
pub fn render(tree: &ExprTree) -> String {
    let mut out = String::new();
    write_node(&mut out, tree.root(), Some(tree.constants()));
    out
}

/// Renders a tree with constants as bare `c{i}`.
pub fn render_symbolic(tree: &ExprTree) -> String {
    let mut out = String::new();
    write_node(&mut out, tree.root(), None);
    out
}

/// Shortest text for `v` that parses back to the same `f64`.
pub fn format_value(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn write_node(out: &mut String, node: &ExprNode, constants: Option<&[f64]>) {
    match node {
        ExprNode::Constant(i) => {
            let _ = write!(out, "c{i}");
            if let Some(values) = constants {
                let _ = write!(out, "[{}]", format_value(values[*i]));
            }
        }
        ExprNode::Variable(i) => {
            let _ = write!(out, "x{i}");
        }
        ExprNode::Unary(op, child) => {
            out.push_str(&op.symbol());
            out.push('(');
            write_node(out, child, constants);
            out.push(')');
        }
        ExprNode::Binary(op, l, r) => {
            out.push('(');
            write_node(out, l, constants);
            let _ = write!(out, " {} ", op.symbol());
            write_node(out, r, constants);
            out.push(')');
        }
    }
}

/// Parses the format produced by [`render`] and [`render_symbolic`].
///
/// Constant slots are renumbered in pre-order; the index written after `c`
/// is informational only.
pub fn parse(text: &str) -> Result<ExprTree, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, values: Vec::new() };
    let root = p.node()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(ExprTree::from_parts(root, &p.values))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    values: Vec<f64>,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> ParseError {
        ParseError::new(format!("{what} at byte {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn node(&mut self) -> Result<ExprNode, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let left = self.node()?;
                self.skip_ws();
                let op = self
                    .src
                    .get(self.pos)
                    .and_then(|c| OpKind::from_symbol(std::str::from_utf8(&[*c]).ok()?))
                    .filter(|op| op.is_binary())
                    .ok_or_else(|| self.error("expected binary operator"))?;
                self.pos += 1;
                let right = self.node()?;
                self.expect(b')')?;
                Ok(ExprNode::binary(op, left, right))
            }
            Some(_) => {
                let word = self.word().to_string();
                if word.is_empty() {
                    return Err(self.error("unexpected character"));
                }
                if let Some(idx) = word.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    return Ok(ExprNode::Variable(idx));
                }
                if word.strip_prefix('c').is_some_and(|d| d.parse::<usize>().is_ok()) {
                    return self.constant();
                }
                let op = OpKind::from_symbol(&word)
                    .filter(|op| op.is_unary())
                    .ok_or_else(|| self.error(&format!("unknown token `{word}`")))?;
                self.expect(b'(')?;
                let child = self.node()?;
                self.expect(b')')?;
                Ok(ExprNode::unary(op, child))
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn constant(&mut self) -> Result<ExprNode, ParseError> {
        let value = if self.src.get(self.pos) == Some(&b'[') {
            let start = self.pos + 1;
            let end = self.src[start..]
                .iter()
                .position(|c| *c == b']')
                .map(|p| start + p)
                .ok_or_else(|| self.error("unterminated constant value"))?;
            let text = std::str::from_utf8(&self.src[start..end]).unwrap_or("");
            let v = text
                .trim()
                .parse::<f64>()
                .map_err(|_| self.error(&format!("bad constant value `{text}`")))?;
            self.pos = end + 1;
            v
        } else {
            1.0
        };
        self.values.push(value);
        Ok(ExprNode::Constant(self.values.len() - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_constant_values() {
        let t = ExprTree::from_parts(
            ExprNode::binary(OpKind::Mul, ExprNode::Constant(0), ExprNode::Variable(0)),
            &[3.5],
        );
        assert_eq!(render(&t), "(c0[3.5] * x0)");
        assert_eq!(render_symbolic(&t), "(c0 * x0)");
    }

    #[test]
    fn nested_round_trip() {
        let text = "((c0[2.268e-18] * sqrt(pow3(x0))) - (exp(x1) ^ log((x2 / c1[-0.5]))))";
        let t = parse(text).unwrap();
        assert_eq!(render(&t), text);
        assert_eq!(parse(&render(&t)).unwrap(), t);
    }

    #[test]
    fn construction_order_does_not_matter() {
        let a = ExprTree::from_parts(
            ExprNode::binary(OpKind::Add, ExprNode::Constant(1), ExprNode::Constant(0)),
            &[4.0, 2.0],
        );
        let b = parse("(c0[2] + c1[4])").unwrap();
        assert_eq!(render(&a), render(&b));
    }

    #[test]
    fn extreme_values_round_trip() {
        for v in [1e-300, 2.2e-18, 6.02214076e23, -1.5e300, 0.1 + 0.2, f64::MIN_POSITIVE] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("(x0 + )").is_err());
        assert!(parse("foo(x0)").is_err());
        assert!(parse("(x0 + x1) x2").is_err());
        assert!(parse("c0[abc]").is_err());
        assert!(parse("pow1(x0)").is_err());
    }
}
