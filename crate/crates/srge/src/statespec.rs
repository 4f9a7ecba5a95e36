//! Textual state specifications.
//!
//! A [`BosonState`](crate::types::BosonState) is written as
//!
//! ```text
//! L=[1,1];R=[2];n=0;m=1
//! ```
//!
//! with the left and right mode lists in brackets (possibly empty) and the
//! primary integers `n` and `m` last. Whitespace is allowed around every
//! token. Parse errors report the byte position and the expected token.

use crate::error::{Error, Result};
use crate::types::{BosonState, ChiralModeList};

/// Parses a state specification such as `L=[1,1];R=[];n=0;m=0`.
pub fn parse_state(input: &str) -> Result<BosonState> {
    let mut p = Parser {
        input,
        bytes: input.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    p.expect_tag("L", "field tag 'L'")?;
    p.expect_char('=', "'=' after 'L'")?;
    let left = p.mode_list()?;
    p.expect_char(';', "';' after left mode list")?;
    p.expect_tag("R", "field tag 'R'")?;
    p.expect_char('=', "'=' after 'R'")?;
    let right = p.mode_list()?;
    p.expect_char(';', "';' after right mode list")?;
    p.expect_tag("n", "field tag 'n'")?;
    p.expect_char('=', "'=' after 'n'")?;
    let n = p.integer()?;
    p.expect_char(';', "';' after n value")?;
    p.expect_tag("m", "field tag 'm'")?;
    p.expect_char('=', "'=' after 'm'")?;
    let m = p.integer()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("end of input"));
    }
    Ok(BosonState {
        left: ChiralModeList::new(left)?,
        right: ChiralModeList::new(right)?,
        n,
        m,
    })
}

/// Renders a state in the canonical form accepted by [`parse_state`],
/// with modes sorted and no whitespace.
pub fn format_state(state: &BosonState) -> String {
    let join = |modes: &[u32]| {
        modes
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "L=[{}];R=[{}];n={};m={}",
        join(state.left.modes()),
        join(state.right.modes()),
        state.n,
        state.m
    )
}

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &'static str) -> Error {
        let found = self.input[self.pos.min(self.input.len())..]
            .chars()
            .next()
            .map(|c| c.to_string())
            .unwrap_or_else(|| "end of input".to_string());
        Error::StateSpec {
            position: self.pos,
            expected,
            found,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect_tag(&mut self, tag: &str, expected: &'static str) -> Result<()> {
        self.skip_ws();
        if self.input[self.pos..].starts_with(tag) {
            self.pos += tag.len();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_char(&mut self, c: char, expected: &'static str) -> Result<()> {
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos] == c as u8 {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn mode_list(&mut self) -> Result<Vec<u32>> {
        self.expect_char('[', "'['")?;
        let mut modes = Vec::new();
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b']' {
            self.pos += 1;
            return Ok(modes);
        }
        loop {
            modes.push(self.unsigned()?);
            self.skip_ws();
            if self.pos >= self.bytes.len() {
                return Err(self.error("',' or ']'"));
            }
            match self.bytes[self.pos] {
                b',' => self.pos += 1,
                b']' => {
                    self.pos += 1;
                    return Ok(modes);
                }
                _ => return Err(self.error("',' or ']'")),
            }
        }
    }

    fn unsigned(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("mode index (positive integer)"));
        }
        let value: u32 = self.input[start..self.pos].parse().map_err(|_| Error::StateSpec {
            position: start,
            expected: "mode index fitting in 32 bits",
            found: self.input[start..self.pos].to_string(),
        })?;
        if value == 0 {
            return Err(Error::StateSpec {
                position: start,
                expected: "positive mode index",
                found: "0".to_string(),
            });
        }
        Ok(value)
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.bytes.len() && (self.bytes[self.pos] == b'-' || self.bytes[self.pos] == b'+')
        {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            self.pos = start;
            return Err(self.error("integer"));
        }
        self.input[start..self.pos].parse().map_err(|_| Error::StateSpec {
            position: start,
            expected: "integer fitting in 64 bits",
            found: self.input[start..self.pos].to_string(),
        })
    }
}
