//! The `a:b:k` grid grammar.

use std::str::FromStr;

/// `k` points from `a` to `b`: geometric when `a > 0`, linear otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let k = self.count;
        if k == 1 {
            return vec![self.start];
        }
        let geometric = self.start > 0.0;
        let mut pts: Vec<f64> = (0..k)
            .map(|i| {
                let t = i as f64 / (k - 1) as f64;
                if geometric {
                    self.start * (self.end / self.start).powf(t)
                } else {
                    self.start + t * (self.end - self.start)
                }
            })
            .collect();
        pts[0] = self.start;
        pts[k - 1] = self.end;
        pts
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, k] = parts.as_slice() else {
            return Err(format!("grid '{s}' is not of the form a:b:k"));
        };
        let start: f64 = a.parse().map_err(|_| format!("bad grid start '{a}'"))?;
        let end: f64 = b.parse().map_err(|_| format!("bad grid end '{b}'"))?;
        let count: usize = k.parse().map_err(|_| format!("bad grid count '{k}'"))?;
        if !start.is_finite() || !end.is_finite() {
            return Err("grid ends must be finite".into());
        }
        if count == 0 {
            return Err("grid needs at least one point".into());
        }
        if count > 1 && end <= start {
            return Err(format!("grid end {end} must exceed start {start}"));
        }
        Ok(Grid { start, end, count })
    }
}
