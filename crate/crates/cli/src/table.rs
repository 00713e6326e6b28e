//! CSV tables with a fixed number format.

/// `{:.15e}` for finite values, empty otherwise; rows that can hold an empty
/// number always carry a flag column saying why.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.15e}")
    } else {
        String::new()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_format_and_quoting() {
        assert_eq!(num(-0.5), "-5.000000000000000e-1");
        assert_eq!(num(f64::NAN), "");
        let mut t = Table::new(&["a", "note"]);
        t.push(vec![num(1.0), "x, y".into()]);
        assert_eq!(t.to_csv(), "a,note\n1.000000000000000e0,\"x, y\"\n");
    }
}
