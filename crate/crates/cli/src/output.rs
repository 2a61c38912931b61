use clap::ValueEnum;

use symbasis::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Md,
}

/// A rectangular table of strings rendered as aligned text, CSV or markdown.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(mut self, rows: impl IntoIterator<Item = Vec<String>>) -> Self {
        for r in rows {
            self.push(r);
        }
        self
    }

    pub fn render(&self, format: Format) -> Result<String, Error> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Internal(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
            }
            Format::Md => {
                let line = |cells: &[String]| format!("| {} |\n", cells.iter().map(|c| c.replace('|', "\\|")).collect::<Vec<_>>().join(" | "));
                let mut s = line(&self.header);
                s += &format!("|{}\n", "---|".repeat(self.header.len()));
                for r in &self.rows {
                    s += &line(r);
                }
                Ok(s)
            }
            Format::Text | Format::Json => {
                let width = |c: &String| c.chars().filter(|ch| !('\u{300}'..='\u{36f}').contains(ch)).count();
                let mut widths: Vec<usize> = self.header.iter().map(width).collect();
                for r in &self.rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(width(c));
                    }
                }
                let line = |cells: &[String]| {
                    let padded: Vec<String> =
                        cells.iter().zip(&widths).map(|(c, &w)| format!("{c}{}", " ".repeat(w - width(c)))).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                let mut s = line(&self.header);
                for r in &self.rows {
                    s += &line(r);
                }
                Ok(s)
            }
        }
    }
}
