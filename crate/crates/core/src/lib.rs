pub mod classifier;
pub mod enumcount;
pub mod formula;
pub mod minilang;
pub mod oracle;
pub mod rangesearch;
pub mod report;
pub mod summarizer;
