pub mod condiv;
pub mod error;
pub mod kneser;
pub mod measure;
pub mod oracle;
pub mod pipeline;
pub mod sets;
pub mod zptucker;
