//! Scraping wrappers driven by an XML configuration dialect.
//!
//! A configuration is a list of `var-def`s, each holding a pipeline of
//! nested processors (`http`, `html-to-xml`, `xpath`, `var`, `text`). The
//! innermost processor runs first and feeds its enclosing one:
//!
//! ```xml
//! <config charset="UTF-8">
//!   <var-def name="searchQuery" overwrite="false"/>
//!   <var-def name="content">
//!     <html-to-xml><http url="http://example.org/?q=${searchQuery}"/></html-to-xml>
//!   </var-def>
//!   <var-def name="titles">
//!     <xpath expression="//a[@class='title']"><var name="content"/></xpath>
//!   </var-def>
//! </config>
//! ```
//!
//! Pages come through a [`Fetcher`], so runs are hermetic under test.

mod adapter;
mod config;
mod dom;
mod engine;
mod fetch;
mod html;
mod xpath;

use thiserror::Error;

use crate::error::ErrorCode;

pub use adapter::{
    row_to_record, split_authors, ExtractedRow, FieldSource, RecordField, ResultMapping, WrapperSource,
    DEFAULT_QUERY_VAR,
};
pub use config::{parse_config, Processor, VarDef, WrapperConfig};
pub use dom::{NodeData, NodeId, NodeRef, XmlDocument, XmlNodes};
pub use engine::{execute, substitute, ExecutionContext, Value};
pub use fetch::{fixture_key, FetchError, Fetcher, FixtureFetcher, MapFetcher};
pub use html::html_to_xml;
pub use xpath::{xpath_eval, XPath, XPathError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WrapperError {
    #[error("unknown processor `{0}`")]
    UnknownProcessor(String),
    #[error("malformed wrapper config: {0}")]
    MalformedConfig(String),
    #[error("variable `{0}` is defined twice")]
    DuplicateVarDef(String),
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("fetching {url} failed: {reason}")]
    FetchFailed { url: String, reason: String },
    #[error(transparent)]
    XPath(#[from] XPathError),
    #[error("`{processor}` expects {expected} input, got {found}")]
    TypeMismatch {
        processor: &'static str,
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid result mapping: {0}")]
    InvalidMapping(String),
}

impl ErrorCode for WrapperError {
    fn code(&self) -> &'static str {
        match self {
            WrapperError::UnknownProcessor(_) => "UnknownProcessor",
            WrapperError::MalformedConfig(_) => "MalformedConfig",
            WrapperError::DuplicateVarDef(_) => "DuplicateVarDef",
            WrapperError::UnboundVariable(_) => "UnboundVariable",
            WrapperError::FetchFailed { .. } => "FetchFailed",
            WrapperError::XPath(_) => "XPathError",
            WrapperError::TypeMismatch { .. } => "TypeMismatch",
            WrapperError::InvalidMapping(_) => "InvalidMapping",
        }
    }
}
