/// Stable machine-readable error names.
///
/// Every module error enum implements this so the service layer can surface
/// failures with a code that does not depend on the display message.
pub trait ErrorCode {
    fn code(&self) -> &'static str;
}
