//! Exit-code classification.

use std::fmt;

use ctxgeom::Error as CoreError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Io,
    Args,
    Numerical,
}

impl Kind {
    pub fn code(self) -> i32 {
        match self {
            Kind::Io => 2,
            Kind::Args => 3,
            Kind::Numerical => 4,
        }
    }
}

/// An error that already knows its exit code.
#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    source: anyhow::Error,
}

impl Failure {
    pub fn new(kind: Kind, source: anyhow::Error) -> Self {
        Self { kind, source }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl std::error::Error for Failure {}

/// Bad user input is an argument error; everything else the library reports
/// is a numerical failure.
pub fn classify_core(e: &CoreError) -> Kind {
    match e {
        CoreError::InvalidCycleLength(_)
        | CoreError::InvalidArgument(_)
        | CoreError::UnknownState { .. }
        | CoreError::UnsupportedCorrelator(_)
        | CoreError::NonFinite(_) => Kind::Args,
        _ => Kind::Numerical,
    }
}

/// Exit code for any error bubbling out of a command.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if let Some(f) = e.downcast_ref::<Failure>() {
        return f.kind.code();
    }
    if let Some(core) = e.downcast_ref::<CoreError>() {
        return classify_core(core).code();
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return Kind::Io.code();
    }
    Kind::Numerical.code()
}
