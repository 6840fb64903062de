//! Error type carrying the process exit code.

use qsv_core::strategy::StrategyError;

/// Exit codes: 2 invalid arguments/config, 3 strategy self-check failure,
/// 4 unwritable output path.
#[derive(Debug)]
pub struct AppError {
    pub message: String,
    pub code: i32,
}

impl AppError {
    pub fn invalid(message: impl Into<String>) -> AppError {
        AppError { message: message.into(), code: 2 }
    }

    pub fn io(message: impl Into<String>) -> AppError {
        AppError { message: message.into(), code: 4 }
    }
}

impl From<StrategyError> for AppError {
    fn from(e: StrategyError) -> Self {
        let code = match e {
            StrategyError::SelfCheckFailed(_) => 3,
            _ => 2,
        };
        AppError { message: e.to_string(), code }
    }
}
