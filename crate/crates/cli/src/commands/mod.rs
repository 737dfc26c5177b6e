pub mod convert;
pub mod report;
pub mod scan;
pub mod simulate;
pub mod verify;
