//! placeholder for the book doc-test harness
