//! Holds the `acceptance` test target; see `tests/acceptance.rs`.
//! Run it alone with `cargo test -p telu-lab-verify --test acceptance`.
