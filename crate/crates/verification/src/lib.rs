//! Holds the `acceptance` test target (`cargo test -p capsicaps-verification
//! --test acceptance`). The library itself is empty.
