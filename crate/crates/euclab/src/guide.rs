//! Guide chapters (placeholder).
