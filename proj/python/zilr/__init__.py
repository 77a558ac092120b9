"""Zero-inflated logistic regression: likelihood, fitting, sampling and diagnostics."""

from ._zilr import (
    __version__,
    canonicalize,
    detect_double_separation,
    estimate_margin,
    fit_logistic,
    fit_zilr,
    generate,
    grad_loglik,
    inv_logit,
    kmeans2,
    load_csv,
    loglik,
    pca2,
    pg_mean,
    relabel,
    run_sampler,
    run_signflip,
    sample_pg,
    screen_reasonable,
    structural_zero_fraction,
)

__all__ = [
    "canonicalize",
    "detect_double_separation",
    "estimate_margin",
    "fit_logistic",
    "fit_zilr",
    "generate",
    "grad_loglik",
    "inv_logit",
    "kmeans2",
    "load_csv",
    "loglik",
    "pca2",
    "pg_mean",
    "relabel",
    "run_sampler",
    "run_signflip",
    "sample_pg",
    "screen_reasonable",
    "structural_zero_fraction",
]
