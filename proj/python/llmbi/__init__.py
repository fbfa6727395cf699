"""Bayesian inference for models specified by an LLM, backed by the llmbi C++ core."""

from ._llmbi import (
    Dataset,
    Error,
    differentiate,
    elicit_model,
    elicit_prior,
    evaluate,
    fit,
    format_formula,
    free_variables,
    load_csv,
    normalize_model,
    normalize_prior,
    parse_csv,
    prompt_hash,
    render_model_prompt,
    render_prior_prompt,
    sanitize,
    simulate,
)

__all__ = [
    "Dataset",
    "Error",
    "differentiate",
    "elicit_model",
    "elicit_prior",
    "evaluate",
    "fit",
    "format_formula",
    "free_variables",
    "load_csv",
    "normalize_model",
    "normalize_prior",
    "parse_csv",
    "prompt_hash",
    "render_model_prompt",
    "render_prior_prompt",
    "sanitize",
    "simulate",
]
