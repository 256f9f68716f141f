"""Python bindings for the gswlab core library."""

from ._core import (  # noqa: F401
    ConfigError,
    DomainError,
    binomial_event_prob,
    c_pd,
    carlson_constant,
    constants_json,
    g_mu_zygmund,
    gamma_eps,
    gaussian_moment,
    i_abd,
    mz_constant,
    mz_rate_exponent,
    rate_csv,
    sharp_quantities,
    verify,
    wasserstein_1d,
    wasserstein_discrete,
)
