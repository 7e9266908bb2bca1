"""Softmax policy-gradient dynamics on Gaussian bandits: discrete and diffusion engines,
proof-level diagnostics and closed-form bounds."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BanditInstance,
    InvalidArgument,
    PolicyState,
    instant_regret,
    policy_gradient,
    softmax,
    value,
)
