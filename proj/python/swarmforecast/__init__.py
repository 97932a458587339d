"""Monthly load forecasting with BP, PSO-BP and MPSO-BP trainers."""

from ._swarmforecast import *  # noqa: F401,F403
