"""Exact q-series, theta products, Appell-Lerch sums and a modular identity prover."""

from .series import QSeries
from .theta import ProductForm, expand, theta, eta

__all__ = ["QSeries", "ProductForm", "expand", "theta", "eta"]
__version__ = "0.1.0"
