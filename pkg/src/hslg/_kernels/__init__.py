"""Kernel backend selection: compiled core if built, pure Python otherwise."""

from . import fallback

try:
    from . import _core as core
except ImportError:  # pragma: no cover - build-dependent
    core = None

_impl = core if core is not None else fallback

scan_row = _impl.scan_row
heat_bath_sweep = _impl.heat_bath_sweep
site_quantile = _impl.site_quantile
gig_quantile = _impl.gig_quantile
pair_dp_collect = _impl.pair_dp_collect


def backend_name() -> str:
    return _impl.NAME


def have_core() -> bool:
    return core is not None
