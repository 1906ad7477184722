"""Distance backends for soft metric spaces."""
from backends.analytic import AnalyticBackend, MetricDescriptor, MetricFamily, ParamKind, PointKind
from backends.base import DistanceBackend
from backends.tabulated import TabulatedBackend

__all__ = [
    'AnalyticBackend',
    'DistanceBackend',
    'MetricDescriptor',
    'MetricFamily',
    'ParamKind',
    'PointKind',
    'TabulatedBackend',
]
