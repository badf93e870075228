from .metric import (
    MetricField,
    arc_length_height,
    check_metric,
    custom_metric,
    euclidean_metric,
    product_metric,
    radial_warp_metric,
)
from .frame import GraphPointFrame, contact_angle, graph_normal, slope_factor
from .curvature import (
    mean_curvature_at_vertex,
    mean_curvature_field,
    mean_curvature_strong,
    recover_derivatives,
)
