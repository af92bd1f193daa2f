"""Near-field focusing simulation and analysis for circular arrays."""

__version__ = "0.1.0"

from .analysis import (
    ApertureSidelobeRecord,
    FarFieldPattern,
    GainScanRecord,
    NfFfRow,
    SidelobeRecord,
    WidthRecord,
    far_field_pattern,
    focal_width,
    nf_ff_comparison,
    peak_gain_scan,
    aperture_sidelobe_scan,
    sidelobe_scan,
    width_scan,
)
from .closedform import (
    HalfCircleLimits,
    amplitude_sum_at,
    arc_integral,
    bessel_field,
    center_edge_ratio,
    j0,
    taylor_field_sum,
)
from .field import (
    FieldMap,
    FieldSample,
    FocalSpec,
    field_at,
    field_line,
    field_map,
)
from .geometry import (
    ArrayConfig,
    ArrayKind,
    ElementSet,
    ValidityRegion,
    build_full_circle,
    build_half_circle,
    is_valid_point,
    reactive_margin_m,
)

__all__ = [
    "__version__",
    "ArrayConfig",
    "ArrayKind",
    "ElementSet",
    "ValidityRegion",
    "build_full_circle",
    "build_half_circle",
    "is_valid_point",
    "reactive_margin_m",
    "FocalSpec",
    "FieldSample",
    "FieldMap",
    "field_at",
    "field_line",
    "field_map",
    "ApertureSidelobeRecord",
    "GainScanRecord",
    "WidthRecord",
    "SidelobeRecord",
    "FarFieldPattern",
    "NfFfRow",
    "peak_gain_scan",
    "focal_width",
    "width_scan",
    "aperture_sidelobe_scan",
    "sidelobe_scan",
    "far_field_pattern",
    "nf_ff_comparison",
    "j0",
    "bessel_field",
    "taylor_field_sum",
    "amplitude_sum_at",
    "arc_integral",
    "center_edge_ratio",
    "HalfCircleLimits",
]
