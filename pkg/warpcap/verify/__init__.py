from .certificates import (
    Certificate,
    certificate,
    observed_orders,
    read_report,
    refinement_trace,
    write_report,
)
from .bounds import (
    boundary_gradient_certificate,
    check_height,
    interior_ball,
    interior_gradient_certificate,
)
from .residuals import contact_angle_residual, strong_form_residual
from .lemma import bump_field, lemma1i_check
from .mms import interpolate, max_error, mms_manufacture
from .oracle1d import DenseSolution, oracle_1d_solve
