"""Numerical verification toolkit for the complex hyperbolic mass.

The package implements, on the ball model of complex hyperbolic space:

* closed-form model geometry and finite-difference tensor calculus
  (:mod:`chmass.geometry`);
* the flat identification of the bundle Lambda^2_J + T* + R with J-invariant
  ambient 2-forms, and the isometry-group action (:mod:`chmass.ambient`);
* the hyperbolic connection family, parallel transport, holonomy and the
  third-order scalar equation (:mod:`chmass.connections`);
* Clifford algebra, the explicit Killing spinor families and the Q map
  (:mod:`chmass.spinors`);
* momentum-profile Kahler metrics and the bump-modified example
  (:mod:`chmass.profiles`);
* the mass functional by sphere quadrature and extrapolation
  (:mod:`chmass.mass`);
* the batch runner (:mod:`chmass.cli`, console script ``chmass``).
"""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    BallPoint,
    CHModelField,
    EuclideanField,
    MetricValue,
    RHModelField,
    RadialCoords,
    christoffel,
    coord_maps,
    geodesic,
    holomorphic_sectional,
    metric_ch,
    riemann,
    scal,
    sectional_curvature,
)
from .ambient import (  # noqa: F401
    AmbientForm,
    ads_lift,
    ambient_basis,
    ambient_kahler_form,
    beta_breve,
    beta_plain,
    distinguished_orbit_elements,
    primitive_basis,
    pu_action,
    theta_z,
    theta_z_inv,
    u_field_of_beta,
)
from .connections import (  # noqa: F401
    C_COMPLEX_HYPERBOLIC,
    C_PROJECTIVE,
    CHConnection,
    RHConnection,
    SectionE,
    c_operator,
    curvature_e,
    nabla_ch,
    nabla_rh,
    parallel_space_dim,
    third_order_residual,
    transport_e,
)
from .spinors import (  # noqa: F401
    KillingFamilyLabel,
    Spinor,
    all_family_labels,
    clifford,
    killing_family,
    killing_residual,
    lemma_checks,
    omega_action,
    projector_k,
    q_map,
    tilde,
)
from .profiles import (  # noqa: F401
    BumpSpec,
    MomentumProfile,
    ProfileMetricField,
    alpha_of_x,
    make_slow_decay_profile,
    scal_profile,
    theta_custom,
    theta_model,
)
from .mass import (  # noqa: F401
    MassReport,
    MassRow,
    PullbackField,
    SphereQuadrature,
    div_trace_oneform,
    mass_functional,
    mass_integrand,
    mass_of_beta,
    rh_mass,
    sphere_quadrature,
)
from .config import ExperimentConfig  # noqa: F401
