"""car-lab: a finite Fourier-mode laboratory for circle-action operator algebra.

Everything infinite-dimensional is replaced by its exact finite shadow on a
symmetric mode window: Toeplitz compressions carry charge indices equal to
winding numbers, the self-dual fermion quantization runs on an occupation
basis over the window with a Dirac-sea vacuum, Schwinger-term commutators
and Weyl central phases are measured rather than assumed, and the
commutant/center and crossed-product stabilizer identities are verified on
clock-and-shift models and symbolic graded elements.
"""

from .config import LabConfig, load_config
from .errors import (CarLabError, IndeterminateRankError, InsufficientWindowError,
                     InternalConsistencyError, MarginExhaustedError, NotStabilizedError)
from .fourier import FourierSeries
from .mode_space import (Conjugation1P, LoopFunction, ModeWindow, OneParticleOperator,
                         hs_offdiag_norms, multiplication_operator, pairing,
                         regular_rep, schwinger_form, winding_number)
from .fredholm_index import IndexReport, charge_index, index_winding_agreement, verify_additivity
from .selfdual_car import (BasisProjectionData, DoubledConjugation, DoubledVector,
                           antisym_double, bogoljubov_double, implementability_check)
from .fock_engine import (FockBasisState, FockOperator, FockSpace, car_field, dgamma,
                          fock_space, gauge_covariance, gauge_implementer,
                          schwinger_commutator, shift_implementer, spectrum_positivity,
                          weyl_exponential)
from .weyl_ccr import (GeneratorElement, WeylWord, generating_functional, reduce,
                       requirements_checklist)
from .commutant_lab import (ClockShiftModel, MatrixAlgebra, commutant, generated_algebra,
                            spectral_component, verify_center_identity)
from .crossed_product import (CircleFn, GradedElement, check_stabilizer_properties,
                              kappa, net_locality, stabilizer_action)

__version__ = "0.1.0"
