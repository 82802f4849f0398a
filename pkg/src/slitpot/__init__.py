"""slitpot: potential theory on plane domains slit along real intervals.

Library layers, bottom up: interval geometry (``intervals``), the
walk-on-spheres sampler (``wos``), harmonic-measure estimators
(``harmonic``), canonical products and fraction sums (``products``,
``krein``, ``cartwright``), weighted extremal polynomials (``weights``,
``extremal``, ``density``), and the scenario runner behind the ``slitpot``
command line (``scenarios``, ``cli``).
"""

from .intervals import (BenedicksSetSpec, IntervalSet, Location, MetricReport,
                        locate, make_benedicks_set, metric_tests)
from .wos import (HitSample, NonterminationError, RandomWalkConfig, WalkBatch,
                  sample_hit, walk_in_disk, walk_in_rectangle, walk_to_slits)
from .harmonic import (BetaSample, HarmonicMeasureEstimate, MartinEstimate,
                       beta_at, estimate_harmonic_measure, green_at,
                       harmonic_moment, lemma1_decay_check, martin_ratio,
                       single_slit_density, square_lemma_check)
from .products import (CanonicalProductSpec, ProductPoleError, ProductValue,
                       TailBoundError, derivative_at_zero,
                       eval_canonical_product, hardy_ratio,
                       log_derivative_at_zero)
from .krein import KreinFunction, SplitKrein, krein_sum, split_pm
from .cartwright import (CertificateReport, bounded_type_certificate,
                         cartwright_log_integral)
from .weights import Weight
from .extremal import (ExchangeFailure, ExtremalWitness, HallProfile,
                       build_constraint_grid, hall_majorant_n, hall_profile)
from .density import (DeBrangesSum, DensityDiagnostics, Verdict, debranges_sum,
                      density_verdict, eq19_ratio_check, mergelyan_integral_n)

__version__ = "0.1.0"
