"""normlab: normal and Liouville-normal sequences along Folner sequences.

Builds binary sequences that are normal along Folner sequences of the
additive and multiplicative naturals, counts block occurrences exactly,
estimates densities, and searches generated sets for combinatorial
configurations.
"""

from .folner import (
    ADDITIVE,
    MULTIPLICATIVE,
    STAIRCASE,
    TOEPLITZ,
    AnchoredBox,
    DirectionSchedule,
    FiniteSet,
    FolnerSpec,
    density,
    divisors,
    equivalence_defect,
    expvec_to_nat,
    folner_set,
    invariance_defect,
    k_core,
    nat_to_expvec,
)
from .seq import (
    BitSeq,
    Block,
    PrefixError,
    all_blocks,
    block_freqs,
    count_N,
    count_N_tilde,
    ke_normal,
    ke_normal_defect,
    normality_defect,
    shift_mult,
)
from .champernowne import (
    ChainBlock,
    DoublingScheme,
    PackageLayout,
    brick,
    bricks,
    chain,
    chain_limit_defect,
    chain_limit_freqs,
    classical_champernowne,
    figure1_blocks,
    figure1_diff,
    mult_champernowne,
    net_normal,
    net_normal_order_counts,
    package,
    z_impl_contains,
)
from .liouville import (
    AdditiveConstruction,
    BalancedSpec,
    CoverageReport,
    MultConstruction,
    RefinedFolner,
    RepetitiveSpec,
    Witness,
    ZoneDensityRow,
    ZoneSchedule,
    additive_liouville_normal,
    build_repetitive,
    interval_folner_refine,
    kkk_min_coverage,
    liouville_witness,
    m_k_eps,
    mult_liouville_normal,
    zone_density_report,
)
from .sampler import (
    DEFAULT_SEED,
    adversarial_doubling,
    bernoulli_seq,
    doubling_rank,
    empirical_genericity,
    guaranteed_zero_fraction,
    summability_check,
)
from .structure import (
    CoverDensityReport,
    Ex9Result,
    Ex9Stage,
    GeoArith,
    IndependenceProfile,
    Linear,
    NatSet,
    OrtoResult,
    PolyGeo,
    Power,
    SearchBounds,
    SumProd,
    ThickResult,
    config_search,
    cover_density,
    ex9_set,
    ex9_stage_fraction,
    independence_profile,
    intersection_density,
    orto_set,
    set_transform,
    thick_counterexample,
)

__version__ = "0.1.0"
