from .cohort import amplification_ratio, cohort_profiles, select_features, subsample_cohorts
from .density import single_site_rdm, two_site_rdm
from .entropy import mutual_information, sample_profile, von_neumann_entropy

__all__ = [
    "amplification_ratio",
    "cohort_profiles",
    "mutual_information",
    "sample_profile",
    "select_features",
    "single_site_rdm",
    "subsample_cohorts",
    "two_site_rdm",
    "von_neumann_entropy",
]
