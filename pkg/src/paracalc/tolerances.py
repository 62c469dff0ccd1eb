"""Default tolerances for every verification and experiment, in one place.

The test suite and the command-line harness both read from this table, so a
threshold is never duplicated.  "rel" thresholds compare residuals divided
by the scale of the quantity they check; slope tolerances bound the
distance between a fitted regression exponent and its target.  Per-seed
slope tolerances are looser than the aggregated ones: a single seed caries
sampling scatter that the mean curve averages away.
"""

TOLERANCES = {
    # exact symbolic identities (floats enter only through character values)
    "algebra_exact": 1e-10,
    # product split and other blockwise identities
    "bony_rel": 1e-10,
    "paraproduct_bilinearity": 1e-12,
    # blockwise recursion residuals, relative to input scale
    "lemma33_rel": 1e-9,
    "atomic_rel": 1e-8,
    "partition_formula_rel": 1e-8,
    # bracket calculus
    "bracket_vanish_rel": 1e-10,
    "bracket_roundtrip_rel": 1e-10,
    # commutator identities, relative to output scale
    "commutator_identity_rel": 1e-8,
    "lemma47_rel": 1e-8,
    "reconstruction_additivity_rel": 1e-9,
    "multilinearity_rel": 1e-12,
    # regression exponents
    "omega_slope_tol": 0.12,
    "omega_slope_seed_tol": 0.30,
    "holder_slope_tol": 0.10,
    "bracket_regularity_slack": 0.15,
    "commutator_regularity_tol": 0.10,
    "commutator_regularity_seed_tol": 0.25,
    "control_resonant_slack": 0.15,
    "flatness_slope_tol": 0.15,
}
