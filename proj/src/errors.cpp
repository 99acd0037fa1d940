#include "percbridge/errors.hpp"

namespace percbridge {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::empty_support: return "EmptySupport";
        case Errc::non_positive_probability: return "NonPositiveProbability";
        case Errc::probability_sum_mismatch: return "ProbabilitySumMismatch";
        case Errc::duplicate_support_vector: return "DuplicateSupportVector";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::non_lattice_projection: return "NonLatticeProjection";
        case Errc::zero_variance: return "ZeroVariance";
        case Errc::target_outside_hull: return "TargetOutsideHull";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::unreachable_endpoint: return "UnreachableEndpoint";
        case Errc::table_budget_exceeded: return "TableBudgetExceeded";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::non_monotone_time: return "NonMonotoneTime";
        case Errc::unpinned_endpoint: return "UnpinnedEndpoint";
        case Errc::nonzero_mean: return "NonzeroMean";
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::drift_violation: return "DriftViolation";
        case Errc::cap_exceeded: return "CapExceeded";
        case Errc::no_pinning_possible: return "NoPinningPossible";
        case Errc::vertex_outside_slab: return "VertexOutsideSlab";
        case Errc::not_h_connected: return "NotHConnected";
        case Errc::attempt_budget_exhausted: return "AttemptBudgetExhausted";
        case Errc::enumeration_budget_exceeded: return "EnumerationBudgetExceeded";
        case Errc::supercritical_p: return "SupercriticalP";
        case Errc::insufficient_acceptances: return "InsufficientAcceptances";
        case Errc::time_not_on_grid: return "TimeNotOnGrid";
        case Errc::too_few_samples: return "TooFewSamples";
        case Errc::degenerate_fit: return "DegenerateFit";
        case Errc::grid_mismatch: return "GridMismatch";
        case Errc::config_error: return "ConfigError";
        case Errc::io_error: return "IoError";
        case Errc::missing_manifest: return "MissingManifest";
    }
    return "UnknownError";
}

} // namespace percbridge
