#ifndef PERCBRIDGE_ERRORS_HPP
#define PERCBRIDGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace percbridge {

enum class Errc {
    // step laws
    empty_support,
    non_positive_probability,
    probability_sum_mismatch,
    duplicate_support_vector,
    dimension_mismatch,
    non_lattice_projection,
    zero_variance,
    target_outside_hull,
    no_convergence,
    // bridges
    unreachable_endpoint,
    table_budget_exceeded,
    length_mismatch,
    non_monotone_time,
    unpinned_endpoint,
    nonzero_mean,
    invalid_argument,
    // pinning
    drift_violation,
    cap_exceeded,
    no_pinning_possible,
    // percolation
    vertex_outside_slab,
    not_h_connected,
    attempt_budget_exhausted,
    enumeration_budget_exceeded,
    supercritical_p,
    insufficient_acceptances,
    // analysis
    time_not_on_grid,
    too_few_samples,
    degenerate_fit,
    grid_mismatch,
    // cli
    config_error,
    io_error,
    missing_manifest,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace percbridge

#endif
