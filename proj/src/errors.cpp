#include "pacekit/errors.hpp"

namespace pacekit {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::atom_has_no_density: return "AtomHasNoDensity";
    case ErrorCode::quadrature_non_convergence: return "QuadratureNonConvergence";
    case ErrorCode::unknown_dataset: return "UnknownDataset";
    case ErrorCode::mixed_families: return "MixedFamilies";
    case ErrorCode::empty_sample: return "EmptySample";
    case ErrorCode::nonpositive_bandwidth: return "NonPositiveBandwidth";
    case ErrorCode::degenerate_sample: return "DegenerateSample";
    case ErrorCode::bisection_bracket_failure: return "BisectionBracketFailure";
    case ErrorCode::all_zero_plan: return "AllZeroPlan";
    case ErrorCode::indivisible_horizon: return "IndivisibleHorizon";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::protocol_violation: return "ProtocolViolation";
    case ErrorCode::overcharge: return "OverchargeError";
    case ErrorCode::empty_lists: return "EmptyLists";
    case ErrorCode::empty_table: return "EmptyTable";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::parse_error: return "ParseError";
  }
  return "Unknown";
}

}  // namespace pacekit
