#include "sosinterp/sdp/json.hpp"

namespace sosinterp::sdp {

nlohmann::json result_record(const SdpSolution& sol) {
  return {{"status", to_string(sol.status)},
          {"iterations", sol.iterations},
          {"pinf", sol.residuals.pinf},
          {"dinf", sol.residuals.dinf},
          {"gap", sol.residuals.gap},
          {"objective", sol.primal_objective}};
}

}  // namespace sosinterp::sdp
