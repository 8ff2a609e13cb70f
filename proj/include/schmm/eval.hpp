#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "schmm/common.hpp"
#include "schmm/model.hpp"

namespace schmm {

// VB maximization step: posterior-mean parameters from the global expected
// counts. theta rows normalize over outgoing transitions, phi rows over the
// vocabulary, so both are row-stochastic by construction; init is the
// stationary distribution of theta.
PointParams point_estimates(const GlobalStats& stats, const ModelConfig& cfg);

// Held-out score in nats per token: scaled forward algorithm over the test
// segment, started from params.init, with compensated summation of the
// per-step log normalizers so 1e8-token segments lose no precision.
double predictive_log_likelihood(const PointParams& params,
                                 std::span<const uint32_t> test);

struct MetricsRow {
  int64_t iteration = 0;
  double wall_seconds = 0.0;
  double rho = 0.0;
  double heldout_ll = 0.0;  // nats per token
};

using MetricsTrace = std::vector<MetricsRow>;

// Throws unless iterations strictly increase and wall clock never decreases.
void validate_trace(const MetricsTrace& trace);

// CSV with header iteration,wall_seconds,rho,heldout_ll_per_token; values
// round-trip at 17 significant digits. Written via temp file + rename.
void emit_metrics(const MetricsTrace& trace, const std::string& path);
MetricsTrace read_metrics(const std::string& path);

// Self-contained SVG line chart: iteration on x, held-out nats/token on y,
// one polyline per named trace, legend in the top-right, data bounds padded
// by 5%. Written via temp file + rename.
void emit_plot(const std::vector<std::pair<std::string, MetricsTrace>>& traces,
               const std::string& path);

}  // namespace schmm
