#include "schmm/eval.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "schmm/kernels.hpp"
#include "schmm/markov.hpp"

namespace schmm {

PointParams point_estimates(const GlobalStats& stats, const ModelConfig& cfg) {
  stats.validate(cfg);
  const int K = cfg.K;
  const int W = cfg.W;
  PointParams p{Mat(K, K), Mat(K, W), {}};
  for (int k = 0; k < K; ++k) {
    const double* c = stats.trans.row(k);
    const double den = kernels::active().sum(c, K) + K * cfg.alpha;
    double* t = p.theta.row(k);
    for (int j = 0; j < K; ++j) t[j] = (c[j] + cfg.alpha) / den;
  }
  for (int k = 0; k < K; ++k) {
    const double* e = stats.emit.row(k);
    const double den = kernels::active().sum(e, W) + W * cfg.beta;
    double* f = p.phi.row(k);
    for (int w = 0; w < W; ++w) f[w] = (e[w] + cfg.beta) / den;
  }
  p.init = stationary_distribution(p.theta);
  return p;
}

double predictive_log_likelihood(const PointParams& params,
                                 std::span<const uint32_t> test) {
  if (test.empty()) fail(ErrorKind::invalid_argument, "empty test segment");
  const int K = params.theta.rows;
  const int W = params.phi.cols;
  const auto& ops = kernels::active();

  std::vector<double> a(K), next(K), ecol(K);
  auto emission = [&](uint32_t w, double* out) {
    if (w >= static_cast<uint32_t>(W)) {
      fail(ErrorKind::data, "test token " + std::to_string(w) +
                                " outside vocabulary (W=" + std::to_string(W) + ")");
    }
    const double* col = params.phi.data() + w;
    for (int k = 0; k < K; ++k) out[k] = col[static_cast<size_t>(k) * W];
  };

  emission(test[0], ecol.data());
  for (int k = 0; k < K; ++k) a[k] = params.init[k] * ecol[k];

  // Kahan-compensated sum of the per-step log normalizers.
  double ll = 0.0, comp = 0.0;
  auto add = [&](double term) {
    double y = term - comp;
    double t = ll + y;
    comp = (t - ll) - y;
    ll = t;
  };

  add(std::log(kernels::normalize(a.data(), K)));
  for (size_t t = 1; t < test.size(); ++t) {
    ops.vec_mat(a.data(), params.theta.data(), K, next.data());
    emission(test[t], ecol.data());
    ops.mul(next.data(), ecol.data(), K);
    add(std::log(kernels::normalize(next.data(), K)));
    a.swap(next);
  }
  return ll / static_cast<double>(test.size());
}

void validate_trace(const MetricsTrace& trace) {
  for (size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].iteration <= trace[i - 1].iteration) {
      fail(ErrorKind::invalid_argument, "metrics iterations not strictly increasing");
    }
    if (trace[i].wall_seconds < trace[i - 1].wall_seconds) {
      fail(ErrorKind::invalid_argument, "metrics wall clock decreased");
    }
  }
}

namespace {

void atomic_write(const std::string& path, const std::string& body, ErrorKind kind) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(kind, "cannot write file: " + tmp);
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out.flush()) fail(kind, "failed writing file: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    fail(kind, "cannot move file into place: " + path);
  }
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void emit_metrics(const MetricsTrace& trace, const std::string& path) {
  validate_trace(trace);
  std::string body = "iteration,wall_seconds,rho,heldout_ll_per_token\n";
  for (const auto& r : trace) {
    char head[32];
    std::snprintf(head, sizeof(head), "%" PRId64, r.iteration);
    body += head;
    body += ',';
    body += fmt17(r.wall_seconds);
    body += ',';
    body += fmt17(r.rho);
    body += ',';
    body += fmt17(r.heldout_ll);
    body += '\n';
  }
  atomic_write(path, body, ErrorKind::data);
}

MetricsTrace read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::data, "cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "iteration,wall_seconds,rho,heldout_ll_per_token") {
    fail(ErrorKind::artifact, "bad metrics header in " + path);
  }
  MetricsTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MetricsRow r;
    char* end = nullptr;
    const char* s = line.c_str();
    r.iteration = std::strtoll(s, &end, 10);
    bool ok = end != s && *end == ',';
    if (ok) {
      s = end + 1;
      r.wall_seconds = std::strtod(s, &end);
      ok = end != s && *end == ',';
    }
    if (ok) {
      s = end + 1;
      r.rho = std::strtod(s, &end);
      ok = end != s && *end == ',';
    }
    if (ok) {
      s = end + 1;
      r.heldout_ll = std::strtod(s, &end);
      ok = end != s && *end == '\0';
    }
    if (!ok) fail(ErrorKind::artifact, "malformed metrics row in " + path + ": " + line);
    trace.push_back(r);
  }
  validate_trace(trace);
  return trace;
}

void emit_plot(const std::vector<std::pair<std::string, MetricsTrace>>& traces,
               const std::string& path) {
  if (traces.empty()) fail(ErrorKind::invalid_argument, "emit_plot needs at least one trace");

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& [name, trace] : traces) {
    (void)name;
    for (const auto& r : trace) {
      const auto x = static_cast<double>(r.iteration);
      if (first) {
        xmin = xmax = x;
        ymin = ymax = r.heldout_ll;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, r.heldout_ll);
        ymax = std::max(ymax, r.heldout_ll);
      }
    }
  }
  if (first) fail(ErrorKind::invalid_argument, "emit_plot: all traces are empty");

  // 5% padding on each side; synthesize a span for flat/single-point data.
  double xpad = (xmax - xmin) * 0.05, ypad = (ymax - ymin) * 0.05;
  if (xpad == 0.0) xpad = std::max(1.0, std::abs(xmin) * 0.05);
  if (ypad == 0.0) ypad = std::max(0.5, std::abs(ymin) * 0.05);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const double width = 960, height = 600;
  const double ml = 90, mr = 30, mt = 30, mb = 60;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const size_t npal = sizeof(kPalette) / sizeof(kPalette[0]);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";

  auto tick_label = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
  };
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / nticks;
    const double fy = ymin + (ymax - ymin) * i / nticks;
    svg << "<line x1=\"" << X(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << X(fx)
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << X(fx) << "\" y=\"" << mt + ph + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << tick_label(fx)
        << "</text>\n";
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y(fy) << "\" x2=\"" << ml
        << "\" y2=\"" << Y(fy) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << Y(fy) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << tick_label(fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"20\" y=\"" << mt + ph / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << mt + ph / 2 << ")\">held-out log likelihood (nats/token)</text>\n";

  for (size_t i = 0; i < traces.size(); ++i) {
    const auto& [name, trace] = traces[i];
    if (trace.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[i % npal]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : trace) {
      svg << X(static_cast<double>(r.iteration)) << "," << Y(r.heldout_ll) << " ";
    }
    svg << "\"/>\n";
    // single-point traces get a visible dot
    if (trace.size() == 1) {
      svg << "<circle cx=\"" << X(static_cast<double>(trace[0].iteration)) << "\" cy=\""
          << Y(trace[0].heldout_ll) << "\" r=\"3\" fill=\"" << kPalette[i % npal]
          << "\"/>\n";
    }
  }

  // legend
  const double lx = ml + pw - 190, ly = mt + 10;
  svg << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"180\" height=\""
      << 22 * traces.size() + 8 << "\" fill=\"white\" stroke=\"black\"/>\n";
  for (size_t i = 0; i < traces.size(); ++i) {
    const double ry = ly + 8 + 22 * i;
    svg << "<line x1=\"" << lx + 8 << "\" y1=\"" << ry + 7 << "\" x2=\"" << lx + 36
        << "\" y2=\"" << ry + 7 << "\" stroke=\"" << kPalette[i % npal]
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << lx + 42 << "\" y=\"" << ry + 11
        << "\" font-size=\"12\">" << traces[i].first << "</text>\n";
  }
  svg << "</svg>\n";

  atomic_write(path, svg.str(), ErrorKind::data);
}

}  // namespace schmm
