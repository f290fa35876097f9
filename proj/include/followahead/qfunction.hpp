#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "followahead/errors.hpp"
#include "followahead/geometry.hpp"
#include "followahead/rng.hpp"

namespace followahead {

// Fully-connected action-value network Q(o, a_i). Input is the 3-component
// egocentric observation, output one estimated return per action. Hidden
// layers use tanh; the output layer is linear. Input normalization constants
// travel with the parameters so callers feed raw observations.
struct QFunctionParams {
  std::vector<int> layers{3, 64, 64, kNumActions};
  std::vector<std::vector<double>> weights;  // weights[l]: layers[l+1] x layers[l], row-major
  std::vector<std::vector<double>> biases;   // biases[l]: layers[l+1]
  std::string activation = "tanh";
  std::array<double, 3> norm_mean{0.0, 0.0, 0.0};
  std::array<double, 3> norm_scale{0.2, 0.2, 1.0 / 180.0};

  std::size_t layer_count() const { return layers.empty() ? 0 : layers.size() - 1; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      n += static_cast<std::size_t>(layers[l + 1]) * layers[l] + layers[l + 1];
    }
    return n;
  }

  bool finite() const {
    for (const auto& w : weights)
      for (double v : w)
        if (!std::isfinite(v)) return false;
    for (const auto& b : biases)
      for (double v : b)
        if (!std::isfinite(v)) return false;
    return true;
  }
};

inline void validate(const QFunctionParams& p) {
  if (p.layers.size() < 2 || p.layers.front() != 3 || p.layers.back() != kNumActions) {
    throw std::invalid_argument("QFunctionParams: layer sizes must run 3 -> ... -> 3");
  }
  if (p.weights.size() != p.layer_count() || p.biases.size() != p.layer_count()) {
    throw std::invalid_argument("QFunctionParams: layer count mismatch");
  }
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    if (p.weights[l].size() !=
        static_cast<std::size_t>(p.layers[l + 1]) * p.layers[l]) {
      throw std::invalid_argument("QFunctionParams: weight shape mismatch at layer " +
                                  std::to_string(l));
    }
    if (p.biases[l].size() != static_cast<std::size_t>(p.layers[l + 1])) {
      throw std::invalid_argument("QFunctionParams: bias shape mismatch at layer " +
                                  std::to_string(l));
    }
  }
  if (p.activation != "tanh") {
    throw std::invalid_argument("QFunctionParams: unknown activation '" + p.activation + "'");
  }
}

// Zero-filled network of the given hidden shape.
inline QFunctionParams make_zero_params(const std::vector<int>& hidden = {64, 64}) {
  QFunctionParams p;
  p.layers.assign(1, 3);
  p.layers.insert(p.layers.end(), hidden.begin(), hidden.end());
  p.layers.push_back(kNumActions);
  for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
    p.weights.emplace_back(static_cast<std::size_t>(p.layers[l + 1]) * p.layers[l], 0.0);
    p.biases.emplace_back(static_cast<std::size_t>(p.layers[l + 1]), 0.0);
  }
  return p;
}

// Xavier-uniform initialization, reproducible from the rng stream.
inline QFunctionParams make_random_params(DetRng& rng,
                                          const std::vector<int>& hidden = {64, 64}) {
  QFunctionParams p = make_zero_params(hidden);
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    const double bound = std::sqrt(6.0 / (p.layers[l] + p.layers[l + 1]));
    for (double& w : p.weights[l]) w = rng.uniform(-bound, bound);
  }
  return p;
}

namespace detail {

inline void normalized_input(const QFunctionParams& p, const Observation& o,
                             std::array<double, 3>& out) {
  if (!std::isfinite(o.dx) || !std::isfinite(o.dy) || !std::isfinite(o.dtheta)) {
    throw std::invalid_argument("q_forward: non-finite observation");
  }
  out[0] = (o.dx - p.norm_mean[0]) * p.norm_scale[0];
  out[1] = (o.dy - p.norm_mean[1]) * p.norm_scale[1];
  out[2] = (o.dtheta - p.norm_mean[2]) * p.norm_scale[2];
}

}  // namespace detail

// Scratch buffers for a forward/backward pass. Reusable across samples; the
// trainer owns one per network shape.
class MlpWorkspace {
 public:
  explicit MlpWorkspace(const QFunctionParams& p) { resize(p); }

  void resize(const QFunctionParams& p) {
    act_.assign(p.layers.size(), {});
    delta_.assign(p.layers.size(), {});
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
      act_[i].assign(static_cast<std::size_t>(p.layers[i]), 0.0);
      delta_[i].assign(static_cast<std::size_t>(p.layers[i]), 0.0);
    }
  }

  // Forward pass; activations are retained for a subsequent backward().
  const std::vector<double>& forward(const QFunctionParams& p, const Observation& o) {
    std::array<double, 3> in;
    detail::normalized_input(p, o, in);
    for (int i = 0; i < 3; ++i) act_[0][static_cast<std::size_t>(i)] = in[static_cast<std::size_t>(i)];
    for (std::size_t l = 0; l < p.layer_count(); ++l) {
      const int n_out = p.layers[l + 1];
      const int n_in = p.layers[l];
      const bool last = (l + 1 == p.layer_count());
      const double* w = p.weights[l].data();
      for (int j = 0; j < n_out; ++j) {
        double z = p.biases[l][static_cast<std::size_t>(j)];
        const double* wrow = w + static_cast<std::size_t>(j) * n_in;
        for (int i = 0; i < n_in; ++i) z += wrow[i] * act_[l][static_cast<std::size_t>(i)];
        act_[l + 1][static_cast<std::size_t>(j)] = last ? z : std::tanh(z);
      }
    }
    return act_.back();
  }

  // Backpropagates d(loss)/d(output) through the last forward() pass,
  // accumulating into grad_w / grad_b (same shapes as the parameters).
  void backward(const QFunctionParams& p, const std::vector<double>& dloss_dout,
                std::vector<std::vector<double>>& grad_w,
                std::vector<std::vector<double>>& grad_b) {
    const std::size_t L = p.layer_count();
    delta_[L] = dloss_dout;
    for (std::size_t l = L; l-- > 0;) {
      const int n_out = p.layers[l + 1];
      const int n_in = p.layers[l];
      const bool last = (l + 1 == L);
      const double* w = p.weights[l].data();
      // tanh' = 1 - tanh^2, with act_ already holding tanh(z).
      if (!last) {
        for (int j = 0; j < n_out; ++j) {
          const double a = act_[l + 1][static_cast<std::size_t>(j)];
          delta_[l + 1][static_cast<std::size_t>(j)] *= (1.0 - a * a);
        }
      }
      for (int j = 0; j < n_out; ++j) {
        const double d = delta_[l + 1][static_cast<std::size_t>(j)];
        if (d == 0.0) continue;
        double* gw = grad_w[l].data() + static_cast<std::size_t>(j) * n_in;
        for (int i = 0; i < n_in; ++i) gw[i] += d * act_[l][static_cast<std::size_t>(i)];
        grad_b[l][static_cast<std::size_t>(j)] += d;
      }
      if (l > 0) {
        for (int i = 0; i < n_in; ++i) {
          double s = 0.0;
          for (int j = 0; j < n_out; ++j) {
            s += w[static_cast<std::size_t>(j) * n_in + i] *
                 delta_[l + 1][static_cast<std::size_t>(j)];
          }
          delta_[l][static_cast<std::size_t>(i)] = s;
        }
      }
    }
  }

 private:
  std::vector<std::vector<double>> act_;
  std::vector<std::vector<double>> delta_;
};

// Deterministic forward evaluation: one estimated return per action.
inline std::array<double, kNumActions> q_forward(const QFunctionParams& p,
                                                 const Observation& o) {
  validate(p);
  MlpWorkspace ws(p);
  const auto& out = ws.forward(p, o);
  return {out[0], out[1], out[2]};
}

// Reusable evaluator: validates once, keeps one workspace, no per-call
// allocation. The planner and the harness query through this.
class QEvaluator {
 public:
  explicit QEvaluator(const QFunctionParams& p) : params_(&p), ws_(p) { validate(p); }

  std::array<double, kNumActions> operator()(const Observation& o) {
    const auto& out = ws_.forward(*params_, o);
    return {out[0], out[1], out[2]};
  }

 private:
  const QFunctionParams* params_;
  MlpWorkspace ws_;
};

// ---- Parameter persistence (versioned text, hexfloat => bit-exact) ----

inline void save_params(const QFunctionParams& p, std::ostream& out) {
  validate(p);
  out << "QFUNC v1\n";
  out << "layers";
  for (int s : p.layers) out << ' ' << s;
  out << '\n';
  out << "activation " << p.activation << '\n';
  char buf[64];
  auto hex = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%a", v);
    return std::string(buf);
  };
  out << "norm_mean";
  for (double v : p.norm_mean) out << ' ' << hex(v);
  out << '\n';
  out << "norm_scale";
  for (double v : p.norm_scale) out << ' ' << hex(v);
  out << '\n';
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    out << "W " << l << '\n';
    const int n_in = p.layers[l], n_out = p.layers[l + 1];
    for (int j = 0; j < n_out; ++j) {
      for (int i = 0; i < n_in; ++i) {
        if (i) out << ' ';
        out << hex(p.weights[l][static_cast<std::size_t>(j) * n_in + i]);
      }
      out << '\n';
    }
    out << "B " << l << '\n';
    for (int j = 0; j < n_out; ++j) {
      if (j) out << ' ';
      out << hex(p.biases[l][static_cast<std::size_t>(j)]);
    }
    out << '\n';
  }
}

inline void save_params(const QFunctionParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  save_params(p, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace detail {

inline std::vector<double> parse_hex_row(const std::string& line, std::size_t expected,
                                         const std::string& what, std::size_t lineno) {
  std::vector<double> vals;
  vals.reserve(expected);
  const char* s = line.c_str();
  char* end = nullptr;
  for (;;) {
    while (*s == ' ' || *s == '\t') ++s;
    if (*s == '\0' || *s == '\r') break;
    const double v = std::strtod(s, &end);
    if (end == s) throw ParseError("bad number in " + what, lineno);
    vals.push_back(v);
    s = end;
  }
  if (vals.size() != expected) {
    throw ParseError(what + ": expected " + std::to_string(expected) + " values, got " +
                         std::to_string(vals.size()),
                     lineno);
  }
  return vals;
}

}  // namespace detail

inline QFunctionParams load_params(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](const std::string& what) {
    if (!std::getline(in, line)) throw ParseError("unexpected end of document, expected " + what, lineno + 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("magic");
  if (line != "QFUNC v1") throw ParseError("expected magic 'QFUNC v1'", lineno);

  QFunctionParams p;
  next_line("layer sizes");
  {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw != "layers") throw ParseError("expected 'layers'", lineno);
    p.layers.clear();
    int v;
    while (ls >> v) p.layers.push_back(v);
    if (p.layers.size() < 2) throw ParseError("need at least two layer sizes", lineno);
    for (int s : p.layers)
      if (s <= 0) throw ParseError("non-positive layer size", lineno);
  }
  next_line("activation");
  {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw >> p.activation;
    if (kw != "activation" || p.activation.empty()) {
      throw ParseError("expected 'activation <tag>'", lineno);
    }
  }
  auto read_triple = [&](const char* kw_want, std::array<double, 3>& dst) {
    next_line(kw_want);
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw != kw_want) throw ParseError(std::string("expected '") + kw_want + "'", lineno);
    std::string rest;
    std::getline(ls, rest);
    const auto vals = detail::parse_hex_row(rest, 3, kw_want, lineno);
    for (int i = 0; i < 3; ++i) dst[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(i)];
  };
  read_triple("norm_mean", p.norm_mean);
  read_triple("norm_scale", p.norm_scale);

  for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
    const int n_in = p.layers[l], n_out = p.layers[l + 1];
    next_line("W header");
    if (line != "W " + std::to_string(l)) {
      throw ParseError("expected 'W " + std::to_string(l) + "'", lineno);
    }
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(n_in) * n_out);
    for (int j = 0; j < n_out; ++j) {
      next_line("weight row of layer " + std::to_string(l));
      auto row = detail::parse_hex_row(line, static_cast<std::size_t>(n_in),
                                       "layer " + std::to_string(l) + " weight row " +
                                           std::to_string(j),
                                       lineno);
      w.insert(w.end(), row.begin(), row.end());
    }
    p.weights.push_back(std::move(w));
    next_line("B header");
    if (line != "B " + std::to_string(l)) {
      throw ParseError("expected 'B " + std::to_string(l) + "'", lineno);
    }
    next_line("bias row of layer " + std::to_string(l));
    p.biases.push_back(detail::parse_hex_row(
        line, static_cast<std::size_t>(n_out), "layer " + std::to_string(l) + " biases",
        lineno));
  }
  try {
    validate(p);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return p;
}

inline QFunctionParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open params file: " + path);
  return load_params(in);
}

}  // namespace followahead
