#include "mfnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mfnet {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string pop_path(std::size_t a, const char* field) {
  std::ostringstream os;
  os << "populations[" << a << "]." << field;
  return os.str();
}

}  // namespace

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double eval_sigmoid(const Sigmoid& s, double x) noexcept {
  return std::visit(
      Overloaded{
          [x](const Logistic& l) { return l.s_max / (1.0 + std::exp(-(x - l.v_t) / l.v_s)); },
          [x](const ErfForm& e) { return normal_cdf(e.g * x + e.gamma); },
          [x](const Tanh& t) { return fast_tanh(t.g * x); },
          [x](const SqrtClassI& q) { return x > q.p_star ? q.c * std::sqrt(x - q.p_star) : 0.0; },
      },
      s);
}

Sigmoid with_slope(const Sigmoid& s, double g) {
  return std::visit(Overloaded{
                        [g](Logistic l) -> Sigmoid {
                          l.v_s = 1.0 / g;
                          return l;
                        },
                        [g](ErfForm e) -> Sigmoid {
                          e.g = g;
                          return e;
                        },
                        [g](Tanh t) -> Sigmoid {
                          t.g = g;
                          return t;
                        },
                        [](SqrtClassI q) -> Sigmoid { return q; },
                    },
                    s);
}

std::optional<double> sigmoid_bound(const Sigmoid& s) noexcept {
  return std::visit(Overloaded{
                        [](const Logistic& l) -> std::optional<double> { return std::abs(l.s_max); },
                        [](const ErfForm&) -> std::optional<double> { return 1.0; },
                        [](const Tanh&) -> std::optional<double> { return 1.0; },
                        [](const SqrtClassI&) -> std::optional<double> { return std::nullopt; },
                    },
                    s);
}

bool sigmoid_is_odd(const Sigmoid& s) noexcept { return std::holds_alternative<Tanh>(s); }

std::string sigmoid_kind(const Sigmoid& s) {
  return std::visit(Overloaded{
                        [](const Logistic&) { return std::string("logistic"); },
                        [](const ErfForm&) { return std::string("erf"); },
                        [](const Tanh&) { return std::string("tanh"); },
                        [](const SqrtClassI&) { return std::string("sqrt_class_i"); },
                    },
                    s);
}

double eval_input(const InputSignal& sig, double t) noexcept {
  return std::visit(
      Overloaded{
          [](const ConstantInput& c) { return c.value; },
          [t](const PiecewiseConstantInput& p) {
            // right-continuous: the value switches exactly at the breakpoint
            const auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), t);
            const auto k = static_cast<std::size_t>(it - p.breakpoints.begin());
            return k < p.values.size() ? p.values[k] : 0.0;
          },
          [t](const SinusoidInput& s) {
            return s.mean + s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period);
          },
      },
      sig);
}

bool input_is_constant(const InputSignal& sig) noexcept {
  return std::visit(Overloaded{
                        [](const ConstantInput&) { return true; },
                        [](const PiecewiseConstantInput& p) {
                          return std::adjacent_find(p.values.begin(), p.values.end(),
                                                    std::not_equal_to<>()) == p.values.end();
                        },
                        [](const SinusoidInput& s) { return s.amplitude == 0.0; },
                    },
                    sig);
}

std::string to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::kDimensionMismatch: return "dimension mismatch";
    case IssueKind::kNonPositiveTimeConstant: return "non-positive time constant";
    case IssueKind::kNegativeNoise: return "negative noise amplitude";
    case IssueKind::kNegativeVariance: return "negative variance";
    case IssueKind::kNegativeDispersion: return "negative coupling dispersion";
    case IssueKind::kInvalidSigmoid: return "invalid sigmoid";
    case IssueKind::kInvalidInput: return "invalid input signal";
    case IssueKind::kNonFinite: return "non-finite value";
    case IssueKind::kEmpty: return "empty network";
  }
  return "unknown";
}

ValidationResult validate_spec(const NetworkSpec& spec) {
  std::vector<SpecIssue> issues;
  auto add = [&issues](IssueKind k, std::string path, std::string detail = {}) {
    std::string msg = to_string(k);
    if (!detail.empty()) msg += ": " + detail;
    issues.push_back({k, std::move(path), std::move(msg)});
  };

  const std::size_t p = spec.populations.size();
  if (p == 0) add(IssueKind::kEmpty, "populations", "at least one population is required");

  for (std::size_t a = 0; a < p; ++a) {
    const auto& pop = spec.populations[a];
    if (!std::isfinite(pop.tau)) {
      add(IssueKind::kNonFinite, pop_path(a, "tau"));
    } else if (pop.tau <= 0.0) {
      add(IssueKind::kNonPositiveTimeConstant, pop_path(a, "tau"));
    }
    if (!std::isfinite(pop.f)) {
      add(IssueKind::kNonFinite, pop_path(a, "f"));
    } else if (pop.f < 0.0) {
      add(IssueKind::kNegativeNoise, pop_path(a, "f"));
    }

    std::visit(Overloaded{
                   [&](const Logistic& l) {
                     if (!(l.s_max > 0.0)) add(IssueKind::kInvalidSigmoid, pop_path(a, "sigmoid.s_max"), "must be > 0");
                     if (!(l.v_s > 0.0)) add(IssueKind::kInvalidSigmoid, pop_path(a, "sigmoid.v_s"), "must be > 0");
                     if (!std::isfinite(l.v_t)) add(IssueKind::kNonFinite, pop_path(a, "sigmoid.v_t"));
                   },
                   [&](const ErfForm& e) {
                     if (!(e.g >= 0.0)) add(IssueKind::kInvalidSigmoid, pop_path(a, "sigmoid.g"), "must be >= 0");
                     if (!std::isfinite(e.gamma)) add(IssueKind::kNonFinite, pop_path(a, "sigmoid.gamma"));
                   },
                   [&](const Tanh& t) {
                     if (!(t.g >= 0.0)) add(IssueKind::kInvalidSigmoid, pop_path(a, "sigmoid.g"), "must be >= 0");
                   },
                   [&](const SqrtClassI& q) {
                     if (!(q.c > 0.0)) add(IssueKind::kInvalidSigmoid, pop_path(a, "sigmoid.c"), "must be > 0");
                     if (!std::isfinite(q.p_star)) add(IssueKind::kNonFinite, pop_path(a, "sigmoid.p_star"));
                   },
               },
               pop.sigmoid);

    std::visit(Overloaded{
                   [&](const ConstantInput& c) {
                     if (!std::isfinite(c.value)) add(IssueKind::kNonFinite, pop_path(a, "input.value"));
                   },
                   [&](const PiecewiseConstantInput& pc) {
                     if (pc.values.size() != pc.breakpoints.size() + 1) {
                       add(IssueKind::kInvalidInput, pop_path(a, "input.values"),
                           "need exactly one more value than breakpoints");
                     }
                     for (std::size_t k = 1; k < pc.breakpoints.size(); ++k) {
                       if (!(pc.breakpoints[k] > pc.breakpoints[k - 1])) {
                         add(IssueKind::kInvalidInput, pop_path(a, "input.breakpoints"),
                             "breakpoints must be strictly increasing");
                         break;
                       }
                     }
                   },
                   [&](const SinusoidInput& s) {
                     if (!(s.period > 0.0)) add(IssueKind::kInvalidInput, pop_path(a, "input.period"), "must be > 0");
                   },
               },
               pop.input);
  }

  const auto& c = spec.connectivity;
  const auto pi = static_cast<Eigen::Index>(p);
  if (c.j_bar.rows() != pi || c.j_bar.cols() != pi) {
    add(IssueKind::kDimensionMismatch, "j_bar", "expected a " + std::to_string(p) + "x" + std::to_string(p) + " matrix");
  } else if (!c.j_bar.allFinite()) {
    add(IssueKind::kNonFinite, "j_bar");
  }
  if (c.sigma.rows() != pi || c.sigma.cols() != pi) {
    add(IssueKind::kDimensionMismatch, "sigma", "expected a " + std::to_string(p) + "x" + std::to_string(p) + " matrix");
  } else if (!c.sigma.allFinite()) {
    add(IssueKind::kNonFinite, "sigma");
  } else if ((c.sigma.array() < 0.0).any()) {
    add(IssueKind::kNegativeDispersion, "sigma");
  }

  if (spec.initial_mean.size() != p) {
    add(IssueKind::kDimensionMismatch, "initial_mean", "expected length " + std::to_string(p));
  }
  if (spec.initial_variance.size() != p) {
    add(IssueKind::kDimensionMismatch, "initial_variance", "expected length " + std::to_string(p));
  } else {
    for (std::size_t a = 0; a < p; ++a) {
      if (!(spec.initial_variance[a] >= 0.0)) {
        add(IssueKind::kNegativeVariance, "initial_variance[" + std::to_string(a) + "]");
      }
    }
  }

  ValidationResult out;
  out.issues = std::move(issues);
  if (out.issues.empty()) out.spec = spec;
  return out;
}

namespace {
std::string join_issues(const std::vector<SpecIssue>& issues) {
  std::string s = "invalid network spec:";
  for (const auto& i : issues) s += "\n  " + i.path + ": " + i.message;
  return s;
}
}  // namespace

SpecError::SpecError(std::vector<SpecIssue> issues)
    : std::invalid_argument(join_issues(issues)), issues_(std::move(issues)) {}

const NetworkSpec& require_valid(const NetworkSpec& spec) {
  auto r = validate_spec(spec);
  if (!r.ok()) throw SpecError(std::move(r.issues));
  return spec;
}

TimeGrid::TimeGrid(double t0, double t_end, double dt) : t0_(t0), t_end_(t_end), dt_(dt), n_(0) {
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !std::isfinite(dt)) {
    throw std::invalid_argument("time grid: non-finite bounds or step");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("time grid: dt must be > 0");
  if (!(t_end > t0)) throw std::invalid_argument("time grid: t_end must exceed t0");
  // tolerate representation error so that e.g. (5 - 0) / 0.01 yields 501 points
  const double steps = std::floor((t_end - t0) / dt + 1e-9);
  n_ = static_cast<std::size_t>(steps) + 1;
  if (n_ < 2) throw std::invalid_argument("time grid: fewer than two points");
}

double default_dt(const NetworkSpec& spec, double t0, double t_end, std::size_t max_points) {
  double tau_min = spec.populations.empty() ? 1.0 : spec.populations.front().tau;
  for (const auto& p : spec.populations) tau_min = std::min(tau_min, p.tau);
  double dt = tau_min / 100.0;
  const double span = t_end - t0;
  if (max_points >= 2 && span / dt + 1.0 > static_cast<double>(max_points)) {
    dt = span / static_cast<double>(max_points - 1);
  }
  return dt;
}

}  // namespace mfnet
