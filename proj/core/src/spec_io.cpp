#include "mfnet/spec_io.hpp"

#include <fstream>

namespace mfnet {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

double number_at(const json& j, const char* key, const std::string& path) {
  return number(member(j, key, path), path + "." + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& path) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, path + "." + key);
}

std::vector<double> vector_of(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::MatrixXd matrix_of(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = 0;
  std::vector<std::vector<double>> data;
  for (std::size_t r = 0; r < j.size(); ++r) {
    data.push_back(vector_of(j[r], path + "[" + std::to_string(r) + "]"));
    if (r == 0) {
      cols = static_cast<Eigen::Index>(data.back().size());
    } else if (static_cast<Eigen::Index>(data.back().size()) != cols) {
      throw ConfigError(path + ": ragged rows");
    }
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string kind_of(const json& j, const std::string& path) {
  const auto& k = member(j, "kind", path);
  if (!k.is_string()) throw ConfigError(path + ".kind: expected a string");
  return k.get<std::string>();
}

}  // namespace

json to_json(const Sigmoid& s) {
  return std::visit(
      Overloaded{
          [](const Logistic& l) { return json{{"kind", "logistic"}, {"s_max", l.s_max}, {"v_t", l.v_t}, {"v_s", l.v_s}}; },
          [](const ErfForm& e) { return json{{"kind", "erf"}, {"g", e.g}, {"gamma", e.gamma}}; },
          [](const Tanh& t) { return json{{"kind", "tanh"}, {"g", t.g}}; },
          [](const SqrtClassI& q) { return json{{"kind", "sqrt_class_i"}, {"c", q.c}, {"p_star", q.p_star}}; },
      },
      s);
}

json to_json(const InputSignal& s) {
  return std::visit(
      Overloaded{
          [](const ConstantInput& c) { return json{{"kind", "constant"}, {"value", c.value}}; },
          [](const PiecewiseConstantInput& p) {
            return json{{"kind", "piecewise_constant"}, {"breakpoints", p.breakpoints}, {"values", p.values}};
          },
          [](const SinusoidInput& s) {
            return json{{"kind", "sinusoid"}, {"mean", s.mean}, {"amplitude", s.amplitude}, {"period", s.period}};
          },
      },
      s);
}

json to_json(const NetworkSpec& spec) {
  json pops = json::array();
  for (const auto& p : spec.populations) {
    pops.push_back({{"tau", p.tau}, {"f", p.f}, {"sigmoid", to_json(p.sigmoid)}, {"input", to_json(p.input)}});
  }
  return json{{"populations", std::move(pops)},
              {"j_bar", matrix_json(spec.connectivity.j_bar)},
              {"sigma", matrix_json(spec.connectivity.sigma)},
              {"initial_mean", spec.initial_mean},
              {"initial_variance", spec.initial_variance}};
}

Sigmoid sigmoid_from_json(const json& j, const std::string& path) {
  const auto kind = kind_of(j, path);
  if (kind == "logistic") {
    return Logistic{number_or(j, "s_max", 1.0, path), number_or(j, "v_t", 0.0, path), number_or(j, "v_s", 1.0, path)};
  }
  if (kind == "erf") return ErfForm{number_at(j, "g", path), number_or(j, "gamma", 0.0, path)};
  if (kind == "tanh") return Tanh{number_at(j, "g", path)};
  if (kind == "sqrt_class_i") return SqrtClassI{number_at(j, "c", path), number_or(j, "p_star", 0.0, path)};
  throw ConfigError(path + ".kind: unknown sigmoid '" + kind + "'");
}

InputSignal input_from_json(const json& j, const std::string& path) {
  if (j.is_number()) return ConstantInput{j.get<double>()};
  const auto kind = kind_of(j, path);
  if (kind == "constant") return ConstantInput{number_at(j, "value", path)};
  if (kind == "piecewise_constant") {
    return PiecewiseConstantInput{vector_of(member(j, "breakpoints", path), path + ".breakpoints"),
                                  vector_of(member(j, "values", path), path + ".values")};
  }
  if (kind == "sinusoid") {
    return SinusoidInput{number_or(j, "mean", 0.0, path), number_at(j, "amplitude", path), number_at(j, "period", path)};
  }
  throw ConfigError(path + ".kind: unknown input '" + kind + "'");
}

NetworkSpec spec_from_json(const json& j) {
  NetworkSpec spec;
  const auto& pops = member(j, "populations", "spec");
  if (!pops.is_array()) throw ConfigError("populations: expected an array");
  for (std::size_t a = 0; a < pops.size(); ++a) {
    const std::string path = "populations[" + std::to_string(a) + "]";
    PopulationParams p;
    p.tau = number_at(pops[a], "tau", path);
    p.f = number_or(pops[a], "f", 0.0, path);
    p.sigmoid = sigmoid_from_json(member(pops[a], "sigmoid", path), path + ".sigmoid");
    const auto it = pops[a].find("input");
    p.input = it == pops[a].end() ? InputSignal{ConstantInput{0.0}} : input_from_json(*it, path + ".input");
    spec.populations.push_back(std::move(p));
  }
  spec.connectivity.j_bar = matrix_of(member(j, "j_bar", "spec"), "j_bar");
  spec.connectivity.sigma = matrix_of(member(j, "sigma", "spec"), "sigma");
  spec.initial_mean = vector_of(member(j, "initial_mean", "spec"), "initial_mean");
  spec.initial_variance = vector_of(member(j, "initial_variance", "spec"), "initial_variance");
  return spec;
}

NetworkSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  // A run config nests the network under "network"; a bare spec is accepted too.
  if (j.is_object() && j.contains("network")) return spec_from_json(j["network"]);
  return spec_from_json(j);
}

}  // namespace mfnet
