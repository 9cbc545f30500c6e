#pragma once

#include <filesystem>
#include <string>

#include "mfnet/model.hpp"

namespace mfnet::test {

inline NetworkSpec one_population(double tau, double f, Sigmoid s, double jbar, double sigma, double input = 0.0,
                                  double mu0 = 0.0, double v0 = 0.0) {
  NetworkSpec spec;
  spec.populations = {{tau, f, s, ConstantInput{input}}};
  spec.connectivity.j_bar = Eigen::MatrixXd::Constant(1, 1, jbar);
  spec.connectivity.sigma = Eigen::MatrixXd::Constant(1, 1, sigma);
  spec.initial_mean = {mu0};
  spec.initial_variance = {v0};
  return spec;
}

inline NetworkSpec two_populations(double tau, Sigmoid s, Eigen::Matrix2d jbar, double sigma = 0.0) {
  NetworkSpec spec;
  spec.populations = {{tau, 0.0, s, ConstantInput{0.0}}, {tau, 0.0, s, ConstantInput{0.0}}};
  spec.connectivity.j_bar = jbar;
  spec.connectivity.sigma = Eigen::MatrixXd::Constant(2, 2, sigma);
  spec.initial_mean = {0.1, 0.0};
  spec.initial_variance = {0.0, 0.0};
  return spec;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::path(MFNET_TEST_TMP) / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace mfnet::test
