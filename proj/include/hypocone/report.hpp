#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hypocone/model.hpp"

namespace hypocone {

nlohmann::json vector_json(const Eigen::VectorXd& v);
nlohmann::json matrix_json(const Eigen::MatrixXd& m);  // row-major nested arrays
Eigen::VectorXd parse_vector(const std::string& text);  // "1,0.5,-2"; throws std::invalid_argument

/// Hex SHA-256 of the canonical model JSON.
std::string model_hash(const ModelSpec& model);

/// Envelope shared by every CLI command: provenance fields around a command result.
struct Report {
  std::string command;
  nlohmann::json model;   // {name, hash}
  nlohmann::json params;  // command-line parameters
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  nlohmann::json result;

  nlohmann::json to_json() const;
};

Report make_report(const std::string& command, const ModelSpec& model);
std::string library_version();
int thread_count();

}  // namespace hypocone
