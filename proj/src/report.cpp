#include "hypocone/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <omp.h>
#include <openssl/evp.h>

namespace hypocone {

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + item + "' in '" + text + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument("not a number: '" + item + "' in '" + text + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty vector");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string model_hash(const ModelSpec& model) {
  const std::string text = model_to_json(model).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

std::string library_version() { return HYPOCONE_VERSION; }

int thread_count() { return omp_get_max_threads(); }

nlohmann::json Report::to_json() const {
  return {{"command", command},   {"version", library_version()}, {"model", model},
          {"params", params},     {"seed", seed},                  {"threads", thread_count()},
          {"wall_time_s", wall_time_s}, {"result", result}};
}

Report make_report(const std::string& command, const ModelSpec& model) {
  Report r;
  r.command = command;
  r.model = {{"name", model.name}, {"d", model.d}, {"r", model.r()}, {"hash", model_hash(model)}};
  r.params = nlohmann::json::object();
  return r;
}

}  // namespace hypocone
