#include "otb/serialize.hpp"

#include <cstdio>
#include <cstdint>

#include "otb/errors.hpp"

namespace otb {

namespace {

using nlohmann::json;

const json& need_key(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) {
    throw ValidationError(where + ": expected an object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(where + ": missing key \"" + key + "\"");
  }
  return *it;
}

double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ValidationError(where + ": expected a number, got " + std::string(j.type_name()));
  }
  return j.get<double>();
}

}  // namespace

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw ValidationError(where + ": expected an array");
  }
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    v(static_cast<int>(i)) = number_at(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(where + ": expected a non-empty array of rows");
  }
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string row_where = where + " row " + std::to_string(i);
    if (!j[i].is_array()) {
      throw ValidationError(row_where + ": expected an array");
    }
    if (j[i].size() != cols) {
      throw ValidationError(row_where + ": has " + std::to_string(j[i].size()) +
                            " entries, expected " + std::to_string(cols));
    }
    for (size_t k = 0; k < cols; ++k) {
      m(static_cast<int>(i), static_cast<int>(k)) =
          number_at(j[i][k], row_where + "[" + std::to_string(k) + "]");
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
  return out;
}

json space_to_json(const FiniteMetricSpace& space) {
  return json{{"labels", space.labels()}, {"dist", matrix_to_json(space.dist())}};
}

SpacePtr space_from_json(const json& j, const std::string& where) {
  const json& jl = need_key(j, "labels", where);
  if (!jl.is_array()) {
    throw ValidationError(where + ".labels: expected an array");
  }
  std::vector<std::string> labels;
  for (size_t i = 0; i < jl.size(); ++i) {
    if (!jl[i].is_string()) {
      throw ValidationError(where + ".labels[" + std::to_string(i) + "]: expected a string");
    }
    labels.push_back(jl[i].get<std::string>());
  }
  Eigen::MatrixXd dist = matrix_from_json(need_key(j, "dist", where), where + ".dist");
  try {
    return std::make_shared<FiniteMetricSpace>(std::move(labels), std::move(dist));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

json distribution_to_json(const DiscreteDistribution& d) {
  return json{{"space", space_to_json(*d.space())}, {"mass", vector_to_json(d.mass())}};
}

DiscreteDistribution distribution_from_json(const json& j, const std::string& where) {
  SpacePtr space = space_from_json(need_key(j, "space", where), where + ".space");
  Eigen::VectorXd mass = vector_from_json(need_key(j, "mass", where), where + ".mass");
  try {
    return DiscreteDistribution(std::move(space), std::move(mass));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

json chain_to_json(const MarkovChain& chain) {
  return json{{"space", space_to_json(*chain.space())},
              {"transition", matrix_to_json(chain.transition())},
              {"initial", vector_to_json(chain.initial().mass())}};
}

std::shared_ptr<const MarkovChain> chain_from_json(const json& j, const std::string& where) {
  SpacePtr space = space_from_json(need_key(j, "space", where), where + ".space");
  Eigen::MatrixXd t = matrix_from_json(need_key(j, "transition", where), where + ".transition");
  Eigen::VectorXd init = vector_from_json(need_key(j, "initial", where), where + ".initial");
  try {
    DiscreteDistribution initial(space, std::move(init));
    return std::make_shared<MarkovChain>(std::move(space), std::move(t), std::move(initial));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

json loss_to_json(const LossTable& loss) {
  return json{{"h_space", space_to_json(*loss.h_space())},
              {"z_space", space_to_json(*loss.z_space())},
              {"values", matrix_to_json(loss.values())}};
}

std::shared_ptr<const LossTable> loss_from_json(const json& j, const std::string& where) {
  SpacePtr h = space_from_json(need_key(j, "h_space", where), where + ".h_space");
  SpacePtr z = space_from_json(need_key(j, "z_space", where), where + ".z_space");
  Eigen::MatrixXd values = matrix_from_json(need_key(j, "values", where), where + ".values");
  try {
    return std::make_shared<LossTable>(std::move(h), std::move(z), std::move(values));
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

std::string json_fingerprint(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

}  // namespace otb
