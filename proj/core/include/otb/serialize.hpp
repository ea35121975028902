#pragma once

#include <json.hpp>
#include <memory>
#include <string>

#include "otb/distribution.hpp"
#include "otb/loss_table.hpp"
#include "otb/markov_chain.hpp"
#include "otb/metric_space.hpp"

namespace otb {

/// JSON layouts:
///   space         {"labels": [...], "dist": [[...], ...]}
///   distribution  {"space": {...}, "mass": [...]}
///   chain         {"space": {...}, "transition": [[...], ...], "initial": [...]}
///   loss          {"h_space": {...}, "z_space": {...}, "values": [[...], ...]}
/// Parsers throw ValidationError with the offending path in the message and
/// re-run full construction-time validation of the target object.

nlohmann::json space_to_json(const FiniteMetricSpace& space);
SpacePtr space_from_json(const nlohmann::json& j, const std::string& where = "space");

nlohmann::json distribution_to_json(const DiscreteDistribution& d);
DiscreteDistribution distribution_from_json(const nlohmann::json& j,
                                            const std::string& where = "distribution");

nlohmann::json chain_to_json(const MarkovChain& chain);
std::shared_ptr<const MarkovChain> chain_from_json(const nlohmann::json& j,
                                                   const std::string& where = "chain");

nlohmann::json loss_to_json(const LossTable& loss);
std::shared_ptr<const LossTable> loss_from_json(const nlohmann::json& j,
                                                const std::string& where = "loss");

/// Low-level helpers shared by the parsers above and the config reader.
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& where);
Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);

/// FNV-1a (64-bit) over the canonical dump of a JSON document, as a
/// 16-hex-digit string. Object keys are stored sorted, so structurally
/// equal documents hash equally.
std::string json_fingerprint(const nlohmann::json& j);

/// Shortest-round-trip style float formatting used by all CSV writers
/// ("%.17g"), so re-running a deterministic pipeline reproduces files
/// byte for byte.
std::string format_double(double v);

}  // namespace otb
