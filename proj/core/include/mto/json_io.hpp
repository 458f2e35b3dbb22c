#pragma once

#include <string>

#include <json.hpp>

#include "mto/channels.hpp"

namespace mto {

// Parses a JSON document from a file.  Throws ConfigError when the file is
// missing or the contents are not valid JSON.
nlohmann::json load_json_file(const std::string& path);

// Builds a channel from its JSON description.  The document must carry a
// "family" tag ("discrete", "gaussian", "parallel", "fading" or "collision");
// unknown keys and malformed entries raise ConfigError.  Matrices are
// row-major nested arrays and complex scalars are two-element [re, im]
// arrays.  The returned channel has already passed validate().
Channel channel_from_json(const nlohmann::json& doc);

// Convenience wrapper: load_json_file followed by channel_from_json.
Channel load_channel(const std::string& path);

// Serialises a channel back to the same schema accepted by
// channel_from_json.  Collision channels round-trip as their expanded
// discrete form.
nlohmann::json channel_to_json(const Channel& ch);

// Report building blocks shared by the CLI writers.
nlohmann::json pmf_to_json(const Pmf& p);  // {"labels": [...], "probs": [...]}
nlohmann::json complex_matrix_json(const Eigen::MatrixXcd& m);

}  // namespace mto
