#pragma once

// Canonical JSON forms of models and QoI records, as embedded in archives and
// written by the CLI. Key order is fixed; doubles are printed in shortest
// round-trip form, so text -> value -> text is the identity.

#include <json.hpp>
#include <string>
#include <string_view>

#include "srs/model.hpp"
#include "srs/qoi.hpp"

namespace srs {

using Json = nlohmann::ordered_json;

Json to_json(const ModelDescriptor& m);
ModelDescriptor model_from_json(const Json& j);

Json to_json(const QoIRecord& q);
QoIRecord qoi_from_json(const Json& j);

/// Parses text, mapping syntax errors to ErrorKind::format.
Json parse_json(std::string_view text);

std::string dump(const Json& j, int indent = -1);

}  // namespace srs
