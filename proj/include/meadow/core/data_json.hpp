#pragma once

#include <string>

#include <json.hpp>

#include "meadow/core/data.hpp"

namespace meadow {

/// Reads the `index_spaces`, `index_sets`, `parameters` and `scalars` sections
/// of a data document. Other top-level keys are ignored. Throws DataError with
/// the JSON path of the first problem.
DataBundle parse_data(const nlohmann::json& doc);
DataBundle parse_data_text(const std::string& text);

/// Deterministic document (map order for names, insertion order for entries).
nlohmann::ordered_json emit_data(const DataBundle& data);

}  // namespace meadow
