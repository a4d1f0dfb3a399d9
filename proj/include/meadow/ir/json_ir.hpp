#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "meadow/ir/model.hpp"

namespace meadow::ir {

/// Schema violation in an IR document; `path()` is a JSON pointer.
class IrParseError : public std::runtime_error {
 public:
  IrParseError(std::string path, const std::string& what)
      : std::runtime_error("IR" + path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

SymbolicModel parse_ir(const nlohmann::json& doc);
SymbolicModel parse_ir_text(const std::string& text);

/// Deterministic document. Refuses invalid models with ValidationError.
nlohmann::ordered_json emit_ir(const SymbolicModel& model);
/// `emit_ir(model).dump(2)` plus a trailing newline.
std::string emit_ir_text(const SymbolicModel& model);

}  // namespace meadow::ir
