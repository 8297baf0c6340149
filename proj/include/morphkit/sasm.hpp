// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "morphkit/ir.hpp"

namespace morphkit::sasm {

/// One `.sasm` unit: exactly one class per unit, file name = simple class
/// name + ".sasm".
struct SourceUnit {
  std::string path;
  std::string text;
};

struct ParseError {
  std::string path;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  std::string message;
  std::string token;
};

/// "path:line:col: message [token]".
std::string to_string(const ParseError& err);

struct ParseResult {
  std::optional<ir::Program> program;  // set iff errors is empty
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty(); }
};

/// Parses all units into a Program with the given entry point. Collects every
/// error across all units — lexical, syntactic and whole-program validation —
/// instead of failing fast. On success the program passes ir::validate.
ParseResult parse_program(const std::vector<SourceUnit>& units,
                          const ir::MethodRef& entry);

/// Canonical emission: one instruction per line, single-space separators,
/// labels flush-left with a trailing ':', LF endings. parse(emit(c))
/// structurally equals c, and equal inputs give byte-equal output.
std::string emit_class(const ir::ClassDef& cls);

/// Relative unit path for a class: "La/b/C;" -> "a/b/C.sasm".
std::string unit_path_for(const ir::ClassDef& cls);

/// Parses a "La/A;->name(II)I" ref (an ENTRY or META/PROGRAM line).
std::optional<ir::MethodRef> parse_method_ref_text(std::string_view text);

/// Every class of the program as a unit, in name order (external stubs
/// included, so emitted programs re-parse as themselves).
std::vector<SourceUnit> emit_program_units(const ir::Program& program);

}  // namespace morphkit::sasm
