// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "morphkit/ir.hpp"

namespace morphkit::testsupport {

/// Knobs for the random-program generator. Defaults give small, varied
/// programs; `big()` sizes one program for throughput measurements.
struct GenOptions {
  int max_classes = 3;         // internal classes: 1 + below(max_classes)
  int max_helpers = 3;         // static helpers per class
  int max_params = 3;
  int max_stmts = 6;           // entry statements beyond the forced emit
  int max_helper_stmts = 3;    // statements per helper body
  bool allow_objects = true;
  bool allow_virtual = true;
  bool allow_external_stub = true;
  bool allow_loops = true;
  int fixed_classes = 0;  // > 0: exact class count instead of a draw
  int fixed_helpers = 0;  // > 0: exact helpers per class instead of a draw

  static GenOptions big() {
    GenOptions o;
    o.fixed_classes = 25;
    o.fixed_helpers = 40;
    o.max_stmts = 14;
    o.max_helper_stmts = 80;
    return o;
  }
};

/// Seeded, deterministic program generator. Every produced program passes
/// ir::validate, resolves every reference, returns on all paths, keeps loop
/// bounds masked (vm-friendly) and emits at least one observable value.
ir::Program random_program(std::uint64_t seed, const GenOptions& opts = {});

}  // namespace morphkit::testsupport
