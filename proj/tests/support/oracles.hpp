// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0
//
// Independent re-implementations of the IR validity rules. These deliberately
// share no code with ir::validate; property tests cross-check the two.

#pragma once

#include "morphkit/ir.hpp"

namespace morphkit::testsupport {

bool oracle_labels_ok(const ir::MethodDef& method);
bool oracle_registers_ok(const ir::MethodDef& method);
bool oracle_returns_ok(const ir::MethodDef& method);
bool oracle_refs_ok(const ir::Program& program);

/// All of the above over every internal method.
bool oracle_program_ok(const ir::Program& program);

}  // namespace morphkit::testsupport
