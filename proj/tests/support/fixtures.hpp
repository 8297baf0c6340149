// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "morphkit/ir.hpp"

namespace morphkit::testsupport {

/// Static entry method named main on class La/A;.
inline ir::MethodDef make_entry(int params, std::uint16_t registers,
                                std::vector<ir::Instruction> body,
                                bool returns_int = true) {
  ir::MethodDef m;
  m.sig.name = "main";
  m.sig.params.assign(params, ir::TypeDesc::make_int());
  m.sig.ret = returns_int ? ir::TypeDesc::make_int() : ir::TypeDesc::make_void();
  m.access.is_public = true;
  m.access.is_static = true;
  m.registers = registers;
  m.body = std::move(body);
  return m;
}

/// One-class program around an entry method.
inline ir::Program wrap_entry(ir::MethodDef entry,
                              std::string class_name = "La/A;") {
  ir::ClassDef cls;
  cls.name = class_name;
  cls.superclass = std::string(ir::kObjectClass);
  ir::MethodSig sig = entry.sig;
  cls.methods.push_back(std::move(entry));
  ir::Program program;
  program.entry = {cls.name, sig};
  program.classes.emplace(cls.name, std::move(cls));
  return program;
}

}  // namespace morphkit::testsupport
