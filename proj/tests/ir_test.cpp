// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/ir.hpp"

#include <gtest/gtest.h>

#include "morphkit/vm.hpp"
#include "support/fixtures.hpp"
#include "support/generator.hpp"
#include "support/oracles.hpp"

namespace morphkit {
namespace {

using ir::Opcode;
using ir::TypeDesc;
namespace ins = ir::ins;
using testsupport::make_entry;
using testsupport::wrap_entry;

bool has_violation(const std::vector<ir::Violation>& violations,
                   ir::Violation::Kind kind) {
  for (const ir::Violation& v : violations)
    if (v.kind == kind) return true;
  return false;
}

TEST(Validate, MissingEntryOnExternalOnlyProgram) {
  ir::Program program;
  ir::ClassDef stub;
  stub.name = "Lext/Lib;";
  stub.superclass = std::string(ir::kObjectClass);
  stub.external = true;
  program.classes.emplace(stub.name, stub);
  program.entry = {"Lext/Lib;", {"main", {}, TypeDesc::make_int()}};

  auto violations = ir::validate(program);
  EXPECT_TRUE(has_violation(violations, ir::Violation::Kind::MissingEntry));
}

TEST(Validate, DuplicateLabel) {
  auto program = wrap_entry(make_entry(
      0, 1,
      {ins::label("x"), ins::const_i32(0, 1), ins::label("x"),
       ins::go_to("x"), ins::return_reg(0)}));
  auto violations = ir::validate(program);
  EXPECT_TRUE(has_violation(violations, ir::Violation::Kind::DuplicateLabel));
}

TEST(Validate, UndefinedLabel) {
  auto program =
      wrap_entry(make_entry(0, 1, {ins::go_to("gone"), ins::return_reg(0)}));
  EXPECT_TRUE(has_violation(ir::validate(program),
                            ir::Violation::Kind::UndefinedLabel));
}

TEST(Validate, MissingReturnOnFallOff) {
  auto program = wrap_entry(make_entry(0, 1, {ins::const_i32(0, 1)}));
  EXPECT_TRUE(has_violation(ir::validate(program),
                            ir::Violation::Kind::MissingReturn));
}

TEST(Validate, RegisterOutOfRange) {
  auto program =
      wrap_entry(make_entry(0, 1, {ins::const_i32(5, 1), ins::return_reg(0)}));
  EXPECT_TRUE(has_violation(ir::validate(program),
                            ir::Violation::Kind::RegisterOutOfRange));
}

TEST(Validate, MoreThanSixtyFourParamsRejected) {
  ir::Program program = wrap_entry(
      make_entry(0, 2, {ins::const_i32(0, 1), ins::return_reg(0)}));
  ir::MethodDef wide;
  wide.sig.name = "wide";
  wide.sig.params.assign(65, TypeDesc::make_int());
  wide.sig.ret = TypeDesc::make_void();
  wide.access.is_static = true;
  wide.registers = 70;
  wide.body = {ins::return_void()};
  program.classes.at("La/A;").methods.push_back(std::move(wide));
  EXPECT_TRUE(has_violation(ir::validate(program),
                            ir::Violation::Kind::TooManyParams));
}

TEST(Validate, ConstructorMustReturnVoid) {
  ir::Program program = wrap_entry(
      make_entry(0, 2, {ins::const_i32(0, 1), ins::return_reg(0)}));
  ir::MethodDef bad_init;
  bad_init.sig = {"<init>", {}, TypeDesc::make_int()};
  bad_init.registers = 2;
  bad_init.body = {ins::const_i32(0, 0), ins::return_reg(0)};
  program.classes.at("La/A;").methods.push_back(std::move(bad_init));
  EXPECT_TRUE(has_violation(ir::validate(program),
                            ir::Violation::Kind::BadSignature));
}

TEST(Validate, GeneratedProgramsAreCleanAndOraclesAgree) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    ir::Program program = testsupport::random_program(seed);
    auto violations = ir::validate(program);
    if (!violations.empty())
      FAIL() << "seed " << seed << ": " << violations.front().where << ": "
             << violations.front().message;
    EXPECT_TRUE(testsupport::oracle_program_ok(program)) << "seed " << seed;
  }
}

// Both routes must flag the same targeted corruptions.
TEST(Validate, OracleAgreesOnMutations) {
  ir::Program base = testsupport::random_program(7);
  const std::string entry_cls = base.entry.class_name;

  {
    ir::Program p = base;
    ir::MethodDef& m = p.classes.at(entry_cls).methods.back();
    m.body.insert(m.body.begin(), ins::const_i32(m.registers, 1));
    EXPECT_FALSE(ir::validate(p).empty());
    EXPECT_FALSE(testsupport::oracle_program_ok(p));
  }
  {
    ir::Program p = base;
    ir::MethodDef& m = p.classes.at(entry_cls).methods.back();
    m.body.insert(m.body.begin(), ins::go_to("nowhere"));
    EXPECT_FALSE(ir::validate(p).empty());
    EXPECT_FALSE(testsupport::oracle_program_ok(p));
  }
  {
    ir::Program p = base;
    ir::MethodDef& m = p.classes.at(entry_cls).methods.back();
    while (!m.body.empty() &&
           (m.body.back().op == Opcode::Return ||
            m.body.back().op == Opcode::ReturnVoid))
      m.body.pop_back();
    m.body.push_back(ins::nop());
    EXPECT_FALSE(ir::validate(p).empty());
    EXPECT_FALSE(testsupport::oracle_program_ok(p));
  }
  {
    ir::Program p = base;
    ir::MethodDef& m = p.classes.at(entry_cls).methods.back();
    m.body.insert(m.body.begin(),
                  ins::invoke_static({}, {"Lno/Such;",
                                          {"f", {}, TypeDesc::make_void()}}));
    EXPECT_FALSE(ir::validate(p).empty());
    EXPECT_FALSE(testsupport::oracle_program_ok(p));
  }
}

// ---------------------------------------------------------------------------
// resolve_method
// ---------------------------------------------------------------------------

ir::Program chain_program() {
  // Top <- Middle <- Bottom, target declared on Middle.
  ir::Program program;
  auto add_class = [&](const std::string& name, const std::string& super,
                       bool with_target) {
    ir::ClassDef cls;
    cls.name = name;
    cls.superclass = super;
    ir::MethodDef init;
    init.sig = {"<init>", {}, TypeDesc::make_void()};
    init.access.is_public = true;
    init.registers = 1;
    init.body = {ins::invoke_direct({0}, super == ir::kObjectClass
                                             ? ir::object_init_ref()
                                             : ir::MethodRef{super,
                                                             {"<init>",
                                                              {},
                                                              TypeDesc::make_void()}}),
                 ins::return_void()};
    cls.methods.push_back(std::move(init));
    if (with_target) {
      ir::MethodDef target;
      target.sig = {"target", {}, TypeDesc::make_int()};
      target.access.is_public = true;
      target.registers = 2;
      target.body = {ins::const_i32(0, 5), ins::return_reg(0)};
      cls.methods.push_back(std::move(target));
    }
    program.classes.emplace(name, std::move(cls));
  };
  add_class("Lc/Top;", std::string(ir::kObjectClass), false);
  add_class("Lc/Middle;", "Lc/Top;", true);
  add_class("Lc/Bottom;", "Lc/Middle;", false);

  ir::ClassDef main_cls;
  main_cls.name = "Lc/Main;";
  main_cls.superclass = std::string(ir::kObjectClass);
  ir::MethodDef main = make_entry(0, 1, {ins::const_i32(0, 0),
                                         ins::return_reg(0)});
  main_cls.methods.push_back(main);
  program.classes.emplace(main_cls.name, main_cls);
  program.entry = {"Lc/Main;", main.sig};
  return program;
}

TEST(Resolve, InitOnDeclaringClass) {
  ir::Program program = chain_program();
  ir::Resolution res = ir::resolve_method(
      program, {"Lc/Top;", {"<init>", {}, TypeDesc::make_void()}});
  ASSERT_EQ(res.kind, ir::Resolution::Kind::Internal);
  EXPECT_EQ(res.cls->name, "Lc/Top;");
}

TEST(Resolve, ExternalSuperclassMethod) {
  ir::Program program = chain_program();
  // Declared only on the rt root.
  ir::Resolution res = ir::resolve_method(
      program, {"Lc/Bottom;", {"<init>", {}, TypeDesc::make_void()}});
  EXPECT_EQ(res.kind, ir::Resolution::Kind::Internal);  // Bottom has its own

  ir::Program stubbed = program;
  ir::ClassDef stub;
  stub.name = "Lext/Base;";
  stub.superclass = std::string(ir::kObjectClass);
  stub.external = true;
  ir::MethodDef lib;
  lib.sig = {"lib", {}, TypeDesc::make_void()};
  lib.access.is_public = true;
  stub.methods.push_back(lib);
  stubbed.classes.emplace(stub.name, stub);
  stubbed.classes.at("Lc/Top;").superclass = "Lext/Base;";
  ir::Resolution res2 = ir::resolve_method(
      stubbed, {"Lc/Bottom;", {"lib", {}, TypeDesc::make_void()}});
  EXPECT_EQ(res2.kind, ir::Resolution::Kind::External);
}

TEST(Resolve, ThreeDeepChainHitsMiddle) {
  ir::Program program = chain_program();
  ir::Resolution res = ir::resolve_method(
      program, {"Lc/Bottom;", {"target", {}, TypeDesc::make_int()}});
  ASSERT_EQ(res.kind, ir::Resolution::Kind::Internal);
  EXPECT_EQ(res.cls->name, "Lc/Middle;");
  ASSERT_NE(res.method, nullptr);
  EXPECT_EQ(res.method->sig.name, "target");
}

TEST(Resolve, UnknownClass) {
  ir::Program program = chain_program();
  ir::Resolution res = ir::resolve_method(
      program, {"Lno/Class;", {"f", {}, TypeDesc::make_void()}});
  EXPECT_EQ(res.kind, ir::Resolution::Kind::UnknownClass);
}

// ---------------------------------------------------------------------------
// grow_registers
// ---------------------------------------------------------------------------

TEST(GrowRegisters, ZeroExtraIsIdentity) {
  ir::MethodDef m = make_entry(1, 3, {ins::const_i32(0, 1),
                                      ins::add_int(1, 0, 2),
                                      ins::return_reg(1)});
  EXPECT_EQ(ir::grow_registers(m, 0), m);
}

TEST(GrowRegisters, HandComputedFixture) {
  // registers=3, one param at v2; extra=2 moves the param to v4.
  ir::MethodDef m = make_entry(1, 3,
                               {ins::const_i32(0, 9),
                                ins::add_int(1, 0, 2),
                                ins::mul_int(1, 1, 2),
                                ins::move(0, 1),
                                ins::return_reg(0)});
  ir::MethodDef grown = ir::grow_registers(m, 2);
  EXPECT_EQ(grown.registers, 5);
  std::vector<ir::Instruction> expected = {
      ins::const_i32(0, 9), ins::add_int(1, 0, 4), ins::mul_int(1, 1, 4),
      ins::move(0, 1), ins::return_reg(0)};
  EXPECT_EQ(grown.body, expected);
}

TEST(GrowRegisters, StaticZeroParamsBodyUntouched) {
  ir::MethodDef m = make_entry(0, 2, {ins::const_i32(1, 3),
                                      ins::return_reg(1)});
  ir::MethodDef grown = ir::grow_registers(m, 1);
  EXPECT_EQ(grown.registers, 3);
  EXPECT_EQ(grown.body, m.body);
}

TEST(GrowRegisters, ComposesAdditively) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ir::Program program = testsupport::random_program(seed);
    for (const auto& [name, cls] : program.classes) {
      if (cls.external) continue;
      for (const ir::MethodDef& m : cls.methods)
        EXPECT_EQ(ir::grow_registers(ir::grow_registers(m, 2), 3),
                  ir::grow_registers(m, 5));
    }
  }
}

TEST(GrowRegisters, PreservesVmTraces) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ir::Program program = testsupport::random_program(seed);
    ir::Program grown = program;
    for (auto& [name, cls] : grown.classes) {
      if (cls.external) continue;
      for (ir::MethodDef& m : cls.methods) m = ir::grow_registers(m, 4);
    }
    ASSERT_TRUE(ir::validate(grown).empty());
    auto vectors = vm::default_vectors(program.entry.sig.params.size(), 5);
    vm::EquivalenceResult eq = vm::equivalent(program, grown, vectors);
    EXPECT_TRUE(eq.equivalent) << "seed " << seed;
  }
}

}  // namespace
}  // namespace morphkit
