// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace morphkit::ir {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

enum class TypeKind { Int, Void, Ref };

/// A value or class type. Ref types carry an internal-form class name
/// ("La/b/C;"); Int and Void carry nothing.
struct TypeDesc {
  TypeKind kind = TypeKind::Int;
  std::string class_name;

  static TypeDesc make_int() { return {TypeKind::Int, {}}; }
  static TypeDesc make_void() { return {TypeKind::Void, {}}; }
  static TypeDesc make_ref(std::string name) {
    return {TypeKind::Ref, std::move(name)};
  }

  bool is_ref() const { return kind == TypeKind::Ref; }
  bool is_int() const { return kind == TypeKind::Int; }
  bool is_void() const { return kind == TypeKind::Void; }

  friend bool operator==(const TypeDesc&, const TypeDesc&) = default;
};

/// True iff `name` matches `L` ident (`/` ident)* `;` with
/// ident = [A-Za-z_$][A-Za-z0-9_$]*.
bool is_valid_class_name(std::string_view name);

/// True for an identifier usable as a method/field/label name.
bool is_valid_identifier(std::string_view name);

/// "I", "V" or the Ref class name.
std::string to_descriptor(const TypeDesc& type);

/// Simple name of an internal-form class name: "La/b/Cd;" -> "Cd".
std::string simple_class_name(std::string_view class_name);

struct MethodSig {
  std::string name;  // identifier, "<init>" or "<clinit>"
  std::vector<TypeDesc> params;
  TypeDesc ret = TypeDesc::make_void();

  bool is_ctor() const { return name == "<init>" || name == "<clinit>"; }

  friend bool operator==(const MethodSig&, const MethodSig&) = default;
  friend auto operator<=>(const MethodSig&, const MethodSig&) = default;
};

/// "name(II)I" form.
std::string to_string(const MethodSig& sig);

struct MethodRef {
  std::string class_name;
  MethodSig sig;

  friend bool operator==(const MethodRef&, const MethodRef&) = default;
  friend auto operator<=>(const MethodRef&, const MethodRef&) = default;
};

/// "La/A;->f(II)I" form.
std::string to_string(const MethodRef& ref);

struct FieldRef {
  std::string class_name;
  std::string field_name;
  TypeDesc type;

  friend bool operator==(const FieldRef&, const FieldRef&) = default;
};

/// "La/A;->f:I" form.
std::string to_string(const FieldRef& ref);

// ---------------------------------------------------------------------------
// Instructions
// ---------------------------------------------------------------------------

enum class Opcode {
  Nop,
  Const,
  ConstString,
  Move,
  AddInt,
  SubInt,
  MulInt,
  AndLit,
  IfEq,
  IfNe,
  IfLt,
  IfGe,
  Goto,
  InvokeStatic,
  InvokeVirtual,
  InvokeDirect,
  MoveResult,
  ReturnVoid,
  Return,
  NewInstance,
  Iget,
  Iput,
  Label,  // pseudo-instruction marking a position
};

const char* mnemonic(Opcode op);

inline bool is_invoke(Opcode op) {
  return op == Opcode::InvokeStatic || op == Opcode::InvokeVirtual ||
         op == Opcode::InvokeDirect;
}
inline bool is_conditional_branch(Opcode op) {
  return op == Opcode::IfEq || op == Opcode::IfNe || op == Opcode::IfLt ||
         op == Opcode::IfGe;
}
/// goto / return / return-void: control never falls through.
inline bool is_unconditional_exit(Opcode op) {
  return op == Opcode::Goto || op == Opcode::Return ||
         op == Opcode::ReturnVoid;
}

using RegIndex = std::uint16_t;

/// One IR instruction. `regs` holds every register operand in syntactic
/// order; for invokes it is the argument list (receiver first for
/// virtual/direct). `text` holds the const-string payload or the label name
/// for branches, goto and label pseudo-instructions.
struct Instruction {
  Opcode op = Opcode::Nop;
  std::vector<RegIndex> regs;
  std::int32_t literal = 0;
  std::string text;
  std::optional<MethodRef> method;
  std::optional<FieldRef> field;
  std::optional<TypeDesc> type;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

// Builders, named after the mnemonics they produce.
namespace ins {
Instruction nop();
Instruction const_i32(RegIndex a, std::int32_t value);
Instruction const_string(RegIndex a, std::string text);
Instruction move(RegIndex a, RegIndex b);
Instruction add_int(RegIndex a, RegIndex b, RegIndex c);
Instruction sub_int(RegIndex a, RegIndex b, RegIndex c);
Instruction mul_int(RegIndex a, RegIndex b, RegIndex c);
Instruction and_lit(RegIndex a, RegIndex b, std::int32_t lit);
Instruction if_eq(RegIndex a, RegIndex b, std::string label);
Instruction if_ne(RegIndex a, RegIndex b, std::string label);
Instruction if_lt(RegIndex a, RegIndex b, std::string label);
Instruction if_ge(RegIndex a, RegIndex b, std::string label);
Instruction go_to(std::string label);
Instruction invoke_static(std::vector<RegIndex> args, MethodRef callee);
Instruction invoke_virtual(std::vector<RegIndex> args, MethodRef callee);
Instruction invoke_direct(std::vector<RegIndex> args, MethodRef callee);
Instruction move_result(RegIndex a);
Instruction return_void();
Instruction return_reg(RegIndex a);
Instruction new_instance(RegIndex a, TypeDesc type);
Instruction iget(RegIndex dst, RegIndex obj, FieldRef field);
Instruction iput(RegIndex src, RegIndex obj, FieldRef field);
Instruction label(std::string name);
}  // namespace ins

// ---------------------------------------------------------------------------
// Definitions
// ---------------------------------------------------------------------------

struct AccessFlags {
  bool is_public = false;
  bool is_private = false;
  bool is_static = false;

  friend bool operator==(const AccessFlags&, const AccessFlags&) = default;
};

/// Parameters live in the highest-numbered registers, `this` first for
/// non-static methods (Dalvik frame convention).
struct MethodDef {
  MethodSig sig;
  AccessFlags access;
  std::uint16_t registers = 0;
  std::vector<Instruction> body;

  /// Top-of-frame slots: declared params plus implicit `this`.
  int param_slots() const {
    return static_cast<int>(sig.params.size()) + (access.is_static ? 0 : 1);
  }
  /// First parameter register (== registers when there are no params).
  int first_param_reg() const { return registers - param_slots(); }

  friend bool operator==(const MethodDef&, const MethodDef&) = default;
};

struct Field {
  std::string name;
  TypeDesc type;

  friend bool operator==(const Field&, const Field&) = default;
};

struct ClassDef {
  std::string name;        // internal form
  std::string superclass;  // internal form; the root rt class supers itself
  std::vector<Field> fields;
  std::vector<MethodDef> methods;
  bool external = false;  // library stub: never emitted into bundles, never morphed

  const MethodDef* find_method(const MethodSig& sig) const;

  friend bool operator==(const ClassDef&, const ClassDef&) = default;
};

/// A whole program: name-keyed classes plus the entry point. The well-known
/// runtime stubs (`Lrt/Object;`, `Lrt/IO;`) resolve implicitly and are not
/// part of `classes` unless a unit declares them.
struct Program {
  std::map<std::string, ClassDef> classes;
  MethodRef entry;

  const ClassDef* find_class(std::string_view name) const;

  friend bool operator==(const Program&, const Program&) = default;
};

/// Built-in external stubs: Lrt/Object; (<init>()V) and Lrt/IO; (emit(I)V).
const std::vector<ClassDef>& runtime_classes();
const ClassDef* find_runtime_class(std::string_view name);

inline constexpr std::string_view kObjectClass = "Lrt/Object;";
inline constexpr std::string_view kIoClass = "Lrt/IO;";

/// Lrt/IO;->emit(I)V, the trace intrinsic.
MethodRef emit_ref();
/// Lrt/Object;-><init>()V.
MethodRef object_init_ref();

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  enum class Kind {
    MissingEntry,
    BadEntrySignature,
    BadClassName,
    BadIdentifier,
    BadSignature,
    TooManyParams,
    DuplicateMethod,
    DuplicateField,
    DuplicateLabel,
    UndefinedLabel,
    RegisterOutOfRange,
    MissingReturn,
    ReturnTypeMismatch,
    DanglingMoveResult,
    MoveResultOfVoid,
    UnknownClass,
    UnknownMethod,
    UnknownField,
    ArityMismatch,
    InvokeKindMismatch,
    ExternalExtendsInternal,
    CyclicInheritance,
    ExternalBody,
  };

  Kind kind;
  std::string where;  // "La/A;", "La/A;->f(I)I", "La/A;->f(I)I @3"
  std::string message;
};

const char* to_string(Violation::Kind kind);

/// Empty iff every IR invariant holds. Violations are data, not failures.
std::vector<Violation> validate(const Program& program);

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

struct Resolution {
  enum class Kind { Internal, External, UnknownClass, UnknownMethod };

  Kind kind = Kind::UnknownClass;
  const ClassDef* cls = nullptr;      // declaring class, when found
  const MethodDef* method = nullptr;  // Internal only

  bool is_internal() const { return kind == Kind::Internal; }
  bool is_external() const { return kind == Kind::External; }
};

/// Walks the superclass chain from the ref's class; the first declaration of
/// the exact signature wins. Declared stubs make this a closed world: a
/// signature declared nowhere on the chain is UnknownMethod.
Resolution resolve_method(const Program& program, const MethodRef& ref);

/// Same walk, starting from an explicit class (vm dynamic dispatch).
Resolution resolve_in_chain(const Program& program, std::string_view class_name,
                            const MethodSig& sig);

// ---------------------------------------------------------------------------
// Register frame surgery
// ---------------------------------------------------------------------------

/// Adds `extra` registers while keeping parameters pinned to the top of the
/// frame: every operand referencing a parameter register is renumbered up by
/// `extra`; registers old_locals .. old_locals+extra-1 come out free.
MethodDef grow_registers(const MethodDef& method, std::uint16_t extra);

}  // namespace morphkit::ir
