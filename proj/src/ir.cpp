// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/ir.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace morphkit::ir {

namespace {

bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' ||
         c == '$';
}

bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

}  // namespace

bool is_valid_identifier(std::string_view name) {
  if (name.empty() || !is_ident_start(name[0])) return false;
  return std::all_of(name.begin() + 1, name.end(), is_ident_char);
}

bool is_valid_class_name(std::string_view name) {
  if (name.size() < 3 || name.front() != 'L' || name.back() != ';')
    return false;
  std::string_view inner = name.substr(1, name.size() - 2);
  std::size_t start = 0;
  while (true) {
    std::size_t slash = inner.find('/', start);
    std::string_view ident = slash == std::string_view::npos
                                 ? inner.substr(start)
                                 : inner.substr(start, slash - start);
    if (!is_valid_identifier(ident)) return false;
    if (slash == std::string_view::npos) return true;
    start = slash + 1;
  }
}

std::string to_descriptor(const TypeDesc& type) {
  switch (type.kind) {
    case TypeKind::Int:
      return "I";
    case TypeKind::Void:
      return "V";
    case TypeKind::Ref:
      return type.class_name;
  }
  return {};
}

std::string simple_class_name(std::string_view class_name) {
  std::string_view inner = class_name;
  if (inner.size() >= 2 && inner.front() == 'L' && inner.back() == ';')
    inner = inner.substr(1, inner.size() - 2);
  std::size_t slash = inner.rfind('/');
  if (slash != std::string_view::npos) inner = inner.substr(slash + 1);
  return std::string(inner);
}

std::string to_string(const MethodSig& sig) {
  std::string out = sig.name;
  out += '(';
  for (const TypeDesc& p : sig.params) out += to_descriptor(p);
  out += ')';
  out += to_descriptor(sig.ret);
  return out;
}

std::string to_string(const MethodRef& ref) {
  return ref.class_name + "->" + to_string(ref.sig);
}

std::string to_string(const FieldRef& ref) {
  return ref.class_name + "->" + ref.field_name + ":" + to_descriptor(ref.type);
}

const char* mnemonic(Opcode op) {
  switch (op) {
    case Opcode::Nop: return "nop";
    case Opcode::Const: return "const";
    case Opcode::ConstString: return "const-string";
    case Opcode::Move: return "move";
    case Opcode::AddInt: return "add-int";
    case Opcode::SubInt: return "sub-int";
    case Opcode::MulInt: return "mul-int";
    case Opcode::AndLit: return "and-lit";
    case Opcode::IfEq: return "if-eq";
    case Opcode::IfNe: return "if-ne";
    case Opcode::IfLt: return "if-lt";
    case Opcode::IfGe: return "if-ge";
    case Opcode::Goto: return "goto";
    case Opcode::InvokeStatic: return "invoke-static";
    case Opcode::InvokeVirtual: return "invoke-virtual";
    case Opcode::InvokeDirect: return "invoke-direct";
    case Opcode::MoveResult: return "move-result";
    case Opcode::ReturnVoid: return "return-void";
    case Opcode::Return: return "return";
    case Opcode::NewInstance: return "new-instance";
    case Opcode::Iget: return "iget";
    case Opcode::Iput: return "iput";
    case Opcode::Label: return "label";
  }
  return "?";
}

namespace ins {

Instruction nop() { return {}; }

Instruction const_i32(RegIndex a, std::int32_t value) {
  Instruction i;
  i.op = Opcode::Const;
  i.regs = {a};
  i.literal = value;
  return i;
}

Instruction const_string(RegIndex a, std::string text) {
  Instruction i;
  i.op = Opcode::ConstString;
  i.regs = {a};
  i.text = std::move(text);
  return i;
}

Instruction move(RegIndex a, RegIndex b) {
  Instruction i;
  i.op = Opcode::Move;
  i.regs = {a, b};
  return i;
}

namespace {
Instruction arith(Opcode op, RegIndex a, RegIndex b, RegIndex c) {
  Instruction i;
  i.op = op;
  i.regs = {a, b, c};
  return i;
}
Instruction branch(Opcode op, RegIndex a, RegIndex b, std::string label) {
  Instruction i;
  i.op = op;
  i.regs = {a, b};
  i.text = std::move(label);
  return i;
}
Instruction invoke(Opcode op, std::vector<RegIndex> args, MethodRef callee) {
  Instruction i;
  i.op = op;
  i.regs = std::move(args);
  i.method = std::move(callee);
  return i;
}
}  // namespace

Instruction add_int(RegIndex a, RegIndex b, RegIndex c) {
  return arith(Opcode::AddInt, a, b, c);
}
Instruction sub_int(RegIndex a, RegIndex b, RegIndex c) {
  return arith(Opcode::SubInt, a, b, c);
}
Instruction mul_int(RegIndex a, RegIndex b, RegIndex c) {
  return arith(Opcode::MulInt, a, b, c);
}

Instruction and_lit(RegIndex a, RegIndex b, std::int32_t lit) {
  Instruction i;
  i.op = Opcode::AndLit;
  i.regs = {a, b};
  i.literal = lit;
  return i;
}

Instruction if_eq(RegIndex a, RegIndex b, std::string label) {
  return branch(Opcode::IfEq, a, b, std::move(label));
}
Instruction if_ne(RegIndex a, RegIndex b, std::string label) {
  return branch(Opcode::IfNe, a, b, std::move(label));
}
Instruction if_lt(RegIndex a, RegIndex b, std::string label) {
  return branch(Opcode::IfLt, a, b, std::move(label));
}
Instruction if_ge(RegIndex a, RegIndex b, std::string label) {
  return branch(Opcode::IfGe, a, b, std::move(label));
}

Instruction go_to(std::string label) {
  Instruction i;
  i.op = Opcode::Goto;
  i.text = std::move(label);
  return i;
}

Instruction invoke_static(std::vector<RegIndex> args, MethodRef callee) {
  return invoke(Opcode::InvokeStatic, std::move(args), std::move(callee));
}
Instruction invoke_virtual(std::vector<RegIndex> args, MethodRef callee) {
  return invoke(Opcode::InvokeVirtual, std::move(args), std::move(callee));
}
Instruction invoke_direct(std::vector<RegIndex> args, MethodRef callee) {
  return invoke(Opcode::InvokeDirect, std::move(args), std::move(callee));
}

Instruction move_result(RegIndex a) {
  Instruction i;
  i.op = Opcode::MoveResult;
  i.regs = {a};
  return i;
}

Instruction return_void() {
  Instruction i;
  i.op = Opcode::ReturnVoid;
  return i;
}

Instruction return_reg(RegIndex a) {
  Instruction i;
  i.op = Opcode::Return;
  i.regs = {a};
  return i;
}

Instruction new_instance(RegIndex a, TypeDesc type) {
  Instruction i;
  i.op = Opcode::NewInstance;
  i.regs = {a};
  i.type = std::move(type);
  return i;
}

Instruction iget(RegIndex dst, RegIndex obj, FieldRef field) {
  Instruction i;
  i.op = Opcode::Iget;
  i.regs = {dst, obj};
  i.field = std::move(field);
  return i;
}

Instruction iput(RegIndex src, RegIndex obj, FieldRef field) {
  Instruction i;
  i.op = Opcode::Iput;
  i.regs = {src, obj};
  i.field = std::move(field);
  return i;
}

Instruction label(std::string name) {
  Instruction i;
  i.op = Opcode::Label;
  i.text = std::move(name);
  return i;
}

}  // namespace ins

const MethodDef* ClassDef::find_method(const MethodSig& sig) const {
  for (const MethodDef& m : methods)
    if (m.sig == sig) return &m;
  return nullptr;
}

const ClassDef* Program::find_class(std::string_view name) const {
  auto it = classes.find(std::string(name));
  if (it != classes.end()) return &it->second;
  return find_runtime_class(name);
}

const std::vector<ClassDef>& runtime_classes() {
  static const std::vector<ClassDef> rt = [] {
    std::vector<ClassDef> classes;

    ClassDef object;
    object.name = std::string(kObjectClass);
    object.superclass = std::string(kObjectClass);  // root
    object.external = true;
    MethodDef init;
    init.sig = {"<init>", {}, TypeDesc::make_void()};
    init.access.is_public = true;
    object.methods.push_back(std::move(init));
    classes.push_back(std::move(object));

    ClassDef io;
    io.name = std::string(kIoClass);
    io.superclass = std::string(kObjectClass);
    io.external = true;
    MethodDef emit;
    emit.sig = {"emit", {TypeDesc::make_int()}, TypeDesc::make_void()};
    emit.access.is_public = true;
    emit.access.is_static = true;
    io.methods.push_back(std::move(emit));
    classes.push_back(std::move(io));

    return classes;
  }();
  return rt;
}

const ClassDef* find_runtime_class(std::string_view name) {
  for (const ClassDef& c : runtime_classes())
    if (c.name == name) return &c;
  return nullptr;
}

MethodRef emit_ref() {
  return {std::string(kIoClass),
          {"emit", {TypeDesc::make_int()}, TypeDesc::make_void()}};
}

MethodRef object_init_ref() {
  return {std::string(kObjectClass), {"<init>", {}, TypeDesc::make_void()}};
}

const char* to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::MissingEntry: return "MissingEntry";
    case Violation::Kind::BadEntrySignature: return "BadEntrySignature";
    case Violation::Kind::BadClassName: return "BadClassName";
    case Violation::Kind::BadIdentifier: return "BadIdentifier";
    case Violation::Kind::BadSignature: return "BadSignature";
    case Violation::Kind::TooManyParams: return "TooManyParams";
    case Violation::Kind::DuplicateMethod: return "DuplicateMethod";
    case Violation::Kind::DuplicateField: return "DuplicateField";
    case Violation::Kind::DuplicateLabel: return "DuplicateLabel";
    case Violation::Kind::UndefinedLabel: return "UndefinedLabel";
    case Violation::Kind::RegisterOutOfRange: return "RegisterOutOfRange";
    case Violation::Kind::MissingReturn: return "MissingReturn";
    case Violation::Kind::ReturnTypeMismatch: return "ReturnTypeMismatch";
    case Violation::Kind::DanglingMoveResult: return "DanglingMoveResult";
    case Violation::Kind::MoveResultOfVoid: return "MoveResultOfVoid";
    case Violation::Kind::UnknownClass: return "UnknownClass";
    case Violation::Kind::UnknownMethod: return "UnknownMethod";
    case Violation::Kind::UnknownField: return "UnknownField";
    case Violation::Kind::ArityMismatch: return "ArityMismatch";
    case Violation::Kind::InvokeKindMismatch: return "InvokeKindMismatch";
    case Violation::Kind::ExternalExtendsInternal:
      return "ExternalExtendsInternal";
    case Violation::Kind::CyclicInheritance: return "CyclicInheritance";
    case Violation::Kind::ExternalBody: return "ExternalBody";
  }
  return "?";
}

namespace {

class Validator {
 public:
  explicit Validator(const Program& program) : program_(program) {}

  std::vector<Violation> run() {
    for (const auto& [name, cls] : program_.classes) check_class(cls);
    check_entry();
    return std::move(violations_);
  }

 private:
  void add(Violation::Kind kind, std::string where, std::string message) {
    violations_.push_back({kind, std::move(where), std::move(message)});
  }

  void check_type(const TypeDesc& type, const std::string& where) {
    if (!type.is_ref()) return;
    if (!is_valid_class_name(type.class_name)) {
      add(Violation::Kind::BadClassName, where,
          "malformed class name '" + type.class_name + "'");
      return;
    }
    if (!program_.find_class(type.class_name))
      add(Violation::Kind::UnknownClass, where,
          "unresolved class '" + type.class_name + "'");
  }

  bool on_cycle(const ClassDef& cls) {
    // Walk the super chain with a visited set; the rt root supers itself.
    std::set<std::string_view> seen;
    const ClassDef* cur = &cls;
    while (cur) {
      if (cur->superclass == cur->name) return false;  // root
      if (!seen.insert(cur->name).second) return true;
      cur = program_.find_class(cur->superclass);
    }
    return false;  // chain leaves the known world; reported elsewhere
  }

  void check_class(const ClassDef& cls) {
    const std::string& where = cls.name;
    if (!is_valid_class_name(cls.name))
      add(Violation::Kind::BadClassName, where, "malformed class name");
    if (!is_valid_class_name(cls.superclass)) {
      add(Violation::Kind::BadClassName, where,
          "malformed superclass name '" + cls.superclass + "'");
    } else if (cls.superclass != cls.name) {
      const ClassDef* super = program_.find_class(cls.superclass);
      if (!super)
        add(Violation::Kind::UnknownClass, where,
            "unresolved superclass '" + cls.superclass + "'");
      else if (cls.external && !super->external)
        add(Violation::Kind::ExternalExtendsInternal, where,
            "external stub extends internal class '" + cls.superclass + "'");
    }
    if (on_cycle(cls)) {
      add(Violation::Kind::CyclicInheritance, where,
          "superclass chain loops back to '" + cls.name + "'");
      return;  // chain walks below would not terminate meaningfully
    }

    std::set<std::string> field_names;
    for (const Field& f : cls.fields) {
      if (!is_valid_identifier(f.name))
        add(Violation::Kind::BadIdentifier, where,
            "malformed field name '" + f.name + "'");
      if (!field_names.insert(f.name).second)
        add(Violation::Kind::DuplicateField, where,
            "field '" + f.name + "' declared twice");
      check_type(f.type, where + "->" + f.name);
    }

    std::set<std::string> sigs;
    for (const MethodDef& m : cls.methods) {
      std::string mwhere = where + "->" + to_string(m.sig);
      if (!sigs.insert(to_string(m.sig)).second)
        add(Violation::Kind::DuplicateMethod, where,
            "method '" + to_string(m.sig) + "' declared twice");
      check_method(cls, m, mwhere);
    }
  }

  void check_sig(const MethodSig& sig, const std::string& where) {
    if (sig.name != "<init>" && sig.name != "<clinit>" &&
        !is_valid_identifier(sig.name))
      add(Violation::Kind::BadIdentifier, where, "malformed method name");
    if (sig.is_ctor() && !sig.ret.is_void())
      add(Violation::Kind::BadSignature, where,
          "constructor must return void");
    if (sig.params.size() > 64)
      add(Violation::Kind::TooManyParams, where, "more than 64 parameters");
    for (const TypeDesc& p : sig.params) {
      if (p.is_void())
        add(Violation::Kind::BadSignature, where, "void parameter");
      check_type(p, where);
    }
    check_type(sig.ret, where);
  }

  void check_method(const ClassDef& cls, const MethodDef& m,
                    const std::string& where) {
    check_sig(m.sig, where);

    if (cls.external) {
      if (!m.body.empty())
        add(Violation::Kind::ExternalBody, where,
            "external stub method has a body");
      return;
    }

    if (m.param_slots() > m.registers)
      add(Violation::Kind::RegisterOutOfRange, where,
          "fewer registers than parameter slots");

    // Label table: defined exactly once.
    std::unordered_map<std::string, int> labels;
    for (std::size_t i = 0; i < m.body.size(); ++i) {
      const Instruction& in = m.body[i];
      if (in.op != Opcode::Label) continue;
      auto [it, fresh] = labels.emplace(in.text, static_cast<int>(i));
      if (!fresh)
        add(Violation::Kind::DuplicateLabel, where + " @" + std::to_string(i),
            "label '" + in.text + "' defined twice");
    }

    for (std::size_t i = 0; i < m.body.size(); ++i)
      check_instruction(m, m.body[i], i, labels, where);

    check_returns(m, labels, where);
  }

  void check_instruction(const MethodDef& m, const Instruction& in,
                         std::size_t index,
                         const std::unordered_map<std::string, int>& labels,
                         const std::string& mwhere) {
    std::string where = mwhere + " @" + std::to_string(index);

    for (RegIndex r : in.regs)
      if (r >= m.registers) {
        add(Violation::Kind::RegisterOutOfRange, where,
            "register v" + std::to_string(r) + " out of range");
        break;
      }

    if (is_conditional_branch(in.op) || in.op == Opcode::Goto) {
      if (!labels.count(in.text))
        add(Violation::Kind::UndefinedLabel, where,
            "branch to undefined label ':" + in.text + "'");
    }

    if (in.op == Opcode::MoveResult) {
      if (index == 0 || !is_invoke(m.body[index - 1].op)) {
        add(Violation::Kind::DanglingMoveResult, where,
            "move-result not immediately after an invoke");
      } else if (m.body[index - 1].method &&
                 m.body[index - 1].method->sig.ret.is_void()) {
        add(Violation::Kind::MoveResultOfVoid, where,
            "move-result after a void call");
      }
    }

    if (in.op == Opcode::NewInstance) {
      if (!in.type || !in.type->is_ref())
        add(Violation::Kind::BadSignature, where,
            "new-instance needs a class type");
      else
        check_type(*in.type, where);
    }

    if (in.op == Opcode::Iget || in.op == Opcode::Iput) {
      if (!in.field) {
        add(Violation::Kind::BadSignature, where, "missing field ref");
      } else {
        const ClassDef* cls = program_.find_class(in.field->class_name);
        if (!cls) {
          add(Violation::Kind::UnknownClass, where,
              "unresolved class '" + in.field->class_name + "'");
        } else if (!cls->external) {
          bool found = false;
          for (const Field& f : cls->fields)
            if (f.name == in.field->field_name && f.type == in.field->type)
              found = true;
          if (!found)
            add(Violation::Kind::UnknownField, where,
                "unresolved field '" + to_string(*in.field) + "'");
        }
        check_type(in.field->type, where);
      }
    }

    if (is_invoke(in.op)) {
      if (!in.method) {
        add(Violation::Kind::BadSignature, where, "missing method ref");
        return;
      }
      const MethodRef& ref = *in.method;
      check_sig(ref.sig, where);
      if (!is_valid_class_name(ref.class_name)) {
        add(Violation::Kind::BadClassName, where,
            "malformed class name '" + ref.class_name + "'");
        return;
      }
      int receiver = in.op == Opcode::InvokeStatic ? 0 : 1;
      if (in.regs.size() != ref.sig.params.size() + receiver)
        add(Violation::Kind::ArityMismatch, where,
            "argument count does not match signature");
      Resolution res = resolve_method(program_, ref);
      switch (res.kind) {
        case Resolution::Kind::UnknownClass:
          add(Violation::Kind::UnknownClass, where,
              "unresolved class '" + ref.class_name + "'");
          return;
        case Resolution::Kind::UnknownMethod:
          add(Violation::Kind::UnknownMethod, where,
              "unresolved method '" + to_string(ref) + "'");
          return;
        default:
          break;
      }
      const MethodDef* target =
          res.cls ? res.cls->find_method(ref.sig) : nullptr;
      if (target) {
        bool want_static = in.op == Opcode::InvokeStatic;
        if (target->access.is_static != want_static)
          add(Violation::Kind::InvokeKindMismatch, where,
              want_static ? "invoke-static on a non-static method"
                          : "instance invoke on a static method");
      }
    }
  }

  // Every reachable path must end in return/return-void, and returns must
  // match the declared return type.
  void check_returns(const MethodDef& m,
                     const std::unordered_map<std::string, int>& labels,
                     const std::string& where) {
    if (m.body.empty()) {
      add(Violation::Kind::MissingReturn, where, "empty body");
      return;
    }

    std::vector<bool> reachable(m.body.size(), false);
    std::vector<std::size_t> work{0};
    bool falls_off = false;
    while (!work.empty()) {
      std::size_t i = work.back();
      work.pop_back();
      if (i >= m.body.size()) {
        falls_off = true;
        continue;
      }
      if (reachable[i]) continue;
      reachable[i] = true;
      const Instruction& in = m.body[i];
      if (in.op == Opcode::Return || in.op == Opcode::ReturnVoid) continue;
      if (in.op == Opcode::Goto || is_conditional_branch(in.op)) {
        auto it = labels.find(in.text);
        if (it != labels.end())
          work.push_back(static_cast<std::size_t>(it->second));
        if (in.op == Opcode::Goto) continue;
      }
      work.push_back(i + 1);
    }
    if (falls_off)
      add(Violation::Kind::MissingReturn, where,
          "a reachable path falls off the end of the body");

    for (std::size_t i = 0; i < m.body.size(); ++i) {
      if (!reachable[i]) continue;
      const Instruction& in = m.body[i];
      if (in.op == Opcode::Return && m.sig.ret.is_void())
        add(Violation::Kind::ReturnTypeMismatch, where + " @" + std::to_string(i),
            "value return in a void method");
      if (in.op == Opcode::ReturnVoid && !m.sig.ret.is_void())
        add(Violation::Kind::ReturnTypeMismatch, where + " @" + std::to_string(i),
            "void return in a value method");
    }
  }

  void check_entry() {
    const ClassDef* cls = program_.find_class(program_.entry.class_name);
    const MethodDef* m = cls ? cls->find_method(program_.entry.sig) : nullptr;
    if (!cls || cls->external || !m) {
      add(Violation::Kind::MissingEntry, to_string(program_.entry),
          "entry does not resolve to an internal method");
      return;
    }
    bool ok = m->access.is_static &&
              (m->sig.ret.is_int() || m->sig.ret.is_void());
    for (const TypeDesc& p : m->sig.params)
      if (!p.is_int()) ok = false;
    if (!ok)
      add(Violation::Kind::BadEntrySignature, to_string(program_.entry),
          "entry must be static with int params and int/void return");
  }

  const Program& program_;
  std::vector<Violation> violations_;
};

}  // namespace

std::vector<Violation> validate(const Program& program) {
  return Validator(program).run();
}

Resolution resolve_in_chain(const Program& program, std::string_view class_name,
                            const MethodSig& sig) {
  const ClassDef* cur = program.find_class(class_name);
  if (!cur) return {Resolution::Kind::UnknownClass, nullptr, nullptr};
  std::set<std::string_view> seen;
  while (cur) {
    if (const MethodDef* m = cur->find_method(sig)) {
      if (cur->external) return {Resolution::Kind::External, cur, nullptr};
      return {Resolution::Kind::Internal, cur, m};
    }
    if (cur->superclass == cur->name) break;  // root
    if (!seen.insert(cur->name).second) break;
    cur = program.find_class(cur->superclass);
  }
  return {Resolution::Kind::UnknownMethod, nullptr, nullptr};
}

Resolution resolve_method(const Program& program, const MethodRef& ref) {
  return resolve_in_chain(program, ref.class_name, ref.sig);
}

MethodDef grow_registers(const MethodDef& method, std::uint16_t extra) {
  if (extra == 0) return method;
  int total = method.registers + extra;
  if (total > 0xFFFF)
    throw std::invalid_argument("grow_registers: register file overflow");

  MethodDef out = method;
  out.registers = static_cast<std::uint16_t>(total);
  int threshold = method.first_param_reg();
  for (Instruction& in : out.body)
    for (RegIndex& r : in.regs)
      if (r >= threshold) r = static_cast<RegIndex>(r + extra);
  return out;
}

}  // namespace morphkit::ir
