// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/vm.hpp"

#include <set>
#include <stdexcept>
#include <unordered_map>

#include "morphkit/prng.hpp"

namespace morphkit::vm {

using ir::Instruction;
using ir::Opcode;

namespace {

constexpr std::size_t kMaxFrames = 10'000;

struct Value {
  enum class Kind { Int, Null, Obj, Str };
  Kind kind = Kind::Int;
  std::int32_t i = 0;
  std::size_t obj = 0;
  std::string str;

  static Value of_int(std::int32_t v) { return {Kind::Int, v, 0, {}}; }
  static Value null() { return {Kind::Null, 0, 0, {}}; }
  static Value of_obj(std::size_t h) { return {Kind::Obj, 0, h, {}}; }
  static Value of_str(std::string s) {
    return {Kind::Str, 0, 0, std::move(s)};
  }
};

struct Object {
  std::string cls;
  std::map<std::string, Value> fields;  // keyed "La/A;->name"
};

struct Frame {
  const ir::ClassDef* cls = nullptr;
  const ir::MethodDef* method = nullptr;
  std::vector<Value> regs;
  std::size_t pc = 0;
};

struct VmAbort {
  VmErrorKind kind;
};

class Interpreter {
 public:
  Interpreter(const ir::Program& program, std::uint64_t budget,
              BranchCounters* counters)
      : program_(program), budget_(budget), counters_(counters) {}

  RunResult run(const std::vector<std::int32_t>& args) {
    const ir::ClassDef* cls = program_.find_class(program_.entry.class_name);
    const ir::MethodDef* entry =
        cls ? cls->find_method(program_.entry.sig) : nullptr;
    if (!entry || !entry->access.is_static)
      throw std::invalid_argument("vm: entry does not resolve");
    if (args.size() != entry->sig.params.size())
      throw std::invalid_argument("vm: argument arity mismatch");

    std::vector<Value> values;
    values.reserve(args.size());
    for (std::int32_t a : args) values.push_back(Value::of_int(a));
    push_frame(cls, entry, values);

    RunResult result;
    try {
      result.trace.result = loop();
    } catch (const VmAbort& abort) {
      result.error = abort.kind;
    }
    result.trace.emitted = std::move(emitted_);
    result.trace.steps = steps_;
    return result;
  }

 private:
  [[noreturn]] void abort(VmErrorKind kind) { throw VmAbort{kind}; }

  const std::unordered_map<std::string, std::size_t>& labels_of(
      const ir::MethodDef* m) {
    auto it = label_cache_.find(m);
    if (it != label_cache_.end()) return it->second;
    std::unordered_map<std::string, std::size_t> table;
    for (std::size_t i = 0; i < m->body.size(); ++i)
      if (m->body[i].op == Opcode::Label) table.emplace(m->body[i].text, i);
    return label_cache_.emplace(m, std::move(table)).first->second;
  }

  void push_frame(const ir::ClassDef* cls, const ir::MethodDef* m,
                  const std::vector<Value>& args) {
    if (frames_.size() >= kMaxFrames) abort(VmErrorKind::StackOverflow);
    Frame f;
    f.cls = cls;
    f.method = m;
    f.regs.assign(m->registers, Value::of_int(0));  // uninit locals read as 0
    std::size_t base = m->registers - args.size();
    for (std::size_t i = 0; i < args.size(); ++i) f.regs[base + i] = args[i];
    frames_.push_back(std::move(f));
  }

  std::int32_t as_int(const Value& v) {
    if (v.kind != Value::Kind::Int) abort(VmErrorKind::BadOperand);
    return v.i;
  }

  void charge() {
    if (steps_ >= budget_) abort(VmErrorKind::BudgetExceeded);
    ++steps_;
  }

  void branch_to(Frame& f, const std::string& label) {
    const auto& table = labels_of(f.method);
    auto it = table.find(label);
    if (it == table.end())
      throw std::logic_error("vm: branch to undefined label");
    f.pc = it->second;  // the label itself is free to step over
  }

  bool values_equal(const Value& a, const Value& b) {
    bool a_ref = a.kind == Value::Kind::Null || a.kind == Value::Kind::Obj;
    bool b_ref = b.kind == Value::Kind::Null || b.kind == Value::Kind::Obj;
    if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int)
      return a.i == b.i;
    if (a_ref && b_ref) {
      if (a.kind != b.kind) return false;
      return a.kind == Value::Kind::Null || a.obj == b.obj;
    }
    abort(VmErrorKind::BadOperand);
  }

  Object& deref(const Value& v) {
    if (v.kind == Value::Kind::Null) abort(VmErrorKind::NullDeref);
    if (v.kind != Value::Kind::Obj) abort(VmErrorKind::BadOperand);
    return heap_[v.obj];
  }

  void invoke(Frame& frame, const Instruction& in) {
    const ir::MethodRef& ref = *in.method;
    std::vector<Value> args;
    args.reserve(in.regs.size());
    for (ir::RegIndex r : in.regs) args.push_back(frame.regs[r]);

    std::string_view dispatch_class = ref.class_name;
    if (in.op == Opcode::InvokeVirtual) {
      if (args.empty()) throw std::logic_error("vm: virtual call without receiver");
      Object& receiver = deref(args[0]);
      dispatch_class = receiver.cls;
    } else if (in.op == Opcode::InvokeDirect) {
      if (args.empty()) throw std::logic_error("vm: direct call without receiver");
      deref(args[0]);  // null check
    }

    ir::Resolution res = ir::resolve_in_chain(program_, dispatch_class, ref.sig);
    switch (res.kind) {
      case ir::Resolution::Kind::Internal:
        frame.pc++;  // resume after the invoke
        push_frame(res.cls, res.method, args);
        return;
      case ir::Resolution::Kind::External:
        call_external(ref, args);
        frame.pc++;
        return;
      default:
        throw std::logic_error("vm: unresolved call in validated program");
    }
  }

  void call_external(const ir::MethodRef& ref, const std::vector<Value>& args) {
    last_result_.reset();
    if (ref == ir::emit_ref()) {
      emitted_.push_back(as_int(args.at(0)));
      return;
    }
    if (ref == ir::object_init_ref()) return;  // no-op
    abort(VmErrorKind::UnknownExternal);
  }

  std::optional<std::int32_t> loop() {
    while (true) {
      Frame& f = frames_.back();
      if (f.pc >= f.method->body.size())
        throw std::logic_error("vm: fell off method end");
      const Instruction& in = f.method->body[f.pc];

      if (in.op == Opcode::Label) {  // pseudo-instruction, costs nothing
        ++f.pc;
        continue;
      }
      charge();

      switch (in.op) {
        case Opcode::Nop:
          ++f.pc;
          break;
        case Opcode::Const:
          f.regs[in.regs[0]] = Value::of_int(in.literal);
          ++f.pc;
          break;
        case Opcode::ConstString:
          f.regs[in.regs[0]] = Value::of_str(in.text);
          ++f.pc;
          break;
        case Opcode::Move:
          f.regs[in.regs[0]] = f.regs[in.regs[1]];
          ++f.pc;
          break;
        case Opcode::AddInt:
        case Opcode::SubInt:
        case Opcode::MulInt: {
          std::uint32_t b = static_cast<std::uint32_t>(as_int(f.regs[in.regs[1]]));
          std::uint32_t c = static_cast<std::uint32_t>(as_int(f.regs[in.regs[2]]));
          std::uint32_t r = in.op == Opcode::AddInt   ? b + c
                            : in.op == Opcode::SubInt ? b - c
                                                      : b * c;
          f.regs[in.regs[0]] = Value::of_int(static_cast<std::int32_t>(r));
          ++f.pc;
          break;
        }
        case Opcode::AndLit: {
          std::int32_t b = as_int(f.regs[in.regs[1]]);
          f.regs[in.regs[0]] = Value::of_int(b & in.literal);
          ++f.pc;
          break;
        }
        case Opcode::IfEq:
        case Opcode::IfNe: {
          bool eq = values_equal(f.regs[in.regs[0]], f.regs[in.regs[1]]);
          bool taken = in.op == Opcode::IfEq ? eq : !eq;
          count_branch(f, taken);
          if (taken)
            branch_to(f, in.text);
          else
            ++f.pc;
          break;
        }
        case Opcode::IfLt:
        case Opcode::IfGe: {
          std::int32_t a = as_int(f.regs[in.regs[0]]);
          std::int32_t b = as_int(f.regs[in.regs[1]]);
          bool taken = in.op == Opcode::IfLt ? a < b : a >= b;
          count_branch(f, taken);
          if (taken)
            branch_to(f, in.text);
          else
            ++f.pc;
          break;
        }
        case Opcode::Goto:
          branch_to(f, in.text);
          break;
        case Opcode::InvokeStatic:
        case Opcode::InvokeVirtual:
        case Opcode::InvokeDirect:
          invoke(f, in);
          break;
        case Opcode::MoveResult:
          if (!last_result_)
            throw std::logic_error("vm: move-result without pending result");
          f.regs[in.regs[0]] = *last_result_;
          last_result_.reset();
          ++f.pc;
          break;
        case Opcode::ReturnVoid:
          last_result_.reset();
          frames_.pop_back();
          if (frames_.empty()) return std::nullopt;
          break;
        case Opcode::Return: {
          Value v = f.regs[in.regs[0]];
          frames_.pop_back();
          if (frames_.empty()) return as_int(v);
          last_result_ = std::move(v);
          break;
        }
        case Opcode::NewInstance: {
          heap_.push_back(Object{in.type->class_name, {}});
          Value obj = Value::of_obj(heap_.size() - 1);
          init_fields(heap_.back());
          f.regs[in.regs[0]] = obj;
          ++f.pc;
          break;
        }
        case Opcode::Iget: {
          Object& obj = deref(f.regs[in.regs[1]]);
          f.regs[in.regs[0]] = field_of(obj, *in.field);
          ++f.pc;
          break;
        }
        case Opcode::Iput: {
          Object& obj = deref(f.regs[in.regs[1]]);
          obj.fields[field_key(*in.field)] = f.regs[in.regs[0]];
          ++f.pc;
          break;
        }
        case Opcode::Label:
          break;  // handled above
      }
    }
  }

  static std::string field_key(const ir::FieldRef& ref) {
    return ref.class_name + "->" + ref.field_name;
  }

  // Declared fields start at 0 / null per their type.
  void init_fields(Object& obj) {
    std::set<std::string_view> seen;
    const ir::ClassDef* cur = program_.find_class(obj.cls);
    while (cur && seen.insert(cur->name).second) {
      for (const ir::Field& field : cur->fields) {
        Value v = field.type.is_ref() ? Value::null() : Value::of_int(0);
        obj.fields.emplace(cur->name + "->" + field.name, v);
      }
      if (cur->superclass == cur->name) break;
      cur = program_.find_class(cur->superclass);
    }
  }

  Value field_of(Object& obj, const ir::FieldRef& ref) {
    auto it = obj.fields.find(field_key(ref));
    if (it != obj.fields.end()) return it->second;
    return ref.type.is_ref() ? Value::null() : Value::of_int(0);
  }

  void count_branch(const Frame& f, bool taken) {
    if (!counters_ || !taken) return;
    BranchKey key{f.cls->name, ir::to_string(f.method->sig), f.pc};
    ++(*counters_)[key];
  }

  const ir::Program& program_;
  std::uint64_t budget_;
  BranchCounters* counters_;

  std::vector<Frame> frames_;
  std::vector<Object> heap_;
  std::optional<Value> last_result_;
  std::vector<std::int32_t> emitted_;
  std::uint64_t steps_ = 0;
  std::unordered_map<const ir::MethodDef*,
                     std::unordered_map<std::string, std::size_t>>
      label_cache_;
};

}  // namespace

const char* to_string(VmErrorKind kind) {
  switch (kind) {
    case VmErrorKind::BudgetExceeded: return "BudgetExceeded";
    case VmErrorKind::NullDeref: return "NullDeref";
    case VmErrorKind::UnknownExternal: return "UnknownExternal";
    case VmErrorKind::BadOperand: return "BadOperand";
    case VmErrorKind::StackOverflow: return "StackOverflow";
  }
  return "?";
}

RunResult run(const ir::Program& program, const std::vector<std::int32_t>& args,
              std::uint64_t budget, BranchCounters* counters) {
  return Interpreter(program, budget, counters).run(args);
}

EquivalenceResult equivalent(
    const ir::Program& p1, const ir::Program& p2,
    const std::vector<std::vector<std::int32_t>>& vectors,
    std::uint64_t budget) {
  for (const auto& args : vectors) {
    RunResult a = run(p1, args, budget);
    RunResult b = run(p2, args, budget);
    bool same = a.error == b.error && a.trace == b.trace;
    if (!same) {
      std::string what;
      if (a.error != b.error)
        what = std::string("errors differ: ") +
               (a.error ? to_string(*a.error) : "ok") + " vs " +
               (b.error ? to_string(*b.error) : "ok");
      else if (a.trace.result != b.trace.result)
        what = "return values differ";
      else
        what = "emit traces differ";
      return {false, Counterexample{args, what}};
    }
  }
  return {true, std::nullopt};
}

std::vector<std::vector<std::int32_t>> default_vectors(std::size_t arity,
                                                       std::size_t count) {
  std::vector<std::vector<std::int32_t>> vectors;
  vectors.reserve(count + 1);
  vectors.emplace_back(arity, 0);
  SplitMix64 gen(kVectorSeed);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::int32_t> v(arity);
    for (std::int32_t& x : v) x = gen.next_i32();
    vectors.push_back(std::move(v));
  }
  return vectors;
}

}  // namespace morphkit::vm
