// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/sasm.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <unordered_map>

namespace morphkit::sasm {

using ir::Instruction;
using ir::Opcode;

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

std::string_view basename_of(std::string_view path) {
  std::size_t slash = path.find_last_of('/');
  return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

// ---------------------------------------------------------------------------
// Per-unit parser
// ---------------------------------------------------------------------------

/// Where strings identical to the ones ir::validate produces, so violations
/// can be mapped back to source lines.
struct LineTable {
  std::unordered_map<std::string, int> lines;  // where -> 1-based line
  std::string path;
};

class UnitParser {
 public:
  UnitParser(const SourceUnit& unit, std::vector<ParseError>& errors)
      : unit_(unit), errors_(errors) {}

  std::optional<ir::ClassDef> parse(LineTable& table);

 private:
  // -- error reporting ------------------------------------------------------
  void error(std::string message, std::string token = {}) {
    errors_.push_back({unit_.path, line_no_, static_cast<int>(col_) + 1,
                       std::move(message), std::move(token)});
    line_bad_ = true;
  }

  // -- cursor over the current (comment-stripped) line ----------------------
  char peek() const { return col_ < line_.size() ? line_[col_] : '\0'; }
  bool at_end() const { return col_ >= line_.size(); }
  void skip_ws() {
    while (col_ < line_.size() && is_space(line_[col_])) ++col_;
  }
  bool consume(char c) {
    if (peek() == c) {
      ++col_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!consume(c)) error(std::string("expected '") + c + "'", token_here());
  }
  std::string token_here() const {
    std::size_t end = col_;
    while (end < line_.size() && !is_space(line_[end]) && line_[end] != ',')
      ++end;
    return std::string(line_.substr(col_, std::max<std::size_t>(1, end - col_)));
  }

  std::string_view take_while(bool (*pred)(char)) {
    std::size_t start = col_;
    while (col_ < line_.size() && pred(line_[col_])) ++col_;
    return line_.substr(start, col_ - start);
  }

  // -- token parsers ---------------------------------------------------------
  std::string parse_ident() {
    std::string_view t = take_while([](char c) {
      return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
             (c >= '0' && c <= '9') || c == '_' || c == '$';
    });
    if (!ir::is_valid_identifier(t)) {
      error("expected identifier", token_here());
      return "_";
    }
    return std::string(t);
  }

  std::uint16_t parse_reg() {
    if (!consume('v')) {
      error("expected register", token_here());
      return 0;
    }
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(line_.data() + col_,
                                     line_.data() + line_.size(), value);
    if (ec != std::errc() || value > 0xFFFF) {
      error("bad register index", token_here());
      return 0;
    }
    col_ = static_cast<std::size_t>(ptr - line_.data());
    return static_cast<std::uint16_t>(value);
  }

  std::int32_t parse_int_lit() {
    if (!consume('#')) {
      error("expected '#' integer literal", token_here());
      return 0;
    }
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(line_.data() + col_,
                                     line_.data() + line_.size(), value);
    if (ec != std::errc() || value < INT32_MIN || value > INT32_MAX) {
      error("integer literal out of 32-bit range", token_here());
      return 0;
    }
    col_ = static_cast<std::size_t>(ptr - line_.data());
    return static_cast<std::int32_t>(value);
  }

  std::string parse_label_ref() {
    if (!consume(':')) {
      error("expected ':label'", token_here());
      return "_";
    }
    return parse_ident();
  }

  std::string parse_class_name() {
    std::size_t start = col_;
    if (peek() != 'L') {
      error("expected class name", token_here());
      return "L_;";
    }
    while (col_ < line_.size() && line_[col_] != ';') ++col_;
    if (!consume(';')) {
      error("unterminated class name", token_here());
      return "L_;";
    }
    std::string name(line_.substr(start, col_ - start));
    if (!ir::is_valid_class_name(name)) {
      error("malformed class name", name);
      return "L_;";
    }
    return name;
  }

  ir::TypeDesc parse_type() {
    switch (peek()) {
      case 'I':
        ++col_;
        return ir::TypeDesc::make_int();
      case 'V':
        ++col_;
        return ir::TypeDesc::make_void();
      case 'L':
        return ir::TypeDesc::make_ref(parse_class_name());
      default:
        error("expected type descriptor", token_here());
        ++col_;
        return ir::TypeDesc::make_int();
    }
  }

  std::string parse_string_lit() {
    if (!consume('"')) {
      error("expected string literal", token_here());
      return {};
    }
    std::string out;
    while (true) {
      if (at_end()) {
        error("unterminated string literal");
        return out;
      }
      char c = line_[col_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (at_end()) {
          error("unterminated escape");
          return out;
        }
        char e = line_[col_++];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          default:
            error(std::string("unknown escape '\\") + e + "'");
            break;
        }
      } else {
        out += c;
      }
    }
  }

  std::string parse_method_name() {
    if (peek() == '<') {
      std::size_t start = col_;
      while (col_ < line_.size() && line_[col_] != '>') ++col_;
      if (!consume('>')) {
        error("unterminated special method name");
        return "_";
      }
      std::string name(line_.substr(start, col_ - start));
      if (name != "<init>" && name != "<clinit>") {
        error("unknown special method name", name);
        return "_";
      }
      return name;
    }
    return parse_ident();
  }

  ir::MethodSig parse_sig() {
    ir::MethodSig sig;
    sig.name = parse_method_name();
    expect('(');
    while (!at_end() && peek() != ')') sig.params.push_back(parse_type());
    expect(')');
    sig.ret = parse_type();
    return sig;
  }

  ir::MethodRef parse_method_ref() {
    ir::MethodRef ref;
    ref.class_name = parse_class_name();
    expect('-');
    expect('>');
    ref.sig = parse_sig();
    return ref;
  }

  ir::FieldRef parse_field_ref() {
    ir::FieldRef ref;
    ref.class_name = parse_class_name();
    expect('-');
    expect('>');
    ref.field_name = parse_ident();
    expect(':');
    ref.type = parse_type();
    return ref;
  }

  std::vector<std::uint16_t> parse_arg_list() {
    std::vector<std::uint16_t> args;
    expect('{');
    skip_ws();
    if (!consume('}')) {
      while (true) {
        args.push_back(parse_reg());
        skip_ws();
        if (consume('}')) break;
        expect(',');
        skip_ws();
        if (line_bad_) break;
      }
    }
    return args;
  }

  void comma() {
    skip_ws();
    expect(',');
    skip_ws();
  }

  // -- line handlers ---------------------------------------------------------
  void end_of_operands() {
    skip_ws();
    if (!at_end() && !line_bad_) error("trailing junk", token_here());
  }

  Instruction parse_instruction(std::string_view mn);
  void handle_directive();
  void handle_line();

  /// Strips the comment, honoring string literals and '#' integer literals.
  std::string_view strip_comment(std::string_view raw) {
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      char c = raw[i];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '#') {
        char next = i + 1 < raw.size() ? raw[i + 1] : '\0';
        if (next >= '0' && next <= '9') continue;  // integer literal
        if (next == '-') continue;
        return raw.substr(0, i);
      }
    }
    return raw;
  }

  // -- unit state ------------------------------------------------------------
  const SourceUnit& unit_;
  std::vector<ParseError>& errors_;

  std::string_view line_;
  int line_no_ = 0;
  std::size_t col_ = 0;
  bool line_bad_ = false;

  std::optional<ir::ClassDef> cls_;
  bool have_super_ = false;
  std::optional<ir::MethodDef> method_;
  bool have_registers_ = false;
  int method_line_ = 0;
  std::vector<int> instr_lines_;
  LineTable* table_ = nullptr;
};

Instruction UnitParser::parse_instruction(std::string_view mn) {
  using namespace ir::ins;
  skip_ws();
  Instruction out;

  auto reg = [&] { return parse_reg(); };

  if (mn == "nop") {
    out = nop();
  } else if (mn == "const") {
    auto a = reg();
    comma();
    out = const_i32(a, parse_int_lit());
  } else if (mn == "const-string") {
    auto a = reg();
    comma();
    out = const_string(a, parse_string_lit());
  } else if (mn == "move") {
    auto a = reg();
    comma();
    out = move(a, reg());
  } else if (mn == "add-int" || mn == "sub-int" || mn == "mul-int") {
    auto a = reg();
    comma();
    auto b = reg();
    comma();
    auto c = reg();
    out = mn == "add-int" ? add_int(a, b, c)
          : mn == "sub-int" ? sub_int(a, b, c)
                            : mul_int(a, b, c);
  } else if (mn == "and-lit") {
    auto a = reg();
    comma();
    auto b = reg();
    comma();
    out = and_lit(a, b, parse_int_lit());
  } else if (mn == "if-eq" || mn == "if-ne" || mn == "if-lt" || mn == "if-ge") {
    auto a = reg();
    comma();
    auto b = reg();
    comma();
    std::string label = parse_label_ref();
    out = mn == "if-eq"   ? if_eq(a, b, label)
          : mn == "if-ne" ? if_ne(a, b, label)
          : mn == "if-lt" ? if_lt(a, b, label)
                          : if_ge(a, b, label);
  } else if (mn == "goto") {
    out = go_to(parse_label_ref());
  } else if (mn == "invoke-static" || mn == "invoke-virtual" ||
             mn == "invoke-direct") {
    auto args = parse_arg_list();
    comma();
    ir::MethodRef callee = parse_method_ref();
    out = mn == "invoke-static"    ? invoke_static(args, callee)
          : mn == "invoke-virtual" ? invoke_virtual(args, callee)
                                   : invoke_direct(args, callee);
  } else if (mn == "move-result") {
    out = move_result(reg());
  } else if (mn == "return-void") {
    out = return_void();
  } else if (mn == "return") {
    out = return_reg(reg());
  } else if (mn == "new-instance") {
    auto a = reg();
    comma();
    out = new_instance(a, ir::TypeDesc::make_ref(parse_class_name()));
  } else if (mn == "iget" || mn == "iput") {
    auto a = reg();
    comma();
    auto b = reg();
    comma();
    ir::FieldRef f = parse_field_ref();
    out = mn == "iget" ? iget(a, b, f) : iput(a, b, f);
  } else {
    error("unknown mnemonic", std::string(mn));
    return out;
  }

  end_of_operands();
  return out;
}

void UnitParser::handle_directive() {
  std::size_t start = col_;
  std::string_view word = take_while([](char c) { return !is_space(c); });
  skip_ws();

  if (word == ".class") {
    if (cls_) {
      error("one class per unit: second .class directive");
      return;
    }
    cls_.emplace();
    cls_->name = parse_class_name();
    end_of_operands();
    if (table_) table_->lines.emplace(cls_->name, line_no_);
    return;
  }

  if (!cls_) {
    col_ = start;
    error("directive before .class", std::string(word));
    return;
  }

  if (word == ".super") {
    if (have_super_) {
      error("duplicate .super");
      return;
    }
    cls_->superclass = parse_class_name();
    have_super_ = true;
    end_of_operands();
  } else if (word == ".external") {
    if (method_) {
      error(".external inside a method");
      return;
    }
    cls_->external = true;
    end_of_operands();
  } else if (word == ".field") {
    if (method_) {
      error(".field inside a method");
      return;
    }
    ir::Field f;
    f.name = parse_ident();
    expect(':');
    f.type = parse_type();
    end_of_operands();
    cls_->fields.push_back(std::move(f));
  } else if (word == ".method") {
    if (method_) {
      error("nested .method");
      return;
    }
    method_.emplace();
    method_line_ = line_no_;
    have_registers_ = false;
    instr_lines_.clear();
    // flags, then the signature (detected by a '(' in the token)
    while (true) {
      std::size_t tok_start = col_;
      std::string_view tok = take_while([](char c) { return !is_space(c); });
      if (tok == "public") {
        method_->access.is_public = true;
      } else if (tok == "private") {
        method_->access.is_private = true;
      } else if (tok == "static") {
        method_->access.is_static = true;
      } else {
        col_ = tok_start;
        method_->sig = parse_sig();
        break;
      }
      skip_ws();
      if (at_end()) {
        error("missing method signature");
        return;
      }
    }
    end_of_operands();
  } else if (word == ".registers") {
    if (!method_) {
      error(".registers outside a method");
      return;
    }
    if (have_registers_) {
      error("duplicate .registers");
      return;
    }
    if (cls_->external) {
      error(".registers in an external stub");
      return;
    }
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(line_.data() + col_,
                                     line_.data() + line_.size(), value);
    if (ec != std::errc() || value > 0xFFFF) {
      error("bad register count", token_here());
      return;
    }
    col_ = static_cast<std::size_t>(ptr - line_.data());
    method_->registers = static_cast<std::uint16_t>(value);
    have_registers_ = true;
    end_of_operands();
  } else if (word == ".end") {
    std::string_view what = take_while([](char c) { return !is_space(c); });
    if (what != "method") {
      error("expected '.end method'", std::string(what));
      return;
    }
    if (!method_) {
      error(".end method outside a method");
      return;
    }
    end_of_operands();
    if (!cls_->external && !have_registers_)
      error("internal method without .registers");
    if (cls_->external && !method_->body.empty())
      error("external stub method must have an empty body");
    if (table_ && cls_) {
      std::string mwhere = cls_->name + "->" + ir::to_string(method_->sig);
      table_->lines.emplace(mwhere, method_line_);
      for (std::size_t i = 0; i < instr_lines_.size(); ++i)
        table_->lines.emplace(mwhere + " @" + std::to_string(i),
                              instr_lines_[i]);
    }
    cls_->methods.push_back(std::move(*method_));
    method_.reset();
  } else {
    col_ = start;
    error("unknown directive", std::string(word));
  }
}

void UnitParser::handle_line() {
  skip_ws();
  if (at_end()) return;

  if (peek() == '.') {
    handle_directive();
    return;
  }

  if (!cls_ || !method_) {
    error(method_ ? "unexpected line" : "instruction outside a method",
          token_here());
    return;
  }
  if (cls_->external) {
    error("instruction in an external stub", token_here());
    return;
  }

  // Label definition: a lone identifier with a trailing ':'.
  std::size_t start = col_;
  std::string_view tok = take_while([](char c) { return !is_space(c); });
  if (!tok.empty() && tok.back() == ':') {
    std::string name(tok.substr(0, tok.size() - 1));
    if (!ir::is_valid_identifier(name)) {
      error("malformed label", std::string(tok));
      return;
    }
    end_of_operands();
    method_->body.push_back(ir::ins::label(name));
    instr_lines_.push_back(line_no_);
    return;
  }

  col_ = start;
  std::string_view mn = take_while([](char c) { return !is_space(c); });
  Instruction in = parse_instruction(mn);
  if (!line_bad_) {
    method_->body.push_back(std::move(in));
    instr_lines_.push_back(line_no_);
  }
}

std::optional<ir::ClassDef> UnitParser::parse(LineTable& table) {
  table_ = &table;
  table.path = unit_.path;

  std::string_view text = unit_.text;
  std::size_t pos = 0;
  line_no_ = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw = nl == std::string_view::npos
                               ? text.substr(pos)
                               : text.substr(pos, nl - pos);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    ++line_no_;
    line_ = strip_comment(raw);
    col_ = 0;
    line_bad_ = false;
    handle_line();
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }

  if (method_) {
    error("unterminated .method at end of unit");
    method_.reset();
  }
  if (!cls_) {
    errors_.push_back({unit_.path, 1, 1, "unit declares no class", {}});
    return std::nullopt;
  }
  if (!have_super_) {
    errors_.push_back({unit_.path, 1, 1,
                       "class '" + cls_->name + "' has no .super", {}});
    return std::nullopt;
  }

  std::string want = ir::simple_class_name(cls_->name) + ".sasm";
  if (basename_of(unit_.path) != want)
    errors_.push_back({unit_.path, 1, 1,
                       "file name does not match class simple name (want '" +
                           want + "')",
                       std::string(basename_of(unit_.path))});

  return std::move(cls_);
}

// Maps a validation violation back to a source position via the line tables.
ParseError locate_violation(const ir::Violation& v,
                            const std::vector<LineTable>& tables) {
  auto lookup = [&](const std::string& key) -> const LineTable* {
    for (const LineTable& t : tables)
      if (t.lines.count(key)) return &t;
    return nullptr;
  };

  std::string key = v.where;
  while (true) {
    if (const LineTable* t = lookup(key))
      return {t->path, t->lines.at(key), 1,
              std::string(ir::to_string(v.kind)) + ": " + v.message, {}};
    // Strip " @n" first, then the "->..." member part.
    std::size_t at = key.rfind(" @");
    if (at != std::string::npos) {
      key.resize(at);
      continue;
    }
    std::size_t arrow = key.find("->");
    if (arrow != std::string::npos) {
      key.resize(arrow);
      continue;
    }
    break;
  }
  std::string path = tables.empty() ? "<program>" : tables.front().path;
  return {path, 1, 1,
          std::string(ir::to_string(v.kind)) + ": " + v.message, {}};
}

}  // namespace

std::string to_string(const ParseError& err) {
  std::string out = err.path + ":" + std::to_string(err.line) + ":" +
                    std::to_string(err.column) + ": " + err.message;
  if (!err.token.empty()) out += " ['" + err.token + "']";
  return out;
}

ParseResult parse_program(const std::vector<SourceUnit>& units,
                          const ir::MethodRef& entry) {
  ParseResult result;
  ir::Program program;
  program.entry = entry;

  std::vector<LineTable> tables(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    UnitParser parser(units[i], result.errors);
    std::optional<ir::ClassDef> cls = parser.parse(tables[i]);
    if (!cls) continue;
    auto [it, fresh] = program.classes.emplace(cls->name, std::move(*cls));
    if (!fresh) {
      int line = 1;
      auto lit = tables[i].lines.find(it->first);
      if (lit != tables[i].lines.end()) line = lit->second;
      result.errors.push_back({units[i].path, line, 1,
                               "class '" + it->first +
                                   "' already defined in another unit",
                               {}});
    }
  }

  if (result.errors.empty()) {
    for (const ir::Violation& v : ir::validate(program))
      result.errors.push_back(locate_violation(v, tables));
  }

  std::stable_sort(result.errors.begin(), result.errors.end(),
                   [](const ParseError& a, const ParseError& b) {
                     return std::tie(a.path, a.line, a.column) <
                            std::tie(b.path, b.line, b.column);
                   });

  if (result.errors.empty()) result.program = std::move(program);
  return result;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

void emit_string_lit(std::string& out, std::string_view text) {
  out += '"';
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  out += '"';
}

void emit_args(std::string& out, const std::vector<ir::RegIndex>& regs) {
  out += '{';
  for (std::size_t i = 0; i < regs.size(); ++i) {
    if (i) out += ',';
    out += 'v';
    out += std::to_string(regs[i]);
  }
  out += '}';
}

void emit_instruction(std::string& out, const Instruction& in) {
  if (in.op == Opcode::Label) {
    out += in.text;
    out += ":\n";
    return;
  }
  out += "    ";
  out += ir::mnemonic(in.op);
  auto reg = [&](std::size_t i) {
    out += 'v';
    out += std::to_string(in.regs[i]);
  };
  switch (in.op) {
    case Opcode::Nop:
    case Opcode::ReturnVoid:
      break;
    case Opcode::Const:
      out += ' ';
      reg(0);
      out += ",#";
      out += std::to_string(in.literal);
      break;
    case Opcode::ConstString:
      out += ' ';
      reg(0);
      out += ',';
      emit_string_lit(out, in.text);
      break;
    case Opcode::Move:
      out += ' ';
      reg(0);
      out += ',';
      reg(1);
      break;
    case Opcode::AddInt:
    case Opcode::SubInt:
    case Opcode::MulInt:
      out += ' ';
      reg(0);
      out += ',';
      reg(1);
      out += ',';
      reg(2);
      break;
    case Opcode::AndLit:
      out += ' ';
      reg(0);
      out += ',';
      reg(1);
      out += ",#";
      out += std::to_string(in.literal);
      break;
    case Opcode::IfEq:
    case Opcode::IfNe:
    case Opcode::IfLt:
    case Opcode::IfGe:
      out += ' ';
      reg(0);
      out += ',';
      reg(1);
      out += ",:";
      out += in.text;
      break;
    case Opcode::Goto:
      out += " :";
      out += in.text;
      break;
    case Opcode::InvokeStatic:
    case Opcode::InvokeVirtual:
    case Opcode::InvokeDirect:
      out += ' ';
      emit_args(out, in.regs);
      out += ',';
      out += ir::to_string(*in.method);
      break;
    case Opcode::MoveResult:
    case Opcode::Return:
      out += ' ';
      reg(0);
      break;
    case Opcode::NewInstance:
      out += ' ';
      reg(0);
      out += ',';
      out += in.type->class_name;
      break;
    case Opcode::Iget:
    case Opcode::Iput:
      out += ' ';
      reg(0);
      out += ',';
      reg(1);
      out += ',';
      out += ir::to_string(*in.field);
      break;
    case Opcode::Label:
      break;
  }
  out += '\n';
}

}  // namespace

std::string emit_class(const ir::ClassDef& cls) {
  std::string out;
  out.reserve(256 + cls.methods.size() * 256);

  out += ".class " + cls.name + "\n";
  out += ".super " + cls.superclass + "\n";
  if (cls.external) out += ".external\n";
  for (const ir::Field& f : cls.fields)
    out += ".field " + f.name + ":" + ir::to_descriptor(f.type) + "\n";

  for (const ir::MethodDef& m : cls.methods) {
    out += "\n.method ";
    if (m.access.is_public) out += "public ";
    if (m.access.is_private) out += "private ";
    if (m.access.is_static) out += "static ";
    out += ir::to_string(m.sig);
    out += '\n';
    if (!cls.external) {
      out += ".registers " + std::to_string(m.registers) + "\n";
      for (const Instruction& in : m.body) emit_instruction(out, in);
    }
    out += ".end method\n";
  }
  return out;
}

std::string unit_path_for(const ir::ClassDef& cls) {
  std::string inner = cls.name.substr(1, cls.name.size() - 2);
  return inner + ".sasm";
}

std::optional<ir::MethodRef> parse_method_ref_text(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' ||
                           text.back() == ' '))
    text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);

  // Reuse the unit parser on a synthetic invoke line.
  std::string unit_text = ".class Lx/Probe;\n.super Lrt/Object;\n"
                          ".method static probe()V\n.registers 1\n"
                          "    invoke-static {},";
  unit_text += text;
  unit_text += "\n    return-void\n.end method\n";

  std::vector<ParseError> errors;
  SourceUnit unit{"Probe.sasm", unit_text};
  LineTable table;
  UnitParser parser(unit, errors);
  std::optional<ir::ClassDef> cls = parser.parse(table);
  if (!errors.empty() || !cls || cls->methods.size() != 1) return std::nullopt;
  const ir::MethodDef& probe = cls->methods.front();
  if (probe.body.size() != 2 || !probe.body.front().method)
    return std::nullopt;
  ir::MethodRef ref = *probe.body.front().method;
  // Arg list was empty; the ref itself is all we wanted.
  return ref;
}

std::vector<SourceUnit> emit_program_units(const ir::Program& program) {
  std::vector<SourceUnit> units;
  units.reserve(program.classes.size());
  for (const auto& [name, cls] : program.classes)
    units.push_back({unit_path_for(cls), emit_class(cls)});
  return units;
}

}  // namespace morphkit::sasm
