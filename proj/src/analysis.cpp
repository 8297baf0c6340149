// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/analysis.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace morphkit::analysis {

using ir::Instruction;
using ir::Opcode;

std::vector<std::pair<int, int>> Cfg::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const BasicBlock& b = blocks[i];
    if (b.taken >= 0) out.emplace_back(static_cast<int>(i), b.taken);
    if (b.fallthrough >= 0)
      out.emplace_back(static_cast<int>(i), b.fallthrough);
  }
  return out;
}

Cfg build_cfg(const ir::MethodDef& method) {
  // Real instructions with the first label attached to each position.
  struct Real {
    const Instruction* in;
    std::string label;  // first label naming this position, if any
  };
  std::vector<Real> real;
  real.reserve(method.body.size());
  std::unordered_map<std::string, std::size_t> label_to_real;

  std::vector<std::string> pending;
  for (const Instruction& in : method.body) {
    if (in.op == Opcode::Label) {
      pending.push_back(in.text);
      continue;
    }
    Real r{&in, pending.empty() ? std::string() : pending.front()};
    for (const std::string& l : pending) label_to_real.emplace(l, real.size());
    pending.clear();
    real.push_back(std::move(r));
  }
  // Trailing labels with nothing after them cannot be branch targets in a
  // validated method; drop them.

  const std::size_t n = real.size();
  std::vector<bool> leader(n, false);
  if (n) leader[0] = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Instruction& in = *real[i].in;
    if (in.op == Opcode::Goto || ir::is_conditional_branch(in.op)) {
      auto it = label_to_real.find(in.text);
      if (it != label_to_real.end() && it->second < n)
        leader[it->second] = true;
      if (i + 1 < n) leader[i + 1] = true;
    } else if (in.op == Opcode::Return || in.op == Opcode::ReturnVoid) {
      if (i + 1 < n) leader[i + 1] = true;
    }
  }
  // A labeled position is a potential target: make it a leader too.
  for (const auto& [label, idx] : label_to_real)
    if (idx < n) leader[idx] = true;

  Cfg cfg;
  std::vector<int> block_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (leader[i]) {
      cfg.blocks.emplace_back();
      cfg.blocks.back().label = real[i].label;
    }
    block_of[i] = static_cast<int>(cfg.blocks.size()) - 1;
    cfg.blocks.back().instrs.push_back(*real[i].in);
  }

  for (std::size_t i = 0; i < n; ++i) {
    bool last_in_block = i + 1 == n || leader[i + 1];
    if (!last_in_block) continue;
    BasicBlock& b = cfg.blocks[block_of[i]];
    const Instruction& in = *real[i].in;
    int next = i + 1 < n ? block_of[i + 1] : -1;
    if (in.op == Opcode::Goto) {
      b.term = TerminatorKind::Goto;
      b.taken = block_of[label_to_real.at(in.text)];
    } else if (ir::is_conditional_branch(in.op)) {
      b.term = TerminatorKind::Branch;
      b.taken = block_of[label_to_real.at(in.text)];
      b.fallthrough = next;
    } else if (in.op == Opcode::Return || in.op == Opcode::ReturnVoid) {
      b.term = TerminatorKind::Return;
    } else {
      b.term = TerminatorKind::Fallthrough;
      b.fallthrough = next;
    }
  }
  return cfg;
}

namespace {

Opcode inverted(Opcode op) {
  switch (op) {
    case Opcode::IfEq: return Opcode::IfNe;
    case Opcode::IfNe: return Opcode::IfEq;
    case Opcode::IfLt: return Opcode::IfGe;
    case Opcode::IfGe: return Opcode::IfLt;
    default: return op;
  }
}

}  // namespace

std::vector<Instruction> linearize(const Cfg& cfg,
                                   const std::vector<std::size_t>& order) {
  const std::size_t n = cfg.blocks.size();
  if (order.size() != n)
    throw std::invalid_argument("linearize: order size mismatch");
  if (n == 0) return {};
  if (order[0] != 0)
    throw std::invalid_argument("linearize: entry block must stay first");
  {
    std::vector<bool> seen(n, false);
    for (std::size_t b : order) {
      if (b >= n || seen[b])
        throw std::invalid_argument("linearize: order is not a permutation");
      seen[b] = true;
    }
  }

  // A conditional branch whose taken target lands physically next is
  // inverted instead of getting a goto; everything else that loses its
  // fallthrough neighbour gets one appended.
  std::vector<bool> invert(n, false);
  std::vector<int> appended_goto(n, -1);  // target block, -1 = none
  std::vector<bool> needs_label(n, false);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t b = order[k];
    const BasicBlock& blk = cfg.blocks[b];
    int next = k + 1 < n ? static_cast<int>(order[k + 1]) : -1;
    switch (blk.term) {
      case TerminatorKind::Goto:
        needs_label[blk.taken] = true;
        break;
      case TerminatorKind::Branch:
        if (blk.fallthrough == next) {
          needs_label[blk.taken] = true;
        } else if (blk.taken == next) {
          invert[b] = true;  // swap targets, branch to old fallthrough
          needs_label[blk.fallthrough] = true;
        } else {
          needs_label[blk.taken] = true;
          if (blk.fallthrough >= 0) {
            appended_goto[b] = blk.fallthrough;
            needs_label[blk.fallthrough] = true;
          }
        }
        break;
      case TerminatorKind::Fallthrough:
        if (blk.fallthrough >= 0 && blk.fallthrough != next) {
          appended_goto[b] = blk.fallthrough;
          needs_label[blk.fallthrough] = true;
        }
        break;
      case TerminatorKind::Return:
        break;
    }
  }

  // Pick label names: keep existing ones, mint "B<i>" for the rest.
  std::set<std::string> taken_names;
  for (const BasicBlock& b : cfg.blocks)
    if (!b.label.empty()) taken_names.insert(b.label);
  std::vector<std::string> name(n);
  std::size_t counter = 0;
  for (std::size_t b = 0; b < n; ++b) {
    if (!cfg.blocks[b].label.empty()) {
      name[b] = cfg.blocks[b].label;
    } else if (needs_label[b]) {
      std::string candidate;
      do {
        candidate = "B" + std::to_string(counter++);
      } while (taken_names.count(candidate));
      taken_names.insert(candidate);
      name[b] = candidate;
    }
  }

  std::vector<Instruction> out;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t b = order[k];
    const BasicBlock& blk = cfg.blocks[b];
    if (needs_label[b]) out.push_back(ir::ins::label(name[b]));
    for (std::size_t i = 0; i < blk.instrs.size(); ++i) {
      Instruction in = blk.instrs[i];
      bool is_last = i + 1 == blk.instrs.size();
      if (is_last && blk.term == TerminatorKind::Goto) {
        in.text = name[blk.taken];
      } else if (is_last && blk.term == TerminatorKind::Branch) {
        if (invert[b]) {
          in.op = inverted(in.op);
          in.text = name[blk.fallthrough];
        } else {
          in.text = name[blk.taken];
        }
      }
      out.push_back(std::move(in));
    }
    if (appended_goto[b] >= 0)
      out.push_back(ir::ins::go_to(name[appended_goto[b]]));
  }
  return out;
}

CallGraph build_callgraph(const ir::Program& program) {
  CallGraph graph;
  for (const auto& [cls_name, cls] : program.classes) {
    if (cls.external) continue;
    for (const ir::MethodDef& m : cls.methods) {
      ir::MethodRef caller{cls_name, m.sig};
      graph.nodes.push_back(caller);
      for (std::size_t i = 0; i < m.body.size(); ++i) {
        const Instruction& in = m.body[i];
        if (!ir::is_invoke(in.op)) continue;
        CallKind kind = in.op == Opcode::InvokeStatic  ? CallKind::Static
                        : in.op == Opcode::InvokeVirtual ? CallKind::Virtual
                                                         : CallKind::Direct;
        graph.edges.push_back({caller, i, *in.method, kind});
      }
    }
  }
  return graph;
}

bool rename_safe(const ir::Program& program, const ir::ClassDef& cls,
                 const ir::MethodSig& sig) {
  if (sig.is_ctor()) return false;

  auto pinned = [&](const ir::ClassDef& declarer) {
    if (declarer.external) return true;
    return declarer.name == program.entry.class_name &&
           sig == program.entry.sig;
  };

  // Up the chain.
  {
    std::set<std::string_view> seen;
    const ir::ClassDef* cur = &cls;
    while (cur && seen.insert(cur->name).second) {
      if (cur->find_method(sig) && pinned(*cur)) return false;
      if (cur->superclass == cur->name) break;
      cur = program.find_class(cur->superclass);
    }
  }

  // Down: every class whose superclass chain passes through cls.
  for (const auto& [name, other] : program.classes) {
    if (name == cls.name || !other.find_method(sig)) continue;
    std::set<std::string_view> seen;
    const ir::ClassDef* cur = &other;
    bool descends = false;
    while (cur && seen.insert(cur->name).second) {
      if (cur->name == cls.name) {
        descends = true;
        break;
      }
      if (cur->superclass == cur->name) break;
      cur = program.find_class(cur->superclass);
    }
    if (descends && pinned(other)) return false;
  }

  return true;
}

}  // namespace morphkit::analysis
