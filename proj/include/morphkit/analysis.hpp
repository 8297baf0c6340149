// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "morphkit/ir.hpp"

namespace morphkit::analysis {

// ---------------------------------------------------------------------------
// Control-flow graph
// ---------------------------------------------------------------------------

enum class TerminatorKind { Goto, Branch, Return, Fallthrough };

/// Maximal straight-line block. Instructions exclude label
/// pseudo-instructions; `label` keeps the block's first original label (empty
/// if it had none). Successors are block indices.
struct BasicBlock {
  std::string label;
  std::vector<ir::Instruction> instrs;
  TerminatorKind term = TerminatorKind::Fallthrough;
  int taken = -1;         // Goto/Branch target
  int fallthrough = -1;   // Branch/Fallthrough successor
};

struct Cfg {
  std::vector<BasicBlock> blocks;  // entry is index 0

  std::vector<std::pair<int, int>> edges() const;
};

/// Leader-based partition. linearize(cfg, identity) is trace-equivalent to
/// the input method.
Cfg build_cfg(const ir::MethodDef& method);

/// Emits blocks in `order` (a permutation with order[0] == 0), appending an
/// explicit goto wherever a fallthrough successor is no longer physically
/// next, and emitting a label at the head of every branched-to block.
/// Existing block labels are kept; unlabeled targets get fresh "B<i>" names.
/// Throws std::invalid_argument for an invalid permutation.
std::vector<ir::Instruction> linearize(const Cfg& cfg,
                                       const std::vector<std::size_t>& order);

// ---------------------------------------------------------------------------
// Call graph
// ---------------------------------------------------------------------------

enum class CallKind { Static, Virtual, Direct };

struct CallEdge {
  ir::MethodRef caller;
  std::size_t site = 0;  // body index of the invoke instruction
  ir::MethodRef callee;
  CallKind kind = CallKind::Static;
};

/// One node per internal method, one edge per invoke-* instruction. Virtual
/// callees are recorded as the statically named target.
struct CallGraph {
  std::vector<ir::MethodRef> nodes;
  std::vector<CallEdge> edges;
};

CallGraph build_callgraph(const ir::Program& program);

// ---------------------------------------------------------------------------
// Rename safety
// ---------------------------------------------------------------------------

/// True iff renaming (cls, sig) cannot break dispatch against unmorphable
/// code: sig is no constructor, not the entry method, and no class related to
/// cls through the inheritance chain (up or down) that declares sig is
/// external.
bool rename_safe(const ir::Program& program, const ir::ClassDef& cls,
                 const ir::MethodSig& sig);

}  // namespace morphkit::analysis
