// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morphkit/ir.hpp"

namespace morphkit::vm {

/// Observable behavior of a run: the ints passed to Lrt/IO;->emit(I)V plus
/// the entry's return value. Field state is deliberately not part of it.
struct Trace {
  std::vector<std::int32_t> emitted;
  std::optional<std::int32_t> result;  // nullopt = void
  std::uint64_t steps = 0;

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.emitted == b.emitted && a.result == b.result;  // steps excluded
  }
};

enum class VmErrorKind {
  BudgetExceeded,
  NullDeref,
  UnknownExternal,
  BadOperand,     // operand type confusion (not reachable from morphed code)
  StackOverflow,  // frame depth cap
};

const char* to_string(VmErrorKind kind);

struct RunResult {
  Trace trace;  // partial on error
  std::optional<VmErrorKind> error;

  bool ok() const { return !error.has_value(); }
};

/// Identifies a branch instruction for taken-count accounting.
struct BranchKey {
  std::string class_name;
  std::string method;  // sig text
  std::size_t index = 0;  // body index

  friend auto operator<=>(const BranchKey&, const BranchKey&) = default;
};

using BranchCounters = std::map<BranchKey, std::uint64_t>;

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

/// Interprets `program` from its entry with Dalvik-style frames: params in
/// the top registers, uninitialized locals read as 0, 32-bit wrapping
/// arithmetic. External calls are limited to the rt intrinsics. If `counters`
/// is given, records the taken count per conditional branch.
/// Throws std::invalid_argument when args do not match the entry arity.
RunResult run(const ir::Program& program, const std::vector<std::int32_t>& args,
              std::uint64_t budget = kDefaultBudget,
              BranchCounters* counters = nullptr);

struct Counterexample {
  std::vector<std::int32_t> args;
  std::string description;
};

struct EquivalenceResult {
  bool equivalent = true;
  std::optional<Counterexample> counterexample;
};

/// True iff both programs produce equal traces (emitted + result) on every
/// vector; errors count as inequivalent unless both sides fail identically.
EquivalenceResult equivalent(const ir::Program& p1, const ir::Program& p2,
                             const std::vector<std::vector<std::int32_t>>& vectors,
                             std::uint64_t budget = kDefaultBudget);

inline constexpr std::uint64_t kVectorSeed = 0xC0FFEE;

/// The all-zero tuple plus `count` splitmix64-drawn tuples from kVectorSeed.
std::vector<std::vector<std::int32_t>> default_vectors(std::size_t arity,
                                                       std::size_t count = 20);

}  // namespace morphkit::vm
