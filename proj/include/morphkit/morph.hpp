// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morphkit/ir.hpp"
#include "morphkit/prng.hpp"

namespace morphkit::morph {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class Level { Class, Method, Body, CallGraph, All };

/// Canonical lowercase name ("class", "callgraph", ...).
const char* to_string(Level level);
std::optional<Level> level_from_string(std::string_view name);

struct MorphConfig {
  std::set<Level> levels = {Level::All};
  std::uint64_t seed = 0;
  std::uint32_t variants = 1;
  double junk_density = 0.3;  // junk insertion probability per gap
  double opaque_rate = 0.5;   // opaque-predicate probability per gap
  bool reorder = true;
  double proxy_rate = 0.5;  // call-site proxying probability per edge
};

/// Expands Level::All and returns the requested levels in the fixed pass
/// order Class, Method, CallGraph, Body.
std::vector<Level> expand_levels(const std::set<Level>& levels);

/// "class", "all", or "class+body" style label for a level set.
std::string levels_label(const std::set<Level>& levels);

// ---------------------------------------------------------------------------
// Renaming
// ---------------------------------------------------------------------------

struct RenameMap {
  std::map<std::string, std::string> class_renames;  // old -> new
  // (class, old sig text) -> new method name
  std::map<std::pair<std::string, std::string>, std::string> method_renames;
};

/// Deterministic fresh-name source: classes follow Lm/a;, Lm/b;, ... Lm/aa;,
/// methods ma, mb, ...; the stream decides only skip counts, and names
/// colliding with `taken` are skipped too.
class NameAllocator {
 public:
  enum class Kind { Class, Method };

  NameAllocator(Kind kind, SplitMix64& stream, std::set<std::string> taken)
      : kind_(kind), stream_(&stream), taken_(std::move(taken)) {}

  std::string next();

  /// Pure sequence: index 0 -> "Lm/a;"/"ma", 26 -> "Lm/aa;"/"maa".
  static std::string name_for_index(Kind kind, std::uint64_t index);

 private:
  Kind kind_;
  SplitMix64* stream_;
  std::set<std::string> taken_;
  std::uint64_t index_ = 0;
  bool first_ = true;
};

/// Renames every internal class and repairs all references (superclasses,
/// signatures, field types, call/field/new-instance targets, the entry ref).
std::pair<ir::Program, RenameMap> rename_classes(const ir::Program& program,
                                                 SplitMix64& stream);

/// Renames every method group that analysis::rename_safe allows, keeping
/// override chains on a single fresh name, and repairs every call site.
std::pair<ir::Program, RenameMap> rename_methods(const ir::Program& program,
                                                 SplitMix64& stream);

// ---------------------------------------------------------------------------
// Body and call-graph morphing
// ---------------------------------------------------------------------------

struct BodyParams {
  double junk_density = 0.3;
  double opaque_rate = 0.5;
  bool reorder = true;
};

/// Label prefixes used by the opaque-predicate pass. Guard branches are
/// recognizable as if-eq targeting a "jnk"-prefixed label.
inline constexpr std::string_view kOpaqueJunkLabelPrefix = "jnk";
inline constexpr std::string_view kOpaqueContLabelPrefix = "cnt";

/// Junk insertion, opaque predicates, then block reordering, in that order.
/// Junk writes only to fresh registers; guards are always-false; reordering
/// keeps the entry block first. The result is vm-equivalent to the input.
ir::MethodDef morph_body(const ir::MethodDef& method, SplitMix64& stream,
                         const BodyParams& params);

/// Outlines selected call sites through fresh static proxy methods in the
/// caller's class (receiver becomes the proxy's first parameter for
/// virtual/direct calls). Never removes call-graph edges.
ir::Program morph_callgraph(const ir::Program& program, SplitMix64& stream,
                            double proxy_rate);

// ---------------------------------------------------------------------------
// Variant generation
// ---------------------------------------------------------------------------

struct VariantRecord {
  std::string family;
  std::string source;
  std::string level;     // levels label
  std::uint64_t seed = 0;  // per-variant stream seed
  std::string digest;    // SHA-256 hex of the bundle bytes
};

struct SampleMeta {
  std::string family;
  std::string source;
};

struct Variant {
  ir::Program program;
  VariantRecord record;
};

/// A requested level that cannot change this program no matter the stream.
struct DegenerateMorph {
  std::vector<Level> levels;
  std::string reason;
};

struct GenerateResult {
  std::vector<Variant> variants;
  std::optional<DegenerateMorph> degenerate;  // set => variants empty

  bool ok() const { return !degenerate.has_value(); }
};

/// Variant i runs the passes implied by config.levels, in fixed order
/// Class -> Method -> CallGraph -> Body, on a stream seeded variant_seed(
/// config.seed, i). Every variant is validated before being returned.
GenerateResult generate_variants(const ir::Program& program,
                                 const MorphConfig& config,
                                 const SampleMeta& meta);

/// Per-level program-side degeneracy test used by generate_variants.
bool level_is_degenerate(const ir::Program& program, Level level);

/// Ledger CSV: header "family,source,level,seed,digest", LF endings.
std::string ledger_csv(const std::vector<VariantRecord>& records);

/// Stable per-cell seed derivation: base XOR fnv1a64(tag), one splitmix step.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

// ---------------------------------------------------------------------------
// Count-replay harness
// ---------------------------------------------------------------------------

/// One corpus family replayed at externally prescribed per-level variant
/// counts (reproducing an externally reported distribution). A count of
/// zero is surfaced as a
/// DegenerateMorph notation, never silently dropped.
struct ReplayRequest {
  std::string family;
  std::string source;
  ir::Program program;
  std::map<Level, std::uint32_t> counts;  // per single level
};

struct ReplayResult {
  std::vector<VariantRecord> records;
  std::vector<std::string> degenerate_notes;  // "family/level: ..." lines
};

ReplayResult replay_counts(const std::vector<ReplayRequest>& requests,
                           const MorphConfig& base_config);

}  // namespace morphkit::morph
