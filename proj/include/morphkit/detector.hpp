// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "morphkit/ir.hpp"
#include "morphkit/morph.hpp"

namespace morphkit::detector {

// ---------------------------------------------------------------------------
// Profiles and signatures
// ---------------------------------------------------------------------------

enum class ProfileKind { NameSig, StringSig, OpcodeGram, CallSig };

const char* to_string(ProfileKind kind);
std::optional<ProfileKind> profile_kind_from_string(std::string_view name);

/// A simulated engine. OpcodeGram matches on Jaccard similarity of opcode
/// k-grams at threshold theta; the set-based kinds match on the overlap
/// coefficient (default threshold 0.8).
struct DetectorProfile {
  std::string id;
  ProfileKind kind = ProfileKind::NameSig;
  int k = 5;               // OpcodeGram gram length, >= 2
  double threshold = 0.8;  // in [0, 1]
};

using Signature = std::set<std::string>;

/// Per-kind feature extraction over internal classes only: class names,
/// const-string literals, opcode k-grams per method (labels excluded), or
/// externally-targeted callee refs.
Signature extract(const DetectorProfile& profile, const ir::Program& program);

/// Built only from original (unmorphed) samples.
struct SignatureDb {
  DetectorProfile profile;
  std::map<std::string, Signature> samples;  // sample id -> signature
};

SignatureDb build_db(
    const DetectorProfile& profile,
    const std::vector<std::pair<std::string, const ir::Program*>>& samples);

struct ScanVerdict {
  bool detected = false;
  double score = 0.0;                 // best similarity over known samples
  std::optional<std::string> matched;  // best-matching sample when detected
};

ScanVerdict scan(const SignatureDb& db, const ir::Program& variant);

/// |A∩B| / |A∪B|; 1.0 when both sets are empty.
double jaccard(const Signature& a, const Signature& b);
/// |A∩B| / min(|A|,|B|); 1.0 when both empty, 0.0 when exactly one is.
double overlap_coefficient(const Signature& a, const Signature& b);

/// 17 profiles across the four kinds (Table-shaped roster).
std::vector<DetectorProfile> default_roster();

/// JSON array of {"id","kind","k","threshold"}. Throws std::runtime_error on
/// malformed input.
std::vector<DetectorProfile> roster_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Detection matrix
// ---------------------------------------------------------------------------

double round_half_up_1dp(double x);

/// Rows = detectors, columns = morph levels; cells are detection-rate
/// percentages rounded half-up to one decimal. A column with no scannable
/// variants is excluded (nullopt).
struct DetectionMatrix {
  std::vector<std::string> detector_ids;
  std::vector<std::string> level_labels;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][column]
  int degenerate_cells = 0;  // excluded (family, level) pairs

  std::vector<std::optional<double>> averages() const;

  /// "detector,<levels...>" header, one row per detector, final average row;
  /// excluded cells print "-".
  std::string to_csv() const;
  /// Aligned human-readable table with the average row.
  std::string to_table() const;
};

/// Per-column arithmetic means of a full rate matrix, rounded half-up to one
/// decimal. Throws std::invalid_argument on an empty matrix.
std::vector<double> average_rates(const std::vector<std::vector<double>>& rows);

// ---------------------------------------------------------------------------
// Evaluation harness
// ---------------------------------------------------------------------------

struct CorpusSample {
  std::string family;
  std::string id;
  ir::Program program;
};

struct EvaluateOutput {
  DetectionMatrix matrix;
  std::vector<morph::VariantRecord> ledger;
  std::vector<std::string> degenerate_notes;
};

/// Builds one SignatureDb per profile from the originals, generates
/// config.variants variants per sample for every requested column level,
/// scans each variant with every profile and fills the matrix. Degenerate
/// (family, level) cells are excluded and counted.
EvaluateOutput evaluate(const std::vector<CorpusSample>& corpus,
                        const std::vector<DetectorProfile>& profiles,
                        const morph::MorphConfig& config,
                        const std::vector<morph::Level>& columns);

}  // namespace morphkit::detector
