// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace morphkit::detector {

const char* to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::NameSig: return "namesig";
    case ProfileKind::StringSig: return "stringsig";
    case ProfileKind::OpcodeGram: return "opcodegram";
    case ProfileKind::CallSig: return "callsig";
  }
  return "?";
}

std::optional<ProfileKind> profile_kind_from_string(std::string_view name) {
  if (name == "namesig") return ProfileKind::NameSig;
  if (name == "stringsig") return ProfileKind::StringSig;
  if (name == "opcodegram") return ProfileKind::OpcodeGram;
  if (name == "callsig") return ProfileKind::CallSig;
  return std::nullopt;
}

namespace {

bool is_external_class(const ir::Program& program, const std::string& name) {
  const ir::ClassDef* cls = program.find_class(name);
  return cls && cls->external;
}

}  // namespace

Signature extract(const DetectorProfile& profile, const ir::Program& program) {
  Signature sig;
  for (const auto& [name, cls] : program.classes) {
    if (cls.external) continue;
    switch (profile.kind) {
      case ProfileKind::NameSig:
        sig.insert(name);
        break;
      case ProfileKind::StringSig:
        for (const ir::MethodDef& m : cls.methods)
          for (const ir::Instruction& in : m.body)
            if (in.op == ir::Opcode::ConstString) sig.insert(in.text);
        break;
      case ProfileKind::OpcodeGram:
        for (const ir::MethodDef& m : cls.methods) {
          std::vector<const char*> ops;
          ops.reserve(m.body.size());
          for (const ir::Instruction& in : m.body)
            if (in.op != ir::Opcode::Label) ops.push_back(ir::mnemonic(in.op));
          if (profile.k < 2 || ops.size() < static_cast<std::size_t>(profile.k))
            continue;
          for (std::size_t i = 0; i + profile.k <= ops.size(); ++i) {
            std::string gram = ops[i];
            for (int j = 1; j < profile.k; ++j) {
              gram += '|';
              gram += ops[i + j];
            }
            sig.insert(std::move(gram));
          }
        }
        break;
      case ProfileKind::CallSig:
        for (const ir::MethodDef& m : cls.methods)
          for (const ir::Instruction& in : m.body)
            if (ir::is_invoke(in.op) && in.method &&
                is_external_class(program, in.method->class_name))
              sig.insert(ir::to_string(*in.method));
        break;
    }
  }
  return sig;
}

SignatureDb build_db(
    const DetectorProfile& profile,
    const std::vector<std::pair<std::string, const ir::Program*>>& samples) {
  SignatureDb db;
  db.profile = profile;
  for (const auto& [id, program] : samples)
    db.samples.emplace(id, extract(profile, *program));
  return db;
}

double jaccard(const Signature& a, const Signature& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const std::string& x : a) inter += b.count(x);
  std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double overlap_coefficient(const Signature& a, const Signature& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const std::string& x : a) inter += b.count(x);
  return static_cast<double>(inter) /
         static_cast<double>(std::min(a.size(), b.size()));
}

ScanVerdict scan(const SignatureDb& db, const ir::Program& variant) {
  if (db.samples.empty()) throw std::invalid_argument("scan: empty database");
  Signature probe = extract(db.profile, variant);

  ScanVerdict verdict;
  bool gram = db.profile.kind == ProfileKind::OpcodeGram;
  for (const auto& [id, known] : db.samples) {
    double sim =
        gram ? jaccard(probe, known) : overlap_coefficient(probe, known);
    if (sim > verdict.score || !verdict.matched) {
      verdict.score = sim;
      verdict.matched = id;
    }
  }
  verdict.detected = verdict.score >= db.profile.threshold;
  if (!verdict.detected) verdict.matched.reset();
  return verdict;
}

std::vector<DetectorProfile> default_roster() {
  std::vector<DetectorProfile> roster;
  auto add = [&](std::string id, ProfileKind kind, int k, double threshold) {
    roster.push_back({std::move(id), kind, k, threshold});
  };
  add("ng-strict", ProfileKind::NameSig, 5, 0.9);
  add("ng-default", ProfileKind::NameSig, 5, 0.8);
  add("ng-loose", ProfileKind::NameSig, 5, 0.7);
  add("ng-exact", ProfileKind::NameSig, 5, 1.0);
  add("ss-strict", ProfileKind::StringSig, 5, 0.9);
  add("ss-default", ProfileKind::StringSig, 5, 0.8);
  add("ss-loose", ProfileKind::StringSig, 5, 0.7);
  add("ss-exact", ProfileKind::StringSig, 5, 1.0);
  add("og-default", ProfileKind::OpcodeGram, 5, 0.6);
  add("og-k4", ProfileKind::OpcodeGram, 4, 0.6);
  add("og-k6", ProfileKind::OpcodeGram, 6, 0.6);
  add("og-strict", ProfileKind::OpcodeGram, 5, 0.7);
  add("og-loose", ProfileKind::OpcodeGram, 5, 0.5);
  add("cs-strict", ProfileKind::CallSig, 5, 0.9);
  add("cs-default", ProfileKind::CallSig, 5, 0.8);
  add("cs-loose", ProfileKind::CallSig, 5, 0.7);
  add("cs-exact", ProfileKind::CallSig, 5, 1.0);
  return roster;
}

std::vector<DetectorProfile> roster_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("roster: bad JSON: ") + e.what());
  }
  if (!doc.is_array()) throw std::runtime_error("roster: expected an array");

  std::vector<DetectorProfile> roster;
  for (const auto& item : doc) {
    DetectorProfile p;
    if (!item.contains("id") || !item.contains("kind"))
      throw std::runtime_error("roster: profile needs 'id' and 'kind'");
    p.id = item.at("id").get<std::string>();
    auto kind = profile_kind_from_string(item.at("kind").get<std::string>());
    if (!kind)
      throw std::runtime_error("roster: unknown kind '" +
                               item.at("kind").get<std::string>() + "'");
    p.kind = *kind;
    p.k = item.value("k", 5);
    p.threshold =
        item.value("threshold", p.kind == ProfileKind::OpcodeGram ? 0.6 : 0.8);
    if (p.k < 2 || p.threshold < 0.0 || p.threshold > 1.0)
      throw std::runtime_error("roster: profile '" + p.id +
                               "' has out-of-range k or threshold");
    roster.push_back(std::move(p));
  }
  if (roster.empty()) throw std::runtime_error("roster: no profiles");
  return roster;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

double round_half_up_1dp(double x) { return std::floor(x * 10.0 + 0.5) / 10.0; }

namespace {

std::string format_cell(const std::optional<double>& cell) {
  if (!cell) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *cell);
  return buf;
}

}  // namespace

std::vector<std::optional<double>> DetectionMatrix::averages() const {
  std::vector<std::optional<double>> out(level_labels.size());
  for (std::size_t c = 0; c < level_labels.size(); ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < cells.size(); ++r) {
      if (!cells[r][c]) continue;
      sum += *cells[r][c];
      ++n;
    }
    if (n) out[c] = round_half_up_1dp(sum / static_cast<double>(n));
  }
  return out;
}

std::string DetectionMatrix::to_csv() const {
  std::string out = "detector";
  for (const std::string& l : level_labels) out += "," + l;
  out += '\n';
  for (std::size_t r = 0; r < detector_ids.size(); ++r) {
    out += detector_ids[r];
    for (std::size_t c = 0; c < level_labels.size(); ++c)
      out += "," + format_cell(cells[r][c]);
    out += '\n';
  }
  out += "average";
  for (const auto& a : averages()) out += "," + format_cell(a);
  out += '\n';
  return out;
}

std::string DetectionMatrix::to_table() const {
  std::size_t name_w = std::string("average").size();
  for (const std::string& id : detector_ids) name_w = std::max(name_w, id.size());
  std::vector<std::size_t> col_w(level_labels.size());
  for (std::size_t c = 0; c < level_labels.size(); ++c) {
    col_w[c] = std::max<std::size_t>(level_labels[c].size(), 5);
    for (std::size_t r = 0; r < cells.size(); ++r)
      col_w[c] = std::max(col_w[c], format_cell(cells[r][c]).size());
  }

  auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
  };
  std::string out = pad("detector", name_w);
  for (std::size_t c = 0; c < level_labels.size(); ++c)
    out += "  " + pad(level_labels[c], col_w[c]);
  out += '\n';
  for (std::size_t r = 0; r < detector_ids.size(); ++r) {
    out += pad(detector_ids[r], name_w);
    for (std::size_t c = 0; c < level_labels.size(); ++c)
      out += "  " + pad(format_cell(cells[r][c]), col_w[c]);
    out += '\n';
  }
  std::vector<std::optional<double>> avg = averages();
  out += pad("average", name_w);
  for (std::size_t c = 0; c < level_labels.size(); ++c)
    out += "  " + pad(format_cell(avg[c]), col_w[c]);
  out += '\n';
  return out;
}

std::vector<double> average_rates(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty())
    throw std::invalid_argument("average_rates: empty matrix");
  std::size_t cols = rows.front().size();
  std::vector<double> out(cols, 0.0);
  for (const std::vector<double>& row : rows) {
    if (row.size() != cols)
      throw std::invalid_argument("average_rates: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c];
  }
  for (double& v : out)
    v = round_half_up_1dp(v / static_cast<double>(rows.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvaluateOutput evaluate(const std::vector<CorpusSample>& corpus,
                        const std::vector<DetectorProfile>& profiles,
                        const morph::MorphConfig& config,
                        const std::vector<morph::Level>& columns) {
  if (corpus.empty()) throw std::invalid_argument("evaluate: empty corpus");
  if (profiles.empty()) throw std::invalid_argument("evaluate: no profiles");

  EvaluateOutput out;
  for (const DetectorProfile& p : profiles)
    out.matrix.detector_ids.push_back(p.id);
  for (morph::Level l : columns)
    out.matrix.level_labels.push_back(morph::to_string(l));
  out.matrix.cells.assign(profiles.size(),
                          std::vector<std::optional<double>>(columns.size()));

  std::vector<std::pair<std::string, const ir::Program*>> originals;
  originals.reserve(corpus.size());
  for (const CorpusSample& s : corpus)
    originals.emplace_back(s.family + "/" + s.id, &s.program);
  std::vector<SignatureDb> dbs;
  dbs.reserve(profiles.size());
  for (const DetectorProfile& p : profiles) dbs.push_back(build_db(p, originals));

  for (std::size_t c = 0; c < columns.size(); ++c) {
    morph::Level level = columns[c];
    std::vector<std::size_t> detected(profiles.size(), 0);
    std::size_t total = 0;

    for (const CorpusSample& sample : corpus) {
      morph::MorphConfig cell_config = config;
      cell_config.levels = {level};
      cell_config.seed = morph::derive_seed(
          config.seed,
          sample.family + "/" + sample.id + "/" + morph::to_string(level));
      morph::GenerateResult gen = morph::generate_variants(
          sample.program, cell_config, {sample.family, sample.id});
      if (gen.degenerate) {
        ++out.matrix.degenerate_cells;
        out.degenerate_notes.push_back("DegenerateMorph " + sample.family +
                                       "/" + sample.id + " at level " +
                                       morph::to_string(level) + ": " +
                                       gen.degenerate->reason);
        continue;
      }
      for (morph::Variant& v : gen.variants) {
        ++total;
        for (std::size_t r = 0; r < dbs.size(); ++r)
          if (scan(dbs[r], v.program).detected) ++detected[r];
        out.ledger.push_back(std::move(v.record));
      }
    }

    if (total == 0) continue;  // whole column excluded
    for (std::size_t r = 0; r < profiles.size(); ++r)
      out.matrix.cells[r][c] = round_half_up_1dp(
          100.0 * static_cast<double>(detected[r]) / static_cast<double>(total));
  }
  return out;
}

}  // namespace morphkit::detector
