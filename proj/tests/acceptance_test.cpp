// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion. Exit code = number of
// failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "morphkit/analysis.hpp"
#include "morphkit/detector.hpp"
#include "morphkit/morph.hpp"
#include "morphkit/package.hpp"
#include "morphkit/prng.hpp"
#include "morphkit/sasm.hpp"
#include "morphkit/vm.hpp"
#include "support/generator.hpp"

namespace fs = std::filesystem;
using namespace morphkit;
using Clock = std::chrono::steady_clock;

namespace {

const char* kCorpusDir = MORPHKIT_SOURCE_DIR "/corpus";
const char* kBin = MORPHKIT_BIN;

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

ir::Program load_sample(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& item : fs::recursive_directory_iterator(dir))
    if (item.is_regular_file() && item.path().extension() == ".sasm")
      files.push_back(item.path());
  std::sort(files.begin(), files.end());
  std::vector<sasm::SourceUnit> units;
  for (const fs::path& f : files) units.push_back({f.string(), slurp(f)});
  std::string entry_line = slurp(dir / "ENTRY");
  auto entry = sasm::parse_method_ref_text(entry_line);
  if (!entry) throw std::runtime_error("bad ENTRY in " + dir.string());
  sasm::ParseResult result = sasm::parse_program(units, *entry);
  if (!result.ok())
    throw std::runtime_error(sasm::to_string(result.errors.front()));
  return std::move(*result.program);
}

std::vector<detector::CorpusSample> load_corpus() {
  std::vector<detector::CorpusSample> corpus;
  std::vector<fs::path> families;
  for (const auto& f : fs::directory_iterator(kCorpusDir))
    if (f.is_directory()) families.push_back(f.path());
  std::sort(families.begin(), families.end());
  for (const fs::path& family : families) {
    std::vector<fs::path> samples;
    for (const auto& s : fs::directory_iterator(family))
      if (s.is_directory()) samples.push_back(s.path());
    std::sort(samples.begin(), samples.end());
    for (const fs::path& sample : samples)
      corpus.push_back({family.filename().string(), sample.filename().string(),
                        load_sample(sample)});
  }
  return corpus;
}

int run_binary(const std::string& args) {
  std::string cmd = "\"" + std::string(kBin) + "\" " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& item : fs::recursive_directory_iterator(root))
    if (item.is_regular_file())
      files[fs::relative(item.path(), root).generic_string()] =
          slurp(item.path());
  return files;
}

// Seeds whose generated programs can be morphed at every level.
std::vector<std::uint64_t> usable_seeds(std::size_t count) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t seed = 1; seeds.size() < count && seed < 10000; ++seed) {
    ir::Program p = testsupport::random_program(seed);
    bool degenerate = false;
    for (morph::Level l : {morph::Level::Class, morph::Level::Method,
                           morph::Level::CallGraph, morph::Level::Body})
      degenerate = degenerate || morph::level_is_degenerate(p, l);
    if (!degenerate) seeds.push_back(seed);
  }
  return seeds;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

// 1. parse(emit(P)) == P over the corpus and 1000 generated programs, < 60 s.
Check criterion_round_trip() {
  Check check;
  auto t0 = Clock::now();

  for (const detector::CorpusSample& s : load_corpus()) {
    sasm::ParseResult again = sasm::parse_program(
        sasm::emit_program_units(s.program), s.program.entry);
    check.require(again.ok() && *again.program == s.program,
                  "corpus round-trip failed for " + s.family + "/" + s.id);
  }

  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    ir::Program p = testsupport::random_program(seed);
    sasm::ParseResult again =
        sasm::parse_program(sasm::emit_program_units(p), p.entry);
    if (!again.ok() || !(*again.program == p)) ++failures;
  }
  check.require(failures == 0,
                std::to_string(failures) + " generated round-trip failures");

  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  check.require(secs < 60.0, "took too long");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "11 corpus samples + 1000 programs, %.1fs",
                secs);
  check.note(buf);
  return check;
}

struct PreservationOutcome {
  Check equivalence;
  Check opaque;
};

// 2 + 7. vm.equivalent over >=100 programs x 5 levels x 21 vectors, and the
// opaque-guard taken counters collected along the way.
PreservationOutcome criterion_preservation_and_opaque() {
  PreservationOutcome out;
  auto t0 = Clock::now();

  std::vector<std::uint64_t> seeds = usable_seeds(100);
  out.equivalence.require(seeds.size() == 100, "not enough usable seeds");

  const std::vector<std::set<morph::Level>> level_sets = {
      {morph::Level::Class},
      {morph::Level::Method},
      {morph::Level::Body},
      {morph::Level::CallGraph},
      {morph::Level::All}};

  std::size_t checks = 0;
  std::size_t guard_branches = 0;
  std::uint64_t guard_takes = 0;

  for (std::uint64_t seed : seeds) {
    ir::Program original = testsupport::random_program(seed);
    auto vectors = vm::default_vectors(original.entry.sig.params.size(), 20);

    for (const auto& levels : level_sets) {
      morph::MorphConfig config;
      config.levels = levels;
      config.variants = 1;
      config.seed = morph::derive_seed(0xACCE97, std::to_string(seed) + "/" +
                                                     morph::levels_label(levels));
      morph::GenerateResult gen =
          morph::generate_variants(original, config, {"gen", "acc"});
      if (!gen.ok()) {
        out.equivalence.fail("unexpected degenerate morph at seed " +
                             std::to_string(seed));
        continue;
      }
      const ir::Program& variant = gen.variants[0].program;

      vm::EquivalenceResult eq = vm::equivalent(original, variant, vectors);
      if (!eq.equivalent) {
        out.equivalence.fail(
            "inequivalent: seed " + std::to_string(seed) + " levels " +
            morph::levels_label(levels) + " (" +
            (eq.counterexample ? eq.counterexample->description : "") + ")");
      }
      ++checks;

      // Opaque guards: conditional branches into a jnk-labeled block.
      std::vector<vm::BranchKey> guards;
      for (const auto& [cls_name, cls] : variant.classes) {
        if (cls.external) continue;
        for (const ir::MethodDef& m : cls.methods)
          for (std::size_t i = 0; i < m.body.size(); ++i) {
            const ir::Instruction& in = m.body[i];
            if (ir::is_conditional_branch(in.op) &&
                in.text.rfind(morph::kOpaqueJunkLabelPrefix, 0) == 0)
              guards.push_back({cls_name, ir::to_string(m.sig), i});
          }
      }
      if (guards.empty()) continue;
      guard_branches += guards.size();
      for (const auto& args : vectors) {
        vm::BranchCounters counters;
        vm::run(variant, args, vm::kDefaultBudget, &counters);
        for (const vm::BranchKey& key : guards) {
          auto it = counters.find(key);
          if (it != counters.end()) guard_takes += it->second;
        }
      }
    }
  }

  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  out.equivalence.require(secs < 600.0, "took too long");
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "%zu (program, level) pairs x 21 vectors, %.1fs", checks, secs);
  out.equivalence.note(buf);

  out.opaque.require(guard_branches > 0, "no opaque guards were generated");
  out.opaque.require(guard_takes == 0,
                     std::to_string(guard_takes) + " guard takes observed");
  std::snprintf(buf, sizeof(buf), "%zu guard branches, %llu takes",
                guard_branches,
                static_cast<unsigned long long>(guard_takes));
  out.opaque.note(buf);
  return out;
}

// 3. Two cmd_morph runs with identical config produce byte-identical trees.
Check criterion_determinism() {
  Check check;
  fs::path scratch = fs::temp_directory_path() / "morphkit_acceptance_det";
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  fs::path key = scratch / "key.txt";
  std::ofstream(key) << "acceptance-key\n";

  std::string common = std::string(kCorpusDir) + "/FamA/s1 " +
                       std::string(kCorpusDir) + "/FamC/s2 --key-file " +
                       key.string() + " --variants 3 --seed 99 --levels all";
  for (const char* jobs : {"1", "4"}) {
    fs::path out_a = scratch / (std::string("a") + jobs);
    fs::path out_b = scratch / (std::string("b") + jobs);
    int code_a = run_binary("morph " + common + " --jobs " + jobs + " --out " +
                            out_a.string());
    int code_b = run_binary("morph " + common + " --jobs " + jobs + " --out " +
                            out_b.string());
    check.require(code_a == 0 && code_b == 0, "cmd_morph failed");
    check.require(snapshot_tree(out_a) == snapshot_tree(out_b),
                  std::string("trees differ at --jobs ") + jobs);
  }
  // Parallelism must not change the output either.
  check.require(snapshot_tree(scratch / "a1") == snapshot_tree(scratch / "a4"),
                "trees differ between --jobs 1 and --jobs 4");
  fs::remove_all(scratch);
  check.note("2 samples x 3 variants, jobs {1,4}, byte-compared");
  return check;
}

// 4. 50 All-level variants of one sample have 50 distinct digests.
Check criterion_distinctness() {
  Check check;
  ir::Program sample = load_sample(fs::path(kCorpusDir) / "FamA/s1");
  morph::MorphConfig config;
  config.levels = {morph::Level::All};
  config.variants = 50;
  config.seed = 0xD157;
  morph::GenerateResult gen =
      morph::generate_variants(sample, config, {"FamA", "s1"});
  check.require(gen.ok(), "degenerate morph");
  std::set<std::string> digests;
  for (const morph::Variant& v : gen.variants) digests.insert(v.record.digest);
  check.require(digests.size() == 50,
                std::to_string(digests.size()) + " distinct digests of 50");
  check.note(std::to_string(digests.size()) + " distinct digests");
  return check;
}

// 5. average_rates on the reference 17x4 rate fixture returns its known
// bottom row.
Check criterion_average_rate_fixture() {
  Check check;
  std::vector<std::vector<double>> rows = {
      {95, 100, 100, 100},   {100, 100, 100, 100}, {0, 0, 0, 0},
      {100, 100, 100, 100},  {100, 100, 100, 100}, {0, 100, 8, 0},
      {95, 100, 95, 100},    {83.3, 100, 100, 100}, {0, 0, 0, 0},
      {100, 100, 100, 100},  {0, 0, 17, 0},        {0, 0, 0, 0},
      {100, 100, 100, 100},  {0, 0, 0, 0},         {0, 0, 0, 0},
      {0, 0, 0, 0},          {100, 100, 100, 100}};
  std::vector<double> expected = {51.4, 58.8, 54.1, 52.9};
  std::vector<double> got = detector::average_rates(rows);
  for (std::size_t i = 0; i < 4; ++i)
    if (std::abs(got[i] - expected[i]) > 0.05)
      check.fail("column " + std::to_string(i) + " got " +
                 std::to_string(got[i]));
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(%.1f, %.1f, %.1f, %.1f)", got[0], got[1],
                got[2], got[3]);
  check.note(buf);
  return check;
}

// 6. Evasion fingerprints on the synthetic corpus with the default roster.
Check criterion_evasion() {
  Check check;
  std::vector<detector::CorpusSample> corpus = load_corpus();
  std::vector<detector::DetectorProfile> roster = detector::default_roster();
  std::vector<morph::Level> columns = {morph::Level::Class,
                                       morph::Level::Method, morph::Level::Body,
                                       morph::Level::All};

  auto run_at = [&](double junk_density) {
    morph::MorphConfig config;
    config.seed = 0xE7A1;
    config.variants = 3;
    config.junk_density = junk_density;
    return detector::evaluate(corpus, roster, config, columns);
  };

  detector::EvaluateOutput at_default = run_at(0.3);
  auto cell = [&](const detector::EvaluateOutput& out, std::size_t row,
                  std::size_t col) {
    return out.matrix.cells[row][col].value_or(-1.0);
  };
  for (std::size_t r = 0; r < roster.size(); ++r) {
    if (roster[r].kind == detector::ProfileKind::NameSig) {
      check.require(cell(at_default, r, 0) == 0.0,
                    roster[r].id + " class column not 0.0");
      check.require(cell(at_default, r, 3) == 0.0,
                    roster[r].id + " all column not 0.0");
      check.require(cell(at_default, r, 2) == 100.0,
                    roster[r].id + " body column not 100.0");
    }
    if (roster[r].kind == detector::ProfileKind::StringSig)
      for (std::size_t c = 0; c < columns.size(); ++c)
        check.require(cell(at_default, r, c) == 100.0,
                      roster[r].id + " not 100.0 everywhere");
  }

  detector::EvaluateOutput at_zero = run_at(0.0);
  detector::EvaluateOutput at_full = run_at(1.0);
  std::size_t og_row = 0;
  for (std::size_t r = 0; r < roster.size(); ++r)
    if (roster[r].id == "og-default") og_row = r;
  double r00 = cell(at_zero, og_row, 2);
  double r03 = cell(at_default, og_row, 2);
  double r10 = cell(at_full, og_row, 2);
  check.require(r10 <= r03 && r03 <= r00,
                "OpcodeGram body rates not monotone");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "og-default body: %.1f <= %.1f <= %.1f",
                r10, r03, r00);
  check.note(buf);
  return check;
}

// 8. verify(sign(b)) on 100 bundles; 100 single-byte mutations categorized.
Check criterion_signing() {
  Check check;
  std::vector<package::SignedBundle> bundles;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    ir::Program p = testsupport::random_program(seed);
    package::SignedBundle bundle =
        package::sign(package::write_bundle(p), "acceptance-key");
    if (!package::verify(bundle, "acceptance-key").valid()) {
      check.fail("verify(sign(.)) not Valid at seed " + std::to_string(seed));
      break;
    }
    bundles.push_back(std::move(bundle));
  }

  SplitMix64 rng(0x517E);
  int mutations = 0;
  while (mutations < 100) {
    package::SignedBundle mutated = bundles[rng.below(bundles.size())];
    std::size_t which = rng.below(mutated.bundle.entries.size() + 2);
    enum class Where { Entry, Manifest, Sig } where;
    std::string* target;
    std::string path;
    if (which < mutated.bundle.entries.size()) {
      where = Where::Entry;
      target = &mutated.bundle.entries[which].second;
      path = mutated.bundle.entries[which].first;
    } else if (which == mutated.bundle.entries.size()) {
      where = Where::Manifest;
      target = &mutated.manifest;
    } else {
      where = Where::Sig;
      target = &mutated.sig;
    }
    if (target->empty()) continue;
    std::size_t pos = rng.below(target->size());
    char old = (*target)[pos];
    char fresh;
    do {
      fresh = static_cast<char>(rng.below(256));
    } while (fresh == old);
    (*target)[pos] = fresh;
    ++mutations;

    package::Verdict verdict = package::verify(mutated, "acceptance-key");
    if (verdict.valid()) {
      check.fail("mutation accepted as Valid");
      continue;
    }
    switch (where) {
      case Where::Entry:
        check.require(verdict.kind == package::Verdict::Kind::TamperedEntry &&
                          verdict.path == path,
                      "entry mutation misclassified as " +
                          package::to_string(verdict));
        break;
      case Where::Sig:
        check.require(verdict.kind == package::Verdict::Kind::BadSignature,
                      "sig mutation misclassified as " +
                          package::to_string(verdict));
        break;
      case Where::Manifest:
        break;  // any non-Valid verdict is correct for manifest damage
    }
  }
  check.note("100 bundles valid, 100 mutations rejected");
  return check;
}

// 9. Ledger replay of the reference per-family per-level variant counts.
Check criterion_count_ledger_replay() {
  Check check;
  struct Row {
    const char* family;
    const char* sample;
    std::uint32_t counts[4];  // class, method, body, all
  };
  const Row rows[] = {
      {"AnserverBot", "FamA/s1", {2, 182, 171, 2}},
      {"BaseBridge", "FamB/s1", {1, 117, 73, 1}},
      {"DroidKungFu3", "FamA/s2", {63, 291, 281, 59}},
      {"DroidKungFu4", "FamC/s1", {21, 91, 95, 19}},
      {"DroidDream", "FamD/s1", {0, 16, 15, 0}},
      {"DroidDreamLight", "FamB/s2", {0, 44, 44, 0}},
      {"Geinimi", "FamD/s2", {3, 66, 48, 3}},
  };

  std::vector<morph::ReplayRequest> requests;
  for (const Row& row : rows) {
    morph::ReplayRequest req;
    req.family = row.family;
    req.source = row.sample;
    req.program = load_sample(fs::path(kCorpusDir) / row.sample);
    req.counts = {{morph::Level::Class, row.counts[0]},
                  {morph::Level::Method, row.counts[1]},
                  {morph::Level::Body, row.counts[2]},
                  {morph::Level::All, row.counts[3]}};
    requests.push_back(std::move(req));
  }
  morph::MorphConfig base;
  base.seed = 1771;
  morph::ReplayResult result = morph::replay_counts(requests, base);

  std::map<std::string, std::uint32_t> cells;
  for (const morph::VariantRecord& r : result.records)
    cells[r.family + "/" + r.level]++;

  const char* level_names[4] = {"class", "method", "body", "all"};
  std::uint32_t total = 0;
  for (const Row& row : rows)
    for (int c = 0; c < 4; ++c) {
      std::string key = std::string(row.family) + "/" + level_names[c];
      std::uint32_t got = cells.count(key) ? cells[key] : 0;
      if (got != row.counts[c])
        check.fail(key + ": " + std::to_string(got) + " != " +
                   std::to_string(row.counts[c]));
      total += row.counts[c];
    }
  check.require(result.records.size() == total,
                "ledger row total " + std::to_string(result.records.size()));

  // The four printed zero cells surface as DegenerateMorph notations.
  check.require(result.degenerate_notes.size() == 4,
                std::to_string(result.degenerate_notes.size()) +
                    " degenerate notes, wanted 4");
  for (const char* expected :
       {"DroidDream/class", "DroidDream/all", "DroidDreamLight/class",
        "DroidDreamLight/all"}) {
    bool found = false;
    for (const std::string& note : result.degenerate_notes)
      if (note.find(expected) != std::string::npos) found = true;
    check.require(found, std::string("missing notation for ") + expected);
  }
  check.note(std::to_string(result.records.size()) +
             " ledger rows, 4 zero-cell notations");
  return check;
}

// 10. Throughput: 1000 methods morphed at All level < 5 s single-threaded;
// parsing >= 10 MB/s.
Check criterion_performance() {
  Check check;
  ir::Program big = testsupport::random_program(7, testsupport::GenOptions::big());

  std::size_t methods = 0, instructions = 0;
  for (const auto& [name, cls] : big.classes) {
    if (cls.external) continue;
    methods += cls.methods.size();
    for (const ir::MethodDef& m : cls.methods) instructions += m.body.size();
  }
  check.require(methods >= 1000, "only " + std::to_string(methods) + " methods");
  check.require(instructions >= 50000,
                "only " + std::to_string(instructions) + " instructions");

  morph::MorphConfig config;
  config.levels = {morph::Level::All};
  config.variants = 1;
  config.seed = 10;
  auto t0 = Clock::now();
  morph::GenerateResult gen = morph::generate_variants(big, config, {"perf", "big"});
  double morph_secs = std::chrono::duration<double>(Clock::now() - t0).count();
  check.require(gen.ok(), "degenerate morph");
  check.require(morph_secs < 5.0,
                "morphing took " + std::to_string(morph_secs) + "s");

  std::vector<sasm::SourceUnit> units = sasm::emit_program_units(big);
  std::size_t bytes = 0;
  for (const sasm::SourceUnit& u : units) bytes += u.text.size();
  const int reps = 3;
  t0 = Clock::now();
  for (int i = 0; i < reps; ++i) {
    sasm::ParseResult result = sasm::parse_program(units, big.entry);
    if (!result.ok()) check.fail("big program failed to parse");
  }
  double parse_secs = std::chrono::duration<double>(Clock::now() - t0).count();
  double mb_per_s = (static_cast<double>(bytes) * reps / (1024.0 * 1024.0)) /
                    parse_secs;
  check.require(mb_per_s >= 10.0,
                "parse throughput " + std::to_string(mb_per_s) + " MB/s");

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu methods / %zu instrs; morph %.2fs; parse %.1f MB/s",
                methods, instructions, morph_secs, mb_per_s);
  check.note(buf);
  return check;
}

void report(int id, const std::string& name, const Check& check, int& failures) {
  std::printf("%s criterion %2d: %s%s%s\n", check.ok ? "PASS" : "FAIL", id,
              name.c_str(), check.detail.empty() ? "" : " -- ",
              check.detail.c_str());
  std::fflush(stdout);
  if (!check.ok) ++failures;
}

}  // namespace

int main() {
  int failures = 0;

  report(1, "round-trip parse(emit(P)) == P", criterion_round_trip(), failures);

  PreservationOutcome pres = criterion_preservation_and_opaque();
  report(2, "semantic preservation across all levels", pres.equivalence,
         failures);
  report(3, "cmd_morph determinism (byte-identical reruns)",
         criterion_determinism(), failures);
  report(4, "50 All-level variants pairwise distinct", criterion_distinctness(),
         failures);
  report(5, "reference 17x4 average-rate replay", criterion_average_rate_fixture(),
         failures);
  report(6, "evasion fingerprints with default roster", criterion_evasion(),
         failures);
  report(7, "opaque guards never taken", pres.opaque, failures);
  report(8, "sign/verify round-trip and mutation categories",
         criterion_signing(), failures);
  report(9, "reference variant-count ledger replay",
         criterion_count_ledger_replay(), failures);
  report(10, "desk-scale performance targets", criterion_performance(),
         failures);

  if (failures)
    std::printf("%d criterion(s) FAILED\n", failures);
  else
    std::printf("all 10 criteria passed\n");
  return failures;
}
