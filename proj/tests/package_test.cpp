// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/package.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "morphkit/prng.hpp"
#include "morphkit/sasm.hpp"
#include "support/fixtures.hpp"
#include "support/generator.hpp"

namespace morphkit {
namespace {

namespace fs = std::filesystem;
namespace ins = ir::ins;
using testsupport::make_entry;
using testsupport::wrap_entry;

const char* kCorpusDir = MORPHKIT_SOURCE_DIR "/corpus";

ir::Program load_sample(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& item : fs::recursive_directory_iterator(dir))
    if (item.is_regular_file() && item.path().extension() == ".sasm")
      files.push_back(item.path());
  std::sort(files.begin(), files.end());
  std::vector<sasm::SourceUnit> units;
  for (const fs::path& f : files) {
    std::ifstream in(f, std::ios::binary);
    units.push_back({f.string(),
                     std::string((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>())});
  }
  std::ifstream e(dir / "ENTRY");
  std::string line;
  std::getline(e, line);
  sasm::ParseResult result =
      sasm::parse_program(units, *sasm::parse_method_ref_text(line));
  EXPECT_TRUE(result.ok());
  return std::move(*result.program);
}

// FIPS 180-4 / RFC 4231 fixed vectors keep the hash path independently
// checked even though production goes through libcrypto.
TEST(Hashing, Sha256KnownVectors) {
  EXPECT_EQ(package::sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(package::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hashing, HmacSha256Rfc4231Vectors) {
  // Case 1: key = 0x0b * 20, data "Hi There".
  std::string key1(20, '\x0b');
  EXPECT_EQ(package::hmac_sha256_hex(key1, "Hi There"),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  // Case 2: key "Jefe", data "what do ya want for nothing?".
  EXPECT_EQ(package::hmac_sha256_hex("Jefe", "what do ya want for nothing?"),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Bundle, OneClassProgramHasTwoEntries) {
  ir::Program p = wrap_entry(
      make_entry(0, 1, {ins::const_i32(0, 1), ins::return_reg(0)}));
  package::Bundle bundle = package::write_bundle(p);
  ASSERT_EQ(bundle.entries.size(), 2u);
  EXPECT_EQ(bundle.entries[0].first, "a/A.sasm");
  EXPECT_EQ(bundle.entries[1].first, "META/PROGRAM");
  EXPECT_EQ(bundle.entries[1].second, "La/A;->main()I\n");
}

TEST(Bundle, DeterministicBytes) {
  ir::Program p = testsupport::random_program(17);
  package::Bundle a = package::write_bundle(p);
  package::Bundle b = package::write_bundle(p);
  EXPECT_EQ(a.serialize(), b.serialize());
  EXPECT_EQ(a.digest(), b.digest());
}

TEST(Bundle, CorpusEntryCountIsInternalClassesPlusOne) {
  for (const char* sample : {"FamA/s1", "FamC/s1", "FamC/s2"}) {
    ir::Program p = load_sample(fs::path(kCorpusDir) / sample);
    std::size_t internal = 0;
    for (const auto& [name, cls] : p.classes)
      if (!cls.external) ++internal;
    package::Bundle bundle = package::write_bundle(p);
    EXPECT_EQ(bundle.entries.size(), internal + 1) << sample;
    // External stubs never land in bundles.
    for (const auto& [path, bytes] : bundle.entries)
      EXPECT_EQ(bytes.find(".external"), std::string::npos) << sample;
  }
}

TEST(Sign, SpecExampleMinimalBundle) {
  package::Bundle bundle;
  bundle.entries.emplace_back("META/PROGRAM", "La/A;->main()I\n");
  package::SignedBundle signed_bundle = package::sign(bundle, "k");

  std::string expected_line =
      "META/PROGRAM sha256=" + package::sha256_hex("La/A;->main()I\n") + "\n";
  EXPECT_EQ(signed_bundle.manifest, expected_line);
  EXPECT_EQ(signed_bundle.sig,
            package::hmac_sha256_hex("k", signed_bundle.manifest));
  EXPECT_TRUE(package::verify(signed_bundle, "k").valid());
}

TEST(Sign, EmptyKeyRejected) {
  package::Bundle bundle;
  bundle.entries.emplace_back("META/PROGRAM", "x\n");
  EXPECT_THROW(package::sign(bundle, ""), std::invalid_argument);
}

TEST(Sign, DifferentKeysSameManifestDifferentSig) {
  ir::Program p = testsupport::random_program(4);
  package::Bundle bundle = package::write_bundle(p);
  package::SignedBundle a = package::sign(bundle, "key-one");
  package::SignedBundle b = package::sign(bundle, "key-two");
  EXPECT_EQ(a.manifest, b.manifest);
  EXPECT_NE(a.sig, b.sig);
  EXPECT_TRUE(package::verify(a, "key-one").valid());
  EXPECT_EQ(package::verify(a, "key-two").kind,
            package::Verdict::Kind::BadSignature);
}

TEST(Verify, TamperedEntryReportsPath) {
  ir::Program p = load_sample(fs::path(kCorpusDir) / "FamB/s1");
  package::SignedBundle bundle =
      package::sign(package::write_bundle(p), "corpus-key");

  package::SignedBundle tampered = bundle;
  tampered.bundle.entries[1].second[5] ^= 0x20;
  package::Verdict verdict = package::verify(tampered, "corpus-key");
  EXPECT_EQ(verdict.kind, package::Verdict::Kind::TamperedEntry);
  EXPECT_EQ(verdict.path, bundle.bundle.entries[1].first);
}

TEST(Verify, TamperedSigReportsBadSignature) {
  ir::Program p = load_sample(fs::path(kCorpusDir) / "FamB/s1");
  package::SignedBundle bundle =
      package::sign(package::write_bundle(p), "corpus-key");
  package::SignedBundle tampered = bundle;
  tampered.sig[3] = tampered.sig[3] == 'a' ? 'b' : 'a';
  EXPECT_EQ(package::verify(tampered, "corpus-key").kind,
            package::Verdict::Kind::BadSignature);
}

TEST(Verify, SingleByteMutationsNeverValid) {
  ir::Program p = testsupport::random_program(5);
  package::SignedBundle bundle = package::sign(package::write_bundle(p), "kk");
  SplitMix64 rng(0x5EED);
  for (int iter = 0; iter < 60; ++iter) {
    package::SignedBundle mutated = bundle;
    std::size_t which = rng.below(mutated.bundle.entries.size() + 2);
    std::string* target;
    if (which < mutated.bundle.entries.size())
      target = &mutated.bundle.entries[which].second;
    else if (which == mutated.bundle.entries.size())
      target = &mutated.manifest;
    else
      target = &mutated.sig;
    if (target->empty()) continue;
    std::size_t pos = rng.below(target->size());
    char old = (*target)[pos];
    char fresh;
    do {
      fresh = static_cast<char>(rng.below(256));
    } while (fresh == old);
    (*target)[pos] = fresh;
    EXPECT_FALSE(package::verify(mutated, "kk").valid());
  }
}

TEST(BundleDir, WriteReadRoundTrip) {
  ir::Program p = load_sample(fs::path(kCorpusDir) / "FamA/s2");
  package::SignedBundle bundle =
      package::sign(package::write_bundle(p), "dir-key");

  fs::path dir = fs::temp_directory_path() / "morphkit_pkg_test";
  fs::remove_all(dir);
  package::write_bundle_dir(bundle, dir);
  package::SignedBundle loaded = package::read_bundle_dir(dir);
  EXPECT_EQ(loaded.bundle.entries, bundle.bundle.entries);
  EXPECT_EQ(loaded.manifest, bundle.manifest);
  EXPECT_EQ(loaded.sig, bundle.sig);
  EXPECT_TRUE(package::verify(loaded, "dir-key").valid());
  fs::remove_all(dir);
}

}  // namespace
}  // namespace morphkit
