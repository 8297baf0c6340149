// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphkit/ir.hpp"

namespace morphkit::package {

/// An ordered (path, bytes) container: all `.sasm` entries sorted
/// lexicographically by path, then META/PROGRAM (the entry ref line).
struct Bundle {
  std::vector<std::pair<std::string, std::string>> entries;

  /// Canonical single-file serialization (uncompressed concatenation).
  std::string serialize() const;
  /// SHA-256 hex of serialize().
  std::string digest() const;
};

/// One `.sasm` entry per internal class (canonical emission), deterministic
/// bytes for equal programs.
Bundle write_bundle(const ir::Program& program);

/// Bundle plus META/MANIFEST ("<path> sha256=<hex>" per entry, entry order)
/// and META/SIG (lowercase hex HMAC-SHA-256 of the exact MANIFEST bytes).
struct SignedBundle {
  Bundle bundle;
  std::string manifest;
  std::string sig;  // hex, no trailing newline
};

/// Throws std::invalid_argument on an empty key.
SignedBundle sign(const Bundle& bundle, std::string_view key);

struct Verdict {
  enum class Kind { Valid, TamperedEntry, BadSignature };
  Kind kind = Kind::Valid;
  std::string path;  // first failing entry for TamperedEntry

  bool valid() const { return kind == Kind::Valid; }
};

std::string to_string(const Verdict& verdict);

/// Recomputes all entry digests first (first failing path wins), then the MAC.
Verdict verify(const SignedBundle& signed_bundle, std::string_view key);

// -- hashing ---------------------------------------------------------------

std::string sha256_hex(std::string_view data);
std::string hmac_sha256_hex(std::string_view key, std::string_view data);

// -- directory-tree transport ------------------------------------------------

/// Temp-file + rename per file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

/// Lays the bundle out as a directory tree (entries + META/MANIFEST +
/// META/SIG). Throws std::runtime_error on I/O failure.
void write_bundle_dir(const SignedBundle& signed_bundle,
                      const std::filesystem::path& dir);

/// Reads a bundle directory back: every non-META file sorted by relative
/// path, plus META/PROGRAM last; MANIFEST/SIG are optional (empty if absent).
SignedBundle read_bundle_dir(const std::filesystem::path& dir);

}  // namespace morphkit::package
