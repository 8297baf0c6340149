// Copyright (c) the morphkit authors.
// SPDX-License-Identifier: Apache-2.0

#include "morphkit/package.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "morphkit/sasm.hpp"

namespace morphkit::package {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kMagic = "MORPHB1\n";
constexpr std::string_view kProgramEntry = "META/PROGRAM";

std::string hex_of(const unsigned char* bytes, std::size_t len) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out += digits[bytes[i] >> 4];
    out += digits[bytes[i] & 0xF];
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                  nullptr))
    throw std::runtime_error("sha256: digest failure");
  return hex_of(digest, len);
}

std::string hmac_sha256_hex(std::string_view key, std::string_view data) {
  EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (!mac) throw std::runtime_error("hmac: HMAC unavailable");
  EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
  EVP_MAC_free(mac);
  if (!ctx) throw std::runtime_error("hmac: context failure");

  char digest_name[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
      OSSL_PARAM_construct_end(),
  };
  unsigned char out[EVP_MAX_MD_SIZE];
  std::size_t out_len = 0;
  bool ok = EVP_MAC_init(ctx, reinterpret_cast<const unsigned char*>(key.data()),
                         key.size(), params) &&
            EVP_MAC_update(ctx, reinterpret_cast<const unsigned char*>(data.data()),
                           data.size()) &&
            EVP_MAC_final(ctx, out, &out_len, sizeof(out));
  EVP_MAC_CTX_free(ctx);
  if (!ok) throw std::runtime_error("hmac: computation failure");
  return hex_of(out, out_len);
}

std::string Bundle::serialize() const {
  std::string out(kMagic);
  for (const auto& [path, bytes] : entries) {
    out += path;
    out += '\n';
    out += std::to_string(bytes.size());
    out += '\n';
    out += bytes;
    out += '\n';
  }
  return out;
}

std::string Bundle::digest() const { return sha256_hex(serialize()); }

Bundle write_bundle(const ir::Program& program) {
  Bundle bundle;
  for (const auto& [name, cls] : program.classes) {
    if (cls.external) continue;
    bundle.entries.emplace_back(sasm::unit_path_for(cls),
                                sasm::emit_class(cls));
  }
  std::sort(bundle.entries.begin(), bundle.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  bundle.entries.emplace_back(std::string(kProgramEntry),
                              ir::to_string(program.entry) + "\n");
  return bundle;
}

SignedBundle sign(const Bundle& bundle, std::string_view key) {
  if (key.empty()) throw std::invalid_argument("sign: empty key");
  SignedBundle out;
  out.bundle = bundle;
  for (const auto& [path, bytes] : bundle.entries) {
    out.manifest += path;
    out.manifest += " sha256=";
    out.manifest += sha256_hex(bytes);
    out.manifest += '\n';
  }
  out.sig = hmac_sha256_hex(key, out.manifest);
  return out;
}

std::string to_string(const Verdict& verdict) {
  switch (verdict.kind) {
    case Verdict::Kind::Valid:
      return "Valid";
    case Verdict::Kind::TamperedEntry:
      return "TamperedEntry(" + verdict.path + ")";
    case Verdict::Kind::BadSignature:
      return "BadSignature";
  }
  return "?";
}

Verdict verify(const SignedBundle& signed_bundle, std::string_view key) {
  // Split the manifest into lines and check it against the entries pairwise.
  std::vector<std::pair<std::string, std::string>> listed;  // (path, hex)
  {
    std::string_view rest = signed_bundle.manifest;
    while (!rest.empty()) {
      std::size_t nl = rest.find('\n');
      std::string_view line =
          nl == std::string_view::npos ? rest : rest.substr(0, nl);
      rest = nl == std::string_view::npos ? std::string_view{}
                                          : rest.substr(nl + 1);
      if (line.empty()) continue;
      std::size_t sep = line.rfind(" sha256=");
      if (sep == std::string_view::npos)
        return {Verdict::Kind::TamperedEntry, std::string(line)};
      listed.emplace_back(std::string(line.substr(0, sep)),
                          std::string(line.substr(sep + 8)));
    }
  }

  const auto& entries = signed_bundle.bundle.entries;
  for (std::size_t i = 0; i < std::max(entries.size(), listed.size()); ++i) {
    if (i >= listed.size())
      return {Verdict::Kind::TamperedEntry, entries[i].first};
    if (i >= entries.size())
      return {Verdict::Kind::TamperedEntry, listed[i].first};
    if (entries[i].first != listed[i].first)
      return {Verdict::Kind::TamperedEntry, entries[i].first};
    if (sha256_hex(entries[i].second) != listed[i].second)
      return {Verdict::Kind::TamperedEntry, entries[i].first};
  }

  if (hmac_sha256_hex(key, signed_bundle.manifest) != signed_bundle.sig)
    return {Verdict::Kind::BadSignature, {}};
  return {Verdict::Kind::Valid, {}};
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_bundle_dir(const SignedBundle& signed_bundle, const fs::path& dir) {
  for (const auto& [path, bytes] : signed_bundle.bundle.entries)
    write_file_atomic(dir / path, bytes);
  write_file_atomic(dir / "META/MANIFEST", signed_bundle.manifest);
  write_file_atomic(dir / "META/SIG", signed_bundle.sig + "\n");
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string out((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  return out;
}

}  // namespace

SignedBundle read_bundle_dir(const fs::path& dir) {
  SignedBundle out;
  std::vector<std::string> paths;
  for (const auto& item : fs::recursive_directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    std::string rel = fs::relative(item.path(), dir).generic_string();
    if (rel.rfind("META/", 0) == 0) continue;
    paths.push_back(std::move(rel));
  }
  std::sort(paths.begin(), paths.end());
  for (const std::string& rel : paths)
    out.bundle.entries.emplace_back(rel, read_file(dir / rel));

  if (fs::exists(dir / kProgramEntry))
    out.bundle.entries.emplace_back(std::string(kProgramEntry),
                                    read_file(dir / kProgramEntry));
  if (fs::exists(dir / "META/MANIFEST"))
    out.manifest = read_file(dir / "META/MANIFEST");
  if (fs::exists(dir / "META/SIG")) {
    out.sig = read_file(dir / "META/SIG");
    while (!out.sig.empty() && (out.sig.back() == '\n' || out.sig.back() == '\r'))
      out.sig.pop_back();
  }
  return out;
}

}  // namespace morphkit::package
